"""Exact entropy algebra on explicit finite distributions.

All quantities are in bits (base-2 logarithms).  The Renyi entropy of
order q is

    S_q = log2(sum_x p(x)^q) / (1 - q),        q > 0, q != 1,

with the q -> 1 limit giving the Shannon entropy.  Conditional
quantities use escort-weighted averaging, which is the one definition
of conditional Renyi entropy that keeps the chain rule

    S_q(X, Y) = S_q(Y) + S_q(X | Y)

exact for every order.  Conventions used throughout: 0 * log 0 := 0 and
0^q := 0, so zero-probability cells never contribute to any sum.

Sums of probability powers are accumulated with compensated summation
(`math.fsum`); the chain rule then holds to well below 1e-12 even for
orders q > 2 where the dynamic range of p^q is large.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError

# Absolute tolerance on probability normalization.  Inputs off by more
# than this are rejected, never silently renormalized.
PROB_TOL = 1e-12

# |q - 1| below this routes to the closed-form Shannon expressions
# instead of evaluating the 1/(1-q) prefactor.
SHANNON_WINDOW = 1e-9


@dataclass(frozen=True)
class RenyiOrder:
    """Order q of the Renyi entropy family; q = 1 selects Shannon."""

    q: float

    def __post_init__(self):
        q = float(self.q)
        if not math.isfinite(q) or q <= 0.0:
            raise ValidationError(f"Renyi order must be a positive real, got {self.q!r}")
        object.__setattr__(self, "q", q)

    @property
    def is_shannon(self) -> bool:
        return abs(self.q - 1.0) < SHANNON_WINDOW

    @classmethod
    def coerce(cls, value: "RenyiOrder | float") -> "RenyiOrder":
        return value if isinstance(value, cls) else cls(float(value))

    def __float__(self) -> float:
        return self.q


def _as_prob_array(values, ndim=None) -> np.ndarray:
    arr = np.asarray(values, dtype=float)
    if ndim is not None and arr.ndim != ndim:
        raise ValidationError(f"expected a rank-{ndim} probability array, got rank {arr.ndim}")
    if arr.size == 0:
        raise ValidationError("probability array is empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("probability array contains NaN or infinity")
    if np.any(arr < 0.0):
        raise ValidationError("probability array contains a negative entry")
    total = math.fsum(arr.ravel().tolist())
    if abs(total - 1.0) > PROB_TOL:
        raise ValidationError(f"probabilities sum to {total!r}, not 1 within {PROB_TOL}")
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class DiscreteDistribution:
    """Probability vector over a finite alphabet of W >= 1 symbols."""

    probs: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "probs", _as_prob_array(self.probs, ndim=1))

    @property
    def size(self) -> int:
        return int(self.probs.size)

    @classmethod
    def coerce(cls, value) -> "DiscreteDistribution":
        return value if isinstance(value, cls) else cls(np.asarray(value, dtype=float))


@dataclass(frozen=True)
class JointDistribution:
    """Joint probability tensor over two or more finite variables.

    Axis order is the variable order; every marginal obtained by summing
    out axes is itself a valid distribution.
    """

    probs: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.probs, dtype=float)
        if arr.ndim < 2:
            raise ValidationError("a joint distribution needs at least two axes")
        object.__setattr__(self, "probs", _as_prob_array(arr))

    def marginal(self, axis: int) -> DiscreteDistribution:
        """Distribution of the variable on `axis`, all others summed out."""
        keep = self.probs
        axes = tuple(i for i in range(keep.ndim) if i != axis % keep.ndim)
        return DiscreteDistribution(keep.sum(axis=axes))

    @classmethod
    def coerce(cls, value) -> "JointDistribution":
        return value if isinstance(value, cls) else cls(np.asarray(value, dtype=float))


def _power_sum(probs: np.ndarray, q: float) -> float:
    """Compensated sum of p^q over the positive entries (0^q := 0)."""
    flat = probs.ravel()
    positive = flat[flat > 0.0]
    return math.fsum(np.power(positive, q).tolist())


def _shannon_bits(probs: np.ndarray) -> float:
    flat = probs.ravel()
    positive = flat[flat > 0.0]
    return -math.fsum((positive * np.log2(positive)).tolist())


def entropy(dist, q) -> float:
    """Renyi entropy of order q in bits; Shannon entropy at q = 1.

    Parameters
    ----------
    dist : DiscreteDistribution or array-like
        Probability vector (or tensor: any valid joint is accepted and
        treated as a distribution over its flattened cells).
    q : RenyiOrder or float
        Positive order; values within 1e-9 of 1 use the Shannon branch.
    """
    order = RenyiOrder.coerce(q)
    if isinstance(dist, JointDistribution):
        probs = dist.probs
    else:
        probs = DiscreteDistribution.coerce(dist).probs
    if order.is_shannon:
        return _shannon_bits(probs)
    return math.log2(_power_sum(probs, order.q)) / (1.0 - order.q)


def escort(dist, q) -> DiscreteDistribution:
    """Escort distribution p^q / sum(p^q) of a probability vector.

    Raising to q > 1 emphasizes probable symbols, q < 1 emphasizes rare
    ones; q = 1 returns the input unchanged.
    """
    order = RenyiOrder.coerce(q)
    d = DiscreteDistribution.coerce(dist)
    if order.is_shannon:
        return d
    powered = np.where(d.probs > 0.0, np.power(d.probs, order.q), 0.0)
    total = math.fsum(powered.tolist())
    if total <= 0.0:
        raise ValidationError("escort distribution undefined for an all-zero vector")
    return DiscreteDistribution(powered / total)


def conditional_entropy(joint, q) -> float:
    """Entropy of the first variable given the second, in bits.

    For q != 1 this is the escort-averaged conditional Renyi entropy

        S_q(X | Y) = log2( sum_{x,y} p(x,y)^q / sum_y p(y)^q ) / (1 - q),

    which satisfies the chain rule exactly.  The q = 1 branch evaluates
    the Shannon identity H(X | Y) = H(X, Y) - H(Y) so that the chain
    rule is an arithmetic identity there too.
    """
    order = RenyiOrder.coerce(q)
    j = JointDistribution.coerce(joint)
    if j.probs.ndim != 2:
        raise ValidationError("conditional_entropy expects a two-variable joint")
    cond_marginal = j.probs.sum(axis=0)
    if order.is_shannon:
        return _shannon_bits(j.probs) - _shannon_bits(cond_marginal)
    num = _power_sum(j.probs, order.q)
    den = _power_sum(cond_marginal, order.q)
    return (math.log2(num) - math.log2(den)) / (1.0 - order.q)


def mutual_information(joint, q) -> float:
    """Order-q mutual information S_q(X) + S_q(Y) - S_q(X, Y) in bits.

    Symmetric in the two variables.  Non-negative for q = 1; for other
    orders it can be negative, signalling that conditioning reweights
    the distribution against the sector that order emphasizes.
    """
    order = RenyiOrder.coerce(q)
    j = JointDistribution.coerce(joint)
    if j.probs.ndim != 2:
        raise ValidationError("mutual_information expects a two-variable joint")
    return (
        entropy(j.marginal(0), order)
        + entropy(j.marginal(1), order)
        - entropy(j, order)
    )


def conditional_mutual_information(joint, q) -> float:
    """Order-q conditional mutual information I_q(X; Y | Z) in bits.

    `joint` carries axes (x, y, z); the third variable is the
    conditioning one.  Evaluates S_q(X | Z) - S_q(X | Y, Z) with the
    pair (Y, Z) flattened into a single conditioning variable.
    """
    order = RenyiOrder.coerce(q)
    j = JointDistribution.coerce(joint)
    if j.probs.ndim != 3:
        raise ValidationError("conditional_mutual_information expects a three-variable joint")
    nx = j.probs.shape[0]
    joint_xz = j.probs.sum(axis=1)
    joint_x_yz = j.probs.reshape(nx, -1)
    return conditional_entropy(joint_xz, order) - conditional_entropy(joint_x_yz, order)


def entropy_gain(prior, posterior, q) -> float:
    """S_q(prior) - S_q(posterior): information gained by an update.

    Positive means the update sharpened the distribution at order q.
    For q != 1 the gain can be negative even when the Shannon gain is
    zero or positive, because the two orders price the head and tail of
    the distribution differently.
    """
    order = RenyiOrder.coerce(q)
    before = DiscreteDistribution.coerce(prior)
    after = DiscreteDistribution.coerce(posterior)
    if before.size != after.size:
        raise ValidationError(
            f"prior and posterior lengths differ ({before.size} vs {after.size})"
        )
    return entropy(before, order) - entropy(after, order)
