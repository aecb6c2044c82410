"""Transfer entropy estimation from pairs of symbol series.

The estimator counts sliding-window words: at every admissible time t
it records the target's next symbol x_{t+1}, the target history word
(x_{t-m+1} .. x_t) and the source history word (y_{t-l+1} .. y_t).
The empirical distribution of those triples is the sufficient statistic
for both the Shannon transfer entropy

    T = sum p(x', xw, yw) * log2[ p(x'|xw,yw) / p(x'|xw) ]

and its order-q generalization, the difference of escort-averaged
conditional entropies

    T_q = S_q(X' | XW) - S_q(X' | XW, YW),

which recovers the Shannon value as q -> 1 and, unlike it, may be
negative for q != 1: learning the source history can widen the sector
of the predictive distribution that order q emphasizes.

Words are packed into int64 codes so counting is a vectorized
unique-and-count; only observed words are stored, so memory scales with
the data, not with the alphabet power.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import ValidationError
from .infocore import JointDistribution, RenyiOrder, conditional_entropy
from .symbolize import SymbolSeries

# Guard for int64 word codes: alphabet^(m+l+1) must stay addressable.
_CODE_LIMIT = 2**62


@dataclass(frozen=True)
class HistorySpec:
    """History lengths: m ticks of the target, l ticks of the source."""

    m: int
    l: int

    def __post_init__(self):
        if self.m < 1 or self.l < 1:
            raise ValidationError(f"history lengths must be >= 1, got m={self.m}, l={self.l}")


@dataclass(frozen=True)
class TransferResult:
    """A single transfer entropy value with the parameters that produced it."""

    value: float
    q: float
    m: int
    l: int
    target_alphabet: int
    source_alphabet: int
    n_windows: int
    direction: str


@dataclass
class WordDistribution:
    """Empirical counts of (next target symbol, target word, source word).

    Stored sparsely as packed int64 codes of the observed triples plus
    their counts; marginal groupings needed by the entropy formulas are
    derived lazily and cached.
    """

    codes: np.ndarray
    counts: np.ndarray
    target_alphabet: int
    source_alphabet: int
    m: int
    l: int
    target_label: str = "X"
    source_label: str = "Y"

    def __post_init__(self):
        codes = np.asarray(self.codes, dtype=np.int64)
        counts = np.asarray(self.counts, dtype=np.int64)
        if codes.size == 0:
            raise ValidationError("word distribution has no observed words")
        if codes.size != counts.size:
            raise ValidationError("codes and counts lengths differ")
        if np.any(counts <= 0):
            raise ValidationError("word counts must be positive")
        if np.unique(codes).size != codes.size:
            raise ValidationError("word codes must be unique")
        order = np.argsort(codes)
        codes, counts = codes[order], counts[order]
        codes.flags.writeable = False
        counts.flags.writeable = False
        self.codes, self.counts = codes, counts

    # -- code packing ------------------------------------------------------

    @property
    def _x_words(self) -> int:
        return self.target_alphabet**self.m

    @property
    def _y_words(self) -> int:
        return self.source_alphabet**self.l

    @property
    def n_windows(self) -> int:
        return int(self.counts.sum())

    @property
    def direction(self) -> str:
        return f"{self.source_label}->{self.target_label}"

    @classmethod
    def from_counts(
        cls,
        mapping: dict,
        target_alphabet: int,
        source_alphabet: int,
        m: int,
        l: int,
        target_label: str = "X",
        source_label: str = "Y",
    ) -> "WordDistribution":
        """Build from an explicit {(x_next, x_word, y_word): count} map.

        Useful for analytic joints where the exact stationary word
        probabilities are known as integer ratios.
        """
        x_words = target_alphabet**m
        y_words = source_alphabet**l
        if x_words * y_words * target_alphabet > _CODE_LIMIT:
            raise ValidationError("alphabet^history too large to encode")
        codes, counts = [], []
        for (x_next, x_word, y_word), count in mapping.items():
            count = int(count)
            if count < 0:
                raise ValidationError("word counts must be non-negative")
            if count == 0:
                continue
            if not (0 <= x_next < target_alphabet):
                raise ValidationError(f"next symbol {x_next} outside target alphabet")
            if len(x_word) != m or len(y_word) != l:
                raise ValidationError("word length does not match history spec")
            xcode = 0
            for s in x_word:
                if not (0 <= s < target_alphabet):
                    raise ValidationError(f"target symbol {s} outside alphabet")
                xcode = xcode * target_alphabet + int(s)
            ycode = 0
            for s in y_word:
                if not (0 <= s < source_alphabet):
                    raise ValidationError(f"source symbol {s} outside alphabet")
                ycode = ycode * source_alphabet + int(s)
            codes.append((x_next * x_words + xcode) * y_words + ycode)
            counts.append(count)
        return cls(
            codes=np.asarray(codes, dtype=np.int64),
            counts=np.asarray(counts, dtype=np.int64),
            target_alphabet=target_alphabet,
            source_alphabet=source_alphabet,
            m=m,
            l=l,
            target_label=target_label,
            source_label=source_label,
        )

    def items(self):
        """Yield ((x_next, x_word, y_word), count) for every observed word."""
        for code, count in zip(self.codes.tolist(), self.counts.tolist()):
            ycode = code % self._y_words
            rest = code // self._y_words
            xcode = rest % self._x_words
            x_next = rest // self._x_words
            yield (x_next, self._decode(xcode, self.target_alphabet, self.m),
                   self._decode(ycode, self.source_alphabet, self.l)), count

    @staticmethod
    def _decode(code: int, base: int, length: int) -> tuple[int, ...]:
        word = []
        for _ in range(length):
            code, digit = divmod(code, base)
            word.append(digit)
        return tuple(reversed(word))

    def to_csv(self, path) -> None:
        """Diagnostic dump: one (word, count) row per observed word."""
        lines = ["x_next,x_word,y_word,count"]
        for (x_next, x_word, y_word), count in self.items():
            xw = "|".join(str(s) for s in x_word)
            yw = "|".join(str(s) for s in y_word)
            lines.append(f"{x_next},{xw},{yw},{count}")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("\n".join(lines) + "\n")

    # -- cached marginal groupings ------------------------------------------

    @cached_property
    def _future(self) -> np.ndarray:
        return self.codes // (self._x_words * self._y_words)

    @cached_property
    def _xh_group(self):
        xh = (self.codes // self._y_words) % self._x_words
        return _aggregate(xh, self.counts)

    @cached_property
    def _xhyh_group(self):
        rest = self.codes % (self._x_words * self._y_words)
        return _aggregate(rest, self.counts)

    @cached_property
    def _fxh_group(self):
        fx = self.codes // self._y_words
        return _aggregate(fx, self.counts)

    def joint_future_given_target_history(self) -> JointDistribution:
        """Joint of (next symbol, target-history word), source summed out."""
        unique, _, pair_counts = self._fxh_group
        future_of_pair = unique // self._x_words
        xcode_of_pair = unique % self._x_words
        xh_unique, _, _ = self._xh_group
        cols = np.searchsorted(xh_unique, xcode_of_pair)
        grid = np.zeros((self.target_alphabet, xh_unique.size), dtype=float)
        grid[future_of_pair, cols] = pair_counts / self.n_windows
        return JointDistribution(grid)

    def joint_future_given_both_histories(self) -> JointDistribution:
        """Joint of (next symbol, combined target+source history word)."""
        unique, inverse, _ = self._xhyh_group
        grid = np.zeros((self.target_alphabet, unique.size), dtype=float)
        np.add.at(grid, (self._future, inverse), self.counts)
        grid /= self.n_windows
        return JointDistribution(grid)


def _aggregate(group_codes: np.ndarray, counts: np.ndarray):
    """Unique group codes, per-word group index, and per-group totals."""
    unique, inverse = np.unique(group_codes, return_inverse=True)
    totals = np.zeros(unique.size, dtype=np.int64)
    np.add.at(totals, inverse, counts)
    return unique, inverse, totals


def count_words(
    x: SymbolSeries, y: SymbolSeries, h: HistorySpec, pseudo_count: int = 0
) -> WordDistribution:
    """Count sliding-window words of a target/source series pair.

    Windows sit at t = max(m, l) .. L-2 (0-based): the future symbol is
    x_{t+1} and both history words end at t.  The first max(m, l)
    positions are skipped so every window has full histories, giving
    L - max(m, l) - 1 windows in total.

    `pseudo_count` > 0 additively smooths the distribution by granting
    that many extra observations to every possible word.  Off by
    default: surrogate subtraction is the standard bias treatment here.
    """
    if len(x) != len(y):
        raise ValidationError(f"series lengths differ: {len(x)} vs {len(y)}")
    if pseudo_count < 0:
        raise ValidationError("pseudo count must be non-negative")
    length = len(x)
    start = max(h.m, h.l)
    n_windows = length - start - 1
    if n_windows < 1:
        raise ValidationError(
            f"series of length {length} too short for histories m={h.m}, l={h.l}"
        )
    x_words = x.alphabet_size**h.m
    y_words = y.alphabet_size**h.l
    if x_words * y_words * x.alphabet_size > _CODE_LIMIT:
        raise ValidationError("alphabet^history too large to encode")

    xs = x.symbols.astype(np.int64)
    ys = y.symbols.astype(np.int64)
    x_next = xs[start + 1 : start + 1 + n_windows]

    x_pow = x.alphabet_size ** np.arange(h.m - 1, -1, -1, dtype=np.int64)
    x_view = np.lib.stride_tricks.sliding_window_view(xs, h.m)
    xcode = x_view[start - h.m + 1 : start - h.m + 1 + n_windows] @ x_pow

    y_pow = y.alphabet_size ** np.arange(h.l - 1, -1, -1, dtype=np.int64)
    y_view = np.lib.stride_tricks.sliding_window_view(ys, h.l)
    ycode = y_view[start - h.l + 1 : start - h.l + 1 + n_windows] @ y_pow

    full = (x_next * x_words + xcode) * y_words + ycode
    codes, counts = np.unique(full, return_counts=True)
    counts = counts.astype(np.int64)
    if pseudo_count > 0:
        n_possible = x.alphabet_size * x_words * y_words
        if n_possible > 10**8:
            raise ValidationError(
                "pseudo counts require enumerating every possible word; "
                f"{n_possible} words is too many"
            )
        smoothed = np.full(n_possible, pseudo_count, dtype=np.int64)
        smoothed[codes] += counts
        codes = np.arange(n_possible, dtype=np.int64)
        counts = smoothed
    return WordDistribution(
        codes=codes,
        counts=counts,
        target_alphabet=x.alphabet_size,
        source_alphabet=y.alphabet_size,
        m=h.m,
        l=h.l,
        target_label=x.label or "X",
        source_label=y.label or "Y",
    )


def shannon_transfer_entropy(w: WordDistribution) -> TransferResult:
    """Shannon transfer entropy of a word distribution, in bits.

    Evaluates the plug-in log-ratio sum directly from the counts; words
    never observed carry zero probability and are skipped.  The value is
    non-negative up to floating-point rounding.
    """
    total = w.n_windows
    _, xh_inv, xh_counts = w._xh_group
    _, both_inv, both_counts = w._xhyh_group
    _, fx_inv, fx_counts = w._fxh_group
    log_ratio = (
        np.log2(w.counts)
        + np.log2(xh_counts[xh_inv])
        - np.log2(both_counts[both_inv])
        - np.log2(fx_counts[fx_inv])
    )
    value = math.fsum(((w.counts / total) * log_ratio).tolist())
    return TransferResult(
        value=value,
        q=1.0,
        m=w.m,
        l=w.l,
        target_alphabet=w.target_alphabet,
        source_alphabet=w.source_alphabet,
        n_windows=total,
        direction=w.direction,
    )


def renyi_transfer_entropy(w: WordDistribution, q) -> TransferResult:
    """Order-q transfer entropy S_q(X'|XW) - S_q(X'|XW,YW), in bits.

    Both conditional entropies are escort-averaged marginalizations of
    the word distribution.  At q = 1 this agrees with
    `shannon_transfer_entropy`; away from 1 the value may be negative.
    """
    order = RenyiOrder.coerce(q)
    value = conditional_entropy(
        w.joint_future_given_target_history(), order
    ) - conditional_entropy(w.joint_future_given_both_histories(), order)
    return TransferResult(
        value=value,
        q=order.q,
        m=w.m,
        l=w.l,
        target_alphabet=w.target_alphabet,
        source_alphabet=w.source_alphabet,
        n_windows=w.n_windows,
        direction=w.direction,
    )


def renyi_transfer_entropy_escort(w: WordDistribution, q, dual: bool = False) -> float:
    """Order-q transfer entropy via the escort-weighted ratio form.

    An independent evaluation path used to cross-check
    `renyi_transfer_entropy`: escort weights over the conditioning words
    multiply powered conditional probabilities and the two sums are
    compared inside one logarithm.  With `dual=True` the roles are
    exchanged (source words conditioned on target words), which is
    algebraically the same number.  Delegates to the Shannon estimator
    inside the q = 1 window, where the prefactor is singular.
    """
    order = RenyiOrder.coerce(q)
    if order.is_shannon:
        return shannon_transfer_entropy(w).value
    qv = order.q
    _, xh_inv, xh_counts = w._xh_group
    _, both_inv, both_counts = w._xhyh_group
    fx_unique, fx_inv, fx_counts = w._fxh_group

    xh_weights = np.power(xh_counts, qv)
    xh_weights /= math.fsum(xh_weights.tolist())

    if not dual:
        # sum over (x', xw) of escort(xw) * p(x'|xw)^q
        # over (x', xw, yw) of escort(xw, yw) * p(x'|xw,yw)^q
        xcode_of_pair = fx_unique % w._x_words
        xh_unique = w._xh_group[0]
        pair_xh = np.searchsorted(xh_unique, xcode_of_pair)
        num = math.fsum(
            (xh_weights[pair_xh] * np.power(fx_counts / xh_counts[pair_xh], qv)).tolist()
        )
        both_weights = np.power(both_counts, qv)
        both_weights /= math.fsum(both_weights.tolist())
        den = math.fsum(
            (both_weights[both_inv] * np.power(w.counts / both_counts[both_inv], qv)).tolist()
        )
    else:
        # sum over (xw, yw) of escort(xw) * p(yw|xw)^q
        # over (x', xw, yw) of escort(x', xw) * p(yw|x', xw)^q
        both_unique = w._xhyh_group[0]
        xh_of_group = both_unique // w._y_words
        xh_unique = w._xh_group[0]
        group_xh = np.searchsorted(xh_unique, xh_of_group)
        num = math.fsum(
            (xh_weights[group_xh] * np.power(both_counts / xh_counts[group_xh], qv)).tolist()
        )
        fx_weights = np.power(fx_counts, qv)
        fx_weights /= math.fsum(fx_weights.tolist())
        den = math.fsum(
            (fx_weights[fx_inv] * np.power(w.counts / fx_counts[fx_inv], qv)).tolist()
        )
    return (math.log2(num) - math.log2(den)) / (1.0 - qv)
