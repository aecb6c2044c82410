"""Turn numeric series into symbol series via blocking and binning.

The pipeline is: average the series over disjoint blocks of equal
length, optionally switch to log-returns, fit N amplitude bins to the
result, and map every value to its bin index.  Fitting and applying are
separate steps so one binning can be reused across series or processes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError

BIN_MODES = ("width", "quantile")


@dataclass(frozen=True)
class BinningSpec:
    """N-bin amplitude partition: N-1 strictly ascending edges.

    mode "width" splits [min, max] into N equal intervals; "quantile"
    places edges at the k/N empirical quantiles (linear interpolation
    between order statistics, the numpy default).
    """

    mode: str
    alphabet_size: int
    edges: tuple[float, ...]

    def __post_init__(self):
        if self.mode not in BIN_MODES:
            raise ValidationError(f"bin mode must be one of {BIN_MODES}, got {self.mode!r}")
        if self.alphabet_size < 2:
            raise ValidationError("alphabet size must be at least 2")
        edges = tuple(float(e) for e in self.edges)
        if len(edges) != self.alphabet_size - 1:
            raise ValidationError(
                f"need {self.alphabet_size - 1} edges for {self.alphabet_size} bins, got {len(edges)}"
            )
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ValidationError(f"bin edges must be strictly ascending, got {edges}")
        object.__setattr__(self, "edges", edges)

    def to_json(self) -> str:
        return json.dumps(
            {"mode": self.mode, "alphabet_size": self.alphabet_size, "edges": list(self.edges)},
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "BinningSpec":
        raw = json.loads(text)
        return cls(raw["mode"], int(raw["alphabet_size"]), tuple(raw["edges"]))


@dataclass(frozen=True)
class SymbolSeries:
    """Integer series over the alphabet {0 .. N-1} plus origin metadata."""

    symbols: np.ndarray
    alphabet_size: int
    label: str = ""
    block_size: int = 1
    bin_mode: str | None = None
    bin_edges: tuple[float, ...] | None = field(default=None)

    def __post_init__(self):
        arr = np.asarray(self.symbols)
        if arr.size == 0:
            raise ValidationError("symbol series is empty")
        if not np.issubdtype(arr.dtype, np.integer):
            rounded = np.rint(np.asarray(arr, dtype=float))
            if np.any(rounded != np.asarray(arr, dtype=float)):
                raise ValidationError("symbols must be integers")
            arr = rounded
        arr = arr.astype(np.int64)
        if self.alphabet_size < 2:
            raise ValidationError("alphabet size must be at least 2")
        if arr.min() < 0 or arr.max() >= self.alphabet_size:
            raise ValidationError(
                f"symbols must lie in [0, {self.alphabet_size}), "
                f"got range [{arr.min()}, {arr.max()}]"
            )
        arr.flags.writeable = False
        object.__setattr__(self, "symbols", arr)

    def __len__(self) -> int:
        return int(self.symbols.size)


def block_coarse_grain(values, block_size: int) -> np.ndarray:
    """Arithmetic mean of each disjoint block of `block_size` samples.

    A trailing partial block is dropped rather than padded, so every
    output value averages exactly `block_size` inputs.  block_size = 1
    is the identity.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValidationError("cannot block-average an empty series")
    if block_size < 1:
        raise ValidationError("block size must be a positive integer")
    if block_size == 1:
        return arr.copy()
    n_blocks = arr.size // block_size
    if n_blocks == 0:
        raise ValidationError(
            f"series of length {arr.size} is shorter than one block of {block_size}"
        )
    return arr[: n_blocks * block_size].reshape(n_blocks, block_size).mean(axis=1)


def log_returns(values) -> np.ndarray:
    """ln(x_t / x_{t-1}); output is one sample shorter than the input."""
    arr = np.asarray(values, dtype=float)
    if arr.size < 2:
        raise ValidationError("log returns need at least two samples")
    if np.any(arr <= 0.0):
        raise ValidationError("log returns require strictly positive values")
    return np.diff(np.log(arr))


def fit_bins(values, mode: str = "width", alphabet_size: int = 3) -> BinningSpec:
    """Fit an N-bin partition to the amplitude range of `values`."""
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValidationError("cannot fit bins to an empty series")
    if not np.all(np.isfinite(arr)):
        raise ValidationError("cannot fit bins to non-finite values")
    if mode not in BIN_MODES:
        raise ValidationError(f"bin mode must be one of {BIN_MODES}, got {mode!r}")
    if alphabet_size < 2:
        raise ValidationError("alphabet size must be at least 2")
    if mode == "width":
        lo, hi = float(arr.min()), float(arr.max())
        if hi <= lo:
            raise ValidationError("equal-width bins are degenerate on a constant series")
        step = (hi - lo) / alphabet_size
        edges = tuple(lo + k * step for k in range(1, alphabet_size))
    else:
        if np.unique(arr).size < alphabet_size:
            raise ValidationError(
                f"quantile bins need at least {alphabet_size} distinct values"
            )
        fractions = np.arange(1, alphabet_size) / alphabet_size
        edges = tuple(float(e) for e in np.quantile(arr, fractions))
    return BinningSpec(mode, alphabet_size, edges)


def symbolize(values, spec: BinningSpec, label: str = "", block_size: int = 1) -> SymbolSeries:
    """Map each value to the index of its amplitude bin.

    A value exactly on an edge goes to the lower bin; values outside the
    fitted range clamp to the end bins.  Deterministic and monotone.
    """
    arr = np.asarray(values, dtype=float)
    if arr.size == 0:
        raise ValidationError("cannot symbolize an empty series")
    symbols = np.searchsorted(np.asarray(spec.edges), arr, side="left")
    return SymbolSeries(
        symbols=symbols,
        alphabet_size=spec.alphabet_size,
        label=label,
        block_size=block_size,
        bin_mode=spec.mode,
        bin_edges=spec.edges,
    )


def prepare_series(
    values,
    alphabet_size: int = 3,
    block_size: int = 1,
    mode: str = "width",
    use_log_returns: bool = False,
    label: str = "",
) -> SymbolSeries:
    """Full pipeline: block-average, optional log-returns, fit, symbolize.

    Log-returns, when enabled, are taken on the block-mean series (the
    returns of the coarse-grained prices).  Bins are fit per series.
    """
    coarse = block_coarse_grain(values, block_size)
    if use_log_returns:
        coarse = log_returns(coarse)
    spec = fit_bins(coarse, mode=mode, alphabet_size=alphabet_size)
    return symbolize(coarse, spec, label=label, block_size=block_size)
