"""Pairwise analysis drivers and result emission.

Conventions fixed here: flow matrices are oriented rows = target
(receiver), columns = source, so entry [i][j] is the effective transfer
entropy from series j into series i.  Diagonals are undefined and
rendered blank, never zero.  The net flow matrix is the difference
F[i][j] = T(j -> i) - T(i -> j); a positive entry means series j is the
net information exporter to series i.

CSV output carries 12 significant digits; JSON carries full precision.
Given a fixed surrogate seed every emitted byte is reproducible.
"""

from __future__ import annotations

import json
import math
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ValidationError
from .infocore import RenyiOrder
from .surrogate import SurrogateSpec, effective_transfer_entropy
from .symbolize import SymbolSeries
from .transfer import HistorySpec

_ANTISYM_TOL = 1e-12


class FiniteSampleWarning(UserWarning):
    """Window count has dropped into the unreliable finite-sample regime."""


@dataclass(frozen=True)
class FlowMatrix:
    """Square grid of effective transfer entropies between labelled series."""

    labels: tuple[str, ...]
    values: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        labels = tuple(self.labels)
        values = np.asarray(self.values, dtype=float)
        if len(labels) < 2:
            raise ValidationError("a flow matrix needs at least two labels")
        if len(set(labels)) != len(labels):
            raise ValidationError("flow matrix labels must be unique")
        if values.shape != (len(labels), len(labels)):
            raise ValidationError(
                f"matrix shape {values.shape} does not match {len(labels)} labels"
            )
        if not np.all(np.isnan(np.diag(values))):
            raise ValidationError("diagonal entries are undefined and must be NaN")
        off = ~np.eye(len(labels), dtype=bool)
        if not np.all(np.isfinite(values[off])):
            raise ValidationError("off-diagonal entries must be finite")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class NetFlowMatrix:
    """Antisymmetric net-information-flow grid with zero diagonal."""

    labels: tuple[str, ...]
    values: np.ndarray
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        labels = tuple(self.labels)
        values = np.asarray(self.values, dtype=float)
        if values.shape != (len(labels), len(labels)):
            raise ValidationError("net flow matrix must be square over its labels")
        if np.any(np.abs(values + values.T) > _ANTISYM_TOL):
            raise ValidationError("net flow matrix must be antisymmetric")
        if np.any(np.diag(values) != 0.0):
            raise ValidationError("net flow diagonal must be exactly zero")
        values = values.copy()
        values.flags.writeable = False
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class SweepRow:
    """One (parameter value, direction) result of a sweep."""

    param: float
    source: str
    target: str
    raw: float
    surrogate_mean: float
    surrogate_std: float
    effective: float
    n_windows: int


@dataclass(frozen=True)
class SweepTable:
    """Rows of a q- or m-sweep over one ordered pair, both directions."""

    param_name: str
    rows: tuple[SweepRow, ...]
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.param_name not in ("q", "m"):
            raise ValidationError("sweep parameter must be 'q' or 'm'")
        object.__setattr__(self, "rows", tuple(self.rows))


def _series_label(series: SymbolSeries, fallback: str) -> str:
    return series.label or fallback


def pairwise_matrix(
    series: list[SymbolSeries],
    h: HistorySpec,
    q,
    spec: SurrogateSpec,
    timing_sink: dict | None = None,
) -> FlowMatrix:
    """Effective transfer entropy for every ordered pair of series.

    All series must have equal lengths (align upstream) and unique
    labels.  A failure on any pair aborts the whole run with the pair
    named in the error.  Passing a dict as `timing_sink` records the
    wall-clock seconds spent on each directed pair.
    """
    if len(series) < 2:
        raise ValidationError("pairwise matrix needs at least two series")
    labels = tuple(_series_label(s, f"series{i}") for i, s in enumerate(series))
    if len(set(labels)) != len(labels):
        raise ValidationError(f"series labels must be unique, got {labels}")
    lengths = {len(s) for s in series}
    if len(lengths) != 1:
        raise ValidationError(f"series lengths differ: {sorted(lengths)}")
    order = RenyiOrder.coerce(q)
    n = len(series)
    values = np.full((n, n), np.nan)
    for i in range(n):  # target
        for j in range(n):  # source
            if i == j:
                continue
            started = time.perf_counter()
            try:
                result = effective_transfer_entropy(series[i], series[j], h, order, spec)
            except Exception as exc:
                raise ValidationError(
                    f"pair {labels[j]}->{labels[i]} failed: {exc}"
                ) from exc
            values[i, j] = result.effective
            if timing_sink is not None:
                timing_sink[f"{labels[j]}->{labels[i]}"] = time.perf_counter() - started
    params = {
        "q": order.q,
        "m": h.m,
        "l": h.l,
        "alphabet_sizes": [s.alphabet_size for s in series],
        "surrogate_method": spec.method,
        "surrogate_ensemble": spec.ensemble_size,
        "surrogate_seed": spec.rng_seed,
        "n_samples": len(series[0]),
    }
    return FlowMatrix(labels=labels, values=values, params=params)


def net_flow(matrix: FlowMatrix) -> NetFlowMatrix:
    """Net flow F[i][j] = T(j -> i) - T(i -> j); antisymmetric, zero diagonal."""
    v = matrix.values
    out = np.zeros_like(v)
    n = v.shape[0]
    for i in range(n):
        for j in range(n):
            if i != j:
                out[i, j] = v[i, j] - v[j, i]
    return NetFlowMatrix(labels=matrix.labels, values=out, params=dict(matrix.params))


def q_sweep(
    x: SymbolSeries,
    y: SymbolSeries,
    h: HistorySpec,
    q_grid,
    spec: SurrogateSpec,
) -> SweepTable:
    """Effective transfer entropy in both directions over a grid of orders.

    No monotonicity in q is assumed or implied; the table is the
    deliverable and any structure in it is for the reader to judge.
    """
    label_x = _series_label(x, "X")
    label_y = _series_label(y, "Y")
    rows = []
    for q in q_grid:
        order = RenyiOrder.coerce(q)
        for target, source, t_label, s_label in (
            (x, y, label_x, label_y),
            (y, x, label_y, label_x),
        ):
            r = effective_transfer_entropy(target, source, h, order, spec)
            rows.append(
                SweepRow(
                    param=order.q,
                    source=s_label,
                    target=t_label,
                    raw=r.raw.value,
                    surrogate_mean=r.surrogate_mean,
                    surrogate_std=r.surrogate_std,
                    effective=r.effective,
                    n_windows=r.raw.n_windows,
                )
            )
    params = {"m": h.m, "l": h.l, "surrogate_method": spec.method,
              "surrogate_ensemble": spec.ensemble_size, "surrogate_seed": spec.rng_seed}
    return SweepTable(param_name="q", rows=tuple(rows), params=params)


def m_sweep(
    x: SymbolSeries,
    y: SymbolSeries,
    m_grid,
    q,
    spec: SurrogateSpec,
    min_windows: int = 100,
) -> SweepTable:
    """Transfer entropy in both directions over a grid of history lengths.

    Uses l = m throughout.  Plateau detection is left to whoever reads
    the table; a FiniteSampleWarning is raised whenever the window count
    falls below `min_windows`.
    """
    order = RenyiOrder.coerce(q)
    label_x = _series_label(x, "X")
    label_y = _series_label(y, "Y")
    rows = []
    for m in m_grid:
        m = int(m)
        h = HistorySpec(m, m)
        n_windows = len(x) - m - 1
        if n_windows < 1:
            raise ValidationError(f"m={m} leaves no window on series of length {len(x)}")
        if n_windows < min_windows:
            warnings.warn(
                f"m={m} leaves only {n_windows} windows (< {min_windows}); "
                "estimates are in the finite-sample regime",
                FiniteSampleWarning,
                stacklevel=2,
            )
        for target, source, t_label, s_label in (
            (x, y, label_x, label_y),
            (y, x, label_y, label_x),
        ):
            r = effective_transfer_entropy(target, source, h, order, spec)
            rows.append(
                SweepRow(
                    param=float(m),
                    source=s_label,
                    target=t_label,
                    raw=r.raw.value,
                    surrogate_mean=r.surrogate_mean,
                    surrogate_std=r.surrogate_std,
                    effective=r.effective,
                    n_windows=r.raw.n_windows,
                )
            )
    params = {"q": order.q, "surrogate_method": spec.method,
              "surrogate_ensemble": spec.ensemble_size, "surrogate_seed": spec.rng_seed}
    return SweepTable(param_name="m", rows=tuple(rows), params=params)


# -- rendering ---------------------------------------------------------------

def _fmt(value: float) -> str:
    return f"{value:.12g}"


def _matrix_csv(matrix) -> str:
    lines = ["target\\source," + ",".join(matrix.labels)]
    for i, label in enumerate(matrix.labels):
        cells = [label]
        for j in range(len(matrix.labels)):
            v = matrix.values[i, j]
            cells.append("" if math.isnan(v) else _fmt(v))
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def _matrix_json(matrix, kind: str) -> str:
    values = [
        [None if math.isnan(v) else v for v in row]
        for row in matrix.values.tolist()
    ]
    payload = {
        "kind": kind,
        "labels": list(matrix.labels),
        "values": values,
        "params": matrix.params,
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _sweep_csv(table: SweepTable) -> str:
    header = f"{table.param_name},source,target,raw,surrogate_mean,surrogate_std,effective,n_windows"
    lines = [header]
    for r in table.rows:
        param = _fmt(r.param) if table.param_name == "q" else str(int(r.param))
        lines.append(
            ",".join(
                [
                    param,
                    r.source,
                    r.target,
                    _fmt(r.raw),
                    _fmt(r.surrogate_mean),
                    _fmt(r.surrogate_std),
                    _fmt(r.effective),
                    str(r.n_windows),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _sweep_json(table: SweepTable) -> str:
    payload = {
        "kind": f"{table.param_name}_sweep",
        "params": table.params,
        "rows": [
            {
                table.param_name: r.param,
                "source": r.source,
                "target": r.target,
                "raw": r.raw,
                "surrogate_mean": r.surrogate_mean,
                "surrogate_std": r.surrogate_std,
                "effective": r.effective,
                "n_windows": r.n_windows,
            }
            for r in table.rows
        ],
    }
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def _lerp_color(a: tuple, b: tuple, t: float) -> str:
    t = min(max(t, 0.0), 1.0)
    rgb = tuple(round(ca + (cb - ca) * t) for ca, cb in zip(a, b))
    return "#{:02x}{:02x}{:02x}".format(*rgb)


_LOW = (59, 76, 192)    # blue end of the diverging scale
_HIGH = (180, 4, 38)    # red end
_WHITE = (255, 255, 255)


def _cell_color(value: float, lo: float, hi: float, diverging: bool) -> str:
    if math.isnan(value):
        return "#d9d9d9"
    if diverging:
        # linear scale centered at zero, blue for negative, red for positive
        span = max(abs(lo), abs(hi)) or 1.0
        t = value / span
        if t < 0:
            return _lerp_color(_WHITE, _LOW, -t)
        return _lerp_color(_WHITE, _HIGH, t)
    span = (hi - lo) or 1.0
    return _lerp_color(_WHITE, _HIGH, (value - lo) / span)


def _matrix_svg(matrix, diverging: bool) -> str:
    labels = matrix.labels
    n = len(labels)
    cell = 42
    margin = 110
    legend_h = 40
    width = margin + n * cell + 20
    height = margin + n * cell + legend_h + 20
    finite = matrix.values[np.isfinite(matrix.values)]
    lo = float(finite.min()) if finite.size else 0.0
    hi = float(finite.max()) if finite.size else 0.0
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'font-family="monospace" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
    ]
    for j, label in enumerate(labels):
        x = margin + j * cell + cell // 2
        parts.append(
            f'<text x="{x}" y="{margin - 8}" text-anchor="start" '
            f'transform="rotate(-60 {x} {margin - 8})">{label}</text>'
        )
    for i, label in enumerate(labels):
        y = margin + i * cell + cell // 2 + 4
        parts.append(f'<text x="{margin - 8}" y="{y}" text-anchor="end">{label}</text>')
    for i in range(n):
        for j in range(n):
            v = matrix.values[i, j]
            color = _cell_color(v, lo, hi, diverging)
            x, y = margin + j * cell, margin + i * cell
            parts.append(
                f'<rect x="{x}" y="{y}" width="{cell}" height="{cell}" '
                f'fill="{color}" stroke="#888"/>'
            )
            if not math.isnan(v):
                parts.append(
                    f'<text x="{x + cell // 2}" y="{y + cell // 2 + 4}" '
                    f'text-anchor="middle" font-size="8">{v:.3f}</text>'
                )
    scale_note = (
        f"linear scale, diverging about 0: min={_fmt(lo)} max={_fmt(hi)} bits"
        if diverging
        else f"linear scale: min={_fmt(lo)} max={_fmt(hi)} bits"
    )
    parts.append(
        f'<text x="{margin}" y="{margin + n * cell + 24}">rows=target, '
        f"columns=source; {scale_note}</text>"
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def render(obj, fmt: str) -> str:
    """Render a matrix or sweep table to a CSV, JSON, or SVG string."""
    if isinstance(obj, FlowMatrix):
        if fmt == "csv":
            return _matrix_csv(obj)
        if fmt == "json":
            return _matrix_json(obj, "flow_matrix")
        if fmt == "svg":
            return _matrix_svg(obj, diverging=False)
    elif isinstance(obj, NetFlowMatrix):
        if fmt == "csv":
            return _matrix_csv(obj)
        if fmt == "json":
            return _matrix_json(obj, "net_flow_matrix")
        if fmt == "svg":
            return _matrix_svg(obj, diverging=True)
    elif isinstance(obj, SweepTable):
        if fmt == "csv":
            return _sweep_csv(obj)
        if fmt == "json":
            return _sweep_json(obj)
        if fmt == "svg":
            raise ValidationError("SVG output is only defined for matrices")
    raise ValidationError(f"cannot render {type(obj).__name__} as {fmt!r}")


def emit(obj, path, fmt: str = "csv") -> Path:
    """Write a result object to `path` in the requested format."""
    path = Path(path)
    text = render(obj, fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)
    return path


def parse_matrix_csv(path) -> FlowMatrix:
    """Read back a matrix CSV produced by `emit` (blank diagonal = NaN)."""
    with open(path, encoding="utf-8") as fh:
        lines = [line.rstrip("\n") for line in fh if line.strip()]
    if not lines:
        raise ValidationError(f"{path}: empty matrix file")
    header = lines[0].split(",")
    labels = tuple(header[1:])
    values = np.full((len(labels), len(labels)), np.nan)
    for i, line in enumerate(lines[1:]):
        cells = line.split(",")
        if cells[0] != labels[i]:
            raise ValidationError(f"{path}: row label {cells[0]!r} does not match header")
        for j, cell in enumerate(cells[1:]):
            if cell != "":
                values[i, j] = float(cell)
    return FlowMatrix(labels=labels, values=values, params={})
