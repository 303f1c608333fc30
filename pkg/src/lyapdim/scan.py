"""Parameter-plane classification grids and the chaos probe.

A scan fixes one of (sigma, r, b) and sweeps the other two over cell centers,
recording the theorem verdict per cell; output is CSV or JSON suitable for
plotting region maps.  The chaos probe integrates a batch of absorbing-ball
seeds and reports largest finite-time exponents plus equilibrium capture.
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .integrate import IntegratorConfig
from .model import SystemParams, equilibria, sample_absorbing_ball
from .theory import (
    CONDITIONS_FAIL,
    CONVERGES_TO_EQUILIBRIA,
    FORMULA_HOLDS,
    check_conditions,
)

PARAM_NAMES = ("sigma", "r", "b")

_VERDICT_TAG = {
    FORMULA_HOLDS: "formula",
    CONVERGES_TO_EQUILIBRIA: "equilibria",
    CONDITIONS_FAIL: "fail",
}
_TAG_VERDICT = {v: k for k, v in _VERDICT_TAG.items()}

CSV_HEADER = ("axis1", "axis2", "verdict", "bound")


@dataclass(frozen=True)
class AxisSpec:
    """One swept parameter: name plus (min, max, cells)."""

    name: str
    min: float
    max: float
    cells: int

    def __post_init__(self):
        if self.name not in PARAM_NAMES:
            raise ValueError(f"axis name must be one of {PARAM_NAMES}, got {self.name!r}")
        if not self.min < self.max:
            raise ValueError(f"axis {self.name}: min must be < max")
        if self.min <= 0.0:
            raise ValueError(f"axis {self.name}: bounds must be positive")
        if self.cells < 2:
            raise ValueError(f"axis {self.name}: cells must be >= 2")

    def centers(self) -> np.ndarray:
        width = (self.max - self.min) / self.cells
        return self.min + (np.arange(self.cells) + 0.5) * width


@dataclass(frozen=True)
class ScanRequest:
    """Fixed parameter plus the two swept axes (must cover sigma, r, b)."""

    fixed_name: str
    fixed_value: float
    axis1: AxisSpec
    axis2: AxisSpec

    def __post_init__(self):
        if self.fixed_name not in PARAM_NAMES:
            raise ValueError(
                f"fixed parameter must be one of {PARAM_NAMES}, got {self.fixed_name!r}"
            )
        if self.fixed_value <= 0.0 or not math.isfinite(self.fixed_value):
            raise ValueError("fixed parameter value must be positive and finite")
        names = {self.fixed_name, self.axis1.name, self.axis2.name}
        if names != set(PARAM_NAMES):
            raise ValueError(
                f"fixed + axes must cover sigma, r, b exactly once, got {sorted(names)}"
            )


@dataclass(frozen=True)
class ScanCell:
    """Verdict at one cell center; bound present only when the formula holds."""

    axis1_value: float
    axis2_value: float
    verdict: str
    bound: float | None

    def __post_init__(self):
        if self.verdict not in _TAG_VERDICT:
            raise ValueError(f"verdict tag must be one of {sorted(_TAG_VERDICT)}")


def _cell_params(req: ScanRequest, v1: float, v2: float) -> SystemParams:
    kw = {req.fixed_name: req.fixed_value, req.axis1.name: v1, req.axis2.name: v2}
    return SystemParams(**kw)


def _eval_cell(args) -> ScanCell:
    req, v1, v2 = args
    verdict = check_conditions(_cell_params(req, v1, v2))
    return ScanCell(
        axis1_value=float(v1),
        axis2_value=float(v2),
        verdict=_VERDICT_TAG[verdict.outcome],
        bound=verdict.bound,
    )


def run_scan(req: ScanRequest, threads: int = 1) -> list[ScanCell]:
    """Classify every cell center, row-major (axis1 outer, axis2 inner).

    Cells are independent; threads > 1 evaluates them in a pool while keeping
    the deterministic output order.
    """
    c1 = req.axis1.centers()
    c2 = req.axis2.centers()
    work = [(req, v1, v2) for v1 in c1 for v2 in c2]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(_eval_cell, work))
    return [_eval_cell(w) for w in work]


def _fmt_float(v: float) -> str:
    return repr(float(v))


def write_cells_csv(cells, fh) -> None:
    """CSV with header axis1,axis2,verdict,bound; bound empty when absent."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for c in cells:
        w.writerow(
            [
                _fmt_float(c.axis1_value),
                _fmt_float(c.axis2_value),
                c.verdict,
                "" if c.bound is None else _fmt_float(c.bound),
            ]
        )


def read_cells_csv(fh) -> list[ScanCell]:
    rd = csv.reader(fh)
    header = next(rd)
    if tuple(header) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {header!r}")
    out = []
    for row in rd:
        if not row:
            continue
        out.append(
            ScanCell(
                axis1_value=float(row[0]),
                axis2_value=float(row[1]),
                verdict=row[2],
                bound=None if row[3] == "" else float(row[3]),
            )
        )
    return out


def cells_to_json(cells) -> str:
    return json.dumps(
        [
            {
                "axis1_value": c.axis1_value,
                "axis2_value": c.axis2_value,
                "verdict": c.verdict,
                "bound": c.bound,
            }
            for c in cells
        ],
        indent=2,
    )


def cells_from_json(text: str) -> list[ScanCell]:
    return [
        ScanCell(
            axis1_value=float(d["axis1_value"]),
            axis2_value=float(d["axis2_value"]),
            verdict=d["verdict"],
            bound=None if d["bound"] is None else float(d["bound"]),
        )
        for d in json.loads(text)
    ]


def cells_to_csv_text(cells) -> str:
    buf = io.StringIO()
    write_cells_csv(cells, buf)
    return buf.getvalue()


@dataclass(frozen=True)
class ProbeSeed:
    """One probe trajectory: seed, largest exponent, capture diagnosis."""

    point: tuple
    largest_le: float | None
    captured: bool
    equilibrium_index: int | None
    diverged: bool


@dataclass(frozen=True)
class ChaosProbeReport:
    """Per-seed largest finite-time exponents and equilibrium-capture flags."""

    horizon: float
    results: tuple

    @property
    def any_diverged(self) -> bool:
        return any(r.diverged for r in self.results)

    @property
    def all_captured(self) -> bool:
        return all(r.captured for r in self.results if not r.diverged)

    @property
    def none_captured(self) -> bool:
        return not any(r.captured for r in self.results)


_CAPTURE_DIST = 1e-3
_CAPTURE_SUSTAIN = 10.0


def _probe_one(p, seed_pt, horizon, cfg) -> ProbeSeed:
    eq_pts = equilibria(p).all_points()
    h = cfg.step
    window = 0.5
    steps_per_window = max(1, int(round(window / h)))
    window = steps_per_window * h
    nwindows = max(1, int(round(horizon / window)))
    sustain_windows = max(1, int(round(_CAPTURE_SUSTAIN / window)))

    state = np.array(seed_pt, dtype=float)
    frame = np.eye(3)
    logsums = np.zeros(3)
    # index of the equilibrium the state has stayed within range of, per window
    streak_eq = -1
    streak = 0
    for _ in range(nwindows):
        status = _backend.benettin(
            p.sigma, p.r, p.b, state, frame, h, steps_per_window, 1, logsums
        )
        if status != 0:
            return ProbeSeed(
                point=tuple(seed_pt),
                largest_le=None,
                captured=False,
                equilibrium_index=None,
                diverged=True,
            )
        near = -1
        for idx, e in enumerate(eq_pts):
            if np.linalg.norm(state - e) < _CAPTURE_DIST:
                near = idx
                break
        if near >= 0 and near == streak_eq:
            streak += 1
        else:
            streak_eq = near
            streak = 1 if near >= 0 else 0
    total_t = nwindows * window
    captured = streak_eq >= 0 and streak >= sustain_windows
    return ProbeSeed(
        point=tuple(seed_pt),
        largest_le=float(np.max(logsums) / total_t),
        captured=captured,
        equilibrium_index=streak_eq if captured else None,
        diverged=False,
    )


def chaos_probe(
    p: SystemParams,
    seeds: int,
    horizon: float,
    seed: int = 0,
    cfg: IntegratorConfig | None = None,
    points=None,
    threads: int = 1,
) -> ChaosProbeReport:
    """Integrate `seeds` quasi-random absorbing-ball seeds for `horizon` and
    report the largest finite-time exponent per seed plus whether the
    trajectory ends captured by an equilibrium (within 1e-3, sustained for the
    final 10 time units).  Divergent seeds are flagged, not fatal.

    `points` overrides the sampled seeds with explicit ones.
    """
    if seeds < 1:
        raise ValueError("seeds must be >= 1")
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    cfg = cfg or IntegratorConfig()
    if cfg.method != "RK4":
        raise ValueError("chaos_probe runs on the fixed-step RK4 kernels")
    if points is None:
        pts = sample_absorbing_ball(p, seeds, seed=seed)
    else:
        pts = np.atleast_2d(np.asarray(points, dtype=float))
        if pts.shape[0] != seeds:
            raise ValueError("points, when given, must supply one row per seed")
    work = [pts[i] for i in range(pts.shape[0])]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda w: _probe_one(p, w, horizon, cfg), work))
    else:
        results = [_probe_one(p, w, horizon, cfg) for w in work]
    return ChaosProbeReport(horizon=float(horizon), results=tuple(results))
