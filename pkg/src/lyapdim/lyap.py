"""Finite-time Lyapunov spectra and local Lyapunov dimension.

Two independent routes to the spectrum are kept side by side on purpose:

* `le_spectrum_qr` — Benettin-style QR reorthogonalization; cheap, the
  workhorse for long horizons.
* `le_spectrum_svd` — singular values of the full fundamental matrix, carried
  in a factored log-magnitude form so horizons far beyond the naive overflow
  point stay representable.

Their agreement on matched runs is a real consistency check; do not fold one
into the other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import _backend
from .errors import HorizonTooShort, NonFiniteState, OverflowRisk
from .integrate import IntegratorConfig, advance_augmented, advance_state
from .model import SystemParams, as_state

# log-magnitude spread in the factored fundamental matrix beyond which
# exp() underflow would silently zero the contracting directions
_LOG_SPREAD_LIMIT = 800.0


@dataclass(frozen=True)
class LeSpectrum:
    """Finite-time Lyapunov exponents, sorted non-increasing."""

    exponents: tuple[float, float, float]
    horizon: float
    transient_discarded: float = 0.0

    def __post_init__(self):
        e = tuple(float(v) for v in self.exponents)
        if len(e) != 3:
            raise ValueError("exponents must be a triple")
        if not (e[0] >= e[1] >= e[2]):
            raise ValueError(f"exponents must be sorted non-increasing, got {e}")
        object.__setattr__(self, "exponents", e)
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "transient_discarded", float(self.transient_discarded))

    @property
    def total(self) -> float:
        return sum(self.exponents)


@dataclass(frozen=True)
class FiniteTimeDim:
    """Kaplan-Yorke interpolation of a finite-time spectrum.

    value = j + fraction always holds.  `sup_checkpoints` is filled only by
    `local_dimension`: the max of the dimension over the logged checkpoints
    (final horizon included).
    """

    j: int
    fraction: float
    value: float
    degenerate: bool = False
    sup_checkpoints: float | None = None

    def __post_init__(self):
        if not 0 <= self.j <= 3:
            raise ValueError(f"j must be in [0, 3], got {self.j}")
        if not 0.0 <= self.fraction < 1.0:
            raise ValueError(f"fraction must be in [0, 1), got {self.fraction}")
        object.__setattr__(self, "fraction", float(self.fraction))
        object.__setattr__(self, "value", float(self.value))


@dataclass(frozen=True)
class GridDimension:
    """Supremum of the local dimension over a seed grid."""

    value: float
    argmax_seed: tuple[float, float, float]
    values: tuple
    skipped: tuple


def kaplan_yorke(spectrum) -> FiniteTimeDim:
    """Kaplan-Yorke dimension of a sorted exponent triple (or LeSpectrum).

    j is the largest index whose partial sum is positive; the fractional part
    interpolates into the next exponent.  All-nonpositive spectra clamp to 0,
    nonnegative-sum spectra clamp to 3.
    """
    if isinstance(spectrum, LeSpectrum):
        les = spectrum.exponents
    else:
        les = tuple(float(v) for v in spectrum)
        if len(les) != 3:
            raise ValueError("spectrum must have exactly three exponents")
        if not (les[0] >= les[1] >= les[2]):
            raise ValueError(f"spectrum must be sorted non-increasing, got {les}")
    e1, e2, e3 = les
    if e1 <= 0.0:
        return FiniteTimeDim(j=0, fraction=0.0, value=0.0)
    if e1 + e2 + e3 >= 0.0:
        return FiniteTimeDim(j=3, fraction=0.0, value=3.0)
    if e1 + e2 > 0.0:
        j, total, nxt = 2, e1 + e2, e3
    else:
        j, total, nxt = 1, e1, e2
    if abs(nxt) < 1e-12:
        # division would blow up on a vanishing next exponent; report the
        # limiting value with a flag instead
        return FiniteTimeDim(j=j + 1, fraction=0.0, value=float(j + 1), degenerate=True)
    fraction = total / abs(nxt)
    if fraction >= 1.0:
        # partial sum through j+1 is exactly zero: the interpolation is
        # continuous there, so report the integer dimension j+1
        return FiniteTimeDim(j=j + 1, fraction=0.0, value=float(j + 1))
    return FiniteTimeDim(j=j, fraction=fraction, value=j + fraction)


def _gram_schmidt_np(frame, logsums):
    """Orthonormalize frame columns in place, accumulating log column norms."""
    for j in range(3):
        v = frame[:, j]
        for i in range(j):
            v -= (frame[:, i] @ v) * frame[:, i]
        n = math.sqrt(v @ v)
        if not (n > 0.0) or not math.isfinite(n):
            return 1
        v /= n
        logsums[j] += math.log(n)
    return 0


def _qr_run(p, x0, horizon, transient, cfg, reorth_interval, checkpoint_interval):
    """Benettin loop. Returns (exponents, realized_horizon, checkpoints).

    checkpoints is a list of (time, exponent-triple) snapshots roughly every
    checkpoint_interval time units (always including the final horizon).
    """
    if reorth_interval <= 0.0:
        raise ValueError("reorth_interval must be positive")
    if horizon < 100.0 * reorth_interval:
        raise HorizonTooShort(
            f"horizon {horizon:g} is under 100 reorthogonalization intervals "
            f"({reorth_interval:g}); exponent averages would not settle"
        )
    state = as_state(x0).copy()
    if transient > 0.0:
        state = advance_state(p, state, transient, cfg)

    if cfg.method == "RK4":
        steps_per_chunk = max(1, int(round(reorth_interval / cfg.step)))
        chunk_t = steps_per_chunk * cfg.step
    else:
        chunk_t = reorth_interval
    nchunks = max(1, int(round(horizon / chunk_t)))
    chunks_per_checkpoint = max(1, int(round(checkpoint_interval / chunk_t)))

    frame = np.eye(3)
    logsums = np.zeros(3)
    checkpoints = []
    done = 0
    while done < nchunks:
        batch = min(chunks_per_checkpoint, nchunks - done)
        if cfg.method == "RK4":
            status = _backend.benettin(
                p.sigma, p.r, p.b, state, frame, cfg.step, steps_per_chunk, batch, logsums
            )
            if status != 0:
                raise NonFiniteState(
                    "state left the bounded region during exponent estimation",
                    state=state.copy(),
                    t=transient + done * chunk_t,
                )
        else:
            for _ in range(batch):
                state, frame = advance_augmented(p, state, frame, chunk_t, cfg)
                if _gram_schmidt_np(frame, logsums) != 0:
                    raise NonFiniteState(
                        "tangent frame degenerated", state=state.copy()
                    )
        done += batch
        t = done * chunk_t
        exps = tuple(sorted((logsums / t).tolist(), reverse=True))
        checkpoints.append((t, exps))
    return checkpoints[-1][1], nchunks * chunk_t, checkpoints


def le_spectrum_qr(
    p: SystemParams,
    x0,
    horizon: float,
    transient: float = 100.0,
    cfg: IntegratorConfig | None = None,
    reorth_interval: float = 0.5,
) -> LeSpectrum:
    """Lyapunov exponents by tangent-frame reorthogonalization.

    The transient is integrated on the state alone (no exponent accumulation)
    before the averaging window opens.
    """
    cfg = cfg or IntegratorConfig()
    exps, realized, _ = _qr_run(
        p, x0, horizon, transient, cfg, reorth_interval, checkpoint_interval=10.0
    )
    return LeSpectrum(exponents=exps, horizon=realized, transient_discarded=transient)


def _logsvd(that, rowlog):
    """Log singular values of the matrix with unit rows `that` scaled by
    exp(rowlog) per row, via one-sided Jacobi on the (transposed) columns with
    explicit log bookkeeping.  Never forms the scaled matrix.
    """
    # columns of u are the unit rows; grading g[i] applies to column i
    u = np.array(that.T, dtype=float)
    g = np.array(rowlog, dtype=float)
    for _ in range(60):
        off = 0.0
        for i, j in ((0, 1), (0, 2), (1, 2)):
            if g[j] > g[i]:
                u[:, [i, j]] = u[:, [j, i]]
                g[i], g[j] = g[j], g[i]
            d = float(u[:, i] @ u[:, j])
            off = max(off, abs(d))
            if d == 0.0:
                continue
            eps = math.exp(g[j] - g[i])  # <= 1 after the swap
            # rotate columns i, j to orthogonality; tan(theta)/eps stays O(d)
            # even when eps underflows the rotation angle itself
            w = (eps * eps - 1.0) / (2.0 * d)
            # inner root of t^2 - (2w/eps) t - 1 = 0 for this rotation
            # orientation; the opposite sign never orthogonalizes the pair
            t_over_eps = -math.copysign(1.0, w) / (abs(w) + math.hypot(eps, w))
            t = eps * t_over_eps
            c = 1.0 / math.sqrt(1.0 + t * t)
            s_over_eps = c * t_over_eps
            ui = u[:, i].copy()
            uj = u[:, j].copy()
            v = c * ui + (c * t * eps) * uj
            wv = -(s_over_eps) * ui + c * uj
            nv = math.sqrt(v @ v)
            nw = math.sqrt(wv @ wv)
            u[:, i] = v / nv
            u[:, j] = wv / nw
            g[i] += math.log(nv)
            g[j] += math.log(nw)
        if off < 1e-15:
            break
    return np.sort(g)[::-1]


def le_spectrum_svd(
    p: SystemParams,
    x0,
    horizon: float,
    cfg: IntegratorConfig | None = None,
    reorth_interval: float = 0.5,
    init_frame=None,
) -> LeSpectrum:
    """Lyapunov exponents from singular values of the fundamental matrix.

    The fundamental matrix X(t)*F0 is carried as Q*T with Q orthonormal and T
    upper-triangular, T itself stored as unit rows plus per-row log
    magnitudes.  Raises OverflowRisk once the log-magnitude spread between
    rows exceeds the representable window.

    No transient: singular values are a statement about the exact seed.
    """
    cfg = cfg or IntegratorConfig()
    if horizon <= 0.0:
        raise ValueError("horizon must be positive")
    state = as_state(x0).copy()
    if init_frame is None:
        f0 = np.eye(3)
    else:
        f0 = np.array(init_frame, dtype=float)
        if f0.shape != (3, 3):
            raise ValueError(f"init_frame must be 3x3, got shape {f0.shape}")

    q, r0 = np.linalg.qr(f0)
    dsign = np.sign(np.diag(r0))
    dsign[dsign == 0.0] = 1.0
    q = q * dsign
    r0 = dsign[:, None] * r0
    rowlog = np.zeros(3)
    that = np.array(r0, dtype=float)
    for i in range(3):
        n = np.linalg.norm(that[i])
        if n == 0.0:
            raise ValueError("init_frame must be nonsingular")
        rowlog[i] = math.log(n)
        that[i] /= n

    nchunks = max(1, int(round(horizon / reorth_interval)))
    chunk_dur = horizon / nchunks
    if cfg.method == "RK4":
        steps = max(1, int(round(chunk_dur / cfg.step)))
        chunk_dur = steps * cfg.step
    realized = 0.0
    for _ in range(nchunks):
        state, z = advance_augmented(p, state, q, chunk_dur, cfg)
        realized += chunk_dur
        q, rc = np.linalg.qr(z)
        dsign = np.sign(np.diag(rc))
        dsign[dsign == 0.0] = 1.0
        q = q * dsign
        rc = dsign[:, None] * rc
        # T <- Rc @ T in the scaled representation, row by row
        new_that = np.empty_like(that)
        new_rowlog = np.empty_like(rowlog)
        for i in range(3):
            terms = [
                (math.log(abs(rc[i, k])) + rowlog[k], k)
                for k in range(i, 3)
                if rc[i, k] != 0.0
            ]
            # factor out the dominant term's magnitude before summing
            m = max(lg for lg, _ in terms)
            row = np.zeros(3)
            for _, k in terms:
                row += rc[i, k] * math.exp(rowlog[k] - m) * that[k]
            n = np.linalg.norm(row)
            if not (n > 0.0) or not math.isfinite(n):
                raise NonFiniteState(
                    "fundamental-matrix factor degenerated", state=state.copy()
                )
            new_that[i] = row / n
            new_rowlog[i] = m + math.log(n)
        that, rowlog = new_that, new_rowlog
        spread = float(np.max(rowlog) - np.min(rowlog))
        if spread > _LOG_SPREAD_LIMIT:
            raise OverflowRisk(
                f"log-magnitude spread {spread:.1f} exceeds {_LOG_SPREAD_LIMIT:.0f} "
                f"at t={realized:.3g}; singular values of the fundamental matrix "
                "would underflow"
            )
    logsv = _logsvd(that, rowlog)
    exps = tuple((logsv / realized).tolist())
    return LeSpectrum(exponents=exps, horizon=realized, transient_discarded=0.0)


def fundamental_log_det(that, rowlog) -> float:
    """log |det T| of a factored triangular matrix (unit rows + row logs)."""
    total = 0.0
    for i in range(3):
        total += rowlog[i] + math.log(abs(that[i, i]))
    return total


def local_dimension(
    p: SystemParams,
    x0,
    horizon: float,
    transient: float = 100.0,
    cfg: IntegratorConfig | None = None,
    reorth_interval: float = 0.5,
    checkpoint_interval: float = 10.0,
) -> FiniteTimeDim:
    """Finite-time Kaplan-Yorke dimension along the orbit from x0.

    The reported value is the dimension at the final horizon; the running
    maximum over checkpoints is kept alongside in `sup_checkpoints` (early
    checkpoints sit systematically high while the exponent averages settle,
    so the final-horizon value is the headline number).
    """
    cfg = cfg or IntegratorConfig()
    exps, realized, checkpoints = _qr_run(
        p, x0, horizon, transient, cfg, reorth_interval, checkpoint_interval
    )
    final = kaplan_yorke(exps)
    sup = max(kaplan_yorke(e).value for _, e in checkpoints)
    return replace(final, sup_checkpoints=max(sup, final.value))


def set_dimension_grid(
    p: SystemParams,
    seeds,
    horizon: float,
    transient: float = 100.0,
    cfg: IntegratorConfig | None = None,
) -> GridDimension:
    """Supremum of local_dimension over a collection of seeds.

    Divergent seeds are skipped and reported, not fatal: the estimate is a
    supremum over the seeds that stayed in the bounded region.
    """
    cfg = cfg or IntegratorConfig()
    best = -math.inf
    best_seed = None
    values = []
    skipped = []
    for seed in seeds:
        pt = tuple(float(v) for v in np.asarray(seed, dtype=float))
        try:
            dim = local_dimension(p, pt, horizon, transient, cfg)
        except NonFiniteState as exc:
            values.append(None)
            skipped.append((pt, str(exc)))
            continue
        values.append(dim.value)
        if dim.value > best:
            best = dim.value
            best_seed = pt
    if best_seed is None:
        raise NonFiniteState("every seed diverged; no dimension estimate")
    return GridDimension(
        value=best,
        argmax_seed=best_seed,
        values=tuple(values),
        skipped=tuple(skipped),
    )
