"""Lorenz vector field, Jacobian, equilibria, and the absorbing ball.

The system is

    x' = sigma*(y - x)
    y' = r*x - y - x*z
    z' = -b*z + x*y

with positive parameters sigma, r, b.  All functions here are pure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc


@dataclass(frozen=True)
class SystemParams:
    """Parameter triple (sigma, r, b); construction rejects nonpositive values."""

    sigma: float
    r: float
    b: float

    def __post_init__(self):
        for name in ("sigma", "r", "b"):
            v = getattr(self, name)
            if not np.isfinite(v) or v <= 0.0:
                raise ValueError(f"{name} must be a positive finite real, got {v!r}")
        object.__setattr__(self, "sigma", float(self.sigma))
        object.__setattr__(self, "r", float(self.r))
        object.__setattr__(self, "b", float(self.b))


@dataclass(frozen=True)
class EquilibriumSet:
    """Origin plus, when r > 1, the symmetric pair s1 (negative wing) and s2
    (positive wing); separatrices leaving s0 toward one wing wind up at the
    opposite-wing equilibrium in the pre-chaotic window, hence the ordering."""

    s0: np.ndarray
    s12: tuple[np.ndarray, np.ndarray] | None

    def all_points(self) -> list[np.ndarray]:
        pts = [self.s0]
        if self.s12 is not None:
            pts.extend(self.s12)
        return pts


def as_state(s) -> np.ndarray:
    """Coerce a length-3 sequence to a float state vector, requiring finite entries."""
    a = np.asarray(s, dtype=float)
    if a.shape != (3,):
        raise ValueError(f"state must have 3 components, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"state components must be finite, got {a}")
    return a


def vector_field(p: SystemParams, s) -> np.ndarray:
    """Right-hand side (sigma*(y-x), r*x - y - x*z, -b*z + x*y)."""
    x, y, z = np.asarray(s, dtype=float)
    return np.array([p.sigma * (y - x), p.r * x - y - x * z, -p.b * z + x * y])


def jacobian(p: SystemParams, s) -> np.ndarray:
    """Jacobian [[-sigma, sigma, 0], [r - z, -1, -x], [y, x, -b]] at s."""
    x, y, z = np.asarray(s, dtype=float)
    return np.array(
        [
            [-p.sigma, p.sigma, 0.0],
            [p.r - z, -1.0, -x],
            [y, x, -p.b],
        ]
    )


def equilibria(p: SystemParams) -> EquilibriumSet:
    """Closed-form equilibria: the origin always; s12 present iff r > 1 (strict)."""
    s0 = np.zeros(3)
    if p.r > 1.0:
        w = np.sqrt(p.b * (p.r - 1.0))
        s1 = np.array([-w, -w, p.r - 1.0])
        s2 = np.array([w, w, p.r - 1.0])
        return EquilibriumSet(s0, (s1, s2))
    return EquilibriumSet(s0, None)


def vdot_dissipativity(p: SystemParams, s) -> float:
    """Derivative along the flow of V = (x^2 + y^2 + (z-r-sigma)^2)/2.

    Expands to -sigma*x^2 - y^2 - b*z^2 + b*(r+sigma)*z; negative outside the
    absorbing ball.
    """
    x, y, z = np.asarray(s, dtype=float)
    return -p.sigma * x * x - y * y - p.b * z * z + p.b * (p.r + p.sigma) * z


def absorbing_ball(p: SystemParams) -> tuple[np.ndarray, float]:
    """Center (0, 0, r+sigma) and radius R with Vdot < 0 whenever |s - center| > R.

    Vdot >= 0 exactly on the ellipsoid sigma*x^2 + y^2 + b*(z-m)^2 <= b*m^2 with
    m = (r+sigma)/2.  The returned R is the largest distance from the ball center
    to that ellipsoid (maximized over the Lagrange candidates below), widened by
    a 10% safety margin.
    """
    m = 0.5 * (p.r + p.sigma)
    # Candidate squared distances divided by m^2, from stationarizing
    # |s - c|^2 on the ellipsoid boundary coordinate plane by coordinate plane.
    candidates = [4.0]
    if p.b >= 2.0:
        candidates.append(p.b * p.b / (p.b - 1.0))
    if p.b >= 2.0 * p.sigma:
        candidates.append(p.b * p.b / (p.sigma * (p.b - p.sigma)))
    radius = m * np.sqrt(max(candidates))
    return np.array([0.0, 0.0, p.r + p.sigma]), 1.10 * radius


def sample_absorbing_ball(p: SystemParams, n: int, seed: int = 0) -> np.ndarray:
    """n deterministic quasi-random points inside the absorbing ball (rows)."""
    center, radius = absorbing_ball(p)
    eng = qmc.Sobol(d=3, scramble=True, seed=np.random.Generator(np.random.Philox(seed)))
    pts = np.empty((n, 3))
    have = 0
    while have < n:
        # power-of-two draws keep the Sobol balance properties
        block = eng.random(1 << max(6, int(np.ceil(np.log2(2 * (n - have))))))
        cube = (2.0 * block - 1.0) * radius
        keep = cube[np.einsum("ij,ij->i", cube, cube) <= radius * radius]
        take = min(n - have, len(keep))
        pts[have : have + take] = center + keep[:take]
        have += take
    return pts
