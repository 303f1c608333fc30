"""Exact Lyapunov-dimension formula for the Lorenz global attractor, the
parameter-condition checker behind it, and the Lyapunov-function certificate
machinery (running parameters gamma_1..gamma_4) that proves the bound.

Everything here is closed-form or deterministic search; the numerical modules
(`lyap`, `scan`) provide the independent cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.stats import qmc

from .errors import DegenerateQuadratic, NoCertificate, RhoUndefined
from .model import SystemParams, absorbing_ball, as_state

FORMULA_HOLDS = "FormulaHolds"
CONVERGES_TO_EQUILIBRIA = "ConvergesToEquilibria"
CONDITIONS_FAIL = "ConditionsFail"
CASE_A = "CaseA"
CASE_B = "CaseB"


@dataclass(frozen=True)
class ConditionCheck:
    """One evaluated inequality of the main theorem."""

    id: str
    holds: bool
    detail: str


@dataclass(frozen=True)
class TheoremVerdict:
    """Classification of a parameter point.

    outcome is one of FormulaHolds / ConvergesToEquilibria / ConditionsFail;
    branch records which case of the hypothesis held (CaseA/CaseB) or None.
    bound is the dimension value when the formula applies, else None.
    """

    outcome: str
    branch: str | None
    bound: float | None
    satisfied: tuple
    failed: tuple
    checks: tuple

    def check(self, cid: str) -> ConditionCheck | None:
        for c in self.checks:
            if c.id == cid:
                return c
        return None


@dataclass(frozen=True)
class GammaCertificate:
    """Running parameters of the Lyapunov function V plus the derived
    constants rho and s0.  gamma4 sits at the discriminant vertex, the rest
    at midpoints of their forced brackets."""

    gamma1: float
    gamma2: float
    gamma3: float
    gamma4: float
    rho: float
    s0: float

    def as_dict(self) -> dict:
        return {
            "gamma1": self.gamma1,
            "gamma2": self.gamma2,
            "gamma3": self.gamma3,
            "gamma4": self.gamma4,
            "rho": self.rho,
            "s0": self.s0,
        }


@dataclass(frozen=True)
class RCheck:
    """One algebraic sign condition on the R-polynomial coefficients."""

    name: str
    holds: bool
    margin: float


@dataclass(frozen=True)
class RReport:
    """Outcome of verify_R_nonpositive: coefficient checks + sampling sweep."""

    coefficients: dict
    checks: tuple
    max_value: float
    argmax: tuple
    n_samples: int
    passed: bool


def origin_eigenvalues(p: SystemParams) -> tuple[float, float, float]:
    """Jacobian eigenvalues at the origin, sorted non-increasing.

    All three are real for positive parameters: -b and the two roots of
    l^2 + (sigma+1) l - sigma(r-1).
    """
    disc = math.sqrt((p.sigma - 1.0) ** 2 + 4.0 * p.sigma * p.r)
    l1 = 0.5 * (-(p.sigma + 1.0) + disc)
    l3 = 0.5 * (-(p.sigma + 1.0) - disc)
    return tuple(sorted((l1, -p.b, l3), reverse=True))


def leonov_formula(p: SystemParams) -> float:
    """3 - 2(sigma+b+1)/(sigma+1+sqrt((sigma-1)^2+4 sigma r)).

    Pure formula; whether it actually bounds the attractor dimension is
    check_conditions' job.
    """
    disc = math.sqrt((p.sigma - 1.0) ** 2 + 4.0 * p.sigma * p.r)
    return 3.0 - 2.0 * (p.sigma + p.b + 1.0) / (p.sigma + 1.0 + disc)


def s_zero(p: SystemParams) -> float:
    """The critical interpolation weight s0 = (LE1+LE2)/|LE3| at the origin.

    Lies in (0,1) exactly when sigma*r > (b+1)(b+sigma); stored raw (it goes
    negative in the equilibria regime, which is informative, not an error).
    """
    x = math.sqrt((p.sigma - 1.0) ** 2 + 4.0 * p.sigma * p.r)
    return (-(p.sigma + 2.0 * p.b + 1.0) + x) / (p.sigma + 1.0 + x)


def _k_coefficient(p: SystemParams) -> float:
    s, r, b = p.sigma, p.r, p.b
    return (
        b * (b + s - 1.0) ** 2
        - 4.0 * s * (s * b + b - b * b)
        + s * s * (r - 1.0) * (b - 4.0)
    )


def _l_coefficient(p: SystemParams) -> float:
    s, r, b = p.sigma, p.r, p.b
    return b * (b + s - 1.0) ** 2 - 4.0 * s * (s * b + b - b * b) - 3.0 * s * s * (r - 1.0)


def gamma2_polynomial(p: SystemParams, gamma2: float) -> float:
    """LHS of the gamma2 feasibility quadratic; negative values are feasible."""
    k = _k_coefficient(p)
    ell = _l_coefficient(p)
    s, b = p.sigma, p.b
    return k * (2.0 * s - b + gamma2) ** 2 + 4.0 * b * gamma2 * (s + 1.0) * ell


def gamma_quadratic_roots(p: SystemParams):
    """Real roots (sorted) of the gamma2 quadratic, or None if complex.

    The larger root is the gamma^(II) of the CaseB condition.  A vanishing
    leading coefficient makes the expression linear in gamma2; that case is
    reported via DegenerateQuadratic whose `feasible` flag says whether every
    positive gamma2 satisfies the inequality (second bracket <= 0).
    """
    k = _k_coefficient(p)
    ell = _l_coefficient(p)
    s, b = p.sigma, p.b
    if k == 0.0:
        raise DegenerateQuadratic(
            "leading coefficient of the gamma2 quadratic vanishes",
            feasible=(ell <= 0.0),
        )
    aa = k
    bb = 2.0 * k * (2.0 * s - b) + 4.0 * b * (s + 1.0) * ell
    cc = k * (2.0 * s - b) ** 2
    disc = bb * bb - 4.0 * aa * cc
    if disc < 0.0:
        return None
    sq = math.sqrt(disc)
    if bb == 0.0:
        v = math.sqrt(max(-cc / aa, 0.0))
        return (-v, v)
    q = -0.5 * (bb + math.copysign(sq, bb))
    r1, r2 = q / aa, cc / q
    return tuple(sorted((r1, r2)))


def check_conditions(p: SystemParams) -> TheoremVerdict:
    """Evaluate the main theorem's hypothesis and classify the outcome.

    Hypothesis: (7) and (8), plus CaseA (9) or CaseB (10)-(11).  Outcome:
    (13) => the dimension formula holds; (12) => every trajectory converges
    to an equilibrium; anything else (including the exact boundary
    sigma*r = (b+1)(b+sigma)) is ConditionsFail.
    """
    s, r, b = p.sigma, p.r, p.b
    checks = []

    c7 = (r - 1.0) > 0.0
    checks.append(ConditionCheck("(7)", c7, f"r - 1 = {r - 1.0:.9g} (need > 0)"))

    rhs8 = (b * (b + s - 1.0) ** 2 - 4.0 * s * (b + s * b - b * b)) / (3.0 * s * s)
    c8 = (r - 1.0) >= rhs8
    checks.append(
        ConditionCheck("(8)", c8, f"r - 1 = {r - 1.0:.9g} (need >= {rhs8:.9g})")
    )

    lhs9 = s * s * (r - 1.0) * (b - 4.0)
    rhs9 = 4.0 * s * (s * b + b - b * b) - b * (b + s - 1.0) ** 2
    c9 = lhs9 <= rhs9
    checks.append(
        ConditionCheck(
            "(9)", c9, f"sigma^2 (r-1)(b-4) = {lhs9:.9g} (need <= {rhs9:.9g})"
        )
    )

    branch = None
    if c7 and c8:
        if c9:
            branch = CASE_A
        else:
            # leading coefficient K = lhs9 - rhs9 > 0 here, so the quadratic
            # is genuinely quadratic and the degenerate branch cannot trigger
            roots = gamma_quadratic_roots(p)
            if roots is None:
                c10, c11 = False, False
                checks.append(
                    ConditionCheck("(10)", False, "gamma2 quadratic: no real roots")
                )
                checks.append(
                    ConditionCheck("(11)", False, "gamma_II undefined (no roots)")
                )
            else:
                lo, hi = roots
                c10 = hi > lo
                c11 = hi > 0.0
                checks.append(
                    ConditionCheck(
                        "(10)",
                        c10,
                        f"gamma2 quadratic roots {lo:.9g}, {hi:.9g} (need distinct)",
                    )
                )
                checks.append(
                    ConditionCheck("(11)", c11, f"gamma_II = {hi:.9g} (need > 0)")
                )
            if c10 and c11:
                branch = CASE_B

    if branch is None:
        outcome = CONDITIONS_FAIL
        bound = None
    else:
        sr = s * r
        lo12 = (b - s) * (b - 1.0)
        hi12 = (b + 1.0) * (b + s)
        c13 = sr > hi12
        c12 = lo12 < sr < hi12
        checks.append(
            ConditionCheck(
                "(12)",
                c12,
                f"(b-sigma)(b-1) = {lo12:.9g} < sigma r = {sr:.9g} "
                f"< (b+1)(b+sigma) = {hi12:.9g}",
            )
        )
        checks.append(
            ConditionCheck(
                "(13)", c13, f"sigma r = {sr:.9g} (need > (b+1)(b+sigma) = {hi12:.9g})"
            )
        )
        if c13:
            outcome = FORMULA_HOLDS
            bound = leonov_formula(p)
        elif c12:
            outcome = CONVERGES_TO_EQUILIBRIA
            bound = None
        else:
            # sigma r at or below the two-sided window: neither classification
            # applies (the exact upper boundary lands here too)
            outcome = CONDITIONS_FAIL
            bound = None

    satisfied = tuple(c.id for c in checks if c.holds)
    failed = tuple(c.id for c in checks if not c.holds)
    return TheoremVerdict(
        outcome=outcome,
        branch=branch,
        bound=bound,
        satisfied=satisfied,
        failed=failed,
        checks=tuple(checks),
    )


def rho_factor(p: SystemParams) -> float:
    """rho = sigma / sqrt(sigma r + (sigma-b)(b-1)); needs the radicand > 0."""
    disc = p.sigma * p.r + (p.sigma - p.b) * (p.b - 1.0)
    if disc <= 0.0:
        raise RhoUndefined(
            f"sigma r + (sigma-b)(b-1) = {disc:.9g} <= 0; rho is not real"
        )
    return p.sigma / math.sqrt(disc)


def transform_matrix(p: SystemParams) -> np.ndarray:
    """The similarity transform S that symmetrizes the Jacobian's off-diagonal
    growth; rows [-1/rho, 0, 0], [-(b-1)/sigma, 1, 0], [0, 0, 1]."""
    rho = rho_factor(p)
    return np.array(
        [
            [-1.0 / rho, 0.0, 0.0],
            [-(p.b - 1.0) / p.sigma, 1.0, 0.0],
            [0.0, 0.0, 1.0],
        ]
    )


def symmetrized_eigenvalues(p: SystemParams, state) -> tuple[float, float, float]:
    """Eigenvalues of (S J S^-1 + (S J S^-1)^T)/2 at a state, closed form.

    Sorted non-increasing; the middle one is always -b.
    """
    x, y, z = as_state(state)
    rho = rho_factor(p)
    s, b = p.sigma, p.b
    bracket = (
        (s - 2.0 * b + 1.0) ** 2
        + (2.0 * s / rho - rho * z) ** 2
        + rho * rho * (y + (b - 1.0) / s * x) ** 2
    )
    half = 0.5 * math.sqrt(bracket)
    l1 = -(s + 1.0) / 2.0 + half
    l3 = -(s + 1.0) / 2.0 - half
    return tuple(sorted((l1, -b, l3), reverse=True))


def _e_pair(p: SystemParams, rho2: float) -> tuple[float, float]:
    """The two bracket constants of the gamma3 existence system (the second
    divides the rho^2/4 term by b)."""
    s, r, b = p.sigma, p.r, p.b
    common = rho2 * (b + s - 1.0) ** 2 / (4.0 * s * s * (r - 1.0)) - s / (b * (r - 1.0))
    return rho2 / 4.0 + common, rho2 / (4.0 * b) + common


def find_gamma_certificate(p: SystemParams) -> GammaCertificate | None:
    """Construct (gamma1..gamma4) making R <= 0, or None when the theorem's
    conditions fail.

    Branch 1 (leading coefficient of the gamma2 quadratic negative): gamma2=0
    and gamma1 from its one-sided cap.  Branch 2: gamma2 strictly inside the
    quadratic's feasible interval intersected with (0, inf), then gamma1 from
    its two bounds.  gamma3 is the midpoint of its two-sided bracket, gamma4
    the exact vertex of the y-discriminant.  Raises NoCertificate with the
    offending empty bracket if working precision leaves no room.
    """
    verdict = check_conditions(p)
    if verdict.outcome == CONDITIONS_FAIL:
        return None
    s, r, b = p.sigma, p.r, p.b
    rho = rho_factor(p)
    rho2 = rho * rho
    k = _k_coefficient(p)
    ell = _l_coefficient(p)
    e_top, e_bot = _e_pair(p, rho2)

    if k < 0.0:
        # e_top < 0 exactly when k < 0: the gamma3 system is consistent at
        # gamma2 = 0 and gamma1 only needs its upper cap
        gamma2 = 0.0
        denom = (2.0 * s - b) ** 2
        if denom == 0.0:
            gamma1 = 0.0
        else:
            gamma1 = 0.5 * (4.0 * b * (-e_bot) / denom)
    else:
        if k == 0.0:
            if ell < 0.0:
                gamma2 = 1.0
            else:
                raise NoCertificate(
                    "gamma2 feasibility degenerates with nonnegative bracket",
                    bracket=("gamma2", 0.0, 0.0),
                )
        else:
            roots = gamma_quadratic_roots(p)
            if roots is None:
                raise NoCertificate(
                    "gamma2 quadratic has no real roots",
                    bracket=("gamma2", 0.0, 0.0),
                )
            lo = max(0.0, roots[0])
            hi = roots[1]
            if not hi > lo:
                raise NoCertificate(
                    "feasible gamma2 interval is empty",
                    bracket=("gamma2", lo, hi),
                )
            gamma2 = 0.5 * (lo + hi)
            if abs(2.0 * s - b + gamma2) < 1e-9 * max(1.0, abs(2.0 * s - b)):
                # keep the gamma1 cap's denominator away from zero
                gamma2 = 0.25 * lo + 0.75 * hi
        lo1 = e_top / (gamma2 * (s + 1.0))
        denom = (2.0 * s - b + gamma2) ** 2
        hi1 = math.inf if denom == 0.0 else 4.0 * b * (-e_bot) / denom
        if not hi1 > lo1:
            raise NoCertificate(
                "gamma1 bracket is empty", bracket=("gamma1", lo1, hi1)
            )
        gamma1 = lo1 + 1.0 if math.isinf(hi1) else 0.5 * (lo1 + hi1)

    # two lower bounds and one upper bound on 2*gamma3
    g3_strict = 2.0 * s * gamma1 - s * gamma1 * gamma2 + rho2 / 4.0
    g3_loose = rho2 / (4.0 * b) + (gamma1 / (4.0 * b)) * (gamma2 + 2.0 * s + b) ** 2
    g3_upper = (
        2.0 * s * gamma1
        + gamma1 * gamma2
        - rho2 * (b + s - 1.0) ** 2 / (4.0 * s * s * (r - 1.0))
        + s / (b * (r - 1.0))
    )
    lo3 = max(g3_strict, g3_loose)
    if g3_upper > lo3:
        g3 = 0.5 * (lo3 + g3_upper)
    elif g3_upper == lo3 and g3_upper > g3_strict:
        g3 = g3_upper
    else:
        raise NoCertificate(
            "gamma3 bracket is empty", bracket=("gamma3", lo3 / 2.0, g3_upper / 2.0)
        )
    gamma3 = 0.5 * g3

    c2 = (
        rho2 * (b - 1.0) / (2.0 * s)
        + gamma1 * gamma2
        - 2.0 * r * s * gamma1
        + 2.0 * r * gamma3
        + s * gamma1 * gamma2
        - s / b
    )
    b3 = 2.0 * s * gamma1 - 2.0 * gamma3 - s * gamma1 * gamma2 + rho2 / 4.0
    gamma4 = (-2.0 * b3 - c2) / (2.0 * s)
    return GammaCertificate(
        gamma1=gamma1,
        gamma2=gamma2,
        gamma3=gamma3,
        gamma4=gamma4,
        rho=rho,
        s0=s_zero(p),
    )


def r_coefficients(p: SystemParams, cert: GammaCertificate) -> dict:
    """Coefficients of R = A1 x^4 + A2 x^2 z + A3 z^2 + B1 x^2 + B2 xy + B3 y^2."""
    s, r, b = p.sigma, p.r, p.b
    g1, g2, g3, g4 = cert.gamma1, cert.gamma2, cert.gamma3, cert.gamma4
    rho2 = cert.rho**2
    c1 = rho2 * (b - 1.0) ** 2 / (4.0 * s * s) - r * g1 * g2
    c2 = (
        rho2 * (b - 1.0) / (2.0 * s)
        + g1 * g2
        - 2.0 * r * s * g1
        + 2.0 * r * g3
        + s * g1 * g2
        - s / b
    )
    return {
        "A1": -g1,
        "A2": g1 * (g2 + 2.0 * s + b),
        "A3": rho2 / 4.0 - 2.0 * b * g3,
        "B1": c1 - 2.0 * s * g4,
        "B2": c2 + 2.0 * s * g4,
        "B3": 2.0 * s * g1 - 2.0 * g3 - s * g1 * g2 + rho2 / 4.0,
    }


def r_polynomial(p: SystemParams, cert: GammaCertificate, points) -> np.ndarray:
    """Evaluate R (coefficient form) at an (n,3) array of states."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    c = r_coefficients(p, cert)
    return (
        c["A1"] * x**4
        + c["A2"] * x * x * z
        + c["A3"] * z * z
        + c["B1"] * x * x
        + c["B2"] * x * y
        + c["B3"] * y * y
    )


def certificate_v(p: SystemParams, cert: GammaCertificate, points) -> np.ndarray:
    """The Lyapunov function V at an (n,3) array of states (or one state)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    g1, g2, g3, g4 = cert.gamma1, cert.gamma2, cert.gamma3, cert.gamma4
    s, b = p.sigma, p.b
    out = (
        g4 * x * x
        + (g3 - s * g1) * y * y
        + g3 * z * z
        + (g1 / (4.0 * s)) * x**4
        - g1 * x * x * z
        - g1 * g2 * x * y
        - (s / b) * z
    )
    return out if out.size > 1 else float(out[0])


def certificate_vdot(p: SystemParams, cert: GammaCertificate, points) -> np.ndarray:
    """dV/dt along the flow (gradient dotted with the vector field)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    g1, g2, g3, g4 = cert.gamma1, cert.gamma2, cert.gamma3, cert.gamma4
    s, r, b = p.sigma, p.r, p.b
    vx = 2.0 * g4 * x + (g1 / s) * x**3 - 2.0 * g1 * x * z - g1 * g2 * y
    vy = 2.0 * (g3 - s * g1) * y - g1 * g2 * x
    vz = 2.0 * g3 * z - g1 * x * x - s / b
    fx = s * (y - x)
    fy = r * x - y - x * z
    fz = -b * z + x * y
    out = vx * fx + vy * fy + vz * fz
    return out if out.size > 1 else float(out[0])


def r_direct(p: SystemParams, cert: GammaCertificate, points) -> np.ndarray:
    """R evaluated from its defining form -sigma z + rho^2 z^2/4
    + (rho^2/4)(y + ((b-1)/sigma) x)^2 + Vdot; must agree with r_polynomial."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    rho2 = cert.rho**2
    s, b = p.sigma, p.b
    out = (
        -s * z
        + rho2 * z * z / 4.0
        + (rho2 / 4.0) * (y + (b - 1.0) / s * x) ** 2
        + certificate_vdot(p, cert, pts)
    )
    return out if np.size(out) > 1 else float(np.ravel(out)[0])


def certificate_conditions(p: SystemParams, cert: GammaCertificate) -> tuple:
    """The four algebraic sign conditions that make R globally nonpositive.

    Margins are signed distances into the feasible side (positive = satisfied
    with room).  Strict conditions demand margin beyond 1e-12 * scale;
    nonstrict ones tolerate equality within the same slack.
    """
    c = r_coefficients(p, cert)
    scale = max(1.0, *(abs(v) for v in c.values()))
    slack = 1e-12 * scale
    out = [
        RCheck("A1 <= 0", c["A1"] <= slack, -c["A1"]),
        RCheck("B3 < 0", c["B3"] < -slack, -c["B3"]),
    ]
    if c["A1"] < -slack:
        m = 4.0 * c["A1"] * c["A3"] - c["A2"] ** 2
        out.append(RCheck("4 A1 A3 - A2^2 >= 0", m >= -slack, m))
    else:
        # gamma1 = 0 collapse: A1 = A2 = 0 and the quartic block reduces to
        # requiring A3 itself nonpositive
        out.append(RCheck("A3 <= 0 (A1 = 0 branch)", c["A3"] <= slack, -c["A3"]))
    m = 4.0 * c["B1"] * c["B3"] - c["B2"] ** 2
    out.append(RCheck("4 B1 B3 - B2^2 >= 0", m >= -slack, m))
    return tuple(out)


def verify_R_nonpositive(
    p: SystemParams, cert: GammaCertificate, samples: int = 100_000, seed: int = 0
) -> RReport:
    """Check R <= 0: algebraic coefficient conditions plus a quasi-random
    sampling sweep over a box 3x the absorbing ball.

    The coefficient checks are the actual proof (they dominate at infinity);
    sampling is a falsification net.  A failed check is data, not an error.
    """
    if samples < 1:
        raise ValueError("samples must be positive")
    checks = certificate_conditions(p, cert)
    center, radius = absorbing_ball(p)
    half = 3.0 * radius
    eng = qmc.Sobol(d=3, scramble=True, seed=np.random.Generator(np.random.Philox(seed)))
    u = eng.random(1 << max(1, int(math.ceil(math.log2(samples)))))[:samples]
    pts = center + (2.0 * u - 1.0) * half
    vals = r_polynomial(p, cert, pts)
    imax = int(np.argmax(vals))
    max_value = float(vals[imax])
    passed = all(ch.holds for ch in checks) and max_value <= 1e-9
    return RReport(
        coefficients=r_coefficients(p, cert),
        checks=checks,
        max_value=max_value,
        argmax=tuple(pts[imax].tolist()),
        n_samples=int(samples),
        passed=passed,
    )


def exponent_sum_bound(p: SystemParams, s_weight: float) -> float:
    """Closed-form upper bound for 2(l1 + l2 + s*l3) + 2*theta_dot, uniform in
    the state: -(sigma+2b+1) - s(sigma+1) + (1-s) sqrt((sigma-1)^2+4 sigma r).

    Negative exactly when s_weight > s_zero(p).
    """
    disc = math.sqrt((p.sigma - 1.0) ** 2 + 4.0 * p.sigma * p.r)
    return (
        -(p.sigma + 2.0 * p.b + 1.0)
        - s_weight * (p.sigma + 1.0)
        + (1.0 - s_weight) * disc
    )


def weighted_exponent_sum(
    p: SystemParams, cert: GammaCertificate, s_weight: float, points
) -> np.ndarray:
    """2(l1 + l2 + s*l3) + 2*theta_dot at states, with l_i the symmetrized
    eigenvalues and theta = (1-s) V / sqrt((sigma-1)^2+4 sigma r)."""
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    s, b = p.sigma, p.b
    rho = cert.rho
    bracket = (
        (s - 2.0 * b + 1.0) ** 2
        + (2.0 * s / rho - rho * z) ** 2
        + rho * rho * (y + (b - 1.0) / s * x) ** 2
    )
    half = 0.5 * np.sqrt(bracket)
    l1 = -(s + 1.0) / 2.0 + half
    l3 = -(s + 1.0) / 2.0 - half
    disc = math.sqrt((s - 1.0) ** 2 + 4.0 * s * p.r)
    theta_dot = (1.0 - s_weight) * certificate_vdot(p, cert, pts) / disc
    out = 2.0 * (l1 + (-b) + s_weight * l3) + 2.0 * np.asarray(theta_dot)
    return out if out.size > 1 else float(out[0])


def lemma2_domain_check(p: SystemParams) -> bool:
    """True iff r > 1, sigma > 7, 0 < b < 4 -- the box where the theorem's
    conditions are guaranteed to hold.

    When inside the box this also audits that check_conditions agrees (a
    disagreement would be an implementation bug, hence an assertion).
    """
    inside = p.r > 1.0 and p.sigma > 7.0 and 0.0 < p.b < 4.0
    if inside:
        verdict = check_conditions(p)
        assert verdict.outcome != CONDITIONS_FAIL, (
            f"conditions unexpectedly fail inside the guaranteed box at "
            f"(sigma={p.sigma}, r={p.r}, b={p.b}): failed={verdict.failed}"
        )
    return inside


def r_star_search(
    epsilon: float,
    r_grid=None,
    sigma_samples: int = 12,
    b_samples: int = 24,
    sigma_max: float = 30.0,
) -> float | None:
    """Smallest r on a grid such that the theorem's conditions hold across
    0 < b < 4 - epsilon, sigma > 7 (sampled up to sigma_max).

    A numerical stand-in for the threshold r_*(epsilon); returns None when no
    grid value qualifies.
    """
    if not 0.0 < epsilon < 4.0:
        raise ValueError("epsilon must be in (0, 4)")
    if r_grid is None:
        r_grid = np.geomspace(1.001, 100.0, 200)
    sigmas = np.linspace(7.0, sigma_max, sigma_samples + 1)[1:]
    bs = np.linspace(0.0, 4.0 - epsilon, b_samples + 1)[1:]
    for r in r_grid:
        ok = True
        for sg in sigmas:
            for b in bs:
                verdict = check_conditions(SystemParams(float(sg), float(r), float(b)))
                if verdict.outcome == CONDITIONS_FAIL:
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return float(r)
    return None
