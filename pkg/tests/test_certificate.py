"""Gamma certificate construction, the R-polynomial, and its verification."""

from __future__ import annotations

from dataclasses import replace

import numpy as np
import pytest

from lyapdim import (
    IntegratorConfig,
    NoCertificate,
    SystemParams,
    absorbing_ball,
    advance_state,
    find_gamma_certificate,
    s_zero,
    verify_R_nonpositive,
)
from lyapdim.theory import (
    certificate_conditions,
    certificate_v,
    certificate_vdot,
    exponent_sum_bound,
    r_coefficients,
    r_direct,
    r_polynomial,
    weighted_exponent_sum,
)

FROZEN_CERT = {
    "gamma1": 0.0018194266329686043,
    "gamma2": 0.0,
    "gamma3": 0.07322612803930441,
    "gamma4": 0.03443617096183636,
    "rho": 0.5849831819752739,
    "s0": 0.4013127635830844,
}
FROZEN_COEFFS = {
    "A1": -0.0018194266329686043,
    "A2": 0.041240337013955033,
    "A3": -0.30498801874447773,
    "B1": -0.686346993381214,
    "B2": 0.04902478524151532,
    "B3": -0.024512392620757634,
}


@pytest.fixture(scope="module")
def cert(classical):
    return find_gamma_certificate(classical)


def _box_points(p, rng, n):
    center, radius = absorbing_ball(p)
    return center + rng.uniform(-3.0 * radius, 3.0 * radius, size=(n, 3))


def test_classical_certificate_frozen_values(cert):
    got = cert.as_dict()
    assert set(got) == set(FROZEN_CERT)
    for key, want in FROZEN_CERT.items():
        assert got[key] == pytest.approx(want, abs=1e-12), key
    assert cert.s0 == s_zero(SystemParams(10.0, 28.0, 8.0 / 3.0))


def test_classical_r_coefficients_frozen(classical, cert):
    got = r_coefficients(classical, cert)
    assert set(got) == set(FROZEN_COEFFS)
    for key, want in FROZEN_COEFFS.items():
        assert got[key] == pytest.approx(want, abs=1e-12), key


def test_no_certificate_when_conditions_fail():
    assert find_gamma_certificate(SystemParams(10.0, 0.5, 8.0 / 3.0)) is None


def test_certificate_exists_in_the_convergence_regime():
    p = SystemParams(10.0, 3.0, 8.0 / 3.0)
    c = find_gamma_certificate(p)
    assert c is not None
    assert all(ch.holds for ch in certificate_conditions(p, c))


def test_certificate_in_case_b():
    p = SystemParams(2.0, 40.0, 6.0)
    c = find_gamma_certificate(p)
    assert c is not None
    assert verify_R_nonpositive(p, c, samples=20_000).passed


def test_certificate_on_degenerate_quadratic_point():
    # K == 0.0 exactly here; construction takes the linear branch with gamma2=1
    p = SystemParams(1.0, 5.0, 2.0)
    c = find_gamma_certificate(p)
    assert c.gamma2 == 1.0
    assert c.rho == 0.5
    assert verify_R_nonpositive(p, c, samples=20_000).passed


def test_r_polynomial_and_direct_form_agree(classical, cert):
    rng = np.random.default_rng(12)
    pts = _box_points(classical, rng, 2000)
    a = r_polynomial(classical, cert, pts)
    b = r_direct(classical, cert, pts)
    assert np.allclose(a, b, rtol=1e-9, atol=1e-8)  # measured ~2e-11


def test_r_is_negative_on_samples(classical, cert):
    rng = np.random.default_rng(13)
    pts = _box_points(classical, rng, 5000)
    assert (r_polynomial(classical, cert, pts) <= 1e-9).all()


def test_verify_report_contents(classical, cert):
    rep = verify_R_nonpositive(classical, cert, samples=20_000, seed=1)
    assert rep.passed
    assert rep.max_value <= 1e-9
    assert rep.n_samples == 20_000
    assert set(rep.coefficients) == set(FROZEN_COEFFS)
    assert len(rep.argmax) == 3
    assert all(ch.holds for ch in rep.checks)


def test_verify_is_deterministic_per_seed(classical, cert):
    a = verify_R_nonpositive(classical, cert, samples=4096, seed=3)
    b = verify_R_nonpositive(classical, cert, samples=4096, seed=3)
    assert a.max_value == b.max_value and a.argmax == b.argmax


def test_verify_rejects_bad_sample_count(classical, cert):
    with pytest.raises(ValueError):
        verify_R_nonpositive(classical, cert, samples=0)


def test_sign_flipped_gamma1_fails_the_named_check(classical, cert):
    bad = replace(cert, gamma1=-cert.gamma1)
    checks = {c.name: c.holds for c in certificate_conditions(classical, bad)}
    assert checks["A1 <= 0"] is False
    assert verify_R_nonpositive(classical, bad, samples=4096).passed is False


def test_inflated_gamma3_fails_the_quadratic_form_check(classical, cert):
    bad = replace(cert, gamma3=10.0 * cert.gamma3)
    checks = {c.name: c.holds for c in certificate_conditions(classical, bad)}
    assert checks["4 B1 B3 - B2^2 >= 0"] is False
    assert verify_R_nonpositive(classical, bad, samples=4096).passed is False


def test_weighted_exponent_sum_obeys_closed_form_bound(classical, cert):
    # the certificate forces the weighted sum under the uniform bound on both
    # sides of the critical weight, not just at s0 itself
    rng = np.random.default_rng(14)
    pts = _box_points(classical, rng, 4000)
    for ds in (-0.01, 0.01):
        s = cert.s0 + ds
        bound = exponent_sum_bound(classical, s)
        vals = weighted_exponent_sum(classical, cert, s, pts)
        assert (vals <= bound + 1e-9).all()
    assert exponent_sum_bound(classical, cert.s0 + 0.01) < 0.0
    assert exponent_sum_bound(classical, cert.s0 - 0.01) > 0.0


def test_certificate_vdot_is_the_flow_derivative_of_v(classical, cert, attractor_state):
    cfg = IntegratorConfig(step=1e-5)
    delta = 1e-4
    s = np.array(attractor_state)
    for _ in range(5):
        mid = advance_state(classical, s, delta, cfg)
        far = advance_state(classical, s, 2.0 * delta, cfg)
        fd = (certificate_v(classical, cert, far) - certificate_v(classical, cert, s)) / (
            2.0 * delta
        )
        assert fd == pytest.approx(
            certificate_vdot(classical, cert, mid), rel=1e-4, abs=1e-3
        )
        s = advance_state(classical, s, 0.7, IntegratorConfig())


def test_scalar_and_batch_evaluation_agree(classical, cert):
    pt = (1.0, -2.0, 3.0)
    batch = np.array([pt, (0.5, 0.5, 40.0)])
    assert isinstance(certificate_v(classical, cert, pt), float)
    assert certificate_v(classical, cert, pt) == certificate_v(classical, cert, batch)[0]
    assert certificate_vdot(classical, cert, pt) == certificate_vdot(classical, cert, batch)[0]
    assert r_direct(classical, cert, pt) == r_direct(classical, cert, batch)[0]
    assert r_polynomial(classical, cert, pt)[0] == r_polynomial(classical, cert, batch)[0]


def test_no_certificate_error_carries_bracket():
    exc = NoCertificate("empty", bracket=("gamma1", 1.0, 0.5))
    assert exc.bracket == ("gamma1", 1.0, 0.5)
