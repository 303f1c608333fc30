"""Vector field, Jacobian, equilibria, and the absorbing-ball geometry."""

from __future__ import annotations

import math

import numpy as np
import pytest

from lyapdim import (
    SystemParams,
    absorbing_ball,
    advance_state,
    equilibria,
    jacobian,
    sample_absorbing_ball,
    vdot_dissipativity,
    vector_field,
)
from lyapdim.model import as_state
from lyapdim.integrate import IntegratorConfig


def test_params_require_positive_entries():
    with pytest.raises(ValueError):
        SystemParams(0.0, 28.0, 8 / 3)
    with pytest.raises(ValueError):
        SystemParams(10.0, -1.0, 8 / 3)
    with pytest.raises(ValueError):
        SystemParams(10.0, 28.0, 0.0)


def test_params_frozen(classical):
    with pytest.raises(AttributeError):
        classical.r = 99.0


def test_as_state_accepts_sequences():
    s = as_state([1, 2, 3])
    assert s.shape == (3,) and s.dtype == float
    assert np.array_equal(s, as_state((1.0, 2.0, 3.0)))
    with pytest.raises(ValueError):
        as_state([1.0, 2.0])


def test_vector_field_closed_form(classical):
    f = vector_field(classical, [1.0, 1.0, 1.0])
    assert np.allclose(f, [0.0, 26.0, 1.0 - 8.0 / 3.0], rtol=0, atol=1e-15)
    assert np.array_equal(vector_field(classical, np.zeros(3)), np.zeros(3))


def test_jacobian_matches_finite_differences(classical):
    rng = np.random.default_rng(11)
    h = 1e-6
    for _ in range(10):
        s = rng.uniform(-20, 40, 3)
        J = jacobian(classical, s)
        num = np.empty((3, 3))
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            num[:, k] = (vector_field(classical, s + e) - vector_field(classical, s - e)) / (2 * h)
        assert np.allclose(J, num, atol=1e-6)
        # divergence of the flow is constant
        assert np.trace(J) == pytest.approx(-(10 + 1 + 8 / 3), abs=1e-14)


def test_equilibria_pair_present_iff_r_above_one():
    assert equilibria(SystemParams(10, 0.5, 8 / 3)).s12 is None
    assert equilibria(SystemParams(10, 1.0, 8 / 3)).s12 is None  # strict threshold
    eqs = equilibria(SystemParams(10, 28, 8 / 3))
    assert eqs.s12 is not None
    s1, s2 = eqs.s12
    w = math.sqrt(72.0)  # b(r-1) = 8/3 * 27
    assert np.allclose(s1, [-w, -w, 27.0], rtol=0, atol=1e-12)
    assert np.allclose(s2, [w, w, 27.0], rtol=0, atol=1e-12)


def test_equilibria_are_roots_of_the_field():
    for p in (SystemParams(10, 28, 8 / 3), SystemParams(3, 20.8, 6.0), SystemParams(1, 5, 2)):
        for s in equilibria(p).all_points():
            res = np.linalg.norm(vector_field(p, s))
            assert res <= 1e-12 * (1.0 + np.linalg.norm(s))


def test_vdot_is_gradient_dot_field(classical):
    # V = (x^2 + y^2 + (z - r - sigma)^2)/2, so dV/dt = <grad V, f>
    rng = np.random.default_rng(3)
    shift = classical.r + classical.sigma
    for _ in range(20):
        s = rng.uniform(-30, 60, 3)
        grad = np.array([s[0], s[1], s[2] - shift])
        want = float(grad @ vector_field(classical, s))
        assert vdot_dissipativity(classical, s) == pytest.approx(want, rel=1e-12, abs=1e-9)


def test_vdot_negative_outside_ball(classical):
    center, radius = absorbing_ball(classical)
    rng = np.random.default_rng(4)
    u = rng.normal(size=(200, 3))
    u /= np.linalg.norm(u, axis=1)[:, None]
    for pt in center + 1.05 * radius * u:
        assert vdot_dissipativity(classical, pt) < 0.0


@pytest.mark.parametrize(
    "p",
    [
        SystemParams(10, 28, 8 / 3),  # b >= 2 branch
        SystemParams(0.5, 10, 1.5),   # b >= 2*sigma branch
        SystemParams(10, 28, 1.2),    # bare sqrt(4) branch
    ],
)
def test_ball_radius_covers_the_vdot_zero_set(p):
    # the ball must contain the ellipsoid where dV/dt = 0; its radius carries
    # a deliberate 10% slack over the sup of |s - center| on that surface
    center, radius = absorbing_ball(p)
    m = (p.r + p.sigma) / 2.0
    th = np.linspace(0, math.pi, 600)[:, None]
    ph = np.linspace(0, 2 * math.pi, 600)[None, :]
    x = m * math.sqrt(p.b / p.sigma) * np.sin(th) * np.cos(ph)
    y = m * math.sqrt(p.b) * np.sin(th) * np.sin(ph)
    z = m + m * np.cos(th) + 0 * ph
    d = np.sqrt(x**2 + y**2 + (z - center[2]) ** 2)
    sup = float(d.max())
    assert sup <= radius / 1.10 + 1e-9
    assert sup >= (radius / 1.10) * (1.0 - 1e-3)  # grid sup approaches the bound


def test_classical_ball_values(classical):
    center, radius = absorbing_ball(classical)
    assert np.array_equal(center, [0.0, 0.0, 38.0])
    assert radius == pytest.approx(43.17085436572534, rel=0, abs=1e-12)


def test_trajectories_enter_the_ball(classical):
    center, radius = absorbing_ball(classical)
    cfg = IntegratorConfig()
    rng = np.random.default_rng(9)
    for s in rng.uniform(-80, 80, (5, 3)):
        end = advance_state(classical, s, 50.0, cfg)
        assert np.linalg.norm(end - center) <= radius


def test_ball_sampler_is_deterministic_and_inside(classical):
    center, radius = absorbing_ball(classical)
    a = sample_absorbing_ball(classical, 64, seed=7)
    b = sample_absorbing_ball(classical, 64, seed=7)
    c = sample_absorbing_ball(classical, 64, seed=8)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert a.shape == (64, 3)
    assert (np.linalg.norm(a - center, axis=1) <= radius + 1e-12).all()
