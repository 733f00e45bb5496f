"""Deformed bracket, field gradients, Jacobi identity, Galilei algebra.

The independent oracle for gradients is central finite differences on the
plain (float) field evaluations; brackets are then cross-checked against
the dual-number path.
"""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ncplane import (
    NCParams,
    PhasePoint,
    ScalarField,
    poisson_bracket,
    bracket_field,
    jacobi_residual,
    galilei_generators,
    verify_algebra,
    sample_points,
    FieldEvaluationError,
)
from ncplane.phasespace import X, Y, PX, PY, constant_field


def fd_gradient(f, z, t=0.0, h=6e-6):
    c = z.as_array() if isinstance(z, PhasePoint) else np.asarray(z, dtype=float)
    g = np.zeros(4)
    for i in range(4):
        hi = h * max(1.0, abs(c[i]))
        zp = c.copy(); zp[i] += hi
        zm = c.copy(); zm[i] -= hi
        g[i] = (f.fn(*zp, t) - f.fn(*zm, t)) / (2 * hi)
    return g


def fd_bracket(f, g, z, theta, t=0.0):
    df, dg = fd_gradient(f, z, t), fd_gradient(g, z, t)
    s = df[0] * dg[2] + df[1] * dg[3] - df[2] * dg[0] - df[3] * dg[1]
    return s + theta * (df[0] * dg[1] - df[1] * dg[0])


Z1 = PhasePoint(0.4, -1.1, 0.8, 2.3)


def test_gradient_matches_fd():
    f = ScalarField(lambda x, y, px, py, t: x * px ** 2 - 3.0 * y * py + x * y * px)
    assert np.allclose(f.gradient(Z1), fd_gradient(f, Z1), atol=1e-8)


def test_coordinate_brackets():
    p = NCParams(theta=0.7)
    # the deformation lives entirely in the position-position bracket
    assert poisson_bracket(X, Y, Z1, p=p) == pytest.approx(0.7, abs=0)
    assert poisson_bracket(X, PX, Z1, p=p) == 1.0
    assert poisson_bracket(Y, PY, Z1, p=p) == 1.0
    assert poisson_bracket(X, PY, Z1, p=p) == 0.0
    assert poisson_bracket(PX, PY, Z1, p=p) == 0.0
    assert poisson_bracket(Y, X, Z1, p=p) == -0.7


def test_angular_momentum_literal():
    # J = x py - y px + (theta/2)(px^2 + py^2) at (0,0,1,0), theta=2 -> 1.0
    p = NCParams(theta=2.0)
    _, _, _, J, _, _ = galilei_generators(p)
    assert J.value(PhasePoint(0.0, 0.0, 1.0, 0.0)) == 1.0


def test_bracket_antisymmetry_and_bilinearity():
    p = NCParams(theta=0.4)
    f = ScalarField(lambda x, y, px, py, t: x * x * py + y * px)
    g = ScalarField(lambda x, y, px, py, t: px * py - 2.0 * x * y)
    ab = poisson_bracket(f, g, Z1, p=p)
    assert poisson_bracket(g, f, Z1, p=p) == pytest.approx(-ab, rel=1e-15)
    h2 = 2.5 * f + g
    lhs = poisson_bracket(h2, g, Z1, p=p)
    assert lhs == pytest.approx(2.5 * ab + 0.0, rel=1e-13, abs=1e-13)


def test_leibniz_rule():
    p = NCParams(theta=-0.3)
    f = ScalarField(lambda x, y, px, py, t: x * py - y * y)
    g = ScalarField(lambda x, y, px, py, t: px + 2.0 * y)
    h = ScalarField(lambda x, y, px, py, t: x * px * py)
    lhs = poisson_bracket(f, g * h, Z1, p=p)
    rhs = (poisson_bracket(f, g, Z1, p=p) * h.value(Z1)
           + g.value(Z1) * poisson_bracket(f, h, Z1, p=p))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_bracket_matches_fd_oracle():
    theta = 0.6
    f = ScalarField(lambda x, y, px, py, t: x * x * y + px * py ** 2)
    g = ScalarField(lambda x, y, px, py, t: y * px - x * py + x ** 3)
    want = fd_bracket(f, g, Z1, theta)
    got = poisson_bracket(f, g, Z1, theta=theta)
    assert got == pytest.approx(want, rel=1e-7, abs=1e-7)


def test_jacobi_identity_polynomials():
    p = NCParams(m=1.5, theta=0.9)
    H, P1, P2, J, K1, K2 = galilei_generators(p)
    for trip in [(J, K1, H), (K1, K2, J), (H, J, K2), (P1, J, K1)]:
        r = jacobi_residual(*trip, Z1, t=0.8, p=p)
        assert abs(r) < 1e-10


@given(st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2), st.floats(-2, 2),
       st.floats(-1, 1))
@settings(max_examples=50, deadline=None)
def test_jacobi_identity_random_quadratics(a, b, c, d, theta):
    f = ScalarField(lambda x, y, px, py, t: a * x * px + b * y * y)
    g = ScalarField(lambda x, y, px, py, t: c * px * py + d * x * y)
    h = ScalarField(lambda x, y, px, py, t: x * py + a * px * px)
    r = jacobi_residual(f, g, h, Z1, theta=theta)
    assert abs(r) < 1e-9


def test_bracket_field_nests():
    # {x, {x, J}} probes second derivatives through the nested field
    p = NCParams(theta=0.5)
    _, _, _, J, _, _ = galilei_generators(p)
    inner = bracket_field(X, J, p.theta)
    outer = bracket_field(X, inner, p.theta)
    # {x, J} = dJ/dpx + theta dJ/dy = (-y + theta px) - theta px = -y,
    # so {x, {x, J}} = {x, -y} = -theta
    assert inner.value(Z1) == pytest.approx(-Z1.y, rel=1e-15)
    assert outer.value(Z1) == pytest.approx(-p.theta, rel=1e-13)


def test_verify_algebra_grid():
    for m in (1.0, 2.0):
        for theta in (0.0, 0.5, -0.3):
            p = NCParams(m=m, theta=theta)
            rep = verify_algebra(p, t=0.7, tol=1e-9)
            assert rep.ok, (m, theta, rep.residuals)
            assert rep.max_residual() < 1e-9


def test_verify_algebra_time_dependence():
    # boost generators depend on t explicitly; both sampled times must pass
    p = NCParams(m=2.0, theta=0.5)
    r0 = verify_algebra(p, t=0.0)
    r1 = verify_algebra(p, t=1.3)
    merged = r0.merged_with(r1)
    assert merged.ok
    assert merged.max_residual() == max(r0.max_residual(), r1.max_residual())


def test_sample_points_deterministic():
    a = sample_points(10, seed=123)
    b = sample_points(10, seed=123)
    assert all(pa == pb for pa, pb in zip(a, b))
    c = sample_points(10, seed=124)
    assert any(pa != pb for pa, pb in zip(a, c))


def test_theta_zero_reduces_to_canonical():
    f = ScalarField(lambda x, y, px, py, t: x * y + px * y)
    g = ScalarField(lambda x, y, px, py, t: y * py - x * px)
    p0 = NCParams(theta=0.0)
    canonical = fd_bracket(f, g, Z1, 0.0)
    assert poisson_bracket(f, g, Z1, p=p0) == pytest.approx(canonical, rel=1e-7)


def test_field_algebra():
    f = X * PY + 2.0 * Y
    assert f.value(Z1) == pytest.approx(0.4 * 2.3 + 2.0 * (-1.1), rel=1e-15)
    g = -f + constant_field(1.0)
    assert g.value(Z1) == pytest.approx(1.0 - f.value(Z1), rel=1e-14)


def test_nonfinite_field_value_raises():
    bad = ScalarField(lambda x, y, px, py, t: 1e308 * (px + 1e308))
    with pytest.raises(FieldEvaluationError):
        bad.value(Z1)


def test_phase_point_validation():
    with pytest.raises(ValueError):
        PhasePoint(float("nan"), 0.0, 0.0, 0.0)
    z = PhasePoint.from_array([1.0, 2.0, 3.0, 4.0])
    assert tuple(z.as_array()) == (1.0, 2.0, 3.0, 4.0)


def test_params_validation():
    with pytest.raises(ValueError):
        NCParams(m=0.0)
    with pytest.raises(ValueError):
        NCParams(hbar=-1.0)
    p = NCParams(omega=0.0)
    with pytest.raises(ValueError):
        p.require_omega()
