import math

import numpy as np
import pytest

from curvedirac.curvature import compute_curvature
from curvedirac.dirac import assemble_vacuum_operator, default_field_corpus
from curvedirac.errors import DomainError
from curvedirac.oracle import (
    CENTRAL_2,
    CENTRAL_4,
    FDGeometry,
    StencilConfig,
    commutator_sweep,
    convergence_ratio,
    curvature_sweep,
    fd_apply_operator,
    fd_commutator_check,
    fd_partial,
    metric_derivative_sweep,
    operator_sweep,
    random_polynomial_field,
    rel_error,
    sample_points,
)
from curvedirac.symexpr import parse_expr


def test_stencil_config_validation():
    with pytest.raises(ValueError):
        StencilConfig(step=0)
    with pytest.raises(ValueError):
        StencilConfig(rel_tol=-1)
    with pytest.raises(ValueError):
        StencilConfig(scheme="forward")


def test_fd_square():
    assert abs(fd_partial(parse_expr("x^2"), "x", {"x": 3.0}) - 6) < 1e-6


def test_fd_sine():
    assert abs(fd_partial(parse_expr("sin(x)"), "x", {"x": 0.0}) - 1) < 1e-6


def test_fd_central4_more_accurate():
    e = parse_expr("exp(x)*sin(x)")
    exact = math.exp(0.7) * (math.sin(0.7) + math.cos(0.7))
    c2 = abs(fd_partial(e, "x", {"x": 0.7}, StencilConfig(step=1e-2)) - exact)
    c4 = abs(fd_partial(e, "x", {"x": 0.7}, StencilConfig(step=1e-2, scheme=CENTRAL_4)) - exact)
    assert c4 < c2 / 100


def test_fd_singular_stencil():
    with pytest.raises(DomainError):
        # the x - h stencil node lands exactly on the pole
        fd_partial(parse_expr("1/x"), "x", {"x": 1e-4})


@pytest.mark.parametrize("fn,dfn", [(math.exp, math.exp), (math.sin, math.cos)])
def test_central2_converges_quadratically(fn, dfn):
    ratio = convergence_ratio(fn, dfn(0.4), 0.4, 1e-2, CENTRAL_2)
    assert ratio == pytest.approx(4, rel=0.01)


def test_central4_converges_quartically():
    assert convergence_ratio(math.sin, math.cos(0.4), 0.4, 1e-1, CENTRAL_4) == pytest.approx(16, rel=0.02)


def test_rel_error_definition():
    assert rel_error([1.0], [1.0]) == 0.0
    assert rel_error([0.0], [1e-9]) == pytest.approx(1e-9)
    assert rel_error([100.0], [101.0]) == pytest.approx(1 / 102)


def test_fd_geometry_sphere(sphere):
    geo = FDGeometry(sphere)
    x = np.array([math.pi / 4, 1.0])
    gam = geo.christoffel(x)
    assert gam[0, 1, 1] == pytest.approx(-0.5, rel=1e-6)
    assert gam[1, 0, 1] == pytest.approx(1.0, rel=1e-6)
    assert geo.riemann(x)[0, 1, 0, 1] == pytest.approx(0.5, rel=1e-6)
    assert geo.scalar(x) == pytest.approx(2.0, rel=1e-6)


def test_sample_points_are_interior(schwarzschild):
    pts = sample_points(schwarzschild, 10, seed=4)
    assert len(pts) == 10
    for p in pts:
        assert 3.0 < p["r"] < 10.0 and 0.3 < p["theta"] < 2.8


def test_metric_derivative_sweep(corpus):
    for spec in corpus.values():
        res = metric_derivative_sweep(spec)
        assert res.passed, (spec.name, res.worst_error)


def test_curvature_sweep(corpus):
    for spec in corpus.values():
        for res in curvature_sweep(spec, compute_curvature(spec)):
            assert res.passed, (spec.name, res.name, res.worst_error)


def test_commutator_minkowski(minkowski):
    rng = np.random.default_rng(5)
    V = random_polynomial_field(minkowski.coords, rng)
    R = compute_curvature(minkowski).riemann
    assert fd_commutator_check(minkowski, R, V, {"t": 0.1, "x": -0.2, "y": 0.3, "z": 0.5}) < 1e-8


def test_commutator_sphere_pinned(sphere):
    R = compute_curvature(sphere).riemann
    err = fd_commutator_check(sphere, R, (parse_expr("1"), parse_expr("0")), {"theta": math.pi / 4, "phi": 1.0})
    assert err < 1e-5


def test_commutator_detects_wrong_sign(sphere):
    R = compute_curvature(sphere).riemann
    flipped = R.map(lambda c: -c)
    err = fd_commutator_check(sphere, flipped, (parse_expr("1"), parse_expr("0")), {"theta": math.pi / 4, "phi": 1.0})
    assert err > 0.1


def test_commutator_schwarzschild(schwarzschild):
    R = compute_curvature(schwarzschild).riemann
    V = random_polynomial_field(schwarzschild.coords, np.random.default_rng(11))
    assert fd_commutator_check(schwarzschild, R, V, {"t": 0.0, "r": 5.0, "theta": math.pi / 3, "phi": 1.0}) < 1e-5


def test_commutator_sweep(corpus):
    for spec in corpus.values():
        res = commutator_sweep(spec, compute_curvature(spec).riemann)
        assert res.passed, (spec.name, res.worst_error)


def test_random_polynomial_field_is_seeded():
    a = random_polynomial_field(("t", "x"), np.random.default_rng(2))
    b = random_polynomial_field(("t", "x"), np.random.default_rng(2))
    assert a == b and len(a) == 2


def test_operator_oracle(corpus):
    for spec in corpus.values():
        op = assemble_vacuum_operator(spec)
        res = operator_sweep(op, default_field_corpus(spec)[:3], n_points=2)
        assert res.passed, (spec.name, res.worst_error)


def test_fd_apply_plane_wave(minkowski):
    op = assemble_vacuum_operator(minkowski.replace(mass=4.0))
    f = (parse_expr("exp(-i*(5*t - 3*x))"), parse_expr("0"), parse_expr("0"), parse_expr("0"))
    out = fd_apply_operator(op, f, {"t": 0.3, "x": 0.1, "y": 0.0, "z": 0.0})
    assert np.max(np.abs(out)) < 1e-5
