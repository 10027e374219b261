import numpy as np
import pytest

from curvedirac.curvature import compute_curvature, with_induced_matter
from curvedirac.dirac import (
    DIRECT,
    MATTER,
    PAPER,
    VACUUM,
    SpinorField,
    apply_operator,
    assemble_matter_operator,
    assemble_vacuum_operator,
    commutator_curvature_term,
    covariant_derivative,
    curvature_term_report,
    dalembertian,
    default_field_corpus,
    flat_limit_check,
    gamma_contraction,
    matter_term,
    parse_field_file,
    second_covariant_derivative,
)
from curvedirac.errors import FormatError, InputError, MissingStressEnergy, NotFlat
from curvedirac.metric import inverse_metric, parse_metric_file
from curvedirac.spinor import spec_gammas
from curvedirac.symexpr import ZERO, add, diff, eval_many, expr_equiv, mul, number, parse_expr, symbol

from conftest import SCHWARZSCHILD_TEXT


def field(*texts):
    return SpinorField(tuple(parse_expr(t) for t in texts))


def equiv_all(a, b, spec, tol=1e-9):
    return all(expr_equiv(x, y, spec.domain(), tol=tol, fixed=spec.constants) for x, y in zip(a, b))


def scalar_matrix_equiv(m, diag, spec):
    for i in range(4):
        for j in range(4):
            want = diag if i == j else ZERO
            if not expr_equiv(m[i][j], want, spec.domain(), fixed=spec.constants):
                return False
    return True


ZERO_FIELD = ("0", "0", "0", "0")
PLANE_WAVE = ("exp(-i*(5*t - 3*x))", "0", "0", "0")  # E=5, p=3, m=4


# covariant derivatives -------------------------------------------------------


def test_minkowski_derivative_is_partial(minkowski):
    f = field("t^2*x", "sin(y)", "exp(z)", "x*y")
    for lam, c in enumerate(minkowski.coords):
        got = covariant_derivative(minkowski, f, lam)
        assert got == tuple(diff(e, symbol(c)) for e in f.components)


def test_constant_field_on_minkowski(minkowski):
    f = field("1", "2", "3", "4")
    assert covariant_derivative(minkowski, f, 0) == (ZERO,) * 4
    assert second_covariant_derivative(minkowski, f, 1, 2) == (ZERO,) * 4


def test_schwarzschild_connection_term(schwarzschild):
    f = field("0", "r^2 + 1", "0", "0")
    gam = compute_curvature(schwarzschild).christoffel
    got = covariant_derivative(schwarzschild, f, 0)
    want = mul(gam[0, 0, 1], f[1])
    assert expr_equiv(got[0], want, schwarzschild.domain(), fixed=schwarzschild.constants)


def test_scalar_slots_below_dim(sphere):
    # components past dim get no connection term
    f = field("0", "0", "sin(theta)", "phi")
    d = covariant_derivative(sphere, f, 0)
    assert d[2] == parse_expr("cos(theta)")
    assert d[3] == ZERO


def test_second_derivative_commutator_is_riemann(sphere):
    f = field("theta^2", "phi*theta", "0", "0")
    R = compute_curvature(sphere).riemann
    a = second_covariant_derivative(sphere, f, 0, 1)
    b = second_covariant_derivative(sphere, f, 1, 0)
    for l in range(2):
        want = add(*[mul(R[l, n, 0, 1], f[n]) for n in range(2)])
        assert expr_equiv(add(a[l], -b[l]), want, sphere.domain())


# d'Alembertian ---------------------------------------------------------------


def test_plane_wave_dalembertian(minkowski):
    f = field(*PLANE_WAVE)
    box = dalembertian(minkowski, f)
    assert expr_equiv(box[0], mul(number(-16), f[0]), minkowski.domain())
    assert box[1:] == (ZERO,) * 3


def test_trivial_dalembertians(minkowski):
    assert dalembertian(minkowski, field(*ZERO_FIELD)) == (ZERO,) * 4
    assert dalembertian(minkowski, field("t", "0", "0", "0")) == (ZERO,) * 4


# curvature term --------------------------------------------------------------


def test_minkowski_curvature_terms_vanish(minkowski):
    for mode in (DIRECT, PAPER):
        term = commutator_curvature_term(minkowski, mode=mode)
        assert all(e == ZERO for row in term for e in row)


def test_schwarzschild_curvature_terms_vanish(schwarzschild):
    for mode in (DIRECT, PAPER):
        assert scalar_matrix_equiv(commutator_curvature_term(schwarzschild, mode=mode), ZERO, schwarzschild)


def test_sphere_modes_disagree(sphere):
    rep = curvature_term_report(sphere)
    assert scalar_matrix_equiv(rep.direct, parse_expr("1"), sphere)
    assert scalar_matrix_equiv(rep.paper, parse_expr("1/2"), sphere)
    assert not rep.agree
    assert rep.difference == pytest.approx(0.5)


def test_schwarzschild_modes_agree(schwarzschild):
    assert curvature_term_report(schwarzschild).agree


def test_direct_identity_on_corpus(corpus):
    for spec in corpus.values():
        b = compute_curvature(spec)
        m = gamma_contraction(spec_gammas(spec), b.ricci)
        assert scalar_matrix_equiv(m, b.scalar, spec), spec.name


def test_bad_mode(minkowski):
    with pytest.raises(ValueError):
        commutator_curvature_term(minkowski, mode="literal")


# assembled operators ---------------------------------------------------------


def test_vacuum_potentials(minkowski, schwarzschild, desitter):
    m4 = minkowski.replace(mass=4.0)
    assert scalar_matrix_equiv(assemble_vacuum_operator(m4).potential, parse_expr("16"), m4)
    s = schwarzschild.replace(mass=0.5)
    assert scalar_matrix_equiv(assemble_vacuum_operator(s).potential, parse_expr("1/4"), s)
    op = assemble_vacuum_operator(desitter)
    assert op.mode == VACUUM and op.curvature_term_mode == PAPER
    assert scalar_matrix_equiv(op.potential, parse_expr("1 - 3*H^2"), desitter)


def test_direct_mode_potential(desitter):
    op = assemble_vacuum_operator(desitter, DIRECT)
    assert scalar_matrix_equiv(op.potential, parse_expr("1 - 6*H^2"), desitter)


def test_matter_needs_T(desitter):
    with pytest.raises(MissingStressEnergy):
        assemble_matter_operator(desitter)
    with pytest.raises(MissingStressEnergy):
        matter_term(desitter)


def test_matter_with_zero_T_is_vacuum(desitter):
    spec = desitter.with_stress_energy([[ZERO] * 4 for _ in range(4)])
    assert assemble_matter_operator(spec).potential == assemble_vacuum_operator(spec).potential


def test_matter_trace_collapse(schwarzschild):
    T = [[parse_expr(f"r^{(a + b) % 3}*sin(theta) + {a * b}") for b in range(4)] for a in range(4)]
    spec = schwarzschild.with_stress_energy(T)
    ginv = inverse_metric(spec)
    trace = add(*[mul(ginv[a, b], T[a][b]) for a in range(4) for b in range(4)])
    assert scalar_matrix_equiv(matter_term(spec), trace, spec)
    op = assemble_matter_operator(spec)
    assert op.mode == MATTER
    assert scalar_matrix_equiv(op.potential, mul(number(-0.5), trace), spec)


def test_induced_matter_operator(desitter):
    spec = with_induced_matter(desitter)
    op = assemble_matter_operator(spec)
    assert scalar_matrix_equiv(op.potential, parse_expr("1 + 3*H^2"), spec)


def test_apply_plane_wave_on_shell(minkowski):
    op = assemble_vacuum_operator(minkowski.replace(mass=4.0))
    out = apply_operator(op, field(*PLANE_WAVE))
    assert equiv_all(out, (ZERO,) * 4, minkowski)


def test_apply_trivial(minkowski):
    op = assemble_vacuum_operator(minkowski)
    assert apply_operator(op, field(*ZERO_FIELD)) == (ZERO,) * 4
    assert apply_operator(op, field("1", "i", "-2", "3/4")) == (ZERO,) * 4


def test_flat_limit(minkowski):
    assert flat_limit_check(minkowski)
    assert flat_limit_check(minkowski.replace(mass=1.5))


def test_flat_limit_relabelled():
    text = """\
[header]
name = relabelled
coords = tau, a, b, c
signature = +---

[metric]
g[tau][tau] = 1
g[a][a] = -1
g[b][b] = -1
g[c][c] = -1

[params]
mass = 2
"""
    assert flat_limit_check(parse_metric_file(text))


def test_flat_limit_not_flat(schwarzschild):
    with pytest.raises(NotFlat):
        flat_limit_check(schwarzschild)


def test_default_field_corpus_size(minkowski, sphere):
    assert len(default_field_corpus(minkowski)) == 6
    assert len(default_field_corpus(sphere)) == 6


# field files -----------------------------------------------------------------


def test_parse_field_file():
    text = "# plane wave\npsi[0] = exp(-i*(5*t - 3*x))\npsi[1] = 0\npsi[2] = 0  # none\npsi[3] = 0\n"
    f = parse_field_file(text)
    assert f[0] == parse_expr(PLANE_WAVE[0])


@pytest.mark.parametrize(
    "text",
    [
        "psi[0] = 1\npsi[1] = 0\npsi[2] = 0\n",
        "psi[0] = 1\npsi[0] = 2\npsi[1] = 0\npsi[2] = 0\npsi[3] = 0\n",
        "psi[4] = 1\n",
        "psi[0] = (1\npsi[1] = 0\npsi[2] = 0\npsi[3] = 0\n",
        "phi = 3\n",
    ],
)
def test_bad_field_files(text):
    with pytest.raises(FormatError):
        parse_field_file(text)


def test_field_symbols_checked(minkowski):
    with pytest.raises(InputError):
        field("q", "0", "0", "0").check_symbols(minkowski)
    field("i*t", "0", "0", "0").check_symbols(minkowski)


def test_field_has_four_components():
    with pytest.raises(ValueError):
        SpinorField((ZERO,) * 3)


def test_schwarzschild_operator_numerically_finite():
    spec = parse_metric_file(SCHWARZSCHILD_TEXT)
    op = assemble_vacuum_operator(spec)
    out = apply_operator(op, field("r", "t*r", "sin(theta)", "1"))
    vals = eval_many(out, {"t": 0.2, "r": 5.0, "theta": 1.0, "phi": 0.5, "M": 1.0})
    assert np.all(np.isfinite(vals))
