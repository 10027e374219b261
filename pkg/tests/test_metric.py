import pytest

from curvedirac.bundled import CORPUS_NAMES, corpus_text, load_metric
from curvedirac.errors import (
    AsymmetricInput,
    DimensionMismatch,
    FormatError,
    InputError,
    MissingSection,
    SignatureMismatch,
    SingularMetric,
)
from curvedirac.metric import MetricSpec, format_metric, inverse_metric, parse_metric_file
from curvedirac.symexpr import ZERO, expr_equiv, parse_expr

from conftest import SCHWARZSCHILD_TEXT

MINIMAL = """\
[header]
name = flat2
coords = t, x
signature = +-

[metric]
g[t][t] = 1
g[x][x] = -1
"""


def test_minkowski_corpus(minkowski):
    assert minkowski.coords == ("t", "x", "y", "z")
    assert minkowski.signature == (1, -1, -1, -1)
    for a in range(4):
        for b in range(4):
            if a != b:
                assert minkowski.g[a][b] == ZERO


def test_schwarzschild_file():
    spec = parse_metric_file(SCHWARZSCHILD_TEXT)
    assert spec.dim == 4
    assert spec.constants == {"M": 1.0}
    assert spec.domain()["r"] == (3.0, 10.0)
    assert spec.domain()["t"] == (-1.0, 1.0)
    assert spec.g[0][0] == parse_expr("1 - 2*M/r")


def test_default_signature_for_dim4():
    text = SCHWARZSCHILD_TEXT.replace("signature = +---\n", "")
    assert parse_metric_file(text).signature == (1, -1, -1, -1)


def test_lower_triangle_filled():
    text = MINIMAL.replace("g[x][x] = -1", "g[x][x] = -1\ng[t][x] = 1/4")
    spec = parse_metric_file(text)
    assert spec.g[1][0] == spec.g[0][1] == parse_expr("1/4")


def test_integer_indices_accepted():
    text = MINIMAL.replace("g[t][t]", "g[0][0]").replace("g[x][x]", "g[1][1]")
    assert parse_metric_file(text).g == parse_metric_file(MINIMAL).g


def test_asymmetric_entries():
    text = MINIMAL + "g[t][x] = x\ng[x][t] = 2*x\n"
    with pytest.raises(AsymmetricInput):
        parse_metric_file(text)


def test_consistent_duplicate_entries_are_fine():
    text = MINIMAL + "g[t][x] = x/5\ng[x][t] = x/5\n"
    assert parse_metric_file(text).g[0][1] == parse_expr("x/5")


def test_missing_metric_section():
    text = "[header]\nname = broken\ncoords = t, x\nsignature = +-\n"
    with pytest.raises(MissingSection):
        parse_metric_file(text)


@pytest.mark.parametrize(
    "text",
    [
        MINIMAL.replace("signature = +-", "signature = +--"),
        MINIMAL + "g[t][y] = 1\n",
    ],
)
def test_dimension_mismatch(text):
    with pytest.raises(DimensionMismatch):
        parse_metric_file(text)


def test_format_error_has_line_number():
    with pytest.raises(FormatError) as info:
        parse_metric_file(MINIMAL + "colour = blue\n")
    assert info.value.line == 9


@pytest.mark.parametrize(
    "extra",
    ["[weird]\n", "[params]\nspin = 1/2\n", "[metric]\ng[t][t] = 1 +\n"],
)
def test_bad_content(extra):
    with pytest.raises(InputError):
        parse_metric_file(MINIMAL + extra)


def test_singular_metric():
    text = MINIMAL.replace("g[x][x] = -1", "g[x][x] = 0")
    with pytest.raises(SingularMetric):
        parse_metric_file(text)


def test_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        parse_metric_file(MINIMAL.replace("signature = +-", "signature = ++"))


@pytest.mark.parametrize("name", CORPUS_NAMES)
def test_format_parse_round_trip(name):
    spec = parse_metric_file(corpus_text(name))
    again = parse_metric_file(format_metric(spec))
    assert spec.structurally_equal(again)
    assert format_metric(again) == format_metric(spec)


def test_round_trip_with_stress_energy():
    text = MINIMAL + "\n[stress-energy]\nT[t][t] = x^2\nT[t][x] = t\n\n[params]\nmass = 2\ncoupling = 0.5\n"
    spec = parse_metric_file(text)
    assert spec.mass == 2.0 and spec.coupling == 0.5
    again = parse_metric_file(format_metric(spec))
    assert again.structurally_equal(spec)
    assert again.T[1][0] == parse_expr("t")


def test_load_metric_from_path(tmp_path):
    path = tmp_path / "flat.metric"
    path.write_text(MINIMAL, encoding="utf-8")
    assert load_metric(str(path)).name == "flat2"
    with pytest.raises(InputError):
        load_metric(str(tmp_path / "missing.metric"))
    with pytest.raises(InputError):
        load_metric("corpus:kerr")


# inverse metric --------------------------------------------------------------


def test_minkowski_inverse(minkowski):
    ginv = inverse_metric(minkowski)
    for a in range(4):
        for b in range(4):
            assert ginv[a, b] == minkowski.g[a][b]


def test_diagonal_inverse_is_reciprocal(schwarzschild):
    ginv = inverse_metric(schwarzschild)
    dom, fixed = schwarzschild.domain(), schwarzschild.constants
    assert ginv.variance == ("up", "up")
    assert expr_equiv(ginv[0, 0], parse_expr("1/(1 - 2*M/r)"), dom, fixed=fixed)
    assert expr_equiv(ginv[1, 1], parse_expr("-(1 - 2*M/r)"), dom, fixed=fixed)
    assert expr_equiv(ginv[3, 3], parse_expr("-1/(r^2*sin(theta)^2)"), dom, fixed=fixed)


def test_non_diagonal_inverse_delta_identity():
    text = MINIMAL.replace("g[x][x] = -1", "g[x][x] = -1 - x^2\ng[t][x] = x/2")
    spec = parse_metric_file(text)
    ginv = inverse_metric(spec)
    for a in range(2):
        for b in range(2):
            s = sum((ginv[a, k] * spec.g[k][b] for k in range(2)), ZERO)
            assert expr_equiv(s, parse_expr("1" if a == b else "0"), spec.domain())


def test_inverse_of_inverse(schwarzschild, desitter, sphere):
    for spec in (schwarzschild, desitter, sphere):
        ginv = inverse_metric(spec)
        rows = tuple(tuple(ginv[a, b] for b in range(spec.dim)) for a in range(spec.dim))
        as_metric = MetricSpec(
            spec.name + "-inv", spec.coords, spec.signature, rows, constants=spec.constants, sample_domain=spec.sample_domain
        )
        back = inverse_metric(as_metric)
        for a in range(spec.dim):
            for b in range(spec.dim):
                assert expr_equiv(back[a, b], spec.g[a][b], spec.domain(), fixed=spec.constants)
