import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hermtrig.scalars import (
    CDScalar,
    InconsistentPair,
    NoRealArgument,
    NotUnimodular,
    PoleError,
    SpaceLabels,
    all_normalized_labels,
    arck,
    cd_add,
    cd_arg,
    cd_conj,
    cd_exp_imag,
    cd_mul,
    classify,
    cosk,
    dual_labels,
    modulus_sq,
    normalize,
    sink,
    tank,
    versink,
)

UNIT = CDScalar(0.0, 1.0)
labels_real = st.floats(-4, 4, allow_nan=False)
args_real = st.floats(-10, 10, allow_nan=False)
etas = st.sampled_from([1.0, 0.0, -1.0, 0.3, -2.5])


def close(z: CDScalar, re, im, tol=1e-13):
    return abs(z.re - re) <= tol and abs(z.im - im) <= tol


@pytest.mark.parametrize(
    "raw, expected",
    [((2, 3, -5), (1, 1, -1)), ((0, 0, 0), (0, 0, 0)), ((1, -1, 1), (1, -1, 1))],
)
def test_normalize(raw, expected):
    assert normalize(SpaceLabels(*raw)).as_tuple() == expected


def test_labels_reject_non_finite():
    with pytest.raises(ValueError):
        SpaceLabels(1.0, math.inf, 1.0)
    with pytest.raises(ValueError):
        SpaceLabels(math.nan, 1.0, 1.0)


def test_labels_parse_and_str():
    L = SpaceLabels.parse("-1;0.5,2")
    assert L.as_tuple() == (-1.0, 0.5, 2.0)
    with pytest.raises(ValueError):
        SpaceLabels.parse("1,2")


@pytest.mark.parametrize(
    "labels, name",
    [
        ((1, 1, 1), "Complex Hermitian Elliptic"),
        ((1, -1, -1), "Complex Hermitian Doubly Hyperbolic (De Sitter)"),
        ((0, 0, 0), "Parabolic Complex Hermitian Galilean"),
    ],
)
def test_classify(labels, name):
    assert classify(SpaceLabels(*labels)) == name


def test_all_27_names_distinct():
    names = {classify(L) for L in all_normalized_labels()}
    assert len(names) == 27


@pytest.mark.parametrize(
    "labels, expected",
    [((1, 1, -1), (1, -1, 1)), ((0, 0, 0), (0, 0, 0)), ((-1, 1, 0), (-1, 0, 1))],
)
def test_dual_labels(labels, expected):
    assert dual_labels(SpaceLabels(*labels)).as_tuple() == expected


@pytest.mark.parametrize("eta, square", [(1.0, -1.0), (-1.0, 1.0), (0.0, 0.0)])
def test_unit_squares(eta, square):
    assert close(cd_mul(UNIT, UNIT, eta), square, 0.0)


@given(etas, *(st.floats(-5, 5) for _ in range(4)))
def test_conj_times_self_is_modulus(eta, a, b, c, d):
    z = CDScalar(a, b)
    p = cd_mul(cd_conj(z), z, eta)
    assert abs(p.im) <= 1e-12
    assert p.re == pytest.approx(modulus_sq(z, eta), abs=1e-12)
    # conjugation is multiplicative on a commutative ring
    w = CDScalar(c, d)
    lhs = cd_conj(cd_mul(z, w, eta))
    rhs = cd_mul(cd_conj(z), cd_conj(w), eta)
    assert close(lhs, rhs.re, rhs.im, 1e-11)
    s = cd_add(z, w)
    assert close(s, a + c, b + d)


@pytest.mark.parametrize(
    "eta, x, expected",
    [
        (1.0, math.pi, (-1.0, 0.0)),
        (0.0, 0.37, (1.0, 0.37)),
        (-1.0, 0.8, (math.cosh(0.8), math.sinh(0.8))),
    ],
)
def test_exp_imag(eta, x, expected):
    assert close(cd_exp_imag(x, eta), *expected)


@given(etas, st.floats(-3, 3), st.floats(-3, 3))
def test_exp_imag_is_homomorphism(eta, x, y):
    lhs = cd_mul(cd_exp_imag(x, eta), cd_exp_imag(y, eta), eta)
    rhs = cd_exp_imag(x + y, eta)
    scale = max(1.0, abs(rhs.re), abs(rhs.im))
    assert close(lhs, rhs.re, rhs.im, 1e-13 * scale)
    assert modulus_sq(cd_exp_imag(x, eta), eta) == pytest.approx(1.0, abs=1e-12 * scale**2)


@pytest.mark.parametrize(
    "eta, u, expected",
    [
        (1.0, CDScalar(0.0, 1.0), math.pi / 2),
        (0.0, CDScalar(1.0, 0.7), 0.7),
        (-1.0, CDScalar(math.cosh(0.3), math.sinh(0.3)), 0.3),
    ],
)
def test_cd_arg(eta, u, expected):
    assert cd_arg(u, eta) == pytest.approx(expected, abs=1e-13)


def test_cd_arg_errors():
    with pytest.raises(NotUnimodular):
        cd_arg(CDScalar(2.0, 0.0), 1.0)
    with pytest.raises(NoRealArgument):
        cd_arg(CDScalar(-math.cosh(0.3), math.sinh(0.3)), -1.0)
    with pytest.raises(NoRealArgument):
        cd_arg(CDScalar(-1.0, 0.4), 0.0)


@given(etas, st.floats(-2.5, 2.5))
def test_cd_arg_inverts_exp(eta, x):
    if eta > 0:
        x = math.remainder(x, 2 * math.pi / math.sqrt(eta))
        if abs(abs(x) - math.pi / math.sqrt(eta)) < 1e-9:
            return
    assert cd_arg(cd_exp_imag(x, eta), eta) == pytest.approx(x, abs=1e-9)


def test_labeled_function_examples():
    assert cosk(0, 5.3) == 1.0
    for x in (-1.2, 0.0, 0.4, 3.0):
        assert sink(-4, x) == pytest.approx(math.sinh(2 * x) / 2, rel=1e-14, abs=1e-15)
    assert versink(0, 3) == 4.5
    assert tank(1, 0.3) == pytest.approx(math.tan(0.3))
    with pytest.raises(PoleError):
        tank(1, math.pi / 2)


def test_arrays_pass_through():
    xs = np.linspace(-1, 1, 5)
    assert np.allclose(cosk(1, xs), np.cos(xs))
    assert np.allclose(sink(-1, xs), np.sinh(xs))


@settings(max_examples=300)
@given(labels_real, args_real)
def test_pythagorean_identity(k, x):
    c, s = cosk(k, x), sink(k, x)
    scale = max(1.0, c * c, abs(k) * s * s)
    assert abs(c * c + k * s * s - 1) <= 1e-14 * scale * 4


@given(labels_real, st.floats(-3, 3), st.floats(-3, 3))
def test_addition_laws(k, x, y):
    scale = max(1.0, abs(cosk(k, x + y)), abs(sink(k, x + y)), abs(cosk(k, x) * cosk(k, y)))
    assert cosk(k, x + y) == pytest.approx(cosk(k, x) * cosk(k, y) - k * sink(k, x) * sink(k, y), abs=1e-13 * scale)
    assert sink(k, x + y) == pytest.approx(sink(k, x) * cosk(k, y) + cosk(k, x) * sink(k, y), abs=1e-13 * scale)
    assert sink(k, 2 * x) == pytest.approx(2 * sink(k, x) * cosk(k, x), abs=1e-13 * scale)


@given(st.sampled_from([-4.0, -1.0, -0.2, 0.0, 0.5, 1.0, 4.0]), st.floats(-1.4, 1.4))
def test_arck_roundtrip(k, x):
    assert arck(k, cosk(k, x), sink(k, x)) == pytest.approx(x, abs=1e-9)


def test_arck_examples_and_errors():
    assert arck(1, 0, 1) == pytest.approx(math.pi / 2)
    assert arck(0, 1, 0.37) == 0.37
    assert arck(-1, math.cosh(2), -math.sinh(2)) == pytest.approx(-2, abs=1e-12)
    with pytest.raises(InconsistentPair):
        arck(1, 0.5, 0.5)


@pytest.mark.parametrize("x", [-5.0, -0.3, 1.0, 5.0])
def test_continuity_in_label(x):
    eps = 1e-6
    for f in (cosk, sink, versink):
        bound = eps * (x**2 + x**4)
        assert abs(f(eps, x) - f(0.0, x)) <= bound
        assert abs(f(-eps, x) - f(0.0, x)) <= bound
