import numpy as np
import pytest
from numpy.testing import assert_allclose

from multispecies_landau.errors import IndeterminateRatioError, ParameterError
from multispecies_landau.sphere import (
    CircleField,
    HarmonicField,
    check_inequality,
    estimate_constant,
    gamma,
    gamma2,
    integrals,
    random_field,
    random_rotation,
    ratio,
    rotate,
    sphere_constant,
)


def _harmonic(lmax, **entries):
    """Real coefficients with ``entries`` given as ``l{l}m{m}`` (``m`` may be ``n2`` for -2)."""
    c = np.zeros((lmax + 1) ** 2)
    for key, value in entries.items():
        l, m = key[1:].split("m")
        l = int(l)
        m = -int(m[1:]) if m.startswith("n") else int(m)
        c[l * l + l + m] = value
    return c


def test_constants():
    assert sphere_constant(2, False) == 1.0
    assert sphere_constant(2, True) == 4.0
    assert sphere_constant(3, False) == 2.0
    assert sphere_constant(3, True) == 5.5
    with pytest.raises(ParameterError):
        sphere_constant(4, False)


def test_constant_field_has_no_gamma():
    f = CircleField(np.full(64, 0.7))
    assert_allclose(gamma(f), 0.0, atol=1e-28)
    assert_allclose(gamma2(f), 0.0, atol=1e-28)
    h = HarmonicField(_harmonic(3, l0m0=0.4))
    assert_allclose(gamma(h), 0.0, atol=1e-26)
    assert_allclose(gamma2(h), 0.0, atol=1e-26)


def test_circle_cosine():
    eps = 0.3
    f = CircleField.from_modes([eps], [0.0], 256)
    th = f.angles
    assert_allclose(gamma(f), eps**2 * np.sin(th) ** 2, atol=1e-14)
    assert_allclose(gamma2(f), eps**2 * np.cos(th) ** 2, atol=1e-14)


def test_sphere_linear_function():
    # log phi = eps z with z = sqrt(4 pi / 3) Y_1^0: Gamma = eps^2 (1 - z^2).
    eps = 0.2
    h = HarmonicField(_harmonic(1, l1m0=eps * np.sqrt(4 * np.pi / 3)))
    z = h.points[:, 2]
    assert_allclose(h.log_values, eps * z, atol=1e-13)
    assert_allclose(gamma(h), eps**2 * (1 - z**2), atol=1e-13)
    # The generators map z to x, y and 0, so Gamma_2 = eps^2 (2 - x^2 - y^2) = eps^2 (1 + z^2),
    # which is |Hess|^2 + Ric = 2 eps^2 z^2 + eps^2 (1 - z^2).
    assert_allclose(gamma2(h), eps**2 * (1 + z**2), atol=1e-13)


@pytest.mark.parametrize("l", [1, 2, 3, 4])
def test_eigenfunction_gamma_integrals(l):
    # For Phi = Y_l: int Gamma = lambda, int Gamma_2 = lambda^2 - (d - 2) lambda + Ric = lambda^2
    # on S^2 (Bochner: lambda^2 - lambda + lambda), with lambda = l (l + 1).
    lam = l * (l + 1)
    for m in range(-l, l + 1):
        c = np.zeros((l + 1) ** 2)
        c[l * l + l + m] = 1.0
        h = HarmonicField(c)
        w = h.weights
        assert_allclose(w @ h.log_values**2, 1.0, rtol=1e-12)
        assert_allclose(w @ gamma(h), lam, rtol=1e-12)
        assert_allclose(w @ gamma2(h), lam**2, rtol=1e-12)


def test_linearized_ratios():
    eps = 1e-3
    assert abs(ratio(CircleField.from_modes([eps], [0.0], 512)) - 1.0) <= 1e-3
    assert abs(ratio(CircleField.from_modes([0.0, eps], [0.0, 0.0], 512, antipodal=True)) - 4.0) <= 1e-3
    assert abs(ratio(HarmonicField(_harmonic(1, l1m0=eps))) - 2.0) <= 1e-2
    assert abs(ratio(HarmonicField(_harmonic(2, l2m1=eps), antipodal=True)) - 6.0) <= 1e-2


def test_ratio_of_constant_is_indeterminate():
    with pytest.raises(IndeterminateRatioError):
        ratio(CircleField(np.zeros(32)))
    with pytest.raises(IndeterminateRatioError):
        ratio(HarmonicField(_harmonic(2)))


def test_check_inequality_constant_field():
    v = check_inequality(CircleField(np.zeros(32), antipodal=True), symmetric=True)
    assert v.margin == 0.0 and v.passed
    assert np.isnan(v.ratio)


def test_symmetric_flag_needs_antipodal_field():
    with pytest.raises(ParameterError):
        check_inequality(CircleField.from_modes([0.2], [0.1], 64), symmetric=True)
    with pytest.raises(ParameterError):
        check_inequality(HarmonicField(_harmonic(1, l1m1=0.3)), symmetric=True)


def test_antipodal_structure_is_enforced():
    with pytest.raises(ParameterError):
        CircleField(np.cos(2 * np.pi * np.arange(16) / 16), antipodal=True)
    with pytest.raises(ParameterError):
        HarmonicField(_harmonic(3, l3m2=0.1), antipodal=True)
    with pytest.raises(ParameterError):
        CircleField(np.zeros(7))


@pytest.mark.parametrize("dim", [2, 3])
def test_ratio_scale_invariance_and_positivity(rng, dim):
    for _ in range(5):
        f = random_field(dim, rng)
        assert np.all(gamma(f) >= 0) and np.all(gamma2(f) >= 0)
        if dim == 2:
            g = CircleField(f.log_values + 1.7)
        else:
            c = f.coeffs.copy()
            c[0] += 1.7 * np.sqrt(4 * np.pi)
            g = HarmonicField(c)
        assert_allclose(ratio(g), ratio(f), rtol=1e-12)
        m1, a1, b1 = integrals(f)
        m2, a2, b2 = integrals(g)
        assert_allclose([m2 / m1, a2 / a1, b2 / b1], np.exp(1.7), rtol=1e-12)


def test_rotation_invariance(rng):
    for symmetric in (False, True):
        f = random_field(3, rng, symmetric, lmax=4)
        R = random_rotation(rng)
        g = rotate(f, R)
        assert_allclose(ratio(g), ratio(f), rtol=1e-10)
        # The rotated field takes the same values at rotated points.
        moved = rotate(g, R.T)
        assert_allclose(moved.coeffs, f.coeffs, atol=1e-11)


@pytest.mark.parametrize("dim,symmetric", [(2, False), (2, True), (3, False), (3, True)])
def test_small_batteries(dim, symmetric):
    rng = np.random.default_rng(7)
    lam = sphere_constant(dim, symmetric)
    for _ in range(10):
        v = check_inequality(random_field(dim, rng, symmetric), symmetric)
        assert v.passed
        assert v.constant == lam
        assert_allclose(v.margin, v.gamma2_integral - lam * v.gamma_integral)


def test_estimate_constant_circle():
    est = estimate_constant(2, False, lmax=3, restarts=3, seed=0)
    assert 0.99 <= est.value <= 1.01
    assert est.evaluations > 0
    assert_allclose(ratio(est.field), est.value, rtol=1e-12)
