"""Spectral-function algebra: parsing, circulant construction, extrema, velocity bound."""

import numpy as np
import pytest

from quench_entropy import (CriticalSymbolError, SpectralSpecError,
                            TrigPolynomial, build_circulant, evaluate, extrema,
                            gap_family, group_velocity_bound, is_critical,
                            parse_spectral_spec)
from quench_entropy.spectral import (format_spectral_spec, require_nonnegative,
                                     require_positive)


def test_parse_poly_and_gap_formats():
    f = parse_spectral_spec("poly:2.25,0,0.5")
    assert np.allclose(f.coeffs, [2.25, 0.0, 0.5])
    g = parse_spectral_spec("gap:c=1.5")
    assert np.allclose(g.coeffs, [2.75, -3.0, 0.5])
    assert parse_spectral_spec("  poly:1 ").degree == 0


@pytest.mark.parametrize("bad", [
    "poly:", "poly:1,zz", "gap:", "gap:1.5", "gap:c=", "gap:q=2",
    "spline:3", "", "1.5",
])
def test_parse_rejects_malformed_specs(bad):
    with pytest.raises(SpectralSpecError):
        parse_spectral_spec(bad)


def test_format_roundtrip():
    f = TrigPolynomial([2.25, -0.3, 0.017])
    g = parse_spectral_spec(format_spectral_spec(f))
    assert np.array_equal(f.coeffs, g.coeffs)


def test_trailing_zeros_trimmed():
    f = TrigPolynomial([1.0, 0.5, 0.0, 0.0])
    assert f.degree == 1
    assert f.coeffs.size == 2
    # the constant term survives even when it is zero
    assert TrigPolynomial([0.0]).degree == 0


def test_coefficients_are_read_only():
    f = TrigPolynomial([1.0, 0.5])
    with pytest.raises(ValueError):
        f.coeffs[0] = 7.0


def test_nonfinite_coefficients_rejected():
    with pytest.raises(SpectralSpecError):
        TrigPolynomial([1.0, np.nan])
    with pytest.raises(SpectralSpecError):
        TrigPolynomial([np.inf])
    with pytest.raises(SpectralSpecError):
        TrigPolynomial([])


def test_gap_family_matches_squared_form():
    rng = np.random.default_rng(11)
    theta = rng.uniform(0, 2 * np.pi, 64)
    for c in (0.5, 1.0, 1.5, -0.7):
        f = gap_family(c)
        assert np.abs(f(theta) - (c - np.cos(theta)) ** 2).max() < 1e-14


def test_evaluate_scalar_and_vector():
    f = TrigPolynomial([2.0, -1.0])
    v = evaluate(f, 0.0)
    assert isinstance(v, float) and v == 1.0
    arr = evaluate(f, np.array([0.0, np.pi]))
    assert arr.shape == (2,)
    assert np.allclose(arr, [1.0, 3.0])


def test_build_circulant_first_row_frozen():
    mat = build_circulant(gap_family(1.5), 8)
    assert mat.size == 8
    expected = np.array([2.75, -1.5, 0.25, 0.0, 0.0, 0.0, 0.25, -1.5])
    assert np.array_equal(mat.first_row, expected)


def test_circulant_eigenvalues_match_symbol_samples():
    rng = np.random.default_rng(12)
    for _ in range(20):
        deg = int(rng.integers(0, 4))
        coeffs = rng.normal(size=deg + 1)
        f = TrigPolynomial(coeffs)
        N = int(rng.choice([16, 32, 64]))
        mat = build_circulant(f, N)
        samples = evaluate(f, 2 * np.pi * np.arange(N) / N)
        assert np.abs(np.sort(mat.eigenvalues()) - np.sort(samples)).max() < 1e-12


def test_circulant_dense_structure():
    mat = build_circulant(gap_family(1.5), 12)
    dense = mat.to_dense()
    assert np.array_equal(dense, dense.T)
    # every row is the previous one rotated right by one slot
    for i in range(1, 12):
        assert np.array_equal(dense[i], np.roll(dense[0], i))


def test_build_circulant_rejects_small_size():
    with pytest.raises(SpectralSpecError):
        build_circulant(gap_family(1.5), 4)  # need N > 2K = 4


def test_extrema_gap_family_closed_form():
    ext = extrema(gap_family(1.5))
    assert abs(ext.minimum - 0.25) < 1e-10
    assert abs(ext.maximum - 6.25) < 1e-10
    assert min(ext.argmin, 2 * np.pi - ext.argmin) < 1e-5
    assert abs(ext.argmax - np.pi) < 1e-5
    # |c| <= 1 puts the zero at theta = arccos(c)
    ext05 = extrema(gap_family(0.5))
    assert abs(ext05.minimum) < 1e-12
    assert abs(ext05.argmin - np.pi / 3) < 1e-5


def test_extrema_against_brute_force():
    rng = np.random.default_rng(13)
    theta = np.linspace(0, 2 * np.pi, 200_000, endpoint=False)
    for _ in range(10):
        deg = int(rng.integers(1, 4))
        f = TrigPolynomial(rng.normal(size=deg + 1))
        vals = evaluate(f, theta)
        ext = extrema(f)
        assert ext.minimum <= vals.min() + 1e-9
        assert ext.maximum >= vals.max() - 1e-9


def test_is_critical_classification():
    assert is_critical(gap_family(1.0))
    assert is_critical(gap_family(0.5))  # zero sits at an interior angle
    assert not is_critical(gap_family(1.5))
    assert not is_critical(TrigPolynomial([2.0, -1.0]))


def test_require_positive_and_nonnegative():
    sign_changing = TrigPolynomial([1.0, -2.0])
    with pytest.raises(SpectralSpecError):
        require_positive(sign_changing)
    with pytest.raises(SpectralSpecError):
        require_nonnegative(sign_changing)
    require_nonnegative(gap_family(1.0))  # touches zero: allowed
    with pytest.raises(SpectralSpecError):
        require_positive(gap_family(1.0))
    require_positive(TrigPolynomial([2.0, -1.0]))


def test_group_velocity_bound_value():
    # degree 2, max 6.25, min 0.25 -> 2 * 6.25 / 0.5
    assert abs(group_velocity_bound(gap_family(1.5)) - 25.0) < 1e-9
    assert group_velocity_bound(TrigPolynomial([3.0])) == 0.0


def test_group_velocity_bound_rejects_critical():
    with pytest.raises(CriticalSymbolError):
        group_velocity_bound(gap_family(1.0))


def test_derivative_bound_property():
    # max |f'| <= K max |f| for a degree-K cosine polynomial
    rng = np.random.default_rng(14)
    theta = np.linspace(0, 2 * np.pi, 8192, endpoint=False)
    for _ in range(10):
        deg = int(rng.integers(1, 5))
        f = TrigPolynomial(rng.normal(size=deg + 1))
        m = np.arange(deg + 1)
        deriv = -np.sin(np.multiply.outer(theta, m)) @ (m * f.coeffs)
        assert np.abs(deriv).max() <= deg * np.abs(f(theta)).max() * (1 + 1e-9)
