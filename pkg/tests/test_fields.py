import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gausscone.fields import (
    affine,
    constant,
    dilated,
    exp_axis,
    fd_gradient_error,
    fd_hessian_error,
    gaussian,
    gaussian_quarter,
    hermite_witness,
    mass_dilated,
    one_plus,
    poly_gauss,
    product,
    squared,
)

LIBRARY = [
    constant(2.0, 2),
    affine([1.0, -2.0], 0.5),
    exp_axis(0.5, 1, 2),
    hermite_witness(1, 2),
    gaussian(1.3, 1.2, 2),
    gaussian_quarter(1.1, 2),
    poly_gauss(0, 2),
    poly_gauss(4, 2, even_axes=frozenset({0})),
    squared(hermite_witness(0, 2)),
    product(gaussian(1.0, 1.0, 2), affine([0.0, 1.0], 0.0)),
    one_plus(0.1, affine([0.0, 1.0], 0.0)),
    dilated(gaussian(1.0, 1.0, 2), 2.0),
    mass_dilated(poly_gauss(2, 2), 1.5, 3.5),
]


@pytest.mark.parametrize("f", LIBRARY, ids=lambda f: f.name)
def test_gradient_matches_fd(f, rng):
    pts = rng.normal(size=(100, 2))
    assert fd_gradient_error(f, pts) < 1e-6


@pytest.mark.parametrize("f", LIBRARY, ids=lambda f: f.name)
def test_hessian_symmetric_and_matches_fd(f, rng):
    pts = rng.normal(size=(40, 2))
    hess = f.hess(pts)
    np.testing.assert_allclose(hess, np.swapaxes(hess, 1, 2), atol=1e-12)
    assert fd_hessian_error(f, pts) < 1e-5


def test_decay_envelopes_hold(rng):
    pts = rng.normal(size=(500, 2)) * 3.0
    for f in LIBRARY:
        if not f.decay.is_gaussian:
            continue
        vals = np.abs(f.value(pts))
        envelope = np.exp(-f.decay.rate * np.sum(pts ** 2, axis=1))
        # a generous polynomial prefactor; the rate is what matters
        poly = 50.0 * (1.0 + np.sum(pts ** 2, axis=1)) ** 3
        assert np.all(vals <= poly * envelope + 1e-300)


def test_parity_tags(rng):
    pts = rng.normal(size=(50, 2))
    for f in LIBRARY:
        for ax in f.even_axes:
            flipped = pts.copy()
            flipped[:, ax] *= -1
            np.testing.assert_allclose(f.value(flipped), f.value(pts),
                                       rtol=1e-12, atol=1e-12)
        for ax in f.odd_axes:
            flipped = pts.copy()
            flipped[:, ax] *= -1
            np.testing.assert_allclose(f.value(flipped), -f.value(pts),
                                       rtol=1e-12, atol=1e-12)


def test_squared_parity_promotes_odd_to_even():
    w = hermite_witness(1, 2)
    assert 1 in w.odd_axes
    sq = squared(w)
    assert 1 in sq.even_axes and not sq.odd_axes


def test_product_decay_rate_adds():
    f = gaussian(1.0, 1.0, 2)     # rate 1/2
    g = gaussian(2.0, 2.0, 2)     # rate 1/8
    assert product(f, g).decay.rate == pytest.approx(0.5 + 0.125)


def test_dilation_rescales_rate():
    f = gaussian(1.0, 1.0, 2)
    assert dilated(f, 2.0).decay.rate == pytest.approx(0.125)
    assert mass_dilated(f, 2.0, 2.0).decay.rate == pytest.approx(2.0)


def test_mass_dilated_values():
    f = poly_gauss(7, 2)
    lam, n_alpha = 1.7, 3.5
    g = mass_dilated(f, lam, n_alpha)
    pts = np.array([[0.3, -0.8], [1.0, 0.2]])
    np.testing.assert_allclose(
        g.value(pts), lam ** (n_alpha / 2) * f.value(pts * lam))


@given(st.integers(min_value=0, max_value=10_000))
@settings(max_examples=25, deadline=None)
def test_poly_gauss_seed_determinism_and_fd(seed):
    f1 = poly_gauss(seed, 2)
    f2 = poly_gauss(seed, 2)
    pts = np.random.default_rng(0).normal(size=(20, 2))
    np.testing.assert_array_equal(f1.value(pts), f2.value(pts))
    assert fd_gradient_error(f1, pts) < 1e-6


def test_poly_gauss_even_axes(rng):
    f = poly_gauss(3, 2, even_axes=frozenset({0}))
    pts = rng.normal(size=(30, 2))
    flipped = pts.copy()
    flipped[:, 0] *= -1
    np.testing.assert_allclose(f.value(flipped), f.value(pts), rtol=1e-12)
