"""Forward transform, difference identity, inversion, symbol identity."""

import math

import numpy as np
import pytest

from padicradial.field import FieldParams, KRadialFunction, make_basis
from padicradial.laplace import (
    difference_identity_residual,
    laplace_invert,
    laplace_transform,
    symbol_identity_residual,
)

P2 = FieldParams(2, 1.0)


def oracle_transform(phi, n, terms=300):
    """Truncated direct sum of the defining shell formula."""
    q = float(phi.params.q)
    s = sum(phi.value_at(j) * q ** float(j) for j in range(-n - terms, -n + 1))
    return (1 - 1 / q) * s - phi.value_at(-n + 1) * q ** float(-n)


def test_constant_transforms_to_zero():
    one = KRadialFunction(P2, 0, 20, np.ones(21), 1.0)
    tilde = laplace_transform(one, (-15, 15))
    assert np.abs(tilde.values).max() < 1e-14


def test_indicator_of_the_ball():
    ind = KRadialFunction(P2, 0, 0, [1.0], 1.0)
    tilde = laplace_transform(ind, (-10, 10))
    for n in range(-10, 11):
        want = 1.0 if n <= 0 else 0.0
        assert tilde.value_at(n) == pytest.approx(want, abs=1e-14)
        assert tilde.value_at(n) == pytest.approx(oracle_transform(ind, n), abs=1e-13)


def test_single_shell_function_transform():
    f0 = make_basis(P2, "f", 0)
    tilde = laplace_transform(f0, (-6, 8))
    root2 = math.sqrt(2.0)
    for n in range(-6, 9):
        assert tilde.value_at(n) == pytest.approx(oracle_transform(f0, n), abs=1e-13)
    # frozen from the oracle: sqrt(2)/2 on n <= 0, then -sqrt(2)/2 at n = 1, then 0
    assert tilde.value_at(0) == pytest.approx(root2 / 2.0, abs=1e-15)
    assert tilde.value_at(-3) == pytest.approx(root2 / 2.0, abs=1e-15)
    assert tilde.value_at(1) == pytest.approx(-root2 / 2.0, abs=1e-15)
    for n in range(2, 9):
        assert abs(tilde.value_at(n)) < 1e-15


def test_transform_linearity_and_constant_kernel():
    rng = np.random.default_rng(3)
    phi = KRadialFunction(P2, -8, 0, rng.standard_normal(9) + 1j * rng.standard_normal(9))
    psi = KRadialFunction(P2, -8, 0, rng.standard_normal(9) + 1j * rng.standard_normal(9))
    lift = KRadialFunction(P2, -8, 10, np.concatenate([phi.values + 3.7, 3.7 * np.ones(10)]), 3.7)

    ta = laplace_transform(phi, (-9, 9)).values
    tb = laplace_transform(psi, (-9, 9)).values
    tab = laplace_transform(
        KRadialFunction(P2, -8, 0, 2.0 * phi.values - 1j * psi.values), (-9, 9)
    ).values
    assert np.abs(tab - (2.0 * ta - 1j * tb)).max() < 1e-13

    # adding a constant does not change the transform (where the shift is constant)
    shifted = laplace_transform(lift, (-9, 9)).values
    assert np.abs(shifted - ta).max() < 1e-12


@pytest.mark.parametrize("q", [2, 3, 5])
def test_difference_identity_random_functions(q):
    p = FieldParams(q)
    rng = np.random.default_rng(11)
    for _ in range(30):
        vals = rng.standard_normal(13) + 1j * rng.standard_normal(13)
        phi = KRadialFunction(p, -12, 0, vals)
        assert difference_identity_residual(phi, (-12, 12)) < 1e-12


def test_difference_identity_constant():
    one = KRadialFunction(P2, 0, 20, np.ones(21), 1.0)
    assert difference_identity_residual(one, (-10, 10)) < 1e-14


def test_difference_identity_with_tail():
    for q in (2, 3):
        v2 = make_basis(FieldParams(q), "v", 2)  # carries the constant tail 1
        assert difference_identity_residual(v2, (-8, 8)) < 1e-12


def test_monotone_transfer():
    # strictly increasing phi in |x| gives strictly monotone transform
    mono = make_basis(FieldParams(3), "monomial", 1, window=(-12, 0))
    tilde = laplace_transform(mono, (-8, 10))
    dphi = np.array([mono.value_at(-n) - mono.value_at(-n + 1) for n in range(-8, 10)])
    dtil = np.array([tilde.value_at(n) - tilde.value_at(n + 1) for n in range(-8, 10)])
    assert np.array_equal(np.sign(dphi.real), np.sign(dtil.real))


def test_inversion_round_trip():
    rng = np.random.default_rng(5)
    for q in (2, 3):
        p = FieldParams(q)
        vals = rng.standard_normal(21) + 1j * rng.standard_normal(21)
        phi = KRadialFunction(p, -20, 0, vals)
        m_max = 22
        tilde = laplace_transform(phi, (1 - m_max, m_max + 1))
        down, up = laplace_invert(tilde, phi.value_at(0), m_max)
        for m in range(1, m_max + 1):
            assert down[m - 1] == pytest.approx(phi.value_at(-m), abs=1e-12)
            assert up[m - 1] == pytest.approx(phi.value_at(m), abs=1e-12)


def test_inversion_of_zero_transform_is_constant():
    tilde = laplace_transform(KRadialFunction(P2, 0, 22, np.ones(23), 1.0), (-11, 13))
    assert np.abs(tilde.values).max() < 1e-14
    down, up = laplace_invert(tilde, 4.25, 10)
    assert np.abs(down - 4.25).max() < 1e-13
    assert np.abs(up - 4.25).max() < 1e-13


def test_inversion_of_ball_indicator():
    ind = KRadialFunction(P2, 0, 0, [1.0], 1.0)
    tilde = laplace_transform(ind, (-11, 13))
    down, up = laplace_invert(tilde, 1.0, 10)
    assert np.abs(down - 1.0).max() < 1e-14  # inside the ball
    assert np.abs(up).max() < 1e-14  # outside


def test_inversion_range_error_names_missing_indices():
    tilde = laplace_transform(KRadialFunction(P2, 0, 0, [1.0], 1.0), (0, 5))
    with pytest.raises(ValueError, match="missing indices"):
        laplace_invert(tilde, 1.0, 8)


def test_transform_decay_for_compact_zero_tail():
    rng = np.random.default_rng(9)
    phi = KRadialFunction(P2, -10, 0, rng.standard_normal(11))
    tilde = laplace_transform(phi, (40, 41))
    assert abs(tilde.value_at(40)) < 1e-10


def test_symbol_identity_step_function():
    # both sides equal twice the transform for the first step eigenfunction
    phi = make_basis(P2, "v", 1, window=(-12, 3))
    phi = KRadialFunction(P2, -12, 3, phi.values_on(-12, 3), 0j)
    assert symbol_identity_residual(phi, 1.0, (-6, 10)) < 1e-10


def test_symbol_identity_constant_is_trivial():
    zero = KRadialFunction(P2, -5, 0, np.zeros(6))
    assert symbol_identity_residual(zero, 1.0, (-4, 4)) == 0.0


@pytest.mark.parametrize("alpha", [0.5, 1.0, 2.0])
def test_symbol_identity_random(alpha):
    p = FieldParams(3, alpha)
    rng = np.random.default_rng(13)
    phi = KRadialFunction(p, -5, 0, rng.standard_normal(6) + 1j * rng.standard_normal(6))
    assert symbol_identity_residual(phi, alpha, (-6, 10), relative=True) < 1e-10


def test_symbol_identity_requires_zero_tail():
    with pytest.raises(ValueError):
        symbol_identity_residual(make_basis(P2, "v", 1), 1.0, (-2, 2))
