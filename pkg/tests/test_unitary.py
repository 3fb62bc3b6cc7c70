import cmath

import numpy as np
import pytest

from pbdcs.unitary import (
    dft_matrix,
    is_complex_hadamard,
    max_unbiased_deviation,
    mub_family,
    sylvester,
)


def test_dft_small():
    assert np.allclose(dft_matrix(1), [[1]])
    assert np.allclose(dft_matrix(2), [[1, 1], [1, -1]], atol=1e-15)
    h = dft_matrix(3)
    w = cmath.exp(2j * cmath.pi / 3)
    assert abs(np.vdot(h[2], h[1]) - (1 + w + w * w)) < 1e-12
    assert abs(np.vdot(h[2], h[1])) < 1e-12


@pytest.mark.parametrize("r", range(1, 65))
def test_dft_orthogonality(r):
    h = dft_matrix(r)
    assert np.max(np.abs(h @ h.conj().T - r * np.eye(r))) <= 1e-10 * r
    assert np.allclose(np.abs(h), 1)
    assert np.all(h[0] == 1)


def test_dft_rejects_zero():
    with pytest.raises(ValueError):
        dft_matrix(0)


def test_sylvester():
    assert np.array_equal(sylvester(1), [[1]])
    assert np.array_equal(sylvester(2), [[1, 1], [1, -1]])
    for order in (1, 2, 4, 8, 16):
        h = sylvester(order)
        assert set(np.unique(h)) <= {-1.0, 1.0}
        assert np.array_equal(h @ h.T, order * np.eye(order))
        assert np.all(h[0] == 1) and np.all(h[:, 0] == 1)
    for order in (1, 2, 4, 8):
        assert abs(abs(np.linalg.det(sylvester(order))) - order ** (order / 2)) < 1e-9 * order ** (order / 2)
    with pytest.raises(ValueError):
        sylvester(6)


def test_is_complex_hadamard():
    assert is_complex_hadamard(dft_matrix(5))
    assert is_complex_hadamard(sylvester(8))
    assert not is_complex_hadamard(np.eye(3))
    assert not is_complex_hadamard(np.ones((2, 2)))
    assert not is_complex_hadamard(np.ones((2, 3)))


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_mub_family(p):
    bases = mub_family(p)
    assert len(bases) == p + 1
    assert np.array_equal(bases[0], np.eye(p))
    for m in bases:
        assert np.max(np.abs(m.conj().T @ m - np.eye(p))) < 1e-12
    assert max_unbiased_deviation(bases) <= 1e-10
    # independent re-check of one overlap by explicit summation
    a, b = bases[1], bases[-1]
    s = sum(np.conj(a[j, 0]) * b[j, 1] for j in range(p))
    assert abs(abs(s) - 1 / np.sqrt(p)) < 1e-12


def test_mub_non_identity_are_hadamard():
    for m in mub_family(5)[1:]:
        assert is_complex_hadamard(np.sqrt(5) * m)


@pytest.mark.parametrize("p", [1, 4, 9, 15])
def test_mub_rejects_nonprime(p):
    with pytest.raises(ValueError):
        mub_family(p)
