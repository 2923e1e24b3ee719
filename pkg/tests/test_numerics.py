import numpy as np
import pytest

from scatchan.errors import InvalidInputError
from scatchan.numerics import (
    as_matrix,
    matrix_from_json,
    matrix_to_json,
    max_abs,
    operator_norm,
    pseudo_inverse,
    spectral_radius,
    svd,
)

from conftest import random_unitary


def test_svd_identity():
    _, sigma, _ = svd(np.eye(2))
    assert np.allclose(sigma, [1.0, 1.0])


def test_svd_diagonal():
    _, sigma, _ = svd(np.diag([3.0, 0.0]))
    assert np.allclose(sigma, [3.0, 0.0])


def test_svd_reconstruction_random():
    rng = np.random.default_rng(7)
    a = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    u, sigma, v = svd(a)
    assert max_abs(u @ np.diag(sigma) @ v.conj().T - a) < 1e-12 * sigma[0]
    assert np.all(np.diff(sigma) <= 0)
    assert max_abs(u.conj().T @ u - np.eye(4)) < 1e-12
    assert max_abs(v.conj().T @ v - np.eye(4)) < 1e-12


def test_svd_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        svd(np.array([[np.nan, 0], [0, 1]]))


def test_pinv_zero_matrix():
    assert max_abs(pseudo_inverse(np.zeros((3, 2)))) == 0.0


def test_pinv_diagonal():
    assert np.allclose(pseudo_inverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))


def test_pinv_of_unitary_is_adjoint():
    rng = np.random.default_rng(3)
    u = random_unitary(rng, 5)
    assert max_abs(pseudo_inverse(u) - u.conj().T) < 1e-12


@pytest.mark.parametrize("shape", [(2, 2), (5, 3), (3, 5), (12, 12)])
def test_penrose_identities(shape):
    rng = np.random.default_rng(shape[0] * 31 + shape[1])
    a = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    ap = pseudo_inverse(a)
    assert max_abs(a @ ap @ a - a) < 1e-10
    assert max_abs(ap @ a @ ap - ap) < 1e-10
    assert max_abs((a @ ap).conj().T - a @ ap) < 1e-10
    assert max_abs((ap @ a).conj().T - ap @ a) < 1e-10


def test_spectral_radius_diagonal():
    assert spectral_radius(np.diag([0.5, -0.25])) == pytest.approx(0.5)


def test_spectral_radius_nilpotent():
    assert spectral_radius(np.array([[0.0, 1.0], [0.0, 0.0]])) == pytest.approx(0.0)


def test_spectral_radius_contraction_power_iteration():
    rng = np.random.default_rng(11)
    a = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    a = a / (2 * operator_norm(a))
    rho = spectral_radius(a)
    assert rho < 1.0
    # power-iteration cross-check: ||A^n||^(1/n) -> rho
    power = np.linalg.matrix_power(a, 60)
    assert operator_norm(power) ** (1 / 60) == pytest.approx(rho, abs=0.05)


def test_spectral_radius_rejects_nonsquare():
    with pytest.raises(InvalidInputError):
        spectral_radius(np.zeros((2, 3)))


def test_matrix_json_roundtrip():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(3, 2)) + 1j * rng.normal(size=(3, 2))
    obj = matrix_to_json(a)
    assert obj["rows"] == 3 and obj["cols"] == 2 and len(obj["data"]) == 6
    assert max_abs(matrix_from_json(obj) - a) == 0.0


def test_as_matrix_rejects_nonfinite():
    with pytest.raises(InvalidInputError):
        as_matrix([[1.0, np.inf]])
