"""Small dense complex linear algebra for two- and three-qubit games.

Matrices are plain ``numpy`` arrays (``complex128`` for operators, ``float64``
for the real 4x4 quadratic forms).  Everything here is a pure function.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import reduce

import numpy as np


class DomainError(ValueError):
    """An argument lies outside the domain an operation is defined on."""


class NumericalError(ArithmeticError):
    """An iterative method failed to reach its tolerance."""


UNITARY_TOL = 1e-12
# tolerance on user-supplied angles: lets float(pi/2) through
_RANGE_SLACK = 1e-12
SU2_NORM_TOL = 1e-9

I2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
# U(pi, 0) in both two-parameter families; equals i*sigma_y
FLIP = np.array([[0, 1], [-1, 0]], dtype=complex)

# w*I + i*x*sx + i*y*sy + i*z*sz, stacked so that tensordot(v, SU2_BASIS, 1) = U(v)
SU2_BASIS = np.stack([I2, 1j * SIGMA_X, 1j * SIGMA_Y, 1j * SIGMA_Z])
_SU2_FLAT = SU2_BASIS.reshape(4, 4)


def _check_finite(a: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(a)):
        raise DomainError(f"{what} contains NaN or Inf")


def _check_range(name: str, value: float, lo: float, hi: float) -> None:
    if not math.isfinite(value) or value < lo - _RANGE_SLACK or value > hi + _RANGE_SLACK:
        raise DomainError(f"{name}={value!r} outside [{lo}, {hi}]")


def kron(a, b) -> np.ndarray:
    """Kronecker product; the left factor is the more significant qubit."""
    a = np.asarray(a)
    b = np.asarray(b)
    _check_finite(a, "kron operand")
    _check_finite(b, "kron operand")
    return np.kron(a, b)


def kron_all(mats) -> np.ndarray:
    return reduce(kron, mats)


def is_unitary(u, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u)
    if u.ndim != 2 or u.shape[0] != u.shape[1] or not np.all(np.isfinite(u)):
        return False
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))) <= tol


def entangler_generator(players: int) -> np.ndarray:
    """Involutory generator G of the entangling gate (G @ G == I)."""
    if players == 2:
        return kron(FLIP, FLIP)
    if players == 3:
        return kron_all([SIGMA_X] * 3)
    raise DomainError(f"players must be 2 or 3, got {players!r}")


def entangler(players: int, gamma: float) -> np.ndarray:
    """J(gamma) = exp(i*gamma/2 * G), via cos + i*sin*G since G squares to I."""
    gen = entangler_generator(players)
    _check_range("gamma", gamma, 0.0, math.pi / 2)
    dim = 2**players
    return math.cos(gamma / 2) * np.eye(dim, dtype=complex) + 1j * math.sin(gamma / 2) * gen


def unitary_from_two_param_diag(theta: float, phi: float) -> np.ndarray:
    """[[e^{i phi} cos(theta/2), sin(theta/2)], [-sin(theta/2), e^{-i phi} cos(theta/2)]]."""
    _check_range("theta", theta, 0.0, math.pi)
    _check_range("phi", phi, 0.0, math.pi / 2)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[e * c, s], [-s, e.conjugate() * c]], dtype=complex)


def unitary_from_two_param_offdiag(theta: float, phi: float) -> np.ndarray:
    """[[cos(theta/2), e^{i phi} sin(theta/2)], [-e^{-i phi} sin(theta/2), cos(theta/2)]]."""
    _check_range("theta", theta, 0.0, math.pi)
    _check_range("phi", phi, 0.0, math.pi / 2)
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    e = complex(math.cos(phi), math.sin(phi))
    return np.array([[c, e * s], [-e.conjugate() * s, c]], dtype=complex)


def normalize_su2(coeffs) -> np.ndarray:
    """Return ``coeffs`` as a unit 4-vector.

    Vectors within 1e-9 of unit norm are renormalized; anything else is
    rejected so that bad inputs are not silently projected onto the sphere.
    """
    v = np.asarray(coeffs, dtype=float).reshape(-1)
    if v.shape != (4,):
        raise DomainError(f"SU(2) coefficients must have 4 entries, got {v.shape}")
    _check_finite(v, "SU(2) coefficients")
    norm = float(np.linalg.norm(v))
    if norm == 0.0:
        raise DomainError("SU(2) coefficient vector is zero")
    if abs(norm - 1.0) > SU2_NORM_TOL:
        raise DomainError(f"SU(2) coefficients have norm {norm!r}, expected 1")
    return v / norm


def unitary_from_su2(coeffs) -> np.ndarray:
    """w*I + i*x*sigma_x + i*y*sigma_y + i*z*sigma_z for a unit vector (w, x, y, z)."""
    v = normalize_su2(coeffs)
    return np.tensordot(v, SU2_BASIS, axes=1)


def su2_matrices(coeffs: np.ndarray) -> np.ndarray:
    """Vectorized ``unitary_from_su2`` without validation: (..., 4) -> (..., 2, 2)."""
    coeffs = np.asarray(coeffs)
    return (coeffs @ _SU2_FLAT).reshape(coeffs.shape[:-1] + (2, 2))


def su2_from_unitary(u) -> np.ndarray:
    """Coefficients (w, x, y, z) of a 2x2 unitary, up to the global sign.

    Any global phase is divided out first, so ``u`` need not have unit
    determinant.
    """
    u = np.asarray(u, dtype=complex)
    if u.shape != (2, 2) or not is_unitary(u, 1e-9):
        raise DomainError("expected a 2x2 unitary")
    det = u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0]
    u = u / np.sqrt(det)
    v = np.array([u[0, 0].real, u[0, 1].imag, u[0, 1].real, u[0, 0].imag])
    return v / np.linalg.norm(v)


def symmetric_matrix4(entries) -> np.ndarray:
    """Real symmetric 4x4 from ``entries``; the upper triangle is mirrored down."""
    m = np.array(entries, dtype=float)
    if m.shape != (4, 4):
        raise DomainError(f"expected a 4x4 matrix, got {m.shape}")
    _check_finite(m, "matrix")
    upper = np.triu(m)
    return upper + np.triu(m, 1).T


@dataclass(frozen=True)
class EigenDecomposition4:
    eigenvalues: np.ndarray  # descending
    eigenvectors: np.ndarray  # column k pairs with eigenvalues[k]
    top_eigenspace: np.ndarray  # 4 x d, orthonormal columns
    sweeps: int

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[0])


TOP_EIGEN_RTOL = 1e-9


def jacobi_eigs(m, max_sweeps: int = 50, tol: float = 1e-12) -> EigenDecomposition4:
    """Full spectrum of a real symmetric 4x4 matrix by cyclic Jacobi rotations.

    Converged when the off-diagonal Frobenius norm is at most
    ``tol * max(1, ||m||_F)``.  Eigenvectors are sign-normalized so that the
    entry of largest magnitude is positive.
    """
    m = np.asarray(m, dtype=float)
    if m.shape != (4, 4):
        raise DomainError(f"expected a 4x4 matrix, got {m.shape}")
    _check_finite(m, "matrix")
    scale = max(1.0, float(np.linalg.norm(m)))
    if float(np.max(np.abs(m - m.T))) > 1e-12 * scale:
        raise DomainError("matrix is not symmetric")

    # plain Python floats: far cheaper than numpy calls at this size
    a = [[float(m[i][j]) for j in range(4)] for i in range(4)]
    v = [[1.0 if i == j else 0.0 for j in range(4)] for i in range(4)]
    limit = tol * scale
    pairs = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]

    sweep = 0
    while True:
        off = math.sqrt(2.0 * sum(a[p][q] * a[p][q] for p, q in pairs))
        if off <= limit:
            break
        if sweep >= max_sweeps:
            raise NumericalError(
                f"Jacobi did not converge in {max_sweeps} sweeps (off-diagonal norm {off:.3e})"
            )
        sweep += 1
        for p, q in pairs:
            apq = a[p][q]
            if apq == 0.0:
                continue
            app, aqq = a[p][p], a[q][q]
            theta = (aqq - app) / (2.0 * apq)
            if abs(theta) > 1e150:
                t = 0.5 / theta
            else:
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
            c = 1.0 / math.sqrt(t * t + 1.0)
            s = t * c
            for r in range(4):
                if r != p and r != q:
                    arp, arq = a[r][p], a[r][q]
                    a[r][p] = a[p][r] = c * arp - s * arq
                    a[r][q] = a[q][r] = s * arp + c * arq
            a[p][p] = app - t * apq
            a[q][q] = aqq + t * apq
            a[p][q] = a[q][p] = 0.0
            for r in range(4):
                vrp, vrq = v[r][p], v[r][q]
                v[r][p] = c * vrp - s * vrq
                v[r][q] = s * vrp + c * vrq

    order = sorted(range(4), key=lambda k: -a[k][k])
    values = np.array([a[k][k] for k in order])
    vecs = np.array(v)[:, order]
    for k in range(4):
        col = vecs[:, k]
        if col[int(np.argmax(np.abs(col)))] < 0:
            vecs[:, k] = -col
    lam = values[0]
    top = values >= lam - TOP_EIGEN_RTOL * max(1.0, abs(lam))
    return EigenDecomposition4(values, vecs, vecs[:, top].copy(), sweep)
