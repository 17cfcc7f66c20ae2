"""
Dense complex linear algebra for small dimensions.

All operators are plain ``numpy`` arrays wrapped in immutable records; every function is pure.
Unitary eigenvalues follow the convention lambda_j = exp(-i * alpha_j) with the principal
eigenphase alpha_j in (-pi, pi].
"""
import logging
from typing import List
from typing import Optional
from typing import Union

import numpy as np
from basis_speed_limits import errors
from basis_speed_limits import models

MAX_DIM = 1024

DEFAULT_TOL = 1e-10

HERMITIAN_TOL = 1e-12

PHASE_TOL = 1e-9

MatrixLike = Union[np.ndarray, list]

logger = logging.getLogger(__name__)


def as_matrix(m: MatrixLike) -> np.ndarray:
    """
    Convert to a square complex matrix.

    :param ndarray|list m: the input
    :rtype: ndarray
    :return: a complex square matrix
    :raises DimensionOverflowError: if the matrix is not square or too large
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] < 1:
        raise errors.DimensionOverflowError(f"Expected a non-empty square matrix, got {m.shape}")
    if m.shape[0] > MAX_DIM:
        raise errors.DimensionOverflowError(f"Dimension {m.shape[0]} exceeds {MAX_DIM}")
    return m


def dagger(m: np.ndarray) -> np.ndarray:
    """Conjugate transpose."""
    return np.conj(np.swapaxes(m, -1, -2))


def wrap_phase(phase: Union[float, np.ndarray]) -> Union[float, np.ndarray]:
    """
    Map angles to the principal branch (-pi, pi].

    :param float|ndarray phase: the angle(s)
    :rtype: float|ndarray
    :return: the wrapped angle(s)
    """
    return np.pi - np.mod(np.pi - np.asarray(phase, dtype=float), 2 * np.pi)


def principal_phases(eigenvalues: np.ndarray, phase_tol: float = PHASE_TOL) -> np.ndarray:
    """
    Convert unitary eigenvalues exp(-i * alpha) to principal eigenphases alpha.

    Works on arrays of any shape; angles within phase_tol of -pi are snapped to pi.

    :param ndarray eigenvalues: the eigenvalues
    :param float phase_tol: snapping tolerance at the branch cut
    :rtype: ndarray
    :return: the eigenphases in (-pi, pi]
    """
    phases = wrap_phase(-np.angle(eigenvalues))
    return np.where(phases <= -np.pi + phase_tol, np.pi, phases)


def is_unitary(m: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """Return whether m times its adjoint is the identity within tol."""
    return bool(np.max(np.abs(m @ dagger(m) - np.eye(m.shape[0]))) <= tol)


def _canonical_columns(vectors: np.ndarray) -> np.ndarray:
    """Fix the free phase of each column: its largest-modulus entry is real positive."""
    idx = np.argmax(np.abs(vectors), axis=0)
    pivots = vectors[idx, np.arange(vectors.shape[1])]
    return vectors * (np.abs(pivots) / pivots)


def hermitian_eig(m: MatrixLike, tol: float = HERMITIAN_TOL) -> models.HermitianOperator:
    """
    Diagonalize a Hermitian matrix.

    :param ndarray|list m: the matrix
    :param float tol: symmetry tolerance relative to the largest entry
    :rtype: HermitianOperator
    :return: the operator with ascending eigenvalues and orthonormal eigenvector columns
    :raises NotHermitianError: if the symmetry defect exceeds the tolerance
    :raises NoConvergenceError: if the eigensolver fails
    """
    m = as_matrix(m)
    scale = max(float(np.max(np.abs(m))), 1.0)
    defect = float(np.max(np.abs(m - dagger(m))))
    if defect > tol * scale:
        raise errors.NotHermitianError(f"Symmetry defect {defect:.3e} exceeds {tol * scale:.3e}")
    m = (m + dagger(m)) / 2
    try:
        eigenvalues, eigenvectors = np.linalg.eigh(m)
    except np.linalg.LinAlgError as lae:
        raise errors.NoConvergenceError(f"Hermitian eigensolver failed: {lae}") from lae
    return models.HermitianOperator(
        matrix=m,
        eigenvalues=eigenvalues,
        eigenvectors=_canonical_columns(eigenvectors),
    )


def mat_exp(h: models.HermitianOperator, t: float) -> models.UnitaryOperator:
    """
    Evolve for time t: exp(-iHt) via the eigendecomposition of H.

    :param HermitianOperator h: the Hamiltonian
    :param float t: the evolution time
    :rtype: UnitaryOperator
    :return: the unitary, its eigenphases being E_j t on the principal branch
    """
    if not np.isfinite(t):
        raise errors.TimeOutOfRangeError(f"Evolution time must be finite, got {t}")
    phases = principal_phases(np.exp(-1j * h.eigenvalues * t))
    vectors = h.eigenvectors
    matrix = (vectors * np.exp(-1j * h.eigenvalues * t)) @ dagger(vectors)
    order = np.argsort(phases, kind="stable")
    return models.UnitaryOperator(
        matrix=matrix,
        eigenphases=phases[order],
        eigenvectors=vectors[:, order],
    )


def _phase_groups(phases: np.ndarray, phase_tol: float) -> List[List[int]]:
    """Indices of (sorted) phases closer than phase_tol, the ends of the branch cut joined."""
    groups = [[0]]
    for i in range(1, len(phases)):
        if phases[i] - phases[i - 1] < phase_tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    # -pi and pi describe the same eigenvalue
    if len(groups) > 1 and phases[0] - phases[-1] + 2 * np.pi < phase_tol:
        logger.debug("Degenerate eigenvalues straddle the branch cut")
        groups[0] = groups.pop() + groups[0]
    return groups


def _orthonormalize_groups(
    phases: np.ndarray,
    vectors: np.ndarray,
    phase_tol: float,
) -> np.ndarray:
    """Gram-Schmidt within each group of degenerate phases."""
    vectors = vectors.copy()
    for group in _phase_groups(phases, phase_tol):
        q, _ = np.linalg.qr(vectors[:, group])
        vectors[:, group] = q
    return vectors


def _eig_residual(u: np.ndarray, phases: np.ndarray, vectors: np.ndarray) -> float:
    return float(np.max(np.abs(u @ vectors - vectors * np.exp(-1j * phases))))


def _pencil_eig(u: np.ndarray) -> np.ndarray:
    """Eigenvectors of a normal matrix from a generic Hermitian combination of its parts."""
    golden = (1 + np.sqrt(5)) / 2
    k = (u + dagger(u)) / 2 + golden * (u - dagger(u)) / 2j
    _, vectors = np.linalg.eigh((k + dagger(k)) / 2)
    return vectors


def unitary_eigphases(
    u: MatrixLike,
    tol: float = DEFAULT_TOL,
    phase_tol: float = PHASE_TOL,
) -> models.UnitaryOperator:
    """
    Diagonalize a unitary.

    Eigenphases are sorted ascending, ties broken by the imaginary part of the eigenvalue;
    eigenvectors of degenerate phases are orthonormalized in input order.

    :param ndarray|list u: the unitary matrix
    :param float tol: unitarity tolerance
    :param float phase_tol: tolerance used to group degenerate phases
    :rtype: UnitaryOperator
    :return: the diagonalized unitary
    :raises NotUnitaryError: if u is not unitary within tol
    :raises NoConvergenceError: if no orthonormal eigenbasis reproduces u
    """
    u = as_matrix(u)
    if not is_unitary(u, tol):
        raise errors.NotUnitaryError("Matrix is not unitary within tolerance")
    try:
        eigenvalues, vectors = np.linalg.eig(u)
    except np.linalg.LinAlgError as lae:
        raise errors.NoConvergenceError(f"Eigensolver failed: {lae}") from lae
    phases = principal_phases(eigenvalues, phase_tol)
    order = np.lexsort((eigenvalues.imag, phases))
    phases = phases[order]
    vectors = _orthonormalize_groups(phases, vectors[:, order], phase_tol)
    if _eig_residual(u, phases, vectors) > np.sqrt(tol):
        logger.debug("Falling back to the Hermitian pencil eigenvectors")
        vectors = _pencil_eig(u)
        eigenvalues = np.einsum("ji,jk,ki->i", np.conj(vectors), u, vectors)
        phases = principal_phases(eigenvalues, phase_tol)
        order = np.lexsort((eigenvalues.imag, phases))
        phases, vectors = phases[order], vectors[:, order]
        if _eig_residual(u, phases, vectors) > np.sqrt(tol):
            raise errors.NoConvergenceError("Could not find an orthonormal eigenbasis")
    return models.UnitaryOperator(
        matrix=u,
        eigenphases=phases,
        eigenvectors=_canonical_columns(vectors),
    )


def unitary_root(u: models.UnitaryOperator, k: int) -> np.ndarray:
    """
    Principal k-th root: every eigenvalue exp(-i * alpha) becomes exp(-i * alpha / k).

    :param UnitaryOperator u: the unitary
    :param int k: the order of the root
    :rtype: ndarray
    :return: the root matrix
    """
    if k < 1:
        raise errors.BadDimensionError(f"Root order must be positive, got {k}")
    if k == 1:
        return u.matrix.copy()
    vectors = u.eigenvectors
    return (vectors * np.exp(-1j * u.eigenphases / k)) @ dagger(vectors)


def kron(a: MatrixLike, b: MatrixLike) -> np.ndarray:
    """
    Kronecker product.

    :param ndarray|list a: left factor
    :param ndarray|list b: right factor
    :rtype: ndarray
    :return: the product
    :raises DimensionOverflowError: if the result exceeds the supported dimension
    """
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if a.shape[0] * b.shape[0] > MAX_DIM:
        raise errors.DimensionOverflowError(
            f"Product dimension {a.shape[0] * b.shape[0]} exceeds {MAX_DIM}"
        )
    return np.kron(a, b)


def kron_power(a: MatrixLike, n: int) -> np.ndarray:
    """n-fold Kronecker power of a."""
    ret = np.ones((1, 1), dtype=complex)
    for _ in range(n):
        ret = kron(ret, a)
    return ret


def cyclic_shift(d: int) -> np.ndarray:
    """The permutation unitary |n> -> |n + 1 mod d>."""
    return np.roll(np.eye(d, dtype=complex), 1, axis=0)


def random_unitary(d: int, rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """
    Haar-random unitary from the QR decomposition of a complex Ginibre matrix.

    :param int d: the dimension
    :param Generator|None rng: the random generator
    :rtype: ndarray
    """
    rng = rng or np.random.default_rng()
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def random_hermitian(
    d: int,
    rng: Optional[np.random.Generator] = None,
    scale: float = 1.0,
) -> models.HermitianOperator:
    """Random Hermitian operator with Gaussian entries of the given scale."""
    rng = rng or np.random.default_rng()
    a = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return hermitian_eig(scale * (a + dagger(a)) / 2)
