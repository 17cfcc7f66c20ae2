"""
Bases, unbiasedness tests, qutrit basis classification, Bloch vectors and coherence measures.
"""
import logging
from typing import Optional
from typing import Sequence
from typing import Union

import numpy as np
from basis_speed_limits import errors
from basis_speed_limits import linalg
from basis_speed_limits import models

UNBIASED_TOL = 1e-9

PSD_TOL = 1e-10

NORM_TOL = 1e-10

OMEGA = np.exp(2j * np.pi / 3)

PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

HADAMARD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)

BASIS_KINDS = (
    "computational",
    "qutrit_plus",
    "qutrit_tilde",
    "fourier",
    "hadamard_n",
    "max_coherent_flat",
)

# columns of the two unbiased qutrit classes, up to the diagonal phase matrix V
_QUTRIT_PLUS = np.array(
    [
        [1, 1, 1],
        [OMEGA, 1, OMEGA.conjugate()],
        [OMEGA.conjugate(), 1, OMEGA],
    ],
    dtype=complex,
) / np.sqrt(3)

_QUTRIT_TILDE = _QUTRIT_PLUS[:, ::-1].copy()

_QUTRIT_TEMPLATES = {
    models.QutritClassTag.PLUS: _QUTRIT_PLUS,
    models.QutritClassTag.TILDE: _QUTRIT_TILDE,
}

logger = logging.getLogger(__name__)


def _as_vector(psi: Union[np.ndarray, Sequence[complex]], tol: float = NORM_TOL) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    norm = np.linalg.norm(psi)
    if abs(norm - 1) > tol:
        raise errors.NotNormalizedError(f"State has norm {norm:.12g}, expected 1")
    return psi


def make_basis(
    columns: Union[np.ndarray, Sequence],
    tol: float = linalg.DEFAULT_TOL,
) -> models.OrderedBasis:
    """
    Wrap a matrix of column vectors as an ordered basis.

    :param ndarray|list columns: the matrix whose j-th column is the j-th element
    :param float tol: orthonormality tolerance
    :rtype: OrderedBasis
    :return: the basis
    :raises NotUnitaryError: if the columns are not orthonormal
    """
    columns = linalg.as_matrix(columns)
    if not linalg.is_unitary(columns, tol):
        raise errors.NotUnitaryError("Basis columns are not orthonormal")
    return models.OrderedBasis(columns=columns)


def standard_basis(kind: str, d: int = 2) -> models.OrderedBasis:
    """
    Build one of the named bases.

    For ``hadamard_n`` the size argument is the number of qubits n and the dimension is 2^n.
    ``max_coherent_flat`` is the Fourier basis, whose first element is the flat maximally
    coherent state.

    :param str kind: the basis kind
    :param int d: the dimension, or the number of qubits for hadamard_n
    :rtype: OrderedBasis
    :return: the basis
    :raises BadKindError: if the kind is unknown
    :raises BadDimensionError: if the size is not positive
    :raises NotQutritError: if a qutrit kind is requested with d != 3
    """
    if kind not in BASIS_KINDS:
        raise errors.BadKindError(f"Unknown basis kind '{kind}', expected one of {BASIS_KINDS}")
    if d < 1:
        raise errors.BadDimensionError(f"Basis size must be positive, got {d}")
    if kind == "computational":
        columns = np.eye(d, dtype=complex)
    elif kind in ("qutrit_plus", "qutrit_tilde"):
        if d != 3:
            raise errors.NotQutritError(f"Basis '{kind}' is three-dimensional, got d={d}")
        columns = _QUTRIT_PLUS if kind == "qutrit_plus" else _QUTRIT_TILDE
    elif kind in ("fourier", "max_coherent_flat"):
        j, k = np.meshgrid(np.arange(d), np.arange(d), indexing="ij")
        columns = np.exp(2j * np.pi * j * k / d) / np.sqrt(d)
    else:
        columns = linalg.kron_power(HADAMARD, d)
    return models.OrderedBasis(columns=np.array(columns, dtype=complex))


def is_unbiased(
    b1: models.OrderedBasis,
    b2: models.OrderedBasis,
    tol: float = UNBIASED_TOL,
) -> bool:
    """
    Test whether every pair of elements has squared overlap 1/d.

    :param OrderedBasis b1: first basis
    :param OrderedBasis b2: second basis
    :param float tol: tolerance on the squared overlaps
    :rtype: bool
    :return: whether the bases are mutually unbiased
    :raises DimMismatchError: if the dimensions differ
    """
    if b1.dim != b2.dim:
        raise errors.DimMismatchError(f"Dimensions differ: {b1.dim} != {b2.dim}")
    overlaps = np.abs(linalg.dagger(b1.columns) @ b2.columns) ** 2
    return bool(np.max(np.abs(overlaps - 1 / b1.dim)) <= tol)


def qutrit_phase_condition(b: models.OrderedBasis) -> float:
    """
    Largest defect of |1 + e^{i(a_k1 - a_l1)} + e^{i(a_k2 - a_l2)}| = 3 delta_kl.

    The phases a_kn are read from the columns normalized by their first entry.

    :param OrderedBasis b: a qutrit basis unbiased to the computational one
    :rtype: float
    :return: the maximal defect over all pairs (k, l)
    """
    normalized = np.sqrt(3) * b.columns / b.columns[0]
    gram = np.abs(linalg.dagger(normalized) @ normalized)
    return float(np.max(np.abs(gram - 3 * np.eye(3))))


def classify_qutrit_unbiased(
    b: models.OrderedBasis,
    tol: float = UNBIASED_TOL,
) -> models.QutritClass:
    """
    Classify an unbiased qutrit basis as V times the plus or the tilde basis.

    Every column is divided by its first entry, which leaves V's phases on the diagonal; both
    templates are then tested against the column phases.

    :param OrderedBasis b: the basis
    :param float tol: unbiasedness tolerance
    :rtype: QutritClass
    :return: the class, V's two free phases and the per-element phases
    :raises NotQutritError: if the basis is not three-dimensional
    :raises NotUnbiasedError: if the basis is not unbiased to the computational basis
    """
    if b.dim != 3:
        raise errors.NotQutritError(f"Expected a qutrit basis, got d={b.dim}")
    if not is_unbiased(standard_basis("computational", 3), b, tol):
        raise errors.NotUnbiasedError("Basis is not unbiased to the computational basis")
    element_phases = np.angle(b.columns[0] * np.sqrt(3))
    relative = b.columns * np.sqrt(3) * np.exp(-1j * element_phases)
    best = None
    for tag, template in _QUTRIT_TEMPLATES.items():
        # every column of relative equals V times the template column
        v = relative / (template * np.sqrt(3))
        v_phases = np.angle(np.mean(v, axis=1))
        defect = float(np.max(np.abs(v - np.exp(1j * v_phases)[:, None])))
        logger.debug("Template %s defect %.3e", tag.value, defect)
        if best is None or defect < best[1]:
            best = (tag, defect, v_phases)
    tag, defect, v_phases = best
    if defect > np.sqrt(tol):
        raise errors.NotUnbiasedError(f"Basis matches no qutrit class (defect {defect:.3e})")
    return models.QutritClass(
        class_tag=tag,
        diagonal_phases=tuple(float(p) for p in linalg.wrap_phase(v_phases[1:] - v_phases[0])),
        element_phases=tuple(float(p) for p in linalg.wrap_phase(element_phases + v_phases[0])),
    )


def qutrit_basis(
    class_tag: models.QutritClassTag,
    diagonal_phases: Sequence[float] = (0.0, 0.0),
    element_phases: Sequence[float] = (0.0, 0.0, 0.0),
) -> models.OrderedBasis:
    """
    Build V times the class basis times per-element phases, the inverse of the classifier.

    :param QutritClassTag class_tag: the class
    :param tuple diagonal_phases: the phases of V on |1> and |2>
    :param tuple element_phases: the global phase of each element
    :rtype: OrderedBasis
    """
    v = np.exp(1j * np.concatenate(([0.0], np.asarray(diagonal_phases, dtype=float))))
    template = _QUTRIT_TEMPLATES[models.QutritClassTag(class_tag)]
    columns = v[:, None] * template * np.exp(1j * np.asarray(element_phases, dtype=float))
    return models.OrderedBasis(columns=columns)


def pure_density(psi: Union[np.ndarray, Sequence[complex]]) -> np.ndarray:
    """Density matrix |psi><psi| of a normalized state."""
    psi = _as_vector(psi)
    return np.outer(psi, psi.conjugate())


def check_density(rho: Union[np.ndarray, Sequence], tol: float = PSD_TOL) -> np.ndarray:
    """
    Validate a density matrix.

    :param ndarray|list rho: the candidate
    :param float tol: tolerance for hermiticity, trace and positivity
    :rtype: ndarray
    :return: rho as a complex matrix
    :raises NotDensityMatrixError: if rho is not Hermitian, unit trace and positive
    """
    try:
        rho = linalg.as_matrix(rho)
    except errors.DimensionOverflowError as doe:
        raise errors.NotDensityMatrixError(str(doe)) from doe
    if np.max(np.abs(rho - linalg.dagger(rho))) > tol:
        raise errors.NotDensityMatrixError("Density matrix is not Hermitian")
    trace = np.trace(rho)
    if abs(trace - 1) > tol:
        raise errors.NotDensityMatrixError(f"Density matrix has trace {trace.real:.12g}")
    smallest = np.linalg.eigvalsh((rho + linalg.dagger(rho)) / 2)[0]
    if smallest < -tol:
        raise errors.NotDensityMatrixError(f"Density matrix has eigenvalue {smallest:.3e}")
    return rho


def l1_coherence(rho: Union[np.ndarray, Sequence], tol: float = PSD_TOL) -> float:
    """
    Sum of the moduli of the off-diagonal entries.

    :param ndarray|list rho: the density matrix
    :param float tol: validation tolerance
    :rtype: float
    :return: the l1 coherence
    :raises NotDensityMatrixError: if rho is not a density matrix
    """
    rho = check_density(rho, tol)
    return float(np.sum(np.abs(rho)) - np.sum(np.abs(np.diagonal(rho))))


def bloch_from_state(
    rho: Union[np.ndarray, Sequence],
    tol: float = PSD_TOL,
) -> models.BlochVector:
    """
    Bloch vector r_k = Tr[rho sigma_k] of a qubit state.

    :param ndarray|list rho: the qubit density matrix
    :param float tol: validation tolerance
    :rtype: BlochVector
    :raises NotQubitError: if rho is not 2x2
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (2, 2):
        raise errors.NotQubitError(f"Expected a qubit density matrix, got shape {rho.shape}")
    rho = check_density(rho, tol)
    return models.BlochVector(*(float(np.real(np.trace(rho @ s))) for s in PAULIS))


def state_from_bloch(r: Sequence[float]) -> np.ndarray:
    """
    Qubit density matrix (1 + r.sigma)/2.

    :param BlochVector|tuple r: the Bloch vector
    :rtype: ndarray
    :raises NotQubitError: if r is not three-dimensional or longer than 1
    """
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise errors.NotQubitError(f"Bloch vectors have three components, got {r.shape}")
    if np.linalg.norm(r) > 1 + 1e-12:
        raise errors.NotQubitError(f"Bloch vector is longer than 1: {np.linalg.norm(r):.12g}")
    return (np.eye(2) + sum(c * s for c, s in zip(r, PAULIS))) / 2


def state_from_angles(theta: float, phi: float) -> np.ndarray:
    """Pure qubit state cos(theta/2)|0> + e^{i phi} sin(theta/2)|1>."""
    return np.array([np.cos(theta / 2), np.exp(1j * phi) * np.sin(theta / 2)], dtype=complex)


def bloch_norm(r: Sequence[float]) -> float:
    return float(np.linalg.norm(np.asarray(r, dtype=float)))


def max_coherent_state(d: int, phases: Optional[Sequence[float]] = None) -> np.ndarray:
    """
    The maximally coherent state (1/sqrt(d)) sum_j e^{i phi_j}|j>.

    :param int d: the dimension
    :param list|None phases: the phases phi_j, all zero when omitted
    :rtype: ndarray
    """
    phases = np.zeros(d) if phases is None else np.asarray(phases, dtype=float)
    if phases.shape != (d,):
        raise errors.DimMismatchError(f"Expected {d} phases, got {phases.shape}")
    return np.exp(1j * phases) / np.sqrt(d)


def max_mc_overlap(psi: Union[np.ndarray, Sequence[complex]]) -> float:
    """
    Largest squared overlap of psi with any maximally coherent state: (sum_j |psi_j|)^2 / d.

    :param ndarray|list psi: the normalized state
    :rtype: float
    :raises NotNormalizedError: if psi is not normalized
    """
    psi = _as_vector(psi)
    return float(np.sum(np.abs(psi)) ** 2 / len(psi))
