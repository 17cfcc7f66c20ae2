"""
Closed-form speed limits, the Hamiltonians saturating them, and the checks tying both together.

Times are reported as ``g / E`` where E is the mean energy Tr[H]/d - E_0 of the Hamiltonian.
"""
import logging
from typing import Optional
from typing import Sequence
from typing import Tuple
from typing import Union

import numpy as np
from basis_speed_limits import errors
from basis_speed_limits import linalg
from basis_speed_limits import models
from basis_speed_limits import states

CONSTRAINT_TOL = 1e-9

TRANSFORM_TOL = 1e-9

OPTIMAL_KINDS = (
    "qutrit_plus",
    "qutrit_tilde",
    "two_qubit",
    "nqubit_hadamard",
    "pure_state",
)

logger = logging.getLogger(__name__)


def _check_energy(energy: float) -> None:
    if not energy > 0:
        raise errors.ZeroDenominatorError(f"Mean energy must be positive, got {energy}")


def _report(
    g: float,
    energy: float,
    kind: models.BoundKind = models.BoundKind.LOWER,
    tight: models.Tightness = models.Tightness.TIGHT,
    source: str = "",
    note: str = "",
) -> models.BoundReport:
    _check_energy(energy)
    return models.BoundReport(
        bound_value=g / energy,
        kind=kind,
        tight=tight,
        g_constant=g,
        source=source,
        note=note,
    )


def mean_energy(h: models.HermitianOperator) -> float:
    """
    Mean energy above the ground state, Tr[H]/d - E_0.

    :param HermitianOperator h: the Hamiltonian
    :rtype: float
    """
    return float(np.mean(h.eigenvalues) - h.e_min)


def _bloch_array(r: Sequence[float]) -> np.ndarray:
    r = np.asarray(r, dtype=float)
    if r.shape != (3,):
        raise errors.NotQubitError(f"Bloch vectors have three components, got {r.shape}")
    if np.linalg.norm(r) == 0:
        raise errors.ZeroBlochVectorError("Bloch vector has zero length")
    return r


def _bloch_cosine(r0: np.ndarray, r1: np.ndarray) -> float:
    return float(np.clip(np.dot(r0, r1) / (np.linalg.norm(r0) * np.linalg.norm(r1)), -1.0, 1.0))


def qubit_transition_bound(
    r0: Sequence[float],
    r1: Sequence[float],
    energy: float,
) -> models.BoundReport:
    """
    Shortest time between two qubit states given by their Bloch vectors.

    :param BlochVector|tuple r0: initial Bloch vector
    :param BlochVector|tuple r1: final Bloch vector
    :param float energy: the mean energy
    :rtype: BoundReport
    :raises ZeroBlochVectorError: if a Bloch vector vanishes
    """
    r0, r1 = _bloch_array(r0), _bloch_array(r1)
    g = np.arccos(_bloch_cosine(r0, r1)) / 2
    return _report(g, energy, source="qubit transition bound")


def _orthogonal_axis(r: np.ndarray) -> np.ndarray:
    """Lowest-index coordinate axis orthogonal to r, otherwise r x e_k for the lowest usable k."""
    axes = np.eye(3)
    for axis in axes:
        if np.dot(axis, r) == 0:
            return axis
    for axis in axes:
        cross = np.cross(r, axis)
        norm = np.linalg.norm(cross)
        if norm > 1e-12 * np.linalg.norm(r):
            return cross / norm
    raise errors.ZeroBlochVectorError("No axis orthogonal to a zero vector")


def transition_axis(
    r0: Sequence[float],
    r1: Sequence[float],
    allow_parallel: bool = True,
) -> np.ndarray:
    """
    Rotation axis carrying r0 onto the direction of r1.

    :param BlochVector|tuple r0: initial Bloch vector
    :param BlochVector|tuple r1: final Bloch vector
    :param bool allow_parallel: choose an axis deterministically when r0 and r1 are parallel
    :rtype: ndarray
    :return: the unit axis
    :raises ParallelVectorsError: if the vectors are parallel and allow_parallel is False
    """
    r0, r1 = _bloch_array(r0), _bloch_array(r1)
    cross = np.cross(r0, r1)
    norm = np.linalg.norm(cross)
    if norm > 1e-12 * np.linalg.norm(r0) * np.linalg.norm(r1):
        return cross / norm
    if not allow_parallel:
        raise errors.ParallelVectorsError("Bloch vectors are parallel, the axis is not unique")
    return _orthogonal_axis(r0)


def qubit_hamiltonian(axis: Sequence[float], energy: float) -> models.HermitianOperator:
    """The Hamiltonian E n.sigma + E, with ground energy 0 and mean energy E."""
    n = np.asarray(axis, dtype=float)
    return linalg.hermitian_eig(
        energy * sum(c * s for c, s in zip(n, states.PAULIS)) + energy * np.eye(2)
    )


def optimal_qubit_hamiltonian(
    r0: Sequence[float],
    r1: Sequence[float],
    energy: float,
    allow_parallel: bool = True,
) -> models.HermitianOperator:
    """
    Hamiltonian reaching the direction of r1 from r0 in the shortest time.

    :param BlochVector|tuple r0: initial Bloch vector
    :param BlochVector|tuple r1: final Bloch vector
    :param float energy: the mean energy
    :param bool allow_parallel: choose an axis deterministically when r0 and r1 are parallel
    :rtype: HermitianOperator
    """
    _check_energy(energy)
    return qubit_hamiltonian(transition_axis(r0, r1, allow_parallel), energy)


def mixed_qubit_bound(
    rho0: Union[np.ndarray, Sequence],
    rho1: Union[np.ndarray, Sequence],
    energy: float,
) -> models.BoundReport:
    """
    Qubit transition bound written with traces of the density matrices.

    :param ndarray rho0: initial qubit state
    :param ndarray rho1: final qubit state
    :param float energy: the mean energy
    :rtype: BoundReport
    :raises MaximallyMixedInputError: if either state is maximally mixed
    """
    for rho in (rho0, rho1):
        states.bloch_from_state(rho)
    rho0, rho1 = np.asarray(rho0, dtype=complex), np.asarray(rho1, dtype=complex)
    p0 = 2 * np.real(np.trace(rho0 @ rho0)) - 1
    p1 = 2 * np.real(np.trace(rho1 @ rho1)) - 1
    if p0 <= 1e-15 or p1 <= 1e-15:
        raise errors.MaximallyMixedInputError("Bound is undefined for the maximally mixed state")
    cosine = (2 * np.real(np.trace(rho0 @ rho1)) - 1) / np.sqrt(p0 * p1)
    g = np.arccos(np.clip(cosine, -1.0, 1.0)) / 2
    return _report(g, energy, source="qubit transition bound (density matrices)")


def _state_pair(psi0, psi1) -> Tuple[np.ndarray, np.ndarray]:
    psi0 = states._as_vector(psi0)
    psi1 = states._as_vector(psi1)
    if psi0.shape != psi1.shape:
        raise errors.DimMismatchError(f"Dimensions differ: {psi0.shape[0]} != {psi1.shape[0]}")
    return psi0, psi1


def pure_state_bound(
    psi0: Union[np.ndarray, Sequence[complex]],
    psi1: Union[np.ndarray, Sequence[complex]],
    energy: float,
    mode: str = "mean_energy",
) -> models.BoundReport:
    """
    Shortest time between two pure states.

    In ``mean_energy`` mode the time is arccos(2|<psi0|psi1>|^2 - 1)/(dE) and it is attained;
    in ``gap`` mode the energy is the spectral gap and the time is arccos(...)/E_gap.

    :param ndarray psi0: initial state
    :param ndarray psi1: final state
    :param float energy: the mean energy or the gap, depending on the mode
    :param str mode: mean_energy or gap
    :rtype: BoundReport
    :raises DimMismatchError: if the states live in different dimensions
    :raises BadKindError: if the mode is unknown
    """
    psi0, psi1 = _state_pair(psi0, psi1)
    overlap = abs(np.vdot(psi0, psi1)) ** 2
    angle = np.arccos(np.clip(2 * overlap - 1, -1.0, 1.0))
    if mode == "mean_energy":
        return _report(angle / len(psi0), energy, source="pure state bound (mean energy)")
    if mode == "gap":
        return _report(
            angle,
            energy,
            tight=models.Tightness.UNKNOWN,
            source="pure state bound (energy gap)",
        )
    raise errors.BadKindError(f"Unknown mode '{mode}', expected mean_energy or gap")


def pure_state_hamiltonian(
    psi0: Union[np.ndarray, Sequence[complex]],
    psi1: Union[np.ndarray, Sequence[complex]],
) -> models.HermitianOperator:
    """
    Rank-one projector |phi><phi| carrying psi0 to psi1 at t = arccos(2|<psi0|psi1>|^2 - 1).

    phi = (psi0 + i e^{-i gamma} e1)/sqrt(2), where gamma is the phase of <psi0|psi1> and e1
    the normalized part of psi1 orthogonal to psi0.

    :param ndarray psi0: initial state
    :param ndarray psi1: final state
    :rtype: HermitianOperator
    """
    psi0, psi1 = _state_pair(psi0, psi1)
    overlap = np.vdot(psi0, psi1)
    rest = psi1 - overlap * psi0
    norm = np.linalg.norm(rest)
    if norm < 1e-12:
        return linalg.hermitian_eig(np.outer(psi0, psi0.conjugate()))
    gamma = np.angle(overlap) if abs(overlap) > 1e-15 else 0.0
    phi = (psi0 + 1j * np.exp(-1j * gamma) * rest / norm) / np.sqrt(2)
    return linalg.hermitian_eig(np.outer(phi, phi.conjugate()))


def pure_state_time(
    psi0: Union[np.ndarray, Sequence[complex]],
    psi1: Union[np.ndarray, Sequence[complex]],
) -> float:
    """Evolution time of pure_state_hamiltonian."""
    psi0, psi1 = _state_pair(psi0, psi1)
    return float(np.arccos(np.clip(2 * abs(np.vdot(psi0, psi1)) ** 2 - 1, -1.0, 1.0)))


def fmin(h: models.HermitianOperator, t: float) -> Tuple[float, np.ndarray]:
    """
    Smallest survival amplitude min_psi |<psi|exp(-iHt)|psi>| and the state reaching it.

    :param HermitianOperator h: the Hamiltonian
    :param float t: the time, at most pi/E_gap
    :rtype: tuple
    :return: the value 1/2 |exp(-i E_gap t) + 1| and (|E_0> + |E_{d-1}>)/sqrt(2)
    :raises TimeOutOfRangeError: if t is outside [0, pi/E_gap]
    """
    if h.dim < 2:
        raise errors.BadDimensionError("The minimizing state needs at least two levels")
    if t < 0 or h.e_gap * t > np.pi + 1e-12:
        raise errors.TimeOutOfRangeError(f"Time {t} is outside [0, pi/E_gap]")
    value = abs(np.exp(-1j * h.e_gap * t) + 1) / 2
    psi = (h.eigenvectors[:, 0] + h.eigenvectors[:, -1]) / np.sqrt(2)
    return float(value), psi


def general_unbiased_bound(d: int, energy: float) -> models.BoundReport:
    """
    Strict lower bound pi(d-1)/(4dE) valid for every dimension.

    :param int d: the dimension
    :param float energy: the mean energy
    :rtype: BoundReport
    """
    if d < 2:
        raise errors.BadDimensionError(f"Unbiased bases need d >= 2, got {d}")
    return _report(
        np.pi * (d - 1) / (4 * d),
        energy,
        tight=models.Tightness.NOT_TIGHT,
        source="general unbiased bound",
        note="strict inequality",
    )


def d6_refined_constant() -> float:
    """The constant arccos((4 - sqrt(6))/2)/3 of the six-dimensional refinement."""
    return float(np.arccos((4 - np.sqrt(6)) / 2) / 3)


def unbiased_bound(d: int, energy: float) -> models.BoundReport:
    """
    Best known lower bound on the time to create an unbiased basis from the computational one.

    :param int d: the dimension
    :param float energy: the mean energy
    :rtype: BoundReport
    :raises BadDimensionError: if d < 2
    """
    if d < 2:
        raise errors.BadDimensionError(f"Unbiased bases need d >= 2, got {d}")
    if d == 2:
        return _report(np.pi / 4, energy, source="qubit unbiased bound")
    if d == 3:
        return _report(
            2 * np.pi / 9,
            energy,
            source="qutrit unbiased bound",
            note="tight for the plus class only",
        )
    if d == 4:
        return _report(np.pi / 4, energy, source="two-qubit unbiased bound")
    if d == 6:
        return _report(
            d6_refined_constant(),
            energy,
            tight=models.Tightness.UNKNOWN,
            source="six-dimensional refinement",
        )
    return general_unbiased_bound(d, energy)


def qutrit_tilde_bound(energy: float) -> models.BoundReport:
    """
    Conjectured tight bound 4pi/(9E) for the tilde qutrit class.

    :param float energy: the mean energy
    :rtype: BoundReport
    """
    return _report(
        4 * np.pi / 9,
        energy,
        tight=models.Tightness.UNKNOWN,
        source="qutrit tilde bound",
        note="numerical evidence only, sampled excess at most 1e-5",
    )


def noninteracting_time(n: int, energy: float) -> float:
    """Time n pi/(4E) taken when each of n qubits is rotated on its own."""
    _check_energy(energy)
    return n * np.pi / (4 * energy)


def nqubit_upper_bound(n: int, energy: float) -> models.BoundReport:
    """
    Upper bound pi/(2E) from the n-fold Hadamard Hamiltonian.

    The non-interacting time n pi/(4E) is reported in the note.

    :param int n: number of qubits
    :param float energy: the mean energy
    :rtype: BoundReport
    """
    if n < 1:
        raise errors.BadDimensionError(f"Need at least one qubit, got {n}")
    return _report(
        np.pi / 2,
        energy,
        kind=models.BoundKind.UPPER,
        tight=models.Tightness.UNKNOWN,
        source="n-qubit Hadamard upper bound",
        note=f"non-interacting time {noninteracting_time(n, energy):.17g}",
    )


def perm_bound(d: int, energy: float) -> models.BoundReport:
    """
    Lower bound pi(d-1)/(dE) on permuting a basis cyclically.

    :param int d: the dimension
    :param float energy: the mean energy
    :rtype: BoundReport
    """
    if d < 2:
        raise errors.BadDimensionError(f"Permutations need d >= 2, got {d}")
    return _report(
        np.pi * (d - 1) / d,
        energy,
        source="basis permutation bound",
        note="either attained at t = pi(d-1)/(dE) or the Hamiltonian never permutes the basis",
    )


def perm_eigenphase_sum(d: int) -> float:
    """Sum of the cyclic shift eigenphases taken in [0, 2pi), which equals pi(d-1)."""
    shift = linalg.unitary_eigphases(linalg.cyclic_shift(d))
    phases = np.mod(shift.eigenphases, 2 * np.pi)
    # a phase of 2pi - eps is the zero phase
    phases = np.where(phases > 2 * np.pi - linalg.PHASE_TOL, 0.0, phases)
    return float(np.sum(phases))


def constraint_check(
    h: models.HermitianOperator,
    t: float,
    tol: float = CONSTRAINT_TOL,
) -> Tuple[float, bool]:
    """
    Necessary condition |sum_i cos(E_i t)| <= sqrt(d) for creating an unbiased basis.

    :param HermitianOperator h: the Hamiltonian
    :param float t: the time
    :param float tol: tolerance
    :rtype: tuple
    :return: the value and whether the condition holds
    """
    value = float(np.sum(np.cos(h.eigenvalues * t)))
    return value, abs(value) <= np.sqrt(h.dim) + tol


def _alpha(sign: int) -> np.ndarray:
    return np.array([1, np.exp(sign * 2j * np.pi / 3), 1], dtype=complex) / np.sqrt(3)


def two_qubit_hamiltonian() -> np.ndarray:
    """-sx(x)sz + sy(x)sy - sz(x)sx."""
    sx, sy, sz = states.PAULIS
    return -linalg.kron(sx, sz) + linalg.kron(sy, sy) - linalg.kron(sz, sx)


def construct_optimal(
    kind: str,
    n: int = 1,
    psi0: Optional[Sequence[complex]] = None,
    psi1: Optional[Sequence[complex]] = None,
) -> models.HermitianOperator:
    """
    Build one of the Hamiltonians attaining a speed limit.

    :param str kind: qutrit_plus, qutrit_tilde, two_qubit, nqubit_hadamard or pure_state
    :param int n: number of qubits for nqubit_hadamard
    :param ndarray|None psi0: initial state for pure_state
    :param ndarray|None psi1: final state for pure_state
    :rtype: HermitianOperator
    :raises BadKindError: if the kind is unknown or its parameters are missing
    """
    if kind == "qutrit_plus":
        alpha = _alpha(-1)
        return linalg.hermitian_eig(np.outer(alpha, alpha.conjugate()))
    if kind == "qutrit_tilde":
        alpha = _alpha(1)
        return linalg.hermitian_eig(-np.outer(alpha, alpha.conjugate()))
    if kind == "two_qubit":
        return linalg.hermitian_eig(two_qubit_hamiltonian())
    if kind == "nqubit_hadamard":
        if n < 1:
            raise errors.BadDimensionError(f"Need at least one qubit, got {n}")
        return linalg.hermitian_eig(linalg.kron_power(states.HADAMARD, n))
    if kind == "pure_state":
        if psi0 is None or psi1 is None:
            raise errors.BadKindError("Kind 'pure_state' needs psi0 and psi1")
        return pure_state_hamiltonian(psi0, psi1)
    raise errors.BadKindError(f"Unknown kind '{kind}', expected one of {OPTIMAL_KINDS}")


def two_qubit_target() -> models.OrderedBasis:
    """The product basis |++>, |-+>, |+->, |--> reached by the two-qubit Hamiltonian."""
    plus = np.array([1, 1], dtype=complex) / np.sqrt(2)
    minus = np.array([1, -1], dtype=complex) / np.sqrt(2)
    order = ((plus, plus), (minus, plus), (plus, minus), (minus, minus))
    return models.OrderedBasis(columns=np.stack([np.kron(a, b) for a, b in order], axis=1))


def saturation_case(
    kind: str,
    n: int = 1,
) -> Tuple[models.HermitianOperator, float, models.OrderedBasis, models.OrderedBasis]:
    """
    A known optimal transformation: the Hamiltonian, its time, source and target bases.

    The time is the Et constant of the bound divided by the actual mean energy.

    :param str kind: qutrit_plus, qutrit_tilde, two_qubit or nqubit_hadamard
    :param int n: number of qubits for nqubit_hadamard
    :rtype: tuple
    """
    h = construct_optimal(kind, n=n)
    if kind == "qutrit_plus":
        et, target = 2 * np.pi / 9, states.standard_basis("qutrit_plus", 3)
    elif kind == "qutrit_tilde":
        et, target = 4 * np.pi / 9, states.standard_basis("qutrit_tilde", 3)
    elif kind == "two_qubit":
        et, target = np.pi / 4, two_qubit_target()
    elif kind == "nqubit_hadamard":
        et, target = np.pi / 2, states.standard_basis("hadamard_n", n)
    else:
        raise errors.BadKindError(f"No saturation case for kind '{kind}'")
    return h, et / mean_energy(h), states.standard_basis("computational", h.dim), target


def achieves_transform(
    h: models.HermitianOperator,
    t: float,
    src: models.OrderedBasis,
    dst: models.OrderedBasis,
    tol: float = TRANSFORM_TOL,
) -> models.TransformCheck:
    """
    Check exp(-iHt) src_j = e^{i phi_j} dst_j for every j.

    :param HermitianOperator h: the Hamiltonian
    :param float t: the time
    :param OrderedBasis src: the source basis
    :param OrderedBasis dst: the target basis
    :param float tol: tolerance on 1 - |<dst_j|U|src_j>|
    :rtype: TransformCheck
    :raises DimMismatchError: if the dimensions differ
    """
    if not h.dim == src.dim == dst.dim:
        raise errors.DimMismatchError(f"Dimensions differ: {h.dim}, {src.dim}, {dst.dim}")
    u = linalg.mat_exp(h, t).matrix
    overlaps = np.einsum("ij,ik,kj->j", dst.columns.conjugate(), u, src.columns)
    column_errors = np.abs(1 - np.abs(overlaps))
    max_error = float(np.max(column_errors))
    return models.TransformCheck(
        achieved=max_error <= tol,
        max_column_error=max_error,
        recovered_phases=np.angle(overlaps),
    )


def conjugate_hamiltonian(
    h: models.HermitianOperator,
    v: Union[np.ndarray, Sequence],
    tol: float = linalg.DEFAULT_TOL,
) -> models.HermitianOperator:
    """
    Rotate a Hamiltonian by a diagonal unitary, H' = V H V^dagger.

    :param HermitianOperator h: the Hamiltonian
    :param ndarray|list v: the diagonal unitary, as a matrix or as its diagonal
    :param float tol: tolerance for the diagonal and unit-modulus tests
    :rtype: HermitianOperator
    :raises NotDiagonalUnitaryError: if v is not a diagonal unitary of the right size
    """
    v = np.asarray(v, dtype=complex)
    if v.ndim == 2:
        if v.shape[0] != v.shape[1] or np.max(np.abs(v - np.diag(np.diagonal(v)))) > tol:
            raise errors.NotDiagonalUnitaryError("Matrix is not diagonal")
        v = np.diagonal(v)
    if v.shape != (h.dim,) or np.max(np.abs(np.abs(v) - 1)) > tol:
        raise errors.NotDiagonalUnitaryError("Diagonal entries must be unit-modulus phases")
    return linalg.hermitian_eig(v[:, None] * h.matrix * v.conjugate()[None, :])


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    values, vectors = np.linalg.eigh((rho + linalg.dagger(rho)) / 2)
    return (vectors * np.sqrt(np.clip(values, 0, None))) @ linalg.dagger(vectors)


def state_fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity Tr sqrt(sqrt(rho) sigma sqrt(rho))."""
    root = _psd_sqrt(rho)
    values = np.linalg.eigvalsh(root @ sigma @ root)
    return float(np.clip(np.sum(np.sqrt(np.clip(values, 0, None))), 0.0, 1.0))


def reference_mixed_bound(
    rho: Union[np.ndarray, Sequence],
    sigma: Union[np.ndarray, Sequence],
    h: models.HermitianOperator,
) -> float:
    """
    Mixed-state bound arccos F(rho, sigma) / min{Delta E, E - E_0}.

    :param ndarray rho: initial state
    :param ndarray sigma: final state
    :param HermitianOperator h: the Hamiltonian
    :rtype: float
    :raises ZeroDenominatorError: if the energy spread or the mean energy vanishes
    """
    rho = states.check_density(rho)
    sigma = states.check_density(sigma)
    if not rho.shape[0] == sigma.shape[0] == h.dim:
        raise errors.DimMismatchError("State and Hamiltonian dimensions differ")
    first = float(np.real(np.trace(rho @ h.matrix)))
    second = float(np.real(np.trace(rho @ h.matrix @ h.matrix)))
    spread = np.sqrt(max(second - first**2, 0.0))
    above_ground = first - h.e_min
    denominator = min(spread, above_ground)
    if denominator <= 1e-15:
        raise errors.ZeroDenominatorError("Energy spread or mean energy of the state vanishes")
    return float(np.arccos(state_fidelity(rho, sigma)) / denominator)


def fidelity_curve(t_grid: Sequence[float]) -> np.ndarray:
    """
    Survival probability |<0|exp(-iHt)|0>|^2 of the optimal qutrit Hamiltonian on a time grid.

    :param list t_grid: the times
    :rtype: ndarray
    """
    h = construct_optimal("qutrit_plus")
    t = np.asarray(t_grid, dtype=float)
    weights = np.abs(h.eigenvectors[0]) ** 2
    amplitudes = np.exp(-1j * np.outer(t, h.eigenvalues)) @ weights
    return np.abs(amplitudes) ** 2
