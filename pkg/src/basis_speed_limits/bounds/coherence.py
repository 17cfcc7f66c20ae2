"""
Coherence generation limits for a qubit, and the pure-state limit towards maximally coherent
states.

The incoherent basis is the computational one, so the l1 coherence of a qubit is the length of
the Bloch vector's projection onto the equatorial plane.
"""
import logging
from typing import Sequence
from typing import Union

import numpy as np
from basis_speed_limits import bounds
from basis_speed_limits import errors
from basis_speed_limits import models
from basis_speed_limits import states

logger = logging.getLogger(__name__)


def _bloch_of(rho: Union[np.ndarray, Sequence]) -> np.ndarray:
    r = np.array(states.bloch_from_state(rho), dtype=float)
    if np.linalg.norm(r) <= 1e-15:
        raise errors.ZeroBlochVectorError("The maximally mixed state has no Bloch direction")
    return r


def _elevation(r: np.ndarray) -> float:
    return float(np.arcsin(min(abs(r[2]) / np.linalg.norm(r), 1.0)))


def coherence_max_qubit(rho: Union[np.ndarray, Sequence], energy: float, t: float) -> float:
    """
    Largest l1 coherence reachable at time t: |r| cos(arcsin(|r_z|/|r|) - 2Et).

    The value saturates at |r| once t exceeds t_mc.

    :param ndarray rho: the qubit state
    :param float energy: the mean energy
    :param float t: the time
    :rtype: float
    :raises ZeroBlochVectorError: if rho is maximally mixed
    """
    bounds._check_energy(energy)
    if t < 0:
        raise errors.TimeOutOfRangeError(f"Time must be non-negative, got {t}")
    r = _bloch_of(rho)
    radius = float(np.linalg.norm(r))
    remaining = _elevation(r) - 2 * energy * t
    if remaining <= 0:
        return radius
    return radius * float(np.cos(remaining))


def t_mc(rho: Union[np.ndarray, Sequence], energy: float) -> float:
    """
    Time to reach the maximal coherence |r|: arcsin(|r_z|/|r|)/(2E).

    :param ndarray rho: the qubit state
    :param float energy: the mean energy
    :rtype: float
    """
    bounds._check_energy(energy)
    return _elevation(_bloch_of(rho)) / (2 * energy)


def mc_speed_limit(
    psi: Union[np.ndarray, Sequence[complex]],
    energy: float,
) -> models.BoundReport:
    """
    Shortest time from psi to any maximally coherent state.

    :param ndarray psi: the normalized state
    :param float energy: the mean energy
    :rtype: BoundReport
    :raises NotNormalizedError: if psi is not normalized
    """
    overlap = states.max_mc_overlap(psi)
    d = len(np.asarray(psi).reshape(-1))
    angle = np.arccos(np.clip(2 * overlap - 1, -1.0, 1.0))
    return bounds._report(angle / d, energy, source="maximally coherent state bound")


def optimal_coherence_axis(r: Sequence[float], tol: float = 1e-12) -> np.ndarray:
    """
    Rotation axis moving r towards the equatorial plane along a meridian.

    Vectors on the plane keep their coherence under rotations about z.

    :param BlochVector|tuple r: the Bloch vector
    :param float tol: tolerance for the on-plane and on-axis cases
    :rtype: ndarray
    """
    r = np.asarray(r, dtype=float)
    radius = np.linalg.norm(r)
    if radius == 0:
        raise errors.ZeroBlochVectorError("Bloch vector has zero length")
    if abs(r[2]) <= tol * radius:
        return np.array([0.0, 0.0, 1.0])
    cross = np.cross([0.0, 0.0, 1.0], r)
    norm = np.linalg.norm(cross)
    if norm <= tol * radius:
        return np.array([1.0, 0.0, 0.0])
    return np.sign(r[2]) * cross / norm


def optimal_coherence_hamiltonian(
    rho: Union[np.ndarray, Sequence],
    energy: float,
) -> models.HermitianOperator:
    """
    Hamiltonian E n.sigma + E attaining coherence_max_qubit up to t_mc.

    :param ndarray rho: the qubit state
    :param float energy: the mean energy
    :rtype: HermitianOperator
    """
    bounds._check_energy(energy)
    return bounds.qubit_hamiltonian(optimal_coherence_axis(_bloch_of(rho)), energy)


def rotate_bloch(r: Sequence[float], axis: Sequence[float], angle: float) -> np.ndarray:
    """
    Right-handed rotation of a Bloch vector (Rodrigues' formula).

    Evolving with E n.sigma for time t rotates by 2Et about n.

    :param tuple r: the Bloch vector
    :param tuple axis: the unit rotation axis
    :param float angle: the angle
    :rtype: ndarray
    """
    r = np.asarray(r, dtype=float)
    n = np.asarray(axis, dtype=float)
    return (
        r * np.cos(angle)
        + np.cross(n, r) * np.sin(angle)
        + n * np.dot(n, r) * (1 - np.cos(angle))
    )


def bloch_coherence(r: Sequence[float]) -> float:
    """l1 coherence of the qubit with Bloch vector r."""
    return float(np.hypot(r[0], r[1]))
