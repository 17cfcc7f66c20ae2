"""
Random-phase sampling of unitaries that map the computational basis onto a target basis.

Every unitary has the form U = sum_n e^{i phi_n} |dst_n><n|. For each one, the Hamiltonian with
the smallest Et is found by adding 2pi to a subset of the eigenphases (all subsets are tried).
"""
import abc
import configparser
import functools
import io
import itertools
import logging
from typing import Iterator
from typing import Optional
from typing import Sequence
from typing import TextIO
from typing import Tuple
from typing import Union

import basis_speed_limits
import numpy as np
from basis_speed_limits import errors
from basis_speed_limits import linalg
from basis_speed_limits import models
from basis_speed_limits import states

MAX_BRANCH_DIM = 20

DEFAULT_BINS = 200

DEFAULT_SAMPLES = 100000

DEFAULT_BLOCK_SIZE = 8192

# spreads closer than this count as ties
TIE_TOL = 1e-12

CSV_HEADER = "bin_left,bin_right,count"

logger = logging.getLogger(__name__)


@functools.lru_cache(maxsize=None)
def branch_masks(d: int) -> np.ndarray:
    """
    All 2^d branch assignments, ordered by number of raised phases, then lexicographically.

    :param int d: the dimension
    :rtype: ndarray
    :return: a boolean (2^d, d) table
    :raises DimTooLargeError: if d > 20
    """
    if d > MAX_BRANCH_DIM:
        raise errors.DimTooLargeError(f"Branch enumeration limited to d <= {MAX_BRANCH_DIM}")
    masks = sorted(itertools.product((False, True), repeat=d), key=sum)
    table = np.array(masks, dtype=bool).reshape(len(masks), d)
    table.setflags(write=False)
    return table


def batch_et(eigenphases: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """
    Minimal Et over branch choices for a batch of sorted eigenphase rows.

    :param ndarray eigenphases: a (k, d) array
    :rtype: tuple
    :return: the (k,) minimal Et values and the (k,) indices into branch_masks(d)
    """
    masks = branch_masks(eigenphases.shape[1])
    energies = eigenphases[:, None, :] + 2 * np.pi * masks[None, :, :]
    spreads = energies.mean(axis=2) - energies.min(axis=2)
    best = spreads.min(axis=1, keepdims=True)
    index = np.argmax(spreads <= best + TIE_TOL, axis=1)
    return spreads[np.arange(len(index)), index], index


def et_from_unitary(u: models.UnitaryOperator) -> Tuple[float, Tuple[bool, ...]]:
    """
    Smallest Et of any Hamiltonian H with exp(-iHt) = U.

    E_j t is either the principal eigenphase or the eigenphase plus 2pi; ties go to the fewest
    raised phases, then to the lexicographically smallest assignment.

    :param UnitaryOperator u: the unitary
    :rtype: tuple
    :return: Et and the branch choice per (ascending) eigenphase
    :raises DimTooLargeError: if d > 20
    """
    ets, index = batch_et(np.asarray(u.eigenphases, dtype=float)[None, :])
    bits = branch_masks(u.dim)[index[0]]
    return float(ets[0]), tuple(bool(b) for b in bits)


def phase_unitary(dst: models.OrderedBasis, phases: Sequence[float]) -> np.ndarray:
    """U = sum_n e^{+i phi_n} |dst_n><n|, the phases multiplying the target columns."""
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (dst.dim,):
        raise errors.DimMismatchError(f"Expected {dst.dim} phases, got {phases.shape}")
    return dst.columns * np.exp(1j * phases)[None, :]


def et_for_phases(dst: models.OrderedBasis, phases: Sequence[float]) -> models.SampleRecord:
    """
    Evaluate one unitary of the family for the given phases.

    :param OrderedBasis dst: the target basis
    :param list phases: the phases phi_n
    :rtype: SampleRecord
    """
    u = linalg.unitary_eigphases(phase_unitary(dst, phases))
    et, bits = et_from_unitary(u)
    return models.SampleRecord(
        phases=tuple(float(p) for p in phases),
        eigenphases=tuple(float(p) for p in u.eigenphases),
        branch_bits=bits,
        et=et,
    )


def hamiltonian_from_unitary(
    u: models.UnitaryOperator,
    branch_bits: Sequence[bool],
) -> models.HermitianOperator:
    """
    Hamiltonian generating U at t = 1 with the given branch choices.

    Its mean energy equals the Et of the branch choice.

    :param UnitaryOperator u: the diagonalized unitary
    :param list branch_bits: per eigenphase, whether 2pi is added
    :rtype: HermitianOperator
    """
    bits = np.asarray(branch_bits, dtype=bool)
    if bits.shape != (u.dim,):
        raise errors.DimMismatchError(f"Expected {u.dim} branch bits, got {bits.shape}")
    energies = u.eigenphases + 2 * np.pi * bits
    vectors = u.eigenvectors
    return linalg.hermitian_eig((vectors * energies) @ linalg.dagger(vectors))


def evaluate_phases(
    columns: np.ndarray,
    phases: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Vectorized evaluation of many phase vectors against one target basis.

    :param ndarray columns: the target basis columns
    :param ndarray phases: a (k, d) array of phases
    :rtype: tuple
    :return: sorted eigenphases (k, d), minimal Et (k,) and branch indices (k,)
    """
    unitaries = columns[None, :, :] * np.exp(1j * phases)[:, None, :]
    try:
        eigenvalues = np.linalg.eigvals(unitaries)
    except np.linalg.LinAlgError as lae:
        raise errors.NoConvergenceError(f"Eigensolver failed: {lae}") from lae
    eigenphases = np.sort(linalg.principal_phases(eigenvalues), axis=1)
    ets, index = batch_et(eigenphases)
    return eigenphases, ets, index


def block_phases(seed: int, block: int, count: int, d: int) -> np.ndarray:
    """
    Phases of one block, drawn from its own Philox stream.

    Stream b is keyed by the seed and starts at counter b, so a block never depends on the
    blocks drawn before it; a shorter count yields a prefix of the longer one.

    :param int seed: the 64-bit seed
    :param int block: the block index
    :param int count: number of samples in the block
    :param int d: the dimension
    :rtype: ndarray
    """
    bit_generator = np.random.Philox(
        key=seed,
        counter=np.array([0, block, 0, 0], dtype=np.uint64),
    )
    return np.random.Generator(bit_generator).random((count, d)) * 2 * np.pi


def _sample_block(task: Tuple[np.ndarray, int, int, int]) -> np.ndarray:
    columns, seed, block, count = task
    phases = block_phases(seed, block, count, columns.shape[0])
    return evaluate_phases(columns, phases)[1]


class AbstractEtSampler(abc.ABC):
    """Abstract sampler of minimal Et over random-phase unitaries onto a fixed basis."""

    def __init__(
        self,
        conf: configparser.ConfigParser,
        workers: Optional[int] = None,
        block_size: Optional[int] = None,
    ) -> None:
        """
        Constructor.

        :param configparser.ConfigParser conf: the conf object
        :param int|None workers: number of processes, overriding the configuration
        :param int|None block_size: samples per random stream, overriding the configuration
        """
        self._conf = conf
        section = (
            conf[basis_speed_limits.MONTECARLO_SECTION]
            if conf.has_section(basis_speed_limits.MONTECARLO_SECTION)
            else {}
        )
        self._workers = workers or int(section.get("workers", 1))
        self._block_size = block_size or int(section.get("block_size", DEFAULT_BLOCK_SIZE))
        if self._block_size < 1:
            raise ValueError(f"Block size must be positive, got {self._block_size}")
        self._logger = logging.getLogger(__name__)
        self._logger.info(
            "Loading sampler '%s' with %d worker(s) and blocks of %d",
            self.__class__.__name__,
            self._workers,
            self._block_size,
        )

    @abc.abstractmethod
    def target_basis(self) -> models.OrderedBasis:
        """
        Get the target basis.

        :rtype: OrderedBasis
        :return: the basis the sampled unitaries map onto
        """

    def _blocks(self, n_samples: int) -> Iterator[Tuple[int, int]]:
        for block, start in enumerate(range(0, n_samples, self._block_size)):
            yield block, min(self._block_size, n_samples - start)

    def sample_ets(self, n_samples: int, seed: int) -> np.ndarray:
        """
        Draw the minimal Et of n_samples random unitaries.

        :param int n_samples: number of samples
        :param int seed: the 64-bit seed
        :rtype: ndarray
        :return: the Et values in sample order
        """
        if n_samples < 1:
            raise ValueError(f"Need at least one sample, got {n_samples}")
        if seed < 0:
            raise ValueError(f"Seed must be non-negative, got {seed}")
        columns = self.target_basis().columns
        tasks = [(columns, seed, block, count) for block, count in self._blocks(n_samples)]
        self._logger.debug("Sampling %d unitaries in %d block(s)", n_samples, len(tasks))
        results = basis_speed_limits.parallel_map(_sample_block, tasks, self._workers)
        return np.concatenate(results)

    def sample(self, n_samples: int, seed: int, bins: int = DEFAULT_BINS) -> models.EtHistogram:
        """
        Histogram of the minimal Et over [0, 2pi].

        :param int n_samples: number of samples
        :param int seed: the 64-bit seed
        :param int bins: number of uniform bins
        :rtype: EtHistogram
        """
        if bins < 1:
            raise ValueError(f"Need at least one bin, got {bins}")
        ets = self.sample_ets(n_samples, seed)
        counts, edges = np.histogram(np.clip(ets, 0, 2 * np.pi), bins=bins, range=(0, 2 * np.pi))
        min_et = float(np.min(ets))
        self._logger.info("Sampled %d unitaries, min Et %.17g", n_samples, min_et)
        return models.EtHistogram(
            bin_edges=edges,
            counts=counts,
            n_samples=n_samples,
            min_et=min_et,
            seed=seed,
        )

    def iter_records(self, n_samples: int, seed: int) -> Iterator[models.SampleRecord]:
        """
        Yield one record per sample, in the order of sample_ets.

        :param int n_samples: number of samples
        :param int seed: the 64-bit seed
        :rtype: iterator
        """
        columns = self.target_basis().columns
        masks = branch_masks(columns.shape[0])
        for block, count in self._blocks(n_samples):
            phases = block_phases(seed, block, count, columns.shape[0])
            eigenphases, ets, index = evaluate_phases(columns, phases)
            for row in range(count):
                yield models.SampleRecord(
                    phases=tuple(phases[row].tolist()),
                    eigenphases=tuple(eigenphases[row].tolist()),
                    branch_bits=tuple(bool(b) for b in masks[index[row]]),
                    et=float(ets[row]),
                )


class PlusBasisSampler(AbstractEtSampler):
    """Sampler onto the plus qutrit basis."""

    def target_basis(self) -> models.OrderedBasis:
        """Override."""
        return states.standard_basis("qutrit_plus", 3)


class TildeBasisSampler(AbstractEtSampler):
    """Sampler onto the tilde qutrit basis."""

    def target_basis(self) -> models.OrderedBasis:
        """Override."""
        return states.standard_basis("qutrit_tilde", 3)


class OrderedBasisSampler(AbstractEtSampler):
    """Sampler onto any given basis."""

    def __init__(
        self,
        conf: configparser.ConfigParser,
        basis: models.OrderedBasis,
        workers: Optional[int] = None,
        block_size: Optional[int] = None,
    ) -> None:
        """
        Constructor.

        :param configparser.ConfigParser conf: the conf object
        :param OrderedBasis basis: the target basis
        :param int|None workers: number of processes
        :param int|None block_size: samples per random stream
        """
        branch_masks(basis.dim)
        self._basis = basis
        super(OrderedBasisSampler, self).__init__(conf, workers, block_size)

    def target_basis(self) -> models.OrderedBasis:
        """Override."""
        return self._basis


SAMPLERS = {
    "plus": PlusBasisSampler,
    "tilde": TildeBasisSampler,
}


def _sample_target(
    target: str,
    n_samples: int,
    seed: int,
    bins: int,
    workers: Optional[int],
    conf: Optional[configparser.ConfigParser],
) -> models.EtHistogram:
    sampler = SAMPLERS[target](conf or configparser.ConfigParser(), workers=workers)
    return sampler.sample(n_samples, seed, bins)


def sample_tilde(
    n_samples: int,
    seed: int,
    bins: int = DEFAULT_BINS,
    workers: Optional[int] = None,
    conf: Optional[configparser.ConfigParser] = None,
) -> models.EtHistogram:
    """
    Histogram of minimal Et for unitaries onto the tilde qutrit basis.

    :param int n_samples: number of samples
    :param int seed: the 64-bit seed
    :param int bins: number of bins
    :param int|None workers: number of processes
    :param configparser.ConfigParser|None conf: optional conf object
    :rtype: EtHistogram
    """
    return _sample_target("tilde", n_samples, seed, bins, workers, conf)


def sample_plus(
    n_samples: int,
    seed: int,
    bins: int = DEFAULT_BINS,
    workers: Optional[int] = None,
    conf: Optional[configparser.ConfigParser] = None,
) -> models.EtHistogram:
    """
    Histogram of minimal Et for unitaries onto the plus qutrit basis.

    :param int n_samples: number of samples
    :param int seed: the 64-bit seed
    :param int bins: number of bins
    :param int|None workers: number of processes
    :param configparser.ConfigParser|None conf: optional conf object
    :rtype: EtHistogram
    """
    return _sample_target("plus", n_samples, seed, bins, workers, conf)


def write_histogram_csv(histogram: models.EtHistogram, f: TextIO) -> None:
    """
    Write the histogram as CSV with a trailer of comment lines.

    :param EtHistogram histogram: the histogram
    :param file f: a text stream
    """
    fmt = basis_speed_limits.format_float
    f.write(CSV_HEADER + "\n")
    edges = histogram.bin_edges
    for left, right, count in zip(edges[:-1], edges[1:], histogram.counts):
        f.write(f"{fmt(left)},{fmt(right)},{int(count)}\n")
    f.write(f"# n_samples={histogram.n_samples}\n")
    f.write(f"# seed={histogram.seed}\n")
    f.write(f"# min_et={fmt(histogram.min_et)}\n")


def histogram_to_csv(histogram: models.EtHistogram) -> str:
    """Render the histogram CSV as a string."""
    buffer = io.StringIO()
    write_histogram_csv(histogram, buffer)
    return buffer.getvalue()


def read_histogram_csv(f: Union[TextIO, str]) -> models.EtHistogram:
    """
    Parse a histogram written by write_histogram_csv.

    :param file|str f: a text stream or the CSV content
    :rtype: EtHistogram
    :raises ValueError: if the content is malformed
    """
    lines = (f if isinstance(f, str) else f.read()).splitlines()
    if not lines or lines[0].strip() != CSV_HEADER:
        raise ValueError("Missing histogram header")
    edges, counts, trailer = [], [], {}
    for line in lines[1:]:
        if not line.strip():
            continue
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition("=")
            trailer[key] = value
            continue
        left, right, count = line.split(",")
        if not edges:
            edges.append(float(left))
        edges.append(float(right))
        counts.append(int(count))
    try:
        return models.EtHistogram(
            bin_edges=np.array(edges),
            counts=np.array(counts, dtype=np.int64),
            n_samples=int(trailer["n_samples"]),
            min_et=float(trailer["min_et"]),
            seed=int(trailer["seed"]),
        )
    except KeyError as ke:
        raise ValueError(f"Missing trailer entry {ke}") from ke
