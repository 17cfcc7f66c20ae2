import collections
import enum

import numpy as np


class Tightness(str, enum.Enum):
    """Whether a bound is known to be attained."""

    TIGHT = "tight"
    NOT_TIGHT = "not_tight"
    UNKNOWN = "unknown"


class BoundKind(str, enum.Enum):
    """Direction of a bound on the evolution time."""

    LOWER = "lower"
    UPPER = "upper"


class QutritClassTag(str, enum.Enum):
    """The two inequivalent families of unbiased qutrit bases."""

    PLUS = "plus"
    TILDE = "tilde"


Tolerances = collections.namedtuple(
    "Tolerances",
    [
        "equality",
        "phase",
        "unbiased",
    ],
)


class HermitianOperator(
    collections.namedtuple(
        "HermitianOperator",
        [
            "matrix",
            "eigenvalues",
            "eigenvectors",
        ],
    )
):
    """A Hermitian matrix with its ascending eigensystem (eigenvectors as columns)."""

    __slots__ = ()

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def e_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def e_max(self) -> float:
        return float(self.eigenvalues[-1])

    @property
    def e_gap(self) -> float:
        return self.e_max - self.e_min


class UnitaryOperator(
    collections.namedtuple(
        "UnitaryOperator",
        [
            "matrix",
            "eigenphases",
            "eigenvectors",
        ],
    )
):
    """A unitary with principal eigenphases, eigenvalue exp(-i * phase)."""

    __slots__ = ()

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(-1j * self.eigenphases)


class OrderedBasis(collections.namedtuple("OrderedBasis", ["columns"])):
    """An ordered orthonormal basis, the j-th column being the j-th element."""

    __slots__ = ()

    @property
    def dim(self) -> int:
        return self.columns.shape[0]

    def element(self, j: int) -> np.ndarray:
        return self.columns[:, j]


BlochVector = collections.namedtuple("BlochVector", ["x", "y", "z"])


QutritClass = collections.namedtuple(
    "QutritClass",
    [
        "class_tag",
        "diagonal_phases",
        "element_phases",
    ],
)


BoundReport = collections.namedtuple(
    "BoundReport",
    [
        "bound_value",
        "kind",
        "tight",
        "g_constant",
        "source",
        "note",
    ],
)


TransformCheck = collections.namedtuple(
    "TransformCheck",
    [
        "achieved",
        "max_column_error",
        "recovered_phases",
    ],
)


SampleRecord = collections.namedtuple(
    "SampleRecord",
    [
        "phases",
        "eigenphases",
        "branch_bits",
        "et",
    ],
)


EtHistogram = collections.namedtuple(
    "EtHistogram",
    [
        "bin_edges",
        "counts",
        "n_samples",
        "min_et",
        "seed",
    ],
)


RegionSpec = collections.namedtuple(
    "RegionSpec",
    [
        "d",
        "sum_cap",
    ],
)


MinimizationResult = collections.namedtuple(
    "MinimizationResult",
    [
        "min_value",
        "argmin",
        "grid_resolution",
        "refined",
    ],
)


CheckResult = collections.namedtuple(
    "CheckResult",
    [
        "name",
        "passed",
        "error",
        "detail",
    ],
)


CheckOptions = collections.namedtuple(
    "CheckOptions",
    [
        "d",
        "samples",
        "seed",
        "tol",
        "phase_tol",
        "unbiased_tol",
    ],
    defaults=[1e-9, 1e-9],
)


RunConfig = collections.namedtuple(
    "RunConfig",
    [
        "command",
        "d",
        "n",
        "energy",
        "samples",
        "seed",
        "bins",
        "tol",
        "output_path",
        "format",
        "target",
        "only",
        "workers",
        "bloch",
        "theta",
        "phi",
        "points",
    ],
)
