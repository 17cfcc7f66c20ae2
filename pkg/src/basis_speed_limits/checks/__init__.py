"""
Verification suite: every closed-form result checked against an independent numerical one.

Each check returns a list of CheckResult; ``error`` is the measured deviation (0 for pure
pass/fail checks).
"""
import configparser
import logging
from typing import Callable
from typing import Dict
from typing import List
from typing import Optional

import numpy as np
from basis_speed_limits import bounds
from basis_speed_limits import linalg
from basis_speed_limits import models
from basis_speed_limits import montecarlo
from basis_speed_limits import oracle
from basis_speed_limits import states
from basis_speed_limits.bounds import coherence

SATURATION_TOL = 1e-9

SQRT_SHIFT = np.array([[2, -1, 2], [2, 2, -1], [-1, 2, 2]], dtype=complex) / 3

DEFAULT_VERIFY_SAMPLES = 20000

DEFAULT_SEED = 42

MAX_HADAMARD_QUBITS = 8

logger = logging.getLogger(__name__)

CheckFunction = Callable[[models.CheckOptions], List[models.CheckResult]]


def _result(name: str, passed: bool, error: float = 0.0, detail: str = "") -> models.CheckResult:
    return models.CheckResult(name=name, passed=bool(passed), error=float(error), detail=detail)


def _saturation_cases():
    yield "qutrit_plus", bounds.saturation_case("qutrit_plus")
    yield "qutrit_tilde", bounds.saturation_case("qutrit_tilde")
    yield "two_qubit", bounds.saturation_case("two_qubit")
    for n in range(1, MAX_HADAMARD_QUBITS + 1):
        yield f"nqubit_hadamard({n})", bounds.saturation_case("nqubit_hadamard", n=n)


def check_saturation(options: models.CheckOptions) -> List[models.CheckResult]:
    """Each optimal Hamiltonian reaches its target basis at the bound."""
    ret = []
    for name, (h, t, src, dst) in _saturation_cases():
        check = bounds.achieves_transform(h, t, src, dst, options.tol)
        ret.append(
            _result(f"saturation {name}", check.achieved, check.max_column_error, f"t={t:.17g}")
        )
    return ret


def check_two_qubit(options: models.CheckOptions) -> List[models.CheckResult]:
    """Spectrum, mean energy and phases of the two-qubit Hamiltonian."""
    h, t, src, dst = bounds.saturation_case("two_qubit")
    spectrum_error = float(np.max(np.abs(h.eigenvalues - np.array([-1, -1, -1, 3]))))
    energy_error = abs(bounds.mean_energy(h) - 1)
    check = bounds.achieves_transform(h, t, src, dst, options.tol)
    phase_error = float(np.max(np.abs(linalg.wrap_phase(check.recovered_phases - np.pi / 4))))
    return [
        _result("two_qubit spectrum", spectrum_error <= 1e-10, spectrum_error),
        _result("two_qubit mean energy", energy_error <= 1e-12, energy_error),
        _result("two_qubit mapping", check.achieved, check.max_column_error),
        _result("two_qubit phases", phase_error <= 1e-9, phase_error),
    ]


def check_constraint(options: models.CheckOptions) -> List[models.CheckResult]:
    """Every saturating pair obeys the cosine-sum constraint, the identity does not."""
    ret = []
    for name, (h, t, _, _) in _saturation_cases():
        value, satisfied = bounds.constraint_check(h, t)
        ret.append(_result(f"constraint {name}", satisfied, 0.0, f"value={value:.17g}"))
    h = bounds.construct_optimal("two_qubit")
    value, satisfied = bounds.constraint_check(h, 0.0)
    ret.append(_result("constraint identity", not satisfied, 0.0, f"value={value:.17g}"))
    return ret


def check_rotated_basis(options: models.CheckOptions) -> List[models.CheckResult]:
    """Conjugating by a diagonal unitary rotates the reachable target basis accordingly."""
    rng = np.random.default_rng(options.seed)
    ret = []
    for name in ("qutrit_plus", "qutrit_tilde", "two_qubit"):
        h, t, src, dst = bounds.saturation_case(name)
        v = np.exp(1j * rng.uniform(0, 2 * np.pi, h.dim))
        rotated = bounds.conjugate_hamiltonian(h, v)
        target = models.OrderedBasis(columns=v[:, None] * dst.columns)
        check = bounds.achieves_transform(rotated, t, src, target, options.tol)
        energy_error = abs(bounds.mean_energy(rotated) - bounds.mean_energy(h))
        ret.append(
            _result(
                f"rotated {name}",
                check.achieved and energy_error <= 1e-12,
                max(check.max_column_error, energy_error),
            )
        )
    return ret


def check_general_bound(options: models.CheckOptions) -> List[models.CheckResult]:
    """Cosine-sum minimum above sqrt(d) on the general unbiased region."""
    ret = []
    for dim in [options.d] if options.d else range(2, oracle.MAX_GRID_DIM + 1):
        result = oracle.minimize_cos_sum(oracle.general_bound_region(dim))
        margin = result.min_value - np.sqrt(dim)
        ret.append(
            _result(
                f"general_bound d={dim}",
                margin > -oracle.STRICT_MARGIN,
                0.0,
                f"min={result.min_value:.17g} sqrt(d)={np.sqrt(dim):.17g}",
            )
        )
    return ret


def check_d6(options: models.CheckOptions) -> List[models.CheckResult]:
    """Six-dimensional refinement: oracle confirmation and the quoted constant."""
    constant = bounds.d6_refined_constant()
    return [
        _result("d6 refinement", oracle.verify_d6_refinement()),
        _result("d6 constant", abs(constant - 0.227) <= 2e-3, abs(constant - 0.227)),
    ]


def check_permutation(options: models.CheckOptions) -> List[models.CheckResult]:
    """Cyclic shift eigenphases, their sum, and the square and cube roots for d = 3."""
    ret = []
    for dim in [options.d] if options.d else range(2, 9):
        u = linalg.unitary_eigphases(linalg.cyclic_shift(dim), phase_tol=options.phase_tol)
        expected = np.sort(linalg.principal_phases(np.exp(-2j * np.pi * np.arange(dim) / dim)))
        error = float(np.max(np.abs(np.sort(u.eigenphases) - expected)))
        ret.append(_result(f"permutation phases d={dim}", error <= 1e-9, error))
        sum_error = abs(bounds.perm_eigenphase_sum(dim) - np.pi * (dim - 1))
        ret.append(_result(f"permutation sum d={dim}", sum_error <= 1e-9, sum_error))
    shift = linalg.unitary_eigphases(linalg.cyclic_shift(3), phase_tol=options.phase_tol)
    root_error = float(np.max(np.abs(linalg.unitary_root(shift, 2) - SQRT_SHIFT)))
    ret.append(_result("permutation square root", root_error <= 1e-12, root_error))
    cube = linalg.unitary_root(shift, 3)
    deviation = float(np.min(np.max(np.abs(np.abs(cube) - 1 / np.sqrt(3)), axis=0)))
    ret.append(
        _result("permutation cube root", deviation > 1e-6, deviation, "no coherent column")
    )
    return ret


def check_fidelity_curve(options: models.CheckOptions) -> List[models.CheckResult]:
    """Survival probability of |0> under the optimal qutrit Hamiltonian."""
    t = np.linspace(0, 2 * np.pi, 100)
    curve = bounds.fidelity_curve(t)
    error = float(np.max(np.abs(curve - (5 + 4 * np.cos(t)) / 9)))
    return [
        _result("fidelity curve", error <= 1e-10, error),
        _result(
            "fidelity never zero",
            curve.min() >= 1 / 9 - 1e-10,
            0.0,
            f"min={curve.min():.17g}",
        ),
    ]


def check_classifier(options: models.CheckOptions) -> List[models.CheckResult]:
    """Random unbiased qutrit bases are classified back to their construction."""
    rng = np.random.default_rng(options.seed)
    tags = list(models.QutritClassTag)
    failures, worst = 0, 0.0
    for _ in range(1000):
        tag = tags[rng.integers(len(tags))]
        diagonal = rng.uniform(-np.pi, np.pi, 2)
        elements = rng.uniform(-np.pi, np.pi, 3)
        basis = states.qutrit_basis(tag, diagonal, elements)
        found = states.classify_qutrit_unbiased(basis, options.unbiased_tol)
        error = max(
            np.max(np.abs(linalg.wrap_phase(np.array(found.diagonal_phases) - diagonal))),
            np.max(np.abs(linalg.wrap_phase(np.array(found.element_phases) - elements))),
        )
        worst = max(worst, float(error))
        if found.class_tag != tag or error > 1e-8:
            failures += 1
    return [_result("qutrit classifier", failures == 0, worst, f"failures={failures}")]


def check_sampling(options: models.CheckOptions) -> List[models.CheckResult]:
    """Sampled minimal Et never undercuts the qutrit bounds."""
    ret = []
    for target, bound in (("plus", 2 * np.pi / 9), ("tilde", 4 * np.pi / 9)):
        sampler = montecarlo.SAMPLERS[target](configparser.ConfigParser())
        histogram = sampler.sample(options.samples, options.seed)
        ret.append(
            _result(
                f"sampling {target}",
                histogram.min_et >= bound - 1e-9,
                histogram.min_et - bound,
                f"min_et={histogram.min_et:.17g}",
            )
        )
    return ret


def check_coherence(options: models.CheckOptions) -> List[models.CheckResult]:
    """Closed-form maximal coherence against random rotation axes."""
    rng = np.random.default_rng(options.seed)
    energy, t = 1.0, 0.3
    r = rng.normal(size=3)
    r *= 0.9 / np.linalg.norm(r)
    rho = states.state_from_bloch(r)
    c_max = coherence.coherence_max_qubit(rho, energy, t)
    axes = rng.normal(size=(10000, 3))
    axes /= np.linalg.norm(axes, axis=1, keepdims=True)
    sampled = max(
        coherence.bloch_coherence(coherence.rotate_bloch(r, n, 2 * energy * t)) for n in axes
    )
    axis = coherence.optimal_coherence_axis(r)
    attained = coherence.bloch_coherence(coherence.rotate_bloch(r, axis, 2 * energy * t))
    limit = coherence.mc_speed_limit(np.array([1, 0]), 1.0).bound_value
    return [
        _result("coherence brute force", sampled <= c_max + 1e-6, max(sampled - c_max, 0.0)),
        _result("coherence optimal axis", abs(attained - c_max) <= 1e-9, abs(attained - c_max)),
        _result("coherence qubit limit", abs(limit - np.pi / 4) <= 1e-12, abs(limit - np.pi / 4)),
    ]


CHECKS: Dict[str, CheckFunction] = {
    "saturation": check_saturation,
    "two_qubit": check_two_qubit,
    "constraint": check_constraint,
    "rotated_basis": check_rotated_basis,
    "general_bound": check_general_bound,
    "d6": check_d6,
    "permutation": check_permutation,
    "fidelity_curve": check_fidelity_curve,
    "classifier": check_classifier,
    "sampling": check_sampling,
    "coherence": check_coherence,
}

# Names accepted by --only for an existing check
CHECK_ALIASES: Dict[str, str] = {
    "theorem4": "general_bound",
}


def run_checks(
    only: Optional[List[str]] = None,
    d: Optional[int] = None,
    samples: int = DEFAULT_VERIFY_SAMPLES,
    seed: int = DEFAULT_SEED,
    tol: float = SATURATION_TOL,
    phase_tol: float = linalg.PHASE_TOL,
    unbiased_tol: float = states.UNBIASED_TOL,
) -> List[models.CheckResult]:
    """
    Run the named checks, all of them by default.

    :param list|None only: names of the checks to run
    :param int|None d: restrict dimension-dependent checks to this dimension
    :param int samples: number of samples for the sampling check
    :param int seed: the seed of every randomized check
    :param float tol: tolerance of the basis transformation checks
    :param float phase_tol: tolerance grouping degenerate eigenphases
    :param float unbiased_tol: tolerance on squared overlaps when classifying bases
    :rtype: list
    :raises KeyError: if a check name is unknown (aliases in CHECK_ALIASES are accepted)
    """
    options = models.CheckOptions(
        d=d,
        samples=samples,
        seed=seed,
        tol=tol,
        phase_tol=phase_tol,
        unbiased_tol=unbiased_tol,
    )
    names = [CHECK_ALIASES.get(name, name) for name in only] if only else list(CHECKS)
    ret = []
    for name in names:
        logger.info("Running check '%s'", name)
        ret.extend(CHECKS[name](options))
    return ret
