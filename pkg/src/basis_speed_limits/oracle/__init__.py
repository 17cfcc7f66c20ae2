"""
Brute-force verifiers: grid search plus pattern-search refinement.

The cosine-sum minimizer enumerates the simplex alpha_j >= 0, sum_j alpha_j <= cap (alpha_0 = 0)
on an integer grid; the objective is symmetric, so only non-decreasing grid tuples are visited.
"""
import functools
import logging
from typing import Iterator
from typing import List
from typing import Optional
from typing import Sequence
from typing import Tuple

import basis_speed_limits
import ijson
import numpy as np
from basis_speed_limits import bounds
from basis_speed_limits import errors
from basis_speed_limits import models
from basis_speed_limits import montecarlo

MAX_GRID_DIM = 7

MIN_GRID_POINTS = 8

DEFAULT_GRID_POINTS = 64

MAX_PHASE_GRID = 64

STRICT_MARGIN = 1e-6

STEP_FLOOR = 1e-8

EVAL_CHUNK = 16384

# refinement starts from this many of the best grid points
REFINE_STARTS = 4

logger = logging.getLogger(__name__)


def cos_sum(alpha: Sequence[float]) -> float:
    """The objective sum_j cos(alpha_j)."""
    return float(np.sum(np.cos(np.asarray(alpha, dtype=float))))


def _nondecreasing(length: int, low: int, budget: int) -> Iterator[Tuple[int, ...]]:
    """Non-decreasing tuples of the given length, entries >= low, summing to at most budget."""
    if length == 0:
        yield ()
        return
    for first in range(low, budget // length + 1):
        for rest in _nondecreasing(length - 1, first, budget - first):
            yield (first,) + rest


def _grid_chunk(task: Tuple[int, int, int, float]) -> Tuple[float, Tuple[int, ...]]:
    """Best grid point among the tuples starting with a given smallest index."""
    free, first, budget, step = task
    rows = [(first,) + rest for rest in _nondecreasing(free - 1, first, budget - first)]
    if not rows:
        return np.inf, ()
    points = np.array(rows, dtype=float) * step
    values = 1.0 + np.sum(np.cos(points), axis=1)
    best = int(np.argmin(values))
    return float(values[best]), rows[best]


def _project(alpha: np.ndarray, moves: np.ndarray, cap: float) -> np.ndarray:
    """Clip at zero, then pull the increased coordinate back onto sum = cap."""
    alpha = np.clip(alpha, 0.0, None)
    excess = np.clip(alpha.sum(axis=1) - cap, 0.0, None)
    raised = np.argmax(moves, axis=1)
    has_raise = moves[np.arange(len(moves)), raised] > 0
    alpha[np.arange(len(alpha)), raised] -= np.where(has_raise, excess, 0.0)
    return alpha


@functools.lru_cache(maxsize=None)
def _move_table(free: int) -> np.ndarray:
    """Unit single-coordinate moves followed by pairwise transfers."""
    moves = []
    for i in range(free):
        for sign in (1.0, -1.0):
            move = np.zeros(free)
            move[i] = sign
            moves.append(move)
    for i in range(free):
        for j in range(free):
            if i != j:
                move = np.zeros(free)
                move[i], move[j] = 1.0, -1.0
                moves.append(move)
    return np.array(moves).reshape(len(moves), free)


def _refine_cos_sum(start: np.ndarray, cap: float, step: float) -> Tuple[float, np.ndarray]:
    """Pattern search on the free angles, halving the step down to STEP_FLOOR."""
    moves = _move_table(len(start))
    current = start.copy()
    value = 1.0 + float(np.sum(np.cos(current)))
    while step >= STEP_FLOOR:
        candidates = _project(current[None, :] + step * moves, moves, cap)
        values = 1.0 + np.sum(np.cos(candidates), axis=1)
        best = int(np.argmin(values))
        if values[best] < value - 1e-15:
            current, value = candidates[best], float(values[best])
        else:
            step /= 2
    return value, current


def minimize_cos_sum(
    region: models.RegionSpec,
    grid_points_per_axis: int = DEFAULT_GRID_POINTS,
    workers: int = 1,
    refine: bool = True,
) -> models.MinimizationResult:
    """
    Minimize sum_j cos(alpha_j) over alpha_0 = 0, alpha_j >= 0, sum_j alpha_j <= sum_cap.

    :param RegionSpec region: the region
    :param int grid_points_per_axis: grid points along each axis, including both ends
    :param int workers: number of processes evaluating grid chunks
    :param bool refine: whether to run the local refinement
    :rtype: MinimizationResult
    :return: the minimum, the full minimizing angle vector (alpha_0 first) and the grid step
    :raises DimTooLargeError: if d > 7
    """
    d, cap = region.d, float(region.sum_cap)
    if d > MAX_GRID_DIM:
        raise errors.DimTooLargeError(f"Grid search limited to d <= {MAX_GRID_DIM}, got {d}")
    if d < 2:
        raise errors.BadDimensionError(f"Need d >= 2, got {d}")
    if grid_points_per_axis < MIN_GRID_POINTS:
        raise errors.BadDimensionError(
            f"Need at least {MIN_GRID_POINTS} grid points per axis, got {grid_points_per_axis}"
        )
    if cap < 0 or not np.isfinite(cap):
        raise errors.SpeedLimitError(f"Region cap must be finite and non-negative, got {cap}")
    free = d - 1
    if cap == 0:
        return models.MinimizationResult(
            min_value=float(d),
            argmin=[0.0] * d,
            grid_resolution=0.0,
            refined=False,
        )
    budget = grid_points_per_axis - 1
    step = cap / budget
    tasks = [(free, first, budget, step) for first in range(budget // free + 1)]
    chunks = basis_speed_limits.parallel_map(_grid_chunk, tasks, workers)
    # lexicographic tie-break keeps the result independent of chunking
    grid_value, grid_index = min(chunks, key=lambda chunk: (chunk[0], chunk[1]))
    best_value, best_alpha = grid_value, np.array(grid_index, dtype=float) * step
    logger.debug("d=%d cap=%.6f grid minimum %.12f at %s", d, cap, grid_value, grid_index)
    if refine:
        value, alpha = _refine_cos_sum(best_alpha, cap, step)
        if value < best_value:
            best_value, best_alpha = value, alpha
    best_alpha = np.sort(best_alpha)
    logger.info("d=%d cap=%.6f minimum %.12f", d, cap, best_value)
    return models.MinimizationResult(
        min_value=cos_sum(np.concatenate(([0.0], best_alpha))),
        argmin=[0.0] + [float(a) for a in best_alpha],
        grid_resolution=step,
        refined=refine,
    )


def general_bound_region(d: int) -> models.RegionSpec:
    """Region sum_j alpha_j <= (d - 1) pi / 4 of the general unbiased bound."""
    return models.RegionSpec(d=d, sum_cap=(d - 1) * np.pi / 4)


def d6_region(scale: float = 1.0) -> models.RegionSpec:
    """Region of the six-dimensional refinement, the cap 2 arccos((4 - sqrt(6))/2) scaled."""
    return models.RegionSpec(d=6, sum_cap=scale * 6 * bounds.d6_refined_constant())


def verify_general_bound(
    d: int,
    grid_points_per_axis: int = DEFAULT_GRID_POINTS,
    workers: int = 1,
) -> bool:
    """
    Check that the cosine sum stays above sqrt(d) on the general unbiased region.

    :param int d: the dimension, between 2 and 7
    :param int grid_points_per_axis: grid points along each axis
    :param int workers: number of processes
    :rtype: bool
    """
    if not 2 <= d <= MAX_GRID_DIM:
        raise errors.BadDimensionError(f"Need 2 <= d <= {MAX_GRID_DIM}, got {d}")
    result = minimize_cos_sum(general_bound_region(d), grid_points_per_axis, workers)
    return result.min_value > np.sqrt(d) - STRICT_MARGIN


def verify_d6_refinement(
    scale: float = 1.0,
    grid_points_per_axis: int = DEFAULT_GRID_POINTS,
    workers: int = 1,
) -> bool:
    """
    Check that the cosine sum stays above sqrt(6) on the (scaled) refined six-dimensional region.

    :param float scale: factor applied to the region cap
    :param int grid_points_per_axis: grid points along each axis
    :param int workers: number of processes
    :rtype: bool
    """
    result = minimize_cos_sum(d6_region(scale), grid_points_per_axis, workers)
    return result.min_value > np.sqrt(6) - STRICT_MARGIN


def _phase_ets(columns: np.ndarray, free_phases: np.ndarray) -> np.ndarray:
    phases = np.concatenate([np.zeros((len(free_phases), 1)), free_phases], axis=1)
    return montecarlo.evaluate_phases(columns, phases)[1]


def _refine_phases(
    columns: np.ndarray,
    start: np.ndarray,
    step: float,
) -> Tuple[float, np.ndarray]:
    free = len(start)
    moves = np.concatenate([np.eye(free), -np.eye(free)])
    current = start.copy()
    value = float(_phase_ets(columns, current[None, :])[0])
    while step >= STEP_FLOOR:
        candidates = np.mod(current[None, :] + step * moves, 2 * np.pi)
        values = _phase_ets(columns, candidates)
        best = int(np.argmin(values))
        if values[best] < value - 1e-15:
            current, value = candidates[best], float(values[best])
        else:
            step /= 2
    return value, current


def min_et_search(
    dst: models.OrderedBasis,
    phase_grid: int = 32,
    refine: bool = True,
) -> models.MinimizationResult:
    """
    Minimal Et over all unitaries sum_n e^{i phi_n}|dst_n><n|, by grid search over phi.

    phi_0 is fixed to 0; the remaining phases run over a uniform grid on [0, 2pi).

    :param OrderedBasis dst: the target basis
    :param int phase_grid: grid points per phase
    :param bool refine: whether to refine around the best grid points
    :rtype: MinimizationResult
    :return: the minimal Et with the phases attaining it
    :raises DimTooLargeError: if d is not 3 or 4 or the grid exceeds 64 points
    """
    d = dst.dim
    if d not in (3, 4):
        raise errors.DimTooLargeError(f"Phase grid search supports d = 3 or 4, got {d}")
    if not 1 <= phase_grid <= MAX_PHASE_GRID:
        raise errors.DimTooLargeError(f"Phase grid must be in [1, {MAX_PHASE_GRID}]")
    step = 2 * np.pi / phase_grid
    axes = np.arange(phase_grid) * step
    grid = np.stack(np.meshgrid(*([axes] * (d - 1)), indexing="ij"), axis=-1).reshape(-1, d - 1)
    chunks = range(0, len(grid), EVAL_CHUNK)
    ets = np.concatenate([_phase_ets(dst.columns, grid[i : i + EVAL_CHUNK]) for i in chunks])
    order = np.argsort(ets, kind="stable")
    best_value, best_phases = float(ets[order[0]]), grid[order[0]]
    logger.debug("Phase grid of %d points, minimum Et %.12f", len(grid), best_value)
    if refine:
        for index in order[:REFINE_STARTS]:
            value, phases = _refine_phases(dst.columns, grid[index], step)
            if value < best_value:
                best_value, best_phases = value, phases
    return models.MinimizationResult(
        min_value=best_value,
        argmin=[0.0] + [float(p) for p in best_phases],
        grid_resolution=step,
        refined=refine,
    )


def min_et_for_transform(dst: models.OrderedBasis, phase_grid: int = 32) -> float:
    """
    Minimal Et of any Hamiltonian mapping the computational basis onto dst.

    :param OrderedBasis dst: the target basis, d = 3 or 4
    :param int phase_grid: grid points per phase, at most 64
    :rtype: float
    """
    return min_et_search(dst, phase_grid).min_value


def result_to_dict(region: models.RegionSpec, result: models.MinimizationResult) -> dict:
    return {
        "d": int(region.d),
        "sum_cap": float(region.sum_cap),
        "min_value": float(result.min_value),
        "argmin": [float(a) for a in result.argmin],
        "grid": float(result.grid_resolution),
        "refined": bool(result.refined),
    }


def save_results(
    results: Sequence[Tuple[models.RegionSpec, models.MinimizationResult]],
    file_path: str,
) -> None:
    """
    Save minimization results as a JSON array.

    :param list results: pairs of region and result
    :param str file_path: the path where to save to
    """
    basis_speed_limits.save_to_json([result_to_dict(r, m) for r, m in results], file_path)


def load_results(
    file_path: str,
) -> List[Tuple[models.RegionSpec, models.MinimizationResult]]:
    """
    Load results saved with save_results, streaming the array.

    :param str file_path: the path to read from
    :rtype: list
    """
    ret = []
    with open(file_path, "r") as f:
        for json_doc in ijson.items(f, "item", use_float=True):
            region = models.RegionSpec(d=int(json_doc["d"]), sum_cap=json_doc["sum_cap"])
            result = models.MinimizationResult(
                min_value=json_doc["min_value"],
                argmin=list(json_doc["argmin"]),
                grid_resolution=json_doc["grid"],
                refined=json_doc["refined"],
            )
            ret.append((region, result))
    return ret


def run_general_bound(
    dims: Optional[Sequence[int]] = None,
    grid_points_per_axis: int = DEFAULT_GRID_POINTS,
    workers: int = 1,
) -> List[Tuple[models.RegionSpec, models.MinimizationResult]]:
    """Minimize over the general unbiased region for each dimension (2..7 by default)."""
    ret = []
    for d in dims or range(2, MAX_GRID_DIM + 1):
        region = general_bound_region(d)
        ret.append((region, minimize_cos_sum(region, grid_points_per_axis, workers)))
    return ret
