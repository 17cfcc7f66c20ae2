import argparse
import configparser
import io
import json
import logging
import math
import sys
from typing import Dict
from typing import List
from typing import Optional
from typing import Tuple

import basis_speed_limits
import numpy as np
from basis_speed_limits import bounds
from basis_speed_limits import checks
from basis_speed_limits import errors
from basis_speed_limits import models
from basis_speed_limits import montecarlo
from basis_speed_limits import states
from basis_speed_limits.bounds import coherence

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_IO = 3

COMMANDS = ("bounds", "sample", "verify", "coherence")

CONJECTURED_MIN_ET = {
    "plus": 2 * math.pi / 9,
    "tilde": 4 * math.pi / 9,
}

fmt = basis_speed_limits.format_float


def parse_bloch(bloch_str: str) -> Tuple[float, float, float]:
    """
    Parse a Bloch vector given as 'rx,ry,rz'.

    :param str bloch_str: the comma separated components
    :rtype: tuple[float, float, float]
    :return: the parsed vector
    :raises ValueError: if the vector is malformed
    """
    try:
        components = tuple(float(c) for c in bloch_str.split(","))
    except ValueError:
        raise ValueError(f"Not a valid Bloch vector: '{bloch_str}'") from None
    if len(components) != 3:
        raise ValueError(f"Bloch vectors have three components: '{bloch_str}'")
    return components


def validate_run_config(config: models.RunConfig) -> models.RunConfig:
    """
    Validate the run configuration.

    :param RunConfig config: the configuration
    :rtype: RunConfig
    :return: the validated configuration
    :raises ValueError: if a value is out of range
    """
    if not config.energy > 0:
        raise ValueError(f"Energy must be positive, got {config.energy}")
    if config.samples is not None and config.samples < 1:
        raise ValueError(f"Need at least one sample, got {config.samples}")
    if not config.tol > 0:
        raise ValueError(f"Tolerance must be positive, got {config.tol}")
    if config.seed < 0:
        raise ValueError(f"Seed must be non-negative, got {config.seed}")
    if config.bins < 1:
        raise ValueError(f"Need at least one bin, got {config.bins}")
    if config.d is not None and config.n is not None:
        raise ValueError("Give either --d or --n, not both")
    return config


def _write(text: str, output_path: Optional[str]) -> None:
    if output_path:
        with open(output_path, "w") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def _report_dict(report: models.BoundReport) -> Dict:
    return {
        "value": float(report.bound_value),
        "kind": report.kind.value,
        "tight": report.tight.value,
        "g": float(report.g_constant),
        "source": report.source,
        "note": report.note,
    }


def collect_bounds(d: int, energy: float) -> List[models.BoundReport]:
    """
    Every bound applying to dimension d.

    :param int d: the dimension
    :param float energy: the mean energy
    :rtype: list[BoundReport]
    """
    reports = [bounds.unbiased_bound(d, energy)]
    # otherwise the general bound is the one above
    if d in (2, 3, 4, 6):
        reports.append(bounds.general_unbiased_bound(d, energy))
    if d == 3:
        reports.append(bounds.qutrit_tilde_bound(energy))
    if d & (d - 1) == 0:
        reports.append(bounds.nqubit_upper_bound(d.bit_length() - 1, energy))
    reports.append(bounds.perm_bound(d, energy))
    return reports


def cmd_bounds(config: models.RunConfig) -> int:
    """Print every applicable bound for the requested dimension."""
    d = 2**config.n if config.n is not None else (config.d or 2)
    reports = collect_bounds(d, config.energy)
    if config.format == "json":
        text = json.dumps({"d": d, "bounds": [_report_dict(r) for r in reports]}, indent=2)
        _write(text + "\n", config.output_path)
        return EXIT_OK
    buffer = io.StringIO()
    buffer.write("value,kind,tight,g,source,note\n")
    for r in reports:
        buffer.write(
            f"{fmt(r.bound_value)},{r.kind.value},{r.tight.value},{fmt(r.g_constant)},"
            f"{r.source},{r.note}\n"
        )
    _write(buffer.getvalue(), config.output_path)
    return EXIT_OK


def cmd_sample(config: models.RunConfig, conf: configparser.ConfigParser) -> int:
    """Sample minimal Et for the requested target basis and emit the histogram."""
    logger = logging.getLogger(__name__)
    sampler = montecarlo.SAMPLERS[config.target](conf, workers=config.workers)
    samples = config.samples or montecarlo.DEFAULT_SAMPLES
    histogram = sampler.sample(samples, config.seed, config.bins)
    if config.format == "json":
        text = json.dumps(
            {
                "n_samples": histogram.n_samples,
                "seed": histogram.seed,
                "min_et": histogram.min_et,
                "bin_edges": [float(e) for e in histogram.bin_edges],
                "counts": [int(c) for c in histogram.counts],
            },
            indent=2,
        )
        _write(text + "\n", config.output_path)
    else:
        _write(montecarlo.histogram_to_csv(histogram), config.output_path)
    bound = CONJECTURED_MIN_ET[config.target]
    summary = f"min_et={fmt(histogram.min_et)} excess={fmt(histogram.min_et - bound)}"
    if config.output_path:
        print(summary)
    else:
        logger.info(summary)
    return EXIT_OK


def cmd_verify(config: models.RunConfig, conf: configparser.ConfigParser) -> int:
    """Run the verification checks, one line per check."""
    tolerances = basis_speed_limits.get_tolerances(conf)
    results = checks.run_checks(
        only=config.only,
        d=config.d,
        samples=config.samples or checks.DEFAULT_VERIFY_SAMPLES,
        seed=config.seed,
        tol=config.tol,
        phase_tol=tolerances.phase,
        unbiased_tol=tolerances.unbiased,
    )
    if config.format == "json":
        text = json.dumps([r._asdict() for r in results], indent=2) + "\n"
    else:
        text = "".join(
            f"{'PASS' if r.passed else 'FAIL'} {r.name} error={fmt(r.error)} {r.detail}".rstrip()
            + "\n"
            for r in results
        )
    _write(text, config.output_path)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def _coherence_state(config: models.RunConfig) -> Tuple[np.ndarray, Optional[np.ndarray]]:
    """Density matrix and, for pure states, the state vector."""
    if config.bloch is not None:
        rho = states.state_from_bloch(config.bloch)
        if abs(states.bloch_norm(config.bloch) - 1) > 1e-9:
            return rho, None
        values, vectors = np.linalg.eigh(rho)
        return rho, vectors[:, int(np.argmax(values))]
    if config.theta is None:
        raise ValueError("Give the state with --bloch or --theta/--phi")
    psi = states.state_from_angles(config.theta, config.phi or 0.0)
    return states.pure_density(psi), psi


def cmd_coherence(config: models.RunConfig) -> int:
    """Print the maximal coherence on a time grid, t_mc and the coherence speed limit."""
    rho, psi = _coherence_state(config)
    energy = config.energy
    t_mc = coherence.t_mc(rho, energy)
    limit = coherence.mc_speed_limit(psi, energy).bound_value if psi is not None else None
    t_grid = np.linspace(0, math.pi / (2 * energy), config.points)
    values = [coherence.coherence_max_qubit(rho, energy, t) for t in t_grid]
    if config.format == "json":
        text = json.dumps(
            {
                "bloch": list(states.bloch_from_state(rho)),
                "energy": energy,
                "t_mc": t_mc,
                "mc_speed_limit": limit,
                "c_max": [{"t": float(t), "value": v} for t, v in zip(t_grid, values)],
            },
            indent=2,
        )
        _write(text + "\n", config.output_path)
        return EXIT_OK
    buffer = io.StringIO()
    buffer.write("t,c_max\n")
    for t, v in zip(t_grid, values):
        buffer.write(f"{fmt(t)},{fmt(v)}\n")
    buffer.write(f"# t_mc={fmt(t_mc)}\n")
    buffer.write(f"# mc_speed_limit={fmt(limit) if limit is not None else 'nan'}\n")
    _write(buffer.getvalue(), config.output_path)
    return EXIT_OK


def run(config: models.RunConfig, conf: configparser.ConfigParser) -> int:
    """Run one command, mapping failures to exit codes."""
    logger = logging.getLogger(__name__)
    logger.info("Running command '%s'", config.command)
    try:
        validate_run_config(config)
        if config.command == "bounds":
            return cmd_bounds(config)
        if config.command == "sample":
            return cmd_sample(config, conf)
        if config.command == "verify":
            return cmd_verify(config, conf)
        return cmd_coherence(config)
    except OSError as ose:
        logger.error("I/O error: %s", str(ose))
        return EXIT_IO
    except (errors.SpeedLimitError, ValueError, KeyError) as e:
        logger.error("Usage error: %s", str(e))
        return EXIT_USAGE


def build_parser() -> argparse.ArgumentParser:
    """Build the argument parser."""
    parser = argparse.ArgumentParser(prog="basis-speed-limits")
    parser.add_argument(
        "command",
        choices=COMMANDS,
        help="the command to run",
    )
    parser.add_argument(
        "-c",
        "--config-file",
        dest="config_file",
        default=None,
        type=str,
        help="read tolerances and sampling defaults from here",
    )
    parser.add_argument(
        "--d",
        dest="d",
        default=None,
        type=int,
        help="the Hilbert space dimension",
    )
    parser.add_argument(
        "--n",
        dest="n",
        default=None,
        type=int,
        help="the number of qubits, the dimension being 2^n",
    )
    parser.add_argument(
        "--energy",
        dest="energy",
        default=1.0,
        type=float,
        help="the mean energy E",
    )
    parser.add_argument(
        "--samples",
        dest="samples",
        default=None,
        type=int,
        help="the number of Monte-Carlo samples",
    )
    parser.add_argument(
        "--seed",
        dest="seed",
        default=checks.DEFAULT_SEED,
        type=int,
        help="the seed of the random streams",
    )
    parser.add_argument(
        "--bins",
        dest="bins",
        default=montecarlo.DEFAULT_BINS,
        type=int,
        help="the number of histogram bins over [0, 2pi]",
    )
    parser.add_argument(
        "--tol",
        dest="tol",
        default=None,
        type=float,
        help="the equality tolerance",
    )
    parser.add_argument(
        "--target",
        dest="target",
        default="tilde",
        choices=sorted(montecarlo.SAMPLERS),
        help="the qutrit basis to sample",
    )
    parser.add_argument(
        "--only",
        dest="only",
        default=None,
        action="append",
        choices=sorted(list(checks.CHECKS) + list(checks.CHECK_ALIASES)),
        help="run only this check (repeatable)",
    )
    parser.add_argument(
        "--workers",
        dest="workers",
        default=None,
        type=int,
        help="the number of worker processes",
    )
    parser.add_argument(
        "--bloch",
        dest="bloch",
        default=None,
        type=parse_bloch,
        help="the qubit state as 'rx,ry,rz'",
    )
    parser.add_argument(
        "--theta",
        dest="theta",
        default=None,
        type=float,
        help="the polar angle of a pure qubit state",
    )
    parser.add_argument(
        "--phi",
        dest="phi",
        default=None,
        type=float,
        help="the azimuthal angle of a pure qubit state",
    )
    parser.add_argument(
        "--points",
        dest="points",
        default=11,
        type=int,
        help="the number of points of the coherence time grid",
    )
    parser.add_argument(
        "--out",
        dest="output_path",
        default=None,
        type=str,
        help="the path to the output file, stdout if omitted",
    )
    parser.add_argument(
        "--format",
        dest="format",
        default="csv",
        choices=("csv", "json"),
        help="the output format",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        dest="verbose",
        default=False,
        action="store_true",
        help="whether to be verbose",
    )
    return parser


def parse_and_run_command(argv: Optional[List[str]] = None) -> int:
    """
    Examples:
        # python -m basis_speed_limits bounds --d 3 --energy 1
        # python -m basis_speed_limits sample --target tilde --samples 100000 --seed 42 \
            --out tilde.csv
        # python -m basis_speed_limits verify --only general_bound --d 5
        # python -m basis_speed_limits coherence --bloch 0,0,1
    """
    parser = build_parser()
    args = parser.parse_args(argv)
    log_level = logging.DEBUG if args.verbose else logging.INFO
    basis_speed_limits.MemoryFootprintFormatter.configure_logging(log_level)
    try:
        conf = basis_speed_limits.load_config(args.config_file)
    except IOError as ioe:
        logging.getLogger(__name__).error("%s", str(ioe))
        return EXIT_USAGE
    tolerances = basis_speed_limits.get_tolerances(conf)
    config = models.RunConfig(
        command=args.command,
        d=args.d,
        n=args.n,
        energy=args.energy,
        samples=args.samples,
        seed=args.seed,
        bins=args.bins,
        tol=args.tol if args.tol is not None else tolerances.equality,
        output_path=args.output_path,
        format=args.format,
        target=args.target,
        only=args.only,
        workers=args.workers,
        bloch=args.bloch,
        theta=args.theta,
        phi=args.phi,
        points=args.points,
    )
    return run(config, conf)


if __name__ == "__main__":
    sys.exit(parse_and_run_command())
