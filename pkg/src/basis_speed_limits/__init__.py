import concurrent.futures
import configparser
import json
import logging
import os
import resource
import sys
from typing import Callable
from typing import Dict
from typing import Iterable
from typing import List
from typing import Optional
from typing import TypeVar
from typing import Union

from basis_speed_limits import models

T = TypeVar("T")
R = TypeVar("R")

TOLERANCES_SECTION = "tolerances"

MONTECARLO_SECTION = "montecarlo"

DEFAULT_TOLERANCES = models.Tolerances(equality=1e-10, phase=1e-9, unbiased=1e-9)


def format_float(value: float) -> str:
    """
    Format a float with 17 significant digits, stable across runs.

    :param float value: the value
    :rtype: str
    :return: the formatted value
    """
    return f"{value:.17g}"


def save_to_json(obj: Union[Dict, List], file_path: str) -> None:
    """
    Save python object.

    :param dict|list obj: the python object
    :param str file_path: the path where to save to
    """
    with open(file_path, "w") as f:
        json.dump(obj, f, indent=2 * " ", sort_keys=True, default=str)


def load_config(file_path: Optional[str] = None) -> configparser.ConfigParser:
    """
    Load the configuration, falling back to an empty one.

    :param str|None file_path: optional path to an INI file
    :rtype: configparser.ConfigParser
    :return: the conf object
    :raises IOError: if the file was given but cannot be read
    """
    conf = configparser.ConfigParser()
    if file_path:
        if not os.path.isfile(file_path):
            raise IOError(f"Config file '{file_path}' not found")
        conf.read(file_path)
    return conf


def get_tolerances(conf: configparser.ConfigParser) -> models.Tolerances:
    """
    Read tolerances from the conf object.

    :param configparser.ConfigParser conf: the conf object
    :rtype: Tolerances
    :return: the tolerances, defaults for missing keys
    """
    if not conf.has_section(TOLERANCES_SECTION):
        return DEFAULT_TOLERANCES
    section = conf[TOLERANCES_SECTION]
    return models.Tolerances(
        equality=section.getfloat("equality", DEFAULT_TOLERANCES.equality),
        phase=section.getfloat("phase", DEFAULT_TOLERANCES.phase),
        unbiased=section.getfloat("unbiased", DEFAULT_TOLERANCES.unbiased),
    )


def parallel_map(func: Callable[[T], R], items: Iterable[T], workers: int = 1) -> List[R]:
    """
    Map a picklable function over items, preserving the order of the items.

    :param callable func: a module-level function
    :param iterable items: the work items
    :param int workers: number of processes, 1 runs in-process
    :rtype: list
    :return: the results in input order
    """
    items = list(items)
    if workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]
    with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


class MemoryFootprintFormatter(logging.Formatter):
    """Special formatter keeping track how much memory is used."""

    _DEFAULT_FMT = "%(levelname)s -> [%(asctime)s] %(message)s"
    _DEFAULT_DATEFMT = "%Y-%m-%d %H:%M:%S"

    def __init__(
        self,
        fmt: str = _DEFAULT_FMT,
        datefmt: str = _DEFAULT_DATEFMT,
    ):
        """Override method."""
        super(MemoryFootprintFormatter, self).__init__(fmt, datefmt)

    @classmethod
    def configure_logging(cls, level: int) -> None:
        """
        Configure some sane defaults, logging to stderr so stdout carries reports only.

        :param int level: the debugging level.
        """
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(cls())
        logging.root.addHandler(handler)
        logging.root.setLevel(level)

    @staticmethod
    def _get_resident_memory_size() -> float:
        """
        Retrieve resident memory usage in bytes from the /proc filesystem.

        :rtype: float
        :return: the value of the memory size
        """
        procfs_fn = os.path.join("/", "proc", str(os.getpid()), "status")
        procfs_stats_scale = {"kB": 1024.0, "mB": 1024.0 * 1024.0}
        with open(procfs_fn) as pf:
            pf_data = pf.read()
        # e.g. "VmRSS:  9999  kB\n ..."
        i = pf_data.index("VmRSS:")
        v = pf_data[i:].split(None, 3)
        if len(v) < 3:
            return 0.0
        return float(v[1]) * procfs_stats_scale.get(v[2], 1024.0)

    @classmethod
    def _get_memory_consumption(cls) -> float:
        """
        Get the current memory consumption in megabytes.

        :rtype: float
        :return: the memory consumption
        """
        try:
            res_mem_size = cls._get_resident_memory_size()
        except (IOError, ValueError):
            if sys.platform == "darwin":
                # bytes on OSX, kilobytes on Linux
                res_mem_size = resource.getrusage(resource.RUSAGE_SELF).ru_maxrss
            else:
                res_mem_size = 1024.0 * 1024.0
        return res_mem_size / (1024.0 * 1024.0)

    def format(self, record: logging.LogRecord) -> str:
        """Override."""
        # A record can be formatted multiple times by several handlers.
        if not hasattr(record, "formatted"):
            record.msg = "[%04dmb] %s" % (self._get_memory_consumption(), record.msg)
            setattr(record, "formatted", True)
        return super(MemoryFootprintFormatter, self).format(record)
