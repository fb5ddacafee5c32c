"""Tramp ship scheduling with berth time windows.

Expanded network and MILP model, a branch-and-bound solver with MPS export,
a two-phase fix-and-reoptimize heuristic and an independent validator.
"""

from .instance import Instance, load_instance, read_instance, save_instance, validate_instance, write_instance
from .schedule import Schedule

__version__ = "0.1.0"

__all__ = ["Instance", "Schedule", "load_instance", "read_instance", "save_instance", "validate_instance",
           "write_instance", "__version__"]
