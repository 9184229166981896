"""Regenerating codes with cooperative repair and tiered base-station assistance."""

from .bounds import max_recoverable_file, repair_cost
from .model import OperatingPoint, RepairVariables, SystemParams
from .optimizer import min_cost_at_storage, optimal_points, tradeoff_curve

__all__ = [
    "OperatingPoint",
    "RepairVariables",
    "SystemParams",
    "max_recoverable_file",
    "min_cost_at_storage",
    "optimal_points",
    "repair_cost",
    "tradeoff_curve",
]
