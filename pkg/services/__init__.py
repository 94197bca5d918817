"""
服务层模块
"""

from services.run_service import (
    ConvergenceRow,
    cmd_converge,
    cmd_field,
    cmd_modes,
    convergence_table,
)

__all__ = [
    "ConvergenceRow",
    "cmd_modes",
    "cmd_field",
    "cmd_converge",
    "convergence_table",
]
