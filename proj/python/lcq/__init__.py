"""Landau-de Gennes Q-tensor energies, constant relations and solvers."""

from ._lcq import *  # noqa: F401,F403
from ._lcq import PreconditionError, run_experiment

__all__ = [name for name in dir() if not name.startswith("_")]


def verify(ini_text: str = "", out_dir: str = "lcq_out") -> bool:
    """Run the verification suites; returns True when every assertion holds."""
    ok, _, _ = run_experiment(ini_text, "verify", out_dir)
    return ok
