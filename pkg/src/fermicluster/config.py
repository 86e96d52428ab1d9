"""Numerical tolerances and size limits, overridable through the environment.

``FERMICLUSTER_EPS_NORM``   normalization / unitarity tolerance (default 1e-12)
``FERMICLUSTER_EPS_PRUNE``  branch probabilities at or below this are dropped (default 1e-12)
``FERMICLUSTER_N_MAX``      largest register size accepted (default 16)
``FERMICLUSTER_N_TABLE``    largest chain for correction-table derivation (default 6)
"""

from __future__ import annotations

import os
from dataclasses import dataclass, replace


def _env_float(name: str, default: float) -> float:
    raw = os.environ.get(name)
    return default if raw in (None, "") else float(raw)


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    return default if raw in (None, "") else int(raw)


@dataclass(frozen=True)
class Tolerances:
    eps_norm: float = 1e-12
    eps_prune: float = 1e-12
    n_max: int = 16
    n_table: int = 6

    @classmethod
    def from_env(cls) -> "Tolerances":
        return cls(
            eps_norm=_env_float("FERMICLUSTER_EPS_NORM", cls.eps_norm),
            eps_prune=_env_float("FERMICLUSTER_EPS_PRUNE", cls.eps_prune),
            n_max=_env_int("FERMICLUSTER_N_MAX", cls.n_max),
            n_table=_env_int("FERMICLUSTER_N_TABLE", cls.n_table),
        )


TOL = Tolerances.from_env()


def set_tolerances(**overrides) -> Tolerances:
    """Replace the process-wide tolerances (used by the CLI flags)."""
    global TOL
    TOL = replace(TOL, **overrides)
    return TOL


def tol() -> Tolerances:
    return TOL
