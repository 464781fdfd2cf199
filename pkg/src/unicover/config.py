"""Numerical tolerances shared by the whole package.

All thresholds live in one frozen :class:`Tolerances` record so a run can be
reproduced from the values printed in a CLI report header.
"""
from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class Tolerances:
    unitarity: float = 1e-10
    hermiticity: float = 1e-12
    idempotency: float = 1e-10
    projection_spectrum: float = 1e-8
    # angle (radians) an eigenvalue must keep from -1 for the principal log
    branch_margin: float = 1e-6
    # consecutive samples must satisfy ||u_{j-1}^* u_j - 1|| < 1 - gap_margin
    gap_margin: float = 0.05
    # n_i * w_i must be this close to an integer before it is rounded
    lattice_residual: float = 1e-6
    loop: float = 1e-9
    compatibility: float = 1e-8
    invertibility: float = 1e-10
    max_points: int = 2**20

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)

    def replace(self, **changes) -> "Tolerances":
        return dataclasses.replace(self, **changes)


DEFAULT = Tolerances()


def load_config(path: str | Path | None) -> Tolerances:
    """Read a JSON object of overrides; unknown keys are rejected."""
    if path is None:
        return DEFAULT
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    known = {f.name: f.type for f in dataclasses.fields(Tolerances)}
    unknown = sorted(set(data) - set(known))
    if unknown:
        raise ValueError(f"unknown config keys: {', '.join(unknown)}")
    if "max_points" in data:
        data["max_points"] = int(data["max_points"])
    return DEFAULT.replace(**{k: v for k, v in data.items()})
