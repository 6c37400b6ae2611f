"""Run configuration for batch reproduction."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional


@dataclass(frozen=True)
class MonteCarloConfig:
    ps: tuple[str, ...] = ("3/5", "3/4", "0.8535533905932737", "9/10")
    trials: int = 100_000
    seed: int = 0


@dataclass(frozen=True)
class ReproConfig:
    out_dir: str = "artifacts"
    n: int = 6
    tradeoff_steps: int = 201
    invariant_grid: int = 16
    j_budget: Optional[int] = None
    mc: MonteCarloConfig = field(default_factory=MonteCarloConfig)

    def __post_init__(self):
        if self.tradeoff_steps < 2:
            raise ValueError("tradeoff_steps must be >= 2")
        if self.invariant_grid < 8:
            raise ValueError("invariant_grid must be >= 8")

    @classmethod
    def from_dict(cls, d: dict) -> "ReproConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys: {', '.join(sorted(extra))}")
        d = dict(d)
        if "mc" in d:
            mc = dict(d["mc"])
            if "ps" in mc:
                mc["ps"] = tuple(str(p) for p in mc["ps"])
            d["mc"] = MonteCarloConfig(**mc)
        return cls(**d)

    @classmethod
    def load(cls, path) -> "ReproConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))

    def as_dict(self) -> dict:
        return asdict(self)
