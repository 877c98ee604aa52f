from __future__ import annotations

from dataclasses import asdict, dataclass

from .errors import InputError


@dataclass(frozen=True)
class Config:
    tol: float = 1e-9
    terminal_tol: float = 1e-6
    delta: float = 1e-3
    coeff_bound: int = 5
    entry_bound: int = 1
    seed: int = 0
    max_retries: int = 32
    force: bool = False

    def __post_init__(self):
        for name in ("tol", "terminal_tol"):
            if not getattr(self, name) > 0:
                raise InputError(f"{name} must be positive")
        if not self.delta >= 0:
            raise InputError("delta must be nonnegative")
        for name in ("coeff_bound", "entry_bound", "max_retries"):
            if getattr(self, name) < 0:
                raise InputError(f"{name} must be nonnegative")
        if self.seed < 0:
            raise InputError("seed must be nonnegative")

    def to_dict(self) -> dict:
        return asdict(self)
