"""Points of the real period space together with a skew-invariant Kähler class.

A :class:`RealTriple` ``(omega_plus, omega_minus, gamma)`` is stored in
ambient lattice coordinates.  The period itself is ``omega_plus +
i*omega_minus``; since the eigenlattices are orthogonal, the isotropy
condition reduces to ``q(omega_plus) == q(omega_minus) > 0``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import GammaDegenerate, InvalidTriple, NotInCone
from .involution import EigenSplit
from .lattice_core import DEFAULT_TOL, Lattice, integer_vectors_in_box

DEFAULT_COEFF_BOUND = 5


@dataclass(frozen=True, eq=False)
class RealTriple:
    omega_plus: np.ndarray
    omega_minus: np.ndarray
    gamma: np.ndarray

    def __post_init__(self):
        for name in ("omega_plus", "omega_minus", "gamma"):
            arr = np.array(getattr(self, name), dtype=float)
            if arr.ndim != 1:
                raise InvalidTriple(f"{name} must be a vector")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (len(self.omega_plus) == len(self.omega_minus) == len(self.gamma)):
            raise InvalidTriple("triple components have different lengths")

    def __iter__(self):
        return iter((self.omega_plus, self.omega_minus, self.gamma))

    def replace(self, **changes) -> "RealTriple":
        data = {"omega_plus": self.omega_plus, "omega_minus": self.omega_minus, "gamma": self.gamma}
        data.update(changes)
        return RealTriple(**data)

    def distance(self, other: "RealTriple") -> float:
        """Sup-norm distance over all three components."""
        return max(float(np.max(np.abs(a - b), initial=0.0)) for a, b in zip(self, other))

    def to_dict(self) -> dict:
        return {
            "omega_plus": self.omega_plus.tolist(),
            "omega_minus": self.omega_minus.tolist(),
            "gamma": self.gamma.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RealTriple":
        try:
            return cls(data["omega_plus"], data["omega_minus"], data["gamma"])
        except (KeyError, TypeError, ValueError) as exc:
            raise InvalidTriple(f"malformed triple: {exc}") from exc


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    residual: float

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "residual": self.residual}


@dataclass(frozen=True)
class Report:
    checks: tuple[Check, ...] = ()

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def __add__(self, other: "Report") -> "Report":
        return Report(self.checks + other.checks)

    def __bool__(self):
        return self.passed

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checks": [c.to_dict() for c in self.checks]}


@dataclass(frozen=True)
class GenericityReport:
    generic: bool
    coeff_bound: int
    witness: Optional[tuple[int, ...]] = field(default=None)

    def to_dict(self) -> dict:
        return {
            "generic": self.generic,
            "coeff_bound": self.coeff_bound,
            "witness": list(self.witness) if self.witness is not None else None,
        }


def _sup(x) -> float:
    return float(np.max(np.abs(x), initial=0.0))


def validate_triple(lat: Lattice, split: EigenSplit, t: RealTriple, tol: float = DEFAULT_TOL,
                    normalized: bool = False) -> Report:
    """Check every triple invariant and report residuals.

    With ``normalized=True`` it also requires ``q(omega_plus) == 1``.
    """
    if len(t.gamma) != lat.rank:
        raise InvalidTriple(f"triple vectors must have length {lat.rank}")
    qp, qm, qg = lat.q(t.omega_plus), lat.q(t.omega_minus), lat.q(t.gamma)
    checks = [
        Check("q(omega_plus) > 0", qp > tol, qp),
        Check("q(omega_plus) == q(omega_minus)", abs(qp - qm) <= tol, abs(qp - qm)),
        Check("b(omega_minus, gamma) == 0", abs(lat.b(t.omega_minus, t.gamma)) <= tol,
              abs(lat.b(t.omega_minus, t.gamma))),
        Check("q(gamma) > 0", qg > tol, qg),
    ]
    for name, vec, part in (("omega_plus in L+", t.omega_plus, split.plus_part),
                            ("omega_minus in L-", t.omega_minus, split.minus_part),
                            ("gamma in L-", t.gamma, split.minus_part)):
        res = _sup(vec - part(vec))
        checks.append(Check(name, res <= tol, res))
    if normalized:
        checks.append(Check("q(omega_plus) == 1", abs(qp - 1.0) <= tol, abs(qp - 1.0)))
    return Report(tuple(checks))


def normalize_triple(lat: Lattice, split: EigenSplit, t: RealTriple) -> RealTriple:
    """Rescale the period to q = 1 and make gamma orthogonal to omega_minus."""
    qp, qm = lat.q(t.omega_plus), lat.q(t.omega_minus)
    if not (qp > 0 and qm > 0):
        raise InvalidTriple("omega_plus and omega_minus must have positive square")
    if not lat.q(t.gamma) > 0:
        raise InvalidTriple("gamma must have positive square")
    wp = t.omega_plus / math.sqrt(qp)
    wm = t.omega_minus / math.sqrt(qm)
    gamma = t.gamma - lat.b(t.gamma, wm) * wm
    if not lat.q(gamma) > 0:
        raise GammaDegenerate("projecting gamma off omega_minus leaves q(gamma) <= 0")
    return RealTriple(wp, wm, gamma)


def is_generic(lat: Lattice, t: RealTriple, coeff_bound: int = DEFAULT_COEFF_BOUND,
               tol: float = DEFAULT_TOL) -> GenericityReport:
    """Look for a small integral class orthogonal to the whole period.

    The period counts as generic when no nonzero vector of the coefficient
    box is tol-orthogonal to both omega_plus and omega_minus.
    """
    box = integer_vectors_in_box(lat, coeff_bound)
    if box.shape[0] == 0:
        return GenericityReport(True, coeff_bound)
    g = lat.matrix
    hit = (np.abs(box @ (g @ t.omega_plus)) <= tol) & (np.abs(box @ (g @ t.omega_minus)) <= tol)
    idx = np.flatnonzero(hit)
    if idx.size == 0:
        return GenericityReport(True, coeff_bound)
    return GenericityReport(False, coeff_bound, tuple(int(x) for x in box[idx[0]]))


def same_cone_component(lat: Lattice, g1, g2) -> bool:
    """Whether two positive vectors of a hyperbolic space lie in one half-cone."""
    if not lat.q(g1) > 0 or not lat.q(g2) > 0:
        raise NotInCone("both vectors must have positive square")
    return lat.b(g1, g2) > 0
