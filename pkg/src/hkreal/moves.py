"""Elementary moves on a real triple and the two-plane lemma.

Rotate
    rigid rotation of ``(omega_minus, gamma)`` in the plane they span.
Perturb
    small seeded perturbation of all three vectors inside their eigenspaces,
    followed by re-normalization.
Retarget
    replace ``gamma`` by another class of the positive cone of the
    hyperbolic space ``omega_minus^perp``, in the same half-cone.  Legal
    only when the period passes the genericity proxy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.linalg import orth

from .errors import (
    DegenerateSpan,
    GammaDegenerate,
    InputError,
    InvalidTriple,
    NotEnoughPositiveSquares,
    NotGeneric,
    NotInCone,
    NotInEigenspace,
    NotOrthogonal,
    PositivityLost,
    WrongComponent,
)
from .involution import EigenSplit
from .lattice_core import (
    DEFAULT_TOL,
    Lattice,
    SubspaceBasis,
    orthogonal_complement,
    positive_vector,
    signature,
)
from .period_domain import (
    GenericityReport,
    RealTriple,
    is_generic,
    normalize_triple,
    same_cone_component,
    validate_triple,
)

ROTATE, PERTURB, RETARGET, NORMALIZE = "Rotate", "Perturb", "Retarget", "Normalize"
MOVE_KINDS = (ROTATE, PERTURB, RETARGET)


@dataclass(frozen=True, eq=False)
class MoveParams:
    kind: str
    theta: float = 0.0
    delta: float = 0.0
    seed: int = 0
    new_gamma: Optional[np.ndarray] = None
    coeff_bound: Optional[int] = None
    force: bool = False

    def __post_init__(self):
        if self.kind not in MOVE_KINDS + (NORMALIZE,):
            raise InputError(f"unknown move kind {self.kind!r}")
        if not math.isfinite(self.theta):
            raise InputError("theta must be finite")
        if not self.delta >= 0:
            raise InputError("delta must be nonnegative")
        if self.kind == RETARGET:
            if self.new_gamma is None:
                raise InputError("Retarget needs new_gamma")
            g = np.array(self.new_gamma, dtype=float)
            g.setflags(write=False)
            object.__setattr__(self, "new_gamma", g)

    def to_dict(self) -> dict:
        d: dict = {"kind": self.kind}
        if self.kind == ROTATE:
            d["theta"] = self.theta
        elif self.kind == PERTURB:
            d.update(delta=self.delta, seed=self.seed)
        elif self.kind == RETARGET:
            d.update(new_gamma=self.new_gamma.tolist(), coeff_bound=self.coeff_bound,
                     force=self.force)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "MoveParams":
        try:
            return cls(
                kind=data["kind"],
                theta=float(data.get("theta", 0.0)),
                delta=float(data.get("delta", 0.0)),
                seed=int(data.get("seed", 0)),
                new_gamma=data.get("new_gamma"),
                coeff_bound=data.get("coeff_bound"),
                force=bool(data.get("force", False)),
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise InputError(f"malformed move: {exc}") from exc


# --- lemma ------------------------------------------------------------------

def _q_frame(lat: Lattice, u, w):
    """q-orthonormal frame (e1, e2) of a positive definite plane, e1 along u."""
    e1 = u / math.sqrt(lat.q(u))
    rest = w - lat.b(w, e1) * e1
    return e1, rest / math.sqrt(lat.q(rest))


def lemma_vector(lat: Lattice, v1, v2, sub: SubspaceBasis | None = None,
                 tol: float = DEFAULT_TOL) -> np.ndarray:
    """Vector v making both planes <v, v1> and <v, v2> positive definite.

    ``sub`` restricts the search to a subspace (e.g. the real span of L-);
    v1 and v2 must lie in it.  If <v1, v2> is itself positive definite, v is
    taken inside it, at the direction farthest from both lines; if it is
    hyperbolic, v is a positive vector of its orthogonal complement.  A
    degenerate <v1, v2> is handled by an explicit correction.  The result is
    scaled to q(v) = 1.
    """
    v1 = np.asarray(v1, dtype=float)
    v2 = np.asarray(v2, dtype=float)
    if not (lat.q(v1) > tol and lat.q(v2) > tol):
        raise InputError("lemma needs q(v1) > 0 and q(v2) > 0")
    if sub is None:
        n_pos = signature(lat).pos
    else:
        frame = orth(sub.vectors.T)
        n_pos = int(np.sum(np.linalg.eigvalsh(frame.T @ lat.matrix @ frame) > tol))
    if n_pos < 2:
        raise NotEnoughPositiveSquares(f"form has {n_pos} positive squares, need 2")

    u1 = v1 / math.sqrt(lat.q(v1))
    u2 = v2 / math.sqrt(lat.q(v2))
    c = lat.b(u1, u2)
    rest = u2 - c * u1
    det = 1.0 - c * c  # Gram determinant of (u1, u2)

    if det > tol and np.max(np.abs(rest)) > tol:
        # positive definite plane: pick the direction at equal, maximal angle
        e1, e2 = _q_frame(lat, u1, u2)
        a2 = math.atan2(lat.b(u2, e2), lat.b(u2, e1))
        half = 0.5 * math.atan2(math.sin(a2), math.cos(a2))
        theta = half + math.pi / 2 if math.cos(half) > abs(math.sin(half)) else half
        return math.cos(theta) * e1 + math.sin(theta) * e2

    if det < -tol or np.max(np.abs(rest)) <= tol:
        # hyperbolic plane, or v1 parallel to v2: complement has a positive square
        span = [u1] if np.max(np.abs(rest)) <= tol else [u1, u2]
        comp = orthogonal_complement(lat, span, tol, within=sub)
        v = positive_vector(lat, comp, tol)
        if v is None:
            raise NotEnoughPositiveSquares("orthogonal complement has no positive square")
        return v

    return _degenerate_plane_vector(lat, u1, u2, sub, tol)


def _degenerate_plane_vector(lat, u1, u2, sub, tol):
    # <u1, u2> = <u1, n> with n isotropic and b(u1, n) = 0; write u2 = a(u1 + n).
    a = lat.b(u2, u1)
    n = (u2 - a * u1) / a
    if np.max(np.abs(n)) <= tol:
        raise DegenerateSpan("degenerate plane with parallel vectors")
    # m with b(m, u1) = 0, b(m, n) = 1, then shifted along n to q(m) = 1;
    # v = u1 - m gives b(v, u1) = 1, q(v) = 2, b(v, u1 + n) = 0.
    basis = np.eye(lat.rank) if sub is None else sub.vectors
    system = np.vstack([basis @ lat.matrix @ u1, basis @ lat.matrix @ n])
    coeffs, *_ = np.linalg.lstsq(system, np.array([0.0, 1.0]), rcond=None)
    m = basis.T @ coeffs
    if abs(lat.b(m, n) - 1.0) > 1e-6:
        raise DegenerateSpan("form is degenerate on the ambient space")
    m = m + 0.5 * (1.0 - lat.q(m)) * n
    v = u1 - m
    return v / math.sqrt(lat.q(v))


# --- moves ------------------------------------------------------------------

def _require_valid(lat, split, t, tol):
    report = validate_triple(lat, split, t, tol)
    if not report.passed:
        names = ", ".join(c.name for c in report.failures())
        raise InvalidTriple(f"invalid triple: {names}")


def rotate(lat: Lattice, split: EigenSplit, t: RealTriple, theta: float,
           tol: float = DEFAULT_TOL) -> RealTriple:
    """Rotate (omega_minus, gamma) by theta, keeping both q-norms."""
    _require_valid(lat, split, t, tol)
    rm = math.sqrt(lat.q(t.omega_minus))
    rg = math.sqrt(lat.q(t.gamma))
    u1 = t.omega_minus / rm
    u2 = t.gamma / rg
    cs, sn = math.cos(theta), math.sin(theta)
    return t.replace(omega_minus=rm * (cs * u1 + sn * u2), gamma=rg * (-sn * u1 + cs * u2))


def perturb(lat: Lattice, split: EigenSplit, t: RealTriple, delta: float, seed: int,
            tol: float = DEFAULT_TOL) -> RealTriple:
    """Uniform seeded perturbation in eigen-coordinates, then normalization.

    Draw order is fixed: omega_plus coordinates, then omega_minus, then gamma.
    """
    if not delta >= 0:
        raise InputError("delta must be nonnegative")
    _require_valid(lat, split, t, tol)
    rng = np.random.default_rng(seed)
    kp, km = len(split.plus_basis), len(split.minus_basis)
    wp = t.omega_plus + split.from_plus(rng.uniform(-delta, delta, kp))
    wm = t.omega_minus + split.from_minus(rng.uniform(-delta, delta, km))
    g = t.gamma + split.from_minus(rng.uniform(-delta, delta, km))
    if not (lat.q(wp) > tol and lat.q(wm) > tol and lat.q(g) > tol):
        raise PositivityLost(f"perturbation of size {delta} destroyed positivity")
    try:
        out = normalize_triple(lat, split, RealTriple(wp, wm, g))
    except GammaDegenerate as exc:
        raise PositivityLost(str(exc)) from exc
    if lat.q(out.gamma) <= tol:
        raise PositivityLost("gamma lost positivity after re-orthogonalization")
    return out


def retarget_gamma(lat: Lattice, split: EigenSplit, t: RealTriple, new_gamma,
                   require_generic: GenericityReport, tol: float = DEFAULT_TOL,
                   force: bool = False) -> RealTriple:
    """Move gamma inside the positive cone of omega_minus^perp within L- (x) R."""
    if not require_generic.generic and not force:
        raise NotGeneric(f"period is not generic; witness {require_generic.witness}")
    _require_valid(lat, split, t, tol)
    g = np.asarray(new_gamma, dtype=float)
    if g.shape != t.gamma.shape:
        raise InputError("new_gamma has the wrong length")
    if np.max(np.abs(g - split.minus_part(g))) > tol:
        raise NotInEigenspace("new_gamma is not in the (-1)-eigenspace")
    if abs(lat.b(t.omega_minus, g)) > tol:
        raise NotOrthogonal("new_gamma is not orthogonal to omega_minus")
    if not lat.q(g) > tol:
        raise NotInCone("new_gamma must have positive square")
    if not same_cone_component(lat, t.gamma, g):
        raise WrongComponent("new_gamma lies in the opposite half-cone")
    return t.replace(gamma=g)


def apply_move(lat: Lattice, split: EigenSplit, t: RealTriple, move: MoveParams,
               tol: float = DEFAULT_TOL) -> RealTriple:
    if move.kind == ROTATE:
        return rotate(lat, split, t, move.theta, tol)
    if move.kind == PERTURB:
        return perturb(lat, split, t, move.delta, move.seed, tol)
    if move.kind == NORMALIZE:
        return normalize_triple(lat, split, t)
    bound = move.coeff_bound if move.coeff_bound is not None else 5
    report = is_generic(lat, t, bound, tol)
    return retarget_gamma(lat, split, t, move.new_gamma, report, tol, force=move.force)
