"""Drive a real triple to a prescribed Kähler class by six elementary moves.

The sequence is perturb, retarget, rotate, perturb, retarget, rotate:

1. perturb to a generic triple;
2. pick v in L- (x) R making <v, omega_minus> and <v, l> positive definite
   (:func:`~hkreal.moves.lemma_vector`) and retarget gamma into
   <v, omega_minus>;
3. rotate omega_minus onto the ray of v;
4. perturb again, keeping <omega_minus, l> positive definite;
5. retarget gamma to the omega_minus-orthogonal part of l, scaled to q(l);
6. rotate gamma onto l.

Every step is recorded in a :class:`Trace` together with the checks that
certify it; :func:`verify_trace` re-derives all of them from the trace alone.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import Config
from .errors import (
    GenericityUnreachable,
    InputError,
    InvalidTriple,
    LemmaFailed,
    NotEnoughPositiveSquares,
    NotRealHomologicalType,
    PositivityLost,
    TargetNotInMinus,
    TargetNotPositive,
    HKRealError,
)
from .involution import EigenSplit, Involution
from .lattice_core import Lattice, SubspaceBasis, gram_of_span
from .moves import (
    MOVE_KINDS,
    NORMALIZE,
    PERTURB,
    RETARGET,
    ROTATE,
    MoveParams,
    apply_move,
    lemma_vector,
    perturb,
    retarget_gamma,
    rotate,
)
from .period_domain import Check, RealTriple, Report, is_generic, normalize_triple, validate_triple

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class TraceStep:
    index: int
    move: MoveParams
    triple_before: RealTriple
    triple_after: RealTriple
    checks: Report
    certified: bool

    def to_dict(self) -> dict:
        return {
            "index": self.index,
            "move": self.move.to_dict(),
            "triple_before": self.triple_before.to_dict(),
            "triple_after": self.triple_after.to_dict(),
            "certified": self.certified,
            "checks": self.checks.to_dict(),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "TraceStep":
        checks = Report(tuple(Check(c["name"], bool(c["passed"]), float(c["residual"]))
                              for c in data.get("checks", {}).get("checks", [])))
        return cls(
            index=int(data["index"]),
            move=MoveParams.from_dict(data["move"]),
            triple_before=RealTriple.from_dict(data["triple_before"]),
            triple_after=RealTriple.from_dict(data["triple_after"]),
            checks=checks,
            certified=bool(data["certified"]),
        )


@dataclass(frozen=True, eq=False)
class Trace:
    lattice: Lattice
    involution: Involution
    target: tuple[int, ...]
    initial: RealTriple
    steps: tuple[TraceStep, ...]
    success: bool
    final_gamma_error: float
    params: Config = field(default_factory=Config)

    @property
    def final(self) -> RealTriple:
        return self.steps[-1].triple_after if self.steps else self.initial

    @property
    def moves(self) -> list[str]:
        return [s.move.kind for s in self.steps if s.move.kind in MOVE_KINDS]

    def to_dict(self) -> dict:
        return {
            "lattice": self.lattice.to_dict(),
            "involution": self.involution.to_dict(),
            "target": list(self.target),
            "initial": self.initial.to_dict(),
            "params": self.params.to_dict(),
            "success": self.success,
            "final_gamma_error": self.final_gamma_error,
            "steps": [s.to_dict() for s in self.steps],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "Trace":
        try:
            steps = tuple(TraceStep.from_dict(s) for s in data["steps"])
            initial = (RealTriple.from_dict(data["initial"]) if "initial" in data
                       else steps[0].triple_before)
            return cls(
                lattice=Lattice.from_dict(data["lattice"]),
                involution=Involution(tuple(tuple(int(x) for x in r)
                                            for r in data["involution"]["matrix"])),
                target=tuple(int(x) for x in data["target"]),
                initial=initial,
                steps=steps,
                success=bool(data["success"]),
                final_gamma_error=float(data["final_gamma_error"]),
                params=Config(**data.get("params", {})),
            )
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise InputError(f"malformed trace: {exc}") from exc


def derive_seed(seed: int, stage: int, attempt: int) -> int:
    return int(np.random.SeedSequence([seed, stage, attempt]).generate_state(1)[0])


def _plane_positive(lat: Lattice, a, b, tol: float) -> tuple[bool, float]:
    m = gram_of_span(lat, [a / math.sqrt(lat.q(a)), b / math.sqrt(lat.q(b))])
    det = float(np.linalg.det(m))
    return bool(m[0, 0] > tol and det > tol), det


def _cone_part(lat: Lattice, x, omega_minus, norm2: float, reference) -> np.ndarray:
    """Part of x orthogonal to omega_minus, scaled to q = norm2, in reference's half-cone."""
    y = x - (lat.b(x, omega_minus) / lat.q(omega_minus)) * omega_minus
    y = y * math.sqrt(norm2 / lat.q(y))
    return -y if lat.b(reference, y) < 0 else y


def _frame_angle(lat: Lattice, t: RealTriple, x) -> tuple[float, float]:
    """Coordinates of x in the q-orthonormal frame (omega_minus, gamma)."""
    u1 = t.omega_minus / math.sqrt(lat.q(t.omega_minus))
    u2 = t.gamma / math.sqrt(lat.q(t.gamma))
    return lat.b(x, u1), lat.b(x, u2)


def step_checks(lat: Lattice, split: EigenSplit, move: MoveParams, before: RealTriple,
                after: RealTriple, cfg: Config) -> Report:
    """Legality checks of one recorded step (shared by planner and verifier)."""
    report = validate_triple(lat, split, after, cfg.tol, normalized=True)
    if move.kind == PERTURB:
        gen = is_generic(lat, after, cfg.coeff_bound, cfg.tol)
        report += Report((Check(f"generic at bound {cfg.coeff_bound}", gen.generic, 0.0),))
    elif move.kind == RETARGET:
        bound = move.coeff_bound if move.coeff_bound is not None else cfg.coeff_bound
        gen = is_generic(lat, before, bound, cfg.tol)
        report += Report((
            Check(f"generic at bound {bound}", gen.generic, 0.0),
            Check("same cone component", lat.b(before.gamma, after.gamma) > 0,
                  lat.b(before.gamma, after.gamma)),
        ))
    return report


class _Recorder:
    def __init__(self, lat, split, cfg):
        self.lat, self.split, self.cfg = lat, split, cfg
        self.steps: list[TraceStep] = []

    def add(self, move: MoveParams, before: RealTriple, after: RealTriple,
            extra: tuple[Check, ...] = ()) -> RealTriple:
        checks = step_checks(self.lat, self.split, move, before, after, self.cfg) + Report(extra)
        self.steps.append(TraceStep(len(self.steps), move, before, after, checks, checks.passed))
        return after


def _generic_perturbation(lat, split, t, cfg: Config, stage: int, target=None):
    """Seeded perturbation retried until generic (and, with a target, until
    <omega_minus, target> stays positive definite)."""
    delta = cfg.delta
    last = None
    for attempt in range(cfg.max_retries + 1):
        move = MoveParams(PERTURB, delta=delta, seed=derive_seed(cfg.seed, stage, attempt))
        try:
            out = perturb(lat, split, t, move.delta, move.seed, cfg.tol)
        except PositivityLost:
            log.info("stage %d attempt %d: positivity lost, halving delta", stage, attempt)
            delta /= 2
            continue
        extra: tuple[Check, ...] = ()
        if target is not None:
            ok, det = _plane_positive(lat, out.omega_minus, target, cfg.tol)
            extra = (Check("plane(omega_minus, l) positive definite", ok, det),)
            if not ok:
                # shrinking the step keeps omega_minus near the good direction
                log.info("stage %d attempt %d: plane with target not positive", stage, attempt)
                delta /= 2
                continue
        gen = is_generic(lat, out, cfg.coeff_bound, cfg.tol)
        if gen.generic:
            return move, out, extra
        log.info("stage %d attempt %d: not generic, witness %s", stage, attempt, gen.witness)
        last = (move, out, extra)
    if cfg.force and last is not None:
        log.warning("stage %d: no generic perturbation found; continuing uncertified", stage)
        return last
    raise GenericityUnreachable(
        f"no generic perturbation after {cfg.max_retries + 1} attempts at bound {cfg.coeff_bound}")


def plan_path(lat: Lattice, c: Involution, split: EigenSplit, t0: RealTriple, l,
              params: Optional[Config] = None) -> Trace:
    """Build the certified six-move trace taking gamma of ``t0`` to ``l``."""
    cfg = params or Config()
    target = tuple(int(x) for x in l)
    if len(target) != lat.rank or any(x != y for x, y in zip(l, target)):
        raise InputError("target must be an integer vector of the lattice rank")
    if split.plus_sig.pos != 1:
        raise NotRealHomologicalType("involution is not a real homological type")
    if c.apply_int(target) != tuple(-x for x in target):
        raise TargetNotInMinus("target is not in the (-1)-eigenlattice")
    if lat.b_int(target, target) <= 0:
        raise TargetNotPositive(f"q(target) = {lat.b_int(target, target)} is not positive")
    check0 = validate_triple(lat, split, t0, cfg.tol)
    if not check0.passed:
        raise InvalidTriple("initial triple invalid: " + ", ".join(x.name for x in check0.failures()))

    lv = np.array(target, dtype=float)
    ql = float(lat.b_int(target, target))
    rec = _Recorder(lat, split, cfg)

    if np.max(np.abs(t0.gamma - lv)) <= cfg.terminal_tol:
        t = t0
        if not validate_triple(lat, split, t0, cfg.tol, normalized=True).passed:
            t = rec.add(MoveParams(NORMALIZE), t0, normalize_triple(lat, split, t0))
        rec.add(MoveParams(ROTATE, theta=0.0), t, rotate(lat, split, t, 0.0, cfg.tol))
        return _finish(lat, c, target, t0, rec, cfg)

    # 1. perturb to a generic triple
    move, t1, extra = _generic_perturbation(lat, split, t0, cfg, stage=1)
    rec.add(move, t0, t1, extra)

    # 2. lemma vector v in L- (x) R
    minus_space = SubspaceBasis(split.minus_array)
    try:
        v = lemma_vector(lat, t1.omega_minus, lv, sub=minus_space, tol=cfg.tol)
    except NotEnoughPositiveSquares as exc:
        raise LemmaFailed(str(exc)) from exc

    # 3. gamma into the plane <v, omega_minus>
    gen1 = is_generic(lat, t1, cfg.coeff_bound, cfg.tol)
    g2 = _cone_part(lat, v, t1.omega_minus, lat.q(t1.gamma), t1.gamma)
    t2 = retarget_gamma(lat, split, t1, g2, gen1, cfg.tol, force=cfg.force)
    rec.add(MoveParams(RETARGET, new_gamma=g2, coeff_bound=cfg.coeff_bound,
                       force=cfg.force and not gen1.generic), t1, t2)

    # 4. rotate omega_minus onto the positive ray of v
    a, b = _frame_angle(lat, t2, v)
    theta = math.atan2(b, a)
    t3 = rec.add(MoveParams(ROTATE, theta=theta), t2, rotate(lat, split, t2, theta, cfg.tol))

    # 5. perturb again, keeping <omega_minus, l> positive definite
    move, t4, extra = _generic_perturbation(lat, split, t3, cfg, stage=5, target=lv)
    rec.add(move, t3, t4, extra)

    # 6. gamma to the omega_minus-orthogonal part of l with q = q(l), then rotate onto l
    gen4 = is_generic(lat, t4, cfg.coeff_bound, cfg.tol)
    g5 = _cone_part(lat, lv, t4.omega_minus, ql, t4.gamma)
    t5 = retarget_gamma(lat, split, t4, g5, gen4, cfg.tol, force=cfg.force)
    rec.add(MoveParams(RETARGET, new_gamma=g5, coeff_bound=cfg.coeff_bound,
                       force=cfg.force and not gen4.generic), t4, t5)
    a, b = _frame_angle(lat, t5, lv)
    theta = math.atan2(-a, b)
    rec.add(MoveParams(ROTATE, theta=theta), t5, rotate(lat, split, t5, theta, cfg.tol))
    return _finish(lat, c, target, t0, rec, cfg)


def _finish(lat, c, target, t0, rec: _Recorder, cfg: Config) -> Trace:
    final = rec.steps[-1].triple_after if rec.steps else t0
    lv = np.array(target, dtype=float)
    err = float(np.max(np.abs(final.gamma - lv)))
    q_err = abs(lat.q(final.gamma) - lat.b_int(target, target))
    success = (err <= cfg.terminal_tol and q_err <= cfg.terminal_tol
               and all(s.certified for s in rec.steps))
    return Trace(lat, c, target, t0, tuple(rec.steps), success, err, cfg)


@dataclass(frozen=True)
class VerifyReport:
    passed: bool
    failed_step: Optional[int]
    messages: tuple[str, ...]
    step_reports: tuple[Report, ...] = ()

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "failed_step": self.failed_step,
            "messages": list(self.messages),
            "steps": [r.to_dict() for r in self.step_reports],
        }


def verify_trace(lat: Lattice, c: Involution, split: EigenSplit, trace: Trace,
                 tol: Optional[float] = None, terminal_tol: Optional[float] = None) -> VerifyReport:
    """Re-apply every recorded move and re-check every invariant."""
    cfg = trace.params
    tol = cfg.tol if tol is None else tol
    terminal_tol = cfg.terminal_tol if terminal_tol is None else terminal_tol
    cfg = Config(**{**cfg.to_dict(), "tol": tol, "terminal_tol": terminal_tol})
    msgs: list[str] = []
    failed: Optional[int] = None

    def fail(msg: str, step: Optional[int] = None):
        nonlocal failed
        msgs.append(msg)
        if step is not None and failed is None:
            failed = step

    if trace.lattice.gram != lat.gram:
        fail("trace was produced on a different lattice")
    if trace.involution.matrix != c.matrix:
        fail("trace was produced for a different involution")
    l = trace.target
    lv = np.array(l, dtype=float)
    if len(l) != lat.rank or c.apply_int(l) != tuple(-x for x in l):
        fail("target is not in the (-1)-eigenlattice")
    elif lat.b_int(l, l) <= 0:
        fail("target does not have positive square")
    if not validate_triple(lat, split, trace.initial, tol).passed:
        fail("initial triple is invalid")
    if len([s for s in trace.steps if s.move.kind in MOVE_KINDS]) > 6:
        fail("more than six moves")

    reports = []
    current = trace.initial
    for step in trace.steps:
        i = step.index
        if step.triple_before.distance(current) > tol:
            fail(f"step {i}: does not start where the previous step ended", i)
        try:
            redo = apply_move(lat, split, step.triple_before, step.move, tol)
        except HKRealError as exc:
            fail(f"step {i}: move cannot be re-applied ({type(exc).__name__}: {exc})", i)
            redo = None
        if redo is not None and redo.distance(step.triple_after) > tol:
            fail(f"step {i}: recorded result differs from re-applied move by "
                 f"{redo.distance(step.triple_after):.3g}", i)
        report = step_checks(lat, split, step.move, step.triple_before, step.triple_after, cfg)
        reports.append(report)
        if not report.passed:
            names = ", ".join(x.name for x in report.failures())
            fail(f"step {i}: checks failed ({names})", i)
        if step.certified and not report.passed:
            fail(f"step {i}: marked certified but checks fail", i)
        if not step.certified:
            fail(f"step {i}: not certified", i)
        current = step.triple_after

    err = float(np.max(np.abs(current.gamma - lv))) if len(lv) == len(current.gamma) else math.inf
    if not err <= terminal_tol:
        fail(f"final gamma misses the target by {err:.3g}")
    elif abs(lat.q(current.gamma) - lat.q(lv)) > terminal_tol:
        fail("final gamma does not have q(l)")
    if abs(err - trace.final_gamma_error) > tol:
        fail("recorded final_gamma_error does not match")
    if not trace.success:
        fail("trace does not claim success")
    return VerifyReport(not msgs, failed, tuple(msgs), tuple(reports))
