# src/scpkit/reduction.py

import logging
from collections import deque
from dataclasses import dataclass
from enum import StrEnum

from .syntax import (
    Case,
    Close,
    Cut,
    Fwd,
    Inl,
    Inp,
    Inr,
    Name,
    Out,
    Plus,
    Process,
    ScpCase,
    ScpInl,
    ScpInp,
    ScpInr,
    ScpOut,
    Tensor,
    Wait,
    all_names,
    alpha_eq,
    canonical,
    dual,
    fresh,
    free_names,
    rename,
)

log = logging.getLogger(__name__)


class StepRule(StrEnum):
    FWD = "βfwd"
    ONE_BOT = "β1⊥"
    TENSOR_PAR = "β⊗⅋"
    INL = "βinl"
    INR = "βinr"
    K_OUT1 = "κ_out1"
    K_OUT2 = "κ_out2"
    K_INP = "κ_inp"
    K_INL = "κ_inl"
    K_INR = "κ_inr"
    K_CASE = "κ_case"
    K_WAIT = "κ_wait"
    CUT1 = "βcut1"
    CUT2 = "βcut2"
    EQUIV = "β≡"


PRINCIPAL = frozenset({StepRule.FWD, StepRule.ONE_BOT, StepRule.TENSOR_PAR, StepRule.INL, StepRule.INR})
COMMUTING = frozenset(
    {
        StepRule.K_OUT1,
        StepRule.K_OUT2,
        StepRule.K_INP,
        StepRule.K_INL,
        StepRule.K_INR,
        StepRule.K_CASE,
        StepRule.K_WAIT,
    }
)


class EquivRule(StrEnum):
    REFL = "refl"
    COMM = "comm"
    ASSOC = "assoc"
    SYM = "sym"
    TRANS = "trans"


class Strategy(StrEnum):
    FIRST = "first"
    PRINCIPAL_FIRST = "principal-first"


Position = tuple[int, ...]


@dataclass(frozen=True)
class EquivDerivation:
    """A derivation of left ≡ right; position locates the rewritten cut for comm and assoc."""

    rule: EquivRule
    left: Process
    right: Process
    premises: tuple["EquivDerivation", ...] = ()
    position: Position = ()


@dataclass(frozen=True)
class ReductionStep:
    """One step source → target with the rule tree that justifies it.

    position is the path of the redex cut, in the term the innermost rule fired on.
    equiv_pre is set on β≡ steps; equiv_post is always None because targets are
    reported as produced.
    """

    rule: StepRule
    source: Process
    target: Process
    position: Position = ()
    premise: "ReductionStep | None" = None
    equiv_pre: EquivDerivation | None = None
    equiv_post: EquivDerivation | None = None

    @property
    def redex_rule(self) -> StepRule:
        step = self
        while step.premise is not None:
            step = step.premise
        return step.rule


# ---------------------------------------------------------------------------
# Positions in the cut tree
# ---------------------------------------------------------------------------


def cut_positions(p: Process, prefix: Position = ()) -> list[Position]:
    if not isinstance(p, Cut):
        return []
    return [prefix, *cut_positions(p.left, prefix + (0,)), *cut_positions(p.right, prefix + (1,))]


def subterm(p: Process, position: Position) -> Process:
    for index in position:
        if not isinstance(p, Cut):
            raise ValueError(f"no cut at position {list(position)}")
        p = p.left if index == 0 else p.right
    return p


def replace_at(p: Process, position: Position, new: Process) -> Process:
    if not position:
        return new
    if not isinstance(p, Cut):
        raise ValueError(f"no cut at position {list(position)}")
    head, rest = position[0], position[1:]
    if head == 0:
        return Cut(p.x, p.ann, replace_at(p.left, rest, new), p.right)
    return Cut(p.x, p.ann, p.left, replace_at(p.right, rest, new))


# ---------------------------------------------------------------------------
# Rules at a single cut
# ---------------------------------------------------------------------------


def _absent(x: Name, *terms: Process) -> bool:
    return all(x not in free_names(term) for term in terms)


def _fresh_for(base: Name, *terms: Process, avoid: tuple[Name, ...] = ()) -> Name:
    used = set(avoid)
    for term in terms:
        used |= all_names(term)
    return fresh(used, base.base)


def _base(rule: StepRule, source: Cut, target: Process) -> ReductionStep:
    return ReductionStep(rule, source, target)


def _principal(p: Cut) -> list[ReductionStep]:
    x, ann, left, right = p.x, p.ann, p.left, p.right
    match left:
        case Fwd(a, b) if a == x and b != x:
            return [_base(StepRule.FWD, p, rename(right, x, b))]
        case Fwd(a, b) if b == x and a != x:
            return [_base(StepRule.FWD, p, rename(right, x, a))]
        case Close(a) if a == x:
            if isinstance(right, Wait) and right.x == x and _absent(x, right.body):
                return [_base(StepRule.ONE_BOT, p, right.body)]
        case Out(a, y, payload, cont) if a == x:
            if isinstance(right, Inp) and right.x == x and isinstance(ann, Tensor):
                n = _fresh_for(y, p)
                target = Cut(
                    n,
                    ann.left,
                    rename(payload, y, n),
                    Cut(x, ann.right, cont, rename(right.body, right.y, n)),
                )
                return [_base(StepRule.TENSOR_PAR, p, target)]
        case ScpOut(a, y, payload, w, cont) if a == x:
            if (
                isinstance(right, ScpInp)
                and right.x == x
                and isinstance(ann, Tensor)
                and _absent(x, payload, cont, right.body)
            ):
                n1 = _fresh_for(y, p)
                n2 = _fresh_for(w, p, avoid=(n1,))
                receiver = rename(rename(right.body, right.y, n1), right.w, n2)
                target = Cut(
                    n1,
                    ann.left,
                    rename(payload, y, n1),
                    Cut(n2, ann.right, rename(cont, w, n2), receiver),
                )
                return [_base(StepRule.TENSOR_PAR, p, target)]
        case Inl(a, body) | Inr(a, body) if a == x:
            if isinstance(right, Case) and right.x == x and isinstance(ann, Plus):
                if isinstance(left, Inl):
                    return [_base(StepRule.INL, p, Cut(x, ann.left, body, right.left))]
                return [_base(StepRule.INR, p, Cut(x, ann.right, body, right.right))]
        case ScpInl(a, w, body) | ScpInr(a, w, body) if a == x:
            if (
                isinstance(right, ScpCase)
                and right.x == x
                and isinstance(ann, Plus)
                and _absent(x, body, right.left, right.right)
            ):
                n = _fresh_for(w, p)
                if isinstance(left, ScpInl):
                    target = Cut(n, ann.left, rename(body, w, n), rename(right.left, right.w, n))
                    return [_base(StepRule.INL, p, target)]
                target = Cut(n, ann.right, rename(body, w, n), rename(right.right, right.w2, n))
                return [_base(StepRule.INR, p, target)]
    return []


def _commuting(p: Cut) -> list[ReductionStep]:
    """Push the cut under a left prefix on another channel."""
    x, ann, left, right = p.x, p.ann, p.left, p.right

    def cut(body: Process) -> Cut:
        return Cut(x, ann, body, right)

    def clear(binder: Name, body: Process) -> tuple[Name, Process]:
        # The binder must not capture x or a free name of the other side.
        if binder != x and binder not in free_names(right):
            return binder, body
        replacement = _fresh_for(binder, p, avoid=(binder,))
        return replacement, rename(body, binder, replacement)

    match left:
        case Wait(a, body) if a != x:
            return [_base(StepRule.K_WAIT, p, Wait(a, cut(body)))]
        case Inl(a, body) if a != x:
            return [_base(StepRule.K_INL, p, Inl(a, cut(body)))]
        case Inr(a, body) if a != x:
            return [_base(StepRule.K_INR, p, Inr(a, cut(body)))]
        case Case(a, l, r) if a != x:
            return [_base(StepRule.K_CASE, p, Case(a, cut(l), cut(r)))]
        case Inp(a, y, body) if a != x:
            y, body = clear(y, body)
            return [_base(StepRule.K_INP, p, Inp(a, y, cut(body)))]
        case Out(a, y, payload, cont) if a != x:
            if not _absent(x, payload) and _absent(x, cont):
                y, payload = clear(y, payload)
                return [_base(StepRule.K_OUT1, p, Out(a, y, cut(payload), cont))]
            if not _absent(x, cont) and _absent(x, payload):
                return [_base(StepRule.K_OUT2, p, Out(a, y, payload, cut(cont)))]
        case ScpInl(a, w, body) if a != x:
            w, body = clear(w, body)
            return [_base(StepRule.K_INL, p, ScpInl(a, w, cut(body)))]
        case ScpInr(a, w, body) if a != x:
            w, body = clear(w, body)
            return [_base(StepRule.K_INR, p, ScpInr(a, w, cut(body)))]
        case ScpCase(a, w, l, w2, r) if a != x:
            w, l = clear(w, l)
            w2, r = clear(w2, r)
            return [_base(StepRule.K_CASE, p, ScpCase(a, w, cut(l), w2, cut(r)))]
        case ScpInp(a, w, y, body) if a != x:
            w, body = clear(w, body)
            y, body = clear(y, body)
            return [_base(StepRule.K_INP, p, ScpInp(a, w, y, cut(body)))]
        case ScpOut(a, y, payload, w, cont) if a != x:
            if not _absent(x, payload) and _absent(x, cont):
                y, payload = clear(y, payload)
                return [_base(StepRule.K_OUT1, p, ScpOut(a, y, cut(payload), w, cont))]
            if not _absent(x, cont) and _absent(x, payload):
                w, cont = clear(w, cont)
                return [_base(StepRule.K_OUT2, p, ScpOut(a, y, payload, w, cut(cont)))]
    return []


def commute(p: Cut) -> Cut:
    return Cut(p.x, dual(p.ann), p.right, p.left)


def _at_cut(p: Cut) -> list[ReductionStep]:
    """Base rules at p in both orientations; the mirrored ones go through one comm."""
    steps = _principal(p) + _commuting(p)
    flipped = commute(p)
    swap = EquivDerivation(EquivRule.COMM, p, flipped)
    for mirrored in _principal(flipped) + _commuting(flipped):
        steps.append(ReductionStep(StepRule.EQUIV, p, mirrored.target, premise=mirrored, equiv_pre=swap))
    return steps


# ---------------------------------------------------------------------------
# Structural congruence
# ---------------------------------------------------------------------------


def _assoc(p: Process) -> Process | None:
    """nu y (nu x (P | Q) | R)  ≡  nu x (P | nu y (Q | R)) when y is not in P and x is not in R."""
    if not isinstance(p, Cut) or not isinstance(p.left, Cut):
        return None
    y, b, inner, r = p.x, p.ann, p.left, p.right
    x, a, left, middle = inner.x, inner.ann, inner.left, inner.right
    if x == y or not _absent(y, left) or not _absent(x, r):
        return None
    return Cut(x, a, left, Cut(y, b, middle, r))


def _unassoc(p: Process) -> Process | None:
    if not isinstance(p, Cut) or not isinstance(p.right, Cut):
        return None
    x, a, left, inner = p.x, p.ann, p.left, p.right
    y, b, middle, r = inner.x, inner.ann, inner.left, inner.right
    if x == y or not _absent(y, left) or not _absent(x, r):
        return None
    return Cut(y, b, Cut(x, a, left, middle), r)


def rewrites(p: Process) -> list[tuple[Process, EquivDerivation]]:
    """Every single comm or assoc rewrite of p at some cut position."""
    found = []
    for position in cut_positions(p):
        sub = subterm(p, position)
        q = replace_at(p, position, commute(sub))
        found.append((q, EquivDerivation(EquivRule.COMM, p, q, position=position)))
        forward = _assoc(sub)
        if forward is not None:
            q = replace_at(p, position, forward)
            found.append((q, EquivDerivation(EquivRule.ASSOC, p, q, position=position)))
        backward = _unassoc(sub)
        if backward is not None:
            q = replace_at(p, position, backward)
            premise = EquivDerivation(EquivRule.ASSOC, q, p, position=position)
            found.append((q, EquivDerivation(EquivRule.SYM, p, q, (premise,), position)))
    return found


def _chain(steps: list[EquivDerivation]) -> EquivDerivation:
    if len(steps) == 1:
        return steps[0]
    rest = _chain(steps[1:])
    return EquivDerivation(EquivRule.TRANS, steps[0].left, rest.right, (steps[0], rest))


def equivalents(p: Process, depth: int) -> list[tuple[Process, EquivDerivation]]:
    """Terms reachable from p by at most depth comm/assoc rewrites, with derivations."""
    seen = {canonical(p)}
    frontier: list[tuple[Process, list[EquivDerivation]]] = [(p, [])]
    found = []
    for _ in range(depth):
        next_frontier = []
        for term, path in frontier:
            for q, derivation in rewrites(term):
                key = canonical(q)
                if key in seen:
                    continue
                seen.add(key)
                chain = path + [derivation]
                found.append((q, _chain(chain)))
                next_frontier.append((q, chain))
        frontier = next_frontier
    return found


def equiv_check(p: Process, q: Process, depth: int = 3) -> EquivDerivation | None:
    """Breadth-first search for p ≡ q within depth rewrites."""
    if alpha_eq(p, q):
        return EquivDerivation(EquivRule.REFL, p, q)
    target = canonical(q)
    seen = {canonical(p)}
    queue = deque([(p, [], 0)])
    while queue:
        term, path, level = queue.popleft()
        if level >= depth:
            continue
        for r, derivation in rewrites(term):
            key = canonical(r)
            if key in seen:
                continue
            chain = path + [derivation]
            if key == target:
                return _chain(chain)
            seen.add(key)
            queue.append((r, chain, level + 1))
    log.debug("no equivalence within %d rewrites: %s and %s", depth, p, q)
    return None


def validate_equiv(e: EquivDerivation) -> bool:
    match e.rule:
        case EquivRule.REFL:
            return not e.premises and alpha_eq(e.left, e.right)
        case EquivRule.COMM:
            try:
                sub = subterm(e.left, e.position)
            except ValueError:
                return False
            return isinstance(sub, Cut) and replace_at(e.left, e.position, commute(sub)) == e.right
        case EquivRule.ASSOC:
            try:
                forward = _assoc(subterm(e.left, e.position))
            except ValueError:
                return False
            return forward is not None and replace_at(e.left, e.position, forward) == e.right
        case EquivRule.SYM:
            if len(e.premises) != 1:
                return False
            (inner,) = e.premises
            return validate_equiv(inner) and alpha_eq(inner.left, e.right) and alpha_eq(inner.right, e.left)
        case EquivRule.TRANS:
            if len(e.premises) != 2:
                return False
            first, second = e.premises
            return (
                validate_equiv(first)
                and validate_equiv(second)
                and alpha_eq(first.left, e.left)
                and alpha_eq(first.right, second.left)
                and alpha_eq(second.right, e.right)
            )
    return False


# ---------------------------------------------------------------------------
# Steps
# ---------------------------------------------------------------------------


def enumerate_steps(
    p: Process, *, use_equiv_closure: bool = False, equiv_depth: int = 2
) -> list[ReductionStep]:
    """All one-step reducts of p in a deterministic order, one per distinct target and rule."""
    steps = _steps(p)
    if use_equiv_closure and equiv_depth > 0:
        for q, derivation in equivalents(p, equiv_depth):
            for inner in _steps(q):
                steps.append(
                    ReductionStep(StepRule.EQUIV, p, inner.target, inner.position, premise=inner, equiv_pre=derivation)
                )
    return _dedupe(steps)


def _steps(p: Process) -> list[ReductionStep]:
    if not isinstance(p, Cut):
        return []
    found = _at_cut(p)
    for inner in _steps(p.left):
        target = Cut(p.x, p.ann, inner.target, p.right)
        found.append(ReductionStep(StepRule.CUT1, p, target, (0,) + inner.position, premise=inner))
    for inner in _steps(p.right):
        target = Cut(p.x, p.ann, p.left, inner.target)
        found.append(ReductionStep(StepRule.CUT2, p, target, (1,) + inner.position, premise=inner))
    return found


def _dedupe(steps: list[ReductionStep]) -> list[ReductionStep]:
    seen = set()
    unique = []
    for step in steps:
        key = (step.redex_rule, canonical(step.target))
        if key in seen:
            continue
        seen.add(key)
        unique.append(step)
    return unique


def _category(step: ReductionStep) -> int:
    rule = step.rule
    mirrored = (
        rule is StepRule.EQUIV
        and step.equiv_pre is not None
        and step.equiv_pre.rule is EquivRule.COMM
        and not step.equiv_pre.position
        and step.premise is not None
    )
    if mirrored:
        rule = step.premise.rule
    if rule in PRINCIPAL:
        return 0
    if rule in COMMUTING:
        return 1
    if rule in (StepRule.CUT1, StepRule.CUT2):
        return 2
    return 3


def step(
    p: Process,
    strategy: Strategy = Strategy.FIRST,
    *,
    index: int | None = None,
    use_equiv_closure: bool = False,
    equiv_depth: int = 2,
) -> ReductionStep | None:
    """Pick one step: by index, the first by position and rule, or principal reductions first."""
    steps = enumerate_steps(p, use_equiv_closure=use_equiv_closure, equiv_depth=equiv_depth)
    if index is not None:
        if not 0 <= index < len(steps):
            raise ValueError(f"redex index {index} out of range; {len(steps)} available")
        return steps[index]
    if not steps:
        return None
    if Strategy(strategy) is Strategy.PRINCIPAL_FIRST:
        return min(steps, key=lambda s: (_category(s), s.position))
    return min(steps, key=lambda s: (s.position, str(s.rule)))


def trace(
    p: Process,
    strategy: Strategy = Strategy.FIRST,
    max_steps: int = 100,
    *,
    use_equiv_closure: bool = False,
    equiv_depth: int = 2,
) -> list[ReductionStep]:
    if max_steps < 0:
        raise ValueError("max_steps must be non-negative")
    steps: list[ReductionStep] = []
    current = p
    while len(steps) < max_steps:
        chosen = step(current, strategy, use_equiv_closure=use_equiv_closure, equiv_depth=equiv_depth)
        if chosen is None:
            break
        log.debug("%s: %s", chosen.rule, chosen.target)
        steps.append(chosen)
        current = chosen.target
    return steps


def replay(s: ReductionStep) -> Process:
    """Recompute the target of s from its source and rule tree."""
    match s.rule:
        case StepRule.CUT1 | StepRule.CUT2:
            source = s.source
            if not isinstance(source, Cut) or s.premise is None:
                raise ValueError(f"{s.rule} needs a cut source and a premise")
            if s.rule is StepRule.CUT1:
                if s.premise.source != source.left:
                    raise ValueError("premise does not reduce the left side of the cut")
                return Cut(source.x, source.ann, replay(s.premise), source.right)
            if s.premise.source != source.right:
                raise ValueError("premise does not reduce the right side of the cut")
            return Cut(source.x, source.ann, source.left, replay(s.premise))
        case StepRule.EQUIV:
            if s.equiv_pre is None or s.premise is None:
                raise ValueError("β≡ needs an equivalence and a premise")
            if not validate_equiv(s.equiv_pre) or not alpha_eq(s.equiv_pre.left, s.source):
                raise ValueError("equivalence does not start at the source")
            if not alpha_eq(s.equiv_pre.right, s.premise.source):
                raise ValueError("premise does not start where the equivalence ends")
            return replay(s.premise)
    if not isinstance(s.source, Cut):
        raise ValueError(f"{s.rule} fires only at a cut")
    for candidate in _principal(s.source) + _commuting(s.source):
        if candidate.rule is s.rule:
            return candidate.target
    raise ValueError(f"{s.rule} does not apply to {s.source}")
