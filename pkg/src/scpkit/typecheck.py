# src/scpkit/typecheck.py

import logging
from collections.abc import Iterable
from dataclasses import dataclass, replace
from enum import StrEnum

from .linearity import LinDerivation, lin_check, rename_lin, validate_lin
from .syntax import (
    Bot,
    Case,
    Close,
    CpProcess,
    Cut,
    Fwd,
    Inl,
    Inp,
    Inr,
    Name,
    One,
    Out,
    Par,
    Plus,
    ScpCase,
    ScpInl,
    ScpInp,
    ScpInr,
    ScpOut,
    ScpProcess,
    SessionType,
    Tensor,
    TypingContext,
    Wait,
    With,
    all_names,
    alpha_eq,
    dual,
    free_names,
    freshen,
    rename,
)

log = logging.getLogger(__name__)


class TypingError(ValueError):
    pass


class CpRule(StrEnum):
    ID = "Cid"
    CUT = "Ccut"
    TENSOR = "C⊗"
    PAR = "C⅋"
    PLUS1 = "C⊕1"
    PLUS2 = "C⊕2"
    WITH = "C&"
    ONE = "C1"
    BOT = "C⊥"


class ScpRule(StrEnum):
    ID = "Sid"
    CUT = "Scut"
    TENSOR = "S⊗"
    PAR = "S⅋"
    PLUS1 = "S⊕1"
    PLUS2 = "S⊕2"
    WITH = "S&"
    ONE = "S1"
    BOT = "S⊥"


@dataclass(frozen=True)
class CpDerivation:
    rule: CpRule
    context: TypingContext
    process: CpProcess
    premises: tuple["CpDerivation", ...] = ()


@dataclass(frozen=True)
class ScpDerivation:
    """An SCP typing derivation; lin_premises are the linearity side premises of Scut, S⊗ and S⅋."""

    rule: ScpRule
    context: TypingContext
    process: ScpProcess
    premises: tuple["ScpDerivation", ...] = ()
    lin_premises: tuple[LinDerivation, ...] = ()


Derivation = CpDerivation | ScpDerivation

_SHAPES = {One: "1", Bot: "bot", Tensor: "A * B", Par: "A par B", Plus: "A + B", With: "A & B"}


def _expect(ctx: TypingContext, x: Name, shape: type, rule: str) -> SessionType:
    ty = ctx.lookup(x)
    if ty is None:
        raise TypingError(f"{rule}: {x} is not in the context")
    if not isinstance(ty, shape):
        raise TypingError(f"{rule}: {x} has type {ty}, expected {_SHAPES[shape]}")
    return ty


# ---------------------------------------------------------------------------
# CP: linear contexts, split by free names
# ---------------------------------------------------------------------------


def cp_derive(delta: TypingContext, p: CpProcess) -> CpDerivation:
    """Derive delta |- p in CP or raise TypingError naming the failing rule."""
    return _cp(delta, freshen(p, avoid=delta.names()))


def cp_check(delta: TypingContext, p: CpProcess) -> CpDerivation | None:
    try:
        return cp_derive(delta, p)
    except TypingError as error:
        log.debug("CP check failed for %s |- %s: %s", delta, p, error)
        return None


def explain_cp(delta: TypingContext, p: CpProcess) -> str | None:
    try:
        cp_derive(delta, p)
    except TypingError as error:
        return str(error)
    return None


def _split(
    ctx: TypingContext, names: Iterable[Name], rule: str
) -> tuple[TypingContext, TypingContext]:
    names = set(names)
    missing = names - ctx.domain()
    if missing:
        raise TypingError(f"{rule}: {', '.join(map(str, sorted(missing)))} not in the context")
    return ctx.restrict(names), ctx.restrict(ctx.domain() - names)


def _cp(delta: TypingContext, p: CpProcess) -> CpDerivation:
    match p:
        case Fwd(x, y):
            a, b = delta.lookup(x), delta.lookup(y)
            if x == y or a is None or b is None or len(delta) != 2:
                raise TypingError(f"{CpRule.ID}: context must be exactly {x} and {y}; got {delta}")
            if b != dual(a):
                raise TypingError(f"{CpRule.ID}: {y} has type {b}, expected {dual(a)}")
            return CpDerivation(CpRule.ID, delta, p)
        case Close(x):
            if delta.entries != ((x, One()),):
                raise TypingError(f"{CpRule.ONE}: context must be exactly {x}:1; got {delta}")
            return CpDerivation(CpRule.ONE, delta, p)
        case Wait(x, body):
            _expect(delta, x, Bot, CpRule.BOT)
            return CpDerivation(CpRule.BOT, delta, p, (_cp(delta.without(x), body),))
        case Cut(x, ann, left, right):
            left_ctx, right_ctx = _split(delta, free_names(left) - {x}, CpRule.CUT)
            return CpDerivation(
                CpRule.CUT,
                delta,
                p,
                (_cp(left_ctx.extend(x, ann), left), _cp(right_ctx.extend(x, dual(ann)), right)),
            )
        case Out(x, y, payload, cont):
            a = _expect(delta, x, Tensor, CpRule.TENSOR)
            left_ctx, right_ctx = _split(delta, free_names(payload) - {y}, CpRule.TENSOR)
            if x in left_ctx:
                raise TypingError(f"{CpRule.TENSOR}: {x} is used inside the sent process")
            return CpDerivation(
                CpRule.TENSOR,
                delta,
                p,
                (_cp(left_ctx.extend(y, a.left), payload), _cp(right_ctx.retype(x, a.right), cont)),
            )
        case Inp(x, y, body):
            a = _expect(delta, x, Par, CpRule.PAR)
            return CpDerivation(CpRule.PAR, delta, p, (_cp(delta.retype(x, a.right).extend(y, a.left), body),))
        case Inl(x, body):
            a = _expect(delta, x, Plus, CpRule.PLUS1)
            return CpDerivation(CpRule.PLUS1, delta, p, (_cp(delta.retype(x, a.left), body),))
        case Inr(x, body):
            a = _expect(delta, x, Plus, CpRule.PLUS2)
            return CpDerivation(CpRule.PLUS2, delta, p, (_cp(delta.retype(x, a.right), body),))
        case Case(x, left, right):
            a = _expect(delta, x, With, CpRule.WITH)
            return CpDerivation(
                CpRule.WITH,
                delta,
                p,
                (_cp(delta.retype(x, a.left), left), _cp(delta.retype(x, a.right), right)),
            )
    raise TypingError(f"{type(p).__name__} is not a CP process")


# ---------------------------------------------------------------------------
# SCP: one ambient context that only grows
# ---------------------------------------------------------------------------


def scp_derive(gamma: TypingContext, p: ScpProcess) -> ScpDerivation:
    """Derive gamma |- p in SCP or raise TypingError naming the failing rule."""
    return _scp(gamma, freshen(p, avoid=gamma.names()))


def scp_check(gamma: TypingContext, p: ScpProcess) -> ScpDerivation | None:
    try:
        return scp_derive(gamma, p)
    except TypingError as error:
        log.debug("SCP check failed for %s |- %s: %s", gamma, p, error)
        return None


def explain_scp(gamma: TypingContext, p: ScpProcess) -> str | None:
    try:
        scp_derive(gamma, p)
    except TypingError as error:
        return str(error)
    return None


def _lin_premise(x: Name, p: ScpProcess, rule: str) -> LinDerivation:
    derivation = lin_check(x, p)
    if derivation is None:
        raise TypingError(f"{rule}: no linearity derivation for {x} in {p}")
    return derivation


def _scp(gamma: TypingContext, p: ScpProcess) -> ScpDerivation:
    match p:
        case Fwd(x, y):
            a, b = gamma.lookup(x), gamma.lookup(y)
            if a is None or b is None:
                raise TypingError(f"{ScpRule.ID}: {x} and {y} must both be in the context")
            if b != dual(a):
                raise TypingError(f"{ScpRule.ID}: {y} has type {b}, expected {dual(a)}")
            return ScpDerivation(ScpRule.ID, gamma, p)
        case Close(x):
            _expect(gamma, x, One, ScpRule.ONE)
            return ScpDerivation(ScpRule.ONE, gamma, p)
        case Wait(x, body):
            _expect(gamma, x, Bot, ScpRule.BOT)
            return ScpDerivation(ScpRule.BOT, gamma, p, (_scp(gamma, body),))
        case Cut(x, ann, left, right):
            premises = (_scp(gamma.extend(x, ann), left), _scp(gamma.extend(x, dual(ann)), right))
            lins = (_lin_premise(x, left, ScpRule.CUT), _lin_premise(x, right, ScpRule.CUT))
            return ScpDerivation(ScpRule.CUT, gamma, p, premises, lins)
        case ScpOut(x, y, payload, w, cont):
            a = _expect(gamma, x, Tensor, ScpRule.TENSOR)
            premises = (_scp(gamma.extend(y, a.left), payload), _scp(gamma.extend(w, a.right), cont))
            lins = (_lin_premise(y, payload, ScpRule.TENSOR),)
            return ScpDerivation(ScpRule.TENSOR, gamma, p, premises, lins)
        case ScpInp(x, w, y, body):
            a = _expect(gamma, x, Par, ScpRule.PAR)
            premise = _scp(gamma.extend(w, a.right).extend(y, a.left), body)
            return ScpDerivation(ScpRule.PAR, gamma, p, (premise,), (_lin_premise(y, body, ScpRule.PAR),))
        case ScpInl(x, w, body):
            a = _expect(gamma, x, Plus, ScpRule.PLUS1)
            return ScpDerivation(ScpRule.PLUS1, gamma, p, (_scp(gamma.extend(w, a.left), body),))
        case ScpInr(x, w, body):
            a = _expect(gamma, x, Plus, ScpRule.PLUS2)
            return ScpDerivation(ScpRule.PLUS2, gamma, p, (_scp(gamma.extend(w, a.right), body),))
        case ScpCase(x, w, left, w2, right):
            a = _expect(gamma, x, With, ScpRule.WITH)
            premises = (_scp(gamma.extend(w, a.left), left), _scp(gamma.extend(w2, a.right), right))
            return ScpDerivation(ScpRule.WITH, gamma, p, premises)
    raise TypingError(f"{type(p).__name__} is not an SCP process")


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def _without(ctx: dict, name: Name) -> dict:
    return {n: t for n, t in ctx.items() if n != name}


def _is_split(whole: dict, left: dict, right: dict) -> bool:
    return set(left).isdisjoint(right) and {**left, **right} == whole


def _shape(premises: tuple, *bodies) -> bool:
    return len(premises) == len(bodies) and all(q.process == body for q, body in zip(premises, bodies))


def validate_cp(d: CpDerivation) -> bool:
    """Each node instantiates its CP rule with exact contexts and subterms."""
    return _cp_node_ok(d) and all(validate_cp(q) for q in d.premises)


def _cp_node_ok(d: CpDerivation) -> bool:
    ctx = d.context.as_dict()
    prem = d.premises

    def premise_ctx(i: int) -> dict:
        return prem[i].context.as_dict()

    match d.rule, d.process:
        case CpRule.ID, Fwd(x, y):
            return not prem and x != y and set(ctx) == {x, y} and ctx[y] == dual(ctx[x])
        case CpRule.ONE, Close(x):
            return not prem and ctx == {x: One()}
        case CpRule.BOT, Wait(x, body):
            return ctx.get(x) == Bot() and _shape(prem, body) and premise_ctx(0) == _without(ctx, x)
        case CpRule.CUT, Cut(x, ann, left, right):
            if x in ctx or not _shape(prem, left, right):
                return False
            c1, c2 = premise_ctx(0), premise_ctx(1)
            return (
                c1.get(x) == ann
                and c2.get(x) == dual(ann)
                and _is_split(ctx, _without(c1, x), _without(c2, x))
            )
        case CpRule.TENSOR, Out(x, y, payload, cont):
            a = ctx.get(x)
            if not isinstance(a, Tensor) or y in ctx or not _shape(prem, payload, cont):
                return False
            c1, c2 = premise_ctx(0), premise_ctx(1)
            return (
                c1.get(y) == a.left
                and c2.get(x) == a.right
                and _is_split(_without(ctx, x), _without(c1, y), _without(c2, x))
            )
        case CpRule.PAR, Inp(x, y, body):
            a = ctx.get(x)
            return (
                isinstance(a, Par)
                and y not in ctx
                and _shape(prem, body)
                and premise_ctx(0) == {**ctx, x: a.right, y: a.left}
            )
        case CpRule.PLUS1, Inl(x, body):
            a = ctx.get(x)
            return isinstance(a, Plus) and _shape(prem, body) and premise_ctx(0) == {**ctx, x: a.left}
        case CpRule.PLUS2, Inr(x, body):
            a = ctx.get(x)
            return isinstance(a, Plus) and _shape(prem, body) and premise_ctx(0) == {**ctx, x: a.right}
        case CpRule.WITH, Case(x, left, right):
            a = ctx.get(x)
            return (
                isinstance(a, With)
                and _shape(prem, left, right)
                and premise_ctx(0) == {**ctx, x: a.left}
                and premise_ctx(1) == {**ctx, x: a.right}
            )
    return False


def validate_scp(d: ScpDerivation) -> bool:
    """Each node instantiates its SCP rule; lin side premises are checked too."""
    return _scp_node_ok(d) and all(validate_scp(q) for q in d.premises)


def _lins_ok(lins: tuple[LinDerivation, ...], *goals: tuple[Name, ScpProcess]) -> bool:
    return len(lins) == len(goals) and all(
        lin.subject == subject and lin.process == body and validate_lin(lin)
        for lin, (subject, body) in zip(lins, goals)
    )


def _scp_node_ok(d: ScpDerivation) -> bool:
    ctx = d.context.as_dict()
    prem = d.premises
    lins = d.lin_premises

    def premise_ctx(i: int) -> dict:
        return prem[i].context.as_dict()

    match d.rule, d.process:
        case ScpRule.ID, Fwd(x, y):
            return not prem and not lins and x in ctx and y in ctx and ctx[y] == dual(ctx[x])
        case ScpRule.ONE, Close(x):
            return not prem and not lins and ctx.get(x) == One()
        case ScpRule.BOT, Wait(x, body):
            return not lins and ctx.get(x) == Bot() and _shape(prem, body) and premise_ctx(0) == ctx
        case ScpRule.CUT, Cut(x, ann, left, right):
            return (
                x not in ctx
                and _shape(prem, left, right)
                and premise_ctx(0) == {**ctx, x: ann}
                and premise_ctx(1) == {**ctx, x: dual(ann)}
                and _lins_ok(lins, (x, left), (x, right))
            )
        case ScpRule.TENSOR, ScpOut(x, y, payload, w, cont):
            a = ctx.get(x)
            return (
                isinstance(a, Tensor)
                and y not in ctx
                and w not in ctx
                and _shape(prem, payload, cont)
                and premise_ctx(0) == {**ctx, y: a.left}
                and premise_ctx(1) == {**ctx, w: a.right}
                and _lins_ok(lins, (y, payload))
            )
        case ScpRule.PAR, ScpInp(x, w, y, body):
            a = ctx.get(x)
            return (
                isinstance(a, Par)
                and w != y
                and w not in ctx
                and y not in ctx
                and _shape(prem, body)
                and premise_ctx(0) == {**ctx, w: a.right, y: a.left}
                and _lins_ok(lins, (y, body))
            )
        case ScpRule.PLUS1, ScpInl(x, w, body):
            a = ctx.get(x)
            return (
                not lins
                and isinstance(a, Plus)
                and w not in ctx
                and _shape(prem, body)
                and premise_ctx(0) == {**ctx, w: a.left}
            )
        case ScpRule.PLUS2, ScpInr(x, w, body):
            a = ctx.get(x)
            return (
                not lins
                and isinstance(a, Plus)
                and w not in ctx
                and _shape(prem, body)
                and premise_ctx(0) == {**ctx, w: a.right}
            )
        case ScpRule.WITH, ScpCase(x, w, left, w2, right):
            a = ctx.get(x)
            return (
                not lins
                and isinstance(a, With)
                and w not in ctx
                and w2 not in ctx
                and _shape(prem, left, right)
                and premise_ctx(0) == {**ctx, w: a.left}
                and premise_ctx(1) == {**ctx, w2: a.right}
            )
    return False


# ---------------------------------------------------------------------------
# Structural operations on derivations
# ---------------------------------------------------------------------------


def derivation_names(d: Derivation) -> frozenset[Name]:
    return d.context.domain() | all_names(d.process)


def derivation_size(d: Derivation) -> int:
    return 1 + sum(derivation_size(q) for q in d.premises)


def weaken(d: ScpDerivation, x: Name, a: SessionType) -> ScpDerivation:
    """Add x:a to every context in d."""
    if x in d.context:
        raise ValueError(f"cannot weaken with {x}: already in the context")
    if x in all_names(d.process):
        raise ValueError(f"cannot weaken with {x}: it occurs in the process")
    return _weaken(d, x, a)


def _weaken(d: ScpDerivation, x: Name, a: SessionType) -> ScpDerivation:
    return replace(
        d,
        context=d.context.extend(x, a),
        premises=tuple(_weaken(q, x, a) for q in d.premises),
    )


def strengthen(d: ScpDerivation, x: Name) -> ScpDerivation:
    """Drop x from every context in d; x must be unused."""
    if x not in d.context:
        raise ValueError(f"cannot strengthen {x}: not in the context")
    if x in free_names(d.process):
        raise ValueError(f"cannot strengthen {x}: it is free in the process")
    return _strengthen(d, x)


def _strengthen(d: ScpDerivation, x: Name) -> ScpDerivation:
    return replace(
        d,
        context=d.context.without(x),
        premises=tuple(_strengthen(q, x) for q in d.premises),
    )


def rename_derivation(d: Derivation, src: Name, dst: Name) -> Derivation:
    """Rename the free name src to dst in every context, process and lin premise."""
    if src != dst and dst in derivation_names(d):
        raise ValueError(f"cannot rename {src} to {dst}: {dst} already occurs")
    return _rename_derivation(d, src, dst)


def _rename_derivation(d: Derivation, src: Name, dst: Name) -> Derivation:
    renamed = replace(
        d,
        context=d.context.rename(src, dst),
        process=rename(d.process, src, dst),
        premises=tuple(_rename_derivation(q, src, dst) for q in d.premises),
    )
    if isinstance(d, ScpDerivation):
        renamed = replace(renamed, lin_premises=tuple(rename_lin(lin, src, dst) for lin in d.lin_premises))
    return renamed


def same_derivation(d1: Derivation, d2: Derivation) -> bool:
    """Same rule tree, contexts as mappings and processes up to alpha."""
    if type(d1) is not type(d2) or d1.rule != d2.rule:
        return False
    if d1.context.as_dict() != d2.context.as_dict() or not alpha_eq(d1.process, d2.process):
        return False
    if len(d1.premises) != len(d2.premises):
        return False
    if isinstance(d1, ScpDerivation):
        if [lin.rule for lin in d1.lin_premises] != [lin.rule for lin in d2.lin_premises]:
            return False
    return all(same_derivation(a, b) for a, b in zip(d1.premises, d2.premises))
