# src/scpkit/linearity.py

import logging
from dataclasses import dataclass
from enum import StrEnum

from .syntax import (
    Close,
    Cut,
    Fwd,
    Name,
    ScpCase,
    ScpInl,
    ScpInp,
    ScpInr,
    ScpOut,
    ScpProcess,
    TypingContext,
    Wait,
    free_names,
    freshen,
    rename,
)

log = logging.getLogger(__name__)


class LinRule(StrEnum):
    FWD1 = "Lfwd1"
    FWD2 = "Lfwd2"
    CLOSE = "Lclose"
    WAIT = "Lwait"
    OUT = "Lout"
    INP = "Linp"
    INL = "Linl"
    INR = "Linr"
    CASE = "Lcase"
    WAIT2 = "Lwait2"
    OUT2 = "Lout2"
    OUT3 = "Lout3"
    INP2 = "Linp2"
    INL2 = "Linl2"
    INR2 = "Linr2"
    CASE2 = "Lcase2"
    PCOMP1 = "Lpcomp1"
    PCOMP2 = "Lpcomp2"


ARITY = {rule: 1 for rule in LinRule} | {
    LinRule.FWD1: 0,
    LinRule.FWD2: 0,
    LinRule.CLOSE: 0,
    LinRule.WAIT: 0,
    LinRule.CASE: 2,
    LinRule.CASE2: 2,
}


@dataclass(frozen=True)
class LinDerivation:
    """A derivation of lin(subject; process)."""

    rule: LinRule
    subject: Name
    process: ScpProcess
    premises: tuple["LinDerivation", ...] = ()


# ---------------------------------------------------------------------------
# Checking
# ---------------------------------------------------------------------------


def lin_check(x: Name, p: ScpProcess) -> LinDerivation | None:
    """Derive lin(x; p) after renaming binders of p away from x."""
    return _lin(x, freshen(p, avoid=(x,)))


def lin_all(delta: TypingContext, p: ScpProcess) -> dict[Name, LinDerivation] | None:
    p = freshen(p, avoid=delta.names())
    witnesses = {}
    for name in delta.names():
        derivation = _lin(name, p)
        if derivation is None:
            return None
        witnesses[name] = derivation
    return witnesses


def _fail(z: Name, p: ScpProcess, reason: str) -> None:
    log.debug("lin(%s; %s) fails: %s", z, p, reason)
    return None


def _derive(rule: LinRule, z: Name, p: ScpProcess, *goals: tuple[Name, ScpProcess]) -> LinDerivation | None:
    premises = []
    for subject, body in goals:
        premise = _lin(subject, body)
        if premise is None:
            return _fail(z, p, f"{rule} needs lin({subject}; {body})")
        premises.append(premise)
    return LinDerivation(rule, z, p, tuple(premises))


def _lin(z: Name, p: ScpProcess) -> LinDerivation | None:
    match p:
        case Fwd(a, b):
            if a == z and b != z:
                return LinDerivation(LinRule.FWD1, z, p)
            if b == z and a != z:
                return LinDerivation(LinRule.FWD2, z, p)
            return _fail(z, p, "forwarder does not use the channel exactly once")
        case Close(a):
            if a == z:
                return LinDerivation(LinRule.CLOSE, z, p)
            return _fail(z, p, "close on another channel")
        case Wait(a, body):
            if a != z:
                return _derive(LinRule.WAIT2, z, p, (z, body))
            if z in free_names(body):
                return _fail(z, p, f"{z} is used again after wait")
            return LinDerivation(LinRule.WAIT, z, p)
        case ScpOut(a, _, payload, w, cont):
            if a == z:
                if z in free_names(payload) | free_names(cont):
                    return _fail(z, p, f"{z} is used again after output")
                return _derive(LinRule.OUT, z, p, (w, cont))
            if z not in free_names(cont):
                return _derive(LinRule.OUT2, z, p, (z, payload))
            if z not in free_names(payload):
                return _derive(LinRule.OUT3, z, p, (z, cont))
            return _fail(z, p, f"{z} occurs on both sides of the output")
        case ScpInp(a, w, _, body):
            if a != z:
                return _derive(LinRule.INP2, z, p, (z, body))
            if z in free_names(body):
                return _fail(z, p, f"{z} is used again after input")
            return _derive(LinRule.INP, z, p, (w, body))
        case ScpInl(a, w, body) | ScpInr(a, w, body):
            principal, congruence = (
                (LinRule.INL, LinRule.INL2) if isinstance(p, ScpInl) else (LinRule.INR, LinRule.INR2)
            )
            if a != z:
                return _derive(congruence, z, p, (z, body))
            if z in free_names(body):
                return _fail(z, p, f"{z} is used again after selection")
            return _derive(principal, z, p, (w, body))
        case ScpCase(a, w, left, w2, right):
            if a != z:
                return _derive(LinRule.CASE2, z, p, (z, left), (z, right))
            if z in free_names(left) | free_names(right):
                return _fail(z, p, f"{z} is used again after case")
            return _derive(LinRule.CASE, z, p, (w, left), (w2, right))
        case Cut(_, _, left, right):
            if z not in free_names(right):
                return _derive(LinRule.PCOMP1, z, p, (z, left))
            if z not in free_names(left):
                return _derive(LinRule.PCOMP2, z, p, (z, right))
            return _fail(z, p, f"{z} occurs on both sides of the cut")
    raise TypeError(f"linearity is defined on SCP processes; got {type(p).__name__}")


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


def premise_goals(rule: LinRule, z: Name, p: ScpProcess) -> list[tuple[Name, ScpProcess]] | None:
    """The (subject, subterm) premises rule demands at p, or None if its side conditions fail."""
    fn = free_names
    match rule, p:
        case LinRule.FWD1, Fwd(a, b) if a == z and b != z:
            return []
        case LinRule.FWD2, Fwd(a, b) if b == z and a != z:
            return []
        case LinRule.CLOSE, Close(a) if a == z:
            return []
        case LinRule.WAIT, Wait(a, body) if a == z and z not in fn(body):
            return []
        case LinRule.WAIT2, Wait(a, body) if a != z:
            return [(z, body)]
        case LinRule.OUT, ScpOut(a, _, payload, w, cont) if a == z and z not in fn(payload) | fn(cont):
            return [(w, cont)]
        case LinRule.OUT2, ScpOut(a, y, payload, w, cont) if a != z and z not in (y, w) and z not in fn(cont):
            return [(z, payload)]
        case LinRule.OUT3, ScpOut(a, y, payload, w, cont) if a != z and z not in (y, w) and z not in fn(payload):
            return [(z, cont)]
        case LinRule.INP, ScpInp(a, w, _, body) if a == z and z not in fn(body):
            return [(w, body)]
        case LinRule.INP2, ScpInp(a, w, y, body) if a != z and z not in (w, y):
            return [(z, body)]
        case LinRule.INL, ScpInl(a, w, body) if a == z and z not in fn(body):
            return [(w, body)]
        case LinRule.INL2, ScpInl(a, w, body) if a != z and z != w:
            return [(z, body)]
        case LinRule.INR, ScpInr(a, w, body) if a == z and z not in fn(body):
            return [(w, body)]
        case LinRule.INR2, ScpInr(a, w, body) if a != z and z != w:
            return [(z, body)]
        case LinRule.CASE, ScpCase(a, w, left, w2, right) if a == z and z not in fn(left) | fn(right):
            return [(w, left), (w2, right)]
        case LinRule.CASE2, ScpCase(a, w, left, w2, right) if a != z and z not in (w, w2):
            return [(z, left), (z, right)]
        case LinRule.PCOMP1, Cut(c, _, left, right) if c != z and z not in fn(right):
            return [(z, left)]
        case LinRule.PCOMP2, Cut(c, _, left, right) if c != z and z not in fn(left):
            return [(z, right)]
    return None


def validate_lin(d: LinDerivation) -> bool:
    if len(d.premises) != ARITY[d.rule]:
        return False
    goals = premise_goals(d.rule, d.subject, d.process)
    if goals is None:
        return False
    if [(q.subject, q.process) for q in d.premises] != goals:
        return False
    return all(validate_lin(q) for q in d.premises)


def rename_lin(d: LinDerivation, src: Name, dst: Name) -> LinDerivation:
    """Rename a free name throughout; dst must be fresh for d."""
    return LinDerivation(
        d.rule,
        dst if d.subject == src else d.subject,
        rename(d.process, src, dst),
        tuple(rename_lin(q, src, dst) for q in d.premises),
    )


def lin_size(d: LinDerivation) -> int:
    return 1 + sum(lin_size(q) for q in d.premises)
