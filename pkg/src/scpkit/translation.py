# src/scpkit/translation.py

import logging

from .linearity import LinDerivation, LinRule, rename_lin, validate_lin
from .syntax import (
    Case,
    Close,
    CpProcess,
    Cut,
    Fwd,
    Inl,
    Inp,
    Inr,
    Name,
    Out,
    ScpCase,
    ScpInl,
    ScpInp,
    ScpInr,
    ScpOut,
    ScpProcess,
    TypingContext,
    Wait,
    all_names,
    binders_clean,
    fresh,
    free_names,
    freshen,
    rename,
)
from .typecheck import (
    CpDerivation,
    CpRule,
    ScpDerivation,
    ScpRule,
    cp_derive,
    rename_derivation,
    validate_cp,
    validate_scp,
    weaken,
)

log = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Processes
# ---------------------------------------------------------------------------


def encode(p: CpProcess) -> ScpProcess:
    """CP to SCP: every prefix names its continuation after its subject."""
    return freshen(_encode(p))


def _encode(p: CpProcess) -> ScpProcess:
    match p:
        case Fwd() | Close():
            return p
        case Wait(x, body):
            return Wait(x, _encode(body))
        case Cut(x, ann, left, right):
            return Cut(x, ann, _encode(left), _encode(right))
        case Out(x, y, payload, cont):
            return ScpOut(x, y, _encode(payload), x, _encode(cont))
        case Inp(x, y, body):
            return ScpInp(x, x, y, _encode(body))
        case Inl(x, body):
            return ScpInl(x, x, _encode(body))
        case Inr(x, body):
            return ScpInr(x, x, _encode(body))
        case Case(x, left, right):
            return ScpCase(x, x, _encode(left), x, _encode(right))
    raise TypeError(f"encode expects a CP process; got {type(p).__name__}")


def decode(p: ScpProcess) -> CpProcess:
    """SCP to CP: continuation channels are substituted back by their subject."""
    return _decode(freshen(p))


def _decode(p: ScpProcess) -> CpProcess:
    match p:
        case Fwd() | Close():
            return p
        case Wait(x, body):
            return Wait(x, _decode(body))
        case Cut(x, ann, left, right):
            return Cut(x, ann, _decode(left), _decode(right))
        case ScpOut(x, y, payload, w, cont):
            return Out(x, y, _decode(payload), rename(_decode(cont), w, x))
        case ScpInp(x, w, y, body):
            return Inp(x, y, rename(_decode(body), w, x))
        case ScpInl(x, w, body):
            return Inl(x, rename(_decode(body), w, x))
        case ScpInr(x, w, body):
            return Inr(x, rename(_decode(body), w, x))
        case ScpCase(x, w, left, w2, right):
            return Case(x, rename(_decode(left), w, x), rename(_decode(right), w2, x))
    raise TypeError(f"decode expects an SCP process; got {type(p).__name__}")


# ---------------------------------------------------------------------------
# Derivations, CP to SCP
# ---------------------------------------------------------------------------


def encode_derivation(d: CpDerivation) -> tuple[ScpDerivation, dict[Name, LinDerivation]]:
    """Translate a CP derivation into an SCP one plus a lin witness for every context name."""
    if not validate_cp(d):
        raise ValueError("encode_derivation needs a valid CP derivation")
    if not binders_clean(d.process, d.context.names()):
        d = cp_derive(d.context, d.process)
    used = set(d.context.names()) | all_names(d.process)
    return _encode_derivation(d, used)


def _allocate(used: set[Name], subject: Name) -> Name:
    name = fresh(used, subject.base)
    used.add(name)
    return name


def _weaken_to(s: ScpDerivation, ctx: TypingContext) -> ScpDerivation:
    for name, ty in ctx:
        if name not in s.context:
            s = weaken(s, name, ty)
    return s


def _continue_on(
    s: ScpDerivation, lins: dict[Name, LinDerivation], x: Name, w: Name
) -> tuple[ScpDerivation, dict[Name, LinDerivation]]:
    """Move a premise from channel x to the continuation channel w."""
    renamed = {(w if z == x else z): rename_lin(lin, x, w) for z, lin in lins.items()}
    return rename_derivation(s, x, w), renamed


def _encode_derivation(
    d: CpDerivation, used: set[Name]
) -> tuple[ScpDerivation, dict[Name, LinDerivation]]:
    ctx = d.context
    match d.rule, d.process:
        case CpRule.ID, Fwd(x, y):
            q = Fwd(x, y)
            return ScpDerivation(ScpRule.ID, ctx, q), {
                x: LinDerivation(LinRule.FWD1, x, q),
                y: LinDerivation(LinRule.FWD2, y, q),
            }
        case CpRule.ONE, Close(x):
            q = Close(x)
            return ScpDerivation(ScpRule.ONE, ctx, q), {x: LinDerivation(LinRule.CLOSE, x, q)}
        case CpRule.BOT, Wait(x, _):
            s, lins = _encode_derivation(d.premises[0], used)
            q = Wait(x, s.process)
            witnesses = {x: LinDerivation(LinRule.WAIT, x, q)}
            witnesses |= {z: LinDerivation(LinRule.WAIT2, z, q, (lin,)) for z, lin in lins.items()}
            return ScpDerivation(ScpRule.BOT, ctx, q, (_weaken_to(s, ctx),)), witnesses
        case CpRule.CUT, Cut(x, ann, _, _):
            s1, lins1 = _encode_derivation(d.premises[0], used)
            s2, lins2 = _encode_derivation(d.premises[1], used)
            q = Cut(x, ann, s1.process, s2.process)
            node = ScpDerivation(
                ScpRule.CUT,
                ctx,
                q,
                (_weaken_to(s1, ctx), _weaken_to(s2, ctx)),
                (lins1[x], lins2[x]),
            )
            witnesses = {z: LinDerivation(LinRule.PCOMP1, z, q, (lin,)) for z, lin in lins1.items() if z != x}
            witnesses |= {z: LinDerivation(LinRule.PCOMP2, z, q, (lin,)) for z, lin in lins2.items() if z != x}
            return node, witnesses
        case CpRule.TENSOR, Out(x, y, _, _):
            s1, lins1 = _encode_derivation(d.premises[0], used)
            s2, lins2 = _encode_derivation(d.premises[1], used)
            w = _allocate(used, x)
            s2, lins2 = _continue_on(s2, lins2, x, w)
            q = ScpOut(x, y, s1.process, w, s2.process)
            node = ScpDerivation(
                ScpRule.TENSOR,
                ctx,
                q,
                (_weaken_to(s1, ctx), _weaken_to(s2, ctx)),
                (lins1[y],),
            )
            witnesses = {x: LinDerivation(LinRule.OUT, x, q, (lins2[w],))}
            witnesses |= {z: LinDerivation(LinRule.OUT2, z, q, (lin,)) for z, lin in lins1.items() if z != y}
            witnesses |= {z: LinDerivation(LinRule.OUT3, z, q, (lin,)) for z, lin in lins2.items() if z != w}
            return node, witnesses
        case CpRule.PAR, Inp(x, y, _):
            s, lins = _encode_derivation(d.premises[0], used)
            w = _allocate(used, x)
            s, lins = _continue_on(s, lins, x, w)
            q = ScpInp(x, w, y, s.process)
            node = ScpDerivation(ScpRule.PAR, ctx, q, (_weaken_to(s, ctx),), (lins[y],))
            witnesses = {x: LinDerivation(LinRule.INP, x, q, (lins[w],))}
            witnesses |= {
                z: LinDerivation(LinRule.INP2, z, q, (lin,)) for z, lin in lins.items() if z not in (w, y)
            }
            return node, witnesses
        case (CpRule.PLUS1, Inl(x, _)) | (CpRule.PLUS2, Inr(x, _)):
            left = d.rule is CpRule.PLUS1
            s, lins = _encode_derivation(d.premises[0], used)
            w = _allocate(used, x)
            s, lins = _continue_on(s, lins, x, w)
            q = (ScpInl if left else ScpInr)(x, w, s.process)
            principal, congruence = (LinRule.INL, LinRule.INL2) if left else (LinRule.INR, LinRule.INR2)
            node = ScpDerivation(ScpRule.PLUS1 if left else ScpRule.PLUS2, ctx, q, (_weaken_to(s, ctx),))
            witnesses = {x: LinDerivation(principal, x, q, (lins[w],))}
            witnesses |= {z: LinDerivation(congruence, z, q, (lin,)) for z, lin in lins.items() if z != w}
            return node, witnesses
        case CpRule.WITH, Case(x, _, _):
            s1, lins1 = _encode_derivation(d.premises[0], used)
            s2, lins2 = _encode_derivation(d.premises[1], used)
            w1 = _allocate(used, x)
            w2 = _allocate(used, x)
            s1, lins1 = _continue_on(s1, lins1, x, w1)
            s2, lins2 = _continue_on(s2, lins2, x, w2)
            q = ScpCase(x, w1, s1.process, w2, s2.process)
            node = ScpDerivation(ScpRule.WITH, ctx, q, (_weaken_to(s1, ctx), _weaken_to(s2, ctx)))
            witnesses = {x: LinDerivation(LinRule.CASE, x, q, (lins1[w1], lins2[w2]))}
            witnesses |= {
                z: LinDerivation(LinRule.CASE2, z, q, (lin, lins2[z])) for z, lin in lins1.items() if z != w1
            }
            return node, witnesses
    raise ValueError(f"unexpected CP rule {d.rule} at {d.process}")


# ---------------------------------------------------------------------------
# Derivations, SCP to CP
# ---------------------------------------------------------------------------


def decode_derivation(d: ScpDerivation, lins: dict[Name, LinDerivation]) -> CpDerivation:
    """Translate a linear SCP derivation into CP; lins must witness exactly the free names."""
    if not validate_scp(d):
        raise ValueError("decode_derivation needs a valid SCP derivation")
    names = free_names(d.process)
    missing = names - set(lins)
    if missing:
        raise ValueError(f"no linearity derivation for {', '.join(map(str, sorted(missing)))}")
    extra = set(lins) - names
    if extra:
        raise ValueError(f"linearity witnesses for names that are not free: {', '.join(map(str, sorted(extra)))}")
    for z, lin in lins.items():
        if lin.subject != z or lin.process != d.process or not validate_lin(lin):
            raise ValueError(f"invalid linearity derivation for {z}")
    return _decode_derivation(d, lins)


def _premises_by(lins: dict[Name, LinDerivation], rule: LinRule, index: int = 0) -> dict[Name, LinDerivation]:
    return {z: lin.premises[index] for z, lin in lins.items() if lin.rule is rule}


def _decode_derivation(s: ScpDerivation, lins: dict[Name, LinDerivation]) -> CpDerivation:
    ctx = s.context.restrict(free_names(s.process))
    match s.rule, s.process:
        case ScpRule.ID, Fwd():
            return CpDerivation(CpRule.ID, ctx, s.process)
        case ScpRule.ONE, Close():
            return CpDerivation(CpRule.ONE, ctx, s.process)
        case ScpRule.BOT, Wait(x, _):
            inner = _decode_derivation(s.premises[0], _premises_by(lins, LinRule.WAIT2))
            return CpDerivation(CpRule.BOT, ctx, Wait(x, inner.process), (inner,))
        case ScpRule.CUT, Cut(x, ann, _, _):
            left = _premises_by(lins, LinRule.PCOMP1)
            right = _premises_by(lins, LinRule.PCOMP2)
            left[x], right[x] = s.lin_premises
            d1 = _decode_derivation(s.premises[0], left)
            d2 = _decode_derivation(s.premises[1], right)
            return CpDerivation(CpRule.CUT, ctx, Cut(x, ann, d1.process, d2.process), (d1, d2))
        case ScpRule.TENSOR, ScpOut(x, y, _, w, _):
            left = _premises_by(lins, LinRule.OUT2)
            left[y] = s.lin_premises[0]
            right = _premises_by(lins, LinRule.OUT3)
            right[w] = lins[x].premises[0]
            d1 = _decode_derivation(s.premises[0], left)
            d2 = rename_derivation(_decode_derivation(s.premises[1], right), w, x)
            return CpDerivation(CpRule.TENSOR, ctx, Out(x, y, d1.process, d2.process), (d1, d2))
        case ScpRule.PAR, ScpInp(x, w, y, _):
            inner = _premises_by(lins, LinRule.INP2)
            inner[w] = lins[x].premises[0]
            inner[y] = s.lin_premises[0]
            d1 = rename_derivation(_decode_derivation(s.premises[0], inner), w, x)
            return CpDerivation(CpRule.PAR, ctx, Inp(x, y, d1.process), (d1,))
        case (ScpRule.PLUS1, ScpInl(x, w, _)) | (ScpRule.PLUS2, ScpInr(x, w, _)):
            left = s.rule is ScpRule.PLUS1
            inner = _premises_by(lins, LinRule.INL2 if left else LinRule.INR2)
            inner[w] = lins[x].premises[0]
            d1 = rename_derivation(_decode_derivation(s.premises[0], inner), w, x)
            process = (Inl if left else Inr)(x, d1.process)
            return CpDerivation(CpRule.PLUS1 if left else CpRule.PLUS2, ctx, process, (d1,))
        case ScpRule.WITH, ScpCase(x, w1, _, w2, _):
            left = _premises_by(lins, LinRule.CASE2, 0)
            right = _premises_by(lins, LinRule.CASE2, 1)
            left[w1], right[w2] = lins[x].premises
            d1 = rename_derivation(_decode_derivation(s.premises[0], left), w1, x)
            d2 = rename_derivation(_decode_derivation(s.premises[1], right), w2, x)
            return CpDerivation(CpRule.WITH, ctx, Case(x, d1.process, d2.process), (d1, d2))
    raise ValueError(f"unexpected SCP rule {s.rule} at {s.process}")
