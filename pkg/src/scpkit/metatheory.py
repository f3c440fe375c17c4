# src/scpkit/metatheory.py

import logging
import random
from dataclasses import asdict, dataclass, field
from functools import cache
from itertools import combinations, combinations_with_replacement, product

from .config import GenConfig, Suite, SuiteConfig
from .linearity import LinDerivation, LinRule, lin_all, lin_check, validate_lin
from .reduction import ReductionStep, enumerate_steps, equiv_check, equivalents
from .syntax import (
    Bot,
    Calculus,
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
    Process,
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
    all_binders,
    all_names,
    alpha_eq,
    dual,
    fresh,
    free_names,
    freshen,
    rename,
    show_judgment,
    show_process,
    show_type,
    type_depth,
)
from .textio import parse_judgment, parse_process, parse_type
from .translation import decode, decode_derivation, encode, encode_derivation
from .typecheck import (
    CpDerivation,
    CpRule,
    Derivation,
    ScpDerivation,
    ScpRule,
    cp_check,
    derivation_names,
    explain_cp,
    explain_scp,
    same_derivation,
    scp_check,
    strengthen,
    validate_cp,
    validate_scp,
    weaken,
)

log = logging.getLogger(__name__)

TYPE_ALPHABET: tuple[SessionType, ...] = (
    One(),
    Bot(),
    Plus(One(), Bot()),
    With(One(), Bot()),
    Tensor(One(), Bot()),
    Par(Bot(), One()),
)

# The alphabet closed under duality; every subformula is 1 or bot.
CONTEXT_TYPES: tuple[SessionType, ...] = TYPE_ALPHABET + (
    With(Bot(), One()),
    Plus(Bot(), One()),
)

FREE_NAMES = tuple(Name(base) for base in ("x", "y", "z", "u", "v", "s", "t"))

MAX_ATTEMPTS = 50

Judgment = tuple[TypingContext, Process, Derivation]


class GenerationError(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Exhaustive enumeration of typed CP judgments
# ---------------------------------------------------------------------------


def _context_names(width: int) -> tuple[Name, ...]:
    if width <= len(FREE_NAMES):
        return FREE_NAMES[:width]
    return FREE_NAMES + tuple(Name("x", uid) for uid in range(1, width - len(FREE_NAMES) + 1))


def _subsets(names: tuple[Name, ...]) -> list[tuple[Name, ...]]:
    return [subset for k in range(len(names) + 1) for subset in combinations(names, k)]


def enumerate_typed_cp(max_ast_size: int) -> list[tuple[TypingContext, CpProcess, CpDerivation]]:
    """Every CP judgment with a derivation of AST size <= max_ast_size over the type alphabet.

    Contexts are multisets of CONTEXT_TYPES bound to x, y, z, ... in alphabet order.
    """
    found = []
    for target_size in range(1, max_ast_size + 1):
        for width in range(1, target_size + 2):
            names = _context_names(width)
            for types in combinations_with_replacement(CONTEXT_TYPES, width):
                ctx = TypingContext(tuple(zip(names, types)))
                for process in _prove(ctx, target_size):
                    derivation = cp_check(ctx, process)
                    if derivation is None:
                        raise RuntimeError(f"enumerated an underivable judgment: {show_judgment(ctx, process)}")
                    found.append((ctx, derivation.process, derivation))
    log.debug("enumerated %d judgments up to size %d", len(found), max_ast_size)
    return found


def _slot(index: int, base: str = "q") -> Name:
    return Name(base, index)


def _prove(ctx: TypingContext, target_size: int) -> tuple[CpProcess, ...]:
    """All processes of exactly target_size nodes typed in ctx, goal-directed.

    The search runs once per multiset of types; the results are renamed into ctx.
    """
    entries = sorted(ctx.entries, key=lambda entry: show_type(entry[1]))
    found = []
    for p in _prove_signature(tuple(a for _, a in entries), target_size):
        # ctx may itself be made of slots, so rename through a second set of placeholders
        for slot in range(len(entries)):
            p = rename(p, _slot(slot), _slot(slot, "h"))
        for slot, (x, _) in enumerate(entries):
            p = rename(p, _slot(slot, "h"), x)
        found.append(p)
    return tuple(found)


@cache
def _prove_signature(signature: tuple[SessionType, ...], target_size: int) -> tuple[CpProcess, ...]:
    if target_size < 1 or not signature or len(signature) > target_size + 1:
        return ()
    ctx = TypingContext(tuple((_slot(i), a) for i, a in enumerate(signature)))
    if target_size == 1:
        return _axioms(ctx)
    found: list[CpProcess] = []
    remaining = target_size - 1
    for x, a in ctx:
        match a:
            case Bot():
                found += [Wait(x, p) for p in _prove(ctx.without(x), remaining)]
            case Par(left, right):
                y = fresh(ctx.names(), "y")
                found += [Inp(x, y, p) for p in _prove(ctx.retype(x, right).extend(y, left), remaining)]
            case Plus(left, right):
                found += [Inl(x, p) for p in _prove(ctx.retype(x, left), remaining)]
                found += [Inr(x, p) for p in _prove(ctx.retype(x, right), remaining)]
            case With(left, right):
                for first, second in _pairs(ctx.retype(x, left), ctx.retype(x, right), remaining):
                    found.append(Case(x, first, second))
            case Tensor(left, right):
                y = fresh(ctx.names(), "y")
                others = ctx.without(x).names()
                for sent in _subsets(others):
                    payload_ctx = ctx.restrict(sent).extend(y, left)
                    cont_ctx = ctx.restrict(set(ctx.names()) - set(sent)).retype(x, right)
                    for payload, cont in _pairs(payload_ctx, cont_ctx, remaining):
                        found.append(Out(x, y, payload, cont))
    c = fresh(ctx.names(), "c")
    for ann in TYPE_ALPHABET:
        for side in _subsets(ctx.names()):
            left_ctx = ctx.restrict(side).extend(c, ann)
            right_ctx = ctx.restrict(set(ctx.names()) - set(side)).extend(c, dual(ann))
            for left, right in _pairs(left_ctx, right_ctx, remaining):
                found.append(Cut(c, ann, left, right))
    return tuple(found)


def _axioms(ctx: TypingContext) -> tuple[CpProcess, ...]:
    if len(ctx) == 1:
        ((x, a),) = ctx.entries
        return (Close(x),) if a == One() else ()
    if len(ctx) == 2:
        (x, a), (y, b) = ctx.entries
        return (Fwd(x, y), Fwd(y, x)) if b == dual(a) else ()
    return ()


def _pairs(first: TypingContext, second: TypingContext, total: int) -> list[tuple[CpProcess, CpProcess]]:
    pairs = []
    for left_size in range(1, total):
        for p in _prove(first, left_size):
            for q in _prove(second, total - left_size):
                pairs.append((p, q))
    return pairs


# ---------------------------------------------------------------------------
# Seeded generation of typed terms
# ---------------------------------------------------------------------------


class _Builder:
    """Builds a typed CP judgment bottom-up; every name it allocates is globally distinct."""

    def __init__(self, rng: random.Random, type_depth: int):
        self.rng = rng
        self.type_depth = type_depth
        self.used: set[Name] = set()

    def name(self, base: str) -> Name:
        name = fresh(self.used, base)
        self.used.add(name)
        return name

    def type(self, depth: int) -> SessionType:
        if depth <= 1 or self.rng.random() < 0.3:
            return self.rng.choice((One(), Bot()))
        connective = self.rng.choice((Tensor, Par, Plus, With))
        return connective(self.type(depth - 1), self.type(depth - 1))

    def axiom(self) -> tuple[TypingContext, CpProcess]:
        if self.rng.random() < 0.5:
            x = self.name("x")
            return TypingContext(((x, One()),)), Close(x)
        a = self.type(self.type_depth)
        x, y = self.name("x"), self.name("y")
        return TypingContext(((x, a), (y, dual(a)))), Fwd(x, y)

    def judgment(self, depth: int) -> tuple[TypingContext, CpProcess]:
        if depth <= 1:
            return self.axiom()
        rule = self.rng.choice(("wait", "plus", "par", "with", "tensor", "cut"))
        if rule == "tensor":
            ctx1, p = self.judgment(depth - 1)
            ctx2, q = self.judgment(depth - 1)
            y, a = self.rng.choice(ctx1.entries)
            x, b = self.rng.choice(ctx2.entries)
            ctx = TypingContext(ctx1.without(y).entries + ctx2.retype(x, Tensor(a, b)).entries)
            return ctx, Out(x, y, p, q)
        if rule == "cut":
            ctx1, p = self.judgment(depth - 1)
            x, _ = self.rng.choice(ctx1.entries)
            return self.attach(ctx1, p, x, depth - 1)
        ctx, p = self.judgment(depth - 1)
        x, a = self.rng.choice(ctx.entries)
        match rule:
            case "plus":
                other = self.type(self.type_depth)
                if self.rng.random() < 0.5:
                    return ctx.retype(x, Plus(a, other)), Inl(x, p)
                return ctx.retype(x, Plus(other, a)), Inr(x, p)
            case "with":
                return ctx.retype(x, With(a, a)), Case(x, p, p)
            case "par" if len(ctx) >= 2:
                y, b = self.rng.choice([entry for entry in ctx.entries if entry[0] != x])
                return ctx.without(y).retype(x, Par(b, a)), Inp(x, y, p)
        w = self.name("w")
        return ctx.extend(w, Bot()), Wait(w, p)

    def witness(self, t: SessionType, depth: int) -> tuple[TypingContext, CpProcess, Name]:
        """A judgment with some channel u of type t; returns u too."""
        u = self.name("u")
        if isinstance(t, One):
            return TypingContext(((u, t),)), Close(u), u
        if depth <= 1:
            v = self.name("v")
            return TypingContext(((u, t), (v, dual(t)))), Fwd(u, v), u
        match t:
            case Bot():
                ctx, p = self.judgment(depth - 1)
                return ctx.extend(u, t), Wait(u, p), u
            case Tensor(left, right):
                ctx1, p, y = self.witness(left, depth - 1)
                ctx2, q, x = self.witness(right, depth - 1)
                ctx = TypingContext(ctx1.without(y).entries + ctx2.rename(x, u).retype(u, t).entries)
                return ctx, Out(u, y, p, rename(q, x, u)), u
            case Plus(left, right):
                chosen, build = (left, Inl) if self.rng.random() < 0.5 else (right, Inr)
                ctx, p, x = self.witness(chosen, depth - 1)
                return ctx.rename(x, u).retype(u, t), build(u, rename(p, x, u)), u
            case Par(left, right):
                v, y, z = self.name("v"), self.name("y"), self.name("z")
                p = Inp(u, y, Out(v, z, Fwd(z, y), Fwd(v, u)))
                return TypingContext(((u, t), (v, dual(t)))), p, u
            case With(left, right):
                v = self.name("v")
                p = Case(u, Inl(v, Fwd(v, u)), Inr(v, Fwd(v, u)))
                return TypingContext(((u, t), (v, dual(t)))), p, u
        raise TypeError(f"not a session type: {t!r}")

    def attach(self, ctx: TypingContext, p: CpProcess, x: Name, depth: int) -> tuple[TypingContext, CpProcess]:
        """Cut x in p against a witness for the dual type, in either orientation."""
        a = ctx.lookup(x)
        other, q, u = self.witness(dual(a), depth)
        merged = TypingContext(ctx.without(x).entries + other.without(u).entries)
        q = rename(q, u, x)
        if self.rng.random() < 0.25:
            return merged, Cut(x, dual(a), q, p)
        return merged, Cut(x, a, p, q)

    def redex(self, depth: int) -> tuple[TypingContext, CpProcess]:
        """A judgment whose process reduces: at its top cut, under a prefix, or inside a cut."""
        mode = self.rng.choice(("principal", "commuting", "nested"))
        if mode == "principal" or depth <= 2:
            ctx, p, u = self.witness(self.type(self.type_depth), self.rng.randint(1, max(depth - 1, 1)))
            return self.attach(ctx, p, u, self.rng.randint(1, max(depth - 1, 1)))
        if mode == "nested":
            ctx, p = self.redex(depth - 1)
            if not len(ctx):
                return ctx, p
        else:
            ctx, p = self.judgment(depth - 2)
            x, _ = self.rng.choice(ctx.entries)
            ctx, p = self.guard(ctx, p, x, depth - 2)
            return self.attach(ctx, p, x, depth - 1)
        x, _ = self.rng.choice(ctx.entries)
        return self.attach(ctx, p, x, depth - 1)

    def pick(self, ctx: TypingContext, p: CpProcess, avoid: set[Name]) -> tuple[TypingContext, CpProcess, Name]:
        """A context name outside avoid, waited on first when there is none."""
        choices = [name for name in ctx.names() if name not in avoid]
        if choices:
            return ctx, p, self.rng.choice(choices)
        w = self.name("w")
        return ctx.extend(w, Bot()), Wait(w, p), w

    def guard(self, ctx: TypingContext, p: CpProcess, x: Name, depth: int) -> tuple[TypingContext, CpProcess]:
        """Put p under a prefix whose subject is not x."""
        rule = self.rng.choice(("wait", "plus", "with", "par", "tensor"))
        if rule == "wait":
            w = self.name("w")
            return ctx.extend(w, Bot()), Wait(w, p)
        ctx, p, y = self.pick(ctx, p, {x})
        b = ctx.lookup(y)
        match rule:
            case "plus":
                other = self.type(self.type_depth)
                if self.rng.random() < 0.5:
                    return ctx.retype(y, Plus(b, other)), Inl(y, p)
                return ctx.retype(y, Plus(other, b)), Inr(y, p)
            case "with":
                return ctx.retype(y, With(b, b)), Case(y, p, p)
            case "par":
                ctx, p, z = self.pick(ctx, p, {x, y})
                return ctx.without(z).retype(y, Par(ctx.lookup(z), b)), Inp(y, z, p)
        side, q = self.judgment(max(depth, 1))
        s, c = self.rng.choice(side.entries)
        if self.rng.random() < 0.5:
            return TypingContext(side.without(s).entries + ctx.retype(y, Tensor(c, b)).entries), Out(y, s, q, p)
        return TypingContext(ctx.without(y).entries + side.retype(s, Tensor(b, c)).entries), Out(s, y, p, q)


def generate_typed(cfg: GenConfig) -> Judgment:
    """A seeded, well-typed CP judgment, or its SCP translation for calculus scp.

    About half the draws are built around a redex so reduction checks have work to do.
    """
    rng = random.Random(cfg.seed)
    for attempt in range(MAX_ATTEMPTS):
        builder = _Builder(rng, cfg.type_depth)
        if rng.random() < 0.5:
            ctx, process = builder.redex(cfg.max_depth)
        else:
            ctx, process = builder.judgment(cfg.max_depth)
        derivation = cp_check(ctx, process)
        if derivation is None:
            log.debug("attempt %d produced an untypable term: %s", attempt, show_judgment(ctx, process))
            continue
        if cfg.calculus is Calculus.CP:
            return ctx, derivation.process, derivation
        scp, _ = encode_derivation(derivation)
        return ctx, scp.process, scp
    raise GenerationError(f"no typed term after {MAX_ATTEMPTS} attempts for seed {cfg.seed}")


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------


@dataclass
class Violation:
    check: str
    instance: str
    detail: str = ""


@dataclass
class Report:
    suite: str
    checked: int = 0
    violations: list[Violation] = field(default_factory=list)
    rejected: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def record(self, passed: bool, check: str, instance: str, detail: str = "") -> None:
        self.checked += 1
        if not passed:
            log.debug("%s violated on %s: %s", check, instance, detail)
            self.violations.append(Violation(check, instance, detail))

    def merge(self, other: "Report") -> None:
        self.checked += other.checked
        self.violations.extend(other.violations)
        self.rejected.extend(other.rejected)

    def to_json(self) -> dict:
        return {
            "suite": self.suite,
            "checked": self.checked,
            "ok": self.ok,
            "violations": [asdict(v) for v in self.violations],
            "rejected": list(self.rejected),
        }


# ---------------------------------------------------------------------------
# Property checks
# ---------------------------------------------------------------------------


def _default_steps(p: Process, equiv_depth: int) -> list[ReductionStep]:
    return enumerate_steps(p, use_equiv_closure=equiv_depth > 0, equiv_depth=equiv_depth)


def check_subject_reduction(
    ctx: TypingContext,
    p: ScpProcess,
    lins: dict[Name, LinDerivation] | None = None,
    *,
    steps: list[ReductionStep] | None = None,
    equiv_depth: int = 2,
) -> Report:
    """Every SCP reduct stays typed in ctx and linear in the names it still uses."""
    report = Report(Suite.SUBJECT_REDUCTION)
    if lins is not None and set(lins) != free_names(p):
        report.record(False, "linear source", show_judgment(ctx, p), "witnesses do not cover the free names")
        return report
    for step in _default_steps(p, equiv_depth) if steps is None else steps:
        instance = f"{show_judgment(ctx, p)}  --{step.rule}-->  {step.target}"
        escaped = free_names(step.target) - ctx.domain()
        if escaped:
            report.record(False, "free names", instance, f"{', '.join(map(str, sorted(escaped)))} not in the context")
            continue
        reason = explain_scp(ctx, step.target)
        if reason is not None:
            report.record(False, "typing", instance, reason)
            continue
        missing = [str(z) for z in sorted(free_names(step.target)) if lin_check(z, step.target) is None]
        report.record(not missing, "linearity", instance, f"no linearity derivation for {', '.join(missing)}")
    return report


def check_subject_reduction_cp(
    ctx: TypingContext,
    p: CpProcess,
    *,
    steps: list[ReductionStep] | None = None,
    equiv_depth: int = 2,
) -> Report:
    report = Report(Suite.SUBJECT_REDUCTION)
    for step in _default_steps(p, equiv_depth) if steps is None else steps:
        instance = f"{show_judgment(ctx, p)}  --{step.rule}-->  {step.target}"
        escaped = free_names(step.target) - ctx.domain()
        if escaped:
            report.record(False, "free names", instance, f"{', '.join(map(str, sorted(escaped)))} not in the context")
            continue
        reason = explain_cp(ctx.restrict(free_names(step.target)), step.target)
        report.record(reason is None, "typing", instance, reason or "")
    return report


def check_adequacy(ctx: TypingContext, p: Process, derivation: Derivation) -> Report:
    """Both translations preserve typing and invert each other on linear typed terms."""
    report = Report(Suite.ADEQUACY)
    label = show_judgment(ctx, p)
    if isinstance(derivation, CpDerivation):
        q = encode(p)
        report.record(alpha_eq(decode(q), p), "decode(encode(P)) = P", label, str(decode(q)))
        report.record(scp_check(ctx, q) is not None, "encoding is typed", label, str(q))
        report.record(lin_all(ctx, q) is not None, "encoding is linear", label, str(q))
        scp, lins = encode_derivation(derivation)
        report.record(
            validate_scp(scp) and set(lins) == ctx.domain() and all(map(validate_lin, lins.values())),
            "derivation encoding is valid",
            label,
        )
        report.record(alpha_eq(scp.process, q), "derivation encoding agrees with encode", label, str(scp.process))
        back = decode_derivation(scp, lins)
        report.record(same_derivation(back, derivation), "derivation round trip", label)
        return report
    used = ctx.restrict(free_names(derivation.process))
    missing = [str(z) for z in used.names() if lin_check(z, derivation.process) is None]
    if missing:
        report.rejected.append(f"{label}: no linearity derivation for {', '.join(missing)}")
        return report
    lins = lin_all(used, derivation.process)
    cp = decode_derivation(derivation, lins)
    report.record(validate_cp(cp), "derivation decoding is valid", label)
    report.record(alpha_eq(cp.process, decode(p)), "derivation decoding agrees with decode", label, str(cp.process))
    report.record(alpha_eq(encode(decode(p)), p), "encode(decode(P)) = P", label, str(encode(decode(p))))
    report.record(cp_check(used, decode(p)) is not None, "decoding is typed", label, str(decode(p)))
    return report


# ---------------------------------------------------------------------------
# Brute-force oracles
# ---------------------------------------------------------------------------


def _lin_candidates(z: Name, p: ScpProcess) -> list[tuple[LinRule, list[tuple[Name, ScpProcess]]]]:
    """Every rule whose conclusion has p's shape, with its premises, side conditions unchecked."""
    match p:
        case Fwd():
            return [(LinRule.FWD1, []), (LinRule.FWD2, [])]
        case Close():
            return [(LinRule.CLOSE, [])]
        case Wait(_, body):
            return [(LinRule.WAIT, []), (LinRule.WAIT2, [(z, body)])]
        case ScpOut(_, _, payload, w, cont):
            return [(LinRule.OUT, [(w, cont)]), (LinRule.OUT2, [(z, payload)]), (LinRule.OUT3, [(z, cont)])]
        case ScpInp(_, w, _, body):
            return [(LinRule.INP, [(w, body)]), (LinRule.INP2, [(z, body)])]
        case ScpInl(_, w, body):
            return [(LinRule.INL, [(w, body)]), (LinRule.INL2, [(z, body)])]
        case ScpInr(_, w, body):
            return [(LinRule.INR, [(w, body)]), (LinRule.INR2, [(z, body)])]
        case ScpCase(_, w, left, w2, right):
            return [(LinRule.CASE, [(w, left), (w2, right)]), (LinRule.CASE2, [(z, left), (z, right)])]
        case Cut(_, _, left, right):
            return [(LinRule.PCOMP1, [(z, left)]), (LinRule.PCOMP2, [(z, right)])]
    raise TypeError(f"linearity is defined on SCP processes; got {type(p).__name__}")


def search_lin(x: Name, p: ScpProcess) -> list[LinDerivation]:
    """All derivations of lin(x; p), found by trying every rule."""
    return _search_lin(x, freshen(p, avoid=(x,)))


def _search_lin(z: Name, p: ScpProcess) -> list[LinDerivation]:
    found = []
    for rule, goals in _lin_candidates(z, p):
        for premises in product(*(_search_lin(subject, body) for subject, body in goals)):
            candidate = LinDerivation(rule, z, p, tuple(premises))
            if validate_lin(candidate):
                found.append(candidate)
    return found


def search_cp(ctx: TypingContext, p: CpProcess) -> list[CpDerivation]:
    """All CP derivations of ctx |- p, trying every context split."""
    return _search_cp(ctx, freshen(p, avoid=ctx.names()))


def _search_cp(ctx: TypingContext, p: CpProcess) -> list[CpDerivation]:
    candidates: list[CpDerivation] = []
    names = ctx.names()

    def split(pool: tuple[Name, ...]) -> list[tuple[TypingContext, TypingContext]]:
        return [(ctx.restrict(side), ctx.restrict(set(names) - set(side))) for side in _subsets(pool)]

    match p:
        case Fwd():
            candidates.append(CpDerivation(CpRule.ID, ctx, p))
        case Close():
            candidates.append(CpDerivation(CpRule.ONE, ctx, p))
        case Wait(x, body) if x in ctx:
            candidates += [CpDerivation(CpRule.BOT, ctx, p, (q,)) for q in _search_cp(ctx.without(x), body)]
        case Cut(x, ann, left, right) if x not in ctx:
            for left_ctx, right_ctx in split(names):
                for q1 in _search_cp(left_ctx.extend(x, ann), left):
                    for q2 in _search_cp(right_ctx.extend(x, dual(ann)), right):
                        candidates.append(CpDerivation(CpRule.CUT, ctx, p, (q1, q2)))
        case Out(x, y, payload, cont) if isinstance(ctx.lookup(x), Tensor) and y not in ctx:
            a = ctx.lookup(x)
            for left_ctx, right_ctx in split(tuple(n for n in names if n != x)):
                for q1 in _search_cp(left_ctx.extend(y, a.left), payload):
                    for q2 in _search_cp(right_ctx.retype(x, a.right), cont):
                        candidates.append(CpDerivation(CpRule.TENSOR, ctx, p, (q1, q2)))
        case Inp(x, y, body) if isinstance(ctx.lookup(x), Par) and y not in ctx:
            a = ctx.lookup(x)
            premise_ctx = ctx.retype(x, a.right).extend(y, a.left)
            candidates += [CpDerivation(CpRule.PAR, ctx, p, (q,)) for q in _search_cp(premise_ctx, body)]
        case Inl(x, body) | Inr(x, body) if isinstance(ctx.lookup(x), Plus):
            a = ctx.lookup(x)
            rule, branch = (CpRule.PLUS1, a.left) if isinstance(p, Inl) else (CpRule.PLUS2, a.right)
            candidates += [CpDerivation(rule, ctx, p, (q,)) for q in _search_cp(ctx.retype(x, branch), body)]
        case Case(x, left, right) if isinstance(ctx.lookup(x), With):
            a = ctx.lookup(x)
            for q1 in _search_cp(ctx.retype(x, a.left), left):
                for q2 in _search_cp(ctx.retype(x, a.right), right):
                    candidates.append(CpDerivation(CpRule.WITH, ctx, p, (q1, q2)))
    return [d for d in candidates if validate_cp(d)]


def search_scp(ctx: TypingContext, p: ScpProcess) -> list[ScpDerivation]:
    """All SCP derivations of ctx |- p, with every choice of lin premises."""
    return _search_scp(ctx, freshen(p, avoid=ctx.names()))


def _search_scp(ctx: TypingContext, p: ScpProcess) -> list[ScpDerivation]:
    candidates: list[ScpDerivation] = []
    match p:
        case Fwd():
            candidates.append(ScpDerivation(ScpRule.ID, ctx, p))
        case Close():
            candidates.append(ScpDerivation(ScpRule.ONE, ctx, p))
        case Wait(_, body):
            candidates += [ScpDerivation(ScpRule.BOT, ctx, p, (q,)) for q in _search_scp(ctx, body)]
        case Cut(x, ann, left, right) if x not in ctx:
            for q1, q2, l1, l2 in product(
                _search_scp(ctx.extend(x, ann), left),
                _search_scp(ctx.extend(x, dual(ann)), right),
                _search_lin(x, left),
                _search_lin(x, right),
            ):
                candidates.append(ScpDerivation(ScpRule.CUT, ctx, p, (q1, q2), (l1, l2)))
        case ScpOut(x, y, payload, w, cont) if isinstance(ctx.lookup(x), Tensor) and {y, w}.isdisjoint(ctx.names()):
            a = ctx.lookup(x)
            for q1, q2, lin in product(
                _search_scp(ctx.extend(y, a.left), payload),
                _search_scp(ctx.extend(w, a.right), cont),
                _search_lin(y, payload),
            ):
                candidates.append(ScpDerivation(ScpRule.TENSOR, ctx, p, (q1, q2), (lin,)))
        case ScpInp(x, w, y, body) if isinstance(ctx.lookup(x), Par) and w != y and {w, y}.isdisjoint(ctx.names()):
            a = ctx.lookup(x)
            premise_ctx = ctx.extend(w, a.right).extend(y, a.left)
            for q, lin in product(_search_scp(premise_ctx, body), _search_lin(y, body)):
                candidates.append(ScpDerivation(ScpRule.PAR, ctx, p, (q,), (lin,)))
        case ScpInl(x, w, body) | ScpInr(x, w, body) if isinstance(ctx.lookup(x), Plus) and w not in ctx:
            a = ctx.lookup(x)
            rule, branch = (ScpRule.PLUS1, a.left) if isinstance(p, ScpInl) else (ScpRule.PLUS2, a.right)
            candidates += [ScpDerivation(rule, ctx, p, (q,)) for q in _search_scp(ctx.extend(w, branch), body)]
        case ScpCase(x, w, left, w2, right) if isinstance(ctx.lookup(x), With) and {w, w2}.isdisjoint(ctx.names()):
            a = ctx.lookup(x)
            for q1, q2 in product(
                _search_scp(ctx.extend(w, a.left), left),
                _search_scp(ctx.extend(w2, a.right), right),
            ):
                candidates.append(ScpDerivation(ScpRule.WITH, ctx, p, (q1, q2)))
    return [d for d in candidates if validate_scp(d)]


def enumerate_processes(
    max_size: int, names: tuple[Name, ...], calculus: Calculus = Calculus.SCP
) -> list[Process]:
    """Raw, untyped processes of exactly max_size nodes over names; cuts are annotated 1."""
    return list(_raw(max_size, tuple(names), Calculus(calculus)))


@cache
def _raw(target_size: int, names: tuple[Name, ...], calculus: Calculus) -> tuple[Process, ...]:
    if target_size < 1 or not names:
        return ()
    if target_size == 1:
        return tuple(Fwd(a, b) for a in names for b in names if a != b) + tuple(Close(a) for a in names)
    remaining = target_size - 1

    def pairs(first: tuple[Name, ...], second: tuple[Name, ...]) -> list[tuple[Process, Process]]:
        return [
            (p, q)
            for left_size in range(1, remaining)
            for p in _raw(left_size, first, calculus)
            for q in _raw(remaining - left_size, second, calculus)
        ]

    def bound(*bases: str) -> tuple[Name, ...]:
        chosen: list[Name] = []
        for base in bases:
            chosen.append(fresh(names + tuple(chosen), base))
        return tuple(chosen)

    found: list[Process] = []
    (c,) = bound("c")
    found += [Cut(c, One(), p, q) for p, q in pairs(names + (c,), names + (c,))]
    for a in names:
        found += [Wait(a, p) for p in _raw(remaining, names, calculus)]
        if calculus is Calculus.CP:
            (y,) = bound("y")
            found += [Out(a, y, p, q) for p, q in pairs(names + (y,), names)]
            found += [Inp(a, y, p) for p in _raw(remaining, names + (y,), calculus)]
            found += [Inl(a, p) for p in _raw(remaining, names, calculus)]
            found += [Inr(a, p) for p in _raw(remaining, names, calculus)]
            found += [Case(a, p, q) for p, q in pairs(names, names)]
        else:
            y, w = bound("y", "w")
            found += [ScpOut(a, y, p, w, q) for p, q in pairs(names + (y,), names + (w,))]
            found += [ScpInp(a, w, y, p) for p in _raw(remaining, names + (w, y), calculus)]
            found += [ScpInl(a, w, p) for p in _raw(remaining, names + (w,), calculus)]
            found += [ScpInr(a, w, p) for p in _raw(remaining, names + (w,), calculus)]
            found += [ScpCase(a, w, p, w, q) for p, q in pairs(names + (w,), names + (w,))]
    return tuple(found)


# ---------------------------------------------------------------------------
# Types
# ---------------------------------------------------------------------------


@cache
def all_types(depth: int) -> tuple[SessionType, ...]:
    if depth < 1:
        return ()
    smaller = all_types(depth - 1)
    found: list[SessionType] = [One(), Bot()]
    for connective in (Tensor, Par, Plus, With):
        found += [connective(left, right) for left in smaller for right in smaller]
    return tuple(found)


def random_type(rng: random.Random, depth: int) -> SessionType:
    return _Builder(rng, depth).type(depth)


# ---------------------------------------------------------------------------
# Suites
# ---------------------------------------------------------------------------


def _cp_instances(config: SuiteConfig) -> list[tuple[TypingContext, CpProcess, CpDerivation]]:
    instances = enumerate_typed_cp(config.size)
    for index in range(config.count):
        instances.append(generate_typed(config.generator(index)))
    return instances


def _scp_instances(
    cp_instances: list[tuple[TypingContext, CpProcess, CpDerivation]],
) -> list[tuple[TypingContext, ScpProcess, ScpDerivation, dict[Name, LinDerivation]]]:
    found = []
    for ctx, _, derivation in cp_instances:
        scp, lins = encode_derivation(derivation)
        found.append((ctx, scp.process, scp, lins))
    return found


def _duality(config: SuiteConfig, cp, scp) -> Report:
    report = Report(Suite.DUALITY)
    rng = random.Random(config.seed)
    types = list(all_types(3)) + [random_type(rng, config.max_depth) for _ in range(config.count)]
    for a in types:
        label = show_type(a)
        report.record(dual(dual(a)) == a, "dual is an involution", label)
        report.record(dual(a) != a, "no type is self-dual", label)
        report.record(type_depth(dual(a)) == type_depth(a), "dual preserves depth", label)
    return report


def _subject_reduction(config: SuiteConfig, cp, scp) -> Report:
    report = Report(Suite.SUBJECT_REDUCTION)
    for ctx, p, _ in cp:
        report.merge(check_subject_reduction_cp(ctx, p, equiv_depth=config.equiv_depth))
    for ctx, p, _, lins in scp:
        report.merge(check_subject_reduction(ctx, p, lins, equiv_depth=config.equiv_depth))
    return report


def _adequacy(config: SuiteConfig, cp, scp) -> Report:
    report = Report(Suite.ADEQUACY)
    for ctx, p, derivation in cp:
        report.merge(check_adequacy(ctx, p, derivation))
    for ctx, p, derivation, _ in scp:
        report.merge(check_adequacy(ctx, p, derivation))
    x, y = Name("x"), Name("y")
    ctx = TypingContext(((x, One()), (y, Bot())))
    nonlinear = Wait(y, Wait(y, Close(x)))
    derivation = scp_check(ctx, nonlinear)
    rejected = Report(Suite.ADEQUACY)
    if derivation is not None:
        rejected = check_adequacy(ctx, nonlinear, derivation)
    report.record(
        derivation is not None and bool(rejected.rejected),
        "typed but non-linear SCP term is rejected",
        show_judgment(ctx, nonlinear),
    )
    report.rejected.extend(rejected.rejected)
    return report


def _lemmas(config: SuiteConfig, cp, scp) -> Report:
    report = Report(Suite.LEMMAS)
    for (ctx, p, derivation, _), (_, p_cp, _) in zip(scp, cp):
        label = show_judgment(ctx, p)
        report.record(free_names(p) == ctx.domain(), "linear typed terms use exactly their context", label)
        outsider = fresh(derivation_names(derivation), "u")
        for z in sorted((all_binders(p) - ctx.domain()) | {outsider}, key=str):
            report.record(lin_check(z, p) is None, "linearity implies freeness", label, str(z))
        widened = weaken(derivation, outsider, One())
        report.record(
            validate_scp(widened) and strengthen(widened, outsider) == derivation,
            "weakening and strengthening",
            label,
        )
        for x in ctx.names():
            moved = rename(p, x, outsider)
            report.record(lin_check(outsider, moved) is not None, "linearity survives renaming", label, str(x))
            for y in ctx.names():
                if y != x:
                    report.record(
                        lin_check(x, rename(p, y, outsider)) is not None,
                        "linearity ignores other names",
                        label,
                        f"{x} after renaming {y}",
                    )
            report.record(
                alpha_eq(encode(rename(p_cp, x, outsider)), rename(encode(p_cp), x, outsider)),
                "encode commutes with renaming",
                label,
                str(x),
            )
        for q, _ in equivalents(p, config.equiv_depth):
            report.record(
                scp_check(ctx, q) is not None and lin_all(ctx, q) is not None,
                "structural congruence preserves typing and linearity",
                label,
                str(q),
            )
    _freeness_on_raw_terms(report, min(config.size, 3))
    return report


def _freeness_on_raw_terms(report: Report, max_size: int) -> None:
    """lin(z; P) is only derivable for z free in P, typed or not."""
    names = FREE_NAMES[:2]
    for target_size in range(1, max_size + 1):
        for raw in enumerate_processes(target_size, names):
            free = free_names(raw)
            for z in sorted(all_names(raw) | set(FREE_NAMES[:3]), key=str):
                report.record(
                    lin_check(z, raw) is None or z in free,
                    "linearity implies freeness",
                    show_process(raw),
                    str(z),
                )


def _syntax_directedness(config: SuiteConfig, cp, scp) -> Report:
    report = Report(Suite.SYNTAX_DIRECTEDNESS)
    small = enumerate_typed_cp(config.size)
    for ctx, p, derivation in small:
        label = show_judgment(ctx, p)
        found = search_cp(ctx, p)
        report.record(
            len(found) == 1 and same_derivation(found[0], derivation), "unique CP derivation", label, str(len(found))
        )
        encoded, _ = encode_derivation(derivation)
        checked = scp_check(ctx, encoded.process)
        found_scp = search_scp(ctx, encoded.process)
        report.record(
            checked is not None and len(found_scp) == 1 and same_derivation(found_scp[0], checked),
            "unique SCP derivation",
            show_judgment(ctx, encoded.process),
            str(len(found_scp)),
        )
        for z in ctx.names():
            lins = search_lin(z, encoded.process)
            report.record(
                len(lins) == 1 and lins[0] == lin_check(z, encoded.process),
                "unique linearity derivation",
                show_judgment(ctx, encoded.process),
                str(z),
            )
    names = (Name("x"), Name("y"))
    for p in enumerate_processes(min(config.size, 3), names):
        for z in names:
            lins = search_lin(z, p)
            report.record(
                len(lins) <= 1 and (len(lins) == 1) == (lin_check(z, p) is not None),
                "at most one linearity derivation",
                str(p),
                str(z),
            )
    return report


def _agreement(config: SuiteConfig, cp, scp) -> Report:
    report = Report(Suite.AGREEMENT)

    def matches(p: Process, candidates: list[Process]) -> bool:
        return any(alpha_eq(p, q) or equiv_check(p, q, config.equiv_depth) is not None for q in candidates)

    for ctx, p, _, _ in scp:
        label = show_judgment(ctx, p)
        scp_targets = [step.target for step in enumerate_steps(p)]
        cp_targets = [encode(step.target) for step in enumerate_steps(decode(p))]
        for target in cp_targets:
            report.record(matches(target, scp_targets), "CP step has an SCP counterpart", label, str(target))
        for target in scp_targets:
            report.record(matches(target, cp_targets), "SCP step has a CP counterpart", label, str(target))
    return report


def _round_trip(config: SuiteConfig, cp, scp) -> Report:
    report = Report(Suite.ROUND_TRIP)
    for a in all_types(2):
        report.record(parse_type(show_type(a)) == a, "type round trip", show_type(a))
    for calculus, instances in ((Calculus.CP, cp), (Calculus.SCP, scp)):
        for ctx, p, *_ in instances:
            label = show_judgment(ctx, p)
            report.record(alpha_eq(parse_process(str(p), calculus), p), "process round trip", label)
            parsed_ctx, parsed = parse_judgment(label, calculus)
            report.record(parsed_ctx == ctx and alpha_eq(parsed, p), "judgment round trip", label)
    return report


SUITES = {
    Suite.DUALITY: _duality,
    Suite.SUBJECT_REDUCTION: _subject_reduction,
    Suite.ADEQUACY: _adequacy,
    Suite.LEMMAS: _lemmas,
    Suite.SYNTAX_DIRECTEDNESS: _syntax_directedness,
    Suite.AGREEMENT: _agreement,
    Suite.ROUND_TRIP: _round_trip,
}


def run_suites(config: SuiteConfig) -> list[Report]:
    cp = _cp_instances(config)
    scp = _scp_instances(cp)
    reports = []
    for suite in config.suites():
        log.debug("running %s on %d instances", suite, len(cp))
        reports.append(SUITES[suite](config, cp, scp))
    return reports


def run_suite(suite: Suite, config: SuiteConfig) -> Report:
    (report,) = run_suites(SuiteConfig(**{**config.to_config(), "suite": suite}))
    return report
