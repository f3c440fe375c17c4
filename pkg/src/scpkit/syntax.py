# src/scpkit/syntax.py

import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from enum import StrEnum


class Calculus(StrEnum):
    CP = "cp"
    SCP = "scp"


IDENTIFIER = re.compile(r"[A-Za-z][A-Za-z0-9']*")
KEYWORDS = frozenset({"fwd", "nu", "case", "close", "wait", "inl", "inr", "bot", "par"})


# ---------------------------------------------------------------------------
# Names
# ---------------------------------------------------------------------------


@dataclass(frozen=True, order=True)
class Name:
    """A channel name. Fresh names share a base and differ by uid."""

    base: str
    uid: int = 0

    def __post_init__(self) -> None:
        if not isinstance(self.base, str) or not IDENTIFIER.fullmatch(self.base):
            raise ValueError(f"name base must be an identifier; got {self.base!r}")
        if self.base in KEYWORDS:
            raise ValueError(f"{self.base!r} is a reserved word")
        if isinstance(self.uid, bool) or not isinstance(self.uid, int) or self.uid < 0:
            raise ValueError(f"name uid must be a non-negative integer; got {self.uid!r}")

    def __str__(self) -> str:
        return self.base if self.uid == 0 else f"{self.base}_{self.uid}"


def fresh(avoid: Iterable[Name], base: str) -> Name:
    taken = {name.uid for name in avoid if name.base == base}
    uid = 0
    while uid in taken:
        uid += 1
    return Name(base, uid)


# ---------------------------------------------------------------------------
# Session types
# ---------------------------------------------------------------------------


class _Type:
    def __str__(self) -> str:
        return show_type(self)


@dataclass(frozen=True)
class One(_Type):
    pass


@dataclass(frozen=True)
class Bot(_Type):
    pass


@dataclass(frozen=True)
class Tensor(_Type):
    left: "SessionType"
    right: "SessionType"


@dataclass(frozen=True)
class Par(_Type):
    left: "SessionType"
    right: "SessionType"


@dataclass(frozen=True)
class Plus(_Type):
    left: "SessionType"
    right: "SessionType"


@dataclass(frozen=True)
class With(_Type):
    left: "SessionType"
    right: "SessionType"


SessionType = One | Bot | Tensor | Par | Plus | With

_CONNECTIVES = {Tensor: ("*", "⊗"), Par: ("par", "⅋"), Plus: ("+", "⊕"), With: ("&", "&")}


def dual(a: SessionType) -> SessionType:
    match a:
        case One():
            return Bot()
        case Bot():
            return One()
        case Tensor(left, right):
            return Par(dual(left), dual(right))
        case Par(left, right):
            return Tensor(dual(left), dual(right))
        case Plus(left, right):
            return With(dual(left), dual(right))
        case With(left, right):
            return Plus(dual(left), dual(right))
    raise TypeError(f"not a session type: {a!r}")


def type_depth(a: SessionType) -> int:
    match a:
        case One() | Bot():
            return 1
        case Tensor(left, right) | Par(left, right) | Plus(left, right) | With(left, right):
            return 1 + max(type_depth(left), type_depth(right))
    raise TypeError(f"not a session type: {a!r}")


def show_type(a: SessionType, unicode: bool = False) -> str:
    """Connectives are right-associative with equal precedence."""
    match a:
        case One():
            return "1"
        case Bot():
            return "⊥" if unicode else "bot"
        case Tensor(left, right) | Par(left, right) | Plus(left, right) | With(left, right):
            connective = _CONNECTIVES[type(a)][1 if unicode else 0]
            shown = show_type(left, unicode)
            if type(left) in _CONNECTIVES:
                shown = f"({shown})"
            return f"{shown} {connective} {show_type(right, unicode)}"
    raise TypeError(f"not a session type: {a!r}")


# ---------------------------------------------------------------------------
# Typing contexts
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TypingContext:
    """Ordered name-to-type bindings with distinct names."""

    entries: tuple[tuple[Name, SessionType], ...] = ()

    def __post_init__(self) -> None:
        entries = tuple((name, ty) for name, ty in self.entries)
        seen: set[Name] = set()
        for name, _ in entries:
            if name in seen:
                raise ValueError(f"duplicate name in context: {name}")
            seen.add(name)
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_mapping(cls, bindings: Mapping[Name, SessionType]) -> "TypingContext":
        return cls(tuple(bindings.items()))

    def __contains__(self, name: object) -> bool:
        return any(bound == name for bound, _ in self.entries)

    def __iter__(self) -> Iterator[tuple[Name, SessionType]]:
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def __str__(self) -> str:
        return show_context(self)

    def names(self) -> tuple[Name, ...]:
        return tuple(name for name, _ in self.entries)

    def domain(self) -> frozenset[Name]:
        return frozenset(self.names())

    def lookup(self, name: Name) -> SessionType | None:
        for bound, ty in self.entries:
            if bound == name:
                return ty
        return None

    def as_dict(self) -> dict[Name, SessionType]:
        return dict(self.entries)

    def extend(self, name: Name, ty: SessionType) -> "TypingContext":
        if name in self:
            raise ValueError(f"{name} is already in the context")
        return TypingContext(self.entries + ((name, ty),))

    def without(self, name: Name) -> "TypingContext":
        return TypingContext(tuple((n, t) for n, t in self.entries if n != name))

    def retype(self, name: Name, ty: SessionType) -> "TypingContext":
        if name not in self:
            raise ValueError(f"{name} is not in the context")
        return TypingContext(tuple((n, ty if n == name else t) for n, t in self.entries))

    def restrict(self, names: Iterable[Name]) -> "TypingContext":
        keep = set(names)
        return TypingContext(tuple((n, t) for n, t in self.entries if n in keep))

    def rename(self, src: Name, dst: Name) -> "TypingContext":
        return TypingContext(tuple((dst if n == src else n, t) for n, t in self.entries))


def show_context(ctx: TypingContext, unicode: bool = False) -> str:
    return ", ".join(f"{name}:{show_type(ty, unicode)}" for name, ty in ctx.entries)


# ---------------------------------------------------------------------------
# Processes
# ---------------------------------------------------------------------------


class _Process:
    def __str__(self) -> str:
        return show_process(self)


@dataclass(frozen=True)
class Fwd(_Process):
    x: Name
    y: Name


@dataclass(frozen=True)
class Cut(_Process):
    """nu x:ann (left | right); left sees x at ann, right at its dual."""

    x: Name
    ann: SessionType
    left: "Process"
    right: "Process"


@dataclass(frozen=True)
class Close(_Process):
    x: Name


@dataclass(frozen=True)
class Wait(_Process):
    x: Name
    body: "Process"


# CP prefixes keep using x as the continuation channel.


@dataclass(frozen=True)
class Out(_Process):
    x: Name
    y: Name
    payload: "Process"
    cont: "Process"


@dataclass(frozen=True)
class Inp(_Process):
    x: Name
    y: Name
    body: "Process"


@dataclass(frozen=True)
class Inl(_Process):
    x: Name
    body: "Process"


@dataclass(frozen=True)
class Inr(_Process):
    x: Name
    body: "Process"


@dataclass(frozen=True)
class Case(_Process):
    x: Name
    left: "Process"
    right: "Process"


# SCP prefixes bind an explicit continuation channel.


@dataclass(frozen=True)
class ScpOut(_Process):
    x: Name
    y: Name
    payload: "Process"
    w: Name
    cont: "Process"


@dataclass(frozen=True)
class ScpInp(_Process):
    x: Name
    w: Name
    y: Name
    body: "Process"


@dataclass(frozen=True)
class ScpInl(_Process):
    x: Name
    w: Name
    body: "Process"


@dataclass(frozen=True)
class ScpInr(_Process):
    x: Name
    w: Name
    body: "Process"


@dataclass(frozen=True)
class ScpCase(_Process):
    x: Name
    w: Name
    left: "Process"
    w2: Name
    right: "Process"


CpProcess = Fwd | Cut | Close | Wait | Out | Inp | Inl | Inr | Case
ScpProcess = Fwd | Cut | Close | Wait | ScpOut | ScpInp | ScpInl | ScpInr | ScpCase
Process = CpProcess | ScpProcess

CP_ONLY = (Out, Inp, Inl, Inr, Case)
SCP_ONLY = (ScpOut, ScpInp, ScpInl, ScpInr, ScpCase)

# A scope is the binders it introduces and the bodies it covers.
Scope = tuple[tuple[Name, ...], tuple[Process, ...]]


def parts(p: Process) -> tuple[tuple[Name, ...], tuple[Scope, ...]]:
    """Split a node into its free name slots and its scopes."""
    match p:
        case Fwd(x, y):
            return (x, y), ()
        case Close(x):
            return (x,), ()
        case Wait(x, body):
            return (x,), (((), (body,)),)
        case Cut(x, _, left, right):
            return (), (((x,), (left, right)),)
        case Out(x, y, payload, cont):
            return (x,), (((y,), (payload,)), ((), (cont,)))
        case Inp(x, y, body):
            return (x,), (((y,), (body,)),)
        case Inl(x, body) | Inr(x, body):
            return (x,), (((), (body,)),)
        case Case(x, left, right):
            return (x,), (((), (left, right)),)
        case ScpOut(x, y, payload, w, cont):
            return (x,), (((y,), (payload,)), ((w,), (cont,)))
        case ScpInp(x, w, y, body):
            return (x,), (((w, y), (body,)),)
        case ScpInl(x, w, body) | ScpInr(x, w, body):
            return (x,), (((w,), (body,)),)
        case ScpCase(x, w, left, w2, right):
            return (x,), (((w,), (left,)), ((w2,), (right,)))
    raise TypeError(f"not a process: {p!r}")


def rebuild(p: Process, names: tuple[Name, ...], scopes: Iterable[Scope]) -> Process:
    """Inverse of parts: same constructor, new slots and scopes."""
    scopes = tuple(scopes)
    match p:
        case Fwd():
            return Fwd(*names)
        case Close():
            return Close(*names)
        case Wait():
            ((_, (body,)),) = scopes
            return Wait(names[0], body)
        case Cut(ann=ann):
            (((x,), (left, right)),) = scopes
            return Cut(x, ann, left, right)
        case Out():
            ((y,), (payload,)), (_, (cont,)) = scopes
            return Out(names[0], y, payload, cont)
        case Inp():
            (((y,), (body,)),) = scopes
            return Inp(names[0], y, body)
        case Inl():
            ((_, (body,)),) = scopes
            return Inl(names[0], body)
        case Inr():
            ((_, (body,)),) = scopes
            return Inr(names[0], body)
        case Case():
            ((_, (left, right)),) = scopes
            return Case(names[0], left, right)
        case ScpOut():
            ((y,), (payload,)), ((w,), (cont,)) = scopes
            return ScpOut(names[0], y, payload, w, cont)
        case ScpInp():
            (((w, y), (body,)),) = scopes
            return ScpInp(names[0], w, y, body)
        case ScpInl():
            (((w,), (body,)),) = scopes
            return ScpInl(names[0], w, body)
        case ScpInr():
            (((w,), (body,)),) = scopes
            return ScpInr(names[0], w, body)
        case ScpCase():
            ((w,), (left,)), ((w2,), (right,)) = scopes
            return ScpCase(names[0], w, left, w2, right)
    raise TypeError(f"not a process: {p!r}")


def calculus_of(p: Process) -> Calculus | None:
    """CP or SCP when the term commits to one; None for shared-only terms."""
    found: set[Calculus] = set()
    stack = [p]
    while stack:
        node = stack.pop()
        if isinstance(node, CP_ONLY):
            found.add(Calculus.CP)
        elif isinstance(node, SCP_ONLY):
            found.add(Calculus.SCP)
        for _, bodies in parts(node)[1]:
            stack.extend(bodies)
    if len(found) > 1:
        raise ValueError("process mixes CP and SCP constructors")
    return found.pop() if found else None


# ---------------------------------------------------------------------------
# Names in processes
# ---------------------------------------------------------------------------


def free_names(p: Process) -> frozenset[Name]:
    names, scopes = parts(p)
    found = set(names)
    for binders, bodies in scopes:
        for body in bodies:
            found |= free_names(body) - set(binders)
    return frozenset(found)


def all_binders(p: Process) -> frozenset[Name]:
    found: set[Name] = set()
    for binders, bodies in parts(p)[1]:
        found.update(binders)
        for body in bodies:
            found |= all_binders(body)
    return frozenset(found)


def all_names(p: Process) -> frozenset[Name]:
    return free_names(p) | all_binders(p)


def size(p: Process) -> int:
    return 1 + sum(size(body) for _, bodies in parts(p)[1] for body in bodies)


def depth(p: Process) -> int:
    below = [depth(body) for _, bodies in parts(p)[1] for body in bodies]
    return 1 + max(below, default=0)


def rename(p: Process, src: Name, dst: Name) -> Process:
    """Capture-avoiding [dst/src]p; binders that would capture dst are renamed."""
    if src == dst or src not in free_names(p):
        return p
    names, scopes = parts(p)
    renamed_names = tuple(dst if name == src else name for name in names)
    renamed_scopes = []
    for binders, bodies in scopes:
        if src in binders or all(src not in free_names(body) for body in bodies):
            renamed_scopes.append((binders, bodies))
            continue
        if dst in binders:
            avoid = set(binders) | {src, dst}
            for body in bodies:
                avoid |= all_names(body)
            replacement = fresh(avoid, dst.base)
            bodies = tuple(rename(body, dst, replacement) for body in bodies)
            binders = tuple(replacement if b == dst else b for b in binders)
        renamed_scopes.append((binders, tuple(rename(body, src, dst) for body in bodies)))
    return rebuild(p, renamed_names, renamed_scopes)


def freshen(p: Process, avoid: Iterable[Name] = ()) -> Process:
    """Alpha-rename so binders are pairwise distinct and clear of free names and avoid."""
    used = set(avoid) | set(free_names(p))
    return _freshen(p, used)


def _freshen(p: Process, used: set[Name]) -> Process:
    names, scopes = parts(p)
    renewed = []
    for binders, bodies in scopes:
        chosen: list[Name] = []
        for binder in binders:
            if binder in used or binder in chosen:
                chosen.append(fresh(used | set(binders) | set(chosen), binder.base))
            else:
                chosen.append(binder)
        used.update(chosen)
        for old, new in zip(binders, chosen):
            if old != new:
                bodies = tuple(rename(body, old, new) for body in bodies)
        renewed.append((tuple(chosen), tuple(_freshen(body, used) for body in bodies)))
    return rebuild(p, names, renewed)


def binders_clean(p: Process, avoid: Iterable[Name] = ()) -> bool:
    return freshen(p, avoid) == p


def canonical(p: Process) -> tuple:
    """Alpha-invariant key: bound names become binding levels."""
    return _canonical(p, {}, 0)


def _canonical(p: Process, env: dict[Name, int], level: int) -> tuple:
    names, scopes = parts(p)
    slots = tuple(("bound", env[n]) if n in env else ("free", n.base, n.uid) for n in names)
    key: list = [type(p).__name__, slots]
    if isinstance(p, Cut):
        key.append(p.ann)
    for binders, bodies in scopes:
        inner = dict(env)
        for offset, binder in enumerate(binders):
            inner[binder] = level + offset
        key.append(tuple(_canonical(body, inner, level + len(binders)) for body in bodies))
    return tuple(key)


def alpha_eq(p: Process, q: Process) -> bool:
    return canonical(p) == canonical(q)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def show_process(p: Process, unicode: bool = False) -> str:
    def show(q: Process) -> str:
        return show_process(q, unicode)

    match p:
        case Fwd(x, y):
            return f"fwd {x} {y}"
        case Cut(x, ann, left, right):
            return f"nu {x}:{show_type(ann, unicode)} ({show(left)} | {show(right)})"
        case Close(x):
            return f"close {x}"
        case Wait(x, body):
            return f"wait {x}. {show(body)}"
        case Out(x, y, payload, cont):
            return f"{x}[{y}]({show(payload)} | {show(cont)})"
        case Inp(x, y, body):
            return f"{x}({y}). {show(body)}"
        case Inl(x, body):
            return f"{x}[inl]. {show(body)}"
        case Inr(x, body):
            return f"{x}[inr]. {show(body)}"
        case Case(x, left, right):
            return f"case {x} {{{show(left)}; {show(right)}}}"
        case ScpOut(x, y, payload, w, cont):
            return f"{x}[{y}>{w}]({show(payload)} | {show(cont)})"
        case ScpInp(x, w, y, body):
            return f"{x}({w},{y}). {show(body)}"
        case ScpInl(x, w, body):
            return f"{x}[inl>{w}]. {show(body)}"
        case ScpInr(x, w, body):
            return f"{x}[inr>{w}]. {show(body)}"
        case ScpCase(x, w, left, w2, right):
            return f"case {x} {{{w}. {show(left)}; {w2}. {show(right)}}}"
    raise TypeError(f"not a process: {p!r}")


def show_judgment(ctx: TypingContext, p: Process, unicode: bool = False) -> str:
    turnstile = "⊢" if unicode else "|-"
    return f"{show_context(ctx, unicode)} {turnstile} {show_process(p, unicode)}".strip()
