# src/scpkit/textio.py

import re

from lark import Lark, Token, Transformer, v_args
from lark.exceptions import UnexpectedCharacters, UnexpectedInput, UnexpectedToken, VisitError

from .linearity import LinDerivation
from .reduction import EquivDerivation, ReductionStep
from .syntax import (
    Bot,
    Calculus,
    Case,
    Close,
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
    SessionType,
    Tensor,
    TypingContext,
    Wait,
    With,
    calculus_of,
    freshen,
    show_context,
    show_judgment,
    show_process,
    show_type,
)
from .typecheck import CpDerivation, Derivation, ScpDerivation


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        if line is not None and line > 0:
            message = f"line {line}, column {column}: {message}"
        else:
            line = column = None
        super().__init__(message)
        self.line = line
        self.column = column


GRAMMAR = r"""
    source: judgment | process

    judgment: context "|-" process

    context: "{" [bindings] "}"
           | [bindings]
    bindings: binding ("," binding)*
    binding: NAME ":" session_type

    session_type: atom
                | atom "*" session_type     -> tensor
                | atom "par" session_type   -> par
                | atom "+" session_type     -> plus
                | atom "&" session_type     -> with_
    atom: "1"                               -> one
        | "bot"                             -> bot
        | "(" session_type ")"

    process: "fwd" NAME NAME                                        -> fwd
           | "nu" NAME ":" session_type "(" process "|" process ")"  -> cut
           | "close" NAME                                           -> close
           | "wait" NAME "." process                                -> wait
           | NAME "[" NAME "]" "(" process "|" process ")"          -> out
           | NAME "[" NAME ">" NAME "]" "(" process "|" process ")" -> scp_out
           | NAME "(" NAME ")" "." process                          -> inp
           | NAME "(" NAME "," NAME ")" "." process                 -> scp_inp
           | NAME "[" "inl" "]" "." process                         -> inl
           | NAME "[" "inr" "]" "." process                         -> inr
           | NAME "[" "inl" ">" NAME "]" "." process                -> scp_inl
           | NAME "[" "inr" ">" NAME "]" "." process                -> scp_inr
           | "case" NAME "{" process ";" process "}"                -> case
           | "case" NAME "{" NAME "." process ";" NAME "." process "}" -> scp_case
           | "(" process ")"

    NAME: /[A-Za-z][A-Za-z0-9']*(_[0-9]+)?/
    COMMENT: /#[^\n]*/

    %import common.WS
    %ignore WS
    %ignore COMMENT
"""

NAME = re.compile(r"[A-Za-z][A-Za-z0-9']*(_[0-9]+)?")

parser = Lark(
    GRAMMAR,
    parser="lalr",
    start=["source", "judgment", "context", "session_type", "process"],
)


def _name(token: Token) -> Name:
    text = str(token)
    base, _, uid = text.rpartition("_") if "_" in text else (text, "", "")
    try:
        return Name(base, int(uid)) if uid else Name(text)
    except ValueError as error:
        raise ParseError(str(error), token.line, token.column) from error


@v_args(inline=True)
class _ToSyntax(Transformer):
    def __init__(self, calculus: Calculus | None):
        super().__init__()
        self.calculus = calculus

    def _only(self, calculus: Calculus, token: Token, construct: str) -> None:
        if self.calculus is not None and self.calculus is not calculus:
            raise ParseError(f"{construct} is {calculus} syntax, not {self.calculus}", token.line, token.column)

    # Types

    def session_type(self, inner: SessionType) -> SessionType:
        return inner

    def atom(self, inner: SessionType) -> SessionType:
        return inner

    def one(self) -> SessionType:
        return One()

    def bot(self) -> SessionType:
        return Bot()

    def tensor(self, left: SessionType, right: SessionType) -> SessionType:
        return Tensor(left, right)

    def par(self, left: SessionType, right: SessionType) -> SessionType:
        return Par(left, right)

    def plus(self, left: SessionType, right: SessionType) -> SessionType:
        return Plus(left, right)

    def with_(self, left: SessionType, right: SessionType) -> SessionType:
        return With(left, right)

    # Contexts and judgments

    def binding(self, name: Token, ty: SessionType) -> tuple[Token, SessionType]:
        return name, ty

    def bindings(self, *pairs: tuple[Token, SessionType]) -> list[tuple[Token, SessionType]]:
        return list(pairs)

    def context(self, pairs: list[tuple[Token, SessionType]] | None) -> TypingContext:
        entries = []
        seen = set()
        for token, ty in pairs or ():
            name = _name(token)
            if name in seen:
                raise ParseError(f"duplicate name in context: {name}", token.line, token.column)
            seen.add(name)
            entries.append((name, ty))
        return TypingContext(tuple(entries))

    def judgment(self, ctx: TypingContext, process: Process) -> tuple[TypingContext, Process]:
        return ctx, process

    def source(self, item: Process | tuple[TypingContext, Process]) -> tuple[TypingContext | None, Process]:
        if isinstance(item, tuple):
            return item
        return None, item

    # Processes

    def process(self, inner: Process) -> Process:
        return inner

    def fwd(self, x: Token, y: Token) -> Process:
        return Fwd(_name(x), _name(y))

    def cut(self, x: Token, ann: SessionType, left: Process, right: Process) -> Process:
        return Cut(_name(x), ann, left, right)

    def close(self, x: Token) -> Process:
        return Close(_name(x))

    def wait(self, x: Token, body: Process) -> Process:
        return Wait(_name(x), body)

    def out(self, x: Token, y: Token, payload: Process, cont: Process) -> Process:
        self._only(Calculus.CP, x, "output without continuation")
        return Out(_name(x), _name(y), payload, cont)

    def scp_out(self, x: Token, y: Token, w: Token, payload: Process, cont: Process) -> Process:
        self._only(Calculus.SCP, x, "output with continuation")
        return ScpOut(_name(x), _name(y), payload, _name(w), cont)

    def inp(self, x: Token, y: Token, body: Process) -> Process:
        self._only(Calculus.CP, x, "input without continuation")
        return Inp(_name(x), _name(y), body)

    def scp_inp(self, x: Token, w: Token, y: Token, body: Process) -> Process:
        self._only(Calculus.SCP, x, "input with continuation")
        if _name(w) == _name(y):
            raise ParseError(f"input binds {y} twice", y.line, y.column)
        return ScpInp(_name(x), _name(w), _name(y), body)

    def inl(self, x: Token, body: Process) -> Process:
        self._only(Calculus.CP, x, "selection without continuation")
        return Inl(_name(x), body)

    def inr(self, x: Token, body: Process) -> Process:
        self._only(Calculus.CP, x, "selection without continuation")
        return Inr(_name(x), body)

    def scp_inl(self, x: Token, w: Token, body: Process) -> Process:
        self._only(Calculus.SCP, x, "selection with continuation")
        return ScpInl(_name(x), _name(w), body)

    def scp_inr(self, x: Token, w: Token, body: Process) -> Process:
        self._only(Calculus.SCP, x, "selection with continuation")
        return ScpInr(_name(x), _name(w), body)

    def case(self, x: Token, left: Process, right: Process) -> Process:
        self._only(Calculus.CP, x, "case without continuations")
        return Case(_name(x), left, right)

    def scp_case(self, x: Token, w: Token, left: Process, w2: Token, right: Process) -> Process:
        self._only(Calculus.SCP, x, "case with continuations")
        return ScpCase(_name(x), _name(w), left, _name(w2), right)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------


def _describe(error: UnexpectedInput) -> str:
    if isinstance(error, UnexpectedToken):
        if error.token.type == "$END":
            return "unexpected end of input"
        return f"unexpected {str(error.token)!r}"
    if isinstance(error, UnexpectedCharacters):
        return f"unexpected character {error.char!r}"
    return "unexpected end of input"


def _parse(text: str, start: str, calculus: Calculus | None):
    try:
        tree = parser.parse(text, start=start)
    except UnexpectedInput as error:
        raise ParseError(_describe(error), getattr(error, "line", None), getattr(error, "column", None)) from error
    try:
        return _ToSyntax(None if calculus is None else Calculus(calculus)).transform(tree)
    except VisitError as error:
        cause = error.orig_exc
        if isinstance(cause, ParseError):
            raise cause from None
        raise ParseError(str(cause)) from cause


def _committed(p: Process) -> Process:
    try:
        calculus_of(p)
    except ValueError as error:
        raise ParseError(str(error)) from error
    return p


def parse_name(text: str) -> Name:
    """Parse `x` or `x_3`."""
    text = text.strip()
    if not NAME.fullmatch(text):
        raise ParseError(f"not a name: {text!r}")
    return _name(Token("NAME", text, line=1, column=1))


def parse_type(text: str) -> SessionType:
    return _parse(text, "session_type", None)


def parse_context(text: str) -> TypingContext:
    return _parse(text, "context", None)


def parse_process(text: str, calculus: Calculus | None = None) -> Process:
    """Parse a process; binders are renamed apart so the result is clean."""
    return freshen(_committed(_parse(text, "process", calculus)))


def parse_judgment(text: str, calculus: Calculus | None = None) -> tuple[TypingContext, Process]:
    ctx, process = _parse(text, "judgment", calculus)
    return ctx, freshen(_committed(process), avoid=ctx.names())


def parse_source(text: str, calculus: Calculus | None = None) -> tuple[TypingContext | None, Process]:
    """A judgment `ctx |- P` or a bare process; the context is None for the latter."""
    ctx, process = _parse(text, "source", calculus)
    return ctx, freshen(_committed(process), avoid=ctx.names() if ctx is not None else ())


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def show(value, unicode: bool = False) -> str:
    match value:
        case One() | Bot() | Tensor() | Par() | Plus() | With():
            return show_type(value, unicode)
        case TypingContext():
            return show_context(value, unicode)
        case (TypingContext() as ctx, process):
            return show_judgment(ctx, process, unicode)
        case LinDerivation() | CpDerivation() | ScpDerivation():
            return show_derivation(value, unicode)
    return show_process(value, unicode)


def show_derivation(d: Derivation | LinDerivation, unicode: bool = False) -> str:
    lines: list[str] = []
    _derivation_lines(d, unicode, 0, lines)
    return "\n".join(lines)


def _derivation_lines(d, unicode: bool, level: int, lines: list[str]) -> None:
    pad = "  " * level
    if isinstance(d, LinDerivation):
        lines.append(f"{pad}{d.rule}  lin({d.subject}; {show_process(d.process, unicode)})")
    else:
        lines.append(f"{pad}{d.rule}  {show_judgment(d.context, d.process, unicode)}")
        for lin in getattr(d, "lin_premises", ()):
            _derivation_lines(lin, unicode, level + 1, lines)
    for premise in d.premises:
        _derivation_lines(premise, unicode, level + 1, lines)


# ---------------------------------------------------------------------------
# JSON
# ---------------------------------------------------------------------------


def lin_to_json(d: LinDerivation) -> dict:
    return {
        "rule": str(d.rule),
        "subject": str(d.subject),
        "process": str(d.process),
        "premises": [lin_to_json(q) for q in d.premises],
    }


def derivation_to_json(d: Derivation) -> dict:
    return {
        "rule": str(d.rule),
        "context": [[str(name), str(ty)] for name, ty in d.context],
        "process": str(d.process),
        "premises": [derivation_to_json(q) for q in d.premises],
        "lin": [lin_to_json(lin) for lin in d.lin_premises] if isinstance(d, ScpDerivation) else [],
    }


def equiv_to_json(e: EquivDerivation) -> dict:
    return {
        "rule": str(e.rule),
        "left": str(e.left),
        "right": str(e.right),
        "position": list(e.position),
        "premises": [equiv_to_json(q) for q in e.premises],
    }


def step_to_json(step: ReductionStep) -> dict:
    return {
        "rule": str(step.rule),
        "redex_rule": str(step.redex_rule),
        "source": str(step.source),
        "target": str(step.target),
        "position": list(step.position),
    }
