import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from scpkit.metatheory import enumerate_typed_cp
from scpkit.syntax import (
    Bot,
    Calculus,
    Close,
    Cut,
    Name,
    One,
    Par,
    Plus,
    ScpInp,
    ScpOut,
    Tensor,
    TypingContext,
    Wait,
    With,
    alpha_eq,
    show_judgment,
    show_type,
)
from scpkit.textio import (
    ParseError,
    derivation_to_json,
    parse_judgment,
    parse_name,
    parse_process,
    parse_source,
    parse_type,
    show,
    show_derivation,
)
from scpkit.typecheck import cp_derive, scp_derive

x, y, z, w = (Name(base) for base in "xyzw")

session_types = st.recursive(
    st.sampled_from([One(), Bot()]),
    lambda inner: st.builds(
        lambda connective, left, right: connective(left, right),
        st.sampled_from([Tensor, Par, Plus, With]),
        inner,
        inner,
    ),
    max_leaves=8,
)


def test_parse_type_precedence():
    assert parse_type("1 * bot par 1") == Tensor(One(), Par(Bot(), One()))
    assert parse_type("(1 + bot) & 1") == With(Plus(One(), Bot()), One())
    assert parse_type("((1))") == One()


@given(session_types)
def test_type_round_trip(ty):
    assert parse_type(show_type(ty)) == ty


def test_parse_judgment_example():
    ctx, p = parse_judgment("x:1, y:bot |- wait y. wait y. close x", Calculus.SCP)

    assert ctx == TypingContext(((x, One()), (y, Bot())))
    assert p == Wait(y, Wait(y, Close(x)))


def test_parse_judgment_accepts_braces_and_comments():
    text = "# the smallest program\n{x:1} |- close x  # done\n"

    ctx, p = parse_judgment(text)

    assert ctx == TypingContext(((x, One()),))
    assert p == Close(x)


def test_parse_scp_prefixes():
    p = parse_process("x[y>w](close y | x2(v,u). wait u. wait v. close w)", Calculus.SCP)

    assert alpha_eq(
        p,
        ScpOut(x, y, Close(y), w, ScpInp(Name("x2"), Name("v"), Name("u"), Wait(Name("u"), Wait(Name("v"), Close(w))))),
    )


def test_parse_cut():
    p = parse_process("nu x:1 (close x | wait x. close z)")

    assert p == Cut(x, One(), Close(x), Wait(x, Close(z)))


def test_parse_renames_clashing_binders():
    p = parse_process("wait x. z(x). fwd x z", Calculus.CP)

    assert p.body.y == Name("x", 1)


def test_parse_rejects_the_other_calculus():
    with pytest.raises(ParseError, match="selection without continuation is cp syntax, not scp"):
        parse_process("x[inl]. close x", Calculus.SCP)
    with pytest.raises(ParseError, match="case with continuations is scp syntax, not cp"):
        parse_process("case x {a. close a; b. close b}", Calculus.CP)


def test_parse_rejects_mixed_terms():
    with pytest.raises(ParseError, match="mixes CP and SCP"):
        parse_process("wait a. x[inl]. y[inl>v]. close v")


def test_parse_error_positions():
    with pytest.raises(ParseError, match="unexpected 'close'") as error:
        parse_process("wait x close x")

    assert error.value.line == 1
    assert error.value.column == 8

    with pytest.raises(ParseError, match="unexpected character '\\?'"):
        parse_type("1 ? bot")
    with pytest.raises(ParseError, match="end of input"):
        parse_process("wait x.")


def test_parse_rejects_duplicate_context_names():
    with pytest.raises(ParseError, match="duplicate name in context: x"):
        parse_judgment("x:1, x:bot |- close x")


def test_parse_rejects_double_input_binder():
    with pytest.raises(ParseError, match="input binds y twice"):
        parse_process("x(y,y). close y", Calculus.SCP)


def test_parse_name():
    assert parse_name("x_3") == Name("x", 3)
    assert parse_name(" y' ") == Name("y'")

    with pytest.raises(ParseError, match="reserved word"):
        parse_name("nu")
    with pytest.raises(ParseError, match="not a name"):
        parse_name("3x")


def test_parse_source_accepts_bare_processes():
    ctx, p = parse_source("close x")

    assert ctx is None
    assert p == Close(x)


def test_judgment_round_trip_on_enumerated_terms():
    for ctx, p, _ in enumerate_typed_cp(2):
        parsed_ctx, parsed = parse_judgment(show_judgment(ctx, p), Calculus.CP)

        assert parsed_ctx == ctx
        assert alpha_eq(parsed, p)


def test_show_derivation_lists_rules_with_indentation():
    ctx = TypingContext(((x, One()), (y, Bot())))
    d = scp_derive(ctx, Wait(y, Close(x)))

    assert show_derivation(d) == "S⊥  x:1, y:bot |- wait y. close x\n  S1  x:1, y:bot |- close x"
    assert show(d) == show_derivation(d)
    assert show(One()) == "1"
    assert show((ctx, Close(x)), unicode=True) == "x:1, y:⊥ ⊢ close x"


def test_derivation_to_json_is_serializable():
    d = cp_derive(TypingContext(((x, One()),)), Close(x))

    data = derivation_to_json(d)

    assert data == {"rule": "C1", "context": [["x", "1"]], "process": "close x", "premises": [], "lin": []}
    assert json.loads(json.dumps(data)) == data
