import pytest

from scpkit.linearity import lin_all, lin_check
from scpkit.metatheory import enumerate_typed_cp
from scpkit.syntax import (
    Bot,
    Case,
    Close,
    Inl,
    Name,
    One,
    Out,
    Plus,
    ScpCase,
    ScpInl,
    ScpOut,
    Tensor,
    TypingContext,
    Wait,
    alpha_eq,
    binders_clean,
)
from scpkit.translation import decode, decode_derivation, encode, encode_derivation
from scpkit.typecheck import CpRule, cp_derive, same_derivation, scp_check, scp_derive, validate_cp, validate_scp

x, y, z, w = (Name(base) for base in "xyzw")


def test_encode_names_continuations_after_the_subject():
    p = Out(x, y, Close(y), Wait(x, Close(z)))

    q = encode(p)

    assert q == ScpOut(x, y, Close(y), Name("x", 1), Wait(Name("x", 1), Close(z)))
    assert alpha_eq(q, ScpOut(x, y, Close(y), w, Wait(w, Close(z))))
    assert binders_clean(q)
    assert alpha_eq(decode(q), p)


def test_decode_substitutes_the_subject_back():
    q = ScpCase(x, w, Close(w), Name("v"), Wait(Name("v"), Close(z)))

    assert decode(q) == Case(x, Close(x), Wait(x, Close(z)))


def test_decode_then_encode_on_a_selection():
    q = ScpInl(x, w, Close(w))

    assert decode(q) == Inl(x, Close(x))
    assert alpha_eq(encode(decode(q)), q)


def test_encoding_is_typed_and_linear():
    ctx = TypingContext(((x, Tensor(One(), Bot())), (z, One())))
    p = Out(x, y, Close(y), Wait(x, Close(z)))

    q = encode(p)

    assert scp_check(ctx, q) is not None
    assert set(lin_all(ctx, q)) == {x, z}


def test_derivation_round_trip():
    d = cp_derive(TypingContext(((x, Plus(One(), Bot())),)), Inl(x, Close(x)))
    scp, lins = encode_derivation(d)

    assert validate_scp(scp)
    assert scp.process == ScpInl(x, Name("x", 1), Close(Name("x", 1)))
    assert set(lins) == {x}
    assert same_derivation(decode_derivation(scp, lins), d)


def test_derivation_round_trip_on_enumerated_judgments():
    for ctx, p, d in enumerate_typed_cp(3):
        scp, lins = encode_derivation(d)

        assert validate_scp(scp)
        assert set(lins) == ctx.domain()
        assert alpha_eq(scp.process, encode(p))

        back = decode_derivation(scp, lins)

        assert validate_cp(back)
        assert same_derivation(back, d)


def test_decode_derivation_needs_every_witness():
    ctx = TypingContext(((x, One()), (y, Bot())))
    d = scp_derive(ctx, Wait(y, Close(x)))
    lins = lin_all(ctx, d.process)

    with pytest.raises(ValueError, match="no linearity derivation for y"):
        decode_derivation(d, {x: lins[x]})
    with pytest.raises(ValueError, match="invalid linearity derivation for y"):
        decode_derivation(d, {x: lins[x], y: lins[x]})


def test_decode_derivation_drops_unused_context_names():
    ctx = TypingContext(((x, One()), (z, Bot())))
    d = scp_derive(ctx, Close(x))

    back = decode_derivation(d, {x: lin_check(x, Close(x))})

    assert back.rule is CpRule.ONE
    assert back.context == TypingContext(((x, One()),))
    assert validate_cp(back)


def test_encode_derivation_rejects_invalid_input():
    d = cp_derive(TypingContext(((x, One()),)), Close(x))

    with pytest.raises(ValueError, match="valid CP derivation"):
        encode_derivation(d.__class__(d.rule, TypingContext(((x, Bot()),)), d.process))
