from dataclasses import replace

import pytest

from scpkit.linearity import LinRule
from scpkit.metatheory import enumerate_typed_cp, search_cp, search_scp
from scpkit.syntax import (
    Bot,
    Close,
    Cut,
    Fwd,
    Inp,
    Name,
    One,
    Par,
    ScpInp,
    ScpOut,
    Tensor,
    TypingContext,
    Wait,
)
from scpkit.translation import encode_derivation
from scpkit.typecheck import (
    CpRule,
    ScpRule,
    TypingError,
    cp_check,
    cp_derive,
    derivation_size,
    explain_cp,
    explain_scp,
    rename_derivation,
    same_derivation,
    scp_check,
    scp_derive,
    strengthen,
    validate_cp,
    validate_scp,
    weaken,
)

x, y, z, u, c = (Name(base) for base in "xyzuc")

CTX = TypingContext(((x, One()), (y, Bot())))
REPEATED_WAIT = Wait(y, Wait(y, Close(x)))


def test_repeated_wait_is_typed_in_scp():
    d = scp_check(CTX, REPEATED_WAIT)

    assert [d.rule, d.premises[0].rule, d.premises[0].premises[0].rule] == [ScpRule.BOT, ScpRule.BOT, ScpRule.ONE]
    assert d.premises[0].context == CTX
    assert validate_scp(d)
    assert derivation_size(d) == 3


def test_repeated_wait_is_not_typed_in_cp():
    assert cp_check(CTX, REPEATED_WAIT) is None
    assert explain_cp(CTX, REPEATED_WAIT) == "C⊥: y is not in the context"


def test_cp_contexts_are_linear():
    assert explain_cp(CTX, Close(x)) == "C1: context must be exactly x:1; got x:1, y:bot"
    assert scp_check(CTX, Close(x)) is not None


def test_forwarder_needs_dual_types():
    assert cp_derive(CTX, Fwd(x, y)).rule is CpRule.ID

    with pytest.raises(TypingError, match="Cid: y has type 1, expected bot"):
        cp_derive(TypingContext(((x, One()), (y, One()))), Fwd(x, y))


def test_scp_errors_name_the_rule():
    with pytest.raises(TypingError, match=r"S⊗: x has type 1, expected A \* B"):
        scp_derive(TypingContext(((x, One()),)), ScpOut(x, y, Close(y), u, Close(u)))

    assert explain_scp(CTX, REPEATED_WAIT) is None


def test_cp_cut_splits_the_context():
    p = Cut(c, Bot(), Wait(c, Close(z)), Close(c))

    d = cp_derive(TypingContext(((z, One()),)), p)

    assert d.rule is CpRule.CUT
    assert d.premises[0].context.as_dict() == {z: One(), c: Bot()}
    assert d.premises[1].context.as_dict() == {c: One()}
    assert validate_cp(d)


def test_scp_cut_keeps_the_context_and_checks_linearity():
    p = Cut(c, Bot(), Wait(c, Close(z)), Close(c))

    d = scp_derive(TypingContext(((z, One()),)), p)

    assert d.premises[1].context.as_dict() == {z: One(), c: One()}
    assert [lin.rule for lin in d.lin_premises] == [LinRule.WAIT, LinRule.CLOSE]

    with pytest.raises(TypingError, match="Scut: no linearity derivation for c"):
        scp_derive(TypingContext(((z, One()),)), Cut(c, Bot(), Wait(c, Wait(c, Close(z))), Close(c)))


def test_scp_input_needs_a_linear_payload():
    ctx = TypingContext(((x, Par(Bot(), One())),))

    assert scp_check(ctx, ScpInp(x, u, y, Wait(y, Close(u)))) is not None
    with pytest.raises(TypingError, match="S⅋: no linearity derivation for y"):
        scp_derive(ctx.extend(z, One()), ScpInp(x, u, y, Close(z)))


def test_cp_input_replaces_the_channel_type():
    ctx = TypingContext(((x, Par(Bot(), One())),))

    d = cp_derive(ctx, Inp(x, y, Wait(y, Close(x))))

    assert d.premises[0].context.as_dict() == {x: One(), y: Bot()}


def test_validate_rejects_tampered_derivations():
    d = cp_derive(CTX, Fwd(x, y))

    assert not validate_cp(replace(d, context=TypingContext(((x, One()), (y, One())))))
    assert not validate_scp(replace(scp_derive(CTX, Close(x)), rule=ScpRule.BOT))


def test_weaken_and_strengthen_round_trip():
    d = scp_derive(CTX, REPEATED_WAIT)

    weakened = weaken(d, u, Tensor(One(), One()))

    assert validate_scp(weakened)
    assert weakened.premises[0].premises[0].context.lookup(u) == Tensor(One(), One())
    assert strengthen(weakened, u) == d

    with pytest.raises(ValueError, match="already in the context"):
        weaken(d, x, One())
    with pytest.raises(ValueError, match="free in the process"):
        strengthen(d, y)


def test_rename_derivation():
    d = scp_derive(CTX, REPEATED_WAIT)

    renamed = rename_derivation(d, x, u)

    assert renamed.process == Wait(y, Wait(y, Close(u)))
    assert renamed.context.names() == (u, y)
    assert validate_scp(renamed)

    with pytest.raises(ValueError, match="already occurs"):
        rename_derivation(d, x, y)


def test_same_derivation_ignores_context_order():
    d = cp_derive(CTX, Fwd(x, y))
    flipped = cp_derive(TypingContext(((y, Bot()), (x, One()))), Fwd(x, y))

    assert same_derivation(d, flipped)
    assert not same_derivation(d, cp_derive(TypingContext(((x, Bot()), (y, One()))), Fwd(x, y)))


def test_checkers_are_syntax_directed():
    for ctx, p, d in enumerate_typed_cp(2):
        found = search_cp(ctx, p)
        assert len(found) == 1
        assert same_derivation(found[0], d)

        scp, _ = encode_derivation(d)
        found = search_scp(ctx, scp.process)
        assert len(found) == 1
        assert same_derivation(found[0], scp_derive(ctx, scp.process))
