from scpkit.linearity import ARITY, LinDerivation, LinRule, lin_all, lin_check, lin_size, rename_lin, validate_lin
from scpkit.metatheory import enumerate_processes, search_lin
from scpkit.syntax import (
    Bot,
    Close,
    Cut,
    Fwd,
    Name,
    One,
    ScpCase,
    ScpInl,
    ScpOut,
    TypingContext,
    Wait,
    all_names,
    free_names,
)

x, y, z, w, v, c = (Name(base) for base in "xyzwvc")

# A well-typed SCP process that is not linear in y.
REPEATED_WAIT = Wait(y, Wait(y, Close(x)))


def test_repeated_wait_is_not_linear_in_its_channel():
    assert lin_check(y, REPEATED_WAIT) is None


def test_repeated_wait_is_linear_in_the_closed_channel():
    d = lin_check(x, REPEATED_WAIT)

    assert [d.rule, d.premises[0].rule, d.premises[0].premises[0].rule] == [LinRule.WAIT2, LinRule.WAIT2, LinRule.CLOSE]
    assert validate_lin(d)
    assert lin_size(d) == 3


def test_forwarder_uses_each_end_once():
    assert lin_check(x, Fwd(x, y)).rule is LinRule.FWD1
    assert lin_check(y, Fwd(x, y)).rule is LinRule.FWD2
    assert lin_check(x, Fwd(x, x)) is None


def test_linear_names_are_free():
    assert lin_check(z, Close(x)) is None
    assert lin_check(z, Wait(x, Close(y))) is None


def test_output_moves_linearity_to_the_continuation():
    p = ScpOut(x, y, Close(y), w, Close(w))

    d = lin_check(x, p)

    assert d.rule is LinRule.OUT
    assert d.premises == (LinDerivation(LinRule.CLOSE, w, Close(w)),)
    assert lin_check(x, ScpOut(x, y, Close(y), w, Wait(x, Close(w)))) is None


def test_output_on_another_channel_picks_the_side():
    p = ScpOut(v, y, Wait(z, Close(y)), w, Close(w))

    assert lin_check(z, p).rule is LinRule.OUT2
    assert lin_check(z, ScpOut(v, y, Close(y), w, Wait(z, Close(w)))).rule is LinRule.OUT3


def test_a_name_on_both_sides_of_a_cut_is_not_linear():
    p = Cut(c, Bot(), Wait(c, Close(z)), Wait(z, Close(c)))

    assert lin_check(z, p) is None


def test_case_needs_both_branches():
    p = ScpCase(v, w, Wait(z, Close(w)), Name("w", 1), Close(Name("w", 1)))

    assert lin_check(z, p) is None
    assert lin_check(v, p).rule is LinRule.CASE


def test_selection_continuation():
    d = lin_check(x, ScpInl(x, w, Close(w)))

    assert d.rule is LinRule.INL
    assert d.premises[0].subject == w


def test_lin_all_covers_the_context():
    ctx = TypingContext(((x, One()), (y, Bot())))

    witnesses = lin_all(ctx, Wait(y, Close(x)))

    assert set(witnesses) == {x, y}
    assert lin_all(ctx, REPEATED_WAIT) is None


def test_validate_rejects_tampered_derivations():
    assert not validate_lin(LinDerivation(LinRule.CLOSE, x, Close(y)))
    assert not validate_lin(LinDerivation(LinRule.WAIT2, x, Wait(y, Close(x))))
    assert validate_lin(LinDerivation(LinRule.WAIT2, x, Wait(y, Close(x)), (LinDerivation(LinRule.CLOSE, x, Close(x)),)))


def test_validate_rejects_a_composition_that_uses_the_name_on_both_sides():
    p = Cut(x, One(), Fwd(z, w), Fwd(z, v))
    left = LinDerivation(LinRule.FWD1, z, Fwd(z, w))
    right = LinDerivation(LinRule.FWD1, z, Fwd(z, v))

    assert lin_check(z, p) is None
    assert not validate_lin(LinDerivation(LinRule.PCOMP1, z, p, (left,)))
    assert not validate_lin(LinDerivation(LinRule.PCOMP2, z, p, (right,)))


def test_rename_lin_keeps_derivations_valid():
    d = lin_check(x, Wait(y, Close(x)))

    renamed = rename_lin(d, x, z)

    assert renamed.subject == z
    assert renamed.process == Wait(y, Close(z))
    assert validate_lin(renamed)


def test_arity_matches_premise_counts():
    assert ARITY[LinRule.CLOSE] == 0
    assert ARITY[LinRule.OUT] == 1
    assert ARITY[LinRule.CASE2] == 2


def test_checker_agrees_with_exhaustive_search():
    terms = [
        REPEATED_WAIT,
        Wait(y, Close(x)),
        ScpOut(x, y, Close(y), w, Close(w)),
        ScpCase(v, w, Wait(z, Close(w)), Name("w", 1), Wait(z, Close(Name("w", 1)))),
        Cut(c, One(), Close(c), Wait(c, Close(z))),
    ]
    for p in terms:
        for name in (x, y, z, v):
            found = search_lin(name, p)
            assert len(found) <= 1
            assert (lin_check(name, p) is not None) == bool(found)


def test_only_free_names_are_linear_in_raw_terms():
    for size in (1, 2, 3):
        for p in enumerate_processes(size, (x, y)):
            for name in all_names(p) | {z}:
                if lin_check(name, p) is not None:
                    assert name in free_names(p), p
