from hypothesis import given, settings
from hypothesis import strategies as st

from scpkit.config import GenConfig, Suite, SuiteConfig
from scpkit.linearity import lin_all
from scpkit.metatheory import (
    Report,
    all_types,
    check_adequacy,
    check_subject_reduction,
    check_subject_reduction_cp,
    enumerate_processes,
    enumerate_typed_cp,
    generate_typed,
    run_suite,
    run_suites,
    search_lin,
)
from scpkit.reduction import ReductionStep, StepRule, enumerate_steps
from scpkit.syntax import Bot, Calculus, Close, Cut, Fwd, Name, One, TypingContext, Wait, free_names
from scpkit.typecheck import cp_check, scp_check, scp_derive, validate_cp, validate_scp

x, y, z, u, c = (Name(base) for base in "xyzuc")

CTX = TypingContext(((x, One()), (y, Bot())))
REPEATED_WAIT = Wait(y, Wait(y, Close(x)))


def test_enumeration_counts():
    assert len(enumerate_typed_cp(1)) == 9
    assert len(enumerate_typed_cp(2)) == 32
    assert len(enumerate_typed_cp(3)) == 173
    assert len(enumerate_typed_cp(4)) == 1059


def test_enumerated_judgments_are_derivable():
    for ctx, p, d in enumerate_typed_cp(3):
        assert validate_cp(d)
        assert d.process == p
        assert free_names(p) == ctx.domain()


def test_all_types_counts():
    assert all_types(0) == ()
    assert set(all_types(1)) == {One(), Bot()}
    assert len(all_types(2)) == 18
    assert len(all_types(3)) == 1298


def test_enumerate_raw_processes():
    found = enumerate_processes(1, (x, y))

    assert set(found) == {Fwd(x, y), Fwd(y, x), Close(x), Close(y)}
    assert enumerate_processes(0, (x,)) == []


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_generated_cp_terms_are_typed(seed):
    ctx, p, d = generate_typed(GenConfig(seed=seed, max_depth=3))

    assert cp_check(ctx, p) is not None
    assert validate_cp(d)


@settings(max_examples=20, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_generated_scp_terms_are_typed_and_linear(seed):
    ctx, p, d = generate_typed(GenConfig(seed=seed, max_depth=3, calculus=Calculus.SCP))

    assert scp_check(ctx, p) is not None
    assert validate_scp(d)
    assert lin_all(ctx, p) is not None


def test_generation_is_seeded():
    first = generate_typed(GenConfig(seed=7))
    second = generate_typed(GenConfig(seed=7))

    assert first[:2] == second[:2]


def test_subject_reduction_on_a_small_cut():
    p = Cut(c, One(), Close(c), Wait(c, Close(z)))
    ctx = TypingContext(((z, One()),))

    report = check_subject_reduction(ctx, p, equiv_depth=0)
    cp_report = check_subject_reduction_cp(ctx, p, equiv_depth=0)

    assert report.ok and report.checked == 1
    assert cp_report.ok and cp_report.checked == 1


def test_subject_reduction_reports_escaped_names():
    p = Cut(c, One(), Close(c), Wait(c, Close(z)))
    bogus = ReductionStep(StepRule.ONE_BOT, p, Close(u))

    report = check_subject_reduction(TypingContext(((z, One()),)), p, steps=[bogus])

    assert not report.ok
    assert report.violations[0].check == "free names"
    assert "u not in the context" in report.violations[0].detail


def test_adequacy_rejects_non_linear_scp_terms():
    report = check_adequacy(CTX, REPEATED_WAIT, scp_derive(CTX, REPEATED_WAIT))

    assert report.ok
    assert report.checked == 0
    assert report.rejected == ["x:1, y:bot |- wait y. wait y. close x: no linearity derivation for y"]


def test_adequacy_on_enumerated_judgments():
    for ctx, p, d in enumerate_typed_cp(2):
        assert check_adequacy(ctx, p, d).ok


def test_search_lin_finds_exactly_one_witness():
    assert len(search_lin(x, REPEATED_WAIT)) == 1
    assert search_lin(y, REPEATED_WAIT) == []


def test_report_merge_and_json():
    report = Report(Suite.DUALITY)
    report.record(True, "check", "a")
    other = Report(Suite.DUALITY)
    other.record(False, "check", "b", "detail")

    report.merge(other)

    assert report.checked == 2
    assert report.to_json() == {
        "suite": "duality",
        "checked": 2,
        "ok": False,
        "violations": [{"check": "check", "instance": "b", "detail": "detail"}],
        "rejected": [],
    }


def test_small_suites_pass():
    config = SuiteConfig(count=3, size=1, max_depth=2, equiv_depth=1)

    for suite in (Suite.DUALITY, Suite.ROUND_TRIP, Suite.SYNTAX_DIRECTEDNESS, Suite.ADEQUACY):
        report = run_suite(suite, config)
        assert report.ok, report.violations
        assert report.checked > 0


def test_adequacy_suite_lists_the_rejected_term():
    report = run_suite(Suite.ADEQUACY, SuiteConfig(count=0, size=1))

    assert report.ok
    assert any("no linearity derivation for y" in line for line in report.rejected)


def test_run_suites_covers_every_suite():
    reports = run_suites(SuiteConfig(count=2, size=1, max_depth=2, equiv_depth=1))

    assert [r.suite for r in reports] == [s for s in Suite if s is not Suite.ALL]
    duality = reports[3]
    assert duality.suite == Suite.DUALITY
    assert duality.checked == 3 * (1298 + 2)
    assert all(r.ok for r in reports), [r.violations for r in reports]


def test_enumerated_judgments_are_distinct():
    judgments = enumerate_typed_cp(3)

    assert len({(ctx, p) for ctx, p, _ in judgments}) == len(judgments)
    assert all(ctx.names()[0] == x for ctx, _, _ in judgments)


def test_generated_terms_reach_every_reduction_rule():
    seen = set()
    for seed in range(400):
        _, p, _ = generate_typed(GenConfig(seed=seed, max_depth=4))
        for s in enumerate_steps(p):
            seen |= {s.rule, s.redex_rule}

    assert seen == set(StepRule), set(StepRule) - seen


def test_generated_redexes_keep_their_types():
    for seed in range(50):
        ctx, p, d = generate_typed(GenConfig(seed=seed, max_depth=4))
        assert validate_cp(d)
        assert check_subject_reduction_cp(ctx, p, equiv_depth=0).ok


def test_lemmas_suite_checks_freeness_on_raw_terms():
    report = run_suite(Suite.LEMMAS, SuiteConfig(count=2, size=2, max_depth=3, equiv_depth=0))

    assert report.ok, report.violations
    assert report.checked > len(enumerate_processes(2, (x, y)))
