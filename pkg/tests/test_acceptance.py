"""Acceptance gate: every desk-testable guarantee, one test per criterion.

Each test prints a PASS/FAIL line (visible with ``pytest -s`` or on failure)
and asserts the criterion at its stated tolerance and budget.
"""

from fairksel import verify


def _run(result):
    print(result.line)
    assert result.ok, result.detail
    return result


def test_criterion_1_exact_solvers_match_oracle():
    # >= 500 seeded instances per class (delta<=2 unit, delta<=2 weighted,
    # laminar), m <= 12, every valid k; integer weights compare exactly,
    # float weights at 1e-9 relative; under 2 minutes total
    _run(verify.crit1_exact_vs_oracle(instances_per_class=500, max_m=12,
                                      seed=1000, budget_s=120.0))


def test_criterion_2_integrality_gap_reproduction():
    # k in {2, 3}: oracle optimum k against LP threshold 1, under 10 seconds
    _run(verify.crit2_gap(budget_s=10.0))


def test_criterion_3_pipage_guarantees():
    # fixed 6-candidate instance, 1e5 trials: |S| = k on every run, marginals
    # inside 99.7% binomial intervals, all 15 pairs negatively correlated,
    # under 1 minute
    _run(verify.crit3_pipage(trials=100_000, seed=7, budget_s=60.0))


def test_criterion_4_lll_rounding_guarantees():
    # >= 200 seeded runs, random degree 2..4 instances with m <= 12: demand
    # met every time, unweighted value <= 12 ln(2e Delta^2) (OPT + 2),
    # weighted value <= 12 ln(2e Delta^2) (3 OPT + 1) after de-normalization,
    # resample budget never exhausted
    _run(verify.crit4_lll(runs=200, seed=11))


def test_criterion_5_lower_bound_soundness():
    # unweighted T* <= OPT and weighted doubling T* <= 2 OPT on every
    # oracle-checkable instance, LP residuals <= 1e-9
    _run(verify.crit5_lower_bounds(count=240, seed=23))


def test_criterion_6_independent_rounding_floor():
    # seeded n=100, max degree 5 instance, 1e4 trials: demand satisfaction
    # rate >= 0.5 and value <= 20 ln n / ln ln n * T* in >= 99% of trials
    _run(verify.crit6_independent(trials=10_000, seed=5))


def test_criterion_7_incidence_reduction_property():
    # >= 100 simple graphs with <= 8 vertices: value-1 feasibility of the
    # edge-incidence instance matches independent-set-of-size-p existence
    _run(verify.crit7_reduction(samples=120, seed=3))
