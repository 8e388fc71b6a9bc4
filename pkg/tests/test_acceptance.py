"""Acceptance suite: one test per criterion, each printing a verdict line.

Run with `pytest tests/test_acceptance.py -v -s` to see the per-criterion
PASS/FAIL lines.  The heavyweight corpora (the full reduced-fraction walk to
q = 2000, the exceptional scan to 10^4, and the 20-numerators-per-q survey to
10^4) are computed once in session fixtures and shared.
"""

import math
import time
from fractions import Fraction

import pytest

from pqrep import (
    DecomposeConfig,
    enumerate_by_denominator,
    enumerate_semigroup_ball,
    evaluate,
    expand,
    find_witness,
    is_member,
    min_cost_oracle,
    scan_exceptional,
)
from pqrep.cli import run_cost_survey, zaremba_csv
from pqrep.zaremba import OracleQuery

SEED = 0


def _verdict(num: int, name: str, ok: bool, detail: str = "") -> None:
    print(f"ACCEPTANCE {num:02d} {name}: {'PASS' if ok else 'FAIL'} {detail}".rstrip())


# ---------------------------------------------------------------------------
# shared corpora


@pytest.fixture(scope="session")
def roundtrip_stats():
    t0 = time.time()
    count = roundtrip_bad = cost_bad = 0
    for q in range(2, 2001):
        for b in range(1, q):
            if math.gcd(b, q) != 1:
                continue
            x = Fraction(b, q)
            e = expand(x)
            if evaluate(e) != x:
                roundtrip_bad += 1
            if (1 << sum(e)) < q:
                cost_bad += 1
            count += 1
    return {
        "count": count,
        "roundtrip_bad": roundtrip_bad,
        "cost_bad": cost_bad,
        "elapsed": time.time() - t0,
    }


@pytest.fixture(scope="session")
def zaremba_scans():
    t0 = time.time()
    quad = scan_exceptional(10_000, 5, workers=4)
    elapsed = time.time() - t0
    solo = scan_exceptional(10_000, 5, workers=1)
    return {
        "quad": quad,
        "elapsed_quad": elapsed,
        "csv_solo": zaremba_csv(solo, SEED),
        "csv_quad": zaremba_csv(quad, SEED),
    }


@pytest.fixture(scope="session")
def survey_outcomes():
    cfg = DecomposeConfig()
    quad = run_cost_survey(2, 10_000, cfg, seed=SEED, sample=20, workers=4)
    solo = run_cost_survey(2, 10_000, cfg, seed=SEED, sample=20, workers=1)
    return {"solo": solo, "quad": quad}


# ---------------------------------------------------------------------------
# criteria


def test_criterion_01_roundtrip_exactness(roundtrip_stats):
    s = roundtrip_stats
    ok = s["roundtrip_bad"] == 0 and s["elapsed"] < 120.0
    _verdict(
        1,
        "round-trip exactness q<=2000",
        ok,
        f"({s['count']} fractions, {s['roundtrip_bad']} mismatches, {s['elapsed']:.1f}s)",
    )
    assert s["roundtrip_bad"] == 0
    assert s["elapsed"] < 120.0


def test_criterion_02_cost_lower_bound(roundtrip_stats):
    s = roundtrip_stats
    ok = s["cost_bad"] == 0
    _verdict(2, "cost lower bound 2^cost >= q", ok, f"({s['count']} fractions)")
    assert ok


def test_criterion_03_strategy_equivalence():
    mismatches = []
    for bound in (2, 3, 4, 5, 6):
        enumerated = enumerate_by_denominator(500, bound)
        filtered = {}
        for q in range(2, 501):
            nums = [
                b
                for b in range(1, q)
                if math.gcd(b, q) == 1 and is_member(Fraction(b, q), bound)
            ]
            if nums:
                filtered[q] = nums
        if enumerated != filtered:
            mismatches.append(bound)
    ok = not mismatches
    _verdict(3, "enumeration equals membership filter", ok, f"(A=2..6, q<=500)")
    assert ok, mismatches


def test_criterion_04_semigroup_correspondence():
    ball = enumerate_semigroup_ball(1000, 5)
    dets_ok = all(abs(e.matrix.det()) == 1 for e in ball)
    pairs = {}
    words_ok = True
    for e in ball:
        if e.word[-1] < 2:
            continue
        b, q = e.matrix.g12, e.matrix.g22
        if expand(Fraction(b, q)) != e.word or (b, q) in pairs:
            words_ok = False
        pairs[(b, q)] = e.word
    expected = {
        (b, q) for q, nums in enumerate_by_denominator(1000, 5).items() for b in nums
    }
    bijection = set(pairs) == expected
    ok = dets_ok and words_ok and bijection
    _verdict(
        4,
        "semigroup ball <-> strict members (M=1000, A=5)",
        ok,
        f"({len(ball)} elements, {len(expected)} fractions)",
    )
    assert dets_ok and words_ok
    assert bijection


def test_criterion_05_desk_scale_no_exceptions(zaremba_scans):
    report = zaremba_scans["quad"]
    elapsed = zaremba_scans["elapsed_quad"]
    ok = report.members == () and elapsed < 300.0
    _verdict(5, "scan N=10^4 A=5 finds nothing", ok, f"({elapsed:.1f}s, 4 workers)")
    assert report.members == (), "exceptional members would contradict known computations"
    assert elapsed < 300.0


def test_criterion_06_exceptional_monotone_in_bound():
    reports = {bound: scan_exceptional(2000, bound) for bound in (2, 3, 4, 5)}
    sets = {bound: set(r.members) for bound, r in reports.items()}
    chain_ok = sets[5] < sets[4] < sets[3] < sets[2]
    exponents = [
        reports[bound].density_exponent
        for bound in (2, 3, 4, 5)
        if reports[bound].density_exponent is not None
    ]
    exponents_ok = all(a > b for a, b in zip(exponents, exponents[1:]))
    counts = {bound: len(sets[bound]) for bound in sorted(sets)}
    ok = chain_ok and exponents_ok
    _verdict(6, "exceptional sets shrink with the bound", ok, f"(counts {counts})")
    assert chain_ok, counts
    assert exponents_ok, exponents


def test_criterion_07_decompose_survey(survey_outcomes):
    outcome = survey_outcomes["quad"]
    ok = outcome.failures == 0 and outcome.c_cap <= 60.0
    _verdict(
        7,
        "survey q<=10^4, 20 per q, all verified",
        ok,
        f"({outcome.rows} rows, C_cap={outcome.c_cap:.2f})",
    )
    assert outcome.failures == 0
    assert outcome.c_cap <= 60.0


def test_criterion_08_collapse_and_depth(survey_outcomes):
    violations = survey_outcomes["quad"].violations
    ok = violations == []
    _verdict(8, "remainder below sqrt(q), depth capped", ok, f"({len(violations)} violations)")
    assert ok, violations[:10]


def test_criterion_09_oracle_cross_validation():
    def naive(scope, bound, d, beta):
        for b in range(1, scope):
            if b % d != beta % d or math.gcd(b, scope) != 1:
                continue
            num, den, fits = b, scope, True
            while num:
                a, rem = divmod(den, num)
                if a > bound:
                    fits = False
                    break
                den, num = num, rem
            if fits:
                return b
        return None

    checked = mismatches = 0
    for bound in (3, 5):
        for q in range(2, 501):
            for d in range(1, 11):
                for beta in range(d if d > 1 else 1):
                    if d > 1 and math.gcd(beta, d) != 1:
                        continue
                    res = find_witness(OracleQuery(q=q, bound=bound, d=d, beta=beta))
                    if res.witness != naive(q, bound, d, beta) or not res.exhausted:
                        mismatches += 1
                    checked += 1
    ok = mismatches == 0
    _verdict(9, "witness search equals naive scan", ok, f"({checked} queries)")
    assert ok


def test_criterion_10_min_cost_fixtures():
    half = min_cost_oracle(Fraction(1, 2), 2, 10)
    three_fifths = min_cost_oracle(Fraction(3, 5), 2, 10)
    ok = (
        half is not None
        and half[0] == 2
        and [(t.sign, t.value) for t in half[1].terms] == [(1, Fraction(1, 2))]
        and three_fifths is not None
        and three_fifths[0] == 4
    )
    _verdict(10, "bounded min-cost fixtures", ok, "(C(1/2)=2, C(3/5)=4)")
    assert ok


def test_criterion_11_worker_count_determinism(zaremba_scans, survey_outcomes):
    zaremba_same = zaremba_scans["csv_solo"] == zaremba_scans["csv_quad"]
    survey_same = survey_outcomes["solo"].csv_text == survey_outcomes["quad"].csv_text
    ok = zaremba_same and survey_same
    _verdict(11, "byte-identical CSV at 1 and 4 workers", ok)
    assert zaremba_same
    assert survey_same
