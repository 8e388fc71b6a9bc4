"""Signed decomposition of a rational into bounded-quotient pieces.

One split rewrites x = b/q (q above a threshold) as a fraction over q times a
product of r auxiliary primes, with all partial quotients at most a bound,
plus a remainder supported on the primes alone; peeling one prime per step
drives the remainder's denominator below sqrt(q).  Splitting repeats on the
remainder until the working denominator is small enough to emit verbatim.
Every intermediate identity is checked in exact rational arithmetic, and the
witness searches are exhaustive progression scans, so a returned
representation is correct by construction and re-verifiable from scratch.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import prod

from .cf_core import cost
from .zaremba import OracleQuery, find_witness


class PrimeWindowError(RuntimeError):
    """The widened prime window cannot supply enough admissible primes."""


class SplitError(RuntimeError):
    """A split ran out of prime resamples at the current quotient bound."""

    def __init__(self, message: str, trace: "SplitTrace"):
        super().__init__(message)
        self.trace = trace


class DecomposeError(RuntimeError):
    """Decomposition failed after every resample and bound escalation."""

    def __init__(self, message: str, traces: list["SplitTrace"]):
        super().__init__(message)
        self.traces = traces


class VerificationError(RuntimeError):
    """A representation failed its from-scratch re-check."""


@dataclass(frozen=True)
class SignedTerm:
    """One summand: sign times a reduced fraction in (0, 1)."""

    sign: int
    value: Fraction

    def __post_init__(self) -> None:
        if self.sign not in (1, -1):
            raise ValueError(f"sign must be +1 or -1, got {self.sign}")
        if not 0 < self.value < 1:
            raise ValueError(f"term value must lie in (0, 1), got {self.value}")

    @property
    def signed(self) -> Fraction:
        return self.sign * self.value


@dataclass(frozen=True)
class Representation:
    """A finite signed sum of fractions equal to the target, exactly."""

    target: Fraction
    terms: tuple[SignedTerm, ...]

    def signed_sum(self) -> Fraction:
        return sum((t.signed for t in self.terms), Fraction(0))

    def total_cost(self) -> int:
        return sum(cost(t.value) for t in self.terms)


@dataclass(frozen=True)
class DecomposeConfig:
    """Tuning knobs for the split construction.

    bound is the partial-quotient cap for main terms; delta the prime-window
    exponent (primes are drawn near q**delta); r the number of primes per
    split; q0 the base threshold below which fractions are emitted verbatim.
    The window widens geometrically up to widen_rounds times before r is
    reduced; failed witness searches trigger up to max_resamples fresh prime
    draws, then the bound escalates by escalation_step (at most
    max_escalations times).  budget caps each progression scan; None scans to
    exhaustion.
    """

    bound: int = 8
    delta: Fraction = Fraction(1, 4)
    r: int = 4
    q0: int = 100
    widen_rounds: int = 3
    max_resamples: int = 5
    escalation_step: int = 5
    max_escalations: int = 8
    budget: int | None = None

    def __post_init__(self) -> None:
        if self.bound < 1:
            raise ValueError(f"quotient bound must be >= 1, got {self.bound}")
        if not 0 < self.delta < 1:
            raise ValueError(f"delta must lie in (0, 1), got {self.delta}")
        if self.r < 1:
            raise ValueError(f"need r >= 1, got {self.r}")
        if self.q0 < 2:
            raise ValueError(f"base threshold must be >= 2, got {self.q0}")


@dataclass(frozen=True)
class StepRecord:
    """One witness search inside a split."""

    support_before: tuple[int, ...]
    modulus: int
    residue: int
    witness: int
    scanned: int
    method: str
    support_after: tuple[int, ...]


@dataclass
class SplitTrace:
    """Everything needed to replay one split."""

    denominator: int
    primes: tuple[int, ...]
    steps: list[StepRecord]
    resamples: int
    bound_used: int
    seed: int
    remainder_den: int = 1
    depth: int = 0


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@lru_cache(maxsize=None)
def _primes_between(lo: int, hi: int) -> tuple[int, ...]:
    return tuple(p for p in range(max(2, lo), hi + 1) if _is_prime(p))


def _iroot(x: int, k: int) -> int:
    """floor(x ** (1/k)) in exact integer arithmetic."""
    if x < 0 or k < 1:
        raise ValueError(f"bad root arguments ({x}, {k})")
    if x < 2:
        return x
    try:
        r = int(round(x ** (1.0 / k)))
    except OverflowError:
        r = 1 << ((x.bit_length() + k - 1) // k)
    while r > 1 and r**k > x:
        r -= 1
    while (r + 1) ** k <= x:
        r += 1
    return r


def _prime_window(q: int, delta: Fraction) -> tuple[int, int]:
    # Initial window [max(3, ceil(q**delta / 2)), max(5, floor(q**delta))],
    # computed with integer roots so no float ever touches the bounds.
    power = q**delta.numerator
    root = _iroot(power, delta.denominator)
    exact = root**delta.denominator == power
    half = root // 2 if exact and root % 2 == 0 else root // 2 + 1
    return max(3, half), max(5, root)


def select_primes(
    q: int,
    cfg: DecomposeConfig,
    r: int | None = None,
    seed: int = 0,
    attempt: int = 0,
) -> list[int]:
    """r distinct primes coprime to q drawn from a window near q**delta.

    The window floor never drops below 3, so 2 is never selected.  Attempt 0
    deterministically prefers the largest admissible primes at or below the
    window top (closest to q**delta); later attempts draw a seeded sample from
    the widened pool so retries explore different products.  Raises
    PrimeWindowError when even the fully widened window cannot supply r primes.
    """
    if q < 2:
        raise ValueError(f"need q >= 2, got {q}")
    want = cfg.r if r is None else r
    lo0, hi0 = _prime_window(q, cfg.delta)
    lo, hi = lo0, hi0
    pool: list[int] = []
    for _ in range(cfg.widen_rounds + 1):
        pool = [p for p in _primes_between(lo, hi) if q % p]
        if len(pool) >= want:
            break
        lo, hi = max(3, lo // 2), 2 * hi
    if len(pool) < want:
        raise PrimeWindowError(
            f"prime window for q={q} holds {len(pool)} admissible primes, need {want}"
        )
    if attempt == 0:
        near = sorted((p for p in pool if p <= hi0), reverse=True)
        beyond = sorted(p for p in pool if p > hi0)
        chosen = (near + beyond)[:want]
    else:
        rng = random.Random(f"{seed}:{q}:{attempt}")
        chosen = rng.sample(pool, want)
    return sorted(chosen)


def _try_split(x: Fraction, primes: list[int], cfg: DecomposeConfig, bound: int):
    """One split attempt with a fixed prime sample.

    Returns (terms, remainder_fraction, steps) or None when some witness
    search comes up empty (the caller resamples).
    """
    b, q = x.numerator, x.denominator
    prime_prod = prod(primes)
    big = q * prime_prod
    residue = (b * prime_prod) % q
    res = find_witness(
        OracleQuery(q=q, bound=bound, d=q, beta=residue), scope=big, budget=cfg.budget
    )
    if res.witness is None:
        return None
    terms = [SignedTerm(1, Fraction(res.witness, big))]
    rem = x - terms[0].value
    # The congruence cancels the q-part, so the remainder lives on the primes.
    assert prime_prod % rem.denominator == 0
    steps = [
        StepRecord(
            support_before=tuple(primes),
            modulus=q,
            residue=residue,
            witness=res.witness,
            scanned=res.candidates_scanned,
            method=res.method,
            support_after=tuple(p for p in primes if rem.denominator % p == 0),
        )
    ]
    while rem != 0 and rem.denominator**2 >= q:
        den = rem.denominator
        support = tuple(p for p in primes if den % p == 0)
        assert prod(support) == den
        p_star = max(support)
        residue = abs(rem.numerator) % p_star
        res = find_witness(OracleQuery(q=den, bound=bound, d=p_star, beta=residue), budget=cfg.budget)
        if res.witness is None:
            return None
        sign = 1 if rem > 0 else -1
        terms.append(SignedTerm(sign, Fraction(res.witness, den)))
        rem = rem - terms[-1].signed
        # p_star divides the new numerator, so the support strictly shrinks
        # and the remainder magnitude stays below 1.
        assert (den // p_star) % rem.denominator == 0
        assert abs(rem) < 1
        steps.append(
            StepRecord(
                support_before=support,
                modulus=p_star,
                residue=residue,
                witness=res.witness,
                scanned=res.candidates_scanned,
                method=res.method,
                support_after=tuple(p for p in support if rem.denominator % p == 0),
            )
        )
    assert sum((t.signed for t in terms), Fraction(0)) + rem == x
    return terms, rem, steps


def split(
    x: Fraction, cfg: DecomposeConfig, seed: int = 0, bound: int | None = None
) -> tuple[list[SignedTerm], SignedTerm | None, SplitTrace]:
    """One split round: bounded-quotient main terms plus a small remainder.

    Requires x in (0, 1) with denominator above cfg.q0.  On success the main
    terms all pass strict membership at the bound, the remainder (None when
    the terms already sum to x) has denominator below sqrt(den(x)), and the
    terms plus remainder reproduce x exactly.  Raises SplitError when no prime
    sample admits witnesses at this bound.
    """
    if not 0 < x < 1:
        raise ValueError(f"split needs a value in (0, 1), got {x}")
    q = x.denominator
    if q <= cfg.q0:
        raise ValueError(f"denominator {q} is at or below the base threshold {cfg.q0}")
    bound = cfg.bound if bound is None else bound
    r_want = cfg.r
    trace = SplitTrace(q, (), [], 0, bound, seed)
    for attempt in range(cfg.max_resamples + 1):
        primes = None
        while primes is None:
            try:
                primes = select_primes(x.denominator, cfg, r=r_want, seed=seed, attempt=attempt)
            except PrimeWindowError:
                r_want -= 1
                if r_want == 0:
                    raise SplitError(f"no usable prime window for q={q}", trace) from None
        trace = SplitTrace(q, tuple(primes), [], attempt, bound, seed)
        outcome = _try_split(x, primes, cfg, bound)
        if outcome is not None:
            terms, rem, steps = outcome
            trace.steps = steps
            trace.remainder_den = rem.denominator
            remainder = None
            if rem != 0:
                remainder = SignedTerm(1 if rem > 0 else -1, abs(rem))
            return terms, remainder, trace
    raise SplitError(
        f"no witness for q={q} after {cfg.max_resamples} resamples at bound {bound}", trace
    )


def decompose(
    x: Fraction, cfg: DecomposeConfig | None = None, seed: int = 0
) -> tuple[Representation, list[SplitTrace]]:
    """Full signed representation of x in (0, 1) with bounded-quotient terms.

    Splits while the working denominator exceeds cfg.q0, recursing on the
    absolute value of each remainder and reattaching its sign; the final
    small-denominator fraction is emitted verbatim and zero remainders are
    dropped.  When a split fails, the quotient bound escalates by
    cfg.escalation_step and the split is retried; escalations stay visible in
    the traces.  Identical (x, cfg, seed) give identical output.
    """
    cfg = DecomposeConfig() if cfg is None else cfg
    if not 0 < x < 1:
        raise ValueError(f"decompose needs a value in (0, 1), got {x}")
    terms: list[SignedTerm] = []
    traces: list[SplitTrace] = []
    work = x
    while work != 0 and work.denominator > cfg.q0:
        sign = 1 if work > 0 else -1
        main, remainder, trace = _split_escalating(abs(work), cfg, seed, traces)
        trace.depth = len(traces) + 1
        traces.append(trace)
        terms.extend(SignedTerm(sign * t.sign, t.value) for t in main)
        work = sign * remainder.signed if remainder is not None else Fraction(0)
    if work != 0:
        terms.append(SignedTerm(1 if work > 0 else -1, abs(work)))
    rep = Representation(target=x, terms=tuple(terms))
    assert rep.signed_sum() == x
    return rep, traces


def _split_escalating(y: Fraction, cfg: DecomposeConfig, seed: int, traces: list[SplitTrace]):
    bound = cfg.bound
    failures: list[SplitTrace] = []
    for _ in range(cfg.max_escalations + 1):
        try:
            return split(y, cfg, seed=seed, bound=bound)
        except SplitError as err:
            failures.append(err.trace)
            bound += cfg.escalation_step
    raise DecomposeError(
        f"split of {y} failed up to bound {bound - cfg.escalation_step}", traces + failures
    )


@dataclass(frozen=True)
class VerificationReport:
    """From-scratch re-check of a representation."""

    n_terms: int
    total_cost: int
    cost_over_log: float


def verify(rep: Representation) -> VerificationReport:
    """Recompute the exact sum and every term cost; raise on any mismatch."""
    total = Fraction(0)
    total_cost = 0
    for t in rep.terms:
        if t.sign not in (1, -1):
            raise VerificationError(f"bad sign {t.sign}")
        if not 0 < t.value < 1:
            raise VerificationError(f"term {t.value} outside (0, 1)")
        total += t.sign * t.value
        total_cost += cost(t.value)
    if total != rep.target:
        raise VerificationError(f"sum mismatch: terms give {total}, target is {rep.target}")
    den = rep.target.denominator
    ratio = total_cost / math.log(den) if den > 1 else 0.0
    return VerificationReport(len(rep.terms), total_cost, ratio)


def min_cost_oracle(
    x: Fraction, max_terms: int, den_bound: int
) -> tuple[int, Representation] | None:
    """Cheapest signed representation from small-denominator fractions.

    Exhaustive search over at most max_terms signed terms, each a reduced
    fraction in (0, 1) with denominator <= den_bound.  Returns (cost, witness)
    or None when the bounded family contains no representation of x.  This
    certifies an upper bound within the family only; it says nothing about
    representations using larger denominators.  Guard rails: max_terms <= 3,
    den_bound <= 200.
    """
    if not 1 <= max_terms <= 3:
        raise ValueError(f"max_terms must be 1..3, got {max_terms}")
    if not 2 <= den_bound <= 200:
        raise ValueError(f"den_bound must be 2..200, got {den_bound}")
    if not 0 < x < 1:
        raise ValueError(f"target must lie in (0, 1), got {x}")

    pool: list[tuple[int, Fraction]] = []
    for q in range(2, den_bound + 1):
        for b in range(1, q):
            if math.gcd(b, q) == 1:
                f = Fraction(b, q)
                pool.append((cost(f), f))
    pool.sort(key=lambda cf: (cf[0], cf[1]))
    cost_of = {f: c for c, f in pool}

    def usable(f: Fraction) -> bool:
        return 0 < f < 1 and f.denominator <= den_bound

    best: int | None = None
    best_terms: tuple[SignedTerm, ...] | None = None

    def consider(terms: tuple[SignedTerm, ...], total: int) -> None:
        nonlocal best, best_terms
        if best is None or total < best:
            best, best_terms = total, terms

    if usable(x):
        consider((SignedTerm(1, x),), cost_of[x])
    if max_terms >= 2:
        for c1, f1 in pool:
            if best is not None and c1 + 2 >= best:
                break
            for s1 in (1, -1):
                residual = x - s1 * f1
                if residual != 0 and usable(abs(residual)):
                    total = c1 + cost_of[abs(residual)]
                    s2 = 1 if residual > 0 else -1
                    consider((SignedTerm(s1, f1), SignedTerm(s2, abs(residual))), total)
    if max_terms >= 3:
        for c1, f1 in pool:
            if best is not None and c1 + 4 >= best:
                break
            for c2, f2 in pool:
                if best is not None and c1 + c2 + 2 >= best:
                    break
                for s1 in (1, -1):
                    for s2 in (1, -1):
                        residual = x - s1 * f1 - s2 * f2
                        if residual != 0 and usable(abs(residual)):
                            total = c1 + c2 + cost_of[abs(residual)]
                            s3 = 1 if residual > 0 else -1
                            consider(
                                (
                                    SignedTerm(s1, f1),
                                    SignedTerm(s2, f2),
                                    SignedTerm(s3, abs(residual)),
                                ),
                                total,
                            )
    if best is None or best_terms is None:
        return None
    return best, Representation(target=x, terms=best_terms)
