"""Bounded-partial-quotient rationals: membership, enumeration, witness search.

The set of interest is the rationals in (0, 1) whose canonical partial
quotients are all at most a bound A.  This module decides membership,
enumerates members by denominator (a pruned depth-first search over the
continuant recursion), enumerates the generator semigroup by matrix norm,
finds the smallest admissible numerator in an arithmetic progression, and
scans denominator ranges for the exceptional q that admit no numerator at
all.  Scans are exhaustive: a q is reported exceptional only after its whole
search space has been covered, never on a budget cutoff.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import get_context

from .cf_core import (
    IDENTITY,
    ContinuantMatrix,
    _max_quotient_exceeds,
    _quotients,
)
from .fitting import fit_exponent


def _tail_variant_within(quotients, bound) -> bool:
    # The same value also has the non-canonical form [..., a_n - 1, 1].
    head = max(quotients[:-1], default=1)
    return head <= bound and quotients[-1] - 1 <= bound


def is_member(x: Fraction, bound: int, lenient: bool = False) -> bool:
    """True when every partial quotient of x in (0, 1) is at most bound.

    With lenient=True the tail variant [..., a_n - 1, 1] of the canonical
    expansion is also admitted (the two encodings of the same rational).
    """
    if bound < 1:
        raise ValueError(f"quotient bound must be >= 1, got {bound}")
    if not 0 < x < 1:
        raise ValueError(f"membership is defined on (0, 1), got {x}")
    qs = _quotients(x.numerator, x.denominator)
    if max(qs) <= bound:
        return True
    return lenient and _tail_variant_within(qs, bound)


def enumerate_by_denominator(n_max: int, bound: int) -> dict[int, list[int]]:
    """All strict members b/q with q <= n_max, as {q: sorted numerators}.

    Depth-first search over the continuant recursion q_k = a_k q_{k-1} + q_{k-2}
    with quotients in 1..bound, pruning as soon as the denominator passes
    n_max; only words whose final quotient is >= 2 name canonical expansions.
    Denominators with no members are absent from the map.
    """
    if n_max < 2:
        raise ValueError(f"need n_max >= 2, got {n_max}")
    if bound < 1:
        raise ValueError(f"quotient bound must be >= 1, got {bound}")
    found: dict[int, list[int]] = {}
    # stack entries: (last_quotient, p_prev, p, q_prev, q)
    stack = [(a, 0, 1, 1, a) for a in range(1, min(bound, n_max) + 1)]
    while stack:
        last, pp, p, qp, q = stack.pop()
        if last >= 2:
            found.setdefault(q, []).append(p)
        for a in range(1, bound + 1):
            q2 = a * q + qp
            if q2 > n_max:
                break
            stack.append((a, p, a * p + pp, q, q2))
    for nums in found.values():
        nums.sort()
    return dict(sorted(found.items()))


@dataclass(frozen=True)
class BallElement:
    """A semigroup element paired with its generating word."""

    word: tuple[int, ...]
    matrix: ContinuantMatrix


def enumerate_semigroup_ball(norm_cap: int, bound: int) -> list[BallElement]:
    """Every non-empty product of generators (0 1; 1 a), a <= bound, with norm <= norm_cap.

    Right multiplication never shrinks the max-entry norm, so the depth-first
    walk prunes as soon as the cap is exceeded.  Output is ordered by word
    (pre-order, quotients ascending), so it is deterministic.
    """
    if norm_cap < 1:
        raise ValueError(f"need norm_cap >= 1, got {norm_cap}")
    out: list[BallElement] = []

    def walk(word: list[int], m: ContinuantMatrix) -> None:
        for a in range(1, bound + 1):
            m2 = m.times_generator(a)
            if m2.norm() > norm_cap:
                break
            word.append(a)
            out.append(BallElement(tuple(word), m2))
            walk(word, m2)
            word.pop()

    walk([], IDENTITY)
    return out


@dataclass(frozen=True)
class OracleQuery:
    """Search problem: a numerator for denominator q, quotients <= bound, b = beta mod d."""

    q: int
    bound: int
    d: int = 1
    beta: int = 0

    def __post_init__(self) -> None:
        if self.q < 1:
            raise ValueError(f"denominator must be >= 1, got {self.q}")
        if self.bound < 1:
            raise ValueError(f"quotient bound must be >= 1, got {self.bound}")
        if self.d < 1:
            raise ValueError(f"modulus must be >= 1, got {self.d}")
        if self.d > 1 and math.gcd(self.beta, self.d) != 1:
            raise ValueError(f"residue {self.beta} shares a factor with modulus {self.d}")


@dataclass(frozen=True)
class OracleResult:
    """Outcome of a witness search.

    exhausted=True means the whole search space was covered, so witness=None
    is a proof of non-existence; exhausted=False means the budget ran out and
    the answer is unknown.
    """

    witness: int | None
    candidates_scanned: int
    method: str
    exhausted: bool


# Crude growth exponents for the member count up to Q (count ~ Q**(2*delta)).
# Reporting/prediction grade only; never value-bearing.
_DELTA = {1: 0.05, 2: 0.5313, 3: 0.7056, 4: 0.7889, 5: 0.8368, 6: 0.8676}


def _delta(bound: int) -> float:
    return _DELTA.get(bound, 1.0 - 6.0 / (math.pi**2 * bound))


def _member_numerators(den: int, bound: int, lenient: bool) -> list[int]:
    # All numerators b with b/den in the bounded set, by full DFS up to den.
    # Lenient admits words ending in 1 (the tail variants).
    hits: set[int] = set()
    stack = [(a, 0, 1, 1, a) for a in range(1, min(bound, den) + 1)]
    while stack:
        last, pp, p, qp, q = stack.pop()
        if q == den and q > p and (lenient or last >= 2):
            hits.add(p)
        for a in range(1, bound + 1):
            q2 = a * q + qp
            if q2 > den:
                break
            stack.append((a, p, a * p + pp, q, q2))
    return sorted(hits)


def find_witness(
    query: OracleQuery,
    scope: int | None = None,
    budget: int | None = None,
    method: str = "auto",
    lenient: bool = False,
) -> OracleResult:
    """Smallest admissible numerator for the query, or its proven absence.

    The sought fraction is b/scope with scope >= query.q (scope defaults to
    query.q); b must satisfy gcd(b, scope) = 1, b = beta (mod d), and strict
    (or lenient) membership at the quotient bound.  Two strategies return the
    identical smallest witness: a scan of the arithmetic progression inside
    [1, scope), and a full depth-first enumeration of members at this exact
    denominator.  "auto" picks whichever predicts less work; a budget forces
    the progression scan, since only that strategy can stop midway.
    """
    big = query.q if scope is None else scope
    if big < query.q:
        raise ValueError(f"scope {big} below target denominator {query.q}")
    d, beta, bound = query.d, query.beta, query.bound
    start = beta % d or d
    if method == "auto":
        length = (big - 1 - start) // d + 1 if start < big else 0
        use_dfs = budget is None and big ** (2 * _delta(bound)) < length
        method = "dfs" if use_dfs else "progression"
    if method == "progression":
        scanned = 0
        for b in range(start, big, d):
            if budget is not None and scanned >= budget:
                return OracleResult(None, scanned, "progression", False)
            scanned += 1
            if math.gcd(b, big) != 1:
                continue
            if lenient:
                qs = _quotients(b, big)
                if max(qs) <= bound or _tail_variant_within(qs, bound):
                    return OracleResult(b, scanned, "progression", True)
            elif not _max_quotient_exceeds(b, big, bound):
                return OracleResult(b, scanned, "progression", True)
        return OracleResult(None, scanned, "progression", True)
    if method == "dfs":
        if budget is not None:
            raise ValueError("budgets apply only to progression scans")
        members = _member_numerators(big, bound, lenient)
        hits = [b for b in members if b % d == beta % d]
        return OracleResult(min(hits) if hits else None, len(members), "dfs", True)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class ExceptionalSetReport:
    """Denominators in [1, n_max] that admit no witness, plus scan bookkeeping."""

    n_max: int
    bound: int
    congruence: tuple[int, int] | None
    members: tuple[int, ...]
    density_exponent: float | None
    scan_counts: dict[int, int]


def _scan_block(args) -> list[tuple[int, int | None, int]]:
    q_lo, q_hi, bound, d, beta, lenient = args
    rows = []
    for q in range(q_lo, q_hi):
        res = find_witness(OracleQuery(q=q, bound=bound, d=d, beta=beta), lenient=lenient)
        rows.append((q, res.witness, res.candidates_scanned))
    return rows


def _density_checkpoints(n_max: int, samples: int = 12) -> list[int]:
    pts = {n_max}
    for i in range(1, samples):
        pts.add(max(2, round(n_max ** (i / samples))))
    return sorted(pts)


def scan_exceptional(
    n_max: int,
    bound: int,
    congruence: tuple[int, int] | None = None,
    workers: int = 1,
    lenient: bool = False,
) -> ExceptionalSetReport:
    """Exhaustively find every q <= n_max with no admissible numerator.

    q = 1 is vacuous (no fraction lies in (0, 1)) and is never reported; the
    scan covers 2..n_max.  The density exponent is the fitted slope of
    log-count against log-n over geometric checkpoints -- reporting only.
    Sharding across workers is by contiguous blocks merged in order, so the
    result is identical for any worker count.
    """
    if n_max < 2:
        raise ValueError(f"need n_max >= 2, got {n_max}")
    d, beta = congruence if congruence is not None else (1, 0)
    if d < 1 or (d > 1 and math.gcd(beta, d) != 1):
        raise ValueError(f"bad congruence {congruence}")
    blocks = _split_range(2, n_max + 1, workers)
    args = [(lo, hi, bound, d, beta, lenient) for lo, hi in blocks]
    if workers > 1 and len(args) > 1:
        with get_context("fork").Pool(workers) as pool:
            parts = pool.map(_scan_block, args)
    else:
        parts = [_scan_block(a) for a in args]
    rows = [row for part in parts for row in part]
    members = tuple(q for q, witness, _ in rows if witness is None)
    points = [(n, bisect_right(members, n)) for n in _density_checkpoints(n_max)]
    return ExceptionalSetReport(
        n_max=n_max,
        bound=bound,
        congruence=congruence,
        members=members,
        density_exponent=fit_exponent(points),
        scan_counts={q: scanned for q, _, scanned in rows},
    )


def _split_range(lo: int, hi: int, workers: int) -> list[tuple[int, int]]:
    # Contiguous blocks, several per worker so uneven q-costs balance out.
    span = hi - lo
    if span <= 0:
        return []
    pieces = max(1, min(span, workers * 8 if workers > 1 else 1))
    step = -(-span // pieces)
    return [(b, min(b + step, hi)) for b in range(lo, hi, step)]
