"""Command-line drivers and CSV reporting.

Subcommands: expand (print one expansion), zaremba (exceptional-set scan),
decompose (one signed representation as JSON), cost-survey (decompose a
denominator range and report the running cost constant).  Flags may also be
supplied through a plain key=value config file via --config; explicit flags
win.  Exit codes: 0 success, 1 usage error, 2 computation failure.
"""

from __future__ import annotations

import argparse
import json
import math
import random
import sys
from dataclasses import dataclass
from fractions import Fraction
from multiprocessing import get_context

from .cf_core import continuant_product, cost, expand
from .decompose import (
    DecomposeConfig,
    DecomposeError,
    SplitTrace,
    VerificationError,
    decompose,
    verify,
)
from .fitting import fit_exponent
from .zaremba import ExceptionalSetReport, scan_exceptional

DESK_SCALE_N_CAP = 200_000
DESK_SCALE_Q_CAP = 20_000
FULL_ENUMERATION_CAP = 2_000
DEFAULT_SAMPLE = 20


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad flags; the contract here is 1 for usage errors.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def parse_fraction(text: str) -> Fraction:
    parts = text.split("/")
    if len(parts) != 2:
        raise UsageError(f"expected num/den, got {text!r}")
    try:
        num, den = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"expected integers in num/den, got {text!r}") from None
    if den == 0:
        raise UsageError("zero denominator")
    return Fraction(num, den)


def parse_congruence(text: str) -> tuple[int, int]:
    parts = text.split(":")
    if len(parts) != 2:
        raise UsageError(f"expected d:beta, got {text!r}")
    try:
        d, beta = int(parts[0]), int(parts[1])
    except ValueError:
        raise UsageError(f"expected integers in d:beta, got {text!r}") from None
    if d < 1 or (d > 1 and math.gcd(beta, d) != 1):
        raise UsageError(f"residue {beta} must be coprime to modulus {d}")
    return d, beta


_CONFIG_TYPES = {
    "N": int,
    "A": int,
    "delta": Fraction,
    "r": int,
    "q0": int,
    "seed": int,
    "budget": int,
    "workers": int,
    "sample": int,
    "q_min": int,
    "q_max": int,
    "out": str,
    "congruence": str,
}


def load_config_file(path: str) -> dict:
    values = {}
    with open(path) as handle:
        for raw in handle:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"bad config line {line!r} (expected key=value)")
            key, _, val = line.partition("=")
            key, val = key.strip(), val.strip()
            if key not in _CONFIG_TYPES:
                raise UsageError(f"unknown config key {key!r}")
            values[key] = _CONFIG_TYPES[key](val)
    return values


def build_parser() -> _Parser:
    parser = _Parser(prog="pqrep")
    sub = parser.add_subparsers(dest="command", required=True)

    pex = sub.add_parser("expand", help="print the canonical expansion of b/q")
    pex.add_argument("fraction")

    pz = sub.add_parser("zaremba", help="scan denominators for exceptional q")
    pz.add_argument("--config")
    pz.add_argument("--N", type=int, default=None)
    pz.add_argument("--A", type=int, default=None)
    pz.add_argument("--congruence", default=None, help="restrict witnesses to b=beta mod d, as d:beta")
    pz.add_argument("--workers", type=int, default=None)
    pz.add_argument("--seed", type=int, default=None)
    pz.add_argument("--out", default=None)
    pz.add_argument("--lenient-tail", action="store_true", dest="lenient_tail")

    pd = sub.add_parser("decompose", help="signed bounded-quotient representation of b/q")
    pd.add_argument("fraction")
    pd.add_argument("--config")
    pd.add_argument("--A", type=int, default=None)
    pd.add_argument("--delta", default=None)
    pd.add_argument("--r", type=int, default=None)
    pd.add_argument("--q0", type=int, default=None)
    pd.add_argument("--budget", type=int, default=None)
    pd.add_argument("--seed", type=int, default=None)
    pd.add_argument("--trace", action="store_true")

    ps = sub.add_parser("cost-survey", help="decompose a denominator range, emit per-row CSV")
    ps.add_argument("--config")
    ps.add_argument("--q-min", type=int, default=None, dest="q_min")
    ps.add_argument("--q-max", type=int, default=None, dest="q_max")
    ps.add_argument("--sample", type=int, default=None, help="numerators per q; omit for full enumeration below %d" % FULL_ENUMERATION_CAP)
    ps.add_argument("--A", type=int, default=None)
    ps.add_argument("--delta", default=None)
    ps.add_argument("--r", type=int, default=None)
    ps.add_argument("--q0", type=int, default=None)
    ps.add_argument("--budget", type=int, default=None)
    ps.add_argument("--seed", type=int, default=None)
    ps.add_argument("--workers", type=int, default=None)
    ps.add_argument("--out", default=None)
    return parser


def _setting(args, file_cfg: dict, key: str, default):
    flag = getattr(args, key, None)
    if flag is not None and flag is not False:
        return flag
    if key in file_cfg:
        return file_cfg[key]
    return default


def _decompose_config(args, file_cfg: dict) -> DecomposeConfig:
    delta = _setting(args, file_cfg, "delta", Fraction(1, 4))
    if isinstance(delta, str):
        delta = Fraction(delta)
    return DecomposeConfig(
        bound=_setting(args, file_cfg, "A", 8),
        delta=delta,
        r=_setting(args, file_cfg, "r", 4),
        q0=_setting(args, file_cfg, "q0", 100),
        budget=_setting(args, file_cfg, "budget", None),
    )


# ---------------------------------------------------------------------------
# expand


def cmd_expand(args) -> int:
    x = parse_fraction(args.fraction)
    if not 0 <= x < 1:
        raise UsageError(f"expand needs a fraction in [0, 1), got {x}")
    quotients = expand(x)
    body = ",".join(str(a) for a in quotients)
    log2q = math.log2(x.denominator)
    print(f"[{body}] cost={sum(quotients)} log2(q)={log2q:.4f}")
    if quotients:
        m = continuant_product(quotients)
        print(f"continuant=[[{m.g11},{m.g12}],[{m.g21},{m.g22}]] det={m.det()}")
    return 0


# ---------------------------------------------------------------------------
# zaremba


def zaremba_csv(report: ExceptionalSetReport, seed: int) -> str:
    d, beta = report.congruence if report.congruence else (1, 0)
    lines = [
        f"# seed={seed} N={report.n_max} A={report.bound} d={d} beta={beta}",
        "q,A,d,beta,is_exceptional,candidates_scanned",
    ]
    exceptional = set(report.members)
    for q in sorted(report.scan_counts):
        flag = 1 if q in exceptional else 0
        lines.append(f"{q},{report.bound},{d},{beta},{flag},{report.scan_counts[q]}")
    return "\n".join(lines) + "\n"


def zaremba_summary_csv(report: ExceptionalSetReport, seed: int) -> str:
    exponent = "" if report.density_exponent is None else f"{report.density_exponent:.6f}"
    return (
        f"# seed={seed}\n"
        "N,A,count,density_exponent\n"
        f"{report.n_max},{report.bound},{len(report.members)},{exponent}\n"
    )


def cmd_zaremba(args) -> int:
    file_cfg = load_config_file(args.config) if args.config else {}
    n_max = _setting(args, file_cfg, "N", None)
    bound = _setting(args, file_cfg, "A", 5)
    if n_max is None:
        raise UsageError("zaremba needs --N")
    if n_max > DESK_SCALE_N_CAP:
        raise UsageError(f"N={n_max} exceeds the desk-scale cap {DESK_SCALE_N_CAP}")
    congruence = _setting(args, file_cfg, "congruence", None)
    if isinstance(congruence, str):
        congruence = parse_congruence(congruence)
    workers = _setting(args, file_cfg, "workers", 1)
    seed = _setting(args, file_cfg, "seed", 0)
    report = scan_exceptional(
        n_max, bound, congruence=congruence, workers=workers, lenient=args.lenient_tail
    )
    per_q = zaremba_csv(report, seed)
    summary = zaremba_summary_csv(report, seed)
    out = _setting(args, file_cfg, "out", None)
    if out:
        with open(out, "w") as handle:
            handle.write(per_q)
        with open(_summary_path(out), "w") as handle:
            handle.write(summary)
        print(f"exceptional={len(report.members)} wrote {out}")
    else:
        sys.stdout.write(per_q)
        sys.stdout.write(summary)
    return 0


def _summary_path(out: str) -> str:
    stem, dot, ext = out.rpartition(".")
    return f"{stem}.summary.{ext}" if dot else f"{out}.summary"


# ---------------------------------------------------------------------------
# decompose


def _trace_payload(trace: SplitTrace) -> dict:
    return {
        "denominator": trace.denominator,
        "primes": list(trace.primes),
        "resamples": trace.resamples,
        "bound_used": trace.bound_used,
        "seed": trace.seed,
        "depth": trace.depth,
        "remainder_den": trace.remainder_den,
        "steps": [
            {
                "support_before": list(s.support_before),
                "modulus": s.modulus,
                "residue": s.residue,
                "witness": s.witness,
                "scanned": s.scanned,
                "method": s.method,
                "support_after": list(s.support_after),
            }
            for s in trace.steps
        ],
    }


def cmd_decompose(args) -> int:
    file_cfg = load_config_file(args.config) if args.config else {}
    x = parse_fraction(args.fraction)
    if not 0 < x < 1:
        raise UsageError(f"decompose needs a fraction in (0, 1), got {x}")
    cfg = _decompose_config(args, file_cfg)
    seed = _setting(args, file_cfg, "seed", 0)
    try:
        rep, traces = decompose(x, cfg, seed=seed)
        report = verify(rep)
    except (DecomposeError, VerificationError) as err:
        print(f"decomposition failed: {err}", file=sys.stderr)
        if isinstance(err, DecomposeError):
            for trace in err.traces:
                print(json.dumps(_trace_payload(trace)), file=sys.stderr)
        return 2
    payload = {
        "target": f"{x.numerator}/{x.denominator}",
        "terms": [
            {
                "sign": t.sign,
                "num": t.value.numerator,
                "den": t.value.denominator,
                "expansion": list(expand(t.value)),
                "cost": cost(t.value),
            }
            for t in rep.terms
        ],
        "total_cost": report.total_cost,
        "cost_over_log_q": round(report.cost_over_log, 6),
    }
    if args.trace:
        payload["traces"] = [_trace_payload(t) for t in traces]
    print(json.dumps(payload))
    return 0


# ---------------------------------------------------------------------------
# cost survey


@dataclass
class SurveyOutcome:
    csv_text: str
    rows: int
    failures: int
    c_cap: float
    violations: list[str]


def _survey_numerators(q: int, sample: int | None, seed: int) -> list[int]:
    if q < 2:
        return []
    if sample is None:
        if q <= FULL_ENUMERATION_CAP:
            return [b for b in range(1, q) if math.gcd(b, q) == 1]
        sample = DEFAULT_SAMPLE
    rng = random.Random(f"{seed}:{q}")
    if q <= 4 * sample:
        every = [b for b in range(1, q) if math.gcd(b, q) == 1]
        if len(every) <= sample:
            return every
        return sorted(rng.sample(every, sample))
    chosen: set[int] = set()
    while len(chosen) < sample:
        b = rng.randrange(1, q)
        if math.gcd(b, q) == 1:
            chosen.add(b)
    return sorted(chosen)


def _depth_cap(q: int) -> int:
    # Splits square-root the denominator, so the chain length is doubly
    # logarithmic; +2 absorbs the base case and rounding.  Needs q >= 2.
    return math.ceil(math.log2(math.log2(q))) + 2


def _survey_block(task) -> tuple[list[tuple], list[str], int]:
    q_lo, q_hi, cfg, sample, seed = task
    rows: list[tuple] = []
    violations: list[str] = []
    neg_terms = 0
    for q in range(q_lo, q_hi):
        for b in _survey_numerators(q, sample, seed):
            x = Fraction(b, q)
            try:
                rep, traces = decompose(x, cfg, seed=seed)
                report = verify(rep)
            except (DecomposeError, VerificationError) as err:
                rows.append((b, q, 0, 0, 0.0, cfg.bound, 0, "fail"))
                violations.append(f"{b}/{q}: {err}")
                continue
            for trace in traces:
                if trace.remainder_den**2 >= trace.denominator:
                    violations.append(
                        f"{b}/{q}: remainder denominator {trace.remainder_den} "
                        f"not below sqrt({trace.denominator})"
                    )
            if len(traces) > _depth_cap(q):
                violations.append(f"{b}/{q}: depth {len(traces)} over cap {_depth_cap(q)}")
            neg_terms += sum(1 for t in rep.terms if t.sign < 0)
            bound_used = max((t.bound_used for t in traces), default=cfg.bound)
            rows.append(
                (
                    b,
                    q,
                    report.n_terms,
                    report.total_cost,
                    report.cost_over_log,
                    bound_used,
                    len(traces),
                    "ok",
                )
            )
    return rows, violations, neg_terms


def run_cost_survey(
    q_min: int,
    q_max: int,
    cfg: DecomposeConfig,
    seed: int = 0,
    sample: int | None = None,
    workers: int = 1,
) -> SurveyOutcome:
    """Decompose every surveyed b/q in [q_min, q_max] and collect the cost table.

    Rows are ordered by (q, b) and the output is byte-identical for any worker
    count.  Individual failures become rows flagged "fail"; the survey keeps
    going.
    """
    if q_min < 2 or q_max < q_min:
        raise ValueError(f"bad survey range [{q_min}, {q_max}]")
    blocks = _survey_blocks(q_min, q_max, workers)
    tasks = [(lo, hi, cfg, sample, seed) for lo, hi in blocks]
    if workers > 1 and len(tasks) > 1:
        with get_context("fork").Pool(workers) as pool:
            parts = pool.map(_survey_block, tasks)
    else:
        parts = [_survey_block(t) for t in tasks]
    rows = [row for part in parts for row in part[0]]
    rows.sort(key=lambda row: (row[1], row[0]))
    violations = [v for part in parts for v in part[1]]
    neg_terms = sum(part[2] for part in parts)
    failures = sum(1 for row in rows if row[7] == "fail")
    c_cap = max((row[4] for row in rows if row[7] == "ok"), default=0.0)
    lines = [
        f"# seed={seed} q_min={q_min} q_max={q_max} A={cfg.bound} delta={cfg.delta} "
        f"r={cfg.r} q0={cfg.q0} sample={'full' if sample is None else sample}",
        "b,q,terms,total_cost,cost_over_ln_q,max_A_used,depth,status",
    ]
    for b, q, terms, total, ratio, bound_used, depth, status in rows:
        lines.append(f"{b},{q},{terms},{total},{ratio:.6f},{bound_used},{depth},{status}")
    lines.append(f"# C_cap={c_cap:.6f} rows={len(rows)} failures={failures} neg_terms={neg_terms}")
    return SurveyOutcome("\n".join(lines) + "\n", len(rows), failures, c_cap, violations)


def _survey_blocks(q_min: int, q_max: int, workers: int) -> list[tuple[int, int]]:
    span = q_max - q_min + 1
    pieces = max(1, min(span, workers * 8 if workers > 1 else 1))
    step = -(-span // pieces)
    return [(lo, min(lo + step, q_max + 1)) for lo in range(q_min, q_max + 1, step)]


def cmd_cost_survey(args) -> int:
    file_cfg = load_config_file(args.config) if args.config else {}
    q_min = _setting(args, file_cfg, "q_min", 2)
    q_max = _setting(args, file_cfg, "q_max", None)
    if q_max is None:
        raise UsageError("cost-survey needs --q-max")
    if q_max > DESK_SCALE_Q_CAP:
        raise UsageError(f"q_max={q_max} exceeds the desk-scale cap {DESK_SCALE_Q_CAP}")
    cfg = _decompose_config(args, file_cfg)
    seed = _setting(args, file_cfg, "seed", 0)
    sample = _setting(args, file_cfg, "sample", None)
    workers = _setting(args, file_cfg, "workers", 1)
    outcome = run_cost_survey(q_min, q_max, cfg, seed=seed, sample=sample, workers=workers)
    out = _setting(args, file_cfg, "out", None)
    if out:
        with open(out, "w") as handle:
            handle.write(outcome.csv_text)
        print(
            f"C_cap={outcome.c_cap:.6f} rows={outcome.rows} failures={outcome.failures} wrote {out}"
        )
    else:
        sys.stdout.write(outcome.csv_text)
    # failure rows are survey data, flagged in the CSV, not a command failure
    return 0


# ---------------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {
        "expand": cmd_expand,
        "zaremba": cmd_zaremba,
        "decompose": cmd_decompose,
        "cost-survey": cmd_cost_survey,
    }
    try:
        return handlers[args.command](args)
    except UsageError as err:
        print(f"pqrep: error: {err}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as err:
        print(f"pqrep: error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
