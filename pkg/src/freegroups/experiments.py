"""Reproducible Monte Carlo and exact-ratio experiments.

Every statistical law in scope has a registry entry: frequency or mean
estimates per sphere (fixed n), seeded per trial by hashing (master
seed, experiment, n, trial index) so serial and parallel runs agree.
Reports go to CSV (fixed schema) or JSON; when written to a file, an
accompanying figure is rendered next to the delimited output.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import random
import time
from dataclasses import dataclass, field

from .partial_injections import (
    CountCache,
    count_gcd_not_one,
    uniform_partial_injection,
    uniform_permutation,
)
from .properties import (
    PureUpTo,
    avoids_generator_conjugates,
    hnc_report,
    intersection,
    is_malnormal,
    normal_closure_trivial_sufficient,
    purity_status,
)
from .samplers import GenericityParams, WordTuple, in_Y, sample_graph_subgroup, sample_word_tuple
from .stallings import fold, rank

CSV_COLUMNS = [
    "experiment",
    "r",
    "k",
    "n",
    "trials",
    "estimate",
    "stderr",
    "ci_lo",
    "ci_hi",
    "reference",
    "exact",
    "master_seed",
]

RATIO_COLUMNS = ["n", "K/I*sqrt(n)/e", "L/I*e", "J/I*sqrt(n)"]

_Z = 1.96  # two-sided 95%


def derive_rng(master_seed: int, name: str, n: int, trial: int) -> random.Random:
    """Independent source per (experiment, sphere, trial); replayable anywhere."""
    digest = hashlib.sha256(f"{master_seed}:{name}:{n}:{trial}".encode()).digest()
    return random.Random(int.from_bytes(digest, "big"))


@dataclass(frozen=True)
class RegistryEntry:
    name: str
    kind: str  # "frequency" or "mean"
    word_based: bool
    trial: object  # (spec, n, cache, rng) -> (value, in_y or None)
    reference: object = None  # (spec, n) -> float
    exact: object = None  # (spec, n, cache) -> float


def _trial_no_big_cycle(spec, n, cache, rng):
    f = uniform_partial_injection(n, cache, rng)
    return float(f.statistics()["max_cycle_length"] <= 1), None


def _trial_no_fixpoint(spec, n, cache, rng):
    f = uniform_partial_injection(n, cache, rng)
    return float(not f.statistics()["has_fixpoint"]), None


def _trial_avoid_generators(spec, n, cache, rng):
    g = sample_graph_subgroup(spec.r, n, cache, rng)
    return float(avoids_generator_conjugates(g)), None


def _trial_seq_count(spec, n, cache, rng):
    f = uniform_partial_injection(n, cache, rng)
    return float(f.statistics()["num_sequences"]), None


def _trial_rank_mean(spec, n, cache, rng):
    g = sample_graph_subgroup(spec.r, n, cache, rng)
    return float(rank(g)), None


def _trial_perm_gcd(spec, n, cache, rng):
    p = uniform_permutation(n, rng)
    g = p.cycle_length_gcd()
    return float(g is not None and g > 1), None


def _trial_inj_gcd_trivial(spec, n, cache, rng):
    f = uniform_partial_injection(n, cache, rng)
    return float(f.cycle_length_gcd() == 1), None


def _trial_trivial_presentation(spec, n, cache, rng):
    g = sample_graph_subgroup(spec.r, n, cache, rng)
    return float(normal_closure_trivial_sufficient(g).verdict == "ProvablyTrivial"), None


def _trial_graph_malnormal(spec, n, cache, rng):
    g = sample_graph_subgroup(spec.r, n, cache, rng)
    return float(is_malnormal(g, witness=False).malnormal), None


def _trial_graph_pure(spec, n, cache, rng):
    g = sample_graph_subgroup(spec.r, n, cache, rng)
    return float(isinstance(purity_status(g, spec.d_max), PureUpTo)), None


def _trial_word_rank_k(spec, n, cache, rng):
    t = sample_word_tuple(spec.r, spec.k, n, rng)
    return float(rank(t.graph()) == spec.k), in_Y(t, spec.params)


def _trial_word_malnormal(spec, n, cache, rng):
    t = sample_word_tuple(spec.r, spec.k, n, rng)
    return float(is_malnormal(t.graph(), witness=False).malnormal), in_Y(t, spec.params)


def _trial_word_free_product(spec, n, cache, rng):
    t1 = sample_word_tuple(spec.r, spec.k, n, rng)
    t2 = sample_word_tuple(spec.r, spec.k, n, rng)
    g1 = t1.graph()
    g2 = t2.graph()
    ok = rank(intersection(g1, g2)) == 0 and rank(fold(t1.words + t2.words, spec.r)) == 2 * spec.k
    joint = WordTuple(t1.words + t2.words, spec.r, 2 * spec.k, n)
    return float(ok), in_Y(joint, spec.params)


def _trial_shnc_pairs(spec, n, cache, rng):
    g1 = sample_graph_subgroup(spec.r, n, cache, rng)
    g2 = sample_graph_subgroup(spec.r, n, cache, rng)
    report = hnc_report(g1, g2)
    if not (report.shnc_ok and report.hnc_ok):
        raise AssertionError(f"HNC/SHNC violation observed: {report}")
    return float(report.chi_delta2 == 0), None


def _exact_no_big_cycle(spec, n, cache):
    return cache.value("K", n) / cache.value("I", n)


def _exact_no_fixpoint(spec, n, cache):
    return cache.value("L", n) / cache.value("I", n)


def _exact_seq_count(spec, n, cache):
    table = cache.table("I", n)
    return float(n - n * n * table[n - 1] / table[n]) if n else 0.0


def _exact_perm_gcd(spec, n, cache):
    return count_gcd_not_one(n) / cache.factorials(n)[n]


def _exact_inj_gcd_trivial(spec, n, cache):
    I = cache.table("I", n)
    J = cache.table("J", n)
    bad = sum(math.comb(n, k) * count_gcd_not_one(k) * J[n - k] for k in range(2, n + 1))
    return (I[n] - J[n] - bad) / I[n]


REGISTRY = {
    e.name: e
    for e in [
        RegistryEntry(
            "no_big_cycle",
            "frequency",
            False,
            _trial_no_big_cycle,
            reference=lambda spec, n: math.e / math.sqrt(n),
            exact=_exact_no_big_cycle,
        ),
        RegistryEntry(
            "no_fixpoint",
            "frequency",
            False,
            _trial_no_fixpoint,
            reference=lambda spec, n: 1 / math.e,
            exact=_exact_no_fixpoint,
        ),
        RegistryEntry(
            "avoid_generators",
            "frequency",
            False,
            _trial_avoid_generators,
            reference=lambda spec, n: math.exp(-spec.r),
        ),
        RegistryEntry(
            "seq_count",
            "mean",
            False,
            _trial_seq_count,
            reference=lambda spec, n: math.sqrt(n),
            exact=_exact_seq_count,
        ),
        RegistryEntry(
            "rank_mean",
            "mean",
            False,
            _trial_rank_mean,
            reference=lambda spec, n: (spec.r - 1) * n - spec.r * math.sqrt(n) + 1,
        ),
        RegistryEntry(
            "perm_gcd",
            "frequency",
            False,
            _trial_perm_gcd,
            reference=lambda spec, n: 2 / math.sqrt(n) + 2 * n ** (-2 / 3) * math.log(n, 3),
            exact=_exact_perm_gcd,
        ),
        RegistryEntry(
            "inj_gcd_trivial",
            "frequency",
            False,
            _trial_inj_gcd_trivial,
            reference=lambda spec, n: 1.0,
            exact=_exact_inj_gcd_trivial,
        ),
        RegistryEntry(
            "trivial_presentation",
            "frequency",
            False,
            _trial_trivial_presentation,
            reference=lambda spec, n: 1.0,
        ),
        RegistryEntry(
            "graph_malnormal",
            "frequency",
            False,
            _trial_graph_malnormal,
            reference=lambda spec, n: 0.0,
        ),
        RegistryEntry(
            "graph_pure",
            "frequency",
            False,
            _trial_graph_pure,
            reference=lambda spec, n: 0.0,
        ),
        RegistryEntry(
            "word_rank_k",
            "frequency",
            True,
            _trial_word_rank_k,
            reference=lambda spec, n: 1.0,
        ),
        RegistryEntry(
            "word_malnormal",
            "frequency",
            True,
            _trial_word_malnormal,
            reference=lambda spec, n: 1.0,
        ),
        RegistryEntry(
            "word_free_product",
            "frequency",
            True,
            _trial_word_free_product,
            reference=lambda spec, n: 1.0,
        ),
        RegistryEntry(
            "shnc_pairs",
            "frequency",
            False,
            _trial_shnc_pairs,
        ),
    ]
}


@dataclass(frozen=True)
class ExperimentSpec:
    """A registry experiment instance; k is set for word-based runs only."""

    name: str
    r: int = 2
    ns: tuple = (100,)
    k: int | None = None
    trials: int = 1000
    master_seed: int = 0
    params: GenericityParams = field(default_factory=GenericityParams)
    d_max: int = 2

    def __post_init__(self):
        if self.name not in REGISTRY:
            raise ValueError(f"unknown experiment {self.name!r}; known: {', '.join(sorted(REGISTRY))}")
        object.__setattr__(self, "ns", tuple(self.ns))
        if not self.ns:
            raise ValueError("at least one n is required")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if REGISTRY[self.name].word_based:
            if self.k is None or self.k < 1:
                raise ValueError(f"experiment {self.name} is word-based and needs k >= 1")
        elif self.k is not None:
            raise ValueError(f"experiment {self.name} takes no k")


@dataclass
class ExperimentRow:
    n: int
    trials: int
    estimate: float
    stderr: float
    ci_lo: float
    ci_hi: float
    reference: float | None
    exact: float | None
    wall_time: float
    in_y_trials: int | None = None
    estimate_given_in_y: float | None = None


@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    rows: list


def _wilson(hits: int, trials: int) -> tuple:
    p = hits / trials
    z2 = _Z * _Z
    denom = 1 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = _Z * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials)) / denom
    # at the boundaries the interval endpoint is exactly 0 or 1; avoid fp residue
    lo = 0.0 if hits == 0 else max(0.0, center - half)
    hi = 1.0 if hits == trials else min(1.0, center + half)
    return lo, hi


def run_experiment(spec: ExperimentSpec, cache: CountCache | None = None) -> ExperimentReport:
    """One report row per n; deterministic replay under the same master seed."""
    entry = REGISTRY[spec.name]
    if cache is None:
        cache = CountCache()
    rows = []
    for n in spec.ns:
        start = time.perf_counter()
        total = 0.0
        sumsq = 0.0
        y_trials = 0
        y_total = 0.0
        for i in range(spec.trials):
            rng = derive_rng(spec.master_seed, spec.name, n, i)
            value, in_y = entry.trial(spec, n, cache, rng)
            total += value
            sumsq += value * value
            if in_y:
                y_trials += 1
                y_total += value
        estimate = total / spec.trials
        if entry.kind == "frequency":
            stderr = math.sqrt(estimate * (1 - estimate) / spec.trials)
            ci_lo, ci_hi = _wilson(int(total), spec.trials)
        else:
            if spec.trials > 1:
                var = max(sumsq - spec.trials * estimate * estimate, 0.0) / (spec.trials - 1)
            else:
                var = 0.0
            stderr = math.sqrt(var / spec.trials)
            ci_lo, ci_hi = estimate - _Z * stderr, estimate + _Z * stderr
        row = ExperimentRow(
            n=n,
            trials=spec.trials,
            estimate=estimate,
            stderr=stderr,
            ci_lo=ci_lo,
            ci_hi=ci_hi,
            reference=entry.reference(spec, n) if entry.reference else None,
            exact=entry.exact(spec, n, cache) if entry.exact else None,
            wall_time=time.perf_counter() - start,
        )
        if entry.word_based:
            row.in_y_trials = y_trials
            row.estimate_given_in_y = y_total / y_trials if y_trials else None
        rows.append(row)
    return ExperimentReport(spec, rows)


def _fmt(x) -> str:
    return "" if x is None else f"{x:.10g}"


def write_csv(report: ExperimentReport, dest) -> None:
    """Fixed-schema CSV; wall_time is deliberately not a column."""
    own = not hasattr(dest, "write")
    stream = open(dest, "w", newline="") if own else dest
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        spec = report.spec
        for row in report.rows:
            writer.writerow(
                [
                    spec.name,
                    spec.r,
                    "" if spec.k is None else spec.k,
                    row.n,
                    row.trials,
                    _fmt(row.estimate),
                    _fmt(row.stderr),
                    _fmt(row.ci_lo),
                    _fmt(row.ci_hi),
                    _fmt(row.reference),
                    _fmt(row.exact),
                    spec.master_seed,
                ]
            )
    finally:
        if own:
            stream.close()


def report_as_dict(report: ExperimentReport) -> dict:
    spec = report.spec
    rows = []
    for row in report.rows:
        item = {
            "n": row.n,
            "trials": row.trials,
            "estimate": row.estimate,
            "stderr": row.stderr,
            "ci_lo": row.ci_lo,
            "ci_hi": row.ci_hi,
            "reference": row.reference,
            "exact": row.exact,
            "wall_time": row.wall_time,
        }
        if REGISTRY[spec.name].word_based:
            item["in_y_trials"] = row.in_y_trials
            item["estimate_given_in_y"] = row.estimate_given_in_y
        rows.append(item)
    return {
        "experiment": spec.name,
        "r": spec.r,
        "k": spec.k,
        "trials": spec.trials,
        "master_seed": spec.master_seed,
        "rows": rows,
    }


def write_json(report: ExperimentReport, dest) -> None:
    own = not hasattr(dest, "write")
    stream = open(dest, "w") if own else dest
    try:
        json.dump(report_as_dict(report), stream, sort_keys=True, separators=(",", ":"))
        stream.write("\n")
    finally:
        if own:
            stream.close()


def exact_ratio_table(n_max: int, cache: CountCache | None = None) -> list:
    """Scaled exact count ratios for n = 1..n_max; no sampling noise.

    K/I*sqrt(n)/e and L/I*e both tend to 1, J/I*sqrt(n) stays bounded;
    the columns make the three laws readable at a glance.
    """
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    if cache is None:
        cache = CountCache()
    I = cache.table("I", n_max)
    J = cache.table("J", n_max)
    K = cache.table("K", n_max)
    L = cache.table("L", n_max)
    rows = []
    for n in range(1, n_max + 1):
        root = math.sqrt(n)
        rows.append(
            {
                "n": n,
                "K/I*sqrt(n)/e": K[n] / I[n] * root / math.e,
                "L/I*e": L[n] / I[n] * math.e,
                "J/I*sqrt(n)": J[n] / I[n] * root,
            }
        )
    return rows


def write_ratio_csv(rows: list, dest) -> None:
    own = not hasattr(dest, "write")
    stream = open(dest, "w", newline="") if own else dest
    try:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(RATIO_COLUMNS)
        for row in rows:
            writer.writerow([row["n"]] + [f"{row[c]:.10f}" for c in RATIO_COLUMNS[1:]])
    finally:
        if own:
            stream.close()


def render_report_figure(report: ExperimentReport, path) -> None:
    """Estimate with confidence band vs n, against reference and exact curves."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = report.rows
    ns = [row.n for row in rows]
    est = [row.estimate for row in rows]
    err_lo = [row.estimate - row.ci_lo for row in rows]
    err_hi = [row.ci_hi - row.estimate for row in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    ax.errorbar(ns, est, yerr=[err_lo, err_hi], fmt="o-", capsize=3, label="estimate")
    if all(row.reference is not None for row in rows):
        ax.plot(ns, [row.reference for row in rows], "--", label="reference")
    if all(row.exact is not None for row in rows):
        ax.plot(ns, [row.exact for row in rows], ":", label="exact")
    ax.set_xlabel("n")
    ax.set_ylabel("mean" if REGISTRY[report.spec.name].kind == "mean" else "frequency")
    ax.set_title(report.spec.name)
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_ratio_figure(rows: list, path) -> None:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    ns = [row["n"] for row in rows]
    fig, ax = plt.subplots(figsize=(6.4, 4.2))
    for column in RATIO_COLUMNS[1:]:
        ax.plot(ns, [row[column] for row in rows], label=column)
    ax.set_xlabel("n")
    ax.set_ylabel("scaled ratio")
    ax.grid(True, alpha=0.3)
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
