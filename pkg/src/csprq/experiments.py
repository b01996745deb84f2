"""Experiment execution: timed query benchmarks and workload-error studies.

A benchmark run draws a fixed stream of query ranges, replays it against
every requested strategy with identical seeds, and reports timing plus page
and operation accounting.  Deterministic results (answers, page counts,
operation counters) go to one report file per strategy; wall-clock timings
go to a separate ``*_timing.tsv`` sidecar so the main reports stay
byte-reproducible for a given configuration and seed.

The workload-error study measures estimator accuracy for one object at the
center of the space: equal-size query ranges sweep across its uncertainty
region so every query overlaps it differently, and estimates at small
sample counts (or coarse polygon resolutions) are compared against a
high-resolution reference.
"""

import concurrent.futures
import hashlib
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .engine import (STRATEGIES, QueryRange, Workspace, build_workspace,
                     precompute_all)
from .geometry import Point
from .probability import (DISTORTED_GAUSSIAN, Pdf, probability_monte_carlo,
                          probability_uniform)
from .regions import Region
from .uncertainty import approximate_circle, intersect_with_query

PDF_NAMES = {"UD": Pdf(), "DG": Pdf(DISTORTED_GAUSSIAN)}


@dataclass(frozen=True)
class ExperimentConfig:
    """One benchmark setting; defaults mirror the standard workload."""

    seed: int
    xi: int = 32
    n_objects: int = 50000
    n_areas: int = 50000
    theta: float = 500.0
    zeta: int = 4
    n1: int = 700
    pdf: str = "UD"
    tau_lo: float = 20.0
    tau_hi: float = 50.0
    strategies: tuple = ("B", "S", "SO", "PSO")
    n_queries: int = 50
    repetitions: int = 10
    space: float = 10000.0
    fanout: int = 50
    page_size: int = 4096
    regular_areas: bool = False
    parallel: bool = False
    name: str = "experiment"

    def __post_init__(self):
        if self.pdf not in PDF_NAMES:
            raise ValueError(f"pdf must be one of {sorted(PDF_NAMES)}")
        unknown = set(self.strategies) - STRATEGIES.keys()
        if unknown:
            raise ValueError(f"unknown strategies: {sorted(unknown)}")


@dataclass
class StrategyReport:
    strategy: str
    n_queries: int
    repetitions: int
    mean_ms: float
    median_ms: float
    pages_read: int
    nodes_visited: int
    records_scanned: int
    counters: dict
    answer_digest: str
    answers: list = field(default_factory=list, repr=False)
    per_query: list = field(default_factory=list, repr=False)
    precompute_seconds: Optional[float] = None


def query_stream(config: ExperimentConfig):
    """The deterministic stream of (query range, per-query seed) pairs."""
    rng = np.random.default_rng(np.random.SeedSequence([config.seed, 7]))
    half = config.theta / 2.0
    out = []
    for q in range(config.n_queries):
        cx = rng.uniform(half, config.space - half)
        cy = rng.uniform(half, config.space - half)
        q_seed = int(np.random.SeedSequence([config.seed, 11, q]).generate_state(1)[0])
        out.append((QueryRange.centered(cx, cy, config.theta), q_seed))
    return out


def build_config_workspace(config: ExperimentConfig, objects, areas) -> Workspace:
    return build_workspace(objects, areas, pdf=PDF_NAMES[config.pdf],
                           xi=config.xi, n1=config.n1,
                           fanout=config.fanout, page_size=config.page_size)


def run_strategy(w: Workspace, strategy: str, stream, repetitions: int = 1,
                 parallel: bool = False) -> StrategyReport:
    """Replay the query stream under one strategy.

    Answers and counters come from the first pass (repetitions only matter
    for timing; results are deterministic).  The parallel mode runs queries
    concurrently for correctness-only sweeps and reports no timings.
    """
    fn = STRATEGIES[strategy]
    precompute_seconds = None
    if strategy == "PSO" and w.precomputed is None:
        precompute_seconds = precompute_all(w).seconds
    answers = []
    per_query = []
    counters: dict = {}
    timings = []
    if parallel:
        with concurrent.futures.ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda qs: fn(w, qs[0], seed=qs[1]), stream))
        for answer, stats, qc in results:
            answers.append(answer)
            per_query.append((stats.pages_read, stats.nodes_visited,
                              stats.records_scanned))
            _accumulate(counters, qc.as_dict())
    else:
        for rep in range(max(repetitions, 1)):
            for qi, (qr, q_seed) in enumerate(stream):
                t0 = time.perf_counter()
                answer, stats, qc = fn(w, qr, seed=q_seed)
                timings.append((time.perf_counter() - t0) * 1e3)
                if rep == 0:
                    answers.append(answer)
                    per_query.append((stats.pages_read, stats.nodes_visited,
                                      stats.records_scanned))
                    _accumulate(counters, qc.as_dict())
    pages = sum(r[0] for r in per_query)
    nodes = sum(r[1] for r in per_query)
    records = sum(r[2] for r in per_query)
    return StrategyReport(
        strategy=strategy, n_queries=len(stream),
        repetitions=max(repetitions, 1),
        mean_ms=statistics.fmean(timings) if timings else float("nan"),
        median_ms=statistics.median(timings) if timings else float("nan"),
        pages_read=pages, nodes_visited=nodes, records_scanned=records,
        counters=counters, answer_digest=_answers_digest(answers),
        answers=answers, per_query=per_query,
        precompute_seconds=precompute_seconds)


def run_experiment(config: ExperimentConfig, objects, areas,
                   out_dir=None) -> dict:
    """Run every configured strategy over the same query stream and
    optionally write the report files."""
    w = build_config_workspace(config, objects, areas)
    stream = query_stream(config)
    reports = {}
    for strategy in config.strategies:
        report = run_strategy(w, strategy, stream,
                              repetitions=config.repetitions,
                              parallel=config.parallel)
        reports[strategy] = report
        if out_dir is not None:
            write_strategy_report(Path(out_dir), config.name, report)
    return reports


def _accumulate(acc: dict, more: dict) -> None:
    for k, v in more.items():
        acc[k] = acc.get(k, 0) + v


def _answers_digest(answers) -> str:
    h = hashlib.sha256()
    for a in answers:
        h.update(repr(a.entries).encode())
    return h.hexdigest()[:16]


def write_strategy_report(out_dir: Path, name: str, report: StrategyReport) -> None:
    """One deterministic result file, one deterministic totals file, and a
    timing sidecar per (experiment, strategy)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / f"{name}_{report.strategy}.tsv", "w") as fh:
        fh.write("query\tanswer_size\tpages_read\tnodes_visited\trecords_scanned\tanswer\n")
        for qi, (answer, row) in enumerate(zip(report.answers, report.per_query)):
            pairs = ";".join(f"{i}:{p:.6f}" for i, p in answer)
            fh.write(f"{qi}\t{len(answer)}\t{row[0]}\t{row[1]}\t{row[2]}\t{pairs}\n")
    counter_keys = sorted(report.counters)
    with open(out_dir / f"{name}_{report.strategy}_totals.tsv", "w") as fh:
        head = ["strategy", "n_queries", "pages_read", "nodes_visited",
                "records_scanned", "answer_digest"] + counter_keys
        fh.write("\t".join(head) + "\n")
        vals = [report.strategy, str(report.n_queries), str(report.pages_read),
                str(report.nodes_visited), str(report.records_scanned),
                report.answer_digest]
        vals += [str(report.counters[k]) for k in counter_keys]
        fh.write("\t".join(vals) + "\n")
    with open(out_dir / f"{name}_{report.strategy}_timing.tsv", "w") as fh:
        fh.write("strategy\trepetitions\tmean_ms\tmedian_ms\tprecompute_s\n")
        pre = "" if report.precompute_seconds is None else f"{report.precompute_seconds:.3f}"
        fh.write(f"{report.strategy}\t{report.repetitions}\t"
                 f"{report.mean_ms:.3f}\t{report.median_ms:.3f}\t{pre}\n")


# ---------------------------------------------------------------------------
# workload error
# ---------------------------------------------------------------------------

@dataclass
class WorkloadErrorReport:
    """Accuracy of one estimator setting against the reference answers."""

    parameter: str
    value: float
    awe: float
    rwe: float
    deltas: np.ndarray = field(repr=False, default=None)
    rwe_excluded: int = 0


def error_query_stream(tau: float, theta: float, n_queries: int = 100,
                       space: float = 10000.0):
    """Equal-size query ranges whose right edge sweeps across the central
    object, so each range intersects the uncertainty region differently."""
    c = space / 2.0
    half = theta / 2.0
    offsets = np.linspace(-1.1 * tau, 1.1 * tau, n_queries)
    return [QueryRange.centered(c - half + d, c, theta) for d in offsets]


def _estimate(u: Region, s, pdf: Pdf, n: Optional[int], seed) -> float:
    if pdf.is_uniform and n is None:
        return probability_uniform(u, s)
    return probability_monte_carlo(u, s, pdf, n1=n, seed=seed)


def measure_workload_error(tau: float, n_prime_list=None, xi_list=None,
                           pdf: str = "DG", xi: int = 32, theta: float = 500.0,
                           n_queries: int = 100, reference_n: int = 10**7,
                           reference_xi: int = 1024, seed: int = 0,
                           space: float = 10000.0) -> list:
    """Workload error of sample-count and polygon-resolution settings.

    For each entry of ``n_prime_list`` the estimator runs at that sample
    count and is compared with a ``reference_n``-sample run at the same
    polygon resolution.  For each entry of ``xi_list`` the polygon
    approximation runs at that edge count and is compared with
    ``reference_xi`` (analytically when the pdf is uniform).  Queries with a
    zero reference are excluded from the relative error but kept in the
    absolute error.
    """
    center = Point(space / 2.0, space / 2.0)
    pdf_t = PDF_NAMES[pdf].for_object(center, tau)
    ranges = error_query_stream(tau, theta, n_queries, space)
    rows = []

    if n_prime_list:
        u = Region(approximate_circle(center, tau, xi))
        clipped = [intersect_with_query(u, qr.rect) for qr in ranges]
        refs = np.array([
            _estimate(u, s, pdf_t, None if pdf_t.is_uniform else reference_n,
                      seed=(seed, 0, qi))
            for qi, s in enumerate(clipped)])
        for k, n_prime in enumerate(n_prime_list, start=1):
            ests = np.array([
                _estimate(u, s, pdf_t, int(n_prime), seed=(seed, k, qi))
                for qi, s in enumerate(clipped)])
            rows.append(_error_row("n_prime", float(n_prime), ests, refs))

    if xi_list:
        u_ref = Region(approximate_circle(center, tau, reference_xi))
        s_ref = [intersect_with_query(u_ref, qr.rect) for qr in ranges]
        refs = np.array([
            _estimate(u_ref, s, pdf_t, None if pdf_t.is_uniform else reference_n,
                      seed=(seed, 0, qi))
            for qi, s in enumerate(s_ref)])
        for k, xi_val in enumerate(xi_list, start=1):
            u_k = Region(approximate_circle(center, tau, int(xi_val)))
            s_k = [intersect_with_query(u_k, qr.rect) for qr in ranges]
            ests = np.array([
                _estimate(u_k, s, pdf_t, None if pdf_t.is_uniform else reference_n,
                          seed=(seed, 1000 + k, qi))
                for qi, s in enumerate(s_k)])
            rows.append(_error_row("xi", float(xi_val), ests, refs))
    return rows


def _error_row(parameter: str, value: float, ests: np.ndarray,
               refs: np.ndarray) -> WorkloadErrorReport:
    deltas = np.abs(ests - refs)
    nz = refs != 0.0
    rwe = float(np.mean(deltas[nz] / refs[nz])) if nz.any() else 0.0
    return WorkloadErrorReport(parameter=parameter, value=value,
                               awe=float(deltas.mean()), rwe=rwe,
                               deltas=deltas, rwe_excluded=int((~nz).sum()))


def write_error_report(path, rows) -> None:
    with open(path, "w") as fh:
        fh.write("parameter\tvalue\tawe\trwe\trwe_excluded\n")
        for r in rows:
            fh.write(f"{r.parameter}\t{r.value:g}\t{r.awe:.8f}\t"
                     f"{r.rwe:.8f}\t{r.rwe_excluded}\n")
