"""Command-line interface.

Verbs: ``gen`` (synthetic datasets), ``load`` (normalize raw datasets),
``query`` (single query, prints the answer), ``bench`` (experiment grid),
``error`` (workload-error study), ``precompute`` (uncertainty-region build
timing).
"""

import argparse
import sys
import time

from . import _kernels, datasets, experiments
from .engine import QueryRange, build_workspace, precompute_all
from .experiments import PDF_NAMES, ExperimentConfig


def _add_dataset_args(p, required=True):
    p.add_argument("--points", required=required, help="points file (id x y tau)")
    p.add_argument("--areas", required=required, help="areas file")


def _add_query_settings(p):
    p.add_argument("--xi", type=int, default=32, help="edges of the circle approximation")
    p.add_argument("--n1", type=int, default=700, help="Monte Carlo samples per object")
    p.add_argument("--pdf", choices=sorted(PDF_NAMES), default="UD")
    p.add_argument("--fanout", type=int, default=50)
    p.add_argument("--page-size", type=int, default=4096)


def _load_workspace(args):
    objects = datasets.read_points(args.points)
    areas = datasets.read_areas(args.areas)
    return build_workspace(objects, areas, pdf=PDF_NAMES[args.pdf],
                           xi=args.xi, n1=args.n1, fanout=args.fanout,
                           page_size=args.page_size)


def _cmd_gen(args):
    objects, areas = datasets.generate_synthetic(
        args.n, args.m, zeta=args.zeta, area_w=args.area_w, area_h=args.area_h,
        regular=args.regular_areas, circumradius=args.circumradius,
        space=args.space, seed=args.seed)
    datasets.write_points(args.out_points, objects)
    datasets.write_areas(args.out_areas, areas)
    print(f"wrote {len(objects)} objects -> {args.out_points}")
    print(f"wrote {len(areas)} areas -> {args.out_areas}")
    return 0


def _cmd_load(args):
    objects, areas, report = datasets.load_real(
        args.raw_points, args.raw_rects, space=args.space, seed=args.seed)
    datasets.write_points(args.out_points, objects)
    datasets.write_areas(args.out_areas, areas)
    print(f"points: read {report.points_read}, kept {report.points_kept}")
    print(f"rects:  read {report.rects_read}, kept {report.rects_kept} "
          f"(degenerate {report.rects_degenerate}, overlapping {report.rects_overlapping})")
    return 0


def _cmd_query(args):
    _kernels.warmup()
    w = _load_workspace(args)
    qr = QueryRange(args.xlo, args.ylo, args.xhi, args.yhi)
    fn = experiments.STRATEGIES[args.strategy]
    if args.strategy == "PSO":
        precompute_all(w)
    answer, stats, counters = fn(w, qr, seed=args.seed)
    for oid, p in answer:
        print(f"{oid}\t{p:.6f}")
    print(f"# {len(answer)} objects; pages_read={stats.pages_read} "
          f"records_scanned={stats.records_scanned}", file=sys.stderr)
    return 0


def _cmd_bench(args):
    _kernels.warmup()
    config = ExperimentConfig(
        seed=args.seed, xi=args.xi, theta=args.theta, n1=args.n1,
        pdf=args.pdf, strategies=tuple(args.strategies.split(",")),
        n_queries=args.queries, repetitions=args.reps, space=args.space,
        fanout=args.fanout, page_size=args.page_size, parallel=args.parallel,
        name=args.name)
    objects = datasets.read_points(args.points)
    areas = datasets.read_areas(args.areas)
    reports = experiments.run_experiment(config, objects, areas,
                                         out_dir=args.out)
    for strategy, rep in reports.items():
        pre = (f" precompute={rep.precompute_seconds:.2f}s"
               if rep.precompute_seconds is not None else "")
        print(f"{strategy}: mean={rep.mean_ms:.3f}ms median={rep.median_ms:.3f}ms "
              f"pages={rep.pages_read} records={rep.records_scanned}{pre}")
    return 0


def _cmd_error(args):
    _kernels.warmup()
    n_primes = [int(v) for v in args.n_prime.split(",")] if args.n_prime else None
    xis = [int(v) for v in args.xi_list.split(",")] if args.xi_list else None
    rows = experiments.measure_workload_error(
        tau=args.tau, n_prime_list=n_primes, xi_list=xis, pdf=args.pdf,
        xi=args.xi, theta=args.theta, n_queries=args.queries,
        reference_n=args.reference_n, reference_xi=args.reference_xi,
        seed=args.seed, space=args.space)
    for r in rows:
        print(f"{r.parameter}={r.value:g}: AWE={r.awe:.6f} RWE={r.rwe:.6f}")
    if args.out:
        experiments.write_error_report(args.out, rows)
        print(f"wrote {args.out}")
    return 0


def _cmd_precompute(args):
    _kernels.warmup()
    w = _load_workspace(args)
    t0 = time.perf_counter()
    report = precompute_all(w)
    total = time.perf_counter() - t0
    print(f"precomputed {report.objects_processed} regions in {total:.3f}s "
          f"(geometry: {report.counters.subtractions} subtractions)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="csprq",
        description="Probabilistic range queries over uncertain moving "
                    "objects among restricted areas")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic dataset")
    g.add_argument("--n", type=int, default=50000, help="number of objects")
    g.add_argument("--m", type=int, default=50000, help="number of areas")
    g.add_argument("--zeta", type=int, default=4, help="edges per regular area")
    g.add_argument("--area-w", type=float, default=40.0)
    g.add_argument("--area-h", type=float, default=10.0)
    g.add_argument("--regular-areas", action="store_true",
                   help="regular zeta-gons instead of rectangles")
    g.add_argument("--circumradius", type=float, default=20.0)
    g.add_argument("--space", type=float, default=10000.0)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out-points", required=True)
    g.add_argument("--out-areas", required=True)
    g.set_defaults(fn=_cmd_gen)

    l = sub.add_parser("load", help="normalize raw point/box datasets")
    l.add_argument("--raw-points", required=True)
    l.add_argument("--raw-rects", required=True)
    l.add_argument("--space", type=float, default=10000.0)
    l.add_argument("--seed", type=int, default=0)
    l.add_argument("--out-points", required=True)
    l.add_argument("--out-areas", required=True)
    l.set_defaults(fn=_cmd_load)

    q = sub.add_parser("query", help="run one query and print the answer")
    _add_dataset_args(q)
    _add_query_settings(q)
    q.add_argument("--strategy", choices=sorted(experiments.STRATEGIES),
                   default="SO")
    q.add_argument("--xlo", type=float, required=True)
    q.add_argument("--ylo", type=float, required=True)
    q.add_argument("--xhi", type=float, required=True)
    q.add_argument("--yhi", type=float, required=True)
    q.add_argument("--seed", type=int, default=0)
    q.set_defaults(fn=_cmd_query)

    b = sub.add_parser("bench", help="timed strategy comparison")
    _add_dataset_args(b)
    _add_query_settings(b)
    b.add_argument("--strategies", default="B,S,SO,PSO",
                   help="comma-separated subset of B,S,SO,PSO")
    b.add_argument("--theta", type=float, default=500.0, help="query side length")
    b.add_argument("--queries", type=int, default=50)
    b.add_argument("--reps", type=int, default=10)
    b.add_argument("--space", type=float, default=10000.0)
    b.add_argument("--parallel", action="store_true",
                   help="run queries concurrently (correctness sweeps only)")
    b.add_argument("--name", default="experiment")
    b.add_argument("--out", default=None, help="directory for report files")
    b.add_argument("--seed", type=int, required=True)
    b.set_defaults(fn=_cmd_bench)

    e = sub.add_parser("error", help="workload-error study")
    e.add_argument("--tau", type=float, default=20.0)
    e.add_argument("--n-prime", default=None,
                   help="comma-separated sample counts to evaluate")
    e.add_argument("--xi-list", default=None,
                   help="comma-separated edge counts to evaluate")
    e.add_argument("--pdf", choices=sorted(PDF_NAMES), default="DG")
    e.add_argument("--xi", type=int, default=32)
    e.add_argument("--theta", type=float, default=500.0)
    e.add_argument("--queries", type=int, default=100)
    e.add_argument("--reference-n", type=int, default=10**7)
    e.add_argument("--reference-xi", type=int, default=1024)
    e.add_argument("--space", type=float, default=10000.0)
    e.add_argument("--out", default=None)
    e.add_argument("--seed", type=int, required=True)
    e.set_defaults(fn=_cmd_error)

    p = sub.add_parser("precompute", help="time the uncertainty-region build")
    _add_dataset_args(p)
    _add_query_settings(p)
    p.set_defaults(fn=_cmd_precompute)

    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.fn(args)


if __name__ == "__main__":
    sys.exit(main())
