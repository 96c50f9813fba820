"""Command-line harness: single runs, the text pipeline, and scaling sweeps.

Four subcommands: `logistic`, `als`, `cluster-text`, `scaling`. Flags
override values from an optional `--config` key=value file, which in turn
overrides the built-in defaults. All runs are deterministic for a fixed
seed and workers setting, except measured wall times.
"""

from __future__ import annotations

import argparse
import sys
import time
from pathlib import Path

from .engine import WorkerPool, default_parallelism
from .errors import ConfigError, ParmlError
from .experiments import (
    ExperimentConfig,
    run_scaling,
    run_text_pipeline,
    _base_ratings,
)
from .datagen import generate_classification_data, tile_ratings
from .learn.als import als_objective, als_train, observed_rmse
from .learn.logistic import train_logistic


def _parse_scalar(text: str):
    lowered = text.lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    for parse in (int, float):
        try:
            return parse(text)
        except ValueError:
            continue
    return text


def _parse_workers(value) -> tuple:
    if isinstance(value, int):
        return (value,)
    try:
        return tuple(int(part) for part in str(value).split(","))
    except ValueError:
        raise ConfigError(f"workers must be an integer or comma list, got {value!r}")


_CONFIG_KEYS = {
    "workers", "n", "d", "tile", "rank", "lambda", "iters", "eta", "rounds",
    "local_passes", "seed", "out", "users", "items", "density", "clusters",
    "mode", "scaling", "no_plot",
}


def _read_config_file(path) -> dict:
    """key=value lines; blank lines and # comments ignored; flags override."""
    values = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key=value, got {line!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key == "lambda":
            key = "lam"
        elif key not in _CONFIG_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key.strip()!r}")
        values[key] = _parse_scalar(value.strip())
    return values


def _add_common_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--workers", default=None,
                        help="worker count (comma list for scaling sweeps)")
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--out", default=None, help="output path")
    parser.add_argument("--config", default=None, help="key=value config file")


def _add_sgd_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--eta", type=float, default=None, help="SGD learning rate")
    parser.add_argument("--rounds", type=int, default=None, help="averaging rounds")
    parser.add_argument("--local-passes", dest="local_passes", type=int, default=None)


def _add_als_flags(parser: argparse.ArgumentParser):
    parser.add_argument("--rank", type=int, default=None, help="factor rank k")
    parser.add_argument("--lambda", dest="lam", type=float, default=None,
                        help="regularization strength")
    parser.add_argument("--iters", type=int, default=None, help="ALS / k-means iterations")
    parser.add_argument("--tile", type=int, default=None, help="ratings tiling factor")
    parser.add_argument("--users", type=int, default=None)
    parser.add_argument("--items", type=int, default=None)
    parser.add_argument("--density", type=float, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="parml",
        description="Data-parallel ML toolkit: train models and run scaling sweeps.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("logistic", help="train logistic regression on synthetic data")
    p.add_argument("--n", type=int, default=None, help="number of points")
    p.add_argument("--d", type=int, default=None, help="number of features")
    _add_sgd_flags(p)
    _add_common_flags(p)

    p = sub.add_parser("als", help="train ALS on a triplet file or synthetic ratings")
    p.add_argument("ratings", nargs="?", default=None,
                   help="triplet text file `user item rating` (synthetic if omitted)")
    _add_als_flags(p)
    _add_common_flags(p)

    p = sub.add_parser("cluster-text", help="featurize a corpus and cluster it")
    p.add_argument("corpus", help="text file, one document per line")
    p.add_argument("--n", type=int, default=None, help="n-gram order")
    p.add_argument("--clusters", type=int, default=None, help="number of clusters")
    p.add_argument("--iters", type=int, default=None)
    _add_common_flags(p)

    p = sub.add_parser("scaling", help="weak/strong scaling sweep with CSV + figures")
    p.add_argument("--mode", choices=["logistic", "als"], default=None)
    p.add_argument("--scaling", choices=["weak", "strong"], default=None)
    p.add_argument("--n", type=int, default=None, help="points per cell (logistic)")
    p.add_argument("--d", type=int, default=None)
    _add_sgd_flags(p)
    _add_als_flags(p)
    _add_common_flags(p)
    p.add_argument("--no-plot", dest="no_plot", action="store_const", const=True,
                   default=None, help="skip rendering figures next to the CSV")
    return parser


def _merge(args: argparse.Namespace, defaults: dict) -> dict:
    merged = dict(defaults)
    if getattr(args, "config", None):
        for key, value in _read_config_file(args.config).items():
            if key in merged:
                merged[key] = value
    for key, value in vars(args).items():
        if key in merged and value is not None:
            merged[key] = value
    return merged


def _single_worker_count(merged: dict) -> int:
    workers = _parse_workers(merged["workers"])
    if len(workers) != 1:
        raise ConfigError(f"this subcommand takes one workers value, got {workers}")
    return workers[0]


def _cmd_logistic(args) -> int:
    merged = _merge(args, {
        "n": 20000, "d": 50, "eta": 0.5, "rounds": 3, "local_passes": 1,
        "seed": 0, "workers": default_parallelism(), "out": None,
    })
    workers = _single_worker_count(merged)
    config = ExperimentConfig(mode="logistic", n=merged["n"], d=merged["d"],
                              eta=merged["eta"], rounds=merged["rounds"],
                              local_passes=merged["local_passes"],
                              seed=merged["seed"], workers_list=(workers,))
    data = generate_classification_data(config.n, config.d, seed=config.seed,
                                        num_partitions=workers)
    with WorkerPool(workers) as pool:
        start = time.perf_counter()
        model = train_logistic(data.table, data.labels, config.sgd_config(), pool=pool)
        seconds = time.perf_counter() - start
    accuracy = model.accuracy(data.table, data.labels)
    print(f"logistic: n={config.n} d={config.d} workers={workers} "
          f"rounds={config.rounds} accuracy={accuracy:.4f} time={seconds:.3f}s")
    if merged["out"]:
        model.save(merged["out"])
        print(f"model written to {merged['out']}")
    return 0


def _cmd_als(args) -> int:
    merged = _merge(args, {
        "rank": 10, "lam": 0.01, "iters": 10, "tile": 1, "users": 300,
        "items": 200, "density": 0.05, "seed": 0,
        "workers": default_parallelism(), "out": None,
    })
    workers = _single_worker_count(merged)
    config = ExperimentConfig(mode="als", rank=merged["rank"], lam=merged["lam"],
                              iters=merged["iters"], tile=merged["tile"],
                              users=merged["users"], items=merged["items"],
                              density=merged["density"], seed=merged["seed"],
                              workers_list=(workers,), ratings_path=args.ratings)
    ratings = tile_ratings(_base_ratings(config), config.tile)
    with WorkerPool(workers) as pool:
        start = time.perf_counter()
        model = als_train(ratings, config.als_config(), pool=pool)
        seconds = time.perf_counter() - start
    rmse = observed_rmse(model, ratings)
    objective = als_objective(model, ratings, config.lam)
    print(f"als: {ratings.num_users}x{ratings.num_items} nnz={ratings.nnz} "
          f"k={config.rank} lambda={config.lam} iters={config.iters} "
          f"workers={workers} rmse={rmse:.6f} objective={objective:.6f} "
          f"time={seconds:.3f}s")
    if merged["out"]:
        model.save(merged["out"])
        print(f"model written to {merged['out']}")
    return 0


def _cmd_cluster_text(args) -> int:
    merged = _merge(args, {
        "n": 1, "clusters": 4, "iters": 20, "seed": 0,
        "workers": default_parallelism(), "out": "clusters.csv",
    })
    workers = _single_worker_count(merged)
    result = run_text_pipeline(args.corpus, ngram=merged["n"], k=merged["clusters"],
                               iterations=merged["iters"], seed=merged["seed"],
                               workers=workers, out=merged["out"])
    print(f"cluster-text: {result.num_docs} docs -> {merged['clusters']} clusters")
    for c, terms in enumerate(result.top_terms):
        count = int((result.assignments == c).sum())
        print(f"  cluster {c} ({count} docs): {', '.join(terms)}")
    if result.assignments_path:
        print(f"assignments written to {result.assignments_path}")
        print(f"summary written to {result.summary_path}")
    return 0


def _cmd_scaling(args) -> int:
    merged = _merge(args, {
        "mode": "logistic", "scaling": "strong", "workers": "1,2,4",
        "n": 20000, "d": 50, "eta": 0.5, "rounds": 3, "local_passes": 1,
        "rank": 10, "lam": 0.01, "iters": 10, "tile": 1, "users": 300,
        "items": 200, "density": 0.05, "seed": 0, "out": "scaling.csv",
        "no_plot": False,
    })
    config = ExperimentConfig(
        mode=merged["mode"], scaling=merged["scaling"],
        workers_list=_parse_workers(merged["workers"]), n=merged["n"],
        d=merged["d"], eta=merged["eta"], rounds=merged["rounds"],
        local_passes=merged["local_passes"], rank=merged["rank"],
        lam=merged["lam"], iters=merged["iters"], tile=merged["tile"],
        users=merged["users"], items=merged["items"], density=merged["density"],
        seed=merged["seed"], out=merged["out"], plot=not merged["no_plot"],
        ratings_path=getattr(args, "ratings", None))
    report = run_scaling(config)
    for row in report.rows:
        print(f"{row.mode} workers={row.workers} scale={row.scale:g} "
              f"seconds={row.seconds:.3f} metric={row.metric:.4f}")
    lo = min(r.workers for r in report.rows)
    hi = max(r.workers for r in report.rows)
    if lo != hi:
        # ideal strong scaling multiplies speedup by hi/lo; ideal weak
        # scaling holds the time flat while the data grows with workers
        ideal = f"{hi / lo:.0f}x" if config.scaling == "strong" else "1x (flat time)"
        print(f"speedup ({lo} -> {hi} workers): {report.speedup():.2f}x "
              f"(ideal {ideal} for {config.scaling} scaling; hardware-dependent)")
    print(f"report written to {config.out}")
    if config.plot:
        stem = Path(config.out).with_suffix("")
        print(f"figures written to {stem}_times.png, {stem}_speedup.png")
    return 0


_COMMANDS = {
    "logistic": _cmd_logistic,
    "als": _cmd_als,
    "cluster-text": _cmd_cluster_text,
    "scaling": _cmd_scaling,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ParmlError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
