"""Experiment drivers: single runs, weak/strong scaling sweeps, text pipeline.

Wall time is measured around the train call only; data generation and I/O
are excluded. Every run is deterministic for a fixed seed and workers list,
except the seconds column.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .datagen import generate_classification_data, generate_ratings, tile_ratings
from .engine import WorkerPool
from .errors import ConfigError
from .io import read_corpus, read_triplets
from .learn.als import AlsConfig, RatingsMatrix, als_train, observed_rmse
from .learn.features import n_grams, tf_idf
from .learn.kmeans import k_means
from .learn.logistic import train_logistic
from .learn.optimize import SgdConfig

_MODES = ("logistic", "als", "cluster-text")
_SCALINGS = ("weak", "strong", "none")


@dataclass
class ExperimentConfig:
    """Everything a CLI run needs: algorithm, data sizes, and knobs."""

    mode: str = "logistic"
    scaling: str = "none"
    workers_list: Sequence[int] = (1,)
    # classification data
    n: int = 20000
    d: int = 50
    # ratings data
    users: int = 300
    items: int = 200
    density: float = 0.05
    tile: int = 1
    ratings_path: Optional[str] = None
    # hyperparameters
    eta: float = 0.5
    rounds: int = 3
    local_passes: int = 1
    rank: int = 10
    lam: float = 0.01
    iters: int = 10
    clusters: int = 4
    seed: int = 0
    out: Optional[str] = None
    plot: bool = True

    def __post_init__(self):
        if self.mode not in _MODES:
            raise ConfigError(f"mode must be one of {_MODES}, got {self.mode!r}")
        if self.scaling not in _SCALINGS:
            raise ConfigError(f"scaling must be one of {_SCALINGS}, got {self.scaling!r}")
        workers = tuple(int(w) for w in self.workers_list)
        if not workers or any(w < 1 for w in workers):
            raise ConfigError(f"workers list must be non-empty and positive, got {workers}")
        self.workers_list = workers
        if self.tile < 1:
            raise ConfigError(f"tile factor must be >= 1, got {self.tile}")

    def sgd_config(self) -> SgdConfig:
        return SgdConfig(learning_rate=self.eta, rounds=self.rounds,
                         local_passes=self.local_passes, seed=self.seed)

    def als_config(self) -> AlsConfig:
        return AlsConfig(rank=self.rank, lam=self.lam, iterations=self.iters,
                         seed=self.seed)


@dataclass(frozen=True)
class ReportRow:
    mode: str
    workers: int
    scale: float
    seconds: float
    metric: float


@dataclass
class ScalingReport:
    """One row per (workers, scale) cell of a scaling sweep."""

    rows: list = field(default_factory=list)

    def to_csv(self, path):
        path = Path(path)
        with path.open("w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["mode", "workers", "scale", "seconds", "metric"])
            for r in self.rows:
                writer.writerow([r.mode, r.workers, repr(float(r.scale)),
                                 repr(float(r.seconds)), repr(float(r.metric))])

    @classmethod
    def from_csv(cls, path) -> "ScalingReport":
        with Path(path).open(newline="") as f:
            records = list(csv.reader(f))
        if not records or records[0] != ["mode", "workers", "scale", "seconds", "metric"]:
            raise ValueError(f"{path}: not a scaling report")
        rows = [ReportRow(mode=r[0], workers=int(r[1]), scale=float(r[2]),
                          seconds=float(r[3]), metric=float(r[4]))
                for r in records[1:]]
        return cls(rows=rows)

    def seconds_for(self, workers: int) -> float:
        for r in self.rows:
            if r.workers == workers:
                return r.seconds
        raise KeyError(workers)

    def speedup(self) -> float:
        """Wall-time ratio of the smallest workers cell to the largest."""
        lo = min(r.workers for r in self.rows)
        hi = max(r.workers for r in self.rows)
        return self.seconds_for(lo) / self.seconds_for(hi)


def run_logistic_cell(config: ExperimentConfig, n: int, workers: int):
    """One timed logistic run; returns (seconds, training accuracy)."""
    data = generate_classification_data(n, config.d, seed=config.seed,
                                        num_partitions=workers)
    with WorkerPool(workers) as pool:
        start = time.perf_counter()
        model = train_logistic(data.table, data.labels, config.sgd_config(), pool=pool)
        seconds = time.perf_counter() - start
    return seconds, model.accuracy(data.table, data.labels)


def _base_ratings(config: ExperimentConfig) -> RatingsMatrix:
    if config.ratings_path is not None:
        return RatingsMatrix(read_triplets(config.ratings_path))
    return generate_ratings(config.users, config.items, rank=config.rank,
                            density=config.density, noise=0.05, seed=config.seed)


def run_als_cell(config: ExperimentConfig, tile: int, workers: int,
                 base: Optional[RatingsMatrix] = None):
    """One timed ALS run on tiled ratings; returns (seconds, observed RMSE)."""
    ratings = tile_ratings(base if base is not None else _base_ratings(config), tile)
    with WorkerPool(workers) as pool:
        start = time.perf_counter()
        model = als_train(ratings, config.als_config(), pool=pool,
                          record_objective=False)
        seconds = time.perf_counter() - start
    return seconds, observed_rmse(model, ratings)


def run_scaling(config: ExperimentConfig) -> ScalingReport:
    """Sweep the workers list; weak scaling grows data with workers, strong fixes it.

    Writes the report CSV to config.out when set, and renders the companion
    figures next to it unless plotting is disabled.
    """
    if config.scaling not in ("weak", "strong"):
        raise ConfigError(f"scaling sweep needs weak or strong, got {config.scaling!r}")
    if config.mode not in ("logistic", "als"):
        raise ConfigError(f"scaling supports logistic and als, got {config.mode!r}")
    report = ScalingReport()
    base = _base_ratings(config) if config.mode == "als" else None
    for w in config.workers_list:
        if config.mode == "logistic":
            n_eff = config.n * w if config.scaling == "weak" else config.n
            seconds, metric = run_logistic_cell(config, n_eff, w)
            scale = float(n_eff)
        else:
            tile_eff = config.tile * w if config.scaling == "weak" else config.tile
            seconds, metric = run_als_cell(config, tile_eff, w, base=base)
            scale = float(tile_eff)
        report.rows.append(ReportRow(mode=config.mode, workers=w, scale=scale,
                                     seconds=seconds, metric=metric))
    if config.out:
        report.to_csv(config.out)
        if config.plot:
            from .plots import render_scaling_figures

            render_scaling_figures(report, config.scaling, Path(config.out))
    return report


@dataclass
class TextPipelineResult:
    assignments: np.ndarray
    top_terms: list
    num_docs: int
    assignments_path: Optional[Path] = None
    summary_path: Optional[Path] = None


def run_text_pipeline(corpus_path, ngram: int, k: int, iterations: int,
                      seed: int = 0, workers: Optional[int] = None,
                      out: Optional[str] = None,
                      top_terms_per_cluster: int = 5) -> TextPipelineResult:
    """Load a corpus, featurize with n-grams + tf-idf, cluster with k-means.

    Writes a `docIndex,cluster` CSV and a per-cluster top-terms summary when
    an output path is given.
    """
    corpus = read_corpus(corpus_path, num_partitions=workers)
    docs = [row[0] for row in corpus.rows()]
    tokens = [n_grams(doc, ngram) for doc in docs]
    features, vocab = tf_idf(tokens, num_partitions=workers)
    result = k_means(features, k, iterations, seed=seed, workers=workers)

    weights = features.to_matrix()
    top_terms = []
    for c in range(k):
        members = weights[result.assignments == c]
        if len(members) == 0:
            top_terms.append([])
            continue
        mean = members.mean(axis=0)
        order = np.argsort(-mean, kind="stable")[:top_terms_per_cluster]
        top_terms.append([vocab[j] for j in order if mean[j] > 0])

    out_paths = (None, None)
    if out is not None:
        assignments_path = Path(out)
        with assignments_path.open("w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["docIndex", "cluster"])
            for i, c in enumerate(result.assignments):
                writer.writerow([i, int(c)])
        summary_path = assignments_path.with_name(assignments_path.stem + "_clusters.txt")
        lines = []
        for c, terms in enumerate(top_terms):
            count = int(np.sum(result.assignments == c))
            lines.append(f"cluster {c} ({count} docs): {', '.join(terms)}")
        summary_path.write_text("\n".join(lines) + "\n")
        out_paths = (assignments_path, summary_path)

    return TextPipelineResult(assignments=result.assignments, top_terms=top_terms,
                              num_docs=len(docs), assignments_path=out_paths[0],
                              summary_path=out_paths[1])
