"""Seeded experiment harness: replicate runs, summaries, and CSV outputs.

A run is a pure function of its configuration. Replicate r draws its
generator seed from SeedSequence([base_seed, r]), so replicates are
mutually independent and any single one can be reproduced on its own.
Replicates may execute in parallel; results are always aggregated in
replicate order, so the output does not depend on scheduling.
"""

from __future__ import annotations

import csv
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .metrics import coefficient_suite, ranks_from_scores
from .protocol import (
    ProtocolParams,
    ScoreTable,
    run_protocol,
    write_scores_csv,
    write_votes_csv,
)
from .voters import (
    SimilarityDistribution,
    SimulatedElectorate,
    load_similarity_file,
    make_distribution,
    sample_voter_pool,
    theoretical_ranking,
)

__all__ = [
    "COEFFICIENTS",
    "ExperimentConfig",
    "ExperimentSummary",
    "ReplicateResult",
    "config_from_file",
    "export_figure_data",
    "parse_config_file",
    "replicate_seed",
    "run_experiment",
    "run_replicate",
    "sample_cosine_values",
    "write_outputs",
]

COEFFICIENTS = ("rho_w", "tau_w", "rho", "tau")

POLICIES = ("adaptive", "uniform")
DISTRIBUTIONS = ("exponential", "power_law", "file")


@dataclass(frozen=True)
class ExperimentConfig:
    """One simulation cell. ``mode`` drives how votes are cast; ``reference``
    picks the theoretical ranking the estimate is scored against (the latent
    similarity order by default, the |similarity| order with 'relatedness')."""

    n_items: int = 990
    m: int = 20
    alpha: float = 0.5
    n_ballots: int = 7
    policy: str = "adaptive"
    distribution: str = "exponential"
    similarity_file: str | None = None
    mode: str = "relatedness"
    n_voters: int = 100
    sigma_min: float = 0.02
    sigma_max: float = 0.2
    eps_min: float = 0.005
    eps_max: float = 0.05
    replicates: int = 50
    seed: int = 0
    n0: int = 2
    out_dir: str = "out"
    reference: str = "similarity"
    n_jobs: int = 1
    snapshots: bool = True

    def protocol_params(self) -> ProtocolParams:
        return ProtocolParams(self.n_items, self.m, self.alpha, self.n_ballots)

    def validate(self) -> None:
        self.protocol_params()
        if self.policy not in POLICIES:
            raise ValueError(f"policy must be one of {POLICIES}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(f"distribution must be one of {DISTRIBUTIONS}")
        if self.distribution == "file" and not self.similarity_file:
            raise ValueError("distribution 'file' requires similarity_file")
        if self.mode not in ("similarity", "relatedness"):
            raise ValueError("mode must be 'similarity' or 'relatedness'")
        if self.reference not in ("similarity", "relatedness"):
            raise ValueError("reference must be 'similarity' or 'relatedness'")
        if self.n_voters < 1:
            raise ValueError("n_voters must be >= 1")
        if not (0.0 <= self.sigma_min <= self.sigma_max):
            raise ValueError("invalid sigma range")
        if not (0.0 <= self.eps_min <= self.eps_max <= 1.0):
            raise ValueError("invalid epsilon range")
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if self.n0 < 0:
            raise ValueError("n0 must be >= 0")
        if self.n_jobs < 1:
            raise ValueError("n_jobs must be >= 1")


_BOOL_WORDS = {"true": True, "yes": True, "1": True, "false": False, "no": False, "0": False}


def _coerce(name: str, text: str, target):
    if target is bool:
        try:
            return _BOOL_WORDS[text.lower()]
        except KeyError:
            raise ValueError(f"config key {name}: expected a boolean, got {text!r}") from None
    if target is int:
        return int(text)
    if target is float:
        return float(text)
    return text


def parse_config_file(path) -> dict[str, str]:
    """Read a flat ``key = value`` file; '#' starts a comment line."""
    entries: dict[str, str] = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise ValueError(f"{Path(path).name}:{lineno}: expected 'key = value', got {line!r}")
            key, _, value = line.partition("=")
            entries[key.strip()] = value.strip()
    return entries


_COERCERS = {
    "n_items": int, "m": int, "alpha": float, "n_ballots": int,
    "policy": str, "distribution": str, "similarity_file": str, "mode": str,
    "n_voters": int, "sigma_min": float, "sigma_max": float,
    "eps_min": float, "eps_max": float, "replicates": int, "seed": int,
    "n0": int, "out_dir": str, "reference": str, "n_jobs": int, "snapshots": bool,
}


def config_from_file(path=None, overrides: dict | None = None) -> ExperimentConfig:
    """Build a config from defaults, then a key-value file, then overrides."""
    values: dict = {}
    if path is not None:
        for key, text in parse_config_file(path).items():
            if key not in _COERCERS:
                raise ValueError(f"unknown config key: {key!r}")
            values[key] = _coerce(key, text, _COERCERS[key])
    for key, value in (overrides or {}).items():
        if key not in _COERCERS:
            raise ValueError(f"unknown config key: {key!r}")
        values[key] = value if not isinstance(value, str) else _coerce(key, value, _COERCERS[key])
    if values.get("similarity_file") in ("", "none"):
        values["similarity_file"] = None
    cfg = ExperimentConfig(**values)
    cfg.validate()
    return cfg


def replicate_seed(base_seed: int, replicate: int) -> int:
    """Derived generator seed of one replicate (counter-based, collision-resistant)."""
    ss = np.random.SeedSequence([int(base_seed), int(replicate)])
    return int(ss.generate_state(1, np.uint64)[0])


def resolve_distribution(cfg: ExperimentConfig) -> SimilarityDistribution:
    if cfg.distribution == "file":
        return load_similarity_file(cfg.similarity_file)
    return make_distribution(cfg.distribution, cfg.n_items)


@dataclass
class ReplicateResult:
    seed: int
    rho_w: float
    tau_w: float
    rho: float
    tau: float
    table: ScoreTable | None = None


@dataclass
class ExperimentSummary:
    config: ExperimentConfig
    theoretical_ranks: np.ndarray
    replicates: list[ReplicateResult]
    mean: dict[str, float]
    sd: dict[str, float | None]


def run_replicate(cfg: ExperimentConfig, replicate: int) -> ReplicateResult:
    """One end-to-end simulation: fresh voters, fresh noise, scored against theory."""
    seed = replicate_seed(cfg.seed, replicate)
    rng = np.random.default_rng(seed)
    dist = resolve_distribution(cfg)
    if dist.n_items != cfg.n_items:
        raise ValueError(
            f"distribution holds {dist.n_items} values but n_items is {cfg.n_items}"
        )
    theo = theoretical_ranking(dist, cfg.reference)
    voters = sample_voter_pool(
        cfg.n_voters, (cfg.sigma_min, cfg.sigma_max), (cfg.eps_min, cfg.eps_max), rng
    )
    oracle = SimulatedElectorate(dist, voters, cfg.mode, rng)
    keep_votes = cfg.snapshots and replicate == 0
    table = run_protocol(cfg.protocol_params(), cfg.policy, oracle, rng, keep_votes=keep_votes)
    estimate = ranks_from_scores(
        np.array([table.ybar_final[i] for i in range(cfg.n_items)])
    )
    coeffs = coefficient_suite(estimate, theo, cfg.n0)
    return ReplicateResult(seed=seed, table=table if cfg.snapshots else None, **coeffs)


def _replicate_task(task: tuple[ExperimentConfig, int]) -> ReplicateResult:
    cfg, replicate = task
    try:
        return run_replicate(cfg, replicate)
    except Exception as exc:
        raise RuntimeError(
            f"replicate {replicate} (seed {replicate_seed(cfg.seed, replicate)}) failed: {exc}"
        ) from exc


def run_experiment(cfg: ExperimentConfig) -> ExperimentSummary:
    """Run all replicates and report mean and unbiased standard deviation."""
    cfg.validate()
    tasks = [(cfg, r) for r in range(cfg.replicates)]
    if cfg.n_jobs > 1:
        with ProcessPoolExecutor(max_workers=cfg.n_jobs) as pool:
            results = list(pool.map(_replicate_task, tasks))
    else:
        results = [_replicate_task(t) for t in tasks]
    mean: dict[str, float] = {}
    sd: dict[str, float | None] = {}
    for name in COEFFICIENTS:
        values = [getattr(r, name) for r in results]
        mean[name] = statistics.fmean(values)
        sd[name] = statistics.stdev(values) if len(values) >= 2 else None
    dist = resolve_distribution(cfg)
    return ExperimentSummary(
        config=cfg,
        theoretical_ranks=theoretical_ranking(dist, cfg.reference),
        replicates=results,
        mean=mean,
        sd=sd,
    )


def write_outputs(summary: ExperimentSummary, out_dir=None) -> Path:
    """Write summary.csv, replicates.csv and, with snapshots, vote/score/figure CSVs."""
    cfg = summary.config
    out = Path(out_dir if out_dir is not None else cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["policy", "distribution", "coefficient", "mean", "sd"])
        for name in COEFFICIENTS:
            sd = summary.sd[name]
            writer.writerow(
                [cfg.policy, cfg.distribution, name, repr(summary.mean[name]),
                 "" if sd is None else repr(sd)]
            )
    with open(out / "replicates.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["seed", "rho_w", "tau_w", "rho", "tau"])
        for rep in summary.replicates:
            writer.writerow(
                [rep.seed, repr(rep.rho_w), repr(rep.tau_w), repr(rep.rho), repr(rep.tau)]
            )
    if cfg.snapshots and summary.replicates and summary.replicates[0].table is not None:
        table = summary.replicates[0].table
        write_votes_csv(table, out / "votes.csv")
        write_scores_csv(table, out / "scores.csv")
        export_figure_data(summary, out)
    return out


def export_figure_data(summary: ExperimentSummary, out_dir) -> None:
    """CSV data behind the score-vs-theoretical-rank and rescale-fit plots.

    Uses the first replicate's score table. Emits rows
    (theoretical_rank, ballot_index, x) and (theoretical_rank, ybar) for
    score plots, plus (ballot_index, x, ybar_prev) scatter rows and the
    fitted intercept/slope for every rescaled ballot.
    """
    first = summary.replicates[0] if summary.replicates else None
    if first is None or first.table is None:
        raise ValueError("snapshots disabled: no score table retained for figure export")
    table = first.table
    theo = summary.theoretical_ranks
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)

    with open(out / "figure_ballot_scores.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theoretical_rank", "ballot_index", "x"])
        for record in table.ballots:
            for i in record.items:
                writer.writerow([repr(float(theo[i])), record.index, repr(record.x[i])])

    with open(out / "figure_final_scores.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["theoretical_rank", "ybar_final"])
        for i in range(table.params.n_items):
            writer.writerow([repr(float(theo[i])), repr(table.ybar_final[i])])

    with open(out / "figure_rescale_points.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ballot_index", "x", "ybar_prev"])
        for k, record in enumerate(table.ballots):
            if record.index == 1:
                continue
            prev = table.ballots[k - 1].ybar
            for i in record.items:
                writer.writerow([record.index, repr(record.x[i]), repr(prev[i])])

    with open(out / "figure_rescale_fit.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ballot_index", "intercept", "slope"])
        for record in table.ballots:
            if record.index == 1:
                continue
            if record.b_hat is None:
                writer.writerow([record.index, "", ""])
            else:
                writer.writerow([record.index, repr(1.0 - record.b_hat), repr(record.b_hat)])


def sample_cosine_values(n_tokens: int = 45, dim: int = 64, spread: float = 1.0, rng=None) -> np.ndarray:
    """Pairwise cosines of clustered random unit vectors.

    Stands in for a real embedding-derived similarity list: n_tokens
    vectors scattered around a common direction give n_tokens*(n_tokens-1)/2
    cosine values shifted toward larger similarities, the shape expected
    of token pairs drawn within one semantic area. Intended to be written
    to a file and loaded back through the 'file' distribution kind.
    """
    if rng is None:
        rng = np.random.default_rng(0)
    if n_tokens < 2:
        raise ValueError("need at least two tokens")
    center = np.zeros(dim)
    center[0] = 1.0
    vectors = center + spread * rng.standard_normal((n_tokens, dim)) / np.sqrt(dim)
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    cosines = vectors @ vectors.T
    iu = np.triu_indices(n_tokens, k=1)
    return np.clip(cosines[iu], -1.0, 1.0)
