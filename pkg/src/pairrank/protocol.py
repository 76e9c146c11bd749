"""Comparison-plan generation, Borda scoring, and the multi-ballot protocol.

The adaptive protocol runs a fixed number of ballots. Every item in a
ballot is paired a fixed number of times against random opponents from
the same ballot; after each ballot the running-average scores select the
survivors for the next, smaller ballot. Scores from later ballots are
mapped back onto the scale of earlier ones with an affine fit anchored
at (1, 1), so the running averages stay comparable across ballots.

The uniform baseline spends the same comparison budget in a single
ballot over all items.
"""

from __future__ import annotations

import csv
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "BallotRecord",
    "ComparisonPlan",
    "Diagnostic",
    "ProtocolParams",
    "ScoreTable",
    "VoteOutcome",
    "ballot_sizes",
    "borda_scores",
    "estimate_cost",
    "final_ranking",
    "generate_ballot_pairs",
    "generate_uniform_plan",
    "rescale_scores",
    "rescale_slope",
    "run_protocol",
    "select_survivors",
    "top_rank_presentations",
    "total_comparisons",
    "update_running_average",
    "validate_params",
    "write_scores_csv",
    "write_votes_csv",
]

RESULT_FIRST = "A"
RESULT_SECOND = "B"
RESULT_TIE = "T"
_RESULTS = (RESULT_FIRST, RESULT_SECOND, RESULT_TIE)


@dataclass(frozen=True)
class ProtocolParams:
    """Adaptive-protocol configuration.

    n_items: number of items to rank (>= 2)
    m_per_ballot: appearances per item within one ballot
    alpha: fraction of items kept from one ballot to the next, in (0, 1]
    n_ballots: number of ballots
    """

    n_items: int
    m_per_ballot: int
    alpha: float
    n_ballots: int

    def __post_init__(self) -> None:
        if self.n_items < 2:
            raise ValueError("n_items must be >= 2")
        if self.m_per_ballot < 1:
            raise ValueError("m_per_ballot must be >= 1")
        if not (0.0 < self.alpha <= 1.0):
            raise ValueError("alpha must lie in (0, 1]")
        if self.n_ballots < 1:
            raise ValueError("n_ballots must be >= 1")


@dataclass(frozen=True)
class Diagnostic:
    level: str  # "error" or "warning"
    message: str


@dataclass
class VoteOutcome:
    """Result of one pairwise comparison: 'A', 'B', or 'T' for a tie."""

    item_a: int
    item_b: int
    result: str
    voter_id: int = 0

    def __post_init__(self) -> None:
        if self.result not in _RESULTS:
            raise ValueError(f"result must be one of {_RESULTS}, got {self.result!r}")


@dataclass
class ComparisonPlan:
    """Pairs to present within one ballot; each item appears a fixed number of times."""

    ballot_index: int
    items: list[int]
    pairs: list[tuple[int, int]]
    appearances: dict[int, int]
    voter_ids: list[int] | None = None


@dataclass
class BallotRecord:
    """Per-ballot scoring state for every item present in the ballot."""

    index: int
    items: list[int]
    appearances: dict[int, int]
    wins: dict[int, int]
    ties: dict[int, int]
    x: dict[int, float]
    y: dict[int, float]
    ybar: dict[int, float]
    b_hat: float | None = None
    votes: list[VoteOutcome] = field(default_factory=list)


@dataclass
class ScoreTable:
    """Full outcome of one protocol run."""

    policy: str
    params: ProtocolParams
    ballots: list[BallotRecord]
    ybar_final: dict[int, float]
    eliminated_at: dict[int, int | None]

    @property
    def survivors(self) -> list[int]:
        return list(self.ballots[-1].items)


def _round_half_away(x: float) -> int:
    # round() in Python rounds halves to even; the schedule needs half away from zero
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def _size_schedule(p: ProtocolParams) -> list[int]:
    sizes = [p.n_items]
    for _ in range(p.n_ballots - 1):
        sizes.append(_round_half_away(p.alpha * sizes[-1]))
    return sizes


def ballot_sizes(p: ProtocolParams) -> list[int]:
    """Ballot sizes s_1 = N, s_k = round(alpha * s_{k-1}), halves rounded away from zero."""
    sizes = _size_schedule(p)
    if min(sizes) < 2:
        raise ValueError(f"ballot size below 2 in schedule {sizes}")
    return sizes


def total_comparisons(p: ProtocolParams) -> int:
    """Exact comparison count sum_k ceil(M * s_k / 2) over the ballot schedule."""
    return sum(-(-p.m_per_ballot * s // 2) for s in ballot_sizes(p))


def top_rank_presentations(p: ProtocolParams) -> int:
    """Total presentations of an item that survives every ballot."""
    return p.n_ballots * p.m_per_ballot


def validate_params(p: ProtocolParams, policy: str = "adaptive") -> list[Diagnostic]:
    """Heuristic parameter checks; returns diagnostics instead of raising."""
    diags: list[Diagnostic] = []
    if policy == "adaptive" and p.n_ballots < 2:
        diags.append(Diagnostic("error", "n_ballots >= 2 required for the adaptive policy"))
    sizes = _size_schedule(p)
    if min(sizes) < 2:
        diags.append(Diagnostic("error", f"ballot schedule drops below 2 items: {sizes}"))
    if p.n_ballots > 10:
        diags.append(Diagnostic("warning", "more than 10 ballots causes many collection pauses"))
    if policy == "adaptive" and p.n_ballots >= 2:
        alpha_cap = 0.1 ** (1.0 / (p.n_ballots - 1))
        if p.alpha > alpha_cap:
            diags.append(
                Diagnostic(
                    "warning",
                    f"alpha {p.alpha:g} keeps more than 10% of items to the last "
                    f"ballot (cap {alpha_cap:.3f})",
                )
            )
    if top_rank_presentations(p) < 100:
        diags.append(
            Diagnostic(
                "warning",
                f"top-rank items are presented only {top_rank_presentations(p)} times; "
                "fewer than 100 limits score precision",
            )
        )
    return diags


def generate_ballot_pairs(items, m: int, rng, ballot_index: int = 1) -> ComparisonPlan:
    """Random pairs over one ballot with each item appearing exactly m times.

    When m * len(items) is odd, a single randomly chosen item appears m+1
    times. Repeated pairs are allowed; an item is never paired with
    itself (self-pairs from the shuffle are repaired by local swaps).
    """
    item_list = [int(i) for i in items]
    if len(item_list) < 2:
        raise ValueError("need at least two items to form pairs")
    if m < 1:
        raise ValueError("m must be >= 1")
    slots = np.repeat(np.asarray(item_list, dtype=np.int64), m)
    appearances = {i: m for i in item_list}
    if slots.size % 2 == 1:
        parity_item = item_list[int(rng.integers(len(item_list)))]
        slots = np.append(slots, np.int64(parity_item))
        appearances[parity_item] = m + 1
    rng.shuffle(slots)
    pairs = _repair_self_pairs(slots.reshape(-1, 2), rng)
    return ComparisonPlan(
        ballot_index=ballot_index,
        items=item_list,
        pairs=pairs,
        appearances=appearances,
    )


def generate_uniform_plan(items, n_comp: int, rng) -> ComparisonPlan:
    """Random pairs with item appearances as equal as possible.

    Every item appears floor(2*n_comp/N) or one more time, with the
    overflow assigned to a random subset, so appearances sum to 2*n_comp.
    """
    item_list = [int(i) for i in items]
    if len(item_list) < 2:
        raise ValueError("need at least two items to form pairs")
    if n_comp < 1:
        raise ValueError("n_comp must be >= 1")
    n = len(item_list)
    total = 2 * n_comp
    base = total // n
    overflow = total - base * n
    counts = np.full(n, base, dtype=np.int64)
    if overflow:
        bumped = rng.choice(n, size=overflow, replace=False)
        counts[bumped] += 1
    slots = np.repeat(np.asarray(item_list, dtype=np.int64), counts)
    rng.shuffle(slots)
    pairs = _repair_self_pairs(slots.reshape(-1, 2), rng)
    appearances = {item: int(c) for item, c in zip(item_list, counts)}
    return ComparisonPlan(ballot_index=1, items=item_list, pairs=pairs, appearances=appearances)


def _repair_self_pairs(pairs: np.ndarray, rng) -> list[tuple[int, int]]:
    # Swapping one slot of a self-pair (v, v) with a slot from a pair that
    # does not contain v fixes the former without breaking the latter; such
    # a partner always exists because no item fills more than half the slots.
    bad = [int(r) for r in np.flatnonzero(pairs[:, 0] == pairs[:, 1])]
    while bad:
        row = bad.pop()
        v = pairs[row, 0]
        if pairs[row, 1] != v:
            continue
        order = rng.permutation(len(pairs))
        for cand in order:
            if cand == row:
                continue
            if pairs[cand, 0] != v and pairs[cand, 1] != v:
                pairs[row, 1], pairs[cand, 0] = pairs[cand, 0], v
                break
        else:
            raise RuntimeError("could not repair a self-pair; items too few")
    return [(int(a), int(b)) for a, b in pairs]


def _tally_votes(plan: ComparisonPlan, votes) -> tuple[dict[int, int], dict[int, int]]:
    votes = list(votes)
    mismatched = []
    if len(votes) != len(plan.pairs):
        raise ValueError(
            f"expected {len(plan.pairs)} votes for ballot {plan.ballot_index}, "
            f"got {len(votes)}"
        )
    wins = {i: 0 for i in plan.items}
    ties = {i: 0 for i in plan.items}
    for idx, (pair, vote) in enumerate(zip(plan.pairs, votes)):
        if {vote.item_a, vote.item_b} != set(pair):
            mismatched.append((idx, pair, (vote.item_a, vote.item_b)))
            continue
        if vote.result == RESULT_TIE:
            ties[pair[0]] += 1
            ties[pair[1]] += 1
        else:
            winner = vote.item_a if vote.result == RESULT_FIRST else vote.item_b
            wins[winner] += 1
    if mismatched:
        detail = ", ".join(f"#{i}: planned {p} voted {v}" for i, p, v in mismatched[:5])
        raise ValueError(f"{len(mismatched)} votes do not match planned pairs ({detail})")
    return wins, ties


def borda_scores(plan: ComparisonPlan, votes) -> dict[int, float]:
    """Win fraction per item, counting a tie as half a win."""
    wins, ties = _tally_votes(plan, votes)
    return {
        i: (wins[i] + 0.5 * ties[i]) / plan.appearances[i]
        for i in plan.items
    }


def rescale_slope(x, ybar_prev) -> float | None:
    """Slope of the affine fit through (1, 1) mapping raw scores onto the running scale.

    Returns None when every raw score equals 1, which leaves the fit
    underdetermined.
    """
    xv = np.asarray(x, dtype=float)
    yv = np.asarray(ybar_prev, dtype=float)
    if xv.shape != yv.shape or xv.ndim != 1:
        raise ValueError("score vectors must be one-dimensional and of equal length")
    dx = 1.0 - xv
    denom = float(dx @ dx)
    if denom == 0.0:
        return None
    return float(dx @ (1.0 - yv)) / denom


def rescale_scores(x, ybar_prev) -> np.ndarray:
    """Map ballot scores x onto the running-average scale via y = 1 - b*(1-x)."""
    xv = np.asarray(x, dtype=float)
    b = rescale_slope(xv, ybar_prev)
    if b is None:
        warnings.warn(
            "every raw score equals 1; rescale fit is underdetermined, keeping scores as-is",
            stacklevel=2,
        )
        return xv.copy()
    return 1.0 - b * (1.0 - xv)


def update_running_average(history) -> float:
    """Arithmetic mean of the rescaled scores collected so far."""
    values = list(history)
    if not values:
        raise ValueError("empty score history")
    return math.fsum(values) / len(values)


def select_survivors(ybar: dict[int, float], count: int, rng) -> list[int]:
    """The `count` items with the largest running averages; cutoff ties drawn at random."""
    if count < 2:
        raise ValueError("survivor count must be >= 2")
    if count > len(ybar):
        raise ValueError("survivor count exceeds the number of live items")
    items = sorted(ybar, key=lambda i: (-ybar[i], i))
    cutoff = ybar[items[count - 1]]
    sure = [i for i in items if ybar[i] > cutoff]
    tied = sorted(i for i in items if ybar[i] == cutoff)
    need = count - len(sure)
    if need == len(tied):
        chosen = tied
    else:
        chosen = [tied[k] for k in rng.choice(len(tied), size=need, replace=False)]
    return sure + [int(i) for i in chosen]


def final_ranking(table: ScoreTable) -> np.ndarray:
    """Strict ranking of all items by final running average.

    Exact score ties go first to the item that stayed in the protocol
    longer, then to the lower item id, so the result is a permutation of
    1..N suitable for publishing as a dataset.
    """
    n = table.params.n_items
    last = table.params.n_ballots + 1

    def sort_key(i: int):
        elim = table.eliminated_at.get(i)
        stage = last if elim is None else elim
        return (-table.ybar_final[i], -stage, i)

    ranks = np.empty(n, dtype=float)
    for position, item in enumerate(sorted(range(n), key=sort_key), start=1):
        ranks[item] = position
    return ranks


def estimate_cost(t_comp_mean: float, n_comp: int) -> float:
    """Person-hours to collect n_comp comparisons at t_comp_mean seconds each."""
    if t_comp_mean < 0 or n_comp < 0:
        raise ValueError("cost inputs must be non-negative")
    return t_comp_mean * n_comp / 3600.0


def _collect_votes(vote_oracle, plan: ComparisonPlan) -> list[VoteOutcome]:
    batch = getattr(vote_oracle, "vote_batch", None)
    if callable(batch):
        outcomes = list(batch(plan.pairs))
    else:
        outcomes = [vote_oracle(a, b) for a, b in plan.pairs]
    plan.voter_ids = [o.voter_id for o in outcomes]
    return outcomes


def run_protocol(
    params: ProtocolParams,
    policy: str,
    vote_oracle,
    rng,
    keep_votes: bool = True,
) -> ScoreTable:
    """Run the full vote-collection protocol against a vote oracle.

    The oracle is called as ``oracle(item_a, item_b) -> VoteOutcome``; an
    oracle exposing a ``vote_batch(pairs)`` method is used in one call
    per ballot instead (outcomes are order-independent within a ballot).
    Identical params, oracle, and random state reproduce the table
    exactly.
    """
    if policy not in ("adaptive", "uniform"):
        raise ValueError(f"unknown policy {policy!r}")
    errors = [d for d in validate_params(params, policy=policy) if d.level == "error"]
    if errors:
        raise ValueError("; ".join(d.message for d in errors))
    if policy == "uniform":
        return _run_uniform(params, vote_oracle, rng, keep_votes)
    return _run_adaptive(params, vote_oracle, rng, keep_votes)


def _run_adaptive(params, vote_oracle, rng, keep_votes) -> ScoreTable:
    sizes = ballot_sizes(params)
    live = list(range(params.n_items))
    y_hist: dict[int, list[float]] = {i: [] for i in live}
    ybar: dict[int, float] = {}
    eliminated: dict[int, int | None] = {i: None for i in live}
    records: list[BallotRecord] = []

    for k, size in enumerate(sizes, start=1):
        if k > 1:
            keep = set(select_survivors({i: ybar[i] for i in live}, size, rng))
            for i in live:
                if i not in keep:
                    eliminated[i] = k - 1
            live = sorted(keep)
        plan = generate_ballot_pairs(live, params.m_per_ballot, rng, ballot_index=k)
        votes = _collect_votes(vote_oracle, plan)
        wins, ties = _tally_votes(plan, votes)
        x = {
            i: (wins[i] + 0.5 * ties[i]) / plan.appearances[i]
            for i in plan.items
        }
        xv = np.array([x[i] for i in plan.items])
        if k == 1:
            b_hat = None
            yv = xv.copy()
        else:
            prev = np.array([ybar[i] for i in plan.items])
            b_hat = rescale_slope(xv, prev)
            yv = rescale_scores(xv, prev)
        y = {}
        ybar_now = {}
        for i, y_i in zip(plan.items, yv):
            y[i] = float(y_i)
            y_hist[i].append(float(y_i))
            ybar[i] = update_running_average(y_hist[i])
            ybar_now[i] = ybar[i]
        records.append(
            BallotRecord(
                index=k,
                items=plan.items,
                appearances=plan.appearances,
                wins=wins,
                ties=ties,
                x=x,
                y=y,
                ybar=ybar_now,
                b_hat=b_hat,
                votes=votes if keep_votes else [],
            )
        )

    return ScoreTable(
        policy="adaptive",
        params=params,
        ballots=records,
        ybar_final=dict(ybar),
        eliminated_at=eliminated,
    )


def _run_uniform(params, vote_oracle, rng, keep_votes) -> ScoreTable:
    items = list(range(params.n_items))
    n_comp = total_comparisons(params)
    plan = generate_uniform_plan(items, n_comp, rng)
    votes = _collect_votes(vote_oracle, plan)
    wins, ties = _tally_votes(plan, votes)
    x = {i: (wins[i] + 0.5 * ties[i]) / plan.appearances[i] for i in items}
    record = BallotRecord(
        index=1,
        items=items,
        appearances=plan.appearances,
        wins=wins,
        ties=ties,
        x=x,
        y=dict(x),
        ybar=dict(x),
        b_hat=None,
        votes=votes if keep_votes else [],
    )
    return ScoreTable(
        policy="uniform",
        params=params,
        ballots=[record],
        ybar_final=dict(x),
        eliminated_at={i: None for i in items},
    )


def write_votes_csv(table: ScoreTable, path) -> None:
    """Vote log rows: ballot_index, item_a, item_b, voter_id, result."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["ballot_index", "item_a", "item_b", "voter_id", "result"])
        for record in table.ballots:
            for vote in record.votes:
                writer.writerow([record.index, vote.item_a, vote.item_b, vote.voter_id, vote.result])


def write_scores_csv(table: ScoreTable, path) -> None:
    """Score rows: item_id, ballot_index, appearances, wins, ties, x, y, ybar, eliminated_at."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["item_id", "ballot_index", "appearances", "wins", "ties", "x", "y", "ybar", "eliminated_at"]
        )
        for record in table.ballots:
            for i in record.items:
                elim = table.eliminated_at.get(i)
                writer.writerow(
                    [
                        i,
                        record.index,
                        record.appearances[i],
                        record.wins[i],
                        record.ties[i],
                        repr(record.x[i]),
                        repr(record.y[i]),
                        repr(record.ybar[i]),
                        "" if elim is None else elim,
                    ]
                )
