"""Error-injection study: how far do experimental errors widen the candidate list.

For every consecutive pair (or a random sample of them) the sweep activates
the pair's union, knocks out e pools (false negatives) or lights e extra
pools (false positives), decodes, and aggregates candidate-list sizes per
error level.

The recorded candidate count is the number of items whose address is
explainable within the error budget the observation implies: every item of
the decoder's exact-interpretation lists plus, once an error is inferred,
items whose address has at most that many pools outside the observation.
An error-free observation therefore counts exactly the two decoded items.
"""

from __future__ import annotations

import io
import random
from dataclasses import dataclass
from itertools import combinations
from math import comb
from pathlib import Path

from .codes import GrayCode, indices_from_mask
from .decode import PoolDecoder

CSV_COLUMNS = ("n", "e", "trials", "mean_candidates", "max_candidates", "fraction_of_n")

FALSE_NEGATIVE = "false-negative"
FALSE_POSITIVE = "false-positive"

_AUTO_TRIAL_CEILING = 10**6


@dataclass(frozen=True)
class SimSweepRecord:
    """Aggregate candidate-list statistics for one error level."""

    n: int
    e: int
    trials: int
    mean_candidates: float
    max_candidates: int
    fraction_of_n: float


def simulate_sweep(
    code: GrayCode,
    max_errors: int,
    mode: str = "exhaustive",
    samples: int = 10000,
    seed: int = 0,
    allow_single: bool = False,
    error_type: str = FALSE_NEGATIVE,
) -> list[SimSweepRecord]:
    """Sweep error levels 0..max_errors over the code's consecutive pairs.

    Exhaustive mode enumerates every pair and every e-subset of injectable
    pools, (n-1)*C(r+1, e) trials per level for false negatives. Sampled mode
    draws ``samples`` trials per level with the seeded generator. Mode
    ``auto`` picks exhaustive when the total exhaustive trial count stays
    under 10^6 and sampling otherwise. Decoding runs in pure pair-detection
    mode unless ``allow_single`` is set.
    """
    if code.n < 2:
        raise ValueError("sweep needs a code with at least one consecutive pair")
    if error_type not in (FALSE_NEGATIVE, FALSE_POSITIVE):
        raise ValueError(f"unknown error type {error_type!r}")
    if max_errors < 0:
        raise ValueError("max_errors must be non-negative")
    if error_type == FALSE_NEGATIVE and max_errors >= code.r + 1:
        raise ValueError(
            f"max_errors must be below r+1={code.r + 1}; dropping every positive pool "
            "leaves no signal"
        )
    if error_type == FALSE_POSITIVE and max_errors > code.m - (code.r + 1):
        raise ValueError(
            f"max_errors must be at most m-(r+1)={code.m - (code.r + 1)} extra pools"
        )
    if mode not in ("exhaustive", "sampled", "auto"):
        raise ValueError(f"unknown mode {mode!r}")

    decoder = PoolDecoder(code)
    unions = decoder.union_masks
    addresses = decoder.addr_masks
    full = (1 << code.m) - 1

    def candidate_count(pmask: int) -> int:
        result = decoder.decode_mask(pmask, allow_single)
        budget = code.r + 1 - pmask.bit_count()
        if budget <= 0:
            return len(result.candidate_items)
        items = set(result.candidate_items)
        items.update(
            j for j, a in enumerate(addresses, 1) if (a & ~pmask).bit_count() <= budget
        )
        return len(items)

    pool_count = code.r + 1 if error_type == FALSE_NEGATIVE else code.m - (code.r + 1)
    if mode == "auto":
        total = sum(len(unions) * comb(pool_count, e) for e in range(max_errors + 1))
        mode = "exhaustive" if total <= _AUTO_TRIAL_CEILING else "sampled"

    rng = random.Random(seed)
    records = []
    for e in range(max_errors + 1):
        total_candidates = 0
        worst = 0
        trials = 0
        if mode == "exhaustive":
            for u in unions:
                flippable = (
                    indices_from_mask(u)
                    if error_type == FALSE_NEGATIVE
                    else indices_from_mask(full & ~u)
                )
                for flips in combinations(flippable, e):
                    pmask = u
                    for p in flips:
                        pmask ^= 1 << (p - 1)
                    count = candidate_count(pmask)
                    total_candidates += count
                    worst = max(worst, count)
                    trials += 1
        else:
            for _ in range(samples):
                u = unions[rng.randrange(len(unions))]
                flippable = (
                    indices_from_mask(u)
                    if error_type == FALSE_NEGATIVE
                    else indices_from_mask(full & ~u)
                )
                pmask = u
                for p in rng.sample(flippable, e):
                    pmask ^= 1 << (p - 1)
                count = candidate_count(pmask)
                total_candidates += count
                worst = max(worst, count)
                trials += 1
        mean = total_candidates / trials
        records.append(
            SimSweepRecord(
                n=code.n,
                e=e,
                trials=trials,
                mean_candidates=mean,
                max_candidates=worst,
                fraction_of_n=mean / code.n,
            )
        )
    return records


def sweep_to_csv(records: list[SimSweepRecord]) -> str:
    out = io.StringIO()
    out.write(",".join(CSV_COLUMNS) + "\n")
    for rec in records:
        out.write(
            f"{rec.n},{rec.e},{rec.trials},{rec.mean_candidates:.6f},"
            f"{rec.max_candidates},{rec.fraction_of_n:.6f}\n"
        )
    return out.getvalue()


def write_sweep_csv(records: list[SimSweepRecord], path: str | Path) -> None:
    Path(path).write_text(sweep_to_csv(records))
