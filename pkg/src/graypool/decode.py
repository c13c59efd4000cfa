"""Decoding of pooled-experiment outcomes against a code.

An error-free outcome activates exactly the r+1 pools of one consecutive
pair's union (or the r pools of one item's address when single positives are
in play). Any other positive-pool count proves an experimental error; the
decoder then narrows the field to the pairs and items still consistent with
the observation under a false-negative model (observed pools are a subset of
the truth) or a false-positive model (observed pools are a superset).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .codes import GrayCode

EXACT_PAIR = "exact-pair"
EXACT_SINGLE = "exact-single"
ERROR_FALSE_NEGATIVE = "error-false-negative"
ERROR_FALSE_POSITIVE = "error-false-positive"
AMBIGUOUS = "ambiguous"


@dataclass(frozen=True)
class Outcome:
    """Set of positive pool indices observed in one experiment."""

    positive_pools: frozenset[int]

    def __post_init__(self):
        pools = frozenset(self.positive_pools)
        for p in pools:
            if not isinstance(p, int) or p < 1:
                raise ValueError(f"pool indices must be positive integers, got {p!r}")
        object.__setattr__(self, "positive_pools", pools)


@dataclass(frozen=True)
class DecodeResult:
    """Interpretation of an outcome.

    ``pair`` is the identified consecutive pair (j, j+1) for exact-pair
    results; ``single`` the identified item for exact-single and ambiguous
    results. ``inferred_error_count`` is the smallest number of errors any
    consistent interpretation needs. ``candidate_pairs`` holds the start
    indices j of consistent pairs (j, j+1); ``candidate_items`` every item
    that appears in a consistent interpretation. Both lists are sorted and
    deduplicated.
    """

    status: str
    pair: tuple[int, int] | None
    single: int | None
    inferred_error_count: int
    candidate_items: tuple[int, ...]
    candidate_pairs: tuple[int, ...]

    def to_json_dict(self) -> dict:
        return {
            "status": self.status,
            "pair": list(self.pair) if self.pair else None,
            "single": self.single,
            "inferred_error_count": self.inferred_error_count,
            "candidate_items": list(self.candidate_items),
            "candidate_pairs": list(self.candidate_pairs),
        }


class PoolDecoder:
    """Reusable decoder for one code; precomputes the union lookup table."""

    def __init__(self, code: GrayCode):
        self.code = code
        self.m = code.m
        self.r = code.r
        self.addr_masks = list(code.bitmasks())
        self.union_masks = [
            self.addr_masks[j] | self.addr_masks[j + 1]
            for j in range(len(self.addr_masks) - 1)
        ]
        self.union_index = {u: j + 1 for j, u in enumerate(self.union_masks)}
        self.addr_index = {a: j + 1 for j, a in enumerate(self.addr_masks)}

    def decode(self, positives: "Outcome | Iterable[int]", allow_single: bool = True) -> DecodeResult:
        if isinstance(positives, Outcome):
            pools = positives.positive_pools
        else:
            pools = set(positives)
        mask = 0
        for p in pools:
            if not 1 <= p <= self.m:
                raise ValueError(f"pool index {p} out of range 1..{self.m}")
            mask |= 1 << (p - 1)
        return self.decode_mask(mask, allow_single)

    def decode_mask(self, pmask: int, allow_single: bool = True) -> DecodeResult:
        r = self.r
        k = pmask.bit_count()

        if k == r + 1:
            j = self.union_index.get(pmask)
            if j is not None:
                return DecodeResult(EXACT_PAIR, (j, j + 1), None, 0, (j, j + 1), (j,))
            return self._false_positive(pmask, k, allow_single)
        if k > r + 1:
            return self._false_positive(pmask, k, allow_single)

        # k <= r: a single item (k == r) or a pair shadowed by false negatives.
        pairs = [
            j + 1
            for j, u in enumerate(self.union_masks)
            if pmask & ~u == 0
        ]
        items = set()
        for j in pairs:
            items.add(j)
            items.add(j + 1)
        single = None
        if allow_single:
            items.update(
                j + 1 for j, a in enumerate(self.addr_masks) if pmask & ~a == 0
            )
            if k == r:
                single = self.addr_index.get(pmask)
        if single is not None:
            if pairs:
                return DecodeResult(
                    AMBIGUOUS, None, single, 0, tuple(sorted(items)), tuple(pairs)
                )
            return DecodeResult(EXACT_SINGLE, None, single, 0, (single,), ())
        return DecodeResult(
            ERROR_FALSE_NEGATIVE,
            None,
            None,
            r + 1 - k,
            tuple(sorted(items)),
            tuple(pairs),
        )

    def _false_positive(self, pmask: int, k: int, allow_single: bool) -> DecodeResult:
        # The truth must hide inside the observed pools: unions (and, when
        # singles are in play, addresses) contained in the observation.
        pairs = [
            j + 1 for j, u in enumerate(self.union_masks) if u & ~pmask == 0
        ]
        items = set()
        for j in pairs:
            items.add(j)
            items.add(j + 1)
        if allow_single:
            items.update(
                j + 1 for j, a in enumerate(self.addr_masks) if a & ~pmask == 0
            )
        return DecodeResult(
            ERROR_FALSE_POSITIVE,
            None,
            None,
            max(1, k - (self.r + 1)),
            tuple(sorted(items)),
            tuple(pairs),
        )


def decode(code: GrayCode, positives: "Outcome | Iterable[int]", allow_single: bool = True) -> DecodeResult:
    """One-shot decode; build a PoolDecoder when decoding many outcomes."""
    return PoolDecoder(code).decode(positives, allow_single)


def partition_items(n_items: int, d: int) -> list[tuple[int, int]]:
    """Split 1..n_items into ceil(n/(d-1)) contiguous groups of size at most d-1.

    Group sizes differ by at most one, larger groups first, so that positives
    confined to any d consecutive items span at most two groups.
    """
    if d < 2:
        raise ValueError(f"d must be at least 2, got {d}")
    if n_items < 1:
        raise ValueError(f"n_items must be positive, got {n_items}")
    groups = -(-n_items // (d - 1))
    base, rem = divmod(n_items, groups)
    sizes = [base + 1] * rem + [base] * (groups - rem)
    ranges = []
    start = 1
    for size in sizes:
        ranges.append((start, start + size - 1))
        start += size
    return ranges
