"""Combination calculus: growing long codes out of short ones.

A code over m pools whose last address is contained in the first address of
a code over the same pools with weight one higher can be concatenated after
augmenting the lighter code with an all-one row and the heavier one with an
all-zero row; the result is a code over m+1 pools (``combine_pair``). Row
permutations preserve validity, closing unions extend a code's union path by
one, and complementing a full union path flips a code between weights r and
m-r-1. ``rcbba`` drives these pieces: it repeatedly builds short codes with
the branch-and-bound constructor, augments and permutes them so each one
exactly fills the occupancy target of one pool, and concatenates, switching
to a single balance-targeted search over the last 2r pools. ``build_maximal``
uses the same calculus to reach the length bound exactly at small scale.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Iterable, Sequence

from .bba import DEFAULT_BUDGET, SearchBudget, _construct_masks, balance_target
from .codes import (
    Address,
    GrayCode,
    balance_of,
    consecutive_unions,
    indices_from_mask,
    length_bound,
)
from .errors import (
    BudgetExhaustedError,
    ClosingUnionNotFoundError,
    CombinePreconditionError,
    ConstructionError,
    InfeasibleError,
    NoJoiningAddressError,
)
from .validate import validate


@dataclass(frozen=True)
class AugmentedCode:
    """A code extended by constant rows: '+' appends an all-one row, '-' an all-zero row."""

    base: GrayCode
    row_order: tuple[str, ...]

    def __post_init__(self):
        for op in self.row_order:
            if op not in ("+", "-"):
                raise ValueError(f"augmentation op must be '+' or '-', got {op!r}")
        object.__setattr__(self, "row_order", tuple(self.row_order))

    @property
    def plus_rows(self) -> int:
        return self.row_order.count("+")

    @property
    def minus_rows(self) -> int:
        return self.row_order.count("-")

    @cached_property
    def code(self) -> GrayCode:
        """The augmented code: pool count m + len(row_order), weight r + plus_rows."""
        m = self.base.m + len(self.row_order)
        ones = 0
        for offset, op in enumerate(self.row_order):
            if op == "+":
                ones |= 1 << (self.base.m + offset)
        masks = [bits | ones for bits in self.base.bitmasks()]
        return GrayCode.from_bitmasks(m, self.base.r + self.plus_rows, masks)


def augment(code: GrayCode, ops: Iterable[str] | str) -> AugmentedCode:
    """Append one constant row per entry of ``ops``, in order."""
    return AugmentedCode(code, tuple(ops))


def combine_pair(light: GrayCode, heavy: GrayCode) -> GrayCode:
    """Concatenate an (m, r-1) code and an (m, r) code into an (m+1, r) code.

    Preconditions: the codes share their pool count, the weights differ by
    exactly one, the last address of the lighter code is contained in the
    first address of the heavier code, and their union (which equals that
    first address) differs from every consecutive union of the lighter code.
    """
    if light.n == 0 or heavy.n == 0:
        raise CombinePreconditionError("combination requires two non-empty codes")
    if light.m != heavy.m:
        raise CombinePreconditionError(
            f"pool counts differ: {light.m} versus {heavy.m}"
        )
    if heavy.r != light.r + 1:
        raise CombinePreconditionError(
            f"weights must differ by one: got {light.r} and {heavy.r}"
        )
    tail = light.addresses[-1].bits
    head = heavy.addresses[0].bits
    if tail | head != head:
        raise CombinePreconditionError(
            "subset condition failed: the last address of the lighter code is "
            "not contained in the first address of the heavier code"
        )
    for j, u in enumerate(consecutive_unions(light), start=1):
        if u.bits == head:
            raise CombinePreconditionError(
                f"joining union duplicates consecutive union {j} of the lighter code"
            )
    m = light.m + 1
    ones = 1 << (m - 1)
    masks = [bits | ones for bits in light.bitmasks()] + list(heavy.bitmasks())
    return GrayCode.from_bitmasks(m, heavy.r, masks)


def apply_row_permutation(code: GrayCode, perm: Sequence[int]) -> GrayCode:
    """Relabel pools: pool i of the input becomes pool ``perm[i-1]`` of the output."""
    if sorted(perm) != list(range(1, code.m + 1)):
        raise ValueError(f"not a permutation of 1..{code.m}: {list(perm)}")
    table = [p - 1 for p in perm]
    return GrayCode.from_bitmasks(
        code.m, code.r, [_remap_mask(bits, table) for bits in code.bitmasks()]
    )


def _remap_mask(mask: int, table: Sequence[int]) -> int:
    out = 0
    while mask:
        low = mask & -mask
        out |= 1 << table[low.bit_length() - 1]
        mask ^= low
    return out


def find_closing_union(code: GrayCode) -> Address:
    """Smallest weight-(r+1) superset of the last address unused as a consecutive union.

    Candidates are scanned in ascending index order, so the result is the
    lexicographically smallest admissible index set.
    """
    if code.n == 0:
        raise ValueError("cannot close an empty code")
    used = {u.bits for u in consecutive_unions(code)}
    last = code.addresses[-1].bits
    for z in range(code.m):
        bit = 1 << z
        if last & bit:
            continue
        candidate = last | bit
        if candidate not in used:
            return Address(code.m, candidate)
    raise ClosingUnionNotFoundError(
        f"every weight-{code.r + 1} superset of the last address is already a union"
    )


def flip_complement(code: GrayCode, closing: Address) -> GrayCode:
    """Complement the union path (u_1, ..., u_{n-1}, closing) bit by bit.

    The complements form an (m, m-r-1, n) code: adjacent path unions share
    exactly the address between them, so their complements sit at Hamming
    distance 2 and their pairwise unions are the complements of the original
    addresses a_2, ..., a_n.
    """
    if code.n == 0:
        raise ValueError("cannot flip an empty code")
    if closing.m != code.m:
        raise ValueError("closing union length does not match the code")
    last = code.addresses[-1].bits
    if closing.bits | last != closing.bits:
        raise ValueError("closing union must contain the last address")
    if closing.weight != code.r + 1:
        raise ValueError(f"closing union must have weight {code.r + 1}")
    if any(u.bits == closing.bits for u in consecutive_unions(code)):
        raise ValueError("closing union duplicates a consecutive union of the code")
    full = (1 << code.m) - 1
    path = [u.bits for u in consecutive_unions(code)] + [closing.bits]
    return GrayCode.from_bitmasks(code.m, code.m - code.r - 1, [full ^ u for u in path])


@dataclass(frozen=True)
class CombinationTrace:
    """How a recursive combination run assembled its output.

    ``component_lengths`` lists every block length in append order, final
    block included. ``consumed_pools`` lists, per iterative block, the pool
    whose occupancy target that block filled exactly. ``final_target`` and
    ``final_balance`` are the occupancy target handed to the closing search
    and the occupancy it achieved (both in the closing block's own pool
    order); ``deviation_bound`` is the guaranteed ceiling
    2*max|final_balance - final_target| + 2 on the full code's deviation,
    or None when the construction finished before a closing block was needed.
    """

    component_lengths: tuple[int, ...]
    consumed_pools: tuple[int, ...]
    final_target: tuple[int, ...]
    final_balance: tuple[int, ...]

    @property
    def deviation_bound(self) -> int | None:
        if not self.final_target:
            return None
        gap = max(abs(b - t) for b, t in zip(self.final_balance, self.final_target))
        return 2 * gap + 2

    def to_json_dict(self) -> dict:
        return {
            "component_lengths": list(self.component_lengths),
            "consumed_pools": list(self.consumed_pools),
            "final_target": list(self.final_target),
            "final_balance": list(self.final_balance),
            "deviation_bound": self.deviation_bound,
        }


class _RecursiveCombiner:
    """Backtracking driver for the iterative combination construction."""

    def __init__(self, m, r, n, w_ini, rng, budget):
        self.m = m
        self.r = r
        self.n = n
        self.final_width = 2 * r
        self.rng = rng
        self.budget = budget
        self.columns: list[int] = []
        self.union_set: set[int] = set()
        self.w_res = list(w_ini)
        self.i_res = set(range(1, m + 1))
        self.consumed: list[int] = []
        self.lengths: list[int] = []
        self.final_target: tuple[int, ...] = ()
        self.final_balance: tuple[int, ...] = ()

    def run(self) -> list[int]:
        first_len = self.w_res[self.m - 1]
        if not self._iterate(self.m, None, first_len):
            raise NoJoiningAddressError(
                f"all joining addresses exhausted for (m={self.m}, r={self.r}, n={self.n})"
            )
        return self.columns

    def trace(self) -> CombinationTrace:
        return CombinationTrace(
            tuple(self.lengths),
            tuple(self.consumed),
            self.final_target,
            self.final_balance,
        )

    # -- iteration ----------------------------------------------------------

    def _iterate(self, width: int, join_mask: int | None, comp_len: int) -> bool:
        """Place the block for the iteration with ``width`` active pools, then recurse."""
        if width == self.final_width:
            return self._final(width, join_mask)
        try:
            elem = _construct_masks(
                width - 1,
                self.r - 1,
                comp_len,
                None,
                balance_target(width - 1, self.r - 1, comp_len),
                self.rng,
                self.budget,
                True,
            )
        except BudgetExhaustedError:
            raise
        except ConstructionError:
            return False
        table = self._block_permutation(width, elem[0], join_mask)
        ones = 1 << (width - 1)
        placed = [_remap_mask(bits | ones, table) for bits in elem]
        consumed_pool = table[width - 1] + 1
        return self._append_block(placed, comp_len, consumed_pool, width)

    def _append_block(self, placed, comp_len, consumed_pool, width) -> bool:
        added = self._push_columns(placed)
        for bits in placed:
            rem = bits
            while rem:
                low = rem & -rem
                self.w_res[low.bit_length() - 1] -= 1
                rem ^= low
        self.i_res.discard(consumed_pool)
        self.consumed.append(consumed_pool)
        self.lengths.append(comp_len)

        # A block that lands exactly on the target length finishes the build
        # without a closing regime.
        if len(self.columns) == self.n or self._descend(width - 1):
            return True

        self.lengths.pop()
        self.consumed.pop()
        self.i_res.add(consumed_pool)
        for bits in placed:
            rem = bits
            while rem:
                low = rem & -rem
                self.w_res[low.bit_length() - 1] += 1
                rem ^= low
        self._pop_columns(placed, added)
        return False

    def _descend(self, width: int) -> bool:
        for join_mask, next_len in self._join_candidates(width):
            if self._iterate(width, join_mask, next_len):
                return True
        return False

    def _final(self, width: int, join_mask: int | None) -> bool:
        """Closing regime: one balance-targeted search over the remaining pools."""
        need = self.n - len(self.columns)
        if need == 0:
            return True
        if need < 0 or need > length_bound(width, self.r):
            return False
        start = 0
        for p in self.rng.sample(range(width), self.r):
            start |= 1 << p
        table = self._final_permutation(width, start, join_mask)
        target = tuple(self.w_res[table[i]] for i in range(width))
        try:
            elem = _construct_masks(
                width, self.r, need, start, target, self.rng, self.budget, True
            )
        except BudgetExhaustedError:
            raise
        except ConstructionError:
            return False
        placed = [_remap_mask(bits, table) for bits in elem]
        self._push_columns(placed)
        self.lengths.append(need)
        self.final_target = target
        counts = [0] * width
        for bits in elem:
            rem = bits
            while rem:
                low = rem & -rem
                counts[low.bit_length() - 1] += 1
                rem ^= low
        self.final_balance = tuple(counts)
        return True

    # -- joining addresses ----------------------------------------------------

    def _join_candidates(self, width: int) -> list[tuple[int, int]]:
        """Admissible first addresses for the next block, best occupancy first.

        A joining address must use only still-active pools, sit at Hamming
        distance 2 from the last placed address, and form a fresh union with
        it. Since every column of the block just placed contains the pool that
        block consumed, the joining address is that last address with the
        consumed pool swapped for another active pool. Candidates are ordered
        by the residual occupancy of their largest pool, descending, with
        index-order tie-breaks; that residual is the next block's length.
        """
        last = self.columns[-1]
        core = last & ~(1 << (self.consumed[-1] - 1))
        remaining = self.n - len(self.columns)
        out = []
        for z in sorted(self.i_res):
            bit = 1 << (z - 1)
            if last & bit:
                continue
            candidate = core | bit
            if (last | candidate) in self.union_set:
                continue
            next_len = self.w_res[candidate.bit_length() - 1]
            if width > self.final_width:
                if next_len < 1 or next_len > remaining:
                    continue
                if next_len > length_bound(width - 1, self.r - 1):
                    continue
            out.append((candidate, next_len))
        out.sort(key=lambda t: -t[1])
        return out

    # -- permutations ---------------------------------------------------------

    def _block_permutation(self, width, first_elem, join_mask) -> list[int]:
        """Pool relabeling for an iterative block (0-based old -> new table).

        The block's rows 1..width map one-to-one onto the active pools so
        that the augmented first address lands on the joining address with
        its all-one row on the join's largest pool; dead rows map onto the
        already-consumed pools. The first block keeps the identity.
        """
        if join_mask is None:
            return list(range(self.m))
        src = list(indices_from_mask(first_elem)) + [width]
        dst = list(indices_from_mask(join_mask))
        return self._assemble_permutation(width, src, dst)

    def _final_permutation(self, width, start_mask, join_mask) -> list[int]:
        src = list(indices_from_mask(start_mask))
        dst = list(indices_from_mask(join_mask))
        return self._assemble_permutation(width, src, dst)

    def _assemble_permutation(self, width, src, dst) -> list[int]:
        table = [-1] * self.m
        for s, d in zip(src, dst):
            table[s - 1] = d - 1
        rest_src = [i for i in range(1, width + 1) if i not in set(src)]
        rest_dst = sorted(self.i_res - set(dst))
        for s, d in zip(rest_src, rest_dst):
            table[s - 1] = d - 1
        dead_dst = sorted(set(range(1, self.m + 1)) - self.i_res)
        for s, d in zip(range(width + 1, self.m + 1), dead_dst):
            table[s - 1] = d - 1
        return table

    # -- column bookkeeping ----------------------------------------------------

    def _push_columns(self, placed: list[int]) -> list[int]:
        added = []
        if self.columns:
            added.append(self.columns[-1] | placed[0])
        for k in range(len(placed) - 1):
            added.append(placed[k] | placed[k + 1])
        for u in added:
            if u in self.union_set:
                raise RuntimeError("internal error: duplicate union while combining")
            self.union_set.add(u)
        self.columns.extend(placed)
        return added

    def _pop_columns(self, placed: list[int], added: list[int]) -> None:
        del self.columns[len(self.columns) - len(placed):]
        for u in added:
            self.union_set.discard(u)


def rcbba_detailed(
    m: int,
    r: int,
    n: int,
    *,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    time_limit: float | None = None,
) -> tuple[GrayCode, CombinationTrace]:
    """Recursive combination with embedded branch-and-bound, with its trace.

    Iteration j runs from m downward: each step builds a (j-1, r-1) block
    whose length is the residual occupancy of one pool, augments it with one
    all-one row and m-j all-zero rows, and permutes it so the all-one row
    fills exactly that pool. At j = 2r the remaining length is built by a
    single balance-targeted search and the occupancy residuals become its
    per-pool target. Dead ends backtrack over the candidate joining
    addresses; the node budget is shared by every embedded search.

    For r = 1, for m <= 2r, and for n*r < m the iterative regime degenerates
    and the whole code is built by one balance-targeted search.
    """
    if not 1 <= r < m:
        raise ValueError(f"weight must satisfy 1 <= r < m, got r={r}, m={m}")
    if n < 1:
        raise ValueError(f"length must be positive, got {n}")
    if n > length_bound(m, r):
        raise InfeasibleError(
            f"n={n} exceeds the length bound {length_bound(m, r)} for (m={m}, r={r})"
        )
    rng = random.Random(seed)
    state = SearchBudget(budget, time_limit)
    w_ini = balance_target(m, r, n)

    if m <= 2 * r or r == 1 or w_ini[m - 1] == 0:
        masks = _construct_masks(m, r, n, None, w_ini, rng, state, True)
        code = GrayCode.from_bitmasks(m, r, masks)
        trace = CombinationTrace(
            (n,), (), tuple(w_ini), balance_of(code).counts
        )
    else:
        builder = _RecursiveCombiner(m, r, n, w_ini, rng, state)
        masks = builder.run()
        code = GrayCode.from_bitmasks(m, r, masks)
        trace = builder.trace()

    report = validate(code)
    if not report.is_valid or code.n != n:
        raise RuntimeError("internal error: combined code fails validation")
    return code, trace


def rcbba(
    m: int,
    r: int,
    n: int,
    *,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
    time_limit: float | None = None,
) -> GrayCode:
    """Like ``rcbba_detailed`` but returning only the code."""
    code, _ = rcbba_detailed(m, r, n, seed=seed, budget=budget, time_limit=time_limit)
    return code


def build_maximal(
    m: int,
    r: int,
    *,
    seed: int = 0,
    budget: int = DEFAULT_BUDGET,
) -> GrayCode:
    """Construct a code meeting the length bound exactly.

    For m >= 2r+1 the code has length C(m, r): it is assembled recursively by
    combining the maximal (m-1, r-1) code with the row-permuted maximal
    (m-1, r) code, down to singleton chains at weight 1 and searched bases at
    m = 2r+1. For m <= 2r the bound is C(m, r+1)+1 and the code is the
    complement of a maximal union path of the (m, m-r-1) construction,
    extended by one closing union at each end. Intended for small parameters;
    the searched bases grow combinatorially.
    """
    if r < 1:
        raise ValueError("weight must be at least 1")
    if m < r + 1:
        raise ValueError(f"pool count must be at least r+1, got m={m}, r={r}")
    rng = random.Random(seed)
    state = SearchBudget(budget)
    memo: dict[tuple[int, int], tuple[GrayCode, Address]] = {}
    if m >= 2 * r + 1:
        code, _ = _maximal_with_closing(m, r, memo, rng, state)
    else:
        code = _maximal_by_flip(m, r, memo, rng, state)
    report = validate(code)
    if not report.is_valid or code.n != length_bound(m, r):
        raise RuntimeError("internal error: maximal construction failed validation")
    return code


def _maximal_with_closing(m, r, memo, rng, budget) -> tuple[GrayCode, Address]:
    """Maximal (m, r) code for m >= 2r+1 together with a closing union."""
    key = (m, r)
    if key in memo:
        return memo[key]
    if r == 1:
        code = GrayCode.from_bitmasks(m, 1, [1 << i for i in range(m)])
        closing = Address.from_index_set(m, (1, m))
    elif m == 2 * r + 1:
        code, closing = _maximal_base(m, r, rng, budget)
    else:
        light, light_closing = _maximal_with_closing(m - 1, r - 1, memo, rng, budget)
        heavy, heavy_closing = _maximal_with_closing(m - 1, r, memo, rng, budget)
        perm = _alignment_permutation(
            heavy.addresses[0].index_set, light_closing.index_set, m - 1
        )
        code = combine_pair(light, apply_row_permutation(heavy, perm))
        # The heavy code's closing union survives the permutation, with the
        # appended row at zero.
        table = [p - 1 for p in perm]
        closing = Address(m, _remap_mask(heavy_closing.bits, table))
    memo[key] = (code, closing)
    return code, closing


def _maximal_base(m, r, rng, budget) -> tuple[GrayCode, Address]:
    """Search a maximal (2r+1, r) code that admits a closing union."""
    n = comb(m, r)
    target = balance_target(m, r, n)
    for _ in range(16):
        masks = _construct_masks(m, r, n, None, target, rng, budget, True)
        code = GrayCode.from_bitmasks(m, r, masks)
        for candidate in (code, GrayCode.from_bitmasks(m, r, masks[::-1])):
            try:
                return candidate, find_closing_union(candidate)
            except ClosingUnionNotFoundError:
                continue
    raise ClosingUnionNotFoundError(
        f"no maximal ({m},{r}) base with a closing union found within 16 attempts"
    )


def _alignment_permutation(src: Sequence[int], dst: Sequence[int], m: int) -> list[int]:
    """Permutation of 1..m sending the sorted ``src`` onto the sorted ``dst`` pairwise."""
    perm = [0] * m
    src = sorted(src)
    dst = sorted(dst)
    for s, d in zip(src, dst):
        perm[s - 1] = d
    rest_src = [i for i in range(1, m + 1) if i not in set(src)]
    rest_dst = [i for i in range(1, m + 1) if i not in set(dst)]
    for s, d in zip(rest_src, rest_dst):
        perm[s - 1] = d
    return perm


def _maximal_by_flip(m, r, memo, rng, budget) -> GrayCode:
    """Maximal (m, r) code for r+1 <= m <= 2r via a complemented union path."""
    full = (1 << m) - 1
    if r == m - 1:
        # One union fits: the all-one vector between the complements of two singletons.
        return GrayCode.from_bitmasks(m, r, [full ^ 1, full ^ 2])
    src_r = m - r - 1
    src, tail = _maximal_with_closing(m, src_r, memo, rng, budget)
    used = {u.bits for u in consecutive_unions(src)} | {tail.bits}
    first = src.addresses[0].bits
    head = None
    for z in range(m):
        bit = 1 << z
        if first & bit:
            continue
        candidate = first | bit
        if candidate not in used:
            head = candidate
            break
    if head is None:
        raise ClosingUnionNotFoundError(
            f"no leading closing union for the maximal ({m},{src_r}) source"
        )
    path = [head] + [u.bits for u in consecutive_unions(src)] + [tail.bits]
    return GrayCode.from_bitmasks(m, r, [full ^ u for u in path])
