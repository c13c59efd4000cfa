"""Exhaustive ground truth for small parameter sets.

Complete depth-first enumerations over all weight-r addresses, used to pin
down the exact maximum code length and the exact optimum balance deviation
that the heuristic constructors are measured against. Exponential by design;
keep the address count small.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from .codes import GrayCode, length_bound
from .errors import InfeasibleError, NodeLimitError

DEFAULT_NODE_LIMIT = 10**7


@dataclass(frozen=True)
class OracleResult:
    """Outcome of an exhaustive maximum-length search.

    ``is_exact`` is False only when the node limit cut the search short, in
    which case ``max_length`` is a lower bound witnessed by ``witness``.
    """

    max_length: int
    witness: GrayCode
    search_nodes: int
    is_exact: bool


class _LimitReached(Exception):
    pass


class _Done(Exception):
    pass


def _neighbors(m: int, r: int) -> dict[int, list[tuple[int, int]]]:
    """For each weight-r mask, the (next address, union) moves in index order."""
    table: dict[int, list[tuple[int, int]]] = {}
    for combo in combinations(range(m), r):
        a = 0
        for c in combo:
            a |= 1 << c
        moves = []
        for z in range(m):
            zbit = 1 << z
            if a & zbit:
                continue
            u = a | zbit
            for x in combo[::-1]:
                moves.append((u ^ (1 << x), u))
        moves.sort(key=lambda bu: _index_key(bu[0]))
        table[a] = moves
    return table


def _index_key(mask: int) -> tuple[int, ...]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


def exhaustive_max(
    m: int,
    r: int,
    node_limit: int = DEFAULT_NODE_LIMIT,
    fix_first_address: bool = True,
) -> OracleResult:
    """Exact maximum code length by complete depth-first enumeration.

    Explores addresses in ascending index order with visited-address and
    visited-union pruning. By row-permutation symmetry the first address can
    be fixed to {1..r} without changing the maximum, which is the default.
    The search stops early once a code meets the length bound, since nothing
    longer can exist.
    """
    if not 1 <= r <= m:
        raise ValueError(f"weight {r} out of range 1..{m}")
    bound = length_bound(m, r)
    table = _neighbors(m, r)
    starts = (
        [sum(1 << i for i in range(r))]
        if fix_first_address
        else sorted(table, key=_index_key)
    )

    best: list[int] = []
    nodes = 0
    path: list[int] = []
    used_a: set[int] = set()
    used_u: set[int] = set()

    def dfs(a: int) -> None:
        nonlocal nodes, best
        nodes += 1
        if nodes > node_limit:
            raise _LimitReached
        path.append(a)
        used_a.add(a)
        if len(path) > len(best):
            best = list(path)
            if len(best) == bound:
                raise _Done
        for b, u in table[a]:
            if b in used_a or u in used_u:
                continue
            used_u.add(u)
            dfs(b)
            used_u.discard(u)
        path.pop()
        used_a.discard(a)

    exact = True
    try:
        for start in starts:
            dfs(start)
    except _Done:
        pass
    except _LimitReached:
        exact = False

    witness = GrayCode.from_bitmasks(m, r, best)
    return OracleResult(len(best), witness, nodes, exact)


def exhaustive_best_balance(
    m: int,
    r: int,
    n: int,
    node_limit: int = DEFAULT_NODE_LIMIT,
    fix_first_address: bool = False,
) -> GrayCode:
    """A valid (m, r, n) code of provably minimum deviation.

    Enumerates every valid code of length n, pruning branches whose best
    reachable deviation already matches the incumbent, and stops early when
    the parity lower bound (0 when n*r divides by m, else 1) is attained.
    Starts are not symmetry-reduced by default. Raises NodeLimitError when
    the limit is hit before the enumeration finishes and InfeasibleError
    when no valid code of that length exists.
    """
    if not 1 <= r < m:
        raise ValueError(f"weight must satisfy 1 <= r < m, got r={r}, m={m}")
    if n < 1:
        raise ValueError(f"length must be positive, got {n}")
    if n > length_bound(m, r):
        raise InfeasibleError(
            f"n={n} exceeds the length bound {length_bound(m, r)} for (m={m}, r={r})"
        )
    floor_dev = 0 if (n * r) % m == 0 else 1
    table = _neighbors(m, r)
    starts = (
        [sum(1 << i for i in range(r))]
        if fix_first_address
        else sorted(table, key=_index_key)
    )

    best_dev: int | None = None
    best_code: list[int] | None = None
    nodes = 0
    path: list[int] = []
    counts = [0] * m
    used_a: set[int] = set()
    used_u: set[int] = set()

    def dfs(a: int) -> None:
        nonlocal nodes, best_dev, best_code
        nodes += 1
        if nodes > node_limit:
            raise _LimitReached
        path.append(a)
        used_a.add(a)
        bits = a
        while bits:
            low = bits & -bits
            counts[low.bit_length() - 1] += 1
            bits ^= low
        try:
            if len(path) == n:
                dev = max(counts) - min(counts)
                if best_dev is None or dev < best_dev:
                    best_dev = dev
                    best_code = list(path)
                    if dev == floor_dev:
                        raise _Done
                return
            # A pool already ahead by more than the remaining additions can
            # never be caught; prune when even the optimistic finish loses.
            if best_dev is not None and max(counts) - min(counts) - (n - len(path)) >= best_dev:
                return
            for b, u in table[a]:
                if b in used_a or u in used_u:
                    continue
                used_u.add(u)
                dfs(b)
                used_u.discard(u)
        finally:
            path.pop()
            used_a.discard(a)
            bits = a
            while bits:
                low = bits & -bits
                counts[low.bit_length() - 1] -= 1
                bits ^= low

    try:
        for start in starts:
            dfs(start)
    except _Done:
        pass
    except _LimitReached:
        partial = (
            GrayCode.from_bitmasks(m, r, best_code) if best_code is not None else None
        )
        raise NodeLimitError(
            f"node limit {node_limit} reached before the enumeration finished",
            best=partial,
        )

    if best_code is None:
        raise InfeasibleError(f"no valid ({m},{r},{n}) code exists")
    return GrayCode.from_bitmasks(m, r, best_code)
