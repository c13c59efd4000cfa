"""Core model: addresses, codes, incidence matrices, and balance statistics.

An address is a fixed-length binary vector stored as an int bitmask where bit
``i - 1`` holds pool ``i``. Pool indices are 1-based in every public
interface; the bitmask layout is internal. All types are immutable values.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import comb
from pathlib import Path
from typing import Iterable, Sequence


def mask_from_indices(indices: Iterable[int]) -> int:
    """Pack 1-based pool indices into a bitmask."""
    mask = 0
    for i in indices:
        mask |= 1 << (i - 1)
    return mask


def indices_from_mask(mask: int) -> tuple[int, ...]:
    """Unpack a bitmask into sorted 1-based pool indices."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length())
        mask ^= low
    return tuple(out)


@dataclass(frozen=True)
class Address:
    """Binary vector of length ``m`` over pools, stored as a bitmask."""

    m: int
    bits: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"pool count must be at least 1, got {self.m}")
        if not 0 <= self.bits < (1 << self.m):
            raise ValueError(f"bitmask {self.bits:#x} out of range for m={self.m}")

    @classmethod
    def from_index_set(cls, m: int, indices: Iterable[int]) -> "Address":
        indices = tuple(indices)
        for i in indices:
            if not 1 <= i <= m:
                raise ValueError(f"pool index {i} out of range 1..{m}")
        return cls(m, mask_from_indices(indices))

    @classmethod
    def from_bit_vector(cls, bits: Sequence[int]) -> "Address":
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bit vector entries must be 0 or 1")
        mask = 0
        for i, b in enumerate(bits):
            if b:
                mask |= 1 << i
        return cls(len(bits), mask)

    @property
    def weight(self) -> int:
        return self.bits.bit_count()

    @property
    def index_set(self) -> tuple[int, ...]:
        return indices_from_mask(self.bits)

    def bit_vector(self) -> tuple[int, ...]:
        return tuple((self.bits >> i) & 1 for i in range(self.m))

    def __repr__(self) -> str:
        return f"Address(m={self.m}, {{{','.join(map(str, self.index_set))}}})"


def or_sum(a: Address, b: Address) -> Address:
    """Bitwise OR of two equal-length binary vectors (index-set union)."""
    if a.m != b.m:
        raise ValueError(f"length mismatch: {a.m} != {b.m}")
    return Address(a.m, a.bits | b.bits)


def hamming_distance(a: Address, b: Address) -> int:
    """Number of positions where two equal-length binary vectors differ."""
    if a.m != b.m:
        raise ValueError(f"length mismatch: {a.m} != {b.m}")
    return (a.bits ^ b.bits).bit_count()


@dataclass(frozen=True)
class BalanceVector:
    """Per-pool occupancy counts of a code."""

    counts: tuple[int, ...]

    @property
    def deviation(self) -> int:
        """Spread between the most and least occupied pool (0 for empty)."""
        if not self.counts:
            return 0
        return max(self.counts) - min(self.counts)


@dataclass(frozen=True)
class GrayCode:
    """Ordered sequence of addresses over ``m`` pools with declared weight ``r``.

    The constructor enforces shape only (every address has length ``m``).
    Whether the sequence actually satisfies the code constraints, including
    that every address has weight ``r``, is reported by ``validate``; partial
    and invalid sequences are legal values during construction.
    """

    m: int
    r: int
    addresses: tuple[Address, ...]

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"pool count must be at least 1, got {self.m}")
        if self.r < 0 or self.r > self.m:
            raise ValueError(f"address weight {self.r} out of range 0..{self.m}")
        for a in self.addresses:
            if a.m != self.m:
                raise ValueError(f"address length {a.m} does not match m={self.m}")
        object.__setattr__(self, "addresses", tuple(self.addresses))

    @classmethod
    def from_bitmasks(cls, m: int, r: int, masks: Iterable[int]) -> "GrayCode":
        return cls(m, r, tuple(Address(m, x) for x in masks))

    @classmethod
    def from_index_sets(cls, m: int, r: int, sets: Iterable[Iterable[int]]) -> "GrayCode":
        return cls(m, r, tuple(Address.from_index_set(m, s) for s in sets))

    @property
    def n(self) -> int:
        return len(self.addresses)

    def bitmasks(self) -> tuple[int, ...]:
        return tuple(a.bits for a in self.addresses)


def consecutive_unions(code: GrayCode) -> tuple[Address, ...]:
    """OR-sums of each adjacent address pair; empty for codes shorter than 2."""
    masks = code.bitmasks()
    return tuple(
        Address(code.m, masks[j] | masks[j + 1]) for j in range(len(masks) - 1)
    )


def balance_of(code: GrayCode) -> BalanceVector:
    """Count, per pool, how many addresses of the code use it."""
    counts = [0] * code.m
    for a in code.addresses:
        bits = a.bits
        while bits:
            low = bits & -bits
            counts[low.bit_length() - 1] += 1
            bits ^= low
    return BalanceVector(tuple(counts))


def length_bound(m: int, r: int) -> int:
    """Maximum possible code length for the given pool count and weight."""
    if r < 1 or r > m:
        raise ValueError(f"weight {r} out of range 1..{m}")
    return min(comb(m, r), comb(m, r + 1) + 1)


@dataclass(frozen=True)
class IncidenceMatrix:
    """Binary matrix with one row per pool and one column per item."""

    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if not self.rows:
            raise ValueError("incidence matrix must have at least one row")
        width = len(self.rows[0])
        for i, row in enumerate(self.rows):
            if len(row) != width:
                raise ValueError(f"ragged row {i + 1}: {len(row)} entries, expected {width}")
            if any(x not in (0, 1) for x in row):
                raise ValueError(f"non-binary entry in row {i + 1}")
        object.__setattr__(self, "rows", tuple(tuple(row) for row in self.rows))

    @property
    def m(self) -> int:
        return len(self.rows)

    @property
    def n(self) -> int:
        return len(self.rows[0])


def to_incidence(code: GrayCode) -> IncidenceMatrix:
    """Transpose a code into its incidence matrix (column j = address j)."""
    rows = tuple(
        tuple((a.bits >> i) & 1 for a in code.addresses) for i in range(code.m)
    )
    return IncidenceMatrix(rows)


def from_incidence(matrix: IncidenceMatrix, r: int | None = None) -> GrayCode:
    """Read a code off an incidence matrix.

    When ``r`` is not given it is inferred from the first column (0 for an
    empty matrix); weight mismatches are left for the validator to report.
    """
    m, n = matrix.m, matrix.n
    masks = []
    for j in range(n):
        mask = 0
        for i in range(m):
            if matrix.rows[i][j]:
                mask |= 1 << i
        masks.append(mask)
    if r is None:
        r = masks[0].bit_count() if masks else 0
    return GrayCode.from_bitmasks(m, r, masks)


def incidence_to_csv(matrix: IncidenceMatrix) -> str:
    """Serialize as one comma-separated 0/1 line per pool, no header."""
    return "\n".join(",".join(str(x) for x in row) for row in matrix.rows) + "\n"


def incidence_from_csv(text: str) -> IncidenceMatrix:
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line:
            continue
        cells = [cell.strip() for cell in line.split(",")]
        row = []
        for cell in cells:
            if cell not in ("0", "1"):
                raise ValueError(f"line {lineno}: entry {cell!r} is not 0 or 1")
            row.append(int(cell))
        rows.append(tuple(row))
    return IncidenceMatrix(tuple(rows))


def code_to_json_dict(code: GrayCode, extra: dict | None = None) -> dict:
    """JSON object for a code; ``balance`` and ``deviation`` are derived fields."""
    balance = balance_of(code)
    obj = {
        "m": code.m,
        "r": code.r,
        "n": code.n,
        "addresses": [list(a.index_set) for a in code.addresses],
        "balance": list(balance.counts),
        "deviation": balance.deviation,
    }
    if extra:
        obj.update(extra)
    return obj


def code_from_json_dict(obj: dict) -> GrayCode:
    """Rebuild a code from its JSON object; derived fields are recomputed, not trusted."""
    try:
        m = int(obj["m"])
        r = int(obj["r"])
        sets = obj["addresses"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed code object: missing field {exc}") from exc
    if "n" in obj and int(obj["n"]) != len(sets):
        raise ValueError(f"declared n={obj['n']} but {len(sets)} addresses present")
    return GrayCode.from_index_sets(m, r, sets)


def save_code(code: GrayCode, path: str | Path, fmt: str | None = None, extra: dict | None = None) -> None:
    """Write a code to ``path`` as JSON or CSV, inferred from the extension."""
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "json")
    if fmt == "csv":
        path.write_text(incidence_to_csv(to_incidence(code)))
    elif fmt == "json":
        path.write_text(json.dumps(code_to_json_dict(code, extra), indent=2) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r} (expected 'csv' or 'json')")


def load_code(path: str | Path, fmt: str | None = None, r: int | None = None) -> GrayCode:
    """Read a code from a JSON or CSV file, inferred from the extension."""
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "json")
    text = path.read_text()
    if fmt == "csv":
        return from_incidence(incidence_from_csv(text), r=r)
    if fmt == "json":
        return code_from_json_dict(json.loads(text))
    raise ValueError(f"unknown format {fmt!r} (expected 'csv' or 'json')")
