"""Bitmask subsets of [n] and canonically ordered families of them.

A subset of the ground set [n] = {1, ..., n} is a plain int bitmask in
which bit i-1 records membership of element i; ground sizes up to 64
keep every subset inside one machine word.  A :class:`SetFamily` holds
deduplicated member masks sorted by (cardinality, mask value) -- the
canonical member order that makes every report and golden file
deterministic.

Text format: a header line ``n=<int>``, then one set per line as
comma-separated elements of {1..n}, with ``-`` denoting the empty set
and ``#`` starting a comment line.  A JSON mirror
``{"n": int, "sets": [[int, ...], ...]}`` is provided for tooling.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator

import numpy as np

MAX_GROUND = 64
# Full 2^n lookup tables stop being desk-scale beyond this.
MAX_TABLE_N = 24


class FamilyFormatError(ValueError):
    """Malformed family text or JSON; remembers the offending line."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(message if line is None else f"line {line}: {message}")


def member_key(mask: int) -> tuple[int, int]:
    """Canonical sort key for subsets: cardinality first, then mask value."""
    return (mask.bit_count(), mask)


def mask_of(elements: Iterable[int], n: int) -> int:
    """Pack elements of {1..n} into a bitmask."""
    mask = 0
    for e in elements:
        e = int(e)
        if not 1 <= e <= n:
            raise ValueError(f"element {e} out of range 1..{n}")
        mask |= 1 << (e - 1)
    return mask


def elements_of(mask: int) -> tuple[int, ...]:
    """Unpack a bitmask into its sorted 1-based elements."""
    return tuple(i + 1 for i in range(mask.bit_length()) if mask >> i & 1)


def format_subset(mask: int) -> str:
    if mask == 0:
        return "-"
    return ",".join(str(e) for e in elements_of(mask))


@dataclass(frozen=True)
class SetFamily:
    """Duplicate-free, canonically ordered family of subsets of [n].

    Instances normalize their member list on construction and are
    immutable afterwards, so they are safe to share across threads.
    """

    n: int
    members: tuple[int, ...] = ()

    def __post_init__(self):
        if not 1 <= self.n <= MAX_GROUND:
            raise ValueError(f"ground size must be in 1..{MAX_GROUND}, got {self.n}")
        full = (1 << self.n) - 1
        for m in self.members:
            if not 0 <= m <= full:
                raise ValueError(f"mask {m} outside ground set of size {self.n}")
        object.__setattr__(self, "members", tuple(sorted(set(self.members), key=member_key)))

    @classmethod
    def of(cls, n: int, sets: Iterable[Iterable[int]]) -> "SetFamily":
        """Build a family from iterables of 1-based elements."""
        return cls(n, tuple(mask_of(s, n) for s in sets))

    @cached_property
    def _member_set(self) -> frozenset[int]:
        return frozenset(self.members)

    @property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    def __contains__(self, mask: int) -> bool:
        return mask in self._member_set

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def add(self, mask: int) -> "SetFamily":
        return SetFamily(self.n, self.members + (mask,))

    def without(self, mask: int) -> "SetFamily":
        return SetFamily(self.n, tuple(m for m in self.members if m != mask))

    def sets(self) -> tuple[tuple[int, ...], ...]:
        """Members as element tuples, in canonical order."""
        return tuple(elements_of(m) for m in self.members)

    def __repr__(self) -> str:
        shown = ", ".join("{" + ",".join(map(str, elements_of(m))) + "}" for m in self.members)
        return f"SetFamily(n={self.n}, {{{shown}}})"


def complement_family(f: SetFamily) -> SetFamily:
    """Replace every member by its set complement inside [n] (an involution)."""
    full = f.full_mask
    return SetFamily(f.n, tuple(full ^ m for m in f.members))


def minimal_sets(f: SetFamily) -> SetFamily:
    """Members of f with no strict subset in f; always an antichain."""
    out = []
    for m in f.members:
        c = m.bit_count()
        dominated = False
        for s in f.members:
            if s.bit_count() >= c:
                break  # members are sorted by cardinality
            if s & m == s:
                dominated = True
                break
        if not dominated:
            out.append(m)
    return SetFamily(f.n, tuple(out))


def maximal_sets(f: SetFamily) -> SetFamily:
    """Members of f with no strict superset in f; always an antichain."""
    out = []
    for m in f.members:
        c = m.bit_count()
        dominated = False
        for s in reversed(f.members):
            if s.bit_count() <= c:
                break
            if s & m == m:
                dominated = True
                break
        if not dominated:
            out.append(m)
    return SetFamily(f.n, tuple(out))


_HEADER_RE = re.compile(r"n\s*=\s*(\d+)")


def parse_family(text: str, strict: bool = False) -> SetFamily:
    """Parse the family text format.

    Duplicate sets raise when ``strict`` is set and otherwise produce a
    warning and are dropped.  All other format problems raise
    :class:`FamilyFormatError` with the 1-based line number.
    """
    n = None
    masks: list[int] = []
    seen: set[int] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            m = _HEADER_RE.fullmatch(line)
            if not m:
                raise FamilyFormatError("expected header 'n=<int>' before any set line", lineno)
            n = int(m.group(1))
            if not 1 <= n <= MAX_GROUND:
                raise FamilyFormatError(f"ground size must be in 1..{MAX_GROUND}, got {n}", lineno)
            continue
        if line == "-":
            mask = 0
        else:
            try:
                elems = [int(p.strip()) for p in line.split(",")]
            except ValueError:
                raise FamilyFormatError(f"malformed set line {line!r}", lineno) from None
            try:
                mask = mask_of(elems, n)
            except ValueError as exc:
                raise FamilyFormatError(str(exc), lineno) from None
        if mask in seen:
            if strict:
                raise FamilyFormatError(f"duplicate set {format_subset(mask)!r}", lineno)
            warnings.warn(f"line {lineno}: duplicate set {format_subset(mask)!r} dropped")
            continue
        seen.add(mask)
        masks.append(mask)
    if n is None:
        raise FamilyFormatError("missing header 'n=<int>'")
    return SetFamily(n, tuple(masks))


def serialize_family(f: SetFamily) -> str:
    """Render a family in the text format, members in canonical order."""
    lines = [f"n={f.n}"]
    lines.extend(format_subset(m) for m in f.members)
    return "\n".join(lines) + "\n"


def family_to_json(f: SetFamily) -> dict:
    return {"n": f.n, "sets": [list(elements_of(m)) for m in f.members]}


def family_from_json(obj: dict, strict: bool = False) -> SetFamily:
    try:
        n = int(obj["n"])
        raw_sets = obj["sets"]
    except (KeyError, TypeError, ValueError) as exc:
        raise FamilyFormatError(f"bad family JSON: {exc}") from None
    if not 1 <= n <= MAX_GROUND:
        raise FamilyFormatError(f"ground size must be in 1..{MAX_GROUND}, got {n}")
    masks = []
    seen: set[int] = set()
    for s in raw_sets:
        try:
            mask = mask_of(s, n)
        except ValueError as exc:
            raise FamilyFormatError(str(exc)) from None
        if mask in seen:
            if strict:
                raise FamilyFormatError(f"duplicate set {format_subset(mask)!r}")
            warnings.warn(f"duplicate set {format_subset(mask)!r} dropped")
            continue
        seen.add(mask)
        masks.append(mask)
    return SetFamily(n, tuple(masks))


def superset_table(n: int, masks: Iterable[int]) -> np.ndarray:
    """Boolean array t of length 2^n with t[x] iff some given mask contains x.

    Built by the usual subset-sum sweep, one OR pass per bit.
    """
    if n > MAX_TABLE_N:
        raise ValueError(f"lookup table needs n <= {MAX_TABLE_N}, got {n}")
    t = np.zeros(1 << n, dtype=bool)
    idx = list(masks)
    if idx:
        t[idx] = True
    for k in range(n):
        t3 = t.reshape(-1, 2, 1 << k)
        t3[:, 0, :] |= t3[:, 1, :]
    return t


def subset_table(n: int, masks: Iterable[int]) -> np.ndarray:
    """Boolean array t of length 2^n with t[x] iff some given mask is inside x."""
    if n > MAX_TABLE_N:
        raise ValueError(f"lookup table needs n <= {MAX_TABLE_N}, got {n}")
    t = np.zeros(1 << n, dtype=bool)
    idx = list(masks)
    if idx:
        t[idx] = True
    for k in range(n):
        t3 = t.reshape(-1, 2, 1 << k)
        t3[:, 1, :] |= t3[:, 0, :]
    return t
