"""Induced-copy detection inside subset families.

An embedding maps pattern points injectively to family member indices
so that the pattern order matches mask inclusion exactly: comparable
points map to nested sets and incomparable points map to
inclusion-incomparable sets.

The generic detector backtracks over the pattern points in a fixed
linear extension (minimal points first, ties by point index) and tries
candidate members in canonical order, so the first witness found is the
lexicographically least along that search order.  A specialized diamond
detector scans incomparable pairs instead, which is much cheaper for
the 4-point pattern; both return identical witnesses on the diamond
because their traversal orders coincide.
"""

from __future__ import annotations

from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache

from .families import SetFamily, elements_of, member_key
from .posets import PatternPoset, linear_extension, make_diamond

DIAMOND = make_diamond()

_BELOW = 0  # earlier point lies strictly below the current one
_INCOMP = 1


@dataclass(frozen=True)
class Embedding:
    """Witness of an induced copy: pattern point -> family member index."""

    family: SetFamily
    pattern: PatternPoset
    mapping: tuple[int, ...]

    def image_masks(self) -> tuple[int, ...]:
        return tuple(self.family.members[i] for i in self.mapping)

    def uses(self, mask: int) -> bool:
        return mask in self.image_masks()

    def to_json(self) -> dict:
        return {
            "pattern": self.pattern.name or f"poset:{self.pattern.size}",
            "map": [
                {"point": pt, "set": list(elements_of(self.family.members[idx]))}
                for pt, idx in enumerate(self.mapping)
            ],
        }


def validate_embedding(emb: Embedding) -> str | None:
    """Independent re-check of the embedding definition; None when valid."""
    p, f, mp = emb.pattern, emb.family, emb.mapping
    if len(mp) != p.size:
        return "mapping length differs from pattern size"
    if any(not 0 <= i < len(f.members) for i in mp):
        return "mapping index out of range"
    if len(set(mp)) != len(mp):
        return "mapping is not injective"
    for a in range(p.size):
        for b in range(p.size):
            ma, mb = f.members[mp[a]], f.members[mp[b]]
            if p.leq[a][b] != (ma & mb == ma):
                return f"relation mismatch at pattern pair ({a}, {b})"
    return None


class _Plan:
    """Search order and per-slot constraints for one pattern."""

    __slots__ = ("size", "order", "slot_of_point", "checks")

    def __init__(self, p: PatternPoset):
        self.size = p.size
        self.order = linear_extension(p)
        self.slot_of_point = {pt: slot for slot, pt in enumerate(self.order)}
        checks: list[tuple[tuple[int, int], ...]] = []
        for slot, pt in enumerate(self.order):
            row = []
            for earlier in range(slot):
                ept = self.order[earlier]
                if p.leq[ept][pt]:
                    row.append((earlier, _BELOW))
                elif p.leq[pt][ept]:  # pragma: no cover - excluded by linear extension
                    raise AssertionError("linear extension placed an upper point first")
                else:
                    row.append((earlier, _INCOMP))
            checks.append(tuple(row))
        self.checks = tuple(checks)


@lru_cache(maxsize=None)
def _plan(p: PatternPoset) -> _Plan:
    return _Plan(p)


def _search(members: tuple[int, ...], plan: _Plan, pinned: dict[int, int] | None = None):
    """Backtracking core on a raw member tuple.

    Returns the point-indexed mapping tuple, or None.  ``pinned`` maps a
    slot (position in the search order) to a forced member index.
    """
    k = plan.size
    nm = len(members)
    if nm < k:
        return None
    image = [-1] * k
    used = [False] * nm
    checks = plan.checks
    pinned = pinned or {}

    def rec(slot: int) -> bool:
        if slot == k:
            return True
        forced = pinned.get(slot)
        candidates = (forced,) if forced is not None else range(nm)
        for ci in candidates:
            if used[ci]:
                continue
            m = members[ci]
            ok = True
            for eslot, kind in checks[slot]:
                other = members[image[eslot]]
                if kind == _BELOW:
                    if other & m != other:
                        ok = False
                        break
                else:
                    if other & m == other or m & other == m:
                        ok = False
                        break
            if not ok:
                continue
            image[slot] = ci
            used[ci] = True
            if rec(slot + 1):
                return True
            used[ci] = False
            image[slot] = -1
        return False

    if not rec(0):
        return None
    mapping = [0] * k
    for slot, pt in enumerate(plan.order):
        mapping[pt] = image[slot]
    return tuple(mapping)


def find_induced(f: SetFamily, p: PatternPoset) -> Embedding | None:
    """First induced copy of p inside f, or None if f is p-free."""
    res = _search(f.members, _plan(p))
    return Embedding(f, p, res) if res is not None else None


def find_induced_using(f: SetFamily, s: int, p: PatternPoset) -> Embedding | None:
    """First induced copy of p in f + {s} whose image includes s.

    Copies avoiding s are ignored, so None means exactly that every copy
    in the extended family avoids the added set.
    """
    if s in f:
        raise ValueError(f"set {sorted(elements_of(s))} is already a member")
    extended = f.add(s)
    s_idx = extended.members.index(s)
    plan = _plan(p)
    for point in range(p.size):
        res = _search(extended.members, plan, {plan.slot_of_point[point]: s_idx})
        if res is not None:
            return Embedding(extended, p, res)
    return None


def find_diamond(f: SetFamily) -> Embedding | None:
    """Specialized detector for the diamond pattern.

    Scans bottoms in canonical order, then incomparable pairs of strict
    supersets, then the least common top, returning the
    lexicographically least witness (equal to the generic detector's).
    """
    ms = f.members
    nm = len(ms)
    if nm < 4:
        return None
    for b in range(nm):
        B = ms[b]
        sup_idx = [i for i in range(nm) if i != b and ms[i] & B == B]
        for pos, ci in enumerate(sup_idx):
            C = ms[ci]
            for di in sup_idx[pos + 1:]:
                D = ms[di]
                inter = C & D
                if inter == C or inter == D:
                    continue
                union = C | D
                for ei in range(nm):
                    if ms[ei] & union == union:
                        return Embedding(f, DIAMOND, (b, ci, di, ei))
    return None


def creates_copy(members: tuple[int, ...], m: int, p: PatternPoset) -> bool:
    """True iff members + {m} has an induced copy of p through m.

    Raw-tuple variant for enumeration inner loops; ``members`` must be
    in canonical order and must not contain m.
    """
    if p is DIAMOND or p == DIAMOND:
        return creates_diamond(members, m)
    pos = bisect_left(members, member_key(m), key=member_key)
    extended = members[:pos] + (m,) + members[pos:]
    plan = _plan(p)
    for point in range(p.size):
        if _search(extended, plan, {plan.slot_of_point[point]: pos}) is not None:
            return True
    return False


def creates_diamond(members, m: int) -> bool:
    """True iff members + {m} has a diamond through m (m not in members).

    Checks the three roles m can play: middle, bottom, top.
    """
    subs = [x for x in members if x & m == x]
    sups = [x for x in members if x & m == m]
    for d in members:
        dm = d & m
        if dm == d or dm == m:
            continue
        if any(b & dm == b for b in subs) and any(e & (d | m) == (d | m) for e in sups):
            return True
    for i, c in enumerate(sups):
        for d in sups[i + 1:]:
            cd = c & d
            if cd == c or cd == d:
                continue
            u = c | d
            if any(e & u == u for e in members):
                return True
    for i, c in enumerate(subs):
        for d in subs[i + 1:]:
            cd = c & d
            if cd == c or cd == d:
                continue
            if any(b & cd == b for b in members):
                return True
    return False
