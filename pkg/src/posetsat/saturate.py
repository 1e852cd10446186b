"""Freeness and saturation verdicts, certificates, and completions.

A family is *saturated* for a pattern when it is pattern-free and every
missing subset, once added, creates an induced copy; equivalently it is
a maximal pattern-free family.  Full-mode checks scan all 2^n missing
subsets in canonical order (capped at n <= 24); spot mode samples
missing subsets uniformly and is clearly labeled non-exhaustive.

Reports are deterministic: the first failing missing set is selected by
canonical order, never by scan schedule, so the same verdict and
evidence come back regardless of the worker count.
"""

from __future__ import annotations

import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .detect import (
    DIAMOND,
    Embedding,
    creates_diamond,
    find_diamond,
    find_induced,
    find_induced_using,
    validate_embedding,
)
from .families import (
    SetFamily,
    elements_of,
    family_to_json,
    member_key,
    subset_table,
    superset_table,
)
from .posets import PatternPoset, make_hypercube

MAX_FULL_N = 24
_SAMPLE_LIMIT = 8

Q3 = make_hypercube(3)


class Verdict(str, Enum):
    NOT_FREE = "NOT_FREE"
    FREE_NOT_SATURATED = "FREE_NOT_SATURATED"
    SATURATED = "SATURATED"


class InternalCheckError(RuntimeError):
    """A witness or certificate failed independent re-validation."""


@dataclass
class SaturationReport:
    """Verdict plus machine-checkable evidence.

    NOT_FREE carries an embedding inside the family itself;
    FREE_NOT_SATURATED carries one missing mask whose addition creates
    no copy; SATURATED carries a sample of (missing mask, embedding)
    pairs and, when requested, the full certificate map.
    """

    verdict: Verdict
    family: SetFamily
    pattern: PatternPoset
    mode: str
    exhaustive: bool
    checked: int
    embedding: Embedding | None = None
    missing: int | None = None
    certificate: dict[int, Embedding] | None = None
    sample: tuple[tuple[int, Embedding], ...] = ()
    seed: int | None = None

    def to_json(self) -> dict:
        out = {
            "verdict": self.verdict.value,
            "n": self.family.n,
            "family_size": len(self.family),
            "pattern": self.pattern.name or f"poset:{self.pattern.size}",
            "mode": self.mode,
            "exhaustive": self.exhaustive,
            "checked": self.checked,
            "seed": self.seed,
        }
        if self.embedding is not None:
            out["witness"] = self.embedding.to_json()
        if self.missing is not None:
            out["missing_set"] = list(elements_of(self.missing))
        if self.verdict is Verdict.SATURATED:
            out["sample"] = [
                {"added_set": list(elements_of(m)), "witness": emb.to_json()}
                for m, emb in self.sample
            ]
            out["certificate_size"] = None if self.certificate is None else len(self.certificate)
        return out

    def validate(self) -> str | None:
        """Re-check all stored evidence with the independent validator."""
        if self.embedding is not None:
            problem = validate_embedding(self.embedding)
            if problem:
                return f"stored embedding invalid: {problem}"
        for m, emb in self.sample:
            problem = validate_embedding(emb)
            if problem:
                return f"certificate embedding for {elements_of(m)} invalid: {problem}"
            if not emb.uses(m):
                return f"certificate embedding for {elements_of(m)} does not use the added set"
        if self.certificate is not None:
            for m, emb in self.certificate.items():
                problem = validate_embedding(emb)
                if problem:
                    return f"certificate embedding for {elements_of(m)} invalid: {problem}"
                if not emb.uses(m):
                    return f"certificate embedding for {elements_of(m)} does not use the added set"
        return None


def is_free(f: SetFamily, p: PatternPoset) -> bool:
    """True iff f contains no induced copy of p (witness via find_induced)."""
    if p == DIAMOND:
        return find_diamond(f) is None
    return find_induced(f, p) is None


def _missing_masks(f: SetFamily):
    """Missing subsets in canonical (cardinality, value) order.

    Same-cardinality masks are walked in increasing numeric order via
    Gosper's hack, without materializing the 2^n range.
    """
    if 0 not in f:
        yield 0
    limit = 1 << f.n
    for c in range(1, f.n + 1):
        m = (1 << c) - 1
        while m < limit:
            if m not in f:
                yield m
            u = m & (-m)
            v = m + u
            m = v + (((v ^ m) // u) >> 2)


class _DiamondScanner:
    """Per-family tables answering "does adding s create a diamond?" in
    O(|f|) per query after O(|f|^2 + 2^n n) preparation.

    The family must be diamond-free.  Bottom and top roles are table
    lookups against the intersections/unions of incomparable member
    pairs that already have a common top/bottom; the middle role scans
    members once using subset/superset tables.
    """

    def __init__(self, f: SetFamily):
        self.f = f
        self.n = f.n
        ms = f.members
        self.members = ms
        self.subtab = subset_table(f.n, ms)
        self.suptab = superset_table(f.n, ms)
        bottom_gens: dict[int, tuple[int, int]] = {}
        top_gens: dict[int, tuple[int, int]] = {}
        for i in range(len(ms)):
            mi = ms[i]
            for j in range(i + 1, len(ms)):
                mj = ms[j]
                inter = mi & mj
                if inter == mi or inter == mj:
                    continue
                union = mi | mj
                if self.suptab[union] and inter not in bottom_gens:
                    bottom_gens[inter] = (i, j)
                if self.subtab[inter] and union not in top_gens:
                    top_gens[union] = (i, j)
        self.bottom_gens = dict(sorted(bottom_gens.items(), key=lambda kv: member_key(kv[0])))
        self.top_gens = dict(sorted(top_gens.items(), key=lambda kv: member_key(kv[0])))
        self.bottomable = superset_table(f.n, self.bottom_gens.keys())
        self.topable = subset_table(f.n, self.top_gens.keys())

    def creates(self, s: int) -> bool:
        if self.bottomable[s] or self.topable[s]:
            return True
        subtab, suptab = self.subtab, self.suptab
        for d in self.members:
            ds = d & s
            if ds == d or ds == s:
                continue
            if subtab[ds] and suptab[d | s]:
                return True
        return False

    def _first_member(self, pred) -> int:
        for idx, m in enumerate(self.members):
            if pred(m):
                return idx
        raise AssertionError("table lookup promised a member")  # pragma: no cover

    def witness(self, s: int) -> Embedding | None:
        """Embedding through s in f + {s}, or None; deterministic."""
        ms = self.members
        quad = None  # (bottom, mid1, mid2, top) as masks
        if self.bottomable[s]:
            for g, (i, j) in self.bottom_gens.items():
                if s & g == s:
                    u = ms[i] | ms[j]
                    e = ms[self._first_member(lambda m: m & u == u)]
                    quad = (s, ms[i], ms[j], e)
                    break
        elif self.topable[s]:
            for g, (i, j) in self.top_gens.items():
                if s & g == g:
                    v = ms[i] & ms[j]
                    b = ms[self._first_member(lambda m: m & v == m)]
                    quad = (b, ms[i], ms[j], s)
                    break
        else:
            for d in ms:
                ds = d & s
                if ds == d or ds == s:
                    continue
                if self.subtab[ds] and self.suptab[d | s]:
                    b = ms[self._first_member(lambda m: m & ds == m)]
                    u = d | s
                    e = ms[self._first_member(lambda m: m & u == u)]
                    quad = (b, s, d, e)
                    break
        if quad is None:
            return None
        extended = self.f.add(s)
        index = {m: i for i, m in enumerate(extended.members)}
        return Embedding(extended, DIAMOND, tuple(index[m] for m in quad))


def _generic_through(f: SetFamily, p: PatternPoset):
    def creates(s: int) -> bool:
        return find_induced_using(f, s, p) is not None

    def witness(s: int) -> Embedding | None:
        return find_induced_using(f, s, p)

    return creates, witness


def is_saturated(
    f: SetFamily,
    p: PatternPoset,
    mode: str = "full",
    spot: int = 64,
    seed: int = 0,
    certificate: bool = False,
    threads: int = 1,
) -> SaturationReport:
    """Decide freeness and saturation of f for pattern p.

    ``mode="full"`` scans every missing subset (n <= 24); ``mode="spot"``
    samples ``spot`` missing subsets uniformly with the given seed and
    labels the report non-exhaustive.  With ``certificate=True`` the full
    map missing-set -> embedding is materialized.
    """
    if mode not in ("full", "spot"):
        raise ValueError(f"mode must be 'full' or 'spot', got {mode!r}")
    if mode == "full" and f.n > MAX_FULL_N:
        raise ValueError(f"full mode needs n <= {MAX_FULL_N}, got {f.n}")

    inner = find_diamond(f) if p == DIAMOND else find_induced(f, p)
    if inner is not None:
        return SaturationReport(Verdict.NOT_FREE, f, p, mode, True, 0, embedding=inner)

    if p == DIAMOND:
        scanner = _DiamondScanner(f)
        creates, witness = scanner.creates, scanner.witness
    else:
        creates, witness = _generic_through(f, p)

    if mode == "spot":
        rng = random.Random(seed)
        total_missing = (1 << f.n) - len(f)
        k = min(spot, total_missing)
        chosen: set[int] = set()
        while len(chosen) < k:
            m = rng.getrandbits(f.n)
            if m not in f and m not in chosen:
                chosen.add(m)
        sample: list[tuple[int, Embedding]] = []
        for m in sorted(chosen, key=member_key):
            if not creates(m):
                return SaturationReport(
                    Verdict.FREE_NOT_SATURATED, f, p, mode, False, len(chosen), missing=m, seed=seed
                )
            if len(sample) < _SAMPLE_LIMIT:
                sample.append((m, witness(m)))
        return SaturationReport(
            Verdict.SATURATED, f, p, mode, False, k, sample=tuple(sample), seed=seed
        )

    if threads <= 1:
        checked = 0
        first_bad: int | None = None
        good: list[int] = []
        for m in _missing_masks(f):
            checked += 1
            if creates(m):
                good.append(m)
            else:
                first_bad = m
                break
    else:
        missing = list(_missing_masks(f))
        chunks = [missing[i::threads] for i in range(threads)]

        def scan(chunk):
            ok, bad = [], None
            for m in chunk:
                if creates(m):
                    ok.append(m)
                else:
                    bad = m
                    break
            return ok, bad

        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(scan, chunks))
        bads = [bad for _, bad in results if bad is not None]
        first_bad = min(bads, key=member_key) if bads else None
        if first_bad is None:
            good = sorted((m for ok, _ in results for m in ok), key=member_key)
            checked = len(good)
        else:
            # match the sequential count: scanned up to the canonical first failure
            good = []
            checked = missing.index(first_bad) + 1

    if first_bad is not None:
        return SaturationReport(
            Verdict.FREE_NOT_SATURATED, f, p, mode, True, checked, missing=first_bad
        )

    sample = tuple((m, witness(m)) for m in good[:_SAMPLE_LIMIT])
    cert = None
    if certificate:
        cert = {m: witness(m) for m in good}
    report = SaturationReport(
        Verdict.SATURATED, f, p, mode, True, checked, certificate=cert, sample=sample
    )
    problem = report.validate()
    if problem:
        raise InternalCheckError(problem)
    return report


def _greedy_diamond(start: SetFamily, order_masks: list[int]) -> SetFamily:
    """Greedy diamond-free completion with vectorized creation tests."""
    n = start.n
    members: list[int] = list(start.members)
    member_set = set(members)
    arr = np.array(members, dtype=np.int64) if members else np.empty(0, dtype=np.int64)
    subtab = subset_table(n, members)
    suptab = superset_table(n, members)

    def creates(m: int) -> bool:
        if len(arr) == 0:
            return False
        inter = arr & m
        union = arr | m
        incomp = (inter != arr) & (inter != m)
        if bool(np.any(incomp & subtab[inter] & suptab[union])):
            return True
        sups = arr[inter == m]
        if len(sups) >= 2:
            iu = sups[:, None] | sups[None, :]
            ii = sups[:, None] & sups[None, :]
            pair_inc = (ii != sups[:, None]) & (ii != sups[None, :])
            if bool(np.any(pair_inc & suptab[iu])):
                return True
        subs = arr[(arr & m) == arr]
        if len(subs) >= 2:
            ii = subs[:, None] & subs[None, :]
            pair_inc = (ii != subs[:, None]) & (ii != subs[None, :])
            if bool(np.any(pair_inc & subtab[ii])):
                return True
        return False

    for m in order_masks:
        if m in member_set:
            continue
        if not creates(m):
            members.append(m)
            member_set.add(m)
            arr = np.array(members, dtype=np.int64)
            subtab = subset_table(n, members)
            suptab = superset_table(n, members)
    return SetFamily(n, tuple(members))


def greedy_saturate(
    f: SetFamily, p: PatternPoset, order: str = "canonical", seed: int = 0
) -> SetFamily:
    """Complete a free family to a saturated one by a single greedy pass.

    Candidates are all 2^n subsets in the requested order (``canonical``,
    ``reverse``, or seeded ``shuffle``); each set that keeps the family
    free is added.  After one pass the result is saturated: any rejected
    set already created a copy against a subfamily of the result.
    """
    if f.n > MAX_FULL_N:
        raise ValueError(f"greedy completion needs n <= {MAX_FULL_N}, got {f.n}")
    if not is_free(f, p):
        raise ValueError("input family already contains a copy of the pattern")
    masks = sorted(range(1 << f.n), key=member_key)
    if order == "canonical":
        pass
    elif order == "reverse":
        masks.reverse()
    elif order == "shuffle":
        random.Random(seed).shuffle(masks)
    else:
        raise ValueError(f"unknown order {order!r}")
    if p == DIAMOND:
        return _greedy_diamond(f, masks)
    g = f
    for m in masks:
        if m in g:
            continue
        if find_induced_using(g, m, p) is None:
            g = g.add(m)
    return g


def chain_family(n: int) -> SetFamily:
    """The maximal chain {}, {1}, {1,2}, ..., [n]."""
    masks = [0]
    m = 0
    for i in range(n):
        m |= 1 << i
        masks.append(m)
    return SetFamily(n, tuple(masks))


def empty_plus_singletons(n: int) -> SetFamily:
    return SetFamily(n, (0,) + tuple(1 << i for i in range(n)))


def full_plus_cosingletons(n: int) -> SetFamily:
    full = (1 << n) - 1
    return SetFamily(n, (full,) + tuple(full ^ (1 << i) for i in range(n)))


def q3_construction(n: int) -> SetFamily:
    """Size 3n-2 family: all singletons, the pairs {1,j} and {2,j} for
    j >= 3, plus the empty and the full set."""
    if n < 4:
        raise ValueError(f"construction needs n >= 4, got {n}")
    masks = {0, (1 << n) - 1}
    masks.update(1 << i for i in range(n))
    for j in range(2, n):
        masks.add((1 << 0) | (1 << j))
        masks.add((1 << 1) | (1 << j))
    return SetFamily(n, tuple(masks))


@dataclass
class CatalogEntry:
    name: str
    family: SetFamily | None
    emitted: bool
    reason: str | None = None
    report: SaturationReport | None = None

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "emitted": self.emitted,
            "size": None if self.family is None else len(self.family),
            "family": None if self.family is None else family_to_json(self.family),
            "reason": self.reason,
            "verdict": None if self.report is None else self.report.verdict.value,
        }


def upper_bound_catalog(n: int, p: PatternPoset) -> list[CatalogEntry]:
    """Named saturated constructions applicable to p, each verified in
    full mode before emission; failed constructions are reported, not
    emitted."""
    if p == DIAMOND:
        builders = [
            ("chain", chain_family),
            ("empty+singletons", empty_plus_singletons),
            ("full+cosingletons", full_plus_cosingletons),
        ]
    elif p == Q3:
        builders = [("q3-grid", q3_construction)]
    else:
        return []
    entries = []
    for name, build in builders:
        try:
            fam = build(n)
        except ValueError as exc:
            entries.append(CatalogEntry(name, None, False, reason=str(exc)))
            continue
        report = is_saturated(fam, p, mode="full")
        if report.verdict is Verdict.SATURATED:
            entries.append(CatalogEntry(name, fam, True, report=report))
        else:
            entries.append(
                CatalogEntry(name, fam, False, reason=f"verdict {report.verdict.value}", report=report)
            )
    return entries
