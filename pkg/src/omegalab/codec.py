"""Canonical, bit-exact enumeration of finite partial functions on N x N x {0,1}.

Every partial function from triples (a, b, i) to values v gets one integer
"raw code": each defined entry occupies the bit at slot ``pair(code(a,b,i), v)``
(Cantor pairing throughout), and the raw code is the sum of those bits.  A raw
code is *functional* when no two of its slots name the same triple.  The
enumeration lists the functional raw codes in increasing order; index m in
that list is the m-th partial function.

Ranking and unranking never scan raw codes one by one.  Slots group by the
triple they describe, at most one slot per group may be set, and the number of
functional codes with all slots below a bit bound is the product over groups
of (1 + slots available in that group).  That product-counting gives direct
rank/unrank in O(bits^2); a sorted cache of the first ~10^6 codes makes bulk
work (round-trips, density scans) O(1) per lookup.
"""

from __future__ import annotations

import heapq
import math
import threading
from bisect import bisect_left
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .finset import FinSet

# Beyond this slot position a single entry already forces the enumeration
# index past ~2^(10^7); refuse to rank such codes instead of looping forever.
SLOT_LIMIT = 10 ** 7


def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def cantor_unpair(q: int) -> tuple[int, int]:
    w = (math.isqrt(8 * q + 1) - 1) // 2
    b = q - w * (w + 1) // 2
    return w - b, b


def point_code(a: int, b: int, i: int) -> int:
    return 2 * cantor_pair(a, b) + i


def point_decode(code: int) -> tuple[int, int, int]:
    a, b = cantor_unpair(code >> 1)
    return a, b, code & 1


def entry_slot(a: int, b: int, i: int, value: int) -> int:
    return cantor_pair(point_code(a, b, i), value)


def slot_decode(slot: int) -> tuple[int, int, int, int]:
    code, value = cantor_unpair(slot)
    a, b, i = point_decode(code)
    return a, b, i, value


def _slot_group(slot: int) -> int:
    # the point code this slot describes
    return cantor_unpair(slot)[0]


@dataclass(frozen=True)
class PartialFn:
    """A finite partial function, entries (a, b, i, value) sorted by point code."""

    entries: tuple[tuple[int, int, int, int], ...]

    @classmethod
    def from_entries(cls, entries: Iterable[Sequence[int]]) -> "PartialFn":
        rows = []
        seen = set()
        for e in entries:
            a, b, i, v = (int(x) for x in e)
            if a < 0 or b < 0 or v < 0 or i not in (0, 1):
                raise ValueError(f"bad entry {(a, b, i, v)}")
            code = point_code(a, b, i)
            if code in seen:
                raise ValueError(f"two values for point {(a, b, i)}")
            seen.add(code)
            rows.append((code, (a, b, i, v)))
        rows.sort()
        return cls(tuple(r[1] for r in rows))

    @classmethod
    def from_point_map(cls, mapping: dict[tuple[int, int, int], int]) -> "PartialFn":
        return cls.from_entries((a, b, i, v) for (a, b, i), v in mapping.items())

    @cached_property
    def _by_point(self) -> dict[tuple[int, int, int], int]:
        return {(a, b, i): v for a, b, i, v in self.entries}

    def value_at(self, a: int, b: int, i: int) -> Optional[int]:
        return self._by_point.get((a, b, i))

    def defined_at(self, a: int, b: int, i: int) -> bool:
        return (a, b, i) in self._by_point

    @cached_property
    def slots(self) -> tuple[int, ...]:
        return tuple(sorted(entry_slot(a, b, i, v) for a, b, i, v in self.entries))

    @cached_property
    def raw_code(self) -> int:
        if self.entries and self.slots[-1] > SLOT_LIMIT:
            raise ValueError(
                "entry slot exceeds the representable range "
                f"(slot {self.slots[-1]} > {SLOT_LIMIT})")
        code = 0
        for s in self.slots:
            code |= 1 << s
        return code

    def extends(self, smaller: "PartialFn") -> bool:
        """True when every entry of `smaller` appears identically here."""
        return set(smaller.slots) <= set(self.slots)

    def __len__(self) -> int:
        return len(self.entries)


EMPTY_FN = PartialFn(())


def is_functional_raw(raw: int) -> bool:
    if raw < 0:
        raise ValueError("raw codes are non-negative")
    seen = set()
    while raw:
        low = raw & -raw
        slot = low.bit_length() - 1
        g = _slot_group(slot)
        if g in seen:
            return False
        seen.add(g)
        raw ^= low
    return True


def partial_fn_from_raw(raw: int) -> PartialFn:
    entries = []
    while raw:
        low = raw & -raw
        entries.append(slot_decode(low.bit_length() - 1))
        raw ^= low
    return PartialFn.from_entries(entries)


# --- counting machinery -----------------------------------------------------

def _group_slots_below(group: int, bit_bound: int) -> int:
    """How many slots of this group lie strictly below bit_bound."""
    if cantor_pair(group, 0) >= bit_bound:
        return 0
    lo, hi = 0, 1
    while cantor_pair(group, hi) < bit_bound:
        hi *= 2
    # smallest v with slot >= bit_bound
    while lo < hi:
        mid = (lo + hi) // 2
        if cantor_pair(group, mid) < bit_bound:
            lo = mid + 1
        else:
            hi = mid
    return lo


def count_functional_below(bit_bound: int, excluded: frozenset[int] = frozenset()) -> int:
    """Functional raw codes whose slots all lie below bit_bound, skipping
    any group in `excluded` entirely."""
    total = 1
    q = 0
    while q * (q + 1) // 2 < bit_bound:
        if q not in excluded:
            total *= 1 + _group_slots_below(q, bit_bound)
        q += 1
    return total


def _rank_from_slots(slots_desc: Sequence[int]) -> int:
    """Functional codes strictly below the code with exactly these slots.

    Also valid as a strict-bound count for a non-functional slot set: the scan
    stops once the high prefix itself stops being functional.
    """
    total = 0
    used: set[int] = set()
    for s in slots_desc:
        total += count_functional_below(s, frozenset(used))
        g = _slot_group(s)
        if g in used:
            break
        used.add(g)
    return total


def _unrank(m: int) -> tuple[int, ...]:
    """Slot positions (descending) of the m-th functional raw code."""
    if m < 0:
        raise ValueError("index must be >= 0")
    if m == 0:
        return ()
    bits = 1
    while count_functional_below(bits) <= m:
        bits += 1
    slots = []
    used: set[int] = set()
    remaining = m
    hi = bits
    while remaining:
        p = hi - 1
        while count_functional_below(p, frozenset(used)) > remaining:
            p -= 1
        remaining -= count_functional_below(p, frozenset(used))
        slots.append(p)
        used.add(_slot_group(p))
        hi = p
    return tuple(slots)


# --- sorted cache of the initial segment -------------------------------------

_TIER_BITS = (20, 30, 38, 40)

_cache_lock = threading.Lock()
_cache: list[int] = []
_cache_bits = 0


def _build_cache(bits: int) -> list[int]:
    values = [0]
    q = 0
    while q * (q + 1) // 2 < bits:
        opts = [0] + [1 << cantor_pair(q, v)
                      for v in range(_group_slots_below(q, bits))]
        values = [base + o for base in values for o in opts]
        q += 1
    values.sort()
    return values

def _ensure_cache_count(needed: int) -> bool:
    """Grow the sorted cache to hold at least `needed` codes, if a tier allows."""
    global _cache, _cache_bits
    if needed <= len(_cache):
        return True
    for bits in _TIER_BITS:
        if count_functional_below(bits) >= needed:
            with _cache_lock:
                if bits > _cache_bits:
                    _cache = _build_cache(bits)
                    _cache_bits = bits
            return len(_cache) >= needed
    return False


_MAX_CACHED_COUNT = None  # filled lazily; count below the top tier


def _top_tier_count() -> int:
    global _MAX_CACHED_COUNT
    if _MAX_CACHED_COUNT is None:
        _MAX_CACHED_COUNT = count_functional_below(_TIER_BITS[-1])
    return _MAX_CACHED_COUNT


def raw_code_of_index(m: int) -> int:
    """Raw code of the m-th partial function (ascending raw order)."""
    if m < 0:
        raise ValueError("index must be >= 0")
    if m < len(_cache):
        return _cache[m]
    if m < _top_tier_count() and _ensure_cache_count(m + 1):
        return _cache[m]
    code = 0
    for s in _unrank(m):
        code |= 1 << s
    return code


def index_of_raw_code(raw: int) -> int:
    """Count of functional raw codes strictly below `raw`.

    For a functional `raw` this is exactly its enumeration index.
    """
    if raw < 0:
        raise ValueError("raw codes are non-negative")
    if _cache_bits and raw < (1 << _cache_bits):
        return bisect_left(_cache, raw)
    slots = []
    r = raw
    while r:
        low = r & -r
        slots.append(low.bit_length() - 1)
        r ^= low
    slots.reverse()
    if slots and slots[0] > SLOT_LIMIT:
        raise ValueError(
            f"raw code has a slot beyond {SLOT_LIMIT}; its index is "
            "astronomically large and not representable here")
    return _rank_from_slots(slots)


def nth_partial_fn(m: int) -> PartialFn:
    """The m-th partial function in the canonical enumeration."""
    return partial_fn_from_raw(raw_code_of_index(m))


def partial_fn_index(fn: PartialFn) -> int:
    """Inverse of nth_partial_fn."""
    if fn.entries and fn.slots[-1] > SLOT_LIMIT:
        raise ValueError(
            f"entry slot {fn.slots[-1]} exceeds {SLOT_LIMIT}; the index exists "
            "but is astronomically large")
    if _cache_bits and (not fn.entries or fn.slots[-1] < _cache_bits):
        return bisect_left(_cache, fn.raw_code)
    return _rank_from_slots(tuple(reversed(fn.slots)))


def warm_enumeration(count: int) -> None:
    """Pre-build the lookup cache for indices below `count` (bulk callers)."""
    _ensure_cache_count(count)


# --- density and extension search --------------------------------------------

@dataclass(frozen=True)
class DenseReport:
    ok: bool
    missing_probe: Optional[int]
    probe_bound: int
    search_bound: int


def check_dense(members: Iterable[int], probe_bound: int, search_bound: int) -> DenseReport:
    """Does every probe index m < probe_bound have an extension witness in
    `members` below search_bound?

    A witness for m is any n in `members` with n < search_bound whose partial
    function extends the m-th one.  Reports the least unwitnessed probe.
    """
    if probe_bound < 1 or search_bound < 1:
        raise ValueError("bounds must be >= 1")
    if isinstance(members, FinSet):
        container, ascending = members, members  # O(1) `in`, lazy ascending iter
    else:
        ascending = sorted(set(members))
        container = set(ascending)
    for m in range(probe_bound):
        if m < search_bound and m in container:
            continue  # a function extends itself
        probe_slots = nth_partial_fn(m).slots
        found = False
        for n in ascending:
            if n >= search_bound:
                break
            raw_n = raw_code_of_index(n)
            if all((raw_n >> s) & 1 for s in probe_slots):
                found = True
                break
        if not found:
            return DenseReport(False, m, probe_bound, search_bound)
    return DenseReport(True, None, probe_bound, search_bound)


def least_extension_index(probe: PartialFn, above: int, search_bound: int,
                          within: Optional[Iterable[int]] = None,
                          without: Iterable[int] = ()) -> Optional[int]:
    """Smallest index n with above < n < search_bound whose function extends
    `probe`, restricted to `within` (when given) and avoiding `without`.

    Returns None when no such index exists below the bound.
    """
    if search_bound < 1:
        raise ValueError("search bound must be >= 1")
    excluded = set(without)

    if within is not None:
        probe_slots = probe.slots
        for n in sorted(set(within)):
            if n <= above:
                continue
            if n >= search_bound:
                break
            if n in excluded:
                continue
            raw_n = raw_code_of_index(n)
            if all((raw_n >> s) & 1 for s in probe_slots):
                return n
        return None

    if not probe.entries:
        n = above + 1 if above >= 0 else 0
        while n in excluded:
            n += 1
        return n if n < search_bound else None

    raw_hi = raw_code_of_index(search_bound)
    if probe.slots[-1] >= raw_hi.bit_length():
        return None  # even the single highest entry lies past the bound
    mask = probe.raw_code
    if mask >= raw_hi:
        return None
    above_raw = raw_code_of_index(above) if above >= 0 else -1
    excluded_raws = {raw_code_of_index(n) for n in excluded
                     if above < n < search_bound}
    probe_groups = frozenset(_slot_group(s) for s in probe.slots)
    free = [p for p in range(raw_hi.bit_length())
            if _slot_group(p) not in probe_groups]

    # Enumerate functional supersets of the probe in ascending raw order: a
    # heap of extra-slot sets, each child appending one later free position
    # from an unused group (every set has a unique parent, so no duplicates).
    heap: list[tuple[int, int, frozenset[int]]] = [(0, -1, frozenset())]
    while heap:
        extra, last, used = heapq.heappop(heap)
        candidate = mask + extra
        if candidate >= raw_hi:
            return None  # candidates only grow from here
        if candidate > above_raw and candidate not in excluded_raws:
            return index_of_raw_code(candidate)
        for idx in range(last + 1, len(free)):
            p = free[idx]
            g = _slot_group(p)
            if g in used:
                continue
            heapq.heappush(heap, (extra + (1 << p), idx, used | {g}))
    return None
