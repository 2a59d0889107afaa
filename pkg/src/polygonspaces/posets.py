"""Finite posets, partition lattices, and combinatorial surgery on them.

The central objects are:

* :class:`FinitePoset`: an immutable finite poset with bitmask down-sets,
  supporting covers, meets, products, grading, DOT and JSON export.
* set-partition utilities and the full partition lattice ordered by
  reverse refinement (coarser partitions sit higher),
* the intersection poset of a realizable genetic code: partitions of the
  edge set into short blocks, optionally doubled by *barred* copies of the
  partitions whose quotient polygon space is disconnected,
* :func:`comb_surgery`: the order-level shadow of cellular surgery, which
  removes the up-set of a chosen element and grafts in one interval element
  per element strictly below it,
* :func:`poset_isomorphic`: certified isomorphism testing by invariant
  refinement plus backtracking.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Hashable, Iterable, Iterator, Optional, Sequence

from .errors import (
    AuditError,
    InvalidCodeError,
    NonGenericError,
    NotApplicableError,
    NotMeetSemilatticeError,
    TooLargeError,
)
from .genetics import GeneticCode, LengthVector, realize

MAX_PARTITION_GROUND = 9
MAX_BUILDING_GROUND = 12
MAX_ISO_SIZE = 5000
MAX_INTERSECTION_GROUND = 8


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class FinitePoset:
    """An immutable finite partial order.

    Elements keep their construction order; all queries go through integer
    bitmasks of down-sets, so comparisons are O(1) and meets are cheap.
    """

    def __init__(self, elements: Sequence[Hashable], down_masks: Sequence[int]):
        self.elements: tuple = tuple(elements)
        self.index: dict = {e: i for i, e in enumerate(self.elements)}
        if len(self.index) != len(self.elements):
            raise AuditError("duplicate poset elements")
        self._down = tuple(down_masks)
        n = len(self.elements)
        up = [0] * n
        for i in range(n):
            for j in _bits(self._down[i]):
                up[j] |= 1 << i
        self._up = tuple(up)
        self._covers: Optional[tuple] = None
        self._meet_flag: Optional[bool] = None

    # -- construction --------------------------------------------------

    @staticmethod
    def from_leq(
        elements: Sequence[Hashable], leq: Callable[[Hashable, Hashable], bool]
    ) -> "FinitePoset":
        """Build from an explicit comparison; validates the order axioms."""
        elems = tuple(elements)
        n = len(elems)
        down = [0] * n
        for i, a in enumerate(elems):
            if not leq(a, a):
                raise AuditError(f"leq not reflexive at {a!r}")
            for j, b in enumerate(elems):
                if leq(b, a):
                    down[i] |= 1 << j
        for i in range(n):
            for j in _bits(down[i]):
                if i != j and down[j] & (1 << i):
                    raise AuditError("leq not antisymmetric")
                if down[j] & ~down[i]:
                    raise AuditError("leq not transitive")
        return FinitePoset(elems, down)

    @staticmethod
    def from_relations(
        elements: Sequence[Hashable],
        pairs: Iterable[tuple[Hashable, Hashable]],
    ) -> "FinitePoset":
        """Build from generating relations ``a < b``; closes transitively.

        The generated digraph must be acyclic, otherwise antisymmetry is
        violated and construction fails.
        """
        elems = tuple(elements)
        index = {e: i for i, e in enumerate(elems)}
        n = len(elems)
        above: list[list[int]] = [[] for _ in range(n)]
        indegree = [0] * n
        seen = set()
        for a, b in pairs:
            ia, ib = index[a], index[b]
            if ia == ib:
                raise AuditError(f"self-relation at {a!r}")
            if (ia, ib) in seen:
                continue
            seen.add((ia, ib))
            above[ia].append(ib)
            indegree[ib] += 1
        order = [i for i in range(n) if indegree[i] == 0]
        queue = list(order)
        while queue:
            i = queue.pop()
            for j in above[i]:
                indegree[j] -= 1
                if indegree[j] == 0:
                    order.append(j)
                    queue.append(j)
        if len(order) != n:
            raise AuditError("generating relations contain a cycle")
        down = [1 << i for i in range(n)]
        for i in order:
            for j in above[i]:
                down[j] |= down[i]
        return FinitePoset(elems, down)

    # -- queries ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator:
        return iter(self.elements)

    def __contains__(self, e: Hashable) -> bool:
        return e in self.index

    def leq(self, a: Hashable, b: Hashable) -> bool:
        return bool(self._down[self.index[b]] & (1 << self.index[a]))

    def down_set(self, e: Hashable) -> list:
        return [self.elements[i] for i in _bits(self._down[self.index[e]])]

    def up_set(self, e: Hashable) -> list:
        return [self.elements[i] for i in _bits(self._up[self.index[e]])]

    def covers(self) -> tuple[tuple[Hashable, Hashable], ...]:
        """All covering pairs ``(a, b)`` with ``a`` directly below ``b``."""
        if self._covers is None:
            out = []
            for ib in range(len(self.elements)):
                strict_down = self._down[ib] & ~(1 << ib)
                for ia in _bits(strict_down):
                    between = self._up[ia] & ~(1 << ia) & strict_down
                    if not between:
                        out.append((self.elements[ia], self.elements[ib]))
            self._covers = tuple(out)
        return self._covers

    def minimal_elements(self) -> list:
        return [
            e
            for i, e in enumerate(self.elements)
            if self._down[i] == (1 << i)
        ]

    def maximal_elements(self) -> list:
        return [
            e
            for i, e in enumerate(self.elements)
            if self._up[i] == (1 << i)
        ]

    def bottom(self) -> Optional[Hashable]:
        mins = self.minimal_elements()
        return mins[0] if len(mins) == 1 else None

    def meet(self, a: Hashable, b: Hashable) -> Optional[Hashable]:
        """The greatest common lower bound, or None if absent or non-unique."""
        common = self._down[self.index[a]] & self._down[self.index[b]]
        for i in _bits(common):
            if common & ~self._down[i] == 0:
                return self.elements[i]
        return None

    def is_meet_semilattice(self) -> bool:
        if self._meet_flag is None:
            self._meet_flag = all(
                self.meet(a, b) is not None
                for a, b in itertools.combinations(self.elements, 2)
            )
        return self._meet_flag

    def rank_function(self) -> Optional[dict]:
        """Longest-path rank from the minimal elements, or None when some
        cover jumps more than one level (the poset is not graded)."""
        n = len(self.elements)
        rank = [0] * n
        order = sorted(range(n), key=lambda i: bin(self._down[i]).count("1"))
        for i in order:
            strict = self._down[i] & ~(1 << i)
            if strict:
                rank[i] = 1 + max(rank[j] for j in _bits(strict))
        for a, b in self.covers():
            if rank[self.index[b]] != rank[self.index[a]] + 1:
                return None
        return {e: rank[self.index[e]] for e in self.elements}

    def is_graded(self) -> bool:
        return self.rank_function() is not None

    def height(self) -> int:
        """Length of the longest chain (number of covers along it)."""
        n = len(self.elements)
        depth = [0] * n
        order = sorted(range(n), key=lambda i: bin(self._down[i]).count("1"))
        for i in order:
            strict = self._down[i] & ~(1 << i)
            if strict:
                depth[i] = 1 + max(depth[j] for j in _bits(strict))
        return max(depth, default=0)

    # -- derived posets ---------------------------------------------------

    def product(self, other: "FinitePoset") -> "FinitePoset":
        elems = list(itertools.product(self.elements, other.elements))
        na = len(self.elements)
        nb = len(other.elements)
        down = []
        for (ia, ib) in itertools.product(range(na), range(nb)):
            mask = 0
            for ja in _bits(self._down[ia]):
                for jb in _bits(other._down[ib]):
                    mask |= 1 << (ja * nb + jb)
            down.append(mask)
        return FinitePoset(elems, down)

    def subposet(self, keep: Iterable[Hashable]) -> "FinitePoset":
        kept = [e for e in self.elements if e in set(keep)]
        positions = [self.index[e] for e in kept]
        down = []
        for i in positions:
            mask = 0
            for new_j, j in enumerate(positions):
                if self._down[i] & (1 << j):
                    mask |= 1 << new_j
            down.append(mask)
        return FinitePoset(kept, down)

    # -- export -----------------------------------------------------------

    def to_dot(
        self,
        label: Callable[[Hashable], str] = str,
        dashed: Optional[Callable[[Hashable], bool]] = None,
    ) -> str:
        lines = ["digraph poset {", "  rankdir=BT;"]
        for i, e in enumerate(self.elements):
            text = label(e).replace('"', '\\"')
            style = ', style=dashed' if dashed and dashed(e) else ""
            lines.append(f'  n{i} [label="{text}"{style}];')
        for a, b in self.covers():
            lines.append(f"  n{self.index[a]} -> n{self.index[b]};")
        lines.append("}")
        return "\n".join(lines)

    def to_json(self, label: Callable[[Hashable], str] = str) -> str:
        return json.dumps(
            {
                "elements": [label(e) for e in self.elements],
                "covers": sorted(
                    [self.index[a], self.index[b]] for a, b in self.covers()
                ),
            }
        )


# ---------------------------------------------------------------------------
# Set partitions and the partition lattice.
# ---------------------------------------------------------------------------

Partition = tuple  # of sorted tuples of ints, sorted by first entry


def canonical_partition(blocks: Iterable[Iterable[int]]) -> Partition:
    return tuple(sorted(tuple(sorted(b)) for b in blocks))


def partitions_of(items: Iterable[int]) -> Iterator[Partition]:
    """All set partitions of ``items`` in a deterministic order."""
    pool = sorted(items)
    if not pool:
        yield ()
        return
    first, rest = pool[0], pool[1:]
    for sub in partitions_of(rest):
        for i in range(len(sub)):
            blocks = list(sub)
            blocks[i] = (first,) + blocks[i]
            yield canonical_partition(blocks)
        yield canonical_partition(((first,),) + sub)


def partition_str(p: Partition) -> str:
    sep = "," if any(e > 9 for b in p for e in b) else ""
    return "|".join(sep.join(str(e) for e in b) for b in p)


def coarsens(coarse: Partition, fine: Partition) -> bool:
    """True when every block of ``fine`` lies inside one block of ``coarse``."""
    owner = {e: i for i, block in enumerate(coarse) for e in block}
    return all(len({owner[e] for e in block}) == 1 for block in fine)


def partition_lattice(ground_size: int) -> FinitePoset:
    """The lattice of set partitions of ``{1..n}``, coarser partitions higher.

    The bottom is the discrete partition, the top the one-block partition;
    covers merge exactly two blocks and the rank is ``n`` minus the number
    of blocks.
    """
    if not 1 <= ground_size <= MAX_PARTITION_GROUND:
        raise TooLargeError(
            f"partition lattice supports 1..{MAX_PARTITION_GROUND} elements"
        )
    elems = list(partitions_of(range(1, ground_size + 1)))
    pairs = []
    for p in elems:
        for i, j in itertools.combinations(range(len(p)), 2):
            merged = list(p)
            merged[i] = tuple(sorted(p[i] + p[j]))
            del merged[j]
            pairs.append((p, canonical_partition(merged)))
    return FinitePoset.from_relations(elems, pairs)


def minimal_building_set(ground_size: int) -> list[Partition]:
    """Partitions with exactly one non-singleton block, one per subset of
    size at least two.  These generate the partition lattice under join."""
    if not 1 <= ground_size <= MAX_BUILDING_GROUND:
        raise TooLargeError(
            f"building set supports 1..{MAX_BUILDING_GROUND} elements"
        )
    ground = range(1, ground_size + 1)
    out = []
    for r in range(2, ground_size + 1):
        for block in itertools.combinations(ground, r):
            singles = [(e,) for e in ground if e not in block]
            out.append(canonical_partition([block] + singles))
    return out


# ---------------------------------------------------------------------------
# Intersection posets of genetic codes.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Barred:
    """The doubled copy of a partition whose quotient space is disconnected."""

    partition: Partition


def is_disconnected_quotient(sums: Sequence[Fraction]) -> bool:
    """Whether a polygon space with these edge lengths is disconnected.

    Exact criterion: the second and third largest lengths together exceed
    half the perimeter.  Ties with half the perimeter mean the input was
    not generic and are rejected.
    """
    if len(sums) < 3:
        raise NotApplicableError("need at least three edges")
    ordered = sorted(sums)
    doubled = 2 * (ordered[-2] + ordered[-3])
    total = sum(ordered)
    if doubled == total:
        raise NonGenericError(
            "second plus third largest equals half the perimeter",
            witness=tuple(ordered),
        )
    return doubled > total


def quotient_sums(vector: LengthVector, partition: Partition) -> tuple:
    """Edge lengths of the quotient polygon: one totalled edge per block."""
    return tuple(sum(vector.values[e - 1] for e in block) for block in partition)


def intersection_poset(
    code: GeneticCode, *, barred: bool = False
) -> FinitePoset:
    """Partitions of the edge set into short blocks, coarser ones higher.

    With ``barred=True`` every partition with a disconnected quotient gains
    an incomparable barred twin; a barred element sits above exactly the
    refinements that are themselves barred or connected, and below only
    barred coarsenings.  Construction realizes the code to get exact edge
    lengths and audits that disconnection is inherited upward.
    """
    if code.is_empty_space():
        raise NotApplicableError("the empty code has no intersection poset")
    if code.edge_count > MAX_INTERSECTION_GROUND:
        raise TooLargeError(
            f"intersection poset supports at most {MAX_INTERSECTION_GROUND} edges"
        )
    vector = realize(code)
    if vector is None:
        raise InvalidCodeError(
            f"code {code} is not realizable, no intersection poset exists"
        )
    perimeter = vector.perimeter
    plain = []
    disconnected = {}
    for p in partitions_of(range(1, code.edge_count + 1)):
        sums = quotient_sums(vector, p)
        if any(2 * s >= perimeter for s in sums):
            continue
        plain.append(p)
        disconnected[p] = is_disconnected_quotient(sums)

    for fine in plain:  # disconnection must be inherited by coarsenings
        if not disconnected[fine]:
            continue
        for coarse in plain:
            if coarse != fine and coarsens(coarse, fine):
                if not disconnected[coarse]:
                    raise AuditError(
                        "disconnected quotient coarsened to a connected one: "
                        f"{partition_str(fine)} <= {partition_str(coarse)}"
                    )

    if not barred:
        return FinitePoset.from_leq(
            plain, lambda a, b: coarsens(b, a)
        )

    elements: list = list(plain)
    elements.extend(Barred(p) for p in plain if disconnected[p])

    def leq(a, b) -> bool:
        abar, bbar = isinstance(a, Barred), isinstance(b, Barred)
        pa = a.partition if abar else a
        pb = b.partition if bbar else b
        if abar and not bbar:
            return False
        if not abar and bbar:
            return coarsens(pb, pa) and not disconnected[pa]
        return coarsens(pb, pa)

    return FinitePoset.from_leq(elements, leq)


# ---------------------------------------------------------------------------
# Combinatorial surgery on posets.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Interval:
    """A grafted element of a surgered poset, one per ``base`` below the
    surgery locus."""

    locus: Hashable
    base: Hashable


def comb_surgery(poset: FinitePoset, locus: Hashable) -> FinitePoset:
    """Surgery on a poset at ``locus``: the order-level shadow of cutting a
    cell complex along a subcomplex and regluing.

    The whole up-set of ``locus`` is removed.  For every element strictly
    below ``locus`` (including the bottom) a new interval element appears.
    Intervals inherit the order of their bases, and a surviving element
    ``z`` slips below the interval at base ``y`` exactly when ``z`` shares
    an upper bound with the locus and every common lower bound of ``z``
    and the locus lies below ``y``.

    When the input has all pairwise meets the output must as well, else
    :class:`NotMeetSemilatticeError` is raised.
    """
    if locus not in poset:
        raise NotApplicableError(f"{locus!r} is not an element of the poset")
    bottom = poset.bottom()
    if bottom is None:
        raise NotApplicableError("surgery needs a unique bottom element")
    if locus == bottom:
        raise NotApplicableError("cannot perform surgery at the bottom")
    had_meets = poset.is_meet_semilattice()

    kept = [e for e in poset if not poset.leq(locus, e)]
    below = [e for e in poset if poset.leq(e, locus) and e != locus]
    grafted = {y: Interval(locus, y) for y in below}
    elements = kept + [grafted[y] for y in below]

    locus_up = poset._up[poset.index[locus]]
    locus_down = poset._down[poset.index[locus]]
    pairs: list[tuple[Hashable, Hashable]] = []
    for a in kept:
        for b in kept:
            if a != b and poset.leq(a, b):
                pairs.append((a, b))
    for y in below:
        for z in below:
            if y != z and poset.leq(y, z):
                pairs.append((grafted[y], grafted[z]))
    for z in kept:
        iz = poset.index[z]
        if not poset._up[iz] & locus_up:
            continue  # no common upper bound with the locus
        shared_below = poset._down[iz] & locus_down
        for y in below:
            if shared_below & ~poset._down[poset.index[y]] == 0:
                pairs.append((z, grafted[y]))

    out = FinitePoset.from_relations(elements, pairs)
    if had_meets and not out.is_meet_semilattice():
        raise NotMeetSemilatticeError(
            "surgery destroyed meets although the input had them"
        )
    return out


# ---------------------------------------------------------------------------
# Isomorphism testing.
# ---------------------------------------------------------------------------


def _stable_colors(poset: FinitePoset) -> list[int]:
    n = len(poset.elements)
    down_counts = [bin(m).count("1") for m in poset._down]
    up_counts = [bin(m).count("1") for m in poset._up]
    colors = [hash((d, u)) for d, u in zip(down_counts, up_counts)]
    cover_up: list[list[int]] = [[] for _ in range(n)]
    cover_down: list[list[int]] = [[] for _ in range(n)]
    for a, b in poset.covers():
        ia, ib = poset.index[a], poset.index[b]
        cover_up[ia].append(ib)
        cover_down[ib].append(ia)
    for _ in range(n):
        fresh = [
            hash(
                (
                    colors[i],
                    tuple(sorted(colors[j] for j in cover_up[i])),
                    tuple(sorted(colors[j] for j in cover_down[i])),
                )
            )
            for i in range(n)
        ]
        if len(set(fresh)) == len(set(colors)):
            colors = fresh
            break
        colors = fresh
    return colors


def poset_isomorphic(p: FinitePoset, q: FinitePoset) -> Optional[dict]:
    """An order isomorphism ``p -> q`` as a dict, or None when none exists."""
    if len(p.elements) != len(q.elements):
        return None
    if len(p.elements) > MAX_ISO_SIZE:
        raise TooLargeError(
            f"isomorphism search capped at {MAX_ISO_SIZE} elements"
        )
    pc = _stable_colors(p)
    qc = _stable_colors(q)
    if sorted(pc) != sorted(qc):
        return None
    candidates: dict[int, list[int]] = {}
    for i in range(len(p.elements)):
        candidates[i] = [j for j in range(len(q.elements)) if qc[j] == pc[i]]
    order = sorted(range(len(p.elements)), key=lambda i: len(candidates[i]))
    assigned: dict[int, int] = {}
    used: set[int] = set()

    def compatible(i: int, j: int) -> bool:
        bit_i, bit_j = 1 << i, 1 << j
        for a, b in assigned.items():
            if bool(p._down[i] & (1 << a)) != bool(q._down[j] & (1 << b)):
                return False
            if bool(p._down[a] & bit_i) != bool(q._down[b] & bit_j):
                return False
        return True

    def search(k: int) -> bool:
        if k == len(order):
            return True
        i = order[k]
        for j in candidates[i]:
            if j in used or not compatible(i, j):
                continue
            assigned[i] = j
            used.add(j)
            if search(k + 1):
                return True
            del assigned[i]
            used.remove(j)
        return False

    if not search(0):
        return None
    return {p.elements[i]: q.elements[j] for i, j in assigned.items()}
