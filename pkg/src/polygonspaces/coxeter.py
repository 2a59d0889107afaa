"""Regular cell complexes and Coxeter complexes of type A.

The Coxeter complex on a ground set of size ``n`` has one cell per ordered
set partition of the ground into at least two blocks; a partition with
``k`` blocks is a cell of dimension ``k - 2`` whose facets merge one pair
of adjacent blocks.  Reversing the block order is a free involution, and
the whole complex is a sphere of dimension ``n - 2``.

:class:`RegularCellComplex` stores cells append-only with stable integer
identities, so cells that survive a surgery step keep their identity in the
result.  ``seal()`` freezes a complex and audits it: edges have two distinct
endpoints, two-cell boundaries are single simple cycles, every cell
satisfies the diamond property (each face of codimension two is reached
through exactly two facets), and a declared involution is free, dimension
preserving and facet compatible.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional

from .errors import (
    AuditError,
    FixedCellError,
    GroundSetTooLargeError,
    NotApplicableError,
)
from .posets import FinitePoset

MIN_COXETER_GROUND = 2
MAX_COXETER_GROUND = 7

Blocks = tuple  # ordered tuple of frozensets


@dataclass(frozen=True)
class Cell:
    """One cell of a regular cell complex.

    ``label`` is a ``(kind, payload)`` pair recording how the cell arose;
    it is opaque to the audits but drives lookups and sphere relocation.
    ``pattern`` is an ordered tuple of frozensets over a partial ground set,
    carried along so spheres can be re-identified after surgery.
    """

    ident: int
    dim: int
    label: tuple
    facets: tuple[int, ...]
    pattern: Blocks = ()


def reversal(blocks: Blocks) -> Blocks:
    return tuple(reversed(blocks))


def blocks_str(blocks: Blocks) -> str:
    sep = "," if any(e > 9 for b in blocks for e in b) else ""
    return "|".join(sep.join(str(e) for e in sorted(b)) for b in blocks)


def label_str(label: tuple) -> str:
    kind, payload = label
    if kind == "osp":
        return blocks_str(payload)
    if kind == "prod":
        return f"{label_str(payload[0])}*{label_str(payload[1])}"
    if kind == "orbit":
        return f"[{label_str(payload)}]"
    if kind in ("trunc", "iface", "cone", "cap", "seg"):
        inner = label_str(payload) if isinstance(payload, tuple) and len(
            payload
        ) == 2 and isinstance(payload[0], str) else repr(payload)
        return f"{kind}({inner})"
    return repr(label)


class RegularCellComplex:
    """An append-only regular cell complex with stable cell identities."""

    def __init__(self, first_ident: int = 0) -> None:
        self.cells: dict[int, Cell] = {}
        self.involution: dict[int, int] = {}
        self._next = first_ident
        self._sealed = False
        self._faces: dict[int, frozenset] = {}
        self._labels: dict[tuple, int] = {}

    # -- construction ------------------------------------------------------

    def add_cell(
        self,
        dim: int,
        label: tuple,
        facets: Iterable[int] = (),
        pattern: Blocks = (),
        ident: Optional[int] = None,
    ) -> int:
        if self._sealed:
            raise AuditError("complex is sealed")
        facets = tuple(facets)
        if ident is None:
            ident = self._next
        if ident in self.cells:
            raise AuditError(f"duplicate cell identity {ident}")
        self._next = max(self._next, ident + 1)
        if dim == 0 and facets:
            raise AuditError("a vertex has no facets")
        if dim > 0 and len(facets) < 2:
            raise AuditError(f"cell {label!r} of dim {dim} needs >= 2 facets")
        if len(set(facets)) != len(facets):
            raise AuditError(f"cell {label!r} repeats a facet")
        for f in facets:
            if f not in self.cells:
                raise AuditError(f"facet {f} of {label!r} does not exist")
            if self.cells[f].dim != dim - 1:
                raise AuditError(f"facet {f} of {label!r} has wrong dimension")
        cell = Cell(ident, dim, label, facets, pattern)
        self.cells[ident] = cell
        if label in self._labels:
            raise AuditError(f"duplicate label {label!r}")
        self._labels[label] = ident
        return ident

    def pair(self, a: int, b: int) -> None:
        """Declare that the involution swaps cells ``a`` and ``b``."""
        if self._sealed:
            raise AuditError("complex is sealed")
        if a == b:
            raise FixedCellError(f"cell {a} would be fixed by the involution")
        self.involution[a] = b
        self.involution[b] = a

    def seal(self) -> "RegularCellComplex":
        if self._sealed:
            return self
        self._audit_edges()
        self._audit_two_cell_boundaries()
        self._audit_diamond()
        if self.involution:
            self._audit_involution()
        self._sealed = True
        return self

    # -- audits --------------------------------------------------------

    def _audit_edges(self) -> None:
        for c in self.cells.values():
            if c.dim == 1 and len(set(c.facets)) != 2:
                raise AuditError(f"edge {c.label!r} lacks two distinct ends")

    def _audit_two_cell_boundaries(self) -> None:
        for c in self.cells.values():
            if c.dim != 2:
                continue
            degree: dict[int, list[int]] = {}
            for e in c.facets:
                for v in self.cells[e].facets:
                    degree.setdefault(v, []).append(e)
            if any(len(es) != 2 for es in degree.values()):
                raise AuditError(f"boundary of {c.label!r} is not a cycle")
            seen = {c.facets[0]}
            frontier = [c.facets[0]]
            while frontier:
                e = frontier.pop()
                for v in self.cells[e].facets:
                    for e2 in degree[v]:
                        if e2 not in seen:
                            seen.add(e2)
                            frontier.append(e2)
            if len(seen) != len(c.facets):
                raise AuditError(
                    f"boundary of {c.label!r} is not a single cycle"
                )

    def _audit_diamond(self) -> None:
        for c in self.cells.values():
            if c.dim < 2:
                continue
            counts: dict[int, int] = {}
            for f in c.facets:
                for g in self.cells[f].facets:
                    counts[g] = counts.get(g, 0) + 1
            bad = {g: k for g, k in counts.items() if k != 2}
            if bad:
                raise AuditError(
                    f"diamond property fails at {c.label!r}: {bad}"
                )

    def _audit_involution(self) -> None:
        if set(self.involution) != set(self.cells):
            raise AuditError("involution is not defined on every cell")
        for a, b in self.involution.items():
            if a == b:
                raise FixedCellError(f"involution fixes cell {a}")
            if self.involution[b] != a:
                raise AuditError("involution is not an involution")
            ca, cb = self.cells[a], self.cells[b]
            if ca.dim != cb.dim:
                raise AuditError("involution changes dimension")
            image = {self.involution[f] for f in ca.facets}
            if image != set(cb.facets):
                raise AuditError(
                    f"involution of {ca.label!r} does not respect facets"
                )

    # -- queries ---------------------------------------------------------

    def __len__(self) -> int:
        return len(self.cells)

    def __iter__(self) -> Iterator[Cell]:
        return iter(self.cells.values())

    @property
    def dim(self) -> int:
        return max((c.dim for c in self.cells.values()), default=-1)

    def f_vector(self) -> tuple[int, ...]:
        counts = [0] * (self.dim + 1)
        for c in self.cells.values():
            counts[c.dim] += 1
        return tuple(counts)

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * k for d, k in enumerate(self.f_vector()))

    def by_label(self, label: tuple) -> int:
        return self._labels[label]

    def faces_of(self, ident: int) -> frozenset:
        """All cell identities in the closure of a cell, itself included."""
        cached = self._faces.get(ident)
        if cached is not None:
            return cached
        out = {ident}
        for f in self.cells[ident].facets:
            out |= self.faces_of(f)
        result = frozenset(out)
        if self._sealed:
            self._faces[ident] = result
        return result

    def face_poset(self) -> FinitePoset:
        idents = sorted(self.cells)
        pairs = [
            (f, c.ident) for c in self.cells.values() for f in c.facets
        ]
        return FinitePoset.from_relations(idents, pairs)

    def materialize(self, idents: Iterable[int]) -> "RegularCellComplex":
        """The closed subcomplex generated by ``idents``, keeping identities."""
        keep: set[int] = set()
        for i in idents:
            keep |= self.faces_of(i)
        out = RegularCellComplex()
        for i in sorted(keep, key=lambda i: (self.cells[i].dim, i)):
            c = self.cells[i]
            out.add_cell(c.dim, c.label, c.facets, c.pattern, ident=i)
        both = {
            a: b
            for a, b in self.involution.items()
            if a in keep and b in keep
        }
        if set(both) == keep:
            out.involution.update(both)
        return out.seal()

    def to_json(self) -> str:
        return json.dumps(
            {
                "cells": [
                    {
                        "id": c.ident,
                        "dim": c.dim,
                        "label": label_str(c.label),
                        "facets": sorted(c.facets),
                    }
                    for c in sorted(self.cells.values(), key=lambda c: c.ident)
                ],
                "involution": {
                    str(a): b for a, b in sorted(self.involution.items())
                },
                "f_vector": self.f_vector(),
            }
        )


# ---------------------------------------------------------------------------
# Coxeter complexes.
# ---------------------------------------------------------------------------


def _ordered_partitions(ground: tuple, k: int) -> Iterator[Blocks]:
    """Ordered partitions of ``ground`` into exactly ``k`` nonempty blocks."""
    for blocks in _set_partitions(ground, k):
        for perm in itertools.permutations(blocks):
            yield tuple(perm)


def _set_partitions(ground: tuple, k: int) -> Iterator[tuple]:
    if k == 1:
        yield (frozenset(ground),)
        return
    if len(ground) == k:
        yield tuple(frozenset({e}) for e in ground)
        return
    if len(ground) < k:
        return
    first, rest = ground[0], ground[1:]
    for sub in _set_partitions(rest, k - 1):
        yield (frozenset({first}),) + sub
    for sub in _set_partitions(rest, k):
        for i in range(len(sub)):
            yield sub[:i] + (sub[i] | {first},) + sub[i + 1 :]


def coxeter_complex(ground: Iterable[int]) -> RegularCellComplex:
    """The type-A Coxeter sphere on a ground set of 2..7 elements.

    Cells are ordered set partitions with at least two blocks; merging two
    adjacent blocks gives a facet; reversal is the involution.
    """
    items = tuple(sorted(ground))
    if not MIN_COXETER_GROUND <= len(items) <= MAX_COXETER_GROUND:
        raise GroundSetTooLargeError(
            f"ground set size {len(items)} outside "
            f"{MIN_COXETER_GROUND}..{MAX_COXETER_GROUND}"
        )
    if len(set(items)) != len(items):
        raise NotApplicableError("ground set has repeated elements")
    complex_ = RegularCellComplex()
    ids: dict[Blocks, int] = {}
    for k in range(2, len(items) + 1):
        for blocks in _ordered_partitions(items, k):
            facets = tuple(
                ids[blocks[:i] + (blocks[i] | blocks[i + 1],) + blocks[i + 2 :]]
                for i in range(k - 1 if k > 2 else 0)
            )
            ids[blocks] = complex_.add_cell(
                k - 2, ("osp", blocks), facets, pattern=blocks
            )
    for blocks, ident in ids.items():
        complex_.pair(ident, ids[reversal(blocks)])
    return complex_.seal()


def projective_quotient(
    complex_: RegularCellComplex,
) -> tuple[RegularCellComplex, dict[int, int]]:
    """Identify each cell with its involution partner.

    Requires a free involution; audits that the quotient halves the face
    numbers and stays regular.  Returns the quotient and the map from old
    cell identities to new ones.
    """
    if not complex_.involution:
        raise NotApplicableError("complex has no involution to quotient by")
    for a, b in complex_.involution.items():
        if a == b:
            raise FixedCellError(f"involution fixes cell {a}")
    out = RegularCellComplex()
    mapping: dict[int, int] = {}
    for c in sorted(complex_.cells.values(), key=lambda c: (c.dim, c.ident)):
        partner = complex_.involution[c.ident]
        if partner < c.ident:
            mapping[c.ident] = mapping[partner]
            continue
        facets = []
        for f in c.facets:
            nf = mapping[f]
            if nf in facets:
                raise AuditError(
                    f"quotient of {c.label!r} repeats facet {nf}; "
                    "the quotient would not be regular"
                )
            facets.append(nf)
        mapping[c.ident] = out.add_cell(
            c.dim, ("orbit", c.label), facets, c.pattern
        )
    old_f = complex_.f_vector()
    new_f = out.seal().f_vector()
    if tuple(x // 2 for x in old_f) != new_f or any(x % 2 for x in old_f):
        raise AuditError(
            f"quotient face counts {new_f} are not half of {old_f}"
        )
    return out, mapping


def segment() -> RegularCellComplex:
    """An interval: two vertices and one edge, with the end-swap involution
    declared only through labels (an interval has a fixed midpoint, so no
    free involution is registered)."""
    seg = RegularCellComplex()
    a = seg.add_cell(0, ("seg", 0))
    b = seg.add_cell(0, ("seg", 1))
    seg.add_cell(1, ("seg", "mid"), (a, b))
    return seg.seal()


def product(
    left: RegularCellComplex, right: RegularCellComplex
) -> RegularCellComplex:
    """The product cell complex; cells are pairs, facets follow Leibniz.

    A cell keeps the pattern of whichever factor has one (products used
    here always have a pattern-free factor).
    """
    out = RegularCellComplex()
    ids: dict[tuple[int, int], int] = {}
    pairs = sorted(
        itertools.product(left.cells.values(), right.cells.values()),
        key=lambda ab: (ab[0].dim + ab[1].dim, ab[0].ident, ab[1].ident),
    )
    for a, b in pairs:
        facets = [ids[(fa, b.ident)] for fa in a.facets]
        facets += [ids[(a.ident, fb)] for fb in b.facets]
        pattern = a.pattern if a.pattern else b.pattern
        if a.pattern and b.pattern:
            pattern = ()
        ids[(a.ident, b.ident)] = out.add_cell(
            a.dim + b.dim,
            ("prod", (a.label, b.label)),
            facets,
            pattern,
        )
    return out.seal()
