"""Genetic codes: the combinatorial classification of polygon length vectors.

A closed planar polygon with ``m`` ordered edge lengths is governed by which
subsets of edges are *short*: a subset is short when doubling its total stays
below the perimeter.  Genericity (no subset sums to exactly half the
perimeter) makes short/long a clean dichotomy between complementary sets.

Among subsets containing the longest edge, shortness is downward closed for a
purely combinatorial *domination* order, so the maximal short sets, called
*genes*, determine every short set.  The tuple of genes is the *genetic code*
of the vector.  This module provides:

* exact genericity testing for rational length vectors, with a witness
  subset on failure,
* the domination order, the genetic code of a vector, and the reconstruction
  of the full short-set system from a code,
* the partial order on codes at fixed edge count, its covering relations,
  and the canonical saturated chain from the minimal code up to a target,
* exact realization of an abstract code by an integer length vector, or a
  certificate of unrealizability, via a rational two-phase simplex.

All arithmetic is ``fractions.Fraction``; floats never appear.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator, NamedTuple, Optional, Sequence, Union

from .errors import (
    GroundSetTooLargeError,
    InvalidCodeError,
    NonGenericError,
    AuditError,
)

RationalLike = Union[int, str, Fraction]

# Genericity scanning and short-set enumeration walk subsets of the edge
# set, so the exact routines carry explicit size caps.
MAX_EDGES = 16
MAX_EDGES_REALIZE = 10
MAX_EDGES_ENUMERATE = 6

Gene = frozenset  # elements are 1-based edge indices


def _as_fraction(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        return Fraction(value)
    raise InvalidCodeError(f"not an exact rational: {value!r}")


def _find_half_perimeter_subset(
    values: Sequence[Fraction],
) -> Optional[tuple[int, ...]]:
    """First subset (1-based indices, lexicographic) summing to half the total."""
    total = sum(values)
    count = len(values)

    def walk(start: int, acc: Fraction, chosen: tuple[int, ...]):
        for i in range(start, count):
            doubled = 2 * (acc + values[i])
            if doubled == total:
                return chosen + (i + 1,)
            if doubled < total:
                found = walk(i + 1, acc + values[i], chosen + (i + 1,))
                if found is not None:
                    return found
            # values are ascending, so later picks only overshoot further
        return None

    return walk(0, Fraction(0), ())


@dataclass(frozen=True)
class LengthVector:
    """Positive rational edge lengths in canonical ascending order.

    The constructor sorts its input (edge lengths matter only as a multiset)
    and verifies genericity exactly.  A subset summing to exactly half the
    perimeter raises :class:`NonGenericError` carrying one witness subset.
    """

    values: tuple[Fraction, ...]

    def __init__(self, values: Iterable[RationalLike]) -> None:
        vals = tuple(sorted(_as_fraction(v) for v in values))
        if not vals:
            raise InvalidCodeError("a length vector needs at least one edge")
        if len(vals) > MAX_EDGES:
            raise GroundSetTooLargeError(
                f"at most {MAX_EDGES} edges supported, got {len(vals)}"
            )
        if vals[0] <= 0:
            raise InvalidCodeError("edge lengths must be positive")
        witness = _find_half_perimeter_subset(vals)
        if witness is not None:
            raise NonGenericError(
                f"subset {witness} sums to exactly half the perimeter",
                witness=witness,
            )
        object.__setattr__(self, "values", vals)

    @property
    def edge_count(self) -> int:
        return len(self.values)

    @property
    def perimeter(self) -> Fraction:
        return sum(self.values)

    def is_short(self, subset: Iterable[int]) -> bool:
        """True when the subset of edges sums to less than half the perimeter."""
        indices = frozenset(subset)
        if not indices <= frozenset(range(1, self.edge_count + 1)):
            raise InvalidCodeError(f"subset {sorted(indices)} out of range")
        return 2 * sum(self.values[i - 1] for i in indices) < self.perimeter

    def as_integers(self) -> Optional[tuple[int, ...]]:
        """The vector as plain ints, or None if some entry is fractional."""
        if any(v.denominator != 1 for v in self.values):
            return None
        return tuple(v.numerator for v in self.values)

    def __str__(self) -> str:
        return "(" + ", ".join(str(v) for v in self.values) + ")"


# ---------------------------------------------------------------------------
# Domination order on subsets that contain the anchor (largest) edge.
# ---------------------------------------------------------------------------


def dominance_leq(lower: Iterable[int], upper: Iterable[int]) -> bool:
    """The domination order: ``lower <= upper``.

    Holds when ``lower`` has at most as many elements and, after sorting both
    descending, each entry of ``lower`` is at most the matching entry of
    ``upper``.  For ascending length vectors this forces the corresponding
    sums to compare the same way, which is why short sets form a down-set.
    """
    small = sorted(lower, reverse=True)
    large = sorted(upper, reverse=True)
    if len(small) > len(large):
        return False
    return all(a <= b for a, b in zip(small, large))


def _dominance_up_covers(s: Gene, anchor: int) -> Iterator[Gene]:
    """Immediate successors of ``s`` among anchor-containing subsets."""
    if 1 not in s:
        yield s | {1}
    for g in s:
        if g < anchor and g + 1 not in s:
            yield (s - {g}) | {g + 1}


def _dominance_down_covers(s: Gene, anchor: int) -> Iterator[Gene]:
    """Immediate predecessors of ``s`` among anchor-containing subsets."""
    if 1 in s:
        yield s - {1}
    for g in s:
        if g != anchor and g > 1 and g - 1 not in s:
            yield (s - {g}) | {g - 1}


def _maximal_in_downset(sets: frozenset) -> frozenset:
    """Maximal elements of a downward-closed family of anchor sets."""
    if not sets:
        return frozenset()
    anchor = max(max(s) for s in sets)
    return frozenset(
        s
        for s in sets
        if not any(c in sets for c in _dominance_up_covers(s, anchor))
    )


# ---------------------------------------------------------------------------
# Genetic codes.
# ---------------------------------------------------------------------------


def _gene_sort_key(gene: Gene) -> tuple[int, ...]:
    return tuple(sorted(gene))


@dataclass(frozen=True)
class GeneticCode:
    """An antichain of anchor-containing edge subsets at a fixed edge count.

    ``genes`` are the maximal short subsets containing the anchor edge
    (the one with the largest index).  An empty tuple of genes is legal and
    describes an empty polygon space: even the anchor alone is long.
    """

    edge_count: int
    genes: tuple[Gene, ...]

    def __init__(self, edge_count: int, genes: Iterable[Iterable[int]]) -> None:
        if not isinstance(edge_count, int) or edge_count < 1:
            raise InvalidCodeError(f"bad edge count: {edge_count!r}")
        if edge_count > MAX_EDGES:
            raise GroundSetTooLargeError(
                f"at most {MAX_EDGES} edges supported, got {edge_count}"
            )
        canonical = []
        for raw in genes:
            gene = frozenset(int(e) for e in raw)
            if not gene or min(gene) < 1 or max(gene) > edge_count:
                raise InvalidCodeError(
                    f"gene {sorted(gene)} out of range for {edge_count} edges"
                )
            if edge_count not in gene:
                raise InvalidCodeError(
                    f"gene {sorted(gene)} must contain the anchor {edge_count}"
                )
            canonical.append(gene)
        ordered = tuple(sorted(set(canonical), key=_gene_sort_key))
        if len(ordered) != len(canonical):
            raise InvalidCodeError("duplicate gene")
        for a, b in itertools.combinations(ordered, 2):
            if dominance_leq(a, b) or dominance_leq(b, a):
                raise InvalidCodeError(
                    f"genes {sorted(a)} and {sorted(b)} are comparable; "
                    "a code must be an antichain"
                )
        object.__setattr__(self, "edge_count", edge_count)
        object.__setattr__(self, "genes", ordered)

    @property
    def anchor(self) -> int:
        return self.edge_count

    def is_empty_space(self) -> bool:
        """True when the code describes an empty polygon space (no genes)."""
        return not self.genes

    def is_short(self, subset: Iterable[int]) -> bool:
        """Shortness of any edge subset, reconstructed from the genes alone.

        A subset containing the anchor is short iff it is dominated by some
        gene; one avoiding the anchor is short iff its complement is
        dominated by no gene.
        """
        s = frozenset(int(e) for e in subset)
        if s and (min(s) < 1 or max(s) > self.edge_count):
            raise InvalidCodeError(f"subset {sorted(s)} out of range")
        if self.anchor in s:
            return any(dominance_leq(s, g) for g in self.genes)
        complement = frozenset(range(1, self.edge_count + 1)) - s
        return not any(dominance_leq(complement, g) for g in self.genes)

    def anchor_short_sets(self) -> frozenset:
        """All short subsets containing the anchor (the down-set of the genes)."""
        rest = range(1, self.edge_count)
        out = []
        for r in range(self.edge_count):
            for combo in itertools.combinations(rest, r):
                s = frozenset(combo) | {self.anchor}
                if any(dominance_leq(s, g) for g in self.genes):
                    out.append(s)
        return frozenset(out)

    def short_sets(self) -> frozenset:
        """Every short subset of the edge set, anchor or not."""
        ground = list(range(1, self.edge_count + 1))
        out = []
        for r in range(self.edge_count + 1):
            for combo in itertools.combinations(ground, r):
                if self.is_short(combo):
                    out.append(frozenset(combo))
        return frozenset(out)

    def to_json(self) -> str:
        return json.dumps(
            {
                "edge_count": self.edge_count,
                "genes": [sorted(g) for g in self.genes],
            }
        )

    @staticmethod
    def from_json(text: str) -> "GeneticCode":
        data = json.loads(text)
        return GeneticCode(data["edge_count"], data["genes"])

    def __str__(self) -> str:
        return format_code(self)


def minimal_code(edge_count: int) -> GeneticCode:
    """The smallest nonempty code: only the anchor itself is short."""
    return GeneticCode(edge_count, [{edge_count}])


def genetic_code(lengths: Union[LengthVector, Iterable[RationalLike]]) -> GeneticCode:
    """The genetic code of a (generic) length vector.

    Enumerates the short subsets containing the anchor edge and keeps the
    maximal ones under domination.  Maximality is checked through upward
    covers, which is sound because shortness is downward closed.
    """
    vec = lengths if isinstance(lengths, LengthVector) else LengthVector(lengths)
    m = vec.edge_count
    half = vec.perimeter
    shorts = set()
    rest = range(1, m)
    for r in range(m):
        for combo in itertools.combinations(rest, r):
            s = frozenset(combo) | {m}
            if 2 * sum(vec.values[i - 1] for i in s) < half:
                shorts.add(s)
    genes = _maximal_in_downset(frozenset(shorts))
    return GeneticCode(m, genes)


# ---------------------------------------------------------------------------
# The partial order on codes, covers, saturated chains.
# ---------------------------------------------------------------------------


def _require_same_ground(a: GeneticCode, b: GeneticCode) -> None:
    if a.edge_count != b.edge_count:
        raise InvalidCodeError(
            f"codes live on different edge counts: {a.edge_count} vs {b.edge_count}"
        )


def genetic_leq(a: GeneticCode, b: GeneticCode) -> bool:
    """Order on codes: every gene of ``a`` dominated by some gene of ``b``.

    Equivalent to inclusion of the corresponding anchor short-set systems.
    """
    _require_same_ground(a, b)
    return all(any(dominance_leq(g, h) for h in b.genes) for g in a.genes)


def minimal_long_sets(code: GeneticCode) -> tuple[Gene, ...]:
    """Minimal anchor-containing long sets, sorted by ascending element tuple.

    A long set is minimal when every downward cover is short.  These are
    exactly the sets whose addition to the short system yields an upward
    cover of the code, and the only long constraints a realization needs.
    """
    m = code.edge_count
    shorts = code.anchor_short_sets()
    out = []
    rest = range(1, m)
    for r in range(m):
        for combo in itertools.combinations(rest, r):
            s = frozenset(combo) | {m}
            if s in shorts:
                continue
            if all(c in shorts for c in _dominance_down_covers(s, m)):
                out.append(s)
    return tuple(sorted(out, key=_gene_sort_key))


def up_covers(code: GeneticCode) -> tuple[GeneticCode, ...]:
    """Codes directly above: one new short set (a minimal long) is adjoined."""
    out = []
    for t in minimal_long_sets(code):
        genes = [t] + [g for g in code.genes if not dominance_leq(g, t)]
        out.append(GeneticCode(code.edge_count, genes))
    return tuple(out)


def down_covers(code: GeneticCode) -> tuple[GeneticCode, ...]:
    """Codes directly below: one gene is removed from the short system."""
    shorts = code.anchor_short_sets()
    out = []
    for gene in code.genes:
        out.append(
            GeneticCode(code.edge_count, _maximal_in_downset(shorts - {gene}))
        )
    return tuple(out)


def cover_step(lower: GeneticCode, upper: GeneticCode) -> Optional[Gene]:
    """The single set adjoined when ``upper`` covers ``lower``, else None."""
    _require_same_ground(lower, upper)
    diff = upper.anchor_short_sets() - lower.anchor_short_sets()
    if len(diff) == 1 and genetic_leq(lower, upper):
        return next(iter(diff))
    return None


class SaturatedChain(NamedTuple):
    """A maximal chain of codes with the set adjoined at each step.

    ``codes[0]`` is the minimal code, ``codes[-1]`` the target;
    ``added_sets[i]`` is the short set gained from ``codes[i]`` to
    ``codes[i + 1]``.
    """

    codes: tuple[GeneticCode, ...]
    added_sets: tuple[Gene, ...]


def saturated_chain(code: GeneticCode) -> SaturatedChain:
    """The canonical saturated chain from the minimal code up to ``code``.

    Built by descending: repeatedly drop the gene whose descending element
    tuple is lexicographically largest, until only the anchor set remains.
    Each drop removes exactly one short set, so the chain is saturated and
    its added sets together with the anchor singleton exhaust the short
    system of the target.
    """
    if code.is_empty_space():
        return SaturatedChain((code,), ())
    bottom = minimal_code(code.edge_count)
    codes = [code]
    removed = []
    current = code
    while current != bottom:
        gene = max(current.genes, key=lambda g: tuple(sorted(g, reverse=True)))
        removed.append(gene)
        current = GeneticCode(
            current.edge_count,
            _maximal_in_downset(current.anchor_short_sets() - {gene}),
        )
        codes.append(current)
    return SaturatedChain(tuple(reversed(codes)), tuple(reversed(removed)))


def surgery_signature(code: GeneticCode) -> tuple[int, ...]:
    """Sphere dimensions met along the canonical chain: size of each added
    set minus two."""
    return tuple(len(j) - 2 for j in saturated_chain(code).added_sets)


def enumerate_codes(edge_count: int) -> list[GeneticCode]:
    """All genetic codes at the given edge count (every domination antichain).

    Exponential; refuses edge counts above a small cap.
    """
    if edge_count > MAX_EDGES_ENUMERATE:
        raise GroundSetTooLargeError(
            f"code enumeration supports at most {MAX_EDGES_ENUMERATE} edges"
        )
    rest = range(1, edge_count)
    anchor_sets = []
    for r in range(edge_count):
        for combo in itertools.combinations(rest, r):
            anchor_sets.append(frozenset(combo) | {edge_count})
    anchor_sets.sort(key=lambda s: (len(s), _gene_sort_key(s)))
    out: list[GeneticCode] = []

    def extend(start: int, chosen: list) -> None:
        out.append(GeneticCode(edge_count, chosen))
        for i in range(start, len(anchor_sets)):
            s = anchor_sets[i]
            if any(
                dominance_leq(s, c) or dominance_leq(c, s) for c in chosen
            ):
                continue
            chosen.append(s)
            extend(i + 1, chosen)
            chosen.pop()

    extend(0, [])
    return out


# ---------------------------------------------------------------------------
# Exact realization via a rational two-phase simplex.
# ---------------------------------------------------------------------------


def _simplex_max(
    objective: Sequence[Fraction],
    rows: Sequence[Sequence[Fraction]],
    rhs: Sequence[Fraction],
) -> Optional[tuple[Fraction, list[Fraction]]]:
    """Maximize ``objective . x`` over ``rows . x <= rhs``, ``x >= 0``.

    Exact two-phase tableau simplex with Bland's rule, so it terminates and
    is deterministic.  Returns ``(value, x)`` or None when infeasible.
    The feasible regions built in this module are bounded; unboundedness
    therefore raises an audit error.
    """
    zero, one = Fraction(0), Fraction(1)
    n = len(objective)
    k = len(rows)
    art_of_row = {}
    n_art = sum(1 for b in rhs if b < 0)
    width = n + k + n_art + 1
    tableau: list[list[Fraction]] = []
    next_art = n + k
    for i in range(k):
        row = [zero] * width
        flip = -one if rhs[i] < 0 else one
        for j in range(n):
            row[j] = flip * rows[i][j]
        row[n + i] = flip
        row[-1] = flip * rhs[i]
        if rhs[i] < 0:
            row[next_art] = one
            art_of_row[i] = next_art
            next_art += 1
        tableau.append(row)
    basis = [art_of_row.get(i, n + i) for i in range(k)]

    # Objective rows in canonical form: z + sum(row[j] * x_j) = row[-1].
    z_row = [zero] * width
    for j in range(n):
        z_row[j] = -objective[j]
    w_row = [zero] * width
    for i, art in art_of_row.items():
        for j in range(width):
            w_row[j] -= tableau[i][j]
        w_row[art] += one  # cost of the artificial itself

    def pivot(r: int, c: int) -> None:
        inv = one / tableau[r][c]
        tableau[r] = [v * inv for v in tableau[r]]
        for row in itertools.chain(tableau, (z_row, w_row)):
            if row is tableau[r] or row[c] == 0:
                continue
            f = row[c]
            for j in range(width):
                row[j] -= f * tableau[r][j]

    def iterate(obj: list[Fraction], allowed: int) -> bool:
        """Run Bland pivots until optimal; False means unbounded."""
        while True:
            enter = next(
                (j for j in range(allowed) if obj[j] < 0), None
            )
            if enter is None:
                return True
            best = None
            for i in range(k):
                coef = tableau[i][enter]
                if coef > 0:
                    ratio = tableau[i][-1] / coef
                    key = (ratio, basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            pivot(best[1], enter)
            basis[best[1]] = enter

    if n_art:
        if not iterate(w_row, n + k + n_art):
            raise AuditError("phase-1 objective unbounded")
        if w_row[-1] != 0:
            return None  # infeasible
        for i in range(k):
            if basis[i] >= n + k:  # artificial stuck in the basis at zero
                col = next(
                    (j for j in range(n + k) if tableau[i][j] != 0), None
                )
                if col is not None:
                    pivot(i, col)
                    basis[i] = col
    if not iterate(z_row, n + k):
        raise AuditError("objective unbounded on a bounded polytope")
    x = [zero] * n
    for i in range(k):
        if basis[i] < n:
            x[basis[i]] = tableau[i][-1]
    return z_row[-1], x


def realize(code: GeneticCode) -> Optional[LengthVector]:
    """An integer length vector with the given genetic code, or None.

    Maximizes a uniform slack ``t`` over the polytope of ascending,
    perimeter-one vectors whose gene sums stay short by ``t`` and whose
    minimal long sets stay long by ``t``; domination monotonicity makes
    those finitely many constraints imply all the rest.  A positive optimum
    is scaled to a canonical integer vector and round-tripped through
    :func:`genetic_code` as a self-check.
    """
    m = code.edge_count
    if m > MAX_EDGES_REALIZE:
        raise GroundSetTooLargeError(
            f"realization supports at most {MAX_EDGES_REALIZE} edges"
        )
    zero, one = Fraction(0), Fraction(1)
    n = m + 1  # x_1..x_m and the slack t
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []

    def add(coefs: dict, bound: Fraction) -> None:
        row = [zero] * n
        for j, c in coefs.items():
            row[j] = Fraction(c)
        rows.append(row)
        rhs.append(bound)

    add({j: 1 for j in range(m)}, one)
    add({j: -1 for j in range(m)}, -one)
    for j in range(m - 1):
        add({j: 1, j + 1: -1}, zero)
    add({0: -1, m: 1}, zero)  # t <= x_1 keeps every length positive
    for gene in code.genes:
        add({**{i - 1: 2 for i in gene}, m: 1}, one)
    for long_set in minimal_long_sets(code):
        add({**{i - 1: -2 for i in long_set}, m: 1}, -one)

    objective = [zero] * n
    objective[m] = one
    solved = _simplex_max(objective, rows, rhs)
    if solved is None or solved[0] <= 0:
        return None
    lengths = solved[1][:m]
    scale = math.lcm(*(v.denominator for v in lengths))
    ints = [int(v * scale) for v in lengths]
    shrink = math.gcd(*ints)
    vector = LengthVector(v // shrink for v in ints)
    if genetic_code(vector) != code:
        raise AuditError(
            f"realization round-trip failed for {format_code(code)}"
        )
    return vector


# ---------------------------------------------------------------------------
# Text notation and reports.
# ---------------------------------------------------------------------------


def format_code(code: GeneticCode) -> str:
    """Angle-bracket notation: genes as digit runs, bracketed when elements
    exceed one digit, separated by commas.  The empty code prints as ``<>``."""
    tokens = []
    for gene in code.genes:
        elems = sorted(gene)
        if elems[-1] <= 9:
            tokens.append("".join(str(e) for e in elems))
        else:
            tokens.append("[" + ",".join(str(e) for e in elems) + "]")
    return "<" + ",".join(tokens) + ">"


def parse_code(text: str, edge_count: Optional[int] = None) -> GeneticCode:
    """Parse angle-bracket notation, e.g. ``<256>`` or ``<[2,4,6,9]>``.

    Each comma-separated token is one gene: a run of digits (one element
    per digit) or a bracketed list for multi-digit elements.  The edge
    count defaults to the largest element mentioned; the empty code ``<>``
    requires it explicitly.
    """
    body = text.strip()
    if not (body.startswith("<") and body.endswith(">")):
        raise InvalidCodeError(f"code must be wrapped in <...>: {text!r}")
    body = body[1:-1].strip()
    genes: list[tuple[int, ...]] = []
    token = ""
    depth = 0
    for ch in body + ",":
        if ch == "," and depth == 0:
            token = token.strip()
            if not token:
                continue
            if token.startswith("[") and token.endswith("]"):
                inner = token[1:-1]
                try:
                    elems = tuple(int(p) for p in inner.split(","))
                except ValueError:
                    raise InvalidCodeError(f"bad gene token {token!r}") from None
            elif token.isdigit():
                elems = tuple(int(c) for c in token)
            else:
                raise InvalidCodeError(f"bad gene token {token!r}")
            genes.append(elems)
            token = ""
        else:
            if ch == "[":
                depth += 1
            elif ch == "]":
                depth -= 1
            token += ch
    if depth != 0:
        raise InvalidCodeError(f"unbalanced brackets in {text!r}")
    if edge_count is None:
        if not genes:
            raise InvalidCodeError(
                "the empty code <> needs an explicit edge count"
            )
        edge_count = max(max(g) for g in genes)
    return GeneticCode(edge_count, genes)


def code_report(code: GeneticCode) -> dict:
    """A JSON-friendly summary: genes, chain, signature, realization."""
    chain = saturated_chain(code)
    vector = (
        realize(code) if code.edge_count <= MAX_EDGES_REALIZE else None
    )
    return {
        "code": format_code(code),
        "edge_count": code.edge_count,
        "genes": [sorted(g) for g in code.genes],
        "empty_space": code.is_empty_space(),
        "anchor_short_count": len(code.anchor_short_sets()),
        "chain": [format_code(c) for c in chain.codes],
        "added_sets": [sorted(s) for s in chain.added_sets],
        "surgery_signature": list(surgery_signature(code)),
        "realizable": vector is not None,
        "realization": list(vector.as_integers()) if vector else None,
    }
