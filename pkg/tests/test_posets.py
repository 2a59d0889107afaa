"""Posets, partition lattices, intersection posets, poset surgery."""

import itertools
from fractions import Fraction

import pytest

from polygonspaces.errors import (
    AuditError,
    InvalidCodeError,
    NonGenericError,
    NotApplicableError,
    TooLargeError,
)
from polygonspaces.genetics import genetic_code, parse_code
from polygonspaces.posets import (
    Barred,
    FinitePoset,
    Interval,
    canonical_partition,
    coarsens,
    comb_surgery,
    intersection_poset,
    is_disconnected_quotient,
    minimal_building_set,
    partition_lattice,
    partition_str,
    partitions_of,
    poset_isomorphic,
    quotient_sums,
)


def divisor_poset(n: int) -> FinitePoset:
    divs = [d for d in range(1, n + 1) if n % d == 0]
    return FinitePoset.from_leq(divs, lambda a, b: b % a == 0)


def chain(n: int) -> FinitePoset:
    return FinitePoset.from_leq(list(range(n)), lambda a, b: a <= b)


def antichain(n: int) -> FinitePoset:
    return FinitePoset.from_leq(list(range(n)), lambda a, b: a == b)


# --- FinitePoset core -------------------------------------------------------


def test_divisor_poset_basics():
    p = divisor_poset(12)
    assert len(p) == 6
    assert p.leq(2, 12)
    assert not p.leq(4, 6)
    assert p.bottom() == 1
    assert p.maximal_elements() == [12]
    assert set(p.covers()) == {
        (1, 2), (1, 3), (2, 4), (2, 6), (3, 6), (4, 12), (6, 12),
    }
    assert p.meet(4, 6) == 2
    assert p.is_meet_semilattice()
    assert p.down_set(6) == [1, 2, 3, 6]
    assert p.up_set(3) == [3, 6, 12]


def test_from_relations_closes_transitively():
    p = FinitePoset.from_relations("abc", [("a", "b"), ("b", "c")])
    assert p.leq("a", "c")
    assert p.covers() == (("a", "b"), ("b", "c"))
    with pytest.raises(AuditError):
        FinitePoset.from_relations("ab", [("a", "b"), ("b", "a")])


def test_from_leq_validates_axioms():
    with pytest.raises(AuditError):
        FinitePoset.from_leq([1, 2], lambda a, b: True)  # not antisymmetric
    with pytest.raises(AuditError):
        FinitePoset.from_leq([1, 2], lambda a, b: a != b)  # not reflexive


def test_product_and_subposet():
    grid = chain(2).product(chain(3))
    assert len(grid) == 6
    assert grid.leq((0, 0), (1, 2))
    assert not grid.leq((1, 0), (0, 2))
    assert grid.is_meet_semilattice()
    assert grid.meet((1, 0), (0, 2)) == (0, 0)
    sub = grid.subposet([(0, 0), (1, 0), (0, 2)])
    assert len(sub) == 3
    assert sub.leq((0, 0), (0, 2)) and not sub.leq((1, 0), (0, 2))


def test_rank_and_height():
    p = divisor_poset(12)
    ranks = p.rank_function()
    assert ranks is not None
    assert ranks[1] == 0 and ranks[12] == 3 and ranks[6] == 2
    assert p.height() == 3
    diamond = FinitePoset.from_relations(
        "abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]
    )
    assert diamond.is_graded()
    hexagon = FinitePoset.from_relations(
        "abcde",
        [("a", "b"), ("b", "c"), ("c", "e"), ("a", "d"), ("d", "e")],
    )
    assert hexagon.rank_function() is None  # the d -> e cover jumps two levels


def test_dot_and_json_export():
    p = chain(3)
    dot = p.to_dot()
    assert dot.startswith("digraph poset {") and "n0 -> n1" in dot
    dashed = p.to_dot(dashed=lambda e: e == 1)
    assert "style=dashed" in dashed
    js = p.to_json()
    assert '"covers": [[0, 1], [1, 2]]' in js


# --- partitions and the partition lattice -----------------------------------


def test_partitions_of_counts_are_bell_numbers():
    for n, bell in [(1, 1), (2, 2), (3, 5), (4, 15), (5, 52), (6, 203)]:
        parts = list(partitions_of(range(1, n + 1)))
        assert len(parts) == bell
        assert len(set(parts)) == bell
        for p in parts:
            assert sorted(e for b in p for e in b) == list(range(1, n + 1))
            assert p == canonical_partition(p)


def test_partition_helpers():
    p = canonical_partition([(3, 4, 5), (1,), (6,), (2,)])
    assert p == ((1,), (2,), (3, 4, 5), (6,))
    assert partition_str(p) == "1|2|345|6"
    assert partition_str(canonical_partition([(1, 10)])) == "1,10"
    assert coarsens(((1, 2), (3,)), ((1,), (2,), (3,)))
    assert not coarsens(((1,), (2,), (3,)), ((1, 2), (3,)))


def test_partition_lattice_structure():
    lat = partition_lattice(4)
    assert len(lat) == 15
    bottom = canonical_partition([(1,), (2,), (3,), (4,)])
    top = canonical_partition([(1, 2, 3, 4)])
    assert lat.bottom() == bottom
    assert lat.maximal_elements() == [top]
    ranks = lat.rank_function()
    assert ranks is not None
    for p in lat:
        assert ranks[p] == 4 - len(p)
    assert lat.is_meet_semilattice()
    covers_of_bottom = [b for a, b in lat.covers() if a == bottom]
    assert len(covers_of_bottom) == 6  # one per pair merge
    assert lat.meet(
        canonical_partition([(1, 2), (3, 4)]),
        canonical_partition([(1, 2, 3), (4,)]),
    ) == canonical_partition([(1, 2), (3,), (4,)])


def test_partition_lattice_cap():
    with pytest.raises(TooLargeError):
        partition_lattice(10)


def test_minimal_building_set():
    b4 = minimal_building_set(4)
    assert len(b4) == 11
    assert len(minimal_building_set(5)) == 26
    for p in b4:
        big = [b for b in p if len(b) > 1]
        assert len(big) == 1
    with pytest.raises(TooLargeError):
        minimal_building_set(13)


# --- disconnection of quotient spaces ---------------------------------------


def test_disconnection_predicate():
    f = Fraction
    assert is_disconnected_quotient((f(1), f(1), f(1)))  # triangle: two points
    assert not is_disconnected_quotient((f(1), f(1), f(1), f(1), f(3)))
    assert is_disconnected_quotient((f(1), f(2), f(5), f(5)))
    assert not is_disconnected_quotient((f(1), f(1), f(2), f(2), f(2), f(5)))
    with pytest.raises(NotApplicableError):
        is_disconnected_quotient((f(1), f(2)))
    with pytest.raises(NonGenericError):
        is_disconnected_quotient((f(1), f(1), f(2)))


def test_disconnected_quotient_matches_its_code():
    # the quotient (1,2,5,5) realizes <14>, whose space has two components
    assert str(genetic_code((1, 2, 5, 5))) == "<14>"


# --- intersection posets ----------------------------------------------------


def test_intersection_poset_plain_sizes():
    p26 = intersection_poset(parse_code("<26>"))
    assert len(p26) == 77
    p126 = intersection_poset(parse_code("<126>"))
    assert len(p126) == 77
    # grouped by the block containing the anchor edge 6
    by_anchor = {}
    for part in p26:
        block = next(b for b in part if 6 in b)
        by_anchor[block] = by_anchor.get(block, 0) + 1
    assert by_anchor == {(6,): 49, (1, 6): 14, (2, 6): 14}


def test_intersection_poset_barred_sizes():
    b26 = intersection_poset(parse_code("<26>"), barred=True)
    assert len(b26) == 116
    bars = [e for e in b26 if isinstance(e, Barred)]
    assert len(bars) == 39
    by_blocks = {}
    for bar in bars:
        k = len(bar.partition)
        by_blocks[k] = by_blocks.get(k, 0) + 1
    assert by_blocks == {3: 27, 4: 12}

    b126 = intersection_poset(parse_code("<126>"), barred=True)
    assert len(b126) == 128
    bars = [e for e in b126 if isinstance(e, Barred)]
    by_blocks = {}
    for bar in bars:
        k = len(bar.partition)
        by_blocks[k] = by_blocks.get(k, 0) + 1
    assert by_blocks == {3: 27, 4: 21, 5: 3}


def test_intersection_poset_order_and_grading():
    p26 = intersection_poset(parse_code("<26>"))
    bottom = canonical_partition([(e,) for e in range(1, 7)])
    assert p26.bottom() == bottom
    ranks = p26.rank_function()
    assert ranks is not None
    for part in p26:
        assert ranks[part] == 6 - len(part)
    assert p26.height() == 3
    assert p26.is_meet_semilattice()
    # no all-short partition has two blocks
    assert all(len(part) >= 3 for part in p26)


def test_barred_poset_is_not_a_meet_semilattice():
    b26 = intersection_poset(parse_code("<26>"), barred=True)
    assert not b26.is_meet_semilattice()
    twin = canonical_partition([(1, 3, 4), (2,), (5,), (6,)])
    assert b26.meet(twin, Barred(twin)) is None
    # its lower bounds have three incomparable maxima
    down = set(b26.down_set(twin)) & set(b26.down_set(Barred(twin)))
    maxima = [
        e for e in down
        if not any(f != e and b26.leq(e, f) for f in down)
    ]
    assert len(maxima) == 3


def test_barred_twins_are_incomparable():
    b26 = intersection_poset(parse_code("<26>"), barred=True)
    for e in b26:
        if isinstance(e, Barred):
            assert not b26.leq(e.partition, e)
            assert not b26.leq(e, e.partition)


def test_refinement_cone_factorizes():
    p26 = intersection_poset(parse_code("<26>"))
    pi = canonical_partition([(1, 2), (3, 4, 5), (6,)])
    cone = p26.subposet(p26.down_set(pi))
    model = partition_lattice(2).product(partition_lattice(3)).product(
        partition_lattice(1)
    )
    assert len(cone) == 10
    assert poset_isomorphic(cone, model) is not None


def test_barred_refinement_cone_factorizes():
    b26 = intersection_poset(parse_code("<26>"), barred=True)
    pi = canonical_partition([(1, 3, 4), (2,), (5,), (6,)])
    cone = b26.subposet(b26.down_set(Barred(pi)))
    assert len(cone) == 5
    assert poset_isomorphic(cone, partition_lattice(3)) is not None


def test_intersection_poset_rejects_bad_codes():
    with pytest.raises(NotApplicableError):
        intersection_poset(parse_code("<>", edge_count=4))
    with pytest.raises(InvalidCodeError):
        intersection_poset(parse_code("<135>"))


# --- combinatorial surgery ---------------------------------------------------


def test_comb_surgery_on_small_lattice():
    lat = partition_lattice(3)
    x = canonical_partition([(1, 2), (3,)])
    out = comb_surgery(lat, x)
    assert len(out) == 4
    diamond = FinitePoset.from_relations(
        "abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]
    )
    assert poset_isomorphic(out, diamond) is not None
    bottom = canonical_partition([(1,), (2,), (3,)])
    assert Interval(x, bottom) in out
    assert out.leq(canonical_partition([(1, 3), (2,)]), Interval(x, bottom))


def test_comb_surgery_errors():
    lat = partition_lattice(3)
    with pytest.raises(NotApplicableError):
        comb_surgery(lat, canonical_partition([(1,), (2,), (3,)]))
    with pytest.raises(NotApplicableError):
        comb_surgery(lat, "nonsense")


def test_comb_surgery_matches_code_step():
    """Poset surgery at the one-block partition of the complement of the
    gained set turns one intersection poset into the next one."""
    p26 = intersection_poset(parse_code("<26>"))
    p126 = intersection_poset(parse_code("<126>"))
    x = canonical_partition([(1,), (2,), (3, 4, 5), (6,)])
    out = comb_surgery(p26, x)
    assert len(out) == 77
    assert poset_isomorphic(out, p126) is not None


def test_comb_surgery_clause_for_incomparables():
    p26 = intersection_poset(parse_code("<26>"))
    x = canonical_partition([(1,), (2,), (3, 4, 5), (6,)])
    out = comb_surgery(p26, x)
    bottom = canonical_partition([(e,) for e in range(1, 7)])
    lowest = Interval(x, bottom)
    included = [
        canonical_partition([(1, 2), (3,), (4,), (5,), (6,)]),
        canonical_partition([(1, 6), (2,), (3,), (4,), (5,)]),
    ]
    excluded = [
        canonical_partition([(1, 3), (2,), (4,), (5,), (6,)]),
        canonical_partition([(4, 5), (1,), (2,), (3,), (6,)]),
    ]
    for z in included:
        assert out.leq(z, lowest), z
    for z in excluded:
        assert not out.leq(z, lowest), z
    # shares an upper bound with x but keeps 4 and 5 merged, so it lands
    # below exactly the intervals whose base keeps that merge
    tricky = canonical_partition([(1,), (2, 6), (3,), (4, 5)])
    paired = canonical_partition([(1,), (2,), (3,), (4, 5), (6,)])
    assert not out.leq(tricky, lowest)
    assert out.leq(tricky, Interval(x, paired))


def test_comb_surgery_interval_ranks():
    p26 = intersection_poset(parse_code("<26>"))
    x = canonical_partition([(1,), (2,), (3, 4, 5), (6,)])
    out = comb_surgery(p26, x)
    in_ranks = p26.rank_function()
    out_ranks = out.rank_function()
    assert out_ranks is not None
    top_rank = p26.height()  # 3
    assert top_rank == 3
    for e in out:
        if isinstance(e, Interval):
            expected = top_rank - in_ranks[x] + in_ranks[e.base] + 1
            assert out_ranks[e] == expected
    assert out_ranks[Interval(x, p26.bottom())] == 2


# --- isomorphism testing -----------------------------------------------------


def test_poset_isomorphic_positive():
    iso = poset_isomorphic(chain(4), chain(4))
    assert iso == {0: 0, 1: 1, 2: 2, 3: 3}
    lat = partition_lattice(4)
    shuffled = FinitePoset.from_leq(
        list(reversed(lat.elements)), lambda a, b: lat.leq(a, b)
    )
    iso = poset_isomorphic(lat, shuffled)
    assert iso is not None
    for a in lat:
        for b in lat:
            assert lat.leq(a, b) == shuffled.leq(iso[a], iso[b])


def test_poset_isomorphic_negative():
    assert poset_isomorphic(chain(3), antichain(3)) is None
    diamond = FinitePoset.from_relations(
        "abcd", [("a", "b"), ("a", "c"), ("b", "d"), ("c", "d")]
    )
    assert poset_isomorphic(diamond, chain(4)) is None
    assert poset_isomorphic(chain(3), chain(4)) is None


def test_poset_isomorphic_cap():
    big = FinitePoset.from_relations(
        range(5001), [(i, i + 1) for i in range(5000)]
    )
    with pytest.raises(TooLargeError):
        poset_isomorphic(big, big)
