"""Surgery pipeline: interface spheres, cut-and-cap runs, homotopy models."""

import functools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from polygonspaces.coxeter import coxeter_complex, projective_quotient
from polygonspaces.errors import (
    AuditError,
    ChainInterferenceError,
    Not2DError,
    NotApplicableError,
    SphereRelocationFailedError,
)
from polygonspaces.genetics import GeneticCode, parse_code
from polygonspaces.homology import (
    betti_oracle,
    homology,
    identify_small,
)
from polygonspaces.posets import (
    canonical_partition,
    comb_surgery,
    intersection_poset,
    poset_isomorphic,
)
from polygonspaces.surgery import (
    locate_sphere,
    restrict_pattern,
    run_chain,
    run_model,
    sphere_cells,
    step_locus,
    surgery_2d,
)


@functools.cache
def chain_run(name: str, mode: str, projective: bool = False):
    return run_chain(parse_code(name), mode=mode, projective=projective)


@functools.cache
def model_run(name: str):
    return run_model(parse_code(name))


def fs(*items) -> frozenset:
    return frozenset(items)


# -- f-vector ladders ---------------------------------------------------

# one row per (code, projective, mode): the f-vector before every step
# plus the final one.  Attach grows the complex, collapse keeps the face
# count flat until a circle step crushes it back down.
LADDERS = {
    ("<15>", 0, "attach"): [(14, 36, 24), (24, 54, 30)],
    ("<15>", 0, "collapse"): [(14, 36, 24), (18, 42, 24)],
    ("<15>", 1, "attach"): [(7, 18, 12), (12, 27, 15)],
    ("<15>", 1, "collapse"): [(7, 18, 12), (9, 21, 12)],
    ("<45>", 0, "attach"): [
        (14, 36, 24),
        (24, 54, 30),
        (34, 72, 36),
        (44, 90, 42),
        (54, 108, 48),
    ],
    ("<45>", 0, "collapse"): [
        (14, 36, 24),
        (18, 42, 24),
        (22, 48, 24),
        (26, 54, 24),
        (30, 60, 24),
    ],
    ("<45>", 1, "attach"): [
        (7, 18, 12),
        (12, 27, 15),
        (17, 36, 18),
        (22, 45, 21),
        (27, 54, 24),
    ],
    ("<45>", 1, "collapse"): [
        (7, 18, 12),
        (9, 21, 12),
        (11, 24, 12),
        (13, 27, 12),
        (15, 30, 12),
    ],
    ("<125>", 0, "attach"): [
        (14, 36, 24),
        (24, 54, 30),
        (34, 72, 36),
        (44, 82, 38),
    ],
    ("<125>", 0, "collapse"): [
        (14, 36, 24),
        (18, 42, 24),
        (22, 48, 24),
        (18, 42, 24),
    ],
    ("<125>", 1, "attach"): [
        (7, 18, 12),
        (12, 27, 15),
        (17, 36, 18),
        (22, 41, 19),
    ],
    ("<125>", 1, "collapse"): [
        (7, 18, 12),
        (9, 21, 12),
        (11, 24, 12),
        (9, 21, 12),
    ],
}


@pytest.mark.parametrize("key", sorted(LADDERS))
def test_f_vector_ladder(key) -> None:
    name, projective, mode = key
    tr = chain_run(name, mode, bool(projective))
    got = [s.f_before for s in tr.steps] + [tr.final.f_vector()]
    assert got == LADDERS[key]
    assert [s.f_after for s in tr.steps] == got[1:]
    assert tr.mode == mode
    assert tr.projective is bool(projective)


def test_step_records() -> None:
    tr = chain_run("<125>", "collapse")
    assert [s.code for s in tr.steps] == ["<15>", "<25>", "<125>"]
    assert [s.added for s in tr.steps] == [(1, 5), (2, 5), (1, 2, 5)]
    assert [s.index for s in tr.steps] == [0, 0, 1]
    assert [len(s.sphere) for s in tr.steps] == [2, 2, 12]
    for before, after, step in zip(
        tr.complexes, tr.complexes[1:], tr.steps
    ):
        assert step.f_before == before.f_vector()
        assert step.f_after == after.f_vector()


# -- surface identification --------------------------------------------

NAMES = {
    ("<15>", 0): "T^2",
    ("<25>", 0): "T_2",
    ("<35>", 0): "T_3",
    ("<45>", 0): "T_4",
    ("<125>", 0): "T^2 ⊔ T^2",
    ("<15>", 1): "N_2",
    ("<25>", 1): "N_3",
    ("<35>", 1): "N_4",
    ("<45>", 1): "N_5",
    ("<125>", 1): "T^2",
}


@pytest.mark.parametrize("key", sorted(NAMES))
@pytest.mark.parametrize("mode", ["attach", "collapse"])
def test_surface_names(key, mode: str) -> None:
    name, projective = key
    tr = chain_run(name, mode, bool(projective))
    assert identify_small(tr.final) == NAMES[key]


def test_empty_chain_is_the_start_sphere() -> None:
    tr = chain_run("<5>", "attach")
    assert tr.steps == ()
    assert tr.final.f_vector() == (14, 36, 24)
    assert identify_small(tr.final) == "S^2"


# -- oracle agreement ---------------------------------------------------

STEPPED = ["<5>", "<15>", "<25>", "<35>", "<45>", "<125>"]


@pytest.mark.parametrize("name", STEPPED)
@pytest.mark.parametrize("mode", ["attach", "collapse"])
def test_oracle_agreement(name: str, mode: str) -> None:
    tr = chain_run(name, mode)
    rep = homology(tr.final)
    assert rep.betti == betti_oracle(parse_code(name))
    assert not rep.has_torsion()


@pytest.mark.parametrize("name", STEPPED)
def test_modes_build_the_same_space(name: str) -> None:
    a = homology(chain_run(name, "attach").final)
    b = homology(chain_run(name, "collapse").final)
    assert a.betti == b.betti
    assert a.torsion == b.torsion
    assert a.components == b.components


@pytest.mark.parametrize("name", ["<15>", "<25>", "<35>", "<45>"])
@pytest.mark.parametrize("mode", ["attach", "collapse"])
def test_projective_runs_are_nonorientable(name: str, mode: str) -> None:
    rep = homology(chain_run(name, mode, True).final)
    h1 = betti_oracle(parse_code(name))[1]
    assert rep.betti == (1, h1 // 2, 0)
    assert rep.torsion[1] == (2,)
    assert rep.orientable is False


def test_projective_two_torus_code_gives_one_torus() -> None:
    rep = homology(chain_run("<125>", "collapse", True).final)
    assert rep.betti == (1, 2, 1)
    assert not rep.has_torsion()
    assert rep.orientable is True


# -- equivariance --------------------------------------------------------

EQUIVARIANT = [
    (name, mode)
    for name in ("<15>", "<45>", "<125>")
    for mode in ("attach", "collapse")
]


@pytest.mark.parametrize("name,mode", EQUIVARIANT)
def test_involution_survives_surgery(name: str, mode: str) -> None:
    tr = chain_run(name, mode)
    for k in tr.complexes:
        assert set(k.involution) == set(k.cells)
        for ident, partner in k.involution.items():
            assert partner != ident
            assert k.involution[partner] == ident


@pytest.mark.parametrize("name,mode", EQUIVARIANT)
def test_quotient_commutes_with_surgery(name: str, mode: str) -> None:
    folded, _ = projective_quotient(chain_run(name, mode).final)
    direct = chain_run(name, mode, True).final
    assert folded.f_vector() == direct.f_vector()
    a, b = homology(folded), homology(direct)
    assert (a.betti, a.torsion) == (b.betti, b.torsion)


# -- cell shapes ---------------------------------------------------------


def boundary_lengths(complex_) -> dict[int, int]:
    counts: dict[int, int] = {}
    for cell in complex_:
        if cell.dim == 2:
            n = len(cell.facets)
            counts[n] = counts.get(n, 0) + 1
    return counts


def test_attach_tube_shapes() -> None:
    tr = chain_run("<15>", "attach")
    assert boundary_lengths(tr.final) == {3: 12, 4: 18}


def test_projective_pentagon_complex() -> None:
    k = chain_run("<45>", "collapse", True).final
    assert boundary_lengths(k) == {5: 12}


def test_collapse_keeps_face_count() -> None:
    tr = chain_run("<45>", "collapse")
    assert [s.f_after[2] for s in tr.steps] == [24, 24, 24, 24]


# -- sphere relocation ---------------------------------------------------


def test_relocated_circle_runs_through_scar_tissue() -> None:
    # third collapse step of <125>: the interface circle for units {3,4}
    # crosses vertices merged by both earlier steps.
    tr = chain_run("<125>", "collapse")
    step = tr.steps[2]
    k = tr.complexes[2]
    assert step.sphere == (2, 3, 74, 78, 80, 83, 110, 114, 116, 117, 126, 127)
    patterns = {
        i: k.cells[i].pattern for i in step.sphere if k.cells[i].dim == 0
    }
    assert patterns == {
        2: (fs(1, 2), fs(3, 4)),
        3: (fs(3, 4), fs(1, 2)),
        74: (fs(2), fs(3, 4)),
        78: (fs(3, 4), fs(2)),
        110: (fs(1), fs(3, 4)),
        114: (fs(3, 4), fs(1)),
    }
    kinds = {i: k.cells[i].label[0] for i in patterns}
    assert kinds == {
        2: "osp",
        3: "osp",
        74: "iface",
        78: "iface",
        110: "iface",
        114: "iface",
    }
    edges = {
        k.cells[i].facets
        for i in step.sphere
        if k.cells[i].dim == 1
    }
    assert edges == {(2, 74), (3, 78), (2, 110), (3, 114), (78, 110), (74, 114)}
    # one hexagon: 3-114-74-2-110-78-3
    walk = [3, 114, 74, 2, 110, 78, 3]
    for a, b in zip(walk, walk[1:]):
        assert tuple(sorted((a, b))) in edges


def test_sphere_cells_predicate() -> None:
    k = coxeter_complex(range(1, 5))
    ids = sphere_cells(k, fs(2, 3, 4))
    cells = [k.cells[i] for i in ids]
    assert [c.dim for c in cells] == [0, 0]
    assert {c.pattern for c in cells} == {
        (fs(1), fs(2, 3, 4)),
        (fs(2, 3, 4), fs(1)),
    }


def test_locate_sphere_missing_stratum() -> None:
    k = coxeter_complex(range(1, 5))
    with pytest.raises(SphereRelocationFailedError):
        locate_sphere(k, fs(1, 2, 3, 4))


# -- guard rails ---------------------------------------------------------


def test_chain_needs_five_edges() -> None:
    with pytest.raises(Not2DError):
        run_chain(parse_code("<4>"))
    with pytest.raises(Not2DError):
        run_chain(parse_code("<6>"))


def test_chain_rejects_empty_space() -> None:
    with pytest.raises(NotApplicableError):
        run_chain(GeneticCode(5, []))


def test_unknown_mode() -> None:
    k = coxeter_complex(range(1, 5))
    sphere = locate_sphere(k, fs(2, 3, 4))
    with pytest.raises(NotApplicableError):
        surgery_2d(k, sphere, fs(2, 3, 4), mode="sideways")


def test_surgery_needs_a_surface() -> None:
    k = coxeter_complex(range(1, 6))
    with pytest.raises(Not2DError):
        surgery_2d(k, (0,), fs(2, 3, 4, 5))


def test_open_complex_fails_the_closed_audit() -> None:
    k = coxeter_complex(range(1, 5))
    top = next(c.ident for c in k if c.dim == 2)
    disk = k.materialize(k.faces_of(top) | {top})
    with pytest.raises(AuditError):
        surgery_2d(disk, tuple(sphere_cells(disk, fs(3, 4))), fs(3, 4))


# -- step loci and poset shadows -----------------------------------------


def test_step_locus_partition() -> None:
    code = parse_code("<5>")
    assert step_locus(code, {1, 5}) == canonical_partition(
        [(1,), (5,), (2, 3, 4)]
    )
    assert step_locus(parse_code("<15>"), {2, 5}) == canonical_partition(
        [(2,), (5,), (1, 3, 4)]
    )
    assert step_locus(parse_code("<25>"), {1, 2, 5}) == canonical_partition(
        [(1,), (2,), (5,), (3, 4)]
    )


@pytest.mark.parametrize("name", ["<45>", "<125>", "<126>"])
def test_poset_shadow_of_each_step(name: str) -> None:
    # cutting the big complex along a stratum shows up in the intersection
    # poset as combinatorial surgery at that stratum's partition.
    from polygonspaces.genetics import saturated_chain

    chain = saturated_chain(parse_code(name))
    for before, after, added in zip(
        chain.codes, chain.codes[1:], chain.added_sets
    ):
        locus = step_locus(before, added)
        shadow = comb_surgery(intersection_poset(before), locus)
        target = intersection_poset(after)
        assert len(shadow) == len(target)
        assert poset_isomorphic(shadow, target) is not None


# -- homotopy models ------------------------------------------------------


def test_model_points() -> None:
    res = model_run("<3>")
    assert res.steps == ()
    assert identify_small(res.complex) == "2 points"


def test_model_single_circle() -> None:
    res = model_run("<4>")
    assert homology(res.complex).betti == (1, 1)
    assert identify_small(res.complex) == "1 circle"


def test_model_two_circles() -> None:
    res = model_run("<14>")
    assert len(res.steps) == 1
    assert res.steps[0].units == (2, 3)
    rep = homology(res.complex)
    assert rep.betti == (2, 2)
    assert identify_small(res.complex) == "2 circles"


def test_model_matches_exact_surfaces() -> None:
    for name in ("<5>", "<15>"):
        rep = homology(model_run(name).complex)
        exact = homology(chain_run(name, "collapse").final)
        assert rep.betti == exact.betti
        assert rep.torsion == exact.torsion


def test_model_interference() -> None:
    for name in ("<45>", "<125>", "<26>", "<126>"):
        with pytest.raises(ChainInterferenceError):
            run_model(parse_code(name))


def test_model_three_sphere() -> None:
    res = model_run("<6>")
    assert res.steps == ()
    rep = homology(res.complex)
    assert rep.betti == betti_oracle(parse_code("<6>")) == (1, 0, 0, 1)
    assert not rep.has_torsion()


# -- pattern utilities ----------------------------------------------------

blocks = st.lists(
    st.frozensets(st.integers(1, 6), min_size=1), min_size=1, max_size=4
)


@given(blocks, st.frozensets(st.integers(1, 6)))
def test_restrict_pattern_drops_empty_blocks(pattern, units) -> None:
    out = restrict_pattern(tuple(pattern), units)
    assert all(b and b <= units for b in out)
    assert restrict_pattern(out, units) == out


@given(blocks, st.frozensets(st.integers(1, 6)))
def test_restrict_pattern_commutes_with_reversal(pattern, units) -> None:
    out = restrict_pattern(tuple(reversed(pattern)), units)
    assert out == tuple(reversed(restrict_pattern(tuple(pattern), units)))
