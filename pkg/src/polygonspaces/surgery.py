"""Cellular surgery on polygon-space complexes.

A genetic code is reached from the minimal code by a saturated chain of
single-set additions.  Each addition is realized geometrically: locate the
subcomplex spanned by cells whose pattern keeps the complement units in a
single block (an embedded sphere), cut out its neighborhood, and close the
two resulting boundary cycles.  Two closures are supported on surfaces:

* ``attach``: insert explicit new cells (a prism tube between the two
  cycles of an index-zero surgery, one capping disk per cycle of an
  index-one surgery; in projective complexes the tube folds to a band),
* ``collapse``: insert no interior cells (identify the two cycles of an
  index-zero surgery point by point, crush each cycle of an index-one
  surgery to a cone vertex).

``run_chain`` drives a whole saturated chain on the five-edge surfaces.
``run_model`` handles any dimension by a simplicial mapping-cylinder
construction: complement of the sphere neighborhoods in the subdivided
complex, glued along the frontier onto the subdivided sphere links, all
sphere boundaries of one surgery landing on a single copy of the link.
Every step is audited; failures raise rather than degrade.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .coxeter import (
    Cell,
    RegularCellComplex,
    coxeter_complex,
    projective_quotient,
)
from .errors import (
    AuditError,
    ChainInterferenceError,
    FixedCellError,
    Not2DError,
    NotApplicableError,
    NotFullError,
    ProjectionNotSimplicialError,
    SphereNotEmbeddedError,
    SphereRelocationFailedError,
)
from .genetics import GeneticCode, saturated_chain
from .homology import (
    SimplicialComplex,
    _chain_simplices,
    barycentric,
    homology,
    subdivide,
)
from .posets import canonical_partition


def restrict_pattern(pattern: tuple, units: frozenset) -> tuple:
    """Keep only the given units in each block, dropping emptied blocks."""
    return tuple(b & units for b in pattern if b & units)


def _pattern_key(pattern: tuple) -> tuple:
    return tuple(tuple(sorted(b)) for b in pattern)


def _canonical_pattern_key(pattern: tuple) -> tuple:
    forward = _pattern_key(pattern)
    backward = _pattern_key(tuple(reversed(pattern)))
    return min(forward, backward)


# ---------------------------------------------------------------------------
# Locating spheres.
# ---------------------------------------------------------------------------


def sphere_cells(
    complex_: RegularCellComplex, units: frozenset
) -> tuple[int, ...]:
    """Cells whose pattern keeps all of ``units`` inside a single block."""
    return tuple(
        sorted(
            c.ident
            for c in complex_
            if c.pattern and any(units <= b for b in c.pattern)
        )
    )


def locate_sphere(
    complex_: RegularCellComplex,
    units: frozenset,
    projective: bool = False,
) -> tuple[int, ...]:
    """Find and audit the embedded surgery sphere for a unit set."""
    ids = sphere_cells(complex_, units)
    if not ids:
        raise SphereRelocationFailedError(
            f"no cells keep units {sorted(units)} together"
        )
    id_set = set(ids)
    for i in ids:
        for f in complex_.cells[i].facets:
            if f not in id_set:
                raise SphereRelocationFailedError(
                    f"sphere is not a closed subcomplex at cell {i}"
                )
    dims = [complex_.cells[i].dim for i in ids]
    index = max(dims)
    if index == 0:
        expected = 1 if projective else 2
        if len(ids) != expected:
            raise SphereRelocationFailedError(
                f"point sphere has {len(ids)} vertices, expected {expected}"
            )
    elif index == 1:
        verts = [i for i in ids if complex_.cells[i].dim == 0]
        edges = [i for i in ids if complex_.cells[i].dim == 1]
        degree: dict[int, int] = {v: 0 for v in verts}
        for e in edges:
            for v in complex_.cells[e].facets:
                degree[v] += 1
        if len(verts) != len(edges) or any(d != 2 for d in degree.values()):
            raise SphereRelocationFailedError(
                "circle sphere is not a plain cycle"
            )
        seen = {verts[0]}
        frontier = [verts[0]]
        incident: dict[int, list[int]] = {v: [] for v in verts}
        for e in edges:
            for v in complex_.cells[e].facets:
                incident[v].append(e)
        while frontier:
            v = frontier.pop()
            for e in incident[v]:
                for w in complex_.cells[e].facets:
                    if w not in seen:
                        seen.add(w)
                        frontier.append(w)
        if len(seen) != len(verts):
            raise SphereRelocationFailedError("circle sphere is disconnected")
    else:
        rep = homology(complex_.materialize(ids))
        want = tuple(
            1 if k in (0, index) else 0 for k in range(index + 1)
        )
        if rep.betti != want or rep.has_torsion():
            raise SphereRelocationFailedError(
                f"candidate has homology {rep}, not a {index}-sphere"
            )
    if not adjacent_cells(complex_, frozenset(ids)):
        raise NotApplicableError("sphere has no complement to cut from")
    return ids


def adjacent_cells(
    complex_: RegularCellComplex, sphere: frozenset
) -> frozenset:
    return frozenset(
        c.ident
        for c in complex_
        if c.ident not in sphere and complex_.faces_of(c.ident) & sphere
    )


def _audit_closed_surface(complex_: RegularCellComplex) -> None:
    counts: dict[int, int] = {}
    for c in complex_:
        if c.dim == 2:
            for e in c.facets:
                counts[e] = counts.get(e, 0) + 1
    for c in complex_:
        if c.dim == 1 and counts.get(c.ident, 0) != 2:
            raise AuditError(
                f"edge {c.ident} lies in {counts.get(c.ident, 0)} faces; "
                "the complex is not a closed surface"
            )


# ---------------------------------------------------------------------------
# Surface surgery.
# ---------------------------------------------------------------------------


def _face_flanks(
    complex_: RegularCellComplex, face: Cell, sphere: frozenset
) -> tuple[tuple[int, int], tuple[int, int]]:
    """The two (edge, sphere-vertex) pairs where an adjacent face leaves
    the sphere.  The face's trace on the sphere must be a single vertex
    or a single path of edges."""
    boundary = face.facets
    arc_edges = [e for e in boundary if e in sphere]
    touched = {
        v
        for e in boundary
        for v in complex_.cells[e].facets
        if v in sphere
    }
    if not arc_edges:
        if len(touched) != 1:
            raise SphereNotEmbeddedError(
                f"face {face.ident} touches the sphere at "
                f"{len(touched)} separate corners"
            )
        v = next(iter(touched))
        flanks = [
            e for e in boundary if v in complex_.cells[e].facets
        ]
        if len(flanks) != 2:
            raise AuditError(f"corner {v} of face {face.ident} is singular")
        a, b = sorted(flanks)
        return ((a, v), (b, v))
    count: dict[int, int] = {}
    for e in arc_edges:
        for v in complex_.cells[e].facets:
            count[v] = count.get(v, 0) + 1
    ends = sorted(v for v, k in count.items() if k == 1)
    if len(ends) != 2 or any(k > 2 for k in count.values()):
        raise SphereNotEmbeddedError(
            f"face {face.ident} meets the sphere in more than a path"
        )
    if set(count) != touched:
        raise SphereNotEmbeddedError(
            f"face {face.ident} touches the sphere beside its arc"
        )
    seen = {arc_edges[0]}
    frontier = [arc_edges[0]]
    at: dict[int, list[int]] = {}
    for e in arc_edges:
        for v in complex_.cells[e].facets:
            at.setdefault(v, []).append(e)
    while frontier:
        e = frontier.pop()
        for v in complex_.cells[e].facets:
            for e2 in at[v]:
                if e2 not in seen:
                    seen.add(e2)
                    frontier.append(e2)
    if len(seen) != len(arc_edges):
        raise SphereNotEmbeddedError(
            f"face {face.ident} meets the sphere in several arcs"
        )
    flanks = []
    for v in ends:
        fl = [
            e
            for e in boundary
            if e not in seen and v in complex_.cells[e].facets
        ]
        if len(fl) != 1:
            raise AuditError(f"arc end {v} of face {face.ident} is singular")
        flanks.append((fl[0], v))
    return (flanks[0], flanks[1])


def surgery_2d(
    complex_: RegularCellComplex,
    sphere: tuple[int, ...],
    units: frozenset,
    *,
    mode: str = "attach",
    projective: bool = False,
) -> RegularCellComplex:
    """One surgery step on a closed surface complex.

    ``sphere`` is the audited cell set to remove, ``units`` the element
    set that interface patterns are restricted to.
    """
    if mode not in ("attach", "collapse"):
        raise NotApplicableError(f"unknown surgery mode {mode!r}")
    if complex_.dim != 2:
        raise Not2DError(
            f"direct surgery needs a surface, got dimension {complex_.dim}"
        )
    _audit_closed_surface(complex_)
    sphere = frozenset(sphere)
    index = max(complex_.cells[i].dim for i in sphere)
    if index > 1:
        raise Not2DError(f"a surface admits no index-{index} surgery")

    adjacent = adjacent_cells(complex_, sphere)
    adj_edges = sorted(
        i for i in adjacent if complex_.cells[i].dim == 1
    )
    adj_faces = sorted(
        i for i in adjacent if complex_.cells[i].dim == 2
    )
    if any(complex_.cells[i].dim == 0 for i in adjacent):
        raise AuditError("a vertex cannot be adjacent to the sphere")

    # each adjacent edge leaves the sphere from exactly one endpoint
    edge_exit: dict[int, tuple[int, int]] = {}
    for e in adj_edges:
        far = [v for v in complex_.cells[e].facets if v not in sphere]
        if len(far) != 1:
            raise SphereNotEmbeddedError(
                f"edge {e} has {2 - len(far)} endpoints on the sphere"
            )
        (far_v,) = far
        (pole,) = [v for v in complex_.cells[e].facets if v in sphere]
        edge_exit[e] = (far_v, pole)

    face_flanks = {
        f: _face_flanks(complex_, complex_.cells[f], sphere)
        for f in adj_faces
    }

    # interface combinatorics: one node per (edge, sphere endpoint), one
    # link per adjacent face; the links must chain the nodes into cycles
    nodes = sorted((e, edge_exit[e][1]) for e in adj_edges)
    node_pattern = {
        (e, v): restrict_pattern(complex_.cells[e].pattern, units)
        for e, v in nodes
    }
    degree = {key: 0 for key in nodes}
    for f in adj_faces:
        for key in face_flanks[f]:
            if key not in degree:
                raise AuditError(f"face {f} flanks a non-adjacent edge")
            degree[key] += 1
    if any(d != 2 for d in degree.values()):
        raise AuditError("interface nodes do not chain into cycles")

    parent = {key: key for key in nodes}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in adj_faces:
        a, b = face_flanks[f]
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    members: dict = {}
    for key in nodes:
        members.setdefault(find(key), []).append(key)
    cycles = sorted(min(group) for group in members.values())
    cycle_index = {root: i for i, root in enumerate(cycles)}
    side = {
        key: cycle_index[min(members[find(key)])] for key in nodes
    }

    out = RegularCellComplex(first_ident=complex_._next)
    removed = sphere | adjacent
    kept = [c for c in complex_ if c.ident not in removed]
    for c in sorted(kept, key=lambda c: (c.dim, c.ident)):
        out.add_cell(c.dim, c.label, c.facets, c.pattern, ident=c.ident)

    new_vertex: dict[tuple[int, int], int] = {}
    vertex_groups: dict = {}
    face_groups: dict = {}
    rung_cell: dict = {}
    cone_cell: dict[int, int] = {}
    iface_edge: dict[int, int] = {}

    def pattern_map(keys) -> dict:
        got: dict = {}
        for key in keys:
            pk = _pattern_key(node_pattern[key])
            if pk in got:
                raise AuditError(
                    f"two interface nodes share the pattern {pk}"
                )
            got[pk] = key
        return got

    if index == 0:
        if projective:
            if len(cycles) != 1:
                raise AuditError(
                    f"folded surgery expects one cycle, found {len(cycles)}"
                )
            groups: dict = {}
            for key in nodes:
                groups.setdefault(
                    _canonical_pattern_key(node_pattern[key]), []
                ).append(key)
            for ck, pair in sorted(groups.items()):
                if len(pair) != 2:
                    raise AuditError(
                        f"pattern orbit {ck} has {len(pair)} nodes, not 2"
                    )
                vertex_groups[ck] = tuple(sorted(pair))
            fgroups: dict = {}
            for f in adj_faces:
                fgroups.setdefault(
                    _canonical_pattern_key(
                        restrict_pattern(complex_.cells[f].pattern, units)
                    ),
                    [],
                ).append(f)
            for ck, pair in sorted(fgroups.items()):
                if len(pair) != 2:
                    raise AuditError(
                        f"face orbit {ck} has {len(pair)} members, not 2"
                    )
                face_groups[ck] = tuple(sorted(pair))
        else:
            if len(cycles) != 2:
                raise AuditError(
                    f"point surgery expects two cycles, found {len(cycles)}"
                )
            sides = [
                [key for key in nodes if side[key] == s] for s in (0, 1)
            ]
            left, right = pattern_map(sides[0]), pattern_map(sides[1])
            if set(left) != set(right):
                raise AuditError(
                    "the two interface cycles carry different patterns"
                )
            for pk in sorted(left):
                vertex_groups[pk] = (left[pk], right[pk])
            fsides: list[dict] = [{}, {}]
            for f in adj_faces:
                s = side[face_flanks[f][0]]
                if side[face_flanks[f][1]] != s:
                    raise AuditError(f"face {f} straddles both cycles")
                pk = _pattern_key(
                    restrict_pattern(complex_.cells[f].pattern, units)
                )
                if pk in fsides[s]:
                    raise AuditError(
                        f"two faces on one cycle share the pattern {pk}"
                    )
                fsides[s][pk] = f
            if set(fsides[0]) != set(fsides[1]):
                raise AuditError(
                    "the two cycles see different face patterns"
                )
            for pk in sorted(fsides[0]):
                face_groups[pk] = (fsides[0][pk], fsides[1][pk])

    # vertices of the result
    if index == 0 and mode == "collapse":
        for gk, (a, b) in sorted(vertex_groups.items()):
            ident = out.add_cell(
                0,
                ("iface", ("join", a, b)),
                pattern=node_pattern[a],
            )
            new_vertex[a] = ident
            new_vertex[b] = ident
    elif index == 1 and mode == "collapse":
        for root in cycles:
            s = cycle_index[root]
            cone_cell[s] = out.add_cell(0, ("cone", root))
        for key in nodes:
            new_vertex[key] = cone_cell[side[key]]
    else:
        for key in nodes:
            new_vertex[key] = out.add_cell(
                0, ("iface", key), pattern=node_pattern[key]
            )

    # truncated edges
    trunc_edge: dict[int, int] = {}
    for e in adj_edges:
        far_v, pole = edge_exit[e]
        cell = complex_.cells[e]
        trunc_edge[e] = out.add_cell(
            1,
            ("trunc", cell.label),
            (far_v, new_vertex[(e, pole)]),
            cell.pattern,
        )

    # interface edges
    if mode == "attach":
        for f in adj_faces:
            a, b = face_flanks[f]
            iface_edge[f] = out.add_cell(
                1,
                ("iface", (f,)),
                (new_vertex[a], new_vertex[b]),
                restrict_pattern(complex_.cells[f].pattern, units),
            )
    elif index == 0:
        for gk, (f1, f2) in sorted(face_groups.items()):
            a1, b1 = face_flanks[f1]
            a2, b2 = face_flanks[f2]
            ends = {new_vertex[a1], new_vertex[b1]}
            if ends != {new_vertex[a2], new_vertex[b2]}:
                raise AuditError(
                    f"faces {f1} and {f2} do not meet matching nodes"
                )
            ident = out.add_cell(
                1,
                ("iface", ("join", f1, f2)),
                (new_vertex[a1], new_vertex[b1]),
                restrict_pattern(complex_.cells[f1].pattern, units),
            )
            iface_edge[f1] = ident
            iface_edge[f2] = ident

    # rungs of the tube or band
    if index == 0 and mode == "attach":
        for gk, (a, b) in sorted(vertex_groups.items()):
            rung_cell[gk] = out.add_cell(
                1,
                ("cap", ("rung", a, b)),
                (new_vertex[a], new_vertex[b]),
                node_pattern[a],
            )
        group_of_node = {}
        for gk, pair in vertex_groups.items():
            for key in pair:
                group_of_node[key] = gk

    # truncated faces
    trunc_face: dict[int, int] = {}
    for f in adj_faces:
        cell = complex_.cells[f]
        flanks = face_flanks[f]
        arc = {e for e in cell.facets if e in sphere}
        flank_edges = {e for e, _ in flanks}
        facets = [
            e for e in cell.facets if e not in arc and e not in flank_edges
        ]
        facets += [trunc_edge[e] for e, _ in flanks]
        if f in iface_edge:
            facets.append(iface_edge[f])
        trunc_face[f] = out.add_cell(
            2, ("trunc", cell.label), facets, cell.pattern
        )

    # closing cells
    if index == 0 and mode == "attach":
        for gk, (f1, f2) in sorted(face_groups.items()):
            g1 = group_of_node[face_flanks[f1][0]]
            g2 = group_of_node[face_flanks[f1][1]]
            if {group_of_node[k] for k in face_flanks[f2]} != {g1, g2}:
                raise AuditError(
                    f"faces {f1} and {f2} do not span matching rungs"
                )
            out.add_cell(
                2,
                ("cap", ("quad", f1, f2)),
                (iface_edge[f1], iface_edge[f2], rung_cell[g1], rung_cell[g2]),
                restrict_pattern(complex_.cells[f1].pattern, units),
            )
    elif index == 1 and mode == "attach":
        for root in cycles:
            s = cycle_index[root]
            rim = sorted(
                {
                    iface_edge[f]
                    for f in adj_faces
                    if side[face_flanks[f][0]] == s
                }
            )
            out.add_cell(2, ("cap", ("disk", root)), rim)

    # carry the involution through, when there is one
    if complex_.involution and not projective:
        _carry_involution(
            complex_,
            out,
            kept=[c.ident for c in kept],
            new_vertex=new_vertex,
            trunc_edge=trunc_edge,
            iface_edge=iface_edge,
            trunc_face=trunc_face,
            face_flanks=face_flanks,
            mode=mode,
            index=index,
            cycles=cycles,
            cycle_index=cycle_index,
            side=side,
            cone_cell=cone_cell,
            rung_cell=rung_cell,
            vertex_groups=vertex_groups,
            face_groups=face_groups,
        )

    out.seal()
    _audit_closed_surface(out)
    return out


def _carry_involution(
    complex_,
    out,
    *,
    kept,
    new_vertex,
    trunc_edge,
    iface_edge,
    trunc_face,
    face_flanks,
    mode,
    index,
    cycles,
    cycle_index,
    side,
    cone_cell,
    rung_cell,
    vertex_groups,
    face_groups,
) -> None:
    inv = complex_.involution
    kept_set = set(kept)
    for i in kept:
        if inv[i] not in kept_set:
            raise AuditError(f"involution moves kept cell {i} off the kept set")
        out.pair(i, inv[i])
    for e, t in trunc_edge.items():
        out.pair(t, trunc_edge[inv[e]])
    for f, t in trunc_face.items():
        out.pair(t, trunc_face[inv[f]])

    def node_image(key):
        e, v = key
        return (inv[e], inv[v])

    paired: set[int] = set()

    def pair_once(a: int, b: int) -> None:
        if a in paired and out.involution.get(a) == b:
            return
        out.pair(a, b)
        paired.add(a)
        paired.add(b)

    for key, cell in new_vertex.items():
        pair_once(cell, new_vertex[node_image(key)])
    for f, cell in iface_edge.items():
        pair_once(cell, iface_edge[inv[f]])
    if index == 0 and mode == "attach":
        group_of_node = {}
        for gk, pair in vertex_groups.items():
            for key in pair:
                group_of_node[key] = gk
        for gk, (a, b) in vertex_groups.items():
            pair_once(rung_cell[gk], rung_cell[group_of_node[node_image(a)]])
        quad_of_face = {}
        for gk, (f1, f2) in face_groups.items():
            ident = out.by_label(("cap", ("quad", f1, f2)))
            quad_of_face[f1] = ident
            quad_of_face[f2] = ident
        for f1, ident in quad_of_face.items():
            pair_once(ident, quad_of_face[inv[f1]])
    if index == 1:
        side_image = {}
        for key in side:
            s, t = side[key], side[node_image(key)]
            if side_image.setdefault(s, t) != t:
                raise AuditError("involution shears the boundary cycles")
        if mode == "collapse":
            for s, c in cone_cell.items():
                pair_once(c, cone_cell[side_image[s]])
        else:
            cap_of_side = {
                cycle_index[root]: out.by_label(("cap", ("disk", root)))
                for root in cycles
            }
            for s, c in cap_of_side.items():
                pair_once(c, cap_of_side[side_image[s]])


# ---------------------------------------------------------------------------
# Chain driver for surfaces.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ChainStep:
    code: str
    added: tuple[int, ...]
    index: int
    sphere: tuple[int, ...]
    f_before: tuple[int, ...]
    f_after: tuple[int, ...]


@dataclass(frozen=True)
class SurgeryTrace:
    code: str
    mode: str
    projective: bool
    steps: tuple[ChainStep, ...]
    complexes: tuple[RegularCellComplex, ...]

    @property
    def final(self) -> RegularCellComplex:
        return self.complexes[-1]


def run_chain(
    code: GeneticCode,
    *,
    mode: str = "attach",
    projective: bool = False,
) -> SurgeryTrace:
    """Build the surface of a five-edge genetic code by iterated surgery."""
    if code.is_empty_space():
        raise NotApplicableError("the space of this code is empty")
    if code.edge_count != 5:
        raise Not2DError(
            f"direct surgery runs on five edges, got {code.edge_count}"
        )
    ground = frozenset(range(1, code.edge_count))
    chain = saturated_chain(code)
    current = coxeter_complex(ground)
    if projective:
        current, _ = projective_quotient(current)
    complexes = [current]
    steps = []
    for nxt, added in zip(chain.codes[1:], chain.added_sets):
        rest = frozenset(added) - {code.edge_count}
        units = ground - rest
        sphere = locate_sphere(current, units, projective)
        before = current.f_vector()
        current = surgery_2d(
            current, sphere, units, mode=mode, projective=projective
        )
        steps.append(
            ChainStep(
                code=str(nxt),
                added=tuple(sorted(added)),
                index=len(rest) - 1,
                sphere=sphere,
                f_before=before,
                f_after=current.f_vector(),
            )
        )
        complexes.append(current)
    return SurgeryTrace(
        str(code), mode, projective, tuple(steps), tuple(complexes)
    )


# ---------------------------------------------------------------------------
# Mapping-cylinder model for any dimension.
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ModelStep:
    added: tuple[int, ...]
    units: tuple[int, ...]
    sphere: tuple[int, ...]


@dataclass(frozen=True)
class ModelResult:
    code: str
    steps: tuple[ModelStep, ...]
    complex: SimplicialComplex


def _support(vertex) -> frozenset:
    if isinstance(vertex, tuple):
        out: frozenset = frozenset()
        for v in vertex:
            out |= _support(v)
        return out
    return frozenset((vertex,))


def _build_model(
    complex_: RegularCellComplex,
    jobs: list[tuple[frozenset, tuple[int, ...]]],
    depth: int,
) -> SimplicialComplex:
    ambient = barycentric(complex_)
    for _ in range(depth - 1):
        ambient = subdivide(ambient)
    spheres = [frozenset(sphere) for _, sphere in jobs]
    sphere_all = frozenset().union(*spheres)
    supports = {v: _support(v) for v in ambient.vertices}
    far = {v for v, sup in supports.items() if not sup & sphere_all}
    if not far or len(far) == len(supports):
        raise NotFullError(
            "the sphere neighborhoods leave no room for a complement"
        )
    bulk = ambient.full_subcomplex(far)

    frontier: list[set[tuple]] = [set() for _ in jobs]
    for m in ambient.maximal_faces():
        hit = {
            i
            for i, sph in enumerate(spheres)
            for v in m
            if supports[v] & sph
        }
        if not hit:
            continue
        if len(hit) > 1:
            raise AuditError("one simplex touches two surgery spheres")
        rest = tuple(v for v in m if v in far)
        if rest:
            frontier[hit.pop()].add(rest)

    links = []
    for (units, _), sph in zip(jobs, spheres):
        link = coxeter_complex(units)
        gmap: dict = {}
        for face_set in frontier[len(links)]:
            for v in face_set:
                if v in gmap:
                    continue
                meets = [
                    cell
                    for cell in supports[v]
                    if complex_.faces_of(cell) & sph
                ]
                if not meets:
                    raise AuditError(
                        f"frontier vertex {v!r} never meets its sphere"
                    )
                cell = min(
                    meets, key=lambda c: (complex_.cells[c].dim, c)
                )
                blocks = restrict_pattern(
                    complex_.cells[cell].pattern, units
                )
                if len(blocks) < 2:
                    raise ProjectionNotSimplicialError(
                        f"projection of cell {cell} degenerates"
                    )
                try:
                    gmap[v] = link.by_label(("osp", blocks))
                except KeyError:
                    raise ProjectionNotSimplicialError(
                        f"projection of cell {cell} misses the link"
                    )
        for face_set in frontier[len(links)]:
            image = sorted({gmap[v] for v in face_set})
            for a, b in itertools.combinations(image, 2):
                if a not in link.faces_of(b) and b not in link.faces_of(a):
                    raise ProjectionNotSimplicialError(
                        f"image of a frontier simplex is no chain: {a}, {b}"
                    )
        links.append((link, gmap))

    simplices: list[tuple] = []
    bulk_faces = [
        f for fs in bulk.faces_by_dim.values() for f in fs
    ]

    def face_strict(face: tuple):
        return [
            sub
            for k in range(1, len(face))
            for sub in itertools.combinations(face, k)
        ]

    for chain in _chain_simplices(bulk_faces, face_strict):
        simplices.append(tuple(("c", f) for f in chain))

    for i, ((units, _), (link, gmap)) in enumerate(zip(jobs, links)):
        fronts = SimplicialComplex(frontier[i])
        front_faces = [
            f for fs in fronts.faces_by_dim.values() for f in fs
        ]
        link_chains = _chain_simplices(
            sorted(link.cells),
            lambda ident: sorted(link.faces_of(ident) - {ident}),
        )
        link_chain_set = set(link_chains)
        elements = [("c", f) for f in front_faces] + [
            ("b", (i, ch)) for ch in link_chains
        ]

        def strict_below(el, i=i, gmap=gmap, link_chain_set=link_chain_set):
            kind, payload = el
            if kind == "b":
                _, ch = payload
                return [
                    ("b", (i, sub))
                    for k in range(1, len(ch))
                    for sub in itertools.combinations(ch, k)
                ]
            below = [("c", sub) for sub in face_strict(payload)]
            image = tuple(sorted({gmap[v] for v in payload}))
            for k in range(1, len(image) + 1):
                for sub in itertools.combinations(image, k):
                    if sub in link_chain_set:
                        below.append(("b", (i, sub)))
            return below

        for chain in _chain_simplices(elements, strict_below):
            simplices.append(chain)

    return SimplicialComplex(simplices)


def run_model(code: GeneticCode) -> ModelResult:
    """Build a simplicial model of the polygon space of any genetic code
    whose chain additions have pairwise disjoint sphere neighborhoods."""
    if code.is_empty_space():
        raise NotApplicableError("the space of this code is empty")
    ground = frozenset(range(1, code.edge_count))
    complex_ = coxeter_complex(ground)
    chain = saturated_chain(code)
    jobs: list[tuple[frozenset, tuple[int, ...]]] = []
    stars: list[frozenset] = []
    infos: list[ModelStep] = []
    for added in chain.added_sets:
        rest = frozenset(added) - {code.edge_count}
        units = ground - rest
        sphere = locate_sphere(complex_, units, projective=False)
        star = frozenset(sphere) | adjacent_cells(
            complex_, frozenset(sphere)
        )
        for earlier, other in zip(stars, jobs):
            if earlier & star:
                raise ChainInterferenceError(
                    "sphere neighborhoods for "
                    f"{sorted(ground - other[0])} and {sorted(rest)} overlap"
                )
        stars.append(star)
        jobs.append((units, sphere))
        infos.append(
            ModelStep(
                added=tuple(sorted(added)),
                units=tuple(sorted(units)),
                sphere=sphere,
            )
        )
    if not jobs:
        return ModelResult(str(code), (), barycentric(complex_))
    try:
        model = _build_model(complex_, jobs, depth=1)
    except ProjectionNotSimplicialError:
        model = _build_model(complex_, jobs, depth=2)
    return ModelResult(str(code), tuple(infos), model)


# ---------------------------------------------------------------------------
# The poset shadow of one surgery step.
# ---------------------------------------------------------------------------


def step_locus(code_before: GeneticCode, added: frozenset):
    """The stratum of the intersection poset that a chain step removes:
    the added set split into singletons against the rest."""
    m = code_before.edge_count
    rest = frozenset(range(1, m + 1)) - added
    return canonical_partition(
        [(j,) for j in sorted(added)] + [tuple(sorted(rest))]
    )
