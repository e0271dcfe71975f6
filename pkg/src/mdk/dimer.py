"""Hexagonal dimer models on the torus, dual to the coamoeba triangles.

The 2n coamoeba triangles become the nodes (white for positive
orientation, black for negative); two triangles sharing a coamoeba vertex
point are joined by an edge, giving a honeycomb with n hexagonal faces.
Edges carry Z^2 winding offsets fixed by node representatives in [0,1)^2,
which is all the height-function machinery needs: the height change of a
perfect matching is an integer flux vector, and the convex hull of all
height changes is the characteristic polygon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .coamoeba import STD_VERTICES, TorusTriangle, fundamental_triangles, shift_classes
from .errors import InvalidGraph, NoInternalMatching, NoMatching
from .lattice import NormalizedTriangle, smith_normal_form

RPoint = tuple[Fraction, Fraction]

# flux (winding) coordinates -> polygon coordinates: rotate by -90 degrees,
# i.e. pair flux against cycles by the intersection form
def _flux_to_polygon(v: tuple[int, int]) -> tuple[int, int]:
    return (v[1], -v[0])


@dataclass(frozen=True)
class DimerNode:
    id: int
    color: str  # "white" | "black"
    pos: RPoint
    triangle: TorusTriangle | None = None

    def to_json(self) -> dict:
        return {"id": self.id, "color": self.color, "pos": [float(self.pos[0]), float(self.pos[1])]}


@dataclass(frozen=True)
class DimerEdge:
    """An edge from a white node to a black node.

    ``offset`` is the Z^2 winding: the segment runs from the white node's
    representative position to the black one's translated by ``offset``.
    ``via`` is an optional interior waypoint (the shared coamoeba vertex),
    in the white node's frame.
    """

    id: int
    white: int
    black: int
    offset: tuple[int, int]
    via: RPoint | None = None
    vertex_class: int = -1

    def to_json(self) -> dict:
        return {"a": self.white, "b": self.black, "offset": list(self.offset)}


Dart = tuple[int, int]  # (edge id, direction); direction +1 = white->black


class DimerModel:
    """A bicolored graph on the torus with a rotation system.

    Faces are derived from the rotation system by face-on-the-left
    traversal; they are available as dart cycles.  Construction validates
    bipartiteness and color balance and raises ``InvalidGraph`` otherwise.
    """

    def __init__(self, nodes: list[DimerNode], edges: list[DimerEdge],
                 nt: NormalizedTriangle | None = None):
        self.nodes = nodes
        self.edges = edges
        self.nt = nt
        if len(nodes) % 2:
            raise InvalidGraph(f"odd node count {len(nodes)}")
        whites = [v for v in nodes if v.color == "white"]
        blacks = [v for v in nodes if v.color == "black"]
        if len(whites) != len(blacks):
            raise InvalidGraph(f"{len(whites)} white vs {len(blacks)} black nodes")
        if {v.color for v in nodes} - {"white", "black"}:
            raise InvalidGraph("node colors must be 'white' or 'black'")
        byid = {v.id: v for v in nodes}
        for e in edges:
            if byid[e.white].color != "white" or byid[e.black].color != "black":
                raise InvalidGraph(f"edge {e.id} does not join white to black")
        self.node_by_id = byid
        self._rotations = self._build_rotations()
        if any(len(r) == 0 for r in self._rotations.values()):
            raise InvalidGraph("isolated node")
        self.faces = self._trace_faces()

    # -- geometry ----------------------------------------------------------

    def dart_endpoints(self, dart: Dart) -> tuple[int, int]:
        e = self.edges[dart[0]]
        return (e.white, e.black) if dart[1] > 0 else (e.black, e.white)

    def dart_displacement(self, dart: Dart) -> RPoint:
        """Real displacement of the dart in the plane (tail rep to head)."""
        e = self.edges[dart[0]]
        w = self.node_by_id[e.white].pos
        b = self.node_by_id[e.black].pos
        disp = (b[0] + e.offset[0] - w[0], b[1] + e.offset[1] - w[1])
        return disp if dart[1] > 0 else (-disp[0], -disp[1])

    def _edge_dir_at(self, e: DimerEdge, node_id: int) -> RPoint:
        """Outgoing direction of edge e at one of its endpoints."""
        if e.via is not None:
            w = self.node_by_id[e.white].pos
            b = self.node_by_id[e.black].pos
            if node_id == e.white:
                return (e.via[0] - w[0], e.via[1] - w[1])
            via_b = (e.via[0] - e.offset[0], e.via[1] - e.offset[1])
            return (via_b[0] - b[0], via_b[1] - b[1])
        d = self.dart_displacement((e.id, 1))
        return d if node_id == e.white else (-d[0], -d[1])

    def _build_rotations(self) -> dict[int, list[Dart]]:
        """CCW cyclic order of outgoing darts at each node, exact angles."""

        def angle_key(vec: RPoint):
            x, y = vec
            if y > 0 or (y == 0 and x > 0):
                half = 0
            else:
                half = 1
            return (half, Fraction(-x, y) if y != 0 else Fraction(-(10**9)))

        rot: dict[int, list[Dart]] = {v.id: [] for v in self.nodes}
        for e in self.edges:
            rot[e.white].append((e.id, 1))
            rot[e.black].append((e.id, -1))
        for vid, darts in rot.items():
            decorated = []
            for dart in darts:
                e = self.edges[dart[0]]
                vec = self._edge_dir_at(e, vid)
                decorated.append((angle_key(vec), dart))
            decorated.sort(key=lambda p: p[0])
            rot[vid] = [d for _, d in decorated]
        return rot

    def _next_in_rotation(self, node_id: int, dart: Dart, step: int) -> Dart:
        order = self._rotations[node_id]
        i = order.index(dart)
        return order[(i + step) % len(order)]

    def _trace_faces(self) -> list[list[Dart]]:
        """Orbits of the face permutation (face on the left of each dart)."""
        all_darts = [(e.id, s) for e in self.edges for s in (1, -1)]
        unused = set(all_darts)
        faces = []
        while unused:
            start = min(unused)
            cycle = []
            dart = start
            while True:
                cycle.append(dart)
                unused.discard(dart)
                head = self.dart_endpoints(dart)[1]
                rev = (dart[0], -dart[1])
                dart = self._next_in_rotation(head, rev, -1)
                if dart == start:
                    break
            faces.append(cycle)
        return faces

    # -- counts ------------------------------------------------------------

    @property
    def n_nodes(self) -> int:
        return len(self.nodes)

    @property
    def n_edges(self) -> int:
        return len(self.edges)

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def euler_characteristic(self) -> int:
        return self.n_nodes - self.n_edges + self.n_faces

    def face_of_dart(self) -> dict[Dart, int]:
        out = {}
        for fi, cycle in enumerate(self.faces):
            for dart in cycle:
                out[dart] = fi
        return out

    def face_nodes(self, fi: int) -> list[int]:
        return [self.dart_endpoints(d)[0] for d in self.faces[fi]]

    def face_polygon(self, fi: int) -> list[RPoint]:
        """Unreduced vertex positions around a face (tail of each dart)."""
        cycle = self.faces[fi]
        pos = list(self.node_by_id[self.dart_endpoints(cycle[0])[0]].pos)
        out = [tuple(pos)]
        for dart in cycle[:-1]:
            d = self.dart_displacement(dart)
            pos[0] += d[0]
            pos[1] += d[1]
            out.append(tuple(pos))
        return out

    def adjacency(self) -> dict[int, list[DimerEdge]]:
        adj: dict[int, list[DimerEdge]] = {v.id: [] for v in self.nodes}
        for e in self.edges:
            adj[e.white].append(e)
            adj[e.black].append(e)
        return adj

    # -- zigzag paths --------------------------------------------------------

    def zigzag_paths(self) -> list[list[Dart]]:
        """All zigzag paths: turn maximally left at white, right at black."""
        unused = {(e.id, s) for e in self.edges for s in (1, -1)}
        paths = []
        while unused:
            start = min(unused)
            path = []
            dart = start
            while True:
                path.append(dart)
                unused.discard(dart)
                head = self.dart_endpoints(dart)[1]
                rev = (dart[0], -dart[1])
                step = 1 if self.node_by_id[head].color == "white" else -1
                dart = self._next_in_rotation(head, rev, step)
                if dart == start:
                    break
            paths.append(path)
        return paths

    def zigzag_classes(self) -> list[tuple[int, int]]:
        """Homology class of each zigzag path, in polygon coordinates."""
        out = []
        for path in self.zigzag_paths():
            dx = Fraction(0)
            dy = Fraction(0)
            for dart in path:
                d = self.dart_displacement(dart)
                dx += d[0]
                dy += d[1]
            assert dx.denominator == 1 and dy.denominator == 1
            out.append(_flux_to_polygon((int(dx), int(dy))))
        return out

    def to_json(self) -> dict:
        return {
            "nodes": [v.to_json() for v in self.nodes],
            "edges": [e.to_json() for e in self.edges],
        }


# For each coamoeba vertex class: its position in the stored vertex tuple
# of the positive / negative triangle (the tuples follow the order of
# STD_TRIANGLE_POS / STD_TRIANGLE_NEG), and the Z^2 shift between the two
# standard representatives, which moves the black copy's fundamental-domain
# class relative to the white one.
_CLASS_DATA = {
    # vertex class: (index in pos triangle, index in neg triangle, rep shift)
    (Fraction(0), Fraction(1, 2)): (0, 2, (-1, 0)),   # pos uses (0,1/2), neg uses (1,1/2)
    (Fraction(1, 2), Fraction(0)): (2, 0, (0, 1)),    # pos uses (1/2,1), neg uses (1/2,0)
    (Fraction(1, 2), Fraction(1, 2)): (1, 1, (0, 0)),
}


def build_hexagonal_dimer(nt: NormalizedTriangle) -> DimerModel:
    """The honeycomb dimer dual to the 2n coamoeba triangles.

    White nodes sit at barycenters of positively oriented pullback
    triangles, black nodes at the negative ones; one edge per shared
    coamoeba vertex point, 3n in total, leaving n hexagonal faces.
    """
    tris = fundamental_triangles(nt)
    shifts = shift_classes(nt)
    index_of_shift = {s: i for i, s in enumerate(shifts)}
    pos_tri = {t.shift_class: t for t in tris if t.orientation > 0}
    neg_tri = {t.shift_class: t for t in tris if t.orientation < 0}

    n = nt.n
    nodes = []
    for i, s in enumerate(shifts):
        t = pos_tri[s]
        nodes.append(DimerNode(id=i, color="white", pos=t.barycenter, triangle=t))
    for i, s in enumerate(shifts):
        t = neg_tri[s]
        nodes.append(DimerNode(id=n + i, color="black", pos=t.barycenter, triangle=t))

    # reduction of an arbitrary shift to its transversal representative
    u, d, _ = smith_normal_form(nt.psi)
    d1, d2 = d[0][0], d[1][1]
    det_u = u[0][0] * u[1][1] - u[0][1] * u[1][0]
    uinv = ((u[1][1] * det_u, -u[0][1] * det_u), (-u[1][0] * det_u, u[0][0] * det_u))

    def reduce_shift(m: tuple[int, int]) -> tuple[int, int]:
        i = (u[0][0] * m[0] + u[0][1] * m[1]) % d1
        j = (u[1][0] * m[0] + u[1][1] * m[1]) % d2
        return (uinv[0][0] * i + uinv[0][1] * j, uinv[1][0] * i + uinv[1][1] * j)

    edges = []
    for s in shifts:
        wtri = pos_tri[s]
        wid = index_of_shift[s]
        for ci, vclass in enumerate(STD_VERTICES):
            wi, bi, delta = _CLASS_DATA[vclass]
            m_b = reduce_shift((s[0] + delta[0], s[1] + delta[1]))
            btri = neg_tri[m_b]
            bid = n + index_of_shift[m_b]
            # the shared coamoeba vertex point, in each stored frame; the
            # frames differ by the integral winding offset of the edge
            q_w = wtri.vertices[wi]
            q_b = btri.vertices[bi]
            sigma = (q_w[0] - q_b[0], q_w[1] - q_b[1])
            assert sigma[0].denominator == 1 and sigma[1].denominator == 1, (q_w, q_b)
            edges.append(
                DimerEdge(
                    id=len(edges),
                    white=wid,
                    black=bid,
                    offset=(int(sigma[0]), int(sigma[1])),
                    via=q_w,
                    vertex_class=ci,
                )
            )
    return DimerModel(nodes, edges, nt=nt)


# -- perfect matchings -------------------------------------------------------


Matching = frozenset[int]


def perfect_matchings(g: DimerModel) -> list[Matching]:
    """Exhaustive enumeration by backtracking over the node cover order."""
    adj = g.adjacency()
    node_ids = [v.id for v in g.nodes]
    out: list[Matching] = []
    chosen: list[int] = []
    covered: set[int] = set()

    def extend():
        remaining = [v for v in node_ids if v not in covered]
        if not remaining:
            out.append(frozenset(chosen))
            return
        v = remaining[0]
        for e in adj[v]:
            other = e.black if e.white == v else e.white
            if other in covered:
                continue
            chosen.append(e.id)
            covered.add(v)
            covered.add(other)
            extend()
            chosen.pop()
            covered.discard(v)
            covered.discard(other)

    extend()
    if not out:
        raise NoMatching(f"graph with {g.n_nodes} nodes admits no perfect matching")
    return out


def matching_count_oracle(g: DimerModel) -> int:
    """Independent matching count by recursive node deletion (no listing)."""
    adj = {v.id: [] for v in g.nodes}
    for e in g.edges:
        adj[e.white].append((e.black, e.id))
        adj[e.black].append((e.white, e.id))

    def count(remaining: frozenset[int]) -> int:
        if not remaining:
            return 1
        v = min(remaining, key=lambda u: sum(1 for w, _ in adj[u] if w in remaining))
        total = 0
        for w, _ in adj[v]:
            if w in remaining:
                total += count(remaining - {v, w})
        return total

    return count(frozenset(v.id for v in g.nodes))


def matching_height(g: DimerModel, m: Matching) -> tuple[int, int]:
    """Total winding flux of a matching, in polygon coordinates."""
    fx = sum(g.edges[i].offset[0] for i in m)
    fy = sum(g.edges[i].offset[1] for i in m)
    return _flux_to_polygon((fx, fy))


# -- lattice polygons --------------------------------------------------------


@dataclass(frozen=True)
class LatticePolygon:
    """A convex lattice polygon, vertices CCW from the lexicographic min."""

    vertices: tuple[tuple[int, int], ...]

    @staticmethod
    def hull(points) -> "LatticePolygon":
        pts = sorted(set((int(x), int(y)) for x, y in points))
        if len(pts) == 1:
            return LatticePolygon((pts[0],))
        def half(points_iter):
            out = []
            for p in points_iter:
                while len(out) >= 2 and _cross3(out[-2], out[-1], p) <= 0:
                    out.pop()
                out.append(p)
            return out
        lower = half(pts)
        upper = half(reversed(pts))
        verts = lower[:-1] + upper[:-1]
        if len(verts) > 1:
            start = min(range(len(verts)), key=lambda i: verts[i])
            verts = verts[start:] + verts[:start]
        return LatticePolygon(tuple(verts))

    def translate(self, v: tuple[int, int]) -> "LatticePolygon":
        return LatticePolygon(tuple((x + v[0], y + v[1]) for x, y in self.vertices))

    def contains_interior(self, p: tuple[int, int]) -> bool:
        verts = self.vertices
        k = len(verts)
        if k < 3:
            return False
        return all(_cross3(verts[i], verts[(i + 1) % k], p) > 0 for i in range(k))

    def interior_lattice_points(self) -> list[tuple[int, int]]:
        xs = [v[0] for v in self.vertices]
        ys = [v[1] for v in self.vertices]
        out = []
        for x in range(min(xs), max(xs) + 1):
            for y in range(min(ys), max(ys) + 1):
                if self.contains_interior((x, y)):
                    out.append((x, y))
        return out

    def boundary_edge_vectors(self) -> list[tuple[int, int]]:
        """Primitive CCW edge vectors with multiplicity = lattice length."""
        out = []
        k = len(self.vertices)
        for i in range(k):
            x0, y0 = self.vertices[i]
            x1, y1 = self.vertices[(i + 1) % k]
            dx, dy = x1 - x0, y1 - y0
            ell = math.gcd(abs(dx), abs(dy))
            out.extend([(dx // ell, dy // ell)] * ell)
        return out

    def to_json(self) -> list[list[int]]:
        return [list(v) for v in self.vertices]


def _cross3(o, a, b) -> int:
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def characteristic_polygon(g: DimerModel, ref: Matching) -> LatticePolygon:
    """Convex hull of all matching heights, positioned with ref at (0,0)."""
    h0 = matching_height(g, ref)
    pts = [matching_height(g, m) for m in perfect_matchings(g)]
    return LatticePolygon.hull([(x - h0[0], y - h0[1]) for x, y in pts])


def internal_matchings(g: DimerModel, delta: LatticePolygon) -> list[Matching]:
    """Matchings re-basing the characteristic polygon to exactly ``delta``.

    A matching D is internal when the hull of heights, translated so that
    D sits at the origin, equals ``delta`` with the origin strictly
    interior.  Raises ``NoInternalMatching`` when the hull is not a
    translate of ``delta`` or no matching occupies the distinguished
    interior point.
    """
    matchings = perfect_matchings(g)
    heights = [matching_height(g, m) for m in matchings]
    hull = LatticePolygon.hull(heights)
    if len(hull.vertices) != len(delta.vertices):
        raise NoInternalMatching(
            f"characteristic polygon {hull.vertices} is not a translate of {delta.vertices}"
        )
    tau = (hull.vertices[0][0] - delta.vertices[0][0], hull.vertices[0][1] - delta.vertices[0][1])
    if delta.translate(tau).vertices != hull.vertices:
        raise NoInternalMatching(
            f"characteristic polygon {hull.vertices} is not a translate of {delta.vertices}"
        )
    if not hull.contains_interior(tau):
        raise NoInternalMatching(
            f"the re-basing point {tau} is not interior to {hull.vertices}"
        )
    out = [m for m, h in zip(matchings, heights) if h == tau]
    if not out:
        raise NoInternalMatching(f"no matching at the interior point {tau}")
    return out


# -- consistency report ------------------------------------------------------


@dataclass
class ConsistencyReport:
    n_nodes: int
    n_edges: int
    n_faces: int
    euler: int
    bipartite: bool
    zigzag_classes: list[tuple[int, int]]
    zigzag_nonzero: bool
    consistent: bool

    def to_json(self) -> dict:
        return {
            "nodes": self.n_nodes,
            "edges": self.n_edges,
            "faces": self.n_faces,
            "euler": self.euler,
            "bipartite": self.bipartite,
            "zigzag_classes": [list(z) for z in self.zigzag_classes],
            "consistent": self.consistent,
        }


def check_dimer(g: DimerModel) -> ConsistencyReport:
    """Structural and zigzag consistency of a dimer model.

    Bipartiteness and color balance are enforced at construction; this
    checks the torus Euler characteristic and that every zigzag path
    closes up with a nonzero homology class, and reports the class
    multiset.
    """
    euler = g.euler_characteristic()
    if euler != 0:
        raise InvalidGraph(f"Euler characteristic {euler} != 0; not a torus graph")
    classes = g.zigzag_classes()
    nonzero = all(z != (0, 0) for z in classes)
    sx = sum(z[0] for z in classes)
    sy = sum(z[1] for z in classes)
    return ConsistencyReport(
        n_nodes=g.n_nodes,
        n_edges=g.n_edges,
        n_faces=g.n_faces,
        euler=euler,
        bipartite=True,
        zigzag_classes=classes,
        zigzag_nonzero=nonzero,
        consistent=nonzero and (sx, sy) == (0, 0),
    )


# -- quiver with potential ---------------------------------------------------


@dataclass(frozen=True)
class QuiverArrow:
    id: int
    source: int
    target: int
    edge: int


@dataclass
class Quiver:
    """Faces as vertices, one arrow per dimer edge, node cycles as the
    signed potential (white +, black -)."""

    n_vertices: int
    arrows: list[QuiverArrow]
    potential: list[tuple[int, list[int]]]

    def to_json(self) -> dict:
        return {
            "vertices": self.n_vertices,
            "arrows": [
                {"id": a.id, "source": a.source, "target": a.target} for a in self.arrows
            ],
            "potential": [
                {"sign": s, "arrows": list(cyc)} for s, cyc in self.potential
            ],
        }


def quiver_with_potential(g: DimerModel) -> Quiver:
    """Dualize: the arrow of an edge runs between its two incident faces,
    oriented with the white node on its left."""
    face_of = g.face_of_dart()
    arrows = []
    arrow_of_edge = {}
    for e in g.edges:
        # source: face left of the black->white dart; target: face left of
        # the white->black dart.  Crossing the edge from source to target
        # keeps the white node on the left.
        a = QuiverArrow(
            id=len(arrows), source=face_of[(e.id, -1)], target=face_of[(e.id, 1)], edge=e.id
        )
        arrows.append(a)
        arrow_of_edge[e.id] = a
    potential = []
    for node in g.nodes:
        darts = g._rotations[node.id]
        cyc = [arrow_of_edge[d[0]].id for d in darts]
        sign = 1 if node.color == "white" else -1
        if sign < 0:
            cyc = cyc[::-1]
        potential.append((sign, cyc))
    return Quiver(n_vertices=g.n_faces, arrows=arrows, potential=potential)
