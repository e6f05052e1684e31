"""Decorated Kronrod-Reeb graphs over the unit interval.

Vertices sit at rational heights in [0,1].  Edge styles record the level-set
type of the swept family: bold for arcs ending on the boundary, thin for
circles.  Bold edges carry an ordered pair of wall ids, the two monotone
boundary arcs swept by the arc endpoints; welds between walls at saddles and
terminals let `boundary_trace` reconstruct every boundary circle and its
corner count.

Vertex kinds:

==========  =====================================================
EMin/EMax   interior local extremum (one thin edge up / down)
DMin/DMax   plain (k=0) boundary circle at a constant value,
            eps = -1 / +1 (one thin edge up / down)
TMin/TMax   bold terminal at height 0 / 1 (a D / B corner arc)
CMin/CMax   plain boundary circle pinned at height 0 / 1
            (extended space produced by cutting circle maps)
S3T         saddle with a figure-eight level component (all thin)
S3M         saddle with an arc-with-loop component (bold through,
            one thin edge either side)
S4B         saddle with a crossing-arcs component (two bold down,
            two bold up)
==========  =====================================================
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import InvalidGraph, NonGeneric, WallMismatch
from .surface import (BoundaryComponent, RealMorseDescriptor, SurfaceSig,
                      ValidationReport, euler_characteristic)

EMIN, EMAX = "EMin", "EMax"
DMIN, DMAX = "DMin", "DMax"
TMIN, TMAX = "TMin", "TMax"
CMIN, CMAX = "CMin", "CMax"
S3T, S3M, S4B = "S3T", "S3M", "S4B"

BOLD, THIN = "bold", "thin"

KINDS = frozenset({EMIN, EMAX, DMIN, DMAX, TMIN, TMAX, CMIN, CMAX, S3T, S3M, S4B})
SADDLE_KINDS = frozenset({S3T, S3M, S4B})
EXTENDED_KINDS = frozenset({CMIN, CMAX})
TERMINAL_KINDS = frozenset({TMIN, TMAX, CMIN, CMAX})
# kinds whose heights must be pairwise distinct on a generic graph
CRITICAL_KINDS = frozenset({EMIN, EMAX, DMIN, DMAX, S3T, S3M, S4B})

# (sorted down-style tuple, sorted up-style tuple) alternatives per kind
_SLOT_PATTERNS = {
    EMIN: (((), (THIN,)),),
    EMAX: (((THIN,), ()),),
    DMIN: (((), (THIN,)),),
    DMAX: (((THIN,), ()),),
    TMIN: (((), (BOLD,)),),
    TMAX: (((BOLD,), ()),),
    CMIN: (((), (THIN,)),),
    CMAX: (((THIN,), ()),),
    S3T: (((THIN, THIN), (THIN,)), ((THIN,), (THIN, THIN))),
    S3M: (((BOLD,), (BOLD, THIN)), ((BOLD, THIN), (BOLD,))),
    S4B: (((BOLD, BOLD), (BOLD, BOLD)),),
}

# chi of the vertex neighborhood in the piece-gluing Euler formula
_VERTEX_CHI = {
    EMIN: 1, EMAX: 1, TMIN: 1, TMAX: 1, S4B: 1,
    DMIN: 0, DMAX: 0, CMIN: 0, CMAX: 0, S3M: 0,
    S3T: -1,
}


@dataclass(frozen=True)
class Vertex:
    id: str
    kind: str
    height: Fraction
    label: str | None = None  # boundary component for D*/C*/T* vertices

    def __post_init__(self):
        object.__setattr__(self, "height", Fraction(self.height))


@dataclass(frozen=True)
class Edge:
    id: str
    lower: str
    upper: str
    style: str
    walls: tuple[str, str] | None = None  # (left, right) for bold edges


@dataclass(frozen=True)
class KRGraph:
    sig: SurfaceSig
    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(self.vertices))
        object.__setattr__(self, "edges", tuple(self.edges))

    def vertex(self, vid: str) -> Vertex:
        return self._by_id()[vid]

    def _by_id(self) -> dict[str, Vertex]:
        cache = self.__dict__.get("_vmap")
        if cache is None:
            cache = {v.id: v for v in self.vertices}
            self.__dict__["_vmap"] = cache
        return cache

    def down_edges(self, vid: str) -> list[Edge]:
        return [e for e in self.edges if e.upper == vid]

    def up_edges(self, vid: str) -> list[Edge]:
        return [e for e in self.edges if e.lower == vid]

    def interior_vertices(self) -> list[Vertex]:
        """Non-terminal vertices in height order (rank order when generic)."""
        return sorted((v for v in self.vertices if v.kind not in TERMINAL_KINDS),
                      key=lambda v: (v.height, v.id))

    def kind_count(self, kind: str) -> int:
        return sum(1 for v in self.vertices if v.kind == kind)

    def n_components(self) -> int:
        return len(_components(self))


def _components(g: KRGraph) -> list[set[str]]:
    parent = {v.id: v.id for v in g.vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in g.edges:
        a, b = find(e.lower), find(e.upper)
        if a != b:
            parent[a] = b
    groups: dict[str, set[str]] = {}
    for v in g.vertices:
        groups.setdefault(find(v.id), set()).add(v.id)
    return list(groups.values())


# ---------------------------------------------------------------------------
# validation


def _local_violations(g: KRGraph) -> list[tuple[str, str]]:
    v: list[tuple[str, str]] = []
    if not g.vertices:
        v.append(("V0", "empty graph (surfaces are nonempty)"))
        return v
    ids = [x.id for x in g.vertices]
    if len(set(ids)) != len(ids):
        v.append(("V0", "duplicate vertex ids"))
        return v
    eids = [e.id for e in g.edges]
    if len(set(eids)) != len(eids):
        v.append(("V0", "duplicate edge ids"))
        return v
    vmap = g._by_id()
    for x in g.vertices:
        if x.kind not in KINDS:
            v.append(("V1", f"vertex {x.id}: unknown kind {x.kind}"))
            return v
        if not (0 <= x.height <= 1):
            v.append(("V2", f"vertex {x.id}: height {x.height} outside [0,1]"))
        if x.kind in (TMIN, CMIN) and x.height != 0:
            v.append(("V2", f"vertex {x.id}: {x.kind} must sit at height 0"))
        if x.kind in (TMAX, CMAX) and x.height != 1:
            v.append(("V2", f"vertex {x.id}: {x.kind} must sit at height 1"))
        if x.kind not in TERMINAL_KINDS and not (0 < x.height < 1):
            v.append(("V2", f"vertex {x.id}: {x.kind} must sit strictly inside (0,1)"))
    for e in g.edges:
        if e.lower not in vmap or e.upper not in vmap:
            v.append(("V3", f"edge {e.id}: dangling endpoint"))
            continue
        if e.style not in (BOLD, THIN):
            v.append(("V3", f"edge {e.id}: unknown style {e.style}"))
            continue
        if vmap[e.lower].height >= vmap[e.upper].height:
            v.append(("V3", f"edge {e.id}: must join a strictly lower vertex to a higher one"))
        if e.style == BOLD:
            if not e.walls or len(e.walls) != 2 or e.walls[0] == e.walls[1]:
                v.append(("V4", f"edge {e.id}: bold edge needs two distinct wall ids"))
        elif e.walls:
            v.append(("V4", f"edge {e.id}: thin edge carries walls"))
    if v:
        return v
    for x in g.vertices:
        down = tuple(sorted(e.style for e in g.down_edges(x.id)))
        up = tuple(sorted(e.style for e in g.up_edges(x.id)))
        if (down, up) not in _SLOT_PATTERNS[x.kind]:
            v.append(("V5", f"vertex {x.id} ({x.kind}): incident edges {down} down / {up} up "
                            f"do not match any allowed pattern"))
    return v


def _weld_violations(g: KRGraph) -> list[tuple[str, str]]:
    """Wall ids must pass straight through saddles and tile [0,1] in chains."""
    v: list[tuple[str, str]] = []
    for x in g.vertices:
        if x.kind == S3M:
            bd = [e for e in g.down_edges(x.id) if e.style == BOLD]
            bu = [e for e in g.up_edges(x.id) if e.style == BOLD]
            if bd and bu and bd[0].walls != bu[0].walls:
                v.append(("W1", f"S3M {x.id}: walls must pass through unchanged"))
        elif x.kind == S4B:
            lows = g.down_edges(x.id)
            ups = g.up_edges(x.id)
            if len(lows) != 2 or len(ups) != 2:
                continue  # caught by V5
            p, q = lows
            lo_l = {p.walls[0]: p.id, q.walls[0]: q.id}
            lo_r = {p.walls[1]: p.id, q.walls[1]: q.id}
            if len(lo_l) != 2 or len(lo_r) != 2:
                v.append(("W2", f"S4B {x.id}: lower edges share a wall"))
                continue
            ok = True
            for u in ups:
                if u.walls[0] not in lo_l or u.walls[1] not in lo_r:
                    ok = False
                elif lo_l[u.walls[0]] == lo_r[u.walls[1]]:
                    ok = False  # an upper edge may not copy both walls of one lower edge
            if ok:
                up_l = {u.walls[0] for u in ups}
                up_r = {u.walls[1] for u in ups}
                ok = up_l == set(lo_l) and up_r == set(lo_r)
            if not ok:
                v.append(("W2", f"S4B {x.id}: welds are not a planar crossing"))
    if v:
        return v

    # chain tiling: each wall id runs through consecutive bold edges from a
    # TMin up to a TMax, always on the same side
    occ: dict[str, list[tuple[Edge, int]]] = {}
    for e in g.edges:
        if e.style == BOLD:
            occ.setdefault(e.walls[0], []).append((e, 0))
            occ.setdefault(e.walls[1], []).append((e, 1))
    vmap = g._by_id()
    for wall, entries in occ.items():
        sides = {side for _, side in entries}
        if len(sides) != 1:
            v.append(("W3", f"wall {wall}: appears on both sides"))
            continue
        chain = sorted((e for e, _ in entries), key=lambda e: vmap[e.lower].height)
        if vmap[chain[0].lower].kind != TMIN:
            v.append(("W3", f"wall {wall}: chain does not start at a TMin"))
            continue
        if vmap[chain[-1].upper].kind != TMAX:
            v.append(("W3", f"wall {wall}: chain does not end at a TMax"))
            continue
        for a, b in zip(chain, chain[1:]):
            if a.upper != b.lower:
                v.append(("W3", f"wall {wall}: chain breaks between edges {a.id} and {b.id}"))
                break
    return v


def boundary_trace(g: KRGraph) -> list[tuple[str | None, int, tuple[str, ...]]]:
    """Reconstruct the boundary circles: (label, k, sorted vertex ids on it).

    Corner circles alternate walls and corner arcs: the D arc of a TMin joins
    the bottoms of its edge's two walls, the B arc of a TMax the tops.  Plain
    circles are single D*/C* vertices.  Unlabeled circles are matched to the
    remaining signature components of the same k deterministically.
    """
    vmap = g._by_id()
    # wall -> (bottom TMin, top TMax)
    ends: dict[str, list[str | None]] = {}
    for e in g.edges:
        if e.style != BOLD:
            continue
        for w in e.walls:
            ends.setdefault(w, [None, None])
        if vmap[e.lower].kind == TMIN:
            for w in e.walls:
                ends[w][0] = e.lower
        if vmap[e.upper].kind == TMAX:
            for w in e.walls:
                ends[w][1] = e.upper
    for w, (lo, hi) in ends.items():
        if lo is None or hi is None:
            raise WallMismatch(f"wall {w} does not reach both terminal levels")
    term_walls: dict[str, list[str]] = {}
    for e in g.edges:
        if e.style != BOLD:
            continue
        if vmap[e.lower].kind == TMIN:
            term_walls[e.lower] = list(e.walls)
        if vmap[e.upper].kind == TMAX:
            term_walls[e.upper] = list(e.walls)

    circles: list[tuple[str | None, int, tuple[str, ...]]] = []
    seen_walls: set[str] = set()
    for w0 in sorted(ends):
        if w0 in seen_walls:
            continue
        walls, terms = _trace_circle(w0, ends, term_walls)
        seen_walls.update(walls)
        k = sum(1 for t in terms if vmap[t].kind == TMIN)
        labels = {vmap[t].label for t in terms if vmap[t].label is not None}
        if len(labels) > 1:
            raise WallMismatch(f"boundary circle through wall {w0} carries labels {sorted(labels)}")
        circles.append((labels.pop() if labels else None, k, tuple(sorted(set(terms)))))

    for x in sorted(g.vertices, key=lambda v: (v.height, v.id)):
        if x.kind in (DMIN, DMAX, CMIN, CMAX):
            circles.append((x.label, 0, (x.id,)))

    # deterministic label resolution against the signature
    taken = {lab for lab, _, _ in circles if lab is not None}
    free = sorted((b.k, b.label) for b in g.sig.boundary if b.label not in taken)
    resolved = []
    for lab, k, ids in sorted(circles, key=lambda c: (c[1], c[2])):
        if lab is None:
            match = next(((kk, ll) for kk, ll in free if kk == k), None)
            if match:
                free.remove(match)
                lab = match[1]
        resolved.append((lab, k, ids))
    return resolved


def _trace_circle(w0, ends, term_walls):
    """Follow welds from wall w0: up the wall, across the B arc, down, across D, ..."""
    walls, terms = [], []
    w, going_up = w0, True
    while True:
        walls.append(w)
        term = ends[w][1] if going_up else ends[w][0]
        terms.append(term)
        pair = term_walls[term]
        w = pair[0] if pair[1] == w else pair[1]
        going_up = not going_up
        if w == w0 and going_up:
            return walls, terms
        if len(walls) > 4 * len(ends) + 4:
            raise WallMismatch(f"wall trace starting at {w0} does not close")


def validate_graph(g: KRGraph, strict: bool = False) -> ValidationReport:
    """Full validity: local vertex rules, heights, welds, trace vs signature,
    Euler agreement, connectivity.  With strict=True the extended kinds
    CMin/CMax are rejected (the honest real-valued space)."""
    v = _local_violations(g)
    if v:
        return ValidationReport.from_violations(v)
    if strict:
        for x in g.vertices:
            if x.kind in EXTENDED_KINDS:
                v.append(("V6", f"vertex {x.id}: kind {x.kind} only allowed in the extended space"))
    v.extend(_weld_violations(g))
    if v:
        return ValidationReport.from_violations(v)

    n_tmin, n_tmax = g.kind_count(TMIN), g.kind_count(TMAX)
    total_k = g.sig.total_corners
    if not (n_tmin == n_tmax == total_k):
        v.append(("V7", f"#TMin={n_tmin}, #TMax={n_tmax}, sum k={total_k} must all agree"))
    try:
        circles = boundary_trace_unchecked(g)
    except WallMismatch as exc:
        v.append(("W4", str(exc)))
        return ValidationReport.from_violations(v)
    traced = sorted((lab, k) for lab, k, _ in circles)
    declared = sorted((b.label, b.k) for b in g.sig.boundary)
    if traced != declared:
        v.append(("V8", f"traced boundary {traced} != declared {declared}"))

    ncomp = g.n_components()
    if g.sig.connected and ncomp != 1:
        v.append(("V9", f"signature is connected but graph has {ncomp} components"))
    elif not g.sig.connected and ncomp != g.sig.components:
        v.append(("V9", f"signature declares {g.sig.components} components, graph has {ncomp}"))
    chi_graph = euler_from_pieces_unchecked(g)
    chi_sig = euler_characteristic(g.sig, components=ncomp)
    if chi_graph != chi_sig:
        v.append(("V10", f"piece formula gives chi={chi_graph}, signature gives {chi_sig}"))
    return ValidationReport.from_violations(v)


def boundary_trace_unchecked(g: KRGraph):
    return boundary_trace(g)


def require_valid(g: KRGraph, strict: bool = False):
    rep = validate_graph(g, strict=strict)
    if not rep.ok:
        raise InvalidGraph(str(rep))


# ---------------------------------------------------------------------------
# derived data


def critical_counts(g: KRGraph) -> tuple[int, int, int]:
    """(c0, c1, c2): interior extrema and saddles; boundary vertices do not count."""
    require_valid(g)
    return (g.kind_count(EMIN),
            g.kind_count(S3T) + g.kind_count(S3M) + g.kind_count(S4B),
            g.kind_count(EMAX))


def euler_from_pieces_unchecked(g: KRGraph) -> int:
    chi = sum(_VERTEX_CHI[x.kind] for x in g.vertices)
    chi -= sum(1 for e in g.edges if e.style == BOLD)
    return chi


def euler_from_pieces(g: KRGraph) -> int:
    """chi by summing vertex-neighborhood contributions and -1 per bold band."""
    require_valid(g)
    return euler_from_pieces_unchecked(g)


def is_generic(g: KRGraph) -> bool:
    """Distinct heights at all extrema, saddles and constant boundary circles."""
    require_valid(g)
    hs = [x.height for x in g.vertices if x.kind in CRITICAL_KINDS]
    return len(hs) == len(set(hs))


@dataclass(frozen=True)
class DerivedInvariants:
    """The classifying data a KR graph determines."""

    c: tuple[int, int, int]
    eps: tuple[tuple[str, int], ...]          # (label, sign) sorted, k=0 components
    corner_multiset: tuple[int, ...]          # sorted k values of corner circles
    chi: int
    bold_terminal_counts: tuple[int, int]     # (#TMin, #TMax)
    circle_terminal_counts: tuple[int, int]   # (#CMin, #CMax)

    @property
    def eps_map(self) -> dict[str, int]:
        return dict(self.eps)


def derived_invariants(g: KRGraph) -> DerivedInvariants:
    require_valid(g)
    eps = {}
    for x in g.vertices:
        if x.kind == DMIN:
            eps[x.label] = -1
        elif x.kind == DMAX:
            eps[x.label] = +1
    corners = tuple(sorted(b.k for b in g.sig.corner_components))
    return DerivedInvariants(
        c=critical_counts(g),
        eps=tuple(sorted(eps.items())),
        corner_multiset=corners,
        chi=euler_from_pieces_unchecked(g),
        bold_terminal_counts=(g.kind_count(TMIN), g.kind_count(TMAX)),
        circle_terminal_counts=(g.kind_count(CMIN), g.kind_count(CMAX)),
    )


def to_real_descriptor(g: KRGraph) -> RealMorseDescriptor:
    """Descriptor of a strict graph (no CMin/CMax)."""
    inv = derived_invariants(g)
    if inv.circle_terminal_counts != (0, 0):
        raise InvalidGraph("extended graphs have no real-valued descriptor")
    return RealMorseDescriptor(sig=g.sig, c=inv.c, eps=inv.eps_map)


# ---------------------------------------------------------------------------
# equivalence

def certificate(g: KRGraph):
    """Canonical form deciding KR-equivalence.

    The height order of interior vertices must be preserved by any
    equivalence, so interior vertices are identified by rank; terminals at a
    shared level are interchangeable within a (kind, boundary label) group,
    and each carries exactly one edge, so a sorted edge multiset over these
    keys is a complete invariant.  Wall ids do not enter (the paper's
    equivalence does not see them); boundary labels do.
    """
    interior = g.interior_vertices()
    rank = {v.id: i for i, v in enumerate(interior)}
    circle_labels: dict[str, str | None] = {}
    for lab, k, ids in boundary_trace_unchecked(g):
        for vid in ids:
            circle_labels[vid] = lab

    def vkey(vid: str):
        x = g.vertex(vid)
        if x.id in rank:
            return ("i", rank[x.id])
        return ("t", x.kind, circle_labels.get(x.id))

    seq = tuple((v.kind, circle_labels.get(v.id) if v.kind in (DMIN, DMAX) else None)
                for v in interior)
    edges = tuple(sorted((vkey(e.lower), vkey(e.upper), e.style) for e in g.edges))
    terms = tuple(sorted((x.kind, circle_labels.get(x.id))
                         for x in g.vertices if x.kind in TERMINAL_KINDS))
    return (g.sig.key(), seq, terms, edges)


def kr_equivalent(g: KRGraph, h: KRGraph) -> bool:
    """Kind/style/boundary-label preserving isomorphism commuting with some
    orientation-preserving reparametrization of the interval."""
    for name, x in (("first", g), ("second", h)):
        require_valid(x)
        if not is_generic(x):
            raise NonGeneric(f"{name} graph is not generic")
    return certificate(g) == certificate(h)


# ---------------------------------------------------------------------------
# convenience constructors


def renormalize_heights(sig: SurfaceSig, vertices, edges) -> KRGraph:
    """Rebuild with interior heights i/(n+1) in the current height order."""
    interior = sorted((v for v in vertices if v.kind not in TERMINAL_KINDS),
                      key=lambda v: (v.height, v.id))
    n = len(interior)
    new_h = {v.id: Fraction(i + 1, n + 2) for i, v in enumerate(interior)}
    vs = tuple(Vertex(v.id, v.kind, new_h.get(v.id, v.height), v.label) for v in vertices)
    return KRGraph(sig=sig, vertices=vs, edges=tuple(edges))


def graph_from_parts(sig: SurfaceSig, vertices, edges) -> KRGraph:
    return KRGraph(sig=sig, vertices=tuple(vertices), edges=tuple(edges))
