"""Canonical KR graphs: elementary blocks, assembly from invariants, recognition.

A canonical graph is built from bold ladders (one per corner boundary
component) and a thin part assembled in a fixed normal shape: merge all
minimum leaves bottom-up ("fan-in"), run the required number of cycles as
two-saddle bubbles in series, then split off the maximum leaves ("fan-out").
Ladders attach through S3M markers on their top main edge whose thin legs
point up into the thin part, except that one leg points down when no maximum
leaf would otherwise exist; a single block that must carry genus on its own
gets an up leg and a down leg joined through the bubble chain.

The assembly is deterministic (blocks in boundary-label order, fixed rank
bands), which makes the invariants -> canonical graph map a bijection up to
KR-equivalence and gives byte-stable serializations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import InvalidSpec, NonRealizable
from .graph import (BOLD, CMAX, CMIN, DMAX, DMIN, EMAX, EMIN, S3M, S3T, S4B,
                    THIN, TMAX, TMIN, Edge, KRGraph, Vertex, certificate,
                    derived_invariants, is_generic, require_valid,
                    to_real_descriptor, validate_graph)
from .surface import (BoundaryComponent, RealMorseDescriptor, SurfaceSig,
                      validate_real)


@dataclass(frozen=True)
class XSpec:
    k: int
    variant: str = "zero"          # zero | plus | minus
    leaf: str | None = None        # e-vertex | d-vertex | attach (plus/minus only)

    def __post_init__(self):
        if self.k < 1:
            raise InvalidSpec(f"X block needs k >= 1, got {self.k}")
        if self.variant not in ("zero", "plus", "minus"):
            raise InvalidSpec(f"unknown X variant {self.variant}")
        if self.variant == "zero":
            if self.leaf is not None:
                raise InvalidSpec("X0 blocks carry no leaf")
        elif self.leaf not in ("e-vertex", "d-vertex", "attach"):
            raise InvalidSpec(f"X{self.variant} leaf must be e-vertex, d-vertex or attach")


@dataclass(frozen=True)
class YSpec:
    z: int = 0
    b_minus: int = 0
    b_plus: int = 0
    e_minus: int = 0
    e_plus: int = 0
    n_attach: int = 0

    def __post_init__(self):
        if min(self.z, self.b_minus, self.b_plus, self.e_minus, self.e_plus,
               self.n_attach) < 0:
            raise InvalidSpec("Y parameters must be non-negative")

    @property
    def leaves(self) -> int:
        return self.b_minus + self.b_plus + self.e_minus + self.e_plus + self.n_attach

    @property
    def saddles(self) -> int:
        return self.leaves + 2 * self.z - 2


@dataclass(frozen=True)
class CanonicalForm:
    shape: str                      # Type1-X | Type1-Y | Type2 | Type3
    blocks: tuple[XSpec, ...] = ()
    y: YSpec | None = None


@dataclass(frozen=True)
class GraphFragment:
    """A block with an unfinished thin leg: `port` is the S3M (or Y slot) id
    that still expects a thin edge."""

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]
    ports: tuple[str, ...]


class _Builder:
    """Accumulates vertices/edges with deterministic ids and rank heights."""

    def __init__(self):
        self.vertices: list[Vertex] = []
        self.edges: list[Edge] = []
        self._rank: list[tuple[str, str, str | None]] = []  # interior, in rank order
        self._walls = 0
        self._eid = 0

    def terminal(self, kind: str, label: str | None, idx: int) -> str:
        vid = f"{'t' if kind in (TMIN, TMAX) else 'c'}{'0' if kind in (TMIN, CMIN) else '1'}.{idx}"
        h = Fraction(0) if kind in (TMIN, CMIN) else Fraction(1)
        self.vertices.append(Vertex(vid, kind, h, label))
        return vid

    def interior(self, vid: str, kind: str, label: str | None = None) -> str:
        self._rank.append((vid, kind, label))
        return vid

    def wall(self) -> str:
        self._walls += 1
        return f"W{self._walls - 1}"

    def edge(self, lower: str, upper: str, style: str, walls=None) -> str:
        eid = f"e{self._eid}"
        self._eid += 1
        self.edges.append(Edge(eid, lower, upper, style, tuple(walls) if walls else None))
        return eid

    def finish(self, sig: SurfaceSig) -> KRGraph:
        n = len(self._rank)
        for i, (vid, kind, label) in enumerate(self._rank):
            self.vertices.append(Vertex(vid, kind, Fraction(i + 1, n + 1), label))
        return KRGraph(sig=sig, vertices=tuple(self.vertices), edges=tuple(self.edges))


def _build_ladder(b: _Builder, tag: str, k: int, label: str | None):
    """Bold ladder X0(k): the main line crossed by k-1 other lines.

    Returns (crossing ids, last main vertex below TMax0, walls of the top
    main edge, TMin ids, TMax ids); the caller threads S3M markers onto the
    top edge and closes it.
    """
    tmins = []
    tmaxs = []
    for i in range(k):
        vid = f"{tag}.t0.{i}"
        b.vertices.append(Vertex(vid, TMIN, Fraction(0), label))
        tmins.append(vid)
        vid = f"{tag}.t1.{i}"
        b.vertices.append(Vertex(vid, TMAX, Fraction(1), label))
        tmaxs.append(vid)
    main_l, main_r = b.wall(), b.wall()
    crossings = []
    prev, prev_walls = tmins[0], (main_l, main_r)
    for i in range(1, k):
        x = b.interior(f"{tag}.x{i}", S4B)
        crossings.append(x)
        cl, cr = b.wall(), b.wall()
        b.edge(prev, x, BOLD, prev_walls)          # main line below the crossing
        b.edge(tmins[i], x, BOLD, (cl, cr))        # crossing line, lower half
        b.edge(x, tmaxs[i], BOLD, (prev_walls[0], cr))  # crossing line, upper half
        prev, prev_walls = x, (cl, prev_walls[1])
    return crossings, prev, prev_walls, tmins, tmaxs


def _thread_top_edge(b: _Builder, prev: str, walls, marker_ids: list[str], top: str):
    """Connect prev -> markers... -> top along the main bold line."""
    for m in marker_ids:
        b.edge(prev, m, BOLD, walls)
        prev = m
    b.edge(prev, top, BOLD, walls)


def canonical_from_invariants(d: RealMorseDescriptor,
                              cmin_labels: tuple[str, ...] = (),
                              cmax_labels: tuple[str, ...] = ()) -> KRGraph:
    """The canonical graph realizing a valid descriptor.

    Raises NonRealizable when the counting identities cannot be satisfied.
    The extra C-labels build the extended normal form of a cut piece whose
    plain boundary circles sit at levels 0/1.
    """
    rep = validate_real(d, check_realizability=False)
    if not rep.ok:
        raise NonRealizable(str(rep))
    if not d.sig.connected:
        raise NonRealizable("canonical forms are built per connected component")
    c0, c1, c2 = d.c
    corner = sorted(d.sig.corner_components, key=lambda bc: bc.label)
    minus = sorted(lab for lab, s in d.eps.items() if s == -1)
    plus = sorted(lab for lab, s in d.eps.items() if s == +1)
    # C circles at level 0 behave like extra minimum leaves pinned at 0
    m = len(corner)
    P = c0 + len(minus) + len(cmin_labels)
    Q = c2 + len(plus) + len(cmax_labels)
    g = d.sig.genus

    b = _Builder()

    if m == 0 and P == 0 and Q == 0:
        raise NonRealizable("empty invariants")

    if m == 0:
        if P < 1 or Q < 1:
            raise NonRealizable("a corner-free surface needs a minimum and a maximum")
        z, s, ups, downs = g, 0, 0, 0
    elif P == 0 and Q == 0 and g == 0 and m == 1:
        # lone ladder
        k = corner[0].k
        if c1 != k - 1:
            raise NonRealizable(f"lone ladder needs c1 = k-1 = {k - 1}, got {c1}")
        crossings, prev, walls, _, tmaxs = _build_ladder(b, "b0", k, corner[0].label)
        _thread_top_edge(b, prev, walls, [], tmaxs[0])
        return b.finish(d.sig)
    else:
        s, z = m, g
        downs = 1 if Q == 0 else 0
        ups = s - downs
        if P == 0 and ups == 0:
            # single block carrying genus alone: one leg up, one leg down
            if g == 0:
                raise NonRealizable("isolated block with a leg but nothing to attach")
            s, z, downs, ups = 2, g - 1, 1, 1

    t = c1 - sum(bc.k - 1 for bc in corner) - s
    lmin = P + ups
    lmax = Q + downs
    if t != (lmin - 1) + (lmax - 1) + 2 * z or t < 0:
        raise NonRealizable(
            f"saddle budget {t} does not match thin part needs "
            f"{(lmin - 1) + (lmax - 1) + 2 * z} (Lmin={lmin}, Lmax={lmax}, z={z})")

    # ladders with their pending top-edge data, band A ranks (crossings)
    tops = []
    double_leg = (m == 1 and s == 2)
    for i, bc in enumerate(corner):
        crossings, prev, walls, _, tmaxs = _build_ladder(b, f"b{i}", bc.k, bc.label)
        tops.append((prev, walls, tmaxs[0]))
    # band B: up-leg markers
    up_stubs = []
    down_stubs = []
    for i in range(m):
        n_up = 1 if (i < ups or double_leg) else 0
        if n_up:
            up_stubs.append((i, b.interior(f"b{i}.mu", S3M)))
    # bands C: thin part leaves and saddles
    min_leaves = [vid for _, vid in up_stubs]
    for j, lab in enumerate(cmin_labels):
        vid = f"cm0.{j}"
        b.vertices.append(Vertex(vid, CMIN, Fraction(0), lab))
        min_leaves.append(vid)
    for j, lab in enumerate(minus):
        min_leaves.append(b.interior(f"dmin.{j}", DMIN, lab))
    for j in range(c0):
        min_leaves.append(b.interior(f"emin.{j}", EMIN))

    max_leaf_makers = []
    for j in range(c2):
        max_leaf_makers.append(("emax", f"emax.{j}", EMAX, None))
    for j, lab in enumerate(plus):
        max_leaf_makers.append(("dmax", f"dmax.{j}", DMAX, lab))
    for j, lab in enumerate(cmax_labels):
        max_leaf_makers.append(("cmax", f"cm1.{j}", CMAX, lab))
    for i in range(m):
        is_down = (i >= m - downs) or (double_leg and i == 0)
        if is_down:
            max_leaf_makers.append(("stub", f"b{i}.md", S3M, i))

    if not min_leaves or not max_leaf_makers:
        raise NonRealizable("thin part needs leaves on both sides")

    # build fan-in + bubbles now; register max leaves above the fan-out saddles
    saddles = 0
    strand = min_leaves[0]
    for j, leaf in enumerate(min_leaves[1:]):
        sdl = b.interior(f"y.in{j}", S3T)
        saddles += 1
        b.edge(strand, sdl, THIN)
        b.edge(leaf, sdl, THIN)
        strand = sdl
    for j in range(z):
        lo = b.interior(f"y.zl{j}", S3T)
        hi = b.interior(f"y.zh{j}", S3T)
        saddles += 2
        b.edge(strand, lo, THIN)
        b.edge(lo, hi, THIN)
        b.edge(lo, hi, THIN)
        strand = hi
    outs = []
    for j in range(len(max_leaf_makers) - 1):
        r = b.interior(f"y.out{j}", S3T)
        saddles += 1
        b.edge(strand, r, THIN)
        outs.append(r)
        strand = r
    leaf_ids = []
    for kind_tag, vid, kind, extra in max_leaf_makers:
        if kind_tag == "stub":
            down_stubs.append((extra, vid))
            b.interior(vid, S3M)
        elif kind_tag == "cmax":
            b.vertices.append(Vertex(vid, CMAX, Fraction(1), extra))
        else:
            b.interior(vid, kind, extra)
        leaf_ids.append(vid)
    for j, r in enumerate(outs):
        b.edge(r, leaf_ids[j], THIN)
    b.edge(strand, leaf_ids[-1], THIN)
    assert saddles == t, (saddles, t)

    # thread all markers onto their block's top main edge, in rank order
    markers_per_block: dict[int, list[str]] = {}
    for i, vid in up_stubs:
        markers_per_block.setdefault(i, []).append(vid)
    for i, vid in down_stubs:
        markers_per_block.setdefault(i, []).append(vid)
    for i, (prev, walls, tmax0) in enumerate(tops):
        _thread_top_edge(b, prev, walls, markers_per_block.get(i, []), tmax0)

    return b.finish(d.sig)


def build_x_block(spec: XSpec) -> KRGraph | GraphFragment:
    """Standalone elementary block.

    X0(k) and X+-(k) with a real leaf are complete graphs over a disk-with-
    corners signature; leaf="attach" returns a fragment whose S3M still wants
    its thin edge.
    """
    label = "w0"
    if spec.variant == "zero":
        sig = SurfaceSig(genus=0, boundary=(BoundaryComponent(label, spec.k),))
        return canonical_from_invariants(
            RealMorseDescriptor(sig=sig, c=(0, spec.k - 1, 0), eps={}))
    if spec.leaf == "e-vertex":
        c = (0, spec.k, 1) if spec.variant == "plus" else (1, spec.k, 0)
        sig = SurfaceSig(genus=0, boundary=(BoundaryComponent(label, spec.k),))
        return canonical_from_invariants(RealMorseDescriptor(sig=sig, c=c, eps={}))
    if spec.leaf == "d-vertex":
        eps = {"w1": +1} if spec.variant == "plus" else {"w1": -1}
        sig = SurfaceSig(genus=0, boundary=(BoundaryComponent(label, spec.k),
                                            BoundaryComponent("w1", 0)))
        return canonical_from_invariants(
            RealMorseDescriptor(sig=sig, c=(0, spec.k, 0), eps=eps))
    # attach: ladder plus a bare marker
    b = _Builder()
    crossings, prev, walls, _, tmaxs = _build_ladder(b, "b0", spec.k, label)
    mid = b.interior("b0.mu" if spec.variant == "plus" else "b0.md", S3M)
    _thread_top_edge(b, prev, walls, [mid], tmaxs[0])
    g = b.finish(SurfaceSig(genus=0, boundary=(BoundaryComponent(label, spec.k),)))
    return GraphFragment(vertices=g.vertices, edges=g.edges, ports=(mid,))


def build_y_block(spec: YSpec) -> KRGraph | GraphFragment:
    """Standalone thin block.

    With n_attach=0 this is a complete graph over the corner-free signature it
    determines; attach slots are returned as fragment ports (leaf vertices of
    a placeholder kind S3M awaiting their legs from below).
    """
    lmin = spec.e_minus + spec.b_minus + spec.n_attach
    lmax = spec.e_plus + spec.b_plus
    if lmin < 1 or lmax < 1:
        raise NonRealizable(
            f"Y needs a minimum and a maximum leaf (got {lmin} down, {lmax} up)")
    if spec.n_attach == 0:
        bnd = tuple(BoundaryComponent(f"w{j}", 0)
                    for j in range(spec.b_minus + spec.b_plus))
        eps = {f"w{j}": (-1 if j < spec.b_minus else +1) for j in range(len(bnd))}
        sig = SurfaceSig(genus=spec.z, boundary=bnd)
        return canonical_from_invariants(
            RealMorseDescriptor(sig=sig, c=(spec.e_minus, spec.saddles, spec.e_plus),
                                eps=eps))
    b = _Builder()
    ports = [b.interior(f"p{j}", S3M) for j in range(spec.n_attach)]
    min_leaves = list(ports)
    for j in range(spec.b_minus):
        min_leaves.append(b.interior(f"dmin.{j}", DMIN, f"w{j}"))
    for j in range(spec.e_minus):
        min_leaves.append(b.interior(f"emin.{j}", EMIN))
    strand = min_leaves[0]
    idx = 0
    for leaf in min_leaves[1:]:
        s = b.interior(f"y.in{idx}", S3T)
        idx += 1
        b.edge(strand, s, THIN)
        b.edge(leaf, s, THIN)
        strand = s
    for j in range(spec.z):
        lo = b.interior(f"y.zl{j}", S3T)
        hi = b.interior(f"y.zh{j}", S3T)
        b.edge(strand, lo, THIN)
        b.edge(lo, hi, THIN)
        b.edge(lo, hi, THIN)
        strand = hi
    n_max = spec.e_plus + spec.b_plus
    outs = []
    for j in range(n_max - 1):
        r = b.interior(f"y.out{j}", S3T)
        b.edge(strand, r, THIN)
        outs.append(r)
        strand = r
    leaf_ids = []
    for j in range(spec.e_plus):
        leaf_ids.append(b.interior(f"emax.{j}", EMAX))
    for j in range(spec.b_plus):
        leaf_ids.append(b.interior(f"dmax.{j}", DMAX, f"w{spec.b_minus + j}"))
    for j, r in enumerate(outs):
        b.edge(r, leaf_ids[j], THIN)
    b.edge(strand, leaf_ids[-1], THIN)
    g = b.finish(SurfaceSig(genus=spec.z, boundary=()))
    return GraphFragment(vertices=g.vertices, edges=g.edges, ports=tuple(ports))


def canonical_form_of(d: RealMorseDescriptor) -> CanonicalForm:
    """Classify which of the three canonical shapes realizes d."""
    corner = sorted(d.sig.corner_components, key=lambda bc: bc.label)
    m = len(corner)
    c0, c1, c2 = d.c
    plain = len(d.sig.plain_components)
    if m == 0:
        minus = sum(1 for s in d.eps.values() if s == -1)
        plus = sum(1 for s in d.eps.values() if s == +1)
        return CanonicalForm(shape="Type1-Y", y=YSpec(
            z=d.sig.genus, b_minus=minus, b_plus=plus, e_minus=c0, e_plus=c2))
    if m == 1 and c0 + c2 + plain == 0 and d.sig.genus == 0:
        return CanonicalForm(shape="Type1-X", blocks=(XSpec(k=corner[0].k),))
    if m == 2 and c0 == c2 == 0 and plain == 0 and d.sig.genus == 0:
        return CanonicalForm(shape="Type2", blocks=(
            XSpec(k=corner[0].k, variant="plus", leaf="attach"),
            XSpec(k=corner[1].k, variant="minus", leaf="attach")))
    blocks = tuple(XSpec(k=bc.k, variant="plus", leaf="attach") for bc in corner)
    minus = sum(1 for s in d.eps.values() if s == -1)
    plus = sum(1 for s in d.eps.values() if s == +1)
    legs = max(m, 2) if (m == 1 and c0 + c2 + plain == 0) else m
    z = d.sig.genus - (legs - m)
    return CanonicalForm(shape="Type3", blocks=blocks, y=YSpec(
        z=z, b_minus=minus, b_plus=plus, e_minus=c0, e_plus=c2, n_attach=legs))


def _bold_blocks(g: KRGraph) -> list[tuple[set[str], list[Edge]]]:
    bold = [e for e in g.edges if e.style == BOLD]
    parent: dict[str, str] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for e in bold:
        parent.setdefault(e.lower, e.lower)
        parent.setdefault(e.upper, e.upper)
        a, b = find(e.lower), find(e.upper)
        if a != b:
            parent[a] = b
    groups: dict[str, tuple[set[str], list[Edge]]] = {}
    for e in bold:
        root = find(e.lower)
        vs, es = groups.setdefault(root, (set(), []))
        vs.update((e.lower, e.upper))
        es.append(e)
    return list(groups.values())


def _is_ladder(g: KRGraph, block_vs: set[str], block_es: list[Edge]) -> bool:
    """Ladder test: smoothing S3M points, the block is one main strand hit by
    each crossing line exactly once, in height order."""
    kinds = {vid: g.vertex(vid).kind for vid in block_vs}
    k = sum(1 for v in block_vs if kinds[v] == TMIN)
    if k != sum(1 for v in block_vs if kinds[v] == TMAX):
        return False
    n_x = sum(1 for v in block_vs if kinds[v] == S4B)
    if n_x != k - 1:
        return False
    # contract S3M points: union of their two bold edges into strands
    succ = {}
    for e in block_es:
        succ.setdefault(e.lower, []).append(e)

    def strand_top(e: Edge):
        while kinds[e.upper] == S3M:
            e = next(x for x in succ[e.upper])
        return e.upper

    strands = []
    for e in block_es:
        if kinds[e.lower] != S3M:
            strands.append((e.lower, strand_top(e)))
    if k == 1:
        return strands == [(next(v for v in block_vs if kinds[v] == TMIN),
                            next(v for v in block_vs if kinds[v] == TMAX))]
    xs = sorted((v for v in block_vs if kinds[v] == S4B),
                key=lambda v: g.vertex(v).height)
    # each crossing must see one strand from the previous crossing (or a TMin
    # for the first), one from a fresh TMin, and symmetrically above
    from_map: dict[str, list[str]] = {}
    to_map: dict[str, list[str]] = {}
    for lo, hi in strands:
        from_map.setdefault(hi, []).append(lo)
        to_map.setdefault(lo, []).append(hi)
    for i, x in enumerate(xs):
        below = sorted(from_map.get(x, []))
        above = sorted(to_map.get(x, []))
        if len(below) != 2 or len(above) != 2:
            return False
        prev = xs[i - 1] if i > 0 else None
        nxt = xs[i + 1] if i < len(xs) - 1 else None
        below_kinds = sorted(kinds[v] if v != prev else "PREV" for v in below)
        above_kinds = sorted(kinds[v] if v != nxt else "NEXT" for v in above)
        want_below = sorted(["PREV" if prev else TMIN, TMIN])
        want_above = sorted(["NEXT" if nxt else TMAX, TMAX])
        if below_kinds != want_below or above_kinds != want_above:
            return False
    return True


def is_canonical(g: KRGraph) -> bool:
    """Generic, strictly valid, ladder-shaped bold blocks, and KR-equivalent
    to the canonical graph rebuilt from its own invariants."""
    if not validate_graph(g, strict=True).ok:
        return False
    if not is_generic(g):
        return False
    for vs, es in _bold_blocks(g):
        if not _is_ladder(g, vs, es):
            return False
    try:
        rebuilt = canonical_from_invariants(to_real_descriptor(g))
    except NonRealizable:
        return False
    return certificate(g) == certificate(rebuilt)
