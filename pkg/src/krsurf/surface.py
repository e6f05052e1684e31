"""Surface signatures, Morse-map descriptors and the path-component deciders.

A surface is recorded by its orientable signature: genus, labeled boundary
components (each with a corner count k, meaning 4k subdivision arcs), and a
connectedness flag.  Real-valued descriptors carry critical point counts
(c0, c1, c2) and a sign eps per plain (k=0) boundary component; circle-valued
descriptors carry per-boundary behavior (constant with a sign, or covering
with a nonzero degree) plus 2*genus winding integers fixing the homotopy
class.  The deciders compare exactly the classifying data: counts, label-wise
eps signs, and (for the circle) the homotopy class vector.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import InvalidDescriptor, SignatureMismatch


@dataclass(frozen=True)
class BoundaryComponent:
    label: str
    k: int = 0  # number of A-B-C-D arc quadruples; 0 = plain circle

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"boundary {self.label}: k must be >= 0, got {self.k}")


@dataclass(frozen=True)
class SurfaceSig:
    """Orientable compact surface signature.

    For a disconnected signature (cut results), genus and boundary are totals
    over the components and `components` counts them.
    """

    genus: int
    boundary: tuple[BoundaryComponent, ...] = ()
    connected: bool = True
    components: int = 1

    def __post_init__(self):
        if self.genus < 0:
            raise ValueError("genus must be >= 0")
        if self.components < 1:
            raise ValueError("components must be >= 1")
        if self.connected and self.components != 1:
            raise ValueError("connected signature must have exactly one component")
        labels = [b.label for b in self.boundary]
        if len(set(labels)) != len(labels):
            raise ValueError(f"duplicate boundary labels: {labels}")

    @property
    def labels(self) -> tuple[str, ...]:
        return tuple(b.label for b in self.boundary)

    def component_k(self, label: str) -> int:
        for b in self.boundary:
            if b.label == label:
                return b.k
        raise KeyError(label)

    @property
    def corner_components(self) -> tuple[BoundaryComponent, ...]:
        return tuple(b for b in self.boundary if b.k > 0)

    @property
    def plain_components(self) -> tuple[BoundaryComponent, ...]:
        return tuple(b for b in self.boundary if b.k == 0)

    @property
    def total_corners(self) -> int:
        return sum(b.k for b in self.boundary)

    def key(self):
        """Order-insensitive identity of the signature."""
        return (self.genus, self.connected, self.components,
                tuple(sorted((b.label, b.k) for b in self.boundary)))


def euler_characteristic(sig: SurfaceSig, components: int | None = None) -> int:
    """chi = 2n - 2*genus - #boundary, n the number of connected components."""
    n = components if components is not None else sig.components
    return 2 * n - 2 * sig.genus - len(sig.boundary)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[tuple[str, str], ...] = ()

    @staticmethod
    def from_violations(violations) -> "ValidationReport":
        vs = tuple(violations)
        return ValidationReport(ok=not vs, violations=vs)

    def __str__(self):
        if self.ok:
            return "ok"
        return "\n".join(f"{rule}: {detail}" for rule, detail in self.violations)


@dataclass(frozen=True)
class RealMorseDescriptor:
    """Invariants of a map in the real-valued Morse space over a fixed signature."""

    sig: SurfaceSig
    c: tuple[int, int, int]
    eps: dict[str, int] = field(default_factory=dict)  # k=0 label -> +1/-1

    def __post_init__(self):
        object.__setattr__(self, "eps", dict(self.eps))

    def eps_key(self):
        return tuple(sorted(self.eps.items()))

    def __eq__(self, other):
        if not isinstance(other, RealMorseDescriptor):
            return NotImplemented
        return (self.sig.key() == other.sig.key() and self.c == other.c
                and self.eps == other.eps)

    def __hash__(self):
        return hash((self.sig.key(), self.c, self.eps_key()))


@dataclass(frozen=True)
class Constant:
    sign: int  # +1 if the constant value is a local maximum, -1 if a minimum

    @property
    def degree(self) -> int:
        return 0


@dataclass(frozen=True)
class Covering:
    degree: int  # nonzero


@dataclass(frozen=True)
class CircleMorseDescriptor:
    """Invariants of a circle-valued Morse map: counts, boundary behavior, class."""

    sig: SurfaceSig
    c: tuple[int, int, int]
    behavior: dict[str, Constant | Covering] = field(default_factory=dict)
    genus_windings: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "behavior", dict(self.behavior))

    def degree(self, label: str) -> int:
        b = self.behavior.get(label)
        if b is None:
            return 0
        return b.degree if isinstance(b, Covering) else 0

    def class_vector(self) -> tuple[int, ...]:
        """Homotopy class: boundary degrees in label order, then the windings."""
        degs = tuple(self.degree(b.label) for b in sorted(self.sig.boundary, key=lambda b: b.label))
        return degs + tuple(self.genus_windings)

    def eps(self, label: str) -> int:
        b = self.behavior.get(label)
        return b.sign if isinstance(b, Constant) else 0

    def __eq__(self, other):
        if not isinstance(other, CircleMorseDescriptor):
            return NotImplemented
        return (self.sig.key() == other.sig.key() and self.c == other.c
                and self.behavior == other.behavior
                and tuple(self.genus_windings) == tuple(other.genus_windings))

    def __hash__(self):
        return hash((self.sig.key(), self.c,
                     tuple(sorted(self.behavior.items(), key=lambda kv: kv[0])),
                     tuple(self.genus_windings)))


def _check_counts(c) -> str | None:
    if len(c) != 3 or any(x < 0 for x in c):
        return f"critical counts must be three non-negative integers, got {c}"
    return None


def validate_real(d: RealMorseDescriptor, check_realizability: bool = True) -> ValidationReport:
    """Rules E1-E4.

    E1 Euler identity, E2 eps defined exactly on the k=0 labels, E3 existence
    of a minimum and a maximum when no corners are present, E4 constructive
    realizability (the canonical builder succeeds and reproduces d).
    """
    v: list[tuple[str, str]] = []
    bad = _check_counts(d.c)
    if bad:
        v.append(("E0", bad))
        return ValidationReport.from_violations(v)
    c0, c1, c2 = d.c
    chi = euler_characteristic(d.sig)
    total_k = d.sig.total_corners
    if chi != total_k + c0 - c1 + c2:
        v.append(("E1", f"chi={chi} but sum k + c0 - c1 + c2 = {total_k + c0 - c1 + c2}"))
    plain = {b.label for b in d.sig.plain_components}
    if set(d.eps) != plain:
        v.append(("E2", f"eps keys {sorted(d.eps)} != k=0 labels {sorted(plain)}"))
    elif any(s not in (-1, 1) for s in d.eps.values()):
        v.append(("E2", f"eps values must be +1/-1, got {d.eps}"))
    if not v and total_k == 0:
        n_min = c0 + sum(1 for s in d.eps.values() if s == -1)
        n_max = c2 + sum(1 for s in d.eps.values() if s == +1)
        if n_min < 1:
            v.append(("E3", "no minimum: c0 + #(eps=-1) = 0"))
        if n_max < 1:
            v.append(("E3", "no maximum: c2 + #(eps=+1) = 0"))
    if not v and check_realizability and d.sig.connected:
        from .canonical import canonical_from_invariants
        from .errors import NonRealizable

        try:
            canonical_from_invariants(d)
        except NonRealizable as exc:
            v.append(("E4", f"not realizable: {exc}"))
    return ValidationReport.from_violations(v)


def validate_circle(d: CircleMorseDescriptor) -> ValidationReport:
    """Rules C1-C4 for circle-valued descriptors."""
    v: list[tuple[str, str]] = []
    bad = _check_counts(d.c)
    if bad:
        v.append(("C0", bad))
        return ValidationReport.from_violations(v)
    if any(b.k != 0 for b in d.sig.boundary):
        v.append(("C0", "circle descriptors carry no corner data (all k must be 0)"))
    labels = set(d.sig.labels)
    if set(d.behavior) != labels:
        v.append(("C0", f"behavior keys {sorted(d.behavior)} != boundary labels {sorted(labels)}"))
    if len(d.genus_windings) != 2 * d.sig.genus:
        v.append(("C0", f"expected {2 * d.sig.genus} genus windings, got {len(d.genus_windings)}"))
    if v:
        return ValidationReport.from_violations(v)
    c0, c1, c2 = d.c
    chi = euler_characteristic(d.sig)
    if chi != c0 - c1 + c2:
        v.append(("C1", f"chi={chi} but c0 - c1 + c2 = {c0 - c1 + c2}"))
    degs = [d.degree(b.label) for b in d.sig.boundary]
    if sum(degs) != 0:
        v.append(("C2", f"covering degrees sum to {sum(degs)}, not 0"))
    for b in d.sig.boundary:
        bb = d.behavior[b.label]
        if isinstance(bb, Covering) and bb.degree == 0:
            v.append(("C3", f"boundary {b.label}: covering degree must be nonzero"))
        if isinstance(bb, Constant) and bb.sign not in (-1, 1):
            v.append(("C3", f"boundary {b.label}: constant sign must be +1/-1"))
    if not v and all(x == 0 for x in d.class_vector()):
        # Null-homotopic: the map factors through the real case.
        real = RealMorseDescriptor(
            sig=d.sig, c=d.c,
            eps={b.label: d.behavior[b.label].sign for b in d.sig.boundary})
        rep = validate_real(real)
        for rule, detail in rep.violations:
            v.append(("C4", f"null-homotopic reinterpretation fails {rule}: {detail}"))
    return ValidationReport.from_violations(v)


def _require_same_sig(f_sig: SurfaceSig, g_sig: SurfaceSig):
    if f_sig.key() != g_sig.key():
        raise SignatureMismatch(f"signatures differ: {f_sig.key()} vs {g_sig.key()}")
    if not f_sig.connected:
        raise SignatureMismatch("deciders require a connected surface")


def same_component_real(f: RealMorseDescriptor, g: RealMorseDescriptor) -> bool:
    """Same path component of the real-valued space: equal counts and label-wise eps."""
    _require_same_sig(f.sig, g.sig)
    for name, d in (("first", f), ("second", g)):
        rep = validate_real(d)
        if not rep.ok:
            raise InvalidDescriptor(f"{name} descriptor invalid: {rep}")
    return f.c == g.c and f.eps == g.eps


def same_component_circle(f: CircleMorseDescriptor, g: CircleMorseDescriptor) -> bool:
    """Same path component of the circle-valued space.

    (i) equal homotopy class vectors, (ii) equal counts, (iii) equal signs on
    components where both restrictions are constant.  Given (i), the constant
    sets coincide (a covering restriction has nonzero degree), so (iii) reduces
    to a label-wise sign comparison there.
    """
    _require_same_sig(f.sig, g.sig)
    for name, d in (("first", f), ("second", g)):
        rep = validate_circle(d)
        if not rep.ok:
            raise InvalidDescriptor(f"{name} descriptor invalid: {rep}")
    if f.class_vector() != g.class_vector():
        return False
    if f.c != g.c:
        return False
    for b in f.sig.boundary:
        bf, bg = f.behavior[b.label], g.behavior[b.label]
        if isinstance(bf, Constant) and isinstance(bg, Constant) and bf.sign != bg.sign:
            return False
    return True
