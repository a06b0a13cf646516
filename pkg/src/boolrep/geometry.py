"""Point-line incidence geometries and their height-3 (and graded) lattices.

A partial geometry here is a set of points with lines of at least two points
meeting pairwise in at most one point.  Height-3 generated lattices yield such
geometries by reading each middle element's generator trace as a line; the
inverse construction stacks points below their lines.  Graded geometries over
several strata correspond the same way to atomic lattices of matching height.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass
from typing import Iterable

from .errors import (
    BadMpeg,
    FormatError,
    NotAtomic,
    TooFewLines,
    WrongHeight,
    WrongSize,
)
from .hereditary import HereditaryCollection
from .lattice import FiniteLattice, VGenLattice, flat_label


@dataclass(frozen=True)
class PEG:
    """Points plus lines: lines have >= 2 points and pairwise meet in <= 1."""

    points: tuple[str, ...]
    lines: frozenset[frozenset[str]]

    def lines_through(self, p: str) -> frozenset[frozenset[str]]:
        return frozenset(l for l in self.lines if p in l)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violations: tuple[tuple[str, tuple], ...]  # (axiom tag, witness)

    def __bool__(self) -> bool:
        return self.ok


def validate_peg(g: PEG) -> ValidationReport:
    """Axiom-by-axiom check; every violation carries a concrete witness."""
    bad: list[tuple[str, tuple]] = []
    pts = set(g.points)
    for l in g.lines:
        if not l <= pts:
            bad.append(("points", tuple(sorted(l - pts))))
        if len(l) < 2:
            bad.append(("G2", tuple(sorted(l))))
    for l1, l2 in itertools.combinations(g.lines, 2):
        if len(l1 & l2) > 1:
            bad.append(("G1", (tuple(sorted(l1)), tuple(sorted(l2)))))
    return ValidationReport(not bad, tuple(bad))


@dataclass(frozen=True)
class MPeg:
    """A graded geometry: disjoint strata of subsets, the last being {E}."""

    ground: tuple[str, ...]
    strata: tuple[frozenset[frozenset[str]], ...]  # P_1 .. P_m


def validate_mpeg(g: MPeg) -> ValidationReport:
    bad: list[tuple[str, tuple]] = []
    m = len(g.strata)
    full = frozenset(g.ground)
    if m < 3:
        bad.append(("J1", ("m", m)))
    seen: set[frozenset] = set()
    for i, p in enumerate(g.strata):
        if seen & set(p):
            bad.append(("J1", ("stratum overlap", i + 1)))
        seen |= set(p)
    if m >= 1 and g.strata[-1] != frozenset((full,)):
        bad.append(("J1", ("top stratum", tuple(sorted(map(sorted, g.strata[-1]))))))
    for p in g.strata[0] if g.strata else ():
        if len(p) != 1:
            bad.append(("J2", tuple(sorted(p))))
    atoms = frozenset(x for p in g.strata[0] for x in p) if g.strata else frozenset()
    if atoms != frozenset(g.ground):
        bad.append(("J2", ("ground mismatch", tuple(sorted(
            frozenset(g.ground) ^ atoms)))))
    for i in range(1, m):
        for p in g.strata[i]:
            if not p <= atoms:
                bad.append(("J3", tuple(sorted(p - atoms))))
            if not any(q < p for q in g.strata[i - 1]):
                bad.append(("J4", (i + 1, tuple(sorted(p)))))
    levels = {}
    for i, stratum in enumerate(g.strata):
        for p in stratum:
            levels[p] = i + 1
    graded = [p for i in range(1, m) for p in g.strata[i]]
    for p, q in itertools.combinations(graded, 2):
        i, j = levels[p], levels[q]
        inter = p & q
        if (inter == frozenset()
                or (inter in levels and levels[inter] < min(i, j))
                or (i < j and p < q)
                or (i > j and q < p)
                or p == q):
            continue
        bad.append(("J5", (tuple(sorted(p)), tuple(sorted(q)))))
    return ValidationReport(not bad, tuple(bad))


# -- height-3 lattice <-> geometry -----------------------------------------------------


def geo_of_lattice(vg: VGenLattice) -> PEG:
    """Lines are generator traces of interior elements with >= 2 generators."""
    lat = vg.lattice
    if lat.height() != 3:
        raise WrongHeight(f"geometry extraction needs height 3, got {lat.height()}")
    lines: set[frozenset[str]] = set()
    interior = [x for x in lat.labels if x not in (lat.top, lat.bottom)]
    traces = [vg.z_of(x) for x in interior]
    for t in traces:
        if len(t) >= 2:
            lines.add(t)
    # two interior elements cannot share a >= 2 trace at height 3; check anyway
    big = [t for t in traces if len(t) >= 2]
    assert len(big) == len(set(big)), "duplicate line traces in a height-3 lattice"
    g = PEG(vg.gens, frozenset(lines))
    return g


def lat_of_peg(g: PEG) -> VGenLattice:
    """Stack bottom, points, lines, top; points sit below their lines."""
    rep = validate_peg(g)
    if not rep.ok:
        raise FormatError(f"not a valid geometry: {rep.violations[:1]}")
    if len(g.lines) < 2:
        raise TooFewLines("the lattice construction needs at least two lines")
    line_labels = {l: flat_label(l, g.points) for l in g.lines}
    bot, top = "_B_", "_T_"
    while bot in g.points:
        bot += "_"
    while top in g.points:
        top += "_"
    elements = [bot, *g.points, *sorted(line_labels.values()), top]
    pairs = [(bot, p) for p in g.points]
    by_label = {v: k for k, v in line_labels.items()}
    for lbl in sorted(line_labels.values()):
        pairs.append((lbl, top))
        for p in by_label[lbl]:
            pairs.append((p, lbl))
    for p in g.points:
        if not g.lines_through(p):
            pairs.append((p, top))
    lat = FiniteLattice.from_covers(elements, pairs,
                                    max_size=max(64, len(elements) + 1))
    return VGenLattice(lat, tuple(g.points))


# -- the height-3 matroid ---------------------------------------------------------------


def mat_of_lattice(lat: FiniteLattice) -> HereditaryCollection:
    """Ground is L minus bottom; triples are independent when they join to top."""
    if lat.height() != 3:
        raise WrongHeight(f"needs height 3, got {lat.height()}")
    ground = tuple(x for x in lat.labels if x != lat.bottom)
    h = []
    for r in range(3):
        h.extend(itertools.combinations(ground, r))
    for c in itertools.combinations(ground, 3):
        if lat.join_of(c) == lat.top:
            h.append(c)
    return HereditaryCollection.from_independents(ground, h)


def potential_lines(lat: FiniteLattice) -> frozenset[frozenset[str]]:
    """Triples meeting every interior principal trace at most once.

    Equivalently: all pairwise joins hit the top.
    """
    if lat.height() != 3:
        raise WrongHeight(f"needs height 3, got {lat.height()}")
    ground = [x for x in lat.labels if x != lat.bottom]
    out = []
    for c in itertools.combinations(ground, 3):
        if all(lat.join(x, y) == lat.top
               for x, y in itertools.combinations(c, 2)):
            out.append(frozenset(c))
    return frozenset(out)


def c_indep_via_geometry(lat: FiniteLattice, xs: Iterable[str]) -> bool:
    """Height-3 shortcut: small sets free; triples need full join and one
    interior pairwise join."""
    if lat.height() != 3:
        raise WrongHeight(f"needs height 3, got {lat.height()}")
    x = frozenset(xs)
    if lat.bottom in x:
        raise FormatError("the bottom element is never independent here")
    if len(x) <= 2:
        return True
    if len(x) > 3:
        return False
    if lat.join_of(x) != lat.top:
        return False
    return any(lat.join(a, b) != lat.top
               for a, b in itertools.combinations(sorted(x), 2))


# -- graded correspondences -----------------------------------------------------------------


def mpeg_of_atomic_lattice(lat: FiniteLattice) -> MPeg:
    """Strata collect atom traces by element height (top stratum = {E})."""
    if not lat.is_atomic():
        raise NotAtomic("every element must be a join of atoms")
    m = lat.height()
    if m < 3:
        raise WrongHeight(f"graded geometries need height >= 3, got {m}")
    atoms = sorted(lat.atoms(), key=lat.index)
    strata: list[set[frozenset[str]]] = [set() for _ in range(m)]
    for x in lat.labels:
        h = lat.height_of(x)
        if 1 <= h <= m:
            strata[h - 1].add(frozenset(a for a in atoms if lat.leq(a, x)))
    return MPeg(tuple(atoms), tuple(frozenset(s) for s in strata))


def lattice_of_mpeg(g: MPeg) -> VGenLattice:
    """Members of all strata plus the empty set, ordered by inclusion."""
    rep = validate_mpeg(g)
    if not rep.ok:
        raise BadMpeg(rep.violations[:1])
    members: set[frozenset[str]] = {frozenset()}
    for stratum in g.strata:
        members |= set(stratum)
    ms = sorted(members, key=lambda s: (len(s), tuple(sorted(s))))
    labels = {s: flat_label(s, g.ground) for s in ms}
    pairs = []
    for a, b in itertools.permutations(ms, 2):
        if a < b:
            pairs.append((labels[a], labels[b]))
    lat = FiniteLattice.from_covers([labels[s] for s in ms], pairs,
                                    max_size=max(64, len(ms) + 1))
    gens = tuple(labels[frozenset((a,))] for a in g.ground)
    return VGenLattice(lat, gens)


# -- height-4 hyperplane criterion ------------------------------------------------------------


def lattice_hyperplanes(vg: VGenLattice) -> frozenset[frozenset[str]]:
    """Maximal generator flats other than the full one."""
    flats = {vg.z_of(x) for x in vg.lattice.labels}
    full = frozenset(vg.gens)
    proper = [f for f in flats if f != full]
    return frozenset(
        f for f in proper if not any(f < g for g in proper))


def four_subset_independent_via_hyperplane(vg: VGenLattice, xs: Iterable[str]) -> bool:
    """Height-4 test: all triples independent and a hyperplane meets xs in 3."""
    from .lattice import c_independent  # local import to avoid a cycle

    lat = vg.lattice
    if lat.height() != 4:
        raise WrongHeight(f"needs height 4, got {lat.height()}")
    x = frozenset(xs)
    if len(x) != 4:
        raise WrongSize(f"needs a 4-subset, got {len(x)}")
    for e in x:
        if e not in vg.gens:
            raise FormatError(f"{e!r} is not a generator")
    if not all(c_independent(vg, c) for c in itertools.combinations(sorted(x), 3)):
        return False
    return any(len(x & h) == 3 for h in lattice_hyperplanes(vg))


# -- JSON and DOT ------------------------------------------------------------------------------


def peg_to_json(g: PEG) -> str:
    order = {p: i for i, p in enumerate(g.points)}
    lines = sorted((sorted(l, key=order.__getitem__) for l in g.lines),
                   key=lambda l: [order[x] for x in l])
    return json.dumps({"points": list(g.points), "lines": lines})


def peg_from_json(text: str) -> PEG:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"bad JSON: {e}") from None
    if not isinstance(data, dict) or "points" not in data or "lines" not in data:
        raise FormatError("expected an object with 'points' and 'lines'")
    points = tuple(str(p) for p in data["points"])
    lines = frozenset(frozenset(str(x) for x in l) for l in data["lines"])
    return PEG(points, lines)


def peg_dot(g: PEG, name: str = "geometry") -> str:
    """Levi-style diagram: line nodes in a rank above the point nodes."""
    order = {p: i for i, p in enumerate(g.points)}
    lines = sorted(g.lines, key=lambda l: sorted(order[x] for x in l))
    out = [f"graph {name} {{"]
    out.append("  node [shape=circle]; " +
               " ".join(f'"{p}"' for p in g.points) + ";")
    names = {}
    for i, l in enumerate(lines):
        names[l] = f"L{i}"
        out.append(f'  "L{i}" [shape=box, label="{flat_label(l, g.points)}"];')
    out.append("  { rank=same; " + " ".join(f'"{names[l]}"' for l in lines) + " }")
    for l in lines:
        for p in sorted(l, key=order.__getitem__):
            out.append(f'  "{names[l]}" -- "{p}";')
    out.append("}")
    return "\n".join(out) + "\n"
