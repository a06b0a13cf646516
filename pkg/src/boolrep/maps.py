"""Join-preserving maps, their factorizations, and quotient constructions.

A map between finite lattices preserving all joins (checked on pairs plus the
empty join) is decomposed here into maximal proper surjective steps, each
collapsing one cover pair whose lower element is strictly meet irreducible,
followed by maximal proper injective steps, each inserting one strictly join
irreducible element.  Congruences compatible with joins correspond to closure
operators and, through the flat representation, to intersection-closed flat
subfamilies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .errors import (
    FormatError,
    JoinViolation,
    NotAClosure,
    NotACongruence,
    NotADownset,
    NotInjective,
    NotIntersectionClosed,
    NotJoinClosed,
    NotRepresentable,
    NotSimple,
    NotSurjective,
    TopInIdeal,
)
from .hereditary import HereditaryCollection, is_boolean_representable
from .lattice import FiniteLattice, VGenLattice

# -- join-preserving maps -----------------------------------------------------------


@dataclass(frozen=True)
class VMap:
    """A total map between lattice element sets, with optional generator data."""

    source: FiniteLattice
    target: FiniteLattice
    mapping: Mapping[str, str]
    source_gens: Optional[tuple[str, ...]] = None
    target_gens: Optional[tuple[str, ...]] = None

    def __post_init__(self) -> None:
        for x in self.source.labels:
            if x not in self.mapping:
                raise FormatError(f"map not total: missing {x!r}")
            if self.mapping[x] not in self.target._index:
                raise FormatError(f"image {self.mapping[x]!r} not in target")

    def __call__(self, x: str) -> str:
        return self.mapping[x]

    def image(self) -> frozenset[str]:
        return frozenset(self.mapping[x] for x in self.source.labels)

    def is_surjective(self) -> bool:
        return self.image() == frozenset(self.target.labels)

    def is_injective(self) -> bool:
        return len(self.image()) == len(self.source.labels)


def is_vmap(phi: VMap) -> bool:
    try:
        validate_vmap(phi)
        return True
    except JoinViolation:
        return False


def validate_vmap(phi: VMap) -> bool:
    """Join preservation on pairs and on the empty join (bottom to bottom).

    Pairwise preservation plus the bottom condition extends to all finite
    joins by induction.
    """
    src, tgt, f = phi.source, phi.target, phi.mapping
    if f[src.bottom] != tgt.bottom:
        raise JoinViolation((src.bottom,))
    for x, y in itertools.combinations_with_replacement(src.labels, 2):
        if f[src.join(x, y)] != tgt.join(f[x], f[y]):
            raise JoinViolation((x, y))
    if phi.source_gens is not None and phi.target_gens is not None:
        allowed = set(phi.target_gens) | {tgt.bottom}
        for e in phi.source_gens:
            if f[e] not in allowed:
                raise JoinViolation(("generators", e))
    return True


def compose(phi: VMap, psi: VMap) -> VMap:
    """phi followed by psi."""
    if phi.target.labels != psi.source.labels:
        raise FormatError("composition needs matching middle lattices")
    return VMap(
        phi.source, psi.target,
        {x: psi.mapping[phi.mapping[x]] for x in phi.source.labels},
        phi.source_gens, psi.target_gens,
    )


def identity_map(l: FiniteLattice, gens: Optional[tuple[str, ...]] = None) -> VMap:
    return VMap(l, l, {x: x for x in l.labels}, gens, gens)


# -- congruences and closure operators -------------------------------------------------


@dataclass(frozen=True)
class VCongruence:
    """A partition of a lattice compatible with joins."""

    lattice: FiniteLattice
    blocks: tuple[frozenset[str], ...]

    def __post_init__(self) -> None:
        seen: set[str] = set()
        for b in self.blocks:
            if not b or seen & b:
                raise NotACongruence("blocks must partition the elements")
            seen |= b
        if seen != set(self.lattice.labels):
            raise NotACongruence("blocks must cover the elements")
        cls = self.block_of
        lat = self.lattice
        for b in self.blocks:
            for x, y in itertools.combinations(sorted(b), 2):
                for z in lat.labels:
                    if cls(lat.join(x, z)) is not cls(lat.join(y, z)):
                        raise NotACongruence((x, y, z))

    @property
    def block_of(self):
        idx = self.__dict__.get("_block_idx")
        if idx is None:
            idx = {}
            for b in self.blocks:
                for x in b:
                    idx[x] = b
            object.__setattr__(self, "_block_idx", idx)
        return idx.__getitem__

    @classmethod
    def from_pairs(cls, lattice: FiniteLattice, pairs: Iterable[tuple[str, str]]
                   ) -> "VCongruence":
        """Smallest equivalence containing the pairs (validated as a congruence)."""
        parent = {x: x for x in lattice.labels}

        def find(x):
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for a, b in pairs:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[ra] = rb
        groups: dict[str, set[str]] = {}
        for x in lattice.labels:
            groups.setdefault(find(x), set()).add(x)
        blocks = tuple(sorted((frozenset(g) for g in groups.values()),
                              key=lambda b: sorted(b)))
        return cls(lattice, blocks)


@dataclass(frozen=True)
class ClosureOp:
    """An extensive, monotone, idempotent self-map of a lattice."""

    lattice: FiniteLattice
    mapping: Mapping[str, str]

    def __post_init__(self) -> None:
        lat, f = self.lattice, self.mapping
        for x in lat.labels:
            if x not in f:
                raise NotAClosure(f"missing {x!r}")
            if not lat.leq(x, f[x]):
                raise NotAClosure(("extensive", x))
            if f[f[x]] != f[x]:
                raise NotAClosure(("idempotent", x))
        for x, y in itertools.permutations(lat.labels, 2):
            if lat.leq(x, y) and not lat.leq(f[x], f[y]):
                raise NotAClosure(("monotone", x, y))

    def __call__(self, x: str) -> str:
        return self.mapping[x]


def closure_from_congruence(rho: VCongruence) -> ClosureOp:
    """Send each element to the maximum (= join) of its block."""
    lat = rho.lattice
    f = {}
    for b in rho.blocks:
        m = lat.join_of(b)
        for x in b:
            f[x] = m
    return ClosureOp(lat, f)


def congruence_from_closure(xi: ClosureOp) -> VCongruence:
    """Kernel of the closure operator."""
    groups: dict[str, set[str]] = {}
    for x in xi.lattice.labels:
        groups.setdefault(xi(x), set()).add(x)
    blocks = tuple(sorted((frozenset(g) for g in groups.values()),
                          key=lambda b: sorted(b)))
    return VCongruence(xi.lattice, blocks)


def family_from_congruence(vg: VGenLattice, rho: VCongruence) -> frozenset[frozenset[str]]:
    """The flat subfamily of the block maxima."""
    lat = vg.lattice
    if rho.lattice is not lat and rho.lattice.labels != lat.labels:
        raise FormatError("congruence lives on a different lattice")
    return frozenset(vg.z_of(lat.join_of(b)) for b in rho.blocks)


def congruence_from_family(vg: VGenLattice, family: Iterable[frozenset[str]]
                           ) -> VCongruence:
    """Elements are identified when the same family members lie above them."""
    fam = [frozenset(m) for m in family]
    lat = vg.lattice
    full = frozenset(vg.gens)
    for m in fam:
        if not m <= full:
            raise NotIntersectionClosed(f"member {sorted(m)} outside the generators")
    if full not in fam:
        raise NotIntersectionClosed("the family must contain the full flat")
    zs = {vg.z_of(x) for x in lat.labels}
    for m in fam:
        if m not in zs:
            raise NotIntersectionClosed(f"member {sorted(m)} is not a flat")
    for a, b in itertools.combinations(fam, 2):
        if a & b not in fam:
            raise NotIntersectionClosed((sorted(a), sorted(b)))

    def key(x: str) -> frozenset:
        zx = vg.z_of(x)
        out = full
        for m in fam:
            if zx <= m:
                out &= m
        return out

    groups: dict[frozenset, set[str]] = {}
    for x in lat.labels:
        groups.setdefault(key(x), set()).add(x)
    blocks = tuple(sorted((frozenset(g) for g in groups.values()),
                          key=lambda b: sorted(b)))
    return VCongruence(lat, blocks)


# -- quotients ---------------------------------------------------------------------------


def quotient_lattice(lat: FiniteLattice, rho: VCongruence,
                     gens: Optional[Sequence[str]] = None
                     ) -> tuple[FiniteLattice, VMap]:
    """Quotient by a join congruence, with the canonical projection.

    Blocks are named after their maximum element.  When generators are given
    they are pushed through the projection (dropping the new bottom).
    """
    names = {}
    for b in rho.blocks:
        m = lat.join_of(b)
        for x in b:
            names[x] = m
    elems = sorted(set(names.values()), key=lat.index)
    pairs = set()
    for x, y in itertools.permutations(elems, 2):
        if lat.leq(x, y) and x != y:
            pairs.add((x, y))
    # order generators suffice; from_covers recomputes the reduction
    q = FiniteLattice.from_covers(elems, sorted(pairs),
                                  max_size=max(64, len(elems) + 1))
    qgens = None
    if gens is not None:
        qgens = tuple(dict.fromkeys(
            names[e] for e in gens if names[e] != q.bottom))
    proj = VMap(lat, q, names, tuple(gens) if gens else None, qgens)
    return q, proj


def rees_quotient(lat: FiniteLattice, ideal: Iterable[str]) -> FiniteLattice:
    """Collapse a downset not containing the top into a new bottom."""
    ide = frozenset(ideal)
    for x in ide:
        if x not in lat._index:
            raise FormatError(f"unknown element {x!r}")
    for x in lat.labels:
        for y in ide:
            if lat.leq(x, y) and x not in ide:
                raise NotADownset((x, y))
    if lat.top in ide:
        raise TopInIdeal(lat.top)
    if not ide:
        return lat
    keep = [x for x in lat.labels if x not in ide]
    bot = "_B_"
    while bot in lat._index:
        bot += "_"
    pairs = [(bot, x) for x in keep]
    for x, y in itertools.permutations(keep, 2):
        if lat.leq(x, y):
            pairs.append((x, y))
    return FiniteLattice.from_covers([bot] + keep, pairs,
                                     max_size=max(64, len(keep) + 2))


def quotient_by_subsemilattice(lat: FiniteLattice, s: Iterable[str]) -> FiniteLattice:
    """Quotient by the congruence generated by joining against members of s.

    The raw relation (x ~ y when x join s = y join s' for members s, s') is
    reflexive, symmetric and join compatible but not transitive in general;
    its transitive closure is already the generated congruence.
    """
    sub = sorted(frozenset(s), key=lat.index)
    if not sub:
        raise NotJoinClosed("the subsemilattice must be nonempty")
    for x, y in itertools.combinations_with_replacement(sub, 2):
        if lat.join(x, y) not in sub:
            raise NotJoinClosed((x, y))
    pairs = []
    for x, y in itertools.combinations(lat.labels, 2):
        if any(lat.join(x, a) == lat.join(y, b) for a in sub for b in sub):
            pairs.append((x, y))
    rho = VCongruence.from_pairs(lat, pairs)
    return quotient_lattice(lat, rho)[0]


def raw_subsemilattice_relation_transitive(lat: FiniteLattice, s: Iterable[str]) -> bool:
    """Whether the one-step relation already equals the generated congruence."""
    sub = sorted(frozenset(s), key=lat.index)

    def related(x, y):
        return x == y or any(
            lat.join(x, a) == lat.join(y, b) for a in sub for b in sub)

    for x, y, z in itertools.permutations(lat.labels, 3):
        if related(x, y) and related(y, z) and not related(x, z):
            return False
    return True


# -- MPS / MPI factorization ---------------------------------------------------------------


@dataclass(frozen=True)
class MpsStep:
    """One surjective step: collapse the cover pair (upper, lower), lower smi."""

    upper: str
    lower: str
    map: VMap


@dataclass(frozen=True)
class MpiStep:
    """One injective step: include into the lattice that adds one sji element."""

    added: str
    map: VMap


def mps_factorize(phi: VMap) -> list[MpsStep]:
    """Decompose a surjective join map into single-collapse steps.

    Each step's kernel joins one cover pair with a strictly meet irreducible
    lower element; composing the steps (with the final bijection folded into
    the last step) reproduces the original map exactly.  A bijection yields
    the empty list.
    """
    validate_vmap(phi)
    if not phi.is_surjective():
        raise NotSurjective("factorization needs an onto map")
    steps: list[MpsStep] = []
    cur = phi
    while not cur.is_injective():
        lat = cur.source
        pick = None
        for b in sorted(lat.labels, key=lat.index):
            if b == lat.top or len(lat.upper_covers(b)) != 1:
                continue  # need b strictly meet irreducible
            (a,) = lat.upper_covers(b)
            if cur.mapping[a] == cur.mapping[b]:
                pick = (a, b)
                break
        assert pick is not None, "non-injective join map without a collapsible pair"
        a, b = pick
        rho = VCongruence.from_pairs(lat, [(a, b)])
        q, proj = quotient_lattice(lat, rho, cur.source_gens)
        steps.append(MpsStep(a, b, proj))
        cur = VMap(q, cur.target,
                   {x: cur.mapping[x] for x in q.labels},
                   proj.target_gens, cur.target_gens)
    if steps:
        # fold the remaining bijection into the last step so composition == phi
        last = steps[-1]
        steps[-1] = MpsStep(last.upper, last.lower, compose(last.map, cur))
    return steps


def mpi_factorize(phi: VMap) -> list[MpiStep]:
    """Decompose an injective join map into single-insertion steps.

    Working down from the target, a minimal missing element is strictly join
    irreducible, so deleting it leaves a lattice and the inclusion is a
    maximal proper injective step.
    """
    validate_vmap(phi)
    if not phi.is_injective():
        raise NotInjective("factorization needs a one-to-one map")
    steps: list[MpiStep] = []
    tgt = phi.target
    image = phi.image()
    chain = [tgt]
    removed: list[str] = []
    cur_labels = set(tgt.labels)
    while cur_labels != image:
        missing = sorted(cur_labels - image, key=tgt.index)
        a = None
        for x in missing:
            # minimal missing element: nothing missing strictly below it
            if not any(tgt.leq(y, x) and y != x for y in missing):
                a = x
                break
        assert a is not None
        removed.append(a)
        cur_labels.discard(a)
        sub = _sublattice(tgt, cur_labels)
        chain.append(sub)
    chain.reverse()  # smallest first
    removed.reverse()
    for k, added in enumerate(removed):
        small, big = chain[k], chain[k + 1]
        inc = VMap(small, big, {x: x for x in small.labels})
        steps.append(MpiStep(added, inc))
    if steps:
        # fold the initial bijection (source onto its image) into the first step
        base = _sublattice(tgt, image)
        iso = VMap(phi.source, base, dict(phi.mapping), phi.source_gens, None)
        steps[0] = MpiStep(steps[0].added, compose(iso, steps[0].map))
    return steps


def _sublattice(lat: FiniteLattice, labels: Iterable[str]) -> FiniteLattice:
    keep = sorted(frozenset(labels), key=lat.index)
    pairs = [(x, y) for x, y in itertools.permutations(keep, 2) if lat.leq(x, y)]
    return FiniteLattice.from_covers(keep, pairs, max_size=max(64, len(keep) + 1))


def csi_factorize(phi: VMap) -> tuple[list[MpsStep], list[MpiStep]]:
    """Surjective steps onto the image, then injective steps into the target."""
    validate_vmap(phi)
    image = phi.image()
    mid = _sublattice(phi.target, image)
    onto = VMap(phi.source, mid, dict(phi.mapping), phi.source_gens, None)
    inc = VMap(mid, phi.target, {x: x for x in mid.labels}, None, phi.target_gens)
    return mps_factorize(onto), mpi_factorize(inc)


def compose_steps(phi_steps: Sequence) -> Optional[VMap]:
    """Compose the maps of a step list; None for an empty list."""
    maps = [s.map for s in phi_steps]
    if not maps:
        return None
    out = maps[0]
    for m in maps[1:]:
        out = compose(out, m)
    return out


# -- strong maps --------------------------------------------------------------------------


def _lattice_flats(vg: VGenLattice) -> frozenset[frozenset[str]]:
    return frozenset(vg.z_of(x) for x in vg.lattice.labels)


def is_strong_lattice_map(phi: VMap, src: VGenLattice, tgt: VGenLattice) -> bool:
    """Preimages of target flats (with the bottom adjoined) meet E in flats."""
    src_flats = _lattice_flats(src)
    gens = frozenset(src.gens)
    f = phi.mapping
    for z in _lattice_flats(tgt):
        zb = set(z) | {tgt.lattice.bottom}
        pre = frozenset(x for x in src.lattice.labels if f[x] in zb)
        if pre & gens not in src_flats:
            return False
    return True


def induced_flat_map(phi: VMap, src: VGenLattice, tgt: VGenLattice
                     ) -> dict[frozenset[str], frozenset[str]]:
    """The flat-to-flat map: image of the flat, bottom dropped, then closed."""
    validate_vmap(phi)
    f = phi.mapping
    out = {}
    for x in src.lattice.labels:
        z = src.z_of(x)
        image = {f[e] for e in z} - {tgt.lattice.bottom}
        out[z] = tgt.z_of(tgt.lattice.join_of(image))
    return out


# -- strong and weak maps of hereditary collections ------------------------------------------


def hc_strong_map(phi: Mapping[str, str], a: HereditaryCollection,
                  b: HereditaryCollection) -> bool:
    """Preimages of flats are flats (both collections simple representable)."""
    for hc in (a, b):
        if not hc.is_simple():
            raise NotSimple("strong maps are defined between simple collections")
        if not is_boolean_representable(hc):
            raise NotRepresentable("strong maps need representable collections")
    for e in a.ground:
        if phi[e] not in b._gidx:
            raise FormatError(f"image {phi[e]!r} outside the target ground")
    bfl = b.flats().members
    afl = a.flats().members
    for z in bfl:
        pre = frozenset(e for e in a.ground if phi[e] in z)
        if pre not in afl:
            return False
    return True


def hc_weak_map(phi: Mapping[str, str], a: HereditaryCollection,
                b: HereditaryCollection) -> bool:
    """Injective images of independence pull back to independence."""
    for e in a.ground:
        if phi[e] not in b._gidx:
            raise FormatError(f"image {phi[e]!r} outside the target ground")
    for x in _all_subsets_of(a.ground):
        img = frozenset(phi[e] for e in x)
        if len(img) == len(x) and img in b.independents:
            if x not in a.independents:
                return False
    return True


def _all_subsets_of(items: Sequence[str]):
    for r in range(len(items) + 1):
        for c in itertools.combinations(items, r):
            yield frozenset(c)


# -- text format -----------------------------------------------------------------------------


def map_to_text(phi: VMap) -> str:
    lines = [f"map: {x} -> {phi.mapping[x]}" for x in phi.source.labels]
    return "\n".join(lines) + "\n"


def map_from_text(text: str, source: FiniteLattice, target: FiniteLattice) -> VMap:
    mapping = {}
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if not ln.startswith("map:") or "->" not in ln:
            raise FormatError(f"bad map line: {ln!r}")
        body = ln[len("map:"):]
        x, y = (p.strip() for p in body.split("->", 1))
        mapping[x] = y
    return VMap(source, target, mapping)
