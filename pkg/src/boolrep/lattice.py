"""Finite lattices, join-generated lattices and their boolean matrices.

A join-generated lattice (L, E) with generating set E not containing the
bottom corresponds to the boolean matrix with one row per lattice element and
one column per generator, where an entry is 0 exactly when the column's
generator lies below the row's element.  The zero sets of any boolean matrix,
closed under intersection, form the lattice of flats; the two constructions
are mutually inverse up to congruence (independent row/column permutation).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import (
    BottomElement,
    CycleError,
    FormatError,
    NotALattice,
    NotIntersectionClosed,
    TooLarge,
    ZeroColumn,
)
from .sbcore import BoolMatrix

DEFAULT_LATTICE_CAP = 64


def _popcount(x: int) -> int:
    return bin(x).count("1")


def _bits(x: int):
    while x:
        low = x & (-x)
        yield low.bit_length() - 1
        x ^= low


class FiniteLattice:
    """A finite lattice stored by cover relation plus materialized tables."""

    def __init__(self, labels, down, covers_up, join_t, meet_t, bottom_i, top_i):
        self.labels: tuple[str, ...] = labels
        self._index = {l: i for i, l in enumerate(labels)}
        self.down: tuple[int, ...] = down          # down[i]: bitmask of j <= i
        self.covers_up: tuple[int, ...] = covers_up  # covers_up[i]: j covering i
        self._join = join_t
        self._meet = meet_t
        self.bottom_i = bottom_i
        self.top_i = top_i

    # -- construction ----------------------------------------------------------

    @classmethod
    def from_covers(
        cls,
        elements: Sequence[str],
        cover_pairs: Iterable[tuple[str, str]],
        max_size: int = DEFAULT_LATTICE_CAP,
    ) -> "FiniteLattice":
        """Build and validate from labels and (lower, upper) order generators.

        Rejects cyclic inputs and posets where some pair lacks a unique join
        or meet (the offending pair is reported).
        """
        labels = tuple(elements)
        if len(set(labels)) != len(labels):
            raise FormatError("duplicate element labels")
        n = len(labels)
        if n == 0:
            raise NotALattice("empty element set")
        if n > max_size:
            raise TooLarge(f"lattice cap exceeded: {n} > {max_size}")
        index = {l: i for i, l in enumerate(labels)}
        succs: list[set[int]] = [set() for _ in range(n)]
        for a, b in cover_pairs:
            if a not in index or b not in index:
                raise FormatError(f"unknown element in cover pair ({a}, {b})")
            if a == b:
                raise CycleError(f"self-loop at {a}")
            succs[index[a]].add(index[b])

        # topological order (Kahn)
        indeg = [0] * n
        for a in range(n):
            for b in succs[a]:
                indeg[b] += 1
        queue = [i for i in range(n) if indeg[i] == 0]
        topo = []
        while queue:
            i = queue.pop()
            topo.append(i)
            for b in succs[i]:
                indeg[b] -= 1
                if indeg[b] == 0:
                    queue.append(b)
        if len(topo) != n:
            raise CycleError("cover relation contains a cycle")

        down = [1 << i for i in range(n)]
        for a in topo:
            for b in succs[a]:
                down[b] |= down[a]
        up = [0] * n
        for i in range(n):
            for j in range(n):
                if (down[j] >> i) & 1:
                    up[i] |= 1 << j

        join_t = [[0] * n for _ in range(n)]
        meet_t = [[0] * n for _ in range(n)]
        for i in range(n):
            for j in range(i, n):
                u = up[i] & up[j]
                m = cls._unique_extreme(u, down)
                if m < 0:
                    raise NotALattice((labels[i], labels[j]))
                join_t[i][j] = join_t[j][i] = m
                d = down[i] & down[j]
                m = cls._unique_extreme(d, up)
                if m < 0:
                    raise NotALattice((labels[i], labels[j]))
                meet_t[i][j] = meet_t[j][i] = m

        bottom_i = 0
        top_i = 0
        for i in range(n):
            bottom_i = meet_t[bottom_i][i]
            top_i = join_t[top_i][i]

        covers_up = [0] * n
        for i in range(n):
            for j in range(n):
                if i != j and (down[j] >> i) & 1:
                    between = down[j] & up[i] & ~(1 << i) & ~(1 << j)
                    if between == 0:
                        covers_up[i] |= 1 << j

        return cls(labels, tuple(down), tuple(covers_up),
                   tuple(tuple(r) for r in join_t), tuple(tuple(r) for r in meet_t),
                   bottom_i, top_i)

    @staticmethod
    def _unique_extreme(candidates: int, order_masks) -> int:
        """Index of the unique extreme element of the candidate set, or -1.

        With down masks this finds the unique minimal candidate (joins);
        with up masks the unique maximal one (meets).
        """
        if candidates == 0:
            return -1
        found = -1
        for i in _bits(candidates):
            if (order_masks[i] & candidates) == (1 << i):
                if found >= 0:
                    return -1
                found = i
        return found

    @classmethod
    def from_family(
        cls, members: Iterable[frozenset], labeler, max_size: int = DEFAULT_LATTICE_CAP
    ) -> tuple["FiniteLattice", dict]:
        """Lattice of a set family ordered by inclusion (meets must exist).

        Returns the lattice plus the member -> label map.  Members are sorted
        by (size, sorted contents) so construction is deterministic.
        """
        ms = sorted(set(members), key=lambda s: (len(s), tuple(sorted(s))))
        labels = {s: labeler(s) for s in ms}
        pairs = []
        for a, b in itertools.permutations(ms, 2):
            if a < b and not any(a < c < b for c in ms):
                pairs.append((labels[a], labels[b]))
        lat = cls.from_covers([labels[s] for s in ms], pairs, max_size=max_size)
        return lat, labels

    # -- queries ---------------------------------------------------------------

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def elements(self) -> tuple[str, ...]:
        return self.labels

    @property
    def bottom(self) -> str:
        return self.labels[self.bottom_i]

    @property
    def top(self) -> str:
        return self.labels[self.top_i]

    def index(self, label: str) -> int:
        return self._index[label]

    def leq(self, a: str, b: str) -> bool:
        return bool((self.down[self._index[b]] >> self._index[a]) & 1)

    def join(self, a: str, b: str) -> str:
        return self.labels[self._join[self._index[a]][self._index[b]]]

    def meet(self, a: str, b: str) -> str:
        return self.labels[self._meet[self._index[a]][self._index[b]]]

    def join_of(self, xs: Iterable[str]) -> str:
        i = self.bottom_i
        for x in xs:
            i = self._join[i][self._index[x]]
        return self.labels[i]

    def meet_of(self, xs: Iterable[str]) -> str:
        i = self.top_i
        for x in xs:
            i = self._meet[i][self._index[x]]
        return self.labels[i]

    def lower_covers(self, x: str) -> frozenset[str]:
        i = self._index[x]
        return frozenset(self.labels[j] for j in range(len(self.labels))
                         if (self.covers_up[j] >> i) & 1)

    def upper_covers(self, x: str) -> frozenset[str]:
        return frozenset(self.labels[j] for j in _bits(self.covers_up[self._index[x]]))

    def cover_pairs(self) -> list[tuple[str, str]]:
        out = []
        for i, m in enumerate(self.covers_up):
            for j in _bits(m):
                out.append((self.labels[i], self.labels[j]))
        return sorted(out)

    def atoms(self) -> frozenset[str]:
        return self.upper_covers(self.bottom)

    @cached_property
    def _heights(self) -> tuple[int, ...]:
        n = len(self.labels)
        order = sorted(range(n), key=lambda i: _popcount(self.down[i]))
        h = [0] * n
        for j in order:
            for i in range(n):
                if i != j and (self.down[j] >> i) & 1:
                    h[j] = max(h[j], h[i] + 1)
        return tuple(h)

    def height_of(self, x: str) -> int:
        return self._heights[self._index[x]]

    def height(self) -> int:
        return self._heights[self.top_i]

    def sji_elements(self) -> frozenset[str]:
        """Elements other than the bottom covering at most one element."""
        return frozenset(
            x for x in self.labels
            if x != self.bottom and len(self.lower_covers(x)) <= 1
        )

    def smi_elements(self) -> frozenset[str]:
        """Elements other than the top covered by at most one element."""
        return frozenset(
            x for x in self.labels
            if x != self.top and len(self.upper_covers(x)) <= 1
        )

    def is_atomic(self) -> bool:
        atoms = self.atoms()
        return all(self.join_of(a for a in atoms if self.leq(a, x)) == x
                   for x in self.labels)

    def __repr__(self) -> str:
        return f"FiniteLattice({len(self.labels)} elements, height {self.height()})"


def lattice_from_covers(elements, cover_pairs, max_size: int = DEFAULT_LATTICE_CAP):
    return FiniteLattice.from_covers(elements, cover_pairs, max_size=max_size)


def height(l: FiniteLattice) -> int:
    return l.height()


def sji_elements(l: FiniteLattice) -> frozenset[str]:
    return l.sji_elements()


def smi_elements(l: FiniteLattice) -> frozenset[str]:
    return l.smi_elements()


@dataclass(frozen=True)
class VGenLattice:
    """A finite lattice together with a join-generating set E (bottom excluded)."""

    lattice: FiniteLattice
    gens: tuple[str, ...]

    def __post_init__(self) -> None:
        lat = self.lattice
        if len(lat) < 2:
            raise NotALattice("one-element lattices are not supported here")
        if len(set(self.gens)) != len(self.gens):
            raise FormatError("duplicate generators")
        for g in self.gens:
            if g not in lat._index:
                raise FormatError(f"unknown generator {g!r}")
            if g == lat.bottom:
                raise BottomElement("the bottom element cannot generate")
        for x in lat.labels:
            below = [g for g in self.gens if lat.leq(g, x)]
            if lat.join_of(below) != x:
                raise NotALattice(f"{x!r} is not a join of generators")

    def z_of(self, x: str) -> frozenset[str]:
        """Generators below x (the zero set of x's matrix row)."""
        lat = self.lattice
        return frozenset(g for g in self.gens if lat.leq(g, x))

    def flat_family(self) -> "FlatFamily":
        return FlatFamily(self.gens, frozenset(self.z_of(x) for x in self.lattice.labels))


@dataclass(frozen=True)
class FlatFamily:
    """An intersection-closed family of subsets of a ground set, containing E."""

    ground: tuple[str, ...]
    members: frozenset[frozenset[str]]

    def __post_init__(self) -> None:
        g = frozenset(self.ground)
        if g not in self.members:
            raise NotIntersectionClosed("the full ground set must be a member")
        for m in self.members:
            if not m <= g:
                raise NotIntersectionClosed(f"member {sorted(m)} outside ground")
        for a, b in itertools.combinations(self.members, 2):
            if a & b not in self.members:
                raise NotIntersectionClosed((sorted(a), sorted(b)))

    @classmethod
    def unchecked(cls, ground: tuple[str, ...], members: frozenset) -> "FlatFamily":
        """Skip validation; for internal paths that construct closed families."""
        obj = object.__new__(cls)
        object.__setattr__(obj, "ground", ground)
        object.__setattr__(obj, "members", members)
        return obj

    @property
    def full(self) -> bool:
        return frozenset() in self.members

    def __len__(self) -> int:
        return len(self.members)

    def __contains__(self, s) -> bool:
        return frozenset(s) in self.members

    def closure_of(self, xs: Iterable[str]) -> frozenset[str]:
        """Smallest member containing xs (E if nothing smaller does)."""
        s = frozenset(xs)
        out = frozenset(self.ground)
        for m in self.members:
            if s <= m:
                out &= m
        return out

    def sorted_members(self) -> list[frozenset[str]]:
        order = {g: i for i, g in enumerate(self.ground)}
        return sorted(self.members, key=lambda m: (len(m), sorted(order[x] for x in m)))


def flat_label(s: frozenset, ground: Sequence[str]) -> str:
    """Canonical label of a flat: members in ground order inside braces."""
    order = {g: i for i, g in enumerate(ground)}
    return "{" + ",".join(sorted(s, key=order.__getitem__)) + "}"


# -- matrix of a generated lattice ----------------------------------------------


def matrix_of(vg: VGenLattice, restrict_to_gens: bool = True) -> BoolMatrix:
    """The boolean matrix with rows L and columns E; 0 where column <= row.

    With restrict_to_gens=False the columns run over all non-bottom elements,
    the convention used when testing c-independence of arbitrary elements.
    """
    lat = vg.lattice
    cols = vg.gens if restrict_to_gens else tuple(
        x for x in lat.labels if x != lat.bottom)
    rows = tuple(
        tuple(0 if lat.leq(c, x) else 1 for c in cols) for x in lat.labels
    )
    return BoolMatrix(rows, cols, lat.labels)


def full_matrix(lat: FiniteLattice) -> BoolMatrix:
    """Matrix of (L, L minus bottom), used for c-independence of elements."""
    cols = tuple(x for x in lat.labels if x != lat.bottom)
    rows = tuple(tuple(0 if lat.leq(c, x) else 1 for c in cols) for x in lat.labels)
    return BoolMatrix(rows, cols, lat.labels)


# -- lattice of flats of a matrix ----------------------------------------------


def flats_of_matrix(m: BoolMatrix) -> tuple[FlatFamily, dict[str, frozenset[str]]]:
    """Intersection closure of the row zero sets, plus the per-column flats.

    The column flat of j is the intersection of all zero sets containing j;
    it always contains j.  Zero columns are rejected (the empty set would
    escape the construction).
    """
    for j, c in enumerate(m.col_labels):
        if all(r[j] == 0 for r in m.rows):
            raise ZeroColumn(c)
    ground = m.col_labels
    zsets = {m.zero_set(i) for i in range(m.n_rows)}
    members = set(zsets)
    members.add(frozenset(ground))
    work = list(members)
    while work:
        a = work.pop()
        for b in list(members):
            c = a & b
            if c not in members:
                members.add(c)
                work.append(c)
    y = {}
    for j, c in enumerate(m.col_labels):
        inter = frozenset(ground)
        for i in range(m.n_rows):
            if m.rows[i][j] == 0:
                inter &= m.zero_set(i)
        y[c] = inter
    fam = FlatFamily(ground, frozenset(members))
    return fam, y


def lattice_of_family(fam: FlatFamily, max_size: int = DEFAULT_LATTICE_CAP):
    """(FiniteLattice ordered by inclusion, member -> label map)."""
    return FiniteLattice.from_family(
        fam.members, lambda s: flat_label(s, fam.ground), max_size=max_size
    )


def lattice_from_matrix(m: BoolMatrix, max_size: int = DEFAULT_LATTICE_CAP) -> VGenLattice:
    """The flat lattice of m, join-generated by the column flats."""
    fam, y = flats_of_matrix(m)
    lat, labels = lattice_of_family(fam, max_size=max_size)
    gens = []
    for c in m.col_labels:
        lbl = labels[y[c]]
        if lbl not in gens:
            gens.append(lbl)
    return VGenLattice(lat, tuple(gens))


# -- c-independence --------------------------------------------------------------


def c_independence_chain(vg: VGenLattice, xs: Iterable[str]) -> Optional[list[str]]:
    """An enumeration of xs with strictly decreasing suffix joins, or None.

    Peels the first element: x1 qualifies when dropping it strictly lowers
    the join of the rest; ties break to lattice element order so the
    certificate chain is deterministic.
    """
    lat = vg.lattice
    s = frozenset(xs)
    if lat.bottom in s:
        raise BottomElement(lat.bottom)
    for x in s:
        if x not in lat._index:
            raise FormatError(f"unknown element {x!r}")
    memo: dict[frozenset, Optional[tuple]] = {}

    def joins(sub: frozenset) -> str:
        return lat.join_of(sub)

    def rec(sub: frozenset) -> Optional[tuple]:
        if len(sub) <= 1:
            return tuple(sub)
        if sub in memo:
            return memo[sub]
        j = joins(sub)
        out = None
        for x1 in sorted(sub, key=lat.index):
            rest = sub - {x1}
            if joins(rest) != j:
                tail = rec(rest)
                if tail is not None:
                    out = (x1,) + tail
                    break
        memo[sub] = out
        return out

    chain = rec(s)
    return list(chain) if chain is not None else None


def c_independent(vg: VGenLattice, xs: Iterable[str]) -> bool:
    return c_independence_chain(vg, xs) is not None


def closure_in_lattice(vg: VGenLattice, xs: Iterable[str]) -> frozenset[str]:
    """Generators below the join of xs — the closure operator of (L, E)."""
    for x in xs:
        if x not in vg.gens:
            raise FormatError(f"{x!r} is not a generator")
    return vg.z_of(vg.lattice.join_of(xs))


# -- congruence (matrices up to independent row/column permutation) --------------


def congruent(m1: BoolMatrix, m2: BoolMatrix) -> bool:
    """True when m2 arises from m1 by permuting rows and columns independently.

    Columns are first partitioned by invariant signatures; a backtracking
    assignment within classes compares sorted row multisets at the leaves.
    """
    if m1.n_rows != m2.n_rows or m1.n_cols != m2.n_cols:
        return False

    def colsig(m: BoolMatrix):
        rw = [sum(r) for r in m.rows]
        sigs = []
        for j in range(m.n_cols):
            ones = sorted(rw[i] for i in range(m.n_rows) if m.rows[i][j] == 1)
            sigs.append((len(ones), tuple(ones)))
        return sigs

    s1, s2 = colsig(m1), colsig(m2)
    if sorted(s1) != sorted(s2):
        return False
    classes: dict = {}
    for j, s in enumerate(s2):
        classes.setdefault(s, []).append(j)
    rows2 = sorted(m2.rows)
    order1 = sorted(range(m1.n_cols), key=lambda j: s1[j])

    used = [False] * m2.n_cols
    assign = [0] * m1.n_cols

    def rec(k: int) -> bool:
        if k == len(order1):
            perm = [0] * m1.n_cols
            for j in range(m1.n_cols):
                perm[assign[j]] = j
            rows1 = sorted(tuple(r[perm[t]] for t in range(m1.n_cols)) for r in m1.rows)
            return rows1 == rows2
        j = order1[k]
        for t in classes.get(s1[j], ()):
            if not used[t]:
                used[t] = True
                assign[j] = t
                if rec(k + 1):
                    return True
                used[t] = False
        return False

    return rec(0)


def vgen_isomorphic(a: VGenLattice, b: VGenLattice) -> bool:
    """Lattice isomorphism mapping generators onto generators.

    Elements are determined by their generator zero sets, so this is exactly
    congruence of the two matrices.
    """
    la, lb = a.lattice, b.lattice
    if len(la) != len(lb) or len(a.gens) != len(b.gens):
        return False
    return congruent(matrix_of(a), matrix_of(b))


def lattice_isomorphic(a: FiniteLattice, b: FiniteLattice) -> bool:
    """Plain lattice isomorphism, via the canonical sji generating sets."""
    if len(a) != len(b):
        return False
    if len(a) == 1:
        return True
    ga = tuple(sorted(a.sji_elements(), key=a.index))
    gb = tuple(sorted(b.sji_elements(), key=b.index))
    return vgen_isomorphic(VGenLattice(a, ga), VGenLattice(b, gb))


# -- text format and DOT ----------------------------------------------------------


def lattice_to_text(obj) -> str:
    """`elements:` line, one `covers: a < b` line per cover, `gens:` if any."""
    vg = obj if isinstance(obj, VGenLattice) else None
    lat = vg.lattice if vg else obj
    lines = ["elements: " + " ".join(lat.labels)]
    for a, b in lat.cover_pairs():
        lines.append(f"covers: {a} < {b}")
    if vg:
        lines.append("gens: " + " ".join(vg.gens))
    return "\n".join(lines) + "\n"


def lattice_from_text(text: str, max_size: int = DEFAULT_LATTICE_CAP):
    """Parse the text format; returns VGenLattice when a gens line is present."""
    elements: list[str] = []
    pairs: list[tuple[str, str]] = []
    gens: Optional[list[str]] = None
    for ln in text.splitlines():
        ln = ln.strip()
        if not ln or ln.startswith("#"):
            continue
        if ln.startswith("elements:"):
            elements = ln[len("elements:"):].split()
        elif ln.startswith("covers:"):
            body = ln[len("covers:"):]
            if "<" not in body:
                raise FormatError(f"bad covers line: {ln!r}")
            a, b = (p.strip() for p in body.split("<", 1))
            pairs.append((a, b))
        elif ln.startswith("gens:"):
            gens = ln[len("gens:"):].split()
        else:
            raise FormatError(f"unrecognized line: {ln!r}")
    if not elements:
        raise FormatError("missing elements: line")
    lat = FiniteLattice.from_covers(elements, pairs, max_size=max_size)
    if gens is None:
        return lat
    return VGenLattice(lat, tuple(gens))


def hasse_dot(obj, name: str = "lattice") -> str:
    """DOT source for the Hasse diagram; edges point bottom-up, gens get *."""
    vg = obj if isinstance(obj, VGenLattice) else None
    lat = vg.lattice if vg else obj
    gens = set(vg.gens) if vg else set()
    lines = [f"digraph {name} {{", "  rankdir=BT;", "  node [shape=plaintext];"]
    for x in lat.labels:
        text = x + ("*" if x in gens else "")
        lines.append(f'  "{x}" [label="{text}"];')
    for a, b in lat.cover_pairs():
        lines.append(f'  "{a}" -> "{b}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
