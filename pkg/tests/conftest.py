"""Shared generators and brute-force oracles for the test suite.

The lattice enumerator produces every finite lattice up to isomorphism for
small sizes (1, 1, 1, 2, 5, 15, 53, 222, 1078 for n = 1..9); counts are
asserted in test_lattice.  Oracles here recompute results by definition
(permutation sums, row-subset searches) independently of the library's
algorithms.
"""

from __future__ import annotations

import itertools
import random
from functools import lru_cache

from boolrep.lattice import FiniteLattice, VGenLattice
from boolrep.hereditary import HereditaryCollection
from boolrep.sbcore import SB, BoolMatrix


def fs(*items):
    return frozenset(items)


# -- exhaustive lattice enumeration ----------------------------------------------------


def _check_lattice_masks(downs, m):
    ups = [0] * m
    for i in range(m):
        for j in range(m):
            if (downs[j] >> i) & 1:
                ups[i] |= 1 << j
    if any(not (downs[j] & 1) for j in range(m)):
        return False
    for a in range(m):
        for b in range(a + 1, m):
            for cand, masks in ((ups[a] & ups[b], downs), (downs[a] & downs[b], ups)):
                cnt = 0
                mm = cand
                while mm:
                    low = mm & (-mm)
                    i = low.bit_length() - 1
                    if (masks[i] & cand) == (1 << i):
                        cnt += 1
                        if cnt > 1:
                            break
                    mm ^= low
                if cnt != 1:
                    return False
    return True


def _canon_key(downs, m):
    ups = [0] * m
    for i in range(m):
        for j in range(m):
            if (downs[j] >> i) & 1:
                ups[i] |= 1 << j
    inv = [(bin(downs[i]).count("1"), bin(ups[i]).count("1")) for i in range(m)]
    for _ in range(3):
        newinv = []
        for i in range(m):
            below = sorted(inv[j] for j in range(m) if (downs[i] >> j) & 1 and j != i)
            above = sorted(inv[j] for j in range(m) if (ups[i] >> j) & 1 and j != i)
            newinv.append((inv[i], tuple(below), tuple(above)))
        uniq = {v: k for k, v in enumerate(sorted(set(newinv)))}
        inv = [(uniq[v],) for v in newinv]
    groups: dict = {}
    for i in range(m):
        groups.setdefault(inv[i], []).append(i)
    group_keys = sorted(groups)
    total = 1
    for k in group_keys:
        f = 1
        for t in range(2, len(groups[k]) + 1):
            f *= t
        total *= f
    if total > 100000:
        # no safe cheap canonical form: refuse to dedupe (duplicates are harmless)
        return ("raw", m, tuple(downs))
    best = None
    for combo in itertools.product(
            *(itertools.permutations(groups[k]) for k in group_keys)):
        perm = [i for grp in combo for i in grp]
        bits = 0
        idx = 0
        for x in range(m):
            for y in range(m):
                if (downs[perm[y]] >> perm[x]) & 1:
                    bits |= 1 << idx
                idx += 1
        if best is None or bits < best:
            best = bits
    return ("exact", m, best)


@lru_cache(maxsize=None)
def all_lattice_masks(n: int) -> tuple:
    """All lattices on exactly n elements, up to isomorphism, as down-mask tuples."""
    if n == 1:
        return ((1,),)
    results: dict = {}

    def rec(j, downs):
        if j == n - 1:
            maximals = [i for i in range(n - 1)
                        if all((downs[k] >> i) & 1 == 0
                               for k in range(n - 1) if k != i)]
            dj = 1 << (n - 1)
            for i in maximals:
                dj |= downs[i]
            downs2 = downs + [dj]
            if _check_lattice_masks(downs2, n):
                key = _canon_key(downs2, n)
                if key not in results:
                    results[key] = tuple(downs2)
            return
        prev = list(range(j))
        for r in range(1, j + 1):
            for d in itertools.combinations(prev, r):
                ok = True
                for a, b in itertools.combinations(d, 2):
                    if (downs[b] >> a) & 1 or (downs[a] >> b) & 1:
                        ok = False
                        break
                if not ok:
                    continue
                dj = 1 << j
                for i in d:
                    dj |= downs[i]
                rec(j + 1, downs + [dj])

    rec(1, [1])
    return tuple(results.values())


def lattice_from_masks(downs) -> FiniteLattice:
    n = len(downs)
    labels = [f"x{i}" for i in range(n)]
    pairs = []
    for i in range(n):
        for j in range(n):
            if i != j and (downs[j] >> i) & 1:
                pairs.append((labels[i], labels[j]))
    return FiniteLattice.from_covers(labels, pairs, max_size=max(64, n + 1))


@lru_cache(maxsize=None)
def all_lattices(n: int) -> tuple:
    return tuple(lattice_from_masks(d) for d in all_lattice_masks(n))


def lattices_up_to(n: int):
    for k in range(2, n + 1):
        yield from all_lattices(k)


def all_vgens(lat: FiniteLattice):
    """Every generating-set choice for a lattice (bottom excluded)."""
    nonbottom = [x for x in lat.labels if x != lat.bottom]
    sji = lat.sji_elements()
    extras = [x for x in nonbottom if x not in sji]
    for r in range(len(extras) + 1):
        for add in itertools.combinations(extras, r):
            yield VGenLattice(lat, tuple(sorted(sji | set(add), key=lat.index)))


# -- random structures --------------------------------------------------------------------


def random_closure_lattice(rng: random.Random, universe: int = 4,
                           seeds: int = 4, max_size: int = 24) -> FiniteLattice:
    """Random intersection-closed family of subsets, ordered by inclusion."""
    items = list(range(universe))
    members = {frozenset(items)}
    for _ in range(seeds):
        members.add(frozenset(x for x in items if rng.random() < 0.5))
    work = list(members)
    while work:
        a = work.pop()
        for b in list(members):
            c = a & b
            if c not in members:
                members.add(c)
                work.append(c)
    lat, _ = FiniteLattice.from_family(
        members, lambda s: "".join(str(x) for x in sorted(s)) or "o",
        max_size=max(64, len(members) + 1))
    return lat


def random_vgen(rng: random.Random, universe: int = 4, seeds: int = 4) -> VGenLattice:
    lat = random_closure_lattice(rng, universe, seeds)
    while len(lat) < 2:
        lat = random_closure_lattice(rng, universe, seeds)
    nonbottom = [x for x in lat.labels if x != lat.bottom]
    gens = set(lat.sji_elements())
    for x in nonbottom:
        if rng.random() < 0.3:
            gens.add(x)
    return VGenLattice(lat, tuple(sorted(gens, key=lat.index)))


def random_lattice_of_height(rng: random.Random, h: int, universe: int = 5,
                             seeds: int = 5, attempts: int = 2000) -> FiniteLattice:
    for _ in range(attempts):
        lat = random_closure_lattice(rng, universe, seeds)
        if lat.height() == h:
            return lat
    raise RuntimeError(f"no height-{h} lattice found")


def random_hc(rng: random.Random, n: int, density: float = 0.6
              ) -> HereditaryCollection:
    """Random downward-closed family by sampling facet candidates."""
    ground = tuple(str(i) for i in range(1, n + 1))
    sets = {frozenset()}
    for _ in range(rng.randint(1, 2 * n)):
        size = rng.randint(1, n)
        cand = frozenset(rng.sample(ground, size))
        if rng.random() < density:
            for r in range(len(cand) + 1):
                for c in itertools.combinations(sorted(cand), r):
                    sets.add(frozenset(c))
    return HereditaryCollection(ground, frozenset(sets))


def random_simple_hc(rng: random.Random, n: int) -> HereditaryCollection:
    """Simple random collection: all pairs independent plus random bigger sets."""
    ground = tuple(str(i) for i in range(1, n + 1))
    sets = set()
    for r in range(3):
        for c in itertools.combinations(ground, r):
            sets.add(frozenset(c))
    for size in range(3, n + 1):
        for c in itertools.combinations(ground, size):
            if all(frozenset(s) in sets for s in itertools.combinations(c, size - 1)) \
                    and rng.random() < 0.45:
                sets.add(frozenset(c))
    return HereditaryCollection(ground, frozenset(sets))


def random_matroid(rng: random.Random, n: int, attempts: int = 4000
                   ) -> HereditaryCollection:
    """Random simple matroid: uniform, free, or rank-3 with random lines.

    A family of >= 3-point lines meeting pairwise in at most one point gives
    a matroid whose dependent triples are the collinear ones; the exchange
    property is still checked by the caller (and asserted here).
    """
    ground = tuple(str(i) for i in range(1, n + 1))
    style = rng.random()
    if style < 0.3:
        hc = uniform(rng.randint(2, n), n)
    else:
        lines: list[frozenset] = []
        for _ in range(rng.randint(0, n)):
            size = rng.randint(3, max(3, n - 1))
            cand = frozenset(rng.sample(ground, min(size, n)))
            if all(len(cand & l) <= 1 for l in lines):
                lines.append(cand)
        h = [frozenset(c) for r in range(4)
             for c in itertools.combinations(ground, r)
             if not any(frozenset(c) <= l for l in lines) or len(c) < 3]
        hc = HereditaryCollection(ground, frozenset(h))
    assert hc.is_matroid()
    return hc


def uniform(a: int, b: int) -> HereditaryCollection:
    ground = tuple(str(i) for i in range(1, b + 1))
    return HereditaryCollection.from_independents(
        ground, (c for r in range(a + 1)
                 for c in itertools.combinations(ground, r)))


@lru_cache(maxsize=None)
def all_simple_hcs(n: int) -> tuple:
    """Every simple hereditary collection on n points (n <= 5)."""
    assert n <= 5
    ground = tuple(str(i) for i in range(1, n + 1))
    base = [frozenset(c) for r in range(3) for c in itertools.combinations(ground, r)]
    bigger = [[frozenset(c) for c in itertools.combinations(ground, size)]
              for size in range(3, n + 1)]

    out = []

    def rec(level: int, chosen: set):
        if level == len(bigger):
            out.append(HereditaryCollection(
                ground, frozenset(base) | frozenset(chosen)))
            return
        cands = [c for c in bigger[level]
                 if all(frozenset(s) in chosen or len(s) < 3
                        for s in map(frozenset,
                                     itertools.combinations(sorted(c), len(c) - 1)))]
        for r in range(len(cands) + 1):
            for pick in itertools.combinations(cands, r):
                rec(level + 1, chosen | set(pick))

    rec(0, set())
    return tuple(out)


# -- brute-force oracles ---------------------------------------------------------------------


def permanent_oracle(m: BoolMatrix) -> SB:
    """Direct sum over all permutations using the semiring element ops."""
    n = m.n_rows
    total = SB.ZERO
    for sigma in itertools.permutations(range(n)):
        prod = SB.ONE
        for i in range(n):
            prod = prod * SB(m.rows[i][sigma[i]])
        total = total + prod
    return total


def independent_oracle(m: BoolMatrix, cols) -> bool:
    """Row-subset brute force with the permanent oracle on each candidate."""
    idx = [m.col_index(c) for c in cols]
    k = len(idx)
    if k == 0:
        return True
    if k > m.n_rows:
        return False
    for rows in itertools.combinations(range(m.n_rows), k):
        sub = m.submatrix(rows, idx)
        if permanent_oracle(sub) is SB.ONE:
            return True
    return False


@lru_cache(maxsize=None)
def all_hcs(n: int) -> tuple:
    """Every hereditary collection on n points (n <= 4: 167 of them)."""
    assert n <= 4
    ground = tuple(str(i) for i in range(1, n + 1))
    subsets = sorted((frozenset(c) for r in range(n + 1)
                      for c in itertools.combinations(ground, r)), key=len)
    out = []

    def rec(i, chosen):
        if i == len(subsets):
            if chosen:
                out.append(HereditaryCollection(ground, frozenset(chosen)))
            return
        s = subsets[i]
        rec(i + 1, chosen)
        if all(s - {x} in chosen for x in s):
            chosen.add(s)
            rec(i + 1, chosen)
            chosen.discard(s)

    rec(0, set())
    return tuple(out)
