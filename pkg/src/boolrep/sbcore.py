"""Superboolean arithmetic and boolean-matrix independence.

The superboolean semiring has three elements {0, 1, 1nu} with saturating
addition (1 + 1 = 1nu) and multiplication absorbing on 0.  Boolean matrices
(entries 0/1) are viewed as matrices over this semiring; a square matrix is
nonsingular when its permanent is exactly 1, equivalently when independent row
and column permutations put it into lower triangular form with unit diagonal
and zeros strictly above.  A column subset J of a rectangular matrix is
independent when some equipotent row subset I makes M[I,J] nonsingular; such
an I is a witness for J.
"""

from __future__ import annotations

import enum
import itertools
import re
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Optional, Sequence

from .errors import DimensionError, FormatError, SizeError, UnknownColumn

PERMANENT_GUARD = 12

_AUTO_ROW = re.compile(r"^r\d+$")


class SB(enum.Enum):
    """A superboolean value: 0, 1 or the saturated 1nu."""

    ZERO = 0
    ONE = 1
    ONE_NU = 2

    def __add__(self, other: "SB") -> "SB":
        return SB(min(self.value + other.value, 2))

    def __mul__(self, other: "SB") -> "SB":
        if self.value == 0 or other.value == 0:
            return SB.ZERO
        return SB(max(self.value, other.value))

    def __str__(self) -> str:
        return {0: "0", 1: "1", 2: "1nu"}[self.value]


def _auto_rows(n: int) -> tuple[str, ...]:
    return tuple(f"r{i}" for i in range(n))


def _auto_cols(n: int) -> tuple[str, ...]:
    return tuple(str(i + 1) for i in range(n))


@dataclass(frozen=True)
class BoolMatrix:
    """An immutable 0/1 matrix with labelled rows and ground-set columns."""

    rows: tuple[tuple[int, ...], ...]
    col_labels: tuple[str, ...]
    row_labels: tuple[str, ...]

    def __post_init__(self) -> None:
        if len(set(self.col_labels)) != len(self.col_labels):
            raise FormatError("duplicate column labels")
        if len(set(self.row_labels)) != len(self.row_labels):
            raise FormatError("duplicate row labels")
        if len(self.row_labels) != len(self.rows):
            raise FormatError("row label count does not match row count")
        w = len(self.col_labels)
        for r in self.rows:
            if len(r) != w:
                raise FormatError("ragged row")
            if any(v not in (0, 1) for v in r):
                raise FormatError("entries must be 0 or 1")

    @classmethod
    def build(
        cls,
        rows: Sequence[Sequence[int]],
        col_labels: Optional[Sequence[str]] = None,
        row_labels: Optional[Sequence[str]] = None,
    ) -> "BoolMatrix":
        rows_t = tuple(tuple(int(v) for v in r) for r in rows)
        ncols = len(rows_t[0]) if rows_t else (len(col_labels) if col_labels else 0)
        cols = tuple(col_labels) if col_labels is not None else _auto_cols(ncols)
        rl = tuple(row_labels) if row_labels is not None else _auto_rows(len(rows_t))
        return cls(rows_t, cols, rl)

    # -- shape and lookup ----------------------------------------------------

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def n_cols(self) -> int:
        return len(self.col_labels)

    @cached_property
    def _col_index(self) -> dict[str, int]:
        return {c: i for i, c in enumerate(self.col_labels)}

    def col_index(self, label: str) -> int:
        try:
            return self._col_index[label]
        except KeyError:
            raise UnknownColumn(label) from None

    @cached_property
    def ones_masks(self) -> tuple[int, ...]:
        """Per-row bitmask of columns holding a 1 (bit i = column i)."""
        out = []
        for r in self.rows:
            m = 0
            for i, v in enumerate(r):
                if v:
                    m |= 1 << i
            out.append(m)
        return tuple(out)

    def zero_set(self, row: int) -> frozenset[str]:
        """Column labels where the given row is 0."""
        return frozenset(c for c, v in zip(self.col_labels, self.rows[row]) if v == 0)

    # -- derived matrices ------------------------------------------------------

    def transpose(self) -> "BoolMatrix":
        return BoolMatrix(
            tuple(zip(*self.rows)) if self.rows else (),
            self.row_labels,
            self.col_labels,
        )

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "BoolMatrix":
        return BoolMatrix(
            tuple(tuple(self.rows[i][j] for j in col_idx) for i in row_idx),
            tuple(self.col_labels[j] for j in col_idx),
            tuple(self.row_labels[i] for i in row_idx),
        )

    def dedupe_rows(self) -> "BoolMatrix":
        """Drop duplicate rows, keeping the first occurrence from the top."""
        seen: set[tuple[int, ...]] = set()
        keep = []
        for i, r in enumerate(self.rows):
            if r not in seen:
                seen.add(r)
                keep.append(i)
        if len(keep) == self.n_rows:
            return self
        return self.submatrix(keep, range(self.n_cols))

    # -- text format -----------------------------------------------------------

    def to_text(self) -> str:
        """Serialize: a `cols:` header then one 0/1 line per row.

        Row labels are emitted with a `row:` prefix unless they are the
        auto-generated r0, r1, ... pattern; round-trips bit-exactly.
        """
        lines = ["cols: " + " ".join(self.col_labels)]
        auto = all(_AUTO_ROW.match(l) for l in self.row_labels) and list(
            self.row_labels
        ) == list(_auto_rows(self.n_rows))
        for label, r in zip(self.row_labels, self.rows):
            bits = "".join(str(v) for v in r)
            lines.append(bits if auto else f"row: {label} {bits}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "BoolMatrix":
        lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
        if not lines or not lines[0].startswith("cols:"):
            raise FormatError("matrix text must start with a 'cols:' line")
        cols = tuple(lines[0][len("cols:"):].split())
        rows, labels = [], []
        for k, ln in enumerate(lines[1:]):
            if ln.startswith("row:"):
                parts = ln[len("row:"):].split()
                if len(parts) != 2:
                    raise FormatError(f"bad row line: {ln!r}")
                label, bits = parts
            else:
                label, bits = f"r{k}", ln
            if not set(bits) <= {"0", "1"} or len(bits) != len(cols):
                raise FormatError(f"bad bit string on line: {ln!r}")
            labels.append(label)
            rows.append(tuple(int(b) for b in bits))
        return cls(tuple(rows), cols, tuple(labels))

    def __str__(self) -> str:
        return self.to_text()


@dataclass(frozen=True)
class Witness:
    """A certificate that column subset `cols` is independent.

    `row_order`/`col_order` are index sequences such that the submatrix read
    in that order is lower triangular with 1s on the diagonal and 0s strictly
    above it.
    """

    row_order: tuple[int, ...]
    col_order: tuple[int, ...]

    @property
    def rows(self) -> frozenset[int]:
        return frozenset(self.row_order)

    @property
    def cols(self) -> frozenset[int]:
        return frozenset(self.col_order)

    def verify(self, m: BoolMatrix) -> bool:
        """Literal triangular-form predicate on the ordered submatrix."""
        if len(self.row_order) != len(self.col_order):
            return False
        k = len(self.row_order)
        for a in range(k):
            r = m.rows[self.row_order[a]]
            if r[self.col_order[a]] != 1:
                return False
            if any(r[self.col_order[b]] != 0 for b in range(a + 1, k)):
                return False
        return True


# -- permanent ----------------------------------------------------------------


def permanent(m: BoolMatrix) -> SB:
    """Permanent over the superboolean semiring (guarded to n <= 12).

    Retained as the nonsingularity oracle; marker peeling is the production
    test.
    """
    n = m.n_rows
    if n != m.n_cols:
        raise DimensionError(f"permanent needs a square matrix, got {n}x{m.n_cols}")
    if n < 1:
        raise DimensionError("permanent needs n >= 1")
    if n > PERMANENT_GUARD:
        raise SizeError(f"permanent guard: n = {n} > {PERMANENT_GUARD}")

    masks = m.ones_masks
    total = 0  # 0, 1 or 2 with saturation at 2; 0/1 entries keep products in {0,1}

    def rec(row: int, avail: int) -> None:
        nonlocal total
        if total == 2:
            return
        if row == n:
            total = min(total + 1, 2)
            return
        choices = masks[row] & avail
        while choices:
            low = choices & (-choices)
            rec(row + 1, avail & ~low)
            if total == 2:
                return
            choices ^= low

    rec(0, (1 << n) - 1)
    return SB(total)


# -- nonsingularity via marker peeling -----------------------------------------


def triangular_certificate(m: BoolMatrix) -> Optional[Witness]:
    """Marker-peel a square matrix into triangular form.

    Repeatedly take the lowest-indexed remaining row with exactly one 1 on
    the remaining columns; that row and its column become the next diagonal
    position.  Succeeds iff the matrix is nonsingular.
    """
    n = m.n_rows
    if n != m.n_cols:
        raise DimensionError(f"nonsingularity needs a square matrix, got {n}x{m.n_cols}")
    masks = list(m.ones_masks)
    avail_rows = list(range(n))
    col_mask = (1 << n) - 1
    row_order: list[int] = []
    col_order: list[int] = []
    for _ in range(n):
        pick = -1
        for i in avail_rows:
            rest = masks[i] & col_mask
            if rest and rest & (rest - 1) == 0:
                pick = i
                break
        if pick < 0:
            return None
        bit = masks[pick] & col_mask
        row_order.append(pick)
        col_order.append(bit.bit_length() - 1)
        avail_rows.remove(pick)
        col_mask &= ~bit
    return Witness(tuple(row_order), tuple(col_order))


def is_nonsingular(m: BoolMatrix) -> bool:
    return triangular_certificate(m) is not None


# -- column independence --------------------------------------------------------


def witness_for(m: BoolMatrix, cols: Iterable[str]) -> Optional[Witness]:
    """Search a witness for the given column labels, or None.

    Backtracking over marker rows: any witness's first row has exactly one 1
    on the remaining columns, so branching over all such rows is complete.
    Ties break to the lowest row index, giving deterministic certificates.
    """
    idx = sorted(m.col_index(c) for c in set(cols))
    k = len(idx)
    if k == 0:
        return Witness((), ())
    if k > m.n_rows:
        return None
    masks = m.ones_masks
    target = 0
    for j in idx:
        target |= 1 << j

    row_order: list[int] = []
    col_order: list[int] = []

    def rec(col_mask: int, used_rows: int) -> bool:
        if col_mask == 0:
            return True
        for i in range(m.n_rows):
            if (used_rows >> i) & 1:
                continue
            rest = masks[i] & col_mask
            if rest and rest & (rest - 1) == 0:
                row_order.append(i)
                col_order.append(rest.bit_length() - 1)
                if rec(col_mask & ~rest, used_rows | (1 << i)):
                    return True
                row_order.pop()
                col_order.pop()
        return False

    if rec(target, 0):
        return Witness(tuple(row_order), tuple(col_order))
    return None


def columns_independent(m: BoolMatrix, cols: Iterable[str]) -> bool:
    return witness_for(m, cols) is not None


def matrix_rank(m: BoolMatrix) -> int:
    """Maximum size of an independent column subset.

    Independent sets are downward closed, so the first hit scanning sizes from
    the top is the rank; a greedy pass first raises the lower cutoff so small
    matrices exit early.
    """
    labels = m.col_labels
    # greedy lower bound
    current: list[str] = []
    for c in labels:
        if columns_independent(m, current + [c]):
            current.append(c)
    lo = len(current)
    hi = min(m.n_rows, m.n_cols)
    for k in range(hi, lo, -1):
        for combo in itertools.combinations(labels, k):
            if columns_independent(m, combo):
                return k
    return lo
