"""Exact rational linear algebra.

Every number is a :class:`fractions.Fraction`; matrices are immutable, dense,
row-major.  Elimination always picks the leftmost available pivot column and
the topmost nonzero row in it, so every basis computed downstream (kernels,
homology representatives, SDR splittings) is reproducible.
"""
from __future__ import annotations

import re
from fractions import Fraction
from typing import Iterable, Optional, Sequence

Rational = Fraction
Vector = tuple  # tuple[Fraction, ...]

_RATIONAL_RE = re.compile(r"^-?\d+(/\d+)?$")


def parse_rational(s) -> Fraction:
    """Parse ``"p/q"`` or ``"n"``; the denominator must be positive."""
    if isinstance(s, bool):
        raise ValueError(f"not a rational: {s!r}")
    if isinstance(s, int):
        return Fraction(s)
    if isinstance(s, Fraction):
        return s
    if not isinstance(s, str) or not _RATIONAL_RE.match(s.strip()):
        raise ValueError(f"not a rational string: {s!r}")
    if "/" in s and int(s.split("/")[1]) == 0:
        raise ValueError(f"zero denominator: {s!r}")
    return Fraction(s.strip())


def format_rational(q: Fraction) -> str:
    return str(Fraction(q))


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return parse_rational(x)
    if isinstance(x, float):
        raise TypeError("floats are not accepted; pass ints, Fractions or strings")
    return Fraction(x)


class QMatrix:
    """Dense immutable matrix over the rationals."""

    __slots__ = ("rows", "cols", "_data", "_hash")

    def __init__(self, rows: int, cols: int, data: Iterable[Iterable] = ()):
        self.rows = rows
        self.cols = cols
        data = tuple(tuple(_frac(x) for x in row) for row in data)
        if not data and rows:
            data = tuple((Fraction(0),) * cols for _ in range(rows))
        if len(data) != rows or any(len(r) != cols for r in data):
            raise ValueError(f"entries do not match shape {rows}x{cols}")
        self._data = data
        self._hash = None

    # construction -----------------------------------------------------
    @classmethod
    def from_rows(cls, rows: Sequence[Sequence], cols: Optional[int] = None) -> "QMatrix":
        rows = list(rows)
        if cols is None:
            cols = len(rows[0]) if rows else 0
        return cls(len(rows), cols, rows)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> "QMatrix":
        return cls(n, n, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def scalar(cls, n: int, c) -> "QMatrix":
        c = _frac(c)
        return cls(n, n, [[c if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols: Sequence[Sequence], rows: int) -> "QMatrix":
        cols = list(cols)
        return cls(rows, len(cols), [[c[i] for c in cols] for i in range(rows)])

    @classmethod
    def hstack(cls, mats: Sequence["QMatrix"], rows: Optional[int] = None) -> "QMatrix":
        mats = list(mats)
        if rows is None:
            rows = mats[0].rows if mats else 0
        if any(m.rows != rows for m in mats):
            raise ValueError("hstack row mismatch")
        data = [sum((m._data[i] for m in mats), ()) for i in range(rows)]
        return cls(rows, sum(m.cols for m in mats), data)

    @classmethod
    def vstack(cls, mats: Sequence["QMatrix"], cols: Optional[int] = None) -> "QMatrix":
        mats = list(mats)
        if cols is None:
            cols = mats[0].cols if mats else 0
        if any(m.cols != cols for m in mats):
            raise ValueError("vstack column mismatch")
        data = [row for m in mats for row in m._data]
        return cls(len(data), cols, data)

    @classmethod
    def block(cls, blocks: Sequence[Sequence["QMatrix"]]) -> "QMatrix":
        return cls.vstack([cls.hstack(row) for row in blocks])

    @classmethod
    def block_diag(cls, mats: Sequence["QMatrix"]) -> "QMatrix":
        mats = list(mats)
        R = sum(m.rows for m in mats)
        C = sum(m.cols for m in mats)
        out = [[Fraction(0)] * C for _ in range(R)]
        r0 = c0 = 0
        for m in mats:
            for i in range(m.rows):
                for j in range(m.cols):
                    out[r0 + i][c0 + j] = m._data[i][j]
            r0 += m.rows
            c0 += m.cols
        return cls(R, C, out)

    # access -------------------------------------------------------------
    @property
    def shape(self) -> tuple:
        return (self.rows, self.cols)

    def __getitem__(self, ij):
        i, j = ij
        return self._data[i][j]

    def row(self, i: int) -> Vector:
        return self._data[i]

    def column(self, j: int) -> Vector:
        return tuple(r[j] for r in self._data)

    def columns(self) -> list:
        return [self.column(j) for j in range(self.cols)]

    def tolist(self) -> list:
        return [list(r) for r in self._data]

    def to_strings(self) -> list:
        return [[format_rational(x) for x in r] for r in self._data]

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "QMatrix":
        rows, cols = list(rows), list(cols)
        return QMatrix(len(rows), len(cols), [[self._data[i][j] for j in cols] for i in rows])

    def is_zero(self) -> bool:
        return all(x == 0 for r in self._data for x in r)

    def first_nonzero(self):
        for i, r in enumerate(self._data):
            for j, x in enumerate(r):
                if x != 0:
                    return (i, j, x)
        return None

    # arithmetic ---------------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and self._data == other._data

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.rows, self.cols, self._data))
        return self._hash

    def __repr__(self):
        body = "; ".join(" ".join(format_rational(x) for x in r) for r in self._data)
        return f"QMatrix({self.rows}x{self.cols}: [{body}])"

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")

    def __add__(self, other: "QMatrix") -> "QMatrix":
        self._check_same(other)
        return QMatrix(self.rows, self.cols,
                       [[a + b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)])

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        self._check_same(other)
        return QMatrix(self.rows, self.cols,
                       [[a - b for a, b in zip(r, s)] for r, s in zip(self._data, other._data)])

    def __neg__(self) -> "QMatrix":
        return QMatrix(self.rows, self.cols, [[-a for a in r] for r in self._data])

    def scale(self, c) -> "QMatrix":
        c = _frac(c)
        return QMatrix(self.rows, self.cols, [[c * a for a in r] for r in self._data])

    def __rmul__(self, c):
        return self.scale(c)

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        ocols = list(zip(*other._data)) if other.rows else [()] * other.cols
        out = []
        for r in self._data:
            nz = [(k, a) for k, a in enumerate(r) if a != 0]
            out.append([sum((a * col[k] for k, a in nz), Fraction(0)) for col in ocols])
        return QMatrix(self.rows, other.cols, out)

    def apply(self, v: Sequence) -> Vector:
        if len(v) != self.cols:
            raise ValueError("vector length mismatch")
        v = [_frac(x) for x in v]
        return tuple(sum((a * b for a, b in zip(r, v) if a != 0), Fraction(0)) for r in self._data)

    def transpose(self) -> "QMatrix":
        return QMatrix(self.cols, self.rows, [list(c) for c in zip(*self._data)] if self.rows
                       else [[] for _ in range(self.cols)])

    @property
    def T(self) -> "QMatrix":
        return self.transpose()

    def __pow__(self, k: int) -> "QMatrix":
        if self.rows != self.cols or k < 0:
            raise ValueError("power needs a square matrix and k >= 0")
        out = QMatrix.identity(self.rows)
        for _ in range(k):
            out = out @ self
        return out

    def rank(self) -> int:
        return rref(self)[2]

    def inverse(self) -> "QMatrix":
        if self.rows != self.cols:
            raise ValueError("inverse of non-square matrix")
        n = self.rows
        red, piv, rk = rref(QMatrix.hstack([self, QMatrix.identity(n)]))
        if rk < n or piv[:n] != list(range(n)) or (n and piv[n - 1] >= n):
            raise ValueError("matrix is singular")
        return red.submatrix(range(n), range(n, 2 * n))


def _rref_rows(data: list, cols: int):
    m = [list(r) for r in data]
    pivots = []
    r = 0
    nrows = len(m)
    for c in range(cols):
        if r >= nrows:
            break
        p = next((i for i in range(r, nrows) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        pv = m[r][c]
        if pv != 1:
            m[r] = [x / pv for x in m[r]]
        for i in range(nrows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rref(m: QMatrix):
    """Reduced row-echelon form; returns ``(reduced, pivot_columns, rank)``."""
    data, pivots = _rref_rows(m._data, m.cols)
    return QMatrix(m.rows, m.cols, data), pivots, len(pivots)


def kernel_basis(m: QMatrix) -> list:
    """Null-space basis, one vector per free column in ascending order."""
    red, pivots, _ = rref(m)
    free = [j for j in range(m.cols) if j not in set(pivots)]
    basis = []
    for f in free:
        v = [Fraction(0)] * m.cols
        v[f] = Fraction(1)
        for i, p in enumerate(pivots):
            v[p] = -red[i, f]
        basis.append(tuple(v))
    return basis


def solve(m: QMatrix, b: Sequence) -> Optional[Vector]:
    """One solution of ``m x = b`` with free variables zero, or ``None``."""
    if len(b) != m.rows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {m.rows}")
    aug = QMatrix.hstack([m, QMatrix(m.rows, 1, [[x] for x in b])], rows=m.rows)
    red, pivots, _ = rref(aug)
    if pivots and pivots[-1] == m.cols:
        return None
    x = [Fraction(0)] * m.cols
    for i, p in enumerate(pivots):
        x[p] = red[i, m.cols]
    return tuple(x)


def solve_matrix(m: QMatrix, b: QMatrix) -> Optional[QMatrix]:
    """Solve ``m X = b`` column by column; ``None`` if any column is inconsistent."""
    if b.rows != m.rows:
        raise ValueError("row mismatch")
    aug = QMatrix.hstack([m, b], rows=m.rows)
    red, pivots, _ = rref(aug)
    if pivots and pivots[-1] >= m.cols:
        return None
    out = [[Fraction(0)] * b.cols for _ in range(m.cols)]
    for i, p in enumerate(pivots):
        for k in range(b.cols):
            out[p][k] = red[i, m.cols + k]
    return QMatrix(m.cols, b.cols, out)


def determinant(m: QMatrix) -> Fraction:
    if m.rows != m.cols:
        raise ValueError(f"determinant of non-square {m.rows}x{m.cols} matrix")
    a = [list(r) for r in m._data]
    n = m.rows
    det = Fraction(1)
    for c in range(n):
        p = next((i for i in range(c, n) if a[i][c] != 0), None)
        if p is None:
            return Fraction(0)
        if p != c:
            a[c], a[p] = a[p], a[c]
            det = -det
        pv = a[c][c]
        det *= pv
        for i in range(c + 1, n):
            if a[i][c] != 0:
                f = a[i][c] / pv
                a[i] = [x - f * y for x, y in zip(a[i], a[c])]
    return det


def column_space_basis(m: QMatrix) -> list:
    """Pivot columns of ``m`` (a basis of its image drawn from its own columns)."""
    _, pivots, _ = rref(m)
    return [m.column(j) for j in pivots]


def complement_basis(sub: Sequence[Sequence], ambient: Sequence[Sequence], dim: int) -> list:
    """Vectors of ``ambient`` that extend a basis of span(sub) to span(sub + ambient).

    ``sub`` is assumed linearly independent; selection is leftmost-first.
    """
    sub, ambient = list(sub), list(ambient)
    mat = QMatrix.from_columns(sub + ambient, dim)
    _, pivots, _ = rref(mat)
    return [ambient[j - len(sub)] for j in pivots if j >= len(sub)]
