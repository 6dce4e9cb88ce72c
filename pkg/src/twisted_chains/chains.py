"""Bounded chain complexes over Q and the maps between them.

Sign conventions used throughout the package:

* a homotopy ``h`` from ``f0`` to ``f1`` satisfies ``d h + h d = f1 - f0``;
* the Hom complex differential is ``D(f) = d f - (-1)^k f d`` for ``f`` of degree ``k``;
* tensor products carry the Koszul sign ``d(x (x) y) = dx (x) y + (-1)^|x| x (x) dy``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .exactq import (
    QMatrix,
    column_space_basis,
    complement_basis,
    kernel_basis,
    solve,
)


class ChainError(ValueError):
    """Raised when an input violates a chain-level precondition."""

    def __init__(self, message: str, degree: Optional[int] = None):
        super().__init__(message)
        self.degree = degree


@dataclass(frozen=True)
class Verdict:
    """Outcome of a verification: ``ok`` plus a human-readable reason."""

    ok: bool
    message: str = "ok"
    degree: Optional[int] = None
    where: Optional[str] = None

    def __bool__(self):
        return self.ok

    @classmethod
    def passed(cls) -> "Verdict":
        return cls(True)


class ChainComplex:
    """Finite chain complex: ``dims[k]`` is the dimension in degree ``min_degree + k``.

    ``differentials[n]`` maps degree ``n`` to degree ``n - 1``; missing entries are zero.
    """

    def __init__(self, min_degree: int = 0, dims: Sequence[int] = (),
                 differentials: Optional[Dict[int, QMatrix]] = None):
        self.min_degree = int(min_degree)
        self.dims = tuple(int(d) for d in dims)
        if any(d < 0 for d in self.dims):
            raise ChainError("negative dimension")
        diffs = {}
        for n, m in (differentials or {}).items():
            n = int(n)
            if m.shape != (self.dim(n - 1), self.dim(n)):
                raise ChainError(
                    f"differential in degree {n} has shape {m.shape}, "
                    f"expected {(self.dim(n - 1), self.dim(n))}", degree=n)
            if m.rows and m.cols and not m.is_zero():
                diffs[n] = m
        self.differentials = diffs

    @classmethod
    def build(cls, dims: Dict[int, int], differentials: Optional[Dict[int, QMatrix]] = None):
        """Construct from a sparse degree -> dim map, trimming zero ends."""
        support = [n for n, d in dims.items() if d]
        if not support:
            return cls(0, ())
        lo, hi = min(support), max(support)
        return cls(lo, [dims.get(n, 0) for n in range(lo, hi + 1)], differentials)

    @classmethod
    def zero(cls) -> "ChainComplex":
        return cls(0, ())

    @property
    def max_degree(self) -> int:
        return self.min_degree + len(self.dims) - 1

    def degrees(self) -> range:
        return range(self.min_degree, self.min_degree + len(self.dims))

    def dim(self, n: int) -> int:
        k = n - self.min_degree
        return self.dims[k] if 0 <= k < len(self.dims) else 0

    def d(self, n: int) -> QMatrix:
        m = self.differentials.get(n)
        return m if m is not None else QMatrix.zeros(self.dim(n - 1), self.dim(n))

    def total_dim(self) -> int:
        return sum(self.dims)

    def dim_dict(self) -> Dict[int, int]:
        return {n: self.dim(n) for n in self.degrees() if self.dim(n)}

    def shift(self, k: int) -> "ChainComplex":
        """Degree shift by ``k`` (``C[k]_n = C_{n-k}``) with differential ``(-1)^k d``."""
        s = -1 if k % 2 else 1
        return ChainComplex(self.min_degree + k, self.dims,
                            {n + k: m.scale(s) for n, m in self.differentials.items()})

    def __eq__(self, other):
        if not isinstance(other, ChainComplex):
            return NotImplemented
        return (self.dim_dict() == other.dim_dict()
                and all(self.d(n) == other.d(n) for n in set(self.degrees()) | set(other.degrees())))

    def __repr__(self):
        return f"ChainComplex(dims={self.dim_dict()})"


def verify_complex(c: ChainComplex) -> Verdict:
    for n in c.degrees():
        prod = c.d(n - 1) @ c.d(n)
        hit = prod.first_nonzero()
        if hit is not None:
            i, j, x = hit
            return Verdict(False, f"d_{n - 1} d_{n} != 0: entry ({i},{j}) = {x}", degree=n)
    return Verdict.passed()


# ---------------------------------------------------------------------------
# graded maps


class GradedMap:
    """Linear map raising degree by ``degree``; ``blocks[n]`` : source_n -> target_{n+degree}."""

    def __init__(self, source: ChainComplex, target: ChainComplex, degree: int = 0,
                 blocks: Optional[Dict[int, QMatrix]] = None):
        self.source = source
        self.target = target
        self.degree = int(degree)
        bl = {}
        for n, m in (blocks or {}).items():
            want = (target.dim(n + self.degree), source.dim(n))
            if m.shape != want:
                raise ChainError(f"block in degree {n} has shape {m.shape}, expected {want}",
                                 degree=n)
            if m.rows and m.cols and not m.is_zero():
                bl[n] = m
        self.blocks = bl

    def __getitem__(self, n: int) -> QMatrix:
        m = self.blocks.get(n)
        return m if m is not None else QMatrix.zeros(self.target.dim(n + self.degree),
                                                     self.source.dim(n))

    def _like(self, blocks) -> "GradedMap":
        return type(self)._make(self.source, self.target, self.degree, blocks)

    @classmethod
    def _make(cls, source, target, degree, blocks):
        if cls is ChainMap:
            return ChainMap(source, target, blocks)
        return GradedMap(source, target, degree, blocks)

    @classmethod
    def zero(cls, source, target, degree=0):
        return cls._make(source, target, degree, {})

    @classmethod
    def identity(cls, c: ChainComplex) -> "ChainMap":
        return ChainMap(c, c, {n: QMatrix.identity(c.dim(n)) for n in c.degrees()})

    def _check_parallel(self, other):
        if (self.degree != other.degree or self.source != other.source
                or self.target != other.target):
            raise ChainError("maps are not parallel")

    def __add__(self, other):
        self._check_parallel(other)
        return self._like({n: self[n] + other[n] for n in self.source.degrees()})

    def __sub__(self, other):
        self._check_parallel(other)
        return self._like({n: self[n] - other[n] for n in self.source.degrees()})

    def __neg__(self):
        return self._like({n: -m for n, m in self.blocks.items()})

    def scale(self, c):
        return self._like({n: m.scale(c) for n, m in self.blocks.items()})

    def __matmul__(self, other: "GradedMap") -> "GradedMap":
        """Composition ``self after other``."""
        if other.target.dim_dict() != self.source.dim_dict():
            raise ChainError("composition of non-composable maps")
        deg = self.degree + other.degree
        blocks = {n: self[n + other.degree] @ other[n] for n in other.source.degrees()}
        if deg == 0 and isinstance(self, ChainMap) and isinstance(other, ChainMap):
            return ChainMap(other.source, self.target, blocks)
        return GradedMap(other.source, self.target, deg, blocks)

    def is_zero(self) -> bool:
        return not self.blocks

    def __eq__(self, other):
        if not isinstance(other, GradedMap):
            return NotImplemented
        if self.degree != other.degree:
            return False
        degs = set(self.source.degrees()) | set(other.source.degrees())
        return all(self[n] == other[n] for n in degs)

    def __repr__(self):
        return f"{type(self).__name__}(degree={self.degree}, blocks={self.blocks})"

    def hom_differential(self) -> "GradedMap":
        """``D(f) = d f - (-1)^k f d``."""
        k = self.degree
        s = -1 if k % 2 else 1
        out = {}
        for n in self.source.degrees():
            # component source_n -> target_{n + k - 1}
            out[n] = self.target.d(n + k) @ self[n] - (self[n - 1] @ self.source.d(n)).scale(s)
        return GradedMap(self.source, self.target, k - 1, out)

    def is_chain_map(self) -> bool:
        return self.hom_differential().is_zero()

    def apply(self, n: int, v: Sequence) -> tuple:
        return self[n].apply(v)


class ChainMap(GradedMap):
    def __init__(self, source: ChainComplex, target: ChainComplex,
                 blocks: Optional[Dict[int, QMatrix]] = None, check: bool = False):
        super().__init__(source, target, 0, blocks)
        if check:
            bad = verify_chain_map(self)
            if not bad:
                raise ChainError(bad.message, degree=bad.degree)


def verify_chain_map(f: GradedMap) -> Verdict:
    D = f.hom_differential()
    for n in sorted(D.blocks):
        return Verdict(False, f"chain-map condition fails in degree {n}", degree=n)
    return Verdict.passed()


@dataclass
class ChainHomotopy:
    """``h`` of degree +1 with ``d h + h d = f1 - f0``."""

    f0: GradedMap
    f1: GradedMap
    h: GradedMap

    def __post_init__(self):
        if self.h.degree != self.f0.degree + 1:
            raise ChainError("homotopy must raise degree by one")

    def defect(self) -> GradedMap:
        return self.h.hom_differential() - (self.f1 - self.f0)

    def verify(self) -> Verdict:
        D = self.defect()
        if D.blocks:
            n = min(D.blocks)
            return Verdict(False, f"d h + h d != f1 - f0 in degree {n}", degree=n)
        return Verdict.passed()


# ---------------------------------------------------------------------------
# homology


@dataclass(frozen=True)
class HomologyGroup:
    betti: int
    representatives: tuple  # cycles, as coordinate vectors
    boundaries: tuple  # basis of the image of the incoming differential


def homology(c: ChainComplex) -> Dict[int, HomologyGroup]:
    """Betti numbers and deterministic cycle representatives in every degree."""
    out = {}
    for n in c.degrees():
        Z = kernel_basis(c.d(n))
        B = column_space_basis(c.d(n + 1))
        reps = complement_basis(B, Z, c.dim(n))
        out[n] = HomologyGroup(len(reps), tuple(reps), tuple(B))
    return out


def betti_numbers(c: ChainComplex) -> Dict[int, int]:
    return {n: g.betti for n, g in homology(c).items()}


def betti_list(c: ChainComplex, lo: int = 0, hi: Optional[int] = None) -> List[int]:
    b = betti_numbers(c)
    if hi is None:
        hi = max([n for n, v in b.items() if v] + [lo])
    return [b.get(n, 0) for n in range(lo, hi + 1)]


def is_acyclic(c: ChainComplex) -> bool:
    return all(v == 0 for v in betti_numbers(c).values())


def homology_class(group: HomologyGroup, dim: int, v: Sequence) -> tuple:
    """Coordinates of the cycle ``v`` in the representative basis of ``group``."""
    cols = list(group.boundaries) + list(group.representatives)
    if not cols:
        return ()
    x = solve(QMatrix.from_columns(cols, dim), list(v))
    if x is None:
        raise ChainError("vector is not a cycle of this complex")
    return tuple(x[len(group.boundaries):])


def induced_on_homology(f: GradedMap, hs=None, ht=None) -> Dict[int, QMatrix]:
    """Matrix of ``H(f)`` in the representative bases, degree by degree."""
    hs = hs if hs is not None else homology(f.source)
    ht = ht if ht is not None else homology(f.target)
    out = {}
    for n, g in hs.items():
        tgt = ht.get(n + f.degree)
        cols = []
        for z in g.representatives:
            img = f[n].apply(z)
            cols.append(homology_class(tgt, f.target.dim(n + f.degree), img)
                        if tgt is not None else ())
        rows = tgt.betti if tgt is not None else 0
        out[n] = QMatrix.from_columns(cols, rows) if cols else QMatrix.zeros(rows, 0)
    return out


def is_quasi_isomorphism(f: ChainMap) -> bool:
    return is_acyclic(mapping_cone(f))


def euler_characteristic(c: ChainComplex) -> int:
    return sum((-1) ** (n % 2) * c.dim(n) for n in c.degrees())


# ---------------------------------------------------------------------------
# constructions


def _span(*complexes: ChainComplex, extra=()) -> range:
    lows = [c.min_degree for c in complexes if c.dims] + [e for e in extra]
    highs = [c.max_degree for c in complexes if c.dims] + [e for e in extra]
    if not lows:
        return range(0)
    return range(min(lows), max(highs) + 1)


def direct_sum(a: ChainComplex, b: ChainComplex) -> ChainComplex:
    degs = _span(a, b)
    dims = {n: a.dim(n) + b.dim(n) for n in degs}
    diffs = {n: QMatrix.block_diag([a.d(n), b.d(n)]) for n in degs}
    return _build_exact(dims, diffs)


def direct_sum_maps(f: GradedMap, g: GradedMap) -> GradedMap:
    if f.degree != g.degree:
        raise ChainError("degree mismatch")
    src = direct_sum(f.source, g.source)
    tgt = direct_sum(f.target, g.target)
    blocks = {n: QMatrix.block_diag([f[n], g[n]]) for n in src.degrees()}
    if f.degree == 0:
        return ChainMap(src, tgt, blocks)
    return GradedMap(src, tgt, f.degree, blocks)


def _build_exact(dims: Dict[int, int], diffs: Dict[int, QMatrix]) -> ChainComplex:
    support = [n for n, d in dims.items() if d]
    if not support:
        return ChainComplex.zero()
    lo, hi = min(support), max(support)
    keep = {n: m for n, m in diffs.items() if lo <= n - 1 and n <= hi}
    return ChainComplex(lo, [dims.get(n, 0) for n in range(lo, hi + 1)], keep)


def tensor_basis(a: ChainComplex, b: ChainComplex, n: int) -> list:
    """Ordered basis ``(p, i, j)`` of ``(a (x) b)_n``: ``e_i`` in ``a_p`` tensor ``e_j`` in ``b_{n-p}``."""
    return [(p, i, j) for p in a.degrees() for i in range(a.dim(p)) for j in range(b.dim(n - p))]


def tensor_product(a: ChainComplex, b: ChainComplex) -> ChainComplex:
    if not a.dims or not b.dims:
        return ChainComplex.zero()
    degs = range(a.min_degree + b.min_degree, a.max_degree + b.max_degree + 1)
    bases = {n: tensor_basis(a, b, n) for n in degs}
    index = {n: {key: k for k, key in enumerate(bases[n])} for n in degs}
    diffs = {}
    for n in degs:
        rows, cols = len(bases.get(n - 1, [])), len(bases[n])
        m = [[Fraction(0)] * cols for _ in range(rows)]
        for col, (p, i, j) in enumerate(bases[n]):
            q = n - p
            da = a.d(p)
            for r in range(da.rows):
                x = da[r, i]
                if x:
                    m[index[n - 1][(p - 1, r, j)]][col] += x
            db = b.d(q)
            s = -1 if p % 2 else 1
            for r in range(db.rows):
                x = db[r, j]
                if x:
                    m[index[n - 1][(p, i, r)]][col] += s * x
        diffs[n] = QMatrix(rows, cols, m)
    return _build_exact({n: len(bases[n]) for n in degs}, diffs)


def tensor_maps(f: GradedMap, g: GradedMap) -> GradedMap:
    """``(f (x) g)(x (x) y) = (-1)^{|g||x|} f(x) (x) g(y)`` between tensor products."""
    src = tensor_product(f.source, g.source)
    tgt = tensor_product(f.target, g.target)
    deg = f.degree + g.degree
    blocks = {}
    for n in src.degrees():
        sb = tensor_basis(f.source, g.source, n)
        tb = tensor_basis(f.target, g.target, n + deg)
        tindex = {key: k for k, key in enumerate(tb)}
        m = [[Fraction(0)] * len(sb) for _ in range(len(tb))]
        for col, (p, i, j) in enumerate(sb):
            s = -1 if (g.degree * p) % 2 else 1
            fp = f[p]
            gq = g[n - p]
            for r in range(fp.rows):
                x = fp[r, i]
                if not x:
                    continue
                for t in range(gq.rows):
                    y = gq[t, j]
                    if y:
                        m[tindex[(p + f.degree, r, t)]][col] += s * x * y
        blocks[n] = QMatrix(len(tb), len(sb), m)
    if deg == 0:
        return ChainMap(src, tgt, blocks)
    return GradedMap(src, tgt, deg, blocks)


@dataclass
class Cylinder:
    complex: ChainComplex
    j0: ChainMap
    j1: ChainMap
    proj: ChainMap
    source: ChainComplex
    target: ChainComplex

    def offsets(self, n: int) -> tuple:
        """Start indices of the ``A_n``, ``A_{n-1}``, ``B_n`` summands in ``Cyl_n``."""
        a, a1 = self.source.dim(n), self.source.dim(n - 1)
        return (0, a, a + a1)


def mapping_cylinder(f: ChainMap) -> Cylinder:
    """``Cyl_n = A_n + A_{n-1} + B_n``, ``d(a, a', b) = (da + a', -da', db - f a')``."""
    A, B = f.source, f.target
    degs = _span(A, B, extra=[n + 1 for n in A.degrees()])
    dims = {n: A.dim(n) + A.dim(n - 1) + B.dim(n) for n in degs}
    diffs = {}
    for n in degs:
        Z = QMatrix.zeros
        row_a = [A.d(n), QMatrix.identity(A.dim(n - 1)), Z(A.dim(n - 1), B.dim(n))]
        row_a1 = [Z(A.dim(n - 2), A.dim(n)), -A.d(n - 1), Z(A.dim(n - 2), B.dim(n))]
        row_b = [Z(B.dim(n - 1), A.dim(n)), -f[n - 1], B.d(n)]
        diffs[n] = QMatrix.block([row_a, row_a1, row_b])
    cyl = _build_exact(dims, diffs)
    j0, j1, proj = {}, {}, {}
    for n in degs:
        Z = QMatrix.zeros
        j0[n] = QMatrix.vstack([QMatrix.identity(A.dim(n)), Z(A.dim(n - 1), A.dim(n)),
                                Z(B.dim(n), A.dim(n))], cols=A.dim(n))
        j1[n] = QMatrix.vstack([Z(A.dim(n), B.dim(n)), Z(A.dim(n - 1), B.dim(n)),
                                QMatrix.identity(B.dim(n))], cols=B.dim(n))
        proj[n] = QMatrix.hstack([f[n], Z(B.dim(n), A.dim(n - 1)), QMatrix.identity(B.dim(n))],
                                 rows=B.dim(n))
    j0 = ChainMap(A, cyl, {n: m for n, m in j0.items() if A.dim(n)})
    j1 = ChainMap(B, cyl, {n: m for n, m in j1.items() if B.dim(n)})
    proj = ChainMap(cyl, B, {n: m for n, m in proj.items() if cyl.dim(n)})
    for name, g in (("j0", j0), ("j1", j1), ("proj", proj)):
        v = verify_chain_map(g)
        if not v:
            raise AssertionError(f"cylinder {name} is not a chain map: {v.message}")
    assert verify_complex(cyl), "cylinder differential does not square to zero"
    return Cylinder(cyl, j0, j1, proj, A, B)


def mapping_cone(f: ChainMap) -> ChainComplex:
    """``Cone_n = A_{n-1} + B_n``, ``d(a', b) = (-da', db - f a')``."""
    A, B = f.source, f.target
    degs = _span(A, B, extra=[n + 1 for n in A.degrees()])
    dims = {n: A.dim(n - 1) + B.dim(n) for n in degs}
    diffs = {}
    for n in degs:
        diffs[n] = QMatrix.block([
            [-A.d(n - 1), QMatrix.zeros(A.dim(n - 2), B.dim(n))],
            [-f[n - 1], B.d(n)],
        ])
    cone = _build_exact(dims, diffs)
    assert verify_complex(cone), "cone differential does not square to zero"
    return cone


@dataclass
class Factorization:
    map: ChainMap  # Cyl(f) -> B'
    cylinder: Cylinder
    homotopy: ChainHomotopy  # from g' o proj to the factored map


def cylinder_factorization(f: ChainMap, g: ChainMap, g_prime: ChainMap, f_prime: ChainMap,
                           h: GradedMap) -> Factorization:
    """Extend ``f' g`` over ``Cyl(f)`` using a homotopy ``d h + h d = f' g - g' f``.

    The result sends ``(a, a', b)`` to ``f'g(a) + h(a') + g'(b)``.
    """
    fg = f_prime @ g
    gf = g_prime @ f
    square = ChainHomotopy(gf, fg, h).verify()
    if not square:
        raise ChainError(f"homotopy does not fill the square: {square.message}",
                         degree=square.degree)
    cyl = mapping_cylinder(f)
    A, B = f.source, f.target
    blocks = {}
    for n in cyl.complex.degrees():
        blocks[n] = QMatrix.hstack([fg[n], h[n - 1], g_prime[n]], rows=f_prime.target.dim(n))
    gt = ChainMap(cyl.complex, f_prime.target, blocks)
    v = verify_chain_map(gt)
    if not v:
        raise AssertionError(f"factored map is not a chain map: {v.message}")
    # K(a, a', b) = h(a) is a homotopy from g' proj to the factored map
    kb = {}
    for n in cyl.complex.degrees():
        Z = QMatrix.zeros
        t = f_prime.target.dim(n + 1)
        kb[n] = QMatrix.hstack([h[n], Z(t, A.dim(n - 1)), Z(t, B.dim(n))], rows=t)
    K = GradedMap(cyl.complex, f_prime.target, 1, kb)
    hom = ChainHomotopy(g_prime @ cyl.proj, gt, K)
    assert hom.verify(), "factorization homotopy check failed"
    return Factorization(gt, cyl, hom)


# ---------------------------------------------------------------------------
# Hom complex and homotopy solving


class HomComplex:
    """``Hom(A, B)`` with ``Hom_k = prod_n Hom(A_n, B_{n+k})``, vectorised row-major per block."""

    def __init__(self, A: ChainComplex, B: ChainComplex):
        self.A, self.B = A, B
        ks = set()
        for n in A.degrees():
            for m in B.degrees():
                if A.dim(n) and B.dim(m):
                    ks.add(m - n)
        self.ks = sorted(ks)
        dims = {k: self.dim(k) for k in self.ks}
        diffs = {k: self.differential_matrix(k) for k in self.ks}
        self.complex = _build_exact(dims, diffs)

    def layout(self, k: int) -> list:
        """``(n, offset, rows, cols)`` for each block of ``Hom_k``."""
        out, off = [], 0
        for n in self.A.degrees():
            r, c = self.B.dim(n + k), self.A.dim(n)
            if r and c:
                out.append((n, off, r, c))
                off += r * c
        return out

    def dim(self, k: int) -> int:
        return sum(r * c for _, _, r, c in self.layout(k))

    def vec(self, f: GradedMap) -> tuple:
        v = []
        for n, _, r, c in self.layout(f.degree):
            m = f[n]
            v.extend(m[i, j] for i in range(r) for j in range(c))
        return tuple(v)

    def unvec(self, k: int, v: Sequence) -> GradedMap:
        blocks = {}
        for n, off, r, c in self.layout(k):
            blocks[n] = QMatrix(r, c, [[v[off + i * c + j] for j in range(c)] for i in range(r)])
        if k == 0:
            return ChainMap(self.A, self.B, blocks)
        return GradedMap(self.A, self.B, k, blocks)

    def differential_matrix(self, k: int) -> QMatrix:
        """Matrix of ``D : Hom_k -> Hom_{k-1}`` in the vectorised coordinates."""
        # D(f)_n = d_B f_n - (-1)^k f_{n-1} d_A, written out on row-major vectorisations
        rows, ncols = self.dim(k - 1), self.dim(k)
        m = [[Fraction(0)] * ncols for _ in range(rows)]
        target = {n: (off, r, c) for n, off, r, c in self.layout(k - 1)}
        sign = -1 if k % 2 == 0 else 1
        for n, off, r, c in self.layout(k):
            # f_n contributes d_B f_n to the block at source degree n
            if n in target:
                toff, tr, tc = target[n]
                dB = self.B.d(n + k)
                for i in range(tr):
                    for l in range(r):
                        x = dB[i, l]
                        if x:
                            for j in range(c):
                                m[toff + i * tc + j][off + l * c + j] += x
            # and -(-1)^k f_n d_A to the block at source degree n + 1
            if n + 1 in target:
                toff, tr, tc = target[n + 1]
                dA = self.A.d(n + 1)
                for l in range(c):
                    for j in range(tc):
                        y = dA[l, j]
                        if y:
                            for i in range(r):
                                m[toff + i * tc + j][off + i * c + l] += sign * y
        return QMatrix(rows, ncols, m)


def find_homotopy(f0: GradedMap, f1: GradedMap) -> Optional[ChainHomotopy]:
    """Solve ``d h + h d = f1 - f0``; ``None`` if no homotopy exists."""
    if f0.degree != f1.degree or f0.source != f1.source or f0.target != f1.target:
        raise ChainError("endpoint mismatch")
    H = HomComplex(f0.source, f0.target)
    k = f0.degree + 1
    diff = H.vec(f1 - f0)
    if not diff:
        return ChainHomotopy(f0, f1, GradedMap(f0.source, f0.target, k))
    D = H.differential_matrix(k)
    x = solve(D, diff)
    if x is None:
        return None
    return ChainHomotopy(f0, f1, H.unvec(k, x) if H.dim(k) else GradedMap(f0.source, f0.target, k))


@dataclass
class Obstruction:
    class_vector: tuple
    is_zero: bool
    witness: Optional[GradedMap] = None  # Phi with d Phi - Phi d = h1 - h0


def secondary_obstruction(f0: GradedMap, f1: GradedMap, h0: GradedMap,
                          h1: GradedMap) -> Obstruction:
    """Class of ``h1 - h0`` in ``H_1(Hom(A, B))``, with a second-order homotopy when it vanishes."""
    for name, h in (("h0", h0), ("h1", h1)):
        v = ChainHomotopy(f0, f1, h).verify()
        if not v:
            raise ChainError(f"{name} is not a homotopy from f0 to f1: {v.message}",
                             degree=v.degree)
    H = HomComplex(f0.source, f0.target)
    z = H.vec(h1 - h0)
    hc = H.complex
    grp = homology(hc).get(1)
    if grp is None or not z:
        return Obstruction((), True, GradedMap(f0.source, f0.target, 2))
    cls = homology_class(grp, hc.dim(1), z)
    if any(cls):
        return Obstruction(cls, False, None)
    D2 = H.differential_matrix(2)
    x = solve(D2, z) if D2.cols else None
    if x is None:
        # z is a boundary, so a zero-column D2 means z itself is zero
        return Obstruction(cls, True, GradedMap(f0.source, f0.target, 2))
    phi = H.unvec(2, x)
    assert phi.hom_differential() == (h1 - h0), "second-order homotopy check failed"
    return Obstruction(cls, True, phi)
