"""Finite one-vertex simplicial sets and their normalized chains.

A simplex is a pair ``(word, id)`` standing for ``s_{i1} s_{i2} ... s_{im} x`` with
``i1 > i2 > ... > im`` and ``x`` nondegenerate.  Only face maps of nondegenerate
simplices are stored; faces of degenerate ones follow from the simplicial identities.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from .chains import ChainComplex, ChainError, ChainMap, Verdict, tensor_basis
from .exactq import QMatrix

BASEPOINT = "pt"

Simplex = Tuple[Tuple[int, ...], str]


class SimplicialError(ValueError):
    pass


def degenerate(i: int, s: Simplex) -> Simplex:
    """Apply ``s_i`` and return the normal form."""
    word, x = s
    if not word or i > word[0]:
        return ((i,) + word, x)
    rest, _ = degenerate(i, (word[1:], x))
    return ((word[0] + 1,) + rest, x)


class ReducedSimplicialSet:
    """Simplicial set with a single vertex ``pt`` and finitely many nondegenerate simplices."""

    def __init__(self, simplices: Dict[int, Sequence[Tuple[str, Sequence[Simplex]]]],
                 name: str = ""):
        self.name = name
        self.ids: Dict[int, List[str]] = {}
        self.faces: Dict[str, Tuple[Simplex, ...]] = {}
        self.dim_of: Dict[str, int] = {}
        for n in sorted(simplices):
            for sid, faces in simplices[n]:
                if sid in self.dim_of:
                    raise SimplicialError(f"duplicate simplex id {sid!r}")
                self.ids.setdefault(n, []).append(sid)
                self.dim_of[sid] = n
                self.faces[sid] = tuple((tuple(w), t) for w, t in faces)
        self._validate()

    # ------------------------------------------------------------------
    @property
    def dimension(self) -> int:
        return max(self.ids) if self.ids else -1

    def simplices_of_dim(self, n: int) -> List[str]:
        return list(self.ids.get(n, []))

    def all_ids(self) -> List[str]:
        return [s for n in sorted(self.ids) for s in self.ids[n]]

    def simplex_dim(self, s: Simplex) -> int:
        return self.dim_of[s[1]] + len(s[0])

    def index(self, sid: str) -> int:
        return self.ids[self.dim_of[sid]].index(sid)

    def face(self, j: int, s: Simplex) -> Simplex:
        word, x = s
        n = self.simplex_dim(s)
        if not 0 <= j <= n or n == 0:
            raise SimplicialError(f"face d_{j} undefined on a {n}-simplex")
        if not word:
            return self.faces[x][j]
        k, rest = word[0], (word[1:], x)
        if j < k:
            return degenerate(k - 1, self.face(j, rest))
        if j in (k, k + 1):
            return rest
        return degenerate(k, self.face(j - 1, rest))

    def front(self, s: Simplex, i: int) -> Simplex:
        """Front ``i``-face: the restriction to vertices ``0..i``."""
        n = self.simplex_dim(s)
        if not 0 <= i <= n:
            raise SimplicialError(f"front face index {i} out of range for dimension {n}")
        for k in range(n, i, -1):
            s = self.face(k, s)
        return s

    def back(self, s: Simplex, k: int) -> Simplex:
        """Back ``k``-face: the restriction to the last ``k + 1`` vertices."""
        n = self.simplex_dim(s)
        if not 0 <= k <= n:
            raise SimplicialError(f"back face index {k} out of range for dimension {n}")
        for _ in range(n - k):
            s = self.face(0, s)
        return s

    # ------------------------------------------------------------------
    def _validate(self):
        if self.ids.get(0) != [BASEPOINT]:
            raise SimplicialError(
                f"expected exactly one 0-simplex named {BASEPOINT!r}, got {self.ids.get(0)}")
        for n, sids in self.ids.items():
            for sid in sids:
                faces = self.faces[sid]
                if n == 0:
                    if faces:
                        raise SimplicialError("the basepoint has no faces")
                    continue
                if len(faces) != n + 1:
                    raise SimplicialError(f"{sid}: expected {n + 1} faces, got {len(faces)}")
                for i, (word, t) in enumerate(faces):
                    if t not in self.dim_of:
                        raise SimplicialError(f"{sid}: face {i} targets unknown simplex {t!r}")
                    self._check_word(word, self.dim_of[t], f"{sid}: face {i}")
                    if self.dim_of[t] + len(word) != n - 1:
                        raise SimplicialError(f"{sid}: face {i} has wrong dimension")
        v = self.verify_identities()
        if not v:
            raise SimplicialError(v.message)

    @staticmethod
    def _check_word(word, base_dim, where):
        if any(a <= b for a, b in zip(word, word[1:])):
            raise SimplicialError(f"{where}: degeneracy word {list(word)} not strictly decreasing")
        d = base_dim
        for i in reversed(word):
            if not 0 <= i <= d:
                raise SimplicialError(f"{where}: s_{i} not defined on a {d}-simplex")
            d += 1

    def verify_identities(self) -> Verdict:
        """Check ``d_i d_j = d_{j-1} d_i`` for ``i < j`` on every nondegenerate simplex."""
        for n, sids in self.ids.items():
            if n < 2:
                continue
            for sid in sids:
                s = ((), sid)
                for j in range(n + 1):
                    for i in range(j):
                        a = self.face(i, self.face(j, s))
                        b = self.face(j - 1, self.face(i, s))
                        if a != b:
                            return Verdict(False, f"simplicial identity d_{i} d_{j} = "
                                                  f"d_{j - 1} d_{i} fails on {sid}",
                                           degree=n, where=sid)
        return Verdict.passed()

    def __repr__(self):
        counts = {n: len(v) for n, v in sorted(self.ids.items())}
        return f"ReducedSimplicialSet({self.name or '?'}, {counts})"


# ---------------------------------------------------------------------------
# chains


def normalized_chains(x: ReducedSimplicialSet) -> ChainComplex:
    """Chains on the nondegenerate simplices; degenerate faces contribute zero."""
    top = x.dimension
    dims = {n: len(x.ids.get(n, [])) for n in range(top + 1)}
    diffs = {}
    for n in range(1, top + 1):
        rows = x.ids.get(n - 1, [])
        m = [[Fraction(0)] * dims[n] for _ in rows]
        for col, sid in enumerate(x.ids.get(n, [])):
            for i, (word, t) in enumerate(x.faces[sid]):
                if not word:
                    m[x.index(t)][col] += (-1) ** i
        diffs[n] = QMatrix(len(rows), dims[n], m)
    return ChainComplex(0, [dims[n] for n in range(top + 1)], diffs)


def front_back_faces(x: ReducedSimplicialSet, sid: str, i: int):
    """``(front_i, back_{n-i})`` of a nondegenerate simplex; ``None`` marks a degenerate face."""
    s = ((), sid)
    n = x.dim_of[sid]
    if not 0 <= i <= n:
        raise SimplicialError(f"index {i} out of range 0..{n}")
    f, b = x.front(s, i), x.back(s, n - i)
    return (None if f[0] else f[1]), (None if b[0] else b[1])


def comultiplication(x: ReducedSimplicialSet, chain: Dict[str, Fraction]) -> Dict[Tuple[str, str], Fraction]:
    """Alexander-Whitney diagonal, extended linearly; degenerate factors are dropped."""
    out: Dict[Tuple[str, str], Fraction] = {}
    for sid, c in chain.items():
        if not c:
            continue
        for i in range(x.dim_of[sid] + 1):
            f, b = front_back_faces(x, sid, i)
            if f is None or b is None:
                continue
            out[(f, b)] = out.get((f, b), Fraction(0)) + Fraction(c)
    return {k: v for k, v in out.items() if v}


def comultiplication_matrix(x: ReducedSimplicialSet, n: int) -> QMatrix:
    """Matrix of the diagonal ``C_n -> (C (x) C)_n`` in :func:`tensor_basis` order."""
    C = normalized_chains(x)
    basis = tensor_basis(C, C, n)
    index = {(p, i, j): k for k, (p, i, j) in enumerate(basis)}
    cols = []
    for sid in x.ids.get(n, []):
        col = [Fraction(0)] * len(basis)
        for (f, b), c in comultiplication(x, {sid: Fraction(1)}).items():
            p = x.dim_of[f]
            col[index[(p, x.index(f), x.index(b))]] += c
        cols.append(col)
    return QMatrix.from_columns(cols, len(basis)) if cols else QMatrix.zeros(len(basis), 0)


# ---------------------------------------------------------------------------
# pairs


class SubComplexInclusion:
    """A face-closed set of nondegenerate simplices of ``ambient``."""

    def __init__(self, ambient: ReducedSimplicialSet, members: Iterable[str]):
        self.ambient = ambient
        self.members: FrozenSet[str] = frozenset(members)
        unknown = self.members - set(ambient.dim_of)
        if unknown:
            raise SimplicialError(f"unknown simplices {sorted(unknown)}")
        for sid in self.members:
            for _, t in ambient.faces[sid]:
                if t not in self.members:
                    raise SimplicialError(f"subcomplex not closed under faces: {sid} has face {t}")

    def complement(self, n: int) -> List[str]:
        return [s for s in self.ambient.ids.get(n, []) if s not in self.members]

    def sub_simplicial_set(self) -> Optional[ReducedSimplicialSet]:
        if not self.members:
            return None
        data = {}
        for n, sids in self.ambient.ids.items():
            keep = [(s, self.ambient.faces[s]) for s in sids if s in self.members]
            if keep:
                data[n] = keep
        return ReducedSimplicialSet(data, name=f"sub({self.ambient.name})")


def relative_chains(pair: SubComplexInclusion):
    """``C(X, B)`` on simplices outside ``B`` and the quotient map ``C(X) -> C(X, B)``."""
    x = pair.ambient
    C = normalized_chains(x)
    keep = {n: [x.index(s) for s in pair.complement(n)] for n in C.degrees()}
    dims = {n: len(v) for n, v in keep.items()}
    diffs = {n: C.d(n).submatrix(keep.get(n - 1, []), keep[n]) for n in C.degrees()}
    rel = ChainComplex.build(dims, diffs) if any(dims.values()) else ChainComplex.zero()
    blocks = {}
    for n in C.degrees():
        if rel.dim(n):
            blocks[n] = QMatrix.identity(C.dim(n)).submatrix(keep[n], range(C.dim(n)))
    q = ChainMap(C, rel, blocks, check=True)
    return rel, q


# ---------------------------------------------------------------------------
# built-in models

def _pt_degenerate(n: int) -> Simplex:
    """The totally degenerate ``n``-simplex on the basepoint."""
    return (tuple(range(n - 1, -1, -1)), BASEPOINT)


def _pt():
    return {0: [(BASEPOINT, [])]}


def circle() -> ReducedSimplicialSet:
    d = _pt()
    d[1] = [("e", [((), BASEPOINT), ((), BASEPOINT)])]
    return ReducedSimplicialSet(d, name="S1")


def sphere(n: int) -> ReducedSimplicialSet:
    """``Delta^n / boundary``: one nondegenerate ``n``-simplex with all faces degenerate."""
    if n < 1:
        raise SimplicialError("sphere dimension must be >= 1")
    if n == 1:
        return circle()
    d = _pt()
    d[n] = [(f"s{n}", [_pt_degenerate(n - 1)] * (n + 1))]
    return ReducedSimplicialSet(d, name=f"S{n}")


def _surface(name, triangles) -> ReducedSimplicialSet:
    d = _pt()
    d[1] = [(e, [((), BASEPOINT), ((), BASEPOINT)]) for e in ("a", "b", "c")]
    d[2] = [(t, [((), f) for f in faces]) for t, faces in triangles]
    return ReducedSimplicialSet(d, name=name)


def torus() -> ReducedSimplicialSet:
    """Faces ``(d0, d1, d2)``: ``T1 = (b, c, a)``, ``T2 = (a, c, b)``; so ``c ~ ab ~ ba``."""
    return _surface("torus", [("T1", ("b", "c", "a")), ("T2", ("a", "c", "b"))])


def klein_bottle() -> ReducedSimplicialSet:
    """Faces ``(d0, d1, d2)``: ``U = (b, c, a)``, ``L = (a, b, c)``; so ``c ~ ab``, ``b ~ ca``."""
    return _surface("klein", [("U", ("b", "c", "a")), ("L", ("a", "b", "c"))])


MODELS = {
    "S1": (circle, (1, 1)),
    "S2": (lambda: sphere(2), (1, 0, 1)),
    "S3": (lambda: sphere(3), (1, 0, 0, 1)),
    "torus": (torus, (1, 2, 1)),
    "klein": (klein_bottle, (1, 1, 0)),
}


def model(name: str) -> ReducedSimplicialSet:
    try:
        return MODELS[name][0]()
    except KeyError:
        raise SimplicialError(f"unknown model {name!r}; choose from {sorted(MODELS)}") from None


def ordered_complex_chains(facets: Sequence[Sequence[int]]) -> ChainComplex:
    """Simplicial chains of an ordered (multi-vertex) simplicial complex given by facets.

    Independent of :class:`ReducedSimplicialSet`; used as a homology oracle, e.g.
    for the boundary of the 4-simplex as a model of S^3.
    """
    simplices = set()
    for f in facets:
        f = tuple(sorted(f))
        for k in range(1, len(f) + 1):
            simplices.update(itertools.combinations(f, k))
    by_dim: Dict[int, List[tuple]] = {}
    for s in sorted(simplices):
        by_dim.setdefault(len(s) - 1, []).append(s)
    index = {s: i for n in by_dim for i, s in enumerate(by_dim[n])}
    top = max(by_dim)
    diffs = {}
    for n in range(1, top + 1):
        m = [[0] * len(by_dim[n]) for _ in by_dim[n - 1]]
        for col, s in enumerate(by_dim[n]):
            for i in range(len(s)):
                m[index[s[:i] + s[i + 1:]]][col] += (-1) ** i
        diffs[n] = QMatrix(len(by_dim[n - 1]), len(by_dim[n]), m)
    return ChainComplex(0, [len(by_dim[n]) for n in range(top + 1)], diffs)


def boundary_of_simplex(n: int) -> ChainComplex:
    """Chains of the boundary of the ``n``-simplex (a sphere of dimension ``n - 1``)."""
    verts = range(n + 1)
    return ordered_complex_chains([tuple(v for v in verts if v != k) for k in verts])
