"""Twisting cochains into End(H), cup and cap products, twisted tensor products.

Conventions (all machine-checked by ``verify_complex`` on every construction):

* the cap term of ``sigma (x) z`` with front face of dimension ``i`` carries the sign
  ``(-1)^(i+1)``::

      d(sigma (x) z) = d(sigma) (x) z + sum_i (-1)^(i+1) f_i(sigma) (x) phi(b_{n-i} sigma)(z)

* the cup product is ``(phi u psi)(sigma) = sum_i (-1)^i phi(f_i sigma) o psi(b_{n-i} sigma)``;
* the twisting identity is ``-phi(d sigma) + (phi u phi)(sigma) = 0``.

With these signs the square of the twisted differential vanishes exactly when the
twisting identity holds, and a degree-one cochain ``phi(e) = rho(e) - id`` satisfies
it exactly when ``rho(d1 t) = rho(d2 t) rho(d0 t)`` on every triangle ``t``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .chains import ChainComplex, ChainError, ChainMap, Verdict, verify_chain_map, verify_complex
from .exactq import QMatrix, complement_basis, solve_matrix
from .simplicial import ReducedSimplicialSet, SubComplexInclusion, front_back_faces


class TwistingError(ValueError):
    def __init__(self, message: str, where: Optional[str] = None):
        super().__init__(message)
        self.where = where


def cap_sign(front_dim: int) -> int:
    return -1 if front_dim % 2 == 0 else 1


class GradedEndAlgebra:
    """Graded endomorphisms of ``H = sum_q H_q``; an element is a square matrix on ``H``.

    ``End_k`` consists of matrices whose only nonzero blocks send ``H_q`` to ``H_{q+k}``.
    """

    def __init__(self, dims: Sequence[int]):
        self.dims = tuple(int(d) for d in dims)
        self.total = sum(self.dims)
        self.offsets = [sum(self.dims[:q]) for q in range(len(self.dims))]
        self._deg = [q for q, d in enumerate(self.dims) for _ in range(d)]

    def degree_of(self, index: int) -> int:
        return self._deg[index]

    def indices(self, q: int) -> List[int]:
        if not 0 <= q < len(self.dims):
            return []
        return list(range(self.offsets[q], self.offsets[q] + self.dims[q]))

    def identity(self) -> QMatrix:
        return QMatrix.identity(self.total)

    def zero(self) -> QMatrix:
        return QMatrix.zeros(self.total, self.total)

    def component(self, m: QMatrix, k: int) -> QMatrix:
        """The ``End_k`` part of ``m``."""
        return QMatrix(self.total, self.total,
                       [[m[i, j] if self._deg[i] - self._deg[j] == k else 0
                         for j in range(self.total)] for i in range(self.total)])

    def is_homogeneous(self, m: QMatrix, k: int) -> bool:
        return m.shape == (self.total, self.total) and self.component(m, k) == m

    def block(self, m: QMatrix, q_to: int, q_from: int) -> QMatrix:
        return m.submatrix(self.indices(q_to), self.indices(q_from))

    def from_blocks(self, blocks: Dict[Tuple[int, int], QMatrix]) -> QMatrix:
        out = [[Fraction(0)] * self.total for _ in range(self.total)]
        for (qt, qf), b in blocks.items():
            for a, i in enumerate(self.indices(qt)):
                for c, j in enumerate(self.indices(qf)):
                    out[i][j] = b[a, c]
        return QMatrix(self.total, self.total, out)

    def from_degree_zero_blocks(self, blocks: Sequence[QMatrix]) -> QMatrix:
        return self.from_blocks({(q, q): b for q, b in enumerate(blocks)})


@dataclass(frozen=True)
class GradedModule:
    """Graded vector space with zero differential (fiber homology)."""

    dims: Tuple[int, ...]

    def as_complex(self) -> ChainComplex:
        return ChainComplex(0, self.dims)

    @property
    def total(self) -> int:
        return sum(self.dims)


class TwistingCochain:
    """Components on nondegenerate simplices of dimension >= 1; zero elsewhere.

    ``components[sid]`` is an element of ``End_{n-1}(H)`` for an ``n``-simplex ``sid``.
    """

    def __init__(self, base: ReducedSimplicialSet, fiber_dims: Sequence[int],
                 components: Optional[Dict[str, QMatrix]] = None):
        self.base = base
        self.algebra = GradedEndAlgebra(fiber_dims)
        self.fiber_dims = self.algebra.dims
        comps = {}
        for sid, m in (components or {}).items():
            if sid not in base.dim_of:
                raise TwistingError(f"unknown simplex {sid!r}", where=sid)
            n = base.dim_of[sid]
            if n == 0:
                if not m.is_zero():
                    raise TwistingError("a twisting cochain vanishes on the basepoint", where=sid)
                continue
            if not self.algebra.is_homogeneous(m, n - 1):
                raise TwistingError(f"value on {sid} is not in End_{n - 1}", where=sid)
            if not m.is_zero():
                comps[sid] = m
        self.components = comps

    def __call__(self, sid: Optional[str]) -> QMatrix:
        if sid is None:
            return self.algebra.zero()
        m = self.components.get(sid)
        return m if m is not None else self.algebra.zero()

    def degree_one_part(self) -> "TwistingCochain":
        return TwistingCochain(self.base, self.fiber_dims,
                               {s: m for s, m in self.components.items()
                                if self.base.dim_of[s] == 1})

    def restrict(self, sub: ReducedSimplicialSet) -> "TwistingCochain":
        return TwistingCochain(sub, self.fiber_dims,
                               {s: m for s, m in self.components.items() if s in sub.dim_of})

    def __add__(self, other: "TwistingCochain") -> "TwistingCochain":
        keys = set(self.components) | set(other.components)
        return TwistingCochain(self.base, self.fiber_dims,
                               {k: self(k) + other(k) for k in keys})

    def __eq__(self, other):
        if not isinstance(other, TwistingCochain):
            return NotImplemented
        return (self.fiber_dims == other.fiber_dims
                and set(self.components) == set(other.components)
                and all(self(k) == other(k) for k in self.components))

    def __repr__(self):
        return f"TwistingCochain(base={self.base.name}, fiber={self.fiber_dims}, {self.components})"


def _boundary_value(phi: TwistingCochain, sid: str) -> QMatrix:
    """``phi(d sigma)``; degenerate faces contribute nothing."""
    out = phi.algebra.zero()
    for j, (word, t) in enumerate(phi.base.faces[sid]):
        if not word and t in phi.components:
            out = out + phi(t).scale((-1) ** j)
    return out


def cup(phi: TwistingCochain, psi: TwistingCochain) -> Dict[str, QMatrix]:
    """``(phi u psi)(sigma)`` on every nondegenerate simplex of dimension >= 2."""
    if phi.base is not psi.base or phi.fiber_dims != psi.fiber_dims:
        raise TwistingError("cup product needs a common base and target")
    x = phi.base
    out = {}
    for n in sorted(x.ids):
        if n < 2:
            continue
        for sid in x.ids[n]:
            acc = phi.algebra.zero()
            for i in range(1, n):
                f, b = front_back_faces(x, sid, i)
                if f in phi.components and b in psi.components:
                    acc = acc + (phi(f) @ psi(b)).scale((-1) ** i)
            out[sid] = acc
    return out


def verify_twisting(phi: TwistingCochain) -> Verdict:
    """Check ``-phi(d sigma) + (phi u phi)(sigma) = 0`` on every simplex of dimension >= 2."""
    cp = cup(phi, phi)
    for sid, c in cp.items():
        defect = c - _boundary_value(phi, sid)
        if not defect.is_zero():
            return Verdict(False, f"twisting identity fails on {sid}",
                           degree=phi.base.dim_of[sid], where=sid)
    return Verdict.passed()


def cap(phi: TwistingCochain, chain: Dict[str, Sequence]) -> Dict[str, tuple]:
    """Cap product on ``C'(X) (x) H``; ``chain`` maps a simplex id to a fiber vector."""
    x = phi.base
    out: Dict[str, list] = {}
    for sid, z in chain.items():
        if len(z) != phi.algebra.total:
            raise TwistingError("fiber vector has the wrong length", where=sid)
        n = x.dim_of[sid]
        for i in range(n):
            f, b = front_back_faces(x, sid, i)
            if f is None or b not in phi.components:
                continue
            w = phi(b).apply(z)
            acc = out.setdefault(f, [Fraction(0)] * phi.algebra.total)
            s = cap_sign(i)
            for k, v in enumerate(w):
                acc[k] += s * v
    return {k: tuple(v) for k, v in out.items() if any(v)}


# ---------------------------------------------------------------------------
# twisted tensor products


Label = Tuple[str, int]  # (simplex id, global fiber index)


@dataclass
class TwistedTensor:
    """A twisted complex together with the ``sigma (x) e_j`` label of each basis vector."""

    complex: ChainComplex
    labels: Dict[int, List[Label]]
    cochain: TwistingCochain
    excluded: frozenset = frozenset()

    @property
    def base(self) -> ReducedSimplicialSet:
        return self.cochain.base

    @property
    def fiber_dims(self):
        return self.cochain.fiber_dims

    def fiber_degree(self, label: Label) -> int:
        return self.cochain.algebra.degree_of(label[1])

    def index(self, n: int) -> Dict[Label, int]:
        return {lab: k for k, lab in enumerate(self.labels.get(n, []))}


def _labels(x: ReducedSimplicialSet, alg: GradedEndAlgebra, exclude=frozenset()) -> Dict[int, List[Label]]:
    """Basis of each total degree, ordered by simplex dimension, simplex, fiber index."""
    labels: Dict[int, List[Label]] = {}
    for k in range(x.dimension + len(alg.dims)):
        labs = [(sid, j) for p in sorted(x.ids) for sid in x.ids[p] if sid not in exclude
                for j in alg.indices(k - p)]
        if labs:
            labels[k] = labs
    return labels


def twisted_differentials(phi: TwistingCochain, labels: Dict[int, List[Label]]) -> Dict[int, QMatrix]:
    """Matrices of ``d (x) id + phi cap -`` on the given (face-closed) label set."""
    x = phi.base
    index = {n: {lab: k for k, lab in enumerate(v)} for n, v in labels.items()}
    diffs = {}
    for n, labs in labels.items():
        rows = len(labels.get(n - 1, []))
        m = [[Fraction(0)] * len(labs) for _ in range(rows)]
        tgt = index.get(n - 1, {})
        for col, (sid, j) in enumerate(labs):
            for i, (word, t) in enumerate(x.faces[sid]):
                if not word and (t, j) in tgt:
                    m[tgt[(t, j)]][col] += (-1) ** i
            dim = x.dim_of[sid]
            for i in range(dim):
                f, b = front_back_faces(x, sid, i)
                if f is None or b not in phi.components:
                    continue
                s = cap_sign(i)
                colvec = phi(b).column(j)
                for k, v in enumerate(colvec):
                    if v and (f, k) in tgt:
                        m[tgt[(f, k)]][col] += s * v
        diffs[n] = QMatrix(rows, len(labs), m)
    return diffs


def _complex_from_labels(labels, diffs) -> ChainComplex:
    if not labels:
        return ChainComplex.zero()
    lo, hi = min(labels), max(labels)
    dims = [len(labels.get(n, [])) for n in range(lo, hi + 1)]
    return ChainComplex(lo, dims, {n: m for n, m in diffs.items() if lo < n <= hi})


def twisted_tensor(phi: TwistingCochain, module: Optional[GradedModule] = None,
                   check: bool = True) -> TwistedTensor:
    """``C'(X) (x)_phi H``; refuses cochains that fail the twisting identity."""
    if module is not None and tuple(module.dims) != phi.fiber_dims:
        raise TwistingError(f"module dims {module.dims} do not match cochain target {phi.fiber_dims}")
    if check:
        v = verify_twisting(phi)
        if not v:
            raise TwistingError(f"refusing to build twisted tensor product: {v.message}",
                                where=v.where)
    labels = _labels(phi.base, phi.algebra)
    cx = _complex_from_labels(labels, twisted_differentials(phi, labels))
    if check:
        v = verify_complex(cx)
        if not v:
            raise AssertionError(f"twisted differential does not square to zero: {v.message}")
    return TwistedTensor(cx, labels, phi)


# ---------------------------------------------------------------------------
# filtrations and quotients


def cokernel_complex(i: ChainMap):
    """Cokernel of an injective chain map, on standard basis vectors of the target.

    Returns ``(quotient, projection, kept)`` where ``kept[n]`` lists the target
    coordinates that span the chosen complement of the image.
    """
    T = i.target
    kept, proj = {}, {}
    for n in T.degrees():
        dim = T.dim(n)
        image = [c for c in i[n].columns()]
        std = [tuple(Fraction(int(a == b)) for a in range(dim)) for b in range(dim)]
        comp = complement_basis(image, std, dim)
        if len(comp) + i[n].rank() != dim:
            raise ChainError("map is not injective", degree=n)
        kept[n] = [c.index(1) for c in comp]
        basis = QMatrix.from_columns(image + comp, dim) if dim else QMatrix.zeros(0, 0)
        if dim:
            coords = solve_matrix(basis, QMatrix.identity(dim))
            proj[n] = coords.submatrix(range(len(image), dim), range(dim))
    dims = {n: len(v) for n, v in kept.items()}
    diffs = {}
    for n in T.degrees():
        if dims.get(n) and dims.get(n - 1):
            section = QMatrix.identity(T.dim(n)).submatrix(range(T.dim(n)), kept[n])
            diffs[n] = proj[n - 1] @ T.d(n) @ section
    Q = ChainComplex.build(dims, diffs)
    p = ChainMap(T, Q, {n: proj[n] for n in T.degrees() if Q.dim(n)})
    return Q, p, kept


def homological_filtration(T: TwistedTensor, n: int):
    """``L_n``: the subcomplex spanned by ``sigma (x) z`` with fiber degree ``>= n``."""
    sub_labels = {k: [lab for lab in v if T.fiber_degree(lab) >= n] for k, v in T.labels.items()}
    sub_labels = {k: v for k, v in sub_labels.items() if v}
    diffs = {}
    for k, labs in sub_labels.items():
        src = [T.index(k)[lab] for lab in labs]
        tgt = [T.index(k - 1)[lab] for lab in sub_labels.get(k - 1, [])]
        diffs[k] = T.complex.d(k).submatrix(tgt, src)
    L = _complex_from_labels(sub_labels, diffs)
    blocks = {}
    for k, labs in sub_labels.items():
        idx = T.index(k)
        blocks[k] = QMatrix.from_columns(
            [[Fraction(int(r == idx[lab])) for r in range(T.complex.dim(k))] for lab in labs],
            T.complex.dim(k))
    inc = ChainMap(L, T.complex, blocks)
    v = verify_chain_map(inc)
    if not v:
        raise AssertionError(f"L_{n} is not a subcomplex: {v.message}")
    return TwistedTensor(L, sub_labels, T.cochain, T.excluded), inc


def local_coefficient_complex(phi: TwistingCochain, n: int, exclude=frozenset()) -> TwistedTensor:
    """``C'(X) (x)_pi1 H_n``, built only from the degree-one values of ``phi``.

    ``d(sigma (x) z) = d sigma (x) z + (-1)^dim(sigma) f_{dim-1}(sigma) (x) phi(b_1 sigma)(z)``.
    """
    x, alg = phi.base, phi.algebra
    fib = alg.indices(n)
    labels: Dict[int, List[Label]] = {}
    for p in sorted(x.ids):
        labs = [(sid, j) for sid in x.ids[p] if sid not in exclude for j in fib]
        if labs:
            labels[p + n] = labs
    index = {k: {lab: i for i, lab in enumerate(v)} for k, v in labels.items()}
    diffs = {}
    for k, labs in labels.items():
        tgt = index.get(k - 1, {})
        m = [[Fraction(0)] * len(labs) for _ in range(len(labels.get(k - 1, [])))]
        for col, (sid, j) in enumerate(labs):
            dim = x.dim_of[sid]
            for i, (word, t) in enumerate(x.faces[sid]):
                if not word and (t, j) in tgt:
                    m[tgt[(t, j)]][col] += (-1) ** i
            if dim == 0:
                continue
            f, b = front_back_faces(x, sid, dim - 1)
            if f is None or b is None or x.dim_of[b] != 1:
                continue
            mono = alg.block(phi(b), n, n)
            for r, jj in enumerate(fib):
                v = mono[r, fib.index(j)]
                if v and (f, jj) in tgt:
                    m[tgt[(f, jj)]][col] += (-1) ** dim * v
        diffs[k] = QMatrix(len(labels.get(k - 1, [])), len(labs), m)
    return TwistedTensor(_complex_from_labels(labels, diffs), labels, phi, frozenset(exclude))


@dataclass
class FiltrationQuotient:
    complex: ChainComplex  # coker(L_{n+1} -> L_n)
    direct: ChainComplex  # local-coefficient complex built from degree-one data
    iso_check: bool
    labels: Dict[int, List[Label]] = field(default_factory=dict)


def filtration_quotient(T: TwistedTensor, n: int) -> FiltrationQuotient:
    """``L_n / L_{n+1}`` computed as a cokernel and, independently, by the direct formula."""
    Ln, _ = homological_filtration(T, n)
    Ln1, _ = homological_filtration(T, n + 1)
    # inclusion L_{n+1} -> L_n expressed in L_n's coordinates
    blocks = {}
    for k, labs in Ln1.labels.items():
        idx = Ln.index(k)
        blocks[k] = QMatrix.from_columns(
            [[Fraction(int(r == idx[lab])) for r in range(Ln.complex.dim(k))] for lab in labs],
            Ln.complex.dim(k))
    Q, _, kept = cokernel_complex(ChainMap(Ln1.complex, Ln.complex, blocks, check=True))
    q_labels = {k: [Ln.labels[k][i] for i in kept[k]] for k in kept if kept[k]}
    direct = local_coefficient_complex(T.cochain, n, T.excluded)
    same_basis = q_labels == direct.labels
    iso = same_basis and Q == direct.complex
    assert verify_complex(direct.complex), "local-coefficient differential does not square to zero"
    return FiltrationQuotient(Q, direct.complex, iso, q_labels)


def relative_twisted(pair: SubComplexInclusion, phi: TwistingCochain) -> TwistedTensor:
    """``coker(C'(B) (x)_phi H -> C'(X) (x)_phi H)``, labelled by simplices outside ``B``."""
    if phi.base is not pair.ambient:
        raise TwistingError("cochain and pair live over different simplicial sets")
    T = twisted_tensor(phi)
    sub = pair.sub_simplicial_set()
    if sub is None:
        return T
    TB = twisted_tensor(phi.restrict(sub))
    blocks = {}
    for k, labs in TB.labels.items():
        idx = T.index(k)
        blocks[k] = QMatrix.from_columns(
            [[Fraction(int(r == idx[lab])) for r in range(T.complex.dim(k))] for lab in labs],
            T.complex.dim(k))
    inc = ChainMap(TB.complex, T.complex, blocks, check=True)
    Q, _, kept = cokernel_complex(inc)
    labels = {k: [T.labels[k][i] for i in kept[k]] for k in kept if kept[k]}
    assert verify_complex(Q)
    return TwistedTensor(Q, labels, phi, pair.members)
