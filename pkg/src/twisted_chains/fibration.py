"""Monodromy representations, unipotency, and fibration complexes over finite bases.

Generators of the fundamental group are the nondegenerate edges; each nondegenerate
triangle ``t`` imposes ``rho(d1 t) = rho(d2 t) rho(d0 t)`` (degenerate edges act as the
identity).  This is the composition order under which ``phi(e) = rho(e) - id`` is a
twisting cochain for the cap-product signs in :mod:`twisted_chains.twisting`.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from .chains import Verdict, euler_characteristic
from .exactq import QMatrix, complement_basis, rref, solve, solve_matrix
from .simplicial import ReducedSimplicialSet, normalized_chains
from .twisting import (
    GradedEndAlgebra,
    TwistedTensor,
    TwistingCochain,
    TwistingError,
    twisted_tensor,
    verify_twisting,
)


class MonodromyRep:
    """Degree-preserving automorphisms of ``H`` attached to the edges of ``base``."""

    def __init__(self, base: ReducedSimplicialSet, fiber_dims: Sequence[int],
                 action: Optional[Dict[str, QMatrix]] = None):
        self.base = base
        self.algebra = GradedEndAlgebra(fiber_dims)
        self.fiber_dims = self.algebra.dims
        self.action: Dict[str, QMatrix] = {}
        for sid, m in (action or {}).items():
            if base.dim_of.get(sid) != 1:
                raise ValueError(f"{sid!r} is not an edge of {base.name}")
            if not self.algebra.is_homogeneous(m, 0):
                raise ValueError(f"action on {sid} does not preserve fiber degree")
            self.action[sid] = m

    @classmethod
    def from_generators(cls, base: ReducedSimplicialSet, fiber_dims: Sequence[int],
                        action: Dict[str, QMatrix]) -> "MonodromyRep":
        """Fill unspecified edges by solving triangle relations; leftovers act trivially."""
        known = dict(action)
        I = GradedEndAlgebra(fiber_dims).identity()
        changed = True
        while changed:
            changed = False
            for t in base.simplices_of_dim(2):
                f = [None if w else s for w, s in base.faces[t]]
                missing = [k for k in range(3) if f[k] is not None and f[k] not in known]
                if len(missing) != 1:
                    continue
                val = {k: (known[f[k]] if f[k] is not None else I) for k in range(3) if k not in missing}
                k = missing[0]
                if k == 1:
                    known[f[1]] = val[2] @ val[0]
                elif k == 2:
                    known[f[2]] = val[1] @ val[0].inverse()
                else:
                    known[f[0]] = val[2].inverse() @ val[1]
                changed = True
        return cls(base, fiber_dims, known)

    def __call__(self, sid: Optional[str]) -> QMatrix:
        if sid is None or sid not in self.action:
            return self.algebra.identity()
        return self.action[sid]

    def edges(self) -> List[str]:
        return self.base.simplices_of_dim(1)

    def generators(self) -> List[QMatrix]:
        return [self(e) for e in self.edges()]


def verify_rep(rho: MonodromyRep) -> Verdict:
    for e in rho.edges():
        if rho(e).rank() < rho.algebra.total:
            return Verdict(False, f"action on {e} is not invertible", where=e)
    for t in rho.base.simplices_of_dim(2):
        faces = [None if w else s for w, s in rho.base.faces[t]]
        lhs = rho(faces[1])
        rhs = rho(faces[2]) @ rho(faces[0])
        if lhs != rhs:
            return Verdict(False, f"relation rho(d1) = rho(d2) rho(d0) fails on {t}", where=t)
    return Verdict.passed()


# ---------------------------------------------------------------------------
# unipotency


def span_basis(vectors: Sequence[Sequence], dim: int) -> List[tuple]:
    """Row-reduced basis of the span of ``vectors``."""
    vectors = [v for v in vectors]
    if not vectors:
        return []
    red, _, rk = rref(QMatrix(len(vectors), dim, vectors))
    return [red.row(i) for i in range(rk)]


def _contained(vectors, basis, dim) -> bool:
    if not vectors:
        return True
    if not basis:
        return all(not any(v) for v in vectors)
    B = QMatrix.from_columns(basis, dim)
    return all(solve(B, list(v)) is not None for v in vectors)


def augmentation_filtration(mats: Sequence[QMatrix], dim: int):
    """Iterate ``W_{k+1} = sum_g (g - 1) W_k`` from ``W_0 = Q^dim``.

    Returns ``(filtration, stable)``: the list ``W_0, W_1, ...`` and, if the chain
    stalls at a nonzero subspace, that subspace (otherwise ``None``).
    """
    I = QMatrix.identity(dim)
    nil = [g - I for g in mats]
    W = span_basis([tuple(Fraction(int(i == j)) for i in range(dim)) for j in range(dim)], dim)
    chain = [W]
    while W:
        nxt = span_basis([a.apply(w) for a in nil for w in W], dim)
        if len(nxt) == len(W):
            return chain, W
        chain.append(nxt)
        W = nxt
    return chain, None


@dataclass
class UnipotentFiltration:
    """``V^0 ⊇ V^1 ⊇ ... ⊇ V^k = 0`` given by bases in ``H`` coordinates."""

    subspaces: List[List[tuple]]
    dim: int

    def lengths(self) -> tuple:
        return tuple(len(v) for v in self.subspaces)

    def verify(self, mats: Sequence[QMatrix]) -> bool:
        I = QMatrix.identity(self.dim)
        for i, V in enumerate(self.subspaces):
            nxt = self.subspaces[i + 1] if i + 1 < len(self.subspaces) else []
            for g in mats:
                if not _contained([g.apply(v) for v in V], V, self.dim):
                    return False
                if not _contained([(g - I).apply(v) for v in V], nxt, self.dim):
                    return False
        return not self.subspaces or not self.subspaces[-1]


@dataclass
class UnipotencyResult:
    unipotent: bool
    filtration: Optional[UnipotentFiltration] = None
    witness: Optional[List[tuple]] = None

    def __bool__(self):
        return self.unipotent


def _lift(vectors, indices, total):
    out = []
    for v in vectors:
        w = [Fraction(0)] * total
        for k, i in enumerate(indices):
            w[i] = v[k]
        out.append(tuple(w))
    return out


def is_unipotent(rho: MonodromyRep) -> UnipotencyResult:
    """Decide unipotency degree by degree via the augmentation-ideal filtration."""
    alg = rho.algebra
    total = alg.total
    per_degree, witness = [], []
    for q in range(len(alg.dims)):
        idx = alg.indices(q)
        mats = [alg.block(g, q, q) for g in rho.generators()]
        chain, stable = augmentation_filtration(mats, len(idx))
        per_degree.append([_lift(W, idx, total) for W in chain])
        if stable:
            witness.extend(_lift(stable, idx, total))
    if witness:
        return UnipotencyResult(False, None, witness)
    length = max((len(c) for c in per_degree), default=0)
    subspaces = [] if length else [[]]
    for k in range(length):
        V = [v for c in per_degree if k < len(c) for v in c[k]]
        subspaces.append(V)
    filt = UnipotentFiltration(subspaces, total)
    assert filt.verify(rho.generators()), "augmentation filtration failed its own check"
    return UnipotencyResult(True, filt, None)


def is_unipotent_matrices(mats: Sequence[QMatrix], dim: int) -> UnipotencyResult:
    """Ungraded variant for a plain family of automorphisms of ``Q^dim``."""
    chain, stable = augmentation_filtration(mats, dim)
    if stable:
        return UnipotencyResult(False, None, stable)
    return UnipotencyResult(True, UnipotentFiltration(chain, dim), None)


@dataclass
class SerreReport:
    sub_unipotent: bool
    quotient_unipotent: bool
    total_unipotent: bool

    @property
    def consistent(self) -> bool:
        return self.total_unipotent == (self.sub_unipotent and self.quotient_unipotent)


def restrict_and_quotient(mats: Sequence[QMatrix], sub: Sequence[Sequence], dim: int):
    """Matrices of each ``g`` on an invariant subspace and on the quotient."""
    sub = span_basis(sub, dim)
    std = [tuple(Fraction(int(i == j)) for i in range(dim)) for j in range(dim)]
    comp = complement_basis(sub, std, dim)
    basis = QMatrix.from_columns(list(sub) + comp, dim)
    k = len(sub)
    rs, qs = [], []
    for g in mats:
        if not _contained([g.apply(v) for v in sub], sub, dim):
            raise ValueError("subspace is not invariant under the action")
        coords = solve_matrix(basis, g @ basis)
        rs.append(coords.submatrix(range(k), range(k)))
        qs.append(coords.submatrix(range(k, dim), range(k, dim)))
    return rs, qs, k


def serre_closure_check(rho: MonodromyRep, sub: Sequence[Sequence]) -> SerreReport:
    dim = rho.algebra.total
    mats = rho.generators()
    rs, qs, k = restrict_and_quotient(mats, sub, dim)
    return SerreReport(bool(is_unipotent_matrices(rs, k)),
                       bool(is_unipotent_matrices(qs, dim - k)),
                       bool(is_unipotent(rho)))


# ---------------------------------------------------------------------------
# twisted models


def degree_one_cochain(rho: MonodromyRep):
    """``phi(e) = rho(e) - id`` on edges; returns the cochain and its twisting verdict."""
    I = rho.algebra.identity()
    comps = {e: rho(e) - I for e in rho.edges()}
    phi = TwistingCochain(rho.base, rho.fiber_dims, comps)
    return phi, verify_twisting(phi)


def fibration_complex(rho: MonodromyRep,
                      higher: Optional[Dict[str, QMatrix]] = None) -> TwistedTensor:
    """Twisted tensor product of the base with ``H`` for ``rho`` plus optional higher terms."""
    phi, _ = degree_one_cochain(rho)
    extra = {}
    for sid, m in (higher or {}).items():
        if rho.base.dim_of.get(sid, 0) < 2:
            raise TwistingError("higher components live on simplices of dimension >= 2", where=sid)
        extra[sid] = m
    merged = phi + TwistingCochain(rho.base, rho.fiber_dims, extra)
    T = twisted_tensor(merged)
    chi_h = sum((-1) ** q * d for q, d in enumerate(rho.fiber_dims))
    assert euler_characteristic(T.complex) == \
        euler_characteristic(normalized_chains(rho.base)) * chi_h, "Euler characteristic mismatch"
    return T
