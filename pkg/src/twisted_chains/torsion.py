"""Reidemeister torsion of based acyclic complexes, up to sign.

Convention: ``|tau| = prod_n |det[d b_{n+1}, b_n / c_n]|^((-1)^n)`` so that the
two-term complex ``Q --5--> Q`` has torsion 5.  ``b_n`` is chosen as the leftmost
set of basis vectors of ``C_n`` whose boundaries span ``d(C_n)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Optional, Sequence

from .chains import ChainComplex, ChainError, ChainMap, GradedMap, _build_exact, is_acyclic, mapping_cone
from .exactq import QMatrix, determinant, rref


class TorsionError(ChainError):
    pass


@dataclass
class BasedComplex:
    """A complex with a chosen basis of each ``C_n``, stored as the columns of ``basis[n]``.

    Missing degrees use the standard basis.
    """

    complex: ChainComplex
    basis: Dict[int, QMatrix] = field(default_factory=dict)

    def __post_init__(self):
        for n, b in self.basis.items():
            d = self.complex.dim(n)
            if b.shape != (d, d) or b.rank() < d:
                raise TorsionError(f"basis in degree {n} is not a basis of C_{n}", degree=n)

    def basis_at(self, n: int) -> QMatrix:
        return self.basis.get(n, QMatrix.identity(self.complex.dim(n)))

    def based_differential(self, n: int) -> QMatrix:
        """Matrix of ``d_n`` in the chosen bases."""
        return self.basis_at(n - 1).inverse() @ self.complex.d(n) @ self.basis_at(n)

    def change_basis(self, n: int, P) -> "BasedComplex":
        """Re-base ``C_n`` so that coordinates transform by ``P`` (new basis = old basis P^-1).

        The torsion is multiplied by ``|det P|^((-1)^n)``.
        """
        if not isinstance(P, QMatrix):
            P = QMatrix.from_rows(P)
        new = dict(self.basis)
        new[n] = self.basis_at(n) @ P.inverse()
        return BasedComplex(self.complex, new)


def _leftmost_lift(D: QMatrix) -> list:
    """Indices of the leftmost columns of ``D`` spanning its column space."""
    _, pivots, _ = rref(D)
    return list(pivots)


def torsion(c, choices: Optional[Dict[int, Sequence[int]]] = None) -> Fraction:
    """Absolute torsion of an acyclic based complex.

    ``choices[n]`` optionally overrides the lift ``b_n`` by a list of basis indices;
    the answer must not depend on it.
    """
    if isinstance(c, ChainComplex):
        c = BasedComplex(c)
    cx = c.complex
    if not is_acyclic(cx):
        raise TorsionError("torsion is only defined for acyclic complexes")
    choices = choices or {}
    degs = cx.degrees()
    lifts = {}
    for n in degs:
        D = c.based_differential(n)
        if n in choices:
            idx = list(choices[n])
            if D.submatrix(range(D.rows), idx).rank() != D.rank() or len(idx) != D.rank():
                raise TorsionError(f"choice in degree {n} does not lift a basis of the boundaries",
                                   degree=n)
            lifts[n] = idx
        else:
            lifts[n] = _leftmost_lift(D)
    tau = Fraction(1)
    for n in degs:
        dim = cx.dim(n)
        if dim == 0:
            continue
        D_up = c.based_differential(n + 1)
        cols = [D_up.column(j) for j in lifts.get(n + 1, [])]
        cols += [tuple(Fraction(int(i == j)) for i in range(dim)) for j in lifts.get(n, [])]
        det = abs(determinant(QMatrix.from_columns(cols, dim)))
        if det == 0:
            raise TorsionError(f"degenerate basis in degree {n}", degree=n)
        tau *= det if n % 2 == 0 else 1 / det
    return tau


def _as_based(x, cx: ChainComplex) -> BasedComplex:
    return x if isinstance(x, BasedComplex) else BasedComplex(cx)


def cone_basis(f: ChainMap, src: Optional[BasedComplex] = None,
               tgt: Optional[BasedComplex] = None) -> BasedComplex:
    """Mapping cone based by the shifted source basis followed by the target basis."""
    src = _as_based(src, f.source)
    tgt = _as_based(tgt, f.target)
    cone = mapping_cone(f)
    basis = {n: QMatrix.block_diag([src.basis_at(n - 1), tgt.basis_at(n)]) for n in cone.degrees()}
    return BasedComplex(cone, basis)


def torsion_of_quasi_iso(f: ChainMap, src: Optional[BasedComplex] = None,
                         tgt: Optional[BasedComplex] = None) -> Fraction:
    cb = cone_basis(f, src, tgt)
    if not is_acyclic(cb.complex):
        raise TorsionError("map is not a quasi-isomorphism")
    return torsion(cb)


@dataclass
class CompositionReport:
    tau_f: Fraction
    tau_g: Fraction
    tau_gf: Fraction

    @property
    def ok(self) -> bool:
        return self.tau_gf == self.tau_f * self.tau_g


def composition_check(f: ChainMap, g: ChainMap, a: Optional[BasedComplex] = None,
                      b: Optional[BasedComplex] = None,
                      c: Optional[BasedComplex] = None) -> CompositionReport:
    return CompositionReport(torsion_of_quasi_iso(f, a, b), torsion_of_quasi_iso(g, b, c),
                             torsion_of_quasi_iso(g @ f, a, c))


def extension(a: BasedComplex, b: BasedComplex, x: GradedMap) -> BasedComplex:
    """``A + B`` with ``d = [[d_A, x], [0, d_B]]`` and the concatenated basis.

    ``x`` is a degree -1 map ``B -> A``; the result contains ``A`` as a based
    subcomplex with based quotient ``B``.
    """
    A, B = a.complex, b.complex
    if x.degree != -1:
        raise TorsionError("coupling must have degree -1")
    degs = sorted(set(A.degrees()) | set(B.degrees()) | {n + 1 for n in A.degrees()})
    dims = {n: A.dim(n) + B.dim(n) for n in degs}
    diffs = {n: QMatrix.block([[A.d(n), x[n]], [QMatrix.zeros(B.dim(n - 1), A.dim(n)), B.d(n)]])
             for n in degs}
    total = _build_exact(dims, diffs)
    for n in total.degrees():
        if not (total.d(n - 1) @ total.d(n)).is_zero():
            raise TorsionError("coupling does not give a differential", degree=n)
    basis = {n: QMatrix.block_diag([a.basis_at(n), b.basis_at(n)]) for n in total.degrees()}
    return BasedComplex(total, basis)


def additivity_check(a: BasedComplex, b: BasedComplex, x: GradedMap):
    """``(tau(total), tau(A) * tau(B))`` for the extension of ``B`` by ``A``."""
    return torsion(extension(a, b, x)), torsion(a) * torsion(b)
