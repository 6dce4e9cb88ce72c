"""Strong deformation retractions and the Basic Perturbation Lemma.

An SDR ``(j, r, h)`` between a big complex ``N`` and a small complex ``M`` satisfies
``r j = id``, ``d h + h d = id - j r`` and the side conditions ``h j = 0``, ``r h = 0``,
``h h = 0``.  Perturbing the big differential by ``t`` with ``h t`` nilpotent yields

    d_inf = d_M + r t S j,   j_inf = S j,   r_inf = r S',   h_inf = h S'

where ``S = sum_k (h t)^k`` and ``S' = sum_k (t h)^k``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Optional

from .chains import (
    ChainComplex,
    ChainError,
    ChainHomotopy,
    ChainMap,
    GradedMap,
    Verdict,
    homology,
    tensor_basis,
    tensor_maps,
    tensor_product,
    verify_chain_map,
    verify_complex,
)
from .exactq import QMatrix, complement_basis, kernel_basis, solve_matrix
from .simplicial import ReducedSimplicialSet, front_back_faces, normalized_chains
from .twisting import TwistedTensor, TwistingCochain, TwistingError, cap_sign, twisted_tensor, verify_twisting


class PerturbationError(ValueError):
    pass


def _on(f: GradedMap, source: ChainComplex, target: ChainComplex) -> GradedMap:
    """Re-home the matrices of ``f`` on complexes with the same dimensions."""
    if f.degree == 0:
        return ChainMap(source, target, dict(f.blocks))
    return GradedMap(source, target, f.degree, dict(f.blocks))


def _add(*maps: GradedMap) -> GradedMap:
    first = maps[0]
    blocks: Dict[int, QMatrix] = {}
    for m in maps:
        for n, b in m.blocks.items():
            blocks[n] = blocks[n] + b if n in blocks else b
    return _on(GradedMap(first.source, first.target, first.degree, blocks),
               first.source, first.target)


def _compose(*maps: GradedMap) -> GradedMap:
    """``maps[0] o maps[1] o ...`` ignoring differentials (only dimensions must agree)."""
    out = maps[-1]
    for f in reversed(maps[:-1]):
        blocks = {n: f[n + out.degree] @ out[n] for n in out.source.degrees()}
        out = GradedMap(out.source, f.target, out.degree + f.degree, blocks)
    return out


def _identity(c: ChainComplex) -> GradedMap:
    return GradedMap(c, c, 0, {n: QMatrix.identity(c.dim(n)) for n in c.degrees()})


def _differential(c: ChainComplex) -> GradedMap:
    return GradedMap(c, c, -1, {n: c.d(n) for n in c.degrees()})


@dataclass
class SDRData:
    big: ChainComplex
    small: ChainComplex
    j: GradedMap  # small -> big
    r: GradedMap  # big -> small
    h: GradedMap  # big -> big, degree +1


def verify_sdr(s: SDRData) -> Verdict:
    N, M = s.big, s.small
    checks = [
        ("j chain map", lambda: verify_chain_map(s.j).ok),
        ("r chain map", lambda: verify_chain_map(s.r).ok),
        ("rj", lambda: _compose(s.r, s.j) == _identity(M)),
        ("dh+hd", lambda: _add(_compose(_differential(N), s.h), _compose(s.h, _differential(N)))
         == _add(_identity(N), _compose(s.j, s.r).scale(-1))),
        ("hj", lambda: _compose(s.h, s.j).is_zero()),
        ("rh", lambda: _compose(s.r, s.h).is_zero()),
        ("hh", lambda: _compose(s.h, s.h).is_zero()),
    ]
    for name, check in checks:
        if not check():
            return Verdict(False, f"SDR identity {name} fails", where=name)
    return Verdict.passed()


def normalize_side_conditions(big: ChainComplex, small: ChainComplex, j: GradedMap,
                              r: GradedMap, h: GradedMap) -> SDRData:
    """Replace ``h`` by ``h' = P h P`` (``P = id - j r``), then by ``h' d h'``."""
    d = _differential(big)
    P = _add(_identity(big), _compose(j, r).scale(-1))
    if not _compose(r, j) == _identity(small):
        raise PerturbationError("r j != id")
    if not _add(_compose(d, h), _compose(h, d)) == P:
        raise PerturbationError("d h + h d != id - j r")
    h1 = _compose(P, h, P)
    h2 = _compose(h1, d, h1)
    out = SDRData(big, small, _on(j, small, big), _on(r, big, small), h2)
    v = verify_sdr(out)
    if not v:
        raise AssertionError(f"normalization failed: {v.message}")
    return out


def homology_sdr(c: ChainComplex) -> SDRData:
    """SDR onto homology with zero differential.

    ``C_n`` is split as ``d(L_{n+1}) + H_n + L_n`` with ``L_n`` a leftmost complement of
    the cycles; ``h`` inverts ``d`` on boundaries, ``r`` reads the ``H_n`` coordinates.
    """
    hom = homology(c)
    L = {}
    for n in c.degrees():
        dim = c.dim(n)
        std = [tuple(Fraction(int(a == b)) for a in range(dim)) for b in range(dim)]
        L[n] = complement_basis(kernel_basis(c.d(n)), std, dim)
    small = ChainComplex.build({n: hom[n].betti for n in c.degrees()})
    jb, rb, hb = {}, {}, {}
    for n in c.degrees():
        dim = c.dim(n)
        if not dim:
            continue
        bnd = [c.d(n + 1).apply(l) for l in L.get(n + 1, [])]
        reps = list(hom[n].representatives)
        basis = QMatrix.from_columns(bnd + reps + L[n], dim)
        coords = solve_matrix(basis, QMatrix.identity(dim))
        nb, nh = len(bnd), len(reps)
        if nh:
            jb[n] = QMatrix.from_columns(reps, dim)
            rb[n] = coords.submatrix(range(nb, nb + nh), range(dim))
        if nb:
            lift = QMatrix.from_columns(L[n + 1], c.dim(n + 1))
            hb[n] = lift @ coords.submatrix(range(nb), range(dim))
    sdr = SDRData(c, small, ChainMap(small, c, jb), ChainMap(c, small, rb),
                  GradedMap(c, c, 1, hb))
    v = verify_sdr(sdr)
    assert v, f"homology SDR failed verification: {v.message}"
    return sdr


@dataclass
class Perturbation:
    base: SDRData
    t: GradedMap  # degree -1 on base.big

    def __post_init__(self):
        if self.t.degree != -1:
            raise PerturbationError("a perturbation has degree -1")
        N = self.base.big
        d = _differential(N)
        sq = _add(_compose(d, self.t), _compose(self.t, d), _compose(self.t, self.t))
        if not sq.is_zero():
            raise PerturbationError("(d + t)^2 != 0")

    def perturbed_big(self) -> ChainComplex:
        N = self.base.big
        return ChainComplex(N.min_degree, N.dims,
                            {n: N.d(n) + self.t[n] for n in N.degrees()})


@dataclass
class BPLResult:
    sdr: SDRData  # perturbed: big has d + t, small has d_inf
    d_inf: Dict[int, QMatrix]
    nilpotency_index: int


def _geometric_sum(a: GradedMap, cap: int):
    """``sum_k a^k`` for a nilpotent degree-0 map; raises if ``a^cap != 0``."""
    total = _identity(a.source)
    power = _identity(a.source)
    for k in range(1, cap + 1):
        power = _compose(a, power)
        if power.is_zero():
            return total, k
        total = _add(total, power)
    raise PerturbationError(f"perturbation is not nilpotent: (h t)^{cap} != 0")


def basic_perturbation(p: Perturbation) -> BPLResult:
    s = p.base
    N, M = s.big, s.small
    cap = max(N.total_dim(), 1)
    S, k1 = _geometric_sum(_compose(s.h, p.t), cap)
    Sp, _ = _geometric_sum(_compose(p.t, s.h), cap)
    extra = _compose(s.r, p.t, S, s.j)
    d_inf = {n: M.d(n) + extra[n] for n in M.degrees()}
    Np = p.perturbed_big()
    Mp = ChainComplex(M.min_degree, M.dims, d_inf)
    if not verify_complex(Mp):
        raise AssertionError("transferred differential does not square to zero")
    out = SDRData(Np, Mp, _on(_compose(S, s.j), Mp, Np), _on(_compose(s.r, Sp), Np, Mp),
                  _on(_compose(s.h, Sp), Np, Np))
    v = verify_sdr(out)
    if not v:
        raise AssertionError(f"perturbed SDR failed verification: {v.message}")
    return BPLResult(out, {n: m for n, m in Mp.differentials.items()}, k1)


# ---------------------------------------------------------------------------
# fibration-style transfer


def tensor_sdr(K: ChainComplex, fiber: SDRData) -> SDRData:
    """``id (x) (j, r, h)`` with the Koszul sign on ``id (x) h``."""
    idK = GradedMap.identity(K)
    big = tensor_product(K, fiber.big)
    small = tensor_product(K, fiber.small)
    return SDRData(big, small,
                   _on(tensor_maps(idK, fiber.j), small, big),
                   _on(tensor_maps(idK, fiber.r), big, small),
                   _on(tensor_maps(idK, fiber.h), big, big))


def circle_fiber_model() -> ChainComplex:
    """Four-dimensional model of S^1: ``z0, a0`` in degree 0, ``z1, a1`` in degree 1, ``d a1 = a0``."""
    return ChainComplex(0, [2, 2], {1: QMatrix.from_rows([[0, 0], [0, 1]])})


def cap_perturbation(base: ReducedSimplicialSet, fiber: ChainComplex,
                     psi: Dict[str, GradedMap]) -> GradedMap:
    """``t(sigma (x) y) = sum_i (-1)^(i+1) f_i(sigma) (x) psi(b_{n-i} sigma)(y)`` on ``C'(X) (x) F``.

    ``psi[sid]`` is a graded endomorphism of the fiber model of degree ``dim(sid) - 1``.
    """
    K = normalized_chains(base)
    big = tensor_product(K, fiber)
    blocks = {}
    for n in big.degrees():
        src = tensor_basis(K, fiber, n)
        tgt = tensor_basis(K, fiber, n - 1)
        tindex = {key: k for k, key in enumerate(tgt)}
        m = [[Fraction(0)] * len(src) for _ in tgt]
        for col, (p, i, j) in enumerate(src):
            sid = base.ids[p][i]
            for fi in range(p):
                f, b = front_back_faces(base, sid, fi)
                if f is None or b not in psi:
                    continue
                y = psi[b][n - p].column(j)
                fidx = base.index(f)
                for r, v in enumerate(y):
                    if v:
                        m[tindex[(fi, fidx, r)]][col] += cap_sign(fi) * v
        blocks[n] = QMatrix(len(tgt), len(src), m)
    return GradedMap(big, big, -1, blocks)


@dataclass
class TransferContext:
    """Everything produced while transferring a big twisted complex onto fiber homology."""

    base: ReducedSimplicialSet
    fiber_model: ChainComplex
    fiber_sdr: SDRData
    bpl: BPLResult
    cochain: TwistingCochain
    twisted: TwistedTensor


def _check_lowers_base_degree(K: ChainComplex, F: ChainComplex, t: GradedMap):
    for n, m in t.blocks.items():
        src = tensor_basis(K, F, n)
        tgt = tensor_basis(K, F, n - 1)
        for r in range(m.rows):
            for c in range(m.cols):
                if m[r, c] and tgt[r][0] >= src[c][0]:
                    raise PerturbationError(
                        f"perturbation does not lower base degree (degree {n}, "
                        f"base {src[c][0]} -> {tgt[r][0]})")


def transfer(base: ReducedSimplicialSet, fiber_model: ChainComplex, t: GradedMap) -> TransferContext:
    if fiber_model.dims and fiber_model.min_degree < 0:
        raise PerturbationError("fiber model must live in non-negative degrees")
    K = normalized_chains(base)
    _check_lowers_base_degree(K, fiber_model, t)
    fsdr = homology_sdr(fiber_model)
    sdr = tensor_sdr(K, fsdr)
    res = basic_perturbation(Perturbation(sdr, _on(t, sdr.big, sdr.big)))
    H = fsdr.small
    fiber_dims = tuple(H.dim(q) for q in range(0, max(H.degrees(), default=-1) + 1))
    M = sdr.small
    comps = {}
    offsets = [sum(fiber_dims[:q]) for q in range(len(fiber_dims))]
    total = sum(fiber_dims)
    for p in range(1, base.dimension + 1):
        for i, sid in enumerate(base.ids.get(p, [])):
            mat = [[Fraction(0)] * total for _ in range(total)]
            for q, dq in enumerate(fiber_dims):
                n = p + q
                src = tensor_basis(K, H, n)
                tgt = tensor_basis(K, H, n - 1)
                col_of = {key: k for k, key in enumerate(src)}
                extra = res.d_inf.get(n, M.d(n)) - M.d(n)
                for jl in range(dq):
                    col = col_of[(p, i, jl)]
                    for r, (pp, ii, jj) in enumerate(tgt):
                        if pp == 0 and extra[r, col]:
                            qq = n - 1
                            # front face is the basepoint: the i = 0 cap term, sign -1
                            mat[offsets[qq] + jj][offsets[q] + jl] = -extra[r, col]
            m = QMatrix(total, total, mat)
            if not m.is_zero():
                comps[sid] = m
    phi = TwistingCochain(base, fiber_dims, comps)
    v = verify_twisting(phi)
    if not v:
        raise TwistingError(f"transferred cochain violates the twisting identity: {v.message}",
                            where=v.where)
    T = twisted_tensor(phi)
    if T.complex != res.sdr.small:
        raise TwistingError("transferred differential is not of twisted-tensor form")
    return TransferContext(base, fiber_model, fsdr, res, phi, T)


def transferred_twisting(base: ReducedSimplicialSet, fiber_model: ChainComplex,
                         t: GradedMap) -> TwistingCochain:
    return transfer(base, fiber_model, t).cochain


@dataclass
class InducedMap:
    map: ChainMap
    preserves_filtration: bool
    quotients_match: bool
    fiber_homology_map: QMatrix


def _fiber_homology_matrix(g: ChainMap, p: SDRData, q: SDRData, dims_p, dims_q) -> QMatrix:
    """``H(g) = r_q g j_p`` as one block matrix in ascending-degree order."""
    blocks = []
    for n in range(max(len(dims_p), len(dims_q))):
        blocks.append(q.r[n] @ g[n] @ p.j[n])
    return QMatrix.block_diag(blocks)


def induced_map_infinity(g_fiber: ChainMap, ctx_p: TransferContext,
                         ctx_q: TransferContext) -> InducedMap:
    """``g_inf = r_inf_q o (id (x) g) o j_inf_p`` between two transferred twisted complexes."""
    if ctx_p.base is not ctx_q.base:
        raise PerturbationError("contexts live over different bases")
    K = normalized_chains(ctx_p.base)
    idg = tensor_maps(GradedMap.identity(K), g_fiber)
    Np, Nq = ctx_p.bpl.sdr.big, ctx_q.bpl.sdr.big
    big_map = _on(idg, Np, Nq)
    v = verify_chain_map(big_map)
    if not v:
        raise ChainError(f"id (x) g does not commute with the perturbed differentials: {v.message}",
                         degree=v.degree)
    g_inf = _on(_compose(ctx_q.bpl.sdr.r, big_map, ctx_p.bpl.sdr.j),
                ctx_p.twisted.complex, ctx_q.twisted.complex)
    v = verify_chain_map(g_inf)
    if not v:
        raise AssertionError(f"g_inf is not a chain map: {v.message}")
    Hg = _fiber_homology_matrix(g_fiber, ctx_p.fiber_sdr, ctx_q.fiber_sdr,
                                ctx_p.cochain.fiber_dims, ctx_q.cochain.fiber_dims)
    Tp, Tq = ctx_p.twisted, ctx_q.twisted
    preserves, matches = True, True
    for n, m in g_inf.blocks.items():
        src, tgt = Tp.labels.get(n, []), Tq.labels.get(n, [])
        for c, (s1, f1) in enumerate(src):
            for r, (s2, f2) in enumerate(tgt):
                val = m[r, c]
                qs, qt = Tp.fiber_degree((s1, f1)), Tq.fiber_degree((s2, f2))
                if qt < qs and val:
                    preserves = False
                if qt == qs:
                    want = Hg[f2, f1] if s1 == s2 else 0
                    if val != want:
                        matches = False
    return InducedMap(g_inf, preserves, matches, Hg)


def lower_square_homotopy(g_fiber: ChainMap, ctx_p: TransferContext,
                          ctx_q: TransferContext) -> Optional[ChainHomotopy]:
    """A homotopy between ``g_inf o r_inf_p`` and ``r_inf_q o (id (x) g)`` if one exists."""
    from .chains import find_homotopy

    ind = induced_map_infinity(g_fiber, ctx_p, ctx_q)
    K = normalized_chains(ctx_p.base)
    Np, Nq = ctx_p.bpl.sdr.big, ctx_q.bpl.sdr.big
    Mq = ctx_q.bpl.sdr.small
    big_map = _on(tensor_maps(GradedMap.identity(K), g_fiber), Np, Nq)
    a = _on(_compose(ind.map, ctx_p.bpl.sdr.r), Np, Mq)
    b = _on(_compose(ctx_q.bpl.sdr.r, big_map), Np, Mq)
    return find_homotopy(a, b)
