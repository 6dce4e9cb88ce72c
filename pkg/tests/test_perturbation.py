from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import complexes_with_betti
from twisted_chains.chains import ChainComplex, ChainMap, GradedMap, betti_numbers
from twisted_chains.exactq import QMatrix
from twisted_chains.fibration import MonodromyRep, degree_one_cochain
from twisted_chains.perturbation import (
    Perturbation,
    PerturbationError,
    SDRData,
    basic_perturbation,
    cap_perturbation,
    circle_fiber_model,
    homology_sdr,
    induced_map_infinity,
    lower_square_homotopy,
    normalize_side_conditions,
    transfer,
    transferred_twisting,
    verify_sdr,
)
from twisted_chains.simplicial import circle, normalized_chains, sphere, torus
from twisted_chains.twisting import twisted_tensor, verify_twisting

Q = QMatrix.from_rows


def identity_sdr(c):
    ident = {n: QMatrix.identity(c.dim(n)) for n in c.degrees()}
    return SDRData(c, c, ChainMap(c, c, ident), ChainMap(c, c, ident), GradedMap(c, c, 1, {}))


def klein_psi(F):
    return {"e": GradedMap(F, F, 0, {0: Q([[0, 0], [0, 0]]), 1: Q([[-2, 0], [0, 0]])})}


def hopf_psi(F):
    return {"s2": GradedMap(F, F, 1, {0: Q([[1, 0], [0, 0]])})}


# -- SDR verification ---------------------------------------------------------


def test_identity_sdr_ok():
    assert verify_sdr(identity_sdr(circle_fiber_model()))


def test_explicit_x5_plus_point():
    N = ChainComplex(0, [2, 1], {1: Q([[5], [0]])})
    M = ChainComplex(0, [1], {})
    j = ChainMap(M, N, {0: Q([[0], [1]])})
    r = ChainMap(N, M, {0: Q([[0, 1]])})
    h = GradedMap(N, N, 1, {0: Q([[Fraction(1, 5), 0]])})
    assert verify_sdr(SDRData(N, M, j, r, h))


def test_violation_names_hj():
    # x, y in degree 0; w, u in degree 1 with d w = x; homology spanned by y and u
    N = ChainComplex(0, [2, 2], {1: Q([[1, 0], [0, 0]])})
    M = ChainComplex(0, [1, 1], {})
    j = ChainMap(M, N, {0: Q([[0], [1]]), 1: Q([[0], [1]])})
    r = ChainMap(N, M, {0: Q([[0, 1]]), 1: Q([[0, 1]])})
    # x -> w contracts; the extra y -> u term keeps d h + h d intact but breaks h j = 0
    h = GradedMap(N, N, 1, {0: Q([[1, 0], [0, 1]])})
    v = verify_sdr(SDRData(N, M, j, r, h))
    assert not v and v.where == "hj"
    fixed = normalize_side_conditions(N, M, j, r, h)
    assert verify_sdr(fixed)
    assert fixed.h[0] == Q([[1, 0], [0, 0]])


# -- homology SDR --------------------------------------------------------------


def test_homology_sdr_zero_differential():
    c = ChainComplex(0, [2, 1], {})
    s = homology_sdr(c)
    assert s.small.dims == (2, 1)
    assert s.j[0] == QMatrix.identity(2) and s.r[1] == QMatrix.identity(1)
    assert s.h.is_zero()


def test_homology_sdr_x5(x5):
    s = homology_sdr(x5)
    assert s.small.total_dim() == 0
    assert s.h[0] == Q([[Fraction(1, 5)]])


def test_homology_sdr_klein_twisted():
    T = twisted_tensor(degree_one_cochain(klein_rep())[0])
    s = homology_sdr(T.complex)
    assert [s.small.dim(n) for n in range(3)] == [1, 1, 0]
    assert verify_sdr(s)


@given(complexes_with_betti(max_len=3, max_piece=2))
def test_homology_sdr_random(pair):
    c, betti = pair
    s = homology_sdr(c)
    assert verify_sdr(s)
    assert {n: s.small.dim(n) for n in c.degrees()} == betti
    assert homology_sdr(c).j == s.j


def test_normalization_idempotent():
    s = homology_sdr(circle_fiber_model())
    again = normalize_side_conditions(s.big, s.small, s.j, s.r, s.h)
    assert again.h == s.h


def test_normalization_kills_h_without_acyclic_part():
    c = ChainComplex(0, [1, 1], {})
    s = identity_sdr(c)
    # any h with d h + h d = 0 is admissible input; P = 0 annihilates it
    h = GradedMap(c, c, 1, {0: Q([[3]])})
    out = normalize_side_conditions(c, c, s.j, s.r, h)
    assert out.h.is_zero()


def test_normalization_rejects_broken_core():
    c = ChainComplex(0, [1], {})
    s = identity_sdr(c)
    r = ChainMap(c, c, {0: Q([[2]])})
    with pytest.raises(PerturbationError):
        normalize_side_conditions(c, c, s.j, r, s.h)


# -- basic perturbation lemma ----------------------------------------------------


def test_zero_perturbation_is_identity():
    s = homology_sdr(circle_fiber_model())
    res = basic_perturbation(Perturbation(s, GradedMap(s.big, s.big, -1, {})))
    assert res.sdr.small == s.small
    assert res.sdr.j == s.j and res.sdr.h == s.h


def test_perturbation_must_square_to_zero():
    N = ChainComplex(0, [1, 1, 1], {1: Q([[1]])})
    s = homology_sdr(N)
    with pytest.raises(PerturbationError):
        # d t lands on the degree 0 generator
        Perturbation(s, GradedMap(N, N, -1, {2: Q([[1]])}))
    with pytest.raises(PerturbationError):
        Perturbation(s, GradedMap(N, N, 0, {}))
    assert Perturbation(s, GradedMap(N, N, -1, {1: Q([[3]])}))


def test_klein_bpl_matches_direct():
    F = circle_fiber_model()
    ctx = transfer(circle(), F, cap_perturbation(circle(), F, klein_psi(F)))
    direct = twisted_tensor(degree_one_cochain(klein_rep())[0])
    assert ctx.cochain("e") == Q([[0, 0], [0, -2]])
    assert ctx.bpl.d_inf[2] == direct.complex.d(2)
    assert verify_sdr(ctx.bpl.sdr)


def test_hopf_bpl_matches_direct():
    F = circle_fiber_model()
    phi = transferred_twisting(sphere(2), F, cap_perturbation(sphere(2), F, hopf_psi(F)))
    assert phi("s2") == Q([[0, 0], [1, 0]])
    assert verify_twisting(phi)


def test_zero_transfer_gives_zero_cochain():
    F = circle_fiber_model()
    K = normalized_chains(torus())
    from twisted_chains.chains import tensor_product
    big = tensor_product(K, F)
    phi = transferred_twisting(torus(), F, GradedMap(big, big, -1, {}))
    assert all(m.is_zero() for m in phi.components.values())


def test_transfer_rejects_degree_preserving():
    F = circle_fiber_model()
    from twisted_chains.chains import tensor_product
    big = tensor_product(normalized_chains(circle()), F)
    # maps the acyclic pair's top onto its bottom inside base degree 0: a fiber-internal term
    blocks = {1: QMatrix.zeros(big.dim(0), big.dim(1))}
    m = [[0] * big.dim(1) for _ in range(big.dim(0))]
    m[0][0] = 1
    blocks[1] = Q(m)
    with pytest.raises(PerturbationError):
        transfer(circle(), F, GradedMap(big, big, -1, blocks))


def klein_rep():
    return MonodromyRep(circle(), [1, 1], {"e": Q([[1, 0], [0, -1]])})


def fiber_with_pair(h_dims):
    """``H`` in degrees 0.. plus one acyclic pair a1 -> a0 appended after the homology coordinates."""
    dims = list(h_dims)
    dims[0] += 1
    if len(dims) == 1:
        dims.append(0)
    dims[1] += 1
    d1 = [[0] * dims[1] for _ in range(dims[0])]
    d1[dims[0] - 1][dims[1] - 1] = 1
    return ChainComplex(0, dims, {1: Q(d1)})


def psi_from_rep(rho, F, h_dims):
    """Extend ``rho(e) - id`` by zero on the acyclic pair."""
    alg = rho.algebra
    out = {}
    for e in rho.edges():
        g = rho(e) - alg.identity()
        blocks = {}
        for q in range(F.max_degree + 1):
            d = h_dims[q] if q < len(h_dims) else 0
            m = [[Fraction(0)] * F.dim(q) for _ in range(F.dim(q))]
            if d:
                blk = alg.block(g, q, q)
                for a in range(d):
                    for b in range(d):
                        m[a][b] = blk[a, b]
            blocks[q] = QMatrix(F.dim(q), F.dim(q), m)
        out[e] = GradedMap(F, F, 0, blocks)
    return out


nonzero = st.sampled_from([Fraction(x) for x in (1, -1, 2, -2, 3, Fraction(1, 2))])


@st.composite
def commuting_torus_reps(draw):
    A = [draw(nonzero) for _ in range(3)]
    a = QMatrix(2, 2, [[A[0], draw(st.integers(-2, 2))], [0, A[1]]])
    x, y = draw(st.integers(-2, 2)), draw(st.integers(-2, 2))
    b2 = QMatrix.identity(2).scale(x) + a.scale(y)
    if b2.rank() < 2:
        b2 = QMatrix.identity(2)
    z = QMatrix(3, 3, [[a[0, 0], a[0, 1], 0], [a[1, 0], a[1, 1], 0], [0, 0, A[2]]])
    w = QMatrix(3, 3, [[b2[0, 0], b2[0, 1], 0], [b2[1, 0], b2[1, 1], 0], [0, 0, draw(nonzero)]])
    return MonodromyRep.from_generators(torus(), [2, 1], {"a": z, "b": w})


@given(commuting_torus_reps())
def test_transferred_degree_one_part_is_monodromy(rho):
    h_dims = [2, 1]
    F = fiber_with_pair(h_dims)
    t = cap_perturbation(torus(), F, psi_from_rep(rho, F, h_dims))
    phi = transferred_twisting(torus(), F, t)
    expected, verdict = degree_one_cochain(rho)
    assert verdict
    for e in rho.edges():
        assert phi(e) == expected(e)


# -- induced maps ----------------------------------------------------------------


def _torus_context(F):
    from twisted_chains.chains import tensor_product
    big = tensor_product(normalized_chains(torus()), F)
    return transfer(torus(), F, GradedMap(big, big, -1, {}))


def test_induced_identity():
    F = circle_fiber_model()
    ctx = _torus_context(F)
    g = ChainMap(F, F, {n: QMatrix.identity(F.dim(n)) for n in F.degrees()})
    ind = induced_map_infinity(g, ctx, ctx)
    assert all(ind.map[n] == QMatrix.identity(ctx.twisted.complex.dim(n))
               for n in ctx.twisted.complex.degrees())


def test_induced_zero():
    F = circle_fiber_model()
    ctx = _torus_context(F)
    ind = induced_map_infinity(ChainMap(F, F, {}), ctx, ctx)
    assert ind.map.is_zero() and ind.preserves_filtration


def test_induced_torus_iso():
    F = circle_fiber_model()
    ctx = _torus_context(F)
    g = ChainMap(F, F, {0: Q([[3, 0], [0, 1]]), 1: Q([[-1, 0], [0, 1]])})
    ind = induced_map_infinity(g, ctx, ctx)
    assert ind.preserves_filtration and ind.quotients_match
    assert ind.fiber_homology_map == Q([[3, 0], [0, -1]])


def test_induced_across_klein_contexts():
    F = circle_fiber_model()
    ctx = transfer(circle(), F, cap_perturbation(circle(), F, klein_psi(F)))
    g = ChainMap(F, F, {0: Q([[2, 0], [0, 1]]), 1: Q([[5, 0], [0, 1]])})
    ind = induced_map_infinity(g, ctx, ctx)
    assert ind.preserves_filtration and ind.quotients_match
    assert lower_square_homotopy(g, ctx, ctx) is not None


def test_induced_base_mismatch():
    F = circle_fiber_model()
    a = _torus_context(F)
    b = transfer(circle(), F, cap_perturbation(circle(), F, klein_psi(F)))
    g = ChainMap(F, F, {n: QMatrix.identity(F.dim(n)) for n in F.degrees()})
    with pytest.raises(PerturbationError):
        induced_map_infinity(g, a, b)


def test_bpl_betti_of_klein_complex():
    F = circle_fiber_model()
    ctx = transfer(circle(), F, cap_perturbation(circle(), F, klein_psi(F)))
    assert betti_numbers(ctx.bpl.sdr.small) == betti_numbers(ctx.bpl.sdr.big)
