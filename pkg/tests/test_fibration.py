from fractions import Fraction
from itertools import product

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from conftest import invertible_matrices, small_ints
from twisted_chains.chains import betti_list, direct_sum, euler_characteristic
from twisted_chains.exactq import QMatrix
from twisted_chains.fibration import (
    MonodromyRep,
    degree_one_cochain,
    fibration_complex,
    is_unipotent,
    is_unipotent_matrices,
    restrict_and_quotient,
    serre_closure_check,
    verify_rep,
)
from twisted_chains.gallery import hopf_component
from twisted_chains.simplicial import boundary_of_simplex, circle, klein_bottle, normalized_chains, sphere, torus
from twisted_chains.twisting import TwistingError

Q = QMatrix.from_rows
JORDAN = Q([[1, 1], [0, 1]])


def words_vanish(mats, dim):
    """Oracle: the algebra generated by ``g - 1`` is nilpotent iff every word of length ``dim`` is 0."""
    if dim == 0:
        return True
    I = QMatrix.identity(dim)
    nil = [g - I for g in mats]
    for word in product(nil, repeat=dim):
        acc = I
        for m in word:
            acc = acc @ m
        if not acc.is_zero():
            return False
    return True


def charpoly_is_unipotent(m: QMatrix) -> bool:
    x = sympy.Symbol("x")
    M = sympy.Matrix(m.rows, m.cols, lambda i, j: sympy.Rational(m[i, j].numerator, m[i, j].denominator))
    return sympy.expand(M.charpoly(x).as_expr() - (x - 1) ** m.rows) == 0


# -- representations ---------------------------------------------------------------


def test_identity_rep_ok():
    assert verify_rep(MonodromyRep(torus(), [1, 2]))


def test_torus_relation():
    A = Q([[2]])
    good = MonodromyRep(torus(), [1], {"a": A, "b": A, "c": A @ A})
    assert verify_rep(good)
    bad = MonodromyRep(torus(), [1], {"a": A, "b": A, "c": A})
    v = verify_rep(bad)
    assert not v and v.where in {"T1", "T2"}


def test_noncommuting_torus_fails():
    a, b = Q([[1, 1], [0, 1]]), Q([[1, 0], [1, 1]])
    v = verify_rep(MonodromyRep(torus(), [2], {"a": a, "b": b, "c": a @ b}))
    assert not v


def test_singular_action():
    v = verify_rep(MonodromyRep(circle(), [2], {"e": Q([[1, 0], [0, 0]])}))
    assert not v and "not invertible" in v.message


def test_rep_rejects_non_edge_and_mixing():
    with pytest.raises(ValueError):
        MonodromyRep(torus(), [1], {"T1": Q([[1]])})
    with pytest.raises(ValueError):
        MonodromyRep(circle(), [1, 1], {"e": Q([[1, 1], [0, 1]])})


def test_from_generators_fills_diagonal():
    rho = MonodromyRep.from_generators(torus(), [2], {"a": JORDAN, "b": JORDAN @ JORDAN})
    assert rho("c") == JORDAN @ JORDAN @ JORDAN
    assert verify_rep(rho)


# -- unipotency --------------------------------------------------------------------


def test_identity_unipotent():
    res = is_unipotent(MonodromyRep(circle(), [2]))
    assert res and res.filtration.lengths() == (2, 0)


def test_jordan_lengths():
    res = is_unipotent(MonodromyRep(circle(), [2], {"e": JORDAN}))
    assert res and res.filtration.lengths() == (2, 1, 0)
    assert res.filtration.verify([JORDAN])


def test_klein_not_unipotent():
    res = is_unipotent(MonodromyRep(circle(), [1, 1], {"e": Q([[1, 0], [0, -1]])}))
    assert not res
    assert res.witness == [(0, 1)]


def test_graded_filtration_spans_degrees():
    rho = MonodromyRep(circle(), [2, 1], {"e": QMatrix.block_diag([JORDAN, Q([[1]])])})
    res = is_unipotent(rho)
    assert res and res.filtration.verify(rho.generators())


@st.composite
def unipotent_family(draw, n=3, count=2):
    P = draw(invertible_matrices(n))
    Pinv = P.inverse()
    out = []
    for _ in range(count):
        U = QMatrix(n, n, [[draw(small_ints()) if j > i else Fraction(int(i == j)) for j in range(n)]
                           for i in range(n)])
        out.append(P @ U @ Pinv)
    return out


@st.composite
def planted_family(draw, n=3, count=2):
    mats = draw(unipotent_family(n, count))
    P = draw(invertible_matrices(n))
    lam = draw(st.sampled_from([Fraction(-1), Fraction(2), Fraction(1, 3)]))
    k = draw(st.integers(0, n - 1))
    D = QMatrix(n, n, [[lam if i == j == k else Fraction(int(i == j)) for j in range(n)] for i in range(n)])
    mats[0] = P @ D @ P.inverse()
    return mats


@given(unipotent_family())
def test_random_unipotent(mats):
    res = is_unipotent_matrices(mats, 3)
    assert res and res.filtration.verify(mats)
    assert words_vanish(mats, 3)


@given(planted_family())
def test_random_planted_eigenvalue(mats):
    res = is_unipotent_matrices(mats, 3)
    assert not res and res.witness
    assert not charpoly_is_unipotent(mats[0])


@given(st.one_of(unipotent_family(count=1), planted_family(count=1)))
def test_single_generator_matches_charpoly(mats):
    assert bool(is_unipotent_matrices(mats, 3)) == charpoly_is_unipotent(mats[0])


@given(st.lists(st.lists(st.lists(st.integers(-1, 1), min_size=2, max_size=2), min_size=2, max_size=2),
                min_size=1, max_size=3))
def test_matches_word_oracle(raw):
    mats = [Q(m) + QMatrix.identity(2) for m in raw]
    mats = [m for m in mats if m.rank() == 2] or [QMatrix.identity(2)]
    assert bool(is_unipotent_matrices(mats, 2)) == words_vanish(mats, 2)


# -- Serre closure -------------------------------------------------------------------


def test_serre_unipotent_sub_from_filtration():
    rho = MonodromyRep(circle(), [2], {"e": JORDAN})
    W1 = is_unipotent(rho).filtration.subspaces[1]
    rep = serre_closure_check(rho, W1)
    assert rep.sub_unipotent and rep.quotient_unipotent and rep.total_unipotent


def test_serre_sign_obstruction():
    rho = MonodromyRep(circle(), [2], {"e": Q([[1, 0], [0, -1]])})
    rep = serre_closure_check(rho, [(1, 0)])
    assert rep.sub_unipotent and not rep.quotient_unipotent and not rep.total_unipotent
    assert rep.consistent


def test_serre_extension_of_trivials():
    rho = MonodromyRep(circle(), [2], {"e": JORDAN})
    rs, qs, k = restrict_and_quotient(rho.generators(), [(1, 0)], 2)
    assert rs == [Q([[1]])] and qs == [Q([[1]])]
    assert serre_closure_check(rho, [(1, 0)]).consistent


def test_serre_rejects_non_invariant():
    rho = MonodromyRep(circle(), [2], {"e": JORDAN})
    with pytest.raises(ValueError):
        serre_closure_check(rho, [(0, 1)])


@given(unipotent_family(count=1), st.data())
def test_serre_random(mats, data):
    rho = MonodromyRep(circle(), [3], {"e": mats[0]})
    res = is_unipotent(rho)
    level = data.draw(st.integers(0, len(res.filtration.subspaces) - 1))
    assert serre_closure_check(rho, res.filtration.subspaces[level]).consistent


# -- degree-one cochains and fibration complexes ---------------------------------------


def test_degree_one_identity_is_zero():
    phi, verdict = degree_one_cochain(MonodromyRep(torus(), [1, 1]))
    assert verdict and all(m.is_zero() for m in phi.components.values())


def test_degree_one_klein():
    phi, verdict = degree_one_cochain(MonodromyRep(circle(), [1, 1], {"e": Q([[1, 0], [0, -1]])}))
    assert verdict and phi("e") == Q([[0, 0], [0, -2]])


def test_degree_one_torus_commuting_unipotent():
    a, b = JORDAN, JORDAN @ JORDAN
    rho = MonodromyRep(torus(), [2], {"a": a, "b": b, "c": a @ b})
    phi, verdict = degree_one_cochain(rho)
    # decide by direct evaluation: (rho(d2) - 1)(rho(d0) - 1) against phi(d T) on each triangle
    I = QMatrix.identity(2)
    direct = all(
        (rho(rho.base.faces[t][2][1]) - I) @ (rho(rho.base.faces[t][0][1]) - I)
        == phi(rho.base.faces[t][1][1]) - phi(rho.base.faces[t][0][1]) - phi(rho.base.faces[t][2][1])
        for t in ("T1", "T2"))
    assert bool(verdict) == direct


def test_fibration_torus():
    T = fibration_complex(MonodromyRep(circle(), [1, 1]))
    assert betti_list(T.complex) == betti_list(normalized_chains(torus())) == [1, 2, 1]


def test_fibration_klein():
    T = fibration_complex(MonodromyRep(circle(), [1, 1], {"e": Q([[1, 0], [0, -1]])}))
    assert betti_list(T.complex, 0, 2) == betti_list(normalized_chains(klein_bottle()), 0, 2) == [1, 1, 0]


def test_fibration_hopf():
    T = fibration_complex(MonodromyRep(sphere(2), [1, 1]), {"s2": hopf_component()})
    assert betti_list(T.complex) == betti_list(boundary_of_simplex(4)) == [1, 0, 0, 1]


def test_fibration_refuses_bad_higher():
    with pytest.raises(TwistingError):
        fibration_complex(MonodromyRep(circle(), [1, 1]), {"e": hopf_component()})


def test_composition_shadow():
    for x in (torus(), klein_bottle(), sphere(2)):
        T = fibration_complex(MonodromyRep(x, [1]))
        K = normalized_chains(x)
        assert T.complex.dims == K.dims
        assert all(T.complex.d(n) == K.d(n) for n in K.degrees())


@given(unipotent_family(n=2, count=1), unipotent_family(n=1, count=1))
def test_mayer_vietoris_betti_add(m1, m2):
    a = MonodromyRep(circle(), [2], {"e": m1[0]})
    b = MonodromyRep(circle(), [1], {"e": m2[0]})
    both = MonodromyRep(circle(), [3], {"e": QMatrix.block_diag([m1[0], m2[0]])})
    split = direct_sum(fibration_complex(a).complex, fibration_complex(b).complex)
    assert betti_list(fibration_complex(both).complex) == betti_list(split)


@given(st.sampled_from([-1, 2, 3]), st.sampled_from([-1, 2, 3]))
def test_euler_shadow(x, y):
    rho = MonodromyRep.from_generators(torus(), [1, 2], {"a": QMatrix.block_diag([Q([[x]]), JORDAN]),
                                                         "b": QMatrix.block_diag([Q([[y]]), JORDAN])})
    assert verify_rep(rho)
    phi, verdict = degree_one_cochain(rho)
    if not verdict:
        return
    T = fibration_complex(rho)
    assert euler_characteristic(T.complex) == euler_characteristic(normalized_chains(torus())) * (1 - 2)
