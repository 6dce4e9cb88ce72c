from fractions import Fraction
from itertools import combinations

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from conftest import automorphisms_of, complexes_with_betti, invertible_matrices, matrices, small_ints
from twisted_chains.chains import ChainComplex, ChainMap, GradedMap
from twisted_chains.exactq import QMatrix
from twisted_chains.gallery import leibniz_det
from twisted_chains.torsion import (
    BasedComplex,
    TorsionError,
    additivity_check,
    composition_check,
    extension,
    torsion,
    torsion_of_quasi_iso,
)

Q = QMatrix.from_rows


def two_term(k):
    return ChainComplex(0, [1, 1], {1: Q([[k]])})


def point(dim=1):
    return ChainComplex(0, [dim], {})


# -- worked examples ---------------------------------------------------------------


def test_x5(x5):
    assert torsion(x5) == 5


def test_minus_5():
    assert torsion(two_term(-5)) == 5


def test_direct_sum():
    c = ChainComplex(0, [2, 2], {1: Q([[2, 0], [0, 3]])})
    assert torsion(c) == 6


def test_non_acyclic_refused():
    with pytest.raises(TorsionError):
        torsion(point())


def test_empty_complex():
    assert torsion(ChainComplex(0, [], {})) == 1


def test_longer_complex():
    # 0 -> Q -> Q^2 -> Q -> 0, with d2 = (1, 2)^T and d1 = (2, -1)
    c = ChainComplex(0, [1, 2, 1], {1: Q([[2, -1]]), 2: Q([[1], [2]])})
    # b_1 = e_1 (leftmost), b_2 = e: degree 2 gives 1, degree 1 gives |det[[1, 1], [2, 0]]|^-1 = 1/2,
    # degree 0 gives |d e_1| = 2
    assert torsion(c) == 1
    assert torsion(BasedComplex(c).change_basis(2, [[3]])) == 3


def test_quasi_iso_examples():
    c = point()
    assert torsion_of_quasi_iso(ChainMap(c, c, {0: Q([[1]])})) == 1
    assert torsion_of_quasi_iso(ChainMap(c, c, {0: Q([[3]])})) == 3
    c2 = point(2)
    assert torsion_of_quasi_iso(ChainMap(c2, c2, {0: Q([[1, 1], [0, 2]])})) == 2


def test_quasi_iso_refuses():
    c = point()
    with pytest.raises(TorsionError):
        torsion_of_quasi_iso(ChainMap(c, c, {0: Q([[0]])}))


def test_composition_examples():
    c = point()
    f = ChainMap(c, c, {0: Q([[2]])})
    g = ChainMap(c, c, {0: Q([[3]])})
    rep = composition_check(f, g)
    assert rep.ok and (rep.tau_f, rep.tau_g, rep.tau_gf) == (2, 3, 6)
    ident = ChainMap(c, c, {0: Q([[1]])})
    assert composition_check(ident, g).tau_gf == 3


# -- base change ----------------------------------------------------------------------


def test_change_basis_direction(x5):
    b = BasedComplex(x5)
    assert torsion(b.change_basis(0, [[2]])) == 10
    assert torsion(b.change_basis(1, [[2]])) == Fraction(5, 2)


@given(complexes_with_betti(max_len=3, max_piece=2, acyclic=True), st.data())
def test_change_basis_formula(pair, data):
    c, _ = pair
    degs = [n for n in c.degrees() if c.dim(n)]
    assume(degs)
    n = data.draw(st.sampled_from(degs))
    P = data.draw(invertible_matrices(c.dim(n)))
    before = torsion(c)
    after = torsion(BasedComplex(c).change_basis(n, P))
    det = abs(leibniz_det(P))
    assert after == before * (det if n % 2 == 0 else 1 / det)


def test_bad_basis_rejected(x5):
    with pytest.raises(TorsionError):
        BasedComplex(x5, {0: Q([[0]])})


# -- choice independence -----------------------------------------------------------------


def _admissible_choices(c: ChainComplex):
    out = {}
    for n in c.degrees():
        D = c.d(n)
        rk = D.rank()
        out[n] = [list(idx) for idx in combinations(range(D.cols), rk)
                  if D.submatrix(range(D.rows), list(idx)).rank() == rk]
    return out


@given(complexes_with_betti(max_len=3, max_piece=2, acyclic=True), st.data())
def test_choice_independence(pair, data):
    c, _ = pair
    options = _admissible_choices(c)
    choices = {n: data.draw(st.sampled_from(opts)) for n, opts in options.items() if opts}
    assert torsion(c, choices) == torsion(c)


def test_bad_choice_rejected():
    c = ChainComplex(0, [1, 2], {1: Q([[0, 1]])})
    with pytest.raises(TorsionError):
        torsion(c, {1: [0]})


# -- two-term oracle ------------------------------------------------------------------------


@given(invertible_matrices(3))
def test_two_term_matches_leibniz(D):
    c = ChainComplex(0, [3, 3], {1: D})
    assert torsion(c) == abs(leibniz_det(D))


# -- multiplicativity, additivity, homotopy invariance ---------------------------------------


@given(invertible_matrices(3), invertible_matrices(3))
def test_multiplicative_degree_zero(A, B):
    c = point(3)
    f = ChainMap(c, c, {0: A})
    g = ChainMap(c, c, {0: B})
    rep = composition_check(f, g)
    assert rep.ok
    assert rep.tau_gf == abs(leibniz_det(B @ A))


@st.composite
def complex_and_automorphism(draw):
    c, _ = draw(complexes_with_betti(max_len=3, max_piece=1))
    f = draw(automorphisms_of(c))
    lam = draw(st.sampled_from([1, 2, -3, Fraction(1, 2)]))
    return c, ChainMap(c, c, {n: f[n].scale(lam) for n in c.degrees()})


@given(complex_and_automorphism(), st.data())
def test_multiplicative_chain_level(fa, data):
    c, f = fa
    g0 = data.draw(automorphisms_of(c))
    g = ChainMap(c, c, {n: g0[n].scale(2) for n in c.degrees()})
    rep = composition_check(f, g)
    assert rep.ok


@given(complex_and_automorphism(), st.data())
def test_homotopy_invariance(fa, data):
    c, f = fa
    s = GradedMap(c, c, 1, {n: data.draw(matrices(c.dim(n + 1), c.dim(n), entries=small_ints()))
                            for n in c.degrees()})
    g = ChainMap(c, c, {n: (f + s.hom_differential())[n] for n in c.degrees()})
    assert torsion_of_quasi_iso(g) == torsion_of_quasi_iso(f)


@st.composite
def based_acyclic(draw):
    c, _ = draw(complexes_with_betti(max_len=3, max_piece=1, acyclic=True))
    basis = {n: draw(invertible_matrices(c.dim(n))) for n in c.degrees()}
    return BasedComplex(c, basis)


@given(based_acyclic(), based_acyclic(), st.data())
def test_additivity(a, b, data):
    A, B = a.complex, b.complex
    # x = d_A s - s d_B keeps the block differential square-zero
    degs = set(A.degrees()) | set(B.degrees())
    s = GradedMap(B, A, 0, {n: data.draw(matrices(A.dim(n), B.dim(n), entries=small_ints()))
                            for n in degs})
    x = GradedMap(B, A, -1, {n: A.d(n) @ s[n] - s[n - 1] @ B.d(n) for n in degs})
    total, prod = additivity_check(a, b, x)
    assert total == prod


def test_additivity_example():
    a = BasedComplex(two_term(2))
    b = BasedComplex(two_term(3))
    x = GradedMap(b.complex, a.complex, -1, {1: Q([[0]])})
    assert additivity_check(a, b, x) == (6, 6)


def test_extension_rejects_bad_coupling():
    a = BasedComplex(two_term(2))
    b = BasedComplex(ChainComplex(0, [1, 1, 1], {1: Q([[1]])}))
    with pytest.raises(TorsionError):
        extension(a, b, GradedMap(b.complex, a.complex, 0, {}))
