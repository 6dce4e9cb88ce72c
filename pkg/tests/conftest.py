import sys
from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from twisted_chains.chains import ChainComplex, ChainMap
from twisted_chains.exactq import QMatrix

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def small_rationals():
    return st.builds(Fraction, st.integers(-4, 4), st.sampled_from([1, 1, 1, 2, 3]))


def small_ints():
    return st.integers(-3, 3).map(Fraction)


@st.composite
def matrices(draw, rows=None, cols=None, entries=None, max_dim=4):
    r = draw(st.integers(0, max_dim)) if rows is None else rows
    c = draw(st.integers(0, max_dim)) if cols is None else cols
    entries = small_rationals() if entries is None else entries
    data = draw(st.lists(st.lists(entries, min_size=c, max_size=c), min_size=r, max_size=r))
    return QMatrix(r, c, data)


@st.composite
def invertible_matrices(draw, n):
    """Lower unitriangular times diagonal times upper unitriangular: always invertible."""
    lower = [[draw(small_ints()) if j < i else Fraction(int(i == j)) for j in range(n)]
             for i in range(n)]
    upper = [[draw(small_ints()) if j > i else Fraction(int(i == j)) for j in range(n)]
             for i in range(n)]
    diag = [draw(st.sampled_from([1, -1, 2, -2, 3])) for _ in range(n)]
    L = QMatrix(n, n, lower)
    U = QMatrix(n, n, upper)
    D = QMatrix(n, n, [[diag[i] if i == j else 0 for j in range(n)] for i in range(n)])
    perm = draw(st.permutations(range(n)))
    P = QMatrix(n, n, [[int(perm[i] == j) for j in range(n)] for i in range(n)])
    return P @ L @ D @ U


@st.composite
def complexes_with_betti(draw, max_len=4, max_piece=2, acyclic=False):
    """A random complex together with its betti numbers, known by construction.

    Degree n is split as (targets of d_{n+1}, homology, sources of d_n); the
    canonical differential is then conjugated by random invertible matrices.
    """
    length = draw(st.integers(1, max_len))
    lo = draw(st.integers(-1, 1))
    ranks = [0] + [draw(st.integers(0, max_piece)) for _ in range(length - 1)] + [0]
    # ranks[k] is the rank of d_{lo+k}; ranks[0] = rank d_lo = 0, ranks[length] = 0
    hom = [0 if acyclic else draw(st.integers(0, max_piece)) for _ in range(length)]
    dims = [ranks[k + 1] + hom[k] + ranks[k] for k in range(length)]
    bases = [draw(invertible_matrices(d)) for d in dims]
    diffs = {}
    for k in range(1, length):
        rows, cols = dims[k - 1], dims[k]
        canon = [[0] * cols for _ in range(rows)]
        # sources of d in degree k sit last; their targets sit first in degree k-1
        for t in range(ranks[k]):
            canon[t][cols - ranks[k] + t] = 1
        D = QMatrix(rows, cols, canon)
        diffs[lo + k] = bases[k - 1] @ D @ bases[k].inverse()
    c = ChainComplex(lo, dims, diffs)
    return c, {lo + k: hom[k] for k in range(length)}


@st.composite
def automorphisms_of(draw, c: ChainComplex):
    """A chain automorphism of ``c`` obtained by conjugating a random based change."""
    # identity plus a chain-null-homotopic term d s + s d is a chain map; keep it invertible
    from twisted_chains.chains import GradedMap
    s_blocks = {n: draw(matrices(c.dim(n + 1), c.dim(n), entries=small_ints()))
                for n in c.degrees()}
    s = GradedMap(c, c, 1, s_blocks)
    ident = GradedMap.identity(c)
    f = ident + s.hom_differential()
    if any(f[n].rank() < c.dim(n) for n in c.degrees()):
        return ChainMap(c, c, {n: ident[n] for n in c.degrees()})
    return ChainMap(c, c, {n: f[n] for n in c.degrees()})


@pytest.fixture
def x5():
    return ChainComplex(0, [1, 1], {1: QMatrix.from_rows([[5]])})


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(lines):
        terminalreporter.write_line(lines[n])
