"""Built-in golden examples.

Every entry computes its value through the library and recomputes the expected
value through an independent route (a different model of the same space, a
Kunneth product, or a direct determinant expansion) at run time.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Dict, List

from .chains import ChainComplex, betti_list, euler_characteristic, tensor_product
from .exactq import QMatrix
from .fibration import MonodromyRep, fibration_complex, verify_rep
from .simplicial import boundary_of_simplex, circle, klein_bottle, normalized_chains, sphere, torus
from .torsion import torsion
from .twisting import filtration_quotient


@dataclass
class GalleryEntry:
    name: str
    description: str
    compute: Callable[[], dict]
    oracle: Callable[[], object]
    key: str


def _report(c: ChainComplex) -> dict:
    return {"betti": betti_list(c, 0, c.max_degree), "euler": euler_characteristic(c)}


def _fibration_report(rho: MonodromyRep, higher=None) -> dict:
    if not verify_rep(rho):
        raise AssertionError("gallery representation is not well defined")
    T = fibration_complex(rho, higher)
    rep = _report(T.complex)
    rep["quotients_iso"] = all(filtration_quotient(T, n).iso_check
                               for n in range(len(rho.fiber_dims)))
    return rep


def _oracle_betti(c: ChainComplex, top: int) -> list:
    return betti_list(c, 0, top)


def hopf_component() -> QMatrix:
    """Value on the 2-cell of the Hopf twisting cochain: sends H_0 of the circle fiber to H_1."""
    return QMatrix.from_rows([[0, 0], [1, 0]])


def torus_entry() -> dict:
    return _fibration_report(MonodromyRep(circle(), [1, 1]))


def klein_entry() -> dict:
    flip = QMatrix.from_rows([[1, 0], [0, -1]])
    return _fibration_report(MonodromyRep(circle(), [1, 1], {"e": flip}))


def hopf_entry() -> dict:
    return _fibration_report(MonodromyRep(sphere(2), [1, 1]), {"s2": hopf_component()})


def trivial_s2xs1_entry() -> dict:
    return _fibration_report(MonodromyRep(sphere(2), [1, 1]))


def _x5() -> ChainComplex:
    return ChainComplex(0, [1, 1], {1: QMatrix.from_rows([[5]])})


def torsion_entry() -> dict:
    return {"torsion": str(torsion(_x5()))}


def leibniz_det(m: QMatrix) -> Fraction:
    """Determinant by the permutation expansion; no elimination involved."""
    n = m.rows
    total = Fraction(0)
    for perm in permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Fraction(-1 if inv % 2 else 1)
        for i in range(n):
            term *= m[i, perm[i]]
        total += term
    return total


def _torsion_oracle() -> str:
    # two-term complex concentrated in degrees 1 and 0: the torsion is |det d_1|
    return str(abs(leibniz_det(_x5().d(1))))


GALLERY: List[GalleryEntry] = [
    GalleryEntry("torus", "circle bundle over the circle with trivial monodromy",
                 torus_entry, lambda: _oracle_betti(normalized_chains(torus()), 2), "betti"),
    GalleryEntry("klein", "circle bundle over the circle with orientation-reversing monodromy",
                 klein_entry, lambda: _oracle_betti(normalized_chains(klein_bottle()), 2), "betti"),
    GalleryEntry("hopf", "Hopf fibration over the 2-sphere",
                 hopf_entry, lambda: _oracle_betti(boundary_of_simplex(4), 3), "betti"),
    GalleryEntry("trivial-s2xs1", "product of the 2-sphere with the circle",
                 trivial_s2xs1_entry,
                 lambda: _oracle_betti(tensor_product(normalized_chains(sphere(2)),
                                                      normalized_chains(circle())), 3), "betti"),
    GalleryEntry("torsion-x5", "two-term complex with differential 5",
                 torsion_entry, _torsion_oracle, "torsion"),
]


def gallery_names() -> List[str]:
    return [e.name for e in GALLERY]


def run_entry(entry: GalleryEntry) -> dict:
    got = entry.compute()
    expected = entry.oracle()
    ok = got[entry.key] == expected and got.get("quotients_iso", True)
    return {"name": entry.name, "description": entry.description, "result": got,
            "oracle": expected, "pass": bool(ok)}


def run_gallery(names=None) -> Dict[str, dict]:
    wanted = gallery_names() if names is None else list(names)
    by_name = {e.name: e for e in GALLERY}
    unknown = [n for n in wanted if n not in by_name]
    if unknown:
        raise KeyError(f"unknown gallery entries: {unknown}")
    return {n: run_entry(by_name[n]) for n in wanted}
