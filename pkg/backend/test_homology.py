#!/usr/bin/env python3
"""
Tests for chain complexes, homology over prime fields and the stacked-complex certificate
"""
import numpy as np
import pytest

from api.criteria import run_dsg
from api.pipeline import build_stream
from complexes.simplicial import SimplicialComplex
from core.errors import EmptyFenceError, MalformedComplexError
from homology.chains import CellComplex
from homology.cohomology import cohomology
from homology.dsg import INCONCLUSIVE, NO_EVASION_CERTIFIED, check_exactness, dsg_criterion
from homology.field import FieldScalar, check_prime, inverse
from homology.reduction import betti_numbers, homology, induced_map
from homology.stacked import build_stacked_complex
from utils.fixture_builder import sheet_return, stacked_cech, teleport_jump, teleport_orbit

PROJECTIVE_PLANE = [(1, 2, 4), (1, 2, 6), (1, 3, 5), (1, 3, 6), (1, 4, 5),
                    (2, 3, 4), (2, 3, 5), (2, 5, 6), (3, 4, 6), (4, 5, 6)]


def _cells(*simplices) -> CellComplex:
    return CellComplex.from_simplicial(SimplicialComplex.from_simplices(simplices))


def _named(triangles):
    return [tuple(f"v{i}" for i in tri) for tri in triangles]


@pytest.mark.parametrize("simplices, expected", [
    ([("a", "b", "c")], [1, 0, 0]),
    ([("a", "b"), ("b", "c"), ("a", "c")], [1, 1]),
    ([("a", "b"), ("b", "c"), ("a", "c"), ("a", "d"), ("d", "e"), ("a", "e")], [1, 2]),
    ([("a", "b", "c"), ("a", "b", "d"), ("a", "c", "d"), ("b", "c", "d")], [1, 0, 1]),
    ([("a",), ("b",), ("c", "d")], [3, 0]),
])
def test_betti_numbers_of_small_spaces(simplices, expected):
    assert betti_numbers(_cells(*simplices)) == expected


@pytest.mark.parametrize("p, expected", [(2, [1, 1, 1]), (3, [1, 0, 0]), (5, [1, 0, 0])])
def test_projective_plane_depends_on_the_field(p, expected):
    cells = _cells(*_named(PROJECTIVE_PLANE))
    assert betti_numbers(cells, p) == expected


@pytest.mark.parametrize("method", ["dense", "sparse"])
def test_reduction_methods_agree(method):
    cells = _cells(*_named(PROJECTIVE_PLANE))
    assert betti_numbers(cells, 2, method) == [1, 1, 1]


def test_boundary_of_boundary_vanishes():
    cells = _cells(("a", "b", "c", "d"), ("c", "d", "e"))
    for p in (2, 3, 7):
        cells.check(p)
    assert cells.euler_characteristic() == 1


def test_inconsistent_cells_are_refused():
    cells = CellComplex()
    cells.add_cell("x", 0)
    with pytest.raises(MalformedComplexError):
        cells.add_cell("e", 1, {"y": 1})
    with pytest.raises(MalformedComplexError):
        cells.add_cell("x", 0)
    cells.add_cell("y", 0)
    cells.add_cell("e", 1, {"x": -1, "y": 1})
    cells.add_cell("f", 1, {"x": -1, "y": 1})
    cells.add_cell("bad", 2, {"e": 1})
    with pytest.raises(MalformedComplexError):
        cells.check(2)


def test_subcomplexes_must_be_closed():
    cells = _cells(("a", "b", "c"))
    with pytest.raises(MalformedComplexError):
        cells.subcomplex([("a",), ("b",), ("a", "b", "c")])
    edge = cells.subcomplex([("a",), ("b",), ("a", "b")])
    assert betti_numbers(edge, 2) == [1, 0]


def test_relative_homology_of_an_edge_rel_endpoints():
    cells = CellComplex()
    cells.add_cell("x", 0, marked=True)
    cells.add_cell("y", 0, marked=True)
    cells.add_cell("e", 1, {"x": -1, "y": 1})
    assert homology(cells, 1, 3, relative=True).betti == 1
    assert homology(cells, 0, 3, relative=True).betti == 0


def test_inclusion_of_circle_into_disk_kills_the_loop():
    circle = _cells(("a", "b"), ("b", "c"), ("a", "c"))
    disk = _cells(("a", "b", "c"))
    m = induced_map(circle, disk, 1, 2)
    assert m.shape == (0, 1)
    m0 = induced_map(circle, disk, 0, 3)
    assert m0.tolist() == [[1]]


def test_cohomology_matches_homology_ranks():
    cx = SimplicialComplex.from_simplices(_named(PROJECTIVE_PLANE))
    assert [cohomology(cx, j, 2).betti for j in range(3)] == [1, 1, 1]
    assert [cohomology(cx, j, 3).betti for j in range(3)] == [1, 0, 0]


def test_field_arithmetic():
    assert inverse(3, 7) == 5
    a, b = FieldScalar(3, 7), FieldScalar(5, 7)
    assert (a * b).value == 1
    assert (a / b).value == (3 * 3) % 7
    with pytest.raises(ValueError):
        check_prime(4)
    with pytest.raises(ValueError):
        a + FieldScalar(1, 5)


def test_stacked_complex_is_a_chain_complex():
    sc = build_stacked_complex(build_stream(stacked_cech(), "cech"))
    sc.cells.check(2)
    assert sc.n == 1
    assert homology(sc.cells, 0, 2).betti == 1
    with pytest.raises(EmptyFenceError):
        dsg_criterion(sc)


@pytest.mark.parametrize("builder, expected", [
    (teleport_jump, NO_EVASION_CERTIFIED),
    (sheet_return, NO_EVASION_CERTIFIED),
    (teleport_orbit, INCONCLUSIVE),
])
def test_dsg_on_ring_fixtures(builder, expected):
    verdict, result = run_dsg(builder())
    assert verdict.verdict == expected
    assert verdict.necessary_only
    assert result.connecting_rank == result.kernel_rank


def test_inexact_pair_is_refused(monkeypatch):
    with pytest.raises(MalformedComplexError):
        check_exactness(1, 0)
    check_exactness(2, 2)
    # a zero inclusion puts the whole fence class in the kernel while the connecting map stays zero
    monkeypatch.setattr("homology.dsg.induced_map",
                        lambda source, target, j, p, source_basis: np.zeros((1, source_basis.betti), dtype=np.int64))
    sc = build_stacked_complex(build_stream(teleport_orbit(), "cech"))
    with pytest.raises(MalformedComplexError):
        dsg_criterion(sc)
