import json

import pytest

from hypercurrent.complex_core import (
    loads_complex,
    sphere_complex,
    sphere_wedge_complex,
    torsion_complex,
)
from hypercurrent.errors import EpsilonTooLarge
from hypercurrent.protocol import WeightPoint, is_good, smallness
from hypercurrent.weight_space import (
    DiscriminantCellReport,
    classify_cell,
    enumerate_top_discriminant_cells,
    good_summand_count,
    height_of_weights,
    robust_counts,
    transversal_sphere,
)


def path_complex():
    return loads_complex(
        json.dumps(
            {
                "name": "path3",
                "cells": [["x", "y", "z"], ["xy", "yz"]],
                "boundary": [[[-1, 0], [1, -1], [0, 1]]],
            }
        )
    )


# --- counting -------------------------------------------------------------------


@pytest.mark.parametrize("q", [1, 2, 3])
def test_sphere_summand_count(q):
    c, contractible = good_summand_count(sphere_complex(q), 0, q)
    assert (c, contractible) == (1, False)


def test_path_graph_count():
    c, contractible = good_summand_count(path_complex(), 0, 1)
    assert (c, contractible) == (5, False)


def test_single_cell_level_contractible():
    c, contractible = good_summand_count(torsion_complex(), 0, 2)
    assert c == 0 and contractible


# --- top-cell enumeration ----------------------------------------------------------


def test_sphere_single_top_cell():
    cells = enumerate_top_discriminant_cells(sphere_complex(2), 0, 2)
    assert len(cells) == 1
    cell = cells[0]
    assert cell.is_top
    assert cell.dimension == 3  # one block per level
    for j in range(3):
        assert cell.level(j) == ((f"e{j}+", f"e{j}-"),)


def test_path_graph_top_cells():
    cells = enumerate_top_discriminant_cells(path_complex(), 0, 1)
    # 3 pairs x 2 block orders at level 0, 1 x 1 at level 1
    assert len(cells) == 6
    for cell in cells:
        assert cell.is_top
        assert cell.dimension == 2 + 1


def test_dimension_formula():
    x = sphere_complex(3)
    for cell in enumerate_top_discriminant_cells(x, 0, 3):
        assert cell.dimension == sum(x.n_cells(j) - 1 for j in range(4))


def test_height_of_weights_roundtrip():
    x = sphere_complex(1)
    wp = WeightPoint(0, 1, ((0.5, 0.5), (2.0, 1.0)))
    h = height_of_weights(x, 0, 1, wp)
    assert h.level(0) == (("e0+", "e0-"),)
    assert h.level(1) == (("e1-",), ("e1+",))


# --- transversal spheres --------------------------------------------------------------


def test_transversal_sphere_is_good_and_square_shaped():
    x = sphere_complex(1)
    cell = enumerate_top_discriminant_cells(x, 0, 1)[0]
    proto = transversal_sphere(x, 0, 1, cell)
    assert is_good(proto)[0]
    assert len(proto.simplices_of_dim(1)) == 4
    cert = smallness(proto)
    ks = sorted(cert.k[s] for s in proto.simplices_of_dim(1))
    assert ks == [0, 0, 1, 1]  # opposite pairs of edges pin opposite levels


def test_transversal_sphere_cube_pattern():
    x = sphere_complex(2)
    cell = enumerate_top_discriminant_cells(x, 0, 2)[0]
    proto = transversal_sphere(x, 0, 2, cell)
    assert is_good(proto)[0]
    assert len(proto.simplices_of_dim(2)) == 12
    cert = smallness(proto)
    assert sorted({cert.k[s] for s in proto.simplices_of_dim(2)}) == [0, 1, 2]


def test_eps_too_large():
    # needs a level with more than one block, so the center has a gap
    x = path_complex()
    cell = enumerate_top_discriminant_cells(x, 0, 1)[0]
    with pytest.raises(EpsilonTooLarge):
        transversal_sphere(x, 0, 1, cell, eps=0.5)
    with pytest.raises(EpsilonTooLarge):
        transversal_sphere(x, 0, 1, cell, eps=0.0)


def test_transversal_good_for_all_fixture_cells():
    for x, p, q in [(sphere_complex(1), 0, 1), (sphere_wedge_complex(2), 0, 2), (path_complex(), 0, 1)]:
        for cell in enumerate_top_discriminant_cells(x, p, q):
            proto = transversal_sphere(x, p, q, cell)
            assert is_good(proto)[0]


# --- classification ---------------------------------------------------------------------


@pytest.mark.parametrize("q", [1, 2])
def test_sphere_essential(q):
    x = sphere_complex(q)
    c, u, d = robust_counts(x, 0, q)
    assert (c, u, d) == (1, 0, 1)


@pytest.mark.parametrize("q", [1, 2])
def test_wedge_inessential(q):
    y = sphere_wedge_complex(q)
    c, u, d = robust_counts(y, 0, q)
    assert (c, u, d) == (1, 1, 0)


def test_torsion_contractible_counts():
    assert robust_counts(torsion_complex(), 0, 2) == (0, 0, 0)


def test_classification_report_matrix():
    x = sphere_complex(2)
    cell = enumerate_top_discriminant_cells(x, 0, 2)[0]
    report = classify_cell(x, 0, 2, cell)
    assert isinstance(report, DiscriminantCellReport)
    assert report.essential
    assert len(report.current_matrix) == 1 and len(report.current_matrix[0]) == 1
    assert abs(report.current_matrix[0][0]) == 1


def test_classification_eps_independent():
    x = sphere_complex(1)
    cell = enumerate_top_discriminant_cells(x, 0, 1)[0]
    r1 = classify_cell(x, 0, 1, cell, eps=0.25)
    r2 = classify_cell(x, 0, 1, cell, eps=0.125)
    assert r1.current_matrix == r2.current_matrix


def test_classification_center_choice_independent():
    # scaling the center block ranks leaves the pairing matrix unchanged
    x = sphere_complex(2)
    cell = enumerate_top_discriminant_cells(x, 0, 2)[0]
    r1 = classify_cell(x, 0, 2, cell)
    r2 = classify_cell(x, 0, 2, cell, rank_value=lambda r: 3.0 * r + 1.0)
    assert r1.current_matrix == r2.current_matrix
    y = path_complex()
    for cell in enumerate_top_discriminant_cells(y, 0, 1)[:2]:
        a = classify_cell(y, 0, 1, cell)
        b = classify_cell(y, 0, 1, cell, eps=0.1, rank_value=lambda r: 2.0 * r)
        assert a.current_matrix == b.current_matrix
