"""Combinatorics of the good and robust weight spaces.

The good weights deformation-retract onto order types, which gives the
wedge count as a product over levels; the complement is stratified by
height data (ordered partitions of the cells per level).  Top cells of
that stratification carry one tied pair per level; a small transversal
cube around a generic center resolves the ties and its boundary is a
good protocol whose pairing decides whether the cell is essential.
"""

import itertools
import math
from dataclasses import dataclass

from . import ratlin
from .complex_core import CwComplex, gap_complex
from .errors import EpsilonTooLarge
from .protocol import WeightPoint, cube_boundary_protocol, is_good
from .topo_hyper import hypercurrent_cochain, hypercurrent_homology

__all__ = [
    "HeightData",
    "DiscriminantCellReport",
    "good_summand_count",
    "enumerate_top_discriminant_cells",
    "height_of_weights",
    "transversal_sphere",
    "classify_cell",
    "robust_counts",
]


@dataclass(frozen=True)
class HeightData:
    """Per level, an ordered partition of the cells (blocks listed from
    lowest to highest weight)."""

    p: int
    q: int
    blocks: tuple   # blocks[j-p] = tuple of tuples of cell names

    def level(self, j):
        return self.blocks[j - self.p]

    @property
    def dimension(self):
        return sum(len(lvl) for lvl in self.blocks)

    @property
    def is_top(self):
        for lvl in self.blocks:
            sizes = sorted(len(b) for b in lvl)
            if sizes != [1] * (len(lvl) - 1) + [2]:
                return False
        return True


@dataclass(frozen=True)
class DiscriminantCellReport:
    height: HeightData
    dimension: int
    current_matrix: tuple   # rows indexed by degree-q classes, columns by degree-p classes
    essential: bool


def good_summand_count(x: CwComplex, p, q):
    """(product of (n_j! - 1), contractible flag); a level with at most
    one cell collapses the whole good weight space."""
    if any(x.n_cells(j) <= 1 for j in range(p, q + 1)):
        return 0, True
    out = 1
    for j in range(p, q + 1):
        out *= math.factorial(x.n_cells(j)) - 1
    return out, False


def enumerate_top_discriminant_cells(x: CwComplex, p, q):
    """All height data with exactly one two-block per level; there are
    prod_j C(n_j, 2) (n_j - 1)! of them."""
    per_level = []
    for j in range(p, q + 1):
        cells = x.cells[j]
        level_options = []
        for pair in itertools.combinations(cells, 2):
            rest = [c for c in cells if c not in pair]
            blocks = [tuple(pair)] + [(c,) for c in rest]
            for order in itertools.permutations(blocks):
                level_options.append(tuple(order))
        per_level.append(level_options)
    out = []
    for combo in itertools.product(*per_level):
        out.append(HeightData(p=p, q=q, blocks=tuple(combo)))
    return out


def height_of_weights(x: CwComplex, p, q, wp: WeightPoint):
    """The height data induced by a weight point: cells tie iff their
    weights are equal, blocks ordered by increasing weight."""
    blocks = []
    for j in range(p, q + 1):
        vals = {}
        for cell, w in zip(x.cells[j], wp.level(j)):
            vals.setdefault(w, []).append(cell)
        lvl = tuple(tuple(vals[w]) for w in sorted(vals))
        blocks.append(lvl)
    return HeightData(p=p, q=q, blocks=blocks if isinstance(blocks, tuple) else tuple(blocks))


def _center_weights(x: CwComplex, cell: HeightData, rank_value=None):
    """Block ranks as weights (integers by default); tied pair equal."""
    if rank_value is None:
        rank_value = float
    centers = []
    for j in range(cell.p, cell.q + 1):
        vals = {}
        for rank, block in enumerate(cell.level(j)):
            for nm in block:
                vals[nm] = float(rank_value(rank))
        centers.append(tuple(vals[nm] for nm in x.cells[j]))
    return centers


def transversal_sphere(x: CwComplex, p, q, cell: HeightData, eps=0.25, rank_value=None):
    """A good protocol on the boundary of the transversal cube around a
    center realizing the height data: the later member of each level's
    tied pair is perturbed by +-eps along the corresponding cube axis."""
    if not cell.is_top:
        raise ValueError("transversal spheres are built over top cells only")
    if not eps > 0:
        raise EpsilonTooLarge("eps must be positive")
    centers = _center_weights(x, cell, rank_value)
    min_gap = None
    for j in range(p, q + 1):
        ranks = sorted(set(centers[j - p]))
        for a, b in zip(ranks, ranks[1:]):
            d = b - a
            min_gap = d if min_gap is None else min(min_gap, d)
    if min_gap is not None and not eps < min_gap / 2:
        raise EpsilonTooLarge(f"eps = {eps} is not below half the center gap {min_gap}")
    gap = gap_complex(x, p, q)
    perturbed = []
    for j in range(p, q + 1):
        pair = next(b for b in cell.level(j) if len(b) == 2)
        later = max(pair, key=lambda nm: x.cell_index(j, nm))
        perturbed.append(x.cell_index(j, later))

    def corner_weight(corner):
        vals = []
        for j in range(p, q + 1):
            row = list(centers[j - p])
            row[perturbed[j - p]] += eps * corner[j - p]
            vals.append(tuple(row))
        return WeightPoint(p, q, tuple(vals))

    proto = cube_boundary_protocol(gap, corner_weight)
    ok, offender = is_good(proto)
    if not ok:
        raise EpsilonTooLarge(f"resolved protocol is not good at {offender}")
    return proto


def classify_cell(x: CwComplex, p, q, cell: HeightData, eps=0.25, rank_value=None):
    """Pair the transversal sphere against every degree-p class; the
    cell is essential iff some value is nonzero."""
    proto = transversal_sphere(x, p, q, cell, eps, rank_value)
    gap = proto.gap
    cochain = hypercurrent_cochain(proto)
    cols = []
    nclasses = gap.parent_hp.betti
    for k in range(nclasses):
        unit = [1 if i == k else 0 for i in range(nclasses)]
        coords, _ = hypercurrent_homology(proto, proto.fundamental_cycle, unit, cochain=cochain)
        cols.append(coords)
    mat = ratlin.transpose(cols) if cols else []
    essential = any(v != 0 for row in mat for v in row)
    return DiscriminantCellReport(
        height=cell,
        dimension=cell.dimension,
        current_matrix=tuple(tuple(row) for row in mat),
        essential=essential,
    )


def robust_counts(x: CwComplex, p, q, eps=0.25):
    """(c, u, d): the wedge count of the good weights, the number of
    inessential top cells, and their difference."""
    c, contractible = good_summand_count(x, p, q)
    if contractible:
        return 0, 0, 0
    u = 0
    for cell in enumerate_top_discriminant_cells(x, p, q):
        report = classify_cell(x, p, q, cell, eps)
        if not report.essential:
            u += 1
    return c, u, c - u
