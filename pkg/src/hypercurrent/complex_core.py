"""Finite CW complexes and exact chain-complex algebra.

A complex is a list of cell names per dimension plus integer boundary
matrices D_j (rows indexed by (j-1)-cells, columns by j-cells).  All
homology here is rational and computed by exact elimination; integer
torsion goes through Smith normal form.  The gap machinery produces the
shifted complex whose degree-j piece is the span of the (j+p)-cells of
the pair (q-skeleton, (p-1)-skeleton).
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

from . import ratlin
from .errors import (
    BoundarySquareNonzero,
    Disconnected,
    GapViolated,
    NotPositivelyAcyclic,
    ParseError,
)
from .ratlin import Mat, smith_normal_form, torsion_order  # noqa: F401  (re-exported)

__all__ = [
    "CwComplex",
    "GapComplex",
    "GradedOperator",
    "HomologyData",
    "Contraction",
    "load_complex",
    "loads_complex",
    "dumps_complex",
    "sphere_complex",
    "sphere_wedge_complex",
    "collapsed_sphere_complex",
    "torsion_complex",
    "betti",
    "verify_gap",
    "gap_complex",
    "torsion_order",
    "smith_normal_form",
    "contraction",
    "eth",
]


def _mm(a, b, rows, colns):
    """Matrix product with an explicit result shape, so degenerate
    (zero-dimensional) factors collapse to a correctly shaped zero."""
    if rows == 0 or colns == 0:
        return ratlin.zeros(rows, colns)
    if not a or not a[0] or not b or not b[0]:
        return ratlin.zeros(rows, colns)
    return ratlin.matmul(a, b)


@dataclass(frozen=True)
class CwComplex:
    """Cell names per dimension plus integer boundary matrices."""

    name: str
    cells: tuple          # cells[j] = tuple of j-cell names
    boundary: tuple       # boundary[j-1] = D_j for 1 <= j <= dim

    @property
    def dim(self):
        return len(self.cells) - 1

    def n_cells(self, j):
        if j < 0 or j > self.dim:
            return 0
        return len(self.cells[j])

    def d(self, j):
        """Boundary matrix D_j : C_j -> C_{j-1}; zero-shaped outside range."""
        if 1 <= j <= self.dim:
            return self.boundary[j - 1]
        return ratlin.zeros(self.n_cells(j - 1), self.n_cells(j))

    def cell_index(self, j, name):
        return self.cells[j].index(name)


def _validate(name, cells, boundary):
    dim = len(cells) - 1
    if len(boundary) != max(dim, 0):
        raise ParseError(f"{name}: expected {dim} boundary matrices, got {len(boundary)}")
    for j in range(1, dim + 1):
        d = boundary[j - 1]
        if len(d) != len(cells[j - 1]) or any(len(row) != len(cells[j]) for row in d):
            raise ParseError(f"{name}: D_{j} shape does not match cell counts")
    for j in range(2, dim + 1):
        nlow = len(cells[j - 2])
        prod = _mm(boundary[j - 2], boundary[j - 1], nlow, len(cells[j]))
        for r, row in enumerate(prod):
            for c, v in enumerate(row):
                if v != 0:
                    raise BoundarySquareNonzero(j, r, c, v)
    x = CwComplex(name, tuple(tuple(c) for c in cells), tuple(boundary))
    if betti(x, 0) != 1:
        raise Disconnected(f"{name}: beta_0 = {betti(x, 0)} != 1")
    return x


def loads_complex(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    return _from_doc(doc)


def _from_doc(doc):
    try:
        name = doc["name"]
        cells = [list(c) for c in doc["cells"]]
        raw = doc["boundary"]
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad complex document: {exc}") from exc
    boundary = []
    for mat in raw:
        for row in mat:
            for v in row:
                if not isinstance(v, int) or isinstance(v, bool):
                    raise ParseError(f"non-integer boundary entry {v!r}")
        boundary.append(ratlin.from_rows(mat))
    return _validate(name, cells, boundary)


def load_complex(path):
    """Read and validate a complex-description JSON document."""
    with open(path, "r", encoding="utf-8") as fh:
        return loads_complex(fh.read())


def dumps_complex(x: CwComplex):
    doc = {
        "name": x.name,
        "cells": [list(c) for c in x.cells],
        "boundary": [[[int(v) for v in row] for row in d] for d in x.boundary],
    }
    return json.dumps(doc, indent=1, sort_keys=True)


def sphere_complex(q):
    """q-sphere with two hemispherical cells in each dimension 0..q."""
    if q < 1:
        raise ValueError("q must be >= 1")
    cells = [(f"e{j}+", f"e{j}-") for j in range(q + 1)]
    boundary = []
    for j in range(1, q + 1):
        s = Fraction((-1) ** j)
        boundary.append([[Fraction(1), s], [s, Fraction(1)]])
    return _validate(f"sphere{q}", cells, boundary)


def sphere_wedge_complex(q):
    """Same (q-1)-skeleton as the q-sphere; the two top cells are
    attached by the identity map and by a constant map."""
    if q < 1:
        raise ValueError("q must be >= 1")
    base = sphere_complex(q)
    cells = [tuple(c) for c in base.cells[:q]] + [(f"e{q}id", f"e{q}const")]
    s = Fraction((-1) ** q)
    top = [[Fraction(1), Fraction(0)], [s, Fraction(0)]]
    boundary = [ratlin.copy(base.boundary[j]) for j in range(q - 1)] + [top]
    return _validate(f"wedge{q}", cells, boundary)


def collapsed_sphere_complex(q):
    """The two-cells-per-dimension q-sphere with its 0-skeleton collapsed
    to a point: one vertex, two cells in each dimension 1..q, gap [1,q]."""
    if q < 2:
        raise ValueError("q must be >= 2")
    base = sphere_complex(q)
    cells = [("pt",)] + [tuple(base.cells[j]) for j in range(1, q + 1)]
    boundary = [ratlin.zeros(1, 2)]
    for j in range(2, q + 1):
        boundary.append(ratlin.copy(base.boundary[j - 1]))
    return _validate(f"collapsed_sphere{q}", cells, boundary)


def torsion_complex():
    """One vertex, one edge, and two 2-cells attached with degrees 2 and 3."""
    cells = [("v",), ("a",), ("u", "w")]
    boundary = [ratlin.zeros(1, 1), [[Fraction(2), Fraction(3)]]]
    return _validate("TOR", cells, boundary)


def betti(x: CwComplex, j):
    """Rational Betti number via exact rank computation."""
    if j < 0 or j > x.dim:
        return 0
    return x.n_cells(j) - ratlin.rank(x.d(j)) - ratlin.rank(x.d(j + 1))


def verify_gap(x: CwComplex, p, q):
    """True iff beta_j(X) = 0 strictly between p and q; on failure the
    second component is the smallest violating degree."""
    if not (0 <= p <= q):
        raise ValueError("need 0 <= p <= q")
    for j in range(p + 1, q):
        if betti(x, j) != 0:
            return False, j
    return True, None


@dataclass(frozen=True)
class HomologyData:
    """Canonical cycle/boundary/homology bases for one degree.

    Columns of hbasis are the chosen representative cycles: the echelon
    completion of the boundary basis inside the cycle basis, scanning in
    the given cell order.  harmonic is the orthogonal projection onto
    the complement of the boundaries inside the cycles (standard inner
    product).
    """

    dim: int
    cycles: Mat
    bounds: Mat
    hbasis: Mat
    harmonic: Mat

    @property
    def betti(self):
        return len(self.hbasis[0]) if self.hbasis else 0

    def class_of(self, chain):
        """Coordinates of a cycle's class in the chosen homology basis."""
        nb = len(self.bounds[0]) if self.bounds else 0
        basis = ratlin.hstack(self.bounds, self.hbasis)
        coeffs = ratlin.solve(basis, list(chain))
        if coeffs is None:
            raise ValueError("chain is not a cycle (class undefined)")
        return coeffs[nb:]

    def representative(self, coords):
        return ratlin.matvec(self.hbasis, list(coords))


def _homology_data(n, d_in, d_out):
    """Subspace data in a degree of dimension n; d_out leaves the degree
    (may be None for the zero map), d_in arrives into it (may be None)."""
    if d_out is None or not d_out or not d_out[0]:
        cycles = ratlin.identity(n)
    else:
        cycles = ratlin.nullspace(d_out)
    if d_in is None or not d_in or not d_in[0]:
        bounds = ratlin.zeros(n, 0)
    else:
        bounds = ratlin.column_echelon_basis(d_in)
    aug = ratlin.hstack(bounds, cycles)
    nb = len(bounds[0]) if bounds else 0
    pivots = ratlin.column_space_pivots(aug) if aug and aug[0] else []
    extra = [j - nb for j in pivots if j >= nb]
    hbasis = ratlin.cols(cycles, extra)
    harmonic = ratlin.sub(
        ratlin.projector_onto_columns(cycles), ratlin.projector_onto_columns(bounds)
    )
    return HomologyData(dim=n, cycles=cycles, bounds=bounds, hbasis=hbasis, harmonic=harmonic)


def homology_data(x: CwComplex, j):
    return _homology_data(x.n_cells(j), x.d(j + 1), x.d(j) if j >= 1 else None)


@dataclass(frozen=True)
class GapComplex:
    """Shifted rational complex of the pair (q-skeleton, (p-1)-skeleton).

    Degree j holds the (j+p)-cells of the parent for 0 <= j <= q-p;
    dbar[j] is the boundary from degree j to degree j-1.
    """

    parent: CwComplex
    p: int
    q: int
    dbar: tuple
    homology: tuple      # HomologyData per degree 0..q-p
    hp_embed: Mat        # H_p(parent) -> H_0(shifted), chosen bases
    hq_project: Mat      # H_{q-p}(shifted) -> H_q(parent)
    parent_hp: HomologyData
    parent_hq: HomologyData

    @property
    def top(self):
        return self.q - self.p

    def dim_at(self, j):
        if j < 0 or j > self.top:
            return 0
        return self.parent.n_cells(j + self.p)

    def d(self, j):
        """Shifted boundary, degree j -> j-1; zero-shaped outside (0, top]."""
        if 1 <= j <= self.top:
            return self.dbar[j]
        return ratlin.zeros(self.dim_at(j - 1), self.dim_at(j))

    def cells_at(self, j):
        return self.parent.cells[j + self.p] if 0 <= j <= self.top else ()


def gap_complex(x: CwComplex, p, q):
    ok, j = verify_gap(x, p, q)
    if not ok:
        raise GapViolated(f"beta_{j}({x.name}) != 0 inside [{p},{q}]")
    if q > x.dim:
        raise GapViolated(f"q={q} exceeds dim {x.name} = {x.dim}")
    top = q - p
    dbar = [ratlin.zeros(0, x.n_cells(p))]
    for jj in range(1, top + 1):
        dbar.append(ratlin.copy(x.d(jj + p)))
    homology = []
    for jj in range(top + 1):
        d_out = dbar[jj] if jj >= 1 else None
        d_in = dbar[jj + 1] if jj + 1 <= top else None
        homology.append(_homology_data(x.n_cells(jj + p), d_in, d_out))

    parent_hp = homology_data(x, p)
    parent_hq = homology_data(x, q)
    hp_cols = [homology[0].class_of(ratlin.col(parent_hp.hbasis, k)) for k in range(parent_hp.betti)]
    hp_embed = ratlin.transpose(hp_cols) if hp_cols else ratlin.zeros(homology[0].betti, 0)
    if top == 0:
        # every chain is a degree-0 class of the shifted complex, so the
        # projection onto degree-q homology only exists on actual cycles;
        # pairings take classes in the parent directly in this case
        hq_project = None
    else:
        hq_cols = [parent_hq.class_of(ratlin.col(homology[top].hbasis, k)) for k in range(homology[top].betti)]
        hq_project = ratlin.transpose(hq_cols) if hq_cols else ratlin.zeros(parent_hq.betti, 0)

    if hp_cols and ratlin.rank(hp_embed) != parent_hp.betti:
        raise GapViolated("embedding of degree-p homology is not injective")
    if top > 0 and parent_hq.betti and ratlin.rank(hq_project) != parent_hq.betti:
        raise GapViolated("projection onto degree-q homology is not surjective")
    return GapComplex(
        parent=x,
        p=p,
        q=q,
        dbar=tuple(dbar),
        homology=tuple(homology),
        hp_embed=hp_embed,
        hq_project=hq_project,
        parent_hp=parent_hp,
        parent_hq=parent_hq,
    )


@dataclass
class GradedOperator:
    """Degree-n operator on a gap complex: one block per source degree.

    blocks[j] maps degree j to degree j+n; missing blocks are zero.
    kind is 'rational' (Fraction matrices) or 'float' (numpy arrays).
    """

    degree: int
    blocks: dict = field(default_factory=dict)
    kind: str = "rational"

    def block(self, gap: GapComplex, j):
        if j in self.blocks:
            return self.blocks[j]
        rows, colns = gap.dim_at(j + self.degree), gap.dim_at(j)
        if self.kind == "rational":
            return ratlin.zeros(rows, colns)
        import numpy as np

        return np.zeros((rows, colns))

    def apply(self, gap: GapComplex, j, chain):
        """Apply to a degree-j chain, returning a degree-(j+n) chain."""
        blk = self.block(gap, j)
        if self.kind == "rational":
            if gap.dim_at(j + self.degree) == 0:
                return []
            return ratlin.matvec(blk, list(chain))
        import numpy as np

        return np.asarray(blk) @ np.asarray(chain)


def eth(f: GradedOperator, gap: GapComplex):
    """Boundary in the endomorphism complex: d f - (-1)^n f d."""
    n = f.degree
    sign = (-1) ** n
    out = {}
    if f.kind == "rational":
        for j in range(gap.top + 1):
            rows = gap.dim_at(j + n - 1)
            term = _mm(gap.d(j + n), f.block(gap, j), rows, gap.dim_at(j))
            if j >= 1:
                t2 = _mm(f.block(gap, j - 1), gap.d(j), rows, gap.dim_at(j))
                term = ratlin.sub(term, ratlin.scale(t2, sign))
            out[j] = term
        return GradedOperator(degree=n - 1, blocks=out, kind="rational")
    import numpy as np

    for j in range(gap.top + 1):
        rows = gap.dim_at(j + n - 1)
        term = np.zeros((rows, gap.dim_at(j)))
        if rows:
            term = term + ratlin.to_float(gap.d(j + n)) @ np.asarray(f.block(gap, j))
            if j >= 1:
                term = term - sign * (np.asarray(f.block(gap, j - 1)) @ ratlin.to_float(gap.d(j)))
        out[j] = term
    return GradedOperator(degree=n - 1, blocks=out, kind="float")


@dataclass(frozen=True)
class Contraction:
    """Degree +1 operator h with d h + h d = id in positive degrees and
    id minus the harmonic projection in degree 0."""

    dims: tuple
    h: tuple      # h[j] : degree j -> j+1
    pi0: Mat

    def apply(self, j, chain):
        if j < 0 or j >= len(self.dims) - 1:
            return []
        return ratlin.matvec(self.h[j], list(chain))


def contraction(dims, boundaries):
    """Contracting homotopy of a bounded-below rational complex.

    dims[j] is the dimension in degree j; boundaries[j] maps degree j to
    degree j-1 for 1 <= j <= top.  Homology must vanish in positive
    degrees.  h is the standard-inner-product pseudoinverse of the
    boundary, hence rational and deterministic.
    """
    top = len(dims) - 1
    for j in range(1, top + 1):
        z = dims[j] - ratlin.rank(boundaries[j])
        b = ratlin.rank(boundaries[j + 1]) if j + 1 <= top else 0
        if z != b:
            raise NotPositivelyAcyclic(f"H_{j} has dimension {z - b}")
    hs = []
    for j in range(top):
        if dims[j + 1] == 0 or dims[j] == 0:
            hs.append(ratlin.zeros(dims[j + 1], dims[j]))
        else:
            hs.append(ratlin.pinv(boundaries[j + 1]))
    hs.append(ratlin.zeros(0, dims[top]))
    if top >= 1 and dims[0] and boundaries[1] and boundaries[1][0]:
        pi0 = ratlin.sub(
            ratlin.identity(dims[0]), ratlin.projector_onto_columns(boundaries[1])
        )
    else:
        pi0 = ratlin.identity(dims[0])
    return Contraction(dims=tuple(dims), h=tuple(hs), pi0=pi0)
