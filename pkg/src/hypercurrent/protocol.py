"""Parameter spaces and piecewise-affine weight protocols.

A protocol assigns a weight point (one real number per cell in the gap
levels) to every vertex of an oriented simplicial parameter space and
interpolates affinely over simplices.  Because the data is affine per
simplex, injectivity of a level over a closed simplex is decided
exactly by strict sign agreement of pairwise differences at vertices;
no sampling is involved.

The same vertex-weight machinery also drives the regular-CW cube
domain used by the cellular variant of the current construction.
"""

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction

from . import ratlin
from .complex_core import GapComplex, dumps_complex, gap_complex, load_complex, \
    loads_complex, sphere_complex, sphere_wedge_complex, collapsed_sphere_complex, \
    torsion_complex
from .errors import (
    BadCoordinates,
    LevelMismatch,
    NonpositiveBeta,
    NotClosedUnderFaces,
    ParseError,
)

__all__ = [
    "WeightPoint",
    "SimplicialProtocol",
    "SmallnessCertificate",
    "CubeCwDomain",
    "load_protocol",
    "loads_protocol",
    "dumps_protocol",
    "weights_at",
    "smallness",
    "is_good",
    "scale",
    "cube_protocol",
    "cube_sphere_protocol",
    "square_protocol",
    "figure_protocols",
    "subdivide",
    "simplex_faces",
]


@dataclass(frozen=True)
class WeightPoint:
    """One point of the weight space: a real vector per level p..q."""

    p: int
    q: int
    values: tuple  # values[j-p] = tuple of floats indexed like the j-cells

    def level(self, j):
        if not (self.p <= j <= self.q):
            raise LevelMismatch(f"level {j} outside [{self.p},{self.q}]")
        return self.values[j - self.p]

    def combine(self, other, t):
        """Affine combination (1-t)*self + t*other."""
        vals = tuple(
            tuple((1 - t) * a + t * b for a, b in zip(va, vb))
            for va, vb in zip(self.values, other.values)
        )
        return WeightPoint(self.p, self.q, vals)

    def scaled(self, c):
        return WeightPoint(
            self.p, self.q, tuple(tuple(c * v for v in row) for row in self.values)
        )


def _affine(points, coeffs):
    p, q = points[0].p, points[0].q
    vals = []
    for lvl in range(q - p + 1):
        n = len(points[0].values[lvl])
        vals.append(tuple(sum(c * pt.values[lvl][k] for c, pt in zip(coeffs, points)) for k in range(n)))
    return WeightPoint(p, q, tuple(vals))


def simplex_faces(key):
    """Codimension-one faces of a sorted vertex tuple with their signs."""
    return [(((-1) ** m), key[:m] + key[m + 1 :]) for m in range(len(key))]


def _closure(simplices):
    seen = set()
    stack = [tuple(s) for s in simplices]
    while stack:
        s = stack.pop()
        if s in seen:
            continue
        seen.add(s)
        if len(s) > 1:
            for _, f in simplex_faces(s):
                stack.append(f)
    return sorted(seen, key=lambda s: (len(s), s))


@dataclass(frozen=True)
class SimplicialProtocol:
    """Oriented simplicial parameter space with a weight point per vertex."""

    gap: GapComplex
    vertex_ids: tuple            # vertex index -> id string
    vertex_weights: tuple        # vertex index -> WeightPoint
    simplices: tuple             # all faces, sorted vertex-index tuples
    orientation: dict = field(default_factory=dict)        # top key -> +-1
    fundamental_cycle: dict = field(default_factory=dict)  # key -> int coeff

    # -- the parameter-domain interface shared with CubeCwDomain --

    def all_cells(self):
        return self.simplices

    def dim_of(self, key):
        return len(key) - 1

    def boundary_of(self, key):
        if len(key) == 1:
            return []
        return simplex_faces(key)

    def vertices_of(self, key):
        return [(v,) for v in key]

    def weight_of(self, vertex_key):
        return self.vertex_weights[vertex_key[0]]

    # -- conveniences --

    @property
    def dim(self):
        return max(len(s) for s in self.simplices) - 1

    def simplices_of_dim(self, k):
        return [s for s in self.simplices if len(s) == k + 1]

    def index_of(self, vid):
        return self.vertex_ids.index(vid)

    def key_by_ids(self, ids):
        return tuple(sorted(self.index_of(v) for v in ids))


def _validate_protocol(gap, vertex_ids, vertex_weights, simplices, orientation, cycle):
    for wp in vertex_weights:
        if wp.p != gap.p or wp.q != gap.q:
            raise LevelMismatch("weight point levels do not match the gap")
        for j in range(gap.p, gap.q + 1):
            if len(wp.level(j)) != gap.parent.n_cells(j):
                raise LevelMismatch(
                    f"level {j} weight vector has length {len(wp.level(j))}, "
                    f"expected {gap.parent.n_cells(j)}"
                )
            for v in wp.level(j):
                if not math.isfinite(v):
                    raise LevelMismatch("non-finite weight entry")
    nv = len(vertex_ids)
    for s in simplices:
        for v in s:
            if not (0 <= v < nv):
                raise NotClosedUnderFaces(f"simplex {s} references unknown vertex {v}")
        if list(s) != sorted(set(s)):
            raise ParseError(f"simplex {s} is not a strictly sorted vertex tuple")
    closed = _closure(simplices)
    for v in range(nv):
        if (v,) not in closed:
            closed = sorted(closed + [(v,)], key=lambda t: (len(t), t))
    for sign in orientation.values():
        if sign not in (1, -1):
            raise ParseError("orientation signs must be +-1")
    return SimplicialProtocol(
        gap=gap,
        vertex_ids=tuple(vertex_ids),
        vertex_weights=tuple(vertex_weights),
        simplices=tuple(closed),
        orientation=dict(orientation),
        fundamental_cycle=dict(cycle),
    )


# --- documents --------------------------------------------------------------

_BUILTIN_COMPLEXES = {
    "sphere": sphere_complex,
    "sphere_wedge": sphere_wedge_complex,
    "collapsed_sphere": collapsed_sphere_complex,
}


def _resolve_complex(spec, base_dir=None):
    if isinstance(spec, str):
        import os

        path = spec if base_dir is None else os.path.join(base_dir, spec)
        return load_complex(path)
    if isinstance(spec, dict):
        if "path" in spec:
            return _resolve_complex(spec["path"], base_dir)
        if "inline" in spec:
            return loads_complex(json.dumps(spec["inline"]))
        kind = spec.get("builtin")
        if kind == "torsion":
            return torsion_complex()
        if kind in _BUILTIN_COMPLEXES:
            return _BUILTIN_COMPLEXES[kind](int(spec["q"]))
    raise ParseError(f"cannot resolve complex spec {spec!r}")


def loads_protocol(text, base_dir=None):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(str(exc)) from exc
    if "builtin" in doc:
        b = doc["builtin"]
        kind = b.get("type")
        if kind == "cube_sphere":
            return cube_sphere_protocol(int(b["q"]))
        if kind == "cube_wedge":
            q = int(b["q"])
            return cube_protocol(gap_complex(sphere_wedge_complex(q), 0, q))
        if kind == "square":
            return square_protocol()
        raise ParseError(f"unknown builtin protocol {kind!r}")
    try:
        x = _resolve_complex(doc["complex"], base_dir)
        p, q = int(doc["p"]), int(doc["q"])
        gap = gap_complex(x, p, q)
        ids = []
        weights = []
        for v in doc["vertices"]:
            ids.append(v["id"])
            vals = []
            for j in range(p, q + 1):
                row = v["weights"][str(j)]
                vals.append(tuple(float(t) for t in row))
            weights.append(WeightPoint(p, q, tuple(vals)))
    except (KeyError, TypeError) as exc:
        raise ParseError(f"bad protocol document: {exc}") from exc
    id_index = {vid: k for k, vid in enumerate(ids)}
    simplices = []
    orientation = {}
    for s in doc.get("simplices", []):
        try:
            key = tuple(sorted(id_index[v] for v in s["vertices"]))
        except KeyError as exc:
            raise NotClosedUnderFaces(f"simplex references unknown vertex {exc}") from exc
        simplices.append(key)
        if "orientation" in s:
            orientation[key] = int(s["orientation"])
    cycle = {}
    for ckey, coeff in doc.get("cycle", {}).items():
        ids_c = tuple(ckey.split(","))
        try:
            key = tuple(sorted(id_index[v] for v in ids_c))
        except KeyError as exc:
            raise NotClosedUnderFaces(f"cycle references unknown vertex {exc}") from exc
        cycle[key] = int(coeff)
    return _validate_protocol(gap, ids, weights, simplices, orientation, cycle)


def load_protocol(path):
    import os

    with open(path, "r", encoding="utf-8") as fh:
        return loads_protocol(fh.read(), base_dir=os.path.dirname(os.path.abspath(path)))


def dumps_protocol(proto: SimplicialProtocol, complex_ref=None):
    gap = proto.gap
    doc = {
        "complex": complex_ref
        if complex_ref is not None
        else {"inline": json.loads(dumps_complex(gap.parent))},
        "p": gap.p,
        "q": gap.q,
        "vertices": [
            {
                "id": proto.vertex_ids[k],
                "weights": {
                    str(j): list(proto.vertex_weights[k].level(j))
                    for j in range(gap.p, gap.q + 1)
                },
            }
            for k in range(len(proto.vertex_ids))
        ],
        "simplices": [
            {
                "vertices": [proto.vertex_ids[v] for v in s],
                **({"orientation": proto.orientation[s]} if s in proto.orientation else {}),
            }
            for s in proto.simplices
            if len(s) - 1 == proto.dim
        ],
        "cycle": {
            ",".join(proto.vertex_ids[v] for v in key): coeff
            for key, coeff in proto.fundamental_cycle.items()
        },
    }
    return json.dumps(doc, indent=1, sort_keys=True)


# --- evaluation and smallness ------------------------------------------------


def weights_at(proto: SimplicialProtocol, simplex, coords):
    """Affine weight point at barycentric coordinates of a simplex."""
    key = tuple(simplex)
    coords = [float(c) for c in coords]
    if len(coords) != len(key):
        raise BadCoordinates("coordinate count does not match the simplex")
    if any(c < -1e-12 for c in coords) or abs(sum(coords) - 1.0) > 1e-9:
        raise BadCoordinates("barycentric coordinates must be nonnegative and sum to 1")
    pts = [proto.vertex_weights[v] for v in key]
    return _affine(pts, coords)


@dataclass(frozen=True)
class SmallnessCertificate:
    """Per simplex: the set of levels injective on the whole closed
    simplex, and the least such level when one exists."""

    levels: dict      # key -> frozenset of certified levels
    k: dict           # key -> least certified level or None

    def k_of(self, key):
        return self.k[tuple(key)]


def _certified_levels(gap, weight_points):
    """Levels whose weight functions separate every cell pair with one
    strict sign across all the given weight points."""
    out = set()
    for j in range(gap.p, gap.q + 1):
        n = gap.parent.n_cells(j)
        ok = True
        for a in range(n):
            for b in range(a + 1, n):
                diffs = [wp.level(j)[a] - wp.level(j)[b] for wp in weight_points]
                if not (all(d > 0 for d in diffs) or all(d < 0 for d in diffs)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.add(j)
    return out


def smallness(domain) -> SmallnessCertificate:
    """Exact stratification certificate for a protocol or CW domain.

    A level is certified on a cell iff every pairwise weight difference
    has one strict sign at all vertices of the closure; affine functions
    on convex cells attain extrema at vertices, so this is not a
    sampling test.
    """
    gap = domain.gap
    levels = {}
    ks = {}
    for key in domain.all_cells():
        pts = [domain.weight_of(v) for v in domain.vertices_of(key)]
        cert = _certified_levels(gap, pts)
        levels[key] = frozenset(cert)
        ks[key] = min(cert) if cert else None
    return SmallnessCertificate(levels=levels, k=ks)


def is_good(domain):
    """True iff every cell of the domain has an injective level; on
    failure also returns the first offending cell."""
    cert = smallness(domain)
    for key in domain.all_cells():
        if cert.k[key] is None:
            return False, key
    return True, None


def restrict(proto: SimplicialProtocol, keys):
    """Face-closed sub-protocol generated by the given simplices."""
    closed = _closure([tuple(k) for k in keys])
    present = set(closed)
    return SimplicialProtocol(
        gap=proto.gap,
        vertex_ids=proto.vertex_ids,
        vertex_weights=proto.vertex_weights,
        simplices=tuple(closed),
        orientation={k: v for k, v in proto.orientation.items() if k in present},
        fundamental_cycle={k: v for k, v in proto.fundamental_cycle.items() if k in present},
    )


def scale(proto: SimplicialProtocol, beta):
    """Pointwise scalar multiple of all weights; order types unchanged."""
    if not beta > 0:
        raise NonpositiveBeta(f"beta = {beta}")
    return SimplicialProtocol(
        gap=proto.gap,
        vertex_ids=proto.vertex_ids,
        vertex_weights=tuple(wp.scaled(float(beta)) for wp in proto.vertex_weights),
        simplices=proto.simplices,
        orientation=dict(proto.orientation),
        fundamental_cycle=dict(proto.fundamental_cycle),
    )


# --- cube protocols ----------------------------------------------------------


def _freudenthal_facet(axis, side, naxes):
    """Ordered-simplex triangulation of the cube facet {x_axis = side}.

    Yields ordered corner tuples; corners are +-1 vectors of length naxes.
    """
    free = [a for a in range(naxes) if a != axis]
    for perm in itertools.permutations(free):
        corner = [-1] * naxes
        corner[axis] = side
        chain = [tuple(corner)]
        for a in perm:
            corner[a] = 1
            chain.append(tuple(corner))
        yield chain


def _corner_weight(gap, corner, signs):
    p, q = gap.p, gap.q
    vals = []
    for j in range(p, q + 1):
        n = gap.parent.n_cells(j)
        row = [0.0] * n
        row[0] = float(signs[j - p] * corner[j - p])
        vals.append(tuple(row))
    return WeightPoint(p, q, tuple(vals))


def _normalized_kernel_cycle(tops, boundary_of):
    """The +-1 coefficient vector spanning the kernel of the top boundary."""
    faces = sorted({f for t in tops for _, f in boundary_of(t)}, key=repr)
    face_index = {f: i for i, f in enumerate(faces)}
    mat = ratlin.zeros(len(faces), len(tops))
    for cidx, t in enumerate(tops):
        for sign, f in boundary_of(t):
            mat[face_index[f]][cidx] += Fraction(sign)
    kernel = ratlin.nullspace(mat)
    if not kernel or len(kernel[0]) != 1:
        raise ValueError("top-dimensional cycle is not one-dimensional")
    coeffs = [kernel[i][0] for i in range(len(tops))]
    lead = next(c for c in coeffs if c != 0)
    coeffs = [c / abs(lead) for c in coeffs]
    if any(abs(c) != 1 for c in coeffs):
        raise ValueError("fundamental cycle is not a +-1 chain")
    if coeffs[0] < 0:
        coeffs = [-c for c in coeffs]
    return {t: int(c) for t, c in zip(tops, coeffs)}


def cube_boundary_protocol(gap: GapComplex, corner_weight):
    """Boundary-of-cube protocol with an arbitrary corner-to-weights map.

    The parameter space is the boundary of [-1,1]^(q-p+1), each facet
    triangulated into (q-p)! ordered simplices; corner_weight maps a
    +-1 corner tuple to a WeightPoint.  The fundamental cycle comes from
    the one-dimensional kernel of the top boundary.
    """
    n = gap.q - gap.p + 1
    corners = sorted(itertools.product((-1, 1), repeat=n))
    corner_index = {c: i for i, c in enumerate(corners)}
    ids = ["c" + "".join("p" if s > 0 else "m" for s in c) for c in corners]
    weights = [corner_weight(c) for c in corners]
    tops = set()
    for axis in range(n):
        for side in (-1, 1):
            for chain in _freudenthal_facet(axis, side, n):
                tops.add(tuple(sorted(corner_index[c] for c in chain)))
    tops = sorted(tops)
    cycle = _normalized_kernel_cycle(tops, lambda t: simplex_faces(t))
    orientation = {t: cycle[t] for t in tops}
    return _validate_protocol(gap, ids, weights, tops, orientation, cycle)


def cube_protocol(gap: GapComplex, signs=None):
    """Boundary-of-cube protocol for a gap with two cells per level: the
    cube coordinate x_j drives the first cell of level p+j (times
    signs[j]), the second cell stays at weight zero."""
    n = gap.q - gap.p + 1
    if any(gap.parent.n_cells(j) != 2 for j in range(gap.p, gap.q + 1)):
        raise ValueError("cube protocol needs exactly two cells per gap level")
    if signs is None:
        signs = [1] * n
    return cube_boundary_protocol(gap, lambda c: _corner_weight(gap, c, signs))


def cube_sphere_protocol(q):
    """The boundary-of-cube protocol over the two-cell q-sphere."""
    return cube_protocol(gap_complex(sphere_complex(q), 0, q))


def square_protocol():
    """The square-boundary protocol over the circle, with the level-1
    weight flipped so the top edge prefers the first 1-cell."""
    gap = gap_complex(sphere_complex(1), 0, 1)
    return cube_protocol(gap, signs=[1, -1])


def figure_protocols():
    """Catalog of the standard square and cube example protocols."""
    return {"square": square_protocol(), "cube": cube_sphere_protocol(2)}


# --- subdivision --------------------------------------------------------------


def _ordered_to_sorted(chain):
    """Convert ordered-simplex chains [(coeff, ordered_tuple)] to a dict
    over sorted tuples with permutation signs."""
    out = {}
    for coeff, ordered in chain:
        srt = tuple(sorted(ordered))
        perm = [ordered.index(v) for v in srt]
        sign = 1
        seen = [False] * len(perm)
        for i in range(len(perm)):
            if seen[i]:
                continue
            j, ln = i, 0
            while not seen[j]:
                seen[j] = True
                j = perm[j]
                ln += 1
            if ln % 2 == 0:
                sign = -sign
        out[srt] = out.get(srt, 0) + coeff * sign
    return {k: v for k, v in out.items() if v}


def subdivide(proto: SimplicialProtocol):
    """Midpoint (edgewise) subdivision for parameter spaces of dimension
    at most two; weights interpolate affinely, the fundamental cycle is
    carried along."""
    if proto.dim > 2:
        raise NotImplementedError("subdivision implemented through dimension 2")
    ids = list(proto.vertex_ids)
    weights = list(proto.vertex_weights)
    mid = {}

    def midpoint(a, b):
        key = (min(a, b), max(a, b))
        if key not in mid:
            ids.append(f"m({ids[key[0]]},{ids[key[1]]})")
            weights.append(weights[key[0]].combine(weights[key[1]], 0.5))
            mid[key] = len(ids) - 1
        return mid[key]

    def children(key):
        if len(key) == 1:
            return [(1, key)]
        if len(key) == 2:
            a, b = key
            m = midpoint(a, b)
            return [(1, (a, m)), (1, (m, b))]
        a, b, c = key
        mab, mac, mbc = midpoint(a, b), midpoint(a, c), midpoint(b, c)
        return [
            (1, (a, mab, mac)),
            (1, (mab, b, mbc)),
            (1, (mac, mbc, c)),
            (1, (mbc, mac, mab)),
        ]

    new_tops = []
    new_cycle = {}
    new_orient = {}
    top_dim = proto.dim
    for key in proto.simplices_of_dim(top_dim):
        ch = children(key)
        signed = _ordered_to_sorted(ch)
        for skey, sgn in signed.items():
            new_tops.append(skey)
            if key in proto.fundamental_cycle:
                new_cycle[skey] = new_cycle.get(skey, 0) + proto.fundamental_cycle[key] * sgn
            if key in proto.orientation:
                new_orient[skey] = proto.orientation[key] * sgn
    return _validate_protocol(proto.gap, ids, weights, new_tops, new_orient, new_cycle)


# --- the regular-CW cube domain ------------------------------------------------


@dataclass(frozen=True)
class CubeCwDomain:
    """Boundary of the cube [-1,1]^n as a regular CW complex.

    Cells are patterns over the axes with entries -1, +1 (fixed) or None
    (free); at least one axis is fixed.  Weights live on the corners,
    exactly as in the triangulated cube protocols.
    """

    gap: GapComplex
    signs: tuple
    n: int

    def all_cells(self):
        cells = []
        for free_count in range(self.n):
            for free_axes in itertools.combinations(range(self.n), free_count):
                fixed_axes = [a for a in range(self.n) if a not in free_axes]
                for vals in itertools.product((-1, 1), repeat=len(fixed_axes)):
                    pattern = [None] * self.n
                    for a, v in zip(fixed_axes, vals):
                        pattern[a] = v
                    cells.append(tuple(pattern))
        return sorted(cells, key=lambda c: (sum(1 for v in c if v is None), str(c)))

    def dim_of(self, key):
        return sum(1 for v in key if v is None)

    def boundary_of(self, key):
        out = []
        m = 0
        for a, v in enumerate(key):
            if v is not None:
                continue
            base = (-1) ** m
            plus = tuple(1 if i == a else key[i] for i in range(self.n))
            minus = tuple(-1 if i == a else key[i] for i in range(self.n))
            out.append((base, plus))
            out.append((-base, minus))
            m += 1
        return out

    def vertices_of(self, key):
        free = [a for a, v in enumerate(key) if v is None]
        corners = []
        for vals in itertools.product((-1, 1), repeat=len(free)):
            c = list(key)
            for a, v in zip(free, vals):
                c[a] = v
            corners.append(tuple(c))
        return corners

    def weight_of(self, vertex_key):
        return _corner_weight(self.gap, vertex_key, self.signs)

    def fundamental_cycle(self):
        tops = [c for c in self.all_cells() if self.dim_of(c) == self.n - 1]
        return _normalized_kernel_cycle(tops, self.boundary_of)


def cube_cw_domain(gap: GapComplex, signs=None):
    n = gap.q - gap.p + 1
    if signs is None:
        signs = [1] * n
    return CubeCwDomain(gap=gap, signs=tuple(signs), n=n)
