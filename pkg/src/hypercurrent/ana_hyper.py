"""The analytical current forms and their integration.

Everything here is floating point.  The two computation routes are kept
deliberately separate so they can check each other:

* weighted pseudoinverses solved directly as least-squares problems in
  the modified (Boltzmann) inner product e^(beta * weight);
* the tree-sum route, where the same operators are convex combinations
  of the per-tree right inverses with weights tau^2 e^(-beta W_T).

Degree-l forms are evaluated in closed form through orchard sums; the
Stokes map integrates them over simplices with a degree-5 rule plus
edgewise dyadic refinement.  Exponentials are always shifted by the
per-level extremum before exponentiation so large beta stays finite.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from . import ratlin
from .complex_core import GapComplex, GradedOperator
from .errors import BadFrame, NonpositiveBeta, QuadratureNoConvergence
from .forests import enumerate_dtrees
from .protocol import WeightPoint
from .topo_hyper import HyperCochain, cochain_chain_map_defect, cycle_boundary_defect, \
    hypercurrent_homology

__all__ = [
    "ModifiedMetric",
    "Orchard",
    "FormEvaluation",
    "enumerate_orchards",
    "weighted_pseudoinverse_boundary",
    "weighted_pseudoinverse_inclusion",
    "kirchhoff_pseudoinverse",
    "rho_and_drho",
    "jan_form",
    "jan_integrate",
    "jan_cochain",
    "chain_map_residual",
    "axioms_check",
    "AxiomReport",
    "quantization_sweep",
    "SweepReport",
    "SweepRow",
    "interior_samples",
    "simplex_rule",
    "edgewise_pieces",
]


def _fmat(mat, rows, colns):
    out = np.zeros((rows, colns))
    for i, row in enumerate(mat):
        for j, v in enumerate(row):
            out[i, j] = float(v)
    return out


@dataclass(frozen=True)
class ModifiedMetric:
    """Diagonal Boltzmann metric e^(beta w) on one degree of the complex."""

    level: int
    beta: float
    weights: tuple

    @property
    def diagonal(self):
        w = np.asarray(self.weights, dtype=float)
        return np.exp(self.beta * (w - w.max()))  # shifted; scale never matters


@dataclass(frozen=True)
class Orchard:
    """Trees at consecutive levels from the bottom of the gap upward."""

    trees: tuple

    def __post_init__(self):
        for j, t in enumerate(self.trees):
            if j and t.level != self.trees[0].level + j:
                raise ValueError("orchard levels must increase by one")


@dataclass(frozen=True)
class FormEvaluation:
    simplex: tuple
    coords: tuple
    frame: tuple
    degree: int
    value: np.ndarray


# --- cached float context per gap complex -----------------------------------

_CTX = {}


class _Context:
    def __init__(self, gap: GapComplex):
        self.gap = gap
        top = gap.top
        self.d = [None] + [
            _fmat(gap.d(j), gap.dim_at(j - 1), gap.dim_at(j)) for j in range(1, top + 1)
        ]
        self.bounds = []
        self.nb = []
        self.zeta_std = []
        self.zeta_alt = []
        self.cycles = []
        for j in range(top + 1):
            n = gap.dim_at(j)
            b = gap.homology[j].bounds
            nb = len(b[0]) if b else 0
            self.bounds.append(_fmat(b, n, nb))
            self.nb.append(nb)
            if nb:
                self.zeta_std.append(_fmat(ratlin.pinv(b), nb, n))
                self.zeta_alt.append(_fmat(ratlin.left_inverse(b), nb, n))
            else:
                self.zeta_std.append(np.zeros((0, n)))
                self.zeta_alt.append(np.zeros((0, n)))
            z = gap.homology[j].cycles
            nz = len(z[0]) if z else 0
            self.cycles.append(_fmat(z, n, nz))
        # reduced boundary coefficients: d_j = bounds_{j-1} @ db_j, exactly
        self.db = [None]
        for j in range(1, top + 1):
            b = gap.homology[j - 1].bounds
            nb = self.nb[j - 1]
            coeff = ratlin.solve_matrix(b, gap.d(j)) if nb else ratlin.zeros(0, gap.dim_at(j))
            if coeff is None:
                raise ValueError("boundary does not factor through the bounds basis")
            self.db.append(_fmat(coeff, nb, gap.dim_at(j)))
        # trees per parent level, with float right inverses
        self.trees = {}
        for d_level in range(gap.p, gap.q + 1):
            entries = []
            for t in enumerate_dtrees(gap, d_level):
                idx = [gap.parent.cell_index(d_level, nm) for nm in t.cells]
                jd = d_level - gap.p
                if d_level == gap.p:
                    rmat = _fmat(t.right_inverse, self.nb[0], gap.dim_at(0))
                else:
                    rmat = _fmat(t.right_inverse, gap.dim_at(jd), self.nb[jd - 1])
                entries.append(
                    {"tree": t, "idx": idx, "log_tau2": 2.0 * math.log(t.torsion), "rinv": rmat}
                )
            self.trees[d_level] = entries
        # class extraction at the top degree
        htop = gap.homology[top]
        basis = ratlin.hstack(htop.bounds, htop.hbasis)
        ncols = (len(basis[0]) if basis else 0)
        self.top_solve = _fmat(ratlin.pinv(basis), ncols, gap.dim_at(top))
        self.top_nb = self.nb[top]
        if gap.hq_project is not None:
            self.hq_project = _fmat(
                gap.hq_project, gap.parent_hq.betti, htop.betti
            )
        else:
            self.hq_project = None
        self._orchard_ops = {}

    def orchard_operators(self, ell, zeta):
        """Composite operator per orchard (independent of point and beta)."""
        key = (ell, zeta)
        if key in self._orchard_ops:
            return self._orchard_ops[key]
        gap = self.gap
        zetas = self.zeta_std if zeta == "standard" else self.zeta_alt
        levels = [gap.p + j for j in range(ell + 1)]
        ops = {}
        for combo in itertools.product(*(range(len(self.trees[d])) for d in levels)):
            mat = self.trees[levels[0]][combo[0]]["rinv"]  # minus the co-tree projection
            for j in range(1, ell + 1):
                mat = self.trees[levels[j]][combo[j]]["rinv"] @ mat
                if j < ell:
                    mat = zetas[j] @ mat
            ops[combo] = mat
        self._orchard_ops[key] = ops
        return ops


def _context(gap: GapComplex) -> _Context:
    entry = _CTX.get(id(gap))
    if entry is not None and entry[0] is gap:
        return entry[1]
    ctx = _Context(gap)
    _CTX[id(gap)] = (gap, ctx)
    return ctx


# --- weighted pseudoinverses --------------------------------------------------


def _level_weights(gap, w, j):
    if isinstance(w, WeightPoint):
        return np.asarray(w.level(j + gap.p), dtype=float)
    return np.asarray(w, dtype=float)


def weighted_pseudoinverse_boundary(gap: GapComplex, w, beta, j):
    """Minimum-norm right inverse of the boundary in the metric
    e^(beta w): bounds-basis coordinates one degree down to chains."""
    if beta <= 0:
        raise NonpositiveBeta(f"beta = {beta}")
    ctx = _context(gap)
    if j < 1 or j > gap.top:
        raise ValueError("degree out of range")
    wv = _level_weights(gap, w, j)
    ginv = np.exp(-beta * (wv - wv.min()))
    db = ctx.db[j]
    if ctx.nb[j - 1] == 0:
        return np.zeros((gap.dim_at(j), 0))
    m = (db * ginv[None, :]) @ db.T
    return (ginv[:, None] * db.T) @ np.linalg.solve(m, np.eye(ctx.nb[j - 1]))


def weighted_pseudoinverse_inclusion(gap: GapComplex, w, beta):
    """Left inverse of the bounds inclusion in the metric e^(beta w),
    and the complementary projection: (idagger, alpha0)."""
    if beta <= 0:
        raise NonpositiveBeta(f"beta = {beta}")
    ctx = _context(gap)
    wv = _level_weights(gap, w, 0)
    g = np.exp(beta * (wv - wv.max()))
    bmat = ctx.bounds[0]
    n = bmat.shape[0]
    if ctx.nb[0] == 0:
        return np.zeros((0, n)), np.eye(n)
    m = bmat.T @ (g[:, None] * bmat)
    idagger = np.linalg.solve(m, bmat.T * g[None, :])
    alpha0 = np.eye(n) - bmat @ idagger
    return idagger, alpha0


def _tree_log_weights(ctx, level, wv, beta):
    return np.array(
        [e["log_tau2"] - beta * sum(wv[i] for i in e["idx"]) for e in ctx.trees[level]]
    )


def _tree_distribution(ctx, level, wv, beta):
    logs = _tree_log_weights(ctx, level, wv, beta)
    logs = logs - logs.max()
    expd = np.exp(logs)
    return expd / expd.sum()


def kirchhoff_pseudoinverse(gap: GapComplex, w, beta, j):
    """Tree-sum route to the weighted pseudoinverse: the convex
    combination of tree right inverses with weights tau^2 e^(-beta W_T).
    For j = 0 this is minus the weighted bounds projection, through
    co-trees."""
    if beta <= 0:
        raise NonpositiveBeta(f"beta = {beta}")
    ctx = _context(gap)
    level = j + gap.p
    wv = _level_weights(gap, w, j)
    rho = _tree_distribution(ctx, level, wv, beta)
    entries = ctx.trees[level]
    out = np.zeros_like(entries[0]["rinv"])
    for r, e in zip(rho, entries):
        out = out + r * e["rinv"]
    return out


def enumerate_orchards(gap: GapComplex, ell):
    ctx = _context(gap)
    levels = [gap.p + j for j in range(ell + 1)]
    out = []
    for combo in itertools.product(*(range(len(ctx.trees[d])) for d in levels)):
        out.append(Orchard(trees=tuple(ctx.trees[levels[j]][combo[j]]["tree"] for j in range(ell + 1))))
    return out


# --- protocol geometry ---------------------------------------------------------


def _simplex_vertex_weights(proto, key, level):
    """Per-vertex weight vectors of one level over a simplex, as rows."""
    pts = [proto.weight_of(v) for v in proto.vertices_of(key)]
    return np.array([pt.level(level) for pt in pts], dtype=float)


def _weights_at_nodes(vw, nodes):
    """vw: (nv, ncells) vertex rows; nodes: (N, nv-1) affine coordinates."""
    base = vw[0]
    grads = vw[1:] - base[None, :]
    return base[None, :] + nodes @ grads


def _rho_drho_at_nodes(ctx, proto, key, beta, level, nodes):
    """Tree distribution and its differential at each node.

    Returns (rho: (N, ntrees), drho: (N, ntrees, jdim)); the differential
    is exact: beta * sum_a eta(T, a) dW_a with the product form of eta.
    """
    vw = _simplex_vertex_weights(proto, key, level)
    entries = ctx.trees[level]
    wt_vertex = np.array([[sum(row[i] for i in e["idx"]) for e in entries] for row in vw])
    base = wt_vertex[0]
    grads = wt_vertex[1:] - base[None, :]         # (jdim, ntrees)
    wt = base[None, :] + nodes @ grads            # (N, ntrees)
    log_tau2 = np.array([e["log_tau2"] for e in entries])
    logs = log_tau2[None, :] - beta * wt
    logs = logs - logs.max(axis=1, keepdims=True)
    expd = np.exp(logs)
    rho = expd / expd.sum(axis=1, keepdims=True)
    # d rho_T = beta * [ sum_a rho_T rho_a dW_a - rho_T dW_T ]
    dw = grads.T                                  # (ntrees, jdim)
    mean_dw = rho @ dw                            # (N, jdim)
    drho = beta * rho[:, :, None] * (mean_dw[:, None, :] - dw[None, :, :])
    return rho, drho


def rho_and_drho(proto, beta, tree, point):
    """Value and differential (in the simplex's affine coordinates) of
    one tree's Boltzmann weight at a point."""
    key, coords = tuple(point[0]), np.atleast_2d(np.asarray(point[1], dtype=float))
    ctx = _context(proto.gap)
    level = tree.level
    entries = ctx.trees[level]
    pos = next(i for i, e in enumerate(entries) if e["tree"].cells == tree.cells)
    rho, drho = _rho_drho_at_nodes(ctx, proto, key, beta, level, coords)
    return float(rho[0, pos]), drho[0, pos, :].copy()


# --- the form and its integrals -------------------------------------------------


def jan_form(proto, beta, key, coords, frame, ell, zeta="standard"):
    """Closed-form evaluation of the degree-ell current form at a point
    of a simplex, on a frame of ell tangent vectors (affine coordinates)."""
    if beta <= 0:
        raise NonpositiveBeta(f"beta = {beta}")
    gap = proto.gap
    ctx = _context(gap)
    key = tuple(key)
    jdim = proto.dim_of(key)
    coords = np.asarray(coords, dtype=float)
    frame = [np.asarray(v, dtype=float) for v in frame]
    if len(frame) != ell:
        raise BadFrame(f"need {ell} frame vectors, got {len(frame)}")
    for v in frame:
        if v.shape != (jdim,):
            raise BadFrame("frame vectors must live in the simplex coordinates")
    if ell == 0:
        vw = _simplex_vertex_weights(proto, key, gap.p)
        w = _weights_at_nodes(vw, coords[None, :])[0]
        _, alpha0 = weighted_pseudoinverse_inclusion(gap, w, beta)
        return FormEvaluation(key, tuple(coords), tuple(map(tuple, frame)), 0, alpha0)
    nodes = coords[None, :]
    rhos, drhos = [], []
    for j in range(ell + 1):
        r, dr = _rho_drho_at_nodes(ctx, proto, key, beta, gap.p + j, nodes)
        rhos.append(r[0])
        drhos.append(dr[0])
    ops = ctx.orchard_operators(ell, zeta)
    value = np.zeros((gap.dim_at(ell), gap.dim_at(0)))
    for combo, op in ops.items():
        rows = [drhos[ell - 1 - i][combo[ell - 1 - i]] for i in range(ell)]
        m = np.array([[float(r @ v) for v in frame] for r in rows])
        scal = rhos[ell][combo[ell]] * np.linalg.det(m)
        if scal != 0.0:
            value = value + scal * op
    return FormEvaluation(key, tuple(coords), tuple(map(tuple, frame)), ell, value)


# --- quadrature -----------------------------------------------------------------


def simplex_rule(n, s=2):
    """Degree-(2s+1) rule on the standard n-simplex; returns barycentric
    points (P, n+1) and weights summing to one."""
    d = 2 * s + 1
    pts = []
    wts = []
    for i in range(s + 1):
        denom = d + n - 2 * i
        coeff = (-1) ** i * 2.0 ** (-2 * s) * denom ** d / (
            math.factorial(i) * math.factorial(d + n - i)
        )
        for k in itertools.combinations_with_replacement(range(n + 1), s - i):
            counts = [0] * (n + 1)
            for idx in k:
                counts[idx] += 1
            pts.append([(2 * c + 1) / denom for c in counts])
            wts.append(coeff)
    w = np.asarray(wts)
    w = w / w.sum()
    return np.asarray(pts), w


def edgewise_pieces(n, depth):
    """Vertex matrices ((n+1) x n) of the 2^depth-fold edgewise
    subdivision of the standard n-simplex, all of equal volume."""
    r = 2 ** depth
    if n == 0:
        return [np.zeros((1, 0))]
    if r == 1:
        verts = [np.zeros(n)] + [np.eye(n)[i] for i in range(n)]
        return [np.array(verts)]
    pieces = []
    # the sorted cube picture: y_1 >= y_2 >= ... >= y_n, mapped to the
    # standard simplex by t_m = y_m - y_{m+1}
    for base in itertools.product(range(r), repeat=n):
        for perm in itertools.permutations(range(n)):
            chain = [np.array(base, dtype=float)]
            for a in perm:
                nxt = chain[-1].copy()
                nxt[a] += 1.0
                chain.append(nxt)
            bary = sum(chain) / len(chain)
            if all(bary[m] >= bary[m + 1] for m in range(n - 1)):
                ys = np.array(chain) / r
                ts = ys.copy()
                ts[:, :-1] -= ys[:, 1:]
                pieces.append(ts)
    return pieces


def _node_batches(jdim, depth, rule):
    """All quadrature nodes of one refinement depth with their volumes."""
    bary, w = rule
    pieces = edgewise_pieces(jdim, depth)
    vol = (1.0 / math.factorial(jdim)) / len(pieces)
    nodes = []
    weights = []
    for verts in pieces:
        mapped = bary @ verts
        nodes.append(mapped)
        weights.append(w * vol)
    return np.vstack(nodes), np.concatenate(weights)


def jan_integrate(proto, beta, key, tol=1e-8, max_depth=8, zeta="standard"):
    """Stokes-map value on one simplex: the integral of the pulled-back
    degree-(dim) form, refined dyadically until stable within tol."""
    if beta <= 0:
        raise NonpositiveBeta(f"beta = {beta}")
    gap = proto.gap
    ctx = _context(gap)
    key = tuple(key)
    jdim = proto.dim_of(key)
    if jdim > gap.top:
        raise ValueError("simplex dimension exceeds the gap width")
    if jdim == 0:
        vw = _simplex_vertex_weights(proto, key, gap.p)
        _, alpha0 = weighted_pseudoinverse_inclusion(gap, vw[0], beta)
        return alpha0
    ops = ctx.orchard_operators(jdim, zeta)
    rule = simplex_rule(jdim)
    prev = None
    for depth in range(max_depth + 1):
        nodes, wts = _node_batches(jdim, depth, rule)
        rhos, drhos = [], []
        for j in range(jdim + 1):
            r, dr = _rho_drho_at_nodes(ctx, proto, key, beta, gap.p + j, nodes)
            rhos.append(r)
            drhos.append(dr)
        est = np.zeros((gap.dim_at(jdim), gap.dim_at(0)))
        for combo, op in ops.items():
            mats = np.stack(
                [drhos[jdim - 1 - i][:, combo[jdim - 1 - i], :] for i in range(jdim)],
                axis=1,
            )
            dets = np.linalg.det(mats) if jdim > 1 else mats[:, 0, 0]
            scal = float((wts * rhos[jdim][:, combo[jdim]] * dets).sum())
            est = est + scal * op
        if prev is not None and np.max(np.abs(est - prev)) < tol:
            return est
        prev = est
    raise QuadratureNoConvergence(
        f"simplex {key}: no convergence within depth {max_depth} at tol {tol}"
    )


def jan_cochain(proto, beta, tol=1e-8, max_depth=8, zeta="standard") -> HyperCochain:
    """The analytical cochain: every cell of dimension at most the gap
    width gets the Stokes-map integral as its operator block."""
    gap = proto.gap
    values = {}
    for key in proto.all_cells():
        jdim = proto.dim_of(key)
        if jdim > gap.top:
            continue
        mat = jan_integrate(proto, beta, key, tol=tol, max_depth=max_depth, zeta=zeta)
        values[tuple(key)] = GradedOperator(degree=jdim, blocks={0: mat}, kind="float")
    return HyperCochain(gap=gap, domain=proto, values=values, kind="float")


def chain_map_residual(cochain: HyperCochain):
    """Per-simplex defect of the boundary identity; bounded by the
    quadrature tolerance for analytical cochains."""
    return cochain_chain_map_defect(cochain)


# --- axiom checking -----------------------------------------------------------


def interior_samples(proto, count, rng, margin=1e-3):
    """Random points in top-simplex interiors: (key, coords) pairs."""
    tops = proto.simplices_of_dim(proto.dim)
    out = []
    for _ in range(count):
        key = tops[rng.integers(len(tops))]
        raw = rng.random(len(key)) + margin
        bary = raw / raw.sum()
        bary = (1 - (len(key)) * margin) * bary + margin
        out.append((key, tuple(bary[1:] / 1.0)))
    return out


@dataclass
class AxiomReport:
    continuity: float = 0.0       # A1, against a finite-difference derivative
    orthogonality: float = 0.0    # A2, modified-metric pairings with cycles
    initial_value: float = 0.0    # A3, induced map on degree-0 homology
    zeta_independence: float = 0.0
    samples: int = 0
    violations: list = field(default_factory=list)

    @property
    def max_residual(self):
        return max(self.continuity, self.orthogonality, self.initial_value)


def _fd_partial(fun, coords, axis, h):
    up = np.array(coords, dtype=float)
    dn = up.copy()
    up[axis] += h
    dn[axis] -= h
    return (fun(up) - fun(dn)) / (2 * h)


def axioms_check(proto, beta, samples, fd_step=1e-5, tol=1e-5):
    """Continuity / orthogonality / initial-value residuals at sample
    points, plus independence of the orchard sums from the choice of the
    bounds left-inverse."""
    gap = proto.gap
    ctx = _context(gap)
    report = AxiomReport(samples=len(samples))
    for key, coords in samples:
        jdim = proto.dim_of(key)
        frame_basis = np.eye(jdim)
        # A1: boundary of the degree-l value equals the exterior
        # derivative of the degree-(l-1) value, componentwise
        for ell in range(1, gap.top + 1):
            if ell > jdim:
                continue
            for axes in itertools.combinations(range(jdim), ell):
                frame = [frame_basis[a] for a in axes]
                val = jan_form(proto, beta, key, coords, frame, ell).value
                lhs = ctx.d[ell] @ val if ell >= 1 else val
                rhs = np.zeros_like(lhs)
                for m, drop in enumerate(axes):
                    sub = [frame_basis[a] for a in axes if a != drop]

                    def f(pt, sub=sub, ell=ell):
                        return jan_form(proto, beta, key, pt, sub, ell - 1).value

                    rhs = rhs + (-1) ** m * _fd_partial(f, coords, drop, fd_step)
                resid = float(np.max(np.abs(lhs - rhs)))
                report.continuity = max(report.continuity, resid)
                if resid > tol:
                    report.violations.append(("A1", key, coords, ell, resid))
        # A2: values are orthogonal to cycles (bounds in degree 0) in the
        # modified metric
        vw0 = _simplex_vertex_weights(proto, key, gap.p)
        w0 = _weights_at_nodes(vw0, np.asarray(coords)[None, :])[0]
        g0 = np.exp(beta * (w0 - w0.max()))
        _, alpha0 = weighted_pseudoinverse_inclusion(gap, w0, beta)
        b0 = ctx.bounds[0]
        if b0.shape[1]:
            pair = b0.T @ (g0[:, None] * alpha0)
            scale = max(np.max(np.abs(alpha0)), 1.0) * g0.max()
            resid = float(np.max(np.abs(pair))) / scale
            report.orthogonality = max(report.orthogonality, resid)
            if resid > tol:
                report.violations.append(("A2", key, coords, 0, resid))
        for ell in range(1, min(jdim, gap.top) + 1):
            zmat = ctx.cycles[ell]
            if not zmat.shape[1]:
                continue
            vwl = _simplex_vertex_weights(proto, key, gap.p + ell)
            wl = _weights_at_nodes(vwl, np.asarray(coords)[None, :])[0]
            gl = np.exp(beta * (wl - wl.max()))
            frame = [frame_basis[a] for a in range(ell)]
            val = jan_form(proto, beta, key, coords, frame, ell).value
            pair = zmat.T @ (gl[:, None] * val)
            scale = max(np.max(np.abs(val)), 1e-30) * gl.max()
            resid = float(np.max(np.abs(pair))) / scale
            report.orthogonality = max(report.orthogonality, resid)
            if resid > tol:
                report.violations.append(("A2", key, coords, ell, resid))
        # A3: the degree-0 value induces the identity on homology
        h0 = gap.homology[0]
        if h0.betti:
            hb = _fmat(h0.hbasis, gap.dim_at(0), h0.betti)
            basis = ratlin.hstack(h0.bounds, h0.hbasis)
            solve = _fmat(ratlin.pinv(basis), len(basis[0]), gap.dim_at(0))
            cls = solve @ (alpha0 @ hb)
            resid = float(np.max(np.abs(cls[ctx.nb[0]:, :] - np.eye(h0.betti))))
            report.initial_value = max(report.initial_value, resid)
            if resid > tol:
                report.violations.append(("A3", key, coords, 0, resid))
        # independence of the bounds left-inverse choice
        for ell in range(1, min(jdim, gap.top) + 1):
            frame = [frame_basis[a] for a in range(ell)]
            v1 = jan_form(proto, beta, key, coords, frame, ell, zeta="standard").value
            v2 = jan_form(proto, beta, key, coords, frame, ell, zeta="alternative").value
            resid = float(np.max(np.abs(v1 - v2)))
            report.zeta_independence = max(report.zeta_independence, resid)
    return report


# --- quantization ----------------------------------------------------------------


@dataclass
class SweepRow:
    beta: float
    coords: tuple
    distance: float
    residual: float


@dataclass
class SweepReport:
    topological: tuple
    rows: list
    slope: float
    fit_range: tuple


def _analytic_class(proto, beta, cycle, rep, tol, max_depth):
    gap = proto.gap
    ctx = _context(gap)
    chain = np.zeros(gap.dim_at(gap.top))
    residual = 0.0
    for key, coeff in cycle.items():
        mat = jan_integrate(proto, beta, key, tol=tol, max_depth=max_depth)
        chain = chain + float(coeff) * (mat @ rep)
    coeffs = ctx.top_solve @ chain
    cls = coeffs[ctx.top_nb:]
    if ctx.hq_project is not None:
        cls = ctx.hq_project @ cls
    return cls, chain, residual


def quantization_sweep(proto, betas, cycle, class_p, tol=1e-8, max_depth=8,
                       fit_range=None, workers=None):
    """Analytical class per beta against the exact value, with a
    log-linear decay fit over the requested beta range."""
    gap = proto.gap
    if cycle_boundary_defect(proto, cycle):
        from .errors import NotACycle

        raise NotACycle("parameter chain has nonzero boundary")
    topo_coords, _ = hypercurrent_homology(proto, cycle, class_p)
    topo = np.array([float(c) for c in topo_coords])
    hp = gap.parent_hp
    hbasis = _fmat(hp.hbasis, gap.dim_at(0), hp.betti)
    rep = hbasis @ np.asarray(class_p, dtype=float)
    rows = []

    def run(beta):
        cls, chain, _ = _analytic_class(proto, float(beta), cycle, rep, tol, max_depth)
        dist = float(np.linalg.norm(cls - topo))
        return SweepRow(beta=float(beta), coords=tuple(float(c) for c in cls),
                        distance=dist, residual=0.0)

    if workers and workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(run, betas))
    else:
        rows = [run(b) for b in betas]
    lo, hi = fit_range if fit_range else (min(betas), max(betas))
    xs = [r.beta for r in rows if lo <= r.beta <= hi and r.distance > 0]
    ys = [math.log(r.distance) for r in rows if lo <= r.beta <= hi and r.distance > 0]
    slope = float("nan")
    if len(xs) >= 2:
        xbar = sum(xs) / len(xs)
        ybar = sum(ys) / len(ys)
        den = sum((x - xbar) ** 2 for x in xs)
        slope = sum((x - xbar) * (y - ybar) for x, y in zip(xs, ys)) / den
    return SweepReport(
        topological=tuple(float(c) for c in topo),
        rows=rows,
        slope=slope,
        fit_range=(lo, hi),
    )
