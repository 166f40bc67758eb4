"""Oriented graphs, discrete divergence, and graph total variation.

An oriented graph is a finite connected graph in which every undirected edge
carries exactly one orientation (no self-loops, no antiparallel pairs).
Vertex fields and edge fields are plain 1-D float arrays indexed by the
graph's vertex and edge order.  The divergence of an edge flow ``H`` is

    (div H)(v) = sum of H over edges into v  -  sum of H over edges out of v,

and the total variation of a vertex field ``u`` is

    J(u) = sum over edges (a, b) of |u(b) - u(a)|,

which does not depend on the chosen orientation.  ``J`` is the support
function of the divergence image of the unit box, so its subdifferential at
``u`` is the set of divergences of flows that are pinned opposite the sign
of ``u(tail) - u(head)`` on non-flat edges and free in [-1, 1] on flat ones.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .engine import BoxSpec, GroupBallSpec, SolveReport, project_onto_div_box
from .errors import ConvergenceError, ValidationError


@dataclass(frozen=True)
class Tolerances:
    """Numerical thresholds shared across the package.

    flat_tol : relative threshold below which an edge difference counts as
        flat; scaled internally by the data range max(f) - min(f) of the
        field under examination (or an explicitly supplied scale).
    solve_tol : inner solver tolerance (gradient-mapping norm for
        projections, relative objective gap for generic convex solves).
    event_tol : localization tolerance for breakpoint detection in
        piecewise-affine paths.
    """

    flat_tol: float = 1e-7
    solve_tol: float = 1e-9
    event_tol: float = 1e-6

    def __post_init__(self):
        for name in ("flat_tol", "solve_tol", "event_tol"):
            v = getattr(self, name)
            if not (isinstance(v, (int, float)) and v > 0 and np.isfinite(v)):
                raise ValidationError("%s must be a positive finite number" % name)


DEFAULT_TOL = Tolerances()


class OrientedGraph:
    """A finite connected oriented graph with cached incidence structure.

    Parameters
    ----------
    vertex_count : number of vertices, at least 1.
    edges : sequence of (tail, head) vertex index pairs.  Self-loops,
        duplicate edges, and antiparallel pairs are rejected; the underlying
        undirected graph must be connected.
    names : optional vertex names (display only).
    cartesian : optional (M, N) marking the graph as an M-by-N Cartesian
        grid.  Requires ``grid_coords`` mapping each vertex to its (i, j)
        position, 1-based with i in 1..M and j in 1..N; the edge set must be
        exactly the grid edges (i+1, j) -> (i, j) and (i, j+1) -> (i, j).
    """

    def __init__(self, vertex_count: int, edges: Sequence[tuple],
                 names: Optional[Sequence[str]] = None,
                 cartesian: Optional[tuple] = None,
                 grid_coords: Optional[Sequence[tuple]] = None):
        n = int(vertex_count)
        if n < 1:
            raise ValidationError("vertex_count must be at least 1")
        tails = []
        heads = []
        undirected = set()
        for e in edges:
            a, b = int(e[0]), int(e[1])
            if not (0 <= a < n and 0 <= b < n):
                raise ValidationError("edge (%d, %d) out of vertex range" % (a, b))
            if a == b:
                raise ValidationError("self-loop at vertex %d" % a)
            key = (min(a, b), max(a, b))
            if key in undirected:
                raise ValidationError(
                    "duplicate or antiparallel edge between %d and %d" % (a, b))
            undirected.add(key)
            tails.append(a)
            heads.append(b)
        self.vertex_count = n
        self.edge_count = len(tails)
        self.tails = np.asarray(tails, dtype=np.intp)
        self.heads = np.asarray(heads, dtype=np.intp)
        self.edges = tuple(zip(tails, heads))

        if names is not None:
            names = tuple(str(s) for s in names)
            if len(names) != n:
                raise ValidationError("names must have one entry per vertex")
        self.names = names

        inc = np.zeros((n, self.edge_count), dtype=float)
        for k in range(self.edge_count):
            inc[heads[k], k] += 1.0
            inc[tails[k], k] -= 1.0
        inc.setflags(write=False)
        self.incidence_matrix = inc

        deg = np.zeros(n, dtype=np.intp)
        np.add.at(deg, self.tails, 1)
        np.add.at(deg, self.heads, 1)
        self.degree = deg
        self.max_degree = int(deg.max()) if self.edge_count else 0

        self._check_connected()

        self.cartesian = None
        self.grid_coords = None
        if cartesian is not None:
            self._init_cartesian(cartesian, grid_coords)

    def _check_connected(self):
        if self.vertex_count == 1:
            return
        adj = [[] for _ in range(self.vertex_count)]
        for a, b in self.edges:
            adj[a].append(b)
            adj[b].append(a)
        seen = np.zeros(self.vertex_count, dtype=bool)
        stack = [0]
        seen[0] = True
        while stack:
            v = stack.pop()
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    stack.append(w)
        if not seen.all():
            raise ValidationError("graph must be connected")

    def _init_cartesian(self, cartesian, grid_coords):
        mm, nn = int(cartesian[0]), int(cartesian[1])
        if mm < 1 or nn < 1 or mm * nn != self.vertex_count:
            raise ValidationError(
                "cartesian shape (%d, %d) inconsistent with %d vertices"
                % (mm, nn, self.vertex_count))
        if grid_coords is None:
            raise ValidationError("cartesian graphs require grid_coords")
        coords = tuple((int(i), int(j)) for i, j in grid_coords)
        if len(coords) != self.vertex_count:
            raise ValidationError("grid_coords must list every vertex")
        index = {}
        for v, (i, j) in enumerate(coords):
            if not (1 <= i <= mm and 1 <= j <= nn):
                raise ValidationError("grid coordinate (%d, %d) out of range" % (i, j))
            if (i, j) in index:
                raise ValidationError("duplicate grid coordinate (%d, %d)" % (i, j))
            index[(i, j)] = v
        expected = set()
        for i in range(1, mm + 1):
            for j in range(1, nn + 1):
                if i < mm:
                    expected.add((index[(i + 1, j)], index[(i, j)]))
                if j < nn:
                    expected.add((index[(i, j + 1)], index[(i, j)]))
        if expected != set(self.edges):
            raise ValidationError("edge set does not match the Cartesian grid")
        self.cartesian = (mm, nn)
        self.grid_coords = coords
        self._grid_index = index

    def edge_index(self, tail: int, head: int) -> int:
        """Index of the edge with the given (tail, head) pair."""
        for k, (a, b) in enumerate(self.edges):
            if a == tail and b == head:
                return k
        raise ValidationError("no edge (%d, %d)" % (tail, head))

    def coupled_groups(self) -> tuple:
        """Partition of the edge set for the coupled (isotropic) constraint.

        Each interior grid vertex (i, j) with i < M and j < N groups its two
        incoming grid edges; border vertices contribute their single incoming
        edge as a singleton.  Only defined for Cartesian-tagged graphs.
        """
        if self.cartesian is None:
            raise ValidationError("coupled groups require a Cartesian grid graph")
        mm, nn = self.cartesian
        idx = self._grid_index
        pair_of = {e: k for k, e in enumerate(self.edges)}
        groups = []
        for i in range(1, mm + 1):
            for j in range(1, nn + 1):
                members = []
                if i < mm:
                    members.append(pair_of[(idx[(i + 1, j)], idx[(i, j)])])
                if j < nn:
                    members.append(pair_of[(idx[(i, j + 1)], idx[(i, j)])])
                # the far corner (M, N) has no incoming grid edges
                if members:
                    groups.append(tuple(members))
        return tuple(groups)

    def coupled_ball(self, radius: float) -> GroupBallSpec:
        """GroupBallSpec for the coupled constraint set at the given radius."""
        return GroupBallSpec(self.coupled_groups(), radius, self.edge_count)

    def reversed_edge(self, k: int) -> "OrientedGraph":
        """A copy of the graph with edge k's orientation flipped."""
        edges = list(self.edges)
        a, b = edges[k]
        edges[k] = (b, a)
        return OrientedGraph(self.vertex_count, edges, names=self.names)

    def __repr__(self):
        tag = "" if self.cartesian is None else ", cartesian=%dx%d" % self.cartesian
        return "OrientedGraph(%d vertices, %d edges%s)" % (
            self.vertex_count, self.edge_count, tag)


class SignPattern:
    """Per-edge labels in {-1, 0, +1}; 0 marks a flat edge."""

    __slots__ = ("labels",)

    def __init__(self, labels):
        arr = np.asarray(labels, dtype=np.int8)
        if arr.ndim != 1 or not np.isin(arr, (-1, 0, 1)).all():
            raise ValidationError("labels must be a 1-D array over {-1, 0, 1}")
        arr = arr.copy()
        arr.setflags(write=False)
        self.labels = arr

    def __len__(self):
        return self.labels.size

    def __eq__(self, other):
        if not isinstance(other, SignPattern):
            return NotImplemented
        return np.array_equal(self.labels, other.labels)

    def __hash__(self):
        return hash(self.labels.tobytes())

    @property
    def flat(self) -> np.ndarray:
        return self.labels == 0

    @property
    def nonflat(self) -> np.ndarray:
        return self.labels != 0

    @property
    def all_flat(self) -> bool:
        return bool((self.labels == 0).all())

    def __repr__(self):
        return "SignPattern(%s)" % np.array2string(self.labels, separator="")


@dataclass(frozen=True)
class MembershipResult:
    """Outcome of a subdifferential membership query.

    ``member`` is the verdict; ``witness`` is a feasible flow whose
    divergence matches the candidate when the verdict is positive (any
    feasible witness; only its divergence is determined).  ``residual`` is
    the achieved distance ``||div H - candidate||_2`` and ``threshold`` the
    cutoff it was compared against.
    """

    member: bool
    witness: Optional[np.ndarray]
    residual: float
    threshold: float
    report: SolveReport


def ensure_vertex_field(g: OrientedGraph, u, name: str = "field") -> np.ndarray:
    u = np.asarray(u, dtype=float)
    if u.shape != (g.vertex_count,):
        raise ValidationError(
            "%s must be a length-%d vertex field, got shape %s" % (name, g.vertex_count, u.shape))
    if not np.isfinite(u).all():
        raise ValidationError("%s must be finite" % name)
    return u


def ensure_edge_field(g: OrientedGraph, h, name: str = "flow") -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.shape != (g.edge_count,):
        raise ValidationError(
            "%s must be a length-%d edge field, got shape %s" % (name, g.edge_count, h.shape))
    if not np.isfinite(h).all():
        raise ValidationError("%s must be finite" % name)
    return h


def divergence(g: OrientedGraph, h) -> np.ndarray:
    """Divergence of an edge flow: inflow minus outflow at each vertex.

    Sums to zero over the vertex set for any flow.
    """
    h = ensure_edge_field(g, h)
    return g.incidence_matrix @ h


def edge_differences(g: OrientedGraph, u) -> np.ndarray:
    """Per-edge differences u(tail) - u(head)."""
    u = ensure_vertex_field(g, u)
    return u[g.tails] - u[g.heads]


def total_variation(g: OrientedGraph, u) -> float:
    """Graph total variation J(u), the sum of absolute edge differences."""
    return float(np.abs(edge_differences(g, u)).sum())


def sign_pattern(g: OrientedGraph, u, tol: Tolerances | None = None, *,
                 scale: float | None = None) -> SignPattern:
    """Thresholded signs of u(tail) - u(head) per edge.

    Differences with magnitude at most ``tol.flat_tol * scale`` are labeled
    flat (0); ``scale`` defaults to the range max(u) - min(u) of the field
    itself.  Pass an explicit scale when classifying states derived from a
    common datum so the threshold stays fixed along a trajectory.
    """
    tol = tol if tol is not None else DEFAULT_TOL
    u = ensure_vertex_field(g, u)
    d = u[g.tails] - u[g.heads]
    if scale is None:
        scale = float(u.max() - u.min()) if u.size else 0.0
    thr = tol.flat_tol * scale
    labels = np.sign(d).astype(np.int8)
    labels[np.abs(d) <= thr] = 0
    return SignPattern(labels)


def pattern_box(pattern: SignPattern) -> BoxSpec:
    """Flow constraint set attached to a sign pattern.

    Non-flat edges pin the flow to minus the label; flat edges are free in
    [-1, 1].  The divergence image of this box is the total-variation
    subdifferential at any field with the given pattern.
    """
    lab = pattern.labels.astype(float)
    lower = np.where(lab != 0.0, -lab, -1.0)
    upper = np.where(lab != 0.0, -lab, 1.0)
    return BoxSpec(lower, upper)


def subdifferential_membership(g: OrientedGraph, u, candidate,
                               tol: Tolerances | None = None) -> MembershipResult:
    """Decide whether ``candidate`` lies in the total-variation subdifferential at ``u``.

    Projects the candidate onto the divergence image of the pattern box of
    ``u`` and compares the residual against a solver-resolution threshold
    ``max(solve_tol, 100 * solve_tol * (1 + ||candidate||_2))`` (the exact
    contract is residual zero).  Raises :class:`ConvergenceError` when the
    inner projection does not converge, so an unresolved solve is never
    reported as a clean negative verdict.
    """
    tol = tol if tol is not None else DEFAULT_TOL
    u = ensure_vertex_field(g, u, "u")
    candidate = ensure_vertex_field(g, candidate, "candidate")
    box = pattern_box(sign_pattern(g, u, tol))
    h, report = project_onto_div_box(g, candidate, box, tol)
    if not report.converged:
        raise ConvergenceError("membership projection did not converge", report)
    residual = float(np.linalg.norm(g.incidence_matrix @ h - candidate))
    threshold = max(tol.solve_tol,
                    100.0 * tol.solve_tol * (1.0 + float(np.linalg.norm(candidate))))
    member = residual <= threshold
    return MembershipResult(member, h if member else None, residual, threshold, report)
