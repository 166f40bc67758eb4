"""Total-variation gradient flow on oriented graphs.

Integrates du/dt = -m(u), where m(u) is the minimum-norm element of the
total-variation subdifferential at u.  The trajectory is piecewise affine
in t: within a segment the sign pattern of u is constant and the state
moves along the fixed direction d = -m(u); a segment ends when a non-flat
edge difference crosses zero.  The flow reaches the mean field in finite
time and stays there.

Each segment also records a witness flow H_k realizing d_k = -div H_k and
the accumulated antiderivative F(t) = -integral of H over [0, t], so
u(t) = f + div F(t) holds along the whole trajectory.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .engine import min_norm_divergence
from .errors import ConvergenceError, PathError, ValidationError
from .graph import (DEFAULT_TOL, OrientedGraph, SignPattern, Tolerances,
                    ensure_vertex_field, pattern_box, sign_pattern)
from .rof import PiecewiseAffinePath, rof_solve


@dataclass(frozen=True)
class FlowTrajectory:
    """Complete gradient-flow trajectory of one datum.

    ``path`` holds the breakpoints, per-segment states and directions;
    ``flows`` the per-segment witness H_k (one row per segment, max-norm at
    most 1); ``antiderivative`` the accumulated F at every breakpoint
    (first row zero).  Beyond the final breakpoint the state is the mean
    field and F stays at its final value.
    """

    path: PiecewiseAffinePath
    flows: np.ndarray
    antiderivative: np.ndarray

    @property
    def breakpoints(self) -> np.ndarray:
        return self.path.breakpoints

    @property
    def t_max(self) -> float:
        return float(self.path.breakpoints[-1])

    @property
    def directions(self) -> np.ndarray:
        return self.path.slopes

    def value_at(self, t: float) -> np.ndarray:
        return self.path.value_at(t)

    def direction_at(self, t: float) -> np.ndarray:
        return self.path.slope_at(t)

    def antiderivative_at(self, t: float) -> np.ndarray:
        if t < 0 or not math.isfinite(t):
            raise ValidationError("time must be finite and nonnegative")
        b = self.path.breakpoints
        if t >= b[-1] or self.flows.shape[0] == 0:
            return self.antiderivative[-1].copy()
        k = int(np.searchsorted(b, t, side="right")) - 1
        return self.antiderivative[k] - (t - b[k]) * self.flows[k]


def _minimal_section_witness(g, u, tol, *, scale=None, warm_start=None,
                             max_iter=1_000_000):
    """Minimum-norm subdifferential element at u plus its witness flow.

    The witness is remapped to the refined pattern of the outgoing state:
    flat edges that split under the direction d are pinned, and the
    minimum-norm solve is repeated until the pattern is consistent (the
    optimality conditions make one refinement pass sufficient in practice).
    Returns (d, H, pattern) with d = -div H the descent direction -m(u).
    """
    pat = sign_pattern(g, u, tol, scale=scale)
    h, rep = min_norm_divergence(g, pattern_box(pat), tol,
                                 warm_start=warm_start, max_iter=max_iter)
    if not rep.converged:
        raise ConvergenceError("minimum-norm solve did not converge", rep)
    d = -(g.incidence_matrix @ h)
    for _ in range(g.edge_count + 1):
        refined = _split_flats(g, pat, d, tol)
        if refined == pat:
            break
        pat = refined
        h, rep = min_norm_divergence(g, pattern_box(pat), tol,
                                     warm_start=h, max_iter=max_iter)
        if not rep.converged:
            raise ConvergenceError("minimum-norm solve did not converge", rep)
        d = -(g.incidence_matrix @ h)
    else:
        warnings.warn("flat-edge refinement did not reach a fixed point",
                      RuntimeWarning)
    return d, h, pat


def _split_flats(g, pat: SignPattern, d, tol) -> SignPattern:
    """Pattern of the state immediately after moving along d.

    A flat edge whose endpoints separate under d becomes non-flat with the
    sign of d(tail) - d(head); the threshold scales with the range of d
    (the vanishing-step limit of probing u + eps * d).
    """
    dd = d[g.tails] - d[g.heads]
    thr = tol.flat_tol * float(d.max() - d.min()) if d.size else 0.0
    labels = pat.labels.copy()
    split = pat.flat & (np.abs(dd) > thr)
    labels[split] = np.sign(dd[split]).astype(np.int8)
    return SignPattern(labels)


def minimal_section(g: OrientedGraph, u, tol: Optional[Tolerances] = None, *,
                    scale: float | None = None) -> np.ndarray:
    """Minimum-Euclidean-norm element of the total-variation subdifferential at u.

    This is the negated right derivative of the gradient flow through u.
    """
    tol = tol if tol is not None else DEFAULT_TOL
    u = ensure_vertex_field(g, u, "u")
    d, _, _ = _minimal_section_witness(g, u, tol, scale=scale)
    return -d


def _snap_components(g, u, flat_mask) -> np.ndarray:
    """Make the listed edges exactly flat by averaging within components."""
    parent = list(range(g.vertex_count))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for k in np.flatnonzero(flat_mask):
        ra, rb = find(int(g.tails[k])), find(int(g.heads[k]))
        if ra != rb:
            parent[ra] = rb
    out = u.copy()
    roots = np.array([find(v) for v in range(g.vertex_count)])
    for r in np.unique(roots):
        mask = roots == r
        if mask.sum() > 1:
            out[mask] = out[mask].mean()
    return out


def flow_solve(g: OrientedGraph, f, tol: Optional[Tolerances] = None, *,
               max_segments: Optional[int] = None,
               max_iter: int = 1_000_000) -> FlowTrajectory:
    """Integrate the gradient flow of the total variation from datum f.

    Exact event-driven integration: per segment, the direction is the
    negated minimum-norm subdifferential element, the segment length is the
    first zero crossing of a non-flat edge difference, and crossing edges
    are snapped exactly flat.  Terminates at the mean field.
    """
    tol = tol if tol is not None else DEFAULT_TOL
    f = ensure_vertex_field(g, f, "f")
    n, m = g.vertex_count, g.edge_count
    fbar = float(f.mean())
    mean_field = np.full(n, fbar)
    scale = float(f.max() - f.min())
    if scale == 0.0:
        path = PiecewiseAffinePath([0.0], np.empty((0, n)), np.empty((0, n)), f.copy())
        return FlowTrajectory(path, np.empty((0, m)), np.zeros((1, m)))

    cap = max_segments if max_segments is not None else 16 * m + 64
    u = f.copy()
    t = 0.0
    bps = [0.0]
    states = [u.copy()]
    dirs = []
    flows = []
    f_acc = np.zeros(m)
    antider = [f_acc.copy()]
    warm = None
    prev_norm = math.inf

    for _ in range(cap):
        pat = sign_pattern(g, u, tol, scale=scale)
        if pat.all_flat:
            break
        d, h, pat = _minimal_section_witness(g, u, tol, scale=scale,
                                             warm_start=warm, max_iter=max_iter)
        warm = h
        dnorm = float(np.linalg.norm(d))
        if dnorm <= 0.0:
            raise PathError("nonconstant state with zero descent direction",
                            interval=(t, t))
        if dnorm > prev_norm * (1.0 + 1e-9):
            warnings.warn("descent speed failed to decrease across a segment",
                          RuntimeWarning)
        prev_norm = dnorm

        diffs = u[g.tails] - u[g.heads]
        ddiffs = d[g.tails] - d[g.heads]
        closing = pat.nonflat & (diffs * ddiffs < 0.0)
        if not closing.any():
            raise PathError("no closing edge on a non-stationary segment",
                            interval=(t, t))
        cross = -diffs[closing] / ddiffs[closing]
        tau = float(cross.min())
        if tau <= 0.0:
            raise PathError("nonpositive segment length", interval=(t, t))

        u_next = u + tau * d
        # edges that reach zero now, plus edges kept flat by the pattern
        crossing_edges = np.zeros(m, dtype=bool)
        idx = np.flatnonzero(closing)
        crossing_edges[idx[cross <= tau * (1.0 + 1e-12)]] = True
        u_next = _snap_components(g, u_next, pat.flat | crossing_edges)

        t += tau
        bps.append(t)
        states.append(u_next.copy())
        dirs.append(d)
        flows.append(h)
        f_acc = f_acc - tau * h
        antider.append(f_acc.copy())
        u = u_next
    else:
        raise PathError("segment cap exceeded before stationarity",
                        interval=(0.0, t))

    if float(np.abs(u - mean_field).max()) > 1e-6 * (1.0 + abs(fbar)):
        raise PathError("flow did not terminate at the mean field",
                        interval=(bps[-2] if len(bps) > 1 else 0.0, t))

    left_values = np.asarray(states[:-1], dtype=float).reshape(len(bps) - 1, n)
    slopes = np.asarray(dirs, dtype=float).reshape(len(bps) - 1, n)
    path = PiecewiseAffinePath(np.asarray(bps), left_values, slopes, mean_field)
    return FlowTrajectory(path, np.asarray(flows, dtype=float).reshape(len(bps) - 1, m),
                          np.asarray(antider))


def flow_backward_euler(g: OrientedGraph, f, t_end: float, step: float,
                        tol: Optional[Tolerances] = None) -> np.ndarray:
    """Implicit-Euler approximation of the flow state at t_end.

    Iterates the regularization resolvent with parameter ``step``; the last
    step is shortened to land exactly on t_end.  First-order accurate in
    ``step``.
    """
    tol = tol if tol is not None else DEFAULT_TOL
    f = ensure_vertex_field(g, f, "f")
    t_end = float(t_end)
    step = float(step)
    if not (t_end >= 0 and math.isfinite(t_end)):
        raise ValidationError("t_end must be finite and nonnegative")
    if not (step > 0 and math.isfinite(step)):
        raise ValidationError("step must be finite and positive")
    count = int(math.ceil(t_end / step - 1e-12)) if t_end > 0 else 0
    u = f.copy()
    warm = None
    t = 0.0
    for k in range(count):
        h = min(step, t_end - t)
        if h <= 0:
            break
        sol = rof_solve(g, u, h, tol, warm_start=warm)
        u = sol.u
        warm = -sol.dual_flow
        t += h
    return u
