"""First-order solvers for constrained problems posed on edge flows.

Every solver in this module optimizes over an edge flow ``H`` constrained to
a simple set (a per-edge box or a product of per-group Euclidean balls) and
couples to vertex space only through the divergence operator of an oriented
graph.  Supported objectives:

* ``0.5 * ||target - div H||_2^2`` (Euclidean projection onto the divergence
  image of the constraint set), and
* ``sum_v phi(base(v) - (div H)(v))`` for a convex scalar ``phi``.

The workhorse is an accelerated projected-gradient iteration with a monotone
restart; nonsmooth ``phi`` with a proximal map are handled by Moreau-envelope
smoothing with a continuation schedule whose smoothing error is budgeted
against the requested tolerance.  A projected-subgradient fallback covers
``phi`` that expose neither a curvature bound nor a prox.

All functions are pure: no global state, no internal threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Callable, Optional

import numpy as np

from .errors import ValidationError

if TYPE_CHECKING:
    from .graph import OrientedGraph, Tolerances

DEFAULT_MAX_ITER = 1_000_000

# Objective tolerance used by the separable minimizer when no Tolerances
# object is supplied.  Projections default to the tighter Tolerances()
# value (1e-9) taken from graph.DEFAULT_TOL.
DEFAULT_OBJECTIVE_TOL = 1e-6


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one engine solve.

    Attributes
    ----------
    iterations : total inner iterations spent.
    objective : final objective value.
    optimality : final optimality measure.  For projections this is the
        gradient-mapping norm; for separable solves it is a certified bound
        on the objective gap.
    converged : whether the stopping criterion was met within the cap.
    method : short tag naming the algorithm that produced the result.
    """

    iterations: int
    objective: float
    optimality: float
    converged: bool
    method: str = ""


class BoxSpec:
    """Per-edge interval bounds ``lower <= H <= upper``.

    Equal bounds encode entries fixed by a sign pattern.  Bounds must be
    finite; use large magnitudes rather than inf for effectively-free edges.
    """

    __slots__ = ("lower", "upper")

    def __init__(self, lower, upper):
        lo = np.asarray(lower, dtype=float)
        up = np.asarray(upper, dtype=float)
        if lo.ndim != 1 or lo.shape != up.shape:
            raise ValidationError("box bounds must be 1-D arrays of equal length")
        if not (np.isfinite(lo).all() and np.isfinite(up).all()):
            raise ValidationError("box bounds must be finite")
        if np.any(lo > up):
            raise ValidationError("box requires lower <= upper")
        lo.setflags(write=False)
        up.setflags(write=False)
        self.lower = lo
        self.upper = up

    @property
    def size(self) -> int:
        return self.lower.size

    @staticmethod
    def uniform(count: int, radius: float) -> "BoxSpec":
        """The box [-radius, radius]^count."""
        if radius < 0:
            raise ValidationError("radius must be nonnegative")
        r = np.full(count, float(radius))
        return BoxSpec(-r, r)

    def project(self, h: np.ndarray) -> np.ndarray:
        return np.clip(h, self.lower, self.upper)

    def contains(self, h, slack: float = 0.0) -> bool:
        h = np.asarray(h, dtype=float)
        return bool(np.all(h >= self.lower - slack) and np.all(h <= self.upper + slack))

    def diameter(self) -> float:
        return float(np.linalg.norm(self.upper - self.lower))

    def magnitude(self) -> float:
        if self.size == 0:
            return 0.0
        return float(np.max(np.maximum(np.abs(self.lower), np.abs(self.upper))))

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        t = rng.uniform(size=self.size)
        return self.lower + t * (self.upper - self.lower)


class GroupBallSpec:
    """Product of Euclidean balls over a partition of the edge set.

    ``groups`` is a sequence of index tuples partitioning ``range(size)``;
    each group's subvector is constrained to the l2 ball of the given radius.
    Only group sizes 1 and 2 are supported, which covers the Cartesian-grid
    coupled constraint set.
    """

    __slots__ = ("groups", "radius", "size", "_singles", "_pairs")

    def __init__(self, groups, radius: float, size: int):
        if radius < 0:
            raise ValidationError("radius must be nonnegative")
        singles = []
        pairs = []
        seen = np.zeros(size, dtype=bool)
        norm_groups = []
        for grp in groups:
            idx = tuple(int(k) for k in grp)
            norm_groups.append(idx)
            for k in idx:
                if k < 0 or k >= size or seen[k]:
                    raise ValidationError("groups must partition the edge index range")
                seen[k] = True
            if len(idx) == 1:
                singles.append(idx[0])
            elif len(idx) == 2:
                pairs.append(idx)
            else:
                raise ValidationError("only group sizes 1 and 2 are supported")
        if not seen.all():
            raise ValidationError("groups must cover every edge index")
        self.groups = tuple(norm_groups)
        self.radius = float(radius)
        self.size = int(size)
        self._singles = np.asarray(singles, dtype=np.intp)
        self._pairs = np.asarray(pairs, dtype=np.intp).reshape(-1, 2)

    def project(self, h: np.ndarray) -> np.ndarray:
        out = np.array(h, dtype=float, copy=True)
        r = self.radius
        if self._singles.size:
            out[self._singles] = np.clip(out[self._singles], -r, r)
        if self._pairs.size:
            a = out[self._pairs[:, 0]]
            b = out[self._pairs[:, 1]]
            norms = np.hypot(a, b)
            scale = np.ones_like(norms)
            over = norms > r
            if np.any(over):
                scale[over] = r / norms[over]
                out[self._pairs[:, 0]] = a * scale
                out[self._pairs[:, 1]] = b * scale
        return out

    def contains(self, h, slack: float = 0.0) -> bool:
        h = np.asarray(h, dtype=float)
        r = self.radius + slack
        ok = True
        if self._singles.size:
            ok = bool(np.all(np.abs(h[self._singles]) <= r))
        if ok and self._pairs.size:
            norms = np.hypot(h[self._pairs[:, 0]], h[self._pairs[:, 1]])
            ok = bool(np.all(norms <= r))
        return ok

    def diameter(self) -> float:
        return 2.0 * self.radius * math.sqrt(len(self.groups))

    def magnitude(self) -> float:
        return self.radius

    def random_point(self, rng: np.random.Generator) -> np.ndarray:
        return self.project(rng.uniform(-self.radius, self.radius, size=self.size))


@dataclass(frozen=True)
class ConvexScalar:
    """A convex scalar function with optional solver metadata.

    ``evaluate`` and ``subgradient`` must accept and return numpy arrays
    elementwise.  ``subgradient`` may return any selection from the
    subdifferential.  ``prox``, when given, maps ``(x, delta)`` to
    ``argmin_y phi(y) + (y - x)^2 / (2 delta)`` elementwise.  ``curvature``,
    when given, maps an interval ``(lo, hi)`` to an upper bound on phi'' over
    it, certifying that phi is smooth there.
    """

    name: str
    evaluate: Callable[[np.ndarray], np.ndarray]
    subgradient: Callable[[np.ndarray], np.ndarray]
    prox: Optional[Callable[[np.ndarray, float], np.ndarray]] = None
    curvature: Optional[Callable[[float, float], float]] = None
    params: tuple = ()

    def __post_init__(self):
        if not callable(self.evaluate) or not callable(self.subgradient):
            raise ValidationError("evaluate and subgradient must be callable")

    def describe(self) -> str:
        if not self.params:
            return self.name
        inner = ",".join("%s=%.6g" % (k, v) for k, v in self.params)
        return "%s(%s)" % (self.name, inner)

    def total(self, u: np.ndarray) -> float:
        return float(np.sum(self.evaluate(np.asarray(u, dtype=float))))

    def reflect(self) -> "ConvexScalar":
        """The mirrored function x -> phi(-x), convex again."""
        ev, sg, px, cv = self.evaluate, self.subgradient, self.prox, self.curvature
        return ConvexScalar(
            name="reflect(%s)" % self.name,
            evaluate=lambda x: ev(-np.asarray(x, dtype=float)),
            subgradient=lambda x: -sg(-np.asarray(x, dtype=float)),
            prox=None if px is None else (lambda x, d: -px(-np.asarray(x, dtype=float), d)),
            curvature=None if cv is None else (lambda lo, hi: cv(-hi, -lo)),
            params=self.params,
        )


def bisection_prox(subgradient: Callable[[np.ndarray], np.ndarray],
                   iterations: int = 120) -> Callable[[np.ndarray, float], np.ndarray]:
    """Build a vectorized prox for a convex phi from its subgradient alone.

    Solves y + delta * g(y) = x per entry by bracketing and bisection.  The
    map h(y) = y + delta*g(y) is nondecreasing, so any sign change brackets
    the solution.  Accuracy is limited by float bisection; prefer a closed
    form when one exists.
    """

    def prox(x, delta):
        x = np.asarray(x, dtype=float)
        span = np.maximum(1.0, np.abs(x))
        lo = x - span
        hi = x + span
        # expand until the root is bracketed
        for _ in range(200):
            need_lo = lo + delta * subgradient(lo) > x
            need_hi = hi + delta * subgradient(hi) < x
            if not (need_lo.any() or need_hi.any()):
                break
            span = span * 2.0
            lo = np.where(need_lo, x - span, lo)
            hi = np.where(need_hi, x + span, hi)
        for _ in range(iterations):
            mid = 0.5 * (lo + hi)
            high = mid + delta * subgradient(mid) > x
            hi = np.where(high, mid, hi)
            lo = np.where(high, lo, mid)
        return 0.5 * (lo + hi)

    return prox


def convexity_violation(phi: ConvexScalar, lo: float, hi: float,
                        rng: np.random.Generator, trials: int = 200) -> float:
    """Largest observed violation of convexity and subgradient inequalities.

    Draws random pairs in [lo, hi], checks the midpoint inequality
    phi((x+y)/2) <= (phi(x)+phi(y))/2 and the supporting-line inequality
    phi(y) >= phi(x) + g(x)(y-x).  Returns the max positive violation
    (0 for a genuinely convex phi up to roundoff).
    """
    x = rng.uniform(lo, hi, size=trials)
    y = rng.uniform(lo, hi, size=trials)
    fx = phi.evaluate(x)
    fy = phi.evaluate(y)
    mid_gap = phi.evaluate(0.5 * (x + y)) - 0.5 * (fx + fy)
    line_gap = fx + phi.subgradient(x) * (y - x) - fy
    worst = max(float(np.max(mid_gap)), float(np.max(line_gap)))
    scale = 1.0 + float(np.max(np.abs(fx))) + float(np.max(np.abs(fy)))
    return max(0.0, worst) / scale


def _as_flow(g, h, name: str) -> np.ndarray:
    h = np.asarray(h, dtype=float)
    if h.shape != (g.edge_count,):
        raise ValidationError(
            "%s must be a length-%d edge field, got shape %s" % (name, g.edge_count, h.shape))
    if not np.isfinite(h).all():
        raise ValidationError("%s must be finite" % name)
    return h


def _check_set(g, spec) -> None:
    if spec.size != g.edge_count:
        raise ValidationError(
            "constraint set size %d does not match edge count %d" % (spec.size, g.edge_count))


def _accelerated_descent(x0, *, gradient, objective, step, project,
                         measure, stop_tol, max_iter, check_every=8,
                         patience=125, adaptive=False):
    """FISTA-style iteration with restart on objective increase.

    ``measure(x)`` is the stopping statistic, evaluated every ``check_every``
    iterations on the feasible iterate.  The best-measure iterate is kept;
    the loop stops once it meets ``stop_tol`` or after ``patience``
    consecutive checks without a 10 percent improvement (the attainable
    floor in floating point can sit above ``stop_tol`` for badly scaled
    data, and that outcome is reported rather than looped on).

    With ``adaptive=True`` the iteration takes backtracking steps: ``step``
    is then the certified safe step (inverse of a global curvature bound,
    often far too pessimistic near the optimum), trial steps start three
    orders of magnitude larger and are halved until the quadratic descent
    bound holds.  The stopping ``measure`` should still be evaluated at the
    safe step so its optimality certificate stands.

    Returns (x, iterations, final_measure, final_objective, converged).
    """
    x = project(np.asarray(x0, dtype=float))
    y = x
    t = 1.0
    fx = objective(x)
    it = 0
    best_x, best_meas = x, math.inf
    checks_since_gain = 0
    converged = False
    cur = [step * 1024.0 if adaptive else step]

    def advance(base, fbase):
        # one projected gradient step from base; in adaptive mode, halve the
        # trial step until f(xn) <= f(base) + <g, d> + |d|^2 / (2 step)
        grad = gradient(base)
        while True:
            xn = project(base - cur[0] * grad)
            fn = objective(xn)
            if not adaptive or cur[0] <= step * 1.0000001:
                return xn, fn
            d = xn - base
            bound = fbase + float(grad @ d) + float(d @ d) / (2.0 * cur[0])
            if fn <= bound + 1e-12 * (1.0 + abs(fbase)):
                return xn, fn
            cur[0] = max(step, 0.5 * cur[0])

    while it < max_iter:
        it += 1
        if adaptive and it % 32 == 0:
            cur[0] = min(cur[0] * 2.0, step * 1e9)
        fy = objective(y) if adaptive else fx
        xn, fn = advance(y, fy)
        if fn > fx:
            # momentum overshoot: restart from the last good iterate; the
            # plain step is accepted even if roundoff nudges fn above fx,
            # otherwise the iteration would freeze at the float floor
            t = 1.0
            xn, fn = advance(x, fx)
        tn = 0.5 * (1.0 + math.sqrt(1.0 + 4.0 * t * t))
        y = xn + ((t - 1.0) / tn) * (xn - x)
        x, fx, t = xn, fn, tn
        if it % check_every == 0 or it == max_iter:
            meas = measure(x)
            if meas <= 0.9 * best_meas:
                checks_since_gain = 0
            else:
                checks_since_gain += 1
            if meas < best_meas:
                best_x, best_meas = x, meas
            if best_meas <= stop_tol:
                converged = True
                break
            if checks_since_gain >= patience:
                break
    if not math.isfinite(best_meas):
        best_meas = measure(x)
        best_x = x
        converged = best_meas <= stop_tol
    return best_x, it, best_meas, objective(best_x), converged


def _default_tol():
    from .graph import DEFAULT_TOL
    return DEFAULT_TOL


def project_onto_div_box(g: "OrientedGraph", target, spec,
                         tol: "Tolerances | None" = None, *,
                         warm_start=None,
                         max_iter: int = DEFAULT_MAX_ITER):
    """Euclidean projection of ``target`` onto {div H : H in spec}.

    Minimizes ``0.5 * ||target - div H||_2^2`` over the box (or group-ball)
    constraint ``spec`` by accelerated projected gradient with step
    ``1 / (2 * max_degree)``; ``||div||^2 <= 2 * max_degree``.  Stops when the
    gradient-mapping norm falls below ``tol.solve_tol``.

    Returns
    -------
    (H, report) : the optimal flow and a :class:`SolveReport`.  ``div H`` is
    the projected point; it is unique even when ``H`` itself is not.
    Nonconvergence within ``max_iter`` is reported via the report flag, not
    raised.
    """
    tol = tol if tol is not None else _default_tol()
    target = np.asarray(target, dtype=float)
    if target.shape != (g.vertex_count,):
        raise ValidationError("target must be a length-%d vertex field" % g.vertex_count)
    if not np.isfinite(target).all():
        raise ValidationError("target must be finite")
    _check_set(g, spec)

    d_mat = g.incidence_matrix
    lips = 2.0 * max(g.max_degree, 1)
    step = 1.0 / lips

    def gradient(h):
        return d_mat.T @ (d_mat @ h - target)

    def objective(h):
        r = d_mat @ h - target
        return 0.5 * float(r @ r)

    def measure(h):
        return float(np.linalg.norm(h - spec.project(h - step * gradient(h)))) * lips

    if warm_start is not None:
        x0 = spec.project(_as_flow(g, warm_start, "warm_start"))
    else:
        x0 = np.zeros(g.edge_count)

    # stop slightly inside the contract so downstream 10*solve_tol
    # invariants (warm-start independence) hold with margin
    x, it, meas, obj, conv = _accelerated_descent(
        x0, gradient=gradient, objective=objective, step=step,
        project=spec.project, measure=measure,
        stop_tol=0.25 * tol.solve_tol, max_iter=max_iter)
    return x, SolveReport(it, obj, meas, conv, method="apgd-projection")


def min_norm_divergence(g: "OrientedGraph", spec,
                        tol: "Tolerances | None" = None, *,
                        warm_start=None,
                        max_iter: int = DEFAULT_MAX_ITER):
    """Minimum-Euclidean-norm element of {div H : H in spec}.

    Projection of the origin; see :func:`project_onto_div_box`.  Returns
    ``(H, report)`` where ``div H`` is the (unique) minimum-norm divergence.
    """
    return project_onto_div_box(
        g, np.zeros(g.vertex_count), spec, tol,
        warm_start=warm_start, max_iter=max_iter)


def _smooth_descent(g, base, spec, phi, tol_obj, x0, max_iter):
    d_mat = g.incidence_matrix
    lo, hi = _reachable_interval(g, base, spec)
    curv = max(float(phi.curvature(lo, hi)), 1e-300)
    lips = 2.0 * max(g.max_degree, 1) * curv
    step = 1.0 / lips
    diam = max(spec.diameter(), 1e-300)

    def u_of(h):
        return base - d_mat @ h

    def objective(h):
        return float(np.sum(phi.evaluate(u_of(h))))

    def gradient(h):
        return -(d_mat.T @ phi.subgradient(u_of(h)))

    def measure(h):
        pg = float(np.linalg.norm(h - spec.project(h - step * gradient(h)))) * lips
        return pg * diam

    def stop_tol_of(obj):
        return tol_obj * (1.0 + abs(obj))

    # the stopping threshold depends on the running objective; wrap measure
    # to compare against the current value
    state = {"obj": objective(x0)}

    def rel_measure(h):
        obj = objective(h)
        state["obj"] = obj
        return measure(h) / stop_tol_of(obj)

    x, it, meas, obj, conv = _accelerated_descent(
        x0, gradient=gradient, objective=objective, step=step,
        project=spec.project, measure=rel_measure,
        stop_tol=1.0, max_iter=max_iter, adaptive=True)
    bound = meas * stop_tol_of(obj)
    return x, SolveReport(it, obj, bound, conv, method="apgd-smooth")


def _smoothing_descent(g, base, spec, phi, tol_obj, x0, max_iter):
    """Moreau-smoothing continuation for nonsmooth phi with a prox.

    The smoothed objective sum phi_delta(u) underestimates the true one by
    at most n*delta*G^2/2, G a local Lipschitz bound of phi.  The final delta
    is chosen so this error plus the final-stage gradient-mapping gap bound
    is within tol_obj*(1+|objective|).
    """
    d_mat = g.incidence_matrix
    lo, hi = _reachable_interval(g, base, spec)
    gbound = max(abs(float(phi.subgradient(np.array([lo]))[0])),
                 abs(float(phi.subgradient(np.array([hi]))[0])), 1e-12)
    n = base.size
    diam = max(spec.diameter(), 1e-300)
    lips0 = 2.0 * max(g.max_degree, 1)
    prox = phi.prox

    def u_of(h):
        return base - d_mat @ h

    def true_objective(h):
        return float(np.sum(phi.evaluate(u_of(h))))

    x = np.asarray(x0, dtype=float)
    obj = true_objective(x)
    best_x, best_obj = x, obj
    eps = tol_obj * (1.0 + abs(obj))
    delta = max((hi - lo) / gbound if hi > lo else 1.0, 1e-15)

    total_it = 0
    conv = True
    meas = math.inf
    for _ in range(60):
        # the target delta tracks the best objective seen, so the budget
        # n*delta*G^2/2 <= eps/4 stays valid as eps shrinks
        delta_need = 0.5 * eps / (n * gbound * gbound)
        delta = max(delta, min(delta_need, 1e-15))
        final = delta <= delta_need * 1.0000001
        lips = lips0 / delta
        step = 1.0 / lips

        def gradient(h, _d=delta):
            u = u_of(h)
            return -(d_mat.T @ ((u - prox(u, _d)) / _d))

        def objective(h, _d=delta):
            u = u_of(h)
            p = prox(u, _d)
            return float(np.sum(phi.evaluate(p)) + np.sum((u - p) ** 2) / (2.0 * _d))

        def measure(h, _step=step, _lips=lips, _d=delta):
            pg = float(np.linalg.norm(
                h - spec.project(h - _step * gradient(h, _d)))) * _lips
            return pg * diam

        smooth_err = n * delta * gbound * gbound / 2.0
        stage_tol = 0.25 * eps if final else max(0.5 * smooth_err, 0.25 * eps)
        budget = max_iter - total_it
        if budget <= 0:
            conv = False
            break
        x, it, meas, _, stage_conv = _accelerated_descent(
            x, gradient=gradient, objective=objective, step=step,
            project=spec.project, measure=measure,
            stop_tol=stage_tol, max_iter=budget, adaptive=True)
        total_it += it
        obj = true_objective(x)
        if obj < best_obj:
            best_x, best_obj = x, obj
        eps = tol_obj * (1.0 + abs(best_obj))
        if final:
            conv = conv and stage_conv
            break
        conv = conv and stage_conv
        delta = max(0.1 * delta, 0.5 * eps / (n * gbound * gbound))

    gap_bound = meas + n * delta * gbound * gbound / 2.0
    converged = conv and gap_bound <= eps
    return best_x, SolveReport(total_it, best_obj, gap_bound, converged,
                               method="apgd-smoothing")


def _subgradient_descent(g, base, spec, phi, tol_obj, x0, max_iter):
    """Projected subgradient with diminishing steps, best iterate kept."""
    d_mat = g.incidence_matrix
    lo, hi = _reachable_interval(g, base, spec)
    n = base.size
    c = max((hi - lo) / math.sqrt(max(n, 1)), 1e-8)
    gbound = max(abs(float(phi.subgradient(np.array([lo]))[0])),
                 abs(float(phi.subgradient(np.array([hi]))[0])), 1e-12)
    diam = max(spec.diameter(), 1e-300)

    def u_of(h):
        return base - d_mat @ h

    def objective(h):
        return float(np.sum(phi.evaluate(u_of(h))))

    x = spec.project(np.asarray(x0, dtype=float))
    best_x = x
    best_obj = objective(x)
    cap = min(max_iter, 200_000)
    for k in range(1, cap + 1):
        sub = -(d_mat.T @ phi.subgradient(u_of(x)))
        x = spec.project(x - (c / math.sqrt(k)) * sub)
        obj = objective(x)
        if obj < best_obj:
            best_x, best_obj = x, obj
    # standard rate bound, honest but loose
    gap_est = gbound * math.sqrt(2.0 * max(g.max_degree, 1)) * (diam + c) / math.sqrt(cap)
    converged = gap_est <= tol_obj * (1.0 + abs(best_obj))
    return best_x, SolveReport(cap, best_obj, gap_est, converged,
                               method="projected-subgradient")


def _reachable_interval(g, base, spec):
    bound = spec.magnitude()
    reach = g.max_degree * bound
    return float(np.min(base)) - reach, float(np.max(base)) + reach


def min_separable_convex_over_polytope(g: "OrientedGraph", base, spec,
                                       phi: ConvexScalar,
                                       tol: "Tolerances | None" = None, *,
                                       warm_start=None,
                                       max_iter: int = DEFAULT_MAX_ITER):
    """Minimize ``sum_v phi(u(v))`` over ``u in {base - div H : H in spec}``.

    Method is chosen from the metadata on ``phi``: a curvature bound selects
    accelerated projected gradient on the true objective; otherwise a prox
    selects Moreau-smoothing continuation; otherwise projected subgradient
    with ``c/sqrt(k)`` steps is used.  The convergence contract is an
    objective gap below ``tol.solve_tol * (1 + |objective|)`` (default
    objective tolerance 1e-6); for the subgradient fallback the reported
    bound is the usual rate estimate and convergence may honestly be False.

    Returns
    -------
    (u, report) : the minimizing vertex field and a :class:`SolveReport`.
    """
    if tol is not None:
        tol_obj = tol.solve_tol
    else:
        tol_obj = DEFAULT_OBJECTIVE_TOL
    base = np.asarray(base, dtype=float)
    if base.shape != (g.vertex_count,):
        raise ValidationError("base must be a length-%d vertex field" % g.vertex_count)
    if not np.isfinite(base).all():
        raise ValidationError("base must be finite")
    _check_set(g, spec)

    if warm_start is not None:
        x0 = spec.project(_as_flow(g, warm_start, "warm_start"))
    else:
        x0 = spec.project(np.zeros(g.edge_count))

    if phi.curvature is not None:
        h, report = _smooth_descent(g, base, spec, phi, tol_obj, x0, max_iter)
    elif phi.prox is not None:
        h, report = _smoothing_descent(g, base, spec, phi, tol_obj, x0, max_iter)
    else:
        h, report = _subgradient_descent(g, base, spec, phi, tol_obj, x0, max_iter)

    u = base - g.incidence_matrix @ h
    return u, report
