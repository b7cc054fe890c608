"""Limited-memory BFGS with a strong Wolfe line search.

The line search is the bracketing/zoom scheme of Nocedal & Wright
(Algorithms 3.5 and 3.6) with safeguarded cubic interpolation.
"""
import logging
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import LineSearchFailure, NonFiniteObjective, NotDescentDirection, ValidationError

log = logging.getLogger(__name__)

MAX_LS_TRIALS = 50
CURVATURE_SKIP = 1e-10


@dataclass(frozen=True)
class LbfgsConfig:
    memory: int = 10
    c1: float = 1e-4
    c2: float = 0.9
    grad_tol: float = 1e-6
    max_iters: int = 500

    def __post_init__(self):
        if not 0 < self.c1 < self.c2 < 1:
            raise ValidationError("need 0 < c1 < c2 < 1")
        if self.memory < 1 or self.max_iters < 1 or self.grad_tol <= 0:
            raise ValidationError("memory, max_iters and grad_tol must be positive")


@dataclass
class WolfeStep:
    """One accepted line-search step, kept so callers can audit it."""

    t: float
    f0: float
    f1: float
    slope0: float
    slope1: float

    def satisfies(self, c1, c2):
        armijo = self.f1 <= self.f0 + c1 * self.t * self.slope0
        curvature = abs(self.slope1) <= c2 * abs(self.slope0)
        return armijo and curvature


@dataclass
class LbfgsResult:
    x: np.ndarray
    fun: float
    grad_norm: float
    n_iter: int
    converged: bool
    line_search_failed: bool = False
    message: str = ""
    trace: list = field(default_factory=list)
    steps: list = field(default_factory=list)


def _cubic_min(a, fa, ga, b, fb, gb):
    # minimizer of the cubic through (a, fa, ga), (b, fb, gb); None if undefined
    d1 = ga + gb - 3.0 * (fa - fb) / (a - b)
    rad = d1 * d1 - ga * gb
    if rad < 0:
        return None
    d2 = np.sign(b - a) * np.sqrt(rad)
    denom = gb - ga + 2.0 * d2
    if denom == 0:
        return None
    t = b - (b - a) * (gb + d2 - d1) / denom
    return t if np.isfinite(t) else None


def _interpolate(lo, hi):
    a, fa, ga = lo
    b, fb, gb = hi
    t = _cubic_min(a, fa, ga, b, fb, gb)
    left, right = min(a, b), max(a, b)
    width = right - left
    # stay clear of the bracket ends
    if t is None or not (left + 0.1 * width <= t <= right - 0.1 * width):
        t = 0.5 * (a + b)
    return t


def wolfe_line_search(f, grad, x, direction, c1=1e-4, c2=0.9, t0=1.0, f0=None, g0=None,
                      max_trials=MAX_LS_TRIALS):
    """Step length satisfying the strong Wolfe conditions along ``direction``.

    Returns ``(t, f_new, g_new)``. Raises ``LineSearchFailure`` when no such
    step is found within ``max_trials`` function evaluations.
    """
    f0 = f(x) if f0 is None else f0
    g0 = grad(x) if g0 is None else g0
    slope0 = float(g0 @ direction)
    if not slope0 < 0:
        raise NotDescentDirection(f"directional derivative {slope0:g} is not negative")

    trials = 0

    def phi(t):
        nonlocal trials
        trials += 1
        xt = x + t * direction
        ft = f(xt)
        if not np.isfinite(ft):
            return np.inf, None, np.nan
        gt = grad(xt)
        return ft, gt, float(gt @ direction)

    def zoom(lo, hi):
        # lo/hi are (t, f, slope, g); lo always satisfies Armijo with the lowest f
        while trials < max_trials:
            t = _interpolate(lo[:3], hi[:3])
            ft, gt, st = phi(t)
            if ft > f0 + c1 * t * slope0 or ft >= lo[1]:
                hi = (t, ft, st, gt)
            else:
                if abs(st) <= -c2 * slope0:
                    return t, ft, gt
                if st * (hi[0] - lo[0]) >= 0:
                    hi = lo
                lo = (t, ft, st, gt)
            if abs(hi[0] - lo[0]) <= 1e-16 * max(1.0, abs(lo[0])):
                break
        raise LineSearchFailure("zoom phase did not find a strong Wolfe point")

    prev = (0.0, f0, slope0, g0)
    t = t0
    for i in range(max_trials):
        ft, gt, st = phi(t)
        if ft > f0 + c1 * t * slope0 or (i > 0 and ft >= prev[1]):
            return zoom(prev, (t, ft, st, gt))
        if abs(st) <= -c2 * slope0:
            return t, ft, gt
        if st >= 0:
            return zoom((t, ft, st, gt), prev)
        prev = (t, ft, st, gt)
        t *= 2.0
        if trials >= max_trials:
            break
    raise LineSearchFailure("no strong Wolfe point in the allotted trials")


def two_loop_direction(g, s_hist, y_hist):
    """Search direction ``-H g`` from the L-BFGS two-loop recursion.

    The initial inverse Hessian is ``gamma * I`` with ``gamma = s.y / y.y``
    from the newest pair, or the identity when the history is empty.
    """
    q = np.array(g, dtype=float)
    rhos = [1.0 / float(y @ s) for s, y in zip(s_hist, y_hist)]
    alphas = []
    for s, y, rho in zip(reversed(s_hist), reversed(y_hist), reversed(rhos)):
        a = rho * float(s @ q)
        alphas.append(a)
        q -= a * y
    if s_hist:
        s, y = s_hist[-1], y_hist[-1]
        q *= float(s @ y) / float(y @ y)
    for s, y, rho, a in zip(s_hist, y_hist, rhos, reversed(alphas)):
        b = rho * float(y @ q)
        q += (a - b) * s
    return -q


def lbfgs_minimize(f, grad, x0, cfg=None, grad_ref=None):
    """Minimize ``f`` from ``x0``.

    Stops once ``||grad|| <= cfg.grad_tol * max(1, ref)`` where ``ref`` is
    ``grad_ref`` if given, else ``||grad(x0)||``; or after ``cfg.max_iters``
    iterations. A line-search failure ends the run early with
    ``line_search_failed`` set and the best iterate returned.
    """
    cfg = cfg or LbfgsConfig()
    x = np.array(x0, dtype=float).ravel()
    if not np.isfinite(x).all():
        raise ValidationError("x0 must be finite")
    fx = float(f(x))
    if not np.isfinite(fx):
        raise NonFiniteObjective("objective is not finite at x0")
    g = np.asarray(grad(x), dtype=float).ravel()
    gnorm = float(np.linalg.norm(g))
    ref = gnorm if grad_ref is None else float(grad_ref)
    tol = cfg.grad_tol * max(1.0, ref)

    s_hist, y_hist = deque(maxlen=cfg.memory), deque(maxlen=cfg.memory)
    res = LbfgsResult(x=x, fun=fx, grad_norm=gnorm, n_iter=0, converged=gnorm <= tol, trace=[fx])
    if res.converged:
        res.message = "initial point is stationary"
        return res

    for it in range(1, cfg.max_iters + 1):
        d = two_loop_direction(g, list(s_hist), list(y_hist))
        if float(g @ d) >= 0:
            # lost descent through round-off in the history; restart
            s_hist.clear()
            y_hist.clear()
            d = -g
        t0 = 1.0 if s_hist else min(1.0, 1.0 / gnorm)
        try:
            t, f_new, g_new = wolfe_line_search(f, grad, x, d, cfg.c1, cfg.c2, t0=t0, f0=fx, g0=g)
        except LineSearchFailure as exc:
            log.debug("line search failed at iteration %d: %s", it, exc)
            res.line_search_failed = True
            res.message = str(exc)
            break
        g_new = np.asarray(g_new, dtype=float).ravel()
        res.steps.append(WolfeStep(t, fx, float(f_new), float(g @ d), float(g_new @ d)))
        s = t * d
        y = g_new - g
        if float(s @ y) > CURVATURE_SKIP * np.linalg.norm(s) * np.linalg.norm(y):
            s_hist.append(s)
            y_hist.append(y)
        x, fx, g = x + s, float(f_new), g_new
        gnorm = float(np.linalg.norm(g))
        res.trace.append(fx)
        res.n_iter = it
        if gnorm <= tol:
            res.converged = True
            res.message = "gradient tolerance reached"
            break
    else:
        res.message = "iteration limit reached"

    res.x, res.fun, res.grad_norm = x, fx, gnorm
    return res
