"""Limited-memory BFGS with a backtracking Armijo line search.

Written in-house rather than wrapped so that training is bit-reproducible,
the accepted-step objective history is observable, and the stopping rule
is exactly "relative objective change < tol".  The two-loop recursion
follows Nocedal & Wright chapter 7; curvature pairs with tiny s'y are
skipped to keep the implicit Hessian positive definite.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass
class LbfgsResult:
    x: np.ndarray
    fval: float
    grad: np.ndarray
    iterations: int
    converged: bool
    message: str
    # objective after the initial point and after each accepted step
    history: list[float] = field(default_factory=list)


def _two_loop(grad, s_list, y_list, rho_list):
    q = grad.copy()
    alphas = []
    for s, y, rho in zip(reversed(s_list), reversed(y_list), reversed(rho_list)):
        a = rho * s.dot(q)
        alphas.append(a)
        q -= a * y
    if s_list:
        s, y = s_list[-1], y_list[-1]
        q *= s.dot(y) / y.dot(y)
    for (s, y, rho), a in zip(zip(s_list, y_list, rho_list), reversed(alphas)):
        b = rho * y.dot(q)
        q += (a - b) * s
    return q


def minimize_lbfgs(fun, x0, history_size: int = 10, max_iter: int = 200,
                   tol: float = 1e-5, c1: float = 1e-4,
                   max_backtracks: int = 50, callback=None) -> LbfgsResult:
    """Minimize fun(x) -> (value, gradient) starting from x0.

    Each accepted step satisfies the Armijo sufficient-decrease condition,
    so the recorded objective history is strictly non-increasing.  Stops
    when the relative objective change drops below tol, the gradient
    vanishes, or max_iter is hit.
    """
    x = np.asarray(x0, dtype=np.float64).copy()
    f, g = fun(x)
    history = [f]
    s_list, y_list, rho_list = [], [], []
    message = "max_iter reached"
    converged = False

    it = 0
    for it in range(1, max_iter + 1):
        gmax = np.max(np.abs(g)) if g.size else 0.0
        if gmax == 0.0:
            message = "gradient is zero"
            converged = True
            it -= 1
            break

        d = -_two_loop(g, s_list, y_list, rho_list)
        gtd = g.dot(d)
        if gtd >= 0.0:
            # implicit Hessian went bad; restart from steepest descent
            s_list, y_list, rho_list = [], [], []
            d = -g
            gtd = g.dot(d)
        step = min(1.0, 1.0 / np.sum(np.abs(g))) if not s_list else 1.0

        f_new = g_new = None
        for _ in range(max_backtracks):
            f_try, g_try = fun(x + step * d)
            if f_try <= f + c1 * step * gtd:
                f_new, g_new = f_try, g_try
                break
            step *= 0.5
        if f_new is None:
            message = "line search failed"
            it -= 1
            break

        s = step * d
        y = g_new - g
        sy = s.dot(y)
        if sy > 1e-10 * np.linalg.norm(s) * np.linalg.norm(y):
            s_list.append(s)
            y_list.append(y)
            rho_list.append(1.0 / sy)
            if len(s_list) > history_size:
                s_list.pop(0)
                y_list.pop(0)
                rho_list.pop(0)

        x = x + s
        rel_change = abs(f - f_new) / max(abs(f), abs(f_new), 1.0)
        f, g = f_new, g_new
        history.append(f)
        if callback is not None:
            callback(it, f, g)
        if rel_change < tol:
            message = "relative objective change below tol"
            converged = True
            break

    return LbfgsResult(x, f, g, it, converged, message, history)
