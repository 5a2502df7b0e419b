"""Closed-form solutions of the linear fractional equation

    D^(alpha) x (t) = lambda * x(t) + u(t),    x(0) = x0,

where D^(alpha) is the left-sided exponential-kernel fractional delta
derivative based at 0.  With K = 1 - lambda*(1-alpha) nonzero and
p = lambda*alpha/K regressive, the solution is

    x(t) = x0 - (1/K)(1 - e_p(t,0)) x0 + ((1-alpha)/K)(u(t) - u(0))
           + (alpha/K^2) * integral_0^t e_p(t, sigma(tau)) u(tau) dtau.

Trajectories over a mesh use the one-step recurrence for the weighted
integral (O(n) instead of O(n^2) resummation).

The limiting order alpha = 1 degenerates to the classical delta equation
x^delta = lambda*x + u, provided here as ``classical_trajectory``.

Note: the closed form solves the equation pointwise exactly when the data
satisfy the start-up compatibility u(0) + lambda*x0 = 0 (the operator of
any function vanishes at t = 0, so the equation at t = 0 forces this).
For incompatible data the formula carries the parasitic residual
C * (e_{alpha_bar}(t,0)/(1-alpha) - lambda) with
C = (1 - 1/K) x0 - ((1-alpha)/K) u(0); ``residual_linear`` reports it
faithfully.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .calculus import QUAD_TOL, _kills, _quad, delta_derivative, exp_ts
from .errors import DomainError, NotRegressive
from .fractional import CFOrder, cf_delta_left
from .signals import Closure, Sampled, Signal, as_signal, value
from .timescale import DenseAtom, ScatteredAtom, TimeScale


@dataclass(frozen=True)
class LinearCFProblem:
    """Data (lambda, u, x0, alpha) of the linear equation on a time scale."""

    ts: TimeScale
    lam: float
    u: Signal
    x0: float
    order: CFOrder

    def __post_init__(self):
        if 0.0 not in self.ts:
            raise DomainError("the time scale must contain t = 0")
        if abs(self.k_alpha) <= 1e-14 * max(1.0, abs(self.lam)):
            raise NotRegressive(
                f"K(alpha) = 1 - lambda*(1-alpha) = {self.k_alpha:g} vanishes")
        for mu in self.ts.graininess_values():
            if _kills(mu, self.p_alpha):
                raise NotRegressive(
                    f"p(alpha) = {self.p_alpha:g} is not regressive: "
                    f"1 + mu*p = 0 at graininess {mu:g}")

    @property
    def k_alpha(self) -> float:
        return 1.0 - self.lam * (1.0 - self.order.alpha)

    @property
    def p_alpha(self) -> float:
        return self.lam * self.order.alpha / self.k_alpha


def _weighted_u_integral(prob: LinearCFProblem, t: float, tol: float) -> float:
    """integral_0^t e_p(t, sigma(tau)) u(tau) dtau, marching backward from t."""
    ts, p, u = prob.ts, prob.p_alpha, prob.u
    total = 0.0
    kernel = 1.0  # e_p(t, pos)
    for atom in reversed(ts.atoms(0.0, t)):
        if isinstance(atom, ScatteredAtom):
            total += atom.mu * value(u, ts, atom.t) * kernel
            kernel *= 1.0 + atom.mu * p
        else:
            total += kernel * _u_run_integral(ts, u, atom.lo, atom.hi, p, tol)
            kernel *= math.exp(p * atom.length)
    return total


def _u_run_integral(ts: TimeScale, u: Signal, lo: float, hi: float, p: float,
                    tol: float) -> float:
    """integral_lo^hi u(tau) exp(p*(hi - tau)) dtau over one dense run."""
    if isinstance(u, Closure):
        return _quad(lambda tau: u.func(tau) * math.exp(p * (hi - tau)), lo, hi, tol)
    pts = [lo] + [m for m in u.mesh if lo < m < hi] + [hi]
    total = 0.0
    for p0, p1 in zip(pts, pts[1:]):
        um = 0.5 * (value(u, ts, p0) + value(u, ts, p1))
        total += um * math.exp(p * (hi - 0.5 * (p0 + p1))) * (p1 - p0)
    return total


def solve_linear(prob: LinearCFProblem, t: float, tol: float | None = None) -> float:
    """Evaluate the closed-form solution at a single point t >= 0."""
    tol = QUAD_TOL if tol is None else tol
    ts = prob.ts
    t = ts.snap(t)
    if t < 0.0:
        raise DomainError("the solution formula is for t >= 0")
    if t == 0.0:
        return prob.x0
    K = prob.k_alpha
    alpha = prob.order.alpha
    ep = exp_ts(ts, prob.p_alpha, t, 0.0)
    u_t = value(prob.u, ts, t)
    u_0 = value(prob.u, ts, 0.0)
    integral = _weighted_u_integral(prob, t, tol)
    return (prob.x0
            - (1.0 - ep) * prob.x0 / K
            + (1.0 - alpha) * (u_t - u_0) / K
            + alpha * integral / (K * K))


def _resolve_mesh(ts: TimeScale, horizon: float | None, steps: int | None,
                  max_step: float | None) -> tuple[float, ...]:
    if (horizon is None) == (steps is None):
        raise DomainError("give exactly one of horizon (a point) or steps (a count)")
    if horizon is not None:
        return ts.mesh(0.0, horizon, max_step)
    mesh = ts.mesh(0.0, ts.t_max, max_step)
    if steps >= len(mesh):
        raise DomainError(
            f"horizon of {steps} steps exceeds the window ({len(mesh) - 1} steps)")
    return mesh[: steps + 1]


def solve_linear_trajectory(prob: LinearCFProblem, horizon: float | None = None,
                            steps: int | None = None, max_step: float | None = None,
                            tol: float | None = None) -> Sampled:
    """Solution sampled on the mesh of [0, horizon] via one-step recurrences."""
    tol = QUAD_TOL if tol is None else tol
    ts = prob.ts
    mesh = _resolve_mesh(ts, horizon, steps, max_step)
    K = prob.k_alpha
    alpha = prob.order.alpha
    p = prob.p_alpha
    u_0 = value(prob.u, ts, 0.0)

    xs = [prob.x0]
    ep = 1.0       # e_p(t_k, 0)
    integral = 0.0  # integral_0^{t_k} e_p(t_k, sigma(tau)) u(tau) dtau
    for t_prev, t_cur in zip(mesh, mesh[1:]):
        mu = ts.mu(t_prev)
        if mu > 0.0:  # scattered step: t_cur == sigma(t_prev)
            integral = (1.0 + mu * p) * integral + mu * value(prob.u, ts, t_prev)
            ep *= 1.0 + mu * p
        else:
            delta = t_cur - t_prev
            grow = math.exp(p * delta)
            integral = grow * integral + _u_run_integral(ts, prob.u, t_prev, t_cur, p, tol)
            ep *= grow
        u_t = value(prob.u, ts, t_cur)
        xs.append(prob.x0
                  - (1.0 - ep) * prob.x0 / K
                  + (1.0 - alpha) * (u_t - u_0) / K
                  + alpha * integral / (K * K))
    return Sampled(mesh, tuple(xs))


def residual_linear(prob: LinearCFProblem, x: Signal, t: float,
                    tol: float | None = None) -> float:
    """Defect D^(alpha) x (t) - lambda*x(t) - u(t), via the operator module."""
    ts = prob.ts
    t = ts.snap(t)
    lhs = cf_delta_left(ts, x, 0.0, t, prob.order, tol)
    return lhs - prob.lam * value(x, ts, t) - value(prob.u, ts, t)


def classical_trajectory(ts: TimeScale, lam: float, u, x0: float,
                         horizon: float | None = None, steps: int | None = None,
                         max_step: float | None = None,
                         tol: float | None = None) -> Sampled:
    """Exact trajectory of the classical delta equation x^delta = lambda*x + u.

    Scattered steps use the exact recurrence x' = x + mu*(lambda*x + u);
    dense steps use the variation-of-constants formula with quadrature.
    This is the alpha = 1 limit of the fractional equation.
    """
    tol = QUAD_TOL if tol is None else tol
    u = as_signal(u)
    mesh = _resolve_mesh(ts, horizon, steps, max_step)
    xs = [x0]
    for t_prev, t_cur in zip(mesh, mesh[1:]):
        mu = ts.mu(t_prev)
        x = xs[-1]
        if mu > 0.0:
            xs.append(x + mu * (lam * x + value(u, ts, t_prev)))
        else:
            grow = math.exp(lam * (t_cur - t_prev))
            forced = _u_run_integral(ts, u, t_prev, t_cur, lam, tol)
            xs.append(grow * x + forced)
    return Sampled(mesh, tuple(xs))


def classical_residual(ts: TimeScale, lam: float, u, x: Signal, t: float) -> float:
    """Defect x^delta(t) - lambda*x(t) - u(t) of the classical equation."""
    u = as_signal(u)
    return (delta_derivative(ts, x, t)
            - lam * value(x, ts, t) - value(u, ts, t))
