"""Fractional delta operators with a non-singular exponential kernel.

For an order ``alpha`` in [0, 1) the kernel rate is ``alpha_bar =
alpha/(alpha - 1) <= 0`` and the left-sided derivative of f over [a, t] is

    (M(alpha)/(1-alpha)) * integral_a^t  f^delta(tau) e_{alpha_bar}(t, sigma(tau)) dtau,

the Caputo--Fabrizio construction carried to an arbitrary time scale: the
first-order delta derivative convolved with the time-scale exponential.
The right-sided operator integrates over [t, b] and needs reciprocal
kernel values.  The fractional integral of order alpha is the weighted
average (1-alpha)/M * u(t) + alpha/M * integral_0^t u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

from .calculus import QUAD_TOL, _kills, _quad, delta_derivative, delta_integral
from .errors import DomainError, NonRegressiveKernel
from .signals import Closure, Sampled, Signal, value
from .timescale import DenseAtom, ScatteredAtom, TimeScale, UniformGrid


@dataclass(frozen=True)
class CFOrder:
    """Fractional order alpha in [0, 1) with normalization constant.

    ``m_alpha`` defaults to 1, the choice that makes the fractional
    integral's two weights sum to one.
    """

    alpha: float
    m_alpha: float = 1.0

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise DomainError(f"order must satisfy 0 <= alpha < 1, got {self.alpha}")
        if self.m_alpha <= 0.0:
            raise DomainError("normalization m_alpha must be positive")

    @property
    def alpha_bar(self) -> float:
        """Kernel rate alpha/(alpha-1); zero iff alpha is zero, else negative."""
        return self.alpha / (self.alpha - 1.0)

    @property
    def front_factor(self) -> float:
        """M(alpha)/(1-alpha)."""
        return self.m_alpha / (1.0 - self.alpha)


def _span_in_single_grid(ts: TimeScale, a: float, t: float) -> bool:
    ia, _ = ts._locate(a)
    it, _ = ts._locate(t)
    return ia == it and isinstance(ts.segments[ia], UniformGrid)


def _f_delta_scattered(ts: TimeScale, f: Signal, tau: float, mu: float) -> float:
    return (value(f, ts, tau + mu) - value(f, ts, tau)) / mu


def _kernel_breakpoints(lo: float, hi: float, slope: float) -> list[float] | None:
    """Interior breakpoints aiding quadrature of a sharply peaked kernel.

    ``slope`` is the log-derivative of the weight in tau: positive means the
    weight peaks at the right end of the run.
    """
    if abs(slope) * (hi - lo) < 20.0:
        return None
    w = 1.0 / abs(slope)
    pts = [hi - 5.0 * w, hi - w] if slope > 0 else [lo + w, lo + 5.0 * w]
    pts = [p for p in pts if lo < p < hi]
    return pts or None


def _dense_weighted(ts: TimeScale, f: Signal, lo: float, hi: float, rate: float,
                    anchor: float, tol: float) -> float:
    """integral_lo^hi f^delta(tau) * exp(rate * (anchor - tau)) dtau on a dense run.

    Closures without an exact derivative are handled by integration by
    parts, which avoids numerical differentiation under the integral.
    """
    if isinstance(f, Closure) and f.derivative is not None:
        fn = lambda tau: f.derivative(tau) * math.exp(rate * (anchor - tau))
        return _quad(fn, lo, hi, tol, points=_kernel_breakpoints(lo, hi, -rate))
    if isinstance(f, Closure):
        bdry = (f.func(hi) * math.exp(rate * (anchor - hi))
                - f.func(lo) * math.exp(rate * (anchor - lo)))
        fn = lambda tau: f.func(tau) * math.exp(rate * (anchor - tau))
        return bdry + rate * _quad(fn, lo, hi, tol,
                                   points=_kernel_breakpoints(lo, hi, -rate))
    # Sampled: exact cell increments weighted by the midpoint kernel value.
    pts = [lo] + [m for m in f.mesh if lo < m < hi] + [hi]
    total = 0.0
    for p0, p1 in zip(pts, pts[1:]):
        dv = value(f, ts, p1) - value(f, ts, p0)
        total += dv * math.exp(rate * (anchor - 0.5 * (p0 + p1)))
    return total


def cf_delta_left(ts: TimeScale, f: Signal, a: float, t: float, order: CFOrder,
                  tol: float | None = None) -> float:
    """Left-sided fractional delta derivative of f over [a, t].

    At alpha = 0 this is exactly f(t) - f(a).  On a step-h grid it is the
    weighted backward sum

        (M/(1-alpha)) * sum_k  h f^delta(kh) (1 + h*alpha_bar)^(t/h - k - 1),

    with the usual 0**0 = 1 convention, so a degenerate kernel
    (1 + h*alpha_bar = 0) is allowed there; on hybrid spans a graininess
    equal to (1-alpha)/alpha raises NonRegressiveKernel instead of silently
    discarding the history before it.
    """
    tol = QUAD_TOL if tol is None else tol
    a = ts.snap(a)
    t = ts.snap(t)
    if t < a:
        raise DomainError(f"need a <= t, got a={a}, t={t}")
    if order.alpha == 0.0:
        return value(f, ts, t) - value(f, ts, a)
    if t == a:
        return 0.0
    rate = order.alpha_bar
    atoms = ts.atoms(a, t)
    degenerate = any(isinstance(x, ScatteredAtom) and _kills(x.mu, rate)
                     for x in atoms)
    if degenerate and not _span_in_single_grid(ts, a, t):
        raise NonRegressiveKernel(
            f"graininess equals (1-alpha)/alpha = {(1 - order.alpha) / order.alpha:g} "
            "inside a hybrid span")
    total = 0.0
    kernel = 1.0  # e_{alpha_bar}(t, pos), marching pos from t down to a
    for atom in reversed(atoms):
        if isinstance(atom, ScatteredAtom):
            if kernel != 0.0:
                fd = _f_delta_scattered(ts, f, atom.t, atom.mu)
                total += atom.mu * fd * kernel
            kernel *= 1.0 + atom.mu * rate
        else:
            if kernel != 0.0:
                total += kernel * _dense_weighted(ts, f, atom.lo, atom.hi,
                                                  rate, atom.hi, tol)
            kernel *= math.exp(rate * atom.length)
    return order.front_factor * total


def cf_delta_right(ts: TimeScale, f: Signal, t: float, b: float, order: CFOrder,
                   tol: float | None = None) -> float:
    """Right-sided fractional delta derivative of f over [t, b].

    At alpha = 0 this is exactly f(b) - f(t).  The kernel is evaluated
    backwards, e(t, sigma(tau)) = 1/e(sigma(tau), t), so every factor
    1 + mu*alpha_bar must be strictly nonzero.
    """
    tol = QUAD_TOL if tol is None else tol
    t = ts.snap(t)
    b = ts.snap(b)
    if b < t:
        raise DomainError(f"need t <= b, got t={t}, b={b}")
    if order.alpha == 0.0:
        return value(f, ts, b) - value(f, ts, t)
    if t == b:
        return 0.0
    rate = order.alpha_bar
    total = 0.0
    accum = 1.0  # e_{alpha_bar}(pos, t), marching pos from t up to b
    for atom in ts.atoms(t, b):
        if isinstance(atom, ScatteredAtom):
            if _kills(atom.mu, rate):
                raise NonRegressiveKernel(
                    f"kernel factor 1 + mu*alpha_bar vanishes at tau={atom.t!r}")
            accum *= 1.0 + atom.mu * rate
            fd = _f_delta_scattered(ts, f, atom.t, atom.mu)
            total += atom.mu * fd / accum
        else:
            # kernel at tau in the run: exp(rate*(lo - tau)) / accum
            total += _dense_weighted(ts, f, atom.lo, atom.hi,
                                     rate, atom.lo, tol) / accum
            accum *= math.exp(rate * atom.length)
    return order.front_factor * total


def cf_integral(ts: TimeScale, u: Signal, t: float, order: CFOrder,
                tol: float | None = None) -> float:
    """Fractional delta integral of order alpha from 0 to t.

    The affine combination ((1-alpha)/M) u(t) + (alpha/M) integral_0^t u;
    with M = 1 the weights average the function and its first-order
    integral.
    """
    if not 0.0 < order.alpha < 1.0:
        raise DomainError("fractional integral needs alpha in (0, 1)")
    t = ts.snap(t)
    if t < 0.0:
        raise DomainError("fractional integral starts at 0; need t >= 0")
    w = 1.0 / order.m_alpha
    return ((1.0 - order.alpha) * w * value(u, ts, t)
            + order.alpha * w * delta_integral(ts, u, 0.0, t, tol))


@dataclass(frozen=True)
class LimitEntry:
    alpha: float
    cf_value: float
    abs_error: float


@dataclass(frozen=True)
class LimitReport:
    """Evidence for the alpha -> 1 behavior of the left-sided operator."""

    delta_value: float
    entries: tuple[LimitEntry, ...]

    @property
    def errors_decreasing(self) -> bool:
        errs = [e.abs_error for e in self.entries]
        return all(b <= a * (1.0 + 1e-12) for a, b in zip(errs, errs[1:]))


def cf_limit_check(ts: TimeScale, f: Signal, a: float, t: float,
                   alphas: Sequence[float]) -> LimitReport:
    """Compare the fractional derivative against f^delta(t) along an
    increasing sequence of orders."""
    if any(b <= a_ for a_, b in zip(alphas, alphas[1:])) or not alphas:
        raise DomainError("alphas must be strictly increasing")
    if not all(0.0 <= al < 1.0 for al in alphas):
        raise DomainError("alphas must lie in [0, 1)")
    fd = delta_derivative(ts, f, t)
    entries = []
    for al in alphas:
        v = cf_delta_left(ts, f, a, t, CFOrder(al))
        entries.append(LimitEntry(al, v, abs(v - fd)))
    return LimitReport(fd, tuple(entries))
