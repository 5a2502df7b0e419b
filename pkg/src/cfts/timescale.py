"""Hybrid time scales: closed subsets of the reals built from intervals,
uniform grids and isolated points on a bounded working window.

A time scale supplies the jump operators sigma/rho, the graininess mu,
point classification, and the segment walks (scattered points and dense
runs) that the calculus layer integrates over.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Union

from .errors import PointNotInTimeScale

#: Relative tolerance for deciding that a float coincides with a lattice point.
MEMBERSHIP_RTOL = 1e-12

#: Default number of subdivisions of a continuous interval for sampled meshes.
DENSE_DIVISIONS = 256


def _atol(t: float) -> float:
    return MEMBERSHIP_RTOL * max(1.0, abs(t))


def _close(x: float, y: float) -> bool:
    return abs(x - y) <= MEMBERSHIP_RTOL * max(1.0, abs(x), abs(y))


@dataclass(frozen=True)
class ContinuousInterval:
    """A closed real interval [a, b] with b > a."""

    a: float
    b: float

    def __post_init__(self):
        if not (math.isfinite(self.a) and math.isfinite(self.b)):
            raise ValueError("interval endpoints must be finite")
        if self.b <= self.a:
            raise ValueError(f"interval needs b > a, got [{self.a}, {self.b}]")

    @property
    def lo(self) -> float:
        return self.a

    @property
    def hi(self) -> float:
        return self.b


@dataclass(frozen=True)
class UniformGrid:
    """Points start, start+step, ..., start+(count-1)*step with step > 0."""

    start: float
    step: float
    count: int

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("grid step must be positive")
        if self.count < 1:
            raise ValueError("grid needs at least one point")

    def point(self, k: int) -> float:
        return self.start + k * self.step

    @property
    def lo(self) -> float:
        return self.start

    @property
    def hi(self) -> float:
        return self.point(self.count - 1)


@dataclass(frozen=True)
class IsolatedPoint:
    """A single point."""

    t: float

    @property
    def lo(self) -> float:
        return self.t

    @property
    def hi(self) -> float:
        return self.t


Segment = Union[ContinuousInterval, UniformGrid, IsolatedPoint]


class PointClass(Enum):
    """Classification of a point by the behavior of sigma and rho.

    Interior points get the two-sided tags; at the window boundary the
    convention sigma(max)=max, rho(min)=min says nothing about density,
    so the bare one-sided tags are used there.
    """

    DENSE = "dense"
    RIGHT_SCATTERED = "right-scattered"
    LEFT_SCATTERED = "left-scattered"
    ISOLATED = "isolated"
    RIGHT_DENSE_LEFT_SCATTERED = "right-dense-left-scattered"
    LEFT_DENSE_RIGHT_SCATTERED = "left-dense-right-scattered"


@dataclass(frozen=True)
class ScatteredAtom:
    """A right-scattered point t with jump mu = sigma(t) - t > 0."""

    t: float
    mu: float


@dataclass(frozen=True)
class DenseAtom:
    """A half-open dense run [lo, hi) inside a continuous interval."""

    lo: float
    hi: float

    @property
    def length(self) -> float:
        return self.hi - self.lo


Atom = Union[ScatteredAtom, DenseAtom]


def _normalize(segments: Iterable[Segment]) -> tuple[Segment, ...]:
    segs: list[Segment] = []
    for s in segments:
        if isinstance(s, UniformGrid) and s.count == 1:
            s = IsolatedPoint(s.start)
        segs.append(s)
    if not segs:
        raise ValueError("a time scale needs at least one segment")
    segs.sort(key=lambda s: s.lo)

    out: list[Segment] = []
    for cur in segs:
        if not out:
            out.append(cur)
            continue
        prev = out[-1]
        if cur.lo > prev.hi and not _close(cur.lo, prev.hi):
            out.append(cur)
            continue
        if cur.lo < prev.hi and not _close(cur.lo, prev.hi):
            raise ValueError(f"segments overlap near t={cur.lo!r}")
        # Segments touch at one shared point: keep the union, drop the duplicate.
        if isinstance(prev, ContinuousInterval) and isinstance(cur, ContinuousInterval):
            out[-1] = ContinuousInterval(prev.a, cur.b)
        elif isinstance(cur, IsolatedPoint):
            pass  # already covered by prev
        elif isinstance(cur, UniformGrid):
            if cur.count == 2:
                out.append(IsolatedPoint(cur.point(1)))
            else:
                out.append(UniformGrid(cur.point(1), cur.step, cur.count - 1))
        else:  # cur is an interval whose left end duplicates prev's last point
            if isinstance(prev, IsolatedPoint):
                out[-1] = cur
            else:  # prev is a grid: trim its duplicated last point
                assert isinstance(prev, UniformGrid)
                if prev.count == 2:
                    out[-1] = IsolatedPoint(prev.start)
                else:
                    out[-1] = UniformGrid(prev.start, prev.step, prev.count - 1)
                out.append(cur)
    return tuple(out)


@dataclass(frozen=True)
class TimeScale:
    """An ordered union of disjoint segments within a bounded window.

    Instances are immutable; every method is a pure function of its
    arguments, so concurrent use needs no synchronization.
    """

    segments: tuple[Segment, ...]
    window: tuple[float, float]

    # -- construction -----------------------------------------------------

    @classmethod
    def of(cls, *segments: Segment) -> "TimeScale":
        segs = _normalize(segments)
        return cls(segs, (segs[0].lo, segs[-1].hi))

    @classmethod
    def interval(cls, a: float, b: float) -> "TimeScale":
        return cls.of(ContinuousInterval(a, b))

    @classmethod
    def grid(cls, start: float, step: float, count: int) -> "TimeScale":
        """Uniform grid: start, start+step, ..., start+(count-1)*step."""
        return cls.of(UniformGrid(start, step, count))

    @classmethod
    def integers(cls, lo: int, hi: int) -> "TimeScale":
        """The integers lo..hi inclusive."""
        return cls.grid(float(lo), 1.0, hi - lo + 1)

    # -- membership -------------------------------------------------------

    @property
    def t_min(self) -> float:
        return self.window[0]

    @property
    def t_max(self) -> float:
        return self.window[1]

    @property
    def is_discrete(self) -> bool:
        return not any(isinstance(s, ContinuousInterval) for s in self.segments)

    def _locate(self, t: float) -> tuple[int, float]:
        """Return (segment index, snapped point) or raise PointNotInTimeScale."""
        for i, s in enumerate(self.segments):
            if t < s.lo - _atol(t):
                break
            if isinstance(s, ContinuousInterval):
                if s.a - _atol(t) <= t <= s.b + _atol(t):
                    if _close(t, s.a):
                        return i, s.a
                    if _close(t, s.b):
                        return i, s.b
                    return i, t
            elif isinstance(s, UniformGrid):
                k = round((t - s.start) / s.step)
                if 0 <= k < s.count and _close(t, s.point(k)):
                    return i, s.point(k)
            else:
                if _close(t, s.t):
                    return i, s.t
        raise PointNotInTimeScale(f"t={t!r} is not a point of the time scale")

    def __contains__(self, t: float) -> bool:
        try:
            self._locate(t)
            return True
        except PointNotInTimeScale:
            return False

    def snap(self, t: float) -> float:
        """Canonical representative of t (exact lattice value), or raise."""
        return self._locate(t)[1]

    # -- jump operators ---------------------------------------------------

    def sigma(self, t: float) -> float:
        """Forward jump: the nearest point strictly after t, or t at the max."""
        i, t = self._locate(t)
        s = self.segments[i]
        if isinstance(s, ContinuousInterval) and t < s.b:
            return t
        if isinstance(s, UniformGrid):
            k = round((t - s.start) / s.step)
            if k < s.count - 1:
                return s.point(k + 1)
        if i + 1 < len(self.segments):
            return self.segments[i + 1].lo
        return t

    def rho(self, t: float) -> float:
        """Backward jump: the nearest point strictly before t, or t at the min."""
        i, t = self._locate(t)
        s = self.segments[i]
        if isinstance(s, ContinuousInterval) and t > s.a:
            return t
        if isinstance(s, UniformGrid):
            k = round((t - s.start) / s.step)
            if k > 0:
                return s.point(k - 1)
        if i > 0:
            return self.segments[i - 1].hi
        return t

    def mu(self, t: float) -> float:
        """Graininess sigma(t) - t."""
        t = self.snap(t)
        return self.sigma(t) - t

    def classify(self, t: float) -> PointClass:
        t = self.snap(t)
        right_scattered = self.sigma(t) > t
        left_scattered = self.rho(t) < t
        if right_scattered and left_scattered:
            return PointClass.ISOLATED
        if not right_scattered and not left_scattered:
            return PointClass.DENSE
        if right_scattered:
            if t == self.t_min:
                return PointClass.RIGHT_SCATTERED
            return PointClass.LEFT_DENSE_RIGHT_SCATTERED
        if t == self.t_max:
            return PointClass.LEFT_SCATTERED
        return PointClass.RIGHT_DENSE_LEFT_SCATTERED

    def in_kappa_domain(self, t: float) -> bool:
        """Whether t belongs to the delta-differentiation domain.

        The left-scattered maximum of a bounded window is excluded.
        """
        t = self.snap(t)
        if t < self.t_max:
            return True
        return self.rho(self.t_max) == self.t_max  # max is left-dense

    # -- structure walks --------------------------------------------------

    def atoms(self, a: float, b: float) -> list[Atom]:
        """Decompose [a, b) into scattered points and maximal dense runs."""
        a = self.snap(a)
        b = self.snap(b)
        if b < a:
            raise ValueError(f"need a <= b, got a={a}, b={b}")
        out: list[Atom] = []
        if a == b:
            return out
        for i, s in enumerate(self.segments):
            if s.hi < a and not _close(s.hi, a):
                continue
            if s.lo >= b:
                break
            nxt = self.segments[i + 1].lo if i + 1 < len(self.segments) else None
            if isinstance(s, ContinuousInterval):
                lo, hi = max(s.a, a), min(s.b, b)
                if hi > lo:
                    out.append(DenseAtom(lo, hi))
                if s.b < b and s.b >= a:
                    out.append(ScatteredAtom(s.b, nxt - s.b))
            elif isinstance(s, UniformGrid):
                k_lo = max(0, math.ceil((a - s.start) / s.step - 0.5))
                while s.point(k_lo) < a and not _close(s.point(k_lo), a):
                    k_lo += 1
                for k in range(k_lo, s.count):
                    t = s.point(k)
                    if t >= b:
                        break
                    if k < s.count - 1:
                        out.append(ScatteredAtom(t, s.point(k + 1) - t))
                    else:
                        out.append(ScatteredAtom(t, nxt - t))
            else:
                if a <= s.t < b:
                    out.append(ScatteredAtom(s.t, nxt - s.t))
        return out

    def mesh(self, a: float, b: float, max_step: float | None = None) -> tuple[float, ...]:
        """All scattered points of [a, b] plus subdivided dense runs.

        Each dense run is split uniformly; by default into pieces no longer
        than the run's parent interval length divided by DENSE_DIVISIONS.
        """
        a = self.snap(a)
        b = self.snap(b)
        pts: list[float] = []
        for atom in self.atoms(a, b):
            if isinstance(atom, ScatteredAtom):
                pts.append(atom.t)
            else:
                step = max_step if max_step is not None else atom.length / DENSE_DIVISIONS
                n = max(1, math.ceil(atom.length / step - 1e-9))
                pts.extend(atom.lo + j * (atom.length / n) for j in range(n))
        pts.append(b)
        return tuple(pts)

    def graininess_values(self) -> tuple[float, ...]:
        """Distinct positive graininess values over the kappa domain."""
        vals: set[float] = set()
        for i, s in enumerate(self.segments):
            if isinstance(s, UniformGrid) and s.count >= 2:
                vals.add(s.step)
            if i + 1 < len(self.segments):
                vals.add(self.segments[i + 1].lo - s.hi)
        return tuple(sorted(vals))

    def has_dense_points(self) -> bool:
        return any(isinstance(s, ContinuousInterval) for s in self.segments)


# -- plain-text description ------------------------------------------------
#
# One segment per line:  "interval a b" | "grid start step count" | "point t"


def parse_segment(line: str) -> Segment:
    parts = line.split()
    kind = parts[0].lower()
    if kind == "interval" and len(parts) == 3:
        return ContinuousInterval(float(parts[1]), float(parts[2]))
    if kind == "grid" and len(parts) == 4:
        return UniformGrid(float(parts[1]), float(parts[2]), int(parts[3]))
    if kind == "point" and len(parts) == 2:
        return IsolatedPoint(float(parts[1]))
    raise ValueError(f"bad segment description: {line!r}")


def parse_timescale(text: str) -> TimeScale:
    segs = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            segs.append(parse_segment(line))
    return TimeScale.of(*segs)


def format_segment(seg: Segment) -> str:
    if isinstance(seg, ContinuousInterval):
        return f"interval {seg.a:g} {seg.b:g}"
    if isinstance(seg, UniformGrid):
        return f"grid {seg.start:g} {seg.step:g} {seg.count}"
    return f"point {seg.t:g}"
