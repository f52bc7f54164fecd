"""Closed intervals, boxes, and interval matrices over IEEE-754 doubles.

The rounding policy decides how endpoint arithmetic treats floating-point
error. ``OUTWARD`` (the default) nudges every computed endpoint one ulp
away from the interval after each primitive, so results are supersets of
the exact real-arithmetic result; ``EXACT`` computes plain double
arithmetic and is meant for unit tests against hand-computed values.
Vectorised kernels at the bottom of this module replace the per-primitive
nudge by a forward-error inflation of accumulated sums, which gives the
same superset guarantee at array speed.
"""

from __future__ import annotations

import enum
import math
from contextvars import ContextVar
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import (
    DimensionMismatch,
    DivisionByIntervalContainingZero,
    VertexBudgetExceeded,
)

_INF = math.inf

# Unit roundoff of float64 is 2**-53; slack formulas below use a factor-4
# margin so second-order terms and the error of the |.|-sum itself are
# covered without case analysis.
_EPS4 = 4.0 * 2.0**-53
_TINY = 2.0**-1022

DEFAULT_VERTEX_CAP = 20


class RoundingPolicy(enum.Enum):
    """Endpoint rounding mode for all interval operations."""

    EXACT = "exact"
    OUTWARD = "outward"


_POLICY: ContextVar[RoundingPolicy] = ContextVar("rounding_policy", default=RoundingPolicy.OUTWARD)


def current_policy() -> RoundingPolicy:
    """Return the rounding policy in effect for the calling context."""
    return _POLICY.get()


class rounding:
    """Context manager that switches the rounding policy.

    Usage::

        with rounding(RoundingPolicy.EXACT):
            assert (Interval(-1, 2) * Interval(3, 4)) == Interval(-4, 8)
    """

    def __init__(self, policy: RoundingPolicy | str):
        if isinstance(policy, str):
            policy = RoundingPolicy(policy)
        self._policy = policy
        self._token = None

    def __enter__(self) -> RoundingPolicy:
        self._token = _POLICY.set(self._policy)
        return self._policy

    def __exit__(self, *exc) -> None:
        _POLICY.reset(self._token)


def _down(x: float) -> float:
    return math.nextafter(x, -_INF)


def _up(x: float) -> float:
    return math.nextafter(x, _INF)


def _down2(x: float) -> float:
    # two ulps, for libm results that are faithful but not correctly rounded
    return math.nextafter(math.nextafter(x, -_INF), -_INF)


def _up2(x: float) -> float:
    return math.nextafter(math.nextafter(x, _INF), _INF)


class Interval:
    """A closed interval [lo, hi] of reals, lo <= hi, endpoints finite doubles.

    Instances are immutable; every operation returns a new interval and is
    pure given the ambient rounding policy. Empty intervals do not exist:
    construction with lo > hi raises.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo: float, hi: float | None = None):
        if hi is None:
            hi = lo
        lo = float(lo)
        hi = float(hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if lo > hi:
            raise ValueError(f"empty interval: lo={lo!r} > hi={hi!r}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    def __setattr__(self, name, value):
        raise AttributeError("Interval is immutable")

    # -- basic queries ---------------------------------------------------

    def width(self) -> float:
        """Upper endpoint minus lower endpoint."""
        return self.hi - self.lo

    def mag(self) -> float:
        """Largest absolute value over the interval."""
        return max(abs(self.lo), abs(self.hi))

    def mid(self) -> float:
        m = 0.5 * (self.lo + self.hi)
        if not math.isfinite(m):
            m = 0.5 * self.lo + 0.5 * self.hi
        return m

    def is_singleton(self) -> bool:
        return self.lo == self.hi

    def contains(self, x: float) -> bool:
        return self.lo <= x <= self.hi

    def contains_interval(self, other: "Interval") -> bool:
        return self.lo <= other.lo and other.hi <= self.hi

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    # -- arithmetic ------------------------------------------------------

    @staticmethod
    def _coerce(x) -> "Interval":
        if isinstance(x, Interval):
            return x
        return Interval(float(x))

    def __add__(self, other) -> "Interval":
        other = self._coerce(other)
        lo = self.lo + other.lo
        hi = self.hi + other.hi
        if _POLICY.get() is RoundingPolicy.OUTWARD:
            return Interval(_down(lo), _up(hi))
        return Interval(lo, hi)

    __radd__ = __add__

    def __sub__(self, other) -> "Interval":
        other = self._coerce(other)
        lo = self.lo - other.hi
        hi = self.hi - other.lo
        if _POLICY.get() is RoundingPolicy.OUTWARD:
            return Interval(_down(lo), _up(hi))
        return Interval(lo, hi)

    def __rsub__(self, other) -> "Interval":
        return self._coerce(other).__sub__(self)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other) -> "Interval":
        other = self._coerce(other)
        ll = self.lo * other.lo
        lh = self.lo * other.hi
        hl = self.hi * other.lo
        hh = self.hi * other.hi
        lo = min(ll, lh, hl, hh)
        hi = max(ll, lh, hl, hh)
        if _POLICY.get() is RoundingPolicy.OUTWARD:
            return Interval(_down(lo), _up(hi))
        return Interval(lo, hi)

    __rmul__ = __mul__

    def reciprocal(self) -> "Interval":
        if self.lo <= 0.0 <= self.hi:
            raise DivisionByIntervalContainingZero(
                f"cannot take reciprocal of {self}: it contains zero"
            )
        lo = 1.0 / self.hi
        hi = 1.0 / self.lo
        if _POLICY.get() is RoundingPolicy.OUTWARD:
            return Interval(_down(lo), _up(hi))
        return Interval(lo, hi)

    def __truediv__(self, other) -> "Interval":
        # division is multiplication by the reciprocal
        return self * self._coerce(other).reciprocal()

    def __rtruediv__(self, other) -> "Interval":
        return self._coerce(other) * self.reciprocal()

    def __abs__(self) -> "Interval":
        if self.lo >= 0.0:
            return self
        if self.hi < 0.0:
            return Interval(-self.hi, -self.lo)
        return Interval(0.0, max(-self.lo, self.hi))

    def abs_pow(self, gamma: float) -> "Interval":
        """Range of |x|**gamma over the interval, gamma > 0.

        Width never exceeds the width of |X|**gamma taken endpointwise,
        since t -> t**gamma is monotone on [0, inf).
        """
        a = abs(self)
        if gamma == 1.0:
            return a
        lo = a.lo**gamma
        hi = a.hi**gamma
        if _POLICY.get() is RoundingPolicy.OUTWARD:
            return Interval(max(0.0, _down(lo)), _up(hi))
        return Interval(lo, hi)

    def __pow__(self, k: int) -> "Interval":
        if not isinstance(k, int):
            raise TypeError("interval power expects an integer exponent; use abs_pow for real gamma")
        if k == 0:
            return Interval(1.0)
        if k < 0:
            return (self ** (-k)).reciprocal()
        if k % 2 == 0:
            return self.abs_pow(float(k))
        lo = self.lo**k
        hi = self.hi**k
        if _POLICY.get() is RoundingPolicy.OUTWARD:
            return Interval(_down(lo), _up(hi))
        return Interval(lo, hi)

    # -- elementary functions (used by coefficient expressions) ----------

    def exp(self) -> "Interval":
        lo = math.exp(self.lo)
        hi = math.exp(self.hi)
        if _POLICY.get() is RoundingPolicy.OUTWARD:
            return Interval(max(0.0, _down2(lo)), _up2(hi))
        return Interval(lo, hi)

    def sqrt(self) -> "Interval":
        if self.lo < 0.0:
            raise ValueError(f"sqrt of interval reaching below zero: {self}")
        lo = math.sqrt(self.lo)
        hi = math.sqrt(self.hi)
        if _POLICY.get() is RoundingPolicy.OUTWARD:
            return Interval(max(0.0, _down2(lo)), _up2(hi))
        return Interval(lo, hi)

    def tanh(self) -> "Interval":
        lo = math.tanh(self.lo)
        hi = math.tanh(self.hi)
        if _POLICY.get() is RoundingPolicy.OUTWARD:
            return Interval(max(-1.0, _down2(lo)), min(1.0, _up2(hi)))
        return Interval(lo, hi)

    def _trig_range(self, fn, crest_offset: float) -> "Interval":
        """Shared sin/cos range logic.

        ``crest_offset`` is the abscissa of a maximum (pi/2 for sin, 0 for
        cos); maxima repeat with period 2*pi and minima sit a half period
        away. The search window is padded by a few ulps so a critical point
        missed through division rounding still counts (padding only ever
        widens the result, which is the sound direction).
        """
        pad = 4.0 * _EPS4 * max(abs(self.lo), abs(self.hi)) + 1e-300
        a = self.lo - pad
        b = self.hi + pad
        two_pi = 2.0 * math.pi
        va = fn(self.lo)
        vb = fn(self.hi)
        lo = min(va, vb)
        hi = max(va, vb)
        if math.ceil((a - crest_offset) / two_pi) <= math.floor((b - crest_offset) / two_pi):
            hi = 1.0
        trough = crest_offset + math.pi
        if math.ceil((a - trough) / two_pi) <= math.floor((b - trough) / two_pi):
            lo = -1.0
        if _POLICY.get() is RoundingPolicy.OUTWARD:
            return Interval(max(-1.0, _down2(lo)), min(1.0, _up2(hi)))
        return Interval(lo, hi)

    def sin(self) -> "Interval":
        if self.width() >= 2.0 * math.pi:
            return Interval(-1.0, 1.0)
        return self._trig_range(math.sin, 0.5 * math.pi)

    def cos(self) -> "Interval":
        if self.width() >= 2.0 * math.pi:
            return Interval(-1.0, 1.0)
        return self._trig_range(math.cos, 0.0)

    # -- misc ------------------------------------------------------------

    def __eq__(self, other) -> bool:
        return isinstance(other, Interval) and self.lo == other.lo and self.hi == other.hi

    def __hash__(self) -> int:
        return hash((self.lo, self.hi))

    def __repr__(self) -> str:
        return f"Interval({self.lo!r}, {self.hi!r})"

    def __str__(self) -> str:
        return f"[{self.lo:.17g}, {self.hi:.17g}]"


class Box:
    """An axis-aligned box: the cartesian product of d intervals.

    Doubles as the interval-vector type; component i is the interval
    [lo[i], hi[i]]. Degenerate axes (zero width) are legal.
    """

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        if lo.ndim != 1 or lo.shape != hi.shape:
            raise DimensionMismatch(
                f"box endpoints must be equal-length 1-d arrays, got {lo.shape} and {hi.shape}"
            )
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)):
            raise ValueError("box endpoints must not be NaN")
        if np.any(lo > hi):
            i = int(np.argmax(lo > hi))
            raise ValueError(f"empty box: axis {i} has lo={lo[i]!r} > hi={hi[i]!r}")
        self_lo = np.array(lo, dtype=np.float64, copy=True)
        self_hi = np.array(hi, dtype=np.float64, copy=True)
        self_lo.flags.writeable = False
        self_hi.flags.writeable = False
        object.__setattr__(self, "lo", self_lo)
        object.__setattr__(self, "hi", self_hi)

    def __setattr__(self, name, value):
        raise AttributeError("Box is immutable")

    @classmethod
    def from_intervals(cls, intervals: Iterable[Interval]) -> "Box":
        ivs = list(intervals)
        return cls([iv.lo for iv in ivs], [iv.hi for iv in ivs])

    @classmethod
    def singleton(cls, point) -> "Box":
        p = np.asarray(point, dtype=np.float64)
        return cls(p, p)

    @property
    def dim(self) -> int:
        return self.lo.shape[0]

    def axis(self, i: int) -> Interval:
        return Interval(float(self.lo[i]), float(self.hi[i]))

    def intervals(self) -> list[Interval]:
        return [self.axis(i) for i in range(self.dim)]

    def widths(self) -> np.ndarray:
        return self.hi - self.lo

    def width(self) -> float:
        """Maximum component width."""
        if self.dim == 0:
            return 0.0
        return float(np.max(self.hi - self.lo))

    def volume(self) -> float:
        return float(np.prod(self.hi - self.lo))

    def midpoint(self) -> np.ndarray:
        return 0.5 * (self.lo + self.hi)

    def contains_point(self, x) -> bool:
        x = np.asarray(x, dtype=np.float64)
        return bool(np.all(self.lo <= x) and np.all(x <= self.hi))

    def contains_box(self, other: "Box") -> bool:
        return bool(np.all(self.lo <= other.lo) and np.all(other.hi <= self.hi))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n uniform points in the box, shape (n, d)."""
        u = rng.random((n, self.dim))
        return self.lo + u * (self.hi - self.lo)

    def vertices(self, cap: int = DEFAULT_VERTEX_CAP) -> np.ndarray:
        """All 2**d corner points, shape (2**d, d), lowest-bit = axis 0.

        Raises VertexBudgetExceeded when d exceeds ``cap``; enumerating
        beyond ~2**20 corners is never what the caller wants.
        """
        d = self.dim
        if d > cap:
            raise VertexBudgetExceeded(
                f"box has {d} axes; vertex enumeration capped at {cap} (2**{cap} corners)"
            )
        idx = np.arange(2**d, dtype=np.uint32)
        bits = (idx[:, None] >> np.arange(d, dtype=np.uint32)[None, :]) & 1
        return np.where(bits == 1, self.hi[None, :], self.lo[None, :])

    def split_axis(self, i: int, at: float) -> tuple["Box", "Box"]:
        if not (self.lo[i] <= at <= self.hi[i]):
            raise ValueError(f"split point {at!r} outside axis {i} of {self}")
        left_hi = self.hi.copy()
        left_hi[i] = at
        right_lo = self.lo.copy()
        right_lo[i] = at
        return Box(self.lo, left_hi), Box(right_lo, self.hi)

    def halve(self) -> list["Box"]:
        """Bisect every axis at its midpoint: 2**d children."""
        mid = self.midpoint()
        children = [self]
        for i in range(self.dim):
            nxt: list[Box] = []
            for b in children:
                left, right = b.split_axis(i, float(mid[i]))
                nxt.append(left)
                if right.lo[i] < right.hi[i] or left.hi[i] < right.hi[i]:
                    nxt.append(right)
                # a degenerate axis yields identical halves; keep one
            children = nxt
        return children

    def grid(self, counts: Sequence[int]) -> list["Box"]:
        """Uniform per-axis subdivision into prod(counts) children.

        counts[i] >= 1 subintervals along axis i; child edges are computed
        from the axis endpoints, so the union of children is exactly self.
        """
        if len(counts) != self.dim:
            raise DimensionMismatch(f"need {self.dim} counts, got {len(counts)}")
        edges = []
        for i, m in enumerate(counts):
            m = int(m)
            if m < 1:
                raise ValueError(f"axis {i}: subdivision count must be >= 1, got {m}")
            a, b = float(self.lo[i]), float(self.hi[i])
            e = a + (b - a) * np.arange(m + 1) / m
            e[0], e[-1] = a, b
            edges.append(np.maximum.accumulate(e))  # monotone despite rounding
        out: list[Box] = []
        index = [0] * self.dim
        total = int(np.prod([len(e) - 1 for e in edges]))
        for flat in range(total):
            rem = flat
            lo = np.empty(self.dim)
            hi = np.empty(self.dim)
            for i in range(self.dim):
                m = len(edges[i]) - 1
                j = rem % m
                rem //= m
                lo[i] = edges[i][j]
                hi[i] = edges[i][j + 1]
            out.append(Box(lo, hi))
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Box)
            and self.dim == other.dim
            and bool(np.all(self.lo == other.lo))
            and bool(np.all(self.hi == other.hi))
        )

    def __repr__(self) -> str:
        pairs = ", ".join(f"[{l:.17g}, {h:.17g}]" for l, h in zip(self.lo, self.hi))
        return f"Box({pairs})"


class IntervalMatrix:
    """A matrix of intervals, stored as endpoint arrays lo <= hi."""

    __slots__ = ("lo", "hi")

    def __init__(self, lo, hi):
        lo = np.asarray(lo, dtype=np.float64)
        hi = np.asarray(hi, dtype=np.float64)
        if lo.ndim != 2 or lo.shape != hi.shape:
            raise DimensionMismatch(
                f"matrix endpoints must be equal-shape 2-d arrays, got {lo.shape} and {hi.shape}"
            )
        if np.any(np.isnan(lo)) or np.any(np.isnan(hi)) or np.any(lo > hi):
            raise ValueError("invalid interval matrix endpoints")
        self_lo = np.array(lo, copy=True)
        self_hi = np.array(hi, copy=True)
        self_lo.flags.writeable = False
        self_hi.flags.writeable = False
        object.__setattr__(self, "lo", self_lo)
        object.__setattr__(self, "hi", self_hi)

    def __setattr__(self, name, value):
        raise AttributeError("IntervalMatrix is immutable")

    @classmethod
    def from_point(cls, a) -> "IntervalMatrix":
        a = np.asarray(a, dtype=np.float64)
        return cls(a, a)

    @classmethod
    def from_intervals(cls, rows: Sequence[Sequence[Interval]]) -> "IntervalMatrix":
        lo = [[iv.lo for iv in row] for row in rows]
        hi = [[iv.hi for iv in row] for row in rows]
        return cls(lo, hi)

    @property
    def shape(self) -> tuple[int, int]:
        return self.lo.shape

    def entry(self, i: int, j: int) -> Interval:
        return Interval(float(self.lo[i, j]), float(self.hi[i, j]))

    def width(self) -> float:
        """Maximum entry width."""
        if self.lo.size == 0:
            return 0.0
        return float(np.max(self.hi - self.lo))

    def norm(self) -> float:
        """Max row sum of entry magnitudes (interval operator infinity-norm)."""
        if self.lo.size == 0:
            return 0.0
        mags = np.maximum(np.abs(self.lo), np.abs(self.hi))
        return float(np.max(np.sum(mags, axis=1)))

    def transpose(self) -> "IntervalMatrix":
        return IntervalMatrix(self.lo.T, self.hi.T)

    def __add__(self, other: "IntervalMatrix") -> "IntervalMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot add {self.shape} and {other.shape}")
        lo, hi = iv_add(self.lo, self.hi, other.lo, other.hi)
        return IntervalMatrix(lo, hi)

    def __sub__(self, other: "IntervalMatrix") -> "IntervalMatrix":
        if self.shape != other.shape:
            raise DimensionMismatch(f"cannot subtract {self.shape} and {other.shape}")
        lo, hi = iv_sub(self.lo, self.hi, other.lo, other.hi)
        return IntervalMatrix(lo, hi)

    def __matmul__(self, other: "IntervalMatrix") -> "IntervalMatrix":
        if self.shape[1] != other.shape[0]:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        lo, hi = iv_matmul(self.lo, self.hi, other.lo, other.hi)
        return IntervalMatrix(lo, hi)

    def contains_matrix(self, a) -> bool:
        """Entrywise containment of a point matrix."""
        a = np.asarray(a, dtype=np.float64)
        if a.shape != self.shape:
            raise DimensionMismatch(f"point matrix {a.shape} vs interval matrix {self.shape}")
        return bool(np.all(self.lo <= a) and np.all(a <= self.hi))

    def __repr__(self) -> str:
        return f"IntervalMatrix(shape={self.shape}, width={self.width():.3e})"


# ---------------------------------------------------------------------------
# Vectorised endpoint kernels.
#
# All kernels take and return plain (lo, hi) float64 ndarray pairs and read
# the ambient rounding policy. In OUTWARD mode, elementwise results get a
# one-ulp nudge; accumulated results (dot products, matmuls) get inflated
# by a forward error bound c*n*u*sum|terms| instead, which is a superset of
# what per-primitive directed rounding would have produced.
# ---------------------------------------------------------------------------


def _outward() -> bool:
    return _POLICY.get() is RoundingPolicy.OUTWARD


def _nudge(lo: np.ndarray, hi: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    return np.nextafter(lo, -_INF), np.nextafter(hi, _INF)


def _inflate(
    lo: np.ndarray, hi: np.ndarray, scale: np.ndarray, ops: int
) -> tuple[np.ndarray, np.ndarray]:
    """Widen [lo, hi] by the rounding slack of an ``ops``-term accumulation.

    ``scale`` bounds the sum of absolute values of the accumulated terms.
    """
    slack = (_EPS4 * ops) * scale + _TINY
    return lo - slack, hi + slack


def iv_add(alo, ahi, blo, bhi):
    lo = alo + blo
    hi = ahi + bhi
    if _outward():
        return _nudge(lo, hi)
    return lo, hi


def iv_sub(alo, ahi, blo, bhi):
    lo = alo - bhi
    hi = ahi - blo
    if _outward():
        return _nudge(lo, hi)
    return lo, hi


def iv_mul(alo, ahi, blo, bhi):
    """Elementwise interval product (broadcasting as numpy does)."""
    ll = alo * blo
    lh = alo * bhi
    hl = ahi * blo
    hh = ahi * bhi
    lo = np.minimum(np.minimum(ll, lh), np.minimum(hl, hh))
    hi = np.maximum(np.maximum(ll, lh), np.maximum(hl, hh))
    if _outward():
        return _nudge(lo, hi)
    return lo, hi


def iv_scale(c, xlo, xhi):
    """Elementwise product of a point array c with an interval array."""
    a = c * xlo
    b = c * xhi
    lo = np.minimum(a, b)
    hi = np.maximum(a, b)
    if _outward():
        return _nudge(lo, hi)
    return lo, hi


def iv_affine(W, b, xlo, xhi):
    """W @ x + b for point W, b and interval vector x."""
    Wp = np.maximum(W, 0.0)
    Wn = np.maximum(-W, 0.0)
    lo = Wp @ xlo - Wn @ xhi + b
    hi = Wp @ xhi - Wn @ xlo + b
    if _outward():
        mags = np.maximum(np.abs(xlo), np.abs(xhi))
        scale = np.abs(W) @ mags + np.abs(b)
        return _inflate(lo, hi, scale, 2 * W.shape[1] + 2)
    return lo, hi


def iv_matmul_point_left(P, xlo, xhi):
    """P @ X for point matrix P and interval matrix/vector X."""
    Pp = np.maximum(P, 0.0)
    Pn = np.maximum(-P, 0.0)
    lo = Pp @ xlo - Pn @ xhi
    hi = Pp @ xhi - Pn @ xlo
    if _outward():
        mags = np.maximum(np.abs(xlo), np.abs(xhi))
        scale = np.abs(P) @ mags
        return _inflate(lo, hi, scale, 2 * P.shape[-1] + 1)
    return lo, hi


def iv_matmul_point_right(xlo, xhi, P):
    """X @ P for interval matrix X and point matrix P."""
    Pp = np.maximum(P, 0.0)
    Pn = np.maximum(-P, 0.0)
    lo = xlo @ Pp - xhi @ Pn
    hi = xhi @ Pp - xlo @ Pn
    if _outward():
        mags = np.maximum(np.abs(xlo), np.abs(xhi))
        scale = mags @ np.abs(P)
        return _inflate(lo, hi, scale, 2 * P.shape[0] + 1)
    return lo, hi


def iv_matmul(alo, ahi, blo, bhi):
    """Full interval-times-interval matrix product via the four products."""
    n = alo.shape[-1]
    ll = np.einsum("ij,jk->ijk", alo, blo)
    lh = np.einsum("ij,jk->ijk", alo, bhi)
    hl = np.einsum("ij,jk->ijk", ahi, blo)
    hh = np.einsum("ij,jk->ijk", ahi, bhi)
    pmin = np.minimum(np.minimum(ll, lh), np.minimum(hl, hh))
    pmax = np.maximum(np.maximum(ll, lh), np.maximum(hl, hh))
    lo = pmin.sum(axis=1)
    hi = pmax.sum(axis=1)
    if _outward():
        scale = np.maximum(np.abs(pmin), np.abs(pmax)).sum(axis=1)
        return _inflate(lo, hi, scale, n + 2)
    return lo, hi


def iv_sum(xlo, xhi, axis=None):
    """Sum of an interval array along an axis."""
    lo = xlo.sum(axis=axis)
    hi = xhi.sum(axis=axis)
    if _outward():
        n = xlo.size if axis is None else xlo.shape[axis]
        scale = np.maximum(np.abs(xlo), np.abs(xhi)).sum(axis=axis)
        return _inflate(lo, hi, scale, n)
    return lo, hi


def iv_quadform(W, dlo, dhi):
    """W.T @ diag(d) @ W for point matrix W and interval vector d.

    Entry (a, b) is sum_j W[j,a] * d[j] * W[j,b]; the result is symmetric
    up to rounding in exact mode and symmetric by construction here since
    the same products are accumulated for (a, b) and (b, a).
    """
    # products W[j,a]*W[j,b] are points; scale them by the interval d[j]
    prods = np.einsum("ja,jb->jab", W, W)
    tlo = np.where(prods >= 0.0, prods * dlo[:, None, None], prods * dhi[:, None, None])
    thi = np.where(prods >= 0.0, prods * dhi[:, None, None], prods * dlo[:, None, None])
    lo = tlo.sum(axis=0)
    hi = thi.sum(axis=0)
    if _outward():
        scale = (np.abs(prods) * np.maximum(np.abs(dlo), np.abs(dhi))[:, None, None]).sum(axis=0)
        return _inflate(lo, hi, scale, W.shape[0] + 2)
    return lo, hi


def hull_many(lo: np.ndarray, hi: np.ndarray, axis=0):
    """Componentwise convex hull of a family of interval arrays."""
    return lo.min(axis=axis), hi.max(axis=axis)


__all__ = [
    "Interval",
    "Box",
    "IntervalMatrix",
    "RoundingPolicy",
    "rounding",
    "current_policy",
    "DEFAULT_VERTEX_CAP",
    "iv_add",
    "iv_sub",
    "iv_mul",
    "iv_scale",
    "iv_affine",
    "iv_matmul_point_left",
    "iv_matmul_point_right",
    "iv_matmul",
    "iv_sum",
    "iv_quadform",
    "hull_many",
]
