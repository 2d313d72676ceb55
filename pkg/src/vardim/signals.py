"""Finite-support discrete-time signals and sign-variation counting."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Samples with magnitude at or below this count as zero in sign tests.
ZERO_TOL = 1e-12
# Relative slack for determinant-like shape inequalities.
SHAPE_TOL = 1e-9


@dataclass(frozen=True)
class Signal:
    """Real sequence over integer time, stored dense on a finite window.

    Samples outside the stored window are implicitly zero.  A length-0
    signal is the zero signal.
    """

    support_start: int = 0
    values: tuple = ()

    def __post_init__(self):
        vals = tuple(float(v) for v in self.values)
        if any(not math.isfinite(v) for v in vals):
            raise ValueError("signal samples must be finite")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_values(cls, values: Iterable[float], start: int = 0) -> "Signal":
        return cls(support_start=start, values=tuple(values))

    @property
    def support_end(self) -> int:
        """Last stored time index (start - 1 when empty)."""
        return self.support_start + len(self.values) - 1

    def __len__(self) -> int:
        return len(self.values)

    def value(self, t: int) -> float:
        i = t - self.support_start
        if 0 <= i < len(self.values):
            return self.values[i]
        return 0.0

    def window(self, start: int, end: int) -> tuple:
        """Samples on start..end inclusive, zero-padded outside the store."""
        return tuple(self.value(t) for t in range(start, end + 1))

    def to_array(self) -> np.ndarray:
        return np.asarray(self.values, dtype=float)

    def is_zero(self, zero_tol: float = ZERO_TOL) -> bool:
        return all(abs(v) <= zero_tol for v in self.values)

    def scaled(self, a: float) -> "Signal":
        return Signal(self.support_start, tuple(a * v for v in self.values))

    def __neg__(self) -> "Signal":
        return self.scaled(-1.0)

    def trimmed(self, zero_tol: float = ZERO_TOL) -> "Signal":
        """Shrink the stored window to the nonzero support."""
        idx = [i for i, v in enumerate(self.values) if abs(v) > zero_tol]
        if not idx:
            return Signal(self.support_start, ())
        return Signal(self.support_start + idx[0],
                      self.values[idx[0]:idx[-1] + 1])


def sign(x: float, zero_tol: float = ZERO_TOL) -> int:
    if x > zero_tol:
        return 1
    if x < -zero_tol:
        return -1
    return 0


def _as_samples(u) -> Sequence[float]:
    if isinstance(u, Signal):
        return u.values
    return tuple(float(v) for v in u)


def variation(u, zero_tol: float = ZERO_TOL) -> int:
    """Number of strict sign changes after deleting zero samples.

    The zero signal has variation 0.
    """
    count = 0
    prev = 0
    for v in _as_samples(u):
        s = sign(v, zero_tol)
        if s == 0:
            continue
        if prev != 0 and s != prev:
            count += 1
        prev = s
    return count


def forward_difference(u: Signal, k: int = 1) -> Signal:
    """k-th forward difference on the stored window; the window shrinks by k."""
    if k < 1:
        raise ValueError("difference order k must be >= 1")
    vals = list(_as_samples(u))
    start = u.support_start if isinstance(u, Signal) else 0
    for _ in range(k):
        vals = [vals[i + 1] - vals[i] for i in range(len(vals) - 1)]
    return Signal(start, tuple(vals))


def is_unimodal(u: Signal, zero_tol: float = ZERO_TOL) -> bool:
    """True when the first forward difference changes sign at most once."""
    if len(_as_samples(u)) <= 1:
        return True
    return variation(forward_difference(_coerce(u), 1), zero_tol) <= 1


def first_nonzero_sign(u, zero_tol: float = ZERO_TOL) -> int:
    """Sign of the earliest-time nonzero sample, 0 for the zero signal."""
    for v in _as_samples(u):
        s = sign(v, zero_tol)
        if s != 0:
            return s
    return 0


def _coerce(u) -> Signal:
    return u if isinstance(u, Signal) else Signal(0, tuple(u))


def _default_window(g: Signal, window) -> tuple:
    if window is None:
        return (g.support_start, g.support_end)
    a, b = int(window[0]), int(window[1])
    if b < a:
        raise ValueError("window end precedes window start")
    return (a, b)


def _shape_check(g: Signal, window, tol: float, zero_tol: float,
                 concave: bool) -> bool:
    a, b = _default_window(_coerce(g), window)
    g = _coerce(g)
    samples = [g.value(t) for t in range(a, b + 1)]
    for t, v in zip(range(a, b + 1), samples):
        if v < -zero_tol:
            raise ValueError(f"negative sample g({t})={v} inside window")
    # Nonzero support restricted to the window must be contiguous.
    nz = [i for i, v in enumerate(samples) if v > zero_tol]
    if nz and any(samples[i] <= zero_tol for i in range(nz[0], nz[-1] + 1)):
        return False
    for i in range(len(samples) - 2):
        sq = samples[i + 1] ** 2
        prod = samples[i] * samples[i + 2]
        lhs = (sq - prod) if concave else (prod - sq)
        scale = max(sq, abs(prod), 1e-300)
        if lhs < -tol * scale:
            return False
    return True


def is_log_concave(g: Signal, window=None, tol: float = SHAPE_TOL,
                   zero_tol: float = ZERO_TOL) -> bool:
    """Nonnegative on the window, interval support, and
    g(t+1)^2 - g(t) g(t+2) >= 0 up to relative slack."""
    return _shape_check(g, window, tol, zero_tol, concave=True)


def is_log_convex(g: Signal, window=None, tol: float = SHAPE_TOL,
                  zero_tol: float = ZERO_TOL) -> bool:
    """Mirror of is_log_concave with the inequality reversed."""
    return _shape_check(g, window, tol, zero_tol, concave=False)
