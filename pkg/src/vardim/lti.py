"""System representations, impulse responses and structured matrix views.

Three representations are supported: partial fractions (simple real poles
plus an optional direct FIR tail), rational transfer functions stored as
coefficient vectors, and state-space triples (A, b, c).  Poles, zeros and
eigenvalues are always ordered by descending magnitude with ties broken by
descending real part.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence, Union

import numpy as np

from .errors import (DegenerateSystemError, UnsupportedRepresentationError,
                     WindowError)
from .signals import Signal

# Roots whose imaginary part falls below this (relative) level are snapped
# to the real axis after companion-matrix root extraction.
REAL_SNAP_TOL = 1e-8
# Relative separation below which two poles count as repeated.
POLE_SEP_TOL = 1e-12
DEFAULT_HORIZON = 64


def dominance_key(x):
    """Sort key: descending magnitude, then descending real part."""
    z = complex(x)
    return (-abs(z), -z.real, -z.imag)


def _sorted_roots(roots) -> tuple:
    return tuple(sorted(roots, key=dominance_key))


@dataclass(frozen=True)
class PartialFractionSystem:
    """Sum of simple real first-order terms plus an optional direct FIR tail.

    ``terms`` holds (residue, pole) pairs; the impulse response is
    residue * pole**(t-1) for t >= 1 from each term, plus the FIR samples.
    Zero residues are dropped; an empty system is the zero system.
    """

    terms: tuple = ()
    fir: Signal = field(default_factory=Signal)

    def __post_init__(self):
        cleaned = []
        for r, p in self.terms:
            r, p = float(r), float(p)
            if not (math.isfinite(r) and math.isfinite(p)):
                raise ValueError("residues and poles must be finite")
            if r != 0.0:
                cleaned.append((r, p))
        cleaned.sort(key=lambda rp: dominance_key(rp[1]))
        for (_, pa), (_, pb) in zip(cleaned, cleaned[1:]):
            if abs(pa - pb) <= POLE_SEP_TOL * max(1.0, abs(pa), abs(pb)):
                raise UnsupportedRepresentationError(
                    f"repeated pole {pa}; use StateSpace for repeated poles")
        object.__setattr__(self, "terms", tuple(cleaned))
        if self.fir.support_start < 0:
            raise ValueError("FIR tail samples must sit at t >= 0")

    @property
    def residues(self) -> tuple:
        return tuple(r for r, _ in self.terms)

    @property
    def poles(self) -> tuple:
        return tuple(p for _, p in self.terms)

    @property
    def order(self) -> int:
        """State dimension of the canonical realization (FIR included)."""
        return len(self.terms) + self._fir_span()

    def _fir_span(self) -> int:
        f = self.fir.trimmed()
        return 0 if len(f) == 0 else f.support_end

    def is_zero(self) -> bool:
        return not self.terms and self.fir.is_zero()

    def scaled(self, a: float) -> "PartialFractionSystem":
        return PartialFractionSystem(
            tuple((a * r, p) for r, p in self.terms), self.fir.scaled(a))


@dataclass(frozen=True)
class RationalTransferFunction:
    """Strictly proper rational function stored as coefficient vectors.

    ``num`` and ``den`` are descending-power coefficients; the denominator
    is normalized monic.  Poles and zeros must be disjoint.
    """

    num: tuple
    den: tuple

    def __post_init__(self):
        num = np.trim_zeros(np.asarray(self.num, dtype=float), "f")
        den = np.trim_zeros(np.asarray(self.den, dtype=float), "f")
        if den.size == 0:
            raise ValueError("denominator must be nonzero")
        if num.size == 0:
            raise DegenerateSystemError("zero numerator: system is trivial")
        if num.size >= den.size:
            raise ValueError("system must be strictly proper "
                             "(deg num < deg den)")
        num = num / den[0]
        den = den / den[0]
        object.__setattr__(self, "num", tuple(float(v) for v in num))
        object.__setattr__(self, "den", tuple(float(v) for v in den))
        scale = max(1.0, max(abs(p) for p in self.poles))
        for p in self.poles:
            for z in self.zeros:
                if abs(p - z) <= 1e-9 * scale:
                    raise ValueError(
                        f"pole {p} and zero {z} coincide; cancel the factor")

    @property
    def gain(self) -> float:
        return self.num[0]

    @property
    def poles(self) -> tuple:
        return polynomial_roots(self.den)

    @property
    def zeros(self) -> tuple:
        if len(self.num) == 1:
            return ()
        return polynomial_roots(self.num)

    @property
    def order(self) -> int:
        return len(self.den) - 1


@dataclass(frozen=True)
class StateSpace:
    """Single-input single-output realization x+ = Ax + bu, y = cx."""

    A: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        c = np.asarray(self.c, dtype=float).reshape(-1)
        n = A.shape[0]
        if A.shape != (n, n) or n < 1:
            raise ValueError("A must be square and nonempty")
        if b.shape != (n,) or c.shape != (n,):
            raise ValueError("b and c must match the state dimension")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b))
                and np.all(np.isfinite(c))):
            raise ValueError("state-space entries must be finite")
        for arr in (A, b, c):
            arr.setflags(write=False)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "c", c)

    @property
    def order(self) -> int:
        return self.A.shape[0]


SystemLike = Union[PartialFractionSystem, RationalTransferFunction, StateSpace]


@dataclass(frozen=True)
class StructuredMatrixView:
    """Materialized square window into a Hankel or Toeplitz operator."""

    kind: str  # "hankel" | "toeplitz"
    t: int
    order: int
    entries: np.ndarray

    def __post_init__(self):
        e = np.asarray(self.entries, dtype=float)
        e.setflags(write=False)
        object.__setattr__(self, "entries", e)

    def det(self) -> float:
        return float(np.linalg.det(self.entries))


def polynomial_roots(coeffs: Sequence[float]) -> tuple:
    """Roots via companion-matrix eigenvalues, near-real roots snapped,
    sorted by descending magnitude."""
    coeffs = np.trim_zeros(np.asarray(coeffs, dtype=float), "f")
    if coeffs.size == 0:
        raise DegenerateSystemError("zero polynomial has no defined roots")
    if coeffs.size == 1:
        return ()
    roots = np.roots(coeffs)
    snapped = []
    for z in roots:
        if abs(z.imag) <= REAL_SNAP_TOL * (1.0 + abs(z)):
            snapped.append(complex(z.real, 0.0))
        else:
            snapped.append(complex(z))
    return _sorted_roots(snapped)


def zeros(rtf: RationalTransferFunction) -> tuple:
    """Numerator roots in dominance order."""
    return rtf.zeros


def impulse_response(sys: SystemLike, horizon: int) -> Signal:
    """Samples g(0..horizon); g(0) = 0 for strictly proper dynamics."""
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if isinstance(sys, PartialFractionSystem):
        vals = []
        for t in range(horizon + 1):
            acc = [r * p ** (t - 1) for r, p in sys.terms] if t >= 1 else []
            acc.append(sys.fir.value(t))
            vals.append(math.fsum(acc))
        return Signal(0, tuple(vals))
    if isinstance(sys, StateSpace):
        vals = [0.0]
        x = sys.b.copy()
        for _ in range(horizon):
            vals.append(float(sys.c @ x))
            x = sys.A @ x
        return Signal(0, tuple(vals))
    if isinstance(sys, RationalTransferFunction):
        den = sys.den
        n = len(den) - 1
        # Align numerator coefficients with z^(n-k).
        c = [0.0] * (n + 1)
        for i, v in enumerate(reversed(sys.num)):
            c[n - i] = v
        g = []
        for t in range(horizon + 1):
            acc = c[t] if t <= n else 0.0
            acc -= math.fsum(den[i] * g[t - i]
                             for i in range(1, min(t, n) + 1))
            g.append(acc)
        return Signal(0, tuple(g))
    raise TypeError(f"unsupported system type {type(sys).__name__}")


def partial_fractions(rtf: RationalTransferFunction) -> PartialFractionSystem:
    """Residue expansion over simple real poles.

    Raises UnsupportedRepresentationError for repeated or complex poles;
    those systems are representable as StateSpace only.
    """
    poles = rtf.poles
    scale = max(1.0, max(abs(p) for p in poles))
    for p in poles:
        if p.imag != 0.0:
            raise UnsupportedRepresentationError(
                f"complex pole {p}; use StateSpace")
    reals = sorted(p.real for p in poles)
    for a, b in zip(reals, reals[1:]):
        if abs(b - a) <= POLE_SEP_TOL * scale:
            raise UnsupportedRepresentationError(
                f"repeated pole near {a}; use StateSpace")
    den = np.asarray(rtf.den)
    dden = np.polyder(den)
    terms = []
    for p in poles:
        x = p.real
        # One Newton polish; companion eigenvalues are accurate but not
        # always correctly rounded.
        slope = np.polyval(dden, x)
        if slope != 0.0:
            x = x - np.polyval(den, x) / slope
        r = np.polyval(rtf.num, x) / np.polyval(dden, x)
        terms.append((float(r), float(x)))
    return PartialFractionSystem(tuple(terms))


def recombine(pfs: PartialFractionSystem) -> RationalTransferFunction:
    """Rational form of a partial-fraction system, FIR tail folded in."""
    if pfs.is_zero():
        raise DegenerateSystemError("cannot recombine the zero system")
    poles = list(pfs.poles)
    den = np.poly(poles) if poles else np.asarray([1.0])
    num = np.zeros(max(len(poles), 1))
    if poles:
        for i, (r, _) in enumerate(pfs.terms):
            rest = np.poly(poles[:i] + poles[i + 1:]) if len(poles) > 1 \
                else np.asarray([1.0])
            num = np.polyadd(num, r * rest)
    fir = pfs.fir.trimmed()
    if len(fir):
        if fir.value(0) != 0.0:
            raise UnsupportedRepresentationError(
                "direct term at t=0 breaks strict properness")
        span = fir.support_end
        # G_fir = sum f(tau) z^-tau -> multiply through by z^span.
        den_full = np.polymul(den, [1.0] + [0.0] * span)
        num_full = np.polymul(num, [1.0] + [0.0] * span)
        for tau in range(1, span + 1):
            shift = np.zeros(span - tau + 1)
            shift[0] = fir.value(tau)
            num_full = np.polyadd(num_full, np.polymul(shift, den))
        num, den = num_full, den_full
    return RationalTransferFunction(tuple(num), tuple(den))


def to_state_space(pfs: PartialFractionSystem,
                   symmetric: bool = False) -> StateSpace:
    """Diagonal realization A = diag(p), b = residues, c = ones.

    With ``symmetric=True`` the square-root splitting b = c.T = sqrt(r) is
    used instead; it requires all residues nonnegative.  A FIR tail is
    realized by an appended shift chain (its t=0 sample must be zero).
    """
    diag = list(pfs.poles)
    if symmetric:
        if any(r < 0 for r in pfs.residues):
            raise ValueError("symmetric splitting needs nonnegative residues")
        if not pfs.fir.is_zero():
            raise UnsupportedRepresentationError(
                "symmetric splitting does not cover FIR tails")
        roots = [math.sqrt(r) for r in pfs.residues]
        b = np.asarray(roots)
        c = np.asarray(roots)
    else:
        b = np.asarray(pfs.residues, dtype=float)
        c = np.ones(len(diag))
    fir = pfs.fir.trimmed()
    span = 0 if len(fir) == 0 else fir.support_end
    if span:
        if fir.value(0) != 0.0:
            raise UnsupportedRepresentationError(
                "FIR sample at t=0 needs a feedthrough term; none exists")
        n = len(diag)
        A = np.zeros((n + span, n + span))
        A[:n, :n] = np.diag(diag) if n else A[:n, :n]
        for i in range(span - 1):
            A[n + i + 1, n + i] = 1.0
        bb = np.zeros(n + span)
        bb[:n] = b
        bb[n] = 1.0
        cc = np.zeros(n + span)
        cc[:n] = c
        cc[n:] = [fir.value(tau) for tau in range(1, span + 1)]
        return StateSpace(A, bb, cc)
    if not diag:
        raise DegenerateSystemError("zero system has no realization")
    return StateSpace(np.diag(diag), b, c)


def rtf_to_state_space(rtf: RationalTransferFunction) -> StateSpace:
    """Controllable canonical realization from coefficient vectors."""
    n = rtf.order
    den = np.asarray(rtf.den)
    num = np.zeros(n)
    num[n - len(rtf.num):] = rtf.num
    A = np.zeros((n, n))
    A[0, :] = -den[1:]
    for i in range(n - 1):
        A[i + 1, i] = 1.0
    b = np.zeros(n)
    b[0] = 1.0
    return StateSpace(A, b, num)


def extended_controllability(ss: StateSpace, j: int) -> np.ndarray:
    """Columns b, Ab, ..., A^(j-1) b."""
    if j < 1:
        raise ValueError("block count j must be >= 1")
    cols = [ss.b]
    for _ in range(j - 1):
        cols.append(ss.A @ cols[-1])
    return np.column_stack(cols)


def extended_observability(ss: StateSpace, j: int) -> np.ndarray:
    """Rows c, cA, ..., cA^(j-1)."""
    if j < 1:
        raise ValueError("block count j must be >= 1")
    rows = [ss.c]
    for _ in range(j - 1):
        rows.append(rows[-1] @ ss.A)
    return np.vstack(rows)


def _require_window(g: Signal, lo: int, hi: int, what: str):
    if lo < g.support_start or hi > g.support_end:
        raise WindowError(
            f"{what} needs samples {lo}..{hi} but the signal stores "
            f"{g.support_start}..{g.support_end}")


def hankel_matrix(g: Signal, t: int, j: int) -> StructuredMatrixView:
    """j x j window with entry (a, b) = g(t+a+b-2); symmetric by pattern."""
    if t < 1:
        raise ValueError("Hankel windows start at t >= 1")
    if j < 1:
        raise ValueError("order j must be >= 1")
    _require_window(g, t, t + 2 * j - 2, f"H(t={t}, j={j})")
    entries = np.empty((j, j))
    for a in range(j):
        for b in range(j):
            entries[a, b] = g.value(t + a + b)
    return StructuredMatrixView("hankel", t, j, entries)


def toeplitz_matrix(g: Signal, t: int, j: int) -> StructuredMatrixView:
    """j x j window with entry (a, b) = g(t+a-b); g vanishes before t=0."""
    if t < 0:
        raise ValueError("Toeplitz windows start at t >= 0")
    if j < 1:
        raise ValueError("order j must be >= 1")
    _require_window(g, max(0, t - j + 1), t + j - 1, f"T(t={t}, j={j})")
    entries = np.empty((j, j))
    for a in range(j):
        for b in range(j):
            tau = t + a - b
            entries[a, b] = g.value(tau) if tau >= 0 else 0.0
    return StructuredMatrixView("toeplitz", t, j, entries)
