"""Ground-truth machinery: truncated operator application, brute-force
variation-diminishing verification, static output nonlinearities, and the
worked demo scenarios (three-lag demo, momentum tuning, two-channel
imbalance condition)."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import BudgetExceededError
from .lti import (PartialFractionSystem, RationalTransferFunction,
                  impulse_response)
from .positivity import (CERTIFIED, PositivityReport, check_toeplitz_total)
from .signals import (Signal, first_nonzero_sign, forward_difference,
                      variation)

DEFAULT_SEED = 0x5EED
ENUM_CAP = 3 ** 9

# The three-lag demo system: two excitatory channels and one weak
# inhibitory channel, each a first-order lag.
DEMO_TERMS = ((0.9, 0.9), (0.5, 0.5), (-0.1, 0.1))
# Past inputs (u(-1), u(-2), ...) and a future input used as hardcoded
# regression vectors: one variation diminished, one amplified, and one
# preserved with a flipped leading sign.
DEMO_PAST_DIMINISH = (1.0, -10.0)
DEMO_FUTURE_GROWTH = (10.0, -8.5)
DEMO_PAST_ORDER_FLIP = (10.9, -21.5, 9.7)


def demo_system() -> PartialFractionSystem:
    return PartialFractionSystem(DEMO_TERMS)


@dataclass(frozen=True)
class OperatorTruncation:
    """Finite matrix window of a Hankel or Toeplitz operator."""

    kind: str
    input_length: int
    output_length: int
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=float)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)


def hankel_truncation(g: Signal, input_length: int,
                      output_length: int) -> OperatorTruncation:
    """Maps the past stack (u(-1), ..., u(-L)) to outputs at t = 0..N-1."""
    m = np.empty((output_length, input_length))
    for t in range(output_length):
        for tau in range(1, input_length + 1):
            m[t, tau - 1] = g.value(t + tau)
    return OperatorTruncation("hankel", input_length, output_length, m)


def toeplitz_truncation(g: Signal, input_length: int,
                        output_length: int) -> OperatorTruncation:
    """Maps inputs at t = 0..L-1 to outputs at t = 0..N-1 causally."""
    m = np.zeros((output_length, input_length))
    for t in range(output_length):
        for tau in range(min(t + 1, input_length)):
            m[t, tau] = g.value(t - tau)
    return OperatorTruncation("toeplitz", input_length, output_length, m)


def _past_vector(past) -> tuple:
    """Normalize past input to the stack (u(-1), u(-2), ...)."""
    if isinstance(past, Signal):
        if past.support_end > -1:
            raise ValueError("past input must live on negative times")
        return tuple(past.value(-tau)
                     for tau in range(1, -past.support_start + 1))
    return tuple(float(v) for v in past)


def apply_hankel(g: Signal, past, output_length: int) -> Signal:
    """Free response y(t) = sum_tau g(t + tau) u(-tau) for t = 0..N-1."""
    u = _past_vector(past)
    trunc = hankel_truncation(g, len(u), output_length)
    y = trunc.matrix @ np.asarray(u)
    return Signal(0, tuple(float(v) for v in y))


def apply_toeplitz(g: Signal, u, output_length: int) -> Signal:
    """Causal convolution truncated to N output samples."""
    if isinstance(u, Signal):
        if u.support_start < 0:
            raise ValueError("future input must live on t >= 0")
        vec = tuple(u.value(t) for t in range(u.support_end + 1))
    else:
        vec = tuple(float(v) for v in u)
    trunc = toeplitz_truncation(g, len(vec), output_length)
    y = trunc.matrix @ np.asarray(vec)
    return Signal(0, tuple(float(v) for v in y))


@dataclass(frozen=True)
class OvdViolation:
    kind: str  # "variation" | "order"
    input: tuple
    output: tuple
    input_variation: int
    output_variation: int


@dataclass(frozen=True)
class OvdReport:
    """Outcome of the brute-force operator check."""

    passed: bool
    violations: tuple
    inputs_checked: int
    rank: int

    @property
    def variation_violations(self) -> tuple:
        return tuple(v for v in self.violations if v.kind == "variation")

    @property
    def order_violations(self) -> tuple:
        return tuple(v for v in self.violations if v.kind == "order")

    @property
    def passed_variation_only(self) -> bool:
        """Pass status when the leading-sign clause is disregarded."""
        return not self.variation_violations

    @property
    def counterexample(self) -> Optional[OvdViolation]:
        return self.violations[0] if self.violations else None


def _impulse_for(sys, kind: str, L: int, N: int) -> Signal:
    if isinstance(sys, Signal):
        return sys
    need = N + L if kind == "hankel" else max(N, 1)
    return impulse_response(sys, need)


def ovd_verify(sys, kind: str, k: int, input_length: int, output_length: int,
               alphabet: Sequence[float] = (-1, 0, 1), samples: int = 0,
               seed: int = DEFAULT_SEED, extra_inputs: Sequence = (),
               zero_tol: float = 1e-12,
               stop_at: Optional[int] = None) -> OvdReport:
    """Brute-force check that inputs with at most k-1 sign changes map to
    outputs with no more sign changes under the truncated operator.

    When the variation is attained (and nonzero) the leading nonzero signs
    must agree; order violations are recorded separately so the two
    readings of the property can be distinguished.  Candidates run in
    deterministic order: injected vectors, the lattice, then seeded
    uniform samples.
    """
    if kind not in ("hankel", "toeplitz"):
        raise ValueError(f"unknown operator kind {kind!r}")
    alpha = sorted(set(float(a) for a in alphabet))
    if len(alpha) ** input_length > ENUM_CAP:
        raise BudgetExceededError(
            f"{len(alpha)}^{input_length} lattice inputs exceed the budget")
    g = _impulse_for(sys, kind, input_length, output_length)
    build = hankel_truncation if kind == "hankel" else toeplitz_truncation
    trunc = build(g, input_length, output_length)
    rank = int(np.linalg.matrix_rank(trunc.matrix))
    scale = max(1.0, float(np.max(np.abs(trunc.matrix))))
    eff_tol = zero_tol * scale

    def candidates():
        for u in extra_inputs:
            yield tuple(float(v) for v in u)
        for u in itertools.product(alpha, repeat=input_length):
            yield u
        if samples:
            rng = np.random.default_rng(seed)
            for _ in range(samples):
                yield tuple(rng.uniform(-1.0, 1.0, size=input_length))

    violations = []
    checked = 0
    for u in candidates():
        su = variation(u, zero_tol)
        if su > k - 1:
            continue
        uv = np.zeros(input_length)
        uv[:len(u)] = u[:input_length]
        if not np.any(np.abs(uv) > zero_tol):
            continue
        checked += 1
        y = trunc.matrix @ uv
        sy = variation(y, eff_tol)
        if sy > su:
            violations.append(OvdViolation("variation", u, tuple(y), su, sy))
        elif sy == su != 0:
            fy = first_nonzero_sign(y, eff_tol)
            if fy != 0 and fy != first_nonzero_sign(u, zero_tol):
                violations.append(OvdViolation("order", u, tuple(y), su, sy))
        if stop_at is not None and len(violations) >= stop_at:
            break
    return OvdReport(not violations, tuple(violations), checked, rank)


_BUILTIN_NONLINEARITIES = {
    "relay": (lambda y: float(np.sign(y)), "sign-preserving"),
    "saturation": (lambda y: float(np.clip(y, -1.0, 1.0)),
                   "sign-preserving"),
    "sigmoid": (lambda y: 1.0 / (1.0 + math.exp(-y)), "monotone"),
}


def apply_nonlinearity(y: Signal, kind: str = "relay",
                       table: Optional[Sequence] = None,
                       declared: Optional[str] = None,
                       zero_tol: float = 1e-12) -> Signal:
    """Samplewise static nonlinearity with its declared class enforced.

    Sign-preserving maps keep the variation unchanged; monotone
    (strictly increasing) maps keep the variation of the first forward
    difference, i.e. the local extrema.  Violations of the declared class
    raise.
    """
    if kind == "table":
        if table is None or declared not in ("sign-preserving", "monotone"):
            raise ValueError("custom tables need breakpoints and a declared "
                             "class")
        pts = sorted((float(x), float(v)) for x, v in table)
        xs = [p[0] for p in pts]
        vs = [p[1] for p in pts]
        if declared == "monotone":
            if any(b <= a for a, b in zip(vs, vs[1:])):
                raise ValueError("monotone table must be strictly "
                                 "increasing; declare sign-preserving "
                                 "otherwise")
        fn = lambda t: float(np.interp(t, xs, vs))
        cls = declared
    else:
        try:
            fn, cls = _BUILTIN_NONLINEARITIES[kind]
        except KeyError:
            raise ValueError(f"unknown nonlinearity {kind!r}") from None
    out = Signal(y.support_start, tuple(fn(v) for v in y.values))
    if cls == "sign-preserving":
        for v, w in zip(y.values, out.values):
            if np.sign(v) != np.sign(w) and abs(v) > zero_tol:
                raise ValueError("table is not sign-preserving at "
                                 f"input {v}")
        if variation(out, zero_tol) != variation(y, zero_tol):
            raise ValueError("sign-preserving map changed the variation")
    else:
        dv = variation(forward_difference(y), zero_tol)
        dw = variation(forward_difference(out), zero_tol)
        if dv != dw:
            raise ValueError("monotone map changed the local extrema count")
    return out


@dataclass(frozen=True)
class ScenarioResult:
    """Reproducible record of a worked input/output scenario."""

    scenario: str
    kind: str
    input_values: tuple
    output: Signal
    input_variation: int
    output_variation: int
    order_preserved: Optional[bool]
    verdict_text: str


SCENARIOS = {
    "hankel-diminish": ("hankel", DEMO_PAST_DIMINISH),
    "toeplitz-growth": ("toeplitz", DEMO_FUTURE_GROWTH),
    "hankel-order-flip": ("hankel", DEMO_PAST_ORDER_FLIP),
}


def run_scenario(name: str, horizon: int = 8,
                 system: Optional[PartialFractionSystem] = None,
                 zero_tol: float = 1e-12) -> ScenarioResult:
    """Run one of the named demo scenarios on the three-lag demo system."""
    try:
        kind, vec = SCENARIOS[name]
    except KeyError:
        raise ValueError(f"unknown scenario {name!r}; choose from "
                         f"{sorted(SCENARIOS)}") from None
    sys = system if system is not None else demo_system()
    g = impulse_response(sys, horizon + len(vec) + 1)
    if kind == "hankel":
        y = apply_hankel(g, vec, horizon)
    else:
        y = apply_toeplitz(g, vec, horizon)
    su = variation(vec, zero_tol)
    sy = variation(y, zero_tol * max(1.0, float(np.max(np.abs(
        y.to_array())))))
    order = None
    if sy == su != 0:
        order = first_nonzero_sign(vec, zero_tol) == first_nonzero_sign(
            y, zero_tol)
    text = (f"{kind} response: input variation {su} -> output variation "
            f"{sy}")
    if order is not None:
        text += ", leading sign " + ("preserved" if order else "flipped")
    return ScenarioResult(name, kind, tuple(vec), y, su, sy, order, text)


@dataclass(frozen=True)
class HeavyBallScenario:
    """Momentum-method tuning analysis for a scalar quadratic objective."""

    curvature: float
    step_size: float
    momentum: float
    open_loop: RationalTransferFunction
    closed_loop: RationalTransferFunction
    threshold: float
    meets_threshold: bool
    closed_loop_report: PositivityReport
    iterates: Signal
    iterate_extrema: int

    @property
    def consistent(self) -> bool:
        """Threshold rule and pole-zero test agree."""
        return self.meets_threshold == (
            self.closed_loop_report.verdict == CERTIFIED)

    @property
    def verdict_text(self) -> str:
        side = "at or above" if self.meets_threshold else "below"
        return (f"momentum {self.momentum} is {side} the smoothing "
                f"threshold {self.threshold}; closed-loop pole-zero test: "
                f"{self.closed_loop_report.verdict}; iterate extrema: "
                f"{self.iterate_extrema}")


def heavy_ball(curvature: float, step_size: float, momentum: float,
               steps: int = 64) -> HeavyBallScenario:
    """Classify a momentum iteration on a quadratic objective.

    The open loop from the gradient input to the iterate is
    step_size * z / ((z - 1)(z - momentum)); closing the loop with gradient
    gain ``curvature`` yields the characteristic polynomial
    z^2 - (1 + momentum - step_size*curvature) z + momentum.  Smoothing of
    the iterates holds exactly when momentum >= (sqrt(curvature *
    step_size) + 1)^2, which is cross-checked against the pole-zero
    characterization of the closed loop.
    """
    a, alpha, beta = float(curvature), float(step_size), float(momentum)
    if a <= 0 or alpha <= 0 or beta <= 0:
        raise ValueError("curvature, step size and momentum must be "
                         "positive")
    open_loop = RationalTransferFunction(
        (alpha, 0.0), (1.0, -(1.0 + beta), beta))
    mid = 1.0 + beta - alpha * a
    closed = RationalTransferFunction((alpha, 0.0), (1.0, -mid, beta))
    threshold = (math.sqrt(a * alpha) + 1.0) ** 2
    report = check_toeplitz_total(closed)

    # Iterates from rest under a unit step disturbance.
    xs = [0.0, 0.0]
    for _ in range(steps):
        xs.append(mid * xs[-1] - beta * xs[-2] + alpha)
    iterates = Signal(-1, tuple(xs))
    extrema = variation(forward_difference(iterates))
    return HeavyBallScenario(a, alpha, beta, open_loop, closed, threshold,
                             beta >= threshold, report, iterates, extrema)


@dataclass(frozen=True)
class NeuronalCondition:
    """Excitation/inhibition balance for a three-channel lag bank."""

    ok: bool
    margin: float


def neuronal_condition(r1: float, r2: float, r3: float,
                       p1: float, p2: float, p3: float) -> NeuronalCondition:
    """Smoothing condition for the parallel bank r1/(z-p1) + r2/(z-p2)
    - r3/(z-p3).

    Requires r_i > 0, p1 > p2 > p3 > 0 and r2 >= r3.  The bank keeps the
    one-step smoothing property exactly when the cross-channel gap margin
    r1 r2 (p1-p2)^2 - r1 r3 (p1-p3)^2 - r2 r3 (p2-p3)^2 is nonnegative;
    the margin equals the first sample of the order-2 compound response.
    """
    vals = dict(r1=r1, r2=r2, r3=r3, p1=p1, p2=p2, p3=p3)
    if any(v <= 0 for v in vals.values()):
        raise ValueError("all gains and poles must be positive")
    if not (p1 > p2 > p3):
        raise ValueError("poles must satisfy p1 > p2 > p3")
    if r2 < r3:
        raise ValueError("the inhibitory gain must not exceed r2")
    margin = math.fsum([r1 * r2 * (p1 - p2) ** 2,
                        -r1 * r3 * (p1 - p3) ** 2,
                        -r2 * r3 * (p2 - p3) ** 2])
    return NeuronalCondition(margin >= 0.0, margin)
