"""Exact and numerical propagation of populations under a constant generator."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.linalg import expm

from .generator import GeneratorMatrix
from .photophysics import N_LEVELS, StateVector


class PropagationError(ArithmeticError):
    pass


@dataclass(frozen=True)
class SegmentResult:
    final: StateVector
    delta_q: float = 0.0
    delta_f: float = 0.0
    trajectory: list[tuple[float, StateVector]] = field(default_factory=list)


def _check(g: GeneratorMatrix, duration: float):
    if not np.all(np.isfinite(g.m)) or not np.all(np.isfinite(g.charge_flux)):
        raise PropagationError("generator has non-finite entries")
    if not np.isfinite(duration) or duration < 0:
        raise ValueError(f"duration must be non-negative, got {duration!r}")


def _advance(state: StateVector, x: np.ndarray) -> tuple[StateVector, float, float]:
    # accumulators can pick up -1e-17 style roundoff from cancellation
    dq = max(float(x[N_LEVELS]), 0.0)
    df = max(float(x[N_LEVELS + 1]), 0.0)
    return StateVector(x[:N_LEVELS], state.q_acc + dq, state.f_acc + df), dq, df


def _augment_state(state: StateVector) -> np.ndarray:
    return np.concatenate([state.p, [0.0, 0.0]])


def propagate(
    state: StateVector,
    g: GeneratorMatrix,
    duration: float,
    stride: float | None = None,
    t0: float = 0.0,
) -> SegmentResult:
    """Evolve ``state`` for ``duration`` microseconds.

    Populations, collected charge and radiated photons all come out of a
    single exponential of the augmented generator.  When ``stride`` is given
    the trajectory is sampled every ``stride`` microseconds (plus the
    endpoint); the final state never depends on the stride.
    """
    _check(g, duration)
    if duration == 0:
        return SegmentResult(state, 0.0, 0.0, [(t0, state)] if stride else [])

    a = g.augmented()
    x = expm(a * duration) @ _augment_state(state)
    final, dq, df = _advance(state, x)

    trajectory = []
    if stride is not None:
        if not stride > 0:
            raise ValueError(f"stride must be positive, got {stride!r}")
        step = expm(a * stride)
        cur = state
        trajectory.append((t0, cur))
        n = int(math.floor(duration / stride + 1e-9))
        for k in range(1, n + 1):
            t = k * stride
            if t >= duration:
                break
            cur, _, _ = _advance(cur, step @ _augment_state(cur))
            trajectory.append((t0 + t, cur))
        trajectory.append((t0 + duration, final))
    return SegmentResult(final, dq, df, trajectory)


def propagate_numeric(
    state: StateVector, g: GeneratorMatrix, duration: float, step: float
) -> SegmentResult:
    """Classic fixed-step RK4 on the same augmented system.

    Only meant as an independent check on :func:`propagate`.
    """
    _check(g, duration)
    if duration == 0:
        return SegmentResult(state)
    if not step > 0:
        raise ValueError(f"step must be positive, got {step!r}")
    if step > duration:
        raise ValueError(f"step {step} exceeds duration {duration}")

    n = max(1, int(round(duration / step)))
    h = duration / n
    a = g.augmented()
    x = _augment_state(state)
    for _ in range(n):
        k1 = a @ x
        k2 = a @ (x + 0.5 * h * k1)
        k3 = a @ (x + 0.5 * h * k2)
        k4 = a @ (x + h * k3)
        x = x + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    final, dq, df = _advance(state, x)
    return SegmentResult(final, dq, df)


class SteadyState(NamedTuple):
    state: StateVector
    degenerate: bool


def steady_state(
    g: GeneratorMatrix,
    start: StateVector | None = None,
    *,
    null_tol: float = 1e-10,
    max_rounds: int = 80,
) -> SteadyState:
    """Stationary populations of ``g``.

    A one-dimensional null space gives the answer directly.  Otherwise the
    state is propagated from ``start`` (uniform by default) to its long-time
    limit, which is flagged degenerate when it depends on the start (e.g.
    darkness, where G0, G1 and N0 are all absorbing).
    """
    m = np.asarray(g.m, dtype=float)
    if not np.all(np.isfinite(m)):
        raise PropagationError("generator has non-finite entries")
    scale = max(g.max_rate(), 1e-300)
    _, sv, vt = np.linalg.svd(m / scale)
    if sv[-1] < null_tol and sv[-2] > null_tol:
        v = vt[-1]
        v = v / v.sum()
        v = np.where(np.abs(v) < 1e-15, 0.0, v)
        if v.min() < -1e-9:
            raise PropagationError("null vector has negative populations")
        v = np.clip(v, 0.0, None)
        return SteadyState(StateVector(v / v.sum()), False)

    state = start or StateVector.uniform()
    if g.max_rate() == 0:
        return SteadyState(StateVector(state.p), True)
    # Long-time propagation by repeated squaring of a short, well-conditioned
    # step: after k rounds the horizon is 2**k / max_rate.  Column-stochastic
    # products stay accurate where a single huge-norm expm would not.
    e = expm(m / scale)
    for _ in range(max_rounds):
        e = np.clip(e, 0.0, None)
        e /= e.sum(axis=0, keepdims=True)
        nxt = e @ e
        if np.max(np.abs(nxt - e)) < 1e-14:
            p = e @ state.p
            # identical columns mean the limit forgets the start after all
            unique = np.max(np.abs(e - e[:, :1])) < 1e-9
            return SteadyState(StateVector(p / p.sum()), not unique)
        e = nxt
    raise PropagationError("steady state did not converge")
