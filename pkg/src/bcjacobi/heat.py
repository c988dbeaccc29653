"""Discrete parabolic system: first order in time, driven from the boundary.

    v_{n,t+1} = a_n v_{n+1,t} + a_{n-1} v_{n-1,t} + b_n v_{n,t},
    v_{0,t} = f_t,  v_{n,0} = 0.

One application of the matrix per step makes the delta response the moment
sequence of the block's spectral measure (a_0 = 1 here, as in the source
system), so inversion routes through the moment machinery.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import JacobiSpec
from .discrete_wave import _as_response, delta_control
from .errors import SpecTooShortError
from .moments import truncated_moment_naive

__all__ = [
    "HeatField",
    "solve_heat",
    "heat_response",
    "heat_control_matrix",
    "heat_connecting",
    "invert_heat",
]


@dataclass(frozen=True)
class HeatField:
    """Space-time field v[n][t] with its control; finite-speed support v[n][t] = 0 for t < n."""

    v: np.ndarray
    f: np.ndarray


def _heat_step_field(spec: JacobiSpec, f: np.ndarray, T: int, n_active: int) -> np.ndarray:
    f = np.atleast_1d(np.asarray(f, dtype=float))
    v = np.zeros((n_active + 2, T + 1))
    v[0, : min(f.size, T + 1)] = f[: T + 1]
    aa = np.concatenate([[spec.a0], spec.a])
    a_r = np.array([aa[n] if n < aa.size else 0.0 for n in range(1, n_active + 1)])
    a_l = aa[0:n_active]
    b_c = spec.b[0:n_active]
    for t in range(T):
        v[1 : n_active + 1, t + 1] = (
            a_r * v[2 : n_active + 2, t] + a_l * v[0:n_active, t] + b_c * v[1 : n_active + 1, t]
        )
    return v


def solve_heat(spec: JacobiSpec, f, T: int) -> HeatField:
    """Explicit stepping through time T on nodes 1..T (finite speed makes
    the zero wall at n = T + 1 exact)."""
    if spec.mode != "real":
        raise ValueError("heat stepping is defined for real blocks")
    f = np.atleast_1d(np.asarray(f, dtype=float))
    if f.size != T:
        raise ValueError(f"control must have length T = {T}")
    if spec.n < T:
        raise SpecTooShortError(f"block size {spec.n} < T = {T}")
    return HeatField(v=_heat_step_field(spec, f, T, T), f=f)


def heat_response(spec: JacobiSpec, T: int) -> np.ndarray:
    """Moment-like response s_{t-1} = v^delta_{1,t}, t = 1..T.

    Closed paths of length t - 1 from node 1 reach depth 1 + (t-1)/2, so a
    wall just beyond depth (T+1)//2 is exact and a block of that size
    suffices; for a_0 = 1 the entries are the power moments of the block's
    spectral measure.
    """
    depth = (T + 1) // 2
    if spec.n < depth:
        raise SpecTooShortError(f"response of length {T} needs block size >= {depth}")
    v = _heat_step_field(spec, delta_control(T), T, depth)
    return v[1, 1 : T + 1]


def heat_control_matrix(spec: JacobiSpec, T: int) -> np.ndarray:
    """Matrix of V^T f = v^f_{., T} acting on (f_0, ..., f_{T-1}).

    By time invariance V[n, s] = v^delta_{n, T-s}; used for the Gram identity
    S^T = (V^T)^* V^T.
    """
    if spec.n < T:
        raise SpecTooShortError(f"control matrix at horizon {T} needs block size >= {T}")
    v = _heat_step_field(spec, delta_control(T), T, T)
    V = np.empty((T, T))
    for s in range(T):
        V[:, s] = v[1 : T + 1, T - s]
    return V


def heat_connecting(s, T: int) -> np.ndarray:
    """Hankel connecting matrix S^T_{ij} = s_{2T-(i+j)}; needs 2T-1 entries.

    Positive definite exactly when the data is realizable.
    """
    s = _as_response(s)
    if s.size < 2 * T - 1:
        raise ValueError(f"need 2T-1 = {2 * T - 1} entries")
    i = np.arange(1, T + 1)
    return s[2 * T - i[:, None] - i[None, :]]


def invert_heat(s, N: int) -> JacobiSpec:
    """Recover the block from the moment-like response via the moment pipeline."""
    spec, _ = truncated_moment_naive(s, N)
    return spec
