"""Stochastic dynamics of a suspended messenger wire.

The wire is modeled as a chain of N proxy mass points pinned at both ends.
Each interior point carries mass m/N and feels gravity, a linear tensile
force from its two neighbors, frictional drag relative to the wind, and a
random pressure-drag kick. Interior accelerations:

    a_i = g + (k0*N/m) * (x_{i+1} + x_{i-1} - 2*x_i)

and the velocity/position SDE is integrated with a first-order
semi-implicit Euler-Maruyama scheme (velocity first, position advanced
with the updated velocity; the fully explicit variant is unstable at the
default step for the stiffest modes).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import solve_banded


class SimulationDivergedError(RuntimeError):
    """Raised when the integrator produces non-finite state."""

    def __init__(self, time: float, substep: int, bad_points: np.ndarray):
        self.time = time
        self.substep = substep
        self.bad_points = np.asarray(bad_points)
        super().__init__(
            f"wire simulation diverged at t={time:.6g}s "
            f"(substep {substep}, points {self.bad_points.tolist()})"
        )


@dataclass
class PhysParams:
    """Physical constants of the wire and its environment.

    n_points        number of proxy mass points N (endpoints included)
    total_mass      total wire mass m in kg, split equally over points
    spring_constant tensile-force coefficient k0 in N/m
    drag_constant   frictional drag coefficient c0 in 1/s
    gravity         gravitational acceleration vector, m/s^2
    wind_cov        3x3 diffusion matrix multiplying the Wiener increment
    endpoint_a/b    fixed endpoint coordinates, m
    """

    n_points: int = 11
    total_mass: float = 10.0
    spring_constant: float = 100.0
    drag_constant: float = 1.0
    gravity: np.ndarray = field(default_factory=lambda: np.array([0.0, 0.0, -9.8]))
    wind_cov: np.ndarray = field(default_factory=lambda: 0.1 * np.eye(3))
    endpoint_a: np.ndarray = field(default_factory=lambda: np.array([0.0, -5.0, 5.0]))
    endpoint_b: np.ndarray = field(default_factory=lambda: np.array([0.0, 5.0, 5.0]))

    def __post_init__(self):
        self.gravity = np.asarray(self.gravity, dtype=np.float64)
        self.wind_cov = np.asarray(self.wind_cov, dtype=np.float64)
        self.endpoint_a = np.asarray(self.endpoint_a, dtype=np.float64)
        self.endpoint_b = np.asarray(self.endpoint_b, dtype=np.float64)
        if self.n_points < 3:
            raise ValueError("n_points must be >= 3 (need at least one interior point)")
        if self.total_mass <= 0:
            raise ValueError("total_mass must be > 0")
        if self.spring_constant <= 0:
            raise ValueError("spring_constant must be > 0")
        if self.drag_constant < 0:
            raise ValueError("drag_constant must be >= 0")
        if self.wind_cov.shape != (3, 3):
            raise ValueError("wind_cov must be a 3x3 matrix")
        if not np.allclose(self.wind_cov, self.wind_cov.T, atol=1e-12):
            raise ValueError("wind_cov must be symmetric")
        if np.linalg.eigvalsh(self.wind_cov).min() < -1e-12:
            raise ValueError("wind_cov must be positive semi-definite")

    @property
    def point_mass(self) -> float:
        return self.total_mass / self.n_points

    @property
    def tension_coeff(self) -> float:
        """Acceleration per unit second-difference, k0*N/m in 1/s^2."""
        return self.spring_constant * self.n_points / self.total_mass


@dataclass
class WireState:
    """Positions and velocities of all N proxy points at a time instant."""

    positions: np.ndarray  # (N, 3) m
    velocities: np.ndarray  # (N, 3) m/s
    time: float = 0.0

    def copy(self) -> "WireState":
        return WireState(self.positions.copy(), self.velocities.copy(), self.time)


def stability_bound(params: PhysParams) -> float:
    """Largest stable physics substep, 2*sqrt(m / (2*k0*N)) seconds."""
    return 2.0 * math.sqrt(params.total_mass / (2.0 * params.spring_constant * params.n_points))


def effective_substeps(params: PhysParams, dt: float, substeps: int) -> int:
    """Raise the substep count if needed to keep h strictly below half the
    stability bound (matters only for extreme mass/stiffness corners)."""
    half = 0.5 * stability_bound(params)
    needed = int(math.floor(dt / half)) + 1
    return max(substeps, needed)


def equilibrium_shape(params: PhysParams) -> WireState:
    """Static wire shape: zero velocities and zero interior acceleration.

    For each axis the interior positions solve the tridiagonal system
    x_{i-1} - 2*x_i + x_{i+1} = -g_c * m / (k0 * N) with the pinned
    endpoints folded into the right-hand side.
    """
    n = params.n_points
    n_int = n - 2
    rhs_const = -params.gravity * params.total_mass / (params.spring_constant * n)

    positions = np.empty((n, 3), dtype=np.float64)
    positions[0] = params.endpoint_a
    positions[-1] = params.endpoint_b

    ab = np.zeros((3, n_int))
    ab[0, 1:] = 1.0
    ab[1, :] = -2.0
    ab[2, :-1] = 1.0
    for axis in range(3):
        rhs = np.full(n_int, rhs_const[axis])
        rhs[0] -= params.endpoint_a[axis]
        rhs[-1] -= params.endpoint_b[axis]
        try:
            positions[1:-1, axis] = solve_banded((1, 1), ab, rhs)
        except np.linalg.LinAlgError as exc:  # cannot occur for k0 > 0
            raise ValueError("singular equilibrium system") from exc

    return WireState(positions, np.zeros((n, 3)), 0.0)


def tensile_acceleration(state: WireState, i: int, params: PhysParams) -> np.ndarray:
    """Acceleration of interior point i: gravity plus the tensile term."""
    if not 1 <= i <= params.n_points - 2:
        raise IndexError(
            f"point {i} is an endpoint (or out of range); endpoints have zero "
            f"acceleration by definition"
        )
    x = state.positions
    return params.gravity + params.tension_coeff * (x[i + 1] + x[i - 1] - 2.0 * x[i])


def step(
    state: WireState,
    wind_velocity: np.ndarray,
    params: PhysParams,
    dt: float,
    substeps: int,
    rng: np.random.Generator,
) -> WireState:
    """Advance the wire by dt under a wind held constant over the interval.

    Integrates the interior points over `substeps` (auto-raised when the
    stability bound demands it) sub-intervals h = dt/substeps:

        v += a*h - c0*(v - v_wind)*h + (V @ xi)*sqrt(h),  xi ~ N(0, I3)
        x += v*h          (updated v; endpoints never move)

    Noise is drawn i.i.d. per interior point per substep. Raises
    SimulationDivergedError if any component goes non-finite.
    """
    if dt <= 0:
        raise ValueError("dt must be > 0")
    if substeps < 1:
        raise ValueError("substeps must be >= 1")
    wind = np.asarray(wind_velocity, dtype=np.float64)

    n_sub = effective_substeps(params, dt, substeps)
    h = dt / n_sub
    sqrt_h = math.sqrt(h)
    c0 = params.drag_constant
    coeff = params.tension_coeff
    g = params.gravity
    noisy = np.any(params.wind_cov)
    cov_t = params.wind_cov.T

    pos = state.positions.copy()
    vel = state.velocities.copy()
    for k in range(n_sub):
        inner = pos[1:-1]
        accel = g + coeff * (pos[2:] + pos[:-2] - 2.0 * inner)
        dv = (accel - c0 * (vel[1:-1] - wind)) * h
        if noisy:
            xi = rng.standard_normal((params.n_points - 2, 3))
            dv += (xi @ cov_t) * sqrt_h
        vel[1:-1] += dv
        pos[1:-1] += vel[1:-1] * h

    if not (np.isfinite(pos).all() and np.isfinite(vel).all()):
        bad = np.unique(
            np.concatenate(
                [
                    np.nonzero(~np.isfinite(pos).all(axis=1))[0],
                    np.nonzero(~np.isfinite(vel).all(axis=1))[0],
                ]
            )
        )
        raise SimulationDivergedError(state.time + dt, n_sub, bad)

    return WireState(pos, vel, state.time + dt)


def env_wind(t: float) -> np.ndarray:
    """Ambient wind at time t: slow sinusoids with 4/6/8 s periods, 5 m/s peaks."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return np.array(
        [
            5.0 * math.sin(2.0 * math.pi * t / 4.0),
            5.0 * math.sin(2.0 * math.pi * t / 6.0),
            5.0 * math.sin(2.0 * math.pi * t / 8.0),
        ]
    )


def mechanical_energy(state: WireState, params: PhysParams) -> float:
    """Kinetic plus spring potential energy (Lyapunov function of the drag)."""
    ke = 0.5 * params.point_mass * float(np.sum(state.velocities**2))
    seg = np.diff(state.positions, axis=0)
    pe = 0.5 * params.spring_constant * float(np.sum(seg**2))
    return ke + pe
