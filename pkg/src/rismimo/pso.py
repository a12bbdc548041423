"""Beam search: particle swarm over the receiver's panel-frame spherical
coordinates (r, theta, phi) plus a binary all-bits flip, maximizing band
channel gain.

The three continuous dimensions use the standard inertia/cognitive/social
update with position clamping.  The flip bit keeps a velocity of its own and
switches with probability |tanh(v)| (a V-shaped transfer), so a converged
swarm with zero velocities is a true fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import Scenario, synthesize
from .geometry import SphericalCoord, cartesian_to_spherical
from .metrics import band_gain
from .ris import FocusTarget, RisConfig, phase_profile_for_focus


@dataclass(frozen=True)
class SearchParams:
    """One candidate: receiver location in the panel frame plus the flip bit."""

    rx_coord: SphericalCoord
    flip: bool = False


@dataclass(frozen=True)
class SwarmConfig:
    """Swarm hyperparameters and search bounds.

    Degenerate settings (single particle, zero inertia or acceleration) are
    allowed for diagnostics; the defaults are standard constriction-style
    values.  Angles are radians.
    """

    swarm_size: int = 24
    iterations: int = 60
    inertia: float = 0.72
    cognitive: float = 1.49
    social: float = 1.49
    r_bounds_m: tuple[float, float] = (5.0, 300.0)
    theta_bounds_rad: tuple[float, float] = (math.pi / 3.0, 2.0 * math.pi / 3.0)
    phi_bounds_rad: tuple[float, float] = (0.0, math.pi)
    seed: int = 0
    stall_iterations: int = 15
    fitness_band_points: int | None = None  # coarse grid for search fitness

    def __post_init__(self):
        if self.swarm_size < 1:
            raise ValueError("swarm needs at least one particle")
        if self.iterations < 0:
            raise ValueError("iterations must be non-negative")
        if not 0.0 <= self.inertia <= 1.0:
            raise ValueError("inertia must lie in [0, 1]")
        if self.cognitive < 0.0 or self.social < 0.0:
            raise ValueError("acceleration coefficients must be non-negative")
        if self.stall_iterations < 1:
            raise ValueError("stall window must be at least one iteration")
        for lo, hi in (self.r_bounds_m, self.theta_bounds_rad, self.phi_bounds_rad):
            if not lo < hi:
                raise ValueError("each bound pair needs lo < hi")
        if self.r_bounds_m[0] <= 0.0:
            raise ValueError("range bounds must be positive")
        if not (0.0 <= self.theta_bounds_rad[0] and self.theta_bounds_rad[1] <= math.pi):
            raise ValueError("theta bounds must lie within [0, pi]")

    @property
    def lower(self) -> np.ndarray:
        return np.array([self.r_bounds_m[0], self.theta_bounds_rad[0], self.phi_bounds_rad[0]])

    @property
    def upper(self) -> np.ndarray:
        return np.array([self.r_bounds_m[1], self.theta_bounds_rad[1], self.phi_bounds_rad[1]])


@dataclass(eq=False)
class SwarmState:
    """Positions, velocities and best-so-far bookkeeping for the swarm."""

    positions: np.ndarray        # (S, 3): r, theta, phi
    velocities: np.ndarray       # (S, 3)
    flips: np.ndarray            # (S,) uint8
    flip_velocities: np.ndarray  # (S,)
    pbest_positions: np.ndarray
    pbest_flips: np.ndarray
    pbest_fitness: np.ndarray
    gbest_position: np.ndarray
    gbest_flip: int
    gbest_fitness: float
    evaluations: int


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    """Best parameters found, realized configuration, and convergence history."""

    best_params: SearchParams
    best_config: RisConfig
    best_gain: float              # band gain on the full scenario grid
    fitness_trace: np.ndarray     # per-iteration global best, search grid
    evaluations: int


def focus_target_for(scn: Scenario, params: SearchParams) -> FocusTarget:
    """Synthesis goal for a candidate: known Tx position, band-center frequency."""
    return FocusTarget(
        tx_position=scn.tx_array.pose.origin,
        rx_coord=params.rx_coord,
        frequency_hz=scn.band.center_hz,
        flip=params.flip,
    )


def realize_config(scn: Scenario, params: SearchParams) -> RisConfig:
    return phase_profile_for_focus(scn.ris, focus_target_for(scn, params))


def fitness(scn: Scenario, params: SearchParams, n_points: int | None = None) -> float:
    """Band channel gain of the scenario under the candidate's profile."""
    config = realize_config(scn, params)
    return band_gain(synthesize(scn, config, n_points=n_points))


def params_at(scn: Scenario, position, flip: bool = False) -> SearchParams:
    """Search parameters that point exactly at a global-frame position."""
    return SearchParams(cartesian_to_spherical(position, scn.ris.pose), flip=flip)


def _params_from_row(row, flip) -> SearchParams:
    return SearchParams(
        rx_coord=SphericalCoord(r=float(row[0]), theta=float(row[1]), phi=float(row[2])),
        flip=bool(flip),
    )


def _evaluate(scn: Scenario, cfg: SwarmConfig, positions, flips) -> np.ndarray:
    return np.array(
        [
            fitness(scn, _params_from_row(positions[i], flips[i]), cfg.fitness_band_points)
            for i in range(len(positions))
        ]
    )


def init_swarm(scn: Scenario, cfg: SwarmConfig, rng: np.random.Generator) -> SwarmState:
    """Uniform positions within bounds, Bernoulli(1/2) flips, zero velocities."""
    s = cfg.swarm_size
    positions = rng.uniform(cfg.lower, cfg.upper, size=(s, 3))
    flips = rng.integers(0, 2, size=s).astype(np.uint8)
    fits = _evaluate(scn, cfg, positions, flips)
    best = int(np.argmax(fits))
    return SwarmState(
        positions=positions,
        velocities=np.zeros((s, 3)),
        flips=flips,
        flip_velocities=np.zeros(s),
        pbest_positions=positions.copy(),
        pbest_flips=flips.copy(),
        pbest_fitness=fits.copy(),
        gbest_position=positions[best].copy(),
        gbest_flip=int(flips[best]),
        gbest_fitness=float(fits[best]),
        evaluations=s,
    )


def step(scn: Scenario, cfg: SwarmConfig, state: SwarmState, rng: np.random.Generator) -> SwarmState:
    """One swarm iteration; returns a new state, never mutating the input."""
    s = cfg.swarm_size
    u1 = rng.uniform(size=(s, 3))
    u2 = rng.uniform(size=(s, 3))
    uf1 = rng.uniform(size=s)
    uf2 = rng.uniform(size=s)
    u_switch = rng.uniform(size=s)

    vel = (
        cfg.inertia * state.velocities
        + cfg.cognitive * u1 * (state.pbest_positions - state.positions)
        + cfg.social * u2 * (state.gbest_position[None, :] - state.positions)
    )
    pos = np.clip(state.positions + vel, cfg.lower, cfg.upper)

    flips_f = state.flips.astype(float)
    fvel = (
        cfg.inertia * state.flip_velocities
        + cfg.cognitive * uf1 * (state.pbest_flips.astype(float) - flips_f)
        + cfg.social * uf2 * (float(state.gbest_flip) - flips_f)
    )
    switch = u_switch < np.abs(np.tanh(fvel))
    flips = np.where(switch, 1 - state.flips, state.flips).astype(np.uint8)

    fits = _evaluate(scn, cfg, pos, flips)
    improved = fits > state.pbest_fitness
    pbest_positions = np.where(improved[:, None], pos, state.pbest_positions)
    pbest_flips = np.where(improved, flips, state.pbest_flips).astype(np.uint8)
    pbest_fitness = np.where(improved, fits, state.pbest_fitness)

    best = int(np.argmax(pbest_fitness))
    if pbest_fitness[best] > state.gbest_fitness:
        gbest_position = pbest_positions[best].copy()
        gbest_flip = int(pbest_flips[best])
        gbest_fitness = float(pbest_fitness[best])
    else:
        gbest_position = state.gbest_position.copy()
        gbest_flip = state.gbest_flip
        gbest_fitness = state.gbest_fitness

    return SwarmState(
        positions=pos,
        velocities=vel,
        flips=flips,
        flip_velocities=fvel,
        pbest_positions=pbest_positions,
        pbest_flips=pbest_flips,
        pbest_fitness=pbest_fitness,
        gbest_position=gbest_position,
        gbest_flip=gbest_flip,
        gbest_fitness=gbest_fitness,
        evaluations=state.evaluations + s,
    )


def optimize(scn: Scenario, cfg: SwarmConfig | None = None) -> OptimizationResult:
    """Run the beam search; deterministic for a fixed scenario and config seed.

    Stops early once the global best has not improved for
    ``cfg.stall_iterations`` consecutive iterations.
    """
    cfg = cfg or SwarmConfig()
    rng = np.random.default_rng(cfg.seed)
    state = init_swarm(scn, cfg, rng)
    trace = [state.gbest_fitness]
    stall = 0
    for _ in range(cfg.iterations):
        previous = state.gbest_fitness
        state = step(scn, cfg, state, rng)
        trace.append(state.gbest_fitness)
        stall = 0 if state.gbest_fitness > previous else stall + 1
        if stall >= cfg.stall_iterations:
            break
    best_params = _params_from_row(state.gbest_position, state.gbest_flip)
    best_config = realize_config(scn, best_params)
    best_gain = band_gain(synthesize(scn, best_config))
    return OptimizationResult(
        best_params=best_params,
        best_config=best_config,
        best_gain=best_gain,
        fitness_trace=np.array(trace),
        evaluations=state.evaluations,
    )
