"""Deterministic central-force optimizer.

Probes with recorded fitness values attract each other: a probe accelerates
toward every probe whose fitness exceeds its own, with a coupling that grows
with the fitness gap and decays with distance. Positions advance by the
half-a-t-squared kinematic update, probes that leave the box are pulled back
inside by the repositioning factor, and two saturation detectors (fitness
and probe-spread) diagnose convergence. With a fixed noise seed the whole
trajectory is a pure function of the inputs.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np

from .rng import NoiseState, SplitMix64, gaussian_deviate
from .space import DecisionSpace

# Distances below this fraction of the space diagonal count as coincident
# probes and the pair is skipped in the force sum.
COINCIDENT_REL_TOL = 1e-14

# Full per-step history is retained up to this many steps; longer runs keep
# only the rolling state plus diagnostic series.
HISTORY_STEP_LIMIT = 10_000

_SCHEMES = {"on_axis", "off_diagonal", "grid_2d", "custom"}


class ConfigError(ValueError):
    """A run configuration field failed validation."""


class EngineError(RuntimeError):
    """An objective evaluation failed during a run."""


class InvariantError(RuntimeError):
    """An internal engine invariant was violated (a bug, not a user error)."""


def _canon_scheme(name: str) -> str:
    key = str(name).replace("-", "_").replace(" ", "_").lower()
    key = {"onaxis": "on_axis", "offdiagonal": "off_diagonal",
           "grid2d": "grid_2d", "grid_2_d": "grid_2d"}.get(key.replace("_", ""), key)
    if key not in _SCHEMES:
        raise ConfigError(f"init_scheme: unknown scheme {name!r}")
    return key


@dataclass
class CfoConfig:
    """Run parameters. Defaults follow the benchmark convention

    g=2, delta_t=1, alpha=beta=2, repositioning factor starting at 0.5 and
    stepped by 0.005 whenever the saved-best ring flattens out.
    """

    n_probes: int
    n_steps: int
    g: float = 2.0
    delta_t: float = 1.0
    alpha: float = 2.0
    beta: float = 2.0
    init_scheme: str = "on_axis"
    gamma: float = 0.5
    initial_probes: Optional[np.ndarray] = None
    initial_acceleration: Optional[np.ndarray] = None
    frep_init: float = 0.5
    frep_increment: float = 0.005
    fit_tol: float = 0.0005
    n_saved: int = 5
    n_sat: int = 3
    n_avg_steps: int = 50
    fitness_sat_tol: float = 1e-5
    davg_sat_tol: float = 5e-4
    early_termination: bool = False
    perturb_on_oscillation: bool = False
    perturbation_sigma: float = 0.1
    mitigation_seed: int = 0
    shrink_interval: Optional[int] = None
    keep_history: Optional[bool] = None

    def validate(self, space: Optional[DecisionSpace] = None) -> None:
        if int(self.n_probes) < 2:
            raise ConfigError("n_probes: need at least 2 probes")
        if int(self.n_steps) < 1:
            raise ConfigError("n_steps: need at least 1 step")
        if not self.delta_t > 0:
            raise ConfigError("delta_t: must be > 0")
        if not self.alpha > 0:
            raise ConfigError("alpha: must be > 0")
        if not self.beta > 0:
            raise ConfigError("beta: must be > 0")
        if not 0.0 <= self.gamma <= 1.0:
            raise ConfigError("gamma: must lie in [0, 1]")
        if not 0.0 < self.frep_init <= 1.0:
            raise ConfigError("frep_init: must lie in (0, 1]")
        if not self.frep_increment > 0:
            raise ConfigError("frep_increment: must be > 0")
        if not (self.n_saved >= self.n_sat >= 1):
            raise ConfigError("n_saved/n_sat: need n_saved >= n_sat >= 1")
        if self.n_avg_steps < 1:
            raise ConfigError("n_avg_steps: must be >= 1")
        if self.shrink_interval is not None and self.shrink_interval < 1:
            raise ConfigError("shrink_interval: must be >= 1 when set")
        scheme = _canon_scheme(self.init_scheme)
        if scheme == "custom" and self.initial_probes is None:
            raise ConfigError("initial_probes: required for the custom scheme")
        if space is not None:
            self._validate_scheme(scheme, space)

    def _validate_scheme(self, scheme: str, space: DecisionSpace) -> None:
        n_p, n_d = int(self.n_probes), space.n_dims
        if scheme == "on_axis":
            if n_p % n_d != 0 or n_p // n_d < 2:
                raise ConfigError(
                    "n_probes: on-axis init needs n_probes divisible by n_dims "
                    "with at least 2 probes per axis"
                )
        elif scheme == "grid_2d":
            side = math.isqrt(n_p)
            if n_d != 2 or side * side != n_p:
                raise ConfigError(
                    "n_probes: 2-D grid init needs n_dims = 2 and a perfect-square n_probes"
                )
        elif scheme == "custom":
            pts = np.asarray(self.initial_probes, dtype=float)
            if pts.shape != (n_p, n_d):
                raise ConfigError(
                    f"initial_probes: expected shape ({n_p}, {n_d}), got {pts.shape}"
                )
            if not space.contains(pts):
                raise ConfigError("initial_probes: a custom point lies outside the bounds")

    def to_dict(self) -> dict:
        d = {
            "n_probes": int(self.n_probes),
            "n_steps": int(self.n_steps),
            "g": float(self.g),
            "delta_t": float(self.delta_t),
            "alpha": float(self.alpha),
            "beta": float(self.beta),
            "init_scheme": _canon_scheme(self.init_scheme),
            "gamma": float(self.gamma),
            "frep_init": float(self.frep_init),
            "frep_increment": float(self.frep_increment),
            "fit_tol": float(self.fit_tol),
            "n_saved": int(self.n_saved),
            "n_sat": int(self.n_sat),
            "n_avg_steps": int(self.n_avg_steps),
            "fitness_sat_tol": float(self.fitness_sat_tol),
            "davg_sat_tol": float(self.davg_sat_tol),
            "early_termination": bool(self.early_termination),
            "perturb_on_oscillation": bool(self.perturb_on_oscillation),
            "perturbation_sigma": float(self.perturbation_sigma),
            "mitigation_seed": int(self.mitigation_seed),
            "shrink_interval": None if self.shrink_interval is None else int(self.shrink_interval),
        }
        if self.initial_probes is not None:
            d["initial_probes"] = np.asarray(self.initial_probes, dtype=float).tolist()
        if self.initial_acceleration is not None:
            d["initial_acceleration"] = np.asarray(self.initial_acceleration, dtype=float).tolist()
        return d


@dataclass
class RunState:
    """Mutable per-run state; exposed mainly for the repositioning update."""

    positions: np.ndarray
    positions_prev: np.ndarray
    accelerations: np.ndarray
    fitness: np.ndarray
    best_fitness_so_far: float
    best_probe: int  # 1-based
    best_step: int
    best_position: np.ndarray
    saved_best: np.ndarray
    frep_current: float
    step: int


@dataclass
class RunRecord:
    """Everything a finished run reports.

    best_fitness is the running (nondecreasing) best; step_best_fitness is
    the best value found within each individual step, which is what the
    saturation detectors and the fitness output files use. Probe numbers are
    1-based, step numbers 0-based with step 0 the initial distribution.
    """

    config: dict
    bounds: list
    best_fitness: list
    step_best_fitness: list
    best_probe: list
    d_avg: list
    frep: list
    n_eval: list
    best_point: np.ndarray
    final_best_fitness: float
    final_best_probe: int
    final_best_step: int
    saturation_step: int
    termination_reason: str
    steps_executed: int
    fitness_history: Optional[np.ndarray] = None
    positions_history: Optional[np.ndarray] = None

    def to_json(self, indent: Optional[int] = None) -> str:
        """Canonical serialization: identical runs give identical bytes.

        The raw fitness/position histories stay in memory only; the record
        serializes the config echo, the diagnostic series, and the result.
        """
        doc = {
            "schema_version": 1,
            "config": self.config,
            "bounds": [[float(a), float(b)] for a, b in self.bounds],
            "series": {
                "best_fitness": [float(v) for v in self.best_fitness],
                "step_best_fitness": [float(v) for v in self.step_best_fitness],
                "best_probe": [int(v) for v in self.best_probe],
                "d_avg": [float(v) for v in self.d_avg],
                "frep": [float(v) for v in self.frep],
                "n_eval": [int(v) for v in self.n_eval],
            },
            "final": {
                "best_point": [float(v) for v in np.asarray(self.best_point)],
                "best_fitness": float(self.final_best_fitness),
                "best_probe": int(self.final_best_probe),
                "best_step": int(self.final_best_step),
                "saturation_step": int(self.saturation_step),
                "termination_reason": self.termination_reason,
                "steps_executed": int(self.steps_executed),
            },
        }
        return json.dumps(doc, sort_keys=True, separators=(",", ": "), indent=indent)


# ---------------------------------------------------------------------------
# elementary operations


def unit_step(z: float) -> int:
    """1 for z >= 0, else 0."""
    if not np.isfinite(z):
        raise EngineError("non-finite fitness difference")
    return 1 if z >= 0.0 else 0


def cfo_mass(m_k: float, m_p: float, alpha: float) -> float:
    """Nonnegative pair coupling: (m_k - m_p)^alpha when the gap is >= 0.

    The gate keeps the interaction attractive toward better probes only; a
    zero gap contributes zero because alpha > 0.
    """
    if not (np.isfinite(m_k) and np.isfinite(m_p)):
        raise EngineError("non-finite fitness in mass coefficient")
    diff = m_k - m_p
    if diff < 0.0:
        return 0.0
    return diff ** alpha


def compute_accelerations(
    positions: np.ndarray,
    fitness: np.ndarray,
    cfg: CfoConfig,
    space: Optional[DecisionSpace] = None,
) -> np.ndarray:
    """Pairwise gravitational update, vectorized over all probe pairs.

    a_p = g * sum_k mass(m_k, m_p) * (r_k - r_p) / |r_k - r_p|^beta.
    Coincident pairs are skipped (zero contribution): exactly-zero distance
    always, and distances below 1e-14 of the space diagonal when the space
    is supplied.
    """
    pos = np.asarray(positions, dtype=float)
    fit = np.asarray(fitness, dtype=float)
    if not np.isfinite(fit).all():
        raise EngineError("non-finite fitness passed to acceleration update")
    n_p = pos.shape[0]
    diff = pos[None, :, :] - pos[:, None, :]          # [p, k, :] = r_k - r_p
    dist = np.sqrt(np.sum(diff * diff, axis=2))       # [p, k]
    gap = np.maximum(fit[None, :] - fit[:, None], 0.0)
    mass = gap ** float(cfg.alpha)

    cutoff = 0.0 if space is None else COINCIDENT_REL_TOL * space.diag_length
    alive = dist > cutoff
    np.fill_diagonal(alive, False)

    denom = np.where(alive, dist, 1.0) ** float(cfg.beta)
    weight = np.where(alive, mass / denom, 0.0)
    return float(cfg.g) * np.einsum("pk,pkd->pd", weight, diff)


def advance_positions(
    positions_prev: np.ndarray, accelerations_prev: np.ndarray, delta_t: float
) -> np.ndarray:
    """Kinematic step r + a t^2 / 2, no velocity term, no clamping."""
    return np.asarray(positions_prev, dtype=float) + 0.5 * np.asarray(
        accelerations_prev, dtype=float
    ) * (delta_t ** 2)


def retrieve_errant_probes(
    raw: np.ndarray, prev: np.ndarray, space: DecisionSpace, frep: float
) -> np.ndarray:
    """Pull out-of-bounds coordinates back inside the box.

    A low escape lands at lo + frep*(prev - lo), a high escape at
    hi - frep*(hi - prev); in-bounds coordinates pass through. The final
    clip only absorbs 1-ulp rounding of the arithmetic above.
    """
    raw = np.asarray(raw, dtype=float)
    prev = np.asarray(prev, dtype=float)
    lo, hi = space.lower, space.upper
    out = np.where(raw < lo, lo + frep * (prev - lo), raw)
    out = np.where(raw > hi, hi - frep * (hi - prev), out)
    return np.clip(out, lo, hi)


def saved_slot_index(j: int, n_saved: int) -> int:
    """Ring slot for step j, in 1..n_saved (remainder 0 maps to n_saved)."""
    if j < 1:
        raise ValueError("slot index defined for steps j >= 1")
    s = j % n_saved
    return n_saved if s == 0 else s


def update_frep(state: RunState, cfg: CfoConfig) -> float:
    """Step the repositioning factor when the saved-best ring has flattened.

    The test compares the last ring slot against the mean of the last n_sat
    slots; within fit_tol the factor grows by frep_increment, and a result
    reaching 1 wraps back to frep_init.
    """
    ring = state.saved_best
    tail = ring[cfg.n_saved - cfg.n_sat:]
    if abs(float(ring[cfg.n_saved - 1]) - float(tail.mean())) <= cfg.fit_tol:
        nxt = state.frep_current + cfg.frep_increment
        return cfg.frep_init if nxt >= 1.0 else nxt
    return state.frep_current


# ---------------------------------------------------------------------------
# initial probe distributions


def init_probes(scheme: str, space: DecisionSpace, cfg: CfoConfig) -> np.ndarray:
    scheme = _canon_scheme(scheme)
    cfg._validate_scheme(scheme, space)
    n_p, n_d = int(cfg.n_probes), space.n_dims
    lo, hi = space.lower, space.upper

    if scheme == "on_axis":
        per_axis = n_p // n_d
        anchor = lo + cfg.gamma * (hi - lo)
        pts = np.tile(anchor, (n_p, 1))
        ramp = np.linspace(0.0, 1.0, per_axis)
        for axis in range(n_d):
            rows = slice(axis * per_axis, (axis + 1) * per_axis)
            pts[rows, axis] = lo[axis] + ramp * (hi[axis] - lo[axis])
        return pts

    if scheme == "grid_2d":
        side = math.isqrt(n_p)
        x1 = np.linspace(lo[0], hi[0], side)
        x2 = np.linspace(lo[1], hi[1], side)
        pts = np.empty((n_p, 2))
        for k in range(side):        # x1 index, outer
            for m in range(side):    # x2 index, inner
                pts[side * k + m] = (x1[k], x2[m])
        return pts

    if scheme == "off_diagonal":
        pts = np.empty((n_p, n_d))
        denom = n_p * n_d - 1
        for p in range(1, n_p + 1):
            for i in range(1, n_d + 1):
                frac = (n_d * (p - 1) + i - 1) / denom
                pts[p - 1, i - 1] = lo[i - 1] + frac * (hi[i - 1] - lo[i - 1])
        return pts

    return np.array(cfg.initial_probes, dtype=float, copy=True)


def uniform_diagonal_points(space: DecisionSpace, n: int) -> np.ndarray:
    """n points evenly spaced along the principal diagonal, ends inclusive."""
    if n < 2:
        raise ValueError("need at least 2 points")
    t = np.linspace(0.0, 1.0, n)[:, None]
    return space.lower + t * (space.upper - space.lower)


def uniform_lattice_points(space: DecisionSpace, shape: tuple[int, int]) -> np.ndarray:
    """Inclusive n1 x n2 rectangular lattice for 2-D spaces.

    Rows are ordered with the first coordinate varying slowest, so
    shape=(6, 4) gives 6 distinct first-coordinate values with 4 second
    coordinate values each. Covers grid layouts that are not square.
    """
    if space.n_dims != 2:
        raise ValueError("lattice points are defined for 2-D spaces")
    n1, n2 = shape
    if n1 < 2 or n2 < 2:
        raise ValueError("lattice needs at least 2 points per side")
    x1 = np.linspace(space.lower[0], space.upper[0], n1)
    x2 = np.linspace(space.lower[1], space.upper[1], n2)
    pts = np.empty((n1 * n2, 2))
    for m in range(n1):
        for k in range(n2):
            pts[m * n2 + k] = (x1[m], x2[k])
    return pts


# ---------------------------------------------------------------------------
# diagnostics


def d_avg(positions: np.ndarray, reference, space: DecisionSpace) -> float:
    """Average probe distance from the reference, normalized by the diagonal.

    reference is either a row index into positions (the best probe) or an
    explicit coordinate vector (the historical best position). The reference
    probe itself stays in the average and contributes zero.
    """
    pos = np.asarray(positions, dtype=float)
    n_p = pos.shape[0]
    if n_p < 2:
        raise ValueError("spread diagnostic needs at least 2 probes")
    if np.isscalar(reference) or isinstance(reference, (int, np.integer)):
        ref = pos[int(reference)]
    else:
        ref = np.asarray(reference, dtype=float)
    dists = np.sqrt(np.sum((pos - ref) ** 2, axis=1))
    return float(dists.sum() / (space.diag_length * (n_p - 1)))


def detect_fitness_saturation(best_series: Sequence[float], j: int, cfg: CfoConfig) -> bool:
    """Has the per-step best flattened over the last n_avg_steps window?

    Requires at least 10 steps beyond the averaging window before it may
    fire; then fires when the window mean sits within fitness_sat_tol of the
    step-j value.
    """
    if j < cfg.n_avg_steps + 10 or j >= len(best_series):
        return False
    window = np.asarray(best_series[j - cfg.n_avg_steps + 1: j + 1], dtype=float)
    return bool(abs(window.mean() - float(best_series[j])) <= cfg.fitness_sat_tol)


def detect_davg_saturation(davg_series: Sequence[float], j: int, cfg: CfoConfig) -> bool:
    """Same test as fitness saturation, on the probe-spread series."""
    if j < cfg.n_avg_steps + 10 or j >= len(davg_series):
        return False
    window = np.asarray(davg_series[j - cfg.n_avg_steps + 1: j + 1], dtype=float)
    return bool(abs(window.mean() - float(davg_series[j])) <= cfg.davg_sat_tol)


def detect_oscillation(davg_series: Sequence[float], j: int) -> bool:
    """Is the spread series zigzagging instead of settling?

    Looks at the slopes over the window k = j-10 .. j-1 and counts sign
    changes between consecutive slopes (9 comparisons); 3 or more means
    oscillation. Inactive before step 15.
    """
    if j < 15 or j >= len(davg_series):
        return False
    d = davg_series
    slopes = [d[k] - d[k - 1] for k in range(j - 10, j)]
    changes = sum(1 for a, b in zip(slopes, slopes[1:]) if a * b < 0.0)
    return changes >= 3


def best_fitness(fitness_history, up_to_step: int) -> tuple[float, int, int]:
    """Best (value, probe, step) over history, scanned step-major.

    Ties go to the latest entry scanned, so equal values resolve to the
    larger step and, within a step, the larger probe number. Probe numbers
    are 1-based, steps 0-based.
    """
    hist = np.asarray(fitness_history, dtype=float)
    best_v = hist[0][0]
    best_p, best_s = 1, 0
    for step in range(0, up_to_step + 1):
        row = hist[step]
        for probe in range(row.shape[0]):
            if row[probe] >= best_v:
                best_v = row[probe]
                best_p = probe + 1
                best_s = step
    return float(best_v), best_p, best_s


# ---------------------------------------------------------------------------
# the run loop


def _coerce_initial_acceleration(cfg: CfoConfig, n_p: int, n_d: int) -> np.ndarray:
    if cfg.initial_acceleration is None:
        return np.zeros((n_p, n_d))
    arr = np.asarray(cfg.initial_acceleration, dtype=float)
    if arr.ndim == 0:
        return np.full((n_p, n_d), float(arr))
    if arr.shape == (n_d,):
        return np.tile(arr, (n_p, 1))
    if arr.shape == (n_p, n_d):
        return arr.copy()
    raise ConfigError(
        f"initial_acceleration: expected scalar, ({n_d},) or ({n_p}, {n_d}), got {arr.shape}"
    )


def run(cfg: CfoConfig, space: DecisionSpace, objective) -> RunRecord:
    """Execute one optimization run and return its record.

    Per step: advance positions, retrieve escapees, evaluate fitnesses in
    ascending probe order, update the best bookkeeping and the saved-best
    ring, update the repositioning factor, compute the next accelerations,
    then record diagnostics. Runs to n_steps, or stops at the first fitness
    saturation when early_termination is on.
    """
    cfg.validate(space)
    n_p, n_d = int(cfg.n_probes), space.n_dims

    eval_ctx = getattr(objective, "evaluate_with_context", None)
    eval_fn = getattr(objective, "evaluate", objective)

    def evaluate_all(pos: np.ndarray, step: int) -> np.ndarray:
        out = np.empty(n_p)
        for p in range(n_p):
            x = pos[p].copy()
            try:
                v = eval_ctx(x, step, p + 1) if eval_ctx is not None else eval_fn(x)
            except Exception as exc:
                raise EngineError(
                    f"objective failed at step {step}, probe {p + 1}: {exc}"
                ) from exc
            v = float(v)
            if not math.isfinite(v):
                raise EngineError(
                    f"objective returned non-finite fitness at step {step}, probe {p + 1}"
                )
            out[p] = v
        return out

    keep_history = cfg.keep_history
    if keep_history is None:
        keep_history = cfg.n_steps <= HISTORY_STEP_LIMIT

    work_space = space
    mitigation_noise = None
    if cfg.perturb_on_oscillation:
        mitigation_noise = NoiseState(mu=0.0, sigma=cfg.perturbation_sigma,
                                      rng=SplitMix64(cfg.mitigation_seed))

    positions = init_probes(cfg.init_scheme, space, cfg)
    accelerations = _coerce_initial_acceleration(cfg, n_p, n_d)
    fitness = evaluate_all(positions, 0)

    state = RunState(
        positions=positions,
        positions_prev=positions.copy(),
        accelerations=accelerations,
        fitness=fitness,
        best_fitness_so_far=-math.inf,
        best_probe=1,
        best_step=0,
        best_position=positions[0].copy(),
        saved_best=np.empty(cfg.n_saved),
        frep_current=float(cfg.frep_init),
        step=0,
    )

    def absorb_step_fitness(step: int) -> bool:
        """Scan probes in order with >= updates; True when the best moved."""
        improved = False
        for p in range(n_p):
            if state.fitness[p] >= state.best_fitness_so_far:
                state.best_fitness_so_far = float(state.fitness[p])
                state.best_probe = p + 1
                state.best_step = step
                state.best_position = state.positions[p].copy()
                improved = True
        return improved

    absorb_step_fitness(0)
    state.saved_best.fill(state.best_fitness_so_far)

    cum_best = [state.best_fitness_so_far]
    step_best = [float(fitness.max())]
    best_probe_series = [state.best_probe]
    davg_series = [d_avg(positions, state.best_position, work_space)]
    frep_series = [state.frep_current]
    n_eval_series = [n_p]
    fit_hist = [fitness.copy()] if keep_history else None
    pos_hist = [positions.copy()] if keep_history else None

    reason = "CompletedNt"
    last_step = 0

    for j in range(1, int(cfg.n_steps) + 1):
        state.step = j
        raw = advance_positions(state.positions, state.accelerations, cfg.delta_t)
        state.positions_prev = state.positions
        state.positions = retrieve_errant_probes(raw, state.positions_prev,
                                                 work_space, state.frep_current)
        if not work_space.contains(state.positions):
            raise InvariantError(f"probe escaped containment at step {j}")

        state.fitness = evaluate_all(state.positions, j)
        if absorb_step_fitness(j):
            state.saved_best[saved_slot_index(j, cfg.n_saved) - 1] = state.best_fitness_so_far
        state.frep_current = update_frep(state, cfg)
        state.accelerations = compute_accelerations(state.positions, state.fitness,
                                                    cfg, work_space)

        cum_best.append(state.best_fitness_so_far)
        step_best.append(float(state.fitness.max()))
        best_probe_series.append(state.best_probe)
        davg_series.append(d_avg(state.positions, state.best_position, work_space))
        frep_series.append(state.frep_current)
        n_eval_series.append((j + 1) * n_p)
        if keep_history:
            fit_hist.append(state.fitness.copy())
            pos_hist.append(state.positions.copy())
        last_step = j

        if mitigation_noise is not None and j < cfg.n_steps:
            if detect_davg_saturation(davg_series, j, cfg) and detect_oscillation(davg_series, j):
                row = state.best_probe - 1
                jolt = np.array([gaussian_deviate(mitigation_noise) for _ in range(n_d)])
                raw_row = 0.5 * state.positions[row] * (1.0 + jolt)
                state.positions[row] = retrieve_errant_probes(
                    raw_row[None, :], state.positions[row][None, :],
                    work_space, state.frep_current,
                )[0]

        if cfg.shrink_interval is not None and j % cfg.shrink_interval == 0 and j < cfg.n_steps:
            target = state.best_position
            new_lo = work_space.lower + 0.5 * (target - work_space.lower)
            new_hi = work_space.upper - 0.5 * (work_space.upper - target)
            work_space = DecisionSpace(new_lo, new_hi)
            state.positions = np.clip(state.positions, new_lo, new_hi)

        if cfg.early_termination and detect_fitness_saturation(step_best, j, cfg):
            reason = "FitnessSaturated"
            break

    cum = np.asarray(cum_best)
    sat = int(np.searchsorted(cum, cum[-1] - cfg.fitness_sat_tol, side="left"))

    return RunRecord(
        config=cfg.to_dict(),
        bounds=space.bounds_list(),
        best_fitness=cum_best,
        step_best_fitness=step_best,
        best_probe=best_probe_series,
        d_avg=davg_series,
        frep=frep_series,
        n_eval=n_eval_series,
        best_point=state.best_position.copy(),
        final_best_fitness=state.best_fitness_so_far,
        final_best_probe=state.best_probe,
        final_best_step=state.best_step,
        saturation_step=sat,
        termination_reason=reason,
        steps_executed=last_step,
        fitness_history=np.asarray(fit_hist) if keep_history else None,
        positions_history=np.asarray(pos_hist) if keep_history else None,
    )
