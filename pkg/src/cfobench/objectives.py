"""Maximization objectives: analytic test functions and antenna surrogates.

Every objective is registered under a lowercase id with default bounds.
Minimization classics are negated so the documented optimum is always a
maximum. Functions embedding nonzero offsets in the benchmark suite are
registered twice: the plain textbook form under the base id and the offset
form under <id>_shifted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import antenna
from .rng import NoiseState, gaussian_deviate
from .space import DecisionSpace


class ObjectiveError(ValueError):
    """Unknown objective id or unusable objective options."""


@dataclass
class Objective:
    id: str
    n_dims: int
    bounds: DecisionSpace
    evaluate: Callable
    evaluate_batch: Optional[Callable] = None
    evaluate_with_context: Optional[Callable] = None
    noise: Optional[NoiseState] = None
    close: Optional[Callable] = None
    description: str = ""


def _vectorized(obj_id, rows_fn, bounds, description="") -> Objective:
    space = DecisionSpace.from_bounds(bounds)

    def evaluate(x):
        return float(rows_fn(np.atleast_2d(np.asarray(x, dtype=float)))[0])

    def evaluate_batch(x):
        return np.asarray(rows_fn(np.asarray(x, dtype=float)), dtype=float)

    return Objective(
        id=obj_id,
        n_dims=space.n_dims,
        bounds=space,
        evaluate=evaluate,
        evaluate_batch=evaluate_batch,
        description=description,
    )


def _shift_rows(rows_fn, offsets):
    off = np.asarray(offsets, dtype=float)
    return lambda X: rows_fn(np.asarray(X, dtype=float) - off)


# ---------------------------------------------------------------------------
# analytic test functions (row-vectorized)


def _parrott_f4_rows(X):
    x = X[:, 0]
    envelope = np.exp(-2.0 * math.log(2.0) * ((x - 0.08) / 0.854) ** 2)
    # max(x, 0) keeps the fractional power finite for out-of-domain probes
    lobe = np.sin(5.0 * math.pi * (np.maximum(x, 0.0) ** 0.75 - 0.05)) ** 6
    return envelope * lobe


def _sgo_rows(X):
    return -np.sum(X ** 4 - 16.0 * X ** 2 + 0.5 * X, axis=1)


def _gp_rows(X):
    x1, x2 = X[:, 0], X[:, 1]
    t1 = 1.0 + (x1 + x2 + 1.0) ** 2 * (
        19.0 - 14.0 * x1 + 3.0 * x1 ** 2 - 14.0 * x2 + 6.0 * x1 * x2 + 3.0 * x2 ** 2
    )
    t2 = 30.0 + (2.0 * x1 - 3.0 * x2) ** 2 * (
        18.0 - 32.0 * x1 + 12.0 * x1 ** 2 + 48.0 * x2 - 36.0 * x1 * x2 + 27.0 * x2 ** 2
    )
    return -(t1 * t2)


def _step_rows(X):
    return -np.sum(np.floor(X + 0.5) ** 2, axis=1)


def _schwefel_rows(X):
    return np.sum(X * np.sin(np.sqrt(np.abs(X))), axis=1)


def _colville_rows(X):
    x1, x2, x3, x4 = X[:, 0], X[:, 1], X[:, 2], X[:, 3]
    val = (
        100.0 * (x2 - x1 ** 2) ** 2
        + (1.0 - x1) ** 2
        + 90.0 * (x4 - x3 ** 2) ** 2
        + (1.0 - x3) ** 2
        + 10.1 * ((x2 - 1.0) ** 2 + (x4 - 1.0) ** 2)
        + 19.8 * (x2 - 1.0) * (x4 - 1.0)
    )
    return -val


def _griewank_rows(X):
    idx = np.sqrt(np.arange(1, X.shape[1] + 1, dtype=float))
    return -(np.sum(X ** 2, axis=1) / 4000.0 - np.prod(np.cos(X / idx), axis=1) + 1.0)


def _himmelblau_rows(X):
    x1, x2 = X[:, 0], X[:, 1]
    return 200.0 - (x1 ** 2 + x2 - 11.0) ** 2 - (x1 + x2 ** 2 - 7.0) ** 2


# ---------------------------------------------------------------------------
# antenna surrogate objectives

PBM_DOMAINS = {
    1: [(0.5, 3.0), (0.0, math.pi / 2)],
    2: [(5.0, 15.0), (0.0, math.pi)],
    3: [(0.0, 4.0), (0.0, math.pi)],
}


def _make_pbm1(n_theta=antenna.DEFAULT_N_THETA, n_phi=antenna.DEFAULT_N_PHI) -> Objective:
    def evaluate(x):
        length, theta = float(x[0]), float(x[1])
        pattern = lambda th, ph: antenna.dipole_pattern(length, th)
        return antenna.directivity(
            pattern, theta, 0.0, n_theta, n_phi, power_key=("pbm1", length)
        )

    return Objective(
        id="pbm1",
        n_dims=2,
        bounds=DecisionSpace.from_bounds(PBM_DOMAINS[1]),
        evaluate=evaluate,
        description="variable-length dipole directivity over (length, theta)",
    )


def _make_pbm2(n_elements=10, n_theta=antenna.DEFAULT_N_THETA,
               n_phi=antenna.DEFAULT_N_PHI) -> Objective:
    def evaluate(x):
        d, theta = float(x[0]), float(x[1])
        pattern = antenna.uniform_line_pattern(d, n_elements)
        return antenna.directivity(
            pattern, theta, math.pi / 2, n_theta, n_phi,
            power_key=("pbm2", n_elements, d),
        )

    return Objective(
        id="pbm2",
        n_dims=2,
        bounds=DecisionSpace.from_bounds(PBM_DOMAINS[2]),
        evaluate=evaluate,
        description="uniform 10-element line directivity in the phi=90 plane",
    )


def _make_pbm3(n_theta=antenna.DEFAULT_N_THETA, n_phi=antenna.DEFAULT_N_PHI) -> Objective:
    def evaluate(x):
        beta, theta = float(x[0]), float(x[1])
        pattern = antenna.array_pattern(antenna.circular_array_spec(beta))
        return antenna.directivity(
            pattern, theta, 0.0, n_theta, n_phi, power_key=("pbm3", beta)
        )

    return Objective(
        id="pbm3",
        n_dims=2,
        bounds=DecisionSpace.from_bounds(PBM_DOMAINS[3]),
        evaluate=evaluate,
        description="phase-steered 8-element ring directivity over (beta, theta)",
    )


def _make_pbm5(n_elements=10, n_theta=antenna.DEFAULT_N_THETA,
               n_phi=antenna.DEFAULT_N_PHI) -> Objective:
    if n_elements < 2:
        raise ObjectiveError("pbm5: n_elements must be >= 2")
    n_dims = n_elements - 1

    def evaluate(x):
        spacings = np.asarray(x, dtype=float)
        pattern = antenna.array_pattern(antenna.collinear_array_spec(spacings))
        key = ("pbm5",) + tuple(float(v) for v in spacings)
        return antenna.directivity(
            pattern, math.pi / 2, 0.0, n_theta, n_phi, power_key=key
        )

    return Objective(
        id="pbm5",
        n_dims=n_dims,
        bounds=DecisionSpace.from_bounds([(0.5, 1.5)] * n_dims),
        evaluate=evaluate,
        description=f"collinear {n_elements}-element broadside directivity over spacings",
    )


def _make_pbm4(**_options):
    raise ObjectiveError(
        "pbm4 has no analytic surrogate (the landscape is dominated by "
        "full-wave arm interaction); evaluate it through the external "
        "objective protocol instead"
    )


# ---------------------------------------------------------------------------
# registry


def _make_external(command=None, timeout=60.0, bounds=None, run_id="run0") -> Objective:
    from .external import ExternalObjective

    if command is None:
        raise ObjectiveError("external: a command is required")
    if bounds is None:
        raise ObjectiveError("external: bounds are required")
    space = DecisionSpace.from_bounds(bounds)
    client = ExternalObjective(command, timeout=timeout, run_id=run_id)
    return Objective(
        id="external",
        n_dims=space.n_dims,
        bounds=space,
        evaluate=lambda x: client.evaluate(x),
        evaluate_with_context=client.evaluate,
        close=client.close,
        description=f"external process objective: {command!r}",
    )


def _analytic_factory(obj_id, rows_fn, bounds, description, offsets=None, dims_option=False):
    def factory(n_dims=None, **extra):
        if extra:
            raise ObjectiveError(f"{obj_id}: unknown options {sorted(extra)}")
        fn = rows_fn if offsets is None else _shift_rows(rows_fn, offsets)
        b = bounds
        if dims_option:
            n = int(n_dims) if n_dims is not None else len(bounds)
            b = [bounds[0]] * n
        elif n_dims is not None and int(n_dims) != len(bounds):
            raise ObjectiveError(f"{obj_id}: dimensionality is fixed at {len(bounds)}")
        return _vectorized(obj_id, fn, b, description)

    return factory


def _parrott_factory(offset=0.0, **extra):
    if extra:
        raise ObjectiveError(f"parrott_f4: unknown options {sorted(extra)}")
    rows = _parrott_f4_rows if offset == 0.0 else _shift_rows(_parrott_f4_rows, [offset])
    return _vectorized("parrott_f4", rows, [(0.0, 1.0)],
                       "narrow decaying lobe train on the unit interval")


def _neg_sum_squares_factory(n_dims=3, **extra):
    if extra:
        raise ObjectiveError(f"neg_sum_squares: unknown options {sorted(extra)}")
    n = int(n_dims)
    return _vectorized("neg_sum_squares", lambda X: -np.sum(X ** 2, axis=1),
                       [(-5.0, 5.0)] * n, "smooth paraboloid, maximum 0 at the origin")


REGISTRY: dict = {
    "parrott_f4": _parrott_factory,
    "sgo": _analytic_factory("sgo", _sgo_rows, [(-5.0, 5.0)] * 2,
                             "two-dimensional double-well quartic"),
    "sgo_shifted": _analytic_factory("sgo_shifted", _sgo_rows, [(-50.0, 50.0)] * 2,
                                     "quartic with the benchmark offsets",
                                     offsets=(40.0, 10.0)),
    "gp": _analytic_factory("gp", _gp_rows, [(-2.0, 2.0)] * 2,
                            "Goldstein-Price, negated"),
    "gp_shifted": _analytic_factory("gp_shifted", _gp_rows, [(-100.0, 100.0)] * 2,
                                    "Goldstein-Price with the benchmark offsets",
                                    offsets=(20.0, -10.0)),
    "step": _analytic_factory("step", _step_rows, [(-100.0, 100.0)] * 2,
                              "negated step plateaus", dims_option=True),
    "step_shifted": _analytic_factory("step_shifted", _step_rows,
                                      [(-100.0, 100.0)] * 2,
                                      "step plateaus with the benchmark offsets",
                                      offsets=(75.0, 35.0)),
    "schwefel_226": _analytic_factory("schwefel_226", _schwefel_rows,
                                      [(-500.0, 500.0)] * 30,
                                      "Schwefel sine-sqrt landscape",
                                      dims_option=True),
    "colville": _analytic_factory("colville", _colville_rows, [(-10.0, 10.0)] * 4,
                                  "Colville valley, negated"),
    "colville_shifted": _analytic_factory("colville_shifted", _colville_rows,
                                          [(-10.0, 10.0)] * 4,
                                          "Colville with the benchmark offset",
                                          offsets=(7.123,) * 4),
    "griewank": _analytic_factory("griewank", _griewank_rows, [(-600.0, 600.0)] * 2,
                                  "Griewank bowl with cosine ripple, negated",
                                  dims_option=True),
    "griewank_shifted": _analytic_factory("griewank_shifted", _griewank_rows,
                                          [(-600.0, 600.0)] * 2,
                                          "Griewank with the benchmark offset",
                                          offsets=(75.123, 75.123)),
    "himmelblau": _analytic_factory("himmelblau", _himmelblau_rows, [(-6.0, 6.0)] * 2,
                                    "inverted Himmelblau, four maxima of 200"),
    "neg_sum_squares": _neg_sum_squares_factory,
    "pbm1": _make_pbm1,
    "pbm2": _make_pbm2,
    "pbm3": _make_pbm3,
    "pbm4": _make_pbm4,
    "pbm5": _make_pbm5,
    "external": _make_external,
}


def list_objectives() -> list:
    return sorted(REGISTRY)


def get_objective(obj_id: str, **options) -> Objective:
    """Build a registered objective; a noise option wraps it in Gaussian noise.

    noise = {"seed": int, "sigma": float (default 0.4472), "mu": float}.
    """
    key = str(obj_id).strip().lower()
    factory = REGISTRY.get(key)
    if factory is None:
        raise ObjectiveError(f"unknown objective id {obj_id!r}")
    noise_opt = options.pop("noise", None)
    obj = factory(**options)
    if noise_opt:
        obj = with_noise(
            obj,
            sigma=float(noise_opt.get("sigma", 0.4472)),
            seed=int(noise_opt["seed"]),
            mu=float(noise_opt.get("mu", 0.0)),
        )
    return obj


def evaluate(obj_id: str, x, **options) -> float:
    """One-shot evaluation by id."""
    return get_objective(obj_id, **options).evaluate(np.asarray(x, dtype=float))


def pbm_objective(n: int, x, **options) -> float:
    """Evaluate antenna benchmark n at x (n = 4 has no surrogate)."""
    if n not in (1, 2, 3, 4, 5):
        raise ObjectiveError(f"unknown benchmark number {n}")
    return evaluate(f"pbm{n}", x, **options)


def with_noise(obj: Objective, sigma: float, seed: int, mu: float = 0.0) -> Objective:
    """Additive Gaussian noise on the returned fitness, seeded stream.

    The noisy objective is stateful (the stream advances per call), so batch
    evaluation is disabled and evaluation order matters for reproducibility.
    """
    state = NoiseState.seeded(seed, mu=mu, sigma=sigma)
    base_eval = obj.evaluate

    def evaluate_noisy(x):
        return base_eval(x) + gaussian_deviate(state)

    return Objective(
        id=obj.id,
        n_dims=obj.n_dims,
        bounds=obj.bounds,
        evaluate=evaluate_noisy,
        noise=state,
        description=(obj.description + " + additive Gaussian noise").strip(),
    )
