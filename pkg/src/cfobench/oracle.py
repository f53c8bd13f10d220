"""Brute-force grid maximization used as ground truth in the benchmarks.

The oracle is deliberately dumb: evaluate every point of a uniform inclusive
grid, keep the best, break ties toward the lexicographically smallest grid
index. A local refinement pass (refine) zooms the grid around a point so
benchmark comparisons are not limited by the global grid pitch.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .space import DecisionSpace

MAX_GRID_POINTS = 100_000_000
_CHUNK = 1 << 20


@dataclass(frozen=True)
class OracleResult:
    """Outcome of one exhaustive (or refined) grid search."""

    argmax: np.ndarray
    value: float
    resolution: Tuple[int, ...]
    n_evaluations: int


def _resolve_bounds(objective, bounds) -> DecisionSpace:
    if bounds is None:
        space = getattr(objective, "bounds", None)
        if space is None:
            raise ValueError("grid oracle: no bounds given and the objective has none")
        return space
    if isinstance(bounds, DecisionSpace):
        return bounds
    return DecisionSpace.from_bounds(bounds)


def _grid_axes(space: DecisionSpace, resolution) -> list:
    n_d = space.n_dims
    if np.isscalar(resolution):
        counts = [int(resolution)] * n_d
    else:
        counts = [int(r) for r in resolution]
        if len(counts) != n_d:
            raise ValueError(
                f"resolution has {len(counts)} entries for {n_d} dimensions"
            )
    if any(c < 1 for c in counts):
        raise ValueError("grid resolution must be at least 1 point per axis")
    total = 1
    for c in counts:
        total *= c
    if total > MAX_GRID_POINTS:
        raise ValueError(
            f"grid of {total} points exceeds the {MAX_GRID_POINTS} point guard; "
            "use a coarser resolution"
        )
    axes = [
        np.linspace(space.lower[d], space.upper[d], counts[d]) for d in range(n_d)
    ]
    return axes


def grid_oracle(objective, bounds=None, resolution=101) -> OracleResult:
    """Maximize by exhaustive search on a uniform inclusive grid.

    bounds defaults to the objective's own; resolution is points per axis,
    scalar or per-dimension. Non-finite fitnesses lose every comparison.
    """
    space = _resolve_bounds(objective, bounds)
    axes = _grid_axes(space, resolution)
    shape = tuple(len(ax) for ax in axes)
    total = int(np.prod(shape))

    batch = getattr(objective, "evaluate_batch", None)
    eval_fn = getattr(objective, "evaluate", objective)

    best_value = -np.inf
    best_point: Optional[np.ndarray] = None

    if batch is not None:
        for start in range(0, total, _CHUNK):
            stop = min(start + _CHUNK, total)
            multi = np.unravel_index(np.arange(start, stop), shape)
            points = np.column_stack(
                [axes[d][multi[d]] for d in range(len(axes))]
            )
            values = np.asarray(batch(points), dtype=float)
            values = np.where(np.isfinite(values), values, -np.inf)
            k = int(np.argmax(values))
            # strict > keeps the earliest (lexicographically smallest) index
            if values[k] > best_value:
                best_value = float(values[k])
                best_point = points[k].copy()
    else:
        for idx in np.ndindex(shape):
            point = np.array([axes[d][idx[d]] for d in range(len(axes))])
            value = float(eval_fn(point))
            if np.isfinite(value) and value > best_value:
                best_value = value
                best_point = point

    if best_point is None:
        raise ValueError("grid oracle: the objective returned no finite value")
    return OracleResult(
        argmax=best_point,
        value=best_value,
        resolution=shape,
        n_evaluations=total,
    )


def refine(
    objective,
    center: Sequence[float],
    half_widths,
    levels: int = 3,
    n_points: int = 21,
    bounds=None,
) -> OracleResult:
    """Zooming grid search around a point; the center always competes.

    Each level lays an inclusive n_points-per-axis grid on
    [center - hw, center + hw] clipped to the bounds, moves the center to
    the level's argmax, then shrinks hw to twice the old grid pitch. Used
    to sharpen oracle values near a candidate optimum.
    """
    space = _resolve_bounds(objective, bounds)
    n_d = space.n_dims
    center = np.asarray(center, dtype=float).copy()
    if center.shape != (n_d,):
        raise ValueError(f"center shape {center.shape} != ({n_d},)")
    hw = np.broadcast_to(np.asarray(half_widths, dtype=float), (n_d,)).copy()
    if np.any(hw <= 0) or not np.all(np.isfinite(hw)):
        raise ValueError("refine half_widths must be positive and finite")
    if n_points < 3:
        raise ValueError("refine needs at least 3 points per axis")
    if levels < 1:
        raise ValueError("refine needs at least one level")

    eval_fn = getattr(objective, "evaluate", objective)
    best_point = np.clip(center, space.lower, space.upper)
    best_value = float(eval_fn(best_point))
    n_evals = 1

    for _level in range(levels):
        # clipping to the bounds keeps lo < hi because hw > 0 and the best
        # point is always inside the (nondegenerate) bounds
        lo = np.clip(best_point - hw, space.lower, space.upper)
        hi = np.clip(best_point + hw, space.lower, space.upper)
        window = DecisionSpace(lower=lo, upper=hi)
        result = grid_oracle(objective, bounds=window, resolution=n_points)
        n_evals += result.n_evaluations
        if result.value > best_value:
            best_value = result.value
            best_point = result.argmax.copy()
        hw = hw * (2.0 / (n_points - 1))

    return OracleResult(
        argmax=best_point,
        value=best_value,
        resolution=(int(n_points),) * n_d,
        n_evaluations=n_evals,
    )
