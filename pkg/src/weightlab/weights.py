"""Positive weights on [0, 1) with exact L^t cell averages, duals, and powers.

Two representations:

* :class:`TabulatedWeight` — piecewise constant on the finest cells; every
  moment is an exact finite sum of cell values.
* :class:`PowerWeight` — ``w(x) = x**alpha``; every moment is computed from
  the antiderivative ``(b**(alpha*t+1) - a**(alpha*t+1)) / (alpha*t+1)``, so
  cubes touching the singularity at 0 are handled exactly. A moment exponent
  ``t`` is admissible iff ``alpha * t > -1``; inadmissible moments raise
  :class:`~weightlab.errors.DivergentMomentError` — they are never clamped,
  because silent clamping would corrupt the supremum-type characteristics.

All instances are immutable; per-exponent cube-total pyramids are memoised on
the instance (pure, deterministic recomputation, so concurrent builds agree).
"""

from __future__ import annotations

import math
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .errors import DivergentMomentError, WrongLengthError
from .grid import CellSet, DyadicCube, DyadicGrid, cube_total, tree_totals

_PyramidKey = Tuple[int, float]


class Weight:
    """Common machinery: cached cube-total pyramids of ``w**t``."""

    def __init__(self) -> None:
        self._pyramids: Dict[_PyramidKey, List[np.ndarray]] = {}

    # --- contract to implement -------------------------------------------------
    def moment_admissible(self, t: float) -> bool:
        raise NotImplementedError

    def cell_integrals(self, grid: DyadicGrid, t: float) -> np.ndarray:
        """Exact per-cell integrals ``∫_cell w(x)**t dx`` (length 2**depth)."""
        raise NotImplementedError

    def power(self, s: float) -> "Weight":
        """The pointwise power ``w**s`` as a new weight."""
        raise NotImplementedError

    def describe(self) -> str:
        raise NotImplementedError

    # --- shared machinery ------------------------------------------------------
    def require_moment(self, t: float) -> None:
        if not self.moment_admissible(t):
            raise DivergentMomentError(
                f"moment exponent t={t} diverges for weight {self.describe()}"
            )

    def pyramid(self, grid: DyadicGrid, t: float) -> List[np.ndarray]:
        """Cube totals ``∫_Q w**t`` for all cubes, cached per (depth, t)."""
        key = (grid.depth, float(t))
        pyr = self._pyramids.get(key)
        if pyr is None:
            pyr = tree_totals(grid, self.cell_integrals(grid, t))
            self._pyramids[key] = pyr
        return pyr

    def level_averages(self, grid: DyadicGrid, t: float) -> List[np.ndarray]:
        """Per-level arrays of ``⨍_Q w**t`` (cube averages of the t-th power)."""
        pyr = self.pyramid(grid, t)
        return [pyr[k] * float(1 << k) for k in range(grid.depth + 1)]

    def cube_integral(self, grid: DyadicGrid, cube: DyadicCube, t: float = 1.0) -> float:
        self.require_moment(t)
        return cube_total(self.pyramid(grid, t), cube)


class TabulatedWeight(Weight):
    """Strictly positive piecewise-constant weight on the finest cells."""

    def __init__(self, values: Sequence[float] | np.ndarray) -> None:
        super().__init__()
        arr = np.asarray(values, dtype=np.float64)
        if arr.ndim != 1 or arr.size == 0:
            raise WrongLengthError("tabulated weight needs a nonempty 1-D value vector")
        if arr.size & (arr.size - 1):
            raise WrongLengthError(
                f"tabulated weight needs 2**L values, got {arr.size}"
            )
        if not np.all(np.isfinite(arr)) or not np.all(arr > 0.0):
            raise ValueError("tabulated weight values must be finite and strictly positive")
        arr.setflags(write=False)
        self.values = arr

    @property
    def native_depth(self) -> int:
        return int(self.values.size).bit_length() - 1

    def _values_at(self, depth: int) -> np.ndarray:
        """Cell values at the requested depth (refining by repetition)."""
        if depth < self.native_depth:
            raise WrongLengthError(
                f"grid depth {depth} is coarser than the tabulated depth {self.native_depth}"
            )
        return np.repeat(self.values, 1 << (depth - self.native_depth))

    def moment_admissible(self, t: float) -> bool:
        return True

    def cell_integrals(self, grid: DyadicGrid, t: float) -> np.ndarray:
        vals = self._values_at(grid.depth)
        return vals ** float(t) * grid.cell_measure

    def power(self, s: float) -> "TabulatedWeight":
        return TabulatedWeight(self.values ** float(s))

    def describe(self) -> str:
        return f"tabulated[{self.values.size} cells]"


class PowerWeight(Weight):
    """Analytic power weight ``w(x) = x**alpha`` with exact moments."""

    def __init__(self, alpha: float) -> None:
        super().__init__()
        alpha = float(alpha)
        if not math.isfinite(alpha) or alpha <= -1.0:
            raise DivergentMomentError(
                f"power weight exponent must be > -1 for local integrability, got {alpha}"
            )
        self.alpha = alpha

    def moment_admissible(self, t: float) -> bool:
        return self.alpha * float(t) > -1.0

    def cell_integrals(self, grid: DyadicGrid, t: float) -> np.ndarray:
        self.require_moment(t)
        e = self.alpha * float(t) + 1.0
        edges = np.arange(grid.n_cells + 1, dtype=np.float64) / grid.n_cells
        antider = edges ** e / e
        return np.diff(antider)

    def power(self, s: float) -> "PowerWeight":
        return PowerWeight(self.alpha * float(s))

    def describe(self) -> str:
        return f"x^{self.alpha:g}"


def unit_weight() -> PowerWeight:
    """The constant weight 1 (power weight with exponent 0)."""
    return PowerWeight(0.0)


# --- basic operations -----------------------------------------------------------


def average(w: Weight, grid: DyadicGrid, cube: DyadicCube) -> float:
    """Plain average ``⨍_Q w`` (exact for both representations)."""
    return w.cube_integral(grid, cube, 1.0) * float(1 << cube.level)


def lp_average(w: Weight, grid: DyadicGrid, cube: DyadicCube, t: float) -> float:
    """L^t average ``(⨍_Q w**t)**(1/t)`` for ``t > 0``."""
    t = float(t)
    if t <= 0.0:
        raise DivergentMomentError(f"L^t average requires t > 0, got t={t}")
    if t == 1.0:
        return average(w, grid, cube)
    mean_t = w.cube_integral(grid, cube, t) * float(1 << cube.level)
    return mean_t ** (1.0 / t)


def pow_weight(w: Weight, s: float) -> Weight:
    """Pointwise power ``w**s`` (admissibility of the result is enforced)."""
    return w.power(s)


def conjugate_exponent(p: float) -> float:
    """Hölder conjugate ``p' = p / (p - 1)`` for ``p`` in (1, ∞); ∞ maps to 1."""
    p = float(p)
    if math.isinf(p):
        return 1.0
    if p <= 1.0:
        raise ValueError(f"conjugate exponent needs p > 1, got {p}")
    return p / (p - 1.0)


def dual_weight(w: Weight, p: float) -> Weight:
    """Duality weight ``σ = w**(1 - p')``; for p = 2 this is ``1/w``."""
    p = float(p)
    if not 1.0 < p < math.inf:
        raise ValueError(f"dual weight needs p in (1, ∞), got {p}")
    return w.power(1.0 - conjugate_exponent(p))


def measure(w: Weight, grid: DyadicGrid, cells: CellSet) -> float:
    """Weight measure ``w(E) = ∫_E w`` over a cell set, by exact cell sums."""
    if cells.n_cells != grid.n_cells:
        raise WrongLengthError(
            f"cell set over {cells.n_cells} cells does not match grid of {grid.n_cells}"
        )
    return float(np.sum(w.cell_integrals(grid, 1.0), where=cells.mask))


def cube_weight_measure(w: Weight, grid: DyadicGrid, cube: DyadicCube) -> float:
    """``w(Q) = ∫_Q w`` for one cube."""
    return w.cube_integral(grid, cube, 1.0)


# --- composed moments (function times weight) -----------------------------------


def composed_moment_cells(
    grid: DyadicGrid, f_values: Sequence[float] | np.ndarray, w: Weight, t: float
) -> np.ndarray:
    """Per-cell ``∫_cell (|f| w)**t dx`` for piecewise-constant ``f``.

    Because ``f`` is constant on each finest cell, the composition's t-th
    moment factorises exactly as ``|f_cell|**t * ∫_cell w**t``.
    """
    w.require_moment(t)
    f = np.abs(grid.check_values(f_values)) ** float(t)
    return f * w.cell_integrals(grid, t)


def masked_moment_cells(grid: DyadicGrid, cells: CellSet, w: Weight, t: float) -> np.ndarray:
    """Per-cell ``∫_cell (1_E w)**t dx`` = cell integrals of ``w**t`` on E, 0 off E."""
    w.require_moment(t)
    out = w.cell_integrals(grid, t).copy()
    out[~cells.mask] = 0.0
    return out


def weighted_l2_norm_sq(
    grid: DyadicGrid, f_values: Sequence[float] | np.ndarray, w: Weight
) -> float:
    """``∫ f(x)**2 w(x) dx`` for piecewise-constant ``f`` (exact)."""
    f = grid.check_values(f_values)
    return float(np.sum(f * f * w.cell_integrals(grid, 1.0)))
