"""Shared corpora and brute-force oracles used across the test modules.

Everything here is deterministic: weight corpora are built from fixed seeds
and the oracles recompute quantities by direct loops so the fast vectorised
implementations are checked against independent arithmetic.
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from weightlab import (
    CellSet,
    DyadicCube,
    DyadicGrid,
    PowerWeight,
    TabulatedWeight,
    Weight,
    unit_weight,
)

POWER_ALPHAS = (-0.375, -0.25, -0.125, 0.125, 0.25, 0.375)
TABULATED_SEED = 20240915
TABULATED_NATIVE_DEPTH = 6


def seeded_tabulated_weights(
    count: int, depth: int = TABULATED_NATIVE_DEPTH, seed: int = TABULATED_SEED
) -> List[TabulatedWeight]:
    """Deterministic tabulated weights: mostly mild uniform cell values in
    [1/2, 2], every fourth one log-normal for larger characteristics."""
    rng = np.random.default_rng(seed)
    out: List[TabulatedWeight] = []
    for i in range(count):
        if i % 4 == 3:
            values = np.exp(rng.standard_normal(1 << depth))
        else:
            values = rng.uniform(0.5, 2.0, 1 << depth)
        out.append(TabulatedWeight(values))
    return out


def standard_weight_corpus(n_tabulated: int = 20) -> List[Weight]:
    """Unit weight, the six reference power weights, and seeded tabulated
    weights — the corpus the verification scans run over."""
    corpus: List[Weight] = [unit_weight()]
    corpus.extend(PowerWeight(alpha) for alpha in POWER_ALPHAS)
    corpus.extend(seeded_tabulated_weights(n_tabulated))
    return corpus


def weight_label(i: int, w: Weight) -> str:
    return f"{i:02d}:{w.describe()}"


# --- brute-force oracles ---------------------------------------------------------------


def brute_cube_average(
    grid: DyadicGrid, cell_values: np.ndarray, cube: DyadicCube
) -> float:
    """Average over a cube of a function given by per-cell values."""
    start, stop = cube.cell_range(grid.depth)
    return float(np.mean(cell_values[start:stop]))


def brute_a_infty(w: Weight, grid: DyadicGrid) -> Tuple[float, DyadicCube]:
    """Fujii–Wilson constant by direct loops: for each cube Q average the
    pointwise sup of the weight's averages over dyadic cubes between the
    cell and Q, then divide by the weight's mass on Q."""
    cellw = w.cell_integrals(grid, 1.0)
    best = -np.inf
    best_cube = grid.root()
    for cube in grid.cubes():
        start, stop = cube.cell_range(grid.depth)
        total = float(np.sum(cellw[start:stop]))
        acc = 0.0
        for cell in range(start, stop):
            m = 0.0
            for level in range(cube.level, grid.depth + 1):
                anc = DyadicCube(level, cell >> (grid.depth - level))
                a, b = anc.cell_range(grid.depth)
                m = max(m, float(np.sum(cellw[a:b])) / anc.measure)
            acc += m * grid.cell_measure
        value = acc / total
        if value > best:
            best = value
            best_cube = cube
    return best, best_cube


def brute_weak_lp_norm(
    h: np.ndarray, cell_masses: np.ndarray, p: float
) -> float:
    """sup_λ λ · w({|h| ≥ λ})^{1/p} over all candidate levels λ = |h_i|."""
    mags = np.abs(np.asarray(h, dtype=np.float64))
    best = 0.0
    for lam in np.unique(mags):
        if lam <= 0.0:
            continue
        mass = float(np.sum(cell_masses[mags >= lam]))
        best = max(best, float(lam) * mass ** (1.0 / p))
    return best


def random_cellset(
    grid: DyadicGrid, rng: np.random.Generator, density: float = 0.5
) -> CellSet:
    return CellSet(rng.random(grid.n_cells) < density)


def left_edge_cube(level: int) -> DyadicCube:
    return DyadicCube(level, 0)
