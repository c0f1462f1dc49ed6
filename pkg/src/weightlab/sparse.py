"""Half-witness sparse cube families and the quadratic sparse form.

A family of dyadic cubes is *1/2-sparse* when each cube ``Q`` owns a witness
cell set ``E_Q ⊆ Q`` with ``|E_Q| > |Q|/2`` (strict) and the witnesses are
pairwise disjoint. Construction routes:

* :func:`build_sparse_random` — seeded top-down selection; a selected cube
  claims every not-yet-claimed cell inside it provided those are strictly
  more than half of it, else it is dropped (so the result is always valid).
* :func:`build_sparse_cz` — stopping-time selection driven by a nonnegative
  density: a child cube stops when its average strictly exceeds ``ratio``
  times the average over the most recent stopping ancestor; witnesses are the
  stopping cubes minus their maximal stopping descendants. For ``ratio ≥ 2``
  the mass argument guarantees validity; the builder verifies and raises
  otherwise.

The quadratic form of interest is
``Σ_Q ⟨|f|⟩_{p0,Q}² · ⟨|g|⟩_{q0*,Q} · |Q|`` — evaluated with exact per-cube
moments, over any cube collection (validity of the collection is the
caller's concern; the form itself is just a positive sum).
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .errors import SparsityViolationError, SubsetError, WrongLengthError
from .grid import CellSet, DyadicCube, DyadicGrid, tree_totals
from .profiles import ExponentProfile
from .weights import Weight, composed_moment_cells, masked_moment_cells


@dataclass(frozen=True)
class SparseFamily:
    """Cube collection with per-cube witness cell sets (kept in cube order)."""

    cubes: Tuple[DyadicCube, ...]
    witnesses: Tuple[CellSet, ...]

    def __post_init__(self) -> None:
        if len(self.cubes) != len(self.witnesses):
            raise WrongLengthError("one witness cell set per cube is required")

    def witness(self, cube: DyadicCube) -> CellSet:
        for c, e in zip(self.cubes, self.witnesses):
            if c == cube:
                return e
        raise KeyError(f"cube {cube} not in family")

    def __len__(self) -> int:
        return len(self.cubes)

    def to_jsonable(self) -> List[dict]:
        return [
            {"level": c.level, "index": c.index, "witness": e.to_ranges()}
            for c, e in zip(self.cubes, self.witnesses)
        ]

    def to_json(self) -> str:
        return json.dumps(self.to_jsonable(), sort_keys=True)

    @classmethod
    def from_jsonable(cls, data: Sequence[dict], grid: DyadicGrid) -> "SparseFamily":
        cubes = []
        witnesses = []
        try:
            entries = list(data)
            for entry in entries:
                cube = DyadicCube(int(entry["level"]), int(entry["index"]))
                cubes.append(cube)
                witnesses.append(CellSet.from_ranges(grid, entry["witness"]))
        except (TypeError, KeyError) as exc:
            raise ValueError(
                "family JSON must be a list of objects with "
                "'level', 'index', and 'witness' keys"
            ) from exc
        return cls(cubes=tuple(cubes), witnesses=tuple(witnesses))

    @classmethod
    def from_json(cls, text: str, grid: DyadicGrid) -> "SparseFamily":
        return cls.from_jsonable(json.loads(text), grid)


@dataclass(frozen=True)
class SparsityReport:
    ok: bool
    first_violation: Optional[str] = None


def verify_sparsity(family: SparseFamily, grid: DyadicGrid) -> SparsityReport:
    """Exact check: witness containment, strict half measure, disjointness."""
    coverage = np.zeros(grid.n_cells, dtype=np.int64)
    for cube, cells in zip(family.cubes, family.witnesses):
        if cells.n_cells != grid.n_cells:
            return SparsityReport(False, f"witness of {cube} sized for a different grid")
        if not cells.within_cube(grid, cube):
            return SparsityReport(False, f"witness of {cube} leaves the cube")
        start, stop = cube.cell_range(grid.depth)
        if 2 * cells.cell_count <= stop - start:
            return SparsityReport(
                False,
                f"witness of {cube} has measure {cells.cell_count}/{stop - start}"
                " of the cube (strictly more than half is required)",
            )
        coverage += cells.mask
    if np.any(coverage > 1):
        cell = int(np.argmax(coverage > 1))
        return SparsityReport(False, f"witnesses overlap at cell {cell}")
    return SparsityReport(True, None)


def build_sparse_random(
    grid: DyadicGrid, max_level: int, density: float, seed: int
) -> SparseFamily:
    """Seeded top-down random family; always returns a valid one.

    Cubes of level 0..max_level are visited coarse-to-fine in index order and
    selected with probability ``density``. A selected cube claims all cells
    inside it that no earlier cube claimed — provided they are strictly more
    than half of it — otherwise it is dropped.
    """
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    if max_level > grid.depth:
        raise ValueError(f"max_level {max_level} exceeds grid depth {grid.depth}")
    rng = np.random.default_rng(seed)
    claimed = np.zeros(grid.n_cells, dtype=bool)
    cubes: List[DyadicCube] = []
    witnesses: List[CellSet] = []
    for level in range(max_level + 1):
        for index in range(1 << level):
            if rng.random() >= density:
                continue
            cube = DyadicCube(level, index)
            start, stop = cube.cell_range(grid.depth)
            free = ~claimed[start:stop]
            if 2 * int(free.sum()) <= stop - start:
                continue
            mask = np.zeros(grid.n_cells, dtype=bool)
            mask[start:stop] = free
            claimed[start:stop] |= free
            cubes.append(cube)
            witnesses.append(CellSet(mask))
    family = SparseFamily(cubes=tuple(cubes), witnesses=tuple(witnesses))
    report = verify_sparsity(family, grid)
    if not report.ok:  # unreachable by construction; fail loudly if it breaks
        raise SparsityViolationError(report.first_violation or "invalid family")
    return family


def build_sparse_cz(
    f: Sequence[float] | np.ndarray, grid: DyadicGrid, ratio: float = 2.0
) -> SparseFamily:
    """Stopping-time family: children whose average first strictly exceeds
    ``ratio`` times the last stopping ancestor's average become stopping cubes.

    The witness of a stopping cube is the cube minus its maximal stopping
    descendants; sparsity is verified and a violation raises (possible when
    ``ratio`` is too close to 1).
    """
    if not ratio > 1.0:
        raise ValueError(f"stopping ratio must be > 1, got {ratio}")
    values = grid.check_values(f)
    if np.any(values < 0.0):
        raise ValueError("stopping-time construction needs nonnegative cell values")
    if not np.any(values > 0.0):
        raise SparsityViolationError("density is identically zero")
    totals = tree_totals(grid, values)
    averages = [totals[k] * float(1 << k) for k in range(grid.depth + 1)]

    root = DyadicCube(0, 0)
    cubes: List[DyadicCube] = [root]
    children_of: Dict[DyadicCube, List[DyadicCube]] = {root: []}
    # Iterative sweep: track each cube's most recent stopping ancestor.
    stack: List[Tuple[DyadicCube, DyadicCube]] = [(root, root)]
    while stack:
        cube, anchor = stack.pop()
        if cube.level == grid.depth:
            continue
        anchor_avg = averages[anchor.level][anchor.index]
        for child in cube.children(grid.depth):
            if averages[child.level][child.index] > ratio * anchor_avg:
                cubes.append(child)
                children_of[child] = []
                children_of[anchor].append(child)
                stack.append((child, child))
            else:
                stack.append((child, anchor))

    cubes.sort()
    witnesses: List[CellSet] = []
    for cube in cubes:
        mask = np.zeros(grid.n_cells, dtype=bool)
        start, stop = cube.cell_range(grid.depth)
        mask[start:stop] = True
        for stopped in children_of[cube]:
            s0, s1 = stopped.cell_range(grid.depth)
            mask[s0:s1] = False
        witnesses.append(CellSet(mask))
    family = SparseFamily(cubes=tuple(cubes), witnesses=tuple(witnesses))
    report = verify_sparsity(family, grid)
    if not report.ok:
        raise SparsityViolationError(report.first_violation or "invalid family")
    return family


def _q_average_factory(
    grid: DyadicGrid,
    profile: ExponentProfile,
    g: Optional[Sequence[float] | np.ndarray],
    g_weight: Optional[Weight],
    g_cells: Optional[CellSet],
):
    """Per-cube q0*-average of |g|, where g is a cell vector or ``1_E · w``."""
    q = profile.q0_star
    if g_weight is not None:
        cells = (
            masked_moment_cells(grid, g_cells, g_weight, q)
            if g_cells is not None
            else g_weight.cell_integrals(grid, q)
        )
    else:
        if g is None:
            raise ValueError("either per-cell g values or a weight must be given")
        garr = np.abs(grid.check_values(g)) ** q
        cells = garr * grid.cell_measure
    totals = tree_totals(grid, cells)

    def q_avg(cube: DyadicCube) -> float:
        return (totals[cube.level][cube.index] * float(1 << cube.level)) ** (1.0 / q)

    return q_avg


def sparse_form(
    f: Sequence[float] | np.ndarray,
    g: Optional[Sequence[float] | np.ndarray],
    profile: ExponentProfile,
    cubes: Sequence[DyadicCube] | SparseFamily,
    grid: DyadicGrid,
    g_weight: Optional[Weight] = None,
    g_cells: Optional[CellSet] = None,
) -> float:
    """``Σ_Q ⟨|f|⟩_{p0,Q}² ⟨|g|⟩_{q0*,Q} |Q|`` with exact per-cube moments.

    ``g`` is either a per-cell vector, or — when ``g_weight`` is given — the
    composition ``1_E · w`` with ``E = g_cells`` (default: all of [0,1)).
    The cube collection may be any sequence; a :class:`SparseFamily` passes
    its cubes.
    """
    p0 = profile.p0
    farr = np.abs(grid.check_values(f)) ** p0
    f_totals = tree_totals(grid, farr * grid.cell_measure)
    q_avg = _q_average_factory(grid, profile, g, g_weight, g_cells)
    cube_seq = cubes.cubes if isinstance(cubes, SparseFamily) else tuple(cubes)
    total = 0.0
    for cube in cube_seq:
        scale = float(1 << cube.level)
        f_avg = (f_totals[cube.level][cube.index] * scale) ** (1.0 / p0)
        total += f_avg * f_avg * q_avg(cube) * cube.measure
    return total


def carleson_packing_ok(family: SparseFamily, grid: DyadicGrid) -> bool:
    """Disjoint-witness packing: Σ_{Q ⊆ Q0} |E_Q| ≤ |Q0| for every family cube."""
    for outer in family.cubes:
        start, stop = outer.cell_range(grid.depth)
        packed = 0
        for cube, cells in zip(family.cubes, family.witnesses):
            if outer.contains(cube):
                packed += cells.cell_count
        if packed > stop - start:
            return False
    return True
