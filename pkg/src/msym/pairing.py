"""
Boundary pairings of variations and multisymplectic conservation residuals.

For a region R (a set of cells) and variations V_a, V_b:

    B[a][b] = sum over facets e of dR  int_e uhat_a . (sigma_hat_b . n) ds

with both traces taken from the cell of R adjacent to e. The canonical 2-form
on the pair is B[a][b] - B[b][a].
"""
import logging
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..config import settings
from ..errors import ValidationError
from ..geometry import Mesh
from .variations import VariationSet

logger = logging.getLogger(__name__)

Region = Tuple[int, ...]


def inf_norm(matrix: np.ndarray) -> float:
    """Maximum absolute row sum (0 for empty matrices)."""
    if matrix.size == 0:
        return 0.0
    return float(np.abs(matrix).sum(axis=1).max())


def antisymmetric(matrix: np.ndarray) -> np.ndarray:
    return matrix - matrix.T


@dataclass(frozen=True, eq=False)
class PairingMatrix:
    region: Region
    matrix: np.ndarray

    @property
    def scale(self) -> float:
        return inf_norm(self.matrix)

    @property
    def antisymmetric(self) -> np.ndarray:
        return antisymmetric(self.matrix)

    def form(self, a: int, b: int) -> float:
        """The 2-form on the pair (V_a, V_b)."""
        return float(self.matrix[a, b] - self.matrix[b, a])

    @property
    def absolute(self) -> float:
        return inf_norm(self.antisymmetric)

    @property
    def residual(self) -> float:
        return self.absolute / max(1.0, self.scale)


@dataclass(frozen=True, eq=False)
class StrongEntry:
    region: Region
    residual: float
    absolute: float


@dataclass(frozen=True, eq=False)
class LocalResult:
    max: float
    per_cell: Tuple[float, ...]


def _check_region(mesh: Mesh, region: Iterable[int]) -> Region:
    cells = tuple(sorted({int(c) for c in region}))
    if not cells:
        raise ValidationError("region must contain at least one cell", field="region")
    if cells[0] < 0 or cells[-1] >= mesh.n_cells:
        raise ValidationError(f"region {cells} references missing cells", field="region", value=cells)
    return cells


def facet_pairing(
    variations: VariationSet,
    cell: int,
    local_facet: int,
    trace: str = "u_hat",
    flux: str = "sigma_hat_n",
) -> np.ndarray:
    """int_e trace_a . flux_b over one facet seen from `cell`."""
    table = variations.facet_table(cell, local_facet)
    weights = variations.base.problem.elements[cell].facets[local_facet].weights
    return np.einsum("q,aqi,bqi->ab", weights, table[trace], table[flux])


def _jump_pairing(variations: VariationSet, cell: int, local_facet: int) -> np.ndarray:
    table = variations.facet_table(cell, local_facet)
    weights = variations.base.problem.elements[cell].facets[local_facet].weights
    trace_gap = table["u_hat"] - table["u"]
    flux_gap = table["sigma_hat_n"] - table["sigma_n"]
    return np.einsum("q,aqi,bqi->ab", weights, trace_gap, flux_gap)


def boundary_pairing(variations: VariationSet, region: Iterable[int]) -> PairingMatrix:
    """Pairing matrix over the boundary of a union of cells."""
    mesh = variations.base.mesh
    cells = _check_region(mesh, region)
    members = set(cells)
    size = len(variations)
    matrix = np.zeros((size, size))
    for cell in cells:
        for facet in variations.base.problem.elements[cell].facets:
            if facet.neighbor is not None and facet.neighbor in members:
                continue
            matrix += facet_pairing(variations, cell, facet.local)
    return PairingMatrix(region=cells, matrix=matrix)


def local_mscl_residual(variations: VariationSet) -> LocalResult:
    """max over cells of ||B_K - B_K^T||_inf / max(1, ||B_K||_inf)."""
    per_cell = tuple(
        boundary_pairing(variations, (cell,)).residual for cell in range(variations.base.mesh.n_cells)
    )
    return LocalResult(max=max(per_cell), per_cell=per_cell)


def sample_regions(mesh: Mesh, count: Optional[int] = None, seed: Optional[int] = None) -> List[Region]:
    """Every singleton, the whole mesh, then `count` seeded connected unions."""
    count = settings.region_samples if count is None else count
    rng = np.random.default_rng(settings.seed if seed is None else seed)
    regions: List[Region] = [(cell,) for cell in range(mesh.n_cells)]
    regions.append(tuple(range(mesh.n_cells)))

    for _ in range(count):
        start = int(rng.integers(mesh.n_cells))
        target = int(rng.integers(1, mesh.n_cells + 1))
        grown = {start}
        while len(grown) < target:
            frontier = sorted({nb for cell in grown for nb in mesh.neighbors(cell)} - grown)
            if not frontier:
                break
            grown.add(frontier[int(rng.integers(len(frontier)))])
        regions.append(tuple(sorted(grown)))

    unique: List[Region] = []
    seen = set()
    for region in regions:
        if region not in seen:
            seen.add(region)
            unique.append(region)
    return unique


def strong_mscl_residual(
    variations: VariationSet,
    regions: Optional[Sequence[Iterable[int]]] = None,
    count: Optional[int] = None,
    seed: Optional[int] = None,
) -> List[StrongEntry]:
    """Pairing antisymmetry on the boundary of each region (sampled when none are given)."""
    if regions is None:
        regions = sample_regions(variations.base.mesh, count, seed)
    entries = []
    for region in regions:
        pairing = boundary_pairing(variations, region)
        entries.append(StrongEntry(region=pairing.region, residual=pairing.residual, absolute=pairing.absolute))
    return entries


def jump_identity_residual(variations: VariationSet) -> float:
    """
    max over cells of |antisym B(uhat, sigma_hat) - antisym B(uhat - u, sigma_hat - sigma)|,
    relative to max(1, ||B_K||_inf, ||B_K^gap||_inf).

    The gap pairing carries the large cancelling products, so it sets the round-off scale.
    """
    worst = 0.0
    for cell in range(variations.base.mesh.n_cells):
        plain = np.zeros((len(variations), len(variations)))
        gap = np.zeros_like(plain)
        for facet in variations.base.problem.elements[cell].facets:
            plain += facet_pairing(variations, cell, facet.local)
            gap += _jump_pairing(variations, cell, facet.local)
        difference = np.abs(antisymmetric(plain) - antisymmetric(gap)).max(initial=0.0)
        worst = max(worst, float(difference) / max(1.0, inf_norm(plain), inf_norm(gap)))
    return worst


def weak_mscl_residual(variations: VariationSet) -> float:
    """Antisymmetry of the pairing summed over every cell boundary."""
    total = np.zeros((len(variations), len(variations)))
    for cell in range(variations.base.mesh.n_cells):
        for facet in variations.base.problem.elements[cell].facets:
            total += facet_pairing(variations, cell, facet.local)
    return inf_norm(antisymmetric(total)) / max(1.0, inf_norm(total))


def additivity_residual(variations: VariationSet, first: Iterable[int], second: Iterable[int]) -> float:
    """||antisym B(R1 u R2) - antisym B(R1) - antisym B(R2)||_inf / max(1, ||B(R1 u R2)||_inf)."""
    mesh = variations.base.mesh
    r1, r2 = _check_region(mesh, first), _check_region(mesh, second)
    if set(r1) & set(r2):
        raise ValidationError("additivity needs disjoint regions", field="regions", value=(r1, r2))
    union = boundary_pairing(variations, r1 + r2)
    split = boundary_pairing(variations, r1).antisymmetric + boundary_pairing(variations, r2).antisymmetric
    return inf_norm(union.antisymmetric - split) / max(1.0, union.scale)
