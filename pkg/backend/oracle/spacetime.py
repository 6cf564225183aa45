"""
Geometric ground truth: rasterize the uncovered region on a spacetime grid
and follow uncovered components forward in time.

An intruder moves with unbounded speed, so within one time slice it reaches
every cell of its uncovered component. Between slices it may stay on any cell
that is uncovered in both, which links the two components holding that cell.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from core.model import Scenario
from db.schema import WitnessDocument
from dependencies import get_settings

logger = logging.getLogger(__name__)

EVASION = "evasion"
NO_EVASION = "no_evasion"


@dataclass
class SpacetimeGrid:
    """Cell centers of the domain bounding box and the sampled slice times."""
    h: float
    dt: float
    xs: np.ndarray
    ys: np.ndarray
    inside: np.ndarray  # (ny, nx) cells whose center lies in the domain
    times: List[float]

    @classmethod
    def build(cls, scenario: Scenario, h: float, dt: float) -> "SpacetimeGrid":
        if h <= 0 or dt <= 0:
            raise ValueError("grid spacing and time step must be positive")
        xmin, ymin, xmax, ymax = scenario.domain.bounds()
        nx_, ny_ = max(1, int(math.ceil((xmax - xmin) / h))), max(1, int(math.ceil((ymax - ymin) / h)))
        xs = xmin + h * (np.arange(nx_) + 0.5)
        ys = ymin + h * (np.arange(ny_) + 0.5)
        gx, gy = np.meshgrid(xs, ys)
        if scenario.domain.kind == "disk":
            cx, cy, radius = scenario.domain.params
            inside = (gx - cx) ** 2 + (gy - cy) ** 2 <= radius ** 2
        else:
            inside = (gx <= xmax) & (gy <= ymax)
        steps = max(1, int(math.ceil(1.0 / dt - 1e-12)))
        times = [min(1.0, k * dt) for k in range(steps)] + [1.0]
        return cls(h=h, dt=dt, xs=xs, ys=ys, inside=inside, times=times)

    @property
    def centers(self) -> np.ndarray:
        gx, gy = np.meshgrid(self.xs, self.ys)
        return np.column_stack([gx.ravel(), gy.ravel()])

    def point(self, cell: Tuple[int, int]) -> Tuple[float, float]:
        row, col = cell
        return float(self.xs[col]), float(self.ys[row])


def uncovered_mask(scenario: Scenario, grid: SpacetimeGrid, t: float) -> np.ndarray:
    """Cells inside the domain whose center is farther than r from every sensor."""
    return _rasterize(scenario, grid, t)[0]


def _rasterize(scenario: Scenario, grid: SpacetimeGrid, t: float) -> Tuple[np.ndarray, float]:
    """Uncovered mask and how deep inside its nearest ball the worst-covered center lies."""
    pts = scenario.positions_at(t)
    if not len(pts):
        return grid.inside.copy(), -math.inf
    dist, _ = cKDTree(pts).query(grid.centers, k=1)
    dist = dist.reshape(grid.inside.shape)
    margin = scenario.sensor_radius - float(dist[grid.inside].max()) if grid.inside.any() else math.inf
    return grid.inside & (dist > scenario.sensor_radius), margin


@dataclass
class OracleResult:
    verdict: str
    h: float
    dt: float
    witness: List[List[float]] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)
    stable: Optional[bool] = None
    times: List[float] = field(default_factory=list)
    reachable_counts: List[int] = field(default_factory=list)
    component_counts: List[int] = field(default_factory=list)
    # every point of spacetime is covered, whatever lies between cell centers and slices
    covered_with_margin: bool = False

    def to_document(self) -> WitnessDocument:
        return WitnessDocument(verdict=self.verdict, h=self.h, dt=self.dt, stable=self.stable,
                               warnings=list(self.warnings), witness=[list(p) for p in self.witness])


def default_resolution(scenario: Scenario, h: Optional[float] = None,
                       dt: Optional[float] = None) -> Tuple[float, float]:
    """h defaults to a fraction of r; dt keeps every sensor within h/2 per step."""
    if h is None:
        h = scenario.sensor_radius * get_settings().grid_h_factor
    if dt is None:
        vmax = max((s.max_speed() for s in scenario.sensors), default=0.0)
        dt = 1.0 if vmax == 0 else min(1.0, h / (2 * vmax))
    return h, dt


def exact_clearance(scenario: Scenario, t: float, point: Tuple[float, float]) -> float:
    """Distance from point to the nearest sensor at time t, minus r."""
    pts = scenario.positions_at(t)
    if not len(pts):
        return math.inf
    return float(np.min(np.hypot(pts[:, 0] - point[0], pts[:, 1] - point[1]))) - scenario.sensor_radius


def evasion_oracle(s: Scenario, h: Optional[float] = None, dt: Optional[float] = None,
                   workers: Optional[int] = None) -> OracleResult:
    """
    Decide evasion on the spacetime grid.

    Args:
        s: the scenario
        h: cell size, r/20 by default
        dt: time step, by default small enough that sensors move at most h/2 per step
        workers: threads for rasterizing slices

    Returns:
        OracleResult with a witness polyline [[t, x, y], ...] on evasion.
    """
    h, dt = default_resolution(s, h, dt)
    grid = SpacetimeGrid.build(s, h, dt)
    result = OracleResult(verdict=NO_EVASION, h=h, dt=dt, times=list(grid.times))

    vmax = max((traj.max_speed() for traj in s.sensors), default=0.0)
    if vmax * dt > h:
        msg = f"undersampled: sensors move up to {vmax * dt:.4g} per step, more than h={h:.4g}"
        logger.warning(msg)
        result.warnings.append(msg)

    with ThreadPoolExecutor(max_workers=workers or get_settings().max_workers) as pool:
        rasters = list(pool.map(lambda t: _rasterize(s, grid, t), grid.times))
    masks = [mask for mask, _ in rasters]
    # a domain point lies within 2h of an inside center; sensors drift at most vmax * dt between slices
    result.covered_with_margin = min(margin for _, margin in rasters) > 2 * h + vmax * dt
    logger.debug(f"oracle grid {grid.inside.shape[1]}x{grid.inside.shape[0]} cells, {len(grid.times)} slices")

    labels, count = ndimage.label(masks[0])
    result.component_counts.append(count)
    reachable = set(range(1, count + 1))
    result.reachable_counts.append(len(reachable))
    # parent[k][c] = (component at slice k - 1, shared cell)
    parents: List[Dict[int, Tuple[int, Tuple[int, int]]]] = [{}]
    for k in range(1, len(masks)):
        if not reachable:
            break
        prev_labels = labels
        prev_alive = np.isin(prev_labels, list(reachable))
        labels, count = ndimage.label(masks[k])
        result.component_counts.append(count)
        overlap = prev_alive & masks[k]
        rows, cols = np.nonzero(overlap)
        # first shared cell (row-major) of each continuing component
        comps, first = np.unique(labels[rows, cols], return_index=True)
        links: Dict[int, Tuple[int, Tuple[int, int]]] = {
            int(c): (int(prev_labels[rows[i], cols[i]]), (int(rows[i]), int(cols[i])))
            for c, i in zip(comps, first)
        }
        reachable = set(links)
        parents.append(links)
        result.reachable_counts.append(len(reachable))

    if reachable and len(parents) == len(masks):
        result.verdict = EVASION
        result.witness = _witness(grid, parents, min(reachable), labels)
        for t, x, y in result.witness:
            clearance = exact_clearance(s, t, (x, y))
            if clearance <= 0:
                msg = f"witness point ({x:.4g}, {y:.4g}) at t={t:.4g} is covered (clearance {clearance:.3g})"
                logger.warning(msg)
                result.warnings.append(msg)
    logger.info(f"oracle {s.name or '<unnamed>'} at h={h:.4g}, dt={dt:.4g}: {result.verdict}")
    return result


def _witness(grid: SpacetimeGrid, parents: List[Dict[int, Tuple[int, Tuple[int, int]]]],
             last: int, last_labels: np.ndarray) -> List[List[float]]:
    """Walk the component chain back from the final slice; one shared cell per step."""
    k = len(parents) - 1
    if k == 0:
        cell = tuple(int(v) for v in np.argwhere(last_labels == last)[0])
        x, y = grid.point(cell)
        return [[grid.times[0], x, y]]
    cells: List[Tuple[int, int]] = []
    comp = last
    while k > 0:
        prev, cell = parents[k][comp]
        cells.append(cell)
        comp, k = prev, k - 1
    cells.reverse()  # cells[k] is uncovered at slices k and k + 1
    points = []
    for k, t in enumerate(grid.times):
        x, y = grid.point(cells[min(k, len(cells) - 1)])
        points.append([t, x, y])
    return points


def refine_until_stable(s: Scenario, h0: Optional[float] = None, dt0: Optional[float] = None,
                        max_halvings: int = 3) -> OracleResult:
    """
    Halve h and dt until two successive verdicts agree. The result of the
    last run is returned with `stable` set, and the non-convergence flag
    raised as a warning when the halvings run out. A first grid that covers
    the domain with margin at every slice is accepted as it is.
    """
    h, dt = default_resolution(s, h0, dt0)
    previous = evasion_oracle(s, h, dt)
    if previous.covered_with_margin:
        previous.stable = True
        logger.info(f"oracle: domain covered with margin at h={h:.4g}, dt={dt:.4g}; no refinement needed")
        return previous
    for halving in range(1, max_halvings + 1):
        h, dt = h / 2, dt / 2
        current = evasion_oracle(s, h, dt)
        if current.verdict == previous.verdict:
            current.stable = True
            logger.info(f"oracle verdict {current.verdict} stable after {halving} halving(s)")
            return current
        logger.info(f"oracle verdict changed to {current.verdict} at h={h:.4g}, dt={dt:.4g}")
        previous = current
    previous.stable = False
    msg = f"oracle did not converge within {max_halvings} halvings; the scenario is near a tangency"
    logger.warning(msg)
    previous.warnings.append(msg)
    return previous
