"""Green's functions, sup bounds and the diameter estimate for metrics on the torus.

The Laplacian is the Riemannian one of the real metric ``g`` attached to the
Hermitian matrix field, discretised in divergence form::

    Δ_ω u = -(1/w) Σ_ij D_iᵀ (w g^{ij}) D_j u,    w = det ω

with periodic forward differences ``D_i``. The operator is symmetric in the
``w``-weighted inner product, so discrete Green slices are symmetric.
"""

from itertools import combinations
from logging import getLogger
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from ..errors import ArgumentError, PremiseViolation, SingularSystem
from ..internal import stencil
from ..objects.fields import MetricField, ScalarField
from ..objects.grid import TorusGrid
from ..objects.reports import BoundCheck, GreenSlice, SupBoundMeasurement

__all__ = (
    "laplacian_matrix",
    "laplacian_apply",
    "green_slice",
    "flat_green_oracle",
    "green_norms",
    "green_lower_bound",
    "sup_bound_experiment",
    "graph_distances",
    "diameter_bound",
    "EXACT_DIAMETER_NODES",
)

logger = getLogger("auxma.green")

EXACT_DIAMETER_NODES = 4096
SWEEPS = 4


def _node(grid: TorusGrid, x: Sequence[int]) -> Tuple[int, ...]:
    x = tuple(int(i) % grid.N for i in x)
    if len(x) != grid.m:
        raise ArgumentError(f"node index needs {grid.m} coordinates, got {len(x)}")
    return x


def laplacian_matrix(metric: MetricField) -> sp.csr_matrix:
    """The positive semidefinite ``L`` with ``Δ_ω = -(1/w) L``."""

    L, _ = stencil.riemannian_form(metric.grid, metric.real_form())
    return L


def laplacian_apply(metric: MetricField, u: ScalarField) -> ScalarField:
    if u.grid != metric.grid:
        raise ArgumentError("field and metric live on different grids")
    Lu = laplacian_matrix(metric) @ u.values.ravel()
    return ScalarField(u.grid, -Lu.reshape(u.grid.shape) / metric.density)


def _green_rhs(metric: MetricField, x: Tuple[int, ...]) -> np.ndarray:
    grid = metric.grid
    rhs = -metric.density / metric.total_volume
    rhs[x] += 1.0 / grid.cell_volume
    return rhs


def green_slice(metric: MetricField, x: Sequence[int]) -> GreenSlice:
    """``G(x, ·)`` with ``Δ_ω G(x, ·) = -δ_x + 1/V_ω`` and ``∫G(x, ·) ω^n = 0``.

    ``δ_x`` is a unit mass at the node divided by the node's ``ω^n`` weight.

    :raises SingularSystem: if the pinned system cannot be factorised.
    """

    grid = metric.grid
    x = _node(grid, x)
    L = laplacian_matrix(metric)
    rhs = _green_rhs(metric, x).ravel()

    try:
        values = stencil.pinned_solve(L, rhs)
    except RuntimeError as error:
        raise SingularSystem(None, f"Green system is singular: {error}") from error
    if not np.all(np.isfinite(values)):
        raise SingularSystem(None, "Green system produced non-finite values")

    w = metric.density.ravel()
    values -= (values * w).sum() / w.sum()
    mean_residual = abs(float((values * w).sum() * grid.cell_volume))
    conservation = float(np.abs(L @ values - rhs).max())
    relative = conservation / float(np.abs(rhs).max())
    logger.debug("green slice at %s: mean %.3e, conservation %.3e (relative %.3e)", x, mean_residual, conservation, relative)
    return GreenSlice(
        source=x,
        values=ScalarField(grid, values.reshape(grid.shape)),
        mean_residual=mean_residual,
        conservation_residual=conservation,
        relative_conservation_residual=relative,
    )


def flat_green_oracle(grid: TorusGrid, x: Sequence[int]) -> ScalarField:
    """The flat-metric slice by diagonalising the stencil with the FFT.

    The forward-difference Laplacian has symbol ``Σ (2 - 2cos(2πkh)) / h²``.
    """

    x = _node(grid, x)
    k = np.fft.fftfreq(grid.N, d=1.0 / grid.N)
    axis_symbol = (2 - 2 * np.cos(2 * np.pi * k * grid.h)) / grid.h**2
    symbol = np.zeros(grid.shape)
    for axis in range(grid.m):
        shape = [1] * grid.m
        shape[axis] = grid.N
        symbol = symbol + axis_symbol.reshape(shape)

    rhs = np.full(grid.shape, -1.0)
    rhs[x] += 1.0 / grid.cell_volume
    spectrum = np.fft.fftn(rhs)
    zero = (0,) * grid.m
    symbol[zero] = 1.0
    spectrum[zero] = 0.0
    return ScalarField(grid, np.real(np.fft.ifftn(spectrum / symbol)))


def _gradient_norm(metric: MetricField, values: np.ndarray) -> np.ndarray:
    gradient = stencil.forward_gradient(values, metric.grid)
    inverse = np.linalg.inv(metric.real_form())
    return np.sqrt(np.maximum(np.einsum("...i,...ij,...j->...", gradient, inverse, gradient), 0.0))


def green_norms(
    metric: MetricField,
    green: GreenSlice,
    q: Optional[float] = None,
    s: Optional[float] = None,
) -> Tuple[float, float]:
    """``(‖G(x, ·)‖_{L^q}, ‖∇G(x, ·)‖_{L^s})`` against ``ω^n``.

    Defaults are ``q = n/(n-1) - 0.05`` (``q = 2`` when ``n = 1``) and
    ``s = 2n/(2n-1) - 0.05``.
    """

    n = metric.grid.n
    if q is None:
        q = n / (n - 1) - 0.05 if n > 1 else 2.0
    if s is None:
        s = 2 * n / (2 * n - 1) - 0.05
    if q < 1 or s < 1:
        raise ArgumentError("norm exponents must be at least 1")

    weights = metric.density * metric.grid.cell_volume
    G = green.values.values
    value_norm = float((np.abs(G) ** q * weights).sum() ** (1.0 / q))
    gradient_norm = float((_gradient_norm(metric, G) ** s * weights).sum() ** (1.0 / s))
    return value_norm, gradient_norm


def green_lower_bound(green: GreenSlice) -> Tuple[float, Tuple[int, ...]]:
    values = green.values.values
    node = tuple(int(i) for i in np.unravel_index(int(np.argmin(values)), values.shape))
    return float(values[node]), node


def sup_bound_experiment(metric: MetricField, v: ScalarField, a: float, tol: float = 1e-8) -> SupBoundMeasurement:
    """Measured ``sup v / (a + ‖v‖_{L¹})`` for ``v`` with ``Δ_ω v ≥ -a`` on ``{v > 0}``.

    :raises PremiseViolation: if ``v`` is not mean-zero or the Laplacian premise fails.
    """

    if a < 0:
        raise ArgumentError("a must be nonnegative")
    weights = metric.density * metric.grid.cell_volume
    scale = max(1.0, float(np.abs(v.values).max()))
    mean = float((v.values * weights).sum() / weights.sum())
    if abs(mean) > tol * scale:
        raise PremiseViolation(f"v must be mean-zero against ω^n (mean {mean:.3e})")

    lap = laplacian_apply(metric, v).values
    positive = v.values > 0
    margin = float((lap + a)[positive].min()) if np.any(positive) else np.inf
    lap_scale = max(1.0, float(np.abs(lap).max()))
    if margin < -tol * lap_scale:
        raise PremiseViolation(f"Δ_ω v ≥ -a fails on {{v > 0}} by {-margin:.3e}")

    sup_v = max(float(v.values.max()), 0.0)
    l1 = float((np.abs(v.values) * weights).sum())
    denominator = a + l1
    ratio = sup_v / denominator if denominator > 0 else 0.0
    return SupBoundMeasurement(sup_v=sup_v, l1_norm=l1, a=float(a), ratio=ratio, premise_margin=margin)


def _offsets(m: int):
    for axis in range(m):
        step = np.zeros(m, dtype=int)
        step[axis] = 1
        yield step
    for i, j in combinations(range(m), 2):
        for sign in (1, -1):
            step = np.zeros(m, dtype=int)
            step[i], step[j] = 1, sign
            yield step


def _distance_graph(metric: MetricField) -> sp.csr_matrix:
    """Undirected grid graph: axis and diagonal neighbours, lengths from the midpoint metric."""

    grid = metric.grid
    G = metric.real_form()
    index = np.arange(grid.node_count).reshape(grid.shape)
    rows, cols, lengths = [], [], []
    for step in _offsets(grid.m):
        neighbour = np.roll(index, tuple(-step), axis=tuple(range(grid.m)))
        G_other = np.roll(G, tuple(-step), axis=tuple(range(grid.m)))
        d = step * grid.h
        length = np.sqrt(np.einsum("i,...ij,j->...", d, 0.5 * (G + G_other), d))
        rows.append(index.ravel())
        cols.append(neighbour.ravel())
        lengths.append(length.ravel())
    graph = sp.coo_matrix(
        (np.concatenate(lengths), (np.concatenate(rows), np.concatenate(cols))),
        shape=(grid.node_count, grid.node_count),
    )
    return graph.tocsr()


def graph_distances(metric: MetricField) -> Tuple[float, Tuple[int, ...], Tuple[int, ...], str]:
    """Discrete diameter with an attaining pair.

    Exact all-pairs Dijkstra up to ``EXACT_DIAMETER_NODES`` nodes; an
    iterated double sweep beyond that.
    """

    grid = metric.grid
    graph = _distance_graph(metric)
    if grid.node_count <= EXACT_DIAMETER_NODES:
        distances = dijkstra(graph, directed=False)
        a, b = np.unravel_index(int(np.argmax(distances)), distances.shape)
        diameter = float(distances[a, b])
        method = "all_pairs"
    else:
        row = dijkstra(graph, directed=False, indices=0)
        a, b = 0, int(np.argmax(row))
        diameter = float(row[b])
        for _ in range(SWEEPS):
            row = dijkstra(graph, directed=False, indices=b)
            far = int(np.argmax(row))
            if row[far] <= diameter:
                break
            a, b, diameter = b, far, float(row[far])
        method = "double_sweep"
    x0 = tuple(int(i) for i in np.unravel_index(int(a), grid.shape))
    y0 = tuple(int(i) for i in np.unravel_index(int(b), grid.shape))
    return diameter, x0, y0, method


def diameter_bound(metric: MetricField, tol: float = 1e-9) -> BoundCheck:
    """``diam ≤ ∫|∇G(x₀, ·)| + ∫|∇G(y₀, ·)|`` for a diameter-attaining pair.

    Scaling the metric by ``c`` scales both sides by ``c^{1/2}``.
    """

    diameter, x0, y0, method = graph_distances(metric)
    weights = metric.density * metric.grid.cell_volume
    integrals = []
    for source in (x0, y0):
        green = green_slice(metric, source)
        integrals.append(float((_gradient_norm(metric, green.values.values) * weights).sum()))
    bound = sum(integrals)
    logger.info("diameter %.6g (%s) against Green bound %.6g", diameter, method, bound)
    return BoundCheck(
        observed=diameter,
        bound=bound,
        passed=bound >= diameter - tol,
        details={
            "x0": x0,
            "y0": y0,
            "gradient_integrals": integrals,
            "method": method,
            "scaling_exponent": 0.5,
        },
    )
