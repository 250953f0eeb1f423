"""Bootstrap confidence regions sandwiching curvature bumps.

The recipe: resample the data, rebuild the KDE, and record the supremum
over the evaluation grid of the change in each second-order derivative
operator.  Quantiles of those sup errors give the margin for Laplacian
bumps; Tail Value-at-Risk sums give conservative margins for
eigenvalue-based bumps, whose errors aggregate across operators with an
unknown dependence structure.
"""

import math
from dataclasses import dataclass

import numpy as np

from ._util import chunk_slices, map_chunks
from .errors import ConfigurationError, DataError, ResourceLimitError
from .kde import BandwidthSpec, SampleMatrix, operator_kernel_matrix, operator_tags
from .levelset import BoundaryGeometry, extract_zero_level

# Guards on bootstrap cost; exceeding them raises ResourceLimitError with
# advice to coarsen the grid.
MAX_MATRIX_ENTRIES = 4_000_000_000
MAX_REPLICATE_NODE_PRODUCT = 1_000_000_000

LOW_REPLICATE_WARNING_THRESHOLD = 50

# Tolerance absorbing the float representation of p when computing ceil(p * B).
_CEIL_GUARD = 1e-9


@dataclass(frozen=True)
class BootstrapPlan:
    """Replicate count, resample size, confidence complement and seed."""

    B: int
    resample_size: int = None
    alpha: float = 0.1
    seed: int = 0

    def __post_init__(self):
        if self.B < 2:
            raise ConfigurationError("bootstrap needs at least 2 replicates")
        if self.resample_size is not None and self.resample_size < 1:
            raise ConfigurationError("resample size must be >= 1")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigurationError("alpha must lie strictly between 0 and 1")
        object.__setattr__(self, "seed", int(self.seed) % 2**64)


@dataclass(frozen=True)
class SupErrorSample:
    """Bootstrap sup-norm errors for one differential operator."""

    operator_tag: str
    errors: np.ndarray

    def __post_init__(self):
        errors = np.asarray(self.errors, dtype=float)
        if errors.ndim != 1 or errors.size < 1:
            raise DataError("errors must be a nonempty 1D array")
        if np.any(errors < 0) or not np.all(np.isfinite(errors)):
            raise DataError("sup errors must be finite and nonnegative")
        object.__setattr__(self, "errors", errors)

    @property
    def B(self):
        return self.errors.size


@dataclass(frozen=True)
class ConfidenceMargin:
    """A margin zeta plus how it was computed."""

    zeta: float
    method: str
    alpha: float
    B: int
    constant: float = None

    def __post_init__(self):
        if self.zeta < 0:
            raise DataError("margin must be nonnegative")
        if self.method not in ("quantile", "tvar-sum", "tvar-sum-scaled"):
            raise ConfigurationError(f"unknown margin method {self.method!r}")


@dataclass(frozen=True)
class ConfidenceRegionPair:
    """Outer and inner set bounds for the estimated bump on a grid."""

    margin: object  # ConfidenceMargin, or a bare zeta for overrides
    estimate_mask: np.ndarray
    upper_mask: np.ndarray
    lower_mask: np.ndarray
    upper_boundary: BoundaryGeometry
    lower_boundary: BoundaryGeometry

    def __post_init__(self):
        if np.any(self.lower_mask & ~self.estimate_mask) or np.any(
            self.estimate_mask & ~self.upper_mask
        ):
            raise DataError("confidence masks must nest: lower <= estimate <= upper")

    @property
    def zeta(self):
        margin = self.margin
        return margin.zeta if isinstance(margin, ConfidenceMargin) else float(margin)


def bootstrap_replicate_indices(seed, replicate, n, resample_size):
    """The resample index vector for one replicate; deterministic in (seed, b)."""
    rng = np.random.default_rng((int(seed) % 2**64, int(replicate)))
    return rng.integers(0, n, size=resample_size)


def bootstrap_sup_errors(sample, bandwidth, grid, plan, operators):
    """Sup-norm bootstrap errors over the grid for each requested operator.

    Every replicate reuses one index draw for all operators, preserving the
    joint dependence that the TVaR-sum margins are designed to dominate.
    Returns a map operator tag -> :class:`SupErrorSample`.
    """
    if not isinstance(sample, SampleMatrix):
        sample = SampleMatrix(sample)
    h = bandwidth.h if isinstance(bandwidth, BandwidthSpec) else float(bandwidth)
    tags = sorted(set(operators))
    n = sample.n
    m = plan.resample_size if plan.resample_size is not None else n
    nodes = grid.nodes()
    num_nodes = nodes.shape[0]
    if num_nodes * n * len(tags) > MAX_MATRIX_ENTRIES or plan.B * num_nodes > MAX_REPLICATE_NODE_PRODUCT:
        raise ResourceLimitError(
            "bootstrap cost exceeds the configured guard; coarsen the grid "
            "(fewer nodes) or reduce the replicate count"
        )

    # column j weight of replicate b: count_j / m - 1/n, so M @ W is the
    # error field of every replicate at once
    counts = np.zeros((n, plan.B))
    for b in range(plan.B):
        idx = bootstrap_replicate_indices(plan.seed, b, n, m)
        counts[:, b] = np.bincount(idx, minlength=n)
    weights = counts / m - 1.0 / n

    chunk = max(1, 2_000_000 // max(1, n))
    slices = chunk_slices(num_nodes, chunk)

    def sup_chunk(sl):
        out = {}
        for tag in tags:
            matrix = operator_kernel_matrix(sample.points, h, nodes[sl], tag)
            out[tag] = np.abs(matrix @ weights).max(axis=0)
        return out

    partials = map_chunks(sup_chunk, slices)
    result = {}
    for tag in tags:
        sup = np.zeros(plan.B)
        for part in partials:
            np.maximum(sup, part[tag], out=sup)
        result[tag] = SupErrorSample(operator_tag=tag, errors=sup)
    return result


def empirical_quantile(errors, p):
    """Left-continuous empirical quantile: the ceil(p*B)-th order statistic."""
    errors = errors.errors if isinstance(errors, SupErrorSample) else np.asarray(errors, float)
    if not 0.0 < p < 1.0:
        raise ConfigurationError("quantile level must lie strictly between 0 and 1")
    b = errors.size
    k = min(b, max(1, math.ceil(p * b - _CEIL_GUARD)))
    return float(np.sort(errors)[k - 1])


def empirical_tvar(errors, p):
    """Tail Value-at-Risk of the empirical distribution at level p.

    Computed as ``q + mean((x - q)_+) / (1 - p)`` with q the empirical
    quantile, which always dominates the quantile itself.
    """
    values = errors.errors if isinstance(errors, SupErrorSample) else np.asarray(errors, float)
    q = empirical_quantile(values, p)
    excess = np.maximum(values - q, 0.0)
    return float(q + excess.mean() / (1.0 - p))


def margin_laplacian(errors, alpha):
    """Quantile margin for Laplacian bumps."""
    zeta = empirical_quantile(errors, 1.0 - alpha)
    b = errors.B if isinstance(errors, SupErrorSample) else len(errors)
    return ConfidenceMargin(zeta=zeta, method="quantile", alpha=alpha, B=b)


def _tvar_double_sum(errors_by_operator, alpha):
    tags = set(errors_by_operator)
    d = 0
    for tag in tags:
        if tag == "laplacian" or len(tag) != 3 or not tag[1:].isdigit():
            raise ConfigurationError(f"expected D_ij operator tags, got {tag!r}")
        d = max(d, int(tag[1]), int(tag[2]))
    missing = [t for t in operator_tags(d) if t not in tags]
    if d == 0 or missing:
        raise ConfigurationError(f"missing second-order operators: {missing}")
    total = 0.0
    b = None
    for i in range(1, d + 1):
        for j in range(1, d + 1):
            tag = f"D{min(i, j)}{max(i, j)}"  # D_ij shares its sample with D_ji
            sample = errors_by_operator[tag]
            total += empirical_tvar(sample, 1.0 - alpha)
            b = sample.B if isinstance(sample, SupErrorSample) else len(sample)
    return total, b


def margin_eigenvalue(errors_by_operator, alpha):
    """TVaR-sum margin for concave bumps and convex dips.

    Sums the per-operator TVaRs over all (i, j) pairs, counting symmetric
    pairs twice; sub-additivity of TVaR makes the sum dominate the quantile
    of the aggregated error no matter how the operators co-move.
    """
    zeta, b = _tvar_double_sum(errors_by_operator, alpha)
    return ConfidenceMargin(zeta=zeta, method="tvar-sum", alpha=alpha, B=b)


def gaussian_margin_lower_bound(h):
    """Smallest admissible scaling constant for determinant-bump margins."""
    return 1.0 / (math.pi * h**4)


def margin_gaussian(errors_by_operator, alpha, h, constant=None):
    """Scaled TVaR-sum margin for determinant bumps (d=2).

    The scaling constant must exceed ``1 / (pi h^4)``, which bounds the
    second kernel derivatives entering the determinant difference.  The
    default sits 5% above that bound.
    """
    bound = gaussian_margin_lower_bound(h)
    if constant is None:
        constant = 1.05 * bound
    if constant <= bound:
        raise ConfigurationError(
            f"determinant-bump margins require a constant > 1/(pi h^4) = {bound:.6g}, "
            f"got {constant:.6g}"
        )
    total, b = _tvar_double_sum(errors_by_operator, alpha)
    return ConfidenceMargin(
        zeta=constant * total,
        method="tvar-sum-scaled",
        alpha=alpha,
        B=b,
        constant=constant,
    )


def confidence_regions(field, margin):
    """Threshold a sign-folded field at -zeta and +zeta.

    The upper region {field >= -zeta} contains the estimated bump, the
    lower region {field >= +zeta} is contained in it; both boundaries are
    extracted with the level-set machinery on the shifted fields.
    """
    zeta = margin.zeta if isinstance(margin, ConfidenceMargin) else float(margin)
    if zeta < 0:
        raise DataError("margin must be nonnegative")
    estimate_mask = field.values >= 0.0
    upper_mask = field.values >= -zeta
    lower_mask = field.values >= zeta
    if math.isfinite(zeta):
        upper_boundary = extract_zero_level(field.shifted(zeta))
        lower_boundary = extract_zero_level(field.shifted(-zeta))
    else:
        empty = BoundaryGeometry(dimension=field.grid.d)
        upper_boundary = lower_boundary = empty
    return ConfidenceRegionPair(
        margin=margin,
        estimate_mask=estimate_mask,
        upper_mask=upper_mask,
        lower_mask=lower_mask,
        upper_boundary=upper_boundary,
        lower_boundary=lower_boundary,
    )
