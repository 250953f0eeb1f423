"""Curvature fields on rectangular grids and zero-level-set extraction.

The field values stored on a grid are always *sign-folded*: the sign
selector of the functional is already applied, so the bump is uniformly
the ``>= 0`` region and its boundary is the zero level set.  Extraction
uses bisection on the continuous functional in 1D, marching squares in 2D
and marching cubes in 3D.
"""

import math
from dataclasses import dataclass, field as dataclass_field

import numpy as np
from scipy import ndimage
from scipy.spatial import cKDTree

from ._mc_tables import CORNER_OFFSETS, EDGE_CORNERS, TRIANGLE_TABLE
from .curvature import CurvatureFieldSpec, eval_functional
from .errors import ConfigurationError, DataError

DEFAULT_RESOLUTION = {1: 401, 2: 161, 3: 101}
MAX_TOTAL_NODES = 100_000_000
BISECTION_TOLERANCE = 1e-10
BISECTION_MAX_ITERATIONS = 80

# Domain padding in bandwidths: the curvature of a Gaussian-kernel KDE is
# negligible beyond a few h from all data points.
DOMAIN_PAD_BANDWIDTHS = 3.0


@dataclass(frozen=True)
class GridSpec:
    """A rectangular evaluation grid: bounds plus node counts per axis."""

    lower: np.ndarray
    upper: np.ndarray
    resolution: tuple

    def __post_init__(self):
        lower = np.atleast_1d(np.asarray(self.lower, dtype=float))
        upper = np.atleast_1d(np.asarray(self.upper, dtype=float))
        resolution = tuple(int(r) for r in np.atleast_1d(self.resolution))
        d = lower.shape[0]
        if d not in (1, 2, 3) or upper.shape[0] != d or len(resolution) != d:
            raise ConfigurationError("grid lower/upper/resolution dimensions must match (d <= 3)")
        if not (np.all(np.isfinite(lower)) and np.all(np.isfinite(upper))):
            raise ConfigurationError("grid bounds must be finite")
        if not np.all(lower < upper):
            raise ConfigurationError("grid lower bounds must be strictly below upper bounds")
        if any(r < 2 for r in resolution):
            raise ConfigurationError("grid needs at least 2 nodes per axis")
        if math.prod(resolution) > MAX_TOTAL_NODES:
            raise ConfigurationError(f"grid exceeds the {MAX_TOTAL_NODES} node guard")
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        object.__setattr__(self, "resolution", resolution)

    @property
    def d(self):
        return self.lower.shape[0]

    @property
    def num_nodes(self):
        return math.prod(self.resolution)

    def axes(self):
        return [
            np.linspace(self.lower[i], self.upper[i], self.resolution[i])
            for i in range(self.d)
        ]

    def nodes(self):
        """All grid nodes as an (N, d) array, row-major in coordinate order."""
        mesh = np.meshgrid(*self.axes(), indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)

    def spacing(self):
        return (self.upper - self.lower) / (np.asarray(self.resolution) - 1)


def default_grid(sample, h, resolution=None):
    """Evaluation domain: the sample bounding box padded by 3 bandwidths."""
    lo, hi = sample.bounding_box()
    pad = DOMAIN_PAD_BANDWIDTHS * h
    if resolution is None:
        resolution = (DEFAULT_RESOLUTION[sample.d],) * sample.d
    return GridSpec(lo - pad, hi + pad, resolution)


@dataclass(frozen=True)
class ScalarFieldGrid:
    """Sign-folded functional values on a grid, with the continuous functional.

    ``evaluate`` maps an (m, d) array of points to the same sign-folded
    functional values; the 1D root refinement and the marching-squares
    saddle decider rely on it.
    """

    grid: GridSpec
    values: np.ndarray
    evaluate: object = dataclass_field(default=None, compare=False)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.size != self.grid.num_nodes:
            raise DataError("field values do not match the grid node count")
        vals = vals.reshape(self.grid.resolution)
        if not np.all(np.isfinite(vals)):
            bad = int(np.flatnonzero(~np.isfinite(vals.ravel()))[0])
            raise DataError(f"field contains a non-finite value at node {bad}")
        object.__setattr__(self, "values", vals)

    def shifted(self, offset):
        """The field plus a constant, keeping the continuous functional in sync."""
        fn = self.evaluate
        shifted_fn = None if fn is None else (lambda pts: fn(pts) + offset)
        return ScalarFieldGrid(self.grid, self.values + offset, shifted_fn)


def evaluate_field(model, spec, grid):
    """Sample ``(-1)**s * phi(f)`` on the grid nodes.

    The determinant-based functionals only define bumps for d=2, so that
    restriction is enforced here (their raw evaluation for d=3 remains
    available through :func:`curvebump.curvature.eval_functional`).
    """
    if isinstance(spec, str):
        spec = CurvatureFieldSpec(spec)
    if grid.d != model.dim:
        raise ConfigurationError(
            f"grid dimension {grid.d} does not match model dimension {model.dim}"
        )
    if spec.functional in ("hessian-determinant", "gaussian-curvature") and grid.d != 2:
        raise ConfigurationError(f"{spec.functional} bumps are only defined for d=2")
    sign = -1.0 if spec.sign_selector else 1.0

    def folded(pts):
        return sign * eval_functional(model, spec, np.asarray(pts, dtype=float))

    values = folded(grid.nodes())
    bad = np.flatnonzero(~np.isfinite(values))
    if bad.size:
        raise DataError(f"functional evaluation returned a non-finite value at node {int(bad[0])}")
    return ScalarFieldGrid(grid, values.reshape(grid.resolution), folded)


@dataclass(frozen=True)
class BoundaryGeometry:
    """Extracted zero level set: points (d=1), polylines (d=2) or a mesh (d=3)."""

    dimension: int
    points: np.ndarray = None
    polylines: tuple = ()
    vertices: np.ndarray = None
    triangles: np.ndarray = None

    def __post_init__(self):
        if self.dimension not in (1, 2, 3):
            raise DataError("boundary dimension must be 1, 2 or 3")
        if self.dimension == 1:
            pts = np.zeros((0, 1)) if self.points is None else np.asarray(self.points, float)
            pts = pts.reshape(-1, 1)
            object.__setattr__(self, "points", pts)
        elif self.dimension == 2:
            lines = tuple(np.asarray(p, dtype=float) for p in self.polylines)
            for line in lines:
                if line.ndim != 2 or line.shape[1] != 2 or line.shape[0] < 2:
                    raise DataError("each polyline needs >= 2 vertices of dimension 2")
            object.__setattr__(self, "polylines", lines)
        else:
            verts = np.zeros((0, 3)) if self.vertices is None else np.asarray(self.vertices, float)
            tris = np.zeros((0, 3), dtype=int) if self.triangles is None else np.asarray(self.triangles, dtype=int)
            if tris.size and (tris.min() < 0 or tris.max() >= verts.shape[0]):
                raise DataError("triangle indices out of range")
            object.__setattr__(self, "vertices", verts)
            object.__setattr__(self, "triangles", tris)

    @property
    def is_empty(self):
        if self.dimension == 1:
            return self.points.shape[0] == 0
        if self.dimension == 2:
            return len(self.polylines) == 0
        return self.triangles.shape[0] == 0

    def vertex_array(self):
        """All boundary vertices stacked into one (K, d) array."""
        if self.dimension == 1:
            return self.points
        if self.dimension == 2:
            if not self.polylines:
                return np.zeros((0, 2))
            return np.vstack(self.polylines)
        return self.vertices

    def euler_characteristic(self):
        """V - E + F of the triangle mesh (d=3 only)."""
        if self.dimension != 3:
            raise ConfigurationError("Euler characteristic is defined for meshes only")
        if self.triangles.shape[0] == 0:
            return 0
        tris = self.triangles
        referenced = np.unique(tris)
        edges = np.vstack([tris[:, [0, 1]], tris[:, [1, 2]], tris[:, [2, 0]]])
        edges = np.unique(np.sort(edges, axis=1), axis=0)
        return int(referenced.size - edges.shape[0] + tris.shape[0])

    def to_pieces(self):
        """JSON-ready piece list (kind + coordinate payload)."""
        if self.is_empty:
            return []
        if self.dimension == 1:
            return [{"kind": "points", "coordinates": self.points.tolist()}]
        if self.dimension == 2:
            return [
                {"kind": "polyline", "coordinates": line.tolist()}
                for line in self.polylines
            ]
        return [
            {
                "kind": "mesh",
                "vertices": self.vertices.tolist(),
                "triangles": self.triangles.tolist(),
            }
        ]


def extract_zero_level(field):
    """Dispatch to the 1D/2D/3D extractor matching the field dimension."""
    d = field.grid.d
    if d == 1:
        return extract_zero_level_1d(field)
    if d == 2:
        return extract_zero_level_2d(field)
    return extract_zero_level_3d(field)


def extract_zero_level_1d(field):
    """Roots of the field: nodes at exactly zero, plus bisection refinement
    of every interval with a strict sign change.

    Bisection runs on the continuous functional (``field.evaluate``), not on
    the linear interpolant, to |value| <= 1e-10 or 80 iterations.
    """
    if field.grid.d != 1:
        raise ConfigurationError("extract_zero_level_1d requires a 1D field")
    values = field.values.ravel()
    axis = field.grid.axes()[0]
    roots = list(axis[values == 0.0])
    crossing = np.flatnonzero((values[:-1] * values[1:]) < 0.0)
    if crossing.size:
        if field.evaluate is None:
            raise ConfigurationError(
                "1D extraction refines roots by bisection and needs the field's "
                "continuous functional (ScalarFieldGrid.evaluate)"
            )
        roots.extend(_bisect_roots(field.evaluate, axis, values, crossing))
    points = np.array(sorted(set(float(r) for r in roots)))
    return BoundaryGeometry(dimension=1, points=points.reshape(-1, 1))


def _bisect_roots(evaluate, axis, values, crossing):
    lo = axis[crossing].copy()
    hi = axis[crossing + 1].copy()
    flo = values[crossing].copy()
    root = 0.5 * (lo + hi)
    done = np.zeros(lo.shape, dtype=bool)
    for _ in range(BISECTION_MAX_ITERATIONS):
        mid = 0.5 * (lo + hi)
        fmid = np.asarray(evaluate(mid[:, None]), dtype=float)
        newly = ~done & (np.abs(fmid) <= BISECTION_TOLERANCE)
        root[newly] = mid[newly]
        done |= newly
        if done.all():
            break
        move_lo = ~done & (np.sign(fmid) == np.sign(flo))
        move_hi = ~done & ~move_lo
        lo[move_lo] = mid[move_lo]
        flo[move_lo] = fmid[move_lo]
        hi[move_hi] = mid[move_hi]
    root[~done] = 0.5 * (lo + hi)[~done]
    return root.tolist()


# marching squares: case index sets bit k when corner k is inside (>= 0);
# corners are numbered 0..3 counterclockwise from the cell origin.  Edge
# letters: S(outh)/E(ast)/N(orth)/W(est).  Cases 5 and 10 are the saddles.
_SEGMENTS_2D = {
    0: (),
    1: (("W", "S"),),
    2: (("S", "E"),),
    3: (("W", "E"),),
    4: (("E", "N"),),
    6: (("S", "N"),),
    7: (("W", "N"),),
    8: (("N", "W"),),
    9: (("S", "N"),),
    11: (("E", "N"),),
    12: (("E", "W"),),
    13: (("S", "E"),),
    14: (("W", "S"),),
    15: (),
}


def extract_zero_level_2d(field):
    """Marching squares with linear edge interpolation.

    Crossing vertices are shared between neighbouring cells through their
    grid edge, so chained segments connect exactly.  Saddle cells are
    disambiguated by sampling the true functional at the cell centre (mean
    of the corner values when no functional is attached).
    """
    if field.grid.d != 2:
        raise ConfigurationError("extract_zero_level_2d requires a 2D field")
    v = field.values
    ax, ay = field.grid.axes()
    inside = v >= 0.0

    coords, id_x, id_y = _crossing_vertices_2d(v, inside, ax, ay)

    case = (
        inside[:-1, :-1].astype(np.int8)
        + 2 * inside[1:, :-1]
        + 4 * inside[1:, 1:]
        + 8 * inside[:-1, 1:]
    )
    mixed = (case != 0) & (case != 15)
    cells = np.argwhere(mixed)
    if cells.shape[0] == 0:
        return BoundaryGeometry(dimension=2)

    saddle_choice = _resolve_saddles(field, case, ax, ay)

    segments = []
    for i, j in cells:
        c = int(case[i, j])
        if c in (5, 10):
            pairs = saddle_choice[(i, j)]
        else:
            pairs = _SEGMENTS_2D[c]
        edge_ids = {
            "S": id_x[i, j],
            "N": id_x[i, j + 1],
            "W": id_y[i, j],
            "E": id_y[i + 1, j],
        }
        for a, b in pairs:
            segments.append((edge_ids[a], edge_ids[b]))

    polylines = _chain_segments(segments, coords)
    return BoundaryGeometry(dimension=2, polylines=tuple(polylines))


def _crossing_vertices_2d(v, inside, ax, ay):
    """Interpolated zero crossings on grid edges, with per-edge vertex ids."""
    coords = []
    # edges along x between (i, j) and (i+1, j)
    cross_x = inside[:-1, :] != inside[1:, :]
    id_x = np.full(cross_x.shape, -1, dtype=np.int64)
    ii, jj = np.nonzero(cross_x)
    va, vb = v[ii, jj], v[ii + 1, jj]
    t = va / (va - vb)
    xs = ax[ii] + t * (ax[ii + 1] - ax[ii])
    id_x[ii, jj] = np.arange(ii.size)
    coords.append(np.column_stack([xs, ay[jj]]))
    # edges along y between (i, j) and (i, j+1)
    cross_y = inside[:, :-1] != inside[:, 1:]
    id_y = np.full(cross_y.shape, -1, dtype=np.int64)
    ii, jj = np.nonzero(cross_y)
    va, vb = v[ii, jj], v[ii, jj + 1]
    t = va / (va - vb)
    ys = ay[jj] + t * (ay[jj + 1] - ay[jj])
    id_y[ii, jj] = coords[0].shape[0] + np.arange(ii.size)
    coords.append(np.column_stack([ax[ii], ys]))
    all_coords = np.vstack(coords) if coords else np.zeros((0, 2))
    return all_coords, id_x, id_y


def _resolve_saddles(field, case, ax, ay):
    saddles = np.argwhere((case == 5) | (case == 10))
    if saddles.shape[0] == 0:
        return {}
    centers = np.column_stack(
        [
            0.5 * (ax[saddles[:, 0]] + ax[saddles[:, 0] + 1]),
            0.5 * (ay[saddles[:, 1]] + ay[saddles[:, 1] + 1]),
        ]
    )
    if field.evaluate is not None:
        center_vals = np.asarray(field.evaluate(centers), dtype=float)
    else:
        v = field.values
        i, j = saddles[:, 0], saddles[:, 1]
        center_vals = 0.25 * (v[i, j] + v[i + 1, j] + v[i, j + 1] + v[i + 1, j + 1])
    choice = {}
    for (i, j), cval in zip(saddles, center_vals):
        c = int(case[i, j])
        center_inside = cval >= 0.0
        if c == 5:  # corners 0 and 2 inside
            pairs = (("W", "N"), ("S", "E")) if center_inside else (("W", "S"), ("E", "N"))
        else:  # case 10: corners 1 and 3 inside
            pairs = (("W", "S"), ("E", "N")) if center_inside else (("S", "E"), ("N", "W"))
        choice[(int(i), int(j))] = pairs
    return choice


def _chain_segments(segments, coords):
    """Join crossing segments into polylines; cycles repeat their first vertex."""
    adjacency = {}
    for idx, (a, b) in enumerate(segments):
        adjacency.setdefault(a, []).append((idx, b))
        adjacency.setdefault(b, []).append((idx, a))
    used = [False] * len(segments)

    def walk(start):
        path = [start]
        current = start
        while True:
            nxt = None
            for seg_idx, other in adjacency[current]:
                if not used[seg_idx]:
                    used[seg_idx] = True
                    nxt = other
                    break
            if nxt is None:
                break
            path.append(nxt)
            current = nxt
        return path

    paths = []
    endpoints = sorted(v for v, nbrs in adjacency.items() if len(nbrs) == 1)
    for v in endpoints:
        if any(not used[s] for s, _ in adjacency[v]):
            paths.append(walk(v))
    for idx, (a, _) in enumerate(segments):  # remaining segments are cycles
        if not used[idx]:
            paths.append(walk(a))

    polylines = []
    for path in paths:
        pts = coords[np.asarray(path)]
        keep = np.ones(len(pts), dtype=bool)
        keep[1:] = np.any(pts[1:] != pts[:-1], axis=1)
        pts = pts[keep]
        if pts.shape[0] >= 2:
            polylines.append(pts)
    return polylines


# edge -> (axis, offset of the canonical lower grid node)
_EDGE_AXIS_OFFSET = []
for _a, _b in EDGE_CORNERS:
    _off_a, _off_b = CORNER_OFFSETS[_a], CORNER_OFFSETS[_b]
    _axis = next(k for k in range(3) if _off_a[k] != _off_b[k])
    _EDGE_AXIS_OFFSET.append((_axis, tuple(min(_off_a[k], _off_b[k]) for k in range(3))))


def extract_zero_level_3d(field):
    """Marching cubes with the standard 256-case table.

    Crossing vertices are deduplicated through their grid edge, so the mesh
    is watertight wherever the surface is closed; triangle winding is
    consistent, with normals pointing toward increasing field values.
    """
    if field.grid.d != 3:
        raise ConfigurationError("extract_zero_level_3d requires a 3D field")
    v = field.values
    inside = v >= 0.0
    below = ~inside  # the classic tables set case bits for corners below the level

    case = np.zeros(tuple(s - 1 for s in v.shape), dtype=np.uint16)
    for bit, (ox, oy, oz) in enumerate(CORNER_OFFSETS):
        nx, ny, nz = case.shape
        case |= below[ox : ox + nx, oy : oy + ny, oz : oz + nz].astype(np.uint16) << bit
    cells = np.argwhere((case != 0) & (case != 255))
    if cells.shape[0] == 0:
        return BoundaryGeometry(dimension=3)

    coords, edge_ids = _crossing_vertices_3d(v, inside, field.grid.axes())

    triangles = []
    for i, j, k in cells:
        table_row = TRIANGLE_TABLE[case[i, j, k]]
        for t in range(0, len(table_row), 3):
            ids = []
            for e in table_row[t : t + 3]:
                axis, (ox, oy, oz) = _EDGE_AXIS_OFFSET[e]
                ids.append(edge_ids[axis][i + ox, j + oy, k + oz])
            if ids[0] != ids[1] and ids[1] != ids[2] and ids[0] != ids[2]:
                # the classic tables wind toward decreasing values; flip so
                # normals point toward increasing field values
                triangles.append(ids[::-1])
    if not triangles:
        return BoundaryGeometry(dimension=3)
    return BoundaryGeometry(
        dimension=3, vertices=coords, triangles=np.asarray(triangles, dtype=int)
    )


def _crossing_vertices_3d(v, inside, axes):
    coords = []
    edge_ids = []
    offset = 0
    for axis in range(3):
        sl_a = [slice(None)] * 3
        sl_b = [slice(None)] * 3
        sl_a[axis] = slice(None, -1)
        sl_b[axis] = slice(1, None)
        cross = inside[tuple(sl_a)] != inside[tuple(sl_b)]
        ids = np.full(cross.shape, -1, dtype=np.int64)
        idx = np.nonzero(cross)
        va = v[tuple(sl_a)][idx]
        vb = v[tuple(sl_b)][idx]
        t = va / (va - vb)
        pts = np.column_stack([axes[k][idx[k]] for k in range(3)]).astype(float)
        step = axes[axis][1] - axes[axis][0]
        pts[:, axis] += t * step
        ids[idx] = offset + np.arange(idx[0].size)
        offset += idx[0].size
        coords.append(pts)
        edge_ids.append(ids)
    return np.vstack(coords), edge_ids


def connected_components(field):
    """Label the >= 0 nodes by face adjacency; returns (count, labels).

    Labels follow the scipy convention: 0 marks background (< 0) nodes and
    components are numbered 1..count.
    """
    labels, count = ndimage.label(field.values >= 0.0)
    return int(count), labels


def hausdorff_distance(a, b):
    """Hausdorff distance between two finite point sets of the same dimension."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    b = np.atleast_2d(np.asarray(b, dtype=float))
    if a.shape[0] == 0 or b.shape[0] == 0:
        raise DataError("Hausdorff distance is undefined for empty point sets")
    if a.shape[1] != b.shape[1]:
        raise DataError("point sets must share the same dimension")
    d_ab = cKDTree(b).query(a)[0].max()
    d_ba = cKDTree(a).query(b)[0].max()
    return float(max(d_ab, d_ba))
