"""Curvature functionals of a density and closed-form symmetric eigensolvers.

A bump is the region where a chosen functional of the density has a
favorable sign: ``{x : (-1)**s * phi(f)(x) >= 0}`` with a fixed sign
selector ``s`` per functional.  This module evaluates the functionals
``phi``; the sign folding happens in :mod:`curvebump.levelset`.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DataError

#: Sign selector s per functional; the bump is {(-1)**s * phi >= 0}.
SIGN_SELECTORS = {
    "concave": 1,  # largest Hessian eigenvalue <= 0: locally concave, near modes
    "convex": 0,  # smallest Hessian eigenvalue >= 0: locally convex dips
    "laplacian": 1,  # Hessian trace <= 0
    "mean-curvature": 1,  # divergence of the normalized gradient <= 0
    "hessian-determinant": 0,  # det >= 0: concave regions plus convex dips (d=2)
    "gaussian-curvature": 0,  # same sign as the determinant
}

FUNCTIONALS = tuple(SIGN_SELECTORS)

SYMMETRY_TOLERANCE = 1e-9


@dataclass(frozen=True)
class CurvatureFieldSpec:
    """Which functional defines the bump; the sign selector is implied."""

    functional: str

    def __post_init__(self):
        if self.functional not in SIGN_SELECTORS:
            raise ConfigurationError(
                f"unknown functional {self.functional!r}; expected one of {FUNCTIONALS}"
            )

    @property
    def sign_selector(self):
        return SIGN_SELECTORS[self.functional]


def ordered_eigenvalues(matrix):
    """Eigenvalues of a symmetric d x d matrix (d <= 3), sorted descending.

    Uses exact closed forms: the entry itself for d=1, the stable
    discriminant form for d=2 and the trigonometric solution for d=3.
    """
    h = np.asarray(matrix, dtype=float)
    if h.ndim != 2 or h.shape[0] != h.shape[1] or h.shape[0] not in (1, 2, 3):
        raise DataError(f"expected a square matrix of size 1-3, got shape {h.shape}")
    if not np.all(np.isfinite(h)):
        raise DataError("matrix contains non-finite entries")
    if np.max(np.abs(h - h.T)) > SYMMETRY_TOLERANCE:
        raise DataError("matrix is not symmetric within 1e-9")
    return ordered_eigenvalues_batch(h[None, :, :])[0]


def ordered_eigenvalues_batch(hessians):
    """Vectorized closed-form eigenvalues for a (m, d, d) stack, sorted descending.

    Inputs are assumed symmetric (callers either validated or constructed
    them symmetric); the output ordering is enforced exactly by a final sort.
    """
    h = np.asarray(hessians, dtype=float)
    d = h.shape[-1]
    if d == 1:
        vals = h[:, 0, 0][:, None].copy()
    elif d == 2:
        a, b, c = h[:, 0, 0], h[:, 0, 1], h[:, 1, 1]
        mean = 0.5 * (a + c)
        radius = np.hypot(0.5 * (a - c), b)
        vals = np.stack([mean + radius, mean - radius], axis=1)
    elif d == 3:
        vals = _eigenvalues_3x3(h)
    else:
        raise DataError(f"closed forms cover d <= 3, got d={d}")
    return np.sort(vals, axis=1)[:, ::-1]


def _eigenvalues_3x3(h):
    a00, a11, a22 = h[:, 0, 0], h[:, 1, 1], h[:, 2, 2]
    a01, a02, a12 = h[:, 0, 1], h[:, 0, 2], h[:, 1, 2]
    p1 = a01**2 + a02**2 + a12**2
    q = (a00 + a11 + a22) / 3.0
    p2 = (a00 - q) ** 2 + (a11 - q) ** 2 + (a22 - q) ** 2 + 2.0 * p1
    p = np.sqrt(p2 / 6.0)
    safe_p = np.where(p > 0.0, p, 1.0)
    b00, b11, b22 = (a00 - q) / safe_p, (a11 - q) / safe_p, (a22 - q) / safe_p
    b01, b02, b12 = a01 / safe_p, a02 / safe_p, a12 / safe_p
    det_b = (
        b00 * (b11 * b22 - b12 * b12)
        - b01 * (b01 * b22 - b12 * b02)
        + b02 * (b01 * b12 - b11 * b02)
    )
    # exact arithmetic keeps det(B)/2 in [-1, 1]; rounding can step outside
    r = np.clip(det_b / 2.0, -1.0, 1.0)
    phi = np.arccos(r) / 3.0
    e1 = q + 2.0 * p * np.cos(phi)
    e3 = q + 2.0 * p * np.cos(phi + 2.0 * math.pi / 3.0)
    e2 = 3.0 * q - e1 - e3
    return np.stack([e1, e2, e3], axis=1)


def _determinant_batch(h):
    d = h.shape[-1]
    if d == 2:
        return h[:, 0, 0] * h[:, 1, 1] - h[:, 0, 1] * h[:, 1, 0]
    return (
        h[:, 0, 0] * (h[:, 1, 1] * h[:, 2, 2] - h[:, 1, 2] * h[:, 2, 1])
        - h[:, 0, 1] * (h[:, 1, 0] * h[:, 2, 2] - h[:, 1, 2] * h[:, 2, 0])
        + h[:, 0, 2] * (h[:, 1, 0] * h[:, 2, 1] - h[:, 1, 1] * h[:, 2, 0])
    )


def eval_functional(model, spec, x):
    """Evaluate the raw functional phi(f) of ``spec`` at x ((d,) or (m, d)).

    The sign selector is *not* applied here.  The determinant-based
    functionals are only defined for d >= 2 (and carry bump semantics
    only for d = 2, which the level-set layer enforces).
    """
    if isinstance(spec, str):
        spec = CurvatureFieldSpec(spec)
    functional = spec.functional
    d = model.dim
    if functional in ("hessian-determinant", "gaussian-curvature") and d < 2:
        raise ConfigurationError(f"{functional} requires dimension >= 2, got d={d}")
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    hess = model.hessian(pts)
    if single:
        hess = hess[None, :, :]
    if functional == "laplacian":
        out = np.trace(hess, axis1=1, axis2=2)
    elif functional == "concave":
        out = ordered_eigenvalues_batch(hess)[:, 0]
    elif functional == "convex":
        out = ordered_eigenvalues_batch(hess)[:, -1]
    elif functional == "mean-curvature":
        grad = np.atleast_2d(model.gradient(pts))
        g2 = np.einsum("mi,mi->m", grad, grad)
        trace = np.trace(hess, axis1=1, axis2=2)
        ghg = np.einsum("mi,mij,mj->m", grad, hess, grad)
        out = ((1.0 + g2) * trace - ghg) / (1.0 + g2) ** 1.5
    elif functional == "hessian-determinant":
        out = _determinant_batch(hess)
    elif functional == "gaussian-curvature":
        grad = np.atleast_2d(model.gradient(pts))
        g2 = np.einsum("mi,mi->m", grad, grad)
        out = _determinant_batch(hess) / (1.0 + g2) ** (1.0 + d / 2.0)
    else:  # pragma: no cover - CurvatureFieldSpec already validated
        raise ConfigurationError(f"unknown functional {functional!r}")
    return float(out[0]) if single else out


def eigenvalue_separation(model, points):
    """Smallest gap between consecutive ordered Hessian eigenvalues on a grid.

    A runtime diagnostic: values near zero flag that eigenvalue-based bump
    boundaries may be unstable near eigenvalue crossings.  An empty grid
    yields +inf ("not applicable").
    """
    if model.dim < 2:
        raise ConfigurationError("eigenvalue separation needs dimension >= 2")
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return math.inf
    hess = model.hessian(pts)
    eig = ordered_eigenvalues_batch(hess)
    gaps = eig[:, :-1] - eig[:, 1:]
    return float(gaps.min())
