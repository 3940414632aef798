"""Finite metric spaces: validation, deterministic builders, subspaces, gluing.

A space is an immutable labeled point set with a validated symmetric distance
matrix. Builders for 1-D grids and polygon arcs construct their matrices from
exact float products (grid steps have their low mantissa bits cleared so every
integer multiple is exactly representable), which makes the triangle check
pass with zero tolerance; euclidean builders rely on the default relative
tolerance to absorb rounding.
"""

import json
import math
from dataclasses import dataclass

import numpy as np

from ._kernels import worst_triangle_deficit
from .errors import (
    CrossDistanceTooSmallError,
    DegenerateIntervalError,
    DuplicateIndexError,
    DuplicatePointError,
    EmptySelectionError,
    IndexOutOfRangeError,
    InvalidInputError,
    NegativeEntryError,
    NonSquareError,
    NonzeroDiagonalError,
    ParseError,
    TooFewPointsError,
    TriangleViolationError,
    AsymmetryExceedsToleranceError,
    ValidationError,
)

TRIANGLE_TOL_REL = 1e-9  # default triangle tolerance, relative to diameter


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    """n labeled points with a symmetric distance matrix (shared length unit)."""

    labels: tuple[str, ...]
    dist: np.ndarray
    name: str = ""

    def __post_init__(self):
        self.dist.setflags(write=False)

    @property
    def n(self) -> int:
        return self.dist.shape[0]

    def __repr__(self):
        return f"FiniteMetricSpace(n={self.n}, name={self.name!r})"


@dataclass(frozen=True)
class GlueSpec:
    """Two component spaces joined by a single cross-distance c.

    The glued matrix is a metric iff 2c covers both component diameters.
    """

    x: FiniteMetricSpace
    y: FiniteMetricSpace
    c: float

    def __post_init__(self):
        c = float(self.c)
        if not math.isfinite(c) or c <= 0.0:
            raise CrossDistanceTooSmallError(
                f"cross-distance must be a positive finite number, got {c!r}")
        bound = max(diameter(self.x), diameter(self.y))
        if 2.0 * c < bound:
            raise CrossDistanceTooSmallError(
                f"2c = {2.0 * c} is below the larger component diameter "
                f"{bound}; the glued matrix would not be a metric")


def _default_labels(n: int) -> tuple[str, ...]:
    return tuple(f"p{i}" for i in range(n))


def validate_metric(matrix, labels=None, tol_triangle: float | None = None,
                    name: str = "") -> FiniteMetricSpace:
    """Validate a square distance matrix and wrap it as a space.

    Small asymmetries (within `tol_triangle`) are repaired by averaging the
    (i, j) and (j, i) entries. `tol_triangle` defaults to 1e-9 relative to the
    diameter; it exists only to absorb floating construction error.
    """
    d = np.array(matrix, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        raise NonSquareError(f"expected a nonempty square matrix, got shape {d.shape}")
    n = d.shape[0]
    if not np.isfinite(d).all():
        raise ValidationError("matrix contains non-finite entries")
    if (np.diag(d) != 0.0).any():
        i = int(np.flatnonzero(np.diag(d))[0])
        raise NonzeroDiagonalError(f"diagonal entry ({i},{i}) = {d[i, i]} must be 0")
    if (d < 0.0).any():
        i, j = np.unravel_index(int(np.argmin(d)), d.shape)
        raise NegativeEntryError(f"entry ({i},{j}) = {d[i, j]} is negative")

    scale = float(d.max()) if n > 1 else 0.0
    tol = TRIANGLE_TOL_REL * scale if tol_triangle is None else float(tol_triangle)

    asym = np.abs(d - d.T)
    worst_asym = float(asym.max()) if n > 1 else 0.0
    if worst_asym > tol:
        i, j = np.unravel_index(int(np.argmax(asym)), asym.shape)
        raise AsymmetryExceedsToleranceError(
            f"entries ({i},{j}) and ({j},{i}) differ by {worst_asym} > {tol}")
    if worst_asym > 0.0:
        d = (d + d.T) / 2.0

    if n > 1:
        off = d + np.diag(np.full(n, np.inf))
        if (off <= 0.0).any():
            i, j = np.unravel_index(int(np.argmin(off)), off.shape)
            raise ValidationError(
                f"distance ({i},{j}) between distinct points must be positive")
        deficit, i, j, k = worst_triangle_deficit(d)
        if deficit > tol:
            raise TriangleViolationError(
                f"d({i},{j}) exceeds d({i},{k}) + d({k},{j}) by {deficit} > {tol}",
                triple=(i, j, k), deficit=deficit)

    if labels is None:
        labels = _default_labels(n)
    else:
        labels = tuple(str(s) for s in labels)
        if len(labels) != n:
            raise ValidationError(f"got {len(labels)} labels for {n} points")
    d = np.ascontiguousarray(d)
    return FiniteMetricSpace(labels=labels, dist=d, name=name)


def diameter(space: FiniteMetricSpace) -> float:
    """Largest pairwise distance (0 for a single point)."""
    return float(space.dist.max())


def subspace(space: FiniteMetricSpace, indices) -> FiniteMetricSpace:
    """Restriction to the selected points; labels carried over."""
    idx = list(indices)
    if not idx:
        raise EmptySelectionError("no indices selected")
    seen = set()
    for i in idx:
        if not (0 <= i < space.n):
            raise IndexOutOfRangeError(f"index {i} out of range for n={space.n}")
        if i in seen:
            raise DuplicateIndexError(f"index {i} selected twice")
        seen.add(i)
    ia = np.asarray(idx, dtype=np.intp)
    d = np.ascontiguousarray(space.dist[np.ix_(ia, ia)])
    return FiniteMetricSpace(labels=tuple(space.labels[i] for i in idx),
                             dist=d, name=space.name)


def glue(spec: GlueSpec) -> FiniteMetricSpace:
    """Join two spaces, setting every cross-pair distance to spec.c.

    Component blocks are copied verbatim; labels become "x0..", "y0.." so a
    measure on the glued space identifies component membership.
    """
    nx, ny = spec.x.n, spec.y.n
    d = np.full((nx + ny, nx + ny), float(spec.c))
    d[:nx, :nx] = spec.x.dist
    d[nx:, nx:] = spec.y.dist
    labels = tuple(f"x{i}" for i in range(nx)) + tuple(f"y{j}" for j in range(ny))
    name = f"glue({spec.x.name or 'x'},{spec.y.name or 'y'},c={spec.c})"
    return validate_metric(d, labels=labels, name=name)


def _clear_low_bits(x: float, t: int) -> float:
    """Zero the low t mantissa bits of a positive float."""
    if t <= 0:
        return x
    bits = np.float64(x).view(np.int64)
    mask = ~np.int64((1 << t) - 1)
    return float(np.int64(bits & mask).view(np.float64))


def interval_grid(a: float, b: float, n: int) -> FiniteMetricSpace:
    """n equally spaced points on [a, b] with the absolute-difference metric.

    The grid step has its low mantissa bits cleared so every entry is an exact
    integer multiple of the step; the triangle inequality then holds with zero
    tolerance.
    """
    a, b = float(a), float(b)
    if not (math.isfinite(a) and math.isfinite(b)) or not a < b:
        raise DegenerateIntervalError(f"need finite a < b, got a={a}, b={b}")
    if n < 2:
        raise TooFewPointsError(f"need at least 2 grid points, got {n}")
    h = _clear_low_bits((b - a) / (n - 1), (n - 1).bit_length())
    if h <= 0.0:
        raise DegenerateIntervalError("interval too short to resolve n points")
    k = np.arange(n, dtype=np.float64)
    d = np.abs(k[:, None] - k[None, :]) * h
    return validate_metric(d, labels=[f"t{i}" for i in range(n)],
                           tol_triangle=0.0, name=f"interval({a},{b},{n})")


def regular_polygon_arc(n: int) -> FiniteMetricSpace:
    """n equally spaced points on the unit circle with the arc-length metric.

    Distances are geodesic: min(|Δθ|, 2π − |Δθ|) for angles θ_k = 2πk/n,
    realized as exact multiples of a bit-truncated arc step (zero-tolerance
    triangle check, as for interval_grid).
    """
    if n < 2:
        raise TooFewPointsError(f"need at least 2 polygon points, got {n}")
    h = _clear_low_bits(2.0 * math.pi / n, (n // 2).bit_length())
    k = np.arange(n, dtype=np.float64)
    steps = np.abs(k[:, None] - k[None, :])
    steps = np.minimum(steps, n - steps)
    d = steps * h
    return validate_metric(d, labels=[f"a{i}" for i in range(n)],
                           tol_triangle=0.0, name=f"circle({n})")


def euclidean_cloud(coords, labels=None, name: str = "") -> FiniteMetricSpace:
    """Pairwise euclidean distances of a finite point cloud."""
    pts = np.asarray(coords, dtype=np.float64)
    if pts.ndim == 1:
        pts = pts[:, None]
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise InvalidInputError(f"expected a (n, k) coordinate array, got shape {pts.shape}")
    if not np.isfinite(pts).all():
        raise InvalidInputError("coordinates must be finite")
    diff = pts[:, None, :] - pts[None, :, :]
    d = np.sqrt((diff * diff).sum(axis=-1))
    n = pts.shape[0]
    if n > 1:
        off = d + np.diag(np.full(n, np.inf))
        dup_tol = 1e-12 * max(1.0, float(d.max()))
        if (off <= dup_tol).any():
            i, j = np.unravel_index(int(np.argmin(off)), off.shape)
            raise DuplicatePointError(
                f"points {i} and {j} coincide within tolerance {dup_tol}")
    return validate_metric(d, labels=labels, name=name or f"cloud({n})")


def _sphere_lattice(count: int, radius: float) -> np.ndarray:
    """Deterministic golden-angle lattice of `count` points on a sphere."""
    i = np.arange(count, dtype=np.float64)
    y = 1.0 - 2.0 * (i + 0.5) / count
    r = np.sqrt(np.maximum(0.0, 1.0 - y * y))
    theta = math.pi * (3.0 - math.sqrt(5.0)) * i
    pts = np.stack([r * np.cos(theta), y, r * np.sin(theta)], axis=1)
    return pts * radius


def ball_discretization(shells: int, points_per_shell: int) -> FiniteMetricSpace:
    """Finite subset of the closed unit ball: origin + lattice spheres.

    Spheres of radius k/shells for k = 1..shells each carry the same fixed
    golden-angle lattice, so the construction is fully deterministic; growing
    points_per_shell refines coverage of the same nested sphere family.
    """
    if shells < 1:
        raise InvalidInputError(f"need at least 1 shell, got {shells}")
    if points_per_shell < 4:
        raise TooFewPointsError(
            f"need at least 4 points per shell, got {points_per_shell}")
    pts = [np.zeros((1, 3))]
    labels = ["o"]
    for k in range(1, shells + 1):
        pts.append(_sphere_lattice(points_per_shell, k / shells))
        labels.extend(f"s{k}p{i}" for i in range(points_per_shell))
    return euclidean_cloud(np.vstack(pts), labels=labels,
                           name=f"ball3({shells},{points_per_shell})")


def random_metric(n: int, seed: int) -> FiniteMetricSpace:
    """Reproducible random metric: off-diagonal entries uniform in [1, 2].

    The range forces the triangle inequality exactly (any two entries sum to
    at least the maximum), so the output always validates.
    """
    if n < 1:
        raise TooFewPointsError(f"need at least 1 point, got {n}")
    rng = np.random.default_rng(seed)
    d = np.zeros((n, n))
    iu = np.triu_indices(n, k=1)
    vals = rng.uniform(1.0, 2.0, size=len(iu[0]))
    d[iu] = vals
    d.T[iu] = vals
    return validate_metric(d, tol_triangle=0.0, name=f"random({n},{seed})")


# -- space JSON format --------------------------------------------------------
#
# {"name": str, "labels": [str, ...] (optional), "matrix": [[...], ...]}
# Matrices are stored in full; numbers carry 17 significant digits so a
# save/load round trip is bit-exact.


def _fmt17(x: float) -> str:
    return format(float(x), ".17g")


def space_to_json(space: FiniteMetricSpace) -> str:
    rows = ",\n      ".join(
        "[" + ", ".join(_fmt17(v) for v in row) + "]" for row in space.dist)
    return (
        "{\n"
        f'  "name": {json.dumps(space.name)},\n'
        f'  "labels": {json.dumps(list(space.labels))},\n'
        f'  "matrix": [\n      {rows}\n  ]\n'
        "}\n"
    )


def save_space(space: FiniteMetricSpace, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(space_to_json(space))


def space_from_json(text: str, tol_triangle: float | None = None) -> FiniteMetricSpace:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"not valid JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise ParseError("expected a JSON object with a 'matrix' key")
    if "matrix" not in obj:
        raise ParseError("missing required key 'matrix'")
    matrix = obj["matrix"]
    if (not isinstance(matrix, list) or not matrix
            or not all(isinstance(r, list) for r in matrix)):
        raise ParseError("'matrix' must be a nonempty array of arrays of numbers")
    labels = obj.get("labels")
    if labels is not None and (not isinstance(labels, list)
                               or not all(isinstance(s, str) for s in labels)):
        raise ParseError("'labels' must be an array of strings")
    name = obj.get("name", "")
    if not isinstance(name, str):
        raise ParseError("'name' must be a string")
    return validate_metric(matrix, labels=labels, tol_triangle=tol_triangle,
                           name=name)


def load_space(path, tol_triangle: float | None = None) -> FiniteMetricSpace:
    """Read a space from its JSON file; validation errors carry field context."""
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    return space_from_json(text, tol_triangle=tol_triangle)
