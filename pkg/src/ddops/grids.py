"""Tensor-product grids on boxes, nodal scalar fields, and face traces.

Grids are node-centered and include boundary nodes: node ``i`` along axis
``k`` sits at ``lo[k] + i*h[k]`` with ``h[k] = (hi[k]-lo[k])/(n[k]-1)``.
Field values are stored flat in row-major (C) order, last axis fastest.

The one-sided three-point stencil used for boundary normal derivatives is

    du/dn(x) = (3*u(x) - 4*u(x-s*h) + u(x-2*s*h)) / (2*h)

with ``s`` pointing inward; it is second order and exact on quadratics.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import GeometryError, OutOfDomainError
from .geometry import Box, Interface, COORD_TOL

#: Relative snap width: query coordinates this close to a node (in units of
#: the local spacing) are treated as exactly on the node, so node-coincident
#: interpolation reproduces stored values bit-exactly.
_NODE_SNAP = 1e-9


@dataclass(frozen=True)
class StructuredGrid:
    """Equidistant tensor-product grid on a solid box."""

    box: Box
    n: tuple

    def __post_init__(self):
        n = tuple(int(v) for v in self.n)
        object.__setattr__(self, "n", n)
        if self.box.is_patch:
            raise GeometryError("grids live on solid boxes, not face patches")
        if len(n) != self.box.ndim:
            raise GeometryError(f"need {self.box.ndim} node counts, got {len(n)}")
        if any(v < 3 for v in n):
            raise GeometryError(f"at least 3 nodes per axis required, got {n}")

    @property
    def ndim(self) -> int:
        return self.box.ndim

    @property
    def num_nodes(self) -> int:
        return int(np.prod(self.n))

    @property
    def spacing(self) -> np.ndarray:
        return self.box.lengths / (np.asarray(self.n) - 1)

    def axis_coords(self, axis: int) -> np.ndarray:
        h = self.spacing[axis]
        return self.box.lo[axis] + np.arange(self.n[axis]) * h

    def node_coords(self) -> np.ndarray:
        """All node coordinates, shape (num_nodes, ndim), row-major order."""
        axes = [self.axis_coords(k) for k in range(self.ndim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=-1)

    def flat_index(self, multi_index) -> np.ndarray:
        return np.ravel_multi_index(tuple(np.asarray(m) for m in multi_index), self.n)

    def multi_index(self, flat):
        return np.unravel_index(np.asarray(flat), self.n)

    def face_node_indices(self, axis: int, side: int, patch: Box | None = None):
        """Flat indices and coordinates of the nodes on one box face.

        With ``patch`` given, only nodes inside the patch (within tolerance)
        are returned.  Ordering is row-major over the face's own axes.
        """
        idx = [np.arange(m) for m in self.n]
        idx[axis] = np.asarray([self.n[axis] - 1 if side else 0])
        mesh = np.meshgrid(*idx, indexing="ij")
        flat = self.flat_index(tuple(m.ravel() for m in mesh))
        h = self.spacing
        coords = np.stack(
            [self.box.lo[k] + mesh[k].ravel() * h[k] for k in range(self.ndim)], axis=-1)
        if patch is not None:
            tol = max(1e-12, float(np.max(self.spacing)) * 1e-9)
            keep = np.all((coords >= np.asarray(patch.lo) - tol)
                          & (coords <= np.asarray(patch.hi) + tol), axis=1)
            flat, coords = flat[keep], coords[keep]
        return flat, coords


@dataclass(frozen=True)
class Field:
    """Scalar nodal values on a structured grid (flat, float64)."""

    grid: StructuredGrid
    values: np.ndarray

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.float64).ravel()
        object.__setattr__(self, "values", values)
        if values.size != self.grid.num_nodes:
            raise GeometryError(
                f"value count {values.size} does not match grid nodes {self.grid.num_nodes}")

    @classmethod
    def from_function(cls, grid: StructuredGrid, fn) -> "Field":
        pts = grid.node_coords()
        return cls(grid, np.asarray([fn(*p) for p in pts], dtype=np.float64))

    @classmethod
    def constant(cls, grid: StructuredGrid, value: float) -> "Field":
        return cls(grid, np.full(grid.num_nodes, float(value)))

    def reshaped(self) -> np.ndarray:
        return self.values.reshape(self.grid.n)

    def assert_finite(self):
        if not np.all(np.isfinite(self.values)):
            raise GeometryError("field contains non-finite values")
        return self


@dataclass(frozen=True)
class FaceTrace:
    """Values attached to points on an interface patch."""

    interface: Interface
    points: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        points = np.ascontiguousarray(self.points, dtype=np.float64)
        values = np.ascontiguousarray(self.values, dtype=np.float64).ravel()
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "values", values)
        if points.ndim != 2 or points.shape[0] != values.size:
            raise GeometryError("points and values are misaligned")
        patch = self.interface.patch
        axis = self.interface.normal_axis
        if np.max(np.abs(points[:, axis] - patch.lo[axis])) > 1e-12:
            raise GeometryError("trace points do not lie on the interface patch")


def interpolate(field: Field, points) -> np.ndarray:
    """Multilinear interpolation of a nodal field at arbitrary points.

    Exact at grid nodes and for per-axis linear functions.  Points may sit
    on the boundary; anything outside the box by more than 1e-12 raises
    OutOfDomainError with the first offending point's index.
    """
    grid = field.grid
    pts = np.atleast_2d(np.asarray(points, dtype=np.float64))
    if pts.shape[1] != grid.ndim:
        raise GeometryError(f"points have dimension {pts.shape[1]}, grid is {grid.ndim}D")
    lo = np.asarray(grid.box.lo)
    hi = np.asarray(grid.box.hi)
    outside = (pts < lo - 1e-12) | (pts > hi + 1e-12)
    if np.any(outside):
        bad = int(np.nonzero(np.any(outside, axis=1))[0][0])
        raise OutOfDomainError(
            f"point {pts[bad]} outside box {grid.box.lo}..{grid.box.hi}",
            point_index=bad)

    h = grid.spacing
    t = (pts - lo) / h
    base = np.floor(t).astype(np.int64)
    nearest = np.rint(t)
    snap = np.abs(t - nearest) < _NODE_SNAP
    t = np.where(snap, nearest, t)
    base = np.where(snap, nearest.astype(np.int64), base)
    base = np.clip(base, 0, np.asarray(grid.n) - 2)
    w = t - base

    result = np.zeros(pts.shape[0])
    for corner in range(2 ** grid.ndim):
        offs = [(corner >> k) & 1 for k in range(grid.ndim)]
        weight = np.ones(pts.shape[0])
        for k, o in enumerate(offs):
            weight = weight * (w[:, k] if o else 1.0 - w[:, k])
        flat = grid.flat_index(tuple(base[:, k] + offs[k] for k in range(grid.ndim)))
        result += weight * field.values[flat]
    return result


def one_sided_normal_derivative(values_0, values_1, values_2, h: float) -> np.ndarray:
    """Outward derivative from the face value and the two inward neighbors."""
    return (3.0 * values_0 - 4.0 * values_1 + values_2) / (2.0 * h)


def normal_derivative(field: Field, interface: Interface) -> FaceTrace:
    """Outward normal derivative of ``field`` on a face patch of its box.

    The derivative is taken outward with respect to the field's own box
    (whichever interface side owns the data), sampled at the face's grid
    nodes inside the patch.
    """
    grid = field.grid
    axis, side = grid.box.face_of(interface.patch)
    if axis != interface.normal_axis:
        raise GeometryError("interface normal does not match the located face")
    vals = field.reshaped()
    h = grid.spacing[axis]

    def slab(offset):
        index = [slice(None)] * grid.ndim
        index[axis] = (grid.n[axis] - 1 - offset) if side else offset
        return vals[tuple(index)].ravel()

    deriv = one_sided_normal_derivative(slab(0), slab(1), slab(2), h)
    flat, coords = grid.face_node_indices(axis, side, interface.patch)
    # face_node_indices flattens over the remaining axes in the same
    # row-major order as slab(), so positions line up; apply the patch mask.
    all_flat, _ = grid.face_node_indices(axis, side)
    if flat.size != all_flat.size:
        mask = np.isin(all_flat, flat)
        deriv = deriv[mask]
    return FaceTrace(interface, coords, deriv)


def restrict(field: Field, subbox: Box, subgrid_n) -> Field:
    """Sample a field onto a sub-box grid by multilinear interpolation."""
    if not field.grid.box.contains_box(subbox, COORD_TOL):
        raise OutOfDomainError(f"{subbox} is not contained in {field.grid.box}")
    subgrid = StructuredGrid(subbox, tuple(subgrid_n))
    return Field(subgrid, interpolate(field, subgrid.node_coords()))


# -- patch (face) grids -------------------------------------------------------

def patch_axes(patch: Box):
    """The non-degenerate axes of a face patch."""
    return [k for k in range(patch.ndim) if k != patch.patch_axis]


def patch_points(patch: Box, n_per_axis) -> np.ndarray:
    """Equidistant sensor/node points on a face patch, row-major.

    ``n_per_axis`` lists node counts for the patch's non-degenerate axes in
    ascending axis order; the returned points are full-dimensional.
    """
    axes = patch_axes(patch)
    n_per_axis = tuple(int(v) for v in n_per_axis)
    if len(n_per_axis) != len(axes):
        raise GeometryError(f"patch has {len(axes)} free axes, got counts {n_per_axis}")
    coords_1d = []
    for k, m in zip(axes, n_per_axis):
        if m < 2:
            raise GeometryError("at least 2 points per patch axis required")
        h = (patch.hi[k] - patch.lo[k]) / (m - 1)
        coords_1d.append(patch.lo[k] + np.arange(m) * h)
    mesh = np.meshgrid(*coords_1d, indexing="ij") if coords_1d else []
    total = int(np.prod(n_per_axis)) if n_per_axis else 1
    pts = np.empty((total, patch.ndim))
    pts[:, patch.patch_axis] = patch.lo[patch.patch_axis]
    for k, m in zip(axes, mesh):
        pts[:, k] = m.ravel()
    return pts


def interpolate_on_patch(patch: Box, src_points: np.ndarray, src_values: np.ndarray,
                         src_n, query_points: np.ndarray) -> np.ndarray:
    """Interpolate trace data given on a patch grid at other patch points.

    ``src_points`` must be the row-major grid of ``patch_points(patch,
    src_n)``; 1D patches (edges of 2D domains) and 2D patches (faces of 3D
    domains) are supported.  Exact when query points coincide with source
    points.
    """
    axes = patch_axes(patch)
    if not axes:  # 1D domain: the patch is a single point
        return np.full(np.atleast_2d(query_points).shape[0], float(src_values[0]))
    reduced_box = Box(tuple(patch.lo[k] for k in axes), tuple(patch.hi[k] for k in axes))
    grid = StructuredGrid(reduced_box, tuple(src_n))
    if grid.num_nodes != np.asarray(src_values).size:
        raise GeometryError("source trace values do not match the patch grid")
    reduced_query = np.atleast_2d(query_points)[:, axes]
    return interpolate(Field(grid, src_values), reduced_query)
