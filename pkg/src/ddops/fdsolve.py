"""Second-order finite-difference solvers for elliptic problems on boxes.

Discretization: node-centered control volumes on equidistant grids.  For
interior nodes this reproduces the standard central-difference stencil for

    -sum_k c_k d2u/dx_k2 = p

and Neumann/Robin faces enter through their boundary flux, which is
algebraically identical to second-order ghost-node elimination.  Composite
domains made of face-matched boxes are assembled monolithically: coincident
interface nodes become a single unknown and the half control volumes from
both sides add, so the scheme is conservative across interfaces (this is
what couples the two material layers in the stacked-cube solve).

Systems are solved with a sparse direct factorization below a size
threshold and with conjugate gradients (algebraic-multigrid preconditioned)
above it; both paths verify the final relative residual.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import (ConvergenceError, GeometryError, GridMismatchError,
                     NonPositiveError, PortError, SingularSystemError)
from .geometry import Box, CompositeGeometry, Interface, shared_face
from .grids import FaceTrace, Field, StructuredGrid

#: Unknown-count threshold below which a sparse direct solve is used.
DIRECT_SOLVE_LIMIT = 60_000

#: Default relative residual tolerance for linear solves.
RESIDUAL_TOL = 1e-10

DIRICHLET = "dirichlet"
NEUMANN = "neumann"
ROBIN = "robin"


@dataclass(frozen=True)
class BoundaryCondition:
    """One condition on a box face or a rectangular subset of it.

    ``data`` may be a scalar, an array aligned with the face's grid nodes
    inside the patch (row-major over the face axes), a callable mapping an
    (m, d) point array to m values, or a FaceTrace whose points coincide
    with those nodes.  Robin conditions read
    ``robin_alpha*u + robin_beta*du/dn = data`` with n the outward normal.
    """

    face: tuple
    kind: str
    data: object = 0.0
    patch: Box | None = None
    robin_alpha: float = 1.0
    robin_beta: float = 1.0

    def __post_init__(self):
        if self.kind not in (DIRICHLET, NEUMANN, ROBIN):
            raise GeometryError(f"unknown boundary condition kind {self.kind!r}")
        axis, side = self.face
        if side not in (0, 1):
            raise GeometryError("face side must be 0 (lo) or 1 (hi)")
        if self.kind == ROBIN and self.robin_alpha == 0.0 and self.robin_beta == 0.0:
            raise GeometryError("robin condition needs a nonzero alpha or beta")


@dataclass(frozen=True)
class PdeProblem:
    """An elliptic problem ``-sum_k c_k d2u/dx_k2 = p`` on a single box.

    ``diffusion`` is a scalar or per-axis vector of strictly positive
    coefficients (per-axis vectors arise from stretching maps).
    ``equation_coeffs`` carries the reserved (alpha, beta) operator
    parameters; they are stored with the problem but do not enter this
    solver.
    """

    box: Box
    bcs: tuple
    rhs: object = 0.0
    diffusion: object = 1.0
    equation_coeffs: tuple = (0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "bcs", tuple(self.bcs))
        diff = np.atleast_1d(np.asarray(self.diffusion, dtype=float))
        if diff.size == 1:
            diff = np.full(self.box.ndim, diff[0])
        if diff.size != self.box.ndim:
            raise GeometryError(f"need {self.box.ndim} diffusion coefficients")
        if np.any(diff <= 0):
            raise NonPositiveError(f"diffusion coefficients must be positive: {diff}")
        object.__setattr__(self, "diffusion", tuple(diff))
        if not any(bc.kind in (DIRICHLET, ROBIN) for bc in self.bcs):
            raise SingularSystemError(
                "pure-Neumann problem has no unique solution; add a Dirichlet "
                "or Robin condition")


@dataclass(frozen=True)
class MaterialStack:
    """Two stacked boxes with different isotropic conductivities.

    The upper box must sit exactly on the lower box's top face with its
    footprint inside that face.
    """

    lower: Box
    upper: Box
    eps_lower: float
    eps_upper: float

    def __post_init__(self):
        if self.lower.ndim != 3 or self.upper.ndim != 3:
            raise GeometryError("material stacks are 3D")
        if self.eps_lower <= 0 or self.eps_upper <= 0:
            raise NonPositiveError("conductivities must be positive")
        if abs(self.upper.lo[2] - self.lower.hi[2]) > 1e-12:
            raise GeometryError("upper box must rest on the lower box's top face")
        for k in (0, 1):
            if self.upper.lo[k] < self.lower.lo[k] - 1e-12 \
                    or self.upper.hi[k] > self.lower.hi[k] + 1e-12:
                raise GeometryError("upper footprint exceeds the lower top face")

    @classmethod
    def from_placement(cls, lower_size, upper_size, placement, eps_lower, eps_upper):
        """Build a stack from edge lengths and the (x, y) placement offset."""
        lx, ly, lz = (float(v) for v in lower_size)
        ux, uy, uz = (float(v) for v in upper_size)
        px, py = (float(v) for v in placement)
        lower = Box((0, 0, 0), (lx, ly, lz))
        upper = Box((px, py, lz), (px + ux, py + uy, lz + uz))
        return cls(lower, upper, eps_lower, eps_upper)

    @property
    def interface_patch(self) -> Box:
        return self.upper.face(2, 0)


# -- assembly ------------------------------------------------------------------


@dataclass
class _Part:
    label: str
    grid: StructuredGrid
    diffusion: np.ndarray
    rhs: np.ndarray
    bcs: list


@dataclass
class SolveInfo:
    """Assembled operator plus bookkeeping for discrete flux accounting.

    ``operator``/``rhs_vector`` are the unconstrained system (before
    Dirichlet pinning); for a converged solution the residual of a pinned
    node equals the discrete outward flux through the Dirichlet part of its
    control-volume boundary, which is what :meth:`dirichlet_face_flux`
    sums.  Fluxes computed this way balance the source integral to solver
    precision.
    """

    parts: dict
    node_maps: dict
    operator: sp.csr_matrix
    rhs_vector: np.ndarray
    solution: np.ndarray = None
    source_integral: float = 0.0
    _robin_terms: dict = field(default_factory=dict)
    residual: float = 0.0

    def part_field(self, label: str) -> Field:
        part = self.parts[label]
        return Field(part.grid, self.solution[self.node_maps[label]])

    def dirichlet_face_flux(self, label: str, axis: int, side: int) -> float:
        """Discrete outward flux through a Dirichlet face of one part."""
        part = self.parts[label]
        flat, _ = part.grid.face_node_indices(axis, side)
        gids = self.node_maps[label][flat]
        res = self.operator @ self.solution - self.rhs_vector
        return float(np.sum(res[gids]))

    def robin_face_flux(self, label: str, axis: int, side: int) -> float:
        """Discrete outward flux through a Robin face: c*(g - alpha*u)/beta."""
        total = 0.0
        for (lbl, ax, sd), (gids, coef, const) in self._robin_terms.items():
            if (lbl, ax, sd) == (label, axis, side):
                total += float(np.sum(const - coef * self.solution[gids]))
        return total


def _cv_widths(grid: StructuredGrid):
    """Per-axis control-volume widths: h/2 at the ends, h inside."""
    widths = []
    for k in range(grid.ndim):
        h = grid.spacing[k]
        w = np.full(grid.n[k], h)
        w[0] = w[-1] = h / 2
        widths.append(w)
    return widths


def _outer_product(arrays) -> np.ndarray:
    out = arrays[0]
    for a in arrays[1:]:
        out = np.multiply.outer(out, a)
    return np.ascontiguousarray(out)


def _eval_face_data(data, points):
    m = points.shape[0]
    if isinstance(data, FaceTrace):
        if data.points.shape != points.shape \
                or np.max(np.abs(data.points - points)) > 1e-9:
            raise GridMismatchError("trace points do not coincide with the face nodes")
        return data.values
    if callable(data):
        values = np.asarray(data(points), dtype=float).ravel()
    else:
        values = np.asarray(data, dtype=float).ravel()
        if values.size == 1:
            values = np.full(m, values[0])
    if values.size != m:
        raise GeometryError(f"boundary data has {values.size} values for {m} face nodes")
    return values


def _patch_overlap_areas(grid: StructuredGrid, axis: int, side: int, patch: Box):
    """Per-face-node overlap area of the node's CV face with a patch.

    Returns (flat_indices, coords, areas) over the entire face; nodes whose
    control volume does not touch the patch get zero area.
    """
    flat, coords = grid.face_node_indices(axis, side)
    areas = np.ones(flat.size)
    for j in range(grid.ndim):
        if j == axis:
            continue
        h = grid.spacing[j]
        lo_cv = np.maximum(coords[:, j] - h / 2, grid.box.lo[j])
        hi_cv = np.minimum(coords[:, j] + h / 2, grid.box.hi[j])
        overlap = np.minimum(hi_cv, patch.hi[j]) - np.maximum(lo_cv, patch.lo[j])
        areas = areas * np.maximum(overlap, 0.0)
    return flat, coords, areas


def _nodes_in_patch(coords, patch: Box, tol: float):
    return np.all((coords >= np.asarray(patch.lo) - tol)
                  & (coords <= np.asarray(patch.hi) + tol), axis=1)


class _Assembler:
    def __init__(self, parts, interfaces):
        self.parts = {p.label: p for p in parts}
        self.interfaces = list(interfaces)
        self._assign_global_ids()
        self.rows, self.cols, self.vals = [], [], []
        self.diag = np.zeros(self.n_global)
        self.b = np.zeros(self.n_global)
        self.dirichlet = {}
        self.coverage = {}
        self.robin_terms = {}
        self.source_integral = 0.0
        self.spd = True

    # node identification -----------------------------------------------------

    def _assign_global_ids(self):
        self.node_maps = {}
        next_id = 0
        order = list(self.parts)
        for label in order:
            self.node_maps[label] = np.full(self.parts[label].grid.num_nodes, -1,
                                            dtype=np.int64)
        for iface in self.interfaces:
            if iface.owner_a not in self.parts or iface.owner_b not in self.parts:
                continue
            fa, ca = self._face_nodes_on(iface.owner_a, iface.patch)
            fb, cb = self._face_nodes_on(iface.owner_b, iface.patch)
            if fa.size != fb.size or np.max(np.abs(ca - cb)) > 1e-9:
                raise GridMismatchError(
                    f"interface nodes of {iface.owner_a} and {iface.owner_b} do not "
                    "coincide on their shared patch")
        for label in order:
            amap = self.node_maps[label]
            for iface in self.interfaces:
                pair = {iface.owner_a: iface.owner_b, iface.owner_b: iface.owner_a}
                if label not in pair or pair[label] not in self.parts:
                    continue
                other = pair[label]
                if list(self.parts).index(other) >= list(self.parts).index(label):
                    continue
                fa, _ = self._face_nodes_on(label, iface.patch)
                fb, _ = self._face_nodes_on(other, iface.patch)
                amap[fa] = self.node_maps[other][fb]
            fresh = amap < 0
            amap[fresh] = next_id + np.arange(int(np.sum(fresh)))
            next_id += int(np.sum(fresh))
        self.n_global = next_id

    def _face_nodes_on(self, label, patch):
        part = self.parts[label]
        axis, side = part.grid.box.face_of(patch)
        flat, coords = part.grid.face_node_indices(axis, side, patch)
        return flat, coords

    # volume terms ---------------------------------------------------------------

    def add_volume_terms(self):
        for label, part in self.parts.items():
            grid = part.grid
            gmap = self.node_maps[label]
            widths = _cv_widths(grid)
            volumes = _outer_product(widths).ravel()
            np.add.at(self.b, gmap, part.rhs * volumes)
            self.source_integral += float(np.sum(part.rhs * volumes))
            flat_all = np.arange(grid.num_nodes).reshape(grid.n)
            vn = volumes.reshape(grid.n)
            for k in range(grid.ndim):
                h = grid.spacing[k]
                shape = [1] * grid.ndim
                shape[k] = grid.n[k]
                transverse = vn / widths[k].reshape(shape)
                sel_lo = [slice(None)] * grid.ndim
                sel_lo[k] = slice(0, grid.n[k] - 1)
                sel_hi = [slice(None)] * grid.ndim
                sel_hi[k] = slice(1, grid.n[k])
                lo = gmap[flat_all[tuple(sel_lo)].ravel()]
                hi = gmap[flat_all[tuple(sel_hi)].ravel()]
                g = part.diffusion[k] / h * transverse[tuple(sel_lo)].ravel()
                self.rows.append(lo)
                self.cols.append(hi)
                self.vals.append(-g)
                self.rows.append(hi)
                self.cols.append(lo)
                self.vals.append(-g)
                np.add.at(self.diag, lo, g)
                np.add.at(self.diag, hi, g)

    # boundary terms ----------------------------------------------------------------

    def _coverage_key(self, label, axis, side):
        return (label, axis, side)

    def _face_area_targets(self, label, axis, side):
        part = self.parts[label]
        grid = part.grid
        key = self._coverage_key(label, axis, side)
        if key not in self.coverage:
            full = grid.box.face(axis, side)
            _, _, areas = _patch_overlap_areas(grid, axis, side, full)
            self.coverage[key] = [areas, np.zeros_like(areas)]
        return self.coverage[key]

    def add_interface_coverage(self):
        for iface in self.interfaces:
            for label in (iface.owner_a, iface.owner_b):
                if label not in self.parts:
                    continue
                part = self.parts[label]
                try:
                    axis, side = part.grid.box.face_of(iface.patch)
                except GeometryError:
                    continue
                _, _, areas = _patch_overlap_areas(part.grid, axis, side, iface.patch)
                self._face_area_targets(label, axis, side)[1] += areas

    def add_boundary_conditions(self):
        for label, part in self.parts.items():
            grid = part.grid
            gmap = self.node_maps[label]
            for bc in part.bcs:
                axis, side = bc.face
                patch = bc.patch if bc.patch is not None else grid.box.face(axis, side)
                grid.box.face_of(patch)  # validates flushness
                flat, coords, areas = _patch_overlap_areas(grid, axis, side, patch)
                target = self._face_area_targets(label, axis, side)
                c = part.diffusion[axis]
                tol = max(1e-12, float(np.max(grid.spacing)) * 1e-9)
                inside = _nodes_in_patch(coords, patch, tol)
                if bc.kind == DIRICHLET:
                    values = _eval_face_data(bc.data, coords[inside])
                    for gid, v in zip(gmap[flat[inside]], values):
                        self.dirichlet[int(gid)] = float(v)
                    target[1] += areas
                    continue
                active = areas > 0
                values = _eval_face_data(bc.data, coords)[active]
                gids = gmap[flat[active]]
                act_areas = areas[active]
                if bc.kind == NEUMANN:
                    np.add.at(self.b, gids, c * values * act_areas)
                    self.robin_terms.setdefault((label, axis, side), []).append(
                        (gids, np.zeros_like(act_areas), c * values * act_areas))
                else:  # Robin
                    if bc.robin_beta == 0.0:
                        for gid, v in zip(gmap[flat[inside]],
                                          _eval_face_data(bc.data, coords[inside])):
                            self.dirichlet[int(gid)] = float(v) / bc.robin_alpha
                        target[1] += areas
                        continue
                    coef = c * bc.robin_alpha / bc.robin_beta * act_areas
                    const = c * values / bc.robin_beta * act_areas
                    np.add.at(self.diag, gids, coef)
                    np.add.at(self.b, gids, const)
                    self.robin_terms.setdefault((label, axis, side), []).append(
                        (gids, coef, const))
                    if bc.robin_alpha / bc.robin_beta < 0:
                        self.spd = False
                target[1] += areas

    def check_coverage(self):
        for label, part in self.parts.items():
            for axis in range(part.grid.ndim):
                for side in (0, 1):
                    full, covered = self._face_area_targets(label, axis, side)
                    rel = np.abs(covered - full) / np.max(full)
                    if np.any(rel > 1e-9):
                        state = "not fully" if np.any(covered < full) else "more than once"
                        raise GeometryError(
                            f"face (axis={axis}, side={side}) of part {label!r} is "
                            f"covered {state} by boundary conditions/interfaces")

    # finishing ---------------------------------------------------------------------

    def build(self) -> SolveInfo:
        self.add_volume_terms()
        self.add_interface_coverage()
        self.add_boundary_conditions()
        self.check_coverage()
        all_ids = np.arange(self.n_global)
        rows = np.concatenate(self.rows + [all_ids])
        cols = np.concatenate(self.cols + [all_ids])
        vals = np.concatenate(self.vals + [self.diag])
        A0 = sp.coo_matrix((vals, (rows, cols)),
                           shape=(self.n_global, self.n_global)).tocsr()
        robin = {}
        for key, contribs in self.robin_terms.items():
            gids = np.concatenate([g for g, _, _ in contribs])
            coefs = np.concatenate([c for _, c, _ in contribs])
            consts = np.concatenate([v for _, _, v in contribs])
            robin[key] = (gids, coefs, consts)
        return SolveInfo(parts=self.parts, node_maps=self.node_maps, operator=A0,
                         rhs_vector=self.b.copy(), source_integral=self.source_integral,
                         _robin_terms=robin)


def _apply_dirichlet(A: sp.csr_matrix, b: np.ndarray, dirichlet: dict):
    if not dirichlet:
        return A, b
    n = A.shape[0]
    idx = np.fromiter(dirichlet.keys(), dtype=np.int64)
    vals = np.fromiter((dirichlet[int(i)] for i in idx), dtype=float)
    x0 = np.zeros(n)
    x0[idx] = vals
    b = b - A @ x0
    keep = np.ones(n)
    keep[idx] = 0.0
    D = sp.diags(keep)
    A = D @ A @ D + sp.diags(1.0 - keep)
    b[idx] = vals
    return A.tocsr(), b


def _solve_linear(A: sp.csr_matrix, b: np.ndarray, tol: float, spd: bool,
                  direct_limit: int) -> tuple:
    n = A.shape[0]
    if n <= direct_limit or not spd:
        lu = spla.splu(A.tocsc())
        x = lu.solve(b)
    else:
        import pyamg

        ml = pyamg.smoothed_aggregation_solver(A.tocsr())
        M = ml.aspreconditioner(cycle="V")
        x, code = spla.cg(A, b, rtol=min(tol, 1e-12), atol=0.0,
                          maxiter=10 * int(np.sqrt(n)) + 200, M=M)
        if code != 0:
            res = float(np.linalg.norm(A @ x - b) / max(np.linalg.norm(b), 1e-300))
            raise ConvergenceError(
                f"conjugate gradients stalled (code {code}), relative residual {res:.3e}",
                residual=res)
    bnorm = float(np.linalg.norm(b))
    res = float(np.linalg.norm(A @ x - b) / max(bnorm, 1e-300))
    if res > tol:
        raise ConvergenceError(f"linear solve residual {res:.3e} exceeds {tol:.1e}",
                               residual=res)
    return x, res


def solve_composite(parts, interfaces, tol: float = RESIDUAL_TOL,
                    direct_limit: int = DIRECT_SOLVE_LIMIT) -> SolveInfo:
    """Assemble and solve a monolithic composite problem; low-level entry."""
    asm = _Assembler(parts, interfaces)
    info = asm.build()
    if not asm.dirichlet and all(c.size == 0 or np.all(c == 0)
                                 for _, c, _ in info._robin_terms.values()):
        raise SingularSystemError("no Dirichlet or Robin condition anchors the solution")
    A, b = _apply_dirichlet(info.operator, info.rhs_vector, asm.dirichlet)
    x, res = _solve_linear(A, b, tol, asm.spd, direct_limit)
    info.solution = x
    info.residual = res
    for label in info.parts:
        info.part_field(label).assert_finite()
    return info


def _rhs_values(rhs, grid: StructuredGrid) -> np.ndarray:
    if isinstance(rhs, Field):
        if rhs.grid == grid:
            return rhs.values
        from .grids import interpolate

        return interpolate(rhs, grid.node_coords())
    if callable(rhs):
        return np.asarray(rhs(grid.node_coords()), dtype=float).ravel()
    arr = np.asarray(rhs, dtype=float).ravel()
    if arr.size == 1:
        return np.full(grid.num_nodes, arr[0])
    if arr.size != grid.num_nodes:
        raise GeometryError("rhs array does not match the grid")
    return arr


def solve_elliptic(problem: PdeProblem, grid_n, tol: float = RESIDUAL_TOL,
                   direct_limit: int = DIRECT_SOLVE_LIMIT,
                   return_info: bool = False):
    """Solve one elliptic box problem; returns the nodal Field."""
    grid = StructuredGrid(problem.box, tuple(grid_n))
    part = _Part(label="domain", grid=grid,
                 diffusion=np.asarray(problem.diffusion),
                 rhs=_rhs_values(problem.rhs, grid), bcs=list(problem.bcs))
    info = solve_composite([part], [], tol=tol, direct_limit=direct_limit)
    fld = info.part_field("domain")
    return (fld, info) if return_info else fld


def frame_patches(face: Box, inner: Box):
    """Decompose ``face - inner`` into up to four rectangular strips."""
    axes = [k for k in range(face.ndim) if face.hi[k] > face.lo[k]]
    if len(axes) != 2:
        raise GeometryError("frame decomposition needs a 2D face patch")
    a, bx = axes
    strips = []

    def strip(lo_a, hi_a, lo_b, hi_b):
        if hi_a - lo_a <= 0 or hi_b - lo_b <= 0:
            return
        lo = list(face.lo)
        hi = list(face.hi)
        lo[a], hi[a] = lo_a, hi_a
        lo[bx], hi[bx] = lo_b, hi_b
        strips.append(Box(tuple(lo), tuple(hi)))

    strip(face.lo[a], inner.lo[a], face.lo[bx], face.hi[bx])
    strip(inner.hi[a], face.hi[a], face.lo[bx], face.hi[bx])
    strip(inner.lo[a], inner.hi[a], face.lo[bx], inner.lo[bx])
    strip(inner.lo[a], inner.hi[a], inner.hi[bx], face.hi[bx])
    return strips


def solve_multimedium(stack: MaterialStack, grid_n_lower, grid_n_upper,
                      tol: float = RESIDUAL_TOL,
                      direct_limit: int = DIRECT_SOLVE_LIMIT,
                      return_info: bool = False):
    """Monolithic solve of the two-layer source problem.

    Equation ``-eps_i * lap(u) = 1`` in each layer with u = 1 on the top of
    the upper box, ``eps1 * du/dn = 1 - u`` on the bottom of the lower box,
    insulated side faces, and continuity of value and conductive flux at
    the shared patch.  Returns (lower Field, upper Field).
    """
    grid_lo = StructuredGrid(stack.lower, tuple(grid_n_lower))
    grid_up = StructuredGrid(stack.upper, tuple(grid_n_upper))
    iface = Interface("upper", "lower", stack.interface_patch, 2, -1)

    bcs_lower = [BoundaryCondition((2, 0), ROBIN, data=1.0,
                                   robin_alpha=1.0, robin_beta=stack.eps_lower)]
    for axis in (0, 1):
        for side in (0, 1):
            bcs_lower.append(BoundaryCondition((axis, side), NEUMANN, 0.0))
    top = stack.lower.face(2, 1)
    for strippatch in frame_patches(top, stack.interface_patch):
        bcs_lower.append(BoundaryCondition((2, 1), NEUMANN, 0.0, patch=strippatch))

    bcs_upper = [BoundaryCondition((2, 1), DIRICHLET, 1.0)]
    for axis in (0, 1):
        for side in (0, 1):
            bcs_upper.append(BoundaryCondition((axis, side), NEUMANN, 0.0))

    parts = [
        _Part("lower", grid_lo, np.full(3, float(stack.eps_lower)),
              np.ones(grid_lo.num_nodes), bcs_lower),
        _Part("upper", grid_up, np.full(3, float(stack.eps_upper)),
              np.ones(grid_up.num_nodes), bcs_upper),
    ]
    info = solve_composite(parts, [iface], tol=tol, direct_limit=direct_limit)
    fields = (info.part_field("lower"), info.part_field("upper"))
    return (fields, info) if return_info else fields


def _port_on_exterior_face(geometry: CompositeGeometry, port: Box):
    """Locate a port patch: returns (label, axis, side) or raises PortError."""
    for label, box in zip(geometry.labels, geometry.boxes):
        try:
            axis, side = box.face_of(port)
        except GeometryError:
            continue
        for iface in geometry.interfaces:
            cap = port.intersection(iface.patch)
            if cap is not None and _positive_area(cap):
                raise PortError(f"port {port} overlaps interior interface {iface.patch}")
        return label, axis, side
    raise PortError(f"port {port} does not lie on any box face of the geometry")


def _positive_area(patch: Box) -> bool:
    lengths = patch.lengths
    return bool(np.all(lengths[lengths > 0] > 0)) and np.sum(lengths > 0) == patch.ndim - 1


def solve_resistance_potential(geometry: CompositeGeometry, in_port: Box, out_port: Box,
                               sigma: float, grid_n, tol: float = RESIDUAL_TOL,
                               direct_limit: int = DIRECT_SOLVE_LIMIT,
                               return_info: bool = False):
    """Electrostatic potential for port-to-port conduction.

    Laplace over the composite domain with u = 1 on the inlet port, u = 0
    on the outlet port and insulated surfaces elsewhere.  ``grid_n`` maps
    each box label to its node counts.  ``sigma`` only scales the later
    flux integration, not the potential, but must be positive.
    Returns one Field per box, in geometry label order.
    """
    if sigma <= 0:
        raise NonPositiveError(f"conductivity must be positive, got {sigma}")
    port_info = {"in": _port_on_exterior_face(geometry, in_port),
                 "out": _port_on_exterior_face(geometry, out_port)}
    parts = []
    for label, box in zip(geometry.labels, geometry.boxes):
        grid = StructuredGrid(box, tuple(grid_n[label]))
        bcs = []
        for axis in range(box.ndim):
            for side in (0, 1):
                face = box.face(axis, side)
                covered = []
                for iface in geometry.interfaces:
                    if label in (iface.owner_a, iface.owner_b):
                        try:
                            if box.face_of(iface.patch) == (axis, side):
                                covered.append(iface.patch)
                        except GeometryError:
                            pass
                for name, (plabel, paxis, pside) in port_info.items():
                    if (plabel, paxis, pside) == (label, axis, side):
                        port = in_port if name == "in" else out_port
                        bcs.append(BoundaryCondition((axis, side), DIRICHLET,
                                                     1.0 if name == "in" else 0.0,
                                                     patch=port))
                        covered.append(port)
                if not covered:
                    bcs.append(BoundaryCondition((axis, side), NEUMANN, 0.0))
                elif len(covered) == 1 and not _boxes_same(covered[0], face):
                    for strippatch in frame_patches(face, covered[0]):
                        bcs.append(BoundaryCondition((axis, side), NEUMANN, 0.0,
                                                     patch=strippatch))
        parts.append(_Part(label, grid, np.ones(box.ndim), np.zeros(grid.num_nodes), bcs))
    info = solve_composite(parts, geometry.interfaces, tol=tol, direct_limit=direct_limit)
    fields = [info.part_field(label) for label in geometry.labels]
    return (fields, info) if return_info else fields


def _boxes_same(a: Box, b: Box) -> bool:
    return (np.allclose(a.lo, b.lo, atol=1e-12, rtol=0)
            and np.allclose(a.hi, b.hi, atol=1e-12, rtol=0))
