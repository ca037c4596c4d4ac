"""Axis-aligned box geometry: composite domains, partitions, interfaces.

All domains handled by this package are unions of axis-aligned boxes
(rectangles in 2D, cuboids in 3D) glued along full shared faces.  This
module provides the box primitives, overlapping and non-overlapping
partitions, the canonical L- and T-shape decompositions, and the affine
stretching maps that normalize a box to the unit box.

Everything here is immutable and pure.

L-shape parameterization (top view, z spans [0, h])::

          +--------+
          |        |
          |  arm_y |  l2
          |        |
   +------+--------+----------------------+
   |corner|        arm_x                  |  w1
   +------+-------------------------------+
      w2              l1 + l3

    corner: [0,w2] x [0,w1]        arm_x: [w2, w2+l1+l3] x [0,w1]
    arm_y:  [0,w2] x [w1, w1+l2]

T-shape parameterization (4 boxes; same parameter names)::

                  +--------+
                  | stem   |  l2
                  |        |
   +--------------+--------+--------------+
   |   bar_left   |junction|  bar_right   |  w1
   +--------------+--------+--------------+
         l1           w2         l3

    bar_left: [0,l1] x [0,w1]   junction: [l1, l1+w2] x [0,w1]
    bar_right: [l1+w2, l1+w2+l3] x [0,w1]
    stem: [l1, l1+w2] x [w1, w1+l2]
"""

from __future__ import annotations

import itertools
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError, NonPositiveError, OrderingError, RangeError

#: Tolerance for coincidence checks on coordinates.
COORD_TOL = 1e-12

L_SHAPE_RANGES = {"h": (1, 3), "w1": (1, 3), "w2": (1, 3),
                  "l1": (4, 6), "l2": (5, 8), "l3": (2, 5)}


@dataclass(frozen=True)
class Box:
    """Axis-aligned box ``[lo, hi]`` in 1, 2 or 3 dimensions.

    A solid box has strictly positive extent on every axis.  A box with
    zero extent on exactly one axis is a *face patch* and is used to
    describe interfaces and boundary patches; it is not a valid solve
    domain.
    """

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo = tuple(float(v) for v in self.lo)
        hi = tuple(float(v) for v in self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if len(lo) != len(hi):
            raise GeometryError(f"lo and hi have different lengths: {len(lo)} vs {len(hi)}")
        if not 1 <= len(lo) <= 3:
            raise GeometryError(f"boxes must be 1-, 2- or 3-dimensional, got d={len(lo)}")
        degenerate = [k for k in range(len(lo)) if hi[k] == lo[k]]
        bad = [k for k in range(len(lo)) if hi[k] < lo[k]]
        if bad:
            raise OrderingError(f"hi < lo on axis {bad[0]}: {lo} .. {hi}")
        if len(degenerate) > 1:
            raise GeometryError(
                f"zero extent on axes {degenerate}; only a single degenerate axis "
                "(a face patch) is allowed")

    @property
    def ndim(self) -> int:
        return len(self.lo)

    @property
    def lengths(self) -> np.ndarray:
        return np.asarray(self.hi) - np.asarray(self.lo)

    @property
    def volume(self) -> float:
        return float(np.prod(self.lengths))

    @property
    def is_patch(self) -> bool:
        """True when exactly one axis has zero extent."""
        return any(h == l for l, h in zip(self.lo, self.hi))

    @property
    def patch_axis(self) -> int:
        """The degenerate axis of a face patch."""
        for k in range(self.ndim):
            if self.hi[k] == self.lo[k]:
                return k
        raise GeometryError("box is solid, not a face patch")

    def contains(self, point, tol: float = COORD_TOL) -> bool:
        p = np.asarray(point, dtype=float)
        return bool(np.all(p >= np.asarray(self.lo) - tol)
                    and np.all(p <= np.asarray(self.hi) + tol))

    def contains_box(self, other: "Box", tol: float = COORD_TOL) -> bool:
        return (self.contains(other.lo, tol) and self.contains(other.hi, tol))

    def intersection(self, other: "Box"):
        """Intersection box, or None when interiors/faces do not meet."""
        lo = np.maximum(self.lo, other.lo)
        hi = np.minimum(self.hi, other.hi)
        if np.any(hi < lo):
            return None
        if np.sum(hi == lo) > 1:
            return None  # meets only along an edge or corner
        return Box(tuple(lo), tuple(hi))

    def face(self, axis: int, side: int) -> "Box":
        """Face patch of this box: ``side`` is 0 for the lo face, 1 for hi."""
        if not 0 <= axis < self.ndim:
            raise GeometryError(f"axis {axis} out of range for d={self.ndim}")
        coord = self.hi[axis] if side else self.lo[axis]
        lo = list(self.lo)
        hi = list(self.hi)
        lo[axis] = hi[axis] = coord
        return Box(tuple(lo), tuple(hi))

    def face_of(self, patch: "Box", tol: float = COORD_TOL):
        """Locate ``patch`` on this box's boundary: returns (axis, side).

        The patch must be flush with one of the box faces and contained in
        it; raises GeometryError otherwise.
        """
        axis = patch.patch_axis
        coord = patch.lo[axis]
        for side, ref in ((0, self.lo[axis]), (1, self.hi[axis])):
            if abs(coord - ref) <= tol and self.contains_box(patch, tol):
                return axis, side
        raise GeometryError(f"patch {patch} does not lie on a face of {self}")


@dataclass(frozen=True)
class Interface:
    """A face patch through which two subdomains exchange data.

    ``patch`` lies on a face of ``owner_a`` and inside the closure of
    ``owner_b``.  ``orientation_from_a`` is the sign of owner_a's outward
    normal along ``normal_axis`` on this patch.
    """

    owner_a: str
    owner_b: str
    patch: Box
    normal_axis: int
    orientation_from_a: int

    def __post_init__(self):
        if not self.patch.is_patch:
            raise GeometryError("interface patch must have zero extent on one axis")
        if self.patch.patch_axis != self.normal_axis:
            raise GeometryError(
                f"normal_axis {self.normal_axis} does not match the patch's "
                f"degenerate axis {self.patch.patch_axis}")
        if self.orientation_from_a not in (-1, 1):
            raise GeometryError("orientation_from_a must be +1 or -1")

    def flipped(self) -> "Interface":
        """The same patch viewed from owner_b's side."""
        return Interface(self.owner_b, self.owner_a, self.patch,
                         self.normal_axis, -self.orientation_from_a)


@dataclass(frozen=True)
class AffineMap:
    """Per-axis affine map ``y = scale * x + shift`` with positive scales."""

    scale: tuple
    shift: tuple

    def __post_init__(self):
        scale = tuple(float(v) for v in self.scale)
        shift = tuple(float(v) for v in self.shift)
        object.__setattr__(self, "scale", scale)
        object.__setattr__(self, "shift", shift)
        if len(scale) != len(shift):
            raise GeometryError("scale and shift lengths differ")
        if any(s <= 0 for s in scale):
            raise NonPositiveError(f"scales must be positive, got {scale}")

    @classmethod
    def identity(cls, ndim: int) -> "AffineMap":
        return cls((1.0,) * ndim, (0.0,) * ndim)

    def apply(self, points):
        pts = np.asarray(points, dtype=float)
        return pts * np.asarray(self.scale) + np.asarray(self.shift)

    def apply_box(self, box: Box) -> Box:
        return Box(tuple(self.apply(box.lo)), tuple(self.apply(box.hi)))

    def inverse(self) -> "AffineMap":
        inv_scale = tuple(1.0 / s for s in self.scale)
        inv_shift = tuple(-b / s for s, b in zip(self.scale, self.shift))
        return AffineMap(inv_scale, inv_shift)

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """Map equal to applying ``inner`` first, then this map."""
        scale = tuple(a * b for a, b in zip(self.scale, inner.scale))
        shift = tuple(a * t + b for a, t, b in zip(self.scale, inner.shift, self.shift))
        return AffineMap(scale, shift)


@dataclass(frozen=True)
class CompositeGeometry:
    """A connected union of labeled boxes glued along full shared faces."""

    boxes: tuple
    labels: tuple
    interfaces: tuple = field(default=())

    def __post_init__(self):
        boxes = tuple(self.boxes)
        labels = tuple(self.labels)
        object.__setattr__(self, "boxes", boxes)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "interfaces", tuple(self.interfaces))
        if len(boxes) != len(labels):
            raise GeometryError("one label per box required")
        if len(set(labels)) != len(labels):
            raise GeometryError(f"duplicate labels in {labels}")
        if not boxes:
            raise GeometryError("empty geometry")
        if any(b.is_patch for b in boxes):
            raise GeometryError("composite members must be solid boxes")
        if not _is_connected(boxes):
            raise GeometryError("union of boxes is not connected")

    def box(self, label: str) -> Box:
        return self.boxes[self.labels.index(label)]

    @property
    def volume(self) -> float:
        return sum(b.volume for b in self.boxes)


def _is_connected(boxes) -> bool:
    n = len(boxes)
    adj = {i: set() for i in range(n)}
    for i, j in itertools.combinations(range(n), 2):
        cap = boxes[i].intersection(boxes[j])
        if cap is None:
            continue
        # positive-volume overlap, or a face contact of positive area
        if not cap.is_patch or _patch_measure(cap) > 0.0:
            adj[i].add(j)
            adj[j].add(i)
    seen = {0}
    stack = [0]
    while stack:
        for j in adj[stack.pop()]:
            if j not in seen:
                seen.add(j)
                stack.append(j)
    return len(seen) == n


def _patch_measure(patch: Box) -> float:
    lengths = patch.lengths
    return float(np.prod(lengths[lengths > 0])) if patch.ndim > 1 else 1.0


def shared_face(a: Box, b: Box, tol: float = COORD_TOL):
    """Full shared face between two face-matched boxes, or None.

    Neighboring boxes must touch along an entire face of at least one of
    them; partial-face contact is rejected with GeometryError.
    """
    cap = a.intersection(b)
    if cap is None or not cap.is_patch:
        return None
    axis = cap.patch_axis
    if _patch_measure(cap) == 0.0:
        return None
    face_a = a.face(axis, 1 if abs(a.hi[axis] - cap.lo[axis]) <= tol else 0)
    face_b = b.face(axis, 1 if abs(b.hi[axis] - cap.lo[axis]) <= tol else 0)
    if not (_boxes_equal(cap, face_a, tol) or _boxes_equal(cap, face_b, tol)):
        raise GeometryError(
            f"boxes touch on a partial face {cap}; only full shared faces are supported")
    return cap


def _boxes_equal(a: Box, b: Box, tol: float = COORD_TOL) -> bool:
    return (np.allclose(a.lo, b.lo, atol=tol, rtol=0)
            and np.allclose(a.hi, b.hi, atol=tol, rtol=0))


def make_overlap_partition(domain: Box, axis: int, cut_lo: float, cut_hi: float):
    """Split ``domain`` into two overlapping boxes along ``axis``.

    Subdomain A spans up to ``cut_hi``, subdomain B starts at ``cut_lo``;
    the strip between the cuts is shared.  Returns ``(box_a, box_b,
    interfaces)`` where the first interface is A's fictitious boundary at
    ``cut_hi`` (a plane interior to B) and the second is B's at ``cut_lo``.
    """
    if not 0 <= axis < domain.ndim:
        raise RangeError(f"axis {axis} out of range for d={domain.ndim}")
    if cut_lo >= cut_hi:
        raise OrderingError(f"cut_lo must be below cut_hi, got {cut_lo} >= {cut_hi}")
    if not (domain.lo[axis] < cut_lo and cut_hi < domain.hi[axis]):
        raise RangeError(
            f"cuts ({cut_lo}, {cut_hi}) must fall strictly inside "
            f"[{domain.lo[axis]}, {domain.hi[axis]}] on axis {axis}")
    hi_a = list(domain.hi)
    hi_a[axis] = cut_hi
    lo_b = list(domain.lo)
    lo_b[axis] = cut_lo
    box_a = Box(domain.lo, tuple(hi_a))
    box_b = Box(tuple(lo_b), domain.hi)
    iface_a = Interface("A", "B", box_a.face(axis, 1), axis, +1)
    iface_b = Interface("B", "A", box_b.face(axis, 0), axis, -1)
    return box_a, box_b, [iface_a, iface_b]


def make_nonoverlap_partition(domain: Box, axis: int, cuts):
    """Tile ``domain`` into ``len(cuts)+1`` boxes along ``axis``.

    Returns ``(boxes, interfaces)``; interface i sits between boxes i and
    i+1 and is owned by both neighbors (owner_a is the lower box).
    Labels are "S0", "S1", ... in ascending order along the axis.
    """
    if not 0 <= axis < domain.ndim:
        raise RangeError(f"axis {axis} out of range for d={domain.ndim}")
    cuts = [float(c) for c in cuts]
    for a, b in zip(cuts, cuts[1:]):
        if a >= b:
            raise OrderingError(f"cuts must be strictly ascending, got {cuts}")
    for c in cuts:
        if not domain.lo[axis] < c < domain.hi[axis]:
            raise RangeError(
                f"cut {c} outside ({domain.lo[axis]}, {domain.hi[axis]}) on axis {axis}")
    edges = [domain.lo[axis]] + cuts + [domain.hi[axis]]
    boxes = []
    for a, b in zip(edges, edges[1:]):
        lo = list(domain.lo)
        hi = list(domain.hi)
        lo[axis], hi[axis] = a, b
        boxes.append(Box(tuple(lo), tuple(hi)))
    interfaces = [
        Interface(f"S{i}", f"S{i + 1}", boxes[i].face(axis, 1), axis, +1)
        for i in range(len(boxes) - 1)
    ]
    return boxes, interfaces


def _check_shape_params(params: dict):
    for name, value in params.items():
        if value <= 0:
            raise NonPositiveError(f"shape parameter {name} must be positive, got {value}")
    outside = [name for name, value in params.items()
               if not L_SHAPE_RANGES[name][0] <= value <= L_SHAPE_RANGES[name][1]]
    if outside:
        warnings.warn(
            f"shape parameters outside their usual ranges: "
            + ", ".join(f"{n}={params[n]} (range {L_SHAPE_RANGES[n]})" for n in outside),
            stacklevel=3)


def _register_interfaces(boxes, labels):
    interfaces = []
    for (i, j) in itertools.combinations(range(len(boxes)), 2):
        patch = shared_face(boxes[i], boxes[j])
        if patch is None:
            continue
        axis = patch.patch_axis
        sign = +1 if abs(boxes[i].hi[axis] - patch.lo[axis]) <= COORD_TOL else -1
        interfaces.append(Interface(labels[i], labels[j], patch, axis, sign))
    return tuple(interfaces)


def decompose_L_shape(h: float, w1: float, w2: float,
                      l1: float, l2: float, l3: float) -> CompositeGeometry:
    """Canonical 3-box L-shape (see the module docstring for the layout).

    The corner box sits at the origin and is adjacent to both arms; the
    x-arm has length ``l1 + l3`` and width ``w1``, the y-arm length ``l2``
    and width ``w2``; everything extrudes to height ``h``.
    """
    _check_shape_params({"h": h, "w1": w1, "w2": w2, "l1": l1, "l2": l2, "l3": l3})
    corner = Box((0, 0, 0), (w2, w1, h))
    arm_x = Box((w2, 0, 0), (w2 + l1 + l3, w1, h))
    arm_y = Box((0, w1, 0), (w2, w1 + l2, h))
    boxes = (corner, arm_x, arm_y)
    labels = ("corner", "arm_x", "arm_y")
    return CompositeGeometry(boxes, labels, _register_interfaces(boxes, labels))


def decompose_T_shape(h: float, w1: float, w2: float,
                      l1: float, l2: float, l3: float) -> CompositeGeometry:
    """Canonical 4-box T-shape: bar arms left/right of a junction plus a stem."""
    _check_shape_params({"h": h, "w1": w1, "w2": w2, "l1": l1, "l2": l2, "l3": l3})
    bar_left = Box((0, 0, 0), (l1, w1, h))
    junction = Box((l1, 0, 0), (l1 + w2, w1, h))
    bar_right = Box((l1 + w2, 0, 0), (l1 + w2 + l3, w1, h))
    stem = Box((l1, w1, 0), (l1 + w2, w1 + l2, h))
    boxes = (bar_left, junction, bar_right, stem)
    labels = ("bar_left", "junction", "bar_right", "stem")
    return CompositeGeometry(boxes, labels, _register_interfaces(boxes, labels))


def stretching_map(box: Box):
    """Affine map of ``box`` onto the unit box plus diffusion coefficients.

    Returns ``(map, coeffs)`` where ``map`` sends the box to ``[0,1]^d``
    and ``coeffs[k] = 1/len_k**2``, so that the Laplacian on the box equals
    ``sum_k coeffs[k] * d2u/dxi_k2`` in unit-box coordinates.
    """
    if box.is_patch:
        raise GeometryError("cannot stretch a face patch")
    lengths = box.lengths
    scale = tuple(1.0 / l for l in lengths)
    shift = tuple(-lo / l for lo, l in zip(box.lo, lengths))
    coeffs = np.asarray([1.0 / l**2 for l in lengths])
    return AffineMap(scale, shift), coeffs
