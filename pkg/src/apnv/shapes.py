"""Product shapes, poseclass enumeration, pose composition and rotation metrics.

A product pose is a (poseclass, yaw) pair: the poseclass says which surface
rests on the ground, the yaw is the rotation about the world z axis. Poseclass
index conventions:

    rectangular prism (6): 0 bottom, 1 top, 2 front, 3 back, 4 right, 5 left
    cylinder (8):          0 base end, 1 top end, 2..7 lying on the side with
                           the contact line at 0/60/.../300 deg from the
                           texture seam
    triangular prism (5):  0/1 triangular ends, 2 base face, 3 right slant,
                           4 left slant

Yaw is measured about world +z, counterclockwise viewed from above. World z
points up; the ground plane is z = 0.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

CYLINDER_SIDE_CLASSES = 6
CYLINDER_SIDE_BIN_DEG = 360.0 / CYLINDER_SIDE_CLASSES

FACE_ROLES = ("front", "back", "side", "top", "bottom")


class ShapeKind(str, Enum):
    RECT_PRISM = "rectangular-prism"
    CYLINDER = "cylinder"
    TRI_PRISM = "triangular-prism"

    @property
    def poseclass_count(self) -> int:
        return {ShapeKind.RECT_PRISM: 6, ShapeKind.CYLINDER: 8, ShapeKind.TRI_PRISM: 5}[self]


@dataclass(frozen=True)
class ProductSpec:
    """One synthetic product: shape kind, physical dimensions, texture seed.

    Dimensions are meters:
        rectangular prism: (width, depth, height)
        cylinder:          (radius, height)
        triangular prism:  (base edge, triangle height, length)
    """

    id: str
    kind: ShapeKind
    dimensions: tuple[float, ...]
    texture_seed: int

    def __post_init__(self):
        n_expected = {ShapeKind.RECT_PRISM: 3, ShapeKind.CYLINDER: 2, ShapeKind.TRI_PRISM: 3}
        if len(self.dimensions) != n_expected[self.kind]:
            raise ValueError(f"{self.kind.value} needs {n_expected[self.kind]} dimensions")
        if any(d <= 0 for d in self.dimensions):
            raise ValueError("all dimensions must be strictly positive")
        object.__setattr__(self, "dimensions", tuple(float(d) for d in self.dimensions))

    def to_json(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "kind": self.kind.value,
                "dimensions": list(self.dimensions),
                "texture-seed": self.texture_seed,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ProductSpec":
        obj = json.loads(text) if isinstance(text, str) else text
        return cls(
            id=obj["id"],
            kind=ShapeKind(obj["kind"]),
            dimensions=tuple(obj["dimensions"]),
            texture_seed=int(obj["texture-seed"]),
        )


@dataclass(frozen=True)
class PoseClass:
    index: int
    kind: ShapeKind

    def __post_init__(self):
        if not 0 <= self.index < self.kind.poseclass_count:
            raise ValueError(
                f"poseclass {self.index} out of range for {self.kind.value} "
                f"({self.kind.poseclass_count} classes)"
            )


@dataclass(frozen=True)
class ObjectPose:
    poseclass: PoseClass
    yaw: float

    def __post_init__(self):
        object.__setattr__(self, "yaw", float(self.yaw) % 360.0)


def enumerate_poseclasses(kind: ShapeKind) -> list[PoseClass]:
    """All grounding surfaces of a shape kind, in index order."""
    return [PoseClass(i, kind) for i in range(kind.poseclass_count)]


# ---------------------------------------------------------------------------
# rotations


def rot_x(deg: float) -> np.ndarray:
    c, s = math.cos(math.radians(deg)), math.sin(math.radians(deg))
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rot_y(deg: float) -> np.ndarray:
    c, s = math.cos(math.radians(deg)), math.sin(math.radians(deg))
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rot_z(deg: float) -> np.ndarray:
    c, s = math.cos(math.radians(deg)), math.sin(math.radians(deg))
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def is_rotation(R: np.ndarray, tol: float = 1e-6) -> bool:
    R = np.asarray(R, dtype=float)
    if R.shape != (3, 3):
        return False
    return (
        np.max(np.abs(R @ R.T - np.eye(3))) <= tol
        and abs(np.linalg.det(R) - 1.0) <= tol
    )


def _lateral_normal_azimuth(spec: ProductSpec, index: int) -> float:
    """Azimuth (deg) of the grounded lateral face's outward normal, object frame."""
    kind = spec.kind
    if kind is ShapeKind.RECT_PRISM:
        return {2: -90.0, 3: 90.0, 4: 0.0, 5: 180.0}[index]
    if kind is ShapeKind.CYLINDER:
        return (index - 2) * CYLINDER_SIDE_BIN_DEG
    # triangular prism: base face plus the two slants; normals depend on the
    # cross-section aspect ratio
    a, t, _ = spec.dimensions
    if index == 2:
        return -90.0
    right = math.degrees(math.atan2(a / 2.0, t))
    return right if index == 3 else 180.0 - right


def grounded_normal(spec: ProductSpec, poseclass: PoseClass) -> np.ndarray:
    """Outward unit normal (object frame) of the surface resting on the ground."""
    if poseclass.kind is not spec.kind:
        raise ValueError(f"poseclass kind {poseclass.kind} does not match spec kind {spec.kind}")
    if poseclass.index == 0:
        return np.array([0.0, 0.0, -1.0])
    if poseclass.index == 1:
        return np.array([0.0, 0.0, 1.0])
    phi = math.radians(_lateral_normal_azimuth(spec, poseclass.index))
    return np.array([math.cos(phi), math.sin(phi), 0.0])


def grounding_rotation(spec: ProductSpec, poseclass: PoseClass) -> np.ndarray:
    """Rotation that brings the poseclass surface into contact with the ground."""
    if poseclass.kind is not spec.kind:
        raise ValueError(f"poseclass kind {poseclass.kind} does not match spec kind {spec.kind}")
    if poseclass.index == 0:
        return np.eye(3)
    if poseclass.index == 1:
        return rot_x(180.0)
    phi = _lateral_normal_azimuth(spec, poseclass.index)
    return rot_x(90.0) @ rot_z(-90.0 - phi)


def pose_to_rotation(spec: ProductSpec, pose: ObjectPose) -> np.ndarray:
    """World-from-object rotation: R = Rz(yaw) @ R_ground(poseclass)."""
    return rot_z(pose.yaw) @ grounding_rotation(spec, pose.poseclass)


def pose_transform(spec: ProductSpec, pose: ObjectPose) -> tuple[np.ndarray, np.ndarray]:
    """Rotation plus the translation that rests the product on the ground.

    The translation centers the rotated bounding box on the z axis and lifts
    the lowest vertex to z = 0.
    """
    R = pose_to_rotation(spec, pose)
    verts = canonical_mesh(spec).vertices @ R.T
    lo, hi = verts.min(axis=0), verts.max(axis=0)
    t = np.array([-(lo[0] + hi[0]) / 2.0, -(lo[1] + hi[1]) / 2.0, -lo[2]])
    return R, t


def decompose_rotation(spec: ProductSpec, R: np.ndarray) -> ObjectPose:
    """Inverse of pose_to_rotation: recover (poseclass, yaw) from a rotation."""
    if not is_rotation(R):
        raise ValueError("input is not a rotation matrix")
    down = np.array([0.0, 0.0, -1.0])
    best, best_dot = None, -2.0
    for pc in enumerate_poseclasses(spec.kind):
        d = float(np.dot(R @ grounded_normal(spec, pc), down))
        if d > best_dot:
            best, best_dot = pc, d
    M = R @ grounding_rotation(spec, best).T
    yaw = math.degrees(math.atan2(M[1, 0], M[0, 0])) % 360.0
    return ObjectPose(best, yaw)


def angle_error(R_est: np.ndarray, R_gt: np.ndarray) -> float:
    """Geodesic angle between two rotations, degrees in [0, 180]."""
    for R in (R_est, R_gt):
        if not is_rotation(R):
            raise ValueError("angle_error requires orthonormal inputs with det +1")
    c = (np.trace(R_est.T @ R_gt) - 1.0) / 2.0
    return math.degrees(math.acos(min(1.0, max(-1.0, c))))


def pose_angle_error(spec: ProductSpec, est: ObjectPose, gt: ObjectPose) -> float:
    return angle_error(pose_to_rotation(spec, est), pose_to_rotation(spec, gt))


# ---------------------------------------------------------------------------
# meshes


@dataclass(frozen=True)
class Mesh:
    """Triangle mesh with per-face texture coordinates and face-role tags.

    vertices: (V, 3) float; faces: (F, 3) int vertex indices (counterclockwise
    seen from outside); face_roles: length-F role tags from FACE_ROLES;
    face_uv: (F, 3, 2) texture coordinates in [0, 1].
    """

    vertices: np.ndarray
    faces: np.ndarray
    face_roles: tuple[str, ...]
    face_uv: np.ndarray

    def extents(self) -> np.ndarray:
        return self.vertices.max(axis=0) - self.vertices.min(axis=0)


class _MeshBuilder:
    def __init__(self):
        self.verts: list = []
        self.faces: list = []
        self.roles: list = []
        self.uvs: list = []

    def add_vertex(self, p) -> int:
        self.verts.append(tuple(p))
        return len(self.verts) - 1

    def add_tri(self, i, j, k, role, uv_i, uv_j, uv_k):
        self.faces.append((i, j, k))
        self.roles.append(role)
        self.uvs.append((uv_i, uv_j, uv_k))

    def add_quad(self, i, j, k, l, role, uv_i, uv_j, uv_k, uv_l):
        self.add_tri(i, j, k, role, uv_i, uv_j, uv_k)
        self.add_tri(i, k, l, role, uv_i, uv_k, uv_l)

    def build(self) -> Mesh:
        return Mesh(
            vertices=np.asarray(self.verts, dtype=float),
            faces=np.asarray(self.faces, dtype=np.int32),
            face_roles=tuple(self.roles),
            face_uv=np.asarray(self.uvs, dtype=float),
        )


def _box_mesh(w: float, d: float, h: float) -> Mesh:
    b = _MeshBuilder()
    x, y, z = w / 2.0, d / 2.0, h / 2.0
    corners = {}
    for sx in (-1, 1):
        for sy in (-1, 1):
            for sz in (-1, 1):
                corners[(sx, sy, sz)] = b.add_vertex((sx * x, sy * y, sz * z))
    uv = ((0, 1), (1, 1), (1, 0), (0, 0))
    # quads wound counterclockwise seen from outside; uv: u left-to-right,
    # v top-to-bottom when the face is viewed from outside with world z up
    faces = [
        ("front", [(-1, -1, -1), (1, -1, -1), (1, -1, 1), (-1, -1, 1)]),
        ("back", [(1, 1, -1), (-1, 1, -1), (-1, 1, 1), (1, 1, 1)]),
        ("side", [(1, -1, -1), (1, 1, -1), (1, 1, 1), (1, -1, 1)]),   # right
        ("side", [(-1, 1, -1), (-1, -1, -1), (-1, -1, 1), (-1, 1, 1)]),  # left
        ("top", [(-1, -1, 1), (1, -1, 1), (1, 1, 1), (-1, 1, 1)]),
        ("bottom", [(-1, 1, -1), (1, 1, -1), (1, -1, -1), (-1, -1, -1)]),
    ]
    for role, quad in faces:
        i, j, k, l = (corners[c] for c in quad)
        b.add_quad(i, j, k, l, role, uv[0], uv[1], uv[2], uv[3])
    return b.build()


def _cylinder_role(angle_deg: float) -> str:
    a = angle_deg % 360.0
    if a < 60.0 or a >= 300.0:
        return "front"
    if 120.0 <= a < 240.0:
        return "back"
    return "side"


def _cylinder_sector_u(angle_deg: float) -> float:
    """Map a seam-relative angle to the u coordinate inside its role sector."""
    a = angle_deg % 360.0
    if a < 60.0:
        return (a + 60.0) / 120.0
    if a >= 300.0:
        return (a - 300.0) / 120.0
    if 120.0 <= a < 240.0:
        return (a - 120.0) / 120.0
    if 60.0 <= a < 120.0:
        return (a - 60.0) / 60.0
    return (a - 240.0) / 60.0


def _cylinder_mesh(r: float, h: float, segments: int) -> Mesh:
    b = _MeshBuilder()
    z0, z1 = -h / 2.0, h / 2.0
    ring_lo, ring_hi = [], []
    for k in range(segments):
        a = 2.0 * math.pi * k / segments
        ring_lo.append(b.add_vertex((r * math.cos(a), r * math.sin(a), z0)))
        ring_hi.append(b.add_vertex((r * math.cos(a), r * math.sin(a), z1)))
    for k in range(segments):
        k2 = (k + 1) % segments
        a_mid = 360.0 * (k + 0.5) / segments
        role = _cylinder_role(a_mid)
        u0 = _cylinder_sector_u(360.0 * k / segments + 1e-9)
        u1 = u0 + (360.0 * (1.0 if role in ("front", "back") else 2.0) / 120.0) / segments
        # lateral quad, outward-facing; v runs top of image -> bottom as z drops
        b.add_quad(
            ring_lo[k], ring_lo[k2], ring_hi[k2], ring_hi[k],
            role, (u0, 1.0), (u1, 1.0), (u1, 0.0), (u0, 0.0),
        )
    c_top = b.add_vertex((0.0, 0.0, z1))
    c_bot = b.add_vertex((0.0, 0.0, z0))
    for k in range(segments):
        k2 = (k + 1) % segments
        a0 = 2.0 * math.pi * k / segments
        a1 = 2.0 * math.pi * k2 / segments
        uv = lambda a: ((math.cos(a) + 1.0) / 2.0, (math.sin(a) + 1.0) / 2.0)
        b.add_tri(c_top, ring_hi[k], ring_hi[k2], "top", (0.5, 0.5), uv(a0), uv(a1))
        b.add_tri(c_bot, ring_lo[k2], ring_lo[k], "bottom", (0.5, 0.5), uv(a1), uv(a0))
    return b.build()


def _tri_prism_mesh(a: float, t: float, length: float) -> Mesh:
    b = _MeshBuilder()
    z0, z1 = -length / 2.0, length / 2.0
    # isoceles cross-section, centroid at the origin
    pts = [(-a / 2.0, -t / 3.0), (a / 2.0, -t / 3.0), (0.0, 2.0 * t / 3.0)]
    lo = [b.add_vertex((x, y, z0)) for x, y in pts]
    hi = [b.add_vertex((x, y, z1)) for x, y in pts]
    rect_roles = ("front", "back", "side")  # base edge, right slant, left slant
    for e, role in enumerate(rect_roles):
        i, j = e, (e + 1) % 3
        b.add_quad(
            lo[i], lo[j], hi[j], hi[i],
            role, (0.0, 1.0), (1.0, 1.0), (1.0, 0.0), (0.0, 0.0),
        )
    tri_uv = ((0.1, 0.9), (0.9, 0.9), (0.5, 0.1))
    b.add_tri(hi[0], hi[1], hi[2], "top", *tri_uv)
    b.add_tri(lo[1], lo[0], lo[2], "bottom", *tri_uv)
    return b.build()


def canonical_mesh(spec: ProductSpec, segments: int = 48) -> Mesh:
    """Watertight triangle mesh of the product in its object frame.

    The cylinder side is tessellated into `segments` facet columns (>= 36,
    divisible by 4 so the bounding box is exact).
    """
    if spec.kind is ShapeKind.RECT_PRISM:
        return _box_mesh(*spec.dimensions)
    if spec.kind is ShapeKind.CYLINDER:
        if segments < 36 or segments % 12:
            raise ValueError("cylinder tessellation must be >= 36 and divisible by 12")
        return _cylinder_mesh(spec.dimensions[0], spec.dimensions[1], segments)
    return _tri_prism_mesh(*spec.dimensions)
