"""Pinhole camera model, viewpoint ring geometry, and a software rasterizer.

The rasterizer substitutes for RGBD capture: it produces a color image, a
depth image (millimeters, object pixels only), the exact object mask, and
the tight detection rectangle of the mask. Everything is deterministic for
fixed inputs.

Camera frame convention: +x right, +y down, +z forward (the view direction).
A viewpoint stores the camera center and the camera-from-world rotation.
The overhead camera looks straight down with world +x mapping to image
right and world +y to image up.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .shapes import Mesh, ObjectPose, ProductSpec, canonical_mesh, pose_to_rotation
from .textures import TextureAtlas, procedural_texture

GROUND_GRAY = 110
NEAR_PLANE = 0.01


class EmptyMaskError(RuntimeError):
    """Raised when the object does not hit any pixel."""


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise ValueError("focal lengths must be positive")
        if not (0 <= self.cx < self.width and 0 <= self.cy < self.height):
            raise ValueError("principal point must lie inside the image")


DEFAULT_CAMERA = CameraIntrinsics(fx=600.0, fy=600.0, cx=320.0, cy=240.0, width=640, height=480)


@dataclass(frozen=True)
class ViewpointRing:
    """Overhead viewpoint plus n candidates evenly spaced on a circle.

    All cameras sit at the same height and look at a nominal object center
    on the z axis (center_height above the ground).
    """

    n: int = 4
    radius: float = 0.15
    height: float = 0.40
    center_height: float = 0.05

    def __post_init__(self):
        if self.n < 1 or self.radius <= 0 or self.height <= 0:
            raise ValueError("ring needs n >= 1, radius > 0, height > 0")

    def azimuth_deg(self, index: int) -> float:
        """Azimuth of a candidate; the overhead candidate is defined as 0."""
        if index == 0:
            return 0.0
        return 360.0 * (index - 1) / self.n


@dataclass(frozen=True)
class Viewpoint:
    index: int
    position: np.ndarray
    rotation: np.ndarray  # camera-from-world; rows are right, down, forward

    def world_to_camera(self, pts: np.ndarray) -> np.ndarray:
        return (np.asarray(pts) - self.position) @ self.rotation.T


def _look_at(position: np.ndarray, target: np.ndarray) -> np.ndarray:
    forward = target - position
    forward = forward / np.linalg.norm(forward)
    if abs(forward[0]) < 1e-12 and abs(forward[1]) < 1e-12:
        right = np.array([1.0, 0.0, 0.0])  # straight down: fix image right = world +x
    else:
        right = np.cross(forward, np.array([0.0, 0.0, 1.0]))
        right = right / np.linalg.norm(right)
    down = np.cross(forward, right)
    return np.stack([right, down, forward])


def viewpoint_candidates(ring: ViewpointRing) -> list[Viewpoint]:
    """The n+1 camera placements: index 0 overhead, 1..n on the ring."""
    center = np.array([0.0, 0.0, ring.center_height])
    out = []
    for i in range(ring.n + 1):
        if i == 0:
            pos = np.array([0.0, 0.0, ring.height])
        else:
            a = math.radians(ring.azimuth_deg(i))
            pos = np.array([ring.radius * math.cos(a), ring.radius * math.sin(a), ring.height])
        out.append(Viewpoint(index=i, position=pos, rotation=_look_at(pos, center)))
    return out


@dataclass
class Observation:
    """One rendered RGBD view: color, depth (mm), object mask, detection rect.

    rect is the tight half-open bounding box (x0, y0, x1, y1) of the mask.
    Depth is nonzero exactly on mask pixels.
    """

    color: np.ndarray
    depth: np.ndarray
    mask: np.ndarray
    rect: tuple[int, int, int, int]

    @property
    def rect_area(self) -> int:
        x0, y0, x1, y1 = self.rect
        return (x1 - x0) * (y1 - y0)


def mask_rect(mask: np.ndarray) -> tuple[int, int, int, int]:
    ys, xs = np.nonzero(mask)
    if len(xs) == 0:
        raise EmptyMaskError("mask is empty")
    return int(xs.min()), int(ys.min()), int(xs.max()) + 1, int(ys.max()) + 1


def _clip_near(tri_cam: np.ndarray, tri_uv: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Sutherland-Hodgman clip of one triangle against z = NEAR_PLANE."""
    inside = tri_cam[:, 2] > NEAR_PLANE
    if inside.all():
        return [(tri_cam, tri_uv)]
    if not inside.any():
        return []
    pts, uvs = [], []
    for i in range(3):
        j = (i + 1) % 3
        p, q = tri_cam[i], tri_cam[j]
        up, uq = tri_uv[i], tri_uv[j]
        if inside[i]:
            pts.append(p)
            uvs.append(up)
        if inside[i] != inside[j]:
            s = (NEAR_PLANE - p[2]) / (q[2] - p[2])
            pts.append(p + s * (q - p))
            uvs.append(up + s * (uq - up))
    out = []
    for k in range(1, len(pts) - 1):
        out.append(
            (np.stack([pts[0], pts[k], pts[k + 1]]), np.stack([uvs[0], uvs[k], uvs[k + 1]]))
        )
    return out


def _rasterize(tri_img, tri_zinv, tri_uvz, tex, zbuf, color, mask):
    """Rasterize one projected triangle with perspective-correct texturing.

    tri_img: (3, 2) pixel coords; tri_zinv: (3,) 1/z; tri_uvz: (3, 2) uv/z.
    tex: (H, W, 3) uint8 role image or None for flat gray.
    """
    h, w = zbuf.shape
    x0 = max(int(math.floor(tri_img[:, 0].min())), 0)
    x1 = min(int(math.ceil(tri_img[:, 0].max())) + 1, w)
    y0 = max(int(math.floor(tri_img[:, 1].min())), 0)
    y1 = min(int(math.ceil(tri_img[:, 1].max())) + 1, h)
    if x0 >= x1 or y0 >= y1:
        return
    ax, ay = tri_img[0]
    bx, by = tri_img[1]
    cx, cy = tri_img[2]
    area = (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)
    if abs(area) < 1e-12:
        return
    xs = np.arange(x0, x1, dtype=np.float64) + 0.5
    ys = np.arange(y0, y1, dtype=np.float64) + 0.5
    px, py = np.meshgrid(xs, ys)
    w0 = ((bx - px) * (cy - py) - (by - py) * (cx - px)) / area
    w1 = ((cx - px) * (ay - py) - (cy - py) * (ax - px)) / area
    w2 = 1.0 - w0 - w1
    inside = (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
    if not inside.any():
        return
    zinv = w0 * tri_zinv[0] + w1 * tri_zinv[1] + w2 * tri_zinv[2]
    z = np.where(zinv > 0, 1.0 / np.maximum(zinv, 1e-12), np.inf)
    sub_z = zbuf[y0:y1, x0:x1]
    win = inside & (z < sub_z)
    if not win.any():
        return
    sub_z[win] = z[win]
    if tex is None:
        color[y0:y1, x0:x1][win] = GROUND_GRAY
        mask[y0:y1, x0:x1][win] = False
        return
    u = (w0 * tri_uvz[0, 0] + w1 * tri_uvz[1, 0] + w2 * tri_uvz[2, 0]) / zinv
    v = (w0 * tri_uvz[0, 1] + w1 * tri_uvz[1, 1] + w2 * tri_uvz[2, 1]) / zinv
    th, tw = tex.shape[:2]
    ti = np.clip((v[win] * th).astype(np.int64), 0, th - 1)
    tj = np.clip((u[win] * tw).astype(np.int64), 0, tw - 1)
    color[y0:y1, x0:x1][win] = tex[ti, tj]
    mask[y0:y1, x0:x1][win] = True


def render(
    spec: ProductSpec,
    pose: ObjectPose,
    viewpoint: Viewpoint,
    cam: CameraIntrinsics = DEFAULT_CAMERA,
    atlas: TextureAtlas | None = None,
    mesh: Mesh | None = None,
    depth_noise_sigma_mm: float = 0.0,
    noise_rng: np.random.Generator | None = None,
) -> Observation:
    """Render one observation of the posed product.

    The ground plane is matte gray and never occludes the object (the object
    rests on it and cameras are above ground), so it is composited as the
    background fill; only object triangles go through the rasterizer. Object
    silhouette edges against the gray ground are therefore identical to
    rasterizing the plane itself.
    """
    from .shapes import pose_transform

    if atlas is None:
        atlas = procedural_texture(spec)
    if mesh is None:
        mesh = canonical_mesh(spec)
    R, t = pose_transform(spec, pose)
    world = mesh.vertices @ R.T + t
    cam_pts = viewpoint.world_to_camera(world)

    zbuf = np.full((cam.height, cam.width), np.inf, dtype=np.float64)
    color = np.full((cam.height, cam.width, 3), GROUND_GRAY, dtype=np.uint8)
    mask = np.zeros((cam.height, cam.width), dtype=bool)

    for f in range(len(mesh.faces)):
        tri_cam = cam_pts[mesh.faces[f]]
        tri_uv = mesh.face_uv[f]
        tex = atlas.image(mesh.face_roles[f])
        for cc, cuv in _clip_near(tri_cam, tri_uv):
            z = cc[:, 2]
            img = np.empty((3, 2))
            img[:, 0] = cam.fx * cc[:, 0] / z + cam.cx
            img[:, 1] = cam.fy * cc[:, 1] / z + cam.cy
            _rasterize(img, 1.0 / z, cuv / z[:, None], tex, zbuf, color, mask)

    if not mask.any():
        raise EmptyMaskError(f"object {spec.id} not visible from viewpoint {viewpoint.index}")
    depth_m = np.where(mask, zbuf, 0.0)
    if depth_noise_sigma_mm > 0.0:
        if noise_rng is None:
            raise ValueError("depth noise requires an explicit RNG")
        depth_m = depth_m + np.where(mask, noise_rng.normal(0.0, depth_noise_sigma_mm / 1000.0, depth_m.shape), 0.0)
    depth = np.where(mask, np.clip(np.round(depth_m * 1000.0), 1, 65535), 0).astype(np.uint16)
    return Observation(color=color, depth=depth, mask=mask, rect=mask_rect(mask))


def crop_to_object(obs: Observation, size: int = 224) -> Observation:
    """Square crop centered on the detection rectangle, rescaled to size x size.

    Color is resampled bilinearly, depth and mask nearest-neighbor; the
    detection rectangle is recomputed from the resampled mask. Samples
    outside the source frame read as ground gray / empty.
    """
    x0, y0, x1, y1 = obs.rect
    if (x1 - x0) <= 0 or (y1 - y0) <= 0:
        raise EmptyMaskError("cannot crop an empty observation")
    ccx, ccy = (x0 + x1) / 2.0, (y0 + y1) / 2.0
    side = float(max(x1 - x0, y1 - y0))
    # sample centers in source pixel-center coordinates
    o = (np.arange(size) + 0.5) * side / size - side / 2.0 - 0.5
    sx = ccx + o
    sy = ccy + o
    gy, gx = np.meshgrid(sy, sx, indexing="ij")
    coords = np.stack([gy, gx])

    out_color = np.empty((size, size, 3), dtype=np.uint8)
    for c in range(3):
        ch = ndimage.map_coordinates(
            obs.color[:, :, c].astype(np.float32), coords, order=1, mode="constant", cval=float(GROUND_GRAY)
        )
        out_color[:, :, c] = np.clip(np.round(ch), 0, 255).astype(np.uint8)
    out_depth = ndimage.map_coordinates(obs.depth, coords, order=0, mode="constant", cval=0)
    out_mask = ndimage.map_coordinates(obs.mask.astype(np.uint8), coords, order=0, mode="constant", cval=0).astype(bool)
    return Observation(color=out_color, depth=out_depth, mask=out_mask, rect=mask_rect(out_mask))
