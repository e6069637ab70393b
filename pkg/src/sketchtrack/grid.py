"""Particle grid over the workspace, polygon masks, and camera ground projection.

The filter state space is a fixed set of particle locations in a rectangular
workspace. Sketches arrive as polygons (screen pixels or world meters) and are
reduced to boolean membership masks over the particles. Pixel-frame polygons
are first back-projected to the ground plane through a face-down camera.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptySketchError, ProjectionError
from .validation import check_points, check_positive, check_scalar

logger = logging.getLogger(__name__)

# Tolerance scale for the on-segment test; multiplied by the coordinate magnitude.
_EDGE_EPS = 1e-12


@dataclass(frozen=True)
class Bounds:
    """Axis-aligned rectangular workspace [xmin, xmax] x [ymin, ymax]."""

    xmin: float
    ymin: float
    xmax: float
    ymax: float

    def __post_init__(self):
        for name in ("xmin", "ymin", "xmax", "ymax"):
            check_scalar(getattr(self, name), name)
        if not (self.xmax > self.xmin and self.ymax > self.ymin):
            raise ValueError(f"degenerate bounds {self}")

    @property
    def width(self) -> float:
        return self.xmax - self.xmin

    @property
    def height(self) -> float:
        return self.ymax - self.ymin

    @property
    def diagonal(self) -> float:
        return float(np.hypot(self.width, self.height))

    def contains(self, points) -> np.ndarray:
        pts = check_points(points)
        return ((pts[:, 0] >= self.xmin) & (pts[:, 0] <= self.xmax)
                & (pts[:, 1] >= self.ymin) & (pts[:, 1] <= self.ymax))

    def clip(self, point) -> np.ndarray:
        pt = np.asarray(point, dtype=float)
        return np.clip(pt, [self.xmin, self.ymin], [self.xmax, self.ymax])


@dataclass(frozen=True)
class ParticleGrid:
    """Fixed particle locations over a workspace.

    positions is an (N, 2) float64 array. Regular grids carry rows/cols with
    rows * cols == N; irregular layouts leave them as None.
    """

    positions: np.ndarray
    bounds: Bounds
    rows: int | None = None
    cols: int | None = None

    def __post_init__(self):
        pos = check_points(self.positions, "positions")
        pos = np.ascontiguousarray(pos)
        pos.flags.writeable = False
        object.__setattr__(self, "positions", pos)
        if len(pos) < 1:
            raise ValueError("grid needs at least one particle")
        if not np.all(self.bounds.contains(pos)):
            raise ValueError("all particles must lie inside bounds")
        # Pairwise-distinct check via lexicographic sort.
        order = np.lexsort((pos[:, 1], pos[:, 0]))
        srt = pos[order]
        if len(srt) > 1 and np.any(np.all(srt[1:] == srt[:-1], axis=1)):
            raise ValueError("particle positions must be pairwise distinct")
        if (self.rows is None) != (self.cols is None):
            raise ValueError("rows and cols must be given together")
        if self.rows is not None and self.rows * self.cols != len(pos):
            raise ValueError(f"rows*cols = {self.rows * self.cols} != {len(pos)} particles")

    @property
    def n_particles(self) -> int:
        return len(self.positions)

    @property
    def regular(self) -> bool:
        return self.rows is not None

    @property
    def spacing(self) -> tuple[float, float]:
        """Cell size (dx, dy) for regular grids."""
        if not self.regular:
            raise ValueError("spacing is defined only for regular grids")
        return (self.bounds.width / self.cols, self.bounds.height / self.rows)

    @classmethod
    def from_positions(cls, positions, bounds: Bounds | None = None) -> "ParticleGrid":
        """Irregular layout from explicit positions; bounds default to the bbox."""
        pos = check_points(positions, "positions")
        if bounds is None:
            bounds = Bounds(float(pos[:, 0].min()), float(pos[:, 1].min()),
                            float(pos[:, 0].max() + 1e-9), float(pos[:, 1].max() + 1e-9))
        return cls(positions=pos, bounds=bounds)


def build_grid(bounds: Bounds, rows: int, cols: int) -> ParticleGrid:
    """Regular grid of cell centers, row-major from the lower-left cell.

    Each of the rows*cols cells contributes its center, so the first particle
    sits half a cell in from (xmin, ymin) and the last half a cell in from
    (xmax, ymax).
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"rows and cols must be >= 1, got {rows}x{cols}")
    dx = bounds.width / cols
    dy = bounds.height / rows
    # Offsets first, origin added once: translating bounds translates particles.
    ox = (np.arange(cols) + 0.5) * dx
    oy = (np.arange(rows) + 0.5) * dy
    xs = bounds.xmin + ox
    ys = bounds.ymin + oy
    gx, gy = np.meshgrid(xs, ys)
    positions = np.column_stack([gx.ravel(), gy.ravel()])
    return ParticleGrid(positions=positions, bounds=bounds, rows=rows, cols=cols)


@dataclass(frozen=True)
class Polygon:
    """Simple polygon with an explicit coordinate-frame tag.

    frame is "world" (meters on the ground plane) or "px" (image pixels,
    origin top-left, x right, y down). Vertices are ordered, not closed
    (the closing edge is implicit), and must not self-intersect.
    """

    vertices: np.ndarray
    frame: str = "world"

    def __post_init__(self):
        verts = check_points(self.vertices, "vertices")
        verts = np.ascontiguousarray(verts)
        verts.flags.writeable = False
        object.__setattr__(self, "vertices", verts)
        if len(verts) < 3:
            raise ValueError(f"polygon needs >= 3 vertices, got {len(verts)}")
        if self.frame not in ("world", "px"):
            raise ValueError(f"frame must be 'world' or 'px', got {self.frame!r}")
        if _self_intersects(verts):
            raise ValueError("polygon must not self-intersect")

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)


def _self_intersects(verts: np.ndarray) -> bool:
    """Proper crossing between non-adjacent edges (shared endpoints allowed)."""
    n = len(verts)
    edges = [(verts[i], verts[(i + 1) % n]) for i in range(n)]

    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    for i in range(n):
        for j in range(i + 1, n):
            if abs(i - j) in (0, 1) or {i, j} == {0, n - 1}:
                continue
            a, b = edges[i]
            c, d = edges[j]
            d1 = orient(a, b, c)
            d2 = orient(a, b, d)
            d3 = orient(c, d, a)
            d4 = orient(c, d, b)
            if ((d1 > 0) != (d2 > 0)) and ((d3 > 0) != (d4 > 0)) and d1 != 0 and d2 != 0:
                return True
    return False


def points_in_polygon(points, polygon: Polygon) -> np.ndarray:
    """Boolean membership for each point; boundary points count as inside.

    Ray casting with a half-open vertical rule plus an explicit on-segment
    test, so points exactly on an edge or vertex are deterministically inside
    regardless of vertex order.
    """
    pts = check_points(points)
    verts = polygon.vertices
    n = len(verts)
    x = pts[:, 0]
    y = pts[:, 1]
    inside = np.zeros(len(pts), dtype=bool)
    on_edge = np.zeros(len(pts), dtype=bool)
    scale = max(1.0, float(np.max(np.abs(verts))))
    eps = _EDGE_EPS * scale

    for i in range(n):
        x1, y1 = verts[i]
        x2, y2 = verts[(i + 1) % n]
        # On-segment: collinear and within the segment bounding box.
        cross = (x2 - x1) * (y - y1) - (y2 - y1) * (x - x1)
        collinear = np.abs(cross) <= eps * max(1.0, np.hypot(x2 - x1, y2 - y1))
        in_box = ((x >= min(x1, x2) - eps) & (x <= max(x1, x2) + eps)
                  & (y >= min(y1, y2) - eps) & (y <= max(y1, y2) + eps))
        on_edge |= collinear & in_box
        # Crossing count, half-open in y so shared vertices count once.
        cond = (y1 > y) != (y2 > y)
        if np.any(cond):
            x_int = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            inside ^= cond & (x < x_int)

    return inside | on_edge


def polygon_mask(grid: ParticleGrid, polygon: Polygon) -> np.ndarray:
    """Membership mask of the polygon over the grid particles.

    The polygon must already be in the world frame. Raises EmptySketchError
    when no particle falls inside.
    """
    if polygon.frame != "world":
        raise ValueError("polygon must be in the world frame; project px sketches first")
    mask = points_in_polygon(grid.positions, polygon)
    m = int(mask.sum())
    if m == 0:
        raise EmptySketchError("polygon encloses no grid particle")
    if m == grid.n_particles:
        logger.info("sketch covers the whole grid: zero information")
    return mask


# ---------------------------------------------------------------------------
# Camera model
# ---------------------------------------------------------------------------

def _default_intrinsics() -> np.ndarray:
    return np.array([[320.0, 0.0, 320.0],
                     [0.0, 320.0, 240.0],
                     [0.0, 0.0, 1.0]])


@dataclass(frozen=True)
class CameraPose:
    """Face-down camera: 3D position, yaw about the vertical, intrinsics.

    COORDINATE CONVENTIONS
    - World: x east, y north, z up; ground plane z = 0.
    - Image: origin top-left, u right, v down; principal point looks straight
      down, so it maps to the camera's ground footprint center.
    - At yaw 0 the image u axis aligns with world +x and the image v axis with
      world -y. Yaw rotates the footprint counterclockwise about world z.
    """

    position: np.ndarray
    yaw: float = 0.0
    intrinsics: np.ndarray = field(default_factory=_default_intrinsics)

    def __post_init__(self):
        pos = np.asarray(self.position, dtype=float).reshape(-1)
        if pos.shape != (3,) or not np.all(np.isfinite(pos)):
            raise ValueError("position must be a finite 3-vector (x, y, altitude)")
        pos = np.ascontiguousarray(pos)
        pos.flags.writeable = False
        object.__setattr__(self, "position", pos)
        if pos[2] <= 0.0:
            raise ValueError(f"camera altitude must be > 0, got {pos[2]}")
        yaw = float(self.yaw) % (2.0 * np.pi)
        object.__setattr__(self, "yaw", yaw)
        k = np.asarray(self.intrinsics, dtype=float)
        if k.shape != (3, 3):
            raise ValueError("intrinsics must be 3x3")
        if k[0, 0] <= 0 or k[1, 1] <= 0 or k[2, 2] != 1.0 or k[1, 0] != 0 or np.any(k[2, :2] != 0):
            raise ValueError("intrinsics must be upper-triangular with positive focal entries")
        k = np.ascontiguousarray(k)
        k.flags.writeable = False
        object.__setattr__(self, "intrinsics", k)

    @property
    def altitude(self) -> float:
        return float(self.position[2])

    @classmethod
    def nadir(cls, x: float, y: float, altitude: float, yaw: float = 0.0,
              focal: float = 320.0, center: tuple[float, float] = (320.0, 240.0)) -> "CameraPose":
        check_positive(altitude, "altitude")
        k = np.array([[focal, 0.0, center[0]], [0.0, focal, center[1]], [0.0, 0.0, 1.0]])
        return cls(position=np.array([x, y, altitude]), yaw=yaw, intrinsics=k)

    def rotation(self) -> np.ndarray:
        """Camera-to-world rotation (columns are camera axes in world coords)."""
        c, s = np.cos(self.yaw), np.sin(self.yaw)
        rz = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        r0 = np.diag([1.0, -1.0, -1.0])  # face-down: image v -> -y, optical axis -> -z
        return rz @ r0


def project_to_ground(pixels, pose: CameraPose) -> np.ndarray:
    """Back-project pixel coordinates through the camera onto z = 0.

    Returns (N, 2) world coordinates. Raises ProjectionError for rays that do
    not descend toward the ground.
    """
    px = check_points(pixels, "pixels")
    k = pose.intrinsics
    fx, fy = k[0, 0], k[1, 1]
    skew, cx, cy = k[0, 1], k[0, 2], k[1, 2]
    yc = (px[:, 1] - cy) / fy
    xc = (px[:, 0] - cx - skew * yc) / fx
    dirs_cam = np.column_stack([xc, yc, np.ones(len(px))])
    dirs_world = dirs_cam @ pose.rotation().T
    dz = dirs_world[:, 2]
    if np.any(dz >= -1e-15):
        raise ProjectionError("pixel ray parallel to or away from the ground plane")
    t = -pose.altitude / dz
    ground = pose.position[None, :2] + t[:, None] * dirs_world[:, :2]
    return ground


def project_to_pixels(points, pose: CameraPose) -> np.ndarray:
    """Forward pinhole projection of ground points (z = 0) into the image."""
    pts = check_points(points)
    world = np.column_stack([pts, np.zeros(len(pts))])
    rel = world - pose.position[None, :]
    cam = rel @ pose.rotation()  # R^T @ rel, row-wise
    z = cam[:, 2]
    if np.any(z <= 1e-15):
        raise ProjectionError("point behind the camera")
    k = pose.intrinsics
    u = k[0, 0] * cam[:, 0] / z + k[0, 1] * cam[:, 1] / z + k[0, 2]
    v = k[1, 1] * cam[:, 1] / z + k[1, 2]
    return np.column_stack([u, v])


def project_polygon(polygon: Polygon, pose: CameraPose) -> Polygon:
    """Convert a pixel-frame polygon to the world frame through a camera pose."""
    if polygon.frame != "px":
        raise ValueError("project_polygon expects a px-frame polygon")
    ground = project_to_ground(polygon.vertices, pose)
    return Polygon(vertices=ground, frame="world")
