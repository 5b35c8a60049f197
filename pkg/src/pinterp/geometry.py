"""Reference elements: the equilateral triangle T and the square Q = (-1, 1)^2.

Edges are enumerated counterclockwise, starting at (-1, 0) on T and at
(-1, -1) on Q.  Edge ``e`` runs from vertex ``e`` to vertex ``e + 1`` and is
parametrized by t in [-1, 1]; the unit tangent follows the traversal and the
outward normal is the tangent rotated by -90 degrees, so that
``n x u = n_1 u_2 - n_2 u_1 = u . sigma``.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

SQRT3 = np.sqrt(3.0)

KINDS = ("triangle", "square")


@dataclass(frozen=True, eq=False)
class RefElement:
    kind: str
    vertices: np.ndarray  # (nv, 2)
    edges: tuple  # ((a, b), ...)
    tangents: np.ndarray  # (ne, 2)
    normals: np.ndarray  # (ne, 2)
    lengths: np.ndarray
    area: float

    @property
    def num_vertices(self):
        return len(self.vertices)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def centroid(self):
        return self.vertices.mean(axis=0)

    def edge_points(self, e, t):
        """Points x_e(t) on edge ``e`` for parameters ``t`` in [-1, 1]."""
        a, b = self.vertices[list(self.edges[e])]
        t = np.asarray(t, dtype=float)
        return 0.5 * (a + b) + 0.5 * t[..., None] * (b - a)

    def edge_jacobian(self, e):
        """d(arclength)/dt on edge ``e``."""
        return 0.5 * self.lengths[e]

    def contains(self, points, tol=1e-12):
        """Boolean mask of points in the closed element."""
        pts = np.atleast_2d(points)
        inside = np.ones(len(pts), dtype=bool)
        for e, (a, _) in enumerate(self.edges):
            inside &= (pts - self.vertices[a]) @ self.normals[e] <= tol
        return inside

    def boundary_distance(self, points):
        pts = np.atleast_2d(points)
        d = np.stack([-(pts - self.vertices[a]) @ self.normals[e]
                      for e, (a, _) in enumerate(self.edges)])
        return d.min(axis=0)


@lru_cache(maxsize=None)
def make_reference_element(kind):
    """Build the reference triangle or square."""
    if kind == "triangle":
        vertices = np.array([[-1.0, 0.0], [1.0, 0.0], [0.0, SQRT3]])
        area = SQRT3
    elif kind == "square":
        vertices = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])
        area = 4.0
    else:
        raise ValueError(f"unknown element kind {kind!r}; expected one of {KINDS}")
    nv = len(vertices)
    edges = tuple((i, (i + 1) % nv) for i in range(nv))
    diffs = np.array([vertices[b] - vertices[a] for a, b in edges])
    lengths = np.linalg.norm(diffs, axis=1)
    tangents = diffs / lengths[:, None]
    normals = np.column_stack([tangents[:, 1], -tangents[:, 0]])
    for arr in (vertices, tangents, normals, lengths):
        arr.setflags(write=False)
    return RefElement(kind, vertices, edges, tangents, normals, lengths, float(area))


def as_element(element):
    if isinstance(element, RefElement):
        return element
    return make_reference_element(element)


def barycentric(points):
    """Barycentric coordinates on T; shape (3, m)."""
    pts = np.atleast_2d(points)
    l3 = pts[:, 1] / SQRT3
    l2 = 0.5 * (pts[:, 0] + 1.0) - 0.5 * l3
    return np.stack([1.0 - l2 - l3, l2, l3])


# gradients of the barycentric coordinates on T (constant)
BARYCENTRIC_GRADIENTS = np.array([
    [-0.5, -0.5 / SQRT3],
    [0.5, -0.5 / SQRT3],
    [0.0, 1.0 / SQRT3],
])
