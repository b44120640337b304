"""Sampled geometry of the singular set for external plotting."""
from __future__ import annotations

import numpy as np
from skimage import measure

from .pentapod import SingularityModel, orientation_quadric, position_cone


def quadric_mesh(model: SingularityModel, orientation, center, extent: float, resolution: int = 64) -> dict:
    """Triangle mesh of the singular positions for a fixed orientation.

    The quadric is sampled on a cube of half-width ``extent`` around
    ``center`` and triangulated by marching cubes.
    """
    A, b, c = orientation_quadric(model, orientation).arrays()
    center = np.asarray(center, float)
    axis = np.linspace(-extent, extent, resolution)
    X, Y, Z = np.meshgrid(axis + center[0], axis + center[1], axis + center[2], indexing="ij")
    P = np.stack([X, Y, Z], axis=-1)
    vals = np.einsum("...i,ij,...j->...", P, A, P) + P @ b + c
    if not (vals.min() < 0 < vals.max()):
        return {"vertices": [], "faces": []}
    step = axis[1] - axis[0]
    verts, faces, _, _ = measure.marching_cubes(vals, level=0.0, spacing=(step, step, step))
    verts = verts - extent + center
    return {"vertices": verts.tolist(), "faces": faces.astype(int).tolist()}


def sphere_curve(model: SingularityModel, position, resolution: int = 181) -> list:
    """Polylines of the singular orientations on the unit sphere for a fixed position."""
    A, b, c = position_cone(model, position).arrays()
    theta = np.linspace(0, np.pi, resolution)
    phi = np.linspace(-np.pi, np.pi, 2 * resolution - 1)
    T, Ph = np.meshgrid(theta, phi, indexing="ij")
    D = np.stack([np.sin(T) * np.cos(Ph), np.sin(T) * np.sin(Ph), np.cos(T)], axis=-1)
    vals = np.einsum("...i,ij,...j->...", D, A, D) + D @ b + c
    lines = []
    for contour in measure.find_contours(vals, 0.0):
        th = np.interp(contour[:, 0], np.arange(len(theta)), theta)
        ph = np.interp(contour[:, 1], np.arange(len(phi)), phi)
        pts = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], axis=1)
        lines.append(pts.tolist())
    return lines
