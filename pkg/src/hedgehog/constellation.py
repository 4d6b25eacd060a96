"""
Constellations ("hedgehogs"): ordered sets of (2s+1)^2 unit vectors.
"""

import csv
from dataclasses import dataclass, field
import json
import math

import numpy as np

from .spin import UNIT_SLACK, SpinLabel, as_spin, unit_vector


LOAD_NORM_TOL = 1e-9


class FormatError(ValueError):
    """A constellation, sample or operator file is malformed."""


@dataclass(frozen=True)
class Constellation:
    """
    Ordered list of ``s.n_points()`` unit vectors labelling coherent states.

    ``vectors`` is stored as a read-only ``(N_s, 3)`` float array; rows are
    renormalized on construction.
    """

    s: SpinLabel
    vectors: np.ndarray
    label: str = field(default="", compare=False)

    def __post_init__(self):
        s = as_spin(self.s)
        vectors = np.array(self.vectors, dtype=float)
        if vectors.ndim != 2 or vectors.shape[1] != 3:
            raise ValueError(f"vectors must have shape (N, 3), got {vectors.shape}")
        if len(vectors) != s.n_points():
            raise ValueError(
                f"spin {s} needs {s.n_points()} vectors, got {len(vectors)}"
            )
        norms = np.linalg.norm(vectors, axis=1)
        if not np.all(np.isfinite(norms)) or np.any(norms == 0.0):
            raise ValueError("constellation vectors must be finite and non-zero")
        # rows already unit to round-off are kept bit-for-bit
        norms[np.abs(norms - 1.0) <= UNIT_SLACK] = 1.0
        vectors = vectors / norms[:, None]
        vectors.setflags(write=False)
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "vectors", vectors)

    def __len__(self):
        return len(self.vectors)

    def __getitem__(self, index):
        return self.vectors[index]

    def __eq__(self, other):
        if not isinstance(other, Constellation):
            return NotImplemented
        return self.s == other.s and np.array_equal(self.vectors, other.vectors)

    __hash__ = None

    def to_dict(self):
        return {
            "doubled_spin": self.s.doubled_spin,
            "label": self.label,
            "vectors": self.vectors.tolist(),
        }


def default_cone_angles(s):
    s = as_spin(s)
    k = s.dimension()
    return np.pi * (np.arange(k) + 1) / (k + 1)


def default_azimuth_offsets(s):
    s = as_spin(s)
    return np.arange(s.dimension()) * np.pi / s.n_points()


def regular_hedgehog(s, cone_angles=None, azimuth_offsets=None):
    """
    Regular hedgehog: 2s+1 cones about z, 2s+1 equally spaced azimuths each.

    Cone ``a`` carries the directions with polar angle ``cone_angles[a]`` and
    azimuths ``azimuth_offsets[a] + 2 pi b / (2s+1)``. The result is invariant
    under rotation about z by 2 pi / (2s+1).

    Parameters
    ----------
    s : SpinLabel or spin string
    cone_angles : sequence of 2s+1 distinct floats in (0, pi), optional
        Defaults to pi (a+1) / (2s+2).
    azimuth_offsets : sequence of 2s+1 floats, optional
        Defaults to a pi / N_s (staggered cones).
    """
    s = as_spin(s)
    k = s.dimension()
    theta = default_cone_angles(s) if cone_angles is None else np.asarray(cone_angles, float)
    offsets = (
        default_azimuth_offsets(s)
        if azimuth_offsets is None
        else np.asarray(azimuth_offsets, float)
    )
    if theta.shape != (k,) or offsets.shape != (k,):
        raise ValueError(f"spin {s} needs {k} cone angles and {k} azimuth offsets")
    if np.any(theta <= 0.0) or np.any(theta >= np.pi):
        raise ValueError("cone angles must lie strictly between 0 and pi")
    if len(np.unique(theta)) != k:
        raise ValueError("cone angles must be distinct")

    phi = offsets[:, None] + 2 * np.pi * np.arange(k)[None, :] / k
    th = np.repeat(theta[:, None], k, axis=1)
    vectors = np.stack(
        [np.sin(th) * np.cos(phi), np.sin(th) * np.sin(phi), np.cos(th)], axis=-1
    ).reshape(-1, 3)
    return Constellation(s, vectors, label=f"regular s={s}")


def random_directions(rng, count):
    """Uniform points on the sphere: z ~ U(-1, 1), phi ~ U(0, 2 pi)."""
    z = rng.uniform(-1.0, 1.0, count)
    phi = rng.uniform(0.0, 2 * np.pi, count)
    r = np.sqrt(1.0 - z * z)
    return np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1)


def random_constellation(s, seed):
    s = as_spin(s)
    rng = np.random.default_rng(seed)
    return Constellation(
        s, random_directions(rng, s.n_points()), label=f"random s={s} seed={seed}"
    )


def fibonacci_constellation(s):
    """Well-spread reference constellation on a Fibonacci lattice."""
    s = as_spin(s)
    n = s.n_points()
    golden = (1 + math.sqrt(5)) / 2
    i = np.arange(n)
    z = 1 - (2 * i + 1) / n
    phi = 2 * np.pi * i / golden
    r = np.sqrt(1 - z * z)
    return Constellation(
        s, np.stack([r * np.cos(phi), r * np.sin(phi), z], axis=-1), label=f"fibonacci s={s}"
    )


def distance(a, b):
    """Sum over spikes of the Euclidean distance |a_n - b_n| (index-wise)."""
    if a.s != b.s:
        raise ValueError(f"spin mismatch: {a.s} vs {b.s}")
    return float(np.sum(np.linalg.norm(a.vectors - b.vectors, axis=1)))


def replace_vector(m, index, v):
    """Copy of ``m`` with spike ``index`` replaced by the normalized ``v``."""
    if not 0 <= index < len(m):
        raise IndexError(f"spike index {index} out of range [0, {len(m)})")
    vectors = m.vectors.copy()
    vectors[index] = unit_vector(v)
    return Constellation(m.s, vectors, label=m.label)


def rotate(m, rotation):
    """Apply one 3x3 rotation to every spike."""
    return Constellation(m.s, m.vectors @ np.asarray(rotation, float).T, label=m.label)


def z_rotation(angle):
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def from_dict(data):
    try:
        s = SpinLabel(data["doubled_spin"])
        vectors = np.asarray(data["vectors"], dtype=float)
        label = str(data.get("label", ""))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"bad constellation record: {exc}") from None
    if vectors.ndim != 2 or vectors.shape[1:] != (3,):
        raise FormatError(f"vectors must be a list of [x, y, z], got shape {vectors.shape}")
    if vectors.shape[0] != s.n_points():
        raise FormatError(f"spin {s} needs {s.n_points()} vectors, got {vectors.shape[0]}")
    norms = np.linalg.norm(vectors, axis=1)
    bad = np.flatnonzero(~(np.abs(norms - 1.0) <= LOAD_NORM_TOL))
    if bad.size:
        raise FormatError(f"vector {bad[0]} has norm {norms[bad[0]]!r}, not unit within 1e-9")
    return Constellation(s, vectors, label=label)


def save_json(m, path):
    with open(path, "w") as fh:
        json.dump(m.to_dict(), fh, indent=1)
        fh.write("\n")


def load_json(path):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: invalid JSON ({exc})") from None
    return from_dict(data)


def save_csv(m, path):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x", "y", "z"])
        writer.writerows([[repr(c) for c in row] for row in m.vectors.tolist()])
