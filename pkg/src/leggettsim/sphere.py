"""Unit vectors on the sphere: construction, seeded sampling, Fibonacci grids.

All vectors are float64 numpy arrays. Single vectors have shape (3,),
batches have shape (n, 3). Random streams are counter-based (Philox) and
keyed by a (seed, stream_id) pair, so a given stream is reproducible
regardless of how work is scheduled.
"""

from __future__ import annotations

import numpy as np

UNIT_NORM_TOL = 1e-12

# Fractional part of the golden ratio, used as the azimuth increment of the
# Fibonacci lattice.
GOLDEN_RATIO_CONJUGATE = (np.sqrt(5.0) - 1.0) / 2.0

_MIN_NORM = 1e-8


def make_rng(seed: int, stream_id: int = 0, block: int = 0) -> np.random.Generator:
    """Counter-based generator for the stream (seed, stream_id).

    ``block`` jumps the Philox counter to a disjoint region, letting one
    logical stream be split into independent sub-streams whose outputs do
    not depend on execution order.
    """
    bits = np.random.Philox(key=[seed, stream_id], counter=[0, block, 0, 0])
    return np.random.Generator(bits)


def normalize(vec) -> np.ndarray:
    """Scale a 3-vector (or (n, 3) batch) to unit norm."""
    arr = np.asarray(vec, dtype=np.float64)
    norm = np.linalg.norm(arr, axis=-1, keepdims=True)
    if np.any(norm < _MIN_NORM):
        raise ValueError("cannot normalize a (near-)zero vector")
    return arr / norm


def unit_vector(x: float, y: float, z: float) -> np.ndarray:
    """Construct a unit vector from components, normalizing them."""
    return normalize([x, y, z])


def is_unit(vec, tol: float = UNIT_NORM_TOL) -> bool:
    arr = np.asarray(vec, dtype=np.float64)
    return bool(np.all(np.abs(np.sum(arr * arr, axis=-1) - 1.0) <= tol))


def dot(a, b) -> float:
    """Inner product of two unit vectors, clamped to [-1, 1].

    The clamp absorbs rounding so that (1 + dot)/2 is always a valid
    probability downstream.
    """
    val = float(np.dot(np.asarray(a, dtype=np.float64), np.asarray(b, dtype=np.float64)))
    return min(1.0, max(-1.0, val))


def dots(vecs, ref) -> np.ndarray:
    """Row-wise clamped inner products of an (n, 3) batch against a vector
    (or a matching (n, 3) batch)."""
    arr = np.asarray(vecs, dtype=np.float64)
    ref = np.asarray(ref, dtype=np.float64)
    if ref.ndim == 1:
        vals = arr @ ref
    else:
        vals = np.sum(arr * ref, axis=-1)
    return np.clip(vals, -1.0, 1.0)


def random_unit_vector(rng: np.random.Generator) -> np.ndarray:
    """One uniform point on the sphere (normalized Gaussian triple)."""
    return random_unit_vectors(rng, 1)[0]


def random_unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    """n uniform points on the sphere, shape (n, 3).

    Gaussian triples are normalized; draws with norm below 1e-8 are
    redrawn (the rejection loop terminates with probability 1).
    """
    if n < 0:
        raise ValueError("n must be nonnegative")
    out = rng.standard_normal((n, 3))
    norms = np.linalg.norm(out, axis=1)
    bad = norms < _MIN_NORM
    while np.any(bad):
        out[bad] = rng.standard_normal((int(bad.sum()), 3))
        norms[bad] = np.linalg.norm(out[bad], axis=1)
        bad = norms < _MIN_NORM
    return out / norms[:, None]


def sphere_grid(n: int) -> np.ndarray:
    """Deterministic Fibonacci lattice of n points on the sphere, shape (n, 3).

    z_k = 1 - 2(k + 0.5)/n, azimuth_k = 2*pi*k*phi with phi the golden
    ratio conjugate.
    """
    if n < 1:
        raise ValueError("sphere_grid requires n >= 1")
    k = np.arange(n, dtype=np.float64)
    z = 1.0 - 2.0 * (k + 0.5) / n
    r = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    azimuth = 2.0 * np.pi * k * GOLDEN_RATIO_CONJUGATE
    pts = np.column_stack([r * np.cos(azimuth), r * np.sin(azimuth), z])
    # renormalize to keep the unit-norm invariant at 1e-12 even for large n
    return pts / np.linalg.norm(pts, axis=1)[:, None]
