"""Hidden-variable models: subensemble distributions and conditional laws.

A model is a settings-independent distribution over hidden vector pairs
(u, v) together with a coupling rule that fixes the joint conditional law
of the two +/-1 outcomes. The conditional marginals are always the
Malus-law values P(A=1) = (1 + u.a)/2 and P(B=1) = (1 + v.b)/2; the
coupling only decides how the two outcomes correlate beyond that.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels, sphere

WEIGHT_SUM_TOL = 1e-12
# JSON loads renormalize weight sums within this tolerance, reject beyond it.
LOAD_RENORM_TOL = 1e-9


class Coupling(enum.Enum):
    """Joint conditional law for (A, B) given fixed marginals."""

    INDEPENDENT = "independent"
    COMONOTONE = "comonotone"
    ANTIMONOTONE = "antimonotone"

    @property
    def code(self) -> int:
        return {
            Coupling.INDEPENDENT: kernels.COUPLING_INDEPENDENT,
            Coupling.COMONOTONE: kernels.COUPLING_COMONOTONE,
            Coupling.ANTIMONOTONE: kernels.COUPLING_ANTIMONOTONE,
        }[self]


@dataclass(frozen=True)
class SettingsPair:
    """Measurement directions chosen by the two experimenters."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.a, dtype=np.float64)
        b = np.asarray(self.b, dtype=np.float64)
        if not (sphere.is_unit(a) and sphere.is_unit(b)):
            raise ValueError("settings must be unit vectors")
        a.setflags(write=False)
        b.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class OutcomePair:
    """One run's pair of +/-1 results."""

    A: int
    B: int

    def __post_init__(self):
        if self.A not in (-1, 1) or self.B not in (-1, 1):
            raise ValueError("outcomes must be -1 or +1")


@dataclass(frozen=True)
class SubensembleDistribution:
    """Atomic (weighted point-mass) distribution over hidden pairs (u, v).

    Arrays are immutable after construction; zero-weight atoms are pruned
    and weights must sum to 1 within 1e-12. Nothing in the structure can
    reference measurement settings.
    """

    u: np.ndarray
    v: np.ndarray
    w: np.ndarray

    def __post_init__(self):
        u = np.atleast_2d(np.asarray(self.u, dtype=np.float64))
        v = np.atleast_2d(np.asarray(self.v, dtype=np.float64))
        w = np.atleast_1d(np.asarray(self.w, dtype=np.float64))
        if u.shape != v.shape or u.shape[0] != w.shape[0] or u.shape[1] != 3:
            raise ValueError("atom arrays must have shapes (m, 3), (m, 3), (m,)")
        if w.shape[0] == 0:
            raise ValueError("distribution needs at least one atom")
        if np.any(w < 0):
            raise ValueError("atom weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > WEIGHT_SUM_TOL:
            raise ValueError("atom weights must sum to 1 within 1e-12")
        if not (sphere.is_unit(u) and sphere.is_unit(v)):
            raise ValueError("hidden vectors must be unit vectors")
        keep = w > 0.0
        u, v, w = u[keep], v[keep], w[keep]
        for arr in (u, v, w):
            arr.setflags(write=False)
        object.__setattr__(self, "u", u)
        object.__setattr__(self, "v", v)
        object.__setattr__(self, "w", w)

    @property
    def n_atoms(self) -> int:
        return self.w.shape[0]


def point_mass(u, v) -> SubensembleDistribution:
    """Single-atom distribution at (u, v)."""
    return SubensembleDistribution(np.asarray(u)[None, :], np.asarray(v)[None, :], [1.0])


def isotropic_product(n_atoms: int, rng: np.random.Generator) -> SubensembleDistribution:
    """u and v independent uniform on the sphere, equal weights."""
    u = sphere.random_unit_vectors(rng, n_atoms)
    v = sphere.random_unit_vectors(rng, n_atoms)
    return SubensembleDistribution(u, v, np.full(n_atoms, 1.0 / n_atoms))


def mirrored(n_atoms: int, rng: np.random.Generator) -> SubensembleDistribution:
    """v = -u with u uniform on the sphere, equal weights."""
    u = sphere.random_unit_vectors(rng, n_atoms)
    return SubensembleDistribution(u, -u, np.full(n_atoms, 1.0 / n_atoms))


def mirrored_grid(n_atoms: int) -> SubensembleDistribution:
    """Deterministic mirrored distribution on a Fibonacci lattice."""
    u = sphere.sphere_grid(n_atoms)
    return SubensembleDistribution(u, -u, np.full(n_atoms, 1.0 / n_atoms))


@dataclass(frozen=True)
class LeggettModel:
    """A subensemble distribution plus a conditional coupling rule."""

    distribution: SubensembleDistribution
    coupling: Coupling

    def to_dict(self) -> dict:
        d = self.distribution
        return {
            "atoms": [
                {"u": list(map(float, d.u[i])), "v": list(map(float, d.v[i])), "w": float(d.w[i])}
                for i in range(d.n_atoms)
            ],
            "coupling": self.coupling.value,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "LeggettModel":
        atoms = data["atoms"]
        u = np.array([atom["u"] for atom in atoms], dtype=np.float64)
        v = np.array([atom["v"] for atom in atoms], dtype=np.float64)
        w = np.array([atom["w"] for atom in atoms], dtype=np.float64)
        total = float(w.sum())
        if abs(total - 1.0) > LOAD_RENORM_TOL:
            raise ValueError(f"atom weights sum to {total!r}, outside the 1e-9 load tolerance")
        w = w / total
        u = sphere.normalize(u)
        v = sphere.normalize(v)
        return cls(SubensembleDistribution(u, v, w), Coupling(data["coupling"]))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict()), encoding="utf-8")

    @classmethod
    def load(cls, path) -> "LeggettModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def conditional_marginals(u, v, settings: SettingsPair) -> tuple[float, float]:
    """Malus-law conditional probabilities (P(A=1), P(B=1)) given (u, v)."""
    pa = (1.0 + sphere.dot(u, settings.a)) / 2.0
    pb = (1.0 + sphere.dot(v, settings.b)) / 2.0
    return pa, pb


def joint_conditional_law(pa: float, pb: float, coupling: Coupling) -> np.ndarray:
    """Joint law over outcome pairs, ordered (++, +-, -+, --).

    All three couplings reproduce the marginals exactly; they differ only
    in where the off-diagonal mass goes.
    """
    if not (0.0 <= pa <= 1.0 and 0.0 <= pb <= 1.0):
        raise ValueError("marginal probabilities must lie in [0, 1]")
    if coupling is Coupling.INDEPENDENT:
        p_pp = pa * pb
    elif coupling is Coupling.COMONOTONE:
        p_pp = min(pa, pb)
    else:
        p_pp = pa - min(pa, 1.0 - pb)
    p_pm = pa - p_pp
    p_mp = pb - p_pp
    p_mm = 1.0 - pa - pb + p_pp
    law = np.array([p_pp, p_pm, p_mp, p_mm])
    # guard against rounding at the boundary of the probability simplex
    return np.clip(law, 0.0, 1.0)


def _conditional_correlations(alpha: np.ndarray, beta: np.ndarray, coupling: Coupling) -> np.ndarray:
    """E(AB | u, v) per atom from the joint conditional law.

    With marginals (1+alpha)/2 and (1+beta)/2 the three couplings give
    alpha*beta, 1 - |alpha - beta| and -1 + |alpha + beta| respectively;
    computed here via the law's p_pp term so the same formula covers all.
    """
    pa = (1.0 + alpha) / 2.0
    pb = (1.0 + beta) / 2.0
    if coupling is Coupling.INDEPENDENT:
        p_pp = pa * pb
    elif coupling is Coupling.COMONOTONE:
        p_pp = np.minimum(pa, pb)
    else:
        p_pp = pa - np.minimum(pa, 1.0 - pb)
    # E(AB) = 4 p_pp - 2 pa - 2 pb + 1
    return 4.0 * p_pp - 2.0 * pa - 2.0 * pb + 1.0


def exact_model_correlation(model: LeggettModel, settings: SettingsPair) -> float:
    """Closed-form E(AB) for the model: atom-weighted conditional means."""
    d = model.distribution
    alpha = sphere.dots(d.u, settings.a)
    beta = sphere.dots(d.v, settings.b)
    value = float(d.w @ _conditional_correlations(alpha, beta, model.coupling))
    return min(1.0, max(-1.0, value))


def exact_model_marginals(model: LeggettModel, settings: SettingsPair) -> tuple[float, float]:
    """Closed-form (E(A), E(B)) for the model."""
    d = model.distribution
    mean_a = float(d.w @ sphere.dots(d.u, settings.a))
    mean_b = float(d.w @ sphere.dots(d.v, settings.b))
    return mean_a, mean_b


def sample_outcome_arrays(
    model: LeggettModel, settings: SettingsPair, n: int, rng: np.random.Generator
) -> tuple[np.ndarray, np.ndarray]:
    """n independent draws of (A, B) as two +/-1 float arrays."""
    if n < 1:
        raise ValueError("sample count must be >= 1")
    d = model.distribution
    alpha = sphere.dots(d.u, settings.a)
    beta = sphere.dots(d.v, settings.b)
    pa_atoms = (1.0 + alpha) / 2.0
    pb_atoms = (1.0 + beta) / 2.0
    cdf = np.cumsum(d.w)
    cdf[-1] = 1.0
    idx = np.searchsorted(cdf, rng.random(n), side="right")
    u1 = rng.random(n)
    u2 = rng.random(n)  # unused by the non-product couplings, drawn for stream stability
    return kernels.draw_outcomes(pa_atoms[idx], pb_atoms[idx], u1, u2, model.coupling.code)


def sample_outcomes(model: LeggettModel, settings: SettingsPair, rng: np.random.Generator) -> OutcomePair:
    """One draw: pick an atom by weight, then an outcome pair from its law."""
    a, b = sample_outcome_arrays(model, settings, 1, rng)
    return OutcomePair(int(a[0]), int(b[0]))
