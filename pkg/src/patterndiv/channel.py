"""One-ring channel model with the DFT eigenspace approximation.

Clusters are described by the geometry of their scattering ring.  Under the
circulant approximation of the channel covariance of a ULA, the eigenvectors
of a cluster's covariance are columns of the unitary DFT matrix, selected by
the cluster's *support set*; the eigenvalues follow the angular power
spectrum evaluated on that support.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "ConfigError",
    "SystemConfig",
    "ClusterGeometry",
    "SupportSet",
    "ClusterSpectrum",
    "dft_column",
    "dft_matrix",
    "support_set",
    "eigen_spectrum",
    "sample_channel",
    "covariance",
    "place_clusters",
]

SECTOR_HALF_WIDTH = np.pi / 3

# Slack applied to the support interval so grid points that sit on an
# endpoint analytically are not lost to rounding of sin().
_ENDPOINT_TOL = 1e-12
# Relative clamp of xi^2 below D^2 where the spectrum is singular.
_EDGE_CLAMP = 1e-9


class ConfigError(ValueError):
    """Invalid configuration; ``errors`` lists every violated field."""

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


@dataclass(frozen=True)
class SystemConfig:
    """System parameters of the downlink.

    Defaults follow the simulation table of the reference setup: ``Pt`` is
    10 dB expressed linearly and ``sigma2`` is 1, so ``Pt`` reads as an SNR.
    """

    M: int = 128
    D: float = 0.5
    Pt: float = 10.0
    sigma2: float = 1.0
    Kg: int = 2
    Vg: int = 2
    P: int = 4
    epsilon: float = 1.0
    wMin: float = 0.0
    seed: int = 0

    def __post_init__(self):
        errors = self.violations()
        if errors:
            raise ConfigError(errors)

    def violations(self) -> list[str]:
        try:
            return self._violations()
        except (TypeError, ValueError) as exc:
            return [f"system parameters have the wrong type: {exc}"]

    def _violations(self) -> list[str]:
        errors = []
        if int(self.M) != self.M or self.M < 1:
            errors.append(f"M must be a positive integer, got {self.M!r}")
        if int(self.P) != self.P or self.P < 1:
            errors.append(f"P must be a positive integer, got {self.P!r}")
        if int(self.Kg) != self.Kg or self.Kg < 1:
            errors.append(f"Kg must be a positive integer, got {self.Kg!r}")
        if int(self.Vg) != self.Vg or not 1 <= self.Vg <= self.Kg:
            errors.append(f"Vg must satisfy 1 <= Vg <= Kg, got {self.Vg!r}")
        if not 0 < self.epsilon <= 1:
            errors.append(f"epsilon must lie in (0, 1], got {self.epsilon!r}")
        if not self.D > 0:
            errors.append(f"D must be positive, got {self.D!r}")
        if not self.wMin >= 0:
            errors.append(f"wMin must be non-negative, got {self.wMin!r}")
        if not self.Pt > 0:
            errors.append(f"Pt must be positive, got {self.Pt!r}")
        if not self.sigma2 > 0:
            errors.append(f"sigma2 must be positive, got {self.sigma2!r}")
        if int(self.seed) != self.seed or not 0 <= self.seed < 2**64:
            errors.append(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        return errors

    def total_users(self, G: int) -> int:
        return G * self.Kg


@dataclass(frozen=True)
class ClusterGeometry:
    """Scattering ring of one user cluster.

    Attributes
    ----------
    id : int
        Cluster index ``g`` (0-based).
    theta : float
        Central azimuth of the ring in radians, within the 120 degree sector.
    delta : float
        Angular spread in radians.
    distance : float
        Distance from the base station to the ring center, in meters.
    ringRadius : float
        Radius of the scattering ring, in meters.
    """

    id: int
    theta: float
    delta: float
    distance: float = float("nan")
    ringRadius: float = float("nan")

    def __post_init__(self):
        if not -SECTOR_HALF_WIDTH - 1e-12 <= self.theta <= SECTOR_HALF_WIDTH + 1e-12:
            raise ValueError(f"theta={self.theta!r} is outside the sector [-pi/3, pi/3]")
        if not 0 < self.delta < np.pi / 2:
            raise ValueError(f"delta={self.delta!r} must lie in (0, pi/2)")

    @classmethod
    def from_ring(cls, id: int, theta: float, distance: float, ringRadius: float) -> "ClusterGeometry":
        """Build a geometry whose spread is ``arctan(ringRadius / distance)``."""
        if not distance > 0:
            raise ValueError(f"distance must be positive, got {distance!r}")
        if not ringRadius > 0:
            raise ValueError(f"ring radius must be positive, got {ringRadius!r}")
        delta = float(np.arctan(ringRadius / distance))
        return cls(id=id, theta=float(theta), delta=delta,
                   distance=float(distance), ringRadius=float(ringRadius))


@dataclass(frozen=True)
class SupportSet:
    """Sorted set of DFT column indices carrying a cluster's energy."""

    indices: tuple[int, ...]
    M: int
    members: frozenset = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        idx = tuple(sorted(set(int(i) for i in self.indices)))
        if idx and (idx[0] < 0 or idx[-1] >= self.M):
            raise ValueError(f"support indices must lie in [0, {self.M - 1}], got {idx}")
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "members", frozenset(idx))

    @classmethod
    def of(cls, indices: Iterable[int], M: int) -> "SupportSet":
        return cls(tuple(indices), M)

    @classmethod
    def parse(cls, text: str, M: int) -> "SupportSet":
        """Inverse of ``str()``: comma-separated indices, possibly empty."""
        text = text.strip()
        if not text:
            return cls((), M)
        return cls(tuple(int(tok) for tok in text.split(",")), M)

    @property
    def rank(self) -> int:
        return len(self.indices)

    def __len__(self):
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __contains__(self, m):
        return m in self.members

    def __str__(self):
        return ",".join(str(i) for i in self.indices)


@dataclass(frozen=True)
class ClusterSpectrum:
    """Support set together with the eigenvalue attached to each index."""

    support: SupportSet
    eigenvalues: np.ndarray

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=float)
        if lam.shape != (self.support.rank,):
            raise ValueError("one eigenvalue per support index is required")
        if not (np.all(np.isfinite(lam)) and np.all(lam > 0)):
            raise ValueError("eigenvalues must be finite and strictly positive")
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)

    @property
    def M(self) -> int:
        return self.support.M

    def basis(self) -> np.ndarray:
        """The ``M x r`` DFT sub-matrix ``E_g``."""
        return dft_matrix(self.M)[:, list(self.support.indices)]


def dft_column(M: int, m: int) -> np.ndarray:
    """Column ``m`` of the unitary ``M``-point DFT matrix.

    Entry ``l`` is ``exp(-2j*pi*l*m/M) / sqrt(M)``.
    """
    if not 0 <= m < M:
        raise IndexError(f"DFT column {m} out of range for M={M}")
    l = np.arange(M)
    return np.exp(-2j * np.pi * ((l * m) % M) / M) / np.sqrt(M)


@functools.lru_cache(maxsize=16)
def dft_matrix(M: int) -> np.ndarray:
    """Unitary ``M x M`` DFT matrix (cached, read-only)."""
    l = np.arange(M)
    F = np.exp(-2j * np.pi * (np.outer(l, l) % M) / M) / np.sqrt(M)
    F.setflags(write=False)
    return F


def _normalized_frequencies(M: int) -> np.ndarray:
    return np.arange(M) / M - 0.5


def support_set(geom: ClusterGeometry, M: int, D: float) -> SupportSet:
    """DFT indices whose normalized frequency falls in the cluster's ASR.

    Index ``m`` belongs to the set when ``m/M - 1/2`` lies in the closed
    interval ``[-D sin(theta + delta), -D sin(theta - delta)]``.
    """
    lo = -D * np.sin(geom.theta + geom.delta)
    hi = -D * np.sin(geom.theta - geom.delta)
    xi = _normalized_frequencies(M)
    inside = (xi >= lo - _ENDPOINT_TOL) & (xi <= hi + _ENDPOINT_TOL)
    return SupportSet(tuple(np.flatnonzero(inside).tolist()), M)


def eigen_spectrum(geom: ClusterGeometry, support: SupportSet, D: float, M: int) -> ClusterSpectrum:
    """Angular power spectrum sampled on ``support``, scaled to trace ``M``."""
    if support.rank == 0:
        raise ValueError(f"cluster {geom.id} has an empty support set")
    xi = _normalized_frequencies(M)[list(support.indices)]
    xi2 = np.minimum(xi ** 2, D ** 2 * (1.0 - _EDGE_CLAMP))
    raw = 1.0 / (2.0 * geom.delta * np.sqrt(D ** 2 - xi2))
    return ClusterSpectrum(support, raw * (M / raw.sum()))


def sample_channel(spectrum: ClusterSpectrum, Kg: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``Kg`` i.i.d. channel vectors ``E Lambda^(1/2) w`` as an ``M x Kg`` matrix."""
    r = spectrum.support.rank
    w = (rng.standard_normal((r, Kg)) + 1j * rng.standard_normal((r, Kg))) / np.sqrt(2.0)
    return spectrum.basis() @ (np.sqrt(spectrum.eigenvalues)[:, None] * w)


def covariance(spectrum: ClusterSpectrum) -> np.ndarray:
    E = spectrum.basis()
    return (E * spectrum.eigenvalues) @ E.conj().T


def place_clusters(G: int, cellRadius: float, ringRadius: float, minDistance: float,
                   rng: np.random.Generator) -> list[ClusterGeometry]:
    """Drop ``G`` clusters uniformly over the sector annulus.

    Azimuths are uniform on ``[-pi/3, pi/3]``; distances are drawn so that
    positions are uniform in area between ``minDistance`` and ``cellRadius``.
    """
    if G < 1:
        raise ValueError("G must be at least 1")
    if not 0 < minDistance < cellRadius:
        raise ValueError("require 0 < minDistance < cellRadius")
    theta = rng.uniform(-SECTOR_HALF_WIDTH, SECTOR_HALF_WIDTH, size=G)
    dist = np.sqrt(rng.uniform(minDistance ** 2, cellRadius ** 2, size=G))
    return [ClusterGeometry.from_ring(g, theta[g], dist[g], ringRadius) for g in range(G)]


def support_sets(geoms: Sequence[ClusterGeometry], M: int, D: float) -> list[SupportSet]:
    return [support_set(geom, M, D) for geom in geoms]
