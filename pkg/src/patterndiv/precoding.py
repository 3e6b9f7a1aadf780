"""Two-layer precoding on top of a pattern assignment.

The first layer keeps, for each cluster, the DFT directions of its support
that no co-pattern cluster uses; since DFT columns are orthonormal this nulls
inter-cluster interference exactly.  The second layer is zero forcing on the
reduced effective channel.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .channel import SupportSet, dft_matrix
from .coloring import PatternAssignment

__all__ = [
    "PreBeamformer",
    "SecondLayerPrecoder",
    "SingularChannelError",
    "prebeamformer",
    "gamma_eta",
    "effective_channel",
    "residual_ici",
    "zf_precoder",
    "cluster_rate",
    "feasibility",
]


class SingularChannelError(np.linalg.LinAlgError):
    """The effective channel of the served users is rank deficient."""


@dataclass(frozen=True)
class PreBeamformer:
    """First-layer precoder of cluster ``clusterId``, given as DFT column indices."""

    clusterId: int
    columns: tuple[int, ...]

    @property
    def Ng(self) -> int:
        return len(self.columns)

    def matrix(self, M: int) -> np.ndarray:
        """The ``M x Ng`` matrix of selected DFT columns."""
        return dft_matrix(M)[:, list(self.columns)]


@dataclass(frozen=True)
class SecondLayerPrecoder:
    matrix: np.ndarray
    powerShare: float = 1.0


def prebeamformer(supports: Sequence[SupportSet], assignment: PatternAssignment, g: int) -> PreBeamformer:
    """DFT columns in cluster ``g``'s support unused by its co-pattern clusters."""
    if assignment.G != len(supports):
        raise ValueError("assignment and support list disagree on the number of clusters")
    taken = set()
    for h in assignment.co_pattern(g):
        taken |= supports[h].members
    return PreBeamformer(g, tuple(m for m in supports[g].indices if m not in taken))


def gamma_eta(g: int, g2: int, patternSupports: Sequence[SupportSet]) -> tuple[int, int]:
    """Pairwise terms of the dimension identity ``Ng + Ng2 = gamma - eta``.

    ``g`` and ``g2`` index into ``patternSupports``, the supports of every
    cluster on one pattern.  ``gamma`` depends on the pair only; ``eta``
    accounts for the directions the rest of the pattern ``O`` removes from
    them::

        eta = |Jg & O| + |Jg2 & O| - 2 |Jg & Jg2 & O|

    An index shared by both clusters and by ``O`` is already excluded by
    ``gamma`` for each of the two, hence the factor 2 on the last term.
    """
    if g == g2:
        raise ValueError("gamma/eta need two distinct clusters")
    Jg, Jh = patternSupports[g].members, patternSupports[g2].members
    others = set()
    for i, J in enumerate(patternSupports):
        if i != g and i != g2:
            others |= J.members
    gamma = len(Jg) + len(Jh) - 2 * len(Jg & Jh)
    eta = len(Jg & others) + len(Jh & others) - 2 * len(Jg & Jh & others)
    return gamma, eta


def effective_channel(H: np.ndarray, pre: PreBeamformer, M: int) -> np.ndarray:
    """Reduced ``Ng x Kg`` channel ``U1^H H``."""
    if pre.Ng == 0:
        raise ValueError(f"cluster {pre.clusterId} has no interference-free direction (Ng = 0)")
    H = np.asarray(H)
    if H.shape[0] != M:
        raise ValueError(f"channel has {H.shape[0]} rows, expected M={M}")
    return pre.matrix(M).conj().T @ H


def residual_ici(H_other: np.ndarray, pre_g: PreBeamformer, relative: bool = False) -> float:
    """Frobenius norm of the leakage ``H_other^H U1_g``.

    With ``relative=True`` the norm is divided by ``||H_other||_F``.
    """
    H_other = np.asarray(H_other)
    if pre_g.Ng == 0:
        return 0.0
    leak = np.linalg.norm(H_other.conj().T @ pre_g.matrix(H_other.shape[0]))
    if relative:
        scale = np.linalg.norm(H_other)
        return float(leak / scale) if scale > 0 else 0.0
    return float(leak)


def zf_precoder(Heff: np.ndarray, Vg: int, powerShare: float = 1.0,
                rcond: float = 1e-10) -> SecondLayerPrecoder:
    """Zero-forcing second layer for the first ``Vg`` users of the cluster.

    Columns of ``Heff (Heff^H Heff)^-1`` are normalized to unit norm.

    Raises
    ------
    SingularChannelError
        If the served users' effective channel is rank deficient.
    """
    Heff = np.asarray(Heff)
    Ng, Kg = Heff.shape
    if not 1 <= Vg <= min(Ng, Kg):
        raise ValueError(f"need 1 <= Vg <= min(Ng, Kg) = {min(Ng, Kg)}, got Vg={Vg}")
    served = Heff[:, :Vg]
    s = np.linalg.svd(served, compute_uv=False)
    if s[-1] <= rcond * max(s[0], np.finfo(float).tiny):
        raise SingularChannelError("effective channel of the served users is rank deficient")
    gram = served.conj().T @ served
    U = served @ np.linalg.inv(gram)
    U = U / np.linalg.norm(U, axis=0, keepdims=True)
    return SecondLayerPrecoder(U, powerShare)


def cluster_rate(Heff: np.ndarray, U2: Union[SecondLayerPrecoder, np.ndarray], Pt: float,
                 Ktotal: int, sigma2: float) -> float:
    """Rate in bit/s/Hz: ``log2 det(I + Pt/(K sigma2) A A^H)`` with ``A = Heff^H U2``."""
    U = U2.matrix if isinstance(U2, SecondLayerPrecoder) else np.asarray(U2)
    A = np.asarray(Heff).conj().T @ U
    snr = Pt / (Ktotal * sigma2)
    sign, logdet = np.linalg.slogdet(np.eye(A.shape[0]) + snr * (A @ A.conj().T))
    return max(float(logdet / np.log(2.0)), 0.0)


def feasibility(pre: PreBeamformer, Kg: int) -> bool:
    """Whether the cluster keeps at least one clean direction per user."""
    return pre.Ng >= Kg
