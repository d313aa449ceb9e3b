"""Quantum-dot source imperfections under three-fold post-selection.

Each input slot fires independently: nothing with probability
``1 - p1 - p2``, one signal photon with probability ``p1``, or the signal plus
one noise photon with probability ``p2``. Noise photons are orthogonal to the
signals and to each other. Every photon then survives with probability
``eta`` (balanced losses commute with the interferometer), and only events
with exactly three detected photons are kept.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateError, DomainError
from .gram import GramMatrix
from .interference import OutputDistribution, PhotonConfig, distribution_for_inputs
from .matrices import UNITARY_TOL

DEFAULT_G2 = 0.017
DEFAULT_BRIGHTNESS = 0.13
DEFAULT_ETA = 0.011


def g2_from_probabilities(p1: float, p2: float) -> float:
    """``g2 = 2 p2 / (p1 + 2 p2)^2``; vanishes with the two-photon term."""
    mean = p1 + 2 * p2
    if mean <= 0:
        raise DomainError("source emits no photons")
    return 2 * p2 / mean**2


def split_brightness(g2: float, brightness: float) -> tuple[float, float]:
    """Split ``brightness = p1 + p2`` into one- and two-photon probabilities.

    Solves ``g2 (B + p2)^2 = 2 p2`` for the smaller root.
    """
    if not 0.0 <= g2 < 0.5:
        raise DomainError(f"g2 must lie in [0, 0.5), got {g2}")
    if not 0.0 < brightness <= 1.0:
        raise DomainError(f"brightness must lie in (0, 1], got {brightness}")
    if g2 == 0.0:
        return brightness, 0.0
    disc = 1.0 - 2.0 * g2 * brightness
    if disc < 0:
        raise DomainError(f"no source model reproduces g2={g2} at brightness {brightness}")
    # rationalized form of ((1 - g2 B) - sqrt(1 - 2 g2 B)) / g2, stable for small g2
    p2 = g2 * brightness**2 / ((1.0 - g2 * brightness) + math.sqrt(disc))
    p1 = brightness - p2
    if p2 > p1:
        raise DomainError(f"g2={g2} at brightness {brightness} implies more two-photon than one-photon events")
    return p1, p2


@dataclass(frozen=True)
class SourceModel:
    g2: float
    p1: float
    p2: float
    eta: float = DEFAULT_ETA

    def __post_init__(self):
        for name in ("p1", "p2", "eta"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} must lie in [0, 1], got {v}")
        if self.p1 + self.p2 > 1.0 + 1e-12:
            raise DomainError("p1 + p2 exceeds 1")
        if self.p1 + self.p2 > 0 and abs(g2_from_probabilities(self.p1, self.p2) - self.g2) > 1e-9:
            raise DomainError(
                f"g2={self.g2} inconsistent with p1={self.p1}, p2={self.p2} "
                f"(implies {g2_from_probabilities(self.p1, self.p2):.6g})"
            )

    @classmethod
    def from_brightness(
        cls, g2: float = DEFAULT_G2, brightness: float = DEFAULT_BRIGHTNESS, eta: float = DEFAULT_ETA
    ) -> "SourceModel":
        p1, p2 = split_brightness(g2, brightness)
        return cls(g2, p1, p2, eta)

    def slot_weights(self) -> dict[tuple[int, int], float]:
        """Probability of (signal survives, noise survives) for one slot."""
        p0 = 1.0 - self.p1 - self.p2
        e = self.eta
        return {
            (0, 0): p0 + self.p1 * (1 - e) + self.p2 * (1 - e) ** 2,
            (1, 0): self.p1 * e + self.p2 * e * (1 - e),
            (0, 1): self.p2 * (1 - e) * e,
            (1, 1): self.p2 * e * e,
        }


def noisy_distribution(
    u: np.ndarray,
    cfg: PhotonConfig,
    g: GramMatrix,
    src: SourceModel,
    *,
    at_least: bool = False,
    unitary_tol: float = UNITARY_TOL,
) -> OutputDistribution:
    """Post-selected output distribution including multiphoton noise and loss.

    With ``at_least=True`` events with more than ``n`` detected photons are
    kept as well (their outcomes then carry more than ``n`` photons).
    """
    if src.eta == 0.0:
        raise DegenerateError("eta = 0: no event survives post-selection")
    n = cfg.n
    gram = g.matrix if isinstance(g, GramMatrix) else np.asarray(g, dtype=np.complex128)
    weights = src.slot_weights()
    u = np.asarray(u, dtype=np.complex128)

    mixture: dict[tuple[int, ...], float] = {}
    total_weight = 0.0
    clamped = 0.0
    max_imag = 0.0
    notes: list[str] = []
    for pattern in itertools.product(weights, repeat=n):
        detected = sum(s + x for s, x in pattern)
        if detected < n or (detected > n and not at_least):
            continue
        w = math.prod(weights[s] for s in pattern)
        if w == 0.0:
            continue
        signals = [i for i, (s, _) in enumerate(pattern) if s]
        noise_modes = [cfg.input_modes[i] for i, (_, x) in enumerate(pattern) if x]
        inputs = [cfg.input_modes[i] for i in signals] + noise_modes
        ext = np.eye(len(inputs), dtype=np.complex128)
        ext[: len(signals), : len(signals)] = gram[np.ix_(signals, signals)]
        order = np.argsort(inputs, kind="stable")
        inputs = [inputs[k] for k in order]
        ext = ext[np.ix_(order, order)]
        cond = distribution_for_inputs(u, inputs, ext, unitary_tol=unitary_tol)
        clamped += w * cond.clamped_mass
        max_imag = max(max_imag, cond.max_imag)
        for msg in cond.warnings:
            if msg not in notes:
                notes.append(msg)
        total_weight += w
        for occ, p in cond.probs.items():
            mixture[occ] = mixture.get(occ, 0.0) + w * p
    if total_weight == 0.0:
        raise DegenerateError("no emission pattern survives post-selection")
    ordered = sorted(mixture, key=lambda o: (sum(o), tuple(-c for c in o)))
    probs = {occ: mixture[occ] / total_weight for occ in ordered}
    return OutputDistribution(probs, clamped / total_weight, max_imag, notes)


def _resolve_probability(k: int, r: float) -> float:
    """Chance that k photons in one arm split over two threshold detectors are
    not all routed to the same detector."""
    if k <= 1:
        return 1.0
    return 1.0 - r**k - (1.0 - r) ** k


def pseudo_pnr_correction(
    raw_counts: Mapping[Sequence[int], float],
    splitter_ratio: float,
    efficiencies: Sequence[float] | None = None,
) -> OutputDistribution:
    """Undo the resolving bias of a pseudo-number-resolving detection stage.

    Each bin is divided by its probability of being registered with the
    stated photon numbers (and by ``prod_j eff_j^n_j`` for per-arm detection
    efficiencies), then the result is normalized.
    """
    if not 0.0 < splitter_ratio < 1.0:
        raise DomainError(f"splitter ratio must lie in (0, 1), got {splitter_ratio}")
    items = [(tuple(int(c) for c in occ), float(v)) for occ, v in raw_counts.items()]
    if not items or sum(v for _, v in items) <= 0:
        raise DegenerateError("no counts to correct")
    m = len(items[0][0])
    eff = np.ones(m) if efficiencies is None else np.asarray(efficiencies, dtype=float)
    if eff.shape != (m,) or np.any(eff <= 0):
        raise DomainError("need one positive efficiency per output arm")
    corrected = {}
    for occ, v in items:
        p = math.prod(_resolve_probability(k, splitter_ratio) for k in occ)
        p *= math.prod(float(eff[j]) ** k for j, k in enumerate(occ))
        corrected[occ] = v / p
    total = math.fsum(corrected.values())
    return OutputDistribution({occ: v / total for occ, v in corrected.items()})
