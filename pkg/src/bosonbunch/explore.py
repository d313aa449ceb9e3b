"""Campaigns built on the interference engine: counter-intuitive interferometer
search, antibunching tables for Fourier and Hadamard devices, tritter bounds
and the state-preparation scans.
"""

from __future__ import annotations

import math
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.optimize import minimize_scalar

from .errors import DomainError, ShapeError
from .gram import (
    GramMatrix,
    StatePrepParams,
    average_overlap,
    bargmann_invariant,
    gram_from_states,
    states_from_prep,
    triad_family,
    triad_phase,
)
from .interference import (
    NonUnitaryWarning,
    PhotonConfig,
    antibunching_probability,
    distribution_for_inputs,
    output_distribution,
)
from .matrices import (
    format_complex,
    fourier_matrix,
    haar_random_unitary,
    is_unitary,
    sylvester_hadamard,
)
from .report import csv_text, key_value_text

#: a gap must fall below this to count as counter-intuitive
GAP_THRESHOLD = -1e-12
MAX_OFFENDERS = 10
VERIFY_MAX_N = 5
SEARCH_CHUNK = 500

PB_MAX = 11 / 12
PB_MIN = 2 / 3

TABLE_HEADER = ("n", "dist", "indist", "gap", "ratio")


def pb_gap(u: np.ndarray) -> float:
    """``p_dist(1..1) - p_indist(1..1)`` for one photon per mode.

    Negative values mean distinguishable photons bunch more than
    indistinguishable ones.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ShapeError(f"gap needs a square matrix, got shape {u.shape}")
    return antibunching_probability(u, "distinguishable") - antibunching_probability(u, "indistinguishable")


# -- random search ----------------------------------------------------------------------


@dataclass(frozen=True)
class Offender:
    trial: int
    gap: float
    matrix: np.ndarray = field(compare=False)
    verified: bool | None = None


@dataclass
class SearchReport:
    n: int
    trials: int
    seed: int
    count: int
    offenders: list[Offender]

    @property
    def fraction(self) -> float:
        return self.count / self.trials if self.trials else 0.0

    def to_text(self) -> str:
        items: list[tuple[str, object]] = [
            ("n", self.n),
            ("trials", self.trials),
            ("seed", self.seed),
            ("count", self.count),
            ("fraction", self.fraction),
            ("offenders_listed", len(self.offenders)),
        ]
        for k, off in enumerate(self.offenders):
            items.append((f"offender_{k}_trial", off.trial))
            items.append((f"offender_{k}_gap", off.gap))
            if off.verified is not None:
                items.append((f"offender_{k}_verified", "yes" if off.verified else "no"))
            items.append((f"offender_{k}_matrix", " ".join(format_complex(z) for z in off.matrix.ravel())))
        return key_value_text(items)


def _scan_chunk(args) -> tuple[int, list[tuple[int, float]]]:
    n, seed, start, stop = args
    count = 0
    hits = []
    for t in range(start, stop):
        gap = pb_gap(haar_random_unitary(n, seed, t))
        if gap < GAP_THRESHOLD:
            count += 1
            if len(hits) < MAX_OFFENDERS:
                hits.append((t, gap))
    return count, hits


def _verify(u: np.ndarray, gap: float) -> bool:
    """Recompute the gap from full output distributions."""
    n = u.shape[0]
    inputs = tuple(range(n))
    ones = (1,) * n
    dist = distribution_for_inputs(u, inputs, GramMatrix.identity(n), outcomes=[ones])[ones]
    indist = distribution_for_inputs(u, inputs, GramMatrix.ones(n), outcomes=[ones])[ones]
    return abs((dist - indist) - gap) <= 1e-9 and dist - indist < GAP_THRESHOLD


def haar_search(n: int, trials: int, seed: int, workers: int = 1) -> SearchReport:
    """Count Haar-random n-mode interferometers whose bunching gap is negative.

    Trials are split into fixed chunks and every trial draws from its own
    ``(seed, trial)`` stream, so counts and offender lists do not depend on
    ``workers``.
    """
    if n < 1:
        raise DomainError(f"search needs n >= 1, got {n}")
    if trials < 0 or workers < 1:
        raise DomainError("trials must be >= 0 and workers >= 1")
    chunks = [(n, seed, s, min(s + SEARCH_CHUNK, trials)) for s in range(0, trials, SEARCH_CHUNK)]
    if workers == 1 or len(chunks) <= 1:
        results = [_scan_chunk(c) for c in chunks]
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_scan_chunk, chunks))
    count = sum(c for c, _ in results)
    hits = sorted(h for _, hs in results for h in hs)[:MAX_OFFENDERS]
    offenders = []
    for t, gap in hits:
        u = haar_random_unitary(n, seed, t)
        offenders.append(Offender(t, gap, u, _verify(u, gap) if n <= VERIFY_MAX_N else None))
    return SearchReport(n, trials, seed, count, offenders)


# -- antibunching tables ------------------------------------------------------------


def _table_row(u: np.ndarray) -> tuple:
    dist = antibunching_probability(u, "distinguishable")
    indist = antibunching_probability(u, "indistinguishable")
    return (u.shape[0], dist, indist, dist - indist, indist / dist)


def fourier_table(n_values: Iterable[int]) -> list[tuple]:
    """Rows ``(n, dist, indist, gap, ratio)`` of antibunching probabilities."""
    return [_table_row(fourier_matrix(n)) for n in n_values]


def normalize_hadamard(m: np.ndarray) -> np.ndarray:
    """Accept a Hadamard matrix either normalized or with +-1 entries."""
    m = np.asarray(m, dtype=np.complex128)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"Hadamard matrix must be square, got shape {m.shape}")
    if is_unitary(m, 1e-8):
        return m
    scaled = m / math.sqrt(m.shape[0])
    if is_unitary(scaled, 1e-8):
        return scaled
    raise DomainError(f"order-{m.shape[0]} matrix is neither unitary nor a Hadamard matrix")


def hadamard_table(matrices: Iterable[np.ndarray]) -> list[tuple]:
    return [_table_row(normalize_hadamard(m)) for m in matrices]


def sylvester_table(orders: Iterable[int]) -> list[tuple]:
    return hadamard_table(sylvester_hadamard(n) for n in orders)


def table_csv(rows: Sequence[tuple]) -> str:
    return csv_text(TABLE_HEADER, rows)


# -- tritter bounds -------------------------------------------------------------------


def pb_bounds(r: float, phi: float) -> tuple[float, float]:
    """Lower and upper bounds on the tritter bunching probability at fixed
    ``|Bargmann invariant| = r`` and triad phase ``phi``."""
    if not 0.0 <= r <= 1.0:
        raise DomainError(f"|invariant| must lie in [0, 1], got {r}")
    c = math.cos(phi)
    return (7 - 4 * r * c + 3 * r ** (2 / 3)) / 9, (8 - 2 * r * c) / 9


def bounds_table(r_values: Sequence[float], phi_values: Sequence[float]) -> list[tuple]:
    return [(r, phi, *pb_bounds(r, phi)) for r in r_values for phi in phi_values]


def parallel_tritter_gap(k: int) -> float:
    """Antibunching gap of k independent tritters, ``(2/9)^k - (1/3)^k``."""
    if k < 1:
        raise DomainError(f"need at least one tritter, got {k}")
    return (2 / 9) ** k - (1 / 3) ** k


# -- state-preparation scans --------------------------------------------------------------

SCAN_KINDS = ("polarization", "time", "triad", "counterfb")
DEFAULT_GRID = {"polarization": 12, "time": 10, "triad": 9, "counterfb": 8}
SCAN_HEADER = (
    "alpha", "beta", "gamma", "phi_pol", "x",
    "d12", "d13", "d23", "dbar", "abs_d123", "phi", "p_B", "p_FB",
)  # fmt: skip
NOISY_HEADER = ("p_B_noisy", "p_FB_noisy")
TRIAD_DELTA = math.pi / 6


def polarization_prep(a: float) -> StatePrepParams:
    """Polarization-only family: photon 3 stays horizontal, photons 1 and 2
    are rotated by ``2a`` and ``4a`` (waveplate angle ``a`` turns the
    polarization by twice as much)."""
    return StatePrepParams(2 * a, 4 * a, 0.0, 0.0, 1.0)


def time_prep(x: float) -> StatePrepParams:
    return StatePrepParams(0.0, 0.0, 0.0, 0.0, x)


def _min_overlap_delta(phi_pol: float, x: float) -> float:
    """The delta in [pi/6, pi/2] minimizing the average overlap at fixed (phi_pol, x)."""

    def dbar(delta):
        p = StatePrepParams(math.pi / 4 + delta, math.pi / 4 - delta, math.pi / 4, phi_pol, x)
        return average_overlap(gram_from_states(states_from_prep(p)))

    res = minimize_scalar(dbar, bounds=(TRIAD_DELTA, math.pi / 2), method="bounded", options={"xatol": 1e-12})
    return float(res.x)


def scan_preparations(kind: str, grid: int | None = None) -> list[StatePrepParams]:
    if kind not in SCAN_KINDS:
        raise DomainError(f"unknown scan kind {kind!r}; choose from {', '.join(SCAN_KINDS)}")
    k = DEFAULT_GRID[kind] if grid is None else int(grid)
    if k < 2:
        raise DomainError(f"scan grid needs at least 2 points, got {k}")
    if kind == "polarization":
        return [polarization_prep(a) for a in np.linspace(0.0, math.pi / 6, k)]
    if kind == "time":
        return [time_prep(x) for x in np.linspace(0.0, 1.0, k)]
    if kind == "triad":
        return [triad_family(TRIAD_DELTA, ph) for ph in np.linspace(-math.pi, math.pi, k)]
    preps = []
    for ph in np.linspace(0.0, math.pi, k):
        x = triad_family(TRIAD_DELTA, ph).x
        for delta in np.linspace(TRIAD_DELTA, _min_overlap_delta(ph, x), k):
            preps.append(StatePrepParams(math.pi / 4 + delta, math.pi / 4 - delta, math.pi / 4, ph, x))
    return preps


@dataclass
class ScanTable:
    kind: str
    header: tuple[str, ...]
    rows: list[tuple]

    def column(self, name: str) -> list:
        k = self.header.index(name)
        return [r[k] for r in self.rows]

    def to_csv(self) -> str:
        return csv_text(self.header, self.rows)


def scan_family(kind: str, grid: int | None = None, model: str = "ideal", src=None) -> ScanTable:
    """Sweep a state-preparation family through the ideal tritter.

    ``model="noisy"`` appends predictions for the characterized interferometer
    with the source model ``src`` (defaults apply when omitted).
    """
    if model not in ("ideal", "noisy"):
        raise DomainError(f"model must be 'ideal' or 'noisy', got {model!r}")
    preps = scan_preparations(kind, grid)
    cfg = PhotonConfig.one_per_mode(3)
    f3 = fourier_matrix(3)
    if model == "noisy":
        from .fixtures import u3tilde
        from .noise import SourceModel, noisy_distribution

        src = src or SourceModel.from_brightness()
        u_exp = u3tilde()
    rows = []
    for p in preps:
        g = gram_from_states(states_from_prep(p))
        d = output_distribution(f3, cfg, g)
        row = (
            p.alpha, p.beta, p.gamma, p.phi_pol, p.x,
            g.overlap(0, 1), g.overlap(0, 2), g.overlap(1, 2), average_overlap(g),
            abs(bargmann_invariant(g)), triad_phase(g), d.p_bunching, d.p_full_bunching,
        )  # fmt: skip
        if model == "noisy":
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", NonUnitaryWarning)
                dn = noisy_distribution(u_exp, cfg, g, src).renormalized()
            row += (dn.p_bunching, dn.p_full_bunching)
        rows.append(row)
    header = SCAN_HEADER + (NOISY_HEADER if model == "noisy" else ())
    return ScanTable(kind, header, rows)


def counter_intuitive_pairs(table: ScanTable) -> list[tuple[int, int]]:
    """Index pairs (a, b) with dbar_a < dbar_b, |invariant|_a <= |invariant|_b
    and p_FB_a > p_FB_b."""
    dbar = table.column("dbar")
    r = table.column("abs_d123")
    pfb = table.column("p_FB")
    out = []
    for a in range(len(dbar)):
        for b in range(len(dbar)):
            if dbar[a] < dbar[b] and r[a] <= r[b] and pfb[a] > pfb[b]:
                out.append((a, b))
    return out
