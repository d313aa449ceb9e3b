"""Output statistics of partially distinguishable photons in linear optics.

For input modes ``iota`` (one entry per photon), Gram matrix ``G`` and an
output pattern listed mode by mode as ``d_1 <= ... <= d_n``, the outcome
probability is

    P(n) = 1/prod(n_j!) * sum_{sigma,tau} prod_k G[tau_k, sigma_k]
                          * U[iota_sigma_k, d_k] * conj(U[iota_tau_k, d_k]).

(``G[tau_k, sigma_k] = <psi_tau_k|psi_sigma_k>``: the bra carries the
conjugated amplitude.) Substituting ``tau = rho . sigma`` collapses the
double sum to ``sum_rho prod_p G[rho_p, p] * Per(A * conj(A[rho]))`` with
``A[p, k] = U[iota_p, d_k]``: one permanent per permutation ``rho`` with a
non-vanishing Gram product. Fully distinguishable photons keep only the
identity, fully indistinguishable photons reduce to ``|Per(A)|^2``.
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .errors import DegenerateError, ShapeError, SizeLimitError, UnsupportedError
from .gram import GramMatrix, InternalStateSet
from .matrices import UNITARY_TOL, unitarity_defect
from .permanent import permanent_ryser

NORMALIZATION_TOL = 1e-9
IMAG_TOL = 1e-10
FULL_DISTRIBUTION_MAX_N = 6
FOCK_ORACLE_MAX_N = 4


class NonUnitaryWarning(UserWarning):
    pass


@dataclass(frozen=True)
class PhotonConfig:
    """One photon in each of ``input_modes`` (strictly increasing) of an m-mode device."""

    input_modes: tuple[int, ...]
    m: int

    def __post_init__(self):
        modes = tuple(int(i) for i in self.input_modes)
        object.__setattr__(self, "input_modes", modes)
        if self.m < 1:
            raise ShapeError(f"mode count must be positive, got {self.m}")
        if any(b <= a for a, b in zip(modes, modes[1:])):
            raise ShapeError(f"input modes must be strictly increasing, got {modes}")
        if modes and (modes[0] < 0 or modes[-1] >= self.m):
            raise ShapeError(f"input modes {modes} out of range for {self.m} modes")

    @classmethod
    def one_per_mode(cls, n: int) -> "PhotonConfig":
        return cls(tuple(range(n)), n)

    @property
    def n(self) -> int:
        return len(self.input_modes)


def occupations(n: int, m: int) -> list[tuple[int, ...]]:
    """All occupation vectors of n photons in m modes, lexicographically decreasing."""

    def rec(left, slots):
        if slots == 1:
            yield (left,)
            return
        for k in range(left, -1, -1):
            for rest in rec(left - k, slots - 1):
                yield (k, *rest)

    return list(rec(n, m))


def mode_list(occ: Sequence[int]) -> tuple[int, ...]:
    """Occupation vector -> sorted list of output modes, e.g. (2,0,1) -> (0,0,2)."""
    return tuple(j for j, c in enumerate(occ) for _ in range(c))


@dataclass
class OutputDistribution:
    """Probabilities over occupation vectors, in a fixed enumeration order.

    ``clamped_mass`` is the total negative rounding mass set to zero,
    ``max_imag`` the largest imaginary residue seen before taking real parts.
    """

    probs: dict[tuple[int, ...], float]
    clamped_mass: float = 0.0
    max_imag: float = 0.0
    warnings: list[str] = field(default_factory=list)

    @property
    def m(self) -> int:
        return len(next(iter(self.probs)))

    @property
    def total(self) -> float:
        return math.fsum(self.probs.values())

    def __getitem__(self, occ) -> float:
        return self.probs.get(tuple(occ), 0.0)

    def __iter__(self):
        return iter(self.probs.items())

    def __len__(self):
        return len(self.probs)

    def as_array(self) -> np.ndarray:
        return np.array(list(self.probs.values()))

    def renormalized(self) -> "OutputDistribution":
        t = self.total
        if t <= 0:
            raise DegenerateError("cannot renormalize a distribution with zero total mass")
        note = f"renormalized by factor {1.0 / t:.12g}"
        return OutputDistribution(
            {k: v / t for k, v in self.probs.items()}, self.clamped_mass, self.max_imag, [*self.warnings, note]
        )

    @property
    def p_bunching(self) -> float:
        return p_bunching(self)

    @property
    def p_full_bunching(self) -> float:
        return p_full_bunching(self)

    def to_csv(self, footer: bool = True) -> str:
        from .report import format_number

        m = self.m
        lines = [",".join(f"n{j + 1}" for j in range(m)) + ",probability"]
        for occ, p in self.probs.items():
            lines.append(",".join(str(c) for c in occ) + "," + format_number(p))
        if footer:
            lines.append(
                f"# p_B={format_number(self.p_bunching)}, p_FB={format_number(self.p_full_bunching)}, "
                f"clamped_mass={format_number(self.clamped_mass)}"
            )
            lines.extend(f"# warning: {w}" for w in self.warnings)
        return "\n".join(lines) + "\n"


def _gram_array(g, n: int) -> np.ndarray:
    arr = g.matrix if isinstance(g, GramMatrix) else np.asarray(g, dtype=np.complex128)
    if arr.shape != (n, n):
        raise ShapeError(f"Gram matrix must be {n}x{n} for {n} photons, got {arr.shape}")
    return arr


def _gram_terms(gram: np.ndarray) -> list[tuple[tuple[int, ...], complex]]:
    """(rho, prod_p G[rho_p, p]) for every permutation with a non-zero product."""
    n = gram.shape[0]
    terms = []
    for rho in itertools.permutations(range(n)):
        w = 1.0 + 0.0j
        for p in range(n):
            w *= gram[rho[p], p]
            if w == 0:
                break
        if w != 0:
            terms.append((rho, complex(w)))
    return terms


def _input_norm(inputs: Sequence[int], terms) -> float:
    """<in|in> for possibly repeated input modes: Gram products over permutations
    that only exchange photons sharing a mode."""
    if len(set(inputs)) == len(inputs):
        return 1.0
    total = 0.0 + 0.0j
    for rho, w in terms:
        if all(inputs[p] == inputs[rho[p]] for p in range(len(inputs))):
            total += w
    return total.real


def _outcome_probability(u, inputs, occ, terms) -> complex:
    cols = mode_list(occ)
    a = u[np.ix_(list(inputs), list(cols))]
    acc = 0.0 + 0.0j
    for rho, w in terms:
        acc += w * permanent_ryser(a * np.conj(a[list(rho)]))
    return acc / math.prod(math.factorial(c) for c in occ)


def _check_unitary(u, tol) -> list[str]:
    notes = []
    if u.shape[0] != u.shape[1]:
        raise ShapeError(f"interferometer must be square, got {u.shape}")
    defect = unitarity_defect(u)
    if defect > tol:
        msg = f"interferometer is not unitary (defect {defect:.3e} > tol {tol:.1e}); probabilities not normalized"
        warnings.warn(msg, NonUnitaryWarning, stacklevel=3)
        notes.append(msg)
    return notes


def distribution_for_inputs(
    u: np.ndarray,
    inputs: Sequence[int],
    gram,
    *,
    unitary_tol: float = UNITARY_TOL,
    outcomes: Sequence[Sequence[int]] | None = None,
) -> OutputDistribution:
    """General engine: ``inputs`` may repeat a mode (photons there must be orthogonal
    or the input norm is divided out)."""
    u = np.asarray(u, dtype=np.complex128)
    notes = _check_unitary(u, unitary_tol)
    m = u.shape[1]
    n = len(inputs)
    if n > FULL_DISTRIBUTION_MAX_N and outcomes is None:
        raise SizeLimitError(f"full distributions limited to n <= {FULL_DISTRIBUTION_MAX_N}, got {n}")
    if any(not 0 <= i < u.shape[0] for i in inputs):
        raise ShapeError(f"input modes {tuple(inputs)} out of range for a {u.shape[0]}-mode device")
    gram = _gram_array(gram, n)
    terms = _gram_terms(gram)
    norm = _input_norm(inputs, terms)
    if norm <= 0:
        raise DegenerateError("input state has zero norm")
    probs = {}
    clamped = 0.0
    max_imag = 0.0
    for occ in outcomes if outcomes is not None else occupations(n, m):
        occ = tuple(int(c) for c in occ)
        if len(occ) != m or sum(occ) != n:
            raise ShapeError(f"outcome {occ} does not place {n} photons in {m} modes")
        val = _outcome_probability(u, inputs, occ, terms) / norm
        max_imag = max(max_imag, abs(val.imag))
        p = val.real
        if p < 0:
            clamped += -p
            p = 0.0
        probs[occ] = p
    if max_imag > IMAG_TOL:
        notes.append(f"imaginary residue {max_imag:.3e} exceeds {IMAG_TOL:.0e}")
    dist = OutputDistribution(probs, clamped, max_imag, notes)
    if outcomes is None and not notes:
        total = dist.total
        if abs(total - 1.0) > NORMALIZATION_TOL:
            raise DegenerateError(f"distribution sums to {total:.12g}, not 1")
    return dist


def output_distribution(
    u: np.ndarray, cfg: PhotonConfig, g, *, unitary_tol: float = UNITARY_TOL
) -> OutputDistribution:
    """Exact output distribution over all occupation vectors.

    A non-unitary ``u`` (e.g. a measured interferometer) is accepted with a
    :class:`NonUnitaryWarning`; the warning text is also kept on the result and
    the probabilities are returned unnormalized.
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.shape[0] != cfg.m or u.shape[1] != cfg.m:
        raise ShapeError(f"interferometer {u.shape} does not match {cfg.m} modes")
    return distribution_for_inputs(u, cfg.input_modes, g, unitary_tol=unitary_tol)


def antibunching_probability(u: np.ndarray, g=None) -> float:
    """Fast path for ``n = m``, one photon per mode: probability of (1, ..., 1).

    ``g`` is a Gram matrix or one of the shortcuts ``"indistinguishable"``
    (``|Per(U)|^2``) and ``"distinguishable"`` (``Per(|U|^2)``).
    """
    u = np.asarray(u, dtype=np.complex128)
    if g == "indistinguishable":
        return abs(permanent_ryser(u)) ** 2
    if g == "distinguishable":
        return permanent_ryser(np.abs(u) ** 2).real
    n = u.shape[0]
    terms = _gram_terms(_gram_array(g, n))
    return sum(w * permanent_ryser(u * np.conj(u[list(rho)])) for rho, w in terms).real


# -- independent oracle ------------------------------------------------------------


def fock_oracle_distribution(u: np.ndarray, cfg: PhotonConfig, states: InternalStateSet) -> OutputDistribution:
    """Brute-force second-quantized expansion, independent of the permanent engine.

    Expands ``prod_j sum_{q,b} U[iota_j, q] psi_j[b] a^dagger_{q,b} |0>`` into
    monomials over (mode, internal basis) labels, normalizes each Fock state by
    ``sqrt(prod occupation!)`` and sums ``|amplitude|^2`` over internal labels.
    """
    u = np.asarray(u, dtype=np.complex128)
    vecs = states.vectors if isinstance(states, InternalStateSet) else InternalStateSet(states).vectors
    n = cfg.n
    if n > FOCK_ORACLE_MAX_N:
        raise SizeLimitError(f"Fock oracle limited to n <= {FOCK_ORACLE_MAX_N}, got {n}")
    if vecs.shape[0] != n:
        raise ShapeError(f"need {n} internal states, got {vecs.shape[0]}")
    m = cfg.m
    r = vecs.shape[1]
    per_photon = []
    for j, mode in enumerate(cfg.input_modes):
        opts = [((q, b), u[mode, q] * vecs[j, b]) for q in range(m) for b in range(r)]
        per_photon.append([o for o in opts if o[1] != 0])
    amps: dict[tuple, complex] = {}
    for choice in itertools.product(*per_photon):
        key = tuple(sorted(lbl for lbl, _ in choice))
        coeff = 1.0 + 0.0j
        for _, c in choice:
            coeff *= c
        amps[key] = amps.get(key, 0.0) + coeff
    probs = {occ: 0.0 for occ in occupations(n, m)}
    for key, a in amps.items():
        counts: dict[tuple, int] = {}
        for lbl in key:
            counts[lbl] = counts.get(lbl, 0) + 1
        weight = math.prod(math.factorial(c) for c in counts.values())
        occ = [0] * m
        for q, _ in key:
            occ[q] += 1
        probs[tuple(occ)] += abs(a) ** 2 * weight
    return OutputDistribution(probs)


# -- bunching figures of merit ---------------------------------------------------------


def p_bunching(d: OutputDistribution) -> float:
    """1 minus the probability of collision-free outcomes."""
    return 1.0 - math.fsum(p for occ, p in d.probs.items() if max(occ) <= 1)


def p_full_bunching(d: OutputDistribution) -> float:
    """Total probability that all photons leave in a single mode (summed over modes)."""
    return math.fsum(p for occ, p in d.probs.items() if sum(1 for c in occ if c) == 1)


def tritter_pb_analytic(dbar: float, r: float, phi: float) -> float:
    """Bunching probability of three photons in the balanced tritter."""
    return 1.0 + (3.0 * dbar - 4.0 * math.cos(phi) * r - 2.0) / 9.0


def tritter_pfb_per_mode_analytic(dbar: float, r: float, phi: float) -> float:
    """Full-bunching probability into one given output mode of the tritter."""
    return (1.0 + 3.0 * dbar + 2.0 * math.cos(phi) * r) / 27.0


def tritter_pfb_total_analytic(dbar: float, r: float, phi: float) -> float:
    """Full-bunching probability summed over the three output modes."""
    return 3.0 * tritter_pfb_per_mode_analytic(dbar, r, phi)


def fb_ratio(g1, g2) -> float:
    """Full-bunching ratio between two distinguishability scenarios, Per(G1)/Per(G2).

    Holds for any interferometer and any output mode.
    """
    a = g1.matrix if isinstance(g1, GramMatrix) else np.asarray(g1, dtype=np.complex128)
    b = _gram_array(g2, a.shape[0])
    den = permanent_ryser(b)
    if abs(den) < 1e-14:
        raise DegenerateError("Per(G2) vanishes; full-bunching ratio undefined")
    return (permanent_ryser(a) / den).real


_OMEGA = np.exp(2j * np.pi / 3)
# With U[j, k] = exp(2i pi jk/3)/sqrt(3) acting on input rows, the cyclic group
# (0,2,1), (2,1,0), (1,0,2) carries the exp(-2i pi/3) weight; it is the one
# multiplied by w^2 below.
_GROUP_A = ((1, 1, 1), (3, 0, 0), (0, 3, 0), (0, 0, 3))
_GROUP_B = ((1, 2, 0), (0, 1, 2), (2, 0, 1))
_GROUP_C = ((0, 2, 1), (2, 1, 0), (1, 0, 2))


def bargmann_groups(d: OutputDistribution) -> tuple[float, float, float]:
    """The three grouped probabilities (P_A, P_B, P_C) of a tritter distribution."""
    if d.m != 3 or sum(next(iter(d.probs))) != 3:
        raise UnsupportedError("Bargmann extraction needs three photons in three modes")
    return tuple(math.fsum(d[o] for o in grp) for grp in (_GROUP_A, _GROUP_B, _GROUP_C))


def extract_bargmann(d: OutputDistribution) -> complex:
    """Third-order Bargmann invariant read off an ideal-tritter distribution:
    ``P_A + P_B w + P_C w^2`` with ``w = exp(2 i pi / 3)``."""
    pa, pb, pc = bargmann_groups(d)
    return complex(pa + pb * _OMEGA + pc * _OMEGA**2)


def as_distribution(rows: Mapping[Sequence[int], float]) -> OutputDistribution:
    return OutputDistribution({tuple(int(c) for c in k): float(v) for k, v in rows.items()})
