"""Distinguishability Gram matrices.

A Gram matrix collects the inner products ``G[i, j] = <psi_i|psi_j>`` of the
photons' internal states. It is Hermitian, positive semidefinite and has a unit
diagonal. For three photons it is fixed, up to rephasing the states, by the
three pairwise overlaps ``d_ij = |G[i, j]|**2`` and the triad phase ``phi``,
the argument of ``G[0,1] G[1,2] G[2,0]``.

Gauge: every constructor rephases states 2..n so that the first row of the
matrix is real and non-negative. For n = 3 the only complex entry is then
``G[1, 2] = sqrt(d23) exp(i phi)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, FeasibilityError, ShapeError, UnsupportedError

GRAM_TOL = 1e-10


def _wrap_phase(phi: float) -> float:
    """Principal value in (-pi, pi]."""
    w = math.remainder(phi, 2 * math.pi)
    return math.pi if w <= -math.pi else w


def _flush_subnormal(m: np.ndarray) -> np.ndarray:
    """Zero out subnormal entries; LAPACK eigensolvers can fail on them."""
    m = np.array(m, dtype=np.complex128)
    m[np.abs(m) < np.finfo(float).tiny] = 0.0
    return m


def normalize_gauge(m: np.ndarray) -> np.ndarray:
    """Rephase states so that row 0 of the Gram matrix is real and >= 0."""
    m = _flush_subnormal(m)
    first = m[0].copy()
    c = np.ones(m.shape[0], dtype=np.complex128)
    nz = np.abs(first) > 0
    c[nz] = np.conj(first[nz]) / np.abs(first[nz])
    c[0] = 1.0
    out = np.conj(c)[:, None] * m * c[None, :]
    # row 0 is real and non-negative by construction; drop rounding residue
    out[0] = np.abs(out[0])
    out[:, 0] = out[0]
    np.fill_diagonal(out, np.real(np.diagonal(out)))
    return out


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Validated Gram matrix of pure internal photon states."""

    matrix: np.ndarray
    tol: float = field(default=GRAM_TOL, repr=False)

    def __post_init__(self):
        m = _flush_subnormal(self.matrix)
        if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] == 0:
            raise ShapeError(f"Gram matrix must be square and non-empty, got shape {m.shape}")
        tol = self.tol
        if np.max(np.abs(m - m.conj().T)) > tol:
            raise FeasibilityError("Gram matrix is not Hermitian")
        if np.max(np.abs(np.diagonal(m) - 1.0)) > tol:
            raise FeasibilityError("Gram matrix must have a unit diagonal (normalized states)")
        if np.max(np.abs(m)) > 1.0 + tol:
            raise FeasibilityError("Gram matrix entries exceed 1 in modulus (Cauchy-Schwarz)")
        lam = min_eigenvalue(m)
        if lam < -tol:
            raise FeasibilityError(f"Gram matrix is not positive semidefinite (smallest eigenvalue {lam:.3e})")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def from_matrix(cls, m, *, gauge: bool = True, tol: float = GRAM_TOL) -> "GramMatrix":
        m = np.asarray(m, dtype=np.complex128)
        if gauge and m.ndim == 2 and m.shape[0] == m.shape[1] and m.shape[0] > 0:
            m = normalize_gauge(m)
        return cls(m, tol)

    @classmethod
    def identity(cls, n: int) -> "GramMatrix":
        """Fully distinguishable photons."""
        return cls(np.eye(n, dtype=np.complex128))

    @classmethod
    def ones(cls, n: int) -> "GramMatrix":
        """Fully indistinguishable photons."""
        return cls(np.ones((n, n), dtype=np.complex128))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def overlap(self, i: int, j: int) -> float:
        return float(abs(self.matrix[i, j]) ** 2)

    @property
    def gauge_degenerate(self) -> bool:
        """True when some pairwise overlap vanishes, so the triad phase carries no information."""
        off = ~np.eye(self.dim, dtype=bool)
        return bool(np.any(np.abs(self.matrix[off]) == 0.0))

    def with_orthogonal(self, k: int) -> "GramMatrix":
        """Extend by ``k`` extra states orthogonal to everything else."""
        n = self.dim
        out = np.eye(n + k, dtype=np.complex128)
        out[:n, :n] = self.matrix
        return GramMatrix(out, self.tol)


def min_eigenvalue(m: np.ndarray) -> float:
    return float(np.linalg.eigvalsh(np.asarray(m, dtype=np.complex128))[0])


@dataclass(frozen=True)
class Gram3Params:
    """Three-photon parametrization: pairwise overlaps and triad phase."""

    d12: float
    d13: float
    d23: float
    phi: float = 0.0

    def determinant(self) -> float:
        x, y, z = (math.sqrt(max(d, 0.0)) for d in (self.d12, self.d13, self.d23))
        return 1 + 2 * x * y * z * math.cos(self.phi) - x * x - y * y - z * z

    def is_feasible(self, tol: float = GRAM_TOL) -> bool:
        return all(0 <= d <= 1 for d in (self.d12, self.d13, self.d23)) and self.determinant() >= -tol


@dataclass(frozen=True)
class StatePrepParams:
    """Time-bin (x) and polarization (alpha, beta, gamma, phi_pol) settings.

    Angles are state-space angles, i.e. ``cos(a)|0> + sin(a)|1>`` in
    polarization, not half-wave-plate rotation angles.
    """

    alpha: float
    beta: float
    gamma: float
    phi_pol: float
    x: float

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise DomainError(f"time-overlap amplitude x must lie in [0, 1], got {self.x}")
        if not all(math.isfinite(v) for v in (self.alpha, self.beta, self.gamma, self.phi_pol)):
            raise DomainError("state preparation angles must be finite")


@dataclass(frozen=True, eq=False)
class InternalStateSet:
    """n unit vectors (rows) spanning the photons' internal space."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.array(self.vectors, dtype=np.complex128)
        if v.ndim != 2:
            raise ShapeError(f"expected an (n, r) array of state vectors, got shape {v.shape}")
        norms = np.linalg.norm(v, axis=1)
        if np.any(np.abs(norms - 1.0) > GRAM_TOL):
            raise DomainError(f"internal states must have unit norm, got norms {norms}")
        v.setflags(write=False)
        object.__setattr__(self, "vectors", v)

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def rank_dim(self) -> int:
        return self.vectors.shape[1]


# -- constructors ---------------------------------------------------------------


def triad_phase_bound(x: float, y: float, z: float):
    """Largest allowed ``|phi|`` for overlap amplitudes ``x, y, z``.

    Positive semidefiniteness requires
    ``cos(phi) >= (x^2 + y^2 + z^2 - 1) / (2 x y z)``. Returns ``None`` when
    every phase is allowed, which includes the gauge-degenerate case where an
    amplitude is zero. Raises :class:`FeasibilityError` if no phase at all is
    allowed.
    """
    for a in (x, y, z):
        if not 0.0 <= a <= 1.0:
            raise DomainError(f"overlap amplitudes must lie in [0, 1], got {a}")
    if x == 0 or y == 0 or z == 0:
        return None
    bound = (x * x + y * y + z * z - 1.0) / (2.0 * x * y * z)
    if bound <= -1.0:
        return None
    if bound > 1.0 + 1e-12:
        raise FeasibilityError(
            f"no triad phase is feasible for amplitudes ({x}, {y}, {z}): cos(phi) >= {bound:.6g} > 1"
        )
    return math.acos(min(bound, 1.0))


def gram_from_params(p: Gram3Params, tol: float = GRAM_TOL) -> GramMatrix:
    for name in ("d12", "d13", "d23"):
        d = getattr(p, name)
        if not 0.0 <= d <= 1.0:
            raise DomainError(f"{name} must lie in [0, 1], got {d}")
    x, y, z = math.sqrt(p.d12), math.sqrt(p.d13), math.sqrt(p.d23)
    det = p.determinant()
    if det < -tol:
        try:
            limit = triad_phase_bound(x, y, z)
            hint = f"|phi| <= {limit:.6g} rad" if limit is not None else "any phi"
        except FeasibilityError:
            hint = "no phase"
        raise FeasibilityError(
            f"infeasible Gram parameters (det = {det:.6g} < 0): "
            f"cos(phi) >= (x^2+y^2+z^2-1)/(2xyz) violated; overlaps allow {hint}, got phi={p.phi:.6g}"
        )
    g = np.array(
        [
            [1.0, x, y],
            [x, 1.0, z * np.exp(1j * p.phi)],
            [y, z * np.exp(-1j * p.phi), 1.0],
        ],
        dtype=np.complex128,
    )
    return GramMatrix(g, tol)


def params_from_gram(g: GramMatrix) -> Gram3Params:
    _require_dim3(g)
    return Gram3Params(g.overlap(0, 1), g.overlap(0, 2), g.overlap(1, 2), triad_phase(g))


def _cholesky_psd(m: np.ndarray, tol: float) -> np.ndarray:
    n = m.shape[0]
    low = np.zeros((n, n), dtype=np.complex128)
    for j in range(n):
        d = (m[j, j] - np.vdot(low[j, :j], low[j, :j])).real
        if d < -tol:
            raise FeasibilityError(f"matrix is not positive semidefinite (pivot {j}: {d:.3e})")
        if d <= 0.0:
            continue
        low[j, j] = math.sqrt(d)
        for i in range(j + 1, n):
            low[i, j] = (m[i, j] - np.sum(low[i, :j] * np.conj(low[j, :j]))) / low[j, j]
    return low


def cholesky_realize(g: GramMatrix) -> InternalStateSet:
    """States realizing ``g`` via ``G = L L^dagger`` with L lower triangular.

    State i is the complex conjugate of row i of L, which makes
    ``<psi_i|psi_j> = G[i, j]``. Columns of L that vanish (rank deficiency)
    are dropped, so the vectors live in dimension ``rank(G)``.
    """
    m = g.matrix if isinstance(g, GramMatrix) else GramMatrix(g).matrix
    low = _cholesky_psd(m, GRAM_TOL)
    keep = np.max(np.abs(low), axis=0) > 1e-12
    vecs = np.conj(low[:, keep])
    # tiny pivots can leave norms off by rounding
    vecs = vecs / np.linalg.norm(vecs, axis=1, keepdims=True)
    return InternalStateSet(vecs)


def states_from_prep(p: StatePrepParams) -> InternalStateSet:
    """The three time-bin x polarization states, basis ``|t> (x) |pol>`` flattened as ``2 t + pol``."""

    def pol(a, ph=0.0):
        return np.array([math.cos(a), math.sin(a) * np.exp(1j * ph)], dtype=np.complex128)

    early = np.array([1.0, 0.0], dtype=np.complex128)
    delayed = np.array([p.x, math.sqrt(max(0.0, 1.0 - p.x * p.x))], dtype=np.complex128)
    vecs = np.stack(
        [
            np.kron(early, pol(p.alpha)),
            np.kron(early, pol(p.beta)),
            np.kron(delayed, pol(p.gamma, p.phi_pol)),
        ]
    )
    return InternalStateSet(vecs)


def gram_from_states(s: InternalStateSet, *, gauge: bool = True) -> GramMatrix:
    v = s.vectors if isinstance(s, InternalStateSet) else InternalStateSet(s).vectors
    m = np.conj(v) @ v.T
    m = (m + m.conj().T) / 2
    np.fill_diagonal(m, 1.0)
    return GramMatrix.from_matrix(m, gauge=gauge)


def _require_dim3(g: GramMatrix):
    if g.dim != 3:
        raise UnsupportedError(f"only three-photon invariants are supported, got dimension {g.dim}")


def bargmann_invariant(g: GramMatrix) -> complex:
    """Third-order invariant ``G[0,1] G[1,2] G[2,0]``."""
    _require_dim3(g)
    m = g.matrix
    return complex(m[0, 1] * m[1, 2] * m[2, 0])


def triad_phase(g: GramMatrix) -> float:
    """Argument of the Bargmann invariant in (-pi, pi]; 0 when gauge-degenerate."""
    if g.gauge_degenerate:
        return 0.0
    return _wrap_phase(float(np.angle(bargmann_invariant(g))))


def average_overlap(g: GramMatrix) -> float:
    _require_dim3(g)
    return (g.overlap(0, 1) + g.overlap(0, 2) + g.overlap(1, 2)) / 3.0


def overlap_from_visibility(v: float, g2: float) -> float:
    """HOM visibility corrected for multiphoton bias, clamped to [0, 1]."""
    if not 0.0 <= g2 < 1.0:
        raise DomainError(f"g2 must lie in [0, 1), got {g2}")
    return min(1.0, max(0.0, (v + g2) / (1.0 - g2)))


# -- state-preparation families ------------------------------------------------------


def solve_delay(p: StatePrepParams, target: float, pair: tuple[int, int] = (0, 2)) -> float:
    """Time-overlap amplitude ``x`` giving overlap ``target`` on ``pair``.

    Solved by bracketing on ``x in [0, 1]`` (the overlap is monotonic in x
    for the pairs involving the delayed photon). Returns 1.0 when even full
    temporal overlap falls short of the target.
    """
    i, j = pair

    def overlap_at(x):
        s = states_from_prep(StatePrepParams(p.alpha, p.beta, p.gamma, p.phi_pol, x))
        return abs(np.vdot(s.vectors[i], s.vectors[j])) ** 2

    hi = overlap_at(1.0)
    if hi <= target:
        return 1.0
    if target <= 0.0:
        return 0.0
    return brentq(lambda x: overlap_at(x) - target, 0.0, 1.0, xtol=1e-15, rtol=4 * np.finfo(float).eps)


def triad_family(delta: float, phi_pol: float, target: float = 0.25) -> StatePrepParams:
    """``alpha = pi/4 + delta``, ``beta = pi/4 - delta``, ``gamma = pi/4`` with the
    delay tuned so the (1,3) overlap equals ``target``.

    By symmetry the (2,3) overlap matches; at ``delta = pi/6`` the (1,2)
    overlap is 1/4 as well, for every polarization phase.
    """
    base = StatePrepParams(math.pi / 4 + delta, math.pi / 4 - delta, math.pi / 4, phi_pol, 1.0)
    x = solve_delay(base, target)
    return StatePrepParams(base.alpha, base.beta, base.gamma, phi_pol, x)
