"""Interferometer matrices: canonical constructors, Haar sampling, comparison
metrics and the plain-text matrix file format.

Matrices are plain ``numpy`` ``complex128`` arrays, indexed from 0. Row index
is the input mode, column index the output mode.
"""

from __future__ import annotations

import os
from typing import Union

import numpy as np

from .errors import (
    DimensionError,
    DomainError,
    ParseError,
    ShapeError,
    UnsupportedError,
)

PathLike = Union[str, os.PathLike]

#: default tolerance for synthesized (exactly unitary) matrices
UNITARY_TOL = 1e-10


def is_unitary(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    dev = m.conj().T @ m - np.eye(m.shape[0])
    return float(np.max(np.abs(dev), initial=0.0)) <= tol


def is_hermitian(m: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    return float(np.max(np.abs(m - m.conj().T), initial=0.0)) <= tol


def unitarity_defect(m: np.ndarray) -> float:
    """Max-norm of ``M^dagger M - I``."""
    m = np.asarray(m)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[1])), initial=0.0))


def fourier_matrix(n: int) -> np.ndarray:
    """Balanced n-mode Fourier interferometer, ``exp(2i pi jk/n)/sqrt(n)``."""
    if n < 1:
        raise DimensionError(f"Fourier matrix needs n >= 1, got {n}")
    j = np.arange(n)
    # reduce jk mod n before exponentiating so large orders stay accurate
    jk = np.outer(j, j) % n
    return np.exp(2j * np.pi * jk / n) / np.sqrt(n)


def sylvester_hadamard(n: int) -> np.ndarray:
    """Normalized Sylvester-Hadamard matrix of order ``n`` (a power of two).

    Other Hadamard orders are not constructed here; load them with
    :func:`read_matrix`.
    """
    if n < 1 or n & (n - 1):
        raise UnsupportedError(
            f"Sylvester construction needs a power-of-two order, got {n}; "
            "supply other Hadamard orders as matrix files"
        )
    h = np.ones((1, 1))
    while h.shape[0] < n:
        h = np.block([[h, h], [h, -h]])
    return (h / np.sqrt(n)).astype(np.complex128)


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Independent generator for one (seed, trial) pair.

    The stream depends only on the pair, never on which worker draws it.
    """
    if seed < 0 or trial < 0:
        raise DomainError("seed and trial index must be non-negative")
    ss = np.random.SeedSequence(entropy=int(seed) & 0xFFFF_FFFF_FFFF_FFFF, spawn_key=(int(trial),))
    return np.random.default_rng(ss)


def haar_random_unitary(n: int, seed: int, trial: int = 0) -> np.ndarray:
    """Haar-distributed n x n unitary, deterministic in ``(seed, trial)``.

    Ginibre matrix -> QR, then the columns of Q are rephased by the phases of
    R's diagonal. Without that correction the output depends on LAPACK's sign
    convention and is not Haar distributed.
    """
    if n < 1:
        raise DimensionError(f"unitary dimension must be >= 1, got {n}")
    rng = trial_rng(seed, trial)
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def trace_fidelity(a: np.ndarray, b: np.ndarray) -> float:
    """``|Tr(a^dagger b)| / n`` for two n x n matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape != b.shape:
        raise ShapeError(f"trace fidelity needs equal square shapes, got {a.shape} and {b.shape}")
    n = a.shape[0]
    return float(abs(np.trace(a.conj().T @ b)) / n)


def assemble_from_modulus_phase(mods, phases) -> np.ndarray:
    """Build ``mods * exp(i phases)``; used to ingest measured interferometers."""
    mods = np.asarray(mods, dtype=float)
    phases = np.asarray(phases, dtype=float)
    if mods.shape != phases.shape:
        raise ShapeError(f"moduli {mods.shape} and phases {phases.shape} differ in shape")
    if np.any(mods < 0):
        raise DomainError("moduli must be non-negative")
    return mods * np.exp(1j * phases)


# -- matrix files -------------------------------------------------------------


def format_complex(z: complex, digits: int = 12) -> str:
    z = complex(z)
    return f"{z.real:.{digits}g}{z.imag:+.{digits}g}j"


def _parse_entries(lines: list[str], rows: int, cols: int, path) -> np.ndarray:
    out = np.empty((rows, cols), dtype=np.complex128)
    if len(lines) < rows:
        raise ParseError(f"{path}: expected {rows} matrix rows, found {len(lines)}")
    for i in range(rows):
        tokens = lines[i].split()
        if len(tokens) != cols:
            raise ParseError(f"{path}: line {i + 2}: expected {cols} entries, found {len(tokens)}")
        for j, tok in enumerate(tokens):
            try:
                out[i, j] = complex(tok)
            except ValueError:
                raise ParseError(f"{path}: line {i + 2}: cannot parse entry {tok!r}") from None
    return out


def _content_lines(text: str) -> list[str]:
    return [ln.strip() for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]


def read_matrix(path: PathLike) -> np.ndarray:
    """Read a matrix file: header ``"n m"`` then n rows of m ``re+imj`` entries."""
    with open(path) as fh:
        lines = _content_lines(fh.read())
    if not lines:
        raise ParseError(f"{path}: empty matrix file")
    head = lines[0].split()
    try:
        rows, cols = (int(t) for t in head)
    except ValueError:
        raise ParseError(f"{path}: line 1: expected header 'n m', got {lines[0]!r}") from None
    return _parse_entries(lines[1:], rows, cols, path)


def write_matrix(path: PathLike, m: np.ndarray) -> None:
    m = np.asarray(m)
    with open(path, "w") as fh:
        fh.write(f"{m.shape[0]} {m.shape[1]}\n")
        for row in m:
            fh.write(" ".join(format_complex(z) for z in row) + "\n")


def read_square_matrix(path: PathLike) -> np.ndarray:
    """Read the single-integer-header variant (``"n"``), used for Gram files."""
    with open(path) as fh:
        lines = _content_lines(fh.read())
    if not lines:
        raise ParseError(f"{path}: empty matrix file")
    head = lines[0].split()
    try:
        dims = [int(t) for t in head]
    except ValueError:
        dims = []
    if len(dims) not in (1, 2) or (len(dims) == 2 and dims[0] != dims[1]):
        raise ParseError(f"{path}: line 1: expected header 'n', got {lines[0]!r}")
    n = dims[0]
    return _parse_entries(lines[1:], n, n, path)
