"""Bundled measurements of three-photon tritter experiments and the
characterized experimental interferometer, with a model-vs-data comparison.

Each table is a CSV with one value column and one uncertainty column per
quantity. Uncertainties are the bracketed last-digit errors of the source
tables expanded to absolute values (``2.98(8)`` -> ``2.98, 0.08``).
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass
from importlib import resources
from typing import Sequence

import numpy as np

from .errors import DomainError, FeasibilityError, ParseError
from .gram import Gram3Params, gram_from_params, triad_phase_bound
from .interference import (
    NonUnitaryWarning,
    PhotonConfig,
    tritter_pb_analytic,
    tritter_pfb_total_analytic,
)
from .matrices import assemble_from_modulus_phase
from .report import csv_text

TABLES = {"pol": 9, "time": 10, "lc": 9, "counter": 8}
COLUMNS = ("d12", "d23", "d31", "dbar", "rv", "rn", "phi", "pb", "pfb")
HEADER = tuple(c for name in COLUMNS for c in (name, f"u_{name}"))

# characterized three-mode interferometer: moduli and phases (rad)
U3TILDE_MODULI = np.array(
    [
        [0.5998, 0.5563, 0.575],
        [0.5471, 0.5906, 0.593],
        [0.584, 0.585, 0.563],
    ]
)
U3TILDE_PHASES = np.array(
    [
        [0.0, 0.0, 0.0],
        [0.0, 2.135, -2.106],
        [0.0, -2.081, 2.158],
    ]
)


def u3tilde() -> np.ndarray:
    """The measured (slightly non-unitary) tritter."""
    return assemble_from_modulus_phase(U3TILDE_MODULI, U3TILDE_PHASES)


@dataclass(frozen=True)
class Measured:
    value: float
    err: float


@dataclass(frozen=True)
class MeasuredRow:
    d12: Measured
    d23: Measured
    d31: Measured
    dbar: Measured
    r_v: Measured
    r_n: Measured
    phi: Measured
    pb: Measured | None
    pfb: Measured

    def __post_init__(self):
        for name in ("d12", "d23", "d31", "dbar"):
            v = getattr(self, name).value
            if not 0.0 <= v <= 1.0:
                raise DomainError(f"{name} = {v} outside [0, 1]")
        for name in ("d12", "d23", "d31", "dbar", "r_v", "r_n", "phi", "pb", "pfb"):
            m = getattr(self, name)
            if m is not None and m.err <= 0:
                raise DomainError(f"uncertainty of {name} must be positive")

    @property
    def phi_principal(self) -> float:
        """Triad phase wrapped to (-pi, pi]."""
        p = math.remainder(self.phi.value, 2 * math.pi)
        return math.pi if p == -math.pi else p

    @property
    def rv_from_overlaps(self) -> float:
        return math.sqrt(self.d12.value * self.d23.value * self.d31.value)


def _parse_table(text: str, source: str) -> list[MeasuredRow]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise ParseError(f"{source}: empty fixture") from None
    if tuple(h.strip() for h in header) != HEADER:
        raise ParseError(f"{source}: line 1: unexpected header {','.join(header)!r}")
    rows = []
    for lineno, cells in enumerate(reader, start=2):
        if not cells or cells[0].startswith("#"):
            continue
        if len(cells) != len(HEADER):
            raise ParseError(f"{source}: line {lineno}: expected {len(HEADER)} fields, found {len(cells)}")
        values = {}
        for k, name in enumerate(COLUMNS):
            raw, raw_err = cells[2 * k].strip(), cells[2 * k + 1].strip()
            if name == "pb" and raw == "" and raw_err == "":
                values[name] = None
                continue
            try:
                values[name] = Measured(float(raw), float(raw_err))
            except ValueError:
                raise ParseError(f"{source}: line {lineno}: bad {name} field {raw!r}/{raw_err!r}") from None
        values["r_v"] = values.pop("rv")
        values["r_n"] = values.pop("rn")
        try:
            rows.append(MeasuredRow(**values))
        except DomainError as exc:
            raise ParseError(f"{source}: line {lineno}: {exc}") from None
    return rows


def load_table(name: str) -> list[MeasuredRow]:
    """Load one bundled table: ``pol``, ``time``, ``lc`` or ``counter``."""
    if name not in TABLES:
        raise DomainError(f"unknown table {name!r}; choose from {', '.join(TABLES)}")
    text = resources.files(__package__).joinpath("data", f"{name}.csv").read_text()
    rows = _parse_table(text, f"{name}.csv")
    if len(rows) != TABLES[name]:
        raise ParseError(f"{name}.csv: expected {TABLES[name]} rows, found {len(rows)}")
    return rows


def load_table_file(path) -> list[MeasuredRow]:
    with open(path) as fh:
        return _parse_table(fh.read(), str(path))


@dataclass(frozen=True)
class Residual:
    row: int
    pb_pred: float | None
    pb_meas: float | None
    pfb_pred: float
    pfb_meas: float
    tol: float
    note: str = ""

    @property
    def pb_residual(self) -> float | None:
        if self.pb_meas is None or self.pb_pred is None:
            return None
        return abs(self.pb_pred - self.pb_meas)

    @property
    def pfb_residual(self) -> float:
        return abs(self.pfb_pred - self.pfb_meas)

    @property
    def passed(self) -> bool:
        ok = self.pfb_residual <= self.tol
        if self.pb_residual is not None:
            ok = ok and self.pb_residual <= self.tol
        return ok


def measured_gram(row: MeasuredRow):
    """Gram matrix from the row's pairwise overlaps and wrapped triad phase.

    When the measured phase lies outside the range the overlaps allow, it is
    pulled onto the boundary of the feasible set; the second return value
    says so.
    """
    phi = row.phi_principal
    x, y, z = (math.sqrt(d) for d in (row.d12.value, row.d31.value, row.d23.value))
    note = ""
    try:
        bound = triad_phase_bound(x, y, z)
    except FeasibilityError:
        bound = 0.0
        note = "overlaps infeasible at any phase"
    if bound is not None and abs(phi) > bound:
        note = note or f"phase {phi:.4g} clipped to feasible bound {math.copysign(bound, phi):.4g}"
        phi = math.copysign(bound, phi)
    params = Gram3Params(row.d12.value, row.d31.value, row.d23.value, phi)
    return gram_from_params(params, tol=1e-9), note


def _noisy_prediction(row: MeasuredRow, src):
    from .noise import noisy_distribution

    g, note = measured_gram(row)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NonUnitaryWarning)
        d = noisy_distribution(u3tilde(), PhotonConfig.one_per_mode(3), g, src).renormalized()
    return d.p_bunching, d.p_full_bunching, note


def residual_report(
    rows: Sequence[MeasuredRow], model: str = "ideal", tol: float = 0.05, src=None
) -> list[Residual]:
    """Predicted vs measured bunching and full-bunching probabilities.

    ``ideal`` evaluates the closed-form tritter expressions at
    ``(dbar, r_n, phi)``; ``noisy`` runs the source model through the
    characterized interferometer with the row's measured overlaps.
    """
    if model not in ("ideal", "noisy"):
        raise DomainError(f"model must be 'ideal' or 'noisy', got {model!r}")
    if tol < 0:
        raise DomainError("tolerance must be non-negative")
    if model == "noisy" and src is None:
        from .noise import SourceModel

        src = SourceModel.from_brightness()
    out = []
    for k, row in enumerate(rows, start=1):
        note = ""
        if model == "ideal":
            args = (row.dbar.value, row.r_n.value, row.phi_principal)
            pb, pfb = tritter_pb_analytic(*args), tritter_pfb_total_analytic(*args)
        else:
            pb, pfb, note = _noisy_prediction(row, src)
        out.append(
            Residual(
                k,
                pb if row.pb is not None else None,
                row.pb.value if row.pb is not None else None,
                pfb,
                row.pfb.value,
                tol,
                note,
            )
        )
    return out


def residual_csv(res: Sequence[Residual]) -> str:
    header = ("row", "pb_pred", "pb_meas", "pb_residual", "pfb_pred", "pfb_meas", "pfb_residual", "status")
    rows = [
        (r.row, r.pb_pred, r.pb_meas, r.pb_residual, r.pfb_pred, r.pfb_meas, r.pfb_residual,
         "PASS" if r.passed else "FAIL")
        for r in res
    ]
    passed = sum(r.passed for r in res)
    footer = [f"passed {passed}/{len(res)} at tol={res[0].tol if res else 0}"]
    footer += [f"row {r.row}: {r.note}" for r in res if r.note]
    return csv_text(header, rows, footer)
