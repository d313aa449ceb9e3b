import math

import numpy as np
import pytest

from bosonbunch.errors import DomainError, ParseError
from bosonbunch.fixtures import (
    HEADER,
    TABLES,
    load_table,
    load_table_file,
    measured_gram,
    residual_csv,
    residual_report,
    u3tilde,
)
from bosonbunch.interference import tritter_pfb_total_analytic
from bosonbunch.matrices import fourier_matrix, trace_fidelity


@pytest.fixture(scope="module")
def tables():
    return {name: load_table(name) for name in TABLES}


def test_row_counts(tables):
    assert {k: len(v) for k, v in tables.items()} == {"pol": 9, "time": 10, "lc": 9, "counter": 8}


def test_known_entries(tables):
    pol0 = tables["pol"][0]
    assert (pol0.d12.value, pol0.pb.value, pol0.pfb.value) == (0.269, 0.893, 0.165)
    t9 = tables["time"][-1]
    assert (t9.dbar.value, t9.pfb.value) == (0.873, 0.557)
    c0 = tables["counter"][0]
    assert (c0.pfb.value, c0.phi.value) == (0.153, -0.23)
    assert c0.pb is None


def test_rv_transcription(tables):
    for rows in tables.values():
        for row in rows:
            assert abs(row.rv_from_overlaps - row.r_v.value) <= 0.01


def test_rn_below_rv(tables):
    for rows in tables.values():
        for row in rows:
            assert row.r_n.value <= row.r_v.value


def test_phase_wrapped_only_at_comparison(tables):
    phis = [r.phi.value for r in tables["counter"]]
    assert -3.63 in phis
    wrapped = [r.phi_principal for r in tables["counter"]]
    assert all(-math.pi < p <= math.pi for p in wrapped)
    assert wrapped[phis.index(-3.63)] == pytest.approx(2 * math.pi - 3.63)


def test_ideal_examples(tables):
    row = tables["pol"][0]
    pol = residual_report([row])[0]
    assert pol.pfb_pred == pytest.approx(0.1829, abs=1e-4)
    assert pol.pfb_meas == 0.165
    # the visibility-based invariant gives the lower value
    assert tritter_pfb_total_analytic(row.dbar.value, row.r_v.value, row.phi.value) == pytest.approx(0.172, abs=1e-3)
    time_row = residual_report(tables["time"][:1])[0]
    assert time_row.pb_meas == 0.796
    assert time_row.pb_residual < 0.05


@pytest.mark.parametrize("name", sorted(TABLES))
def test_ideal_residuals_within_tolerance(tables, name):
    res = residual_report(tables[name], "ideal", 0.05)
    assert all(r.passed for r in res)
    if name == "counter":
        assert all(r.pb_residual is None for r in res)


def test_zero_tolerance_fails_everything(tables):
    res = residual_report(tables["time"], tol=0.0)
    assert not any(r.passed for r in res)


def test_noisy_report_runs(tables):
    res = residual_report(tables["time"][:2], "noisy")
    assert len(res) == 2
    assert all(0.0 < r.pb_pred < 1.0 for r in res)


def test_measured_gram_clips_infeasible_phase(tables):
    g, note = measured_gram(tables["pol"][0])
    assert "clipped" in note
    assert np.linalg.eigvalsh(g.matrix).min() > -1e-9
    g, note = measured_gram(tables["time"][0])
    assert note == ""


def test_report_rejects_bad_args(tables):
    with pytest.raises(DomainError):
        residual_report(tables["pol"], "quantum")
    with pytest.raises(DomainError):
        residual_report(tables["pol"], tol=-1)
    with pytest.raises(DomainError):
        load_table("nope")


def test_residual_csv_footer(tables):
    text = residual_csv(residual_report(tables["time"]))
    lines = text.splitlines()
    assert lines[0].startswith("row,pb_pred")
    assert any(line.startswith("# passed 10/10") for line in lines)


def _write(tmp_path, lines):
    p = tmp_path / "t.csv"
    p.write_text("\n".join(lines) + "\n")
    return p


def test_parse_error_names_line(tmp_path):
    good = ",".join(["0.5", "0.01"] * 9)
    bad = ",".join(["0.5", "0.01"] * 8 + ["oops", "0.01"])
    p = _write(tmp_path, [",".join(HEADER), good, bad])
    with pytest.raises(ParseError, match="line 3"):
        load_table_file(p)


def test_parse_error_wrong_field_count(tmp_path):
    p = _write(tmp_path, [",".join(HEADER), "0.5,0.01"])
    with pytest.raises(ParseError, match="line 2"):
        load_table_file(p)


def test_parse_error_bad_header(tmp_path):
    p = _write(tmp_path, ["a,b,c"])
    with pytest.raises(ParseError, match="line 1"):
        load_table_file(p)


def test_parse_rejects_zero_uncertainty(tmp_path):
    row = ",".join(["0.5", "0.0"] + ["0.5", "0.01"] * 8)
    p = _write(tmp_path, [",".join(HEADER), row])
    with pytest.raises(ParseError, match="uncertainty"):
        load_table_file(p)


def test_u3tilde_close_to_tritter():
    u = u3tilde()
    # moduli and phases are rounded, so the fidelity lands near but not on the quoted 0.99922
    assert trace_fidelity(fourier_matrix(3), u) == pytest.approx(0.9993, abs=2e-4)
    assert not np.allclose(u @ u.conj().T, np.eye(3), atol=1e-6)
