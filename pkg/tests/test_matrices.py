import numpy as np
import pytest

from bosonbunch.errors import (
    DimensionError,
    DomainError,
    ParseError,
    ShapeError,
    UnsupportedError,
)
from bosonbunch.matrices import (
    assemble_from_modulus_phase,
    fourier_matrix,
    haar_random_unitary,
    is_hermitian,
    is_unitary,
    read_matrix,
    read_square_matrix,
    sylvester_hadamard,
    trace_fidelity,
    unitarity_defect,
    write_matrix,
)


@pytest.mark.parametrize("n", [1, 2, 3, 7, 21, 64])
def test_fourier_is_unitary(n):
    f = fourier_matrix(n)
    assert is_unitary(f)
    assert np.allclose(np.abs(f), 1 / np.sqrt(n))


def test_fourier_entries():
    f = fourier_matrix(3)
    assert f[1, 2] == pytest.approx(np.exp(4j * np.pi / 3) / np.sqrt(3))


def test_fourier_rejects_zero():
    with pytest.raises(DimensionError):
        fourier_matrix(0)


@pytest.mark.parametrize("n", [1, 2, 4, 8, 16])
def test_sylvester(n):
    h = sylvester_hadamard(n)
    assert is_unitary(h)
    assert np.allclose(np.abs(h) * np.sqrt(n), 1)


def test_sylvester_needs_power_of_two():
    with pytest.raises(UnsupportedError):
        sylvester_hadamard(12)


def test_haar_is_unitary_and_reproducible():
    u = haar_random_unitary(5, 42, 3)
    assert is_unitary(u)
    assert np.array_equal(u, haar_random_unitary(5, 42, 3))
    assert not np.array_equal(u, haar_random_unitary(5, 42, 4))
    assert not np.array_equal(u, haar_random_unitary(5, 43, 3))


def test_haar_moments():
    # E|U_00|^2 = 1/n and E|U_00|^4 = 2/(n(n+1)) under the Haar measure
    n, k = 3, 4000
    x = np.array([abs(haar_random_unitary(n, 1, t)[0, 0]) ** 2 for t in range(k)])
    assert abs(x.mean() - 1 / n) < 5 * x.std() / np.sqrt(k)
    assert abs((x**2).mean() - 2 / (n * (n + 1))) < 5 * (x**2).std() / np.sqrt(k)


def test_haar_phases_are_not_biased():
    # the rephasing step leaves no preferred phase on any entry
    phases = np.array([np.angle(haar_random_unitary(2, 5, t)[0, 0]) for t in range(2000)])
    assert abs(np.mean(np.cos(phases))) < 0.1
    assert abs(np.mean(np.sin(phases))) < 0.1


def test_predicates():
    assert is_hermitian(np.array([[1, 1j], [-1j, 2]]))
    assert not is_hermitian(np.array([[1, 1j], [1j, 2]]))
    assert not is_unitary(np.ones((2, 3)))
    assert unitarity_defect(np.eye(3)) == 0


def test_trace_fidelity():
    f = fourier_matrix(3)
    assert trace_fidelity(f, f) == pytest.approx(1)
    assert trace_fidelity(f, np.exp(0.3j) * f) == pytest.approx(1)
    with pytest.raises(ShapeError):
        trace_fidelity(f, np.eye(2))


def test_assemble_from_modulus_phase():
    m = assemble_from_modulus_phase([[1, 2]], [[0, np.pi]])
    assert np.allclose(m, [[1, -2]])
    with pytest.raises(DomainError):
        assemble_from_modulus_phase([[-1]], [[0]])


def test_matrix_file_round_trip(tmp_path):
    u = haar_random_unitary(4, 0)
    p = tmp_path / "u.txt"
    write_matrix(p, u)
    back = read_matrix(p)
    assert np.allclose(back, u, atol=1e-11)


def test_matrix_file_comments_and_square_header(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# gram\n2\n1+0j 0.5+0j\n0.5-0j 1\n")
    assert np.allclose(read_square_matrix(p), [[1, 0.5], [0.5, 1]])


def test_parse_errors_name_the_line(tmp_path):
    p = tmp_path / "bad.txt"
    p.write_text("2 2\n1 0\n0 x\n")
    with pytest.raises(ParseError, match="line 3"):
        read_matrix(p)
    p.write_text("two two\n")
    with pytest.raises(ParseError, match="line 1"):
        read_matrix(p)
    p.write_text("2 2\n1 0 0\n0 1\n")
    with pytest.raises(ParseError, match="line 2"):
        read_matrix(p)
