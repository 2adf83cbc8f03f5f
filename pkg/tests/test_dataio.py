import numpy as np
import pytest

from cantomo.dataio import (
    fmt,
    fmt_complex,
    read_grid,
    read_records,
    sha256_file,
    write_grid,
    write_manifest,
    write_records,
)
from cantomo.dynamics import AtomMixture
from cantomo.fockspace import fock_state
from cantomo.tomography import PolarGridSpec, probe_grid, synthesize_records


def test_float_formatting_round_trips():
    vals = [0.1, 1.0 / 3.0, np.pi, 1e-300, 6.02214076e23, -0.0]
    for v in vals:
        assert float(fmt(v)) == v
    z = 0.1 - 1.0 / 7.0j
    assert complex(fmt_complex(z)) == z


def test_records_round_trip(tmp_path):
    g = 830.0
    grid = probe_grid(PolarGridSpec(2.0, 2, 4, 100.0), g)
    recs = synthesize_records(fock_state(16, 0), AtomMixture.ground(), grid,
                              shots=500, seed=3)
    path = tmp_path / "records.csv"
    write_records(path, recs)
    back = read_records(path, g)
    assert len(back) == len(recs)
    for a, b in zip(recs, back):
        assert a.point.tau == b.point.tau
        assert a.point.phi == b.point.phi
        assert a.point.intensity == b.point.intensity
        assert abs(a.point.mu - b.point.mu) < 1e-12 * max(1.0, abs(a.point.mu))
        assert a.p_e == b.p_e
        assert a.shots == b.shots
        assert a.p_e_sampled == b.p_e_sampled


def test_records_reader_rejects_other_files(tmp_path):
    path = tmp_path / "bogus.csv"
    path.write_text("hello\n")
    with pytest.raises(ValueError):
        read_records(path, 830.0)


def test_grid_round_trip_real(tmp_path):
    rng = np.random.default_rng(0)
    x = np.linspace(-2, 2, 7)
    p = np.linspace(-1, 1, 5)
    vals = rng.normal(size=(5, 7))
    path = tmp_path / "w.txt"
    write_grid(path, "wigner", ("p", p), ("x", x), vals, meta={"imag_residue": 1e-16})
    doc = read_grid(path)
    assert doc["kind"] == "wigner"
    np.testing.assert_array_equal(doc["values"], vals)     # bit-exact
    np.testing.assert_array_equal(doc["rows"][1], p)
    np.testing.assert_array_equal(doc["cols"][1], x)
    assert doc["rows"][0] == "p" and doc["cols"][0] == "x"
    assert float(doc["meta"]["imag_residue"]) == 1e-16


def test_grid_round_trip_complex(tmp_path):
    rng = np.random.default_rng(1)
    ax = np.linspace(-3, 3, 9)
    vals = rng.normal(size=(9, 9)) + 1j * rng.normal(size=(9, 9))
    path = tmp_path / "c.txt"
    write_grid(path, "charfn", ("mu_x", ax), ("mu_y", ax), vals)
    doc = read_grid(path)
    np.testing.assert_array_equal(doc["values"], vals)


def test_grid_shape_mismatch(tmp_path):
    with pytest.raises(ValueError):
        write_grid(tmp_path / "bad.txt", "wigner",
                   ("p", np.arange(3.0)), ("x", np.arange(4.0)), np.zeros((4, 3)))


def test_manifest(tmp_path):
    f1 = tmp_path / "a.txt"
    f1.write_text("alpha\n")
    f2 = tmp_path / "b.txt"
    f2.write_text("beta\n")
    path = write_manifest(tmp_path, ["a.txt", "b.txt"], "test", seed=5)
    import json

    doc = json.loads(open(path).read())
    assert doc["seed"] == 5
    assert [e["name"] for e in doc["artifacts"]] == ["a.txt", "b.txt"]
    for entry in doc["artifacts"]:
        assert entry["sha256"] == sha256_file(tmp_path / entry["name"])
