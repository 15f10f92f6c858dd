import json

import numpy as np
import pytest

from fermidec import io as fio
from fermidec.closed_dynamics import delta_trace
from fermidec.errors import StructuralError
from fermidec.lindblad_channel import build_channel
from fermidec.majorana_core import joint_matrix, random_pure_covariance, random_skew, thermal_covariance
from fermidec.markov_db import build_p_eta, converge
from fermidec.models import BathParams, KitaevParams, bath_lattice, endpoint_coupling, kitaev_wire, uniform_loss_spec


def test_fmt_roundtrip(rng):
    for v in rng.normal(size=50) * 10.0 ** rng.integers(-20, 20, size=50):
        assert float(fio.fmt(v)) == v
    assert fio.fmt(3) == "3" and fio.fmt(0.1) == "0.10000000000000001"


def test_matrix_csv_roundtrip(tmp_path, rng):
    m = random_skew(6, rng)
    p = fio.write_matrix_csv(tmp_path / "h.csv", m)
    assert np.array_equal(fio.read_matrix_csv(p), m)
    (tmp_path / "bad.csv").write_text("1,2\n3,4,5\n")
    with pytest.raises(Exception):
        fio.read_matrix_csv(tmp_path / "bad.csv")


def test_matrix_json(rng):
    m = random_pure_covariance(2, rng)
    obj = fio.matrix_to_json(m, "covariance")
    assert obj["dim"] == 4 and len(obj["data"]) == 16
    assert np.array_equal(fio.matrix_from_json(json.loads(json.dumps(obj)), "covariance"), m)
    nested = {"dim": 4, "data": m.tolist(), "kind": "covariance"}
    assert np.array_equal(fio.matrix_from_json(nested), m)
    with pytest.raises(StructuralError):
        fio.matrix_from_json(obj, "hamiltonian")
    with pytest.raises(StructuralError):
        fio.matrix_to_json(m, "state")
    with pytest.raises(StructuralError):
        fio.matrix_from_json({"dim": 3, "data": [0.0] * 16, "kind": "covariance"})


def test_channel_json(rng):
    ch = build_channel(kitaev_wire(KitaevParams(3)), uniform_loss_spec(3, 0.4), "literal")
    obj = json.loads(json.dumps(fio.channel_to_json(ch)))
    back = fio.channel_from_json(obj)
    assert np.array_equal(back.x, ch.x) and np.array_equal(back.y, ch.y) and back.convention == "literal"


def test_tables_with_manifest(tmp_path, rng):
    hs, hb = kitaev_wire(KitaevParams(2)), bath_lattice(BathParams(5))
    hj = joint_matrix(hs, hb, endpoint_coupling(4, 10, 0.3))
    tr = delta_trace(random_pure_covariance(2, rng), random_pure_covariance(2, rng), hj,
                     thermal_covariance(hb, 1.0), [0.0, 1.0, 2.0])
    man = {"config_hash": "abc", "tolerances_version": "1"}
    p = fio.write_delta_trace(tmp_path / "d.csv", tr, man)
    lines = p.read_text().splitlines()
    assert lines[0].startswith("# ") and lines[2] == "t,norm_delta,norm_D,bound_2D2"
    cols, data = fio.read_csv(p)
    assert data.shape == (3, 4) and np.array_equal(data[:, 1], tr.delta_norms)
    p = fio.write_markov_trajectory(tmp_path / "m.csv", converge(build_p_eta(0.3, 0.5), [1.0, 0.0], 4))
    cols, data = fio.read_csv(p)
    assert cols == ["step", "v1", "v2", "dist_to_pi"] and data.shape == (5, 4)
    p = fio.write_json(tmp_path / "r.json", {"a": np.float64(1.5), "b": np.arange(3)}, man)
    obj = fio.read_json(p)
    assert obj["manifest"]["config_hash"] == "abc" and obj["b"] == [0, 1, 2]
