"""CLI contract: exit codes, wire format, determinism."""

import json

import numpy as np
import pytest

from nilflow.catalog import build_pair
from nilflow.cli import (
    EXIT_CHECK_FAILURE,
    EXIT_CONSTRUCTION,
    EXIT_DEGENERATE,
    EXIT_IO,
    EXIT_PASS,
    EXIT_USAGE,
    format_state,
    main,
    parse_state,
)
from nilflow.flow import sample_generic_state

M, MP = build_pair()


def test_state_roundtrip():
    rng = np.random.default_rng(1)
    s = sample_generic_state("M", rng)
    text = format_state(M.alg, s)
    back = parse_state(M.alg, text)
    assert np.array_equal(back.v, s.v)
    assert np.array_equal(back.z, s.z)
    assert np.array_equal(back.V, s.V)
    assert np.array_equal(back.Z, s.Z)


def test_parse_state_errors():
    with pytest.raises(ValueError):
        parse_state(M.alg, "v: 1 2 3; z: 0 0 0; V: 1 0 0 0 0; Z: 0 0 1")
    with pytest.raises(ValueError):
        parse_state(M.alg, "z: 0 0 0; V: 1 0 0 0 0; Z: 0 0 1")


def test_verify_algebra_pass(tmp_path):
    out = tmp_path / "r.json"
    assert main(["verify", "--suite", "algebra", "--seed", "7",
                 "--out", str(out)]) == EXIT_PASS
    doc = json.loads(out.read_text())
    assert doc["body"]["pass"] is True


def test_verify_unknown_suite_is_usage_error(capsys):
    assert main(["verify", "--suite", "bogus"]) == EXIT_USAGE


def test_verify_determinism(tmp_path):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    main(["verify", "--suite", "algebra", "--seed", "42", "--out", str(p1)])
    main(["verify", "--suite", "algebra", "--seed", "42", "--out", str(p2)])
    b1 = json.loads(p1.read_text())["body"]
    b2 = json.loads(p2.read_text())["body"]
    assert json.dumps(b1) == json.dumps(b2)


def test_flow_degenerate_exact_is_exit_4(capsys):
    code = main([
        "flow", "--manifold", "M", "--method", "exact", "--t", "1",
        "--state", "v: 0 0 0 0 0; z: 0 0 0; V: 1 0 0 0 0; Z: 0 0 1",
    ])
    assert code == EXIT_DEGENERATE
    assert "rk4" in capsys.readouterr().err


def test_flow_rk4_straight_line(tmp_path):
    out = tmp_path / "end.txt"
    code = main([
        "flow", "--manifold", "M", "--method", "rk4", "--t", "1",
        "--state", "v: 0 0 0 0 0; z: 0 0 0; V: 1 0 0 0 0; Z: 0 0 0",
        "--out", str(out),
    ])
    assert code == EXIT_PASS
    end = parse_state(M.alg, out.read_text())
    assert np.allclose(end.v, [1, 0, 0, 0, 0], atol=1e-9)
    assert np.allclose(end.z, 0, atol=1e-12)


def test_flow_exact_matches_rk4(tmp_path):
    rng = np.random.default_rng(3)
    s = sample_generic_state("M", rng)
    rec = format_state(M.alg, s)
    o1, o2 = tmp_path / "a.txt", tmp_path / "b.txt"
    main(["flow", "--manifold", "M", "--method", "exact", "--t", "2",
          "--state", rec, "--out", str(o1)])
    main(["flow", "--manifold", "M", "--method", "rk4", "--t", "2",
          "--state", rec, "--out", str(o2)])
    e1 = parse_state(M.alg, o1.read_text())
    e2 = parse_state(M.alg, o2.read_text())
    assert np.max(np.abs(e1.v - e2.v)) < 1e-8
    assert np.max(np.abs(e1.V - e2.V)) < 1e-8


def test_closed_geodesic_success(tmp_path):
    out = tmp_path / "geo.json"
    code = main(["closed-geodesic", "--manifold", "M", "--seed", "1",
                 "--epsilon", "0.1", "--out", str(out)])
    assert code == EXIT_PASS
    doc = json.loads(out.read_text())
    assert doc["a_in_gamma"] == "exact_pass"
    assert doc["rotation_condition"] == "exact_pass"


def test_closed_geodesic_mprime(tmp_path):
    out = tmp_path / "geo.json"
    code = main(["closed-geodesic", "--manifold", "Mprime", "--seed", "2",
                 "--epsilon", "0.1", "--out", str(out)])
    assert code == EXIT_PASS


def test_closed_geodesic_degenerate_is_exit_5():
    code = main([
        "closed-geodesic", "--manifold", "M", "--epsilon", "1e-9",
        "--target", "v: 0 0 0 0 0; z: 0 0 0; V: 1 0 0 0 0; Z: 0 0 1",
    ])
    assert code == EXIT_CONSTRUCTION


def test_integrals_and_poisson_commands(tmp_path):
    rng = np.random.default_rng(5)
    s = sample_generic_state("M", rng)
    rec = format_state(M.alg, s)
    assert main(["integrals", "--manifold", "M", "--state", rec,
                 "--out", str(tmp_path / "i.json")]) == EXIT_PASS
    assert main(["poisson", "--manifold", "M", "--state", rec,
                 "--out", str(tmp_path / "p.json")]) == EXIT_PASS
    doc = json.loads((tmp_path / "p.json").read_text())
    assert len(doc["rows"]) == 28


def test_cih_command(tmp_path):
    out = tmp_path / "c.json"
    assert main(["cih", "--manifold", "Mprime", "--bound", "1",
                 "--out", str(out)]) == EXIT_PASS
    doc = json.loads(out.read_text())
    assert doc["pass"] is True


def test_config_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"rk4_steps_per_unit": 10}))
    rng = np.random.default_rng(7)
    s = sample_generic_state("M", rng)
    rec = format_state(M.alg, s)
    assert main(["flow", "--manifold", "M", "--method", "rk4", "--t", "1",
                 "--state", rec, "--config", str(cfg),
                 "--out", str(tmp_path / "o.txt")]) == EXIT_PASS
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"no_such_key": 1}))
    assert main(["flow", "--manifold", "M", "--method", "rk4", "--t", "1",
                 "--state", rec, "--config", str(bad)]) == EXIT_USAGE


def test_out_path_io_error(tmp_path):
    assert main(["verify", "--suite", "algebra",
                 "--out", str(tmp_path / "no" / "dir" / "r.json")]) == EXIT_IO


def test_exit_constants_are_distinct():
    codes = {EXIT_PASS, EXIT_CHECK_FAILURE, EXIT_USAGE, EXIT_IO,
             EXIT_DEGENERATE, EXIT_CONSTRUCTION}
    assert codes == {0, 1, 2, 3, 4, 5}
