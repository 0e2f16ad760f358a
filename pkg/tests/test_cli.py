import json

import numpy as np
import pytest

from equitangent import main
from arg_parser import get_config


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def write_json(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def test_config_defaults():
    cfg = get_config(["flow", "--n", "7"])
    assert cfg.command == "flow" and cfg.n == 7
    assert cfg.input_path is None and cfg.clock == "reparameterized"
    assert "clock='reparameterized'" in str(cfg)


def test_spectrum_ratio(capsys):
    code, payload = run(capsys, "spectrum", "--n", "5")
    assert code == 0
    assert abs(payload["ratio"] - (np.sqrt(5) - 2)) < 1e-14
    assert payload["agreement"] < 1e-10


def test_frame_random_odd_polygon(capsys):
    code, payload = run(capsys, "frame", "--n", "7", "--seed", "4")
    assert code == 0
    assert payload["parity"] == "odd"
    assert payload["residual_max"] < 1e-9


def test_frame_non_cyclic_quadrilateral(capsys, tmp_path):
    path = write_json(tmp_path, "quad.json", {"vertices": [[0, 0], [2, 0], [2, 1], [0, 1.5]]})
    code, payload = run(capsys, "frame", path)
    assert code == 2
    assert payload["error"] == "NoFraming"
    assert abs(payload["residual"]) > 1e-3


def test_malformed_input(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{\"vertices\": [[0, 0], [1,")
    code, payload = run(capsys, "frame", str(path))
    assert code == 1
    assert payload["error"] == "MalformedInstance"
    code, payload = run(capsys, "chain", write_json(tmp_path, "chain.json", {"centers": [[0, 0], [1, 0]]}))
    assert code == 1


def test_chain_report(capsys, tmp_path):
    chain = {"centers": [[0, 0], [3, 0], [0, 4], [np.sqrt(3.75), 0.5]], "signed_radii": [1, -2, 3, -1]}
    code, payload = run(capsys, "chain", write_json(tmp_path, "chain.json", chain))
    assert code == 0
    assert abs(payload["signed_perimeter"]) < 1e-12
    assert payload["round_trip"] < 1e-9
    assert payload["kernel_vertex_speed"] < 1e-8
    assert np.allclose(payload["kernel_radius_rates"], -2.0, atol=1e-8)


def test_rank_of_three_chains_is_refused(capsys):
    code, payload = run(capsys, "rank", "--n", "3")
    assert code == 2
    assert payload["error"] == "UnsupportedN"


def test_rank_certificates(capsys):
    code, payload = run(capsys, "rank", "--n", "5", "--count", "2")
    assert code == 0
    assert payload["summary"] == "10 achieved 2/2"
    assert all(e["validated"] and len(e["ratios"]) == 5 for e in payload["entries"])


def test_rank_flags_unvalidated_bigon_brackets(capsys):
    state = ["0", "0", "1", str(np.pi / 4), "0"]
    code, payload = run(capsys, "rank", "--bigon", "--state", *state)
    assert code == 0
    assert payload["summary"] == "5 achieved 1/1"
    code, payload = run(capsys, "rank", "--bigon", "--state", *state, "--step", "0.5")
    assert code == 0
    assert not payload["entries"][0]["validated"]
    assert payload["summary"] == "5 achieved 0/1"


def test_bigon_state(capsys):
    code, payload = run(capsys, "bigon", "--state", "0", "0", "1", str(np.pi / 4), "0")
    assert code == 0
    assert payload["rank"] == 5
    assert np.allclose(payload["nu_xi"], [0, 2, 0, 0, 0], atol=1e-6)
    assert payload["form_annihilation"] < 1e-12


def test_flow_writes_csv(capsys, tmp_path):
    out = tmp_path / "flow.csv"
    code, payload = run(capsys, "flow", "--n", "3", "--steps", "500", "--out", str(out))
    assert code == 0
    assert out.read_text().splitlines()[0] == "t,psi_1,psi_2,psi_3"
    assert "incircle_drift" in payload


def test_monodromy_of_the_pentagon(capsys):
    code, payload = run(capsys, "monodromy", "--n", "5", "--steps", "2000")
    assert code == 0
    assert abs(payload["tau"] - payload["regular_period"] / 5) < 1e-9


def test_scan_finds_the_nonagon_relation(capsys):
    code, payload = run(capsys, "scan", "--n", "9", "--bound", "3")
    assert code == 0
    assert [1, -1, -3, 1] in payload["relations"]


def test_bicentric_outer_radius(capsys):
    code, payload = run(capsys, "bicentric", "--n", "3", "--r", "0.4", "--d", "0.3")
    assert code == 0
    assert abs(payload["R"] - 0.9) < 1e-12
    assert payload["closes"]


def test_bicentric_from_json(capsys, tmp_path):
    path = write_json(tmp_path, "euler.json", {"n": 3, "R": 0.9, "r": 0.4, "d": 0.3})
    code, payload = run(capsys, "bicentric", path)
    assert code == 0
    assert payload["closes"]
    assert abs(payload["euler_fuss_residual"]) < 1e-12
    path = write_json(tmp_path, "violated.json", {"n": 3, "R": 1.0, "r": 0.4, "d": 0.3})
    code, payload = run(capsys, "bicentric", path)
    assert code == 0
    assert not payload["closes"]
    code, payload = run(capsys, "bicentric", write_json(tmp_path, "bad.json", {"n": 3, "R": 0.5, "r": 0.4, "d": 0.3}))
    assert code == 1
    assert payload["error"] == "MalformedInstance"


def test_construct_writes_svg_and_json(capsys, tmp_path):
    svg = tmp_path / "octagon.svg"
    code, payload = run(capsys, "construct", "--n", "8", "--corner_radius", "0.05", "--side_radius", "20",
                        "--samples", "200", "--out", str(svg))
    assert code == 0
    assert svg.exists()
    assert payload["arcs"] == 16 and payload["nested"]
    assert payload["schedule"][:2] == ["(BD, AB, ED)", "(BE, BC, ED)"]

    out = tmp_path / "construct.json"
    assert main(["construct", "--n", "9", "--samples", "200", "--out", str(out)]) == 0
    capsys.readouterr()
    assert json.loads(out.read_text())["max_asymmetry"] < 1e-8


def test_construct_refuses_small_n(capsys):
    code, payload = run(capsys, "construct", "--n", "6")
    assert code == 2


@pytest.mark.parametrize("argv", [["nothing"], ["flow", "--clock", "sideways"]])
def test_bad_arguments_exit(argv):
    with pytest.raises(SystemExit):
        get_config(argv)
