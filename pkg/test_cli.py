"""
Tests for the command line interface
"""
import json

import pytest

from cli import EXIT_DEFECT, EXIT_OK, EXIT_USAGE, canonical_json, main, run


def test_enumerate_star3_prime(capsys):
    assert main(["enumerate", "--condition", "star3p", "--max", "100"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "14 38 62 74 86"


def test_enumerate_json():
    result = run(["enumerate", "--condition", "star3", "--max", "100", "--json"])
    assert result.exit_code == EXIT_OK
    assert json.loads(result.payload)["values"] == [14, 26, 38, 42, 62, 86]


def test_pell_fundamental_solution(capsys):
    assert main(["pell", "21"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "x=55 y=12"


def test_pell_like_obstruction(capsys):
    assert main(["pell", "7", "--coef", "3"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "unsolvable (obstruction mod 3)"


def test_pell_like_solution():
    result = run(["pell", "76", "--rhs", "-3", "--json"])
    data = json.loads(result.payload)
    assert data["status"] == "solvable"
    assert data["solution"] == [61, 7]


def test_check_d_json_is_deterministic():
    first = run(["check-d", "14", "--json"])
    second = run(["check-d", "14", "--json"])
    assert first.exit_code == EXIT_OK
    assert first.payload == second.payload
    data = json.loads(first.payload)
    assert data["conditions"]["star2"]["holds"] is True
    assert data["theorem3"]["hilb2"] is True


@pytest.mark.parametrize("argv", [
    ["check-d", "62", "--json"],
    ["enumerate", "--condition", "star3p", "--max", "200", "--json"],
    ["pell", "372", "--rhs", "-3", "--json"],
    ["movable-cone", "--n", "4", "--d", "7", "--json"],
    ["construct-w", "62", "--json"],
])
def test_json_payload_reserializes_to_identical_bytes(argv):
    result = run(argv)
    assert result.exit_code == EXIT_OK
    assert canonical_json(json.loads(result.payload)).encode() == result.payload.encode()


def test_check_d_text_mentions_c8():
    result = run(["check-d", "8"])
    assert "C_8" in result.payload


def test_invalid_inputs_exit_with_usage_code(capsys):
    assert main(["check-d", "0"]) == EXIT_USAGE
    assert main(["construct-w", "26"]) == EXIT_USAGE
    assert main(["enumerate", "--condition", "star", "--max", "5"]) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_unknown_subcommand():
    assert run(["frobnicate"]).exit_code == EXIT_USAGE
    assert run([]).exit_code == EXIT_USAGE
    assert run(["--help"]).exit_code == EXIT_OK


def test_construct_w_text():
    result = run(["construct-w", "62"])
    assert "chi(w, w) = 0" in result.payload
    assert "chi(w, l2 - l1) = 1" in result.payload
    assert json.loads(run(["construct-w", "62", "--json"]).payload)["w"] == [-20, -18, 7]


def test_movable_cone_text():
    result = run(["movable-cone", "--n", "4", "--d", "7"])
    assert result.exit_code == EXIT_OK
    assert "case (c)" in result.payload
    assert "X = 55, Y = 12" in result.payload
    assert "55H - 84B" in result.payload


def test_movable_cone_with_pullbacks():
    result = run(["movable-cone", "--n", "4", "--d", "7", "--pullback", "14", "9", "--json"])
    data = json.loads(result.payload)
    assert data["avoidance"]["pairings"] == [126, -126]
    assert data["avoidance"]["contradiction"] is True


def test_movable_cone_unsupported_case():
    assert run(["movable-cone", "--n", "2", "--d", "4"]).exit_code == EXIT_OK
    assert run(["movable-cone", "--n", "2", "--d", "4", "--pullback", "14", "9"]).exit_code == EXIT_USAGE


def test_lattice_disc_group(capsys):
    assert main(["lattice", "disc-group", "--gram", "[[-6]]"]) == EXIT_OK
    assert capsys.readouterr().out.strip() == "Z/6"


def test_lattice_complement():
    result = run(["lattice", "complement", "--gram", "[[0, 1], [1, 0]]", "--vector", "1,3", "--json"])
    data = json.loads(result.payload)
    assert data["gram"] == [[-6]]
    assert data["basis"] in ([[1, -3]], [[-1, 3]])


def test_lattice_gram_file(tmp_path):
    path = tmp_path / "l3.json"
    path.write_text(json.dumps({"rank": 3, "gram": [[-2, 1, 0], [1, -2, 1], [0, 1, 4]]}))
    assert run(["lattice", "det", "--gram", str(path)]).payload == "14"
    assert run(["lattice", "det", "--gram", str(tmp_path / "missing.json")]).exit_code == EXIT_USAGE


def test_lattice_isotropic_and_disc_form():
    result = run(["lattice", "isotropic", "--gram", "[[-2, 1, 0], [1, -2, 1], [0, 1, 4]]",
                  "--vector", "[-1, 1, 0]", "--bound", "3"])
    assert result.payload == "w = [-1, -1, 1]"
    result = run(["lattice", "disc-form", "--gram", "[[-6]]"])
    assert "11/6" in result.payload
    assert run(["lattice", "complement", "--gram", "[[0, 1], [1, 0]]"]).exit_code == EXIT_USAGE


def test_schubert_pullbacks(capsys):
    assert main(["schubert", "pullbacks"]) == EXIT_OK
    out = capsys.readouterr().out
    assert "j*B = 9h" in out
    assert "j*H = 14h" in out
    assert "12h - 27h^2 + (65/2)h^3 - (33/2)h^4 + (19/8)h^5" in out


def test_schubert_verify():
    result = run(["schubert", "verify", "--json"])
    assert result.exit_code == EXIT_OK
    assert json.loads(result.payload)["passed"] is True
    assert EXIT_DEFECT != result.exit_code
