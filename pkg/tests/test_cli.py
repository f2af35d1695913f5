"""Command line behavior: JSON schema, exit codes, formats, bench CSV."""

import json
import re

import pytest

from bbmatch.cli import main

TWO_BY_TWO = (
    "p bbm 2 2 4\n"
    "e 1 1 3.0\n"
    "e 1 2 2.0\n"
    "e 2 1 3.0\n"
    "e 2 2 1.0\n"
)

MTX = (
    "%%MatrixMarket matrix coordinate real general\n"
    "2 2 3\n"
    "1 1 3.0\n"
    "1 2 2.0\n"
    "2 1 3.0\n"
)


@pytest.fixture
def instance(tmp_path):
    path = tmp_path / "two.bbm"
    path.write_text(TWO_BY_TWO)
    return str(path)


def run_cli(argv, capsys):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_solve_json_schema(instance, capsys):
    code, out, _ = run_cli(
        ["solve", "-i", instance, "--eps", "0.1", "--oracle", "brute",
         "--certify", "--baseline", "greedy", "-q"],
        capsys,
    )
    assert code == 0
    doc = json.loads(out)
    assert list(doc) == [
        "n_a", "n_b", "m", "epsilon_prime", "matching", "weight",
        "stats", "cert", "oracle", "approx_ok", "baseline",
    ]
    assert (doc["n_a"], doc["n_b"], doc["m"]) == (2, 2, 4)
    assert doc["weight"] == 5.0
    # 1-based on the wire
    assert doc["matching"] == [
        {"i": 1, "j": 2, "w": 2.0},
        {"i": 2, "j": 1, "w": 3.0},
    ]
    assert list(doc["stats"]) == [
        "pops", "bids", "outbids", "pruned", "s_min", "s_max", "wall_ms",
    ]
    assert doc["cert"]["strong_happy"] is True
    assert doc["cert"]["feasible"] is True
    assert doc["oracle"] == {"method": "brute", "weight": 5.0}
    assert doc["approx_ok"] is True
    assert doc["baseline"] == {"method": "greedy", "weight": 4.0}


def test_solve_without_flags_omits_optional_blocks(instance, capsys):
    code, out, err = run_cli(["solve", "-i", instance], capsys)
    assert code == 0
    doc = json.loads(out)
    for key in ("cert", "oracle", "approx_ok", "baseline"):
        assert key not in doc
    assert "matched 2 edges" in err  # progress note without --quiet


def test_solve_quiet_silences_stderr(instance, capsys):
    _, _, err = run_cli(["solve", "-i", instance, "-q"], capsys)
    assert err == ""


def test_solve_output_file(instance, tmp_path, capsys):
    dest = tmp_path / "result.json"
    code, out, _ = run_cli(
        ["solve", "-i", instance, "-o", str(dest), "-q"], capsys
    )
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["weight"] == 5.0


def test_solve_is_deterministic_apart_from_wall_ms(instance, capsys):
    argv = ["solve", "-i", instance, "--certify", "--oracle", "flow", "-q"]
    _, out1, _ = run_cli(argv, capsys)
    _, out2, _ = run_cli(argv, capsys)
    strip = lambda s: re.sub(r'"wall_ms": [0-9.e+-]+', '"wall_ms": _', s)
    assert strip(out1) == strip(out2)


def test_certify_subcommand_always_certifies(instance, capsys):
    code, out, _ = run_cli(["certify", "-i", instance, "-q"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["cert"]["relaxed_cs"] is True
    assert doc["cert"]["ratio_lower"] >= 0.95  # eps = 0.1 -> eps/2 rounding


def test_certification_failure_exits_3(instance, capsys):
    # an impossible tolerance forces the certifier to reject the run
    code, out, _ = run_cli(
        ["certify", "-i", instance, "--tol", "-1", "-q"], capsys
    )
    assert code == 3
    assert json.loads(out)["cert"]["relaxed_cs"] is False


def test_bad_eps_exits_2(instance, capsys):
    code, _, err = run_cli(["solve", "-i", instance, "--eps", "1.5"], capsys)
    assert code == 2 and "--eps" in err
    code, _, _ = run_cli(["solve", "-i", instance, "--eps", "0"], capsys)
    assert code == 2


def test_brute_oracle_size_guard_exits_2(tmp_path, capsys):
    lines = ["p bbm 5 5 25"]
    lines += [f"e {i} {j} 1.5" for i in range(1, 6) for j in range(1, 6)]
    path = tmp_path / "big.bbm"
    path.write_text("\n".join(lines) + "\n")
    code, _, err = run_cli(
        ["solve", "-i", str(path), "--oracle", "brute"], capsys
    )
    assert code == 2 and "at most 24" in err


def test_missing_input_exits_1(capsys):
    code, _, err = run_cli(["solve", "-i", "/nonexistent.bbm"], capsys)
    assert code == 1 and "error" in err


def test_malformed_input_exits_1(tmp_path, capsys):
    path = tmp_path / "bad.bbm"
    path.write_text("p bbm 1 1 1\ne 5 1 1.0\n")
    code, _, err = run_cli(["solve", "-i", str(path)], capsys)
    assert code == 1 and "line 2" in err


def test_mtx_input_with_capacity_file(tmp_path, capsys):
    mtx = tmp_path / "inst.mtx"
    mtx.write_text(MTX)
    bfile = tmp_path / "caps.txt"
    # bidders first, then objects: object 1 gets capacity 2
    bfile.write_text("1 1\n2 1\n")
    code, out, _ = run_cli(
        ["solve", "-i", str(mtx), "--format", "mtx", "--bfile", str(bfile),
         "--eps", "0.05", "-q"],
        capsys,
    )
    assert code == 0
    # both 3.0 edges share object 1; with unit capacities the best is 5.0
    assert json.loads(out)["weight"] == 6.0


def test_bfile_with_bbm_format_exits_2(instance, tmp_path, capsys):
    bfile = tmp_path / "caps.txt"
    bfile.write_text("1 1 1 1\n")
    code, _, _ = run_cli(
        ["solve", "-i", instance, "--bfile", str(bfile)], capsys
    )
    assert code == 2


def test_gen_roundtrip(tmp_path, capsys):
    dest = tmp_path / "gen.bbm"
    argv = ["gen", "--na", "6", "--nb", "7", "--m", "20", "--bmax", "3",
            "--seed", "9", "-o", str(dest)]
    assert run_cli(argv, capsys)[0] == 0
    text1 = dest.read_text()
    assert run_cli(argv, capsys)[0] == 0
    assert dest.read_text() == text1  # same seed, same bytes
    code, out, _ = run_cli(["solve", "-i", str(dest), "-q"], capsys)
    assert code == 0 and json.loads(out)["m"] == 20


def test_gen_infeasible_m_exits_2(capsys):
    code, _, err = run_cli(
        ["gen", "--na", "2", "--nb", "2", "--m", "9"], capsys
    )
    assert code == 2 and "distinct edges" in err


def test_bench_csv(capsys):
    code, out, _ = run_cli(
        ["bench", "--sizes", "400,800", "--eps", "0.3", "--seed", "4"],
        capsys,
    )
    assert code == 0
    rows = out.strip().splitlines()
    assert rows[0] == "m,beta,s_min,pops,wall_ms"
    assert len(rows) == 3
    first = rows[1].split(",")
    assert first[0] == "400"
    assert int(first[3]) > 0  # pops recorded


def test_bench_bad_sizes_exits_2(capsys):
    assert run_cli(["bench", "--sizes", "a,b"], capsys)[0] == 2
    assert run_cli(["bench", "--sizes", "0"], capsys)[0] == 2
