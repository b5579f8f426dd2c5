"""File formats and the command-line interface."""

import json
import math
import os
import re
import subprocess
import sys

import pytest

import exchange_lab
from exchange_lab import Allocation, EXAMPLE_NAMES, PriceVector, build_example
from exchange_lab.cli import main
from exchange_lab.jsonio import (
    InputError,
    allocation_from_json,
    allocation_to_json,
    economy_from_json,
    economy_to_json,
    load_economy,
    prices_from_json,
    prices_to_json,
    save_json,
)


# ---------------------------------------------------------------------------
# JSON round trips and diagnostics


def test_economy_round_trip_all_examples():
    for name in EXAMPLE_NAMES:
        e = build_example(name).economy
        again = economy_from_json(economy_to_json(e))
        assert again == e, name


def test_catalog_specs_rebuild_their_economies():
    for name in EXAMPLE_NAMES:
        case = build_example(name)
        assert economy_from_json(case.economy_spec) == case.economy, name


def test_allocation_round_trip_with_unallocated():
    e = build_example("ex-no-eq").economy
    f = Allocation((0, None, 2))
    data = allocation_to_json(e, f)
    assert data == {
        "assignment": {"1": ["a"], "2": [], "3": ["c"]},
        "unallocated": ["b"],
    }
    assert allocation_from_json(data, e).assignment == f.assignment
    # items not mentioned anywhere default to unallocated
    bare = allocation_from_json({"assignment": {"3": ["c"]}}, e)
    assert bare.assignment == (None, None, 2)


def test_allocation_diagnostics():
    e = build_example("ex-no-eq").economy
    with pytest.raises(InputError, match="assignment\\['9'\\]"):
        allocation_from_json({"assignment": {"9": []}}, e)
    with pytest.raises(InputError, match="assigned twice"):
        allocation_from_json({"assignment": {"1": ["a"], "2": ["a"]}}, e)
    with pytest.raises(InputError, match="both assigned and unallocated"):
        allocation_from_json(
            {"assignment": {"1": ["a"]}, "unallocated": ["a"]}, e
        )
    with pytest.raises(InputError, match="unknown item"):
        allocation_from_json({"assignment": {"1": ["z"]}}, e)
    with pytest.raises(InputError, match="expected list"):
        allocation_from_json({"assignment": {"1": "a"}}, e)


def test_prices_round_trip_and_diagnostics():
    e = build_example("ex-no-eq").economy
    p = PriceVector([0.1, math.sqrt(2.0), 0.0])
    data = prices_to_json(e, p)
    assert list(prices_from_json(data, e)) == list(p)  # bit-identical floats
    with pytest.raises(InputError, match="missing items"):
        prices_from_json({"a": 1.0}, e)
    with pytest.raises(InputError, match="prices\\['z'\\]"):
        prices_from_json({"a": 1, "b": 1, "c": 1, "z": 1}, e)
    with pytest.raises(InputError, match="negative"):
        prices_from_json({"a": -1.0, "b": 0, "c": 0}, e)
    with pytest.raises(InputError, match="expected int/float"):
        prices_from_json({"a": True, "b": 0, "c": 0}, e)


def test_economy_diagnostics_name_the_path():
    with pytest.raises(InputError, match="economy.items"):
        economy_from_json({"items": ["a", "a"], "agents": []})
    with pytest.raises(InputError, match="missing key 'items'"):
        economy_from_json({"agents": []})
    bad_valuation = {
        "items": ["a"],
        "agents": [{"name": "1", "valuation": {"type": "nope"}}],
    }
    with pytest.raises(InputError, match="economy.agents\\[0\\].valuation"):
        economy_from_json(bad_valuation)
    bad_bundle = {
        "items": ["a"],
        "agents": [
            {
                "name": "1",
                "valuation": {
                    "type": "explicit",
                    "table": [{"bundle": ["z"], "value": 1}],
                },
            }
        ],
    }
    with pytest.raises(InputError, match="table\\[0\\].*unknown item 'z'"):
        economy_from_json(bad_bundle)


def test_load_errors_carry_position_and_path(tmp_path):
    broken = tmp_path / "broken.json"
    broken.write_text('{"items": [}')
    with pytest.raises(InputError, match=r"broken\.json:1:12"):
        load_economy(str(broken))
    with pytest.raises(InputError, match="missing.json"):
        load_economy(str(tmp_path / "missing.json"))


def test_save_json_is_canonical(tmp_path):
    target = tmp_path / "out.json"
    save_json(str(target), {"b": 1, "a": [1.5, None]})
    assert target.read_text() == '{\n  "b": 1,\n  "a": [\n    1.5,\n    null\n  ]\n}\n'


# ---------------------------------------------------------------------------
# CLI


@pytest.fixture(scope="module")
def example_files(tmp_path_factory):
    """All catalog files written once through the examples command."""
    out = tmp_path_factory.mktemp("cases")
    assert main(["examples", "--out-dir", str(out)]) == 0
    return out


def _path(example_files, name, kind):
    return str(example_files / f"{name}.{kind}.json")


def _run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_examples_command_writes_all_files(example_files, capsys):
    for name in EXAMPLE_NAMES:
        for kind in ("economy", "allocation", "prices"):
            assert os.path.exists(_path(example_files, name, kind)), (name, kind)
    code, out = _run(
        capsys, ["examples", "ex-smallq", "--epsilon", "0.25", "--out-dir", str(example_files)]
    )
    assert code == 0
    written = json.loads(out)["results"]["written"]
    assert written["ex-smallq"]["params"] == {"epsilon": 0.25}
    prices = json.loads((example_files / "ex-smallq.prices.json").read_text())
    assert prices == {"a": 0.5}


def test_examples_command_rejects_unknown_names(capsys):
    assert main(["examples", "ex-bogus"]) == 2


def test_analyze_report_values(example_files, capsys):
    code, out = _run(
        capsys, ["analyze", "--economy", _path(example_files, "ex-no-wal", "economy")]
    )
    assert code == 0
    report = json.loads(out)
    assert report["command"] == "analyze"
    assert report["version"] == exchange_lab.__version__
    assert re.fullmatch(r"[0-9a-f]{64}", report["economy_sha256"])
    results = report["results"]
    assert results["max_index"] == "infinite"
    assert results["integral_optimum"] == 4.0
    assert results["fractional_optimum"] == 4.5
    assert results["integral_gap"] == 1.125
    assert results["dual_prices"] == {"a": 1.5, "b": 1.5, "c": 1.5}
    assert results["dual_agent_utilities"] == {"1": 0.0, "2": 0.0}


def test_analyze_csv_round(example_files, capsys):
    code, out = _run(
        capsys,
        [
            "analyze",
            "--economy",
            _path(example_files, "ex-no-wal", "economy"),
            "--format",
            "csv",
        ],
    )
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "key,value"
    assert "results.fractional_optimum,4.5" in lines
    assert "results.max_index,infinite" in lines


def test_verify_reports_quality_and_checks(example_files, capsys):
    argv = [
        "verify",
        "--economy", _path(example_files, "ex-first", "economy"),
        "--allocation", _path(example_files, "ex-first", "allocation"),
        "--prices", _path(example_files, "ex-first", "prices"),
        "--walrasian", "--quasi", "--single-swap", "--c", "1.0",
    ]
    code, out = _run(capsys, argv)
    assert code == 0  # not strict, so failures only report
    results = json.loads(out)["results"]
    assert results["quality"]["r_star"] == 1.5
    assert results["quality"]["s_star"] == 2.0
    assert results["social_value"] == 6.0
    checks = results["checks"]
    assert checks["local"]["holds"] is True
    assert checks["walrasian"]["holds"] is False
    assert checks["single_swap"]["holds"] is False
    assert checks["quasi_quality"] == 0.5
    assert checks["strong"]["holds"] is True


def test_verify_strict_exit_codes(example_files, capsys):
    base = [
        "verify",
        "--economy", _path(example_files, "ex-first", "economy"),
        "--allocation", _path(example_files, "ex-first", "allocation"),
        "--prices", _path(example_files, "ex-first", "prices"),
        "--strict",
    ]
    assert main(base) == 0
    capsys.readouterr()
    assert main(base + ["--r", "1.6"]) == 1
    capsys.readouterr()
    assert main(base + ["--walrasian"]) == 1
    capsys.readouterr()


def test_run_greedy_with_order(example_files, capsys):
    code, out = _run(
        capsys,
        [
            "run", "greedy",
            "--economy", _path(example_files, "ex-no-pareto", "economy"),
            "--order", "a, b",
            "--verify",
        ],
    )
    assert code == 0
    results = json.loads(out)["results"]
    assert results["allocation"]["assignment"] == {"1": ["a", "b"], "2": []}
    assert results["prices"] == {"a": 4.0, "b": 1.0}
    assert results["value"] == 7.0
    assert results["trace"]["order"] == ["a", "b"]
    assert results["trace"]["winners"] == ["1", "1"]
    assert results["trace"]["stage_prices"] == [4.0, 1.0]
    assert results["local_check"]["holds"] is True


def test_run_local_search_and_move_cap(example_files, capsys):
    econ = _path(example_files, "ex-no-pareto", "economy")
    code, out = _run(capsys, ["run", "local-search", "--economy", econ, "--verify"])
    assert code == 0
    results = json.loads(out)["results"]
    assert results["status"] == "converged"
    assert results["value"] == 9.0
    assert results["local_optimum"]["holds"] is True
    code, _ = _run(
        capsys, ["run", "local-search", "--economy", econ, "--move-cap", "0"]
    )
    assert code == 3


def test_run_optimal_and_supporting_prices(example_files, capsys, tmp_path):
    econ = _path(example_files, "ex-no-pareto", "economy")
    code, out = _run(capsys, ["run", "optimal", "--economy", econ])
    assert code == 0
    assert json.loads(out)["results"]["value"] == 9.0

    crossed = tmp_path / "crossed.json"
    save_json(str(crossed), {"assignment": {"1": ["b"], "2": ["a"]}})
    code, out = _run(
        capsys,
        [
            "run", "supporting-prices",
            "--economy", econ,
            "--allocation", str(crossed),
            "--lambda", "1.0",
        ],
    )
    assert code == 0
    assert json.loads(out)["results"]["prices"] == {"a": 4.0, "b": 5.0}

    bad = tmp_path / "both.json"
    save_json(str(bad), {"assignment": {"1": ["a", "b"]}})
    assert main(
        ["run", "supporting-prices", "--economy", econ, "--allocation", str(bad)]
    ) == 2
    capsys.readouterr()


def test_run_max_q_variants(example_files, capsys):
    econ = _path(example_files, "ex-no-eq", "economy")
    alloc = _path(example_files, "ex-no-eq", "allocation")
    code, out = _run(
        capsys,
        ["run", "max-q", "--economy", econ, "--allocation", alloc,
         "--verify", "--tol", "1e-6"],
    )
    assert code == 0
    results = json.loads(out)["results"]
    assert results["q_star"] == pytest.approx(1.0, abs=1e-9)
    assert results["prices"]["c"] == pytest.approx(1.0, abs=1e-6)
    assert results["local_check"]["holds"] is True

    code, out = _run(
        capsys,
        ["run", "max-q", "--economy", econ, "--allocation", alloc, "--equal-prices"],
    )
    results = json.loads(out)["results"]
    assert results["equal_prices"] is True
    assert results["q_star"] == pytest.approx(math.sqrt(2.0 / 3.0), abs=1e-6)

    infinite = [
        "run", "max-q",
        "--economy", _path(example_files, "ex-welfare-pair", "economy"),
        "--allocation", _path(example_files, "ex-welfare-pair", "allocation"),
    ]
    code, out = _run(capsys, infinite)
    assert json.loads(out)["results"]["q_star"] == "infinite"


def test_run_max_quasi_q(example_files, capsys):
    code, out = _run(
        capsys,
        [
            "run", "max-quasi-q",
            "--economy", _path(example_files, "ex-welfare-pair", "economy"),
            "--allocation", _path(example_files, "ex-welfare-pair", "allocation"),
            "--verify",
        ],
    )
    assert code == 0
    results = json.loads(out)["results"]
    assert results["q_star"] == pytest.approx(1.0)
    assert results["quasi_quality"] == pytest.approx(1.0)


def test_run_rejects_csv_format(example_files):
    assert (
        main(
            [
                "run", "optimal",
                "--economy", _path(example_files, "ex-first", "economy"),
                "--format", "csv",
            ]
        )
        == 2
    )


def test_missing_and_malformed_inputs_exit_2(tmp_path, capsys):
    assert main(["analyze", "--economy", str(tmp_path / "nope.json")]) == 2
    capsys.readouterr()
    dup = tmp_path / "dup.json"
    save_json(
        str(dup),
        {
            "items": ["a", "a"],
            "agents": [
                {"name": "1", "valuation": {"type": "additive", "values": [1, 1]}}
            ],
        },
    )
    assert main(["analyze", "--economy", str(dup)]) == 2
    capsys.readouterr()


def test_reports_are_byte_deterministic(example_files, tmp_path, capsys):
    argv = [
        "verify",
        "--economy", _path(example_files, "ex-no-wal", "economy"),
        "--allocation", _path(example_files, "ex-no-wal", "allocation"),
        "--prices", _path(example_files, "ex-no-wal", "prices"),
        "--quasi",
    ]
    first = tmp_path / "one.json"
    second = tmp_path / "two.json"
    assert main(argv + ["--out", str(first)]) == 0
    assert main(argv + ["--out", str(second)]) == 0
    assert capsys.readouterr().out == ""  # --out silences stdout
    assert first.read_bytes() == second.read_bytes()


def test_fingerprint_ignores_file_formatting(example_files, tmp_path, capsys):
    origin = _path(example_files, "ex-first", "economy")
    reflowed = tmp_path / "reflowed.json"
    reflowed.write_text(json.dumps(json.loads(open(origin).read())))  # one line
    _, out_a = _run(capsys, ["analyze", "--economy", origin])
    _, out_b = _run(capsys, ["analyze", "--economy", str(reflowed)])
    sha_a = json.loads(out_a)["economy_sha256"]
    sha_b = json.loads(out_b)["economy_sha256"]
    assert sha_a == sha_b


def test_tolerance_env_override(example_files):
    argv = [
        "-m", "exchange_lab.cli",
        "verify",
        "--economy", _path(example_files, "ex-first", "economy"),
        "--allocation", _path(example_files, "ex-first", "allocation"),
        "--prices", _path(example_files, "ex-first", "prices"),
        "--r", "1.6", "--strict",
    ]
    env = dict(os.environ)
    env.pop("EXCHANGE_LAB_TOL", None)
    tight = subprocess.run([sys.executable, *argv], env=env, capture_output=True)
    assert tight.returncode == 1
    env["EXCHANGE_LAB_TOL"] = "0.5"
    loose = subprocess.run([sys.executable, *argv], env=env, capture_output=True)
    assert loose.returncode == 0


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert exchange_lab.__version__ in capsys.readouterr().out
