import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from graphmms.cli import BENCH_COLUMNS, main
from graphmms.model import parse_instance
from graphmms.valuations import validate_valuation


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def greedy_bad(tmp_path, capsys):
    path = tmp_path / "gb.json"
    assert main(["gen", "--preset", "greedy-bad", "--n", "5", "--out", str(path)]) == 0
    capsys.readouterr()
    return path


def test_gen_greedy_bad(greedy_bad):
    inst = parse_instance(greedy_bad.read_bytes())
    assert inst.n == 5 and inst.m == 9 and inst.value(1, {0}) == 5


def test_gen_random_deterministic(capsys):
    argv = ["gen", "--random", "additive", "--n", "4", "--m", "8", "--seed", "7"]
    _, a, _ = run(capsys, *argv)
    _, b, _ = run(capsys, *argv)
    assert a == b and a


def test_gen_random_subadditive_valid(capsys):
    code, out, _ = run(capsys, "gen", "--random", "subadditive", "--n", "3", "--m", "6", "--seed", "1")
    assert code == 0
    inst = parse_instance(out)
    assert all(validate_valuation(v, inst.graph).ok for v in inst.valuations)


@pytest.mark.parametrize("preset", ["complete-unit", "mms-not-pmms", "xos-pmms-upper",
                                    "subadditive-upper", "xos-upper", "k22-witness"])
def test_gen_presets(capsys, preset):
    code, out, _ = run(capsys, "gen", "--preset", preset)
    assert code == 0
    parse_instance(out)


def test_gen_usage_errors(capsys):
    assert run(capsys, "gen")[0] == 2
    assert run(capsys, "gen", "--preset", "greedy-bad", "--random", "xos")[0] == 2
    assert run(capsys, "gen", "--preset", "nope")[0] == 2
    assert run(capsys, "gen", "--preset", "xos-upper", "--b", "3")[0] == 2


def test_solve_cut_choose(capsys, greedy_bad):
    code, out, err = run(capsys, "solve", str(greedy_bad), "-a", "cut-choose", "--trace")
    assert code == 0
    data = json.loads(out)
    assert F(data["report"]["min_mms_ratio"]) >= 1 and F(data["report"]["min_pmms_ratio"]) >= 1
    assert data["guarantee"]["holds"] and "pairs" in data["trace"]
    assert err.startswith("agent")


def test_solve_greedy_reports_half(capsys, greedy_bad):
    code, out, _ = run(capsys, "solve", str(greedy_bad), "-a", "greedy", "--quiet")
    assert code == 0
    data = json.loads(out)
    assert data["report"]["agents"][1]["pmms_ratio"] == "1/2"


def test_solve_xos23(capsys, tmp_path):
    path = tmp_path / "x.json"
    main(["gen", "--random", "xos", "--n", "4", "--m", "8", "--max-degree", "6", "--seed", "3",
          "--out", str(path)])
    code, out, _ = run(capsys, "solve", str(path), "-a", "xos-23", "--trace", "--quiet")
    assert code == 0
    data = json.loads(out)
    assert F(data["report"]["min_mms_ratio"]) >= F(2, 3)
    assert data["report"]["is_frugal"]


def test_solve_orient_leftovers(capsys, tmp_path):
    path = tmp_path / "x.json"
    main(["gen", "--random", "xos", "--n", "3", "--m", "8", "--seed", "5", "--out", str(path)])
    capsys.readouterr()
    code, out, _ = run(capsys, "solve", str(path), "-a", "xos-3", "--orient-leftovers", "--quiet")
    assert code == 0
    assert json.loads(out)["report"]["is_partition"]


def test_solve_class_mismatch(capsys, tmp_path):
    path = tmp_path / "x.json"
    main(["gen", "--random", "xos", "--n", "3", "--seed", "1", "--out", str(path)])
    capsys.readouterr()
    code, _, err = run(capsys, "solve", str(path), "-a", "cut-choose")
    assert code == 2 and "not additive" in err


def test_solve_cap_exit(capsys, tmp_path):
    path = tmp_path / "x.json"
    main(["gen", "--random", "additive", "--n", "4", "--m", "16", "--seed", "1", "--out", str(path)])
    capsys.readouterr()
    code, _, err = run(capsys, "solve", str(path), "-a", "exhaustive", "--mode", "allocations")
    assert code == 3 and "cap exceeded" in err


def test_solve_write_allocation_and_verify(capsys, greedy_bad, tmp_path):
    alloc = tmp_path / "a.json"
    run(capsys, "solve", str(greedy_bad), "-a", "greedy", "--out", str(alloc), "--quiet")
    code, out, _ = run(capsys, "verify", str(greedy_bad), str(alloc), "--measure", "pmms", "--quiet")
    assert code == 1 and not json.loads(out)["holds"]
    code, out, _ = run(capsys, "verify", str(greedy_bad), str(alloc), "--measure", "pmms",
                       "--alpha", "1/2", "--quiet")
    assert code == 0


def test_verify_rejects_unknown_edges(capsys, greedy_bad, tmp_path):
    alloc = tmp_path / "a.json"
    alloc.write_text(json.dumps({"bundles": [[99], [], [], [], []]}))
    code, _, err = run(capsys, "verify", str(greedy_bad), str(alloc))
    assert code == 2 and "unknown edge" in err


def test_verify_mms_not_pmms_explicit_allocation(capsys, tmp_path):
    path = tmp_path / "i.json"
    main(["gen", "--preset", "mms-not-pmms", "--M", "10", "--out", str(path)])
    capsys.readouterr()
    alloc = tmp_path / "a.json"
    alloc.write_text(json.dumps({"bundles": [[2], [0, 1], []]}))
    code, out, _ = run(capsys, "verify", str(path), str(alloc), "--quiet")
    assert code == 0
    assert json.loads(out)["report"]["agents"][0]["pmms_ratio"] == "1/10"


def test_bad_json_is_usage_error(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{")
    assert run(capsys, "solve", str(bad), "-a", "greedy")[0] == 2
    assert run(capsys, "mms", str(tmp_path / "missing.json"))[0] == 2
    assert run(capsys, "solve")[0] == 2


def bench_csv(capsys, *extra):
    code, out, _ = run(capsys, "bench", *extra)
    return code, list(csv.DictReader(io.StringIO(out)))


def test_bench_cut_choose(capsys):
    code, rows = bench_csv(capsys, "--trials", "100", "--n", "4")
    assert code == 0
    assert min(F(r["mms_ratio"]) for r in rows if r["algorithm"] == "cut-choose") >= 1
    assert all(r["micros"] == "" for r in rows)


def test_bench_xos3(capsys):
    code, rows = bench_csv(capsys, "--family", "xos", "--algorithms", "xos-3", "--n", "3",
                           "--trials", "100")
    assert code == 0
    assert min(F(r["mms_ratio"]) for r in rows) >= F(2, 3)
    assert {r["d"] for r in rows} == {"3"}


def test_bench_empty_and_header(capsys):
    code, out, _ = run(capsys, "bench", "--trials", "0")
    assert code == 0 and out == ",".join(BENCH_COLUMNS) + "\n"


def test_bench_jobs_same_bytes(capsys):
    _, a, _ = run(capsys, "bench", "--trials", "6", "--jobs", "2")
    _, b, _ = run(capsys, "bench", "--trials", "6")
    assert a == b


def test_bench_timing_fills_micros(capsys):
    _, rows = bench_csv(capsys, "--trials", "2", "--timing")
    assert all(r["micros"].isdigit() for r in rows)


def test_bench_unknown_algorithm(capsys):
    assert run(capsys, "bench", "--algorithms", "nope")[0] == 2


def test_its_k22(capsys):
    code, out, _ = run(capsys, "its", "k22")
    data = json.loads(out)
    assert code == 0 and data["its"] is None and data["metrics"]["max_degree"] == 4


def test_its_file_and_delta(capsys, fixtures_dir):
    code, out, _ = run(capsys, "its", str(fixtures_dir / "no_its_r3_d3_b3.json"))
    assert json.loads(out)["its"] is None
    _, out, _ = run(capsys, "its", "--delta", "5", "5")
    assert json.loads(out)["delta"] == 4
    assert run(capsys, "its", "--delta", "2", "2")[0] == 2
    assert run(capsys, "its")[0] == 2


def test_its_search(capsys):
    code, out, _ = run(capsys, "its", "--search", "2", "2", "2", "--no-ilp")
    data = json.loads(out)
    assert code == 0 and data["graph"] is not None


def test_mms_table(capsys, fixtures_dir):
    code, out, _ = run(capsys, "mms", str(fixtures_dir / "k3.json"), "--d", "2", "--d", "3")
    rows = json.loads(out)["mms"]
    assert code == 0 and len(rows) == 6
    assert rows[0] == {"agent": 1, "d": 2, "mu": "1/2", "canonical": [[0], [2]]}


def test_format_flag(capsys, fixtures_dir):
    assert run(capsys, "--format", "json", "mms", str(fixtures_dir / "k3.json"))[0] == 0
    assert run(capsys, "--format", "csv", "mms", str(fixtures_dir / "k3.json"))[0] == 2


def test_module_entry_point(fixtures_dir):
    proc = subprocess.run([sys.executable, "-m", "graphmms", "mms", str(fixtures_dir / "k3.json")],
                          capture_output=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["mms"]
