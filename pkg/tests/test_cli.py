import hashlib
import json
import shutil
import subprocess
import sys

import jsonschema
import pytest

from oscilkit.audit import AUDIT_SCHEMA
from oscilkit.cli import DEFAULTS, main, parse_grid


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture(scope="module")
def audit_json(tmp_path_factory):
    path = tmp_path_factory.mktemp("audit") / "report.json"
    code = main(["audit", "--format", "json", "--out", str(path)])
    return code, json.loads(path.read_text())


def test_grid_parser():
    g = parse_grid("1e-3:1e3:5:log")
    assert (g.lo, g.hi, g.count, g.log) == (1e-3, 1e3, 5, True)
    for bad in ("0:1", "1:0:5", "0:1:1", "0:1:5:log", "a:b:c"):
        with pytest.raises(Exception):
            parse_grid(bad)


@pytest.mark.parametrize("command", ["fig1", "fig3", "cross-sections", "sum-rule", "trajectory", "stark"])
def test_commands_emit_tables(command, capsys):
    argv = [command]
    if DEFAULTS[command][1]:
        argv += ["--grid", "0.5:1.5:5" if command != "fig1" else "1e-8:3:5:log"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == f"# table: {command}"
    header = next(l for l in lines if not l.startswith("#"))
    assert len(header.split(",")) >= 4


def test_fig2_default_grid_row(capsys):
    code, out, _ = run(["fig2", "--grid", "0:3:4", "--format", "json"], capsys)
    assert code == 0
    doc = json.loads(out)
    i = doc["columns"].index("kk_of_X_im")
    assert doc["rows"][0][i] == pytest.approx(0.5, abs=0.05)
    assert doc["metadata"]["grid_lines_ordered"] is True


def test_si_units_need_frequency(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["cross-sections", "--si-electron"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["cross-sections", "--omega0", "1e15"])
    assert exc.value.code == 2
    code, out, _ = run(["cross-sections", "--si-electron", "--omega0", "1e15", "--grid", "0.5:2:4"], capsys)
    assert code == 0 and "# omega0: 1000000000000000" in out


def test_bad_arguments_exit_2():
    for argv in (["nope"], ["fig1", "--grid", "1:0:3"], ["fig2", "--tau-omega0", "-1"], ["trajectory", "--init", "1,2"]):
        with pytest.raises(SystemExit) as exc:
            main(argv)
        assert exc.value.code == 2


def test_numeric_failure_exit_3(capsys):
    code, _, err = run(["fig3", "--tau-omega0", "1e300"], capsys)
    assert code == 3 and err.startswith("oscilkit: numeric failure")


def test_library_domain_error_exit_2(capsys):
    code, _, err = run(["stark", "--grid=-2:-1:3"], capsys)
    assert code == 2 and err.startswith("oscilkit:")


def test_output_is_deterministic(tmp_path):
    digests = []
    for k in range(2):
        path = tmp_path / f"run{k}.csv"
        assert main(["trajectory", "--t-end", "5", "--out", str(path)]) == 0
        digests.append(hashlib.sha256(path.read_bytes()).hexdigest())
    assert digests[0] == digests[1]


def test_trajectory_options(capsys):
    code, out, _ = run(["trajectory", "--init", "1,0,0", "--project-bounded", "--t-end", "10", "--format", "json"], capsys)
    doc = json.loads(out)
    assert code == 0
    assert doc["metadata"]["project_bounded"] is True
    assert doc["metadata"]["diverged_at"] is None


def test_audit_report_schema(audit_json):
    _, doc = audit_json
    jsonschema.validate(doc, AUDIT_SCHEMA)
    assert doc["n_passed"] + doc["n_failed"] == len(doc["checks"])
    ids = [c["id"] for c in doc["checks"]]
    assert len(ids) == len(set(ids))


def test_audit_exit_code_reflects_checks(audit_json):
    code, doc = audit_json
    assert code == (0 if doc["all_passed"] else 1)


def test_injected_width_fails_sum_rule(tmp_path):
    path = tmp_path / "inj.json"
    code = main(["audit", "--inject-jackson", "--format", "json", "--out", str(path)])
    doc = json.loads(path.read_text())
    assert code != 0
    check = next(c for c in doc["checks"] if c["id"] == "4a")
    assert not check["passed"]
    assert doc["options"]["inject_jackson"] is True


@pytest.mark.skipif(shutil.which("oscilkit") is None, reason="console script not installed")
def test_console_script():
    proc = subprocess.run(["oscilkit", "fig1", "--grid", "1:2:2"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("# table: fig1")


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "oscilkit.cli", "fig1", "--grid", "1:2:2"], capture_output=True, text=True)
    assert proc.returncode == 0
