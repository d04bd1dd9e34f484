import csv
import io
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from conftest import KET_0, KET_F2, KET_M, KET_P, R2, oracle_fid
from spinbrach.cli import (
    EXIT_INPUT,
    EXIT_OK,
    EXIT_UNREACHABLE,
    EXIT_UNREACHABLE_SEARCH,
    EXIT_VERIFY_FAILED,
    TRAJECTORY_HEADER,
    main,
)


def state_json(v):
    return json.dumps({"components": [[float(c.real), float(c.imag)] for c in np.asarray(v, dtype=complex)]})


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out=out)
    return code, out.getvalue()


def components(obj):
    return np.array([complex(re, im) for re, im in obj["components"]])


def test_solve_example1():
    code, text = run("solve", "--initial", state_json(KET_M), "--final", state_json(KET_P))
    assert code == EXIT_OK
    body = json.loads(text)
    assert body["t_star"] == pytest.approx(math.pi, rel=1e-6)
    assert body["theta_star"] == pytest.approx(math.pi / 2, abs=math.pi / 180)
    assert body["t_delta_omega"] == pytest.approx(2 * math.pi, rel=1e-6)
    assert body["t_over_speed_limit"] == pytest.approx(2.0, rel=1e-6)
    assert oracle_fid(components(body["final_state"]), KET_P) > 1 - 1e-9


def test_solve_example2_csv():
    code, text = run("solve", "--initial", state_json(KET_0), "--final", state_json(KET_F2), "--format", "csv")
    assert code == EXIT_OK
    rows = dict(r for r in csv.reader(io.StringIO(text)) if len(r) == 2)
    assert float(rows["t_star"]) == pytest.approx(math.pi / 2, rel=1e-6)


def test_solve_unreachable_by_search():
    s3 = np.ones(3) / math.sqrt(3)
    code, text = run("solve", "--initial", state_json(KET_M), "--final", state_json(s3), "--grid", "19,36")
    assert code == EXIT_UNREACHABLE_SEARCH
    assert json.loads(text)["best_infidelity"] > 1e-3


@pytest.mark.parametrize("final,fragment", [
    ('{"components": [[0.5,0],[0,0],[0,0]]}', "final: state norm"),
    ('{"components": [[1,0],[0,0]]}', "final.components"),
    ('{"components": [[1,0],[0,"x"],[0,0]]}', "final.components[1]"),
    ('{"comp": []}', "final: missing 'components'"),
    ("{not json", "final: invalid JSON"),
])
def test_solve_malformed_final(final, fragment, capsys):
    code, _ = run("solve", "--initial", state_json(KET_M), "--final", final)
    assert code == EXIT_INPUT
    assert fragment in capsys.readouterr().err


@pytest.mark.parametrize("argv", [
    ["solve", "--initial", state_json(KET_M), "--final", state_json(KET_P), "--grid", "4,4"],
    ["solve", "--initial", state_json(KET_M), "--final", state_json(KET_P), "--delta-omega", "0"],
    ["solve", "--initial", state_json(KET_M), "--final", state_json(KET_P), "--tolerance", "2"],
    ["trajectory", "--initial", state_json(KET_M), "--direction", '{"theta": 1, "phi": 0}', "--t-end", "1",
     "--samples", "1"],
    ["evolve", "--initial", state_json(KET_M), "--direction", '{"theta": 4, "phi": 0}', "--time", "1"],
    ["evolve", "--initial", state_json(KET_M), "--direction", '{"theta": 1}', "--time", "1"],
    ["evolve", "--initial", state_json(KET_M), "--direction", '{"theta": 1, "phi": 0}', "--time", "-1"],
    ["solve", "--initial", state_json(KET_M)],
])
def test_input_errors_exit_1(argv, capsys):
    assert run(*argv)[0] == EXIT_INPUT
    capsys.readouterr()


def test_evolve_zero_echoes_initial():
    psi = np.array([0.6, 0.0, 0.8j])
    code, text = run("evolve", "--initial", state_json(psi), "--direction", '{"theta": 1.0, "phi": 2.0}', "--time", "0")
    assert code == EXIT_OK
    np.testing.assert_array_equal(components(json.loads(text)), psi)


def test_evolve_degrees_matches_radians():
    a = run("evolve", "--initial", state_json(KET_M), "--direction", '{"theta": 90, "phi": 45}', "--degrees",
            "--time", "1.3")[1]
    b = run("evolve", "--initial", state_json(KET_M), "--direction",
            json.dumps({"theta": math.pi / 2, "phi": math.pi / 4}), "--time", "1.3")[1]
    np.testing.assert_allclose(components(json.loads(a)), components(json.loads(b)), atol=1e-15)


def test_evolve_csv_header():
    code, text = run("evolve", "--initial", state_json(KET_M), "--direction", '{"theta": 1, "phi": 0}', "--time", "1",
                     "--format", "csv")
    assert text.splitlines()[0] == "t,omega_t,re0,im0,re1,im1,re2,im2"


def test_trajectory_example1_rows():
    code, text = run("trajectory", "--initial", state_json(KET_M), "--direction", '{"theta": 1.5707963267948966, "phi": 0}',
                     "--t-end", repr(math.pi), "--samples", "3", "--span-final", state_json(KET_P))
    assert code == EXIT_OK
    rows = list(csv.reader(io.StringIO(text)))
    assert rows[0] == TRAJECTORY_HEADER + ["residual"]
    assert ",".join(rows[0]) == "t,omega_t,re0,im0,re1,im1,re2,im2,fidelity_final,residual"
    assert [float(r[0]) for r in rows[1:]] == [0.0, math.pi / 2, math.pi]
    assert float(rows[2][-1]) == pytest.approx(1 / R2, abs=1e-8)
    assert float(rows[3][-2]) == pytest.approx(1.0, abs=1e-12)


def test_trajectory_without_span_and_json():
    code, text = run("trajectory", "--initial", state_json(KET_M), "--direction", '{"theta": 1, "phi": 0}',
                     "--t-end", "2", "--samples", "5")
    header = text.splitlines()[0]
    assert header == ",".join(TRAJECTORY_HEADER)
    # 17 significant digits
    assert text.splitlines()[2].split(",")[0] == "0.5"
    code, text = run("trajectory", "--initial", state_json(KET_M), "--direction", '{"theta": 1, "phi": 0}',
                     "--t-end", "2", "--samples", "5", "--format", "json")
    assert len(json.loads(text)["samples"]) == 5


def test_trajectory_parallel_span_final_is_input_error(capsys):
    code, _ = run("trajectory", "--initial", state_json(KET_M), "--direction", '{"theta": 1, "phi": 0}',
                  "--t-end", "2", "--span-final", state_json(-1j * KET_M))
    assert code == EXIT_INPUT
    assert "span-final" in capsys.readouterr().err


@pytest.mark.parametrize("target,code,reachable", [
    (KET_P, EXIT_OK, True),
    (np.ones(3) / math.sqrt(3), EXIT_UNREACHABLE, False),
    (KET_M, EXIT_OK, True),
])
def test_reach(target, code, reachable):
    c, text = run("reach", "--final", state_json(target))
    body = json.loads(text)
    assert c == code and body["reachable"] is reachable


def test_reach_details():
    body = json.loads(run("reach", "--final", state_json(KET_P))[1])
    assert body["witness"]["omega_t"] == pytest.approx(math.pi, abs=1e-9)
    body = json.loads(run("reach", "--final", state_json(np.ones(3) / math.sqrt(3)))[1])
    assert body["modulus_residuals"] == pytest.approx([0.155, 0.155], abs=1e-3)
    body = json.loads(run("reach", "--final", state_json(KET_M))[1])
    assert body["witness"]["t"] == 0.0


def test_state_file_argument(tmp_path):
    p = tmp_path / "final.json"
    p.write_text(state_json(KET_P))
    assert run("reach", "--final", str(p))[0] == EXIT_OK


def test_json_roundtrip_is_exact():
    psi = np.array([0.1 + 0.2j, -0.3j, 0.5])
    psi = psi / np.linalg.norm(psi)
    text = run("evolve", "--initial", state_json(psi), "--direction", '{"theta": 0.9, "phi": 0.4}', "--time", "0.7")[1]
    once = components(json.loads(text))
    again = run("evolve", "--initial", json.dumps({"components": json.loads(text)["components"]}),
                "--direction", '{"theta": 0.9, "phi": 0.0}', "--time", "0")[1]
    assert np.max(np.abs(components(json.loads(again)) - once)) <= 1e-15


def test_deterministic_output():
    argv = ["solve", "--initial", state_json(KET_M), "--final", state_json(KET_P), "--grid", "31,36"]
    assert run(*argv)[1] == run(*argv)[1]


def test_verify_text_and_json():
    code, text = run("verify")
    assert code == EXIT_OK
    lines = text.splitlines()
    assert lines[-1] == "ALL CHECKS PASSED"
    assert any(line.startswith("[INFO] example2_span_residual_at_optimum") for line in lines)
    assert not any(line.startswith("[FAIL]") for line in lines)
    code, text = run("verify", "--format", "json")
    body = json.loads(text)
    assert code == EXIT_OK and body["passed"]
    assert all({"name", "expected", "source", "measured", "tolerance", "passed"} <= set(c) for c in body["checks"])


def test_verify_tight_tolerance_fails():
    code, text = run("verify", "--tolerance", "1e-15", "--format", "csv")
    assert code == EXIT_VERIFY_FAILED
    assert ",fail," in text


def test_console_script_exit_code():
    r = subprocess.run([sys.executable, "-m", "spinbrach", "reach", "--final", state_json(np.ones(3) / math.sqrt(3))],
                       capture_output=True, text=True)
    assert r.returncode == EXIT_UNREACHABLE
