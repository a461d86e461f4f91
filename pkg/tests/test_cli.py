import csv
import math

import numpy as np
import pytest

from twophoton.cli import ConfigError, main, parse_config, run_validation
from twophoton.entanglement import analytic_concurrence_n2


def write(tmp_path, text, name="run.cfg"):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.reader(fh))
    return rows[0], np.array(rows[1:], dtype=float)


RABI = f"""
# single-site Rabi flop
n = 2
xi = 0
initial = 0,photonic,1,0
dt = {math.pi / 2!r}
t_max = {math.pi / 2!r}
observables = probabilities
"""


def test_evolve_rabi_flop(tmp_path):
    out = tmp_path / "rabi.csv"
    assert main(["evolve", "--config", str(write(tmp_path, RABI)), "--out", str(out)]) == 0
    header, data = read_csv(out)
    assert header == ["t", "ReC_0", "ImC_0", "ReA_0", "ImA_0", "ReC_1", "ImC_1", "ReA_1", "ImA_1", "P_c", "P_a"]
    assert len(data) == 2
    last = dict(zip(header, data[-1]))
    assert last["ReA_0"] == pytest.approx(-1, abs=1e-12)
    for key in ("ReC_0", "ImC_0", "ReC_1", "ImC_1"):
        assert abs(last[key]) < 1e-12


def test_evolve_concurrence_column(tmp_path):
    cfg = """
n = 2
xi = 0.5
initial = 0,photonic,0.70710678118654752,0
initial = 1,photonic,0.70710678118654752,0
t_max = 5
dt = 0.05
observables = populations probabilities concurrence:0,1
"""
    out = tmp_path / "c.csv"
    assert main(["evolve", "--config", str(write(tmp_path, cfg)), "--out", str(out)]) == 0
    header, data = read_csv(out)
    assert header[-1] == "concurrence_0_1" and "popA_1" in header
    t = data[:, 0]
    np.testing.assert_allclose(data[:, -1], np.sin(t * math.sqrt(1.25)) ** 2 / 1.25, atol=1e-10)
    np.testing.assert_allclose(data[:, -1], analytic_concurrence_n2(0.5, t), atol=1e-10)
    pops = data[:, [header.index(f"pop{k}_{i}") for i in (0, 1) for k in "CA"]]
    np.testing.assert_allclose(pops.sum(axis=1), 1, atol=1e-9)


def test_evolve_deterministic_bytes(tmp_path):
    cfg = write(tmp_path, "n = 3\nxi = -0.7\ntan_theta0 = 1.3\ninitial = 1,atomic,0.6,0\ninitial = 2,photonic,0,0.8\n"
                          "t_max = 3\ndt = 0.1\nobservables = probabilities concurrence:0,2\n")
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    assert main(["evolve", "--config", str(cfg), "--out", str(a)]) == 0
    assert main(["evolve", "--config", str(cfg), "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()
    assert b"\r" not in a.read_bytes()


def test_evolve_number_format(tmp_path):
    out = tmp_path / "r.csv"
    main(["evolve", "--config", str(write(tmp_path, RABI)), "--out", str(out)])
    _, data = read_csv(out)
    line = out.read_text().splitlines()[2]
    # 17 significant digits round-trip
    assert float(line.split(",")[0]) == math.pi / 2


def test_evolve_output_key_and_stdout(tmp_path, capsys):
    out = tmp_path / "from_cfg.csv"
    assert main(["evolve", "--config", str(write(tmp_path, RABI + f"output = {out}\n"))]) == 0
    assert out.exists()
    assert main(["evolve", "--config", str(write(tmp_path, RABI, "b.cfg"))]) == 0
    assert capsys.readouterr().out.startswith("t,ReC_0")


def test_evolve_approximation_mode_labels_norm(tmp_path):
    cfg = "n = 2\nxi = 0.01\ninitial = 0,atomic,1,0\nt_max = 1\ndt = 0.5\nmode = small-hopping\n"
    out = tmp_path / "s.csv"
    assert main(["evolve", "--config", str(write(tmp_path, cfg)), "--out", str(out)]) == 0
    header, _ = read_csv(out)
    assert header[-1] == "norm"


def test_initial_state_normalization(tmp_path, caplog):
    slightly_off = parse_config("n = 1\nxi = 0\ninitial = 0,photonic,1.0001,0\n")
    psi = slightly_off.initial_state()
    assert abs(np.linalg.norm(psi) - 1) < 1e-15
    assert "renormalized" in caplog.text
    with pytest.raises(ConfigError):
        parse_config("n = 1\nxi = 0\ninitial = 0,photonic,1.1,0\n").initial_state()


@pytest.mark.parametrize("text", [
    "xi = 0\ninitial = 0,photonic,1,0\n",
    "n = 2\nxi = 0\n",
    "n = 2\nxi = 0\ninitial = 0,photon,1,0\n",
    "n = 2\nxi = 0\nbogus = 1\ninitial = 0,photonic,1,0\n",
    "n = 2\nxi = 0\ninitial = 0,photonic,1,0\ndt = -1\n",
    "n = 0\nxi = 0\ninitial = 0,photonic,1,0\n",
    "n = 2\nxi = 0\ninitial = 0,photonic,1,0\nmode = magic\n",
    "n = 2\nxi\n",
])
def test_invalid_configs_exit_2(tmp_path, text, capsys):
    assert main(["evolve", "--config", str(write(tmp_path, text))]) == 2
    assert "error" in capsys.readouterr().err


def test_bad_site_and_paths(tmp_path):
    cfg = write(tmp_path, "n = 2\nxi = 0\ninitial = 5,photonic,1,0\n")
    assert main(["evolve", "--config", str(cfg)]) == 2
    assert main(["evolve", "--config", str(tmp_path / "missing.cfg")]) == 2
    good = write(tmp_path, RABI, "good.cfg")
    assert main(["evolve", "--config", str(good), "--out", str(tmp_path / "no" / "dir" / "x.csv")]) == 2


def test_fig1(tmp_path, capsys):
    assert main(["fig1", "--out-dir", str(tmp_path)]) == 0
    peaks = {0.1: 0.990099, 0.5: 0.8, 0.9: 0.552486, 2.0: 0.2}
    for xi, peak in peaks.items():
        header, data = read_csv(tmp_path / f"fig1_xi_{xi:g}.csv")
        assert header == ["t", "concurrence_0_1"]
        t, c = data[:, 0], data[:, 1]
        assert t[0] == 0 and t[-1] == pytest.approx(10.0) and np.all(np.diff(t) > 0)
        np.testing.assert_allclose(c, analytic_concurrence_n2(xi, t), atol=1e-10)
        assert c.max() == pytest.approx(1 / (1 + xi**2), abs=1e-6)
        assert c.max() == pytest.approx(peak, abs=1e-6)
        # zeros at k pi / sqrt(1 + xi^2), within the 0.01 grid
        w = math.sqrt(1 + xi**2)
        for k in range(1, int(10 * w / math.pi) + 1):
            near = np.abs(t - k * math.pi / w) <= 0.005 + 1e-12
            assert c[near].min() < (0.01 * w) ** 2
    _, data = read_csv(tmp_path / "fig1_xi_0.1.csv")
    c = data[:, 1]
    k = next(k for k in range(1, len(c) - 1) if c[k - 1] < c[k] >= c[k + 1])
    first_peak = data[k, 0]
    assert first_peak == pytest.approx(math.pi / (2 * math.sqrt(1.01)), abs=1e-6)


def test_validate_default_passes(capsys):
    assert main(["validate"]) == 0
    out = capsys.readouterr().out
    assert "validation passed" in out
    worst = float(out.split("dynamics vs dense (100 cases): worst deviation ")[1].split()[0])
    assert worst < 1e-10


def test_validate_injected_fault_fails(capsys):
    assert main(["validate", "--inject-fault"]) == 1
    assert "FAILED" in capsys.readouterr().out


def test_validate_single_cavity():
    assert main(["validate", "--n-max", "1"]) == 0
    assert run_validation(n_max=1, seed=3, cases=100, out=lambda *_: None)


def test_transfer_commands(capsys):
    assert main(["transfer", "--scenario", "n2-photon-transfer", "--xi", "50", "--k", "0"]) == 0
    out = capsys.readouterr().out
    assert f"T={math.pi / 200:.12g}" in out
    assert float(out.split("=")[-1]) >= 0.99

    assert main(["transfer", "--scenario", "n3-photon-transfer", "--xi", "20", "--k", "0"]) == 0
    lines = [ln for ln in capsys.readouterr().out.splitlines() if "photon-transfer" in ln and "T=" in ln]
    assert len(lines) == 2
    for ln in lines:
        assert float(ln.split("=")[-1]) == pytest.approx(4 / 9, abs=0.01)

    assert main(["transfer", "--scenario", "n3-excitation-transfer", "--k", "40", "--l", "0"]) == 0
    out = capsys.readouterr().out
    assert "xi=0.0083333333333333332" in out
    for ln in (ln for ln in out.splitlines() if "T=" in ln):
        assert float(ln.split("=")[-1]) == pytest.approx(4 / 9, abs=0.02)


def test_transfer_usage_errors(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["transfer", "--scenario", "warp-drive", "--xi", "1"])
    assert exc.value.code == 2
    assert main(["transfer", "--scenario", "n2-photon-transfer"]) == 2
    assert main(["transfer", "--scenario", "n3-excitation-transfer"]) == 2
