import subprocess
import sys

import pytest

from afem2d.cli import main
from afem2d.driver import CSV_COLUMNS, read_csv
from afem2d.mesh import write_mesh


def test_success_outputs(tmp_path, capsys):
    out = tmp_path / "run"
    rc = main(["--max-it", "5", "--h", "0.25", "--out", str(out), "--snapshots", "0", "4", "-q"])
    assert rc == 0
    names = sorted(p.name for p in out.iterdir())
    assert names == ["mesh_final.svg", "mesh_final.txt", "mesh_step00.svg", "mesh_step04.svg", "records.csv"]
    assert (out / "records.csv").read_text().splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(read_csv(out / "records.csv")) == 5
    assert "rates vs ndof" in capsys.readouterr().out


@pytest.mark.parametrize(
    "argv",
    [
        ["--theta", "1.5"],
        ["--degree", "4"],
        ["--max-it", "0"],
        ["--problem", "custom-file"],
        ["--bdstr", "x =="],
        ["--h", "0"],
        ["--h", "0.5", "0.5", "0.5"],
        ["--rect", "0", "0", "0", "1"],
        ["--unknown-flag"],
    ],
)
def test_errors_exit_one(tmp_path, argv):
    assert main(argv + ["--out", str(tmp_path / "o"), "-q"]) == 1


def test_missing_mesh_file(tmp_path):
    assert main(["--mesh", str(tmp_path / "nope.txt"), "--out", str(tmp_path / "o"), "-q"]) == 1


def test_partial_records_flushed_on_failure(tmp_path, monkeypatch):
    import afem2d.driver as driver

    real = driver.solve_poisson
    calls = []

    def flaky(*args):
        calls.append(1)
        if len(calls) == 3:
            raise RuntimeError("solver blew up")
        return real(*args)

    monkeypatch.setattr(driver, "solve_poisson", flaky)
    out = tmp_path / "o"
    assert main(["--h", "0.25", "--out", str(out), "--max-it", "5", "-q"]) == 1
    assert [r.step for r in read_csv(out / "records.csv")] == [0, 1]


def test_custom_file_mesh_and_options(tmp_path, two_triangle_mesh):
    mesh_path = write_mesh(two_triangle_mesh, tmp_path / "two_triangle.txt")
    prob = tmp_path / "p.json"
    prob.write_text('{"u": "x**2 - y**2"}')
    out = tmp_path / "o"
    argv = [
        "--mesh", str(mesh_path), "--problem", "custom-file", "--problem-file", str(prob),
        "--degree", "2", "--max-it", "3", "--theta", "1", "--boundary-jump", "off",
        "--quad-order", "4", "--out", str(out), "-q",
    ]
    assert main(argv) == 0
    recs = read_csv(out / "records.csv")
    assert [r.step for r in recs] == [0, 1, 2]
    assert all(r.errH1 < 1e-10 for r in recs)  # u is in P2


def test_bdstr_limits_dirichlet_part(tmp_path):
    # Dirichlet data only where x == 0; the other sides become natural boundaries
    argv = ["--problem", "polynomial", "--poly-degree", "1", "--h", "0.25", "--max-it", "1", "-q"]
    assert main(argv + ["--out", str(tmp_path / "a")]) == 0
    assert main(argv + ["--bdstr", "x==0", "--out", str(tmp_path / "b")]) == 0
    assert read_csv(tmp_path / "a" / "records.csv")[0].errH1 < 1e-10
    assert read_csv(tmp_path / "b" / "records.csv")[0].errH1 > 1e-3


def test_no_timings_is_reproducible(tmp_path):
    texts = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["--max-it", "4", "--h", "0.25", "--degree", "2", "--no-timings", "--out", str(out), "-q"]) == 0
        texts.append((out / "records.csv").read_bytes())
    assert texts[0] == texts[1]


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "afem2d", "--max-it", "1", "--out", str(tmp_path / "o"), "-q"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    proc = subprocess.run([sys.executable, "-m", "afem2d", "--theta", "-1"], capture_output=True, text=True)
    assert proc.returncode == 1
    assert "theta" in proc.stderr
