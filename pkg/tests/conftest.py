import numpy as np
import pytest

from hedgehog.constellation import Constellation
from hedgehog.spin import SpinLabel

HALF = SpinLabel(1)

TETRAHEDRON = np.array(
    [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
) / np.sqrt(3)

AXES4 = np.array([[0, 0, 1], [0, 0, -1], [1, 0, 0], [0, 1, 0]], dtype=float)


@pytest.fixture
def tetrahedron():
    return Constellation(HALF, TETRAHEDRON, label="tetrahedron")


@pytest.fixture
def axes4():
    return Constellation(HALF, AXES4, label="axes")


@pytest.fixture
def duplicate():
    v = AXES4.copy()
    v[1] = v[0]
    return Constellation(HALF, v, label="duplicate")


def random_unit(rng, count=None):
    v = rng.standard_normal((count or 1, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v if count else v[0]


def well_conditioned(s, seed, min_eigenvalue=1e-6, max_condition=np.inf):
    """First random constellation from a seeded sequence meeting the bounds."""
    from hedgehog.constellation import random_constellation
    from hedgehog.gram import diagnostics, gram

    for k in range(10_000):
        m = random_constellation(s, [seed, k])
        d = diagnostics(gram(m))
        if d.min_eigenvalue > min_eigenvalue and d.condition_number <= max_condition:
            return m
    raise RuntimeError("no well-conditioned constellation found")


def write_constellation(path, s, vectors):
    from hedgehog.constellation import save_json

    save_json(Constellation(s, vectors), path)
    return str(path)


def run_every_command(workdir, capsys):
    """
    Run each CLI command once in ``workdir`` (including figures) and return
    {name: bytes} for every output file and the captured stdout.
    """
    from hedgehog.cli import run

    w = lambda name: str(workdir / name)  # noqa: E731
    write_constellation(workdir / "tet.json", HALF, TETRAHEDRON)
    dup = AXES4.copy()
    dup[1] = dup[0]
    write_constellation(workdir / "dup.json", HALF, dup)
    commands = [
        ["gen", "--spin", "3/2", "--kind", "random", "--seed", "4", "-o", w("gen.json"),
         "--csv", w("gen.csv"), "--plot", w("gen.png")],
        ["gen", "--spin", "1", "--kind", "regular", "-o", w("reg.json")],
        ["analyze", "-i", w("tet.json"), "-o", w("diag.json"), "--plot", w("spec.png")],
        ["reconstruct", "-i", w("gen.json"), "--seed", "2", "--samples", w("q.csv"), "-o", w("op.json")],
        ["reconstruct", "-i", w("q.csv"), "-o", w("op2.json")],
        ["repair", "-i", w("dup.json"), "-o", w("fixed.json"), "--epsilon", "1e-3",
         "--seed", "5", "--report", w("report.json")],
        ["flow", "-i", w("tet.json"), "--start", "0.6,0.5,0.3", "--steps", "200",
         "-o", w("traj.csv"), "--plot", w("traj.png")],
        ["sweep", "--spin", "1/2,1", "--trials", "20", "--seed", "1", "-o", w("sweep.csv"),
         "--plot", w("sweep.png")],
        ["sweep", "--spin", "1/2", "--trials", "5", "--seed", "1"],
    ]
    capsys.readouterr()
    codes = [run(argv) for argv in commands]
    assert codes == [0] * len(commands), codes
    out = {p.name: p.read_bytes() for p in sorted(workdir.iterdir())}
    out["<stdout>"] = capsys.readouterr().out.encode()
    return out


ACCEPTANCE_LINES = []


def record_criterion(number, title, ok, detail, seconds):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}: {detail} [{seconds:.2f} s]"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda x: int(x.split()[1])):
            terminalreporter.write_line(line)
