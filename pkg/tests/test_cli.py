import json
import subprocess
import sys

import pytest

from kacbps.cli import main


def run(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


def test_kac_both(capsys):
    code, out, _ = run(capsys, "kac", "--quiver", "kronecker", "--dim", "1,1", "--method", "both")
    assert code == 0
    assert out.strip().splitlines()[-1] == "q+1"


def test_kac_json(capsys):
    code, out, _ = run(capsys, "kac", "--quiver", "kronecker", "--dim", "1,1", "--format", "json")
    data = json.loads(out)
    assert code == 0
    assert data["rendered"] == "q+1"
    assert data["characters"] == [[[1, 1], [[0, 1, 1], [2, 1, 1]]]]


def test_kac_csv(capsys):
    _, out, _ = run(capsys, "kac", "--quiver", "kronecker", "--dim", "1,1", "--format", "csv")
    lines = out.strip().splitlines()
    assert lines[:2] == ["# convention: t", "d,doubled_exponent,value"]
    assert lines[2:] == ['"1,1",0,1', '"1,1",2,1']


def test_vanishing(capsys):
    _, out, _ = run(capsys, "kac", "--quiver", "a2", "--dim", "2,1")
    assert out.strip().splitlines()[-1] == "0"


def test_bps_inverted(capsys):
    _, out, _ = run(capsys, "char", "--quiver", "kronecker", "--box", "2,2")
    assert "convention: t^{-1}" in out
    assert "(1,1)  q^(-1)+1" in out


def test_negative_window(capsys):
    code, out, _ = run(capsys, "char", "--quiver", "jordan", "--which", "coha", "--box", "1", "--window", "-2,4")
    assert code == 0
    assert "(1)  q^(-1)+1+q+q^(2)" in out


def test_zeroth(capsys):
    _, out, _ = run(capsys, "char", "--quiver", "jordan", "--which", "zeroth", "--box", "2")
    assert "(0)  1" in out


def test_nilpotent(capsys):
    _, out, _ = run(capsys, "nilpotent-kac", "--quiver", "jordan", "--dim", "2", "--class", "n")
    assert out.strip().splitlines()[-1] == "1"


def test_km_mult_both(capsys):
    code, out, _ = run(capsys, "km-mult", "--quiver", "kronecker", "--box", "2,2", "--method", "both")
    assert code == 0
    assert "(2,2)  1" in out


def test_bozec(capsys):
    _, out, _ = run(capsys, "bozec-dims", "--quiver", "two_loop", "--box", "3")
    assert out.strip().splitlines()[1:] == ["(1)  1", "(2)  1", "(3)  2"]


def test_extract_json(capsys):
    _, out, _ = run(capsys, "extract", "--quiver", "a2", "--box", "1,1", "--format", "json")
    data = json.loads(out)
    assert [e["d"] for e in data["extraction"]] == [[0, 1], [1, 0]]


def test_nakajima(capsys):
    _, out, _ = run(capsys, "nakajima-dim", "--quiver", "jordan", "--dim", "1", "--framing", "1")
    assert out.strip() == "2"


def test_verify_lie(capsys):
    code, out, _ = run(capsys, "verify", "--suite", "lie")
    assert code == 0
    assert "FAIL" not in out


@pytest.mark.parametrize("args", [
    ["kac", "--quiver", "kronecker", "--dim", "0,0"],
    ["kac", "--quiver", "jordan", "--dim", "1,1"],
    ["kac", "--quiver", "nosuch", "--dim", "1"],
    ["kac", "--quiver", "jordan", "--dim", "1", "--primes", "2,4"],
    ["char", "--quiver", "jordan", "--which", "coha", "--box", "1", "--window", "2,6"],
])
def test_precondition_exit(capsys, args):
    code, out, err = run(capsys, *args)
    assert code == 2
    assert out == ""
    assert json.loads(err)["exit_code"] == 2


def test_resource_exit(capsys):
    code, _, err = run(capsys, "kac", "--quiver", "two_loop", "--dim", "3", "--method", "brute", "--cap", "10")
    assert code == 3
    assert json.loads(err)["exit_code"] == 3


def test_usage_exit(capsys):
    with pytest.raises(SystemExit) as info:
        main(["kac", "--format", "xml"])
    assert info.value.code == 2


def test_corrupted_cache(tmp_path, capsys):
    path = tmp_path / "cache.json"
    path.write_text("{not json")
    with pytest.warns(RuntimeWarning):
        code, out, _ = run(capsys, "kac", "--quiver", "kronecker", "--dim", "1,1", "--cache", str(path))
    assert code == 0
    assert out.strip().splitlines()[-1] == "q+1"
    assert json.loads(path.read_text())["format"] == 1


def test_cache_reused(tmp_path, capsys):
    path = tmp_path / "cache.json"
    first = run(capsys, "kac", "--quiver", "kronecker", "--dim", "2,2", "--cache", str(path))
    second = run(capsys, "kac", "--quiver", "kronecker", "--dim", "2,2", "--cache", str(path))
    assert first == second


def test_jobs_byte_identical(capsys):
    base = ["kac", "--quiver", "a2_loop", "--dim", "1,2", "--method", "brute", "--primes", "2,3,5"]
    one = run(capsys, *base, "--jobs", "1")
    four = run(capsys, *base, "--jobs", "4")
    assert one == four


def test_console_entry():
    proc = subprocess.run([sys.executable, "-m", "kacbps.cli", "kac", "--quiver", "jordan", "--dim", "2"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert proc.stdout.strip().splitlines()[-1] == "q"


def test_extract_nilpotent_class(capsys):
    code, out, _ = run(capsys, "extract", "--quiver", "jordan", "--box", "3", "--class", "ssn")
    assert code == 0
    assert "convention: t\n" in out
    assert out.count("isotropic-line") == 3
