"""Smoke test for the zonopolar_py extension.

Uses an installed module if there is one (`maturin develop -m
crates/python/Cargo.toml`). Otherwise builds the cdylib with cargo and
imports it from a scratch directory.
"""

import importlib
import json
import math
import pathlib
import shutil
import subprocess
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load():
    try:
        return importlib.import_module("zonopolar_py")
    except ImportError:
        pass
    subprocess.run(
        ["cargo", "build", "--release", "-p", "zonopolar-py", "--features", "extension-module"],
        cwd=ROOT,
        check=True,
    )
    lib = ROOT / "target" / "release" / "libzonopolar_py.so"
    scratch = pathlib.Path(tempfile.mkdtemp())
    shutil.copy(lib, scratch / "zonopolar_py.so")
    sys.path.insert(0, str(scratch))
    return importlib.import_module("zonopolar_py")


def close(a, b, tol):
    assert abs(a - b) <= tol, f"{a} vs {b}"


def main():
    z = load()

    close(z.barrel_norm(1.0, math.pi / 2), 0.5, 1e-15)
    close(z.barrel_support(1.0, math.pi / 2), 2.0, 1e-15)
    close(z.polar_radial(0.7, 0.3) * z.barrel_support(0.7, 0.3), 1.0, 1e-14)
    close(z.gauge(1.0, [0.0, 0.0, 1.0]), 1.0, 1e-15)
    close(z.breakpoint_x(1.0), 1 / math.sqrt(2), 1e-15)
    close(z.jump_constant(1.0), 4.0, 1e-15)
    close(z.atom_weight(1.0), 1 / (4 * math.pi), 1e-15)
    assert z.is_polar_zonoid(0.9) and not z.is_polar_zonoid(1.1)

    d = json.loads(z.generating_distribution(1.0))
    assert len(d["atoms"]) == 1
    close(d["atoms"][0]["x"], 1 / math.sqrt(2), 1e-15)

    # the transform of the generating measure gives the norm back
    text = z.generating_distribution(0.6)
    for phi in (0.2, 0.9, 1.4):
        close(z.cosine_transform(text, math.cos(phi)), z.barrel_norm(0.6, phi, 4), 1e-9)

    assert json.loads(z.certify(0.8, lat_grid=80, t_grid=160))["verdict"] == "positive"
    close(z.sweep(0.5, 1.5, 1e-6), 1.0, 1e-6)
    assert all(passed for _, passed, _, _ in z.verify("remark1"))

    try:
        z.barrel_norm(-1.0, 0.1)
    except ValueError:
        pass
    else:
        raise AssertionError("negative radius accepted")
    try:
        z.sweep(1.1, 1.5)
    except ArithmeticError:
        pass
    else:
        raise AssertionError("sweep without a bracket succeeded")

    print(f"zonopolar_py {z.__version__}: ok")


if __name__ == "__main__":
    main()
