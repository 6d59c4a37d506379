#!/usr/bin/env python3
"""Smoke test for the igmrf_py extension module.

Build the extension first:

    cargo build --release -p igmrf-py --features extension-module

then run this script from the repository root:

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path


def load_module():
    root = Path(__file__).resolve().parent.parent
    candidates = [
        root / "target" / "release" / "libigmrf_py.so",
        root / "target" / "debug" / "libigmrf_py.so",
        root / "target" / "release" / "libigmrf_py.dylib",
        root / "target" / "debug" / "libigmrf_py.dylib",
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit(
            "extension not found; run "
            "`cargo build --release -p igmrf-py --features extension-module` first"
        )
    staging = Path(tempfile.mkdtemp(prefix="igmrf_py_"))
    target = staging / ("igmrf_py" + built.suffix.replace(".dylib", ".so"))
    shutil.copy2(built, target)
    sys.path.insert(0, str(staging))
    import igmrf_py

    return igmrf_py


def approx(value, expected, tol, label):
    if math.isnan(value) or abs(value - expected) > tol:
        sys.exit(f"FAIL {label}: {value} vs {expected} (tol {tol})")
    print(f"ok   {label}: {value:.5f} ~ {expected}")


def main():
    igmrf = load_module()

    approx(igmrf.sigma_ref("rw1", 100), 3.89, 0.01, "sigma_ref rw1 n=100")
    approx(igmrf.sigma_ref("rw2", 40), 10.486, 0.005, "sigma_ref rw2 n=40")
    approx(igmrf.sigma_ref("bound1", 11), 0.83, 0.01, "sigma_ref bound1 11x11")
    approx(igmrf.sigma_ref("rw2d", 11), 0.83, 0.01, "rw2d alias")
    approx(igmrf.gaussian_quantile(0.001, 7.0), 3.9098, 2e-4, "gaussian quantile")

    model = igmrf.Model("bound1", 11)
    summary = model.summary()
    approx(summary["sigma_ref"], 0.83, 0.01, "Model.summary sigma_ref")
    assert summary["null_dim_used"] == 3
    assert summary["numeric_null_dim"] == 1
    assert summary["warning"] is not None
    assert len(summary["sigma_at_unit_lambda"]) == 121
    print("ok   rank diagnostics surface the nominal/numeric mismatch")

    report = igmrf.scaling_pipeline(2.0, 7.0, 0.001, [("rw2", 10.486), ("rw2d", 2.91)])
    approx(report["aggregated_U"], 4.79, 0.01, "aggregated U")
    approx(report["models"][0]["U"], 7.5, 0.01, "U rw2")
    approx(report["models"][1]["U"], 2.08, 0.01, "U rw2d")
    approx(report["models"][0]["b_new"], 0.81, 0.01, "b_new rw2")
    approx(report["models"][1]["b_new"], 10.59, 0.01, "b_new rw2d")

    rw1 = igmrf.Model("rw1", 11)
    draws_a = rw1.sample(precision=1.0, count=3, seed=7)
    draws_b = rw1.sample(precision=1.0, count=3, seed=7)
    assert draws_a == draws_b, "sampling must be deterministic for a fixed seed"
    assert len(draws_a) == 3 and len(draws_a[0]) == 11
    print("ok   seeded sampling is deterministic")

    stencil = """
    {
        "schema_version": 1,
        "name": "rw1-replica",
        "topology": "bounded",
        "null_dim": 1,
        "templates": [
            {
                "region": "all",
                "boundary": "skip",
                "order": 1,
                "offsets": [[0, 0, -1.0], [1, 0, 1.0]]
            }
        ]
    }
    """
    custom = igmrf.Model.from_stencil_json(stencil, 11)
    builtin = igmrf.Model("rw1", 11)
    assert custom.structure_entries() == builtin.structure_entries()
    approx(custom.sigma_ref(), builtin.sigma_ref(), 1e-12, "custom stencil replica")

    check = igmrf.Model("rw2", 9).verify_montecarlo(precision=1.0, count=20000, tol=0.05, seed=5)
    assert check["pass"], f"Monte Carlo verification failed: {check}"
    print("ok   Monte Carlo verification passes")

    approx(igmrf.subdivision_precision(1.0, 2, "rw2"), 8.0, 0.0, "subdivision law rw2")
    approx(igmrf.transfer_sd_parameter(1.0, 2.0, 2.0), 1.0, 0.0, "identity transfer")

    print("smoke test passed")


if __name__ == "__main__":
    main()
