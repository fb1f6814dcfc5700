#!/usr/bin/env python3
"""Smoke test for the sepprob Python extension module.

Builds the cdylib if needed, copies it next to this script as sepprob.so,
imports it, and exercises the main surfaces: exact formulas, separability
functions, PPT testing on hand-built states, sampling, and the exact
verification battery.

Run from the repository root:  python3 python/smoke_test.py
"""

import json
import math
import pathlib
import shutil
import subprocess
import sys

HERE = pathlib.Path(__file__).resolve().parent
ROOT = HERE.parent


def ensure_module():
    so = HERE / "sepprob.so"
    built = ROOT / "target" / "release" / "libsepprob.so"
    if not built.exists():
        print("building sepprob-py (cargo build --release -p sepprob-py) ...")
        subprocess.run(
            ["cargo", "build", "--release", "-p", "sepprob-py"],
            cwd=ROOT,
            check=True,
        )
    if not so.exists() or built.stat().st_mtime > so.stat().st_mtime:
        shutil.copy2(built, so)
    sys.path.insert(0, str(HERE))


def close(a, b, tol):
    assert abs(a - b) < tol, f"{a} vs {b} (tol {tol})"


def main():
    ensure_module()
    import sepprob

    # exact formulas come back as "p/q" strings
    assert sepprob.prob_dunkl_exact(2) == "8/33"
    assert sepprob.prob_dunkl_exact(4) == "26/323"
    assert sepprob.prob_dunkl_exact(8) == "44482/4091349"
    assert sepprob.denominator_exact(1) == "16/35"

    # the four numeric routes agree on 8/33
    close(sepprob.prob_concise(1), 8 / 33, 1e-12)
    close(sepprob.prob_induced_6f5(2), 8 / 33, 1e-6)
    close(sepprob.prob_via_t_integral(2), 8 / 33, 1e-8)
    rep = sepprob.prob_all(2, 1e-8)
    assert rep["value_dunkl"] == "8/33"
    assert rep["max_pairwise_dev"] < 1e-6

    # separability functions
    assert sepprob.chi_coeffs(2) == ["4/3", "-1/3"]
    close(sepprob.chi(2, 0.5), (1 / 3) * 0.25 * (4 - 0.25), 1e-12)
    close(sepprob.chi1(1.0), 1.0, 1e-12)
    assert 0.0 < sepprob.chi(3, 0.5) < 1.0

    # PPT on hand-built states: maximally mixed is separable, the Bell
    # projector is not
    mixed = sepprob.DensityMatrix([[0.25 if i == j else 0.0 for j in range(4)] for i in range(4)])
    assert mixed.is_ppt()
    bell = [[0.0] * 4 for _ in range(4)]
    bell[0][0] = bell[0][3] = bell[3][0] = bell[3][3] = 0.5
    bell = sepprob.DensityMatrix(bell)
    assert not bell.is_ppt()
    assert bell.negative_eigenvalue_count() == 1

    # sampling: reproducible, near 8/33
    r1 = sepprob.sample_experiment("qubit4", 200_000, seed=7, workers=2)
    r2 = sepprob.sample_experiment("qubit4", 200_000, seed=7, workers=2)
    assert r1 == r2, "same config must reproduce identically"
    close(r1["p_hat"], 8 / 33, 4 * r1["stderr"])

    # sigma/mu ratios on a sampled state
    rho = sepprob.sample_density_matrix("complex", 4, seed=3)
    eps, eps2 = rho.sigma_ratio()
    assert 0 < eps <= 1 and eps2 is None
    assert rho.mu_ratio() > 0

    # exact verification battery is green
    battery = sepprob.run_battery("exact")
    assert battery["failed"] == 0, json.dumps(
        [c for c in battery["checks"] if not c["pass"]], indent=2
    )

    print("smoke test passed:", len(battery["checks"]), "exact checks green,",
          f"qubit4 p_hat = {r1['p_hat']:.6f} (8/33 = {8/33:.6f})")


if __name__ == "__main__":
    main()
