#!/usr/bin/env python3
"""Smoke test for the nlw_py extension module.

Build the extension first, then run this script from anywhere:

    cargo build --release -p nlw-py
    python3 python/smoke_test.py

The script locates the cdylib in target/release, exposes it as an importable
module, and exercises the main surface: grid construction, initial data,
evolution, the exact free-wave propagator, energy functionals, and the
experiment runner.
"""

import importlib.util
import json
import math
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / "release" / "libnlw_py.so",
        ROOT / "target" / "release" / "nlw_py.so",
        ROOT / "target" / "debug" / "libnlw_py.so",
    ]
    for path in candidates:
        if path.exists():
            spec = importlib.util.spec_from_file_location("nlw_py", path)
            module = importlib.util.module_from_spec(spec)
            spec.loader.exec_module(module)
            return module
    sys.exit(
        "nlw_py cdylib not found; run `cargo build --release -p nlw-py` first"
    )


nlw = load_module()
checks = 0


def check(label, ok):
    global checks
    checks += 1
    if not ok:
        sys.exit(f"FAILED: {label}")
    print(f"  ok: {label}")


print("constants")
check("2* = 6 in dimension 3", nlw.two_star(3) == 6.0)
check("stability limit below 0.9", 0.8 < nlw.max_cfl(3) < 0.9)

print("grid and quadrature")
grid = nlw.Grid(3, 0.02, 30.0)
check("node count", len(grid) == 1501)
check("radii endpoints", grid.radii()[0] == 0.0 and grid.radii()[-1] == 30.0)
# integral of 1 over B_2 = 4/3 pi 2^3
ones = [1.0] * len(grid)
vol = grid.integrate_ball(ones, 2.0)
check("ball volume quadrature", abs(vol / (4.0 / 3.0 * math.pi * 8.0) - 1.0) < 1e-4)

print("initial data and energy")
data = nlw.Data.compact(grid, 0.5, 2.0)
e0 = data.energy(grid, 0.0)
check("positive energy", e0 > 0.0)
e_split = nlw.energy(grid, data.state(), 0.0)
check("energy split totals", abs(e_split["total"] - e0) < 1e-12 * e0)
check("zero kinetic for displacement data", e_split["kinetic"] == 0.0)

print("free evolution against the exact propagator")
run = nlw.evolve(grid, data, 0.0, 8.0, cfl=0.5, sample_stride=400)
check("no blow-up", run.blowup_time is None)
check("samples recorded", len(run.samples) >= 2)
exact = nlw.free_state(grid, data, 8.0)
err = max(
    abs(a - b) for a, b in zip(run.final_state.u, exact.u)
)
# O(dr^2) dispersion envelope at dr = 0.02 over t = 8
check(f"solver matches d'Alembert oracle (sup err {err:.2e})", err < 1e-2)
# drift is measured against the first observed state, which carries the
# integrator's half-kick stamp; the conserved discrete invariant lives there
e_ref = nlw.energy(grid, run.samples[0], 0.0)["total"]
e_final = nlw.energy(grid, run.final_state, 0.0)
drift = abs(e_final["total"] - e_ref) / e0
check(f"energy drift {drift:.2e}", drift < 1e-10)

print("nonlinear evolution")
run_nl = nlw.evolve(grid, data, 1.0, 8.0, cfl=0.5, sample_stride=400)
e_nl = nlw.energy(grid, run_nl.final_state, 1.0)
e_nl_ref = nlw.energy(grid, run_nl.samples[0], 1.0)["total"]
drift_nl = abs(e_nl["total"] - e_nl_ref) / e0
check(f"defocusing energy drift {drift_nl:.2e}", drift_nl < 1e-3)
check("dispersion shrinks the critical norm",
      nlw.l2star_norm(grid, run_nl.final_state)
      < nlw.l2star_norm(grid, data.state()))

print("focusing blow-up above the ground-state threshold")
big = nlw.Data.ground_state(grid, 2.0)
run_bu = nlw.evolve(grid, big, -1.0, 20.0, cfl=0.5)
check("supercritical data blows up", run_bu.blowup_time is not None)

print("experiment registry")
names = nlw.list_experiments()
check("registry has 11 experiments", len(names) == 11)
check("hash is stable", nlw.config_hash(["lambda = 1"]) == nlw.config_hash(["lambda = 1"]))
check("hash ignores out_dir",
      nlw.config_hash(["out_dir = a"]) == nlw.config_hash(["out_dir = b"]))
check("config text round-trips the override",
      "lambda = 1" in nlw.config_text(["lambda = 1"]))

report = json.loads(nlw.run_experiment("l2star_decay"))
check("report schema", report["schema_version"] == 1)
check("verdicts all pass", all(v["passed"] for v in report["verdicts"]))

print(f"\nall {checks} checks passed")
