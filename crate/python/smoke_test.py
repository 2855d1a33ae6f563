#!/usr/bin/env python3
"""Smoke test for the plateau_py extension module.

Build the module first:

    cargo build --release -p plateau-py --features extension-module

then run this script from the repository root:

    python3 python/smoke_test.py
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        ROOT / "target" / "release" / "libplateau_py.so",
        ROOT / "target" / "debug" / "libplateau_py.so",
        ROOT / "target" / "release" / "libplateau_py.dylib",
        ROOT / "target" / "debug" / "libplateau_py.dylib",
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit(
            "extension library not found; run "
            "`cargo build --release -p plateau-py --features extension-module` first"
        )
    tmp = Path(tempfile.mkdtemp(prefix="plateau_py_"))
    suffix = ".so" if lib.suffix == ".so" else ".so"
    shutil.copy2(lib, tmp / f"plateau_py{suffix}")
    sys.path.insert(0, str(tmp))
    import plateau_py

    return plateau_py


def approx(a, b, tol=1e-9):
    assert abs(a - b) <= tol, f"{a} != {b} (tol {tol})"


def main():
    m = load_module()

    # circle roots of k^3 - k + 1 (sigma = alpha = beta = 1): one root
    roots = m.circle_roots(1.0, 1.0, 1.0)
    assert len(roots) == 1
    approx(roots[0][0], -1.3247179572447898, 1e-10)

    # three-root case
    roots = m.circle_roots(1.0, 1.0, 3.0)
    assert len(roots) == 3

    # first integral at the (1,1,0) circle root: 1/4 - 1 = -3/4
    approx(m.first_integral_d(1.0, 1.0, 0.0, -1.0, 0.0), -0.75, 1e-14)

    # conservation along an oscillating solution
    sol = m.elastica_integrate(1.0, 1.0, 3.0, 0.9, 0.0, length=50.0)
    assert sol["d_drift"] <= 1e-9 * max(1.0, abs(sol["d"]))
    assert sol["period"] is not None

    # circle branch of the ring shoot closes instantly
    ring = m.buckled_ring(1.0, 1.0, 1.0, 1, -1.3247179572447898)
    assert ring["iterations"] == 0
    assert ring["closure"] <= 1e-6

    # helicoid helix data is a fixed point of the boundary system
    traj = m.boundary_integrate(0.875, 1.0, 1.0, 1.0, 0.5, 0.0, -0.5, length=20.0)
    approx(traj["c"], -2.0, 1e-12)
    assert traj["c_drift"] <= 1e-12
    assert traj["branch"] == "Generic"
    assert max(abs(k - 0.5) for k in traj["kg"]) <= 1e-12

    # alpha = 0 closed form
    disk = m.alpha_zero_disk(1.0, 1.0, -2.0)
    approx(disk["radius"], 2.0, 1e-14)
    assert disk["valid"]
    assert not m.alpha_zero_disk(1.0, 1.0, 1.0)["valid"]

    # single-boundary fit: sigma = alpha/8 + beta/2 + eta/4 = 7/8
    fit = m.fit_helicoid(1.0, 1.0, 1.0, 1.0, eta=1.0)
    approx(fit["sigma"], 0.875, 1e-14)
    assert fit["valid"]

    # two-boundary fit: eta = -157/210, sigma = -13/210, invalid
    fit = m.fit_helicoid(1.0, 1.0, 1.0, 0.0, r1=2.0)
    approx(fit["eta"], -157.0 / 210.0, 1e-12)
    approx(fit["sigma"], -13.0 / 210.0, 1e-12)
    assert not fit["valid"]

    # torsion flux is -2 pi a on both rims
    for a in (0.5, 1.0, 2.0):
        flux = m.helicoid_flux(a, 1.0, 2.0)
        approx(flux["inner"], -2.0 * math.pi * a, 1e-8)
        approx(flux["outer"], -2.0 * math.pi * a, 1e-8)
        assert flux["difference"] <= 1e-10

    # flat unit disk energy: sigma area + bending = pi + 2 pi
    e = m.energy_disk(1.0, 1.0, 1.0, 1.0, 0.0)
    approx(e["total"], 3.0 * math.pi, 1e-8)

    # one showcase surface builds and audits clean
    audit = m.bjorling_showcase(1, ns=200, nt=25)
    assert audit["interior_mean_curvature"] <= 1e-5
    assert audit["core_normal_curvature"] <= 1e-8
    assert audit["curve_containment"] <= 1e-10
    assert audit["vertices"] > 0

    print("plateau_py smoke test: all checks passed")


if __name__ == "__main__":
    main()
