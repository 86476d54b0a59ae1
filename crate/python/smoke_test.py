"""Smoke test for the pyadnoise extension.

Build the module first, either with maturin:

    pip install maturin && maturin develop -m crates/py/Cargo.toml --release

or by hand:

    cargo build -p adnoise-py --release --features extension-module
    cp target/release/libpyadnoise.so python/pyadnoise.so
"""

import math
import os
import sys
import tempfile

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pyadnoise as ad  # noqa: E402


def check(label, ok):
    print(f"{'ok  ' if ok else 'FAIL'} {label}")
    if not ok:
        sys.exit(1)


def main():
    print(f"pyadnoise {ad.__version__}")
    check("presets exposed", "Ne-Au" in ad.PRESETS)

    m = ad.Model("Ne-Au")
    print(m)
    nu_thz = m.nu10 / (2 * math.pi) / 1e12
    check(f"nu10/2pi = {nu_thz:.4f} THz", 0.2 < nu_thz < 0.45)
    check("energies ascending", all(a < b for a, b in zip(m.energies, m.energies[1:])))
    check("dipoles decrease", all(a > b for a, b in zip(m.dipoles, m.dipoles[1:])))

    t = 2.0 * m.hnu_kelvin
    p = m.stationary(t)
    e0 = m.energies[0]
    w = [math.exp(-(e - e0) / (ad.KB * t)) for e in m.energies]
    z = sum(w)
    check("stationary state is Boltzmann", max(abs(a / (b / z) - 1) for a, b in zip(p, w)) < 1e-10)

    modes = m.modes(t)
    var = m.dipole_variance(t)
    check("mode weights sum to the variance", abs(sum(wt for _, wt in modes) / var - 1) < 1e-8)
    s = m.spectrum(t, [0.0, m.gamma0, 100 * m.gamma0])
    check("spectrum falls with frequency", s[0] > s[1] > s[2] > 0)

    check("2 eV in K", abs(ad.convert_energy(2.0, "eV", "K") - 23209) < 1)
    se = ad.field_noise(1e18, 1e-9 * ad.DEBYE**2, 10e-6)
    rate = ad.heating_rate(se, 2 * math.pi * 1e6, 40 * ad.AMU)
    check(f"heating rate {rate:.3e} /s is positive", rate > 0)

    exp, err, rows = ad.mc_distance_scaling(100, 100e-6, 1e-6, [3e-6 * k for k in range(1, 4)], 200)
    check(f"MC exponent {exp:.3f} +- {err:.3f}", abs(exp + 4) < 0.3 and len(rows) == 3)

    try:
        ad.Model("Xe-Pt")
    except ValueError as e:
        check(f"unknown preset rejected: {e}", True)
    else:
        check("unknown preset rejected", False)

    with tempfile.TemporaryDirectory() as out:
        paths = ad.run("dipoles", out, preset="Ne-Au")
        check("run() writes dipoles.csv", paths and paths[0].endswith("dipoles.csv"))
        with open(paths[0]) as f:
            check("header comment present", f.readline().startswith("# adnoise"))

    print("smoke test passed")


if __name__ == "__main__":
    main()
