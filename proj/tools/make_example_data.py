#!/usr/bin/env python3
"""Regenerates the example inputs under data/ and the fixtures under tests/data/."""
import os
import numpy as np

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
DATA = os.path.join(ROOT, "data")
TDATA = os.path.join(ROOT, "tests", "data")
C_NM_PER_FS = 299.792458
FWHM = 2.0 * np.sqrt(2.0 * np.log(2.0))


def jsi_grid(path):
    # anticorrelated pair at 810 nm, 79/72 nm marginals, sum width set by the pump
    lam = np.arange(700.0, 922.0, 2.0)
    w0 = 2 * np.pi * C_NM_PER_FS / 810.0
    w = 2 * np.pi * C_NM_PER_FS / lam
    ss = 2 * np.pi * C_NM_PER_FS * 79.0 / 810.0**2 / FWHM
    si = 2 * np.pi * C_NM_PER_FS * 72.0 / 810.0**2 / FWHM
    sp = 0.03 / FWHM  # must exceed the marginal width difference
    cov = np.array([[ss**2, (sp**2 - ss**2 - si**2) / 2], [0, si**2]])
    cov[1, 0] = cov[0, 1]
    inv = np.linalg.inv(cov)
    ds = w[:, None] - w0
    di = w[None, :] - w0
    q = inv[0, 0] * ds**2 + 2 * inv[0, 1] * ds * di + inv[1, 1] * di**2
    jac = lam[:, None] ** -2 * lam[None, :] ** -2
    val = np.exp(-0.5 * q) * jac
    val /= val.max()
    with open(path, "w") as f:
        f.write("# joint spectral intensity, signal rows x idler columns, wavelength in nm\n")
        f.write("lambda_s_nm\\lambda_i_nm," + ",".join(f"{x:g}" for x in lam) + "\n")
        for k, x in enumerate(lam):
            f.write(f"{x:g}," + ",".join(f"{v:.6g}" for v in val[k]) + "\n")


def series(path, rate, power, rng, bg=5.0, bins=40, folds=300, width=0.0025):
    live = width * folds
    with open(path, "w") as f:
        f.write(f"# power_uW = {power:g}\n# bin_width_s = {width:g}\n# fold_count = {folds}\n")
        f.write("t_start_s,counts,phase\n")
        for k in range(bins):
            half = k % (bins // 2)
            opn = k < bins // 2
            if half == 0:
                mean, ph = (bg + 0.5 * rate) * live, "transition"
            elif opn:
                mean, ph = (bg + rate) * live, "signal"
            else:
                mean, ph = bg * live, "background"
            f.write(f"{k * width:.17g},{rng.poisson(mean)},{ph}\n")


def drift_rates(path, rng, n=405, dt=60.0, sigma=1.0, tau_min=2700.0):
    # white noise plus linear drift; non-overlapping Allan minimum near tau_min
    d = np.sqrt(sigma**2 * dt / tau_min**3)
    t = np.arange(n) * dt
    x = 10.0 + d * t + rng.normal(0.0, sigma, n)
    with open(path, "w") as f:
        f.write(f"# rate_cnt_per_s sampled every {dt:g} s\n")
        for v in x:
            f.write(f"{v:.6f}\n")


def spectra():
    lam = np.arange(450.0, 701.0, 1.0)
    em = np.exp(-0.5 * ((lam - 520.0) / 18.0) ** 2) + 0.35 * np.exp(-0.5 * ((lam - 555.0) / 25.0) ** 2)
    with open(os.path.join(DATA, "example_emission.csv"), "w") as f:
        f.write("wavelength_nm,emission\n")
        for x, v in zip(lam, em):
            f.write(f"{x:g},{v:.6g}\n")
    tr = 0.9 / (1 + np.exp((lam - 560.0) / 3.0)) / (1 + np.exp((480.0 - lam) / 3.0))
    with open(os.path.join(DATA, "example_filter.csv"), "w") as f:
        f.write("wavelength_nm,transmission\n")
        for x, v in zip(lam, tr):
            f.write(f"{x:g},{v:.6g}\n")


def main():
    rng = np.random.default_rng(7)
    os.makedirs(TDATA, exist_ok=True)
    jsi_grid(os.path.join(DATA, "example_jsi.csv"))
    series(os.path.join(DATA, "example_count_series.csv"), 258.7, 5.0, rng)
    drift_rates(os.path.join(DATA, "example_rates.txt"), rng)
    spectra()
    with open(os.path.join(DATA, "example_power_points.csv"), "w") as f:
        f.write("power_uW,rate_cnt_per_s,sigma_cnt_per_s\n")
        for w in range(1, 11):
            r = 10.35 * w * w
            s = np.sqrt((r + 10.0) / 14.25 + 5.0 / 14.25)
            f.write(f"{w},{r + rng.normal(0, s):.4f},{s:.4f}\n")
    lin = os.path.join(TDATA, "linear")
    os.makedirs(lin, exist_ok=True)
    for k, w in enumerate(range(1, 11)):
        series(os.path.join(lin, f"c2pef_{k:02d}_{w}uW.csv"), 100.0 * w, float(w), rng)


if __name__ == "__main__":
    main()
