#!/usr/bin/env python3
"""Regenerate the CSV data tables shipped in src/trcopt/data/.

Dispersion tables come from standard published dispersion models:

  SiO2   Malitson (1965) fused-silica Sellmeier, lossless over the band.
  Al2O3  Malitson (1962) sapphire ordinary-ray Sellmeier, lossless.
  Si3N4  Luke et al. (2015) Sellmeier, lossless over the band.
  TiO2   Devore (1951) rutile ordinary-ray dispersion, clamped in the
         deep UV where the formula leaves its validity range, plus an
         Urbach-style extinction tail below the ~410 nm absorption edge.
  PDMS   Cauchy fit around n ~ 1.40, lossless over 300-2,500 nm.

The solar table is a modeled approximation of the standard global-tilt
reference spectrum (air mass 1.5): a 5,772 K blackbody at the mean
Sun-Earth distance attenuated by ozone UV cutoff, Rayleigh + aerosol
scattering (partial optical depth, since the global spectrum recovers much
of the diffuse component), and the familiar O2/H2O/CO2 absorption bands,
then scaled to integrate to 950 W/m^2 over 300-2,500 nm. None of these
values are measurements; see data/README.md.
"""
import os

import numpy as np

HERE = os.path.dirname(os.path.abspath(__file__))
DATA_DIR = os.path.join(HERE, os.pardir, "src", "trcopt", "data")

LAMBDA_NM = np.arange(300.0, 2500.0 + 1.0, 2.0)
AIR_MASS = 1.5


def sellmeier(lam_um, terms):
    total = np.zeros_like(lam_um)
    for b, c_um in terms:
        total += b * lam_um**2 / (lam_um**2 - c_um**2)
    return np.sqrt(1.0 + total)


def sio2():
    n = sellmeier(
        LAMBDA_NM / 1000.0,
        [(0.6961663, 0.0684043), (0.4079426, 0.1162414), (0.8974794, 9.896161)],
    )
    return n, np.zeros_like(n)


def al2o3():
    n = sellmeier(
        LAMBDA_NM / 1000.0,
        [(1.4313493, 0.0726631), (0.65054713, 0.1193242), (5.3414021, 18.028251)],
    )
    return n, np.zeros_like(n)


def si3n4():
    n = sellmeier(
        LAMBDA_NM / 1000.0,
        [(3.0249, 0.1353406), (40314.0, 1239.842)],
    )
    return n, np.zeros_like(n)


def tio2():
    lam_um = LAMBDA_NM / 1000.0
    n = np.sqrt(5.913 + 0.2441 / np.maximum(lam_um**2 - 0.0803, 1e-6))
    n = np.minimum(n, 3.3)  # Devore's form diverges below its UV validity range
    kappa = np.where(
        LAMBDA_NM < 430.0, 0.5 * np.exp(-(LAMBDA_NM - 300.0) / 30.0), 0.0
    )
    kappa[kappa < 1e-4] = 0.0
    return n, kappa


def pdms():
    lam_um = LAMBDA_NM / 1000.0
    n = 1.3997 + 0.00452 / lam_um**2 + 0.00025 / lam_um**4
    return n, np.zeros_like(n)


def _gauss_band(lam, center, depth, width):
    return 1.0 - depth * np.exp(-(((lam - center) / width) ** 2))


def solar():
    lam = LAMBDA_NM
    lam_m = lam * 1e-9
    h, c, kb = 6.62607015e-34, 2.99792458e8, 1.380649e-23
    t_sun = 5772.0
    planck = (2 * h * c**2 / lam_m**5) / np.expm1(h * c / (lam_m * kb * t_sun))

    lam_um = lam / 1000.0
    tau_rayleigh = 0.0087 * lam_um**-4.05
    tau_aerosol = 0.06 * lam_um**-1.3
    scattering = np.exp(-0.35 * AIR_MASS * (tau_rayleigh + tau_aerosol))
    ozone_uv = np.exp(-np.exp((315.0 - lam) / 8.0))
    chappuis = _gauss_band(lam, 600.0, 0.04, 80.0)

    bands = [
        (688.0, 0.12, 4.0),   # O2 B
        (762.0, 0.55, 6.0),   # O2 A
        (719.0, 0.25, 10.0),  # H2O
        (823.0, 0.25, 12.0),  # H2O
        (940.0, 0.65, 22.0),  # H2O
        (1130.0, 0.75, 28.0),  # H2O
        (1400.0, 0.985, 55.0),  # H2O
        (1870.0, 0.985, 65.0),  # H2O
        (2060.0, 0.55, 30.0),  # CO2
        (2350.0, 0.40, 40.0),  # H2O/CO2
        (2550.0, 0.95, 90.0),  # H2O tail beyond the band edge
    ]
    absorption = np.ones_like(lam)
    for center, depth, width in bands:
        absorption *= _gauss_band(lam, center, depth, width)

    s = planck * scattering * ozone_uv * chappuis * absorption
    s *= 950.0 / np.trapezoid(s, lam)
    return s


def write_dispersion(name, n, kappa):
    path = os.path.join(DATA_DIR, name)
    with open(path, "w") as handle:
        handle.write("wavelength_nm,n,k\n")
        for lam, ni, ki in zip(LAMBDA_NM, n, kappa):
            handle.write(f"{lam:.1f},{ni:.6f},{ki:.6f}\n")
    print("wrote", path)


def main():
    os.makedirs(DATA_DIR, exist_ok=True)
    write_dispersion("sio2.csv", *sio2())
    write_dispersion("al2o3.csv", *al2o3())
    write_dispersion("si3n4.csv", *si3n4())
    write_dispersion("tio2.csv", *tio2())
    write_dispersion("pdms.csv", *pdms())

    s = solar()
    path = os.path.join(DATA_DIR, "solar_global_tilt.csv")
    with open(path, "w") as handle:
        handle.write("wavelength_nm,irradiance\n")
        for lam, value in zip(LAMBDA_NM, s):
            handle.write(f"{lam:.1f},{value:.6f}\n")
    print("wrote", path)
    peak = LAMBDA_NM[np.argmax(s)]
    print(f"solar peak at {peak:.0f} nm, integral "
          f"{np.trapezoid(s, LAMBDA_NM):.1f} W/m^2")


if __name__ == "__main__":
    main()
