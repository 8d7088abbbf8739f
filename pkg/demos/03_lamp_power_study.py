"""Photon-source power study: four model curves, the generation balance,
and the no-photon floor.

Uses the shared-parameter configuration (trapping 11/s, background
generation 8e-8/s per side, gap difference 4.844 GHz) with one added photon
mode per heater power.  Sweeping the photon rate down to zero shows the
saturation floor near 81/s set by the non-photon generation, and the lamp
model ties the rate rise to the blackbody band power of a heater whose
temperature grows as the square root of dissipated power.
"""

import numpy as np

import parityflux as pf
from parityflux.fitting import LampTheta, fit_lamp, lamp_model
from parityflux.steady_state import DynamicsParams, gamma_curve

params = pf.DeviceParams(gap_diff=4.844)
dyn = DynamicsParams(s=11.0, r=1 / 120e-9, g_other=8e-8)
background = pf.PhotonDrive(109.0, 2.1e-3)
added = {0.0: None, 1.4: pf.PhotonDrive(125.0, 2.9e-3),
         5.6: pf.PhotonDrive(125.0, 12.8e-3),
         12.6: pf.PhotonDrive(124.0, 32.6e-3)}

grid = np.linspace(0.0, 0.5, 21)
print("Gamma(0) / Gamma(0.5) per heater power:")
gamma0 = {}
for p_uw, mode in added.items():
    drive = [background] if mode is None else [background, mode]
    pts = gamma_curve(params, dyn, drive, [0.0, 0.5])
    gamma0[p_uw] = pts[0].gamma_total
    print("  P = %5.1f uW: %8.1f /s   %8.1f /s" %
          (p_uw, pts[0].gamma_total, pts[1].gamma_total))

print("\nsweeping the photon rate to zero (floor from other generation):")
for scale in (1.0, 0.5, 0.2, 0.05, 0.0):
    pts = gamma_curve(params, dyn, pf.PhotonDrive(109.0, 2.1e-3 * scale), [0.0])
    print("  n_bar x %4.2f: Gamma(0) = %6.1f /s  (x0 = %.2e)"
          % (scale, pts[0].gamma_total, pts[0].state.x0))

theta = LampTheta(a=2e-5, b=gamma0[0.0])
powers = np.array(sorted(added))
fitted, _ = fit_lamp([(p, lamp_model(p, theta)) for p in powers])
print("\nlamp-model round trip: heater temperatures",
      [round(float(t), 2) for t in
       np.sqrt(fitted.k_agg * powers + fitted.t_mc**2)], "K")
print("background rate b = %.1f /s" % fitted.b)
