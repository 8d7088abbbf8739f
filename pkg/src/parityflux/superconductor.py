"""BCS densities of states, quasiparticle occupations, and the
energy integrals ("structure factors") entering single-charge tunneling
rates.

Two tunneling integrals appear.  The number-conserving one weighs an
occupied initial QP state against an empty final state offset by the qubit
energy; the pair-breaking (photon-assisted) one weighs the two final states
a photon splits its energy into.  Both have inverse-square-root gap-edge
singularities which are removed exactly by substituting eps = gap*cosh(u)
at the singular endpoint; the Dynes broadening keeps the exactly-resonant
case finite.

Sign convention: ``omega_ghz`` is the energy gained by the qubit during the
tunneling event (positive for 0->1 excitation, negative for relaxation).
The occupied QP therefore arrives at eps - omega, which is what detailed
balance and the gap-difference resonance condition require.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import expit

from .constants import thermal_energy_ghz
from .quadrature import adaptive_quad

# occupation below exp(-40) is discarded (thermal tail cutoff)
_TAIL_EFOLDS = 40.0
# Maxwell-Boltzmann shortcut is exact to better than 1e-8 beyond this
_MB_EFOLDS = 20.0


def dos(eps_ghz, gap_ghz, dynes=0.0):
    """Reduced BCS density of states, normal-state normalized.

    dynes = 0: eps/sqrt(eps^2 - gap^2) above the gap, 0 below.
    dynes > 0: |Re[(eps + i*dynes*gap)/sqrt((eps + i*dynes*gap)^2 - gap^2)]|,
    finite everywhere.
    """
    if gap_ghz <= 0:
        raise ValueError("gap must be positive")
    eps = np.asarray(eps_ghz, dtype=float)
    if dynes == 0.0:
        with np.errstate(invalid="ignore", divide="ignore"):
            out = np.where(np.abs(eps) > gap_ghz,
                           np.abs(eps) / np.sqrt(np.abs(eps * eps - gap_ghz * gap_ghz)),
                           0.0)
    else:
        z = eps + 1j * dynes * gap_ghz
        out = np.abs(np.real(z / np.sqrt(z * z - gap_ghz * gap_ghz)))
    return float(out) if out.ndim == 0 else out


def occupation(eps_ghz, t_kelvin, mu_ghz):
    """Fermi function 1/(exp((eps-mu)/kT) + 1); overflow-safe."""
    if t_kelvin <= 0:
        raise ValueError("temperature must be positive")
    if mu_ghz == -math.inf:
        return 0.0 * np.asarray(eps_ghz, dtype=float) if np.ndim(eps_ghz) else 0.0
    x = (np.asarray(eps_ghz, dtype=float) - mu_ghz) / thermal_energy_ghz(t_kelvin)
    out = expit(-x)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FilmState:
    """One superconducting film: gap, temperature, excess-QP chemical
    potential, the matching reduced density, and the film volume."""

    gap: float          # Delta/h (GHz)
    temperature: float  # K
    mu: float           # GHz; -inf means no excess QPs
    x_qp: float         # reduced density, consistent with mu
    volume: float       # um^3
    dynes: float = 1e-4

    def __post_init__(self):
        if self.x_qp < 0:
            raise ValueError("x_qp must be nonnegative")
        if self.mu >= self.gap:
            raise ValueError("nondegenerate regime assumed: mu < gap")

    @classmethod
    def from_mu(cls, gap, temperature, mu, volume=1.0, dynes=1e-4):
        x = xqp_from_mu(gap, temperature, mu, dynes)
        return cls(gap=gap, temperature=temperature, mu=mu, x_qp=x,
                   volume=volume, dynes=dynes)

    @classmethod
    def from_xqp(cls, gap, temperature, x_qp, volume=1.0, dynes=1e-4):
        mu = mu_from_xqp(gap, temperature, x_qp, dynes)
        return cls(gap=gap, temperature=temperature, mu=mu, x_qp=x_qp,
                   volume=volume, dynes=dynes)

    def boltzmann_ok(self):
        """Occupied-side Maxwell-Boltzmann shortcut is accurate here."""
        kt = thermal_energy_ghz(self.temperature)
        return (self.gap - self.mu) / kt > _MB_EFOLDS


def xqp_from_mu(gap, t_kelvin, mu, dynes=0.0, rtol=1e-10):
    """Reduced QP density x = (2/Delta) * int nu(eps) f(eps) deps.

    Normalized against the Cooper-pair density 2 D(eps_F) Delta, which makes
    the mu = 0 thermal value approach sqrt(2 pi kT/Delta) exp(-Delta/kT).
    """
    if mu == -math.inf:
        return 0.0
    kt = thermal_energy_ghz(t_kelvin)
    emax = gap + _TAIL_EFOLDS * kt + max(0.0, mu - gap)  # mu < gap anyway
    umax = math.acosh(emax / gap)

    def integrand(u):
        eps = gap * np.cosh(u)
        jac = gap * np.sinh(u)
        return dos(eps, gap, dynes) * occupation(eps, t_kelvin, mu) * jac

    val = adaptive_quad(integrand, 0.0, umax, rtol=rtol)
    return 2.0 * val / gap


def mu_from_xqp(gap, t_kelvin, x_qp, dynes=0.0, rtol=1e-10):
    """Chemical potential reproducing a requested reduced density.

    Returns -inf for x_qp = 0 (no excess QPs).  Raises ValueError when the
    density would push mu to the gap edge (degenerate regime).
    """
    if x_qp < 0:
        raise ValueError("x_qp must be nonnegative")
    if x_qp == 0.0:
        return -math.inf
    kt = thermal_energy_ghz(t_kelvin)
    x_thermal = xqp_from_mu(gap, t_kelvin, 0.0, dynes, rtol)
    mu_est = kt * math.log(x_qp / x_thermal)  # exact in the Boltzmann regime
    if mu_est >= gap - 2.0 * kt:
        raise ValueError(
            "x_qp = %g requires mu within 2 kT of the gap; "
            "nondegenerate treatment invalid" % x_qp
        )
    lo, hi = mu_est - 4.0 * kt, min(mu_est + 4.0 * kt, gap - 1e-9)

    def delta(mu):
        return xqp_from_mu(gap, t_kelvin, mu, dynes, rtol) - x_qp

    return brentq(delta, lo, hi, xtol=1e-14, rtol=1e-13)


def _occupied_weight(eps, t_kelvin, mu, boltzmann):
    if boltzmann:
        return np.exp(-(eps - mu) / thermal_energy_ghz(t_kelvin))
    return occupation(eps, t_kelvin, mu)


def nups_integral(omega_ghz, occupied: FilmState, empty: FilmState,
                  rtol=1e-8, pauli_blocking=True, boltzmann=False,
                  mean_gap=None):
    """Directional number-conserving structure factors (S_plus, S_minus).

    The occupied film supplies a QP at eps; it lands on the other film at
    eps - omega (omega = qubit energy gain).  Integration runs over the
    gap-edge-truncated domain eps >= max(gap_occ, gap_empty + omega) so the
    excitation and relaxation channels map onto each other exactly, which
    keeps detailed balance exact even with Dynes broadening.
    """
    t = occupied.temperature
    kt = thermal_energy_ghz(t)
    mean_gap = mean_gap if mean_gap is not None else 0.5 * (occupied.gap + empty.gap)
    if occupied.mu == -math.inf:
        return np.zeros(2)
    lo_occ = occupied.gap
    lo_emp = empty.gap + omega_ghz
    if lo_occ >= lo_emp:
        edge_gap, shift = occupied.gap, 0.0
    else:
        edge_gap, shift = empty.gap, omega_ghz
    e0 = edge_gap + shift
    emax = e0 + _TAIL_EFOLDS * kt
    umax = math.acosh((emax - shift) / edge_gap)
    gg = occupied.gap * empty.gap

    def integrand(u):
        eps = edge_gap * np.cosh(u) + shift
        jac = edge_gap * np.sinh(u)
        ef = eps - omega_ghz
        nu_occ = dos(eps, occupied.gap, occupied.dynes)
        nu_emp = dos(ef, empty.gap, empty.dynes)
        w = _occupied_weight(eps, t, occupied.mu, boltzmann) * nu_occ * nu_emp
        if pauli_blocking and not boltzmann:
            w = w * (1.0 - occupation(ef, t, empty.mu))
        coh = gg / (eps * ef)
        base = w * jac / mean_gap
        return np.stack([base * (1.0 + coh), base * (1.0 - coh)], axis=-1)

    out = adaptive_quad(integrand, 0.0, umax, rtol=rtol)
    return np.asarray(out, dtype=float)


def nups_integral_grid(omegas_ghz, occupied: FilmState, empty: FilmState,
                       rtol=1e-8, pauli_blocking=True, boltzmann=False,
                       mean_gap=None):
    """nups_integral for many omegas in one adaptive pass.

    All component integrals are mapped onto t in [0, 1] (their gap-edge
    singularities then share the t = 0 endpoint) and refined jointly; the
    error criterion is relative to the largest component.  Returns an array
    of shape (len(omegas), 2) holding (S_plus, S_minus) rows.
    """
    omegas = np.asarray(omegas_ghz, dtype=float)
    k = omegas.size
    if occupied.mu == -math.inf or k == 0:
        return np.zeros((k, 2))
    t = occupied.temperature
    kt = thermal_energy_ghz(t)
    mean_gap = mean_gap if mean_gap is not None else 0.5 * (occupied.gap + empty.gap)
    lo_occ = np.full(k, occupied.gap)
    lo_emp = empty.gap + omegas
    use_occ = lo_occ >= lo_emp
    edge = np.where(use_occ, occupied.gap, empty.gap)
    shift = np.where(use_occ, 0.0, omegas)
    e0 = edge + shift
    umax = np.arccosh((e0 + _TAIL_EFOLDS * kt - shift) / edge)
    gg = occupied.gap * empty.gap

    def integrand(tt):
        u = tt[:, None] * umax[None, :]
        eps = edge[None, :] * np.cosh(u) + shift[None, :]
        jac = edge[None, :] * np.sinh(u) * umax[None, :]
        ef = eps - omegas[None, :]
        nu = dos(eps, occupied.gap, occupied.dynes) * dos(ef, empty.gap, empty.dynes)
        w = _occupied_weight(eps, t, occupied.mu, boltzmann) * nu
        if pauli_blocking and not boltzmann:
            w = w * (1.0 - occupation(ef, t, empty.mu))
        coh = gg / (eps * ef)
        base = w * jac / mean_gap
        return np.concatenate([base * (1.0 + coh), base * (1.0 - coh)], axis=1)

    out = adaptive_quad(integrand, 0.0, 1.0, rtol=rtol)
    out = np.atleast_1d(out)
    return np.stack([out[:k], out[k:]], axis=1)


def paps_integral_grid(omegas_ghz, f_photon, left: FilmState,
                       right: FilmState, rtol=1e-8, pauli_blocking=True,
                       mean_gap=None):
    """paps_integral for many omegas in one adaptive pass; (K, 2) result."""
    omegas = np.asarray(omegas_ghz, dtype=float)
    k = omegas.size
    out = np.zeros((k, 2))
    hi = f_photon - omegas - right.gap
    live = hi > left.gap
    if not live.any():
        return out
    om = omegas[live]
    n = om.size
    mean_gap = mean_gap if mean_gap is not None else 0.5 * (left.gap + right.gap)
    mid = 0.5 * (left.gap + hi[live])
    umax_l = np.arccosh(mid / left.gap)
    umax_r = np.arccosh((f_photon - om - mid) / right.gap)
    gg = left.gap * right.gap
    t = left.temperature

    def integrand(tt):
        ul = tt[:, None] * umax_l[None, :]
        eps_l = left.gap * np.cosh(ul)
        jac_l = left.gap * np.sinh(ul) * umax_l[None, :]
        ur = tt[:, None] * umax_r[None, :]
        e2_r = right.gap * np.cosh(ur)
        jac_r = right.gap * np.sinh(ur) * umax_r[None, :]
        eps = np.concatenate([eps_l, f_photon - om[None, :] - e2_r], axis=1)
        jac = np.concatenate([jac_l, jac_r], axis=1)
        e2 = f_photon - np.concatenate([om, om])[None, :] - eps
        base = dos(eps, left.gap, left.dynes) * dos(e2, right.gap, right.dynes)
        if pauli_blocking:
            base = base * (1.0 - occupation(eps, t, left.mu)) \
                        * (1.0 - occupation(e2, t, right.mu))
        base = base * jac / mean_gap
        coh = gg / (eps * e2)
        return np.concatenate([base * (1.0 + coh), base * (1.0 - coh)], axis=1)

    res = np.atleast_1d(adaptive_quad(integrand, 0.0, 1.0, rtol=rtol))
    plus = res[:2 * n]
    minus = res[2 * n:]
    out[live, 0] = plus[:n] + plus[n:]
    out[live, 1] = minus[:n] + minus[n:]
    return out


def structure_factor_nups(omega_ghz, left: FilmState, right: FilmState,
                          sign, direction="lr", rtol=1e-8,
                          pauli_blocking=True, boltzmann=False, mean_gap=None):
    """One directional NUPS structure factor S^{lr} or S^{rl}.

    sign is +1 or -1 (the coherence-factor branch); direction "lr" means the
    left film is occupied.  The full S_+- is the lr + rl sum, assembled by
    the rate layer.
    """
    if direction == "lr":
        occ, emp = left, right
    elif direction == "rl":
        occ, emp = right, left
    else:
        raise ValueError("direction must be 'lr' or 'rl'")
    pair = nups_integral(omega_ghz, occ, emp, rtol=rtol,
                         pauli_blocking=pauli_blocking, boltzmann=boltzmann,
                         mean_gap=mean_gap)
    return float(pair[0] if sign > 0 else pair[1])


def paps_integral(omega_ghz, f_photon, left: FilmState, right: FilmState,
                  rtol=1e-8, pauli_blocking=True, mean_gap=None):
    """Directional pair-breaking structure factors (S_plus, S_minus).

    A photon of energy f_photon creates one QP at eps on the left film and
    one at f_photon - eps - omega on the right film.  Returns zeros when the
    photon cannot supply both gap energies plus the qubit energy.  The two
    singular endpoints are handled by splitting at the midpoint and
    substituting toward each edge.
    """
    mean_gap = mean_gap if mean_gap is not None else 0.5 * (left.gap + right.gap)
    lo = left.gap
    hi = f_photon - omega_ghz - right.gap
    if hi <= lo:
        return np.zeros(2)
    mid = 0.5 * (lo + hi)
    gg = left.gap * right.gap
    t = left.temperature

    def make(from_left):
        if from_left:
            gap_edge, to_eps = left.gap, lambda e: e
            umax = math.acosh(mid / left.gap)
        else:
            gap_edge = right.gap
            to_eps = lambda e2: f_photon - omega_ghz - e2
            umax = math.acosh((f_photon - omega_ghz - mid) / right.gap)

        def integrand(u):
            ee = gap_edge * np.cosh(u)
            jac = gap_edge * np.sinh(u)
            eps = to_eps(ee)
            e2 = f_photon - omega_ghz - eps
            base = dos(eps, left.gap, left.dynes) * dos(e2, right.gap, right.dynes)
            if pauli_blocking:
                base = base * (1.0 - occupation(eps, t, left.mu)) \
                            * (1.0 - occupation(e2, t, right.mu))
            base = base * jac / mean_gap
            coh = gg / (eps * e2)
            return np.stack([base * (1.0 + coh), base * (1.0 - coh)], axis=-1)

        return integrand, umax

    total = np.zeros(2)
    for from_left in (True, False):
        f, umax = make(from_left)
        total = total + np.asarray(adaptive_quad(f, 0.0, umax, rtol=rtol))
    return total


def structure_factor_paps(omega_ghz, f_photon, left: FilmState,
                          right: FilmState, sign, rtol=1e-8,
                          pauli_blocking=True, mean_gap=None):
    """One directional PAPS structure factor; 0 below the pair-breaking
    threshold f_photon <= gap_l + gap_r + omega."""
    pair = paps_integral(omega_ghz, f_photon, left, right, rtol=rtol,
                         pauli_blocking=pauli_blocking, mean_gap=mean_gap)
    return float(pair[0] if sign > 0 else pair[1])
