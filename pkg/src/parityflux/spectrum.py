"""Charge-basis diagonalization of the two-junction transmon.

H = 4 E_C (n - n_g)^2 - E_J1 cos(phi - phi_ext) - E_J2 cos(phi), with
phi_ext = 2 pi Phi/Phi0.  The odd-parity sector is represented by shifting
n_g -> n_g - 1/2 on the integer charge basis; e^{+-i phi/2} then acts as a
half-unit charge translation between the sectors.
"""

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

DEFAULT_NG = 0.25   # midpoint between the charge-dispersion extremes
DEFAULT_NTRUNC = 31  # charge states -15..15


class TruncationError(RuntimeError):
    """Charge basis too small: low levels still move when it is enlarged."""


class Junction(Enum):
    J1 = 1
    J2 = 2


@dataclass(frozen=True)
class SpectrumResult:
    levels_even: np.ndarray  # GHz, relative to even ground state
    levels_odd: np.ndarray   # GHz, relative to odd ground state
    fq_even: float
    fq_odd: float

    @property
    def fq_mean(self):
        return 0.5 * (self.fq_even + self.fq_odd)

    @property
    def delta_fq(self):
        return abs(self.fq_even - self.fq_odd)


@dataclass(frozen=True)
class ChargeMatrixElements:
    """|<i,e|cos(phi_J/2)|j,o>|^2 and the sine analogue, i, j in {0, 1}."""

    junction: Junction
    m_cos: np.ndarray  # 2x2
    m_sin: np.ndarray  # 2x2


def _hamiltonian(params, phi, n_g, n_trunc):
    dim = int(n_trunc)
    if dim % 2 == 0:
        dim += 1
    cut = (dim - 1) // 2
    n = np.arange(-cut, cut + 1)
    h = np.zeros((dim, dim), dtype=complex)
    h[np.arange(dim), np.arange(dim)] = 4.0 * params.ec * (n - n_g) ** 2
    # <n+1| cos(phi - phi_ext) |n> = e^{-i phi_ext}/2 ; junction 2 unrotated
    off = -0.5 * (params.ej1 * np.exp(-2j * np.pi * phi) + params.ej2)
    h[np.arange(1, dim), np.arange(dim - 1)] = off
    h[np.arange(dim - 1), np.arange(1, dim)] = np.conj(off)
    return h


def eigensystem(params, phi, n_g, n_trunc=DEFAULT_NTRUNC, check_convergence=True):
    """Eigenvalues (GHz, relative to the ground state) and eigenvectors.

    Eigenvectors are columns in the integer charge basis -cut..cut, unit
    norm.  With check_convergence the lowest two levels are compared against
    a basis enlarged by 4 charge states; a shift above 1e-6 GHz raises
    TruncationError.
    """
    if n_trunc < 15:
        raise ValueError("n_trunc must be at least 15")
    h = _hamiltonian(params, phi, n_g, n_trunc)
    w, v = np.linalg.eigh(h)
    w = w - w[0]
    if check_convergence:
        w2 = np.linalg.eigvalsh(_hamiltonian(params, phi, n_g, n_trunc + 4))
        w2 = w2 - w2[0]
        if max(abs(w2[0] - w[0]), abs(w2[1] - w[1])) > 1e-6:
            raise TruncationError(
                "levels shift by more than 1e-6 GHz between n_trunc=%d and +4; "
                "increase n_trunc" % n_trunc
            )
    return w, v


def parity_spectrum(params, phi, n_g, n_trunc=DEFAULT_NTRUNC, n_levels=5,
                    check_convergence=True):
    """Even manifold at n_g, odd at n_g - 1/2."""
    we, _ = eigensystem(params, phi, n_g, n_trunc, check_convergence)
    wo, _ = eigensystem(params, phi, n_g - 0.5, n_trunc, check_convergence=False)
    k = min(n_levels, len(we))
    return SpectrumResult(
        levels_even=we[:k].copy(),
        levels_odd=wo[:k].copy(),
        fq_even=float(we[1] - we[0]),
        fq_odd=float(wo[1] - wo[0]),
    )


def _translation_amplitudes(vec_even, vec_odd):
    """Complex amplitudes <j,o|e^{+-i phi/2}|i,e> on the integer basis.

    The odd eigenvector (at n_g - 1/2) represents half-integer charges
    m + 1/2; e^{i phi/2} maps charge n -> n + 1/2, so the two overlaps are
    index-aligned and index-shifted sums.
    """
    a = vec_even
    b = vec_odd
    up = np.vdot(b, a)                    # sum_n b*_n a_n
    down = np.dot(np.conj(b[:-1]), a[1:])  # sum_n b*_{n-1} a_n
    amp_cos = 0.5 * (up + down)
    amp_sin = (up - down) / 2j
    return amp_cos, amp_sin


def charge_matrix_elements(params, phi, n_g=DEFAULT_NG, junction=Junction.J1,
                           n_trunc=DEFAULT_NTRUNC, flux_on_j2=False):
    """Single-charge-tunneling matrix elements for one junction.

    The junction phase is phi_J = phi_hat - phi_ext for J1 and phi_hat for
    J2 (or the opposite assignment with flux_on_j2, a gauge choice that must
    not change any modulus).  Matrix elements connect even-sector state i to
    odd-sector state j.
    """
    junction = Junction(junction)
    _, ve = eigensystem(params, phi, n_g, n_trunc, check_convergence=False)
    _, vo = eigensystem(params, phi, n_g - 0.5, n_trunc, check_convergence=False)
    phext = 2.0 * math.pi * phi
    if flux_on_j2:
        # H = ... - EJ1 cos(phi) - EJ2 cos(phi + phi_ext)
        rot = 0.0 if junction is Junction.J1 else -phext
        ve = _gauge_vectors(params, phi, n_g, n_trunc)
        vo = _gauge_vectors(params, phi, n_g - 0.5, n_trunc)
    else:
        rot = phext if junction is Junction.J1 else 0.0
    m_cos = np.zeros((2, 2))
    m_sin = np.zeros((2, 2))
    c, s = math.cos(rot / 2.0), math.sin(rot / 2.0)
    for i in range(2):
        for j in range(2):
            amp_c, amp_s = _translation_amplitudes(ve[:, i], vo[:, j])
            # cos((phi - rot)/2) = cos(rot/2) cos(phi/2) + sin(rot/2) sin(phi/2)
            m_cos[i, j] = abs(c * amp_c + s * amp_s) ** 2
            m_sin[i, j] = abs(c * amp_s - s * amp_c) ** 2
    return ChargeMatrixElements(junction=junction, m_cos=m_cos, m_sin=m_sin)


def _gauge_vectors(params, phi, n_g, n_trunc):
    """Eigenvectors of the gauge with the external flux on junction 2."""
    dim = int(n_trunc)
    if dim % 2 == 0:
        dim += 1
    cut = (dim - 1) // 2
    n = np.arange(-cut, cut + 1)
    h = np.zeros((dim, dim), dtype=complex)
    h[np.arange(dim), np.arange(dim)] = 4.0 * params.ec * (n - n_g) ** 2
    off = -0.5 * (params.ej1 + params.ej2 * np.exp(2j * np.pi * phi))
    h[np.arange(1, dim), np.arange(dim - 1)] = off
    h[np.arange(dim - 1), np.arange(1, dim)] = np.conj(off)
    _, v = np.linalg.eigh(h)
    return v
