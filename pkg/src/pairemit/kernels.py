"""Hot integrand kernels with a numba backend and a pure-NumPy fallback.

The correlation engine spends essentially all of its time evaluating the
functions in this module on quadrature-node arrays.  Each kernel exists in
two forms computing the same expressions: an array-style NumPy version
(the fallback, also the executable reference in tests) and a fused
explicit-loop version compiled with ``numba.njit``.  The loop form avoids
the temporaries of the array form, which is where the JIT speedup comes
from.  Compilation is skipped when the environment variable
``PAIREMIT_NO_NUMBA`` is set (to ``1``/``true``/``yes``); ``BACKEND``
records the active path, and cached CLI results are keyed on it because
the two paths may differ in the last few ulp.

Inputs are in internal Fermi units (k_F = 1, mu = 1, m = 1/2); lengths here
are k_F^-1, energies are units of mu.
"""

from __future__ import annotations

import math
import os

import numpy as np

__all__ = ["BACKEND", "USE_NUMBA", "gamma_integrand", "chi_f", "chi_p",
           "warmup"]


def _want_numba() -> bool:
    flag = os.environ.get("PAIREMIT_NO_NUMBA", "").strip().lower()
    return flag not in ("1", "true", "yes")


# ---------------------------------------------------------------------------
# NumPy reference implementations
# ---------------------------------------------------------------------------

def _gamma_integrand(phi, eps, cosa, dabs, ec, w, r1, r2, cth2, omega_cap):
    """One-particle (gamma) integrand over the azimuthal node array.

    Value at fixed (eps_k, cos alpha), broadcast over phi: the two emission
    Gaussians of the gamma kernel depend on the k direction only through the
    bisector component, so the integrand is azimuth-independent.  Includes
    the radial measure m k(eps) and the occupation/tunneling weights.
    """
    out = np.zeros(phi.shape, np.complex128)
    omega = math.sqrt(eps * eps + dabs * dabs)
    if omega >= omega_cap:
        return out
    k = math.sqrt(1.0 + eps)
    p = math.sqrt(1.0 - omega)
    if omega == 0.0:
        vk2 = 0.5
    else:
        vk2 = 0.5 * (1.0 - eps / omega)
    weight = (
        0.5 * k                      # m k(eps), m = 1/2
        * vk2
        * 2.0 * p * math.exp(-omega / ec)          # h(p_k)^2
        * math.exp(-(w * w) * (p * p + k * k - 2.0 * p * k * cth2 * cosa))
    )
    phase = complex(math.cos(p * (r1 - r2)), math.sin(p * (r1 - r2)))
    out[:] = weight * phase
    return out


def _chi_f(u, k, w, c1, c2, r1, r2):
    """Pair-amplitude energy-line function F(u) over aligned node arrays.

    F(u) = h(a) h(b) (2 pi)^6 g(a n1 - k) g(b n2 + k) e^{i(a r1 + b r2)}
    with a = sqrt(1+u), b = sqrt(1-u); the opposite tunneling-filter
    exponents of the pair cancel, so E_C does not appear.  c1 and c2 are the
    direction cosines of k with the two detector axes, as arrays aligned
    element-wise with u (one entry per quadrature node, all azimuths of a
    batch flattened together); the (2 pi)^-6 of the g's is folded into the
    assembly prefactor outside.
    """
    a = np.sqrt(1.0 + u)
    b = np.sqrt(1.0 - u)
    expo = -(0.5 * w * w) * (
        a * a + b * b + 2.0 * k * k - 2.0 * a * k * c1 + 2.0 * b * k * c2
    )
    return 2.0 * np.sqrt(a * b) * np.exp(expo) * np.exp(1j * (a * r1 + b * r2))


def _chi_p(u, fm, fp, omega, k, w, c1, c2, r1, r2):
    """Pole-subtracted pair integrand P(u) for the principal-value integral.

    P(u) = [F(u) - F(-w)] / (2 w (u + w)) + [F(u) - F(+w)] / (2 w (w - u));
    fm, fp are F(-omega), F(+omega) at the same k direction, aligned
    element-wise with u like c1 and c2.
    """
    f = _chi_f(u, k, w, c1, c2, r1, r2)
    return (f - fm) / (2.0 * omega * (u + omega)) + (f - fp) / (
        2.0 * omega * (omega - u)
    )


# ---------------------------------------------------------------------------
# fused loop implementations (the numba-compiled forms)
# ---------------------------------------------------------------------------

def _gamma_integrand_loop(phi, eps, cosa, dabs, ec, w, r1, r2, cth2,
                          omega_cap):
    out = np.zeros(phi.shape, np.complex128)
    omega = math.sqrt(eps * eps + dabs * dabs)
    if omega >= omega_cap:
        return out
    k = math.sqrt(1.0 + eps)
    p = math.sqrt(1.0 - omega)
    if omega == 0.0:
        vk2 = 0.5
    else:
        vk2 = 0.5 * (1.0 - eps / omega)
    weight = (0.5 * k * vk2 * 2.0 * p * math.exp(-omega / ec)
              * math.exp(-(w * w) * (p * p + k * k
                                     - 2.0 * p * k * cth2 * cosa)))
    ph = p * (r1 - r2)
    val = complex(weight * math.cos(ph), weight * math.sin(ph))
    for i in range(out.shape[0]):
        out[i] = val
    return out


def _chi_f_loop(u, k, w, c1, c2, r1, r2):
    n = u.shape[0]
    out = np.empty(n, np.complex128)
    hw2 = 0.5 * w * w
    for i in range(n):
        a = math.sqrt(1.0 + u[i])
        b = math.sqrt(1.0 - u[i])
        expo = -hw2 * (a * a + b * b + 2.0 * k * k
                       - 2.0 * a * k * c1[i] + 2.0 * b * k * c2[i])
        amp = 2.0 * math.sqrt(a * b) * math.exp(expo)
        ph = a * r1 + b * r2
        out[i] = complex(amp * math.cos(ph), amp * math.sin(ph))
    return out


def _chi_p_loop(u, fm, fp, omega, k, w, c1, c2, r1, r2):
    n = u.shape[0]
    out = np.empty(n, np.complex128)
    hw2 = 0.5 * w * w
    for i in range(n):
        a = math.sqrt(1.0 + u[i])
        b = math.sqrt(1.0 - u[i])
        expo = -hw2 * (a * a + b * b + 2.0 * k * k
                       - 2.0 * a * k * c1[i] + 2.0 * b * k * c2[i])
        amp = 2.0 * math.sqrt(a * b) * math.exp(expo)
        ph = a * r1 + b * r2
        f = complex(amp * math.cos(ph), amp * math.sin(ph))
        out[i] = (f - fm[i]) / (2.0 * omega * (u[i] + omega)) \
            + (f - fp[i]) / (2.0 * omega * (omega - u[i]))
    return out


USE_NUMBA = False
BACKEND = "numpy"
if _want_numba():
    try:
        from numba import njit

        gamma_integrand = njit(cache=True)(_gamma_integrand_loop)
        chi_f = njit(cache=True)(_chi_f_loop)
        chi_p = njit(cache=True)(_chi_p_loop)
        USE_NUMBA = True
        BACKEND = "numba"
    except ImportError:
        gamma_integrand = _gamma_integrand
        chi_f = _chi_f
        chi_p = _chi_p
else:
    gamma_integrand = _gamma_integrand
    chi_f = _chi_f
    chi_p = _chi_p


def warmup() -> None:
    """Trigger JIT compilation of every kernel (no-op on the NumPy path)."""
    phi = np.zeros(2)
    u = np.array([-0.1, 0.1])
    c = np.array([0.9, 0.9])
    fmp = np.array([0.1 + 0.0j, 0.1 + 0.0j])
    gamma_integrand(phi, -0.01, 0.9, 1e-3, 1e-3, 6.0, 600.0, 600.0, 0.5, 0.99)
    chi_f(u, 1.0, 6.0, c, -c, 600.0, 600.0)
    chi_p(u, fmp, fmp, 0.05, 1.0, 6.0, c, -c, 600.0, 600.0)
