"""Physical parameters, dispersion relations, BCS factors, tunneling form factors.

Unit convention (fixed throughout the package): hbar = 1, k_F = 1, mu = 1,
hence m = 1/2, lambda_F = 2 pi, and the normal-state dispersion is
eps_p = p^2 - 1.  All user-facing inputs are the dimensionless ratios
|Delta|/mu, E_C/mu, w/lambda_F, r/lambda_F; lengths are converted to k_F^-1
units internally (w_kf = 2 pi w, etc.).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "KF", "MU", "MASS", "LAMBDA_F",
    "EmitterParams", "DerivedParams", "QuasiparticleState",
    "OutOfBandError",
    "derive_params", "bogoliubov", "form_factors", "pole_momentum",
]

KF = 1.0
MU = 1.0
MASS = 0.5           # from k_F = sqrt(2 m mu) = 1 with mu = 1
LAMBDA_F = 2.0 * math.pi


class OutOfBandError(ValueError):
    """Quasiparticle energy at or above mu: no propagating emission pole."""


@dataclass(frozen=True)
class EmitterParams:
    """Physical inputs of the emitter, in dimensionless Fermi units.

    Parameters
    ----------
    delta
        Superconducting gap Delta, complex, in units of mu.  The phase is
        carried; every observable must be independent of it.
    ec
        Tunneling-filter energy scale E_C in units of mu.
    w
        Size of the emitting region in units of lambda_F.
    """

    delta: complex
    ec: float
    w: float

    def __post_init__(self):
        if not self.ec > 0.0:
            raise ValueError(f"E_C must be positive, got {self.ec}")
        if not self.w > 0.0:
            raise ValueError(f"w must be positive, got {self.w}")
        if abs(self.delta) >= MU:
            raise ValueError(
                f"weak-coupling guard requires |Delta| < mu, got {abs(self.delta)}"
            )

    @property
    def abs_delta(self) -> float:
        return abs(self.delta)

    @property
    def w_kf(self) -> float:
        """Emitting-region size in k_F^-1 units."""
        return self.w * LAMBDA_F


@dataclass(frozen=True)
class DerivedParams:
    """Derived scales.  xi is in k_F^-1 units; math.inf when Delta = 0."""

    xi: float
    lambda_f: float
    w_over_xi: float
    delta_over_ec: float

    @property
    def xi_over_lambda_f(self) -> float:
        return self.xi / self.lambda_f


@dataclass(frozen=True)
class QuasiparticleState:
    """Bogoliubov data for one normal-state energy eps_k."""

    eps_k: float
    omega_k: float
    ukvk: complex
    vk2: float


def derive_params(p: EmitterParams) -> DerivedParams:
    """Pippard length and convenience ratios.

    xi = k_F / (pi m |Delta|); Delta = 0 yields the infinite-xi sentinel.
    The identity xi/lambda_F = mu/(pi^2 |Delta|) holds by construction.
    """
    ad = p.abs_delta
    if ad == 0.0:
        xi = math.inf
        w_over_xi = 0.0
    else:
        xi = KF / (math.pi * MASS * ad)
        w_over_xi = p.w_kf / xi
    return DerivedParams(
        xi=xi,
        lambda_f=LAMBDA_F,
        w_over_xi=w_over_xi,
        delta_over_ec=ad / p.ec,
    )


def bogoliubov(eps_k: float, delta: complex) -> QuasiparticleState:
    """Quasiparticle energy and coherence factors at normal-state energy eps_k.

    omega_k = sqrt(eps_k^2 + |Delta|^2), u_k v_k = Delta / (2 omega_k), and
    v_k^2 = (1 - eps_k/omega_k)/2.  At the degenerate point Delta = 0,
    eps_k = 0 the convention is u_k v_k = 0, v_k^2 = 1/2 (step midpoint).
    """
    ad = abs(delta)
    omega = math.hypot(eps_k, ad)
    if omega == 0.0:
        return QuasiparticleState(eps_k=eps_k, omega_k=0.0, ukvk=0.0 + 0.0j,
                                  vk2=0.5)
    ukvk = complex(delta) / (2.0 * omega)
    vk2 = 0.5 * (1.0 - eps_k / omega)
    return QuasiparticleState(eps_k=eps_k, omega_k=omega, ukvk=ukvk, vk2=vk2)


def form_factors(p_vec: np.ndarray, k_vec: np.ndarray,
                 params: EmitterParams) -> tuple[float, float, float]:
    """Tunneling form factors g(p - k), h(p), and T = h(p) g(p - k).

    g(q) = (2 pi)^-3 exp(-q^2 w^2 / 2) with w in k_F^-1 units;
    h(p) = (|p|/m)^(1/2) exp(eps_p / 2 E_C).  Underflow to zero for large
    arguments is permitted.
    """
    p_vec = np.asarray(p_vec, dtype=float)
    k_vec = np.asarray(k_vec, dtype=float)
    pmag = float(np.linalg.norm(p_vec))
    if pmag <= 0.0:
        raise ValueError("h(p) requires |p| > 0")
    w = params.w_kf
    q2 = float(np.dot(p_vec - k_vec, p_vec - k_vec))
    g = (2.0 * math.pi) ** -3 * math.exp(-0.5 * q2 * w * w)
    eps_p = pmag * pmag - MU
    h = math.sqrt(pmag / MASS) * math.exp(0.5 * eps_p / params.ec)
    return g, h, h * g


def pole_momentum(omega_k: float, params: EmitterParams | None = None) -> float:
    """Emission momentum p_k = sqrt(2 m (mu - omega_k)) of the outgoing wave.

    Monotone decreasing in omega_k; raises OutOfBandError at or above mu
    where there is no propagating pole.
    """
    if omega_k < 0.0:
        raise ValueError("omega_k must be non-negative")
    if omega_k >= MU:
        raise OutOfBandError(
            f"omega_k = {omega_k} >= mu: no propagating emission pole"
        )
    return math.sqrt(2.0 * MASS * (MU - omega_k))
