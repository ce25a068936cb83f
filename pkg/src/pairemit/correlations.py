"""Quadrature-path evaluation of the correlation functions and Q(r, theta).

The steady-state one-particle correlation is the Gram form

    gamma(2;1) = int d3k v_k^2 A_k(r1) A_k*(r2),

with the far-field emission amplitude

    A_k(r) = sqrt(pi/2) 2m T(p_k rhat, k) e^{i p_k r} / r,

the outgoing-wave residue of (2pi)^{-3/2} int d3p T e^{ip.r}/(eps_p + w_k - i0).

The pair amplitude reduces, after the same far-field treatment of both
emitted momenta, to a single energy-line integral per quasiparticle mode:

    chi = -(i Delta / (4 r1 r2)) int d3k m k(eps) { PV int du F(u) / (w^2-u^2) * 2w ...

concretely, with F(u) the pair energy-line function (kernels.chi_f) and
poles at u = -w (detector-1 partner on shell) and u = +w (exchange term),

    chi = -(i Delta / (4 r1 r2)) int d3k [ int P(u) du
            + (F(-w) L_- + F(+w) L_+ + i pi (F(-w) + F(+w))) / (2w) ],

where P is the pole-subtracted integrand (kernels.chi_p) and L_+- are the
principal-value logarithms of the truncated energy window.  The i pi terms
are the on-shell pair residues; the numerically evaluated principal value
carries the off-shell background (including the Fermi-surface stationary
phase responsible for the slow oscillatory decay of the bunching peak).
Both k-integrals run as nested adaptive quadrature over (eps_k, k-hat)
with Gaussian truncation of the angular caps.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .model import LAMBDA_F, MASS, EmitterParams, pole_momentum
from .quad import QuadResult, QuadSpec, integrate_1d, integrate_nested
from .specfun import principal_sqrt

__all__ = [
    "DetectorGeometry",
    "CorrelationResult",
    "NonConvergenceError",
    "UndefinedQError",
    "FAR_FIELD_KFR",
    "farfield_amplitude",
    "farfield_amplitude_direct",
    "gamma",
    "chi",
    "rho2_and_Q",
    "energy_cutoff",
]

FAR_FIELD_KFR = 50.0
CHI_SPREAD_MIN = 10.0

TWO_PI_M6 = (2.0 * math.pi) ** -6

# Gaussian-support truncations (energy windows, angular caps) cut where the
# form-factor weight is below e^-18; the bias bound enters err_est.
TRUNCATION_BIAS_REL = math.exp(-18.0)


class NonConvergenceError(RuntimeError):
    """Adaptive quadrature failed to meet its tolerance contract."""

    def __init__(self, msg: str, result: QuadResult | None = None):
        super().__init__(msg)
        self.result = result


class UndefinedQError(ZeroDivisionError):
    """One-particle density vanished; the normalized coincidence is undefined."""


@dataclass(frozen=True)
class DetectorGeometry:
    """Two detector positions, stored as 3-vectors in units of lambda_F."""

    r1_vec: tuple[float, float, float]
    r2_vec: tuple[float, float, float]

    @classmethod
    def from_r_theta(cls, r: float, theta: float) -> "DetectorGeometry":
        """Equal-radius reduction: both detectors at distance r (lambda_F),
        separated by the angle theta, in the x-z plane."""
        half = 0.5 * theta
        n1 = (math.sin(half), 0.0, math.cos(half))
        n2 = (-math.sin(half), 0.0, math.cos(half))
        return cls(tuple(r * c for c in n1), tuple(r * c for c in n2))

    @property
    def r1(self) -> float:
        return float(np.linalg.norm(self.r1_vec))

    @property
    def r2(self) -> float:
        return float(np.linalg.norm(self.r2_vec))

    @property
    def r1_kf(self) -> float:
        return self.r1 * LAMBDA_F

    @property
    def r2_kf(self) -> float:
        return self.r2 * LAMBDA_F

    @property
    def theta(self) -> float:
        n1 = np.asarray(self.r1_vec) / self.r1
        n2 = np.asarray(self.r2_vec) / self.r2
        return float(math.acos(max(-1.0, min(1.0, float(np.dot(n1, n2))))))

    @property
    def far_field(self) -> bool:
        return min(self.r1_kf, self.r2_kf) >= FAR_FIELD_KFR

    def swapped(self) -> "DetectorGeometry":
        return DetectorGeometry(self.r2_vec, self.r1_vec)

    def __post_init__(self):
        if self.r1 <= 0.0 or self.r2 <= 0.0:
            raise ValueError("detector distances must be positive")


@dataclass
class CorrelationResult:
    """All correlation quantities for one detector geometry."""

    gamma11: float
    gamma22: float
    gamma21: complex
    chi21: complex
    rho1_1: float
    rho1_2: float
    rho2: float
    Q: float
    regime_flags: dict = field(default_factory=dict)
    err_est: dict = field(default_factory=dict)
    converged: bool = True


def energy_cutoff(params: EmitterParams) -> float:
    """Half-width of the eps_k integration window.

    20 max(E_C, |Delta|) captures the tunneling-filter and coherence-factor
    tails; the window is additionally capped where the quasiparticle energy
    reaches the propagation band edge (omega(eps) -> mu), beyond which the
    far-field amplitude has no outgoing pole and the integrand vanishes
    identically.
    """
    ad = params.abs_delta
    cap = math.sqrt(max(0.95**2 - ad * ad, 1e-4))
    return min(20.0 * max(params.ec, ad), cap)


def _omega_cap(params: EmitterParams) -> float:
    """Quasiparticle energies at or above this value cannot emit (p_k imaginary)."""
    return 0.999999


def _default_spec() -> QuadSpec:
    return QuadSpec(rel_tol=1e-3, abs_tol=1e-300, max_depth=40)


# ---------------------------------------------------------------------------
# far-field amplitude and its brute-force oracle
# ---------------------------------------------------------------------------

def farfield_amplitude(k_vec: np.ndarray, r_vec: np.ndarray, omega_k: float,
                       params: EmitterParams) -> complex:
    """Outgoing-wave amplitude A_k(r) at detector position r (lambda_F units).

    A_k(r) = sqrt(pi/2) 2m h(p_k) g(p_k rhat - k) e^{i p_k r} / r with the
    emission momentum p_k pinned by the energy denominator pole.  k_vec is in
    k_F units.  Requires the far-field regime and omega_k < mu.
    """
    r_vec = np.asarray(r_vec, dtype=float) * LAMBDA_F
    k_vec = np.asarray(k_vec, dtype=float)
    r = float(np.linalg.norm(r_vec))
    if r < FAR_FIELD_KFR:
        warnings.warn(f"k_F r = {r:.1f} < {FAR_FIELD_KFR}: far-field form "
                      "not controlled", stacklevel=2)
    p_k = pole_momentum(omega_k, params)
    rhat = r_vec / r
    w = params.w_kf
    dq = p_k * rhat - k_vec
    g = TWO_PI_M6**0.5 * math.exp(-0.5 * float(np.dot(dq, dq)) * w * w)
    h = math.sqrt(p_k / MASS) * math.exp(-0.5 * omega_k / params.ec)
    return math.sqrt(math.pi / 2.0) * 2.0 * MASS * h * g \
        * cmath.exp(1j * p_k * r) / r


def farfield_amplitude_direct(k_vec: np.ndarray, r_vec: np.ndarray,
                              omega_k: float, params: EmitterParams,
                              spec: QuadSpec | None = None) -> complex:
    """Direct numerical evaluation of the defining 3D momentum integral.

    (2 pi)^{-3/2} int d3p T_pk e^{ip.r} / (eps_p + omega_k - i0): the angular
    integral is analytic (Gaussian times plane wave over the sphere), the
    radial integral is done by principal-value subtraction plus the on-shell
    residue.  Serves as the independent oracle for farfield_amplitude; it
    requires E_C w^2 > 1 (in Fermi units) for the radial integrand to decay.
    """
    spec = spec or QuadSpec(rel_tol=1e-7, abs_tol=1e-300, max_depth=48)
    r_vec = np.asarray(r_vec, dtype=float) * LAMBDA_F
    k_vec = np.asarray(k_vec, dtype=float)
    w = params.w_kf
    ec = params.ec
    if ec * w * w <= 1.2:
        raise ValueError("direct integral needs E_C w_kf^2 > 1.2 to converge")
    kmag = float(np.linalg.norm(k_vec))
    p_w = pole_momentum(omega_k, params)

    # angular part: int dOmega_p e^{p . c} = 4 pi sinh(p C)/(p C),
    # c = w^2 k + i r, C = sqrt(c.c)
    cvec = w * w * k_vec + 1j * r_vec
    C = principal_sqrt(complex(np.dot(cvec, cvec)))

    def g_smooth(p: np.ndarray) -> np.ndarray:
        p = np.asarray(p)
        h = np.sqrt(p / MASS) * np.exp(0.5 * (p * p - 1.0) / ec)
        gauss = np.exp(-0.5 * w * w * (p * p + kmag * kmag))
        pc = p * C
        sinhc = np.where(np.abs(pc) > 1e-12, np.sinh(pc) / np.where(pc == 0, 1, pc), 1.0)
        return p * p * h * gauss * 4.0 * math.pi * sinhc

    # truncate where the Gaussian-filter product is dead
    decay = 0.5 * w * w - 0.5 / ec
    p_cut = math.sqrt((40.0 + abs(C) * 0.0 + 0.5 * w * w * kmag * kmag) / decay) + kmag
    p_cut = max(p_cut, p_w + 1.0)

    g_pole = complex(g_smooth(np.array([p_w]))[0])

    def subtracted(p: np.ndarray) -> np.ndarray:
        return (g_smooth(p) - g_pole) / (p * p - p_w * p_w)

    res = integrate_1d(subtracted, 1e-12, p_cut, spec)
    if not res.converged:
        raise NonConvergenceError("farfield oracle radial integral", res)
    pv_log = math.log((p_cut - p_w) / (p_cut + p_w)) / (2.0 * p_w)
    total = res.value + g_pole * (pv_log + 1j * math.pi / (2.0 * p_w))
    return (2.0 * math.pi) ** -1.5 * TWO_PI_M6**0.5 * total


# ---------------------------------------------------------------------------
# geometry frame helpers
# ---------------------------------------------------------------------------

def _frame(geom: DetectorGeometry):
    """Unit vectors and half-angle cosines of the detector pair."""
    n1 = np.asarray(geom.r1_vec) / geom.r1
    n2 = np.asarray(geom.r2_vec) / geom.r2
    c = float(np.dot(n1, n2))
    c = max(-1.0, min(1.0, c))
    cth2 = math.sqrt(max(0.0, 0.5 * (1.0 + c)))   # cos(theta/2)
    sth2 = math.sqrt(max(0.0, 0.5 * (1.0 - c)))   # sin(theta/2)
    return n1, n2, cth2, sth2


def _gamma_cosa_window(params: EmitterParams, cth2: float) -> float:
    """Lower cos(alpha) truncation for the gamma angular cap (weight < e^-20)."""
    w2 = params.w_kf ** 2
    scale = 2.0 * w2 * cth2          # at p ~ k ~ 1
    if scale < 1.0:
        return -1.0
    return max(-1.0, 1.0 - 20.0 / scale)


# ---------------------------------------------------------------------------
# gamma
# ---------------------------------------------------------------------------

def _gamma_quad(geom: DetectorGeometry, params: EmitterParams,
                spec: QuadSpec, abs_floor: float = 0.0,
                ecut: float | None = None) -> QuadResult:
    _, _, cth2, _ = _frame(geom)
    r1 = geom.r1_kf
    r2 = geom.r2_kf
    dabs = params.abs_delta
    ec = params.ec
    w = params.w_kf
    ecut = energy_cutoff(params) if ecut is None else ecut
    ocap = _omega_cap(params)
    cosa_lo = _gamma_cosa_window(params, cth2)
    pref = (math.pi / 2.0) * TWO_PI_M6 / (r1 * r2) * 2.0   # phi parity doubling
    # translate an absolute tolerance on the final value into integrand units
    spec = QuadSpec(rel_tol=spec.rel_tol,
                    abs_tol=max(spec.abs_tol, abs_floor / pref),
                    max_depth=spec.max_depth,
                    max_intervals=spec.max_intervals)

    def f(eps, cosa, phis):
        return kernels.gamma_integrand(phis, eps, cosa, dabs, ec, w,
                                       r1, r2, cth2, ocap)

    total = QuadResult(0.0, 0.0, 0, True)
    for lo, hi in ((-ecut, 0.0), (0.0, ecut)):
        res = integrate_nested(f, [(lo, hi), (cosa_lo, 1.0), (0.0, math.pi)],
                               spec)
        total = total + res
    err = pref * total.err_est + TRUNCATION_BIAS_REL * abs(pref * total.value)
    return QuadResult(pref * total.value, err,
                      total.evaluations, total.converged, total.fail_dim)


def gamma(geom: DetectorGeometry, params: EmitterParams,
          spec: QuadSpec | None = None) -> complex:
    """One-particle correlation gamma(2;1) between the two detector points.

    Gram-kernel form: positive on the diagonal, Hermitian under swapping the
    detectors.  Raises NonConvergenceError if the quadrature contract fails.
    """
    if not geom.far_field:
        warnings.warn("geometry below the far-field threshold "
                      f"k_F r >= {FAR_FIELD_KFR}", stacklevel=2)
    res = _gamma_quad(geom, params, spec or _default_spec())
    if not res.converged:
        raise NonConvergenceError(
            f"gamma quadrature did not converge (dimension {res.fail_dim})", res)
    return res.value


# ---------------------------------------------------------------------------
# chi
# ---------------------------------------------------------------------------

def _chi_u_window(params: EmitterParams, k: float, omega: float
                  ) -> tuple[float, float] | None:
    """Energy-line truncation: where either pair Gaussian carries weight.

    The detector-1 branch needs sqrt(1+u) within ~6/w of k, the detector-2
    branch sqrt(1-u) likewise; the window spans both and always includes the
    on-shell poles +-omega (with margin) when it is nonempty.
    """
    w = params.w_kf
    pad = 6.0 / w
    lo_a = (max(k - pad, 0.0)) ** 2 - 1.0
    hi_a = (k + pad) ** 2 - 1.0
    lo_b = 1.0 - (k + pad) ** 2
    hi_b = 1.0 - (max(k - pad, 0.0)) ** 2
    lo = max(lo_a, lo_b)
    hi = min(hi_a, hi_b)
    if lo >= hi:
        return None     # the two Gaussians have no common support
    ulim = 1.0 - 1e-9
    lo = max(min(lo, -omega - 0.02), -ulim)
    hi = min(max(hi, omega + 0.02), ulim)
    if lo >= hi:
        return None
    return lo, hi


def _batched_pv_integral(omega, k, w, c1s, c2s, fm, fp, r1, r2,
                         edges, rel_tol, abs_tol, max_rounds=24,
                         max_intervals=3000):
    """Energy-line PV integral for a whole batch of k directions at once.

    Shared adaptive refinement: every azimuthal node of the batch is
    evaluated on the same interval set, and an interval is bisected when its
    worst per-direction error exceeds the cut.  One kernel call per round
    evaluates all (direction, node) pairs.  Returns per-direction values.
    """
    from .quad import _GAUSS_IDX, _WG, _WGK, _XGK
    nphi = len(c1s)

    def eval_intervals(ls, rs):
        ls = np.asarray(ls)
        rs = np.asarray(rs)
        c = 0.5 * (ls + rs)
        h = 0.5 * (rs - ls)
        us = (c[:, None] + h[:, None] * _XGK[None, :]).ravel()   # (nI*15,)
        n_nodes = us.size
        u_big = np.tile(us, nphi)
        c1_big = np.repeat(c1s, n_nodes)
        c2_big = np.repeat(c2s, n_nodes)
        fm_big = np.repeat(fm, n_nodes)
        fp_big = np.repeat(fp, n_nodes)
        vals = kernels.chi_p(u_big, fm_big, fp_big, omega, k, w,
                             c1_big, c2_big, r1, r2)
        fv = vals.reshape(nphi, len(ls), 15)
        k15 = (fv @ _WGK) * h[None, :]
        g7 = (fv[:, :, _GAUSS_IDX] @ _WG) * h[None, :]
        return k15, np.abs(k15 - g7)          # (nphi, nI)

    lefts = list(edges[:-1])
    rights = list(edges[1:])
    vals, errs = eval_intervals(lefts, rights)
    vals = [vals[:, i].copy() for i in range(len(lefts))]
    errs = [errs[:, i].copy() for i in range(len(lefts))]

    for _ in range(max_rounds):
        tot = np.sum(vals, axis=0)
        tot_err = np.sum(errs, axis=0)
        tol = np.maximum(abs_tol, rel_tol * np.abs(tot))
        if np.all(tot_err <= tol):
            return tot, float(np.max(tot_err)), True
        worst = np.array([np.max(e / tol) for e in errs])   # per interval
        cut = max(0.25 * worst.max(), 1.0 / (2.0 * len(lefts)))
        refine = [i for i, v in enumerate(worst) if v > cut]
        if not refine or len(lefts) + len(refine) > max_intervals:
            return tot, float(np.max(tot_err)), False
        new_l, new_r = [], []
        for i in refine:
            m = 0.5 * (lefts[i] + rights[i])
            new_l += [lefts[i], m]
            new_r += [m, rights[i]]
        nv, ne = eval_intervals(new_l, new_r)
        for j, i in enumerate(reversed(refine)):
            q = len(refine) - 1 - j
            m = 0.5 * (lefts[i] + rights[i])
            lefts[i:i + 1] = [lefts[i], m]
            rights[i:i + 1] = [m, rights[i]]
            vals[i:i + 1] = [nv[:, 2 * q].copy(), nv[:, 2 * q + 1].copy()]
            errs[i:i + 1] = [ne[:, 2 * q].copy(), ne[:, 2 * q + 1].copy()]
    tot = np.sum(vals, axis=0)
    return tot, float(np.max(np.sum(errs, axis=0))), False


def _chi_quad(geom: DetectorGeometry, params: EmitterParams,
              spec: QuadSpec, abs_floor: float = 0.0) -> QuadResult:
    n1, n2, cth2, sth2 = _frame(geom)
    r1 = geom.r1_kf
    r2 = geom.r2_kf
    dabs = params.abs_delta
    w = params.w_kf
    ecut = energy_cutoff(params)
    ocap = _omega_cap(params)

    # polar axis for the k-hat cap: along n1 - n2 (the back-to-back
    # direction); for near-coincident detectors any axis works
    diff = n1 - n2
    dn = float(np.linalg.norm(diff))
    # angular truncation from the cap width 1/(w k |v|), padded
    vmag0 = 2.0 if sth2 > 0.5 else max(dn, 0.05)
    cosa_lo = max(-1.0, 1.0 - min(2.0, 24.0 / (w * w * max(vmag0, 0.05))))

    pref = complex(params.delta) * (-0.25j) * TWO_PI_M6 / (r1 * r2) * 2.0
    spec = QuadSpec(rel_tol=spec.rel_tol,
                    abs_tol=max(spec.abs_tol, abs_floor / abs(pref)),
                    max_depth=spec.max_depth,
                    max_intervals=spec.max_intervals)
    # leaf tolerances: one order tighter than the innermost nested level
    leaf_rel = max(spec.rel_tol * 1e-3, 1e-12)

    def leaf(eps, cosa, phis):
        """Azimuthal node array -> energy-line integral values."""
        omega = math.sqrt(eps * eps + dabs * dabs)
        out = np.zeros(len(phis), dtype=np.complex128)
        if omega >= ocap or omega == 0.0:
            return out
        k = math.sqrt(1.0 + eps)
        win = _chi_u_window(params, k, omega)
        if win is None:
            return out
        u_lo, u_hi = win
        sina = math.sqrt(max(0.0, 1.0 - cosa * cosa))
        edges = sorted({u_lo, u_hi, *(x for x in (-omega, 0.0, omega)
                                      if u_lo < x < u_hi)})
        log_m = math.log(abs((u_hi + omega) / (u_lo + omega)))
        log_p = math.log(abs((omega - u_lo) / (omega - u_hi)))
        res_m = 1j * math.pi if u_lo < -omega < u_hi else 0.0
        res_p = 1j * math.pi if u_lo < omega < u_hi else 0.0

        # k-hat direction cosines for the whole azimuthal batch: axis along
        # n1 - n2, in-plane transverse along the bisector
        cosphi = np.cos(np.asarray(phis))
        c1s = sth2 * cosa + cth2 * sina * cosphi
        c2s = -sth2 * cosa + cth2 * sina * cosphi
        pm = np.array([-omega, omega])
        u2 = np.tile(pm, len(phis))
        fmp = kernels.chi_f(u2, k, w, np.repeat(c1s, 2), np.repeat(c2s, 2),
                            r1, r2).reshape(len(phis), 2)
        fm = np.ascontiguousarray(fmp[:, 0])
        fp = np.ascontiguousarray(fmp[:, 1])

        pv_vals, _, ok = _batched_pv_integral(
            omega, k, w, c1s, c2s, fm, fp, r1, r2, edges,
            leaf_rel, 1e-14)
        if not ok:
            raise NonConvergenceError("chi energy-line integral")
        analytic = (fm * (log_m + res_m) + fp * (log_p + res_p)) \
            / (2.0 * omega)
        out[:] = 0.5 * k * (pv_vals + analytic)    # m k(eps) measure
        return out

    total = QuadResult(0.0, 0.0, 0, True)
    for lo, hi in ((-ecut, 0.0), (0.0, ecut)):
        res = integrate_nested(
            leaf, [(lo, hi), (cosa_lo, 1.0), (0.0, math.pi)], spec)
        total = total + res
    err = abs(pref) * total.err_est \
        + TRUNCATION_BIAS_REL * abs(pref) * abs(total.value)
    return QuadResult(pref * total.value, err,
                      total.evaluations, total.converged, total.fail_dim)


def chi(geom: DetectorGeometry, params: EmitterParams,
        spec: QuadSpec | None = None) -> complex:
    """Equal-time pair amplitude chi(2;1).

    Proportional to the gap (exactly zero in the normal state) and symmetric
    under exchanging the two detectors.  Warns when the far-field /
    wave-packet-spreading regime conditions are not met.
    """
    if params.abs_delta == 0.0:
        return 0.0 + 0.0j
    r_min = min(geom.r1_kf, geom.r2_kf)
    if r_min < FAR_FIELD_KFR:
        warnings.warn(f"k_F r = {r_min:.1f} < {FAR_FIELD_KFR}: chi outside "
                      "its validated regime", stacklevel=2)
    spread = r_min / params.w_kf ** 2
    if spread < CHI_SPREAD_MIN:
        warnings.warn(f"r/(k_F w^2) = {spread:.1f} < {CHI_SPREAD_MIN}: chi "
                      "outside its validated regime", stacklevel=2)
    res = _chi_quad(geom, params, spec or _default_spec())
    if not res.converged:
        raise NonConvergenceError(
            f"chi quadrature did not converge (dimension {res.fail_dim})", res)
    return res.value


# ---------------------------------------------------------------------------
# assembly
# ---------------------------------------------------------------------------

def energy_cutoff_shift(geom: DetectorGeometry, params: EmitterParams,
                        spec: QuadSpec | None = None) -> float:
    """Relative shift of gamma_diag when the eps_k window is doubled.

    Automated convergence check of the cutoff choice; the contract is that
    doubling E_cut moves results by less than 1%.
    """
    spec = spec or _default_spec()
    base = _gamma_quad(geom, params, spec).value.real
    ecut2 = min(2.0 * energy_cutoff(params),
                math.sqrt(max(0.95**2 - params.abs_delta**2, 1e-4)))
    wide = _gamma_quad(geom, params, spec, ecut=ecut2).value.real
    return abs(wide - base) / abs(base)


def rho2_and_Q(geom: DetectorGeometry, params: EmitterParams,
               spec: QuadSpec | None = None) -> CorrelationResult:
    """Two-particle distribution and normalized coincidence for one geometry.

    rho2 = 4 g22 g11 - 2 |g21|^2 + 2 |chi21|^2,  Q = rho2 / (rho1(2) rho1(1))
    with rho1 = 2 gamma_diag.
    """
    spec = spec or _default_spec()
    diag1 = DetectorGeometry(geom.r1_vec, geom.r1_vec)
    diag2 = DetectorGeometry(geom.r2_vec, geom.r2_vec)

    res11 = _gamma_quad(diag1, params, spec)
    res22 = _gamma_quad(diag2, params, spec)
    g11 = res11.value.real
    g22 = res22.value.real
    if g11 <= 0.0 or g22 <= 0.0:
        raise UndefinedQError("one-particle density vanished; Q undefined")

    # off-diagonal pieces get an absolute floor tied to the diagonal scale,
    # so geometries where they are negligibly small converge quickly
    floor = 1e-8 * math.sqrt(g11 * g22)
    res21 = _gamma_quad(geom, params, spec, abs_floor=floor)
    g21 = res21.value

    chi_res = QuadResult(0.0, 0.0, 0, True)
    if params.abs_delta != 0.0:
        chi_res = _chi_quad(geom, params, spec, abs_floor=floor)
    x21 = chi_res.value

    converged = all(r.converged for r in (res11, res22, res21, chi_res))
    if not converged:
        raise NonConvergenceError("correlation quadrature did not converge")

    rho1_1 = 2.0 * g11
    rho1_2 = 2.0 * g22
    rho2 = 4.0 * g22 * g11 - 2.0 * abs(g21) ** 2 + 2.0 * abs(x21) ** 2
    q = rho2 / (rho1_1 * rho1_2)

    r_min = min(geom.r1_kf, geom.r2_kf)
    flags = {
        "far_field": geom.far_field,
        "chi_kfr_ok": r_min >= FAR_FIELD_KFR,
        "chi_spread_ok": r_min / params.w_kf ** 2 >= CHI_SPREAD_MIN,
    }
    errs = {
        "gamma11": res11.err_est,
        "gamma22": res22.err_est,
        "gamma21": res21.err_est,
        "chi21": chi_res.err_est,
    }
    return CorrelationResult(
        gamma11=g11, gamma22=g22, gamma21=g21, chi21=x21,
        rho1_1=rho1_1, rho1_2=rho1_2, rho2=rho2, Q=q,
        regime_flags=flags, err_est=errs, converged=converged,
    )
