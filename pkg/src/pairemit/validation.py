"""Acceptance-check registry shared by the CLI validate command and pytest.

Each check returns a CheckResult; the registry is ordered, and slow checks
(the quadrature-path ones, minutes each) are marked so callers can skip
them.  Tolerances here are frozen acceptance values, not tunables.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from typing import Callable

import numpy as np

from . import kernels
from .correlations import (DetectorGeometry, farfield_amplitude,
                           farfield_amplitude_direct, chi, rho2_and_Q)
from .entanglement import (Q_BELL_THRESHOLD, concurrence_from_density_matrix,
                           werner_decompose, werner_density_matrix)
from .model import EmitterParams, derive_params
from .peak import (DQ_BELL, DQ_ENTANGLEMENT, SweepSpec, delta_q_peak,
                   peak_envelope, threshold_map)
from .quad import QuadSpec, integrate_1d
from .specfun import (_hankel2_large, _j0y0_series, bessel_k1, hankel2_0)
from .correlations import CorrelationResult

__all__ = ["CheckResult", "CHECKS", "run_checks"]

# reference parameters: reconstruction of the figure regime
DELTA_FIG = 2.997e-3
PARAMS_FIG = EmitterParams(delta=DELTA_FIG, ec=DELTA_FIG, w=1.0)
R_FIG = 100.0


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str


def _load_goldens() -> list[tuple[str, complex, complex]]:
    rows = []
    text = resources.files("pairemit").joinpath("data/specfun_goldens.txt") \
        .read_text()
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        re_z, im_z, re_f, im_f, tag = [p.strip() for p in line.split(",")]
        rows.append((tag, complex(float(re_z), float(im_z)),
                     complex(float(re_f), float(im_f))))
    return rows


# ---------------------------------------------------------------------------
# 1. threshold algebra
# ---------------------------------------------------------------------------

def check_threshold_algebra() -> CheckResult:
    """With gamma21 = 0, p = (Q-1)/Q maps Q = 3/2 -> 1/3 and the Bell
    threshold to 1/sqrt(2), to 1e-12."""
    worst = 0.0
    for q_target, p_expect in ((1.5, 1.0 / 3.0),
                               (Q_BELL_THRESHOLD, 1.0 / math.sqrt(2.0))):
        # construct correlators with gamma21 = 0 and the requested Q
        g = 1.0
        chi2 = (q_target - 1.0) * 2.0 * g * g     # |chi|^2 from Q = 1 + chi2/(2 g g)
        corr = CorrelationResult(
            gamma11=g, gamma22=g, gamma21=0.0, chi21=math.sqrt(chi2),
            rho1_1=2 * g, rho1_2=2 * g,
            rho2=4 * g * g + 2 * chi2, Q=q_target)
        rep = werner_decompose(corr)
        worst = max(worst, abs(rep.p - p_expect))
        worst = max(worst, abs(rep.p - (corr.Q - 1.0) / corr.Q))
    ok = worst <= 1e-12
    return CheckResult("threshold_algebra", ok, f"max |p error| = {worst:.2e}")


def check_werner_oracle() -> CheckResult:
    """Concurrence formula vs direct two-qubit concurrence, 1000 random (a,b)."""
    rng = np.random.default_rng(20090422)
    worst = 0.0
    for _ in range(1000):
        a = rng.uniform(0.0, 1.0)
        b = rng.uniform(0.0, 3.0)
        if 4 * a + b <= 1e-12:
            continue
        p = b / (4 * a + b)
        formula = max(0.0, (3.0 * p - 1.0) / 2.0)
        direct = concurrence_from_density_matrix(werner_density_matrix(a, b))
        worst = max(worst, abs(formula - direct))
    ok = worst <= 1e-12
    return CheckResult("werner_oracle", ok, f"max |concurrence diff| = {worst:.2e}")


def check_specfun_goldens() -> CheckResult:
    """K1, J0, Y0, H0^(2) against the committed high-precision table."""
    worst = 0.0
    worst_tag = ""
    from .specfun import bessel_j0, bessel_y0
    for tag, z, ref in _load_goldens():
        if tag == "k1":
            got = complex(bessel_k1(z.real), 0.0)
        elif tag == "j0":
            got = bessel_j0(z).value
        elif tag == "y0":
            got = bessel_y0(z).value
        else:
            got = hankel2_0(z).value
        err = abs(got - ref) / abs(ref)
        if err > worst:
            worst, worst_tag = err, tag
    ok = worst <= 1e-10
    detail = f"worst rel err = {worst:.2e} ({worst_tag})"

    # series/large-argument overlap on the annulus |z| in [8, 12]
    overlap_worst = 0.0
    n = 40
    for i in range(n):
        r = 8.0 + 4.0 * i / (n - 1)
        a = -0.36 + 0.72 * ((i * 7) % n) / n
        z = r * complex(math.cos(a), math.sin(a))
        j0s, y0s = _j0y0_series(z)
        h2s = j0s - 1j * y0s
        h2l = _hankel2_large(z)
        overlap_worst = max(overlap_worst, abs(h2s - h2l) / abs(h2l))
    ok = ok and overlap_worst <= 1e-9
    return CheckResult("specfun_goldens", ok,
                       detail + f"; overlap = {overlap_worst:.2e}")


def check_quad_basics() -> CheckResult:
    """Elementary integrals with analytic values."""
    import numpy as _np
    cases = [
        (integrate_1d(lambda x: x * x, 0.0, 1.0).value.real, 1.0 / 3.0, 1e-10),
        (integrate_1d(lambda x: _np.exp(-x) * _np.cos(10 * x), 0.0, _np.inf,
                      QuadSpec(rel_tol=1e-9)).value.real, 1.0 / 101.0, 1e-6),
        (integrate_1d(lambda x: _np.exp(-x * x / 2.0), 0.0, _np.inf).value.real,
         math.sqrt(math.pi / 2.0), 1e-8),
    ]
    worst = max(abs(got - want) / abs(want) for got, want, _ in cases)
    ok = all(abs(got - want) / abs(want) <= tol for got, want, tol in cases)
    return CheckResult("quad_basics", ok, f"worst rel err = {worst:.2e}")


# ---------------------------------------------------------------------------
# quadrature-path checks (slow)
# ---------------------------------------------------------------------------

def check_normal_antibunching() -> CheckResult:
    """Normal state: Q -> 1/2 at coincident detectors, -> 1 when separated."""
    kernels.warmup()
    p0 = EmitterParams(delta=0.0, ec=DELTA_FIG, w=1.0)
    q_coinc = rho2_and_Q(DetectorGeometry.from_r_theta(R_FIG, 0.0), p0).Q
    q_close = rho2_and_Q(DetectorGeometry.from_r_theta(R_FIG, 0.01), p0).Q
    q_far = rho2_and_Q(DetectorGeometry.from_r_theta(R_FIG, math.pi / 2), p0).Q
    ok = abs(q_coinc - 0.5) <= 0.01 and abs(q_close - 0.5) <= 0.01 \
        and abs(q_far - 1.0) <= 0.02
    return CheckResult(
        "normal_antibunching", ok,
        f"Q(0) = {q_coinc:.4f}, Q(0.01) = {q_close:.4f}, "
        f"Q(pi/2) = {q_far:.4f}")


def check_chi_null_symmetry_phase() -> CheckResult:
    """chi = 0 at Delta = 0; detector-swap symmetry; gap-phase invariance."""
    kernels.warmup()
    geom = DetectorGeometry(
        tuple(np.array([0.6, 0.0, 0.8]) * 90.0),
        tuple(np.array([-0.595, 0.1, -0.79]) / np.linalg.norm([-0.595, 0.1, -0.79]) * 110.0),
    )
    p0 = EmitterParams(delta=0.0, ec=DELTA_FIG, w=1.0)
    x_null = chi(geom, p0)
    p1 = EmitterParams(delta=DELTA_FIG, ec=DELTA_FIG, w=1.0)
    x_a = chi(geom, p1)
    x_b = chi(geom.swapped(), p1)
    swap_err = abs(x_a - x_b) / max(abs(x_a), 1e-300)
    p2 = EmitterParams(delta=DELTA_FIG * np.exp(1.3j), ec=DELTA_FIG, w=1.0)
    x_c = chi(geom, p2)
    phase_err = abs(abs(x_c) - abs(x_a)) / abs(x_a)
    ok = x_null == 0.0 and swap_err <= 2e-2 and phase_err <= 1e-10
    return CheckResult(
        "chi_null_symmetry_phase", ok,
        f"chi(D=0) = {abs(x_null):.1e}, swap rel diff = {swap_err:.2e}, "
        f"phase rel diff = {phase_err:.2e}")


def check_farfield_oracle() -> CheckResult:
    """Far-field amplitude vs direct evaluation of its defining integral.

    Documented oracle configuration: k parallel to r, omega = 0.01 mu,
    r = 200 lambda_F, w = 0.55 lambda_F, E_C = 0.12 mu.  The leading
    far-field correction is the wavefront curvature across the source,
    ~ w^2 k_F / r (0.9% here); E_C w_kf^2 = 1.4 > 1 keeps the defining
    integral convergent so the direct evaluation exists at all.
    """
    params = EmitterParams(delta=DELTA_FIG, ec=0.12, w=0.55)
    omega = 0.01
    r_vec = np.array([0.0, 0.0, 200.0])            # lambda_F units
    from .model import pole_momentum
    k_vec = np.array([0.0, 0.0, pole_momentum(omega, params)])
    a_far = farfield_amplitude(k_vec, r_vec, omega, params)
    a_dir = farfield_amplitude_direct(k_vec, r_vec, omega, params)
    err = abs(a_far - a_dir) / abs(a_dir)
    ok = err <= 0.02
    return CheckResult("farfield_oracle", ok,
                       f"relative difference = {err:.3e} (<= 2e-2)")


def check_peak_cross_validation() -> CheckResult:
    """Quadrature-path Q(r, pi) vs the closed-form 1 + dQ, within 25%.

    Documented configuration: |Delta|/mu = 2.997e-3 (xi = 33.8 lambda_F),
    E_C = |Delta|, w = lambda_F, r = 100 lambda_F; deep in all three regime
    conditions (k_F r = 628, mu/E_C = 334, r/k_F w^2 = 15.9).
    """
    kernels.warmup()
    res = rho2_and_Q(DetectorGeometry.from_r_theta(R_FIG, math.pi),
                     PARAMS_FIG)
    closed = delta_q_peak(PARAMS_FIG, R_FIG).delta_q
    ratio = res.Q / (1.0 + closed)
    ok = abs(ratio - 1.0) <= 0.25
    return CheckResult(
        "peak_cross_validation", ok,
        f"Q_quad = {res.Q:.3f}, 1+dQ_closed = {1 + closed:.3f}, "
        f"ratio = {ratio:.3f}")


# ---------------------------------------------------------------------------
# closed-form checks
# ---------------------------------------------------------------------------

def check_decay_law() -> CheckResult:
    """Power-law fit of the peak envelope over r in [10, 100] k_F xi^2.

    The envelope is the smooth curve through the oscillation maxima of
    dQ(r) (peak_envelope); the test also verifies that it genuinely bounds
    and touches the oscillating dQ samples.
    """
    xi = derive_params(PARAMS_FIG).xi
    kxi2_lf = xi * xi / (2.0 * math.pi)        # k_F xi^2 in lambda_F units
    rs = np.geomspace(10.0 * kxi2_lf, 100.0 * kxi2_lf, 200)
    env = np.array([peak_envelope(PARAMS_FIG, r) for r in rs])
    slope = float(np.polyfit(np.log(rs), np.log(env), 1)[0])
    rs_d = np.geomspace(10.0 * kxi2_lf, 100.0 * kxi2_lf, 1500)
    ratio = np.array([delta_q_peak(PARAMS_FIG, r).delta_q /
                      peak_envelope(PARAMS_FIG, r) for r in rs_d])
    is_envelope = bool(np.max(ratio) <= 1.0 + 1e-9) and np.max(ratio) > 0.95
    ok = abs(slope - (-1.0)) <= 0.15 and is_envelope
    return CheckResult("decay_law", ok,
                       f"envelope exponent = {slope:.3f} (want -1.0 +- 0.15); "
                       f"envelope bounds and touches dQ: {is_envelope}")


def check_decay_law_asymptotic() -> CheckResult:
    """Companion diagnostic: the same fit where the Hankel asymptotics hold.

    Window chosen so the Hankel argument spans [10, 100] (i.e. r in
    [10, 100] * 2 pi^2 k_F xi^2); this is where the stated 1/r decay is an
    asymptotic statement.
    """
    xi = derive_params(PARAMS_FIG).xi
    scale_lf = 2.0 * math.pi ** 2 * xi * xi / (2.0 * math.pi)
    rs = np.geomspace(10.0 * scale_lf, 100.0 * scale_lf, 200)
    env = np.array([peak_envelope(PARAMS_FIG, r) for r in rs])
    slope = float(np.polyfit(np.log(rs), np.log(env), 1)[0])
    ok = abs(slope - (-1.0)) <= 0.15
    return CheckResult("decay_law_asymptotic", ok,
                       f"envelope exponent = {slope:.3f} (want -1.0 +- 0.15)")


def check_angular_envelope() -> CheckResult:
    """Small-angle e^{-1/2} point at dtheta = 1/(k_F w); monotone falloff."""
    w = PARAMS_FIG.w_kf
    dtheta = 1.0 / w
    small_angle = math.exp(-8.0 * w * w * (dtheta / 4.0) ** 2)
    err = abs(small_angle - math.exp(-0.5))
    thetas = np.linspace(math.pi, math.pi / 2, 200)
    from .peak import angular_profile
    vals = [angular_profile(t, PARAMS_FIG) for t in thetas]
    monotone = all(v1 >= v2 for v1, v2 in zip(vals, vals[1:]))
    ok = err <= 1e-12 and monotone
    return CheckResult("angular_envelope", ok,
                       f"|env - e^-1/2| = {err:.2e}, monotone = {monotone}")


def check_fig3_shapes() -> CheckResult:
    """Shape suite of the threshold maps (closed form)."""
    base = PARAMS_FIG
    msgs = []
    ok = True

    # E_C halving strictly increases dQ
    dq0 = delta_q_peak(base, R_FIG).delta_q
    dq_half = delta_q_peak(EmitterParams(base.delta, base.ec / 2, base.w),
                           R_FIG).delta_q
    cond = dq_half > dq0
    ok &= cond
    msgs.append(f"EC halving: {dq0:.3f} -> {dq_half:.3f}")

    # nondecreasing in |Delta| over the weak-gap window
    spec = SweepSpec(base=base, r=R_FIG, param="delta",
                     grid=tuple(np.geomspace(1e-4, 1e-2, 40)))
    res = threshold_map(spec)
    mono = bool(np.all(np.diff(res.delta_q) >= -1e-12))
    ok &= mono
    msgs.append(f"delta monotone: {mono}")

    # crossings of both thresholds located by bisection
    has_both = len(res.crossings["entangled"]) >= 1 \
        and len(res.crossings["bell"]) >= 1
    ok &= has_both
    if has_both:
        c_e = res.crossings["entangled"][0]
        c_b = res.crossings["bell"][0]
        a = delta_q_peak(EmitterParams(c_e, base.ec, base.w), R_FIG).delta_q
        b = delta_q_peak(EmitterParams(c_b, base.ec, base.w), R_FIG).delta_q
        tight = abs(a - DQ_ENTANGLEMENT) <= 1e-4 * DQ_ENTANGLEMENT * 10 \
            and abs(b - DQ_BELL) <= 1e-4 * DQ_BELL * 10
        ok &= tight
        msgs.append(f"crossings at |D| = {c_e:.5e} (dQ = {a:.6f}), "
                    f"{c_b:.5e} (dQ = {b:.6f})")
    else:
        msgs.append("missing threshold crossing")

    # r-panel oscillations below the entanglement threshold at large r
    xi = derive_params(base).xi
    scale_lf = 2.0 * math.pi ** 2 * xi * xi / (2.0 * math.pi)
    rs = np.geomspace(10.0 * scale_lf, 100.0 * scale_lf, 1200)
    dq = np.array([delta_q_peak(base, r).delta_q for r in rs])
    n_max = sum(1 for i in range(1, len(dq) - 1)
                if dq[i] > dq[i - 1] and dq[i] > dq[i + 1])
    below = bool(np.all(dq < DQ_ENTANGLEMENT))
    ok &= (n_max >= 3) and below
    msgs.append(f"r-panel: {n_max} maxima, below threshold = {below}")
    return CheckResult("fig3_shapes", bool(ok), "; ".join(msgs))


_SLOW = {"normal_antibunching", "chi_null_symmetry_phase", "farfield_oracle",
         "peak_cross_validation"}

CHECKS: list[tuple[str, Callable[[], CheckResult]]] = [
    ("threshold_algebra", check_threshold_algebra),
    ("werner_oracle", check_werner_oracle),
    ("specfun_goldens", check_specfun_goldens),
    ("quad_basics", check_quad_basics),
    ("normal_antibunching", check_normal_antibunching),
    ("chi_null_symmetry_phase", check_chi_null_symmetry_phase),
    ("farfield_oracle", check_farfield_oracle),
    ("peak_cross_validation", check_peak_cross_validation),
    ("decay_law", check_decay_law),
    ("decay_law_asymptotic", check_decay_law_asymptotic),
    ("angular_envelope", check_angular_envelope),
    ("fig3_shapes", check_fig3_shapes),
]


def run_checks(skip_slow: bool = False) -> list[CheckResult]:
    results = []
    for name, fn in CHECKS:
        if skip_slow and name in _SLOW:
            continue
        try:
            res = fn()
            results.append(CheckResult(res.name, bool(res.passed),
                                       str(res.detail)))
        except Exception as exc:            # a crashed check is a failure
            results.append(CheckResult(name, False, f"raised {exc!r}"))
    return results
