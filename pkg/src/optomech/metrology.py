"""Fisher-information metrology for the decoupled dynamics.

The generator of parameter changes, -i U^dag dU/dtheta, lives in the same
Lie algebra as the Hamiltonian; its ten real coefficients are assembled
from the F- and J-coefficients and their parameter derivatives. The
quantum Fisher information then follows for coherent, thermal-mechanical
and Fock-superposition inputs, with closed forms for the worked estimation
schemes. A homodyne classical Fisher information (double Fock sum with a
quadrature integral) complements the bound, and the dimensionful layer
turns everything into gravimetric and force sensitivities.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .coefficients import (CatalogMiss, FSet, f_closed_form, f_integrated,
                           f_small_d2_constant, f_small_d2_resonant)
from .mechanics import JSet, j_coefficients_ode, solve_subsystem
from .oracle import coherent_amplitudes
from .params import (Drive, ModelSpec, PhysicalSetup, coupling_constant,
                     oscillator_mass)

D2_VALIDITY = 0.2
TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class QfiCoefficients:
    """Coefficients of the estimation generator on the Lie-algebra basis.

    c_e and c_k drop out of every Fisher information; they are carried for
    ledger completeness only.
    """

    c_a: float
    c_b: float
    c_cp: float
    c_cm: float
    c_cnp: float
    c_cnm: float
    c_e: float
    c_f: float
    c_g: float
    c_k: float


def _assemble_coefficients(tau: float, f: FSet, df: FSet, j: JSet,
                           dj: JSet) -> QfiCoefficients:
    """Generator coefficients from F/J values and their theta-derivatives."""
    r0 = 2.0 * dj.j_minus - math.sinh(4.0 * j.j_plus) * dj.j_b
    rp = 2.0 * dj.j_plus - math.cosh(4.0 * j.j_plus) * dj.j_b
    rm = 2.0 * dj.j_plus + math.cosh(4.0 * j.j_plus) * dj.j_b
    em = math.exp(-4.0 * j.j_minus)
    ep = math.exp(4.0 * j.j_minus)

    c_a = (-df.f_na2 - 2.0 * f.f_nabm * df.f_nabp
           + 2.0 * f.f_nabm * f.f_nabp * r0
           + em * f.f_nabp ** 2 * rp - ep * f.f_nabm ** 2 * rm)
    c_b = (-df.f_na - 2.0 * f.f_bm * df.f_nabp - 2.0 * f.f_nabm * df.f_bp
           + 2.0 * (f.f_bp * f.f_nabm + f.f_bm * f.f_nabp) * r0
           + 2.0 * em * f.f_bp * f.f_nabp * rp
           - 2.0 * ep * f.f_bm * f.f_nabm * rm)
    c_cp = -df.f_bp + f.f_bp * r0 - ep * f.f_bm * rm
    c_cm = -df.f_bm - f.f_bm * r0 - em * f.f_bp * rp
    c_cnp = -df.f_nabp + f.f_nabp * r0 - ep * f.f_nabm * rm
    c_cnm = -df.f_nabm - f.f_nabm * r0 - em * f.f_nabp * rp
    c_e = -(ep * rm - em * rp) / 2.0
    c_f = -(ep * rm + em * rp) / 4.0
    c_g = -r0 / 2.0
    c_k = (-2.0 * f.f_bm * df.f_bp + 2.0 * f.f_bm * f.f_bp * r0
           + em * f.f_bp ** 2 * rp - ep * f.f_bm ** 2 * rm
           + dj.j_b / 2.0 + c_e / 2.0)
    return QfiCoefficients(c_a=c_a, c_b=c_b, c_cp=c_cp, c_cm=c_cm,
                           c_cnp=c_cnp, c_cnm=c_cnm, c_e=c_e, c_f=c_f,
                           c_g=c_g, c_k=c_k)


_PARAM_IDS = ("g0", "epsilon", "d1", "d2", "omega_g", "omega_d1", "omega_d2")


def _with_param(spec: ModelSpec, name: str, value: float) -> ModelSpec:
    g, d1, d2 = spec.coupling, spec.displacement, spec.squeezing
    if name == "g0":
        g = Drive(value, g.offset, g.frequency, g.phase)
    elif name == "epsilon":
        g = Drive(g.amplitude, value, g.frequency, g.phase)
    elif name == "omega_g":
        g = Drive(g.amplitude, g.offset, value, g.phase)
    elif name == "d1":
        d1 = Drive(value, d1.offset, d1.frequency, d1.phase)
    elif name == "omega_d1":
        d1 = Drive(d1.amplitude, d1.offset, value, d1.phase)
    elif name == "d2":
        d2 = Drive(value, d2.offset, d2.frequency, d2.phase)
    elif name == "omega_d2":
        d2 = Drive(d2.amplitude, d2.offset, value, d2.phase)
    else:
        raise ValueError(f"unknown parameter id {name!r}; expected one of {_PARAM_IDS}")
    return ModelSpec(omega_c_ratio=spec.omega_c_ratio, coupling=g,
                     displacement=d1, squeezing=d2)


def _param_value(spec: ModelSpec, name: str) -> float:
    return {
        "g0": spec.coupling.amplitude, "epsilon": spec.coupling.offset,
        "omega_g": spec.coupling.frequency,
        "d1": spec.displacement.amplitude, "omega_d1": spec.displacement.frequency,
        "d2": spec.squeezing.amplitude, "omega_d2": spec.squeezing.frequency,
    }[name]


def _f_and_j(spec: ModelSpec, tau: float):
    d2 = spec.squeezing
    if d2.is_zero:
        j = JSet(j_b=tau, j_plus=0.0, j_minus=0.0)
    else:
        j = j_coefficients_ode(spec, tau)
    try:
        f = f_closed_form(spec, tau)
    except CatalogMiss:
        f = f_integrated(spec, solve_subsystem(spec, max(tau, 1e-9)), tau)
    return f, j


def _analytic_derivatives(spec: ModelSpec, name: str, tau: float):
    """(F, dF/dtheta, J, dJ/dtheta) from the catalog structure.

    g0 and d1 enter the exact coefficients homogeneously and epsilon
    polynomially, so the derivatives follow from catalog evaluations.
    Squeezing-strength estimation uses the small-d2 ledger of the worked
    schemes (constant or parametric-resonant modulation).
    """
    g, d1dr, d2dr = spec.coupling, spec.displacement, spec.squeezing
    zero = JSet(0.0, 0.0, 0.0)

    if name == "d2":
        g0 = g.amplitude
        d2 = d2dr.amplitude
        if not (g.is_constant and d1dr.is_zero):
            raise ValueError("analytic d2 estimation needs a constant coupling "
                             "and no displacement")
        if abs(d2) > D2_VALIDITY:
            warnings.warn(f"|d2| = {abs(d2)} exceeds the small-d2 validity "
                          f"bound {D2_VALIDITY}; treat results as indicative",
                          stacklevel=3)
        if d2dr.is_constant:
            sigma = 1.0 + 2.0 * d2
            f = f_small_d2_constant(g0, d2, tau)
            df = FSet(f_na=0.0,
                      f_na2=-2.0 * g0 ** 2 * tau * (1.0 - math.cos(2.0 * sigma * tau)),
                      f_bp=0.0, f_bm=0.0,
                      f_nabp=-2.0 * g0 * tau * math.cos(sigma * tau),
                      f_nabm=-2.0 * g0 * tau * math.sin(sigma * tau))
            j = JSet(j_b=sigma * tau, j_plus=0.0, j_minus=0.0)
            dj = JSet(j_b=2.0 * tau, j_plus=0.0, j_minus=0.0)
            return f, df, j, dj
        if d2dr.frequency == 2.0 and d2dr.phase == "cos":
            ch, sh = math.cosh(d2 * tau), math.sinh(d2 * tau)
            c, s = math.cos(tau), math.sin(tau)
            f = f_small_d2_resonant(g0, d2, tau)
            df = FSet(f_na=0.0,
                      f_na2=g0 ** 2 * tau * (math.sinh(2 * d2 * tau) * math.sin(2 * tau)
                                             + math.cosh(2 * d2 * tau)),
                      f_bp=0.0, f_bm=0.0,
                      f_nabp=-g0 * tau * (sh * s + ch * c),
                      f_nabm=g0 * tau * (sh * c + ch * s))
            j = JSet(j_b=tau, j_plus=0.5 * d2 * tau, j_minus=0.0)
            dj = JSet(j_b=0.0, j_plus=0.5 * tau, j_minus=0.0)
            return f, df, j, dj
        raise ValueError("analytic d2 estimation covers constant or "
                         "parametric-resonant (frequency 2) modulation only")

    if not d2dr.is_zero:
        raise ValueError("analytic derivatives with a squeezing term are only "
                         "available for the d2 parameter; use finite differences")
    j = JSet(j_b=tau, j_plus=0.0, j_minus=0.0)
    f = f_closed_form(spec, tau)

    if name == "g0":
        unit = f_closed_form(_with_param(spec, "g0", 1.0), tau)
        g0 = g.amplitude
        df = FSet(f_na=unit.f_na, f_na2=2.0 * g0 * unit.f_na2,
                  f_bp=0.0, f_bm=0.0,
                  f_nabp=unit.f_nabp, f_nabm=unit.f_nabm)
        return f, df, j, zero
    if name == "d1":
        unit = f_closed_form(_with_param(spec, "d1", 1.0), tau)
        df = FSet(f_na=unit.f_na, f_na2=0.0,
                  f_bp=unit.f_bp, f_bm=unit.f_bm, f_nabp=0.0, f_nabm=0.0)
        return f, df, j, zero
    if name == "epsilon":
        # F_NaB+- are linear and F_Na2 quadratic in epsilon: differentiate
        # the polynomial through three catalog evaluations.
        eps = g.offset
        f0 = f_closed_form(_with_param(spec, "epsilon", 0.0), tau).as_array()
        fp = f_closed_form(_with_param(spec, "epsilon", 1.0), tau).as_array()
        fm = f_closed_form(_with_param(spec, "epsilon", -1.0), tau).as_array()
        lin = 0.5 * (fp - fm)
        quad = 0.5 * (fp + fm - 2.0 * f0)
        darr = lin + 2.0 * eps * quad
        df = FSet(*darr)
        return f, df, j, zero
    raise ValueError(f"no analytic derivative route for parameter {name!r}")


def _finite_diff_derivatives(spec: ModelSpec, name: str, tau: float):
    """Central differences with one Richardson refinement on the F/J paths."""
    theta = _param_value(spec, name)
    h = 1e-6 * max(1.0, abs(theta))

    def f_j(value: float):
        pert = _with_param(spec, name, value)
        return _f_and_j(pert, tau)

    def diff(step: float):
        f_hi, j_hi = f_j(theta + step)
        f_lo, j_lo = f_j(theta - step)
        darr = (f_hi.as_array() - f_lo.as_array()) / (2.0 * step)
        djay = np.array([j_hi.j_b - j_lo.j_b, j_hi.j_plus - j_lo.j_plus,
                         j_hi.j_minus - j_lo.j_minus]) / (2.0 * step)
        return darr, djay

    d1, dj1 = diff(h)
    d2_, dj2 = diff(h / 2.0)
    darr = (4.0 * d2_ - d1) / 3.0
    djay = (4.0 * dj2 - dj1) / 3.0
    f, j = _f_and_j(spec, tau)
    return f, FSet(*darr), j, JSet(*djay)


def qfi_coefficients(spec: ModelSpec, theta_param: str, tau: float,
                     mode: str = "analytic") -> QfiCoefficients:
    """Generator coefficients for estimating ``theta_param`` at time tau.

    ``mode='analytic'`` differentiates the closed-form F/J ledgers
    (available for g0, epsilon, d1 and the worked small-d2 schemes);
    ``mode='finite_diff'`` differentiates the generic paths numerically and
    works for any parameter id, including drive frequencies.
    """
    if theta_param not in _PARAM_IDS:
        raise ValueError(f"unknown parameter id {theta_param!r}; "
                         f"expected one of {_PARAM_IDS}")
    tau = float(tau)
    if mode == "analytic":
        f, df, j, dj = _analytic_derivatives(spec, theta_param, tau)
    elif mode == "finite_diff":
        f, df, j, dj = _finite_diff_derivatives(spec, theta_param, tau)
    else:
        raise ValueError("mode must be 'analytic' or 'finite_diff'")
    return _assemble_coefficients(tau, f, df, j, dj)


# ---------------------------------------------------------------------------
# Fisher information from the coefficients
# ---------------------------------------------------------------------------


def qfi_thermal(coeffs: QfiCoefficients, mu_c: complex, r_T: float = 0.0) -> float:
    """QFI for a coherent optical and thermal mechanical input."""
    if r_T < 0:
        raise ValueError("r_T must be >= 0")
    nc = abs(complex(mu_c)) ** 2
    ch = math.cosh(2.0 * r_T)
    a, b = coeffs.c_a, coeffs.c_b
    quad = ((4.0 * nc ** 3 + 6.0 * nc ** 2 + nc) * a ** 2
            + (4.0 * nc ** 2 + 2.0 * nc) * a * b + nc * b ** 2)
    cn_sq = coeffs.c_cnp ** 2 + coeffs.c_cnm ** 2
    mixed = ((coeffs.c_cp + coeffs.c_cnp * nc) ** 2
             + (coeffs.c_cm + coeffs.c_cnm * nc) ** 2)
    sq = coeffs.c_f ** 2 + coeffs.c_g ** 2
    return 4.0 * (quad + ch * cn_sq * nc + mixed / ch
                  + 4.0 * ch ** 2 / (ch ** 2 + 1.0) * sq)


def qfi_coherent(c_b: float, c_cp: float, c_cm: float, mu_c: complex) -> float:
    """QFI for coherent x coherent input and a displacement-type generator."""
    return 4.0 * (c_b ** 2 * abs(complex(mu_c)) ** 2 + c_cp ** 2 + c_cm ** 2)


def qfi_fock(c_b: float, c_cp: float, c_cm: float, n: int) -> float:
    """QFI for the (|0> + |n>)/sqrt2 optical input, displacement generator."""
    return n ** 2 * c_b ** 2 + 4.0 * (c_cp ** 2 + c_cm ** 2)


# ---------------------------------------------------------------------------
# closed-form catalog
# ---------------------------------------------------------------------------


def qfi_closed_form(case: str, tau: float, g0: float = 0.0, epsilon: float = 0.0,
                    omega: float = 0.0, n_photons: float = 0.0,
                    r_T: float = 0.0) -> float:
    """Worked closed-form QFI expressions.

    Cases: ``g0-general-omega``, ``g0-resonant``, ``g0-resonant-asymptotic``,
    ``d1-general-omega``, ``d1-constant``, ``d1-resonant``,
    ``d2-constant-approx``, ``d2-resonant-approx``. ``n_photons`` is
    |mu_c|^2 and ``omega`` the relevant modulation frequency.
    """
    nc = float(n_photons)
    ch = math.cosh(2.0 * r_T)
    s, c = math.sin(tau), math.cos(tau)

    if case == "g0-general-omega":
        w, e = omega, epsilon
        sw, cw = math.sin(w * tau), math.cos(w * tau)
        big = (2.0 * tau * w ** 5 - 4.0 * tau * w ** 3 + 2.0 * tau * w
               - tau * w ** 3 * e ** 2 + 0.5 * w ** 2 * e ** 2 * math.sin(2 * w * tau)
               + 2.0 * w ** 2 * e ** 2 * c * sw + tau * w * e ** 2
               - 4.0 * w ** 4 * e * c * math.sin(w * tau / 2.0) ** 2
               - 2.0 * (w ** 2 - 1.0) * w * s * (w ** 2 - e * sw - 1.0)
               + 4.0 * w ** 2 * e * c * math.sin(w * tau / 2.0) ** 2
               - e * cw * (2.0 * w ** 3 * e * s + e * sw
                           + 2.0 * w ** 4 - 6.0 * w ** 2 + 4.0)
               + 2.0 * w ** 4 * e - 6.0 * w ** 2 * e + 4.0 * e)
        first = (4.0 * g0 ** 2 / (w ** 2 * (1.0 - w ** 2) ** 4)
                 * nc * (4.0 * nc ** 2 + 6.0 * nc + 1.0) * big ** 2)
        cnm = (1.0 - c - e * (w * cw * s - c * sw) / (w ** 2 - 1.0))
        cnp = (s + e * (w * (1.0 - c * cw) - s * sw) / (w ** 2 - 1.0))
        second = (4.0 * nc * ch * (1.0 + nc / ch ** 2) * (cnm ** 2 + cnp ** 2))
        return first + second

    if case == "g0-resonant":
        e = epsilon
        s2, c2 = math.sin(2.0 * tau), math.cos(2.0 * tau)
        bracket = (4.0 * tau * e ** 2 - 3.0 * e ** 2 * s2 - 8.0 * tau * e * s
                   - 32.0 * e * c + 2.0 * e * (tau * e + 2.0) * c2
                   + 16.0 * tau - 16.0 * s + 28.0 * e)
        first = g0 ** 2 * (4.0 * nc ** 2 + 6.0 * nc + 1.0) * bracket ** 2
        second = (16.0 * ch * (nc / ch ** 2 + 1.0)
                  * (s ** 2 * (e * s + 2.0) ** 2
                     + (tau * e - c * (e * s + 2.0) + 2.0) ** 2))
        return nc / 16.0 * (first + second)

    if case == "g0-resonant-asymptotic":
        return 16.0 * g0 ** 2 * tau ** 2 * nc * (4.0 * nc ** 2 + 6.0 * nc + 1.0)

    if case == "d1-general-omega":
        w = omega
        sw, cw = math.sin(w * tau), math.cos(w * tau)
        first = 4.0 * g0 ** 2 * nc * (sw * (w ** 2 * (1.0 - c) - 1.0)
                                      + w * s * cw) ** 2
        second = (w ** 2 / (2.0 * ch)
                  * (3.0 - (w ** 2 - 1.0) * math.cos(2.0 * w * tau)
                     - 4.0 * w * s * sw - 4.0 * c * cw + w ** 2))
        return 4.0 / (w ** 2 * (1.0 - w ** 2) ** 2) * (first + second)

    if case == "d1-constant":
        return 16.0 * (g0 ** 2 * nc * (tau - s) ** 2
                       + math.sin(tau / 2.0) ** 2 / ch)

    if case == "d1-resonant":
        return (4.0 * g0 ** 2 * nc * (tau + s * (c - 2.0)) ** 2
                + (tau ** 2 + 2.0 * tau * s * c + s ** 2) / ch)

    if case == "d2-constant-approx":
        return 16.0 * g0 ** 2 * tau ** 2 * nc * (nc + ch ** 2) / ch

    if case == "d2-resonant-approx":
        return 4.0 * tau ** 2 * (g0 ** 4 * (4.0 * nc ** 3 + 6.0 * nc ** 2 + nc)
                                 + g0 ** 2 * nc * (nc + ch ** 2) / ch
                                 + ch ** 2 / (ch ** 2 + 1.0))

    raise ValueError(f"unknown closed-form case {case!r}")


# ---------------------------------------------------------------------------
# homodyne classical Fisher information
# ---------------------------------------------------------------------------


def default_n_max(mu_c: complex) -> int:
    nc = abs(complex(mu_c)) ** 2
    return int(math.ceil(nc + 10.0 * math.sqrt(nc) + 20.0))


def cfi_homodyne(g0: float, d1: float, mu_c: complex, mu_m: complex,
                 lam: float, tau: float, n_max: int | None = None) -> float:
    """Classical Fisher information of a homodyne quadrature measurement.

    Constant drives without squeezing; the traced-out cavity state is
    measured in the quadrature x_lambda = (a e^{-i lam} + a^dag e^{i lam})
    / sqrt2. Equals the coherent-input QFI at tau = 2 pi for integer g0,
    d1 and a matched quadrature angle.
    """
    mu_c, mu_m = complex(mu_c), complex(mu_m)
    if n_max is None:
        n_max = default_n_max(mu_c)
    nc = abs(mu_c) ** 2
    tail = 1.0 - sum(abs(x) ** 2 for x in coherent_amplitudes(mu_c, n_max))
    if tail > 1e-10:
        warnings.warn(f"photon tail mass {tail:.2e} beyond n_max={n_max} "
                      "exceeds 1e-10; increase n_max", stacklevel=2)

    n = np.arange(n_max)
    eta = 1.0 - cmath.exp(-1j * tau)
    phi = mu_m * cmath.exp(-1j * tau) + (g0 * n - d1) * eta

    # assemble per-branch log-amplitudes; the mechanical overlap
    # exp(-|phi_n|^2/2 - |phi_n'|^2/2 + phi*_{n'} phi_n) has non-positive
    # real part only after the exponents are combined, so everything is
    # exponentiated in one go.
    log_fact = np.concatenate(([0.0], np.cumsum(np.log(np.arange(1, n_max)))))
    if mu_c == 0:
        log_mod = np.full(n_max, -np.inf)
        log_mod[0] = 0.0
    else:
        log_mod = n * math.log(abs(mu_c)) - 0.5 * log_fact - 0.5 * nc
    phase = (n * cmath.phase(mu_c) if mu_c != 0 else 0.0) \
        + (g0 ** 2 * n ** 2 - 2.0 * g0 * d1 * n) * (tau - math.sin(tau))
    drift = g0 * n * (eta * mu_m - np.conj(eta) * np.conj(mu_m)) / 2.0  # imaginary
    log_col = log_mod + 1j * phase + drift - 0.5 * np.abs(phi) ** 2
    a_mat = np.exp(log_col[:, None] + np.conj(log_col)[None, :]
                   + np.conj(phi)[None, :] * phi[:, None])
    a1_mat = (n[:, None] - n[None, :]) * a_mat

    half_width = math.sqrt(2.0 * n_max) + 8.0

    def integral(n_nodes: int) -> float:
        x, wts = _gauss_nodes(n_nodes)
        x = x * half_width
        wts = wts * half_width
        psi = _hermite_functions(n_max, x)  # (n_max, nx)
        u = psi * np.exp(-1j * lam * n)[:, None]
        s0 = np.einsum("nm,nx,mx->x", a_mat, u, np.conj(u)).real
        s1 = np.einsum("nm,nx,mx->x", a1_mat, u, np.conj(u)).imag
        s0 = np.maximum(s0, 1e-300)
        return float(np.sum(wts * s1 ** 2 / s0))

    coarse = integral(1200)
    fine = integral(2400)
    if abs(fine - coarse) > 1e-10 * max(1.0, abs(fine)):
        fine = integral(4800)
    return 4.0 * g0 ** 2 * (tau - math.sin(tau)) ** 2 * fine


_GAUSS_CACHE: dict = {}


def _gauss_nodes(n_nodes: int):
    if n_nodes not in _GAUSS_CACHE:
        _GAUSS_CACHE[n_nodes] = np.polynomial.legendre.leggauss(n_nodes)
    return _GAUSS_CACHE[n_nodes]


def _hermite_functions(n_max: int, x: np.ndarray) -> np.ndarray:
    """Normalised oscillator eigenfunctions psi_n(x), stable to large n."""
    psi = np.zeros((n_max, x.size))
    psi[0] = np.pi ** -0.25 * np.exp(-0.5 * x ** 2)
    if n_max > 1:
        psi[1] = math.sqrt(2.0) * x * psi[0]
    for k in range(2, n_max):
        psi[k] = (math.sqrt(2.0 / k) * x * psi[k - 1]
                  - math.sqrt((k - 1.0) / k) * psi[k - 2])
    return psi


# ---------------------------------------------------------------------------
# dimensionful sensitivities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SensitivityReport:
    """Dimensionless and dimensionful Fisher information with its bound.

    std_dev = 1 / sqrt(n_measurements * qfi_dimensionful) by the
    Cramer-Rao inequality.
    """

    qfi_dimensionless: float
    qfi_dimensionful: float
    std_dev: float
    n_measurements: int


def _report(qfi_dimless: float, jacobian_sq: float,
            n_measurements: int) -> SensitivityReport:
    qfi_dim = jacobian_sq * qfi_dimless
    std = 1.0 / math.sqrt(n_measurements * qfi_dim) if qfi_dim > 0 else math.inf
    return SensitivityReport(qfi_dimensionless=qfi_dimless,
                             qfi_dimensionful=qfi_dim, std_dev=std,
                             n_measurements=n_measurements)


def gravimetry(setup: PhysicalSetup, mu_c: complex,
               state_family: str = "coherent", fock_n: int | None = None,
               r_T: float = 0.0, tau: float = TWO_PI,
               n_measurements: int = 1) -> SensitivityReport:
    """Gravimetric sensitivity of a platform at the disentangling time.

    The dimensionless d1-estimation QFI is converted through the chain rule
    d(d1)/dg = cos(tilt) sqrt(m / (2 hbar omega_m^3)), so qfi_dimensionful
    is in s^4 m^-2 and std_dev in m s^-2. Thermal mechanical occupation
    leaves the tau = 2 pi value untouched.
    """
    g0 = coupling_constant(setup)
    nc = abs(complex(mu_c)) ** 2
    if state_family == "coherent":
        qfi = qfi_closed_form("d1-constant", tau, g0=g0, n_photons=nc)
    elif state_family == "thermal":
        qfi = qfi_closed_form("d1-constant", tau, g0=g0, n_photons=nc, r_T=r_T)
    elif state_family == "fock":
        if fock_n is None:
            raise ValueError("state_family='fock' needs fock_n")
        s = math.sin(tau)
        qfi = 4.0 * (g0 ** 2 * fock_n ** 2 * (tau - s) ** 2
                     + math.sin(tau / 2.0) ** 2)
    else:
        raise ValueError(f"unknown state family {state_family!r}")
    mass = oscillator_mass(setup)
    jac_sq = (math.cos(setup.tilt_angle) ** 2 * mass
              / (2.0 * HBAR * setup.omega_m ** 3))
    return _report(qfi, jac_sq, n_measurements)


def acceleration_qfi(mass: float, omega_m: float, g0: float, mu_c: complex,
                     r_T: float = 0.0, tau: float = TWO_PI,
                     scheme: str = "resonant",
                     n_measurements: int = 1) -> SensitivityReport:
    """Sensitivity to the amplitude a0 of an acceleration a0 cos(Omega tau).

    Uses d1 = a0 sqrt(m / (2 hbar omega_m^3)); ``scheme`` picks the
    resonant (Omega = 1) or constant displacement ledger. std_dev is the
    acceleration uncertainty in m s^-2; multiply by the mass for the force.
    """
    nc = abs(complex(mu_c)) ** 2
    case = {"resonant": "d1-resonant", "constant": "d1-constant"}[scheme]
    qfi = qfi_closed_form(case, tau, g0=g0, n_photons=nc, r_T=r_T)
    jac_sq = mass / (2.0 * HBAR * omega_m ** 3)
    return _report(qfi, jac_sq, n_measurements)


def measurement_window(g0_hz: float) -> float:
    """Homodyne timing window around tau = 2 pi, in seconds (~ 1/g0).

    The Fisher-information peak has a dimensionless width set by
    sigma = 1/(2 g0/omega_m); the corresponding laboratory timescale is
    1/g0.
    """
    if g0_hz <= 0:
        raise ValueError("g0 must be positive")
    return 1.0 / g0_hz


def gravimetry_qfi_closed(setup: PhysicalSetup, mu_c: complex) -> float:
    """I_g = 32 pi^2 g0^2 m |mu_c|^2 cos^2(tilt) / (hbar omega_m^3)."""
    g0 = coupling_constant(setup)
    mass = oscillator_mass(setup)
    return (32.0 * math.pi ** 2 * g0 ** 2 * mass * abs(complex(mu_c)) ** 2
            * math.cos(setup.tilt_angle) ** 2 / (HBAR * setup.omega_m ** 3))
