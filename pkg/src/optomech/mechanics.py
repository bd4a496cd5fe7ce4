"""Quadratic mechanical-subsystem dynamics.

Solves the pair of oscillator equations

    P11'' + (1 + 4 D2(tau)) P11 = 0,    P11(0) = 1, P11'(0) = 0,
    I22'' + (1 + 4 D2(tau)) I22 = 0,    I22(0) = 0, I22'(0) = 1,

whose solutions determine xi = P11 - i*I22, the Bogoliubov pair
alpha = (xi + i xi')/2, beta = (xi* + i xi'*)/2, and the rotation/squeezing
parameters (J_b, J_+, J_-) of the decoupled evolution operator.

Analytic fast paths cover D2 = 0 (free rotation, xi = exp(-i tau)) and
constant D2 (xi = cos(zeta tau) - i sin(zeta tau)/zeta, zeta = sqrt(1+4 d2)).
Everything else runs through an adaptive high-order Runge-Kutta integration
with dense output.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .params import Drive, ModelSpec, evaluate_drive

RTOL = 1e-10
ATOL = 1e-12

# arcosh arguments this far below 1 are treated as rounding noise
ACOSH_CLAMP = 1e-12
# below this they signal an invalid Bogoliubov pair
ACOSH_REJECT = 1e-9


class IntegrationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SubsystemSolution:
    """P11/I_P22 and derivatives on a grid, with dense evaluation.

    Satisfies xi = P11 - i * I_P22 exactly and |alpha|^2 - |beta|^2 = 1 up
    to integration tolerance at every time.
    """

    grid: np.ndarray
    p11: np.ndarray
    dp11: np.ndarray
    i_p22: np.ndarray
    p22: np.ndarray  # = d(I_P22)/dtau
    _dense: object  # callable tau -> (p11, dp11, i_p22, p22)

    def _eval(self, tau):
        return self._dense(tau)

    def state_at(self, tau):
        """(P11, P11', I_P22, P22) at any tau inside the solved range."""
        return self._dense(tau)

    def xi(self, tau) -> complex:
        p11, _, i22, _ = self._eval(tau)
        return p11 - 1j * i22

    def dxi(self, tau) -> complex:
        _, dp11, _, p22 = self._eval(tau)
        return dp11 - 1j * p22

    def bogoliubov(self, tau):
        """Bogoliubov pair (alpha, beta) of the squeezing subsystem."""
        xi = self.xi(tau)
        dxi = self.dxi(tau)
        alpha = 0.5 * (xi + 1j * dxi)
        beta = 0.5 * (np.conj(xi) + 1j * np.conj(dxi))
        return alpha, beta


@dataclass(frozen=True)
class JSet:
    """Rotation (j_b) and squeezing (j_plus, j_minus) parameters."""

    j_b: float
    j_plus: float
    j_minus: float


def _free_dense(tau):
    tau = np.asarray(tau, dtype=float)
    return np.cos(tau), -np.sin(tau), np.sin(tau), np.cos(tau)


def _constant_dense_factory(d2: float):
    zeta2 = 1.0 + 4.0 * d2
    if zeta2 <= 0.0:
        raise ValueError(f"constant squeezing d2={d2} gives 1+4*d2 <= 0; "
                         "the oscillator is unstable and has no bounded solution")
    zeta = math.sqrt(zeta2)

    def dense(tau):
        tau = np.asarray(tau, dtype=float)
        c, s = np.cos(zeta * tau), np.sin(zeta * tau)
        return c, -zeta * s, s / zeta, c

    return dense


def _numeric_dense_factory(d2_drive: Drive, tau_max: float):
    def rhs(tau, y):
        w2 = 1.0 + 4.0 * evaluate_drive(d2_drive, tau)
        return [y[1], -w2 * y[0], y[3], -w2 * y[2]]

    sol = solve_ivp(rhs, (0.0, tau_max), [1.0, 0.0, 0.0, 1.0],
                    method="DOP853", rtol=RTOL, atol=ATOL, dense_output=True)
    if not sol.success:
        raise IntegrationError(
            f"subsystem integration failed near tau={sol.t[-1]:.6g}: {sol.message}")

    def dense(tau):
        y = sol.sol(tau)
        return y[0], y[1], y[2], y[3]

    return dense


def solve_subsystem(spec: ModelSpec, tau_max: float, grid=None) -> SubsystemSolution:
    """Solve the mechanical subsystem on [0, tau_max].

    ``grid`` defaults to 201 evenly spaced points. Analytic paths are used
    when the squeezing drive is structurally zero or constant.
    """
    if tau_max <= 0:
        raise ValueError("tau_max must be > 0")
    if grid is None:
        grid = np.linspace(0.0, tau_max, 201)
    grid = np.asarray(grid, dtype=float)
    if grid.min() < 0 or grid.max() > tau_max * (1 + 1e-12):
        raise ValueError("grid must lie within [0, tau_max]")

    d2 = spec.squeezing
    if d2.is_zero:
        dense = _free_dense
    elif d2.is_constant:
        dense = _constant_dense_factory(d2.amplitude)
    else:
        dense = _numeric_dense_factory(d2, tau_max)

    p11, dp11, i22, p22 = (np.asarray(v, dtype=float) for v in dense(grid))
    return SubsystemSolution(grid=grid, p11=p11, dp11=dp11, i_p22=i22,
                             p22=p22, _dense=dense)


def _safe_acosh(x: float, what: str) -> float:
    if x < 1.0 - ACOSH_REJECT:
        raise ValueError(f"invalid Bogoliubov pair: arcosh argument for "
                         f"{what} is {x}, more than {ACOSH_REJECT} below 1")
    if x <= 1.0 + ACOSH_CLAMP:
        # rounding noise straddling 1 would otherwise be amplified by the
        # square-root branch point
        return 0.0
    return math.acosh(x)


def j_coefficients(alpha: complex, beta: complex) -> JSet:
    """J parameters reproducing the Bogoliubov pair (alpha, beta).

    j_b is the principal representative from -Arg(.)/2 and is therefore
    defined modulo pi; compose_bogoliubov(j_coefficients(a, b)) reproduces
    (a, b) up to that branch.
    """
    norm = abs(alpha) ** 2 - abs(beta) ** 2
    if abs(norm - 1.0) > 1e-6:
        raise ValueError(f"|alpha|^2 - |beta|^2 = {norm}, not a Bogoliubov pair")
    z = alpha * alpha - beta * beta
    mod = abs(z)
    j_plus = 0.25 * _safe_acosh(mod, "J_+")
    j_minus = 0.25 * _safe_acosh((2.0 * abs(alpha) ** 2 - 1.0) / mod, "J_-")
    j_b = -0.5 * cmath.phase(z / mod)
    return JSet(j_b=j_b, j_plus=j_plus, j_minus=j_minus)


def compose_bogoliubov(j: JSet):
    """Bogoliubov pair of rotation(j_b) . squeeze(2 j_+, pi/2) . squeeze(2 j_-, pi)."""
    cp, sp = math.cosh(2.0 * j.j_plus), math.sinh(2.0 * j.j_plus)
    cm, sm = math.cosh(2.0 * j.j_minus), math.sinh(2.0 * j.j_minus)
    rot = cmath.exp(-1j * j.j_b)
    alpha = rot * (cp * cm - 1j * sp * sm)
    beta = -rot * (1j * sp * cm - cp * sm)
    return alpha, beta


def j_coefficients_ode(spec: ModelSpec, tau, dense: bool = False):
    """Integrate the first-order equations for (j_b, j_plus, j_minus).

        j_b'  = 1 + 2 D2 (1 - sin(2 j_b) tanh(4 j_+)),
        j_+'  = D2 cos(2 j_b),
        j_-'  = D2 sin(2 j_b) / cosh(4 j_+),

    all vanishing at tau = 0. Returns a JSet at scalar ``tau`` (the
    continuous, unwrapped j_b), or, with ``dense=True``, a callable.
    """
    d2 = spec.squeezing

    if d2.is_zero:
        if dense:
            return lambda t: JSet(j_b=float(t), j_plus=0.0, j_minus=0.0)
        return JSet(j_b=float(tau), j_plus=0.0, j_minus=0.0)

    def rhs(t, y):
        val = evaluate_drive(d2, t)
        jb, jp, _ = y
        return [1.0 + 2.0 * val * (1.0 - math.sin(2 * jb) * math.tanh(4 * jp)),
                val * math.cos(2 * jb),
                val * math.sin(2 * jb) / math.cosh(4 * jp)]

    t_end = float(tau)
    sol = solve_ivp(rhs, (0.0, t_end), [0.0, 0.0, 0.0], method="DOP853",
                    rtol=RTOL, atol=ATOL, dense_output=True)
    if not sol.success:
        raise IntegrationError(
            f"J integration failed near tau={sol.t[-1]:.6g}: {sol.message}")
    if dense:
        return lambda t: JSet(*sol.sol(t))
    return JSet(*sol.sol(t_end))


def unwrap_j_b(values, period: float = math.pi) -> np.ndarray:
    """Continuously unwrap principal-branch j_b samples along a grid."""
    values = np.asarray(values, dtype=float)
    return np.unwrap(values, period=period)


def mathieu_perturbative(d2: float, tau):
    """Closed-form resonant (Omega = 2) approximants for small d2.

    Returns (P11, I_P22, xi) with

        P11   = cos t cosh(d2 t) - sin t sinh(d2 t),
        I_P22 = -(cos t sinh(d2 t) - sin t cosh(d2 t)) / (1 - d2),
        xi    = exp(-i t) cosh(d2 t) + i exp(i t) sinh(d2 t).

    Valid for d2 << 1; no hard rejection is applied.
    """
    tau = np.asarray(tau, dtype=float)
    ch, sh = np.cosh(d2 * tau), np.sinh(d2 * tau)
    c, s = np.cos(tau), np.sin(tau)
    p11 = c * ch - s * sh
    i22 = -(c * sh - s * ch) / (1.0 - d2)
    xi = np.exp(-1j * tau) * ch + 1j * np.exp(1j * tau) * sh
    if tau.ndim == 0:
        return float(p11), float(i22), complex(xi)
    return p11, i22, xi


def rwa_bogoliubov(d2: float, tau: float):
    """Resonant rotating-wave Bogoliubov pair; satisfies the identity exactly."""
    alpha = cmath.exp(-1j * tau) * math.cosh(d2 * tau)
    beta = -1j * cmath.exp(-1j * tau) * math.sinh(d2 * tau)
    return alpha, beta


@dataclass(frozen=True)
class FrequencyShift:
    """Equivalent description of a constant squeezing term.

    Evolution under the Hamiltonian with constant squeezing d2 equals (up to
    a global phase) evolution without squeezing at the shifted frequency
    omega_m' = omega_m sqrt(1 + 4 d2/omega_m), starting from a squeezed
    initial state with exp(-2r) = omega_m'/omega_m. First moments of the
    transformed input carry the coherent label cosh(r) mu - sinh(r) mu*
    (the sign on sinh is fixed by requiring the tau = 0 quadratures to be
    invariant), and lab quadratures are read back through
    x -> sqrt(omega_m/omega_m') x', p -> sqrt(omega_m'/omega_m) p'.
    """

    omega_m: float
    omega_m_shifted: float
    squeeze_r: float

    def map_coherent(self, mu_m: complex) -> complex:
        r = self.squeeze_r
        return mu_m * math.cosh(r) - np.conj(mu_m) * math.sinh(r)


def map_constant_squeezing(omega_m: float, d2: float) -> FrequencyShift:
    """Shifted-frequency picture of a constant squeezing strength d2.

    ``d2`` carries the same units as ``omega_m`` (use omega_m = 1 for the
    dimensionless convention).
    """
    radicand = 1.0 + 4.0 * d2 / omega_m
    if radicand <= 0:
        raise ValueError("1 + 4 d2/omega_m must be positive")
    omega_shift = omega_m * math.sqrt(radicand)
    r = -0.5 * math.log(omega_shift / omega_m)
    return FrequencyShift(omega_m=omega_m, omega_m_shifted=omega_shift, squeeze_r=r)
