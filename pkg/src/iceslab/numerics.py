"""Scalar and quadrature machinery: Hermite polynomials, Gaussian integral
closed forms with convergence validation, quadrature rules, and the classical
one-dimensional Fresnel integral.

All closed forms take principal square-root branches.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gaussian import RayMatrix


class ConvergenceError(ValueError):
    """A Gaussian integral spec violates its convergence conditions."""


def hermite_poly(n: int, x: complex) -> complex:
    """Physicists' Hermite polynomial H_n at a complex argument, by the
    recurrence H_{n+1} = 2 x H_n - 2 n H_{n-1}."""
    if n < 0:
        raise ValueError("order must be >= 0")
    h_prev, h = 1.0 + 0j, 2 * complex(x)
    if n == 0:
        return h_prev
    for k in range(1, n):
        h_prev, h = h, 2 * x * h - 2 * k * h_prev
    return h


@dataclass(frozen=True)
class GaussianIntegralSpec:
    """Parameters of int d^2z/pi exp(zeta |z|^2 + xi z + eta z* + f z^2 + g z*^2).

    Convergence requires, for every choice of signs,
        Re(zeta +- f +- g) < 0   and   Re[(zeta^2 - 4 f g)/(zeta +- f +- g)] < 0.
    All four sign combinations are enforced (the conservative reading).
    """

    zeta: complex
    xi: complex = 0.0
    eta: complex = 0.0
    f: complex = 0.0
    g: complex = 0.0

    def convergence_violations(self) -> list[str]:
        out = []
        disc = self.zeta ** 2 - 4 * self.f * self.g
        for sf in (+1, -1):
            for sg in (+1, -1):
                w = self.zeta + sf * self.f + sg * self.g
                tag = f"zeta {'+' if sf > 0 else '-'} f {'+' if sg > 0 else '-'} g"
                if w.real >= 0:
                    out.append(f"Re({tag}) = {w.real:.6g} >= 0")
                elif (disc / w).real >= 0:
                    out.append(f"Re[(zeta^2 - 4fg)/({tag})] = {(disc / w).real:.6g} >= 0")
        return out

    def is_convergent(self) -> bool:
        return not self.convergence_violations()


def gaussian_integral_2d(spec: GaussianIntegralSpec) -> complex:
    """Closed form (zeta^2 - 4fg)^{-1/2} exp[(-zeta xi eta + xi^2 g + eta^2 f)
    / (zeta^2 - 4fg)], after validating convergence."""
    violations = spec.convergence_violations()
    if violations:
        raise ConvergenceError("; ".join(violations))
    disc = spec.zeta ** 2 - 4 * spec.f * spec.g
    expo = (-spec.zeta * spec.xi * spec.eta + spec.xi ** 2 * spec.g
            + spec.eta ** 2 * spec.f) / disc
    return complex(disc ** -0.5 * np.exp(expo))


def gaussian_integral_2d_quadrature(spec: GaussianIntegralSpec,
                                    halfwidth: float = 8.0,
                                    order: int = 220) -> complex:
    """Brute-force planar quadrature of the same integrand (oracle for the
    closed form), as a tensor Gauss-Legendre rule on [-L, L]^2."""
    x, w = np.polynomial.legendre.leggauss(order)
    x = x * halfwidth
    w = w * halfwidth
    zx, zy = np.meshgrid(x, x, indexing="ij")
    z = zx + 1j * zy
    vals = np.exp(spec.zeta * np.abs(z) ** 2 + spec.xi * z + spec.eta * np.conj(z)
                  + spec.f * z ** 2 + spec.g * np.conj(z) ** 2) / np.pi
    return complex(np.einsum("i,j,ij->", w, w, vals))


def gaussian_integral_1d(alpha: complex, beta: complex) -> complex:
    """int exp(-alpha x^2 + beta x) dx = sqrt(pi/alpha) exp(beta^2/(4 alpha)),
    for Re alpha > 0."""
    if complex(alpha).real <= 0:
        raise ConvergenceError(f"Re alpha = {complex(alpha).real:.6g} <= 0")
    return complex(np.sqrt(np.pi / alpha) * np.exp(beta ** 2 / (4 * alpha)))


def gaussian_integral_1d_quadrature(alpha: complex, beta: complex,
                                    halfwidth: float | None = None,
                                    order: int = 400) -> complex:
    sigma = 1.0 / np.sqrt(complex(alpha).real)
    center = abs(complex(beta)) * abs(sigma) ** 2
    if halfwidth is None:
        halfwidth = 10 * sigma + 2 * center
    x, w = np.polynomial.legendre.leggauss(order)
    x = x * halfwidth
    w = w * halfwidth
    return complex(np.sum(w * np.exp(-alpha * x ** 2 + beta * x)))


# ---------------------------------------------------------------------------
# quadrature rules
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureScheme:
    """Discretization of int dq int d^2z/pi.

    The q rule is Gauss-Hermite (weights folded back) or Gauss-Legendre on
    [-q_halfwidth, q_halfwidth]; the z rule is a polar grid with Gauss-Legendre
    radii on [0, z_radius] and a uniform midpoint angle rule.
    """

    q_rule: str = "legendre"
    q_order: int = 64
    q_halfwidth: float = 6.0
    z_radius: float = 4.0
    n_radial: int = 48
    n_angular: int = 48

    def __post_init__(self):
        if self.q_order < 1 or self.n_radial < 1 or self.n_angular < 1:
            raise ValueError("quadrature orders must be >= 1")
        if self.q_halfwidth <= 0 or self.z_radius <= 0:
            raise ValueError("quadrature domains must be positive")
        if self.q_rule not in ("legendre", "hermite"):
            raise ValueError(f"unknown q rule {self.q_rule!r}")

    def q_nodes_weights(self):
        if self.q_rule == "hermite":
            x, w = np.polynomial.hermite.hermgauss(self.q_order)
            return x, w * np.exp(x ** 2)
        x, w = np.polynomial.legendre.leggauss(self.q_order)
        return x * self.q_halfwidth, w * self.q_halfwidth

    def z_nodes_weights(self):
        return planar_grid(self.z_radius, self.n_radial, self.n_angular)

    def refined(self, factor: float = 1.25, domain_growth: float = 1.0):
        """A finer scheme: node counts scaled by `factor`, domains widened by
        `domain_growth` (both resolution knobs must grow for the residual of a
        truncated-domain integral to keep falling)."""
        return QuadratureScheme(
            q_rule=self.q_rule,
            q_order=int(np.ceil(self.q_order * factor)),
            q_halfwidth=self.q_halfwidth + domain_growth,
            z_radius=self.z_radius + domain_growth,
            n_radial=int(np.ceil(self.n_radial * factor)),
            n_angular=int(np.ceil(self.n_angular * factor)),
        )


def gauss_hermite_rule(order: int):
    """Nodes and weights integrating poly(x) e^{-x^2} exactly to degree
    2*order - 1."""
    if order < 1:
        raise ValueError("order must be >= 1")
    return np.polynomial.hermite.hermgauss(order)


def planar_grid(radius: float, n_radial: int, n_angular: int):
    """Complex nodes and weights discretizing int d^2z / pi over |z| <= radius.

    Radial direction: Gauss-Legendre on [0, radius] against the measure r dr
    (a midpoint radial rule cannot reach the accuracy the self-checks demand);
    angular direction: uniform midpoint rule, spectrally accurate for smooth
    periodic integrands.
    """
    if n_radial < 1 or n_angular < 1:
        raise ValueError("grid sizes must be >= 1")
    if radius <= 0:
        raise ValueError("radius must be positive")
    x, w = np.polynomial.legendre.leggauss(n_radial)
    rr = (x + 1) / 2 * radius
    wr = w * radius / 2
    th = (np.arange(n_angular) + 0.5) * 2 * np.pi / n_angular
    nodes = (rr[:, None] * np.exp(1j * th[None, :])).ravel()
    weights = ((rr * wr)[:, None] * np.full(n_angular, 2 * np.pi / n_angular / np.pi)).ravel()
    return nodes, weights


# ---------------------------------------------------------------------------
# classical Fresnel integral
# ---------------------------------------------------------------------------

MIN_FRESNEL_B = 0.1
DECAY_REQUIREMENT = 1e-10


def fresnel_integral_1d(f_samples: np.ndarray, x_grid: np.ndarray, m: RayMatrix,
                        xprime_grid: np.ndarray) -> np.ndarray:
    """Classical ray-matrix diffraction integral

        g(x') = (2 pi i B)^{-1/2} int exp[i (A x^2 - 2 x' x + D x'^2)/(2B)] f(x) dx

    discretized by the trapezoid rule on `x_grid` (superalgebraic for smooth
    decaying inputs). Guards: |B| >= 0.1 (the chirped kernel otherwise needs a
    finer grid than desk scale), and f must have decayed at the grid ends.
    """
    if abs(m.B) < MIN_FRESNEL_B:
        raise ValueError(f"|B| = {abs(m.B):.3g} below the oscillation guard {MIN_FRESNEL_B}")
    f_samples = np.asarray(f_samples, dtype=complex)
    edge = max(abs(f_samples[0]), abs(f_samples[-1]))
    if edge > DECAY_REQUIREMENT * max(np.max(np.abs(f_samples)), 1e-300):
        raise ValueError(
            f"input has not decayed at the grid ends (edge/max = {edge:.3e})"
        )
    x = np.asarray(x_grid, dtype=float)
    xp = np.asarray(xprime_grid, dtype=float)
    pref = 1.0 / np.sqrt(2j * np.pi * m.B)
    phase = np.exp(1j / (2 * m.B) * (m.A * x[None, :] ** 2
                                     - 2 * xp[:, None] * x[None, :]
                                     + m.D * xp[:, None] ** 2))
    return pref * np.trapezoid(phase * f_samples[None, :], x=x, axis=1)
