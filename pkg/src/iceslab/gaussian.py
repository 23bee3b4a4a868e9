"""Gaussian unitaries: single-mode Fresnel operator, beam splitter, squeezer.

The Fresnel operator for complex (s, r) with |s|^2 - |r|^2 = 1 acts on one mode
and is built from its normally ordered factorization

    F(r, s) = (1/sqrt(s*)) exp(-r a^dag^2 / (2 s*)) (1/s*)^{a^dag a}
              exp(r* a^2 / (2 s*)),

whose three factors are exactly summable at finite cutoff: the raising and
lowering quadratic exponentials are nilpotent there, so every matrix element
<m|F|n> with m, n inside the truncation is the exact infinite-space element.
The equivalent ray-matrix parameterization uses real (A, B, C, D), AD - BC = 1:

    s = [(A + D) - i(B - C)] / 2,      r = -[(A - D) + i(B + C)] / 2.

Heisenberg action (used heavily by the verification suites):

    F b F^dag = s* b + r b^dag          F^dag b F = s b - r b^dag
    F b^dag F^dag = s b^dag + r* b      F^dag b^dag F = s* b^dag - r* b
    F^dag(s, r) = F(-r, s*)

The single-mode squeezer S(lam) = exp[(lam/2)(b^2 - b^dag^2)] is the special
case (s, r) = (cosh lam, sinh lam) of the same factorization.

Guard bands. A product or application of these operators evaluated directly at
the working cutoff loses the amplitude flow through states above it, which
wrecks residuals everywhere but far below the cutoff. Helpers below therefore
evaluate in an enlarged space and window the result. `fresnel_row_slab` gives
exact rows of F out to a large column count; reading only low rows keeps every
intermediate magnitude in the float-safe range, which a full guard-size matrix
product would not (the high-row corner of the factorization has catastrophic
cancellations). Middle factors of sandwiches are taken from scipy's expm of
the (exactly anti-Hermitian) truncated generator, which is unitary and clean
at any size.

Branch convention: principal square roots and principal complex powers
everywhere; verification residuals that are branch-sensitive permit one global
phase.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm as _expm
from scipy.special import gammaln

from .fock import (
    FockOperator,
    FockSpace,
    annihilator_matrix,
    embed_mode,
    matrix_exp,
    mode_operator,
)

UNIMODULARITY_TOL = 1e-9


@dataclass(frozen=True)
class RayMatrix:
    """Classical ABCD ray-transfer matrix with unit determinant."""

    A: float
    B: float
    C: float
    D: float

    def __post_init__(self):
        det = self.A * self.D - self.B * self.C
        if abs(det - 1.0) > UNIMODULARITY_TOL:
            raise ValueError(f"ray matrix not unimodular: AD - BC = {det!r}")

    @property
    def determinant(self) -> float:
        return self.A * self.D - self.B * self.C


@dataclass(frozen=True)
class FresnelParams:
    """Complex (s, r) with s s* - r r* = 1."""

    s: complex
    r: complex

    def __post_init__(self):
        dev = abs(self.s) ** 2 - abs(self.r) ** 2 - 1.0
        if abs(dev) > UNIMODULARITY_TOL:
            raise ValueError(f"(s, r) not unimodular: ss* - rr* - 1 = {dev!r}")


@dataclass(frozen=True)
class SqueezeStrength:
    """Squeezing parameter lam with the scale factor mu = e^lam cached."""

    lam: float

    @property
    def mu(self) -> float:
        return math.exp(self.lam)


def _as_lam(strength) -> float:
    return strength.lam if isinstance(strength, SqueezeStrength) else float(strength)


def fresnel_params_from_ray(m: RayMatrix) -> FresnelParams:
    s = 0.5 * ((m.A + m.D) - 1j * (m.B - m.C))
    r = -0.5 * ((m.A - m.D) + 1j * (m.B + m.C))
    return FresnelParams(s, r)


def ray_from_fresnel(p: FresnelParams) -> RayMatrix:
    A = p.s.real - p.r.real
    D = p.s.real + p.r.real
    B = -p.s.imag - p.r.imag
    C = p.s.imag - p.r.imag
    return RayMatrix(A, B, C, D)


# ---------------------------------------------------------------------------
# exact matrix elements
# ---------------------------------------------------------------------------

def _quadratic_exp_slab(gamma: complex, rows: int, cols: int, raising: bool) -> np.ndarray:
    """exp(gamma a^dag^2) (raising) or exp(gamma a^2) (lowering), restricted to
    the first rows x cols entries; exp(gamma a^dag^2)[m, n] = gamma^k
    sqrt(m!/n!)/k! at m = n + 2k. Evaluated in log space."""
    out = np.zeros((rows, cols), dtype=complex)
    if gamma == 0:
        d = min(rows, cols)
        out[:d, :d] = np.eye(d)
        return out
    lg = np.log(complex(gamma))
    lgam = gammaln(np.arange(max(rows, cols) + 1))
    m = np.arange(rows)[:, None]
    n = np.arange(cols)[None, :]
    k2 = (m - n) if raising else (n - m)
    valid = (k2 >= 0) & (k2 % 2 == 0)
    k = np.where(valid, k2 // 2, 0)
    hi = np.maximum(m, n)
    lo = np.minimum(m, n)
    logmag = k * lg.real + 0.5 * (lgam[hi] - lgam[lo]) - gammaln(k + 1)
    vals = np.exp(logmag + 1j * k * lg.imag)
    out[valid] = vals[valid]
    return out


def fresnel_row_slab(s: complex, r: complex, n_rows: int, n_cols: int) -> np.ndarray:
    """Exact elements <m|F(r,s)|n> for m < n_rows, n < n_cols.

    Safe for n_cols far beyond n_rows: the internal contraction index never
    exceeds n_rows, which keeps all intermediates bounded.
    """
    sc = np.conj(s)
    raise_slab = _quadratic_exp_slab(-r / (2 * sc), n_rows, n_rows, raising=True)
    lower_slab = _quadratic_exp_slab(np.conj(r) / (2 * sc), n_rows, n_cols, raising=False)
    diag = (1.0 / sc) ** np.arange(n_rows)
    return (1.0 / np.sqrt(sc)) * (raise_slab @ (diag[:, None] * lower_slab))


def fresnel_matrix(cutoff: int, s: complex, r: complex) -> np.ndarray:
    """Exact (cutoff+1)^2 single-mode Fresnel matrix."""
    return fresnel_row_slab(s, r, cutoff + 1, cutoff + 1)


def squeeze_generator_matrix(cutoff: int, lam: float) -> np.ndarray:
    a = annihilator_matrix(cutoff)
    return lam / 2 * (a @ a - a.conj().T @ a.conj().T)


def guard_cutoff(window: int, r_abs: float, extra_spread: float = 1.0) -> int:
    """Guard cutoff so couplings from above it into occupations <= window are
    negligible: physical spread of window states under the squeeze part, a
    geometric tail margin, and a fixed pad."""
    s_abs = math.sqrt(1.0 + r_abs ** 2)
    spread = (s_abs + r_abs) ** 2 * extra_spread
    tanh = r_abs / s_abs
    pad = int(math.ceil(56.0 / -math.log(tanh))) if tanh > 1e-12 else 0
    return int(math.ceil((window + 2) * spread)) + pad + 40


def fresnel_apply_window(s: complex, r: complex, input_amplitudes: np.ndarray,
                         window: int, guard: int | None = None) -> np.ndarray:
    """First window+1 amplitudes of F|psi> with guard headroom.

    `input_amplitudes` should be supplied at the guard cutoff when the state
    has a slowly decaying tail (position and momentum kets do).
    """
    if guard is None:
        guard = guard_cutoff(window, abs(r))
    vin = np.zeros(guard + 1, dtype=complex)
    m = min(len(input_amplitudes), guard + 1)
    vin[:m] = input_amplitudes[:m]
    return fresnel_row_slab(s, r, window + 1, guard + 1) @ vin


# ---------------------------------------------------------------------------
# public operator constructors
# ---------------------------------------------------------------------------

def fresnel_operator(space: FockSpace, mode: str, p: FresnelParams) -> FockOperator:
    """Fresnel operator on the chosen mode, exact elements at the space cutoff."""
    single = fresnel_matrix(space.cutoff, p.s, p.r)
    return FockOperator(space, embed_mode(space, mode, single))


def beamsplitter(space: FockSpace, theta: float) -> FockOperator:
    """B(theta) = exp[theta (a b^dag - a^dag b)] on a 2-mode space.

    The generator preserves total photon number, so the truncated matrix is
    exactly unitary and agrees with the infinite-space operator on every
    total-occupation sector <= cutoff.
    """
    if space.modes != 2:
        raise ValueError("beamsplitter requires a 2-mode space")
    a = mode_operator(space, "a", "annihilate")
    bd = mode_operator(space, "b", "create")
    gen = a @ bd
    gen = gen - gen.adjoint()
    return matrix_exp(theta * gen)


def squeezer(space: FockSpace, mode: str, strength) -> FockOperator:
    """Single-mode squeezer exp[(lam/2)(b^2 - b^dag^2)] on the chosen mode."""
    lam = _as_lam(strength)
    single = _expm(squeeze_generator_matrix(space.cutoff, lam))
    return FockOperator(space, embed_mode(space, mode, single))


def heisenberg_transform(u: FockOperator, x: FockOperator) -> FockOperator:
    """U X U^dag at the operators' own cutoff (no guard band)."""
    if u.space != x.space:
        raise ValueError("space mismatch")
    return u @ x @ u.adjoint()


# ---------------------------------------------------------------------------
# guard-banded windows used by the verification suites
# ---------------------------------------------------------------------------

def conjugated_ladder_window(s: complex, r: complex, window: int,
                             kind: str = "annihilate", dagger_outer: bool = False,
                             guard: int | None = None) -> np.ndarray:
    """Exact window of F X F^dag (dagger_outer selects F^dag X F instead) for
    X in {annihilate, create}."""
    if dagger_outer:
        s, r = np.conj(s), -r
    if guard is None:
        guard = guard_cutoff(window, abs(r))
    slab = fresnel_row_slab(s, r, window + 1, guard + 1)
    a = annihilator_matrix(guard)
    x = a if kind == "annihilate" else a.conj().T
    return slab @ x @ slab.conj().T


def fresnel_unitarity_window(s: complex, r: complex, window: int,
                             guard: int | None = None) -> np.ndarray:
    """Exact window of F^dag F (identity when the construction is sound).

    Columns of F are conjugated rows of F^dag = F(-r, s*), so only float-safe
    row slabs are touched.
    """
    if guard is None:
        guard = guard_cutoff(window, abs(r))
    slab = fresnel_row_slab(np.conj(s), -r, window + 1, guard + 1)
    return slab.conj() @ slab.T


def sandwich_squeeze_window(s: complex, r: complex, lam: float,
                            n_rows: int, n_cols: int | None = None,
                            guard: int | None = None) -> np.ndarray:
    """Window of W = F(s,r) S(lam) F(s,r)^dag from the literal product,
    evaluated with guard headroom.

    W[m, n] = (row m of F) S (row n of F)^dag; the middle factor is scipy's
    expm of the truncated squeeze generator (exactly unitary, entries bounded
    by 1, hence float-clean at guard size).
    """
    if n_cols is None:
        n_cols = n_rows
    if guard is None:
        guard = guard_cutoff(max(n_rows, n_cols), abs(r), math.exp(2 * abs(lam)))
    slab_r = fresnel_row_slab(s, r, n_rows + 1, guard + 1)
    slab_c = slab_r if n_cols == n_rows else fresnel_row_slab(s, r, n_cols + 1, guard + 1)
    s_mid = _expm(squeeze_generator_matrix(guard, lam))
    return slab_r @ s_mid @ slab_c.conj().T


def compose_bogoliubov(outer: tuple, inner: tuple) -> tuple:
    """(s, r) of the product P Q given each factor's Heisenberg action
    G b G^dag = s* b + r b^dag."""
    s2, r2 = outer
    s1, r1 = inner
    s_conj = np.conj(s1) * np.conj(s2) + r1 * np.conj(r2)
    r = np.conj(s1) * r2 + r1 * s2
    return np.conj(s_conj), r


def sandwich_squeeze_params(s: complex, r: complex, lam: float) -> tuple:
    """Bogoliubov parameters of W = F(s,r) S(lam) F^dag(s,r): an analytic
    cross-check oracle for sandwich_squeeze_window."""
    ch, sh = np.cosh(lam), np.sinh(lam)
    s_w_conj = ch + (np.conj(r) * s - np.conj(s) * r) * sh
    r_w = (s ** 2 - r ** 2) * sh
    return np.conj(s_w_conj), r_w


def sandwich_squeeze_vacuum_element(s: complex, r: complex, lam: float) -> complex:
    """<0| F S F^dag |0> in closed form (pins the overall phase of W).

    Uses e^{alpha a^2} e^{beta a^dag^2}|0> = (1-4 alpha beta)^{-1/2}
    exp[beta a^dag^2/(1-4 alpha beta)]|0> and the squeezed-vacuum overlap
    <e^{mu a^dag^2} 0 | e^{nu a^dag^2} 0> = (1 - 4 mu* nu)^{-1/2}.
    """
    ch = np.cosh(lam)
    th = np.tanh(lam)
    kap = r / (2 * s)  # F^dag|0> = s^{-1/2} exp(kap a^dag^2)|0>
    t1 = (1 - 2 * th * kap) ** -0.5
    beta = kap / (1 - 2 * th * kap)
    beta = beta / ch ** 2 - th / 2
    scal = (1 / np.sqrt(s)) * (1 / np.sqrt(ch)) * t1
    return complex(np.conj(1 / np.sqrt(s)) * scal * (1 - 4 * np.conj(kap) * beta) ** -0.5)
