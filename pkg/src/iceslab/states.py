"""Intermediate coordinate/momentum kets and the coherent-entangled states.

Each state comes in two independent constructions:

* closed form: the raising-only exponential acting on vacuum, evaluated by an
  exact amplitude recurrence (a Gaussian state exp(alpha a^dag + gamma
  a^dag^2)|0> obeys sqrt(n+1) c_{n+1} = alpha c_n + 2 gamma sqrt(n) c_{n-1},
  and the two-mode analogue below), times the scalar prefactor;
* protocol: a 50:50 beam splitter applied to coherent (x) intermediate-ket
  inputs. The beam-splitter generator preserves total photon number, so the
  protocol is evaluated in a doubled space (per-mode cutoff 2N) where every
  output amplitude inside the requested truncation is exact, then windowed.

Closed forms (per-mode cutoff N, ray parameters A, B, C, D with AD - BC = 1):

  intermediate coordinate-momentum ket, eigenket of D Q - B P:
      pi^(-1/4) (D+iB)^(-1/2) exp[-(A-iC) q^2/(2(D+iB))
          + sqrt(2) q a^dag/(D+iB) - (D-iB) a^dag^2/(2(D+iB))] |0>
  intermediate momentum-coordinate ket, eigenket of A P - C Q:
      pi^(-1/4) (A-iC)^(-1/2) exp[-(D+iB) p^2/(2(A-iC))
          + sqrt(2) i p a^dag/(A-iC) + (A+iC) a^dag^2/(2(A-iC))] |0>

  coherent-entangled state |zeta> (labels z, q):
      pi^(-1/4) (D+iB)^(-1/2) exp[-|z|^2/2 - (A-iC) q^2/(2(D+iB))]
        exp[(z/sqrt2 + q/(D+iB)) b^dag + (z/sqrt2 - q/(D+iB)) a^dag
            - (D-iB)(b^dag - a^dag)^2/(4(D+iB))] |00>
  conjugate state |kappa> (labels z, p):
      pi^(-1/4) (A-iC)^(-1/2) exp[-|z|^2/2 - (D+iB) p^2/(2(A-iC))]
        exp[(z/sqrt2 + ip/(A-iC)) b^dag + (z/sqrt2 - ip/(A-iC)) a^dag
            + (A+iC)(b^dag - a^dag)^2/(4(A-iC))] |00>

These kets are continuum-normalized; the stored amplitude vectors are the
exact truncated expansion coefficients, not unit vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix, identity as sparse_identity, kron as sparse_kron
from scipy.sparse.linalg import expm_multiply

from .fock import (
    FockSpace,
    FockState,
    annihilator_matrix,
    coherent_amplitudes,
    coherent_tail_mass,
    COHERENT_TAIL_LIMIT,
    LeakageError,
    make_space,
    position_validity_halfwidth,
)
from .gaussian import FresnelParams, RayMatrix, fresnel_params_from_ray, ray_from_fresnel

DEGENERACY_TOL = 1e-12


@dataclass(frozen=True)
class IcesLabel:
    """Labels (z, q) and Fresnel parameters of a coherent-entangled state."""

    z: complex
    q: float
    params: FresnelParams

    @property
    def ray(self) -> RayMatrix:
        return ray_from_fresnel(self.params)


@dataclass(frozen=True)
class KappaLabel:
    """Labels (z, p) and Fresnel parameters of the conjugate state."""

    z: complex
    p: float
    params: FresnelParams

    @property
    def ray(self) -> RayMatrix:
        return ray_from_fresnel(self.params)


def _ray_of(params) -> RayMatrix:
    if isinstance(params, RayMatrix):
        return params
    return ray_from_fresnel(params)


def _params_of(params) -> FresnelParams:
    if isinstance(params, FresnelParams):
        return params
    return fresnel_params_from_ray(params)


def gaussian_ket_amplitudes(cutoff: int, alpha: complex, gamma: complex) -> np.ndarray:
    """Amplitudes of exp(alpha a^dag + gamma a^dag^2)|0> (no prefactor)."""
    c = np.zeros(cutoff + 1, dtype=complex)
    c[0] = 1.0
    if cutoff >= 1:
        c[1] = alpha
    for n in range(1, cutoff):
        c[n + 1] = (alpha * c[n] + 2 * gamma * np.sqrt(n) * c[n - 1]) / np.sqrt(n + 1)
    return c


def icms_amplitudes(cutoff: int, q: float, ray: RayMatrix) -> np.ndarray:
    """Exact amplitudes of the intermediate coordinate-momentum ket."""
    dib = ray.D + 1j * ray.B
    if abs(dib) < DEGENERACY_TOL:
        raise ValueError(
            "degenerate parameters D + iB = 0: the state is a pure momentum-type "
            "limit; use the momentum-coordinate construction (imcs) instead"
        )
    pref = np.pi ** -0.25 / np.sqrt(dib) * np.exp(-(ray.A - 1j * ray.C) / dib * q * q / 2)
    return pref * gaussian_ket_amplitudes(
        cutoff, np.sqrt(2) * q / dib, -(ray.D - 1j * ray.B) / (2 * dib)
    )


def imcs_amplitudes(cutoff: int, p: float, ray: RayMatrix) -> np.ndarray:
    """Exact amplitudes of the intermediate momentum-coordinate ket."""
    aic = ray.A - 1j * ray.C
    if abs(aic) < DEGENERACY_TOL:
        raise ValueError(
            "degenerate parameters A - iC = 0: the state is a pure coordinate-type "
            "limit; use the coordinate-momentum construction (icms) instead"
        )
    pref = np.pi ** -0.25 / np.sqrt(aic) * np.exp(-(ray.D + 1j * ray.B) / aic * p * p / 2)
    return pref * gaussian_ket_amplitudes(
        cutoff, np.sqrt(2) * 1j * p / aic, (ray.A + 1j * ray.C) / (2 * aic)
    )


def icms(space: FockSpace, mode: str, q: float, params) -> FockState:
    """Intermediate coordinate-momentum ket on one mode of `space`."""
    ray = _ray_of(params)
    amps = icms_amplitudes(space.cutoff, q, ray)
    return _lift_single_mode(space, mode, amps)


def imcs(space: FockSpace, mode: str, p: float, params) -> FockState:
    """Intermediate momentum-coordinate ket on one mode of `space`."""
    ray = _ray_of(params)
    amps = imcs_amplitudes(space.cutoff, p, ray)
    return _lift_single_mode(space, mode, amps)


def _lift_single_mode(space: FockSpace, mode: str, amps: np.ndarray) -> FockState:
    if space.modes == 1:
        if mode != "a":
            raise ValueError("1-mode space has only mode a")
        return FockState(space, amps)
    vac = np.zeros(space.cutoff + 1, dtype=complex)
    vac[0] = 1.0
    full = np.kron(amps, vac) if mode == "a" else np.kron(vac, amps)
    return FockState(space, full)


# ---------------------------------------------------------------------------
# two-mode coherent-entangled states
# ---------------------------------------------------------------------------

def _two_mode_gaussian(cutoff: int, u: complex, v: complex, g: complex) -> np.ndarray:
    """Amplitudes c[n_a, n_b] of exp[u b^dag + v a^dag + g (b^dag - a^dag)^2]|00>.

    Recurrences (from commuting a and b through the exponential):
        sqrt(m+1) c_{m+1,n} = v c_{m,n} + 2g sqrt(m) c_{m-1,n} - 2g sqrt(n) c_{m,n-1}
        sqrt(n+1) c_{m,n+1} = u c_{m,n} + 2g sqrt(n) c_{m,n-1} - 2g sqrt(m) c_{m-1,n}
    """
    n1 = cutoff + 1
    c = np.zeros((n1, n1), dtype=complex)
    c[0, 0] = 1.0
    for n in range(cutoff):
        prev = c[0, n - 1] if n >= 1 else 0.0
        c[0, n + 1] = (u * c[0, n] + 2 * g * np.sqrt(n) * prev) / np.sqrt(n + 1)
    nvec = np.arange(n1)
    for m in range(cutoff):
        shifted = np.zeros(n1, dtype=complex)
        shifted[1:] = c[m, :-1]
        prev = c[m - 1, :] if m >= 1 else np.zeros(n1)
        c[m + 1, :] = (v * c[m, :] + 2 * g * np.sqrt(m) * prev
                       - 2 * g * np.sqrt(nvec) * shifted) / np.sqrt(m + 1)
    return c


def ices_closed_form(space: FockSpace, label: IcesLabel) -> FockState:
    ray = label.ray
    dib = ray.D + 1j * ray.B
    if abs(dib) < DEGENERACY_TOL:
        raise ValueError(
            "degenerate parameters D + iB = 0; use the conjugate-state "
            "construction (momentum-type labels) instead"
        )
    z, q = label.z, label.q
    u = z / np.sqrt(2) + q / dib
    v = z / np.sqrt(2) - q / dib
    g = -(ray.D - 1j * ray.B) / (4 * dib)
    pref = (np.pi ** -0.25 / np.sqrt(dib)
            * np.exp(-abs(z) ** 2 / 2 - (ray.A - 1j * ray.C) / dib * q * q / 2))
    c = pref * _two_mode_gaussian(space.cutoff, u, v, g)
    return FockState(space, c.ravel())


def kappa_closed_form(space: FockSpace, label: KappaLabel) -> FockState:
    ray = label.ray
    aic = ray.A - 1j * ray.C
    if abs(aic) < DEGENERACY_TOL:
        raise ValueError(
            "degenerate parameters A - iC = 0; use the coherent-entangled "
            "construction (coordinate-type labels) instead"
        )
    z, p = label.z, label.p
    u = z / np.sqrt(2) + 1j * p / aic
    v = z / np.sqrt(2) - 1j * p / aic
    g = (ray.A + 1j * ray.C) / (4 * aic)
    pref = (np.pi ** -0.25 / np.sqrt(aic)
            * np.exp(-abs(z) ** 2 / 2 - (ray.D + 1j * ray.B) / aic * p * p / 2))
    c = pref * _two_mode_gaussian(space.cutoff, u, v, g)
    return FockState(space, c.ravel())


def _bs_generator_sparse(cutoff: int, theta: float):
    a1 = csr_matrix(annihilator_matrix(cutoff))
    eye = sparse_identity(cutoff + 1, format="csr")
    abdag = sparse_kron(a1, a1.conj().T.tocsr(), format="csr")
    return (theta * (abdag - abdag.conj().T)).tocsc()


def _protocol_state(space: FockSpace, mode_a_amps: np.ndarray,
                    mode_b_amps: np.ndarray) -> FockState:
    """B(pi/4) applied to a product input, evaluated sector-exactly.

    Work at per-mode cutoff 2N: the beam-splitter generator preserves total
    photon number and every total-occupation sector <= 2N lies entirely inside
    that doubled box, so all windowed output amplitudes are exact.
    """
    n = space.cutoff
    big = 2 * n
    va = np.zeros(big + 1, dtype=complex)
    vb = np.zeros(big + 1, dtype=complex)
    va[: len(mode_a_amps)] = mode_a_amps
    vb[: len(mode_b_amps)] = mode_b_amps
    prod = np.kron(va, vb)
    gen = _bs_generator_sparse(big, np.pi / 4)
    out = expm_multiply(gen, prod).reshape(big + 1, big + 1)
    return FockState(space, out[: n + 1, : n + 1].ravel())


def _check_ices_label(space: FockSpace, z: complex, x: float):
    tail = coherent_tail_mass(space.cutoff, z)
    if tail > COHERENT_TAIL_LIMIT:
        raise LeakageError(
            f"coherent label |z|={abs(z):.3f} leaks past cutoff {space.cutoff}", tail
        )
    if abs(x) > position_validity_halfwidth(space.cutoff):
        import warnings

        warnings.warn(
            f"label {x:.3f} beyond the position-ket validity range at cutoff "
            f"{space.cutoff}", stacklevel=3,
        )


def ices(space: FockSpace, label: IcesLabel, method: str = "closed_form") -> FockState:
    """Coherent-entangled state |z, q> on a 2-mode space.

    method="closed_form" evaluates the raising-only exponential on |00>;
    method="protocol" sends coherent (x) coordinate-momentum inputs through a
    50:50 beam splitter. Both yield the same exact amplitudes up to tiny
    round-off, which the verification suites quantify.
    """
    if space.modes != 2:
        raise ValueError("coherent-entangled states need a 2-mode space")
    _check_ices_label(space, label.z, label.q)
    if method == "closed_form":
        return ices_closed_form(space, label)
    if method == "protocol":
        big = 2 * space.cutoff
        coh = coherent_amplitudes(big, label.z)
        ket = icms_amplitudes(big, label.q, label.ray)
        return _protocol_state(space, coh, ket)
    raise ValueError(f"unknown method {method!r}")


def ices_conjugate(space: FockSpace, label: KappaLabel,
                   method: str = "closed_form") -> FockState:
    """Conjugate coherent-entangled state |z, p| on a 2-mode space."""
    if space.modes != 2:
        raise ValueError("coherent-entangled states need a 2-mode space")
    _check_ices_label(space, label.z, label.p)
    if method == "closed_form":
        return kappa_closed_form(space, label)
    if method == "protocol":
        big = 2 * space.cutoff
        coh = coherent_amplitudes(big, label.z)
        ket = imcs_amplitudes(big, label.p, label.ray)
        return _protocol_state(space, coh, ket)
    raise ValueError(f"unknown method {method!r}")


def ices_block_amplitudes(z_values: np.ndarray, q: float, ray: RayMatrix,
                          kmax: int) -> np.ndarray:
    """Vectorized closed-form block amplitudes c[m, n, point] with m, n <= kmax
    for an array of coherent labels at fixed q (quadrature workhorse)."""
    dib = ray.D + 1j * ray.B
    z = np.asarray(z_values, dtype=complex)
    u = z / np.sqrt(2) + q / dib
    v = z / np.sqrt(2) - q / dib
    g = -(ray.D - 1j * ray.B) / (4 * dib)
    pref = (np.pi ** -0.25 / np.sqrt(dib)
            * np.exp(-np.abs(z) ** 2 / 2 - (ray.A - 1j * ray.C) / dib * q * q / 2))
    npts = z.shape[0]
    c = np.zeros((kmax + 1, kmax + 1, npts), dtype=complex)
    c[0, 0] = 1.0
    for n in range(kmax):
        prev = c[0, n - 1] if n >= 1 else 0.0
        c[0, n + 1] = (u * c[0, n] + 2 * g * np.sqrt(n) * prev) / np.sqrt(n + 1)
    nvec = np.arange(kmax + 1)[:, None]
    for m in range(kmax):
        shifted = np.zeros((kmax + 1, npts), dtype=complex)
        shifted[1:] = c[m, :-1]
        prev = c[m - 1] if m >= 1 else np.zeros((kmax + 1, npts))
        c[m + 1] = (v * c[m] + 2 * g * np.sqrt(m) * prev
                    - 2 * g * nvec ** 0.5 * shifted) / np.sqrt(m + 1)
    return pref * c


# ---------------------------------------------------------------------------
# Schmidt analysis
# ---------------------------------------------------------------------------

def schmidt_decompose(state: FockState):
    """Singular values (descending, squares summing to 1) and entanglement
    entropy -sum sigma^2 ln sigma^2 (natural log) of a 2-mode state."""
    if state.space.modes != 2:
        raise ValueError("Schmidt decomposition needs a 2-mode state")
    nrm = state.norm()
    if nrm == 0.0 or not np.isfinite(nrm):
        raise ValueError("zero-norm state")
    mat = state.coefficient_matrix() / nrm
    sigma = np.linalg.svd(mat, compute_uv=False)
    sigma = np.sort(sigma)[::-1]
    p = sigma ** 2
    p = p[p > 0]
    entropy = float(-np.sum(p * np.log(p)))
    return sigma, entropy
