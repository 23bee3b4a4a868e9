"""Verification suites: each check returns quantified residuals as records.

Residual conventions:

* vector comparisons are phase-aligned (one global phase allowed, fixed on the
  largest reference component) and reported relative to the reference norm;
* operator comparisons are spectral-norm distances of inner blocks (every mode
  occupation <= k, default k = cutoff/2);
* checks whose exact statement lives above the truncation are evaluated with
  guard-band headroom (see gaussian module) so the reported residual measures
  the claim, not the truncation.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm as _expm
from scipy.sparse import csr_matrix, identity as _sp_eye, kron as _sp_kron
from scipy.sparse.linalg import expm_multiply

from . import numerics
from .fock import (
    FockOperator,
    FockSpace,
    FockState,
    annihilator_matrix,
    basis_state,
    coherent_amplitudes,
    hermite_function_amplitudes,
    inner,
    make_space,
    mode_operator,
)
from .gaussian import (
    FresnelParams,
    RayMatrix,
    SqueezeStrength,
    _as_lam,
    conjugated_ladder_window,
    fresnel_apply_window,
    fresnel_matrix,
    fresnel_params_from_ray,
    fresnel_row_slab,
    fresnel_unitarity_window,
    guard_cutoff,
    ray_from_fresnel,
    sandwich_squeeze_params,
    sandwich_squeeze_window,
    squeeze_generator_matrix,
)
from .numerics import (
    ConvergenceError,
    GaussianIntegralSpec,
    QuadratureScheme,
    gaussian_integral_1d,
    gaussian_integral_1d_quadrature,
    gaussian_integral_2d,
    gaussian_integral_2d_quadrature,
    hermite_poly,
)
from .states import (
    IcesLabel,
    KappaLabel,
    ices,
    ices_block_amplitudes,
    ices_conjugate,
    icms,
    icms_amplitudes,
    imcs,
    imcs_amplitudes,
    schmidt_decompose,
)


@dataclass(frozen=True)
class ToleranceTiers:
    strict: float = 1e-8
    standard: float = 1e-6
    quadrature: float = 1e-2

    def of(self, tier: str) -> float:
        return getattr(self, tier)


DEFAULT_TIERS = ToleranceTiers()


@dataclass(frozen=True)
class ResidualRecord:
    """One verified claim: residual, tolerance, and pass/fail verdict."""

    claim: str
    params: dict
    residual: float
    tolerance: float
    tier: str
    norm_basis: str

    def __post_init__(self):
        if self.residual < 0 or not np.isfinite(self.residual):
            raise ValueError(f"invalid residual {self.residual!r}")

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance

    def as_dict(self) -> dict:
        return {
            "claim": self.claim,
            "params": self.params,
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "tier": self.tier,
            "norm_basis": self.norm_basis,
            "verdict": "pass" if self.passed else "fail",
        }


def _rec(claim, params, residual, tier, tiers: ToleranceTiers,
         norm_basis="relative", tolerance=None) -> ResidualRecord:
    tol = tiers.of(tier) if tolerance is None else float(tolerance)
    tier_name = tier if tolerance is None else "custom"
    return ResidualRecord(claim, _jsonable(params), float(residual), tol,
                          tier_name, norm_basis)


def _jsonable(params: dict) -> dict:
    out = {}
    for key, val in params.items():
        if isinstance(val, complex):
            out[key] = [val.real, val.imag]
        elif isinstance(val, (np.floating, np.integer)):
            out[key] = val.item()
        elif isinstance(val, (list, tuple)):
            out[key] = [_jsonable({"x": v})["x"] for v in val]
        elif isinstance(val, RayMatrix):
            out[key] = [val.A, val.B, val.C, val.D]
        elif isinstance(val, FresnelParams):
            out[key] = {"s": [val.s.real, val.s.imag], "r": [val.r.real, val.r.imag]}
        else:
            out[key] = val
    return out


def phase_aligned_residual(reference: np.ndarray, candidate: np.ndarray) -> float:
    """Relative L2 distance after aligning one global phase on the largest
    reference component."""
    ref = np.asarray(reference).ravel()
    cand = np.asarray(candidate).ravel()
    i = int(np.argmax(np.abs(ref)))
    if cand[i] == 0:
        return float(np.linalg.norm(cand - ref) / np.linalg.norm(ref))
    ph = ref[i] / cand[i]
    ph /= abs(ph)
    return float(np.linalg.norm(cand * ph - ref) / np.linalg.norm(ref))


def random_unimodular_ray(rng: np.random.Generator, r_cap: float | None = None,
                          span: float = 2.0) -> RayMatrix:
    """Random exactly unimodular ABCD: A, B, C uniform with |A| >= 0.2 and
    D = (1 + BC)/A; optionally resampled until the Fresnel |r| <= r_cap."""
    while True:
        a = rng.uniform(-span, span)
        if abs(a) < 0.2:
            continue
        b = rng.uniform(-span, span)
        c = rng.uniform(-span, span)
        d = (1.0 + b * c) / a
        ray = RayMatrix(a, b, c, d)
        if r_cap is not None and abs(fresnel_params_from_ray(ray).r) > r_cap:
            continue
        return ray


def _params_pair(params) -> tuple[FresnelParams, RayMatrix]:
    if isinstance(params, RayMatrix):
        return fresnel_params_from_ray(params), params
    return params, ray_from_fresnel(params)


@functools.lru_cache(maxsize=8)
def _bs_matrix(cutoff: int, theta: float = np.pi / 4) -> np.ndarray:
    """Cached dense 2-mode beam-splitter matrix exp[theta(ab^dag - a^dag b)]."""
    a1 = annihilator_matrix(cutoff)
    gen = np.kron(a1, a1.conj().T)
    gen = theta * (gen - gen.conj().T)
    mat = _expm(gen)
    mat.flags.writeable = False
    return mat


def _block_indices(cutoff: int, k: int) -> np.ndarray:
    idx = np.arange((cutoff + 1) ** 2).reshape(cutoff + 1, cutoff + 1)
    return idx[: k + 1, : k + 1].ravel()


# ---------------------------------------------------------------------------
# defining properties of the intermediate kets
# ---------------------------------------------------------------------------

def fresnel_defining_check(q: float, ray: RayMatrix, cutoff: int = 32,
                           tiers: ToleranceTiers = DEFAULT_TIERS) -> ResidualRecord:
    """Guard-banded F applied to a position ket against the closed-form
    coordinate-momentum ket, up to one global phase."""
    p = fresnel_params_from_ray(ray)
    guard = guard_cutoff(cutoff, abs(p.r)) + 2 * cutoff
    ket = hermite_function_amplitudes(guard, q).astype(complex)
    got = fresnel_apply_window(p.s, p.r, ket, cutoff, guard=guard)
    want = icms_amplitudes(cutoff, q, ray)
    res = phase_aligned_residual(want, got)
    return _rec("fresnel-defining-icms",
                {"q": q, "ray": ray, "cutoff": cutoff, "guard": guard},
                res, "standard", tiers)


def imcs_defining_check(p_val: float, ray: RayMatrix, cutoff: int = 32,
                        tiers: ToleranceTiers = DEFAULT_TIERS) -> ResidualRecord:
    """Same defining property for the momentum-coordinate ket."""
    p = fresnel_params_from_ray(ray)
    guard = guard_cutoff(cutoff, abs(p.r)) + 2 * cutoff
    phases = 1j ** np.arange(guard + 1)
    ket = phases * hermite_function_amplitudes(guard, p_val)
    got = fresnel_apply_window(p.s, p.r, ket, cutoff, guard=guard)
    want = imcs_amplitudes(cutoff, p_val, ray)
    res = phase_aligned_residual(want, got)
    return _rec("fresnel-defining-imcs",
                {"p": p_val, "ray": ray, "cutoff": cutoff, "guard": guard},
                res, "standard", tiers)


def fresnel_conjugation_table_check(params, cutoff: int = 32, k: int | None = None,
                                    tiers: ToleranceTiers = DEFAULT_TIERS) -> list:
    """The four ladder conjugations of F, the adjoint-parameter identity
    F^dag(s, r) = F(-r, s*), and inner-block unitarity of F^dag F."""
    p, ray = _params_pair(params)
    if k is None:
        k = cutoff // 2
    s, r = p.s, p.r
    a = annihilator_matrix(cutoff)
    ad = a.conj().T
    table = [
        ("fresnel-conjugation-annihilate", "annihilate", False, np.conj(s) * a + r * ad),
        ("fresnel-conjugation-annihilate-adjoint", "annihilate", True, s * a - r * ad),
        ("fresnel-conjugation-create", "create", False, s * ad + np.conj(r) * a),
        ("fresnel-conjugation-create-adjoint", "create", True, np.conj(s) * ad - np.conj(r) * a),
    ]
    out = []
    meta = {"params": p, "cutoff": cutoff, "k": k}
    for claim, kind, dag, rhs in table:
        lhs = conjugated_ladder_window(s, r, cutoff, kind, dagger_outer=dag)
        res = np.linalg.norm(lhs[: k + 1, : k + 1] - rhs[: k + 1, : k + 1], ord=2)
        out.append(_rec(claim, meta, res, "standard", tiers, tolerance=1e-7,
                        norm_basis="block-2norm"))
    adj = fresnel_matrix(cutoff, s, r).conj().T
    swapped = fresnel_matrix(cutoff, np.conj(s), -r)
    res = phase_aligned_residual(adj[: k + 1, : k + 1].ravel(),
                                 swapped[: k + 1, : k + 1].ravel())
    out.append(_rec("fresnel-adjoint-parameter-map", meta, res, "strict", tiers))
    uni = fresnel_unitarity_window(s, r, cutoff)
    res = np.linalg.norm(uni[: k + 1, : k + 1] - np.eye(k + 1), ord=2)
    out.append(_rec("fresnel-unitarity", meta, res, "strict", tiers,
                    norm_basis="block-2norm"))
    return out


def degenerate_limit_checks(q: float = 0.7, p_val: float = 0.4, cutoff: int = 32,
                            tiers: ToleranceTiers = DEFAULT_TIERS) -> list:
    """Parameter degenerations: the intermediate kets collapse to position and
    momentum kets at the identity and antidiagonal ray matrices."""
    identity_ray = RayMatrix(1.0, 0.0, 0.0, 1.0)
    antidiag_ray = RayMatrix(0.0, -1.0, 1.0, 0.0)
    pos = hermite_function_amplitudes(cutoff, q).astype(complex)
    mom = (1j ** np.arange(cutoff + 1)) * hermite_function_amplitudes(cutoff, q)
    out = [
        _rec("icms-position-limit", {"q": q, "cutoff": cutoff},
             phase_aligned_residual(pos, icms_amplitudes(cutoff, q, identity_ray)),
             "standard", tiers, tolerance=1e-7),
        _rec("icms-momentum-limit", {"q": q, "cutoff": cutoff},
             phase_aligned_residual(mom, icms_amplitudes(cutoff, q, antidiag_ray)),
             "standard", tiers, tolerance=1e-7),
    ]
    momp = (1j ** np.arange(cutoff + 1)) * hermite_function_amplitudes(cutoff, p_val)
    posneg = hermite_function_amplitudes(cutoff, -p_val).astype(complex)
    out += [
        _rec("imcs-momentum-limit", {"p": p_val, "cutoff": cutoff},
             phase_aligned_residual(momp, imcs_amplitudes(cutoff, p_val, identity_ray)),
             "standard", tiers, tolerance=1e-7),
        _rec("imcs-position-limit", {"p": p_val, "cutoff": cutoff},
             phase_aligned_residual(posneg, imcs_amplitudes(cutoff, p_val, antidiag_ray)),
             "standard", tiers, tolerance=1e-7),
    ]
    return out


# ---------------------------------------------------------------------------
# eigenvalue relations
# ---------------------------------------------------------------------------

def _quadrature_ops(space: FockSpace):
    qa = mode_operator(space, "a", "Q").matrix
    pa = mode_operator(space, "a", "P").matrix
    if space.modes == 1:
        return qa, pa, None, None
    qb = mode_operator(space, "b", "Q").matrix
    pb = mode_operator(space, "b", "P").matrix
    return qa, pa, qb, pb


def eigen_residual(kind: str, label, space: FockSpace, k: int | None = None,
                   tiers: ToleranceTiers = DEFAULT_TIERS) -> list:
    """Residuals ||(Op - eigenvalue) psi||_block / ||psi|| for the eigen
    relations of each state family.

    `label`: (value, ray_or_params) for icms/imcs; IcesLabel / KappaLabel for
    the entangled states.
    """
    if k is None:
        k = space.cutoff // 2
    recs = []
    if kind in ("icms", "imcs"):
        value, params = label
        p, ray = _params_pair(params)
        qa, pa, _, _ = _quadrature_ops(space)
        if kind == "icms":
            state = icms(space, "a", value, ray)
            op = ray.D * qa - ray.B * pa
            claim = "icms-eigenvalue"
        else:
            state = imcs(space, "a", value, ray)
            op = ray.A * pa - ray.C * qa
            claim = "imcs-eigenvalue"
        w = op @ state.amplitudes - value * state.amplitudes
        res = np.linalg.norm(w[: k + 1]) / state.norm()
        recs.append(_rec(claim, {"value": value, "ray": ray,
                                 "cutoff": space.cutoff, "k": k},
                         res, "standard", tiers))
        return recs

    qa, pa, qb, pb = _quadrature_ops(space)
    a_op = mode_operator(space, "a", "annihilate").matrix
    b_op = mode_operator(space, "b", "annihilate").matrix
    blk = _block_indices(space.cutoff, k)
    if kind == "ices":
        ray = label.ray
        state = ices(space, label)
        pairs = [
            ("ices-eigenvalue-mode-sum", a_op + b_op, np.sqrt(2) * label.z),
            ("ices-eigenvalue-quadrature",
             ray.D * (qb - qa) - ray.B * (pb - pa), np.sqrt(2) * label.q),
        ]
        meta = {"z": label.z, "q": label.q, "ray": ray,
                "cutoff": space.cutoff, "k": k}
    elif kind == "kappa":
        ray = label.ray
        state = ices_conjugate(space, label)
        pairs = [
            ("kappa-eigenvalue-mode-sum", a_op + b_op, np.sqrt(2) * label.z),
            ("kappa-eigenvalue-quadrature",
             ray.A * (pb - pa) - ray.C * (qb - qa), np.sqrt(2) * label.p),
        ]
        meta = {"z": label.z, "p": label.p, "ray": ray,
                "cutoff": space.cutoff, "k": k}
    else:
        raise ValueError(f"unknown state kind {kind!r}")
    for claim, op, eig in pairs:
        w = op @ state.amplitudes - eig * state.amplitudes
        res = np.linalg.norm(w[blk]) / state.norm()
        recs.append(_rec(claim, meta, res, "standard", tiers, tolerance=1e-5))
    return recs


def coherent_entangled_limit_checks(space: FockSpace, z: complex = 0.4 + 0.1j,
                                    q: float = 0.6, p_val: float = 0.5,
                                    k: int | None = None,
                                    tiers: ToleranceTiers = DEFAULT_TIERS) -> list:
    """Identity-ray degenerations of the entangled states: |zeta> becomes the
    coherent-entangled eigenstate of Q_b - Q_a, |kappa> of P_b - P_a."""
    if k is None:
        k = space.cutoff // 2
    identity_ray = RayMatrix(1.0, 0.0, 0.0, 1.0)
    qa, pa, qb, pb = _quadrature_ops(space)
    blk = _block_indices(space.cutoff, k)
    out = []
    st = ices(space, IcesLabel(z, q, fresnel_params_from_ray(identity_ray)))
    w = (qb - qa) @ st.amplitudes - np.sqrt(2) * q * st.amplitudes
    out.append(_rec("ices-coherent-entangled-limit",
                    {"z": z, "q": q, "cutoff": space.cutoff, "k": k},
                    np.linalg.norm(w[blk]) / st.norm(), "standard", tiers,
                    tolerance=1e-7))
    stk = ices_conjugate(space, KappaLabel(z, p_val, fresnel_params_from_ray(identity_ray)))
    w = (pb - pa) @ stk.amplitudes - np.sqrt(2) * p_val * stk.amplitudes
    out.append(_rec("kappa-conjugate-limit",
                    {"z": z, "p": p_val, "cutoff": space.cutoff, "k": k},
                    np.linalg.norm(w[blk]) / stk.norm(), "standard", tiers,
                    tolerance=1e-7))
    return out


def ices_equivalence_check(label: IcesLabel, space: FockSpace,
                           tiers: ToleranceTiers = DEFAULT_TIERS) -> ResidualRecord:
    """Closed form against the beam-splitter protocol, up to a global phase."""
    closed = ices(space, label, method="closed_form")
    proto = ices(space, label, method="protocol")
    res = phase_aligned_residual(closed.amplitudes, proto.amplitudes)
    return _rec("ices-method-equivalence",
                {"z": label.z, "q": label.q, "ray": label.ray, "cutoff": space.cutoff},
                res, "standard", tiers)


def kappa_equivalence_check(label: KappaLabel, space: FockSpace,
                            tiers: ToleranceTiers = DEFAULT_TIERS) -> ResidualRecord:
    closed = ices_conjugate(space, label, method="closed_form")
    proto = ices_conjugate(space, label, method="protocol")
    res = phase_aligned_residual(closed.amplitudes, proto.amplitudes)
    return _rec("kappa-method-equivalence",
                {"z": label.z, "p": label.p, "ray": label.ray, "cutoff": space.cutoff},
                res, "standard", tiers)


# ---------------------------------------------------------------------------
# orthogonality structure
# ---------------------------------------------------------------------------

def _protocol_state_unitary_bs(space: FockSpace, z: complex, q: float,
                               ray: RayMatrix) -> np.ndarray:
    """Entangled state via the exactly unitary truncated beam splitter at the
    working cutoff. Because B^dag B = 1 holds exactly for the truncated matrix,
    inner products of two such states factor exactly into the coherent part
    times a z-independent intermediate-ket part, which is the level at which
    the partial-orthogonality statement survives truncation."""
    coh = coherent_amplitudes(space.cutoff, z)
    ket = icms_amplitudes(space.cutoff, q, ray)
    return _bs_matrix(space.cutoff) @ np.kron(coh, ket)


def overlap_factorization(z: complex, zp: complex, q: float, qp: float, params,
                          space: FockSpace,
                          tiers: ToleranceTiers = DEFAULT_TIERS) -> ResidualRecord:
    """Ratio <zeta(z', q')|zeta(z, q)> / <zeta(0, q')|zeta(0, q)> against the
    coherent factor exp[z'* z - (|z'|^2 + |z|^2)/2]."""
    p, ray = _params_pair(params)
    num = np.vdot(_protocol_state_unitary_bs(space, zp, qp, ray),
                  _protocol_state_unitary_bs(space, z, q, ray))
    den = np.vdot(_protocol_state_unitary_bs(space, 0.0, qp, ray),
                  _protocol_state_unitary_bs(space, 0.0, q, ray))
    if abs(den) < 1e-12:
        raise ValueError(
            "regularized delta factor is numerically zero for this (q, q') pair; "
            f"|denominator| = {abs(den):.3e}"
        )
    ratio = num / den
    factor = np.exp(np.conj(zp) * z - (abs(zp) ** 2 + abs(z) ** 2) / 2)
    res = abs(ratio - factor) / abs(factor)
    return _rec("overlap-coherent-factorization",
                {"z": z, "zp": zp, "q": q, "qp": qp, "ray": ray,
                 "cutoff": space.cutoff, "den_abs": abs(den)},
                res, "standard", tiers, tolerance=1e-7)


def nascent_delta_checks(params, cutoffs=(16, 24, 32), q0: float = 0.2,
                         delta_max: float = 1.2, n_delta: int = 241,
                         tiers: ToleranceTiers = DEFAULT_TIERS) -> list:
    """|<zeta(z, q')|zeta(z, q)>| as a function of q - q' is a truncation-
    regularized delta: peaked at zero separation, with a width that shrinks as
    the cutoff grows and a separation-integral that stays put."""
    p, ray = _params_pair(params)
    deltas = np.linspace(0.0, delta_max, n_delta)
    widths, integrals, peak_ok = [], [], True
    for cutoff in cutoffs:
        space = make_space(2, cutoff)
        ref = _protocol_state_unitary_bs(space, 0.0, q0, ray)
        vals = np.empty(n_delta)
        for i, d in enumerate(deltas):
            vals[i] = abs(np.vdot(_protocol_state_unitary_bs(space, 0.0, q0 + d, ray), ref))
        peak_ok = peak_ok and int(np.argmax(vals)) == 0
        half = vals[0] / 2
        below = np.nonzero(vals < half)[0]
        if below.size == 0:
            widths.append(float(delta_max))
        else:
            i = below[0]
            x0, x1 = deltas[i - 1], deltas[i]
            y0, y1 = vals[i - 1], vals[i]
            widths.append(float(x0 + (half - y0) * (x1 - x0) / (y1 - y0)))
        integrals.append(float(np.trapezoid(vals, deltas)))
    meta = {"ray": ray, "q0": q0, "cutoffs": list(cutoffs),
            "widths": widths, "integrals": integrals}
    width_growth = max(
        (widths[i + 1] - widths[i]) / widths[i] for i in range(len(widths) - 1)
    )
    drift = max(
        abs(integrals[i + 1] - integrals[i]) / integrals[i]
        for i in range(len(integrals) - 1)
    )
    return [
        _rec("overlap-delta-peak", meta, 0.0 if peak_ok else 1.0, "standard",
             tiers, tolerance=1e-12, norm_basis="indicator"),
        _rec("overlap-delta-width-monotone", meta, max(0.0, width_growth),
             "standard", tiers, tolerance=1e-12, norm_basis="fractional-growth"),
        _rec("overlap-delta-integral-stability", meta, drift, "quadrature",
             tiers, tolerance=0.25, norm_basis="fractional-drift"),
    ]


# ---------------------------------------------------------------------------
# completeness
# ---------------------------------------------------------------------------

def _completeness_block_residual(ray: RayMatrix, scheme: QuadratureScheme,
                                 k: int) -> float:
    q_nodes, q_weights = scheme.q_nodes_weights()
    z_nodes, z_weights = scheme.z_nodes_weights()
    dim = (k + 1) ** 2
    acc = np.zeros((dim, dim), dtype=complex)
    for qv, wq in zip(q_nodes, q_weights):
        c = ices_block_amplitudes(z_nodes, qv, ray, k)
        psi = c.reshape(dim, -1)
        acc += (psi * (z_weights * wq)) @ psi.conj().T
    return float(np.linalg.norm(acc - np.eye(dim), ord=2))


def _completeness_vacuum_slice(ray: RayMatrix, scheme: QuadratureScheme) -> float:
    q_nodes, q_weights = scheme.q_nodes_weights()
    z_nodes, z_weights = scheme.z_nodes_weights()
    dib = ray.D + 1j * ray.B
    decay = ((ray.A - 1j * ray.C) / dib).real
    zpart = float(np.sum(z_weights * np.exp(-np.abs(z_nodes) ** 2)))
    qpart = float(np.sum(q_weights * np.exp(-decay * q_nodes ** 2))) / (
        np.sqrt(np.pi) * abs(dib)
    )
    return zpart * qpart


def completeness_check(params, scheme: QuadratureScheme, space: FockSpace,
                       k: int = 3, refinements: int = 2,
                       tiers: ToleranceTiers = DEFAULT_TIERS) -> list:
    """Quadrature of the entangled-state projector against the identity on the
    occupation <= k block, the scalar vacuum slice, and the residual trend
    under scheme refinement (resolution and domain both grow)."""
    p, ray = _params_pair(params)
    schemes = [scheme]
    for _ in range(refinements):
        schemes.append(schemes[-1].refined())
    residuals = [_completeness_block_residual(ray, sch, k) for sch in schemes]
    vac = _completeness_vacuum_slice(ray, scheme)
    meta = {
        "ray": ray, "k": k, "cutoff": space.cutoff,
        "scheme": [scheme.q_order, scheme.q_halfwidth, scheme.z_radius,
                   scheme.n_radial, scheme.n_angular],
        "residual_trend": residuals,
    }
    recs = [
        _rec("completeness-block", meta, residuals[0], "quadrature", tiers,
             norm_basis="block-2norm"),
        _rec("completeness-vacuum-slice", meta, abs(vac - 1.0), "quadrature",
             tiers, tolerance=1e-3, norm_basis="absolute"),
    ]
    if refinements > 0:
        worst_growth = max(
            (residuals[i + 1] - residuals[i]) / residuals[i]
            for i in range(len(residuals) - 1)
        )
        recs.append(_rec("completeness-refinement-monotone", meta,
                         max(0.0, worst_growth), "quadrature", tiers,
                         tolerance=1e-12, norm_basis="fractional-growth"))
    return recs


# ---------------------------------------------------------------------------
# conjugate-pair commutator
# ---------------------------------------------------------------------------

def conjugate_commutator_check(abcd, space: FockSpace, k: int | None = None,
                               tiers: ToleranceTiers = DEFAULT_TIERS,
                               claim: str = "conjugate-commutator") -> ResidualRecord:
    """[A(P_b - P_a) - C(Q_b - Q_a), D(Q_b - Q_a) - B(P_b - P_a)] + 2i = 0 on
    the inner block (scales with AD - BC, which negative controls exploit).

    Accepts a RayMatrix or a raw (A, B, C, D) tuple so non-unimodular controls
    can be driven through the same code path.
    """
    if isinstance(abcd, RayMatrix):
        a_, b_, c_, d_ = abcd.A, abcd.B, abcd.C, abcd.D
    else:
        a_, b_, c_, d_ = map(float, abcd)
    if k is None:
        k = space.cutoff // 2
    qa, pa, qb, pb = _quadrature_ops(space)
    x = a_ * (pb - pa) - c_ * (qb - qa)
    y = d_ * (qb - qa) - b_ * (pb - pa)
    comm = x @ y - y @ x
    blk = _block_indices(space.cutoff, k)
    sub = comm[np.ix_(blk, blk)] + 2j * np.eye(blk.size)
    res = np.linalg.norm(sub, ord=2)
    return _rec(claim,
                {"abcd": [a_, b_, c_, d_], "det": a_ * d_ - b_ * c_,
                 "cutoff": space.cutoff, "k": k},
                res, "standard", tiers, tolerance=1e-10, norm_basis="block-2norm")


# ---------------------------------------------------------------------------
# the squeezing-type unitary U = B F S F^dag B^dag
# ---------------------------------------------------------------------------

def _user_box_indices(big_cutoff: int, cutoff: int) -> np.ndarray:
    idx = np.arange((big_cutoff + 1) ** 2).reshape(big_cutoff + 1, big_cutoff + 1)
    return idx[: cutoff + 1, : cutoff + 1].ravel()


def squeeze_operator(space: FockSpace, params, strength) -> FockOperator:
    """U = B(pi/4) F S F^dag B(-pi/4) with exact matrix elements on `space`.

    Evaluated by dressing the guard-banded single-mode sandwich window with the
    beam splitter in a doubled box, where every element of the user box is
    sector-exact.
    """
    if space.modes != 2:
        raise ValueError("the squeezing unitary lives on a 2-mode space")
    p, ray = _params_pair(params)
    lam = _as_lam(strength)
    n = space.cutoff
    big = 2 * n
    w_win = sandwich_squeeze_window(p.s, p.r, lam, big)
    bs = _bs_matrix(big)
    eye = np.eye(big + 1)
    u_big = bs @ np.kron(eye, w_win) @ bs.conj().T
    sel = _user_box_indices(big, n)
    return FockOperator(space, u_big[np.ix_(sel, sel)])


def _sandwich_ladder_windows(s: complex, r: complex, lam: float, window: int):
    """Windows of W b W^dag, W b^dag W^dag and W W^dag for W = F S F^dag,
    all from literal slab products with guard headroom."""
    import math as _math

    g1 = guard_cutoff(window, abs(r), _math.exp(2 * abs(lam)))
    fs = fresnel_row_slab(s, r, window + 1, g1 + 1)
    s_mid = _expm(squeeze_generator_matrix(g1, lam))
    fd = fresnel_row_slab(np.conj(s), -r, g1 + 1, guard_cutoff(g1, abs(r)) + 1)
    a_in = annihilator_matrix(fd.shape[1] - 1)
    m_b = fd @ a_in @ fd.conj().T           # window of F^dag b F
    m_bd = fd @ a_in.conj().T @ fd.conj().T  # window of F^dag b^dag F
    m_id = fd @ fd.conj().T                  # window of F^dag F
    left = fs @ s_mid
    right = s_mid.conj().T @ fs.conj().T
    return left @ m_b @ right, left @ m_bd @ right, left @ m_id @ right


def squeeze_unitarity_checks(space: FockSpace, params, strength,
                             k: int | None = None,
                             tiers: ToleranceTiers = DEFAULT_TIERS) -> list:
    """U U^dag = 1 on the inner block and U(-lam) = U^dag(lam) elementwise."""
    p, ray = _params_pair(params)
    lam = _as_lam(strength)
    if k is None:
        k = space.cutoff // 2
    n = space.cutoff
    big = 2 * n
    _, _, wwd = _sandwich_ladder_windows(p.s, p.r, lam, big)
    bs = _bs_matrix(big)
    eye = np.eye(big + 1)
    uud = bs @ np.kron(eye, wwd) @ bs.conj().T
    blk = _user_box_indices(big, k)
    res_u = np.linalg.norm(uud[np.ix_(blk, blk)] - np.eye(blk.size), ord=2)
    meta = {"params": p, "lam": lam, "cutoff": n, "k": k}
    u_plus = squeeze_operator(space, p, lam)
    u_minus = squeeze_operator(space, p, -lam)
    blk_user = _block_indices(n, k)
    diff = u_minus.matrix[np.ix_(blk_user, blk_user)] - \
        u_plus.matrix.conj().T[np.ix_(blk_user, blk_user)]
    res_inv = np.linalg.norm(diff, ord=2)
    return [
        _rec("squeeze-unitarity", meta, res_u, "strict", tiers,
             norm_basis="block-2norm"),
        _rec("squeeze-inverse-is-adjoint", meta, res_inv, "strict", tiers,
             norm_basis="block-2norm"),
    ]


def squeeze_degeneration_check(space: FockSpace, strength,
                               k: int | None = None,
                               tiers: ToleranceTiers = DEFAULT_TIERS) -> ResidualRecord:
    """At s = 1, r = 0 the Fresnel factors cancel and U collapses to
    B S B^dag."""
    lam = _as_lam(strength)
    if k is None:
        k = space.cutoff // 2
    p = FresnelParams(1.0, 0.0)
    u = squeeze_operator(space, p, lam)
    n = space.cutoff
    big = 2 * n
    bs = _bs_matrix(big)
    s_single = _expm(squeeze_generator_matrix(big, lam))
    ref_big = bs @ np.kron(np.eye(big + 1), s_single) @ bs.conj().T
    sel = _user_box_indices(big, n)
    ref = ref_big[np.ix_(sel, sel)]
    blk = _block_indices(n, k)
    res = np.linalg.norm(u.matrix[np.ix_(blk, blk)] - ref[np.ix_(blk, blk)], ord=2)
    return _rec("squeeze-degenerate-fresnel-free",
                {"lam": lam, "cutoff": n, "k": k}, res, "strict", tiers,
                norm_basis="block-2norm")


def _printed_generator_sparse(s: complex, r: complex, lam: float, cutoff: int):
    """The printed exponent of U: (lam/2)[(1/2)(s*^2 - r*^2)(a - b)^2 +
    s* r (1 + b^dag b + a^dag a - a^dag b - a b^dag)] minus its adjoint."""
    a1 = csr_matrix(annihilator_matrix(cutoff))
    e1 = _sp_eye(cutoff + 1, format="csr")
    a2 = _sp_kron(a1, e1, format="csr")
    b2 = _sp_kron(e1, a1, format="csr")
    ad2 = a2.conj().T.tocsr()
    bd2 = b2.conj().T.tocsr()
    amb = (a2 - b2).tocsr()
    bracket = (0.5 * (np.conj(s) ** 2 - np.conj(r) ** 2) * (amb @ amb)
               + np.conj(s) * r * (_sp_eye((cutoff + 1) ** 2, format="csr")
                                   + bd2 @ b2 + ad2 @ a2 - ad2 @ b2 - a2 @ bd2))
    gen = lam / 2 * (bracket - bracket.conj().T)
    return gen.tocsc()


def squeeze_generator_check(space: FockSpace, params, strength,
                            k: int | None = None,
                            tiers: ToleranceTiers = DEFAULT_TIERS) -> ResidualRecord:
    """matrix exponential of the printed generator against the product-form U,
    compared on the inner block."""
    p, ray = _params_pair(params)
    lam = _as_lam(strength)
    if k is None:
        k = space.cutoff // 2
    guard = guard_cutoff(2 * k, abs(np.sinh(lam))) + 8
    gen = _printed_generator_sparse(p.s, p.r, lam, guard)
    cols = []
    dim_g = (guard + 1) ** 2
    for ia in range(k + 1):
        for ib in range(k + 1):
            e = np.zeros(dim_g, dtype=complex)
            e[ia * (guard + 1) + ib] = 1.0
            cols.append(e)
    v = np.array(cols).T
    ev = expm_multiply(gen, v)
    rows = [ia * (guard + 1) + ib for ia in range(k + 1) for ib in range(k + 1)]
    exp_block = ev[rows, :]
    u = squeeze_operator(space, p, lam)
    blk = _block_indices(space.cutoff, k)
    u_block = u.matrix[np.ix_(blk, blk)]
    res = np.linalg.norm(exp_block - u_block, ord=2)
    return _rec("squeeze-generator",
                {"params": p, "lam": lam, "cutoff": space.cutoff, "k": k,
                 "guard": guard},
                res, "standard", tiers, norm_basis="block-2norm")


def _linear_coeffs_from_banded(mat: np.ndarray, cutoff: int) -> tuple:
    """Coefficients (ca, cb, cad, cbd) of a 2-mode operator known to be linear
    in the ladder operators, read off single-quantum matrix elements."""
    def el(ma, mb, na, nb):
        return mat[ma * (cutoff + 1) + mb, na * (cutoff + 1) + nb]

    return el(0, 0, 1, 0), el(0, 0, 0, 1), el(1, 0, 0, 0), el(0, 1, 0, 0)


def squeeze_heisenberg_checks(space: FockSpace, params, strength,
                              k: int | None = None,
                              tiers: ToleranceTiers = DEFAULT_TIERS) -> list:
    """All printed Heisenberg transforms of U: the two ladder transforms, the
    four single quadratures, and the four sum/difference combinations.

    U X U^dag is evaluated as B [B^dag X B conjugated through the single-mode
    sandwich] B^dag: B^dag X B is computed as an honest matrix product in the
    doubled box (exact there), verified to be ladder-linear, and its b-mode
    part conjugated through guard-banded windows of W b W^dag.
    """
    p, ray = _params_pair(params)
    lam = _as_lam(strength)
    if k is None:
        k = space.cutoff // 2
    s, r = p.s, p.r
    n = space.cutoff
    big = 2 * n
    wb, wbd, wwd = _sandwich_ladder_windows(s, r, lam, big)
    bs = _bs_matrix(big)
    eye = np.eye(big + 1)
    a1 = annihilator_matrix(big)
    a2 = np.kron(a1, eye)
    b2 = np.kron(eye, a1)
    ad2, bd2 = a2.conj().T, b2.conj().T
    sq2 = np.sqrt(2)
    qa, qb = (a2 + ad2) / sq2, (b2 + bd2) / sq2
    pa, pb = (a2 - ad2) / (1j * sq2), (b2 - bd2) / (1j * sq2)
    blk = _user_box_indices(big, k)
    sub = np.ix_(blk, blk)

    def conjugate(x: np.ndarray) -> tuple[np.ndarray, float]:
        """U X U^dag window and the ladder-linearity residual of B^dag X B."""
        y = bs.conj().T @ x @ bs
        ca, cb, cad, cbd = _linear_coeffs_from_banded(y, big)
        approx = ca * a2 + cb * b2 + cad * ad2 + cbd * bd2
        lin_res = np.linalg.norm((y - approx)[sub], ord=2)
        mid = ca * a2 + cad * ad2 + np.kron(eye, cb * wb + cbd * wbd)
        return bs @ mid @ bs.conj().T, lin_res

    sh, ch = np.sinh(lam), np.cosh(lam)
    mix = r * np.conj(s) - s * np.conj(r)
    coef_q = ch - (r ** 2 - s ** 2 + np.conj(r) ** 2 - np.conj(s) ** 2) / 2 * sh
    coef_qp = ((r - np.conj(s)) ** 2 - (np.conj(r) - s) ** 2) / 2 * sh
    coef_p = (np.conj(s) ** 2 - np.conj(r) ** 2 - r ** 2 + s ** 2) / 2 * sh - ch
    coef_pq = ((r + np.conj(s)) ** 2 - (np.conj(r) + s) ** 2) / 2 * sh

    checks = [
        ("squeeze-heisenberg-a", a2,
         0.5 * ((b2 - a2) * (mix * sh - ch) + (bd2 - ad2) * (r ** 2 - s ** 2) * sh
                + (a2 + b2))),
        ("squeeze-heisenberg-b", b2,
         0.5 * ((b2 - a2) * (ch - mix * sh) + (bd2 - ad2) * (s ** 2 - r ** 2) * sh
                + (a2 + b2))),
        ("squeeze-heisenberg-qa", qa,
         0.5 * ((qa + qb) + 1j * (pa - pb) * coef_qp + (qa - qb) * coef_q)),
        ("squeeze-heisenberg-qb", qb,
         0.5 * ((qa + qb) - 1j * (pa - pb) * coef_qp + (qb - qa) * coef_q)),
        ("squeeze-heisenberg-pa", pa,
         0.5 * ((pa + pb) + (qb - qa) * coef_pq / 2j * 2 + (pb - pa) * coef_p)),
        ("squeeze-heisenberg-pb", pb,
         0.5 * ((pa + pb) - (qb - qa) * coef_pq / 2j * 2 + (pb - pa) * (-coef_p - 2 * ch) * (-1))),
        ("squeeze-heisenberg-q-sum", qa + qb, qa + qb),
        ("squeeze-heisenberg-q-diff", qa - qb,
         1j * (pa - pb) * coef_qp + (qa - qb) * coef_q),
        ("squeeze-heisenberg-p-sum", pa + pb, pa + pb),
        ("squeeze-heisenberg-p-diff", pa - pb,
         -1j * (qb - qa) * coef_pq + (pb - pa) * coef_p),
    ]
    meta = {"params": p, "lam": lam, "cutoff": n, "k": k}
    out = []
    for claim, x, rhs in checks:
        lhs, lin_res = conjugate(x)
        res = np.linalg.norm((lhs - rhs)[sub], ord=2) + lin_res
        out.append(_rec(claim, meta, res, "standard", tiers, tolerance=1e-7,
                        norm_basis="block-2norm"))
    return out


# ---------------------------------------------------------------------------
# normal-ordered operator identities via coherent probes
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class NormalSymbol:
    """A normally ordered operator :F(a^dag, b^dag, a, b): as its c-number
    symbol: <z'|:F:|z> = prefactor * fn(za'*, zb'*, za, zb) * <z'|z>."""

    description: str
    prefactor: complex
    coefficients: dict
    fn: object = field(repr=False)

    def matrix_element(self, bra: tuple, ket: tuple) -> complex:
        zap, zbp = bra
        za, zb = ket
        overlap = np.exp(
            np.conj(zap) * za - (abs(zap) ** 2 + abs(za) ** 2) / 2
            + np.conj(zbp) * zb - (abs(zbp) ** 2 + abs(zb) ** 2) / 2
        )
        return complex(self.prefactor
                       * self.fn(np.conj(zap), np.conj(zbp), za, zb) * overlap)


def _symbol_quadratures(d: float, b: float):
    sq2 = np.sqrt(2)

    def q_sym(zac, zbc, za, zb):
        return (zb + zbc - za - zac) / sq2

    def p_sym(zac, zbc, za, zb):
        return (zb - zbc - za + zac) / (1j * sq2)

    def x_sym(zac, zbc, za, zb):
        return d * q_sym(zac, zbc, za, zb) - b * p_sym(zac, zbc, za, zb)

    return x_sym


def make_normal_symbol(kind: str, ray: RayMatrix, y: float = 0.1,
                       n_power: int = 1) -> NormalSymbol:
    """The printed normally ordered right-hand sides."""
    if kind == "shift_q":
        d, b = ray.D, ray.B
        x_sym = _symbol_quadratures(d, b)
        const = (d ** 2 + b ** 2) / 2

        def fn(zac, zbc, za, zb):
            return np.exp(x_sym(zac, zbc, za, zb) + const + za + zb)

        return NormalSymbol("exp of coordinate-type shift times mode-sum exp",
                            1.0, {"D": d, "B": b, "constant": const}, fn)
    if kind == "shift_p":
        a_, c_ = ray.A, ray.C
        # A (P_b - P_a) - C (Q_b - Q_a) has symbol with (D, B) -> (A, C) roles
        sq2 = np.sqrt(2)

        def fn(zac, zbc, za, zb):
            qs = (zb + zbc - za - zac) / sq2
            ps = (zb - zbc - za + zac) / (1j * sq2)
            return np.exp(a_ * ps - c_ * qs + (a_ ** 2 + c_ ** 2) / 2 + za + zb)

        return NormalSymbol("exp of momentum-type shift times mode-sum exp",
                            1.0, {"A": a_, "C": c_,
                                  "constant": (a_ ** 2 + c_ ** 2) / 2}, fn)
    if kind == "gaussian_square":
        d, b = ray.D, ray.B
        x_sym = _symbol_quadratures(d, b)
        c2 = d ** 2 + b ** 2
        scale = 1.0 + 2 * y * c2

        def fn(zac, zbc, za, zb):
            return np.exp(-y * x_sym(zac, zbc, za, zb) ** 2 / scale)

        return NormalSymbol("gaussian in the coordinate-type quadrature",
                            scale ** -0.5, {"D": d, "B": b, "y": y,
                                            "scale": scale}, fn)
    if kind == "power_hermite":
        d, b = ray.D, ray.B
        x_sym = _symbol_quadratures(d, b)
        c2 = d ** 2 + b ** 2
        pref = (1j * np.sqrt(c2 / 2)) ** n_power

        def fn(zac, zbc, za, zb):
            arg = x_sym(zac, zbc, za, zb) / (1j * np.sqrt(2 * c2))
            return hermite_poly(n_power, arg)

        return NormalSymbol("quadrature power as a Hermite polynomial",
                            pref, {"D": d, "B": b, "n": n_power}, fn)
    raise ValueError(f"unknown identity kind {kind!r}")


def _sparse_two_mode_quadrature(ray: RayMatrix, cutoff: int, momentum_type: bool):
    a1 = csr_matrix(annihilator_matrix(cutoff))
    e1 = _sp_eye(cutoff + 1, format="csr")
    a2 = _sp_kron(a1, e1, format="csr")
    b2 = _sp_kron(e1, a1, format="csr")
    ad2, bd2 = a2.conj().T.tocsr(), b2.conj().T.tocsr()
    sq2 = np.sqrt(2)
    q_diff = ((b2 + bd2) - (a2 + ad2)) / sq2
    p_diff = ((b2 - bd2) - (a2 - ad2)) / (1j * sq2)
    if momentum_type:
        return (ray.A * p_diff - ray.C * q_diff).tocsc()
    return (ray.D * q_diff - ray.B * p_diff).tocsc()


def coherent_matrix_element(op: FockOperator, bra: tuple, ket: tuple) -> complex:
    """<coherent bra| op |coherent ket> through the fock-core primitives."""
    if op.space.modes == 2:
        bra_state = basis_state(op.space, ("coherent", bra[0]), ("coherent", bra[1]))
        ket_state = basis_state(op.space, ("coherent", ket[0]), ("coherent", ket[1]))
    else:
        bra_state = basis_state(op.space, ("coherent", bra[0]))
        ket_state = basis_state(op.space, ("coherent", ket[0]))
    return inner(bra_state, op @ ket_state)


MAX_IDENTITY_SHIFT_NORM = 4.0  # cap on D^2+B^2 (A^2+C^2): keeps e^X in the box


def identity_check(kind: str, ray: RayMatrix, probes, *, y: float = 0.1,
                   n_power: int = 1, guard: int = 40,
                   tiers: ToleranceTiers = DEFAULT_TIERS) -> ResidualRecord:
    """One normally ordered identity, verified on coherent probe pairs.

    The left side is built from sparse operator exponentials and powers with
    guard headroom; the right side is the printed normal symbol evaluated by
    argument substitution. The residual is the worst relative difference over
    the probes.
    """
    if kind in ("shift_q", "gaussian_square", "power_hermite"):
        shift_norm = ray.D ** 2 + ray.B ** 2
    else:
        shift_norm = ray.A ** 2 + ray.C ** 2
    if shift_norm > MAX_IDENTITY_SHIFT_NORM:
        raise ValueError(
            f"shift norm {shift_norm:.3f} exceeds the leakage cap "
            f"{MAX_IDENTITY_SHIFT_NORM}"
        )
    if kind == "gaussian_square" and not (0 < y <= 0.2):
        raise ValueError("y must lie in (0, 0.2]")
    if kind == "power_hermite" and not (1 <= n_power <= 6):
        raise ValueError("power must lie in 1..6")
    symbol = make_normal_symbol(kind, ray, y=y, n_power=n_power)
    x_op = _sparse_two_mode_quadrature(ray, guard, momentum_type=(kind == "shift_p"))
    worst = 0.0
    for bra, ket in probes:
        za, zb = ket
        ket_vec = np.kron(coherent_amplitudes(guard, za),
                          coherent_amplitudes(guard, zb))
        bra_vec = np.kron(coherent_amplitudes(guard, bra[0]),
                          coherent_amplitudes(guard, bra[1]))
        if kind in ("shift_q", "shift_p"):
            # exp(a + b)|z> = exp(za + zb)|z>: coherent states are eigenkets
            vec = expm_multiply(x_op, ket_vec * np.exp(za + zb))
        elif kind == "gaussian_square":
            x2 = (x_op @ x_op).tocsc()
            vec = expm_multiply(-y * x2, ket_vec)
        else:
            vec = ket_vec
            for _ in range(n_power):
                vec = x_op @ vec
        lhs = complex(np.vdot(bra_vec, vec))
        rhs = symbol.matrix_element(bra, ket)
        worst = max(worst, abs(lhs - rhs) / abs(rhs))
    tol = 1e-5 if (kind == "power_hermite" and n_power >= 5) else None
    return _rec(f"identity-{kind.replace('_', '-')}",
                {"ray": ray, "y": y, "n": n_power, "guard": guard,
                 "probes": len(probes), "symbol": symbol.coefficients},
                worst, "standard", tiers, tolerance=tol)


def default_probe_pairs(rng: np.random.Generator, count: int = 9,
                        amplitude: float = 0.8) -> list:
    """Seeded coherent probe pairs with |z| <= amplitude per mode."""
    out = []
    for _ in range(count):
        vals = rng.uniform(-amplitude / np.sqrt(2), amplitude / np.sqrt(2), size=8)
        out.append(((complex(vals[0], vals[1]), complex(vals[2], vals[3])),
                    (complex(vals[4], vals[5]), complex(vals[6], vals[7]))))
    return out


# ---------------------------------------------------------------------------
# classical Fresnel integral against the operator path
# ---------------------------------------------------------------------------

def _hermite_readout(x_grid: np.ndarray, cutoff: int) -> np.ndarray:
    """Matrix psi[n, j] = psi_n(x_j) for wavefunction readout."""
    out = np.zeros((cutoff + 1, len(x_grid)))
    out[0] = np.pi ** -0.25 * np.exp(-x_grid ** 2 / 2)
    if cutoff >= 1:
        out[1] = np.sqrt(2.0) * x_grid * out[0]
    for n in range(1, cutoff):
        out[n + 1] = (np.sqrt(2.0 / (n + 1)) * x_grid * out[n]
                      - np.sqrt(n / (n + 1.0)) * out[n - 1])
    return out


def classical_fresnel_check(ray: RayMatrix, input_spec, cutoff: int = 32,
                            n_samples: int = 4096, halfwidth: float = 14.0,
                            tiers: ToleranceTiers = DEFAULT_TIERS,
                            claim: str = "fresnel-classical-vs-fock",
                            tolerance: float = 1e-3) -> ResidualRecord:
    """The sampled diffraction-integral path against the Fock-operator path,
    compared in relative L2 up to one global phase."""
    p = fresnel_params_from_ray(ray)
    amps = _input_amplitudes(input_spec, cutoff)
    x = np.linspace(-halfwidth, halfwidth, n_samples)
    readout_in = _hermite_readout(x, cutoff)
    f_samples = (amps[None, : cutoff + 1] @ readout_in[: cutoff + 1]).ravel()
    g_classical = numerics.fresnel_integral_1d(f_samples, x, ray, x)
    guard = guard_cutoff(cutoff, abs(p.r)) + cutoff
    big_amps = np.zeros(guard + 1, dtype=complex)
    big_amps[: cutoff + 1] = amps
    out_window = min(guard, int np.__name__ == "" or 4 * cutoff)
    out_amps = fresnel_apply_window(p.s, p.r, big_amps, out_window, guard=guard)
    readout_out = _hermite_readout(x, out_window)
    g_operator = (out_amps[None, :] @ readout_out).ravel()
    res = phase_aligned_residual(g_operator, g_classical)
    return _rec(claim,
                {"ray": ray, "input": str(input_spec), "cutoff": cutoff,
                 "n_samples": n_samples, "halfwidth": halfwidth},
                res, "quadrature", tiers, tolerance=tolerance)


def _input_amplitudes(spec, cutoff: int) -> np.ndarray:
    if isinstance(spec, str):
        spec = (spec,)
    if spec[0] == "vacuum":
        amps = np.zeros(cutoff + 1, dtype=complex)
        amps[0] = 1.0
        return amps
    if spec[0] == "coherent":
        return coherent_amplitudes(cutoff, complex(spec[1]))
    raise ValueError(f"unsupported input spec {spec!r}")


# ---------------------------------------------------------------------------
# Schmidt structure
# ---------------------------------------------------------------------------

def schmidt_checks(space: FockSpace, label: IcesLabel,
                   tiers: ToleranceTiers = DEFAULT_TIERS,
                   witness: float = 0.1) -> list:
    """Product states carry zero entanglement entropy; generic entangled
    labels stay above the witness threshold; local phase rotations leave the
    entropy alone."""
    prod = basis_state(space, ("coherent", 0.5), ("coherent", -0.3 + 0.2j))
    _, s_prod = schmidt_decompose(prod)
    st = ices(space, label)
    _, s_ent = schmidt_decompose(st)
    phases = np.exp(1j * 0.7 * np.arange(space.cutoff + 1))
    rotated = FockState(space, (st.coefficient_matrix() * phases[:, None]).ravel())
    _, s_rot = schmidt_decompose(rotated)
    meta = {"z": label.z, "q": label.q, "ray": label.ray,
            "cutoff": space.cutoff, "entropy": s_ent}
    return [
        _rec("schmidt-product-state", meta, s_prod, "standard", tiers,
             tolerance=1e-10, norm_basis="absolute-entropy"),
        _rec("schmidt-entangled-witness", meta, max(0.0, witness - s_ent),
             "standard", tiers, tolerance=1e-12, norm_basis="entropy-deficit"),
        _rec("schmidt-phase-invariance", meta, abs(s_rot - s_ent), "standard",
             tiers, tolerance=1e-10, norm_basis="absolute-entropy"),
    ]


# ---------------------------------------------------------------------------
# Gaussian integral formulas and the Hermite evaluator
# ---------------------------------------------------------------------------

def gaussian_integral_checks(seed: int = 1234, count: int = 50,
                             tiers: ToleranceTiers = DEFAULT_TIERS) -> list:
    """Closed forms against brute-force quadrature on seeded interior specs,
    plus validator agreement on hand-built boundary cases."""
    rng = np.random.default_rng(seed)
    worst2 = 0.0
    drawn = 0
    while drawn < count:
        spec = GaussianIntegralSpec(
            zeta=complex(-rng.uniform(1.0, 2.0), rng.uniform(-0.3, 0.3)),
            xi=complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)),
            eta=complex(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5)),
            f=complex(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)),
            g=complex(rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2)),
        )
        if not spec.is_convergent():
            continue
        drawn += 1
        closed = gaussian_integral_2d(spec)
        quad = gaussian_integral_2d_quadrature(spec, halfwidth=8.0, order=180)
        worst2 = max(worst2, abs(closed - quad) / abs(closed))
    worst1 = 0.0
    for _ in range(10):
        alpha = complex(rng.uniform(0.3, 1.5), rng.uniform(-0.4, 0.4))
        beta = complex(rng.uniform(-0.8, 0.8), rng.uniform(-0.8, 0.8))
        closed = gaussian_integral_1d(alpha, beta)
        quad = gaussian_integral_1d_quadrature(alpha, beta)
        worst1 = max(worst1, abs(closed - quad) / abs(closed))

    # validator against true convergence: the real quadratic form of the
    # exponent must be negative definite
    def truly_convergent(spec: GaussianIntegralSpec) -> bool:
        m = np.array([
            [spec.zeta.real + (spec.f + spec.g).real, -(spec.f - spec.g).imag],
            [-(spec.f - spec.g).imag, spec.zeta.real - (spec.f + spec.g).real],
        ])
        return bool(np.all(np.linalg.eigvalsh(m) < 0))

    boundary = [
        GaussianIntegralSpec(zeta=-1.0, f=0.6, g=0.6),          # diverges on an axis
        GaussianIntegralSpec(zeta=-0.5, f=0.3, g=0.3),          # just past the edge
        GaussianIntegralSpec(zeta=-1.0, f=0.2, g=0.2),          # interior
        GaussianIntegralSpec(zeta=-1.0, f=0.45j, g=0.45j),      # imaginary, convergent
        GaussianIntegralSpec(zeta=-1.0, f=0.6j, g=-0.6j),       # cross-term divergence
        GaussianIntegralSpec(zeta=-2.0, f=0.25, g=0.25),        # comfortable interior
    ]
    disagreements = sum(
        1 for spec in boundary if spec.is_convergent() != truly_convergent(spec)
    )
    return [
        _rec("gaussian-integral-planar", {"seed": seed, "count": count},
             worst2, "strict", tiers),
        _rec("gaussian-integral-line", {"seed": seed, "count": 10},
             worst1, "strict", tiers),
        _rec("gaussian-integral-validator",
             {"cases": len(boundary), "disagreements": disagreements},
             float(disagreements), "strict", tiers, tolerance=0.5,
             norm_basis="count"),
    ]


def hermite_generating_check(seed: int = 99, n_max: int = 12, n_points: int = 20,
                             tiers: ToleranceTiers = DEFAULT_TIERS) -> ResidualRecord:
    """Recurrence evaluator against the Taylor coefficients of exp(2xt - t^2)
    (series convolution, an independent route)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        x = complex(rng.uniform(-2, 2), rng.uniform(-2, 2))
        # Taylor series of exp(2xt) * exp(-t^2) up to t^n_max
        coeff_a = np.array([(2 * x) ** n / float(np.math.factorial(n))
                            if False else 0 for n in range(n_max + 1)])
        import math as _math
        coeff_a = np.array([(2 * x) ** n / _math.factorial(n)
                            for n in range(n_max + 1)], dtype=complex)
        coeff_b = np.zeros(n_max + 1, dtype=complex)
        for k in range(0, n_max // 2 + 1):
            coeff_b[2 * k] = (-1) ** k / _math.factorial(k)
        conv = np.convolve(coeff_a, coeff_b)[: n_max + 1]
        for n in range(n_max + 1):
            want = conv[n] * _math.factorial(n)
            got = hermite_poly(n, x)
            denom = max(abs(want), 1.0)
            worst = max(worst, abs(got - want) / denom)
    return _rec("hermite-generating-function",
                {"seed": seed, "n_max": n_max, "points": n_points},
                worst, "standard", tiers, tolerance=1e-9)
