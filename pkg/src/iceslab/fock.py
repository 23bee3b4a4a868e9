"""Truncated Fock-space core: spaces, states, operators, linear-algebra primitives.

Conventions used throughout the package (hbar = 1):

* quadratures  Q = (a + a^dag)/sqrt(2),  P = (a - a^dag)/(i sqrt(2))
* coherent state amplitudes  <n|z> = exp(-|z|^2/2) z^n / sqrt(n!)
* position ket amplitudes    <n|q> = pi^(-1/4) (2^n n!)^(-1/2) H_n(q) e^(-q^2/2)
* momentum ket amplitudes    <n|p> = i^n <n|p_as_position>, so that P|p> ~ p|p>
  (validated by eigen-residual tests, not assumed)
* two-mode basis ordering: index = n_a*(cutoff+1) + n_b, mode a slow, mode b fast;
  ``amplitudes.reshape(cutoff+1, cutoff+1)[n_a, n_b]`` is the coefficient matrix.

States may be unnormalized: continuum-normalized kets (position, momentum, and
the entangled states built on them) are stored with their exact closed-form
amplitudes. Residuals elsewhere are therefore always reported relative to a
stored vector's norm.

All values are immutable after construction and all operations are pure
functions, so everything here is safe to share across threads.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

import numpy as np
from scipy.linalg import expm as _scipy_expm
from scipy.special import gammainc


class LeakageError(ValueError):
    """Raised when a requested state puts too much weight past the cutoff."""

    def __init__(self, msg: str, tail_mass: float):
        super().__init__(f"{msg} (tail mass {tail_mass:.3e})")
        self.tail_mass = tail_mass


@dataclass(frozen=True)
class FockSpace:
    """A 1- or 2-mode number basis truncated at `cutoff` quanta per mode."""

    modes: int
    cutoff: int

    def __post_init__(self):
        if self.modes not in (1, 2):
            raise ValueError(f"unsupported mode count: {self.modes}")
        if self.cutoff < 1:
            raise ValueError(f"cutoff must be >= 1, got {self.cutoff}")

    @property
    def dimension(self) -> int:
        return (self.cutoff + 1) ** self.modes

    def index(self, *occupations: int) -> int:
        """Flat basis index of |n_a> or |n_a, n_b> (mode a slow, mode b fast)."""
        if len(occupations) != self.modes:
            raise ValueError("one occupation per mode required")
        if any(n < 0 or n > self.cutoff for n in occupations):
            raise ValueError("occupation outside truncation")
        if self.modes == 1:
            return occupations[0]
        return occupations[0] * (self.cutoff + 1) + occupations[1]

    def occupations(self) -> np.ndarray:
        """(dimension, modes) array of occupation numbers per basis state."""
        n = np.arange(self.cutoff + 1)
        if self.modes == 1:
            return n[:, None]
        na, nb = np.meshgrid(n, n, indexing="ij")
        return np.stack([na.ravel(), nb.ravel()], axis=1)

    def inner_block_indices(self, k: int) -> np.ndarray:
        """Flat indices of basis states with every mode occupation <= k."""
        if k < 0 or k > self.cutoff:
            raise ValueError(f"block size k={k} outside [0, cutoff]")
        occ = self.occupations()
        return np.nonzero(np.all(occ <= k, axis=1))[0]


def make_space(modes: int, cutoff: int) -> FockSpace:
    """Construct a truncated Fock space; rejects modes not in {1, 2}."""
    return FockSpace(modes, cutoff)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr, dtype=complex)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class FockState:
    """Amplitude vector over the number basis of `space`. May be unnormalized."""

    space: FockSpace
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex).ravel()
        if amps.size != self.space.dimension:
            raise ValueError(
                f"amplitude length {amps.size} != dimension {self.space.dimension}"
            )
        if not np.all(np.isfinite(amps.view(float))):
            raise ValueError("non-finite amplitude")
        object.__setattr__(self, "amplitudes", _freeze(amps))

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def coefficient_matrix(self) -> np.ndarray:
        """Two-mode amplitudes as the (n_a, n_b) matrix."""
        if self.space.modes != 2:
            raise ValueError("coefficient matrix is defined for 2-mode states")
        n = self.space.cutoff + 1
        return self.amplitudes.reshape(n, n)


@dataclass(frozen=True)
class FockOperator:
    """Dense operator on a truncated Fock space."""

    space: FockSpace
    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        d = self.space.dimension
        if mat.shape != (d, d):
            raise ValueError(f"matrix shape {mat.shape} != ({d}, {d})")
        if not np.all(np.isfinite(mat.view(float))):
            raise ValueError("non-finite matrix entry")
        object.__setattr__(self, "matrix", _freeze(mat))

    # -- small operator algebra (products, adjoints, scalars, sums) ----------
    def __matmul__(self, other):
        if isinstance(other, FockOperator):
            _check_same_space(self.space, other.space)
            return FockOperator(self.space, self.matrix @ other.matrix)
        if isinstance(other, FockState):
            _check_same_space(self.space, other.space)
            return FockState(self.space, self.matrix @ other.amplitudes)
        return NotImplemented

    def __mul__(self, scalar):
        return FockOperator(self.space, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __add__(self, other):
        _check_same_space(self.space, other.space)
        return FockOperator(self.space, self.matrix + other.matrix)

    def __sub__(self, other):
        _check_same_space(self.space, other.space)
        return FockOperator(self.space, self.matrix - other.matrix)

    def adjoint(self) -> "FockOperator":
        return FockOperator(self.space, self.matrix.conj().T)


def _check_same_space(s1: FockSpace, s2: FockSpace):
    if s1 != s2:
        raise ValueError(f"space mismatch: {s1} vs {s2}")


def identity(space: FockSpace) -> FockOperator:
    return FockOperator(space, np.eye(space.dimension))


def annihilator_matrix(cutoff: int) -> np.ndarray:
    """Single-mode truncated annihilation matrix, <n-1|a|n> = sqrt(n)."""
    a = np.zeros((cutoff + 1, cutoff + 1), dtype=complex)
    n = np.arange(1, cutoff + 1)
    a[n - 1, n] = np.sqrt(n)
    return a


def embed_mode(space: FockSpace, mode: str, single: np.ndarray) -> np.ndarray:
    """Lift a single-mode matrix into the full space on the chosen mode."""
    if mode not in ("a", "b"):
        raise ValueError(f"unknown mode {mode!r}")
    if space.modes == 1:
        if mode != "a":
            raise ValueError("1-mode space has only mode a")
        return single
    eye = np.eye(space.cutoff + 1)
    return np.kron(single, eye) if mode == "a" else np.kron(eye, single)


def mode_operator(space: FockSpace, mode: str, kind: str) -> FockOperator:
    """Ladder and quadrature operators on one mode.

    kind: one of annihilate, create, Q, P, number.
    """
    a = annihilator_matrix(space.cutoff)
    ad = a.conj().T
    if kind == "annihilate":
        single = a
    elif kind == "create":
        single = ad
    elif kind == "Q":
        single = (a + ad) / np.sqrt(2)
    elif kind == "P":
        single = (a - ad) / (1j * np.sqrt(2))
    elif kind == "number":
        single = ad @ a
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    return FockOperator(space, embed_mode(space, mode, single))


# ---------------------------------------------------------------------------
# state constructors
# ---------------------------------------------------------------------------

COHERENT_TAIL_LIMIT = 1e-8  # leakage guard for coherent amplitudes


def coherent_amplitudes(cutoff: int, z: complex) -> np.ndarray:
    c = np.zeros(cutoff + 1, dtype=complex)
    c[0] = 1.0
    for n in range(cutoff):
        c[n + 1] = z * c[n] / np.sqrt(n + 1)
    return c * np.exp(-abs(z) ** 2 / 2)


def coherent_tail_mass(cutoff: int, z: complex) -> float:
    """Poisson tail mass sum_{n > cutoff} e^{-|z|^2} |z|^{2n} / n!."""
    lam = abs(z) ** 2
    if lam == 0.0:
        return 0.0
    return float(gammainc(cutoff + 1, lam))


def hermite_function_amplitudes(cutoff: int, q: float) -> np.ndarray:
    """Oscillator eigenfunction values psi_n(q), by the stable normalized
    three-term recurrence (avoids overflow of raw Hermite polynomials)."""
    psi = np.zeros(cutoff + 1)
    psi[0] = np.pi ** -0.25 * np.exp(-q * q / 2.0)
    if cutoff >= 1:
        psi[1] = np.sqrt(2.0) * q * psi[0]
    for n in range(1, cutoff):
        psi[n + 1] = np.sqrt(2.0 / (n + 1)) * q * psi[n] - np.sqrt(n / (n + 1.0)) * psi[n - 1]
    return psi


def position_validity_halfwidth(cutoff: int) -> float:
    """|q| range where the truncated position ket is still trustworthy."""
    return np.sqrt(2.0 * cutoff) / 2.0


def _single_mode_amplitudes(cutoff: int, spec) -> np.ndarray:
    if isinstance(spec, str):
        spec = (spec,)
    kind = spec[0]
    if kind == "vacuum":
        c = np.zeros(cutoff + 1, dtype=complex)
        c[0] = 1.0
        return c
    if kind == "number":
        n = int(spec[1])
        if n < 0 or n > cutoff:
            raise ValueError(f"number state n={n} outside truncation")
        c = np.zeros(cutoff + 1, dtype=complex)
        c[n] = 1.0
        return c
    if kind == "coherent":
        z = complex(spec[1])
        tail = coherent_tail_mass(cutoff, z)
        if tail > COHERENT_TAIL_LIMIT:
            raise LeakageError(
                f"coherent amplitude |z|={abs(z):.3f} leaks past cutoff {cutoff}", tail
            )
        return coherent_amplitudes(cutoff, z)
    if kind == "position":
        q = float(spec[1])
        if abs(q) > position_validity_halfwidth(cutoff):
            import warnings

            warnings.warn(
                f"position ket q={q:.3f} beyond validity half-width "
                f"{position_validity_halfwidth(cutoff):.3f} at cutoff {cutoff}; "
                "truncation quality degrades",
                stacklevel=3,
            )
        return hermite_function_amplitudes(cutoff, q).astype(complex)
    if kind == "momentum":
        p = float(spec[1])
        if abs(p) > position_validity_halfwidth(cutoff):
            import warnings

            warnings.warn(
                f"momentum ket p={p:.3f} beyond validity half-width "
                f"{position_validity_halfwidth(cutoff):.3f} at cutoff {cutoff}; "
                "truncation quality degrades",
                stacklevel=3,
            )
        phases = 1j ** np.arange(cutoff + 1)
        return phases * hermite_function_amplitudes(cutoff, p)
    raise ValueError(f"unknown state spec {spec!r}")


def basis_state(space: FockSpace, *mode_specs) -> FockState:
    """Build a product state from one spec per mode.

    Each spec is ``"vacuum"``, ``("number", n)``, ``("coherent", z)``,
    ``("position", q)`` or ``("momentum", p)``. Position and momentum kets are
    continuum-normalized and stored unnormalized.
    """
    if len(mode_specs) != space.modes:
        raise ValueError(f"expected {space.modes} mode specs, got {len(mode_specs)}")
    vecs = [_single_mode_amplitudes(space.cutoff, sp) for sp in mode_specs]
    amps = vecs[0]
    for v in vecs[1:]:
        amps = np.kron(amps, v)
    return FockState(space, amps)


# ---------------------------------------------------------------------------
# primitives
# ---------------------------------------------------------------------------

def compose(ops) -> FockOperator:
    """Left-to-right matrix product of operators sharing one space."""
    ops = list(ops)
    if not ops:
        raise ValueError("compose needs at least one operator")
    out = ops[0]
    for op in ops[1:]:
        out = out @ op
    return out


def matrix_exp(op: FockOperator) -> FockOperator:
    """Matrix exponential (scipy scaling-and-squaring Pade)."""
    return FockOperator(op.space, _scipy_expm(op.matrix))


def inner(bra: FockState, ket: FockState) -> complex:
    """<bra|ket>, conjugate-linear in the bra."""
    _check_same_space(bra.space, ket.space)
    return complex(np.vdot(bra.amplitudes, ket.amplitudes))


def apply(op: FockOperator, state: FockState) -> FockState:
    return op @ state


def truncation_leakage(state: FockState, k: int) -> float:
    """Fraction of squared norm on basis states with any occupation > cutoff - k."""
    if k > state.space.cutoff:
        raise ValueError("k exceeds cutoff")
    occ = state.space.occupations()
    hot = np.any(occ > state.space.cutoff - k, axis=1)
    total = np.sum(np.abs(state.amplitudes) ** 2)
    if total == 0.0:
        return 0.0
    return float(np.sum(np.abs(state.amplitudes[hot]) ** 2) / total)


def inner_block_distance(op_a: FockOperator, op_b: FockOperator, k: int) -> float:
    """Spectral-norm distance of the two operators restricted to the block of
    basis states with every mode occupation <= k.

    The spectral (2-) norm is the fixed documented choice for all operator
    comparisons and reported residuals.
    """
    _check_same_space(op_a.space, op_b.space)
    if k >= op_a.space.cutoff:
        raise ValueError("block size k must be < cutoff")
    idx = op_a.space.inner_block_indices(k)
    blk = np.ix_(idx, idx)
    return float(np.linalg.norm(op_a.matrix[blk] - op_b.matrix[blk], ord=2))


def block_restrict(matrix: np.ndarray, space: FockSpace, k: int) -> np.ndarray:
    """The sub-matrix on the occupation <= k block."""
    idx = space.inner_block_indices(k)
    return matrix[np.ix_(idx, idx)]


def default_inner_k(space: FockSpace) -> int:
    """Default comparison block: half the cutoff."""
    return space.cutoff // 2
