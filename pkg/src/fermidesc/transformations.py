"""The group of physical transformations: parity-superselected unitaries.

Superselection means every unitary here commutes with the parity operator,
i.e. is block-diagonal over the even/odd occupation sectors.  Random
sampling draws independent Haar blocks on the two sectors; since parity is
diagonal in the Fock basis, assembling the blocks is pure index placement.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

from . import algebra
from .errors import ValidationError
from .fock import (
    FockOperator,
    FockVector,
    ModeSet,
    _check_n_modes,
    annihilator,
    creator,
    frobenius,
    parity_diagonal,
)

UNITARY_TOL = 1e-10
SSR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PSUnitary:
    """Unitary on the N-mode Fock space commuting with the parity operator."""

    n_modes: int
    matrix: np.ndarray

    def __post_init__(self):
        _check_n_modes(self.n_modes)
        m = np.asarray(self.matrix, dtype=complex)
        dim = 2 ** self.n_modes
        if m.shape != (dim, dim):
            raise ValidationError(
                "dimension_mismatch",
                f"expected a {dim} x {dim} matrix for {self.n_modes} modes, got {m.shape}",
            )
        if frobenius(m.conj().T @ m - np.eye(dim)) > UNITARY_TOL * dim:
            raise ValidationError("not_unitary", "matrix is not unitary within tolerance")
        diag = parity_diagonal(self.n_modes)
        if frobenius(diag[:, None] * m * diag[None, :] - m) > SSR_TOL * frobenius(m):
            raise ValidationError(
                "ssr_violation", "unitary does not commute with the parity operator"
            )
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dim(self) -> int:
        return 2 ** self.n_modes

    def dag(self) -> "PSUnitary":
        return PSUnitary(self.n_modes, self.matrix.conj().T)

    def __matmul__(self, other: "PSUnitary") -> "PSUnitary":
        if not isinstance(other, PSUnitary):
            return NotImplemented
        if other.n_modes != self.n_modes:
            raise ValidationError(
                "dimension_mismatch",
                f"unitaries act on different systems ({self.n_modes} vs {other.n_modes} modes)",
            )
        return PSUnitary(self.n_modes, self.matrix @ other.matrix)

    def conjugate(self, o: FockOperator) -> FockOperator:
        """Heisenberg action U^dag o U."""
        if o.n_modes != self.n_modes:
            raise ValidationError("dimension_mismatch", "operator/unitary mode counts differ")
        return FockOperator(self.n_modes, self.matrix.conj().T @ o.matrix @ self.matrix)

    def apply(self, v: FockVector) -> FockVector:
        """Schroedinger action U|v>."""
        if v.n_modes != self.n_modes:
            raise ValidationError("dimension_mismatch", "vector/unitary mode counts differ")
        return FockVector(self.n_modes, self.matrix @ v.amplitudes)

    def as_operator(self) -> FockOperator:
        return FockOperator(self.n_modes, self.matrix)


def validate_ps_unitary(matrix: np.ndarray) -> PSUnitary:
    """Validate a candidate matrix; distinct codes for non-unitarity and SSR."""
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValidationError("dimension_mismatch", f"expected a square matrix, got {m.shape}")
    n = int(np.log2(m.shape[0]))
    if 2 ** n != m.shape[0]:
        raise ValidationError(
            "dimension_mismatch", f"dimension {m.shape[0]} is not a power of two"
        )
    return PSUnitary(n, m)


def exp_hamiltonian(h: FockOperator) -> PSUnitary:
    """exp(i h) for a Hermitian, parity-even generator."""
    scale = max(1.0, frobenius(h.matrix))
    if frobenius(h.matrix - h.matrix.conj().T) > 1e-10 * scale:
        raise ValidationError("not_hermitian", "generator must be Hermitian")
    if algebra.parity_grade(h) != algebra.GRADE_EVEN:
        raise ValidationError(
            "ssr_violation", "generator must commute with the parity operator"
        )
    return PSUnitary(h.n_modes, scipy.linalg.expm(1.0j * h.matrix))


def named_gate(kind: str, n_modes: int, *, modes: tuple[int, ...], theta: float) -> PSUnitary:
    """Convenience gates with the sign conventions fixed once and for all.

    tunneling(i,j):   exp(theta (f_i^dag f_j - f_j^dag f_i))
    phase(i):         exp(i theta f_i^dag f_i)
    interaction(i,j): exp(i theta f_i^dag f_i f_j^dag f_j)
    """
    _check_n_modes(n_modes)
    for m in modes:
        if not 0 <= m < n_modes:
            raise ValidationError("mode_out_of_range", f"mode {m} out of range for {n_modes}")
    if kind == "phase":
        (i,) = modes
        h = theta * (creator(n_modes, i) @ annihilator(n_modes, i))
        return exp_hamiltonian(h)
    if kind == "tunneling":
        i, j = modes
        if i == j:
            raise ValidationError("mode_out_of_range", "tunneling needs two distinct modes")
        k = creator(n_modes, i) @ annihilator(n_modes, j) - creator(n_modes, j) @ annihilator(
            n_modes, i
        )
        return PSUnitary(n_modes, scipy.linalg.expm(theta * k.matrix))
    if kind == "interaction":
        i, j = modes
        if i == j:
            raise ValidationError("mode_out_of_range", "interaction needs two distinct modes")
        h = theta * (
            creator(n_modes, i)
            @ annihilator(n_modes, i)
            @ creator(n_modes, j)
            @ annihilator(n_modes, j)
        )
        return exp_hamiltonian(h)
    raise ValidationError(
        "bad_kind", f"unknown gate kind {kind!r} (expected tunneling, phase, or interaction)"
    )


def is_local_unitary(u: PSUnitary, subsystem: ModeSet, tol: float = 1e-10) -> bool:
    """True iff the unitary lies in the span of the subsystem's ladder monomials."""
    return algebra.is_local_to(u.as_operator(), subsystem, tol)


def invariance_support(u: PSUnitary, tol: float = 1e-10) -> ModeSet:
    """Modes whose annihilators the unitary fails to leave invariant.

    For a parity-superselected unitary this coincides with the minimal
    locality support (up to global phase), and is much cheaper to compute
    than span projections.
    """
    moved = []
    for j in range(u.n_modes):
        f = annihilator(u.n_modes, j)
        if frobenius(u.conjugate(f).matrix - f.matrix) > tol * max(1.0, frobenius(f.matrix)):
            moved.append(j)
    return ModeSet(tuple(moved), u.n_modes)


def random_ps_unitary(n_modes: int, seed: int) -> PSUnitary:
    """Haar-random unitary on each parity sector, deterministic per seed."""
    _check_n_modes(n_modes)
    rng = np.random.default_rng(seed)
    dim = 2 ** n_modes
    diag = parity_diagonal(n_modes).real
    u = np.zeros((dim, dim), dtype=complex)
    for sector in (1.0, -1.0):
        idx = np.where(diag == sector)[0]
        u[np.ix_(idx, idx)] = _haar(len(idx), rng)
    return PSUnitary(n_modes, u)


def _haar(dim: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.standard_normal((dim, dim)) + 1.0j * rng.standard_normal((dim, dim))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r).copy()
    phases /= np.abs(phases)
    return q * phases[None, :]


def local_random_ps_unitary(subsystem: ModeSet, seed: int) -> PSUnitary:
    """Random parity-superselected unitary supported on the given modes.

    Sampled on the subsystem's own Fock space, then lifted through the
    monomial substitution embedding, so it commutes with every ladder
    operator outside the subsystem.
    """
    subsystem.require_nonempty()
    small = random_ps_unitary(len(subsystem), seed)
    if subsystem.is_full:
        return small
    lifted = algebra.embed_local_operator(small.matrix, subsystem)
    return PSUnitary(subsystem.ambient_n, lifted.matrix)


def canonical_phase(matrix: np.ndarray, n_modes: int) -> np.ndarray:
    """Rotate a global phase so the first sizeable parity-block entry is real positive."""
    diag = parity_diagonal(n_modes).real
    for sector in (1.0, -1.0):
        idx = np.where(diag == sector)[0]
        block = matrix[np.ix_(idx, idx)]
        flat = block.reshape(-1)
        nonzero = np.where(np.abs(flat) > 1e-12)[0]
        if len(nonzero):
            pivot = flat[nonzero[0]]
            return matrix * (abs(pivot) / pivot)
    return matrix


def phase_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Frobenius distance minimized over a global phase.

    Aligns the phase explicitly and subtracts; the closed-form
    sqrt(|a|^2+|b|^2-2|tr|) loses half the significant digits to
    cancellation when the operands are close.
    """
    overlap = complex(np.trace(b.conj().T @ a))
    if abs(overlap) < 1e-300:
        return float(np.linalg.norm(a - b))
    return float(np.linalg.norm(a - (overlap / abs(overlap)) * b))
