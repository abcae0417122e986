"""Hilbert-Schmidt geometry and monomial operator bases.

The central object is the monomial basis of a subsystem: the 4^m operators

    E(l, p) = (prod of creators over l) . (subsystem vacuum projector)
              . (prod of annihilators over p, reversed)

for occupation patterns l, p over the subsystem, all built from the ambient
string-realized ladder operators.  The subsystem vacuum projector is the
product of f_j f_j^dag over the subsystem's modes, which keeps every element
expressible in the subsystem's own ladder operators alone.

Spanning this family is what "local to the subsystem" means; the basis also
drives the partial trace, operator embedding/compression between a subsystem
and the ambient space, and the phenomenal-state assembly from descriptors.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import ValidationError
from .fock import (
    FockOperator,
    ModeSet,
    _annihilator_matrix,
    _check_n_modes,
    frobenius,
    parity_diagonal,
)

LOCALITY_TOL = 1e-10

GRADE_EVEN = "even"
GRADE_ODD = "odd"
GRADE_MIXED = "mixed"


def hs_inner(a: FockOperator, b: FockOperator) -> complex:
    """Hilbert-Schmidt inner product tr(a^dag b)."""
    if a.n_modes != b.n_modes:
        raise ValidationError(
            "dimension_mismatch",
            f"operators act on different systems ({a.n_modes} vs {b.n_modes} modes)",
        )
    return complex(np.vdot(a.matrix, b.matrix))


@dataclass(frozen=True, eq=False)
class MonomialBasis:
    """The 4^m ladder monomials of a subsystem, embedded in the ambient space.

    ``labels[k]`` is the pair of occupation patterns ``(l, p)`` of element k,
    each a tuple over the subsystem's modes in increasing order.  Elements
    are pairwise HS-orthogonal with squared norm ``norm_sq = 2^(N - m)``.
    """

    subsystem: ModeSet
    elements: tuple[FockOperator, ...]
    labels: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]
    norm_sq: float

    @property
    def size(self) -> int:
        return len(self.elements)

    def stacked(self) -> np.ndarray:
        return _stacked_elements(self.subsystem)

    def expand(self, op: FockOperator) -> np.ndarray:
        """Coefficients of ``op`` on this basis, as a (2^m, 2^m) array.

        Entry [l, p] multiplies the element with labels (l, p); indices use
        the same bit order as the subsystem's own Fock basis.
        """
        if op.n_modes != self.subsystem.ambient_n:
            raise ValidationError("dimension_mismatch", "operator lives in a different ambient space")
        m = len(self.subsystem)
        stacked = self.stacked()
        coeffs = np.tensordot(stacked.conj(), op.matrix, axes=([1, 2], [0, 1])) / self.norm_sq
        return coeffs.reshape(2 ** m, 2 ** m)

    def synthesize(self, coeffs: np.ndarray) -> FockOperator:
        """Ambient operator with the given coefficient array (inverse of expand)."""
        m = len(self.subsystem)
        flat = np.asarray(coeffs, dtype=complex).reshape(4 ** m)
        matrix = np.tensordot(flat, self.stacked(), axes=(0, 0))
        return FockOperator(self.subsystem.ambient_n, matrix)


def _occ_subsets(modes: tuple[int, ...]):
    """Occupation patterns over ``modes`` in subsystem-Fock-index order."""
    m = len(modes)
    for bits in range(2 ** m):
        yield tuple((bits >> (m - 1 - i)) & 1 for i in range(m))


def _occupied(modes: tuple[int, ...], pattern: tuple[int, ...]) -> tuple[int, ...]:
    return tuple(mode for mode, occ in zip(modes, pattern) if occ)


@lru_cache(maxsize=None)
def _basis_arrays(indices: tuple[int, ...], ambient_n: int):
    n = ambient_n
    dim = 2 ** n
    vac = np.eye(dim, dtype=complex)
    for j in indices:
        f = _annihilator_matrix(n, j)
        vac = vac @ (f @ f.conj().T)

    # left[S] = creators(S, increasing) @ vac; built by prepending the
    # smallest mode so each subset costs one product.
    left: dict[tuple[int, ...], np.ndarray] = {(): vac}

    def left_of(occupied: tuple[int, ...]) -> np.ndarray:
        if occupied in left:
            return left[occupied]
        head, rest = occupied[0], occupied[1:]
        out = _annihilator_matrix(n, head).conj().T @ left_of(rest)
        left[occupied] = out
        return out

    elements = []
    labels = []
    for l_pat in _occ_subsets(indices):
        l_occ = _occupied(indices, l_pat)
        for p_pat in _occ_subsets(indices):
            p_occ = _occupied(indices, p_pat)
            # annihilators reversed == adjoint of the creator string
            e = left_of(l_occ) @ left_of(p_occ).conj().T if p_occ else left_of(l_occ)
            elements.append(np.ascontiguousarray(e))
            labels.append((l_pat, p_pat))
    stacked = np.stack(elements)
    stacked.setflags(write=False)
    return stacked, tuple(labels)


def _stacked_elements(subsystem: ModeSet) -> np.ndarray:
    stacked, _ = _basis_arrays(subsystem.indices, subsystem.ambient_n)
    return stacked


def monomial_basis(subsystem: ModeSet) -> MonomialBasis:
    """All 4^m ladder monomials of a non-empty subsystem."""
    subsystem.require_nonempty()
    _check_n_modes(subsystem.ambient_n)
    stacked, labels = _basis_arrays(subsystem.indices, subsystem.ambient_n)
    n, m = subsystem.ambient_n, len(subsystem)
    elements = tuple(FockOperator(n, e) for e in stacked)
    return MonomialBasis(subsystem, elements, labels, float(2 ** (n - m)))


def parity_grade(o: FockOperator, tol: float = LOCALITY_TOL) -> str:
    """Classify an operator as even, odd, or mixed under parity conjugation."""
    diag = parity_diagonal(o.n_modes)
    conj = diag[:, None] * o.matrix * diag[None, :]
    scale = max(1.0, frobenius(o.matrix))
    if frobenius(conj - o.matrix) <= tol * scale:
        return GRADE_EVEN
    if frobenius(conj + o.matrix) <= tol * scale:
        return GRADE_ODD
    return GRADE_MIXED


def locality_residual(o: FockOperator, subsystem: ModeSet) -> float:
    """Frobenius distance from ``o`` to the span of the subsystem's monomials."""
    basis = monomial_basis(subsystem)
    coeffs = basis.expand(o)
    return frobenius(o.matrix - basis.synthesize(coeffs).matrix)


def is_local_to(o: FockOperator, subsystem: ModeSet, tol: float = LOCALITY_TOL) -> bool:
    """True iff ``o`` lies in the span of the subsystem's ladder monomials."""
    if o.n_modes != subsystem.ambient_n:
        raise ValidationError("dimension_mismatch", "operator lives in a different ambient space")
    subsystem.require_nonempty()
    scale = max(1.0, frobenius(o.matrix))
    return locality_residual(o, subsystem) <= tol * scale


def mode_support(o: FockOperator, tol: float = LOCALITY_TOL) -> ModeSet:
    """Smallest mode set the operator is local to.

    Computed by dropping each mode whose removal keeps the operator inside
    the remaining span; correctness of greedy removal is guaranteed by the
    tensor-factor structure of the monomial expansion.
    """
    n = o.n_modes
    kept = list(range(n))
    for j in range(n):
        trial = [k for k in kept if k != j]
        if not trial:
            # scalar multiples of the identity have empty support
            diag = complex(np.trace(o.matrix)) / o.dim
            if frobenius(o.matrix - diag * np.eye(o.dim)) <= tol * max(1.0, frobenius(o.matrix)):
                kept = trial
            continue
        if is_local_to(o, ModeSet(tuple(trial), n), tol):
            kept = trial
    return ModeSet(tuple(kept), n)


def embed_local_operator(small: np.ndarray, subsystem: ModeSet) -> FockOperator:
    """Lift a 2^m x 2^m matrix on a subsystem's own Fock space to the ambient space.

    The lift substitutes the subsystem's ambient ladder monomials for the
    small-space matrix units, so it is a *-isomorphism onto the subsystem's
    local operator algebra.
    """
    subsystem.require_nonempty()
    m = len(subsystem)
    small = np.asarray(small, dtype=complex)
    if small.shape != (2 ** m, 2 ** m):
        raise ValidationError(
            "dimension_mismatch",
            f"expected a {2 ** m} x {2 ** m} matrix for subsystem {subsystem.indices}",
        )
    stacked = _stacked_elements(subsystem)
    matrix = np.tensordot(small.reshape(4 ** m), stacked, axes=(0, 0))
    return FockOperator(subsystem.ambient_n, matrix)


def compress_local_operator(
    o: FockOperator, subsystem: ModeSet, tol: float = LOCALITY_TOL
) -> np.ndarray:
    """Inverse of :func:`embed_local_operator`; rejects non-local input."""
    basis = monomial_basis(subsystem)
    coeffs = basis.expand(o)
    residual = frobenius(o.matrix - basis.synthesize(coeffs).matrix)
    if residual > tol * max(1.0, frobenius(o.matrix)):
        raise ValidationError(
            "not_local",
            f"operator is not local to modes {subsystem.indices} (residual {residual:.3e})",
        )
    return coeffs


def wedge(a: FockOperator, sub_a: ModeSet, b: FockOperator, sub_b: ModeSet) -> FockOperator:
    """Product-state composition of operators local to disjoint subsystems.

    Returns the plain ambient product a . b.  At least one operand must be
    parity-even; the odd/odd case has no convention-free sign and is refused.
    """
    sub_a.require_nonempty()
    sub_b.require_nonempty()
    sub_a._check_same_ambient(sub_b)
    if not sub_a.is_disjoint(sub_b):
        raise ValidationError(
            "overlapping_subsystems",
            f"subsystems {sub_a.indices} and {sub_b.indices} overlap",
        )
    if not is_local_to(a, sub_a):
        raise ValidationError("not_local", f"first operand is not local to {sub_a.indices}")
    if not is_local_to(b, sub_b):
        raise ValidationError("not_local", f"second operand is not local to {sub_b.indices}")
    if parity_grade(a) != GRADE_EVEN and parity_grade(b) != GRADE_EVEN:
        raise ValidationError(
            "parity_ambiguous",
            "wedge requires at least one parity-even operand (odd/odd has no fixed sign)",
        )
    return a @ b


_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex)


def qubit_ladder(n_qubits: int, j: int) -> FockOperator:
    """Stringless lowering operator (sigma_x + i sigma_y)/2 on qubit j.

    Unlike the fermionic annihilators these commute across sites; the
    single-site relations q^2 = 0 and {q, q^dag} = I still hold exactly.
    """
    _check_n_modes(n_qubits)
    if not 0 <= j < n_qubits:
        raise ValidationError("mode_out_of_range", f"qubit {j} out of range for {n_qubits}")
    q = 0.5 * (_SX + 1.0j * _SY)
    out = np.eye(1, dtype=complex)
    for site in range(n_qubits):
        out = np.kron(out, q if site == j else np.eye(2, dtype=complex))
    return FockOperator(n_qubits, out)
