"""Phenomenal states: parity-superselected density operators on mode subsets.

A state's matrix lives on the subsystem's own 2^m-dimensional Fock space;
the subsystem's ModeSet records where those modes sit in the ambient system.

Two independent reductions to a smaller mode set are provided:

* :func:`partial_trace` keeps, in the ladder-monomial expansion ordered
  (kept modes, complement modes), exactly the components whose complement
  occupation patterns match on both sides, with the reordering signs that
  the anticommutation relations dictate.
* :func:`partial_trace_jw` reorders the modes with a signed permutation so
  the kept modes come first, then takes an ordinary tensor-factor trace.

They implement the same map on parity-superselected states and are cross-
checked against each other in the test suite and the verification sweep.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import algebra
from .errors import ValidationError
from .fock import FockOperator, ModeSet, frobenius, parity_diagonal

HERMITIAN_TOL = 1e-10
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
SSR_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class PhenomenalState:
    """Validated parity-superselected density operator on a mode subset."""

    subsystem: ModeSet
    matrix: np.ndarray

    def __post_init__(self):
        self.subsystem.require_nonempty()
        m = np.asarray(self.matrix, dtype=complex)
        dim = 2 ** len(self.subsystem)
        if m.shape != (dim, dim):
            raise ValidationError(
                "dimension_mismatch",
                f"expected a {dim} x {dim} matrix for modes {self.subsystem.indices}, got {m.shape}",
            )
        scale = max(1.0, frobenius(m))
        if frobenius(m - m.conj().T) > HERMITIAN_TOL * scale:
            raise ValidationError("not_hermitian", "density matrix must be Hermitian")
        tr = complex(np.trace(m))
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValidationError("not_trace_one", f"trace is {tr:.6g}, expected 1")
        eigs = np.linalg.eigvalsh((m + m.conj().T) / 2.0)
        if eigs.min() < -PSD_TOL:
            raise ValidationError(
                "not_positive", f"minimum eigenvalue {eigs.min():.3e} below tolerance"
            )
        diag = parity_diagonal(len(self.subsystem))
        if frobenius(diag[:, None] * m * diag[None, :] - m) > SSR_TOL * scale:
            raise ValidationError(
                "ssr_violation",
                "density matrix does not commute with the subsystem parity operator",
            )
        m = np.ascontiguousarray(m)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def n_modes(self) -> int:
        return len(self.subsystem)

    @property
    def dim(self) -> int:
        return 2 ** self.n_modes

    def as_operator(self) -> FockOperator:
        """The matrix as an operator on the subsystem's own Fock space."""
        return FockOperator(self.n_modes, self.matrix)

    def embedded(self) -> FockOperator:
        """The state lifted to the ambient space as a local operator."""
        return algebra.embed_local_operator(self.matrix, self.subsystem)


def validate_phenomenal(subsystem: ModeSet, matrix: np.ndarray) -> PhenomenalState:
    """Validate a candidate density matrix; raises with the violated invariant's code."""
    return PhenomenalState(subsystem, matrix)


def _merge_sign(keep_occupied: tuple[int, ...], comp_occupied: tuple[int, ...]) -> int:
    """Sign from reordering creators (kept modes first) into increasing mode order."""
    inversions = sum(1 for k in keep_occupied for c in comp_occupied if k > c)
    return -1 if inversions % 2 else 1


def partial_trace(state: PhenomenalState, keep: ModeSet) -> PhenomenalState:
    """Fermionic reduction of a state to the kept modes (monomial-matching rule)."""
    keep.require_nonempty()
    if not keep.is_subset_of(state.subsystem):
        raise ValidationError(
            "not_subset",
            f"keep set {keep.indices} is not contained in {state.subsystem.indices}",
        )
    n = state.n_modes
    keep_pos = keep.positions_in(state.subsystem)
    comp_pos = tuple(i for i in range(n) if i not in keep_pos)
    m, s = len(keep_pos), len(comp_pos)
    if s == 0:
        return PhenomenalState(keep, state.matrix)

    rho = state.matrix
    out = np.zeros((2 ** m, 2 ** m), dtype=complex)
    comp_patterns = [
        tuple(pos for i, pos in enumerate(comp_pos) if (u >> (s - 1 - i)) & 1)
        for u in range(2 ** s)
    ]
    keep_patterns = [
        tuple(pos for i, pos in enumerate(keep_pos) if (l >> (m - 1 - i)) & 1)
        for l in range(2 ** m)
    ]

    def global_index(keep_occ: tuple[int, ...], comp_occ: tuple[int, ...]) -> int:
        idx = 0
        occupied = set(keep_occ) | set(comp_occ)
        for pos in range(n):
            idx = (idx << 1) | (1 if pos in occupied else 0)
        return idx

    for l in range(2 ** m):
        for p in range(2 ** m):
            acc = 0.0 + 0.0j
            for u in range(2 ** s):
                sign = _merge_sign(keep_patterns[l], comp_patterns[u]) * _merge_sign(
                    keep_patterns[p], comp_patterns[u]
                )
                acc += sign * rho[
                    global_index(keep_patterns[l], comp_patterns[u]),
                    global_index(keep_patterns[p], comp_patterns[u]),
                ]
            out[l, p] = acc
    try:
        return PhenomenalState(keep, out)
    except ValidationError as exc:
        raise ValidationError(
            "internal_inconsistency",
            f"partial trace produced an invalid state ({exc})",
        ) from exc


def mode_sort_permutation(state_modes: int, front_positions: tuple[int, ...]) -> np.ndarray:
    """Signed permutation matrix moving the given mode positions to the front.

    Basis states map to basis states times the parity of the permutation
    restricted to their occupied modes, which is exactly how a relabelling
    of fermionic modes acts on the Fock basis.
    """
    n = state_modes
    order = list(front_positions) + [i for i in range(n) if i not in front_positions]
    new_label = {old: new for new, old in enumerate(order)}
    dim = 2 ** n
    r = np.zeros((dim, dim), dtype=complex)
    for old_index in range(dim):
        occupied = [pos for pos in range(n) if (old_index >> (n - 1 - pos)) & 1]
        mapped = [new_label[pos] for pos in occupied]
        # parity of the sort that restores increasing label order
        sign = 1
        seq = list(mapped)
        for i in range(len(seq)):
            for j in range(i + 1, len(seq)):
                if seq[i] > seq[j]:
                    sign = -sign
        new_index = 0
        occupied_new = set(mapped)
        for pos in range(n):
            new_index = (new_index << 1) | (1 if pos in occupied_new else 0)
        r[new_index, old_index] = sign
    return r


def partial_trace_jw(state: PhenomenalState, keep: ModeSet) -> PhenomenalState:
    """Independent reduction: signed mode reordering + tensor-factor trace."""
    keep.require_nonempty()
    if not keep.is_subset_of(state.subsystem):
        raise ValidationError(
            "not_subset",
            f"keep set {keep.indices} is not contained in {state.subsystem.indices}",
        )
    n = state.n_modes
    keep_pos = keep.positions_in(state.subsystem)
    m = len(keep_pos)
    if m == n:
        return PhenomenalState(keep, state.matrix)
    r = mode_sort_permutation(n, keep_pos)
    reordered = r @ state.matrix @ r.conj().T
    dk, dc = 2 ** m, 2 ** (n - m)
    reduced = np.trace(reordered.reshape(dk, dc, dk, dc), axis1=1, axis2=3)
    return PhenomenalState(keep, reduced)


def product_state(a: PhenomenalState, b: PhenomenalState) -> PhenomenalState:
    """Un-entangled composition of states on disjoint subsystems.

    Computed definitionally: embed both into the ambient space, multiply,
    and compress onto the union.  Marginals recover the inputs.
    """
    if not a.subsystem.is_disjoint(b.subsystem):
        raise ValidationError(
            "overlapping_subsystems",
            f"subsystems {a.subsystem.indices} and {b.subsystem.indices} overlap",
        )
    union = a.subsystem.union(b.subsystem)
    joint = algebra.wedge(a.embedded(), a.subsystem, b.embedded(), b.subsystem)
    small = algebra.compress_local_operator(joint, union)
    return PhenomenalState(union, small)


def expectation(state: PhenomenalState, observable: FockOperator) -> float:
    """tr(observable . rho) for a Hermitian, parity-even observable."""
    if observable.n_modes != state.n_modes:
        raise ValidationError(
            "dimension_mismatch",
            f"observable acts on {observable.n_modes} modes, state has {state.n_modes}",
        )
    scale = max(1.0, frobenius(observable.matrix))
    if frobenius(observable.matrix - observable.matrix.conj().T) > HERMITIAN_TOL * scale:
        raise ValidationError("not_hermitian", "observable must be Hermitian")
    if algebra.parity_grade(observable) != algebra.GRADE_EVEN:
        raise ValidationError(
            "ssr_violation", "observable must commute with the parity operator"
        )
    value = complex(np.trace(observable.matrix @ state.matrix))
    if abs(value.imag) > 1e-10:
        raise ValidationError(
            "internal_inconsistency",
            f"expectation of a Hermitian observable came out complex ({value:.3e})",
        )
    return float(value.real)
