"""Heisenberg-picture descriptors as the representation of ontic states.

A descriptor set carries, for each mode of a subsystem, the evolved
annihilator U^dag f_a U, together with the fixed pure Heisenberg state.
Everything an observer could ever measure on that subsystem is a function
of these objects, and two unitaries produce the same descriptor on a mode
exactly when they differ by a transformation local to the other modes.

The group action on descriptor sets ("ontic_apply") is *substitution*:
applying w maps each tracked mode's canonical annihilator to w^dag f_k w,
expands that image over ladder monomials, and replaces every ladder factor
by the stored descriptors.  This yields the descriptors of the composite
w . u; naive two-sided conjugation of the stored matrices would compose in
the wrong order and is deliberately not what this module does.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

from . import algebra
from .errors import ValidationError
from .fock import (
    FockOperator,
    FockVector,
    ModeSet,
    annihilator,
    frobenius,
    occupation_of,
    parity_diagonal,
)
from .states import PhenomenalState
from .transformations import (
    PSUnitary,
    canonical_phase,
    invariance_support,
    validate_ps_unitary,
)

CAR_TOL = 1e-10
RECONSTRUCT_CAR_TOL = 1e-8
RECONSTRUCT_TOL = 1e-8
EQUIV_TOL = 1e-10


def _check_heisenberg_state(psi0: FockVector) -> FockVector:
    psi0.require_normalized()
    diag = parity_diagonal(psi0.n_modes)
    v = psi0.amplitudes
    even = frobenius(v - diag * v)
    odd = frobenius(v + diag * v)
    if min(even, odd) > 1e-10:
        raise ValidationError(
            "ssr_violation",
            "Heisenberg state must live in a single parity sector",
        )
    return psi0


def descriptor_algebra_residual(descriptors: Sequence[np.ndarray], dim: int) -> float:
    """Worst-case deviation of a descriptor family from the canonical relations."""
    eye = np.eye(dim)
    worst = 0.0
    for i, di in enumerate(descriptors):
        for j, dj in enumerate(descriptors):
            worst = max(worst, frobenius(di @ dj + dj @ di))
            anti = di @ dj.conj().T + dj.conj().T @ di
            target = eye if i == j else 0.0
            worst = max(worst, frobenius(anti - target))
    return worst


@dataclass(frozen=True, eq=False)
class DescriptorSet:
    """Evolved annihilators of a subsystem plus the fixed Heisenberg state."""

    subsystem: ModeSet
    descriptors: tuple[FockOperator, ...]
    heisenberg_state: FockVector

    def __post_init__(self):
        self.subsystem.require_nonempty()
        n = self.subsystem.ambient_n
        if len(self.descriptors) != len(self.subsystem):
            raise ValidationError(
                "dimension_mismatch",
                f"{len(self.descriptors)} descriptors for {len(self.subsystem)} modes",
            )
        for d in self.descriptors:
            if d.n_modes != n:
                raise ValidationError(
                    "dimension_mismatch", "descriptors must act on the ambient space"
                )
            if algebra.parity_grade(d) != algebra.GRADE_ODD:
                raise ValidationError(
                    "not_odd", "descriptors must be parity-odd operators"
                )
        if self.heisenberg_state.n_modes != n:
            raise ValidationError(
                "dimension_mismatch", "Heisenberg state must live in the ambient space"
            )
        _check_heisenberg_state(self.heisenberg_state)
        if self.subsystem.is_full:
            residual = descriptor_algebra_residual(
                [d.matrix for d in self.descriptors], 2 ** n
            )
            if residual > CAR_TOL:
                raise ValidationError(
                    "descriptor_algebra",
                    f"full descriptor set violates the canonical relations ({residual:.3e})",
                )

    @property
    def n_modes(self) -> int:
        return self.subsystem.ambient_n

    def descriptor_for(self, mode: int) -> FockOperator:
        return self.descriptors[self.subsystem.indices.index(mode)]

    def matrices(self) -> dict[int, np.ndarray]:
        return {m: d.matrix for m, d in zip(self.subsystem.indices, self.descriptors)}


def evolve_descriptors(u: PSUnitary, subsystem: ModeSet, psi0: FockVector) -> DescriptorSet:
    """Descriptor set of the subsystem after the unitary u (Heisenberg picture)."""
    subsystem.require_nonempty()
    if subsystem.ambient_n != u.n_modes:
        raise ValidationError("dimension_mismatch", "subsystem/unitary mode counts differ")
    descriptors = tuple(
        u.conjugate(annihilator(u.n_modes, a)) for a in subsystem.indices
    )
    return DescriptorSet(subsystem, descriptors, _check_heisenberg_state(psi0))


def canonical_descriptors(subsystem: ModeSet, psi0: FockVector) -> DescriptorSet:
    descriptors = tuple(annihilator(subsystem.ambient_n, a) for a in subsystem.indices)
    return DescriptorSet(subsystem, descriptors, _check_heisenberg_state(psi0))


def equivalent_at(
    u: PSUnitary, v: PSUnitary, subsystem: ModeSet, tol: float = EQUIV_TOL
) -> bool:
    """Whether u and v define the same ontic state on the subsystem.

    Per-mode descriptor equality; at a single mode this is exactly the
    equivalence "u = (something local off-mode) . v".
    """
    subsystem.require_nonempty()
    if u.n_modes != v.n_modes or subsystem.ambient_n != u.n_modes:
        raise ValidationError("dimension_mismatch", "mode counts differ")
    for a in subsystem.indices:
        f = annihilator(u.n_modes, a)
        da = u.conjugate(f).matrix
        db = v.conjugate(f).matrix
        if frobenius(da - db) > tol * max(1.0, frobenius(da)):
            return False
    return True


def _substituted_basis_images(
    desc: dict[int, np.ndarray], modes: tuple[int, ...], dim: int
) -> np.ndarray:
    """Images of the subsystem monomials with descriptors in place of ladders.

    Returns an array indexed like the flat (l, p) label order of
    ``monomial_basis``: entry l*2^m+p is  cre_d(l) . vac_d . ann_d(p)  where
    vac_d is the product of d_j d_j^dag over the subsystem.
    """
    m = len(modes)
    vac = np.eye(dim, dtype=complex)
    for j in modes:
        d = desc[j]
        vac = vac @ (d @ d.conj().T)

    left: dict[tuple[int, ...], np.ndarray] = {(): vac}

    def left_of(occupied: tuple[int, ...]) -> np.ndarray:
        if occupied in left:
            return left[occupied]
        out = desc[occupied[0]].conj().T @ left_of(occupied[1:])
        left[occupied] = out
        return out

    right: dict[tuple[int, ...], np.ndarray] = {(): np.eye(dim, dtype=complex)}

    def right_of(occupied: tuple[int, ...]) -> np.ndarray:
        # annihilators in decreasing mode order
        if occupied in right:
            return right[occupied]
        out = desc[occupied[-1]] @ right_of(occupied[:-1])
        right[occupied] = out
        return out

    images = np.empty((4 ** m, dim, dim), dtype=complex)
    k = 0
    for l_bits in range(2 ** m):
        l_occ = tuple(modes[i] for i in range(m) if (l_bits >> (m - 1 - i)) & 1)
        li = left_of(l_occ)
        for p_bits in range(2 ** m):
            p_occ = tuple(modes[i] for i in range(m) if (p_bits >> (m - 1 - i)) & 1)
            images[k] = li @ right_of(p_occ)
            k += 1
    return images


def ontic_apply(w: PSUnitary, d: DescriptorSet) -> DescriptorSet:
    """Group action of a transformation on an ontic state (substitution semantics).

    The result represents the composite (w after whatever produced d): for a
    set obtained from u it equals the descriptor set of w . u.  The moved
    modes' images must be expressible in the tracked modes, otherwise the
    partial set cannot determine the result and a coverage error is raised.
    """
    if w.n_modes != d.n_modes:
        raise ValidationError("dimension_mismatch", "transformation/descriptor mode counts differ")
    moved = invariance_support(w)
    untouched = [a not in moved for a in d.subsystem.indices]
    if all(untouched):
        return d
    if not moved.is_subset_of(d.subsystem):
        raise ValidationError(
            "insufficient_coverage",
            f"transformation moves modes {moved.indices} but the descriptor set "
            f"only tracks {d.subsystem.indices}",
        )
    basis = algebra.monomial_basis(moved)
    images = _substituted_basis_images(d.matrices(), moved.indices, 2 ** d.n_modes)
    new_descriptors = []
    for a, keep in zip(d.subsystem.indices, untouched):
        if keep:
            new_descriptors.append(d.descriptor_for(a))
            continue
        target = w.conjugate(annihilator(w.n_modes, a))
        coeffs = basis.expand(target).reshape(-1)
        new_descriptors.append(
            FockOperator(d.n_modes, np.tensordot(coeffs, images, axes=(0, 0)))
        )
    return DescriptorSet(d.subsystem, tuple(new_descriptors), d.heisenberg_state)


def ontic_project(d: DescriptorSet, subsystem: ModeSet) -> DescriptorSet:
    """Restriction of an ontic state to a subsystem: keep those modes' descriptors."""
    subsystem.require_nonempty()
    if not subsystem.is_subset_of(d.subsystem):
        raise ValidationError(
            "not_subset",
            f"{subsystem.indices} is not a subset of {d.subsystem.indices}",
        )
    kept = tuple(d.descriptor_for(a) for a in subsystem.indices)
    return DescriptorSet(subsystem, kept, d.heisenberg_state)


def phenomenal_of(d: DescriptorSet) -> PhenomenalState:
    """Phenomenal state of the subsystem determined by its descriptors.

    Expands the identity tr(E(l,p) rho_now) = <psi0| Ebar(l,p) |psi0> where
    Ebar substitutes descriptors into the monomial E(l,p); the adjoint
    pairing makes tr(E(l,p) .) the (p, l) entry of the assembled matrix.
    """
    modes = d.subsystem.indices
    m = len(modes)
    desc = d.matrices()
    psi = d.heisenberg_state.amplitudes

    vac = np.eye(2 ** d.n_modes, dtype=complex)
    for j in modes:
        dm = desc[j]
        vac = vac @ (dm @ dm.conj().T)

    # y[S] = (annihilators of S, decreasing order) |psi0>; doubles as the
    # adjoint of the creator string applied to |psi0>.
    y: dict[tuple[int, ...], np.ndarray] = {(): psi}

    def y_of(occupied: tuple[int, ...]) -> np.ndarray:
        if occupied in y:
            return y[occupied]
        out = desc[occupied[-1]] @ y_of(occupied[:-1])
        y[occupied] = out
        return out

    patterns = [
        tuple(modes[i] for i in range(m) if (bits >> (m - 1 - i)) & 1)
        for bits in range(2 ** m)
    ]
    ys = np.stack([y_of(p) for p in patterns])
    gamma = ys.conj() @ vac @ ys.T  # gamma[l, p] = <psi0| cre_d(l) vac_d ann_d(p) |psi0>
    try:
        return PhenomenalState(d.subsystem, gamma.T)
    except ValidationError as exc:
        raise ValidationError(
            "internal_inconsistency",
            f"descriptor substitution produced an invalid state ({exc})",
        ) from exc


def reconstruct_unitary(d: DescriptorSet, tol: float = RECONSTRUCT_TOL) -> PSUnitary:
    """Recover the unique (up to phase) unitary behind a full descriptor set.

    Follows the constructive argument behind the uniqueness theorem: build
    the descriptor-substituted matrix units, read off the moduli of the
    unknown unitary's coefficients from their overlaps with the canonical
    units, fix the largest coefficient's phase to zero, and fill in the rest
    from the mixed overlaps.
    """
    if not d.subsystem.is_full:
        raise ValidationError(
            "not_full", "reconstruction requires descriptors for every mode"
        )
    n = d.n_modes
    dim = 2 ** n
    desc = d.matrices()
    residual = descriptor_algebra_residual(list(desc.values()), dim)
    if residual > RECONSTRUCT_CAR_TOL:
        raise ValidationError(
            "descriptor_algebra",
            f"descriptors are not unitarily conjugate to the canonical family "
            f"(relation residual {residual:.3e})",
        )

    # vacuum projector written with descriptors: d_{N-1}..d_0 d_0^dag..d_{N-1}^dag
    vac_bar = np.eye(dim, dtype=complex)
    for j in range(n - 1, -1, -1):
        vac_bar = vac_bar @ desc[j]
    for j in range(n):
        vac_bar = vac_bar @ desc[j].conj().T
    evals, evecs = np.linalg.eigh((vac_bar + vac_bar.conj().T) / 2.0)
    omega = evecs[:, -1]

    # bar[k] = creators(occupation of k, increasing) applied to omega
    bar: dict[tuple[int, ...], np.ndarray] = {(): omega}

    def bar_of(occupied: tuple[int, ...]) -> np.ndarray:
        if occupied in bar:
            return bar[occupied]
        out = desc[occupied[0]].conj().T @ bar_of(occupied[1:])
        bar[occupied] = out
        return out

    b = np.empty((dim, dim), dtype=complex)
    for k in range(dim):
        occupied = tuple(i for i, occ in enumerate(occupation_of(n, k)) if occ)
        b[:, k] = bar_of(occupied)

    # |tr(U |m><l|)|^2 = tr(|bar l><bar l| |m><m|) = |b[m, l]|^2
    moduli = np.abs(b)
    m0, l0 = np.unravel_index(np.argmax(moduli), moduli.shape)
    pivot = b[m0, l0]
    # tr(U |m><l|) = tr(|bar l0><bar l| |m><m0|) / sqrt(tr(|bar l0><bar l0| |m0><m0|))
    u = b.conj().T * (pivot / abs(pivot))
    u = canonical_phase(u, n)

    try:
        result = validate_ps_unitary(u)
    except ValidationError as exc:
        raise ValidationError(
            "degenerate_reconstruction",
            f"assembled matrix failed validation ({exc})",
        ) from exc
    worst = 0.0
    for a in range(n):
        f = annihilator(n, a)
        worst = max(worst, frobenius(result.conjugate(f).matrix - desc[a]))
    if worst > tol:
        raise ValidationError(
            "degenerate_reconstruction",
            f"reconstructed unitary fails the round trip (residual {worst:.3e})",
        )
    return result


@dataclass(frozen=True)
class CompatibilityResult:
    """Outcome of the search for a common global extension of two local states."""

    compatible: bool
    witness: PSUnitary | None
    residual: float
    reason: str

    def __bool__(self) -> bool:
        return self.compatible


def _witness_residual(w: PSUnitary, merged: dict[int, np.ndarray]) -> float:
    worst = 0.0
    for a, target in merged.items():
        f = annihilator(w.n_modes, a)
        worst = max(worst, frobenius(w.conjugate(f).matrix - target))
    return worst


def compatible(
    da: DescriptorSet, db: DescriptorSet, tol: float = RECONSTRUCT_TOL
) -> CompatibilityResult:
    """Decide whether two local ontic states extend to a common global one.

    Returns a witness unitary whose descriptors restrict to both inputs, or
    an incompatible verdict.  Mismatched Heisenberg states are a usage
    error, not incompatibility, and raise instead.
    """
    if not da.subsystem.is_disjoint(db.subsystem):
        raise ValidationError(
            "overlapping_subsystems",
            f"subsystems {da.subsystem.indices} and {db.subsystem.indices} overlap",
        )
    da.subsystem._check_same_ambient(db.subsystem)
    pa = da.heisenberg_state.projector().matrix
    pb = db.heisenberg_state.projector().matrix
    if frobenius(pa - pb) > 1e-10:
        raise ValidationError(
            "heisenberg_mismatch", "descriptor sets carry different Heisenberg states"
        )

    n = da.n_modes
    dim = 2 ** n
    union = da.subsystem.union(db.subsystem)
    merged = {**da.matrices(), **db.matrices()}

    if union.is_full:
        ordered = tuple(
            FockOperator(n, merged[a]) for a in union.indices
        )
        try:
            full = DescriptorSet(union, ordered, da.heisenberg_state)
            witness = reconstruct_unitary(full, tol)
        except ValidationError as exc:
            return CompatibilityResult(False, None, np.inf, str(exc))
        return CompatibilityResult(
            True, witness, _witness_residual(witness, merged), "reconstructed"
        )

    # Proper union: solve the intertwiner system f_a W = W d_a (and the
    # adjoint relation) for all covered modes, then look for a unitary
    # solution via polar projection of a random nullspace element.  The
    # parity constraint [W, P] = 0 is part of the system: the plain
    # commutant also contains string-stripped odd solutions that are not
    # physical transformations.
    eye = np.eye(dim)
    blocks = []
    for a in union.indices:
        f = annihilator(n, a).matrix
        dmat = merged[a]
        blocks.append(np.kron(f, eye) - np.kron(eye, dmat.T))
        blocks.append(np.kron(f.conj().T, eye) - np.kron(eye, dmat.conj()))
    par = parity_diagonal(n)
    blocks.append(np.kron(np.diag(par), eye) - np.kron(eye, np.diag(par)))
    system = np.vstack(blocks)
    try:
        _, svals, vh = np.linalg.svd(system, full_matrices=False)
    except np.linalg.LinAlgError:
        # the default divide-and-conquer driver can fail to converge on
        # these stacked Kronecker systems; the QR-based driver is reliable
        _, svals, vh = scipy.linalg.svd(system, full_matrices=False, lapack_driver="gesvd")
    cutoff = max(system.shape) * np.finfo(float).eps * (svals[0] if len(svals) else 1.0)
    cutoff = max(cutoff, 1e-8)
    rank = int(np.sum(svals > cutoff))
    null_basis = vh[rank:].conj()
    if null_basis.shape[0] == 0:
        return CompatibilityResult(False, None, np.inf, "no joint intertwiner")

    rng = np.random.default_rng(0)
    for _ in range(8):
        coeffs = rng.standard_normal(null_basis.shape[0]) + 1.0j * rng.standard_normal(
            null_basis.shape[0]
        )
        candidate = np.tensordot(coeffs, null_basis, axes=(0, 0)).reshape(dim, dim)
        scale = np.linalg.norm(candidate)
        if scale < 1e-12:
            continue
        q = _polar_unitary(candidate / scale)
        if q is None:
            continue
        try:
            witness = validate_ps_unitary(q)
        except ValidationError:
            continue
        residual = _witness_residual(witness, merged)
        if residual <= tol:
            return CompatibilityResult(True, witness, residual, "intertwiner")
    return CompatibilityResult(False, None, np.inf, "no unitary intertwiner found")


def _polar_unitary(a: np.ndarray) -> np.ndarray | None:
    u, s, vh = np.linalg.svd(a)
    if s.min() < 1e-10 * s.max():
        return None
    return u @ vh


def join(da: DescriptorSet, db: DescriptorSet, tol: float = RECONSTRUCT_TOL) -> DescriptorSet:
    """Unique recombination of two compatible local ontic states."""
    result = compatible(da, db, tol)
    if not result:
        raise ValidationError("incompatible", f"states cannot be joined: {result.reason}")
    union = da.subsystem.union(db.subsystem)
    merged = {**da.matrices(), **db.matrices()}
    combined = DescriptorSet(
        union,
        tuple(FockOperator(da.n_modes, merged[a]) for a in union.indices),
        da.heisenberg_state,
    )
    # the witness's own evolution must restrict to the same descriptors
    assert result.witness is not None
    check = _witness_residual(result.witness, merged)
    if check > tol:
        raise ValidationError(
            "incompatible", f"witness fails to reproduce the joined descriptors ({check:.3e})"
        )
    return combined
