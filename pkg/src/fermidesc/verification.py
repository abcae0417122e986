"""Executable theorem checks returning structured evidence.

Each checker is deterministic given its inputs and seeds, declares the
tolerance it was run at, and reports the worst residual it observed along
with a per-instance breakdown.  The test suite and the CLI both consume
these; neither re-implements the physics.

Negative controls are first-class: a checker run in negative-control mode
passes exactly when the doctored input makes the property fail, which
guards against vacuous green runs.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import algebra, descriptors as dsc, states
from .errors import ValidationError
from .fock import (
    FockVector,
    ModeSet,
    annihilator,
    anticommutator,
    commutator,
    creator,
    fock_basis_state,
    frobenius,
    identity,
    parity_diagonal,
    vacuum_state,
)
from .states import PhenomenalState, partial_trace, partial_trace_jw
from .transformations import (
    PSUnitary,
    exp_hamiltonian,
    is_local_unitary,
    local_random_ps_unitary,
    phase_distance,
    random_ps_unitary,
    validate_ps_unitary,
)

TRACE_CROSS_TOL = 1e-10


@dataclass(frozen=True)
class CheckResult:
    """Outcome of one verification family: worst residual vs declared tolerance."""

    name: str
    passed: bool
    residual: float
    tolerance: float
    details: tuple[dict, ...] = field(default_factory=tuple)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "passed": bool(self.passed),
            "residual": float(self.residual),
            "tolerance": float(self.tolerance),
            "details": list(self.details),
        }


def random_phenomenal(n_modes: int, seed: int) -> PhenomenalState:
    """Random parity-superselected density operator (mixed, full rank a.s.)."""
    rng = np.random.default_rng(seed)
    probs = rng.random(2 ** n_modes)
    probs /= probs.sum()
    u = random_ps_unitary(n_modes, seed)
    rho = (u.matrix * probs[None, :]) @ u.matrix.conj().T
    return PhenomenalState(ModeSet.full(n_modes), rho)


def random_sector_state(n_modes: int, seed: int) -> FockVector:
    """Random pure state supported on a single parity sector."""
    rng = np.random.default_rng(seed)
    diag = parity_diagonal(n_modes).real
    sector = 1.0 if seed % 2 == 0 else -1.0
    idx = np.where(diag == sector)[0]
    v = np.zeros(2 ** n_modes, dtype=complex)
    v[idx] = rng.standard_normal(len(idx)) + 1.0j * rng.standard_normal(len(idx))
    v /= np.linalg.norm(v)
    return FockVector(n_modes, v)


def check_no_signalling(
    rho: PhenomenalState,
    u_a: PSUnitary,
    v_b: PSUnitary,
    part_a: ModeSet,
    part_b: ModeSet,
    tol: float = 1e-9,
) -> CheckResult:
    """Operations local to B cannot change the reduction to A, in both forms."""
    part_a.require_nonempty()
    part_b.require_nonempty()
    if not part_a.is_disjoint(part_b):
        raise ValidationError("overlapping_subsystems", "partitions overlap")
    if part_a.union(part_b).indices != rho.subsystem.indices:
        raise ValidationError(
            "not_partition", "partitions must exactly cover the state's modes"
        )
    n = rho.n_modes
    pos_a = ModeSet(part_a.positions_in(rho.subsystem), n)
    pos_b = ModeSet(part_b.positions_in(rho.subsystem), n)
    if u_a.n_modes != n or v_b.n_modes != n:
        raise ValidationError("dimension_mismatch", "unitaries must act on the state's space")
    if not is_local_unitary(u_a, pos_a):
        raise ValidationError("not_local", f"u_a is not local to modes {part_a.indices}")
    if not is_local_unitary(v_b, pos_b):
        raise ValidationError("not_local", f"v_b is not local to modes {part_b.indices}")

    uv = u_a @ v_b
    joint = uv.matrix @ rho.matrix @ uv.matrix.conj().T
    left = partial_trace(PhenomenalState(rho.subsystem, joint), part_a)
    u_small = algebra.compress_local_operator(u_a.as_operator(), pos_a)
    reduced = partial_trace(rho, part_a)
    right = u_small @ reduced.matrix @ u_small.conj().T
    res_1 = frobenius(left.matrix - right)

    conj_b = v_b.matrix @ rho.matrix @ v_b.matrix.conj().T
    res_2 = frobenius(
        partial_trace(PhenomenalState(rho.subsystem, conj_b), part_a).matrix
        - reduced.matrix
    )
    residual = max(res_1, res_2)
    detail = {
        "part_a": list(part_a.indices),
        "part_b": list(part_b.indices),
        "joint_form_residual": res_1,
        "invariance_form_residual": res_2,
    }
    return CheckResult("no_signalling", residual <= tol, residual, tol, (detail,))


def check_locality_invariance(
    u_local: PSUnitary, inside: ModeSet, outside_mode: int, tol: float = 1e-10
) -> CheckResult:
    """A unitary local to some modes leaves every other mode's annihilator alone."""
    inside.require_nonempty()
    if outside_mode in inside:
        raise ValidationError("mode_out_of_range", f"mode {outside_mode} is inside {inside.indices}")
    if not 0 <= outside_mode < inside.ambient_n:
        raise ValidationError("mode_out_of_range", f"mode {outside_mode} out of range")
    if not is_local_unitary(u_local, inside):
        raise ValidationError("not_local", f"unitary is not local to {inside.indices}")
    f = annihilator(inside.ambient_n, outside_mode)
    residual = frobenius(u_local.conjugate(f).matrix - f.matrix)
    detail = {"inside": list(inside.indices), "outside_mode": outside_mode, "residual": residual}
    return CheckResult("locality_invariance", residual <= tol, residual, tol, (detail,))


def check_diagram(
    d: dsc.DescriptorSet, j_subset: ModeSet, tol: float = 1e-9
) -> CheckResult:
    """Reduce-then-map equals map-then-reduce for any subset of modes.

    Also cross-checks the two independent partial-trace implementations on
    the instance; both must agree for the check to pass.
    """
    j_subset.require_nonempty()
    if not d.subsystem.is_full:
        raise ValidationError("not_full", "diagram check needs a full descriptor set")
    global_state = dsc.phenomenal_of(d)
    left = partial_trace(global_state, j_subset)
    right = dsc.phenomenal_of(dsc.ontic_project(d, j_subset))
    residual = frobenius(left.matrix - right.matrix)
    cross = frobenius(
        partial_trace_jw(global_state, j_subset).matrix - left.matrix
    )
    if cross > TRACE_CROSS_TOL:
        raise ValidationError(
            "internal_inconsistency",
            f"the two partial-trace implementations disagree ({cross:.3e})",
        )
    detail = {
        "j_subset": list(j_subset.indices),
        "residual": residual,
        "partial_trace_cross_residual": cross,
    }
    return CheckResult("diagram", residual <= tol, residual, tol, (detail,))


def _random_disjoint_pair(rng: np.random.Generator, n_modes: int):
    """Two disjoint non-empty mode sets; their union may or may not be everything."""
    modes = list(range(n_modes))
    rng.shuffle(modes)
    size_a = int(rng.integers(1, n_modes))
    size_b = int(rng.integers(1, n_modes - size_a + 1))
    a = ModeSet.of(modes[:size_a], n_modes)
    b = ModeSet.of(modes[size_a : size_a + size_b], n_modes)
    return a, b


def check_ontic_property_list(
    seeds, n_modes: int, tol: float = 1e-9, negative_control: bool = False
) -> CheckResult:
    """The four structural properties of ontic states, randomized.

    1. applying V then reading off a subsystem equals the subsystem state of
       the composite evolution;
    2. restricting in two steps equals restricting once;
    3. the join of two restrictions recovers the restriction to the union,
       and does so identically for distinct witnesses;
    4. transformations local to a disjoint region act trivially.

    With ``negative_control=True`` property 4 is fed a global transformation
    instead of a local one and the check passes iff the property *fails*.
    """
    if n_modes < 2:
        raise ValidationError("mode_out_of_range", "property list needs at least 2 modes")
    full = ModeSet.full(n_modes)
    details = []
    worst = 0.0
    control_violations = 0
    for seed in seeds:
        rng = np.random.default_rng(int(seed))
        psi0 = random_sector_state(n_modes, int(seed) * 7 + 3)
        u = random_ps_unitary(n_modes, int(seed) * 7 + 4)
        v = random_ps_unitary(n_modes, int(seed) * 7 + 5)
        a, b = _random_disjoint_pair(rng, n_modes)
        union = a.union(b)
        d_full = dsc.evolve_descriptors(u, full, psi0)

        # 1. V * [U] = [VU], compared after restriction to a
        applied = dsc.ontic_project(dsc.ontic_apply(v, d_full), a)
        composed = dsc.ontic_project(dsc.evolve_descriptors(v @ u, full, psi0), a)
        r1 = max(
            frobenius(x.matrix - y.matrix)
            for x, y in zip(applied.descriptors, composed.descriptors)
        )

        # 2. restriction composes
        two_step = dsc.ontic_project(dsc.ontic_project(d_full, union), a)
        one_step = dsc.ontic_project(d_full, a)
        r2 = max(
            frobenius(x.matrix - y.matrix)
            for x, y in zip(two_step.descriptors, one_step.descriptors)
        )

        # 3. join of restrictions, with witness uniqueness
        da = dsc.ontic_project(d_full, a)
        db = dsc.ontic_project(d_full, b)
        joined = dsc.join(da, db)
        reference = dsc.ontic_project(d_full, union)
        r3 = max(
            frobenius(x.matrix - y.matrix)
            for x, y in zip(joined.descriptors, reference.descriptors)
        )
        witness = dsc.compatible(da, db).witness
        merged = {**da.matrices(), **db.matrices()}
        if union.is_full:
            other = PSUnitary(n_modes, np.exp(0.37j) * witness.matrix)
        else:
            other = local_random_ps_unitary(union.complement(), int(seed) * 7 + 6) @ witness
        r3 = max(r3, dsc._witness_residual(other, merged))

        # 4. disjoint-local actions are trivial
        if negative_control:
            w_bad = random_ps_unitary(n_modes, int(seed) * 7 + 7)
            acted = dsc.evolve_descriptors(w_bad @ v, b, psi0)
            base = dsc.ontic_project(dsc.evolve_descriptors(v, full, psi0), b)
            r4 = max(
                frobenius(x.matrix - y.matrix)
                for x, y in zip(acted.descriptors, base.descriptors)
            )
            if r4 > tol:
                control_violations += 1
            details.append({"seed": int(seed), "control_residual": r4})
            continue
        w_a = local_random_ps_unitary(a, int(seed) * 7 + 7)
        db_v = dsc.ontic_project(dsc.evolve_descriptors(v, full, psi0), b)
        acted = dsc.ontic_apply(w_a, db_v)
        r4 = max(
            frobenius(x.matrix - y.matrix)
            for x, y in zip(acted.descriptors, db_v.descriptors)
        )

        worst = max(worst, r1, r2, r3, r4)
        details.append(
            {
                "seed": int(seed),
                "a": list(a.indices),
                "b": list(b.indices),
                "compose_residual": r1,
                "project_residual": r2,
                "join_residual": r3,
                "disjoint_action_residual": r4,
            }
        )
    if negative_control:
        # residual counts missed detections, so passed <=> residual <= 0
        total = len(details)
        missed = float(total - control_violations) if total else 1.0
        return CheckResult(
            "ontic_property_list_negative_control",
            missed <= 0.0,
            missed,
            0.0,
            tuple(details),
        )
    return CheckResult("ontic_property_list", worst <= tol, worst, tol, tuple(details))


# --- sweep families used by the CLI and the acceptance suite ---------------


def check_canonical_algebra(n_modes: int, seeds, tol: float = 1e-10) -> CheckResult:
    """Exact relations on constructed operators; stability under conjugation."""
    constructed = 0.0
    for i in range(n_modes):
        for j in range(n_modes):
            fi, fj = annihilator(n_modes, i), annihilator(n_modes, j)
            constructed = max(constructed, frobenius(anticommutator(fi, fj).matrix))
            target = identity(n_modes).matrix if i == j else 0.0
            constructed = max(
                constructed, frobenius(anticommutator(fi, fj.dag()).matrix - target)
            )
    conjugated = 0.0
    for seed in seeds:
        u = random_ps_unitary(n_modes, int(seed))
        evolved = [u.conjugate(annihilator(n_modes, i)).matrix for i in range(n_modes)]
        conjugated = max(
            conjugated, dsc.descriptor_algebra_residual(evolved, 2 ** n_modes)
        )
    detail = {
        "n_modes": n_modes,
        "constructed_residual": constructed,
        "conjugated_residual": conjugated,
    }
    # construction must be exact; any deviation at all is a failure
    residual = conjugated if constructed == 0.0 else float("inf")
    return CheckResult("canonical_algebra", residual <= tol, residual, tol, (detail,))


def check_ssr_gatekeeping(n_modes: int, seeds) -> CheckResult:
    """Forbidden parity-mixing inputs are rejected; sector-Haar samples pass."""
    failures = []

    forbidden_state = 0.5 * np.array([[1, 1], [1, 1]], dtype=complex)
    try:
        states.validate_phenomenal(ModeSet.full(1), forbidden_state)
        failures.append("parity-mixing state accepted")
    except ValidationError as exc:
        if exc.code != "ssr_violation":
            failures.append(f"state rejected with wrong code {exc.code}")

    gen = annihilator(2, 0) + creator(2, 0)
    try:
        exp_hamiltonian(gen)
        failures.append("parity-odd generator accepted")
    except ValidationError as exc:
        if exc.code != "ssr_violation":
            failures.append(f"generator rejected with wrong code {exc.code}")

    hadamard = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
    try:
        validate_ps_unitary(hadamard)
        failures.append("parity-mixing unitary accepted")
    except ValidationError as exc:
        if exc.code != "ssr_violation":
            failures.append(f"unitary rejected with wrong code {exc.code}")

    for seed in seeds:
        try:
            random_ps_unitary(n_modes, int(seed))
        except ValidationError:
            failures.append(f"sector-Haar sample rejected at seed {seed}")
    detail = {"n_modes": n_modes, "failures": failures}
    return CheckResult("ssr_gatekeeping", not failures, float(len(failures)), 0.0, (detail,))


def check_descriptor_equivalence(n_modes: int, seeds, tol: float = 1e-9) -> CheckResult:
    """Descriptor equality at a mode is exactly off-mode locality of u v^dag."""
    worst = 0.0
    details = []
    ok = True
    for seed in seeds:
        rng = np.random.default_rng(int(seed))
        mode = int(rng.integers(n_modes))
        complement = ModeSet.of(
            [m for m in range(n_modes) if m != mode], n_modes
        )
        v = random_ps_unitary(n_modes, int(seed) * 3 + 1)
        w = local_random_ps_unitary(complement, int(seed) * 3 + 2)
        u = w @ v

        f = annihilator(n_modes, mode)
        forward = frobenius(u.conjugate(f).matrix - v.conjugate(f).matrix)
        worst = max(worst, forward)
        if not dsc.equivalent_at(u, v, ModeSet((mode,), n_modes), tol=tol):
            ok = False

        # converse: an equivalent pair's quotient must be local off-mode
        quotient = u @ v.dag()
        loc_res = algebra.locality_residual(quotient.as_operator(), complement)
        worst = max(worst, loc_res)

        # generic pairs are inequivalent
        g = random_ps_unitary(n_modes, int(seed) * 3 + 3)
        if dsc.equivalent_at(g @ v, v, ModeSet((mode,), n_modes), tol=tol):
            gf = (g @ v).conjugate(f)
            vf = v.conjugate(f)
            if frobenius(gf.matrix - vf.matrix) > tol:
                ok = False
                details.append({"seed": int(seed), "note": "false positive equivalence"})
        details.append(
            {
                "seed": int(seed),
                "mode": mode,
                "descriptor_residual": forward,
                "quotient_locality_residual": loc_res,
            }
        )
    return CheckResult("descriptor_equivalence", ok and worst <= tol, worst, tol, tuple(details))


def check_reconstruction(runs, tol: float = 1e-8) -> CheckResult:
    """Forward-evolve, reconstruct, and compare phase-blind; round trip too."""
    worst = 0.0
    details = []
    for n_modes, seed in runs:
        u = random_ps_unitary(n_modes, int(seed))
        psi0 = vacuum_state(n_modes)
        d = dsc.evolve_descriptors(u, ModeSet.full(n_modes), psi0)
        rec = dsc.reconstruct_unitary(d, tol)
        dist = phase_distance(rec.matrix, u.matrix)
        round_trip = dsc._witness_residual(rec, d.matrices())
        worst = max(worst, dist, round_trip)
        details.append(
            {
                "n_modes": n_modes,
                "seed": int(seed),
                "phase_blind_distance": dist,
                "round_trip_residual": round_trip,
            }
        )
    return CheckResult("reconstruction", worst <= tol, worst, tol, tuple(details))


def check_epimorphism(runs, tol: float = 1e-10) -> CheckResult:
    """Full-set descriptor states equal direct Schroedinger evolution."""
    worst = 0.0
    details = []
    for n_modes, seed in runs:
        u = random_ps_unitary(n_modes, int(seed))
        psi0 = random_sector_state(n_modes, int(seed) + 17)
        d = dsc.evolve_descriptors(u, ModeSet.full(n_modes), psi0)
        lhs = dsc.phenomenal_of(d).matrix
        evolved = u.matrix @ psi0.projector().matrix @ u.matrix.conj().T
        residual = frobenius(lhs - evolved)
        worst = max(worst, residual)
        details.append({"n_modes": n_modes, "seed": int(seed), "residual": residual})
    return CheckResult("epimorphism", worst <= tol, worst, tol, tuple(details))


def check_qubit_ladders(n_qubits: int) -> CheckResult:
    """Exact relations of the stringless qubit lowering operators."""
    worst = 0.0
    ground = fock_basis_state(n_qubits, [0] * n_qubits).amplitudes
    for j in range(n_qubits):
        q = algebra.qubit_ladder(n_qubits, j)
        worst = max(worst, frobenius((q @ q).matrix))
        worst = max(
            worst, frobenius(anticommutator(q, q.dag()).matrix - identity(n_qubits).matrix)
        )
        worst = max(worst, float(np.linalg.norm(q.matrix @ ground)))
        for i in range(j):
            worst = max(
                worst, frobenius(commutator(algebra.qubit_ladder(n_qubits, i), q).matrix)
            )
    # regenerate the Pauli pair from the ladder and its adjoint
    q0 = algebra.qubit_ladder(n_qubits, 0)
    sx = q0 + q0.dag()
    sy = -1.0j * (q0 - q0.dag())
    eye = np.eye(2, dtype=complex)
    sx_target = np.array([[0, 1], [1, 0]], dtype=complex)
    sy_target = np.array([[0, -1j], [1j, 0]], dtype=complex)
    for _ in range(n_qubits - 1):
        sx_target = np.kron(sx_target, eye)
        sy_target = np.kron(sy_target, eye)
    worst = max(worst, frobenius(sx.matrix - sx_target))
    worst = max(worst, frobenius(sy.matrix - sy_target))
    detail = {"n_qubits": n_qubits, "residual": worst}
    return CheckResult("qubit_ladders", worst == 0.0, worst, 0.0, (detail,))


def proper_subsets(n_modes: int):
    modes = range(n_modes)
    for size in range(1, n_modes):
        yield from (ModeSet(s, n_modes) for s in itertools.combinations(modes, size))


def bipartitions(n_modes: int):
    """Unordered splits of the full mode set into two non-empty parts."""
    full = set(range(n_modes))
    seen = set()
    for subset in proper_subsets(n_modes):
        rest = tuple(sorted(full - set(subset.indices)))
        key = frozenset((subset.indices, rest))
        if key in seen:
            continue
        seen.add(key)
        yield subset, ModeSet(rest, n_modes)


def _merge(name: str, results: list[CheckResult], tol: float) -> CheckResult:
    details = tuple(d for r in results for d in r.details)
    residual = max((r.residual for r in results), default=0.0)
    passed = all(r.passed for r in results)
    return CheckResult(name, passed, residual, tol, details)


def run_sweep(n_modes: int, base_seed: int, count: int) -> list[CheckResult]:
    """The full randomized verification battery at one system size."""
    if n_modes < 2:
        raise ValidationError(
            "mode_out_of_range",
            "the sweep needs at least 2 modes (locality and signalling checks "
            "are vacuous on a single mode)",
        )
    if count < 1:
        raise ValidationError("bad_schema", "count must be at least 1")
    seeds = [base_seed + i for i in range(count)]
    out = [
        check_canonical_algebra(n_modes, seeds),
        check_ssr_gatekeeping(n_modes, seeds),
        check_qubit_ladders(n_modes),
    ]

    loc = []
    for subset in proper_subsets(n_modes):
        for seed in seeds[: max(1, count // max(1, n_modes))]:
            u = local_random_ps_unitary(subset, seed)
            for j in subset.complement().indices:
                loc.append(check_locality_invariance(u, subset, j))
    out.append(_merge("locality_invariance", loc, 1e-10))

    nosig = []
    pairs = list(bipartitions(n_modes))
    for i, seed in enumerate(seeds):
        part_a, part_b = pairs[i % len(pairs)]
        rho = random_phenomenal(n_modes, seed)
        u_a = local_random_ps_unitary(part_a, seed * 2 + 1)
        v_b = local_random_ps_unitary(part_b, seed * 2 + 2)
        nosig.append(check_no_signalling(rho, u_a, v_b, part_a, part_b))
    out.append(_merge("no_signalling", nosig, 1e-9))

    out.append(check_descriptor_equivalence(n_modes, seeds))
    out.append(check_reconstruction([(n_modes, s) for s in seeds]))
    out.append(check_epimorphism([(n_modes, s) for s in seeds]))

    diag = []
    for seed in seeds[: max(1, count // 2)]:
        u = random_ps_unitary(n_modes, seed)
        psi0 = random_sector_state(n_modes, seed + 23)
        d = dsc.evolve_descriptors(u, ModeSet.full(n_modes), psi0)
        for subset in proper_subsets(n_modes):
            diag.append(check_diagram(d, subset))
    out.append(_merge("diagram", diag, 1e-9))

    out.append(check_ontic_property_list(seeds, n_modes))
    out.append(
        check_ontic_property_list(
            seeds[: max(3, count // 10)], n_modes, negative_control=True
        )
    )
    return out
