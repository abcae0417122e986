"""Command-line front end: scenario runs, verification sweeps, reconstruction.

Exit codes: 0 all requested checks passed; 1 a check failed; 2 the input was
not valid JSON; 3 a validation error (including superselection violations),
reported with the offending field path.  Reports are deterministic for a
fixed scenario and seeds except for the ``timings`` block.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import descriptors as dsc
from . import serialize, verification as vf
from .errors import ScenarioParseError, ValidationError
from .fock import FockVector, ModeSet, basis_index, fock_basis_state, mode_cap
from .states import PhenomenalState, partial_trace
from .transformations import (
    PSUnitary,
    exp_hamiltonian,
    local_random_ps_unitary,
    named_gate,
    phase_distance,
)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_VALIDATION = 3


def _fail(code: str, message: str, field: str):
    raise ValidationError(code, message, field=field)


def _build_initial_state(entry, n_modes: int) -> FockVector:
    field = "initial_state"
    if not isinstance(entry, list) or not entry:
        _fail("bad_schema", "initial_state must be a non-empty list", field)
    if all(isinstance(x, int) for x in entry):
        if len(entry) != n_modes:
            _fail("bad_schema", f"occupation list must have length {n_modes}", field)
        return fock_basis_state(n_modes, entry)
    amplitudes = np.zeros(2 ** n_modes, dtype=complex)
    parities = set()
    for i, term in enumerate(entry):
        tfield = f"{field}[{i}]"
        if not isinstance(term, dict) or "occupation" not in term or "amplitude" not in term:
            _fail("bad_schema", "superposition terms need occupation and amplitude", tfield)
        occ = term["occupation"]
        if not isinstance(occ, list) or len(occ) != n_modes or any(o not in (0, 1) for o in occ):
            _fail("bad_schema", f"occupation must be a 0/1 list of length {n_modes}", tfield)
        amp = serialize.json_to_complex(term["amplitude"], f"{tfield}.amplitude")
        parities.add(sum(occ) % 2)
        amplitudes[basis_index(n_modes, occ)] += amp
    if len(parities) > 1:
        _fail(
            "ssr_violation",
            "superposition mixes even- and odd-parity occupations",
            field,
        )
    norm = np.linalg.norm(amplitudes)
    if norm < 1e-12:
        _fail("bad_schema", "initial state has zero norm", field)
    return FockVector(n_modes, amplitudes / norm)


def _build_gate(entry, index: int, n_modes: int) -> PSUnitary:
    field = f"gates[{index}]"
    if not isinstance(entry, dict) or "kind" not in entry:
        _fail("bad_schema", "gate entries are objects with a kind", field)
    kind = entry["kind"]
    try:
        if kind == "hamiltonian":
            matrix = serialize.json_to_matrix(entry.get("matrix"), f"{field}.matrix")
            from .fock import FockOperator

            return exp_hamiltonian(FockOperator(n_modes, matrix))
        modes = entry.get("modes")
        if not isinstance(modes, list) or not all(isinstance(m, int) for m in modes):
            _fail("bad_schema", "gate modes must be a list of integers", f"{field}.modes")
        theta = entry.get("theta")
        if not isinstance(theta, (int, float)):
            _fail("bad_schema", "gate theta must be a number", f"{field}.theta")
        return named_gate(kind, n_modes, modes=tuple(modes), theta=float(theta))
    except ValidationError as exc:
        if exc.field is None:
            raise ValidationError(exc.code, str(exc), field=field) from exc
        raise


def _parse_partitions(entry, n_modes: int) -> list[ModeSet]:
    if entry is None:
        return []
    out = []
    for i, part in enumerate(entry):
        field = f"partitions[{i}]"
        if not isinstance(part, list) or not part:
            _fail("bad_schema", "partitions are non-empty mode lists", field)
        try:
            out.append(ModeSet.of(part, n_modes))
        except ValidationError as exc:
            raise ValidationError(exc.code, str(exc), field=field) from exc
    return out


def _scenario_checks(
    scenario: dict,
    n_modes: int,
    final_state: PhenomenalState,
    global_descriptors,
    partitions: list[ModeSet],
) -> list[vf.CheckResult]:
    tolerances = scenario.get("tolerances") or {}
    if not isinstance(tolerances, dict):
        _fail("bad_schema", "tolerances must be an object", "tolerances")
    results: list[vf.CheckResult] = []
    for i, entry in enumerate(scenario.get("checks") or []):
        field = f"checks[{i}]"
        if not isinstance(entry, dict) or "name" not in entry:
            _fail("bad_schema", "check entries are objects with a name", field)
        name = entry["name"]
        seed = int(entry.get("seed", 0))
        count = int(entry.get("count", 10))
        if name == "diagram":
            tol = float(tolerances.get(name, 1e-9))
            sub = [vf.check_diagram(global_descriptors, p, tol) for p in partitions]
            if not sub:
                _fail("bad_schema", "diagram check needs at least one partition", field)
            results.append(vf._merge("diagram", sub, tol))
        elif name == "no_signalling":
            tol = float(tolerances.get(name, 1e-9))
            pairs = [
                (a, b)
                for a in partitions
                for b in partitions
                if a.indices != b.indices
                and a.is_disjoint(b)
                and a.union(b).is_full
            ]
            if not pairs:
                _fail(
                    "bad_schema",
                    "no_signalling needs two disjoint partitions covering all modes",
                    field,
                )
            sub = []
            for k in range(count):
                part_a, part_b = pairs[k % len(pairs)]
                u_a = local_random_ps_unitary(part_a, seed + 2 * k)
                v_b = local_random_ps_unitary(part_b, seed + 2 * k + 1)
                sub.append(
                    vf.check_no_signalling(final_state, u_a, v_b, part_a, part_b, tol)
                )
            results.append(vf._merge("no_signalling", sub, tol))
        elif name == "locality_invariance":
            tol = float(tolerances.get(name, 1e-10))
            proper = [p for p in partitions if not p.is_full]
            if not proper:
                _fail("bad_schema", "locality_invariance needs a proper partition", field)
            sub = []
            for k in range(count):
                part = proper[k % len(proper)]
                u = local_random_ps_unitary(part, seed + k)
                for j in part.complement().indices:
                    sub.append(vf.check_locality_invariance(u, part, j, tol))
            results.append(vf._merge("locality_invariance", sub, tol))
        elif name == "ontic_properties":
            tol = float(tolerances.get(name, 1e-9))
            results.append(
                vf.check_ontic_property_list(range(seed, seed + count), n_modes, tol)
            )
        else:
            _fail("bad_schema", f"unknown check name {name!r}", f"{field}.name")
    return results


def run_scenario(scenario: dict) -> dict:
    """Execute a parsed scenario and assemble the report."""
    started = time.monotonic()
    if not isinstance(scenario, dict):
        _fail("bad_schema", "scenario must be a JSON object", "$")
    n_modes = scenario.get("n_modes")
    if not isinstance(n_modes, int) or n_modes < 1:
        _fail("bad_schema", "n_modes must be a positive integer", "n_modes")
    if n_modes > mode_cap():
        _fail("cap_exceeded", f"n_modes={n_modes} exceeds the mode cap {mode_cap()}", "n_modes")
    if "initial_state" not in scenario:
        _fail("bad_schema", "missing initial_state", "initial_state")

    psi0 = _build_initial_state(scenario["initial_state"], n_modes)
    gates = [
        _build_gate(g, i, n_modes) for i, g in enumerate(scenario.get("gates") or [])
    ]
    total = PSUnitary(n_modes, np.eye(2 ** n_modes, dtype=complex))
    for gate in gates:
        total = gate @ total

    full = ModeSet.full(n_modes)
    final_matrix = total.matrix @ psi0.projector().matrix @ total.matrix.conj().T
    final_state = PhenomenalState(full, final_matrix)
    global_descriptors = dsc.evolve_descriptors(total, full, psi0)

    reconstructed = dsc.reconstruct_unitary(global_descriptors)
    recon = {
        "round_trip_residual": dsc._witness_residual(
            reconstructed, global_descriptors.matrices()
        ),
        "phase_blind_distance": phase_distance(reconstructed.matrix, total.matrix),
    }

    partitions = _parse_partitions(scenario.get("partitions"), n_modes)
    partition_blocks = []
    for part in partitions:
        partition_blocks.append(
            {
                "modes": list(part.indices),
                "phenomenal": serialize.state_to_json(partial_trace(final_state, part)),
                "descriptors": serialize.descriptor_set_to_json(
                    dsc.ontic_project(global_descriptors, part)
                ),
            }
        )

    checks = _scenario_checks(
        scenario, n_modes, final_state, global_descriptors, partitions
    )

    report = {
        "schema_version": serialize.SCHEMA_VERSION,
        "scenario": scenario,
        "scenario_hash": serialize.content_hash(scenario),
        "n_modes": n_modes,
        "final_state": serialize.state_to_json(final_state),
        "global_descriptors": serialize.descriptor_set_to_json(global_descriptors),
        "reconstruction": recon,
        "partitions": partition_blocks,
        "checks": [c.to_json() for c in checks],
        "timings": {"total_seconds": time.monotonic() - started},
    }
    return report


def _read_json(path: str):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, "r", encoding="utf-8") as fh:
                text = fh.read()
    except OSError as exc:
        raise ScenarioParseError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioParseError(f"malformed JSON in {path}: {exc}") from exc


def _emit(data: dict, out_path: str | None):
    text = json.dumps(data, sort_keys=True, indent=2)
    if out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _checks_passed(checks: list[dict]) -> bool:
    return all(c["passed"] for c in checks)


def _cmd_simulate(args) -> int:
    scenario = _read_json(args.scenario)
    report = run_scenario(scenario)
    _emit(report, args.output)
    for check in report["checks"]:
        status = "pass" if check["passed"] else "FAIL"
        print(
            f"{status} {check['name']}: residual {check['residual']:.3e}"
            f" (tolerance {check['tolerance']:g})",
            file=sys.stderr,
        )
    return EXIT_OK if _checks_passed(report["checks"]) else EXIT_CHECK_FAILED


def _cmd_verify(args) -> int:
    started = time.monotonic()
    results = vf.run_sweep(args.modes, args.seeds, args.count)
    report = {
        "schema_version": serialize.SCHEMA_VERSION,
        "sweep": {"modes": args.modes, "seeds": args.seeds, "count": args.count},
        "checks": [r.to_json() for r in results],
        "timings": {"total_seconds": time.monotonic() - started},
    }
    _emit(report, args.output)
    ok = True
    for r in results:
        status = "pass" if r.passed else "FAIL"
        ok = ok and r.passed
        print(
            f"{status} {r.name}: residual {r.residual:.3e} (tolerance {r.tolerance:g})",
            file=sys.stderr,
        )
    return EXIT_OK if ok else EXIT_CHECK_FAILED


def _cmd_reconstruct(args) -> int:
    data = _read_json(args.input)
    if isinstance(data, dict) and "global_descriptors" in data:
        payload = data["global_descriptors"]
        field = "global_descriptors"
    else:
        payload = data
        field = "descriptor_set"
    d = serialize.json_to_descriptor_set(payload, field)
    u = dsc.reconstruct_unitary(d)
    residual = dsc._witness_residual(u, d.matrices())
    out = {
        "schema_version": serialize.SCHEMA_VERSION,
        "unitary": serialize.unitary_to_json(u),
        "round_trip_residual": residual,
    }
    _emit(out, args.output)
    print(f"round-trip residual {residual:.3e}", file=sys.stderr)
    return EXIT_OK


def _cmd_schema(args) -> int:
    _emit(serialize.schema_document(), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fermidesc",
        description=(
            "Simulate parity-superselected fermionic mode systems, compute "
            "Heisenberg-picture descriptors, and verify their structural "
            "properties at desk scale."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run a scenario file and emit a report")
    sim.add_argument("scenario", help="scenario JSON path, or - for stdin")
    sim.add_argument("-o", "--output", help="write the report here instead of stdout")
    sim.set_defaults(func=_cmd_simulate)

    ver = sub.add_parser("verify", help="randomized verification sweep")
    ver.add_argument("--modes", type=int, default=3, help="system size (default 3)")
    ver.add_argument("--seeds", type=int, default=0, help="base seed (default 0)")
    ver.add_argument("--count", type=int, default=50, help="instances per family (default 50)")
    ver.add_argument("-o", "--output", help="write the report here instead of stdout")
    ver.set_defaults(func=_cmd_verify)

    rec = sub.add_parser(
        "reconstruct", help="recover the unitary behind a serialized descriptor set"
    )
    rec.add_argument("input", help="descriptor-set or report JSON path, or - for stdin")
    rec.add_argument("-o", "--output", help="write the result here instead of stdout")
    rec.set_defaults(func=_cmd_reconstruct)

    sch = sub.add_parser("schema", help="print the scenario/report schemas")
    sch.add_argument("-o", "--output", help="write the schemas here instead of stdout")
    sch.set_defaults(func=_cmd_schema)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ValidationError as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
