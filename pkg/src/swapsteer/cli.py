"""Command-line front end.

Subcommands: check, witness {npt|ccn|universal}, simulate, bound, gap-scan,
robustness.  Every run emits a JSON report (stdout or --out) embedding the
seed, version, inputs, and timings, so results are reproducible from the
report alone.

Exit codes: 0 success, 2 parse/validation failure, 3 precondition failure,
4 dimension mismatch, 5 resource guard.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from . import criteria, network, sohs, states, witnesses
from .errors import (
    DimensionMismatchError,
    PreconditionError,
    ResourceGuardError,
    ValidationError,
)

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_PRECONDITION = 3
EXIT_DIMENSION = 4
EXIT_GUARD = 5

GAP_SCAN_DMAX = 8


def _report(command: str, inputs: dict, results: dict, seed, started: float) -> dict:
    return {
        "command": command,
        "inputs": inputs,
        "seed": seed,
        "version": __version__,
        "timings": {"elapsed_s": time.time() - started},
        "results": results,
    }


def _emit(report: dict, out_path: str | None, fmt: str, csv_rows=None, csv_header=None):
    if fmt == "csv" and csv_rows is not None:
        text = _csv_text(csv_header, csv_rows)
        if out_path:
            with open(out_path, "w") as fh:
                fh.write(text)
            print(json.dumps(report))
        else:
            sys.stdout.write(text)
        return
    payload = json.dumps(report, indent=2)
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(payload + "\n")
        print(json.dumps({"written": out_path}))
    else:
        print(payload)


def _csv_text(header, rows) -> str:
    # '.' decimal, no locale, 17 significant digits for reproducible diffs
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(_csv_cell(x) for x in row))
    return "\n".join(lines) + "\n"


def _csv_cell(x) -> str:
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


# ---------------------------------------------------------------------------
# Command handlers
# ---------------------------------------------------------------------------


def cmd_check(args) -> int:
    started = time.time()
    rho = states.load_state(args.state)
    ppt = criteria.ppt_test(rho)
    ccn = criteria.ccn_test(rho)
    report = _report(
        "check",
        {"state": args.state},
        {"ppt": ppt.to_json_dict(), "ccn": ccn.to_json_dict()},
        args.seed,
        started,
    )
    _emit(report, args.out, "json")
    return EXIT_OK


def cmd_witness(args) -> int:
    started = time.time()
    inputs = {"family": args.family}
    if args.family == "npt":
        if not args.state:
            raise PreconditionError("the npt family needs --state")
        rho = states.load_state(args.state)
        inputs["state"] = args.state
        spec = witnesses.build_npt_witness(rho)
        _, predicted = network.ideal_strategy(spec, rho)
    elif args.family == "ccn":
        if not args.d:
            raise PreconditionError("the ccn family needs --d")
        uprime = states.pairs_to_complex(_load_matrix(args.uprime)) if args.uprime else None
        vprime = states.pairs_to_complex(_load_matrix(args.vprime)) if args.vprime else None
        inputs.update({"d": args.d, "uprime": args.uprime, "vprime": args.vprime})
        spec = witnesses.build_ccn_witness(args.d, uprime, vprime)
        # canonical ideal source: the maximally entangled state, value 1
        _, predicted = network.ideal_strategy(spec, states.max_entangled(args.d).to_density())
    elif args.family == "universal":
        if not (args.w and args.d):
            raise PreconditionError("the universal family needs --w and --d")
        w = states.pairs_to_complex(_load_matrix(args.w))
        inputs.update({"w": args.w, "d": args.d, "index_map": args.index_map})
        spec = witnesses.build_universal_witness(w, args.d, index_map=args.index_map)
        predicted = None
        if args.state:
            rho = states.load_state(args.state)
            inputs["state"] = args.state
            _, predicted = network.ideal_strategy(spec, rho)
    else:  # pragma: no cover - argparse restricts choices
        raise PreconditionError(f"unknown family {args.family}")

    if args.out:
        witnesses.save_spec(spec, args.out)
    report = _report(
        "witness",
        inputs,
        {
            "sohs_bound": spec.sohs_bound,
            "predicted_ideal_value": predicted,
            "settings": spec.n_settings,
            "alice_outcomes": spec.n_alice_outcomes,
            "bob_outcomes": spec.bob_outcomes,
            "spec_path": args.out,
        },
        args.seed,
        started,
    )
    print(json.dumps(report, indent=2))
    return EXIT_OK


def _load_matrix(path):
    try:
        with open(path) as fh:
            payload = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError("matrix file parse", detail=str(exc)) from exc
    return payload["matrix"] if isinstance(payload, dict) else payload


def cmd_simulate(args) -> int:
    started = time.time()
    spec = witnesses.load_spec(args.spec)
    rho1 = states.load_state(args.rho1)
    inputs = {"spec": args.spec, "rho1": args.rho1, "rho2": args.rho2, "ideal": args.ideal}
    scenario, predicted = network.ideal_strategy(spec, rho1)
    if args.rho2 and not args.ideal:
        rho2 = states.load_state(args.rho2)
        scenario = network.Scenario(
            rho1=rho1, rho2=rho2, alice=scenario.alice, bob=scenario.bob
        )
        predicted = None
    corr = network.correlations(scenario)
    value = witnesses.eval_witness(spec, corr)
    report = _report(
        "simulate",
        inputs,
        {
            "value": value,
            "predicted_ideal_value": predicted,
            "sohs_bound": spec.sohs_bound,
            "violation": bool(value > spec.sohs_bound + 1e-9),
            "correlations": corr.to_json_dict(),
        },
        args.seed,
        started,
    )
    _emit(report, args.out, "json")
    return EXIT_OK


def cmd_bound(args) -> int:
    started = time.time()
    spec = witnesses.load_spec(args.spec)
    inputs = {"spec": args.spec, "method": args.method}
    if args.method == "seesaw":
        result = sohs.seesaw_bound(spec, restarts=args.restarts, seed=args.seed or 0)
        payload = result.to_json_dict()
        numeric = result.value
    else:
        numeric = sohs.grid_bound(spec, resolution=args.resolution)
        payload = {"value": numeric, "resolution": args.resolution}
        inputs["resolution"] = args.resolution
    payload["analytic_bound"] = spec.sohs_bound
    payload["exceeds_analytic"] = bool(numeric > spec.sohs_bound + 1e-6)
    report = _report("bound", inputs, payload, args.seed, started)
    _emit(report, args.out, "json")
    return EXIT_OK


def cmd_gap_scan(args) -> int:
    started = time.time()
    if args.dmax > GAP_SCAN_DMAX:
        raise PreconditionError(f"--dmax is capped at {GAP_SCAN_DMAX} (desk-scale budget)")
    rows = []
    for d in range(2, args.dmax + 1):
        spec = witnesses.build_ccn_witness(d)
        scenario, _ = network.ideal_strategy(spec, states.max_entangled(d).to_density())
        value = witnesses.eval_witness(spec, network.correlations(scenario))
        rows.append((d, value, spec.sohs_bound, value / spec.sohs_bound))
    report = _report(
        "gap-scan",
        {"dmax": args.dmax},
        {"rows": [list(r) for r in rows]},
        args.seed,
        started,
    )
    _emit(report, args.out, args.format, csv_rows=rows,
          csv_header=("d", "quantum_value", "sohs_bound", "ratio"))
    return EXIT_OK


def cmd_robustness(args) -> int:
    started = time.time()
    if args.family != "ccn":
        raise PreconditionError("robustness sweeps are implemented for the ccn family")
    d = args.d
    spec = witnesses.build_ccn_witness(d)
    scenario, _ = network.ideal_strategy(spec, states.max_entangled(d).to_density())

    def value_at(v: float) -> float:
        s = network.Scenario(
            rho1=states.isotropic(d, v), rho2=scenario.rho2,
            alice=scenario.alice, bob=scenario.bob,
        )
        return witnesses.eval_witness(spec, network.correlations(s))

    sweep = [(v, value_at(v)) for v in np.linspace(0.0, 1.0, args.steps)]
    lo, hi = 0.0, 1.0
    target = spec.sohs_bound
    while hi - lo > 1e-9:
        mid = (lo + hi) / 2
        if value_at(mid) > target:
            hi = mid
        else:
            lo = mid
    vstar = (lo + hi) / 2
    rows = [(float(v), float(val)) for v, val in sweep]
    report = _report(
        "robustness",
        {"family": args.family, "d": d, "steps": args.steps},
        {"rows": [list(r) for r in rows], "critical_visibility": vstar,
         "sohs_bound": spec.sohs_bound},
        args.seed,
        started,
    )
    _emit(report, args.out, args.format, csv_rows=rows, csv_header=("visibility", "value"))
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swapsteer",
        description="Construct, simulate, and certify swap-steering witnesses.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--seed", type=int, default=0, help="seed recorded in the report")
        p.add_argument("--out", type=str, default=None, help="output path (default stdout)")
        p.add_argument("--format", choices=("json", "csv"), default=None)

    p = sub.add_parser("check", help="PPT and CCN reports for a state file")
    p.add_argument("state")
    common(p)
    p.set_defaults(handler=cmd_check, default_format="json")

    p = sub.add_parser("witness", help="build a witness spec")
    p.add_argument("family", choices=("npt", "ccn", "universal"))
    p.add_argument("--state", help="state file (npt; optional for universal prediction)")
    p.add_argument("--d", type=int, help="local dimension (ccn, universal)")
    p.add_argument("--uprime", help="aligning unitary for Alice (ccn)")
    p.add_argument("--vprime", help="aligning unitary for Bob (ccn)")
    p.add_argument("--w", help="entanglement witness matrix file (universal)")
    p.add_argument("--index-map", choices=("derived", "printed"), default="derived")
    common(p)
    p.set_defaults(handler=cmd_witness, default_format="json")

    p = sub.add_parser("simulate", help="Born-rule simulation of a witness")
    p.add_argument("--spec", required=True)
    p.add_argument("--rho1", required=True)
    p.add_argument("--rho2", default=None)
    p.add_argument("--ideal", action="store_true",
                   help="use the family's ideal second source and Bob measurement")
    common(p)
    p.set_defaults(handler=cmd_simulate, default_format="json")

    p = sub.add_parser("bound", help="numerically certify the hidden-state bound")
    p.add_argument("--spec", required=True)
    p.add_argument("--method", choices=("seesaw", "grid"), default="seesaw")
    p.add_argument("--restarts", type=int, default=sohs.SEESAW_RESTARTS)
    p.add_argument("--resolution", type=int, default=48)
    common(p)
    p.set_defaults(handler=cmd_bound, default_format="json")

    p = sub.add_parser("gap-scan", help="quantum value vs bound across dimensions")
    p.add_argument("--dmax", type=int, default=6)
    common(p)
    p.set_defaults(handler=cmd_gap_scan, default_format="csv")

    p = sub.add_parser("robustness", help="isotropic-noise sweep and critical visibility")
    p.add_argument("--family", default="ccn")
    p.add_argument("--d", type=int, default=2)
    p.add_argument("--steps", type=int, default=21)
    common(p)
    p.set_defaults(handler=cmd_robustness, default_format="csv")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.format is None:
        args.format = args.default_format
    try:
        return args.handler(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except PreconditionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except DimensionMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    except ResourceGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD


if __name__ == "__main__":
    sys.exit(main())
