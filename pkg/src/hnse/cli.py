import json
import sys
from typing import Literal, Optional

import numpy as np
import yaml
from tap import Tap

from hnse.errors import EstimatorError, HermiteAccuracyError, NumericalAbort
from hnse.hermite import build_table
from hnse.io import load_field
from hnse.navier_stokes.diagnostics import analyticity_radius
from hnse.navier_stokes.runManager import HeisenbergRunManager
from hnse.verify import run_suites, suite_presets

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_ABORT = 3


class HNSEParser(Tap):
    command: Literal["verify", "run", "radius", "dump-hermite"]
    suite: Optional[str] = None  # verification suite, all suites when omitted
    config: Optional[str] = None  # YAML run configuration
    out: Optional[str] = None  # output directory (run) or file (verify, dump-hermite)
    input: Optional[str] = None  # HNSE state file
    lam: float = 1.0  # lambda of the Hermite table
    n_max: int = 4  # highest Hermite index
    n_nodes: Optional[int] = None  # Gauss-Hermite node count

    def configure(self):
        self.add_argument("command")


def run_verify(args: HNSEParser) -> int:
    if args.suite is not None and args.suite not in suite_presets:
        print(f"Suite {args.suite} not recognized.", file=sys.stderr)
        return EXIT_USAGE
    results = run_suites(None if args.suite is None else [args.suite])
    for result in results:
        print(f"{result.name}: {result.residuals}")
    if args.out is not None:
        with open(args.out, "w") as f:
            json.dump({result.name: result.as_dict() for result in results}, f, indent=2)
    return EXIT_OK if all(result.passed for result in results) else EXIT_FAILED


def run_config(args: HNSEParser) -> int:
    if args.config is None:
        print("run needs --config.", file=sys.stderr)
        return EXIT_USAGE
    try:
        manager = HeisenbergRunManager(path=args.config, out=args.out)
    except (AssertionError, KeyError, ValueError, TypeError, OSError, yaml.YAMLError) as error:
        print(f"Configuration error: {error}", file=sys.stderr)
        return EXIT_USAGE
    try:
        manager.execute()
    except NumericalAbort as error:
        print(f"Numerical abort: {error}", file=sys.stderr)
        if error.dump_path is not None:
            print(f"Last good state written to {error.dump_path}", file=sys.stderr)
        return EXIT_ABORT
    if manager.problem == "verify" and not manager.passed:
        return EXIT_FAILED
    return EXIT_OK


def run_radius(args: HNSEParser) -> int:
    if args.input is None:
        print("radius needs --input.", file=sys.stderr)
        return EXIT_USAGE
    try:
        u = load_field(args.input)
        print(repr(analyticity_radius(u)))
    except EstimatorError as error:
        print(f"Radius undefined: {error}", file=sys.stderr)
        return EXIT_FAILED
    except (ValueError, OSError) as error:
        print(f"Cannot read state: {error}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


def run_dump_hermite(args: HNSEParser) -> int:
    try:
        table = build_table(args.lam, args.n_max, args.n_nodes)
    except (HermiteAccuracyError, ValueError) as error:
        print(f"Hermite table error: {error}", file=sys.stderr)
        return EXIT_USAGE
    rows = np.column_stack([np.asarray(table.x_nodes), np.asarray(table.values[: args.n_max + 1]).T])
    header = ",".join(["x"] + [f"h_{n}" for n in range(args.n_max + 1)])
    target = sys.stdout if args.out is None else args.out
    np.savetxt(target, rows, delimiter=",", header=header, comments="", fmt="%.17g")
    print(f"orthonormality residual {table.orthonormality_residual():.3e}", file=sys.stderr)
    return EXIT_OK


commands = {
    "verify": run_verify,
    "run": run_config,
    "radius": run_radius,
    "dump-hermite": run_dump_hermite,
}


def cli_main(argv: Optional[list[str]] = None) -> int:
    try:
        args = HNSEParser().parse_args(argv)
    except SystemExit as error:
        return EXIT_OK if error.code in (0, None) else EXIT_USAGE
    return commands[args.command](args)


def main():
    sys.exit(cli_main())
