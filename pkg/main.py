import argparse
import sys

from src.errors import InputError, LabError
from src.formats import (
    instrument_from_dict,
    load_config,
    load_json,
    parse_state,
    process_to_dict,
    save_json,
)
from src.histograms import run_key, update_histograms, write_csv
from src.instrument import (
    instrument_distance,
    instrument_from_process,
    probe_vectors,
    realize_instrument,
    sample_outcomes,
    verify_axioms,
)
from src.report import Report
from src.scenarios import (
    SAMPLING_LOG_P,
    build_chi_scenario,
    build_section2,
    build_tensor_power,
    run_section2_check,
)
from src.sampling import log_p_value
from src.states import vector_state

REPORT_FILE = "report.json"
DILATION_FILE = "dilation.json"
DEFAULT_SEED = 42
DEFAULT_TOL = 1e-9
DILATION_TOL = 1e-8
DEFAULTS = {
    "k": 2,
    "levels": 3,
    "flavor": "natural",
    "d": None,
    "copies": 1,
    "shots": 100_000,
    "seed": DEFAULT_SEED,
    "state": None,
}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="output file (report or dilation JSON)")
    common.add_argument("--tol", type=float, help="tolerance for pass/fail decisions")
    common.add_argument("--seed", type=int, help=f"sampling seed (default {DEFAULT_SEED})")
    common.add_argument("--config", help="YAML or JSON scenario configuration")
    common.add_argument("--progress", action="store_true", help="show progress bars")

    parser = argparse.ArgumentParser(prog="measurement-lab",
                                     description="Finite-level quantum measurement laboratory.")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", parents=[common], help="check the instrument axioms of a file")
    verify.add_argument("instrument")
    verify.add_argument("--probes", type=int, default=16, help="number of probe vector states")

    demo = sub.add_parser("demo", parents=[common], help="run a preset scenario")
    demo.add_argument("scenario", choices=["section2", "chi", "tensor-power"])
    demo.add_argument("--k", type=int)
    demo.add_argument("--levels", type=int)
    demo.add_argument("--flavor", choices=["natural", "generic"])
    demo.add_argument("--copies", type=int)
    demo.add_argument("--state", help="diag:p1,p2,... or vec:a1,a2,...")
    demo.add_argument("--shots", type=int)
    demo.add_argument("--identity-U", dest="identity_u", action="store_true",
                      help="replace the interaction by the identity")
    demo.add_argument("--csv", help="write the outcome histogram as CSV")
    demo.add_argument("--arrow", help="upsert the outcome histogram into an Arrow IPC file")

    dilate = sub.add_parser("dilate", parents=[common], help="realize an instrument by a measuring process")
    dilate.add_argument("instrument")

    sample = sub.add_parser("sample", parents=[common], help="sample outcomes of an instrument")
    sample.add_argument("instrument")
    sample.add_argument("--state", required=True, help="diag:p1,p2,... or vec:a1,a2,...")
    sample.add_argument("--shots", type=int)
    sample.add_argument("--csv", help="write the outcome histogram as CSV")
    return parser


def resolve_config(args):
    """
    Defaults, then the --config file, then explicit flags.
    """
    config = dict(DEFAULTS)
    if args.config:
        config.update(load_config(args.config))
    for key in DEFAULTS:
        value = getattr(args, key, None)
        if value is not None:
            config[key] = value
    return config


def finish(report, path):
    save_json(report.to_dict(), path)
    failed = report.failed()
    print(f"{len(report.checks)} checks, {len(failed)} failed. Report written to {path}.")
    for check in failed:
        print(f"  FAILED {check.name}: residual {check.residual:.3e} > {check.tolerance:.1e}")
    return 0 if not failed else 1


def cmd_verify(args):
    E = instrument_from_dict(load_json(args.instrument))
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    probes = [vector_state(v) for v in probe_vectors(E.observed_dim, args.probes)]
    print(f"Verifying {E.outcome_count}-outcome instrument on M_{E.observed_dim} with {len(probes)} probes.")
    report = verify_axioms(E, probes, tol)
    report.meta = {"seed": resolve_config(args)["seed"], "config": {"instrument": args.instrument, "tol": tol}}
    return finish(report, args.out or REPORT_FILE)


def cmd_demo(args):
    config = resolve_config(args)
    tol = args.tol if args.tol is not None else DEFAULT_TOL
    k, levels, seed = config["k"], config["levels"], config["seed"]
    # every preset observes C^k
    if config["d"] is not None and config["d"] != k:
        raise InputError(f"preset scenarios observe C^k, got d={config['d']} with k={k}")
    config["d"] = k
    print(f"Running {args.scenario} with k={k}, levels={levels}, seed={seed}.")
    if args.scenario == "section2":
        p = build_section2(k, levels, config["flavor"], identity_interaction=args.identity_u)
        literal = config["state"] or "diag:" + ",".join([repr(1.0 / k)] * k)
        phi = parse_state(literal, dim=k)
        report = run_section2_check(p, phi, config["shots"], seed, tol, progress=args.progress)
        rows = list(zip(range(k), report.derived["histogram"]["counts"],
                        report.derived["histogram"]["exact_probability"]))
        if args.csv:
            write_csv(rows, args.csv)
            print(f"Histogram written to {args.csv}.")
        if args.arrow:
            update_histograms(run_key(args.scenario, seed), rows, args.arrow)
            print(f"Histogram stored in {args.arrow}.")
    elif args.scenario == "chi":
        report = build_chi_scenario(k, levels)
    else:
        report = build_tensor_power(k, levels, config["copies"])
    config["identity_U"] = bool(args.identity_u)
    report.meta = {"seed": seed, "config": {"scenario": args.scenario, "tol": tol, **config}}
    return finish(report, args.out or REPORT_FILE)


def cmd_dilate(args):
    E = instrument_from_dict(load_json(args.instrument))
    tol = args.tol if args.tol is not None else DILATION_TOL
    p = realize_instrument(E)
    distance = instrument_distance(E, instrument_from_process(p))
    out = args.out or DILATION_FILE
    save_json(process_to_dict(p), out)
    print(f"Dilation with probe dimension {p.probe_dim} written to {out}.")
    print(f"Round-trip distance {distance:.3e} (tolerance {tol:.1e}).")
    return 0 if distance <= tol else 1


def cmd_sample(args):
    config = resolve_config(args)
    E = instrument_from_dict(load_json(args.instrument))
    phi = parse_state(config["state"], dim=E.observed_dim)
    seed, shots = config["seed"], config["shots"]
    histogram = sample_outcomes(E, phi, shots, seed, progress=args.progress)
    stat, pvalue = histogram.chi_square()
    report = Report(meta={"seed": seed, "config": {"instrument": args.instrument, **config}})
    report.derived["labels"] = list(E.labels)
    report.derived["histogram"] = {
        "counts": [int(c) for c in histogram.counts],
        "exact_probability": [float(w) for w in histogram.weights],
    }
    report.derived["chi_square"] = {"statistic": stat, "p_value": pvalue}
    report.add("sampling_chi_square", log_p_value(pvalue), SAMPLING_LOG_P, "outcomes drawn with probabilities w_i")
    if args.csv:
        write_csv(histogram.rows(), args.csv)
        print(f"Histogram written to {args.csv}.")
    return finish(report, args.out or REPORT_FILE)


COMMANDS = {"verify": cmd_verify, "demo": cmd_demo, "dilate": cmd_dilate, "sample": cmd_sample}


def main(argv=None):
    """
    Parse arguments and run one subcommand. Exit codes: 0 every check passed,
    1 a check failed, 2 the input or configuration was rejected.
    """
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except LabError as e:
        print(f"Error: {e}")
        return 2
    except KeyboardInterrupt:
        print("\nInterrupted by user.")
        return 2


if __name__ == "__main__":
    sys.exit(main())
