"""Command-line entry point.

Every run prints the resolved configuration first, then the result.  All
randomness flows from --seed through the fixed per-task derivation scheme,
so identical invocations produce identical bytes, and --threads never
changes numeric output (sample chunks are merged in index order).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from fractions import Fraction

import numpy as np

from .braids import format_braid_text, make_word, parse_braid_text
from .errors import DegeneracyError, DegenerateConfigurationError, InputError
from .estimator import default_base, estimate_phi_n, estimate_phi_tilde_n
from .experiments import (
    check_bilipschitz_disc,
    check_calabi_proportionality,
    check_crossing_bound,
    check_hs_family,
    check_lipschitz,
    check_signature_matrix,
    check_word_length_bound,
)
from .flows import flow_from_json, lp_length_radial, make_flow, radial_flow_apply
from .lengths import lp_length_of_bundle, lp_length_sampled
from .loops import (
    extract_braid_auto,
    gg_loop,
    loop_braid,
    read_trajectory_csv,
    write_trajectory_csv,
)
from .profiles import make_hs_profile, polynomial_bump, profile_from_json, profile_to_json
from .quasimorphisms import (
    homogenize,
    linking_quasimorphism,
    signature_quasimorphism,
)
from .seifert import braid_signature


def _emit(args, payload: dict):
    if args.format == "csv":
        for key, value in payload.items():
            if isinstance(value, (dict, list)):
                value = json.dumps(value, sort_keys=True)
            print(f"{key},{value}")
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))


def _print_config(args, command: str, extra: dict):
    config = {"command": command, "seed": args.seed, "threads": args.threads}
    config.update(extra)
    print("# config " + json.dumps(config, sort_keys=True))


def _parse_point(text: str):
    parts = text.split(",")
    if len(parts) != 2:
        raise InputError(f"point must be 'x,y', got {text!r}")
    return (float(parts[0]), float(parts[1]))


def _parse_points(text: str):
    return np.array([_parse_point(chunk) for chunk in text.split(";")])


def _load_flow(args):
    if args.flow:
        with open(args.flow) as fh:
            return flow_from_json(fh.read())
    if args.profile:
        with open(args.profile) as fh:
            profile = profile_from_json(fh.read())
        return make_flow([(profile, Fraction(args.time))], validate=not args.unchecked)
    raise InputError("need --flow FILE or --profile FILE")


def _load_word(args):
    if args.word is not None:
        if args.strands is None:
            raise InputError("--word needs --strands")
        return make_word([int(tok) for tok in args.word.split()], args.strands)
    if args.braid_file is not None:
        with open(args.braid_file) as fh:
            return parse_braid_text(fh.read())
    raise InputError("need --word and --strands, or --braid-file")


def _phi_by_name(name: str, i: int, j: int):
    if name == "lk":
        return linking_quasimorphism(i, j)
    if name == "signature":
        return signature_quasimorphism()
    raise InputError(f"unknown quasi-morphism {name!r}")


def cmd_flow_apply(args) -> int:
    flow = _load_flow(args)
    point = _parse_point(args.point)
    _print_config(args, "flow-apply", {"point": list(point), "polar": args.polar})
    image = radial_flow_apply(flow, point, polar=args.polar)
    _emit(args, {"point": list(point), "image": [image[0], image[1]]})
    return 0


def cmd_braid_extract(args) -> int:
    if args.trajectory:
        with open(args.trajectory) as fh:
            bundle = read_trajectory_csv(fh.read())
        source = {"trajectory": args.trajectory}
    else:
        flow = _load_flow(args)
        start = _parse_points(args.start)
        base = _parse_points(args.base) if args.base else default_base(len(start))
        bundle = gg_loop(base, start, flow, args.samples_per_segment)
        source = {"start": args.start, "base": args.base}
    _print_config(args, "braid-extract", source)
    if args.emit_trajectory:
        with open(args.emit_trajectory, "w") as fh:
            fh.write(write_trajectory_csv(bundle))
    direction = _parse_point(args.direction)
    word = (
        loop_braid(bundle, direction)
        if bundle.is_loop()
        else extract_braid_auto(bundle, direction)
    )
    sys.stdout.write(format_braid_text(word))
    return 0


def cmd_invariant(args) -> int:
    word = _load_word(args)
    _print_config(
        args,
        "invariant",
        {"kind": args.kind, "strands": word.strands, "letters": len(word.letters)},
    )
    if args.kind == "lk":
        phi = linking_quasimorphism(args.i, args.j)
        _emit(args, {"kind": "lk", "i": args.i, "j": args.j, "value": int(phi(word))})
    elif args.kind == "signature":
        _emit(args, {"kind": "signature", "value": braid_signature(word)})
    elif args.kind == "homogenized":
        phi = _phi_by_name(args.phi, args.i, args.j)
        hom = homogenize(phi, word, args.k_max)
        _emit(
            args,
            {
                "kind": f"homogenized-{args.phi}",
                "value": float(hom.value),
                "value_exact": [hom.value.numerator, hom.value.denominator],
                "error_bound": float(hom.error_bound),
                "k_used": hom.k_used,
            },
        )
    else:
        raise InputError(f"unknown invariant {args.kind!r}")
    return 0


def cmd_estimate(args) -> int:
    flow = _load_flow(args)
    phi = _phi_by_name(args.phi, args.i, args.j)
    k_schedule = (
        tuple(int(tok) for tok in args.k_schedule.split(",")) if args.k_schedule else None
    )
    _print_config(
        args,
        "estimate",
        {
            "phi": phi.name,
            "n": args.n,
            "samples": args.samples,
            "k_schedule": list(k_schedule) if k_schedule else None,
        },
    )
    if k_schedule:
        est = estimate_phi_tilde_n(
            flow,
            phi,
            args.n,
            samples=args.samples,
            k_schedule=k_schedule,
            seed=args.seed,
            threads=args.threads,
        )
    else:
        est = estimate_phi_n(
            flow, phi, args.n, samples=args.samples, seed=args.seed, threads=args.threads
        )
    _emit(args, est.to_dict())
    return 0


def cmd_lp_length(args) -> int:
    if args.trajectory:
        with open(args.trajectory) as fh:
            bundle = read_trajectory_csv(fh.read())
        _print_config(args, "lp-length", {"trajectory": args.trajectory, "p": args.p})
        _emit(args, {"p": args.p, "value": lp_length_of_bundle(bundle, args.p), "upper_bound": True})
        return 0
    flow = _load_flow(args)
    _print_config(args, "lp-length", {"p": args.p, "mode": args.mode})
    if args.mode == "analytic":
        value = lp_length_radial(flow, args.p)
        _emit(args, {"p": args.p, "value": value, "upper_bound": True})
    else:
        est = lp_length_sampled(
            flow,
            args.p,
            time_steps=args.time_steps,
            space_samples=args.space_samples,
            seed=args.seed,
        )
        payload = est.to_dict()
        payload["upper_bound"] = True
        _emit(args, payload)
    return 0


def cmd_make_hs(args) -> int:
    _print_config(args, "make-hs", {"s": args.s})
    profile = make_hs_profile(Fraction(args.s))
    text = profile_to_json(profile)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
        _emit(args, {"written": args.out})
    else:
        print(text)
    return 0


DEFAULT_CHECKS = (
    "crossing-bound",
    "word-length",
    "signature-matrix",
    "hs-family",
    "bilipschitz",
    "calabi",
    "lipschitz",
)


def _default_profiles():
    return [
        polynomial_bump(Fraction(1, 8), Fraction(1, 2), 60),
        polynomial_bump(Fraction(1, 4), Fraction(3, 4), 96),
        polynomial_bump(Fraction(3, 8), Fraction(7, 8), 48),
    ]


def cmd_verify(args) -> int:
    names = DEFAULT_CHECKS if args.all else tuple(args.checks.split(","))
    _print_config(args, "verify", {"checks": list(names), "samples": args.samples})
    from .braids import power

    reports = []
    for name in names:
        if name == "crossing-bound":
            flow = make_flow([(polynomial_bump(Fraction(1, 4), Fraction(3, 4), 24), 1)])
            rep = check_crossing_bound(flow, 3, trials=args.trials, seed=args.seed)
        elif name == "word-length":
            words = [power(make_word([1, 1], 2), k) for k in range(11)]
            rep = check_word_length_bound(
                linking_quasimorphism(), [Fraction(1)], words, seed=args.seed
            )
        elif name == "signature-matrix":
            rep = check_signature_matrix(_default_profiles())
        elif name == "hs-family":
            s_values = [Fraction(1, 4) + Fraction(k, 240) for k in range(21)]
            rep = check_hs_family(s_values)
        elif name == "bilipschitz":
            hs = [make_hs_profile(Fraction(1, 4) + Fraction(k, 60)) for k in range(5)]
            rng = np.random.default_rng(args.seed)
            vectors = [
                [Fraction(int(x), 64) for x in rng.integers(1, 256, size=5)]
                for _ in range(args.trials // 5 or 1)
            ]
            rep = check_bilipschitz_disc(hs, vectors, p=2)
        elif name == "calabi":
            rep = check_calabi_proportionality(
                _default_profiles(),
                samples=args.samples,
                seed=args.seed,
                threads=args.threads,
            )
        elif name == "lipschitz":
            prof = polynomial_bump(Fraction(1, 4), Fraction(3, 4), 20)
            family = [make_flow([(prof, t)]) for t in range(1, 9)]
            rep = check_lipschitz(
                family,
                signature_quasimorphism(),
                3,
                p=2,
                samples=max(args.samples // 2, 2000),
                seed=args.seed,
                threads=args.threads,
            )
        else:
            raise InputError(f"unknown check {name!r}")
        reports.append(rep)
        print(f"{'PASS' if rep.passed else 'FAIL'} {rep.check} margin={rep.margin:.6g}")
    if args.report:
        with open(args.report, "w") as fh:
            json.dump([r.to_dict() for r in reports], fh, indent=2, sort_keys=True)
            fh.write("\n")
    return 0 if all(r.passed for r in reports) else 1


def _add_global_flags(parser: argparse.ArgumentParser, suppress: bool):
    """Global flags work both before and after the subcommand.

    The top-level parser carries the real defaults; the per-subcommand
    copies use SUPPRESS so they only override when given explicitly.
    """

    def default(value):
        return argparse.SUPPRESS if suppress else value

    parser.add_argument(
        "--seed", type=int, default=default(0), help="master random seed"
    )
    parser.add_argument(
        "--threads",
        type=int,
        default=default(int(os.environ.get("DISCBRAID_THREADS", "1"))),
        help="worker processes for sample-parallel tasks",
    )
    parser.add_argument("--format", choices=("json", "csv"), default=default("json"))
    parser.add_argument(
        "--profile", default=default(None), help="radial profile JSON file"
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="discbraid",
        description="Braids from area-preserving disc flows: invariants, "
        "quasi-morphism estimates, and L^p lengths.",
    )
    _add_global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def add_command(name, **kwargs):
        sp = sub.add_parser(name, **kwargs)
        _add_global_flags(sp, suppress=True)
        return sp

    sp = add_command("flow-apply", help="apply the time-one flow map to a point")
    sp.add_argument("--flow", help="flow JSON file")
    sp.add_argument("--time", default="1", help="time coefficient when using --profile")
    sp.add_argument("--unchecked", action="store_true", help="skip the support check")
    sp.add_argument("--point", required=True, help="x,y (or r,theta with --polar)")
    sp.add_argument("--polar", action="store_true")
    sp.set_defaults(func=cmd_flow_apply)

    sp = add_command("braid-extract", help="braid word of a trajectory bundle")
    sp.add_argument("--trajectory", help="trajectory CSV to ingest")
    sp.add_argument("--flow", help="flow JSON file (generates the loop bundle)")
    sp.add_argument("--time", default="1")
    sp.add_argument("--unchecked", action="store_true")
    sp.add_argument("--start", help="start configuration 'x,y;x,y;...'")
    sp.add_argument("--base", help="base configuration; defaults to a polygon")
    sp.add_argument("--samples-per-segment", type=int, default=None)
    sp.add_argument("--direction", default="1,0")
    sp.add_argument("--emit-trajectory", help="also write the bundle CSV here")
    sp.set_defaults(func=cmd_braid_extract)

    sp = add_command("invariant", help="braid invariants (lk | signature | homogenized)")
    sp.add_argument("kind", choices=("lk", "signature", "homogenized"))
    sp.add_argument("--word", help="letters, e.g. '1 1 -2'")
    sp.add_argument("--strands", type=int)
    sp.add_argument("--braid-file")
    sp.add_argument("--i", type=int, default=1)
    sp.add_argument("--j", type=int, default=2)
    sp.add_argument("--phi", choices=("lk", "signature"), default="signature")
    sp.add_argument("--k-max", type=int, default=256)
    sp.set_defaults(func=cmd_invariant)

    sp = add_command("estimate", help="Monte Carlo quasi-morphism estimates")
    sp.add_argument("--phi", choices=("lk", "signature"), required=True)
    sp.add_argument("--i", type=int, default=1)
    sp.add_argument("--j", type=int, default=2)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--flow", help="flow JSON file")
    sp.add_argument("--time", default="1")
    sp.add_argument("--unchecked", action="store_true")
    sp.add_argument("--samples", type=int, default=10_000)
    sp.add_argument("--k-schedule", help="comma list; homogenized estimate when set")
    sp.set_defaults(func=cmd_estimate)

    sp = add_command("lp-length", help="L^p isotopy length (upper bound report)")
    sp.add_argument("--flow")
    sp.add_argument("--time", default="1")
    sp.add_argument("--unchecked", action="store_true")
    sp.add_argument("--trajectory")
    sp.add_argument("--p", type=float, default=2.0)
    sp.add_argument("--mode", choices=("analytic", "sampled"), default="analytic")
    sp.add_argument("--time-steps", type=int, default=33)
    sp.add_argument("--space-samples", type=int, default=65536)
    sp.set_defaults(func=cmd_lp_length)

    sp = add_command("make-hs", help="emit a zero-mean bump profile")
    sp.add_argument("--s", required=True, help="parameter in [1/4, 1/3], e.g. 7/24")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_make_hs)

    sp = add_command("verify", help="run the theorem checks")
    sp.add_argument("--all", action="store_true")
    sp.add_argument("--checks", default=",".join(DEFAULT_CHECKS))
    sp.add_argument("--samples", type=int, default=4000)
    sp.add_argument("--trials", type=int, default=50)
    sp.add_argument("--report", help="write the JSON report here")
    sp.set_defaults(func=cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, DegeneracyError, DegenerateConfigurationError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "OSError", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
