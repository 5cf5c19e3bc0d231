"""Command-line front end: analyze, generate, swap, sweep, coeffs.

Exit codes: 0 all checks pass, 1 a computational check failed, 2 usage error.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import sys
from pathlib import Path

import numpy as np

from . import analyzer, generator, metrics, swapping
from .cavity import (
    CavityParams,
    ConditionUnsatisfiable,
    InteractionMode,
    double_sided_coeffs,
    single_sided_coeffs,
    solve_balanced_detuning,
    solve_pi_half_detuning,
)
from .states import format_ket

DEFAULT_SEED = 1234
EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

# builtin defaults; a config file may override these, explicit flags override both
DEFAULTS = {
    "seed": DEFAULT_SEED,
    "mode": "ideal",
    "g": 1.0,
    "kappa_s": 0.0,
    "gamma": metrics.DEFAULT_GAMMA,
    "omega": None,
    "out": None,
    "verbose": False,
    "shots": 0,
    "ks": "0.01,0.2,0.7",
    "g_min": 0.1,
    "g_max": 3.0,
    "steps": 30,
}


class UsageError(Exception):
    pass


def read_config(path: str) -> dict:
    """Flat key=value file; '#' starts a comment, dashes in keys become underscores."""
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None
    conf = {}
    for n, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value")
        key, val = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in DEFAULTS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        conf[key] = val
    return conf


def _coerce(key: str, raw):
    default = DEFAULTS[key]
    if raw is None or not isinstance(raw, str):
        return raw
    if isinstance(default, bool):
        return raw.lower() in ("1", "true", "yes", "on")
    if isinstance(default, int):
        return int(raw)
    if isinstance(default, float) or key == "omega":
        return float(raw)
    return raw


def resolve(args: argparse.Namespace) -> argparse.Namespace:
    conf = read_config(args.config) if args.config else {}
    for key, default in DEFAULTS.items():
        if not hasattr(args, key):
            continue
        if getattr(args, key) is None:
            try:
                setattr(args, key, _coerce(key, conf.get(key, default)))
            except ValueError:
                raise UsageError(f"bad config value for {key}: {conf.get(key)!r}") from None
    if args.mode not in ("ideal", "physical"):
        raise UsageError(f"mode must be ideal or physical, got {args.mode!r}")
    return args


def cavity_params(args) -> CavityParams:
    try:
        return CavityParams(g=args.g, kappa_s=args.kappa_s, gamma=args.gamma,
                            omega=args.omega if args.omega is not None else 0.0)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def interaction_mode(args, out) -> InteractionMode:
    """Ideal mode, or physical coefficients at --omega (or the solved detunings)."""
    if args.mode == "ideal":
        return InteractionMode.ideal()
    p = cavity_params(args)
    if args.omega is not None:
        w_d = w_s = args.omega
    else:
        try:
            w_d, w_s = solve_balanced_detuning(p), solve_pi_half_detuning(p)
        except (ConditionUnsatisfiable, ValueError) as exc:
            raise UsageError(f"physical mode: {exc}") from None
    print(f"# physical mode g={p.g:g} kappa_s={p.kappa_s:g} gamma={p.gamma:g} "
          f"omega_double={w_d:.9g} omega_single={w_s:.9g}", file=out)
    return InteractionMode.physical(double_sided_coeffs(p.at(w_d)), single_sided_coeffs(p.at(w_s)))


# ---------------------------------------------------------------- commands

def cmd_analyze(args, out) -> int:
    mode = interaction_mode(args, out)
    choice = args.state.strip().lower()
    if choice == "all":
        return _analyze_all(mode, out)
    if choice == "random":
        labels = analyzer.all_labels(3)
        label = labels[int(np.random.default_rng(args.seed).integers(len(labels)))]
    else:
        try:
            label = analyzer.Classification.parse(args.state)
        except ValueError as exc:
            raise UsageError(f"bad state label {args.state!r}: {exc}") from None

    def trace(stage, state):
        print(f"[{stage}] {format_ket(state, max_terms=16)}", file=out)

    rec, got = analyzer.run_hgsa(label.state(), seed=args.seed, mode=mode,
                                 trace=trace if args.verbose else None)
    print(f"input={label}", file=out)
    for k, v in rec.as_dict(got).items():
        print(f"{k}={v}", file=out)
    ok = got == label
    print(f"result={'PASS' if ok else 'FAIL'}", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def _analyze_all(mode, out) -> int:
    print("label,branches,total_probability,correct_probability,status", file=out)
    failed = 0
    for label in analyzer.all_labels(3):
        branches = analyzer.analyze_exhaustive(label.state(), mode=mode)
        total = sum(b.probability for b in branches)
        good = sum(b.probability for b in branches if b.label == label)
        ok = abs(good - total) <= 1e-9 and (not mode.is_ideal or abs(total - 1) <= 1e-9)
        failed += not ok
        print(f"{label},{len(branches)},{total:.9f},{good:.9f},{'PASS' if ok else 'FAIL'}",
              file=out)
    print(f"# {64 - failed}/64 PASS", file=out)
    return EXIT_OK if failed == 0 else EXIT_FAIL


def cmd_generate(args, out) -> int:
    if args.shots < 0:
        raise UsageError("shots must be >= 0")
    mode = interaction_mode(args, out)
    branches, lost = generator.herald_branches(mode)
    print("spin1,spin2,label,probability,fidelity", file=out)
    ok = True
    for b in branches:
        print(f"{b.spin1},{b.spin2},{b.label},{b.probability:.9f},{b.fidelity:.9f}", file=out)
        if mode.is_ideal:
            ok &= abs(b.probability - 0.25) <= 1e-12 and abs(b.fidelity - 1) <= 1e-9
    if not mode.is_ideal:
        print(f"lost,,,{lost:.9f},", file=out)
    if args.verbose:
        for b in branches:
            if b.state is not None:
                print(f"[{b.spin1}{b.spin2}] {format_ket(b.state)}", file=out)
    if args.shots > 0:
        counts = generator.sample_heralds(args.shots, args.seed, mode)
        print(f"# sampled shots={args.shots} seed={args.seed}", file=out)
        print("spin1,spin2,count,frequency", file=out)
        for key, c in counts.items():
            if key is None:
                if not mode.is_ideal:
                    print(f"lost,,{c},{c / args.shots:.6f}", file=out)
                continue
            print(f"{key[0]},{key[1]},{c},{c / args.shots:.6f}", file=out)
    return EXIT_OK if ok else EXIT_FAIL


def cmd_swap(args, out) -> int:
    report = swapping.verify_swap_table()
    for line in report.csv_lines():
        print(line, file=out)
    if args.verbose:
        print(f"# total_probability={report.total_probability:.12f} "
              f"expansion_error={report.expansion_error:.3e} "
              "(nine-photon expansion uses Phi_3 in the spatial factor)", file=out)
    return EXIT_OK if report.ok else EXIT_FAIL


def cmd_sweep(args, out) -> int:
    try:
        ks = [float(x) for x in str(args.ks).split(",") if x.strip()]
        grid = (float(args.g_min), float(args.g_max), int(args.steps))
        metrics.g_grid(*grid)
    except ValueError as exc:
        raise UsageError(f"bad sweep range: {exc}") from None
    if not ks or any(k < 0 for k in ks):
        raise UsageError("ks must be a comma list of non-negative numbers")
    if args.gamma <= 0:
        raise UsageError("gamma must be positive")
    points = metrics.sweep(ks, grid, args.gamma)
    out.write(metrics.sweep_csv(points))
    return EXIT_OK if all(p.ok for p in points) else EXIT_FAIL


def cmd_coeffs(args, out) -> int:
    p = cavity_params(args)
    d, s = double_sided_coeffs(p), single_sided_coeffs(p)
    print(f"# g={p.g:g} kappa_s={p.kappa_s:g} gamma={p.gamma:g} omega={p.omega:g}", file=out)
    print("name,re,im,abs", file=out)
    rows = [("r_h", d.r_h), ("t_h", d.t_h), ("r_0", d.r_0), ("t_0", d.t_0),
            ("r_h_prime", s.r_h_prime), ("r_0_prime", s.r_0_prime)]
    for name, z in rows:
        re, im = z.real + 0.0, z.imag + 0.0  # avoid printing -0
        print(f"{name},{re:.9g},{im:.9g},{abs(z):.9g}", file=out)
    return EXIT_OK


COMMANDS = {
    "analyze": cmd_analyze,
    "generate": cmd_generate,
    "swap": cmd_swap,
    "sweep": cmd_sweep,
    "coeffs": cmd_coeffs,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, help=f"RNG seed (default {DEFAULT_SEED})")
    common.add_argument("--mode", choices=("ideal", "physical"))
    common.add_argument("--g", type=float, help="coupling strength in units of kappa")
    common.add_argument("--kappa-s", dest="kappa_s", type=float, help="side leakage / kappa")
    common.add_argument("--gamma", type=float, help="dipole decay / kappa (default 0.1)")
    common.add_argument("--omega", type=float, help="probe detuning / kappa")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--verbose", action="store_true", default=None)
    common.add_argument("--config", help="key=value file of defaults")

    parser = argparse.ArgumentParser(prog="hyperghz", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", parents=[common], help="run the analyzer")
    a.add_argument("state", help='"i:sign:j:sign", "all" or "random"')
    g = sub.add_parser("generate", parents=[common], help="heralded generation")
    g.add_argument("--shots", type=int, help="sampled attempts (0 = exact probabilities only)")
    sub.add_parser("swap", parents=[common], help="verify the 64 swapping branches")
    s = sub.add_parser("sweep", parents=[common], help="fidelity/efficiency sweep as CSV")
    s.add_argument("--ks", help="comma list of kappa_s/kappa")
    s.add_argument("--g-min", dest="g_min", type=float, help="min g/(kappa+kappa_s)")
    s.add_argument("--g-max", dest="g_max", type=float, help="max g/(kappa+kappa_s)")
    s.add_argument("--steps", type=int)
    sub.add_parser("coeffs", parents=[common], help="print cavity coefficients")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    try:
        args = resolve(args)
        code = COMMANDS[args.command](args, buf)
    except UsageError as exc:
        print(f"hyperghz {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = buf.getvalue()
    if args.out:
        try:
            Path(args.out).write_text(text)
        except OSError as exc:
            print(f"hyperghz: cannot write {args.out}: {exc}", file=sys.stderr)
            return EXIT_USAGE
    else:
        with contextlib.suppress(BrokenPipeError):
            sys.stdout.write(text)
    return code


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
