"""Command-line front end.

Subcommands (one per core procedure):

  structure  ball | ancestry | pseudofinite
  weight     verify | tau | build-l74 | build-l76 | radii
  tau        check | witness | blockseq | growth
  element    convolve | norm | sigma | augment
  ideal      telescope | decompose-point | decompose-full | divide-shift |
             rewrite-pf | necessity | witness-45 | witness-65 | witness-75

Exit codes: 0 = run completed and every certified check passed; 1 = a
property or certificate failed (the report carries the witness), or a
search came back empty; 2 = input, parse, or resource error.

Reports are byte-stable: identical inputs and tool version produce
byte-identical bytes.  Wall-clock duration therefore goes to stderr, never
into the report.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from fractions import Fraction

from . import __version__
from .algebra import Element, convolve_many, sigma_sequence, weighted_norm
from .certify import DEFAULT_BITS, parse_rational
from .idealkit import (CertificateError, decompose_full, decompose_point,
                       divide_shift, pseudo_generation_necessity,
                       rewrite_pseudofinite, telescope, witness_nontp_element,
                       witness_prop45, witness_thm75)
from .sequences import (PrefixSequence, build_block_sequence, check_prefix_tp,
                        failure_witness, growth_check, vector_to_json)
from .serialize import (canonical_json, load_json_file, load_sequence_csv,
                        load_vector_csv, sequence_csv_text, sha256_file,
                        write_csv)
from .structures import (InvalidInput, ResourceLimit, UNIVERSE, division_balls,
                         find_ancestry, pseudo_finite_within,
                         structure_from_spec)
from .weights import (build_lemma74, build_lemma76, estimate_radii,
                      tau_step_check, tau_and_C, verify_weight_axioms,
                      weight_from_spec)


def _add_io_flags(p):
    p.add_argument("--out", help="write the report here (default: stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--precision", type=int, default=DEFAULT_BITS,
                   help="enclosure precision in bits (default 128)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="waug",
        description="workbench for weighted l1 algebras on finitely "
                    "generated groups and monoids")
    ap.add_argument("--version", action="version", version=f"waug {__version__}")
    groups = ap.add_subparsers(dest="group", required=True)

    def leaf(group, name, **kw):
        p = group.add_parser(name, **kw)
        _add_io_flags(p)
        return p

    g = groups.add_parser("structure", help="division balls and ancestries")
    sub = g.add_subparsers(dest="command", required=True)
    p = leaf(sub, "ball", help="division-closure balls B_0..B_depth")
    p.add_argument("--spec", required=True)
    p.add_argument("--depth", type=int, required=True)
    p = leaf(sub, "ancestry", help="multiplication/division chain down to e")
    p.add_argument("--spec", required=True)
    p.add_argument("--target", required=True, help="element (JSON literal)")
    p.add_argument("--depth", type=int, required=True)
    p = leaf(sub, "pseudofinite", help="is M = B_n for some n <= depth?")
    p.add_argument("--spec", required=True)
    p.add_argument("--depth", type=int, required=True)

    g = groups.add_parser("weight", help="weights: axioms, sphere minima, builders")
    sub = g.add_subparsers(dest="command", required=True)
    p = leaf(sub, "verify", help="weight axioms on a ball")
    p.add_argument("--spec", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--radius", type=int, required=True)
    p = leaf(sub, "tau", help="sphere minima tau_n and generator max C")
    p.add_argument("--spec", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--depth", type=int, required=True)
    p = leaf(sub, "build-l74", help="stepped-exponent weight, K blocks")
    p.add_argument("--rho", required=True)
    p.add_argument("--blocks", type=int, required=True)
    p = leaf(sub, "build-l76", help="self-similar gamma weight on Z up to N")
    p.add_argument("--rho", required=True)
    p.add_argument("--depth", type=int, required=True, help="table size N")
    p = leaf(sub, "radii", help="growth-radius enclosures from weight values")
    p.add_argument("--spec", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--depth", type=int, required=True)

    g = groups.add_parser("tau", help="tail-preservation analysis of sequences")
    sub = g.add_subparsers(dest="command", required=True)
    p = leaf(sub, "check", help="exact prefix ratios and D-hat")
    p.add_argument("--csv", required=True, help="sequence CSV (index,num,den)")
    p.add_argument("--depth", type=int, help="truncate to the first N entries")
    p = leaf(sub, "witness", help="search for ||x|| <= 1 with T(x) >= target")
    p.add_argument("--csv", required=True)
    p.add_argument("--target", required=True, help="rational target")
    p = leaf(sub, "blockseq", help="staircase sequence with 1/k boundary ratios")
    p.add_argument("--rho", required=True)
    p.add_argument("--blocks", type=int, required=True)
    p = leaf(sub, "growth", help="check tau_(n+1) >= D sum_(j<=n) tau_j and its bound")
    p.add_argument("--csv", required=True)
    p.add_argument("--target", required=True, help="the constant D")

    g = groups.add_parser("element", help="finitely supported elements")
    sub = g.add_subparsers(dest="command", required=True)
    p = leaf(sub, "convolve", help="convolution product (give --element twice)")
    p.add_argument("--spec", required=True)
    p.add_argument("--element", action="append", required=True)
    p = leaf(sub, "norm", help="weighted l1 norm")
    p.add_argument("--spec", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--element", required=True)
    p = leaf(sub, "sigma", help="ball sums sigma_n(f) for n = 0..depth")
    p.add_argument("--spec", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--depth", type=int, required=True)
    p = leaf(sub, "augment", help="sum of coefficients")
    p.add_argument("--spec", required=True)
    p.add_argument("--element", required=True)

    g = groups.add_parser("ideal", help="augmentation-ideal decompositions and witnesses")
    sub = g.add_subparsers(dest="command", required=True)
    p = leaf(sub, "telescope", help="f = sum beta_u (delta_e - delta_u)")
    p.add_argument("--spec", required=True)
    p.add_argument("--element", required=True)
    p = leaf(sub, "decompose-point", help="delta_e - delta_u over the generators")
    p.add_argument("--spec", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--target", required=True, help="the point u (JSON literal)")
    p.add_argument("--d", required=True, help="prefix growth constant D")
    p.add_argument("--depth", type=int, default=64,
                   help="geodesic search depth for non-standard generators")
    p = leaf(sub, "decompose-full", help="zero-augmentation f over the generators")
    p.add_argument("--spec", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--d", required=True)
    p.add_argument("--depth", type=int, default=64)
    p = leaf(sub, "divide-shift", help="divide by delta_1 - delta_0 on Z")
    p.add_argument("--spec", required=True)
    p.add_argument("--element", required=True)
    p = leaf(sub, "rewrite-pf", help="rewrite over a pseudo-finite monoid")
    p.add_argument("--spec", required=True)
    p.add_argument("--element", required=True)
    p.add_argument("--depth", type=int, default=16)
    p = leaf(sub, "necessity", help="do the supports pseudo-generate?")
    p.add_argument("--spec", required=True)
    p.add_argument("--element", action="append", required=True)
    p.add_argument("--depth", type=int, required=True)
    p = leaf(sub, "witness-45", help="ball-sum obstruction witness, K levels")
    p.add_argument("--spec", required=True)
    p.add_argument("--depth", type=int, required=True, help="K")
    p = leaf(sub, "witness-65", help="weighted ball-sum witness from alpha data")
    p.add_argument("--spec", required=True)
    p.add_argument("--weight", required=True)
    p.add_argument("--csv", required=True, help="alpha vector CSV (index,num,den)")
    p = leaf(sub, "witness-75", help="bounded element with divergent divisor")
    p.add_argument("--rho", required=True)
    p.add_argument("--blocks", type=int, required=True)
    return ap


# ---------------------------------------------------------------------------
# loading helpers
# ---------------------------------------------------------------------------

def _digest(inputs: dict, flag: str, path: str):
    inputs[flag] = {"path": path, "sha256": sha256_file(path)}


def _load_structure(args, inputs):
    _digest(inputs, "spec", args.spec)
    return structure_from_spec(load_json_file(args.spec))


def _load_weight(args, inputs):
    _digest(inputs, "weight", args.weight)
    return weight_from_spec(load_json_file(args.weight))


def _load_element(path, s, inputs, flag="element"):
    if flag in inputs:  # repeated --element
        flag = f"{flag}_{sum(1 for k in inputs if k.startswith(flag))}"
    _digest(inputs, flag, path)
    return Element.from_json(s, load_json_file(path))


def _load_sequence(args, inputs):
    _digest(inputs, "csv", args.csv)
    seq = load_sequence_csv(args.csv)
    depth = getattr(args, "depth", None)
    if depth is not None:
        if depth < 2:
            raise InvalidInput("--depth must be >= 2 for a sequence prefix")
        seq = PrefixSequence(seq.values[:depth])
    return seq


def _parse_point(text: str, s):
    try:
        obj = json.loads(text)
    except json.JSONDecodeError:
        obj = text  # bare strings like theta
    return s.elem_from_json(obj)


# ---------------------------------------------------------------------------
# handlers: (report, ok, csv) per subcommand
# ---------------------------------------------------------------------------

def _h_structure_ball(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    bt = division_balls(s, gens, args.depth)
    report = {
        "depth": args.depth,
        "ball_sizes": bt.sizes(),
        "levels": [lev if lev is UNIVERSE else list(lev) for lev in bt.levels],
        "universal_at": bt.universal_at(),
        "stable_at": bt.stable_at(),
    }
    rows = []
    total = 0
    for n, lev in enumerate(bt.levels):
        if lev is UNIVERSE or bt.balls[n] is UNIVERSE:
            rows.append([n, "all", "all"])
        else:
            total = len(bt.balls[n])
            rows.append([n, total, len(lev)])
    return report, True, (["n", "ball_size", "sphere_size"], rows)


def _h_structure_ancestry(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    u = _parse_point(args.target, s)
    chain, bt = find_ancestry(s, gens, u, args.depth)
    report = {
        "target": u,
        "depth": args.depth,
        "ball_sizes": bt.sizes(),
        "found": chain is not None,
    }
    if chain is not None:
        report["chain"] = [{"elem": st.elem, "op": st.op, "x": st.x}
                           for st in chain]
    else:
        report["reason"] = f"element not inside B_{args.depth}"
    return report, chain is not None, None


def _h_structure_pseudofinite(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    rep = pseudo_finite_within(s, gens, args.depth)
    return rep, True, None


def _h_weight_verify(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    w = _load_weight(args, inputs)
    rep = verify_weight_axioms(s, gens, w, args.radius, bits)
    return rep, rep["ok"], None


def _h_weight_tau(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    w = _load_weight(args, inputs)
    tc = tau_and_C(s, gens, w, args.depth, bits)
    l61 = tau_step_check(tc["taus"], tc["C"])
    tc["sphere_lipschitz"] = l61
    tc["certified"] = l61["ok"]
    rows = [[n + 1, t.numerator, t.denominator]
            for n, t in enumerate(tc["taus"])]
    return tc, l61["ok"], (["n", "tau_num", "tau_den"], rows)


def _h_weight_build_l74(args, inputs, bits):
    _, rep = build_lemma74(parse_rational(args.rho), args.blocks, bits)
    ok = rep["step_bounds_all_ok"] and rep["eps_monotone"] and rep["eps_below_1_over_k"]
    rep["certified"] = ok
    return rep, ok, None


def _h_weight_build_l76(args, inputs, bits):
    w, rep = build_lemma76(parse_rational(args.rho), args.depth)
    ok = (rep["star_ok"] and rep["dagger_ok"] and rep["submult_ok"]
          and rep["ratio_all_ok"])
    rep["certified"] = ok
    rep["gamma"] = w.gamma
    return rep, ok, None


def _h_weight_radii(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    w = _load_weight(args, inputs)
    rep = estimate_radii(s, w, args.depth, bits)
    return rep, True, None


def _h_tau_check(args, inputs, bits):
    seq = _load_sequence(args, inputs)
    rep = check_prefix_tp(seq)
    rows = [[n + 1, r.numerator, r.denominator]
            for n, r in enumerate(rep["ratios"])]
    return rep, True, (["n", "ratio_num", "ratio_den"], rows)


def _h_tau_witness(args, inputs, bits):
    seq = _load_sequence(args, inputs)
    rep = failure_witness(seq, args.target)
    if "x" in rep:
        rep["x"] = vector_to_json(rep["x"])
    return rep, rep["found"], None


def _h_tau_blockseq(args, inputs, bits):
    rep = build_block_sequence(parse_rational(args.rho), args.blocks)
    seq = rep.pop("sequence")
    rep["values"] = seq.values
    ok = rep["tau_geq_rho_pow_j"] and rep["boundary_all_ok"]
    rep["certified"] = ok
    return rep, ok, (["index", "numerator", "denominator"],
                     list(seq.to_csv_rows()))


def _h_tau_growth(args, inputs, bits):
    seq = _load_sequence(args, inputs)
    rep = growth_check(seq, args.target)
    return rep, rep["hypothesis_ok"] and rep["conclusion_ok"], None


def _h_element_convolve(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    if len(args.element) < 2:
        raise InvalidInput("convolve needs --element at least twice")
    els = [_load_element(p, s, inputs) for p in args.element]
    prod = convolve_many(*els)
    return {"factors": len(els), "product": prod}, True, None


def _h_element_norm(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    w = _load_weight(args, inputs)
    f = _load_element(args.element, s, inputs)
    nm = weighted_norm(f, w, bits)
    return {"norm": nm, "support_size": len(f)}, True, None


def _h_element_sigma(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    f = _load_element(args.element, s, inputs)
    bt = division_balls(s, gens, args.depth)
    values, stable = sigma_sequence(f, bt)
    rows = [[n, v.re.numerator, v.re.denominator, v.im.numerator,
             v.im.denominator] for n, v in enumerate(values)]
    rep = {"depth": args.depth, "sigma": values, "stable_from": stable}
    return rep, True, (["n", "re_num", "re_den", "im_num", "im_den"], rows)


def _h_element_augment(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    f = _load_element(args.element, s, inputs)
    return {"augmentation": f.augmentation()}, True, None


def _h_ideal_telescope(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    f = _load_element(args.element, s, inputs)
    rep = telescope(f)
    return rep, True, None


def _h_ideal_decompose_point(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    w = _load_weight(args, inputs)
    u = _parse_point(args.target, s)
    rep = decompose_point(s, gens, w, u, parse_rational(args.d), bits,
                          max_depth=args.depth)
    return rep, rep["ok"], None


def _h_ideal_decompose_full(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    w = _load_weight(args, inputs)
    f = _load_element(args.element, s, inputs)
    rep = decompose_full(s, gens, w, f, parse_rational(args.d), bits,
                         max_depth=args.depth)
    return rep, rep["ok"], None


def _h_ideal_divide_shift(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    f = _load_element(args.element, s, inputs)
    g, rep = divide_shift(f)
    return rep, rep["ok"], None


def _h_ideal_rewrite_pf(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    f = _load_element(args.element, s, inputs)
    rep = rewrite_pseudofinite(s, gens, f, depth=args.depth)
    return rep, rep["ok"], None


def _h_ideal_necessity(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    els = [_load_element(p, s, inputs) for p in args.element]
    rep = pseudo_generation_necessity(s, els, args.depth)
    return rep, rep["verdict"] == "covers", None


def _h_ideal_witness_45(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    rep = witness_prop45(s, gens, args.depth)
    return rep, True, None


def _h_ideal_witness_65(args, inputs, bits):
    s, gens = _load_structure(args, inputs)
    w = _load_weight(args, inputs)
    _digest(inputs, "csv", args.csv)
    alphas = load_vector_csv(args.csv)
    rep = witness_nontp_element(s, gens, w, alphas, bits)
    return rep, True, None


def _h_ideal_witness_75(args, inputs, bits):
    rep = witness_thm75(parse_rational(args.rho), args.blocks, bits)
    return rep, rep["ok"], None


HANDLERS = {
    ("structure", "ball"): _h_structure_ball,
    ("structure", "ancestry"): _h_structure_ancestry,
    ("structure", "pseudofinite"): _h_structure_pseudofinite,
    ("weight", "verify"): _h_weight_verify,
    ("weight", "tau"): _h_weight_tau,
    ("weight", "build-l74"): _h_weight_build_l74,
    ("weight", "build-l76"): _h_weight_build_l76,
    ("weight", "radii"): _h_weight_radii,
    ("tau", "check"): _h_tau_check,
    ("tau", "witness"): _h_tau_witness,
    ("tau", "blockseq"): _h_tau_blockseq,
    ("tau", "growth"): _h_tau_growth,
    ("element", "convolve"): _h_element_convolve,
    ("element", "norm"): _h_element_norm,
    ("element", "sigma"): _h_element_sigma,
    ("element", "augment"): _h_element_augment,
    ("ideal", "telescope"): _h_ideal_telescope,
    ("ideal", "decompose-point"): _h_ideal_decompose_point,
    ("ideal", "decompose-full"): _h_ideal_decompose_full,
    ("ideal", "divide-shift"): _h_ideal_divide_shift,
    ("ideal", "rewrite-pf"): _h_ideal_rewrite_pf,
    ("ideal", "necessity"): _h_ideal_necessity,
    ("ideal", "witness-45"): _h_ideal_witness_45,
    ("ideal", "witness-65"): _h_ideal_witness_65,
    ("ideal", "witness-75"): _h_ideal_witness_75,
}


def _parameters_of(args) -> dict:
    out = {}
    for key in ("depth", "radius", "blocks", "rho", "precision", "target", "d",
                "format"):
        val = getattr(args, key, None)
        if val is not None:
            out[key] = val
    return out


def _emit(text: str, out_path):
    if out_path:
        with open(out_path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    started = time.monotonic()
    args = build_parser().parse_args(argv)
    bits = args.precision
    if bits < 8:
        print("waug: --precision must be at least 8 bits", file=sys.stderr)
        return 2
    handler = HANDLERS[(args.group, args.command)]
    inputs = {}
    exit_code = 0
    try:
        report, ok, csv_data = handler(args, inputs, bits)
        if not ok:
            exit_code = 1
    except CertificateError as exc:
        report = dict(exc.report)
        report["error"] = "certificate"
        report["reason"] = str(exc)
        ok, csv_data, exit_code = False, None, 1
    except (InvalidInput, ResourceLimit, OSError) as exc:
        print(f"waug: error: {exc}", file=sys.stderr)
        return 2
    try:
        if args.format == "csv":
            if csv_data is None:
                print(f"waug: no CSV form for '{args.group} {args.command}'",
                      file=sys.stderr)
                return 2
            text = write_csv(*csv_data)
        else:
            envelope = {
                "tool": "waug",
                "version": __version__,
                "operation": f"{args.group} {args.command}",
                "inputs": inputs,
                "parameters": _parameters_of(args),
                "result": report,
                "ok": ok,
            }
            text = canonical_json(envelope)
        _emit(text, args.out)
    except OSError as exc:
        print(f"waug: error: {exc}", file=sys.stderr)
        return 2
    ms = int((time.monotonic() - started) * 1000)
    print(f"waug: duration_ms={ms} (stderr only; reports are byte-stable)",
          file=sys.stderr)
    return exit_code


if __name__ == "__main__":
    sys.exit(main())
