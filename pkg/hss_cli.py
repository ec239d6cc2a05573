# hss_cli.py
"""
Command-line front end: dealer setup, recovery, refresh and share
verification for the hash scheme, plus drivers for the Shamir/Feldman
baseline and the herding demo.

    python hss_cli.py setup --threshold 2,3 --out-dir shares/
    python hss_cli.py recover shares/share_2.json shares/share_3.json --control-area shares/control_area.json
    python hss_cli.py baseline split --q 7 --t 1 --n 3 --secret 5 --seed 42
    python hss_cli.py demo herd --w 4 --u 16 --prefix "closing price 101.5"
"""

import argparse
import json
import os
import sys
from typing import List, Optional

from sharing import access_structures as acs
from sharing import files, herding, hss, shamir
from sharing.comparison import compare_schemes
from sharing.errors import (
    AccessStructureError,
    MalformedFileError,
    ParameterError,
    SecretLengthError,
    SharingError,
)
from utils.config import DEFAULT_HASH, EXIT_CODES, SEARCH_WORKERS, SETUP_WORKERS, validate_config
from utils.logging_helper import attach_console, get_module_logger
from utils.rng import make_rng
from utils.storage import atomic_write_text

logger = get_module_logger("hss_cli")

CONTROL_AREA_NAME = "control_area.json"


# ---------------------------------------------------------------------------
# argument helpers
# ---------------------------------------------------------------------------

def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise AccessStructureError(f"expected comma-separated integers, got {text!r}")


def _partition(text: str) -> List[List[int]]:
    """'1,2|3,4|5,6' -> [[1, 2], [3, 4], [5, 6]]; an empty group stays empty."""
    return [_int_list(group) for group in text.split("|")]


def _build_basis(args) -> acs.AccessStructureBasis:
    if args.threshold:
        values = _int_list(args.threshold)
        if len(values) != 2:
            raise AccessStructureError("--threshold expects t+1,n")
        t_plus_1, n = values
        return acs.threshold_basis(t_plus_1, n)
    if args.hierarchical:
        if not args.k:
            raise AccessStructureError("--hierarchical needs --k")
        spec = acs.HierarchicalSpec(
            levels=tuple(tuple(level) for level in _partition(args.hierarchical)),
            thresholds=tuple(_int_list(args.k)),
            conjunctive=not args.disjunctive,
            n=args.n or 0,
        )
        return acs.hierarchical_basis(spec)
    if args.compartment:
        if not args.ti or args.t is None:
            raise AccessStructureError("--compartment needs --ti and --t")
        spec = acs.CompartmentSpec(
            compartments=tuple(tuple(c) for c in _partition(args.compartment)),
            per_thresholds=tuple(_int_list(args.ti)),
            overall=args.t,
            n=args.n or 0,
        )
        return acs.compartment_basis(spec)

    with open(args.basis_file, "r", encoding="utf-8") as f:
        text = f.read()
    try:
        raw = json.loads(text)
        n = args.n or max(p for subset in raw for p in subset)
    except (ValueError, TypeError):
        raise AccessStructureError(f"{args.basis_file} is not a JSON array of arrays of integers")
    return acs.AccessStructureBasis.from_json(text, n)


def _hash_spec(args) -> hss.HashSpec:
    return hss.HashSpec.from_label(args.hash)


def _fixed_secret(args, hash_spec: hss.HashSpec) -> Optional[bytes]:
    if args.secret_hex:
        try:
            secret = bytes.fromhex(args.secret_hex)
        except ValueError:
            raise SecretLengthError("--secret-hex is not valid hex")
        if len(secret) != hash_spec.digest_length:
            raise SecretLengthError(
                f"secret is {len(secret)} bytes, {hash_spec.label} needs {hash_spec.digest_length}"
            )
        return secret
    if args.secret_passphrase:
        return hash_spec.digest(args.secret_passphrase.encode("utf-8"))
    return None


def _emit_secret(args, secret: hss.SecretDigest, extra: Optional[dict] = None) -> None:
    """
    Secret goes to stdout; --out opts into a file as well.

    Erasure here only drops references. Share values, the secret and
    its hex form live in immutable bytes/str objects that Python cannot
    zero in place, so they persist until garbage collection.
    """
    text = secret.hex()
    if args.json:
        print(json.dumps({"secret": text, **(extra or {})}))
    else:
        print(text)
    if getattr(args, "out", None):
        atomic_write_text(args.out, text + "\n")


def _load_shares(paths: List[str], public: hss.PublicControlArea) -> List[hss.Share]:
    shares = []
    seen = set()
    for path in paths:
        record = files.load_share_file(path, public.hash_spec.digest_length)
        files.check_binding(record, public)
        if record.participant in seen:
            raise MalformedFileError(f"participant {record.participant} supplied twice")
        seen.add(record.participant)
        shares.append(record.to_share())
    return shares


def _select_basis_element(shares: List[hss.Share], public: hss.PublicControlArea):
    supplied = tuple(sorted(s.participant for s in shares))
    subset = acs.reduce_to_basis(supplied, public.basis)
    if subset != supplied:
        note = f"reduced {{{acs.subset_key(supplied)}}} to basis element {{{acs.subset_key(subset)}}}"
        print(f"note: {note}", file=sys.stderr)
        logger.info(note)
    chosen = [s for s in shares if s.participant in subset]
    return subset, chosen


# ---------------------------------------------------------------------------
# scheme commands
# ---------------------------------------------------------------------------

def cmd_setup(args) -> int:
    basis = _build_basis(args)
    hash_spec = _hash_spec(args)
    fixed = _fixed_secret(args, hash_spec)

    dealt = hss.setup(
        basis,
        hash_spec,
        fixed_secret=fixed,
        rng=make_rng(args.seed),
        verifiable=args.verifiable,
        workers=args.workers,
    )
    control_path = args.control_area or os.path.join(args.out_dir, CONTROL_AREA_NAME)
    share_paths = files.write_share_files(args.out_dir, dealt.public, dealt.shares)
    files.write_control_area(control_path, dealt.public)

    _emit_secret(args, dealt.secret, {"control_area": control_path, "shares": share_paths})
    print(
        f"✅ {len(share_paths)} share files and {dealt.public.w} control entries written "
        f"(scheme {dealt.public.scheme_id}, v{dealt.public.version})",
        file=sys.stderr,
    )
    # drops the reference only; see _emit_secret
    del dealt
    return EXIT_CODES["ok"]


def cmd_recover(args) -> int:
    public = files.load_control_area(args.control_area)
    shares = _load_shares(args.shares, public)
    subset, chosen = _select_basis_element(shares, public)
    secret = hss.recover(chosen, subset, public)
    _emit_secret(args, secret, {"subset": list(subset)})
    return EXIT_CODES["ok"]


def cmd_refresh(args) -> int:
    public = files.load_control_area(args.control_area)
    shares = _load_shares(args.shares, public)
    subset, chosen = _select_basis_element(shares, public)

    dealt = hss.refresh(public, chosen, subset, rng=make_rng(args.seed), workers=args.workers)
    out_dir = args.out_dir or os.path.dirname(os.path.abspath(args.control_area))
    share_paths = files.replace_scheme_files(out_dir, args.control_area, dealt.public, dealt.shares)

    report = {"version": dealt.public.version, "shares": share_paths, "control_area": args.control_area}
    if args.json:
        print(json.dumps(report))
    else:
        print(f"refreshed to version {dealt.public.version}: {len(share_paths)} share files in {out_dir}")
    del dealt
    return EXIT_CODES["ok"]


def cmd_verify(args) -> int:
    public = files.load_control_area(args.control_area)
    record = files.load_share_file(args.share, public.hash_spec.digest_length)
    files.check_binding(record, public)
    ok = hss.verify_share(record.to_share(), public)
    if args.json:
        print(json.dumps({"participant": record.participant, "valid": ok}))
    else:
        print(f"participant {record.participant}: {'OK' if ok else 'FAIL'}")
    return EXIT_CODES["ok"] if ok else EXIT_CODES["verify_failed"]


# ---------------------------------------------------------------------------
# baseline commands
# ---------------------------------------------------------------------------

def _shamir_shares(args) -> List[shamir.ShamirShare]:
    pairs = []
    if args.shares_file:
        with open(args.shares_file, "r", encoding="utf-8") as f:
            pairs.extend(json.load(f))
    for text in args.share or []:
        pairs.append(_int_list(text))
    try:
        return [shamir.ShamirShare(int(x), int(y)) for x, y in pairs]
    except (TypeError, ValueError):
        raise ParameterError("shares must be x,y integer pairs")


def _feldman_params(args) -> shamir.FeldmanParams:
    if args.p is None or args.g is None:
        return shamir.feldman_params_for(args.q)
    return shamir.FeldmanParams(args.p, args.q, args.g)


def _print_baseline(args, payload: dict, text: str) -> None:
    print(json.dumps(payload) if args.json else text)


def cmd_baseline_split(args) -> int:
    field = shamir.PrimeField(args.q)
    polynomial, points = shamir.shamir_split(args.secret, args.t, args.n, field, make_rng(args.seed))
    pairs = [[pt.x, pt.y] for pt in points]
    payload = {"q": args.q, "t": args.t, "shares": pairs}
    if args.show_polynomial:
        payload["coefficients"] = list(polynomial.coefficients)
    _print_baseline(args, payload, json.dumps(pairs))
    return EXIT_CODES["ok"]


def cmd_baseline_recover(args) -> int:
    field = shamir.PrimeField(args.q)
    secret = shamir.shamir_recover(_shamir_shares(args), field, args.t)
    _print_baseline(args, {"secret": secret}, str(secret))
    return EXIT_CODES["ok"]


def cmd_baseline_renew(args) -> int:
    field = shamir.PrimeField(args.q)
    polynomial = shamir.ShamirPolynomial(field, tuple(_int_list(args.coefficients)))
    renewed, points = shamir.proactive_renew(polynomial, args.n, make_rng(args.seed))
    pairs = [[pt.x, pt.y] for pt in points]
    payload = {"q": args.q, "shares": pairs, "coefficients": list(renewed.coefficients)}
    _print_baseline(args, payload, json.dumps(pairs))
    return EXIT_CODES["ok"]


def cmd_baseline_commit(args) -> int:
    params = _feldman_params(args)
    polynomial = shamir.ShamirPolynomial(params.field, tuple(_int_list(args.coefficients)))
    commitments = shamir.feldman_commit(polynomial, params)
    payload = {"p": params.p, "q": params.q, "g": params.g, "commitments": list(commitments)}
    _print_baseline(args, payload, ",".join(str(c) for c in commitments))
    return EXIT_CODES["ok"]


def cmd_baseline_verify(args) -> int:
    params = _feldman_params(args)
    x, y = _int_list(args.point)
    ok = shamir.feldman_verify(shamir.ShamirShare(x, y), _int_list(args.commitments), params)
    _print_baseline(args, {"x": x, "y": y, "valid": ok}, "OK" if ok else "FAIL")
    return EXIT_CODES["ok"] if ok else EXIT_CODES["verify_failed"]


def cmd_baseline_compare(args) -> int:
    df = compare_schemes(args.t_plus_1, args.n, seed=args.seed, hash_spec=_hash_spec(args))
    if args.csv:
        df.to_csv(args.csv, index=False)
    print(df.to_json(orient="records") if args.json else df.to_string(index=False))
    return EXIT_CODES["ok"]


# ---------------------------------------------------------------------------
# demo commands
# ---------------------------------------------------------------------------

def _demo_hash(args) -> herding.TruncatedIterativeHash:
    return herding.TruncatedIterativeHash(args.u, hss.HashSpec(args.hash.split("/")[0]))


def _report(args, report: dict, summary: str) -> None:
    if args.json:
        print(json.dumps(report))
        print(summary, file=sys.stderr)
    else:
        print(summary)


def cmd_demo_collide(args) -> int:
    hash_fn = _demo_hash(args)
    pair = herding.find_collision(args.chaining, hash_fn, make_rng(args.seed), args.workers)
    ok = herding.verify_collision(pair, hash_fn)
    report = {
        "u": args.u,
        "chaining_in": pair.chaining_in,
        "block_a": f"{pair.block_a:016x}",
        "block_b": f"{pair.block_b:016x}",
        "chaining_out": pair.chaining_out,
        "calls": pair.calls,
        "expected_calls": 2 ** (args.u // 2),
        "verified": ok,
    }
    summary = (
        f"collision at u={args.u}: {report['block_a']} / {report['block_b']} -> "
        f"{pair.chaining_out:#x} after {pair.calls} calls (2^(u/2) = {report['expected_calls']}); "
        f"replay {'OK' if ok else 'FAILED'}"
    )
    _report(args, report, summary)
    return EXIT_CODES["ok"] if ok else EXIT_CODES["verify_failed"]


def cmd_demo_multicollision(args) -> int:
    hash_fn = _demo_hash(args)
    multi = herding.build_multicollision(args.b, hash_fn, make_rng(args.seed), args.workers)
    messages = list(multi.messages())
    hashes = {hash_fn.hash_blocks(m) for m in messages}
    ok = hashes == {multi.final_hash} and all(herding.verify_collision(p, hash_fn) for p in multi.pairs)
    report = {
        "u": args.u,
        "b": args.b,
        "messages": ["".join(f"{block:016x}" for block in m) for m in messages],
        "hashes": sorted(hashes),
        "calls": multi.calls,
        "expected_calls": args.b * 2 ** (args.u // 2),
        "verified": ok,
    }
    summary = (
        f"{len(messages)} messages, {len(hashes)} distinct hash value(s), {multi.calls} calls "
        f"(b * 2^(u/2) = {report['expected_calls']}); replay {'OK' if ok else 'FAILED'}"
    )
    _report(args, report, summary)
    return EXIT_CODES["ok"] if ok else EXIT_CODES["verify_failed"]


def _diamond_report(diamond: herding.DiamondStructure, ok: bool) -> dict:
    return {
        "width": diamond.width,
        "levels": diamond.levels,
        "linking_blocks": [[f"{b:016x}" for b in level] for level in diamond.linking_blocks],
        "final_hash": diamond.final_hash,
        "calls": diamond.calls,
        "verified": ok,
    }


def cmd_demo_diamond(args) -> int:
    hash_fn = _demo_hash(args)
    diamond = herding.build_diamond(args.w, hash_fn, make_rng(args.seed))
    ok = herding.verify_diamond(diamond, hash_fn)
    summary = (
        f"diamond w={args.w}, u={args.u}: {len(diamond.levels)} levels, final hash "
        f"{diamond.final_hash:#x}, {diamond.calls} calls; replay {'OK' if ok else 'FAILED'}"
    )
    _report(args, {"u": args.u, **_diamond_report(diamond, ok)}, summary)
    return EXIT_CODES["ok"] if ok else EXIT_CODES["verify_failed"]


def cmd_demo_herd(args) -> int:
    hash_fn = _demo_hash(args)
    rng = make_rng(args.seed)
    diamond = herding.build_diamond(args.w, hash_fn, rng)

    if args.prefix_file:
        with open(args.prefix_file, "rb") as f:
            prefix = f.read()
    else:
        prefix = (args.prefix or "").encode("utf-8")

    message = herding.herd_prefix(prefix, diamond, hash_fn, rng, args.workers)
    ok = herding.verify_herded(message, diamond, hash_fn) and herding.verify_diamond(diamond, hash_fn)
    report = {
        "u": args.u,
        "diamond": _diamond_report(diamond, herding.verify_diamond(diamond, hash_fn)),
        "prefix": prefix.hex(),
        "linking_block": f"{message.linking_block:016x}",
        "leaf_index": message.leaf_index,
        "suffix": [f"{b:016x}" for b in message.suffix],
        "linking_trials": message.trials,
        "expected_trials": 2**args.u / args.w,
        "verified": ok,
    }
    summary = (
        f"herded {len(prefix)}-byte prefix into leaf {message.leaf_index} after {message.trials} trials "
        f"(2^u/w = {2**args.u // args.w}); final hash {diamond.final_hash:#x}; "
        f"verification {'OK' if ok else 'FAILED'}"
    )

    if args.trials:
        df = herding.measure_linking_cost(hash_fn, diamond, args.trials, rng)
        report["cost"] = {
            "trials": args.trials,
            "mean": df.attrs["mean"],
            "median": df.attrs["median"],
            "expected": df.attrs["expected"],
            "ratio": df.attrs["ratio"],
            "all_verified": bool(df["verified"].all()),
        }
        summary += (
            f"\nlinking cost over {args.trials} prefixes: mean {df.attrs['mean']:.0f}, "
            f"expected {df.attrs['expected']:.0f} (ratio {df.attrs['ratio']:.2f})"
        )
        ok = ok and report["cost"]["all_verified"]

    _report(args, report, summary)
    return EXIT_CODES["ok"] if ok else EXIT_CODES["verify_failed"]


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--hash", default=DEFAULT_HASH, help="hashlib algorithm, optionally name/bits")
    common.add_argument("--seed", type=int, default=None, help="seed for reproducible runs")
    common.add_argument("--json", action="store_true", help="machine-readable output")

    parser = argparse.ArgumentParser(prog="hss_cli", description="Hash-herding secret sharing toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("setup", parents=[common], help="deal shares and write the control area")
    structure = p.add_mutually_exclusive_group(required=True)
    structure.add_argument("--basis-file")
    structure.add_argument("--threshold", help="t+1,n")
    structure.add_argument("--hierarchical", help="levels, e.g. '1,2|3,4|5,6'")
    structure.add_argument("--compartment", help="compartments, e.g. '1,2|3,4|5,6'")
    p.add_argument("--k", help="hierarchical thresholds k_1,...,k_m")
    p.add_argument("--disjunctive", action="store_true", help="OR the hierarchical conditions")
    p.add_argument("--ti", help="compartment thresholds t_1,...,t_m")
    p.add_argument("--t", type=int, help="overall compartment threshold")
    p.add_argument("--n", type=int, help="participant count when not implied by the structure")
    secret = p.add_mutually_exclusive_group()
    secret.add_argument("--secret-hex")
    secret.add_argument("--secret-passphrase")
    p.add_argument("--verifiable", action="store_true", help="publish share commitments")
    p.add_argument("--out-dir", default=".")
    p.add_argument("--control-area")
    p.add_argument("--out", help="also write the secret to this file")
    p.add_argument("--workers", type=int, default=SETUP_WORKERS)
    p.set_defaults(func=cmd_setup)

    p = sub.add_parser("recover", parents=[common], help="recover the secret from share files")
    p.add_argument("shares", nargs="+")
    p.add_argument("--control-area", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_recover)

    p = sub.add_parser("refresh", parents=[common], help="re-deal shares for the same secret")
    p.add_argument("shares", nargs="+")
    p.add_argument("--control-area", required=True)
    p.add_argument("--out-dir")
    p.add_argument("--workers", type=int, default=SETUP_WORKERS)
    p.set_defaults(func=cmd_refresh)

    p = sub.add_parser("verify", parents=[common], help="check a share against its commitment")
    p.add_argument("share")
    p.add_argument("--control-area", required=True)
    p.set_defaults(func=cmd_verify)

    baseline = sub.add_parser("baseline", help="Shamir / Feldman baseline").add_subparsers(
        dest="baseline_command", required=True
    )
    p = baseline.add_parser("split", parents=[common])
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--secret", type=int, required=True)
    p.add_argument("--show-polynomial", action="store_true")
    p.set_defaults(func=cmd_baseline_split)

    p = baseline.add_parser("recover", parents=[common])
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--t", type=int)
    p.add_argument("--share", action="append", help="x,y (repeatable)")
    p.add_argument("--shares-file", help="JSON array of [x, y] pairs")
    p.set_defaults(func=cmd_baseline_recover)

    p = baseline.add_parser("renew", parents=[common])
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--coefficients", required=True, help="a_0,...,a_t")
    p.set_defaults(func=cmd_baseline_renew)

    for name, func in (("commit", cmd_baseline_commit), ("verify", cmd_baseline_verify)):
        p = baseline.add_parser(name, parents=[common])
        p.add_argument("--q", type=int, required=True)
        p.add_argument("--p", type=int)
        p.add_argument("--g", type=int)
        if name == "commit":
            p.add_argument("--coefficients", required=True, help="a_0,...,a_t")
        else:
            p.add_argument("--commitments", required=True, help="g^a_0,...,g^a_t")
            p.add_argument("--point", required=True, help="x,y")
        p.set_defaults(func=func)

    p = baseline.add_parser("compare", parents=[common])
    p.add_argument("--t-plus-1", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--csv")
    p.set_defaults(func=cmd_baseline_compare)

    demo = sub.add_parser("demo", help="herding demo on a truncated hash").add_subparsers(
        dest="demo_command", required=True
    )
    for name, func in (
        ("collide", cmd_demo_collide),
        ("multicollision", cmd_demo_multicollision),
        ("diamond", cmd_demo_diamond),
        ("herd", cmd_demo_herd),
    ):
        p = demo.add_parser(name, parents=[common])
        p.add_argument("--u", type=int, default=16, help="truncated width in bits")
        p.add_argument("--workers", type=int, default=SEARCH_WORKERS)
        if name == "collide":
            p.add_argument("--chaining", type=int, default=0)
        if name == "multicollision":
            p.add_argument("--b", type=int, required=True)
        if name in ("diamond", "herd"):
            p.add_argument("--w", type=int, required=True)
        if name == "herd":
            prefix = p.add_mutually_exclusive_group()
            prefix.add_argument("--prefix")
            prefix.add_argument("--prefix-file")
            p.add_argument("--trials", type=int, default=0, help="measure linking cost over N prefixes")
        p.set_defaults(func=func)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_CODES["usage"]

    if validate_config():
        print("error: invalid configuration, see log", file=sys.stderr)
        return EXIT_CODES["usage"]
    attach_console(["sharing"])

    try:
        return args.func(args)
    except SharingError as e:
        logger.error(f"❌ {args.command}: {e}")
        print(f"error: {e}", file=sys.stderr)
        return e.exit_code
    except OSError as e:
        logger.error(f"❌ {args.command}: I/O failure: {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CODES["io"]


if __name__ == "__main__":
    sys.exit(main())
