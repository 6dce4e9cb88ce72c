"""Command-line front end.

Exit codes: 0 success, 1 domain failure (a check failed or a construction was
refused), 2 unreadable or malformed input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import List, Optional

from .chains import (
    ChainComplex,
    ChainError,
    betti_list,
    euler_characteristic,
    tensor_product,
    verify_complex,
)
from .exactq import format_rational
from .fibration import (
    degree_one_cochain,
    fibration_complex,
    is_unipotent,
    verify_rep,
)
from .gallery import gallery_names, run_gallery
from .io import (
    FormatError,
    complex_from_json,
    based_from_json,
    dumps,
    load_json,
    matrix_to_json,
    perturbation_from_json,
    rep_from_json,
    resolve_base,
    sdr_from_json,
    sdr_to_json,
    twisting_from_json,
    twisting_to_json,
)
from .perturbation import (
    Perturbation,
    PerturbationError,
    SDRData,
    basic_perturbation,
    homology_sdr,
    transfer,
    verify_sdr,
)
from .simplicial import MODELS, ReducedSimplicialSet, SimplicialError, normalized_chains
from .torsion import TorsionError, torsion
from .twisting import TwistingCochain, TwistingError, filtration_quotient, twisted_tensor, verify_twisting

DEFAULT_MAX_DIM = 512


class DomainFailure(Exception):
    """A well-formed job whose answer is a failure; carries the report."""

    def __init__(self, report: dict):
        super().__init__(report.get("error", "check failed"))
        self.report = report


def max_dim() -> int:
    raw = os.environ.get("TWISTED_CHAINS_MAX_DIM", str(DEFAULT_MAX_DIM))
    try:
        return int(raw)
    except ValueError:
        raise FormatError(f"TWISTED_CHAINS_MAX_DIM must be an integer, got {raw!r}") from None


def _cap(total: int, what: str):
    limit = max_dim()
    if total > limit:
        raise DomainFailure({"error": f"{what} has total dimension {total}, above the cap {limit} "
                                      "(raise TWISTED_CHAINS_MAX_DIM)"})


def _complex_report(c: ChainComplex) -> dict:
    lo = min(0, c.min_degree) if c.dims else 0
    return {
        "betti": betti_list(c, lo, c.max_degree if c.dims else lo),
        "betti_from_degree": lo,
        "euler": euler_characteristic(c),
        "dims": list(c.dims),
    }


def _load(path: Optional[str], flag: str):
    if path is None:
        raise FormatError(f"{flag} is required for this command")
    if path in MODELS:
        return path
    return load_json(path)


def _base(path: str) -> ReducedSimplicialSet:
    data = _load(path, "--base")
    return resolve_base(data, relative_to=None if path in MODELS else path)


def _fiber_cap(base: ReducedSimplicialSet, fiber_dims) -> None:
    _cap(normalized_chains(base).total_dim() * sum(fiber_dims), "twisted tensor product")


# ---------------------------------------------------------------------------
# commands


def cmd_homology(args) -> dict:
    data = _load(args.base, "--base")
    if isinstance(data, str) or "simplices" in data:
        x = resolve_base(data, relative_to=args.base)
        c = normalized_chains(x)
        kind = "simplicial"
    else:
        c = complex_from_json(data)
        kind = "complex"
    _cap(c.total_dim(), "input complex")
    v = verify_complex(c)
    if not v:
        raise DomainFailure({"error": v.message, "degree": v.degree})
    return {"command": "homology", "input": kind, **_complex_report(c)}


def _twist_cochain(args, base=None) -> TwistingCochain:
    data = _load(args.twist, "--twist")
    return twisting_from_json(data, base=base, relative_to=args.twist)


def cmd_twisted(args) -> dict:
    if args.rep is None and args.twist is None:
        raise FormatError("twisted needs --rep and/or --twist")
    base = _base(args.base) if args.base else None
    report = {"command": "twisted"}
    if args.rep is not None:
        rho = rep_from_json(_load(args.rep, "--rep"), base=base, relative_to=args.rep)
        _fiber_cap(rho.base, rho.fiber_dims)
        v = verify_rep(rho)
        if not v:
            raise DomainFailure({"error": v.message, "simplex": v.where})
        higher = {}
        if args.twist is not None:
            extra = _twist_cochain(args, base=rho.base)
            higher = {s: m for s, m in extra.components.items() if rho.base.dim_of[s] >= 2}
        T = fibration_complex(rho, higher)
        report["unipotent"] = bool(is_unipotent(rho))
    else:
        phi = _twist_cochain(args, base=base)
        _fiber_cap(phi.base, phi.fiber_dims)
        T = twisted_tensor(phi)
    report.update(_complex_report(T.complex))
    report["fiber_dims"] = list(T.fiber_dims)
    report["quotients_iso"] = [filtration_quotient(T, n).iso_check
                               for n in range(len(T.fiber_dims))]
    return report


def _sdr_or_complex(path: str) -> SDRData:
    data = _load(path, "--base")
    if isinstance(data, dict) and {"j", "r", "h"} <= set(data):
        s = sdr_from_json(data)
        v = verify_sdr(s)
        if not v:
            raise DomainFailure({"error": f"input SDR fails {v.message}"})
        return s
    return homology_sdr(complex_from_json(data))


def cmd_bpl(args) -> dict:
    pdata = _load(args.perturbation, "--perturbation")
    if args.fiber is not None:
        base = _base(args.base)
        fiber = complex_from_json(_load(args.fiber, "--fiber"))
        _cap(normalized_chains(base).total_dim() * fiber.total_dim(), "base (x) fiber")
        big = tensor_product(normalized_chains(base), fiber)
        ctx = transfer(base, fiber, perturbation_from_json(pdata, big))
        return {
            "command": "bpl",
            "mode": "transfer",
            "sdr_ok": bool(verify_sdr(ctx.bpl.sdr)),
            "nilpotency_index": ctx.bpl.nilpotency_index,
            "twisting": twisting_to_json(ctx.cochain, base.name),
            **_complex_report(ctx.twisted.complex),
            "_sdr": ctx.bpl.sdr,
        }
    sdr = _sdr_or_complex(args.base)
    _cap(sdr.big.total_dim(), "big complex")
    res = basic_perturbation(Perturbation(sdr, perturbation_from_json(pdata, sdr.big)))
    return {
        "command": "bpl",
        "mode": "sdr",
        "sdr_ok": bool(verify_sdr(res.sdr)),
        "nilpotency_index": res.nilpotency_index,
        "d_inf": {str(n): matrix_to_json(m) for n, m in sorted(res.d_inf.items())},
        **_complex_report(res.sdr.small),
        "_sdr": res.sdr,
    }


def cmd_unipotent(args) -> dict:
    rho = rep_from_json(_load(args.rep, "--rep"),
                        base=_base(args.base) if args.base else None, relative_to=args.rep)
    v = verify_rep(rho)
    if not v:
        raise DomainFailure({"error": v.message, "simplex": v.where})
    res = is_unipotent(rho)
    out = {"command": "unipotent", "unipotent": res.unipotent}
    if res.unipotent:
        out["filtration_lengths"] = list(res.filtration.lengths())
    else:
        out["witness_dim"] = len(res.witness)
        out["witness"] = [[format_rational(x) for x in w] for w in res.witness]
    return out


def cmd_torsion(args) -> dict:
    bc = based_from_json(_load(args.base, "--base"))
    _cap(bc.complex.total_dim(), "input complex")
    return {"command": "torsion", "torsion": format_rational(torsion(bc))}


def _check(name: str, verdict) -> dict:
    entry = {"check": name, "ok": bool(verdict)}
    msg = getattr(verdict, "message", None)
    if msg and not verdict:
        entry["message"] = msg
    return entry


def cmd_verify(args) -> dict:
    checks: List[dict] = []
    base = None
    if args.base is not None:
        data = _load(args.base, "--base")
        if isinstance(data, str) or "simplices" in data:
            base = resolve_base(data, relative_to=args.base)
            checks.append(_check("simplicial identities", base.verify_identities()))
            checks.append(_check("chains d^2 = 0", verify_complex(normalized_chains(base))))
        elif {"j", "r", "h"} <= set(data):
            s = sdr_from_json(data)
            checks.append(_check("big d^2 = 0", verify_complex(s.big)))
            checks.append(_check("small d^2 = 0", verify_complex(s.small)))
            checks.append(_check("SDR axioms", verify_sdr(s)))
        else:
            checks.append(_check("d^2 = 0", verify_complex(complex_from_json(data))))
    if args.rep is not None:
        rho = rep_from_json(_load(args.rep, "--rep"), base=base, relative_to=args.rep)
        checks.append(_check("representation relations", verify_rep(rho)))
        _, v = degree_one_cochain(rho)
        checks.append(_check("degree-one cochain twisting identity", v))
    if args.twist is not None:
        phi = _twist_cochain(args, base=base)
        v = verify_twisting(phi)
        checks.append(_check("twisting identity", v))
        if v:
            T = twisted_tensor(phi)
            checks.append(_check("twisted d^2 = 0", verify_complex(T.complex)))
            for n in range(len(phi.fiber_dims)):
                checks.append({"check": f"filtration quotient {n} is the local-coefficient complex",
                               "ok": bool(filtration_quotient(T, n).iso_check)})
    if not checks:
        raise FormatError("verify needs at least one of --base, --rep, --twist")
    report = {"command": "verify", "checks": checks, "ok": all(c["ok"] for c in checks)}
    if not report["ok"]:
        raise DomainFailure(report)
    return report


def cmd_examples(args) -> dict:
    names = None if args.all or not args.names else args.names
    results = run_gallery(names)
    report = {"command": "examples", "entries": results,
              "ok": all(r["pass"] for r in results.values())}
    if not report["ok"]:
        raise DomainFailure(report)
    return report


COMMANDS = {
    "homology": cmd_homology,
    "twisted": cmd_twisted,
    "bpl": cmd_bpl,
    "unipotent": cmd_unipotent,
    "torsion": cmd_torsion,
    "verify": cmd_verify,
    "examples": cmd_examples,
}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="twisted-chains",
                                description="Exact twisted tensor products, perturbation and torsion.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, *flags):
        for flag in flags:
            sp.add_argument(f"--{flag}")
        sp.add_argument("--out", help="also write the JSON report (or SDR for bpl) here")
        sp.add_argument("--json", action="store_true", help="print the full JSON report")

    common(sub.add_parser("homology", help="betti numbers of a complex or simplicial set"), "base")
    common(sub.add_parser("twisted", help="twisted tensor product from a representation or cochain"),
           "base", "rep", "twist")
    common(sub.add_parser("bpl", help="basic perturbation lemma / transfer to fiber homology"),
           "base", "fiber", "perturbation")
    common(sub.add_parser("unipotent", help="decide unipotency of a monodromy representation"),
           "base", "rep")
    common(sub.add_parser("torsion", help="absolute torsion of a based acyclic complex"), "base")
    common(sub.add_parser("verify", help="run every applicable invariant check"),
           "base", "rep", "twist")
    ex = sub.add_parser("examples", help="run the built-in golden gallery")
    ex.add_argument("names", nargs="*", help=f"entries among {gallery_names()}")
    ex.add_argument("--all", action="store_true")
    ex.add_argument("--out")
    ex.add_argument("--json", action="store_true")
    return p


def _summary(report: dict) -> str:
    cmd = report.get("command")
    if cmd == "examples":
        return "\n".join(f"{'PASS' if r['pass'] else 'FAIL'} {n}: {json.dumps(r['result'], sort_keys=True)}"
                         for n, r in report["entries"].items())
    if cmd == "verify":
        return "\n".join(f"{'ok  ' if c['ok'] else 'FAIL'} {c['check']}" for c in report["checks"])
    keys = [k for k in ("betti", "euler", "torsion", "unipotent", "witness_dim",
                        "filtration_lengths", "sdr_ok", "quotients_iso") if k in report]
    return "  ".join(f"{k}={json.dumps(report[k])}" for k in keys)


def run(argv: Optional[List[str]] = None, stdout=None) -> int:
    stdout = stdout or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return 2 if e.code else 0
    code = 0
    try:
        report = COMMANDS[args.command](args)
    except DomainFailure as e:
        report, code = dict(e.report), 1
        report.setdefault("command", args.command)
    except (FormatError, OSError, json.JSONDecodeError, KeyError) as e:
        print(dumps({"command": args.command, "error": str(e), "kind": "input"}), end="",
              file=sys.stderr)
        return 2
    except (ChainError, TwistingError, PerturbationError, TorsionError, SimplicialError,
            ValueError) as e:
        report, code = {"command": args.command, "error": str(e)}, 1
        where = getattr(e, "where", None) or getattr(e, "degree", None)
        if where is not None:
            report["where"] = where

    sdr = report.pop("_sdr", None)
    if args.out:
        payload = sdr_to_json(sdr) if sdr is not None else report
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(dumps(payload))
    if args.json or code:
        stdout.write(dumps(report))
    else:
        stdout.write(_summary(report) + "\n")
    return code


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
