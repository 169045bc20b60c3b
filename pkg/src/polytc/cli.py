"""Command-line interface.

Exit codes: 0 success, 1 a check or certificate failed, 2 usage or domain error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence

from . import __version__
from .certify import (
    DEFAULT_SEED,
    EXHAUSTIVE_MAX_N,
    Strategy,
    central_binomial_even,
    certify_lower,
    check_vanishing,
    experimental_unmodified_pairing,
    tc_bounds,
    verify_certificate,
    zdcl,
)
from .errors import BudgetExceeded, DomainError
from .oracle import MAX_N as ORACLE_MAX_N
from .oracle import cross_check
from .parity import Case, decompose, normalize_length, valid_pairs, verify_bclem, verify_techlem
from .pointwise import MAX_N as POINTWISE_MAX_N
from .ring import CohomologyRing, FunctionalKind

log = logging.getLogger("polytc")

CSV_COLUMNS = ["n", "k", "t", "k0", "B", "D", "C", "case", "zdcl", "tc_lower", "tc_upper", "evaluation"]
DIMS_MAX_N = 14


def dump_json(obj) -> str:
    return json.dumps(obj, indent=2) + "\n"


def render_table(rows: List[Dict], columns: Sequence[str]) -> str:
    cells = [[str(r.get(c, "")) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    lines = ["  ".join(c.rjust(w) for c, w in zip(columns, widths))]
    lines += ["  ".join(v.rjust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(lines) + "\n"


def render_csv(rows: List[Dict], columns: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), extrasaction="ignore", lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()


# report ----------------------------------------------------------------------


def build_report(n: int, k: int, dims_max: int = DIMS_MAX_N) -> Dict:
    p = decompose(n, k)
    cert = certify_lower(n, k)
    tc = tc_bounds(n, k, cert) if cert.passed else None
    dims = CohomologyRing(n, k).graded_dims() if n <= dims_max else None
    return {
        "n": n,
        "k": k,
        "params": p.to_dict(),
        "case": p.case.value,
        "graded_dims": dims,
        "evaluation": cert.evaluation,
        "zdcl_lower": cert.zdcl_lower,
        "tc_lower": cert.tc_lower,
        "tc_upper": cert.tc_upper,
        "certificate_id": tc.basis if tc else None,
        "certificate": cert.to_json(),
    }


def format_report(rep: Dict, fmt: str) -> str:
    if fmt == "json":
        return dump_json(rep)
    p = rep["params"]
    row = dict(p, zdcl=rep["zdcl_lower"], tc_lower=rep["tc_lower"], tc_upper=rep["tc_upper"],
               evaluation=rep["evaluation"])
    if fmt == "csv":
        return render_csv([row], CSV_COLUMNS)
    cert = rep["certificate"]
    factors = " * ".join(
        f"(V{i}⊗1+1⊗V{i})^{e}" if g == "V" else f"(R⊗1+1⊗R)^{e}" for g, i, e in cert["factors"]
    )
    lines = [
        f"M̄_{{{rep['n']},{rep['n'] - 2 * rep['k']}}}   (n = {rep['n']}, k = {rep['k']})",
        "decomposition  " + ", ".join(f"{key}={p[key]}" for key in ("t", "k0", "B", "D", "C")),
        f"case           {rep['case']}"
        + (f"  (ell={p['ell']}, A={p['A']}, gamma={p['gamma']}, m={p['m']})" if p["m"] is not None else ""),
    ]
    if rep["graded_dims"] is not None:
        lines.append(f"graded dims    {rep['graded_dims']}")
    lines += [
        f"witness        {factors}",
        f"functionals    {' ⊗ '.join(cert['functionals'])}",
        f"evaluation     {rep['evaluation']}" + ("" if rep["evaluation"] == 1 else "   FAILED"),
        f"zdcl >=        {rep['zdcl_lower']}",
        f"TC in          [{rep['tc_lower']}, {rep['tc_upper']}]",
        f"certificate    {rep['certificate_id']}",
    ]
    if "experimental_phi1_phi2" in rep:
        lines.append(f"φ1⊗φ2 (exp.)   {rep['experimental_phi1_phi2']}")
    return "\n".join(lines) + "\n"


def cmd_report(args) -> int:
    if args.r is not None:
        k = normalize_length(args.n, args.r)
    elif args.k is not None:
        k = args.k
    else:
        raise DomainError("OUT_OF_RANGE", "report needs --k or --r")
    rep = build_report(args.n, k, args.dims_max)
    if args.experimental_phi2:
        rep["experimental_phi1_phi2"] = (
            experimental_unmodified_pairing(args.n, k) if rep["case"] == Case.B_EVEN_D_ZERO.value else None
        )
    sys.stdout.write(format_report(rep, args.format))
    return 0 if rep["evaluation"] == 1 else 1


# sweep -----------------------------------------------------------------------


def sweep_row(n: int, k: int, samples: int, seed: int) -> Dict:
    p = decompose(n, k)
    if n <= POINTWISE_MAX_N:
        res = zdcl(n, k, samples=samples, seed=seed)
        cert, value, van = res.certificate, res.value, res.vanishing.strategy.value
    else:
        cert = certify_lower(n, k)
        value, van = cert.zdcl_lower, "not checked"
    return dict(
        p.to_dict(),
        zdcl=value,
        tc_lower=cert.tc_lower,
        tc_upper=cert.tc_upper,
        evaluation=cert.evaluation,
        vanishing=van,
    )


def _sweep_task(args):
    return sweep_row(*args)


def cmd_sweep(args) -> int:
    tasks = [(n, k, args.samples, args.seed) for n, k in valid_pairs(args.n_max)]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_task, tasks))
    else:
        rows = [_sweep_task(t) for t in tasks]
    if args.format == "json":
        sys.stdout.write(dump_json(rows))
    elif args.format == "csv":
        sys.stdout.write(render_csv(rows, CSV_COLUMNS))
    else:
        sys.stdout.write(render_table(rows, CSV_COLUMNS + ["vanishing"]))
    ok = all(r["evaluation"] == 1 for r in rows)
    return 0 if ok else 1


# verify ----------------------------------------------------------------------


def suite_functionals(n_max: int, **_) -> List[Dict]:
    out = []
    for n, k in valid_pairs(n_max):
        ring = CohomologyRing(n, k)
        kinds = [FunctionalKind.PHI1, FunctionalKind.PHI2]
        if ring.params.case is Case.B_EVEN_D_ZERO:
            kinds.append(FunctionalKind.PHI3)
        for kind in kinds:
            out.append({"check": f"functional {kind.value} n={n} k={k}", "passed": ring.check_functional(kind)})
    return out


def suite_lemmas(n_max: int, **_) -> List[Dict]:
    tl = verify_techlem(n_max)
    bc = verify_bclem(4, 16)
    return [
        {"check": f"techlem n<={n_max} ({tl.cases} cases)", "passed": tl.passed, "detail": tl.counterexample},
        {"check": f"bclem t<=4 B<=16 ({bc.cases} cases)", "passed": bc.passed, "detail": bc.counterexample},
        {"check": f"C(2n-6, n-3) even for 6<=n<={max(n_max, 6)}", "passed": central_binomial_even(max(n_max, 6))},
    ]


def suite_oracle(n_max: int, seed: int, force: bool = False, **_) -> List[Dict]:
    if n_max > ORACLE_MAX_N and not force:
        raise BudgetExceeded(f"oracle suite is limited to n <= {ORACLE_MAX_N}; use --force")
    out = []
    for n, k in valid_pairs(n_max):
        rep = cross_check(n, k, trials=100, seed=seed, force=force)
        out.append({"check": f"oracle n={n} k={k} dims={rep.dims_oracle}", "passed": rep.passed,
                    "detail": rep.problems or None})
    return out


def suite_vanishing(n_max: int, samples: int, seed: int, force: bool = False, **_) -> List[Dict]:
    if n_max > POINTWISE_MAX_N and not force:
        raise BudgetExceeded(f"random vanishing suite is limited to n <= {POINTWISE_MAX_N}; use --force")
    out = []
    for n, k in valid_pairs(min(n_max, EXHAUSTIVE_MAX_N)):
        rep = check_vanishing(n, k, Strategy.EXHAUSTIVE_MONOMIAL)
        out.append({"check": f"vanishing exhaustive n={n} k={k} ({rep.sample_count} products)",
                    "passed": rep.all_vanished, "detail": rep.counterexample})
    for n, k in valid_pairs(n_max):
        rep = check_vanishing(n, k, Strategy.RANDOM, samples=samples, seed=seed, force=force)
        out.append({"check": f"vanishing random n={n} k={k} ({rep.sample_count} samples, seed {seed})",
                    "passed": rep.all_vanished, "detail": rep.counterexample})
    return out


def suite_certificates(n_max: int, **_) -> List[Dict]:
    out = []
    for n, k in valid_pairs(n_max):
        cert = certify_lower(n, k)
        out.append({"check": f"witness n={n} k={k} {cert.params.case.value}", "passed": cert.passed})
    return out


SUITES: Dict[str, Callable[..., List[Dict]]] = {
    "functionals": suite_functionals,
    "lemmas": suite_lemmas,
    "oracle": suite_oracle,
    "vanishing": suite_vanishing,
    "certificates": suite_certificates,
}
SUITE_DEFAULT_N = {"functionals": 20, "lemmas": 64, "oracle": 9, "vanishing": 12, "certificates": 28}


def cmd_verify(args) -> int:
    names = list(SUITES) if args.suite == "all" else [args.suite]
    results = []
    for name in names:
        n_max = args.n_max if args.n_max is not None else SUITE_DEFAULT_N[name]
        for r in SUITES[name](n_max=n_max, samples=args.samples, seed=args.seed, force=args.force):
            results.append(dict(r, suite=name))
    if args.format == "json":
        sys.stdout.write(dump_json(results))
    else:
        for r in results:
            sys.stdout.write(f"{'PASS' if r['passed'] else 'FAIL'}  [{r['suite']}] {r['check']}\n")
            if not r["passed"] and r.get("detail"):
                sys.stdout.write(f"      {r['detail']}\n")
        failed = sum(not r["passed"] for r in results)
        sys.stdout.write(f"{len(results) - failed}/{len(results)} checks passed\n")
    return 0 if all(r["passed"] for r in results) else 1


# zdcl / certificates -----------------------------------------------------------


def cmd_zdcl(args) -> int:
    res = zdcl(args.n, args.k, samples=args.samples, seed=args.seed, force=args.force)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    cert_path = out / f"certificate_n{args.n}_k{args.k}.json"
    van_path = out / f"vanishing_n{args.n}_k{args.k}.json"
    cert_path.write_text(res.certificate.dumps())
    van_path.write_text(dump_json(res.vanishing.to_json()))
    print(res.value)
    print(f"certificate: {cert_path}")
    print(f"vanishing report: {van_path}")
    if res.defect:
        print("DEFECT: lower-bound witness or vanishing check failed", file=sys.stderr)
        return 1
    return 0


def cmd_certificate(args) -> int:
    if args.action == "emit":
        cert = certify_lower(args.n, args.k)
        text = cert.dumps()
        if args.output:
            Path(args.output).write_text(text)
        else:
            sys.stdout.write(text)
        return 0 if cert.passed else 1
    try:
        obj = json.loads(Path(args.file).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        print(f"cannot read certificate {args.file}: {exc}", file=sys.stderr)
        return 2
    check = verify_certificate(obj)
    if check.ok:
        print(f"OK  n={obj['n']} k={obj['k']} evaluation={obj['evaluation']}")
        return 0
    for p in check.problems:
        print(f"MISMATCH  {p}")
    return 1


# parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="polytc",
        description="Mod-2 cohomology of planar polygon spaces and TC lower-bound certificates.",
    )
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("report", help="decomposition, dimensions, certificate and TC bounds for one space")
    p.add_argument("--n", type=int, required=True)
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--k", type=int)
    g.add_argument("--r", type=str, help="side length; decimal strings are compared exactly")
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p.add_argument("--dims-max", type=int, default=DIMS_MAX_N, help="largest n for graded dimensions")
    p.add_argument("--experimental-phi2", action="store_true",
                   help="also evaluate the unmodified φ1⊗φ2 pairing when B is even and D = 0")
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("sweep", help="one row per valid (n, k) up to --n-max")
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--format", choices=["table", "json", "csv"], default="table")
    p.add_argument("--samples", type=int, default=100, help="random vanishing samples for n <= 13")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="run a verification suite")
    p.add_argument("--suite", choices=list(SUITES) + ["all"], default="all")
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--force", action="store_true", help="run past the brute-force size guards")
    p.add_argument("--format", choices=["table", "json"], default="table")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("zdcl", help="zero-divisor cup-length with certificate and vanishing report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--force", action="store_true")
    p.add_argument("--out-dir", default=".")
    p.set_defaults(func=cmd_zdcl)

    p = sub.add_parser("certificate", help="emit or replay certificate files")
    csub = p.add_subparsers(dest="action", required=True)
    v = csub.add_parser("verify", help="replay a certificate file")
    v.add_argument("file")
    e = csub.add_parser("emit", help="write the certificate for (n, k)")
    e.add_argument("--n", type=int, required=True)
    e.add_argument("--k", type=int, required=True)
    e.add_argument("-o", "--output")
    p.set_defaults(func=cmd_certificate)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (DomainError, BudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
