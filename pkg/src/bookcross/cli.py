"""Command-line front end.

Every machine-readable output embeds the configuration that produced it.
Progress messages go to stderr through ``logging``.

Exit codes: 0 success, 2 bad input, 3 budget exhausted before a proof,
4 invalid certificate.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from contextlib import nullcontext
from pathlib import Path

EXIT_OK, EXIT_BAD_INPUT, EXIT_TIMEOUT, EXIT_INVALID = 0, 2, 3, 4

log = logging.getLogger("bookcross")


class BadInput(Exception):
    pass


def _config(args) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "quiet")}


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _csv(rows, header, config) -> str:
    buf = io.StringIO()
    buf.write(f"# config: {json.dumps(config)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _single(values, name: str) -> int:
    if not values or len(values) != 1:
        raise BadInput(f"--{name} takes exactly one value here")
    return values[0]


# -- commands ------------------------------------------------------------------------

def cmd_table1(args) -> int:
    from .bounds import Table1Row, table1_text
    from .maxcut import nu2_complete_exact

    rows = []
    for n in args.n or [5, 7, 9, 11]:
        log.info("table1: solving n=%d", n)
        res = nu2_complete_exact(n, max_nodes=args.budget_nodes,
                                 max_seconds=args.budget_seconds, seed=args.seed)
        rows.append(Table1Row.from_result(res))
    cfg = _config(args)
    if args.format == "json":
        out = json.dumps({"config": cfg, "rows": [r.__dict__ for r in rows]}, indent=2) + "\n"
    elif args.format == "csv":
        out = _csv([[r.n, r.maxcut, r.c4, r.nu2, r.zeta, r.nodes, r.status] for r in rows],
                   ["n", "maxcut", "C(n,4)", "nu2", "Z(n)", "nodes", "status"], cfg)
    else:
        out = f"# config: {json.dumps(cfg)}\n{table1_text(rows)}\n"
    _emit(args, out)
    return EXIT_TIMEOUT if any(r.status != "exact" for r in rows) else EXIT_OK


def cmd_maxcut(args) -> int:
    from .circle_graph import build_chord_graph
    from .maxcut import maxcut_exact

    results = []
    for n in args.n or []:
        res = maxcut_exact(build_chord_graph(n), max_nodes=args.budget_nodes,
                           max_seconds=args.budget_seconds, seed=args.seed)
        results.append({"n": n, **res.to_dict()})
    if not results:
        raise BadInput("maxcut needs --n")
    _emit(args, json.dumps({"config": _config(args), "results": results}, indent=2) + "\n")
    return EXIT_TIMEOUT if any(r["proof_status"] != "exact" for r in results) else EXIT_OK


def cmd_gw(args) -> int:
    from .certificates import dump, gw_to_dict
    from .gw import build_reduced, gw_reduced_solve, verify_gw_certificate

    n = _single(args.n, "n")
    cert = gw_reduced_solve(build_reduced(n), accuracy=args.accuracy)
    res = verify_gw_certificate(cert)
    payload = gw_to_dict(cert, _config(args))
    if args.cert:
        dump(payload, args.cert)
    summary = {"config": _config(args), "n": n, "gw_upper": float(res.gw_upper),
               "nu2_lower": res.nu2_lower, "converged": cert.converged,
               "certificate": args.cert}
    _emit(args, json.dumps(summary if args.cert else {**summary, "certificate": payload},
                           indent=2) + "\n")
    return EXIT_OK


def cmd_zar(args) -> int:
    from .bipartite import build_q_matrix, build_type_table, sdp_bound_solve, verify_zar_certificate
    from .bounds import genbound
    from .certificates import dump, zar_to_dict

    m = args.m
    q = build_q_matrix(build_type_table(m))
    cert = sdp_bound_solve(q, accuracy=args.accuracy)
    res = verify_zar_certificate(cert, q)
    if not res.valid:  # safe rounding should make this unreachable
        log.error("solver output failed verification: %s", res.reason)
        return EXIT_INVALID
    payload = zar_to_dict(cert, _config(args))
    if args.cert:
        dump(payload, args.cert)
    summary = {"config": _config(args), "m": m, "certified_t": float(res.certified_t),
               "bound": str(genbound(m, res.certified_t)), "converged": cert.converged,
               "certificate": args.cert}
    _emit(args, json.dumps(summary, indent=2) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    from .certificates import check_file

    if not Path(args.path).is_file():
        raise BadInput(f"no such file: {args.path}")
    res = check_file(args.path)
    out = {"config": _config(args), "valid": res.valid, "kind": res.kind,
           "reason": res.reason, **res.summary}
    _emit(args, json.dumps(out, indent=2) + "\n")
    return EXIT_OK if res.valid else EXIT_INVALID


def cmd_ratio_curve(args) -> int:
    from .bounds import implied_gw_bound
    from .circle_graph import build_chord_graph, zeta_complete
    from .gw import build_reduced, gw_full, gw_reduced_solve, verify_gw_certificate

    rows = []
    for n in args.n or list(range(5, 32, 2)):
        if n < 5:
            raise BadInput("ratio-curve needs n >= 5")
        if n % 2:
            res = verify_gw_certificate(gw_reduced_solve(build_reduced(n), accuracy=args.accuracy))
            bound = res.nu2_lower
        else:
            bound = implied_gw_bound(n, gw_full(build_chord_graph(n), max_vertices=10**4))
        z = zeta_complete(n)
        rows.append([n, bound, z, f"{bound / z:.6f}"])
        log.info("ratio-curve: n=%d bound=%d", n, bound)
    _emit(args, _csv(rows, ["n", "bound", "Z(n)", "ratio"], _config(args)))
    return EXIT_OK


def cmd_draw(args) -> int:
    from .pagecount import count_crossings, zarankiewicz_drawing

    n = _single(args.n, "n")
    if args.m is not None:
        d, label = zarankiewicz_drawing(args.m, n), f"K_{args.m},{n}"
    else:
        from .maxcut import nu2_complete_exact

        res = nu2_complete_exact(n, max_nodes=args.budget_nodes,
                                 max_seconds=args.budget_seconds, seed=args.seed)
        d, label = res.drawing, f"K_{n}"
    out = {"config": _config(args), "graph": label, "crossings": count_crossings(d),
           **json.loads(d.to_json())}
    _emit(args, json.dumps(out) + "\n")
    return EXIT_OK


def cmd_qmatrix(args) -> int:
    from .bipartite import build_q_matrix, build_type_table

    q = build_q_matrix(build_type_table(args.m))
    _emit(args, f"# config: {json.dumps(_config(args))}\n" + q.to_csv())
    return EXIT_OK


# -- parser --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, nargs="+", help="vertex counts")
    common.add_argument("--m", type=int, help="blue side size for K_{m,n} commands")
    common.add_argument("--budget-seconds", type=float, default=None,
                        help="wall-clock limit per exact solve (default: none)")
    common.add_argument("--budget-nodes", type=int, default=None,
                        help="branch-and-bound node limit per solve (default: none)")
    common.add_argument("--accuracy", type=float, default=1e-8,
                        help="target relative accuracy of SDP solves (default: 1e-8)")
    common.add_argument("--out", help="write the report here instead of stdout")
    common.add_argument("--format", choices=("json", "csv", "text"), default="text",
                        help="report format for table1 (default: text)")
    common.add_argument("--threads", type=int, default=None,
                        help="cap BLAS/LAPACK threads (default: library choice)")
    common.add_argument("--seed", type=int, default=0, help="RNG seed (default: 0)")
    common.add_argument("--quiet", action="store_true", help="suppress progress on stderr")

    p = argparse.ArgumentParser(prog="bookcross",
                                description="2-page crossing numbers: exact values, certified bounds")
    sub = p.add_subparsers(dest="command", required=True)
    specs = [
        ("table1", cmd_table1, "exact nu2(K_n) through maximum cuts of chord graphs"),
        ("maxcut", cmd_maxcut, "exact maximum cut of G_n with witness"),
        ("gw", cmd_gw, "symmetry-reduced GW certificate for odd n"),
        ("zar", cmd_zar, "certified SDP bound for K_{m,n}"),
        ("verify", cmd_verify, "re-verify a certificate file"),
        ("ratio-curve", cmd_ratio_curve, "CSV of GW-implied bound over Z(n)"),
        ("draw", cmd_draw, "drawing JSON for K_n (optimal) or K_{m,n} (Zarankiewicz)"),
        ("qmatrix", cmd_qmatrix, "Q matrix as CSV"),
    ]
    for name, func, help_ in specs:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.set_defaults(func=func)
        if name in ("gw", "zar"):
            sp.add_argument("--cert", help="also write the certificate JSON here")
        if name == "verify":
            sp.add_argument("path", help="certificate file")
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING if args.quiet else logging.INFO,
                        format="%(asctime)s %(levelname)s %(message)s", stream=sys.stderr)
    if args.command in ("zar", "qmatrix") and args.m is None:
        parser.error(f"{args.command} needs --m")
    for v in (args.n or []):
        if v < 1:
            parser.error("--n values must be positive")
    try:
        ctx = nullcontext()
        if args.threads:
            from threadpoolctl import threadpool_limits

            ctx = threadpool_limits(limits=args.threads)
        with ctx:
            return args.func(args)
    except (BadInput, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
