"""Command-line interface.

Stateless computations (convert/tabulate/generate/verify/trees/explain) run
in-process against the core package. Audit session commands are a thin
client over the HTTP API: with --url they talk to a running service,
otherwise the app is mounted in-process over the same state directory, so
both paths exercise identical request handling.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction
from pathlib import Path

from . import assertions as amod
from . import ballots, generation, verification
from .tabulation import format_rounds, tabulate

DEFAULT_STATE_DIR = "./audit-state"


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _client(args):
    import httpx

    if getattr(args, "url", None):
        return httpx.Client(base_url=args.url.rstrip("/"), timeout=60.0)
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DeprecationWarning)
        from fastapi.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(Path(args.state_dir)))


def _fail_from_response(response) -> None:
    try:
        detail = response.json().get("detail")
    except Exception:
        detail = response.text
    if isinstance(detail, dict):
        message = detail.get("message", "request failed")
        unpruned = detail.get("unpruned") or []
        lines = [message] + [f"  unpruned: {p}" for p in unpruned[:20]]
        detail = "\n".join(lines)
    raise SystemExit(f"error ({response.status_code}): {detail}")


def _expect(response, codes=(200, 201)):
    if response.status_code not in codes:
        _fail_from_response(response)
    return response


# -- stateless commands -----------------------------------------------------


def cmd_convert(args) -> int:
    contest, records = ballots.parse_cvr_file(args.input, format="raire-legacy")
    if args.winner is not None:
        if args.winner not in contest.roster:
            raise SystemExit(f"winner {args.winner} not in roster")
        contest.reported_winner = args.winner
    if args.cards is not None:
        contest.card_upper_bound = args.cards
    ballots.write_canonical(contest, records, args.output)
    print(f"wrote {len(records)} records for contest {contest.contest_id!r} to {args.output}")
    return 0


def cmd_tabulate(args) -> int:
    contest, records = ballots.parse_cvr_file(args.cvrs)
    result = tabulate(contest, records, tie_policy=args.tie_policy)
    print(format_rounds(contest, result))
    if contest.reported_winner is not None:
        if result.winner == contest.reported_winner:
            print("reported winner matches the records")
        else:
            print(f"MISMATCH: records elect {contest.label(result.winner)}, "
                  f"reported winner is {contest.label(contest.reported_winner)}")
            return 1
    return 0


def cmd_generate(args) -> int:
    contest, records = ballots.parse_cvr_file(args.cvrs)
    risk_limit = Fraction(args.risk_limit)
    difficulty_fn = (generation.inverse_margin_scorer
                     if args.difficulty == "inverse-margin" else None)
    try:
        aset = generation.generate_assertions(
            contest, records, difficulty_fn,
            risk_limit=risk_limit, mode=args.mode, node_budget=args.node_budget,
        )
    except generation.UncertifiableError as exc:
        raise SystemExit(f"uncertifiable: {exc}")
    except generation.OutcomeMismatchError as exc:
        raise SystemExit(f"refusing to certify: {exc}")
    text = amod.write_assertion_text(aset)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    worst = max((sa.difficulty for sa in aset.assertions), default=math.inf)
    print(f"# {len(aset)} assertions; hardest zero-error estimate "
          f"{'unbounded' if math.isinf(worst) else int(worst)} draws "
          f"({args.mode}, risk limit {args.risk_limit})", file=sys.stderr)
    for idx, sa in enumerate(aset.assertions):
        est = "inf" if math.isinf(sa.difficulty) else f"{sa.difficulty:g}"
        print(f"#   [{idx}] margin {sa.margin}  est {est}  {sa.assertion.explanation()}",
              file=sys.stderr)
    return 0


def cmd_verify(args) -> int:
    contest, _records = ballots.parse_cvr_file(args.cvrs)
    aset = amod.parse_assertion_text(_read(args.assertions))
    result = verification.verify_assertion_set(contest, aset,
                                               max_factorial=args.max_factorial)
    if result.certified:
        print(f"certified: all alternative elimination orders pruned "
              f"({result.nodes_checked} suffixes checked)")
        return 0
    print(f"NOT certified: {len(result.failures)} elimination orders survive")
    for order in result.failures[:20]:
        print("  unpruned: " + " <- ".join(map(str, order)))
    return 1


def cmd_trees(args) -> int:
    contest, _records = ballots.parse_cvr_file(args.cvrs)
    aset = amod.parse_assertion_text(_read(args.assertions))
    result = verification.verify_assertion_set(contest, aset,
                                               max_factorial=args.max_factorial)
    doc = (verification.export_dot(contest, aset, result) if args.format == "dot"
           else verification.export_treedoc(contest, aset, result))
    if args.output:
        Path(args.output).write_text(doc, encoding="utf-8")
    else:
        sys.stdout.write(doc)
    return 0


def cmd_explain(args) -> int:
    aset = amod.parse_assertion_text(_read(args.assertions))
    sys.stdout.write(amod.explanation_report(aset))
    return 0


# -- audit session commands (thin HTTP client) -------------------------------


def _print_status(payload: dict, verbose: bool = True) -> None:
    print(f"audit {payload['audit_id']}  contest {payload['contest_id']}  "
          f"status: {payload['status']}")
    print(f"  mode {payload['mode']}  risk limit {payload['risk_limit']}  "
          f"seed {payload['seed']}")
    print(f"  draws {len(payload['draws'])}  entered prefix {payload['filled_prefix']}  "
          f"frame {payload['total_cards']} cards")
    if payload.get("suggested_next_draw") is not None and payload["status"] == "in_progress":
        print(f"  suggested additional draws: {int(payload['suggested_next_draw'])}")
    if verbose:
        for a in payload["assertions"]:
            flag = "CONFIRMED" if a["confirmed"] else f"p={a['p_value']:.5g}"
            print(f"  [{a['index']:>2}] {flag:<12} {a['explanation']}")
        pending = [d for d in payload["draws"] if d["status"] == "pending"]
        if pending:
            print(f"  pending ballots ({len(pending)}):")
            for d in pending[:15]:
                where = (f" @ {d['container']} #{d['container_offset']}"
                         if d.get("container") else "")
                print(f"    #{d['draw_index']} {d['ballot_id']}{where}")
            if len(pending) > 15:
                print(f"    ... and {len(pending) - 15} more")


def cmd_audit_init(args) -> int:
    body = {
        "cvr_file": _read(args.cvrs),
        "assertion_file": _read(args.assertions),
        "manifest_file": _read(args.manifest) if args.manifest else None,
        "risk_limit": args.risk_limit,
        "mode": args.mode,
        "seed": args.seed,
        "error_rate_guess": args.error_rate_guess,
        "initial_draw": args.initial_draw,
    }
    with _client(args) as client:
        payload = _expect(client.post("/audits", json=body)).json()
    _print_status(payload)
    return 0


def cmd_audit_draw(args) -> int:
    with _client(args) as client:
        payload = _expect(client.post(f"/audits/{args.audit_id}/draws",
                                      json={"count": args.count})).json()
    _print_status(payload)
    return 0


def cmd_audit_enter(args) -> int:
    if args.not_found:
        body = {"ballot_id": args.ballot_id, "not_found": True}
    elif args.blank:
        body = {"ballot_id": args.ballot_id, "ranking": []}
    else:
        if not args.ranks:
            raise SystemExit("pass --ranks, --blank or --not-found")
        ranking = [int(tok) for tok in args.ranks.split(",") if tok.strip() != ""]
        body = {"ballot_id": args.ballot_id, "ranking": ranking}
    with _client(args) as client:
        payload = _expect(client.post(f"/audits/{args.audit_id}/mvr", json=body)).json()
    _print_status(payload, verbose=args.verbose)
    return 0


def cmd_audit_status(args) -> int:
    with _client(args) as client:
        response = _expect(client.get(f"/audits/{args.audit_id}"))
    if args.json:
        print(json.dumps(response.json(), indent=2))
    else:
        _print_status(response.json())
    return 0


def cmd_audit_trees(args) -> int:
    with _client(args) as client:
        response = _expect(client.get(f"/audits/{args.audit_id}/trees",
                                      params={"format": args.format}))
    sys.stdout.write(response.text)
    return 0


def cmd_audit_report(args) -> int:
    with _client(args) as client:
        response = _expect(client.get(f"/audits/{args.audit_id}/report"))
    if args.output:
        Path(args.output).write_text(response.text, encoding="utf-8")
        print(f"wrote report to {args.output}")
    else:
        sys.stdout.write(response.text)
    return 0


def cmd_audit_escalate(args) -> int:
    with _client(args) as client:
        payload = _expect(client.post(f"/audits/{args.audit_id}/escalate")).json()
    _print_status(payload, verbose=False)
    return 0


def cmd_audit_list(args) -> int:
    with _client(args) as client:
        payload = _expect(client.get("/audits")).json()
    for entry in payload["audits"]:
        print(f"{entry['audit_id']}  {entry['contest_id']}  {entry['status']}")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    app = create_app(Path(args.state_dir), ui_dir=args.ui_dir)
    uvicorn.run(app, host=args.host, port=args.port, log_level="info")
    return 0


# -- parser -------------------------------------------------------------------


def _add_client_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--url", help="base URL of a running service; default runs in-process")
    parser.add_argument("--state-dir", default=DEFAULT_STATE_DIR,
                        help="session directory for in-process mode")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="irvaudit",
                                     description="risk-limiting audits for IRV contests")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("convert", help="convert a legacy research CVR file to canonical form")
    p.add_argument("input")
    p.add_argument("-o", "--output", required=True)
    p.add_argument("--winner", type=int, help="reported winner id to record in the header")
    p.add_argument("--cards", type=int, help="card upper bound (default: ballot count)")
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("tabulate", help="run the IRV count and print rounds")
    p.add_argument("cvrs")
    p.add_argument("--tie-policy", choices=["lowest-id", "error"], default="lowest-id")
    p.set_defaults(func=cmd_tabulate)

    p = sub.add_parser("generate", help="generate an assertion set from records")
    p.add_argument("cvrs")
    p.add_argument("-o", "--output")
    p.add_argument("--risk-limit", default="0.05")
    p.add_argument("--mode", choices=["comparison", "polling"], default="comparison")
    p.add_argument("--difficulty", choices=["sample-size", "inverse-margin"],
                   default="sample-size")
    p.add_argument("--node-budget", type=int)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("verify", help="check that an assertion set excludes all other winners")
    p.add_argument("cvrs")
    p.add_argument("assertions")
    p.add_argument("--max-factorial", type=int,
                   help="allow exhaustive enumeration beyond 9 candidates")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("trees", help="export pruned elimination trees")
    p.add_argument("cvrs")
    p.add_argument("assertions")
    p.add_argument("-o", "--output")
    p.add_argument("--format", choices=["treedoc", "dot"], default="treedoc")
    p.add_argument("--max-factorial", type=int)
    p.set_defaults(func=cmd_trees)

    p = sub.add_parser("explain", help="print plain-language assertion explanations")
    p.add_argument("assertions")
    p.set_defaults(func=cmd_explain)

    audit = sub.add_parser("audit", help="run or inspect an audit session")
    asub = audit.add_subparsers(dest="audit_command", required=True)

    p = asub.add_parser("init", help="start an audit session and draw the first sample")
    p.add_argument("--cvrs", required=True)
    p.add_argument("--assertions", required=True)
    p.add_argument("--manifest")
    p.add_argument("--risk-limit", default="0.05")
    p.add_argument("--mode", choices=["comparison", "polling"], default="comparison")
    p.add_argument("--seed", required=True)
    p.add_argument("--error-rate-guess", type=float, default=0.0)
    p.add_argument("--initial-draw", type=int)
    _add_client_args(p)
    p.set_defaults(func=cmd_audit_init)

    p = asub.add_parser("draw", help="extend the sample")
    p.add_argument("audit_id")
    p.add_argument("-n", "--count", type=int)
    _add_client_args(p)
    p.set_defaults(func=cmd_audit_draw)

    p = asub.add_parser("enter", help="enter a manual vote record")
    p.add_argument("audit_id")
    p.add_argument("ballot_id")
    p.add_argument("--ranks", help="comma-separated candidate ids, best first")
    p.add_argument("--blank", action="store_true")
    p.add_argument("--not-found", action="store_true")
    p.add_argument("-v", "--verbose", action="store_true")
    _add_client_args(p)
    p.set_defaults(func=cmd_audit_enter)

    p = asub.add_parser("status", help="show the session snapshot")
    p.add_argument("audit_id")
    p.add_argument("--json", action="store_true")
    _add_client_args(p)
    p.set_defaults(func=cmd_audit_status)

    p = asub.add_parser("trees", help="fetch the session tree document")
    p.add_argument("audit_id")
    p.add_argument("--format", choices=["treedoc", "dot"], default="treedoc")
    _add_client_args(p)
    p.set_defaults(func=cmd_audit_trees)

    p = asub.add_parser("report", help="fetch the HTML report")
    p.add_argument("audit_id")
    p.add_argument("-o", "--output")
    _add_client_args(p)
    p.set_defaults(func=cmd_audit_report)

    p = asub.add_parser("escalate", help="declare a full hand count")
    p.add_argument("audit_id")
    _add_client_args(p)
    p.set_defaults(func=cmd_audit_escalate)

    p = asub.add_parser("list", help="list audit sessions")
    _add_client_args(p)
    p.set_defaults(func=cmd_audit_list)

    p = sub.add_parser("serve", help="run the audit service")
    p.add_argument("--state-dir", default=DEFAULT_STATE_DIR)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8765)
    p.add_argument("--ui-dir", help="serve a built browser UI from this directory")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
