"""gorenlab command line: run sessions, print corpus rings, verify artifacts."""
from __future__ import annotations

import argparse
import json
import sys

from .commands import exit_code, run_session
from .session import SessionError, corpus, emit_session, load_json, parse_session
from .verify import CertificateError, verify_artifact

EXIT_OK, EXIT_VERDICT, EXIT_USAGE = 0, 1, 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def build_parser():
    p = _Parser(prog="gorenlab", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True, parser_class=_Parser)
    r = sub.add_parser("run", help="run every command of a session file")
    r.add_argument("session")
    r.add_argument("--bound", type=int)
    r.add_argument("--seed", type=int)
    r.add_argument("--format", choices=("json", "text"), default="json")
    r.add_argument("--timing", action="store_true", help="record wall-clock time per command")
    r.add_argument("--jobs", type=int, default=1, help="run commands in parallel worker processes")
    r.add_argument("-o", "--output", help="write the report here instead of stdout")
    c = sub.add_parser("corpus", help="print the session fragment of a built-in ring")
    c.add_argument("name")
    v = sub.add_parser("verify", help="re-check the certificates of an emitted report")
    v.add_argument("artifact")
    v.add_argument("--format", choices=("json", "text"), default="json")
    return p


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _read(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read()
    except OSError as e:
        raise SessionError(f"cannot read {path}: {e.strerror}") from None


def _text_report(rep):
    lines = []
    for r in rep["results"]:
        c = r["command"]
        args = " ".join(f"{k}={c[k]}" for k in sorted(c) if k != "command")
        lines.append(f"[{r['status']}] {c['command']} {args}: {r['verdict']}")
    s = rep["summary"]
    lines.append(f"{s['pass']} passed, {s['fail']} failed, {s['error']} errors")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.cmd == "corpus":
            sys.stdout.write(emit_session(corpus(args.name)))
            return EXIT_OK
        if args.cmd == "verify":
            doc = load_json(_read(args.artifact))
            out = verify_artifact(doc)
            if args.format == "text":
                for row in out["checks"]:
                    print(f"[{row['status']}] entry {row['entry']} certificate {row['certificate']} "
                          f"({row['kind']}): {row['detail']}")
                s = out["summary"]
                print(f"{s['pass']} passed, {s['fail']} failed, {s['omitted']} omitted")
            else:
                sys.stdout.write(dumps(out))
            return EXIT_OK if out["summary"]["fail"] == 0 else EXIT_VERDICT
        text = _read(args.session)
        S = parse_session(text)
        if args.jobs < 1:
            raise SessionError("--jobs must be at least 1")
        rep = run_session(S, {"bound": args.bound, "seed": args.seed}, timing=args.timing,
                          jobs=args.jobs, text=text)
        body = dumps(rep) if args.format == "json" else _text_report(rep)
        if args.output:
            with open(args.output, "w", encoding="utf-8") as fh:
                fh.write(body)
        else:
            sys.stdout.write(body)
        return exit_code(rep)
    except (SessionError, CertificateError) as e:
        print(f"gorenlab: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
