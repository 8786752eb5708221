"""Command-line entry point: ``miso-lab run`` and ``miso-lab examples``."""
from __future__ import annotations

import argparse
import sys

from .experiments import EXAMPLES, UsageError, load_config, run, run_example

EXIT_USAGE = 2


def _parser():
    p = argparse.ArgumentParser(prog="miso-lab", description="Run verification suites and report each check.")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run the suite described by a JSON config")
    r.add_argument("--config", required=True, help="path to the experiment config")
    r.add_argument("--out", help="write the report here instead of stdout")
    r.add_argument("--format", choices=("json", "csv"), default="json")
    e = sub.add_parser("examples", help="run the checks for one shipped example")
    e.add_argument("--name", required=True, choices=EXAMPLES)
    e.add_argument("--format", choices=("json", "csv"), default="json")
    e.add_argument("--out")
    return p


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            report = run(load_config(args.config))
        else:
            report = run_example(args.name)
    except UsageError as exc:
        print(f"miso-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(report.to_csv() if args.format == "csv" else report.to_json(), args.out)
    s = report.summary
    print(f"{report.suite}: {s['passed']}/{s['total']} checks passed", file=sys.stderr)
    return 0 if report.ok else 1


if __name__ == "__main__":
    sys.exit(main())
