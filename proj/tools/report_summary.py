#!/usr/bin/env python3
"""Summarize experiment reports.

Reads the JSON-lines output of `geoweyl numeric` from stdin (or files given
as arguments) and prints an aligned table with a final pass count.
"""
import fileinput
import json
import sys


def main() -> int:
    rows = []
    for line in fileinput.input():
        line = line.strip()
        if not line:
            continue
        r = json.loads(line)
        rows.append(r)
    if not rows:
        print("no reports", file=sys.stderr)
        return 2
    wid = max(len(r["experiment"]) for r in rows)
    npass = 0
    for r in rows:
        npass += bool(r["pass"])
        lo, hi = r["resolution_pair"]
        print(f"{r['experiment']:<{wid}}  rel={r['rel_error']:9.2e}  "
              f"tol={r['tolerance']:7.0e}  res={lo}/{hi}  "
              f"{'pass' if r['pass'] else 'FAIL'}")
    print(f"{npass}/{len(rows)} passed")
    return 0 if npass == len(rows) else 1


if __name__ == "__main__":
    sys.exit(main())
