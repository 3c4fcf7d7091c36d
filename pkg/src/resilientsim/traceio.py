"""File emission for runs: CSV traces and JSON reports.

All files are UTF-8; CSV uses '.' decimals; every float is written with
repr so values round-trip bit-exactly through the files.  Writers take
plain columns/rows so they serve both in-process trace objects and
payloads fetched from a remote service.
"""

import csv
import json


def _fmt(v):
    return repr(float(v))


def write_trace_csv(path, times, states, uc_values, uuc_values):
    """Header t,x1..xd,uc1..ucm,uuc1..uucp; one row per recorded sample."""
    d = len(states[0])
    m = len(uc_values[0])
    p = len(uuc_values[0])
    header = (
        ["t"]
        + [f"x{i + 1}" for i in range(d)]
        + [f"uc{i + 1}" for i in range(m)]
        + [f"uuc{i + 1}" for i in range(p)]
    )
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(len(times)):
            row = [times[i], *states[i], *uc_values[i], *uuc_values[i]]
            writer.writerow([_fmt(v) for v in row])


def write_node_errors_csv(path, rows):
    """Header n,t_n,err,bound; `rows` yields (n, t_n, err, bound) tuples."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "t_n", "err", "bound"])
        for n, t_n, err, bound in rows:
            writer.writerow([int(n), _fmt(t_n), _fmt(err), _fmt(bound)])


def write_json(path, payload):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2)
        fh.write("\n")
