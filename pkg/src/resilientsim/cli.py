"""Command-line front end.

By default every command runs in-process.  Pass ``--server URL`` to send
the same request to a running service instead (``resilientsim serve``);
either way the CLI writes the result files locally.

Exit codes: 0 success; 1 parse/config/cap errors; 2 feasibility not
validated (advisory, `feasibility` command only); 3 final error above
epsilon; 4 divergence.
"""

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from pydantic import ValidationError

from .api import service
from .api.schemas import FeasibilityResponse, RunRequest, SimulationResponse
from .errors import CapError, ConfigError, DivergenceError, RankError, ResilientSimError
from .simulator import STRATEGY_KINDS
from .traceio import write_json, write_node_errors_csv, write_trace_csv

_REMOTE_ERRORS = {
    "ConfigError": ConfigError,
    "CapError": CapError,
    "RankError": RankError,
    "DivergenceError": DivergenceError,
}


def load_config(path):
    """Parse a run-config JSON file into a RunRequest (ConfigError on failure)."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config {path} is not valid JSON "
            f"(line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from exc
    try:
        return RunRequest.model_validate(doc)
    except ValidationError as exc:
        lines = [
            f"  field {'.'.join(str(p) for p in err['loc'])}: {err['msg']}"
            for err in exc.errors()
        ]
        raise ConfigError(
            "config {} failed validation:\n{}".format(path, "\n".join(lines))
        ) from exc


def resolve_output_dir(cli_dir, config_dir):
    """Env var beats the --output-dir flag, which beats the config field."""
    out = os.environ.get("RESILIENT_OUTPUT_DIR") or cli_dir or config_dir or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _remote_call(server, route, req=None, params=None, model=None):
    import httpx

    url = server.rstrip("/") + route
    body = req.model_dump(mode="json") if req is not None else None
    try:
        r = httpx.post(url, json=body, params=params, timeout=600.0)
    except httpx.HTTPError as exc:
        raise ConfigError(f"cannot reach server {server}: {exc}") from exc
    if r.status_code != 200:
        try:
            payload = r.json()
        except ValueError:
            payload = {}
        name = payload.get("error")
        detail = payload.get("detail", r.text)
        exc_cls = _REMOTE_ERRORS.get(name, ConfigError)
        raise exc_cls(f"server rejected the request: {detail}")
    return model.model_validate(r.json())


def write_simulation_files(outdir, resp):
    write_trace_csv(
        outdir / "trace.csv",
        resp.trace.times,
        resp.trace.states,
        resp.trace.uc,
        resp.trace.uuc,
    )
    write_node_errors_csv(
        outdir / "node_errors.csv",
        [(r.n, r.t_n, r.err, r.bound) for r in resp.node_errors],
    )
    write_json(outdir / "summary.json", resp.summary.model_dump())
    write_json(outdir / "schedule.json", [row.model_dump() for row in resp.schedule])
    write_json(outdir / "feasibility.json", resp.feasibility.model_dump())


def _print_feasibility(rep):
    print(f"c = {rep.c:.10g}, c1 = {rep.c1:.10g}, c2 = {rep.c2:.10g}, D_S = {rep.D_S:.10g}")
    print(f"conditions_hold = {rep.conditions_hold}")
    if rep.feasible_interval is not None:
        lo, hi = rep.feasible_interval
        print(f"feasible t_f window = [{lo:.10g}, {hi:.10g}]")
    print(f"tf_lower_bound = {rep.tf_lower_bound:.10g}")
    if rep.t_f is not None:
        print(f"t_f = {rep.t_f:.10g} -> tf_valid = {rep.tf_valid}")
    for note in rep.notes:
        print(f"note: {note}", file=sys.stderr)


def cmd_feasibility(args):
    req = load_config(args.config)
    if args.server:
        rep = _remote_call(args.server, "/feasibility", req=req, model=FeasibilityResponse)
    else:
        rep = service.run_feasibility(req)
    outdir = resolve_output_dir(args.output_dir, req.output_dir)
    write_json(outdir / "feasibility.json", rep.model_dump())
    _print_feasibility(rep)
    print(f"wrote {outdir / 'feasibility.json'}")
    return 0 if rep.tf_valid else 2


def _finish_simulation(args, req, resp):
    outdir = resolve_output_dir(args.output_dir, req.output_dir)
    write_simulation_files(outdir, resp)
    s = resp.summary
    if not s.tf_valid:
        print(
            "warning: horizon not validated; input-constraint guarantee "
            "does not apply to this run",
            file=sys.stderr,
        )
        for note in resp.feasibility.notes:
            print(f"note: {note}", file=sys.stderr)
    print(
        f"final_error = {s.final_error:.10g} (epsilon = {s.epsilon:.10g}), "
        f"constraint_max = {s.constraint_max:.10g}"
    )
    print(
        f"n1 = {s.n1}, n_bar = {s.n_bar}, steps_per_interval = "
        f"{s.steps_per_interval}, runtime = {s.runtime_seconds:.3f}s"
    )
    if s.violations.get("bound"):
        print(f"bound violations: {s.violations['bound']}", file=sys.stderr)
    if s.violations.get("constraint"):
        print(f"constraint violations: {s.violations['constraint']}", file=sys.stderr)
    print(f"wrote trace.csv node_errors.csv summary.json schedule.json feasibility.json in {outdir}")
    return 0 if s.final_error_ok else 3


def _run_simulation_request(args, req):
    try:
        if args.server:
            resp = _remote_call(args.server, "/simulate", req=req, model=SimulationResponse)
        else:
            resp = service.run_simulation(req)
    except DivergenceError as exc:
        outdir = resolve_output_dir(args.output_dir, req.output_dir)
        if exc.trace is not None:
            tr = exc.trace
            write_trace_csv(outdir / "trace.csv", tr.times, tr.states, tr.uc_values, tr.uuc_values)
            write_node_errors_csv(
                outdir / "node_errors.csv",
                [(r.n, r.t, r.err, r.bound) for r in tr.node_errors],
            )
            print(f"wrote partial trace to {outdir}", file=sys.stderr)
        print(f"error: simulation diverged: {exc}", file=sys.stderr)
        return 4
    return _finish_simulation(args, req, resp)


def cmd_simulate(args):
    return _run_simulation_request(args, load_config(args.config))


def cmd_demo_admire(args):
    if args.server:
        try:
            params = {}
            if args.seed is not None:
                params["seed"] = args.seed
            if args.strategy is not None:
                params["strategy"] = args.strategy
            resp = _remote_call(
                args.server, "/demo/admire", params=params, model=SimulationResponse
            )
        except DivergenceError as exc:
            print(f"error: simulation diverged: {exc}", file=sys.stderr)
            return 4
        return _finish_simulation(args, service.demo_request(args.seed, args.strategy), resp)
    req = service.demo_request(args.seed, args.strategy)
    return _run_simulation_request(args, req)


def cmd_serve(args):
    import uvicorn

    from .api.app import app

    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def _batch_worker(config_path, out_root):
    """One batch run; returns (config_path, exit_code, message)."""
    try:
        req = load_config(config_path)
        outdir = Path(out_root) / Path(config_path).stem
        outdir.mkdir(parents=True, exist_ok=True)
        resp = service.run_simulation(req)
        write_simulation_files(outdir, resp)
        code = 0 if resp.summary.final_error_ok else 3
        return (config_path, code, f"final_error = {resp.summary.final_error:.6g}")
    except DivergenceError as exc:
        return (config_path, 4, f"diverged: {exc}")
    except ResilientSimError as exc:
        return (config_path, 1, str(exc))


def cmd_batch(args):
    if args.server:
        print("error: --batch runs locally and cannot be combined with --server", file=sys.stderr)
        return 1
    configs = sorted(Path(args.batch).glob("*.json"))
    if not configs:
        print(f"error: no *.json configs found in {args.batch}", file=sys.stderr)
        return 1
    out_root = resolve_output_dir(args.output_dir, None)
    worst = 0
    with ProcessPoolExecutor(max_workers=min(len(configs), os.cpu_count() or 1)) as pool:
        for path, code, message in pool.map(
            _batch_worker, [str(p) for p in configs], [str(out_root)] * len(configs)
        ):
            status = "ok" if code == 0 else f"exit {code}"
            print(f"{path}: {status} ({message})")
            worst = max(worst, code)
    return worst


def build_parser():
    parser = argparse.ArgumentParser(
        prog="resilientsim",
        description="Synthesize and simulate resilient control sequences "
        "for systems with uncontrolled input channels.",
    )
    parser.add_argument(
        "--batch",
        metavar="DIR",
        help="run every *.json config in DIR concurrently (simulate mode)",
    )
    parser.add_argument("--server", metavar="URL", help="send requests to a running service")
    parser.add_argument(
        "-o", "--output-dir", metavar="DIR", help="where result files go "
        "(RESILIENT_OUTPUT_DIR env var takes precedence)"
    )
    sub = parser.add_subparsers(dest="command")

    def common(p):
        # accept the global flags after the subcommand too; SUPPRESS keeps
        # an omitted trailing flag from stomping a leading one
        p.add_argument("--server", metavar="URL", default=argparse.SUPPRESS,
                       help=argparse.SUPPRESS)
        p.add_argument("-o", "--output-dir", metavar="DIR",
                       default=argparse.SUPPRESS, help=argparse.SUPPRESS)
        return p

    p_feas = common(sub.add_parser("feasibility",
                                   help="analyze a config without simulating"))
    p_feas.add_argument("config", help="path to a run-config JSON file")

    p_sim = common(sub.add_parser("simulate", help="run the closed loop for a config"))
    p_sim.add_argument("config", help="path to a run-config JSON file")

    p_demo = common(sub.add_parser("demo-admire", help="run the fighter-jet showcase"))
    p_demo.add_argument("--seed", type=int, default=None, help="bang-bang segment seed")
    p_demo.add_argument(
        "--strategy", choices=STRATEGY_KINDS, default=None,
        help="override the demo's uncontrolled-input strategy",
    )

    p_serve = sub.add_parser("serve", help="start the HTTP service")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8000)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage errors; fold that into the parse-error
        # code so 2 stays reserved for the feasibility advisory
        return 1 if exc.code else 0
    try:
        if args.batch:
            if args.command is not None:
                print("error: --batch replaces the subcommand", file=sys.stderr)
                return 1
            return cmd_batch(args)
        if args.command == "feasibility":
            return cmd_feasibility(args)
        if args.command == "simulate":
            return cmd_simulate(args)
        if args.command == "demo-admire":
            return cmd_demo_admire(args)
        if args.command == "serve":
            return cmd_serve(args)
        parser.print_help()
        return 1
    except (ConfigError, CapError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except DivergenceError as exc:
        print(f"error: simulation diverged: {exc}", file=sys.stderr)
        return 4
    except ResilientSimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
