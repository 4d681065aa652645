"""Command-line front end: a thin client of the HTTP service.

By default requests are served by an in-process application instance (no
running server needed); ``--server URL`` targets a remote deployment instead,
and ``--mode serve`` starts one.  Flags override config-file values; the
default output directory comes from ``--out``, then the config, then the
``RISPOWER_OUT`` environment variable, then the working directory.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import httpx

from .channel import load_channels
from .solver import SOLVE_CSV_FIELDS

OUT_ENV_VAR = "RISPOWER_OUT"
MODES = ("solve", "sweep", "check", "simulate", "serve")

_BISECTION_KEYS = (
    "p_lower",
    "p_upper",
    "eps_tol",
    "max_iterations",
    "warm_start",
    "repair_doublings",
)


class CliError(Exception):
    """Configuration or usage error (exit status 2)."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rispower",
        description="Minimum transmit power for a RIS-based passive PSK transmitter.",
        epilog=f"Default output directory: --out, config 'out_dir', ${OUT_ENV_VAR}, then '.'",
    )
    parser.add_argument("--mode", choices=MODES, help="what to run (flag wins over config)")
    parser.add_argument("--config", help="JSON config file")
    parser.add_argument("--seed", type=int, help="master seed (u64)")
    parser.add_argument("--out", help="output directory for CSV/JSON artifacts")
    parser.add_argument("--symbols", type=int, help="symbol vectors per sweep point")
    parser.add_argument("--trials", type=int, help="noise trials for simulate mode")
    parser.add_argument("--threads", type=int, help="worker pool size (default: all cores)")
    parser.add_argument("--check-tol", type=float, dest="check_tol",
                        help="relative tolerance for the gradient self check")
    parser.add_argument("--server", help="remote service URL (default: in-process)")
    parser.add_argument("--host", default="127.0.0.1", help="bind address for serve mode")
    parser.add_argument("--port", type=int, default=8000, help="port for serve mode")
    return parser


def _load_config(path: str | None) -> dict:
    if path is None:
        return {}
    p = Path(path)
    if not p.is_file():
        raise CliError(f"config file not found: {path}")
    try:
        with open(p, "r", encoding="utf-8") as fh:
            cfg = json.load(fh)
    except json.JSONDecodeError as exc:
        raise CliError(f"malformed config file {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CliError("config file must hold a JSON object")
    return cfg


def _merge(args: argparse.Namespace, cfg: dict) -> dict:
    """Config values with flags layered on top (flags win)."""
    merged = dict(cfg)
    for key, value in (
        ("mode", args.mode),
        ("seed", args.seed),
        ("out_dir", args.out),
        ("symbol_count", args.symbols),
        ("trials", args.trials),
        ("threads", args.threads),
        ("grad_rel_tol", args.check_tol),
        ("server", args.server),
    ):
        if value is not None:
            merged[key] = value
    merged.setdefault("seed", 0)
    if "out_dir" not in merged:
        merged["out_dir"] = os.environ.get(OUT_ENV_VAR, ".")
    if "threads" not in merged:
        merged["threads"] = os.cpu_count() or 1
    return merged


def _client(cfg: dict) -> httpx.Client:
    server = cfg.get("server")
    if server:
        return httpx.Client(base_url=server, timeout=None)
    # In-process default: drive the ASGI app synchronously, no server needed.
    import warnings

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # starlette's httpx deprecation notice
        from starlette.testclient import TestClient

    from .service import create_app

    return TestClient(create_app(), base_url="http://rispower.local")


def _post(client: httpx.Client, path: str, payload: dict) -> dict:
    response = client.post(path, json=payload)
    if response.status_code == 422:
        raise CliError(f"service rejected the request: {response.json()['detail']}")
    if response.status_code != 200:
        detail = response.json().get("detail", response.text)
        raise RuntimeError(f"service error {response.status_code}: {detail}")
    return response.json()


def _bisection_payload(cfg: dict) -> dict:
    return {k: cfg[k] for k in _BISECTION_KEYS if k in cfg}


def _instance_payload(cfg: dict) -> dict:
    """Shared request body for solve/simulate modes."""
    payload: dict = {"seed": cfg.get("seed", 0)}
    for key in ("n_elements", "k_users", "order", "offset", "noise_var", "tau", "targets",
                "symbols"):
        if key in cfg:
            payload[key] = cfg[key]
    if "channel_file" in cfg:
        cs = load_channels(cfg["channel_file"])
        payload["channels"] = {
            "h_g": [[v.real, v.imag] for v in cs.h_g],
            "h_u": [[[v.real, v.imag] for v in row] for row in cs.h_u],
            "noise_var": cs.noise_var,
        }
        payload.setdefault("noise_var", cs.noise_var)
    bis = _bisection_payload(cfg)
    if bis:
        payload["bisection"] = bis
    if "tau" not in payload and "targets" not in payload:
        raise CliError("config must provide 'tau' or 'targets'")
    return payload


def _out_dir(cfg: dict) -> Path:
    out = Path(cfg["out_dir"])
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(payload: dict, path: Path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _run_solve(cfg: dict) -> int:
    payload = _instance_payload(cfg)
    with _client(cfg) as client:
        data = _post(client, "/solve", payload)
    out = _out_dir(cfg)
    _write_json(data, out / "solve_result.json")
    with open(out / "solve_result.csv", "w", newline="", encoding="ascii") as fh:
        writer = csv.DictWriter(fh, fieldnames=SOLVE_CSV_FIELDS)
        writer.writeheader()
        writer.writerow(
            {
                "seed": payload["seed"],
                "N": data["n_elements"],
                "K": data["k_users"],
                "alpha_s": data["order"],
                "tau": cfg.get("tau", ""),
                "p_opt": repr(data["p_opt"]) if data["p_opt"] is not None else "",
                "p_n_db": repr(data["p_n_db"]) if data["p_n_db"] is not None else "",
                "iterations": data["iterations"],
                "feasible": data["feasible"],
            }
        )
    if not data["feasible"]:
        print(f"infeasible: {data['diagnostic']}", file=sys.stderr)
        return 1
    print(
        f"P_opt = {data['p_opt']:.6g}  P_n = {data['p_n_db']:.4f} dB  "
        f"iterations = {data['iterations']}  oracle_calls = {data['oracle_calls']}"
    )
    return 0


def _run_simulate(cfg: dict) -> int:
    payload = _instance_payload(cfg)
    payload["trials"] = cfg.get("trials", 100_000)
    with _client(cfg) as client:
        response = client.post("/simulate", json=payload)
        if response.status_code == 409:
            print(f"infeasible: {response.json()['detail']}", file=sys.stderr)
            return 1
        if response.status_code == 422:
            raise CliError(f"service rejected the request: {response.json()['detail']}")
        if response.status_code != 200:
            raise RuntimeError(f"service error {response.status_code}: {response.text}")
        data = response.json()
    out = _out_dir(cfg)
    _write_json(data, out / "simulate_result.json")
    solve = data["solve"]
    print(f"P_opt = {solve['p_opt']:.6g}  P_n = {solve['p_n_db']:.4f} dB  trials = {data['trials']}")
    print("user  target      sep         stderr      within_bound")
    for k, (sep, se, tgt, ok) in enumerate(
        zip(data["per_user_sep"], data["stderr"], data["targets"], data["within_bound"])
    ):
        print(f"{k:4d}  {tgt:.3e}  {sep:.3e}  {se:.3e}  {'yes' if ok else 'NO'}")
    return 0 if all(data["within_bound"]) else 1


def _run_sweep(cfg: dict) -> int:
    payload: dict = {
        "seed": cfg.get("seed", 0),
        "n_list": cfg.get("n_list", [30, 40, 50, 60]),
        "tau_list": cfg.get("tau_list", list(range(1, 11))),
        "threads": cfg.get("threads", 1),
    }
    for key in ("k_users", "order", "offset", "symbol_count", "noise_var", "channel_policy",
                "db_average"):
        if key in cfg:
            payload[key] = cfg[key]
    bis = _bisection_payload(cfg)
    if bis:
        payload["bisection"] = bis
    with _client(cfg) as client:
        data = _post(client, "/sweep", payload)
    out = _out_dir(cfg)
    _write_json(data, out / "sweep_summary.json")
    csv_path = out / "sweep.csv"
    with open(csv_path, "w", newline="", encoding="ascii") as fh:
        writer = csv.writer(fh)
        writer.writerow(["N", "K", "alpha_s", "tau", "avg_p_n_db", "symbol_count", "seed",
                         "infeasible_count"])
        for r in data["records"]:
            writer.writerow([
                r["n_elements"], r["k_users"], r["order"], repr(r["tau"]),
                repr(r["avg_p_n_db"]) if r["avg_p_n_db"] is not None else "",
                r["symbol_count"], r["seed"], r["infeasible_count"],
            ])
    print(f"wrote {len(data['records'])} records to {csv_path}")
    for r in data["records"]:
        avg = "---" if r["avg_p_n_db"] is None else f"{r['avg_p_n_db']:9.4f}"
        print(f"N={r['n_elements']:4d}  tau={r['tau']:5.2f}  P_n={avg} dB  "
              f"infeasible={r['infeasible_count']}")
    return 0


def _run_check(cfg: dict) -> int:
    payload = {"seed": cfg.get("seed", 0)}
    if "grad_rel_tol" in cfg:
        payload["grad_rel_tol"] = cfg["grad_rel_tol"]
    with _client(cfg) as client:
        data = _post(client, "/check", payload)
    width = max(len(c["name"]) for c in data["checks"])
    for item in data["checks"]:
        status = "PASS" if item["passed"] else "FAIL"
        print(f"{item['name']:<{width}}  {status}  tol={item['tolerance']:g}  {item['detail']}")
    return 0 if data["all_passed"] else 1


def _run_serve(cfg: dict, host: str, port: int) -> int:
    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(), host=host, port=port)
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _merge(args, _load_config(args.config))
        mode = cfg.get("mode")
        if mode not in MODES:
            raise CliError(f"no valid mode given (flag --mode or config 'mode'); got {mode!r}")
        if mode == "solve":
            return _run_solve(cfg)
        if mode == "simulate":
            return _run_simulate(cfg)
        if mode == "sweep":
            return _run_sweep(cfg)
        if mode == "check":
            return _run_check(cfg)
        return _run_serve(cfg, args.host, args.port)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
