"""Command-line front end.

The CLI is a thin client of the diagnostics service: it assembles a run
request from defaults, an optional key=value config file and command-line
flags (flags override file values override defaults), posts it to the service
(in-process by default, remote with --server), and renders the returned table
as CSV or JSON.

Exit codes: 0 success, 1 validation failure, 2 numerical failure
(degenerate metric, singularity hit), 3 verify-suite failure.
"""

from __future__ import annotations

import argparse
import asyncio
import math
import os
import sys
from pathlib import Path
from typing import Any, Optional

import httpx

from . import __version__
from .errors import ConfigError
from .runs import COMMANDS
from .tables import ResultTable, render_csv, render_json

OUTDIR_ENV = "TUBEDYNAMO_OUTDIR"

DEFAULTS: dict[str, Any] = {
    "kappa0": 1.0,
    "kappa_table": None,
    "tau0": 0.0,
    "tau_table": None,
    "r0": 0.1,
    "mode": "thin",
    "vr": 0.0,
    "vtheta": 0.0,
    "vs": 0.0,
    "omega1": 0.0,
    "theta": 0.0,
    "s": 0.0,
    "r": 1.0,
    "eps": 0.0,
    "kappa": 4.0,
    "rem": 1.0,
    "t_end": 0.1,
    "dt": 1e-3,
    "format": "csv",
    "out": None,
    "server": None,
    "sweep": [],
}

_FLOAT_KEYS = (
    "kappa0", "tau0", "r0", "vr", "vtheta", "vs", "omega1",
    "theta", "s", "r", "eps", "kappa", "rem", "t_end", "dt",
)
_STRING_KEYS = ("mode", "format", "out", "server")
_TABLE_KEYS = ("kappa_table", "tau_table")


class ClientError(Exception):
    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def _parse_table(text: str, key: str, lineno: int) -> list[list[float]]:
    pairs = []
    for token in text.replace(",", " ").split():
        try:
            s_str, v_str = token.split(":")
            pairs.append([float(s_str), float(v_str)])
        except ValueError:
            raise ConfigError(
                f"line {lineno}: {key} entries must be s:value pairs, got {token!r}"
            ) from None
    if len(pairs) < 2:
        raise ConfigError(f"line {lineno}: {key} needs at least two s:value pairs")
    return pairs


def parse_sweep_spec(text: str, where: str = "--sweep") -> dict[str, Any]:
    try:
        var, rng = text.split("=")
        start_s, stop_s, count_s = rng.split(":")
        spec = {
            "var": var.strip(),
            "start": float(start_s),
            "stop": float(stop_s),
            "count": int(count_s),
        }
    except ValueError:
        raise ConfigError(
            f"{where}: expected var=start:stop:count, got {text!r}"
        ) from None
    if spec["count"] < 1:
        raise ConfigError(f"{where}: sweep count must be >= 1, got {spec['count']}")
    return spec


def parse_config_file(path: str) -> dict[str, Any]:
    """Parse a key=value config file; unknown keys and bad types are rejected."""
    cfg: dict[str, Any] = {}
    p = Path(path)
    if not p.exists():
        raise ConfigError(f"config file not found: {path}")
    for lineno, raw in enumerate(p.read_text().splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value, got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key in _FLOAT_KEYS:
            try:
                cfg[key] = float(value)
            except ValueError:
                raise ConfigError(f"line {lineno}: {key} expects a number, got {value!r}") from None
        elif key in _TABLE_KEYS:
            cfg[key] = _parse_table(value, key, lineno)
        elif key == "sweep":
            specs = [tok for tok in (s.strip() for s in value.split(",")) if tok]
            cfg.setdefault("sweep", [])
            cfg["sweep"].extend(parse_sweep_spec(s, where=f"line {lineno}") for s in specs)
        elif key in _STRING_KEYS:
            if key == "mode" and value not in ("thin", "thick"):
                raise ConfigError(f"line {lineno}: mode must be thin or thick, got {value!r}")
            if key == "format" and value not in ("csv", "json"):
                raise ConfigError(f"line {lineno}: format must be csv or json, got {value!r}")
            cfg[key] = value
        else:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
    return cfg


def build_config(args: argparse.Namespace) -> dict[str, Any]:
    """Defaults, overridden by the config file, overridden by explicit flags."""
    cfg = dict(DEFAULTS)
    cfg["sweep"] = list(DEFAULTS["sweep"])
    if args.config:
        file_cfg = parse_config_file(args.config)
        sweeps = file_cfg.pop("sweep", None)
        cfg.update(file_cfg)
        if sweeps:
            cfg["sweep"] = sweeps
    for key in (*_FLOAT_KEYS, *_STRING_KEYS):
        flag = getattr(args, key.replace("-", "_"), None)
        if flag is not None:
            cfg[key] = flag
    if args.sweep:
        cfg["sweep"] = [parse_sweep_spec(s) for s in args.sweep]
    if getattr(args, "eps_from_rem", False):
        if cfg["rem"] <= 0:
            raise ConfigError("--eps-from-rem needs rem > 0")
        cfg["eps"] = 1.0 / cfg["rem"]
    return cfg


def payload_from_config(cfg: dict[str, Any]) -> dict[str, Any]:
    tube: dict[str, Any] = {"r0": cfg["r0"], "mode": cfg["mode"]}
    if cfg["kappa_table"]:
        tube["kappa_table"] = cfg["kappa_table"]
    else:
        tube["kappa0"] = cfg["kappa0"]
    if cfg["tau_table"]:
        tube["tau_table"] = cfg["tau_table"]
    else:
        tube["tau0"] = cfg["tau0"]
    return {
        "tube": tube,
        "flow": {
            "vr": cfg["vr"], "vtheta": cfg["vtheta"],
            "vs": cfg["vs"], "omega1": cfg["omega1"],
        },
        "theta": cfg["theta"],
        "s": cfg["s"],
        "r": cfg["r"],
        "eps": cfg["eps"],
        "kappa": cfg["kappa"],
        "rem": cfg["rem"],
        "t_end": cfg["t_end"],
        "dt": cfg["dt"],
        "sweeps": cfg["sweep"],
    }


# ---------------------------------------------------------------------------
# service client
# ---------------------------------------------------------------------------


class ServiceClient:
    """HTTP client for the diagnostics service; in-process ASGI when no server
    address is given."""

    def __init__(self, server: Optional[str] = None):
        self.server = server

    def post(self, path: str, payload: dict) -> dict:
        if self.server:
            with httpx.Client(base_url=self.server, timeout=300.0) as client:
                response = client.post(path, json=payload)
        else:
            response = asyncio.run(self._post_inprocess(path, payload))
        return self._handle(response)

    @staticmethod
    async def _post_inprocess(path: str, payload: dict) -> httpx.Response:
        from .service import app

        transport = httpx.ASGITransport(app=app)
        async with httpx.AsyncClient(transport=transport, base_url="http://service") as client:
            return await client.post(path, json=payload)

    @staticmethod
    def _handle(response: httpx.Response) -> dict:
        if response.status_code == 200:
            return response.json()
        try:
            body = response.json()
        except ValueError:
            body = {}
        detail = body.get("detail", response.text)
        kind = body.get("kind", "validation" if response.status_code == 422 else "numerical")
        raise ClientError(f"{kind} failure: {detail}", 1 if kind == "validation" else 2)


def _table_from_response(body: dict) -> ResultTable:
    rows = [
        tuple(math.nan if v is None else float(v) for v in row)
        for row in body["rows"]
    ]
    return ResultTable(columns=tuple(body["columns"]), rows=rows, metadata=body["metadata"])


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _add_common_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--config", help="key=value configuration file")
    sub.add_argument("--out", help="output path (relative paths land in $%s)" % OUTDIR_ENV)
    sub.add_argument("--format", choices=("csv", "json"))
    sub.add_argument("--server", help="service URL; default runs the service in-process")
    for key, meta in (
        ("kappa0", "axis curvature"), ("tau0", "axis torsion"), ("r0", "tube radius"),
        ("theta", "azimuthal angle"), ("s", "arclength"), ("r", "radial coordinate"),
        ("vr", "radial velocity"), ("vs", "axial velocity"), ("vtheta", "azimuthal velocity"),
        ("omega1", "vorticity"), ("eps", "resistive coefficient"),
        ("kappa", "curvature parameter of the diffusive spectrum"),
        ("rem", "magnetic Reynolds number"),
        ("t-end", "time horizon"), ("dt", "flow time step"),
    ):
        sub.add_argument(f"--{key}", type=float, dest=key.replace("-", "_"), help=meta)
    sub.add_argument("--mode", choices=("thin", "thick"))
    sub.add_argument("--sweep", action="append", metavar="VAR=START:STOP:COUNT",
                     help="inclusive grid over a variable; repeatable")
    sub.add_argument("--eps-from-rem", action="store_true",
                     help="set eps = 1/rem before running")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tubedynamo",
        description="Curvature, Ricci-flow and dynamo diagnostics for twisted flux tubes",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    for command in COMMANDS:
        sub = subs.add_parser(command, help=f"run the {command} diagnostics")
        _add_common_flags(sub)
    return parser


def _output_path(cfg: dict[str, Any], command: str) -> Path:
    outdir = Path(os.environ.get(OUTDIR_ENV, "."))
    fmt = cfg["format"]
    if cfg["out"]:
        path = Path(cfg["out"])
        return path if path.is_absolute() else outdir / path
    return outdir / f"{command}.{fmt}"


def _run_verify(client: ServiceClient) -> int:
    body = client.post("/verify", {})
    for c in body["criteria"]:
        status = "PASS" if c["passed"] else "FAIL"
        print(f"[{c['cid']:2d}/10] {status}  {c['name']}: {c['detail']} ({c['elapsed']:.2f}s)")
    if body["all_passed"]:
        print("verify: all criteria passed")
        return 0
    failed = [str(c["cid"]) for c in body["criteria"] if not c["passed"]]
    print(f"verify: FAILED criteria: {', '.join(failed)}", file=sys.stderr)
    return 3


def main(argv: Optional[list[str]] = None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        client = ServiceClient(cfg["server"])
        if args.command == "verify":
            return _run_verify(client)
        payload = payload_from_config(cfg)
        body = client.post(f"/{args.command}", payload)
        table = _table_from_response(body)
        text = render_csv(table) if cfg["format"] == "csv" else render_json(table)
        path = _output_path(cfg, args.command)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, newline="\n")
        print(f"wrote {path} ({len(table.rows)} rows)")
        return 0
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ClientError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except httpx.HTTPError as exc:
        print(f"error: cannot reach the service: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
