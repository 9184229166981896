"""Command-line entry point.

Exit codes: 0 success, 1 usage or configuration error, 2 verification
counterexample, 3 codec or data error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import codec as codec_mod
from .gf import field as gf_field
from .model import InvalidParams, SystemParams, as_fraction, require_valid
from .optimizer import (
    PointKind,
    baseline_costs,
    comparison_curves,
    mscr_point,
    opt_bs_count,
    optimal_points,
    tradeoff_curve,
)
from .simulator import Scenario, run
from .verify import composition_sweep, flow_sweep, perturbed_psi

log = logging.getLogger("bsregen")

EXIT_OK, EXIT_USAGE, EXIT_COUNTEREXAMPLE, EXIT_DATA = 0, 1, 2, 3

Num = Union[int, float, str]


class UsageError(Exception):
    pass


class ComparisonRow(BaseModel):
    model_config = ConfigDict(extra="forbid")
    beta: Num
    w: list[Num]
    r: list[Num] = [1, 1]


class Config(BaseModel):
    """Every key any subcommand reads; unknown keys are rejected."""

    model_config = ConfigDict(extra="forbid")

    n: Optional[int] = None
    k: Optional[int] = None
    d: Optional[int] = None
    t: Optional[int] = None
    w: list[Num] = []
    b: list[Num] = []
    F: Num = 1

    grid: int = Field(21, ge=2)
    baseline: bool = False

    max_k: int = 6
    max_t: int = 3
    max_M: int = 2
    samples: int = 5
    flow_samples: int = 1
    flow_histories: int = 1
    perturb_psi: bool = False
    seed: int = 0

    rho: Optional[int] = None
    field_p: int = 2
    field_q: int = 8
    unit_bytes: int = 1 << 20
    failed: Optional[list[int]] = None
    nodes: Optional[list[int]] = None

    script: Optional[list[list[int]]] = None
    rounds: int = 0
    departure_rate: float = 0.5
    verify_every: int = 1
    file_size: int = 4096

    scenarios: Optional[list[ComparisonRow]] = None


def load_config(path: Optional[str]) -> Config:
    if path is None:
        return Config()
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    try:
        return Config.model_validate(raw)
    except ValidationError as exc:
        raise UsageError(f"config {path} failed validation:\n{exc}") from exc


def params_from(cfg: Config) -> SystemParams:
    missing = [key for key in ("k", "d", "t") if getattr(cfg, key) is None]
    if missing:
        raise UsageError(f"config is missing {', '.join(missing)}")
    n = cfg.n if cfg.n is not None else cfg.d + cfg.t
    try:
        p = SystemParams(n, cfg.k, cfg.d, cfg.t, tuple(cfg.w), tuple(cfg.b), cfg.F)
        require_valid(p)
    except (InvalidParams, ValueError) as exc:
        raise UsageError(str(exc)) from exc
    return p


def rational(x: Fraction) -> dict:
    return {"value": float(f"{float(x):.12g}"), "exact": f"{x.numerator}/{x.denominator}"}


def _dec(x: Fraction) -> str:
    return f"{float(x):.12g}"


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _point_json(pt) -> dict:
    return {
        "alpha": rational(pt.alpha),
        "gamma": rational(pt.gamma),
        "beta": rational(pt.witness.beta),
        "beta_prime": rational(pt.witness.beta_prime),
        "r": [rational(x) for x in pt.witness.r],
        "rho": pt.rho,
    }


# -- subcommands ------------------------------------------------------------

CURVE_HEADER = ["curve", "alpha", "gamma", "rho", "beta", "beta_prime",
                "alpha_exact", "gamma_exact", "beta_exact", "beta_prime_exact"]


def cmd_tradeoff(cfg: Config, args) -> int:
    p = params_from(cfg)
    grid = args.grid or cfg.grid
    if grid < 2:
        raise UsageError("--grid must be at least 2")
    if cfg.baseline or args.baseline:
        bs_curve, local_curve = comparison_curves(p, grid)
        curves = [("bs", bs_curve), ("local", local_curve)]
    else:
        curves = [("bs", tradeoff_curve(p, grid))]
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_HEADER)
    for name, curve in curves:
        for pt in curve:
            v = pt.witness
            writer.writerow([name, _dec(pt.alpha), _dec(pt.gamma), pt.rho, _dec(v.beta),
                             _dec(v.beta_prime), str(pt.alpha), str(pt.gamma), str(v.beta),
                             str(v.beta_prime)])
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_points(cfg: Config, args) -> int:
    p = params_from(cfg)
    mscr, mbccr = optimal_points(p)
    doc = {
        "mscr": _point_json(mscr),
        "mbccr": _point_json(mbccr),
        "rho_mscr": opt_bs_count(p, PointKind.MSCR),
        "rho_mbccr": opt_bs_count(p, PointKind.MBCCR),
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK


def cmd_verify(cfg: Config, args) -> int:
    psi_fn = perturbed_psi if cfg.perturb_psi else None
    kwargs = {"psi_fn": psi_fn} if psi_fn else {}
    seed = args.seed if args.seed is not None else cfg.seed
    comp = composition_sweep(cfg.max_k, cfg.max_t, cfg.max_M, cfg.samples, seed, **kwargs)
    doc = {"compositions": comp.as_dict()}
    ok = comp.ok
    if cfg.max_k > 0 and (args.exhaustive or cfg.flow_samples > 0):
        tight, sound = flow_sweep(samples=cfg.flow_samples if not args.exhaustive else 2,
                                  histories=cfg.flow_histories if not args.exhaustive else 3,
                                  seed=seed, max_k=min(cfg.max_k, 4), max_t=min(cfg.max_t, 3),
                                  max_M=min(cfg.max_M, 2))
        doc["flow_tightness"] = tight.as_dict()
        doc["flow_soundness"] = sound.as_dict()
        ok = ok and tight.ok and sound.ok
    doc["ok"] = ok
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return EXIT_OK if ok else EXIT_COUNTEREXAMPLE


def cmd_table1(cfg: Config, args) -> int:
    scenarios = cfg.scenarios or [
        ComparisonRow(beta="1/2", w=["1.1", "1.7"], r=[1, 1]),
        ComparisonRow(beta="2/3", w=["1.3", "2.1"], r=[1, 0]),
    ]
    names = ["NoCoopLocal", "CoopLocal", "CoopLayer", "FullLayer"]
    rows = []
    for i, sc in enumerate(scenarios, start=1):
        p = SystemParams(4, 2, 2, 2, tuple(sc.w), (1, 1), 4)
        beta = as_fraction(sc.beta)
        if beta <= 0:
            raise UsageError(f"scenario {i}: beta must be positive")
        try:
            require_valid(p)
            costs = baseline_costs(p, beta, sc.r)
        except (InvalidParams, ValueError) as exc:
            raise UsageError(f"scenario {i}: {exc}") from exc
        rows.append({
            "scenario": i, "beta": str(beta), "w": [str(as_fraction(x)) for x in sc.w],
            **{name: {"display": f"{float(val):.3f}".rstrip("0").rstrip("."),
                      "exact": f"{val.numerator}/{val.denominator}"}
               for name, val in zip(names, costs.as_tuple())},
        })
    if args.format == "json":
        _emit(json.dumps(rows, indent=2) + "\n", args.out)
    else:
        lines = ["scenario\tbeta\t" + "\t".join(names)]
        for row in rows:
            lines.append(f"{row['scenario']}\t{row['beta']}\t" + "\t".join(row[n]["display"] for n in names))
        _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK


def _codec_from(cfg: Config) -> codec_mod.CodecInstance:
    if None in (cfg.n, cfg.k, cfg.t, cfg.rho):
        raise UsageError("codec config needs n, k, t and rho")
    try:
        return codec_mod.codec_new(cfg.n, cfg.k, cfg.t, cfg.rho, gf_field(cfg.field_p, cfg.field_q))
    except (codec_mod.CodecError, ValueError) as exc:
        raise UsageError(str(exc)) from exc


def _ids(text: Optional[str], fallback: Optional[list[int]], what: str) -> list[int]:
    if text:
        try:
            return [int(x) for x in text.split(",") if x.strip()]
        except ValueError as exc:
            raise UsageError(f"--{what} expects comma-separated integers") from exc
    if fallback is None:
        raise UsageError(f"no {what} given")
    return list(fallback)


def _read_dir(directory: Path):
    manifest = json.loads((directory / "manifest.json").read_text())
    nodes, bss, header = {}, [], None
    for path in sorted(directory.glob("*.bin")):
        header, store = codec_mod.store_from_bytes(path.read_bytes())
        if header.kind == "node":
            nodes[store.node_id] = store
        else:
            bss.append(store)
    if header is None:
        raise codec_mod.CodecError(f"no store files in {directory}")
    return header.codec(), manifest, nodes, sorted(bss, key=lambda s: s.layer)


def _write_store(directory: Path, c, store) -> None:
    if isinstance(store, codec_mod.NodeStore):
        (directory / f"node_{store.node_id:03d}.bin").write_bytes(codec_mod.node_to_bytes(c, store))
    else:
        (directory / f"bs_{store.layer:03d}.bin").write_bytes(codec_mod.bs_to_bytes(c, store))


def cmd_codec(cfg: Config, args) -> int:
    if args.action == "encode":
        c = _codec_from(cfg)
        if not args.input or not args.dir:
            raise UsageError("encode needs --input and --dir")
        data = Path(args.input).read_bytes()
        enc = codec_mod.encode(c, data)
        out = Path(args.dir)
        out.mkdir(parents=True, exist_ok=True)
        for store in list(enc.nodes.values()) + list(enc.base_stations):
            _write_store(out, c, store)
        manifest = {"n": c.n, "k": c.k, "t": c.t, "rho": c.rho,
                    "field": {"p": cfg.field_p, "q": cfg.field_q},
                    "length": len(data), "unit_bytes": cfg.unit_bytes}
        (out / "manifest.json").write_text(json.dumps(manifest) + "\n")
        _emit(json.dumps({"nodes": sorted(enc.nodes), "base_stations": c.rho,
                          "chunk_fraction": str(c.chunk_fraction)}) + "\n", args.out)
        return EXIT_OK

    if not args.dir:
        raise UsageError(f"{args.action} needs --dir")
    directory = Path(args.dir)
    c, manifest, nodes, bss = _read_dir(directory)

    if args.action == "repair":
        failed = _ids(args.failed, cfg.failed, "failed")
        if len(cfg.w) < c.rho:
            raise UsageError(f"config w needs {c.rho} weights")
        session = codec_mod.repair(c, nodes, failed, bss)
        for store in session.stores.values():
            _write_store(directory, c, store)
        F = Fraction(manifest["length"], manifest["unit_bytes"])
        per = codec_mod.ledger_cost(session, cfg.w, F)
        ref = mscr_point(SystemParams(c.n, c.k, c.k, c.t, tuple(cfg.w[:c.rho]), (1,) * c.rho, F),
                         (1,) * c.rho, c.rho).gamma
        doc = {
            "failed": list(session.failed),
            "newcomers": [{"id": j, **session.counts(j),
                           "data_moved": rational(session.ledger(j, cfg.w, F).data_moved),
                           "cost": rational(session.ledger(j, cfg.w, F).total_cost)}
                          for j in session.failed],
            "cost_per_newcomer": rational(per),
            "closed_form_cost": rational(ref),
            "matches_closed_form": per == ref,
        }
        _emit(json.dumps(doc, indent=2) + "\n", args.out)
        return EXIT_OK

    if args.action == "collect":
        ids = _ids(args.nodes, cfg.nodes, "nodes")
        missing = [j for j in ids if j not in nodes]
        if missing:
            raise codec_mod.CodecError(f"no store for nodes {missing}")
        data = codec_mod.collect(c, [nodes[j] for j in ids])
        if not args.out:
            raise UsageError("collect needs --out")
        Path(args.out).write_bytes(data)
        return EXIT_OK
    raise UsageError(f"unknown codec action {args.action}")


def cmd_simulate(cfg: Config, args) -> int:
    if None in (cfg.n, cfg.k, cfg.t, cfg.rho):
        raise UsageError("simulate config needs n, k, t and rho")
    seed = args.seed if args.seed is not None else cfg.seed
    try:
        scenario = Scenario(cfg.n, cfg.k, cfg.t, cfg.rho, tuple(cfg.w), cfg.F,
                            script=cfg.script, seed=seed, departure_rate=cfg.departure_rate,
                            rounds=cfg.rounds, verify_every=cfg.verify_every, file_size=cfg.file_size)
        trace = run(scenario, gf_field(cfg.field_p, cfg.field_q))
    except (ValueError, codec_mod.CodecError) as exc:
        raise UsageError(str(exc)) from exc
    lines = [json.dumps({"seed": seed, "n": cfg.n, "k": cfg.k, "t": cfg.t, "rho": cfg.rho,
                         "scripted": cfg.script is not None}, sort_keys=True)]
    lines += [json.dumps(rec, sort_keys=True) for rec in trace.records]
    if trace.state.ledger is not None:
        total = trace.state.ledger.total_cost
    else:
        total = Fraction(0)
    lines.append(json.dumps({"summary": {"rounds": len(trace.records), "total_cost": rational(total),
                                         "error": trace.error}}, sort_keys=True))
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_DATA if trace.error else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bsregen", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--config", help="JSON configuration file")
        sp.add_argument("--out", help="write output here instead of stdout")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--grid", type=int)
        sp.add_argument("--exhaustive", action="store_true")
        return sp

    sp = common(sub.add_parser("tradeoff", help="storage versus repair-cost curve as CSV"))
    sp.add_argument("--baseline", action="store_true", help="also emit the no-BS curve")
    common(sub.add_parser("points", help="optimal operating points and BS counts"))
    common(sub.add_parser("verify", help="cross-check bounds against enumeration and min-cuts"))
    sp = common(sub.add_parser("table1", help="per-newcomer cost comparison of four schemes"))
    sp.add_argument("--format", choices=["text", "json"], default="text")
    common(sub.add_parser("simulate", help="lazy repair lifecycle as JSON lines"))
    sp = common(sub.add_parser("codec", help="encode, repair or collect store files"))
    sp.add_argument("action", choices=["encode", "repair", "collect"])
    sp.add_argument("--input")
    sp.add_argument("--dir")
    sp.add_argument("--failed")
    sp.add_argument("--nodes")
    return parser


COMMANDS = {
    "tradeoff": cmd_tradeoff,
    "points": cmd_points,
    "verify": cmd_verify,
    "table1": cmd_table1,
    "simulate": cmd_simulate,
    "codec": cmd_codec,
}


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        cfg = load_config(args.config)
        return COMMANDS[args.command](cfg, args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (codec_mod.CodecError, OSError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
