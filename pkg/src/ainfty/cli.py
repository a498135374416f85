"""Command-line entry point: ``ainfty <subcommand> ...``.

Exit codes: 0 success, 1 verification failure, 2 usage error.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from .algebra import AInftyAlgebra, BadModel, check_axioms, eval_unchecked, format_element, test_vectors
from .coeff import format_coeff, frac
from .expr import ParseError, parse_coeff, parse_element
from .linalg import PIVOT_RULES


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    model: str
    e_max: Fraction | None = None
    s_max: int | None = None
    real: bool = False
    out: str | None = None
    pivot: str = "lex"

    def validate(self):
        if self.e_max is not None and not self.e_max > 0:
            raise UsageError("--emax must be positive")
        if self.s_max is not None and self.s_max < 1:
            raise UsageError("--smax must be at least 1")
        if self.pivot not in PIVOT_RULES:
            raise UsageError(f"--pivot must be one of {', '.join(PIVOT_RULES)}")


def _jsonable(x):
    if isinstance(x, Fraction):
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return x


def dump(report: dict, out: str | None):
    text = json.dumps(_jsonable(report), indent=1, sort_keys=True) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def load(cfg: RunConfig, validate: bool = True) -> AInftyAlgebra:
    try:
        data = json.loads(Path(cfg.model).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read model {cfg.model}: {exc}") from None
    alg = AInftyAlgebra.from_json(data)
    if cfg.e_max is not None or cfg.s_max is not None:
        alg = alg.with_tower(alg.tower.with_cutoffs(cfg.e_max, cfg.s_max))
    if validate:
        rep = check_axioms(alg)
        if not rep.ok:
            raise BadModel(f"model fails property ({rep.first.prop}): {rep.first.detail}")
    return alg


def cmd_check(cfg: RunConfig, args) -> int:
    alg = load(cfg, validate=False)
    rep = check_axioms(alg, extended=args.extended)
    dump(rep.to_json(), cfg.out)
    return 0 if rep.ok else 1


def cmd_extend(cfg: RunConfig, args) -> int:
    alg = load(cfg)
    rep = check_axioms(alg, extended=True, max_arity=args.arity)
    samples = []
    vecs = test_vectors(alg, True)
    for x in vecs:
        for y in vecs:
            val = eval_unchecked(alg, [x, y])
            if val:
                samples.append({"inputs": [format_element(x), format_element(y)], "m2": format_element(val)})
    out = rep.to_json()
    out["m2_table"] = samples
    dump(out, cfg.out)
    return 0 if rep.ok else 1


def cmd_solve(cfg: RunConfig, args) -> int:
    from .mcsolve import Obstructed, solve_point_like
    alg = load(cfg)
    try:
        a = parse_coeff(args.integral, alg.tower)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    try:
        rep = solve_point_like(alg, a, "real" if cfg.real else "plain", cfg.pivot, unit_pair=args.unit_pair)
    except Obstructed as exc:
        dump(exc.to_json(), cfg.out)
        return 1
    out = rep.to_json()
    out["model"] = alg.name
    dump(out, cfg.out)
    return 0 if rep.check.ok else 1


def cmd_spectral(cfg: RunConfig, args) -> int:
    from .spectral import page, theorem_oracle, twisted_complex
    alg = load(cfg)
    try:
        b = parse_element(args.b, alg)
    except ParseError as exc:
        raise UsageError(str(exc)) from None
    fc = twisted_complex(alg, b)
    pages = [page(fc, r).to_json(fc) for r in range(args.pages + 1)]
    out = {"model": alg.name, "b": format_element(b), "pages": pages}
    status = 0
    if args.oracle:
        orc = theorem_oracle(alg, b)
        out["oracle"] = orc
        status = 0 if orc["ok"] else 1
    dump(out, cfg.out)
    return status


def _parse_extract(text: str) -> dict:
    """beta=[1,0],k=3,t=[0,2] -> dict."""
    out = {"beta": None, "k": 0, "t": []}
    depth, cur, parts = 0, "", []
    for ch in text:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch == "," and depth == 0:
            parts.append(cur)
            cur = ""
        else:
            cur += ch
    if cur:
        parts.append(cur)
    for part in parts:
        if "=" not in part:
            raise UsageError(f"bad --extract field {part!r}")
        key, val = (x.strip() for x in part.split("=", 1))
        if key not in out:
            raise UsageError(f"unknown --extract key {key!r}")
        out[key] = json.loads(val)
    if out["beta"] is None:
        raise UsageError("--extract needs beta=[...]")
    return out


def cmd_superpotential(cfg: RunConfig, args) -> int:
    from .algebra import Element
    from .invariants import ogw_extract, superpotential
    from .deform import NotBounding
    alg = load(cfg)
    if args.b_from:
        data = json.loads(Path(args.b_from).read_text())
        if data.get("status") != "ok":
            raise UsageError("--b-from report does not hold a bounding pair")
        b = Element.from_json(alg.tower, alg.basis, data["b"])
    elif args.b:
        b = parse_element(args.b, alg)
    else:
        raise UsageError("give --b-from or --b")
    try:
        omega = superpotential(alg, b)
    except NotBounding as exc:
        dump({"status": "not_bounding", "detail": str(exc)}, cfg.out)
        return 1
    out = {"status": "ok", "model": alg.name, "b": format_element(b), "omega": omega.to_json()}
    if args.extract:
        ex = _parse_extract(args.extract)
        val = ogw_extract(omega, ex["beta"], int(ex["k"]), list(ex["t"]))
        out["extract"] = {"beta": ex["beta"], "k": ex["k"], "t": ex["t"], "value": val}
    dump(out, cfg.out)
    return 0


def cmd_write_models(cfg: RunConfig, args) -> int:
    from .models import write_models
    dump(write_models(args.dir), cfg.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ainfty", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="subcommand", required=True)

    def common(p, model=True):
        if model:
            p.add_argument("--model", required=True)
        p.add_argument("--emax", type=str, default=None)
        p.add_argument("--smax", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--pivot", default="lex")
        return p

    p = common(sub.add_parser("check-axioms", help="verify the ten properties"))
    p.add_argument("--extended", action="store_true")
    p = common(sub.add_parser("extend", help="check the (S,F)-extended operations"))
    p.add_argument("--arity", type=int, default=None)
    p = common(sub.add_parser("solve-mc", help="solve for a bounding cochain"))
    p.add_argument("--integral", required=True)
    p.add_argument("--real", action="store_true")
    p.add_argument("--unit-pair", action="store_true")
    p = common(sub.add_parser("spectral", help="pages of the twisted complex"))
    p.add_argument("--b", required=True)
    p.add_argument("--pages", type=int, default=3)
    p.add_argument("--oracle", action="store_true")
    p = common(sub.add_parser("superpotential", help="superpotential and coefficient extraction"))
    p.add_argument("--b-from", default=None)
    p.add_argument("--b", default=None)
    p.add_argument("--extract", default=None)
    p = common(sub.add_parser("write-models", help="regenerate the model files"), model=False)
    p.add_argument("--dir", default="models")
    return ap


COMMANDS = {"check-axioms": cmd_check, "extend": cmd_extend, "solve-mc": cmd_solve, "spectral": cmd_spectral,
            "superpotential": cmd_superpotential, "write-models": cmd_write_models}


def run(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = RunConfig(args.subcommand, getattr(args, "model", ""),
                        frac(args.emax) if args.emax is not None else None, args.smax,
                        getattr(args, "real", False), args.out, args.pivot)
        cfg.validate()
        return COMMANDS[args.subcommand](cfg, args)
    except (UsageError, ParseError, ValueError) as exc:
        if isinstance(exc, BadModel):
            print(f"error: {exc}", file=sys.stderr)
            return 1
        print(f"usage error: {exc}", file=sys.stderr)
        return 2


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
