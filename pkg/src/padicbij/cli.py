"""Command line: run scripts, evaluate and verify serialized pipelines.

Exit codes: 0 success, 1 a verification failed, 2 parse error,
3 precondition violated (bad input, point outside a domain),
4 not enough p-adic precision.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .atlas import BACKWARD, DEFAULT_PRECISION, FORWARD, DomainError, apply_pipeline
from .classify import FinitePoints, classify_to_Kd
from .dsl import Command, Script, parse_dsl
from .lexer import ParseError
from .padic import PrecisionError
from .pipetext import format_pipeline, format_point, parse_pipeline, parse_point
from .rectilinear import FormError, descriptor_prime, rectilinearize
from .sets import dimension_of
from .verify import CheckResult, ResidueWindow, check_bijection, check_finite, check_partition

EXIT_OK, EXIT_VERIFY, EXIT_PARSE, EXIT_PRECONDITION, EXIT_PRECISION = 0, 1, 2, 3, 4
PART_WARNING = 10 ** 4
DEFAULT_SAMPLES, DEFAULT_SEED, DEFAULT_MODULUS = 1000, 0, 2


class PreconditionError(ValueError):
    pass


def _window(M: int) -> ResidueWindow:
    return ResidueWindow(M, 0, M - 1, 0)


class Runner:
    def __init__(self, script: Script, args, out=sys.stdout, err=sys.stderr):
        self.script, self.args, self.out, self.err = script, args, out, err
        self.failed = False
        self.p = args.prime or script.prime

    def emit(self, line: str = ""):
        print(line, file=self.out)

    def setting(self, cmd: Command, key: str, default: int) -> int:
        flag = getattr(self.args, key, None)
        return flag if flag is not None else cmd.option(key, default)

    def prime_for(self, X) -> int:
        p = self.p or descriptor_prime(X)
        if p is None:
            raise PreconditionError("no prime declared")
        return p

    def run(self) -> int:
        classifies = [c for c in self.script.commands if c.kind == "classify"]
        if self.args.out and len(classifies) > 1 and "{name}" not in self.args.out:
            raise PreconditionError("several classify commands: put {name} in --out")
        for cmd in self.script.commands:
            getattr(self, "do_" + cmd.kind)(cmd)
        return EXIT_VERIFY if self.failed else EXIT_OK

    def do_dim(self, cmd: Command):
        self.emit(f"dim {cmd.target} = {dimension_of(self.script.set_named(cmd.target))}")

    def do_classify(self, cmd: Command):
        X = self.script.set_named(cmd.target)
        p = self.prime_for(X)
        C = classify_to_Kd(X, p)
        if isinstance(C, FinitePoints):
            text = f"points {len(C.points)}\n" + "".join(format_point(x) + "\n" for x in C.points)
        else:
            text = format_pipeline(C, p)
        self.emit(f"classify {cmd.target}")
        self.out.write(text)
        if self.args.out:
            Path(self.args.out.replace("{name}", cmd.target)).write_text(text)

    def _parts(self, X, forms, p):
        parts = rectilinearize(X, forms, p)
        if len(parts) > PART_WARNING:
            print(f"warning: {len(parts)} parts emitted", file=self.err)
        return parts

    def do_rectilinearize(self, cmd: Command):
        X = self.script.set_named(cmd.target)
        forms = tuple(self.script.form_named(f) for f in cmd.forms)
        p = self.prime_for(X)
        parts = self._parts(X, forms, p)
        self.emit(f"rectilinearize {cmd.target} parts={len(parts)}")
        for i, part in enumerate(parts):
            fs = " ".join(f"(e={f.e}, beta={f.beta!r}, mu={list(f.mu)})" for f in part.forms)
            line = f"part {i}: R^({part.box.k})^{part.box.l} steps={len(part.pipeline.steps)}"
            self.emit(line + (f" forms {fs}" if fs else ""))

    def do_verify(self, cmd: Command):
        X = self.script.set_named(cmd.target)
        p = self.prime_for(X)
        samples = self.setting(cmd, "samples", DEFAULT_SAMPLES)
        seed = self.setting(cmd, "seed", DEFAULT_SEED)
        W = _window(self.setting(cmd, "modulus", DEFAULT_MODULUS))
        d = dimension_of(X)
        self.emit(f"verify {cmd.target} dim={d} samples={samples} seed={seed} modulus={W.M}")
        if d < 0:
            self.emit("empty set: nothing to verify")
            return
        results = []
        C = classify_to_Kd(X, p)
        if isinstance(C, FinitePoints):
            results.append(check_finite(X, C.points, W, p, name=f"{cmd.target}/points"))
        else:
            parts = self._parts(X, (), p)
            results.append(check_partition(X, [r.part for r in parts], W, p, seed=seed,
                                           name=f"{cmd.target}/partition"))
            results.append(_parts_bijection(parts, samples, seed, f"{cmd.target}/parts", p))
            results.append(check_bijection(C, samples, seed, f"{cmd.target}/classify", p=p))
        for r in results:
            self.emit(r.line())
            self.failed |= not r.passed


def _parts_bijection(parts, samples, seed, name, p) -> CheckResult:
    """One report line for all parts: the first failure, or the total count."""
    checked = 0
    for i, r in enumerate(parts):
        res = check_bijection(r.pipeline, samples, seed, f"{name}{i}", p=p)
        checked += res.checked
        if not res.passed:
            return CheckResult(name, False, checked, f"part {i}: {res.detail}")
    return CheckResult(name, True, checked, f"parts={len(parts)}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise PreconditionError(str(e)) from e


def cmd_run(args, out, err) -> int:
    script = parse_dsl(_read(args.script), args.prime)
    return Runner(script, args, out, err).run()


def cmd_eval(args, out, err) -> int:
    P, p = parse_pipeline(_read(args.pipeline))
    if args.prime and args.prime != p:
        raise PreconditionError(f"pipeline is over p={p}, not {args.prime}")
    x = parse_point(args.point, p)
    y = apply_pipeline(P, BACKWARD if args.backward else FORWARD, x,
                       args.precision or DEFAULT_PRECISION)
    print(format_point(y), file=out)
    return EXIT_OK


def cmd_verify(args, out, err) -> int:
    P, p = parse_pipeline(_read(args.pipeline))
    if P.source is None or P.target is None:
        raise PreconditionError("pipeline needs a source and a target to verify")
    r = check_bijection(P, args.samples if args.samples is not None else DEFAULT_SAMPLES,
                        args.seed if args.seed is not None else DEFAULT_SEED, "pipeline", p=p)
    print(r.line(), file=out)
    return EXIT_OK if r.passed else EXIT_VERIFY


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="padicbij", description=__doc__.splitlines()[0])
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--prime", type=int, help="override the declared prime")
    common.add_argument("--precision", type=int, help=f"digits (default {DEFAULT_PRECISION})")
    common.add_argument("--samples", type=int, help=f"samples per check (default {DEFAULT_SAMPLES})")
    common.add_argument("--seed", type=int, help=f"random seed (default {DEFAULT_SEED})")
    common.add_argument("--modulus", type=int,
                        help=f"M for residue oracles mod p^M (default {DEFAULT_MODULUS})")
    common.add_argument("--out", help="file for classify pipelines ({name} is replaced)")
    sub = ap.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", parents=[common], help="execute a script")
    r.add_argument("script")
    r.set_defaults(func=cmd_run)
    e = sub.add_parser("eval", parents=[common], help="apply a serialized pipeline")
    e.add_argument("pipeline")
    e.add_argument("point", help="e.g. '(1, 1/5)', '([1,2]@-1)' or '0:(3)'")
    e.add_argument("--backward", action="store_true")
    e.set_defaults(func=cmd_eval)
    v = sub.add_parser("verify", parents=[common], help="check a serialized pipeline")
    v.add_argument("pipeline")
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    args = build_parser().parse_args(argv)
    try:
        return args.func(args, out, err)
    except ParseError as e:
        print(f"parse error: {e}", file=err)
        return EXIT_PARSE
    except PrecisionError as e:
        print(f"precision error: {e}", file=err)
        return EXIT_PRECISION
    except (PreconditionError, DomainError, FormError, ValueError, KeyError) as e:
        print(f"precondition failed: {e}", file=err)
        return EXIT_PRECONDITION


if __name__ == "__main__":
    sys.exit(main())
