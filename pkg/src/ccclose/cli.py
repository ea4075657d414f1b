"""Command-line front end.

    ccclose decide   --vars x,y --ideal "x^3,y^3" --candidate "x^2*y^2" [--json]
    ccclose tabulate --vars x,y --ideal "x^2,y^2" --degree-bound 3
    ccclose validate --vars x,y --ideal "x^3,y^3" --candidate "x^2*y^2"
    ccclose verify   verdict.json
    ccclose selftest

Exit status is 0 for decisive verdicts and passing checks, 2 for an
Undetermined verdict, 3 for a failed validation or verification, and 1 for
usage or parse errors. ``CCCLOSE_SEED`` in the environment overrides
``--seed``.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import __version__
from .closure import (IN, OUT, UNDETERMINED, Verdict, decide_membership, tabulate,
                      verify_verdict_document)
from .errors import CCCloseError
from .findet import DEFAULT_SEED
from .poly import LaurentPoly, MonomialIdeal, check_vars, parse_generators, parse_ideal, parse_poly
from .witness import (ValidationConfig, Witness, canonical_witness, displayed_witness,
                      certified_continuous, validate_witness)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_UNDETERMINED = 2
EXIT_FAILED = 3


@dataclass
class RunConfig:
    mode: str
    vars: tuple = ()
    ideal: str = ""
    candidate: str = ""
    seed: int = DEFAULT_SEED
    degree_bound: int = 4
    output: str = "human"
    max_depth: int = 4
    samples: int = 200
    path: str = ""


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; 2 is taken by Undetermined."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        sys.exit(EXIT_USAGE)


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="ccclose", description="Continuous closure of monomial ideals over Q(i).")
    p.add_argument("--version", action="version", version=f"ccclose {__version__}")
    sub = p.add_subparsers(dest="mode", required=True, parser_class=_Parser)

    def common(sp, candidate=True, bound=False):
        sp.add_argument("--vars", required=True, help="comma-separated variable names")
        sp.add_argument("--ideal", required=True, help="comma-separated monomial generators")
        if candidate:
            sp.add_argument("--candidate", required=True, help="polynomial to test")
        if bound:
            sp.add_argument("--degree-bound", type=int, required=True)
        sp.add_argument("--seed", type=int, default=DEFAULT_SEED)
        sp.add_argument("--json", action="store_true", help="emit one JSON document")
        sp.add_argument("--max-depth", type=int, default=4)
        sp.add_argument("--samples", type=int, default=200)

    common(sub.add_parser("decide", help="decide membership in the continuous closure"))
    common(sub.add_parser("tabulate", help="classify all monomials up to a degree"),
           candidate=False, bound=True)
    common(sub.add_parser("validate", help="numerically validate the witness of a member"))
    v = sub.add_parser("verify", help="re-check a JSON verdict or witness document")
    v.add_argument("path", help="JSON file, or - for standard input")
    v.add_argument("--json", action="store_true")
    s = sub.add_parser("selftest", help="run the built-in worked examples")
    s.add_argument("--seed", type=int, default=DEFAULT_SEED)
    s.add_argument("--json", action="store_true")
    s.add_argument("--samples", type=int, default=200)
    return p


def config_from_args(ns, environ=None) -> RunConfig:
    env = os.environ if environ is None else environ
    seed = getattr(ns, "seed", DEFAULT_SEED)
    if env.get("CCCLOSE_SEED"):
        try:
            seed = int(env["CCCLOSE_SEED"])
        except ValueError as exc:
            raise CCCloseError(f"CCCLOSE_SEED is not an integer: {env['CCCLOSE_SEED']!r}") from exc
    vs = ()
    if getattr(ns, "vars", None):
        vs = check_vars([v.strip() for v in ns.vars.split(",")])
    return RunConfig(
        mode=ns.mode,
        vars=vs,
        ideal=getattr(ns, "ideal", "") or "",
        candidate=getattr(ns, "candidate", "") or "",
        seed=seed,
        degree_bound=getattr(ns, "degree_bound", 4) or 0,
        output="json" if ns.json else "human",
        max_depth=getattr(ns, "max_depth", 4),
        samples=getattr(ns, "samples", 200),
        path=getattr(ns, "path", "") or "",
    )


def _problem(cfg: RunConfig):
    gens = parse_generators(cfg.ideal, cfg.vars)
    exps = [next(iter(f.terms)) for f in gens]
    coeffs = [f.terms[a] for f, a in zip(gens, exps)]
    return MonomialIdeal(cfg.vars, exps), exps, coeffs


def _emit(cfg, doc, text, out):
    if cfg.output == "json":
        out.write(json.dumps(doc, sort_keys=True) + "\n")
    else:
        out.write(text.rstrip("\n") + "\n")


def _verdict_text(v: Verdict) -> str:
    lines = [f"{v.g} in {v.ideal}^C: {v.status}"]
    if v.status == OUT:
        c = v.certificate.to_json()
        if c["kind"] == "wronskian":
            lines.append(f"  Wronskian certificate, det = {c['det']}")
        else:
            lines.append(f"  valuation certificate, weight = {c['weight']}")
    elif v.status == IN:
        for i, e in enumerate(v.certificate.exprs()):
            lines.append(f"  phi_{i + 1} = {e}")
    else:
        lines.append(f"  {v.certificate}")
    return "\n".join(lines)


def cmd_decide(cfg: RunConfig, out) -> int:
    I, exps, coeffs = _problem(cfg)
    g = parse_poly(cfg.candidate, cfg.vars)
    v = decide_membership(I, g, exps, coeffs, seed=cfg.seed, max_depth=cfg.max_depth)
    _emit(cfg, v.to_json(), _verdict_text(v), out)
    return EXIT_UNDETERMINED if v.status == UNDETERMINED else EXIT_OK


def cmd_tabulate(cfg: RunConfig, out) -> int:
    I, _, _ = _problem(cfg)
    rows = tabulate(I, cfg.degree_bound, seed=cfg.seed)
    named = [(str(LaurentPoly.monomial(cfg.vars, e)), list(e), s) for e, s in rows]
    doc = {
        "vars": list(cfg.vars),
        "ideal": str(I),
        "degree_bound": cfg.degree_bound,
        "seed": cfg.seed,
        "rows": [{"monomial": m, "exponent": e, "status": s} for m, e, s in named],
        "version": __version__,
    }
    width = max(len(m) for m, _, _ in named)
    text = "\n".join(f"{m:<{width}}  {s}" for m, _, s in named)
    _emit(cfg, doc, text, out)
    return EXIT_UNDETERMINED if any(s == UNDETERMINED for _, _, s in named) else EXIT_OK


def cmd_validate(cfg: RunConfig, out) -> int:
    I, exps, coeffs = _problem(cfg)
    g = parse_poly(cfg.candidate, cfg.vars)
    v = decide_membership(I, g, exps, coeffs, seed=cfg.seed, max_depth=cfg.max_depth)
    if v.status != IN:
        doc = {"status": v.status, "validated": False, "seed": cfg.seed,
               "note": "only members have a witness to validate"}
        _emit(cfg, doc, f"{g}: {v.status}, nothing to validate", out)
        return EXIT_UNDETERMINED if v.status == UNDETERMINED else EXIT_OK
    rep = validate_witness(v.certificate, I, g, ValidationConfig(seed=cfg.seed, n_points=cfg.samples))
    doc = {"status": v.status, "validated": rep.passed, "witness": v.certificate.to_json(),
           "report": rep.to_json(), "seed": cfg.seed}
    text = (f"{g}: {v.status}; residual {rep.residual_max:.3e}; envelopes "
            + " ".join(f"{e:.2e}" for e in rep.envelopes)
            + ("; PASS" if rep.passed else "; FAIL"))
    _emit(cfg, doc, text, out)
    return EXIT_OK if rep.passed else EXIT_FAILED


def verify_document(doc) -> tuple[bool, str]:
    """Verdicts, bare witnesses, and ``validate`` output are all accepted."""
    if "status" in doc and "vars" in doc and "generators" in doc:
        return verify_verdict_document(doc)
    if "witness" in doc and "report" in doc:
        doc = doc["witness"]
    if "algebraic" in doc and "generators" in doc:
        W = Witness.from_json(doc)
        if not W.identity_holds():
            return False, "cleared identity fails"
        exps = [next(iter(f.terms)) for f in W.generators]
        I = MonomialIdeal(W.vars, exps)
        if not certified_continuous(W, I, exps):
            return False, "witness is not of the certified continuous form"
        return True, "identity cleared exactly; continuity certified on the exceptional locus"
    return False, "unrecognised document"


def cmd_verify(cfg: RunConfig, out, stdin=None) -> int:
    if cfg.path == "-":
        text = (stdin or sys.stdin).read()
    else:
        with open(cfg.path, encoding="utf-8") as fh:
            text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CCCloseError(f"not a JSON document: {exc}") from exc
    ok, msg = verify_document(doc)
    _emit(cfg, {"verified": ok, "message": msg}, f"{'OK' if ok else 'FAILED'}: {msg}", out)
    return EXIT_OK if ok else EXIT_FAILED


def selftest_checks(seed=DEFAULT_SEED, samples=200):
    """Worked examples with known answers; each entry is ``(name, ok)``."""
    vs = ("x", "y")
    I = parse_ideal("x^3,y^3", vs)
    checks = []
    v = decide_membership(I, parse_poly("x^2*y^2", vs), seed=seed)
    checks.append(("x^2*y^2 is a member", v.status == IN))
    cfg = ValidationConfig(seed=seed, n_points=samples)
    checks.append(("canonical witness validates",
                   v.status == IN and validate_witness(v.certificate, I, config=cfg).passed))
    Iz = parse_ideal("z1^3,z2^3", ("z1", "z2"))
    checks.append(("displayed witness validates",
                   validate_witness(displayed_witness(), Iz, config=cfg).passed))
    w = decide_membership(I, parse_poly("x*y^2", vs), seed=seed)
    det = w.to_json().get("certificate", {}).get("det")
    checks.append(("x*y^2 refuted with det -22", w.status == OUT and det == "-22/1"))
    checks.append(("certificate re-verifies", verify_verdict_document(w.to_json())[0]))
    u = decide_membership(I, parse_poly("x^2*y", vs), seed=seed)
    checks.append(("x^2*y refuted", u.status == OUT))
    c = canonical_witness(I, parse_poly("x*y^2", vs))
    checks.append(("canonical witness of a non-member fails validation",
                   not validate_witness(c, I, config=cfg).passed))
    return checks


def cmd_selftest(cfg: RunConfig, out) -> int:
    checks = selftest_checks(cfg.seed, cfg.samples)
    ok = all(c for _, c in checks)
    doc = {"checks": [{"name": n, "pass": c} for n, c in checks], "pass": ok, "seed": cfg.seed}
    text = "\n".join(f"{'PASS' if c else 'FAIL'}  {n}" for n, c in checks)
    _emit(cfg, doc, text, out)
    return EXIT_OK if ok else EXIT_FAILED


COMMANDS = {
    "decide": cmd_decide,
    "tabulate": cmd_tabulate,
    "validate": cmd_validate,
    "verify": cmd_verify,
    "selftest": cmd_selftest,
}


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        cfg = config_from_args(ns)
        return COMMANDS[cfg.mode](cfg, out)
    except (CCCloseError, OSError) as exc:
        err.write(f"ccclose: error: {exc}\n")
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
