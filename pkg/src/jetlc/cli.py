"""Command line entry point: ``verify``, ``eval`` and ``invariants``.

Exit codes: 0 success, 1 a check failed, 2 bad input (config, point, vectors,
form name).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import charforms as CF
from . import invariant_theory as INV
from . import scalar_expr as S
from . import suites
from .errors import JetError
from .forms import MatrixForm
from .geometry import build_context

FORMS = ("theta", "vartheta", "omega_hor", "omega", "curvature", "p_k", "euler_pf")
SPACES = {"E": INV.module_E, "V3": lambda n: INV.tensor_power(n, 3), "V4": lambda n: INV.tensor_power(n, 4)}

EXIT_OK, EXIT_FAIL, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


def _load_json(path: str, what: str):
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise InputError(f"{what} file not found: {path}")
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read {what} file {path}: {exc}")


# ---------------------------------------------------------------------------
# verify


def cmd_verify(args) -> int:
    cfg = suites.SuiteConfig.from_json(_load_json(args.config, "config"))
    if args.dim is not None:
        if args.dim not in S.SUPPORTED_DIMENSIONS:
            raise InputError(f"--dim must be one of {list(S.SUPPORTED_DIMENSIONS)}")
        cfg.dimensions = [args.dim]
    if args.seed is not None:
        cfg.seed = args.seed
    if args.out is not None:
        cfg.out = args.out
    results = suites.run(cfg)
    report = suites.report_json(cfg, results)
    out = Path(cfg.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text(suites.dumps(report))
    out.with_suffix(".md").write_text(suites.report_markdown(report))
    summ = report["summary"]
    print(f"{summ['passed']}/{summ['total']} checks passed; report written to {out}")
    failed = [c for c in report["checks"] if c["status"] == "fail"]
    for c in failed:
        print(f"FAIL [{c['suite']} n={c['dimension']}] {c['name']}")
        print("  witness: " + json.dumps(c["witness"], sort_keys=True))
    return EXIT_FAIL if failed else EXIT_OK


# ---------------------------------------------------------------------------
# eval


def load_point(data) -> S.JetPoint:
    """``{"dimension": n, "values": {...}}``; ``"base": "normal"`` fills unset coordinates from the normal point."""
    if not isinstance(data, dict) or "dimension" not in data:
        raise InputError("point file must be an object with a 'dimension' field")
    n = data["dimension"]
    if n not in S.SUPPORTED_DIMENSIONS:
        raise InputError(f"dimension must be one of {list(S.SUPPORTED_DIMENSIONS)}")
    values = data.get("values", {})
    base = data.get("base")
    try:
        parsed = {_coordinate(k, n): S.Q(v) for k, v in values.items()}
    except (KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad point value: {exc}")
    if base == "normal":
        full = dict(S.normal_point(n).values)
        full.update(parsed)
    elif base is None:
        missing = [c.name for c in S.coordinates(n) if c not in parsed]
        if missing:
            raise InputError(f"point is missing coordinates {missing[:5]}...; set \"base\": \"normal\" to fill them")
        full = parsed
    else:
        raise InputError(f"unknown base {base!r}")
    return S.JetPoint(n, full)


def load_vectors(data, n: int) -> list[dict]:
    if not isinstance(data, list):
        raise InputError("vectors file must be a JSON list of {coordinate: value} objects")
    try:
        return [{_coordinate(k, n): S.Q(v) for k, v in vec.items()} for vec in data]
    except (AttributeError, KeyError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise InputError(f"bad tangent vector: {exc}")


def _coordinate(name: str, n: int) -> S.JetCoordinate:
    c = S.parse_coordinate(name)
    if c not in set(S.coordinates(n)):
        raise ValueError(f"{name!r} is not a coordinate of J^1 in dimension {n}")
    return c


def _fr(v) -> str:
    return S.fraction_str(v)


def evaluate_named(form: str, point: S.JetPoint, vectors: list[dict], k: int = 1) -> dict:
    n = point.n
    ctx = build_context(n)
    ev = S.Evaluator(point.values)
    out = {"form": form, "dimension": n, "point": point.to_json(),
           "vectors": [{c.name: _fr(v) for c, v in sorted(vec.items())} for vec in vectors]}
    if form in ("theta", "vartheta", "omega_hor", "omega", "curvature"):
        m: MatrixForm = getattr(ctx, form)
        _need(len(vectors), m.degree, form)
        at = m.at(ev)
        out["degree"] = m.degree
        out["value"] = [[_fr(f.evaluate(None, vectors)) for f in row] for row in at.entries]
        out["components"] = at.to_json()
    elif form == "p_k":
        if not 1 <= k <= n // 2:
            raise InputError(f"k must lie in 1..{n // 2} for n = {n}")
        _need(len(vectors), 4 * k, form)
        out.update(k=k, degree=4 * k, two_pi_power=-2 * k)
        out["value"] = _fr(CF.pontryagin_value(ctx, k, point.values, vectors))
        if n == 2:
            out["components"] = CF.pontryagin(ctx, k).rational_part.at(ev).to_json()
    elif form == "euler_pf":
        if n % 2:
            raise InputError("the Euler form needs even dimension")
        _need(len(vectors), n, form)
        pf = CF.pf_flat_value(ctx, point.values, vectors)
        det = S.det_exact(point.metric())
        out.update(degree=n, two_pi_power=-(n // 2), det_g=_fr(det), det_g_power="-1/2")
        out["pf_flat"] = _fr(pf)
        out["meaning"] = "value = (2 pi)^two_pi_power * det_g^(-1/2) * pf_flat"
        if n == 2:
            out["components"] = CF.euler(ctx).pf_flat.at(ev).to_json()
    else:
        raise InputError(f"unknown form {form!r}; choose from {list(FORMS)}")
    return out


def _need(have: int, want: int, form: str):
    if have != want:
        raise InputError(f"{form} has degree {want}; got {have} tangent vectors")


def _form_name(s: str) -> tuple[str, int]:
    """``p_k``, ``p_1``, ``p_2`` or a name from FORMS."""
    if s.startswith("p_") and s[2:].isdigit():
        return "p_k", int(s[2:])
    if s not in FORMS:
        raise InputError(f"unknown form {s!r}; choose from {list(FORMS)}")
    return s, 1


def cmd_eval(args) -> int:
    form, k = _form_name(args.form)
    if args.k is not None:
        k = args.k
    point = load_point(_load_json(args.point, "point"))
    vectors = load_vectors(_load_json(args.vectors, "vectors"), point.n)
    print(json.dumps(evaluate_named(form, point, vectors, k), indent=2, sort_keys=True))
    return EXIT_OK


# ---------------------------------------------------------------------------
# invariants


def invariants_report(n: int, group: str, space: str = "E", seed: int = 0) -> tuple[dict, bool]:
    spec = SPACES[space](n)
    rep = INV.quartic_invariants(n, group) if space == "V4" else INV.invariant_subspace(spec, group)
    out = rep.to_json()
    ok = rep.residual_zero
    if space == "E":
        m = INV.match_theta_trace_basis(n, seed)
        out["theta_trace_basis"] = m.to_json()
        if group == "O":
            ok = ok and m.passed
    return out, ok


def cmd_invariants(args) -> int:
    if args.dim not in S.SUPPORTED_DIMENSIONS:
        raise InputError(f"--dim must be one of {list(S.SUPPORTED_DIMENSIONS)}")
    out, ok = invariants_report(args.dim, args.group, args.space, args.seed)
    print(json.dumps(out, indent=2, sort_keys=True))
    return EXIT_OK if ok else EXIT_FAIL


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="jetlc", description="Exact checks for the universal Levi-Civita connection on J^1 of metrics.")
    p.add_argument("-v", "--verbose", action="store_true", help="log suite progress to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the verification suites and write a report")
    v.add_argument("--config", required=True)
    v.add_argument("--dim", type=int)
    v.add_argument("--seed", type=int)
    v.add_argument("--out", help="JSON report path; the markdown report goes next to it")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("eval", help="evaluate a universal form at a jet point on tangent vectors")
    e.add_argument("form", help=f"one of {', '.join(FORMS)} (p_1, p_2 also accepted)")
    e.add_argument("--point", required=True)
    e.add_argument("--vectors", required=True)
    e.add_argument("--k", type=int, help="index for p_k (default 1)")
    e.set_defaults(func=cmd_eval)

    i = sub.add_parser("invariants", help="invariant subspace of a tensor space")
    i.add_argument("--dim", type=int, required=True)
    i.add_argument("--group", choices=("O", "SO"), required=True)
    i.add_argument("--space", choices=tuple(SPACES), default="E")
    i.add_argument("--seed", type=int, default=0)
    i.set_defaults(func=cmd_invariants)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s", stream=sys.stderr)
    try:
        return args.func(args)
    except (InputError, suites.ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except JetError as exc:
        # invalid point (not positive definite), degree mismatch and the like
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
