"""Command-line interface.

Exit codes: 0 success, 1 oracle violation, 2 parse error, 3 invalid state,
4 dimension or parameter error. Data goes to stdout, diagnostics to stderr.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from typing import Any

import numpy as np

from . import applications as apps
from .correlation_set import (
    MEMBERSHIP_TOL,
    StateFamily,
    Tag,
    boundary_correlation,
    ellipsoid_spec,
    extremal_test,
    gram_matrix,
    membership,
    pinv_quadratic_form,
    rank_diagnostics,
    sample_boundary,
    support_value,
)
from .errors import DegenerateDirection, DimensionMismatch, InvalidState, NonHermitianInput
from .oracle import ORACLE_TOL, empirical_support, validate_inclusion
from .qubit_algebra import QubitState
from .spectral import RANK_TOL

SCHEMA_VERSION = "1"
TRACE_POINTS = 256

EXIT_OK, EXIT_VIOLATION, EXIT_PARSE, EXIT_STATE, EXIT_DIMENSION = 0, 1, 2, 3, 4


class ParseError(Exception):
    pass


class ParameterError(Exception):
    pass


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------


def _plain(obj: Any) -> Any:
    if isinstance(obj, np.ndarray):
        return [_plain(x) for x in obj.tolist()]
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(x) for x in obj]
    return obj


def dumps(obj: Any, indent: int = 2) -> str:
    """JSON text with every float written to 17 significant digits."""

    def enc(o, level):
        pad = " " * (indent * (level + 1))
        end = " " * (indent * level)
        if isinstance(o, bool) or o is None or isinstance(o, str):
            return json.dumps(o)
        if isinstance(o, int):
            return str(o)
        if isinstance(o, float):
            if not math.isfinite(o):
                raise ValueError(f"cannot serialize non-finite float {o}")
            text = format(o, ".17g")
            return text if any(ch in text for ch in ".en") else text + ".0"
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = [f"{pad}{json.dumps(k)}: {enc(v, level + 1)}" for k, v in o.items()]
            return "{\n" + ",\n".join(items) + "\n" + end + "}"
        if isinstance(o, list):
            if not o:
                return "[]"
            if all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in o):
                return "[" + ", ".join(enc(x, level + 1) for x in o) + "]"
            return "[\n" + ",\n".join(pad + enc(x, level + 1) for x in o) + "\n" + end + "]"
        raise TypeError(f"cannot serialize {type(o).__name__}")

    return enc(_plain(obj), 0)


def document(command: str, args: dict, payload: dict) -> dict:
    return {"schema_version": SCHEMA_VERSION, "command": {"name": command, "args": args}, **payload}


# ---------------------------------------------------------------------------
# input parsing
# ---------------------------------------------------------------------------


def _load_json(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ParseError(f"{path}: cannot read ({exc.strerror})") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def _numbers(value, n: int, where: str) -> list[float]:
    if not isinstance(value, list) or len(value) != n:
        raise ParseError(f"{where}: expected a list of {n} numbers")
    out = []
    for i, x in enumerate(value):
        if isinstance(x, bool) or not isinstance(x, (int, float)):
            raise ParseError(f"{where}[{i}]: expected a number, got {json.dumps(x)}")
        out.append(float(x))
    return out


def parse_state(entry: Any, where: str) -> QubitState:
    if not isinstance(entry, dict):
        raise ParseError(f"{where}: expected an object with 'bloch' or 'matrix'")
    if "bloch" in entry:
        r = np.array(_numbers(entry["bloch"], 3, f"{where}.bloch"))
        if np.linalg.norm(r) > 1.0 + 1e-10:
            raise InvalidState(f"{where}.bloch: norm {np.linalg.norm(r):.17g} exceeds 1")
        if np.linalg.norm(r) > 1.0:
            r = r / np.linalg.norm(r)
        return QubitState.from_bloch(r)
    if "matrix" in entry:
        rows = entry["matrix"]
        if not isinstance(rows, list) or len(rows) != 2:
            raise ParseError(f"{where}.matrix: expected 2 rows")
        m = np.zeros((2, 2), dtype=complex)
        for i, row in enumerate(rows):
            if not isinstance(row, list) or len(row) != 2:
                raise ParseError(f"{where}.matrix[{i}]: expected 2 entries")
            for j, z in enumerate(row):
                re, im = _numbers(z, 2, f"{where}.matrix[{i}][{j}]")
                m[i, j] = complex(re, im)
        try:
            return QubitState.from_matrix(m)
        except NonHermitianInput as exc:
            raise InvalidState(f"{where}.matrix: {exc}") from exc
        except InvalidState as exc:
            raise InvalidState(f"{where}.matrix: {exc}") from exc
    raise ParseError(f"{where}: expected key 'bloch' or 'matrix'")


def load_family(path: str, rank_tol: float = RANK_TOL) -> StateFamily:
    doc = _load_json(path)
    if not isinstance(doc, dict) or "states" not in doc:
        raise ParseError(f"{path}: top-level object must have a 'states' list")
    entries = doc["states"]
    if not isinstance(entries, list) or not entries:
        raise ParseError(f"{path}: 'states' must be a non-empty list")
    states = tuple(parse_state(e, f"states[{i}]") for i, e in enumerate(entries))
    return StateFamily(states, rank_tol)


def family_document(family: StateFamily) -> dict:
    return {"states": [{"bloch": st.bloch} for st in family.states]}


def load_correlations(path: str, m: int) -> np.ndarray:
    doc = _load_json(path)
    if isinstance(doc, dict):
        doc = doc.get("correlations")
    if not isinstance(doc, list) or not doc:
        raise ParseError(f"{path}: expected a non-empty list of correlation vectors")
    rows = []
    for i, row in enumerate(doc):
        if not isinstance(row, list):
            raise ParseError(f"correlations[{i}]: expected a list")
        if len(row) != m:
            raise DimensionMismatch(f"correlations[{i}]: {len(row)} entries, family has {m} states")
        rows.append(_numbers(row, m, f"correlations[{i}]"))
    return np.array(rows)


def parse_direction(text: str, m: int) -> np.ndarray:
    try:
        w = np.array([float(x) for x in text.split(",")])
    except ValueError as exc:
        raise ParseError(f"--direction: {exc}") from exc
    if w.shape[0] != m:
        raise DimensionMismatch(f"--direction has {w.shape[0]} entries, family has {m} states")
    if not np.all(np.isfinite(w)) or not np.any(w):
        raise ParameterError("--direction must be finite and not all zero")
    return w


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def verdict_document(family: StateFamily, p: np.ndarray, tol: float) -> dict:
    v = membership(family, p, tol)
    out: dict = {"p": p, "verdict": v.tag.value, "gap": v.gap, "c": v.c}
    if v.inside_witness is not None:
        wt = v.inside_witness
        out["certificate"] = {
            "kind": "convex_combination",
            "alpha": wt.alpha,
            "beta": wt.beta,
            "gamma": wt.gamma,
            "e": wt.e,
        }
    elif v.outside_witness is not None:
        out["certificate"] = {
            "kind": "separating_direction",
            "w": v.outside_witness,
            "p_dot_w": float(p @ v.outside_witness),
            "support_value": support_value(family, v.outside_witness),
            "margin": v.margin,
            "verified": v.tag is Tag.OUTSIDE,
        }
    return out


def cmd_characterize(args) -> tuple[dict, int]:
    family = load_family(args.states, args.rank_tol)
    spec = ellipsoid_spec(family)
    diag = rank_diagnostics(family)
    l = diag["independent_states"]
    predicted = l - 1 if diag["identity_in_span"] else l
    payload = {
        "m": family.m,
        "Q": gram_matrix(family),
        "rank": spec.rank,
        "eigenvalues": spec.factorization.eigenvalues,
        "principal_axes": spec.factorization.left.T,
        "center": spec.center,
        "rank_law": {**diag, "predicted_rank": predicted, "holds": predicted == spec.rank},
    }
    return document("characterize", {"states": args.states, "rank_tol": args.rank_tol}, payload), EXIT_OK


def cmd_witness(args) -> tuple[dict, int]:
    family = load_family(args.states, args.rank_tol)
    w = parse_direction(args.direction, family.m)
    test = extremal_test(family, w)
    p = boundary_correlation(family, w)
    wv = support_value(family, w)
    payload = {
        "direction": w,
        "test": {
            "a": test.a,
            "b": test.b,
            "pi0": [[[z.real, z.imag] for z in row] for row in test.matrix()],
            "rank": test.rank,
        },
        "p": p,
        "support_value": wv,
        "attainment_residual": abs(float(p @ w) - wv),
    }
    return document("witness", {"states": args.states, "direction": w}, payload), EXIT_OK


def cmd_test(args) -> tuple[dict, int]:
    family = load_family(args.states, args.rank_tol)
    ps = load_correlations(args.correlations, family.m)
    results = [verdict_document(family, p, args.tol) for p in ps]
    tags = [r["verdict"] for r in results]
    if Tag.OUTSIDE.value in tags:
        conclusion = (
            "outside: at least one correlation is not reachable by the claimed states; "
            "the prepared states are not dominated by the claimed family"
        )
    elif Tag.INCONCLUSIVE.value in tags:
        conclusion = "inconclusive: some correlation could not be certified either way"
    else:
        conclusion = "all inside: no observed correlation refutes the claimed family"
    payload = {
        "results": results,
        "summary": {
            "counts": {t.value: tags.count(t.value) for t in Tag},
            "conclusion": conclusion,
        },
    }
    return document("test", {"states": args.states, "correlations": args.correlations, "tol": args.tol}, payload), EXIT_OK


def ellipse_trace(family: StateFamily, points: int = TRACE_POINTS) -> np.ndarray:
    """Points ``1/2 u + U diag(sigma) (cos t, sin t)`` on the ellipsoid surface."""
    f = family.factorization
    theta = 2.0 * np.pi * np.arange(points) / points
    circle = np.column_stack([np.cos(theta), np.sin(theta)])[:, : f.rank]
    return 0.5 + (circle * f.sigma) @ f.left.T


def cmd_boundary(args) -> tuple[Any, int]:
    if args.samples < 1:
        raise ParameterError("--samples must be >= 1")
    family = load_family(args.states, args.rank_tol)
    rows = sample_boundary(family, args.samples, args.seed)
    m = family.m
    if args.format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow([f"w_{i}" for i in range(m)] + [f"p_{i}" for i in range(m)])
        for w, p in rows:
            writer.writerow([format(float(x), ".17g") for x in np.concatenate([w, p])])
        return buf.getvalue(), EXIT_OK
    payload: dict = {"rows": [{"w": w, "p": p} for w, p in rows]}
    if m == 2:
        payload["ellipse_trace"] = ellipse_trace(family)
    return document("boundary", {"states": args.states, "samples": args.samples, "seed": args.seed}, payload), EXIT_OK


def axis_directions(m: int) -> np.ndarray:
    eye = np.eye(m)
    return np.vstack([eye, -eye, np.ones((1, m)), -np.ones((1, m))])


def cmd_oracle(args) -> tuple[dict, int]:
    if args.samples < 1:
        raise ParameterError("--samples must be >= 1")
    family = load_family(args.states, args.rank_tol)
    report = validate_inclusion(family, args.samples, args.seed, args.tol)
    supports = []
    over = False
    for w in axis_directions(family.m):
        emp = empirical_support(family, w, args.samples, args.seed)
        an = support_value(family, w)
        over |= emp > an + 1e-10
        supports.append({"w": w, "empirical": emp, "analytic": an, "difference": an - emp})
    payload = {
        "samples": report.samples,
        "violations": [
            {"a": t.a, "b": t.b, "p": p, "gap": g} for t, p, g in report.violations
        ],
        "max_gap": report.max_gap,
        "max_projective_norm2": report.max_projective_norm2,
        "support_checks": supports,
        "sound": not report.violations and not over,
    }
    code = EXIT_VIOLATION if (report.violations or over) else EXIT_OK
    return document("oracle", {"states": args.states, "samples": args.samples, "seed": args.seed, "tol": args.tol}, payload), code


def _crosscheck_pair(alpha: float, family: StateFamily, seed: int = 0, n: int = 1000) -> float:
    rng = np.random.default_rng(seed)
    ps = rng.uniform(0.0, 1.0, (n, 2))
    general = 0.5 * pinv_quadratic_form(family.factorization, ps - 0.5)
    closed = np.array([apps.pure_pair_ellipse_lhs(alpha, p) for p in ps])
    return float(np.max(np.abs(general - closed)))


def cmd_apps(args) -> tuple[dict, int]:
    if args.app == "pure-pair":
        alpha = args.alpha
        if not (0.0 <= alpha <= math.pi):
            raise ParameterError(f"--alpha {alpha} outside [0, pi]")
        family = apps.pure_pair_family(alpha)
        payload: dict = {"family": family_document(family), "Q": gram_matrix(family)}
        if 0.0 < alpha < math.pi:
            k_sum, k_diff = apps.pure_pair_ellipse_coefficients(alpha)
            payload["ellipse"] = {"coefficients": [k_sum, k_diff], "bound": 0.5}
            payload["crosscheck_residual"] = _crosscheck_pair(alpha, family)
        else:
            payload["constraint"] = "p0 = p1" if alpha == 0.0 else "p0 + p1 = 1"
        return document("apps", {"app": "pure-pair", "alpha": alpha}, payload), EXIT_OK
    m = args.m
    if m < 2:
        raise ParameterError("--m must be >= 2")
    family = apps.polygon_family(m)
    lam = apps.circulant_eigenvalues(m)
    sig2 = np.sort(family.factorization.eigenvalues)
    nonzero = np.sort(lam.real[np.abs(lam) > 1e-10])
    resid = float(np.max(np.abs(nonzero - sig2))) if nonzero.shape == sig2.shape else math.inf
    payload = {
        "family": family_document(family),
        "spectrum": lam.real,
        "spectrum_imag_max": float(np.max(np.abs(lam.imag))),
        "crosscheck_residual": resid,
        "quadratic_bound": 0.5 if m == 2 else m / 16.0,
    }
    if m == 4:
        payload["constraints"] = {"affine": ["p0 + p2 = 1", "p1 + p3 = 1"], "norm2_max": 1.5}
    return document("apps", {"app": "polygon", "m": m}, payload), EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--rank-tol", type=float, default=RANK_TOL, help="relative singular-value cutoff")

    parser = argparse.ArgumentParser(prog="qubitcorr", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("characterize", parents=[common], help="Gram matrix, rank and ellipsoid axes")
    p.add_argument("states")
    p.set_defaults(func=cmd_characterize)

    p = sub.add_parser("witness", parents=[common], help="extremal test for a direction")
    p.add_argument("states")
    p.add_argument("--direction", required=True, help="comma-separated, e.g. --direction=1,-1")
    p.set_defaults(func=cmd_witness)

    p = sub.add_parser("test", parents=[common], help="membership verdicts for observed correlations")
    p.add_argument("states")
    p.add_argument("correlations")
    p.add_argument("--tol", type=float, default=MEMBERSHIP_TOL)
    p.set_defaults(func=cmd_test)

    p = sub.add_parser("boundary", parents=[common], help="sample extremal correlations")
    p.add_argument("states")
    p.add_argument("--samples", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.set_defaults(func=cmd_boundary)

    p = sub.add_parser("oracle", parents=[common], help="random-test soundness check")
    p.add_argument("states")
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol", type=float, default=ORACLE_TOL)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("apps", help="worked example families")
    app = p.add_subparsers(dest="app", required=True)
    q = app.add_parser("pure-pair")
    q.add_argument("--alpha", type=float, required=True)
    q = app.add_parser("polygon")
    q.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_apps)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        out, code = args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except InvalidState as exc:
        print(f"invalid state: {exc}", file=sys.stderr)
        return EXIT_STATE
    except (DimensionMismatch, ParameterError, DegenerateDirection) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIMENSION
    sys.stdout.write(out if isinstance(out, str) else dumps(out) + "\n")
    return code


if __name__ == "__main__":
    sys.exit(main())
