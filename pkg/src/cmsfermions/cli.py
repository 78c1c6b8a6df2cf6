"""Command-line front end.

Every command prints (or writes to ``--output``) a JSON document
``{"command", "spec", "params", "records"}``; ``--format csv`` writes the
records as a table instead.  Exit status: 0 success, 1 computation
failure or failed verification, 2 invalid request.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import jack, kernels, wavefunctions
from .potentials import Kind, PotentialSpec
from .quadrature import QuadratureSpec

COMMANDS = (
    "verify-dixon",
    "verify-kernel-pde",
    "psi-eval",
    "smatrix",
    "bethe",
    "jack-compute",
    "jack-verify",
    "ortho-check",
)


class RequestError(ValueError):
    """Invalid command-line request (exit status 2)."""


class VerificationFailed(RuntimeError):
    """A verification command ran but its check did not hold (exit status 1)."""


@dataclass(frozen=True)
class RunRequest:
    command: str
    spec: PotentialSpec | None
    params: dict = field(default_factory=dict)
    quad: QuadratureSpec = field(default_factory=QuadratureSpec)
    output: str | None = None
    format: str = "json"

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise RequestError(f"unknown command {self.command!r}")
        if self.format not in ("json", "csv"):
            raise RequestError("format must be json or csv")


# ------------------------------------------------------------ serialization


def _plain(obj):
    if isinstance(obj, (bool, type(None), str, int)):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, (float, np.floating)):
        return float(obj)
    if isinstance(obj, (complex, np.complexfloating)):
        return {"re": float(obj.real), "im": float(obj.imag)}
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, np.ndarray)):
        return [_plain(v) for v in obj]
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _encode(obj) -> str:
    # json.dumps cannot fix the float format, so floats are written here
    if isinstance(obj, float):
        return format(obj, ".17g") if math.isfinite(obj) else "null"
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_encode(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, list):
        return "[" + ", ".join(_encode(v) for v in obj) + "]"
    return json.dumps(obj)


def to_json(document: dict) -> str:
    return _encode(_plain(document)) + "\n"


def _flatten(record: dict, prefix: str = "") -> dict:
    flat = {}
    for key, value in record.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(_flatten(value, name + "_"))
        elif isinstance(value, list):
            flat[name] = " ".join(_csv_cell(v) for v in value)
        else:
            flat[name] = value
    return flat


def _csv_cell(value) -> str:
    if isinstance(value, float):
        return format(value, ".15g") if math.isfinite(value) else "nan"
    if isinstance(value, dict):
        return "(" + " ".join(_csv_cell(v) for v in value.values()) + ")"
    if value is None:
        return ""
    return str(value)


def to_csv(document: dict) -> str:
    rows = [_flatten(r) for r in _plain(document["records"])]
    header = []
    for row in rows:
        header.extend(k for k in row if k not in header)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(row.get(k)) for k in header])
    return buf.getvalue()


# ---------------------------------------------------------------- commands


def _floats(text, name):
    if text is None:
        return None
    try:
        return [float(v) for v in str(text).replace(",", " ").split()]
    except ValueError as exc:
        raise RequestError(f"--{name} expects comma-separated numbers") from exc


def _require(params, *names):
    for name in names:
        if params.get(name) is None:
            raise RequestError(f"missing --{name.replace('_', '-')}")


def _need_spec(req):
    if req.spec is None:
        raise RequestError("--kind is required for this command")
    return req.spec


def cmd_verify_dixon(req: RunRequest) -> list:
    p = req.params
    _require(p, "n", "lambda")
    N, lam = int(p["n"]), float(p["lambda"])
    if N < 1 or N > 4:
        raise RequestError("--n must be between 1 and 4")
    exact = kernels.dixon_anderson_exact(N, lam)
    if p.get("x"):
        configs = [np.array(sorted(_floats(p["x"], "x"), reverse=True))]
        if len(configs[0]) != N + 1:
            raise RequestError("--x needs n+1 coordinates")
    else:
        rng = np.random.default_rng(int(p.get("seed") or 0))
        configs = [np.sort(rng.uniform(-2, 2, N + 1))[::-1] for _ in range(3)]
    tol = 1e-8 if N <= 2 else 1e-6
    records = []
    for x in configs:
        value = kernels.dixon_anderson_integral(x, lam, req.quad)
        err = abs(value / exact - 1)
        records.append({"n": N, "lambda": lam, "x": list(x), "value": value,
                        "exact": exact, "rel_error": err, "pass": err <= tol})
    return records


def cmd_verify_kernel_pde(req: RunRequest) -> list:
    spec = _need_spec(req)
    p = req.params
    _require(p, "x", "xp", "k")
    x, xp = _floats(p["x"], "x"), _floats(p["xp"], "xp")
    h = float(p.get("h") or 1e-3)
    r1 = kernels.kernel_pde_residual(spec, float(p["k"]), x, xp, h)
    r2 = kernels.kernel_pde_residual(spec, float(p["k"]), x, xp, h / 2)
    ratio = r1 / r2 if r2 > 0 else math.inf
    return [{"k": float(p["k"]), "x": x, "xp": xp, "h": h, "residual": r1,
             "residual_half_h": r2, "ratio": ratio, "pass": r1 <= 1e-4}]


def _states(spec, ks):
    if len(set(ks)) != len(ks):
        raise RequestError("quasimomenta must be distinct")
    return wavefunctions.WaveState(spec, wavefunctions.QuasimomentumSet(tuple(ks)))


def cmd_psi_eval(req: RunRequest) -> list:
    spec = _need_spec(req)
    p = req.params
    _require(p, "ks", "x")
    ks = _floats(p["ks"], "ks")
    state = _states(spec, ks)
    method = "quadrature" if p.get("quadrature") else "auto"
    records = []
    for chunk in str(p["x"]).split(";"):
        x = _floats(chunk, "x")
        if len(x) != len(ks):
            raise RequestError("each --x configuration needs one coordinate per quasimomentum")
        value = wavefunctions.construct_psi(state, np.array(x), req.quad, method=method)
        records.append({"spec": spec.to_dict(), "ks": ks, "x": x,
                        "value_re": value.real, "value_im": value.imag})
    return records


def cmd_smatrix(req: RunRequest) -> list:
    spec = _need_spec(req)
    p = req.params
    _require(p, "kprime")
    if spec.kind not in (Kind.HYPERBOLIC, Kind.MORSE, Kind.DELTA):
        raise RequestError("smatrix needs kind III, IV or V")
    if p.get("numeric") and spec.kind is Kind.DELTA:
        raise RequestError("--numeric needs kind III or IV")
    kp = float(p["kprime"])
    s = wavefunctions.smatrix(spec, kp)
    record = {"kprime": kp, "re": s.real, "im": s.imag, "abs": abs(s)}
    if p.get("numeric"):
        k2 = 0.0
        k1 = 2 * spec.a * kp
        fit = wavefunctions.extract_smatrix_numeric(spec, (k1, k2), float(p.get("ratio") or 1e4), req.quad)
        record.update({"numeric_re": fit["S"].real, "numeric_im": fit["S"].imag,
                       "deviation": abs(fit["S"] - s)})
    return [record]


def cmd_bethe(req: RunRequest) -> list:
    p = req.params
    _require(p, "partition", "lambda")
    L = float(p.get("L") or 2 * math.pi)
    sol = jack.bethe_quasimomenta(jack.Partition.parse(p["partition"]), p["lambda"], L)
    res = jack.bethe_residual(sol)
    record = sol.to_dict()
    record.update({"residual": res["residual"], "convention": res["convention"]})
    return [record]


def cmd_jack_compute(req: RunRequest) -> list:
    p = req.params
    _require(p, "partition", "nvars", "alpha")
    alpha = Fraction(str(p["alpha"]))
    poly = jack.jack_P(jack.Partition.parse(p["partition"]), int(p["nvars"]), alpha)
    return [{"partition": mu, "coefficient": str(c)}
            for mu, c in poly.to_json_dict().items()]


def cmd_jack_verify(req: RunRequest) -> list:
    p = req.params
    _require(p, "partition", "lambda")
    lam = float(p["lambda"])
    parts = jack.Partition.parse(p["partition"]).parts
    if p.get("annihilation"):
        _require(p, "ntarget")
        res = jack.verify_annihilation_integral(parts, len(parts), lam, int(p["ntarget"]))
        rhs = res["rhs"]
        dev = abs(res["lhs"] - rhs) / res["scale"] if np.isfinite(abs(rhs)) else math.nan
        return [{"partition": list(parts), "lambda": lam, "ntarget": int(p["ntarget"]),
                 "lhs": res["lhs"], "rhs": rhs, "scale": res["scale"], "deviation": dev,
                 "pass": bool(dev <= 1e-6)}]
    res = jack.verify_okounkov_recursion(parts, len(parts) - 1, lam, None)
    return [{"partition": list(parts), "lambda": lam, "deviation": res["deviation"],
             "constant": res["constant"], "pass": res["deviation"] <= 1e-8}]


def cmd_ortho_check(req: RunRequest) -> list:
    spec = req.spec or PotentialSpec(Kind.TRIG, lam=float(req.params.get("lambda") or 0.0),
                                     L=2 * math.pi)
    p = req.params
    _require(p, "n", "np")
    res = wavefunctions.orthogonality_check_pbc(spec, (p["n"], p["np"]))
    same = jack.Partition.parse(p["n"]) == jack.Partition.parse(p["np"])
    ok = res.normalized > 0 if same else res.normalized <= 1e-6
    return [{"n": p["n"], "np": p["np"], "overlap": res.overlap, "norm_n": res.norm_a,
             "norm_np": res.norm_b, "normalized": res.normalized, "pass": ok}]


HANDLERS = {
    "verify-dixon": cmd_verify_dixon,
    "verify-kernel-pde": cmd_verify_kernel_pde,
    "psi-eval": cmd_psi_eval,
    "smatrix": cmd_smatrix,
    "bethe": cmd_bethe,
    "jack-compute": cmd_jack_compute,
    "jack-verify": cmd_jack_verify,
    "ortho-check": cmd_ortho_check,
}


# --------------------------------------------------------------- self tests


def _self_test(command: str) -> list:
    """Small invariant suite for the module behind ``command``; returns failures."""
    failures = []

    def check(name, ok):
        if not ok:
            failures.append(name)

    if command in ("verify-dixon", "verify-kernel-pde"):
        check("mu_lambda N=1", abs(kernels.mu_lambda((1.0, 0.0), (0.5,), 1.0) - 0.25) < 1e-14)
        check("dixon N=2", abs(kernels.dixon_anderson_integral((1.0, 0.3, -0.6), 1.0) * 120 - 1) < 1e-10)
        spec = PotentialSpec(Kind.RATIONAL, lam=1.0)
        check("pde kind II", kernels.kernel_pde_residual(spec, 0.9, (1.0, -0.3), (0.2,), 1e-3) < 1e-4)
    elif command in ("psi-eval", "smatrix"):
        spec = PotentialSpec(Kind.DELTA, c=0.7)
        ks, x = (1.3, -0.4), np.array([0.5, -0.2])
        psi = wavefunctions.construct_psi(wavefunctions.WaveState(spec, ks), x)
        check("delta = slater", abs(psi - wavefunctions.slater(ks, x)) < 1e-8)
        s = wavefunctions.smatrix(PotentialSpec(Kind.HYPERBOLIC, lam=1.0), 0.8)
        check("S lambda=1", abs(s + (1 + 0.8j) / (1 - 0.8j)) < 1e-10)
        check("S unitary", abs(abs(wavefunctions.smatrix(PotentialSpec(Kind.MORSE, lam=0.5), 0.6)) - 1) < 1e-10)
    elif command == "bethe":
        for lam in (0, 1, 2):
            sol = jack.bethe_quasimomenta(jack.Partition((3, 1, 1, 0)), lam, 2 * math.pi)
            check(f"bethe lambda={lam}", jack.bethe_residual(sol)["residual"] == 0)
    elif command in ("jack-compute", "jack-verify"):
        p2 = jack.jack_P((2,), 2, Fraction(1, 3))
        check("P2 m11", p2.coefficient((1, 1)) == Fraction(2, 1 + Fraction(1, 3)))
        check("okounkov", jack.verify_okounkov_recursion((2, 1, 0), 2, 1, points=2)["deviation"] < 1e-8)
    elif command == "ortho-check":
        spec = PotentialSpec(Kind.TRIG, lam=1.0, L=2 * math.pi)
        check("orthogonal", wavefunctions.orthogonality_check_pbc(spec, ((1, 0), (2, 0)), grid=32).normalized < 1e-6)
    return failures


# --------------------------------------------------------------------- main


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("interaction and quadrature")
    g.add_argument("--kind", help="I, II, III, IV or V")
    g.add_argument("--lambda", dest="lam", type=float, help="coupling (> -1)")
    g.add_argument("--a", type=float, default=1.0)
    g.add_argument("--b", type=float)
    g.add_argument("--c", type=float, default=0.0)
    g.add_argument("--L", type=float)
    g.add_argument("--bc", choices=["SBC", "PBC", "sbc", "pbc"])
    g.add_argument("--nodes", type=int, default=24)
    g.add_argument("--scheme", default="gauss-jacobi")
    g.add_argument("--rel-tol", type=float, default=1e-10)
    g.add_argument("--output", help="write here instead of stdout")
    g.add_argument("--format", choices=["json", "csv"], default="json")
    g.add_argument("--self-test", action="store_true", help="run the invariant suite instead")

    parser = argparse.ArgumentParser(prog="cmsfermions", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    extra = {
        "verify-dixon": [("--n", int), ("--x", str), ("--seed", int)],
        "verify-kernel-pde": [("--k", float), ("--x", str), ("--xp", str), ("--h", float)],
        "psi-eval": [("--ks", str), ("--x", str), ("--quadrature", "flag")],
        "smatrix": [("--kprime", float), ("--numeric", "flag"), ("--ratio", float)],
        "bethe": [("--partition", str)],
        "jack-compute": [("--partition", str), ("--nvars", int), ("--alpha", str)],
        "jack-verify": [("--partition", str), ("--annihilation", "flag"), ("--ntarget", int)],
        "ortho-check": [("--n", str), ("--np", str)],
    }
    for name in COMMANDS:
        sp = sub.add_parser(name, parents=[common])
        for flag, typ in extra[name]:
            if typ == "flag":
                sp.add_argument(flag, action="store_true")
            else:
                sp.add_argument(flag, type=typ)
    return parser


_SPEC_FREE = ("verify-dixon", "bethe", "jack-compute", "jack-verify")


def request_from_args(args) -> RunRequest:
    spec = None
    if args.kind is not None and args.command not in _SPEC_FREE:
        spec = PotentialSpec(kind=args.kind, lam=args.lam or 0.0, a=args.a, b=args.b,
                             c=args.c, L=args.L, bc=args.bc)
    quad = QuadratureSpec(scheme=args.scheme, nodes_per_dim=args.nodes, rel_tol=args.rel_tol,
                          max_nodes=max(192, args.nodes))
    skip = {"command", "kind", "a", "b", "c", "bc", "nodes", "scheme", "rel_tol",
            "output", "format", "self_test"}
    params = {("lambda" if k == "lam" else k): v for k, v in vars(args).items() if k not in skip}
    return RunRequest(args.command, spec, params, quad, args.output, args.format)


def run(req: RunRequest) -> int:
    records = HANDLERS[req.command](req)
    document = {
        "command": req.command,
        "spec": req.spec.to_dict() if req.spec else None,
        "params": {k: v for k, v in req.params.items() if v not in (None, False)},
        "records": records,
    }
    text = to_json(document) if req.format == "json" else to_csv(document)
    if req.output:
        with open(req.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if any(r.get("pass") is False for r in records):
        raise VerificationFailed("verification failed")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.self_test:
            failures = _self_test(args.command)
            for name in failures:
                print(f"FAIL {name}", file=sys.stderr)
            print("self-test " + ("failed" if failures else "passed"), file=sys.stderr)
            return 1 if failures else 0
        req = request_from_args(args)
    except (RequestError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    try:
        return run(req)
    except RequestError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except VerificationFailed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # noqa: BLE001 - any numerical failure maps to status 1
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
