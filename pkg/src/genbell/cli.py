"""Command-line interface: ``genbell analyze | sweep | oracle``.

Exit codes: 0 analyzed and no violation, 3 violation certified,
1 input error, 2 internal failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time

import numpy as np

from genbell import bellcore, criterion, lhvmodel, qstate
from genbell.corrtensor import MeasurementSettings, compute_tensor, correlation_table
from genbell.optimizer import OptimizeOptions

log = logging.getLogger("genbell")

EXIT_OK = 0
EXIT_INPUT = 1
EXIT_INTERNAL = 2
EXIT_VIOLATED = 3

REPORT_TOL = 1e-9
STATE_KINDS = ("dense", "pure", "ghz", "werner", "product")


class InputError(Exception):
    """Malformed or inconsistent input file."""


def _round(obj):
    if isinstance(obj, float):
        return float(f"{obj:.12g}") if math.isfinite(obj) else obj
    if isinstance(obj, dict):
        return {k: _round(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_round(v) for v in obj]
    return obj


def load_json(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise InputError(f"{path}: cannot read file ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc
    if not isinstance(doc, dict):
        raise InputError(f"{path}: top level must be a JSON object")
    return doc


def _field(doc: dict, name: str, where: str):
    if name not in doc:
        raise InputError(f"{where}: missing field '{name}'")
    return doc[name]


def _n_qubits(doc: dict, where: str, lo: int = 1, hi: int = qstate.MAX_QUBITS) -> int:
    n = _field(doc, "n_qubits", where)
    if not isinstance(n, int) or isinstance(n, bool) or not lo <= n <= hi:
        raise InputError(f"{where}: field 'n_qubits' must be an integer in [{lo}, {hi}]")
    return n


def _array(doc: dict, name: str, shape: tuple, where: str, required: bool = True) -> np.ndarray:
    if name not in doc and not required:
        return np.zeros(shape)
    raw = _field(doc, name, where)
    try:
        arr = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InputError(f"{where}: field '{name}' must be a numeric array") from exc
    if arr.shape != shape:
        raise InputError(f"{where}: field '{name}' has shape {arr.shape}, expected {shape}")
    return arr


def state_from_doc(doc: dict, where: str = "state") -> qstate.DensityMatrix:
    """Build the density matrix described by a state document."""
    kind = _field(doc, "kind", where)
    if kind not in STATE_KINDS:
        raise InputError(f"{where}: field 'kind' must be one of {', '.join(STATE_KINDS)}")
    lo = 2 if kind in ("ghz", "werner") else 1
    n = _n_qubits(doc, where, lo=lo)
    dim = 2 ** n
    if kind == "ghz":
        rho = qstate.make_ghz(n).density_matrix()
    elif kind == "werner":
        v = _field(doc, "v", where)
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not 0 <= v <= 1:
            raise InputError(f"{where}: field 'v' must be a number in [0, 1]")
        rho = qstate.werner(n, float(v))
    elif kind == "pure":
        amp = _array(doc, "re", (dim,), where) + 1j * _array(doc, "im", (dim,), where, False)
        if not np.any(amp):
            raise InputError(f"{where}: amplitude vector is zero")
        rho = qstate.make_pure(amp)
    elif kind == "product":
        bloch = _array(doc, "bloch", (n, 3), where)
        if np.any(np.linalg.norm(bloch, axis=1) == 0):
            raise InputError(f"{where}: field 'bloch' contains a zero vector")
        rho = qstate.product_state(bloch).density_matrix()
    else:
        m = _array(doc, "re", (dim, dim), where) + 1j * _array(doc, "im", (dim, dim), where, False)
        rho = qstate.DensityMatrix(m)
        report = qstate.validate(m)
        if not report.ok:
            raise InputError(f"{where}: invalid density matrix: " + "; ".join(report.failures()))
    return rho


def settings_from_doc(doc: dict, n: int, where: str = "settings") -> MeasurementSettings:
    if _n_qubits(doc, where) != n:
        raise InputError(f"{where}: n_qubits does not match the state")
    dirs = _array(doc, "settings", (n, 2, 3), where)
    try:
        return MeasurementSettings(dirs)
    except ValueError as exc:
        raise InputError(f"{where}: {exc}") from exc


def table_from_doc(doc: dict, where: str = "table") -> bellcore.CorrelationTable:
    n = _n_qubits(doc, where, hi=bellcore.MAX_ENUMERATION_QUBITS)
    return bellcore.CorrelationTable(n, _array(doc, "entries", (2 ** n,), where))


def _opts(args) -> OptimizeOptions:
    try:
        return OptimizeOptions(restarts=args.restarts, seed=args.seed, tol=args.tol,
                               workers=args.workers)
    except ValueError as exc:
        raise InputError(str(exc)) from None


def _model_summary(table) -> dict:
    try:
        model = lhvmodel.build_lhv(table)
    except lhvmodel.NoLocalModelError as exc:
        return {"exists": False, "violation": exc.violation}
    return {
        "exists": True,
        "noise_weight": model.noise_weight,
        "sectors": model.active_sectors(threshold=1e-15),
    }


def analyze(doc: dict, opts: OptimizeOptions, settings_doc: dict | None = None) -> dict:
    timings = {}
    t0 = time.perf_counter()
    rho = state_from_doc(doc)
    n = rho.n_qubits
    tensor = compute_tensor(rho)
    timings["tensor"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    cert = criterion.max_tmod(tensor, opts)
    timings["max_tmod"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    ss = criterion.sum_squares_max(tensor, seed=opts.seed)
    timings["sum_squares_max"] = time.perf_counter() - t0

    bound = bellcore.local_bound(n)
    report = {
        "input": doc,
        "n_qubits": n,
        "tensor": {"nonzero": tensor.nonzero(1e-10), "frobenius": tensor.frobenius()},
        "max_tmod": cert.as_dict(),
        "sum_squares_max": ss.value,
        "bound": bound,
    }
    cert_table = correlation_table(tensor, cert.settings)
    report["optimized"] = {
        "zb_lhs": bellcore.zb_lhs(cert_table),
        "table": cert_table.entries.tolist(),
    }
    if settings_doc is not None:
        settings = settings_from_doc(settings_doc, n)
        table = correlation_table(tensor, settings)
        report["given_settings"] = {
            "zb_lhs": bellcore.zb_lhs(table),
            "table": table.entries.tolist(),
            "lhv_model": _model_summary(table),
        }
    else:
        report["lhv_model"] = _model_summary(cert_table)
    if n == 2:
        report["horodecki"] = criterion.horodecki_2qubit(tensor)
    if doc.get("kind") == "werner":
        thr = criterion.werner_threshold(n)
        report["werner"] = {"v": float(doc["v"]), "threshold": thr, "above_threshold": doc["v"] > thr}
    report["violated"] = cert.value > 1.0 + REPORT_TOL
    report["timings"] = timings
    return _round(report)


def sweep(kind: str, n: int, start: float, stop: float, step: float,
          opts: OptimizeOptions) -> list[dict]:
    if kind == "ghz":
        params = [1.0]
    else:
        if not step > 0 or stop < start:
            raise InputError("empty parameter range")
        count = int(math.floor((stop - start) / step + 1e-9)) + 1
        params = [min(stop, start + i * step) for i in range(count)]
        if any(not 0 <= p <= 1 for p in params):
            raise InputError("Werner weight range must lie within [0, 1]")
    rows = []
    for p in params:
        rho = qstate.werner(n, p)
        cert = criterion.max_tmod(compute_tensor(rho), opts)
        rows.append({"parameter": p, "max_tmod": cert.value, "violated": cert.value > 1 + REPORT_TOL})
    return _round(rows)


def oracle(doc: dict) -> dict:
    table = table_from_doc(doc)
    n = table.n_qubits
    value = bellcore.zb_lhs(table)
    bound = bellcore.local_bound(n)
    exists = lhvmodel.lhv_exists_bruteforce(table)
    out = {"n_qubits": n, "zb_lhs": value, "bound": bound, "bruteforce_exists": exists,
           "flagged": table.flagged}
    if exists:
        model = lhvmodel.build_lhv(table)
        sectors = model.active_sectors(threshold=1e-15)
        out["model"] = {"noise_weight": model.noise_weight, "sectors": sectors}
        if (len(sectors) == 1 and model.noise_weight == 0 and sectors[0]["sign"] == 1
                and all(s == 1 for s in sectors[0]["s"])):
            out["verdict"] = "satisfied, model: deterministic all +1"
        else:
            out["verdict"] = f"satisfied, model with {len(sectors)} sectors"
    else:
        out["verdict"] = f"violated, zb_lhs={value:.12g} > {bound:g}"
    return _round(out)


def _emit(obj, quiet: bool, summary: str) -> None:
    json.dump(obj, sys.stdout, indent=2)
    sys.stdout.write("\n")
    if not quiet:
        print(summary, file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="genbell", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add_opt_flags(sp):
        sp.add_argument("--restarts", type=int, default=32)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float, default=1e-9)
        sp.add_argument("--workers", type=int, default=1, help="threads for optimizer restarts")
        sp.add_argument("--quiet", action="store_true", help="JSON only, no stderr summary")

    a = sub.add_parser("analyze", help="analyze a state file")
    a.add_argument("state")
    a.add_argument("--settings", help="JSON file with explicit measurement directions")
    add_opt_flags(a)

    s = sub.add_parser("sweep", help="max_tmod over a family of states")
    s.add_argument("kind", choices=("werner", "ghz"))
    s.add_argument("--n", type=int, required=True)
    s.add_argument("--start", type=float, default=0.0)
    s.add_argument("--stop", type=float, default=1.0)
    s.add_argument("--step", type=float, default=0.05)
    add_opt_flags(s)

    o = sub.add_parser("oracle", help="local-model existence for a correlation table file")
    o.add_argument("table")
    o.add_argument("--quiet", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(name)s: %(message)s")
    try:
        if args.command == "analyze":
            doc = load_json(args.state)
            settings_doc = load_json(args.settings) if args.settings else None
            report = analyze(doc, _opts(args), settings_doc)
            verdict = "VIOLATED" if report["violated"] else "local model exists"
            _emit(report, args.quiet,
                  f"max_tmod = {report['max_tmod']['value']:.12g} -> {verdict}")
            return EXIT_VIOLATED if report["violated"] else EXIT_OK
        if args.command == "sweep":
            if args.n < 2 or args.n > qstate.MAX_QUBITS:
                raise InputError(f"--n must be in [2, {qstate.MAX_QUBITS}]")
            rows = sweep(args.kind, args.n, args.start, args.stop, args.step, _opts(args))
            _emit({"kind": args.kind, "n_qubits": args.n, "rows": rows}, args.quiet,
                  "\n".join(f"{r['parameter']:.4f}  {r['max_tmod']:.9f}  "
                            f"{'violated' if r['violated'] else '-'}" for r in rows))
            return EXIT_OK
        result = oracle(load_json(args.table))
        _emit(result, args.quiet, result["verdict"])
        return EXIT_OK if result["bruteforce_exists"] else EXIT_VIOLATED
    except InputError as exc:
        print(f"genbell: input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001
        log.exception("internal failure: %s", exc)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
