"""Command-line front end: simulation, exponents/dimension, theorem checking,
certificate search, and parameter-plane scans.

Exit codes: 0 success, 1 configuration error, 2 trajectory left the bounded
region, 3 no certificate.  Data goes to stdout (or --out), diagnostics to
stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from fractions import Fraction

import numpy as np

from .errors import LyapdimError, NoCertificate, NonFiniteState
from .integrate import IntegratorConfig, advance_state, trajectory
from .lyap import LeSpectrum, kaplan_yorke, _qr_run
from .model import SystemParams, equilibria
from .scan import (
    AxisSpec,
    ScanRequest,
    cells_to_csv_text,
    cells_to_json,
    run_scan,
)
from .theory import (
    check_conditions,
    find_gamma_certificate,
    leonov_formula,
    verify_R_nonpositive,
)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_NONFINITE = 2
EXIT_NO_CERTIFICATE = 3

_EQ_OFFSET = 1e-3


class _Parser(argparse.ArgumentParser):
    # bad flags are configuration errors: exit 1, not argparse's default 2
    def error(self, message):
        self.exit(EXIT_CONFIG, f"{self.prog}: error: {message}\n")


def _num(tok: str) -> float:
    """Numeric parse accepting decimals, scientific, and rationals like 8/3."""
    try:
        return float(tok)
    except ValueError:
        return float(Fraction(tok))


def parse_params(text: str) -> SystemParams:
    toks = [t.strip() for t in text.split(",")]
    if len(toks) != 3:
        raise ValueError(f"--params wants SIGMA,R,B; got {text!r}")
    return SystemParams(_num(toks[0]), _num(toks[1]), _num(toks[2]))


def resolve_seed(p: SystemParams, text: str, offset: float = 0.0) -> np.ndarray:
    """Seed from 's0'|'s1'|'s2' (equilibria, optionally offset along (1,1,1))
    or an explicit x,y,z triple."""
    name = text.strip().lower()
    if name in ("s0", "s1", "s2"):
        eqs = equilibria(p)
        if name == "s0":
            pt = eqs.s0
        else:
            if eqs.s12 is None:
                raise ValueError(f"--from {name} requires r > 1 (got r={p.r:g})")
            pt = eqs.s12[0] if name == "s1" else eqs.s12[1]
        return pt + offset * np.ones(3) / math.sqrt(3.0)
    toks = [t.strip() for t in text.split(",")]
    if len(toks) != 3:
        raise ValueError(f"--from wants s0|s1|s2 or X,Y,Z; got {text!r}")
    return np.array([_num(t) for t in toks])


def _threads(args) -> int:
    if getattr(args, "threads", None) is not None:
        n = args.threads
    else:
        n = int(os.environ.get("LYAPDIM_THREADS", "1"))
    if n < 1:
        raise ValueError("threads must be >= 1")
    return n


def _emit(text: str, out_path: str) -> None:
    if out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w") as fh:
            fh.write(text)


def _csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def _cfg(args) -> IntegratorConfig:
    return IntegratorConfig(step=args.step, method=args.method)


def cmd_simulate(args) -> int:
    p = parse_params(args.params)
    seed = resolve_seed(p, args.seed_from, offset=_EQ_OFFSET)
    cfg = _cfg(args)
    total = args.transient + args.horizon
    rows = []
    if args.split_transient and args.transient > 0.0:
        n_tr = max(1, int(round(args.samples * args.transient / total)))
        times, states = trajectory(p, seed, args.transient, cfg, n_samples=n_tr)
        rows.extend(
            (float(t), float(s[0]), float(s[1]), float(s[2]), "transient")
            for t, s in zip(times, states)
        )
        start = states[-1]
        t0 = times[-1]
        n_at = max(1, args.samples - n_tr)
    else:
        start = (
            advance_state(p, seed, args.transient, cfg)
            if args.transient > 0.0
            else seed
        )
        t0 = args.transient
        n_at = args.samples
    times, states = trajectory(p, start, args.horizon, cfg, n_samples=n_at)
    rows.extend(
        (float(t0 + t), float(s[0]), float(s[1]), float(s[2]), "attractor")
        for t, s in zip(times, states)
    )

    if args.output == "csv":
        if args.split_transient:
            text = _csv_text(
                ("t", "x", "y", "z", "segment"),
                [(repr(t), repr(x), repr(y), repr(z), seg) for t, x, y, z, seg in rows],
            )
        else:
            text = _csv_text(
                ("t", "x", "y", "z"),
                [(repr(t), repr(x), repr(y), repr(z)) for t, x, y, z, _ in rows],
            )
    else:
        recs = []
        for t, x, y, z, seg in rows:
            rec = {"t": t, "x": x, "y": y, "z": z}
            if args.split_transient:
                rec["segment"] = seg
            recs.append(rec)
        text = json.dumps(recs, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _spectrum_report(p, args):
    cfg = _cfg(args)
    seed = resolve_seed(p, args.seed_from)
    exps, realized, checkpoints = _qr_run(
        p,
        seed,
        args.horizon,
        args.transient,
        cfg,
        reorth_interval=0.5,
        checkpoint_interval=10.0,
    )
    spectrum = LeSpectrum(
        exponents=exps, horizon=realized, transient_discarded=args.transient
    )
    trace = -(p.sigma + 1.0 + p.b)
    return spectrum, checkpoints, trace, abs(spectrum.total - trace)


def cmd_les(args) -> int:
    p = parse_params(args.params)
    spectrum, _, trace, residual = _spectrum_report(p, args)
    rec = {
        "exponents": list(spectrum.exponents),
        "horizon": spectrum.horizon,
        "transient": spectrum.transient_discarded,
        "sum": spectrum.total,
        "trace": trace,
        "residual": residual,
    }
    if args.output == "csv":
        text = _csv_text(
            ("le1", "le2", "le3", "horizon", "transient", "sum", "trace", "residual"),
            [
                [repr(v) for v in spectrum.exponents]
                + [
                    repr(spectrum.horizon),
                    repr(spectrum.transient_discarded),
                    repr(spectrum.total),
                    repr(trace),
                    repr(residual),
                ]
            ],
        )
    else:
        text = json.dumps(rec, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_dim(args) -> int:
    p = parse_params(args.params)
    spectrum, checkpoints, trace, residual = _spectrum_report(p, args)
    fin = kaplan_yorke(spectrum)
    sup = max(
        max(kaplan_yorke(e).value for _, e in checkpoints), fin.value
    )
    rec = {
        "exponents": list(spectrum.exponents),
        "horizon": spectrum.horizon,
        "transient": spectrum.transient_discarded,
        "j": fin.j,
        "fraction": fin.fraction,
        "dimension": fin.value,
        "sup_checkpoints": sup,
        "degenerate": fin.degenerate,
        "sum": spectrum.total,
        "trace": trace,
        "residual": residual,
    }
    if args.output == "csv":
        keys = list(rec)
        flat = {**rec}
        flat["exponents"] = " ".join(repr(v) for v in spectrum.exponents)
        text = _csv_text(keys, [[str(flat[k]) for k in keys]])
    else:
        text = json.dumps(rec, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_check(args) -> int:
    p = parse_params(args.params)
    verdict = check_conditions(p)
    if args.output == "csv":
        rows = [(c.id, str(c.holds).lower(), c.detail) for c in verdict.checks]
        rows.append(("outcome", "", verdict.outcome))
        rows.append(("branch", "", verdict.branch or ""))
        rows.append(("bound", "", "" if verdict.bound is None else repr(verdict.bound)))
        text = _csv_text(("id", "holds", "detail"), rows)
    else:
        text = (
            json.dumps(
                {
                    "outcome": verdict.outcome,
                    "branch": verdict.branch,
                    "bound": verdict.bound,
                    "satisfied": list(verdict.satisfied),
                    "failed": list(verdict.failed),
                    "conditions": [
                        {"id": c.id, "holds": c.holds, "detail": c.detail}
                        for c in verdict.checks
                    ],
                },
                indent=2,
            )
            + "\n"
        )
    _emit(text, args.out)
    return EXIT_OK


def cmd_certify(args) -> int:
    p = parse_params(args.params)
    cert = find_gamma_certificate(p)
    if cert is None:
        verdict = check_conditions(p)
        print(
            f"no certificate: conditions fail ({', '.join(verdict.failed)})",
            file=sys.stderr,
        )
        return EXIT_NO_CERTIFICATE
    report = verify_R_nonpositive(p, cert, samples=args.samples, seed=args.seed)
    rec = {
        **cert.as_dict(),
        "bound": leonov_formula(p),
        "max_R": report.max_value,
        "argmax": list(report.argmax),
        "n_samples": report.n_samples,
        "checks": [
            {"name": c.name, "holds": c.holds, "margin": c.margin}
            for c in report.checks
        ],
        "passed": report.passed,
    }
    if args.output == "csv":
        rows = [(k, repr(v)) for k, v in cert.as_dict().items()]
        rows.append(("bound", repr(rec["bound"])))
        rows.append(("max_R", repr(report.max_value)))
        rows.append(("n_samples", str(report.n_samples)))
        for c in report.checks:
            rows.append((f"check:{c.name}", f"{str(c.holds).lower()} ({c.margin!r})"))
        rows.append(("passed", str(report.passed).lower()))
        text = _csv_text(("field", "value"), rows)
    else:
        text = json.dumps(rec, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def cmd_equilibria(args) -> int:
    p = parse_params(args.params)
    eqs = equilibria(p)
    if args.output == "csv":
        rows = [("s0", 0.0, 0.0, 0.0)]
        if eqs.s12 is not None:
            for name, pt in zip(("s1", "s2"), eqs.s12):
                rows.append((name, float(pt[0]), float(pt[1]), float(pt[2])))
        text = _csv_text(("name", "x", "y", "z"), rows)
    else:
        rec = {
            "s0": [0.0, 0.0, 0.0],
            "s1": None if eqs.s12 is None else [float(v) for v in eqs.s12[0]],
            "s2": None if eqs.s12 is None else [float(v) for v in eqs.s12[1]],
        }
        text = json.dumps(rec, indent=2) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _parse_fixed(text: str):
    if "=" not in text:
        raise ValueError(f"--fixed wants NAME=VALUE, got {text!r}")
    name, val = text.split("=", 1)
    return name.strip(), _num(val)


def _parse_axis(text: str) -> AxisSpec:
    toks = text.split(":")
    if len(toks) != 4:
        raise ValueError(f"axis wants NAME:MIN:MAX:CELLS, got {text!r}")
    return AxisSpec(
        name=toks[0].strip(),
        min=_num(toks[1]),
        max=_num(toks[2]),
        cells=int(toks[3]),
    )


def cmd_scan(args) -> int:
    name, value = _parse_fixed(args.fixed)
    req = ScanRequest(
        fixed_name=name,
        fixed_value=value,
        axis1=_parse_axis(args.axis1),
        axis2=_parse_axis(args.axis2),
    )
    cells = run_scan(req, threads=_threads(args))
    if args.output == "csv":
        text = cells_to_csv_text(cells)
    else:
        text = cells_to_json(cells) + "\n"
    _emit(text, args.out)
    return EXIT_OK


def _add_common(sp, output_default="json"):
    sp.add_argument("--params", default="10,28,8/3", metavar="SIGMA,R,B",
                    help="system parameters (b accepts rationals like 8/3)")
    sp.add_argument("--output", choices=("csv", "json"), default=output_default)
    sp.add_argument("--out", default="-", help="output path, '-' for stdout")
    sp.add_argument("--seed", type=int, default=0, help="RNG seed")


def _add_integrator(sp):
    sp.add_argument("--step", type=float, default=1e-3)
    sp.add_argument("--method", choices=("RK4", "DOPRI45"), default="RK4")


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lyapdim", description=__doc__)
    sub = ap.add_subparsers(dest="command", parser_class=_Parser, required=True)

    sp = sub.add_parser("simulate", help="integrate a trajectory and dump t,x,y,z")
    _add_common(sp, output_default="csv")
    _add_integrator(sp)
    sp.add_argument("--from", dest="seed_from", default="s0",
                    help="s0|s1|s2 (offset by 1e-3) or explicit X,Y,Z")
    sp.add_argument("--horizon", type=float, default=100.0)
    sp.add_argument("--transient", type=float, default=0.0)
    sp.add_argument("--split-transient", action="store_true",
                    help="keep transient rows, labeled, instead of dropping them")
    sp.add_argument("--samples", type=int, default=10_000,
                    help="number of output rows")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("les", help="finite-time Lyapunov exponents")
    _add_common(sp)
    _add_integrator(sp)
    sp.add_argument("--from", dest="seed_from", default="1,1,1")
    sp.add_argument("--horizon", type=float, default=200.0)
    sp.add_argument("--transient", type=float, default=100.0)
    sp.set_defaults(func=cmd_les)

    sp = sub.add_parser("dim", help="finite-time Kaplan-Yorke dimension")
    _add_common(sp)
    _add_integrator(sp)
    sp.add_argument("--from", dest="seed_from", default="1,1,1")
    sp.add_argument("--horizon", type=float, default=200.0)
    sp.add_argument("--transient", type=float, default=100.0)
    sp.set_defaults(func=cmd_dim)

    sp = sub.add_parser("check", help="evaluate the dimension-formula conditions")
    _add_common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser("certify", help="construct and verify a gamma certificate")
    _add_common(sp)
    sp.add_argument("--samples", type=int, default=100_000,
                    help="R-sampling count for the falsification sweep")
    sp.set_defaults(func=cmd_certify)

    sp = sub.add_parser("equilibria", help="print the equilibrium points")
    _add_common(sp)
    sp.set_defaults(func=cmd_equilibria)

    sp = sub.add_parser("scan", help="classify a parameter-plane grid")
    _add_common(sp, output_default="csv")
    sp.add_argument("--fixed", required=True, metavar="NAME=VALUE")
    sp.add_argument("--axis1", required=True, metavar="NAME:MIN:MAX:CELLS")
    sp.add_argument("--axis2", required=True, metavar="NAME:MIN:MAX:CELLS")
    sp.add_argument("--threads", type=int, default=None,
                    help="worker threads (default: LYAPDIM_THREADS or 1)")
    sp.set_defaults(func=cmd_scan)

    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        return args.func(args)
    except NoCertificate as exc:
        print(f"no certificate: {exc}", file=sys.stderr)
        return EXIT_NO_CERTIFICATE
    except NonFiniteState as exc:
        print(f"trajectory diverged: {exc}", file=sys.stderr)
        return EXIT_NONFINITE
    except BrokenPipeError:
        # downstream reader (head, etc.) went away; exit quietly
        os.dup2(os.open(os.devnull, os.O_WRONLY), sys.stdout.fileno())
        return EXIT_OK
    except (ValueError, LyapdimError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
