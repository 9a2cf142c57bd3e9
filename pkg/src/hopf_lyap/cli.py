"""Command-line front end: ``hopf-lyap {asymptotics|sweep|simulate|verify}``.

Exit codes: 0 success, 1 computation failure, 2 internal consistency failure,
64 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field

from .asymptotics import A0_REFERENCE, a0_closed_form, coefficients
from .errors import ConsistencyError
from .hopf import MU0
from .lyapunov import lyapunov_vs_eps

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_CONSISTENCY = 2
EXIT_USAGE = 64

DEFAULT_EPS = (1e-2, 1e-3, 1e-4)
SWEEP_HEADER = ("eps", "mu_h", "omega0", "a", "abs_err_vs_a0")


class UsageError(Exception):
    pass


@dataclass
class RunConfig:
    k: float = 0.0
    eps_list: list = field(default_factory=lambda: list(DEFAULT_EPS))
    mu_guess: float = MU0
    output_path: str | None = None
    format: str | None = None

    def validate(self):
        if not self.eps_list:
            raise UsageError("eps list is empty")
        for e in self.eps_list:
            if not 0.0 < e <= 0.1:
                raise UsageError(f"eps entries must lie in (0, 0.1], got {e}")
        if self.format not in (None, "csv", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        return self


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _num(x, digits=17):
    return format(float(x), f".{digits}g")


def _eps_list(text):
    text = text.strip()
    if not text:
        return []
    try:
        return [float(t) for t in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a comma-separated list of numbers: {text!r}")


def _load_config(args) -> RunConfig:
    cfg = RunConfig()
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                raw = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}")
        if not isinstance(raw, dict):
            raise UsageError("config file must hold a JSON object")
        known = {"k", "eps_list", "mu_guess", "output_path", "format"}
        unknown = set(raw) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        for key, value in raw.items():
            if key == "eps_list":
                value = [float(v) for v in value]
            elif key in ("k", "mu_guess"):
                value = float(value)
            setattr(cfg, key, value)
    # flags win over the file
    if args.k is not None:
        cfg.k = args.k
    if args.eps is not None:
        cfg.eps_list = args.eps
    if args.mu_guess is not None:
        cfg.mu_guess = args.mu_guess
    if args.out is not None:
        cfg.output_path = args.out
    if args.format is not None:
        cfg.format = args.format
    return cfg.validate()


def _emit(cfg: RunConfig, text: str):
    if cfg.output_path:
        with open(cfg.output_path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _csv_text(rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


# -- asymptotics -------------------------------------------------------------

def cmd_asymptotics(cfg: RunConfig) -> int:
    try:
        coeffs = coefficients(cfg.k)
    except ConsistencyError as exc:
        print(f"consistency failure: {exc}", file=sys.stderr)
        return EXIT_CONSISTENCY
    fields = coeffs.as_dict()
    if cfg.format == "json":
        out = {k: ({"real": v.real, "imag": v.imag} if isinstance(v, complex) else v)
               for k, v in fields.items()}
        text = json.dumps(out, indent=2) + "\n"
    elif cfg.format == "csv":
        rows = [("name", "value")]
        for k, v in fields.items():
            if isinstance(v, complex):
                rows += [(f"{k}_real", _num(v.real)), (f"{k}_imag", _num(v.imag))]
            else:
                rows.append((k, _num(v)))
        text = _csv_text(rows)
    else:
        lines = []
        for k, v in fields.items():
            if isinstance(v, complex):
                sign = "-" if v.imag < 0 else "+"
                lines.append(f"{k} = {_num(v.real, 12)} {sign} {_num(abs(v.imag), 12)}i")
            else:
                lines.append(f"{k} = {_num(v, 12)}")
        text = "\n".join(lines) + "\n"
    _emit(cfg, text)
    return EXIT_OK


# -- sweep -------------------------------------------------------------------

def _clean_reason(reason):
    return " ".join(reason.replace(",", ";").split())


def cmd_sweep(cfg: RunConfig, workers=None) -> int:
    eps_list = sorted(set(cfg.eps_list), reverse=True)
    rows = lyapunov_vs_eps(eps_list, k=cfg.k, guess=cfg.mu_guess, workers=workers)
    a0 = a0_closed_form(cfg.k)
    if cfg.format == "json":
        out = []
        for r in rows:
            if r.ok:
                out.append({"eps": r.epsilon, "mu_h": r.mu_h, "omega0": r.omega0,
                            "a": r.a, "abs_err_vs_a0": abs(r.a - a0)})
            else:
                out.append({"eps": r.epsilon, "error": r.error})
        text = json.dumps(out, indent=2) + "\n"
    else:
        table = [SWEEP_HEADER]
        for r in rows:
            if r.ok:
                table.append((_num(r.epsilon), _num(r.mu_h), _num(r.omega0), _num(r.a),
                              _num(abs(r.a - a0))))
            else:
                table.append((_num(r.epsilon), f"ERROR:{_clean_reason(r.error)}", "", "", ""))
        text = _csv_text(table)
    _emit(cfg, text)
    return EXIT_OK if all(r.ok for r in rows) else EXIT_FAILURE


# -- simulate ----------------------------------------------------------------

SIMULATE_FIELDS = ("eps", "mu_h", "offset", "mu", "t_final", "growth_rate", "cycle",
                   "amplitude", "period", "converged", "equilibrium", "n_peaks", "drift")


def cmd_simulate(cfg: RunConfig, mu_offset, t_final=None) -> int:
    from .hopf import solve_hopf_mu
    from .simulate import amplitude_scan

    eps = cfg.eps_list[0]
    try:
        mu_h = solve_hopf_mu(eps, guess=cfg.mu_guess, k=cfg.k).mu_h
        (row,) = amplitude_scan(eps, [mu_offset], k=cfg.k, t_final=t_final)
    except (ArithmeticError, ValueError) as exc:
        print(f"simulation failed: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    if row.error:
        print(f"simulation failed: {row.error}", file=sys.stderr)
        return EXIT_FAILURE
    est = row.estimate
    record = {
        "eps": eps, "mu_h": mu_h, "offset": row.offset, "mu": row.mu,
        "t_final": row.t_final, "growth_rate": row.growth_rate, "cycle": row.cycle,
        "amplitude": row.amplitude, "period": row.period,
        "converged": est.converged, "equilibrium": est.equilibrium,
        "n_peaks": est.n_peaks, "drift": est.drift,
    }
    if cfg.format == "json":
        safe = {k: (None if isinstance(v, float) and v != v else v) for k, v in record.items()}
        text = json.dumps(safe, indent=2) + "\n"
    else:
        values = []
        for key in SIMULATE_FIELDS:
            v = record[key]
            values.append(str(v).lower() if isinstance(v, bool)
                          else str(v) if isinstance(v, int) else _num(v))
        text = _csv_text([SIMULATE_FIELDS, values])
    _emit(cfg, text)
    return EXIT_OK


# -- verify ------------------------------------------------------------------

def cmd_verify(cfg: RunConfig, quick=False, a0_reference=A0_REFERENCE) -> int:
    from .acceptance import run_criteria

    results = run_criteria(quick=quick, a0_reference=a0_reference)
    if cfg.format == "json":
        text = json.dumps([
            {"criterion": r.number, "name": r.name, "status": r.status,
             "runtime_s": r.runtime, "budget_s": r.budget if not r.skipped else None,
             "detail": r.detail}
            for r in results
        ], indent=2) + "\n"
    else:
        text = "".join(r.line() + "\n" for r in results)
        failed = [r.number for r in results if not r.passed]
        text += ("all criteria passed\n" if not failed
                 else f"failed criteria: {', '.join(map(str, failed))}\n")
    _emit(cfg, text)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILURE


# -- entry point -------------------------------------------------------------

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--k", type=float, default=None, help="saturation constant k")
    common.add_argument("--eps", type=_eps_list, default=None,
                        help="comma-separated epsilon values in (0, 0.1]")
    common.add_argument("--mu-guess", type=float, default=None,
                        help="starting mu for the Hopf solve")
    common.add_argument("--out", default=None, help="write output to this path")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--config", default=None, help="JSON config file; flags win")

    parser = _Parser(prog="hopf-lyap",
                     description="First Lyapunov coefficient of the fast-slow model.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    sub.add_parser("asymptotics", parents=[common], help="closed-form coefficients")
    sw = sub.add_parser("sweep", parents=[common], help="numerical a(eps) sweep")
    sw.add_argument("--workers", type=int, default=None, help="threads for the rows")
    sim = sub.add_parser("simulate", parents=[common], help="integrate near the Hopf point")
    sim.add_argument("--mu-offset", type=float, default=-0.01,
                     help="mu - mu_H(eps), first eps of the list (default -0.01)")
    sim.add_argument("--t-final", type=float, default=None)
    ver = sub.add_parser("verify", parents=[common], help="run the acceptance criteria")
    ver.add_argument("--quick", action="store_true", help="skip simulation criteria")
    ver.add_argument("--a0-reference", type=float, default=A0_REFERENCE,
                     help=argparse.SUPPRESS)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _load_config(args)
        if args.command == "simulate" and args.eps is None and not args.config:
            cfg.eps_list = [1e-3]
        if args.command == "simulate" and args.t_final is not None and not args.t_final > 0:
            raise UsageError("--t-final must be positive")
    except UsageError as exc:
        print(f"hopf-lyap: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if args.command == "asymptotics":
        return cmd_asymptotics(cfg)
    if args.command == "sweep":
        return cmd_sweep(cfg, workers=args.workers)
    if args.command == "simulate":
        return cmd_simulate(cfg, args.mu_offset, args.t_final)
    return cmd_verify(cfg, quick=args.quick, a0_reference=args.a0_reference)


if __name__ == "__main__":
    sys.exit(main())
