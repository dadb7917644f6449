"""Command-line front end: closed forms, verification suites and sweeps.

Every run writes a JSON or CSV report holding the resolved configuration,
the closed-form values, the numeric estimates with standard errors and a
pass/fail verdict. Exit status is 0 on pass, 2 on a failed verification and
1 on a usage or domain error.
"""

import argparse
import csv
import io
import json
import math
import os
import sys
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timezone
from typing import Optional

import numpy as np

from . import __version__, kernels, norms, suites
from .integrate import MCConfig, MCEstimate, Params
from .specfun import DomainError

COMMANDS = (
    "norm",
    "verify-lemma6",
    "mz-profile",
    "extremal-sweep",
    "besov-limit",
    "identity-suite",
)
FORMATS = ("json", "csv")
SWEEP_COLUMNS = ("r", "estimate", "stderr", "target", "ratio")
SIG_DIGITS = 15

EXIT_PASS, EXIT_USAGE, EXIT_FAIL = 0, 1, 2


@dataclass(frozen=True)
class Tolerances:
    """Verdict tolerances; defaults follow the acceptance criteria."""

    closed_rel: float = 1e-10
    sigmas: float = 4.0
    mc_rel: float = 0.01
    lower_frac: float = 0.95
    first_term_rel: float = 0.05
    besov_rel: float = 0.005
    series_rel: float = 1e-8


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: Params
    mc: MCConfig = field(default_factory=MCConfig)
    output: Optional[str] = None
    fmt: str = "json"
    as_stated: bool = False
    delta: Optional[float] = None
    p_list: tuple = (2.0, 10.0, 50.0, 200.0)
    r_list: Optional[tuple] = None
    kmax: int = 100000
    max_order: int = 4
    function: str = "power"
    tol: Tolerances = field(default_factory=Tolerances)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise DomainError(f"unknown command {self.command!r}")
        if self.fmt not in FORMATS:
            raise DomainError(f"unknown format {self.fmt!r}")
        if self.delta is not None and not 0.0 < self.delta < 1.0:
            raise DomainError("delta must lie in (0, 1)")
        if self.kmax < 1 or self.max_order < 0:
            raise DomainError("kmax must be >= 1 and max-order >= 0")
        if self.function not in ("power", "const"):
            raise DomainError(f"unknown function {self.function!r}")

    def as_dict(self):
        return {
            "command": self.command,
            "params": self.params.as_dict(),
            "mc": self.mc.as_dict(),
            "format": self.fmt,
            "as_stated": self.as_stated,
            "delta": self.delta,
            "p_list": list(self.p_list),
            "r_list": None if self.r_list is None else list(self.r_list),
            "kmax": self.kmax,
            "max_order": self.max_order,
            "function": self.function,
            "tolerances": asdict(self.tol),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(
            command=d["command"],
            params=Params(**d["params"]),
            mc=MCConfig(**d["mc"]),
            fmt=d.get("format", "json"),
            as_stated=d.get("as_stated", False),
            delta=d.get("delta"),
            p_list=tuple(d.get("p_list", (2.0, 10.0, 50.0, 200.0))),
            r_list=None if d.get("r_list") is None else tuple(d["r_list"]),
            kmax=d.get("kmax", 100000),
            max_order=d.get("max_order", 4),
            function=d.get("function", "power"),
            tol=Tolerances(**d.get("tolerances", {})),
        )


# serialisation ---------------------------------------------------------------


def _round(x):
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (complex, np.complexfloating)):
        if x.imag == 0:
            return _round(x.real)
        return [_round(x.real), _round(x.imag)]
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if not math.isfinite(x):
            raise ValueError(f"cannot serialise non-finite number {x}")
        return float(f"{x:.{SIG_DIGITS}g}")
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, np.ndarray)):
        return [_round(v) for v in x]
    return x


def sweep_row_dict(row):
    out = {
        "r": row.r,
        "estimate": row.estimate.value,
        "stderr": row.estimate.stderr,
        "target": row.closed_form_target,
        "ratio": row.ratio,
    }
    if row.first_term is not None:
        out["first_term"] = row.first_term.value
        out["first_term_stderr"] = row.first_term.stderr
        out["first_term_target"] = row.first_term_target
    return out


def norm_report_dict(rep):
    num = rep.numeric
    out = {"route": rep.route, "closed_form": rep.closed_form}
    if isinstance(num, MCEstimate):
        out["estimate"] = num.value
        out["stderr"] = num.stderr
    else:
        out["estimate"] = num
    for k, v in rep.metadata.items():
        out[k] = v
    return out


def _row_dict(row):
    if isinstance(row, norms.SweepRow):
        return sweep_row_dict(row)
    if isinstance(row, norms.NormReport):
        return norm_report_dict(row)
    return dict(row)


def _csv_cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.{SIG_DIGITS}g}"
    if isinstance(v, list):
        return " ".join(_csv_cell(x) for x in v)
    return "" if v is None else str(v)


def emit_report(rows, fmt="json", meta=None, params=None, verdict=None):
    """Serialise result rows.

    JSON has top-level keys ``meta``, ``params``, ``rows`` and ``verdict``.
    CSV has one line per row; sweep rows use the columns
    ``r,estimate,stderr,target,ratio``, other rows use their own keys.
    """
    if not rows:
        raise ValueError("no result rows to report")
    dicts = [_round(_row_dict(r)) for r in rows]
    if fmt == "json":
        if verdict is None:
            verdict = all(d.get("pass", True) for d in dicts)
        doc = {
            "meta": _round(meta or {}),
            "params": _round(params or {}),
            "rows": dicts,
            "verdict": "pass" if verdict else "fail",
        }
        return json.dumps(doc, indent=2) + "\n"
    if fmt == "csv":
        if all(isinstance(r, norms.SweepRow) for r in rows):
            cols = list(SWEEP_COLUMNS)
        else:
            cols = []
            for d in dicts:
                cols.extend(k for k in d if k not in cols)
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for d in dicts:
            w.writerow([_csv_cell(d.get(c)) for c in cols])
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


# commands --------------------------------------------------------------------


def _rel(a, b):
    return abs(a - b) / abs(b)


def cmd_norm(cfg):
    p, tol = cfg.params, cfg.tol
    tilde = norms.seminorm_opnorm(p)
    at_one = norms.radial_majorant(p, 1.0)
    head, argmax = norms.first_term(p)
    full = norms.bloch_opnorm(p, cfg.as_stated)
    lower = norms.bloch_opnorm_lower(p)
    rows = [
        {"quantity": "seminorm_opnorm", "value": tilde},
        {
            "quantity": "radial_majorant_at_1",
            "value": at_one,
            "rel_err": _rel(at_one, tilde),
            "pass": _rel(at_one, tilde) <= tol.closed_rel,
        },
        {"quantity": "first_term", "value": head, "argmax": list(argmax)},
        {"quantity": "first_term_as_stated", "value": norms.first_term_as_stated(p)},
        {"quantity": "bloch_opnorm", "value": full, "as_stated": cfg.as_stated},
        {"quantity": "bloch_opnorm_default", "value": norms.bloch_opnorm(p)},
        {"quantity": "bloch_opnorm_as_stated", "value": norms.bloch_opnorm(p, True)},
        {
            "quantity": "bloch_opnorm_lower",
            "value": lower,
            "pass": lower <= full * (1 + tol.closed_rel),
        },
    ]
    for q in (2.0, math.inf):
        rows.append(
            {"quantity": f"lp_bound p={q:g}", "value": norms.lp_seminorm_opnorm_bound(p, q)}
        )
    return rows


def cmd_verify_monomials(cfg):
    return suites.monomial_integral_rows(
        cfg.params, cfg.max_order, cfg.mc, cfg.tol.sigmas, cfg.tol.mc_rel
    )


def cmd_mz_profile(cfg):
    p, tol = cfg.params, cfg.tol
    radii = cfg.r_list if cfg.r_list is not None else tuple(np.round(np.linspace(0, 0.95, 20), 4))
    rows, prev = [], -math.inf
    for r in radii:
        hyp = norms.radial_majorant(p, r)
        ser = norms.radial_majorant_series(p, r, cfg.kmax)
        rel = _rel(ser, hyp)
        rows.append(
            {
                "r": r,
                "hypergeometric": hyp,
                "series": ser,
                "rel_err": rel,
                "pass": rel <= tol.series_rel and hyp >= prev,
            }
        )
        prev = hyp
    at_one, tilde = norms.radial_majorant(p, 1.0), norms.seminorm_opnorm(p)
    rows.append(
        {
            "r": 1.0,
            "hypergeometric": at_one,
            "series": None,
            "rel_err": _rel(at_one, tilde),
            "pass": _rel(at_one, tilde) <= tol.closed_rel and at_one >= prev,
        }
    )
    return rows


def sweep_verdict(rows, tol, delta=None):
    """Upper bound on every row; lower bound at the largest radius.

    With ``delta`` the lower bound is replaced by the first-term check at the
    origin, since the truncated function only reaches the norm as r -> 1.
    """
    ok = all(
        row.estimate.value <= row.closed_form_target + tol.sigmas * row.estimate.stderr
        for row in rows
    )
    top = max(rows, key=lambda row: row.r)
    if delta is None:
        ok = ok and top.estimate.value >= tol.lower_frac * top.closed_form_target
    else:
        ok = ok and all(
            _rel(row.first_term.value, row.first_term_target) <= tol.first_term_rel
            for row in rows
        )
    return ok


def cmd_extremal_sweep(cfg):
    radii = cfg.r_list if cfg.r_list is not None else norms.DEFAULT_RADII
    return norms.extremal_sweep(cfg.params, radii, cfg.delta, cfg.mc)


def cmd_besov_limit(cfg):
    p, tol = cfg.params, cfg.tol
    if cfg.function == "power":
        derivs, closed = norms.power_derivs(p.N), lambda q: norms.besov_closed_power(p, q)
    else:
        derivs, closed = norms.zero_derivs, lambda q: 0.0
    table = norms.besov_limit_check(p, derivs, cfg.p_list, cfg.mc)
    rows = []
    for q, est in table.rows:
        c = closed(q)
        err = abs(est.value - c) / c if c else abs(est.value)
        rows.append(
            {
                "p": q,
                "estimate": est.value,
                "stderr": est.stderr,
                "closed": c,
                "rel_err": err,
                "bloch_seminorm": table.target,
                "pass": err <= tol.besov_rel,
            }
        )
    rows.append({"check": "eventually_monotone", "pass": table.eventually_monotone})
    return rows


def cmd_identity_suite(cfg):
    return suites.identity_suite(cfg.mc.seed)


HANDLERS = {
    "norm": cmd_norm,
    "verify-lemma6": cmd_verify_monomials,
    "mz-profile": cmd_mz_profile,
    "extremal-sweep": cmd_extremal_sweep,
    "besov-limit": cmd_besov_limit,
    "identity-suite": cmd_identity_suite,
}


def execute(cfg):
    """Run ``cfg`` and return ``(rows, verdict)``."""
    rows = HANDLERS[cfg.command](cfg)
    if cfg.command == "extremal-sweep":
        verdict = sweep_verdict(rows, cfg.tol, cfg.delta)
    else:
        verdict = all(bool(r.get("pass", True)) for r in rows)
    return rows, verdict


def build_meta(cfg, timestamp=None):
    return {
        "tool": "bergman-bloch",
        "version": __version__,
        "backend": kernels.BACKEND,
        "command": cfg.command,
        "config": cfg.as_dict(),
        "timestamp": timestamp or datetime.now(timezone.utc).isoformat(),
    }


def run(cfg, stdout=None, timestamp=None):
    """Execute, serialise and write the report; returns the exit status."""
    rows, verdict = execute(cfg)
    text = emit_report(rows, cfg.fmt, build_meta(cfg, timestamp), cfg.params.as_dict(), verdict)
    if cfg.output:
        with open(cfg.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        (stdout or sys.stdout).write(text)
    return EXIT_PASS if verdict else EXIT_FAIL


# argument parsing ------------------------------------------------------------


def _float_list(text):
    return tuple(float(x) for x in text.replace(",", " ").split())


def build_parser():
    parser = argparse.ArgumentParser(
        prog="bergman-bloch",
        description="Norms of the weighted Bergman projection onto the Bloch space.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        sp = sub.add_parser(name)
        sp.add_argument("--n", type=int, default=1, help="complex dimension")
        sp.add_argument("--N", type=int, default=1, help="derivative order")
        sp.add_argument("--alpha", type=float, default=0.0, help="weight, > -1")
        sp.add_argument("--samples", type=int, default=10**6)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument(
            "--workers",
            type=int,
            default=None,
            help="worker threads (default: $BERGMAN_BLOCH_WORKERS or 1)",
        )
        sp.add_argument("--radial", choices=("uniform", "beta"), default="uniform")
        sp.add_argument("--output", "-o", default=None, help="report path (default stdout)")
        sp.add_argument("--format", dest="fmt", choices=FORMATS, default="json")
        sp.add_argument("--as-stated", action="store_true")
        sp.add_argument("--delta", type=float, default=None)
        sp.add_argument("--p-list", type=_float_list, default=(2.0, 10.0, 50.0, 200.0))
        sp.add_argument("--r-list", type=_float_list, default=None)
        sp.add_argument("--kmax", type=int, default=100000)
        sp.add_argument("--max-order", type=int, default=4)
        sp.add_argument("--function", choices=("power", "const"), default="power")
        d = Tolerances()
        sp.add_argument("--closed-rel", type=float, default=d.closed_rel)
        sp.add_argument("--sigmas", type=float, default=d.sigmas)
        sp.add_argument("--mc-rel", type=float, default=d.mc_rel)
        sp.add_argument("--lower-frac", type=float, default=d.lower_frac)
        sp.add_argument("--first-term-rel", type=float, default=d.first_term_rel)
        sp.add_argument("--besov-rel", type=float, default=d.besov_rel)
        sp.add_argument("--series-rel", type=float, default=d.series_rel)
        sp.add_argument(
            "--from-report",
            default=None,
            help="re-run the configuration stored in a JSON report",
        )
    return parser


def config_from_args(ns):
    if ns.from_report:
        with open(ns.from_report, encoding="utf-8") as fh:
            stored = json.load(fh)["meta"]["config"]
        return replace(RunConfig.from_dict(stored), output=ns.output)
    mc = MCConfig(ns.samples, ns.seed, ns.workers or _env_workers(), ns.radial)
    tol = Tolerances(
        ns.closed_rel,
        ns.sigmas,
        ns.mc_rel,
        ns.lower_frac,
        ns.first_term_rel,
        ns.besov_rel,
        ns.series_rel,
    )
    return RunConfig(
        ns.command,
        Params(ns.n, ns.N, ns.alpha),
        mc,
        ns.output,
        ns.fmt,
        ns.as_stated,
        ns.delta,
        tuple(ns.p_list),
        None if ns.r_list is None else tuple(ns.r_list),
        ns.kmax,
        ns.max_order,
        ns.function,
        tol,
    )


def _env_workers():
    return MCConfig().workers


def main(argv=None):
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_PASS
    try:
        cfg = config_from_args(ns)
        if cfg.output:
            parent = os.path.dirname(os.path.abspath(cfg.output))
            if not os.path.isdir(parent) or not os.access(parent, os.W_OK):
                raise OSError(f"cannot write to {cfg.output}")
        return run(cfg)
    except (DomainError, ValueError, OSError, KeyError) as exc:
        print(f"bergman-bloch: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
