"""Command-line driver.

Usage::

    vacuumless spectrum --window -3:3
    vacuumless factorize
    vacuumless coherent --choice 3 --z 2,1
    vacuumless scan-uncertainty --choice 1 --rmax 0.6 --rsteps 3
    vacuumless moments --choice 3 --measure choice3-gaussian
    vacuumless resolution --choice 3 --pmax 10
    vacuumless fock --fock-n 24
    vacuumless report

Data goes to stdout (or ``--out``) as CSV or JSON with 17 significant
digits; diagnostics go to stderr. Exit codes: 0 pass, 1 verification
failure, 2 usage or configuration error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass

import numpy as np

from . import acceptance
from . import coherent as coh
from .doubled import check_compatibility, theta_from_coeffs
from .graphene import GrapheneParams, coefficients_for_choice, fock_eigencheck, graphene_spectrum
from .ladder import factorization_residual
from .spectra import IndexWindow

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def fmt(x) -> str:
    """Fixed 17-significant-digit rendering used for every numeric cell."""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        x = float(x)
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        if math.isnan(x):
            return "nan"
        return format(x, ".17g")
    return str(x)


@dataclass
class Table:
    columns: list
    rows: list

    def render(self, kind: str) -> str:
        if kind == "json":
            records = [{c: fmt(v) for c, v in zip(self.columns, row)} for row in self.rows]
            return json.dumps({"columns": self.columns, "rows": records}, indent=2) + "\n"
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(self.columns)
        for row in self.rows:
            writer.writerow([fmt(v) for v in row])
        return buf.getvalue()


def parse_z(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 1:
            return complex(float(parts[0]), 0.0)
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"--z expects 're,im', got {text!r}")


def _window(text: str) -> IndexWindow:
    try:
        return IndexWindow.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _positive(kind):
    def conv(text):
        val = kind(text)
        if val <= 0:
            raise argparse.ArgumentTypeError(f"expected a positive value, got {text!r}")
        return val
    return conv


def _params(cfg) -> GrapheneParams:
    return GrapheneParams(c=cfg.c)


def _theta(cfg):
    return theta_from_coeffs(coefficients_for_choice(_params(cfg), cfg.choice or 3))


def _check_label(t, z):
    rho = coh.radius_of_convergence(t)
    if not rho.contains(abs(z)):
        raise UsageError(f"|z| = {abs(z)!r} lies outside the disk of radius {rho}")


# ---------------------------------------------------------------------------
# commands; each returns (Table, exit code)

def cmd_spectrum(cfg):
    spec = graphene_spectrum(_params(cfg))
    return Table(["p", "eps"], [(p, spec(p)) for p in cfg.window]), EXIT_OK


def cmd_factorize(cfg):
    params = _params(cfg)
    choices = [cfg.choice] if cfg.choice else [1, 2, 3]
    rows = []
    ok = True
    for ch in choices:
        c = coefficients_for_choice(params, ch)
        res = factorization_residual(c, cfg.window)
        compat = check_compatibility(c, cfg.trunc)
        r_ok = abs(c.alpha(1) - c.beta(0)) <= 1e-14 * max(abs(c.alpha(1)), abs(c.beta(0)))
        ok &= res <= 1e-12 and compat
        rows.append((ch, cfg.window.lo, cfg.window.hi, res, compat, cfg.trunc, r_ok))
    cols = ["choice", "lo", "hi", "factorization_residual", "compatible", "k_max", "alpha1_eq_beta0"]
    return Table(cols, rows), EXIT_OK if ok else EXIT_FAIL


def _closed_normalization(choice, r):
    if choice == 1:
        return math.sqrt(1 - r * r)
    if choice == 3:
        return math.exp(-r * r / 2)
    return math.nan


def cmd_coherent(cfg):
    t = _theta(cfg)
    z = cfg.z
    _check_label(t, z)
    s = coh.build_coherent(t, z, cfg.tol)
    res = coh.eigen_residual(s, t)
    choice = cfg.choice or 3
    closed = _closed_normalization(choice, abs(z))
    cols = ["choice", "z_re", "z_im", "K", "tail_bound", "eigen_residual", "normalization",
            "log_normalization", "normalization_closed_form", "normalization_error"]
    row = (choice, z.real, z.imag, s.K, s.tail_bound, res, s.normalization, s.log_normalization,
           closed, abs(s.normalization - closed) if not math.isnan(closed) else math.nan)
    return Table(cols, [row]), EXIT_OK


def cmd_scan_uncertainty(cfg):
    t = _theta(cfg)
    radii = np.linspace(0.0, cfg.rmax, cfg.rsteps) if cfg.rsteps > 1 else np.array([cfg.rmax])
    rows = []
    for r in radii:
        _check_label(t, r)
    for r in radii:
        for j in range(cfg.asteps):
            ang = 2 * math.pi * j / cfg.asteps
            z = complex(r * math.cos(ang), r * math.sin(ang)) if j else complex(r, 0.0)
            u = coh.uncertainty_product(t, z)
            rows.append((float(r), ang, u.direct, u.closed_form, u.commutator_bound, u.ratio))
    cols = ["abs_z", "arg_z", "dxdp_direct", "dxdp_closed", "commutator_bound", "ratio"]
    return Table(cols, rows), EXIT_OK


def cmd_moments(cfg):
    t = _theta(cfg)
    m = coh.RadialMeasure.named(cfg.measure)
    rows = coh.moment_table(m, t, cfg.kmax)
    cols = ["k", "moment", "log_target", "target", "residual"]
    flag = coh.support_on_boundary(m, coh.radius_of_convergence(t))
    if flag:
        print(f"warning: measure {m.label} has support on or beyond the radius of convergence",
              file=sys.stderr)
    return Table(cols, rows), EXIT_OK


def cmd_resolution(cfg):
    t = _theta(cfg)
    m = coh.RadialMeasure.named(cfg.measure)
    R = coh.resolution_matrix(t, m, cfg.pmax)
    rows = [(p, q, R[p, q].real, R[p, q].imag, abs(R[p, q]))
            for p in range(cfg.pmax + 1) for q in range(cfg.pmax + 1)]
    return Table(["p", "q", "residual_re", "residual_im", "residual_abs"], rows), EXIT_OK


def cmd_fock(cfg):
    rep = fock_eigencheck(_params(cfg), cfg.fock_n)
    rows = [(r["n2"], r["sign"], r["target"], r["eigenvalue"], r["error"], r["overlap"]) for r in rep.rows]
    print(f"hermiticity defect {rep.hermiticity_defect!r}; gram defect {rep.gram_defect!r}",
          file=sys.stderr)
    code = EXIT_OK if rep.passed(1e-10) else EXIT_FAIL
    return Table(["n2", "sign", "target", "eigenvalue", "error", "overlap"], rows), code


def cmd_report(cfg):
    results = acceptance.run_all(_params(cfg))
    for r in results:
        print(r.line(), file=sys.stderr)
    rows = [(r.number, r.name, r.passed, r.detail) for r in results]
    code = EXIT_OK if all(r.passed for r in results) else EXIT_FAIL
    return Table(["criterion", "name", "passed", "detail"], rows), code


COMMANDS = {
    "spectrum": (cmd_spectrum, "table of (p, eps_p) over a window"),
    "factorize": (cmd_factorize, "per-choice factorization and compatibility report"),
    "coherent": (cmd_coherent, "truncation, tail bound and eigen residual for one z"),
    "scan-uncertainty": (cmd_scan_uncertainty, "uncertainty product over a radial grid"),
    "moments": (cmd_moments, "moment condition check for a radial measure"),
    "resolution": (cmd_resolution, "resolution-of-identity residual matrix"),
    "fock": (cmd_fock, "Fock-space eigencheck of the graphene Hamiltonian"),
    "report": (cmd_report, "run every acceptance check; exit 0 iff all pass"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--choice", type=int, choices=(1, 2, 3), default=None,
                        help="coefficient choice (default 3; factorize runs all)")
    common.add_argument("--c", type=_positive(float), default=1.0, help="energy scale v_F/xi")
    common.add_argument("--window", type=_window, default=IndexWindow(-32, 32), help="lo:hi")
    common.add_argument("--trunc", type=_positive(int), default=64, help="truncation K")
    common.add_argument("--fock-n", type=int, default=24, help="Fock truncation N")
    common.add_argument("--tol", type=_positive(float), default=1e-14, help="tail tolerance")
    common.add_argument("--z", type=parse_z, default=complex(0.5, 0.0),
                        help="label as 're,im'")
    common.add_argument("--rmax", type=float, default=0.9)
    common.add_argument("--rsteps", type=_positive(int), default=10)
    common.add_argument("--asteps", type=_positive(int), default=1)
    common.add_argument("--measure", default="choice3-gaussian",
                        help="choice3-gaussian, choice1-atom or file:<path>")
    common.add_argument("--kmax", type=int, default=20, help="highest moment order")
    common.add_argument("--pmax", type=int, default=10, help="largest p, q in the resolution matrix")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--out", default=None, help="output path (default stdout)")

    parser = argparse.ArgumentParser(prog="vacuumless", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name, (_, helptext) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=helptext)
    return parser


_VALUE_FLAGS = ("--window", "--z")


def _join_negative_values(argv):
    """``--window -3:3`` -> ``--window=-3:3`` so argparse does not read a flag."""
    out = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            if nxt is None:
                out.append(tok)
            else:
                out.append(f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv=None) -> int:
    parser = build_parser()
    argv = _join_negative_values(sys.argv[1:] if argv is None else list(argv))
    try:
        cfg = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if cfg.fock_n < 4 and cfg.command == "fock":
        print("error: --fock-n must be at least 4", file=sys.stderr)
        return EXIT_USAGE
    if cfg.rmax < 0:
        print("error: --rmax must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    fn, _ = COMMANDS[cfg.command]
    try:
        table, code = fn(cfg)
    except (UsageError, coh.DiskError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (coh.QuadratureError, coh.ConvergenceError) as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_FAIL
    text = table.render(cfg.format)
    if cfg.out:
        with open(cfg.out, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
