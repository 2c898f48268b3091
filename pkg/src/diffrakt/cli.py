"""Command-line front end.

Exit codes: 0 success, 2 invalid input, 3 a numerical check failed,
4 a resource cap was hit, 64 usage error.
"""

from __future__ import annotations

import argparse
import sys
from typing import Sequence

import numpy as np

from .density import (
    Density,
    PointMeasure,
    autocorrelation,
    bragg_spectrum,
    diffraction,
    homometric,
)
from .demos import DEMOS, run_demo, z6_sweep
from .exceptions import DiffraktError, NumericalContractError, ValidationError
from .inverse import (
    circle_family_check,
    extract_phase_from_density,
    gm_rational_check,
    gm_support_check,
    solve_family,
)
from .io import (
    density_from_json,
    dumps,
    group_from_json,
    function_to_json,
    measure_from_json,
    measure_to_json,
    phase_form_to_json,
    read_json,
    rows_to_csv,
)
from .phaseforms import first_divergent_moment, moments, same_phase_form
from .process import build_process, find_translation, verify
from .relators import covering_number, n_zero, phase_group_structure, reduced_length

EXIT_USAGE = 64


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--in", dest="inputs", action="append", default=[], metavar="PATH",
                        help="input JSON file ('-' for stdin); repeat for two-input commands")
    common.add_argument("--out", metavar="PATH", help="write here instead of stdout")
    common.add_argument("--tol", type=float, default=1e-9,
                        help="relative threshold for the Bragg spectrum (default 1e-9)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--cap", type=int, metavar="ORDER", help="largest group order accepted")
    common.add_argument("--moments", type=int, default=None, metavar="M", help="moment depth")
    common.add_argument("--samples", type=int, default=600, metavar="N",
                        help="parameter samples for sweeps (default 600)")

    parser = _Parser(prog="diffrakt", description="Homometry on finite abelian groups.")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND", parser_class=_Parser)
    sub.required = True
    helps = {
        "diffract": "diffraction of a density",
        "autocorr": "autocorrelation of a density",
        "solve": "all densities with a given diffraction",
        "extract": "diffraction and phase form of a density",
        "homometric": "compare two densities",
        "moments": "phase-form moments of one density, or where two first differ",
        "relators": "relator group report",
        "process-verify": "build the process model of a density and check its identities",
        "gm-check": "unit-orbit closure of the Bragg spectrum (cyclic groups)",
        "circle-check": "Fourier coefficients of the circle-group family",
        "demo": "worked examples",
    }
    for name, text in helps.items():
        p = sub.add_parser(name, parents=[common], help=text, description=text)
        if name == "demo":
            p.add_argument("name", choices=sorted(DEMOS))
    return parser


def _inputs(args, count: int) -> list:
    if len(args.inputs) != count:
        raise ValidationError(f"{args.command} needs exactly {count} --in file(s), got {len(args.inputs)}")
    return [read_json(p) for p in args.inputs]


def _density(data: dict, args) -> Density:
    if data.get("kind") == "diffraction":
        raise ValidationError("expected a density, got a diffraction file")
    return density_from_json(data, args.cap)


def _omega(data: dict, args) -> PointMeasure:
    """A diffraction file as is, or the diffraction of a density file."""
    if data.get("kind") == "diffraction":
        omega = measure_from_json(data, args.cap)
        return PointMeasure(omega.group, omega.weights, args.tol)
    return diffraction(_density(data, args), args.tol)


def _csv_table(group, values, label: str) -> str:
    header = [f"k{i + 1}" for i in range(group.rank)] + [label]
    rows = [[*map(int, group.coords(i)), float(v)] for i, v in enumerate(values)]
    return rows_to_csv(header, rows)


def cmd_diffract(args):
    rho = _density(_inputs(args, 1)[0], args)
    omega = diffraction(rho, args.tol)
    if args.format == "csv":
        return _csv_table(omega.group, omega.weights, "omega")
    out = measure_to_json(omega)
    out["spectrum"] = [list(k) for k in bragg_spectrum(omega)]
    return out


def cmd_autocorr(args):
    rho = _density(_inputs(args, 1)[0], args)
    gamma = autocorrelation(rho)
    if args.format == "csv":
        if np.any(np.abs(gamma.values.imag) > 1e-12 * max(1.0, float(np.max(np.abs(gamma.values))))):
            raise ValidationError("CSV output needs a real autocorrelation")
        return _csv_table(rho.group, gamma.values.real, "gamma")
    return function_to_json(gamma)


def cmd_solve(args):
    fam = solve_family(_omega(_inputs(args, 1)[0], args), args.tol)
    return fam.to_json()


def cmd_extract(args):
    res = extract_phase_from_density(_density(_inputs(args, 1)[0], args), args.tol)
    return {
        "omega": measure_to_json(res.omega),
        "phase_form": phase_form_to_json(res.form),
        "negated": res.negated,
    }


def cmd_homometric(args):
    d1, d2 = (_density(d, args) for d in _inputs(args, 2))
    same = homometric(d1, d2, args.tol)
    out = {"homometric": same}
    if same:
        e1, e2 = extract_phase_from_density(d1, args.tol), extract_phase_from_density(d2, args.tol)
        out["negated"] = [e1.negated, e2.negated]
        out["same_phase_form"] = same_phase_form(e1.form, e2.form)
        u = find_translation(build_process(e1.omega, e1.form), build_process(e1.omega, e2.form))
        out["translation"] = list(u) if u is not None else None
        depth = 8 if args.moments is None else args.moments
        out["first_divergent_moment"] = first_divergent_moment(e1.form, e2.form, depth)
        out["moment_depth"] = depth
    return out


def cmd_moments(args):
    if len(args.inputs) not in (1, 2):
        raise ValidationError("moments needs one or two --in files")
    depth = 6 if args.moments is None else args.moments
    if depth < 1:
        raise ValidationError("--moments must be >= 1")
    forms = [extract_phase_from_density(_density(d, args), args.tol).form for d in _inputs(args, len(args.inputs))]
    table = moments(forms[0], depth)
    rows = [{"relator": str(v), "length": reduced_length(v), "turn": float(t)} for v, t in table.entries]
    if args.format == "csv":
        return rows_to_csv(["relator", "length", "turn"], [[r["relator"], r["length"], r["turn"]] for r in rows])
    out = {"order": depth, "entries": rows}
    if len(forms) == 2:
        if not forms[0].basis.same_as(forms[1].basis):
            raise ValidationError("the two densities have different Bragg spectra")
        out["first_divergent_moment"] = first_divergent_moment(forms[0], forms[1], depth)
    return out


def cmd_relators(args):
    omega = _omega(_inputs(args, 1)[0], args)
    fam = solve_family(omega, args.tol)
    lat = fam.basis.lattice
    structure = phase_group_structure(lat)
    n0 = n_zero(lat)
    r, bound = covering_number(fam.basis)
    if lat.is_trivial:
        summary = "Z trivial; unique homometry class"
    else:
        summary = f"Z generated by relators of length <= {n0}; phase forms {structure}"
    return {
        "summary": summary,
        "free_generators": [list(k) for k in fam.basis.free],
        "torsion_generators": [list(k) for k in fam.basis.torsion],
        "p": fam.p,
        "q": fam.q,
        "relator_basis": [str(v) for v in lat.generators],
        "lattice_hnf": [list(row) for row in lat.lattice_hnf],
        "n0": n0,
        "covering_number": r,
        "bound": bound,
        "phase_group": str(structure),
    }


def cmd_process_verify(args):
    res = extract_phase_from_density(_density(_inputs(args, 1)[0], args), args.tol)
    model = build_process(res.omega, res.form)
    depth = 4 if args.moments is None else args.moments
    report = verify(model, moment_order=depth)
    out = {"model": model.to_json(), "checks": report, "passed": all(c["passed"] for c in report)}
    if not out["passed"]:
        failed = ", ".join(c["name"] for c in report if not c["passed"])
        raise NumericalContractError(f"process identities failed: {failed}")
    return out


def cmd_gm_check(args):
    data = _inputs(args, 1)[0]
    if "support" in data:
        g = group_from_json(data, args.cap)
        support = data["support"]
        if not isinstance(support, list):
            raise ValidationError("'support' must be a list")
        return gm_support_check(g, support).to_json()
    return gm_rational_check(_density(data, args), args.tol).to_json()


def cmd_circle_check(args):
    data = _inputs(args, 1)[0]
    raw = data.get("values")
    if not isinstance(raw, list):
        raise ValidationError("expected 'values': [[k, re, im], ...]")
    vals = {}
    for entry in raw:
        if (not isinstance(entry, list) or len(entry) != 3 or not isinstance(entry[0], int)
                or not all(isinstance(x, (int, float)) for x in entry[1:])):
            raise ValidationError(f"bad entry {entry!r}; expected [k, re, im]")
        vals[entry[0]] = complex(entry[1], entry[2])
    window = data.get("window")
    report = circle_family_check(vals, window)
    if args.format == "csv":
        lo, _ = report.window
        return rows_to_csv(["k", "re", "im", "modulus"],
                           [[lo + i, z.real, z.imag, abs(z)] for i, z in enumerate(report.coefficients)])
    return report.to_json()


def cmd_demo(args):
    if args.name == "z6" and args.format == "csv":
        header, rows = z6_sweep(args.samples)
        return rows_to_csv(header, rows)
    if args.format == "csv":
        raise ValidationError("CSV output is only available for the z6 sweep")
    report = run_demo(args.name)
    if not report["passed"]:
        raise NumericalContractError(f"demo {args.name} failed")
    return report


COMMANDS = {
    "diffract": cmd_diffract,
    "autocorr": cmd_autocorr,
    "solve": cmd_solve,
    "extract": cmd_extract,
    "homometric": cmd_homometric,
    "moments": cmd_moments,
    "relators": cmd_relators,
    "process-verify": cmd_process_verify,
    "gm-check": cmd_gm_check,
    "circle-check": cmd_circle_check,
    "demo": cmd_demo,
}


def _emit(result, out: str | None) -> None:
    text = result if isinstance(result, str) else dumps(result)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = _parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else 0
    if args.cap is not None and args.cap < 1:
        sys.stderr.write("diffrakt: error: --cap must be positive\n")
        return EXIT_USAGE
    if not args.tol > 0:
        sys.stderr.write("diffrakt: error: --tol must be positive\n")
        return EXIT_USAGE
    try:
        result = COMMANDS[args.command](args)
    except DiffraktError as exc:
        sys.stderr.write(f"diffrakt {args.command}: {exc}\n")
        return exc.exit_code
    _emit(result, args.out)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
