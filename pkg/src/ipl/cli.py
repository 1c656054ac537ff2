"""Command-line front end.

Every run resolves a flat configuration (built-in defaults, then config
file, then flags), writes the requested CSV next to a JSON report that
embeds the fully resolved configuration, and optionally renders an SVG
figure.  All numbers are serialized with shortest round-trip precision
and nothing time- or path-dependent enters the outputs, so identical
invocations produce byte-identical files.

Exit codes: 0 success, 2 validation error, 3 numerical-consistency failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import analysis, continuum, eig, gausspoly, lattice, symmetry
from .errors import (
    ConsistencyError,
    IplError,
    MissingPartnerError,
    MissingStateError,
    ValidationError,
)


# ---------------------------------------------------------------------------
# serialization helpers
# ---------------------------------------------------------------------------

def fmt(value) -> str:
    """Shortest round-trip decimal for floats; plain str otherwise."""
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def write_csv(path: str, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt(x) for x in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def _jsonable(obj):
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return [_jsonable(x) for x in obj.tolist()]
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(x) for x in obj]
    return obj


def write_json(path: str, payload: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(_jsonable(payload), fh, indent=2, sort_keys=True)
        fh.write("\n")


# ---------------------------------------------------------------------------
# configuration resolution
# ---------------------------------------------------------------------------

COMMANDS = {
    "discrete-spectrum": {
        "n_cells": (int, None),
        "epsilon": (float, 0.0),
        "d1": (float, 1.0),
        "d2": (float, -1.0),
        "full": (bool, False),
    },
    "continuum-spectrum": {
        "epsilon": (float, None),
        "a": (float, 1.0),
        "L": (float, None),
        "n_max": (int, 5),
        "ascending": (bool, False),
    },
    "continuum-states": {
        "epsilon": (float, None),
        "a": (float, 1.0),
        "L": (float, None),
        "n": (int, None),
        "sign": (str, "+"),
        "norm_convention": (str, "unit-total"),
        "xi_samples": (int, 1001),
        "xi_span": (float, 0.0),   # 0 -> 8 sqrt(g)
    },
    "symmetry-check": {
        "epsilon": (float, None),
        "a": (float, 1.0),
        "L": (float, None),
        "n_max": (int, 4),
    },
    "localization-scan": {
        "n_cells": (int, None),
        "epsilons": (str, None),
        "ipr_factor": (float, 4.0),
    },
    "compare": {
        "n_cells": (int, None),
        "epsilon": (float, None),
        "a": (float, 1.0),
    },
    "oracle-check": {
        "grid_points": (int, 1001),
    },
}

COMMON = {"output": (str, ""), "plot": (bool, False), "config": (str, "")}


def load_config_file(path: str) -> dict:
    """Flat key=value text or a JSON object; both feed the same resolution."""
    try:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ValidationError(f"cannot read config file {path!r}: {exc}")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config file {path!r} is not valid JSON: {exc}")
        if not isinstance(data, dict):
            raise ValidationError("JSON config must be an object")
        return {str(k): v for k, v in data.items()}
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValidationError(f"config line {lineno} is not key=value: {line!r}")
        key, _, val = line.partition("=")
        out[key.strip()] = val.strip()
    return out


def _coerce(name: str, value, typ):
    if typ is bool:
        if isinstance(value, bool):
            return value
        if str(value).lower() in ("1", "true", "yes", "on"):
            return True
        if str(value).lower() in ("0", "false", "no", "off"):
            return False
        raise ValidationError(f"{name}: expected a boolean, got {value!r}")
    try:
        out = typ(value)
    except (TypeError, ValueError):
        raise ValidationError(f"{name}: expected {typ.__name__}, got {value!r}")
    if typ is float and not math.isfinite(out):
        raise ValidationError(f"{name} must be finite")
    return out


def resolve_config(command: str, flags: dict) -> dict:
    """defaults <- config file <- flags, rejecting unknown keys."""
    schema = dict(COMMANDS[command])
    schema.update(COMMON)
    file_cfg = {}
    cfg_path = flags.get("config") or ""
    if cfg_path:
        file_cfg = load_config_file(cfg_path)
        unknown = set(file_cfg) - set(schema) - {"command"}
        if unknown:
            raise ValidationError(f"unknown config keys: {sorted(unknown)}")
    resolved = {}
    for key, (typ, default) in schema.items():
        if flags.get(key) is not None:
            resolved[key] = _coerce(key, flags[key], typ)
        elif key in file_cfg:
            resolved[key] = _coerce(key, file_cfg[key], typ)
        else:
            resolved[key] = default
    missing = [k for k, v in resolved.items() if v is None]
    if missing:
        raise ValidationError(f"missing required parameters: {sorted(missing)}")
    if not resolved["output"]:
        resolved["output"] = "ipl_" + command.replace("-", "_")
    resolved["command"] = command
    return resolved


# ---------------------------------------------------------------------------
# command implementations
# ---------------------------------------------------------------------------

def _report(cfg: dict, results: dict) -> dict:
    return {"command": cfg["command"], "config": {k: v for k, v in cfg.items() if k != "command"},
            "results": results}


def cmd_discrete_spectrum(cfg: dict) -> str:
    spec = lattice.LatticeSpec.equidistant(
        cfg["n_cells"],
        coupling0=cfg["epsilon"] * (cfg["d1"] - cfg["d2"]) / 2.0,
        d1=cfg["d1"],
        d2=cfg["d2"],
    )
    builder = lattice.build_full_hamiltonian if cfg["full"] else lattice.build_reduced_hamiltonian
    system = eig.eig_sym(builder(spec).dense())
    rows = []
    for i, e in enumerate(system.eigenvalues):
        sign = "+" if e > 0 else ("-" if e < 0 else "0")
        rows.append((i, sign, float(e)))
    write_csv(cfg["output"] + ".csv", ["level", "sign", "energy"], rows)
    write_json(cfg["output"] + ".json", _report(cfg, {
        "n_states": system.dim,
        "max_residual": system.max_residual,
        "min_energy": float(system.eigenvalues[0]),
        "max_energy": float(system.eigenvalues[-1]),
    }))
    if cfg["plot"]:
        from . import plotting
        plotting.plot_eigenvalue_stem(system.eigenvalues, cfg["output"] + ".svg",
                                      title="lattice spectrum")
    return f"{system.dim} eigenvalues in [{fmt(system.eigenvalues[0])}, {fmt(system.eigenvalues[-1])}]"


def cmd_continuum_spectrum(cfg: dict) -> str:
    params = continuum.derive_params(cfg["epsilon"], cfg["a"], cfg["L"])
    levels = continuum.analytic_spectrum(params, cfg["n_max"], ascending=cfg["ascending"])
    rows = [(lv.n, lv.sign, lv.energy) for lv in levels]
    write_csv(cfg["output"] + ".csv", ["level", "sign", "energy"], rows)
    write_json(cfg["output"] + ".json", _report(cfg, {
        "lambda": params.lam, "g": params.g, "n_levels": len(levels),
        "degenerate": params.degenerate,
    }))
    if cfg["plot"]:
        from . import plotting
        plotting.plot_spectrum(rows, cfg["output"] + ".svg", title="continuum spectrum")
    return f"{len(levels)} levels (lambda={fmt(params.lam)}, g={fmt(params.g)})"


def cmd_continuum_states(cfg: dict) -> str:
    params = continuum.derive_params(cfg["epsilon"], cfg["a"], cfg["L"])
    state = continuum.build_eigenstate(params, cfg["n"], cfg["sign"], cfg["norm_convention"])
    span = cfg["xi_span"] if cfg["xi_span"] > 0 else 8.0 * math.sqrt(params.g)
    if cfg["xi_samples"] < 2:
        raise ValidationError("xi_samples must be >= 2")
    xi = np.linspace(-span, span, cfg["xi_samples"])
    psi1, psi2 = state.component_values(xi)
    write_csv(cfg["output"] + ".csv", ["xi", "psi1", "psi2"],
              zip(xi.tolist(), psi1.tolist(), psi2.tolist()))
    write_json(cfg["output"] + ".json", _report(cfg, {
        "lambda": params.lam, "g": params.g, "energy": state.energy,
        "level": state.level, "sign": state.sign,
        "coeffs_a": state.coeffs_a, "coeffs_b": state.coeffs_b,
        "total_norm_sq": state.total_norm_sq(),
    }))
    if cfg["plot"]:
        from . import plotting
        plotting.plot_state_profile(xi, psi1, psi2, cfg["output"] + ".svg",
                                    title=f"level {state.level}{state.sign} profile")
    return f"level {state.level}{state.sign} at energy {fmt(state.energy)}"


SYMMETRY_IDENTITY_TOL = 1e-12
SYMMETRY_PARTNER_TOL = 1e-11


def cmd_symmetry_check(cfg: dict) -> str:
    params = continuum.derive_params(cfg["epsilon"], cfg["a"], cfg["L"])
    report = symmetry.symmetry_report(params, cfg["n_max"])
    payload = _report(cfg, {
        "commutator_residual_P": report.commutator_residual_P,
        "anticommutator_residual_V": report.anticommutator_residual_V,
        "parity_signs": report.parity_signs,
        "partner_energy_checks": [
            {"energy": e, "partner_energy": pe, "residual": r}
            for e, pe, r in report.partner_energy_checks
        ],
    })
    write_json(cfg["output"] + ".json", payload)
    ok = (report.commutator_residual_P <= SYMMETRY_IDENTITY_TOL
          and report.anticommutator_residual_V <= SYMMETRY_IDENTITY_TOL
          and all(r <= SYMMETRY_PARTNER_TOL for _, _, r in report.partner_energy_checks))
    if not ok:
        raise ConsistencyError("symmetry residuals exceed tolerance; see JSON report")
    return (f"[H,P]={report.commutator_residual_P:.2e} "
            f"{{H,V}}={report.anticommutator_residual_V:.2e} over {cfg['n_max']} levels")


def cmd_localization_scan(cfg: dict) -> str:
    try:
        eps_list = [float(tok) for tok in str(cfg["epsilons"]).split(",") if tok.strip()]
    except ValueError:
        raise ValidationError(f"cannot parse epsilon list {cfg['epsilons']!r}")
    report = analysis.localization_scan(cfg["n_cells"], eps_list, cfg["ipr_factor"])
    rows = []
    for e in report.epsilons:
        for rec in report.records[e]:
            rows.append((e, rec.index, rec.energy, rec.ipr, rec.width_cells, rec.classification))
    write_csv(cfg["output"] + ".csv",
              ["epsilon", "state_index", "energy", "ipr", "width_cells", "class"], rows)
    write_json(cfg["output"] + ".json", _report(cfg, {
        "ipr_threshold": report.ipr_threshold,
        "localized_fraction": {fmt(e): report.localized_fraction(e) for e in report.epsilons},
        "predicted_width_cells": {fmt(e): report.predicted_width_cells[e] for e in report.epsilons},
    }))
    if cfg["plot"]:
        from . import plotting
        plotting.plot_scan(report, cfg["output"] + ".svg")
    fractions = ", ".join(f"{e:g}:{report.localized_fraction(e):.3f}" for e in report.epsilons)
    return f"localized fractions {fractions}"


def cmd_compare(cfg: dict) -> str:
    rep = analysis.compare_discrete_continuum(cfg["n_cells"], cfg["epsilon"], cfg["a"])
    rows = zip(rep.cells.tolist(), rep.x.tolist(),
               rep.discrete_prob.tolist(), rep.continuum_prob.tolist())
    write_csv(cfg["output"] + ".csv", ["cell", "x", "discrete_prob", "continuum_prob"], rows)
    write_json(cfg["output"] + ".json", _report(cfg, {
        "ground_energy": rep.ground_energy,
        "rms_deviation": rep.rms_deviation,
        "discrete_width": rep.discrete_width,
        "continuum_width": rep.continuum_width,
        "predicted_width": rep.predicted_width,
        "width_ratio": rep.width_ratio,
        "half_span": rep.half_span,
    }))
    if cfg["plot"]:
        from . import plotting
        plotting.plot_comparison(rep.cells, rep.discrete_prob, rep.continuum_prob,
                                 cfg["output"] + ".svg")
    return (f"rms={rep.rms_deviation:.3e} width_ratio={rep.width_ratio:.4f} "
            f"(discrete {rep.discrete_width:.3f} / continuum {rep.continuum_width:.3f})")


def _oracle_battery(grid_points: int) -> list[dict]:
    checks = []

    def add(name, value, bound):
        checks.append({"check": name, "value": float(value), "bound": float(bound),
                       "ok": bool(value <= bound)})

    rng = np.random.default_rng(7)
    m = rng.standard_normal((30, 30))
    m = m + m.T
    sys_full = eig.eig_sym(m)
    w_ref, _ = eig.jacobi_eigh(m)
    add("jacobi_vs_lapack", np.abs(sys_full.eigenvalues - w_ref).max(), 1e-9)

    g = 0.05
    xi = np.linspace(-12 * math.sqrt(g), 12 * math.sqrt(g), 40001)
    worst = 0.0
    for k in range(0, 9, 2):
        num = np.trapezoid(xi**k * np.exp(-(xi**2) / g), xi)
        ana = gausspoly.gaussian_moment(k, g)
        worst = max(worst, abs(num - ana) / ana)
    add("gaussian_moments_vs_quadrature", worst, 1e-7)

    params = continuum.params_from_lambda_g(1.5, 0.05)
    worst = 0.0
    for n in range(0, 7):
        for sign in ("+", "-"):
            if n == 0 and sign == "-":
                continue
            state = continuum.build_eigenstate(params, n, sign)
            worst = max(worst, continuum.eigen_residual_coeff(params, state))
    add("coefficient_eigen_residual", worst, 1e-11)

    worst = 0.0
    for n, sign in ((1, "-"), (2, "-"), (1, "+"), (2, "+")):
        built = continuum.build_eigenstate(params, n, sign, "paper")
        closed = continuum.closed_form_state(params, n, sign, "paper")
        worst = max(worst,
                    gausspoly.max_abs(
                        gausspoly.add(built.coeffs_a, -closed.coeffs_a),
                        gausspoly.add(built.coeffs_b, -closed.coeffs_b)))
    add("recurrence_vs_closed_forms", worst, 1e-12)

    npts = grid_points if grid_points % 2 else grid_points + 1
    op = continuum.discretize_linear(params, n_points=npts)
    got = continuum.lowest_physical_levels(op, 5)
    want = np.sort([lv.energy for lv in continuum.analytic_spectrum(params, 2)])
    add("linear_grid_vs_analytic", np.abs((got - want) / want).max(), 5e-4)

    rng = np.random.default_rng(11)
    worst_p = worst_v = 0.0
    for _ in range(10):
        p = rng.standard_normal(int(rng.integers(1, 7)))
        q = rng.standard_normal(int(rng.integers(1, 7)))
        worst_p = max(worst_p, symmetry.commutator_p_residual(params, p, q))
        worst_v = max(worst_v, symmetry.anticommutator_v_residual(params, p, q))
    add("parity_commutator", worst_p, 1e-12)
    add("chiral_anticommutator", worst_v, 1e-12)
    return checks


def cmd_oracle_check(cfg: dict) -> str:
    checks = _oracle_battery(cfg["grid_points"])
    write_json(cfg["output"] + ".json", _report(cfg, {"checks": checks}))
    bad = [c["check"] for c in checks if not c["ok"]]
    if bad:
        raise ConsistencyError(f"oracle checks failed: {bad}")
    return f"{len(checks)} oracle checks passed"


RUNNERS = {
    "discrete-spectrum": cmd_discrete_spectrum,
    "continuum-spectrum": cmd_continuum_spectrum,
    "continuum-states": cmd_continuum_states,
    "symmetry-check": cmd_symmetry_check,
    "localization-scan": cmd_localization_scan,
    "compare": cmd_compare,
    "oracle-check": cmd_oracle_check,
}


# ---------------------------------------------------------------------------
# argument parsing and entry point
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ipl",
        description="Spectra and localization of isospectrally patterned lattices "
                    "and their continuum model.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    flag_names = {
        "n_cells": "--n-cells", "epsilon": "--epsilon", "d1": "--d1", "d2": "--d2",
        "full": "--full", "a": "--a", "L": "--L", "n_max": "--n-max",
        "ascending": "--ascending", "n": "--n", "sign": "--sign",
        "norm_convention": "--norm-convention", "xi_samples": "--xi-samples",
        "xi_span": "--xi-span", "epsilons": "--epsilons", "ipr_factor": "--ipr-factor",
        "grid_points": "--grid-points",
    }
    for command, schema in COMMANDS.items():
        p = sub.add_parser(command)
        for key, (typ, _default) in schema.items():
            if typ is bool:
                p.add_argument(flag_names[key], dest=key, action="store_const", const=True)
            elif key == "sign":
                p.add_argument(flag_names[key], dest=key, choices=["+", "-"])
            else:
                p.add_argument(flag_names[key], dest=key, type=typ)
        p.add_argument("--output", "-o", dest="output")
        p.add_argument("--plot", dest="plot", action="store_const", const=True)
        p.add_argument("--config", dest="config")
    return parser


def run(command: str, flags: dict) -> int:
    """Resolve the configuration, execute, and print the one-line summary."""
    try:
        cfg = resolve_config(command, flags)
        summary = RUNNERS[command](cfg)
    except (ValidationError, MissingStateError, MissingPartnerError) as exc:
        print(f"ipl {command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"ipl {command}: output error: {exc}", file=sys.stderr)
        return 2
    except ConsistencyError as exc:
        print(f"ipl {command}: consistency failure: {exc}", file=sys.stderr)
        return 3
    print(f"ipl {command}: {summary} -> {cfg['output']}.*")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    flags = {k: v for k, v in vars(args).items() if k != "command"}
    return run(args.command, flags)


if __name__ == "__main__":
    sys.exit(main())
