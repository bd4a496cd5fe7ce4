"""Command-line interface.

Subcommands: drive-eval, coeffs, mechanics, moments, nongauss, qfi, cfi,
gravimetry, oracle-check, sweep. Model and state are described by a flat
JSON config (see CONFIG_KEYS); outputs are deterministic CSV or JSON whose
header embeds the resolved-config fingerprint, so identical configs yield
byte-identical files.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import hashlib
import json
import math
import os
import sys

import numpy as np

from . import __version__
from . import mechanics as mech_mod
from .coefficients import (CatalogMiss, derived_scalars, f_closed_form,
                           f_path)
from .mechanics import j_coefficients, solve_subsystem
from .metrology import (D2_VALIDITY, cfi_homodyne, gravimetry,
                        qfi_coefficients, qfi_thermal)
from .moments import covariance, covariance_from_moments, evolve_moments, quadratures
from .nongaussianity import report as nongauss_report
from .oracle import oracle_moments, propagate, recommended_dims
from .params import (ColdAtoms, Drive, FabryPerot, InitialState, Levitated,
                     ModelSpec, coupling_constant, evaluate_drive)

CONFIG_KEYS = {
    "omega_c_ratio": 0.0,
    "g0": 0.0, "epsilon": 0.0, "omega_g": 0.0,
    "d1": 0.0, "omega_d1": 0.0,
    "d2": 0.0, "omega_d2": 0.0,
    "optical": "coherent", "mu_c_re": 0.0, "mu_c_im": 0.0, "fock_n": 1,
    "mechanical": "coherent", "mu_m_re": 0.0, "mu_m_im": 0.0, "r_T": 0.0,
}

SWEPT_NAMES = ("tau", "g0", "epsilon", "omega_g", "d1", "omega_d1",
               "d2", "omega_d2", "mu_c_re", "mu_m_re", "r_T")


class ConfigError(ValueError):
    pass


def load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        raw = json.load(fh)
    return resolve_config(raw)


def resolve_config(raw: dict) -> dict:
    cfg = dict(CONFIG_KEYS)
    for key, value in raw.items():
        if key not in CONFIG_KEYS:
            raise ConfigError(f"unknown config field '{key}'")
        cfg[key] = value
    if cfg["optical"] not in ("coherent", "fock"):
        raise ConfigError("field 'optical' must be 'coherent' or 'fock'")
    if cfg["mechanical"] not in ("coherent", "thermal"):
        raise ConfigError("field 'mechanical' must be 'coherent' or 'thermal'")
    return cfg


def model_from_config(cfg: dict) -> ModelSpec:
    return ModelSpec(
        omega_c_ratio=cfg["omega_c_ratio"],
        coupling=Drive.offset_sinusoid(cfg["g0"], cfg["epsilon"], cfg["omega_g"]),
        displacement=Drive.cosine(cfg["d1"], cfg["omega_d1"]),
        squeezing=Drive.cosine(cfg["d2"], cfg["omega_d2"]),
    )


def state_from_config(cfg: dict) -> InitialState:
    return InitialState(
        optical=cfg["optical"],
        mu_c=complex(cfg["mu_c_re"], cfg["mu_c_im"]),
        fock_n=int(cfg["fock_n"]),
        mechanical=cfg["mechanical"],
        mu_m=complex(cfg["mu_m_re"], cfg["mu_m_im"]),
        r_T=cfg["r_T"],
    )


def fingerprint(payload: dict) -> str:
    canonical = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canonical.encode()).hexdigest()[:16]


def _fmt(value) -> str:
    if isinstance(value, float):
        if value == 0.0:
            value = 0.0  # normalise -0.0
        return format(value, ".17g")
    return str(value)


def write_records(path, fmt: str, meta: dict, columns, rows):
    header = [f"# optomech {__version__}", f"# fingerprint: {fingerprint(meta)}"]
    if fmt == "csv":
        lines = header + [",".join(columns)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = {"library": f"optomech {__version__}",
                   "fingerprint": fingerprint(meta),
                   "columns": list(columns),
                   "rows": [[_fmt(v) for v in row] for row in rows]}
        text = json.dumps(payload, indent=1, sort_keys=True) + "\n"
    else:
        raise ConfigError(f"unknown format '{fmt}'")
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


def _tau_grid(args) -> np.ndarray:
    return np.linspace(0.0, args.tau_max, args.steps)


def _apply_tolerance_profile(profile: str):
    if profile == "fast":
        mech_mod.RTOL, mech_mod.ATOL = 1e-8, 1e-10
    elif profile == "strict":
        mech_mod.RTOL, mech_mod.ATOL = 1e-10, 1e-12
    else:
        raise ConfigError(f"unknown tolerance profile '{profile}'")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_drive_eval(args):
    cfg = load_config(args.config)
    spec = model_from_config(cfg)
    taus = _tau_grid(args)
    rows = [(t, evaluate_drive(spec.coupling, t),
             evaluate_drive(spec.displacement, t),
             evaluate_drive(spec.squeezing, t)) for t in taus]
    write_records(args.out, args.format, {"cmd": "drive-eval", "config": cfg,
                                          "tau_max": args.tau_max, "steps": args.steps},
                  ("tau", "G", "D1", "D2"), rows)
    return 0


def cmd_mechanics(args):
    cfg = load_config(args.config)
    spec = model_from_config(cfg)
    taus = _tau_grid(args)
    sol = solve_subsystem(spec, args.tau_max + 1e-12, grid=taus)
    rows = []
    for i, t in enumerate(taus):
        alpha, beta = sol.bogoliubov(t)
        rows.append((t, sol.p11[i], sol.i_p22[i],
                     alpha.real, alpha.imag, beta.real, beta.imag))
    write_records(args.out, args.format, {"cmd": "mechanics", "config": cfg,
                                          "tau_max": args.tau_max, "steps": args.steps},
                  ("tau", "P11", "I_P22", "re_alpha", "im_alpha",
                   "re_beta", "im_beta"), rows)
    return 0


def _coeff_rows(cfg, taus):
    spec = model_from_config(cfg)
    tau_max = float(max(taus)) + 1e-12
    sol = solve_subsystem(spec, tau_max)
    try:
        f_at = lambda t: f_closed_form(spec, t)
        f_at(taus[-1])
    except CatalogMiss:
        f_at = f_path(spec, sol, tau_max)
    rows = []
    for t in taus:
        f = f_at(t)
        alpha, beta = sol.bogoliubov(t)
        j = j_coefficients(alpha, beta)
        d = derived_scalars(f, alpha, beta)
        rows.append((t, f.f_na, f.f_na2, f.f_bp, f.f_bm, f.f_nabp, f.f_nabm,
                     j.j_b, j.j_plus, j.j_minus, d.theta,
                     d.k_na.real, d.k_na.imag))
    return rows


def cmd_coeffs(args):
    cfg = load_config(args.config)
    taus = _tau_grid(args)
    meta = {"cmd": "coeffs", "config": cfg, "tau_max": args.tau_max,
            "steps": args.steps}
    cache_dir = os.environ.get("OPTOMECH_CACHE_DIR")
    rows = None
    cache_file = None
    if cache_dir:
        os.makedirs(cache_dir, exist_ok=True)
        cache_file = os.path.join(cache_dir, f"coeffs-{fingerprint(meta)}.json")
        if os.path.exists(cache_file):
            with open(cache_file, "r", encoding="utf-8") as fh:
                rows = [tuple(r) for r in json.load(fh)]
    if rows is None:
        rows = _coeff_rows(cfg, taus)
        if cache_file:
            with open(cache_file, "w", encoding="utf-8") as fh:
                json.dump([list(r) for r in rows], fh)
    write_records(args.out, args.format, meta,
                  ("tau", "F_Na", "F_Na2", "F_B+", "F_B-", "F_NaB+", "F_NaB-",
                   "J_b", "J_+", "J_-", "theta", "re_K_Na", "im_K_Na"), rows)
    return 0


def _moments_at(spec, state, sol, t):
    try:
        f = f_closed_form(spec, t)
    except CatalogMiss:
        f = f_path(spec, sol, float(t) + 1e-12)(t)
    alpha, beta = sol.bogoliubov(t)
    d = derived_scalars(f, alpha, beta, state.mu_m)
    m = evolve_moments(f, alpha, beta, state.mu_c, state.mu_m, derived=d)
    return f, alpha, beta, d, m


def cmd_moments(args):
    cfg = load_config(args.config)
    spec, state = model_from_config(cfg), state_from_config(cfg)
    if state.optical != "coherent" or state.mechanical != "coherent":
        raise ConfigError("moments require coherent x coherent input")
    taus = _tau_grid(args)
    sol = solve_subsystem(spec, args.tau_max + 1e-12)
    rows = []
    for t in taus:
        *_, m = _moments_at(spec, state, sol, t)
        if args.quadratures:
            rows.append((t, *quadratures(m)))
        else:
            rows.append((t, m.a.real, m.a.imag, m.b.real, m.b.imag,
                         m.a2.real, m.a2.imag, m.b2.real, m.b2.imag,
                         m.adag_a, m.bdag_b, m.ab.real, m.ab.imag,
                         m.abdag.real, m.abdag.imag))
    if args.quadratures:
        cols = ("tau", "x_c", "p_c", "x_m", "p_m")
    else:
        cols = ("tau", "re_a", "im_a", "re_b", "im_b", "re_a2", "im_a2",
                "re_b2", "im_b2", "adag_a", "bdag_b", "re_ab", "im_ab",
                "re_abdag", "im_abdag")
    write_records(args.out, args.format, {"cmd": "moments", "config": cfg,
                                          "tau_max": args.tau_max, "steps": args.steps,
                                          "quadratures": bool(args.quadratures)},
                  cols, rows)
    return 0


def cmd_nongauss(args):
    cfg = load_config(args.config)
    spec, state = model_from_config(cfg), state_from_config(cfg)
    if state.optical != "coherent" or state.mechanical != "coherent":
        raise ConfigError("the non-Gaussianity measure requires pure "
                          "coherent x coherent input")
    taus = _tau_grid(args)
    sol = solve_subsystem(spec, args.tau_max + 1e-12)
    rows = []
    for t in taus:
        rep = nongauss_report(spec, state.mu_c, state.mu_m, t, sol=sol)
        rows.append((t, rep.delta, rep.delta_min, rep.delta_max,
                     rep.nu_op, rep.nu_me))
    write_records(args.out, args.format, {"cmd": "nongauss", "config": cfg,
                                          "tau_max": args.tau_max, "steps": args.steps},
                  ("tau", "delta", "delta_min", "delta_max", "nu_op", "nu_me"),
                  rows)
    return 0


def _parse_sweep(text: str):
    start, stop, step = (float(x) for x in text.split(":"))
    if step <= 0:
        raise ConfigError("sweep step must be > 0")
    n = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(n)]


def _qfi_value(cfg: dict, param: str, tau: float, mode: str) -> float:
    spec = model_from_config(cfg)
    state = state_from_config(cfg)
    coeffs = qfi_coefficients(spec, param, tau, mode=mode)
    r_T = cfg["r_T"] if cfg["mechanical"] == "thermal" else 0.0
    return qfi_thermal(coeffs, state.mu_c, r_T)


def cmd_qfi(args):
    cfg = load_config(args.config)
    meta = {"cmd": "qfi", "config": cfg, "param": args.param, "tau": args.tau,
            "mode": args.mode, "sweep": args.sweep}
    if args.sweep:
        name, grid_text = args.sweep
        if name not in SWEPT_NAMES:
            raise ConfigError(f"unknown swept name '{name}'")
        values = _parse_sweep(grid_text)
        def one(v):
            local = dict(cfg)
            tau = args.tau
            if name == "tau":
                tau = v
            else:
                local[name] = v
            return _qfi_value(local, args.param, tau, args.mode)
        results = _pool_map(one, values, args.threads)
        rows = list(zip(values, results))
        write_records(args.out, args.format, meta, (name, "qfi"), rows)
    else:
        value = _qfi_value(cfg, args.param, args.tau, args.mode)
        write_records(args.out, args.format, meta, ("tau", "qfi"),
                      [(args.tau, value)])
    return 0


def cmd_cfi(args):
    cfg = load_config(args.config)
    value = cfi_homodyne(cfg["g0"], cfg["d1"],
                         complex(cfg["mu_c_re"], cfg["mu_c_im"]),
                         complex(cfg["mu_m_re"], cfg["mu_m_im"]),
                         args.quadrature_angle, args.tau, n_max=args.n_max)
    write_records(args.out, args.format,
                  {"cmd": "cfi", "config": cfg, "tau": args.tau,
                   "lambda": args.quadrature_angle},
                  ("tau", "cfi"), [(args.tau, value)])
    return 0


REFERENCE_PLATFORMS = {
    "fabry-perot": FabryPerot(length=1e-5, mass=1e-6, omega_c=1e14, omega_m=1e3),
    "levitated": Levitated(volume=1e-18, cavity_volume=1e-14,
                           relative_permittivity=5.7, wavelength=1064e-9,
                           mass=1e-14, omega_c=1e14, omega_m=1e2),
    "cold-atoms": ColdAtoms(n_atoms=10 ** 5, single_atom_coupling=1e7,
                            laser_wavevector=1e8, atom_mass=1e-25,
                            detuning=1e11, omega_m=1e2),
}


def setup_from_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    kind = data.pop("kind")
    cls = {"fabry-perot": FabryPerot, "levitated": Levitated,
           "cold-atoms": ColdAtoms}[kind]
    return cls(**data)


def cmd_gravimetry(args):
    if args.table:
        rows = []
        for name, setup in REFERENCE_PLATFORMS.items():
            rep = gravimetry(setup, mu_c=math.sqrt(args.photons))
            rows.append((name, coupling_constant(setup),
                         rep.qfi_dimensionful, rep.std_dev))
        write_records(args.out, args.format,
                      {"cmd": "gravimetry", "table": True, "photons": args.photons},
                      ("platform", "g0_dimensionless", "qfi_si", "delta_g"), rows)
        return 0
    if not args.setup:
        raise ConfigError("provide --setup JSON or --table")
    setup = setup_from_json(args.setup)
    rep = gravimetry(setup, mu_c=math.sqrt(args.photons))
    write_records(args.out, args.format,
                  {"cmd": "gravimetry", "setup": args.setup, "photons": args.photons},
                  ("g0_dimensionless", "qfi_dimensionless", "qfi_si", "delta_g"),
                  [(coupling_constant(setup), rep.qfi_dimensionless,
                    rep.qfi_dimensionful, rep.std_dev)])
    return 0


def cmd_oracle_check(args):
    cfg = load_config(args.config)
    spec, state = model_from_config(cfg), state_from_config(cfg)
    tau = args.tau
    dims = tuple(int(x) for x in args.dims.split(",")) if args.dims else \
        recommended_dims(spec, state, tau)
    sol = solve_subsystem(spec, tau + 1e-12)
    f, alpha, beta, d, m = _moments_at(spec, state, sol, tau)
    st = propagate(spec, state, tau, dims)
    mo = oracle_moments(st)
    names = ("a", "b", "a2", "b2", "adag_a", "bdag_b", "ab", "abdag")
    rows = [(k, abs(getattr(m, k) - getattr(mo, k))) for k in names]
    cov_dev = np.max(np.abs(covariance(m, d, alpha, beta, state.mu_c).matrix
                            - covariance_from_moments(mo).matrix))
    rows.append(("covariance", float(cov_dev)))
    rows.append(("norm_defect", st.norm_defect))
    write_records(args.out, args.format,
                  {"cmd": "oracle-check", "config": cfg, "tau": tau,
                   "dims": list(dims)},
                  ("quantity", "max_deviation"), rows)
    worst = max(r[1] for r in rows[:-1])
    return 0 if worst < args.tolerance else 1


def validate_sweep_config(data: dict):
    """Dry-run schema and validity checks; returns a list of warnings."""
    problems, notes = [], []
    for field in ("command", "model", "swept", "output"):
        if field not in data:
            problems.append(f"missing field '{field}'")
    if problems:
        raise ConfigError("; ".join(problems))
    try:
        cfg = resolve_config(data["model"])
    except ConfigError as exc:
        raise ConfigError(f"model: {exc}") from exc
    swept = data["swept"]
    for field in ("name", "start", "stop", "step"):
        if field not in swept:
            raise ConfigError(f"swept: missing field '{field}'")
    if swept["name"] not in SWEPT_NAMES:
        raise ConfigError(f"swept.name: unknown name '{swept['name']}'")
    if swept["step"] <= 0 or swept["stop"] < swept["start"]:
        raise ConfigError("swept: range is empty")
    if data["command"] not in ("qfi", "cfi", "nongauss"):
        raise ConfigError(f"command: unknown command '{data['command']}'")
    fixed = data.get("fixed", {})
    if data["command"] == "qfi" and fixed.get("param", "g0") == "d2":
        d2 = abs(cfg["d2"])
        if swept["name"] == "d2":
            d2 = max(d2, abs(swept["start"]), abs(swept["stop"]))
        if d2 > D2_VALIDITY:
            notes.append(f"d2 = {d2} exceeds the small-d2 validity bound "
                         f"{D2_VALIDITY}; results are indicative only")
    return notes


def cmd_sweep(args):
    with open(args.config, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    notes = validate_sweep_config(data)
    for note in notes:
        print(f"# warning: {note}", file=sys.stderr)
    if args.validate_only:
        print("ok")
        return 0
    cfg = resolve_config(data["model"])
    swept = data["swept"]
    values = _parse_sweep(f"{swept['start']}:{swept['stop']}:{swept['step']}")
    fixed = data.get("fixed", {})
    command = data["command"]
    tau_default = float(fixed.get("tau", 2.0 * math.pi))

    def one(v):
        local = dict(cfg)
        tau = tau_default
        if swept["name"] == "tau":
            tau = v
        else:
            local[swept["name"]] = v
        if command == "qfi":
            return _qfi_value(local, fixed.get("param", "g0"), tau,
                              fixed.get("mode", "analytic"))
        if command == "cfi":
            return cfi_homodyne(local["g0"], local["d1"],
                                complex(local["mu_c_re"], local["mu_c_im"]),
                                complex(local["mu_m_re"], local["mu_m_im"]),
                                float(fixed.get("lambda", math.pi / 2)), tau)
        spec = model_from_config(local)
        rep = nongauss_report(spec, complex(local["mu_c_re"], local["mu_c_im"]),
                              complex(local["mu_m_re"], local["mu_m_im"]), tau)
        return rep.delta

    results = _pool_map(one, values, args.threads)
    write_records(data["output"], data.get("format", "csv"),
                  {"cmd": "sweep", "sweep_config": data},
                  (swept["name"], command), list(zip(values, results)))
    return 0


def _pool_map(fn, values, threads: int):
    if threads <= 1:
        return [fn(v) for v in values]
    with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, values))


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="optomech")
    parser.add_argument("--tolerance-profile", choices=("strict", "fast"),
                        default="strict")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, grid=False):
        p.add_argument("--config", required=True)
        p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--threads", type=int, default=1)
        if grid:
            p.add_argument("--tau-max", type=float, default=2.0 * math.pi)
            p.add_argument("--steps", type=int, default=101)

    p = sub.add_parser("drive-eval"); common(p, grid=True)
    p.set_defaults(func=cmd_drive_eval)
    p = sub.add_parser("mechanics"); common(p, grid=True)
    p.set_defaults(func=cmd_mechanics)
    p = sub.add_parser("coeffs"); common(p, grid=True)
    p.set_defaults(func=cmd_coeffs)
    p = sub.add_parser("moments"); common(p, grid=True)
    p.add_argument("--quadratures", action="store_true")
    p.set_defaults(func=cmd_moments)
    p = sub.add_parser("nongauss"); common(p, grid=True)
    p.set_defaults(func=cmd_nongauss)

    p = sub.add_parser("qfi"); common(p)
    p.add_argument("--param", default="g0")
    p.add_argument("--tau", type=float, default=2.0 * math.pi)
    p.add_argument("--mode", choices=("analytic", "finite_diff"),
                   default="analytic")
    p.add_argument("--sweep", nargs=2, metavar=("NAME", "START:STOP:STEP"))
    p.set_defaults(func=cmd_qfi)

    p = sub.add_parser("cfi"); common(p)
    p.add_argument("--tau", type=float, default=2.0 * math.pi)
    p.add_argument("--quadrature-angle", type=float, default=math.pi / 2)
    p.add_argument("--n-max", type=int, default=None)
    p.set_defaults(func=cmd_cfi)

    p = sub.add_parser("gravimetry")
    p.add_argument("--table", action="store_true")
    p.add_argument("--setup", default=None)
    p.add_argument("--photons", type=float, default=1e6)
    p.add_argument("--out", default=None)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.set_defaults(func=cmd_gravimetry)

    p = sub.add_parser("oracle-check"); common(p)
    p.add_argument("--tau", type=float, default=math.pi)
    p.add_argument("--dims", default=None, help="NA,NB")
    p.add_argument("--tolerance", type=float, default=1e-6)
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("sweep")
    p.add_argument("--config", required=True)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--validate-only", action="store_true")
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    _apply_tolerance_profile(args.tolerance_profile)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
