"""Command-line front end: ``verify``, ``step`` and ``orbit``.

Exit codes: 0 pass, 1 check failure, 2 usage or parse error, 3 indeterminacy.

Config files are JSON. ``raw-system`` reads a ``system`` block (``matrix_size``,
``poles``, ``residues``) with an optional ``index`` ``[alpha, beta, mu, nu]``,
``schedule`` (list of indices) and expected ``scheme``. ``dpv`` and ``a2star``
read ``params`` and ``state`` blocks. Every mode accepts ``steps``, ``seed`` and
``tol``. Without a config the instance is drawn from ``--seed``.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field, replace
from typing import Any

from . import a2star, checks, dpv
from .errors import Indeterminacy, SchlesingerError
from .fuchsian import FuchsianSystem, decompose, recompose, riemann_scheme
from .lattice import SURFACES, translation_vector
from .sampling import random_a2, random_dpv, trial_rng
from .serialize import (
    ConfigError,
    complex_cells,
    complex_columns,
    dataclass_from_dict,
    dataclass_to_dict,
    decode_complex,
    dumps,
    encode_complex,
    scheme_to_dict,
    system_from_dict,
    system_to_dict,
    write_csv,
)
from .transform import TransformationIndex, transform_decomposition

EXIT_PASS, EXIT_FAIL, EXIT_USAGE, EXIT_INDETERMINACY = 0, 1, 2, 3

MODES = ("raw-system", "dpv", "a2star", "lattice")
DEFAULT_STEPS = {"raw-system": 5, "dpv": 20, "a2star": 10, "lattice": 0}
SCHEME_TOL = 1e-9


class UsageError(ConfigError):
    pass


@dataclass
class RunConfig:
    mode: str | None
    data: dict = field(default_factory=dict)
    steps: int | None = None
    seed: int = 0
    tol: float | None = None
    fmt: str | None = None
    out: str | None = None

    @property
    def from_file(self) -> bool:
        return bool(self.data)

    def steps_or_default(self) -> int:
        steps = self.steps if self.steps is not None else self.data.get("steps", DEFAULT_STEPS[self.mode])
        if not isinstance(steps, int) or steps < 0:
            raise ConfigError(f"steps must be a nonnegative integer, got {steps!r}")
        return steps


def load_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except OSError as exc:
            raise ConfigError(f"cannot read {args.config}: {exc.strerror}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{args.config} is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    mode = args.mode or data.get("mode")
    if args.mode and data.get("mode") and args.mode != data["mode"]:
        raise UsageError(f"--mode {args.mode} conflicts with config mode {data['mode']}")
    if mode is not None and mode not in MODES:
        raise UsageError(f"unknown mode {mode!r}")
    seed = args.seed if args.seed is not None else data.get("seed", 0)
    tol = args.tol if args.tol is not None else data.get("tol")
    if not isinstance(seed, int):
        raise ConfigError(f"seed must be an integer, got {seed!r}")
    if tol is not None and not (isinstance(tol, (int, float)) and tol > 0):
        raise ConfigError(f"tol must be positive, got {tol!r}")
    return RunConfig(mode, data, args.steps, seed, tol, args.format, args.out)


# instances -----------------------------------------------------------------

def _block(data: dict, name: str) -> dict:
    block = data.get(name)
    if not isinstance(block, dict):
        raise ConfigError(f"config lacks a {name!r} object")
    return block


def parse_index(value) -> TransformationIndex:
    if not (isinstance(value, list) and len(value) == 4 and all(isinstance(v, int) for v in value)):
        raise ConfigError(f"an index is a list of four integers, got {value!r}")
    try:
        return TransformationIndex(*value)
    except SchlesingerError as exc:
        raise ConfigError(str(exc)) from exc


def raw_instance(cfg: RunConfig) -> tuple[FuchsianSystem, list[TransformationIndex]]:
    if not cfg.from_file:
        system, _, idx = checks.random_indexed_system(trial_rng(cfg.seed, 0), 2, 3)
        return system, [idx]
    system = system_from_dict(_block(cfg.data, "system"))
    if "schedule" in cfg.data:
        schedule = [parse_index(v) for v in cfg.data["schedule"]]
    elif "index" in cfg.data:
        schedule = [parse_index(cfg.data["index"])]
    else:
        schedule = []
    return system, schedule


def dpv_instance(cfg: RunConfig, steps: int = 0) -> tuple[dpv.DPVParameters, dpv.DPVState]:
    if not cfg.from_file:
        return random_dpv(trial_rng(cfg.seed, 0), steps, checks.DPV_MARGIN)
    block = _block(cfg.data, "params")
    kw = dataclass_from_dict(dpv.DPVParameters, block, ["theta1", "thetat", "kappa1", "kappa2", "t"])
    params = dpv.DPVParameters.fuchs_consistent(**kw)
    if "theta0" in block and abs(decode_complex(block["theta0"]) - params.theta0) > 1e-12:
        raise ConfigError(f"theta0 violates the Fuchs relation; it must be {params.theta0}")
    state = dpv.DPVState(**dataclass_from_dict(dpv.DPVState, _block(cfg.data, "state")))
    return params, state


def a2_instance(cfg: RunConfig) -> tuple[a2star.A2Parameters, complex, complex]:
    if not cfg.from_file:
        return random_a2(trial_rng(cfg.seed, 0), composite=True)
    block = _block(cfg.data, "params")
    kw = dataclass_from_dict(a2star.A2Parameters, block,
                             ["theta11", "theta12", "theta21", "theta22", "kappa1", "kappa2"])
    params = a2star.A2Parameters.fuchs_consistent(**kw)
    if "kappa3" in block and abs(decode_complex(block["kappa3"]) - params.kappa3) > 1e-12:
        raise ConfigError(f"kappa3 violates the Fuchs relation; it must be {params.kappa3}")
    state = dataclass_from_dict(a2star.A2State, _block(cfg.data, "state"), ["x", "y"])
    return params, state["x"], state["y"]


# verify --------------------------------------------------------------------

def _expected_scheme_gap(system: FuchsianSystem, expected: dict) -> float:
    scheme = riemann_scheme(system)
    try:
        finite = [[decode_complex(v) for v in t] for t in expected["finite"]]
        infinity = [decode_complex(v) for v in expected["infinity"]]
    except (KeyError, TypeError) as exc:
        raise ConfigError(f"scheme block needs 'finite' and 'infinity': {exc}") from exc
    if len(finite) != len(scheme.finite):
        return float("inf")
    gaps = [checks.multiset_gap(a, b) for a, b in zip(scheme.finite, finite)]
    return max([*gaps, checks.multiset_gap(scheme.infinity, infinity)])


def _raw_checks(cfg: RunConfig) -> list[checks.Check]:
    if not cfg.from_file:
        return (checks.divisor_suite(cfg.seed) + checks.transformation_suite(cfg.seed)
                + checks.scheme_shift_suite(cfg.seed) + checks.generating_suite(cfg.seed))
    try:
        system, _ = raw_instance(cfg)
    except SchlesingerError as exc:
        # a residue edit can leave the input malformed; that is a failed check, not a parse error
        return [checks.Check("system: input is a valid Fuchsian system", 1.0, 0.0, str(exc))]
    out = checks.system_suite(system)
    if "scheme" in cfg.data:
        out.append(checks.Check("system: Riemann scheme matches config",
                                _expected_scheme_gap(system, cfg.data["scheme"]), SCHEME_TOL))
    return out


def _dpv_checks(cfg: RunConfig) -> list[checks.Check]:
    steps = cfg.steps_or_default()
    if not cfg.from_file:
        return checks.dpv_suite(cfg.seed, steps=steps)
    params, state = dpv_instance(cfg)
    out = checks.dpv_checks([checks.dpv_orbit_residuals(params, state, steps)])
    point = dpv.build_dpv_point(params, state, dpv.balanced_gauge(params, state))
    return out + checks.generating_checks(point, dpv.STEP_INDEX)


def _a2_checks(cfg: RunConfig) -> list[checks.Check]:
    steps = cfg.steps_or_default()
    if not cfg.from_file:
        return checks.a2_suite(cfg.seed, steps=steps)
    params, x, y = a2_instance(cfg)
    result = checks.a2_orbit_residuals(params, x, y, steps)
    out = checks.a2_checks([result], 0, 0)[:-1]
    out.append(checks.Check("a2star: scheme action", checks.scheme_action_gap(params), 1e-12))
    point = a2star.build_a2_point(params, x, y)
    return out + checks.generating_checks(point, a2star.SCHLESINGER_INDEX)


def collect_checks(cfg: RunConfig) -> list[checks.Check]:
    if cfg.mode is None:
        if cfg.from_file:
            raise UsageError("a config needs --mode or a 'mode' entry")
        return (checks.divisor_suite(cfg.seed) + checks.transformation_suite(cfg.seed)
                + checks.scheme_shift_suite(cfg.seed) + checks.generating_suite(cfg.seed)
                + checks.dpv_suite(cfg.seed) + checks.a2_suite(cfg.seed)
                + checks.lattice_suite() + checks.dimension_suite(cfg.seed))
    if cfg.mode == "raw-system":
        return _raw_checks(cfg)
    if cfg.mode == "dpv":
        return _dpv_checks(cfg)
    if cfg.mode == "a2star":
        return _a2_checks(cfg)
    return checks.lattice_suite()


def cmd_verify(cfg: RunConfig) -> tuple[str, int]:
    results = collect_checks(cfg)
    if cfg.tol is not None:
        results = [replace(c, tol=cfg.tol) if c.tol > 0 else c for c in results]
    failed = sum(not c.passed for c in results)
    code = EXIT_FAIL if failed else EXIT_PASS
    if cfg.fmt == "json":
        payload = {"mode": cfg.mode or "all", "seed": cfg.seed, "passed": not failed,
                   "checks": [{"name": c.name, "value": float(c.value) if math.isfinite(c.value) else None, "tol": float(c.tol), "passed": c.passed,
                               "detail": c.detail} for c in results]}
        return dumps(payload), code
    if cfg.fmt == "csv":
        rows = [[c.name, format(c.value, ".17g"), format(c.tol, ".17g"), "pass" if c.passed else "fail",
                 c.detail] for c in results]
        return write_csv(["check", "value", "tol", "status", "detail"], rows), code
    lines = [f"mode: {cfg.mode or 'all'}", f"seed: {cfg.seed}"]
    lines += [c.line() for c in results]
    lines.append(f"{len(results) - failed} of {len(results)} checks passed")
    return "\n".join(lines) + "\n", code


# step ----------------------------------------------------------------------

def _scheme_of(point) -> dict:
    return scheme_to_dict(riemann_scheme(recompose(point)))


def _halt_error(exc: SchlesingerError) -> Indeterminacy:
    if isinstance(exc, Indeterminacy):
        return exc
    return Indeterminacy(str(exc))


def step_raw(cfg: RunConfig) -> dict:
    system, schedule = raw_instance(cfg)
    if not schedule:
        raise ConfigError("raw-system step needs an 'index' or 'schedule'")
    idx = schedule[0]
    point = decompose(system)
    _check_index_bounds(point, idx)
    try:
        new = recompose(transform_decomposition(point, idx))
    except SchlesingerError as exc:
        raise _halt_error(exc) from exc
    return {
        "mode": "raw-system",
        "index": [idx.alpha, idx.beta, idx.mu, idx.nu],
        "before": {"system": system_to_dict(system), "scheme": scheme_to_dict(riemann_scheme(system))},
        "after": {"system": system_to_dict(new), "scheme": scheme_to_dict(riemann_scheme(new))},
    }


def _check_index_bounds(point, idx: TransformationIndex) -> None:
    n = len(point.poles)
    if idx.alpha >= n or idx.beta >= n:
        raise ConfigError(f"index {idx} refers to a pole beyond {n - 1}")
    if idx.mu >= len(point.theta[idx.alpha]) or idx.nu >= len(point.theta[idx.beta]):
        raise ConfigError(f"index {idx} refers to a slot beyond the residue rank")


def step_dpv(cfg: RunConfig) -> dict:
    params, state = dpv_instance(cfg, steps=1)
    before = dpv.build_dpv_point(params, state)
    new_params, new_state = dpv.dpv_step(params, state)
    std, f, g = dpv.to_standard(new_params, new_state)
    return {
        "mode": "dpv",
        "before": {"params": dataclass_to_dict(params), "state": dataclass_to_dict(state),
                   "scheme": _scheme_of(before)},
        "after": {"params": dataclass_to_dict(new_params), "state": dataclass_to_dict(new_state),
                  "standard": {"params": dataclass_to_dict(std), "f": encode_complex(f), "g": encode_complex(g)},
                  "scheme": _scheme_of(dpv.build_dpv_point(new_params, new_state))},
    }


def step_a2(cfg: RunConfig) -> dict:
    params, x, y = a2_instance(cfg)
    trace = a2star.composite_trace(params, x, y)
    new_params, x_bar, y_bar = a2star.composite_step(params, x, y)
    std, f, g = a2star.to_standard(new_params, x_bar, y_bar)
    return {
        "mode": "a2star",
        "before": {"params": dataclass_to_dict(params), "state": {"x": encode_complex(x), "y": encode_complex(y)},
                   "scheme": _scheme_of(trace[0][2])},
        "stages": [{"stage": label, "params": dataclass_to_dict(p), "scheme": _scheme_of(point)}
                   for label, p, point in trace[1:]],
        "after": {"params": dataclass_to_dict(new_params),
                  "state": {"x": encode_complex(x_bar), "y": encode_complex(y_bar)},
                  "standard": {"params": dataclass_to_dict(std), "f": encode_complex(f), "g": encode_complex(g)}},
    }


def cmd_step(cfg: RunConfig) -> tuple[str, int]:
    if cfg.fmt == "csv":
        raise UsageError("step writes JSON; use orbit for CSV traces")
    runners = {"raw-system": step_raw, "dpv": step_dpv, "a2star": step_a2}
    if cfg.mode not in runners:
        raise UsageError(f"step needs --mode in {', '.join(runners)}")
    try:
        payload = runners[cfg.mode](cfg)
    except Indeterminacy:
        raise
    except SchlesingerError as exc:
        raise _halt_error(exc) from exc
    payload["seed"] = cfg.seed
    return dumps(payload), EXIT_PASS


# orbit ---------------------------------------------------------------------

@dataclass
class Trace:
    header: list[str]
    rows: list[list[Any]] = field(default_factory=list)
    records: list[dict] = field(default_factory=list)
    halt: dict | None = None

    def stop(self, step: int, exc: SchlesingerError) -> None:
        err = _halt_error(exc)
        self.halt = {"step": step, "locus": err.locus, "stage": err.stage}
        where = f" ({err.stage})" if err.stage else ""
        self.rows.append([step] + [""] * (len(self.header) - 2) + [f"halt: {err.locus}{where}"])


def _complex_header(names) -> list[str]:
    return [c for n in names for c in complex_columns(n)]


def orbit_dpv(cfg: RunConfig, steps: int) -> Trace:
    names = ["p", "q", "f", "g", "theta1", "thetat"]
    trace = Trace(["step", *_complex_header(names), "status"])
    if steps == 0:
        return trace
    params, state = dpv_instance(cfg, steps)
    for k in range(steps + 1):
        try:
            if k:
                params, state = dpv.dpv_step(params, state)
            _, f, g = dpv.to_standard(params, state)
        except SchlesingerError as exc:
            trace.stop(k, exc)
            break
        values = [state.p, state.q, f, g, params.theta1, params.thetat]
        trace.rows.append([k, *complex_cells(values), "ok"])
        trace.records.append({"step": k, **{n: encode_complex(v) for n, v in zip(names, values)}})
    return trace


def orbit_a2(cfg: RunConfig, steps: int) -> Trace:
    pnames = ["theta11", "theta12", "theta21", "theta22", "kappa1", "kappa2", "kappa3"]
    names = ["x", "y", "f", "g", *pnames]
    trace = Trace(["step", *_complex_header(names), "status"])
    if steps == 0:
        return trace
    params, x, y = a2_instance(cfg)
    for k in range(steps + 1):
        try:
            if k:
                params, x, y = a2star.composite_step(params, x, y)
            _, f, g = a2star.to_standard(params, x, y)
        except SchlesingerError as exc:
            trace.stop(k, exc)
            break
        values = [x, y, f, g, *(getattr(params, n) for n in pnames)]
        trace.rows.append([k, *complex_cells(values), "ok"])
        trace.records.append({"step": k, **{n: encode_complex(v) for n, v in zip(names, values)}})
    return trace


def orbit_raw(cfg: RunConfig, steps: int) -> Trace:
    trace = Trace(["step", "pole", "row", "col", "re", "im", "status"])
    if steps == 0:
        return trace
    system, schedule = raw_instance(cfg)
    if not schedule:
        raise ConfigError("raw-system orbit needs an 'index' or 'schedule'")
    point = decompose(system)
    _check_index_bounds(point, schedule[0])

    def record(k, sys_, idx):
        trace.records.append({"step": k, "index": None if idx is None else [idx.alpha, idx.beta, idx.mu, idx.nu],
                              "riemann_scheme": scheme_to_dict(riemann_scheme(sys_)), **system_to_dict(sys_)})
        for i, a in enumerate(sys_.residues):
            for r in range(a.shape[0]):
                for c in range(a.shape[1]):
                    trace.rows.append([k, i, r, c, *complex_cells([a[r, c]]), "ok"])

    record(0, system, None)
    for k in range(1, steps + 1):
        idx = schedule[(k - 1) % len(schedule)]
        try:
            point = transform_decomposition(point, idx)
            current = recompose(point)
        except SchlesingerError as exc:
            trace.stop(k, exc)
            break
        record(k, current, idx)
    return trace


def orbit_lattice(cfg: RunConfig) -> Trace:
    trace = Trace(["surface", "action", "cartan_type", "vector", "status"])
    for surface in SURFACES.values():
        for name, action in surface.actions.items():
            vector = translation_vector(action, surface.roots, surface.delta)
            trace.rows.append([surface.name, name, surface.cartan_type, " ".join(map(str, vector)), "ok"])
            trace.records.append({"surface": surface.name, "action": name,
                                  "cartan_type": surface.cartan_type, "translation": list(vector)})
    return trace


def cmd_orbit(cfg: RunConfig) -> tuple[str, int]:
    if cfg.mode is None:
        raise UsageError("orbit needs --mode")
    if cfg.mode == "lattice":
        trace = orbit_lattice(cfg)
        steps = None
    else:
        steps = cfg.steps_or_default()
        trace = {"raw-system": orbit_raw, "dpv": orbit_dpv, "a2star": orbit_a2}[cfg.mode](cfg, steps)
    code = EXIT_INDETERMINACY if trace.halt else EXIT_PASS
    if (cfg.fmt or "csv") == "csv":
        return write_csv(trace.header, trace.rows), code
    payload = {"mode": cfg.mode, "seed": cfg.seed, "steps": steps, "records": trace.records, "halt": trace.halt}
    return dumps(payload), code


# entry point ---------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=MODES)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--steps", type=int, help="orbit length (default depends on mode)")
    common.add_argument("--seed", type=int, help="seed for generated instances (default 0)")
    common.add_argument("--tol", type=float, help="override every non-exact tolerance")
    common.add_argument("--format", choices=("csv", "json"))
    common.add_argument("--out", help="write output here instead of stdout")
    parser = argparse.ArgumentParser(prog="schlesinger",
                                     description="Schlesinger transformations and discrete Painleve dynamics")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("verify", parents=[common], help="run invariant checks")
    sub.add_parser("step", parents=[common], help="apply one transformation")
    sub.add_parser("orbit", parents=[common], help="iterate and write a trace")
    return parser


def _emit(text: str, out: str | None) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_PASS if exc.code == 0 else EXIT_USAGE
    if args.steps is not None and args.steps < 0:
        print("error: --steps must be nonnegative", file=sys.stderr)
        return EXIT_USAGE
    commands = {"verify": cmd_verify, "step": cmd_step, "orbit": cmd_orbit}
    try:
        cfg = load_config(args)
        text, code = commands[args.command](cfg)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except Indeterminacy as exc:
        print(f"indeterminacy at {exc.locus}" + (f" (stage {exc.stage})" if exc.stage else ""), file=sys.stderr)
        return EXIT_INDETERMINACY
    except SchlesingerError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        _emit(text, cfg.out)
    except OSError as exc:
        print(f"error: cannot write {cfg.out}: {exc.strerror}", file=sys.stderr)
        return EXIT_USAGE
    return code


if __name__ == "__main__":
    sys.exit(main())
