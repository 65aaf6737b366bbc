"""Command-line interface: configuration, orchestration, table artifacts.

Subcommands::

    modval reconstruct --config run.json [overrides]
    modval sweep-theta --config run.json [--theta-min A --theta-max B --steps N]
    modval tomography  --config run.json [overrides]
    modval compare     --config run.json [overrides]

The JSON config schema (version 1)::

    {
      "schema_version": 1,
      "state": {"preset": "fig3"} | {"amps": [[re, im], ...], "dims": [m, n]},
      "theta": 0.0,                      // used by the fig3 preset
      "postselection": {"preset": "uniform_plus"} | {"amps": [...]},
      "epsilon": 0.2,
      "g": 3.141592653589793,
      "method": "exact_inversion",       // first_order | exact_inversion | definitional
      "noise": {"pairs_per_setting": 100000, "trials": 200, "seed": 7,
                "clamp": false},         // optional
      "output_path": "-",                // "-" = stdout
      "format": "csv"                    // csv | json
    }

Flags --method/--epsilon/--pairs/--trials/--seed/--out/--format override the
config; --no-timestamp removes the generated-at header so outputs are
byte-identical for a fixed config and seed.

Exit codes: 0 success, 2 config error, 3 orthogonal postselection,
4 inversion failure, 5 all trials rejected. Every error prints one line
``error: <code>: <message>`` to stderr.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, replace
from datetime import datetime, timezone

import numpy as np

from .errors import (
    AllTrialsRejected,
    ConfigError,
    ModvalError,
    NegativeDiscriminant,
    OrthogonalPostselection,
)
from .hilbert import PureState
from .noise import CountingConfig, monte_carlo, sample_detection, sample_pauli_expectations, trial_rng
from .presets import (
    POSTSELECTION_PRESETS,
    STATE_PRESETS,
    phase_bell,
    postselection_preset,
    state_preset,
    uniform_plus,
)
from .protocol import ProtocolConfig
from .reconstruction import (
    METHODS,
    Setting,
    collect_probabilities,
    definitional_modulars,
    measurement_plan,
    reconstruct,
    reconstruct_state,
    s_parameter,
)
from .tomography import fidelity_pure, fidelity_states, linear_inversion, pauli_expectations

SCHEMA_VERSION = 1

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_PROTOCOL = 3
EXIT_INVERSION = 4
EXIT_ALL_REJECTED = 5

_EXIT_BY_ERROR = (
    (OrthogonalPostselection, EXIT_PROTOCOL),
    (NegativeDiscriminant, EXIT_INVERSION),
    (AllTrialsRejected, EXIT_ALL_REJECTED),
    (ConfigError, EXIT_CONFIG),
)


@dataclass(frozen=True)
class RunConfig:
    state_spec: dict
    postselection_spec: dict
    theta: float | None
    epsilon: float
    g: float
    method: str
    noise: CountingConfig | None
    output_path: str
    format: str
    timestamp: bool = True


def _parse_amplitudes(spec: dict, field: str) -> PureState:
    amps_raw = spec["amps"]
    dims = tuple(int(d) for d in spec.get("dims", (2, 2)))
    try:
        amps = np.array([complex(re, im) for re, im in amps_raw])
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{field}.amps must be a list of [re, im] pairs: {exc}") from None
    norm = float(np.linalg.norm(amps))
    if norm == 0.0:
        raise ConfigError(f"{field}.amps must not be all zero")
    if abs(norm - 1.0) > 1e-6:
        sys.stderr.write(
            f"warning: {field} amplitudes renormalized (norm was {norm:.9f})\n"
        )
    try:
        return PureState(dims, amps / norm)
    except ValueError as exc:
        raise ConfigError(f"{field}: {exc}") from None


def _resolve_state(cfg: RunConfig) -> PureState:
    spec = cfg.state_spec
    if "preset" in spec:
        name = spec["preset"]
        if name not in STATE_PRESETS:
            raise ConfigError(f"state.preset must be one of {STATE_PRESETS}, got {name!r}")
        return state_preset(name, cfg.theta)
    if "amps" in spec:
        return _parse_amplitudes(spec, "state")
    raise ConfigError("state must carry either a preset name or explicit amps")


def _resolve_postselection(cfg: RunConfig, dims: tuple[int, int]) -> PureState:
    spec = cfg.postselection_spec
    if "preset" in spec:
        name = spec["preset"]
        if name == "uniform_plus":
            return uniform_plus(*dims)
        if name not in POSTSELECTION_PRESETS:
            raise ConfigError(
                f"postselection.preset must be one of {POSTSELECTION_PRESETS}, got {name!r}"
            )
        return postselection_preset(name)
    if "amps" in spec:
        return _parse_amplitudes(spec, "postselection")
    raise ConfigError("postselection must carry either a preset name or explicit amps")


def load_config(path: str) -> RunConfig:
    """Parse and validate a run configuration document."""
    try:
        with open(path, "r", encoding="utf-8") as handle:
            doc = json.load(handle)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config {path} is not valid JSON (line {exc.lineno}, column {exc.colno}): {exc.msg}"
        ) from None
    if not isinstance(doc, dict):
        raise ConfigError("config document must be a JSON object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version must be {SCHEMA_VERSION}, got {version!r}")

    def field(name, default=None, kind=None):
        value = doc.get(name, default)
        if value is not None and kind is not None:
            try:
                value = kind(value)
            except (TypeError, ValueError):
                raise ConfigError(f"field {name!r} has invalid value {value!r}") from None
        return value

    method = field("method", "exact_inversion", str)
    if method not in METHODS:
        raise ConfigError(f"method must be one of {METHODS}, got {method!r}")
    fmt = field("format", "csv", str)
    if fmt not in ("csv", "json"):
        raise ConfigError(f"format must be csv or json, got {fmt!r}")

    noise_doc = doc.get("noise")
    noise = None
    if noise_doc is not None:
        if not isinstance(noise_doc, dict):
            raise ConfigError("noise must be an object")
        try:
            noise = CountingConfig(
                pairs_per_setting=int(noise_doc["pairs_per_setting"]),
                trials=int(noise_doc.get("trials", 1)),
                seed=int(noise_doc.get("seed", 0)),
                clamp=bool(noise_doc.get("clamp", False)),
            )
        except KeyError as exc:
            raise ConfigError(f"noise is missing required field {exc.args[0]!r}") from None
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"noise: {exc}") from None

    state_spec = doc.get("state")
    if not isinstance(state_spec, dict):
        raise ConfigError("field 'state' (object) is required")
    postsel_spec = doc.get("postselection", {"preset": "uniform_plus"})
    if not isinstance(postsel_spec, dict):
        raise ConfigError("field 'postselection' must be an object")

    return RunConfig(
        state_spec=state_spec,
        postselection_spec=postsel_spec,
        theta=field("theta", None, float),
        epsilon=field("epsilon", 0.2, float),
        g=field("g", math.pi, float),
        method=method,
        noise=noise,
        output_path=field("output_path", "-", str),
        format=fmt,
    )


def _apply_overrides(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    if args.method is not None:
        if args.method not in METHODS:
            raise ConfigError(f"--method must be one of {METHODS}")
        cfg = replace(cfg, method=args.method)
    if args.epsilon is not None:
        cfg = replace(cfg, epsilon=args.epsilon)
    if args.out is not None:
        cfg = replace(cfg, output_path=args.out)
    if args.format is not None:
        cfg = replace(cfg, format=args.format)
    if args.no_timestamp:
        cfg = replace(cfg, timestamp=False)
    if args.pairs is not None or args.trials is not None or args.seed is not None:
        base = cfg.noise
        try:
            noise = CountingConfig(
                pairs_per_setting=args.pairs if args.pairs is not None
                else (base.pairs_per_setting if base else None),
                trials=args.trials if args.trials is not None
                else (base.trials if base else 1),
                seed=args.seed if args.seed is not None
                else (base.seed if base else 0),
                clamp=base.clamp if base else False,
            )
        except TypeError:
            raise ConfigError("--pairs is required to enable noise from the command line") from None
        cfg = replace(cfg, noise=noise)
    return cfg


def _protocol_config(cfg: RunConfig) -> ProtocolConfig:
    state = _resolve_state(cfg)
    postselection = _resolve_postselection(cfg, state.dims)
    try:
        return ProtocolConfig(system_state=state, postselection=postselection,
                              epsilon=cfg.epsilon, g=cfg.g)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


# ---------------------------------------------------------------------------
# table output

def _fmt_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_table(rows: list[dict], fieldnames: list[str], *, meta: dict,
                output_path: str, fmt: str, timestamp: bool,
                json_extra: dict | None = None) -> None:
    meta_out = {"schema_version": SCHEMA_VERSION, **meta}
    if fmt == "csv":
        buffer = io.StringIO()
        if timestamp:
            buffer.write(f"# generated={datetime.now(timezone.utc).isoformat()}\n")
        for key, value in meta_out.items():
            buffer.write(f"# {key}={_fmt_cell(value)}\n")
        writer = csv.DictWriter(buffer, fieldnames=fieldnames, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: _fmt_cell(row.get(k)) for k in fieldnames})
        text = buffer.getvalue()
    else:
        doc = dict(meta_out)
        if timestamp:
            doc["generated"] = datetime.now(timezone.utc).isoformat()
        if json_extra:
            doc.update(json_extra)
        doc["columns"] = fieldnames
        doc["rows"] = [{k: row.get(k) for k in fieldnames} for row in rows]
        text = json.dumps(doc, indent=2) + "\n"
    if output_path == "-":
        sys.stdout.write(text)
    else:
        with open(output_path, "w", encoding="utf-8", newline="") as handle:
            handle.write(text)


def _complex_cols(prefix: str, value: complex | None) -> dict:
    if value is None:
        return {f"{prefix}_re": None, f"{prefix}_im": None}
    return {f"{prefix}_re": float(value.real), f"{prefix}_im": float(value.imag)}


# ---------------------------------------------------------------------------
# subcommands

def cmd_reconstruct(cfg: RunConfig) -> None:
    """Amplitude table for one configuration (exact or noise-propagated)."""
    pcfg = _protocol_config(cfg)
    m, n = pcfg.dims
    meta = {"method": cfg.method, "epsilon": cfg.epsilon, "g": cfg.g}
    rows = []
    fieldnames = ["comp_a", "comp_b", "amp_re", "amp_im", "weak_re", "weak_im",
                  "mod_a_re", "mod_a_im", "mod_b_re", "mod_b_im",
                  "mod_pair_re", "mod_pair_im", "normalizer"]

    def base_row(j, l, amps, weak, mods, normalizer):
        row = {"comp_a": j, "comp_b": l, "normalizer": normalizer}
        row.update(_complex_cols("amp", complex(amps[j, l])))
        row.update(_complex_cols("weak", complex(weak[j, l])))
        row.update(_complex_cols("mod_a", mods.get(Setting("single_a", j=j))))
        row.update(_complex_cols("mod_b", mods.get(Setting("single_b", l=l))))
        row.update(_complex_cols("mod_pair", mods.get(Setting("pair", j=j, l=l))))
        return row

    if cfg.noise is None:
        result = reconstruct_state(pcfg, cfg.method)
        meta["reference_component"] = "%d,%d" % result.reference_component
        for j in range(m):
            for l in range(n):
                rows.append(base_row(j, l, result.amplitudes, result.weak_values,
                                     result.modulars, result.normalizer))
    else:
        mc = monte_carlo(pcfg, cfg.noise, method=cfg.method)
        meta.update(pairs_per_setting=cfg.noise.pairs_per_setting,
                    trials=cfg.noise.trials, seed=cfg.noise.seed,
                    trials_kept=mc.amplitudes.samples_kept,
                    trials_rejected=mc.amplitudes.samples_rejected)
        mod_means = {st: est.mean for st, est in mc.modulars.items()}
        mod_stds = {st: est.std for st, est in mc.modulars.items()}
        fieldnames = fieldnames + ["amp_re_std", "amp_im_std", "weak_re_std",
                                   "weak_im_std", "mod_a_re_std", "mod_a_im_std",
                                   "mod_b_re_std", "mod_b_im_std",
                                   "mod_pair_re_std", "mod_pair_im_std",
                                   "normalizer_std"]
        for j in range(m):
            for l in range(n):
                row = base_row(j, l, mc.amplitudes.mean, mc.weak_values.mean,
                               mod_means, float(mc.normalizer.mean))
                amp_std = mc.amplitudes.std[j, l]
                weak_std = mc.weak_values.std[j, l]
                row.update(amp_re_std=float(amp_std.real), amp_im_std=float(amp_std.imag),
                           weak_re_std=float(weak_std.real), weak_im_std=float(weak_std.imag),
                           normalizer_std=float(mc.normalizer.std))
                for prefix, key in (("mod_a", Setting("single_a", j=j)),
                                    ("mod_b", Setting("single_b", l=l)),
                                    ("mod_pair", Setting("pair", j=j, l=l))):
                    std = mod_stds.get(key)
                    row[f"{prefix}_re_std"] = None if std is None else float(std.real)
                    row[f"{prefix}_im_std"] = None if std is None else float(std.imag)
                rows.append(row)

    write_table(rows, fieldnames, meta=meta, output_path=cfg.output_path,
                fmt=cfg.format, timestamp=cfg.timestamp)


def cmd_sweep_theta(cfg: RunConfig, theta_min: float, theta_max: float, steps: int) -> None:
    """Phase sweep of the fig3 family; emits every method side by side.

    Rows where the postselection is orthogonal (theta = +/-pi with the
    uniform postselection) carry an error marker and empty numeric cells.
    """
    if steps < 2:
        raise ConfigError("--steps must be at least 2")
    if "preset" in cfg.state_spec and cfg.state_spec["preset"] != "fig3":
        raise ConfigError("sweep-theta requires the fig3 state preset")
    if cfg.noise is not None:
        sys.stderr.write("warning: sweep-theta runs the exact pipeline; noise config ignored\n")

    postselection = _resolve_postselection(cfg, (2, 2))
    thetas = np.linspace(theta_min, theta_max, steps)
    methods = ("definitional", "first_order", "exact_inversion")
    a_set, b_set, pair_set = (Setting("single_a", j=1), Setting("single_b", l=1),
                              Setting("pair", j=1, l=1))
    rows = []
    for theta in thetas:
        state = phase_bell(float(theta))
        for method in methods:
            row = {"theta": float(theta), "method": method, "error": None}
            try:
                pcfg = ProtocolConfig(system_state=state, postselection=postselection,
                                      epsilon=cfg.epsilon, g=cfg.g)
                result = reconstruct_state(pcfg, method)
            except ModvalError as exc:
                row["error"] = exc.code
                row.update(_complex_cols("mod_a", None))
                row.update(_complex_cols("mod_b", None))
                row.update(_complex_cols("mod_pair", None))
                row.update(_complex_cols("psi_vv", None))
            else:
                row.update(_complex_cols("mod_a", result.modulars[a_set]))
                row.update(_complex_cols("mod_b", result.modulars[b_set]))
                row.update(_complex_cols("mod_pair", result.modulars[pair_set]))
                row.update(_complex_cols("psi_vv", complex(result.amplitudes[1, 1])))
            rows.append(row)

    fieldnames = ["theta", "method", "mod_a_re", "mod_a_im", "mod_b_re", "mod_b_im",
                  "mod_pair_re", "mod_pair_im", "psi_vv_re", "psi_vv_im", "error"]
    meta = {"epsilon": cfg.epsilon, "g": cfg.g,
            "theta_min": theta_min, "theta_max": theta_max, "steps": steps}
    write_table(rows, fieldnames, meta=meta, output_path=cfg.output_path,
                fmt=cfg.format, timestamp=cfg.timestamp)


def _require_two_qubits(pcfg: ProtocolConfig) -> None:
    if pcfg.dims != (2, 2):
        raise ConfigError("tomography requires a two-qubit (2 x 2) system")


def cmd_tomography(cfg: RunConfig) -> None:
    """Density-matrix artifact from linear inversion (exact or one noisy draw)."""
    pcfg = _protocol_config(cfg)
    _require_two_qubits(pcfg)
    expectations = pauli_expectations(pcfg.system_state)
    meta = {}
    if cfg.noise is not None:
        rng = trial_rng(cfg.noise.seed, 0)
        expectations = sample_pauli_expectations(expectations, cfg.noise.pairs_per_setting, rng)
        meta.update(pairs_per_setting=cfg.noise.pairs_per_setting, seed=cfg.noise.seed)
    rho = linear_inversion(expectations)
    meta.update(min_eigenvalue=rho.min_eigenvalue, positive=rho.positive)
    rows = [{"row": i, "col": j,
             "re": float(rho.mat[i, j].real), "im": float(rho.mat[i, j].imag)}
            for i in range(4) for j in range(4)]
    matrix = {"matrix_re": rho.mat.real.tolist(), "matrix_im": rho.mat.imag.tolist()}
    write_table(rows, ["row", "col", "re", "im"], meta=meta,
                output_path=cfg.output_path, fmt=cfg.format, timestamp=cfg.timestamp,
                json_extra=matrix)


def cmd_compare(cfg: RunConfig) -> None:
    """Fidelities: direct reconstruction vs tomography vs the true state."""
    pcfg = _protocol_config(cfg)
    _require_two_qubits(pcfg)
    truth = pcfg.system_state
    exact_expect = pauli_expectations(truth)
    s = s_parameter(cfg.g)
    fieldnames = ["trial", "fidelity_direct_vs_truth", "fidelity_tomography_vs_truth",
                  "fidelity_direct_vs_tomography", "error"]
    meta = {"method": cfg.method, "epsilon": cfg.epsilon}
    rows = []

    def fidelity_row(trial, direct_state, rho):
        return {
            "trial": trial,
            "fidelity_direct_vs_truth": fidelity_states(truth, direct_state),
            "fidelity_tomography_vs_truth": fidelity_pure(rho, truth),
            "fidelity_direct_vs_tomography": fidelity_pure(rho, direct_state),
            "error": None,
        }

    if cfg.noise is None:
        result = reconstruct_state(pcfg, cfg.method)
        rho = linear_inversion(exact_expect)
        rows.append(fidelity_row(0, result.state(), rho))
    else:
        method = cfg.method if cfg.method != "definitional" else "exact_inversion"
        exact_probs = collect_probabilities(pcfg)
        meta.update(pairs_per_setting=cfg.noise.pairs_per_setting,
                    trials=cfg.noise.trials, seed=cfg.noise.seed)
        for trial in range(cfg.noise.trials):
            rng = trial_rng(cfg.noise.seed, trial)
            probs = {}
            for setting, (p1, p2) in exact_probs.items():
                rec = sample_detection(setting, p1, p2, cfg.noise.pairs_per_setting, rng)
                probs[setting] = (rec.p1, rec.p2)
            noisy_expect = sample_pauli_expectations(exact_expect,
                                                     cfg.noise.pairs_per_setting, rng)
            try:
                result = reconstruct(dims=pcfg.dims, postselection=pcfg.postselection,
                                     s=s, probabilities=probs, epsilon=cfg.epsilon,
                                     method=method, clamp=cfg.noise.clamp)
            except NegativeDiscriminant as exc:
                rows.append({"trial": trial, "error": exc.code})
                continue
            rho = linear_inversion(noisy_expect)
            rows.append(fidelity_row(trial, result.state(), rho))

    write_table(rows, fieldnames, meta=meta, output_path=cfg.output_path,
                fmt=cfg.format, timestamp=cfg.timestamp)


# ---------------------------------------------------------------------------
# argument parsing and dispatch

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="modval",
        description="Direct measurement of bipartite pure states from modular values",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("reconstruct", "amplitude table for one configuration"),
        ("sweep-theta", "phase sweep of the fig3 state family"),
        ("tomography", "linear-inversion density matrix baseline"),
        ("compare", "direct reconstruction vs tomography fidelities"),
    ):
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", required=True, help="path to the JSON run config")
        cmd.add_argument("--method", choices=METHODS, default=None)
        cmd.add_argument("--epsilon", type=float, default=None)
        cmd.add_argument("--pairs", type=int, default=None,
                         help="photon pairs per setting (enables noise)")
        cmd.add_argument("--trials", type=int, default=None)
        cmd.add_argument("--seed", type=int, default=None)
        cmd.add_argument("--out", default=None, help="output path ('-' for stdout)")
        cmd.add_argument("--format", choices=("csv", "json"), default=None)
        cmd.add_argument("--no-timestamp", action="store_true",
                         help="omit the generated-at header line")
        if name == "sweep-theta":
            cmd.add_argument("--theta-min", type=float, default=-math.pi)
            cmd.add_argument("--theta-max", type=float, default=math.pi)
            cmd.add_argument("--steps", type=int, default=41)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _apply_overrides(load_config(args.config), args)
        if args.command == "reconstruct":
            cmd_reconstruct(cfg)
        elif args.command == "sweep-theta":
            cmd_sweep_theta(cfg, args.theta_min, args.theta_max, args.steps)
        elif args.command == "tomography":
            cmd_tomography(cfg)
        else:
            cmd_compare(cfg)
    except ModvalError as exc:
        sys.stderr.write(f"error: {exc.code}: {exc}\n")
        for err_type, code in _EXIT_BY_ERROR:
            if isinstance(exc, err_type):
                return code
        return EXIT_CONFIG
    return EXIT_OK


def entry() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    raise SystemExit(main())
