"""Command-line front end.

Subcommands: witness, channel-moments, adaptive, sweep-squeezing,
contour-displacement, region-phase, identity-suite.  Runs are described by a
JSON config file (--config) and/or shorthand flags; flags win over the file.
Every run echoes its fully resolved configuration to stderr and into a
sidecar metadata file next to the output artifact; artifacts are written
atomically (temp file + rename).

Exit codes: 0 success, 1 numerical/domain failure, 2 configuration failure
(unreadable or invalid config, bad channel spec, misused subcommand).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from dataclasses import dataclass, field
from importlib import resources

import numpy as np

from . import __version__
from ._kernels import BACKEND
from .channels import (
    EmpiricalPdt,
    adaptive_correlate,
    correlation_coefficients,
    empirical_standard_errors,
    moments_from_pdt,
    moments_to_dict,
    pdt_from_dict,
    pdt_to_dict,
)
from .errors import ChannelError, ConfigError, GaussfadeError, MisuseError
from .experiments import (
    displacement_contour,
    identity_suite,
    phase_region_map,
    squeezing_sweep,
)
from .states import GaussianState, asymmetric_tmsv, displace, state_from_dict, tmsv_state
from .witness import witness_expansion

COMMANDS = (
    "witness",
    "channel-moments",
    "adaptive",
    "sweep-squeezing",
    "contour-displacement",
    "region-phase",
    "identity-suite",
)

#: Environment variable naming the default directory for output artifacts.
OUT_DIR_ENV = "GAUSSFADE_OUT_DIR"

_CONFIG_FIELDS = {"command", "state_spec", "channel_spec", "output", "seed", "tolerances", "sweep"}
_OUTPUT_FIELDS = {"path", "format"}
_TOLERANCE_FIELDS = {"bisect", "identity_rtol"}
_STATE_KINDS = ("tmsv", "asymmetric-tmsv", "explicit")


@dataclass
class RunConfig:
    """Fully resolved run description; echoed verbatim into run metadata."""

    command: str
    state_spec: dict = field(default_factory=dict)
    channel_spec: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)
    seed: int = 0
    tolerances: dict = field(default_factory=dict)
    sweep: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "command": self.command,
            "state_spec": self.state_spec,
            "channel_spec": self.channel_spec,
            "output": self.output,
            "seed": self.seed,
            "tolerances": self.tolerances,
            "sweep": self.sweep,
        }


def runconfig_from_dict(d: dict) -> RunConfig:
    """Strict parse: unknown fields are rejected, not ignored."""
    if not isinstance(d, dict):
        raise ConfigError(f"config must be a JSON object, got {type(d).__name__}")
    unknown = set(d) - _CONFIG_FIELDS
    if unknown:
        raise ConfigError(f"unknown config fields: {sorted(unknown)}")
    command = d.get("command", "")
    if command and command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; expected one of {list(COMMANDS)}")
    output = d.get("output", {})
    if not isinstance(output, dict) or set(output) - _OUTPUT_FIELDS:
        raise ConfigError(f"output must be an object with fields {sorted(_OUTPUT_FIELDS)}")
    fmt = output.get("format")
    if fmt is not None and fmt not in ("csv", "json"):
        raise ConfigError(f"output format must be 'csv' or 'json', got {fmt!r}")
    tolerances = d.get("tolerances", {})
    if not isinstance(tolerances, dict) or set(tolerances) - _TOLERANCE_FIELDS:
        raise ConfigError(f"tolerances must be an object with fields {sorted(_TOLERANCE_FIELDS)}")
    for k, v in tolerances.items():
        if not isinstance(v, (int, float)) or isinstance(v, bool) or not v > 0:
            raise ConfigError(f"tolerances.{k} must be a positive number, got {v!r}")
    seed = d.get("seed", 0)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        raise ConfigError(f"seed must be an unsigned 64-bit integer, got {seed!r}")
    for name in ("state_spec", "channel_spec", "sweep"):
        if not isinstance(d.get(name, {}), dict):
            raise ConfigError(f"{name} must be an object")
    return RunConfig(
        command=command,
        state_spec=dict(d.get("state_spec", {})),
        channel_spec=dict(d.get("channel_spec", {})),
        output=dict(output),
        seed=seed,
        tolerances=dict(tolerances),
        sweep=dict(d.get("sweep", {})),
    )


def _load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from exc


def preset_channel_names() -> list[str]:
    root = resources.files("gaussfade") / "presets"
    return sorted(p.name[: -len(".json")] for p in root.iterdir() if p.name.endswith(".json"))


def load_channel_spec(name_or_path: str) -> dict:
    """Accepts a preset name (e.g. '144km') or a path to a channel JSON file."""
    root = resources.files("gaussfade") / "presets"
    candidate = root / f"{name_or_path}.json"
    if candidate.is_file():
        return json.loads(candidate.read_text())
    if os.path.exists(name_or_path):
        return _load_json(name_or_path)
    raise ConfigError(
        f"unknown channel {name_or_path!r}: not a preset "
        f"({', '.join(preset_channel_names())}) and not a file"
    )


def _pair_to_complex(name: str, v) -> complex:
    if isinstance(v, bool):
        raise ConfigError(f"{name} must be a number or [re, im] pair, got {v!r}")
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ConfigError(f"{name} must be a number or [re, im] pair, got {v!r}")


def build_state(spec: dict) -> GaussianState:
    """State spec dict -> GaussianState.  Strict: unknown fields rejected."""
    if not spec:
        raise ConfigError("no state given: pass --xi or a config with a 'state_spec' object")
    kind = spec.get("kind")
    if kind is None:
        raise ConfigError(f"state_spec needs a 'kind' (one of {list(_STATE_KINDS)})")
    if kind == "tmsv":
        unknown = set(spec) - {"kind", "xi", "alpha", "beta"}
        if unknown:
            raise ConfigError(f"unknown tmsv state fields: {sorted(unknown)}")
        st = tmsv_state(float(spec.get("xi", 1.0)))
        alpha = _pair_to_complex("alpha", spec.get("alpha", 0.0))
        beta = _pair_to_complex("beta", spec.get("beta", 0.0))
        if alpha != 0 or beta != 0:
            st = displace(st, alpha, beta)
        return st
    if kind == "asymmetric-tmsv":
        unknown = set(spec) - {"kind", "xi", "t2", "alpha"}
        if unknown:
            raise ConfigError(f"unknown asymmetric-tmsv state fields: {sorted(unknown)}")
        return asymmetric_tmsv(
            float(spec.get("xi", 1.0)),
            float(spec.get("t2", 0.5)),
            _pair_to_complex("alpha", spec.get("alpha", 0.0)),
        )
    if kind == "explicit":
        unknown = set(spec) - {"kind", "mean_a", "mean_b", "V"}
        if unknown:
            raise ConfigError(f"unknown explicit state fields: {sorted(unknown)}")
        return state_from_dict({k: v for k, v in spec.items() if k != "kind"})
    raise ConfigError(f"unknown state kind {kind!r}; expected one of {list(_STATE_KINDS)}")


def build_channel(spec: dict):
    """Channel spec dict -> (PdtModel, ChannelMoments).

    The spec is either {"preset": <name-or-path>} or an inline transmittance
    model in the documented JSON shape.
    """
    if not spec:
        raise ConfigError(
            "no channel given: pass --eta/--channel or a config with a 'channel_spec' object"
        )
    if "preset" in spec:
        extra = set(spec) - {"preset"}
        if extra:
            raise ConfigError(f"a preset channel spec cannot carry extra fields: {sorted(extra)}")
        spec = load_channel_spec(spec["preset"])
    model = pdt_from_dict(spec)
    return model, moments_from_pdt(model)


def _atomic_write(path: str, data: str) -> None:
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gaussfade-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _atomic_csv(path: str, write_fn) -> None:
    """Run write_fn(tmp_path) then rename onto path."""
    directory = os.path.dirname(os.path.abspath(path)) or "."
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".gaussfade-", suffix=".tmp")
    os.close(fd)
    try:
        write_fn(tmp)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _json_dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _resolve_out(cfg: RunConfig, default_name: str) -> str:
    path = cfg.output.get("path")
    if path is None:
        path = os.path.join(os.environ.get(OUT_DIR_ENV, "."), default_name)
    elif os.environ.get(OUT_DIR_ENV) and not os.path.isabs(path):
        path = os.path.join(os.environ[OUT_DIR_ENV], path)
    return path


def _echo_config(cfg: RunConfig) -> None:
    print(f"# resolved config: {json.dumps(cfg.to_dict(), sort_keys=True)}", file=sys.stderr)


def _write_sidecar(out_path: str, cfg: RunConfig, extra_meta: dict) -> None:
    sidecar = {
        "config": cfg.to_dict(),
        "package_version": __version__,
        "kernel_backend": BACKEND,
        **extra_meta,
    }
    _atomic_write(out_path + ".meta.json", _json_dumps(sidecar))


def _emit_sweep(result, cfg: RunConfig, default_stem: str) -> None:
    fmt = cfg.output.get("format", "csv")
    out = _resolve_out(cfg, f"{default_stem}.{fmt}")
    if fmt == "csv":
        _atomic_csv(out, result.to_csv)
        stem, _ = os.path.splitext(out)
        boundary_path = stem + "_boundary.csv"
        _atomic_csv(boundary_path, result.boundary_to_csv)
        print(f"wrote {out} and {boundary_path}", file=sys.stderr)
    else:
        payload = {
            "axes": {k: np.asarray(v, dtype=float).tolist() for k, v in result.axes.items()},
            "columns": {k: np.asarray(v).tolist() for k, v in result.columns.items()},
            "boundary": result.boundary,
            "metadata": result.metadata,
        }
        _atomic_write(out, _json_dumps(payload))
        print(f"wrote {out}", file=sys.stderr)
    _write_sidecar(out, cfg, {"sweep_metadata": result.metadata})


def _cmd_witness(cfg: RunConfig) -> int:
    state = build_state(cfg.state_spec)
    _, moments = build_channel(cfg.channel_spec)
    report = witness_expansion(state, moments)
    text = _json_dumps(report.to_dict())
    sys.stdout.write(text)
    if cfg.output.get("path"):
        out = _resolve_out(cfg, "witness.json")
        _atomic_write(out, text)
        _write_sidecar(out, cfg, {})
    return 0


def _cmd_channel_moments(cfg: RunConfig, gamma_check: bool) -> int:
    model, moments = build_channel(cfg.channel_spec)
    gamma, dgamma = correlation_coefficients(moments)
    payload = {
        "model": pdt_to_dict(model),
        "moments": moments_to_dict(moments),
        "gamma": gamma,
        "delta_gamma": dgamma,
    }
    if isinstance(model, EmpiricalPdt):
        payload["standard_errors"] = empirical_standard_errors(model)
    if gamma_check:
        ok = 0.0 <= gamma <= 1.0 + 1e-12 and abs(dgamma) <= 1.0 + 1e-12
        payload["gamma_check"] = {"pass": bool(ok)}
    text = _json_dumps(payload)
    sys.stdout.write(text)
    if cfg.output.get("path"):
        out = _resolve_out(cfg, "channel_moments.json")
        _atomic_write(out, text)
        _write_sidecar(out, cfg, {})
    if gamma_check and not payload["gamma_check"]["pass"]:
        print("gamma check failed: coefficients out of range", file=sys.stderr)
        return 1
    return 0


def _cmd_adaptive(cfg: RunConfig, gamma_check: bool) -> int:
    model, _ = build_channel(cfg.channel_spec)
    correlated = adaptive_correlate(model)
    moments = moments_from_pdt(correlated)
    gamma, dgamma = correlation_coefficients(moments)
    payload = {
        "model": pdt_to_dict(correlated),
        "moments": moments_to_dict(moments),
        "gamma": gamma,
        "delta_gamma": dgamma,
    }
    if gamma_check:
        degenerate = moments.is_deterministic()
        ok = abs(gamma - 1.0) <= 1e-8 and (degenerate or abs(dgamma - 1.0) <= 1e-8)
        payload["gamma_check"] = {"pass": bool(ok), "degenerate_zero_variance": bool(degenerate)}
    text = _json_dumps(payload)
    sys.stdout.write(text)
    if cfg.output.get("path"):
        out = _resolve_out(cfg, "adaptive.json")
        _atomic_write(out, text)
        _write_sidecar(out, cfg, {})
    if gamma_check and not payload["gamma_check"]["pass"]:
        print("adaptive channel is not perfectly correlated", file=sys.stderr)
        return 1
    return 0


def _sweep_params(cfg: RunConfig, allowed: set[str]) -> dict:
    unknown = set(cfg.sweep) - allowed
    if unknown:
        raise ConfigError(f"unknown sweep fields for {cfg.command}: {sorted(unknown)}")
    return cfg.sweep


def _cmd_sweep_squeezing(cfg: RunConfig) -> int:
    _, moments = build_channel(cfg.channel_spec)
    p = _sweep_params(cfg, {"xi_min", "xi_max", "n_points", "displacement"})
    displacement = None
    if "displacement" in p:
        d = p["displacement"]
        if not isinstance(d, (list, tuple)) or len(d) != 2:
            raise ConfigError("sweep.displacement must be a pair [alpha, beta]")
        displacement = (
            _pair_to_complex("displacement[0]", d[0]),
            _pair_to_complex("displacement[1]", d[1]),
        )
    result = squeezing_sweep(
        moments,
        xi_range=(float(p.get("xi_min", 0.0)), float(p.get("xi_max", 5.0))),
        n_points=int(p.get("n_points", 201)),
        displacement=displacement,
        bisect_tol=float(cfg.tolerances.get("bisect", 1e-8)),
        seed=cfg.seed,
    )
    _emit_sweep(result, cfg, "sweep_squeezing")
    return 0


def _cmd_contour(cfg: RunConfig) -> int:
    _, moments = build_channel(cfg.channel_spec)
    p = _sweep_params(cfg, {"xi", "t2", "n_rays", "n_radial", "r_max"})
    result = displacement_contour(
        moments,
        xi=float(p.get("xi", 1.0)),
        t2=float(p.get("t2", 0.5)),
        n_rays=int(p.get("n_rays", 64)),
        n_radial=int(p.get("n_radial", 400)),
        r_max=float(p.get("r_max", 10.0)),
        bisect_tol=float(cfg.tolerances.get("bisect", 1e-9)),
        seed=cfg.seed,
    )
    _emit_sweep(result, cfg, "contour_displacement")
    return 0


def _cmd_region(cfg: RunConfig) -> int:
    _, moments = build_channel(cfg.channel_spec)
    p = _sweep_params(cfg, {"xi", "total_power", "n_power", "n_phase"})
    result = phase_region_map(
        moments,
        xi=float(p.get("xi", 0.5)),
        total_power=float(p.get("total_power", 50.0)),
        n_power=int(p.get("n_power", 101)),
        n_phase=int(p.get("n_phase", 101)),
        bisect_tol=float(cfg.tolerances.get("bisect", 1e-8)),
        seed=cfg.seed,
    )
    _emit_sweep(result, cfg, "region_phase")
    return 0


def _cmd_identity_suite(cfg: RunConfig) -> int:
    report = identity_suite(
        seed=cfg.seed,
        rtol=float(cfg.tolerances.get("identity_rtol", 1e-10)),
    )
    text = _json_dumps(report)
    sys.stdout.write(text)
    if cfg.output.get("path"):
        out = _resolve_out(cfg, "identity_suite.json")
        _atomic_write(out, text)
        _write_sidecar(out, cfg, {})
    return 0 if report["pass"] else 1


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gaussfade",
        description="Two-mode Gaussian entanglement through fluctuating-loss channels.",
    )
    parser.add_argument("--version", action="version", version=f"gaussfade {__version__}")
    sub = parser.add_subparsers(dest="command", metavar="command")

    def add_common(sp):
        sp.add_argument("--config", help="JSON run-config file")
        sp.add_argument("--out", help="output artifact path")
        sp.add_argument("--format", choices=("csv", "json"), help="artifact format")
        sp.add_argument("--seed", type=int, help="seed for all randomized pieces")
        sp.add_argument("--tol", type=float, help="bisection tolerance override")
        sp.add_argument("--channel", metavar="NAME_OR_PATH",
                        help="channel preset name or spec file "
                             f"(presets: {', '.join(preset_channel_names())})")

    sp = sub.add_parser("witness", help="witness report for one state and channel")
    add_common(sp)
    sp.add_argument("--xi", type=float, help="squeezing of a two-mode squeezed vacuum input")
    sp.add_argument("--eta", type=float, help="deterministic channel intensity transmittance")

    sp = sub.add_parser("channel-moments", help="transmittance moments and correlation coefficients")
    add_common(sp)
    sp.add_argument("--eta", type=float, help="deterministic channel intensity transmittance")
    sp.add_argument("--gamma-check", action="store_true",
                    help="validate the correlation coefficients' ranges")

    sp = sub.add_parser("adaptive", help="apply the adaptive min-statistic protocol to a channel")
    add_common(sp)
    sp.add_argument("--gamma-check", action="store_true",
                    help="verify the protocol output is perfectly correlated")

    sp = sub.add_parser("sweep-squeezing", help="witness vs squeezing with boundary refinement")
    add_common(sp)
    sp.add_argument("--xi-min", type=float, help="lower end of the squeezing grid")
    sp.add_argument("--xi-max", type=float, help="upper end of the squeezing grid")
    sp.add_argument("--points", type=int, help="number of grid points")

    sp = sub.add_parser("contour-displacement", help="entanglement boundary vs displacement")
    add_common(sp)
    sp.add_argument("--xi", type=float, help="input squeezing")
    sp.add_argument("--t2", type=float, help="beam-splitter transmittance of the state family")

    sp = sub.add_parser("region-phase", help="entanglement region vs power split and phase sum")
    add_common(sp)
    sp.add_argument("--xi", type=float, help="input squeezing")
    sp.add_argument("--power", type=float, help="total displacement power")

    sp = sub.add_parser("identity-suite", help="randomized determinant-identity self test")
    add_common(sp)
    return parser


def _merge_cli(cfg: RunConfig, args: argparse.Namespace) -> RunConfig:
    """Apply shorthand flags on top of the file config; flags win."""
    if getattr(args, "out", None):
        cfg.output["path"] = args.out
    if getattr(args, "format", None):
        cfg.output["format"] = args.format
    if getattr(args, "seed", None) is not None:
        if not 0 <= args.seed < 2**64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {args.seed}")
        cfg.seed = args.seed
    if getattr(args, "tol", None) is not None:
        if not args.tol > 0:
            raise ConfigError(f"--tol must be positive, got {args.tol}")
        cfg.tolerances["bisect"] = args.tol
    if getattr(args, "channel", None):
        cfg.channel_spec = {"preset": args.channel}
    if getattr(args, "eta", None) is not None:
        cfg.channel_spec = {
            "kind": "deterministic",
            "params": {"eta_a": args.eta, "eta_b": args.eta},
        }
    if cfg.command == "witness" and getattr(args, "xi", None) is not None:
        cfg.state_spec = {"kind": "tmsv", "xi": args.xi}
    if cfg.command == "sweep-squeezing":
        if args.xi_min is not None:
            cfg.sweep["xi_min"] = args.xi_min
        if args.xi_max is not None:
            cfg.sweep["xi_max"] = args.xi_max
        if args.points is not None:
            cfg.sweep["n_points"] = args.points
    if cfg.command in ("contour-displacement", "region-phase") and getattr(args, "xi", None) is not None:
        cfg.sweep["xi"] = args.xi
    if cfg.command == "contour-displacement" and args.t2 is not None:
        cfg.sweep["t2"] = args.t2
    if cfg.command == "region-phase" and args.power is not None:
        cfg.sweep["total_power"] = args.power
    return cfg


_DEFAULT_CHANNEL = {
    "contour-displacement": {"preset": "gamma09"},
    "region-phase": {"preset": "1p6km_correlated"},
}

_DISPATCH = {
    "witness": lambda cfg, args: _cmd_witness(cfg),
    "channel-moments": lambda cfg, args: _cmd_channel_moments(cfg, args.gamma_check),
    "adaptive": lambda cfg, args: _cmd_adaptive(cfg, args.gamma_check),
    "sweep-squeezing": lambda cfg, args: _cmd_sweep_squeezing(cfg),
    "contour-displacement": lambda cfg, args: _cmd_contour(cfg),
    "region-phase": lambda cfg, args: _cmd_region(cfg),
    "identity-suite": lambda cfg, args: _cmd_identity_suite(cfg),
}


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if not args.command:
        parser.print_help(sys.stderr)
        return 2

    try:
        if getattr(args, "config", None):
            cfg = runconfig_from_dict(_load_json(args.config))
            if cfg.command and cfg.command != args.command:
                raise ConfigError(
                    f"config file says command {cfg.command!r} but {args.command!r} was invoked"
                )
        else:
            cfg = RunConfig(command=args.command)
        cfg.command = args.command
        cfg = _merge_cli(cfg, args)
        if not cfg.channel_spec and cfg.command in _DEFAULT_CHANNEL:
            cfg.channel_spec = dict(_DEFAULT_CHANNEL[cfg.command])
        if cfg.command == "witness" and not cfg.state_spec:
            cfg.state_spec = {"kind": "tmsv", "xi": 1.0}
        _echo_config(cfg)
        # Building states and channels is part of configuration: a spec that
        # violates a model invariant is a config failure, not a runtime one.
        return _DISPATCH[cfg.command](cfg, args)
    except (ConfigError, ChannelError, MisuseError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except GaussfadeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
