"""JSON experiment configuration: parsing, validation, and echoing.

The schema (all keys except ``scenario`` optional, defaults in parentheses):

    {
      "scenario": { "n_theta": 31, "n_freq": 3, "grid": [50, 50, 10],
                    "voxel_size_l": 1.5, "roi_offset_z0": 195.0,
                    "roi_extent": [36.0, 36.0, 7.5],
                    "center_freq_hz": 6.0e10, "bandwidth_hz": 6.0e9,
                    "rng_seed": 0, "snr_db": null },
      "targets": [ {"box": [[x0,x1],[y0,y1],[z0,z1]], "amplitude": [re, im]} ],
      "admm":   { "lambda": 0.01, "rho": 1.0, "n_blocks": 31,
                  "max_iter": 500, "eps_abs": 1e-6, "eps_rel": 1e-4 },
      "fista":  { "lambda": <admm lambda>, "max_iter": 500, "tol": 1e-10 },
      "pinv":   { "trunc_rel_tol": 1e-10 },
      "sweep":  { "lambda": [...], "rho": [...] },
      "output_dir": "out",
      "noise_seed": 0,
      "support_rel_threshold": 0.2
    }

``snr_db`` accepts a number, the string "inf", or null (both meaning
noiseless). Validation is strict: unknown keys and every out-of-range field
are reported together in one ConfigError.
"""

import json
import math
from dataclasses import dataclass

from .admm import AdmmParams
from .errors import ConfigError
from .scene import ScenarioConfig


@dataclass(frozen=True)
class ExperimentConfig:
    """Everything one experiment needs: scenario, phantom, solver settings, outputs."""

    scenario: ScenarioConfig
    targets: tuple
    admm: AdmmParams
    admm_blocks: int
    fista_lam: float
    fista_max_iter: int
    fista_tol: float
    pinv_trunc_rel_tol: float
    sweep_lambdas: tuple
    sweep_rhos: tuple
    output_dir: str
    noise_seed: int
    support_rel_threshold: float

    @property
    def has_sweep(self):
        return bool(self.sweep_lambdas) and bool(self.sweep_rhos)


def load_experiment_config(path):
    """Parse and validate the JSON config file at ``path``."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigError([f"config file is not valid JSON: {exc}"]) from None
    return experiment_config_from_dict(raw)


def experiment_config_from_dict(raw):
    """Build an ExperimentConfig from a JSON-shaped dict, reporting every violation."""
    errors = []
    if not isinstance(raw, dict):
        raise ConfigError(["config root: must be a JSON object"])
    _reject_unknown(raw, {"scenario", "targets", "admm", "fista", "pinv", "sweep",
                          "output_dir", "noise_seed", "support_rel_threshold"}, "", errors)

    scenario = _parse_scenario(raw, errors)
    targets = _parse_targets(raw.get("targets", []), scenario, errors)
    admm_params, admm_blocks = _parse_admm(raw.get("admm", {}), scenario, errors)
    fista_lam, fista_max_iter, fista_tol = _parse_fista(raw.get("fista", {}), admm_params, errors)
    pinv_tol = _parse_pinv(raw.get("pinv", {}), errors)
    sweep_lams, sweep_rhos = _parse_sweep(raw.get("sweep"), admm_params, errors)

    output_dir = raw.get("output_dir", "out")
    if not isinstance(output_dir, str) or not output_dir:
        errors.append("output_dir: must be a nonempty string")
        output_dir = "out"
    noise_seed = raw.get("noise_seed", 0)
    if not _is_int(noise_seed) or noise_seed < 0:
        errors.append("noise_seed: must be an integer >= 0")
        noise_seed = 0
    rel_thr = _as_number(raw.get("support_rel_threshold", 0.2))
    if rel_thr is None or not 0.0 < rel_thr < 1.0:
        errors.append("support_rel_threshold: must lie in (0, 1)")
        rel_thr = 0.2

    if errors:
        raise ConfigError(errors)
    return ExperimentConfig(
        scenario=scenario,
        targets=targets,
        admm=admm_params,
        admm_blocks=admm_blocks,
        fista_lam=fista_lam,
        fista_max_iter=fista_max_iter,
        fista_tol=fista_tol,
        pinv_trunc_rel_tol=pinv_tol,
        sweep_lambdas=sweep_lams,
        sweep_rhos=sweep_rhos,
        output_dir=output_dir,
        noise_seed=noise_seed,
        support_rel_threshold=rel_thr,
    )


def experiment_config_to_dict(cfg):
    """JSON-ready dict that reproduces ``cfg`` through experiment_config_from_dict."""
    scenario = {
        "n_theta": cfg.scenario.n_theta,
        "n_freq": cfg.scenario.n_freq,
        "grid": list(cfg.scenario.grid),
        "voxel_size_l": cfg.scenario.voxel_size_l,
        "roi_offset_z0": cfg.scenario.roi_offset_z0,
        "roi_extent": list(cfg.scenario.roi_extent),
        "center_freq_hz": cfg.scenario.center_freq_hz,
        "bandwidth_hz": cfg.scenario.bandwidth_hz,
        "rng_seed": cfg.scenario.rng_seed,
        "snr_db": None if math.isinf(cfg.scenario.snr_db) else cfg.scenario.snr_db,
    }
    out = {
        "scenario": scenario,
        "targets": [
            {"box": [list(pair) for pair in box], "amplitude": [amp.real, amp.imag]}
            for box, amp in cfg.targets
        ],
        "admm": {
            "lambda": cfg.admm.lam,
            "rho": cfg.admm.rho,
            "n_blocks": cfg.admm_blocks,
            "max_iter": cfg.admm.max_iter,
            "eps_abs": cfg.admm.eps_abs,
            "eps_rel": cfg.admm.eps_rel,
        },
        "fista": {"lambda": cfg.fista_lam, "max_iter": cfg.fista_max_iter, "tol": cfg.fista_tol},
        "pinv": {"trunc_rel_tol": cfg.pinv_trunc_rel_tol},
        "output_dir": cfg.output_dir,
        "noise_seed": cfg.noise_seed,
        "support_rel_threshold": cfg.support_rel_threshold,
    }
    if cfg.has_sweep:
        out["sweep"] = {"lambda": list(cfg.sweep_lambdas), "rho": list(cfg.sweep_rhos)}
    return out


# -- section parsers ---------------------------------------------------------


def _parse_scenario(raw, errors):
    fallback = ScenarioConfig()
    if "scenario" not in raw:
        errors.append("scenario: required field is missing")
        return fallback
    section = raw["scenario"]
    if not isinstance(section, dict):
        errors.append("scenario: must be a JSON object")
        return fallback
    allowed = {"n_theta", "n_freq", "grid", "voxel_size_l", "roi_offset_z0", "roi_extent",
               "center_freq_hz", "bandwidth_hz", "rng_seed", "snr_db"}
    _reject_unknown(section, allowed, "scenario.", errors)
    kwargs = {}
    for key in allowed & section.keys():
        value = section[key]
        if key in ("grid", "roi_extent") and isinstance(value, list):
            value = tuple(value)
        if key == "snr_db":
            value = _parse_snr(value, errors)
            if value is None:
                continue
        kwargs[key] = value
    try:
        scenario = ScenarioConfig(**kwargs)
    except TypeError as exc:
        errors.append(f"scenario: {exc}")
        return fallback
    violations = scenario.violations()
    for violation in violations:
        errors.append(f"scenario.{violation}")
    return scenario if not violations else fallback


def _parse_snr(value, errors):
    if value is None:
        return math.inf
    if isinstance(value, str):
        if value.lower() in ("inf", "infinity"):
            return math.inf
        errors.append('scenario.snr_db: must be a number, null, or "inf"')
        return None
    number = _as_number(value)
    if number is None:
        errors.append('scenario.snr_db: must be a number, null, or "inf"')
        return None
    return number


def _parse_targets(section, scenario, errors):
    if not isinstance(section, list):
        errors.append("targets: must be a list of {box, amplitude} objects")
        return ()
    targets = []
    for idx, entry in enumerate(section):
        path = f"targets[{idx}]"
        if not isinstance(entry, dict) or set(entry) - {"box", "amplitude"}:
            errors.append(f"{path}: must be an object with keys 'box' and 'amplitude'")
            continue
        box = entry.get("box")
        box_ok = (
            isinstance(box, list) and len(box) == 3
            and all(isinstance(p, list) and len(p) == 2 and all(_is_int(c) for c in p) for p in box)
        )
        if not box_ok:
            errors.append(f"{path}.box: must be three [lo, hi] integer pairs")
            continue
        amp = entry.get("amplitude", 1.0)
        if isinstance(amp, list) and len(amp) == 2 and all(_as_number(c) is not None for c in amp):
            amplitude = complex(amp[0], amp[1])
        elif _as_number(amp) is not None:
            amplitude = complex(amp)
        else:
            errors.append(f"{path}.amplitude: must be a number or [re, im] pair")
            continue
        for (lo, hi), limit, axis in zip(box, scenario.grid, "xyz"):
            if not 0 <= lo < hi <= limit:
                errors.append(f"{path}.box: {axis} range [{lo}, {hi}) outside grid of {limit} voxels")
        targets.append(((tuple(box[0]), tuple(box[1]), tuple(box[2])), amplitude))
    return tuple(targets)


def _parse_admm(section, scenario, errors):
    defaults = {"lambda": 0.01, "rho": 1.0, "n_blocks": 31, "max_iter": 500,
                "eps_abs": 1e-6, "eps_rel": 1e-4}
    if not isinstance(section, dict):
        errors.append("admm: must be a JSON object")
        section = {}
    _reject_unknown(section, set(defaults), "admm.", errors)
    merged = {**defaults, **{k: v for k, v in section.items() if k in defaults}}

    lam = _as_number(merged["lambda"])
    if lam is None or not math.isfinite(lam) or lam < 0:
        errors.append("admm.lambda: must be a finite number >= 0")
        lam = defaults["lambda"]
    rho = _as_number(merged["rho"])
    if rho is None or not math.isfinite(rho) or rho <= 0:
        errors.append("admm.rho: must be a finite number > 0")
        rho = defaults["rho"]
    max_iter = merged["max_iter"]
    if not _is_int(max_iter) or max_iter < 1:
        errors.append("admm.max_iter: must be an integer >= 1")
        max_iter = defaults["max_iter"]
    eps = {}
    for key in ("eps_abs", "eps_rel"):
        val = _as_number(merged[key])
        if val is None or not math.isfinite(val) or val < 0:
            errors.append(f"admm.{key}: must be a finite number >= 0")
            val = defaults[key]
        eps[key] = val
    n_blocks = merged["n_blocks"]
    if not _is_int(n_blocks) or not 1 <= n_blocks <= scenario.n_measurements:
        errors.append(
            f"admm.n_blocks: must be an integer in [1, {scenario.n_measurements}] (the measurement count)"
        )
        n_blocks = 1
    params = AdmmParams(lam=lam, rho=rho, max_iter=max_iter,
                        eps_abs=eps["eps_abs"], eps_rel=eps["eps_rel"])
    return params, n_blocks


def _parse_fista(section, admm_params, errors):
    defaults = {"lambda": admm_params.lam, "max_iter": 500, "tol": 1e-10}
    if not isinstance(section, dict):
        errors.append("fista: must be a JSON object")
        section = {}
    _reject_unknown(section, set(defaults), "fista.", errors)
    merged = {**defaults, **{k: v for k, v in section.items() if k in defaults}}
    lam = _as_number(merged["lambda"])
    if lam is None or not math.isfinite(lam) or lam < 0:
        errors.append("fista.lambda: must be a finite number >= 0")
        lam = defaults["lambda"]
    max_iter = merged["max_iter"]
    if not _is_int(max_iter) or max_iter < 1:
        errors.append("fista.max_iter: must be an integer >= 1")
        max_iter = defaults["max_iter"]
    tol = _as_number(merged["tol"])
    if tol is None or not math.isfinite(tol) or tol < 0:
        errors.append("fista.tol: must be a finite number >= 0")
        tol = defaults["tol"]
    return lam, max_iter, tol


def _parse_pinv(section, errors):
    if not isinstance(section, dict):
        errors.append("pinv: must be a JSON object")
        section = {}
    _reject_unknown(section, {"trunc_rel_tol"}, "pinv.", errors)
    tol = _as_number(section.get("trunc_rel_tol", 1e-10))
    if tol is None or not 0.0 < tol < 1.0:
        errors.append("pinv.trunc_rel_tol: must lie in (0, 1)")
        tol = 1e-10
    return tol


def _parse_sweep(section, admm_params, errors):
    if section is None:
        return (), ()
    if not isinstance(section, dict):
        errors.append("sweep: must be a JSON object")
        return (), ()
    _reject_unknown(section, {"lambda", "rho"}, "sweep.", errors)
    out = {}
    for key, fallback, check in (
        ("lambda", (admm_params.lam,), lambda x: math.isfinite(x) and x >= 0),
        ("rho", (admm_params.rho,), lambda x: math.isfinite(x) and x > 0),
    ):
        if key not in section:
            out[key] = fallback
            continue
        values = section[key]
        numbers = [_as_number(v) for v in values] if isinstance(values, list) else None
        if not numbers or any(n is None or not check(n) for n in numbers):
            errors.append(f"sweep.{key}: must be a nonempty list of valid values")
            out[key] = fallback
        else:
            out[key] = tuple(numbers)
    return out["lambda"], out["rho"]


def _reject_unknown(section, allowed, prefix, errors):
    for key in sorted(set(section) - allowed):
        errors.append(f"{prefix}{key}: unknown field")


def _is_int(x):
    return isinstance(x, int) and not isinstance(x, bool)


def _as_number(x):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        return None
    return float(x)
