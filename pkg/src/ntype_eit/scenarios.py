"""Scenario configuration, compiled-in presets and the run pipeline.

A scenario is a JSON object::

    {
      "preset": "fig3",                      # optional, filled in first
      "kind": "sweep" | "gamma_scan" | "collapse",
      "params": {"omega_a": 2, "omega_b": 0.2, "omega_c": 10, ...},
      "units": {"gamma": 3.2798e7},          # optional: params, range in rad/s
      "sweep": {"axis": "delta_b", "range": [-10, 10], "n_points": 2001,
                "method": "numeric"},
      "series": {"parameter": "omega_c", "values": [0, 2, 5, 10]},
      "gammas": [0.05, 0.1, 0.2],            # gamma_scan
      "at_detuning": 5.0,                    # gamma_scan
      "collapse": {"gamma_c_small": 1e-7, "gamma_c_ref": 0.1},
      "output": "out/fig3",
      "emit_plot": true
    }

``series.parameter`` may be any SystemParams field or ``"method"``.
Outputs: one CSV per series (``<output>.csv`` or ``<output>-<label>.csv``,
header ``axis,re_rho23,im_rho23``), a JSON sidecar ``<output>.json`` and,
with ``emit_plot``, ``<output>.png`` plus a re-plot script
``<output>_plot.py``.  The sidecar's ``resolved_config`` is itself a valid
scenario that reproduces the CSVs.
"""

from __future__ import annotations

import copy
import dataclasses
import io
import json
import math
import os
import tempfile
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from ntype_eit import __version__, plotting
from ntype_eit.atom import ParameterError, SystemParams
from ntype_eit.spectra import (
    METHODS,
    Spectrum,
    SweepSpec,
    collapse_analysis,
    gamma_c_scan,
    sweep,
)

__all__ = [
    "ConfigError",
    "NumericalFailure",
    "ScenarioConfig",
    "PRESETS",
    "CSV_HEADER",
    "resolve_config",
    "load_config",
    "run_scenario",
]

CSV_HEADER = ("axis", "re_rho23", "im_rho23")
KINDS = ("sweep", "gamma_scan", "collapse")
CS_D2_GAMMA = 2 * math.pi * 5.22e6  # rad/s, Cs D2 natural linewidth

FIG_BASE = {"omega_a": 2.0, "omega_b": 0.2, "omega_c": 10.0}

PRESETS: dict[str, dict] = {
    "fig3": {
        "kind": "sweep",
        "params": FIG_BASE,
        "sweep": {"axis": "delta_b", "range": [-10.0, 10.0], "n_points": 2001, "method": "numeric"},
        "series": {"parameter": "omega_c", "values": [0.0, 2.0, 5.0, 10.0]},
    },
    "fig3_inset": {
        "kind": "sweep",
        "params": FIG_BASE,
        "sweep": {"axis": "delta_b", "range": [-10.0, 10.0], "n_points": 2001, "method": "numeric"},
        "series": {"parameter": "method", "values": list(METHODS)},
    },
    "fig4": {
        "kind": "sweep",
        "params": FIG_BASE,
        "sweep": {"axis": "delta_b", "range": [-10.0, 10.0], "n_points": 2001, "method": "numeric"},
        "series": {"parameter": "gamma_c", "values": [0.2, 0.5, 1.0, 2.0]},
    },
    "fig5": {
        "kind": "gamma_scan",
        "params": FIG_BASE,
        "gammas": [0.05, 0.1, 0.2, 0.3, 0.5, 0.75, 1.0, 1.5, 2.0],
        "at_detuning": 5.0,
    },
    "collapse": {
        "kind": "collapse",
        "params": {"omega_a": 2.0, "omega_b": 0.2, "omega_c": 20.0},
        "sweep": {"axis": "delta_b", "range": [-20.0, 20.0], "n_points": 2001, "method": "numeric"},
        "collapse": {"gamma_c_small": 1e-7, "gamma_c_ref": 0.1},
    },
    "cs_d2": {
        "kind": "sweep",
        "units": {"gamma": CS_D2_GAMMA},
        "params": {
            "omega_a": 2.0 * CS_D2_GAMMA,
            "omega_b": 0.2 * CS_D2_GAMMA,
            "omega_c": 10.0 * CS_D2_GAMMA,
            "gamma_a": CS_D2_GAMMA,
            "gamma_b": CS_D2_GAMMA,
            "gamma_c": CS_D2_GAMMA,
        },
        "sweep": {
            "axis": "delta_b",
            "range": [-10.0 * CS_D2_GAMMA, 10.0 * CS_D2_GAMMA],
            "n_points": 2001,
            "method": "numeric",
        },
    },
}

PRESET_DESCRIPTIONS = {
    "fig3": "absorption vs probe detuning for several driving strengths (g_a=2, g_b=0.2)",
    "fig3_inset": "numeric vs closed-form absorption at g_a=2, g_b=0.2, g_c=10",
    "fig4": "absorption spectra for gamma_c/gamma = 0.2, 0.5, 1, 2",
    "fig5": "absorption at the detuned window vs gamma_c with zero-intercept fit",
    "collapse": "window collapse: gamma_c = 1e-7 vs 0.1 at g_c = 20",
    "cs_d2": "Cs D2 line, all decay rates 2pi x 5.22 MHz, given in physical units",
}

TOP_LEVEL_KEYS = {
    "preset", "kind", "params", "units", "sweep", "series", "gammas",
    "at_detuning", "collapse", "output", "emit_plot", "physical_gamma",
}


class ConfigError(ValueError):
    """Malformed or inconsistent scenario configuration."""


class NumericalFailure(RuntimeError):
    """Some points could not be solved; outputs were written with the failures listed."""


@dataclass
class ScenarioConfig:
    kind: str
    params: SystemParams
    sweep: SweepSpec | None = None
    series: dict | None = None
    gammas: list[float] | None = None
    at_detuning: float | None = None
    collapse: dict | None = None
    output: str = "scenario"
    emit_plot: bool = False
    preset: str | None = None
    physical_gamma: float | None = None
    overrides: list[str] = field(default_factory=list)

    def resolved(self) -> dict:
        """Self-contained JSON form; no preset lookup or unit conversion needed."""
        out = {"kind": self.kind, "params": self.params.as_dict()}
        if self.sweep is not None:
            out["sweep"] = self.sweep.as_dict()
        for key in ("series", "gammas", "at_detuning", "collapse", "physical_gamma"):
            value = getattr(self, key)
            if value is not None:
                out[key] = copy.deepcopy(value)
        out["output"] = self.output
        out["emit_plot"] = self.emit_plot
        return out


def _merge(base: dict, override: dict, prefix="") -> tuple[dict, list[str]]:
    merged = copy.deepcopy(base)
    changed = []
    for key, value in override.items():
        path = f"{prefix}{key}"
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            merged[key], sub = _merge(merged[key], value, prefix=f"{path}.")
            changed += sub
        else:
            if key not in merged or merged[key] != value:
                changed.append(path)
            merged[key] = copy.deepcopy(value)
    return merged, changed


def _require(cond, message):
    if not cond:
        raise ConfigError(message)


def resolve_config(raw: dict) -> ScenarioConfig:
    """Expand the preset, apply explicit overrides and validate every field."""
    _require(isinstance(raw, dict), "config must be a JSON object")
    _require(raw, "config is empty")
    unknown = set(raw) - TOP_LEVEL_KEYS
    _require(not unknown, f"unknown field(s): {', '.join(sorted(unknown))}")

    preset = raw.get("preset")
    overrides: list[str] = []
    if preset is not None:
        _require(preset in PRESETS, f"unknown preset {preset!r}; choose from {', '.join(PRESETS)}")
        body = {k: v for k, v in raw.items() if k != "preset"}
        merged, overrides = _merge(PRESETS[preset], body)
        # output location is not part of the physics
        overrides = [o for o in overrides if o not in ("output", "emit_plot")]
    else:
        merged = copy.deepcopy(raw)

    kind = merged.get("kind", "sweep")
    _require(kind in KINDS, f"field 'kind': must be one of {KINDS}, got {kind!r}")

    params_raw = merged.get("params")
    _require(isinstance(params_raw, dict), "field 'params': object required")
    gamma = None
    units = merged.get("units")
    if units is not None:
        _require(isinstance(units, dict) and "gamma" in units, "field 'units': needs a 'gamma' entry")
        gamma = units["gamma"]
        _require(isinstance(gamma, (int, float)) and gamma > 0, "field 'units.gamma': positive number required")
        params_raw = {k: (v / gamma if isinstance(v, (int, float)) else v) for k, v in params_raw.items()}
    try:
        params = SystemParams.from_dict(params_raw)
    except (ParameterError, TypeError) as exc:
        raise ConfigError(f"field 'params': {exc}") from None

    spec = None
    sweep_raw = merged.get("sweep")
    if kind in ("sweep", "collapse"):
        _require(isinstance(sweep_raw, dict), "field 'sweep': object required")
    if sweep_raw is not None:
        _require(isinstance(sweep_raw, dict), "field 'sweep': object required")
        extra = set(sweep_raw) - {"axis", "range", "n_points", "method"}
        _require(not extra, f"field 'sweep': unknown key(s) {sorted(extra)}")
        rng = sweep_raw.get("range", [-10.0, 10.0])
        _require(isinstance(rng, (list, tuple)) and len(rng) == 2, "field 'sweep.range': [min, max] required")
        if gamma is not None:
            rng = [v / gamma for v in rng]
        try:
            spec = SweepSpec(
                base=params,
                axis=sweep_raw.get("axis", "delta_b"),
                range=tuple(rng),
                n_points=sweep_raw.get("n_points", 2001),
                method=sweep_raw.get("method", "numeric"),
            )
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"field 'sweep': {exc}") from None

    series = merged.get("series")
    if series is not None:
        _require(isinstance(series, dict) and set(series) == {"parameter", "values"},
                 "field 'series': needs exactly 'parameter' and 'values'")
        name, values = series["parameter"], series["values"]
        valid = {f.name for f in dataclasses.fields(SystemParams)} | {"method"}
        _require(name in valid, f"field 'series.parameter': unknown parameter {name!r}")
        _require(isinstance(values, list) and values, "field 'series.values': non-empty list required")
        if name == "method":
            bad = [v for v in values if v not in METHODS]
            _require(not bad, f"field 'series.values': unknown method(s) {bad}")
        else:
            _require(all(isinstance(v, (int, float)) for v in values), "field 'series.values': numbers required")
            try:
                for v in values:
                    params.replace(**{name: v})
            except ParameterError as exc:
                raise ConfigError(f"field 'series.values': {exc}") from None

    gammas = merged.get("gammas")
    at_detuning = merged.get("at_detuning")
    if kind == "gamma_scan":
        _require(isinstance(gammas, list) and gammas, "field 'gammas': non-empty list required")
        _require(all(isinstance(g, (int, float)) and g >= 0 for g in gammas), "field 'gammas': non-negative numbers")
        _require(isinstance(at_detuning, (int, float)), "field 'at_detuning': number required")

    collapse = merged.get("collapse")
    if kind == "collapse":
        collapse = {"gamma_c_small": 1e-7, "gamma_c_ref": 0.1, **(collapse or {})}
        _require(set(collapse) == {"gamma_c_small", "gamma_c_ref"}, "field 'collapse': unknown keys")
        _require(0 < collapse["gamma_c_small"] and 0 < collapse["gamma_c_ref"], "field 'collapse': rates must be > 0")

    output = merged.get("output", preset or "scenario")
    _require(isinstance(output, str) and output, "field 'output': non-empty string required")
    emit_plot = merged.get("emit_plot", False)
    _require(isinstance(emit_plot, bool), "field 'emit_plot': boolean required")

    return ScenarioConfig(
        kind=kind,
        params=params,
        sweep=spec,
        series=series,
        gammas=[float(g) for g in gammas] if kind == "gamma_scan" else None,
        at_detuning=float(at_detuning) if kind == "gamma_scan" else None,
        collapse=collapse if kind == "collapse" else None,
        output=output,
        emit_plot=emit_plot,
        preset=preset,
        physical_gamma=gamma if gamma is not None else merged.get("physical_gamma"),
        overrides=overrides,
    )


def load_config(path) -> dict:
    """Read a scenario file; a sidecar written by :func:`run_scenario` also works."""
    text = Path(path).read_text()
    if not text.strip():
        raise ConfigError(f"{path}: empty config file")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if isinstance(data, dict) and "resolved_config" in data:
        data = data["resolved_config"]
    return data


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def spectrum_csv(axis, rho23) -> str:
    buf = io.StringIO()
    buf.write(",".join(CSV_HEADER) + "\n")
    for x, r in zip(axis, rho23):
        buf.write(f"{_fmt(x)},{_fmt(r.real)},{_fmt(r.imag)}\n")
    return buf.getvalue()


def _slug(value) -> str:
    text = value if isinstance(value, str) else format(float(value), "g")
    return text.replace("+", "")


def _json_safe(obj):
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        return float(obj) if math.isfinite(obj) else None
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def _features(spectrum: Spectrum) -> dict:
    return {
        "windows": [w.as_dict() for w in spectrum.windows],
        "peaks": [p.as_dict() for p in spectrum.peaks],
        "failures": [{"axis": x, "error": msg} for x, msg in spectrum.failures],
    }


def _run_sweep(cfg: ScenarioConfig):
    series = []
    if cfg.series is None:
        series.append((None, sweep(cfg.sweep)))
    else:
        name = cfg.series["parameter"]
        for value in cfg.series["values"]:
            if name == "method":
                spec = dataclasses.replace(cfg.sweep, method=value)
            else:
                spec = dataclasses.replace(cfg.sweep, base=cfg.params.replace(**{name: value}))
            series.append((f"{name}={_slug(value)}", sweep(spec)))
    extra = {}
    if cfg.series is not None and cfg.series["parameter"] == "method":
        extra["comparison"] = _method_comparison(series)
    return series, extra


def _method_comparison(series) -> dict:
    by_label = {label.split("=", 1)[1]: spec for label, spec in series}
    if "numeric" not in by_label:
        return {}
    ref = by_label["numeric"].absorption
    peak = float(np.nanmax(ref))
    out = {"numeric_peak": peak}
    for method, spec in by_label.items():
        if method != "numeric":
            out[f"{method}_max_deviation_rel_peak"] = float(np.nanmax(np.abs(spec.absorption - ref)) / peak)
    return out


def run_scenario(cfg: ScenarioConfig) -> dict:
    """Execute ``cfg`` and write its artifacts; returns the sidecar metadata.

    Raises :class:`NumericalFailure` after writing if any point failed.
    """
    series: list[tuple[str | None, Spectrum]] = []
    extra: dict = {}
    fig_scan = None
    if cfg.kind == "sweep":
        series, extra = _run_sweep(cfg)
    elif cfg.kind == "gamma_scan":
        scan = gamma_c_scan(cfg.params, cfg.gammas, cfg.at_detuning)
        fig_scan = scan
        series.append((None, Spectrum("gamma_c", scan.gammas, scan.rho23)))
        extra["fit"] = {
            "slope": scan.slope,
            "r_squared": scan.r_squared,
            "fit_points": scan.gammas[scan.fit_mask].tolist(),
            "at_detuning": scan.at_detuning,
        }
        extra["flagged"] = [{"gamma_c": g, "note": msg} for g, msg in scan.flagged]
    else:
        report = collapse_analysis(
            cfg.params,
            cfg.collapse["gamma_c_small"],
            cfg.collapse["gamma_c_ref"],
            cfg.sweep.range,
            cfg.sweep.n_points,
        )
        series = [
            (f"gamma_c={_slug(report.gamma_c_small)}", report.small),
            (f"gamma_c={_slug(report.gamma_c_ref)}", report.reference),
        ]
        extra["collapse"] = {
            "ratio": report.ratio,
            "pointwise_max_ratio": report.pointwise_max_ratio,
            "contrast_small": report.contrast_small,
            "contrast_ref": report.contrast_ref,
            "depth_small": report.depth_small,
            "depth_ref": report.depth_ref,
            "window_detuning": report.window_detuning,
        }

    stem = Path(cfg.output)
    files = {}
    listing = []
    for label, spectrum in series:
        name = stem.name + (".csv" if label is None else f"-{label}.csv")
        files[name] = spectrum_csv(spectrum.axis, spectrum.rho23)
        listing.append({"label": label, "csv": name, **_features(spectrum)})

    # gamma_c = 0 flags are advisory; any other flag is a solver failure
    failures = sum(len(s.failures) for _, s in series)
    failures += sum(1 for f in extra.get("flagged", []) if f["gamma_c"] != 0)
    meta = {
        "tool": "ntype_eit",
        "version": __version__,
        "preset": cfg.preset,
        "overrides": cfg.overrides,
        "resolved_config": cfg.resolved(),
        "series": listing,
        **extra,
    }
    if cfg.physical_gamma is not None:
        meta["units"] = {"gamma_rad_per_s": cfg.physical_gamma, "note": "all outputs are gamma-normalised"}
    files[stem.name + ".json"] = json.dumps(_json_safe(meta), indent=2, allow_nan=False) + "\n"

    if cfg.emit_plot:
        png = stem.name + ".png"
        axis_name = series[0][1].axis_name
        csvs = [(entry["label"] or stem.name, entry["csv"]) for entry in listing]
        files[stem.name + "_plot.py"] = plotting.plot_script(
            csvs, png, axis_name=axis_name, title=cfg.preset or stem.name,
            marker="o-" if cfg.kind == "gamma_scan" else "-",
        )

    stem.parent.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        _atomic_write(stem.parent / name, text)
    if cfg.emit_plot:
        _render(cfg, series, fig_scan, stem.parent / (stem.name + ".png"))

    if failures:
        raise NumericalFailure(f"{failures} point(s) failed; see {stem.name}.json")
    return meta


def _render(cfg, series, scan, path):
    tmp = path.with_name(path.name + ".tmp.png")
    if scan is not None:
        plotting.plot_gamma_scan(scan, tmp, title=cfg.preset)
    else:
        labelled = [(label or cfg.preset or "", spectrum) for label, spectrum in series]
        plotting.plot_spectra(labelled, tmp, title=cfg.preset, logy=cfg.kind == "collapse")
    os.replace(tmp, path)


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
