"""Command-line surface.

One JSON config file drives everything; flags only select the command,
the config path, and the output directory.  All file outputs are
byte-deterministic for a fixed config (collections are sorted before
emission, floats use repr round-tripping, wall-clock timing goes to
stderr only), for any worker count.

Exit codes: 0 success (certify: certified-at-scale), 2 config error,
3 insufficient samples, 4 certify refuted, 5 certify inconclusive or
probe-only spec, 6 other module errors.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import math
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .ball import BallTable
from .certify import anosov_rates, certify_anosov, probe_explicit, stable_norm
from .curve import check_incidence, injectivity_report, sample_limit_curve
from .delta import fit_delta, pushforward_deviation
from .domain import in_omega, recurrence_experiment
from .errors import (
    BaseNotInterior,
    ConfigError,
    FlagCurveError,
    InsufficientSamples,
    UnsupportedSpec,
)
from .projective import Flag, ProjLine, ProjPoint
from .reps import RepSpec, spec_from_json_dict

COMMANDS = ("limit-curve", "certify", "delta", "orbit", "regularity")

DEFAULT_TOLERANCES = {
    "certify_margin": 0.02,
    "dedup": 1e-7,
    "incidence_zero": 1e-9,
}


class RunConfig:
    """Validated run configuration."""

    def __init__(self, raw: dict, source_bytes: bytes, out_dir: Path, workers: int):
        if not isinstance(raw, dict):
            raise ConfigError("config root must be a JSON object")
        if "rep_spec" not in raw:
            raise ConfigError("missing field 'rep_spec'")
        try:
            self.spec: RepSpec = spec_from_json_dict(raw["rep_spec"])
        except (KeyError, ValueError, TypeError) as e:
            raise ConfigError(f"bad field 'rep_spec': {e}") from e
        self.ball_radius = int(raw.get("ball_radius", 6))
        if not 2 <= self.ball_radius <= 12:
            raise ConfigError("field 'ball_radius' must be in [2, 12]")
        self.min_translation_length = float(raw.get("min_translation_length", 0.5))
        if self.min_translation_length < 0:
            raise ConfigError("field 'min_translation_length' must be >= 0")
        self.tolerances = dict(DEFAULT_TOLERANCES)
        for k, v in raw.get("tolerances", {}).items():
            if not isinstance(v, (int, float)) or v <= 0:
                raise ConfigError(f"tolerance {k!r} must be positive")
            self.tolerances[k] = float(v)
        render = raw.get("render", {})
        self.render_chart = render.get("chart", "both")
        if self.render_chart not in ("affine", "dual", "both"):
            raise ConfigError("field 'render.chart' must be affine|dual|both")
        self.render_width = int(render.get("width_px", 640))
        self.render_stroke = float(render.get("stroke", 1.2))
        self.render_window = float(render.get("window", 3.0))
        self.incidence_max_lines = raw.get("incidence_max_lines", 4096)
        if self.incidence_max_lines is not None:
            self.incidence_max_lines = int(self.incidence_max_lines)
            if self.incidence_max_lines < 1:
                raise ConfigError("field 'incidence_max_lines' must be >= 1 or null")
        self.orbit = raw.get("orbit", {})
        self.workers = workers if workers else int(raw.get("workers", 1))
        self.out_dir = out_dir
        self.raw = raw
        self.input_sha256 = hashlib.sha256(source_bytes).hexdigest()

    @staticmethod
    def load(path: str, out_dir: str | None, workers: int | None) -> "RunConfig":
        p = Path(path)
        if not p.is_file():
            raise ConfigError(f"config file not found: {path}")
        data = p.read_bytes()
        try:
            raw = json.loads(data)
        except json.JSONDecodeError as e:
            raise ConfigError(f"config is not valid JSON: {e}") from e
        out = Path(out_dir) if out_dir else Path(raw.get("output_dir", "out"))
        return RunConfig(raw, data, out, workers or 0)


def _report(config: RunConfig, command: str, payload: dict) -> dict:
    return {
        "command": command,
        "tool_version": __version__,
        "input_sha256": config.input_sha256,
        "config": config.raw,
        **payload,
    }


def _write_json(path: Path, obj: dict):
    path.write_text(
        json.dumps(obj, indent=2, sort_keys=True, allow_nan=False) + "\n",
        encoding="utf-8",
    )


def _estimate_dict(est) -> dict:
    return {
        "value": est.value,
        "witness": est.witness,
        "ball_radius": est.ball_radius,
        "history": [[r, v] for r, v in est.history],
    }


def cmd_limit_curve(config: RunConfig) -> int:
    from .svg import render_model

    model = sample_limit_curve(
        config.spec,
        config.ball_radius,
        min_length=config.min_translation_length,
        dedup_res=config.tolerances["dedup"],
        workers=config.workers,
    )
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    lines = ["param,point_x,point_y,point_z,line_a,line_b,line_c,word,translation_length"]
    for row in model.csv_rows():
        param, px, py, pz, la, lb, lc, word, tl = row
        lines.append(
        f"{param!r},{px!r},{py!r},{pz!r},{la!r},{lb!r},{lc!r},{word},{tl!r}"
        )
    (out / "curve.csv").write_text("\n".join(lines) + "\n", encoding="utf-8")
    inj = injectivity_report(model)
    inc = check_incidence(
        model,
        ztol=config.tolerances["incidence_zero"],
        max_lines=config.incidence_max_lines,
    )
    payload = {
        "samples": len(model),
        "injectivity": {
            "min_point_separation": inj.min_point_separation,
            "min_line_separation": inj.min_line_separation,
            "violations": inj.violations,
        },
        "incidence": {
            "lines_checked": sum(inc.histogram.values()) + inc.nontransversal,
            "histogram": {str(k): v for k, v in inc.histogram.items()},
            "worst_count": inc.worst_count,
            "worst_word": inc.worst_word,
            "nontransversal": inc.nontransversal,
            "passed": inc.passed,
        },
    }
    _write_json(out / "limit_curve.json", _report(config, "limit-curve", payload))
    svg = render_model(
        model,
        chart=config.render_chart,
        width_px=config.render_width,
        stroke=config.render_stroke,
        window=config.render_window,
    )
    (out / "curve.svg").write_text(svg, encoding="utf-8")
    return 0


def cmd_certify(config: RunConfig) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    if config.spec.variant == "explicit":
        probe = probe_explicit(
            config.spec, config.ball_radius,
            min_length=config.min_translation_length, workers=config.workers,
        )
        payload = {
            "verdict": "probe-only",
            "probe": {
                "loxodromy_rate": probe.loxodromy_rate,
                "inf_top_gap": probe.inf_top_gap,
                "inf_bottom_gap": probe.inf_bottom_gap,
                "n_scored": probe.n_scored,
            },
        }
        _write_json(out / "certify.json", _report(config, "certify", payload))
        return 5
    table = BallTable.build(config.spec.seed, config.ball_radius, config.workers)
    res = certify_anosov(
        config.spec,
        config.ball_radius,
        margin=config.tolerances["certify_margin"],
        table=table,
    )
    payload = {
        "verdict": res.verdict,
        "stable_norm_estimate": _estimate_dict(res.estimate),
        "margin_required": res.margin,
        "margin_found": res.margin_found,
        "refuting_witness": res.refuting_witness,
        "saddle_ratio_tests_agree": res.tests_agree,
        "n_scored": res.n_scored,
    }
    if res.verdict != "refuted":
        rates = anosov_rates(
            config.spec, config.ball_radius,
            min_length=config.min_translation_length, table=table,
        )
        payload["rates"] = {
            "inf_top_gap": rates.inf_top_gap,
            "inf_bottom_gap": rates.inf_bottom_gap,
            "n_elements": len(rates.words),
        }
    _write_json(out / "certify.json", _report(config, "certify", payload))
    return {"certified-at-scale": 0, "refuted": 4, "inconclusive": 5}[res.verdict]


def cmd_delta(config: RunConfig) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    model = sample_limit_curve(
        config.spec,
        config.ball_radius,
        min_length=config.min_translation_length,
        dedup_res=config.tolerances["dedup"],
        workers=config.workers,
    )
    fit = fit_delta(config.spec, model)
    push = pushforward_deviation(model, fit)
    grid = fit.model.grid
    rows = ["theta,delta"]
    step = 2.0 * math.pi / len(grid)
    for k in range(len(grid)):
        rows.append(f"{k * step!r},{float(grid[k])!r}")
    (out / "delta_profile.csv").write_text("\n".join(rows) + "\n", encoding="utf-8")
    payload = {
        "samples": len(model),
        "grid_size": len(grid),
        "cocycle_residual": fit.cocycle_residual,
        "pushforward_to_canonical_line": push,
        "taus": [[t1, t2] for t1, t2 in fit.taus],
    }
    _write_json(out / "delta.json", _report(config, "delta", payload))
    return 0


def _base_flag(config: RunConfig) -> Flag:
    orbit = config.orbit
    if "base_point" in orbit or "base_line" in orbit:
        try:
            p = ProjPoint.of(np.array(orbit["base_point"], dtype=float))
            l = ProjLine.of(np.array(orbit["base_line"], dtype=float))
            return Flag.of(p, l, tol=1e-8)
        except (KeyError, ValueError) as e:
            raise ConfigError(f"bad field 'orbit.base_point'/'orbit.base_line': {e}")
    # Documented default: inside the canonical domain with wide margins.
    s = 1.0 / math.sqrt(2.0)
    return Flag.of((s, s, 0.0), (s, -s, 0.0))


def cmd_orbit(config: RunConfig) -> int:
    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    base = _base_flag(config)
    nbhd = float(config.orbit.get("neighborhood", 0.05))
    if nbhd <= 0:
        raise ConfigError("field 'orbit.neighborhood' must be positive")
    rep = recurrence_experiment(
        config.spec, base, nbhd, config.ball_radius, workers=config.workers,
    )
    payload = {
        "neighborhood": rep.neighborhood,
        "returning_words": sorted(rep.returning_words, key=lambda w: (len(w), w)),
        "count_history": [[r, c] for r, c in rep.count_history],
        "stabilized": rep.stabilized,
        "min_nonempty_displacement": rep.min_nonempty_displacement,
        "free_at_scale": rep.free_at_scale,
    }
    _write_json(out / "orbit.json", _report(config, "orbit", payload))
    return 0


def cmd_regularity(config: RunConfig) -> int:
    from .curve import regularity_diagnostics

    out = config.out_dir
    out.mkdir(parents=True, exist_ok=True)
    model = sample_limit_curve(
        config.spec,
        config.ball_radius,
        min_length=config.min_translation_length,
        dedup_res=config.tolerances["dedup"],
        workers=config.workers,
    )
    reg = regularity_diagnostics(model)
    payload = {
        "samples": len(model),
        "holder_exponent_estimate": reg.holder_exponent_estimate,
        "secant_slope_max": reg.secant_slope_max,
        "pairs_used": reg.pairs_used,
        "verdict_hint": reg.verdict_hint,
    }
    _write_json(out / "regularity.json", _report(config, "regularity", payload))
    return 0


_DISPATCH = {
    "limit-curve": cmd_limit_curve,
    "certify": cmd_certify,
    "delta": cmd_delta,
    "orbit": cmd_orbit,
    "regularity": cmd_regularity,
}


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="flagcurve",
        description="Flag representations of surface groups: limit curves, "
        "certificates, invariant-domain experiments.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to the JSON run config")
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--workers", type=int, default=None,
                        help="worker processes for ball enumeration")
    args = parser.parse_args(argv)
    t0 = time.monotonic()
    try:
        config = RunConfig.load(args.config, args.out, args.workers)
        code = _DISPATCH[args.command](config)
    except ConfigError as e:
        print(f"config error: {e}", file=sys.stderr)
        return 2
    except InsufficientSamples as e:
        print(f"insufficient samples: {e}", file=sys.stderr)
        return 3
    except (UnsupportedSpec, BaseNotInterior, FlagCurveError) as e:
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return 6
    print(f"elapsed {time.monotonic() - t0:.2f}s", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
