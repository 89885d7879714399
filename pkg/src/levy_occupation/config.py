"""Run configuration: flat dotted-key text files, with JSON as an
alternative encoding.

The text grammar is line-oriented::

    # comment
    model.sigma = 1.0
    model.jump_rate = 1.0      # 0 or absent: no jumps
    window.p = 0.4
    x = -0.5, 0, 0.5

Values are numbers, booleans, comma-separated number lists, or bare
strings.  JSON input may nest objects; nesting is flattened into dotted
keys, so both encodings describe the same flat dictionary.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

from .inversion import InversionConfig
from .kernels import OccupationWindow
from .lastpassage import Corridor
from .mc import SimConfig
from .models import ExponentialJumps, LevyModel
from ._quad import QuadSettings

__all__ = ["RunConfig", "parse_config_text", "flatten_json", "load_config",
           "serialize_config", "build_run_config", "ConfigError"]


class ConfigError(ValueError):
    pass


def _parse_scalar(tok: str):
    tok = tok.strip()
    low = tok.lower()
    if low in ("true", "yes", "on"):
        return True
    if low in ("false", "no", "off"):
        return False
    try:
        iv = int(tok)
        return iv
    except ValueError:
        pass
    try:
        return float(tok)
    except ValueError:
        return tok


def parse_config_text(text: str) -> dict:
    """Parse the flat key/value grammar into a {dotted key: value} dict."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, val = line.partition("=")
        key = key.strip()
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        val = val.strip()
        if "," in val:
            out[key] = [_parse_scalar(v) for v in val.split(",") if v.strip()]
        else:
            out[key] = _parse_scalar(val)
    return out


def flatten_json(obj, prefix="") -> dict:
    flat = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            flat.update(flatten_json(v, prefix=key + "."))
        else:
            flat[key] = v
    return flat


def load_config(path: str) -> dict:
    with open(path, "r", encoding="utf-8") as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return flatten_json(json.loads(text))
    return parse_config_text(text)


def _fmt_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, list):
        return ", ".join(_fmt_value(e) for e in v)
    if isinstance(v, float):
        return repr(v)
    return str(v)


def serialize_config(cfg: dict) -> str:
    """Emit the flat grammar, keys sorted, one per line.  Parsing the
    result reproduces the dictionary (round-trip idempotence)."""
    return "\n".join(f"{k} = {_fmt_value(v)}" for k, v in sorted(cfg.items())) + "\n"


@dataclass
class RunConfig:
    model: LevyModel
    window: Optional[OccupationWindow] = None
    window2: Optional[OccupationWindow] = None
    corridor: Optional[Corridor] = None
    lam: float = 1.0
    xs: list = field(default_factory=list)
    ys: list = field(default_factory=list)
    quantity: str = ""
    checks: list = field(default_factory=list)
    out: Optional[str] = None
    seed: int = 0
    jobs: int = 1
    sim: SimConfig = field(default_factory=SimConfig)
    quad: QuadSettings = field(default_factory=QuadSettings)
    inversion: InversionConfig = field(default_factory=InversionConfig)
    raw: dict = field(default_factory=dict)


def _as_list(v):
    if v is None:
        return []
    if isinstance(v, list):
        return [float(e) for e in v]
    return [float(v)]


def _require(cond: bool, inequality: str):
    if not cond:
        raise ConfigError(f"constraint violated: {inequality}")


def build_run_config(flat: dict) -> RunConfig:
    """Typed view of a flat config dict, with ordering constraints
    (c <= a <= b <= d, c < 0 < d) checked up front."""
    g = flat.get
    sigma = float(g("model.sigma", 0.0))
    drift = float(g("model.drift", 0.0))
    jrate = float(g("model.jump_rate", 0.0))
    try:
        jumps = None
        if jrate > 0.0:
            jumps = ExponentialJumps(rate=jrate, alpha=float(g("model.jump_alpha", 1.0)))
        model = LevyModel(sigma=sigma, drift=drift, jumps=jumps)

        window = window2 = None
        if "window.p" in flat or "window.q" in flat:
            window = OccupationWindow(float(g("window.p", 0.0)), float(g("window.q", 0.0)),
                                      float(g("window.a", 0.0)), float(g("window.b", 0.0)))
        if "window2.p" in flat or "window2.q" in flat:
            window2 = OccupationWindow(float(g("window2.p", 0.0)), float(g("window2.q", 0.0)),
                                       float(g("window2.a", 0.0)), float(g("window2.b", 0.0)))
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    corridor = None
    if "corridor.c" in flat or "corridor.d" in flat:
        c = float(g("corridor.c", -1.0))
        d = float(g("corridor.d", 1.0))
        _require(c < 0.0, "c < 0")
        _require(d > 0.0, "0 < d")
        for w in (window, window2):
            if w is not None:
                _require(c <= w.a, "c ≤ a")
                _require(w.b <= d, "b ≤ d")
        corridor = Corridor(c, d)

    sim = SimConfig(dt=float(g("sim.dt", 1e-3)),
                    n_paths=int(g("sim.n_paths", 10_000)),
                    seed=int(g("seed", 0)),
                    horizon_cap=float(g("sim.horizon_cap", 50.0)),
                    bridge_correction=bool(g("sim.bridge_correction", False)))
    quad = QuadSettings(order=int(g("quad.order", 64)), tol=float(g("quad.tol", 1e-9)))
    inv = InversionConfig(terms=int(g("inversion.terms", 40)),
                          precision=float(g("inversion.precision", 11.0)),
                          euler=int(g("inversion.euler", 12)))
    checks = flat.get("checks", [])
    if isinstance(checks, str):
        checks = [checks]

    return RunConfig(model=model, window=window, window2=window2,
                     corridor=corridor, lam=float(g("lambda", 1.0)),
                     xs=_as_list(flat.get("x")), ys=_as_list(flat.get("y")),
                     quantity=str(g("quantity", "")),
                     checks=[str(c) for c in checks],
                     out=g("out"), seed=int(g("seed", 0)),
                     jobs=int(g("jobs", 1)), sim=sim, quad=quad,
                     inversion=inv, raw=dict(flat))
