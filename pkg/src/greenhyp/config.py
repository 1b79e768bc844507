"""Run configuration: one JSON file, validated against an explicit schema.

Schema (all keys required unless a default is stated):

    {
      "model":   {"kind": "KleinGordon" | "DeRham" | "ChernSimons" | "MaxwellP",
                  "mass": [num, den]     (KleinGordon only; default [0, 1]),
                  "p": 1                 (MaxwellP only; default 1)},
      "lattice": {"spacetime_dim": 2 | 3,
                  "n_time": int >= 8,
                  "spatial_extents": [int >= 4, ...],   (length m-1)
                  "margin": int >= 2     (default 2)},
      "slices":  {"minus": int, "mid": int, "plus": int},   (minus < mid < plus,
                  all inside [margin, n_time-1-margin])
      "suites":  ["witness", "green", "rma", "poisson", "dgcat", "models"],
                  (default: all; order fixed by this list)
      "seed":    int (default 0),
      "cache_dir": str | null (default null)
    }
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from .lattice import CausalLattice, CauchySlice
from .models import KINDS, ModelSpec

SUITE_ORDER = ("witness", "green", "rma", "poisson", "dgcat", "models")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    model_kind: str
    lattice: CausalLattice
    mass: Fraction
    p: int
    slice_minus: int
    slice_mid: int
    slice_plus: int
    suites: tuple[str, ...]
    seed: int
    cache_dir: str | None
    raw: dict = field(default_factory=dict)

    def model_spec(self) -> ModelSpec:
        return ModelSpec(self.model_kind, self.lattice, mass=self.mass, p=self.p)

    def slices(self) -> tuple[CauchySlice, CauchySlice, CauchySlice]:
        return (CauchySlice(self.lattice, self.slice_minus),
                CauchySlice(self.lattice, self.slice_mid),
                CauchySlice(self.lattice, self.slice_plus))

    def echo(self) -> dict:
        return {
            "model": {"kind": self.model_kind,
                      "mass": [self.mass.numerator, self.mass.denominator],
                      "p": self.p},
            "lattice": self.lattice.describe(),
            "slices": {"minus": self.slice_minus, "mid": self.slice_mid,
                       "plus": self.slice_plus},
            "suites": list(self.suites),
            "seed": self.seed,
            "cache_dir": self.cache_dir,
        }


def _require(cond: bool, msg: str, errors: list[str]) -> None:
    if not cond:
        errors.append(msg)


def parse_config(data: dict) -> RunConfig:
    errors: list[str] = []
    if not isinstance(data, dict):
        raise ConfigError("config must be a JSON object")
    model = data.get("model")
    lattice_d = data.get("lattice")
    _require(isinstance(model, dict), "missing 'model' object", errors)
    _require(isinstance(lattice_d, dict), "missing 'lattice' object", errors)
    if errors:
        raise ConfigError("; ".join(errors))

    kind = model.get("kind")
    _require(kind in KINDS, f"model.kind must be one of {KINDS}", errors)
    mass_pair = model.get("mass", [0, 1])
    _require(isinstance(mass_pair, list) and len(mass_pair) == 2
             and all(isinstance(x, int) for x in mass_pair)
             and mass_pair[1] > 0,
             "model.mass must be [numerator, denominator]", errors)
    p = model.get("p", 1)
    _require(isinstance(p, int) and p >= 1, "model.p must be a positive int", errors)

    m = lattice_d.get("spacetime_dim")
    n_time = lattice_d.get("n_time")
    extents = lattice_d.get("spatial_extents")
    margin = lattice_d.get("margin", 2)
    _require(m in (2, 3), "lattice.spacetime_dim must be 2 or 3", errors)
    _require(isinstance(n_time, int) and n_time >= 8,
             "lattice.n_time must be an int >= 8", errors)
    _require(isinstance(extents, list) and all(isinstance(x, int) for x in extents),
             "lattice.spatial_extents must be a list of ints", errors)
    _require(isinstance(margin, int) and margin >= 2,
             "lattice.margin must be an int >= 2", errors)
    if errors:
        raise ConfigError("; ".join(errors))
    if len(extents) != m - 1:
        errors.append("lattice.spatial_extents must have one entry per "
                      "spatial axis")
    if any(x < 4 for x in extents):
        errors.append("every spatial extent must be at least 4")

    slices = data.get("slices", {})
    _require(isinstance(slices, dict), "'slices' must be an object", errors)
    if errors:
        raise ConfigError("; ".join(errors))
    interior = (margin, n_time - 1 - margin)
    defaults = {"minus": interior[0] + 1,
                "mid": (interior[0] + interior[1]) // 2,
                "plus": interior[1] - 1}
    s_minus = slices.get("minus", defaults["minus"])
    s_mid = slices.get("mid", defaults["mid"])
    s_plus = slices.get("plus", defaults["plus"])
    for name, val in (("minus", s_minus), ("mid", s_mid), ("plus", s_plus)):
        _require(isinstance(val, int) and interior[0] <= val <= interior[1],
                 f"slices.{name} must be an interior time index in "
                 f"[{interior[0]}, {interior[1]}]", errors)
    if not errors:
        _require(s_minus < s_mid < s_plus,
                 "slices must be strictly ordered: minus < mid < plus", errors)

    suites = tuple(data.get("suites", SUITE_ORDER))
    for s in suites:
        _require(s in SUITE_ORDER, f"unknown suite {s!r}", errors)
    seed = data.get("seed", 0)
    _require(isinstance(seed, int), "seed must be an int", errors)
    cache_dir = data.get("cache_dir")
    _require(cache_dir is None or isinstance(cache_dir, str),
             "cache_dir must be a string or null", errors)
    if errors:
        raise ConfigError("; ".join(errors))

    lattice = CausalLattice(m, n_time, tuple(extents), margin)
    # model-kind compatibility is validated by ModelSpec
    try:
        ModelSpec(kind, lattice, mass=Fraction(*mass_pair), p=p)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    suites = tuple(s for s in SUITE_ORDER if s in suites)
    return RunConfig(kind, lattice, Fraction(*mass_pair), p,
                     s_minus, s_mid, s_plus, suites, seed, cache_dir, data)


def load_config(path: str | Path) -> RunConfig:
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(data)
