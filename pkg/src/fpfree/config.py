"""Experiment configs (YAML, schema version 1) and the target catalog.

A config file looks like::

    schema_version: 1
    experiment: ar-decay
    target: lin:l2
    samples: 100
    horizon: 200
    seed: 0
    output_dir: runs/ar-decay-lin
    params:
      support: 256

Targets are ``family:variant`` or ``family:key=value,key=value``; values given
in the target string are merged under ``params`` (the target string wins).
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from pathlib import Path

import yaml

SCHEMA_VERSION = 1

EXPERIMENTS = ("ar-decay", "lipschitz-estimate", "holder-modulus", "flatness", "displacement",
               "retraction-check")


class ConfigError(ValueError):
    """Malformed config, unknown experiment or target, or bad parameter."""


@dataclass(frozen=True)
class Param:
    kind: type
    default: object
    doc: str


COMMON = {
    "bound_scale": Param(float, 1.0, "multiplier applied to every inequality bound (fault injection)"),
}


@dataclass(frozen=True)
class TargetSpec:
    family: str
    doc: str
    experiments: tuple
    params: dict
    variants: tuple = ()

    def names(self) -> list[str]:
        if self.variants:
            return [f"{self.family}:{v}" for v in self.variants]
        return [self.family]


def _lp_params(extra=None):
    base = {"p": Param(float, 2.0, "norm exponent (the 'l<p>' variant sets it)"),
            "support": Param(int, 256, "support bound of sampled seeds")}
    return {**base, **(extra or {})}


_MEDINA = {
    "schedule": Param(str, "exp:0.5", "r-schedule: 'exp:<b>' or 'holder:<alpha>'"),
    "dmin": Param(float, 0.02, "smallest sampled distance to the body"),
    "dmax": Param(float, 1.0, "largest sampled distance to the body"),
    "t_min": Param(float, 1e-3, "smallest modulus argument"),
    "t_max": Param(float, 2.0, "largest modulus argument"),
    "t_points": Param(int, 40, "size of the log-spaced t-grid"),
}

CATALOG = (
    TargetSpec("lin", "Lin map F = g/||g|| on the monotone cap of l_p",
               ("ar-decay", "lipschitz-estimate", "displacement"),
               _lp_params({"eps": Param(float, 1e-2, "displacement threshold")}),
               ("l2", "l1", "l1.5", "l3", "lp")),
    TargetSpec("runmin", "running-minimum retraction of the l_p ball onto the monotone cap",
               ("lipschitz-estimate", "retraction-check"),
               _lp_params({"support": Param(int, 64, "dimension of sampled points")}),
               ("l1", "l1.5", "l2", "l3", "lp")),
    TargetSpec("affine", "affine map t_n alpha_n + 1 - alpha_n on the cube, alpha_n = 1 - q^n",
               ("ar-decay", "lipschitz-estimate", "displacement"),
               {"q": Param(float, 0.5, "geometric ratio"),
                "support": Param(int, 64, "materialized coordinates")},
               ("q=0.5",)),
    TargetSpec("qretract", "coordinatewise min(1, |t|) retraction onto the cube (sup norm)",
               ("lipschitz-estimate", "retraction-check"),
               {"support": Param(int, 64, "dimension of sampled points")}),
    TargetSpec("shift", "right shift on the l1 probability simplex",
               ("lipschitz-estimate", "displacement"),
               {"support": Param(int, 64, "support of sampled points")}, ("l1",)),
    TargetSpec("hilbert", "Hoelder fixed-point-free map of the l2 ball from the Lin map",
               ("holder-modulus",),
               {"alpha": Param(float, 0.5, "Hoelder exponent"), "lam": Param(float, 1.0, "Hoelder constant"),
                "dim": Param(int, 16, "ambient dimension of sampled pairs"),
                "restarts": Param(int, -1, "hill-climb restarts (-1: samples/100)")},
               ("alpha=0.5,lam=1",)),
    TargetSpec("linball", "Hoelder map of the ball via the running-min retraction",
               ("holder-modulus",),
               {"alpha": Param(float, 0.5, "Hoelder exponent"), "lam": Param(float, 1.0, "Hoelder constant"),
                "dim": Param(int, 16, "ambient dimension of sampled pairs"),
                "restarts": Param(int, -1, "hill-climb restarts (-1: samples/100)")}),
    TargetSpec("thmM4", "flat-set map F o R with r_n = 20^{n/(alpha-1)}, budget 1",
               ("flatness", "displacement", "holder-modulus"),
               {"alpha": Param(float, 0.5, "Hoelder exponent"),
                "d": Param(int, 3, "truncation dimension of the retraction")},
               ("alpha=0.5",)),
    TargetSpec("pipeline", "flat-set map with budget mu sized for a Hoelder constant lam",
               ("flatness", "displacement", "holder-modulus"),
               {"alpha": Param(float, 0.5, "Hoelder exponent"), "lam": Param(float, 1.0, "Hoelder constant"),
                "d": Param(int, 3, "truncation dimension of the retraction")}),
    TargetSpec("medina", "net/partition-of-unity retraction onto a flat body",
               ("retraction-check", "holder-modulus", "flatness"), _MEDINA,
               ("segment2d", "thinbox2d", "simplex2d", "flat3d")),
)

_BY_FAMILY = {t.family: t for t in CATALOG}


@dataclass(frozen=True)
class Target:
    spec: TargetSpec
    variant: str | None
    params: dict

    @property
    def family(self) -> str:
        return self.spec.family

    @property
    def name(self) -> str:
        return f"{self.family}:{self.variant}" if self.variant else self.family


def _coerce(key: str, value, p: Param):
    try:
        if p.kind is int and isinstance(value, float) and not value.is_integer():
            raise ValueError
        return p.kind(value)
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {key!r} expects {p.kind.__name__}, got {value!r}") from None


def resolve_target(name: str, params: dict | None = None) -> Target:
    """Parse a target string and merge, coerce and default its parameters."""
    if not isinstance(name, str) or not name:
        raise ConfigError("target must be a non-empty string")
    family, _, rest = name.partition(":")
    spec = _BY_FAMILY.get(family)
    if spec is None:
        raise ConfigError(f"unknown target family {family!r}")
    merged = dict(params or {})
    variant = None
    inline = {}
    for item in filter(None, rest.split(",")):
        if "=" in item:
            k, v = item.split("=", 1)
            inline[k.strip()] = yaml.safe_load(v)
        elif variant is None:
            variant = item.strip()
        else:
            raise ConfigError(f"target {name!r} names two variants")
    merged.update(inline)
    if rest and variant is None:
        variant = rest
    schema = {**COMMON, **spec.params}
    unknown = set(merged) - set(schema)
    if unknown:
        raise ConfigError(f"unknown parameters for {family}: {sorted(unknown)}")
    if family in ("lin", "runmin") and variant not in (None, "lp"):
        if not variant.startswith("l"):
            raise ConfigError(f"variant {variant!r} should read l<p>")
        try:
            merged.setdefault("p", float(variant[1:]))
        except ValueError:
            raise ConfigError(f"variant {variant!r} should read l<p>") from None
        if float(merged["p"]) != float(variant[1:]):
            raise ConfigError(f"variant {variant!r} conflicts with p={merged['p']}")
    if family == "medina" and variant not in spec.variants:
        raise ConfigError(f"unknown body preset {variant!r}; choose from {spec.variants}")
    if family == "shift" and variant not in (None, "l1"):
        raise ConfigError("the simplex shift lives in l1 only")
    out = {k: _coerce(k, merged.get(k, p.default), p) for k, p in schema.items()}
    return Target(spec, variant, out)


@dataclass
class ExperimentConfig:
    experiment: str
    target: str
    samples: int = 100
    horizon: int = 50
    seed: int = 0
    output_dir: str = "runs/out"
    params: dict = field(default_factory=dict)
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError(f"unsupported schema_version {self.schema_version!r}")
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(f"unknown experiment {self.experiment!r}; choose from {EXPERIMENTS}")
        for key in ("samples", "horizon", "seed"):
            v = getattr(self, key)
            if isinstance(v, bool) or not isinstance(v, int):
                raise ConfigError(f"{key} must be an integer")
        if self.samples < 1 or self.horizon < 1:
            raise ConfigError("samples and horizon must be >= 1")
        if not isinstance(self.params, dict):
            raise ConfigError("params must be a mapping")
        t = resolve_target(self.target, self.params)
        if self.experiment not in t.spec.experiments:
            raise ConfigError(f"{t.family} does not support {self.experiment}; "
                              f"supported: {t.spec.experiments}")

    def resolved(self) -> Target:
        return resolve_target(self.target, self.params)

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d) -> "ExperimentConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a mapping")
        known = {"schema_version", "experiment", "target", "samples", "horizon", "seed",
                 "output_dir", "params"}
        extra = set(d) - known
        if extra:
            raise ConfigError(f"unknown config keys: {sorted(extra)}")
        for key in ("experiment", "target"):
            if key not in d:
                raise ConfigError(f"missing required key {key!r}")
        if "schema_version" not in d:
            raise ConfigError("missing schema_version")
        return cls(**{k: (d[k] if d[k] is not None or k != "params" else {}) for k in d})

    def dump(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)


def load_config(path: str | Path) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        raise ConfigError(f"invalid YAML: {exc}") from None
    return ExperimentConfig.from_dict(data)


def catalog_rows() -> list[tuple[str, str, str, str]]:
    """``(name, experiments, parameters, description)`` for every addressable target."""
    rows = []
    for spec in CATALOG:
        schema = {**COMMON, **spec.params}
        ptxt = "; ".join(f"{k}:{p.kind.__name__}={p.default}" for k, p in schema.items())
        for name in spec.names():
            rows.append((name, ",".join(spec.experiments), ptxt, spec.doc))
    return rows
