"""Scenario configuration: one JSON document with LEO Ka-band defaults.

Every section is optional; missing keys fall back to the defaults
below. Relative file paths resolve against the config file's directory.
"""

from __future__ import annotations

import dataclasses
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

from . import link, orbit
from .scoring import ExternalMap, ScorerSpec, SpectralMagnitude

SCHEMA_VERSION = 1


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class OrbitConfig:
    altitude_m: float = 600e3
    min_elevation_deg: float = 30.0
    max_elevation_deg: float = 90.0
    earth_radius_m: float = orbit.EARTH_RADIUS
    gravity_constant: float = orbit.GRAVITY_CONSTANT
    earth_mass_kg: float = orbit.EARTH_MASS

    def validate(self):
        _positive(self, "orbit", "altitude_m", "earth_radius_m", "gravity_constant", "earth_mass_kg")
        if not 0 <= self.min_elevation_deg <= 90:
            raise ConfigError("orbit.min_elevation_deg: must lie in [0, 90]")
        if not self.min_elevation_deg <= self.max_elevation_deg <= 90:
            raise ConfigError("orbit.max_elevation_deg: must lie in [min_elevation_deg, 90]")

    def geometry(self, min_elevation_deg: float | None = None) -> orbit.OrbitGeometry:
        eps = self.min_elevation_deg if min_elevation_deg is None else min_elevation_deg
        return orbit.OrbitGeometry(
            self.altitude_m, math.radians(eps), self.earth_radius_m,
            self.gravity_constant * self.earth_mass_kg,
        )


@dataclass(frozen=True)
class LinkConfig:
    tx_power_w: float = 10.0
    tx_gain_dbi: float | None = 32.13
    rx_gain_dbi: float | None = 34.2
    tx_antenna_diameter_m: float | None = 0.26
    rx_antenna_diameter_m: float | None = 0.26
    antenna_efficiency: float = 0.55
    carrier_frequency_hz: float = 26e9
    bandwidth_hz: float = 500e6
    noise_temperature_k: float = 290.0
    noise_figure_db: float = 0.0
    light_speed_m_s: float = link.LIGHT_SPEED
    boltzmann_j_k: float = link.BOLTZMANN

    def validate(self):
        _positive(self, "link", "tx_power_w", "carrier_frequency_hz", "bandwidth_hz",
                  "noise_temperature_k", "light_speed_m_s", "boltzmann_j_k")
        if not 0 < self.antenna_efficiency <= 1:
            raise ConfigError("link.antenna_efficiency: must lie in (0, 1]")
        if self.noise_figure_db < 0:
            raise ConfigError("link.noise_figure_db: must be >= 0")
        for side in ("tx", "rx"):
            gain = getattr(self, f"{side}_gain_dbi")
            diam = getattr(self, f"{side}_antenna_diameter_m")
            if gain is None and diam is None:
                raise ConfigError(f"link.{side}_gain_dbi: give a gain or an antenna diameter")
            if gain is None and not diam > 0:
                raise ConfigError(f"link.{side}_antenna_diameter_m: must be > 0")

    def gain(self, side: str) -> float:
        """Linear antenna gain; a direct dBi value wins over the aperture formula."""
        gain_dbi = getattr(self, f"{side}_gain_dbi")
        if gain_dbi is not None:
            return link.undb(gain_dbi)
        return link.antenna_gain(getattr(self, f"{side}_antenna_diameter_m"), self.antenna_efficiency,
                                 self.carrier_frequency_hz, self.light_speed_m_s)

    def budget(self, noise_figure_db: float | None = None) -> link.LinkBudget:
        nf = self.noise_figure_db if noise_figure_db is None else noise_figure_db
        return link.LinkBudget(
            tx_power=self.tx_power_w, tx_gain=self.gain("tx"), rx_gain=self.gain("rx"),
            carrier_frequency=self.carrier_frequency_hz, bandwidth=self.bandwidth_hz,
            noise_temperature=self.noise_temperature_k, noise_figure=nf,
            light_speed=self.light_speed_m_s, boltzmann=self.boltzmann_j_k,
        )


@dataclass(frozen=True)
class ScenarioConfig:
    orbit: OrbitConfig = field(default_factory=OrbitConfig)
    link: LinkConfig = field(default_factory=LinkConfig)
    modcod_table: str | None = None
    intervals: int = 1000
    scorer: dict = field(default_factory=lambda: {"kind": "spectral_magnitude"})
    bands: tuple[int, ...] | None = None
    bits_per_pixel: int | None = None
    capacity_bits: float | None = None
    seeds: tuple[int, ...] = (0,)
    base_dir: Path = field(default=Path("."), compare=False, repr=False)

    def validate(self):
        self.orbit.validate()
        self.link.validate()
        if not isinstance(self.intervals, int) or self.intervals < 1:
            raise ConfigError("intervals: must be an integer >= 1")
        if self.bands is not None and (not self.bands or len(set(self.bands)) != len(self.bands)
                                       or min(self.bands) < 0):
            raise ConfigError("bands: must be a non-empty list of distinct non-negative indices")
        if self.bits_per_pixel is not None and self.bits_per_pixel < 1:
            raise ConfigError("bits_per_pixel: must be >= 1")
        if self.capacity_bits is not None and self.capacity_bits < 0:
            raise ConfigError("capacity_bits: must be >= 0")
        if not self.seeds:
            raise ConfigError("seeds: must list at least one seed")
        kind = self.scorer.get("kind")
        if kind == "external":
            if not self.resolve(self.scorer.get("path", "")).is_file():
                raise ConfigError(f"scorer.path: file not found: {self.scorer.get('path')}")
        elif kind != "spectral_magnitude" or set(self.scorer) != {"kind"}:
            raise ConfigError("scorer: expected {'kind': 'spectral_magnitude'} or "
                              "{'kind': 'external', 'path': ...}")
        if self.modcod_table is not None and not self.resolve(self.modcod_table).is_file():
            raise ConfigError(f"modcod_table: file not found: {self.modcod_table}")

    def resolve(self, path: str) -> Path:
        p = Path(path)
        return p if p.is_absolute() else self.base_dir / p

    def scorer_spec(self) -> ScorerSpec:
        if self.scorer["kind"] == "external":
            return ExternalMap(self.resolve(self.scorer["path"]))
        return SpectralMagnitude()

    def modcod(self) -> link.ModcodTable:
        if self.modcod_table is None:
            return link.default_modcod_table()
        return link.load_modcod_csv(self.resolve(self.modcod_table))

    def to_dict(self) -> dict:
        doc = {"schema_version": SCHEMA_VERSION}
        for f in dataclasses.fields(self):
            if f.name == "base_dir":
                continue
            value = getattr(self, f.name)
            if dataclasses.is_dataclass(value):
                value = dataclasses.asdict(value)
            elif isinstance(value, tuple):
                value = list(value)
            doc[f.name] = value
        return doc

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"


def _positive(obj, section: str, *names: str):
    for name in names:
        value = getattr(obj, name)
        if not (isinstance(value, (int, float)) and value > 0):
            raise ConfigError(f"{section}.{name}: must be a number > 0, got {value!r}")


def _section(cls, doc, name: str):
    if doc is None:
        return cls()
    if not isinstance(doc, dict):
        raise ConfigError(f"{name}: expected an object")
    known = {f.name for f in dataclasses.fields(cls)}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"{name}.{sorted(unknown)[0]}: unknown field")
    optional = {f.name for f in dataclasses.fields(cls) if "None" in str(f.type)}
    for key, value in doc.items():
        if value is None and key in optional:
            continue
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{name}.{key}: expected a number, got {value!r}")
    return cls(**doc)


def from_dict(doc: dict, base_dir: Path | str = ".") -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("config: expected a JSON object")
    doc = dict(doc)
    version = doc.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(f"schema_version: unsupported version {version!r}")
    known = {f.name for f in dataclasses.fields(ScenarioConfig)} - {"base_dir"}
    unknown = set(doc) - known
    if unknown:
        raise ConfigError(f"{sorted(unknown)[0]}: unknown field")
    kw: dict = {"base_dir": Path(base_dir)}
    kw["orbit"] = _section(OrbitConfig, doc.pop("orbit", None), "orbit")
    kw["link"] = _section(LinkConfig, doc.pop("link", None), "link")
    for key in ("bands", "seeds"):
        if doc.get(key) is not None:
            if not isinstance(doc[key], list) or not all(isinstance(v, int) for v in doc[key]):
                raise ConfigError(f"{key}: expected a list of integers")
            doc[key] = tuple(doc[key])
    if "scorer" in doc and not isinstance(doc["scorer"], dict):
        raise ConfigError("scorer: expected an object")
    kw.update(doc)
    try:
        cfg = ScenarioConfig(**kw)
    except TypeError as exc:
        raise ConfigError(str(exc)) from None
    cfg.validate()
    return cfg


def load_config(path) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None
    return from_dict(doc, path.parent)
