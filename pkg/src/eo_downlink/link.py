"""Downlink budget, DVB-S2 rate selection and per-pass capacity."""

from __future__ import annotations

import bisect
import csv
import logging
import math
from dataclasses import dataclass

import numpy as np

from .orbit import PassProfile

log = logging.getLogger(__name__)

BOLTZMANN = 1.38e-23
LIGHT_SPEED = 2.997e8


def db(x: float) -> float:
    return 10.0 * math.log10(x)


def undb(x_db: float) -> float:
    return 10.0 ** (x_db / 10.0)


def antenna_gain(diameter: float, efficiency: float, frequency: float, light_speed: float = LIGHT_SPEED) -> float:
    """Linear gain of a circular aperture, eta * (pi * D * f / c)^2."""
    if diameter <= 0 or frequency <= 0 or not 0 < efficiency <= 1:
        raise ValueError("diameter and frequency must be positive and 0 < efficiency <= 1")
    return efficiency * (math.pi * diameter * frequency / light_speed) ** 2


def noise_power(noise_temperature: float, bandwidth: float, noise_figure_db: float = 0.0,
                boltzmann: float = BOLTZMANN) -> float:
    """Thermal noise k*T*B scaled by the receiver noise figure, in watts."""
    if noise_temperature <= 0 or bandwidth <= 0 or noise_figure_db < 0:
        raise ValueError("noise temperature and bandwidth must be positive, noise figure >= 0 dB")
    return boltzmann * noise_temperature * bandwidth * undb(noise_figure_db)


@dataclass(frozen=True)
class LinkBudget:
    tx_power: float  # W
    tx_gain: float  # linear
    rx_gain: float  # linear
    carrier_frequency: float  # Hz
    bandwidth: float  # Hz
    noise_temperature: float = 290.0  # K
    noise_figure: float = 0.0  # dB
    light_speed: float = LIGHT_SPEED
    boltzmann: float = BOLTZMANN

    def __post_init__(self):
        for name in ("tx_power", "tx_gain", "rx_gain", "carrier_frequency", "bandwidth",
                     "noise_temperature", "light_speed", "boltzmann"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive, got {getattr(self, name)}")
        if self.noise_figure < 0:
            raise ValueError(f"noise_figure must be >= 0 dB, got {self.noise_figure}")

    @property
    def noise_power(self) -> float:
        return noise_power(self.noise_temperature, self.bandwidth, self.noise_figure, self.boltzmann)


def snr(link: LinkBudget, distance):
    """Linear SNR at slant range ``distance`` (scalar or array) under free-space loss."""
    distance = np.asarray(distance, dtype=np.float64)
    if np.any(distance <= 0):
        raise ValueError("distance must be positive")
    path_gain = (link.light_speed / (4.0 * math.pi * distance * link.carrier_frequency)) ** 2
    out = link.tx_gain * link.rx_gain * link.tx_power * path_gain / link.noise_power
    return float(out) if out.ndim == 0 else out


# --- MODCOD tables --------------------------------------------------------------


@dataclass(frozen=True)
class ModcodEntry:
    name: str
    spectral_efficiency: float  # bit/s/Hz
    min_snr: float  # dB (ideal Es/N0)

    def __post_init__(self):
        if not self.spectral_efficiency > 0:
            raise ValueError(f"{self.name}: spectral efficiency must be positive")

    @property
    def min_snr_linear(self) -> float:
        return undb(self.min_snr)


# DVB-S2 normal frames, no pilots: efficiency and quasi-error-free Es/N0 on AWGN
# (EN 302 307 performance table).
DVB_S2_MODCODS: tuple[ModcodEntry, ...] = tuple(ModcodEntry(*row) for row in [
    ("QPSK 1/4", 0.490243, -2.35),
    ("QPSK 1/3", 0.656448, -1.24),
    ("QPSK 2/5", 0.789412, -0.30),
    ("QPSK 1/2", 0.988858, 1.00),
    ("QPSK 3/5", 1.188304, 2.23),
    ("QPSK 2/3", 1.322253, 3.10),
    ("QPSK 3/4", 1.487473, 4.03),
    ("QPSK 4/5", 1.587196, 4.68),
    ("QPSK 5/6", 1.654663, 5.18),
    ("QPSK 8/9", 1.766451, 6.20),
    ("QPSK 9/10", 1.788612, 6.42),
    ("8PSK 3/5", 1.779991, 5.50),
    ("8PSK 2/3", 1.980636, 6.62),
    ("8PSK 3/4", 2.228124, 7.91),
    ("8PSK 5/6", 2.478562, 9.35),
    ("8PSK 8/9", 2.646012, 10.69),
    ("8PSK 9/10", 2.679207, 10.98),
    ("16APSK 2/3", 2.637201, 8.97),
    ("16APSK 3/4", 2.966728, 10.21),
    ("16APSK 4/5", 3.165623, 11.03),
    ("16APSK 5/6", 3.300184, 11.61),
    ("16APSK 8/9", 3.523143, 12.89),
    ("16APSK 9/10", 3.567342, 13.13),
    ("32APSK 3/4", 3.703295, 12.73),
    ("32APSK 4/5", 3.951571, 13.64),
    ("32APSK 5/6", 4.119540, 14.28),
    ("32APSK 8/9", 4.397854, 15.69),
    ("32APSK 9/10", 4.453027, 16.05),
])


class ModcodTable:
    """MODCODs sorted by strictly increasing threshold and increasing efficiency.

    The constructor rejects tables with dominated entries; use
    :meth:`from_entries` to sort and drop them.
    """

    def __init__(self, entries):
        entries = tuple(entries)
        if not entries:
            raise ValueError("MODCOD table is empty")
        for a, b in zip(entries, entries[1:]):
            if not b.min_snr > a.min_snr:
                raise ValueError(f"thresholds not strictly ascending at {a.name} -> {b.name}")
            if not b.spectral_efficiency > a.spectral_efficiency:
                raise ValueError(f"{b.name} is dominated by {a.name}")
        self.entries = entries
        self._thresholds = [e.min_snr_linear for e in entries]

    @classmethod
    def from_entries(cls, entries) -> "ModcodTable":
        ranked = sorted(entries, key=lambda e: (e.min_snr, -e.spectral_efficiency))
        kept: list[ModcodEntry] = []
        for e in ranked:
            if kept and (e.min_snr == kept[-1].min_snr or e.spectral_efficiency <= kept[-1].spectral_efficiency):
                log.debug("dropping dominated MODCOD %s", e.name)
                continue
            kept.append(e)
        return cls(kept)

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def select(self, snr_linear: float) -> ModcodEntry | None:
        """Most efficient entry whose threshold the SNR meets, or None in outage."""
        k = bisect.bisect_right(self._thresholds, snr_linear)
        return self.entries[k - 1] if k else None


def default_modcod_table() -> ModcodTable:
    return ModcodTable.from_entries(DVB_S2_MODCODS)


def load_modcod_csv(path) -> ModcodTable:
    """Read ``name,spectral_efficiency_bps_per_hz,min_esn0_db`` rows."""
    entries = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        missing = {"name", "spectral_efficiency_bps_per_hz", "min_esn0_db"} - set(reader.fieldnames or ())
        if missing:
            raise ValueError(f"{path}: missing MODCOD columns {sorted(missing)}")
        for row in reader:
            entries.append(ModcodEntry(row["name"], float(row["spectral_efficiency_bps_per_hz"]),
                                       float(row["min_esn0_db"])))
    return ModcodTable.from_entries(entries)


def write_modcod_csv(entries, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["name", "spectral_efficiency_bps_per_hz", "min_esn0_db"])
        for e in entries:
            w.writerow([e.name, repr(e.spectral_efficiency), repr(e.min_snr)])


def modcod_rate(table: ModcodTable, snr_linear: float, bandwidth: float) -> float:
    """Highest DVB-S2 bit rate the SNR supports; 0 in outage."""
    entry = table.select(snr_linear)
    return 0.0 if entry is None else bandwidth * entry.spectral_efficiency


def shannon_rate(snr_linear, bandwidth: float):
    if np.any(np.asarray(snr_linear) < 0):
        raise ValueError("snr must be non-negative")
    return bandwidth * np.log2(1.0 + np.asarray(snr_linear, dtype=np.float64))


# --- pass rates and capacity ------------------------------------------------------


@dataclass(frozen=True)
class RateProfile:
    start_times: np.ndarray  # s
    durations: np.ndarray  # s
    rates: np.ndarray  # bit/s, DVB-S2
    shannon: np.ndarray  # bit/s, same interval SNR

    def __post_init__(self):
        n = len(self.durations)
        if not (len(self.rates) == len(self.start_times) == len(self.shannon) == n):
            raise ValueError("rate profile arrays must have equal length")
        if np.any(self.durations <= 0) or np.any(self.rates < 0):
            raise ValueError("durations must be positive and rates non-negative")

    @classmethod
    def constant(cls, rate: float, durations) -> "RateProfile":
        durations = np.asarray(durations, dtype=np.float64)
        starts = np.concatenate([[0.0], np.cumsum(durations)[:-1]])
        rates = np.full(len(durations), float(rate))
        return cls(starts, durations, rates, rates.copy())

    def __len__(self):
        return len(self.durations)


def rate_profile(link: LinkBudget, pass_: PassProfile, table: ModcodTable) -> RateProfile:
    """Per-interval rates, each evaluated at the interval's midpoint slant range."""
    durations = pass_.interval_durations
    if len(durations) == 0:
        empty = np.empty(0)
        return RateProfile(empty, empty, empty, empty)
    gamma = np.atleast_1d(snr(link, pass_.midpoint_distances))
    rates = np.array([modcod_rate(table, g, link.bandwidth) for g in gamma])
    return RateProfile(pass_.sample_times[:-1].copy(), durations, rates, shannon_rate(gamma, link.bandwidth))


def orbit_capacity(profile: RateProfile) -> float:
    """Bits deliverable over the pass: sum of rate * duration (order independent)."""
    return math.fsum((profile.rates * profile.durations).tolist())


def write_rate_profile_csv(profile: RateProfile, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t_start_s", "t_end_s", "rate_bps", "shannon_bps"])
        for t0, dt, r, s in zip(profile.start_times, profile.durations, profile.rates, profile.shannon):
            w.writerow([repr(float(t0)), repr(float(t0 + dt)), repr(float(r)), repr(float(s))])
