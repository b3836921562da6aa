"""Ground-truth line-system model and the black-box measurement function.

A Scenario fully describes one simulated spectrum service: slot geometry,
filter cascade, GSNR profile, neighbor channels and calibration constants.
``measure`` produces the Q-factor a field transceiver would read at a given
carrier; ``open_session`` wraps a scenario behind the narrow probe interface
that the sweep engine and diagnosis are allowed to see.
"""

import hashlib
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Optional, Tuple

import numpy as np

from specsweep.errors import ConfigurationError
from specsweep.formats import (
    CatalogEntry,
    DEFAULT_FEC_BER,
    DEFAULT_OUTAGE_BER,
    ber_from_snr,
    denormalize_gsnr,
    q_db_from_ber,
)
from specsweep.spectral import (
    FilterElement,
    FrequencyGrid,
    SignalSpectrum,
    cascade_power_response,
    overlap_coefficient,
    signal_psd,
)


@dataclass(frozen=True)
class MediaChannel:
    """One leased frequency slot (absolute GHz)."""

    center: float
    width: float
    guard_band_each_side: float = 0.0

    def __post_init__(self):
        if self.width <= 0:
            raise ValueError("media channel width must be > 0")
        if self.guard_band_each_side < 0 or 2 * self.guard_band_each_side >= self.width:
            raise ValueError("guard bands must be >= 0 and sum to less than the width")

    @property
    def start(self):
        return self.center - self.width / 2.0

    @property
    def stop(self):
        return self.center + self.width / 2.0


@dataclass(frozen=True)
class ProfileRipple:
    amplitude_db: float
    period_ghz: float
    phase_rad: float = 0.0

    def __post_init__(self):
        if self.amplitude_db < 0:
            raise ValueError("profile ripple amplitude must be >= 0")
        if self.period_ghz <= 0:
            raise ValueError("profile ripple period must be > 0")


@dataclass(frozen=True)
class GsnrProfile:
    """GSNR over frequency: base at the anchor center, linear tilt, ripple.

    The anchor defaults to the scenario's media channel; it is set explicitly
    when a multi-slot layout is split into per-victim scenarios so that all
    victims see the same underlying profile.
    """

    base_gsnr_db: float
    tilt_db: float = 0.0
    ripple_components: Tuple[ProfileRipple, ...] = ()
    anchor_center: Optional[float] = None
    anchor_width: Optional[float] = None

    def evaluate(self, f, channel):
        center = self.anchor_center if self.anchor_center is not None else channel.center
        width = self.anchor_width if self.anchor_width is not None else channel.width
        g = self.base_gsnr_db + self.tilt_db * (np.asarray(f, dtype=float) - center) / width
        for rip in self.ripple_components:
            g = g + rip.amplitude_db * np.sin(
                2.0 * np.pi * np.asarray(f, dtype=float) / rip.period_ghz + rip.phase_rad
            )
        if np.ndim(f) == 0:
            return float(g)
        return g


@dataclass(frozen=True)
class NeighborChannel:
    """An interfering carrier outside the probed slot."""

    spectrum: SignalSpectrum
    power_offset_db: float = 0.0


@dataclass(frozen=True)
class Scenario:
    media_channels: Tuple[MediaChannel, ...]
    filters: Tuple[FilterElement, ...]
    gsnr_profile: GsnrProfile
    neighbors: Tuple[NeighborChannel, ...] = ()
    crosstalk_coupling: float = 1.0
    filtering_exponent: float = 2.0
    measurement_noise_sigma_db: float = 0.1
    outage_ber: float = DEFAULT_OUTAGE_BER
    fec_ber: float = DEFAULT_FEC_BER
    seed: int = 0
    grid: FrequencyGrid = FrequencyGrid(-300.0, 300.0)

    def __post_init__(self):
        if not self.media_channels:
            raise ValueError("scenario needs at least one media channel")
        if self.crosstalk_coupling < 0:
            raise ValueError("crosstalk_coupling must be >= 0")
        if self.filtering_exponent < 1.0:
            raise ValueError("filtering_exponent must be >= 1")
        if self.measurement_noise_sigma_db < 0:
            raise ValueError("measurement_noise_sigma_db must be >= 0")

    @property
    def span(self):
        return (
            min(mc.start for mc in self.media_channels),
            max(mc.stop for mc in self.media_channels),
        )


@dataclass(frozen=True)
class ProbeConfig:
    """One transceiver configuration used for probing.

    The power rule keeps a constant ratio of signal power to symbol rate:
    launch power is p_ref_dbm + 10 log10(SR / sr_ref_gbd).
    """

    entry: CatalogEntry
    roll_off: float = 0.19
    p_ref_dbm: float = 0.0
    sr_ref_gbd: float = 12.5

    def __post_init__(self):
        if not 0.0 <= self.roll_off <= 1.0:
            raise ValueError("roll_off must be in [0, 1]")

    @property
    def probe_id(self):
        return f"{self.entry.name}/r{self.roll_off:g}"

    @property
    def symbol_rate(self):
        return self.entry.symbol_rate

    @property
    def launch_power_dbm(self):
        return self.p_ref_dbm + 10.0 * np.log10(self.entry.symbol_rate / self.sr_ref_gbd)

    def spectrum_at(self, carrier):
        return SignalSpectrum(self.entry.symbol_rate, self.roll_off, carrier)


@dataclass(frozen=True)
class MeasurementResult:
    carrier: float
    probe_id: str
    q_db: Optional[float] = None
    outage: bool = False

    def __post_init__(self):
        if self.outage == (self.q_db is not None):
            raise ValueError("exactly one of q_db / outage must be set")


@lru_cache(maxsize=32)
def _cascade_on_grid(filters, grid):
    return cascade_power_response(filters, grid.points())


def local_gsnr_db(scenario, f):
    """Underlying GSNR profile at absolute frequency ``f`` (extrapolates)."""
    return scenario.gsnr_profile.evaluate(f, scenario.media_channels[0])


def filtering_penalty_db(scenario, spectrum):
    """Penalty from truncation of ``spectrum`` by the filter cascade (dB >= 0).

    penalty = -beta * 10 log10(rho) with rho the transmitted power fraction.
    Returns inf when the signal falls entirely outside the cascade.
    """
    rho = _power_ratio(scenario, spectrum)
    if rho <= 0.0:
        return float("inf")
    return -scenario.filtering_exponent * 10.0 * np.log10(min(rho, 1.0))


def _power_ratio(scenario, spectrum):
    if not scenario.filters:
        return 1.0
    f = scenario.grid.points()
    s = signal_psd(f - spectrum.center, spectrum)
    total = np.trapezoid(s, f)
    if total <= 0.0:
        raise ConfigurationError(
            f"signal at {spectrum.center} GHz lies outside the scenario grid"
        )
    t = _cascade_on_grid(scenario.filters, scenario.grid)
    return float(np.trapezoid(s * t, f) / total)


def crosstalk_lin(scenario, victim, victim_power_dbm=0.0):
    """Aggregate linear crosstalk term from all neighbors.

    Each neighbor's power follows the constant-PSD rule relative to the
    victim (ratio SR_n / SR_v) plus its power_offset_db, so the result does
    not depend on the absolute victim power.
    """
    total = 0.0
    for nb in scenario.neighbors:
        ratio = (nb.spectrum.symbol_rate / victim.symbol_rate) * 10.0 ** (
            nb.power_offset_db / 10.0
        )
        chi = overlap_coefficient(
            victim,
            nb.spectrum,
            abs(nb.spectrum.center - victim.center),
            resolution=scenario.grid.resolution,
        )
        total += ratio * chi
    return scenario.crosstalk_coupling * total


def _q_noise_db(scenario, carrier, probe, trial_index):
    if scenario.measurement_noise_sigma_db == 0.0:
        return 0.0
    key = f"{scenario.seed}|{carrier:.6f}|{probe.probe_id}|{trial_index}"
    digest = hashlib.sha256(key.encode()).digest()
    rng = np.random.default_rng(int.from_bytes(digest[:8], "little"))
    return float(rng.normal(0.0, scenario.measurement_noise_sigma_db))


def measure(scenario, carrier, probe, trial_index=0):
    """Black-box Q reading of ``probe`` at ``carrier`` (deterministic).

    Chain: profile average weighted by the received spectrum, filtering
    penalty, crosstalk added inverse-linearly, then GSNR -> in-band SNR ->
    BER -> Q with seeded Gaussian read noise.
    """
    lo, hi = scenario.span
    if not lo <= carrier <= hi:
        raise ValueError(
            f"carrier {carrier} GHz outside media channel span [{lo}, {hi}]"
        )
    spectrum = probe.spectrum_at(carrier)

    f = scenario.grid.points()
    s = signal_psd(f - carrier, spectrum)
    t = (
        _cascade_on_grid(scenario.filters, scenario.grid)
        if scenario.filters
        else np.ones_like(f)
    )
    weight = s * t
    norm = np.trapezoid(weight, f)
    s_total = np.trapezoid(s, f)
    if s_total <= 0.0:
        raise ConfigurationError(
            f"signal at {carrier} GHz lies outside the scenario grid"
        )
    rho = float(norm / s_total)
    if rho <= 0.0:
        return MeasurementResult(carrier, probe.probe_id, outage=True)

    profile_lin = 10.0 ** (local_gsnr_db(scenario, f) / 10.0)
    g_profile = float(np.trapezoid(weight * profile_lin, f) / norm)
    g_filtered = g_profile * rho ** scenario.filtering_exponent
    x_t = crosstalk_lin(scenario, spectrum, probe.launch_power_dbm)
    g_eff = 1.0 / (1.0 / g_filtered + x_t)

    snr_db = denormalize_gsnr(10.0 * np.log10(g_eff), probe.symbol_rate)
    ber = ber_from_snr(probe.entry.format, snr_db)
    if ber > scenario.outage_ber:
        return MeasurementResult(carrier, probe.probe_id, outage=True)
    q_db = q_db_from_ber(ber) + _q_noise_db(scenario, carrier, probe, trial_index)
    return MeasurementResult(carrier, probe.probe_id, q_db=q_db)


class BlackBoxProbe:
    """What a spectrum customer actually has: a tunable probe on one slot.

    Exposes only carrier/probe selection, Q readout and the slot boundaries.
    Scenario internals (filters, profile, neighbors) stay private.
    """

    def __init__(self, scenario):
        self.__scenario = scenario
        self.__carrier = None
        self.__probe = None

    @property
    def slot(self):
        mc = self.__scenario.media_channels[0]
        return MediaChannel(mc.center, mc.width, mc.guard_band_each_side)

    def set_carrier(self, carrier):
        self.__carrier = float(carrier)

    def set_probe(self, probe):
        self.__probe = probe

    def read_q(self, trial_index=0):
        if self.__carrier is None or self.__probe is None:
            raise ConfigurationError("set_carrier and set_probe before read_q")
        return measure(self.__scenario, self.__carrier, self.__probe, trial_index)


def open_session(scenario):
    """Open an independent black-box probing session on a scenario."""
    return BlackBoxProbe(scenario)


class CrosstalkBench:
    """Multi-slot layout where every slot carries one carrier.

    Builds, per victim slot, a single-channel scenario in which all other
    slots appear as neighbor channels; the middle slot's carrier can be
    offset to emulate a drifting customer. The sweep engine only ever sees
    the sessions this bench hands out.
    """

    def __init__(self, scenario, slot_probes):
        if len(scenario.media_channels) != len(slot_probes):
            raise ConfigurationError(
                "need exactly one probe configuration per media channel"
            )
        if len(slot_probes) < 3:
            raise ConfigurationError("crosstalk bench needs at least 3 slots")
        self._scenario = scenario
        self._probes = tuple(slot_probes)
        lo, hi = scenario.span
        profile = scenario.gsnr_profile
        if profile.anchor_center is None:
            profile = replace(
                profile, anchor_center=(lo + hi) / 2.0, anchor_width=hi - lo
            )
        self._profile = profile

    @property
    def slot_count(self):
        return len(self._probes)

    @property
    def middle_index(self):
        return len(self._probes) // 2

    @property
    def middle_slot(self):
        return self._scenario.media_channels[self.middle_index]

    def probe_for(self, index):
        return self._probes[index]

    def victim_carrier(self, victim_index, central_offset):
        center = self._scenario.media_channels[victim_index].center
        if victim_index == self.middle_index:
            return center + central_offset
        return center

    def session(self, victim_index, central_offset):
        """Black-box session for one victim slot, middle carrier offset applied."""
        half = self.middle_slot.width / 2.0
        if abs(central_offset) > half:
            raise ValueError(
                f"central offset {central_offset} exceeds the middle slot half-width {half}"
            )
        neighbors = tuple(
            NeighborChannel(
                self._probes[k].spectrum_at(self.victim_carrier(k, central_offset))
            )
            for k in range(self.slot_count)
            if k != victim_index
        )
        victim_scenario = replace(
            self._scenario,
            media_channels=(self._scenario.media_channels[victim_index],),
            gsnr_profile=self._profile,
            neighbors=neighbors,
        )
        return open_session(victim_scenario)
