"""Sweep-and-probe engine operating against the black-box probe interface.

Implements extended channel probing: several transceiver configurations are
swept in fixed frequency steps across the slot and each raw Q reading is
converted back to a symbol-rate-normalized GSNR sample. The engine sees only
a BlackBoxProbe (or the crosstalk bench's sessions), never a Scenario.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from specsweep.errors import ConfigurationError
from specsweep.formats import (
    GsnrSample,
    ber_from_q_db,
    normalize_gsnr,
    snr_from_ber,
)
from specsweep.linesim import MediaChannel, ProbeConfig

DEFAULT_STEP_GHZ = 6.25


@dataclass(frozen=True)
class SweepPlan:
    """Carrier grid and probe set for one sweep."""

    slot: MediaChannel
    probes: Tuple[ProbeConfig, ...]
    step: float = DEFAULT_STEP_GHZ
    trials_per_point: int = 1

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError("sweep step must be > 0")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")

    def carriers(self):
        """Carrier frequencies from slot start to slot stop, inclusive."""
        n = int(np.floor((self.slot.width + 1e-9) / self.step)) + 1
        return self.slot.start + self.step * np.arange(n)


@dataclass(frozen=True)
class SweepPoint:
    carrier: float
    sample: GsnrSample
    q_db: Optional[float] = None


@dataclass(frozen=True)
class ProbeCurve:
    """One probe's GSNR-vs-carrier curve."""

    probe: ProbeConfig
    points: Tuple[SweepPoint, ...]

    def carriers(self):
        return np.array([p.carrier for p in self.points])

    def gsnr_db(self):
        """GSNR values with NaN at outage points."""
        return np.array(
            [np.nan if p.sample.outage else p.sample.gsnr_db for p in self.points]
        )

    def finite_fraction(self):
        vals = self.gsnr_db()
        return float(np.count_nonzero(np.isfinite(vals))) / len(vals)


@dataclass(frozen=True)
class SweepResult:
    slot: MediaChannel
    step: float
    curves: Tuple[ProbeCurve, ...]


def _read_point(session, carrier, probe, trials):
    """Raw median-Q reading; returns (GsnrSample, median_q or None)."""
    session.set_carrier(carrier)
    session.set_probe(probe)
    readings = [session.read_q(trial_index=t) for t in range(trials)]
    n_outage = sum(r.outage for r in readings)
    if 2 * n_outage > trials or n_outage == trials:
        return GsnrSample(outage=True), None
    q = float(np.median([r.q_db for r in readings if not r.outage]))
    ber = ber_from_q_db(q)
    snr_db = snr_from_ber(probe.entry.format, ber)
    return GsnrSample(gsnr_db=normalize_gsnr(snr_db, probe.symbol_rate)), q


def probe_point(session, carrier, probe, trials=1):
    """Estimate normalized GSNR at one carrier; outage if most trials fail.

    Inverts the measurement chain: median Q over trials -> BER -> in-band
    SNR via the probe format's curve -> GSNR in the reference bandwidth.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sample, _ = _read_point(session, carrier, probe, trials)
    return sample


def run_sweep(session, plan):
    """Sweep every probe across the plan's carrier grid.

    Edge carriers are measured even when the probe's occupied band overhangs
    the slot; outage there is recorded as data, not an error.
    """
    if not plan.probes:
        raise ConfigurationError("sweep plan has no probes")
    carriers = plan.carriers()
    curves = []
    for probe in plan.probes:
        points = []
        for carrier in carriers:
            sample, q = _read_point(session, carrier, probe, plan.trials_per_point)
            points.append(SweepPoint(float(carrier), sample, q))
        curves.append(ProbeCurve(probe, tuple(points)))
    return SweepResult(plan.slot, plan.step, tuple(curves))


@dataclass(frozen=True)
class ChannelScan:
    """One channel's readings across the central-carrier offsets."""

    slot_index: int
    probe: ProbeConfig
    offsets: Tuple[float, ...]
    samples: Tuple[GsnrSample, ...]
    penalties_db: Tuple[Optional[float], ...]  # None where sample is outage


@dataclass(frozen=True)
class CrosstalkScanResult:
    offsets: Tuple[float, ...]
    channels: Tuple[ChannelScan, ...]

    def channel(self, slot_index):
        for ch in self.channels:
            if ch.slot_index == slot_index:
                return ch
        raise KeyError(f"no channel scan for slot {slot_index}")


def crosstalk_scan(bench, offsets, trials=1):
    """Sweep the middle carrier across its slot, watching every channel.

    For each offset of the central carrier each channel (central and sides)
    is measured through its own session. Penalty is referenced to that
    channel's aligned-grid (offset 0) reading; outage points carry None.
    """
    offsets = tuple(float(o) for o in offsets)
    half = bench.middle_slot.width / 2.0
    for off in offsets:
        if abs(off) > half:
            raise ValueError(
                f"offset {off} GHz outside the middle slot half-width {half} GHz"
            )
    channels = []
    for idx in range(bench.slot_count):
        probe = bench.probe_for(idx)
        baseline = probe_point(
            bench.session(idx, 0.0), bench.victim_carrier(idx, 0.0), probe, trials
        )
        samples = []
        penalties = []
        for off in offsets:
            sample = probe_point(
                bench.session(idx, off), bench.victim_carrier(idx, off), probe, trials
            )
            samples.append(sample)
            if sample.outage or baseline.outage:
                penalties.append(None)
            else:
                penalties.append(baseline.gsnr_db - sample.gsnr_db)
        channels.append(
            ChannelScan(idx, probe, offsets, tuple(samples), tuple(penalties))
        )
    return CrosstalkScanResult(offsets, tuple(channels))
