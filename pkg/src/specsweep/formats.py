"""Modulation-format catalog and the BER / SNR / Q / GSNR conversion chain.

GSNR values are normalized to a 12.5 GHz reference bandwidth:
gsnr_db = snr_db + 10 log10(symbol_rate / 12.5). The in-band SNR of a probe
at any symbol rate therefore maps onto one comparable channel metric.
"""

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import erfc, erfcinv

REFERENCE_BANDWIDTH_GHZ = 12.5
DEFAULT_FEC_BER = 2e-2
DEFAULT_OUTAGE_BER = 5e-2
SNR_FLOOR_DB = -30.0
_BER_FLOOR = 1e-300


class BerCurve(enum.Enum):
    QPSK = "qpsk"
    HYBRID8 = "hybrid8"
    QAM16 = "qam16"


@dataclass(frozen=True)
class ModulationFormat:
    name: str
    bits_per_symbol: int
    ber_curve: BerCurve


@dataclass(frozen=True)
class CatalogEntry:
    """One transceiver operating mode: format at a symbol rate and net rate."""

    name: str
    format: ModulationFormat
    symbol_rate: float
    net_data_rate_gbps: float
    margin_db: float = 1.0

    def __post_init__(self):
        if self.symbol_rate <= 0:
            raise ValueError("symbol_rate must be > 0")
        if self.net_data_rate_gbps <= 0:
            raise ValueError("net_data_rate_gbps must be > 0")


@dataclass(frozen=True)
class GsnrSample:
    """A normalized GSNR reading, or an outage marker (no valid reading)."""

    gsnr_db: Optional[float] = None
    outage: bool = False

    def __post_init__(self):
        if self.outage == (self.gsnr_db is not None):
            raise ValueError("exactly one of gsnr_db / outage must be set")


DP_QPSK = ModulationFormat("DP-QPSK", 4, BerCurve.QPSK)
DP_P_16QAM = ModulationFormat("DP-P-16QAM", 6, BerCurve.HYBRID8)
DP_16QAM = ModulationFormat("DP-16QAM", 8, BerCurve.QAM16)

# Probe set from the field campaign plus the 300G planning modes and the
# 100G low-rate mode used in the mixed crosstalk test.
BUILTIN_CATALOG = (
    CatalogEntry("200G-69GBd-DP-QPSK", DP_QPSK, 69.0, 200.0),
    CatalogEntry("200G-46GBd-DP-P-16QAM", DP_P_16QAM, 46.0, 200.0),
    CatalogEntry("200G-34GBd-DP-16QAM", DP_16QAM, 34.0, 200.0),
    CatalogEntry("300G-69GBd-DP-P-16QAM", DP_P_16QAM, 69.0, 300.0),
    CatalogEntry("300G-52GBd-DP-16QAM", DP_16QAM, 52.0, 300.0),
    CatalogEntry("100G-34GBd-DP-QPSK", DP_QPSK, 34.0, 100.0),
)


def catalog_entry(name):
    for entry in BUILTIN_CATALOG:
        if entry.name == name:
            return entry
    raise KeyError(f"unknown catalog entry {name!r}")


def _ber_qpsk(snr_lin):
    return 0.5 * erfc(np.sqrt(snr_lin / 2.0))


def _ber_qam16(snr_lin):
    # Gray-coded square 16QAM approximation.
    return (3.0 / 8.0) * erfc(np.sqrt(snr_lin / 10.0))


def ber_from_snr(fmt, snr_db):
    """Pre-FEC BER of a format at the given in-band SNR (dB)."""
    snr_lin = 10.0 ** (np.asarray(snr_db, dtype=float) / 10.0)
    if fmt.ber_curve is BerCurve.QPSK:
        ber = _ber_qpsk(snr_lin)
    elif fmt.ber_curve is BerCurve.QAM16:
        ber = _ber_qam16(snr_lin)
    else:
        # Hybrid 8-bit/4D format: geometric mean of the parent curves keeps it
        # strictly between QPSK and 16QAM at every SNR.
        ber = np.sqrt(_ber_qpsk(snr_lin) * _ber_qam16(snr_lin))
    ber = np.clip(ber, _BER_FLOOR, 0.5)
    if np.ndim(snr_db) == 0:
        return float(ber)
    return ber


def snr_from_ber(fmt, ber, tol_db=1e-4):
    """Invert ber_from_snr by bisection; clamped at SNR_FLOOR_DB."""
    if not 0.0 < ber < 0.5:
        raise ValueError(f"ber must be in (0, 0.5), got {ber}")
    lo, hi = SNR_FLOOR_DB, 60.0
    if ber_from_snr(fmt, lo) <= ber:
        return SNR_FLOOR_DB
    while hi - lo > tol_db:
        mid = 0.5 * (lo + hi)
        if ber_from_snr(fmt, mid) > ber:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def q_db_from_ber(ber):
    """Q-factor in dB: 20 log10(sqrt(2) * erfcinv(2 ber))."""
    if not 0.0 < ber < 0.5:
        raise ValueError(f"ber must be in (0, 0.5), got {ber}")
    return float(20.0 * np.log10(np.sqrt(2.0) * erfcinv(2.0 * ber)))


def ber_from_q_db(q_db):
    """Exact inverse of q_db_from_ber."""
    q_lin = 10.0 ** (q_db / 20.0)
    return float(0.5 * erfc(q_lin / np.sqrt(2.0)))


def normalize_gsnr(snr_db, symbol_rate):
    """In-band SNR -> GSNR in the 12.5 GHz reference bandwidth."""
    if symbol_rate <= 0:
        raise ValueError("symbol_rate must be > 0")
    return snr_db + 10.0 * np.log10(symbol_rate / REFERENCE_BANDWIDTH_GHZ)


def denormalize_gsnr(gsnr_db, symbol_rate):
    """Inverse of normalize_gsnr."""
    if symbol_rate <= 0:
        raise ValueError("symbol_rate must be > 0")
    return gsnr_db - 10.0 * np.log10(symbol_rate / REFERENCE_BANDWIDTH_GHZ)


def required_gsnr(entry, fec_ber=DEFAULT_FEC_BER):
    """Normalized GSNR needed to run ``entry`` at the FEC threshold plus margin."""
    snr = snr_from_ber(entry.format, fec_ber)
    return normalize_gsnr(snr, entry.symbol_rate) + entry.margin_db
