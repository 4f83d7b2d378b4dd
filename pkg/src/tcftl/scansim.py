"""Scan-timing simulation of phone-to-phone RSSI capture.

Transmitters chirp at a few Hz continuously, but receivers only listen in
short scans fired at a fixed interval — the default model is a 4 s scan
every 150 s, six scans in a 15-minute detection window, with 16 decodable
chirps per scan at a 4 Hz chirp rate. What the app keeps per scan is a
recording policy choice: the first decoded chirp, a fixed number of chirps,
or the strongest chirp seen (minimum attenuation).

The simulator draws every chirp a scan would decode and then applies the
policy as a pure reduction of that chirp tensor. Within-scan correlation is
modeled by drawing one stratum (e.g. a pose-angle cell of the measured data)
per scan and conditioning all of that scan's chirps on it; independent
sampling redraws the stratum per chirp, which collapses to pooled draws.

Determinism: identical inputs and seed give identical outputs, regardless of
how callers parallelize. Windows are generated in fixed-size chunks with
per-chunk seeds derived as ``[seed, chunk_index]``.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from .densities import ConditionalPdfBank, EmpiricalPdf, align_supports
from .errors import ConfigurationError, EstimationError, ParameterError
from .measurements import SENSITIVITY_FLOOR_DBM, CarriagePair

#: Windows generated per RNG chunk; fixed so output never depends on how
#: many workers a caller spreads chunks across.
CHUNK_WINDOWS = 2048


class RecordingPolicy(enum.Enum):
    """What a receiver keeps from the chirps it decodes in one scan."""

    FIRST_CHIRP = "first_chirp"
    ALL_CHIRPS = "all_chirps"
    MIN_ATTENUATION = "min_attenuation"


class Correlation(enum.Enum):
    INDEPENDENT = "independent"
    WITHIN_SCAN_CORRELATED = "within_scan_correlated"


@dataclass(frozen=True)
class ScanModel:
    """Timing of transmit chirps and receive scans.

    Defaults model the measured App|Exposure-notification behavior: 4 Hz
    chirps, 4 s scans every 150 s, six scans per 900 s window.
    """

    chirp_rate_hz: float = 4.0
    scan_duration_s: float = 4.0
    scan_interval_s: float = 150.0
    scans_per_window: int = 6
    window_s: float = 900.0

    def __post_init__(self) -> None:
        if self.chirp_rate_hz <= 0 or self.scan_duration_s <= 0 or self.scan_interval_s <= 0:
            raise ValueError("chirp rate, scan duration, and scan interval must be positive")
        if self.scan_duration_s > self.scan_interval_s:
            raise ValueError("a scan cannot outlast the scan interval")
        if not isinstance(self.scans_per_window, int) or self.scans_per_window < 1:
            raise ValueError(f"scans_per_window must be a positive integer, got {self.scans_per_window!r}")
        if self.window_s < self.scans_per_window * self.scan_duration_s:
            raise ValueError("window too short for the requested number of scans")
        if self.chirps_per_scan < 1:
            raise ValueError("scan too short to decode a single chirp")

    @property
    def chirps_per_scan(self) -> int:
        return int(math.floor(self.chirp_rate_hz * self.scan_duration_s))


@dataclass(frozen=True)
class SamplingModel:
    """Recording policy plus the correlation structure of within-scan draws.

    ``samples_per_scan`` only matters for ALL_CHIRPS (None defaults to 4,
    the measured per-pose capture depth); FIRST_CHIRP and MIN_ATTENUATION
    record exactly one value per scan by construction.
    """

    policy: RecordingPolicy
    samples_per_scan: int | None = None
    correlation: Correlation = Correlation.WITHIN_SCAN_CORRELATED

    def __post_init__(self) -> None:
        if self.samples_per_scan is None:
            spp = 4 if self.policy is RecordingPolicy.ALL_CHIRPS else 1
            object.__setattr__(self, "samples_per_scan", spp)
            return
        if not isinstance(self.samples_per_scan, int) or self.samples_per_scan < 1:
            raise ConfigurationError(
                f"samples_per_scan must be a positive integer, got {self.samples_per_scan!r}"
            )
        if self.policy is not RecordingPolicy.ALL_CHIRPS and self.samples_per_scan != 1:
            raise ConfigurationError(
                f"{self.policy.value} records one value per scan; "
                f"samples_per_scan={self.samples_per_scan} is inconsistent"
            )

    def recorded_per_scan(self) -> int:
        return self.samples_per_scan if self.policy is RecordingPolicy.ALL_CHIRPS else 1


def _coerce_sampling(sampling: RecordingPolicy | SamplingModel) -> SamplingModel:
    if isinstance(sampling, RecordingPolicy):
        return SamplingModel(policy=sampling)
    return sampling


def looks_per_window(model: ScanModel, sampling: RecordingPolicy | SamplingModel) -> int:
    """Recorded values per window under a scan model and sampling model."""
    return model.scans_per_window * _coerce_sampling(sampling).recorded_per_scan()


def cell_strata(
    bank: ConditionalPdfBank, distance_ft: float, carriage: CarriagePair
) -> tuple[tuple[float, EmpiricalPdf], ...]:
    """The (weight, PDF) strata of one bank cell, count-weighted.

    Falls back to the whole-cell PDF as a single stratum when the bank has
    no pose strata there.
    """
    sub = bank.strata(distance_ft, carriage)
    if not sub:
        return ((1.0, bank.pdf(distance_ft, carriage)),)
    total = sum(p.sample_count for p in sub.values())
    if total <= 0:
        return ((1.0, bank.pdf(distance_ft, carriage)),)
    return tuple(
        (p.sample_count / total, p) for _, p in sorted(sub.items()) if p.sample_count > 0
    )


def _stratum_tables(strata: Sequence[tuple[float, EmpiricalPdf]]) -> tuple[np.ndarray, int, np.ndarray]:
    """Normalized stratum weights, common support_min, and per-stratum CDF rows."""
    if not strata:
        raise EstimationError("need at least one stratum to simulate from")
    weights = np.asarray([w for w, _ in strata], dtype=np.float64)
    if np.any(weights < 0) or weights.sum() <= 0:
        raise ParameterError("stratum weights must be nonnegative and not all zero")
    weights = weights / weights.sum()
    lo, mat = align_supports([p for _, p in strata])
    cdfs = np.clip(np.cumsum(mat, axis=1), 0.0, 1.0)
    cdfs[:, -1] = 1.0
    return weights, lo, cdfs


def _draw_chunk(
    rng: np.random.Generator,
    n_windows: int,
    model: ScanModel,
    sampling: SamplingModel,
    weights: np.ndarray,
    support_min: int,
    cdfs: np.ndarray,
) -> np.ndarray:
    """Draw a (n_windows, looks) block; policy is applied after all chirps are drawn."""
    scans = model.scans_per_window
    chirps = model.chirps_per_scan
    k, nbins = cdfs.shape

    if sampling.correlation is Correlation.WITHIN_SCAN_CORRELATED:
        strata_idx = rng.choice(k, size=(n_windows, scans), p=weights)
        strata_idx = np.repeat(strata_idx[:, :, None], chirps, axis=2)
    else:
        strata_idx = rng.choice(k, size=(n_windows, scans, chirps), p=weights)
    u = rng.random((n_windows, scans, chirps))

    # Inverse-CDF sampling across strata in one pass: each stratum's CDF is
    # offset by its index, making one globally sorted table.
    table = (cdfs + np.arange(k)[:, None]).ravel()
    flat = np.searchsorted(table, (u + strata_idx).ravel(), side="right")
    values = support_min + (flat - strata_idx.ravel() * nbins).reshape(n_windows, scans, chirps)

    if sampling.policy is RecordingPolicy.FIRST_CHIRP:
        return values[:, :, 0]
    if sampling.policy is RecordingPolicy.MIN_ATTENUATION:
        return values.max(axis=2)
    spp = sampling.samples_per_scan
    if spp > chirps:
        raise ConfigurationError(
            f"samples_per_scan={spp} exceeds the {chirps} decodable chirps per scan"
        )
    return values[:, :, :spp].reshape(n_windows, scans * spp)


def _seed_list(seed) -> list[int]:
    if isinstance(seed, (int, np.integer)):
        seeds = [int(seed)]
    else:
        seeds = [int(s) for s in seed]
    if any(s < 0 for s in seeds):
        raise ParameterError(f"seeds must be nonnegative integers, got {seed!r}")
    return seeds


def draw_windows(
    strata: Sequence[tuple[float, EmpiricalPdf]],
    model: ScanModel,
    sampling: RecordingPolicy | SamplingModel,
    n_windows: int,
    seed,
) -> np.ndarray:
    """Simulate recorded values for many windows from weighted strata.

    Returns an (n_windows, looks_per_window) integer dB array. Output is a
    pure function of the arguments; policies reduce a common chirp tensor,
    so at a fixed seed MIN_ATTENUATION looks dominate FIRST_CHIRP looks
    scan by scan.

    ``seed`` is a nonnegative integer or a sequence of them (callers derive
    disjoint streams by extending the sequence).
    """
    sampling = _coerce_sampling(sampling)
    if n_windows < 1:
        raise ParameterError(f"n_windows must be positive, got {n_windows!r}")
    seeds = _seed_list(seed)
    weights, lo, cdfs = _stratum_tables(strata)
    looks = model.scans_per_window * sampling.recorded_per_scan()
    out = np.empty((n_windows, looks), dtype=np.int64)
    for chunk_idx, start in enumerate(range(0, n_windows, CHUNK_WINDOWS)):
        stop = min(start + CHUNK_WINDOWS, n_windows)
        rng = np.random.default_rng(seeds + [chunk_idx])
        out[start:stop] = _draw_chunk(rng, stop - start, model, sampling, weights, lo, cdfs)
    return out


def simulate_window(
    model: ScanModel,
    sampling: RecordingPolicy | SamplingModel,
    bank: ConditionalPdfBank,
    distance_ft: float,
    carriage: CarriagePair,
    seed,
) -> np.ndarray:
    """Recorded values of one detection window at a fixed range and carriage.

    The default model yields 6 values under FIRST_CHIRP or MIN_ATTENUATION
    and scans x samples_per_scan (24 by default) under ALL_CHIRPS.
    """
    strata = cell_strata(bank, distance_ft, carriage)
    return draw_windows(strata, model, sampling, 1, seed)[0]


def simulate_windows(
    model: ScanModel,
    sampling: RecordingPolicy | SamplingModel,
    bank: ConditionalPdfBank,
    distance_ft: float,
    carriage: CarriagePair,
    seed,
    n_windows: int,
) -> np.ndarray:
    """Many windows at once; row i of the result is window i."""
    strata = cell_strata(bank, distance_ft, carriage)
    return draw_windows(strata, model, sampling, n_windows, seed)


def censor_sensitivity(values: Sequence[int], floor: int = SENSITIVITY_FLOOR_DBM) -> np.ndarray:
    """Drop looks below the demodulation floor (applied after policy reduction)."""
    arr = np.asarray(values)
    return arr[arr >= floor]
