"""Empirical attenuation PDFs, conditioned on range and carriage.

Everything downstream of measurement ingest works with discrete probability
mass functions over integer dB bins: one per (separation, carriage-pair)
cell, optionally sub-divided by pose-angle strata. This module estimates
those PDFs from a :class:`~tcftl.measurements.Dataset`, organizes them in a
:class:`ConditionalPdfBank`, and forms the two hypothesis mixtures that
detector design needs — "too close" (separations up to the boundary) versus
"not too close" (boundary out to the BLE limit) — by weighting the per-range
PDFs with a contact density D(s) and integrating with the trapezoidal rule
on the measured range grid.

For contacts spread uniformly over the plane, the number of contacts in a
thin annulus at range s grows linearly with s, so the uniform-area density
is D(s) = s. Densities only ever matter up to scale: mixture weights are
renormalized, so D and 2D give identical mixtures.
"""

from __future__ import annotations

import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .errors import CoverageError, EstimationError, ParameterError
from .measurements import SENSITIVITY_FLOOR_DBM, CarriagePair, Dataset

_DISTANCE_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class EmpiricalPdf:
    """A discrete PDF over contiguous 1 dB bins.

    Attributes:
        support_min: Value of the first bin, integer dB.
        probabilities: Bin masses; nonnegative, summing to 1 within 1e-9.
        sample_count: Number of measurements behind the estimate.
    """

    support_min: int
    probabilities: np.ndarray
    sample_count: int

    def __post_init__(self) -> None:
        probs = np.array(self.probabilities, dtype=np.float64, copy=True)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probabilities must be a nonempty 1-D array")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        total = float(probs.sum())
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"probabilities must sum to 1 within 1e-9, got {total!r}")
        if not isinstance(self.support_min, (int, np.integer)) or isinstance(self.support_min, bool):
            raise ValueError(f"support_min must be an integer dB value, got {self.support_min!r}")
        if self.sample_count < 0:
            raise ValueError("sample_count must be nonnegative")
        probs.flags.writeable = False
        object.__setattr__(self, "support_min", int(self.support_min))
        object.__setattr__(self, "probabilities", probs)

    @property
    def support_max(self) -> int:
        return self.support_min + self.probabilities.size - 1

    def values(self) -> np.ndarray:
        """The bin values, ``support_min .. support_max`` inclusive."""
        return np.arange(self.support_min, self.support_max + 1)

    def prob(self, x: int) -> float:
        """Mass at integer value ``x`` (0 outside the support)."""
        if x < self.support_min or x > self.support_max:
            return 0.0
        return float(self.probabilities[x - self.support_min])

    def tail_geq(self, tau: int) -> float:
        """P[X >= tau]."""
        if tau <= self.support_min:
            return 1.0
        if tau > self.support_max:
            return 0.0
        return float(min(self.probabilities[tau - self.support_min :].sum(), 1.0))

    def tail_geq_many(self, taus: np.ndarray) -> np.ndarray:
        """Vectorized :meth:`tail_geq` over an integer threshold array."""
        suffix = np.concatenate([np.cumsum(self.probabilities[::-1])[::-1], [0.0]])
        # Guard the normalization tolerance: the running sum may drift a few
        # ulps past 1, which downstream probability checks must not see.
        suffix = np.clip(suffix, 0.0, 1.0)
        idx = np.clip(np.asarray(taus) - self.support_min, 0, self.probabilities.size)
        return suffix[idx]

    def mean(self) -> float:
        return float(np.dot(self.values(), self.probabilities))

    def median(self) -> int:
        """Smallest value whose CDF reaches 0.5."""
        cdf = np.cumsum(self.probabilities)
        return int(self.support_min + int(np.searchsorted(cdf, 0.5)))

    @classmethod
    def from_values(
        cls,
        values: Sequence[int],
        support: tuple[int, int] | None = None,
        floor: float = 0.0,
    ) -> "EmpiricalPdf":
        """Histogram integer dB values into a PDF.

        Args:
            values: Integer dB observations.
            support: Inclusive (lo, hi) bin range; defaults to the observed
                min/max. Values outside an explicit support raise.
            floor: Probability mass assigned to empty bins before
                renormalization; 0 (the default) keeps the raw histogram, so
                a constant input is an exact point mass.
        """
        vals = np.asarray(list(values), dtype=np.int64)
        if vals.size == 0:
            raise EstimationError("cannot estimate a PDF from zero samples")
        lo, hi = (int(vals.min()), int(vals.max())) if support is None else (int(support[0]), int(support[1]))
        if hi < lo:
            raise ParameterError(f"support upper bound {hi} below lower bound {lo}")
        if vals.min() < lo or vals.max() > hi:
            raise ParameterError(
                f"values span [{vals.min()}, {vals.max()}] outside support [{lo}, {hi}]"
            )
        counts = np.bincount(vals - lo, minlength=hi - lo + 1).astype(np.float64)
        return cls.from_weights(lo, counts, sample_count=vals.size, floor=floor)

    @classmethod
    def from_weights(
        cls,
        support_min: int,
        weights: np.ndarray,
        sample_count: int = 0,
        floor: float = 0.0,
    ) -> "EmpiricalPdf":
        """Normalize nonnegative bin weights into a PDF, flooring empty bins."""
        if floor < 0:
            raise ParameterError(f"floor must be nonnegative, got {floor!r}")
        w = np.asarray(weights, dtype=np.float64).copy()
        total = w.sum()
        if total <= 0:
            raise EstimationError("bin weights sum to zero")
        w /= total
        if floor > 0:
            w[w == 0.0] = floor
            w /= w.sum()
        return cls(support_min=support_min, probabilities=w, sample_count=sample_count)

    def to_dict(self) -> dict:
        return {
            "support_min": self.support_min,
            "probabilities": self.probabilities.tolist(),
            "sample_count": self.sample_count,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "EmpiricalPdf":
        return cls(
            support_min=int(data["support_min"]),
            probabilities=np.asarray(data["probabilities"], dtype=np.float64),
            sample_count=int(data["sample_count"]),
        )


def align_supports(pdfs: Sequence[EmpiricalPdf]) -> tuple[int, np.ndarray]:
    """Embed PDFs into a common support; returns (support_min, row-per-pdf matrix)."""
    lo = min(p.support_min for p in pdfs)
    hi = max(p.support_max for p in pdfs)
    mat = np.zeros((len(pdfs), hi - lo + 1), dtype=np.float64)
    for i, p in enumerate(pdfs):
        start = p.support_min - lo
        mat[i, start : start + p.probabilities.size] = p.probabilities
    return lo, mat


def estimate_pdf(
    dataset: Dataset,
    distance_ft: float,
    carriage: CarriagePair,
    *,
    support: tuple[int, int] | None = None,
    floor: float = 0.0,
    include_synthetic: bool = True,
) -> EmpiricalPdf:
    """Estimate the attenuation PDF of one (range, carriage-pair) cell.

    The default support spans at least [-100, max tx power] so censored and
    saturated regions are representable even when unobserved.

    Raises:
        EstimationError: The cell has no samples.
    """
    values: list[int] = []
    tx_max = SENSITIVITY_FLOOR_DBM
    for s in dataset:
        if not math.isclose(s.distance_ft, distance_ft, rel_tol=1e-9, abs_tol=_DISTANCE_TOL):
            continue
        if s.carriage != carriage:
            continue
        if s.synthetic and not include_synthetic:
            continue
        values.append(s.rssi)
        tx_max = max(tx_max, s.tx_power)
    if not values:
        raise EstimationError(
            f"no samples at {distance_ft:g} ft for carriage pair {carriage.label()!r}"
        )
    if support is None:
        support = (min(SENSITIVITY_FLOOR_DBM, min(values)), max(max(values), tx_max))
    return EmpiricalPdf.from_values(values, support=support, floor=floor)


class ConditionalPdfBank:
    """Attenuation PDFs indexed by (separation, carriage pair).

    Each cell may also carry pose-angle strata: sub-PDFs keyed by the
    (user-1, user-2) pose-angle pair, used to model within-scan correlation.
    Cell PDFs built by :meth:`from_dataset` are exact count-weighted sums of
    their strata.
    """

    def __init__(
        self,
        cells: Mapping[tuple[float, CarriagePair], EmpiricalPdf],
        strata: Mapping[tuple[float, CarriagePair], Mapping[tuple[int, int], EmpiricalPdf]] | None = None,
    ):
        if not cells:
            raise EstimationError("a PDF bank needs at least one cell")
        self._cells = {(float(d), c): pdf for (d, c), pdf in cells.items()}
        self._strata = {}
        if strata:
            self._strata = {(float(d), c): dict(sub) for (d, c), sub in strata.items()}

    def pairs(self) -> tuple[CarriagePair, ...]:
        seen: dict[CarriagePair, None] = {}
        for _, c in self._cells:
            seen.setdefault(c, None)
        return tuple(seen)

    def distances(self, carriage: CarriagePair | None = None) -> tuple[float, ...]:
        ds = {d for d, c in self._cells if carriage is None or c == carriage}
        return tuple(sorted(ds))

    def _resolve(self, distance_ft: float, carriage: CarriagePair) -> tuple[float, CarriagePair]:
        for d in self.distances(carriage):
            if math.isclose(d, distance_ft, rel_tol=1e-9, abs_tol=_DISTANCE_TOL):
                return (d, carriage)
        raise CoverageError(
            f"bank has no cell at {distance_ft:g} ft for carriage pair {carriage.label()!r}"
        )

    def pdf(self, distance_ft: float, carriage: CarriagePair) -> EmpiricalPdf:
        return self._cells[self._resolve(distance_ft, carriage)]

    def strata(self, distance_ft: float, carriage: CarriagePair) -> dict[tuple[int, int], EmpiricalPdf] | None:
        """Pose-angle strata of a cell, or None if the cell is unstratified."""
        key = self._resolve(distance_ft, carriage)
        sub = self._strata.get(key)
        return dict(sub) if sub else None

    def cells(self) -> Iterator[tuple[tuple[float, CarriagePair], EmpiricalPdf]]:
        for key in sorted(self._cells, key=lambda k: (k[0], k[1].label())):
            yield key, self._cells[key]

    @classmethod
    def from_dataset(
        cls,
        dataset: Dataset,
        *,
        support: tuple[int, int] | None = None,
        floor: float = 0.0,
        stratify: bool = True,
        include_synthetic: bool = True,
    ) -> "ConditionalPdfBank":
        """Estimate every populated cell of a dataset, on one shared support.

        The shared support spans [-100, max tx power] union the observed
        values, so PDFs from different cells align bin-for-bin.
        """
        if len(dataset) == 0:
            raise EstimationError("cannot build a PDF bank from an empty dataset")
        usable = [s for s in dataset if include_synthetic or not s.synthetic]
        if not usable:
            raise EstimationError("no usable samples after synthetic-sample filtering")
        if support is None:
            lo = min(SENSITIVITY_FLOOR_DBM, min(s.rssi for s in usable))
            hi = max(max(s.rssi for s in usable), max(s.tx_power for s in usable))
            support = (lo, hi)

        by_cell: dict[tuple[float, CarriagePair], list] = {}
        for s in usable:
            by_cell.setdefault((s.distance_ft, s.carriage), []).append(s)

        cells = {}
        strata: dict[tuple[float, CarriagePair], dict[tuple[int, int], EmpiricalPdf]] = {}
        for key, cell_samples in by_cell.items():
            cells[key] = EmpiricalPdf.from_values(
                [s.rssi for s in cell_samples], support=support, floor=floor
            )
            if stratify:
                by_pose: dict[tuple[int, int], list[int]] = {}
                for s in cell_samples:
                    by_pose.setdefault((s.pose_angle_user1, s.pose_angle_user2), []).append(s.rssi)
                if len(by_pose) > 1:
                    strata[key] = {
                        pose: EmpiricalPdf.from_values(v, support=support, floor=floor)
                        for pose, v in sorted(by_pose.items())
                    }
        return cls(cells, strata)

    def to_json_dict(self) -> dict:
        out = []
        for (d, c), pdf in self.cells():
            entry: dict = {"distance_ft": d, "carriage": c.label(), "pdf": pdf.to_dict()}
            sub = self._strata.get((d, c))
            if sub:
                entry["strata"] = [
                    {"pose": f"{a1}|{a2}", "pdf": p.to_dict()} for (a1, a2), p in sorted(sub.items())
                ]
            out.append(entry)
        return {"cells": out}

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ConditionalPdfBank":
        cells = {}
        strata = {}
        for entry in data["cells"]:
            key = (float(entry["distance_ft"]), CarriagePair.parse(entry["carriage"]))
            cells[key] = EmpiricalPdf.from_dict(entry["pdf"])
            if entry.get("strata"):
                sub = {}
                for item in entry["strata"]:
                    a1, a2 = item["pose"].split("|")
                    sub[(int(a1), int(a2))] = EmpiricalPdf.from_dict(item["pdf"])
                strata[key] = sub
        return cls(cells, strata)


class ContactDensity:
    """Relative density D(s) of contact opportunities versus separation.

    Only the shape matters: every consumer renormalizes, so D and k*D are
    interchangeable. The uniform-area density D(s) = s models contacts
    scattered uniformly over the plane (annulus area grows linearly with s).
    Custom tables are interpolated linearly and clamped to their endpoint
    values outside the tabulated range.
    """

    def __init__(self, table: Sequence[tuple[float, float]] | None = None):
        self._table = None
        if table is not None:
            pts = sorted((float(s), float(w)) for s, w in table)
            if len(pts) < 2:
                raise ParameterError("a custom density table needs at least two points")
            if any(w < 0 for _, w in pts):
                raise ParameterError("density weights must be nonnegative")
            self._table = (
                np.asarray([s for s, _ in pts]),
                np.asarray([w for _, w in pts]),
            )

    @classmethod
    def uniform_area(cls) -> "ContactDensity":
        return cls()

    @classmethod
    def from_table(cls, table: Sequence[tuple[float, float]]) -> "ContactDensity":
        return cls(table)

    def __call__(self, s):
        arr = np.asarray(s, dtype=np.float64)
        if np.any(arr < 0):
            raise ParameterError("separation must be nonnegative")
        if self._table is None:
            out = arr
        else:
            out = np.interp(arr, self._table[0], self._table[1])
        return float(out) if np.isscalar(s) or arr.ndim == 0 else out


def _grid_for_interval(
    bank: ConditionalPdfBank,
    carriage: CarriagePair,
    s_lo: float,
    s_hi: float,
    max_gap: float | None,
) -> np.ndarray:
    grid = np.asarray(
        [d for d in bank.distances(carriage) if s_lo - _DISTANCE_TOL <= d <= s_hi + _DISTANCE_TOL]
    )
    if grid.size == 0:
        raise CoverageError(
            f"bank has no ranges in [{s_lo:g}, {s_hi:g}] ft for carriage pair {carriage.label()!r}"
        )
    if max_gap is not None:
        gaps = [grid[0] - s_lo, s_hi - grid[-1]]
        gaps.extend(np.diff(grid))
        worst = max(gaps)
        if worst > max_gap + 1e-9:
            raise CoverageError(
                f"range grid for {carriage.label()!r} leaves a {worst:g} ft gap in "
                f"[{s_lo:g}, {s_hi:g}] ft, above the {max_gap:g} ft limit"
            )
    return grid


def range_grid(
    bank: ConditionalPdfBank,
    carriage: CarriagePair,
    s_lo: float,
    s_hi: float,
    max_gap: float | None = None,
) -> np.ndarray:
    """Measured ranges of a carriage pair inside [s_lo, s_hi], coverage-checked."""
    return _grid_for_interval(bank, carriage, s_lo, s_hi, max_gap)


def _trapezoid_weights(grid: np.ndarray) -> np.ndarray:
    """Per-node trapezoidal quadrature weights for an irregular grid."""
    if grid.size == 1:
        return np.asarray([1.0])
    w = np.empty_like(grid, dtype=np.float64)
    w[0] = (grid[1] - grid[0]) / 2.0
    w[-1] = (grid[-1] - grid[-2]) / 2.0
    if grid.size > 2:
        w[1:-1] = (grid[2:] - grid[:-2]) / 2.0
    return w


def mixture_strata(
    bank: ConditionalPdfBank,
    density: ContactDensity,
    carriage: CarriagePair,
    s_lo: float,
    s_hi: float,
    *,
    max_gap: float | None = None,
) -> tuple[tuple[float, EmpiricalPdf], ...]:
    """Decompose a hypothesis mixture into weighted atomic strata.

    Each stratum is one (range, pose-angle) cell of the bank (or a whole
    range cell where pose strata are absent) with weight proportional to
    trapezoid coefficient x D(s) x within-cell count share. Weights sum
    to 1 and the weighted sum of stratum PDFs equals :func:`mixture_pdf`.
    """
    grid = _grid_for_interval(bank, carriage, s_lo, s_hi, max_gap)
    coeffs = _trapezoid_weights(grid) * np.asarray(density(grid), dtype=np.float64)
    total = coeffs.sum()
    if total <= 0:
        raise EstimationError(
            f"density weights vanish on [{s_lo:g}, {s_hi:g}] ft; mixture is undefined"
        )
    out: list[tuple[float, EmpiricalPdf]] = []
    for s, coeff in zip(grid, coeffs / total):
        if coeff == 0.0:
            continue
        sub = bank.strata(s, carriage)
        if sub:
            counts = {pose: p.sample_count for pose, p in sub.items()}
            n_total = sum(counts.values())
            if n_total > 0:
                for pose, p in sorted(sub.items()):
                    share = counts[pose] / n_total
                    if share > 0:
                        out.append((coeff * share, p))
                continue
        out.append((coeff, bank.pdf(s, carriage)))
    return tuple(out)


def mixture_pdf(
    bank: ConditionalPdfBank,
    density: ContactDensity,
    carriage: CarriagePair,
    s_lo: float,
    s_hi: float,
    *,
    max_gap: float | None = None,
) -> EmpiricalPdf:
    """Density-weighted mixture of per-range PDFs over [s_lo, s_hi].

    Approximates the marginal attenuation PDF under the hypothesis that the
    separation lies in the interval, weighting each measured range s by its
    trapezoidal quadrature coefficient times D(s) and renormalizing. A
    single-range interval returns that range's PDF exactly.

    Raises:
        CoverageError: No ranges in the interval, or (with ``max_gap``) a
            grid hole larger than allowed.
    """
    strata = mixture_strata(bank, density, carriage, s_lo, s_hi, max_gap=max_gap)
    weights = np.asarray([w for w, _ in strata])
    pdfs = [p for _, p in strata]
    lo, mat = align_supports(pdfs)
    mixed = weights @ mat
    samples = sum(p.sample_count for p in pdfs)
    return EmpiricalPdf.from_weights(lo, mixed, sample_count=samples)


@dataclass(frozen=True, eq=False)
class HypothesisPdfs:
    """The two attenuation mixtures a detector discriminates between.

    ``h1`` is the too-close mixture (separations in [0, boundary]); ``h0``
    is the far mixture ([boundary, max_range], the BLE audible limit). The
    optional strata decompositions carry the (range, pose) cells each
    mixture was built from, for correlated-look simulation; they are None
    for synthetic or hand-built hypotheses.
    """

    h1: EmpiricalPdf
    h0: EmpiricalPdf
    boundary: float = 6.0
    max_range: float = 30.0
    h1_strata: tuple[tuple[float, EmpiricalPdf], ...] | None = None
    h0_strata: tuple[tuple[float, EmpiricalPdf], ...] | None = None

    def __post_init__(self) -> None:
        if not 0 < self.boundary < self.max_range:
            raise ParameterError(
                f"need 0 < boundary < max_range, got boundary={self.boundary!r}, "
                f"max_range={self.max_range!r}"
            )

    @classmethod
    def from_bank(
        cls,
        bank: ConditionalPdfBank,
        carriage: CarriagePair,
        density: ContactDensity | None = None,
        *,
        boundary: float = 6.0,
        max_range: float = 30.0,
        max_gap: float | None = None,
    ) -> "HypothesisPdfs":
        """Build both hypothesis mixtures for one carriage pair.

        The boundary range sits in both integrals as a shared endpoint, so
        the near and far integrals add up to the full-interval integral.
        """
        density = density or ContactDensity.uniform_area()
        h1 = mixture_pdf(bank, density, carriage, 0.0, boundary, max_gap=max_gap)
        h0 = mixture_pdf(bank, density, carriage, boundary, max_range, max_gap=max_gap)
        return cls(
            h1=h1,
            h0=h0,
            boundary=boundary,
            max_range=max_range,
            h1_strata=mixture_strata(bank, density, carriage, 0.0, boundary, max_gap=max_gap),
            h0_strata=mixture_strata(bank, density, carriage, boundary, max_range, max_gap=max_gap),
        )
