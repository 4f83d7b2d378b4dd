"""Detector performance evaluation: DET curves, contact integrals, FDR.

Two complementary views of performance live here. The hypothesis-level view
sweeps detector parameters against the near/far attenuation mixtures and
reports (P_FA, P_D) operating points — a DET curve. The range-resolved view
weights per-range detection probabilities by the contact density to get
expected true contacts TC (separations inside the boundary) and false
contacts FC (outside), whose ratio FC/(TC+FC) is the false-discovery rate a
health authority would actually experience.

Four sweep modes:

* ``MOFN`` — sweep threshold and count jointly, keep the envelope.
* ``ONE_OF_N`` — threshold-only sweep of the maximum-value detector (m=1).
* ``AGNOSTIC`` — one shared (tau, m) applied across carriage states,
  performance averaged under a carriage prior.
* ``COGNITIVE`` — carriage-aware detectors from :func:`minimax_select`,
  swept over detection targets.

DET curves publish P_FA at a fixed bucket resolution (1e-3 by default):
each bucket keeps its best P_D and queries are answered at bucket
granularity, so curves built from nested candidate sets compare cleanly.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Iterable, Mapping, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .densities import (
    ConditionalPdfBank,
    ContactDensity,
    EmpiricalPdf,
    HypothesisPdfs,
    range_grid,
)
from .detectors import (
    MofNDetector,
    binomial_tail_table,
    minimax_select,
    mofn_detection_prob,
)
from .errors import ConfigurationError, InfeasibleError, ParameterError
from .measurements import CarriagePair
from .scansim import (
    Correlation,
    RecordingPolicy,
    SamplingModel,
    ScanModel,
    cell_strata,
    draw_windows,
)

DEFAULT_PFA_BUCKET = 1e-3
DEFAULT_TRIALS = 20000


class DetMode(enum.Enum):
    MOFN = "mofn"
    ONE_OF_N = "one_of_n"
    AGNOSTIC = "agnostic"
    COGNITIVE = "cognitive"


class CarriagePrior:
    """A probability vector over carriage pairs.

    Weights must be nonnegative and sum to 1 within 1e-9; use
    :meth:`from_weights` to normalize arbitrary nonnegative weights.
    """

    def __init__(self, weights: Mapping[CarriagePair, float]):
        if not weights:
            raise ConfigurationError("a carriage prior needs at least one pair")
        vals = np.asarray(list(weights.values()), dtype=np.float64)
        if np.any(vals < 0):
            raise ParameterError("prior weights must be nonnegative")
        if abs(float(vals.sum()) - 1.0) > 1e-9:
            raise ParameterError(
                f"prior weights must sum to 1 within 1e-9 (got {float(vals.sum())!r}); "
                "use CarriagePrior.from_weights to normalize"
            )
        self._weights = {c: float(w) for c, w in weights.items()}

    @property
    def pairs(self) -> tuple[CarriagePair, ...]:
        return tuple(self._weights)

    def prob(self, carriage: CarriagePair) -> float:
        try:
            return self._weights[carriage]
        except KeyError:
            raise ConfigurationError(
                f"prior has no weight for carriage pair {carriage.label()!r}"
            ) from None

    def items(self) -> tuple[tuple[CarriagePair, float], ...]:
        return tuple(self._weights.items())

    @classmethod
    def uniform(cls, pairs: Sequence[CarriagePair]) -> "CarriagePrior":
        pairs = list(pairs)
        if not pairs:
            raise ConfigurationError("a carriage prior needs at least one pair")
        return cls({c: 1.0 / len(pairs) for c in pairs})

    @classmethod
    def from_weights(cls, weights: Mapping[CarriagePair, float]) -> "CarriagePrior":
        vals = np.asarray(list(weights.values()), dtype=np.float64)
        if np.any(vals < 0) or float(vals.sum()) <= 0:
            raise ParameterError("weights must be nonnegative and not all zero")
        total = float(vals.sum())
        return cls({c: float(w) / total for c, w in weights.items()})

    @classmethod
    def from_marginals(
        cls,
        pairs: Sequence[CarriagePair],
        posture_probs: Mapping,
        holding_probs: Mapping,
    ) -> "CarriagePrior":
        """Pair weights from independent per-user posture/holding marginals.

        Each pair's weight is the product over both users of
        posture_probs[posture] * holding_probs[holding], renormalized over
        the supplied pairs. Useful for priors stated as marginals, e.g.
        "30% of people carry in hand, 40% are standing".
        """
        weights = {}
        for pair in pairs:
            w = 1.0
            for state in (pair.user1, pair.user2):
                try:
                    w *= float(posture_probs[state.posture]) * float(holding_probs[state.holding])
                except KeyError as exc:
                    raise ConfigurationError(f"marginals missing a probability for {exc}") from None
            weights[pair] = w
        return cls.from_weights(weights)

    def to_dict(self) -> dict:
        return {c.label(): w for c, w in self._weights.items()}

    @classmethod
    def from_dict(cls, data: Mapping[str, float]) -> "CarriagePrior":
        return cls({CarriagePair.parse(label): float(w) for label, w in data.items()})


@dataclass(frozen=True)
class DetPoint:
    p_fa: float
    p_d: float
    tau: int
    m: int


@dataclass(frozen=True)
class DetCurve:
    """An envelope of operating points, P_FA resolved at ``pfa_bucket``."""

    mode: DetMode
    n: int
    points: tuple[DetPoint, ...]
    pfa_bucket: float = DEFAULT_PFA_BUCKET

    def pd_at(self, p_fa: float) -> float:
        """Best P_D among points whose P_FA bucket does not exceed p_fa's.

        Queries are answered at the curve's bucket resolution; below every
        point the detection probability is 0.
        """
        bq = _bucket(p_fa, self.pfa_bucket)
        best = 0.0
        for pt in self.points:
            if _bucket(pt.p_fa, self.pfa_bucket) <= bq:
                best = max(best, pt.p_d)
        return best

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "n": self.n,
            "pfa_bucket": self.pfa_bucket,
            "points": [
                {"p_fa": pt.p_fa, "p_d": pt.p_d, "tau": pt.tau, "m": pt.m} for pt in self.points
            ],
        }


@dataclass(frozen=True)
class FdrPoint:
    p_d: float
    fdr: float
    detector: MofNDetector


@dataclass(frozen=True)
class FdrCurve:
    """Overall detection probability versus false-discovery rate."""

    mode: DetMode
    n: int
    points: tuple[FdrPoint, ...]

    def pd_at_fdr(self, target: float) -> float | None:
        """Best attainable P_D at FDR <= target, interpolating between points.

        Returns None when no operating point (or interpolation between
        adjacent points) meets the target.
        """
        best: float | None = None
        for pt in self.points:
            if pt.fdr <= target + 1e-12:
                best = pt.p_d if best is None else max(best, pt.p_d)
        for a, b in zip(self.points, self.points[1:]):
            lo, hi = sorted((a.fdr, b.fdr))
            if lo <= target <= hi and a.fdr != b.fdr:
                frac = (target - a.fdr) / (b.fdr - a.fdr)
                cand = a.p_d + frac * (b.p_d - a.p_d)
                best = cand if best is None else max(best, cand)
        return best

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "n": self.n,
            "points": [
                {"p_d": pt.p_d, "fdr": pt.fdr, "detector": pt.detector.to_dict()}
                for pt in self.points
            ],
        }


@dataclass(frozen=True)
class McResult:
    """A Monte Carlo probability estimate with its binomial standard error."""

    p_d: float
    std_err: float
    trials: int


@dataclass(frozen=True)
class SweepResult:
    """Detection probability of one (scans x samples-per-scan) configuration."""

    n_scans: int
    samples_per_scan: int
    n_looks: int
    p_d: float | None
    feasible: bool


# --------------------------------------------------------------------------
# Internals: detection-probability tables
# --------------------------------------------------------------------------


def _bucket(p: float, width: float) -> int:
    return int(math.floor(p / width + 1e-9))


def _resolve_scan_model(n: int, sampling: SamplingModel, scan_model: ScanModel | None) -> ScanModel:
    rps = sampling.recorded_per_scan()
    if n % rps != 0:
        raise ConfigurationError(
            f"n={n} looks is not a whole number of scans at {rps} recorded per scan"
        )
    scans = n // rps
    if scan_model is None:
        return ScanModel(
            scans_per_window=scans,
            scan_interval_s=150.0,
            window_s=max(900.0, scans * 150.0),
        )
    if scan_model.scans_per_window * rps != n:
        raise ConfigurationError(
            f"scan model yields {scan_model.scans_per_window * rps} looks per window, "
            f"but the detector uses n={n}"
        )
    return scan_model


def _mc_count_hist(values: np.ndarray, taus: np.ndarray) -> np.ndarray:
    """Histogram of per-window exceedance counts, one row per threshold.

    Returns an integer (len(taus), looks+1) array: entry [t, k] counts the
    windows with exactly k looks >= taus[t].
    """
    n_windows, looks = values.shape
    t0, n_taus = int(taus[0]), taus.size
    hist = np.zeros((n_taus, looks + 1), dtype=np.int64)
    chunk = 8192
    for start in range(0, n_windows, chunk):
        block = values[start : start + chunk]
        w = block.shape[0]
        idx = np.clip(block - t0, 0, n_taus - 1)
        occ = np.bincount(
            (np.arange(w)[:, None] * n_taus + idx).ravel(), minlength=w * n_taus
        ).reshape(w, n_taus)
        geq = occ[:, ::-1].cumsum(axis=1)[:, ::-1]
        for t in range(n_taus):
            hist[t] += np.bincount(geq[:, t], minlength=looks + 1)
    return hist


def _detection_table(
    pdf: EmpiricalPdf,
    strata: Sequence[tuple[float, EmpiricalPdf]],
    taus: np.ndarray,
    n: int,
    sampling: SamplingModel | None,
    scan_model: ScanModel | None,
    trials: int,
    seed,
) -> np.ndarray:
    """P[at least m of n looks >= tau] for every (tau, m); column j is m=j+1.

    Independent looks use the exact binomial closed form (with the per-look
    exceedance transformed for MIN_ATTENUATION's max-of-chirps looks);
    correlated looks are Monte Carlo over simulated windows.
    """
    if sampling is None:
        return binomial_tail_table(pdf.tail_geq_many(taus), n)
    if sampling.correlation is Correlation.INDEPENDENT:
        model = _resolve_scan_model(n, sampling, scan_model)
        t = pdf.tail_geq_many(taus)
        if sampling.policy is RecordingPolicy.MIN_ATTENUATION:
            t = 1.0 - (1.0 - t) ** model.chirps_per_scan
        return binomial_tail_table(t, n)
    model = _resolve_scan_model(n, sampling, scan_model)
    values = draw_windows(strata, model, sampling, trials, seed)
    hist = _mc_count_hist(values, taus)
    tail = hist[:, ::-1].cumsum(axis=1)[:, ::-1][:, 1:]
    return tail.astype(np.float64) / float(trials)


def _table_lookup(table: np.ndarray, taus: np.ndarray, tau_eff: int, m: int) -> float:
    idx = int(np.clip(tau_eff - int(taus[0]), 0, taus.size - 1))
    return float(table[idx, m - 1])


# --------------------------------------------------------------------------
# Range-resolved detection probability
# --------------------------------------------------------------------------


def pd_at_range(
    detector: MofNDetector,
    bank: ConditionalPdfBank,
    distance_ft: float,
    carriage: CarriagePair,
    sampling: SamplingModel | None = None,
    *,
    scan_model: ScanModel | None = None,
    trials: int = DEFAULT_TRIALS,
    seed=0,
) -> float:
    """Detection probability of a window at a fixed range and carriage pair.

    With independent looks (``sampling`` None or an independent sampling
    model) this is the exact binomial tail at the state's effective
    threshold. Correlated looks are estimated by Monte Carlo — use
    :func:`mc_detection_prob` directly when the standard error matters.
    """
    if sampling is not None and sampling.correlation is Correlation.WITHIN_SCAN_CORRELATED:
        return mc_detection_prob(
            detector, bank, distance_ft, carriage, sampling,
            scan_model=scan_model, trials=trials, seed=seed,
        ).p_d
    pdf = bank.pdf(distance_ft, carriage)
    tau_eff = detector.effective_tau(carriage)
    t = pdf.tail_geq(tau_eff)
    if sampling is not None and sampling.policy is RecordingPolicy.MIN_ATTENUATION:
        model = _resolve_scan_model(detector.n, sampling, scan_model)
        t = 1.0 - (1.0 - t) ** model.chirps_per_scan
    return mofn_detection_prob(t, detector.m, detector.n)


def mc_detection_prob(
    detector: MofNDetector,
    bank: ConditionalPdfBank,
    distance_ft: float,
    carriage: CarriagePair,
    sampling: SamplingModel,
    *,
    scan_model: ScanModel | None = None,
    trials: int = DEFAULT_TRIALS,
    seed=0,
) -> McResult:
    """Monte Carlo detection probability under a sampling model, with its
    binomial standard error sqrt(p(1-p)/trials)."""
    if trials < 1:
        raise ParameterError(f"trials must be positive, got {trials!r}")
    model = _resolve_scan_model(detector.n, sampling, scan_model)
    strata = cell_strata(bank, distance_ft, carriage)
    values = draw_windows(strata, model, sampling, trials, seed)
    tau_eff = detector.effective_tau(carriage)
    hits = (values >= tau_eff).sum(axis=1) >= detector.m
    p = float(hits.mean())
    return McResult(p_d=p, std_err=math.sqrt(p * (1.0 - p) / trials), trials=trials)


# --------------------------------------------------------------------------
# DET curves
# --------------------------------------------------------------------------


def _envelope(
    raw: Iterable[tuple[float, float, int, int]], bucket: float
) -> tuple[DetPoint, ...]:
    """Best P_D per P_FA bucket, then a monotone staircase in P_FA."""
    best_by_bucket: dict[int, tuple[tuple, tuple]] = {}
    for p_fa, p_d, tau, m in raw:
        b = _bucket(p_fa, bucket)
        rank = (p_d, -p_fa, -m, tau)
        cur = best_by_bucket.get(b)
        if cur is None or rank > cur[0]:
            best_by_bucket[b] = (rank, (p_fa, p_d, tau, m))
    out: list[DetPoint] = []
    best_pd = -1.0
    for b in sorted(best_by_bucket):
        p_fa, p_d, tau, m = best_by_bucket[b][1]
        if p_d > best_pd:
            out.append(DetPoint(p_fa=p_fa, p_d=p_d, tau=int(tau), m=int(m)))
            best_pd = p_d
    return tuple(out)


def _normalize_hypotheses(
    hypotheses: HypothesisPdfs | Mapping[CarriagePair, HypothesisPdfs],
    prior: CarriagePrior | None,
    mode: DetMode,
):
    """Resolve (states, weights, per-state hypotheses) for any calling shape."""
    if isinstance(hypotheses, HypothesisPdfs):
        if mode is DetMode.COGNITIVE:
            raise ConfigurationError("cognitive mode needs per-carriage-pair hypotheses")
        if prior is not None:
            raise ConfigurationError("a prior needs per-carriage-pair hypotheses")
        return [None], {None: 1.0}, {None: hypotheses}
    if not hypotheses:
        raise ConfigurationError("need hypotheses for at least one carriage state")
    if prior is None:
        prior = CarriagePrior.uniform(list(hypotheses))
    states = list(prior.pairs)
    missing = [c for c in states if c not in hypotheses]
    if missing:
        raise ConfigurationError(
            "prior names carriage pairs without hypotheses: "
            + ", ".join(c.label() for c in missing)
        )
    return states, {c: prior.prob(c) for c in states}, dict(hypotheses)


def _hyp_strata(h: HypothesisPdfs, near: bool) -> tuple[tuple[float, EmpiricalPdf], ...]:
    strata = h.h1_strata if near else h.h0_strata
    if strata:
        return strata
    return ((1.0, h.h1 if near else h.h0),)


def _map_ordered(fn, keys, threads: int | None):
    """Apply fn over keys, optionally thread-parallel, reducing in key order."""
    if threads is not None and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return dict(zip(keys, pool.map(fn, keys)))
    return {k: fn(k) for k in keys}


def det_curve(
    hypotheses: HypothesisPdfs | Mapping[CarriagePair, HypothesisPdfs],
    n: int,
    mode: DetMode = DetMode.MOFN,
    sampling: SamplingModel | None = None,
    *,
    prior: CarriagePrior | None = None,
    scan_model: ScanModel | None = None,
    trials: int = DEFAULT_TRIALS,
    seed=0,
    threads: int | None = None,
    pfa_bucket: float = DEFAULT_PFA_BUCKET,
    targets: Sequence[float] | None = None,
) -> DetCurve:
    """Sweep detector operating points against hypothesis mixtures.

    Args:
        hypotheses: One :class:`HypothesisPdfs`, or a mapping from carriage
            pair to its hypotheses (required for AGNOSTIC with a prior and
            for COGNITIVE).
        n: Looks per window.
        mode: Which detector family to sweep.
        sampling: None for independent looks; a :class:`SamplingModel` for
            policy- and correlation-aware evaluation.
        prior: Carriage prior for averaging across states (uniform over the
            mapping's keys by default).
        targets: COGNITIVE only — detection-probability targets to design
            at; defaults to an even grid over (0, 1).
        threads: Worker threads for the per-state Monte Carlo tables;
            results are identical for any thread count.

    Returns:
        The envelope :class:`DetCurve` (P_D non-decreasing in P_FA, best
        point per P_FA bucket).
    """
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    states, weights, hyp = _normalize_hypotheses(hypotheses, prior, mode)

    lo = min(min(h.h1.support_min, h.h0.support_min) for h in hyp.values()) - 1
    hi = max(max(h.h1.support_max, h.h0.support_max) for h in hyp.values()) + 1
    taus = np.arange(lo, hi + 1)

    cells = [(c, near) for c in states for near in (True, False)]

    def build(cell):
        c, near = cell
        pdf = hyp[c].h1 if near else hyp[c].h0
        cell_seed = _extend_seed(seed, [1, cells.index(cell)])
        return _detection_table(
            pdf, _hyp_strata(hyp[c], near), taus, int(n), sampling, scan_model, trials, cell_seed
        )

    tables = _map_ordered(build, cells, threads)
    t1 = {c: tables[(c, True)] for c in states}
    t0 = {c: tables[(c, False)] for c in states}

    raw: list[tuple[float, float, int, int]] = []
    if mode in (DetMode.MOFN, DetMode.AGNOSTIC, DetMode.ONE_OF_N):
        pd_avg = sum(weights[c] * t1[c] for c in states)
        pfa_avg = sum(weights[c] * t0[c] for c in states)
        m_values = (1,) if mode is DetMode.ONE_OF_N else tuple(range(1, int(n) + 1))
        for j in m_values:
            col = j - 1
            for t in range(taus.size):
                raw.append((float(pfa_avg[t, col]), float(pd_avg[t, col]), int(taus[t]), j))
    elif mode is DetMode.COGNITIVE:
        if targets is None:
            targets = np.linspace(0.02, 0.98, 49)
        for target in targets:
            try:
                det = minimax_select({c: hyp[c] for c in states}, int(n), float(target))
            except InfeasibleError:
                continue
            p_d = 0.0
            p_fa = 0.0
            for c in states:
                tau_eff = det.effective_tau(c)
                p_d += weights[c] * _table_lookup(t1[c], taus, tau_eff, det.m)
                p_fa += weights[c] * _table_lookup(t0[c], taus, tau_eff, det.m)
            raw.append((p_fa, p_d, det.tau, det.m))
    else:  # pragma: no cover - enum is exhaustive
        raise ConfigurationError(f"unknown mode {mode!r}")

    return DetCurve(mode=mode, n=int(n), points=_envelope(raw, pfa_bucket), pfa_bucket=pfa_bucket)


def _extend_seed(seed, extra: list[int]):
    if isinstance(seed, (int, np.integer)):
        return [int(seed)] + extra
    return [int(s) for s in seed] + extra


# --------------------------------------------------------------------------
# Expected contacts and FDR
# --------------------------------------------------------------------------


def fdr(tc: float, fc: float) -> float:
    """False-discovery rate FC/(TC+FC).

    Raises:
        ParameterError: Negative inputs, or TC+FC = 0 (FDR is undefined
            when nothing is declared).
    """
    if tc < 0 or fc < 0:
        raise ParameterError(f"contact counts must be nonnegative, got tc={tc!r}, fc={fc!r}")
    if tc + fc == 0:
        raise ParameterError("FDR is undefined when no contacts are declared")
    return fc / (tc + fc)


def expected_contacts(
    detector: MofNDetector,
    bank: ConditionalPdfBank,
    density: ContactDensity,
    carriage: CarriagePair,
    s_lo: float,
    s_hi: float,
    sampling: SamplingModel | None = None,
    *,
    scan_model: ScanModel | None = None,
    max_gap: float | None = None,
    trials: int = DEFAULT_TRIALS,
    seed=0,
) -> float:
    """Expected declared contacts over a range interval, up to density scale.

    Integrates D(s) * P_D(s) over the bank's measured grid inside
    [s_lo, s_hi] with the trapezoidal rule. The density is used unscaled, so
    values are comparable only across calls sharing a density.
    """
    grid = range_grid(bank, carriage, s_lo, s_hi, max_gap)
    pds = np.asarray(
        [
            pd_at_range(
                detector, bank, float(s), carriage, sampling,
                scan_model=scan_model, trials=trials, seed=_extend_seed(seed, [i]),
            )
            for i, s in enumerate(grid)
        ]
    )
    dens = np.asarray(density(grid), dtype=np.float64)
    return float(np.trapezoid(dens * pds, grid))


def _operating_detectors(
    hyp: Mapping[CarriagePair, HypothesisPdfs],
    n: int,
    mode: DetMode,
    targets: Sequence[float] | None,
) -> list[MofNDetector]:
    """The full swept detector family for a mode, offsets included for COGNITIVE.

    This is the sweep itself, not the DET envelope: a point dominated on the
    hypothesis-mixture (P_FA, P_D) plane can still be the best choice on the
    range-resolved FDR plane, so no envelope pruning happens here.
    """
    if mode is DetMode.COGNITIVE:
        if targets is None:
            targets = np.linspace(0.02, 0.98, 49)
        detectors = []
        for target in targets:
            try:
                detectors.append(minimax_select(dict(hyp), n, float(target)))
            except InfeasibleError:
                continue
        seen = set()
        unique = []
        for det in detectors:
            key = (det.tau, det.m, det.offsets)
            if key not in seen:
                seen.add(key)
                unique.append(det)
        return unique
    lo = min(min(h.h1.support_min, h.h0.support_min) for h in hyp.values()) - 1
    hi = max(max(h.h1.support_max, h.h0.support_max) for h in hyp.values()) + 1
    m_values = (1,) if mode is DetMode.ONE_OF_N else tuple(range(1, n + 1))
    return [
        MofNDetector(tau=tau, m=m, n=n)
        for m in m_values
        for tau in range(lo, hi + 1)
    ]


def fdr_curve(
    bank: ConditionalPdfBank,
    density: ContactDensity,
    prior: CarriagePrior,
    n: int,
    mode: DetMode = DetMode.MOFN,
    sampling: SamplingModel | None = None,
    *,
    boundary: float = 6.0,
    max_range: float = 30.0,
    max_gap: float | None = None,
    scan_model: ScanModel | None = None,
    trials: int = DEFAULT_TRIALS,
    seed=0,
    threads: int | None = None,
    targets: Sequence[float] | None = None,
) -> FdrCurve:
    """Sweep operating points and score each by range-resolved TC/FC.

    For each candidate detector from the mode's DET sweep, true contacts TC
    integrate D(s) * P_D(s) over ranges inside the boundary and false
    contacts FC over ranges beyond it, both prior-averaged across carriage
    pairs. The point's overall detection probability is TC normalized by the
    perfect-detector value (P_D = 1 everywhere), and its FDR is FC/(TC+FC).
    Points are sorted by overall P_D; operating points declaring nothing at
    all are dropped (their FDR is undefined).
    """
    states = list(prior.pairs)
    hyp = {
        c: HypothesisPdfs.from_bank(
            bank, c, density, boundary=boundary, max_range=max_range, max_gap=max_gap
        )
        for c in states
    }
    detectors = _operating_detectors(hyp, int(n), mode, targets)

    near_grid = {c: range_grid(bank, c, 0.0, boundary, max_gap) for c in states}
    far_grid = {c: range_grid(bank, c, boundary, max_range, max_gap) for c in states}

    # Detection-probability tables per (state, range) cell, shared by every
    # candidate detector. Cell seeds depend only on the cell index, so any
    # thread count reproduces the same numbers.
    cell_keys = []
    for c in states:
        ranges = sorted(set(near_grid[c].tolist()) | set(far_grid[c].tolist()))
        cell_keys.extend((c, s) for s in ranges)

    def build(cell):
        c, s = cell
        pdf = bank.pdf(s, c)
        taus = np.arange(pdf.support_min - 1, pdf.support_max + 2)
        table = _detection_table(
            pdf, cell_strata(bank, s, c), taus, int(n), sampling, scan_model,
            trials, _extend_seed(seed, [3, cell_keys.index(cell)]),
        )
        return taus, table

    tables = _map_ordered(build, cell_keys, threads)

    def cell_pd(det: MofNDetector, c: CarriagePair, s: float) -> float:
        taus, table = tables[(c, s)]
        return _table_lookup(table, taus, det.effective_tau(c), det.m)

    tc_max = sum(
        prior.prob(c) * float(np.trapezoid(np.asarray(density(near_grid[c])), near_grid[c]))
        for c in states
    )
    if tc_max <= 0:
        raise ParameterError("contact density integrates to zero inside the boundary")

    points = []
    for det in detectors:
        tc = 0.0
        fc = 0.0
        for c in states:
            near = near_grid[c]
            far = far_grid[c]
            pd_near = np.asarray([cell_pd(det, c, s) for s in near])
            pd_far = np.asarray([cell_pd(det, c, s) for s in far])
            tc += prior.prob(c) * float(np.trapezoid(np.asarray(density(near)) * pd_near, near))
            fc += prior.prob(c) * float(np.trapezoid(np.asarray(density(far)) * pd_far, far))
        if tc + fc <= 0:
            continue
        points.append(FdrPoint(p_d=tc / tc_max, fdr=fdr(tc, fc), detector=det))

    points.sort(key=lambda pt: (pt.p_d, pt.fdr))
    return FdrCurve(mode=mode, n=int(n), points=tuple(points))


def look_sweep(
    bank: ConditionalPdfBank,
    density: ContactDensity,
    prior: CarriagePrior,
    configs: Sequence[tuple[int, int]],
    fdr_target: float,
    mode: DetMode = DetMode.MOFN,
    *,
    boundary: float = 6.0,
    max_range: float = 30.0,
    max_gap: float | None = None,
    trials: int = DEFAULT_TRIALS,
    seed=0,
    threads: int | None = None,
    targets: Sequence[float] | None = None,
) -> tuple[SweepResult, ...]:
    """Best P_D at an FDR budget across (scans, samples-per-scan) configurations.

    Single-sample configurations use independent scan looks; multi-sample
    configurations use ALL_CHIRPS with within-scan correlation. A
    configuration whose FDR curve never meets the target gets an infeasible
    marker (``p_d=None``) rather than an error.
    """
    if not 0 < fdr_target < 1:
        raise ParameterError(f"fdr_target must lie in (0, 1), got {fdr_target!r}")
    results = []
    for i, (scans, spp) in enumerate(configs):
        if scans < 1 or spp < 1:
            raise ParameterError(f"configuration ({scans}, {spp}) must be positive integers")
        if spp > 1:
            sampling = SamplingModel(
                RecordingPolicy.ALL_CHIRPS, spp, Correlation.WITHIN_SCAN_CORRELATED
            )
        else:
            sampling = SamplingModel(RecordingPolicy.FIRST_CHIRP, 1, Correlation.INDEPENDENT)
        curve = fdr_curve(
            bank, density, prior, scans * spp, mode, sampling,
            boundary=boundary, max_range=max_range, max_gap=max_gap,
            trials=trials, seed=_extend_seed(seed, [4, i]), threads=threads, targets=targets,
        )
        p_d = curve.pd_at_fdr(fdr_target)
        results.append(
            SweepResult(
                n_scans=scans, samples_per_scan=spp, n_looks=scans * spp,
                p_d=p_d, feasible=p_d is not None,
            )
        )
    return tuple(results)
