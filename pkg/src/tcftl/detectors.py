"""Detector construction: likelihood-ratio nonlinearities and M-of-N rules.

The optimal test between the two hypothesis mixtures applies a memoryless
nonlinearity z(x) = ln p(x|H1) - ln p(x|H0) to each look and sums; since
looks are quantized to integer dB, z is a lookup table. The deployable
approximation replaces the sum with a count: declare when at least m of the
n looks exceed a threshold. A 1-of-n rule is the maximum-value detector.

For carriage-aware (cognitive) operation, :func:`minimax_select` aligns the
per-carriage-state thresholds with integer dB offsets and picks the (tau, m)
whose worst-state false-alarm probability is smallest while every state
still meets the detection-probability target.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from .densities import HypothesisPdfs, align_supports
from .errors import ConfigurationError, InfeasibleError, ParameterError
from .measurements import CarriagePair

#: Default probability floor for empty bins when forming log ratios. An
#: empty bin says "rarer than the data can resolve", not "impossible"; the
#: floor caps how much evidence a single look can contribute, symmetrically
#: for both hypotheses.
DEFAULT_LLR_FLOOR = 1e-4


@dataclass(frozen=True, eq=False)
class Nonlinearity:
    """Tabulated per-look log-likelihood-ratio weights over integer dB.

    Inputs outside the tabulated support clamp to the edge weights: beyond
    the table the ratio is unresolved, and the edge value is the closest
    evidence level actually estimated.
    """

    support_min: int
    weights: np.ndarray
    floor: float

    def __post_init__(self) -> None:
        w = np.array(self.weights, dtype=np.float64, copy=True)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("weights must be a nonempty 1-D array")
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @property
    def support_max(self) -> int:
        return self.support_min + self.weights.size - 1

    def weight(self, x: int) -> float:
        """z(x), clamping x to the tabulated support."""
        idx = min(max(int(x), self.support_min), self.support_max) - self.support_min
        return float(self.weights[idx])

    def weight_many(self, xs: Sequence[int]) -> np.ndarray:
        idx = np.clip(np.asarray(xs, dtype=np.int64), self.support_min, self.support_max)
        return self.weights[idx - self.support_min]

    def table(self) -> dict[int, float]:
        return {int(v): float(w) for v, w in zip(range(self.support_min, self.support_max + 1), self.weights)}


def build_nonlinearity(hypotheses: HypothesisPdfs, floor: float = DEFAULT_LLR_FLOOR) -> Nonlinearity:
    """Tabulate z(x) = ln max(p1(x), floor) - ln max(p0(x), floor).

    The floor regularizes empty bins on both sides of the ratio, bounding
    |z| by ln(1/floor) so one crazy look cannot dominate a window.

    Raises:
        ParameterError: floor outside (0, 1].
    """
    if not 0 < floor <= 1:
        raise ParameterError(f"floor must be in (0, 1], got {floor!r}")
    lo, mat = align_supports([hypotheses.h1, hypotheses.h0])
    p1, p0 = mat[0], mat[1]
    weights = np.log(np.maximum(p1, floor)) - np.log(np.maximum(p0, floor))
    return Nonlinearity(support_min=lo, weights=weights, floor=floor)


def llr_statistic(nonlinearity: Nonlinearity, samples: Sequence[int]) -> float:
    """Window log-likelihood-ratio statistic: the sum of per-look weights.

    Raises:
        ParameterError: ``samples`` is empty.
    """
    arr = np.asarray(samples)
    if arr.size == 0:
        raise ParameterError("cannot form a statistic from zero looks")
    return float(nonlinearity.weight_many(arr).sum())


class Verdict(enum.Enum):
    TOO_CLOSE_TOO_LONG = "too_close_too_long"
    NOT_TOO_CLOSE = "not_too_close"


@dataclass(frozen=True)
class Decision:
    """Outcome of applying a detector to one window of looks."""

    verdict: Verdict
    exceed_count: int


@dataclass(frozen=True)
class MofNDetector:
    """Declare when at least m of the n looks reach the threshold.

    Attributes:
        tau: Threshold in integer dB, inclusive (a look at exactly ``tau``
            exceeds), expressed for the reference state.
        m: Required exceedance count, 1 <= m <= n.
        n: Looks per window.
        offsets: Optional per-carriage-pair corrections, integer dB, added
            to a look before comparing against ``tau``. None means
            carriage-agnostic operation.
        reference: The state whose offset is zero, when offsets are present.
    """

    tau: int
    m: int
    n: int
    offsets: tuple[tuple[CarriagePair, int], ...] | None = None
    reference: CarriagePair | None = None

    def __post_init__(self) -> None:
        if not (isinstance(self.m, int) and isinstance(self.n, int)):
            raise ValueError("m and n must be integers")
        if not 1 <= self.m <= self.n:
            raise ValueError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if not isinstance(self.tau, (int, np.integer)) or isinstance(self.tau, bool):
            raise ValueError(f"tau must be an integer dB value, got {self.tau!r}")
        object.__setattr__(self, "tau", int(self.tau))
        if self.offsets is not None:
            object.__setattr__(self, "offsets", tuple((c, int(o)) for c, o in self.offsets))

    def offset_for(self, carriage: CarriagePair) -> int:
        """The dB correction for a state; raises if offsets are in force but the state is unknown."""
        if self.offsets is None:
            return 0
        for c, off in self.offsets:
            if c == carriage:
                return off
        raise ConfigurationError(
            f"detector has no offset for carriage pair {carriage.label()!r}"
        )

    def effective_tau(self, carriage: CarriagePair) -> int:
        """The threshold as seen by raw looks from ``carriage``."""
        return self.tau - self.offset_for(carriage)

    def to_dict(self) -> dict:
        return {
            "tau": self.tau,
            "m": self.m,
            "n": self.n,
            "offsets": None if self.offsets is None else {c.label(): o for c, o in self.offsets},
            "reference": None if self.reference is None else self.reference.label(),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> "MofNDetector":
        offsets = data.get("offsets")
        return cls(
            tau=int(data["tau"]),
            m=int(data["m"]),
            n=int(data["n"]),
            offsets=None
            if offsets is None
            else tuple((CarriagePair.parse(label), int(off)) for label, off in offsets.items()),
            reference=None if data.get("reference") is None else CarriagePair.parse(data["reference"]),
        )


def decide_mofn(detector: MofNDetector, samples: Sequence[tuple[int, CarriagePair]]) -> Decision:
    """Apply an M-of-N detector to a window of (look, carriage-pair) samples.

    Each look is corrected by its state's offset and compared against the
    threshold inclusively; the window is declared too-close-for-too-long
    when the exceedance count reaches m. Windows shorter than n are decided
    on the looks that exist.

    Raises:
        ParameterError: ``samples`` is empty.
        ConfigurationError: Offsets are in force and a look's carriage pair
            has no entry.
    """
    if len(samples) == 0:
        raise ParameterError("cannot decide on zero looks")
    count = 0
    for rssi, carriage in samples:
        if rssi + detector.offset_for(carriage) >= detector.tau:
            count += 1
    verdict = Verdict.TOO_CLOSE_TOO_LONG if count >= detector.m else Verdict.NOT_TOO_CLOSE
    return Decision(verdict=verdict, exceed_count=count)


def mofn_detection_prob(p, m: int, n: int):
    """Probability that at least m of n independent looks exceed, look prob p.

    Exact finite sum sum_k C(n,k) p^k (1-p)^(n-k) for k = m..n, with exact
    integer binomial coefficients. Broadcasts over array-valued ``p``.

    Raises:
        ParameterError: m, n not integers with 1 <= m <= n, or p outside [0, 1].
    """
    if not (isinstance(m, (int, np.integer)) and isinstance(n, (int, np.integer))):
        raise ParameterError("m and n must be integers")
    if not 1 <= m <= n:
        raise ParameterError(f"need 1 <= m <= n, got m={m}, n={n}")
    arr = np.asarray(p, dtype=np.float64)
    if np.any(arr < 0) or np.any(arr > 1):
        raise ParameterError("p must lie in [0, 1]")
    q = 1.0 - arr
    total = np.zeros_like(arr)
    for k in range(int(m), int(n) + 1):
        total = total + math.comb(int(n), k) * arr**k * q ** (int(n) - k)
    out = np.minimum(total, 1.0)
    return float(out) if np.isscalar(p) or arr.ndim == 0 else out


def binomial_tail_table(p: np.ndarray, n: int) -> np.ndarray:
    """P[count >= m] for every m at once: column j is m = j + 1.

    Same exact terms as :func:`mofn_detection_prob`, organized as one
    (len(p), n) table for threshold sweeps.
    """
    arr = np.asarray(p, dtype=np.float64)
    q = 1.0 - arr
    pmf = np.empty((arr.size, n + 1))
    for k in range(n + 1):
        pmf[:, k] = math.comb(n, k) * arr**k * q ** (n - k)
    tail = np.cumsum(pmf[:, ::-1], axis=1)[:, ::-1]
    return np.minimum(tail[:, 1:], 1.0)


def minimax_select(
    hypotheses: Mapping[CarriagePair, HypothesisPdfs],
    n: int,
    target_pd: float,
) -> MofNDetector:
    """Design a carriage-aware M-of-N detector to a detection target.

    Per candidate m, each state gets the largest integer threshold whose
    M-of-N detection probability still meets ``target_pd`` (largest =
    smallest false-alarm rate at the achieved detection level); the m with
    the smallest worst-state false-alarm probability wins. Ties prefer
    smaller m, then larger reference threshold. Offsets are the integer dB
    shifts aligning each state's threshold with the reference state's — the
    first key in ``hypotheses``, whose offset is 0.

    Raises:
        ParameterError: target_pd outside (0, 1) or n < 1.
        ConfigurationError: ``hypotheses`` is empty.
        InfeasibleError: No (tau, m) reaches the target in every state;
            carries the best achievable worst-state detection probability.
    """
    if not hypotheses:
        raise ConfigurationError("need hypothesis PDFs for at least one carriage state")
    if not isinstance(n, (int, np.integer)) or n < 1:
        raise ParameterError(f"n must be a positive integer, got {n!r}")
    if not 0.0 < target_pd < 1.0:
        raise ParameterError(f"target_pd must lie strictly inside (0, 1), got {target_pd!r}")

    states = list(hypotheses)
    lo = min(min(h.h1.support_min, h.h0.support_min) for h in hypotheses.values()) - 1
    hi = max(max(h.h1.support_max, h.h0.support_max) for h in hypotheses.values()) + 1
    taus = np.arange(lo, hi + 1)
    tail1 = {c: hypotheses[c].h1.tail_geq_many(taus) for c in states}
    tail0 = {c: hypotheses[c].h0.tail_geq_many(taus) for c in states}

    best: tuple[float, int, int, dict[CarriagePair, int]] | None = None
    best_achievable = 0.0
    for m in range(1, n + 1):
        state_taus: dict[CarriagePair, int] = {}
        worst_pfa = 0.0
        feasible = True
        for c in states:
            pd = mofn_detection_prob(tail1[c], m, n)
            meets = np.nonzero(pd >= target_pd)[0]
            best_achievable = max(best_achievable, float(pd.max()))
            if meets.size == 0:
                feasible = False
                break
            idx = int(meets[-1])  # pd is non-increasing in tau: last index = largest tau
            state_taus[c] = int(taus[idx])
            worst_pfa = max(worst_pfa, float(mofn_detection_prob(float(tail0[c][idx]), m, n)))
        if not feasible:
            continue
        tau_ref = state_taus[states[0]]
        # m ascends, and within an m each state's tau is already the largest
        # feasible one, so keeping the first strict improvement realizes the
        # smallest-m-then-largest-tau tie-break.
        if best is None or worst_pfa < best[0]:
            best = (worst_pfa, m, tau_ref, state_taus)
    if best is None:
        raise InfeasibleError(
            f"no (tau, m) reaches detection probability {target_pd:g} in every state; "
            f"best achievable is {best_achievable:g}",
            best=best_achievable,
        )

    _, m, tau_ref, state_taus = best
    offsets = tuple((c, tau_ref - state_taus[c]) for c in states)
    return MofNDetector(tau=tau_ref, m=m, n=n, offsets=offsets, reference=states[0])
