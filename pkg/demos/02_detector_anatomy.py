"""Build the two hypotheses and look inside the optimal detector.

Starting from a synthetic PDF bank with a known log-distance structure,
the script forms the too-close (H1: within 6 ft) and too-far (H0: 6-30 ft)
attenuation mixtures, prints the log-likelihood-ratio nonlinearity they
induce, and shows an M-of-N detector deciding on simulated windows from
both sides of the boundary.

Run from the repository root:

    python3 demos/02_detector_anatomy.py
"""

import numpy as np

from tcftl.densities import (
    ConditionalPdfBank,
    ContactDensity,
    EmpiricalPdf,
    HypothesisPdfs,
)
from tcftl.detectors import MofNDetector, build_nonlinearity, decide_mofn, llr_statistic
from tcftl.measurements import CarriagePair, CarriageState, Holding, Posture
from tcftl.scansim import RecordingPolicy, ScanModel, simulate_window

HAND_PAIR = CarriagePair(
    CarriageState(Posture.STANDING, Holding.HAND),
    CarriageState(Posture.STANDING, Holding.HAND),
)


def build_bank() -> ConditionalPdfBank:
    """Gaussian cells on a 1 dB grid following a log-distance trend."""
    cells = {}
    for d in (3.0, 6.0, 12.0, 20.0, 30.0):
        mu = -52.0 - 20.0 * np.log10(d / 3.0)
        values = np.arange(-110, -29)
        probs = np.exp(-0.5 * ((values - mu) / 5.0) ** 2)
        cells[(d, HAND_PAIR)] = EmpiricalPdf(-110, probs / probs.sum(), sample_count=500)
    return ConditionalPdfBank(cells)


def sparkline(probs: np.ndarray) -> str:
    blocks = " .:-=+*#%@"
    scaled = (probs / probs.max() * (len(blocks) - 1)).astype(int)
    return "".join(blocks[i] for i in scaled)


def main() -> None:
    bank = build_bank()
    density = ContactDensity.uniform_area()
    hyp = HypothesisPdfs.from_bank(bank, HAND_PAIR, density)

    print("== Hypothesis mixtures (contact-density weighted over range) ==")
    values = hyp.h1.values()
    lo, hi = -95, -45
    window = slice(lo - hyp.h1.support_min, hi - hyp.h1.support_min + 1)
    print(f"H1 (too close) : {sparkline(hyp.h1.probabilities[window])}")
    print(f"H0 (too far)   : {sparkline(hyp.h0.probabilities[window])}")
    print(f"                 {lo} dBm {' ' * (hi - lo - 14)} {hi} dBm")
    print(f"H1 mean {hyp.h1.mean():.1f} dBm, H0 mean {hyp.h0.mean():.1f} dBm")

    print("\n== The log-likelihood-ratio nonlinearity ==")
    nonlin = build_nonlinearity(hyp)
    print("rssi ->  z(rssi); positive favors too-close, flat where a density floors")
    for rssi in range(-95, -44, 5):
        z = llr_statistic(nonlin, [rssi])
        bar = "#" * int(round(abs(z) * 3))
        side = bar + " |" if z < 0 else "| " + bar
        print(f"  {rssi:>4d} dBm  {z:+7.3f}  {side:>40s}" if z < 0 else
              f"  {rssi:>4d} dBm  {z:+7.3f}  {' ' * 38}{side}")

    print("\n== An M-of-N detector deciding windows ==")
    detector = MofNDetector(tau=-62, m=3, n=6)
    print(f"declare too-close when >= {detector.m} of {detector.n} looks reach "
          f"{detector.tau} dBm")
    model = ScanModel()
    for distance in (3.0, 6.0, 12.0, 30.0):
        looks = simulate_window(
            model, RecordingPolicy.FIRST_CHIRP, bank, distance, HAND_PAIR,
            seed=[2, int(distance)],
        )
        decision = decide_mofn(detector, [(int(x), HAND_PAIR) for x in looks])
        print(f"  {distance:4g} ft window {looks}  -> {decision.exceed_count} looks over, "
              f"{decision.verdict.value}")


if __name__ == "__main__":
    main()
