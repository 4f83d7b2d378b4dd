"""Sweep detector families and compare their detection-error tradeoffs.

A two-state synthetic bank (hand carriage, plus a pocket carriage sitting
12 dB deeper) drives four DET sweeps:

  * max-look thresholding (1-of-N),
  * full M-of-N integration,
  * the same M-of-N family evaluated blind to carriage (agnostic),
  * carriage-aware designs with per-state threshold offsets (cognitive).

The script prints P_D at reference false-alarm rates, shows how integration
depth N moves the curve, and writes every curve as CSV + SVG under
``demos/output/``. Run from the repository root:

    python3 demos/03_det_curves.py
"""

import json
import pathlib
import subprocess
import sys

import numpy as np

from tcftl.densities import (
    ConditionalPdfBank,
    ContactDensity,
    EmpiricalPdf,
    HypothesisPdfs,
)
from tcftl.evaluation import DetMode, det_curve
from tcftl.measurements import CarriagePair, CarriageState, Holding, Posture

OUTPUT = pathlib.Path(__file__).parent / "output"
HAND_PAIR = CarriagePair(
    CarriageState(Posture.STANDING, Holding.HAND),
    CarriageState(Posture.STANDING, Holding.HAND),
)
POCKET_PAIR = CarriagePair(
    CarriageState(Posture.SITTING, Holding.FRONT_PANTS_POCKET),
    CarriageState(Posture.SITTING, Holding.FRONT_PANTS_POCKET),
)


def build_bank() -> ConditionalPdfBank:
    cells = {}
    for pair, shift in ((HAND_PAIR, 0.0), (POCKET_PAIR, -12.0)):
        for d in (3.0, 6.0, 12.0, 20.0, 30.0):
            mu = -52.0 - 20.0 * np.log10(d / 3.0) + shift
            values = np.arange(-115, -29)
            probs = np.exp(-0.5 * ((values - mu) / 5.0) ** 2)
            cells[(d, pair)] = EmpiricalPdf(-115, probs / probs.sum(), sample_count=500)
    return ConditionalPdfBank(cells)


def main() -> None:
    OUTPUT.mkdir(exist_ok=True)
    bank = build_bank()
    density = ContactDensity.uniform_area()
    hyp = {
        pair: HypothesisPdfs.from_bank(bank, pair, density)
        for pair in (HAND_PAIR, POCKET_PAIR)
    }

    print("== Detector families at N = 6 looks ==")
    curves = {mode: det_curve(hyp, 6, mode) for mode in DetMode}
    refs = (0.001, 0.01, 0.05, 0.1, 0.3)
    header = "".join(f"  P_D@{r:g}" for r in refs)
    print(f"{'family':<12s}{header}")
    for mode, curve in curves.items():
        cells = "".join(f"  {curve.pd_at(r):7.3f}" for r in refs)
        print(f"{mode.value:<12s}{cells}")
    print("(max-look = 1-of-N; cognitive applies per-carriage threshold offsets)")

    print("\n== Integration depth: M-of-N at increasing N ==")
    print(f"{'N':>4s}" + "".join(f"  P_D@{r:g}" for r in refs))
    for n in (6, 12, 24, 48):
        curve = det_curve(hyp, n, DetMode.MOFN)
        print(f"{n:>4d}" + "".join(f"  {curve.pd_at(r):7.3f}" for r in refs))

    print("\n== Rendering curves through the command line ==")
    sys.stdout.flush()
    bank_path = OUTPUT / "det_demo_bank.json"
    bank_path.write_text(json.dumps(bank.to_json_dict()))
    for mode in ("one_of_n", "mofn", "agnostic", "cognitive"):
        cmd = [
            sys.executable, "-m", "tcftl.cli", "det",
            "--bank", str(bank_path), "--n", "6", "--mode", mode,
            "--out-dir", str(OUTPUT), "--svg",
        ]
        subprocess.run(cmd, check=True)
        print(f"  wrote {OUTPUT / f'det_{mode}_n6'}.{{csv,json,svg}}")


if __name__ == "__main__":
    main()
