"""Walk a raw RSSI campaign through ingestion, augmentation, and estimation.

The script fabricates a small measurement campaign the way a range test
would record it -- two phones at fixed separations, user 1 rotated through
pose angles, a few rows corrupted on purpose -- then runs the full data
pipeline:

    ingest -> normalize tx power -> synthesize missing poses
           -> extend range -> estimate the conditional PDF bank

Artifacts land in ``demos/output/``. Run from the repository root:

    python3 demos/01_measurement_pipeline.py
"""

import io
import json
import pathlib

import numpy as np

from tcftl.densities import ConditionalPdfBank
from tcftl.measurements import (
    CarriageState,
    Holding,
    Posture,
    estimate_bulk_deltas,
    extend_range,
    ingest_csv,
    normalize_tx,
    synthesize_pose,
)

OUTPUT = pathlib.Path(__file__).parent / "output"
ANGLES = (0, 45, 90, 135, 180, 225, 270, 315)
HAND = CarriageState(Posture.STANDING, Holding.HAND)
POCKET = CarriageState(Posture.STANDING, Holding.FRONT_PANTS_POCKET)


def fabricate_campaign(path: pathlib.Path) -> None:
    """Write a raw campaign CSV with a log-distance trend plus pose effects."""
    rng = np.random.default_rng(7)
    rows = [
        "rssi,tx_power,distance_ft,carriage_user1,carriage_user2,"
        "pose_angle_user1,pose_angle_user2,channel,synthetic"
    ]
    for label, shift, tx in (
        ("standing/hand", 0.0, 12),
        ("standing/front pants pocket", -12.0, 8),
    ):
        for d in (3.0, 6.0, 12.0, 15.0):
            mu = -52.0 - 20.0 * np.log10(d / 3.0) + shift
            for angle in ANGLES:
                # Body blockage deepens as the carrier turns away.
                bias = -7.0 * (1.0 - np.cos(np.radians(angle))) / 2.0
                for r in rng.normal(mu + bias, 4.0, size=12):
                    rows.append(
                        f"{int(round(r))},{tx},{d:g},{label},{label},{angle},0,unknown,0"
                    )
    # Rows ingestion should reject, and one it should censor.
    rows.append("not-a-number,12,3,standing/hand,standing/hand,0,0,unknown,0")
    rows.append("-60,12,-3,standing/hand,standing/hand,0,0,unknown,0")
    rows.append("-117,12,15,standing/hand,standing/hand,0,0,unknown,0")
    path.write_text("\n".join(rows) + "\n")


def main() -> None:
    OUTPUT.mkdir(exist_ok=True)
    raw = OUTPUT / "campaign_raw.csv"
    fabricate_campaign(raw)

    print("== Ingest ==")
    report = io.StringIO()
    dataset = ingest_csv(str(raw), report_stream=report)
    print(report.getvalue().rstrip())

    print("\n== Normalize to a shared transmit power ==")
    txs = sorted({s.tx_power for s in dataset})
    dataset = normalize_tx(dataset)
    ref = dataset.samples[0].tx_power
    print(f"transmit powers {txs} dBm -> all samples re-referenced to {ref} dBm")

    print("\n== Per-pose bulk attenuation deltas ==")
    deltas = {}
    for state in (HAND, POCKET):
        for angle, delta in estimate_bulk_deltas(dataset, state).items():
            deltas[(state, angle)] = delta
    print(f"{'angle':>6s} {'hand':>8s} {'pocket':>8s}   (dB relative to facing)")
    for angle in ANGLES:
        print(f"{angle:>6d} {deltas[(HAND, angle)]:+8.2f} {deltas[(POCKET, angle)]:+8.2f}")

    print("\n== Synthesize unmeasured user-2 poses ==")
    before = len(dataset)
    dataset = synthesize_pose(dataset, deltas)
    print(f"{before} measured samples -> {len(dataset)} after pose synthesis")

    print("\n== Extend range coverage 15 ft -> 30 ft via path loss ==")
    dataset = extend_range(dataset, 15.0, 30.0, path_loss_exponent=2.0)
    print(f"distance grid: {[f'{d:g}' for d in dataset.distances()]}")

    print("\n== Estimate the conditional PDF bank ==")
    bank = ConditionalPdfBank.from_dataset(dataset)
    bank_path = OUTPUT / "campaign_bank.json"
    bank_path.write_text(json.dumps(bank.to_json_dict(), indent=2, sort_keys=True))
    print(f"{'pair':<56s} {'ft':>5s} {'mean':>7s} {'median':>7s} {'strata':>7s}")
    for (d, pair), pdf in bank.cells():
        strata = bank.strata(d, pair)
        print(
            f"{pair.label():<56s} {d:5g} {pdf.mean():7.1f} {pdf.median():7d} "
            f"{len(strata) if strata else 1:7d}"
        )
    print(f"\nbank written to {bank_path}")


if __name__ == "__main__":
    main()
