"""Measurement ingest and normalization for RSSI-versus-range datasets.

A measurement campaign records received signal strength between two phones at
known separations, with each phone in a known carriage state (posture plus
where the phone is held) and at known body-pose angles in 45-degree steps.
This module turns raw CSV logs into validated, immutable :class:`Dataset`
objects and provides the normalization steps that later estimation stages
assume: transmit-power referencing, pose-angle synthesis from bulk offsets,
and log-distance range extension.

RSSI values are integer dBm throughout; receivers report in 1 dB increments
and anything below the demodulation sensitivity floor (-100 dBm) never
reaches the log.
"""

from __future__ import annotations

import csv
import enum
import json
import math
import sys
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field, replace
from typing import TextIO

from .errors import ConfigurationError, EstimationError, ParameterError, RowError, SchemaError

#: Valid body-pose angles, degrees. Subjects rotate in 45-degree steps.
POSE_ANGLES = (0, 45, 90, 135, 180, 225, 270, 315)

#: Receiver demodulation sensitivity, dBm. Weaker chirps are never decoded.
SENSITIVITY_FLOOR_DBM = -100

#: Transmit power (dBm) that normalized datasets are referenced to.
REFERENCE_TX_DBM = 12


def quantize_db(value: float) -> int:
    """Round a dB value to the nearest integer, halves away from zero.

    Receivers report integer dB, so every synthetic sample must pass through
    the same quantizer. Python's ``round`` rounds halves to even; RSSI
    hardware convention rounds them away from zero, which is what this does:
    ``quantize_db(-6.5) == -7`` and ``quantize_db(6.5) == 7``. Integer inputs
    are returned unchanged.
    """
    if value >= 0:
        return int(math.floor(value + 0.5))
    return int(math.ceil(value - 0.5))


class Posture(enum.Enum):
    STANDING = "standing"
    SITTING = "sitting"


class Holding(enum.Enum):
    HAND = "hand"
    FRONT_PANTS_POCKET = "front_pants_pocket"
    BACK_PANTS_POCKET = "back_pants_pocket"
    SHIRT_POCKET = "shirt_pocket"
    BAG = "bag"


class Channel(enum.Enum):
    """BLE advertising channel of a chirp, when the log records it."""

    LOW = "low"
    MID = "mid"
    HIGH = "high"
    UNKNOWN = "unknown"


_HOLDING_ALIASES = {
    "hand": Holding.HAND,
    "front_pants_pocket": Holding.FRONT_PANTS_POCKET,
    "front-pants-pocket": Holding.FRONT_PANTS_POCKET,
    "frontpocket": Holding.FRONT_PANTS_POCKET,
    "back_pants_pocket": Holding.BACK_PANTS_POCKET,
    "back-pants-pocket": Holding.BACK_PANTS_POCKET,
    "backpocket": Holding.BACK_PANTS_POCKET,
    "shirt_pocket": Holding.SHIRT_POCKET,
    "shirt-pocket": Holding.SHIRT_POCKET,
    "shirtpocket": Holding.SHIRT_POCKET,
    "bag": Holding.BAG,
    "purse": Holding.BAG,
}


@dataclass(frozen=True)
class CarriageState:
    """How one subject carries their phone: posture plus holding position."""

    posture: Posture
    holding: Holding

    def label(self) -> str:
        return f"{self.posture.value}/{self.holding.value}"

    @classmethod
    def parse(cls, text: str) -> "CarriageState":
        """Parse a ``posture/holding`` label such as ``standing/hand``."""
        parts = text.strip().lower().split("/")
        if len(parts) != 2:
            raise ValueError(f"carriage state must look like 'standing/hand', got {text!r}")
        posture_text, holding_text = parts[0].strip(), parts[1].strip()
        try:
            posture = Posture(posture_text)
        except ValueError:
            raise ValueError(f"unknown posture {posture_text!r}") from None
        holding = _HOLDING_ALIASES.get(holding_text.replace(" ", "_"))
        if holding is None:
            raise ValueError(f"unknown holding position {holding_text!r}")
        return cls(posture, holding)

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.label()


@dataclass(frozen=True)
class CarriagePair:
    """Ordered carriage states of the two subjects in a link.

    ``user1`` is the transmitter-side subject, ``user2`` the receiver-side;
    measurement links are physically asymmetric (different devices, different
    bodies), so ``(a, b)`` and ``(b, a)`` are distinct cells.
    """

    user1: CarriageState
    user2: CarriageState

    def label(self) -> str:
        return f"{self.user1.label()}|{self.user2.label()}"

    @classmethod
    def parse(cls, text: str) -> "CarriagePair":
        """Parse a ``state|state`` label such as ``standing/hand|sitting/bag``."""
        parts = text.strip().split("|")
        if len(parts) != 2:
            raise ValueError(f"carriage pair must look like 'standing/hand|sitting/bag', got {text!r}")
        return cls(CarriageState.parse(parts[0]), CarriageState.parse(parts[1]))

    def __str__(self) -> str:  # pragma: no cover - convenience
        return self.label()


@dataclass(frozen=True)
class RssiSample:
    """One received chirp.

    Attributes:
        rssi: Received signal strength, integer dBm.
        tx_power: Transmit power of the sending phone, integer dBm.
        distance_ft: True separation between subjects, feet.
        carriage: Carriage pair of the link.
        pose_angle_user1: Body-pose angle of user 1, degrees (multiple of 45).
        pose_angle_user2: Body-pose angle of user 2, degrees (multiple of 45).
        channel: Advertising channel, if known.
        synthetic: True for samples produced by pose synthesis or range
            extension rather than measured over the air.
    """

    rssi: int
    tx_power: int
    distance_ft: float
    carriage: CarriagePair
    pose_angle_user1: int
    pose_angle_user2: int
    channel: Channel = Channel.UNKNOWN
    synthetic: bool = False

    def __post_init__(self) -> None:
        if not isinstance(self.rssi, int) or isinstance(self.rssi, bool):
            raise ValueError(f"rssi must be an integer dB value, got {self.rssi!r}")
        if not isinstance(self.tx_power, int) or isinstance(self.tx_power, bool):
            raise ValueError(f"tx_power must be an integer dBm value, got {self.tx_power!r}")
        if not self.distance_ft > 0:
            raise ValueError(f"distance_ft must be positive, got {self.distance_ft!r}")
        for name in ("pose_angle_user1", "pose_angle_user2"):
            angle = getattr(self, name)
            if angle not in POSE_ANGLES:
                raise ValueError(f"{name} must be one of {POSE_ANGLES}, got {angle!r}")


@dataclass(frozen=True)
class Dataset:
    """An immutable collection of validated samples plus provenance text."""

    samples: tuple[RssiSample, ...]
    provenance: str = ""

    def __len__(self) -> int:
        return len(self.samples)

    def __iter__(self) -> Iterator[RssiSample]:
        return iter(self.samples)

    def distances(self) -> tuple[float, ...]:
        """Sorted unique separations present in the data, feet."""
        return tuple(sorted({s.distance_ft for s in self.samples}))

    def carriage_pairs(self) -> tuple[CarriagePair, ...]:
        """Unique carriage pairs, in order of first appearance."""
        seen: dict[CarriagePair, None] = {}
        for s in self.samples:
            seen.setdefault(s.carriage, None)
        return tuple(seen)

    def extended(self, extra: Iterable[RssiSample], note: str) -> "Dataset":
        prov = f"{self.provenance}; {note}" if self.provenance else note
        return Dataset(self.samples + tuple(extra), provenance=prov)


# --------------------------------------------------------------------------
# CSV ingest
# --------------------------------------------------------------------------

#: Default schema: logical field -> CSV column. Matches the canonical CSV
#: written by :func:`write_csv`; adapt other layouts with a schema mapping.
DEFAULT_SCHEMA: Mapping[str, str] = {
    "rssi": "rssi",
    "tx_power": "tx_power",
    "distance": "distance_ft",
    "carriage_user1": "carriage_user1",
    "carriage_user2": "carriage_user2",
    "pose_angle_user1": "pose_angle_user1",
    "pose_angle_user2": "pose_angle_user2",
    "channel": "channel",
    "synthetic": "synthetic",
}

_REQUIRED_FIELDS = (
    "rssi",
    "tx_power",
    "distance",
    "carriage_user1",
    "carriage_user2",
    "pose_angle_user1",
    "pose_angle_user2",
)
_OPTIONAL_FIELDS = ("channel", "synthetic")


def _parse_int(text: str, what: str) -> int:
    """Parse an integer-valued field, tolerating integral floats like '-63.0'."""
    raw = text.strip()
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        value = float(raw)
    except ValueError:
        raise ValueError(f"{what} must be an integer, got {text!r}") from None
    if abs(value - round(value)) > 1e-9:
        raise ValueError(f"{what} must be an integer, got {text!r}")
    return int(round(value))


def _parse_angle(text: str, what: str) -> int:
    angle = _parse_int(text, what)
    if angle not in POSE_ANGLES:
        raise ValueError(f"{what} must be a multiple of 45 in [0, 315], got {text!r}")
    return angle


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes"):
        return True
    if lowered in ("0", "false", "no", ""):
        return False
    raise ValueError(f"synthetic flag must be boolean-like, got {text!r}")


def ingest_csv(
    path: str,
    schema: Mapping[str, str] | None = None,
    *,
    strict: bool = False,
    censor: bool = True,
    sensitivity_floor: int = SENSITIVITY_FLOOR_DBM,
    report_stream: TextIO | None = None,
) -> Dataset:
    """Read a measurement CSV into a validated :class:`Dataset`.

    Args:
        path: CSV file with a header row.
        schema: Mapping from logical field names (``rssi``, ``tx_power``,
            ``distance``, ``carriage_user1``, ``carriage_user2``,
            ``pose_angle_user1``, ``pose_angle_user2``, and optionally
            ``channel`` and ``synthetic``) to column names in the file.
            Defaults to the canonical layout written by :func:`write_csv`.
        strict: If true, the first invalid row raises :class:`RowError`;
            otherwise invalid rows are excluded and reported.
        censor: If true (the default), rows with RSSI below the sensitivity
            floor are excluded and reported as censored. Censoring is a
            property of the channel, not a data error, so it is reported
            separately and never fatal.
        sensitivity_floor: Demodulation floor in dBm; -100 by default.
        report_stream: Where per-line validation and censoring reports go.
            Defaults to stderr; pass e.g. ``io.StringIO()`` to capture.

    Returns:
        The dataset of surviving samples, with the path recorded as
        provenance.

    Raises:
        SchemaError: Missing header or required columns.
        RowError: In strict mode, the first invalid row.
    """
    if report_stream is None:
        report_stream = sys.stderr
    schema = dict(DEFAULT_SCHEMA if schema is None else schema)
    missing_logical = [f for f in _REQUIRED_FIELDS if f not in schema]
    if missing_logical:
        raise SchemaError(f"schema mapping missing required fields: {', '.join(missing_logical)}")

    samples: list[RssiSample] = []
    rejected = 0
    censored = 0
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise SchemaError(f"{path}: file has no header row")
        header = set(reader.fieldnames)
        missing_cols = [schema[f] for f in _REQUIRED_FIELDS if schema[f] not in header]
        if missing_cols:
            raise SchemaError(f"{path}: header missing required columns: {', '.join(missing_cols)}")
        have_channel = "channel" in schema and schema["channel"] in header
        have_synth = "synthetic" in schema and schema["synthetic"] in header

        for row in reader:
            line = reader.line_num
            try:
                rssi = _parse_int(row[schema["rssi"]], "rssi")
                tx_power = _parse_int(row[schema["tx_power"]], "tx_power")
                distance = float(row[schema["distance"]])
                carriage = CarriagePair(
                    CarriageState.parse(row[schema["carriage_user1"]]),
                    CarriageState.parse(row[schema["carriage_user2"]]),
                )
                angle1 = _parse_angle(row[schema["pose_angle_user1"]], "pose_angle_user1")
                angle2 = _parse_angle(row[schema["pose_angle_user2"]], "pose_angle_user2")
                channel = Channel.UNKNOWN
                if have_channel and row[schema["channel"]].strip():
                    channel = Channel(row[schema["channel"]].strip().lower())
                synthetic = _parse_bool(row[schema["synthetic"]]) if have_synth else False
                sample = RssiSample(
                    rssi=rssi,
                    tx_power=tx_power,
                    distance_ft=distance,
                    carriage=carriage,
                    pose_angle_user1=angle1,
                    pose_angle_user2=angle2,
                    channel=channel,
                    synthetic=synthetic,
                )
            except (ValueError, KeyError) as exc:
                if strict:
                    raise RowError(f"{path}: line {line}: {exc}") from exc
                print(f"line {line}: excluded: {exc}", file=report_stream)
                rejected += 1
                continue
            if censor and sample.rssi < sensitivity_floor:
                print(
                    f"line {line}: censored: rssi {sample.rssi} dBm below "
                    f"{sensitivity_floor} dBm sensitivity floor",
                    file=report_stream,
                )
                censored += 1
                continue
            samples.append(sample)

    print(
        f"{path}: ingested {len(samples)} samples ({rejected} excluded, {censored} censored)",
        file=report_stream,
    )
    return Dataset(tuple(samples), provenance=path)


def write_csv(dataset: Dataset, path: str) -> None:
    """Write a dataset in the canonical column layout read by the default schema."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(list(DEFAULT_SCHEMA.values()))
        for s in dataset:
            writer.writerow(
                [
                    s.rssi,
                    s.tx_power,
                    f"{s.distance_ft:g}",
                    s.carriage.user1.label(),
                    s.carriage.user2.label(),
                    s.pose_angle_user1,
                    s.pose_angle_user2,
                    s.channel.value,
                    int(s.synthetic),
                ]
            )


# --------------------------------------------------------------------------
# Normalization operations
# --------------------------------------------------------------------------


def normalize_tx(dataset: Dataset, reference_tx: int = REFERENCE_TX_DBM) -> Dataset:
    """Reference every sample to a common transmit power.

    Attenuation is what matters for range inference, so a sample sent at
    ``tx_power`` and received at ``rssi`` is equivalent to one sent at
    ``reference_tx`` and received at ``rssi + (reference_tx - tx_power)``.
    The shift is exact integer arithmetic: no quantization error, and a
    dataset already at the reference power is returned element-for-element
    equal.
    """
    if not isinstance(reference_tx, int) or isinstance(reference_tx, bool):
        raise ParameterError(f"reference_tx must be an integer dBm value, got {reference_tx!r}")
    out = [
        replace(s, rssi=s.rssi + (reference_tx - s.tx_power), tx_power=reference_tx)
        for s in dataset
    ]
    prov = f"normalized to tx {reference_tx} dBm"
    return Dataset(tuple(out), provenance=f"{dataset.provenance}; {prov}" if dataset.provenance else prov)


def estimate_bulk_deltas(dataset: Dataset, carriage: CarriageState) -> dict[int, float]:
    """Estimate mean RSSI offsets of each pose angle relative to 0 degrees.

    Uses user 1's pose sweeps: samples whose user-1 carriage state matches
    ``carriage`` (synthetic samples excluded). At each distance that has both
    the angle of interest and the 0-degree stratum, the difference of stratum
    mean RSSIs isolates the body-blockage term from path loss; those
    per-distance differences are then averaged with equal weight.

    Returns:
        ``{angle: delta_dB}`` for all eight angles, with ``delta[0] == 0.0``.

    Raises:
        EstimationError: Some angle has no usable (angle, 0-degree) distance
            overlap for this carriage state.
    """
    by_cell: dict[tuple[float, int], list[int]] = {}
    for s in dataset:
        if s.synthetic or s.carriage.user1 != carriage:
            continue
        by_cell.setdefault((s.distance_ft, s.pose_angle_user1), []).append(s.rssi)

    means = {cell: sum(v) / len(v) for cell, v in by_cell.items()}
    deltas: dict[int, float] = {0: 0.0}
    missing: list[int] = []
    for angle in POSE_ANGLES[1:]:
        diffs = [
            means[(d, angle)] - means[(d, 0)]
            for (d, a) in means
            if a == angle and (d, 0) in means
        ]
        if not diffs:
            missing.append(angle)
        else:
            deltas[angle] = sum(diffs) / len(diffs)
    if missing:
        raise EstimationError(
            f"no (angle, 0 deg) distance overlap for carriage {carriage.label()!r} "
            f"at angles: {', '.join(str(a) for a in missing)}"
        )
    return deltas


def synthesize_pose(
    dataset: Dataset,
    bulk_deltas: Mapping[tuple[CarriageState, int], float],
) -> Dataset:
    """Fill in unmeasured user-2 pose angles with bulk-offset synthetic samples.

    Measurement campaigns sweep user 1 through all eight pose angles but hold
    user 2 fixed per session. Given a table of bulk offsets
    ``(carriage_state, angle) -> dB`` relative to 0 degrees, each sample
    spawns seven synthetic copies at the missing user-2 angles with

        ``rssi_new = quantize(rssi + delta[new_angle] - delta[measured_angle])``

    so the adjustment is relative to whatever angle was actually measured.
    Synthetic output is quantized to integer dB and flagged ``synthetic``.

    Returns:
        The original samples followed, per sample, by its seven synthetic
        copies — eight times the input count.

    Raises:
        ConfigurationError: The delta table is missing angles for some user-2
            carriage state present in the data.
    """
    states = {s.carriage.user2 for s in dataset}
    for state in sorted(states, key=lambda c: c.label()):
        missing = [a for a in POSE_ANGLES if (state, a) not in bulk_deltas]
        if missing:
            raise ConfigurationError(
                f"bulk_deltas missing angles {missing} for carriage state {state.label()!r}"
            )

    out: list[RssiSample] = []
    for s in dataset:
        out.append(s)
        measured = bulk_deltas[(s.carriage.user2, s.pose_angle_user2)]
        for angle in POSE_ANGLES:
            if angle == s.pose_angle_user2:
                continue
            shifted = s.rssi + bulk_deltas[(s.carriage.user2, angle)] - measured
            out.append(
                replace(s, rssi=quantize_db(shifted), pose_angle_user2=angle, synthetic=True)
            )
    prov = "pose-synthesized"
    return Dataset(tuple(out), provenance=f"{dataset.provenance}; {prov}" if dataset.provenance else prov)


def extend_range(
    dataset: Dataset,
    base_range: float,
    target_range: float,
    path_loss_exponent: float = 2.0,
) -> Dataset:
    """Extrapolate samples from one separation out to a longer one.

    Under a log-distance path-loss model with exponent ``n``, moving from
    ``base_range`` to ``target_range`` attenuates every sample by
    ``10 * n * log10(target/base)`` dB. The shift is applied to each base
    sample and quantized once, so the target histogram is exactly the base
    histogram translated by the quantized shift.

    Returns:
        The original dataset plus synthetic samples at ``target_range``.
        ``target_range == base_range`` is the zero-shift identity and emits
        exact copies (flagged synthetic).

    Raises:
        ParameterError: ``target_range < base_range`` or a nonpositive
            range or exponent.
        EstimationError: No samples at ``base_range``.
    """
    if base_range <= 0 or target_range <= 0:
        raise ParameterError("ranges must be positive")
    if path_loss_exponent <= 0:
        raise ParameterError(f"path_loss_exponent must be positive, got {path_loss_exponent!r}")
    if target_range < base_range:
        raise ParameterError(
            f"target_range {target_range:g} ft is inside base_range {base_range:g} ft; "
            "extension only extrapolates outward"
        )
    base = [s for s in dataset if math.isclose(s.distance_ft, base_range, rel_tol=1e-9, abs_tol=1e-9)]
    if not base:
        raise EstimationError(f"no samples at base range {base_range:g} ft")

    shift_db = -10.0 * path_loss_exponent * math.log10(target_range / base_range)
    shift = quantize_db(shift_db)
    synthetic = [
        replace(s, rssi=s.rssi + shift, distance_ft=target_range, synthetic=True) for s in base
    ]
    note = f"extended {base_range:g} ft -> {target_range:g} ft (shift {shift} dB)"
    return dataset.extended(synthetic, note)


# --------------------------------------------------------------------------
# Bulk-delta JSON interchange
# --------------------------------------------------------------------------


def bulk_deltas_to_json(deltas: Mapping[tuple[CarriageState, int], float]) -> str:
    """Serialize a bulk-delta table as nested JSON keyed by carriage label."""
    nested: dict[str, dict[str, float]] = {}
    for (state, angle), value in deltas.items():
        nested.setdefault(state.label(), {})[str(angle)] = value
    return json.dumps(nested, indent=2, sort_keys=True)


def bulk_deltas_from_json(text: str) -> dict[tuple[CarriageState, int], float]:
    """Parse the nested JSON produced by :func:`bulk_deltas_to_json`."""
    nested = json.loads(text)
    flat: dict[tuple[CarriageState, int], float] = {}
    for label, table in nested.items():
        state = CarriageState.parse(label)
        for angle_text, value in table.items():
            flat[(state, int(angle_text))] = float(value)
    return flat
