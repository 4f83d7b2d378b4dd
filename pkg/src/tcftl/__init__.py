"""Too-close-for-too-long detection from RSSI range measurements.

The package turns raw Bluetooth RSSI-versus-range measurement campaigns
into calibrated proximity detectors and evaluates them end to end:

- :mod:`tcftl.measurements` — ingest, validate, and augment measurement data;
- :mod:`tcftl.densities` — attenuation PDFs conditioned on range and
  carriage, and the near/far hypothesis mixtures built from them;
- :mod:`tcftl.detectors` — log-likelihood-ratio nonlinearities, M-of-N
  threshold detectors, and minimax carriage-aware selection;
- :mod:`tcftl.evaluation` — detection-error-tradeoff curves,
  false-discovery-rate curves, and look-budget sweeps;
- :mod:`tcftl.scansim` — scan-timing simulation of how a duty-cycled
  scanner actually samples the channel.

The :mod:`tcftl.cli` module exposes the same pipeline as the ``tcftl``
command.
"""

__version__ = "0.1.0"

from .densities import (
    ConditionalPdfBank,
    ContactDensity,
    EmpiricalPdf,
    HypothesisPdfs,
    align_supports,
    estimate_pdf,
    mixture_pdf,
    mixture_strata,
    range_grid,
)
from .detectors import (
    DEFAULT_LLR_FLOOR,
    Decision,
    MofNDetector,
    Nonlinearity,
    Verdict,
    binomial_tail_table,
    build_nonlinearity,
    decide_mofn,
    llr_statistic,
    minimax_select,
    mofn_detection_prob,
)
from .errors import (
    ConfigurationError,
    CoverageError,
    EstimationError,
    InfeasibleError,
    ParameterError,
    RowError,
    SchemaError,
    TcftlError,
)
from .evaluation import (
    CarriagePrior,
    DetCurve,
    DetMode,
    DetPoint,
    FdrCurve,
    FdrPoint,
    McResult,
    SweepResult,
    det_curve,
    expected_contacts,
    fdr,
    fdr_curve,
    look_sweep,
    mc_detection_prob,
    pd_at_range,
)
from .measurements import (
    POSE_ANGLES,
    REFERENCE_TX_DBM,
    SENSITIVITY_FLOOR_DBM,
    CarriagePair,
    CarriageState,
    Channel,
    Dataset,
    Holding,
    Posture,
    RssiSample,
    bulk_deltas_from_json,
    bulk_deltas_to_json,
    estimate_bulk_deltas,
    extend_range,
    ingest_csv,
    normalize_tx,
    quantize_db,
    synthesize_pose,
    write_csv,
)
from .scansim import (
    Correlation,
    RecordingPolicy,
    SamplingModel,
    ScanModel,
    censor_sensitivity,
    draw_windows,
    simulate_window,
    simulate_windows,
)

__all__ = [
    "__version__",
    # errors
    "TcftlError",
    "SchemaError",
    "RowError",
    "EstimationError",
    "ConfigurationError",
    "ParameterError",
    "CoverageError",
    "InfeasibleError",
    # measurements
    "POSE_ANGLES",
    "REFERENCE_TX_DBM",
    "SENSITIVITY_FLOOR_DBM",
    "Posture",
    "Holding",
    "Channel",
    "CarriageState",
    "CarriagePair",
    "RssiSample",
    "Dataset",
    "quantize_db",
    "ingest_csv",
    "write_csv",
    "normalize_tx",
    "estimate_bulk_deltas",
    "synthesize_pose",
    "extend_range",
    "bulk_deltas_to_json",
    "bulk_deltas_from_json",
    # densities
    "EmpiricalPdf",
    "align_supports",
    "estimate_pdf",
    "ConditionalPdfBank",
    "ContactDensity",
    "range_grid",
    "mixture_strata",
    "mixture_pdf",
    "HypothesisPdfs",
    # detectors
    "DEFAULT_LLR_FLOOR",
    "Nonlinearity",
    "build_nonlinearity",
    "llr_statistic",
    "Verdict",
    "Decision",
    "MofNDetector",
    "decide_mofn",
    "mofn_detection_prob",
    "binomial_tail_table",
    "minimax_select",
    # scansim
    "RecordingPolicy",
    "Correlation",
    "ScanModel",
    "SamplingModel",
    "draw_windows",
    "simulate_window",
    "simulate_windows",
    "censor_sensitivity",
    # evaluation
    "DetMode",
    "CarriagePrior",
    "DetPoint",
    "DetCurve",
    "FdrPoint",
    "FdrCurve",
    "McResult",
    "SweepResult",
    "det_curve",
    "fdr",
    "fdr_curve",
    "expected_contacts",
    "pd_at_range",
    "mc_detection_prob",
    "look_sweep",
]
