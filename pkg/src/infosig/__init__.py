"""Entropy and mutual-information signatures of (state, action, next-state) streams."""

from ._core import available_backends, backend_name, use_backend
from .counts import CountTable, WindowedAccumulator, support_sizes
from .infometrics import InfoSignature, UndefinedMetricError, entropy, joint_mi, mutual_information, signature
from .monitor import (
    Baseline,
    DiagnosisReport,
    SignatureDelta,
    Thresholds,
    capture_baseline,
    classify,
    delta,
    diagnose,
    severity,
    smooth,
)
from .symbolizer import SymbolizerConfig, SymbolTriple, bin_value, decode_state, symbolize_action, symbolize_state

__version__ = "0.1.0"

__all__ = [
    "available_backends", "backend_name", "use_backend",
    "CountTable", "WindowedAccumulator", "support_sizes",
    "InfoSignature", "UndefinedMetricError", "entropy", "joint_mi", "mutual_information", "signature",
    "Baseline", "DiagnosisReport", "SignatureDelta", "Thresholds", "capture_baseline", "classify", "delta",
    "diagnose", "severity", "smooth",
    "SymbolizerConfig", "SymbolTriple", "bin_value", "decode_state", "symbolize_action", "symbolize_state",
]
