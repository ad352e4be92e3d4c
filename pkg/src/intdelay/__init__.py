"""Robust stability certification for integral delay systems with spline-bounded kernels."""

from .cutoff_check import InconclusiveReason, Verdict, VerdictKind
from .encirclement import PipelineOptions, PipelineResult, full_pipeline
from .freq_transform import FrequencyModel, build_frequency_model
from .kernel_model import ConcreteSplineKernel, SplineKernelBounds, validate

__all__ = [
    "ConcreteSplineKernel",
    "FrequencyModel",
    "InconclusiveReason",
    "PipelineOptions",
    "PipelineResult",
    "SplineKernelBounds",
    "Verdict",
    "VerdictKind",
    "build_frequency_model",
    "full_pipeline",
    "validate",
]
