"""Fractal sequences, Minkowski dimension and fractal codimension of
nilpotent contact points in planar slow-fast systems."""

from .dimension import (
    CodimensionReport,
    DimensionEstimate,
    EstimatorMethod,
    borel_estimate,
    box_count_dimension,
    cahen_estimate,
    chirp_segments,
    chirp_theoretical_dimension,
    codimension_from_dimension,
    dyadic_scales,
    estimate_all,
    select_estimate,
    tail_nucleus_estimate,
    theoretical_dimension,
)
from .entryexit import FractalSequence, SequenceConfig, generate_sequence, next_height
from .errors import (
    BracketFailure,
    CompositionConstantTerm,
    DegenerateGap,
    DegenerateModel,
    FractalCodimError,
    InsufficientScales,
    NoConvergence,
    NonAdmissibleHeight,
    NotInvertible,
    QuadratureFailure,
    WrongShape,
)
from .models import (
    ClassicalLienardModel,
    NormalFormModel,
    Orientation,
    SlowFastModel,
    TwoStrokeModel,
    alpha_limit,
    omega_limit,
    orientation,
    sdi,
)
from .series import (
    SeriesCodimension,
    TruncatedSeries,
    codimension_from_series,
    g_from_h1,
    psi_from_h1,
    series_add,
    series_compose,
    series_invert,
    series_mul,
)

__version__ = "0.1.0"

__all__ = [
    "BracketFailure",
    "ClassicalLienardModel",
    "CodimensionReport",
    "CompositionConstantTerm",
    "DegenerateGap",
    "DegenerateModel",
    "DimensionEstimate",
    "EstimatorMethod",
    "FractalCodimError",
    "FractalSequence",
    "InsufficientScales",
    "NoConvergence",
    "NonAdmissibleHeight",
    "NormalFormModel",
    "NotInvertible",
    "Orientation",
    "QuadratureFailure",
    "SequenceConfig",
    "SeriesCodimension",
    "SlowFastModel",
    "TruncatedSeries",
    "TwoStrokeModel",
    "WrongShape",
    "alpha_limit",
    "borel_estimate",
    "box_count_dimension",
    "cahen_estimate",
    "chirp_segments",
    "chirp_theoretical_dimension",
    "codimension_from_dimension",
    "codimension_from_series",
    "dyadic_scales",
    "estimate_all",
    "g_from_h1",
    "generate_sequence",
    "next_height",
    "omega_limit",
    "orientation",
    "psi_from_h1",
    "sdi",
    "select_estimate",
    "series_add",
    "series_compose",
    "series_invert",
    "series_mul",
    "tail_nucleus_estimate",
    "theoretical_dimension",
]
