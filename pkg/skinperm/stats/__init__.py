from .aggregate import (
    CohortEnvelope,
    PermittivityTrace,
    RepeatabilityReport,
    VariationReport,
    cohort_envelope,
    invert_trace,
    location_weighted_mean,
    repeatability,
    variation_report,
    volunteer_mean,
)
from .report import ReportResult, emit_report
