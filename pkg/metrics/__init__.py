from metrics.latency import (
    consensus_latency,
    convergence_report,
    dissemination_latency,
    false_positive_count,
)
from metrics.report import GrowthReport, growth_ratio_check
from metrics.sweep import DisseminationMeasurement, measure_dissemination
