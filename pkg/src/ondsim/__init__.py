"""Monte Carlo simulator and analysis toolkit for opportunistic network
decoupling in two-hop interfering-relay networks."""

from .analysis import (DecaySample, SlopeFit, estimate_dof, fit_loglog_slope,
                       ks_distance, measure_til_decay, optimal_threshold,
                       prob_exactly_k)
from .channel import ChannelRealization, InterRelayChannel, generate_realization
from .config import Convention, Scheme, SystemConfig
from .errors import ConfigurationError, ResourceLimitError
from .harness import (ExperimentKind, ExperimentSpec, NRule, ResultRow,
                      emit_results, read_results, run_experiment)
from .metrics import (MetricKind, MetricTable, cdf_bound_constant,
                      cdf_power_lower_bound, metric_cdf, metric_cdf_inverse,
                      scheduling_metric, scheduling_metric_table, til, til_table)
from .protocol import (LinkCoefficients, RateReport, SinrReport, block_rate,
                       compute_sinrs_alternate, compute_sinrs_two_phase,
                       dof_lower_bound_alternate, link_coefficients,
                       scheduling_overhead_bits)
from .report import render_figures
from .selection import (Assignment, select_assignment, select_first_set,
                        select_max_min_snr, select_second_set)

__version__ = "0.1.0"
