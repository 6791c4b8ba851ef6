"""Extreme-load statistics for clustered event streams recorded above a trigger level.

Modules
-------
series      event-series ingestion, filtering, block maxima, empirical CDF
dependence  autocorrelation, variance function, scale of fluctuation
extremal    runs estimator of the extremal index and its bias-model fit
bayes       Beta posterior of the parent CDF at a level
cox         lognormal-intensity Cox arrivals: moments, fitting, simulation
maxdist     distribution of the maximum, Gumbel fitting, horizon scaling
oracles     synthetic sequences with known extremal index
"""

__version__ = "0.1.0"

from .bayes import BetaPosterior, order_statistic_cdf, posterior_moments, posterior_params, sample_posterior
from .cox import (
    CoxModel,
    empirical_mean_measure,
    fit_cox,
    mean_measure_moments,
    sample_mean_measure,
    simulate_events,
    simulate_intensity,
)
from .dependence import Acf, autocorrelation, run_length, scale_of_fluctuation, variance_function
from .errors import DataError, NumericalError, PulseLoadError
from .extremal import ThetaFit, fit_theta, runs_curve, runs_estimator
from .maxdist import (
    FrechetModel,
    GumbelModel,
    apply_extremal_index,
    conditional_max_cdf,
    frechet_fit,
    gumbel_fit,
    gumbel_summary,
    horizon_scale,
    mc_max_cdf,
)
from .series import (
    EventSeries,
    block_maxima,
    chi_squared_exponential_test,
    empirical_cdf,
    filter_above,
    interarrival_times,
    load_events,
)
