"""Online aggregation of probabilistic forecasts under integral losses."""

from .aggregation import (
    QuantileAggregate,
    ScaleShiftCloud,
    aggregate_beta2_mixable,
    aggregate_crps_mixable,
    aggregate_mixture,
    aggregate_ot1d_quantile,
    aggregate_scale_shift,
    aggregate_sw2_barycenter,
    aggregate_w2_barycenter,
    aggregator_for,
)
from .core import (
    DensityGrid,
    GridDistribution1D,
    ParticleDistributionND,
    QuantileGrid1D,
    TensorGridCDF,
    as_weights,
    make_density,
    make_dirac,
    make_empirical,
    make_from_cdf,
    make_probabilities,
    make_uniform,
    particle_dirac,
    uniform_weights,
)
from .engine import GameConfig, GameTrace, aa_run, aa_update_weights, mixloss, verify_regret_chain
from .errors import (
    ConfigurationError,
    DomainError,
    InfiniteLossError,
    InvariantError,
    MixaggError,
    StreamExhaustedError,
    UnsupportedError,
)
from .losses import (
    BoundLoss,
    GaussianKernel,
    IntegralWeighting,
    LaplacianKernel,
    LossKind,
    LossSpec,
    TransportCost,
    beta2_divergence,
    cfd,
    crps,
    energy_distance,
    kl_divergence,
    mmd_squared,
    multidim_crps,
    ot1d_cost,
    scrps,
    sphere_surface_area,
    square_cost,
    sw2_squared,
    table_eta,
)
from .pointwise import BoundedInterval, EtaRate, square_loss, square_substitution

__version__ = "0.1.0"
