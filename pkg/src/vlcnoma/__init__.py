"""Indoor visible-light NOMA downlink: channel model, power allocation
strategies, and a reproducible Monte Carlo comparison harness."""

__version__ = "0.1.0"

from .allocation import (
    AllocationCoefficients,
    InfeasibleAllocationError,
    STRATEGY_NAMES,
    StrategySpec,
    epa_coefficients,
    fpa_coefficients,
    grpa_coefficients,
    ngdpa_coefficients,
    sfpa_coefficients,
    sfpa_mu,
    sfpa_mu_beta,
    strategy_coefficients,
    validate_coefficients,
)
from .channel import (
    ChannelGains,
    DeviceParams,
    LinkGeometry,
    Position3,
    channel_gain,
    combined_gains,
    concentrator_gain,
    lambertian_order,
    link_geometry,
)
from .config import ConfigError, config_from_dict, config_to_dict, load_config
from .link import (
    LinkBudget,
    RATE_BOUND_COEFF,
    achievable_rate,
    sinr_exact,
    sinr_high_snr,
    user_rates,
)
from .metrics import RankAccumulator, jain_index
from .sim import (
    ScenarioConfig,
    SweepResult,
    SweepRow,
    TrialResult,
    default_scenario,
    place_users,
    run_sweep,
    run_trial,
)

__all__ = [
    "__version__",
    "AllocationCoefficients",
    "ChannelGains",
    "ConfigError",
    "DeviceParams",
    "InfeasibleAllocationError",
    "LinkBudget",
    "LinkGeometry",
    "Position3",
    "RATE_BOUND_COEFF",
    "RankAccumulator",
    "STRATEGY_NAMES",
    "ScenarioConfig",
    "StrategySpec",
    "SweepResult",
    "SweepRow",
    "TrialResult",
    "achievable_rate",
    "channel_gain",
    "combined_gains",
    "concentrator_gain",
    "config_from_dict",
    "config_to_dict",
    "default_scenario",
    "epa_coefficients",
    "fpa_coefficients",
    "grpa_coefficients",
    "jain_index",
    "lambertian_order",
    "link_geometry",
    "load_config",
    "ngdpa_coefficients",
    "place_users",
    "run_sweep",
    "run_trial",
    "sfpa_coefficients",
    "sfpa_mu",
    "sfpa_mu_beta",
    "sinr_exact",
    "sinr_high_snr",
    "strategy_coefficients",
    "user_rates",
    "validate_coefficients",
]
