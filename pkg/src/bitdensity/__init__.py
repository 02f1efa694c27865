"""Signal and jamming detection from the bit density of 1-bit window-comparator output."""

__version__ = "0.1.0"

from .numerics import (  # noqa: E402
    NumericalError,
    binomial_cdf,
    binomial_inverse_cdf,
    binomial_pmf,
    chi_square_inverse_cdf,
    q_function,
    q_inverse,
)
from .quantizer import ComparatorConfig, alt_success_rate, null_success_rate, quantize, quantize_block  # noqa: E402
from .detector import (  # noqa: E402
    BscChannel,
    Decision,
    DetectorParams,
    Hypothesis,
    approx_threshold,
    bsc_success_rates,
    compute_threshold,
    compute_zeta,
    decide,
    detection_probability,
    detection_probability_bsc,
    detection_probability_limit_c,
    optimal_c,
)
from .baseline import ChiSquareTestParams, unquantized_decide, unquantized_threshold  # noqa: E402
from .scenarios import GaussianScenario, MimoScenario, WsnScenario  # noqa: E402
from .montecarlo import TrialReport, run_monte_carlo, run_roc  # noqa: E402
