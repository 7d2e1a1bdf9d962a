"""Two-charge circular ensemble: exact laws, Pfaffian kernels, sampling.

A log-gas on the unit circle mixing unit charges (fugacity X) and double
charges, with total charge fixed.  The package provides the closed-form
partition function and charge-count law, finite-N and scaling-limit
matrix kernels whose Pfaffians give correlation intensities, brute-force
oracles for cross-checking, and a trans-dimensional Metropolis sampler.
"""

from .ensemble import (
    Configuration,
    CountDistribution,
    EnsembleParams,
    count_distribution,
    count_pgf,
    energy,
    limiting_mean_fraction,
    limiting_pgf,
    limiting_var_fraction,
    log_partition,
    log_weight,
    mean_count,
    partition,
    sample_counts,
    standardize_counts,
    var_count,
    wrap_angle,
)
from .kernels import (
    KernelGauge,
    KernelQuery,
    ScaledKernelQuery,
    coe_entry,
    cse_entry,
    entry,
    finite_entry,
    kernel_block,
    rescaled_entry,
    scaled_entry,
)
from .oracle import (
    OracleSettings,
    moment_matrix_partition,
    oracle_intensity,
    oracle_partition,
    vandermonde_weight,
)
# the pfaffian() function itself stays on the submodule so the name
# `twocharge.pfaffian` keeps pointing at the module
from .pfaffian import AntisymmetricMatrix, CorrelationQuery, assemble, intensity
from .sampler import (
    ChainConfig,
    ChainResult,
    backend_name,
    estimate_count_mean,
    estimate_count_prob,
    estimate_pair_intensity,
    run_chain,
    run_chains,
)

__version__ = "0.1.0"

__all__ = [
    "AntisymmetricMatrix",
    "ChainConfig",
    "ChainResult",
    "Configuration",
    "CorrelationQuery",
    "CountDistribution",
    "EnsembleParams",
    "KernelGauge",
    "KernelQuery",
    "OracleSettings",
    "ScaledKernelQuery",
    "__version__",
    "assemble",
    "backend_name",
    "coe_entry",
    "count_distribution",
    "count_pgf",
    "cse_entry",
    "energy",
    "entry",
    "estimate_count_mean",
    "estimate_count_prob",
    "estimate_pair_intensity",
    "finite_entry",
    "intensity",
    "kernel_block",
    "limiting_mean_fraction",
    "limiting_pgf",
    "limiting_var_fraction",
    "log_partition",
    "log_weight",
    "mean_count",
    "moment_matrix_partition",
    "oracle_intensity",
    "oracle_partition",
    "partition",
    "rescaled_entry",
    "run_chain",
    "run_chains",
    "sample_counts",
    "scaled_entry",
    "standardize_counts",
    "var_count",
    "vandermonde_weight",
    "wrap_angle",
]
