"""Conditional-entropy estimation and predictability bounds."""

from ._core import (  # noqa: F401
    NoiseKind,
    SynthTask,
    __version__,
    estimate,
    gen_dataset,
    load_table,
    mae_lower_bound,
    mse_lower_bound,
    noise_entropy,
    noise_param_for_mse,
    pca_reduce_ev,
    r2_indicator,
)
