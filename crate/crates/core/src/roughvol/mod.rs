//! Rough volatility: Riemann-Liouville and stationary fBM from shared
//! two-sided noise, the rough path they form, the Wong-Zakai
//! renormalisation constant and its convergence experiment.

mod diagnostics;
mod fbm;
mod kernel;
mod noise;
mod renorm;
mod wong_zakai;

pub use diagnostics::{
    remainder_diagnostics, remainder_experiment, EnvelopeBlock, RemainderDiagnostics,
    RemainderExperimentConfig, RemainderExperimentReport, ENVELOPE_DELTA, ETA_OFFSET,
};
pub use fbm::{
    build_w_triple, mollified_rl_fbm, negative_noise_part, rl_fbm, stationary_fbm, w_exponents,
};
pub use kernel::{rl_cell_weights, stationary_cell_weights, KernelSpec};
pub use noise::{
    mollified_noise, mollified_noise_on, rho, rho_bar, rho_l2_squared, MollifierSpec, NoisePath,
};
pub use renorm::{
    mollifier_constant, renorm_constant, RenormEstimate, RenormMethod, MC_CELLS_PER_EPS,
};
pub use wong_zakai::{
    ito_integral_oracle, wong_zakai_approximation, wong_zakai_experiment, FittedRates,
    RenormValues, TestFunction, WongZakaiConfig, WongZakaiPaths, WongZakaiReport,
};
