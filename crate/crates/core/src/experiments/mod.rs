//! Monte Carlo campaigns and output-entropy minimisation.

pub mod campaigns;
pub mod optimizer;
pub mod stats;

pub use campaigns::{
    a2_threshold, a3_threshold, cross_term_check, fannes_check, gradient_check, inequality_suite, lemma12_check,
    overlap_law_campaign, product_bound_check, pushforward_campaign, residual_check, spectrum_law_campaign,
    tube_fraction_campaign, typicality_campaign, CampaignResult, TrialConfig, DEFAULT_SIGMAS, INEQUALITY_SLACK,
    PRODUCT_DIMS,
};
pub use optimizer::{
    descend, entropy_gradient, estimate_min_output_entropy, estimate_product_entropy, output_entropy,
    project_tangent, raw_output_entropy, Armijo, Descent, MinEntropy, OptimizerConfig, ProductEntropy, LOG_FLOOR,
    PRODUCT_CAP,
};
pub use stats::{binomial_sigma, ks_critical, ks_one_sample, ks_two_sample, kolmogorov_cdf, two_sample_n_eff, z_score, KS_Q999};
