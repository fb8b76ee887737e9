//! Stationary Gaussian processes: exact sampling, covariance families and
//! the two-point lower-bound construction.

pub mod circulant;
pub mod family;
pub mod kl;
pub mod pair;
pub mod spectral;

pub use circulant::{sample_stationary_gaussian, CirculantSampler};
pub use family::CovarianceFamily;
pub use kl::{kl_toeplitz_gaussian, two_point_risk_floor};
pub use pair::{build_pair, CovariancePair, LowerBoundParams, PairConstants};
pub use spectral::{alias_density, build_phi_hat, build_zeta_hat, PhiHat, SpectralDensity, SpectralGrid};
