//! Strong-metric-regularity certificates for the auxiliary map
//! `G_t(v) = f(v) − p(t) + F(v)`.

mod certificate;
mod checks;

pub use certificate::{
    certify_trajectory, ratio_cap, reduce_radii, smr_pointwise, uniform_certificate,
    CertifyOptions, SmrCertificate, UniformCertificate,
};
pub use checks::{
    auxiliary_shift_check, continuity_check, verify_localization, AuxiliaryMap, LocalizationReport,
};
