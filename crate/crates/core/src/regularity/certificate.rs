use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::GeneralizedEquation;
use crate::error::{Error, Result};
use crate::setmap::FoldPoint;
use crate::solver::Trajectory;
use crate::tolerances::Tolerances;

/// Radii `(a, b)` and modulus `κ` of a single-valued Lipschitz localization
/// of `G_t⁻¹` around `(z, 0)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmrCertificate {
    pub t: f64,
    pub z: f64,
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CertifyOptions {
    /// Shrink factor applied to both radii.
    pub safety: f64,
    /// Inflation factor applied to the modulus.
    pub margin: f64,
    /// Largest admissible `a` (A), used when no fold limits it.
    pub radius_cap: f64,
    /// Largest admissible `b` (V).
    pub ordinate_cap: f64,
    pub tolerances: Tolerances,
}

impl Default for CertifyOptions {
    fn default() -> Self {
        Self {
            safety: 0.95,
            margin: 1.05,
            radius_cap: 1.0,
            ordinate_cap: f64::INFINITY,
            tolerances: Tolerances::default(),
        }
    }
}

/// Pointwise certificate at a solution `z` of `p(t) ∈ (f + F)(z)`.
///
/// * `a` is the safety fraction of the distance to the nearest fold.
/// * `b` is the safety fraction of the smallest of: the ordinate gaps to the
///   folds bracketing `z`, and the reach `|g(z ± a) − p(t)|` of the ball's
///   image (so every ordinate in `B_b` has a preimage in `B_a`).
/// * `κ` is `margin / inf |g'|` over `B_a(z)`.
pub fn smr_pointwise(
    eq: &GeneralizedEquation,
    t: f64,
    z: f64,
    opts: &CertifyOptions,
) -> Result<SmrCertificate> {
    let p = eq.signal().eval(t)?;
    let residual = eq.residual_at(p, z);
    if !(residual <= opts.tolerances.tol_res) {
        return Err(Error::NotASolution { t, z, residual });
    }
    let refuse = |reason: &str| Error::OnFold {
        t,
        z,
        reason: reason.to_string(),
    };
    let g = eq.sum();
    if g.piece_at(z).is_none() {
        return Err(refuse("z is a kink, segment abscissa or domain end"));
    }
    let slope = g.derivative(z)?;
    if slope == 0.0 {
        return Err(refuse("the graph is flat at z"));
    }
    let folds = eq.folds();
    let fold_gap = folds
        .iter()
        .map(|f| (f.z - z).abs())
        .fold(f64::INFINITY, f64::min);
    if fold_gap <= opts.tolerances.tol_z {
        return Err(refuse("z is a fold point"));
    }
    let a = opts.safety * fold_gap.min(opts.radius_cap);

    let inf_slope = g.min_abs_slope(z - a, z + a);
    if !(inf_slope > 0.0) {
        return Err(refuse("the slope vanishes inside the ball"));
    }
    let kappa = opts.margin / inf_slope;

    let reach = [z - a, z + a]
        .iter()
        .map(|&v| g.eval(v).map_or(0.0, |set| set.distance_to(p)))
        .fold(f64::INFINITY, f64::min);
    let ordinate_gap = bracketing_folds(folds, z)
        .map(|f| (f.y - p).abs())
        .fold(f64::INFINITY, f64::min);
    let b = opts.safety * reach.min(ordinate_gap).min(opts.ordinate_cap);
    if !(b > 0.0) {
        return Err(refuse("no ordinate room around p(t)"));
    }
    Ok(SmrCertificate { t, z, a, b, kappa })
}

/// The folds at the closest abscissa on each side of `z`.
fn bracketing_folds(folds: &[FoldPoint], z: f64) -> impl Iterator<Item = &FoldPoint> {
    let left = folds
        .iter()
        .filter(|f| f.z < z)
        .map(|f| f.z)
        .fold(f64::NEG_INFINITY, f64::max);
    let right = folds
        .iter()
        .filter(|f| f.z > z)
        .map(|f| f.z)
        .fold(f64::INFINITY, f64::min);
    folds.iter().filter(move |f| f.z == left || f.z == right)
}

/// Certificates for every sample of a trajectory, in sample order.
pub fn certify_trajectory(
    eq: &GeneralizedEquation,
    traj: &Trajectory,
    opts: &CertifyOptions,
) -> Vec<Result<SmrCertificate>> {
    traj.samples
        .par_iter()
        .map(|s| smr_pointwise(eq, s.t, s.z, opts))
        .collect()
}

/// Shrinks the radii of a certificate, keeping `κ`.
pub fn reduce_radii(cert: &SmrCertificate, a: f64, b: f64) -> Result<SmrCertificate> {
    if !(a > 0.0 && a <= cert.a && b > 0.0 && b <= cert.b) {
        return Err(Error::InvalidRadii(format!(
            "need 0 < a' <= {} and 0 < b' <= {}, got a' = {a}, b' = {b}",
            cert.a, cert.b
        )));
    }
    let product = cert.kappa * b;
    if product > a {
        return Err(Error::RatioViolation { product, a });
    }
    Ok(SmrCertificate { a, b, ..*cert })
}

/// One `(a, b, κ)` valid at every certified sample.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UniformCertificate {
    pub a: f64,
    pub b: f64,
    pub kappa: f64,
    /// `a / κ`, the cap that enforces `κ·b ≤ a`.
    pub b_ratio_cap: f64,
    /// `min b_t` over the partition.
    pub b_pointwise_min: f64,
    #[serde(skip)]
    pub partition: Vec<SmrCertificate>,
}

/// `κ = max κ_t`, `a = min a_t`, `b = min(a/κ, min b_t)`.
pub fn uniform_certificate(certs: &[SmrCertificate]) -> Result<UniformCertificate> {
    if certs.is_empty() {
        return Err(Error::EmptyInput);
    }
    let kappa = certs
        .iter()
        .map(|c| c.kappa)
        .fold(f64::NEG_INFINITY, f64::max);
    let a = certs.iter().map(|c| c.a).fold(f64::INFINITY, f64::min);
    let b_pointwise_min = certs.iter().map(|c| c.b).fold(f64::INFINITY, f64::min);
    let b_ratio_cap = ratio_cap(a, kappa);
    Ok(UniformCertificate {
        a,
        b: b_ratio_cap.min(b_pointwise_min),
        kappa,
        b_ratio_cap,
        b_pointwise_min,
        partition: certs.to_vec(),
    })
}

/// Largest float `b` with `κ·b ≤ a`, starting from the rounded quotient.
pub fn ratio_cap(a: f64, kappa: f64) -> f64 {
    let mut b = a / kappa;
    while kappa * b > a && b > 0.0 {
        b = f64::from_bits(b.to_bits() - 1);
    }
    b
}

impl UniformCertificate {
    /// The uniform constants as a certificate at one partition point.
    pub fn at(&self, index: usize) -> SmrCertificate {
        let c = &self.partition[index];
        SmrCertificate {
            t: c.t,
            z: c.z,
            a: self.a,
            b: self.b,
            kappa: self.kappa,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{compose_series, Component, Signal};

    fn cert(a: f64, b: f64, kappa: f64) -> SmrCertificate {
        SmrCertificate {
            t: 0.0,
            z: 0.0,
            a,
            b,
            kappa,
        }
    }

    #[test]
    fn ratio_law() {
        assert!(reduce_radii(&cert(1.0, 1.0, 0.5), 0.5, 0.5).is_ok());
        assert!(matches!(
            reduce_radii(&cert(1.0, 1.0, 2.0), 0.5, 0.5),
            Err(Error::RatioViolation { .. })
        ));
        let c = cert(1.0, 1.0, 0.5);
        assert_eq!(reduce_radii(&c, 1.0, 1.0).unwrap(), c);
        assert!(matches!(
            reduce_radii(&c, 2.0, 1.0),
            Err(Error::InvalidRadii(_))
        ));
    }

    #[test]
    fn uniform_arithmetic() {
        let u = uniform_certificate(&[cert(1.0, 1.0, 0.5), cert(0.8, 2.0, 0.6)]).unwrap();
        assert_eq!((u.kappa, u.a), (0.6, 0.8));
        assert_eq!(u.b, 1.0);
        assert!(u.kappa * u.b <= u.a);
        let single = uniform_certificate(&[cert(1.0, 1.0, 0.5)]).unwrap();
        assert_eq!((single.a, single.b, single.kappa), (1.0, 1.0, 0.5));
        assert_eq!(uniform_certificate(&[]).unwrap_err(), Error::EmptyInput);
    }

    #[test]
    fn affine_certificate() {
        let eq = compose_series(
            &[Component::Resistor { resistance: 50.0 }],
            Signal::constant(5.0),
        )
        .unwrap();
        let c = smr_pointwise(&eq, 0.3, 0.1, &CertifyOptions::default()).unwrap();
        assert!((c.kappa - 1.05 / 50.0).abs() < 1e-15);
        assert_eq!(c.a, 0.95);
        assert!(smr_pointwise(&eq, 0.3, 0.2, &CertifyOptions::default()).is_err());
    }

    #[test]
    fn segment_points_are_refused() {
        let eq = compose_series(
            &[
                Component::Resistor { resistance: 10.0 },
                Component::PracticalDiode {
                    forward_voltage: 0.7,
                    breakdown_voltage: 5.0,
                },
            ],
            Signal::constant(0.0),
        )
        .unwrap();
        let err = smr_pointwise(&eq, 0.0, 0.0, &CertifyOptions::default()).unwrap_err();
        assert!(matches!(err, Error::OnFold { .. }));
    }
}
