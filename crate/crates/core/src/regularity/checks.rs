use serde::Serialize;

use super::certificate::SmrCertificate;
use crate::circuit::{GeneralizedEquation, Signal};
use crate::error::{Error, Result};
use crate::setmap::ValueSet;
use crate::solver::Trajectory;

/// `G_t(v) = (f + F)(v) − p(t)` for a fixed `t`.
#[derive(Debug, Clone, Copy)]
pub struct AuxiliaryMap<'a> {
    eq: &'a GeneralizedEquation,
    t: f64,
    p_t: f64,
}

impl<'a> AuxiliaryMap<'a> {
    pub fn new(eq: &'a GeneralizedEquation, t: f64) -> Result<Self> {
        Ok(Self {
            eq,
            t,
            p_t: eq.signal().eval(t)?,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn p_t(&self) -> f64 {
        self.p_t
    }

    pub fn eval(&self, v: f64) -> Result<ValueSet> {
        Ok(self.eq.eval_sum(v)?.shift(-self.p_t))
    }

    pub fn inverse(&self, w: f64) -> ValueSet {
        self.eq.sum().invert_at(w + self.p_t)
    }
}

/// Largest violation of `G_t(v) = G_t'(v) + p(t') − p(t)` over `vs` and of
/// `G_t⁻¹(w) = G_t'⁻¹(w + p(t) − p(t'))` over `ws`, as Hausdorff distances.
pub fn auxiliary_shift_check(
    eq: &GeneralizedEquation,
    t: f64,
    t_other: f64,
    vs: &[f64],
    ws: &[f64],
) -> Result<f64> {
    let g = AuxiliaryMap::new(eq, t)?;
    let h = AuxiliaryMap::new(eq, t_other)?;
    let mut worst: f64 = 0.0;
    for &v in vs {
        let lhs = g.eval(v)?;
        let rhs = h.eval(v)?.shift(h.p_t - g.p_t);
        worst = worst.max(lhs.hausdorff(&rhs));
    }
    for &w in ws {
        let lhs = g.inverse(w);
        let rhs = h.inverse(w + g.p_t - h.p_t);
        worst = worst.max(lhs.hausdorff(&rhs));
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LocalizationReport {
    pub single_valued: bool,
    pub lipschitz_estimate: f64,
    pub empty_samples: usize,
    pub multivalued_samples: usize,
    pub pass: bool,
}

/// Samples `n` ordinates evenly on `[−b, b]` and checks that
/// `G_t⁻¹(y) ∩ B_a(z)` is one point each time, with the difference quotient
/// between neighbouring ordinates at most `κ`.
///
/// For a scalar map the largest quotient over all pairs equals the largest
/// over neighbours once the samples are sorted, so only those are compared.
pub fn verify_localization(
    eq: &GeneralizedEquation,
    cert: &SmrCertificate,
    n: usize,
) -> Result<LocalizationReport> {
    let g = AuxiliaryMap::new(eq, cert.t)?;
    let n = n.max(2);
    let mut empty_samples = 0;
    let mut multivalued_samples = 0;
    let mut picked: Vec<(f64, f64)> = Vec::with_capacity(n);
    for i in 0..n {
        let y = -cert.b + 2.0 * cert.b * i as f64 / (n - 1) as f64;
        let local = g.inverse(y).restrict(cert.z, cert.a);
        match local.as_singleton() {
            Some(z) => picked.push((y, z)),
            None if local.is_empty() => empty_samples += 1,
            None => multivalued_samples += 1,
        }
    }
    let lipschitz_estimate = picked
        .windows(2)
        .map(|w| (w[1].1 - w[0].1).abs() / (w[1].0 - w[0].0))
        .fold(0.0, f64::max);
    let single_valued = empty_samples == 0 && multivalued_samples == 0;
    Ok(LocalizationReport {
        single_valued,
        lipschitz_estimate,
        empty_samples,
        multivalued_samples,
        pass: single_valued && lipschitz_estimate <= cert.kappa,
    })
}

/// `max(0, |z(τ) − z(t)| − κ_t·|p(τ) − p(t)|)` over neighbouring samples,
/// with `κ_t` taken from the certificate of the earlier sample.
pub fn continuity_check(
    traj: &Trajectory,
    signal: &Signal,
    certs: &[SmrCertificate],
) -> Result<f64> {
    if certs.len() != traj.samples.len() {
        return Err(Error::GridMismatch);
    }
    let mut worst: f64 = 0.0;
    for (w, cert) in traj.samples.windows(2).zip(certs) {
        let dz = (w[1].z - w[0].z).abs();
        let dp = (signal.eval(w[1].t)? - signal.eval(w[0].t)?).abs();
        worst = worst.max(dz - cert.kappa * dp);
    }
    Ok(worst)
}
