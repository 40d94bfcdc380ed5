use crate::circuit::{GeneralizedEquation, Signal};
use crate::error::{Error, Result};
use crate::regularity::{AuxiliaryMap, UniformCertificate};
use crate::solver::{Sample, Trajectory};

/// Uniform `b` shrunk, if needed, so that `κ·b < a` holds strictly.
fn strict_b(u: &UniformCertificate) -> f64 {
    if u.kappa * u.b < u.a {
        u.b
    } else {
        (u.a / u.kappa) * (1.0 - 1e-12)
    }
}

/// Whether every window `(t − ρ, t + ρ)` centred on a sample keeps
/// `|p̃(τ) − p̃(t)| < b/4` and `|z(τ) − z(t)| < a/2`. Returns the first
/// offending centre otherwise.
fn first_bad_window(
    traj: &Trajectory,
    p_values: &[f64],
    rho: f64,
    half_a: f64,
    quarter_b: f64,
) -> Option<f64> {
    let s = &traj.samples;
    for (i, c) in s.iter().enumerate() {
        let ok = |j: usize| {
            (p_values[j] - p_values[i]).abs() < quarter_b && (s[j].z - c.z).abs() < half_a
        };
        let right = (i..s.len()).take_while(|&j| s[j].t - c.t < rho);
        let left = (0..i).rev().take_while(|&j| c.t - s[j].t < rho);
        if !right.chain(left).all(ok) {
            return Some(c.t);
        }
    }
    None
}

/// Largest `ρ = 0.5 / 2^k` whose windows all satisfy the window
/// preconditions on the sample grid.
pub fn choose_window_radius(
    traj: &Trajectory,
    p_tilde: &Signal,
    ucert: &UniformCertificate,
) -> Result<f64> {
    let p_values = traj
        .samples
        .iter()
        .map(|s| p_tilde.eval(s.t))
        .collect::<Result<Vec<_>>>()?;
    let quarter_b = strict_b(ucert) / 4.0;
    let mut rho = 0.5;
    let mut last_bad = 0.0;
    for _ in 0..64 {
        match first_bad_window(traj, &p_values, rho, ucert.a / 2.0, quarter_b) {
            None => return Ok(rho),
            Some(t) => last_bad = t,
        }
        rho /= 2.0;
    }
    Err(Error::WindowTooWide { rho, t: last_bad })
}

/// Method 2: `z̃(τ) = G_t⁻¹(p̃(τ) − p(t)) ∩ B_{a/2}(z(t))` on windows
/// `(t − ρ, t + ρ)` centred on samples, stitched together.
///
/// Centres are chosen left to right so that neighbouring windows overlap;
/// values on overlaps must agree within `tol_z`.
pub fn method2_trajectory(
    eq: &GeneralizedEquation,
    traj: &Trajectory,
    ucert: &UniformCertificate,
    p_tilde: &Signal,
    rho: f64,
    tol_z: f64,
) -> Result<Trajectory> {
    let s = &traj.samples;
    if s.is_empty() {
        return Err(Error::EmptyInput);
    }
    let p_tilde_values = s
        .iter()
        .map(|x| p_tilde.eval(x.t))
        .collect::<Result<Vec<_>>>()?;
    let half_a = ucert.a / 2.0;
    let quarter_b = strict_b(ucert) / 4.0;
    let mut out: Vec<Option<f64>> = vec![None; s.len()];

    let mut c = 0;
    loop {
        let centre = &s[c];
        let g = AuxiliaryMap::new(eq, centre.t)?;
        let lo = (0..c)
            .rev()
            .take_while(|&j| centre.t - s[j].t < rho)
            .last()
            .unwrap_or(c);
        let hi = (c..s.len())
            .take_while(|&j| s[j].t - centre.t < rho)
            .last()
            .unwrap_or(c);
        for j in lo..=hi {
            if (p_tilde_values[j] - p_tilde_values[c]).abs() >= quarter_b
                || (s[j].z - centre.z).abs() >= half_a
            {
                return Err(Error::WindowTooWide { rho, t: centre.t });
            }
            let y = p_tilde_values[j] - g.p_t();
            let local = g.inverse(y).restrict(centre.z, half_a);
            let z = match local.as_singleton() {
                Some(z) => z,
                None if local.is_empty() => return Err(Error::LocalizationEmpty { t: s[j].t }),
                None => {
                    return Err(Error::LocalizationMultivalued {
                        t: s[j].t,
                        count: local.len(),
                    })
                }
            };
            match out[j] {
                Some(prev) if (prev - z).abs() > tol_z => {
                    return Err(Error::InconsistentOverlap {
                        t: s[j].t,
                        gap: (prev - z).abs(),
                    })
                }
                Some(_) => {}
                None => out[j] = Some(z),
            }
        }
        if hi + 1 >= s.len() {
            break;
        }
        // next centre: the window's right edge, so the two windows overlap
        c = if hi > c { hi } else { c + 1 };
    }

    let samples = s
        .iter()
        .zip(out)
        .map(|(x, z)| Sample {
            z: z.expect("windows cover every sample"),
            ..*x
        })
        .collect();
    Ok(Trajectory::new(traj.branch_id, samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{compose_series, Component, Sinusoid};
    use crate::grid::Grid;
    use crate::perturb::localize_pointwise;
    use crate::regularity::{certify_trajectory, uniform_certificate, CertifyOptions};
    use crate::solver::{link_trajectories, sweep};

    #[test]
    fn agrees_with_pointwise_localization() {
        let p = Signal::new(
            3.0,
            vec![Sinusoid {
                amplitude: 1.0,
                omega: 6.0,
                phase: 0.0,
            }],
            None,
        )
        .unwrap();
        let eq = compose_series(&[Component::Resistor { resistance: 10.0 }], p).unwrap();
        let grid = Grid::uniform(101).unwrap();
        let traj = link_trajectories(&sweep(&eq, &grid).unwrap(), &grid, 1.0)
            .unwrap()
            .trajectories
            .remove(0);
        let certs: Vec<_> = certify_trajectory(&eq, &traj, &CertifyOptions::default())
            .into_iter()
            .collect::<Result<_>>()
            .unwrap();
        let u = uniform_certificate(&certs).unwrap();
        let p_tilde = Signal::constant(3.1);
        let rho = choose_window_radius(&traj, &p_tilde, &u).unwrap();
        let m2 = method2_trajectory(&eq, &traj, &u, &p_tilde, rho, 1e-12).unwrap();
        let m1 = localize_pointwise(&eq, &traj, &p_tilde, u.a).unwrap();
        for (x, y) in m1.samples.iter().zip(&m2.samples) {
            assert!((x.z - y.z).abs() <= 1e-12);
        }
    }
}
