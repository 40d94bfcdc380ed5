//! CSV, JSON and SVG emission. Numbers use Rust's shortest round-trip
//! formatting so repeated runs are byte-identical.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use gecert_core::regularity::{SmrCertificate, UniformCertificate};
use gecert_core::solver::{Trajectory, TrajectoryBundle};

use crate::report::RunReport;

pub const TRAJECTORIES_CSV: &str = "trajectories.csv";
pub const CERTIFICATE_CSV: &str = "certificate.csv";
pub const UNIFORM_CSV: &str = "uniform.csv";
pub const PERTURBED_CSV: &str = "perturbed.csv";
pub const REPORT_JSON: &str = "report.json";
pub const TRAJECTORIES_SVG: &str = "trajectories.svg";

fn create(path: &Path) -> io::Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

pub fn write_trajectories(dir: &Path, bundle: &TrajectoryBundle) -> io::Result<()> {
    let mut w = create(&dir.join(TRAJECTORIES_CSV))?;
    writeln!(w, "t,branch_id,z")?;
    for traj in &bundle.trajectories {
        for s in &traj.samples {
            writeln!(w, "{},{},{}", s.t, traj.branch_id, s.z)?;
        }
    }
    w.flush()
}

pub fn write_certificates(dir: &Path, certs: &[SmrCertificate]) -> io::Result<()> {
    let mut w = create(&dir.join(CERTIFICATE_CSV))?;
    writeln!(w, "t,z,a_t,b_t,kappa_t")?;
    for c in certs {
        writeln!(w, "{},{},{},{},{}", c.t, c.z, c.a, c.b, c.kappa)?;
    }
    w.flush()
}

pub fn write_uniform(dir: &Path, u: &UniformCertificate) -> io::Result<()> {
    let mut w = create(&dir.join(UNIFORM_CSV))?;
    writeln!(w, "a,b,kappa")?;
    writeln!(w, "{},{},{}", u.a, u.b, u.kappa)?;
    w.flush()
}

pub fn write_perturbed(dir: &Path, base: &Trajectory, tilde: &Trajectory) -> io::Result<()> {
    let mut w = create(&dir.join(PERTURBED_CSV))?;
    writeln!(w, "t,branch_id,z,z_tilde,deviation")?;
    for (s, r) in base.samples.iter().zip(&tilde.samples) {
        writeln!(
            w,
            "{},{},{},{},{}",
            s.t,
            base.branch_id,
            s.z,
            r.z,
            (r.z - s.z).abs()
        )?;
    }
    w.flush()
}

pub fn write_report(dir: &Path, report: &RunReport) -> io::Result<()> {
    let mut w = create(&dir.join(REPORT_JSON))?;
    serde_json::to_writer_pretty(&mut w, report)?;
    writeln!(w)?;
    w.flush()
}

/// One polyline per branch, current against time, each branch scaled to
/// its own band so that branches of very different size stay readable.
pub fn write_svg(
    dir: &Path,
    bundle: &TrajectoryBundle,
    tilde: Option<&Trajectory>,
) -> io::Result<()> {
    const WIDTH: f64 = 800.0;
    const BAND: f64 = 160.0;
    const PAD: f64 = 20.0;
    let n = bundle.trajectories.len().max(1);
    let height = n as f64 * (BAND + PAD) + PAD;
    let mut w = create(&dir.join(TRAJECTORIES_SVG))?;
    writeln!(
        w,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{height}" viewBox="0 0 {WIDTH} {height}">"#
    )?;
    for (k, traj) in bundle.trajectories.iter().enumerate() {
        let top = PAD + k as f64 * (BAND + PAD);
        let mut lines: Vec<(&Trajectory, &str)> = vec![(traj, "black")];
        if let Some(t) = tilde.filter(|t| t.branch_id == traj.branch_id) {
            lines.push((t, "crimson"));
        }
        let (lo, hi) = lines
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |acc, (t, _)| {
                let (a, b) = t.z_range();
                (acc.0.min(a), acc.1.max(b))
            });
        let span = if hi > lo { hi - lo } else { 1.0 };
        writeln!(
            w,
            r#"<text x="4" y="{}" font-size="12">branch {} z in [{lo}, {hi}] A</text>"#,
            top - 4.0,
            traj.branch_id
        )?;
        for (t, colour) in lines {
            let pts: Vec<String> = t
                .samples
                .iter()
                .map(|s| {
                    let x = s.t * WIDTH;
                    let y = top + BAND - (s.z - lo) / span * BAND;
                    format!("{x:.2},{y:.2}")
                })
                .collect();
            writeln!(
                w,
                r#"<polyline fill="none" stroke="{colour}" stroke-width="1" points="{}"/>"#,
                pts.join(" ")
            )?;
        }
    }
    writeln!(w, "</svg>")?;
    w.flush()
}
