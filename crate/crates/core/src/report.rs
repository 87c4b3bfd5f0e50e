//! CSV emission with a fixed 17-significant-digit number format.

use std::io::{self, Write};

use crate::energy::{h, h_family, h_perp, w_hom, w_hom_scalar, soft_gradient, ExtendedEnergy, HKind, HomValue, SlipSystem};
use crate::homogenize::EnergyReport;
use crate::oracle::ScanRow;
use crate::regions::RegionCell;
use crate::algebra::Matrix2;

/// `x` with 17 significant digits; `inf` for infinities.
pub fn num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{x:.16e}")
    }
}

pub fn energy(e: ExtendedEnergy) -> String {
    match e {
        ExtendedEnergy::Finite(v) => num(v),
        ExtendedEnergy::Infinite => "inf".into(),
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// `(whom, lower, upper)` columns.
fn hom_columns(v: HomValue) -> (String, String, String) {
    match v {
        HomValue::Known(e) => (energy(e), String::new(), String::new()),
        HomValue::Bounds { lower, upper } => (String::new(), num(lower), num(upper)),
    }
}

pub fn write_region_map<W: Write>(mut w: W, cells: &[RegionCell]) -> io::Result<()> {
    writeln!(w, "b,c,region,boundary,whom,lower,upper")?;
    for cell in cells {
        let boundary: Vec<&str> = cell.label.boundary.iter().map(|t| t.as_str()).collect();
        let (whom, lo, hi) = hom_columns(cell.energy);
        writeln!(
            w,
            "{},{},{},{},{whom},{lo},{hi}",
            num(cell.b),
            num(cell.c),
            cell.label.tag,
            boundary.join("|")
        )?;
    }
    Ok(())
}

pub fn write_envelope_scan<W: Write>(mut w: W, rows: &[ScanRow]) -> io::Result<()> {
    writeln!(w, "b,c,region,closed,oracle,discrepancy,slack_lo,slack_hi")?;
    for r in rows {
        let closed = r.closed.known().map(energy).unwrap_or_default();
        writeln!(
            w,
            "{},{},{},{closed},{},{},{},{}",
            num(r.b),
            num(r.c),
            r.label.tag,
            energy(r.oracle),
            opt(r.discrepancy),
            opt(r.slack_lo),
            opt(r.slack_hi)
        )?;
    }
    Ok(())
}

pub fn write_homogenize<W: Write>(mut w: W, reports: &[EnergyReport]) -> io::Result<()> {
    writeln!(w, "epsilon,hlam,e_eps,target,rel_error,flagged_area")?;
    for r in reports {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            num(r.epsilon),
            num(r.hlam),
            energy(r.e_eps),
            num(r.target),
            num(r.rel_error),
            num(r.flagged_area)
        )?;
    }
    Ok(())
}

/// `z, h, h*, h⊥, h⊥*` on `samples` equally spaced points of `[0, zmax]`.
/// Starred columns are empty below their domain floor.
pub fn write_hplot<W: Write>(mut w: W, theta: f64, zmax: f64, samples: usize) -> io::Result<()> {
    writeln!(w, "z,h,h_star,h_perp,h_perp_star")?;
    let denom = samples.saturating_sub(1).max(1) as f64;
    for k in 0..samples {
        let z = zmax * k as f64 / denom;
        let star = h_family(z, theta, HKind::HStar).ok();
        let perp_star = h_family(z, theta, HKind::HPerpStar).ok();
        writeln!(
            w,
            "{},{},{},{},{}",
            num(z),
            num(h(z, theta)),
            opt(star),
            num(h_perp(z, theta)),
            opt(perp_star)
        )?;
    }
    Ok(())
}

/// Relaxed soft-phase energy against the macroscopic shear `γ` on `n`
/// equally spaced points of `[a, b]`.
pub fn write_whom_gamma<W: Write>(mut w: W, s: &SlipSystem, a: f64, b: f64, n: usize, tol: f64) -> io::Result<()> {
    writeln!(w, "gamma,whom,lower,upper")?;
    let denom = n.saturating_sub(1).max(1) as f64;
    for k in 0..n {
        let gamma = a + (b - a) * k as f64 / denom;
        let value = if s.is_orthogonal() {
            HomValue::Known(ExtendedEnergy::Finite(w_hom_scalar(gamma, s)))
        } else {
            w_hom(soft_gradient(gamma, s.lambda(), Matrix2::IDENTITY), s, tol)
        };
        let (whom, lo, hi) = hom_columns(value);
        writeln!(w, "{},{whom},{lo},{hi}", num(gamma))?;
    }
    Ok(())
}
