//! Brute-force first-order lamination envelope.
//!
//! Independent of the closed forms in [`crate::energy`] and the constructions
//! in [`crate::laminate`]: every det-preserving rank-one line through `F` is
//! parametrized by an angle `φ`, its intersections with `M` are found, and
//! the cheapest two-point laminate is kept.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{bc_to_matrix, solve_unit_image_times, Matrix2, RankOneLine, Vector2};
use crate::energy::{on_manifold, w_condensed, w_hom, ExtendedEnergy, HomValue, SlipSystem};
use crate::error::{Error, Result};
use crate::laminate::{Direction, LaminateDecomposition, LaminateKind};
use crate::regions::{classify, grid_centers, RegionLabel};
use crate::tolerances::ORACLE_REFINE_WIDTH;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub value: ExtendedEnergy,
    pub best: Option<LaminateDecomposition>,
    pub directions_scanned: usize,
    pub refined_angle: f64,
}

/// Cheapest laminate on the line `F(I + t m⊗m⊥)`, `m = (cos φ, sin φ)`.
#[derive(Clone, Copy, Debug)]
struct Candidate {
    energy: f64,
    phi: f64,
    t_a: f64,
    t_b: f64,
}

fn line_at(f: Matrix2, phi: f64) -> RankOneLine {
    let m = Vector2::from_angle(phi);
    RankOneLine::new(f, m, m.perp())
}

fn point_energy(line: &RankOneLine, t: f64) -> f64 {
    (line.point(t).frobenius_sq() - 2.0).max(0.0)
}

fn scan_direction(f: Matrix2, s: &SlipSystem, phi: f64) -> Option<Candidate> {
    let line = line_at(f, phi);
    let mut roots = [0.0; 4];
    let mut k = 0;
    for v in [s.v1(), s.v2()] {
        for t in solve_unit_image_times(&line, v).roots().to_vec() {
            roots[k] = t;
            k += 1;
        }
    }
    let roots = &roots[..k];
    let mut best: Option<Candidate> = None;
    for &t_a in roots.iter().filter(|&&t| t <= 0.0) {
        for &t_b in roots.iter().filter(|&&t| t >= 0.0) {
            if t_a == t_b {
                continue;
            }
            let mu_a = t_b / (t_b - t_a);
            let energy = mu_a * point_energy(&line, t_a) + (1.0 - mu_a) * point_energy(&line, t_b);
            if best.is_none_or(|b| energy < b.energy) {
                best = Some(Candidate { energy, phi, t_a, t_b });
            }
        }
    }
    best
}

fn energy_at(f: Matrix2, s: &SlipSystem, phi: f64) -> f64 {
    scan_direction(f, s, phi).map_or(f64::INFINITY, |c| c.energy)
}

fn better(a: Option<Candidate>, b: Option<Candidate>) -> Option<Candidate> {
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.energy < x.energy { y } else { x }),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Golden-section search for the minimum of the line energy in `[lo, hi]`.
/// Returns the best candidate seen at any evaluation.
fn golden_refine(f: Matrix2, s: &SlipSystem, mut lo: f64, mut hi: f64) -> Option<Candidate> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut c1 = scan_direction(f, s, x1);
    let mut c2 = scan_direction(f, s, x2);
    let mut best = better(c1, c2);
    let value = |c: Option<Candidate>| c.map_or(f64::INFINITY, |c| c.energy);
    while hi - lo > ORACLE_REFINE_WIDTH {
        if value(c1) <= value(c2) {
            hi = x2;
            x2 = x1;
            c2 = c1;
            x1 = hi - inv_phi * (hi - lo);
            c1 = scan_direction(f, s, x1);
            best = better(best, c1);
        } else {
            lo = x1;
            x1 = x2;
            c1 = c2;
            x2 = lo + inv_phi * (hi - lo);
            c2 = scan_direction(f, s, x2);
            best = better(best, c2);
        }
    }
    best
}

/// Numerical first-order laminate envelope `W^lc(F)`.
///
/// Scans `n_dirs` equally spaced angles in `[0, π)`, then refines around the
/// best one by golden section when `refine` is set.
pub fn wlc_numeric_with(
    f: Matrix2,
    s: &SlipSystem,
    n_dirs: usize,
    tol: f64,
    refine: bool,
) -> Result<OracleResult> {
    let residual = (f.det() - 1.0).abs();
    if residual > tol {
        return Err(Error::OffManifold { residual, tol });
    }
    if n_dirs < 8 {
        return Err(Error::Precondition(format!("n_dirs = {n_dirs} must be at least 8")));
    }
    let step = std::f64::consts::PI / n_dirs as f64;
    let mut best: Option<Candidate> = None;
    for k in 0..n_dirs {
        best = better(best, scan_direction(f, s, k as f64 * step));
    }
    let mut scanned = n_dirs;
    if let (true, Some(grid_best)) = (refine, best) {
        let refined = golden_refine(f, s, grid_best.phi - step, grid_best.phi + step);
        best = better(best, refined);
        scanned += (2.0 * step / ORACLE_REFINE_WIDTH).log(1.618_033_988_749_895).ceil() as usize + 2;
    }

    let single = on_manifold(f, s, tol).then(|| w_condensed(f, s, tol).as_f64());
    let pair_energy = best.map_or(f64::INFINITY, |c| c.energy);
    let refined_angle = best.map_or(0.0, |c| c.phi);
    let (value, decomposition) = match single {
        Some(w) if w <= pair_energy => (
            ExtendedEnergy::Finite(w),
            Some(LaminateDecomposition {
                f_plus: f,
                f_minus: f,
                mu: 0.5,
                direction: Direction {
                    a: Vector2::default(),
                    n: s.v1(),
                },
                energy: w,
                kind: LaminateKind::CaseOnManifold,
                tie: false,
            }),
        ),
        _ => match best {
            Some(c) => {
                let line = line_at(f, c.phi);
                let (fm, fp) = (line.point(c.t_a), line.point(c.t_b));
                let m = Vector2::from_angle(c.phi);
                (
                    ExtendedEnergy::Finite(c.energy),
                    Some(LaminateDecomposition {
                        f_plus: fp,
                        f_minus: fm,
                        mu: -c.t_a / (c.t_b - c.t_a),
                        direction: Direction {
                            a: (f * m) * (c.t_b - c.t_a),
                            n: m.perp(),
                        },
                        energy: c.energy,
                        kind: LaminateKind::UpperBoundOnly,
                        tie: false,
                    }),
                )
            }
            None => (ExtendedEnergy::Infinite, None),
        },
    };
    Ok(OracleResult {
        value,
        best: decomposition,
        directions_scanned: scanned,
        refined_angle,
    })
}

/// [`wlc_numeric_with`] with refinement enabled.
pub fn wlc_numeric(f: Matrix2, s: &SlipSystem, n_dirs: usize, tol: f64) -> Result<OracleResult> {
    wlc_numeric_with(f, s, n_dirs, tol, true)
}

/// Oracle energy along the line at angle `phi`, exposed for diagnostics.
pub fn line_envelope(f: Matrix2, s: &SlipSystem, phi: f64) -> f64 {
    energy_at(f, s, phi)
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanRow {
    pub b: f64,
    pub c: f64,
    pub label: RegionLabel,
    pub closed: HomValue,
    pub oracle: ExtendedEnergy,
    /// `|oracle − closed|` where the closed form is known.
    pub discrepancy: Option<f64>,
    /// `oracle − lower` and `upper − oracle` where only bounds are known.
    pub slack_lo: Option<f64>,
    pub slack_hi: Option<f64>,
}

/// Compare closed forms against the oracle over the `(b, c)` grid, skipping
/// cells within `tol` of a region boundary.
pub fn envelope_scan(s: &SlipSystem, range: f64, n: usize, n_dirs: usize, tol: f64) -> Vec<ScanRow> {
    let centers = grid_centers(range, n);
    let rows: Vec<Option<ScanRow>> = (0..n * n)
        .into_par_iter()
        .map(|k| {
            let (b, c) = (centers[k / n], centers[k % n]);
            let f = bc_to_matrix(b, c);
            let label = classify(f, s, tol);
            if !label.is_interior() {
                return None;
            }
            let closed = w_hom(f, s, tol);
            let oracle = wlc_numeric(f, s, n_dirs, tol)
                .map(|r| r.value)
                .unwrap_or(ExtendedEnergy::Infinite);
            let o = oracle.as_f64();
            let (discrepancy, slack_lo, slack_hi) = match closed {
                HomValue::Known(e) => (Some((o - e.as_f64()).abs()), None, None),
                HomValue::Bounds { lower, upper } => (None, Some(o - lower), Some(upper - o)),
            };
            Some(ScanRow {
                b,
                c,
                label,
                closed,
                oracle,
                discrepancy,
                slack_lo,
                slack_hi,
            })
        })
        .collect();
    rows.into_iter().flatten().collect()
}

/// Extremes of an envelope scan.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ScanSummary {
    pub cells: usize,
    pub known_cells: usize,
    pub bounded_cells: usize,
    pub max_discrepancy: f64,
    pub min_slack_lo: f64,
    pub min_slack_hi: f64,
}

pub fn summarize(rows: &[ScanRow]) -> ScanSummary {
    let mut out = ScanSummary {
        cells: rows.len(),
        min_slack_lo: f64::INFINITY,
        min_slack_hi: f64::INFINITY,
        ..Default::default()
    };
    for r in rows {
        if let Some(d) = r.discrepancy {
            out.known_cells += 1;
            out.max_discrepancy = out.max_discrepancy.max(d);
        }
        if let (Some(lo), Some(hi)) = (r.slack_lo, r.slack_hi) {
            out.bounded_cells += 1;
            out.min_slack_lo = out.min_slack_lo.min(lo);
            out.min_slack_hi = out.min_slack_hi.min(hi);
        }
    }
    out
}
