//! Layered rigid/soft microstructure with a laminate grafted into each soft
//! layer, its energy, and the ε-sweep toward the homogenized limit.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{Matrix2, Vector2};
use crate::energy::{soft_gradient, w_condensed, w_hom, ExtendedEnergy, HomValue, SlipSystem};
use crate::error::{Error, Result};
use crate::laminate::{decompose, LaminateDecomposition};
use crate::tolerances::{FIELD_MEMBERSHIP_TOL, MANIFOLD_TOL};

/// Constant macroscopic shear `gamma` on `x₂ ∈ (t_{i−1}, t_end)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Band {
    pub gamma: f64,
    pub t_end: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct MicrostructureSpec {
    pub slip: SlipSystem,
    pub rotation: Matrix2,
    pub bands: Vec<Band>,
    /// Layer period ε.
    pub epsilon: f64,
    /// Laminate period as a fraction of the soft layer thickness `ελ`.
    pub laminate_period: f64,
    /// Side `l` of the square domain `(0, l)²`.
    pub domain_side: f64,
    pub grid_n: usize,
}

impl MicrostructureSpec {
    /// Thinnest feature: soft layer or laminate stripe.
    pub fn finest_feature(&self) -> f64 {
        let soft = self.epsilon * self.slip.lambda();
        soft.min(self.laminate_period * soft)
    }

    /// Grid size giving `cells_per_feature` cells across the finest feature.
    pub fn grid_for(&self, cells_per_feature: usize) -> usize {
        let raw = cells_per_feature as f64 * self.domain_side / self.finest_feature();
        // Guard against 2047.9999 for exactly representable ratios.
        (raw - 1e-9).ceil() as usize
    }

    fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Precondition(msg));
        let l = self.domain_side;
        if !(l > 0.0) {
            return fail(format!("domain side {l} must be positive"));
        }
        if !(self.epsilon > 0.0 && self.epsilon <= l) {
            return fail(format!("ε = {} must lie in (0, l]", self.epsilon));
        }
        if !(self.laminate_period > 0.0) {
            return fail(format!("laminate period {} must be positive", self.laminate_period));
        }
        let rot_err = (self.rotation.transpose() * self.rotation - Matrix2::IDENTITY).frobenius();
        if rot_err > 1e-12 || self.rotation.det() < 0.0 {
            return fail("rotation must lie in SO(2)".into());
        }
        let mut prev = 0.0;
        for b in &self.bands {
            if !(b.t_end > prev) {
                return fail(format!("band ends must increase, got {} after {prev}", b.t_end));
            }
            prev = b.t_end;
        }
        if self.bands.is_empty() || (prev - l).abs() > 1e-12 * l.max(1.0) {
            return fail(format!("bands must cover (0, {l}), last end is {prev}"));
        }
        let needed = 4.0 * l / self.finest_feature();
        if (self.grid_n as f64) < needed - 1e-9 {
            return fail(format!(
                "grid_n = {} resolves the finest feature with fewer than 4 cells (need {needed})",
                self.grid_n
            ));
        }
        Ok(())
    }
}

/// Decomposition data of one band.
#[derive(Clone, Debug, PartialEq)]
pub struct BandLaminate {
    pub n: Matrix2,
    pub decomposition: LaminateDecomposition,
    pub whom: HomValue,
    /// Layer indices `k` whose soft strip `[kε, (k+λ)ε)` lies in the band after snapping.
    pub strips: std::ops::Range<i64>,
}

impl BandLaminate {
    /// Closed-form value, or the laminate energy where only bounds are known.
    pub fn target_energy(&self) -> f64 {
        match self.whom {
            HomValue::Known(e) => e.as_f64(),
            HomValue::Bounds { .. } => self.decomposition.energy,
        }
    }
}

/// Piecewise-constant gradient field on a `grid_n × grid_n` cell grid,
/// stored as palette indices. Index 0 is the rigid rotation; band `i` uses
/// `1 + 2i` for `F₊` and `2 + 2i` for `F₋`.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    pub grid_n: usize,
    pub cell: f64,
    pub palette: Vec<Matrix2>,
    /// Row-major over `x₂`, then `x₁`.
    pub index: Vec<u16>,
    pub flagged: Vec<bool>,
    pub bands: Vec<BandLaminate>,
}

impl GradientField {
    pub fn value(&self, i1: usize, i2: usize) -> Matrix2 {
        self.palette[self.index[i2 * self.grid_n + i1] as usize]
    }

    pub fn distinct_values(&self) -> usize {
        let mut seen = vec![false; self.palette.len()];
        for &k in &self.index {
            seen[k as usize] = true;
        }
        seen.iter().filter(|&&b| b).count()
    }
}

/// Does `(lo, hi)` strictly contain a point of `ℤ + offset`?
fn straddles(lo: f64, hi: f64, offset: f64) -> bool {
    let slack = 1e-9 * (hi - lo);
    let k = (lo + slack - offset).floor() + 1.0 + offset;
    k < hi - slack
}

fn frac(x: f64) -> f64 {
    x - x.floor()
}

pub fn build_gradient_field(spec: &MicrostructureSpec) -> Result<GradientField> {
    spec.validate()?;
    let s = &spec.slip;
    let lambda = s.lambda();
    let eps = spec.epsilon;
    let r = spec.rotation;

    let mut palette = vec![r];
    let mut bands = Vec::with_capacity(spec.bands.len());
    let mut t_prev = 0.0;
    for b in &spec.bands {
        let n = soft_gradient(b.gamma, lambda, r);
        let decomposition = decompose(n, s, MANIFOLD_TOL)?;
        let first = (t_prev / eps - 1e-9).ceil() as i64;
        let end = (b.t_end / eps + 1e-9).floor() as i64;
        palette.push(decomposition.f_plus);
        palette.push(decomposition.f_minus);
        bands.push(BandLaminate {
            n,
            whom: w_hom(n, s, MANIFOLD_TOL),
            decomposition,
            strips: first..end.max(first),
        });
        t_prev = b.t_end;
    }

    let g = spec.grid_n;
    let h = spec.domain_side / g as f64;
    let period = spec.laminate_period * eps * lambda;
    let rows: Vec<(Vec<u16>, Vec<bool>)> = (0..g)
        .into_par_iter()
        .map(|i2| {
            let x2 = (i2 as f64 + 0.5) * h;
            let (y_lo, y_hi) = ((x2 - 0.5 * h) / eps, (x2 + 0.5 * h) / eps);
            let layer_cut = straddles(y_lo, y_hi, 0.0) || straddles(y_lo, y_hi, lambda);
            let y = x2 / eps;
            let k = y.floor() as i64;
            let band = (frac(y) < lambda)
                .then(|| bands.iter().position(|b| b.strips.contains(&k)))
                .flatten();
            let mut idx = vec![0u16; g];
            let mut flag = vec![layer_cut; g];
            if let Some(bi) = band {
                let d = &bands[bi].decomposition;
                let nrm = d.normal();
                let laminated = !d.is_single_point();
                let reach = 0.5 * h * (nrm.x.abs() + nrm.y.abs()) / period;
                let corner = Vector2::new(0.0, k as f64 * eps);
                for i1 in 0..g {
                    let x = Vector2::new((i1 as f64 + 0.5) * h, x2) - corner;
                    let phase = x.dot(nrm) / period;
                    let plus = frac(phase) < d.mu;
                    idx[i1] = (1 + 2 * bi + usize::from(!plus)) as u16;
                    if laminated
                        && (straddles(phase - reach, phase + reach, 0.0)
                            || straddles(phase - reach, phase + reach, d.mu))
                    {
                        flag[i1] = true;
                    }
                }
            }
            (idx, flag)
        })
        .collect();
    let mut index = Vec::with_capacity(g * g);
    let mut flagged = Vec::with_capacity(g * g);
    for (idx, flag) in rows {
        index.extend(idx);
        flagged.extend(flag);
    }
    Ok(GradientField {
        grid_n: g,
        cell: h,
        palette,
        index,
        flagged,
        bands,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EnergyReport {
    pub epsilon: f64,
    pub hlam: f64,
    pub e_eps: ExtendedEnergy,
    pub target: f64,
    pub rel_error: f64,
    pub flagged_area: f64,
    pub avg_gradient: Matrix2,
    pub avg_gradient_target: Matrix2,
}

impl EnergyReport {
    pub fn avg_gradient_deviation(&self) -> f64 {
        (self.avg_gradient - self.avg_gradient_target).frobenius()
    }
}

/// Energy and mean gradient of the field. Sums run over exact per-value
/// cell counts, so the result does not depend on scheduling.
pub fn energy_of_field(field: &GradientField, spec: &MicrostructureSpec) -> EnergyReport {
    let g = field.grid_n;
    let counts = field
        .index
        .par_chunks(g)
        .map(|row| {
            let mut c = vec![0u64; field.palette.len()];
            for &k in row {
                c[k as usize] += 1;
            }
            c
        })
        .reduce(
            || vec![0u64; field.palette.len()],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        );
    let flagged_cells = field.flagged.iter().filter(|&&f| f).count();
    let area = field.cell * field.cell;

    let mut e = 0.0;
    let mut infinite = false;
    let mut sum = Matrix2::default();
    for (m, &count) in field.palette.iter().zip(&counts) {
        if count == 0 {
            continue;
        }
        match w_condensed(*m, &spec.slip, FIELD_MEMBERSHIP_TOL) {
            ExtendedEnergy::Finite(w) => e += w * count as f64 * area,
            ExtendedEnergy::Infinite => infinite = true,
        }
        sum = sum + *m * count as f64;
    }
    let total = (g * g) as f64;
    let avg_gradient = sum * (1.0 / total);

    let l = spec.domain_side;
    let lambda = spec.slip.lambda();
    let mut t_prev = 0.0;
    let mut weighted = 0.0;
    let mut gamma_bar = 0.0;
    for (b, lam) in spec.bands.iter().zip(&field.bands) {
        weighted += (b.t_end - t_prev) * lam.target_energy();
        gamma_bar += (b.t_end - t_prev) / l * b.gamma;
        t_prev = b.t_end;
    }
    let target = lambda * l * weighted;
    let e_eps = if infinite {
        ExtendedEnergy::Infinite
    } else {
        ExtendedEnergy::Finite(e)
    };
    EnergyReport {
        epsilon: spec.epsilon,
        hlam: spec.laminate_period,
        e_eps,
        target,
        rel_error: (e_eps.as_f64() - target).abs() / target.max(1e-12),
        flagged_area: flagged_cells as f64 * area,
        avg_gradient,
        avg_gradient_target: spec.rotation * Matrix2::new(1.0, gamma_bar, 0.0, 1.0),
    }
}

/// Run the microstructure at each `ε`, sizing the grid to keep
/// `cells_per_feature` cells across the finest feature.
pub fn sweep(
    base: &MicrostructureSpec,
    eps_list: &[f64],
    cells_per_feature: usize,
) -> Result<Vec<EnergyReport>> {
    eps_list
        .iter()
        .map(|&eps| {
            let mut spec = base.clone();
            spec.epsilon = eps;
            spec.grid_n = spec.grid_for(cells_per_feature);
            let field = build_gradient_field(&spec)?;
            Ok(energy_of_field(&field, &spec))
        })
        .collect()
}

/// Sum with a fixed binary tree, independent of thread scheduling.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    match xs.len() {
        0 => 0.0,
        1 => xs[0],
        n if n <= 8 => xs.iter().sum(),
        n => {
            let (a, b) = xs.split_at(n / 2);
            pairwise_sum(a) + pairwise_sum(b)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AveragingRow {
    pub epsilon: f64,
    pub deviation: f64,
}

/// `|mean over (0,1)² of g(x/ε) − ⟨g⟩|` at cell centers of a `grid_n²` grid.
pub fn averaging_check<G>(g: G, cell_mean: f64, eps_list: &[f64], grid_n: usize) -> Vec<AveragingRow>
where
    G: Fn(f64, f64) -> f64 + Sync,
{
    let h = 1.0 / grid_n as f64;
    eps_list
        .iter()
        .map(|&eps| {
            let rows: Vec<f64> = (0..grid_n)
                .into_par_iter()
                .map(|i2| {
                    let y2 = (i2 as f64 + 0.5) * h / eps;
                    let row: Vec<f64> = (0..grid_n)
                        .map(|i1| g((i1 as f64 + 0.5) * h / eps, y2))
                        .collect();
                    pairwise_sum(&row)
                })
                .collect();
            let mean = pairwise_sum(&rows) / (grid_n * grid_n) as f64;
            AveragingRow {
                epsilon: eps,
                deviation: (mean - cell_mean).abs(),
            }
        })
        .collect()
}
