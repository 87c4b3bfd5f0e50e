//! Simple laminates realizing the relaxed energy.
//!
//! Every decomposition writes a det-1 target `N` as `μF₊ + (1−μ)F₋` with
//! `F₊ − F₋` rank one and `F₊`, `F₋` on the slip manifold `M`.

use serde::Serialize;

use crate::algebra::{solve_quadratic, solve_unit_image_times, Matrix2, RankOneLine, Vector2};
use crate::energy::SlipSystem;
use crate::error::{Error, Result};
use crate::regions::{classify, RegionTag};
use crate::tolerances::TANGENCY_TOL;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum LaminateKind {
    CaseA,
    CaseAPerp,
    /// `|Nv₁| ≤ 1`: single-slip laminate along `v₁`.
    CaseN1lemN2,
    /// `|Nv₂| ≤ 1`: single-slip laminate along `v₂`.
    CaseN2,
    CaseN1capN2,
    CaseOnManifold,
    UpperBoundOnly,
}

/// Rank-one connection `F₊ − F₋ = a ⊗ n` with `|n| = 1`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Direction {
    pub a: Vector2,
    pub n: Vector2,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LaminateDecomposition {
    pub f_plus: Matrix2,
    pub f_minus: Matrix2,
    /// Volume fraction of `f_plus`.
    pub mu: f64,
    pub direction: Direction,
    pub energy: f64,
    pub kind: LaminateKind,
    /// Another admissible pair reached the same energy.
    pub tie: bool,
}

fn manifold_energy(f: Matrix2) -> f64 {
    (f.frobenius_sq() - 2.0).max(0.0)
}

impl LaminateDecomposition {
    /// `F₊ = F₋ = N`, `μ = 1/2`.
    pub fn single_point(n: Matrix2, s: &SlipSystem) -> Self {
        Self {
            f_plus: n,
            f_minus: n,
            mu: 0.5,
            direction: Direction {
                a: Vector2::default(),
                n: s.v1(),
            },
            energy: manifold_energy(n),
            kind: LaminateKind::CaseOnManifold,
            tie: false,
        }
    }

    /// Laminate between `line.point(t_minus)` and `line.point(t_plus)` with
    /// `t_minus < 0 < t_plus`, so that the average is `line.base`.
    fn on_line(line: &RankOneLine, t_minus: f64, t_plus: f64, kind: LaminateKind) -> Self {
        let f_minus = line.point(t_minus);
        let f_plus = line.point(t_plus);
        let mu = -t_minus / (t_plus - t_minus);
        let n_len = line.normal.norm();
        let a = (line.base * line.left) * ((t_plus - t_minus) * n_len);
        Self {
            f_plus,
            f_minus,
            mu,
            direction: Direction {
                a,
                n: line.normal * (1.0 / n_len),
            },
            energy: mu * manifold_energy(f_plus) + (1.0 - mu) * manifold_energy(f_minus),
            kind,
            tie: false,
        }
    }

    /// Unit lamination normal.
    pub fn normal(&self) -> Vector2 {
        self.direction.n
    }

    pub fn is_single_point(&self) -> bool {
        self.f_plus == self.f_minus
    }
}

fn check_det(n: Matrix2, tol: f64) -> Result<()> {
    let residual = (n.det() - 1.0).abs();
    if residual > tol {
        Err(Error::OffManifold { residual, tol })
    } else {
        Ok(())
    }
}

fn on_m(n: Matrix2, s: &SlipSystem, tol: f64) -> bool {
    ((n * s.v1()).norm() - 1.0).abs() <= tol || ((n * s.v2()).norm() - 1.0).abs() <= tol
}

/// Laminate on `N(I + t vᵢ⊥⊗vᵢ)`, which keeps `N vᵢ⊥` and moves `|N_t vᵢ|`
/// from below 1 to 1 on both sides.
fn single_slip(n: Matrix2, s: &SlipSystem, i: usize, kind: LaminateKind) -> Result<LaminateDecomposition> {
    let v = s.v(i);
    let line = RankOneLine::new(n, v.perp(), v);
    match solve_unit_image_times(&line, v).roots().to_vec()[..] {
        [lo, hi] if lo < 0.0 && hi > 0.0 => Ok(LaminateDecomposition::on_line(&line, lo, hi, kind)),
        ref roots => Err(Error::Precondition(format!(
            "single-slip line through N has roots {roots:?}, expected one on each side of 0"
        ))),
    }
}

/// Orthogonal case (i)/(ii): the connected component around 0 of
/// `{min |N_t vᵢ| > 1, φ(t) < 0}` on the line `N(I + t a⊗n)`.
fn interval_case(
    n: Matrix2,
    s: &SlipSystem,
    a: Vector2,
    nrm: Vector2,
    kind: LaminateKind,
) -> Result<LaminateDecomposition> {
    let line = RankOneLine::new(n, a, nrm);
    let mut breaks = Vec::with_capacity(6);
    for v in [s.v1(), s.v2()] {
        breaks.extend(solve_unit_image_times(&line, v).roots().to_vec());
    }
    // φ(t) = |N_t n|² − |N_t a|² with N_t a = N a and N_t n = N n + t|n|² N a.
    let (p, q, k) = (n * a, n * nrm, nrm.norm_sq());
    breaks.extend(
        solve_quadratic(k * k * p.norm_sq(), 2.0 * k * p.dot(q), q.norm_sq() - p.norm_sq()).to_vec(),
    );
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();

    let inside = |t: f64| {
        let ft = line.point(t);
        (ft * s.v1()).norm() > 1.0
            && (ft * s.v2()).norm() > 1.0
            && (ft * nrm).norm_sq() < (ft * a).norm_sq()
    };
    if !inside(0.0) {
        return Err(Error::Precondition("target is not inside the interval set".into()));
    }
    let split = breaks.partition_point(|&t| t < 0.0);
    let (neg, pos) = breaks.split_at(split);
    let unbounded = || Error::Precondition("interval set around 0 is unbounded".into());
    let mut lo = neg.len().checked_sub(1).ok_or_else(unbounded)?;
    while lo > 0 && inside(0.5 * (neg[lo - 1] + neg[lo])) {
        lo -= 1;
    }
    let mut hi = if pos.is_empty() { return Err(unbounded()) } else { 0 };
    while hi + 1 < pos.len() && inside(0.5 * (pos[hi] + pos[hi + 1])) {
        hi += 1;
    }
    let (t_minus, t_plus) = (neg[lo], pos[hi]);
    if t_plus - t_minus < TANGENCY_TOL {
        return Err(Error::DegenerateTangency {
            gap: t_plus - t_minus,
            limit: Box::new(LaminateDecomposition::single_point(n, s)),
        });
    }
    Ok(LaminateDecomposition::on_line(&line, t_minus, t_plus, kind))
}

/// Optimal simple laminate for orthogonal slips.
pub fn decompose_orthogonal(n: Matrix2, s: &SlipSystem, tol: f64) -> Result<LaminateDecomposition> {
    check_det(n, tol)?;
    if !s.is_orthogonal() {
        return Err(Error::Precondition("decompose_orthogonal needs orthogonal slips".into()));
    }
    if on_m(n, s, tol) {
        return Ok(LaminateDecomposition::single_point(n, s));
    }
    let (v1, v2) = (s.v1(), s.v2());
    let (fv1, fv2) = (n * v1, n * v2);
    if fv1.norm() < 1.0 {
        single_slip(n, s, 1, LaminateKind::CaseN1lemN2)
    } else if fv2.norm() < 1.0 {
        single_slip(n, s, 2, LaminateKind::CaseN2)
    } else if fv1.dot(fv2) > 0.0 {
        interval_case(n, s, v1 + v2, v1 - v2, LaminateKind::CaseA)
    } else {
        interval_case(n, s, v1 - v2, v1 + v2, LaminateKind::CaseAPerp)
    }
}

/// A root of `|F_t v_slip| = 1` on some line.
#[derive(Clone, Copy, Debug)]
struct Hit {
    t: f64,
    slip: usize,
}

fn hits(line: &RankOneLine, s: &SlipSystem) -> Vec<Hit> {
    let mut out = Vec::with_capacity(4);
    for slip in [1, 2] {
        for t in solve_unit_image_times(line, s.v(slip)).roots().to_vec() {
            out.push(Hit { t, slip });
        }
    }
    out
}

/// Lowest-energy pair `t_a < 0 < t_b` among `hits`, restricted to pairs
/// from different slips when `mixed_only` is set.
fn best_pair(
    line: &RankOneLine,
    hits: &[Hit],
    mixed_only: bool,
    kind: LaminateKind,
) -> Option<LaminateDecomposition> {
    let mut best: Option<LaminateDecomposition> = None;
    let mut runner_up = f64::INFINITY;
    for lo in hits.iter().filter(|h| h.t < 0.0) {
        for hi in hits.iter().filter(|h| h.t > 0.0) {
            if mixed_only && lo.slip == hi.slip {
                continue;
            }
            let cand = LaminateDecomposition::on_line(line, lo.t, hi.t, kind);
            match &best {
                Some(b) if cand.energy >= b.energy => runner_up = runner_up.min(cand.energy),
                _ => {
                    if let Some(b) = &best {
                        runner_up = runner_up.min(b.energy);
                    }
                    best = Some(cand);
                }
            }
        }
    }
    best.map(|mut b| {
        b.tie = runner_up - b.energy <= 1e-12 * b.energy.max(1.0);
        b
    })
}

/// Laminates for slips at a general angle `2θ ∈ (π/2, π)`.
///
/// On `A`, `A⊥` and `N₁∩N₂` the result is optimal. On `N₁\N₂` and `N₂\N₁`
/// it is the best of the single-slip and mixed-slip candidates and carries
/// [`LaminateKind::UpperBoundOnly`].
pub fn decompose_general(n: Matrix2, s: &SlipSystem, tol: f64) -> Result<LaminateDecomposition> {
    check_det(n, tol)?;
    let (v3, v3p) = (s.v3(), s.v3_perp());
    let along_v3 = RankOneLine::new(n, v3, v3p);
    let along_v3p = RankOneLine::new(n, v3p, v3);
    let tangency = |gap: f64| Error::DegenerateTangency {
        gap,
        limit: Box::new(LaminateDecomposition::single_point(n, s)),
    };
    let known = |line: RankOneLine, kind: LaminateKind| {
        best_pair(&line, &hits(&line, s), true, kind).ok_or_else(|| tangency(0.0))
    };
    let label = classify(n, s, tol);
    let d = match label.tag {
        RegionTag::OffManifold => unreachable!("determinant checked above"),
        RegionTag::SO2 | RegionTag::M1 | RegionTag::M2 => {
            return Ok(LaminateDecomposition::single_point(n, s))
        }
        RegionTag::A => known(along_v3, LaminateKind::CaseA)?,
        RegionTag::APerp => known(along_v3p, LaminateKind::CaseAPerp)?,
        RegionTag::N1capN2 => known(along_v3, LaminateKind::CaseN1capN2)?,
        RegionTag::N1only | RegionTag::N2only => {
            let i = if label.tag == RegionTag::N1only { 1 } else { 2 };
            let mut best = single_slip(n, s, i, LaminateKind::UpperBoundOnly)?;
            for line in [along_v3, along_v3p] {
                if let Some(c) = best_pair(&line, &hits(&line, s), false, LaminateKind::UpperBoundOnly) {
                    if c.energy < best.energy {
                        best = c;
                    }
                }
            }
            best
        }
    };
    let gap = d.direction.a.norm();
    if gap < TANGENCY_TOL {
        return Err(tangency(gap));
    }
    Ok(d)
}

/// Dispatch on the slip geometry.
pub fn decompose(n: Matrix2, s: &SlipSystem, tol: f64) -> Result<LaminateDecomposition> {
    if s.is_orthogonal() {
        decompose_orthogonal(n, s, tol)
    } else {
        decompose_general(n, s, tol)
    }
}

/// Residuals of the decomposition invariants.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct VerificationReport {
    /// `|μF₊ + (1−μ)F₋ − N| / max(1, |N|)`.
    pub convex_combination: f64,
    /// `|det(F₊ − F₋)| / |F₊ − F₋|²`, zero for a single point.
    pub rank_one: f64,
    /// Largest distance of `F₊`, `F₋` from `M`, in `|det − 1|` and `min ||F vᵢ| − 1|`.
    pub manifold: f64,
    /// Energy-equality residual; for upper bounds only the averaging identity.
    pub energy: f64,
    /// `max |(F± − N) p|` for the vector `p` the construction keeps fixed.
    pub preserved_vector: f64,
}

impl VerificationReport {
    pub fn max(&self) -> f64 {
        self.convex_combination
            .max(self.rank_one)
            .max(self.manifold)
            .max(self.energy)
            .max(self.preserved_vector)
    }
}

pub fn verify_decomposition(d: &LaminateDecomposition, n: Matrix2, s: &SlipSystem) -> VerificationReport {
    let mix = d.f_plus * d.mu + d.f_minus * (1.0 - d.mu);
    let convex_combination = (mix - n).frobenius() / n.frobenius().max(1.0);
    let jump = d.f_plus - d.f_minus;
    let rank_one = if jump.frobenius_sq() > 0.0 {
        jump.det().abs() / jump.frobenius_sq()
    } else {
        0.0
    };
    let dist = |f: Matrix2| {
        let slip = ((f * s.v1()).norm() - 1.0)
            .abs()
            .min(((f * s.v2()).norm() - 1.0).abs());
        slip.max((f.det() - 1.0).abs())
    };
    let manifold = dist(d.f_plus).max(dist(d.f_minus));
    let (wp, wm) = (manifold_energy(d.f_plus), manifold_energy(d.f_minus));
    let energy = if d.kind == LaminateKind::UpperBoundOnly {
        (d.energy - (d.mu * wp + (1.0 - d.mu) * wm)).abs()
    } else {
        (wp - wm).abs().max((d.energy - wp).abs())
    };
    let preserved = match d.kind {
        LaminateKind::CaseA | LaminateKind::CaseN1capN2 => s.v3(),
        LaminateKind::CaseAPerp => s.v3_perp(),
        LaminateKind::CaseN1lemN2 => s.v1().perp(),
        LaminateKind::CaseN2 => s.v2().perp(),
        LaminateKind::CaseOnManifold | LaminateKind::UpperBoundOnly => d.direction.n.perp(),
    };
    let preserved_vector = ((d.f_plus - n) * preserved)
        .norm()
        .max(((d.f_minus - n) * preserved).norm());
    VerificationReport {
        convex_combination,
        rank_one,
        manifold,
        energy,
        preserved_vector,
    }
}
