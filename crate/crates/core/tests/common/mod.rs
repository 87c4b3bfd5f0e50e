#![allow(dead_code)]

use lamlab::algebra::{bc_to_matrix, Matrix2, Vector2};
use lamlab::energy::SlipSystem;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `Q · sqrt(FᵀF)` with `(b, c)` uniform in `[−range, range]²`.
pub fn det1(r: &mut impl Rng, range: f64) -> Matrix2 {
    let q = Matrix2::rotation(r.gen_range(0.0..2.0 * PI));
    q * bc_to_matrix(r.gen_range(-range..range), r.gen_range(-range..range))
}

pub fn unit(r: &mut impl Rng) -> Vector2 {
    Vector2::from_angle(r.gen_range(0.0..2.0 * PI))
}

pub fn matrix(r: &mut impl Rng, range: f64) -> Matrix2 {
    Matrix2::new(
        r.gen_range(-range..range),
        r.gen_range(-range..range),
        r.gen_range(-range..range),
        r.gen_range(-range..range),
    )
}

/// Orthogonal slips with a random orientation.
pub fn orthogonal_slips(r: &mut impl Rng) -> SlipSystem {
    SlipSystem::orthogonal(unit(r), 0.5).unwrap()
}

/// General slips with half-angle in `(π/4 + margin, π/2 − margin)` and a
/// random orientation.
pub fn general_slips(r: &mut impl Rng, margin: f64) -> SlipSystem {
    let theta = r.gen_range(FRAC_PI_4 + margin..FRAC_PI_2 - margin);
    let q = Matrix2::rotation(r.gen_range(0.0..2.0 * PI));
    let (s, c) = theta.sin_cos();
    SlipSystem::from_vectors(q * Vector2::new(s, c), q * Vector2::new(-s, c), 0.5).unwrap()
}

/// `R(I + γ vᵢ⊗vᵢ⊥)`, which lies on `Mᵢ`.
pub fn on_slip(r: &mut impl Rng, s: &SlipSystem, i: usize, gamma_max: f64) -> Matrix2 {
    let v = s.v(i);
    let gamma = r.gen_range(-gamma_max..gamma_max);
    Matrix2::rotation(r.gen_range(0.0..2.0 * PI)) * (Matrix2::IDENTITY + v.outer(v.perp()) * gamma)
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1.0)
}
