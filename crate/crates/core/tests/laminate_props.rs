mod common;

use common::*;
use lamlab::energy::{f_majorant, w_hom, w_hom_general, w_hom_orthogonal, HomValue, SlipSystem};
use lamlab::laminate::{decompose_general, decompose_orthogonal, verify_decomposition, LaminateKind};
use lamlab::algebra::{solve_unit_image_times, RankOneLine, Matrix2};
use lamlab::regions::{classify, RegionTag};

const TOL: f64 = 1e-9;

#[test]
fn orthogonal_decompositions_realize_whom() {
    let mut r = rng(11);
    for _ in 0..10_000 {
        let s = orthogonal_slips(&mut r);
        let n = det1(&mut r, 3.0);
        let d = decompose_orthogonal(n, &s, TOL).unwrap();
        let w = w_hom_orthogonal(n, &s, TOL).finite().unwrap();
        assert!(rel(d.energy, w) <= 1e-8, "{n:?}: {} vs {w}", d.energy);
        let rep = verify_decomposition(&d, n, &s);
        assert!(rep.convex_combination <= 1e-10 && rep.rank_one <= 1e-10, "{rep:?}");
        assert!(rep.manifold <= 1e-9, "{rep:?}");
        assert!(rep.energy <= 1e-8 * w.max(1.0), "{rep:?}");
        assert!(rep.preserved_vector <= 1e-10 * n.frobenius().max(1.0), "{rep:?}");
    }
}

#[test]
fn general_decompositions_realize_known_values() {
    let mut r = rng(12);
    let mut seen = 0;
    while seen < 10_000 {
        let s = general_slips(&mut r, 0.05);
        let n = det1(&mut r, 3.0);
        let tag = classify(n, &s, TOL).tag;
        if !matches!(tag, RegionTag::A | RegionTag::APerp | RegionTag::N1capN2) {
            continue;
        }
        seen += 1;
        let d = decompose_general(n, &s, TOL).unwrap();
        let HomValue::Known(w) = w_hom_general(n, &s, TOL) else {
            panic!("{tag:?} must have a known value")
        };
        let w = w.finite().unwrap();
        assert!(rel(d.energy, w) <= 1e-8, "{tag:?} {n:?}: {} vs {w}", d.energy);
        let rep = verify_decomposition(&d, n, &s);
        assert!(rep.convex_combination <= 1e-10 && rep.rank_one <= 1e-10, "{rep:?}");
        assert!(rep.manifold <= 1e-9 && rep.energy <= 1e-8 * w.max(1.0), "{rep:?}");
        assert!(rep.preserved_vector <= 1e-10 * n.frobenius().max(1.0), "{rep:?}");
    }
}

#[test]
fn root_signs_split_by_slip_in_a_and_a_perp() {
    let mut r = rng(13);
    let mut seen = 0;
    while seen < 2_000 {
        let s = general_slips(&mut r, 0.05);
        let n = det1(&mut r, 3.0);
        let (a, nrm) = match classify(n, &s, TOL).tag {
            RegionTag::A => (s.v3(), s.v3_perp()),
            RegionTag::APerp => (s.v3_perp(), s.v3()),
            _ => continue,
        };
        seen += 1;
        let line = RankOneLine::new(n, a, nrm);
        let r1 = solve_unit_image_times(&line, s.v1()).roots().to_vec();
        let r2 = solve_unit_image_times(&line, s.v2()).roots().to_vec();
        assert_eq!((r1.len(), r2.len()), (2, 2));
        assert_eq!(r1[0].signum(), r1[1].signum());
        assert_eq!(r2[0].signum(), r2[1].signum());
        assert_eq!(r1[0].signum(), -r2[0].signum());
    }
}

fn whom_value(n: Matrix2, s: &SlipSystem) -> f64 {
    match w_hom(n, s, 1e-6) {
        HomValue::Known(e) => e.finite().unwrap(),
        HomValue::Bounds { .. } => panic!("segment left the known regions"),
    }
}

#[test]
fn whom_is_constant_along_construction_segment() {
    let mut r = rng(14);
    for k in 0..2_000 {
        let s = if k % 2 == 0 { orthogonal_slips(&mut r) } else { general_slips(&mut r, 0.05) };
        let n = det1(&mut r, 3.0);
        let d = if s.is_orthogonal() {
            decompose_orthogonal(n, &s, TOL).unwrap()
        } else {
            if matches!(classify(n, &s, TOL).tag, RegionTag::N1only | RegionTag::N2only) {
                continue;
            }
            decompose_general(n, &s, TOL).unwrap()
        };
        for j in 1..=10 {
            let u = j as f64 / 11.0;
            let p = d.f_minus * (1.0 - u) + d.f_plus * u;
            let w = whom_value(p, &s);
            assert!(rel(w, d.energy) <= 1e-8, "{:?} at {u}: {w} vs {}", d.kind, d.energy);
        }
    }
}

#[test]
fn upper_bound_laminates_sit_between_the_bounds() {
    let mut r = rng(15);
    let mut seen = 0;
    while seen < 5_000 {
        let s = general_slips(&mut r, 0.05);
        let n = det1(&mut r, 3.0);
        if !matches!(classify(n, &s, TOL).tag, RegionTag::N1only | RegionTag::N2only) {
            continue;
        }
        seen += 1;
        let d = decompose_general(n, &s, TOL).unwrap();
        assert_eq!(d.kind, LaminateKind::UpperBoundOnly);
        let HomValue::Bounds { lower, upper } = w_hom_general(n, &s, TOL) else { panic!() };
        assert!(d.energy >= lower - 1e-9, "{} < {lower}", d.energy);
        assert!(d.energy >= f_majorant(n, &s) - 1e-9);
        assert!(d.energy <= upper + 1e-9 * upper.max(1.0), "{} > {upper}", d.energy);
        let rep = verify_decomposition(&d, n, &s);
        assert!(rep.max() <= 1e-9, "{rep:?}");
    }
}

#[test]
fn double_neck_region_has_stretched_bisector() {
    let s = SlipSystem::from_theta(std::f64::consts::PI / 3.0, 0.5).unwrap();
    let mut r = rng(16);
    let mut seen = 0;
    while seen < 500 {
        let n = det1(&mut r, 3.0);
        if classify(n, &s, TOL).tag != RegionTag::N1capN2 {
            continue;
        }
        seen += 1;
        let z = (n * s.v3()).norm();
        assert!(z >= 1.0);
        let d = decompose_general(n, &s, TOL).unwrap();
        assert!((d.energy - lamlab::energy::h(z, s.theta())).abs() < 1e-9);
    }
}
