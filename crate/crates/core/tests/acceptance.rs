//! Quantitative acceptance run. Prints one line per criterion and exits
//! nonzero if any criterion fails.

mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_4, PI};
use std::process::ExitCode;
use std::time::Instant;

use common::*;
use lamlab::algebra::{identity_f1, identity_f2, Matrix2, Vector2};
use lamlab::energy::{
    chi, f_majorant, h, h_perp, lemma_fad_check, soft_gradient, w_condensed, w_hom,
    w_hom_orthogonal, w_hom_scalar, SlipSystem,
};
use lamlab::homogenize::{averaging_check, sweep, Band, EnergyReport, MicrostructureSpec};
use lamlab::laminate::{decompose, verify_decomposition};
use lamlab::oracle::{envelope_scan, summarize, ScanRow};
use lamlab::regions::{classify, RegionTag};
use lamlab::report::{write_envelope_scan, write_homogenize};
use rand::Rng;

const TOL: f64 = 1e-9;
const N_DIRS: usize = 720;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn scan(theta: f64) -> Vec<ScanRow> {
    let s = SlipSystem::from_theta(theta, 0.5).unwrap();
    envelope_scan(&s, 3.0, 61, N_DIRS, TOL)
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let rows = scan(FRAC_PI_4);
    let secs = start.elapsed().as_secs_f64();
    let sum = summarize(&rows);
    let pass = sum.known_cells == rows.len() && sum.max_discrepancy <= 1e-5 && secs <= 120.0;
    outcome(
        pass,
        format!(
            "{} cells, max |oracle - closed| = {:.3e} (limit 1e-5), {secs:.1}s",
            sum.cells, sum.max_discrepancy
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for frac in [0.30, 0.35, 0.45] {
        let rows = scan(frac * PI);
        let sum = summarize(&rows);
        let ok = sum.max_discrepancy <= 1e-5 && sum.min_slack_lo >= -1e-5 && sum.min_slack_hi >= -1e-5;
        pass &= ok && sum.known_cells > 0 && sum.bounded_cells > 0;
        parts.push(format!(
            "θ={frac}π: known {} max disc {:.2e}, bounded {} min slack lo {:.2e} hi {:.2e}",
            sum.known_cells, sum.max_discrepancy, sum.bounded_cells, sum.min_slack_lo, sum.min_slack_hi
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_3() -> Outcome {
    let mut r = rng(3);
    // `None` is the orthogonal regime; the others are general-angle regions.
    let regimes = [None, Some(RegionTag::A), Some(RegionTag::APerp), Some(RegionTag::N1capN2)];
    let mut worst = [0.0f64; 4];
    let mut pass = true;
    for tag in regimes {
        let mut done = 0;
        while done < 10_000 {
            let s = match tag {
                None => orthogonal_slips(&mut r),
                Some(_) => general_slips(&mut r, 0.02),
            };
            let n = det1(&mut r, 3.0);
            if tag.is_some_and(|t| classify(n, &s, TOL).tag != t) {
                continue;
            }
            done += 1;
            let Ok(d) = decompose(n, &s, TOL) else {
                pass = false;
                continue;
            };
            let rep = verify_decomposition(&d, n, &s);
            let whom = w_hom(n, &s, TOL).known().map_or(f64::INFINITY, |e| e.as_f64());
            let energy = rep.energy.max((d.energy - whom).abs()) / whom.max(1.0);
            let res = [rep.convex_combination, rep.rank_one, rep.manifold, energy];
            for (w, v) in worst.iter_mut().zip(res) {
                *w = w.max(v);
            }
        }
    }
    pass &= worst[0] <= 1e-10 && worst[1] <= 1e-10 && worst[2] <= 1e-9 && worst[3] <= 1e-8;
    outcome(
        pass,
        format!(
            "4 regimes x 1e4: convex {:.1e}, rank-one {:.1e}, manifold {:.1e}, energy {:.1e}",
            worst[0], worst[1], worst[2], worst[3]
        ),
    )
}

fn criterion_4() -> Outcome {
    let mut r = rng(4);
    let mut convex_gap = f64::NEG_INFINITY;
    for k in 0..100_000 {
        let s = if k % 2 == 0 { orthogonal_slips(&mut r) } else { general_slips(&mut r, 0.0) };
        let (a, b) = (matrix(&mut r, 3.0), matrix(&mut r, 3.0));
        let mu = r.gen_range(0.0..1.0);
        let lhs = f_majorant(a * mu + b * (1.0 - mu), &s);
        let rhs = mu * f_majorant(a, &s) + (1.0 - mu) * f_majorant(b, &s);
        convex_gap = convex_gap.max((lhs - rhs) / rhs.max(1.0));
    }
    let mut on_m = 0.0f64;
    let mut on_n = 0.0f64;
    for k in 0..10_000 {
        let s = orthogonal_slips(&mut r);
        let f = on_slip(&mut r, &s, 1 + k % 2, 4.0);
        on_m = on_m.max(rel(f_majorant(f, &s), w_condensed(f, &s, TOL).as_f64()));
        let g = det1(&mut r, 3.0);
        on_n = on_n.max(rel(f_majorant(g, &s), w_hom_orthogonal(g, &s, TOL).as_f64()));
    }
    outcome(
        convex_gap <= 1e-10 && on_m <= 1e-10 && on_n <= 1e-10,
        format!("convexity gap {convex_gap:.1e}, f vs W on M {on_m:.1e}, f vs W_hom {on_n:.1e}"),
    )
}

fn criterion_5() -> Outcome {
    let mut r = rng(5);
    let (mut f1, mut f2) = (0.0f64, 0.0f64);
    for _ in 0..10_000 {
        let f = det1(&mut r, 4.0);
        let (a, b) = (unit(&mut r), unit(&mut r));
        let (lhs, rhs) = identity_f1(f, a, b);
        f1 = f1.max(rel(lhs, rhs));
    }
    let mut done = 0;
    while done < 10_000 {
        let f = matrix(&mut r, 5.0);
        let (a, b) = (unit(&mut r), unit(&mut r));
        if a.perp().dot(b).abs() < 0.05 {
            continue;
        }
        done += 1;
        f2 = f2.max(rel(identity_f2(f, a, b).unwrap(), f.frobenius_sq()));
    }
    let mut mismatches = 0;
    let mut done = 0;
    while done < 10_000 {
        let s = general_slips(&mut r, 0.0);
        let f = det1(&mut r, 3.0);
        let dot = (f * s.v1()).dot(f * s.v2());
        let (sn, cs) = s.theta().sin_cos();
        let ratio = (f * s.v3()).norm() * cs - (f * s.v3_perp()).norm() * sn;
        if dot.abs() < 1e-9 || ratio.abs() < 1e-9 {
            continue;
        }
        done += 1;
        mismatches += usize::from((dot > 0.0) != (ratio > 0.0));
    }
    outcome(
        f1 <= 1e-10 && f2 <= 1e-10 && mismatches == 0,
        format!("identity_f1 rel {f1:.1e}, identity_f2 rel {f2:.1e}, sign mismatches {mismatches}/10000"),
    )
}

fn criterion_6() -> Outcome {
    let mut r = rng(6);
    let mut agree = 0.0f64;
    let mut lipschitz_ratio = 0.0f64;
    for k in 0..10_000 {
        let lambda = r.gen_range(0.05..0.95);
        let s = SlipSystem::orthogonal(unit(&mut r), lambda).unwrap();
        let rot = Matrix2::rotation(r.gen_range(0.0..2.0 * PI));
        let gamma = r.gen_range(-3.0..3.0);
        let m = w_hom_orthogonal(soft_gradient(gamma, lambda, rot), &s, TOL).as_f64();
        agree = agree.max((m - w_hom_scalar(gamma, &s)).abs() / m.max(1.0));

        let g1 = r.gen_range(-9.0..9.0);
        let g2 = if k % 2 == 0 { g1 + r.gen_range(-1e-3..1e-3) } else { r.gen_range(-9.0..9.0) };
        let lhs = (w_hom_scalar(g1, &s) - w_hom_scalar(g2, &s)).abs();
        let rhs = 2.0 / (lambda * lambda) * (1.0 + g1.abs() + g2.abs()) * (g1 - g2).abs();
        if rhs > 0.0 {
            lipschitz_ratio = lipschitz_ratio.max(lhs / rhs);
        }
    }
    outcome(
        agree <= 1e-12 && lipschitz_ratio <= 1.0 + 1e-12,
        format!("scalar vs matrix {agree:.1e}, worst |ΔW|/bound {lipschitz_ratio:.4}"),
    )
}

fn criterion_7() -> Outcome {
    const C: f64 = 32.0;
    let mut r = rng(7);
    let mut failures = 0;
    let mut needed = 0.0f64;
    let e12 = Vector2::new(1.0, 0.0).outer(Vector2::new(0.0, 1.0));
    for _ in 0..100_000 {
        let s = orthogonal_slips(&mut r);
        let rot = Matrix2::rotation(r.gen_range(0.0..2.0 * PI));
        let (g1, g2) = (r.gen_range(-10.0..10.0), r.gen_range(-10.0..10.0));
        let (u, w) = if r.gen_bool(0.5) { (s.v2(), s.v1()) } else { (s.v1(), s.v2()) };
        let a = rot * (Matrix2::IDENTITY + u.outer(w) * g2);
        let d = rot * e12 * g1;
        if !lemma_fad_check(a, d, C, &s).unwrap_or(false) {
            failures += 1;
        }
        let f = a + d;
        let (na, nd) = (a.frobenius(), d.frobenius());
        let weight = (nd.sqrt() + nd) * (na.sqrt() + na + nd.sqrt() + nd);
        if weight > 0.0 {
            needed = needed.max((f_majorant(f, &s) - (f.frobenius_sq() - 2.0)) / weight);
        }
    }
    outcome(
        failures == 0,
        format!("c = {C}: {failures}/100000 failures, smallest sufficient c on samples {needed:.3}"),
    )
}

fn homogenize_base(bands: Vec<Band>) -> MicrostructureSpec {
    MicrostructureSpec {
        slip: SlipSystem::orthogonal(Vector2::new(FRAC_1_SQRT_2, FRAC_1_SQRT_2), 0.5).unwrap(),
        rotation: Matrix2::IDENTITY,
        bands,
        epsilon: 0.25,
        laminate_period: 0.25,
        domain_side: 1.0,
        grid_n: 0,
    }
}

const EPS: [f64; 4] = [0.25, 0.125, 0.0625, 0.03125];

fn single_band_sweep() -> Vec<EnergyReport> {
    sweep(&homogenize_base(vec![Band { gamma: 0.4, t_end: 1.0 }]), &EPS, 8).unwrap()
}

fn three_band_sweep() -> Vec<EnergyReport> {
    let bands = vec![
        Band { gamma: 0.4, t_end: 0.375 },
        Band { gamma: -0.3, t_end: 0.6875 },
        Band { gamma: 0.8, t_end: 1.0 },
    ];
    sweep(&homogenize_base(bands), &EPS, 8).unwrap()
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let single = single_band_sweep();
    let three = three_band_sweep();
    let secs = start.elapsed().as_secs_f64();
    let monotone = single
        .windows(2)
        .all(|w| w[1].rel_error <= 1.1 * w[0].rel_error + 1e-12);
    let final_single = single[3].rel_error;
    let final_three = three[3].rel_error;
    let c: Vec<f64> = single.iter().map(|r| r.avg_gradient_deviation() / r.epsilon).collect();
    let stable = c[2].max(c[3]) <= c[0].max(c[1]);
    let pass = monotone && final_single <= 0.02 && final_three <= 0.03 && stable && secs <= 300.0;
    outcome(
        pass,
        format!(
            "single band rel errors {:?} (non-increasing: {monotone}), 3-band final {final_three:.2e}, \
             deviation/ε {:?} (stable: {stable}), {secs:.1}s",
            single.iter().map(|r| format!("{:.1e}", r.rel_error)).collect::<Vec<_>>(),
            c.iter().map(|x| format!("{x:.1e}")).collect::<Vec<_>>()
        ),
    )
}

fn criterion_9() -> Outcome {
    let mut worst = 0.0f64;
    for k in 0..1000 {
        let z = 5.0 * k as f64 / 999.0;
        let c = chi(z);
        worst = worst.max((h(z, FRAC_PI_4) - c).abs()).max((h_perp(z, FRAC_PI_4) - c).abs());
    }
    outcome(worst <= 1e-12, format!("max |h - χ|, |h⊥ - χ| over 1000 points = {worst:.1e}"))
}

fn criterion_10() -> Outcome {
    let eps = [0.3, 0.15, 0.07, 0.03125];
    let grid = |e: f64| (64.0 / e).ceil() as usize;

    let constant = eps
        .iter()
        .flat_map(|&e| averaging_check(|_, _| 1.0, 1.0, &[e], grid(e)))
        .fold(0.0f64, |m, r| m.max(r.deviation));

    // Over (0, 1) the exact mean of sin(2πx/ε) is ε(1 − cos(2π/ε))/(2π).
    let sine_bound = 1.0 / PI;
    let sine: Vec<f64> = eps
        .iter()
        .flat_map(|&e| averaging_check(|y1, _| (2.0 * PI * y1).sin(), 0.0, &[e], grid(e)))
        .map(|r| r.deviation / r.epsilon)
        .collect();
    let sine_ok = sine.iter().all(|&c| c <= sine_bound + 1e-3);

    let lambda = 0.3;
    let indicator = move |_: f64, y2: f64| if y2 - y2.floor() < lambda { 1.0 } else { 0.0 };
    let ind: Vec<f64> = eps
        .iter()
        .flat_map(|&e| averaging_check(indicator, lambda, &[e], grid(e)))
        .map(|r| r.deviation / r.epsilon)
        .collect();
    let ind_ok = ind.iter().all(|&c| c <= 2.0);

    outcome(
        constant == 0.0 && sine_ok && ind_ok,
        format!(
            "g=1 deviation {constant:e}; sine deviation/ε {:?} (C = 1/π); indicator deviation/ε {:?} (C = 2)",
            sine.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>(),
            ind.iter().map(|x| format!("{x:.3}")).collect::<Vec<_>>()
        ),
    )
}

fn scan_csv() -> Vec<u8> {
    let mut out = Vec::new();
    write_envelope_scan(&mut out, &scan(FRAC_PI_4)).unwrap();
    out
}

fn sweep_csv() -> Vec<u8> {
    let mut out = Vec::new();
    write_homogenize(&mut out, &single_band_sweep()).unwrap();
    write_homogenize(&mut out, &three_band_sweep()).unwrap();
    out
}

fn criterion_11() -> Outcome {
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let (scan_a, sweep_a) = (scan_csv(), sweep_csv());
    let (scan_b, sweep_b) = serial.install(|| (scan_csv(), sweep_csv()));
    let (scan_c, sweep_c) = (scan_csv(), sweep_csv());
    let same_scan = scan_a == scan_b && scan_a == scan_c;
    let same_sweep = sweep_a == sweep_b && sweep_a == sweep_c;
    outcome(
        same_scan && same_sweep,
        format!(
            "envelope CSV {} bytes identical: {same_scan}; sweep CSV {} bytes identical: {same_sweep} \
             (parallel, serial, parallel)",
            scan_a.len(),
            sweep_a.len()
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(usize, fn() -> Outcome); 11] = [
        (1, criterion_1),
        (2, criterion_2),
        (3, criterion_3),
        (4, criterion_4),
        (5, criterion_5),
        (6, criterion_6),
        (7, criterion_7),
        (8, criterion_8),
        (9, criterion_9),
        (10, criterion_10),
        (11, criterion_11),
    ];
    let mut failed = 0;
    for (k, run) in criteria {
        let o = run();
        println!("criterion {k:>2} {}: {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        failed += usize::from(!o.pass);
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
