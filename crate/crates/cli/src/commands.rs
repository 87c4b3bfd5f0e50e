use std::io::Write;

use lamlab::algebra::{bc_to_matrix, Matrix2};
use lamlab::energy::{w_hom, ExtendedEnergy, HomValue, SlipSystem};
use lamlab::homogenize::{sweep, Band, MicrostructureSpec};
use lamlab::laminate::{decompose, verify_decomposition, LaminateDecomposition, VerificationReport};
use lamlab::oracle::{envelope_scan, summarize};
use lamlab::regions::{classify as classify_matrix, region_map, RegionTag};
use lamlab::report;
use serde::Serialize;

use crate::config::Config;
use crate::CliError;

#[derive(Serialize)]
struct Bounds {
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct Classification {
    matrix: [f64; 4],
    region: RegionTag,
    boundary: Vec<RegionTag>,
    whom: Option<ExtendedEnergy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<Bounds>,
    det_residual: f64,
}

#[derive(Serialize)]
struct LaminateOutput {
    matrix: [f64; 4],
    region: RegionTag,
    whom: Option<ExtendedEnergy>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bounds: Option<Bounds>,
    decomposition: LaminateDecomposition,
    residuals: VerificationReport,
}

fn target_matrix(matrix: Option<[f64; 4]>, bc: Option<[f64; 2]>) -> Matrix2 {
    match (matrix, bc) {
        (Some([a, b, c, d]), _) => Matrix2::new(a, b, c, d),
        (None, Some([b, c])) => bc_to_matrix(b, c),
        (None, None) => unreachable!("clap requires one target"),
    }
}

fn on_det_manifold(f: Matrix2, tol: f64) -> Result<f64, CliError> {
    let residual = (f.det() - 1.0).abs();
    if residual > tol {
        return Err(lamlab::Error::OffManifold { residual, tol }.into());
    }
    Ok(residual)
}

fn split(v: HomValue) -> (Option<ExtendedEnergy>, Option<Bounds>) {
    match v {
        HomValue::Known(e) => (Some(e), None),
        HomValue::Bounds { lower, upper } => (None, Some(Bounds { lower, upper })),
    }
}

fn write_json<T: Serialize>(out: &mut dyn Write, value: &T) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

pub fn classify(
    config: &Config,
    slip: &SlipSystem,
    matrix: Option<[f64; 4]>,
    bc: Option<[f64; 2]>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let f = target_matrix(matrix, bc);
    let tol = config.tolerances.manifold;
    let det_residual = on_det_manifold(f, tol)?;
    let label = classify_matrix(f, slip, tol);
    let (whom, bounds) = split(w_hom(f, slip, tol));
    write_json(
        out,
        &Classification {
            matrix: f.entries(),
            region: label.tag,
            boundary: label.boundary,
            whom,
            bounds,
            det_residual,
        },
    )
}

pub fn laminate(
    config: &Config,
    slip: &SlipSystem,
    matrix: Option<[f64; 4]>,
    bc: Option<[f64; 2]>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let f = target_matrix(matrix, bc);
    on_det_manifold(f, config.tolerances.manifold)?;
    let d = decompose(f, slip, config.tolerances.laminate)?;
    let (whom, bounds) = split(w_hom(f, slip, config.tolerances.manifold));
    write_json(
        out,
        &LaminateOutput {
            matrix: f.entries(),
            region: classify_matrix(f, slip, config.tolerances.manifold).tag,
            whom,
            bounds,
            residuals: verify_decomposition(&d, f, slip),
            decomposition: d,
        },
    )
}

pub fn verify_envelope(config: &Config, slip: &SlipSystem, out: &mut dyn Write) -> Result<(), CliError> {
    if config.oracle.n_dirs < 8 {
        return Err(CliError::Usage(format!("n_dirs = {} must be at least 8", config.oracle.n_dirs)));
    }
    let rows = envelope_scan(
        slip,
        config.grid.range,
        config.grid.n,
        config.oracle.n_dirs,
        config.tolerances.manifold,
    );
    let s = summarize(&rows);
    log::info!(
        "{} cells ({} known, {} bounded): max discrepancy {:e}, min slack {:e} / {:e}",
        s.cells,
        s.known_cells,
        s.bounded_cells,
        s.max_discrepancy,
        s.min_slack_lo,
        s.min_slack_hi
    );
    report::write_envelope_scan(&mut *out, &rows)?;
    out.flush()?;
    Ok(())
}

pub fn regionmap(config: &Config, slip: &SlipSystem, out: &mut dyn Write) -> Result<(), CliError> {
    let cells = region_map(slip, config.grid.range, config.grid.n, config.tolerances.manifold);
    report::write_region_map(&mut *out, &cells)?;
    out.flush()?;
    Ok(())
}

pub fn hplot(slip: &SlipSystem, zmax: f64, samples: usize, out: &mut dyn Write) -> Result<(), CliError> {
    if !(zmax > 0.0) || samples < 2 {
        return Err(CliError::Usage("hplot needs zmax > 0 and at least 2 samples".into()));
    }
    report::write_hplot(&mut *out, slip.theta(), zmax, samples)?;
    out.flush()?;
    Ok(())
}

pub struct HomogenizeParams {
    pub bands: Vec<Band>,
    pub eps_list: Vec<f64>,
    pub hlam: f64,
    pub cells_per_feature: usize,
    pub domain: f64,
    pub rotation: f64,
}

/// `gamma:t_end,gamma:t_end,...`
pub fn parse_bands(spec: &str) -> Result<Vec<Band>, CliError> {
    spec.split(',')
        .map(|item| {
            let (g, t) = item
                .split_once(':')
                .ok_or_else(|| CliError::Usage(format!("band {item:?} is not gamma:t_end")))?;
            let num = |x: &str| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| CliError::Usage(format!("band {item:?}: {e}")))
            };
            Ok(Band {
                gamma: num(g)?,
                t_end: num(t)?,
            })
        })
        .collect()
}

/// `a:b:n`
pub fn parse_range(spec: &str) -> Result<(f64, f64, usize), CliError> {
    let bad = || CliError::Usage(format!("gamma range {spec:?} is not a:b:n with n ≥ 2"));
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(bad());
    };
    let a = a.trim().parse::<f64>().map_err(|_| bad())?;
    let b = b.trim().parse::<f64>().map_err(|_| bad())?;
    let n = n.trim().parse::<usize>().map_err(|_| bad())?;
    if n < 2 || !(a < b) {
        return Err(bad());
    }
    Ok((a, b, n))
}

pub fn homogenize(slip: &SlipSystem, p: &HomogenizeParams, out: &mut dyn Write) -> Result<(), CliError> {
    if p.eps_list.is_empty() {
        return Err(CliError::Usage("--eps-list is empty".into()));
    }
    let base = MicrostructureSpec {
        slip: *slip,
        rotation: Matrix2::rotation(p.rotation),
        bands: p.bands.clone(),
        epsilon: p.eps_list[0],
        laminate_period: p.hlam,
        domain_side: p.domain,
        grid_n: 0,
    };
    let reports = sweep(&base, &p.eps_list, p.cells_per_feature)?;
    for r in &reports {
        log::info!(
            "ε = {}: rel error {:e}, average gradient deviation {:e}",
            r.epsilon,
            r.rel_error,
            r.avg_gradient_deviation()
        );
    }
    report::write_homogenize(&mut *out, &reports)?;
    out.flush()?;
    Ok(())
}

pub fn whomgamma(
    config: &Config,
    slip: &SlipSystem,
    a: f64,
    b: f64,
    n: usize,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    report::write_whom_gamma(&mut *out, slip, a, b, n, config.tolerances.manifold)?;
    out.flush()?;
    Ok(())
}
