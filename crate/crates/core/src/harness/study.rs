//! Convergence studies on the exterior Dirichlet benchmark.

use std::f64::consts::PI;

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::config::{PointGenerator, StudyConfig};
use crate::analysis::{dirichlet_degree, eoc, exact_dirichlet_solution, global_slope, sobolev_error, ConvergenceRow};
use crate::assembly::{
    cholesky_solve, functional_on_srbf, kernel_correction, AssemblyOptions, DenseSystem, KernelCoeffs, Method, Problem,
};
use crate::error::{Result, SpdoError};
use crate::kernels::{RadialProfile, ShapeFunction};
use crate::operators::{
    apply, kernel_basis, make_symbol, Functional, SpectralSymbol, SymbolExpr, UnisolventConstraints,
    DEFAULT_KERNEL_SCAN,
};
use crate::pointsets::{fibonacci_points, load_points, PointSet};
use crate::spectral::SpectralFunction;
use crate::sphcore::{harmonic_index, SphereDim};

/// Built-in operator name or `custom:<order>:<expression>`.
pub fn build_symbol(desc: &str, n: usize) -> Result<SpectralSymbol> {
    match desc.strip_prefix("custom:") {
        Some(rest) => {
            let (order, expr) = rest.split_once(':').ok_or_else(|| {
                SpdoError::Config(format!("custom operator `{desc}`: expected custom:<order>:<expr>"))
            })?;
            let order: f64 = order
                .trim()
                .parse()
                .map_err(|e| SpdoError::Config(format!("custom operator order `{order}`: {e}")))?;
            SpectralSymbol::custom(n, order, SymbolExpr::parse(expr)?, DEFAULT_KERNEL_SCAN)
        }
        None => make_symbol(desc, n),
    }
}

/// Built-in profile name or `csv:<path>:<tau>` for a tabulated shape.
pub fn build_shape(desc: &str, n: usize, table_l_max: usize) -> Result<ShapeFunction> {
    match desc.strip_prefix("csv:") {
        Some(rest) => {
            let (path, tau) = rest
                .rsplit_once(':')
                .ok_or_else(|| SpdoError::Config(format!("shape `{desc}`: expected csv:<path>:<tau>")))?;
            let tau: f64 = tau
                .trim()
                .parse()
                .map_err(|e| SpdoError::Config(format!("shape tau `{tau}`: {e}")))?;
            ShapeFunction::from_csv(n, path, tau, &std::fs::read_to_string(path)?)
        }
        None => ShapeFunction::from_profile(n, RadialProfile::parse(desc)?, table_l_max),
    }
}

/// Violated sufficient conditions of the convergence theory, as messages.
pub fn theory_warnings(method: Method, symbol: &SpectralSymbol, shape: &ShapeFunction) -> Vec<String> {
    let alpha = symbol.alpha();
    let tau = shape.tau();
    let half = (shape.n() as f64 - 1.0) / 2.0;
    let mut out = Vec::new();
    match method {
        Method::Galerkin => {
            if tau <= 0.5 * (alpha + half) {
                out.push(format!(
                    "galerkin theory needs tau > (alpha + (n-1)/2)/2; tau={tau}, alpha={alpha}"
                ));
            }
        }
        Method::Collocation => {
            if (2.0 * alpha).max(alpha) + half >= tau {
                out.push(format!(
                    "collocation theory needs max(2 alpha, alpha) + (n-1)/2 < tau; tau={tau}, alpha={alpha}"
                ));
            }
        }
    }
    out
}

/// Rate `2 tau - s` predicted for the error in `H^s`.
pub fn predicted_rate(shape: &ShapeFunction, s: f64) -> f64 {
    2.0 * shape.tau() - s
}

/// One side condition per `ker L` basis function: the mean value for `Y_00`,
/// the coefficient functional otherwise; targets are taken from `exact`.
pub fn constraints_for(symbol: &SpectralSymbol, exact: &SpectralFunction) -> Result<UnisolventConstraints> {
    let basis = kernel_basis(symbol)?;
    let mut functionals = Vec::new();
    let mut targets = Vec::new();
    for (l, m) in basis {
        let mu = if l == 0 {
            Functional::mean_value(symbol.n())?
        } else {
            let mut c = vec![0.0; (l + 1) * (l + 1)];
            c[harmonic_index(l, m)] = 1.0;
            Functional::Spectral(SpectralFunction::general_n3(l, c)?)
        };
        let target = if l == 0 {
            // the degree-0 part of u is the constant u_00 Y_00, i.e. its mean
            let mut e = vec![0.0; symbol.n()];
            e[0] = 1.0;
            exact.level_point_values(&e)?[0]
        } else {
            exact.coefficient(l, m)?
        };
        functionals.push(mu);
        targets.push(target);
    }
    UnisolventConstraints::new(functionals, targets)
}

/// Node set for one ladder entry.
pub fn generate_points(gen: &PointGenerator, count: usize, seed: u64) -> Result<PointSet> {
    match gen {
        PointGenerator::Fibonacci => fibonacci_points(count),
        PointGenerator::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (count as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
            let pts = (0..count)
                .map(|_| {
                    let z: f64 = rng.gen_range(-1.0..1.0);
                    let a: f64 = rng.gen_range(0.0..2.0 * PI);
                    let r = (1.0 - z * z).sqrt();
                    vec![r * a.cos(), r * a.sin(), z]
                })
                .collect();
            PointSet::new(3, pts)
        }
        PointGenerator::File(pattern) => {
            let x = load_points(pattern.replace("{N}", &count.to_string()))?;
            if x.len() != count {
                warn!("{pattern}: expected {count} points, found {}", x.len());
            }
            Ok(x)
        }
    }
}

/// Operator, shape and manufactured data for one study.
#[derive(Debug, Clone)]
pub struct StudySetup {
    pub symbol: SpectralSymbol,
    pub shape: ShapeFunction,
    pub exact: SpectralFunction,
    pub g: SpectralFunction,
    pub constraints: UnisolventConstraints,
    pub predicted_rate: f64,
    pub warnings: Vec<String>,
}

impl StudySetup {
    /// Benchmark density `u` as the exact solution and `g = L u`.
    pub fn from_config(cfg: &StudyConfig) -> Result<Self> {
        cfg.validate_ladder()?;
        let n = 3;
        let symbol = build_symbol(&cfg.operator, n)?;
        let shape = build_shape(&cfg.kernel, n, cfg.l_max)?;
        shape.check_degree(cfg.l_max)?;
        let limit = 2.0 * shape.tau() + (1.0 - n as f64) / 2.0;
        if cfg.sobolev_s >= limit {
            return Err(SpdoError::Config(format!(
                "norm index {} is outside the SRBF range s < {limit}",
                cfg.sobolev_s
            )));
        }
        let exact = exact_dirichlet_solution(dirichlet_degree().min(cfg.l_max))?.u;
        let g = apply(&symbol, &exact)?;
        let constraints = constraints_for(&symbol, &exact)?;
        let warnings = theory_warnings(cfg.method, &symbol, &shape);
        for w in &warnings {
            warn!("{w}");
        }
        Ok(Self {
            predicted_rate: predicted_rate(&shape, cfg.sobolev_s),
            symbol,
            shape,
            exact,
            g,
            constraints,
            warnings,
        })
    }
}

/// Per-row measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct RowDiagnostics {
    pub n: usize,
    pub h_x: f64,
    pub q_x: f64,
    pub error: f64,
    pub min_pivot: f64,
    pub condition: f64,
    pub asymmetry: f64,
    pub tail_bound: f64,
    pub error_tail: f64,
    pub relative_residual: f64,
    pub constraint_residual: f64,
    pub kernel_coeffs: KernelCoeffs,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RowOutcome {
    pub n: usize,
    pub result: std::result::Result<RowDiagnostics, String>,
}

/// `max_i |<mu_i, u~> - gamma_i|`.
pub fn constraint_residual(
    constraints: &UnisolventConstraints,
    c: &[f64],
    kernel: &KernelCoeffs,
    shape: &ShapeFunction,
    x: &PointSet,
    l_max: usize,
) -> Result<f64> {
    let dim = SphereDim::new(x.n())?;
    let mut worst = 0.0f64;
    for (mu, gamma) in constraints.functionals.iter().zip(&constraints.targets) {
        let mut v = 0.0;
        for (cj, p) in c.iter().zip(x.points()) {
            v += cj * functional_on_srbf(mu, shape, p, l_max)?;
        }
        for (&(l, m), k) in kernel {
            v += k * mu.pair_harmonic(dim, l, m)?;
        }
        worst = worst.max((v - gamma).abs());
    }
    Ok(worst)
}

/// Assembles, solves and measures one node set.
pub fn solve_row(setup: &StudySetup, cfg: &StudyConfig, x: &PointSet) -> Result<RowDiagnostics> {
    solve_row_full(setup, cfg, x).map(|s| s.diagnostics)
}

/// Coefficients, the assembled system and the row measurements.
#[derive(Debug, Clone)]
pub struct RowSolution {
    pub c: Vec<f64>,
    pub system: DenseSystem,
    pub diagnostics: RowDiagnostics,
}

pub fn solve_row_full(setup: &StudySetup, cfg: &StudyConfig, x: &PointSet) -> Result<RowSolution> {
    let mut options = AssemblyOptions::new(cfg.l_max);
    options.tail_tolerance = cfg.tail_tolerance;
    options.closed_form_identity = cfg.closed_form_identity;
    let problem = Problem {
        method: cfg.method,
        symbol: &setup.symbol,
        shape: &setup.shape,
        points: x,
        g: &setup.g,
        constraints: &setup.constraints,
        options,
    };
    let system = problem.system()?;
    let asymmetry = system.matrix.asymmetry();
    let (c, report) = cholesky_solve(&system)?;
    let kernel = kernel_correction(&setup.symbol, &setup.constraints, &c, &setup.shape, x, cfg.l_max)?;
    let err = sobolev_error(&setup.exact, &c, &kernel, &setup.shape, x, cfg.sobolev_s, cfg.l_max)?;
    let constraint_residual = constraint_residual(&setup.constraints, &c, &kernel, &setup.shape, x, cfg.l_max)?;
    let diagnostics = RowDiagnostics {
        n: x.len(),
        h_x: x.h_x().ok_or(SpdoError::RequiresN3(x.n()))?,
        q_x: x.q_x(),
        error: err.value,
        min_pivot: report.min_pivot,
        condition: report.condition,
        asymmetry,
        tail_bound: system.meta.tail_bound,
        error_tail: err.tail_estimate,
        relative_residual: report.relative_residual,
        constraint_residual,
        kernel_coeffs: kernel,
    };
    Ok(RowSolution { c, system, diagnostics })
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub method: Method,
    pub sobolev_s: f64,
    pub rows: Vec<ConvergenceRow>,
    pub outcomes: Vec<RowOutcome>,
    pub slope: Option<f64>,
    pub predicted_rate: f64,
    pub warnings: Vec<String>,
}

impl StudyReport {
    pub fn all_rows_ok(&self) -> bool {
        self.outcomes.iter().all(|o| o.result.is_ok())
    }

    pub fn errors_decreasing(&self) -> bool {
        self.rows.windows(2).all(|w| w[1].error < w[0].error)
    }

    pub fn diagnostics(&self) -> impl Iterator<Item = &RowDiagnostics> {
        self.outcomes.iter().filter_map(|o| o.result.as_ref().ok())
    }
}

fn run_row(setup: &StudySetup, cfg: &StudyConfig, count: usize) -> RowOutcome {
    let result = generate_points(&cfg.points, count, cfg.seed)
        .and_then(|x| solve_row(setup, cfg, &x))
        .map_err(|e| {
            warn!("N={count}: row aborted: {e}");
            e.to_string()
        });
    if let Ok(d) = &result {
        info!(
            "N={count}: h_X={:.5} error={:.9e} min pivot={:.3e}",
            d.h_x, d.error, d.min_pivot
        );
    }
    RowOutcome { n: count, result }
}

/// Runs every ladder entry; failed rows are reported and skipped in the EOC.
pub fn run_convergence_study(cfg: &StudyConfig) -> Result<StudyReport> {
    let setup = StudySetup::from_config(cfg)?;
    run_with_setup(&setup, cfg)
}

pub fn run_with_setup(setup: &StudySetup, cfg: &StudyConfig) -> Result<StudyReport> {
    let outcomes: Vec<RowOutcome> = if cfg.parallel_ladder {
        parallel_rows(setup, cfg)
    } else {
        cfg.ladder.iter().map(|&n| run_row(setup, cfg, n)).collect()
    };
    let good: Vec<(usize, f64, f64)> = outcomes
        .iter()
        .filter_map(|o| o.result.as_ref().ok())
        .map(|d| (d.n, d.h_x, d.error))
        .collect();
    let rows = eoc(&good)?;
    Ok(StudyReport {
        method: cfg.method,
        sobolev_s: cfg.sobolev_s,
        slope: global_slope(&rows),
        rows,
        outcomes,
        predicted_rate: setup.predicted_rate,
        warnings: setup.warnings.clone(),
    })
}

#[cfg(feature = "parallel")]
fn parallel_rows(setup: &StudySetup, cfg: &StudyConfig) -> Vec<RowOutcome> {
    use rayon::prelude::*;
    cfg.ladder.par_iter().map(|&n| run_row(setup, cfg, n)).collect()
}

#[cfg(not(feature = "parallel"))]
fn parallel_rows(setup: &StudySetup, cfg: &StudyConfig) -> Vec<RowOutcome> {
    cfg.ladder.iter().map(|&n| run_row(setup, cfg, n)).collect()
}

/// Outcome of the `ker L` recovery experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelRecovery {
    /// Recovered `u~_{0,0}`.
    pub constant: f64,
    pub expected: f64,
    pub constraint_residual: f64,
}

/// Galerkin for `-Delta` with `u = Y_10 + 0.7 Y_00` and a mean-value side
/// condition; returns the recovered constant coefficient.
pub fn laplace_kernel_recovery(count: usize, l_max: usize) -> Result<KernelRecovery> {
    let symbol = make_symbol("laplace-beltrami", 3)?;
    let shape = build_shape("wendland", 3, l_max)?;
    let expected = 0.7;
    let mut coeffs = vec![0.0; 4];
    coeffs[harmonic_index(0, 0)] = expected;
    coeffs[harmonic_index(1, 0)] = 1.0;
    let u = SpectralFunction::general_n3(1, coeffs)?;
    let g = apply(&symbol, &u)?;
    let constraints = constraints_for(&symbol, &u)?;
    let x = fibonacci_points(count)?;
    let bundle = Problem {
        method: Method::Galerkin,
        symbol: &symbol,
        shape: &shape,
        points: &x,
        g: &g,
        constraints: &constraints,
        options: AssemblyOptions::new(l_max),
    }
    .solve()?;
    let u1_mean = bundle.c.iter().sum::<f64>() * shape.coeff(0) / (4.0 * PI).sqrt();
    let constant = bundle.kernel_coeffs.get(&(0, 0)).copied().unwrap_or(0.0) + u1_mean;
    let residual = constraint_residual(&constraints, &bundle.c, &bundle.kernel_coeffs, &shape, &x, l_max)?;
    Ok(KernelRecovery {
        constant,
        expected,
        constraint_residual: residual,
    })
}
