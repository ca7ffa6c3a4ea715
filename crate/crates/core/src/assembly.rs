//! Galerkin and collocation systems, their solution, and the `ker L` correction.

use std::collections::BTreeMap;
use std::fmt;

use log::{debug, warn};
use nalgebra::DMatrix;

use crate::error::{Result, SpdoError};
use crate::kernels::ShapeFunction;
use crate::operators::{kernel_basis, Functional, SpectralSymbol, UnisolventConstraints};
use crate::pointsets::PointSet;
use crate::spectral::SpectralFunction;
use crate::sphcore::{harmonic_dim_f64, LegendreRecurrence, SphereDim};

/// Default tail tolerance, relative to the diagonal entry.
pub const DEFAULT_TAIL_TOLERANCE: f64 = 1e-3;
/// Target used when choosing `l_max` automatically, relative to the diagonal.
pub const AUTO_L_MAX_TARGET: f64 = 1e-12;
/// Constraint matrices with reciprocal condition below this are rejected.
pub const UNISOLVENCY_RCOND: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Galerkin,
    Collocation,
}

impl Method {
    /// Power of `phi_hat` in the matrix entries.
    pub fn power(self) -> i32 {
        match self {
            Method::Galerkin => 2,
            Method::Collocation => 1,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Galerkin => "galerkin",
            Method::Collocation => "collocation",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text.trim().to_ascii_lowercase().as_str() {
            "galerkin" | "g" => Ok(Method::Galerkin),
            "collocation" | "c" => Ok(Method::Collocation),
            other => Err(SpdoError::Config(format!("unknown method `{other}`"))),
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AssemblyOptions {
    pub l_max: usize,
    /// Maximum admissible tail bound relative to the diagonal entry;
    /// infinity disables the check.
    pub tail_tolerance: f64,
    /// Use the closed-form kernel for identity-operator collocation.
    pub closed_form_identity: bool,
}

impl AssemblyOptions {
    pub fn new(l_max: usize) -> Self {
        Self {
            l_max,
            tail_tolerance: DEFAULT_TAIL_TOLERANCE,
            closed_form_identity: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SystemMeta {
    pub method: Method,
    pub symbol: String,
    pub shape: String,
    pub l_max: usize,
    pub tail_bound: f64,
}

/// A row-major symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    size: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn from_fn(size: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = vec![0.0; size * size];
        for i in 0..size {
            for j in i..size {
                let v = f(i, j);
                data[i * size + j] = v;
                data[j * size + i] = v;
            }
        }
        Self { size, data }
    }

    pub fn from_row_major(size: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != size * size {
            return Err(SpdoError::DimensionMismatch(format!(
                "{} entries for a {size}x{size} matrix",
                data.len()
            )));
        }
        Ok(Self { size, data })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.size + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.size..(i + 1) * self.size]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.size)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `max |A_ij - A_ji| / max |A_ij|`.
    pub fn asymmetry(&self) -> f64 {
        let scale = self.data.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if scale == 0.0 {
            return 0.0;
        }
        let mut worst = 0.0f64;
        for i in 0..self.size {
            for j in 0..i {
                worst = worst.max((self.get(i, j) - self.get(j, i)).abs());
            }
        }
        worst / scale
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DenseSystem {
    pub matrix: SymMatrix,
    pub rhs: Vec<f64>,
    pub meta: SystemMeta,
}

/// Zonal weights `omega^{-1} N(n,l) L_hat(l) phi_hat(l)^p`, zero on `K(L)`.
pub fn entry_weights(symbol: &SpectralSymbol, shape: &ShapeFunction, power: i32, l_max: usize) -> Vec<f64> {
    let dim = shape.dim();
    let omega = dim.omega();
    (0..=l_max)
        .map(|l| {
            if symbol.in_kernel(l) {
                0.0
            } else {
                dim.harmonic_dim(l) * symbol.value(l) * shape.coeff(l).powi(power) / omega
            }
        })
        .collect()
}

fn check_inputs(symbol: &SpectralSymbol, shape: &ShapeFunction, x: &PointSet, l_max: usize) -> Result<()> {
    if symbol.n() != shape.n() || shape.n() != x.n() {
        return Err(SpdoError::DimensionMismatch(format!(
            "operator on S^{}, shape on S^{}, points on S^{}",
            symbol.n() - 1,
            shape.n() - 1,
            x.n() - 1
        )));
    }
    shape.check_degree(l_max)?;
    if let Some(l) = (0..=l_max).find(|&l| !symbol.value(l).is_finite()) {
        return Err(SpdoError::InfiniteKernel(format!(
            "{}: L_hat({l}) is not finite",
            symbol.name()
        )));
    }
    Ok(())
}

#[cfg(feature = "parallel")]
fn upper_rows(size: usize, row: impl Fn(usize) -> Vec<f64> + Sync + Send) -> Vec<Vec<f64>> {
    use rayon::prelude::*;
    (0..size).into_par_iter().map(row).collect()
}

#[cfg(not(feature = "parallel"))]
fn upper_rows(size: usize, row: impl Fn(usize) -> Vec<f64>) -> Vec<Vec<f64>> {
    (0..size).map(row).collect()
}

/// `A_ij = sum_l w_l P_l(n; x_i . x_j)`, one fused recurrence pass per
/// `i <= j` entry, mirrored.
pub fn zonal_gram(x: &PointSet, weights: &[f64]) -> Result<SymMatrix> {
    let rec = LegendreRecurrence::new(x.n(), weights.len().saturating_sub(1))?;
    Ok(zonal_matrix(x, |t| rec.fold(t, weights)))
}

fn zonal_matrix(x: &PointSet, kernel: impl Fn(f64) -> f64 + Sync + Send) -> SymMatrix {
    let size = x.len();
    let rows = upper_rows(size, |i| (i..size).map(|j| kernel(x.dot(i, j))).collect());
    SymMatrix::from_fn(size, |i, j| rows[i][j - i])
}

/// Envelope `sup_{l > l_max} |L_hat(l)| / (l+1)^{2 alpha}`.
fn symbol_tail_constant(symbol: &SpectralSymbol, l_max: usize) -> f64 {
    let ratio = |l: usize| symbol.value(l).abs() / (l as f64 + 1.0).powf(symbol.order());
    let window = (l_max + 1..=l_max + 2000).map(ratio).fold(0.0, f64::max);
    window.max(ratio(1_000_000))
}

/// `D` with `N(n,l) <= D (l+1)^{n-2}`.
fn harmonic_dim_constant(n: usize) -> f64 {
    let window = (0..=2000)
        .map(|l| harmonic_dim_f64(n, l) / (l as f64 + 1.0).powi(n as i32 - 2))
        .fold(0.0, f64::max);
    let asymptotic = 2.0 / (1..=n - 2).map(|k| k as f64).product::<f64>();
    window.max(asymptotic)
}

/// Shape envelope `(c2, tau_eff)` with `phi_hat(l) <= c2 (l+1)^{-2 tau_eff}` over
/// the upper half of the table; `tau_eff` is the smaller of the nominal and
/// fitted decay rates.
fn shape_envelope(shape: &ShapeFunction) -> (f64, f64) {
    let fit = crate::kernels::shape_decay_fit(shape);
    let tau = shape.tau().min(fit.tau_hat);
    let top = shape.table_l_max();
    let c2 = (top / 2..=top)
        .map(|l| shape.coeff(l) * (l as f64 + 1.0).powf(2.0 * tau))
        .fold(0.0, f64::max);
    (c2, tau)
}

/// Upper bound on `sum_{l > l_max} omega^{-1} N(n,l) |L_hat(l)| phi_hat(l)^p`.
pub fn truncation_bound(symbol: &SpectralSymbol, shape: &ShapeFunction, power: i32, l_max: usize) -> Result<f64> {
    let n = shape.n();
    let (c2, tau) = shape_envelope(shape);
    let exponent = n as f64 - 2.0 + symbol.order() - 2.0 * power as f64 * tau;
    if exponent >= -1.0 {
        return Err(SpdoError::DivergentSeries { exponent });
    }
    let d = harmonic_dim_constant(n);
    let cl = symbol_tail_constant(symbol, l_max);
    let omega = shape.dim().omega();
    Ok(d * cl * c2.powi(power) * (l_max as f64 + 1.0).powf(exponent + 1.0) / (-exponent - 1.0) / omega)
}

/// Smallest `l_max` whose tail bound is below `target` times the diagonal,
/// capped at the shape table.
pub fn auto_l_max(symbol: &SpectralSymbol, shape: &ShapeFunction, power: i32, target: f64) -> Result<usize> {
    let top = shape.table_l_max();
    let diag: f64 = entry_weights(symbol, shape, power, top).iter().map(|w| w.abs()).sum();
    let mut l = 8;
    while l < top {
        if truncation_bound(symbol, shape, power, l)? <= target * diag {
            return Ok(l);
        }
        l += 8;
    }
    warn!("tail target {target:e} not reached below the table degree {top}; using l_max={top}");
    Ok(top)
}

fn assemble(
    method: Method,
    symbol: &SpectralSymbol,
    shape: &ShapeFunction,
    x: &PointSet,
    opts: &AssemblyOptions,
) -> Result<(SymMatrix, f64)> {
    check_inputs(symbol, shape, x, opts.l_max)?;
    let p = method.power();
    let weights = entry_weights(symbol, shape, p, opts.l_max);
    let diag: f64 = weights.iter().map(|w| w.abs()).sum();
    let closed = method == Method::Collocation && symbol.is_identity() && opts.closed_form_identity;
    let tail = if closed && shape.has_closed_form() {
        0.0
    } else {
        match truncation_bound(symbol, shape, p, opts.l_max) {
            // an unchecked truncation is still a well-defined finite matrix
            Err(SpdoError::DivergentSeries { .. }) if opts.tail_tolerance.is_infinite() => f64::INFINITY,
            other => other?,
        }
    };
    if tail > opts.tail_tolerance * diag {
        return Err(SpdoError::TruncationTolerance {
            l_max: opts.l_max,
            bound: tail,
            tolerance: opts.tail_tolerance * diag,
        });
    }
    debug!(
        "{method} {symbol} l_max={} tail bound {tail:.3e} (diagonal {diag:.6e})",
        opts.l_max
    );
    let matrix = if closed && shape.has_closed_form() {
        zonal_matrix(x, |t| shape.eval(t))
    } else {
        zonal_gram(x, &weights)?
    };
    Ok((matrix, tail))
}

/// `A^G_ij = a(Phi_i, Phi_j)`.
pub fn galerkin_matrix(
    symbol: &SpectralSymbol,
    shape: &ShapeFunction,
    x: &PointSet,
    opts: &AssemblyOptions,
) -> Result<(SymMatrix, f64)> {
    assemble(Method::Galerkin, symbol, shape, x, opts)
}

/// `A^C_ij = L Phi_i (x_j)`.
pub fn collocation_matrix(
    symbol: &SpectralSymbol,
    shape: &ShapeFunction,
    x: &PointSet,
    opts: &AssemblyOptions,
) -> Result<(SymMatrix, f64)> {
    assemble(Method::Collocation, symbol, shape, x, opts)
}

/// Reference entries `sum_{l,m} L_hat(l) phi_hat(l)^p Y_{l,m}(x_i) Y_{l,m}(x_j)`
/// from explicit real harmonics (`n = 3`), row-major. Cost `O(N^2 l_max^2)`.
pub fn harmonic_double_sum(
    symbol: &SpectralSymbol,
    shape: &ShapeFunction,
    power: i32,
    x: &PointSet,
    l_max: usize,
) -> Result<Vec<f64>> {
    if x.n() != 3 {
        return Err(SpdoError::RequiresN3(x.n()));
    }
    let ys: Vec<Vec<f64>> = x
        .points()
        .map(|p| crate::sphcore::real_harmonics_n3(l_max, p))
        .collect::<Result<_>>()?;
    let mut out = Vec::with_capacity(x.len() * x.len());
    for yi in &ys {
        for yj in &ys {
            let mut s = 0.0;
            for l in 0..=l_max {
                let w = symbol.value(l) * shape.coeff(l).powi(power);
                let r = l * l..(l + 1) * (l + 1);
                s += w * yi[r.clone()].iter().zip(&yj[r]).map(|(a, b)| a * b).sum::<f64>();
            }
            out.push(s);
        }
    }
    Ok(out)
}

/// Removes the `K(L)` content of `g`, warning if it is above roundoff.
pub fn project_admissible(symbol: &SpectralSymbol, g: &SpectralFunction) -> SpectralFunction {
    let energies = g.level_energies();
    let total: f64 = energies.iter().sum();
    let offending: f64 = energies
        .iter()
        .enumerate()
        .filter(|(l, _)| symbol.in_kernel(*l))
        .map(|(_, e)| e)
        .sum();
    if offending > 1e-28 * total.max(f64::MIN_POSITIVE) && offending > 0.0 {
        warn!(
            "right-hand side has energy {offending:.3e} on ker {}; projecting it out",
            symbol.name()
        );
    }
    g.map_levels(|l| if symbol.in_kernel(l) { 0.0 } else { 1.0 })
}

/// `b_i = <g, Phi_i> = sum g_{l,m} phi_hat(l) Y_{l,m}(x_i)`.
pub fn galerkin_rhs(
    symbol: &SpectralSymbol,
    g: &SpectralFunction,
    shape: &ShapeFunction,
    x: &PointSet,
    l_max: usize,
) -> Result<Vec<f64>> {
    if g.n() != x.n() || shape.n() != x.n() {
        return Err(SpdoError::DimensionMismatch(
            "data, shape and points must share n".into(),
        ));
    }
    shape.check_degree(l_max)?;
    let smoothed = project_admissible(symbol, &g.truncated(l_max)).map_levels(|l| shape.coeff(l));
    x.points().map(|p| smoothed.eval(p)).collect()
}

/// `b_j = g(x_j)`.
pub fn collocation_rhs(g: &SpectralFunction, x: &PointSet) -> Result<Vec<f64>> {
    x.points().map(|p| g.eval(p)).collect()
}

/// `b_j = g(x_j)` for a pointwise-evaluable `g`.
pub fn collocation_rhs_fn(g: impl Fn(&[f64]) -> f64, x: &PointSet) -> Vec<f64> {
    x.points().map(g).collect()
}

/// Lower Cholesky factor `A = R R^T` with the pivots `R_kk^2`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    size: usize,
    lower: Vec<f64>,
    pivots: Vec<f64>,
}

impl Cholesky {
    /// Factorizes; a nonpositive pivot is an error naming its row. No
    /// diagonal shift is ever applied.
    pub fn factor(a: &SymMatrix) -> Result<Self> {
        let n = a.size();
        let mut lower = vec![0.0; n * n];
        let mut pivots = Vec::with_capacity(n);
        let mut smallest = f64::INFINITY;
        for k in 0..n {
            let rk = &lower[k * n..k * n + k];
            let pivot = a.get(k, k) - rk.iter().map(|v| v * v).sum::<f64>();
            if !(pivot > 0.0 && pivot.is_finite()) {
                return Err(SpdoError::NotPositiveDefinite {
                    row: k,
                    pivot,
                    smallest,
                });
            }
            smallest = smallest.min(pivot);
            pivots.push(pivot);
            let d = pivot.sqrt();
            lower[k * n + k] = d;
            for i in k + 1..n {
                let s: f64 = (0..k).map(|j| lower[i * n + j] * lower[k * n + j]).sum();
                lower[i * n + k] = (a.get(i, k) - s) / d;
            }
        }
        Ok(Self { size: n, lower, pivots })
    }

    pub fn pivots(&self) -> &[f64] {
        &self.pivots
    }

    pub fn min_pivot(&self) -> f64 {
        self.pivots.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.size;
        let mut y = b.to_vec();
        for i in 0..n {
            let s: f64 = (0..i).map(|j| self.lower[i * n + j] * y[j]).sum();
            y[i] = (y[i] - s) / self.lower[i * n + i];
        }
        for i in (0..n).rev() {
            let s: f64 = (i + 1..n).map(|j| self.lower[j * n + i] * y[j]).sum();
            y[i] = (y[i] - s) / self.lower[i * n + i];
        }
        y
    }
}

fn normalize(v: &mut [f64]) -> f64 {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    norm
}

/// 2-norm condition estimate by power and inverse iteration (deterministic start).
pub fn condition_estimate(a: &SymMatrix, chol: &Cholesky, iterations: usize) -> f64 {
    let n = a.size();
    if n == 0 {
        return 1.0;
    }
    let start: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.618_033_988_75).fract()).collect();
    let (mut v, mut w) = (start.clone(), start);
    normalize(&mut v);
    normalize(&mut w);
    let (mut lam_max, mut inv_min) = (0.0, 0.0);
    for _ in 0..iterations {
        v = a.mul_vec(&v);
        lam_max = normalize(&mut v);
        w = chol.solve(&w);
        inv_min = normalize(&mut w);
    }
    lam_max * inv_min
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveReport {
    pub min_pivot: f64,
    pub max_pivot: f64,
    pub condition: f64,
    pub relative_residual: f64,
}

/// Solves an SPD system by Cholesky, reporting pivots, a condition estimate
/// and the relative residual.
pub fn cholesky_solve(system: &DenseSystem) -> Result<(Vec<f64>, SolveReport)> {
    let a = &system.matrix;
    if system.rhs.len() != a.size() {
        return Err(SpdoError::DimensionMismatch(format!(
            "rhs of length {} for a {}x{} matrix",
            system.rhs.len(),
            a.size(),
            a.size()
        )));
    }
    let chol = Cholesky::factor(a)?;
    let c = chol.solve(&system.rhs);
    let r = a.mul_vec(&c);
    let res = r
        .iter()
        .zip(&system.rhs)
        .map(|(x, b)| (x - b).powi(2))
        .sum::<f64>()
        .sqrt();
    let bn = system.rhs.iter().map(|b| b * b).sum::<f64>().sqrt();
    let relative_residual = if bn > 0.0 { res / bn } else { res };
    let condition = condition_estimate(a, &chol, 40);
    if relative_residual > 1e-10 * condition.max(1.0) {
        warn!("relative residual {relative_residual:.3e} at condition ~{condition:.3e}");
    }
    let report = SolveReport {
        min_pivot: chol.min_pivot(),
        max_pivot: chol.pivots().iter().copied().fold(0.0, f64::max),
        condition,
        relative_residual,
    };
    Ok((c, report))
}

/// `<mu, Phi_j>` with the kernel truncated at `l_max`.
pub fn functional_on_srbf(mu: &Functional, shape: &ShapeFunction, center: &[f64], l_max: usize) -> Result<f64> {
    match mu {
        Functional::PointEval(x) => {
            let t = crate::spectral::dot(x, center).clamp(-1.0, 1.0);
            shape.eval_series(t, l_max)
        }
        Functional::Spectral(m) => {
            let phi = shape.srbf(center, m.l_max().min(l_max))?;
            Ok(m.level_inners(&phi)?.iter().sum())
        }
    }
}

/// Coefficients of `u0 = sum c_{l,m} Y_{l,m}` over `ker L`, keyed by `(l, m)`.
pub type KernelCoeffs = BTreeMap<(usize, isize), f64>;

/// Solves `sum c_{l,m} <mu_i, Y_{l,m}> = gamma_i - <mu_i, u1>` for the `ker L`
/// component.
pub fn kernel_correction(
    symbol: &SpectralSymbol,
    constraints: &UnisolventConstraints,
    c: &[f64],
    shape: &ShapeFunction,
    x: &PointSet,
    l_max: usize,
) -> Result<KernelCoeffs> {
    let basis = kernel_basis(symbol)?;
    if basis.is_empty() {
        if !constraints.is_empty() {
            return Err(SpdoError::DimensionMismatch(format!(
                "{} has trivial kernel but {} constraints were given",
                symbol.name(),
                constraints.len()
            )));
        }
        return Ok(KernelCoeffs::new());
    }
    if c.len() != x.len() {
        return Err(SpdoError::DimensionMismatch(format!(
            "{} coefficients for {} points",
            c.len(),
            x.len()
        )));
    }
    let m = basis.len();
    let k = constraints.kernel_matrix(symbol)?;
    let mut rhs = Vec::with_capacity(m);
    for (mu, gamma) in constraints.functionals.iter().zip(&constraints.targets) {
        let mut u1 = 0.0;
        for (cj, xj) in c.iter().zip(x.points()) {
            u1 += cj * functional_on_srbf(mu, shape, xj, l_max)?;
        }
        rhs.push(gamma - u1);
    }
    let mat = DMatrix::from_fn(m, m, |i, j| k[i][j]);
    let sv = mat.clone().singular_values();
    let (smax, smin) = (sv.max(), sv.min());
    let rcond = if smax > 0.0 { smin / smax } else { 0.0 };
    if rcond < UNISOLVENCY_RCOND {
        return Err(SpdoError::NotUnisolvent { rcond });
    }
    let sol = mat
        .lu()
        .solve(&nalgebra::DVector::from_vec(rhs))
        .ok_or(SpdoError::NotUnisolvent { rcond })?;
    Ok(basis.into_iter().zip(sol.iter().copied()).collect())
}

/// `u~ = u0~ + sum c_j Phi_j`.
#[derive(Debug, Clone)]
pub struct SolutionBundle {
    pub c: Vec<f64>,
    pub kernel_coeffs: KernelCoeffs,
    pub meta: SystemMeta,
    pub report: SolveReport,
}

impl SolutionBundle {
    /// Pointwise value with the kernel truncated at `meta.l_max`.
    pub fn eval(&self, shape: &ShapeFunction, x: &PointSet, y: &[f64]) -> Result<f64> {
        let dim = SphereDim::new(x.n())?;
        let rec = LegendreRecurrence::new(x.n(), self.meta.l_max)?;
        let w = shape.zonal_weights(self.meta.l_max);
        let mut v: f64 = self
            .c
            .iter()
            .zip(x.points())
            .map(|(c, p)| c * rec.fold(crate::spectral::dot(p, y).clamp(-1.0, 1.0), &w))
            .sum();
        for (&(l, m), coef) in &self.kernel_coeffs {
            v += coef * crate::operators::harmonic_value(dim, l, m, y)?;
        }
        Ok(v)
    }
}

/// Full pipeline: assemble, solve and apply the `ker L` correction.
pub struct Problem<'a> {
    pub method: Method,
    pub symbol: &'a SpectralSymbol,
    pub shape: &'a ShapeFunction,
    pub points: &'a PointSet,
    pub g: &'a SpectralFunction,
    pub constraints: &'a UnisolventConstraints,
    pub options: AssemblyOptions,
}

impl Problem<'_> {
    pub fn system(&self) -> Result<DenseSystem> {
        let l_max = self.options.l_max;
        let (matrix, tail_bound) = assemble(self.method, self.symbol, self.shape, self.points, &self.options)?;
        let rhs = match self.method {
            Method::Galerkin => galerkin_rhs(self.symbol, self.g, self.shape, self.points, l_max)?,
            Method::Collocation => collocation_rhs(self.g, self.points)?,
        };
        Ok(DenseSystem {
            matrix,
            rhs,
            meta: SystemMeta {
                method: self.method,
                symbol: self.symbol.name().to_string(),
                shape: self.shape.name().to_string(),
                l_max,
                tail_bound,
            },
        })
    }

    pub fn solve(&self) -> Result<SolutionBundle> {
        let system = self.system()?;
        let (c, report) = cholesky_solve(&system)?;
        let kernel_coeffs = kernel_correction(
            self.symbol,
            self.constraints,
            &c,
            self.shape,
            self.points,
            self.options.l_max,
        )?;
        Ok(SolutionBundle {
            c,
            kernel_coeffs,
            meta: system.meta,
            report,
        })
    }
}
