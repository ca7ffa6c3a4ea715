//! Error norms, convergence orders and identity checks.

use log::{info, warn};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::assembly::KernelCoeffs;
use crate::error::{Result, SpdoError};
use crate::kernels::{native_inner, ShapeFunction};
use crate::operators::harmonic_value;
use crate::pointsets::PointSet;
use crate::spectral::{dot, SpectralFunction};
use crate::sphcore::{harmonic_index, real_harmonics_n3, LegendreRecurrence, SphereDim};

/// Tail norm below which the benchmark series are cut.
pub const EXACT_TAIL_TARGET: f64 = 1e-16;
/// Tail estimates above this raise a warning on an [`ErrorReport`].
pub const ERROR_TAIL_WARNING: f64 = 1e-9;

/// Coefficients `phi_hat(l) sum_j c_j Y_{l,m}(x_j)` of `sum c_j Phi_j` on `S^2`.
pub fn srbf_spectral_coeffs(c: &[f64], shape: &ShapeFunction, x: &PointSet, l_max: usize) -> Result<SpectralFunction> {
    if x.n() != 3 {
        return Err(SpdoError::RequiresN3(x.n()));
    }
    check_lengths(c, x)?;
    shape.check_degree(l_max)?;
    let mut coeffs = vec![0.0; (l_max + 1) * (l_max + 1)];
    for (cj, p) in c.iter().zip(x.points()) {
        let y = real_harmonics_n3(l_max, p)?;
        for (a, b) in coeffs.iter_mut().zip(&y) {
            *a += cj * b;
        }
    }
    SpectralFunction::general_n3(l_max, coeffs).map(|f| f.map_levels(|l| shape.coeff(l)))
}

/// Spectral coefficients of `u~ = u0~ + sum c_j Phi_j` on `S^2`.
pub fn solution_spectral(
    c: &[f64],
    kernel: &KernelCoeffs,
    shape: &ShapeFunction,
    x: &PointSet,
    l_max: usize,
) -> Result<SpectralFunction> {
    let u1 = srbf_spectral_coeffs(c, shape, x, l_max)?;
    let mut coeffs = u1.general_coeffs().expect("general mode").to_vec();
    for (&(l, m), v) in kernel {
        if l <= l_max {
            coeffs[harmonic_index(l, m)] += v;
        }
    }
    SpectralFunction::general_n3(l_max, coeffs)
}

fn check_lengths(c: &[f64], x: &PointSet) -> Result<()> {
    if c.len() != x.len() {
        return Err(SpdoError::DimensionMismatch(format!(
            "{} coefficients for {} centres",
            c.len(),
            x.len()
        )));
    }
    Ok(())
}

/// `sum c_j Phi_j(y)` with the kernel truncated at `l_max`.
pub fn srbf_eval(c: &[f64], shape: &ShapeFunction, x: &PointSet, l_max: usize, y: &[f64]) -> Result<f64> {
    check_lengths(c, x)?;
    shape.check_degree(l_max)?;
    let rec = LegendreRecurrence::new(x.n(), l_max)?;
    let w = shape.zonal_weights(l_max);
    Ok(c.iter()
        .zip(x.points())
        .map(|(cj, p)| cj * rec.fold(dot(p, y).clamp(-1.0, 1.0), &w))
        .sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub s: f64,
    pub value: f64,
    pub l_max_used: usize,
    /// Bound on the norm of the neglected SRBF tail above `l_max`.
    pub tail_estimate: f64,
    /// Per-degree contributions to `value^2`.
    pub decomposition: Vec<f64>,
    pub warning: Option<String>,
}

/// Fourier coefficient `v_{l,m}`; `l = 0` works in any dimension.
fn coefficient_any(v: &SpectralFunction, l: usize, m: isize) -> Result<f64> {
    if l == 0 {
        let mut e = vec![0.0; v.n()];
        e[0] = 1.0;
        let level0 = v.level_point_values(&e)?[0];
        return Ok(level0 * v.dim().omega().sqrt());
    }
    v.coefficient(l, m)
}

/// Per-degree `sum_{i,j} c_i c_j P_l(n; x_i . x_j)`, symmetric half plus diagonal.
fn pair_sums(c: &[f64], x: &PointSet, l_max: usize) -> Result<Vec<f64>> {
    let rec = LegendreRecurrence::new(x.n(), l_max)?;
    let row = |i: usize| {
        let mut acc = vec![0.0; l_max + 1];
        let mut pl = vec![0.0; l_max + 1];
        for j in i..x.len() {
            rec.fill(x.dot(i, j), &mut pl);
            let f = if i == j { c[i] * c[i] } else { 2.0 * c[i] * c[j] };
            for (a, p) in acc.iter_mut().zip(&pl) {
                *a += f * p;
            }
        }
        acc
    };
    #[cfg(feature = "parallel")]
    let rows: Vec<Vec<f64>> = {
        use rayon::prelude::*;
        (0..x.len()).into_par_iter().map(row).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Vec<Vec<f64>> = (0..x.len()).map(row).collect();
    let mut total = vec![0.0; l_max + 1];
    for r in rows {
        for (t, v) in total.iter_mut().zip(r) {
            *t += v;
        }
    }
    Ok(total)
}

/// `||u - u~||_s` for `u~ = u0~ + sum c_j Phi_j` truncated at `l_max`.
///
/// General-mode `exact` uses explicit coefficient differences; zonal `exact`
/// uses [`sobolev_error_cross`], which needs no harmonics.
pub fn sobolev_error(
    exact: &SpectralFunction,
    c: &[f64],
    kernel: &KernelCoeffs,
    shape: &ShapeFunction,
    x: &PointSet,
    s: f64,
    l_max: usize,
) -> Result<ErrorReport> {
    if exact.is_zonal() {
        return sobolev_error_cross(exact, c, kernel, shape, x, s, l_max);
    }
    check_lengths(c, x)?;
    let approx = solution_spectral(c, kernel, shape, x, l_max)?;
    let diff = exact.truncated(l_max).sub_general(&approx)?;
    let decomposition: Vec<f64> = diff
        .level_energies()
        .iter()
        .enumerate()
        .map(|(l, e)| (l as f64 + 1.0).powf(2.0 * s) * e)
        .collect();
    Ok(report(decomposition, c, shape, x, s, l_max))
}

fn report(
    decomposition: Vec<f64>,
    c: &[f64],
    shape: &ShapeFunction,
    x: &PointSet,
    s: f64,
    l_max: usize,
) -> ErrorReport {
    let total: f64 = decomposition.iter().sum();
    let tail_estimate = srbf_tail_norm(c, shape, x, s, l_max);
    let value = total.max(0.0).sqrt();
    let warning = (tail_estimate > ERROR_TAIL_WARNING).then(|| {
        let msg = format!("SRBF tail above l_max={l_max} may contribute up to {tail_estimate:.2e}");
        // the bound is worst-case; only shout when it rivals the measured error
        if tail_estimate > 0.1 * value {
            warn!("{msg}");
        } else {
            info!("{msg}");
        }
        msg
    });
    ErrorReport {
        s,
        value,
        l_max_used: l_max,
        tail_estimate,
        decomposition,
        warning,
    }
}

/// `||u - u~||_s` by expanding the square per degree with the addition formula:
/// `|u_l|^2 - 2 <u_l, u~_l> + |u~_l|^2`. Works in any `n` (the `ker L`
/// coefficients need `n = 3` unless `K(L) ⊆ {0}`). Cancellation limits the
/// absolute accuracy to about `sqrt(eps) ||u||_s`.
pub fn sobolev_error_cross(
    exact: &SpectralFunction,
    c: &[f64],
    kernel: &KernelCoeffs,
    shape: &ShapeFunction,
    x: &PointSet,
    s: f64,
    l_max: usize,
) -> Result<ErrorReport> {
    check_lengths(c, x)?;
    shape.check_degree(l_max)?;
    if exact.n() != x.n() {
        return Err(SpdoError::DimensionMismatch(
            "exact solution and points differ in n".into(),
        ));
    }
    let dim = SphereDim::new(x.n())?;
    let omega = dim.omega();
    let exact = exact.truncated(l_max);
    let energies = exact.level_energies();
    let pairs = pair_sums(c, x, l_max)?;
    let mut cross = vec![0.0; l_max + 1];
    for (cj, p) in c.iter().zip(x.points()) {
        for (l, v) in exact.level_point_values(p)?.iter().enumerate() {
            cross[l] += cj * v;
        }
    }
    let mut kernel_cross = vec![0.0; l_max + 1];
    let mut kernel_self = vec![0.0; l_max + 1];
    let mut kernel_exact = vec![0.0; l_max + 1];
    for (&(l, m), k) in kernel {
        if l > l_max {
            continue;
        }
        let mut at_nodes = 0.0;
        for (cj, p) in c.iter().zip(x.points()) {
            at_nodes += cj * harmonic_value(dim, l, m, p)?;
        }
        kernel_cross[l] += k * shape.coeff(l) * at_nodes;
        kernel_self[l] += k * k;
        kernel_exact[l] += k * coefficient_any(&exact, l, m)?;
    }
    let decomposition: Vec<f64> = (0..=l_max)
        .map(|l| {
            let phi = shape.coeff(l);
            let e_exact = if l < energies.len() { energies[l] } else { 0.0 };
            let u1_self = phi * phi * pairs[l] * dim.harmonic_dim(l) / omega;
            let u_self = u1_self + 2.0 * kernel_cross[l] + kernel_self[l];
            let u_cross = phi * cross[l] + kernel_exact[l];
            (l as f64 + 1.0).powf(2.0 * s) * (e_exact - 2.0 * u_cross + u_self)
        })
        .collect();
    Ok(report(decomposition, c, shape, x, s, l_max))
}

/// `||sum c_j Phi_j||_s` restricted to degrees above `l_max`, bounded with
/// `|sum_m sum_j c_j Y(x_j)|^2 <= (sum|c_j|)^2 N/omega` and the shape envelope.
fn srbf_tail_norm(c: &[f64], shape: &ShapeFunction, x: &PointSet, s: f64, l_max: usize) -> f64 {
    let Ok(dim) = SphereDim::new(x.n()) else {
        return f64::INFINITY;
    };
    let top = shape.table_l_max();
    let tau = shape.tau();
    let c2 = (top / 2..=top)
        .map(|l| shape.coeff(l) * (l as f64 + 1.0).powf(2.0 * tau))
        .fold(0.0, f64::max);
    let l1: f64 = c.iter().map(|v| v.abs()).sum();
    let n = x.n() as f64;
    // sum_{l > L} (l+1)^{2s} c2^2 (l+1)^{-4 tau} 2 (l+1)^{n-2} / omega
    let exponent = 2.0 * s - 4.0 * tau + n - 2.0;
    if exponent >= -1.0 {
        return f64::INFINITY;
    }
    let sum = (l_max as f64 + 1.0).powf(exponent + 1.0) / (-exponent - 1.0);
    l1 * c2 * (2.0 * sum / dim.omega()).sqrt()
}

/// Same quantity by explicit coefficient differences (`n = 3`).
pub fn sobolev_error_direct(
    exact: &SpectralFunction,
    c: &[f64],
    kernel: &KernelCoeffs,
    shape: &ShapeFunction,
    x: &PointSet,
    s: f64,
    l_max: usize,
) -> Result<f64> {
    let approx = solution_spectral(c, kernel, shape, x, l_max)?;
    Ok(exact.truncated(l_max).sub_general(&approx)?.sobolev_norm(s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    pub h_x: f64,
    pub error: f64,
    pub eoc: Option<f64>,
}

/// Pairwise orders `log(e_{k-1}/e_k) / log(h_{k-1}/h_k)`; the first row has none.
pub fn eoc(rows: &[(usize, f64, f64)]) -> Result<Vec<ConvergenceRow>> {
    let mut out: Vec<ConvergenceRow> = Vec::with_capacity(rows.len());
    for (k, &(n, h, e)) in rows.iter().enumerate() {
        if !(e > 0.0 && h > 0.0) {
            return Err(SpdoError::Config(format!("row {k}: h and error must be positive")));
        }
        let eoc = match out.last() {
            None => None,
            Some(prev) => {
                if h >= prev.h_x {
                    return Err(SpdoError::NonMonotoneLadder(k));
                }
                Some((prev.error / e).ln() / (prev.h_x / h).ln())
            }
        };
        out.push(ConvergenceRow {
            n,
            h_x: h,
            error: e,
            eoc,
        });
    }
    Ok(out)
}

/// Least-squares slope of `log e` against `log h`.
pub fn global_slope(rows: &[ConvergenceRow]) -> Option<f64> {
    if rows.len() < 2 {
        return None;
    }
    let pts: Vec<(f64, f64)> = rows.iter().map(|r| (r.h_x.ln(), r.error.ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// Random real coefficients in `[-1, 1]` for every degree `<= l_max`.
pub fn random_band_limited(rng: &mut impl Rng, l_max: usize) -> SpectralFunction {
    let coeffs = (0..(l_max + 1) * (l_max + 1))
        .map(|_| rng.gen_range(-1.0..1.0))
        .collect();
    SpectralFunction::general_n3(l_max, coeffs).expect("consistent size")
}

/// `max_{v, j} |v(x_j) - <v, Phi_j>_phi|` over random band-limited `v` (`n = 3`).
pub fn verify_reproducing(shape: &ShapeFunction, x: &PointSet, trials: usize, l_max: usize, seed: u64) -> Result<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let functions: Vec<SpectralFunction> = (0..trials).map(|_| random_band_limited(&mut rng, l_max)).collect();
    reproducing_deviation(shape, x, &functions, l_max)
}

/// Reproducing-identity deviation for given functions, with `Phi_j` truncated at `l_max`.
pub fn reproducing_deviation(
    shape: &ShapeFunction,
    x: &PointSet,
    functions: &[SpectralFunction],
    l_max: usize,
) -> Result<f64> {
    if x.n() != 3 {
        return Err(SpdoError::RequiresN3(x.n()));
    }
    shape.check_degree(l_max)?;
    let kernels: Vec<SpectralFunction> = x.points().map(|p| shape.srbf(p, l_max)).collect::<Result<_>>()?;
    let mut worst = 0.0f64;
    for v in functions {
        for (p, phi) in x.points().zip(&kernels) {
            let d = (v.eval(p)? - native_inner(v, phi, shape)?).abs();
            worst = worst.max(d);
        }
    }
    Ok(worst)
}

/// Zonal data of the exterior Dirichlet benchmark, axis `e_3`, source at `0.25 e_3`.
#[derive(Debug, Clone)]
pub struct DirichletData {
    /// Boundary values `U_D`, Legendre coefficients `0.25^l`.
    pub u_d: SpectralFunction,
    /// Right-hand side `-(l+1)/(2l+1) 0.25^l`.
    pub g: SpectralFunction,
    /// Exact density `-(l+1) 0.25^l`.
    pub u: SpectralFunction,
}

pub const DIRICHLET_RATIO: f64 = 0.25;

/// Smallest degree beyond which the `L^2` tail of the exact density is below
/// [`EXACT_TAIL_TARGET`].
pub fn dirichlet_degree() -> usize {
    let energy = |l: usize| {
        let lf = l as f64;
        4.0 * std::f64::consts::PI * (lf + 1.0).powi(2) * DIRICHLET_RATIO.powi(2 * l as i32) / (2.0 * lf + 1.0)
    };
    let mut l = 1;
    loop {
        let tail: f64 = (l + 1..l + 200).map(energy).sum();
        if tail.sqrt() < EXACT_TAIL_TARGET {
            return l;
        }
        l += 1;
    }
}

/// Benchmark data on `S^2` truncated at `l_max`.
pub fn exact_dirichlet_solution(l_max: usize) -> Result<DirichletData> {
    let e3 = [0.0, 0.0, 1.0];
    let q = |l: usize| DIRICHLET_RATIO.powi(l as i32);
    let series = |f: &dyn Fn(usize) -> f64| SpectralFunction::zonal(3, &e3, (0..=l_max).map(f).collect());
    Ok(DirichletData {
        u_d: series(&|l| q(l))?,
        g: series(&|l| -((l + 1) as f64) / (2 * l + 1) as f64 * q(l))?,
        u: series(&|l| -((l + 1) as f64) * q(l))?,
    })
}

/// `U_D(x) = (1.0625 - 0.5 x_3)^{-1/2}`.
pub fn dirichlet_boundary_closed(x: &[f64]) -> f64 {
    (1.0625 - 0.5 * x[2]).powf(-0.5)
}

/// `u(x) = (0.25 x_3 - 1) / (1.0625 - 0.5 x_3)^{3/2}`.
pub fn dirichlet_density_closed(x: &[f64]) -> f64 {
    (0.25 * x[2] - 1.0) / (1.0625 - 0.5 * x[2]).powf(1.5)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::{kernel_eval, wendland_shape};
    use crate::operators::{apply, make_symbol};
    use crate::pointsets::fibonacci_points;
    use std::f64::consts::PI;

    fn random_points(rng: &mut impl Rng, count: usize) -> PointSet {
        let pts = (0..count)
            .map(|_| {
                let v: Vec<f64> = (0..3).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let r = dot(&v, &v).sqrt();
                v.iter().map(|c| c / r).collect()
            })
            .collect();
        PointSet::new(3, pts).unwrap()
    }

    #[test]
    fn srbf_coefficients() {
        let shape = wendland_shape(3, 400).unwrap();
        let x = fibonacci_points(3).unwrap();
        let z = srbf_spectral_coeffs(&[0.0; 3], &shape, &x, 20).unwrap();
        assert_eq!(z.sobolev_norm(0.0), 0.0);

        let pole = PointSet::new(3, vec![vec![0.0, 0.0, 1.0]]).unwrap();
        let f = srbf_spectral_coeffs(&[1.0], &shape, &pole, 10).unwrap();
        for l in 0..=10usize {
            for m in -(l as isize)..=l as isize {
                let v = f.coefficient(l, m).unwrap();
                if m == 0 {
                    let y = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
                    assert!((v - shape.coeff(l) * y).abs() < 1e-15);
                } else {
                    assert!(v.abs() < 1e-15);
                }
            }
        }

        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let x = random_points(&mut rng, 3);
        let c = [0.7, -1.1, 0.4];
        let f = srbf_spectral_coeffs(&c, &shape, &x, 400).unwrap();
        for _ in 0..20 {
            let y = random_points(&mut rng, 1);
            let y = y.point(0);
            let spectral = f.eval(y).unwrap();
            let via_eval = srbf_eval(&c, &shape, &x, 400, y).unwrap();
            assert!((spectral - via_eval).abs() < 1e-10);
            // the closed-form kernel differs only by the truncation tail
            let closed: f64 = c
                .iter()
                .zip(x.points())
                .map(|(cj, p)| cj * kernel_eval(&shape, dot(p, y)))
                .sum();
            assert!((spectral - closed).abs() < 1e-4);
        }
    }

    #[test]
    fn error_paths_agree() {
        let shape = wendland_shape(3, 60).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let x = random_points(&mut rng, 7);
        let c: Vec<f64> = (0..7).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let data = exact_dirichlet_solution(40).unwrap();
        let mut kernel = KernelCoeffs::new();
        kernel.insert((0, 0), 0.3);
        kernel.insert((1, -1), -0.2);
        for exact in [
            data.u.clone(),
            data.u.to_general().unwrap(),
            random_band_limited(&mut rng, 12),
        ] {
            for s in [-0.5, 0.0, 0.75] {
                for k in [KernelCoeffs::new(), kernel.clone()] {
                    let fast = sobolev_error_cross(&exact, &c, &k, &shape, &x, s, 60).unwrap();
                    let direct = sobolev_error_direct(&exact, &c, &k, &shape, &x, s, 60).unwrap();
                    assert!(
                        (fast.value - direct).abs() < 1e-12 * direct.max(1.0),
                        "{} vs {direct}",
                        fast.value
                    );
                    let sum: f64 = fast.decomposition.iter().sum();
                    assert!((sum - fast.value.powi(2)).abs() < 1e-12 * sum.max(1.0));
                }
            }
        }
    }

    #[test]
    fn error_trivial_cases() {
        let shape = wendland_shape(3, 100).unwrap();
        let x = fibonacci_points(10).unwrap();
        let exact = exact_dirichlet_solution(40).unwrap().u;
        let none = KernelCoeffs::new();
        let zero = sobolev_error(&exact, &[0.0; 10], &none, &shape, &x, -0.5, 100).unwrap();
        assert!((zero.value - exact.sobolev_norm(-0.5)).abs() < 1e-14);
        let c: Vec<f64> = (0..10).map(|i| (i as f64 * 0.37).sin()).collect();
        let own = srbf_spectral_coeffs(&c, &shape, &x, 100).unwrap();
        let selfd = sobolev_error(&own, &c, &none, &shape, &x, -0.5, 100).unwrap();
        assert!(selfd.value < 1e-12, "{}", selfd.value);
    }

    #[test]
    fn benchmark_energies() {
        let data = exact_dirichlet_solution(30).unwrap();
        for (l, e) in data.u.level_energies().iter().enumerate() {
            let lf = l as f64;
            let expect = 4.0 * PI * (lf + 1.0).powi(2) * 0.0625f64.powi(l as i32) / (2.0 * lf + 1.0);
            assert!((e - expect).abs() <= 1e-13 * expect);
        }
        // quadrature oracle for u_{l,0} on a Gauss x trapezoid grid
        let rule = crate::sphcore::gauss_legendre(200).unwrap();
        for l in [0usize, 1, 3, 7] {
            let y0 =
                |z: f64| ((2 * l + 1) as f64 / (4.0 * PI)).sqrt() * crate::sphcore::legendre_eval(3, l, z).unwrap()[l];
            // zonal integrand: the azimuthal trapezoid integrates exactly to 2 pi
            let q = 2.0 * PI * rule.integrate(|z| dirichlet_density_closed(&[0.0, 0.0, z]) * y0(z));
            let expect = -((l + 1) as f64) * 0.25f64.powi(l as i32) * (4.0 * PI / (2 * l + 1) as f64).sqrt();
            assert!((q - expect).abs() < 1e-10, "l={l}: {q} vs {expect}");
        }
    }

    #[test]
    fn benchmark_pole_values_and_consistency() {
        let l_max = dirichlet_degree();
        assert!(l_max < 60, "{l_max}");
        let data = exact_dirichlet_solution(l_max).unwrap();
        let pole = [0.0, 0.0, 1.0];
        assert!((data.u_d.eval(&pole).unwrap() - 4.0 / 3.0).abs() < 1e-14);
        assert!((dirichlet_boundary_closed(&pole) - 4.0 / 3.0).abs() < 1e-15);
        assert!((data.u.eval(&pole).unwrap() + 16.0 / 9.0).abs() < 1e-14);
        assert!((dirichlet_density_closed(&pole) + 16.0 / 9.0).abs() < 1e-14);
        let s = make_symbol("weakly-singular", 3).unwrap();
        let su = apply(&s, &data.u).unwrap();
        let (_, a) = su.zonal_parts().unwrap();
        let (_, b) = data.g.zonal_parts().unwrap();
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= 1e-15 * y.abs());
        }
        // g at the pole equals -U_D/2 + D U_D with the double-layer symbol -1/(4l+2)
        let d = make_symbol("double-layer", 3).unwrap();
        let rhs = apply(&d, &data.u_d).unwrap().eval(&pole).unwrap() - 0.5 * data.u_d.eval(&pole).unwrap();
        assert!((data.g.eval(&pole).unwrap() - rhs).abs() < 1e-14, "{rhs}");
    }

    #[test]
    fn eoc_examples() {
        let rows = eoc(&[(20, 0.65140, 0.120349381), (30, 0.51210, 0.054895875)]).unwrap();
        assert!(rows[0].eoc.is_none());
        assert!((rows[1].eoc.unwrap() - 3.262).abs() < 5e-4, "{:?}", rows[1].eoc);
        let rows = eoc(&[(20, 0.65140, 0.139479793), (30, 0.51210, 0.047806025)]).unwrap();
        assert!((rows[1].eoc.unwrap() - 4.450).abs() < 5e-4);
        let synthetic: Vec<(usize, f64, f64)> = [0.5, 0.3, 0.2, 0.1]
            .iter()
            .enumerate()
            .map(|(k, &h)| (k, h, 2.0 * f64::powf(h, 3.5)))
            .collect();
        let rows = eoc(&synthetic).unwrap();
        for r in &rows[1..] {
            assert!((r.eoc.unwrap() - 3.5).abs() < 1e-12);
        }
        assert!((global_slope(&rows).unwrap() - 3.5).abs() < 1e-12);
        assert!(matches!(
            eoc(&[(1, 0.3, 1.0), (2, 0.4, 0.5)]),
            Err(SpdoError::NonMonotoneLadder(1))
        ));
    }

    #[test]
    fn reproducing_identity() {
        let shape = wendland_shape(3, 64).unwrap();
        let x = fibonacci_points(40).unwrap();
        assert!(verify_reproducing(&shape, &x, 20, 10, 1).unwrap() <= 1e-10);
        let one = SpectralFunction::constant(3, 1.0).unwrap();
        assert!(reproducing_deviation(&shape, &x, &[one], 10).unwrap() <= 1e-12);
        // content above the kernel truncation breaks the identity
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let v = random_band_limited(&mut rng, 14);
        assert!(reproducing_deviation(&shape, &x, &[v], 10).unwrap() > 1e-3);
    }

    #[test]
    fn norm_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let v = random_band_limited(&mut rng, 8);
            let (s1, s2) = (rng.gen_range(-2.0..1.0), rng.gen_range(1.0..2.0));
            assert!(v.sobolev_norm(s1) <= v.sobolev_norm(s2) * (1.0 + 1e-15));
            // duality: w = rescaled v attains the supremum
            let w = v.map_levels(|l| (l as f64 + 1.0).powf(s1 - s2));
            let mid = 0.5 * (s1 + s2);
            let ratio = v.sobolev_inner(&w, mid).unwrap() / w.sobolev_norm(s2);
            assert!((ratio - v.sobolev_norm(s1)).abs() <= 1e-12 * v.sobolev_norm(s1));
            let mut best: f64 = ratio;
            for _ in 0..20 {
                let u = random_band_limited(&mut rng, 8);
                let r = v.sobolev_inner(&u, mid).unwrap() / u.sobolev_norm(s2);
                assert!(r <= v.sobolev_norm(s1) * (1.0 + 1e-12));
                best = best.max(r);
            }
            assert!((best - v.sobolev_norm(s1)).abs() <= 1e-12 * best);
        }
        for _ in 0..1000 {
            let v = random_band_limited(&mut rng, 4);
            let w = random_band_limited(&mut rng, 4);
            let s = rng.gen_range(-1.0..1.0);
            assert!(v.sobolev_inner(&w, s).unwrap().abs() <= v.sobolev_norm(s) * w.sobolev_norm(s) * (1.0 + 1e-14));
        }
    }
}
