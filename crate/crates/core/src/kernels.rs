//! Zonal shape functions, their Fourier-Legendre coefficients, and kernel evaluation.

use std::fmt::Write as _;

use log::warn;

use crate::error::{Result, SpdoError};
pub use crate::spectral::SpectralFunction;
use crate::sphcore::{default_quadrature_nodes, gauss_legendre, LegendreRecurrence, SphereDim};

/// Coefficients with `|value|` below this are treated as roundoff and floored.
pub const COEFF_ROUNDOFF: f64 = 1e-15;
/// Floor substituted for roundoff-level nonpositive coefficients.
pub const COEFF_FLOOR: f64 = 1e-300;

/// Compactly supported radial profiles `rho(r)`, `r = |x - y| = sqrt(2 - 2t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RadialProfile {
    /// `(1 - r)_+^2`
    WendlandC0,
    /// `(1 - r)_+^4 (4r + 1)`
    WendlandC2,
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> f64 {
        if r >= 1.0 {
            return 0.0;
        }
        let s = 1.0 - r;
        match self {
            RadialProfile::WendlandC0 => s * s,
            RadialProfile::WendlandC2 => s.powi(4) * (4.0 * r + 1.0),
        }
    }

    /// `phi(t) = rho(sqrt(2 - 2t))`.
    pub fn shape(&self, t: f64) -> f64 {
        self.eval((2.0 - 2.0 * t).max(0.0).sqrt())
    }

    /// Native-space exponent on `S^{n-1}`: `(n-1)/2 + k + 1/2` for smoothness index `k`.
    pub fn tau(&self, n: usize) -> f64 {
        let k = match self {
            RadialProfile::WendlandC0 => 0.0,
            RadialProfile::WendlandC2 => 1.0,
        };
        (n as f64 - 1.0) / 2.0 + k + 0.5
    }

    pub fn name(&self) -> &'static str {
        match self {
            RadialProfile::WendlandC0 => "wendland",
            RadialProfile::WendlandC2 => "wendland-c2",
        }
    }

    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().replace('_', "-").as_str() {
            "wendland" | "wendland-c0" => Ok(RadialProfile::WendlandC0),
            "wendland-c2" => Ok(RadialProfile::WendlandC2),
            other => Err(SpdoError::UnknownKernel(other.to_string())),
        }
    }
}

/// A zonal shape function `phi` on `[-1, 1]` with tabulated coefficients `phi_hat(l)`.
#[derive(Debug, Clone)]
pub struct ShapeFunction {
    dim: SphereDim,
    name: String,
    coeffs: Vec<f64>,
    tau: f64,
    profile: Option<RadialProfile>,
    kink_t: Option<f64>,
}

fn validate_coefficient(degree: usize, value: f64) -> Result<f64> {
    if value > 0.0 {
        return Ok(value);
    }
    if value.is_finite() && value > -COEFF_ROUNDOFF {
        warn!("phi_hat({degree}) = {value:e} is roundoff-level; flooring to {COEFF_FLOOR:e}");
        return Ok(COEFF_FLOOR);
    }
    Err(SpdoError::NonPositiveCoefficient { degree, value })
}

/// `phi_hat(l) = omega_{n-1} int_{-1}^{1} phi(t) P_l(n;t) (1-t^2)^{(n-3)/2} dt`
/// for a profile supported on `r <= 1`, i.e. `t >= 1/2`.
///
/// The integral is taken in the chord variable `r = sqrt(2 - 2t)`, where the
/// integrand of the supported panel is smooth (a polynomial in `r` for odd `n`).
/// The panel `t < 1/2` contributes nothing.
fn profile_coefficients(dim: SphereDim, profile: RadialProfile, l_max: usize) -> Result<Vec<f64>> {
    let n = dim.n();
    let rule = gauss_legendre(default_quadrature_nodes(l_max))?.mapped(0.0, 1.0);
    let rec = LegendreRecurrence::new(n, l_max)?;
    let mut acc = vec![0.0; l_max + 1];
    let mut pl = vec![0.0; l_max + 1];
    let exponent = (n as f64 - 3.0) / 2.0;
    for (&r, &w) in rule.nodes.iter().zip(&rule.weights) {
        let t = 1.0 - 0.5 * r * r;
        let jacobian = if n == 3 {
            1.0
        } else {
            ((1.0 - t) * (1.0 + t)).powf(exponent)
        };
        let weight = w * profile.eval(r) * jacobian * r;
        rec.fill(t, &mut pl);
        for (a, p) in acc.iter_mut().zip(&pl) {
            *a += weight * p;
        }
    }
    let scale = dim.omega_equator();
    acc.iter()
        .enumerate()
        .map(|(l, a)| validate_coefficient(l, scale * a))
        .collect()
}

impl ShapeFunction {
    /// Shape `rho(sqrt(2 - 2t))` with coefficients tabulated for `l <= l_max_table`.
    pub fn from_profile(n: usize, profile: RadialProfile, l_max_table: usize) -> Result<Self> {
        let dim = SphereDim::new(n)?;
        let coeffs = profile_coefficients(dim, profile, l_max_table)?;
        Ok(Self {
            dim,
            name: profile.name().to_string(),
            coeffs,
            tau: profile.tau(n),
            profile: Some(profile),
            kink_t: Some(0.5),
        })
    }

    /// Shape defined only by its coefficient table (no closed form).
    pub fn from_coefficients(n: usize, name: &str, coeffs: Vec<f64>, tau: f64) -> Result<Self> {
        let dim = SphereDim::new(n)?;
        if coeffs.is_empty() {
            return Err(SpdoError::Format("empty coefficient table".into()));
        }
        let coeffs = coeffs
            .into_iter()
            .enumerate()
            .map(|(l, c)| validate_coefficient(l, c))
            .collect::<Result<_>>()?;
        Ok(Self {
            dim,
            name: name.to_string(),
            coeffs,
            tau,
            profile: None,
            kink_t: None,
        })
    }

    /// Overwrites one coefficient without validation. Meant for negative controls.
    pub fn inject_coefficient(&mut self, l: usize, value: f64) {
        self.coeffs[l] = value;
        self.name = format!("{}+corrupted", self.name);
    }

    /// Coefficient table `phi_hat(l)` squared entrywise, i.e. the shape whose
    /// kernel is the native-space convolution of this one with itself.
    pub fn squared(&self) -> ShapeFunction {
        ShapeFunction {
            dim: self.dim,
            name: format!("{}^2", self.name),
            coeffs: self.coeffs.iter().map(|c| c * c).collect(),
            tau: 2.0 * self.tau,
            profile: None,
            kink_t: None,
        }
    }

    pub fn dim(&self) -> SphereDim {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.dim.n()
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn coeff(&self, l: usize) -> f64 {
        self.coeffs[l]
    }

    pub fn table_l_max(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn profile(&self) -> Option<RadialProfile> {
        self.profile
    }

    pub fn kink_t(&self) -> Option<f64> {
        self.kink_t
    }

    pub fn closed_form(&self, t: f64) -> Option<f64> {
        self.profile.map(|p| p.shape(t))
    }

    pub fn has_closed_form(&self) -> bool {
        self.profile.is_some()
    }

    pub fn check_degree(&self, l_max: usize) -> Result<()> {
        if l_max > self.table_l_max() {
            return Err(SpdoError::DegreeOutOfTable {
                requested: l_max,
                available: self.table_l_max(),
            });
        }
        Ok(())
    }

    /// Truncated series `sum_{l<=l_max} omega_n^{-1} N(n,l) phi_hat(l) P_l(n;t)`.
    pub fn eval_series(&self, t: f64, l_max: usize) -> Result<f64> {
        self.check_degree(l_max)?;
        let rec = LegendreRecurrence::new(self.n(), l_max)?;
        let weights = self.zonal_weights(l_max);
        Ok(rec.fold(t.clamp(-1.0, 1.0), &weights))
    }

    /// `omega_n^{-1} N(n,l) phi_hat(l)` for `l <= l_max`.
    pub fn zonal_weights(&self, l_max: usize) -> Vec<f64> {
        let omega = self.dim.omega();
        (0..=l_max)
            .map(|l| self.dim.harmonic_dim(l) * self.coeffs[l] / omega)
            .collect()
    }

    /// Kernel value `Phi(x, y) = phi(x . y)`: closed form when available,
    /// otherwise the full tabulated series.
    pub fn eval(&self, t: f64) -> f64 {
        match self.closed_form(t) {
            Some(v) => v,
            None => self
                .eval_series(t, self.table_l_max())
                .expect("table degree is always in range"),
        }
    }

    /// The SRBF `Phi_j = phi(. x_j)` as a zonal spectral function truncated at `l_max`.
    pub fn srbf(&self, center: &[f64], l_max: usize) -> Result<SpectralFunction> {
        self.check_degree(l_max)?;
        SpectralFunction::zonal(self.n(), center, self.zonal_weights(l_max))
    }

    /// Coefficient table as CSV with header `l,phi_hat`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("l,phi_hat\n");
        for (l, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{l},{c:.17e}");
        }
        out
    }

    /// Reads a table written by [`ShapeFunction::to_csv`].
    pub fn from_csv(n: usize, name: &str, tau: f64, text: &str) -> Result<Self> {
        let mut coeffs = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with('l') {
                continue;
            }
            let mut parts = line.split(',');
            let (Some(l), Some(v)) = (parts.next(), parts.next()) else {
                return Err(SpdoError::Format(format!("line {}: expected `l,phi_hat`", lineno + 1)));
            };
            let l: usize = l
                .trim()
                .parse()
                .map_err(|e| SpdoError::Format(format!("line {}: {e}", lineno + 1)))?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|e| SpdoError::Format(format!("line {}: {e}", lineno + 1)))?;
            if l != coeffs.len() {
                return Err(SpdoError::Format(format!(
                    "line {}: degrees must be consecutive from 0 (got {l})",
                    lineno + 1
                )));
            }
            coeffs.push(v);
        }
        Self::from_coefficients(n, name, coeffs, tau)
    }
}

/// The benchmark Wendland shape `(1 - sqrt(2 - 2t))_+^2`.
pub fn wendland_shape(n: usize, l_max_table: usize) -> Result<ShapeFunction> {
    ShapeFunction::from_profile(n, RadialProfile::WendlandC0, l_max_table)
}

/// Power-law envelope `c1 (l+1)^{-2 tau_hat} <= phi_hat(l) <= c2 (l+1)^{-2 tau_hat}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayFit {
    pub c1: f64,
    pub c2: f64,
    pub tau_hat: f64,
}

/// Decay fit over the upper half of the coefficient table.
pub fn shape_decay_fit(shape: &ShapeFunction) -> DecayFit {
    let top = shape.table_l_max();
    shape_decay_fit_range(shape, top / 2, top)
}

/// Least-squares slope of `log phi_hat(l)` against `log(l+1)` for `lo <= l <= hi`.
pub fn shape_decay_fit_range(shape: &ShapeFunction, lo: usize, hi: usize) -> DecayFit {
    let hi = hi.min(shape.table_l_max());
    let lo = lo.min(hi);
    let pts: Vec<(f64, f64)> = (lo..=hi)
        .map(|l| ((l as f64 + 1.0).ln(), shape.coeff(l).ln()))
        .collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx))
    });
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let tau_hat = -slope / 2.0;
    let scaled = (lo..=hi).map(|l| shape.coeff(l) * (l as f64 + 1.0).powf(2.0 * tau_hat));
    let (c1, c2) = scaled.fold((f64::INFINITY, 0.0f64), |(a, b), v| (a.min(v), b.max(v)));
    DecayFit { c1, c2, tau_hat }
}

/// Kernel value `phi(c)`.
pub fn kernel_eval(shape: &ShapeFunction, c: f64) -> f64 {
    shape.eval(c)
}

/// Native-space inner product `<v, w>_phi = sum v_{l,m} w_{l,m} / phi_hat(l)`.
pub fn native_inner(v: &SpectralFunction, w: &SpectralFunction, shape: &ShapeFunction) -> Result<f64> {
    if v.n() != shape.n() || w.n() != shape.n() {
        return Err(SpdoError::DimensionMismatch(format!(
            "shape lives on S^{}, functions on S^{} and S^{}",
            shape.n() - 1,
            v.n() - 1,
            w.n() - 1
        )));
    }
    let inners = v.level_inners(w)?;
    shape.check_degree(inners.len() - 1)?;
    Ok(inners.iter().enumerate().map(|(l, x)| x / shape.coeff(l)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sphcore::{harmonic_index, real_harmonics_n3};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn random_unit(rng: &mut impl Rng) -> Vec<f64> {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let s = (1.0 - z * z).sqrt();
        vec![s * phi.cos(), s * phi.sin(), z]
    }

    #[test]
    fn wendland_closed_form_values() {
        let shape = wendland_shape(3, 40).unwrap();
        assert_eq!(kernel_eval(&shape, 1.0), 1.0);
        // r = sqrt(2) lies outside the support, so the positive part vanishes
        assert_eq!(kernel_eval(&shape, 0.0), 0.0);
        assert!((kernel_eval(&shape, 0.75) - (1.0 - 0.5f64.sqrt()).powi(2)).abs() < 1e-15);
        assert_eq!(kernel_eval(&shape, -1.0), 0.0);
        assert_eq!(kernel_eval(&shape, 0.5), 0.0);
        assert_eq!(kernel_eval(&shape, 0.2), 0.0);
        assert_eq!(shape.kink_t(), Some(0.5));
    }

    #[test]
    fn wendland_mean_coefficient() {
        // 2 pi int_0^1 (1-r)^2 r dr = pi/6
        let shape = wendland_shape(3, 10).unwrap();
        assert!((shape.coeff(0) - PI / 6.0).abs() < 1e-13);
        assert!((shape.tau() - 1.5).abs() < 1e-15);
    }

    /// Brute-force coefficients: composite midpoint rule on t in [1/2, 1].
    #[test]
    fn wendland_coefficients_against_composite_rule() {
        let shape = wendland_shape(3, 12).unwrap();
        let m = 400_000;
        let h = 0.5 / m as f64;
        let mut acc = [0.0; 13];
        for k in 0..m {
            let t = 0.5 + (k as f64 + 0.5) * h;
            let p = crate::sphcore::legendre_eval(3, 12, t).unwrap();
            let f = RadialProfile::WendlandC0.shape(t);
            for (a, pl) in acc.iter_mut().zip(&p) {
                *a += h * f * pl;
            }
        }
        for (l, a) in acc.iter().enumerate() {
            // midpoint rule error is dominated by the sqrt endpoint at t=1
            assert!((shape.coeff(l) - 2.0 * PI * a).abs() < 1e-8, "l={l}");
        }
    }

    #[test]
    fn wendland_decay_band() {
        let shape = wendland_shape(3, 400).unwrap();
        let fit = shape_decay_fit_range(&shape, 50, 400);
        assert!(fit.tau_hat > 1.35 && fit.tau_hat < 1.65, "{fit:?}");
        assert!(fit.c1 > 0.0 && fit.c1 <= fit.c2);
        assert!(shape.coeffs().iter().all(|&c| c > 0.0));
    }

    #[test]
    fn c2_profile_decays_faster() {
        let shape = ShapeFunction::from_profile(3, RadialProfile::WendlandC2, 300).unwrap();
        let fit = shape_decay_fit_range(&shape, 50, 300);
        assert!((fit.tau_hat - 2.5).abs() < 0.2, "{fit:?}");
        // phi_hat(0) = 2 pi int_0^1 (1-r)^4 (4r+1) r dr = 2 pi / 14
        assert!((shape.coeff(0) - PI / 7.0).abs() < 1e-13);
    }

    #[test]
    fn synthetic_power_laws() {
        let c: Vec<f64> = (0..=200).map(|l| (l as f64 + 1.0).powi(-4)).collect();
        let s = ShapeFunction::from_coefficients(3, "p4", c, 2.0).unwrap();
        let fit = shape_decay_fit(&s);
        assert!((fit.tau_hat - 2.0).abs() < 1e-6);
        let c: Vec<f64> = (0..=200).map(|l| 3.0 * (l as f64 + 1.0).powi(-2)).collect();
        let s = ShapeFunction::from_coefficients(3, "p2", c, 1.0).unwrap();
        let fit = shape_decay_fit(&s);
        assert!((fit.c1 - 3.0).abs() < 1e-6 && (fit.c2 - 3.0).abs() < 1e-6);
    }

    #[test]
    fn coefficient_validation() {
        assert!(ShapeFunction::from_coefficients(3, "bad", vec![1.0, -0.1], 1.0).is_err());
        let s = ShapeFunction::from_coefficients(3, "tiny", vec![1.0, -1e-17], 1.0).unwrap();
        assert_eq!(s.coeff(1), COEFF_FLOOR);
    }

    #[test]
    fn series_matches_closed_form() {
        let shape = wendland_shape(3, 400).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let c: f64 = rng.gen_range(-0.9..=0.9);
            let series = shape.eval_series(c, 400).unwrap();
            let exact = shape.closed_form(c).unwrap();
            assert!((series - exact).abs() <= 2e-6, "c={c}: {series} vs {exact}");
        }
        // At c = +-1 the Legendre factors do not decay and the error is the
        // whole tail, which behaves like 1/l_max.
        for c in [-1.0, 1.0] {
            let err = (shape.eval_series(c, 400).unwrap() - shape.closed_form(c).unwrap()).abs();
            assert!(err < 1e-2, "c={c}: {err}");
        }
    }

    #[test]
    fn interpolation_matrices_positive_definite() {
        let shape = wendland_shape(3, 16).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..10 {
            let pts: Vec<Vec<f64>> = (0..8).map(|_| random_unit(&mut rng)).collect();
            let m = nalgebra::DMatrix::from_fn(8, 8, |i, j| {
                let t: f64 = pts[i].iter().zip(&pts[j]).map(|(a, b)| a * b).sum();
                kernel_eval(&shape, t)
            });
            let eig = m.symmetric_eigenvalues();
            assert!(eig.min() > 0.0, "min eigenvalue {}", eig.min());
        }
    }

    #[test]
    fn native_inner_examples() {
        let shape = wendland_shape(3, 20).unwrap();
        let mut c = vec![0.0; 9];
        c[0] = 1.0;
        let y00 = SpectralFunction::general_n3(2, c).unwrap();
        assert!((native_inner(&y00, &y00, &shape).unwrap() - 1.0 / shape.coeff(0)).abs() < 1e-13);
        let mut c = vec![0.0; 9];
        c[harmonic_index(2, 1)] = 1.0;
        let y21 = SpectralFunction::general_n3(2, c).unwrap();
        assert_eq!(native_inner(&y00, &y21, &shape).unwrap(), 0.0);
        let other = SpectralFunction::constant(4, 1.0).unwrap();
        assert!(native_inner(&y00, &other, &shape).is_err());
    }

    #[test]
    fn reproducing_property() {
        let shape = wendland_shape(3, 20).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..20 {
            let coeffs: Vec<f64> = (0..121).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v = SpectralFunction::general_n3(10, coeffs).unwrap();
            for _ in 0..5 {
                let x = random_unit(&mut rng);
                let phi_j = shape.srbf(&x, 10).unwrap();
                let lhs = native_inner(&v, &phi_j, &shape).unwrap();
                let rhs = v.eval(&x).unwrap();
                assert!((lhs - rhs).abs() <= 1e-10 * (1.0 + rhs.abs()));
            }
        }
    }

    #[test]
    fn native_inner_positive() {
        let shape = wendland_shape(3, 10).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..20 {
            let coeffs: Vec<f64> = (0..36).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let v = SpectralFunction::general_n3(5, coeffs).unwrap();
            assert!(native_inner(&v, &v, &shape).unwrap() > 0.0);
        }
        let z = SpectralFunction::zeros_n3(5);
        assert_eq!(native_inner(&z, &z, &shape).unwrap(), 0.0);
    }

    #[test]
    fn srbf_coefficients_match_harmonics() {
        let shape = wendland_shape(3, 8).unwrap();
        let x = [0.0, 0.0, 1.0];
        let phi = shape.srbf(&x, 8).unwrap();
        let y = real_harmonics_n3(8, &x).unwrap();
        for l in 0..=8usize {
            for m in -(l as isize)..=l as isize {
                let expect = shape.coeff(l) * y[harmonic_index(l, m)];
                assert!((phi.coefficient(l, m).unwrap() - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn csv_round_trip() {
        let shape = wendland_shape(3, 30).unwrap();
        let back = ShapeFunction::from_csv(3, "wendland", 1.5, &shape.to_csv()).unwrap();
        assert_eq!(back.coeffs(), shape.coeffs());
        assert!(ShapeFunction::from_csv(3, "x", 1.5, "l,phi_hat\n0,1.0\n2,0.5\n").is_err());
    }
}
