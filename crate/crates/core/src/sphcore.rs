//! Spherical-harmonic and Legendre machinery on `S^{n-1}`.
//!
//! Everything here is dimension-generic except [`real_harmonics_n3`], which
//! supplies an explicit orthonormal basis for `n = 3`. Production assembly
//! only ever touches zonal sums through the addition formula, so the
//! explicit basis is used for oracles and for general-mode spectral data.

use std::f64::consts::PI;

use crate::error::{Result, SpdoError};

/// Slack allowed on `|t| <= 1` before an abscissa is rejected.
pub const ABSCISSA_SLACK: f64 = 1e-12;

/// Ambient dimension `n` of the sphere `S^{n-1}` together with its surface area.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphereDim {
    n: usize,
    omega: f64,
}

impl SphereDim {
    pub fn new(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(SpdoError::UnsupportedDimension(n));
        }
        Ok(Self {
            n,
            omega: sphere_area(n),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Surface area `omega_n` of `S^{n-1}`.
    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// Surface area of the equatorial sphere `S^{n-2}`, the prefactor of
    /// Fourier-Legendre coefficients.
    pub fn omega_equator(&self) -> f64 {
        sphere_area(self.n - 1)
    }

    pub fn harmonic_dim(&self, l: usize) -> f64 {
        harmonic_dim_f64(self.n, l)
    }
}

/// `Gamma(m / 2)` for a positive integer `m`.
fn gamma_half_integer(m: usize) -> f64 {
    debug_assert!(m > 0);
    if m.is_multiple_of(2) {
        (1..m / 2).map(|j| j as f64).product()
    } else {
        PI.sqrt() * (1..=(m - 1) / 2).map(|j| j as f64 - 0.5).product::<f64>()
    }
}

/// Surface area `2 pi^{n/2} / Gamma(n/2)` of the unit sphere in `R^n`, `n >= 1`.
pub fn sphere_area(n: usize) -> f64 {
    2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n)
}

/// Dimension `N(n, l)` of the space of spherical harmonics of degree `l` on `S^{n-1}`.
pub fn harmonic_dim(n: usize, l: usize) -> Result<u64> {
    if n < 3 {
        return Err(SpdoError::UnsupportedDimension(n));
    }
    if l == 0 {
        return Ok(1);
    }
    // C(l+n-3, l-1), built so that every partial product is an exact binomial.
    let top = (l + n - 3) as u128;
    let k = (l - 1) as u128;
    let mut binom: u128 = 1;
    for i in 1..=k {
        binom = binom * (top - k + i) / i;
    }
    let value = (2 * l + n - 2) as u128 * binom / l as u128;
    u64::try_from(value).map_err(|_| SpdoError::Format(format!("N({n},{l}) overflows u64")))
}

/// Floating-point `N(n, l)`; exact for every value representable in `f64`.
pub fn harmonic_dim_f64(n: usize, l: usize) -> f64 {
    if n == 3 {
        return (2 * l + 1) as f64;
    }
    if l == 0 {
        return 1.0;
    }
    let mut binom = 1.0f64;
    let k = l - 1;
    let top = l + n - 3;
    for i in 1..=k {
        binom = binom * (top - k + i) as f64 / i as f64;
    }
    (2 * l + n - 2) as f64 * binom / l as f64
}

fn check_abscissa(t: f64) -> Result<f64> {
    if !t.is_finite() || t.abs() > 1.0 + ABSCISSA_SLACK {
        return Err(SpdoError::AbscissaOutOfRange(t));
    }
    Ok(t.clamp(-1.0, 1.0))
}

/// Three-term recurrence for the normalized Legendre polynomials `P_l(n; t)`
/// with `P_l(n; 1) = 1`:
///
/// `(l + n - 2) P_{l+1} = (2l + n - 2) t P_l - l P_{l-1}`.
#[derive(Debug, Clone)]
pub struct LegendreRecurrence {
    n: usize,
    /// `(2l + n - 2) / (l + n - 2)` for step `l -> l+1`.
    alpha: Vec<f64>,
    /// `l / (l + n - 2)`.
    beta: Vec<f64>,
}

impl LegendreRecurrence {
    pub fn new(n: usize, l_max: usize) -> Result<Self> {
        if n < 3 {
            return Err(SpdoError::UnsupportedDimension(n));
        }
        let (alpha, beta) = (0..l_max.max(1))
            .map(|l| {
                let denom = (l + n - 2) as f64;
                ((2 * l + n - 2) as f64 / denom, l as f64 / denom)
            })
            .unzip();
        Ok(Self { n, alpha, beta })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn l_max(&self) -> usize {
        self.alpha.len()
    }

    /// Writes `P_0(n;t), ..., P_{out.len()-1}(n;t)` into `out`.
    pub fn fill(&self, t: f64, out: &mut [f64]) {
        assert!(out.len() <= self.alpha.len() + 1, "recurrence table too short");
        if out.is_empty() {
            return;
        }
        out[0] = 1.0;
        if out.len() == 1 {
            return;
        }
        out[1] = t;
        for l in 1..out.len() - 1 {
            out[l + 1] = self.alpha[l] * t * out[l] - self.beta[l] * out[l - 1];
        }
    }

    /// `sum_l weights[l] P_l(n; t)` in a single pass, summed in increasing `l`.
    pub fn fold(&self, t: f64, weights: &[f64]) -> f64 {
        assert!(weights.len() <= self.alpha.len() + 1, "recurrence table too short");
        let mut acc = 0.0;
        let (mut prev, mut cur) = (0.0, 1.0);
        for (l, w) in weights.iter().enumerate() {
            acc += w * cur;
            if l + 1 < weights.len() {
                let next = if l == 0 {
                    t
                } else {
                    self.alpha[l] * t * cur - self.beta[l] * prev
                };
                prev = cur;
                cur = next;
            }
        }
        acc
    }
}

/// Evaluates `P_0(n;t), ..., P_{l_max}(n;t)`.
pub fn legendre_eval(n: usize, l_max: usize, t: f64) -> Result<Vec<f64>> {
    let t = check_abscissa(t)?;
    let rec = LegendreRecurrence::new(n, l_max)?;
    let mut out = vec![0.0; l_max + 1];
    rec.fill(t, &mut out);
    Ok(out)
}

/// Legendre values tabulated at a fixed list of abscissae.
#[derive(Debug, Clone)]
pub struct LegendreTable {
    pub n: usize,
    pub l_max: usize,
    pub abscissae: Vec<f64>,
    values: Vec<f64>,
}

impl LegendreTable {
    pub fn new(n: usize, l_max: usize, abscissae: &[f64]) -> Result<Self> {
        let rec = LegendreRecurrence::new(n, l_max)?;
        let ts = abscissae
            .iter()
            .map(|&t| check_abscissa(t))
            .collect::<Result<Vec<_>>>()?;
        let mut values = vec![0.0; ts.len() * (l_max + 1)];
        for (row, &t) in values.chunks_mut(l_max + 1).zip(&ts) {
            rec.fill(t, row);
        }
        Ok(Self {
            n,
            l_max,
            abscissae: ts,
            values,
        })
    }

    /// `P_0..P_{l_max}` at the `i`-th abscissa.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * (self.l_max + 1)..(i + 1) * (self.l_max + 1)]
    }
}

/// Index of `Y_{l,m}` (`-l <= m <= l`) in the flat `(l+1)^2` layout.
#[inline]
pub fn harmonic_index(l: usize, m: isize) -> usize {
    ((l * l + l) as isize + m) as usize
}

/// Real orthonormal spherical harmonics on `S^2`, ordered by `(l, m)` with
/// `m = -l..=l`. Negative `m` carry `sin(|m| phi)`, positive `m` carry `cos(m phi)`.
pub fn real_harmonics_n3(l_max: usize, x: &[f64]) -> Result<Vec<f64>> {
    if x.len() != 3 {
        return Err(SpdoError::RequiresN3(x.len()));
    }
    let norm = (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(SpdoError::NotUnitVector(norm));
    }
    let z = x[2].clamp(-1.0, 1.0);
    let s = (x[0] * x[0] + x[1] * x[1]).sqrt();
    let (cphi, sphi) = if s > 0.0 { (x[0] / s, x[1] / s) } else { (1.0, 0.0) };

    let size = l_max + 1;
    // pbar[m][l] = sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(z), no Condon-Shortley phase.
    let mut out = vec![0.0; size * size];
    let mut pmm = 1.0 / (4.0 * PI).sqrt();
    let (mut cos_m, mut sin_m) = (1.0, 0.0);
    let mut column = vec![0.0; size];
    for m in 0..size {
        if m > 0 {
            pmm *= ((2 * m + 1) as f64 / (2 * m) as f64).sqrt() * s;
            let c = cos_m * cphi - sin_m * sphi;
            sin_m = sin_m * cphi + cos_m * sphi;
            cos_m = c;
        }
        column[m] = pmm;
        if m + 1 < size {
            column[m + 1] = ((2 * m + 3) as f64).sqrt() * z * pmm;
        }
        for l in m + 2..size {
            let (lf, mf) = (l as f64, m as f64);
            let a = ((4.0 * lf * lf - 1.0) / (lf * lf - mf * mf)).sqrt();
            let b = (((lf - 1.0).powi(2) - mf * mf) / (4.0 * (lf - 1.0).powi(2) - 1.0)).sqrt();
            column[l] = a * (z * column[l - 1] - b * column[l - 2]);
        }
        for l in m..size {
            if m == 0 {
                out[harmonic_index(l, 0)] = column[l];
            } else {
                let scaled = std::f64::consts::SQRT_2 * column[l];
                out[harmonic_index(l, m as isize)] = scaled * cos_m;
                out[harmonic_index(l, -(m as isize))] = scaled * sin_m;
            }
        }
    }
    Ok(out)
}

/// Nodes and weights of a quadrature rule on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    /// The same rule affinely mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> QuadratureRule {
        let (half, mid) = (0.5 * (b - a), 0.5 * (a + b));
        QuadratureRule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| w * half).collect(),
        }
    }
}

/// Classical `P_k(x)` and its derivative.
fn legendre_with_derivative(k: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for j in 2..=k {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    if k == 1 {
        return (x, 1.0);
    }
    (p1, k as f64 * (x * p1 - p0) / (x * x - 1.0))
}

/// `k`-point Gauss-Legendre rule, exact for polynomials of degree `<= 2k - 1`.
pub fn gauss_legendre(k: usize) -> Result<QuadratureRule> {
    if k == 0 {
        return Err(SpdoError::EmptyQuadrature);
    }
    let mut nodes = vec![0.0; k];
    let mut weights = vec![0.0; k];
    for i in 0..k / 2 {
        let mut x = (PI * (i as f64 + 0.75) / (k as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(k, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() <= 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(k, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[k - 1 - i] = x;
        weights[i] = w;
        weights[k - 1 - i] = w;
    }
    if k % 2 == 1 {
        let (_, dp) = legendre_with_derivative(k, 0.0);
        nodes[k / 2] = 0.0;
        weights[k / 2] = 2.0 / (dp * dp);
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Default node count when computing Fourier-Legendre coefficients up to `l_max`.
pub fn default_quadrature_nodes(l_max: usize) -> usize {
    (2 * l_max + 16).max(64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_unit(rng: &mut impl Rng) -> [f64; 3] {
        let z: f64 = rng.gen_range(-1.0..1.0);
        let phi: f64 = rng.gen_range(0.0..2.0 * PI);
        let s = (1.0 - z * z).sqrt();
        [s * phi.cos(), s * phi.sin(), z]
    }

    #[test]
    fn sphere_areas() {
        assert!((SphereDim::new(3).unwrap().omega() - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_area(2) - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_area(4) - 2.0 * PI * PI).abs() < 1e-13);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
        assert!(SphereDim::new(2).is_err());
    }

    #[test]
    fn harmonic_dimensions() {
        assert_eq!(harmonic_dim(3, 0).unwrap(), 1);
        assert_eq!(harmonic_dim(3, 5).unwrap(), 11);
        assert_eq!(harmonic_dim(4, 2).unwrap(), 9);
        // n=5: N = (2l+3)(l+1)(l+2)/6
        for l in 0..30 {
            let expect = (2 * l + 3) * (l + 1) * (l + 2) / 6;
            assert_eq!(harmonic_dim(5, l).unwrap(), expect as u64);
            assert_eq!(harmonic_dim_f64(5, l), expect as f64);
        }
        assert!(harmonic_dim(2, 1).is_err());
    }

    #[test]
    fn legendre_examples() {
        assert_eq!(legendre_eval(3, 2, 1.0).unwrap(), vec![1.0, 1.0, 1.0]);
        let v = legendre_eval(3, 2, 0.0).unwrap();
        assert_eq!(v, vec![1.0, 0.0, -0.5]);
        assert!(legendre_eval(3, 2, 1.0 + 1e-6).is_err());
        assert_eq!(legendre_eval(3, 1, 1.0 + 1e-13).unwrap()[1], 1.0);
    }

    /// Gegenbauer polynomials from their explicit series, normalized at t=1.
    fn gegenbauer_series(n: usize, l: usize, t: f64) -> f64 {
        let lambda = (n as f64 - 2.0) / 2.0;
        let poch = |a: f64, k: usize| (0..k).map(|i| a + i as f64).product::<f64>();
        let fact = |k: usize| (1..=k).map(|i| i as f64).product::<f64>();
        let c = |t: f64| {
            (0..=l / 2)
                .map(|k| {
                    let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
                    sign * poch(lambda, l - k) / (fact(k) * fact(l - 2 * k)) * (2.0 * t).powi((l - 2 * k) as i32)
                })
                .sum::<f64>()
        };
        c(t) / c(1.0)
    }

    #[test]
    fn legendre_matches_gegenbauer_series() {
        for &n in &[4usize, 5, 7] {
            for &t in &[0.5, -0.3, 0.91] {
                let v = legendre_eval(n, 9, t).unwrap();
                for (l, &p) in v.iter().enumerate() {
                    assert!((p - gegenbauer_series(n, l, t)).abs() < 1e-12, "n={n} l={l}");
                }
            }
        }
        // n=4: P_l(4;t) = sin((l+1)theta) / ((l+1) sin theta)
        let theta = 0.5f64.acos();
        let v = legendre_eval(4, 1, 0.5).unwrap();
        assert!((v[1] - (2.0 * theta).sin() / (2.0 * theta.sin())).abs() < 1e-15);
    }

    #[test]
    fn classical_legendre_recurrence_n3() {
        let v = legendre_eval(3, 40, 0.37).unwrap();
        for l in 1..40 {
            let lf = l as f64;
            let lhs = (lf + 1.0) * v[l + 1];
            let rhs = (2.0 * lf + 1.0) * 0.37 * v[l] - lf * v[l - 1];
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }

    #[test]
    fn fold_matches_fill() {
        let rec = LegendreRecurrence::new(3, 50).unwrap();
        let w: Vec<f64> = (0..=50).map(|l| 1.0 / (l as f64 + 1.0).powi(2)).collect();
        let mut p = vec![0.0; 51];
        rec.fill(-0.42, &mut p);
        let direct: f64 = w.iter().zip(&p).map(|(a, b)| a * b).sum();
        assert!((rec.fold(-0.42, &w) - direct).abs() < 1e-15);
        assert_eq!(rec.fold(0.3, &w[..1]), w[0]);
    }

    #[test]
    fn recurrence_stays_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rec = LegendreRecurrence::new(3, 500).unwrap();
        let mut out = vec![0.0; 501];
        for _ in 0..1000 {
            let t: f64 = rng.gen_range(-1.0..=1.0);
            rec.fill(t, &mut out);
            assert!(out.iter().all(|p| p.abs() <= 1.0 + 1e-9));
        }
    }

    #[test]
    fn legendre_orthogonality() {
        let rule = gauss_legendre(11).unwrap();
        let table = LegendreTable::new(3, 10, &rule.nodes).unwrap();
        for i in 0..=10 {
            for j in 0..i {
                let s: f64 = (0..rule.len())
                    .map(|k| rule.weights[k] * table.row(k)[i] * table.row(k)[j])
                    .sum();
                assert!(s.abs() < 1e-12, "({i},{j}) -> {s}");
            }
        }
    }

    #[test]
    fn gauss_legendre_rules() {
        let r1 = gauss_legendre(1).unwrap();
        assert_eq!(r1.nodes, vec![0.0]);
        assert!((r1.weights[0] - 2.0).abs() < 1e-15);
        let r2 = gauss_legendre(2).unwrap();
        assert!((r2.nodes[1] - 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((r2.nodes[0] + 1.0 / 3f64.sqrt()).abs() < 1e-15);
        assert!((r2.weights[0] - 1.0).abs() < 1e-15);
        let r20 = gauss_legendre(20).unwrap();
        let v = r20.integrate(|t| t.powi(38));
        assert!((v - 2.0 / 39.0).abs() / (2.0 / 39.0) < 1e-13);
        for k in [5, 64, 333, 1000] {
            let r = gauss_legendre(k).unwrap();
            let s: f64 = r.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "k={k} sum={s}");
            assert!(r.weights.iter().all(|&w| w > 0.0));
        }
        assert!(gauss_legendre(0).is_err());
    }

    #[test]
    fn harmonics_basic() {
        let y = real_harmonics_n3(0, &[0.0, 0.6, 0.8]).unwrap();
        assert!((y[0] - 1.0 / (4.0 * PI).sqrt()).abs() < 1e-15);
        let y = real_harmonics_n3(1, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!(y[harmonic_index(1, -1)], 0.0);
        assert_eq!(y[harmonic_index(1, 1)], 0.0);
        assert!((y[harmonic_index(1, 0)] - (3.0 / (4.0 * PI)).sqrt()).abs() < 1e-15);
        assert!(real_harmonics_n3(2, &[0.0, 0.0, 0.9]).is_err());
    }

    #[test]
    fn harmonics_sum_rule() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let x = random_unit(&mut rng);
        let y = real_harmonics_n3(8, &x).unwrap();
        for l in 0..=8usize {
            let s: f64 = (-(l as isize)..=l as isize)
                .map(|m| y[harmonic_index(l, m)].powi(2))
                .sum();
            assert!((s - (2 * l + 1) as f64 / (4.0 * PI)).abs() < 1e-13);
        }
    }

    #[test]
    fn addition_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let omega = 4.0 * PI;
        for _ in 0..50 {
            let (x, y) = (random_unit(&mut rng), random_unit(&mut rng));
            let yx = real_harmonics_n3(12, &x).unwrap();
            let yy = real_harmonics_n3(12, &y).unwrap();
            let t: f64 = x.iter().zip(&y).map(|(a, b)| a * b).sum();
            let p = legendre_eval(3, 12, t).unwrap();
            for l in 0..=12usize {
                let s: f64 = (-(l as isize)..=l as isize)
                    .map(|m| yx[harmonic_index(l, m)] * yy[harmonic_index(l, m)])
                    .sum();
                let rhs = (2 * l + 1) as f64 / omega * p[l];
                assert!((s - rhs).abs() <= 1e-11);
            }
        }
    }

    #[test]
    fn harmonics_orthonormal_by_quadrature() {
        // Gauss in z times trapezoid in phi integrates degree <= 2*l_max exactly.
        let l_max = 6;
        let rule = gauss_legendre(l_max + 2).unwrap();
        let nphi = 2 * l_max + 3;
        let size = (l_max + 1) * (l_max + 1);
        let mut gram = vec![0.0; size * size];
        for (&z, &w) in rule.nodes.iter().zip(&rule.weights) {
            for k in 0..nphi {
                let phi = 2.0 * PI * k as f64 / nphi as f64;
                let s = (1.0 - z * z).sqrt();
                let y = real_harmonics_n3(l_max, &[s * phi.cos(), s * phi.sin(), z]).unwrap();
                let dw = w * 2.0 * PI / nphi as f64;
                for a in 0..size {
                    for b in 0..size {
                        gram[a * size + b] += dw * y[a] * y[b];
                    }
                }
            }
        }
        for a in 0..size {
            for b in 0..size {
                let expect = if a == b { 1.0 } else { 0.0 };
                assert!((gram[a * size + b] - expect).abs() < 1e-12);
            }
        }
    }
}
