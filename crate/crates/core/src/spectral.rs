//! Truncated spectral representations of functions on the sphere.

use crate::error::{Result, SpdoError};
use crate::sphcore::{harmonic_index, real_harmonics_n3, LegendreRecurrence, SphereDim};

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Coefficients `v_{l,m}` in the real `n = 3` basis, `(l_max+1)^2` entries.
    General { coeffs: Vec<f64> },
    /// `v(x) = sum_l a_l P_l(n; x . axis)`.
    Zonal { axis: Vec<f64>, coeffs: Vec<f64> },
}

/// A band-limited function on `S^{n-1}` stored by its Fourier data.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralFunction {
    dim: SphereDim,
    l_max: usize,
    repr: Repr,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn check_unit(x: &[f64]) -> Result<()> {
    let norm = dot(x, x).sqrt();
    if (norm - 1.0).abs() > 1e-12 {
        return Err(SpdoError::NotUnitVector(norm));
    }
    Ok(())
}

impl SpectralFunction {
    /// General-mode function on `S^2` from coefficients laid out by
    /// [`harmonic_index`].
    pub fn general_n3(l_max: usize, coeffs: Vec<f64>) -> Result<Self> {
        let expected = (l_max + 1) * (l_max + 1);
        if coeffs.len() != expected {
            return Err(SpdoError::DimensionMismatch(format!(
                "expected {expected} coefficients for l_max={l_max}, got {}",
                coeffs.len()
            )));
        }
        Ok(Self {
            dim: SphereDim::new(3)?,
            l_max,
            repr: Repr::General { coeffs },
        })
    }

    pub fn zeros_n3(l_max: usize) -> Self {
        Self::general_n3(l_max, vec![0.0; (l_max + 1) * (l_max + 1)]).expect("consistent size")
    }

    /// Zonal function `sum_l a_l P_l(n; x . axis)`; `l_max = coeffs.len() - 1`.
    pub fn zonal(n: usize, axis: &[f64], coeffs: Vec<f64>) -> Result<Self> {
        let dim = SphereDim::new(n)?;
        if axis.len() != n {
            return Err(SpdoError::DimensionMismatch(format!(
                "axis has {} components on S^{}",
                axis.len(),
                n - 1
            )));
        }
        check_unit(axis)?;
        if coeffs.is_empty() {
            return Err(SpdoError::DimensionMismatch("zonal function needs a_0".into()));
        }
        Ok(Self {
            dim,
            l_max: coeffs.len() - 1,
            repr: Repr::Zonal {
                axis: axis.to_vec(),
                coeffs,
            },
        })
    }

    /// The constant function `value` on `S^{n-1}`.
    pub fn constant(n: usize, value: f64) -> Result<Self> {
        let mut axis = vec![0.0; n];
        axis[n - 1] = 1.0;
        Self::zonal(n, &axis, vec![value])
    }

    pub fn n(&self) -> usize {
        self.dim.n()
    }

    pub fn dim(&self) -> SphereDim {
        self.dim
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn is_zonal(&self) -> bool {
        matches!(self.repr, Repr::Zonal { .. })
    }

    /// Zonal axis and Legendre coefficients, if this is a zonal function.
    pub fn zonal_parts(&self) -> Option<(&[f64], &[f64])> {
        match &self.repr {
            Repr::Zonal { axis, coeffs } => Some((axis, coeffs)),
            Repr::General { .. } => None,
        }
    }

    /// Raw general-mode coefficients.
    pub fn general_coeffs(&self) -> Option<&[f64]> {
        match &self.repr {
            Repr::General { coeffs } => Some(coeffs),
            Repr::Zonal { .. } => None,
        }
    }

    /// Scale factor `omega_n / N(n,l)` turning zonal Legendre coefficients
    /// into Fourier coefficients.
    fn zonal_factor(&self, l: usize) -> f64 {
        self.dim.omega() / self.dim.harmonic_dim(l)
    }

    /// Fourier coefficient `v_{l,m}` in the real `n = 3` basis.
    pub fn coefficient(&self, l: usize, m: isize) -> Result<f64> {
        if l > self.l_max {
            return Ok(0.0);
        }
        match &self.repr {
            Repr::General { coeffs } => Ok(coeffs[harmonic_index(l, m)]),
            Repr::Zonal { axis, coeffs } => {
                if self.n() != 3 {
                    return Err(SpdoError::RequiresN3(self.n()));
                }
                let y = real_harmonics_n3(l, axis)?;
                Ok(coeffs[l] * self.zonal_factor(l) * y[harmonic_index(l, m)])
            }
        }
    }

    /// Converts to general mode (requires `n = 3`).
    pub fn to_general(&self) -> Result<SpectralFunction> {
        match &self.repr {
            Repr::General { .. } => Ok(self.clone()),
            Repr::Zonal { axis, coeffs } => {
                if self.n() != 3 {
                    return Err(SpdoError::RequiresN3(self.n()));
                }
                let y = real_harmonics_n3(self.l_max, axis)?;
                let mut out = vec![0.0; y.len()];
                for (l, a) in coeffs.iter().enumerate() {
                    let f = a * self.zonal_factor(l);
                    for m in -(l as isize)..=l as isize {
                        let k = harmonic_index(l, m);
                        out[k] = f * y[k];
                    }
                }
                SpectralFunction::general_n3(self.l_max, out)
            }
        }
    }

    /// Per-degree energies `sum_m |v_{l,m}|^2`.
    pub fn level_energies(&self) -> Vec<f64> {
        match &self.repr {
            Repr::General { coeffs } => (0..=self.l_max)
                .map(|l| coeffs[l * l..(l + 1) * (l + 1)].iter().map(|c| c * c).sum())
                .collect(),
            Repr::Zonal { coeffs, .. } => coeffs
                .iter()
                .enumerate()
                .map(|(l, a)| a * a * self.zonal_factor(l))
                .collect(),
        }
    }

    /// Per-degree inner products `sum_m v_{l,m} w_{l,m}` over the common range.
    pub fn level_inners(&self, other: &SpectralFunction) -> Result<Vec<f64>> {
        if self.n() != other.n() {
            return Err(SpdoError::DimensionMismatch(format!(
                "functions live on S^{} and S^{}",
                self.n() - 1,
                other.n() - 1
            )));
        }
        let top = self.l_max.min(other.l_max);
        match (&self.repr, &other.repr) {
            (Repr::General { coeffs: a }, Repr::General { coeffs: b }) => Ok((0..=top)
                .map(|l| dot(&a[l * l..(l + 1) * (l + 1)], &b[l * l..(l + 1) * (l + 1)]))
                .collect()),
            (Repr::Zonal { axis: p, coeffs: a }, Repr::Zonal { axis: q, coeffs: b }) => {
                // sum_m Y(p)Y(q) = N/omega P_l(p.q)
                let rec = LegendreRecurrence::new(self.n(), top)?;
                let mut pl = vec![0.0; top + 1];
                rec.fill(dot(p, q).clamp(-1.0, 1.0), &mut pl);
                Ok((0..=top).map(|l| a[l] * b[l] * self.zonal_factor(l) * pl[l]).collect())
            }
            (Repr::Zonal { axis, coeffs: a }, Repr::General { coeffs: b })
            | (Repr::General { coeffs: b }, Repr::Zonal { axis, coeffs: a }) => {
                let y = real_harmonics_n3(top, axis)?;
                Ok((0..=top)
                    .map(|l| {
                        let r = l * l..(l + 1) * (l + 1);
                        a[l] * self.zonal_factor(l) * dot(&y[r.clone()], &b[r])
                    })
                    .collect())
            }
        }
    }

    /// Per-degree pointwise contributions `sum_m v_{l,m} Y_{l,m}(x)`.
    pub fn level_point_values(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.n() {
            return Err(SpdoError::DimensionMismatch(format!(
                "point has {} components on S^{}",
                x.len(),
                self.n() - 1
            )));
        }
        check_unit(x)?;
        match &self.repr {
            Repr::General { coeffs } => {
                let y = real_harmonics_n3(self.l_max, x)?;
                Ok((0..=self.l_max)
                    .map(|l| {
                        let r = l * l..(l + 1) * (l + 1);
                        dot(&coeffs[r.clone()], &y[r])
                    })
                    .collect())
            }
            Repr::Zonal { axis, coeffs } => {
                let rec = LegendreRecurrence::new(self.n(), self.l_max)?;
                let mut pl = vec![0.0; self.l_max + 1];
                rec.fill(dot(axis, x).clamp(-1.0, 1.0), &mut pl);
                Ok(coeffs.iter().zip(&pl).map(|(a, p)| a * p).collect())
            }
        }
    }

    /// Point value `v(x)`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.level_point_values(x)?.iter().sum())
    }

    /// Multiplies every degree-`l` block by `factor(l)`.
    pub fn map_levels(&self, factor: impl Fn(usize) -> f64) -> SpectralFunction {
        let repr = match &self.repr {
            Repr::General { coeffs } => {
                let mut out = coeffs.clone();
                for l in 0..=self.l_max {
                    let f = factor(l);
                    out[l * l..(l + 1) * (l + 1)].iter_mut().for_each(|c| *c *= f);
                }
                Repr::General { coeffs: out }
            }
            Repr::Zonal { axis, coeffs } => Repr::Zonal {
                axis: axis.clone(),
                coeffs: coeffs.iter().enumerate().map(|(l, a)| a * factor(l)).collect(),
            },
        };
        SpectralFunction {
            dim: self.dim,
            l_max: self.l_max,
            repr,
        }
    }

    /// Drops every degree above `l_max`.
    pub fn truncated(&self, l_max: usize) -> SpectralFunction {
        if l_max >= self.l_max {
            return self.clone();
        }
        let repr = match &self.repr {
            Repr::General { coeffs } => Repr::General {
                coeffs: coeffs[..(l_max + 1) * (l_max + 1)].to_vec(),
            },
            Repr::Zonal { axis, coeffs } => Repr::Zonal {
                axis: axis.clone(),
                coeffs: coeffs[..=l_max].to_vec(),
            },
        };
        SpectralFunction {
            dim: self.dim,
            l_max,
            repr,
        }
    }

    /// `<v, w>_s = sum (l+1)^{2s} v_{l,m} w_{l,m}`.
    pub fn sobolev_inner(&self, other: &SpectralFunction, s: f64) -> Result<f64> {
        Ok(self
            .level_inners(other)?
            .iter()
            .enumerate()
            .map(|(l, v)| (l as f64 + 1.0).powf(2.0 * s) * v)
            .sum())
    }

    /// Sobolev norm `||v||_s`.
    pub fn sobolev_norm(&self, s: f64) -> f64 {
        self.level_energies()
            .iter()
            .enumerate()
            .map(|(l, e)| (l as f64 + 1.0).powf(2.0 * s) * e)
            .sum::<f64>()
            .sqrt()
    }

    /// `self - other` in general mode (`n = 3`), over the larger degree range.
    pub fn sub_general(&self, other: &SpectralFunction) -> Result<SpectralFunction> {
        let top = self.l_max.max(other.l_max);
        let a = self.to_general()?;
        let b = other.to_general()?;
        let (a, b) = (a.general_coeffs().unwrap(), b.general_coeffs().unwrap());
        let coeffs = (0..(top + 1) * (top + 1))
            .map(|k| a.get(k).copied().unwrap_or(0.0) - b.get(k).copied().unwrap_or(0.0))
            .collect();
        SpectralFunction::general_n3(top, coeffs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn zonal_and_general_agree() {
        let axis = [0.6, 0.0, 0.8];
        let z = SpectralFunction::zonal(3, &axis, vec![0.3, -1.0, 0.5, 0.25]).unwrap();
        let g = z.to_general().unwrap();
        let x = [0.0, 0.6, 0.8];
        assert!((z.eval(&x).unwrap() - g.eval(&x).unwrap()).abs() < 1e-14);
        for (a, b) in z.level_energies().iter().zip(g.level_energies()) {
            assert!((a - b).abs() < 1e-14);
        }
        let zz = z.level_inners(&z).unwrap();
        let gz = g.level_inners(&z).unwrap();
        let gg = g.level_inners(&g).unwrap();
        for l in 0..4 {
            assert!((zz[l] - gg[l]).abs() < 1e-13 && (gz[l] - gg[l]).abs() < 1e-13);
        }
    }

    #[test]
    fn constant_function() {
        let c = SpectralFunction::constant(3, 2.0).unwrap();
        assert!((c.eval(&[1.0, 0.0, 0.0]).unwrap() - 2.0).abs() < 1e-15);
        // ||2||_0^2 = 4 * 4pi
        assert!((c.sobolev_norm(0.0).powi(2) - 16.0 * PI).abs() < 1e-12);
        assert!((c.coefficient(0, 0).unwrap() - 2.0 * (4.0 * PI).sqrt()).abs() < 1e-13);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(SpectralFunction::zonal(3, &[0.0, 0.0, 0.9], vec![1.0]).is_err());
        assert!(SpectralFunction::general_n3(2, vec![0.0; 8]).is_err());
        let a = SpectralFunction::constant(3, 1.0).unwrap();
        let b = SpectralFunction::constant(4, 1.0).unwrap();
        assert!(a.level_inners(&b).is_err());
    }
}
