//! Pseudodifferential operators on the sphere given by their spherical symbols.

use std::fmt;

use crate::error::{Result, SpdoError};
use crate::kernels::ShapeFunction;
use crate::spectral::{check_unit, dot, SpectralFunction};
use crate::sphcore::{harmonic_dim, harmonic_index, real_harmonics_n3, SphereDim};

/// Degrees scanned when looking for zeros of a custom symbol.
pub const DEFAULT_KERNEL_SCAN: usize = 1000;

/// Rational expression in the degree `l`.
#[derive(Debug, Clone, PartialEq)]
pub enum SymbolExpr {
    Const(f64),
    Degree,
    Neg(Box<SymbolExpr>),
    Add(Box<SymbolExpr>, Box<SymbolExpr>),
    Sub(Box<SymbolExpr>, Box<SymbolExpr>),
    Mul(Box<SymbolExpr>, Box<SymbolExpr>),
    Div(Box<SymbolExpr>, Box<SymbolExpr>),
    Pow(Box<SymbolExpr>, i32),
}

impl SymbolExpr {
    /// Parses expressions such as `1/(2*l+1)` or `l*(l+1)^2 - 3`.
    ///
    /// Grammar: `+ - * /`, parentheses, numeric literals, the variable `l`,
    /// and integer exponents `^k`.
    pub fn parse(text: &str) -> Result<Self> {
        let tokens = tokenize(text)?;
        let mut parser = Parser { tokens, pos: 0 };
        let expr = parser.expr()?;
        if parser.pos != parser.tokens.len() {
            return Err(SpdoError::Expression(format!("unexpected trailing input in `{text}`")));
        }
        Ok(expr)
    }

    pub fn eval(&self, l: f64) -> f64 {
        match self {
            SymbolExpr::Const(c) => *c,
            SymbolExpr::Degree => l,
            SymbolExpr::Neg(a) => -a.eval(l),
            SymbolExpr::Add(a, b) => a.eval(l) + b.eval(l),
            SymbolExpr::Sub(a, b) => a.eval(l) - b.eval(l),
            SymbolExpr::Mul(a, b) => a.eval(l) * b.eval(l),
            SymbolExpr::Div(a, b) => a.eval(l) / b.eval(l),
            SymbolExpr::Pow(a, k) => a.eval(l).powi(*k),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Var,
    Op(char),
    Open,
    Close,
}

fn tokenize(text: &str) -> Result<Vec<Token>> {
    let mut out = Vec::new();
    let chars: Vec<char> = text.chars().collect();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            ' ' | '\t' => {}
            'l' | 'ℓ' => out.push(Token::Var),
            '+' | '-' | '*' | '/' | '^' | '·' => out.push(Token::Op(if c == '·' { '*' } else { c })),
            '(' => out.push(Token::Open),
            ')' => out.push(Token::Close),
            d if d.is_ascii_digit() || d == '.' => {
                let start = i;
                while i + 1 < chars.len()
                    && (chars[i + 1].is_ascii_digit()
                        || chars[i + 1] == '.'
                        || chars[i + 1] == 'e'
                        || chars[i + 1] == 'E'
                        || ((chars[i + 1] == '-' || chars[i + 1] == '+') && matches!(chars[i], 'e' | 'E')))
                {
                    i += 1;
                }
                let lit: String = chars[start..=i].iter().collect();
                let v = lit
                    .parse()
                    .map_err(|_| SpdoError::Expression(format!("bad number `{lit}`")))?;
                out.push(Token::Num(v));
            }
            other => return Err(SpdoError::Expression(format!("unexpected character `{other}`"))),
        }
        i += 1;
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expr(&mut self) -> Result<SymbolExpr> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.term()?;
            lhs = if op == '+' {
                SymbolExpr::Add(Box::new(lhs), Box::new(rhs))
            } else {
                SymbolExpr::Sub(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<SymbolExpr> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek().cloned() {
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = if op == '*' {
                SymbolExpr::Mul(Box::new(lhs), Box::new(rhs))
            } else {
                SymbolExpr::Div(Box::new(lhs), Box::new(rhs))
            };
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<SymbolExpr> {
        if let Some(Token::Op('-')) = self.peek() {
            self.pos += 1;
            return Ok(SymbolExpr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<SymbolExpr> {
        let base = self.atom()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let negative = matches!(self.peek(), Some(Token::Op('-')));
            if negative {
                self.pos += 1;
            }
            match self.next() {
                Some(Token::Num(k)) if k.fract() == 0.0 && k.abs() < 64.0 => {
                    let k = if negative { -(k as i32) } else { k as i32 };
                    return Ok(SymbolExpr::Pow(Box::new(base), k));
                }
                _ => return Err(SpdoError::Expression("exponents must be small integers".into())),
            }
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<SymbolExpr> {
        match self.next() {
            Some(Token::Num(v)) => Ok(SymbolExpr::Const(v)),
            Some(Token::Var) => Ok(SymbolExpr::Degree),
            Some(Token::Open) => {
                let e = self.expr()?;
                match self.next() {
                    Some(Token::Close) => Ok(e),
                    _ => Err(SpdoError::Expression("missing `)`".into())),
                }
            }
            other => Err(SpdoError::Expression(format!("unexpected token {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SymbolKind {
    /// `-Delta_S`: `l (l + n - 2)`.
    LaplaceBeltrami,
    /// `l (l + 1) / (2l + 1)` on `S^2`.
    Hypersingular,
    /// `1 / (2l + 1)` on `S^2`.
    WeaklySingular,
    /// `-1 / (4l + 2)` on `S^2`.
    DoubleLayer,
    Identity,
    Custom(SymbolExpr),
}

/// A pseudodifferential operator `L` acting diagonally on spherical harmonics.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSymbol {
    name: String,
    dim: SphereDim,
    order: f64,
    kind: SymbolKind,
    kernel_set: Vec<usize>,
}

impl fmt::Display for SpectralSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (order {})", self.name, self.order)
    }
}

impl SpectralSymbol {
    /// Built-in operator by name: `laplace-beltrami`, `hypersingular`,
    /// `weakly-singular`, `double-layer`, `identity`.
    pub fn named(name: &str, n: usize) -> Result<Self> {
        let dim = SphereDim::new(n)?;
        let key = name.to_ascii_lowercase().replace('_', "-");
        let (kind, order, kernel_set) = match key.as_str() {
            "laplace-beltrami" => (SymbolKind::LaplaceBeltrami, 2.0, vec![0]),
            "hypersingular" => (SymbolKind::Hypersingular, 1.0, vec![0]),
            "weakly-singular" => (SymbolKind::WeaklySingular, -1.0, vec![]),
            "double-layer" => (SymbolKind::DoubleLayer, -1.0, vec![]),
            "identity" => (SymbolKind::Identity, 0.0, vec![]),
            _ => return Err(SpdoError::UnknownOperator(name.to_string())),
        };
        if n != 3
            && matches!(
                kind,
                SymbolKind::Hypersingular | SymbolKind::WeaklySingular | SymbolKind::DoubleLayer
            )
        {
            return Err(SpdoError::RequiresN3(n));
        }
        Ok(Self {
            name: key,
            dim,
            order,
            kind,
            kernel_set,
        })
    }

    /// Custom symbol of order `order` (= 2 alpha). Zeros are located by scanning
    /// `0..=scan_l_max`; a zero in the upper half of the scan is taken as evidence
    /// of infinitely many zeros and rejected.
    pub fn custom(n: usize, order: f64, expr: SymbolExpr, scan_l_max: usize) -> Result<Self> {
        let dim = SphereDim::new(n)?;
        let mut kernel_set = Vec::new();
        for l in 0..=scan_l_max {
            let v = expr.eval(l as f64);
            if !v.is_finite() {
                return Err(SpdoError::Expression(format!("symbol is not finite at l={l}")));
            }
            if v.abs() <= 1e-14 * (l as f64 + 1.0).powf(order) {
                kernel_set.push(l);
            }
        }
        if kernel_set.iter().any(|&l| l > scan_l_max / 2) {
            return Err(SpdoError::InfiniteKernel("custom".into()));
        }
        Ok(Self {
            name: "custom".into(),
            dim,
            order,
            kind: SymbolKind::Custom(expr),
            kernel_set,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> &SymbolKind {
        &self.kind
    }

    pub fn n(&self) -> usize {
        self.dim.n()
    }

    /// Order `2 alpha`.
    pub fn order(&self) -> f64 {
        self.order
    }

    pub fn alpha(&self) -> f64 {
        self.order / 2.0
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, SymbolKind::Identity)
    }

    /// `K(L) = { l : L_hat(l) = 0 }`.
    pub fn kernel_set(&self) -> &[usize] {
        &self.kernel_set
    }

    pub fn in_kernel(&self, l: usize) -> bool {
        self.kernel_set.contains(&l)
    }

    /// `M = dim ker L`.
    pub fn kernel_dim(&self) -> usize {
        self.kernel_set
            .iter()
            .map(|&l| harmonic_dim(self.n(), l).expect("n >= 3") as usize)
            .sum()
    }

    /// `L_hat(l)`; exactly zero on `K(L)`.
    pub fn value(&self, l: usize) -> f64 {
        if self.in_kernel(l) {
            return 0.0;
        }
        let lf = l as f64;
        match &self.kind {
            SymbolKind::LaplaceBeltrami => lf * (lf + self.n() as f64 - 2.0),
            SymbolKind::Hypersingular => lf * (lf + 1.0) / (2.0 * lf + 1.0),
            SymbolKind::WeaklySingular => 1.0 / (2.0 * lf + 1.0),
            SymbolKind::DoubleLayer => -1.0 / (4.0 * lf + 2.0),
            SymbolKind::Identity => 1.0,
            SymbolKind::Custom(e) => e.eval(lf),
        }
    }
}

/// Parses a built-in operator name.
pub fn make_symbol(name: &str, n: usize) -> Result<SpectralSymbol> {
    SpectralSymbol::named(name, n)
}

/// `Lv = sum L_hat(l) v_{l,m} Y_{l,m}`.
pub fn apply(symbol: &SpectralSymbol, v: &SpectralFunction) -> Result<SpectralFunction> {
    if symbol.n() != v.n() {
        return Err(SpdoError::DimensionMismatch(
            "operator and function dimensions differ".into(),
        ));
    }
    Ok(v.map_levels(|l| symbol.value(l)))
}

/// Strong-ellipticity constants `C1 <= L_hat(l)/(l+1)^{2 alpha} <= C2` off `K(L)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EllipticityBounds {
    pub c1: f64,
    pub c2: f64,
}

/// Scans `0..=l_max` (`l_max >= 10`) for the two-sided power-law bounds.
pub fn ellipticity_scan(symbol: &SpectralSymbol, l_max: usize) -> Result<EllipticityBounds> {
    if l_max < 10 {
        return Err(SpdoError::Config(format!(
            "ellipticity scan needs l_max >= 10, got {l_max}"
        )));
    }
    let (c1, c2) = (0..=l_max)
        .filter(|&l| !symbol.in_kernel(l))
        .map(|l| symbol.value(l) / (l as f64 + 1.0).powf(symbol.order()))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), r| (a.min(r), b.max(r)));
    if c1 <= 0.0 {
        return Err(SpdoError::NotStronglyElliptic {
            name: symbol.name().to_string(),
            min_ratio: c1,
        });
    }
    Ok(EllipticityBounds { c1, c2 })
}

/// `a(w, v) = <Lw, v> = sum L_hat(l) w_{l,m} v_{l,m}`.
pub fn bilinear_a(symbol: &SpectralSymbol, w: &SpectralFunction, v: &SpectralFunction) -> Result<f64> {
    if symbol.n() != w.n() {
        return Err(SpdoError::DimensionMismatch(
            "operator and function dimensions differ".into(),
        ));
    }
    Ok(w.level_inners(v)?
        .iter()
        .enumerate()
        .map(|(l, x)| symbol.value(l) * x)
        .sum())
}

/// Basis `{Y_{l,m} : l in K(L)}` of `ker L`, as `(l, m)` pairs.
///
/// For `n = 3` any finite kernel set is supported through the real harmonics;
/// other dimensions support only `K(L) ⊆ {0}`.
pub fn kernel_basis(symbol: &SpectralSymbol) -> Result<Vec<(usize, isize)>> {
    if symbol.n() != 3 && symbol.kernel_set().iter().any(|&l| l > 0) {
        return Err(SpdoError::RequiresN3(symbol.n()));
    }
    Ok(symbol
        .kernel_set()
        .iter()
        .flat_map(|&l| (-(l as isize)..=l as isize).map(move |m| (l, m)))
        .collect())
}

/// Evaluates `Y_{l,m}(x)`; `n = 3` in general, any `n` for `l = 0`.
pub fn harmonic_value(dim: SphereDim, l: usize, m: isize, x: &[f64]) -> Result<f64> {
    if l == 0 {
        return Ok(1.0 / dim.omega().sqrt());
    }
    if dim.n() != 3 {
        return Err(SpdoError::RequiresN3(dim.n()));
    }
    Ok(real_harmonics_n3(l, x)?[harmonic_index(l, m)])
}

/// A linear functional `mu` acting by duality on functions.
#[derive(Debug, Clone)]
pub enum Functional {
    /// `<mu, v> = sum mu_{l,m} v_{l,m}`.
    Spectral(SpectralFunction),
    /// `<mu, v> = v(x)`.
    PointEval(Vec<f64>),
}

impl Functional {
    /// Mean value `|S^{n-1}|^{-1} int v`.
    pub fn mean_value(n: usize) -> Result<Self> {
        let dim = SphereDim::new(n)?;
        Ok(Functional::Spectral(SpectralFunction::constant(n, 1.0 / dim.omega())?))
    }

    pub fn point(x: &[f64]) -> Result<Self> {
        check_unit(x)?;
        Ok(Functional::PointEval(x.to_vec()))
    }

    /// `<mu, Y_{l,m}>`.
    pub fn pair_harmonic(&self, dim: SphereDim, l: usize, m: isize) -> Result<f64> {
        match self {
            Functional::PointEval(x) => harmonic_value(dim, l, m, x),
            Functional::Spectral(mu) => {
                if l == 0 {
                    // Y_00 is constant: mu_00 = a_0 |S| Y_00 for zonal mu.
                    return match mu.zonal_parts() {
                        Some((_, a)) => Ok(a[0] * dim.omega().sqrt()),
                        None => mu.coefficient(0, 0),
                    };
                }
                mu.coefficient(l, m)
            }
        }
    }

    /// `<mu, v>`.
    pub fn pair_function(&self, v: &SpectralFunction) -> Result<f64> {
        match self {
            Functional::PointEval(x) => v.eval(x),
            Functional::Spectral(mu) => Ok(mu.level_inners(v)?.iter().sum()),
        }
    }

    /// `<mu, Phi_j>` for the SRBF centred at `center`.
    pub fn pair_srbf(&self, shape: &ShapeFunction, center: &[f64]) -> Result<f64> {
        match self {
            Functional::PointEval(x) => Ok(shape.eval(dot(x, center).clamp(-1.0, 1.0))),
            Functional::Spectral(mu) => {
                let top = mu.l_max().min(shape.table_l_max());
                let phi = shape.srbf(center, top)?;
                Ok(mu.level_inners(&phi)?.iter().sum())
            }
        }
    }
}

/// Side conditions `<mu_i, u> = gamma_i`, `i = 1..M`.
#[derive(Debug, Clone, Default)]
pub struct UnisolventConstraints {
    pub functionals: Vec<Functional>,
    pub targets: Vec<f64>,
}

impl UnisolventConstraints {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn new(functionals: Vec<Functional>, targets: Vec<f64>) -> Result<Self> {
        if functionals.len() != targets.len() {
            return Err(SpdoError::DimensionMismatch(format!(
                "{} functionals but {} targets",
                functionals.len(),
                targets.len()
            )));
        }
        Ok(Self { functionals, targets })
    }

    pub fn len(&self) -> usize {
        self.functionals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functionals.is_empty()
    }

    /// The `M x M` matrix `[<mu_i, Y_k>]` over the kernel basis.
    pub fn kernel_matrix(&self, symbol: &SpectralSymbol) -> Result<Vec<Vec<f64>>> {
        let basis = kernel_basis(symbol)?;
        if basis.len() != self.len() {
            return Err(SpdoError::DimensionMismatch(format!(
                "dim ker L = {} but {} constraints given",
                basis.len(),
                self.len()
            )));
        }
        let dim = SphereDim::new(symbol.n())?;
        self.functionals
            .iter()
            .map(|mu| {
                basis
                    .iter()
                    .map(|&(l, m)| mu.pair_harmonic(dim, l, m))
                    .collect::<Result<Vec<_>>>()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_general(rng: &mut impl Rng, l_max: usize, zero_kernel: &[usize]) -> SpectralFunction {
        let mut c: Vec<f64> = (0..(l_max + 1) * (l_max + 1))
            .map(|_| rng.gen_range(-1.0..1.0))
            .collect();
        for &l in zero_kernel {
            c[l * l..(l + 1) * (l + 1)].iter_mut().for_each(|x| *x = 0.0);
        }
        SpectralFunction::general_n3(l_max, c).unwrap()
    }

    #[test]
    fn builtin_symbols() {
        let s = make_symbol("weakly-singular", 3).unwrap();
        assert_eq!(s.value(3), 1.0 / 7.0);
        assert_eq!(s.kernel_dim(), 0);
        assert_eq!(s.alpha(), -0.5);
        let d = make_symbol("double_layer", 3).unwrap();
        assert_eq!(d.value(0), -0.5);
        let lb = make_symbol("laplace-beltrami", 3).unwrap();
        assert_eq!(lb.value(1), 2.0);
        assert_eq!(lb.kernel_set(), &[0]);
        assert_eq!(lb.kernel_dim(), 1);
        let lb4 = make_symbol("laplace-beltrami", 4).unwrap();
        assert_eq!(lb4.value(2), 8.0);
        assert!(make_symbol("weakly-singular", 4).is_err());
        assert!(make_symbol("nope", 3).is_err());
        let h = make_symbol("hypersingular", 3).unwrap();
        assert_eq!(h.value(2), 6.0 / 5.0);
    }

    #[test]
    fn custom_expressions() {
        let e = SymbolExpr::parse("1/(2*l+1)").unwrap();
        assert_eq!(e.eval(3.0), 1.0 / 7.0);
        let e = SymbolExpr::parse("l*(l+1)^2 - -3").unwrap();
        assert_eq!(e.eval(2.0), 21.0);
        let e = SymbolExpr::parse("(l+1)^-2 * 4").unwrap();
        assert_eq!(e.eval(1.0), 1.0);
        assert!(SymbolExpr::parse("l +").is_err());
        assert!(SymbolExpr::parse("l^0.5").is_err());
        assert!(SymbolExpr::parse("sin(l)").is_err());

        let lb = SpectralSymbol::custom(3, 2.0, SymbolExpr::parse("l*(l+1)").unwrap(), 200).unwrap();
        assert_eq!(lb.kernel_set(), &[0]);
        let lb_builtin = make_symbol("laplace-beltrami", 3).unwrap();
        for l in 0..50 {
            assert_eq!(lb.value(l), lb_builtin.value(l));
        }
        // (l mod 2)-style zeros cannot be written, but a late zero is flagged
        let late = SymbolExpr::parse("(l-150)^2").unwrap();
        assert!(matches!(
            SpectralSymbol::custom(3, 2.0, late, 200),
            Err(SpdoError::InfiniteKernel(_))
        ));
        let bad = SymbolExpr::parse("1/(l-3)").unwrap();
        assert!(SpectralSymbol::custom(3, -1.0, bad, 200).is_err());
    }

    #[test]
    fn apply_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let v = random_general(&mut rng, 6, &[]);
        let id = make_symbol("identity", 3).unwrap();
        assert_eq!(apply(&id, &v).unwrap(), v);

        let mut c = vec![0.0; 9];
        for m in -2..=2 {
            c[harmonic_index(2, m)] = 1.0;
        }
        let v2 = SpectralFunction::general_n3(2, c).unwrap();
        let s = make_symbol("weakly-singular", 3).unwrap();
        let sv = apply(&s, &v2).unwrap();
        assert_eq!(sv.coefficient(2, 1).unwrap(), 0.2);

        let lb = make_symbol("laplace-beltrami", 3).unwrap();
        let c = SpectralFunction::constant(3, 5.0).unwrap();
        assert_eq!(apply(&lb, &c).unwrap().sobolev_norm(0.0), 0.0);
        let lv = apply(&lb, &v).unwrap();
        assert_eq!(lv.coefficient(0, 0).unwrap(), 0.0);
    }

    #[test]
    fn ellipticity_examples() {
        let s = make_symbol("weakly-singular", 3).unwrap();
        let b = ellipticity_scan(&s, 100).unwrap();
        assert!(b.c1 > 0.5 && b.c2 <= 1.0);
        assert_eq!(b.c2, 1.0);
        assert!((b.c1 - 101.0 / 201.0).abs() < 1e-15);
        let id = make_symbol("identity", 3).unwrap();
        assert_eq!(
            ellipticity_scan(&id, 20).unwrap(),
            EllipticityBounds { c1: 1.0, c2: 1.0 }
        );
        let lb = make_symbol("laplace-beltrami", 3).unwrap();
        let b = ellipticity_scan(&lb, 100).unwrap();
        assert_eq!(b.c1, 0.5);
        assert!((b.c2 - 100.0 / 101.0).abs() < 1e-15);
        let d = make_symbol("double-layer", 3).unwrap();
        assert!(matches!(
            ellipticity_scan(&d, 20),
            Err(SpdoError::NotStronglyElliptic { .. })
        ));
        assert!(ellipticity_scan(&s, 5).is_err());
    }

    #[test]
    fn bilinear_form_examples() {
        let s = make_symbol("weakly-singular", 3).unwrap();
        let v = SpectralFunction::general_n3(0, vec![3.0]).unwrap();
        assert_eq!(bilinear_a(&s, &v, &v).unwrap(), 9.0);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (w, v) = (random_general(&mut rng, 8, &[]), random_general(&mut rng, 8, &[]));
        let (a, b) = (bilinear_a(&s, &w, &v).unwrap(), bilinear_a(&s, &v, &w).unwrap());
        assert!((a - b).abs() < 1e-14);
    }

    #[test]
    fn boundedness_and_coercivity() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for name in ["weakly-singular", "laplace-beltrami", "hypersingular", "identity"] {
            let sym = make_symbol(name, 3).unwrap();
            let b = ellipticity_scan(&sym, 30).unwrap();
            let alpha = sym.alpha();
            for _ in 0..50 {
                let w = random_general(&mut rng, 30, sym.kernel_set());
                let v = random_general(&mut rng, 30, sym.kernel_set());
                for s in [0.0, 0.5, -0.5, 1.0, -1.0] {
                    let a = bilinear_a(&sym, &w, &v).unwrap().abs();
                    let bound = b.c2 * w.sobolev_norm(alpha + s) * v.sobolev_norm(alpha - s);
                    assert!(a <= bound * (1.0 + 1e-12), "{name} s={s}");
                }
                let avv = bilinear_a(&sym, &v, &v).unwrap();
                let nv = v.sobolev_norm(alpha).powi(2);
                assert!(avv >= b.c1 * nv * (1.0 - 1e-12) && avv <= b.c2 * nv * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn kernel_matrix_for_mean_value() {
        let lb = make_symbol("laplace-beltrami", 3).unwrap();
        let c = UnisolventConstraints::new(vec![Functional::mean_value(3).unwrap()], vec![0.0]).unwrap();
        let m = c.kernel_matrix(&lb).unwrap();
        // mean of Y_00 = 1/sqrt(4 pi)
        assert!((m[0][0] - 1.0 / (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        let p = Functional::point(&[0.0, 0.0, 1.0]).unwrap();
        let c = UnisolventConstraints::new(vec![p], vec![0.0]).unwrap();
        assert!((c.kernel_matrix(&lb).unwrap()[0][0] - 1.0 / (4.0 * std::f64::consts::PI).sqrt()).abs() < 1e-15);
        assert!(UnisolventConstraints::new(vec![], vec![1.0]).is_err());
    }
}
