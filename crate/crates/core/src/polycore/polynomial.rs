use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::multiindex::{factorial, MultiIndex};
use crate::error::{Error, Result};

/// Multivariate polynomial in `n` variables with exact rational coefficients.
///
/// The term map never stores a zero coefficient, so equal polynomials have
/// identical maps and `==` is structural.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Polynomial {
    n: usize,
    terms: BTreeMap<MultiIndex, BigRational>,
}

impl Polynomial {
    pub fn zero(n: usize) -> Self {
        Polynomial { n, terms: BTreeMap::new() }
    }

    pub fn one(n: usize) -> Self {
        Self::constant(n, BigRational::one())
    }

    pub fn constant(n: usize, c: BigRational) -> Self {
        Self::term(c, MultiIndex::zero(n))
    }

    pub fn monomial(alpha: MultiIndex) -> Self {
        Self::term(BigRational::one(), alpha)
    }

    pub fn term(c: BigRational, alpha: MultiIndex) -> Self {
        let n = alpha.dim();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(alpha, c);
        }
        Polynomial { n, terms }
    }

    /// The coordinate function `xᵢ` (zero-based `i`).
    pub fn variable(n: usize, i: usize) -> Self {
        Self::monomial(MultiIndex::unit(n, i, 1))
    }

    /// Builds a polynomial from (possibly repeated, possibly zero) terms.
    pub fn from_terms<I>(n: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (MultiIndex, BigRational)>,
    {
        let mut p = Polynomial::zero(n);
        for (alpha, c) in terms {
            if alpha.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, found: alpha.dim() });
            }
            p.add_term(alpha, c);
        }
        Ok(p)
    }

    pub(crate) fn add_term(&mut self, alpha: MultiIndex, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(alpha) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.n
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in ascending canonical order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&MultiIndex, &BigRational)> + '_ {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, alpha: &MultiIndex) -> BigRational {
        self.terms.get(alpha).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Total degree; the zero polynomial reports 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(MultiIndex::order).max().unwrap_or(0)
    }

    /// Highest term in the canonical order.
    pub fn leading_term(&self) -> Option<(&MultiIndex, &BigRational)> {
        self.terms.iter().next_back()
    }

    pub fn scale(&self, c: &BigRational) -> Polynomial {
        if c.is_zero() {
            return Polynomial::zero(self.n);
        }
        Polynomial {
            n: self.n,
            terms: self.terms.iter().map(|(a, v)| (a.clone(), v * c)).collect(),
        }
    }

    fn check_dim(&self, found: usize) -> Result<()> {
        if found != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found });
        }
        Ok(())
    }

    /// `D^α p`.
    pub fn derivative(&self, alpha: &MultiIndex) -> Result<Polynomial> {
        self.check_dim(alpha.dim())?;
        let mut out = Polynomial::zero(self.n);
        for (gamma, c) in &self.terms {
            let Some(rest) = gamma.checked_sub(alpha) else { continue };
            let falling: BigInt = gamma
                .exponents()
                .iter()
                .zip(rest.exponents())
                .map(|(&g, &r)| factorial(g) / factorial(r))
                .product();
            out.add_term(rest, c * BigRational::from_integer(falling));
        }
        Ok(out)
    }

    /// `∂p/∂xᵢ`.
    pub fn partial(&self, i: usize) -> Polynomial {
        self.derivative(&MultiIndex::unit(self.n, i, 1))
            .expect("unit index has matching dimension")
    }

    pub fn laplacian(&self) -> Polynomial {
        let mut out = Polynomial::zero(self.n);
        for i in 0..self.n {
            let d2 = self
                .derivative(&MultiIndex::unit(self.n, i, 2))
                .expect("unit index has matching dimension");
            out = out + d2;
        }
        out
    }

    /// `Δˡ p`; `l = 0` is the identity.
    pub fn laplacian_iter(&self, l: u32) -> Polynomial {
        (0..l).fold(self.clone(), |p, _| p.laplacian())
    }

    /// `∇p · ∇q`.
    pub fn grad_dot(&self, other: &Polynomial) -> Result<Polynomial> {
        self.check_dim(other.n)?;
        let mut out = Polynomial::zero(self.n);
        for i in 0..self.n {
            out = out + &self.partial(i) * &other.partial(i);
        }
        Ok(out)
    }

    pub fn evaluate(&self, point: &[BigRational]) -> Result<BigRational> {
        self.check_dim(point.len())?;
        let mut acc = BigRational::zero();
        for (alpha, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(alpha.exponents()) {
                if e > 0 {
                    t *= num_traits::pow(x.clone(), e as usize);
                }
            }
            acc += t;
        }
        Ok(acc)
    }

    pub fn evaluate_f64(&self, point: &[f64]) -> Result<f64> {
        self.check_dim(point.len())?;
        Ok(self.compile().eval(point))
    }

    /// Float-coefficient snapshot for repeated evaluation in sampling loops.
    pub fn compile(&self) -> CompiledPolynomial {
        CompiledPolynomial {
            terms: self
                .terms
                .iter()
                .map(|(a, c)| (a.exponents().to_vec(), c.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }

    /// Substitutes `xᵢ = offset[i] + Σₖ linear[i][k]·zₖ`, producing a
    /// polynomial in `m = linear[i].len()` new variables.
    pub fn compose_affine(
        &self,
        offset: &[BigRational],
        linear: &[Vec<BigRational>],
    ) -> Result<Polynomial> {
        self.check_dim(offset.len())?;
        self.check_dim(linear.len())?;
        let m = linear.first().map_or(0, Vec::len);
        if linear.iter().any(|row| row.len() != m) {
            return Err(Error::InvalidArgument("ragged substitution matrix".into()));
        }
        let forms: Vec<Polynomial> = (0..self.n)
            .map(|i| {
                let mut f = Polynomial::constant(m, offset[i].clone());
                for (k, a) in linear[i].iter().enumerate() {
                    f.add_term(MultiIndex::unit(m, k, 1), a.clone());
                }
                f
            })
            .collect();
        // powers[i][e] = forms[i]^e, grown on demand
        let mut powers: Vec<Vec<Polynomial>> =
            forms.iter().map(|_| vec![Polynomial::one(m)]).collect();
        let mut out = Polynomial::zero(m);
        for (alpha, c) in &self.terms {
            let mut t = Polynomial::constant(m, c.clone());
            for (i, &e) in alpha.exponents().iter().enumerate() {
                while powers[i].len() <= e as usize {
                    let next = powers[i].last().unwrap() * &forms[i];
                    powers[i].push(next);
                }
                if e > 0 {
                    t = &t * &powers[i][e as usize];
                }
            }
            out = out + t;
        }
        Ok(out)
    }

    /// Coefficient vector over the given monomial list.
    pub fn coefficients_in(&self, basis: &[MultiIndex]) -> Vec<BigRational> {
        basis.iter().map(|a| self.coefficient(a)).collect()
    }

    /// Parses the text format `c*x1^a1*...*xn^an + ...`.
    ///
    /// Coefficients are integers, decimals or `num/den`; variables are
    /// `x1..xn`, with `x, y, z` accepted for `n ≤ 3`. Parentheses,
    /// integer powers and juxtaposition (`2x`) are supported.
    pub fn parse(text: &str, n: usize) -> Result<Polynomial> {
        super::parse::parse(text, n)
    }
}

/// Polynomial with `f64` coefficients, evaluated with `powi`.
#[derive(Clone, Debug)]
pub struct CompiledPolynomial {
    terms: Vec<(Vec<u32>, f64)>,
}

impl CompiledPolynomial {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .fold(*c, |acc, (&k, &xi)| if k == 0 { acc } else { acc * xi.powi(k as i32) })
            })
            .sum()
    }
}

impl Add for Polynomial {
    type Output = Polynomial;
    fn add(mut self, rhs: Polynomial) -> Polynomial {
        debug_assert_eq!(self.n, rhs.n);
        for (a, c) in rhs.terms {
            self.add_term(a, c);
        }
        self
    }
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.clone() + rhs.clone()
    }
}

impl Sub for Polynomial {
    type Output = Polynomial;
    fn sub(mut self, rhs: Polynomial) -> Polynomial {
        debug_assert_eq!(self.n, rhs.n);
        for (a, c) in rhs.terms {
            self.add_term(a, -c);
        }
        self
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.clone() - rhs.clone()
    }
}

impl Neg for Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        Polynomial { n: self.n, terms: self.terms.into_iter().map(|(a, c)| (a, -c)).collect() }
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        debug_assert_eq!(self.n, rhs.n);
        let mut out = Polynomial::zero(self.n);
        for (a, c) in &self.terms {
            for (b, d) in &rhs.terms {
                out.add_term(a + b, c * d);
            }
        }
        out
    }
}

impl Mul for Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: Polynomial) -> Polynomial {
        &self * &rhs
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (alpha, c)) in self.terms.iter().enumerate() {
            let negative = c.is_negative();
            match (k, negative) {
                (0, true) => write!(f, "-")?,
                (0, false) => {}
                (_, true) => write!(f, " - ")?,
                (_, false) => write!(f, " + ")?,
            }
            let mag = c.abs();
            let vars: Vec<String> = alpha
                .exponents()
                .iter()
                .enumerate()
                .filter(|(_, &e)| e > 0)
                .map(|(i, &e)| if e == 1 { format!("x{}", i + 1) } else { format!("x{}^{}", i + 1, e) })
                .collect();
            if vars.is_empty() {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{}", vars.join("*"))?;
            } else {
                write!(f, "{mag}*{}", vars.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> Polynomial {
        Polynomial::parse(s, 2).unwrap()
    }

    fn r(a: i64, b: i64) -> BigRational {
        BigRational::new(a.into(), b.into())
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("x^2*y").derivative(&[1, 1].into()).unwrap(), p("2x"));
        assert!(p("x^2*y").derivative(&[3, 0].into()).unwrap().is_zero());
        assert_eq!(p("x^4 + x^2*y^2").derivative(&[2, 2].into()).unwrap(), p("4"));
    }

    #[test]
    fn derivative_rejects_dimension_mismatch() {
        let err = p("x*y").derivative(&[1, 0, 0].into()).unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch { expected: 2, found: 3 }));
    }

    #[test]
    fn laplacian_examples() {
        assert_eq!(p("x^4 + y^4").laplacian_iter(1), p("12x^2 + 12y^2"));
        assert_eq!(p("x^2*y^2").laplacian_iter(2), p("8"));
        assert!(p("x^2 - y^2").laplacian_iter(1).is_zero());
    }

    #[test]
    fn grad_dot_examples() {
        assert!(p("x").grad_dot(&p("y")).unwrap().is_zero());
        assert_eq!(p("x^2").grad_dot(&p("x")).unwrap(), p("2x"));
        assert_eq!(p("x^2 - 3y^2 + 4x").grad_dot(&p("x")).unwrap(), p("2x + 4"));
    }

    #[test]
    fn evaluate_examples() {
        assert_eq!(p("x^2 - y^2").evaluate(&[r(1, 1), r(1, 1)]).unwrap(), r(0, 1));
        assert_eq!(p("x*y^3 - x^3*y").evaluate(&[r(2, 1), r(1, 1)]).unwrap(), r(-6, 1));
        assert_eq!(p("2 + x").evaluate(&[r(-1, 1), r(0, 1)]).unwrap(), r(1, 1));
        assert_eq!(p("2 + x").evaluate_f64(&[-1.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn zero_is_canonical() {
        let z = p("x - x");
        assert!(z.is_zero());
        assert_eq!(z, Polynomial::zero(2));
        assert_eq!(z.degree(), 0);
        assert_eq!(z.to_string(), "0");
    }

    #[test]
    fn display_round_trips() {
        let q = p("-1/3*x^3 + x*y^2 + 7 - y");
        let text = q.to_string();
        assert_eq!(text, "7 - x2 - 1/3*x1^3 + x1*x2^2");
        assert_eq!(Polynomial::parse(&text, 2).unwrap(), q);
    }

    #[test]
    fn compose_affine_translates() {
        // (x + 1)^2 with x -> z shifted
        let q = p("x^2");
        let shifted = q
            .compose_affine(&[r(1, 1), r(0, 1)], &[vec![r(1, 1), r(0, 1)], vec![r(0, 1), r(1, 1)]])
            .unwrap();
        assert_eq!(shifted, p("x^2 + 2x + 1"));
    }
}
