//! Exact multivariate polynomials over the rationals, plus the small
//! coefficient abstraction shared by Weil elements and microflows.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

pub type Rational = num_rational::BigRational;

/// Builds the rational `num/den`. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Anything polynomials can be evaluated into.
pub trait Evaluate: Clone {
    fn plus(&self, other: &Self) -> Self;
    fn times(&self, other: &Self) -> Self;
    fn scale(&self, factor: &Rational) -> Self;
}

/// Coefficient ring of a Weil element: the rationals for points of `R^k`,
/// polynomials in the base coordinates for elements of `M^M (x) W`.
pub trait Coefficient: Evaluate + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn zero_value() -> Self;
    fn one_value() -> Self;
    fn vanishes(&self) -> bool;
    fn from_rational(r: Rational) -> Self;

    fn negate(&self) -> Self {
        self.scale(&-Rational::one())
    }

    fn minus(&self, other: &Self) -> Self {
        self.plus(&other.negate())
    }
}

impl Evaluate for Rational {
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn times(&self, other: &Self) -> Self {
        self * other
    }
    fn scale(&self, factor: &Rational) -> Self {
        self * factor
    }
}

impl Coefficient for Rational {
    fn zero_value() -> Self {
        Zero::zero()
    }
    fn one_value() -> Self {
        One::one()
    }
    fn vanishes(&self) -> bool {
        Zero::is_zero(self)
    }
    fn from_rational(r: Rational) -> Self {
        r
    }
}

/// An exponent vector, stored without trailing zeros so that the same
/// monomial compares equal regardless of the ambient variable count.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    /// The zero-based variable `i`.
    pub fn var(i: usize) -> Self {
        let mut e = vec![0; i + 1];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(mut exps: Vec<u32>) -> Self {
        while exps.last() == Some(&0) {
            exps.pop();
        }
        Monomial(exps)
    }

    /// Squarefree monomial on the given zero-based variable indices.
    pub fn squarefree(vars: &[usize]) -> Self {
        let top = vars.iter().max().map_or(0, |m| m + 1);
        let mut e = vec![0; top];
        for &v in vars {
            e[v] += 1;
        }
        Monomial::from_exponents(e)
    }

    pub fn exponent(&self, i: usize) -> u32 {
        self.0.get(i).copied().unwrap_or(0)
    }

    /// Exponents padded (or required to fit) to `n` variables.
    pub fn dense(&self, n: usize) -> Vec<u32> {
        assert!(self.0.len() <= n, "monomial uses more than {n} variables");
        let mut e = self.0.clone();
        e.resize(n, 0);
        e
    }

    /// Number of leading variables this monomial actually touches.
    pub fn support_len(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let n = self.0.len().max(other.0.len());
        Monomial((0..n).map(|i| self.exponent(i) + other.exponent(i)).collect())
    }

    pub fn divides(&self, other: &Monomial) -> bool {
        self.0.iter().enumerate().all(|(i, &a)| a <= other.exponent(i))
    }

    /// Writes the monomial as a product of `prefix{i}` factors, 1-based.
    pub fn render(&self, prefix: &str) -> String {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| {
                if e == 1 {
                    format!("{prefix}{}", i + 1)
                } else {
                    format!("{prefix}{}^{e}", i + 1)
                }
            })
            .collect();
        if parts.is_empty() {
            "1".to_string()
        } else {
            parts.join("*")
        }
    }

    /// Graded order: total degree first, then lexicographically larger
    /// exponent vectors first (so `X1` precedes `X2`).
    pub fn graded_cmp(&self, other: &Monomial) -> std::cmp::Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

/// Sparse polynomial with rational coefficients.
///
/// `nvars` is the declared arity; arithmetic widens to the larger arity so
/// that constants built without context combine with anything. Equality
/// ignores the declared arity and compares terms only.
#[derive(Clone, Debug)]
pub struct Polynomial {
    nvars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl PartialEq for Polynomial {
    fn eq(&self, other: &Self) -> bool {
        self.terms == other.terms
    }
}

impl Eq for Polynomial {}

impl Polynomial {
    pub fn zero(nvars: usize) -> Self {
        Polynomial { nvars, terms: BTreeMap::new() }
    }

    pub fn constant(nvars: usize, c: Rational) -> Self {
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial::one(), c);
        p
    }

    /// The zero-based variable `i`.
    pub fn var(nvars: usize, i: usize) -> Self {
        assert!(i < nvars, "variable {i} out of range for {nvars} variables");
        let mut p = Polynomial::zero(nvars);
        p.add_term(Monomial::var(i), Rational::one());
        p
    }

    pub fn from_terms(nvars: usize, terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut p = Polynomial::zero(nvars);
        for (m, c) in terms {
            assert!(m.support_len() <= nvars, "monomial exceeds declared arity");
            p.add_term(m, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    /// Same polynomial with a different declared arity.
    pub fn with_nvars(mut self, nvars: usize) -> Self {
        assert!(self.used_vars() <= nvars, "polynomial uses more than {nvars} variables");
        self.nvars = nvars;
        self
    }

    /// One past the highest variable index that actually occurs.
    pub fn used_vars(&self) -> usize {
        self.terms.keys().map(Monomial::support_len).max().unwrap_or(0)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        self.terms.get(m).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn constant_term(&self) -> Rational {
        self.coefficient(&Monomial::one())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if Zero::is_zero(&c) {
            return;
        }
        self.nvars = self.nvars.max(m.support_len());
        match self.terms.entry(m) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if Zero::is_zero(o.get()) {
                    o.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let mut out = self.clone();
        out.nvars = self.nvars.max(other.nvars);
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Polynomial) -> Polynomial {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Polynomial {
        self.scale_by(&-Rational::one())
    }

    pub fn scale_by(&self, factor: &Rational) -> Polynomial {
        if Zero::is_zero(factor) {
            return Polynomial::zero(self.nvars);
        }
        Polynomial {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c * factor)).collect(),
        }
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars.max(other.nvars));
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.mul(mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Polynomial {
        let mut out = Polynomial::constant(self.nvars, Rational::one());
        for _ in 0..e {
            out = out.mul(self);
        }
        out
    }

    /// Partial derivative with respect to the zero-based variable `i`.
    pub fn derivative(&self, i: usize) -> Polynomial {
        let mut out = Polynomial::zero(self.nvars);
        for (m, c) in &self.terms {
            let e = m.exponent(i);
            if e == 0 {
                continue;
            }
            let mut exps = m.dense(m.support_len());
            exps[i] -= 1;
            out.add_term(Monomial::from_exponents(exps), c * int(e as i64));
        }
        out
    }

    /// Re-embeds into `nvars` variables, sending variable `i` to `offset + i`.
    pub fn shifted(&self, nvars: usize, offset: usize) -> Polynomial {
        assert!(offset + self.used_vars() <= nvars);
        let mut out = Polynomial::zero(nvars);
        for (m, c) in &self.terms {
            let mut exps = vec![0; offset];
            exps.extend_from_slice(&m.dense(m.support_len()));
            out.add_term(Monomial::from_exponents(exps), c.clone());
        }
        out
    }

    /// Evaluates at `values`, with `one` the unit of the target ring.
    pub fn eval<T: Evaluate>(&self, values: &[T], one: &T) -> T {
        assert!(
            self.used_vars() <= values.len(),
            "evaluation needs {} values, got {}",
            self.used_vars(),
            values.len()
        );
        let mut max_exp = vec![0u32; self.used_vars()];
        for m in self.terms.keys() {
            for (i, slot) in max_exp.iter_mut().enumerate() {
                *slot = (*slot).max(m.exponent(i));
            }
        }
        let powers: Vec<Vec<T>> = max_exp
            .iter()
            .zip(values)
            .map(|(&top, v)| {
                let mut ps = vec![one.clone()];
                for _ in 0..top {
                    let next = ps.last().expect("nonempty").times(v);
                    ps.push(next);
                }
                ps
            })
            .collect();
        let mut acc: Option<T> = None;
        for (m, c) in &self.terms {
            let mut term = one.scale(c);
            for (i, p) in powers.iter().enumerate() {
                let e = m.exponent(i) as usize;
                if e > 0 {
                    term = term.times(&p[e]);
                }
            }
            acc = Some(match acc {
                None => term,
                Some(a) => a.plus(&term),
            });
        }
        acc.unwrap_or_else(|| one.scale(&Rational::zero()))
    }

    /// Evaluates at rational values.
    pub fn eval_rational(&self, values: &[Rational]) -> Rational {
        self.eval(values, &Rational::one())
    }

    /// Renders with the given variable prefix (`d` for infinitesimals,
    /// `x` for base coordinates). The output parses back to the same value.
    pub fn render(&self, prefix: &str) -> String {
        if self.terms.is_empty() {
            return "0".to_string();
        }
        let mut ordered: Vec<(&Monomial, &Rational)> = self.terms.iter().collect();
        ordered.sort_by(|a, b| a.0.graded_cmp(b.0));
        let mut out = String::new();
        for (idx, (m, c)) in ordered.into_iter().enumerate() {
            let negative = c.is_negative();
            let abs = c.abs();
            if idx == 0 {
                if negative {
                    out.push('-');
                }
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            let coeff = format_rational(&abs);
            if m.is_one() {
                out.push_str(&coeff);
            } else if abs.is_one() {
                out.push_str(&m.render(prefix));
            } else {
                out.push_str(&coeff);
                out.push('*');
                out.push_str(&m.render(prefix));
            }
        }
        out
    }
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

impl Evaluate for Polynomial {
    fn plus(&self, other: &Self) -> Self {
        self.add(other)
    }
    fn times(&self, other: &Self) -> Self {
        self.mul(other)
    }
    fn scale(&self, factor: &Rational) -> Self {
        self.scale_by(factor)
    }
}

impl Coefficient for Polynomial {
    fn zero_value() -> Self {
        Polynomial::zero(0)
    }
    fn one_value() -> Self {
        Polynomial::constant(0, Rational::one())
    }
    fn vanishes(&self) -> bool {
        self.terms.is_empty()
    }
    fn from_rational(r: Rational) -> Self {
        Polynomial::constant(0, r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn x(i: usize) -> Polynomial {
        Polynomial::var(2, i)
    }

    #[test]
    fn arithmetic_cancels_to_zero() {
        let p = x(0).add(&x(1));
        assert!(p.sub(&p).is_zero());
        assert_eq!(p.sub(&p).num_terms(), 0);
    }

    #[test]
    fn square_of_sum() {
        let p = x(0).add(&x(1)).pow(2);
        assert_eq!(p.coefficient(&Monomial::from_exponents(vec![1, 1])), int(2));
        assert_eq!(p.num_terms(), 3);
    }

    #[test]
    fn derivative_of_cubic() {
        let p = x(0).pow(3).mul(&x(1));
        assert_eq!(p.derivative(0), x(0).pow(2).mul(&x(1)).scale_by(&int(3)));
        assert!(p.derivative(0).derivative(0).derivative(0).derivative(0).is_zero());
        assert_eq!(p.derivative(1), x(0).pow(3));
    }

    #[test]
    fn eval_matches_direct() {
        let p = x(0).mul(&x(0)).add(&x(1).scale_by(&rat(1, 2)));
        assert_eq!(p.eval_rational(&[int(3), int(4)]), int(11));
    }

    #[test]
    fn render_is_readable() {
        let p = x(0)
            .sub(&x(1).mul(&x(0)).scale_by(&rat(3, 2)))
            .add(&Polynomial::constant(2, int(-2)));
        assert_eq!(p.render("d"), "-2 + d1 - 3/2*d1*d2");
        assert_eq!(Polynomial::zero(3).render("x"), "0");
    }

    #[test]
    fn shifted_moves_variables() {
        let q = Polynomial::var(1, 0).shifted(3, 2);
        assert_eq!(q, Polynomial::var(3, 2));
    }

    #[test]
    fn equality_ignores_declared_arity() {
        assert_eq!(Polynomial::constant(0, int(3)), Polynomial::constant(5, int(3)));
        assert_eq!(Polynomial::var(2, 1).add(&Polynomial::constant(0, int(1))).nvars(), 2);
    }

    #[test]
    fn graded_order_puts_low_indices_first() {
        let mut ms = vec![
            Monomial::squarefree(&[0, 1]),
            Monomial::var(1),
            Monomial::one(),
            Monomial::var(0),
        ];
        ms.sort_by(Monomial::graded_cmp);
        assert_eq!(
            ms,
            vec![Monomial::one(), Monomial::var(0), Monomial::var(1), Monomial::squarefree(&[0, 1])]
        );
    }
}
