//! Noncommutative polynomials with exact complex-rational coefficients.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use nalgebra::DMatrix;
use num_complex::Complex64;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

pub type Coeff = num_complex::Complex<Rational64>;

pub fn real(r: Rational64) -> Coeff {
    Coeff::new(r, Rational64::zero())
}

pub fn int(n: i64) -> Coeff {
    real(Rational64::from_integer(n))
}

pub fn frac(n: i64, d: i64) -> Coeff {
    real(Rational64::new(n, d))
}

pub fn imag_unit() -> Coeff {
    Coeff::new(Rational64::zero(), Rational64::one())
}

pub fn to_complex64(c: &Coeff) -> Complex64 {
    let f = |r: &Rational64| *r.numer() as f64 / *r.denom() as f64;
    Complex64::new(f(&c.re), f(&c.im))
}

/// One operator in a word: a variable, possibly adjointed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub var: usize,
    pub adj: bool,
}

impl Letter {
    pub fn new(var: usize) -> Self {
        Letter { var, adj: false }
    }

    pub fn dagger(var: usize) -> Self {
        Letter { var, adj: true }
    }
}

/// A word of letters; the empty word is the identity. Ordered by degree,
/// then lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Monomial(pub Vec<Letter>);

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Monomial {
    pub fn identity() -> Self {
        Monomial(Vec::new())
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn concat(&self, other: &Monomial) -> Monomial {
        let mut w = self.0.clone();
        w.extend_from_slice(&other.0);
        Monomial(w)
    }

    /// Reversed word with adjoint flags flipped on non-Hermitian letters.
    pub fn adjoint(&self, hermitian: &[bool]) -> Monomial {
        Monomial(
            self.0
                .iter()
                .rev()
                .map(|l| Letter {
                    var: l.var,
                    adj: if hermitian[l.var] { false } else { !l.adj },
                })
                .collect(),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Coeff>,
}

impl Poly {
    pub fn zero() -> Self {
        Poly::default()
    }

    pub fn constant(c: Coeff) -> Self {
        Poly::term(Monomial::identity(), c)
    }

    pub fn one() -> Self {
        Poly::constant(int(1))
    }

    pub fn term(m: Monomial, c: Coeff) -> Self {
        let mut p = Poly::zero();
        p.add_term(m, c);
        p
    }

    pub fn monomial(m: Monomial) -> Self {
        Poly::term(m, int(1))
    }

    pub fn letter(l: Letter) -> Self {
        Poly::monomial(Monomial(vec![l]))
    }

    pub fn var(v: usize) -> Self {
        Poly::letter(Letter::new(v))
    }

    pub fn var_adj(v: usize) -> Self {
        Poly::letter(Letter::dagger(v))
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Coeff)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    pub fn coeff(&self, m: &Monomial) -> Coeff {
        self.terms.get(m).copied().unwrap_or_else(Coeff::zero)
    }

    pub fn add_term(&mut self, m: Monomial, c: Coeff) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            Entry::Vacant(e) => {
                e.insert(c);
            }
            Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.scale(int(-1)))
    }

    pub fn scale(&self, c: Coeff) -> Poly {
        let mut out = Poly::zero();
        for (m, v) in &self.terms {
            out.add_term(m.clone(), *v * c);
        }
        out
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (a, x) in &self.terms {
            for (b, y) in &other.terms {
                out.add_term(a.concat(b), *x * *y);
            }
        }
        out
    }

    pub fn adjoint(&self, hermitian: &[bool]) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            out.add_term(m.adjoint(hermitian), c.conj());
        }
        out
    }

    pub fn is_self_adjoint(&self, hermitian: &[bool]) -> bool {
        self.adjoint(hermitian) == *self
    }

    /// Whether every coefficient is real.
    pub fn is_real(&self) -> bool {
        self.terms.values().all(|c| c.im.is_zero())
    }

    pub fn variables(&self) -> impl Iterator<Item = usize> + '_ {
        self.terms.keys().flat_map(|m| m.0.iter().map(|l| l.var))
    }

    /// Replaces every letter by a polynomial.
    pub fn substitute(&self, f: &dyn Fn(Letter) -> Poly) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(*c);
            for &l in &m.0 {
                acc = acc.mul(&f(l));
            }
            out = out.add(&acc);
        }
        out
    }

    /// Value at concrete matrices, one per variable, of size `dim`.
    pub fn evaluate(&self, mats: &[DMatrix<Complex64>], dim: usize) -> DMatrix<Complex64> {
        let mut out = DMatrix::zeros(dim, dim);
        for (m, c) in &self.terms {
            let mut acc = DMatrix::identity(dim, dim) * to_complex64(c);
            for l in &m.0 {
                let x = &mats[l.var];
                acc = if l.adj { acc * x.adjoint() } else { acc * x };
            }
            out += acc;
        }
        out
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }
}

pub fn fmt_coeff(c: &Coeff) -> String {
    let r = |x: &Rational64| {
        if x.is_integer() {
            format!("{}", x.numer())
        } else {
            format!("{}/{}", x.numer(), x.denom())
        }
    };
    match (c.re.is_zero(), c.im.is_zero()) {
        (_, true) => r(&c.re),
        (true, false) => format!("{}i", r(&c.im)),
        (false, false) => {
            let sign = if c.im < Rational64::zero() { "-" } else { "+" };
            format!("({}{}{}i)", r(&c.re), sign, r(&c.im.abs()))
        }
    }
}

pub fn fmt_monomial(m: &Monomial, names: &[String]) -> String {
    if m.0.is_empty() {
        return "1".into();
    }
    m.0.iter()
        .map(|l| {
            let mut s = names[l.var].clone();
            if l.adj {
                s.push('\'');
            }
            s
        })
        .collect::<Vec<_>>()
        .join("*")
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return write!(f, "0");
        }
        for (i, (m, c)) in self.poly.terms.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", fmt_coeff(c), fmt_monomial(m, self.names))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cancellation_and_order() {
        let x = Poly::var(0);
        let y = Poly::var(1);
        let p = x.mul(&y).sub(&y.mul(&x));
        assert_eq!(p.len(), 2);
        assert!(p.add(&y.mul(&x)).sub(&x.mul(&y)).is_zero());
        let names = vec!["X".to_string(), "Y".to_string()];
        assert_eq!(p.display(&names).to_string(), "1*X*Y + -1*Y*X");
    }

    #[test]
    fn adjoint_of_product() {
        let herm = [false, true];
        let x = Poly::var(0).scale(imag_unit());
        let y = Poly::var(1).add(&Poly::one());
        let lhs = x.mul(&y).adjoint(&herm);
        let rhs = y.adjoint(&herm).mul(&x.adjoint(&herm));
        assert_eq!(lhs, rhs);
        assert_eq!(lhs.adjoint(&herm), x.mul(&y));
    }

    #[test]
    fn coefficients_print_exactly() {
        assert_eq!(fmt_coeff(&frac(1, 2)), "1/2");
        assert_eq!(
            fmt_coeff(&imag_unit().scale(Rational64::new(-1, 2))),
            "-1/2i"
        );
        assert_eq!(fmt_coeff(&(int(1) + imag_unit())), "(1+1i)");
    }
}
