//! Truncated multi-parameter power series in the sewing parameters.
//!
//! Exponents are stored in units of sigma_a = rho_a^{1/2}, one slot per
//! handle, so half-integer rho-powers are integers here. Exponents may go
//! negative transiently (residue recombinations divide by rho); the cutoff
//! bounds the total order from above and records how far the series is
//! trusted.

use crate::error::{Error, Result};
use crate::exact::rational::Rational;
use crate::exact::ratfunc::RationalFunction;
use num_complex::Complex64;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

pub trait Coeff: Clone + PartialEq {
    fn zero() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn mul(&self, other: &Self) -> Self;
}

impl Coeff for Rational {
    fn zero() -> Self {
        <Rational as Zero>::zero()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self.clone()
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

impl Coeff for RationalFunction {
    fn zero() -> Self {
        RationalFunction::zero()
    }
    fn is_zero(&self) -> bool {
        RationalFunction::is_zero(self)
    }
    fn add(&self, other: &Self) -> Self {
        RationalFunction::add(self, other)
    }
    fn neg(&self) -> Self {
        RationalFunction::neg(self)
    }
    fn mul(&self, other: &Self) -> Self {
        RationalFunction::mul(self, other)
    }
}

impl Coeff for Complex64 {
    fn zero() -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn is_zero(&self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
    fn add(&self, other: &Self) -> Self {
        self + other
    }
    fn neg(&self) -> Self {
        -self
    }
    fn mul(&self, other: &Self) -> Self {
        self * other
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedSeries<C> {
    /// Number of handles (exponent-vector length).
    pub gens: usize,
    /// Total sigma-order cutoff: terms of total order > max_sigma are not
    /// represented and are not known.
    pub max_sigma: i64,
    pub terms: BTreeMap<Vec<i32>, C>,
}

fn total(e: &[i32]) -> i64 {
    e.iter().map(|&x| x as i64).sum()
}

impl<C: Coeff> TruncatedSeries<C> {
    pub fn zero(gens: usize, max_sigma: i64) -> Self {
        TruncatedSeries { gens, max_sigma, terms: BTreeMap::new() }
    }

    pub fn constant(gens: usize, max_sigma: i64, c: C) -> Self {
        let mut s = Self::zero(gens, max_sigma);
        s.add_term(vec![0; gens], c);
        s
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Minimal total order among stored terms.
    pub fn valuation(&self) -> i64 {
        self.terms.keys().map(|e| total(e)).min().unwrap_or(i64::MAX / 4)
    }

    pub fn add_term(&mut self, e: Vec<i32>, c: C) {
        assert_eq!(e.len(), self.gens, "exponent arity");
        if c.is_zero() || total(&e) > self.max_sigma {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.terms.entry(e) {
            Entry::Vacant(en) => {
                en.insert(c);
            }
            Entry::Occupied(mut en) => {
                let s = en.get().add(&c);
                if s.is_zero() {
                    en.remove();
                } else {
                    *en.get_mut() = s;
                }
            }
        }
    }

    pub fn coeff(&self, e: &[i32]) -> C {
        self.terms.get(e).cloned().unwrap_or_else(C::zero)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.gens != other.gens {
            return Err(Error::config(format!("series arity mismatch: {} vs {}", self.gens, other.gens)));
        }
        if self.max_sigma != other.max_sigma {
            return Err(Error::CutoffMismatch(self.max_sigma, other.max_sigma));
        }
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        TruncatedSeries {
            gens: self.gens,
            max_sigma: self.max_sigma,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.neg())).collect(),
        }
    }

    pub fn scale(&self, c: &C) -> Self {
        if c.is_zero() {
            return Self::zero(self.gens, self.max_sigma);
        }
        TruncatedSeries {
            gens: self.gens,
            max_sigma: self.max_sigma,
            terms: self.terms.iter().map(|(e, k)| (e.clone(), k.mul(c))).collect(),
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.gens != other.gens {
            return Err(Error::config(format!("series arity mismatch: {} vs {}", self.gens, other.gens)));
        }
        // Knowledge horizon: the O(sigma^{c+1}) error of one factor meets the
        // valuation of the other, so the product is trusted through
        // min(c1 + v2, c2 + v1). An empty factor is all error from c+1 on.
        let v1 = if self.terms.is_empty() { self.max_sigma + 1 } else { self.valuation() };
        let v2 = if other.terms.is_empty() { other.max_sigma + 1 } else { other.valuation() };
        let horizon = (self.max_sigma + v2).min(other.max_sigma + v1);
        let mut out = Self::zero(self.gens, horizon);
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Vec<i32> = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1.mul(c2));
            }
        }
        Ok(out)
    }

    /// Multiplies by a sigma monomial; the knowledge horizon shifts with it.
    pub fn mul_sigma(&self, shift: &[i32]) -> Self {
        assert_eq!(shift.len(), self.gens);
        let ds = total(shift);
        let mut out = Self::zero(self.gens, self.max_sigma + ds);
        for (e, c) in &self.terms {
            let ne: Vec<i32> = e.iter().zip(shift).map(|(a, b)| a + b).collect();
            out.add_term(ne, c.clone());
        }
        out
    }

    /// Discards knowledge above `new_max`.
    pub fn truncated(&self, new_max: i64) -> Result<Self> {
        if new_max > self.max_sigma {
            return Err(Error::CutoffMismatch(self.max_sigma, new_max));
        }
        let mut out = Self::zero(self.gens, new_max);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    /// Sets sigma of handle `a` (0-based) to zero: positive powers drop,
    /// negative powers are poles and error out.
    pub fn set_sigma_zero(&self, a: usize) -> Result<Self> {
        let mut out = Self::zero(self.gens, self.max_sigma);
        for (e, c) in &self.terms {
            if e[a] > 0 {
                continue;
            }
            if e[a] < 0 {
                return Err(Error::NegativeRhoPower(a + 1));
            }
            out.add_term(e.clone(), c.clone());
        }
        Ok(out)
    }

    /// Removes the exponent slot of handle `a`; every term must already
    /// have exponent zero there.
    pub fn drop_gen(&self, a: usize) -> Result<Self> {
        let mut out = Self::zero(self.gens - 1, self.max_sigma);
        for (e, c) in &self.terms {
            if e[a] != 0 {
                return Err(Error::NegativeRhoPower(a + 1));
            }
            let ne: Vec<i32> = e.iter().enumerate().filter(|(i, _)| *i != a).map(|(_, x)| *x).collect();
            out.add_term(ne, c.clone());
        }
        Ok(out)
    }

    pub fn map_coeff<D: Coeff>(&self, mut f: impl FnMut(&C) -> D) -> TruncatedSeries<D> {
        let mut out = TruncatedSeries::<D>::zero(self.gens, self.max_sigma);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c));
        }
        out
    }

    pub fn try_map_coeff<D: Coeff, E>(
        &self,
        mut f: impl FnMut(&C) -> std::result::Result<D, E>,
    ) -> std::result::Result<TruncatedSeries<D>, E> {
        let mut out = TruncatedSeries::<D>::zero(self.gens, self.max_sigma);
        for (e, c) in &self.terms {
            out.add_term(e.clone(), f(c)?);
        }
        Ok(out)
    }
}

impl TruncatedSeries<Complex64> {
    /// Sums the series at given sigma values (sigma_a = a square root of
    /// rho_a, fixed consistently by the caller).
    pub fn eval_sigma(&self, sigma: &[Complex64]) -> Complex64 {
        assert_eq!(sigma.len(), self.gens);
        let mut acc = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (a, &ea) in e.iter().enumerate() {
                t *= sigma[a].powi(ea);
            }
            acc += t;
        }
        acc
    }
}

/// Canonical rho-monomial label for a sigma-exponent vector: "" for the
/// constant term, otherwise space-separated "rho<k>^<p>" with half-integer
/// powers rendered as "rho<k>^(p/2)".
pub fn sigma_key_string(e: &[i32]) -> String {
    let mut parts = Vec::new();
    for (a, &ea) in e.iter().enumerate() {
        if ea == 0 {
            continue;
        }
        let name = format!("rho{}", a + 1);
        if ea == 2 {
            parts.push(name);
        } else if ea % 2 == 0 {
            parts.push(format!("{name}^{}", ea / 2));
        } else {
            parts.push(format!("{name}^({ea}/2)"));
        }
    }
    parts.join(" ")
}

#[derive(Serialize, Deserialize)]
struct SeriesRepr<C> {
    gens: usize,
    max_sigma: i64,
    terms: Vec<(Vec<i32>, C)>,
}

impl<C: Coeff + Serialize> Serialize for TruncatedSeries<C> {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        SeriesRepr {
            gens: self.gens,
            max_sigma: self.max_sigma,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), c.clone())).collect(),
        }
        .serialize(ser)
    }
}

impl<'de, C: Coeff + Deserialize<'de>> Deserialize<'de> for TruncatedSeries<C> {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = SeriesRepr::<C>::deserialize(de)?;
        let mut out = TruncatedSeries::zero(r.gens, r.max_sigma);
        for (e, c) in r.terms {
            out.add_term(e, c);
        }
        Ok(out)
    }
}
