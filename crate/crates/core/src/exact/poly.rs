//! Sparse multivariate polynomials over the rationals.
//!
//! Variables are globally interned symbols, so polynomials built in
//! different parts of the tree compose without variable-set alignment.
//! Monomials store only the variables they actually use, sorted by symbol.

use crate::error::{Error, Result};
use crate::exact::rational::{rat_string, Rational};
use num_complex::Complex64;
use num_traits::{One, Zero};
use once_cell::sync::Lazy;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::RwLock;

struct Interner {
    names: Vec<String>,
    ids: HashMap<String, u32>,
}

static VARS: Lazy<RwLock<Interner>> = Lazy::new(|| {
    RwLock::new(Interner { names: Vec::new(), ids: HashMap::new() })
});

/// An interned variable symbol.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Var(pub u32);

impl Var {
    pub fn new(name: &str) -> Var {
        {
            let int = VARS.read().unwrap();
            if let Some(&id) = int.ids.get(name) {
                return Var(id);
            }
        }
        let mut int = VARS.write().unwrap();
        if let Some(&id) = int.ids.get(name) {
            return Var(id);
        }
        let id = int.names.len() as u32;
        int.names.push(name.to_string());
        int.ids.insert(name.to_string(), id);
        Var(id)
    }

    pub fn name(&self) -> String {
        VARS.read().unwrap().names[self.0 as usize].clone()
    }
}

pub fn v(name: &str) -> Var {
    Var::new(name)
}

/// Exponent vector, sorted by variable symbol, zero exponents omitted.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct Monomial(pub Vec<(Var, u32)>);

impl Monomial {
    pub fn one() -> Monomial {
        Monomial(Vec::new())
    }

    pub fn var(x: Var, e: u32) -> Monomial {
        if e == 0 {
            Monomial::one()
        } else {
            Monomial(vec![(x, e)])
        }
    }

    pub fn exp(&self, x: Var) -> u32 {
        self.0.iter().find(|(y, _)| *y == x).map(|(_, e)| *e).unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let mut out = Vec::with_capacity(self.0.len() + other.0.len());
        let (mut i, mut j) = (0, 0);
        while i < self.0.len() && j < other.0.len() {
            match self.0[i].0.cmp(&other.0[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(self.0[i]);
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(other.0[j]);
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((self.0[i].0, self.0[i].1 + other.0[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&self.0[i..]);
        out.extend_from_slice(&other.0[j..]);
        Monomial(out)
    }

    /// Quotient monomial if `other` divides `self`.
    pub fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Vec::with_capacity(self.0.len());
        let mut j = 0;
        for &(x, e) in &self.0 {
            let mut e = e;
            while j < other.0.len() && other.0[j].0 < x {
                return None; // divisor uses a variable self lacks at this point
            }
            if j < other.0.len() && other.0[j].0 == x {
                if other.0[j].1 > e {
                    return None;
                }
                e -= other.0[j].1;
                j += 1;
            }
            if e > 0 {
                out.push((x, e));
            }
        }
        if j < other.0.len() {
            return None;
        }
        Some(Monomial(out))
    }

    /// Pure lexicographic order by ascending symbol; a genuine monomial
    /// order (multiplication-compatible), used by exact division.
    pub fn cmp_lex(&self, other: &Monomial) -> std::cmp::Ordering {
        let (mut i, mut j) = (0, 0);
        loop {
            match (self.0.get(i), other.0.get(j)) {
                (None, None) => return std::cmp::Ordering::Equal,
                (Some(_), None) => return std::cmp::Ordering::Greater,
                (None, Some(_)) => return std::cmp::Ordering::Less,
                (Some(&(xa, ea)), Some(&(xb, eb))) => {
                    if xa == xb {
                        if ea != eb {
                            return ea.cmp(&eb);
                        }
                        i += 1;
                        j += 1;
                    } else if xa < xb {
                        // self has a positive power of an earlier variable
                        return std::cmp::Ordering::Greater;
                    } else {
                        return std::cmp::Ordering::Less;
                    }
                }
            }
        }
    }
}

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Default, Hash)]
pub struct Poly {
    pub terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero() -> Poly {
        Poly { terms: BTreeMap::new() }
    }

    pub fn one() -> Poly {
        Poly::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(Monomial::one(), c);
        }
        Poly { terms }
    }

    pub fn var(x: Var) -> Poly {
        let mut terms = BTreeMap::new();
        terms.insert(Monomial::var(x, 1), Rational::one());
        Poly { terms }
    }

    pub fn monomial(m: Monomial, c: Rational) -> Poly {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().0.is_empty())
    }

    /// The constant value if the polynomial is constant.
    pub fn as_constant(&self) -> Option<Rational> {
        if self.is_zero() {
            Some(Rational::zero())
        } else if self.is_constant() {
            Some(self.terms.values().next().unwrap().clone())
        } else {
            None
        }
    }

    pub fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
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
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn neg(&self) -> Poly {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect() }
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero();
        }
        Poly { terms: self.terms.iter().map(|(m, k)| (m.clone(), k * c)).collect() }
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = Poly::zero();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut out = Poly::one();
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                out = out.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        out
    }

    pub fn degree_in(&self, x: Var) -> u32 {
        self.terms.keys().map(|m| m.exp(x)).max().unwrap_or(0)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.total_degree()).max().unwrap_or(0)
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut set = std::collections::BTreeSet::new();
        for m in self.terms.keys() {
            for (x, _) in &m.0 {
                set.insert(*x);
            }
        }
        set.into_iter().collect()
    }

    pub fn contains_var(&self, x: Var) -> bool {
        self.terms.keys().any(|m| m.exp(x) > 0)
    }

    pub fn derivative(&self, x: Var) -> Poly {
        let mut out = Poly::zero();
        for (m, c) in &self.terms {
            let e = m.exp(x);
            if e == 0 {
                continue;
            }
            let mut reduced: Vec<(Var, u32)> = Vec::with_capacity(m.0.len());
            for &(y, k) in &m.0 {
                if y == x {
                    if k > 1 {
                        reduced.push((y, k - 1));
                    }
                } else {
                    reduced.push((y, k));
                }
            }
            out.add_term(Monomial(reduced), c * Rational::from_integer(e.into()));
        }
        out
    }

    /// Substitutes a polynomial for a variable.
    pub fn substitute(&self, x: Var, value: &Poly) -> Poly {
        // Horner in x: group terms by the exponent of x.
        let mut by_exp: BTreeMap<u32, Poly> = BTreeMap::new();
        for (m, c) in &self.terms {
            let e = m.exp(x);
            let rest = Monomial(m.0.iter().filter(|(y, _)| *y != x).cloned().collect());
            by_exp.entry(e).or_insert_with(Poly::zero).add_term(rest, c.clone());
        }
        let mut out = Poly::zero();
        let mut prev_exp = None;
        for (e, coeff) in by_exp.into_iter().rev() {
            if let Some(pe) = prev_exp {
                let gap: u32 = pe - e;
                out = out.mul(&value.pow(gap));
            }
            out = out.add(&coeff);
            prev_exp = Some(e);
        }
        if let Some(e) = prev_exp {
            out = out.mul(&value.pow(e));
        }
        out
    }

    /// Full or partial evaluation at rational points.
    pub fn eval(&self, assign: &BTreeMap<Var, Rational>) -> Poly {
        let mut out = self.clone();
        for (x, val) in assign {
            out = out.substitute(*x, &Poly::constant(val.clone()));
        }
        out
    }

    /// Evaluates at complex points; every variable must be assigned.
    pub fn eval_complex(&self, assign: &BTreeMap<Var, Complex64>) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, c) in &self.terms {
            let mut t = Complex64::new(super::rational::rat_to_f64(c), 0.0);
            for &(x, e) in &m.0 {
                let val = assign.get(&x).ok_or_else(|| Error::UnknownVariable(x.name()))?;
                t *= val.powi(e as i32);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Leading term in the pure-lex monomial order.
    fn leading(&self) -> Option<(&Monomial, &Rational)> {
        self.terms.iter().max_by(|(a, _), (b, _)| a.cmp_lex(b))
    }

    /// Exact division: returns `None` unless `divisor` divides `self`.
    pub fn div_exact(&self, divisor: &Poly) -> Option<Poly> {
        if divisor.is_zero() {
            return None;
        }
        if self.is_zero() {
            return Some(Poly::zero());
        }
        let (dm, dc) = {
            let (m, c) = divisor.leading().unwrap();
            (m.clone(), c.clone())
        };
        let mut rem = self.clone();
        let mut quot = Poly::zero();
        while !rem.is_zero() {
            let (lm, lc) = {
                let (m, c) = rem.leading().unwrap();
                (m.clone(), c.clone())
            };
            let qm = lm.div(&dm)?;
            let qc = lc / &dc;
            let qterm = Poly::monomial(qm, qc);
            rem = rem.sub(&qterm.mul(divisor));
            quot = quot.add(&qterm);
        }
        Some(quot)
    }

    /// Content: the positive rational c such that self/c has coprime integer
    /// coefficients; zero polynomial has content 0.
    pub fn content(&self) -> Rational {
        use num_bigint::BigInt;
        use num_integer::Integer;
        if self.is_zero() {
            return Rational::zero();
        }
        let mut num_gcd = BigInt::zero();
        let mut den_lcm = BigInt::one();
        for c in self.terms.values() {
            num_gcd = num_gcd.gcd(c.numer());
            den_lcm = den_lcm.lcm(c.denom());
        }
        Rational::new(num_gcd, den_lcm)
    }

    /// Normalizes so the lex-leading coefficient is 1; returns the factor
    /// pulled out, with `self = factor * normalized`.
    pub fn normalize_leading(&self) -> (Rational, Poly) {
        match self.leading() {
            None => (Rational::zero(), Poly::zero()),
            Some((_, c)) => {
                let c = c.clone();
                (c.clone(), self.scale(&(Rational::one() / c)))
            }
        }
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (m, c) in self.terms.iter().rev() {
            let cs = rat_string(c);
            let cs_out = if first {
                first = false;
                cs
            } else if let Some(stripped) = cs.strip_prefix('-') {
                write!(f, " - ")?;
                stripped.to_string()
            } else {
                write!(f, " + ")?;
                cs
            };
            if m.0.is_empty() {
                write!(f, "{cs_out}")?;
            } else {
                if cs_out != "1" {
                    write!(f, "{cs_out}*")?;
                }
                let mut mfirst = true;
                for (x, e) in &m.0 {
                    if !mfirst {
                        write!(f, "*")?;
                    }
                    mfirst = false;
                    if *e == 1 {
                        write!(f, "{}", x.name())?;
                    } else {
                        write!(f, "{}^{}", x.name(), e)?;
                    }
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct TermRepr {
    m: BTreeMap<String, u32>,
    c: String,
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let reprs: Vec<TermRepr> = self
            .terms
            .iter()
            .map(|(m, c)| TermRepr {
                m: m.0.iter().map(|(x, e)| (x.name(), *e)).collect(),
                c: rat_string(c),
            })
            .collect();
        reprs.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Poly, D::Error> {
        let reprs = Vec::<TermRepr>::deserialize(de)?;
        let mut out = Poly::zero();
        for t in reprs {
            let c = super::rational::rat_parse(&t.c).map_err(|e| D::Error::custom(e.to_string()))?;
            let mut m: Vec<(Var, u32)> = t.m.iter().map(|(n, e)| (Var::new(n), *e)).collect();
            m.sort();
            out.add_term(Monomial(m), c);
        }
        Ok(out)
    }
}
