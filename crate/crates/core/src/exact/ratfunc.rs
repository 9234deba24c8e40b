//! Rational functions: sparse numerator over a factored denominator.
//!
//! Denominators are kept as multisets of normalized polynomial factors
//! (lex-leading coefficient 1). Everything that arises here has denominators
//! built from differences of coordinates, so factored form keeps common
//! denominators small without any multivariate gcd. Cancellation is trial
//! exact division by the stored factors; full gcd reduction is never needed
//! because equality testing cross-multiplies.

use crate::error::{Error, Result};
use crate::exact::poly::{Poly, Var};
use crate::exact::rational::{rat_to_f64, Rational};
use num_complex::Complex64;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RationalFunction {
    num: Poly,
    /// scalar * product of factor^exp; factors normalized, non-constant.
    den_scalar: Rational,
    den_factors: BTreeMap<Poly, u32>,
}

impl RationalFunction {
    pub fn zero() -> Self {
        RationalFunction { num: Poly::zero(), den_scalar: Rational::one(), den_factors: BTreeMap::new() }
    }

    pub fn one() -> Self {
        RationalFunction::from_poly(Poly::one())
    }

    pub fn constant(c: Rational) -> Self {
        RationalFunction::from_poly(Poly::constant(c))
    }

    pub fn var(x: Var) -> Self {
        RationalFunction::from_poly(Poly::var(x))
    }

    pub fn from_poly(num: Poly) -> Self {
        RationalFunction { num, den_scalar: Rational::one(), den_factors: BTreeMap::new() }
    }

    pub fn from_num_den(num: Poly, den: Poly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::ZeroDenominator);
        }
        let (lead, norm) = den.normalize_leading();
        let mut den_factors = BTreeMap::new();
        if !norm.is_constant() {
            den_factors.insert(norm, 1);
        }
        let mut out = RationalFunction { num, den_scalar: lead, den_factors };
        out.cancel();
        Ok(out)
    }

    /// 1 / (linear or any polynomial), convenience for kernel building.
    pub fn inv_poly(den: Poly) -> Result<Self> {
        RationalFunction::from_num_den(Poly::one(), den)
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn numerator(&self) -> &Poly {
        &self.num
    }

    /// Expanded denominator polynomial.
    pub fn denominator(&self) -> Poly {
        let mut out = Poly::constant(self.den_scalar.clone());
        for (f, e) in &self.den_factors {
            out = out.mul(&f.pow(*e));
        }
        out
    }

    pub fn as_constant(&self) -> Option<Rational> {
        if self.den_factors.is_empty() {
            self.num.as_constant().map(|c| c / &self.den_scalar)
        } else {
            None
        }
    }

    pub fn as_poly(&self) -> Option<Poly> {
        if self.den_factors.is_empty() {
            Some(self.num.scale(&(Rational::one() / &self.den_scalar)))
        } else {
            None
        }
    }

    pub fn vars(&self) -> Vec<Var> {
        let mut set: std::collections::BTreeSet<Var> = self.num.vars().into_iter().collect();
        for f in self.den_factors.keys() {
            set.extend(f.vars());
        }
        set.into_iter().collect()
    }

    fn cancel(&mut self) {
        if self.num.is_zero() {
            self.den_scalar = Rational::one();
            self.den_factors.clear();
            return;
        }
        let factors: Vec<Poly> = self.den_factors.keys().cloned().collect();
        for f in factors {
            while *self.den_factors.get(&f).unwrap_or(&0) > 0 {
                match self.num.div_exact(&f) {
                    Some(q) => {
                        self.num = q;
                        let e = self.den_factors.get_mut(&f).unwrap();
                        *e -= 1;
                        if *e == 0 {
                            self.den_factors.remove(&f);
                        }
                    }
                    None => break,
                }
            }
        }
        // Fold numerator content into the scalar so repeated sums stay small.
        if !self.den_scalar.is_one() {
            let inv = Rational::one() / &self.den_scalar;
            self.num = self.num.scale(&inv);
            self.den_scalar = Rational::one();
        }
    }

    pub fn neg(&self) -> Self {
        RationalFunction {
            num: self.num.neg(),
            den_scalar: self.den_scalar.clone(),
            den_factors: self.den_factors.clone(),
        }
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return RationalFunction::zero();
        }
        RationalFunction {
            num: self.num.scale(c),
            den_scalar: self.den_scalar.clone(),
            den_factors: self.den_factors.clone(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return other.clone();
        }
        if other.is_zero() {
            return self.clone();
        }
        // lcm of factored denominators: per-factor max exponent.
        let mut lcm: BTreeMap<Poly, u32> = self.den_factors.clone();
        for (f, e) in &other.den_factors {
            let cur = lcm.entry(f.clone()).or_insert(0);
            *cur = (*cur).max(*e);
        }
        let cof = |den: &BTreeMap<Poly, u32>| -> Poly {
            let mut c = Poly::one();
            for (f, e) in &lcm {
                let have = den.get(f).copied().unwrap_or(0);
                if *e > have {
                    c = c.mul(&f.pow(*e - have));
                }
            }
            c
        };
        let n1 = self.num.scale(&(Rational::one() / &self.den_scalar)).mul(&cof(&self.den_factors));
        let n2 = other.num.scale(&(Rational::one() / &other.den_scalar)).mul(&cof(&other.den_factors));
        let mut out = RationalFunction { num: n1.add(&n2), den_scalar: Rational::one(), den_factors: lcm };
        out.cancel();
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return RationalFunction::zero();
        }
        let mut den_factors = self.den_factors.clone();
        for (f, e) in &other.den_factors {
            *den_factors.entry(f.clone()).or_insert(0) += e;
        }
        let mut out = RationalFunction {
            num: self.num.mul(&other.num),
            den_scalar: &self.den_scalar * &other.den_scalar,
            den_factors,
        };
        out.cancel();
        out
    }

    pub fn recip(&self) -> Result<Self> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        // New numerator: old denominator expanded. New denominator: old numerator.
        let den = self.denominator();
        let (lead, norm) = self.num.normalize_leading();
        let mut den_factors = BTreeMap::new();
        if !norm.is_constant() {
            den_factors.insert(norm, 1);
        }
        let mut out = RationalFunction { num: den, den_scalar: lead, den_factors };
        out.cancel();
        Ok(out)
    }

    pub fn div(&self, other: &Self) -> Result<Self> {
        Ok(self.mul(&other.recip()?))
    }

    pub fn pow_i(&self, e: i64) -> Result<Self> {
        let base = if e < 0 { self.recip()? } else { self.clone() };
        let mut out = RationalFunction::one();
        for _ in 0..e.unsigned_abs() {
            out = out.mul(&base);
        }
        Ok(out)
    }

    pub fn derivative(&self, x: Var) -> Self {
        // d(N / D) with D = s * prod F_i^{e_i}:
        //   N' / D  -  N * sum_i e_i F_i' / (F_i * D)
        let mut out = RationalFunction {
            num: self.num.derivative(x),
            den_scalar: self.den_scalar.clone(),
            den_factors: self.den_factors.clone(),
        };
        out.cancel();
        for (f, e) in &self.den_factors {
            let fp = f.derivative(x);
            if fp.is_zero() {
                continue;
            }
            let mut den_factors = self.den_factors.clone();
            *den_factors.get_mut(f).unwrap() += 1;
            let mut term = RationalFunction {
                num: self.num.mul(&fp).scale(&Rational::from_integer((*e).into())),
                den_scalar: self.den_scalar.clone(),
                den_factors,
            };
            term.cancel();
            out = out.sub(&term);
        }
        out
    }

    /// Substitutes a rational function for a variable.
    pub fn substitute(&self, x: Var, value: &RationalFunction) -> Result<Self> {
        // Numerator: N(x <- p/q) = N~ / q^{deg_x N}.
        let sub_poly = |p: &Poly| -> Result<RationalFunction> {
            let d = p.degree_in(x);
            if d == 0 {
                return Ok(RationalFunction::from_poly(p.clone()));
            }
            let vnum = value.num.clone();
            let vden = value.denominator();
            // Horner with homogenization: sum_e coeff_e * vnum^e * vden^{d-e}
            let mut by_exp: BTreeMap<u32, Poly> = BTreeMap::new();
            for (m, c) in &p.terms {
                let e = m.exp(x);
                let rest: Vec<(Var, u32)> = m.0.iter().filter(|(y, _)| *y != x).cloned().collect();
                by_exp
                    .entry(e)
                    .or_insert_with(Poly::zero)
                    .add_term(crate::exact::poly::Monomial(rest), c.clone());
            }
            let mut acc = Poly::zero();
            for (e, coeff) in by_exp {
                let t = coeff.mul(&vnum.pow(e)).mul(&vden.pow(d - e));
                acc = acc.add(&t);
            }
            RationalFunction::from_num_den(acc, vden.pow(d))
        };
        let mut out = sub_poly(&self.num)?;
        let scalar_inv = RationalFunction::constant(Rational::one() / &self.den_scalar);
        out = out.mul(&scalar_inv);
        for (f, e) in &self.den_factors {
            let fsub = sub_poly(f)?;
            if fsub.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            out = out.mul(&fsub.recip()?.pow_i(*e as i64)?);
        }
        Ok(out)
    }

    /// One-pass substitution y <- (a y + b)/(c y + d) applied to every
    /// listed variable at once. Equivalent to chaining `substitute` per
    /// variable, but each polynomial is expanded exactly once and the
    /// denominator stays factored, which matters on many-point correlators.
    pub fn substitute_mobius(
        &self,
        vars: &[Var],
        a: &Rational,
        b: &Rational,
        c: &Rational,
        d: &Rational,
    ) -> Result<RationalFunction> {
        if vars.is_empty() || self.is_zero() {
            return Ok(self.clone());
        }
        let lin_num: Vec<Poly> = vars
            .iter()
            .map(|x| Poly::var(*x).scale(a).add(&Poly::constant(b.clone())))
            .collect();
        let lin_den: Vec<Poly> = vars
            .iter()
            .map(|x| Poly::var(*x).scale(c).add(&Poly::constant(d.clone())))
            .collect();
        // expand p with every moved variable homogenized: the cleared
        // numerator plus the per-variable (c y + d) power that was cleared
        let expand = |p: &Poly| -> (Poly, Vec<u32>) {
            let degs: Vec<u32> = vars.iter().map(|x| p.degree_in(*x)).collect();
            let table = |base: &Poly, top: u32| -> Vec<Poly> {
                let mut t = vec![Poly::one()];
                for e in 1..=top as usize {
                    t.push(t[e - 1].mul(base));
                }
                t
            };
            let ta: Vec<Vec<Poly>> =
                (0..vars.len()).map(|k| table(&lin_num[k], degs[k])).collect();
            let tb: Vec<Vec<Poly>> =
                (0..vars.len()).map(|k| table(&lin_den[k], degs[k])).collect();
            let mut out = Poly::zero();
            for (m, coeff) in &p.terms {
                let rest: Vec<(Var, u32)> =
                    m.0.iter().filter(|(x, _)| !vars.contains(x)).cloned().collect();
                let mut term = Poly::zero();
                term.add_term(crate::exact::poly::Monomial(rest), coeff.clone());
                for (k, x) in vars.iter().enumerate() {
                    let e = m.exp(*x);
                    if e > 0 {
                        term = term.mul(&ta[k][e as usize]);
                    }
                    if degs[k] > e {
                        term = term.mul(&tb[k][(degs[k] - e) as usize]);
                    }
                }
                out = out.add(&term);
            }
            (out, degs)
        };
        let (new_num, num_degs) = expand(&self.num);
        // net power of (c y_k + d) once everything is cleared: positive
        // lands in the numerator, negative stays a denominator factor
        let mut net: Vec<i64> = num_degs.iter().map(|dg| -(*dg as i64)).collect();
        let mut den_scalar = self.den_scalar.clone();
        let mut den_factors: BTreeMap<Poly, u32> = BTreeMap::new();
        let push_factor =
            |den_scalar: &mut Rational, den_factors: &mut BTreeMap<Poly, u32>, f: Poly, e: u32| {
                let (lead, norm) = f.normalize_leading();
                let mut le = Rational::one();
                for _ in 0..e {
                    le = &le * &lead;
                }
                *den_scalar = &*den_scalar * &le;
                if !norm.is_constant() {
                    *den_factors.entry(norm).or_insert(0) += e;
                }
            };
        for (f, e) in &self.den_factors {
            let (fs, fdegs) = expand(f);
            if fs.is_zero() {
                return Err(Error::ZeroDenominator);
            }
            for (k, dg) in fdegs.iter().enumerate() {
                net[k] += (*e as i64) * (*dg as i64);
            }
            push_factor(&mut den_scalar, &mut den_factors, fs, *e);
        }
        let mut num = new_num;
        for (k, nk) in net.iter().enumerate() {
            if *nk > 0 {
                num = num.mul(&lin_den[k].pow(*nk as u32));
            } else if *nk < 0 {
                push_factor(&mut den_scalar, &mut den_factors, lin_den[k].clone(), (-*nk) as u32);
            }
        }
        let mut out = RationalFunction { num, den_scalar, den_factors };
        out.cancel();
        Ok(out)
    }

    /// Partial rational evaluation; variables absent from `assign` survive.
    pub fn eval(&self, assign: &BTreeMap<Var, Rational>) -> Result<Self> {
        let mut out = self.clone();
        for (xv, val) in assign {
            out = out.substitute(*xv, &RationalFunction::constant(val.clone()))?;
        }
        Ok(out)
    }

    pub fn eval_rational(&self, assign: &BTreeMap<Var, Rational>) -> Result<Rational> {
        let r = self.eval(assign)?;
        r.as_constant().ok_or_else(|| {
            let missing = r.vars().first().map(|v| v.name()).unwrap_or_default();
            Error::UnknownVariable(missing)
        })
    }

    pub fn eval_complex(&self, assign: &BTreeMap<Var, Complex64>) -> Result<Complex64> {
        let n = self.num.eval_complex(assign)?;
        let mut d = Complex64::new(rat_to_f64(&self.den_scalar), 0.0);
        for (f, e) in &self.den_factors {
            d *= f.eval_complex(assign)?.powi(*e as i32);
        }
        if d.norm() == 0.0 {
            return Err(Error::DivisionByZero);
        }
        Ok(n / d)
    }

    /// Exact equality by cross-multiplication, preceded by a cheap
    /// deterministic point check that rejects early when values differ.
    pub fn eq_exact(&self, other: &Self) -> bool {
        let vars: std::collections::BTreeSet<Var> =
            self.vars().into_iter().chain(other.vars()).collect();
        let assign: BTreeMap<Var, Rational> = vars
            .iter()
            .enumerate()
            .map(|(i, v)| {
                (*v, Rational::new((97 + 13 * i as i64).into(), (101 + 2 * i as i64).into()))
            })
            .collect();
        if let (Ok(a), Ok(b)) = (self.eval_rational(&assign), other.eval_rational(&assign)) {
            if a != b {
                return false;
            }
        }
        let lhs = self.num.scale(&(Rational::one() / &self.den_scalar)).mul(&other.denominator());
        let rhs = other.num.scale(&(Rational::one() / &other.den_scalar)).mul(&self.denominator());
        lhs == rhs
    }
}

impl fmt::Display for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den_factors.is_empty() && self.den_scalar.is_one() {
            return write!(f, "{}", self.num);
        }
        write!(f, "({}) / ({})", self.num, self.denominator())
    }
}

impl fmt::Debug for RationalFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct RfRepr {
    num: Poly,
    den: Poly,
}

impl Serialize for RationalFunction {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        RfRepr { num: self.num.clone(), den: self.denominator() }.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for RationalFunction {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let r = RfRepr::deserialize(de)?;
        RationalFunction::from_num_den(r.num, r.den).map_err(|e| D::Error::custom(e.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::v;
    use crate::exact::rational::{rat, rat_i};

    fn one_over(p: Poly) -> RationalFunction {
        RationalFunction::inv_poly(p).unwrap()
    }

    #[test]
    fn partial_fraction_identity() {
        // 1/(z-y) - 1/z == y / (z (z-y))
        let (z, y) = (v("z"), v("y"));
        let zy = Poly::var(z).sub(&Poly::var(y));
        let lhs = one_over(zy.clone()).sub(&one_over(Poly::var(z)));
        let rhs = RationalFunction::from_num_den(Poly::var(y), Poly::var(z).mul(&zy)).unwrap();
        assert!(lhs.eq_exact(&rhs));
    }

    #[test]
    fn cancellation_of_common_factors() {
        let (x, y) = (v("x"), v("y"));
        let xmy = Poly::var(x).sub(&Poly::var(y));
        // (x^2 - y^2) / (x - y) == x + y
        let f = RationalFunction::from_num_den(
            Poly::var(x).pow(2).sub(&Poly::var(y).pow(2)),
            xmy.clone(),
        )
        .unwrap();
        assert_eq!(f.as_poly().unwrap(), Poly::var(x).add(&Poly::var(y)));
        // multiplication cancels: (x-y) * 1/(x-y)^2 = 1/(x-y)
        let g = RationalFunction::from_poly(xmy.clone()).mul(&one_over(xmy.clone()).pow_i(2).unwrap());
        assert!(g.eq_exact(&one_over(xmy)));
    }

    #[test]
    fn derivative_quotient_rule() {
        let z = v("z");
        // d/dz 1/z^2 = -2/z^3
        let f = one_over(Poly::var(z)).pow_i(2).unwrap();
        let expected = one_over(Poly::var(z)).pow_i(3).unwrap().scale(&rat_i(-2));
        assert!(f.derivative(z).eq_exact(&expected));
    }

    #[test]
    fn substitution_then_evaluation_commutes() {
        let (z, y, t) = (v("z"), v("y"), v("t"));
        // f = (z + y) / (z - y), substitute z <- t/(1+t)
        let f = RationalFunction::from_num_den(
            Poly::var(z).add(&Poly::var(y)),
            Poly::var(z).sub(&Poly::var(y)),
        )
        .unwrap();
        let sub = RationalFunction::from_num_den(
            Poly::var(t),
            Poly::one().add(&Poly::var(t)),
        )
        .unwrap();
        let g = f.substitute(z, &sub).unwrap();
        let assign: BTreeMap<Var, Rational> =
            [(t, rat(1, 2)), (y, rat(1, 5))].into_iter().collect();
        let direct = g.eval_rational(&assign).unwrap();
        // z value = (1/2)/(3/2) = 1/3; f = (1/3 + 1/5)/(1/3 - 1/5) = (8/15)/(2/15) = 4
        assert_eq!(direct, rat_i(4));
    }

    #[test]
    fn json_round_trip() {
        let (z, y) = (v("z"), v("y"));
        let f = RationalFunction::from_num_den(
            Poly::var(y).scale(&rat(3, 7)),
            Poly::var(z).sub(&Poly::var(y)).pow(2).scale(&rat_i(2)),
        )
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        let g: RationalFunction = serde_json::from_str(&s).unwrap();
        assert!(f.eq_exact(&g));
        assert_eq!(s, serde_json::to_string(&g).unwrap());
    }

    #[test]
    fn simultaneous_mobius_substitution_matches_chained() {
        let x = v("smx");
        let y = v("smy");
        let z = v("smz");
        // f = (x^2 y + z) / ((x - y)^2 (y - z))
        let f = RationalFunction::from_num_den(
            Poly::var(x).pow(2).mul(&Poly::var(y)).add(&Poly::var(z)),
            Poly::var(x).sub(&Poly::var(y)).pow(2).mul(&Poly::var(y).sub(&Poly::var(z))),
        )
        .unwrap();
        let cases = [
            (rat_i(2), rat_i(-1), rat_i(3), rat_i(1)),
            (rat_i(1), rat_i(2), rat_i(0), rat_i(1)), // affine
            (rat_i(0), rat_i(1), rat_i(1), rat_i(0)), // inversion
        ];
        for (a, b, c, d) in cases {
            let map = |t: Var| {
                RationalFunction::from_num_den(
                    Poly::var(t).scale(&a).add(&Poly::constant(b.clone())),
                    Poly::var(t).scale(&c).add(&Poly::constant(d.clone())),
                )
                .unwrap()
            };
            for moved in [vec![x], vec![x, y], vec![x, y, z]] {
                let fast = f.substitute_mobius(&moved, &a, &b, &c, &d).unwrap();
                let mut slow = f.clone();
                for t in &moved {
                    slow = slow.substitute(*t, &map(*t)).unwrap();
                }
                assert!(fast.eq_exact(&slow), "{} moved vars", moved.len());
            }
        }
        // absent variable and empty list are no-ops
        let w = v("smw");
        assert!(f
            .substitute_mobius(&[w], &rat_i(2), &rat_i(1), &rat_i(1), &rat_i(1))
            .unwrap()
            .eq_exact(
                &f.substitute(w, &RationalFunction::var(w)).unwrap()
            ));
        assert!(f.substitute_mobius(&[], &rat_i(2), &rat_i(1), &rat_i(1), &rat_i(1)).unwrap().eq_exact(&f));
    }

    #[test]
    fn complex_evaluation_matches_rational() {
        let z = v("z");
        let f = RationalFunction::from_num_den(
            Poly::var(z).pow(2).add(&Poly::one()),
            Poly::var(z).sub(&Poly::constant(rat_i(2))),
        )
        .unwrap();
        let cr = f
            .eval_complex(&[(z, Complex64::new(3.0, 0.0))].into_iter().collect())
            .unwrap();
        let rr = f.eval_rational(&[(z, rat_i(3))].into_iter().collect()).unwrap();
        assert!((cr.re - rat_to_f64(&rr)).abs() < 1e-12);
        assert!(cr.im.abs() < 1e-12);
    }
}
