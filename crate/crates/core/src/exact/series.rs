//! Laurent expansion of rational functions at finite centers, variable
//! centers, or infinity, and formal residue extraction.
//!
//! A series is indexed by powers of the local parameter: `var - center` at a
//! finite or expression center, `1/var` at infinity.

use crate::error::{Error, Result};
use crate::exact::poly::{Poly, Var};
use crate::exact::rational::{rat_string, Rational};
use crate::exact::ratfunc::RationalFunction;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Center {
    Point(String),
    Expr(Poly),
    Infinity,
}

impl Center {
    pub fn point(r: Rational) -> Center {
        Center::Point(rat_string(&r))
    }

    pub fn var(x: Var) -> Center {
        Center::Expr(Poly::var(x))
    }

    fn as_poly(&self) -> Result<Poly> {
        match self {
            Center::Point(s) => Ok(Poly::constant(crate::exact::rational::rat_parse(s)?)),
            Center::Expr(p) => Ok(p.clone()),
            Center::Infinity => Err(Error::parse("infinity has no polynomial form")),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LaurentSeries {
    pub var: String,
    pub center: Center,
    /// Exponents of the local parameter with known coefficients run from
    /// `min_order` to `max_order` inclusive; absent keys are zero.
    pub min_order: i64,
    pub max_order: i64,
    pub coeffs: BTreeMap<i64, RationalFunction>,
}

impl LaurentSeries {
    pub fn coeff(&self, n: i64) -> RationalFunction {
        self.coeffs.get(&n).cloned().unwrap_or_else(RationalFunction::zero)
    }

    pub fn coeff_rational(&self, n: i64) -> Option<Rational> {
        self.coeff(n).as_constant()
    }

    /// Sums the truncated series at a rational value of the local parameter.
    pub fn resum(&self, t: &Rational) -> Result<RationalFunction> {
        let mut acc = RationalFunction::zero();
        for (e, c) in &self.coeffs {
            let tp = crate::exact::rational::rat_pow(t, *e)?;
            acc = acc.add(&c.scale(&tp));
        }
        Ok(acc)
    }
}

fn fresh_t(f: &RationalFunction) -> Var {
    let used = f.vars();
    for i in 0.. {
        let name = if i == 0 { "$t".to_string() } else { format!("$t{i}") };
        let cand = Var::new(&name);
        if !used.contains(&cand) {
            return cand;
        }
    }
    unreachable!()
}

/// Coefficients of `p` as a polynomial in `t`: index i holds the t^i part,
/// a polynomial in the remaining variables.
fn tvec(p: &Poly, t: Var) -> Vec<Poly> {
    let d = p.degree_in(t) as usize;
    let mut out = vec![Poly::zero(); d + 1];
    for (m, c) in &p.terms {
        let e = m.exp(t) as usize;
        let rest: Vec<(Var, u32)> = m.0.iter().filter(|(y, _)| *y != t).cloned().collect();
        out[e].add_term(crate::exact::poly::Monomial(rest), c.clone());
    }
    out
}

fn tvec_valuation(v: &[Poly]) -> usize {
    v.iter().position(|p| !p.is_zero()).unwrap_or(0)
}

fn series_mul(a: &[RationalFunction], b: &[RationalFunction], len: usize) -> Vec<RationalFunction> {
    let mut out = vec![RationalFunction::zero(); len];
    for (i, ai) in a.iter().enumerate().take(len) {
        if ai.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if i + j >= len {
                break;
            }
            if bj.is_zero() {
                continue;
            }
            out[i + j] = out[i + j].add(&ai.mul(bj));
        }
    }
    out
}

/// Multiplicative inverse of a power series with nonzero constant term.
fn series_inv(d: &[RationalFunction], len: usize) -> Result<Vec<RationalFunction>> {
    if d.is_empty() || d[0].is_zero() {
        return Err(Error::DivisionByZero);
    }
    let d0_inv = d[0].recip()?;
    let mut out = vec![RationalFunction::zero(); len];
    out[0] = d0_inv.clone();
    for m in 1..len {
        let mut acc = RationalFunction::zero();
        for i in 1..=m {
            if i < d.len() && !d[i].is_zero() && !out[m - i].is_zero() {
                acc = acc.add(&d[i].mul(&out[m - i]));
            }
        }
        out[m] = d0_inv.mul(&acc).neg();
    }
    Ok(out)
}

/// Laurent expansion of `f` in `var` about `center`, with coefficients kept
/// through local-parameter order `max_order`.
pub fn laurent_expand(
    f: &RationalFunction,
    var: Var,
    center: &Center,
    max_order: i64,
) -> Result<LaurentSeries> {
    let t = fresh_t(f);
    let g = match center {
        Center::Infinity => {
            f.substitute(var, &RationalFunction::inv_poly(Poly::var(t))?)?
        }
        _ => {
            let c = center.as_poly()?;
            if c.contains_var(var) {
                return Err(Error::UnknownVariable(var.name()));
            }
            f.substitute(var, &RationalFunction::from_poly(c.add(&Poly::var(t))))?
        }
    };
    if g.is_zero() {
        return Ok(LaurentSeries {
            var: var.name(),
            center: center.clone(),
            min_order: 0,
            max_order,
            coeffs: BTreeMap::new(),
        });
    }
    let num = tvec(g.numerator(), t);
    let den = tvec(&g.denominator(), t);
    let vn = tvec_valuation(&num) as i64;
    let vd = tvec_valuation(&den) as i64;
    let lead = vn - vd;
    if max_order < lead {
        return Ok(LaurentSeries {
            var: var.name(),
            center: center.clone(),
            min_order: lead,
            max_order,
            coeffs: BTreeMap::new(),
        });
    }
    let len = (max_order - lead + 1) as usize;
    let to_rf = |v: &[Poly], val: usize| -> Vec<RationalFunction> {
        v[val..]
            .iter()
            .take(len)
            .map(|p| RationalFunction::from_poly(p.clone()))
            .collect()
    };
    let num_reg = to_rf(&num, vn as usize);
    let den_reg = to_rf(&den, vd as usize);
    let inv = series_inv(&den_reg, len)?;
    let prod = series_mul(&num_reg, &inv, len);
    let mut coeffs = BTreeMap::new();
    for (i, c) in prod.into_iter().enumerate() {
        if !c.is_zero() {
            if c.vars().contains(&t) {
                return Err(Error::UnknownVariable(t.name()));
            }
            coeffs.insert(lead + i as i64, c);
        }
    }
    Ok(LaurentSeries {
        var: var.name(),
        center: center.clone(),
        min_order: lead,
        max_order,
        coeffs,
    })
}

/// Coefficient of `(var - center)^(-k-1)` in `f`: the formal residue of
/// `(var - center)^k f` with respect to the local parameter.
pub fn formal_residue(f: &RationalFunction, var: Var, center: &Center, k: i64) -> Result<RationalFunction> {
    let s = laurent_expand(f, var, center, -k - 1)?;
    Ok(s.coeff(-k - 1))
}
