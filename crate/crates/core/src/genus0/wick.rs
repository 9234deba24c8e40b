//! Free-field oracle for the genus-zero correlators: the insertion
//! a(-l_1)...a(-l_r)1 at y is the normally ordered product of the divided
//! derivatives d^{(l_t - 1)} a(y), and the correlator is the sum over
//! perfect matchings of all legs, excluding matchings within one insertion.
//! Two legs of orders p and q at points y and w contract to
//! (-1)^p (p+q+1)!/(p! q!) (y-w)^{-(p+q+2)}. This route never touches the
//! mode recursion, so it cross-checks the reduction engine independently.

use crate::error::Result;
use crate::exact::poly::{Poly, Var};
use crate::exact::ratfunc::RationalFunction;
use crate::exact::rational::{factorial, Rational};
use num_traits::One;

use super::{distinct_vars, Insertion};

fn contract(p: u32, q: u32, y: Var, w: Var) -> Result<RationalFunction> {
    let mut c = factorial(p + q + 1) / (factorial(p) * factorial(q));
    if p % 2 == 1 {
        c = -c;
    }
    let dz = Poly::var(y).sub(&Poly::var(w));
    Ok(RationalFunction::inv_poly(dz)?.pow_i((p + q + 2) as i64)?.scale(&c))
}

fn sum_matchings(legs: &[(usize, u32, Var)], used: &mut [bool]) -> Result<RationalFunction> {
    let first = (0..legs.len()).find(|&i| !used[i]);
    let Some(i) = first else {
        return Ok(RationalFunction::one());
    };
    used[i] = true;
    let mut acc = RationalFunction::zero();
    for j in i + 1..legs.len() {
        if used[j] || legs[j].0 == legs[i].0 {
            continue;
        }
        used[j] = true;
        let rest = sum_matchings(legs, used)?;
        if !rest.is_zero() {
            let pair = contract(legs[i].1, legs[j].1, legs[i].2, legs[j].2)?;
            acc = acc.add(&pair.mul(&rest));
        }
        used[j] = false;
    }
    used[i] = false;
    Ok(acc)
}

/// The n-point function by Wick contraction. Exact for every state of the
/// Fock space; general vectors are expanded multilinearly.
pub fn wick_npoint0(ins: &[Insertion]) -> Result<RationalFunction> {
    distinct_vars(ins)?;
    let mut acc = RationalFunction::zero();
    let mut stack: Vec<(usize, Rational, Vec<(usize, u32, Var)>)> =
        vec![(0, Rational::one(), Vec::new())];
    while let Some((slot, coeff, legs)) = stack.pop() {
        if slot == ins.len() {
            if legs.len() % 2 == 1 {
                continue;
            }
            let mut used = vec![false; legs.len()];
            let term = sum_matchings(&legs, &mut used)?;
            acc = acc.add(&term.scale(&coeff));
            continue;
        }
        for (b, c) in &ins[slot].state.0 {
            let mut l = legs.clone();
            for part in &b.0 {
                l.push((slot, part - 1, ins[slot].var));
            }
            stack.push((slot + 1, &coeff * c, l));
        }
    }
    Ok(acc)
}
