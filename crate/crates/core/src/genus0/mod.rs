//! Genus-zero correlation functions of the Heisenberg algebra, their
//! reduction to fewer insertions, Ward identities, Mobius covariance, and
//! the coboundary operator built from the reduction.
//!
//! An n-point function here is the rational function
//! <1', Y(v_1,y_1)...Y(v_n,y_n) 1> in the insertion variables. The engine
//! reduces the first insertion against the others with the elementary
//! kernel 1/(z-y); reductions against degree-N kernels, which differ by
//! Ward-identity terms, are separate entry points below.

use crate::error::{Error, Result};
use crate::exact::poly::{Poly, Var};
use crate::exact::ratfunc::RationalFunction;
use crate::exact::rational::{factorial, rat_i, Rational};
use crate::fock::{translate_pow, vertex_mode, BasisState, FockVector};
use num_traits::One;
use serde::Serialize;
use std::collections::HashMap;
use std::sync::Mutex;

mod kernel;
mod mobius;
mod wick;

pub use kernel::{lagrange_partition_of_unity, ReductionKernel};
pub use mobius::{mobius_state_twist, mobius_transport, MobiusMatrix};
pub use wick::wick_npoint0;

/// One field insertion: a state attached to a point symbol.
#[derive(Clone, Debug, PartialEq)]
pub struct Insertion {
    pub state: FockVector,
    pub var: Var,
}

impl Insertion {
    pub fn new(state: FockVector, var: Var) -> Self {
        Insertion { state, var }
    }
}

/// A correlation function together with the differential weights of its
/// points: the form value * prod dy_k^{weights[k]}.
#[derive(Clone, Debug, Serialize)]
pub struct CorrelationForm {
    #[serde(flatten)]
    pub value: RationalFunction,
    #[serde(skip)]
    pub points: Vec<Var>,
    pub weights: Vec<u32>,
}

/// The n-point engine. Caches reduced basis-state correlators; cheap to
/// share and safe to use from several threads.
#[derive(Default)]
pub struct Correlator {
    cache: Mutex<HashMap<Vec<(Var, BasisState)>, RationalFunction>>,
}

fn homogeneous_weight(state: &FockVector) -> Result<u32> {
    state
        .weight()
        .ok_or_else(|| Error::config("insertion state must be homogeneous".to_string()))
}

fn distinct_vars(ins: &[Insertion]) -> Result<()> {
    for (i, a) in ins.iter().enumerate() {
        for b in &ins[i + 1..] {
            if a.var == b.var {
                return Err(Error::RepeatedPoint(a.var.name()));
            }
        }
    }
    Ok(())
}

impl Correlator {
    pub fn new() -> Self {
        Self::default()
    }

    /// The n-point function as a bare rational function.
    pub fn npoint0_value(&self, ins: &[Insertion]) -> Result<RationalFunction> {
        distinct_vars(ins)?;
        for i in ins {
            if i.state.is_zero() {
                return Err(Error::config("zero state inserted".to_string()));
            }
        }
        let pts: Vec<(Var, &FockVector)> = ins.iter().map(|i| (i.var, &i.state)).collect();
        self.z_mixed(&pts)
    }

    /// The n-point correlation form; insertion states must be homogeneous so
    /// the differential weights are defined.
    pub fn npoint0(&self, ins: &[Insertion]) -> Result<CorrelationForm> {
        let mut weights = Vec::with_capacity(ins.len());
        for i in ins {
            weights.push(homogeneous_weight(&i.state)?);
        }
        Ok(CorrelationForm {
            value: self.npoint0_value(ins)?,
            points: ins.iter().map(|i| i.var).collect(),
            weights,
        })
    }

    /// Multilinear expansion of general states into cached basis tuples.
    fn z_mixed(&self, pts: &[(Var, &FockVector)]) -> Result<RationalFunction> {
        let mut acc = RationalFunction::zero();
        let mut stack: Vec<(usize, Rational, Vec<(Var, BasisState)>)> =
            vec![(0, Rational::one(), Vec::with_capacity(pts.len()))];
        while let Some((slot, coeff, tuple)) = stack.pop() {
            if slot == pts.len() {
                let term = self.z_basis(tuple)?;
                acc = acc.add(&term.scale(&coeff));
                continue;
            }
            for (b, c) in &pts[slot].1 .0 {
                let mut t = tuple.clone();
                t.push((pts[slot].0, b.clone()));
                stack.push((slot + 1, &coeff * c, t));
            }
        }
        Ok(acc)
    }

    /// Correlator of basis states, memoized. The tuple is canonicalized by
    /// sorting; the function is symmetric in its insertions.
    fn z_basis(&self, mut pts: Vec<(Var, BasisState)>) -> Result<RationalFunction> {
        // vacuum insertions contribute a factor 1
        pts.retain(|(_, b)| !b.is_empty());
        if pts.is_empty() {
            return Ok(RationalFunction::one());
        }
        if pts.len() == 1 {
            // one-point function of a positive-weight state
            return Ok(RationalFunction::zero());
        }
        pts.sort();
        if let Some(hit) = self.cache.lock().unwrap().get(&pts) {
            return Ok(hit.clone());
        }

        // reduce the first insertion u against each partner v_k:
        // Z(u,z;...) = sum_k sum_{j>=0} (z-y_k)^{-j-1} Z(..., u(j)v_k, ...)
        let (zv, u) = pts[0].clone();
        let uvec = FockVector::basis(u.clone());
        let mut acc = RationalFunction::zero();
        for k in 1..pts.len() {
            let (yv, vk) = pts[k].clone();
            let vvec = FockVector::basis(vk.clone());
            let jmax = (u.weight() + vk.weight()) as i64 - 1;
            let dz = Poly::var(zv).sub(&Poly::var(yv));
            for j in 0..=jmax {
                let hit = vertex_mode(&uvec, j, &vvec);
                if hit.is_zero() {
                    continue;
                }
                let mut sub: Vec<(Var, FockVector)> = Vec::with_capacity(pts.len() - 1);
                for (i, (v, b)) in pts.iter().enumerate() {
                    if i == 0 {
                        continue;
                    }
                    if i == k {
                        sub.push((*v, hit.clone()));
                    } else {
                        sub.push((*v, FockVector::basis(b.clone())));
                    }
                }
                let refs: Vec<(Var, &FockVector)> = sub.iter().map(|(v, f)| (*v, f)).collect();
                let inner = self.z_mixed(&refs)?;
                if inner.is_zero() {
                    continue;
                }
                let ker = RationalFunction::inv_poly(dz.clone())?.pow_i((j + 1) as i64)?;
                acc = acc.add(&ker.mul(&inner));
            }
        }
        self.cache.lock().unwrap().insert(pts, acc.clone());
        Ok(acc)
    }

    /// The reduction sum with a degree-N kernel: inserts the i-th
    /// translation descendant of the weight-N quasiprimary u at z via
    /// sum_k sum_j f_{N,i,j}(z, y_k) Z(..., u(j)v_k, ...). By the reduction
    /// identity this equals npoint0 with L(-1)^i u / i! prepended at z.
    pub fn zhu_reduce0(
        &self,
        u: &FockVector,
        i: u32,
        zv: Var,
        kernel: &ReductionKernel,
        ins: &[Insertion],
    ) -> Result<CorrelationForm> {
        if !crate::fock::is_quasiprimary(u) {
            return Err(Error::NotQuasiprimary);
        }
        let nu = homogeneous_weight(u)?;
        if nu != kernel.degree() {
            return Err(Error::WeightMismatch(nu as i64, kernel.degree() as i64));
        }
        distinct_vars(ins)?;
        if ins.iter().any(|x| x.var == zv) {
            return Err(Error::RepeatedPoint(zv.name()));
        }
        let mut acc = RationalFunction::zero();
        for (k, x) in ins.iter().enumerate() {
            let wv = x.state.max_weight();
            let jmax = (nu + wv) as i64 - 1;
            for j in 0..=jmax.max(0) {
                let hit = vertex_mode(u, j, &x.state);
                if hit.is_zero() {
                    continue;
                }
                let mut sub: Vec<Insertion> = ins.to_vec();
                sub[k] = Insertion::new(hit, x.var);
                let inner = self.npoint0_value(&sub)?;
                if inner.is_zero() {
                    continue;
                }
                let f = kernel.f(i, j as u32, zv, x.var)?;
                acc = acc.add(&f.mul(&inner));
            }
        }
        let mut weights = vec![nu + i];
        let mut points = vec![zv];
        for x in ins {
            weights.push(homogeneous_weight(&x.state)?);
            points.push(x.var);
        }
        Ok(CorrelationForm { value: acc, points, weights })
    }

    /// The Ward sum sum_k sum_{l} (d^l p / l!)(y_k) Z(..., u(l)v_k, ...) for
    /// a weight-N quasiprimary u and a polynomial p of degree <= 2N-2 in
    /// pvar. The returned function is identically zero when the identity
    /// holds.
    pub fn ward0_check(
        &self,
        u: &FockVector,
        p: &Poly,
        pvar: Var,
        ins: &[Insertion],
    ) -> Result<RationalFunction> {
        if !crate::fock::is_quasiprimary(u) {
            return Err(Error::NotQuasiprimary);
        }
        let nu = homogeneous_weight(u)?;
        let maxdeg = 2 * nu as i64 - 2;
        if (p.degree_in(pvar) as i64) > maxdeg {
            return Err(Error::config(format!(
                "polynomial degree {} exceeds 2N-2 = {}",
                p.degree_in(pvar),
                maxdeg
            )));
        }
        distinct_vars(ins)?;
        let mut acc = RationalFunction::zero();
        let mut dp = p.clone();
        let mut l = 0u32;
        while !dp.is_zero() {
            let scale = Rational::one() / factorial(l);
            for (k, x) in ins.iter().enumerate() {
                let hit = vertex_mode(u, l as i64, &x.state);
                if hit.is_zero() {
                    continue;
                }
                let weight = dp.substitute(pvar, &Poly::var(x.var)).scale(&scale);
                if weight.is_zero() {
                    continue;
                }
                let mut sub = ins.to_vec();
                sub[k] = Insertion::new(hit, x.var);
                let inner = self.npoint0_value(&sub)?;
                acc = acc.add(&RationalFunction::from_poly(weight).mul(&inner));
            }
            dp = dp.derivative(pvar);
            l += 1;
        }
        Ok(acc)
    }

    /// The genus-zero coboundary: the reduction operator adjoining one
    /// quasiprimary insertion at a fresh point, computed through the kernel
    /// sum rather than directly.
    pub fn coboundary0(
        &self,
        u: &FockVector,
        zv: Var,
        kernel: &ReductionKernel,
        ins: &[Insertion],
    ) -> Result<CorrelationForm> {
        self.zhu_reduce0(u, 0, zv, kernel, ins)
    }

    /// Applies two coboundaries in spirit: adjoins u at z, then reports the
    /// Ward combination of u' over the extended insertion list. The chain
    /// property of the coboundary rests exactly on this combination
    /// vanishing.
    pub fn chain0_diagnostic(
        &self,
        u: &FockVector,
        uprime: &FockVector,
        zv: Var,
        p: &Poly,
        pvar: Var,
        ins: &[Insertion],
    ) -> Result<RationalFunction> {
        let mut extended = vec![Insertion::new(u.clone(), zv)];
        extended.extend_from_slice(ins);
        self.ward0_check(uprime, p, pvar, &extended)
    }

    /// Mobius covariance, general states: the form of the twisted insertions
    /// at the mapped points. Equals the original form for any invertible
    /// rational matrix.
    pub fn mobius_apply0(&self, ins: &[Insertion], gamma: &MobiusMatrix) -> Result<CorrelationForm> {
        distinct_vars(ins)?;
        // twisted states carry rational-function prefactors in their own
        // point; expand each insertion into (prefactor, state) terms
        let mut parts: Vec<Vec<(RationalFunction, FockVector)>> = Vec::with_capacity(ins.len());
        for x in ins {
            parts.push(mobius_state_twist(gamma, &x.state, x.var)?);
        }
        // distribute, compute each correlator, substitute y_k -> gamma(y_k)
        let mut total = RationalFunction::zero();
        let mut idx = vec![0usize; ins.len()];
        loop {
            let mut coeff = RationalFunction::one();
            let mut sub: Vec<Insertion> = Vec::with_capacity(ins.len());
            for (k, x) in ins.iter().enumerate() {
                let (c, st) = &parts[k][idx[k]];
                coeff = coeff.mul(c);
                sub.push(Insertion::new(st.clone(), x.var));
            }
            let z = self.npoint0_value(&sub)?;
            let moved: Vec<Var> = ins.iter().map(|x| x.var).collect();
            let z = z.substitute_mobius(&moved, &gamma.a, &gamma.b, &gamma.c, &gamma.d)?;
            total = total.add(&coeff.mul(&z));
            // odometer over the twist terms
            let mut k = 0;
            loop {
                if k == ins.len() {
                    let mut weights = Vec::with_capacity(ins.len());
                    for x in ins {
                        weights.push(homogeneous_weight(&x.state)?);
                    }
                    return Ok(CorrelationForm {
                        value: total,
                        points: ins.iter().map(|x| x.var).collect(),
                        weights,
                    });
                }
                idx[k] += 1;
                if idx[k] < parts[k].len() {
                    break;
                }
                idx[k] = 0;
                k += 1;
            }
        }
    }
}

/// L(-1)^i u / i!, the state the kernel reduction with derivative order i
/// actually inserts.
pub fn translation_descendant(u: &FockVector, i: u32) -> FockVector {
    translate_pow(i, u)
}

/// Monomial basis 1, y, ..., y^{2N-2} admissible in the degree-N Ward sum.
pub fn ward_polynomials(n: u32, pvar: Var) -> Vec<Poly> {
    (0..=(2 * n).saturating_sub(2)).map(|d| Poly::var(pvar).pow(d)).collect()
}

pub fn rat_scale(f: &RationalFunction, c: i64) -> RationalFunction {
    f.scale(&rat_i(c))
}

#[cfg(test)]
mod tests;
