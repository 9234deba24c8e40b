//! The degree-N reduction kernel pi_N(z, y) = 1/(z-y) - sum_i Q_i(y)/(z-A_i)
//! with Q_i the Lagrange basis polynomials over 2N-1 distinct nodes A_i.
//! The kernel has residue 1 at z = y and, as a function of y, differs from
//! 1/(z-y) by a polynomial of degree 2N-2, which is why reductions built on
//! it agree with the elementary one through the Ward identity.

use crate::error::{Error, Result};
use crate::exact::poly::{Poly, Var};
use crate::exact::ratfunc::RationalFunction;
use crate::exact::rational::{factorial, rat_i, Rational};
use num_traits::One;
use std::collections::HashMap;
use std::sync::Mutex;

pub struct ReductionKernel {
    n: u32,
    nodes: Vec<Rational>,
    zvar: Var,
    yvar: Var,
    pi: RationalFunction,
    /// divided derivatives d^{(i)}_z d^{(j)}_y pi, filled on demand
    derivs: Mutex<HashMap<(u32, u32), RationalFunction>>,
}

/// The default node set 0, 1, ..., 2N-2.
pub fn default_nodes(n: u32) -> Vec<Rational> {
    (0..2 * n - 1).map(|i| rat_i(i as i64)).collect()
}

impl ReductionKernel {
    pub fn new(n: u32, nodes: Vec<Rational>, zvar: Var, yvar: Var) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("kernel degree must be positive".to_string()));
        }
        if nodes.len() != (2 * n - 1) as usize {
            return Err(Error::BadKernelNodes { expected: (2 * n - 1) as usize, got: nodes.len() });
        }
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                if a == b {
                    return Err(Error::BadKernelNodes { expected: (2 * n - 1) as usize, got: i });
                }
            }
        }
        if zvar == yvar {
            return Err(Error::RepeatedPoint(zvar.name()));
        }
        let z = Poly::var(zvar);
        let y = Poly::var(yvar);
        let mut pi = RationalFunction::inv_poly(z.sub(&y))?;
        for (i, ai) in nodes.iter().enumerate() {
            let qi = lagrange_basis(&nodes, i, yvar);
            let pole = RationalFunction::inv_poly(z.sub(&Poly::constant(ai.clone())))?;
            pi = pi.sub(&RationalFunction::from_poly(qi).mul(&pole));
        }
        Ok(ReductionKernel { n, nodes, zvar, yvar, pi, derivs: Mutex::new(HashMap::new()) })
    }

    pub fn with_default_nodes(n: u32, zvar: Var, yvar: Var) -> Result<Self> {
        Self::new(n, default_nodes(n), zvar, yvar)
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn nodes(&self) -> &[Rational] {
        &self.nodes
    }

    pub fn pi(&self) -> &RationalFunction {
        &self.pi
    }

    pub fn vars(&self) -> (Var, Var) {
        (self.zvar, self.yvar)
    }

    /// The product realization (1/(z-y)) prod_l (y-A_l)/(z-A_l); equal to
    /// pi as a rational function.
    pub fn pi_product_form(&self) -> Result<RationalFunction> {
        let z = Poly::var(self.zvar);
        let y = Poly::var(self.yvar);
        let mut out = RationalFunction::inv_poly(z.sub(&y))?;
        for a in &self.nodes {
            let c = Poly::constant(a.clone());
            let num = RationalFunction::from_poly(y.sub(&c));
            let den = RationalFunction::inv_poly(z.sub(&c))?;
            out = out.mul(&num).mul(&den);
        }
        Ok(out)
    }

    /// f_{N,i,j} = (1/i!)(1/j!) d^i_z d^j_y pi_N, with the kernel variables
    /// renamed to the caller's (z, y) pair.
    pub fn f(&self, i: u32, j: u32, z: Var, y: Var) -> Result<RationalFunction> {
        let base = self.f_formal(i, j);
        // substitute in two steps through fresh names so z <-> y swaps work
        let tz = Var::new("$swap_z");
        let ty = Var::new("$swap_y");
        let mut out = base.substitute(self.zvar, &RationalFunction::var(tz))?;
        out = out.substitute(self.yvar, &RationalFunction::var(ty))?;
        out = out.substitute(tz, &RationalFunction::var(z))?;
        out.substitute(ty, &RationalFunction::var(y))
    }

    fn f_formal(&self, i: u32, j: u32) -> RationalFunction {
        if let Some(hit) = self.derivs.lock().unwrap().get(&(i, j)) {
            return hit.clone();
        }
        let mut cur = self.pi.clone();
        for _ in 0..i {
            cur = cur.derivative(self.zvar);
        }
        for _ in 0..j {
            cur = cur.derivative(self.yvar);
        }
        let scale = Rational::one() / (factorial(i) * factorial(j));
        cur = cur.scale(&scale);
        self.derivs.lock().unwrap().insert((i, j), cur.clone());
        cur
    }
}

/// The Lagrange basis polynomial over the given nodes: value 1 at nodes[i],
/// 0 at the others.
pub fn lagrange_basis(nodes: &[Rational], i: usize, var: Var) -> Poly {
    let y = Poly::var(var);
    let mut num = Poly::one();
    let mut den = Rational::one();
    for (l, a) in nodes.iter().enumerate() {
        if l == i {
            continue;
        }
        num = num.mul(&y.sub(&Poly::constant(a.clone())));
        den *= &nodes[i] - a;
    }
    num.scale(&(Rational::one() / den))
}

/// Sum of the Lagrange basis over all nodes; identically 1 for any node set.
pub fn lagrange_partition_of_unity(nodes: &[Rational], var: Var) -> Poly {
    let mut acc = Poly::zero();
    for i in 0..nodes.len() {
        acc = acc.add(&lagrange_basis(nodes, i, var));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::v;
    use crate::exact::rational::rat;

    #[test]
    fn degree_one_kernel() {
        // N = 1, A = (0): pi = 1/(z-y) - 1/z
        let (z, y) = (v("kz"), v("ky"));
        let k = ReductionKernel::new(1, vec![rat_i(0)], z, y).unwrap();
        let zp = Poly::var(z);
        let expect = RationalFunction::inv_poly(zp.sub(&Poly::var(y)))
            .unwrap()
            .sub(&RationalFunction::inv_poly(zp.clone()).unwrap());
        assert!(k.pi().eq_exact(&expect));
    }

    #[test]
    fn product_form_matches() {
        let (z, y) = (v("kz2"), v("ky2"));
        for n in 1..=3u32 {
            let k = ReductionKernel::with_default_nodes(n, z, y).unwrap();
            assert!(k.pi().eq_exact(&k.pi_product_form().unwrap()), "n={n}");
        }
        // a non-default node set as well
        let k = ReductionKernel::new(2, vec![rat_i(-1), rat_i(3), rat_i(7)], z, y).unwrap();
        assert!(k.pi().eq_exact(&k.pi_product_form().unwrap()));
    }

    #[test]
    fn residue_at_diagonal_is_one() {
        let (z, y) = (v("kz3"), v("ky3"));
        let k = ReductionKernel::with_default_nodes(2, z, y).unwrap();
        let dz = Poly::var(z).sub(&Poly::var(y));
        // multiply by (z-y) and evaluate at z = y
        let res = k.pi().mul(&RationalFunction::from_poly(dz)).substitute(
            z,
            &RationalFunction::var(y),
        );
        let res = res.unwrap();
        assert!(res.eq_exact(&RationalFunction::one()));
    }

    #[test]
    fn partition_of_unity() {
        let y = v("ky4");
        let nodes = vec![rat(1, 2), rat_i(-3), rat_i(5)];
        let s = lagrange_partition_of_unity(&nodes, y);
        assert_eq!(s, Poly::one());
    }

    #[test]
    fn node_validation() {
        let (z, y) = (v("kz5"), v("ky5"));
        assert!(ReductionKernel::new(2, vec![rat_i(0), rat_i(1)], z, y).is_err());
        assert!(ReductionKernel::new(2, vec![rat_i(0), rat_i(1), rat_i(1)], z, y).is_err());
    }

    #[test]
    fn divided_derivative_orders() {
        // f_{1,0,1} for the trivial-pole part: d_y (1/(z-y)) = 1/(z-y)^2 term visible
        let (z, y) = (v("kz6"), v("ky6"));
        let k = ReductionKernel::new(1, vec![rat_i(0)], z, y).unwrap();
        let f01 = k.f(0, 1, z, y).unwrap();
        let dz = Poly::var(z).sub(&Poly::var(y));
        let expect = RationalFunction::inv_poly(dz).unwrap().pow_i(2).unwrap();
        // pi_1 = 1/(z-y) - 1/z, the second term is y-constant
        assert!(f01.eq_exact(&expect));
    }
}
