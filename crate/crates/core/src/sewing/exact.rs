//! Exact-mode sewing entries: sigma-power monomials whose coefficients are
//! rational functions of symbolic circle centers w1, wm1, w2, wm2, ...
//! Built for the entrywise verification that the closed-form Atilde equals
//! the D-shifted moment matrix A, with every derivative taken symbolically.

use crate::error::{Error, Result};
use crate::exact::poly::{v, Poly, Var};
use crate::exact::ratfunc::RationalFunction;
use crate::exact::rational::{binom, rat_i, Rational};
use crate::exact::trunc::TruncatedSeries;
use crate::genus0::ReductionKernel;
use num_traits::One;

pub type SigmaEntry = TruncatedSeries<RationalFunction>;

pub struct ExactSewing {
    genus: usize,
    n: u32,
    cutoff: i64,
    kernel: ReductionKernel,
    wvars: Vec<(Var, Var)>,
}

/// Report of an entrywise matrix comparison.
#[derive(Debug)]
pub struct EntrywiseReport {
    pub entries: usize,
    pub failures: Vec<String>,
}

impl EntrywiseReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

impl ExactSewing {
    /// Symbolic system of the given genus and kernel degree; kernel nodes
    /// are the given rationals and `cutoff` bounds total sigma-order.
    pub fn new(genus: usize, n: u32, nodes: Vec<Rational>, cutoff: i64) -> Result<Self> {
        if genus == 0 {
            return Err(Error::config("genus must be positive".to_string()));
        }
        let kernel = ReductionKernel::new(n, nodes, v("$sew_z"), v("$sew_y"))?;
        let mut wvars = Vec::with_capacity(genus);
        for i in 1..=genus {
            wvars.push((v(&format!("w{i}")), v(&format!("wm{i}"))));
        }
        Ok(ExactSewing { genus, n, cutoff, kernel, wvars })
    }

    pub fn with_default_nodes(genus: usize, n: u32, cutoff: i64) -> Result<Self> {
        let nodes = (0..2 * n - 1).map(|i| rat_i(i as i64)).collect();
        Self::new(genus, n, nodes, cutoff)
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    /// Center variable of a signed slot.
    pub fn wvar(&self, a: i32) -> Var {
        let (p, m) = self.wvars[a.unsigned_abs() as usize - 1];
        if a > 0 {
            p
        } else {
            m
        }
    }

    fn check_slot(&self, a: i32) -> Result<()> {
        if a == 0 || a.unsigned_abs() as usize > self.genus {
            return Err(Error::config(format!("slot {a} out of range")));
        }
        Ok(())
    }

    fn monomial(&self, coeff: RationalFunction, powers: &[(i32, u32)]) -> Result<SigmaEntry> {
        let mut key = vec![0i32; self.genus];
        for &(slot, p) in powers {
            key[slot.unsigned_abs() as usize - 1] += p as i32;
        }
        // refuse rather than silently truncate: a dropped term would make
        // entrywise comparisons vacuous
        let total: i64 = key.iter().map(|&e| e as i64).sum();
        if total > self.cutoff {
            return Err(Error::config(format!(
                "sigma cutoff {} too small for an entry of order {total}",
                self.cutoff
            )));
        }
        let mut out = SigmaEntry::zero(self.genus, self.cutoff);
        out.add_term(key, coeff);
        Ok(out)
    }

    /// Closed-form Atilde entry at rows (a, m), columns (b, n).
    pub fn atilde_entry(&self, a: i32, m: u32, b: i32, nm: u32) -> Result<SigmaEntry> {
        self.check_slot(a)?;
        self.check_slot(b)?;
        if b == -a {
            return Ok(SigmaEntry::zero(self.genus, self.cutoff));
        }
        let pow = m + nm + 2 * self.n;
        let gap = Poly::var(self.wvar(-a)).sub(&Poly::var(self.wvar(b)));
        let mut c = RationalFunction::inv_poly(gap.pow(pow))?
            .scale(&binom(pow as i64 - 1, m as i64));
        if (m + self.n) % 2 == 1 {
            c = c.neg();
        }
        self.monomial(c, &[(a, m + 1), (b, nm + 2 * self.n - 1)])
    }

    /// Moment-matrix entry A_{ab}^{mn} with symbolic derivatives of the
    /// kernel; the paired-slot branch is carried by e_m^n.
    pub fn a_entry(&self, a: i32, m: u32, b: i32, nm: u32) -> Result<SigmaEntry> {
        self.check_slot(a)?;
        self.check_slot(b)?;
        let base = if b == -a {
            self.e_mn(m, nm, self.wvar(-a))?
        } else {
            self.kernel.f(m, nm, self.wvar(-a), self.wvar(b))?
        };
        if base.is_zero() {
            return Ok(SigmaEntry::zero(self.genus, self.cutoff));
        }
        let c = if self.n % 2 == 1 { base.neg() } else { base };
        self.monomial(c, &[(a, m + 1), (b, nm)])
    }

    /// (A D)_{ab}^{mn} = A_{ab}^{m, n+2N-1}; the sigma bookkeeping rides
    /// along with the shifted mode.
    pub fn ad_entry(&self, a: i32, m: u32, b: i32, nm: u32) -> Result<SigmaEntry> {
        self.a_entry(a, m, b, nm + 2 * self.n - 1)
    }

    /// e_m^n at a symbolic point: the divided derivative
    /// (1/m! 1/n!) d_z^m d_y^n of the polynomial part pi - 1/(z-y),
    /// restricted to the diagonal z = y and moved to `yv`.
    pub fn e_mn(&self, m: u32, nm: u32, yv: Var) -> Result<RationalFunction> {
        let (zk, yk) = self.kernel.vars();
        let pole = RationalFunction::inv_poly(Poly::var(zk).sub(&Poly::var(yk)))?;
        let mut g = self.kernel.pi().sub(&pole);
        for i in 1..=m {
            let s = Rational::one() / rat_i(i as i64);
            g = g.derivative(zk).scale(&s);
        }
        for j in 1..=nm {
            let s = Rational::one() / rat_i(j as i64);
            g = g.derivative(yk).scale(&s);
        }
        let g = g.substitute(zk, &RationalFunction::var(yk))?;
        g.substitute(yk, &RationalFunction::var(yv))
    }

    /// Entrywise comparison Atilde = A D over all slot pairs and modes
    /// below `modes`, the module's core cross-check.
    pub fn verify_atilde_equals_ad(&self, modes: u32) -> Result<EntrywiseReport> {
        let mut slots = Vec::new();
        for i in 1..=self.genus as i32 {
            slots.push(i);
            slots.push(-i);
        }
        let mut entries = 0;
        let mut failures = Vec::new();
        for &a in &slots {
            for &b in &slots {
                for m in 0..modes {
                    for nm in 0..modes {
                        entries += 1;
                        let lhs = self.atilde_entry(a, m, b, nm)?;
                        let rhs = self.ad_entry(a, m, b, nm)?;
                        if !lhs.sub(&rhs)?.is_zero() {
                            failures.push(format!("a={a} b={b} m={m} n={nm}"));
                        }
                    }
                }
            }
        }
        Ok(EntrywiseReport { entries, failures })
    }
}
