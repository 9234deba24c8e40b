//! Genus-g correlation series built from genus-zero data.
//!
//! A genus-g n-point function is a truncated expansion in the sewing
//! parameters rho_1..rho_g. Handle a contributes a dual pair of insertions:
//! a weight-k basis state b at the center w_a and rho_a^k times its dual at
//! w_{-a}, summed over k and over the weight-k basis. Cutting the total
//! weight at W makes each coefficient a finite sum of genus-zero correlation
//! values, hence an exact rational function of the centers and the insertion
//! points.
//!
//! Series keys count powers of sigma_a = rho_a^{1/2} to stay interoperable
//! with the sewing layer, so a basis tuple of weights (k_1..k_g) sits at key
//! (2k_1..2k_g) and a rho-cutoff W means max_sigma = 2W. Every operation
//! here produces integer rho powers; half-integer keys appear only inside
//! Ward coefficient shifts and cancel in the results.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_traits::One;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::poly::{v, Poly, Var};
use crate::exact::ratfunc::RationalFunction;
use crate::exact::rational::{factorial, rat_i, Rational};
use crate::exact::trunc::TruncatedSeries;
use crate::fock::{dual_basis_1, is_quasiprimary, vertex_mode, virasoro_mode, FockVector};
use crate::genus0::{translation_descendant, Correlator, Insertion};
use crate::schottky::{group_words, psi_poincare, theta_extract, BersKernel, SchottkyConfig};
use crate::sewing::{SewingParams, SewingSystem};

/// A genus-g correlation function: a sigma-truncated series whose
/// coefficients are rational functions of the handle centers and the
/// insertion points, plus the differential weights of those points. The
/// per-handle dw-weights vary term by term and are not tracked.
#[derive(Clone, Debug)]
pub struct GenusGFunction {
    pub series: TruncatedSeries<RationalFunction>,
    pub points: Vec<Var>,
    pub weights: Vec<u32>,
}

impl GenusGFunction {
    pub fn genus(&self) -> usize {
        self.series.gens
    }

    /// Coefficient at integer rho-orders (k_1..k_g).
    pub fn coeff_rho(&self, orders: &[u32]) -> RationalFunction {
        let key: Vec<i32> = orders.iter().map(|&k| 2 * k as i32).collect();
        self.series.coeff(&key)
    }

    /// Numeric value: sigma holds one square root of rho per handle, assign
    /// covers every variable appearing in the coefficients.
    pub fn eval(
        &self,
        sigma: &[Complex64],
        assign: &BTreeMap<Var, Complex64>,
    ) -> Result<Complex64> {
        let mut out = Complex64::new(0.0, 0.0);
        for (key, c) in &self.series.terms {
            let mut term = c.eval_complex(assign)?;
            for (h, &e) in key.iter().enumerate() {
                term *= sigma[h].powi(e);
            }
            out += term;
        }
        Ok(out)
    }

    /// rho_a <- 0 with the handle removed: the genus-(g-1) degeneration.
    pub fn degenerate(&self, handle: usize) -> Result<GenusGFunction> {
        Ok(GenusGFunction {
            series: self.series.set_sigma_zero(handle)?.drop_gen(handle)?,
            points: self.points.clone(),
            weights: self.weights.clone(),
        })
    }
}

/// Which numeric realization of Psi and Theta backs a reduction check.
#[derive(Clone, Copy, Debug)]
pub enum PsiSource {
    Poincare { max_word_len: usize },
    Sewing { modes: usize, neumann_order: usize },
}

/// Symbolic genus-g setup: one variable pair per handle plus a shared
/// genus-zero evaluator. Default names w1/wm1, w2/wm2, .. match the exact
/// sewing layer, so coefficients from both can be compared directly.
pub struct GenusContext {
    vars: Vec<(Var, Var)>,
    correlator: Correlator,
}

impl GenusContext {
    pub fn new(genus: usize) -> Result<Self> {
        let vars = (1..=genus)
            .map(|a| (v(&format!("w{a}")), v(&format!("wm{a}"))))
            .collect();
        Self::with_vars(vars)
    }

    /// Custom center variables, one (w_a, w_{-a}) pair per handle. Used when
    /// a degeneration must line up with a sub-surface's original names.
    pub fn with_vars(vars: Vec<(Var, Var)>) -> Result<Self> {
        if vars.is_empty() {
            return Err(Error::config("genus must be at least 1".to_string()));
        }
        Ok(GenusContext { vars, correlator: Correlator::new() })
    }

    pub fn genus(&self) -> usize {
        self.vars.len()
    }

    /// Center variable of slot a (positive or negative, 1-based).
    pub fn wvar(&self, a: i32) -> Var {
        let h = (a.unsigned_abs() as usize) - 1;
        if a > 0 {
            self.vars[h].0
        } else {
            self.vars[h].1
        }
    }

    fn check_insertions(&self, ins: &[Insertion]) -> Result<()> {
        for x in ins {
            for (p, m) in &self.vars {
                if x.var == *p || x.var == *m {
                    return Err(Error::RepeatedPoint(x.var.name()));
                }
            }
            if x.state.weight().is_none() {
                return Err(Error::config(
                    "insertion state must be homogeneous".to_string(),
                ));
            }
        }
        Ok(())
    }

    /// The genus-g partition function through rho-order `cutoff`.
    pub fn partition(&self, cutoff: u32) -> Result<GenusGFunction> {
        self.npoint(&[], cutoff)
    }

    /// The genus-g n-point function through rho-order `cutoff`.
    pub fn npoint(&self, ins: &[Insertion], cutoff: u32) -> Result<GenusGFunction> {
        let series = self.tuple_sum(ins, cutoff, 2 * cutoff as i64, None)?;
        Ok(GenusGFunction {
            series,
            points: ins.iter().map(|x| x.var).collect(),
            weights: ins.iter().map(|x| x.state.weight().unwrap()).collect(),
        })
    }

    /// The formal residue at slot a: the mode u(l) applied to the basis
    /// vector inserted there, keeping the dual pairing and rho powers of the
    /// underlying sum.
    pub fn residue(
        &self,
        u: &FockVector,
        l: u32,
        a: i32,
        ins: &[Insertion],
        cutoff: u32,
    ) -> Result<GenusGFunction> {
        let n = quasiprimary_weight(u)?;
        if l > 2 * n - 2 {
            return Err(Error::config(format!(
                "residue mode {l} out of range for weight {n}"
            )));
        }
        if a == 0 || a.unsigned_abs() as usize > self.genus() {
            return Err(Error::config(format!("slot {a} out of range")));
        }
        let slot_mod = SlotMod { handle: (a.unsigned_abs() as usize) - 1, minus: a < 0, u, l };
        let series = self.tuple_sum(ins, cutoff, 2 * cutoff as i64, Some(&slot_mod))?;
        Ok(GenusGFunction {
            series,
            points: ins.iter().map(|x| x.var).collect(),
            weights: ins.iter().map(|x| x.state.weight().unwrap()).collect(),
        })
    }

    /// Handle-at-a-time genus raising: attaches one dual-pair sum per handle
    /// in the given order, threading the remaining weight budget inward.
    /// Agrees with `npoint` exactly, for every ordering.
    pub fn level_raise(
        &self,
        order: &[usize],
        ins: &[Insertion],
        cutoff: u32,
    ) -> Result<GenusGFunction> {
        let g = self.genus();
        let mut seen = vec![false; g];
        for &h in order {
            if h >= g || seen[h] {
                return Err(Error::config(
                    "handle order must be a permutation".to_string(),
                ));
            }
            seen[h] = true;
        }
        if !seen.iter().all(|&s| s) {
            return Err(Error::config(
                "handle order must be a permutation".to_string(),
            ));
        }
        self.check_insertions(ins)?;
        let mut series = TruncatedSeries::zero(g, 2 * cutoff as i64);
        self.raise_rec(order, cutoff, ins.to_vec(), vec![0; g], &mut series)?;
        Ok(GenusGFunction {
            series,
            points: ins.iter().map(|x| x.var).collect(),
            weights: ins.iter().map(|x| x.state.weight().unwrap()).collect(),
        })
    }

    fn raise_rec(
        &self,
        order: &[usize],
        budget: u32,
        ins: Vec<Insertion>,
        key: Vec<i32>,
        out: &mut TruncatedSeries<RationalFunction>,
    ) -> Result<()> {
        let Some((&h, rest)) = order.split_first() else {
            out.add_term(key, self.correlator.npoint0_value(&ins)?);
            return Ok(());
        };
        for k in 0..=budget {
            for (b, dual) in dual_basis_1(k)? {
                let mut deeper = ins.clone();
                deeper.push(Insertion::new(FockVector::basis(b), self.vars[h].0));
                deeper.push(Insertion::new(dual, self.vars[h].1));
                let mut key2 = key.clone();
                key2[h] = 2 * k as i32;
                self.raise_rec(rest, budget - k, deeper, key2, out)?;
            }
        }
        Ok(())
    }

    /// The Mobius derivation for deg <= 2 polynomials p (in `pvar`): center
    /// transport, rho rescaling, the rho_a d/dw_{-a} cross term, and the
    /// insertion-point terms weighted by the conformal weights.
    pub fn mobius_apply(
        &self,
        p: &Poly,
        pvar: Var,
        f: &GenusGFunction,
    ) -> Result<GenusGFunction> {
        if p.degree_in(pvar) > 2 || p.vars().iter().any(|x| *x != pvar) {
            return Err(Error::config(
                "mobius polynomial must be univariate of degree <= 2".to_string(),
            ));
        }
        let g = self.genus();
        let mut out = TruncatedSeries::zero(g, f.series.max_sigma);
        let dp = p.derivative(pvar);
        let half_d2p = dp.derivative(pvar).scale(&(Rational::one() / rat_i(2)));
        for h in 0..g {
            for slot in [1 + h as i32, -1 - (h as i32)] {
                let wa = self.wvar(slot);
                let wma = self.wvar(-slot);
                let p_at = poly_at(p, pvar, wa);
                let dp_at = poly_at(&dp, pvar, wa);
                let d2p_at = poly_at(&half_d2p, pvar, wa);
                for (key, c) in &f.series.terms {
                    let moved = c.derivative(wa);
                    if !moved.is_zero() {
                        out.add_term(key.clone(), p_at.mul(&moved));
                    }
                    // rho_a d/d(rho_a) scales a term by its rho-order
                    let ord = key[h] / 2;
                    if ord != 0 {
                        out.add_term(key.clone(), dp_at.mul(c).scale(&rat_i(ord as i64)));
                    }
                    let cross = c.derivative(wma);
                    if !cross.is_zero() {
                        let mut key2 = key.clone();
                        key2[h] += 2;
                        out.add_term(key2, d2p_at.mul(&cross));
                    }
                }
            }
        }
        for (yv, wt) in f.points.iter().zip(&f.weights) {
            let p_at = poly_at(p, pvar, *yv);
            let dp_at = poly_at(&dp, pvar, *yv).scale(&rat_i(*wt as i64));
            for (key, c) in &f.series.terms {
                let moved = c.derivative(*yv);
                if !moved.is_zero() {
                    out.add_term(key.clone(), p_at.mul(&moved));
                }
                out.add_term(key.clone(), dp_at.mul(c));
            }
        }
        Ok(GenusGFunction { series: out, points: f.points.clone(), weights: f.weights.clone() })
    }

    /// Mobius residual of the n-point function: the derivation plus the
    /// (1/2) p'' L(1)-correction for non-quasiprimary insertions. Vanishes
    /// identically through the cutoff.
    pub fn mobius_check(
        &self,
        p: &Poly,
        pvar: Var,
        ins: &[Insertion],
        cutoff: u32,
    ) -> Result<GenusGFunction> {
        let f = self.npoint(ins, cutoff)?;
        let mut residual = self.mobius_apply(p, pvar, &f)?;
        let half_d2p = p
            .derivative(pvar)
            .derivative(pvar)
            .scale(&(Rational::one() / rat_i(2)));
        for (k, x) in ins.iter().enumerate() {
            let raised = virasoro_mode(1, &x.state);
            if raised.is_zero() {
                continue;
            }
            let mut ins2 = ins.to_vec();
            ins2[k] = Insertion::new(raised, x.var);
            let corr = self.npoint(&ins2, cutoff)?;
            let c_at = poly_at(&half_d2p, pvar, x.var);
            residual.series = residual.series.add(&corr.series.scale(&c_at))?;
        }
        Ok(residual)
    }

    /// Ward residual for quasiprimary u of weight N and deg <= 2N-2
    /// polynomial p: the p_a^l-weighted slot residues minus the
    /// derivative-of-p-weighted mode insertions at the y's. The slot side
    /// shifts rho-orders by N-1-l, so the sum is assembled at an internal
    /// cutoff of `cutoff` + N - 1 and truncated after cancellation.
    pub fn ward_check(
        &self,
        u: &FockVector,
        p: &Poly,
        pvar: Var,
        ins: &[Insertion],
        cutoff: u32,
    ) -> Result<GenusGFunction> {
        let n = quasiprimary_weight(u)?;
        if p.degree_in(pvar) > 2 * n - 2 || p.vars().iter().any(|x| *x != pvar) {
            return Err(Error::config(format!(
                "ward polynomial degree must be at most {}",
                2 * n - 2
            )));
        }
        self.check_insertions(ins)?;
        let g = self.genus();
        let inner = cutoff + n - 1;
        let max2 = 2 * inner as i64;
        // every piece is complete at least to 2*cutoff after its rho-shift,
        // so the residual is accumulated there
        let out2 = 2 * cutoff as i64;
        let mut acc = TruncatedSeries::zero(g, out2);
        let sign = if n % 2 == 0 { rat_i(-1) } else { rat_i(1) };
        for a in 1..=g as i32 {
            for l in 0..=(2 * n - 2) {
                let slot_mod = SlotMod { handle: (a as usize) - 1, minus: false, u, l };
                let res = self.tuple_sum(ins, inner, max2, Some(&slot_mod))?;
                if res.is_zero() {
                    continue;
                }
                // (-1)^{N+1} rho_a^{N-1-l} p^{(2N-2-l)}(w_{-a})/(2N-2-l)!
                let lead = divided_derivative(p, pvar, 2 * n - 2 - l);
                let lead_at = poly_at(&lead, pvar, self.wvar(-a)).scale(&sign);
                let shifted =
                    shift_handle(&res.scale(&lead_at), (a as usize) - 1, 2 * (n as i32 - 1 - l as i32));
                acc = acc.add(&shifted.truncated(out2)?)?;
                // -p^{(l)}(w_a)/l!
                let tail = divided_derivative(p, pvar, l);
                let tail_at = poly_at(&tail, pvar, self.wvar(a)).neg();
                acc = acc.add(&res.scale(&tail_at).truncated(out2)?)?;
            }
        }
        for (k, x) in ins.iter().enumerate() {
            for l in 0..=(2 * n - 2) {
                let moved = vertex_mode(u, l as i64, &x.state);
                if moved.is_zero() {
                    continue;
                }
                let mut ins2 = ins.to_vec();
                ins2[k] = Insertion::new(moved, x.var);
                let f2 = self.tuple_sum(&ins2, inner, max2, None)?;
                let c_at = poly_at(&divided_derivative(p, pvar, l), pvar, x.var);
                acc = acc.sub(&f2.scale(&c_at).truncated(out2)?)?;
            }
        }
        Ok(GenusGFunction {
            series: acc,
            points: ins.iter().map(|x| x.var).collect(),
            weights: ins.iter().map(|x| x.state.weight().unwrap()).collect(),
        })
    }

    /// Coboundary: adjoins u at z. The vacuum acts as the identity on the
    /// value; general states extend the insertion list.
    pub fn coboundary(
        &self,
        u: &FockVector,
        zv: Var,
        ins: &[Insertion],
        cutoff: u32,
    ) -> Result<GenusGFunction> {
        let mut extended = vec![Insertion::new(u.clone(), zv)];
        extended.extend_from_slice(ins);
        self.npoint(&extended, cutoff)
    }

    /// Two coboundaries in sequence reduce to the Ward combination of the
    /// second state over the extended insertion list; its vanishing is the
    /// chain property.
    pub fn chain_diagnostic(
        &self,
        u: &FockVector,
        uprime: &FockVector,
        zv: Var,
        p: &Poly,
        pvar: Var,
        ins: &[Insertion],
        cutoff: u32,
    ) -> Result<GenusGFunction> {
        let mut extended = vec![Insertion::new(u.clone(), zv)];
        extended.extend_from_slice(ins);
        self.ward_check(uprime, p, pvar, &extended, cutoff)
    }

    /// Core sum over basis tuples: for each weight vector within the cutoff,
    /// the cartesian product of per-handle dual bases, each tuple evaluated
    /// as one genus-zero correlator. Tuples run in parallel; the reduction
    /// order is fixed by the enumeration, so results are reproducible.
    fn tuple_sum(
        &self,
        ins: &[Insertion],
        cutoff: u32,
        max2: i64,
        slot_mod: Option<&SlotMod>,
    ) -> Result<TruncatedSeries<RationalFunction>> {
        self.check_insertions(ins)?;
        let g = self.genus();
        let mut bases = Vec::with_capacity(cutoff as usize + 1);
        for k in 0..=cutoff {
            bases.push(dual_basis_1(k)?);
        }
        let mut out = TruncatedSeries::zero(g, max2);
        for kvec in weight_vectors(g, cutoff) {
            let tuples = cartesian(&kvec.iter().map(|&k| bases[k as usize].len()).collect::<Vec<_>>());
            let vals: Vec<RationalFunction> = tuples
                .par_iter()
                .map(|choice| -> Result<RationalFunction> {
                    let mut full = ins.to_vec();
                    for (h, (&k, &bi)) in kvec.iter().zip(choice).enumerate() {
                        let (b, dual) = &bases[k as usize][bi];
                        let mut plus = FockVector::basis(b.clone());
                        let mut minus = dual.clone();
                        if let Some(m) = slot_mod {
                            if m.handle == h {
                                let target = if m.minus { &minus } else { &plus };
                                let moved = vertex_mode(m.u, m.l as i64, target);
                                if moved.is_zero() {
                                    return Ok(RationalFunction::zero());
                                }
                                if m.minus {
                                    minus = moved;
                                } else {
                                    plus = moved;
                                }
                            }
                        }
                        full.push(Insertion::new(plus, self.vars[h].0));
                        full.push(Insertion::new(minus, self.vars[h].1));
                    }
                    self.correlator.npoint0_value(&full)
                })
                .collect::<Result<Vec<_>>>()?;
            let mut total = RationalFunction::zero();
            for val in vals {
                total = total.add(&val);
            }
            let key: Vec<i32> = kvec.iter().map(|&k| 2 * k as i32).collect();
            out.add_term(key, total);
        }
        Ok(out)
    }
}

struct SlotMod<'a> {
    handle: usize,
    minus: bool,
    u: &'a FockVector,
    l: u32,
}

fn quasiprimary_weight(u: &FockVector) -> Result<u32> {
    let n = u
        .weight()
        .ok_or_else(|| Error::config("state must be homogeneous".to_string()))?;
    if n == 0 || !is_quasiprimary(u) {
        return Err(Error::config(
            "state must be quasiprimary of positive weight".to_string(),
        ));
    }
    Ok(n)
}

fn poly_at(p: &Poly, pvar: Var, x: Var) -> RationalFunction {
    RationalFunction::from_poly(p.substitute(pvar, &Poly::var(x)))
}

fn divided_derivative(p: &Poly, pvar: Var, order: u32) -> Poly {
    let mut q = p.clone();
    for _ in 0..order {
        q = q.derivative(pvar);
    }
    q.scale(&(Rational::one() / factorial(order)))
}

fn shift_handle(
    s: &TruncatedSeries<RationalFunction>,
    handle: usize,
    dsigma: i32,
) -> TruncatedSeries<RationalFunction> {
    let mut shift = vec![0; s.gens];
    shift[handle] = dsigma;
    s.mul_sigma(&shift)
}

/// All weight vectors of length g with the given total ceiling.
fn weight_vectors(g: usize, total: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = vec![0u32; g];
    fn rec(h: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if h == cur.len() {
            out.push(cur.clone());
            return;
        }
        for k in 0..=left {
            cur[h] = k;
            rec(h + 1, left - k, cur, out);
        }
        cur[h] = 0;
    }
    rec(0, total, &mut cur, &mut out);
    out
}

fn cartesian(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &s in sizes {
        let mut next = Vec::with_capacity(out.len() * s);
        for base in &out {
            for i in 0..s {
                let mut row = base.clone();
                row.push(i);
                next.push(row);
            }
        }
        out = next;
    }
    out
}

/// One sampled comparison of the genus-g reduction identity.
#[derive(Clone, Debug)]
pub struct ZhuSample {
    pub lhs: Complex64,
    pub rhs: Complex64,
    pub abs_err: f64,
    pub rel_err: f64,
}

/// Outcome of a sampled genus-g reduction check.
#[derive(Clone, Debug)]
pub struct ZhuReport {
    pub weight: u32,
    pub derivative_order: u32,
    pub samples: Vec<ZhuSample>,
    pub max_rel_err: f64,
    pub max_tail: f64,
    pub tolerance: f64,
    /// Set when the Psi truncation estimate eats into the tolerance; the
    /// comparison is then inconclusive rather than failed.
    pub tail_flag: bool,
    pub pass: bool,
}

/// Checks the genus-g reduction identity at sampled numeric points: the
/// series with the i-th translation descendant of u adjoined at z against
/// the Theta-weighted slot residues plus the Psi-derivative-weighted mode
/// insertions. The correlation side is exact in rho and evaluated at the
/// config's parameters; Psi and Theta come from the chosen numeric lane.
#[allow(clippy::too_many_arguments)]
pub fn zhu_reduce_g(
    ctx: &GenusContext,
    config: &SchottkyConfig,
    kernel: &BersKernel,
    source: PsiSource,
    u: &FockVector,
    i: u32,
    zv: Var,
    ins: &[Insertion],
    cutoff: u32,
    samples: &[BTreeMap<Var, Complex64>],
    tolerance: f64,
) -> Result<ZhuReport> {
    let g = ctx.genus();
    if config.handles.len() != g {
        return Err(Error::config("config genus does not match context".to_string()));
    }
    let n = quasiprimary_weight(u)?;
    if kernel.degree() != n {
        return Err(Error::config(format!(
            "kernel degree {} does not match state weight {n}",
            kernel.degree()
        )));
    }

    // exact side: LHS series and the residue/mode-insertion series
    let mut lhs_ins = vec![Insertion::new(translation_descendant(u, i), zv)];
    lhs_ins.extend_from_slice(ins);
    let lhs = ctx.npoint(&lhs_ins, cutoff)?;

    // Theta^l carries sigma_a^{-l} (down to rho^{1-N}), so the residue
    // series must extend N-1 shells past the requested order for the
    // Theta-weighted products to be complete through it
    let inner = cutoff + n - 1;
    let mut residues = Vec::new();
    for a in 1..=g as i32 {
        for l in 0..=(2 * n - 2) {
            residues.push((a, l, ctx.residue(u, l, a, ins, inner)?));
        }
    }
    let mut mode_terms = Vec::new();
    for (k, x) in ins.iter().enumerate() {
        let j_max = x.state.weight().unwrap() + n - 1;
        for j in 0..=j_max {
            let moved = vertex_mode(u, j as i64, &x.state);
            if moved.is_zero() {
                continue;
            }
            let mut ins2 = ins.to_vec();
            ins2[k] = Insertion::new(moved, x.var);
            mode_terms.push((x.var, j, ctx.npoint(&ins2, cutoff)?));
        }
    }

    // numeric side
    let words;
    let sewing;
    match source {
        PsiSource::Poincare { max_word_len } => {
            words = Some(group_words(config, max_word_len));
            sewing = None;
        }
        PsiSource::Sewing { modes, neumann_order } => {
            words = None;
            sewing = Some(SewingSystem::new(config, kernel, SewingParams::new(modes, neumann_order))?);
        }
    }

    let sigma: Vec<Complex64> = config.handles.iter().map(|h| h.rho.sqrt()).collect();
    let mut base_assign = BTreeMap::new();
    for (h, handle) in config.handles.iter().enumerate() {
        base_assign.insert(ctx.vars[h].0, handle.w_plus);
        base_assign.insert(ctx.vars[h].1, handle.w_minus);
    }

    let mut out_samples = Vec::with_capacity(samples.len());
    let mut max_rel = 0.0f64;
    let mut max_tail = 0.0f64;
    for sample in samples {
        let mut assign = base_assign.clone();
        for (var, val) in sample {
            assign.insert(*var, *val);
        }
        let z = *assign
            .get(&zv)
            .ok_or_else(|| Error::config("sample must assign the reduction point".to_string()))?;

        let lhs_val = lhs.eval(&sigma, &assign)?;
        let mut rhs = Complex64::new(0.0, 0.0);

        for a in 1..=g {
            let theta = theta_dd(config, kernel, words.as_deref(), sewing.as_ref(), a, i, z)?;
            for (slot, l, res) in &residues {
                if *slot == a as i32 {
                    rhs += theta[*l as usize] * res.eval(&sigma, &assign)?;
                }
            }
        }
        for (yvar, j, f) in &mode_terms {
            let y = *assign
                .get(yvar)
                .ok_or_else(|| Error::config("sample must assign every insertion point".to_string()))?;
            let (psi, tail) = psi_dd_value(kernel, words.as_deref(), sewing.as_ref(), i, *j, z, y)?;
            max_tail = max_tail.max(tail);
            rhs += psi * f.eval(&sigma, &assign)?;
        }

        let abs_err = (lhs_val - rhs).norm();
        let scale = lhs_val.norm().max(rhs.norm());
        let rel_err = if scale > 1e-12 { abs_err / scale } else { abs_err };
        max_rel = max_rel.max(rel_err);
        out_samples.push(ZhuSample { lhs: lhs_val, rhs, abs_err, rel_err });
    }

    let tail_flag = max_tail > tolerance * 0.1;
    Ok(ZhuReport {
        weight: n,
        derivative_order: i,
        samples: out_samples,
        max_rel_err: max_rel,
        max_tail,
        tolerance,
        tail_flag,
        pass: max_rel <= tolerance && !tail_flag,
    })
}

/// Theta_{N,a}^l(z) for all l at once, i-th divided z-derivative, from
/// whichever lane is configured. Derivatives use high-order central
/// differences; the identity checks only need small i.
fn theta_dd(
    config: &SchottkyConfig,
    kernel: &BersKernel,
    words: Option<&[crate::schottky::GroupWord]>,
    sewing: Option<&SewingSystem>,
    a: usize,
    i: u32,
    z: Complex64,
) -> Result<Vec<Complex64>> {
    let eval = |zz: Complex64| -> Result<Vec<Complex64>> {
        if let Some(words) = words {
            theta_extract(kernel, config, words, a - 1, zz)
        } else {
            let sys = sewing.expect("one theta lane must be configured");
            let top = 2 * kernel.degree() - 2;
            (0..=top).map(|l| sys.theta(a as i32, l, zz)).collect()
        }
    };
    divided_fd_vec(&eval, i, z)
}

/// Mixed divided derivative of Psi with a truncation-tail estimate. The
/// sewing lane is fully analytic; the Poincare lane is analytic in y and
/// falls back to central differences in z.
fn psi_dd_value(
    kernel: &BersKernel,
    words: Option<&[crate::schottky::GroupWord]>,
    sewing: Option<&SewingSystem>,
    i: u32,
    j: u32,
    z: Complex64,
    y: Complex64,
) -> Result<(Complex64, f64)> {
    if let Some(sys) = sewing {
        let psi = sys.psi_dd(i, j, z, y)?;
        return Ok((psi.value, psi.tail));
    }
    let words = words.expect("one psi lane must be configured");
    let tail = psi_poincare(kernel, words, z, y)?.tail;
    let eval = |zz: Complex64| -> Result<Vec<Complex64>> {
        let nn = kernel.degree();
        let mut sum = Complex64::new(0.0, 0.0);
        for w in words {
            let gz = w.map.apply(zz);
            let Some(term) = kernel.pi_dd_term(0, j, gz, y) else {
                continue;
            };
            sum += term * w.map.deriv(zz).powu(nn);
        }
        Ok(vec![sum])
    };
    Ok((divided_fd_vec(&eval, i, z)?[0], tail))
}

/// Divided derivative (1/i!) d^i/dz^i of a vector-valued analytic function
/// by fourth-order central differences. Supports i <= 2, which covers every
/// identity exercised here.
fn divided_fd_vec(
    f: &dyn Fn(Complex64) -> Result<Vec<Complex64>>,
    i: u32,
    z: Complex64,
) -> Result<Vec<Complex64>> {
    let h = 1e-3 * z.norm().max(1.0);
    let stencil = |offsets: &[(f64, f64)], denom: f64| -> Result<Vec<Complex64>> {
        let mut acc: Option<Vec<Complex64>> = None;
        for &(step, coeff) in offsets {
            let vals = f(z + Complex64::new(step * h, 0.0))?;
            let acc = acc.get_or_insert_with(|| vec![Complex64::new(0.0, 0.0); vals.len()]);
            for (s, v) in acc.iter_mut().zip(vals) {
                *s += coeff * v;
            }
        }
        Ok(acc
            .unwrap_or_default()
            .into_iter()
            .map(|s| s / Complex64::new(denom * h, 0.0))
            .collect())
    };
    match i {
        0 => f(z),
        1 => stencil(&[(-2.0, 1.0), (-1.0, -8.0), (1.0, 8.0), (2.0, -1.0)], 12.0),
        2 => {
            let vals = stencil(
                &[(-2.0, -1.0), (-1.0, 16.0), (0.0, -30.0), (1.0, 16.0), (2.0, -1.0)],
                12.0 * h,
            )?;
            Ok(vals.into_iter().map(|v| v / 2.0).collect())
        }
        _ => Err(Error::config(
            "numeric z-derivatives above order 2 are not supported".to_string(),
        )),
    }
}
