//! The rank-1 bosonic Fock space and its vertex-operator structure.
//!
//! Basis states are partitions (lambda_1 >= lambda_2 >= ...), standing for
//! a(-lambda_1)...a(-lambda_k)|0>. The conformal vector is
//! omega = 1/2 a(-1)^2 |0> with central charge 1. Mode conventions:
//! Y(u, z) = sum_n u(n) z^{-n-1} and L(n) = omega(n+1).

use crate::error::{Error, Result};
use crate::exact::linalg::QMatrix;
use crate::exact::rational::{binom, factorial, rat_pow, Rational};
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;

/// A normally ordered product of creation modes: the partition of its weight.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct BasisState(pub Vec<u32>);

impl BasisState {
    pub fn vacuum() -> Self {
        BasisState(Vec::new())
    }

    pub fn new(mut parts: Vec<u32>) -> Self {
        assert!(parts.iter().all(|&p| p > 0), "parts must be positive");
        parts.sort_unstable_by(|a, b| b.cmp(a));
        BasisState(parts)
    }

    pub fn weight(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Prepends a creation mode a(-k).
    fn create(&self, k: u32) -> BasisState {
        let mut parts = self.0.clone();
        let pos = parts.partition_point(|&p| p >= k);
        parts.insert(pos, k);
        BasisState(parts)
    }

    /// Applies the annihilation mode a(k), k > 0: multiplicity * k times the
    /// state with one part k removed, or nothing.
    fn annihilate(&self, k: u32) -> Option<(Rational, BasisState)> {
        let mult = self.0.iter().filter(|&&p| p == k).count();
        if mult == 0 {
            return None;
        }
        let mut parts = self.0.clone();
        let pos = parts.iter().position(|&p| p == k).unwrap();
        parts.remove(pos);
        Some((Rational::from_integer((mult as u32 * k).into()), BasisState(parts)))
    }
}

impl fmt::Display for BasisState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "|0>");
        }
        let parts: Vec<String> = self.0.iter().map(|p| format!("a(-{p})")).collect();
        write!(f, "{}|0>", parts.join(""))
    }
}

/// A finite rational combination of basis states.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct FockVector(pub BTreeMap<BasisState, Rational>);

impl FockVector {
    pub fn zero() -> Self {
        FockVector(BTreeMap::new())
    }

    pub fn vacuum() -> Self {
        FockVector::basis(BasisState::vacuum())
    }

    pub fn basis(b: BasisState) -> Self {
        let mut m = BTreeMap::new();
        m.insert(b, Rational::one());
        FockVector(m)
    }

    /// a(-k1)...a(-kn)|0> from the list of created modes.
    pub fn state(parts: &[u32]) -> Self {
        FockVector::basis(BasisState::new(parts.to_vec()))
    }

    /// The Heisenberg generator a = a(-1)|0>.
    pub fn a() -> Self {
        FockVector::state(&[1])
    }

    /// The conformal vector omega = 1/2 a(-1)^2 |0>.
    pub fn omega() -> Self {
        FockVector::state(&[1, 1]).scale(&Rational::new(1.into(), 2.into()))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_empty()
    }

    pub fn add_term(&mut self, b: BasisState, c: Rational) {
        if c.is_zero() {
            return;
        }
        use std::collections::btree_map::Entry;
        match self.0.entry(b) {
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

    pub fn add(&self, other: &FockVector) -> FockVector {
        let mut out = self.clone();
        for (b, c) in &other.0 {
            out.add_term(b.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &FockVector) -> FockVector {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> FockVector {
        FockVector(self.0.iter().map(|(b, c)| (b.clone(), -c.clone())).collect())
    }

    pub fn scale(&self, c: &Rational) -> FockVector {
        if c.is_zero() {
            return FockVector::zero();
        }
        FockVector(self.0.iter().map(|(b, k)| (b.clone(), k * c)).collect())
    }

    /// Coefficient of the vacuum.
    pub fn vacuum_coeff(&self) -> Rational {
        self.0.get(&BasisState::vacuum()).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coeff(&self, b: &BasisState) -> Rational {
        self.0.get(b).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn max_weight(&self) -> u32 {
        self.0.keys().map(|b| b.weight()).max().unwrap_or(0)
    }

    pub fn max_part(&self) -> u32 {
        self.0.keys().flat_map(|b| b.0.first().copied()).max().unwrap_or(0)
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut it = self.0.keys().map(|b| b.weight());
        match it.next() {
            None => true,
            Some(w) => it.all(|x| x == w),
        }
    }

    /// The weight if homogeneous.
    pub fn weight(&self) -> Option<u32> {
        if self.is_zero() || !self.is_homogeneous() {
            return None;
        }
        Some(self.0.keys().next().unwrap().weight())
    }

    /// Splits into homogeneous components, ascending weight.
    pub fn components(&self) -> BTreeMap<u32, FockVector> {
        let mut out: BTreeMap<u32, FockVector> = BTreeMap::new();
        for (b, c) in &self.0 {
            out.entry(b.weight()).or_default().add_term(b.clone(), c.clone());
        }
        out
    }

    /// Divides out the coefficient of the first basis term, returning the
    /// scalar and the normalized vector (used for cache keys).
    pub fn normalized(&self) -> (Rational, FockVector) {
        match self.0.iter().next() {
            None => (Rational::zero(), FockVector::zero()),
            Some((_, c)) => {
                let c = c.clone();
                (c.clone(), self.scale(&(Rational::one() / &c)))
            }
        }
    }
}

impl fmt::Display for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (b, c) in &self.0 {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{}*{}", crate::exact::rational::rat_string(c), b)?;
        }
        Ok(())
    }
}

impl fmt::Debug for FockVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

#[derive(Serialize, Deserialize)]
struct FvTerm {
    partition: Vec<u32>,
    coeff: String,
}

impl Serialize for FockVector {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let terms: Vec<FvTerm> = self
            .0
            .iter()
            .map(|(b, c)| FvTerm { partition: b.0.clone(), coeff: crate::exact::rational::rat_string(c) })
            .collect();
        terms.serialize(ser)
    }
}

impl<'de> Deserialize<'de> for FockVector {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let terms = Vec::<FvTerm>::deserialize(de)?;
        let mut out = FockVector::zero();
        for t in terms {
            let c = crate::exact::rational::rat_parse(&t.coeff)
                .map_err(|e| D::Error::custom(e.to_string()))?;
            out.add_term(BasisState::new(t.partition), c);
        }
        Ok(out)
    }
}

/// All partitions of k, i.e. the weight-k basis, in canonical order.
/// Memoized; the returned list is shared.
pub fn partitions(k: u32) -> std::sync::Arc<Vec<BasisState>> {
    use once_cell::sync::Lazy;
    use std::sync::{Arc, RwLock};
    static CACHE: Lazy<RwLock<std::collections::HashMap<u32, Arc<Vec<BasisState>>>>> =
        Lazy::new(|| RwLock::new(std::collections::HashMap::new()));
    if let Some(hit) = CACHE.read().unwrap().get(&k) {
        return hit.clone();
    }
    fn rec(rest: u32, max: u32, cur: &mut Vec<u32>, out: &mut Vec<BasisState>) {
        if rest == 0 {
            out.push(BasisState(cur.clone()));
            return;
        }
        let top = rest.min(max);
        for p in (1..=top).rev() {
            cur.push(p);
            rec(rest - p, p, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut Vec::new(), &mut out);
    out.sort();
    let arc = Arc::new(out);
    CACHE.write().unwrap().insert(k, arc.clone());
    arc
}

/// A scalar multiple of a composition a(n_1)...a(n_r), applied left to right
/// on paper, i.e. a(n_r) acts first. Carries its weight shift.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModeOperator {
    pub modes: Vec<i64>,
    pub scalar: Rational,
}

impl ModeOperator {
    pub fn new(modes: Vec<i64>, scalar: Rational) -> Self {
        ModeOperator { modes, scalar }
    }

    /// Total weight added to any state this acts on.
    pub fn weight_shift(&self) -> i64 {
        self.modes.iter().map(|&n| -n).sum()
    }

    pub fn apply(&self, v: &FockVector) -> FockVector {
        let mut out = v.clone();
        for &n in self.modes.iter().rev() {
            out = heisenberg_mode(n, &out);
            if out.is_zero() {
                break;
            }
        }
        out.scale(&self.scalar)
    }
}

/// The Heisenberg mode a(n): creation for n < 0, annihilation for n > 0,
/// zero for n = 0.
pub fn heisenberg_mode(n: i64, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    if n == 0 {
        return out;
    }
    for (b, c) in &v.0 {
        if n < 0 {
            out.add_term(b.create((-n) as u32), c.clone());
        } else if let Some((f, nb)) = b.annihilate(n as u32) {
            out.add_term(nb, c * f);
        }
    }
    out
}

fn vertex_mode_basis(u: &BasisState, m: i64, v: &FockVector) -> FockVector {
    if u.is_empty() {
        // identity field: |0>(m) = delta_{m,-1} id
        return if m == -1 { v.clone() } else { FockVector::zero() };
    }
    let lam = u.0[0] as i64;
    let rest = BasisState(u.0[1..].to_vec());
    let sign = if (lam - 1) % 2 == 0 { Rational::one() } else { -Rational::one() };
    let mut out = FockVector::zero();

    // creation side: sum_{k <= -1} binom(k, lam-1) a(k-lam+1) (rest(m-k-1) v)
    let rest_wt = rest.weight() as i64;
    let k_min = m - rest_wt - v.max_weight() as i64;
    for k in k_min..=-1 {
        let c = binom(k, lam - 1);
        if c.is_zero() {
            continue;
        }
        let inner = vertex_mode_basis(&rest, m - k - 1, v);
        if inner.is_zero() {
            continue;
        }
        let t = heisenberg_mode(k - lam + 1, &inner);
        out = out.add(&t.scale(&(&sign * c)));
    }

    // annihilation side: sum_{k >= lam-1} binom(k, lam-1) rest(m-k-1) (a(k-lam+1) v)
    let k_max = lam - 1 + v.max_part() as i64;
    for k in lam - 1..=k_max {
        let j = k - lam + 1;
        if j == 0 {
            continue; // a(0) = 0
        }
        let hit = heisenberg_mode(j, v);
        if hit.is_zero() {
            continue;
        }
        let c = binom(k, lam - 1);
        if c.is_zero() {
            continue;
        }
        let t = vertex_mode_basis(&rest, m - k - 1, &hit);
        out = out.add(&t.scale(&(&sign * c)));
    }
    out
}

/// The general vertex-operator mode u(m) applied to v.
pub fn vertex_mode(u: &FockVector, m: i64, v: &FockVector) -> FockVector {
    let mut out = FockVector::zero();
    for (b, c) in &u.0 {
        out = out.add(&vertex_mode_basis(b, m, v).scale(c));
    }
    out
}

/// The Virasoro mode L(n) = omega(n+1), computed directly as the bosonic
/// bilinear 1/2 sum_j a(j) a(n-j) (the n = 0 case is the weight grading).
pub fn virasoro_mode(n: i64, v: &FockVector) -> FockVector {
    if n == 0 {
        let mut out = FockVector::zero();
        for (b, c) in &v.0 {
            out.add_term(b.clone(), c * Rational::from_integer(b.weight().into()));
        }
        return out;
    }
    let bound = v.max_weight() as i64 + n.abs() + 1;
    let half = Rational::new(1.into(), 2.into());
    let mut out = FockVector::zero();
    for j in -bound..=bound {
        let first = heisenberg_mode(n - j, v);
        if first.is_zero() {
            continue;
        }
        let second = heisenberg_mode(j, &first);
        if second.is_zero() {
            continue;
        }
        out = out.add(&second.scale(&half));
    }
    out
}

/// L(-1)^i / i! applied to v.
pub fn translate_pow(i: u32, v: &FockVector) -> FockVector {
    let mut out = v.clone();
    for _ in 0..i {
        out = virasoro_mode(-1, &out);
    }
    out.scale(&(Rational::one() / factorial(i)))
}

/// The invariant pairing at rho = 1, normalized by <|0>, |0>> = 1. Fixed by
/// the Heisenberg adjoint a(m) |-> -a(-m).
pub fn pairing_1(u: &FockVector, v: &FockVector) -> Rational {
    let mut acc = Rational::zero();
    for (b, c) in &u.0 {
        let mut rhs = v.clone();
        let mut sign = Rational::one();
        for &p in &b.0 {
            rhs = heisenberg_mode(p as i64, &rhs);
            sign = -sign;
            if rhs.is_zero() {
                break;
            }
        }
        if rhs.is_zero() {
            continue;
        }
        acc += c * sign * rhs.vacuum_coeff();
    }
    acc
}

/// The rho-dependent pairing: rho^{-N} on the weight-N diagonal. This is
/// the normalization under which a weight-N quasiprimary u has adjoint
/// u(m) |-> (-1)^N rho^{m+1-N} u(2N-2-m), equivalently L(n) |-> rho^n L(-n),
/// and under which rho^{wt} times the rho = 1 dual basis is again dual.
pub fn pairing(u: &FockVector, v: &FockVector, rho: &Rational) -> Result<Rational> {
    if rho.is_zero() {
        return Err(Error::config("pairing requires rho != 0".to_string()));
    }
    let mut acc = Rational::zero();
    let vc = v.components();
    for (wt, uc) in u.components() {
        if let Some(vcw) = vc.get(&wt) {
            acc += rat_pow(rho, -(wt as i64))? * pairing_1(&uc, vcw);
        }
    }
    Ok(acc)
}

/// Gram matrix of the weight-k basis under the rho = 1 pairing.
pub fn gram_matrix(k: u32) -> (Vec<BasisState>, QMatrix) {
    let basis: Vec<BasisState> = partitions(k).as_ref().clone();
    let n = basis.len();
    let mut g = QMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            *g.at_mut(i, j) =
                pairing_1(&FockVector::basis(basis[i].clone()), &FockVector::basis(basis[j].clone()));
        }
    }
    (basis, g)
}

/// Weight-k basis with its dual basis at rho = 1: <dual_i, b_j> = delta_ij.
pub fn dual_basis_1(k: u32) -> Result<Vec<(BasisState, FockVector)>> {
    let (basis, g) = gram_matrix(k);
    let ginv = g.inverse().map_err(|_| Error::SingularGram(k))?;
    let n = basis.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut dual = FockVector::zero();
        for (j, bj) in basis.iter().enumerate() {
            dual.add_term(bj.clone(), ginv.at(i, j).clone());
        }
        out.push((basis[i].clone(), dual));
    }
    Ok(out)
}

/// Weight-k triples (b, dual of b at rho = 1, rho^k * dual): the third entry
/// is the state sewn in at the conjugate puncture against b.
pub fn dual_basis(k: u32, rho: &Rational) -> Result<Vec<(BasisState, FockVector, FockVector)>> {
    let scale = rat_pow(rho, k as i64)?;
    Ok(dual_basis_1(k)?
        .into_iter()
        .map(|(b, dual)| {
            let sewn = dual.scale(&scale);
            (b, dual, sewn)
        })
        .collect())
}

/// The coordinate-change operator exp(sum_{k>0} (k+1) beta_k L(k)) beta_0^{L(0)}.
/// `beta[0]` must be nonzero; positive-mode terms are nilpotent on each state.
pub fn coordinate_change(beta: &[Rational], v: &FockVector) -> Result<FockVector> {
    if beta.is_empty() || beta[0].is_zero() {
        return Err(Error::config("coordinate change requires beta_0 != 0".to_string()));
    }
    // beta_0^{L(0)}
    let mut base = FockVector::zero();
    for (b, c) in &v.0 {
        base.add_term(b.clone(), c * rat_pow(&beta[0], b.weight() as i64)?);
    }
    // T = sum_{k>=1} (k+1) beta_k L(k) lowers weight by at least 1
    let apply_t = |x: &FockVector| -> FockVector {
        let mut out = FockVector::zero();
        for (k, bk) in beta.iter().enumerate().skip(1) {
            if bk.is_zero() {
                continue;
            }
            let t = virasoro_mode(k as i64, x);
            if !t.is_zero() {
                out = out.add(&t.scale(&(bk * Rational::from_integer(((k + 1) as u32).into()))));
            }
        }
        out
    };
    let mut out = base.clone();
    let mut term = base;
    let mut m = 1u32;
    loop {
        term = apply_t(&term);
        if term.is_zero() {
            break;
        }
        out = out.add(&term.scale(&(Rational::one() / factorial(m))));
        m += 1;
    }
    Ok(out)
}

// Truncated one-variable series coeffs[j] = coefficient of z^j, used only to
// realize coordinate changes as maps.
fn series_apply_field(beta: &[Rational], s: &[Rational]) -> Vec<Rational> {
    // X = -sum_{m>=1} (m+1) beta_m z^{m+1} d/dz applied to s
    let depth = s.len() - 1;
    let mut out = vec![Rational::zero(); depth + 1];
    for (m, bm) in beta.iter().enumerate().skip(1) {
        if bm.is_zero() {
            continue;
        }
        let w = -bm * Rational::from_integer(((m + 1) as u32).into());
        for (j, cj) in s.iter().enumerate() {
            if cj.is_zero() || j + m > depth {
                continue;
            }
            let t = &w * cj * Rational::from_integer((j as u32).into());
            out[j + m] += t;
        }
    }
    out
}

fn series_is_zero(s: &[Rational]) -> bool {
    s.iter().all(|c| c.is_zero())
}

// phi_beta = time-1 flow of -sum (m+1) beta_m z^{m+1} d/dz, as exp(X).z
fn flow_series(beta: &[Rational], depth: usize) -> Vec<Rational> {
    let mut acc = vec![Rational::zero(); depth + 1];
    let mut term = acc.clone();
    if depth >= 1 {
        term[1] = Rational::one();
    }
    let mut k = 0u32;
    while !series_is_zero(&term) {
        for (a, t) in acc.iter_mut().zip(&term) {
            *a += t;
        }
        k += 1;
        let next = series_apply_field(beta, &term);
        term = next.iter().map(|c| c / Rational::from_integer(k.into())).collect();
    }
    acc
}

fn series_compose(outer: &[Rational], inner: &[Rational]) -> Vec<Rational> {
    // outer(inner(z)) with inner(0) = 0, truncated to the common depth
    let depth = outer.len() - 1;
    let mut acc = vec![Rational::zero(); depth + 1];
    // Horner from the top coefficient down: acc = acc*inner + c_j
    for j in (0..=depth).rev() {
        let mut next = vec![Rational::zero(); depth + 1];
        for (p, cp) in acc.iter().enumerate() {
            if cp.is_zero() {
                continue;
            }
            for (q, cq) in inner.iter().enumerate() {
                if cq.is_zero() || p + q > depth {
                    continue;
                }
                next[p + q] += cp * cq;
            }
        }
        next[0] += &outer[j];
        acc = next;
    }
    acc
}

/// The parameter list delta with P(delta) = P(beta) P(gamma), correct in the
/// entries delta_0..delta_{count-1}. Realizes each parameter list as the map
/// g(z) = phi(z)/beta_0 with phi the time-1 flow of
/// -sum_{m>=1} (m+1) beta_m z^{m+1} d/dz; operator composition corresponds
/// to g_delta = g_gamma o g_beta.
pub fn compose_coordinate_changes(
    beta: &[Rational],
    gamma: &[Rational],
    count: usize,
) -> Result<Vec<Rational>> {
    if beta.is_empty() || beta[0].is_zero() || gamma.is_empty() || gamma[0].is_zero() {
        return Err(Error::config("coordinate change requires beta_0 != 0".to_string()));
    }
    let depth = count + 1;
    let g = |b: &[Rational]| -> Vec<Rational> {
        let inv = Rational::one() / &b[0];
        flow_series(b, depth).iter().map(|c| c * &inv).collect()
    };
    let target = series_compose(&g(gamma), &g(beta));
    // recover delta: delta_0 = 1/target[1], then match orders of phi = delta_0*target
    let delta0 = Rational::one() / &target[1];
    let phi: Vec<Rational> = target.iter().map(|c| c * &delta0).collect();
    let mut delta = vec![delta0];
    for m in 1..count {
        let e = flow_series(&delta, depth);
        let diff = &e[m + 1] - &phi[m + 1];
        delta.push(diff / Rational::from_integer(((m + 1) as u32).into()));
    }
    // the recovered parameters must reproduce the composed map exactly
    let e = flow_series(&delta, depth);
    for j in 0..=count {
        if e[j] != phi[j] {
            return Err(Error::config(format!(
                "coordinate-change composition drifted at order {j}"
            )));
        }
    }
    Ok(delta)
}

/// Expands v in the weight-k basis; v must be homogeneous of weight k.
fn basis_coords(v: &FockVector, basis: &[BasisState]) -> Vec<Rational> {
    basis.iter().map(|b| v.coeff(b)).collect()
}

/// Decomposes v as sum_i L(-1)^i u_i / i! with every u_i annihilated by
/// L(1). Index i of the result holds u_i.
pub fn quasiprimary_decompose(v: &FockVector) -> Result<Vec<FockVector>> {
    let mut out: Vec<FockVector> = Vec::new();
    let add_at = |i: usize, u: FockVector, out: &mut Vec<FockVector>| {
        while out.len() <= i {
            out.push(FockVector::zero());
        }
        out[i] = out[i].add(&u);
    };
    for (h, vh) in v.components() {
        if h <= 1 {
            // V_0 and V_1 are entirely annihilated by L(1)
            add_at(0, vh, &mut out);
            continue;
        }
        // Solve L(1)L(-1) w = L(1) v_h on the weight h-1 basis, then split
        // v_h = (v_h - L(-1)w) + L(-1)w and recurse on w.
        let basis_lo = partitions(h - 1);
        let n = basis_lo.len();
        let mut s = QMatrix::zeros(n, n);
        for (j, bj) in basis_lo.iter().enumerate() {
            let img = virasoro_mode(1, &virasoro_mode(-1, &FockVector::basis(bj.clone())));
            let col = basis_coords(&img, &basis_lo);
            for i in 0..n {
                *s.at_mut(i, j) = col[i].clone();
            }
        }
        let rhs_vec = virasoro_mode(1, &vh);
        let rhs = basis_coords(&rhs_vec, &basis_lo);
        let wcoef = s.solve(&rhs).map_err(|_| Error::SingularGram(h))?;
        let mut w = FockVector::zero();
        for (j, bj) in basis_lo.iter().enumerate() {
            w.add_term(bj.clone(), wcoef[j].clone());
        }
        let u0 = vh.sub(&virasoro_mode(-1, &w));
        if !u0.is_zero() {
            add_at(0, u0, &mut out);
        }
        if !w.is_zero() {
            let inner = quasiprimary_decompose(&w)?;
            for (i, t) in inner.into_iter().enumerate() {
                if !t.is_zero() {
                    // (1/i!) L(-1)^i t nested in one more L(-1)/(i+1) step
                    add_at(i + 1, t.scale(&Rational::from_integer(((i + 1) as u32).into())), &mut out);
                }
            }
        }
    }
    while out.last().is_some_and(|t| t.is_zero()) {
        out.pop();
    }
    Ok(out)
}

pub fn is_quasiprimary(v: &FockVector) -> bool {
    virasoro_mode(1, v).is_zero()
}

#[cfg(test)]
mod tests;
