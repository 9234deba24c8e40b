//! Schottky groups from sewing data, reduced-word enumeration, the Mobius
//! invariant kernel Pi_N, the Bers quasiform as a truncated Poincare series,
//! and extraction of its quasi-periodicity coefficients.
//!
//! A handle a carries two circle centers w_a, w_{-a} and a parameter
//! rho_a != 0; the generator is the map gamma_a with
//! (gamma_a(z) - w_{-a})(z - w_a) = rho_a. Its isometric circles are
//! centered at w_a and w_{-a} with common radius |rho_a|^{1/2}; configs are
//! accepted only when all 2g circles are pairwise disjoint, which keeps the
//! truncation error of the Poincare sums monitorable.

use crate::error::{Error, Result};
use num_complex::Complex64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

mod words;
pub use words::{group_words, word_count, GroupWord};

#[cfg(test)]
mod tests;

/// Formats a float so a reader of the JSON loses no precision.
pub fn f64_string(x: f64) -> String {
    format!("{x:.17e}")
}

pub fn complex_strings(z: Complex64) -> [String; 2] {
    [f64_string(z.re), f64_string(z.im)]
}

/// Accepts ["re", "im"] decimal strings, a bare decimal or "p/q" string, or
/// a JSON number.
fn parse_complex_repr(v: &serde_json::Value) -> std::result::Result<Complex64, String> {
    fn scalar(s: &str) -> std::result::Result<f64, String> {
        let s = s.trim();
        if let Some((p, q)) = s.split_once('/') {
            let p: f64 = p.trim().parse().map_err(|_| format!("bad numerator {p}"))?;
            let q: f64 = q.trim().parse().map_err(|_| format!("bad denominator {q}"))?;
            if q == 0.0 {
                return Err("zero denominator".to_string());
            }
            return Ok(p / q);
        }
        s.parse().map_err(|_| format!("bad number {s}"))
    }
    match v {
        serde_json::Value::Number(n) => {
            Ok(Complex64::new(n.as_f64().ok_or("non-finite number")?, 0.0))
        }
        serde_json::Value::String(s) => Ok(Complex64::new(scalar(s)?, 0.0)),
        serde_json::Value::Array(items) if items.len() == 2 => {
            let part = |v: &serde_json::Value| -> std::result::Result<f64, String> {
                match v {
                    serde_json::Value::Number(n) => n.as_f64().ok_or_else(|| "non-finite".into()),
                    serde_json::Value::String(s) => scalar(s),
                    _ => Err("expected number or string".to_string()),
                }
            };
            Ok(Complex64::new(part(&items[0])?, part(&items[1])?))
        }
        _ => Err("expected [re, im], a string, or a number".to_string()),
    }
}

/// One sewing handle: attachment points and the sewing parameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Handle {
    pub w_plus: Complex64,
    pub w_minus: Complex64,
    pub rho: Complex64,
}

#[derive(Serialize, Deserialize)]
struct HandleRepr {
    w_plus: serde_json::Value,
    w_minus: serde_json::Value,
    rho: serde_json::Value,
}

impl Serialize for Handle {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let enc = |z: Complex64| serde_json::json!(complex_strings(z));
        HandleRepr { w_plus: enc(self.w_plus), w_minus: enc(self.w_minus), rho: enc(self.rho) }
            .serialize(ser)
    }
}

impl<'de> Deserialize<'de> for Handle {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let r = HandleRepr::deserialize(de)?;
        Ok(Handle {
            w_plus: parse_complex_repr(&r.w_plus).map_err(D::Error::custom)?,
            w_minus: parse_complex_repr(&r.w_minus).map_err(D::Error::custom)?,
            rho: parse_complex_repr(&r.rho).map_err(D::Error::custom)?,
        })
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SchottkyConfig {
    pub genus: usize,
    pub handles: Vec<Handle>,
    #[serde(default = "default_mode")]
    pub mode: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_word_len: Option<usize>,
}

fn default_mode() -> String {
    "numeric".to_string()
}

impl SchottkyConfig {
    pub fn new(handles: Vec<Handle>) -> Result<Self> {
        let cfg = SchottkyConfig {
            genus: handles.len(),
            handles,
            mode: default_mode(),
            max_word_len: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Isometric circles in the order w_1, w_{-1}, w_2, w_{-2}, ...
    pub fn circles(&self) -> Vec<(Complex64, f64)> {
        let mut out = Vec::with_capacity(2 * self.handles.len());
        for h in &self.handles {
            let r = h.rho.norm().sqrt();
            out.push((h.w_plus, r));
            out.push((h.w_minus, r));
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if self.genus == 0 || self.genus != self.handles.len() {
            return Err(Error::config(format!(
                "genus {} does not match {} handles",
                self.genus,
                self.handles.len()
            )));
        }
        for (i, h) in self.handles.iter().enumerate() {
            if h.rho.norm() == 0.0 {
                return Err(Error::ZeroRho(i + 1));
            }
        }
        let circles = self.circles();
        for i in 0..circles.len() {
            for j in i + 1..circles.len() {
                let gap = (circles[i].0 - circles[j].0).norm();
                if gap <= circles[i].1 + circles[j].1 {
                    return Err(Error::CirclesOverlap(i, j));
                }
            }
        }
        Ok(())
    }

    /// True when z lies strictly outside every isometric circle.
    pub fn in_fundamental_exterior(&self, z: Complex64) -> bool {
        self.circles().iter().all(|(c, r)| (z - c).norm() > *r)
    }

    pub fn parse_json(text: &str) -> Result<Self> {
        let cfg: SchottkyConfig =
            serde_json::from_str(text).map_err(|e| Error::parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }
}

/// A fractional-linear map kept as its matrix; the determinant is
/// normalized to 1 on construction paths that build group elements, which
/// keeps long products well scaled.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MobiusMap {
    pub a: Complex64,
    pub b: Complex64,
    pub c: Complex64,
    pub d: Complex64,
}

impl MobiusMap {
    pub fn new(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> Result<Self> {
        let m = MobiusMap { a, b, c, d };
        if m.det().norm() == 0.0 {
            return Err(Error::config("Mobius map must be invertible".to_string()));
        }
        Ok(m)
    }

    pub fn identity() -> Self {
        MobiusMap {
            a: Complex64::new(1.0, 0.0),
            b: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
            d: Complex64::new(1.0, 0.0),
        }
    }

    pub fn det(&self) -> Complex64 {
        self.a * self.d - self.b * self.c
    }

    pub fn normalized(&self) -> Self {
        let s = self.det().sqrt();
        MobiusMap { a: self.a / s, b: self.b / s, c: self.c / s, d: self.d / s }
    }

    pub fn compose(&self, other: &Self) -> Self {
        MobiusMap {
            a: self.a * other.a + self.b * other.c,
            b: self.a * other.b + self.b * other.d,
            c: self.c * other.a + self.d * other.c,
            d: self.c * other.b + self.d * other.d,
        }
    }

    pub fn inverse(&self) -> Self {
        // projective inverse; same determinant
        MobiusMap { a: self.d, b: -self.b, c: -self.c, d: self.a }
    }

    pub fn apply(&self, z: Complex64) -> Complex64 {
        (self.a * z + self.b) / (self.c * z + self.d)
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        let t = self.c * z + self.d;
        self.det() / (t * t)
    }

    /// Fixed points, attracting first. Requires c != 0 (no fixed point at
    /// infinity), which holds for every Schottky generator here.
    pub fn fixed_points(&self) -> Result<(Complex64, Complex64)> {
        if self.c.norm() == 0.0 {
            return Err(Error::config("fixed point at infinity".to_string()));
        }
        let disc = ((self.a - self.d) * (self.a - self.d)
            + 4.0 * self.b * self.c)
            .sqrt();
        let p = ((self.a - self.d) + disc) / (2.0 * self.c);
        let q = ((self.a - self.d) - disc) / (2.0 * self.c);
        if self.deriv(p).norm() <= self.deriv(q).norm() {
            Ok((p, q))
        } else {
            Ok((q, p))
        }
    }
}

/// The generator gamma_a: z -> w_{-a} + rho_a/(z - w_a), det-normalized.
pub fn schottky_generator(h: &Handle) -> MobiusMap {
    MobiusMap {
        a: h.w_minus,
        b: h.rho - h.w_minus * h.w_plus,
        c: Complex64::new(1.0, 0.0),
        d: -h.w_plus,
    }
    .normalized()
}

const POLE_EPS: f64 = 1e-10;

/// The kernel Pi_N(z,y;A) = (1/(z-y)) prod_l (y-A_l)/(z-A_l) over 2N-1
/// distinct limit points, together with the Lagrange data of its expansion
/// pi = 1/(z-y) + sum_l f_l(z) y^l.
#[derive(Clone, Debug)]
pub struct BersKernel {
    n: u32,
    points: Vec<Complex64>,
    /// q[i][k] = coefficient of y^k in the Lagrange basis polynomial Q_i
    q: Vec<Vec<Complex64>>,
}

fn binom_f(n: u32, k: u32) -> f64 {
    if k > n {
        return 0.0;
    }
    let mut out = 1.0;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

impl BersKernel {
    pub fn new(n: u32, points: Vec<Complex64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::config("kernel degree must be positive".to_string()));
        }
        if points.len() != (2 * n - 1) as usize {
            return Err(Error::BadKernelNodes { expected: (2 * n - 1) as usize, got: points.len() });
        }
        for (i, a) in points.iter().enumerate() {
            for b in &points[i + 1..] {
                if (a - b).norm() < POLE_EPS {
                    return Err(Error::BadKernelNodes {
                        expected: (2 * n - 1) as usize,
                        got: i,
                    });
                }
            }
        }
        let mut q = Vec::with_capacity(points.len());
        for i in 0..points.len() {
            // expand prod_{j != i} (y - A_j), ascending coefficients
            let mut coeffs = vec![Complex64::new(1.0, 0.0)];
            let mut den = Complex64::new(1.0, 0.0);
            for (j, aj) in points.iter().enumerate() {
                if j == i {
                    continue;
                }
                let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
                for (k, c) in coeffs.iter().enumerate() {
                    next[k + 1] += c;
                    next[k] -= c * aj;
                }
                coeffs = next;
                den *= points[i] - aj;
            }
            for c in &mut coeffs {
                *c /= den;
            }
            coeffs.resize(points.len(), Complex64::new(0.0, 0.0));
            q.push(coeffs);
        }
        Ok(BersKernel { n, points, q })
    }

    /// Limit points harvested from the generator fixed points: attracting
    /// ones first, then repelling, then images of those under the
    /// generators (the limit set is group invariant), until 2N-1 distinct
    /// points are found.
    pub fn default_for(config: &SchottkyConfig, n: u32) -> Result<Self> {
        let want = (2 * n - 1) as usize;
        let mut pool = Vec::new();
        let mut attracting = Vec::new();
        let mut repelling = Vec::new();
        for h in &config.handles {
            let (p, q) = schottky_generator(h).fixed_points()?;
            attracting.push(p);
            repelling.push(q);
        }
        pool.extend(attracting);
        pool.extend(repelling);
        let mut points: Vec<Complex64> = Vec::new();
        let mut frontier = 0;
        while points.len() < want {
            if frontier == pool.len() {
                // expand the pool: one more generation of images
                let before = pool.len();
                let gens: Vec<MobiusMap> = config
                    .handles
                    .iter()
                    .flat_map(|h| {
                        let g = schottky_generator(h);
                        [g, g.inverse()]
                    })
                    .collect();
                for i in 0..before {
                    for g in &gens {
                        let z = g.apply(pool[i]);
                        if pool.iter().all(|p| (p - z).norm() >= POLE_EPS) {
                            pool.push(z);
                        }
                    }
                }
                if pool.len() == before {
                    return Err(Error::BadKernelNodes { expected: want, got: points.len() });
                }
            }
            let z = pool[frontier];
            frontier += 1;
            if points.iter().all(|p| (p - z).norm() >= POLE_EPS) {
                points.push(z);
            }
        }
        Self::new(n, points)
    }

    pub fn degree(&self) -> u32 {
        self.n
    }

    pub fn points(&self) -> &[Complex64] {
        &self.points
    }

    fn guard(&self, z: Complex64, y: Complex64) -> Result<()> {
        if (z - y).norm() < POLE_EPS {
            return Err(Error::config("kernel pole: z too close to y".to_string()));
        }
        for a in &self.points {
            if (z - a).norm() < POLE_EPS {
                return Err(Error::config("kernel pole: z too close to a limit point".to_string()));
            }
        }
        Ok(())
    }

    /// pi_N(z, y), the function stripped of its dz^N dy^{1-N} weights.
    pub fn pi(&self, z: Complex64, y: Complex64) -> Result<Complex64> {
        self.guard(z, y)?;
        let mut out = 1.0 / (z - y);
        for a in &self.points {
            out *= (y - a) / (z - a);
        }
        Ok(out)
    }

    /// Like `pi` but without the proximity guard. Returns None only when a
    /// denominator underflows outright; inside a Poincare sum the word maps
    /// contract z onto the limit points, so near-pole evaluations are
    /// expected and their growth is cancelled by the gamma'(z)^N weight.
    fn pi_term(&self, z: Complex64, y: Complex64) -> Option<Complex64> {
        let d = z - y;
        if d.norm() < 1e-300 {
            return None;
        }
        let mut out = 1.0 / d;
        for a in &self.points {
            let d = z - a;
            if d.norm() < 1e-300 {
                return None;
            }
            out *= (y - a) / d;
        }
        Some(out)
    }

    /// (1/n!) Q_i^{(n)}(y).
    pub fn q_dd(&self, i: usize, n: u32, y: Complex64) -> Complex64 {
        let mut out = Complex64::new(0.0, 0.0);
        let mut ypow = Complex64::new(1.0, 0.0);
        for k in n as usize..self.q[i].len() {
            out += binom_f(k as u32, n) * self.q[i][k] * ypow;
            ypow *= y;
        }
        out
    }

    /// Divided derivative (1/m! n!) d_z^m d_y^n pi_N(z, y).
    pub fn pi_dd(&self, m: u32, n: u32, z: Complex64, y: Complex64) -> Result<Complex64> {
        self.guard(z, y)?;
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mut out = binom_f(m + n, m) * (z - y).powi(-((m + n + 1) as i32));
        for (i, a) in self.points.iter().enumerate() {
            out -= self.q_dd(i, n, y) * (z - a).powi(-((m + 1) as i32));
        }
        Ok(sign * out)
    }

    /// Like `pi_dd` but without the proximity guard, for the same reason as
    /// `pi_term`: deep word maps land next to the limit points, and the
    /// blowup is tamed by the word's derivative weight.
    pub(crate) fn pi_dd_term(&self, m: u32, n: u32, z: Complex64, y: Complex64) -> Option<Complex64> {
        let d = z - y;
        if d.norm() < 1e-300 {
            return None;
        }
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        let mut out = binom_f(m + n, m) * d.powi(-((m + n + 1) as i32));
        for (i, a) in self.points.iter().enumerate() {
            let d = z - a;
            if d.norm() < 1e-300 {
                return None;
            }
            out -= self.q_dd(i, n, y) * d.powi(-((m + 1) as i32));
        }
        Some(sign * out)
    }

    /// (1/m!) f_l^{(m)}(y) for the expansion coefficient f_l of the kernel.
    pub fn f_dd(&self, l: u32, m: u32, y: Complex64) -> Result<Complex64> {
        for a in &self.points {
            if (y - a).norm() < POLE_EPS {
                return Err(Error::config("pole: y too close to a limit point".to_string()));
            }
        }
        let sign = if m % 2 == 0 { -1.0 } else { 1.0 };
        let mut out = Complex64::new(0.0, 0.0);
        for (i, a) in self.points.iter().enumerate() {
            out += self.q[i][l as usize] * (y - a).powi(-((m + 1) as i32));
        }
        Ok(sign * out)
    }

    /// e_m^n(y) = sum_l binom(l, n) (f_l^{(m)}(y)/m!) y^{l-n}.
    pub fn e_mn(&self, m: u32, n: u32, y: Complex64) -> Result<Complex64> {
        let mut out = Complex64::new(0.0, 0.0);
        let top = 2 * self.n - 2;
        if n > top {
            return Ok(out);
        }
        let mut ypow = Complex64::new(1.0, 0.0);
        for l in n..=top {
            out += binom_f(l, n) * self.f_dd(l, m, y)? * ypow;
            ypow *= y;
        }
        Ok(out)
    }
}

/// A truncated Poincare-series value with the magnitude of its last word
/// shell, the monitored proxy for the tail.
#[derive(Clone, Copy, Debug)]
pub struct PsiValue {
    pub value: Complex64,
    pub tail: f64,
}

/// Psi_N(z,y) = sum_gamma pi_N(gamma z, y) gamma'(z)^N truncated to the
/// given word list (all reduced words of length <= L).
pub fn psi_poincare(
    kernel: &BersKernel,
    words: &[GroupWord],
    z: Complex64,
    y: Complex64,
) -> Result<PsiValue> {
    let n = kernel.degree();
    if (z - y).norm() < POLE_EPS {
        return Err(Error::config("psi pole: z too close to y".to_string()));
    }
    let max_len = words.iter().map(|w| w.letters.len()).max().unwrap_or(0);
    let mut value = Complex64::new(0.0, 0.0);
    let mut tail = 0.0;
    for w in words {
        let gz = w.map.apply(z);
        // a word that has contracted z onto a limit point beyond double
        // resolution contributes below the shell tolerance; skip it
        let Some(pi) = kernel.pi_term(gz, y) else { continue };
        let term = pi * w.map.deriv(z).powu(n);
        value += term;
        if w.letters.len() == max_len {
            tail += term.norm();
        }
    }
    Ok(PsiValue { value, tail })
}

/// The quasi-periodicity defect chi[gamma_a](z,y) =
/// Psi(z, gamma_a y) gamma_a'(y)^{1-N} - Psi(z, y), a polynomial of degree
/// 2N-2 in y - w_a.
pub fn chi_generator(
    kernel: &BersKernel,
    config: &SchottkyConfig,
    words: &[GroupWord],
    a: usize,
    z: Complex64,
    y: Complex64,
) -> Result<Complex64> {
    let n = kernel.degree();
    let ga = schottky_generator(&config.handles[a]);
    let moved = psi_poincare(kernel, words, z, ga.apply(y))?;
    let here = psi_poincare(kernel, words, z, y)?;
    let weight = ga.deriv(y).powi(1 - n as i32);
    Ok(moved.value * weight - here.value)
}

/// Recovers the coefficients Theta_{N,a}^l(z), l = 0..2N-2, from
/// chi[gamma_a](z, y) = -sum_l Theta^l(z) (y - w_a)^l by sampling y on a
/// circle around w_a and solving the Vandermonde system.
pub fn theta_extract(
    kernel: &BersKernel,
    config: &SchottkyConfig,
    words: &[GroupWord],
    a: usize,
    z: Complex64,
) -> Result<Vec<Complex64>> {
    let n = kernel.degree();
    let count = (2 * n - 1) as usize;
    let h = &config.handles[a];
    let radius = 4.0 * h.rho.norm().sqrt();
    let mut nodes = Vec::with_capacity(count);
    for j in 0..count {
        let th = 2.0 * std::f64::consts::PI * (j as f64 + 0.35) / count as f64;
        let ya = radius * Complex64::new(th.cos(), th.sin());
        let yj = h.w_plus + ya;
        // sample points must stay clear of the other circles and of z
        for (ci, (c, r)) in config.circles().iter().enumerate() {
            if ci != 2 * a && (yj - *c).norm() <= *r {
                return Err(Error::config(format!(
                    "theta sample node {j} falls into isometric circle {ci}; \
                     shrink rho or move the handles apart"
                )));
            }
        }
        nodes.push((ya, yj));
    }
    let mut mat = nalgebra::DMatrix::<Complex64>::zeros(count, count);
    let mut rhs = nalgebra::DVector::<Complex64>::zeros(count);
    for (j, (ya, yj)) in nodes.iter().enumerate() {
        let mut p = Complex64::new(1.0, 0.0);
        for l in 0..count {
            mat[(j, l)] = p;
            p *= ya;
        }
        rhs[j] = chi_generator(kernel, config, words, a, z, *yj)?;
    }
    let svd = mat.clone().svd(false, false);
    let smax = svd.singular_values.iter().cloned().fold(0.0f64, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = if smin > 0.0 { smax / smin } else { f64::INFINITY };
    if !cond.is_finite() || cond > 1e12 {
        return Err(Error::IllConditioned(cond));
    }
    let solved = mat.lu().solve(&rhs).ok_or(Error::SingularSystem)?;
    Ok(solved.iter().map(|c| -c).collect())
}
