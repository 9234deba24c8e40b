//! Sewing-expansion route to the genus-g quasiform: moment vectors L and R,
//! the doubly indexed moment matrices A and Atilde, the Neumann inverse, and
//! closed forms for Psi and Theta that involve no group sum. This is the
//! second, independent computation cross-checked against the Poincare series
//! in `schottky`.
//!
//! Values here are plain functions; the differential weights dz^N and
//! dy^{1-N} they carry are bookkept by the caller, never multiplied in.
//!
//! Index layout: a handle slot is a signed label a in {1, -1, 2, -2, ...};
//! slot a pairs the center w_a with the opposite center w_{-a}, and
//! rho_{-a} = rho_a. Matrix rows and columns are flat (slot, mode) pairs,
//! slot-major in the order +1, -1, +2, -2, ...

use crate::error::{Error, Result};
use crate::schottky::{BersKernel, SchottkyConfig};
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

mod exact;
pub use exact::ExactSewing;


/// Slot labels +1, -1, ..., +g, -g in flat order.
pub fn slot_labels(genus: usize) -> Vec<i32> {
    let mut out = Vec::with_capacity(2 * genus);
    for i in 0..genus {
        out.push(i as i32 + 1);
        out.push(-(i as i32 + 1));
    }
    out
}

pub fn slot_pos(a: i32) -> usize {
    let i = (a.unsigned_abs() as usize - 1) * 2;
    if a > 0 {
        i
    } else {
        i + 1
    }
}

fn check_slot(config: &SchottkyConfig, a: i32) -> Result<()> {
    if a == 0 || a.unsigned_abs() as usize > config.handles.len() {
        return Err(Error::config(format!("slot {a} out of range")));
    }
    Ok(())
}

/// Center attached to a signed slot.
pub fn slot_center(config: &SchottkyConfig, a: i32) -> Complex64 {
    let h = &config.handles[a.unsigned_abs() as usize - 1];
    if a > 0 {
        h.w_plus
    } else {
        h.w_minus
    }
}

/// Principal square root of the slot's sewing parameter; shared by the
/// paired slots +-a so half-integer rho powers are branch-consistent.
pub fn slot_sigma(config: &SchottkyConfig, a: i32) -> Complex64 {
    config.handles[a.unsigned_abs() as usize - 1].rho.sqrt()
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

fn parity(k: u32) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Truncation orders: modes 0..M per slot and Neumann order K.
#[derive(Clone, Copy, Debug)]
pub struct SewingParams {
    pub modes: usize,
    pub neumann_order: usize,
}

impl SewingParams {
    pub fn new(modes: usize, neumann_order: usize) -> Self {
        SewingParams { modes, neumann_order }
    }
}

/// L_b^n(z), the n-th divided w_b-moment of the kernel.
pub fn moment_l(
    config: &SchottkyConfig,
    kernel: &BersKernel,
    b: i32,
    n: u32,
    z: Complex64,
) -> Result<Complex64> {
    check_slot(config, b)?;
    let wb = slot_center(config, b);
    Ok(slot_sigma(config, b).powu(n) * kernel.pi_dd(0, n, z, wb)?)
}

/// (L D)_b^n(z): the D-shift pushes the mode past the polynomial part of
/// the kernel, leaving a pure pole.
pub fn moment_ld(
    config: &SchottkyConfig,
    kernel: &BersKernel,
    b: i32,
    n: u32,
    z: Complex64,
) -> Result<Complex64> {
    check_slot(config, b)?;
    let nn = kernel.degree();
    let wb = slot_center(config, b);
    if (z - wb).norm() < 1e-12 {
        return Err(Error::config("moment pole: z at a circle center".to_string()));
    }
    let shift = n + 2 * nn - 1;
    Ok(slot_sigma(config, b).powu(shift) * (z - wb).powi(-(shift as i32 + 1)))
}

/// R_a^m(y), the m-th divided w_{-a}-moment.
pub fn moment_r(
    config: &SchottkyConfig,
    kernel: &BersKernel,
    a: i32,
    m: u32,
    y: Complex64,
) -> Result<Complex64> {
    check_slot(config, a)?;
    let wma = slot_center(config, -a);
    Ok(parity(kernel.degree())
        * slot_sigma(config, a).powu(m + 1)
        * kernel.pi_dd(m, 0, wma, y)?)
}

/// The moment matrix A: rows (a, m), columns (b, n), both mode-truncated
/// at `modes`. The paired-slot branch b = -a is carried by e_m^n and is a
/// structural zero for n > 2N-2.
pub fn matrix_a(
    config: &SchottkyConfig,
    kernel: &BersKernel,
    modes: usize,
) -> Result<DMatrix<Complex64>> {
    let slots = slot_labels(config.handles.len());
    let dim = slots.len() * modes;
    let nn = kernel.degree();
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for &a in &slots {
        let wma = slot_center(config, -a);
        let sa = slot_sigma(config, a);
        for &b in &slots {
            let wb = slot_center(config, b);
            let sb = slot_sigma(config, b);
            for m in 0..modes {
                for n in 0..modes {
                    let base = if b == -a {
                        kernel.e_mn(m as u32, n as u32, wma)?
                    } else {
                        kernel.pi_dd(m as u32, n as u32, wma, wb)?
                    };
                    out[(slot_pos(a) * modes + m, slot_pos(b) * modes + n)] =
                        parity(nn) * sa.powu(m as u32 + 1) * sb.powu(n as u32) * base;
                }
            }
        }
    }
    Ok(out)
}

/// Atilde = A D in closed form: no kernel-node dependence survives the
/// D-shift, and the paired-slot branch vanishes outright.
pub fn matrix_atilde(
    config: &SchottkyConfig,
    n_deg: u32,
    modes: usize,
) -> Result<DMatrix<Complex64>> {
    let slots = slot_labels(config.handles.len());
    let dim = slots.len() * modes;
    let mut out = DMatrix::<Complex64>::zeros(dim, dim);
    for &a in &slots {
        let wma = slot_center(config, -a);
        let sa = slot_sigma(config, a);
        for &b in &slots {
            if b == -a {
                continue;
            }
            let wb = slot_center(config, b);
            let sb = slot_sigma(config, b);
            let gap = wma - wb;
            if gap.norm() < 1e-12 {
                return Err(Error::config("coincident circle centers".to_string()));
            }
            for m in 0..modes as u32 {
                for n in 0..modes as u32 {
                    let pow = m + n + 2 * n_deg;
                    out[(slot_pos(a) * modes + m as usize, slot_pos(b) * modes + n as usize)] =
                        parity(m + n_deg)
                            * binom_f(pow - 1, m)
                            * sa.powu(m + 1)
                            * sb.powu(n + 2 * n_deg - 1)
                            * gap.powi(-(pow as i32));
                }
            }
        }
    }
    Ok(out)
}

/// Largest-eigenvalue estimate by power iteration, 50 steps.
pub fn spectral_radius_estimate(mat: &DMatrix<Complex64>) -> f64 {
    let dim = mat.nrows();
    if dim == 0 {
        return 0.0;
    }
    let mut v = DVector::<Complex64>::from_element(dim, Complex64::new(1.0, 0.37));
    v /= Complex64::new(v.norm(), 0.0);
    let mut estimate = 0.0;
    for _ in 0..50 {
        let w = mat * &v;
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        estimate = nw;
        v = w / Complex64::new(nw, 0.0);
    }
    estimate
}

/// Sum_{k=0}^{K} M^k together with the norm of the first dropped power.
pub fn neumann_inverse(mat: &DMatrix<Complex64>, order: usize) -> (DMatrix<Complex64>, f64) {
    let dim = mat.nrows();
    let mut sum = DMatrix::<Complex64>::identity(dim, dim);
    let mut power = DMatrix::<Complex64>::identity(dim, dim);
    for _ in 0..order {
        power = &power * mat;
        sum += &power;
    }
    let dropped = (&power * mat).norm();
    (sum, dropped)
}

/// The assembled system for one (config, kernel, truncation) triple.
pub struct SewingSystem<'a> {
    config: &'a SchottkyConfig,
    kernel: &'a BersKernel,
    params: SewingParams,
    atilde: DMatrix<Complex64>,
    neumann: DMatrix<Complex64>,
    radius: f64,
    residual: f64,
}

impl<'a> SewingSystem<'a> {
    pub fn new(
        config: &'a SchottkyConfig,
        kernel: &'a BersKernel,
        params: SewingParams,
    ) -> Result<Self> {
        config.validate()?;
        if params.modes == 0 {
            return Err(Error::config("mode cutoff must be positive".to_string()));
        }
        let atilde = matrix_atilde(config, kernel.degree(), params.modes)?;
        let radius = spectral_radius_estimate(&atilde);
        if radius >= 0.9 {
            return Err(Error::SpectralRadius(radius, 0.9));
        }
        let (neumann, residual) = neumann_inverse(&atilde, params.neumann_order);
        Ok(SewingSystem { config, kernel, params, atilde, neumann, radius, residual })
    }

    pub fn spectral_radius(&self) -> f64 {
        self.radius
    }

    /// Norm of the first Neumann power beyond the truncation.
    pub fn neumann_residual(&self) -> f64 {
        self.residual
    }

    pub fn atilde(&self) -> &DMatrix<Complex64> {
        &self.atilde
    }

    fn ld_row(&self, z: Complex64) -> Result<DVector<Complex64>> {
        self.ld_row_dd(0, z)
    }

    /// i-th divided z-derivative of the (L D) row; each entry is a pure
    /// power of (z - w_b), so the derivative stays closed-form.
    fn ld_row_dd(&self, i: u32, z: Complex64) -> Result<DVector<Complex64>> {
        let slots = slot_labels(self.config.handles.len());
        let nn = self.kernel.degree();
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let mut out = DVector::<Complex64>::zeros(slots.len() * self.params.modes);
        for &b in &slots {
            let wb = slot_center(self.config, b);
            if (z - wb).norm() < 1e-12 {
                return Err(Error::config("moment pole: z at a circle center".to_string()));
            }
            for n in 0..self.params.modes as u32 {
                let shift = n + 2 * nn - 1;
                out[slot_pos(b) * self.params.modes + n as usize] = sign
                    * binom_f(shift + i, i)
                    * slot_sigma(self.config, b).powu(shift)
                    * (z - wb).powi(-((shift + 1 + i) as i32));
            }
        }
        Ok(out)
    }

    /// j-th divided y-derivative of the R column, through the kernel's own
    /// divided derivatives.
    fn r_col_dd(&self, j: u32, y: Complex64) -> Result<DVector<Complex64>> {
        let slots = slot_labels(self.config.handles.len());
        let mut out = DVector::<Complex64>::zeros(slots.len() * self.params.modes);
        for &a in &slots {
            let wma = slot_center(self.config, -a);
            for m in 0..self.params.modes as u32 {
                out[slot_pos(a) * self.params.modes + m as usize] = parity(self.kernel.degree())
                    * slot_sigma(self.config, a).powu(m + 1)
                    * self.kernel.pi_dd(m, j, wma, y)?;
            }
        }
        Ok(out)
    }

    /// Psi_N(z, y) = Pi_N(z, y) + (L D) (I - Atilde)^{-1} R, with a
    /// truncation-residual monitor.
    pub fn psi(&self, z: Complex64, y: Complex64) -> Result<crate::schottky::PsiValue> {
        self.psi_dd(0, 0, z, y)
    }

    /// Divided derivative (1/i!)(1/j!) d^i_z d^j_y of Psi_N. The z and y
    /// dependence sits in separate factors of the sewing expansion, so both
    /// derivatives are exact, not finite differences.
    pub fn psi_dd(
        &self,
        i: u32,
        j: u32,
        z: Complex64,
        y: Complex64,
    ) -> Result<crate::schottky::PsiValue> {
        let ld = self.ld_row_dd(i, z)?;
        let r = self.r_col_dd(j, y)?;
        let value = self.kernel.pi_dd(i, j, z, y)? + ld.dot(&(&self.neumann * &r));
        let tail = ld.norm() * r.norm() * self.residual / (1.0 - self.radius).max(1e-6);
        Ok(crate::schottky::PsiValue { value, tail })
    }

    /// Theta_{N,a}^l(z) via T_a^l = rho_a^{-l/2} [L (I + D (I-Atilde)^{-1} A)]_a^l
    /// and the paired-slot reflection.
    pub fn theta(&self, a: i32, l: u32, z: Complex64) -> Result<Complex64> {
        check_slot(self.config, a)?;
        let nn = self.kernel.degree();
        if l > 2 * nn - 2 {
            return Err(Error::config(format!(
                "theta index {l} out of range for degree {nn}"
            )));
        }
        if self.params.modes < (2 * nn - 1) as usize {
            return Err(Error::config(format!(
                "mode cutoff {} below 2N-1 = {}",
                self.params.modes,
                2 * nn - 1
            )));
        }
        let t = self.t_row(z)?;
        let m = self.params.modes;
        let ta = t[slot_pos(a) * m + l as usize];
        let tref = t[slot_pos(-a) * m + (2 * nn - 2 - l) as usize];
        // rho_a^{-l/2} T_a^l + (-1)^N rho_a^{N-1-l} rho_a^{-(2N-2-l)/2} T_{-a}^{2N-2-l}
        // collapses to a common sigma^{-l} prefactor
        let sa = slot_sigma(self.config, a);
        Ok(sa.powi(-(l as i32)) * (ta + parity(nn) * tref))
    }

    /// Row vector [L (I + D (I-Atilde)^{-1} A)] over flat (slot, mode),
    /// before the per-entry rho powers.
    fn t_row(&self, z: Complex64) -> Result<DVector<Complex64>> {
        let slots = slot_labels(self.config.handles.len());
        let m = self.params.modes;
        let mut lrow = DVector::<Complex64>::zeros(slots.len() * m);
        for &b in &slots {
            for n in 0..m {
                lrow[slot_pos(b) * m + n] =
                    moment_l(self.config, self.kernel, b, n as u32, z)?;
            }
        }
        let ld = self.ld_row(z)?;
        let amat = matrix_a(self.config, self.kernel, m)?;
        // (ld^T S A)^T = A^T (S^T ld)
        let mid = self.neumann.transpose() * ld;
        let tail = amat.transpose() * mid;
        Ok(lrow + tail)
    }
}

/// Sparse JSON dump of a moment matrix for debugging: entries as
/// [row, col, [re, im]] triplets of 17-digit strings.
pub fn moment_matrix_json(mat: &DMatrix<Complex64>) -> serde_json::Value {
    let mut entries = Vec::new();
    for i in 0..mat.nrows() {
        for j in 0..mat.ncols() {
            let v = mat[(i, j)];
            if v.norm() > 0.0 {
                entries.push(serde_json::json!([i, j, crate::schottky::complex_strings(v)]));
            }
        }
    }
    serde_json::json!({
        "rows": mat.nrows(),
        "cols": mat.ncols(),
        "entries": entries,
    })
}
