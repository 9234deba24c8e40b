//! Rational Mobius maps acting on genus-zero correlators. A map with matrix
//! [[a,b],[c,d]], det D != 0, moves a point to (ay+b)/(cy+d) and twists the
//! state at y by exp(-(c(cy+d)/D) L(1)) (gamma'(y))^{L(0)}, where
//! gamma'(y) = D/(cy+d)^2. Writing the twist through gamma' keeps every
//! coefficient rational for any invertible matrix; no normalization to
//! det 1 (and hence no square root of D) is needed.

use crate::error::{Error, Result};
use crate::exact::poly::{Poly, Var};
use crate::exact::ratfunc::RationalFunction;
use crate::exact::rational::{factorial, rat_i, Rational};
use crate::fock::{virasoro_mode, FockVector};
use num_traits::{One, Zero};

use super::CorrelationForm;

#[derive(Clone, Debug, PartialEq)]
pub struct MobiusMatrix {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub d: Rational,
}

impl MobiusMatrix {
    pub fn new(a: Rational, b: Rational, c: Rational, d: Rational) -> Result<Self> {
        let m = MobiusMatrix { a, b, c, d };
        if m.det().is_zero() {
            return Err(Error::config("Mobius matrix must be invertible".to_string()));
        }
        Ok(m)
    }

    pub fn from_i64(a: i64, b: i64, c: i64, d: i64) -> Result<Self> {
        Self::new(rat_i(a), rat_i(b), rat_i(c), rat_i(d))
    }

    pub fn identity() -> Self {
        MobiusMatrix { a: rat_i(1), b: rat_i(0), c: rat_i(0), d: rat_i(1) }
    }

    pub fn det(&self) -> Rational {
        &self.a * &self.d - &self.b * &self.c
    }

    /// The matrix of self . other as point maps: (self*other)(y) = self(other(y)).
    pub fn compose(&self, other: &Self) -> Self {
        MobiusMatrix {
            a: &self.a * &other.a + &self.b * &other.c,
            b: &self.a * &other.b + &self.b * &other.d,
            c: &self.c * &other.a + &self.d * &other.c,
            d: &self.c * &other.b + &self.d * &other.d,
        }
    }

    /// The moved point (a y + b)/(c y + d) as a function of the symbol y.
    pub fn apply_var(&self, y: Var) -> RationalFunction {
        let yp = Poly::var(y);
        let num = yp.scale(&self.a).add(&Poly::constant(self.b.clone()));
        let den = yp.scale(&self.c).add(&Poly::constant(self.d.clone()));
        RationalFunction::from_num_den(num, den).expect("cy+d is nonzero for invertible matrices")
    }

    /// gamma'(y) = D/(cy+d)^2.
    pub fn derivative_rf(&self, y: Var) -> RationalFunction {
        let den = Poly::var(y).scale(&self.c).add(&Poly::constant(self.d.clone()));
        RationalFunction::from_num_den(Poly::constant(self.det()), den.mul(&den))
            .expect("cy+d is nonzero for invertible matrices")
    }
}

/// Expands the twisted state exp(-(c(cy+d)/D) L(1)) gamma'(y)^{L(0)} v into
/// terms (prefactor(y), fixed state). The exponential truncates because L(1)
/// lowers the weight; a weight-N component contributes at most N+1 terms.
pub fn mobius_state_twist(
    gamma: &MobiusMatrix,
    state: &FockVector,
    var: Var,
) -> Result<Vec<(RationalFunction, FockVector)>> {
    if state.is_zero() {
        return Err(Error::config("zero state inserted".to_string()));
    }
    let det = gamma.det();
    // x(y) = -c(cy+d)/D, the argument of the L(1) exponential
    let x = Poly::var(var)
        .scale(&(&gamma.c * &gamma.c))
        .add(&Poly::constant(&gamma.c * &gamma.d))
        .scale(&(-Rational::one() / det));
    let x = RationalFunction::from_poly(x);
    let gp = gamma.derivative_rf(var);

    let mut out = Vec::new();
    for (n, comp) in state.components() {
        let scaled = gp.pow_i(n as i64)?;
        let mut cur = comp;
        let mut xpow = RationalFunction::one();
        let mut i = 0u32;
        while !cur.is_zero() {
            let pref = scaled.mul(&xpow).scale(&(Rational::one() / factorial(i)));
            out.push((pref, cur.clone()));
            cur = virasoro_mode(1, &cur);
            xpow = xpow.mul(&x);
            i += 1;
        }
    }
    Ok(out)
}

/// The substituted-and-reweighted form: value(gamma(y)) * prod gamma'(y_k)^{w_k},
/// keeping the original point symbols. For quasiprimary insertions this is
/// equal to the original form.
pub fn mobius_transport(form: &CorrelationForm, gamma: &MobiusMatrix) -> Result<CorrelationForm> {
    let mut value = form.value.clone();
    for v in &form.points {
        value = value.substitute(*v, &gamma.apply_var(*v))?;
    }
    for (v, w) in form.points.iter().zip(&form.weights) {
        value = value.mul(&gamma.derivative_rf(*v).pow_i(*w as i64)?);
    }
    Ok(CorrelationForm { value, points: form.points.clone(), weights: form.weights.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::poly::v;
    use crate::exact::rational::rat;

    #[test]
    fn determinant_and_compose() {
        let g = MobiusMatrix::from_i64(1, 2, 3, 4).unwrap();
        assert_eq!(g.det(), rat_i(-2));
        assert!(MobiusMatrix::from_i64(1, 2, 2, 4).is_err());
        let h = MobiusMatrix::from_i64(0, 1, 1, 0).unwrap();
        let gh = g.compose(&h);
        // composing the point maps directly
        let y = v("mob_y");
        let lhs = gh.apply_var(y);
        let rhs = g.apply_var(y).substitute(y, &h.apply_var(y)).unwrap();
        assert!(lhs.eq_exact(&rhs));
    }

    #[test]
    fn derivative_matches_formal_derivative() {
        let y = v("mob_d");
        let g = MobiusMatrix::new(rat(1, 2), rat_i(3), rat_i(2), rat(-1, 3)).unwrap();
        let lhs = g.derivative_rf(y);
        let rhs = g.apply_var(y).derivative(y);
        assert!(lhs.eq_exact(&rhs));
    }

    #[test]
    fn twist_of_quasiprimary_is_single_term() {
        let y = v("mob_q");
        let g = MobiusMatrix::from_i64(2, 1, 1, 1).unwrap();
        let terms = mobius_state_twist(&g, &FockVector::a(), y).unwrap();
        assert_eq!(terms.len(), 1);
        assert!(terms[0].0.eq_exact(&g.derivative_rf(y)));
        assert_eq!(terms[0].1, FockVector::a());
    }

    #[test]
    fn twist_of_weight_two_descendant_has_correction() {
        // L(-1)a = (2) is not quasiprimary: L(1)(2) = 2a
        let y = v("mob_t");
        let g = MobiusMatrix::from_i64(1, 0, 1, 1).unwrap();
        let terms = mobius_state_twist(&g, &FockVector::state(&[2]), y).unwrap();
        assert_eq!(terms.len(), 2);
        assert_eq!(terms[1].1, FockVector::a().scale(&rat_i(2)));
    }
}
