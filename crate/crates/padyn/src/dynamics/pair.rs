//! Commuting-pair validation: shape checks, the commutator residual, and
//! the finite-precision root-of-unity proxy for `U'(0)`.

use crate::error::Error;
use crate::field::Val;
use crate::series::{TruncatedSeries, Wideg};
use crate::Result;

/// A validated pair `(P, U)` with `P∘U ≡ U∘P` at working precision,
/// `P` noninvertible with finite Weierstrass degree, `U` invertible.
#[derive(Debug, Clone)]
pub struct CommutingPair {
    pub p: TruncatedSeries,
    pub u: TruncatedSeries,
    /// Floor of the commutator's minimum coefficient valuation.
    pub commute_residual: i64,
    pub wideg_p: usize,
    /// `U'(0)^{(q−1)p^j} ≠ 1 mod π^M` held for all `p^j ≤` the bound.
    /// "Not a root of unity" is undecidable at finite precision; this is
    /// the recorded proxy check.
    pub unit_order_proxy_ok: bool,
    pub unit_order_bound_checked: u64,
}

/// Validate shapes and verify the commutator vanishes at precision.
///
/// `root_of_unity_bound` bounds the `p^j` exponents in the proxy check; a
/// failed proxy is recorded on the pair rather than rejected, since the
/// certifier degrades gracefully (orbits close early and levels come back
/// inconclusive).
pub fn check_commute(
    p: &TruncatedSeries,
    u: &TruncatedSeries,
    root_of_unity_bound: u64,
) -> Result<CommutingPair> {
    if p.field().fingerprint() != u.field().fingerprint() {
        return Err(Error::SpecMismatch);
    }
    let field = p.field().clone();
    let p1 = p.linear_coeff();
    match field.valuation(&p1) {
        Val::Exact(0) => {
            return Err(Error::WrongShape(
                "P'(0) is a unit; P must be noninvertible".into(),
            ))
        }
        _ => {}
    }
    let wideg_p = match p.weierstrass_degree() {
        Wideg::Finite(s) => s,
        Wideg::ZeroReduction => {
            return Err(Error::WrongShape(
                "P vanishes mod the maximal ideal up to the truncation".into(),
            ))
        }
    };
    let commutator = p.compose(u)?.sub(&u.compose(p)?)?;
    let commute_residual = match commutator.min_coeff_valuation() {
        Val::AtLeast(m) => m,
        Val::Exact(_) => {
            let index = (1..commutator.trunc())
                .find(|&i| field.valuation(&commutator.coeff(i)).is_exact())
                .unwrap_or(1);
            return Err(Error::DoesNotCommute { index });
        }
    };

    let u1 = u.linear_coeff();
    if field.valuation(&u1) != Val::Exact(0) {
        return Err(Error::WrongShape("U'(0) is not a unit".into()));
    }

    // proxy: U'(0)^{(q-1)·p^j} must differ from 1 mod π^M for p^j ≤ bound
    let q = field.q();
    let one = field.one();
    let mut ok = true;
    let mut base = field.pow(&u1, q - 1)?;
    let mut pj: u64 = 1;
    loop {
        if field.congruent(&base, &one)? {
            ok = false;
            break;
        }
        match pj.checked_mul(field.p()) {
            Some(next) if next <= root_of_unity_bound => {
                pj = next;
                base = field.pow(&base, field.p())?;
            }
            _ => break,
        }
    }

    Ok(CommutingPair {
        p: p.clone(),
        u: u.clone(),
        commute_residual,
        wideg_p,
        unit_order_proxy_ok: ok,
        unit_order_bound_checked: root_of_unity_bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, LocalFieldSpec};
    use std::sync::Arc;

    fn q2(m: u32) -> Arc<Field> {
        Field::new(LocalFieldSpec {
            p: 2,
            h: 1,
            eisenstein: vec![-2, 1],
            precision: m,
        })
        .unwrap()
    }

    #[test]
    fn multiplicative_pair_accepted() {
        let f = q2(32);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 12);
        let u = TruncatedSeries::from_integers(&f, &[3, 3, 1], 12);
        let pair = check_commute(&p, &u, 1 << 12).unwrap();
        assert_eq!(pair.wideg_p, 2);
        assert!(pair.commute_residual >= 32);
        assert!(pair.unit_order_proxy_ok);
    }

    #[test]
    fn non_commuting_rejected() {
        let f = q2(32);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 8);
        let u = TruncatedSeries::from_integers(&f, &[2], 8);
        // P(2T) = 4T² + 4T vs 2·P(T) = 2T² + 4T: offend at T²
        match check_commute(&p, &u, 64) {
            Err(Error::DoesNotCommute { index }) => assert_eq!(index, 2),
            other => panic!("expected DoesNotCommute, got {other:?}"),
        }
    }

    #[test]
    fn wrong_shapes_rejected() {
        let f = q2(32);
        let doubling = TruncatedSeries::from_integers(&f, &[2], 8);
        let u = TruncatedSeries::from_integers(&f, &[3, 3, 1], 8);
        // P ≡ 0 mod 2 up to the truncation
        assert!(matches!(
            check_commute(&doubling, &u, 64),
            Err(Error::WrongShape(_))
        ));
        // both invertible
        let t = TruncatedSeries::identity(&f, 8);
        assert!(matches!(
            check_commute(&t, &u, 64),
            Err(Error::WrongShape(_))
        ));
    }

    #[test]
    fn root_of_unity_proxy() {
        let f = q2(32);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 8);
        // U = T commutes but U'(0) = 1 is a root of unity: recorded, not fatal
        let t = TruncatedSeries::identity(&f, 8);
        let pair = check_commute(&p, &t, 64).unwrap();
        assert!(!pair.unit_order_proxy_ok);
    }
}
