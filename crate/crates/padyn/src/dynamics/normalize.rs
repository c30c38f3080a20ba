//! Normalization of a commuting pair: find `V` commuting with `P` and
//! `d ≥ 1` with `Q = V∘P^{∘m}` reducing exactly to `T^{p^d}`.
//!
//! The decomposition of the reduction fixes the target: if
//! `P̄ = H(T^{p^d})` then the commutant with linear coefficient
//! `1/H'(0)` straightens the reduction. When the candidate fails the exact
//! congruence, iterates `P^{∘m}` are tried up to a configured bound.

use crate::dynamics::commutant::commutant_solve;
use crate::dynamics::decompose::lubin_decompose;
use crate::dynamics::pair::CommutingPair;
use crate::series::{ResidueSeries, TruncatedSeries};
use crate::{Error, Result};

#[derive(Debug, Clone)]
pub struct Normalization {
    /// Series commuting with `P` such that `Q = V∘P`.
    pub v: TruncatedSeries,
    pub q: TruncatedSeries,
    pub d: u32,
    /// Iterate `m` used: the invertible commutant was applied to `P^{∘m}`.
    pub iterate_used: u32,
    pub precision_loss: u32,
}

/// The monomial `T^{p^d}` as a residue series.
fn monomial(trunc: usize, rf: &crate::field::ResidueField, exp: usize) -> ResidueSeries {
    let mut s = ResidueSeries::zero(rf, trunc);
    if exp < trunc {
        s.coeffs[exp] = rf.one();
    }
    s
}

pub fn normalize_to_q(pair: &CommutingPair, m_max: u32) -> Result<Normalization> {
    let field = pair.p.field().clone();
    let rf = field.residue_field().clone();
    let mut failures: Vec<String> = Vec::new();
    let mut base = pair.p.clone();
    for m in 1..=m_max.max(1) {
        if m > 1 {
            base = base.compose(&pair.p)?;
        }
        let pbar = base.reduce();
        let dec = match lubin_decompose(&pbar) {
            Ok(dec) => dec,
            Err(e) => {
                failures.push(format!("iterate {m}: {e}"));
                continue;
            }
        };
        let target_exp = match (field.p() as u128).checked_pow(dec.d) {
            Some(t) if t < base.trunc() as u128 => t as usize,
            _ => {
                failures.push(format!("iterate {m}: p^{} exceeds the truncation", dec.d));
                continue;
            }
        };
        // when H is the identity the reduction is already the monomial and
        // W = T works exactly, with no solver precision loss
        let h_is_identity = dec.h.coeff(1) == rf.one()
            && (2..dec.h.trunc).all(|i| rf.is_zero(&dec.h.coeff(i)));
        let (w_series, w_loss) = if h_is_identity {
            (TruncatedSeries::identity(&field, pair.p.trunc()), 0)
        } else {
            // unit lift of 1/H'(0)
            let h1 = dec.h.linear_coeff();
            let h1_inv = rf.inv(&h1)?;
            let v1 = field.lift_residue(&h1_inv);
            match commutant_solve(&pair.p, &v1) {
                Ok(sol) => (sol.series, sol.precision_loss),
                Err(e) => {
                    failures.push(format!("iterate {m}: {e}"));
                    continue;
                }
            }
        };
        let q = w_series.compose(&base)?;
        if q.reduce().congruent(&monomial(q.trunc(), &rf, target_exp)) {
            // V with Q = V∘P: fold the extra iterates into V
            let v = if m == 1 {
                w_series.clone()
            } else {
                w_series.compose(&pair.p.iterate(m - 1)?)?
            };
            return Ok(Normalization {
                v,
                q,
                d: dec.d,
                iterate_used: m,
                precision_loss: w_loss,
            });
        }
        failures.push(format!(
            "iterate {m}: candidate reduction is not T^(p^{})",
            dec.d
        ));
    }
    Err(Error::NormalizationFailed(failures.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::pair::check_commute;
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
    fn already_normalized() {
        let f = q2(48);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 12);
        let u = TruncatedSeries::from_integers(&f, &[3, 3, 1], 12);
        let pair = check_commute(&p, &u, 64).unwrap();
        let norm = normalize_to_q(&pair, 4).unwrap();
        assert_eq!(norm.d, 1);
        assert_eq!(norm.iterate_used, 1);
        assert!(norm
            .v
            .congruent(&TruncatedSeries::identity(&f, 12))
            .unwrap());
        assert!(norm.q.congruent(&p).unwrap());
    }

    #[test]
    fn fourth_power_reduction() {
        let f = q2(48);
        // P = (1+T)⁴ − 1 reduces to T⁴: d = 2, V = T
        let p = TruncatedSeries::from_integers(&f, &[4, 6, 4, 1], 12);
        let u = TruncatedSeries::from_integers(&f, &[3, 3, 1], 12);
        let pair = check_commute(&p, &u, 64).unwrap();
        let norm = normalize_to_q(&pair, 4).unwrap();
        assert_eq!(norm.d, 2);
        assert!(norm.q.congruent(&p).unwrap());
    }

    #[test]
    fn non_decomposable_reduction_fails() {
        let f = q2(32);
        // P = T³ + 2T: reduction T³ is not of the form H(T^{2^d});
        // its iterates reduce to T^{3^m}, never decomposable at p = 2
        let p = TruncatedSeries::from_integers(&f, &[2, 0, 1], 32);
        let u = TruncatedSeries::identity(&f, 32);
        let pair = check_commute(&p, &u, 64).unwrap();
        assert!(matches!(
            normalize_to_q(&pair, 3),
            Err(Error::NormalizationFailed(_))
        ));
    }
}
