//! Valuation dynamics of a consistent root sequence, computed symbolically
//! from Newton polygons: at each level the polygon of `Q − α_n` is built
//! from `Q`'s coefficient valuations and the rational valuation of `α_n`.

use serde::{Deserialize, Serialize};

use crate::field::Val;
use crate::newton::NewtonPolygon;
use crate::rat::Rat;
use crate::series::{TruncatedSeries, Wideg};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceEntry {
    pub n: u32,
    /// `v_K(α_n)`.
    pub v: Rat,
    /// Estimated degree of the level-`n` field over the base: the product
    /// of the slope denominators seen so far.
    pub degree_est: i64,
    /// Whether the polygon of `Q − α_n` has a single (negative) slope.
    pub single_slope: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ValuationTrace {
    pub entries: Vec<TraceEntry>,
    /// First index from which `single_slope` holds at every later level.
    pub n0: Option<u32>,
    /// The eventual level-normalized valuation `v(α_n)·[K_n : K]`, when it
    /// is an integer at the last level.
    pub d_stable: Option<i64>,
    /// Weierstrass degree of `Q`.
    pub s: usize,
}

/// Polygon of `Q − α` for a symbolic `α` of valuation `shift_val`.
pub(crate) fn shifted_polygon(
    q: &TruncatedSeries,
    shift_val: Rat,
) -> Result<NewtonPolygon> {
    let field = q.field();
    let mut known: Vec<(i64, Rat)> = vec![(0, shift_val)];
    let mut censored: Vec<(i64, Rat)> = Vec::new();
    for i in 1..q.trunc() {
        match field.valuation(&q.coeff(i)) {
            Val::Exact(v) => known.push((i as i64, Rat::int(v))),
            Val::AtLeast(m) => censored.push((i as i64, Rat::int(m))),
        }
    }
    NewtonPolygon::from_rational_points(&known, &censored)
}

/// Iterate the polygon recursion for `levels` steps starting from a root
/// of valuation `alpha0_valuation > 0`.
pub fn valuation_sequence(
    q: &TruncatedSeries,
    alpha0_valuation: Rat,
    levels: u32,
) -> Result<ValuationTrace> {
    let s = match q.weierstrass_degree() {
        Wideg::Finite(s) if s >= 2 => s,
        Wideg::Finite(_) => {
            return Err(Error::WrongShape(
                "Q is invertible; valuation dynamics need wideg ≥ 2".into(),
            ))
        }
        Wideg::ZeroReduction => {
            return Err(Error::WrongShape(
                "Q vanishes mod the maximal ideal up to the truncation".into(),
            ))
        }
    };
    if !alpha0_valuation.is_positive() {
        return Err(Error::InvalidInput(
            "alpha_0 must have positive valuation".into(),
        ));
    }
    let mut entries = Vec::with_capacity(levels as usize + 1);
    let mut v = alpha0_valuation;
    let mut degree_est: i64 = 1;
    for n in 0..=levels {
        let polygon = shifted_polygon(q, v)?;
        if polygon.precision_limited {
            return Err(Error::PolygonAmbiguous(format!(
                "level {n}: a below-precision coefficient could cut the hull"
            )));
        }
        let roots = polygon.disk_root_valuations();
        if roots.is_empty() {
            return Err(Error::PolygonAmbiguous(format!(
                "level {n}: no roots in the open unit disk"
            )));
        }
        let single = roots.len() == 1 && roots[0].1 == s as i64 && roots[0].0 == v / Rat::int(s as i64);
        entries.push(TraceEntry {
            n,
            v,
            degree_est,
            single_slope: single,
        });
        if n == levels {
            break;
        }
        // descend along the maximal-valuation root (the leftmost segment)
        let v_next = roots[0].0;
        // relative slope in level-normalized units fixes the ramification
        let rel = v_next.scale(degree_est);
        degree_est = degree_est
            .checked_mul(rel.den())
            .ok_or_else(|| Error::InvalidInput("degree estimate overflow".into()))?;
        v = v_next;
    }
    // n0: first index from which single_slope holds onward
    let mut n0 = None;
    for i in (0..entries.len()).rev() {
        if entries[i].single_slope {
            n0 = Some(entries[i].n);
        } else {
            break;
        }
    }
    let last = entries.last().unwrap();
    let stable = last.v.scale(last.degree_est);
    let d_stable = if stable.is_integer() {
        Some(stable.num())
    } else {
        None
    };
    Ok(ValuationTrace {
        entries,
        n0,
        d_stable,
        s,
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

    fn q3(m: u32) -> Arc<Field> {
        Field::new(LocalFieldSpec {
            p: 3,
            h: 1,
            eisenstein: vec![-3, 1],
            precision: m,
        })
        .unwrap()
    }

    #[test]
    fn cyclotomic_tower_over_q2() {
        // Q = T² + 2T, α_0 = −2: v(α_n) = 2^{−n}
        let f = q2(32);
        let q = TruncatedSeries::from_integers(&f, &[2, 1], 16);
        let trace = valuation_sequence(&q, Rat::int(1), 10).unwrap();
        for (n, e) in trace.entries.iter().enumerate() {
            assert_eq!(e.v, Rat::new(1, 1 << n), "level {n}");
            assert!(e.single_slope, "level {n}");
            assert_eq!(e.degree_est, 1 << n, "level {n}");
        }
        assert_eq!(trace.n0, Some(0));
        assert_eq!(trace.d_stable, Some(1));
    }

    #[test]
    fn lubin_tate_tower_over_q3() {
        // Q = 3T + T³, α_0 of valuation 1/2: v(α_n) = (1/2)·3^{−n}
        let f = q3(32);
        let q = TruncatedSeries::from_integers(&f, &[3, 0, 1], 16);
        let trace = valuation_sequence(&q, Rat::new(1, 2), 6).unwrap();
        let mut den = 2i64;
        for e in &trace.entries {
            assert_eq!(e.v, Rat::new(1, den));
            assert!(e.single_slope);
            den *= 3;
        }
        assert_eq!(trace.d_stable, Some(1));
    }

    #[test]
    fn ratio_law() {
        let f = q2(32);
        let q = TruncatedSeries::from_integers(&f, &[2, 1], 16);
        let trace = valuation_sequence(&q, Rat::int(1), 8).unwrap();
        let s = trace.s as i64;
        for w in trace.entries.windows(2) {
            if w[0].n >= trace.n0.unwrap_or(0) {
                assert_eq!(w[1].v, w[0].v / Rat::int(s));
            }
        }
    }
}
