//! Fixed-point valuations of an invertible series: the Newton polygon of
//! `(U^{∘k}(T) − T)/T`, whose negative slopes are the valuations of the
//! nonzero fixed points of `U^{∘k}` in the open unit disk.

use crate::error::Error;
use crate::field::Val;
use crate::newton::NewtonPolygon;
use crate::series::TruncatedSeries;
use crate::Result;

pub fn fixed_point_valuations(u: &TruncatedSeries, k: u32) -> Result<NewtonPolygon> {
    let field = u.field().clone();
    if field.valuation(&u.linear_coeff()) != Val::Exact(0) {
        return Err(Error::WrongShape("U must be invertible".into()));
    }
    if k < 1 {
        return Err(Error::InvalidInput("iterate count must be >= 1".into()));
    }
    let iter = u.iterate(k)?;
    let g = iter.sub(&TruncatedSeries::identity(&field, iter.trunc()))?;
    // divide out the trivial fixed point at 0 and take the polygon
    let points: Vec<(i64, Val)> = (1..g.trunc())
        .map(|i| ((i - 1) as i64, field.valuation(&g.coeff(i))))
        .collect();
    // a degenerate (identically zero at precision) series has no polygon
    NewtonPolygon::from_points(&points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{Field, LocalFieldSpec};
    use crate::rat::Rat;
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
    fn cube_map_fixed_points() {
        // U = (1+T)³−1 over Q_2, k = 1: (U−T)/T = T² + 3T + 2,
        // slopes −1 (length 1) and 0 (length 1)
        let f = q2(32);
        let u = TruncatedSeries::from_integers(&f, &[3, 3, 1], 8);
        let poly = fixed_point_valuations(&u, 1).unwrap();
        assert_eq!(poly.slopes.len(), 2);
        assert_eq!(poly.slopes[0].slope, Rat::int(-1));
        assert_eq!(poly.slopes[0].length, 1);
        assert_eq!(poly.slopes[1].slope, Rat::zero());
        assert_eq!(poly.slopes[1].length, 1);
        // only the valuation-1 root lies in the open unit disk
        assert_eq!(poly.disk_root_valuations(), vec![(Rat::int(1), 1)]);
    }

    #[test]
    fn identity_is_degenerate() {
        let f = q2(32);
        let t = TruncatedSeries::identity(&f, 8);
        assert!(matches!(
            fixed_point_valuations(&t, 3),
            Err(Error::AllCoefficientsBelowPrecision)
        ));
    }
}
