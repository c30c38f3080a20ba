//! Newton polygons: lower convex hulls of `(index, valuation)` points with
//! exact rational slopes.
//!
//! Slopes are the negatives of root valuations; a slope's horizontal
//! length is the number of roots (with multiplicity) at that valuation.
//! Coefficients whose valuation is only known as "`≥ m`" are omitted from
//! the point set but raise a `precision_limited` flag whenever the hidden
//! point could cut the hull.

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field::Val;
use crate::rat::Rat;
use crate::Result;

/// One slope segment: `(slope, horizontal length)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Slope {
    pub slope: Rat,
    pub length: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NewtonPolygon {
    /// Hull vertices `(index, valuation)` in increasing index order.
    pub vertices: Vec<(i64, Rat)>,
    /// Slopes between consecutive vertices, strictly increasing.
    pub slopes: Vec<Slope>,
    /// Set when a below-precision coefficient could cut the hull.
    pub precision_limited: bool,
}

impl NewtonPolygon {
    /// Build the polygon from `(index, valuation)` data. `Val::AtLeast`
    /// entries are censored points; they are excluded from the hull but
    /// checked against it afterwards.
    pub fn from_points(points: &[(i64, Val)]) -> Result<NewtonPolygon> {
        let known: Vec<(i64, Rat)> = points
            .iter()
            .filter_map(|&(i, v)| v.exact().map(|x| (i, Rat::int(x))))
            .collect();
        let censored: Vec<(i64, Rat)> = points
            .iter()
            .filter_map(|&(i, v)| match v {
                Val::AtLeast(m) => Some((i, Rat::int(m))),
                Val::Exact(_) => None,
            })
            .collect();
        Self::from_rational_points(&known, &censored)
    }

    /// Build from already-rational valuations (used by the symbolic
    /// valuation recursion where shifts have fractional valuation).
    pub fn from_rational_points(
        known: &[(i64, Rat)],
        censored: &[(i64, Rat)],
    ) -> Result<NewtonPolygon> {
        if known.is_empty() {
            return Err(Error::AllCoefficientsBelowPrecision);
        }
        let mut pts = known.to_vec();
        pts.sort_by_key(|&(i, _)| i);
        // keep the lowest valuation at each index
        let mut dedup: Vec<(i64, Rat)> = Vec::with_capacity(pts.len());
        for (i, v) in pts {
            match dedup.last_mut() {
                Some((li, lv)) if *li == i => {
                    if v < *lv {
                        *lv = v;
                    }
                }
                _ => dedup.push((i, v)),
            }
        }
        // monotone-chain lower hull
        let mut hull: Vec<(i64, Rat)> = Vec::new();
        for &(i, v) in &dedup {
            while hull.len() >= 2 {
                let (x1, y1) = hull[hull.len() - 2];
                let (x2, y2) = hull[hull.len() - 1];
                // keep (x2,y2) only if it is a strict corner:
                // slope(x1→x2) < slope(x2→(i,v))
                let lhs = (y2 - y1).scale(i - x2);
                let rhs = (v - y2).scale(x2 - x1);
                if lhs < rhs {
                    break;
                }
                hull.pop();
            }
            hull.push((i, v));
        }
        let slopes: Vec<Slope> = hull
            .windows(2)
            .map(|w| {
                let (x1, y1) = w[0];
                let (x2, y2) = w[1];
                Slope {
                    slope: (y2 - y1) / Rat::int(x2 - x1),
                    length: x2 - x1,
                }
            })
            .collect();
        let mut polygon = NewtonPolygon {
            vertices: hull,
            slopes,
            precision_limited: false,
        };
        for &(i, floor) in censored {
            if polygon.could_cut(i, floor) {
                polygon.precision_limited = true;
                break;
            }
        }
        Ok(polygon)
    }

    /// Whether a point at index `i` with valuation possibly as low as
    /// `floor` would lie strictly below the hull or below the extension of
    /// its first/last segment beyond the endpoints.
    fn could_cut(&self, i: i64, floor: Rat) -> bool {
        if let Some(hv) = self.height_at(i) {
            return floor < hv;
        }
        if self.slopes.is_empty() {
            // a single known point constrains nothing
            return true;
        }
        let (x1, y1) = self.vertices[0];
        let (x2, y2) = *self.vertices.last().unwrap();
        if i < x1 {
            let ext = y1 + self.slopes[0].slope.scale(i - x1);
            floor < ext
        } else {
            let ext = y2 + self.slopes.last().unwrap().slope.scale(i - x2);
            floor < ext
        }
    }

    /// Height of the hull at abscissa `i`, if within range.
    pub fn height_at(&self, i: i64) -> Option<Rat> {
        let (first_i, _) = *self.vertices.first()?;
        let (last_i, _) = *self.vertices.last()?;
        if i < first_i || i > last_i {
            return None;
        }
        for w in self.vertices.windows(2) {
            let (x1, y1) = w[0];
            let (x2, y2) = w[1];
            if i >= x1 && i <= x2 {
                return Some(y1 + (y2 - y1) * Rat::new(i - x1, x2 - x1));
            }
        }
        self.vertices.last().map(|&(_, v)| v)
    }

    /// Root valuations in the open unit disk: `(valuation, multiplicity)`
    /// for every strictly negative slope, valuation = −slope.
    pub fn disk_root_valuations(&self) -> Vec<(Rat, i64)> {
        self.slopes
            .iter()
            .filter(|s| s.slope.is_negative())
            .map(|s| (-s.slope, s.length))
            .collect()
    }

    pub fn single_slope(&self) -> bool {
        self.slopes.len() == 1
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pt(i: i64, v: i64) -> (i64, Val) {
        (i, Val::Exact(v))
    }

    #[test]
    fn eisenstein_quadratic_single_slope() {
        // T² + 2T + 2 over Q_2: points (0,1),(1,1),(2,0)
        let p = NewtonPolygon::from_points(&[pt(0, 1), pt(1, 1), pt(2, 0)]).unwrap();
        assert_eq!(p.vertices, vec![(0, Rat::int(1)), (2, Rat::zero())]);
        assert_eq!(
            p.slopes,
            vec![Slope {
                slope: Rat::new(-1, 2),
                length: 2
            }]
        );
        assert!(p.single_slope());
    }

    #[test]
    fn shifted_series() {
        // T² + 2T over Q_2 (no constant point): vertices (1,1),(2,0)
        let p = NewtonPolygon::from_points(&[pt(1, 1), pt(2, 0)]).unwrap();
        assert_eq!(p.vertices, vec![(1, Rat::int(1)), (2, Rat::zero())]);
        assert_eq!(p.slopes[0].slope, Rat::int(-1));
        assert_eq!(p.slopes[0].length, 1);
    }

    #[test]
    fn two_slopes() {
        // T² + 3T + 2 over Q_2: roots -1, -2 → slopes -1, 0
        let p = NewtonPolygon::from_points(&[pt(0, 1), pt(1, 0), pt(2, 0)]).unwrap();
        assert_eq!(p.slopes.len(), 2);
        assert_eq!(p.slopes[0].slope, Rat::int(-1));
        assert_eq!(p.slopes[0].length, 1);
        assert_eq!(p.slopes[1].slope, Rat::zero());
        assert_eq!(p.slopes[1].length, 1);
        assert_eq!(p.disk_root_valuations(), vec![(Rat::int(1), 1)]);
    }

    #[test]
    fn censored_point_flags() {
        // point at index 1 known only as ≥ 0, strictly below the hull line
        // between (0,2) and (2,0)
        let p = NewtonPolygon::from_points(&[pt(0, 2), (1, Val::AtLeast(0)), pt(2, 0)]).unwrap();
        assert!(p.precision_limited);
        let p = NewtonPolygon::from_points(&[pt(0, 2), (1, Val::AtLeast(5)), pt(2, 0)]).unwrap();
        assert!(!p.precision_limited);
    }

    #[test]
    fn empty_rejected() {
        let err = NewtonPolygon::from_points(&[(0, Val::AtLeast(8)), (1, Val::AtLeast(8))]);
        assert!(matches!(err, Err(Error::AllCoefficientsBelowPrecision)));
    }

    #[test]
    fn collinear_points_merge() {
        let p = NewtonPolygon::from_points(&[pt(0, 2), pt(1, 1), pt(2, 0)]).unwrap();
        assert_eq!(p.slopes.len(), 1);
        assert_eq!(p.slopes[0].length, 2);
    }
}
