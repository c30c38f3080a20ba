//! Quotient-ring towers over a consistent root sequence: level 0 is `O_E`
//! at working precision, level `n+1` adjoins `x_{n+1}` with
//! `Q(x_{n+1}) = x_n`, the defining relation being the distinguished part
//! of `Q(T) − x_n` (with the trivial root divided out at level 1).
//!
//! Each level carries an irreducibility certificate derived from the
//! Newton polygon of `Q − x_n` in level-normalized valuation: a single
//! slope whose reduced denominator equals the Weierstrass degree
//! certifies that the quotient is a field.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::valuations::shifted_polygon;
use crate::error::Error;
use crate::field::{Field, OkElem};
use crate::rat::Rat;
use crate::ring::{self, RingOps};
use crate::series::{TruncatedSeries, Wideg};
use crate::Result;

/// An element of a tower level: a leaf of the base ring, or coefficients
/// over the level below (always stored at full length).
#[derive(Debug, Clone)]
pub enum TElem {
    Base(OkElem),
    Ext(Vec<TElem>),
}

/// Per-level irreducibility certificate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum IrredCert {
    /// The polygon of `Q − x_{n−1}` has one slope whose denominator in
    /// lowest terms (level-normalized) equals the relation degree.
    SingleSlopeFullDenominator,
    None,
}

#[derive(Debug, Clone)]
pub struct TowerLevel {
    /// Monic defining relation, coefficients at the level below.
    pub relation: Vec<TElem>,
    pub degree: usize,
    pub cert: IrredCert,
    /// `v_K` of the level generator.
    pub gen_val: Rat,
    /// Value-group index of the level over `v_K`.
    pub ram: i64,
    /// Rank over `O_E`.
    pub rank: usize,
}

#[derive(Debug, Clone)]
pub struct QuotientTower {
    field: Arc<Field>,
    q: TruncatedSeries,
    pub levels: Vec<TowerLevel>,
}

/// Ring-operations handle for one level (level 0 is the base field).
#[derive(Clone, Copy)]
pub struct TowerRing<'a> {
    pub tower: &'a QuotientTower,
    pub level: usize,
}

impl QuotientTower {
    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn q(&self) -> &TruncatedSeries {
        &self.q
    }

    pub fn ring(&self, level: usize) -> TowerRing<'_> {
        TowerRing { tower: self, level }
    }

    /// Build `levels` levels over `Q` (all coefficients read as the exact
    /// polynomial representative). Requires the reduction of `Q` to be the
    /// monomial `T^s`.
    pub fn build(field: &Arc<Field>, q: &TruncatedSeries, levels: u32) -> Result<QuotientTower> {
        if field.fingerprint() != q.field().fingerprint() {
            return Err(Error::SpecMismatch);
        }
        let s = match q.weierstrass_degree() {
            Wideg::Finite(s) if s >= 2 => s,
            _ => {
                return Err(Error::WrongShape(
                    "tower requires a noninvertible Q with finite Weierstrass degree".into(),
                ))
            }
        };
        // reduction must be exactly T^s up to the truncation
        {
            let rbar = q.reduce();
            for i in 1..q.trunc() {
                let ok = if i == s {
                    rbar.coeff(i) == field.residue_field().one()
                } else {
                    field.residue_field().is_zero(&rbar.coeff(i))
                };
                if !ok {
                    return Err(Error::InvalidInput(
                        "tower requires reduce(Q) = T^{p^d}; run normalization first".into(),
                    ));
                }
            }
        }
        let hensel_iters = 4 + (field.precision() as f64).log2().ceil() as u32;
        let mut tower = QuotientTower {
            field: field.clone(),
            q: q.clone(),
            levels: Vec::with_capacity(levels as usize),
        };
        for n in 1..=levels {
            let level = if n == 1 {
                tower.build_level_one(s, hensel_iters)?
            } else {
                tower.build_next_level(s, hensel_iters)?
            };
            tower.levels.push(level);
        }
        Ok(tower)
    }

    fn build_level_one(&self, s: usize, iters: u32) -> Result<TowerLevel> {
        let field = &self.field;
        // divide out the trivial root: a = Q/T
        let mut a: Vec<OkElem> = (1..self.q.trunc()).map(|i| self.q.coeff(i)).collect();
        trim_negligible_base(field, &mut a);
        if a.len() < 2 {
            return Err(Error::RelationDegenerate(
                "Q/T has no nonzero disk root at this precision".into(),
            ));
        }
        let (w, _u) = ring::weierstrass_factor(&**field, &a, a.len(), iters)?;
        let degree = w.len() - 1;
        debug_assert_eq!(degree, s - 1);
        // certificate from the polygon of Q/T in base valuation
        let poly = {
            let pts: Vec<(i64, crate::field::Val)> = a
                .iter()
                .enumerate()
                .map(|(i, c)| (i as i64, field.valuation(c)))
                .collect();
            crate::newton::NewtonPolygon::from_points(&pts)?
        };
        let roots = poly.disk_root_valuations();
        let (cert, gen_val) = certificate_from_roots(&roots, degree, 1, poly.precision_limited);
        let ram = lcm(1, gen_val.den());
        Ok(TowerLevel {
            relation: w.into_iter().map(TElem::Base).collect(),
            degree,
            cert,
            gen_val,
            ram,
            rank: degree,
        })
    }

    fn build_next_level(&self, s: usize, iters: u32) -> Result<TowerLevel> {
        let prev_idx = self.levels.len(); // building level prev_idx + 1
        let prev = &self.levels[prev_idx - 1];
        // symbolic certificate from the polygon of Q − x_{prev}
        let poly = shifted_polygon(&self.q, prev.gen_val)?;
        let roots = poly.disk_root_valuations();
        let (cert, gen_val) =
            certificate_from_roots(&roots, s, prev.ram, poly.precision_limited);
        let ram = lcm(prev.ram, gen_val.den());
        // relation: distinguished part of Q(T) − x_{prev} over level prev
        let lower = self.ring(prev_idx);
        let x_prev = self.generator(prev_idx)?;
        let mut a: Vec<TElem> = Vec::with_capacity(self.q.trunc());
        a.push(lower.neg(&x_prev)?);
        for i in 1..self.q.trunc() {
            a.push(lower.from_base(&self.q.coeff(i))?);
        }
        trim_negligible(&lower, &mut a);
        let (w, _u) = ring::weierstrass_factor(&lower, &a, a.len(), iters)?;
        if w.len() - 1 != s {
            return Err(Error::RelationDegenerate(format!(
                "distinguished part has degree {} instead of {s}",
                w.len() - 1
            )));
        }
        Ok(TowerLevel {
            relation: w,
            degree: s,
            cert,
            gen_val,
            ram,
            rank: prev.rank * s,
        })
    }

    /// Rebuild a tower from serialized relation data (no factorization);
    /// shapes are validated, certificates recomputed symbolically.
    pub fn from_relations(
        field: &Arc<Field>,
        q: &TruncatedSeries,
        relations: Vec<Vec<TElem>>,
    ) -> Result<QuotientTower> {
        let s = match q.weierstrass_degree() {
            Wideg::Finite(s) => s,
            Wideg::ZeroReduction => {
                return Err(Error::WrongShape("Q vanishes mod the maximal ideal".into()))
            }
        };
        let mut tower = QuotientTower {
            field: field.clone(),
            q: q.clone(),
            levels: Vec::new(),
        };
        for (idx, relation) in relations.into_iter().enumerate() {
            let degree = relation.len() - 1;
            let (cert, gen_val, ram, rank) = if idx == 0 {
                let gv = Rat::new(1, degree.max(1) as i64); // provisional
                (IrredCert::None, gv, gv.den(), degree)
            } else {
                let prev = &tower.levels[idx - 1];
                let poly = shifted_polygon(q, prev.gen_val)?;
                let roots = poly.disk_root_valuations();
                let (cert, gv) =
                    certificate_from_roots(&roots, s, prev.ram, poly.precision_limited);
                (cert, gv, lcm(prev.ram, gv.den()), prev.rank * degree)
            };
            // level-1 certificate recomputed from Q/T
            let (cert, gen_val) = if idx == 0 {
                let mut a: Vec<OkElem> = (1..q.trunc()).map(|i| q.coeff(i)).collect();
                trim_negligible_base(field, &mut a);
                let pts: Vec<(i64, crate::field::Val)> = a
                    .iter()
                    .enumerate()
                    .map(|(i, c)| (i as i64, field.valuation(c)))
                    .collect();
                let poly = crate::newton::NewtonPolygon::from_points(&pts)?;
                let roots = poly.disk_root_valuations();
                certificate_from_roots(&roots, degree, 1, poly.precision_limited)
            } else {
                (cert, gen_val)
            };
            let ram = if idx == 0 { gen_val.den() } else { ram };
            tower.levels.push(TowerLevel {
                relation,
                degree,
                cert,
                gen_val,
                ram,
                rank,
            });
        }
        Ok(tower)
    }

    /// The generator `x_level` as an element of its own level (level ≥ 1).
    pub fn generator(&self, level: usize) -> Result<TElem> {
        if level == 0 || level > self.levels.len() {
            return Err(Error::TowerMismatch);
        }
        let data = &self.levels[level - 1];
        let ring = self.ring(level);
        let lower = self.ring(level - 1);
        if data.degree == 1 {
            // quotient by a linear relation: x = −w_0, an element of the
            // lower level wrapped in the level's shape
            let root = lower.neg(&data.relation[0])?;
            Ok(TElem::Ext(vec![root]))
        } else {
            let mut coeffs = vec![lower_zero(&lower); data.degree];
            coeffs[1] = lower.one();
            let _ = ring;
            Ok(TElem::Ext(coeffs))
        }
    }

    /// Embed an element from `from_level` into `to_level ≥ from_level`.
    pub fn embed(&self, elt: &TElem, from_level: usize, to_level: usize) -> Result<TElem> {
        if from_level > to_level || to_level > self.levels.len() {
            return Err(Error::TowerMismatch);
        }
        let mut cur = elt.clone();
        for lvl in from_level..to_level {
            let deg = self.levels[lvl].degree;
            let lower = self.ring(lvl);
            let mut coeffs = vec![lower_zero(&lower); deg.max(1)];
            coeffs[0] = cur;
            cur = TElem::Ext(coeffs);
        }
        Ok(cur)
    }

    /// Evaluate a truncated series at a level element by Horner, capping
    /// the result precision by `⌊trunc·v_floor⌋` to account for the
    /// series' unknown tail at arguments of valuation ≥ `v_floor`.
    pub fn evaluate(
        &self,
        f: &TruncatedSeries,
        level: usize,
        x: &TElem,
        v_floor: Rat,
    ) -> Result<TElem> {
        if f.field().fingerprint() != self.field.fingerprint() {
            return Err(Error::TowerMismatch);
        }
        let ring = self.ring(level);
        let coeffs: Vec<TElem> = (0..f.trunc())
            .map(|i| ring.from_base(&f.coeff(i)))
            .collect::<Result<_>>()?;
        let val = ring::poly_eval(&ring, &coeffs, x)?;
        if !v_floor.is_positive() {
            return Err(Error::InvalidInput(
                "evaluation point must have positive valuation floor".into(),
            ));
        }
        let cap = v_floor.scale(f.trunc() as i64).floor();
        if cap < 1 {
            return Err(Error::PrecisionExhausted(
                "series tail dominates at this valuation".into(),
            ));
        }
        Ok(cap_precision(&self.field, &val, cap as u32))
    }

    /// Evaluate the level's defining relation at an element of that level.
    pub fn eval_relation(&self, level: usize, z: &TElem) -> Result<TElem> {
        if level == 0 || level > self.levels.len() {
            return Err(Error::TowerMismatch);
        }
        let ring = self.ring(level);
        let coeffs: Vec<TElem> = self.levels[level - 1]
            .relation
            .iter()
            .map(|c| self.embed(c, level - 1, level))
            .collect::<Result<_>>()?;
        ring::poly_eval(&ring, &coeffs, z)
    }

    /// Minimum leaf precision of an element.
    pub fn min_precision(&self, elt: &TElem) -> u32 {
        match elt {
            TElem::Base(x) => x.precision(),
            TElem::Ext(cs) => cs.iter().map(|c| self.min_precision(c)).min().unwrap_or(0),
        }
    }

    pub fn congruent(&self, level: usize, a: &TElem, b: &TElem) -> Result<bool> {
        let ring = self.ring(level);
        let d = ring.sub(a, b)?;
        Ok(ring.is_zero(&d))
    }
}

fn lower_zero(ring: &TowerRing<'_>) -> TElem {
    ring.zero()
}

fn cap_precision(field: &Field, elt: &TElem, prec: u32) -> TElem {
    match elt {
        TElem::Base(x) => TElem::Base(field.cap_precision(x, prec)),
        TElem::Ext(cs) => TElem::Ext(cs.iter().map(|c| cap_precision(field, c, prec)).collect()),
    }
}

fn trim_negligible_base(field: &Field, a: &mut Vec<OkElem>) {
    while a.len() > 1 {
        let last = a.last().unwrap();
        if field.is_zero(last) && last.precision() >= field.precision() {
            a.pop();
        } else {
            break;
        }
    }
}

fn trim_negligible(ring: &TowerRing<'_>, a: &mut Vec<TElem>) {
    while a.len() > 1 {
        if ring.is_negligible(a.last().unwrap()) {
            a.pop();
        } else {
            break;
        }
    }
}

fn certificate_from_roots(
    roots: &[(Rat, i64)],
    degree: usize,
    lower_ram: i64,
    precision_limited: bool,
) -> (IrredCert, Rat) {
    if roots.is_empty() {
        // no disk roots visible; caller will fail later on the relation
        return (IrredCert::None, Rat::new(1, degree.max(1) as i64));
    }
    let single = roots.len() == 1 && roots[0].1 == degree as i64;
    let gen_val = roots[0].0; // maximal valuation root (conservative cap)
    if precision_limited || !single {
        return (IrredCert::None, gen_val);
    }
    // full denominator in level-normalized units
    let rel = gen_val.scale(lower_ram);
    if rel.den() == degree as i64 {
        (IrredCert::SingleSlopeFullDenominator, gen_val)
    } else {
        (IrredCert::None, gen_val)
    }
}

fn lcm(a: i64, b: i64) -> i64 {
    let g = {
        let (mut x, mut y) = (a.abs(), b.abs());
        while y != 0 {
            let r = x % y;
            x = y;
            y = r;
        }
        x.max(1)
    };
    a / g * b
}

impl<'a> RingOps for TowerRing<'a> {
    type El = TElem;

    fn zero(&self) -> TElem {
        if self.level == 0 {
            TElem::Base(self.tower.field.zero())
        } else {
            let deg = self.tower.levels[self.level - 1].degree;
            let lower = self.tower.ring(self.level - 1);
            TElem::Ext(vec![lower.zero(); deg.max(1)])
        }
    }

    fn one(&self) -> TElem {
        if self.level == 0 {
            TElem::Base(self.tower.field.one())
        } else {
            let deg = self.tower.levels[self.level - 1].degree;
            let lower = self.tower.ring(self.level - 1);
            let mut coeffs = vec![lower.zero(); deg.max(1)];
            coeffs[0] = lower.one();
            TElem::Ext(coeffs)
        }
    }

    fn add(&self, a: &TElem, b: &TElem) -> Result<TElem> {
        match (a, b) {
            (TElem::Base(x), TElem::Base(y)) if self.level == 0 => {
                Ok(TElem::Base(self.tower.field.add(x, y)?))
            }
            (TElem::Ext(xs), TElem::Ext(ys)) if self.level > 0 && xs.len() == ys.len() => {
                let lower = self.tower.ring(self.level - 1);
                let coeffs = xs
                    .iter()
                    .zip(ys)
                    .map(|(x, y)| lower.add(x, y))
                    .collect::<Result<_>>()?;
                Ok(TElem::Ext(coeffs))
            }
            _ => Err(Error::TowerMismatch),
        }
    }

    fn sub(&self, a: &TElem, b: &TElem) -> Result<TElem> {
        self.add(a, &self.neg(b)?)
    }

    fn neg(&self, a: &TElem) -> Result<TElem> {
        match a {
            TElem::Base(x) if self.level == 0 => Ok(TElem::Base(self.tower.field.neg(x)?)),
            TElem::Ext(xs) if self.level > 0 => {
                let lower = self.tower.ring(self.level - 1);
                Ok(TElem::Ext(
                    xs.iter().map(|x| lower.neg(x)).collect::<Result<_>>()?,
                ))
            }
            _ => Err(Error::TowerMismatch),
        }
    }

    fn mul(&self, a: &TElem, b: &TElem) -> Result<TElem> {
        match (a, b) {
            (TElem::Base(x), TElem::Base(y)) if self.level == 0 => {
                Ok(TElem::Base(self.tower.field.mul(x, y)?))
            }
            (TElem::Ext(xs), TElem::Ext(ys)) if self.level > 0 && xs.len() == ys.len() => {
                let lower = self.tower.ring(self.level - 1);
                let data = &self.tower.levels[self.level - 1];
                let wide = ring::poly_mul(&lower, xs, ys, None)?;
                let (_, mut rem) = ring::poly_divmod_monic(&lower, &wide, &data.relation)?;
                rem.resize(data.degree.max(1), lower.zero());
                Ok(TElem::Ext(rem))
            }
            _ => Err(Error::TowerMismatch),
        }
    }

    fn from_base(&self, x: &OkElem) -> Result<TElem> {
        self.tower.embed(&TElem::Base(x.clone()), 0, self.level)
    }

    fn is_zero(&self, a: &TElem) -> bool {
        match a {
            TElem::Base(x) => self.tower.field.is_zero(x),
            TElem::Ext(cs) => {
                let lower = self.tower.ring(self.level.saturating_sub(1));
                cs.iter().all(|c| lower.is_zero(c))
            }
        }
    }

    fn is_negligible(&self, a: &TElem) -> bool {
        match a {
            TElem::Base(x) => {
                self.tower.field.is_zero(x) && x.precision() >= self.tower.field.precision()
            }
            TElem::Ext(cs) => {
                let lower = self.tower.ring(self.level.saturating_sub(1));
                cs.iter().all(|c| lower.is_negligible(c))
            }
        }
    }

    fn residue_is_zero(&self, a: &TElem) -> bool {
        match a {
            TElem::Base(x) => self
                .tower
                .field
                .residue_field()
                .is_zero(&self.tower.field.residue(x)),
            TElem::Ext(cs) => {
                let lower = self.tower.ring(self.level.saturating_sub(1));
                lower.residue_is_zero(&cs[0])
            }
        }
    }

    fn invert_unit(&self, a: &TElem) -> Result<TElem> {
        if self.level == 0 {
            return match a {
                TElem::Base(x) => Ok(TElem::Base(self.tower.field.inv(x)?)),
                _ => Err(Error::TowerMismatch),
            };
        }
        if self.residue_is_zero(a) {
            return Err(Error::NotAUnit(crate::field::Val::AtLeast(0)));
        }
        // Newton from the residue inverse: y ← y(2 − ay); (π, x_i) is
        // topologically nilpotent so convergence is m-adic
        let residue = self.residue_of(a);
        let r_inv = self.tower.field.residue_field().inv(&residue)?;
        let mut y = self.from_base(&self.tower.field.lift_residue(&r_inv))?;
        let one = self.one();
        let max_iter = 8 + 2 * (self.tower.field.precision() as f64).log2().ceil() as u32
            + 4 * self.level as u32;
        for _ in 0..max_iter {
            let ay = self.mul(a, &y)?;
            if self.is_zero(&self.sub(&ay, &one)?) {
                return Ok(y);
            }
            let corr = self.sub(&self.add(&one, &one)?, &ay)?;
            y = self.mul(&y, &corr)?;
        }
        Err(Error::PrecisionExhausted(
            "unit inversion in tower did not converge".into(),
        ))
    }
}

impl<'a> TowerRing<'a> {
    fn residue_of(&self, a: &TElem) -> crate::field::ResidueElem {
        match a {
            TElem::Base(x) => self.tower.field.residue(x),
            TElem::Ext(cs) => self.tower.ring(self.level.saturating_sub(1)).residue_of(&cs[0]),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::LocalFieldSpec;

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
    fn level_one_linear() {
        // Q = T² + 2T: level 1 is Z_2[x]/(x + 2), x = −2
        let f = q2(32);
        let q = TruncatedSeries::from_integers(&f, &[2, 1], 16);
        let tower = QuotientTower::build(&f, &q, 1).unwrap();
        assert_eq!(tower.levels[0].degree, 1);
        let x1 = tower.generator(1).unwrap();
        let expect = tower.ring(1).from_base(&f.from_i64(-2)).unwrap();
        assert!(tower.congruent(1, &x1, &expect).unwrap());
        assert_eq!(tower.levels[0].gen_val, Rat::int(1));
        assert_eq!(
            tower.levels[0].cert,
            IrredCert::SingleSlopeFullDenominator
        );
    }

    #[test]
    fn level_two_eisenstein() {
        // level 2 relation: x² + 2x + 2 = 0 (since x_1 = −2)
        let f = q2(32);
        let q = TruncatedSeries::from_integers(&f, &[2, 1], 16);
        let tower = QuotientTower::build(&f, &q, 2).unwrap();
        let lvl = &tower.levels[1];
        assert_eq!(lvl.degree, 2);
        assert_eq!(lvl.cert, IrredCert::SingleSlopeFullDenominator);
        assert_eq!(lvl.gen_val, Rat::new(1, 2));
        assert_eq!(lvl.ram, 2);
        // relation coefficients live at level 1: check against 2, 2, 1
        let lower = tower.ring(1);
        for (i, expect) in [2i64, 2, 1].iter().enumerate() {
            let e = lower.from_base(&f.from_i64(*expect)).unwrap();
            let d = lower.sub(&lvl.relation[i], &e).unwrap();
            assert!(lower.is_zero(&d), "relation coefficient {i}");
        }
        // the defining relation evaluates to zero at the generator
        let x2 = tower.generator(2).unwrap();
        let val = tower.eval_relation(2, &x2).unwrap();
        assert!(tower.ring(2).is_zero(&val));
    }

    #[test]
    fn rank_bookkeeping() {
        let f = q2(48);
        let q = TruncatedSeries::from_integers(&f, &[2, 1], 16);
        let tower = QuotientTower::build(&f, &q, 4).unwrap();
        let ranks: Vec<usize> = tower.levels.iter().map(|l| l.rank).collect();
        assert_eq!(ranks, vec![1, 2, 4, 8]);
        let rams: Vec<i64> = tower.levels.iter().map(|l| l.ram).collect();
        assert_eq!(rams, vec![1, 2, 4, 8]);
    }

    #[test]
    fn q3_tower_shapes() {
        let f = q3(48);
        let q = TruncatedSeries::from_integers(&f, &[3, 3, 1], 16);
        let tower = QuotientTower::build(&f, &q, 3).unwrap();
        assert_eq!(tower.levels[0].degree, 2);
        assert_eq!(tower.levels[0].gen_val, Rat::new(1, 2));
        assert_eq!(tower.levels[1].degree, 3);
        assert_eq!(tower.levels[1].gen_val, Rat::new(1, 6));
        let ranks: Vec<usize> = tower.levels.iter().map(|l| l.rank).collect();
        assert_eq!(ranks, vec![2, 6, 18]);
        for l in &tower.levels {
            assert_eq!(l.cert, IrredCert::SingleSlopeFullDenominator);
        }
        // defining relations hold at the generators
        for lvl in 1..=3 {
            let x = tower.generator(lvl).unwrap();
            let v = tower.eval_relation(lvl, &x).unwrap();
            assert!(tower.ring(lvl).is_zero(&v), "level {lvl}");
        }
    }

    #[test]
    fn quotient_arithmetic_and_inverse() {
        let f = q2(32);
        let q = TruncatedSeries::from_integers(&f, &[2, 1], 16);
        let tower = QuotientTower::build(&f, &q, 2).unwrap();
        let ring2 = tower.ring(2);
        let x2 = tower.generator(2).unwrap();
        // 1 + x2 is a unit (residue 1)
        let u = ring2.add(&ring2.one(), &x2).unwrap();
        let u_inv = ring2.invert_unit(&u).unwrap();
        let prod = ring2.mul(&u, &u_inv).unwrap();
        assert!(ring2.is_zero(&ring2.sub(&prod, &ring2.one()).unwrap()));
        // x2 is not a unit
        assert!(ring2.invert_unit(&x2).is_err());
    }

    #[test]
    fn evaluation_defining_relation() {
        // evaluate Q at x_2 inside level 2: must give x_1 = −2
        let f = q2(64);
        let q = TruncatedSeries::from_integers(&f, &[2, 1], 16);
        let tower = QuotientTower::build(&f, &q, 2).unwrap();
        let x2 = tower.generator(2).unwrap();
        let qx = tower
            .evaluate(&q, 2, &x2, tower.levels[1].gen_val)
            .unwrap();
        let x1 = tower.embed(&tower.generator(1).unwrap(), 1, 2).unwrap();
        assert!(tower.congruent(2, &qx, &x1).unwrap());
        // identity evaluation
        let t = TruncatedSeries::identity(&f, 16);
        let tx = tower
            .evaluate(&t, 2, &x2, tower.levels[1].gen_val)
            .unwrap();
        assert!(tower.congruent(2, &tx, &x2).unwrap());
    }
}
