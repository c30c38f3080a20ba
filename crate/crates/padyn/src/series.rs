//! Truncated power series in `T·O_K[[T]]` and their residue reductions.
//!
//! A [`TruncatedSeries`] is known modulo `(T^D, π^M)`: the constant term
//! is identically zero (all dynamical series fix 0), coefficient `i` is an
//! `O_K` element with its own precision, and `D` is the T-adic truncation.
//! Composition is exact mod `T^D` because the inner series has no constant
//! term, so no T-adic precision is lost.

use std::sync::Arc;

use crate::error::Error;
use crate::field::{Field, OkElem, ResidueElem, Val};
use crate::newton::NewtonPolygon;
use crate::Result;

/// Weierstrass degree outcome: either the first unit-coefficient index or
/// the marker for a series that vanishes mod `m_K` up to the truncation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Wideg {
    Finite(usize),
    ZeroReduction,
}

impl Wideg {
    pub fn finite(&self) -> Option<usize> {
        match *self {
            Wideg::Finite(n) => Some(n),
            Wideg::ZeroReduction => None,
        }
    }
}

/// A power series in `T·O_K[[T]]` known mod `(T^trunc, π^·)`.
#[derive(Debug, Clone)]
pub struct TruncatedSeries {
    field: Arc<Field>,
    /// `coeffs[i]` is the coefficient of `T^i`; index 0 is always zero.
    coeffs: Vec<OkElem>,
    trunc: usize,
}

impl TruncatedSeries {
    pub fn zero(field: &Arc<Field>, trunc: usize) -> TruncatedSeries {
        assert!(trunc >= 2, "truncation must leave room for T");
        TruncatedSeries {
            field: field.clone(),
            coeffs: (0..trunc).map(|_| field.zero()).collect(),
            trunc,
        }
    }

    /// The identity series `T`.
    pub fn identity(field: &Arc<Field>, trunc: usize) -> TruncatedSeries {
        let mut s = Self::zero(field, trunc);
        s.coeffs[1] = field.one();
        s
    }

    /// Series from integer coefficients `[c_1, c_2, ...]` of `T, T², ...`.
    pub fn from_integers(field: &Arc<Field>, coeffs: &[i64], trunc: usize) -> TruncatedSeries {
        let mut s = Self::zero(field, trunc);
        for (k, &c) in coeffs.iter().enumerate() {
            if k + 1 < trunc {
                s.coeffs[k + 1] = field.from_i64(c);
            }
        }
        s
    }

    /// Series from `O_K` coefficients `[c_1, c_2, ...]`.
    pub fn from_coeffs(
        field: &Arc<Field>,
        coeffs: Vec<OkElem>,
        trunc: usize,
    ) -> Result<TruncatedSeries> {
        let mut s = Self::zero(field, trunc);
        for (k, c) in coeffs.into_iter().enumerate() {
            if c.precision() < 1 {
                return Err(Error::PrecisionExhausted(
                    "series coefficient has precision 0".into(),
                ));
            }
            if k + 1 < trunc {
                s.coeffs[k + 1] = c;
            }
        }
        Ok(s)
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    /// Coefficient of `T^i` (zero for `i = 0` or `i >= trunc`).
    pub fn coeff(&self, i: usize) -> OkElem {
        if i == 0 || i >= self.trunc {
            self.field.zero()
        } else {
            self.coeffs[i].clone()
        }
    }

    /// The linear coefficient `f'(0)`.
    pub fn linear_coeff(&self) -> OkElem {
        self.coeff(1)
    }

    pub fn min_precision(&self) -> u32 {
        self.coeffs[1..]
            .iter()
            .map(|c| c.precision())
            .min()
            .unwrap_or(self.field.precision())
    }

    fn check_compat(&self, other: &TruncatedSeries) -> Result<()> {
        if self.field.fingerprint() != other.field.fingerprint() {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    /// A stored coefficient that is zero at full field precision cannot
    /// influence anything representable; used to skip dead work.
    fn coeff_is_full_zero(&self, i: usize) -> bool {
        self.field.is_zero(&self.coeffs[i])
            && self.coeffs[i].precision() >= self.field.precision()
    }

    pub fn truncate(&self, trunc: usize) -> TruncatedSeries {
        let trunc = trunc.min(self.trunc).max(2);
        TruncatedSeries {
            field: self.field.clone(),
            coeffs: self.coeffs[..trunc].to_vec(),
            trunc,
        }
    }

    pub fn add(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compat(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(&self.field, trunc);
        for i in 1..trunc {
            out.coeffs[i] = self.field.add(&self.coeffs[i], &other.coeffs[i])?;
        }
        Ok(out)
    }

    pub fn sub(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compat(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(&self.field, trunc);
        for i in 1..trunc {
            out.coeffs[i] = self.field.sub(&self.coeffs[i], &other.coeffs[i])?;
        }
        Ok(out)
    }

    pub fn negate(&self) -> Result<TruncatedSeries> {
        let mut out = Self::zero(&self.field, self.trunc);
        for i in 1..self.trunc {
            out.coeffs[i] = self.field.neg(&self.coeffs[i])?;
        }
        Ok(out)
    }

    /// Product of two series in `T·O_K[[T]]`; lands in `T²·O_K[[T]]`.
    pub fn mul(&self, other: &TruncatedSeries) -> Result<TruncatedSeries> {
        self.check_compat(other)?;
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(&self.field, trunc);
        for i in 1..self.trunc.min(trunc) {
            if self.coeff_is_full_zero(i) {
                continue;
            }
            for j in 1..other.trunc {
                if i + j >= trunc {
                    break;
                }
                let term = self.field.mul(&self.coeffs[i], &other.coeffs[j])?;
                out.coeffs[i + j] = self.field.add(&out.coeffs[i + j], &term)?;
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &OkElem) -> Result<TruncatedSeries> {
        let mut out = Self::zero(&self.field, self.trunc);
        for i in 1..self.trunc {
            out.coeffs[i] = self.field.mul(&self.coeffs[i], c)?;
        }
        Ok(out)
    }

    /// Composition `self ∘ inner`, requiring `inner(0) = 0`.
    pub fn compose(&self, inner: &TruncatedSeries) -> Result<TruncatedSeries> {
        let trunc = self.trunc.min(inner.trunc);
        self.compose_trunc(inner, trunc)
    }

    /// Composition truncated at `trunc`.
    pub fn compose_trunc(&self, inner: &TruncatedSeries, trunc: usize) -> Result<TruncatedSeries> {
        self.check_compat(inner)?;
        let trunc = trunc.min(self.trunc).min(inner.trunc);
        let inner_t = inner.truncate(trunc);
        let mut result = Self::zero(&self.field, trunc);
        let mut g_pow = inner_t.clone();
        for i in 1..self.trunc.min(trunc) {
            if i > 1 {
                g_pow = g_pow.mul(&inner_t)?;
            }
            if self.coeff_is_full_zero(i) {
                continue;
            }
            let term = g_pow.scale(&self.coeffs[i])?;
            result = result.add(&term)?;
        }
        Ok(result)
    }

    /// `m`-fold self-composition.
    pub fn iterate(&self, m: u32) -> Result<TruncatedSeries> {
        assert!(m >= 1);
        let mut acc = self.clone();
        for _ in 1..m {
            acc = acc.compose(self)?;
        }
        Ok(acc)
    }

    /// Compositional inverse: `g` with `f∘g ≡ g∘f ≡ T` mod `(T^D, π^M)`.
    /// Requires a unit linear coefficient; no precision is lost.
    pub fn compositional_inverse(&self) -> Result<TruncatedSeries> {
        let c1 = self.linear_coeff();
        if !self.field.is_unit(&c1) {
            return Err(Error::NotInvertible);
        }
        let field = &self.field;
        let c1_inv = field.inv(&c1)?;
        let trunc = self.trunc;
        let mut g = Self::zero(field, trunc);
        g.coeffs[1] = c1_inv.clone();
        for n in 2..trunc {
            // with g_n = 0 so far, [f(g)]_n is linear in g_n through c_1·g_n
            let comp = self.compose_trunc(&g, n + 1)?;
            let r = comp.coeff(n);
            g.coeffs[n] = field.neg(&field.mul(&r, &c1_inv)?)?;
        }
        Ok(g)
    }

    /// Smallest index with unit coefficient, or the zero-reduction marker.
    pub fn weierstrass_degree(&self) -> Wideg {
        for i in 1..self.trunc {
            if !self
                .field
                .residue_field()
                .is_zero(&self.field.residue(&self.coeffs[i]))
            {
                return Wideg::Finite(i);
            }
        }
        Wideg::ZeroReduction
    }

    /// Coefficient-wise reduction to `k_K[[T]]`.
    pub fn reduce(&self) -> ResidueSeries {
        ResidueSeries {
            rf: self.field.residue_field().clone(),
            coeffs: self.coeffs.iter().map(|c| self.field.residue(c)).collect(),
            trunc: self.trunc,
        }
    }

    /// All coefficients congruent at the coarser precision.
    pub fn congruent(&self, other: &TruncatedSeries) -> Result<bool> {
        self.check_compat(other)?;
        let trunc = self.trunc.min(other.trunc);
        for i in 1..trunc {
            if !self.field.congruent(&self.coeffs[i], &other.coeffs[i])? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Minimum coefficient valuation, capped by precision: the residual
    /// floor used by commutation and semiconjugacy checks.
    pub fn min_coeff_valuation(&self) -> Val {
        let mut floor = i64::MAX;
        let mut exact: Option<i64> = None;
        for c in &self.coeffs[1..] {
            match self.field.valuation(c) {
                Val::Exact(v) => exact = Some(exact.map_or(v, |e| e.min(v))),
                Val::AtLeast(m) => floor = floor.min(m),
            }
        }
        match exact {
            Some(v) if floor == i64::MAX || v < floor => Val::Exact(v),
            _ => Val::AtLeast(floor.min(exact.unwrap_or(floor))),
        }
    }

    /// Newton polygon of `self − shift` (the shift enters at index 0).
    pub fn newton_polygon(&self, shift: &OkElem) -> Result<NewtonPolygon> {
        let mut points = Vec::with_capacity(self.trunc);
        let c0 = self.field.neg(shift)?;
        points.push((0i64, self.field.valuation(&c0)));
        for i in 1..self.trunc {
            points.push((i as i64, self.field.valuation(&self.coeffs[i])));
        }
        NewtonPolygon::from_points(&points)
    }

    /// Raw coefficients (including the index-0 zero), for serialization.
    pub fn raw_coeffs(&self) -> &[OkElem] {
        &self.coeffs
    }
}

/// A series over the residue field `k_K`, constant term zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueSeries {
    pub rf: crate::field::ResidueField,
    /// `coeffs[i]` = coefficient of `T^i`; index 0 kept zero.
    pub coeffs: Vec<ResidueElem>,
    pub trunc: usize,
}

impl ResidueSeries {
    pub fn zero(rf: &crate::field::ResidueField, trunc: usize) -> ResidueSeries {
        ResidueSeries {
            rf: rf.clone(),
            coeffs: (0..trunc).map(|_| rf.zero()).collect(),
            trunc,
        }
    }

    pub fn coeff(&self, i: usize) -> ResidueElem {
        if i >= self.trunc {
            self.rf.zero()
        } else {
            self.coeffs[i].clone()
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| self.rf.is_zero(c))
    }

    pub fn linear_coeff(&self) -> ResidueElem {
        self.coeff(1)
    }

    pub fn mul(&self, other: &ResidueSeries) -> ResidueSeries {
        let trunc = self.trunc.min(other.trunc);
        let mut out = ResidueSeries::zero(&self.rf, trunc);
        for i in 1..trunc {
            if self.rf.is_zero(&self.coeffs[i]) {
                continue;
            }
            for j in 1..trunc {
                if i + j >= trunc {
                    break;
                }
                let term = self.rf.mul(&self.coeffs[i], &other.coeffs[j]);
                out.coeffs[i + j] = self.rf.add(&out.coeffs[i + j], &term);
            }
        }
        out
    }

    pub fn compose(&self, inner: &ResidueSeries) -> ResidueSeries {
        let trunc = self.trunc.min(inner.trunc);
        let mut result = ResidueSeries::zero(&self.rf, trunc);
        let mut g_pow = ResidueSeries {
            rf: inner.rf.clone(),
            coeffs: inner.coeffs[..trunc].to_vec(),
            trunc,
        };
        let inner_t = g_pow.clone();
        for i in 1..trunc {
            if i > 1 {
                g_pow = g_pow.mul(&inner_t);
            }
            if self.rf.is_zero(&self.coeff(i)) {
                continue;
            }
            for k in 1..trunc {
                let term = self.rf.mul(&g_pow.coeff(k), &self.coeffs[i]);
                result.coeffs[k] = self.rf.add(&result.coeffs[k], &term);
            }
        }
        result
    }

    /// Returns `self(T^step)` at this truncation.
    pub fn substitute_power(&self, step: usize) -> ResidueSeries {
        let mut out = ResidueSeries::zero(&self.rf, self.trunc);
        for i in 1..self.trunc {
            if i * step < self.trunc {
                out.coeffs[i * step] = self.coeffs[i].clone();
            }
        }
        out
    }

    pub fn congruent(&self, other: &ResidueSeries) -> bool {
        let trunc = self.trunc.min(other.trunc);
        (1..trunc).all(|i| self.coeff(i) == other.coeff(i))
    }
}

/// A bivariate series with total-degree truncation and zero constant term.
#[derive(Debug, Clone)]
pub struct BivariateTruncated {
    field: Arc<Field>,
    /// `coeffs[i][j]` = coefficient of `X^i Y^j`, stored for `i + j < trunc`.
    coeffs: Vec<Vec<OkElem>>,
    trunc: usize,
}

impl BivariateTruncated {
    pub fn zero(field: &Arc<Field>, trunc: usize) -> BivariateTruncated {
        let coeffs = (0..trunc)
            .map(|i| (0..trunc - i).map(|_| field.zero()).collect())
            .collect();
        BivariateTruncated {
            field: field.clone(),
            coeffs,
            trunc,
        }
    }

    fn one(field: &Arc<Field>, trunc: usize) -> BivariateTruncated {
        let mut s = Self::zero(field, trunc);
        s.coeffs[0][0] = field.one();
        s
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn trunc(&self) -> usize {
        self.trunc
    }

    pub fn coeff(&self, i: usize, j: usize) -> OkElem {
        if i + j >= self.trunc {
            self.field.zero()
        } else {
            self.coeffs[i][j].clone()
        }
    }

    pub fn set_coeff(&mut self, i: usize, j: usize, v: OkElem) {
        if i + j < self.trunc {
            self.coeffs[i][j] = v;
        }
    }

    fn coeff_is_full_zero(&self, i: usize, j: usize) -> bool {
        self.field.is_zero(&self.coeffs[i][j])
            && self.coeffs[i][j].precision() >= self.field.precision()
    }

    pub fn add(&self, other: &BivariateTruncated) -> Result<BivariateTruncated> {
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(&self.field, trunc);
        for i in 0..trunc {
            for j in 0..trunc - i {
                out.coeffs[i][j] = self.field.add(&self.coeff(i, j), &other.coeff(i, j))?;
            }
        }
        Ok(out)
    }

    pub fn sub(&self, other: &BivariateTruncated) -> Result<BivariateTruncated> {
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(&self.field, trunc);
        for i in 0..trunc {
            for j in 0..trunc - i {
                out.coeffs[i][j] = self.field.sub(&self.coeff(i, j), &other.coeff(i, j))?;
            }
        }
        Ok(out)
    }

    pub fn mul(&self, other: &BivariateTruncated) -> Result<BivariateTruncated> {
        let trunc = self.trunc.min(other.trunc);
        let mut out = Self::zero(&self.field, trunc);
        for i1 in 0..self.trunc {
            for j1 in 0..self.trunc - i1 {
                if self.coeff_is_full_zero(i1, j1) {
                    continue;
                }
                for i2 in 0..other.trunc {
                    if i1 + i2 >= trunc {
                        break;
                    }
                    for j2 in 0..other.trunc - i2 {
                        if i1 + i2 + j1 + j2 >= trunc {
                            break;
                        }
                        let term = self.field.mul(&self.coeffs[i1][j1], &other.coeffs[i2][j2])?;
                        out.coeffs[i1 + i2][j1 + j2] =
                            self.field.add(&out.coeffs[i1 + i2][j1 + j2], &term)?;
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn scale(&self, c: &OkElem) -> Result<BivariateTruncated> {
        let mut out = Self::zero(&self.field, self.trunc);
        for i in 0..self.trunc {
            for j in 0..self.trunc - i {
                out.coeffs[i][j] = self.field.mul(&self.coeffs[i][j], c)?;
            }
        }
        Ok(out)
    }

    /// `F(f(X), f(Y))` for univariate `f` with `f(0) = 0`.
    pub fn compose_both(&self, f: &TruncatedSeries) -> Result<BivariateTruncated> {
        let trunc = self.trunc;
        let fx = Self::from_univariate_x(f, trunc);
        let fy = Self::from_univariate_y(f, trunc);
        let mut fx_pows: Vec<BivariateTruncated> = vec![Self::one(&self.field, trunc)];
        let mut fy_pows: Vec<BivariateTruncated> = vec![Self::one(&self.field, trunc)];
        for i in 1..trunc {
            let nx = fx_pows[i - 1].mul(&fx)?;
            fx_pows.push(nx);
            let ny = fy_pows[i - 1].mul(&fy)?;
            fy_pows.push(ny);
        }
        let mut out = Self::zero(&self.field, trunc);
        for i in 0..trunc {
            for j in 0..trunc - i {
                if self.coeff_is_full_zero(i, j) {
                    continue;
                }
                let prod = fx_pows[i].mul(&fy_pows[j])?;
                let scaled = prod.scale(&self.coeffs[i][j])?;
                out = out.add(&scaled)?;
            }
        }
        Ok(out)
    }

    /// `f(F(X,Y))` for univariate `f` with `f(0) = 0`.
    pub fn substitute_into(&self, f: &TruncatedSeries) -> Result<BivariateTruncated> {
        let trunc = self.trunc;
        let mut out = Self::zero(&self.field, trunc);
        let mut pow = self.clone();
        for i in 1..f.trunc().min(trunc) {
            if i > 1 {
                pow = pow.mul(self)?;
            }
            let scaled = pow.scale(&f.coeff(i))?;
            out = out.add(&scaled)?;
        }
        Ok(out)
    }

    fn from_univariate_x(f: &TruncatedSeries, trunc: usize) -> BivariateTruncated {
        let mut out = Self::zero(f.field(), trunc);
        for i in 1..f.trunc().min(trunc) {
            out.coeffs[i][0] = f.coeff(i);
        }
        out
    }

    fn from_univariate_y(f: &TruncatedSeries, trunc: usize) -> BivariateTruncated {
        let mut out = Self::zero(f.field(), trunc);
        for j in 1..f.trunc().min(trunc) {
            out.coeffs[0][j] = f.coeff(j);
        }
        out
    }

    /// The univariate series `F(X, 0)`.
    pub fn set_y_zero(&self) -> Result<TruncatedSeries> {
        let mut coeffs = Vec::with_capacity(self.trunc.saturating_sub(1));
        for i in 1..self.trunc {
            coeffs.push(self.coeffs[i][0].clone());
        }
        TruncatedSeries::from_coeffs(&self.field, coeffs, self.trunc)
    }

    pub fn swap_vars(&self) -> BivariateTruncated {
        let mut out = Self::zero(&self.field, self.trunc);
        for i in 0..self.trunc {
            for j in 0..self.trunc - i {
                out.coeffs[j][i] = self.coeffs[i][j].clone();
            }
        }
        out
    }

    /// `F(a(T), b(T))` for univariate arguments fixing 0.
    pub fn eval_univariate(
        &self,
        a: &TruncatedSeries,
        b: &TruncatedSeries,
    ) -> Result<TruncatedSeries> {
        let trunc = self.trunc.min(a.trunc()).min(b.trunc());
        let mut out = TruncatedSeries::zero(&self.field, trunc);
        let mut a_pows: Vec<TruncatedSeries> = vec![TruncatedSeries::identity(&self.field, trunc)];
        let mut b_pows: Vec<TruncatedSeries> = vec![TruncatedSeries::identity(&self.field, trunc)];
        for i in 1..trunc {
            if i == 1 {
                a_pows.push(a.truncate(trunc));
                b_pows.push(b.truncate(trunc));
            } else {
                let na = a_pows[i - 1].mul(a)?;
                a_pows.push(na);
                let nb = b_pows[i - 1].mul(b)?;
                b_pows.push(nb);
            }
        }
        for i in 0..self.trunc {
            for j in 0..self.trunc - i {
                if i + j == 0 || i + j >= trunc {
                    continue;
                }
                if self.coeff_is_full_zero(i, j) {
                    continue;
                }
                let c = &self.coeffs[i][j];
                let term = match (i, j) {
                    (0, _) => b_pows[j].scale(c)?,
                    (_, 0) => a_pows[i].scale(c)?,
                    _ => a_pows[i].mul(&b_pows[j])?.scale(c)?,
                };
                out = out.add(&term)?;
            }
        }
        Ok(out)
    }

    /// Minimum coefficient valuation over all stored monomials.
    pub fn min_coeff_valuation(&self) -> Val {
        let mut floor = i64::MAX;
        let mut exact: Option<i64> = None;
        for i in 0..self.trunc {
            for j in 0..self.trunc - i {
                if i + j == 0 {
                    continue;
                }
                match self.field.valuation(&self.coeffs[i][j]) {
                    Val::Exact(v) => exact = Some(exact.map_or(v, |e| e.min(v))),
                    Val::AtLeast(m) => floor = floor.min(m),
                }
            }
        }
        match exact {
            Some(v) if floor == i64::MAX || v < floor => Val::Exact(v),
            _ => Val::AtLeast(floor.min(exact.unwrap_or(floor))),
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

    fn ints(f: &TruncatedSeries) -> Vec<i64> {
        // small-value read-back for test assertions over Q_p
        (1..f.trunc())
            .map(|i| {
                let c = f.coeff(i);
                let s = &c.digit_strings()[0][0];
                s.parse::<i64>().unwrap()
            })
            .collect()
    }

    #[test]
    fn mul_basics() {
        let f = q2(16);
        let t = TruncatedSeries::identity(&f, 6);
        let t2 = t.mul(&t).unwrap();
        assert_eq!(ints(&t2), vec![0, 1, 0, 0, 0]);

        // (T+T²)(T−T²) = T² − T⁴
        let a = TruncatedSeries::from_integers(&f, &[1, 1], 6);
        let b = TruncatedSeries::from_integers(&f, &[1, -1], 6);
        let prod = a.mul(&b).unwrap();
        let expect = TruncatedSeries::from_integers(&f, &[0, 1, 0, -1], 6);
        assert!(prod.congruent(&expect).unwrap());
        // product of two series in T·O[[T]] has no linear term
        assert!(f.is_zero(&prod.coeff(1)));
    }

    #[test]
    fn compose_identity_neutral() {
        let f = q2(16);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 8);
        let t = TruncatedSeries::identity(&f, 8);
        assert!(p.compose(&t).unwrap().congruent(&p).unwrap());
        assert!(t.compose(&p).unwrap().congruent(&p).unwrap());
    }

    #[test]
    fn compose_binomial_oracle() {
        // (T²+2T)∘(T²+2T) = (1+T)⁴ − 1 = T⁴+4T³+6T²+4T
        let f = q2(16);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 8);
        let c = p.compose(&p).unwrap();
        let expect = TruncatedSeries::from_integers(&f, &[4, 6, 4, 1], 8);
        assert!(c.congruent(&expect).unwrap());
    }

    #[test]
    fn commuting_pair_syntactic() {
        // (T²+2T)∘(T³+3T²+3T) = (T³+3T²+3T)∘(T²+2T) — both are (1+T)⁶−1
        let f = q2(32);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 10);
        let u = TruncatedSeries::from_integers(&f, &[3, 3, 1], 10);
        let a = p.compose(&u).unwrap();
        let b = u.compose(&p).unwrap();
        assert!(a.congruent(&b).unwrap());
        // (1+T)^6 - 1 = 6T + 15T² + 20T³ + 15T⁴ + 6T⁵ + T⁶
        let expect = TruncatedSeries::from_integers(&f, &[6, 15, 20, 15, 6, 1], 10);
        assert!(a.congruent(&expect).unwrap());
    }

    #[test]
    fn iterate_cases() {
        let f = q2(16);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 8);
        assert!(p.iterate(1).unwrap().congruent(&p).unwrap());
        let p2 = p.iterate(2).unwrap();
        let expect = TruncatedSeries::from_integers(&f, &[4, 6, 4, 1], 8);
        assert!(p2.congruent(&expect).unwrap());

        let lin = TruncatedSeries::from_integers(&f, &[2], 8);
        let lin3 = lin.iterate(3).unwrap();
        let expect = TruncatedSeries::from_integers(&f, &[8], 8);
        assert!(lin3.congruent(&expect).unwrap());
    }

    #[test]
    fn reversion() {
        let f = q2(32);
        let t = TruncatedSeries::identity(&f, 6);
        assert!(t.compositional_inverse().unwrap().congruent(&t).unwrap());

        // T+T² → T − T² + 2T³ − 5T⁴ (Catalan signs)
        let a = TruncatedSeries::from_integers(&f, &[1, 1], 5);
        let inv = a.compositional_inverse().unwrap();
        let expect = TruncatedSeries::from_integers(&f, &[1, -1, 2, -5], 5);
        assert!(inv.congruent(&expect).unwrap());
        let round = a.compose(&inv).unwrap();
        assert!(round.congruent(&TruncatedSeries::identity(&f, 5)).unwrap());

        let f3 = q3(16);
        let bad = TruncatedSeries::from_integers(&f3, &[3, 0, 1], 6);
        assert!(matches!(
            bad.compositional_inverse(),
            Err(Error::NotInvertible)
        ));
    }

    #[test]
    fn weierstrass_degrees() {
        let f3 = q3(16);
        let lt = TruncatedSeries::from_integers(&f3, &[3, 0, 1], 8);
        assert_eq!(lt.weierstrass_degree(), Wideg::Finite(3));

        let f5 = Field::new(LocalFieldSpec {
            p: 5,
            h: 1,
            eisenstein: vec![-5, 1],
            precision: 16,
        })
        .unwrap();
        let s = TruncatedSeries::from_integers(&f5, &[1, 5], 8);
        assert_eq!(s.weierstrass_degree(), Wideg::Finite(1));

        let f2 = q2(16);
        let doubling = TruncatedSeries::from_integers(&f2, &[2], 8);
        assert_eq!(doubling.weierstrass_degree(), Wideg::ZeroReduction);
    }

    #[test]
    fn reductions() {
        let f2 = q2(16);
        let p = TruncatedSeries::from_integers(&f2, &[2, 1], 6);
        let r = p.reduce();
        assert!(f2.residue_field().is_zero(&r.coeff(1)));
        assert_eq!(r.coeff(2), f2.residue_field().one());

        let f3 = q3(16);
        let u = TruncatedSeries::from_integers(&f3, &[3, 3, 1], 6);
        let r = u.reduce();
        assert!(r.rf.is_zero(&r.coeff(1)));
        assert!(r.rf.is_zero(&r.coeff(2)));
        assert_eq!(r.coeff(3), r.rf.one());

        // T³+3T²+3T over Z_2 reduces to T³+T²+T
        let u2 = TruncatedSeries::from_integers(&f2, &[3, 3, 1], 6);
        let r = u2.reduce();
        assert_eq!(r.coeff(1), r.rf.one());
        assert_eq!(r.coeff(2), r.rf.one());
        assert_eq!(r.coeff(3), r.rf.one());
    }

    #[test]
    fn polygons_from_series() {
        use crate::rat::Rat;
        let f = q2(32);
        // T² + 2T with shift −2: points (0,1),(1,1),(2,0) → slope −1/2
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 8);
        let poly = p.newton_polygon(&f.from_i64(-2)).unwrap();
        assert!(poly.single_slope());
        assert_eq!(poly.slopes[0].slope, Rat::new(-1, 2));
        assert_eq!(poly.slopes[0].length, 2);

        // shift 0: vertices (1,1),(2,0)
        let poly = p.newton_polygon(&f.zero()).unwrap();
        assert_eq!(poly.vertices.len(), 2);
        assert_eq!(poly.vertices[0], (1, Rat::int(1)));
        assert_eq!(poly.vertices[1], (2, Rat::zero()));
        assert!(!poly.precision_limited);
    }

    #[test]
    fn residue_series_ops() {
        let f2 = q2(16);
        let rf = f2.residue_field().clone();
        // H = S + S², substitute S = T²: T² + T⁴
        let mut h = ResidueSeries::zero(&rf, 8);
        h.coeffs[1] = rf.one();
        h.coeffs[2] = rf.one();
        let sub = h.substitute_power(2);
        assert!(rf.is_zero(&sub.coeff(1)));
        assert_eq!(sub.coeff(2), rf.one());
        assert_eq!(sub.coeff(4), rf.one());
    }
}
