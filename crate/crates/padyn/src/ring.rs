//! Ring-generic polynomial machinery shared by the base field and the
//! quotient towers: dense polynomial arithmetic, division by monic
//! polynomials, unit-series inversion, and distinguished (Weierstrass)
//! factorization by quadratic Hensel lifting.
//!
//! Everything here is precision-lossless: the only inversions are of units
//! and the only divisions are by monic polynomials.

use crate::error::Error;
use crate::field::{Field, OkElem};
use crate::Result;

/// The operations a complete local ring must expose for the generic
/// solvers. Implemented by [`Field`] (elements of `O_K`) and by tower
/// levels (elements of iterated quotient rings).
pub trait RingOps {
    type El: Clone + std::fmt::Debug;

    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn add(&self, a: &Self::El, b: &Self::El) -> Result<Self::El>;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Result<Self::El>;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Result<Self::El>;
    fn neg(&self, a: &Self::El) -> Result<Self::El>;
    /// Embed an element of the base `O_K`.
    fn from_base(&self, x: &OkElem) -> Result<Self::El>;
    /// Zero at the working precision.
    fn is_zero(&self, a: &Self::El) -> bool;
    /// Zero at the maximum representable precision: such an element cannot
    /// influence anything representable and may be skipped in products.
    fn is_negligible(&self, _a: &Self::El) -> bool {
        false
    }
    /// Zero in the residue field (image under `π, x_i ↦ 0`).
    fn residue_is_zero(&self, a: &Self::El) -> bool;
    /// Inverse of an element with unit residue.
    fn invert_unit(&self, a: &Self::El) -> Result<Self::El>;
}

impl RingOps for Field {
    type El = OkElem;

    fn zero(&self) -> OkElem {
        Field::zero(self)
    }
    fn one(&self) -> OkElem {
        Field::one(self)
    }
    fn add(&self, a: &OkElem, b: &OkElem) -> Result<OkElem> {
        Field::add(self, a, b)
    }
    fn sub(&self, a: &OkElem, b: &OkElem) -> Result<OkElem> {
        Field::sub(self, a, b)
    }
    fn mul(&self, a: &OkElem, b: &OkElem) -> Result<OkElem> {
        Field::mul(self, a, b)
    }
    fn neg(&self, a: &OkElem) -> Result<OkElem> {
        Field::neg(self, a)
    }
    fn from_base(&self, x: &OkElem) -> Result<OkElem> {
        Ok(x.clone())
    }
    fn is_zero(&self, a: &OkElem) -> bool {
        Field::is_zero(self, a)
    }
    fn is_negligible(&self, a: &OkElem) -> bool {
        Field::is_zero(self, a) && a.precision() >= self.precision()
    }
    fn residue_is_zero(&self, a: &OkElem) -> bool {
        self.residue_field().is_zero(&self.residue(a))
    }
    fn invert_unit(&self, a: &OkElem) -> Result<OkElem> {
        Field::inv(self, a)
    }
}

/// Dense polynomial, constant coefficient first. The same representation
/// doubles as a truncated series when a length cap is enforced.
pub type Poly<El> = Vec<El>;

pub fn poly_add<R: RingOps>(r: &R, a: &[R::El], b: &[R::El]) -> Result<Poly<R::El>> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| r.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| r.zero());
        out.push(r.add(&x, &y)?);
    }
    Ok(out)
}

pub fn poly_sub<R: RingOps>(r: &R, a: &[R::El], b: &[R::El]) -> Result<Poly<R::El>> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(|| r.zero());
        let y = b.get(i).cloned().unwrap_or_else(|| r.zero());
        out.push(r.sub(&x, &y)?);
    }
    Ok(out)
}

/// Product truncated to `max_len` coefficients (unbounded if `None`).
pub fn poly_mul<R: RingOps>(
    r: &R,
    a: &[R::El],
    b: &[R::El],
    max_len: Option<usize>,
) -> Result<Poly<R::El>> {
    if a.is_empty() || b.is_empty() {
        return Ok(vec![]);
    }
    let full = a.len() + b.len() - 1;
    let n = max_len.map_or(full, |m| m.min(full));
    let mut out: Poly<R::El> = (0..n).map(|_| r.zero()).collect();
    for (i, x) in a.iter().enumerate() {
        if i >= n {
            break;
        }
        if r.is_negligible(x) {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if i + j >= n {
                break;
            }
            if r.is_negligible(y) {
                continue;
            }
            let t = r.mul(x, y)?;
            out[i + j] = r.add(&out[i + j], &t)?;
        }
    }
    Ok(out)
}

/// Horner evaluation of a polynomial at a ring element.
pub fn poly_eval<R: RingOps>(r: &R, poly: &[R::El], x: &R::El) -> Result<R::El> {
    let mut acc = r.zero();
    for c in poly.iter().rev() {
        acc = r.mul(&acc, x)?;
        acc = r.add(&acc, c)?;
    }
    Ok(acc)
}

/// Division with remainder by a monic divisor: `a = q·d + rem`,
/// `deg rem < deg d`. Exact over any ring because `d` is monic.
pub fn poly_divmod_monic<R: RingOps>(
    r: &R,
    a: &[R::El],
    d: &[R::El],
) -> Result<(Poly<R::El>, Poly<R::El>)> {
    let dd = d.len() - 1;
    debug_assert!(dd >= 1 || d.len() == 1);
    let mut rem: Poly<R::El> = a.to_vec();
    if rem.len() <= dd {
        return Ok((vec![], rem));
    }
    let qlen = rem.len() - dd;
    let mut q: Poly<R::El> = (0..qlen).map(|_| r.zero()).collect();
    for k in (0..qlen).rev() {
        let c = rem[k + dd].clone();
        q[k] = c.clone();
        for j in 0..=dd {
            let t = r.mul(&c, &d[j])?;
            rem[k + j] = r.sub(&rem[k + j], &t)?;
        }
    }
    rem.truncate(dd.max(1));
    Ok((q, rem))
}

/// Inverse of a series with unit constant term, to `len` coefficients.
pub fn series_inverse<R: RingOps>(r: &R, a: &[R::El], len: usize) -> Result<Poly<R::El>> {
    let a0_inv = r.invert_unit(&a[0])?;
    let mut out: Poly<R::El> = Vec::with_capacity(len);
    out.push(a0_inv.clone());
    for n in 1..len {
        // b_n = -a_0^{-1} Σ_{i=1..n} a_i b_{n-i}
        let mut s = r.zero();
        for i in 1..=n.min(a.len() - 1) {
            let t = r.mul(&a[i], &out[n - i])?;
            s = r.add(&s, &t)?;
        }
        let b = r.neg(&r.mul(&a0_inv, &s)?)?;
        out.push(b);
    }
    Ok(out)
}

/// Inverse of `u` in `R[T]/(W)` for monic `W ≡ T^s` mod `m` and `u` with
/// unit constant term. Newton lifting from the residue inverse; bounded by
/// `iters` steps.
pub fn poly_inv_mod_monic<R: RingOps>(
    r: &R,
    u: &[R::El],
    w: &[R::El],
    iters: u32,
) -> Result<Poly<R::El>> {
    let s = w.len() - 1;
    // mod m the quotient is k[T]/(T^s), so the series inverse of u to s
    // terms is a valid starting point
    let mut y = series_inverse(r, u, s.max(1))?;
    for _ in 0..iters {
        let uy = poly_mul(r, u, &y, None)?;
        let (_, mut uy_red) = poly_divmod_monic(r, &uy, w)?;
        uy_red.resize(s.max(1), r.zero());
        let mut e: Poly<R::El> = uy_red.iter().map(|c| r.neg(c)).collect::<Result<_>>()?;
        e[0] = r.add(&e[0], &r.one())?;
        if e.iter().all(|c| r.is_zero(c)) {
            return Ok(y);
        }
        // y ← y + y·e
        let ye = poly_mul(r, &y, &e, None)?;
        let (_, ye_red) = poly_divmod_monic(r, &ye, w)?;
        y = poly_add(r, &y, &ye_red)?;
        y.resize(s.max(1), r.zero());
    }
    Err(Error::PrecisionExhausted(
        "inverse mod monic polynomial did not converge".into(),
    ))
}

/// Distinguished factorization of the polynomial `Σ_{k<len} a_k T^k`:
/// returns `(W, u)` with `a ≡ W·u` at working precision, `W` monic of
/// degree `s = wideg(a)` with non-unit lower coefficients, and `u` a
/// polynomial of length `len − s` with unit constant term.
///
/// The input is treated as an exact polynomial, which makes the system
/// square (the distinguished factorization of a polynomial is again
/// polynomial) and the solution unique. Quadratic Hensel lifting; every
/// step uses only unit inversions and division by monic polynomials, so no
/// precision is lost beyond ordinary propagation.
pub fn weierstrass_factor<R: RingOps>(
    r: &R,
    a: &[R::El],
    len: usize,
    iters: u32,
) -> Result<(Poly<R::El>, Poly<R::El>)> {
    let len = len.min(a.len());
    let s = (0..len)
        .find(|&i| !r.residue_is_zero(&a[i]))
        .ok_or_else(|| Error::RelationDegenerate("series vanishes mod the maximal ideal".into()))?;
    if s == 0 {
        // already a unit: W = 1
        let u = a[..len].to_vec();
        return Ok((vec![r.one()], u));
    }
    let ulen = len - s;
    // W ← T^s, u ← Σ_{i≥s} a_i T^{i-s}
    let mut w: Poly<R::El> = (0..=s).map(|_| r.zero()).collect();
    w[s] = r.one();
    let mut u: Poly<R::El> = a[s..len].to_vec();
    for _ in 0..iters {
        let wu = poly_mul(r, &w, &u, None)?;
        let mut defect = poly_sub(r, &a[..len], &wu)?;
        defect.resize(len, r.zero());
        if defect.iter().all(|c| r.is_zero(c)) {
            return Ok((w, u));
        }
        // Newton step on the square system: with y = u^{-1} mod W,
        //   ε = Δ·y mod W   (deg < s),
        //   δ = (Δ − ε·u) div W   (deg < len − s, remainder ≡ 0),
        // then (W+ε)(u+δ) = a − (rem − ε·δ): quadratic contraction.
        let y = poly_inv_mod_monic(r, &u, &w, iters)?;
        let dy = poly_mul(r, &defect, &y, None)?;
        let (_, eps) = poly_divmod_monic(r, &dy, &w)?;
        let eu = poly_mul(r, &eps, &u, None)?;
        let num = poly_sub(r, &defect, &eu)?;
        let (delta, _rem) = poly_divmod_monic(r, &num, &w)?;
        for (i, e) in eps.iter().enumerate() {
            if i < s {
                w[i] = r.add(&w[i], e)?;
            }
        }
        u = poly_add(r, &u, &delta)?;
        u.resize(ulen, r.zero());
    }
    let wu = poly_mul(r, &w, &u, None)?;
    let mut defect = poly_sub(r, &a[..len], &wu)?;
    defect.resize(len, r.zero());
    if defect.iter().all(|c| r.is_zero(c)) {
        Ok((w, u))
    } else {
        Err(Error::PrecisionExhausted(
            "weierstrass factorization did not converge".into(),
        ))
    }
}

/// Monic product `∏ (T − y)` over the given roots.
pub fn poly_from_roots<R: RingOps>(r: &R, roots: &[R::El]) -> Result<Poly<R::El>> {
    let mut acc: Poly<R::El> = vec![r.one()];
    for y in roots {
        let factor = vec![r.neg(y)?, r.one()];
        acc = poly_mul(r, &acc, &factor, None)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::LocalFieldSpec;
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

    fn poly_i64(f: &Field, v: &[i64]) -> Vec<OkElem> {
        v.iter().map(|&c| f.from_i64(c)).collect()
    }

    #[test]
    fn divmod_monic() {
        let f = q2(16);
        // (T² + 3T + 2) / (T + 2) = (T + 1), rem 0
        let a = poly_i64(&f, &[2, 3, 1]);
        let d = poly_i64(&f, &[2, 1]);
        let (q, rem) = poly_divmod_monic(&*f, &a, &d).unwrap();
        assert!(f.congruent(&q[0], &f.one()).unwrap());
        assert!(f.congruent(&q[1], &f.one()).unwrap());
        assert!(rem.iter().all(|c| f.is_zero(c)));
    }

    #[test]
    fn unit_series_inverse() {
        let f = q2(16);
        // (1 + T)^{-1} = 1 − T + T² − ...
        let a = poly_i64(&f, &[1, 1]);
        let inv = series_inverse(&*f, &a, 5).unwrap();
        let expect = poly_i64(&f, &[1, -2 + 1, 1, -1, 1]);
        // (the -2+1 is just -1; spelled to keep rustfmt from folding)
        for (x, y) in inv.iter().zip(&expect) {
            assert!(f.congruent(x, y).unwrap());
        }
        let prod = poly_mul(&*f, &a, &inv, Some(5)).unwrap();
        assert!(f.congruent(&prod[0], &f.one()).unwrap());
        assert!(prod[1..].iter().all(|c| f.is_zero(c)));
    }

    #[test]
    fn weierstrass_linear_factor() {
        let f = q2(16);
        // T² + 3T + 2 = (T + 2)(T + 1): distinguished part T + 2
        let a = poly_i64(&f, &[2, 3, 1]);
        let (w, u) = weierstrass_factor(&*f, &a, 3, 8).unwrap();
        assert_eq!(w.len(), 2);
        assert!(f.congruent(&w[0], &f.from_i64(2)).unwrap());
        assert!(f.congruent(&w[1], &f.one()).unwrap());
        assert!(f.is_unit(&u[0]));
        let back = poly_mul(&*f, &w, &u, Some(3)).unwrap();
        for (x, y) in back.iter().zip(&a) {
            assert!(f.congruent(x, y).unwrap());
        }
    }

    #[test]
    fn weierstrass_eisenstein_part() {
        let f = q3(24);
        // ((1+T)^3 − 1)/T = T² + 3T + 3 is already distinguished
        let a = poly_i64(&f, &[3, 3, 1]);
        let (w, u) = weierstrass_factor(&*f, &a, 3, 8).unwrap();
        assert_eq!(w.len(), 3);
        for (x, y) in w.iter().zip(&a) {
            assert!(f.congruent(x, y).unwrap());
        }
        assert!(f.congruent(&u[0], &f.one()).unwrap());
    }

    #[test]
    fn weierstrass_with_series_tail() {
        let f = q2(20);
        // a = 2 + T + T³: wideg 1; verify a = W·u with monic linear W and
        // unit u reconstructs a
        let a = poly_i64(&f, &[2, 1, 0, 1]);
        let (w, u) = weierstrass_factor(&*f, &a, 4, 10).unwrap();
        assert_eq!(w.len(), 2);
        // the root is ≡ -2 mod 8 (x = -2 - x³ → x ≡ -2 + 8 ≡ 6 mod 16)
        let root = f.neg(&w[0]).unwrap();
        let val = poly_eval(&*f, &a, &root).unwrap();
        assert!(f.is_zero(&val));
        let back = poly_mul(&*f, &w, &u, Some(4)).unwrap();
        for (x, y) in back.iter().zip(&a) {
            assert!(f.congruent(x, y).unwrap());
        }
    }

    #[test]
    fn product_from_roots() {
        let f = q2(16);
        let roots = vec![f.from_i64(-1), f.from_i64(-2)];
        let p = poly_from_roots(&*f, &roots).unwrap();
        let expect = poly_i64(&f, &[2, 3, 1]);
        for (x, y) in p.iter().zip(&expect) {
            assert!(f.congruent(x, y).unwrap());
        }
    }
}
