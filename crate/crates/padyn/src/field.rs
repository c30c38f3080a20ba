//! Arithmetic in `O_K`, the ring of integers of a finite extension `K/Q_p`.
//!
//! `K` is described by a prime `p`, an unramified degree `h` (so the
//! residue field has `q = p^h` elements) and a monic Eisenstein polynomial
//! of degree `e` over the unramified subring, whose root is the
//! uniformizer `π`. Elements are stored in the monomial basis
//! `ω^j π^i` (`j < h`, `i < e`) with integer digits carried modulo a power
//! of `p`, together with the absolute precision they are known to:
//! an element with precision `m` is a residue mod `π^m`.
//!
//! The valuation is normalized so that `v(π) = 1` and `v(p) = e`. A zero
//! representative at precision `m` has valuation "`≥ m`" and is never
//! reported as exactly zero.

use std::fmt;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::Result;

/// Declarative description of a finite extension of `Q_p`.
///
/// Serializes to/from `{p, h, eisenstein: [c_0..c_e], precision}` where the
/// Eisenstein coefficients are plain integers (images in the unramified
/// subring).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LocalFieldSpec {
    pub p: u64,
    pub h: u32,
    /// Monic polynomial, constant coefficient first. Degree 1 with root a
    /// uniformizer of `Z_p` gives the unramified case.
    pub eisenstein: Vec<i64>,
    pub precision: u32,
}

/// Valuation of an element, capped by the precision it is known to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Val {
    Exact(i64),
    /// Indistinguishable from zero at this precision.
    AtLeast(i64),
}

impl Val {
    /// Lower bound usable in either case.
    pub fn floor(&self) -> i64 {
        match *self {
            Val::Exact(v) | Val::AtLeast(v) => v,
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Val::Exact(_))
    }

    pub fn exact(&self) -> Option<i64> {
        match *self {
            Val::Exact(v) => Some(v),
            Val::AtLeast(_) => None,
        }
    }
}

impl fmt::Display for Val {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Val::Exact(v) => write!(f, "{v}"),
            Val::AtLeast(v) => write!(f, ">= {v}"),
        }
    }
}

/// An element of the residue field `F_q`, as a polynomial in the generator
/// of the degree-`h` extension of `F_p`, coefficients mod `p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ResidueElem {
    pub coords: Vec<u64>,
}

/// The residue field `k_K = F_q`, `q = p^h`, as `F_p[ω]/(g)` for a fixed
/// irreducible `g` found deterministically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResidueField {
    pub p: u64,
    pub h: u32,
    /// Monic irreducible modulus, constant coefficient first, length h+1.
    pub modulus: Vec<u64>,
}

impl ResidueField {
    pub fn new(p: u64, h: u32) -> ResidueField {
        let modulus = find_irreducible(p, h);
        ResidueField { p, h, modulus }
    }

    pub fn q(&self) -> u64 {
        self.p.pow(self.h)
    }

    pub fn zero(&self) -> ResidueElem {
        ResidueElem {
            coords: vec![0; self.h as usize],
        }
    }

    pub fn one(&self) -> ResidueElem {
        self.from_u64(1)
    }

    pub fn from_u64(&self, n: u64) -> ResidueElem {
        let mut coords = vec![0; self.h as usize];
        coords[0] = n % self.p;
        ResidueElem { coords }
    }

    pub fn generator(&self) -> ResidueElem {
        let mut coords = vec![0; self.h as usize];
        if self.h > 1 {
            coords[1] = 1;
        } else {
            // F_p: take the smallest generator-ish nonzero element; callers
            // that need a multiplicative generator should search explicitly.
            coords[0] = 1;
        }
        ResidueElem { coords }
    }

    pub fn is_zero(&self, a: &ResidueElem) -> bool {
        a.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        ResidueElem {
            coords: a
                .coords
                .iter()
                .zip(&b.coords)
                .map(|(x, y)| (x + y) % self.p)
                .collect(),
        }
    }

    pub fn neg(&self, a: &ResidueElem) -> ResidueElem {
        ResidueElem {
            coords: a.coords.iter().map(|&x| (self.p - x) % self.p).collect(),
        }
    }

    pub fn sub(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        self.add(a, &self.neg(b))
    }

    pub fn mul(&self, a: &ResidueElem, b: &ResidueElem) -> ResidueElem {
        let h = self.h as usize;
        let mut wide = vec![0u128; 2 * h - 1];
        for (i, &x) in a.coords.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.coords.iter().enumerate() {
                wide[i + j] += (x as u128) * (y as u128);
            }
        }
        // reduce by the monic modulus: ω^h = -(lower part)
        for k in (h..2 * h - 1).rev() {
            let c = (wide[k] % self.p as u128) as u64;
            wide[k] = 0;
            if c == 0 {
                continue;
            }
            for j in 0..h {
                let m = self.modulus[j] % self.p;
                // ω^k = ω^{k-h} · ω^h = ω^{k-h} · (-Σ m_j ω^j)
                let sub = (c as u128) * (m as u128) % self.p as u128;
                wide[k - h + j] += (self.p as u128 - sub) % self.p as u128;
            }
        }
        ResidueElem {
            coords: wide[..h].iter().map(|&x| (x % self.p as u128) as u64).collect(),
        }
    }

    pub fn pow(&self, a: &ResidueElem, mut e: u64) -> ResidueElem {
        let mut base = a.clone();
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat: `a^{q-2}`.
    pub fn inv(&self, a: &ResidueElem) -> Result<ResidueElem> {
        if self.is_zero(a) {
            return Err(Error::NotAUnit(Val::AtLeast(0)));
        }
        Ok(self.pow(a, self.q() - 2))
    }
}

/// Deterministic search for a monic irreducible of degree `h` over `F_p`
/// (lexicographically smallest by coefficient vector).
fn find_irreducible(p: u64, h: u32) -> Vec<u64> {
    let h = h as usize;
    if h == 1 {
        return vec![0, 1];
    }
    let mut coeffs = vec![0u64; h + 1];
    coeffs[h] = 1;
    loop {
        if poly_is_irreducible(p, &coeffs) {
            return coeffs;
        }
        // increment the lower coefficients like a base-p counter
        for c in coeffs.iter_mut().take(h) {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
}

/// Irreducibility over F_p via the Frobenius criterion:
/// `x^{p^h} ≡ x (mod f)` and `gcd(x^{p^{h/ℓ}} - x, f) = 1` for primes `ℓ|h`.
fn poly_is_irreducible(p: u64, f: &[u64]) -> bool {
    let h = f.len() - 1;
    let xq = |k: u32| -> Vec<u64> {
        // x^{p^k} mod f by repeated p-th powering
        let mut acc = vec![0u64, 1]; // x
        for _ in 0..k {
            acc = poly_modpow_p(p, &acc, f);
        }
        acc
    };
    // x^{p^h} - x ≡ 0 mod f
    let mut top = xq(h as u32);
    polysub_x(p, &mut top);
    if top.iter().any(|&c| c != 0) {
        return false;
    }
    let mut m = h;
    let mut primes = vec![];
    let mut d = 2;
    while d * d <= m {
        if m % d == 0 {
            primes.push(d);
            while m % d == 0 {
                m /= d;
            }
        }
        d += 1;
    }
    if m > 1 {
        primes.push(m);
    }
    for l in primes {
        let mut g = xq((h / l) as u32);
        polysub_x(p, &mut g);
        if poly_gcd_deg(p, &g, f) != 0 {
            return false;
        }
    }
    true
}

fn polysub_x(p: u64, a: &mut Vec<u64>) {
    if a.len() < 2 {
        a.resize(2, 0);
    }
    a[1] = (a[1] + p - 1) % p;
    while a.len() > 1 && *a.last().unwrap() == 0 {
        a.pop();
    }
}

fn poly_modpow_p(p: u64, a: &[u64], f: &[u64]) -> Vec<u64> {
    // a^p mod f, square-and-multiply on the exponent p
    let mut acc = vec![1u64];
    let mut base = a.to_vec();
    let mut e = p;
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_mulmod(p, &acc, &base, f);
        }
        base = poly_mulmod(p, &base, &base, f);
        e >>= 1;
    }
    acc
}

fn poly_mulmod(p: u64, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
    let mut wide = vec![0u128; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            wide[i + j] = (wide[i + j] + (x as u128) * (y as u128)) % p as u128;
        }
    }
    let h = f.len() - 1;
    for k in (h..wide.len()).rev() {
        let c = wide[k];
        wide[k] = 0;
        if c == 0 {
            continue;
        }
        for j in 0..h {
            let sub = c * (f[j] as u128) % p as u128;
            wide[k - h + j] = (wide[k - h + j] + p as u128 - sub) % p as u128;
        }
    }
    let mut out: Vec<u64> = wide[..h.min(wide.len())].iter().map(|&x| x as u64).collect();
    while out.len() > 1 && *out.last().unwrap() == 0 {
        out.pop();
    }
    out
}

fn poly_gcd_deg(p: u64, a: &[u64], b: &[u64]) -> usize {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let trim = |v: &mut Vec<u64>| {
        while v.len() > 1 && *v.last().unwrap() == 0 {
            v.pop();
        }
    };
    trim(&mut a);
    trim(&mut b);
    while !(b.len() == 1 && b[0] == 0) {
        // a mod b
        let db = b.len() - 1;
        let lead_inv = modinv_u64(*b.last().unwrap(), p);
        while a.len() > db && !(a.len() == 1 && a[0] == 0) {
            let da = a.len() - 1;
            if da < db {
                break;
            }
            let c = (*a.last().unwrap() as u128 * lead_inv as u128 % p as u128) as u64;
            for j in 0..=db {
                let sub = (c as u128) * (b[j] as u128) % p as u128;
                let idx = da - db + j;
                a[idx] = ((a[idx] as u128 + p as u128 - sub) % p as u128) as u64;
            }
            trim(&mut a);
            if a.iter().all(|&x| x == 0) {
                a = vec![0];
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
        trim(&mut b);
    }
    trim(&mut a);
    a.len() - 1
}

fn modinv_u64(a: u64, p: u64) -> u64 {
    // Fermat; p prime
    let mut acc: u128 = 1;
    let mut base: u128 = (a % p) as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    acc as u64
}

/// An element of `O_K` known modulo `π^prec`.
///
/// Digits are indexed `digits[i][j]` = coefficient of `ω^j π^i`, each a
/// non-negative integer reduced modulo `p^{⌈prec/e⌉}`. The fingerprint ties
/// the element to the [`Field`] it was created by.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OkElem {
    pub(crate) digits: Vec<Vec<BigUint>>,
    pub(crate) prec: u32,
    pub(crate) fp: u64,
}

impl OkElem {
    pub fn precision(&self) -> u32 {
        self.prec
    }

    /// Raw digit vectors (π-major, then ω), for serialization.
    pub fn digit_strings(&self) -> Vec<Vec<String>> {
        self.digits
            .iter()
            .map(|row| row.iter().map(|d| d.to_str_radix(10)).collect())
            .collect()
    }
}

/// Validated local field context: all `O_K` arithmetic goes through it.
///
/// Construction performs the spec validation (primality, Eisenstein
/// condition) and caches the derived constants `q`, `e` and the residue
/// field.
#[derive(Debug)]
pub struct Field {
    spec: LocalFieldSpec,
    e: usize,
    h: usize,
    q: u64,
    fp: u64,
    residue: ResidueField,
    /// Lift of the residue-field modulus used for the unramified subring,
    /// digits 0..p-1, length h+1, monic.
    unram_modulus: Vec<BigUint>,
    /// π^{e+r} for r in 0..e-1 expressed in the monomial basis: each entry
    /// is a length-e vector of W-elements (length-h coordinate vectors).
    pi_reduction: Vec<Vec<Vec<BigInt>>>,
    /// p^k for k ≤ N(max precision) + guard.
    p_pows: Vec<BigUint>,
}

impl Field {
    pub fn new(spec: LocalFieldSpec) -> Result<Arc<Field>> {
        if !is_prime(spec.p) {
            return Err(Error::NotPrime(spec.p));
        }
        if spec.h < 1 {
            return Err(Error::InvalidInput("unramified degree must be >= 1".into()));
        }
        if spec.precision < 1 {
            return Err(Error::InvalidInput("precision must be >= 1".into()));
        }
        if spec.eisenstein.len() < 2 {
            return Err(Error::NotEisenstein("degree must be >= 1".into()));
        }
        let e = spec.eisenstein.len() - 1;
        if *spec.eisenstein.last().unwrap() != 1 {
            return Err(Error::NotEisenstein("polynomial must be monic".into()));
        }
        let p = spec.p as i64;
        for (i, &c) in spec.eisenstein.iter().enumerate().take(e) {
            if c.rem_euclid(p) != 0 {
                return Err(Error::NotEisenstein(format!(
                    "coefficient {i} is not divisible by p"
                )));
            }
        }
        if (spec.eisenstein[0] / p).rem_euclid(p) == 0 {
            return Err(Error::NotEisenstein(
                "constant term has p-valuation != 1".into(),
            ));
        }

        let h = spec.h as usize;
        let q = spec
            .p
            .checked_pow(spec.h)
            .ok_or_else(|| Error::InvalidInput("q = p^h overflows".into()))?;
        let residue = ResidueField::new(spec.p, spec.h);
        let unram_modulus: Vec<BigUint> =
            residue.modulus.iter().map(|&c| BigUint::from(c)).collect();

        let fp = fingerprint(&spec);
        let n_max = (spec.precision as usize).div_ceil(e) + 2;
        let mut p_pows = Vec::with_capacity(n_max + 1);
        let mut acc = BigUint::one();
        for _ in 0..=n_max {
            p_pows.push(acc.clone());
            acc *= BigUint::from(spec.p);
        }

        let mut field = Field {
            spec,
            e,
            h,
            q,
            fp,
            residue,
            unram_modulus,
            pi_reduction: vec![],
            p_pows,
        };
        field.build_pi_reduction();
        Ok(Arc::new(field))
    }

    /// Parsed, validated spec with derived constants available.
    pub fn spec(&self) -> &LocalFieldSpec {
        &self.spec
    }

    pub fn p(&self) -> u64 {
        self.spec.p
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn e(&self) -> usize {
        self.e
    }

    pub fn h(&self) -> usize {
        self.h
    }

    /// The valuation of p: `v(p) = e`.
    pub fn v_of_p(&self) -> i64 {
        self.e as i64
    }

    pub fn precision(&self) -> u32 {
        self.spec.precision
    }

    pub fn fingerprint(&self) -> u64 {
        self.fp
    }

    pub fn residue_field(&self) -> &ResidueField {
        &self.residue
    }

    fn n_digits(&self, prec: u32) -> usize {
        (prec as usize).div_ceil(self.e)
    }

    fn p_pow(&self, k: usize) -> &BigUint {
        &self.p_pows[k.min(self.p_pows.len() - 1)]
    }

    fn build_pi_reduction(&mut self) {
        // π^e = -(c_{e-1} π^{e-1} + ... + c_0), coefficients in Z ⊂ W.
        // Rows for π^{e+r}, r = 0..e-2 (degree < 2e-1 occurs in products).
        let e = self.e;
        let mut rows: Vec<Vec<Vec<BigInt>>> = Vec::new();
        let base: Vec<Vec<BigInt>> = (0..e)
            .map(|i| {
                let mut w = vec![BigInt::zero(); self.h];
                w[0] = BigInt::from(-self.spec.eisenstein[i]);
                w
            })
            .collect();
        rows.push(base);
        // π^{e+r} = π · π^{e+r-1}: shift the previous row, fold the
        // overflowing top digit back through row 0. All entries stay
        // rational integers (coordinate 0 only) since the Eisenstein
        // coefficients are.
        for r in 1..e.saturating_sub(1) {
            let prev = rows[r - 1].clone();
            let mut row: Vec<Vec<BigInt>> = vec![vec![BigInt::zero(); self.h]; e];
            for i in 0..e - 1 {
                row[i + 1] = prev[i].clone();
            }
            let top = prev[e - 1].clone();
            for i in 0..e {
                for j in 0..self.h {
                    row[i][j] += &top[j] * &rows[0][i][0];
                }
            }
            rows.push(row);
        }
        self.pi_reduction = rows;
    }

    // ---- element constructors ----

    pub fn zero(&self) -> OkElem {
        self.zero_at(self.spec.precision)
    }

    pub fn zero_at(&self, prec: u32) -> OkElem {
        OkElem {
            digits: vec![vec![BigUint::zero(); self.h]; self.e],
            prec,
            fp: self.fp,
        }
    }

    pub fn one(&self) -> OkElem {
        self.from_i64(1)
    }

    pub fn from_i64(&self, n: i64) -> OkElem {
        self.from_bigint(&BigInt::from(n))
    }

    pub fn from_bigint(&self, n: &BigInt) -> OkElem {
        let prec = self.spec.precision;
        let modulus = BigInt::from(self.p_pow(self.n_digits(prec)).clone());
        let red = n.mod_floor(&modulus);
        let mut el = self.zero_at(prec);
        el.digits[0][0] = red.to_biguint().unwrap();
        el
    }

    /// Element from monomial-basis digits `digits[i][j]` for `ω^j π^i`.
    pub fn from_digits(&self, digits: &[Vec<i64>], prec: u32) -> Result<OkElem> {
        if digits.len() > self.e || digits.iter().any(|r| r.len() > self.h) {
            return Err(Error::InvalidInput(format!(
                "digit matrix exceeds basis size {}x{}",
                self.e, self.h
            )));
        }
        let mut el = self.zero_at(prec.min(self.spec.precision));
        let modulus = BigInt::from(self.p_pow(self.n_digits(el.prec)).clone());
        for (i, row) in digits.iter().enumerate() {
            for (j, &c) in row.iter().enumerate() {
                el.digits[i][j] = BigInt::from(c).mod_floor(&modulus).to_biguint().unwrap();
            }
        }
        Ok(el)
    }

    /// Element from serialized decimal digit strings.
    pub fn from_digit_strings(&self, digits: &[Vec<String>], prec: u32) -> Result<OkElem> {
        let mut el = self.zero_at(prec.min(self.spec.precision));
        if digits.len() > self.e || digits.iter().any(|r| r.len() > self.h) {
            return Err(Error::InvalidInput("digit matrix exceeds basis size".into()));
        }
        let modulus = self.p_pow(self.n_digits(el.prec)).clone();
        for (i, row) in digits.iter().enumerate() {
            for (j, s) in row.iter().enumerate() {
                let v = BigUint::parse_bytes(s.as_bytes(), 10)
                    .ok_or_else(|| Error::InvalidInput(format!("bad digit string {s:?}")))?;
                el.digits[i][j] = v % &modulus;
            }
        }
        Ok(el)
    }

    /// The uniformizer `π` as an element.
    pub fn uniformizer(&self) -> OkElem {
        if self.e == 1 {
            // π is the root of X - c, i.e. the image of c
            self.from_i64(-self.spec.eisenstein[0])
        } else {
            let mut el = self.zero();
            el.digits[1][0] = BigUint::one();
            el
        }
    }

    /// Naive multiplicative-basis lift `k_K → O_K` (coordinatewise).
    pub fn lift_residue(&self, r: &ResidueElem) -> OkElem {
        let mut el = self.zero();
        for (j, &c) in r.coords.iter().enumerate() {
            el.digits[0][j] = BigUint::from(c);
        }
        el
    }

    fn check_fp(&self, a: &OkElem) -> Result<()> {
        if a.fp != self.fp {
            return Err(Error::SpecMismatch);
        }
        Ok(())
    }

    /// Canonicalize: reduce digits mod `p^{N(prec)}`.
    fn normalize(&self, el: &mut OkElem) {
        let m = self.p_pow(self.n_digits(el.prec)).clone();
        for row in &mut el.digits {
            for d in row.iter_mut() {
                *d %= &m;
            }
        }
    }

    // ---- ring operations ----

    pub fn add(&self, a: &OkElem, b: &OkElem) -> Result<OkElem> {
        self.check_fp(a)?;
        self.check_fp(b)?;
        let prec = a.prec.min(b.prec);
        let mut out = self.zero_at(prec);
        for i in 0..self.e {
            for j in 0..self.h {
                out.digits[i][j] = &a.digits[i][j] + &b.digits[i][j];
            }
        }
        self.normalize(&mut out);
        Ok(out)
    }

    pub fn neg(&self, a: &OkElem) -> Result<OkElem> {
        self.check_fp(a)?;
        let mut out = self.zero_at(a.prec);
        let m = self.p_pow(self.n_digits(a.prec)).clone();
        for i in 0..self.e {
            for j in 0..self.h {
                let d = &a.digits[i][j] % &m;
                out.digits[i][j] = if d.is_zero() { d } else { &m - d };
            }
        }
        Ok(out)
    }

    pub fn sub(&self, a: &OkElem, b: &OkElem) -> Result<OkElem> {
        let nb = self.neg(b)?;
        self.add(a, &nb)
    }

    /// W-multiplication: coordinate vectors mod the lifted unramified
    /// modulus, all mod p^N.
    fn w_mul(&self, a: &[BigUint], b: &[BigUint], modulus: &BigUint) -> Vec<BigUint> {
        let h = self.h;
        if h == 1 {
            return vec![&a[0] * &b[0] % modulus];
        }
        let mut wide = vec![BigUint::zero(); 2 * h - 1];
        for i in 0..h {
            if a[i].is_zero() {
                continue;
            }
            for j in 0..h {
                if b[j].is_zero() {
                    continue;
                }
                wide[i + j] += &a[i] * &b[j];
            }
        }
        // reduce ω^k for k >= h via the monic lift: ω^h = -(lower)
        for k in (h..2 * h - 1).rev() {
            let c = std::mem::replace(&mut wide[k], BigUint::zero()) % modulus;
            if c.is_zero() {
                continue;
            }
            for j in 0..h {
                if self.unram_modulus[j].is_zero() {
                    continue;
                }
                // subtract c * g_j at position k-h+j, working mod modulus
                let sub = &c * &self.unram_modulus[j] % modulus;
                let cur = &wide[k - h + j] % modulus;
                wide[k - h + j] = if cur >= sub { cur - sub } else { modulus - sub + cur };
            }
        }
        wide.truncate(h);
        for d in wide.iter_mut() {
            *d %= modulus;
        }
        wide
    }

    fn w_scale_signed(&self, a: &[BigUint], c: &BigInt, modulus: &BigUint) -> Vec<BigUint> {
        let cm = c.mod_floor(&BigInt::from(modulus.clone())).to_biguint().unwrap();
        a.iter().map(|x| x * &cm % modulus).collect()
    }

    pub fn mul(&self, a: &OkElem, b: &OkElem) -> Result<OkElem> {
        self.check_fp(a)?;
        self.check_fp(b)?;
        // sharp but sound: the error of x̂ŷ is x̂ε_y + ŷε_x + ε_xε_y, so the
        // product is known mod π^{min(prec_a + v(b), prec_b + v(a))}
        let va = self.valuation(a).floor().max(0) as u32;
        let vb = self.valuation(b).floor().max(0) as u32;
        let prec = (a.prec.saturating_add(vb))
            .min(b.prec.saturating_add(va))
            .min(self.spec.precision);
        let n = self.n_digits(prec);
        let modulus = self.p_pow(n).clone();
        let e = self.e;
        let mut wide: Vec<Vec<BigUint>> = vec![vec![BigUint::zero(); self.h]; 2 * e - 1];
        for i in 0..e {
            for j in 0..e {
                let prod = self.w_mul(&a.digits[i], &b.digits[j], &modulus);
                for (k, v) in prod.into_iter().enumerate() {
                    wide[i + j][k] = (&wide[i + j][k] + v) % &modulus;
                }
            }
        }
        // reduce π-degrees >= e through the Eisenstein relation
        let mut out = self.zero_at(prec);
        for i in 0..e {
            out.digits[i] = wide[i].clone();
        }
        for r in 0..e.saturating_sub(1) {
            let top = wide[e + r].clone();
            if top.iter().all(|d| d.is_zero()) {
                continue;
            }
            for i in 0..e {
                // pi_reduction[r][i] is a scalar W-element (integer in coord 0)
                let scal = &self.pi_reduction[r][i][0];
                if scal.is_zero() {
                    continue;
                }
                let contrib = self.w_scale_signed(&top, scal, &modulus);
                for j in 0..self.h {
                    out.digits[i][j] = (&out.digits[i][j] + &contrib[j]) % &modulus;
                }
            }
        }
        self.normalize(&mut out);
        Ok(out)
    }

    pub fn pow(&self, a: &OkElem, mut k: u64) -> Result<OkElem> {
        let mut base = a.clone();
        let mut acc = {
            let mut o = self.one();
            o.prec = a.prec;
            self.normalize(&mut o);
            o
        };
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.mul(&base, &base)?;
            }
        }
        Ok(acc)
    }

    // ---- valuation / precision ----

    /// `v_K(x)`, capped by the precision of `x`.
    pub fn valuation(&self, a: &OkElem) -> Val {
        let prec = a.prec as i64;
        let n = self.n_digits(a.prec);
        let mut best: Option<i64> = None;
        for i in 0..self.e {
            for j in 0..self.h {
                let d = &a.digits[i][j];
                if d.is_zero() {
                    continue;
                }
                // v_p of the digit, capped at n
                let mut vp = 0usize;
                let mut cur = d.clone();
                let p = BigUint::from(self.spec.p);
                while vp < n && (&cur % &p).is_zero() {
                    cur /= &p;
                    vp += 1;
                }
                if vp >= n {
                    continue;
                }
                let v = (self.e as i64) * (vp as i64) + i as i64;
                if v < prec {
                    best = Some(best.map_or(v, |b| b.min(v)));
                }
            }
        }
        match best {
            Some(v) => Val::Exact(v),
            None => Val::AtLeast(prec),
        }
    }

    pub fn is_zero(&self, a: &OkElem) -> bool {
        matches!(self.valuation(a), Val::AtLeast(_))
    }

    pub fn is_unit(&self, a: &OkElem) -> bool {
        matches!(self.valuation(a), Val::Exact(0))
    }

    /// Equality mod `π^{min(prec_a, prec_b)}`.
    pub fn congruent(&self, a: &OkElem, b: &OkElem) -> Result<bool> {
        let d = self.sub(a, b)?;
        Ok(self.is_zero(&d))
    }

    /// Restrict the known precision of `a` to at most `prec`.
    pub fn cap_precision(&self, a: &OkElem, prec: u32) -> OkElem {
        if prec >= a.prec {
            return a.clone();
        }
        let mut out = a.clone();
        out.prec = prec.max(1);
        self.normalize(&mut out);
        out
    }

    /// Reduction `O_K → k_K` (ring morphism; π ↦ 0, digits mod p).
    pub fn residue(&self, a: &OkElem) -> ResidueElem {
        let p = BigUint::from(self.spec.p);
        ResidueElem {
            coords: a.digits[0]
                .iter()
                .map(|d| (d % &p).to_u64().unwrap())
                .collect(),
        }
    }

    /// Exact division by `π^k` (requires `v(a) >= k`); lowers precision by `k`.
    pub fn div_pi_pow(&self, a: &OkElem, k: u32) -> Result<OkElem> {
        self.check_fp(a)?;
        if k == 0 {
            return Ok(a.clone());
        }
        if a.prec <= k {
            return Err(Error::PrecisionExhausted(format!(
                "dividing by pi^{k} at precision {}",
                a.prec
            )));
        }
        match self.valuation(a) {
            Val::Exact(v) if v < k as i64 => {
                return Err(Error::InvalidInput(format!(
                    "element has valuation {v} < {k}, division not exact"
                )))
            }
            _ => {}
        }
        let mut cur = a.clone();
        for _ in 0..k {
            cur = self.div_pi_once(&cur)?;
        }
        Ok(cur)
    }

    fn div_pi_once(&self, a: &OkElem) -> Result<OkElem> {
        let prec = a.prec - 1;
        let e = self.e;
        let n = self.n_digits(a.prec);
        let modulus = self.p_pow(n).clone();
        let p = BigUint::from(self.spec.p);
        if e == 1 {
            // π = image of c = -c_0; division by π = division by c
            // c = unit * p: divide by p exactly, multiply by unit inverse.
            let c = BigInt::from(-self.spec.eisenstein[0]);
            let unit = c / BigInt::from(self.spec.p as i64);
            let unit_el = {
                let mut u = self.from_bigint(&unit);
                u.prec = a.prec;
                self.normalize(&mut u);
                u
            };
            let unit_inv = self.inv(&unit_el)?;
            let mut out = self.zero_at(prec);
            for j in 0..self.h {
                let d = &a.digits[0][j] % &modulus;
                if (&d % &p).is_zero() {
                    out.digits[0][j] = d / &p;
                } else {
                    return Err(Error::InvalidInput(
                        "digit not divisible by p in exact division".into(),
                    ));
                }
            }
            self.normalize(&mut out);
            return self.mul(&out, &unit_inv);
        }
        // x = a_0 + a_1 π + ... : x/π = a_1 + a_2 π + ... + (a_0/π)
        // a_0/π = -a_0 · (π^{e-1} + c_{e-1} π^{e-2} + ... + c_1) / c_0
        // with c_0 = p·unit, a_0 ≡ 0 mod p when v(x) ≥ 1.
        let mut shifted = self.zero_at(prec);
        for i in 1..e {
            shifted.digits[i - 1] = a.digits[i].clone();
        }
        let a0_div_p: Vec<BigUint> = a.digits[0]
            .iter()
            .map(|d| {
                let d = d % &modulus;
                if (&d % &p).is_zero() {
                    Ok(d / &p)
                } else {
                    Err(Error::InvalidInput(
                        "digit not divisible by p in exact division".into(),
                    ))
                }
            })
            .collect::<Result<_>>()?;
        // unit0 = c_0/p (integer unit)
        let unit0 = BigInt::from(self.spec.eisenstein[0] / self.spec.p as i64);
        let unit0_el = {
            let mut u = self.from_bigint(&unit0);
            u.prec = prec;
            self.normalize(&mut u);
            u
        };
        let unit0_inv = self.inv(&unit0_el)?;
        // build -a_0/p · (π^{e-1} + Σ_{i≥1} c_i π^{i-1}) · unit0^{-1}
        let mut corr = self.zero_at(prec);
        // coefficient of π^{e-1}: 1
        corr.digits[e - 1] = a0_div_p.clone();
        for i in 1..e {
            let ci = BigInt::from(self.spec.eisenstein[i]);
            if ci.is_zero() {
                continue;
            }
            let contrib = self.w_scale_signed(&a0_div_p, &ci, &modulus);
            for j in 0..self.h {
                corr.digits[i - 1][j] = (&corr.digits[i - 1][j] + &contrib[j]) % &modulus;
            }
        }
        self.normalize(&mut corr);
        let corr = self.neg(&self.mul(&corr, &unit0_inv)?)?;
        self.add(&shifted, &corr)
    }

    /// Inverse of a unit, by Hensel lifting from the residue field.
    pub fn inv(&self, a: &OkElem) -> Result<OkElem> {
        self.check_fp(a)?;
        let v = self.valuation(a);
        if v != Val::Exact(0) {
            return Err(Error::NotAUnit(v));
        }
        let r = self.residue(a);
        let rinv = self.residue.inv(&r)?;
        let mut y = self.lift_residue(&rinv);
        y.prec = a.prec;
        self.normalize(&mut y);
        let one = {
            let mut o = self.one();
            o.prec = a.prec;
            self.normalize(&mut o);
            o
        };
        // y ← y(2 - a y); quadratic convergence
        let bound = 2 + (a.prec as f64).log2().ceil() as u32 + 1;
        for _ in 0..bound {
            let ay = self.mul(a, &y)?;
            if self.congruent(&ay, &one)? {
                return Ok(y);
            }
            let two_minus = self.sub(&self.add(&one, &one)?, &ay)?;
            y = self.mul(&y, &two_minus)?;
        }
        let ay = self.mul(a, &y)?;
        if self.congruent(&ay, &one)? {
            Ok(y)
        } else {
            Err(Error::PrecisionExhausted("unit inversion did not converge".into()))
        }
    }

    /// Exact division `a/b`: strips `v(b)` powers of π from both sides and
    /// unit-divides; lowers precision by `v(b)`.
    pub fn div(&self, a: &OkElem, b: &OkElem) -> Result<OkElem> {
        match self.valuation(b) {
            Val::AtLeast(m) => Err(Error::PrecisionExhausted(format!(
                "division by something indistinguishable from 0 at precision {m}"
            ))),
            Val::Exact(0) => {
                let binv = self.inv(b)?;
                self.mul(a, &binv)
            }
            Val::Exact(v) => {
                let a2 = self.div_pi_pow(a, v as u32)?;
                let b2 = self.div_pi_pow(b, v as u32)?;
                let binv = self.inv(&b2)?;
                self.mul(&a2, &binv)
            }
        }
    }
}

fn fingerprint(spec: &LocalFieldSpec) -> u64 {
    // FNV-1a over the defining data; deterministic across processes.
    let mut hash: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            hash ^= b as u64;
            hash = hash.wrapping_mul(0x100000001b3);
        }
    };
    eat(&spec.p.to_le_bytes());
    eat(&spec.h.to_le_bytes());
    for &c in &spec.eisenstein {
        eat(&c.to_le_bytes());
    }
    eat(&spec.precision.to_le_bytes());
    hash
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n % 2 == 0 {
        return n == 2;
    }
    let mut d = 3u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 2;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2(m: u32) -> Arc<Field> {
        Field::new(LocalFieldSpec {
            p: 2,
            h: 1,
            eisenstein: vec![-2, 1],
            precision: m,
        })
        .unwrap()
    }

    fn q2_sqrt2(m: u32) -> Arc<Field> {
        Field::new(LocalFieldSpec {
            p: 2,
            h: 1,
            eisenstein: vec![-2, 0, 1],
            precision: m,
        })
        .unwrap()
    }

    #[test]
    fn spec_validation() {
        let f = q2(32);
        assert_eq!(f.q(), 2);
        assert_eq!(f.e(), 1);

        let f = q2_sqrt2(32);
        assert_eq!(f.q(), 2);
        assert_eq!(f.e(), 2);
        assert_eq!(f.v_of_p(), 2);

        // constant term a unit: not Eisenstein
        let err = Field::new(LocalFieldSpec {
            p: 2,
            h: 1,
            eisenstein: vec![-1, 0, 1],
            precision: 32,
        });
        assert!(matches!(err, Err(Error::NotEisenstein(_))));

        let err = Field::new(LocalFieldSpec {
            p: 6,
            h: 1,
            eisenstein: vec![-6, 1],
            precision: 32,
        });
        assert!(matches!(err, Err(Error::NotPrime(6))));
    }

    #[test]
    fn mul_mod_16() {
        // 3 · 11 = 33 ≡ 1 mod 16
        let f = q2(4);
        let a = f.from_i64(3);
        let b = f.from_i64(11);
        let prod = f.mul(&a, &b).unwrap();
        assert!(f.congruent(&prod, &f.one()).unwrap());
    }

    #[test]
    fn additive_identity() {
        let f = q2(32);
        let x = f.from_i64(12345);
        let s = f.add(&x, &f.zero()).unwrap();
        assert!(f.congruent(&s, &x).unwrap());
    }

    #[test]
    fn eisenstein_relation() {
        // π² = 2 in Q_2(√2)
        let f = q2_sqrt2(32);
        let pi = f.uniformizer();
        let sq = f.mul(&pi, &pi).unwrap();
        assert!(f.congruent(&sq, &f.from_i64(2)).unwrap());
        assert_eq!(f.valuation(&pi), Val::Exact(1));
        assert_eq!(f.valuation(&f.from_i64(2)), Val::Exact(2));
    }

    #[test]
    fn inversion() {
        let f = q2(4);
        let a = f.from_i64(3);
        let inv = f.inv(&a).unwrap();
        assert!(f.congruent(&inv, &f.from_i64(11)).unwrap());
        assert!(f.congruent(&f.inv(&f.one()).unwrap(), &f.one()).unwrap());
        assert!(matches!(f.inv(&f.from_i64(2)), Err(Error::NotAUnit(_))));
    }

    #[test]
    fn valuation_and_zero() {
        let f = q2(8);
        assert_eq!(f.valuation(&f.from_i64(2)), Val::Exact(1));
        assert_eq!(f.valuation(&f.zero()), Val::AtLeast(8));
        assert_eq!(f.valuation(&f.from_i64(256)), Val::AtLeast(8));
    }

    #[test]
    fn residue_reduction() {
        let f = q2(16);
        assert_eq!(f.residue(&f.from_i64(7)).coords, vec![1]);
        let fr = q2_sqrt2(16);
        assert!(fr.residue_field().is_zero(&fr.residue(&fr.uniformizer())));
    }

    #[test]
    fn residue_lift_roundtrip_f4() {
        // generator of F_4 lifts and reduces back
        let f = Field::new(LocalFieldSpec {
            p: 2,
            h: 2,
            eisenstein: vec![-2, 1],
            precision: 16,
        })
        .unwrap();
        let g = f.residue_field().generator();
        let lifted = f.lift_residue(&g);
        assert_eq!(f.residue(&lifted), g);
        // ω² + ω + 1 = 0 in F_4
        let rf = f.residue_field();
        let sq = rf.mul(&g, &g);
        let s = rf.add(&rf.add(&sq, &g), &rf.one());
        assert!(rf.is_zero(&s));
    }

    #[test]
    fn division_by_pi() {
        let f = q2_sqrt2(16);
        let two = f.from_i64(2);
        let pi = f.uniformizer();
        let d = f.div(&two, &pi).unwrap();
        assert!(f.congruent(&d, &pi).unwrap());
        assert_eq!(d.precision(), 15);
    }

    #[test]
    fn division_exact() {
        let f = q2(16);
        let a = f.from_i64(12);
        let b = f.from_i64(4);
        let d = f.div(&a, &b).unwrap();
        assert!(f.congruent(&d, &f.from_i64(3)).unwrap());
    }

    #[test]
    fn unramified_quadratic_arith() {
        // Z_2[ω]/(ω²+ω+1): check (ω)(ω) = ω² = -ω - 1 mod 2-lift
        let f = Field::new(LocalFieldSpec {
            p: 2,
            h: 2,
            eisenstein: vec![-2, 1],
            precision: 8,
        })
        .unwrap();
        let w = f.from_digits(&[vec![0, 1]], 8).unwrap();
        let sq = f.mul(&w, &w).unwrap();
        let expect = f.from_digits(&[vec![-1, -1]], 8).unwrap();
        assert!(f.congruent(&sq, &expect).unwrap());
        assert!(f.is_unit(&w));
        let winv = f.inv(&w).unwrap();
        assert!(f.congruent(&f.mul(&w, &winv).unwrap(), &f.one()).unwrap());
    }
}
