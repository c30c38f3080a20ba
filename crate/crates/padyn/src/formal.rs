//! Lubin-Tate formal groups over `O_K` and the coefficient-recurrence
//! solvers for their functional equations.
//!
//! The canonical series for a uniformizer `π` is `f = πT + T^q`, which
//! satisfies both Lubin-Tate congruences exactly. The group law and the
//! endomorphisms `[a]` are solved degree by degree; each degree divides by
//! `π^n − π`, a valuation-one element, and the accumulated loss is
//! recorded rather than hidden.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::field::{Field, OkElem, Val};
use crate::series::{BivariateTruncated, ResidueSeries, TruncatedSeries};
use crate::Result;

/// Outcome of a triangular semiconjugacy solve.
#[derive(Debug, Clone)]
pub struct TriangularSolve {
    pub series: TruncatedSeries,
    pub precision_loss: u32,
    pub free_indices: Vec<usize>,
}

/// Solve `X ∘ inner = outer ∘ X` degree by degree with `X'(0)` prescribed
/// when degree 1 is singular.
///
/// Coefficient `n` satisfies `x_n(a₁ⁿ − b₁) = [outer∘X − X∘inner]_n` with
/// `a₁ = inner'(0)`, `b₁ = outer'(0)` and the right side evaluated at
/// `x_n = 0`. Singular steps follow the obstruction policy: the
/// obstruction must vanish at precision, the coefficient is set to zero,
/// and the index is recorded (`allow_free`), or the solve fails.
pub fn solve_conjugation(
    inner: &TruncatedSeries,
    outer: &TruncatedSeries,
    x1: &OkElem,
    allow_free: bool,
) -> Result<TriangularSolve> {
    if inner.field().fingerprint() != outer.field().fingerprint() {
        return Err(Error::SpecMismatch);
    }
    let field = inner.field().clone();
    let trunc = inner.trunc().min(outer.trunc());
    let a1 = inner.linear_coeff();
    let b1 = outer.linear_coeff();
    let start_prec = inner
        .min_precision()
        .min(outer.min_precision())
        .min(x1.precision());

    let mut x = TruncatedSeries::zero(&field, trunc);
    let mut free_indices = Vec::new();
    let mut a1_pow = a1.clone();
    for n in 1..trunc {
        if n > 1 {
            a1_pow = field.mul(&a1_pow, &a1)?;
        }
        let denom = field.sub(&a1_pow, &b1)?;
        let r = {
            // [outer∘X − X∘inner]_n with x_n = 0
            let lhs = outer.compose_trunc(&x, n + 1)?;
            let rhs = x.compose_trunc(inner, n + 1)?;
            field.sub(&lhs.coeff(n), &rhs.coeff(n))?
        };
        let coeff = match field.valuation(&denom) {
            Val::AtLeast(_) => {
                if n == 1 {
                    x1.clone()
                } else if field.is_zero(&r) {
                    free_indices.push(n);
                    field.zero_at(r.precision())
                } else if allow_free {
                    let found = field.valuation(&r).floor();
                    return Err(Error::NoSolution {
                        degree: n,
                        found,
                        required: denom.precision() as i64,
                    });
                } else {
                    return Err(Error::NoCommutantAtPrecision { degree: n });
                }
            }
            Val::Exact(vd) => match field.valuation(&r) {
                Val::Exact(vr) if vr < vd => {
                    if allow_free {
                        return Err(Error::NoSolution {
                            degree: n,
                            found: vr,
                            required: vd,
                        });
                    }
                    return Err(Error::NoCommutantAtPrecision { degree: n });
                }
                Val::AtLeast(m) if m < vd => {
                    return Err(Error::PrecisionExhausted(format!(
                        "obstruction at degree {n} known only mod pi^{m}, denominator has valuation {vd}"
                    )));
                }
                _ => field.div(&r, &denom)?,
            },
        };
        let mut coeffs: Vec<OkElem> = (1..trunc).map(|i| x.coeff(i)).collect();
        coeffs[n - 1] = coeff;
        x = TruncatedSeries::from_coeffs(&field, coeffs, trunc)?;
    }
    let end_prec = x.min_precision();
    Ok(TriangularSolve {
        series: x,
        precision_loss: start_prec.saturating_sub(end_prec),
        free_indices,
    })
}

/// The canonical Lubin-Tate series `f = πT + T^q` for a uniformizer `π`.
pub fn lt_series(field: &Arc<Field>, pi: &OkElem, trunc: usize) -> Result<TruncatedSeries> {
    let v = field.valuation(pi);
    if v != Val::Exact(1) {
        return Err(Error::NotAUniformizer(v));
    }
    let q = field.q() as usize;
    if trunc <= q {
        return Err(Error::InvalidInput(format!(
            "truncation {trunc} too small for T^{q}"
        )));
    }
    let mut coeffs: Vec<OkElem> = (0..trunc - 1).map(|_| field.zero()).collect();
    coeffs[0] = pi.clone();
    coeffs[q - 1] = field.one();
    TruncatedSeries::from_coeffs(field, coeffs, trunc)
}

/// Check the two Lubin-Tate congruences: `f ≡ πT mod T²` for a uniformizer
/// `π = f'(0)` and `f ≡ T^q mod m_K`.
fn validate_lt(field: &Arc<Field>, f: &TruncatedSeries) -> Result<OkElem> {
    let pi = f.linear_coeff();
    if field.valuation(&pi) != Val::Exact(1) {
        return Err(Error::NotLubinTate(
            "linear coefficient is not a uniformizer".into(),
        ));
    }
    let q = field.q() as usize;
    let mut expected = ResidueSeries::zero(field.residue_field(), f.trunc());
    if q < f.trunc() {
        expected.coeffs[q] = field.residue_field().one();
    }
    if !f.reduce().congruent(&expected) {
        return Err(Error::NotLubinTate(format!(
            "reduction is not T^{q} at this truncation"
        )));
    }
    Ok(pi)
}

/// Construct the unique formal group law `F` with `F ≡ X+Y` mod degree 2
/// and `f(F(X,Y)) = F(f(X), f(Y))`, solved total-degree by total-degree.
///
/// Returns the law and the accumulated precision loss (one valuation unit
/// per degree step, from the `π − πⁿ` denominators).
pub fn lt_group_law(
    field: &Arc<Field>,
    f: &TruncatedSeries,
    degree_bound: usize,
) -> Result<(BivariateTruncated, u32)> {
    let pi = validate_lt(field, f)?;
    let trunc = degree_bound + 1;
    let mut law = BivariateTruncated::zero(field, trunc);
    law.set_coeff(1, 0, field.one());
    law.set_coeff(0, 1, field.one());
    let start_prec = f.min_precision();
    let mut pi_pow = pi.clone();
    for n in 2..=degree_bound {
        pi_pow = field.mul(&pi_pow, &pi)?;
        // defect D = F(f(X),f(Y)) − f(F): correction E = D_n/(π − πⁿ)
        let lhs = law.compose_both(f)?;
        let rhs = law.substitute_into(f)?;
        let defect = lhs.sub(&rhs)?;
        let denom = field.sub(&pi, &pi_pow)?;
        if matches!(field.valuation(&denom), Val::AtLeast(_)) {
            return Err(Error::SingularStep { degree: n });
        }
        for i in 0..=n {
            let j = n - i;
            if i + j >= trunc {
                continue;
            }
            let d = defect.coeff(i, j);
            if field.is_zero(&d) && d.precision() >= field.precision() {
                continue;
            }
            let e = field.div(&d, &denom)?;
            law.set_coeff(i, j, field.add(&law.coeff(i, j), &e)?);
        }
    }
    // final defect must vanish at the tracked precision
    let lhs = law.compose_both(f)?;
    let rhs = law.substitute_into(f)?;
    let defect = lhs.sub(&rhs)?;
    if let Val::Exact(_) = defect.min_coeff_valuation() {
        return Err(Error::SingularStep {
            degree: degree_bound,
        });
    }
    let end_prec = law_min_precision(&law);
    Ok((law, start_prec.saturating_sub(end_prec)))
}

fn law_min_precision(law: &BivariateTruncated) -> u32 {
    let field = law.field().clone();
    let mut m = field.precision();
    for i in 0..law.trunc() {
        for j in 0..law.trunc() - i {
            if i + j == 0 {
                continue;
            }
            m = m.min(law.coeff(i, j).precision());
        }
    }
    m
}

/// The endomorphism `[a]`: unique with `[a] ≡ aT mod T²`, `f∘[a] = [a]∘f`.
pub fn lt_endomorphism_series(
    field: &Arc<Field>,
    f: &TruncatedSeries,
    a: &OkElem,
) -> Result<(TruncatedSeries, u32)> {
    validate_lt(field, f)?;
    let solve = solve_conjugation(f, f, a, false)?;
    Ok((solve.series, solve.precision_loss))
}

/// A Lubin-Tate formal group with its law and a thread-safe memo table of
/// endomorphisms.
#[derive(Debug)]
pub struct LubinTateData {
    field: Arc<Field>,
    pi: OkElem,
    f: TruncatedSeries,
    group_law: BivariateTruncated,
    group_law_loss: u32,
    endo_cache: Mutex<HashMap<String, TruncatedSeries>>,
}

impl LubinTateData {
    /// Build from a uniformizer: canonical `f = πT + T^q`, group law up to
    /// the given total degree.
    pub fn new(
        field: &Arc<Field>,
        pi: &OkElem,
        series_trunc: usize,
        law_degree: usize,
    ) -> Result<LubinTateData> {
        let f = lt_series(field, pi, series_trunc)?;
        let (group_law, group_law_loss) = lt_group_law(field, &f, law_degree)?;
        Ok(LubinTateData {
            field: field.clone(),
            pi: pi.clone(),
            f,
            group_law,
            group_law_loss,
            endo_cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn field(&self) -> &Arc<Field> {
        &self.field
    }

    pub fn pi(&self) -> &OkElem {
        &self.pi
    }

    pub fn f(&self) -> &TruncatedSeries {
        &self.f
    }

    pub fn group_law(&self) -> &BivariateTruncated {
        &self.group_law
    }

    pub fn group_law_loss(&self) -> u32 {
        self.group_law_loss
    }

    /// `[a]`, memoized by digit key. The same key always yields the
    /// identical series.
    pub fn endomorphism(&self, a: &OkElem) -> Result<TruncatedSeries> {
        let key = format!("{:?}@{}", a.digit_strings(), a.precision());
        if let Some(hit) = self.endo_cache.lock().unwrap().get(&key) {
            return Ok(hit.clone());
        }
        let (series, _) = lt_endomorphism_series(&self.field, &self.f, a)?;
        self.endo_cache
            .lock()
            .unwrap()
            .insert(key, series.clone());
        Ok(series)
    }
}

/// An isogeny solution `h` with `P∘h = h∘P_S`, with provenance.
#[derive(Debug, Clone)]
pub struct IsogenySolution {
    pub h: TruncatedSeries,
    /// Floor of the minimum coefficient valuation of `P∘h − h∘P_S`.
    pub residual_valuation: i64,
    pub precision_loss: u32,
    /// Indices where the recurrence was singular and `h_n = 0` was chosen.
    pub free_indices: Vec<usize>,
}

/// Solve `h ∘ p_s = p ∘ h` with `h'(0) = h1` at the forced degree-1 choice.
pub fn isogeny_solve(
    p: &TruncatedSeries,
    p_s: &TruncatedSeries,
    h1: &OkElem,
) -> Result<IsogenySolution> {
    let solve = solve_conjugation(p_s, p, h1, true)?;
    let report = semiconjugacy_verify(p, p_s, &solve.series)?;
    Ok(IsogenySolution {
        h: solve.series,
        residual_valuation: report.residual_valuation,
        precision_loss: solve.precision_loss,
        free_indices: solve.free_indices,
    })
}

/// Residual report for a claimed semiconjugacy `P∘h = h∘P_S`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SemiconjugacyReport {
    /// Floor of the minimum coefficient valuation of the residual.
    pub residual_valuation: i64,
    /// Whether some residual coefficient has exactly-known valuation
    /// (a genuine nonzero residual rather than a precision floor).
    pub residual_exact: bool,
    /// T-adic truncation the check was performed at.
    pub checked_trunc: usize,
}

pub fn semiconjugacy_verify(
    p: &TruncatedSeries,
    p_s: &TruncatedSeries,
    h: &TruncatedSeries,
) -> Result<SemiconjugacyReport> {
    let lhs = p.compose(h)?;
    let rhs = h.compose(p_s)?;
    let residual = lhs.sub(&rhs)?;
    let v = residual.min_coeff_valuation();
    Ok(SemiconjugacyReport {
        residual_valuation: v.floor(),
        residual_exact: v.is_exact(),
        checked_trunc: residual.trunc(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::LocalFieldSpec;

    fn field(p: u64, h: u32, m: u32) -> Arc<Field> {
        Field::new(LocalFieldSpec {
            p,
            h,
            eisenstein: vec![-(p as i64), 1],
            precision: m,
        })
        .unwrap()
    }

    #[test]
    fn canonical_series() {
        let f3 = field(3, 1, 32);
        let f = lt_series(&f3, &f3.from_i64(3), 8).unwrap();
        let expect = TruncatedSeries::from_integers(&f3, &[3, 0, 1], 8);
        assert!(f.congruent(&expect).unwrap());

        let f2 = field(2, 1, 32);
        let f = lt_series(&f2, &f2.from_i64(2), 8).unwrap();
        let expect = TruncatedSeries::from_integers(&f2, &[2, 1], 8);
        assert!(f.congruent(&expect).unwrap());

        // 6 is a uniformizer of Z_2: accepted
        let f = lt_series(&f2, &f2.from_i64(6), 8).unwrap();
        let expect = TruncatedSeries::from_integers(&f2, &[6, 1], 8);
        assert!(f.congruent(&expect).unwrap());

        // 3 is a unit of Z_2: rejected
        assert!(matches!(
            lt_series(&f2, &f2.from_i64(3), 8),
            Err(Error::NotAUniformizer(_))
        ));
    }

    #[test]
    fn multiplicative_group_law() {
        // f = 2T + T² = (1+T)² − 1: the law is X + Y + XY exactly
        let f2 = field(2, 1, 32);
        let f = lt_series(&f2, &f2.from_i64(2), 10).unwrap();
        let (law, _loss) = lt_group_law(&f2, &f, 8).unwrap();
        for i in 0..=8usize {
            for j in 0..=8usize {
                if i + j > 8 || i + j == 0 {
                    continue;
                }
                let c = law.coeff(i, j);
                let expect = match (i, j) {
                    (1, 0) | (0, 1) | (1, 1) => f2.one(),
                    _ => f2.zero_at(c.precision()),
                };
                assert!(
                    f2.congruent(&c, &expect).unwrap(),
                    "coefficient ({i},{j}) wrong"
                );
            }
        }
        // F(X,0) = X exactly
        let fx0 = law.set_y_zero().unwrap();
        let t = TruncatedSeries::identity(&f2, fx0.trunc());
        assert!(fx0.congruent(&t).unwrap());
    }

    #[test]
    fn z3_group_law_residual() {
        let f3 = field(3, 1, 32);
        let f = lt_series(&f3, &f3.from_i64(3), 14).unwrap();
        let (law, loss) = lt_group_law(&f3, &f, 12).unwrap();
        let lhs = law.substitute_into(&f).unwrap();
        let rhs = law.compose_both(&f).unwrap();
        let defect = lhs.sub(&rhs).unwrap();
        match defect.min_coeff_valuation() {
            Val::AtLeast(m) => assert!(m as u32 >= 32 - loss - 1),
            Val::Exact(v) => panic!("nonzero residual of valuation {v}"),
        }
        // commutativity holds exactly
        let sym = law.swap_vars().sub(&law).unwrap();
        assert!(matches!(sym.min_coeff_valuation(), Val::AtLeast(_)));
    }

    #[test]
    fn endomorphisms_multiplicative() {
        let f2 = field(2, 1, 48);
        let lt = LubinTateData::new(&f2, &f2.from_i64(2), 10, 6).unwrap();
        // [1] = T
        let e1 = lt.endomorphism(&f2.one()).unwrap();
        assert!(e1
            .congruent(&TruncatedSeries::identity(&f2, 10))
            .unwrap());
        // [π] = f
        let epi = lt.endomorphism(&f2.from_i64(2)).unwrap();
        assert!(epi.congruent(lt.f()).unwrap());
        // [3] = (1+T)³ − 1
        let e3 = lt.endomorphism(&f2.from_i64(3)).unwrap();
        let expect = TruncatedSeries::from_integers(&f2, &[3, 3, 1], 10);
        assert!(e3.congruent(&expect).unwrap());
        // cache returns the identical series
        let e3b = lt.endomorphism(&f2.from_i64(3)).unwrap();
        assert!(e3b.congruent(&e3).unwrap());
    }

    #[test]
    fn isogeny_identity() {
        let f3 = field(3, 1, 32);
        let f = lt_series(&f3, &f3.from_i64(3), 10).unwrap();
        let sol = isogeny_solve(&f, &f, &f3.one()).unwrap();
        assert!(sol
            .h
            .congruent(&TruncatedSeries::identity(&f3, 10))
            .unwrap());
        assert!(sol.free_indices.is_empty());
        assert!(sol.residual_valuation >= 32 - sol.precision_loss as i64);
    }

    #[test]
    fn isogeny_between_lt_models() {
        // (1+T)³−1 and 3T+T³ are both Lubin-Tate for π = 3 over Z_3:
        // a strict isomorphism with h'(0) = 1 exists
        let f3 = field(3, 1, 48);
        let p = TruncatedSeries::from_integers(&f3, &[3, 3, 1], 24);
        let p_s = TruncatedSeries::from_integers(&f3, &[3, 0, 1], 24);
        let sol = isogeny_solve(&p, &p_s, &f3.one()).unwrap();
        assert!(sol.free_indices.is_empty());
        assert!(f3.congruent(&sol.h.linear_coeff(), &f3.one()).unwrap());
        assert!(sol.residual_valuation >= 48 - sol.precision_loss as i64);
        // independent confirmation
        let rep = semiconjugacy_verify(&p, &p_s, &sol.h).unwrap();
        assert_eq!(rep.residual_valuation, sol.residual_valuation);
        assert!(!rep.residual_exact);
    }

    #[test]
    fn isogeny_spec_mismatch() {
        let f2 = field(2, 1, 32);
        let f3 = field(3, 1, 32);
        let p = TruncatedSeries::from_integers(&f2, &[2, 1], 8);
        let p_s = TruncatedSeries::from_integers(&f3, &[3, 0, 1], 8);
        assert!(matches!(
            isogeny_solve(&p, &p_s, &f2.one()),
            Err(Error::SpecMismatch)
        ));
    }

    #[test]
    fn semiconjugacy_trivial_cases() {
        let f2 = field(2, 1, 32);
        let f = lt_series(&f2, &f2.from_i64(2), 10).unwrap();
        let t = TruncatedSeries::identity(&f2, 10);
        let rep = semiconjugacy_verify(&f, &f, &t).unwrap();
        assert!(!rep.residual_exact);
        assert!(rep.residual_valuation >= 32);
    }
}
