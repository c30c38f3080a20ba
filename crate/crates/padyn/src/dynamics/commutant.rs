//! Solving for the commutant of a noninvertible series: the unique `U`
//! with `U∘P = P∘U` and prescribed `U'(0)`.

use crate::error::Error;
use crate::field::{OkElem, Val};
use crate::formal::{solve_conjugation, TriangularSolve};
use crate::series::{TruncatedSeries, Wideg};
use crate::Result;

/// Solve `U∘P = P∘U` with `U'(0) = u1` (a unit), degree by degree. Each
/// step divides by `P'(0)ⁿ − P'(0)`, so the loss per coefficient is
/// `v(P'(0))`; the accumulated loss is reported on the result.
pub fn commutant_solve(p: &TruncatedSeries, u1: &OkElem) -> Result<TriangularSolve> {
    let field = p.field();
    if matches!(p.weierstrass_degree(), Wideg::ZeroReduction) {
        return Err(Error::WrongShape(
            "commutant target vanishes mod the maximal ideal".into(),
        ));
    }
    match field.valuation(&p.linear_coeff()) {
        Val::Exact(0) => {
            return Err(Error::WrongShape(
                "commutant target must be noninvertible".into(),
            ))
        }
        Val::AtLeast(_) => {
            return Err(Error::PrecisionExhausted(
                "P'(0) indistinguishable from zero".into(),
            ))
        }
        _ => {}
    }
    if field.valuation(u1) != Val::Exact(0) {
        return Err(Error::NotAUnit(field.valuation(u1)));
    }
    solve_conjugation(p, p, u1, false)
}
