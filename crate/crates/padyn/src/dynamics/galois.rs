//! Galois certification of tower levels by orbit computation.
//!
//! At level `n` the certifier searches for an invertible series `g` in the
//! centralizer that fixes `x_{n−1}` and whose orbit on `x_n` exhausts the
//! roots of the defining relation inside the level-`n` ring. The
//! certificate is the verified data itself: pairwise-distinct ring
//! elements, each satisfying the relation at working precision, whose
//! product polynomial reproduces the relation coefficient-wise. How the
//! candidates were generated cannot weaken the certificate, so the search
//! family includes powers of `U` and, when the powers of `U` generate too
//! small a subgroup of the unit group (which happens at p = 2, where the
//! closure of ⟨U'(0)⟩ can have index 2), the solved commutant with linear
//! coefficient −1 composed with powers of `U`.
//!
//! Verdicts are sound but incomplete: `certified_galois` at level `n`
//! additionally requires every lower level to be certified, since the
//! level-by-level root coverage is what chains into Galois-ness over the
//! base.

use crate::dynamics::commutant::commutant_solve;
use crate::dynamics::pair::CommutingPair;
use crate::dynamics::tower::{IrredCert, QuotientTower, TElem};
use crate::error::Error;
use crate::rat::Rat;
use crate::ring::{self, RingOps};
use crate::series::TruncatedSeries;
use crate::Result;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GaloisVerdict {
    Certified,
    Inconclusive(String),
    /// Reserved: the certifier never proves non-Galois-ness at finite
    /// precision, it only fails to certify.
    NotGalois,
}

#[derive(Debug, Clone)]
pub struct LevelCertificate {
    pub level: usize,
    pub verdict: GaloisVerdict,
    pub orbit_size: usize,
    /// Description of the orbit generator, e.g. `U^2` or `aux(-1)∘U^1`.
    pub generator: String,
    /// The orbit elements, starting with the level generator.
    pub orbit: Vec<TElem>,
    /// Coefficients of `∏(T − orbit)` (monic, level-`n` elements).
    pub product: Vec<TElem>,
    /// The defining relation embedded at level `n` (the comparison target:
    /// the distinguished part of `Q(T) − x_{n−1}`).
    pub relation: Vec<TElem>,
    /// Minimum leaf precision across the certificate data.
    pub working_precision: u32,
    /// Valuation floor of `g∘Q − Q∘g` for the base generators used.
    pub commutation_floor: i64,
}

/// Lazily solved auxiliary commutant `[−1]` (the inversion series of the
/// conjectural formal group); absent when the solve is obstructed.
struct AuxCache<'a> {
    q: &'a TruncatedSeries,
    cached: Option<Option<(TruncatedSeries, i64)>>,
}

impl<'a> AuxCache<'a> {
    fn new(q: &'a TruncatedSeries) -> AuxCache<'a> {
        AuxCache { q, cached: None }
    }

    fn get(&mut self) -> Option<&(TruncatedSeries, i64)> {
        if self.cached.is_none() {
            let field = self.q.field().clone();
            let minus_one = field.neg(&field.one()).ok()?;
            let solved = commutant_solve(self.q, &minus_one).ok().map(|sol| {
                let floor = commutation_floor(self.q, &sol.series);
                (sol.series, floor)
            });
            self.cached = Some(solved);
        }
        self.cached.as_ref().unwrap().as_ref()
    }
}

fn commutation_floor(q: &TruncatedSeries, g: &TruncatedSeries) -> i64 {
    match (|| -> Result<i64> {
        let lhs = g.compose(q)?;
        let rhs = q.compose(g)?;
        Ok(lhs.sub(&rhs)?.min_coeff_valuation().floor())
    })() {
        Ok(v) => v,
        Err(_) => 0,
    }
}

/// Certify levels `1..=up_to` in order. Each level's verdict already
/// accounts for the chain: a level is `Certified` only if its own fiber
/// certificate closed and every lower level is certified.
pub fn certify_levels(
    tower: &QuotientTower,
    pair: &CommutingPair,
    up_to: usize,
    orbit_power_bound: u32,
) -> Result<Vec<LevelCertificate>> {
    if up_to > tower.levels.len() {
        return Err(Error::TowerMismatch);
    }
    let q = tower.q().clone();
    let u_floor = commutation_floor(&q, &pair.u);
    let mut aux = AuxCache::new(&q);
    let mut out: Vec<LevelCertificate> = Vec::with_capacity(up_to);
    let mut chain_ok = true;
    for level in 1..=up_to {
        let mut cert = certify_fiber(tower, pair, level, orbit_power_bound, u_floor, &mut aux)?;
        if !chain_ok {
            if cert.verdict == GaloisVerdict::Certified {
                cert.verdict =
                    GaloisVerdict::Inconclusive("a lower level is not certified".into());
            }
        }
        if cert.verdict != GaloisVerdict::Certified {
            chain_ok = false;
        }
        out.push(cert);
    }
    Ok(out)
}

/// The per-level verdict for a single level, including the chain
/// requirement on all lower levels (recomputed).
pub fn galois_certify(
    tower: &QuotientTower,
    pair: &CommutingPair,
    level: usize,
    orbit_power_bound: u32,
) -> Result<LevelCertificate> {
    // precondition: irreducibility certificates at all levels ≤ level
    for (i, l) in tower.levels.iter().take(level).enumerate() {
        if l.cert != IrredCert::SingleSlopeFullDenominator {
            return Err(Error::CertificateMissing { level: i + 1 });
        }
    }
    let mut all = certify_levels(tower, pair, level, orbit_power_bound)?;
    all.pop().ok_or(Error::TowerMismatch)
}

fn certify_fiber(
    tower: &QuotientTower,
    pair: &CommutingPair,
    level: usize,
    orbit_power_bound: u32,
    u_floor: i64,
    aux: &mut AuxCache<'_>,
) -> Result<LevelCertificate> {
    let data = &tower.levels[level - 1];
    let ring = tower.ring(level);
    let fiber_size = data.degree;
    let v_here = data.gen_val;
    let x = tower.generator(level)?;
    let relation: Vec<TElem> = data
        .relation
        .iter()
        .map(|c| tower.embed(c, level - 1, level))
        .collect::<Result<_>>()?;

    if data.cert != IrredCert::SingleSlopeFullDenominator {
        return Ok(LevelCertificate {
            level,
            verdict: GaloisVerdict::Inconclusive(
                "missing single-slope-full-denominator certificate".into(),
            ),
            orbit_size: 0,
            generator: String::new(),
            orbit: vec![],
            product: vec![],
            relation,
            working_precision: 0,
            commutation_floor: u_floor,
        });
    }

    // degenerate fiber: a single root, trivially covered
    if fiber_size == 1 {
        let rel_val = tower.eval_relation(level, &x)?;
        if !ring.is_zero(&rel_val) {
            return Err(Error::RelationDegenerate(
                "generator does not satisfy its own relation".into(),
            ));
        }
        let product = ring::poly_from_roots(&ring, std::slice::from_ref(&x))?;
        let wp = certificate_precision(tower, &[x.clone()], &product, &relation);
        return Ok(LevelCertificate {
            level,
            verdict: GaloisVerdict::Certified,
            orbit_size: 1,
            generator: "id".into(),
            orbit: vec![x],
            product,
            relation,
            working_precision: wp,
            commutation_floor: u_floor,
        });
    }

    // incremental chains: y_k = U^{∘k}(x_{level-1}) for the fixing check,
    // z_k = U^{∘k}(x) for reuse as the first orbit step
    let (x_prev, v_prev) = if level >= 2 {
        (
            Some(tower.generator(level - 1)?),
            tower.levels[level - 2].gen_val,
        )
    } else {
        (None, Rat::int(1))
    };
    let mut y = x_prev.clone();
    let mut z = x.clone();
    let mut best_orbit = 1usize;
    let mut best_reason = String::new();

    for k in 1..=orbit_power_bound {
        if let Some(prev) = &x_prev {
            y = Some(tower.evaluate(&pair.u, level - 1, y.as_ref().unwrap(), v_prev)?);
            let _ = prev;
        }
        z = tower.evaluate(&pair.u, level, &z, v_here)?;

        // family 1: U^k, needs U^k to fix x_{level-1}
        let u_fixes = match (&x_prev, &y) {
            (Some(prev), Some(yk)) => tower.congruent(level - 1, yk, prev)?,
            _ => true,
        };
        if u_fixes {
            let step = |elt: &TElem| -> Result<TElem> {
                let mut cur = elt.clone();
                for _ in 0..k {
                    cur = tower.evaluate(&pair.u, level, &cur, v_here)?;
                }
                Ok(cur)
            };
            match try_orbit(tower, level, &x, &z, fiber_size, &relation, step)? {
                OrbitOutcome::Full(orbit) => {
                    return finish_certified(
                        tower,
                        level,
                        orbit,
                        relation,
                        format!("U^{k}"),
                        u_floor,
                    );
                }
                OrbitOutcome::Partial(n, why) => {
                    if n > best_orbit {
                        best_orbit = n;
                        best_reason = why;
                    } else if best_reason.is_empty() {
                        best_reason = why;
                    }
                }
            }
        }

        // family 2: aux(−1)∘U^k. Searching beyond powers of U is justified
        // by the centralizer structure only under the standing hypothesis
        // that U'(0) is not a root of unity, so the family is gated on the
        // recorded proxy check.
        if pair.unit_order_proxy_ok {
            if let Some((aux_series, aux_floor)) = aux.get().cloned() {
                let floor = u_floor.min(aux_floor);
                let fixes = match (&x_prev, &y) {
                    (Some(prev), Some(yk)) => {
                        let ay = tower.evaluate(&aux_series, level - 1, yk, v_prev)?;
                        tower.congruent(level - 1, &ay, prev)?
                    }
                    _ => true,
                };
                if fixes {
                    let first = tower.evaluate(&aux_series, level, &z, v_here)?;
                    let step = |elt: &TElem| -> Result<TElem> {
                        let mut cur = elt.clone();
                        for _ in 0..k {
                            cur = tower.evaluate(&pair.u, level, &cur, v_here)?;
                        }
                        tower.evaluate(&aux_series, level, &cur, v_here)
                    };
                    match try_orbit(tower, level, &x, &first, fiber_size, &relation, step)? {
                        OrbitOutcome::Full(orbit) => {
                            return finish_certified(
                                tower,
                                level,
                                orbit,
                                relation,
                                format!("aux(-1)∘U^{k}"),
                                floor,
                            );
                        }
                        OrbitOutcome::Partial(n, why) => {
                            if n > best_orbit {
                                best_orbit = n;
                                best_reason = why;
                            } else if best_reason.is_empty() {
                                best_reason = why;
                            }
                        }
                    }
                }
            }
        }
    }

    let reason = if best_reason.is_empty() {
        format!(
            "no orbit generator found fixing the level below (searched U^1..U^{orbit_power_bound})"
        )
    } else {
        best_reason
    };
    Ok(LevelCertificate {
        level,
        verdict: GaloisVerdict::Inconclusive(reason),
        orbit_size: best_orbit,
        generator: String::new(),
        orbit: vec![],
        product: vec![],
        relation,
        working_precision: 0,
        commutation_floor: u_floor,
    })
}

enum OrbitOutcome {
    Full(Vec<TElem>),
    Partial(usize, String),
}

/// Collect the orbit of `x` under `step` (whose first application is
/// `first`), verifying relation membership and pairwise distinctness, up
/// to the fiber size.
fn try_orbit(
    tower: &QuotientTower,
    level: usize,
    x: &TElem,
    first: &TElem,
    fiber_size: usize,
    _relation: &[TElem],
    step: impl Fn(&TElem) -> Result<TElem>,
) -> Result<OrbitOutcome> {
    let ring = tower.ring(level);
    let mut orbit: Vec<TElem> = vec![x.clone()];
    let mut cur = first.clone();
    loop {
        // relation membership at working precision
        let rel_val = tower.eval_relation(level, &cur)?;
        if !ring.is_zero(&rel_val) {
            return Ok(OrbitOutcome::Partial(
                orbit.len(),
                "orbit leaves the fiber (relation violated)".into(),
            ));
        }
        if tower.congruent(level, &cur, x)? {
            break; // closed
        }
        for seen in &orbit[1..] {
            if tower.congruent(level, &cur, seen)? {
                return Ok(OrbitOutcome::Partial(
                    orbit.len(),
                    "orbit is preperiodic at working precision".into(),
                ));
            }
        }
        orbit.push(cur.clone());
        if orbit.len() > fiber_size {
            return Ok(OrbitOutcome::Partial(
                orbit.len(),
                "orbit exceeds the fiber size".into(),
            ));
        }
        cur = step(&cur)?;
    }
    if orbit.len() == fiber_size {
        Ok(OrbitOutcome::Full(orbit))
    } else {
        Ok(OrbitOutcome::Partial(
            orbit.len(),
            format!(
                "orbit closed after {} of {} roots",
                orbit.len(),
                fiber_size
            ),
        ))
    }
}

fn finish_certified(
    tower: &QuotientTower,
    level: usize,
    orbit: Vec<TElem>,
    relation: Vec<TElem>,
    generator: String,
    commutation_floor: i64,
) -> Result<LevelCertificate> {
    let ring = tower.ring(level);
    let product = ring::poly_from_roots(&ring, &orbit)?;
    // the product congruence is the certificate
    for (i, rel_c) in relation.iter().enumerate() {
        let pc = product
            .get(i)
            .cloned()
            .unwrap_or_else(|| ring.zero());
        let d = ring.sub(&pc, rel_c)?;
        if !ring.is_zero(&d) {
            return Ok(LevelCertificate {
                level,
                verdict: GaloisVerdict::Inconclusive(format!(
                    "product congruence fails at coefficient {i}"
                )),
                orbit_size: orbit.len(),
                generator,
                orbit,
                product,
                relation,
                working_precision: 0,
                commutation_floor,
            });
        }
    }
    let wp = certificate_precision(tower, &orbit, &product, &relation);
    Ok(LevelCertificate {
        level,
        verdict: GaloisVerdict::Certified,
        orbit_size: orbit.len(),
        generator,
        orbit,
        product,
        relation,
        working_precision: wp,
        commutation_floor,
    })
}

fn certificate_precision(
    tower: &QuotientTower,
    orbit: &[TElem],
    product: &[TElem],
    relation: &[TElem],
) -> u32 {
    let mut m = tower.field().precision();
    for e in orbit.iter().chain(product).chain(relation) {
        m = m.min(tower.min_precision(e));
    }
    m
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

    fn mult_pair(f: &Arc<Field>, trunc: usize) -> CommutingPair {
        let p = TruncatedSeries::from_integers(f, &[2, 1], trunc);
        let u = TruncatedSeries::from_integers(f, &[3, 3, 1], trunc);
        check_commute(&p, &u, 1 << 12).unwrap()
    }

    #[test]
    fn level_one_trivial() {
        let f = q2(64);
        let pair = mult_pair(&f, 32);
        let tower = QuotientTower::build(&f, &pair.p, 1).unwrap();
        let cert = galois_certify(&tower, &pair, 1, 16).unwrap();
        assert_eq!(cert.verdict, GaloisVerdict::Certified);
        assert_eq!(cert.orbit_size, 1);
    }

    #[test]
    fn level_two_full_orbit() {
        let f = q2(64);
        let pair = mult_pair(&f, 32);
        let tower = QuotientTower::build(&f, &pair.p, 2).unwrap();
        let cert = galois_certify(&tower, &pair, 2, 16).unwrap();
        assert_eq!(cert.verdict, GaloisVerdict::Certified);
        assert_eq!(cert.orbit_size, 2);
        assert_eq!(cert.generator, "U^1");
    }

    #[test]
    fn level_three_needs_aux() {
        // powers of U = (1+T)³−1 fix the level below only by fixing the
        // generator too; the aux(−1) family resolves the fiber
        let f = q2(64);
        let pair = mult_pair(&f, 64);
        let tower = QuotientTower::build(&f, &pair.p, 3).unwrap();
        let cert = galois_certify(&tower, &pair, 3, 16).unwrap();
        assert_eq!(cert.verdict, GaloisVerdict::Certified);
        assert_eq!(cert.orbit_size, 2);
        assert!(cert.generator.starts_with("aux(-1)"), "{}", cert.generator);
    }

    #[test]
    fn identity_u_is_inconclusive() {
        let f = q2(64);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 16);
        let t = TruncatedSeries::identity(&f, 16);
        let pair = check_commute(&p, &t, 64).unwrap();
        let tower = QuotientTower::build(&f, &p, 2).unwrap();
        let cert = galois_certify(&tower, &pair, 2, 8).unwrap();
        assert!(matches!(cert.verdict, GaloisVerdict::Inconclusive(_)));
        assert!(cert.orbit_size < 2);
    }
}
