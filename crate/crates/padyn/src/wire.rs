//! Wire formats: JSON shapes for field specs, series, tower elements,
//! criterion reports and isogeny reports, plus TSV emitters for polygons
//! and valuation traces, and the independent certificate re-verification
//! pass that recomputes orbit products from serialized data alone.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::dynamics::criterion::{CriterionReport, LevelVerdict};
use crate::dynamics::galois::{GaloisVerdict, LevelCertificate};
use crate::dynamics::tower::{QuotientTower, TElem};
use crate::dynamics::valuations::ValuationTrace;
use crate::error::Error;
use crate::field::{Field, LocalFieldSpec, OkElem};
use crate::formal::IsogenySolution;
use crate::newton::NewtonPolygon;
use crate::rat::Rat;
use crate::ring::{self, RingOps};
use crate::series::TruncatedSeries;
use crate::Result;

/// One `O_K` element: flattened monomial-basis digits (π-major, then ω)
/// as decimal strings, plus the precision it is known to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoeffWire {
    pub digits: Vec<String>,
    pub prec: u32,
}

impl CoeffWire {
    pub fn from_elem(x: &OkElem) -> CoeffWire {
        CoeffWire {
            digits: x.digit_strings().into_iter().flatten().collect(),
            prec: x.precision(),
        }
    }

    pub fn to_elem(&self, field: &Arc<Field>) -> Result<OkElem> {
        let h = field.h();
        if self.digits.len() % h != 0 {
            return Err(Error::InvalidInput("digit vector length mismatch".into()));
        }
        let rows: Vec<Vec<String>> = self.digits.chunks(h).map(|c| c.to_vec()).collect();
        field.from_digit_strings(&rows, self.prec)
    }
}

/// A truncated series: `spec_ref` is the hex fingerprint of the field spec
/// it was created under; `coeffs` start at the `T^0` slot (always zero).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeriesWire {
    pub spec_ref: String,
    pub coeffs: Vec<CoeffWire>,
    pub trunc: usize,
}

impl SeriesWire {
    pub fn from_series(f: &TruncatedSeries) -> SeriesWire {
        SeriesWire {
            spec_ref: format!("{:016x}", f.field().fingerprint()),
            coeffs: f.raw_coeffs().iter().map(CoeffWire::from_elem).collect(),
            trunc: f.trunc(),
        }
    }

    pub fn to_series(&self, field: &Arc<Field>) -> Result<TruncatedSeries> {
        if self.spec_ref != format!("{:016x}", field.fingerprint()) {
            return Err(Error::SpecMismatch);
        }
        let coeffs: Vec<OkElem> = self.coeffs[1..]
            .iter()
            .map(|c| c.to_elem(field))
            .collect::<Result<_>>()?;
        TruncatedSeries::from_coeffs(field, coeffs, self.trunc)
    }
}

/// A tower element: a base leaf or coefficients over the level below.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum TElemWire {
    #[serde(rename = "base")]
    Base(CoeffWire),
    #[serde(rename = "ext")]
    Ext(Vec<TElemWire>),
}

impl TElemWire {
    pub fn from_elem(x: &TElem) -> TElemWire {
        match x {
            TElem::Base(b) => TElemWire::Base(CoeffWire::from_elem(b)),
            TElem::Ext(cs) => TElemWire::Ext(cs.iter().map(TElemWire::from_elem).collect()),
        }
    }

    pub fn to_elem(&self, field: &Arc<Field>) -> Result<TElem> {
        Ok(match self {
            TElemWire::Base(c) => TElem::Base(c.to_elem(field)?),
            TElemWire::Ext(cs) => TElem::Ext(
                cs.iter()
                    .map(|c| c.to_elem(field))
                    .collect::<Result<_>>()?,
            ),
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateWire {
    pub level: usize,
    pub verdict: String,
    pub reason: Option<String>,
    pub orbit_size: usize,
    pub generator: String,
    pub orbit: Vec<TElemWire>,
    pub product: Vec<TElemWire>,
    pub relation: Vec<TElemWire>,
    pub working_precision: u32,
    pub commutation_floor: i64,
}

impl CertificateWire {
    pub fn from_certificate(c: &LevelCertificate) -> CertificateWire {
        let (verdict, reason) = match &c.verdict {
            GaloisVerdict::Certified => ("certified_galois".to_string(), None),
            GaloisVerdict::Inconclusive(w) => ("inconclusive".to_string(), Some(w.clone())),
            GaloisVerdict::NotGalois => ("not_galois".to_string(), None),
        };
        CertificateWire {
            level: c.level,
            verdict,
            reason,
            orbit_size: c.orbit_size,
            generator: c.generator.clone(),
            orbit: c.orbit.iter().map(TElemWire::from_elem).collect(),
            product: c.product.iter().map(TElemWire::from_elem).collect(),
            relation: c.relation.iter().map(TElemWire::from_elem).collect(),
            working_precision: c.working_precision,
            commutation_floor: c.commutation_floor,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Condition1Wire {
    pub satisfied: bool,
    pub v: Option<SeriesWire>,
    pub q: Option<SeriesWire>,
    pub d: Option<u32>,
    pub iterate_used: Option<u32>,
    pub precision_loss: u32,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TowerWire {
    /// Per-level monic relation coefficients (over the level below).
    pub relations: Vec<Vec<TElemWire>>,
    pub certs: Vec<String>,
    pub gen_vals: Vec<Rat>,
    pub rams: Vec<i64>,
    pub ranks: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionReportWire {
    pub spec: LocalFieldSpec,
    pub condition1: Condition1Wire,
    pub condition2: Vec<LevelVerdict>,
    pub certificates: Vec<CertificateWire>,
    pub tower: Option<TowerWire>,
    pub levels_requested: u32,
    pub checked_range: String,
    pub commute_residual: i64,
    pub unit_order_proxy_ok: bool,
    pub unit_order_bound_checked: u64,
}

impl CriterionReportWire {
    pub fn from_report(spec: &LocalFieldSpec, r: &CriterionReport) -> CriterionReportWire {
        CriterionReportWire {
            spec: spec.clone(),
            condition1: Condition1Wire {
                satisfied: r.condition1.satisfied,
                v: r.condition1.v.as_ref().map(SeriesWire::from_series),
                q: r.condition1.q.as_ref().map(SeriesWire::from_series),
                d: r.condition1.d,
                iterate_used: r.condition1.iterate_used,
                precision_loss: r.condition1.precision_loss,
                failure: r.condition1.failure.clone(),
            },
            condition2: r.condition2.clone(),
            certificates: r
                .certificates
                .iter()
                .map(CertificateWire::from_certificate)
                .collect(),
            tower: r.tower.as_ref().map(|t| TowerWire {
                relations: t
                    .levels
                    .iter()
                    .map(|l| l.relation.iter().map(TElemWire::from_elem).collect())
                    .collect(),
                certs: t.levels.iter().map(|l| format!("{:?}", l.cert)).collect(),
                gen_vals: t.levels.iter().map(|l| l.gen_val).collect(),
                rams: t.levels.iter().map(|l| l.ram).collect(),
                ranks: t.levels.iter().map(|l| l.rank).collect(),
            }),
            levels_requested: r.levels_requested,
            checked_range: r.checked_range.clone(),
            commute_residual: r.commute_residual,
            unit_order_proxy_ok: r.unit_order_proxy_ok,
            unit_order_bound_checked: r.unit_order_bound_checked,
        }
    }
}

/// Isogeny report: `{h, residual_valuation, precision_loss, free_indices}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IsogenyWire {
    pub h: SeriesWire,
    pub residual_valuation: i64,
    pub precision_loss: u32,
    pub free_indices: Vec<usize>,
}

impl IsogenyWire {
    pub fn from_solution(s: &IsogenySolution) -> IsogenyWire {
        IsogenyWire {
            h: SeriesWire::from_series(&s.h),
            residual_valuation: s.residual_valuation,
            precision_loss: s.precision_loss,
            free_indices: s.free_indices.clone(),
        }
    }
}

/// Re-verify every certified level of a serialized criterion report from
/// the serialized data alone: rebuild the tower from the relations,
/// re-expand `∏(T − orbit_i)` and compare with the serialized product
/// bit-exact, recheck the product congruence against the relation, and
/// recheck that each orbit element satisfies the defining relation.
pub fn reverify_certificates(report: &CriterionReportWire) -> Result<bool> {
    let field = Field::new(report.spec.clone())?;
    let q = match &report.condition1.q {
        Some(qw) => qw.to_series(&field)?,
        None => return Ok(report.certificates.iter().all(|c| c.verdict != "certified_galois")),
    };
    let tower_wire = match &report.tower {
        Some(t) => t,
        None => return Ok(false),
    };
    let relations: Vec<Vec<TElem>> = tower_wire
        .relations
        .iter()
        .map(|rel| {
            rel.iter()
                .map(|c| c.to_elem(&field))
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let tower = QuotientTower::from_relations(&field, &q, relations)?;
    for cert in &report.certificates {
        if cert.verdict != "certified_galois" {
            continue;
        }
        let level = cert.level;
        let ring = tower.ring(level);
        let orbit: Vec<TElem> = cert
            .orbit
            .iter()
            .map(|e| e.to_elem(&field))
            .collect::<Result<_>>()?;
        if orbit.len() != cert.orbit_size || orbit.is_empty() {
            return Ok(false);
        }
        // recompute the product and compare bit-exact on the wire form
        let product = ring::poly_from_roots(&ring, &orbit)?;
        let product_wire: Vec<TElemWire> = product.iter().map(TElemWire::from_elem).collect();
        if product_wire != cert.product {
            return Ok(false);
        }
        // product congruence against the level relation at precision
        let relation: Vec<TElem> = cert
            .relation
            .iter()
            .map(|e| e.to_elem(&field))
            .collect::<Result<_>>()?;
        for (i, rel_c) in relation.iter().enumerate() {
            let pc = product.get(i).cloned().unwrap_or_else(|| ring.zero());
            let d = ring.sub(&pc, rel_c)?;
            if !ring.is_zero(&d) {
                return Ok(false);
            }
        }
        // each orbit element satisfies the defining relation
        for z in &orbit {
            let v = tower.eval_relation(level, z)?;
            if !ring.is_zero(&v) {
                return Ok(false);
            }
        }
        // distinctness
        for i in 0..orbit.len() {
            for j in i + 1..orbit.len() {
                if tower.congruent(level, &orbit[i], &orbit[j])? {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Newton polygon TSV: vertex rows `index<TAB>num<TAB>den`, then slope
/// rows `slope<TAB>num<TAB>den<TAB>length`.
pub fn polygon_tsv(p: &NewtonPolygon) -> String {
    let mut out = String::new();
    for (i, v) in &p.vertices {
        out.push_str(&format!("{i}\t{}\t{}\n", v.num(), v.den()));
    }
    for s in &p.slopes {
        out.push_str(&format!(
            "slope\t{}\t{}\t{}\n",
            s.slope.num(),
            s.slope.den(),
            s.length
        ));
    }
    out
}

/// Parse the vertex rows back out of a polygon TSV.
pub fn polygon_tsv_vertices(tsv: &str) -> Result<Vec<(i64, Rat)>> {
    let mut out = Vec::new();
    for line in tsv.lines() {
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() == 3 {
            let i: i64 = fields[0]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad vertex row {line:?}")))?;
            let num: i64 = fields[1]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad vertex row {line:?}")))?;
            let den: i64 = fields[2]
                .parse()
                .map_err(|_| Error::InvalidInput(format!("bad vertex row {line:?}")))?;
            out.push((i, Rat::new(num, den)));
        }
    }
    Ok(out)
}

/// Valuation trace TSV: rows `n<TAB>v_num<TAB>v_den<TAB>single_slope`.
pub fn trace_tsv(t: &ValuationTrace) -> String {
    let mut out = String::new();
    for e in &t.entries {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            e.n,
            e.v.num(),
            e.v.den(),
            e.single_slope
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::criterion::{criterion_check, CriterionOptions};
    use crate::dynamics::pair::check_commute;

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
    fn series_roundtrip() {
        let f = q2(32);
        let s = TruncatedSeries::from_integers(&f, &[3, 3, 1], 8);
        let w = SeriesWire::from_series(&s);
        let back = w.to_series(&f).unwrap();
        assert!(back.congruent(&s).unwrap());
        let json = serde_json::to_string(&w).unwrap();
        let w2: SeriesWire = serde_json::from_str(&json).unwrap();
        assert_eq!(w, w2);
    }

    #[test]
    fn criterion_report_reverifies() {
        let f = q2(64);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 32);
        let u = TruncatedSeries::from_integers(&f, &[3, 3, 1], 32);
        let pair = check_commute(&p, &u, 1 << 12).unwrap();
        let opts = CriterionOptions {
            levels: 3,
            ..Default::default()
        };
        let report = criterion_check(&pair, &opts).unwrap();
        assert!(report.all_certified());
        let wire = CriterionReportWire::from_report(f.spec(), &report);
        let json = serde_json::to_string(&wire).unwrap();
        let parsed: CriterionReportWire = serde_json::from_str(&json).unwrap();
        assert!(reverify_certificates(&parsed).unwrap());
    }

    #[test]
    fn tampered_report_fails_reverification() {
        let f = q2(64);
        let p = TruncatedSeries::from_integers(&f, &[2, 1], 32);
        let u = TruncatedSeries::from_integers(&f, &[3, 3, 1], 32);
        let pair = check_commute(&p, &u, 1 << 12).unwrap();
        let opts = CriterionOptions {
            levels: 2,
            ..Default::default()
        };
        let report = criterion_check(&pair, &opts).unwrap();
        let mut wire = CriterionReportWire::from_report(f.spec(), &report);
        // corrupt one orbit digit in the level-2 certificate
        if let Some(cert) = wire.certificates.last_mut() {
            if let Some(TElemWire::Ext(cs)) = cert.orbit.last_mut() {
                if let Some(TElemWire::Ext(inner)) = cs.first_mut() {
                    if let Some(TElemWire::Base(c)) = inner.first_mut() {
                        c.digits[0] = "12345".into();
                    }
                } else if let Some(TElemWire::Base(c)) = cs.first_mut() {
                    c.digits[0] = "12345".into();
                }
            }
        }
        assert!(!reverify_certificates(&wire).unwrap());
    }

    #[test]
    fn polygon_tsv_roundtrip() {
        let f = q2(32);
        let s = TruncatedSeries::from_integers(&f, &[2, 1], 8);
        let poly = s.newton_polygon(&f.from_i64(-2)).unwrap();
        let tsv = polygon_tsv(&poly);
        let verts = polygon_tsv_vertices(&tsv).unwrap();
        assert_eq!(verts, poly.vertices);
    }
}
