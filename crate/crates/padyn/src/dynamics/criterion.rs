//! The combined criterion check: normalization (condition 1), tower
//! construction, and per-level Galois certification (condition 2), with
//! explicit precision provenance. The check covers finitely many levels
//! and says so; condition 2 of the underlying statement quantifies over
//! all levels.

use serde::{Deserialize, Serialize};

use crate::dynamics::galois::{certify_levels, GaloisVerdict, LevelCertificate};
use crate::dynamics::normalize::{normalize_to_q, Normalization};
use crate::dynamics::pair::CommutingPair;
use crate::dynamics::tower::QuotientTower;
use crate::series::TruncatedSeries;
use crate::Result;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionOptions {
    pub levels: u32,
    /// Iterate bound for normalization retries with `P^{∘m}`.
    pub m_max: u32,
    /// Bound on `p^j` in the root-of-unity proxy check.
    pub root_of_unity_bound: u64,
    /// Bound on the powers of `U` scanned by the orbit certifier
    /// (0 picks a default from `q` and the level count).
    pub orbit_power_bound: u32,
}

impl Default for CriterionOptions {
    fn default() -> Self {
        CriterionOptions {
            levels: 4,
            m_max: 4,
            root_of_unity_bound: 1 << 12,
            orbit_power_bound: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Condition1 {
    pub satisfied: bool,
    pub v: Option<TruncatedSeries>,
    pub q: Option<TruncatedSeries>,
    pub d: Option<u32>,
    pub iterate_used: Option<u32>,
    pub precision_loss: u32,
    pub failure: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelVerdict {
    pub level: usize,
    /// `certified_galois`, `inconclusive` (with reason), or `not_galois`.
    pub verdict: String,
    pub reason: Option<String>,
    pub orbit_size: usize,
    pub generator: Option<String>,
    pub working_precision: u32,
}

#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub condition1: Condition1,
    /// Per-level verdicts for levels `1..=levels`; empty when condition 1
    /// failed.
    pub condition2: Vec<LevelVerdict>,
    /// The full certificates backing the verdicts (re-checkable).
    pub certificates: Vec<LevelCertificate>,
    pub tower: Option<QuotientTower>,
    pub levels_requested: u32,
    /// The check is finite; this names the range actually certified.
    pub checked_range: String,
    pub commute_residual: i64,
    pub unit_order_proxy_ok: bool,
    pub unit_order_bound_checked: u64,
}

impl CriterionReport {
    pub fn all_certified(&self) -> bool {
        self.condition1.satisfied
            && self.condition2.len() == self.levels_requested as usize
            && self
                .condition2
                .iter()
                .all(|v| v.verdict == "certified_galois")
    }
}

pub fn criterion_check(pair: &CommutingPair, opts: &CriterionOptions) -> Result<CriterionReport> {
    let base = CriterionReport {
        condition1: Condition1 {
            satisfied: false,
            v: None,
            q: None,
            d: None,
            iterate_used: None,
            precision_loss: 0,
            failure: None,
        },
        condition2: vec![],
        certificates: vec![],
        tower: None,
        levels_requested: opts.levels,
        checked_range: format!("levels 1..={} only; the criterion quantifies over all levels", opts.levels),
        commute_residual: pair.commute_residual,
        unit_order_proxy_ok: pair.unit_order_proxy_ok,
        unit_order_bound_checked: pair.unit_order_bound_checked,
    };

    let norm: Normalization = match normalize_to_q(pair, opts.m_max) {
        Ok(n) => n,
        Err(e) => {
            let mut report = base;
            report.condition1.failure = Some(e.to_string());
            return Ok(report);
        }
    };
    let mut report = base;
    report.condition1 = Condition1 {
        satisfied: true,
        v: Some(norm.v.clone()),
        q: Some(norm.q.clone()),
        d: Some(norm.d),
        iterate_used: Some(norm.iterate_used),
        precision_loss: norm.precision_loss,
        failure: None,
    };

    let tower = QuotientTower::build(pair.p.field(), &norm.q, opts.levels)?;
    let power_bound = if opts.orbit_power_bound > 0 {
        opts.orbit_power_bound
    } else {
        default_power_bound(pair.p.field().q(), opts.levels)
    };
    let certs = certify_levels(&tower, pair, opts.levels as usize, power_bound)?;
    report.condition2 = certs.iter().map(level_verdict).collect();
    report.certificates = certs;
    report.tower = Some(tower);
    Ok(report)
}

fn default_power_bound(q: u64, levels: u32) -> u32 {
    let mut bound: u64 = (q - 1).max(1);
    for _ in 0..levels {
        bound = bound.saturating_mul(q);
        if bound > 4096 {
            return 4096;
        }
    }
    bound.max(8) as u32
}

fn level_verdict(cert: &LevelCertificate) -> LevelVerdict {
    let (verdict, reason) = match &cert.verdict {
        GaloisVerdict::Certified => ("certified_galois".to_string(), None),
        GaloisVerdict::Inconclusive(why) => ("inconclusive".to_string(), Some(why.clone())),
        GaloisVerdict::NotGalois => ("not_galois".to_string(), None),
    };
    LevelVerdict {
        level: cert.level,
        verdict,
        reason,
        orbit_size: cert.orbit_size,
        generator: if cert.generator.is_empty() {
            None
        } else {
            Some(cert.generator.clone())
        },
        working_precision: cert.working_precision,
    }
}
