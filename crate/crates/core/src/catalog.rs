//! Knot records and batch evaluation.
//!
//! A catalog is a JSON array of records. Each record carries a braid, a
//! Seifert matrix or both, plus optional pinned values that the batch run
//! checks against.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::braid::{alexander_from_braid, BraidWord};
use crate::circle_zeros::{criterion_verdict, has_odd_order_unit_zero, unit_circle_zeros, CriterionVerdict};
use crate::invariants::{
    alexander_from_seifert, knot_determinant, mod4_criterion, murasugi_signature, seifert_from_positive_braid,
    SeifertMatrix,
};
use crate::laurent::{conway_normalize, to_palindromic, LaurentPoly, PalindromicForm};
use crate::{Error, Exec, Result};

/// The catalog shipped with the crate.
pub const BUNDLED: &str = include_str!("../data/catalog.json");

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BraidSpec {
    pub strands: usize,
    pub word: String,
}

impl BraidSpec {
    pub fn braid(&self) -> Result<BraidWord> {
        BraidWord::parse(&self.word, self.strands)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Pinned {
    /// Symmetric coefficients `a_0, …, a_d` of the normalized polynomial.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alexander: Option<PalindromicForm>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_int")]
    pub det: Option<BigInt>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sgn: Option<i64>,
}

mod opt_int {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => crate::serde_int::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        #[derive(Deserialize)]
        struct W(#[serde(with = "crate::serde_int")] BigInt);
        Ok(Option::<W>::deserialize(d)?.map(|w| w.0))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KnotRecord {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub braid: Option<BraidSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seifert: Option<SeifertMatrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pinned: Option<Pinned>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl KnotRecord {
    pub fn validate(&self) -> Result<()> {
        if self.braid.is_none() && self.seifert.is_none() {
            return Err(Error::InvalidInput(format!("record `{}` has neither a braid nor a Seifert matrix", self.name)));
        }
        Ok(())
    }

    /// The given Seifert matrix, or the canonical one of a positive braid.
    pub fn seifert_matrix(&self) -> Result<Option<(SeifertMatrix, SeifertSource)>> {
        if let Some(v) = &self.seifert {
            return Ok(Some((v.clone(), SeifertSource::Given)));
        }
        match &self.braid {
            Some(b) => {
                let b = b.braid()?;
                if b.letters().iter().all(|&l| l > 0) {
                    Ok(Some((seifert_from_positive_braid(&b)?, SeifertSource::PositiveBraid)))
                } else {
                    Ok(None)
                }
            }
            None => Ok(None),
        }
    }
}

/// Parses a catalog, reporting the line and column of a JSON error.
pub fn parse_catalog(text: &str) -> Result<Vec<KnotRecord>> {
    let records: Vec<KnotRecord> = serde_json::from_str(text)
        .map_err(|e| Error::Parse(format!("line {}, column {}: {e}", e.line(), e.column())))?;
    for r in &records {
        r.validate()?;
    }
    Ok(records)
}

pub fn bundled() -> Vec<KnotRecord> {
    parse_catalog(BUNDLED).expect("bundled catalog parses")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeifertSource {
    Given,
    PositiveBraid,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecordSummary {
    pub name: String,
    pub alexander: String,
    pub palindromic: PalindromicForm,
    /// `None` when only one route is available.
    pub routes_agree: Option<bool>,
    #[serde(with = "crate::serde_int")]
    pub at_one: BigInt,
    #[serde(with = "crate::serde_int")]
    pub det: BigInt,
    pub seifert_source: Option<SeifertSource>,
    pub sgn: Option<i64>,
    /// `det ≡ (-1)^{sgn/2} (mod 4)`.
    pub mod4_consistent: Option<bool>,
    /// `det ≡ 3 (mod 4)`, which forces an odd-order zero on the unit circle.
    pub odd_order_zero_guaranteed: bool,
    pub unit_circle_roots: usize,
    pub odd_order_zero: bool,
    /// `None` when `a_0` is even.
    pub criterion: Option<CriterionVerdict>,
    pub mismatches: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RecordFailure {
    pub name: String,
    pub error: String,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum RecordOutcome {
    Ok(Box<RecordSummary>),
    Failed(RecordFailure),
}

impl RecordOutcome {
    pub fn name(&self) -> &str {
        match self {
            RecordOutcome::Ok(s) => &s.name,
            RecordOutcome::Failed(f) => &f.name,
        }
    }

    pub fn summary(&self) -> Option<&RecordSummary> {
        match self {
            RecordOutcome::Ok(s) => Some(s),
            RecordOutcome::Failed(_) => None,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct BatchSummary {
    pub records: Vec<RecordOutcome>,
    /// `name: message` for every pinned mismatch, route disagreement or error.
    pub failures: Vec<String>,
}

impl BatchSummary {
    pub fn is_clean(&self) -> bool {
        self.failures.is_empty()
    }
}

pub fn summarize(record: &KnotRecord) -> Result<RecordSummary> {
    record.validate()?;
    let from_braid = match &record.braid {
        Some(b) => Some(alexander_from_braid(&b.braid()?)?),
        None => None,
    };
    let seifert = record.seifert_matrix()?;
    let from_seifert = match &seifert {
        Some((v, _)) => Some(conway_normalize(&alexander_from_seifert(v))?),
        None => None,
    };
    let routes_agree = match (&from_braid, &from_seifert) {
        (Some(a), Some(b)) if record.seifert.is_some() => Some(a == b),
        _ => None,
    };
    let delta: LaurentPoly = from_seifert.clone().or(from_braid.clone()).expect("validated");
    let palindromic = to_palindromic(&delta)?;
    let (det, sgn, source) = match &seifert {
        Some((v, src)) => (knot_determinant(v)?, Some(murasugi_signature(v)?), Some(*src)),
        None => (delta.at_minus_one().abs(), None, None),
    };
    let mod4_consistent = sgn.map(|s| mod4_criterion(&det, s).is_ok());
    let report = unit_circle_zeros(&palindromic)?;
    let odd = has_odd_order_unit_zero(&palindromic)?.is_some();
    let criterion = match criterion_verdict(&palindromic) {
        Ok(v) => Some(v),
        Err(Error::EvenConstantTerm { .. }) => None,
        Err(e) => return Err(e),
    };

    let mut mismatches = Vec::new();
    if routes_agree == Some(false) {
        mismatches.push(format!(
            "braid route gives {} but Seifert route gives {}",
            from_braid.as_ref().unwrap(),
            from_seifert.as_ref().unwrap()
        ));
    }
    if mod4_consistent == Some(false) {
        mismatches.push(format!("det {det} and sgn {} violate the mod 4 relation", sgn.unwrap()));
    }
    if let Some(pin) = &record.pinned {
        if let Some(a) = &pin.alexander {
            if a != &palindromic {
                mismatches.push(format!("alexander: pinned {} but computed {}", a.expand(), delta));
            }
        }
        if let Some(d) = &pin.det {
            if d != &det {
                mismatches.push(format!("det: pinned {d} but computed {det}"));
            }
        }
        if let (Some(p), Some(s)) = (pin.sgn, sgn) {
            if p != s {
                mismatches.push(format!("sgn: pinned {p} but computed {s}"));
            }
        }
    }
    Ok(RecordSummary {
        name: record.name.clone(),
        alexander: delta.to_string(),
        palindromic,
        routes_agree,
        at_one: delta.at_one(),
        odd_order_zero_guaranteed: det.mod_floor(&BigInt::from(4)).to_u32() == Some(3),
        det,
        seifert_source: source,
        sgn,
        mod4_consistent,
        unit_circle_roots: report.roots.len(),
        odd_order_zero: odd,
        criterion,
        mismatches,
    })
}

/// Evaluates every record; output order matches input order.
pub fn run_batch(records: &[KnotRecord], exec: Exec) -> BatchSummary {
    let records: Vec<RecordOutcome> = exec.map(records, |r| match summarize(r) {
        Ok(s) => RecordOutcome::Ok(Box::new(s)),
        Err(e) => RecordOutcome::Failed(RecordFailure { name: r.name.clone(), error: e.to_string() }),
    });
    let mut failures = Vec::new();
    for r in &records {
        match r {
            RecordOutcome::Ok(s) => failures.extend(s.mismatches.iter().map(|m| format!("{}: {m}", s.name))),
            RecordOutcome::Failed(f) => failures.push(format!("{}: {}", f.name, f.error)),
        }
    }
    BatchSummary { records, failures }
}
