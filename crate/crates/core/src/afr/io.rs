//! AFR documents, profiles and allocations as JSON; AFR rows as CSV.
//!
//! Every number is an exact rational string.

use std::collections::BTreeMap;

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{gray_position, AfrError, AfrModel, Allocation, Contribution, DirectionIndex};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RowDoc {
    #[serde(rename = "S")]
    s: Vec<usize>,
    lo: String,
    hi: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ContributionDoc {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    e0: Option<String>,
    lo: Vec<String>,
    hi: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AfrDoc {
    #[serde(rename = "T")]
    horizon: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    e0: Option<String>,
    resources: Vec<String>,
    constraints: Vec<RowDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    contributions: Option<Vec<ContributionDoc>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stats: Option<serde_json::Value>,
}

fn num(text: &str) -> Result<Rational, AfrError> {
    parse_rational(text).map_err(|e| AfrError::Malformed(e.to_string()))
}

fn nums(list: &[String]) -> Result<Vec<Rational>, AfrError> {
    list.iter().map(|s| num(s)).collect()
}

fn strings(list: &[Rational]) -> Vec<String> {
    list.iter().map(format_rational).collect()
}

fn nonzero(v: &Rational) -> Option<String> {
    (!v.is_zero()).then(|| format_rational(v))
}

/// Pretty JSON with a trailing newline; `stats` is copied verbatim.
pub fn afr_to_json(model: &AfrModel, stats: Option<serde_json::Value>) -> String {
    let doc = AfrDoc {
        horizon: model.horizon(),
        e0: nonzero(model.energy_offset()),
        resources: model.resources().to_vec(),
        constraints: model
            .rows()
            .map(|(d, lo, hi)| RowDoc { s: d.intervals(), lo: format_rational(lo), hi: format_rational(hi) })
            .collect(),
        contributions: model.contributions().map(|list| {
            list.iter()
                .map(|c| ContributionDoc {
                    id: c.id.clone(),
                    e0: nonzero(&c.energy_offset),
                    lo: strings(&c.lo),
                    hi: strings(&c.hi),
                })
                .collect()
        }),
        stats,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("serializable document");
    out.push('\n');
    out
}

/// Reads a document; constraints may come in any order but each subset exactly once.
pub fn afr_from_json(bytes: &[u8]) -> Result<AfrModel, AfrError> {
    let doc: AfrDoc = serde_json::from_slice(bytes).map_err(|e| AfrError::Malformed(e.to_string()))?;
    let horizon = doc.horizon;
    if horizon > super::MAX_HORIZON {
        return Err(AfrError::HorizonTooLarge(horizon));
    }
    let rows = if horizon == 0 { 0 } else { (1usize << horizon) - 1 };
    if doc.constraints.len() != rows {
        return Err(AfrError::Malformed(format!("expected {rows} constraints, found {}", doc.constraints.len())));
    }
    // position in the document → row index
    let mut order = Vec::with_capacity(rows);
    let mut seen = vec![false; rows];
    let (mut lo, mut hi) = (vec![Rational::zero(); rows], vec![Rational::zero(); rows]);
    for row in &doc.constraints {
        let d = DirectionIndex::from_intervals(horizon, &row.s)?;
        let k = gray_position(horizon, d.mask());
        if std::mem::replace(&mut seen[k], true) {
            return Err(AfrError::Malformed(format!("subset {d} listed twice")));
        }
        lo[k] = num(&row.lo)?;
        hi[k] = num(&row.hi)?;
        order.push(k);
    }
    let contributions = match doc.contributions {
        None => None,
        Some(list) => {
            let mut out = Vec::with_capacity(list.len());
            for c in list {
                if c.lo.len() != rows || c.hi.len() != rows {
                    return Err(AfrError::Malformed(format!("contribution {} has wrong length", c.id)));
                }
                let (clo, chi) = (nums(&c.lo)?, nums(&c.hi)?);
                let (mut plo, mut phi) = (vec![Rational::zero(); rows], vec![Rational::zero(); rows]);
                for (pos, &k) in order.iter().enumerate() {
                    plo[k] = clo[pos].clone();
                    phi[k] = chi[pos].clone();
                }
                let energy_offset = c.e0.as_deref().map(num).transpose()?.unwrap_or_else(Rational::zero);
                out.push(Contribution { id: c.id, energy_offset, lo: plo, hi: phi });
            }
            Some(out)
        }
    };
    let offset = doc.e0.as_deref().map(num).transpose()?.unwrap_or_else(Rational::zero);
    AfrModel::from_parts(horizon, lo, hi, doc.resources, offset, contributions)
}

/// Rows as `S,lo,hi` with `S` joined by semicolons.
pub fn afr_to_csv(model: &AfrModel) -> String {
    let mut out = String::from("S,lo,hi\n");
    for (d, lo, hi) in model.rows() {
        let s: Vec<String> = d.intervals().iter().map(|t| t.to_string()).collect();
        out.push_str(&format!("{},{},{}\n", s.join(";"), format_rational(lo), format_rational(hi)));
    }
    out
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProfileDoc {
    #[serde(rename = "E")]
    e: Vec<String>,
}

/// `{"E": [...]}` → absolute profile.
pub fn parse_profile(bytes: &[u8]) -> Result<Vec<Rational>, AfrError> {
    let doc: ProfileDoc = serde_json::from_slice(bytes).map_err(|e| AfrError::Malformed(e.to_string()))?;
    nums(&doc.e)
}

pub fn profile_to_json(profile: &[Rational]) -> String {
    let doc = serde_json::json!({ "E": strings(profile) });
    let mut out = serde_json::to_string_pretty(&doc).expect("serializable");
    out.push('\n');
    out
}

#[derive(Serialize)]
struct AllocationDoc {
    allocations: BTreeMap<String, Vec<String>>,
}

/// `{"allocations": {id: [...]}}`, ids sorted.
pub fn allocation_to_json(a: &Allocation) -> String {
    let allocations = a.ids.iter().cloned().zip(a.energies.iter().map(|e| strings(e))).collect();
    let mut out = serde_json::to_string_pretty(&AllocationDoc { allocations }).expect("serializable");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::afr::build_afr;
    use crate::flex::{FlexResource, ResourceSet};
    use crate::gen::random_fleet;
    use crate::rational::{frac, int};

    #[test]
    fn single_resource_document() {
        let r = FlexResource::new("A", vec![int(0)], vec![int(1)], vec![int(0)], vec![int(1)]).unwrap();
        let m = build_afr(&ResourceSet::new(vec![r]).unwrap()).unwrap();
        let text = afr_to_json(&m.clone().without_contributions(), None);
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["T"], 1);
        assert_eq!(v["constraints"][0]["S"], serde_json::json!([1]));
        assert_eq!(v["constraints"][0]["lo"], "0");
        assert_eq!(v["constraints"][0]["hi"], "1");
        assert_eq!(afr_to_csv(&m), "S,lo,hi\n1,0,1\n");
    }

    #[test]
    fn round_trip() {
        let m = build_afr(&random_fleet(3, 3, 4)).unwrap();
        let back = afr_from_json(afr_to_json(&m, Some(serde_json::json!({"n": 1}))).as_bytes()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn reordered_rows_are_accepted() {
        let m = build_afr(&random_fleet(5, 2, 3)).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&afr_to_json(&m, None)).unwrap();
        v["constraints"].as_array_mut().unwrap().reverse();
        for c in v["contributions"].as_array_mut().unwrap() {
            c["lo"].as_array_mut().unwrap().reverse();
            c["hi"].as_array_mut().unwrap().reverse();
        }
        assert_eq!(afr_from_json(v.to_string().as_bytes()).unwrap(), m);
    }

    #[test]
    fn rejects_corruption() {
        let m = build_afr(&random_fleet(5, 2, 2)).unwrap();
        let mut v: serde_json::Value = serde_json::from_str(&afr_to_json(&m, None)).unwrap();
        v["constraints"][0]["hi"] = "1000".into();
        assert!(afr_from_json(v.to_string().as_bytes()).is_err());
        let mut w: serde_json::Value = serde_json::from_str(&afr_to_json(&m, None)).unwrap();
        w["constraints"][1]["S"] = w["constraints"][0]["S"].clone();
        assert!(afr_from_json(w.to_string().as_bytes()).is_err());
    }

    #[test]
    fn profiles_and_allocations() {
        let p = vec![frac(1, 2), int(-3)];
        assert_eq!(parse_profile(profile_to_json(&p).as_bytes()).unwrap(), p);
        let a = Allocation { ids: vec!["b".into(), "a".into()], energies: vec![vec![int(1)], vec![frac(1, 3)]] };
        let v: serde_json::Value = serde_json::from_str(&allocation_to_json(&a)).unwrap();
        assert_eq!(v["allocations"]["a"][0], "1/3");
    }
}
