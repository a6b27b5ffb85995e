//! Resource documents: JSON with string-encoded numbers, or one CSV row per (resource, t).

use std::collections::HashMap;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use super::{FlexError, FlexResource, ResourceSet};
use crate::rational::{format_rational, parse_rational, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

impl Format {
    /// Guesses from a file extension; anything but `.csv` is JSON.
    pub fn from_path(path: &std::path::Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => Format::Csv,
            _ => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    /// Repair hypothesis violations instead of rejecting them.
    pub tighten: bool,
    /// Interval length for CSV input (JSON carries its own `dt`). Defaults to one.
    pub dt: Option<Rational>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Document {
    #[serde(default)]
    dt: Option<String>,
    resources: Vec<Entry>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Entry {
    id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    e0: Option<String>,
    p_min: Vec<String>,
    p_max: Vec<String>,
    e_min: Vec<String>,
    e_max: Vec<String>,
}

#[derive(Deserialize)]
struct CsvRow {
    id: String,
    t: usize,
    p_min: String,
    p_max: String,
    e_min: String,
    e_max: String,
}

fn number(text: &str, what: impl FnOnce() -> String) -> Result<Rational, FlexError> {
    parse_rational(text).map_err(|e| FlexError::Malformed(format!("{}: {e}", what())))
}

fn numbers(id: &str, field: &str, v: &[String]) -> Result<Vec<Rational>, FlexError> {
    v.iter().enumerate().map(|(k, s)| number(s, || format!("resource `{id}` {field}[{}]", k + 1))).collect()
}

fn build(
    id: String,
    dt: &Rational,
    p: [Vec<Rational>; 2],
    e: [Vec<Rational>; 2],
    e0: Rational,
) -> Result<FlexResource, FlexError> {
    let [p_lo, p_hi] = p.map(|v| v.into_iter().map(|x| x * dt).collect::<Vec<_>>());
    let [e_lo, e_hi] = e;
    FlexResource::with_initial_energy(id, p_lo, p_hi, e_lo, e_hi, e0)
}

/// Parses resources without checking hypotheses (for reporting).
pub fn parse_resource_list(
    bytes: &[u8],
    format: Format,
    options: &ParseOptions,
) -> Result<Vec<FlexResource>, FlexError> {
    match format {
        Format::Json => parse_json(bytes),
        Format::Csv => parse_csv(bytes, options.dt.clone().unwrap_or_else(Rational::one)),
    }
}

/// Parses and validates resources; with `tighten`, repairs them first.
pub fn parse_resources(bytes: &[u8], format: Format, options: &ParseOptions) -> Result<ResourceSet, FlexError> {
    let mut list = parse_resource_list(bytes, format, options)?;
    if options.tighten {
        list = list.iter().map(FlexResource::tighten).collect::<Result<_, _>>()?;
    }
    ResourceSet::new(list)
}

fn parse_json(bytes: &[u8]) -> Result<Vec<FlexResource>, FlexError> {
    let doc: Document = serde_json::from_slice(bytes).map_err(|e| FlexError::Malformed(e.to_string()))?;
    let dt = match &doc.dt {
        Some(s) => number(s, || "dt".to_string())?,
        None => Rational::one(),
    };
    if dt <= Rational::zero() {
        return Err(FlexError::Malformed("dt must be positive".into()));
    }
    doc.resources
        .into_iter()
        .map(|r| {
            let e0 = match &r.e0 {
                Some(s) => number(s, || format!("resource `{}` e0", r.id))?,
                None => Rational::zero(),
            };
            let p = [numbers(&r.id, "p_min", &r.p_min)?, numbers(&r.id, "p_max", &r.p_max)?];
            let e = [numbers(&r.id, "e_min", &r.e_min)?, numbers(&r.id, "e_max", &r.e_max)?];
            build(r.id, &dt, p, e, e0)
        })
        .collect()
}

fn parse_csv(bytes: &[u8], dt: Rational) -> Result<Vec<FlexResource>, FlexError> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(bytes);
    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<CsvRow>> = HashMap::new();
    for rec in reader.deserialize::<CsvRow>() {
        let row = rec.map_err(|e| FlexError::Malformed(e.to_string()))?;
        if !rows.contains_key(&row.id) {
            order.push(row.id.clone());
        }
        rows.entry(row.id.clone()).or_default().push(row);
    }
    order
        .into_iter()
        .map(|id| {
            let mut list = rows.remove(&id).unwrap_or_default();
            list.sort_by_key(|r| r.t);
            for (k, r) in list.iter().enumerate() {
                if r.t != k + 1 {
                    return Err(FlexError::Malformed(format!("resource `{id}`: intervals must be 1..T without gaps")));
                }
            }
            let column = |get: fn(&CsvRow) -> &String, name: &str| {
                list.iter()
                    .map(|r| number(get(r), || format!("resource `{id}` {name} at t={}", r.t)))
                    .collect::<Result<Vec<_>, _>>()
            };
            let p = [column(|r| &r.p_min, "p_min")?, column(|r| &r.p_max, "p_max")?];
            let e = [column(|r| &r.e_min, "e_min")?, column(|r| &r.e_max, "e_max")?];
            build(id.clone(), &dt, p, e, Rational::zero())
        })
        .collect()
}

fn absolute(r: &FlexResource, hi: bool) -> Vec<String> {
    (1..=r.horizon())
        .map(|t| {
            let e = if hi { r.e_hi(t) } else { r.e_lo(t) };
            format_rational(&(e + r.energy_offset()))
        })
        .collect()
}

fn power(r: &FlexResource, hi: bool) -> Vec<String> {
    (1..=r.horizon()).map(|t| format_rational(if hi { r.p_hi(t) } else { r.p_lo(t) })).collect()
}

/// JSON document with `dt = 1` and absolute energy bounds.
pub fn resources_to_json(resources: &[FlexResource]) -> String {
    let doc = Document {
        dt: Some("1".into()),
        resources: resources
            .iter()
            .map(|r| Entry {
                id: r.id().to_string(),
                e0: (!r.energy_offset().is_zero()).then(|| format_rational(r.energy_offset())),
                p_min: power(r, false),
                p_max: power(r, true),
                e_min: absolute(r, false),
                e_max: absolute(r, true),
            })
            .collect(),
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("plain data serializes");
    out.push('\n');
    out
}

/// CSV rows `id,t,p_min,p_max,e_min,e_max`. Initial energies are not representable and must be zero.
pub fn resources_to_csv(resources: &[FlexResource]) -> Result<String, FlexError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| FlexError::Malformed(e.to_string());
    w.write_record(["id", "t", "p_min", "p_max", "e_min", "e_max"]).map_err(io)?;
    for r in resources {
        if !r.energy_offset().is_zero() {
            return Err(FlexError::Malformed(format!(
                "resource `{}` has a nonzero e0, which CSV cannot carry",
                r.id()
            )));
        }
        for t in 1..=r.horizon() {
            w.write_record([
                r.id().to_string(),
                t.to_string(),
                format_rational(r.p_lo(t)),
                format_rational(r.p_hi(t)),
                format_rational(r.e_lo(t)),
                format_rational(r.e_hi(t)),
            ])
            .map_err(io)?;
        }
    }
    let bytes = w.into_inner().map_err(|e| FlexError::Malformed(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}
