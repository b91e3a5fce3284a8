//! Plain-text and JSON formats for posets and maps.
//!
//! Poset files list one declaration per line:
//!
//! ```text
//! # the pseudocircle
//! element a
//! element b
//! rel c < a
//! ```
//!
//! Elements named in a `rel` line are declared implicitly, in order of first
//! appearance. Map files hold `map X -> Y` lines, one per domain element.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::map::PointMap;
use crate::poset::FinitePoset;

fn parse_error(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn valid_name(s: &str) -> bool {
    !s.is_empty() && !s.chars().any(|c| c.is_whitespace() || c == '<' || c == '#')
}

pub fn parse_poset(text: &str) -> Result<FinitePoset> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut relations = Vec::new();
    let mut seen = BTreeMap::new();
    let mut intern = |name: &str, labels: &mut Vec<String>| -> usize {
        *index.entry(name.to_string()).or_insert_with(|| {
            labels.push(name.to_string());
            labels.len() - 1
        })
    };
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let rest = rest.trim();
        match keyword {
            "element" => {
                if !valid_name(rest) {
                    return Err(parse_error(line_no, format!("invalid element name {rest:?}")));
                }
                if labels.iter().any(|l| l == rest) {
                    return Err(parse_error(line_no, format!("duplicate element {rest}")));
                }
                intern(rest, &mut labels);
            }
            "rel" => {
                let Some((lo, hi)) = rest.split_once('<') else {
                    return Err(parse_error(line_no, "expected `rel LOWER < UPPER`"));
                };
                let (lo, hi) = (lo.trim(), hi.trim());
                if !valid_name(lo) || !valid_name(hi) {
                    return Err(parse_error(line_no, "invalid element name in relation"));
                }
                if lo == hi {
                    return Err(parse_error(line_no, format!("reflexive relation on {lo}")));
                }
                let pair = (intern(lo, &mut labels), intern(hi, &mut labels));
                if let Some(first) = seen.insert(pair, line_no) {
                    return Err(parse_error(
                        line_no,
                        format!("duplicate relation {lo} < {hi} (first on line {first})"),
                    ));
                }
                relations.push(pair);
            }
            other => return Err(parse_error(line_no, format!("unknown keyword {other:?}"))),
        }
    }
    if labels.is_empty() {
        return Err(Error::EmptySpace);
    }
    FinitePoset::from_relations(labels, &relations)
}

/// Writes every element and the Hasse covers, which `parse_poset` reads back
/// to an identical poset.
pub fn format_poset(p: &FinitePoset) -> String {
    let mut out = String::new();
    for l in p.labels() {
        writeln!(out, "element {l}").expect("string write");
    }
    let mut covers = p.covers().to_vec();
    covers.sort_by_key(|&(a, b)| (b, a));
    for (a, b) in covers {
        writeln!(out, "rel {} < {}", p.label(b), p.label(a)).expect("string write");
    }
    out
}

pub fn parse_map(text: &str, dom: Arc<FinitePoset>, cod: Arc<FinitePoset>) -> Result<PointMap> {
    let mut img: Vec<Option<usize>> = vec![None; dom.len()];
    for (k, raw) in text.lines().enumerate() {
        let line_no = k + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some(rest) = line.strip_prefix("map").filter(|r| r.starts_with(char::is_whitespace))
        else {
            return Err(parse_error(line_no, "expected `map X -> Y`"));
        };
        let Some((x, y)) = rest.split_once("->") else {
            return Err(parse_error(line_no, "expected `map X -> Y`"));
        };
        let x = dom
            .index_of(x.trim())
            .map_err(|e| parse_error(line_no, e.to_string()))?;
        let y = cod
            .index_of(y.trim())
            .map_err(|e| parse_error(line_no, e.to_string()))?;
        if img[x].replace(y).is_some() {
            return Err(parse_error(line_no, format!("{} mapped twice", dom.label(x))));
        }
    }
    let img = img
        .into_iter()
        .enumerate()
        .map(|(x, y)| y.ok_or_else(|| Error::DomainMismatch(format!("no image for {}", dom.label(x)))))
        .collect::<Result<Vec<_>>>()?;
    PointMap::new(dom, cod, img)
}

pub fn format_map(f: &PointMap) -> String {
    let mut out = String::new();
    for x in 0..f.dom().len() {
        writeln!(out, "map {} -> {}", f.dom().label(x), f.cod().label(f.apply(x))).expect("string write");
    }
    out
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

pub fn read_poset(path: impl AsRef<Path>) -> Result<FinitePoset> {
    parse_poset(&read(path.as_ref())?)
}

pub fn read_map(path: impl AsRef<Path>, dom: Arc<FinitePoset>, cod: Arc<FinitePoset>) -> Result<PointMap> {
    parse_map(&read(path.as_ref())?, dom, cod)
}

/// Serializable poset: labels and Hasse covers as `[upper, lower]` label pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PosetJson {
    pub elements: Vec<String>,
    pub covers: Vec<(String, String)>,
}

impl PosetJson {
    pub fn from_poset(p: &FinitePoset) -> Self {
        Self {
            elements: p.labels().to_vec(),
            covers: p
                .covers()
                .iter()
                .map(|&(a, b)| (p.label(a).to_string(), p.label(b).to_string()))
                .collect(),
        }
    }

    pub fn to_poset(&self) -> Result<FinitePoset> {
        let rel: Vec<(&str, &str)> = self
            .covers
            .iter()
            .map(|(a, b)| (b.as_str(), a.as_str()))
            .collect();
        FinitePoset::build(&self.elements.iter().map(String::as_str).collect::<Vec<_>>(), &rel)
    }
}
