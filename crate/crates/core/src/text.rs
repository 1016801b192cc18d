//! Line-oriented text formats for sets, vectors and subset-sum instances.
//!
//! Every file starts with a version header. Blank lines and further `#`
//! comment lines are ignored.

use crate::error::{Error, Result};
use crate::model::{SparseSet, SparseVec};

pub const SET_HEADER: &str = "# sparse-set v1";
pub const VEC_HEADER: &str = "# sparse-vec v1";
pub const SUBSET_SUM_HEADER: &str = "# subset-sum v1";

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

/// Numbered content lines after the header check.
fn body<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, &'a str)>> {
    let mut lines = text.lines().enumerate().map(|(k, l)| (k + 1, l.trim()));
    match lines.next() {
        Some((_, h)) if h == header => {}
        Some((k, h)) => return Err(parse_err(k, format!("expected header {header:?}, found {h:?}"))),
        None => return Err(parse_err(1, "empty input")),
    }
    Ok(lines.filter(|(_, l)| !l.is_empty() && !l.starts_with('#')))
}

fn int(line: usize, tok: &str) -> Result<i64> {
    tok.parse().map_err(|_| parse_err(line, format!("not an integer: {tok:?}")))
}

pub fn parse_set(text: &str) -> Result<SparseSet> {
    let mut elems = Vec::new();
    for (k, l) in body(text, SET_HEADER)? {
        elems.push(int(k, l)?);
    }
    SparseSet::new(elems)
}

pub fn format_set(set: &SparseSet) -> String {
    let mut s = format!("{SET_HEADER}\n");
    for x in set.iter() {
        s.push_str(&x.to_string());
        s.push('\n');
    }
    s
}

pub fn parse_vec(text: &str) -> Result<SparseVec> {
    let mut entries = Vec::new();
    for (k, l) in body(text, VEC_HEADER)? {
        let mut toks = l.split_whitespace();
        let (Some(i), Some(v), None) = (toks.next(), toks.next(), toks.next()) else {
            return Err(parse_err(k, "expected \"<index> <value>\""));
        };
        let v: u64 = v.parse().map_err(|_| parse_err(k, format!("bad value {v:?}")))?;
        entries.push((int(k, i)?, v));
    }
    SparseVec::new(entries)
}

pub fn format_vec(v: &SparseVec) -> String {
    let mut s = format!("{VEC_HEADER}\n");
    for (i, x) in v.entries() {
        s.push_str(&format!("{i} {x}\n"));
    }
    s
}

/// Parses a subset-sum instance: the `t=<int>` line plus one element per line.
/// Elements may appear in any order.
pub fn parse_subset_sum(text: &str) -> Result<(SparseSet, i64)> {
    let mut t = None;
    let mut elems = Vec::new();
    for (k, l) in body(text, SUBSET_SUM_HEADER)? {
        if let Some(rest) = l.strip_prefix("t=") {
            if t.replace(int(k, rest.trim())?).is_some() {
                return Err(parse_err(k, "duplicate t= line"));
            }
        } else {
            let x = int(k, l)?;
            if x <= 0 {
                return Err(parse_err(k, "subset-sum elements must be positive"));
            }
            elems.push(x);
        }
    }
    let t = t.ok_or_else(|| parse_err(0, "missing t= line"))?;
    Ok((SparseSet::from_unsorted(elems)?, t))
}

pub fn format_subset_sum(x: &SparseSet, t: i64) -> String {
    let mut s = format!("{SUBSET_SUM_HEADER}\nt={t}\n");
    for v in x.iter() {
        s.push_str(&format!("{v}\n"));
    }
    s
}
