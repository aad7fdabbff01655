//! Text format for geometric complexes and cycles.
//!
//! ```text
//! dim 2
//! curvature 0
//! simplex 2 0 1 2
//! length 0 1 1.0
//! length 0 2 1.0
//! length 1 2 1.0
//! orient 0 1 2 1
//! ```

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use super::{Chain, OrientedComplex};
use crate::error::{Error, Result};
use crate::geometry::{Curvature, MetricData};

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

fn parse_num<T: std::str::FromStr>(tok: &str, line: usize, what: &str) -> Result<T> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("cannot parse {what} from `{tok}`")))
}

/// Reads a complex and its metric from a file.
pub fn load_complex(path: &Path) -> Result<(OrientedComplex, MetricData)> {
    let text = std::fs::read_to_string(path)?;
    parse_complex(&text)
}

/// Parses the complex text format and validates closure, purity and
/// realizability.
pub fn parse_complex(text: &str) -> Result<(OrientedComplex, MetricData)> {
    let mut dim: Option<usize> = None;
    let mut curvature: Option<Curvature> = None;
    let mut tops: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut lower: Vec<(usize, Vec<i64>)> = Vec::new();
    let mut lengths: Vec<(usize, i64, i64, f64)> = Vec::new();
    let mut orients: Vec<(usize, Vec<i64>, i8)> = Vec::new();

    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "dim" => {
                if toks.len() != 2 {
                    return Err(parse_err(ln, "expected `dim n`"));
                }
                if dim.is_some() {
                    return Err(parse_err(ln, "duplicate `dim` line"));
                }
                let n: usize = parse_num(toks[1], ln, "dimension")?;
                if n == 0 {
                    return Err(parse_err(ln, "dimension must be positive"));
                }
                dim = Some(n);
            }
            "curvature" => {
                if toks.len() != 2 {
                    return Err(parse_err(ln, "expected `curvature k`"));
                }
                if curvature.is_some() {
                    return Err(parse_err(ln, "duplicate `curvature` line"));
                }
                let k: i32 = parse_num(toks[1], ln, "curvature")?;
                curvature = Some(
                    Curvature::from_sign(k)
                        .ok_or_else(|| parse_err(ln, "curvature must be -1, 0 or 1"))?,
                );
            }
            "simplex" => {
                let n = dim.ok_or_else(|| parse_err(ln, "`simplex` before `dim`"))?;
                if toks.len() < 2 {
                    return Err(parse_err(ln, "expected `simplex k v0 .. vk`"));
                }
                let k: usize = parse_num(toks[1], ln, "degree")?;
                if k > n {
                    return Err(parse_err(ln, format!("degree {k} exceeds dimension {n}")));
                }
                if toks.len() != k + 3 {
                    return Err(parse_err(ln, format!("a {k}-simplex needs {} vertices", k + 1)));
                }
                let mut vs: Vec<i64> = toks[2..]
                    .iter()
                    .map(|t| parse_num(t, ln, "vertex"))
                    .collect::<Result<_>>()?;
                vs.sort_unstable();
                if vs.windows(2).any(|w| w[0] == w[1]) {
                    return Err(parse_err(ln, "repeated vertex"));
                }
                if k == n {
                    tops.push((ln, vs));
                } else {
                    lower.push((ln, vs));
                }
            }
            "length" => {
                if toks.len() != 4 {
                    return Err(parse_err(ln, "expected `length va vb L`"));
                }
                let a: i64 = parse_num(toks[1], ln, "vertex")?;
                let b: i64 = parse_num(toks[2], ln, "vertex")?;
                let l: f64 = parse_num(toks[3], ln, "length")?;
                if a == b {
                    return Err(parse_err(ln, "edge endpoints coincide"));
                }
                if !(l.is_finite() && l > 0.0) {
                    return Err(parse_err(ln, "edge length must be positive and finite"));
                }
                lengths.push((ln, a.min(b), a.max(b), l));
            }
            "orient" => {
                let n = dim.ok_or_else(|| parse_err(ln, "`orient` before `dim`"))?;
                if toks.len() != n + 3 {
                    return Err(parse_err(ln, format!("expected `orient` with {} vertices and a sign", n + 1)));
                }
                let vs: Vec<i64> = toks[1..=n + 1]
                    .iter()
                    .map(|t| parse_num(t, ln, "vertex"))
                    .collect::<Result<_>>()?;
                let s: i64 = parse_num(toks[n + 2], ln, "sign")?;
                if s != 1 && s != -1 {
                    return Err(parse_err(ln, "orientation sign must be 1 or -1"));
                }
                orients.push((ln, vs, s as i8));
            }
            other => return Err(parse_err(ln, format!("unknown key `{other}`"))),
        }
    }

    let n = dim.ok_or_else(|| parse_err(0, "missing `dim` line"))?;
    let curvature = curvature.ok_or_else(|| parse_err(0, "missing `curvature` line"))?;
    if tops.is_empty() {
        return Err(parse_err(0, "no top-dimensional simplices"));
    }

    let labels: Vec<i64> = tops
        .iter()
        .flat_map(|(_, vs)| vs.iter().copied())
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let index: BTreeMap<i64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let mut seen = BTreeSet::new();
    let mut top_idx = Vec::with_capacity(tops.len());
    for (ln, vs) in &tops {
        if !seen.insert(vs.clone()) {
            return Err(parse_err(*ln, "duplicate simplex"));
        }
        top_idx.push(vs.iter().map(|l| index[l]).collect::<Vec<_>>());
    }
    let mut complex = OrientedComplex::from_top_simplices(n, labels.clone(), &top_idx)?;

    for (ln, vs) in &lower {
        let idx: Option<Vec<usize>> = vs.iter().map(|l| index.get(l).copied()).collect();
        let found = idx.and_then(|v| complex.find(vs.len() - 1, &v));
        if found.is_none() {
            return Err(Error::PurityViolation(format!(
                "simplex {vs:?} on line {ln} is not a face of any top simplex"
            )));
        }
    }

    let mut edge_len = vec![f64::NAN; complex.count(1)];
    for (ln, a, b, l) in &lengths {
        let e = match (index.get(a), index.get(b)) {
            (Some(&ia), Some(&ib)) => complex.find(1, &[ia, ib]),
            _ => None,
        };
        let e = e.ok_or_else(|| parse_err(*ln, format!("length given for non-edge {a} {b}")))?;
        if !edge_len[e].is_nan() {
            return Err(parse_err(*ln, format!("duplicate length for edge {a} {b}")));
        }
        edge_len[e] = *l;
    }
    if let Some(e) = edge_len.iter().position(|l| l.is_nan()) {
        let s = complex.simplex(1, e);
        return Err(Error::ClosureViolation(format!(
            "edge {} {} has no length",
            labels[s[0]], labels[s[1]]
        )));
    }

    if !orients.is_empty() {
        let mut signs = vec![0i8; complex.count(n)];
        for (ln, vs, s) in &orients {
            let mut sorted = vs.clone();
            sorted.sort_unstable();
            let idx: Option<Vec<usize>> = sorted.iter().map(|l| index.get(l).copied()).collect();
            let t = idx
                .and_then(|v| complex.find(n, &v))
                .ok_or_else(|| parse_err(*ln, "orientation given for a non-simplex"))?;
            // an odd permutation of the listed vertices flips the sign
            let sign = s * permutation_sign(vs);
            if signs[t] != 0 {
                return Err(parse_err(*ln, "duplicate orientation"));
            }
            signs[t] = sign;
        }
        if signs.iter().any(|&s| s == 0) {
            return Err(Error::NotOrientable(
                "orientation lines must cover every top simplex".into(),
            ));
        }
        complex.set_orientation(signs)?;
    }

    let metric = MetricData::new(curvature, edge_len);
    metric.validate(&complex)?;
    Ok((complex, metric))
}

fn permutation_sign(vs: &[i64]) -> i8 {
    let mut inversions = 0;
    for i in 0..vs.len() {
        for j in i + 1..vs.len() {
            if vs[i] > vs[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Serializes a simplicial complex and metric in the text format.
pub fn write_complex(k: &OrientedComplex, m: &MetricData) -> Result<String> {
    if !k.is_simplicial() {
        return Err(Error::NotSimplicial(
            "two simplices share a vertex set; the text format cannot express this".into(),
        ));
    }
    let n = k.dim();
    let labels = k.labels();
    let mut out = String::new();
    writeln!(out, "dim {n}").unwrap();
    writeln!(out, "curvature {}", m.curvature.sign()).unwrap();
    for s in k.simplices(n) {
        write!(out, "simplex {n}").unwrap();
        for &v in s {
            write!(out, " {}", labels[v]).unwrap();
        }
        out.push('\n');
    }
    for (e, s) in k.simplices(1).iter().enumerate() {
        writeln!(out, "length {} {} {:?}", labels[s[0]], labels[s[1]], m.lengths[e]).unwrap();
    }
    if let Some(signs) = k.orientation() {
        for (t, s) in k.simplices(n).iter().enumerate() {
            write!(out, "orient").unwrap();
            for &v in s {
                write!(out, " {}", labels[v]).unwrap();
            }
            writeln!(out, " {}", signs[t]).unwrap();
        }
    }
    Ok(out)
}

/// A cycle file: `edge va vb coeff` lines on the primal complex and
/// optional `dual e coeff` lines on dual edges, where `e` lists the
/// vertices of the codimension-one simplex whose dual edge is meant.
#[derive(Clone, Debug, Default)]
pub struct CycleFile {
    pub primal: Option<Chain>,
    pub dual: Option<Chain>,
}

pub fn parse_cycle(text: &str, k: &OrientedComplex) -> Result<CycleFile> {
    let index: BTreeMap<i64, usize> =
        k.labels().iter().enumerate().map(|(i, &l)| (l, i)).collect();
    let n = k.dim();
    let mut primal: Option<Vec<f64>> = None;
    let mut dual: Option<Vec<f64>> = None;
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks[0] {
            "edge" => {
                if toks.len() != 4 {
                    return Err(parse_err(ln, "expected `edge va vb coeff`"));
                }
                let a: i64 = parse_num(toks[1], ln, "vertex")?;
                let b: i64 = parse_num(toks[2], ln, "vertex")?;
                let c: f64 = parse_num(toks[3], ln, "coefficient")?;
                let (ia, ib) = match (index.get(&a), index.get(&b)) {
                    (Some(&x), Some(&y)) => (x, y),
                    _ => return Err(parse_err(ln, "unknown vertex")),
                };
                let (lo, hi, sign) = if ia < ib { (ia, ib, 1.0) } else { (ib, ia, -1.0) };
                let e = k
                    .find(1, &[lo, hi])
                    .ok_or_else(|| parse_err(ln, format!("{a} {b} is not an edge")))?;
                primal.get_or_insert_with(|| vec![0.0; k.count(1)])[e] += sign * c;
            }
            "dual" => {
                if toks.len() != n + 2 {
                    return Err(parse_err(ln, format!("expected `dual` with {n} vertices and a coefficient")));
                }
                let mut vs = Vec::with_capacity(n);
                for t in &toks[1..=n] {
                    let l: i64 = parse_num(t, ln, "vertex")?;
                    vs.push(*index.get(&l).ok_or_else(|| parse_err(ln, "unknown vertex"))?);
                }
                let sign = permutation_sign(&vs.iter().map(|&v| v as i64).collect::<Vec<_>>()) as f64;
                vs.sort_unstable();
                let c: f64 = parse_num(toks[n + 1], ln, "coefficient")?;
                let s = k
                    .find(n - 1, &vs)
                    .ok_or_else(|| parse_err(ln, "not a codimension-one simplex"))?;
                dual.get_or_insert_with(|| vec![0.0; k.count(n - 1)])[s] += sign * c;
            }
            other => return Err(parse_err(ln, format!("unknown key `{other}`"))),
        }
    }
    if primal.is_none() && dual.is_none() {
        return Err(parse_err(0, "cycle file has no entries"));
    }
    Ok(CycleFile {
        primal: primal.map(|c| Chain::new(1, c)),
        dual: dual.map(|c| Chain::new(1, c)),
    })
}
