//! Plain-text file formats.
//!
//! * Edge lists: one `u v` pair per line, 0-indexed, `#` comments.
//! * Labels: one `vertex label` pair per line, `-1` for unassigned.
//! * Matrices: `u v value` for the upper triangle including the diagonal.
//! * CSV: a first line `# dcsbm-csv v1 <kind>` followed by a header row.
//! * Model files: TOML with `n`, `K`, `alpha`, `block`, optional `sigma` and a
//!   `[weights]` table.
//! * GML: the `node`/`edge` subset used by public network datasets.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use thiserror::Error;

use crate::model::{contiguous_labels, DcsbmParams, Graph, ModelError};
use crate::spectra::SymMatrix;

/// Version written into every CSV header line.
pub const CSV_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: self-loop at vertex {u}")]
    SelfLoop { line: usize, u: usize },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    Duplicate { line: usize, u: usize, v: usize },
    #[error("line {line}: vertex {index} is out of range for n = {n}")]
    OutOfRange { line: usize, index: usize, n: usize },
    #[error("model file: {0}")]
    Model(String),
    #[error(transparent)]
    Invalid(#[from] ModelError),
}

pub fn read_text(path: &Path) -> Result<String, IoError> {
    fs::read_to_string(path).map_err(|source| IoError::File { path: path.to_path_buf(), source })
}

pub fn write_text(path: &Path, text: &str) -> Result<(), IoError> {
    fs::write(path, text).map_err(|source| IoError::File { path: path.to_path_buf(), source })
}

/// Non-empty, non-comment lines with their 1-based line numbers.
fn data_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

fn parse_field<T: std::str::FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T, IoError> {
    let tok = tok.ok_or_else(|| IoError::Parse { line, msg: format!("missing {what}") })?;
    tok.parse().map_err(|_| IoError::Parse { line, msg: format!("cannot parse {what} from {tok:?}") })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct EdgeListOptions {
    /// Vertex ids start at 1 in the file.
    pub one_indexed: bool,
    /// Vertex count; defaults to the largest id plus one.
    pub n: Option<usize>,
}

pub fn parse_edge_list(text: &str, opts: &EdgeListOptions) -> Result<Graph, IoError> {
    let shift = usize::from(opts.one_indexed);
    let mut pairs = Vec::new();
    for (line, l) in data_lines(text) {
        let mut it = l.split_whitespace();
        let mut vertex = |what| -> Result<usize, IoError> {
            let x: usize = parse_field(it.next(), line, what)?;
            x.checked_sub(shift).ok_or_else(|| IoError::Parse { line, msg: "vertex 0 in a one-indexed file".into() })
        };
        let (u, v) = (vertex("source vertex")?, vertex("target vertex")?);
        if it.next().is_some() {
            return Err(IoError::Parse { line, msg: "expected exactly two fields".into() });
        }
        if u == v {
            return Err(IoError::SelfLoop { line, u });
        }
        pairs.push((line, u.min(v), u.max(v)));
    }
    let max = pairs.iter().map(|p| p.2 + 1).max().unwrap_or(0);
    let n = opts.n.unwrap_or(max);
    let mut seen = HashMap::with_capacity(pairs.len());
    for &(line, u, v) in &pairs {
        if v >= n {
            return Err(IoError::OutOfRange { line, index: v, n });
        }
        if seen.insert((u, v), line).is_some() {
            return Err(IoError::Duplicate { line, u, v });
        }
    }
    let edges: Vec<(usize, usize)> = pairs.into_iter().map(|p| (p.1, p.2)).collect();
    Ok(Graph::from_edges(n, &edges).expect("edges checked above"))
}

pub fn read_edge_list(path: &Path, opts: &EdgeListOptions) -> Result<Graph, IoError> {
    parse_edge_list(&read_text(path)?, opts)
}

/// `u v` per edge in canonical order.
pub fn format_edge_list(graph: &Graph) -> String {
    let mut out = String::with_capacity(graph.num_edges() * 12);
    for &(u, v) in graph.edges() {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn write_edge_list(path: &Path, graph: &Graph) -> Result<(), IoError> {
    write_text(path, &format_edge_list(graph))
}

/// Labels indexed by vertex. Every vertex `0..n` must appear exactly once.
pub fn parse_labels(text: &str) -> Result<Vec<Option<usize>>, IoError> {
    let mut map = BTreeMap::new();
    for (line, l) in data_lines(text) {
        let mut it = l.split_whitespace();
        let u: usize = parse_field(it.next(), line, "vertex")?;
        let label: i64 = parse_field(it.next(), line, "label")?;
        if it.next().is_some() {
            return Err(IoError::Parse { line, msg: "expected exactly two fields".into() });
        }
        let label = match label {
            -1 => None,
            x if x >= 0 => Some(x as usize),
            x => return Err(IoError::Parse { line, msg: format!("label {x} is negative") }),
        };
        if map.insert(u, label).is_some() {
            return Err(IoError::Parse { line, msg: format!("vertex {u} labelled twice") });
        }
    }
    let n = map.keys().next_back().map_or(0, |m| m + 1);
    if map.len() != n {
        let missing = (0..n).find(|u| !map.contains_key(u)).unwrap();
        return Err(IoError::Parse { line: 0, msg: format!("vertex {missing} has no label") });
    }
    Ok(map.into_values().collect())
}

pub fn read_labels(path: &Path) -> Result<Vec<Option<usize>>, IoError> {
    parse_labels(&read_text(path)?)
}

/// Labels where every vertex is assigned.
pub fn read_truth(path: &Path) -> Result<Vec<usize>, IoError> {
    read_labels(path)?
        .into_iter()
        .enumerate()
        .map(|(u, l)| l.ok_or_else(|| IoError::Parse { line: 0, msg: format!("truth label of vertex {u} is -1") }))
        .collect()
}

/// `vertex label` per line, `-1` for unassigned.
pub fn format_labels(labels: &[Option<usize>]) -> String {
    let mut out = String::with_capacity(labels.len() * 8);
    for (u, l) in labels.iter().enumerate() {
        match l {
            Some(x) => writeln!(out, "{u} {x}").unwrap(),
            None => writeln!(out, "{u} -1").unwrap(),
        }
    }
    out
}

pub fn write_labels(path: &Path, labels: &[Option<usize>]) -> Result<(), IoError> {
    write_text(path, &format_labels(labels))
}

/// Upper triangle with a `# n=<n>` header line; zero entries are omitted.
pub fn format_matrix(m: &SymMatrix) -> String {
    let mut out = format!("# n={}\n", m.n());
    for (u, v, x) in m.upper_triplets() {
        writeln!(out, "{u} {v} {x:e}").unwrap();
    }
    out
}

/// Reads `u v value` lines. The size comes from a `# n=<n>` line if present,
/// otherwise from the largest index. Entries with `u > v` are mirrored.
pub fn parse_matrix(text: &str) -> Result<SymMatrix, IoError> {
    let declared = text.lines().find_map(|l| l.trim().strip_prefix("# n=").and_then(|s| s.trim().parse::<usize>().ok()));
    let mut entries: BTreeMap<(usize, usize), (usize, f64)> = BTreeMap::new();
    for (line, l) in data_lines(text) {
        let mut it = l.split_whitespace();
        let u: usize = parse_field(it.next(), line, "row")?;
        let v: usize = parse_field(it.next(), line, "column")?;
        let x: f64 = parse_field(it.next(), line, "value")?;
        if !x.is_finite() {
            return Err(IoError::Parse { line, msg: format!("value {x} is not finite") });
        }
        if entries.insert((u.min(v), u.max(v)), (line, x)).is_some() {
            return Err(IoError::Duplicate { line, u, v });
        }
    }
    let max = entries.keys().map(|k| k.1 + 1).max().unwrap_or(0);
    let n = declared.unwrap_or(max);
    if let Some((&(_, v), &(line, _))) = entries.iter().find(|(k, _)| k.1 >= n) {
        return Err(IoError::OutOfRange { line, index: v, n });
    }
    let triplets: Vec<(usize, usize, f64)> = entries.into_iter().map(|((u, v), (_, x))| (u, v, x)).collect();
    Ok(SymMatrix::from_upper_triplets(n, &triplets))
}

pub fn read_matrix(path: &Path) -> Result<SymMatrix, IoError> {
    parse_matrix(&read_text(path)?)
}

/// First line of every CSV file of the given kind.
pub fn csv_preamble(kind: &str) -> String {
    format!("# dcsbm-csv v{CSV_SCHEMA_VERSION} {kind}\n")
}

/// Eigenvector CSV: `node,value1,value2,…`, one row per vertex.
pub fn format_eigvec_csv(vectors: &[&[f64]]) -> String {
    let n = vectors.first().map_or(0, |v| v.len());
    let mut out = csv_preamble("eigvecs");
    out.push_str("node");
    for i in 1..=vectors.len() {
        write!(out, ",value{i}").unwrap();
    }
    out.push('\n');
    for u in 0..n {
        write!(out, "{u}").unwrap();
        for x in vectors {
            write!(out, ",{}", x[u]).unwrap();
        }
        out.push('\n');
    }
    out
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ModelFile {
    n: usize,
    #[serde(rename = "K")]
    k: Option<usize>,
    alpha: Vec<f64>,
    block: Vec<f64>,
    sigma: Option<Vec<usize>>,
    weights: WeightSpec,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
enum WeightSpec {
    /// One weight per vertex.
    Explicit { values: Vec<f64> },
    Constant { value: f64 },
    /// `D_u = scale · u^exponent` with 1-based `u`.
    Power {
        exponent: f64,
        #[serde(default = "one")]
        scale: f64,
    },
    /// `D_u = scale · i^exponent` for the `i`-th vertex (1-based) of its
    /// community.
    BlockPower {
        exponent: f64,
        #[serde(default = "one")]
        scale: f64,
    },
}

fn one() -> f64 {
    1.0
}

/// Parses a TOML model file such as
///
/// ```toml
/// n = 3000
/// K = 3
/// alpha = [0.3333333333333333, 0.3333333333333333, 0.3333333333333334]
/// block = [1, 2, 3, 2, 0, 2, 3, 2, 5]
///
/// [weights]
/// family = "block-power"
/// exponent = 0.3333333333333333
/// ```
pub fn parse_model(text: &str) -> Result<DcsbmParams, IoError> {
    let file: ModelFile = toml::from_str(text).map_err(|e| IoError::Model(e.to_string()))?;
    if let Some(k) = file.k {
        if k != file.alpha.len() {
            return Err(IoError::Model(format!("K = {k} but alpha has {} entries", file.alpha.len())));
        }
    }
    let n = file.n;
    let labels = match &file.sigma {
        Some(s) => s.clone(),
        None => contiguous_labels(&file.alpha, n),
    };
    let weights = match file.weights {
        WeightSpec::Explicit { values } => {
            if values.len() != n {
                return Err(IoError::Model(format!("{} explicit weights for n = {n}", values.len())));
            }
            values
        }
        WeightSpec::Constant { value } => vec![value; n],
        WeightSpec::Power { exponent, scale } => (1..=n).map(|u| scale * (u as f64).powf(exponent)).collect(),
        WeightSpec::BlockPower { exponent, scale } => {
            if labels.len() != n {
                return Err(IoError::Model(format!("sigma has {} entries for n = {n}", labels.len())));
            }
            let mut seen = vec![0usize; file.alpha.len()];
            labels
                .iter()
                .map(|&s| {
                    let slot = seen.get_mut(s).ok_or_else(|| IoError::Model(format!("sigma entry {s} is not a community")))?;
                    *slot += 1;
                    Ok(scale * (*slot as f64).powf(exponent))
                })
                .collect::<Result<_, IoError>>()?
        }
    };
    Ok(DcsbmParams::new(file.alpha, file.block, weights, file.sigma)?)
}

pub fn read_model(path: &Path) -> Result<DcsbmParams, IoError> {
    parse_model(&read_text(path)?)
}

/// A network read from GML.
#[derive(Debug, Clone, PartialEq)]
pub struct GmlGraph {
    pub graph: Graph,
    /// GML `id` of each vertex, in vertex order.
    pub ids: Vec<i64>,
    /// Integer `value` attribute per vertex, when every node has one.
    pub values: Option<Vec<i64>>,
    pub self_loops_dropped: usize,
    pub duplicates_dropped: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Key(String),
    Open,
    Close,
    Value(String),
}

fn tokenize(text: &str) -> Result<Vec<(usize, Token)>, IoError> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let mut rest = raw.trim();
        while !rest.is_empty() {
            if rest.starts_with('#') {
                break;
            }
            if let Some(r) = rest.strip_prefix('[') {
                out.push((line, Token::Open));
                rest = r.trim_start();
            } else if let Some(r) = rest.strip_prefix(']') {
                out.push((line, Token::Close));
                rest = r.trim_start();
            } else if let Some(r) = rest.strip_prefix('"') {
                let end = r.find('"').ok_or_else(|| IoError::Parse { line, msg: "unterminated string".into() })?;
                out.push((line, Token::Value(r[..end].to_string())));
                rest = r[end + 1..].trim_start();
            } else {
                let end = rest.find(|c: char| c.is_whitespace() || c == '[' || c == ']').unwrap_or(rest.len());
                let word = &rest[..end];
                let tok = if word.starts_with(|c: char| c.is_ascii_alphabetic() || c == '_') {
                    Token::Key(word.to_string())
                } else {
                    Token::Value(word.to_string())
                };
                out.push((line, tok));
                rest = rest[end..].trim_start();
            }
        }
    }
    Ok(out)
}

/// Flat `key value` attributes of one bracketed record.
fn record(tokens: &[(usize, Token)], pos: &mut usize) -> Result<HashMap<String, String>, IoError> {
    let mut attrs = HashMap::new();
    let mut depth = 1;
    while *pos < tokens.len() {
        let (line, tok) = &tokens[*pos];
        *pos += 1;
        match tok {
            Token::Open => depth += 1,
            Token::Close => {
                depth -= 1;
                if depth == 0 {
                    return Ok(attrs);
                }
            }
            Token::Key(k) if depth == 1 => match tokens.get(*pos) {
                Some((_, Token::Value(v))) | Some((_, Token::Key(v))) => {
                    attrs.insert(k.clone(), v.clone());
                    *pos += 1;
                }
                Some((_, Token::Open)) => {}
                _ => return Err(IoError::Parse { line: *line, msg: format!("attribute {k} has no value") }),
            },
            _ => {}
        }
    }
    Err(IoError::Parse { line: tokens.last().map_or(0, |t| t.0), msg: "unbalanced brackets".into() })
}

/// Reads `node [ id … value … ]` and `edge [ source … target … ]` records.
/// Vertices are numbered by ascending GML id. Edges are made undirected;
/// self-loops and repeated edges are dropped and counted.
pub fn parse_gml(text: &str) -> Result<GmlGraph, IoError> {
    let tokens = tokenize(text)?;
    let mut nodes: BTreeMap<i64, Option<i64>> = BTreeMap::new();
    let mut raw_edges = Vec::new();
    let mut pos = 0;
    while pos < tokens.len() {
        let (line, tok) = tokens[pos].clone();
        pos += 1;
        let Token::Key(key) = tok else { continue };
        if key != "node" && key != "edge" {
            continue;
        }
        if tokens.get(pos).map(|t| &t.1) != Some(&Token::Open) {
            return Err(IoError::Parse { line, msg: format!("{key} without '['") });
        }
        pos += 1;
        let attrs = record(&tokens, &mut pos)?;
        let int = |k: &str| -> Result<i64, IoError> {
            let v = attrs.get(k).ok_or_else(|| IoError::Parse { line, msg: format!("{key} without {k}") })?;
            v.parse().map_err(|_| IoError::Parse { line, msg: format!("{key} {k} {v:?} is not an integer") })
        };
        if key == "node" {
            let id = int("id")?;
            let value = attrs.get("value").and_then(|v| v.parse().ok());
            if nodes.insert(id, value).is_some() {
                return Err(IoError::Parse { line, msg: format!("node id {id} repeated") });
            }
        } else {
            raw_edges.push((line, int("source")?, int("target")?));
        }
    }
    let index: HashMap<i64, usize> = nodes.keys().enumerate().map(|(i, &id)| (id, i)).collect();
    let mut set = BTreeSet::new();
    let (mut loops, mut dups) = (0, 0);
    for (line, s, t) in raw_edges {
        let lookup = |id: i64| index.get(&id).copied().ok_or_else(|| IoError::Parse { line, msg: format!("edge endpoint {id} is not a node") });
        let (u, v) = (lookup(s)?, lookup(t)?);
        if u == v {
            loops += 1;
        } else if !set.insert((u.min(v), u.max(v))) {
            dups += 1;
        }
    }
    let edges: Vec<(usize, usize)> = set.into_iter().collect();
    let graph = Graph::from_edges(nodes.len(), &edges).expect("edges deduplicated");
    let values = nodes.values().copied().collect::<Option<Vec<i64>>>();
    Ok(GmlGraph { graph, ids: nodes.into_keys().collect(), values, self_loops_dropped: loops, duplicates_dropped: dups })
}

pub fn read_gml(path: &Path) -> Result<GmlGraph, IoError> {
    parse_gml(&read_text(path)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_basics() {
        let g = parse_edge_list("0 1\n1 2", &EdgeListOptions::default()).unwrap();
        assert_eq!(g.n(), 3);
        assert_eq!(g.num_edges(), 2);
        let g = parse_edge_list("# header\n\n1 2  # trailing\n2 3\n", &EdgeListOptions { one_indexed: true, n: Some(5) }).unwrap();
        assert_eq!(g.n(), 5);
        assert!(g.has_edge(0, 1));
    }

    #[test]
    fn edge_list_errors_carry_lines() {
        let opts = EdgeListOptions::default();
        assert!(matches!(parse_edge_list("0 0", &opts), Err(IoError::SelfLoop { line: 1, u: 0 })));
        assert!(matches!(parse_edge_list("0 1\n# c\n1 0", &opts), Err(IoError::Duplicate { line: 3, .. })));
        assert!(matches!(parse_edge_list("0 1\n0 x", &opts), Err(IoError::Parse { line: 2, .. })));
        assert!(matches!(parse_edge_list("0 1 2", &opts), Err(IoError::Parse { line: 1, .. })));
        let small = EdgeListOptions { n: Some(2), ..opts };
        assert!(matches!(parse_edge_list("0 1\n1 2", &small), Err(IoError::OutOfRange { line: 2, .. })));
        let one = EdgeListOptions { one_indexed: true, ..opts };
        assert!(parse_edge_list("0 1", &one).is_err());
    }

    #[test]
    fn edge_list_round_trip() {
        let text = "0 1\n0 3\n1 2\n";
        let g = parse_edge_list(text, &EdgeListOptions::default()).unwrap();
        assert_eq!(format_edge_list(&g), text);
    }

    #[test]
    fn labels_round_trip() {
        let labels = vec![Some(0), None, Some(2)];
        let text = format_labels(&labels);
        assert_eq!(text, "0 0\n1 -1\n2 2\n");
        assert_eq!(parse_labels(&text).unwrap(), labels);
        assert!(parse_labels("0 0\n2 1").is_err());
        assert!(parse_labels("0 0\n0 1").is_err());
        assert!(parse_labels("0 -2").is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let m = SymMatrix::from_upper_triplets(4, &[(0, 1, 0.25), (1, 1, -2.0), (2, 3, 1e-300)]);
        let back = parse_matrix(&format_matrix(&m)).unwrap();
        assert_eq!(back.n(), 4);
        assert_eq!(back.to_dense(), m.to_dense());
        let mirrored = parse_matrix("1 0 3.5").unwrap();
        assert_eq!(mirrored.get(0, 1), 3.5);
        assert!(parse_matrix("0 1 2\n1 0 2").is_err());
    }

    #[test]
    fn eigvec_csv_layout() {
        let a = [0.5, -0.5];
        let b = [0.1, 0.2];
        let csv = format_eigvec_csv(&[&a, &b]);
        assert_eq!(csv, "# dcsbm-csv v1 eigvecs\nnode,value1,value2\n0,0.5,0.1\n1,-0.5,0.2\n");
    }

    #[test]
    fn model_families() {
        let p = parse_model(
            "n = 6\nK = 2\nalpha = [0.5, 0.5]\nblock = [1, 2, 2, 1]\n[weights]\nfamily = \"block-power\"\nexponent = 1.0\n",
        )
        .unwrap();
        assert_eq!(p.weights(), &[1.0, 2.0, 3.0, 1.0, 2.0, 3.0]);
        let p = parse_model("n = 3\nalpha = [1.0]\nblock = [0.5]\n[weights]\nfamily = \"power\"\nexponent = 2.0\nscale = 0.5\n").unwrap();
        assert_eq!(p.weights(), &[0.5, 2.0, 4.5]);
        let p = parse_model(
            "n = 3\nalpha = [0.5, 0.5]\nblock = [1, 0, 0, 1]\nsigma = [1, 0, 1]\n[weights]\nfamily = \"explicit\"\nvalues = [1, 2, 3]\n",
        )
        .unwrap();
        assert_eq!(p.sigma(), &[1, 0, 1]);
        assert!(parse_model("n = 3\nK = 2\nalpha = [1.0]\nblock = [1]\n[weights]\nfamily = \"constant\"\nvalue = 1\n").is_err());
        assert!(parse_model("n = 3\nalpha = [1.0]\nblock = [1]\n[weights]\nfamily = \"zipf\"\n").is_err());
    }

    #[test]
    fn gml_subset() {
        let text = r#"graph [
  directed 1
  node [ id 10 label "a" value 0 ]
  node [ id 20 label "b c" value 1 ]
  node [ id 30 value 1 graphics [ x 1 y 2 ] ]
  edge [ source 10 target 20 ]
  edge [ source 20 target 10 ]
  edge [ source 30 target 30 ]
  edge [ source 30 target 20 ]
]"#;
        let g = parse_gml(text).unwrap();
        assert_eq!(g.ids, vec![10, 20, 30]);
        assert_eq!(g.values, Some(vec![0, 1, 1]));
        assert_eq!(g.graph.num_edges(), 2);
        assert_eq!((g.self_loops_dropped, g.duplicates_dropped), (1, 1));
        assert!(parse_gml("graph [ edge [ source 1 target 2 ] ]").is_err());
    }
}
