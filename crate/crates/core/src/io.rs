//! Text formats for graphs.
//!
//! Two formats are supported:
//!
//! * **Edge list** — one edge per line, `src_id dst_id weight`, with the
//!   weight optional (default 1.0) and `#` starting a comment. Node ids
//!   are arbitrary whitespace-free tokens and are mapped to dense indices
//!   in first-seen order. Isolated nodes cannot be expressed.
//! * **Pajek subset** — `*Vertices N` followed by optional vertex lines
//!   `idx "label"` (1-based, with an optional trailing integer class),
//!   then `*Edges` with `i j [w]` lines. `%` starts a comment. Anything
//!   outside this subset is rejected with a parse error naming the line.
//!   This is the only format that can carry per-node class labels and
//!   isolated nodes.
//!
//! Writing uses the shortest-roundtrip float formatting, so a written
//! graph reparses to bit-identical weights and identical bytes per run.

use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}

/// Parses the edge-list format. Later duplicate edges overwrite earlier
/// ones; the graph is validated (symmetry is automatic, self-loops are
/// not).
pub fn parse_edge_list<F: Scalar>(text: &str) -> Result<Graph<F>> {
    let mut ids: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut edges: Vec<(usize, usize, f64)> = Vec::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut tok = line.split_whitespace();
        let src = tok.next().expect("nonempty line has a token");
        let dst = tok
            .next()
            .ok_or_else(|| parse_err(lineno + 1, "expected `src dst [weight]`"))?;
        let weight = match tok.next() {
            Some(w) => w.parse::<f64>().map_err(|_| {
                parse_err(lineno + 1, format!("weight `{w}` is not a number"))
            })?,
            None => 1.0,
        };
        if let Some(extra) = tok.next() {
            return Err(parse_err(
                lineno + 1,
                format!("unexpected trailing token `{extra}`"),
            ));
        }
        let mut intern = |id: &str| -> usize {
            *index.entry(id.to_string()).or_insert_with(|| {
                ids.push(id.to_string());
                ids.len() - 1
            })
        };
        let i = intern(src);
        let j = intern(dst);
        edges.push((i, j, weight));
    }

    let n = ids.len();
    let mut w = Array2::zeros((n, n));
    for (i, j, weight) in edges {
        let fw = F::cast(weight);
        w[[i, j]] = fw;
        w[[j, i]] = fw;
    }
    Graph::with_ids(w, ids)
}

/// Reads an edge-list file.
pub fn read_edge_list<F: Scalar>(path: impl AsRef<Path>) -> Result<Graph<F>> {
    let text = fs::read_to_string(path)?;
    parse_edge_list(&text)
}

/// Writes the edge-list format: one `src dst weight` line per positive
/// edge, `i < j` order, node ids as stored. Isolated nodes are dropped by
/// the format; a round-trip preserves everything else exactly.
pub fn write_edge_list<F: Scalar, W: Write>(graph: &Graph<F>, mut out: W) -> Result<()> {
    let ids = graph.node_ids();
    for (i, j, w) in graph.edges() {
        writeln!(out, "{} {} {}", ids[i], ids[j], w)?;
    }
    Ok(())
}

/// Writes an edge-list file.
pub fn write_edge_list_file<F: Scalar>(graph: &Graph<F>, path: impl AsRef<Path>) -> Result<()> {
    let mut buf = Vec::new();
    write_edge_list(graph, &mut buf)?;
    fs::write(path, buf)?;
    Ok(())
}

/// Parses the Pajek subset. Vertex labels become node ids (default: the
/// 1-based index as text); trailing integer classes, when present, must
/// be present on *every* vertex line and become the node labels.
pub fn parse_pajek<F: Scalar>(text: &str) -> Result<Graph<F>> {
    #[derive(PartialEq)]
    enum Section {
        Preamble,
        Vertices,
        Edges,
    }

    let mut section = Section::Preamble;
    let mut n: usize = 0;
    let mut ids: Vec<String> = Vec::new();
    let mut classes: Vec<Option<i64>> = Vec::new();
    let mut weights: Option<Array2<F>> = None;

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('%').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let lineno = lineno + 1;

        if let Some(rest) = line.strip_prefix('*') {
            let mut tok = rest.split_whitespace();
            let header_raw = tok.next().unwrap_or("");
            let header = header_raw.to_ascii_lowercase();
            match header.as_str() {
                "vertices" => {
                    if section != Section::Preamble {
                        return Err(parse_err(lineno, "duplicate *Vertices section"));
                    }
                    let count = tok
                        .next()
                        .ok_or_else(|| parse_err(lineno, "*Vertices needs a count"))?;
                    n = count.parse().map_err(|_| {
                        parse_err(lineno, format!("vertex count `{count}` is not a number"))
                    })?;
                    ids = (1..=n).map(|i| i.to_string()).collect();
                    classes = vec![None; n];
                    section = Section::Vertices;
                }
                "edges" => {
                    if section == Section::Preamble {
                        return Err(parse_err(lineno, "*Edges before *Vertices"));
                    }
                    if weights.is_some() {
                        return Err(parse_err(lineno, "duplicate *Edges section"));
                    }
                    weights = Some(Array2::zeros((n, n)));
                    section = Section::Edges;
                }
                _ => {
                    return Err(parse_err(
                        lineno,
                        format!("unsupported section `*{header_raw}` (only *Vertices and *Edges)"),
                    ));
                }
            }
            continue;
        }

        match section {
            Section::Preamble => {
                return Err(parse_err(lineno, "expected *Vertices header"));
            }
            Section::Vertices => {
                let (idx_tok, rest) = match line.find(char::is_whitespace) {
                    Some(pos) => (&line[..pos], line[pos..].trim()),
                    None => (line, ""),
                };
                let idx: usize = idx_tok.parse().map_err(|_| {
                    parse_err(lineno, format!("vertex index `{idx_tok}` is not a number"))
                })?;
                if idx == 0 || idx > n {
                    return Err(parse_err(
                        lineno,
                        format!("vertex index {idx} outside 1..={n}"),
                    ));
                }
                let mut tail = rest;
                if !tail.is_empty() {
                    if let Some(stripped) = tail.strip_prefix('"') {
                        let end = stripped.find('"').ok_or_else(|| {
                            parse_err(lineno, "unterminated quoted label")
                        })?;
                        ids[idx - 1] = stripped[..end].to_string();
                        tail = stripped[end + 1..].trim();
                    } else {
                        return Err(parse_err(
                            lineno,
                            "vertex label must be quoted (`idx \"label\" [class]`)",
                        ));
                    }
                }
                if !tail.is_empty() {
                    let class: i64 = tail.parse().map_err(|_| {
                        parse_err(lineno, format!("class `{tail}` is not an integer"))
                    })?;
                    classes[idx - 1] = Some(class);
                }
            }
            Section::Edges => {
                let mut tok = line.split_whitespace();
                let parse_idx = |t: Option<&str>| -> Result<usize> {
                    let t = t.ok_or_else(|| parse_err(lineno, "expected `i j [w]`"))?;
                    let v: usize = t.parse().map_err(|_| {
                        parse_err(lineno, format!("edge endpoint `{t}` is not a number"))
                    })?;
                    if v == 0 || v > n {
                        return Err(parse_err(
                            lineno,
                            format!("edge endpoint {v} outside 1..={n}"),
                        ));
                    }
                    Ok(v)
                };
                let i = parse_idx(tok.next())?;
                let j = parse_idx(tok.next())?;
                let weight = match tok.next() {
                    Some(t) => t.parse::<f64>().map_err(|_| {
                        parse_err(lineno, format!("weight `{t}` is not a number"))
                    })?,
                    None => 1.0,
                };
                if let Some(extra) = tok.next() {
                    return Err(parse_err(
                        lineno,
                        format!("unexpected trailing token `{extra}`"),
                    ));
                }
                let w = weights.as_mut().expect("section == Edges implies matrix");
                let fw = F::cast(weight);
                w[[i - 1, j - 1]] = fw;
                w[[j - 1, i - 1]] = fw;
            }
        }
    }

    let weights = match weights {
        Some(w) => w,
        None if section == Section::Vertices => Array2::zeros((n, n)),
        _ => return Err(parse_err(0, "file has no *Vertices section")),
    };

    let labeled = classes.iter().filter(|c| c.is_some()).count();
    let graph = Graph::with_ids(weights, ids)?;
    if labeled == 0 {
        Ok(graph)
    } else if labeled == n {
        graph.with_labels(classes.into_iter().map(|c| c.unwrap()).collect())
    } else {
        Err(parse_err(
            0,
            format!("{labeled} of {n} vertices carry a class label; need all or none"),
        ))
    }
}

/// Reads a Pajek-subset file.
pub fn read_pajek<F: Scalar>(path: impl AsRef<Path>) -> Result<Graph<F>> {
    let text = fs::read_to_string(path)?;
    parse_pajek(&text)
}

/// Reads a graph by sniffing the format: files whose first meaningful
/// line starts with `*` are Pajek, everything else is an edge list.
pub fn read_graph<F: Scalar>(path: impl AsRef<Path>) -> Result<Graph<F>> {
    let text = fs::read_to_string(path)?;
    let first = text
        .lines()
        .map(|l| l.split(['#', '%']).next().unwrap_or("").trim())
        .find(|l| !l.is_empty());
    match first {
        Some(l) if l.starts_with('*') => parse_pajek(&text),
        _ => parse_edge_list(&text),
    }
}
