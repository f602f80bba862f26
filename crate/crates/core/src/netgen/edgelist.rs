//! Edge-list text format:
//!
//! ```text
//! # n=5 group=1,3
//! 0 1
//! 1 2
//! ```
//!
//! Other lines starting with `#` are comments. Edges are written once with
//! `u < v` in lexicographic order, so writing is canonical.

use std::io::{BufRead, Write};

use super::{Graph, NetgenError};

pub fn write_edge_list<W: Write>(graph: &Graph, mut out: W) -> std::io::Result<()> {
    let group: Vec<String> = graph.group_members().iter().map(|m| m.to_string()).collect();
    writeln!(out, "# n={} group={}", graph.node_count(), group.join(","))?;
    for (u, v) in graph.edges() {
        writeln!(out, "{u} {v}")?;
    }
    Ok(())
}

pub fn read_edge_list<R: BufRead>(input: R) -> Result<Graph, NetgenError> {
    let mut header: Option<(usize, Vec<usize>)> = None;
    let mut edges = Vec::new();

    for (idx, line) in input.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(rest) = trimmed.strip_prefix('#') {
            let rest = rest.trim();
            if rest.starts_with("n=") {
                if header.is_some() {
                    return Err(parse_err(lineno, "duplicate header"));
                }
                header = Some(parse_header(rest).map_err(|m| parse_err(lineno, &m))?);
            }
            continue;
        }
        let mut fields = trimmed.split_whitespace();
        let (Some(u), Some(v), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(parse_err(lineno, "expected two node ids"));
        };
        let u: usize = u.parse().map_err(|_| parse_err(lineno, "bad node id"))?;
        let v: usize = v.parse().map_err(|_| parse_err(lineno, "bad node id"))?;
        if u == v {
            return Err(parse_err(lineno, "self-loop"));
        }
        edges.push((u, v, lineno));
    }

    let (n, group) = header.ok_or_else(|| parse_err(0, "missing '# n=<n> group=<ids>' header"))?;
    if let Some(&(u, v, line)) = edges.iter().find(|(u, v, _)| *u >= n || *v >= n) {
        return Err(parse_err(line, &format!("edge {u} {v} outside 0..{n}")));
    }
    let mut graph = Graph::from_edges(n, edges.into_iter().map(|(u, v, _)| (u, v)))?;
    graph.set_group(group)?;
    Ok(graph)
}

fn parse_header(rest: &str) -> Result<(usize, Vec<usize>), String> {
    let mut n = None;
    let mut group = Vec::new();
    for part in rest.split_whitespace() {
        if let Some(v) = part.strip_prefix("n=") {
            n = Some(v.parse::<usize>().map_err(|_| format!("bad node count '{v}'"))?);
        } else if let Some(v) = part.strip_prefix("group=") {
            for id in v.split(',').filter(|s| !s.is_empty()) {
                group.push(id.parse::<usize>().map_err(|_| format!("bad group id '{id}'"))?);
            }
        }
    }
    Ok((n.ok_or("header lacks n=")?, group))
}

fn parse_err(line: usize, message: &str) -> NetgenError {
    NetgenError::Parse {
        line,
        message: message.to_string(),
    }
}
