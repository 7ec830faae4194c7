//! Text formats: edge lists (`n m` header, then `u v` per line), graph6,
//! colourings (edge list with an `R`/`B` third column) and JSON vertex maps.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use crate::error::{invalid, Error, Result};
use crate::generators::{make_named, NamedGraph};
use crate::graph::{Color, EdgeColoring, Graph};
use crate::morphisms::VertexMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    EdgeList,
    Graph6,
    Coloring,
    JsonMap,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edgelist" | "edge-list" => Ok(Format::EdgeList),
            "graph6" | "g6" => Ok(Format::Graph6),
            "coloring" | "colouring" => Ok(Format::Coloring),
            "json-map" | "json" => Ok(Format::JsonMap),
            _ => invalid(format!("unknown format {s:?}")),
        }
    }
}

fn perr<T>(line: usize, column: usize, message: impl Into<String>) -> Result<T> {
    Err(Error::Parse { line, column, message: message.into() })
}

/// Whitespace-separated tokens of one line with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, ch) in line.char_indices().chain(std::iter::once((line.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (true, Some(s)) => {
                out.push((line[..s].chars().count() + 1, &line[s..i]));
                start = None;
            }
            (false, None) => start = Some(i),
            _ => {}
        }
    }
    out
}

fn number(line: usize, (col, tok): (usize, &str), what: &str) -> Result<usize> {
    tok.parse::<usize>().or_else(|_| perr(line, col, format!("expected {what}, found {tok:?}")))
}

/// Non-blank, non-comment lines with their 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().map(|(i, l)| (i + 1, l)).filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
}

/// `(u, v, third field as (line, column, token))`
type EdgeRow<'a> = (usize, usize, Option<(usize, usize, &'a str)>);

fn parse_rows(text: &str, extra: bool) -> Result<(usize, Vec<EdgeRow<'_>>)> {
    let mut lines = content_lines(text);
    let Some((hl, header)) = lines.next() else {
        return perr(1, 1, "missing \"n m\" header");
    };
    let ht = tokens(header);
    if ht.len() != 2 {
        return perr(hl, ht.get(2).map_or(1, |t| t.0), "header must be \"n m\"");
    }
    let n = number(hl, ht[0], "vertex count")?;
    let m = number(hl, ht[1], "edge count")?;
    let width = if extra { 3 } else { 2 };
    let mut rows = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::new();
    for (ln, line) in lines {
        let t = tokens(line);
        if t.len() < width {
            return perr(ln, line.len() + 1, format!("expected {width} fields, found {}", t.len()));
        }
        if t.len() > width {
            return perr(ln, t[width].0, "unexpected trailing field");
        }
        let u = number(ln, t[0], "vertex id")?;
        let v = number(ln, t[1], "vertex id")?;
        for (x, tok) in [(u, t[0]), (v, t[1])] {
            if x >= n {
                return perr(ln, tok.0, format!("vertex {x} out of range for n = {n}"));
            }
        }
        if u == v {
            return perr(ln, t[1].0, "loops are not allowed");
        }
        if !seen.insert((u.min(v), u.max(v))) {
            return perr(ln, t[0].0, format!("duplicate edge {{{u}, {v}}}"));
        }
        rows.push((u, v, extra.then(|| (ln, t[2].0, t[2].1))));
    }
    if rows.len() != m {
        return perr(hl, ht[1].0, format!("header announces {m} edges, found {}", rows.len()));
    }
    Ok((n, rows))
}

pub fn parse_edgelist(text: &str) -> Result<Graph> {
    let (n, rows) = parse_rows(text, false)?;
    Graph::from_edges(n, rows.into_iter().map(|(u, v, _)| (u, v)))
}

pub fn write_edgelist(g: &Graph) -> String {
    let edges = g.edges();
    let mut out = format!("{} {}\n", g.n(), edges.len());
    for (u, v) in edges {
        writeln!(out, "{u} {v}").unwrap();
    }
    out
}

pub fn parse_coloring(text: &str) -> Result<EdgeColoring> {
    let (n, rows) = parse_rows(text, true)?;
    let mut host = Graph::empty(n);
    let mut red = Vec::new();
    for (u, v, c) in rows {
        let (line, col, tok) = c.expect("three columns");
        match tok {
            "R" | "r" => red.push((u, v)),
            "B" | "b" => {}
            other => return perr(line, col, format!("colour must be R or B, found {other:?}")),
        }
        host.add_edge(u, v)?;
    }
    EdgeColoring::with_red_edges(host, red)
}

pub fn write_coloring(c: &EdgeColoring) -> String {
    let edges = c.host().edges();
    let mut out = format!("{} {}\n", c.n(), edges.len());
    for (u, v) in edges {
        let col = c.color(u, v).expect("host edge");
        writeln!(out, "{u} {v} {}", col.letter()).unwrap();
    }
    out
}

pub fn encode_graph6(g: &Graph) -> Result<String> {
    let n = g.n();
    let mut bytes: Vec<u8> = Vec::new();
    if n < 63 {
        bytes.push(n as u8 + 63);
    } else if n < 258_048 {
        bytes.push(126);
        for shift in [12, 6, 0] {
            bytes.push(((n >> shift) & 63) as u8 + 63);
        }
    } else {
        return invalid(format!("graph6 supports at most 258047 vertices, got {n}"));
    }
    let mut acc = 0u8;
    let mut filled = 0;
    for v in 1..n {
        for u in 0..v {
            acc = (acc << 1) | g.has_edge(u, v) as u8;
            filled += 1;
            if filled == 6 {
                bytes.push(acc + 63);
                acc = 0;
                filled = 0;
            }
        }
    }
    if filled > 0 {
        bytes.push((acc << (6 - filled)) + 63);
    }
    Ok(String::from_utf8(bytes).expect("printable ascii"))
}

pub fn decode_graph6(text: &str) -> Result<Graph> {
    let s = text.trim();
    let s = s.strip_prefix(">>graph6<<").unwrap_or(s);
    let bytes = s.as_bytes();
    if let Some(i) = bytes.iter().position(|b| !(63..=126).contains(b)) {
        return perr(1, i + 1, format!("byte {:#04x} outside the graph6 range", bytes[i]));
    }
    let val = |i: usize| -> Result<usize> {
        bytes.get(i).map(|&b| (b - 63) as usize).ok_or(Error::Parse { line: 1, column: i + 1, message: "truncated graph6 string".into() })
    };
    let (n, mut pos) = if bytes.first() == Some(&126) {
        if bytes.get(1) == Some(&126) {
            return perr(1, 2, "graphs with more than 258047 vertices are not supported");
        }
        ((val(1)? << 12) | (val(2)? << 6) | val(3)?, 4)
    } else {
        (val(0)?, 1)
    };
    let pairs = n * n.saturating_sub(1) / 2;
    let need = pairs.div_ceil(6);
    if bytes.len() != pos + need {
        return perr(1, bytes.len().min(pos + need) + 1, format!("expected {need} edge bytes for n = {n}, found {}", bytes.len() - pos));
    }
    let mut g = Graph::empty(n);
    let mut bit = 0;
    let mut cur = 0;
    for v in 1..n {
        for u in 0..v {
            if bit == 0 {
                cur = val(pos)?;
                pos += 1;
            }
            if (cur >> (5 - bit)) & 1 == 1 {
                g.add_edge(u, v)?;
            }
            bit = (bit + 1) % 6;
        }
    }
    if bit != 0 && cur & ((1 << (6 - bit)) - 1) != 0 {
        return perr(1, pos, "nonzero padding bits");
    }
    Ok(g)
}

pub fn write_map(f: &VertexMap) -> String {
    serde_json::to_string(f).expect("vertex maps serialize")
}

pub fn parse_map(text: &str) -> Result<VertexMap> {
    let raw: VertexMap =
        serde_json::from_str(text).map_err(|e| Error::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
    VertexMap::new(raw.image().to_vec(), raw.target_n())
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::Config { path: path.display().to_string(), message: e.to_string() })
}

fn with_path<T>(path: &Path, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::Parse { line, column, message } => Error::Parse { line, column, message: format!("{}: {message}", path.display()) },
        other => other,
    })
}

/// Reads a graph, as graph6 when the extension is `.g6`, else as an edge list.
pub fn read_graph(path: &Path) -> Result<Graph> {
    let text = read(path)?;
    let parsed = match path.extension().and_then(|e| e.to_str()) {
        Some("g6") => decode_graph6(&text),
        _ => parse_edgelist(&text),
    };
    with_path(path, parsed)
}

pub fn write_graph(path: &Path, g: &Graph) -> Result<()> {
    let text = match path.extension().and_then(|e| e.to_str()) {
        Some("g6") => encode_graph6(g)? + "\n",
        _ => write_edgelist(g),
    };
    std::fs::write(path, text)?;
    Ok(())
}

pub fn read_coloring(path: &Path) -> Result<EdgeColoring> {
    let text = read(path)?;
    with_path(path, parse_coloring(&text))
}

pub fn read_map(path: &Path) -> Result<VertexMap> {
    let text = read(path)?;
    with_path(path, parse_map(&text))
}

/// A graph given either as a file path or as a generator spec such as
/// `cycle:5`. Existing files win.
pub fn resolve_graph(spec: &str) -> Result<Graph> {
    let path = Path::new(spec);
    if path.is_file() {
        return read_graph(path);
    }
    match spec.parse::<NamedGraph>() {
        Ok(named) => make_named(&named),
        Err(e) => invalid(format!("{spec:?} is neither a readable file nor a generator spec ({e})")),
    }
}

/// Colour letters as written by [`write_coloring`].
pub fn parse_color(s: &str) -> Result<Color> {
    match s {
        "R" | "r" | "red" => Ok(Color::Red),
        "B" | "b" | "blue" => Ok(Color::Blue),
        _ => invalid(format!("unknown colour {s:?}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k4_edgelist_round_trip() {
        let k4 = Graph::complete(4);
        let text = write_edgelist(&k4);
        assert!(text.starts_with("4 6\n0 1\n"));
        assert_eq!(parse_edgelist(&text).unwrap(), k4);
    }

    #[test]
    fn malformed_line_reports_position() {
        match parse_edgelist("3 1\n1 x\n") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("unexpected {other:?}"),
        }
        match parse_edgelist("3 2\n0 1\n") {
            Err(Error::Parse { line: 1, column: 3, .. }) => {}
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_edgelist("3 1\n0 5\n"), Err(Error::Parse { line: 2, column: 3, .. })));
        assert!(matches!(parse_edgelist("3 1\n1 1\n"), Err(Error::Parse { .. })));
    }

    #[test]
    fn graph6_known_strings() {
        // nauty's encodings of K_4 and the 5-cycle 0-1-2-3-4-0
        assert_eq!(encode_graph6(&Graph::complete(4)).unwrap(), "C~");
        let c5 = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        assert_eq!(encode_graph6(&c5).unwrap(), "Dhc");
        assert_eq!(decode_graph6("Dhc").unwrap(), c5);
        assert_eq!(decode_graph6("?").unwrap(), Graph::empty(0));
        let big = Graph::complete(70);
        assert_eq!(decode_graph6(&encode_graph6(&big).unwrap()).unwrap(), big);
        assert!(decode_graph6("C").is_err());
    }

    #[test]
    fn coloring_round_trip() {
        let c = EdgeColoring::from_fn(Graph::complete(5), |u, v| if (u + v) % 2 == 0 { Color::Red } else { Color::Blue });
        let back = parse_coloring(&write_coloring(&c)).unwrap();
        for (u, v) in c.host().edges() {
            assert_eq!(back.color(u, v), c.color(u, v));
        }
        assert!(matches!(parse_coloring("2 1\n0 1 G\n"), Err(Error::Parse { line: 2, column: 5, .. })));
    }

    #[test]
    fn map_round_trip() {
        let f = VertexMap::new(vec![2, 0, 1, 1], 3).unwrap();
        assert_eq!(parse_map(&write_map(&f)).unwrap(), f);
        assert!(parse_map(r#"{"target_n":2,"image":[0,5]}"#).is_err());
    }

    #[test]
    fn resolve_named_and_file() {
        assert_eq!(resolve_graph("complete:3").unwrap(), Graph::complete(3));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("g.g6");
        write_graph(&p, &Graph::complete(5)).unwrap();
        assert_eq!(resolve_graph(p.to_str().unwrap()).unwrap(), Graph::complete(5));
        assert!(resolve_graph("nonsense:1").is_err());
    }
}
