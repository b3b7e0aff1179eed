//! Line oriented text formats for diagrams, lattices, scenarios and
//! certificates.
//!
//! Every format starts with a `<kind> v1` header and has one record per
//! line. Blank lines and lines starting with `#` are ignored. Rationals
//! must be written canonically (`3/2`, `-1`, never `6/4` or `+1`).

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::affine::{IMat2, LatVec, Point};
use crate::diagram::{BaseDiagram, ConvexRegion, EdgeMark, Node};
use crate::homology::{LatticeModel, MarkedClass};
use crate::pipeline::Scenario;
use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("line {line}, field {field}: {message}")]
pub struct ParseError {
    /// 1-based line number, 0 for errors about the input as a whole.
    pub line: usize,
    pub field: String,
    pub message: String,
}

fn perr(line: usize, field: &str, message: impl Into<String>) -> ParseError {
    ParseError {
        line,
        field: field.to_string(),
        message: message.into(),
    }
}

/// Meaningful lines with their 1-based numbers and whitespace split tokens.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(k, l)| {
        let l = l.trim();
        if l.is_empty() || l.starts_with('#') {
            None
        } else {
            Some((k + 1, l.split_whitespace().collect()))
        }
    })
}

fn arity(line: usize, toks: &[&str], n: usize) -> Result<(), ParseError> {
    if toks.len() != n {
        return Err(perr(
            line,
            toks[0],
            format!("expected {} values, found {}", n - 1, toks.len() - 1),
        ));
    }
    Ok(())
}

fn parse_rat(line: usize, field: &str, s: &str) -> Result<Rat, ParseError> {
    Rat::from_str(s).map_err(|e| perr(line, field, e.to_string()))
}

fn parse_int<T: FromStr>(line: usize, field: &str, s: &str) -> Result<T, ParseError> {
    // Reject `+1` and leading zeros like the rational parser does.
    let body = s.strip_prefix('-').unwrap_or(s);
    if body.starts_with('+') || (body.len() > 1 && body.starts_with('0')) || s == "-0" {
        return Err(perr(line, field, format!("malformed integer {s:?}")));
    }
    s.parse()
        .map_err(|_| perr(line, field, format!("malformed integer {s:?}")))
}

fn parse_flag(line: usize, field: &str, s: &str) -> Result<bool, ParseError> {
    match s {
        "0" => Ok(false),
        "1" => Ok(true),
        _ => Err(perr(line, field, format!("expected 0 or 1, found {s:?}"))),
    }
}

fn header(it: &mut dyn Iterator<Item = (usize, Vec<&str>)>, kind: &str) -> Result<(), ParseError> {
    match it.next() {
        Some((line, toks)) => {
            if toks.first() != Some(&kind) {
                return Err(perr(line, "header", format!("expected `{kind} v1`")));
            }
            if toks.len() != 2 || toks[1] != "v1" {
                return Err(perr(line, "header", "unsupported format version"));
            }
            Ok(())
        }
        None => Err(perr(0, "header", "empty input")),
    }
}

pub fn write_diagram(d: &BaseDiagram) -> String {
    let mut out = String::from("diagram v1\n");
    write_diagram_body(d, &mut out);
    out
}

fn write_diagram_body(d: &BaseDiagram, out: &mut String) {
    for p in &d.vertices {
        out.push_str(&format!("vertex {} {}\n", p.x, p.y));
    }
    for (j, m) in d.edge_marks.iter().enumerate() {
        out.push_str(&format!("edge {j} {}\n", m.token()));
    }
    for node in &d.nodes {
        let [[a, b], [c, e]] = node.monodromy.0;
        out.push_str(&format!(
            "node {} {} {} {} {a} {b} {c} {e} {} {}\n",
            node.position.x,
            node.position.y,
            node.eigen_direction.x,
            node.eigen_direction.y,
            node.cut_targets.0,
            node.cut_targets.1
        ));
    }
}

#[derive(Default)]
struct DiagramBuilder {
    vertices: Vec<Point>,
    marks: BTreeMap<usize, (usize, EdgeMark)>,
    nodes: Vec<Node>,
}

impl DiagramBuilder {
    /// Consumes a diagram record; `false` if the keyword is not one.
    fn record(&mut self, line: usize, toks: &[&str]) -> Result<bool, ParseError> {
        match toks[0] {
            "vertex" => {
                arity(line, toks, 3)?;
                self.vertices.push(Point::new(
                    parse_rat(line, "vertex.x", toks[1])?,
                    parse_rat(line, "vertex.y", toks[2])?,
                ));
            }
            "edge" => {
                arity(line, toks, 3)?;
                let j: usize = parse_int(line, "edge.index", toks[1])?;
                let mark = EdgeMark::from_token(toks[2]).ok_or_else(|| {
                    perr(line, "edge.mark", format!("unknown mark {:?}", toks[2]))
                })?;
                if self.marks.insert(j, (line, mark)).is_some() {
                    return Err(perr(line, "edge.index", format!("edge {j} given twice")));
                }
            }
            "node" => {
                arity(line, toks, 11)?;
                let ints = (3..11)
                    .map(|k| parse_int::<i64>(line, "node", toks[k]))
                    .collect::<Result<Vec<_>, _>>()?;
                let target = |k: usize, f: &str| parse_int::<usize>(line, f, toks[k]);
                self.nodes.push(Node {
                    position: Point::new(
                        parse_rat(line, "node.x", toks[1])?,
                        parse_rat(line, "node.y", toks[2])?,
                    ),
                    eigen_direction: LatVec::new(ints[0], ints[1]),
                    monodromy: IMat2::new(ints[2], ints[3], ints[4], ints[5]),
                    cut_targets: (target(9, "node.t1")?, target(10, "node.t2")?),
                });
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn finish(self) -> Result<BaseDiagram, ParseError> {
        let n = self.vertices.len();
        let mut marks = Vec::with_capacity(n);
        for (k, (j, (line, m))) in self.marks.iter().enumerate() {
            if *j != k || *j >= n {
                return Err(perr(
                    *line,
                    "edge.index",
                    format!("edge index {j} out of sequence"),
                ));
            }
            marks.push(*m);
        }
        if marks.len() != n {
            return Err(perr(
                0,
                "edge",
                format!("{} edge marks for {n} vertices", marks.len()),
            ));
        }
        Ok(BaseDiagram::new(self.vertices, marks, self.nodes))
    }
}

pub fn parse_diagram(text: &str) -> Result<BaseDiagram, ParseError> {
    let mut it = records(text);
    header(&mut it, "diagram")?;
    let mut b = DiagramBuilder::default();
    for (line, toks) in it {
        if !b.record(line, &toks)? {
            return Err(perr(line, toks[0], "unknown record"));
        }
    }
    b.finish()
}

fn join<T: ToString>(v: &[T]) -> String {
    v.iter().map(T::to_string).collect::<Vec<_>>().join(" ")
}

pub fn write_lattice(m: &LatticeModel) -> String {
    let mut out = String::from("lattice v1\n");
    out.push_str(&format!("rank {}\n", m.rank()));
    for row in &m.gram {
        out.push_str(&format!("gram {}\n", join(row)));
    }
    for d in &m.divisor_classes {
        out.push_str(&format!("divisor {} {}\n", d.label, join(&d.coords)));
    }
    for e in &m.exceptional_classes {
        out.push_str(&format!("exceptional {} {}\n", e.label, join(&e.coords)));
    }
    out.push_str(&format!("omega {}\n", join(&m.omega)));
    out.push_str(&format!("c1 {}\n", join(&m.c1)));
    out.push_str(&format!(
        "flag noncompatible_completion {}\n",
        u8::from(m.noncompatible_completion)
    ));
    out
}

pub fn parse_lattice(text: &str) -> Result<LatticeModel, ParseError> {
    let mut it = records(text);
    header(&mut it, "lattice")?;
    let mut rank: Option<usize> = None;
    let mut gram = Vec::new();
    let mut divisors = Vec::new();
    let mut exceptionals = Vec::new();
    let mut omega = None;
    let mut c1 = None;
    let mut flag = None;
    for (line, toks) in it {
        let key = toks[0];
        if key != "rank" && rank.is_none() {
            return Err(perr(line, key, "rank must come first"));
        }
        let r = rank.unwrap_or(0);
        let ints = |from: usize, field: &str| {
            toks[from..]
                .iter()
                .map(|s| parse_int::<i64>(line, field, s))
                .collect::<Result<Vec<_>, _>>()
        };
        match key {
            "rank" => {
                arity(line, &toks, 2)?;
                if rank.is_some() {
                    return Err(perr(line, "rank", "rank given twice"));
                }
                rank = Some(parse_int(line, "rank", toks[1])?);
            }
            "gram" => {
                arity(line, &toks, r + 1)?;
                gram.push(ints(1, "gram")?);
            }
            "divisor" | "exceptional" => {
                arity(line, &toks, r + 2)?;
                let class = MarkedClass::new(toks[1], ints(2, key)?);
                if key == "divisor" {
                    divisors.push(class);
                } else {
                    exceptionals.push(class);
                }
            }
            "omega" => {
                arity(line, &toks, r + 1)?;
                omega = Some(
                    toks[1..]
                        .iter()
                        .map(|s| parse_rat(line, "omega", s))
                        .collect::<Result<Vec<_>, _>>()?,
                );
            }
            "c1" => {
                arity(line, &toks, r + 1)?;
                c1 = Some(ints(1, "c1")?);
            }
            "flag" => {
                arity(line, &toks, 3)?;
                if toks[1] != "noncompatible_completion" {
                    return Err(perr(line, "flag", format!("unknown flag {:?}", toks[1])));
                }
                flag = Some(parse_flag(line, "flag", toks[2])?);
            }
            _ => return Err(perr(line, key, "unknown record")),
        }
    }
    let r = rank.ok_or_else(|| perr(0, "rank", "missing"))?;
    if gram.len() != r {
        return Err(perr(
            0,
            "gram",
            format!("expected {r} rows, found {}", gram.len()),
        ));
    }
    Ok(LatticeModel {
        gram,
        divisor_classes: divisors,
        exceptional_classes: exceptionals,
        omega: omega.ok_or_else(|| perr(0, "omega", "missing"))?,
        c1: c1.ok_or_else(|| perr(0, "c1", "missing"))?,
        noncompatible_completion: flag.unwrap_or(false),
    })
}

pub fn write_scenario(s: &Scenario) -> String {
    let mut out = String::from("scenario v1\ndiagram v1\n");
    write_diagram_body(&s.diagram, &mut out);
    out.push_str("region\n");
    for p in &s.region.vertices {
        out.push_str(&format!("vertex {} {}\n", p.x, p.y));
    }
    out.push_str(&format!("designated {}\n", s.region.designated_edge));
    out.push_str(&format!("edge {}\n", s.edge_index));
    out.push_str(&format!("capacity {}\n", s.capacity));
    out.push_str(&format!("offset {}\n", s.offset));
    out.push_str(&format!("margin {}\n", s.margin));
    out.push_str(&format!("compatible {}\n", u8::from(s.compatible)));
    out
}

pub fn parse_scenario(text: &str) -> Result<Scenario, ParseError> {
    let mut it = records(text);
    header(&mut it, "scenario")?;
    header(&mut it, "diagram")?;
    let mut b = DiagramBuilder::default();
    let mut in_region = false;
    let mut region = Vec::new();
    let mut designated = None;
    let mut edge = None;
    let mut capacity = None;
    let mut offset = None;
    let mut margin = None;
    let mut compatible = None;
    for (line, toks) in it {
        let key = toks[0];
        if !in_region {
            if key == "region" {
                arity(line, &toks, 1)?;
                in_region = true;
            } else if !b.record(line, &toks)? {
                return Err(perr(line, key, "unknown record in diagram block"));
            }
            continue;
        }
        let once = |slot: bool| {
            if slot {
                Err(perr(line, key, "given twice"))
            } else {
                Ok(())
            }
        };
        match key {
            "vertex" => {
                arity(line, &toks, 3)?;
                region.push(Point::new(
                    parse_rat(line, "region.x", toks[1])?,
                    parse_rat(line, "region.y", toks[2])?,
                ));
            }
            "designated" => {
                arity(line, &toks, 2)?;
                once(designated.is_some())?;
                designated = Some(parse_int::<usize>(line, key, toks[1])?);
            }
            "edge" => {
                arity(line, &toks, 2)?;
                once(edge.is_some())?;
                edge = Some(parse_int::<usize>(line, key, toks[1])?);
            }
            "capacity" | "offset" | "margin" => {
                arity(line, &toks, 2)?;
                let v = parse_rat(line, key, toks[1])?;
                let slot = match key {
                    "capacity" => &mut capacity,
                    "offset" => &mut offset,
                    _ => &mut margin,
                };
                once(slot.is_some())?;
                *slot = Some(v);
            }
            "compatible" => {
                arity(line, &toks, 2)?;
                once(compatible.is_some())?;
                compatible = Some(parse_flag(line, key, toks[1])?);
            }
            _ => return Err(perr(line, key, "unknown record in region block")),
        }
    }
    if !in_region {
        return Err(perr(0, "region", "missing"));
    }
    let missing = |f: &str| perr(0, f, "missing");
    Ok(Scenario {
        diagram: b.finish()?,
        region: ConvexRegion::new(region, designated.ok_or_else(|| missing("designated"))?),
        edge_index: edge.ok_or_else(|| missing("edge"))?,
        capacity: capacity.ok_or_else(|| missing("capacity"))?,
        offset: offset.ok_or_else(|| missing("offset"))?,
        margin: margin.ok_or_else(|| missing("margin"))?,
        compatible: compatible.ok_or_else(|| missing("compatible"))?,
    })
}

/// Parses `key value` lines of a certificate, checking the trailing
/// digest against the rest of the text.
pub fn parse_certificate_fields(text: &str) -> Result<BTreeMap<String, String>, ParseError> {
    let mut it = records(text);
    header(&mut it, "certificate")?;
    let mut fields = BTreeMap::new();
    let mut digest = None;
    for (line, toks) in it {
        if toks.len() < 2 {
            return Err(perr(line, toks[0], "missing value"));
        }
        if toks[0] == "digest" {
            digest = Some((line, toks[1].to_string()));
            continue;
        }
        if digest.is_some() {
            return Err(perr(line, toks[0], "record after digest"));
        }
        if fields
            .insert(toks[0].to_string(), toks[1..].join(" "))
            .is_some()
        {
            return Err(perr(line, toks[0], "given twice"));
        }
    }
    let (line, digest) = digest.ok_or_else(|| perr(0, "digest", "missing"))?;
    let mut body = String::from("certificate v1\n");
    for (k, v) in &fields {
        body.push_str(&format!("{k} {v}\n"));
    }
    if crate::torelli::sha256_hex(&body) != digest {
        return Err(perr(
            line,
            "digest",
            "digest does not match certificate body",
        ));
    }
    Ok(fields)
}
