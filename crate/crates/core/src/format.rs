//! Text formats.
//!
//! ```text
//! qtable v1 order=<s> arity=<m>        s^m values in index order
//! mdscode v1 order=<s> length=<m+1>    one graph tuple per line
//! dtree v1 order=<s> arity=<N>         a decomposition tree
//! theorem1 v1 k=<k> kept=.. fixed=.. groupmap=..   then a dtree
//! ```
//!
//! A tree node is written in preorder as
//!
//! ```text
//! outer order=<s> arity=<k>
//! <s^(k-1) values of the node's defining table>
//! groups <tok> .. <tok>
//! ```
//!
//! with one token per argument. The root takes `k` arguments; any other
//! node takes `k - 1`, its last coordinate being its output. A token is a comma-separated list of the
//! one-based positions under that argument. A single position is a plain
//! coordinate; two or more positions mean that a child node follows.
//!
//! Parsers check structure only. Whether a parsed table is a quasigroup is
//! left to the caller, except for tree nodes, which must be valid.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::decompose::{Arg, DecompositionTree, TreeNode};
use crate::error::{Error, Result};
use crate::predicate::{QPredicate, RetractSpec};
use crate::table::{check_order, QTable};
use crate::theorem::{GroupMap, TheoremDecomposition};
use crate::tuple;

/// A table in either of the two table formats.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableFormat {
    QTable,
    MdsCode,
}

struct Lines<'a> {
    lines: Vec<(usize, &'a str)>,
    pos: usize,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        let lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim())).filter(|(_, l)| !l.is_empty()).collect();
        Lines { lines, pos: 0 }
    }

    fn next(&mut self, what: &str) -> Result<(usize, &'a str)> {
        let line = self.lines.get(self.pos).copied().ok_or_else(|| Error::Parse {
            line: self.lines.last().map_or(0, |l| l.0),
            message: format!("unexpected end of input, expected {what}"),
        })?;
        self.pos += 1;
        Ok(line)
    }

    fn finish(&self) -> Result<()> {
        match self.lines.get(self.pos) {
            Some(&(line, _)) => Err(Error::Parse { line, message: "trailing content".into() }),
            None => Ok(()),
        }
    }

    fn rest(&mut self) -> Vec<(usize, &'a str)> {
        let out = self.lines[self.pos..].to_vec();
        self.pos = self.lines.len();
        out
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

/// Splits `<tag..> key=value ..` and checks the leading tags and the key set.
fn header<'a>(line: usize, text: &'a str, tags: &[&str], keys: &[&str]) -> Result<HashMap<&'a str, &'a str>> {
    let mut words = text.split_whitespace();
    for tag in tags {
        match words.next() {
            Some(w) if w == *tag => {}
            other => return Err(parse_err(line, format!("expected {tag:?}, found {:?}", other.unwrap_or("")))),
        }
    }
    let mut fields = HashMap::new();
    for w in words {
        let (k, v) = w.split_once('=').ok_or_else(|| parse_err(line, format!("expected key=value, found {w:?}")))?;
        if !keys.contains(&k) {
            return Err(parse_err(line, format!("unknown field {k:?}")));
        }
        if fields.insert(k, v).is_some() {
            return Err(parse_err(line, format!("repeated field {k:?}")));
        }
    }
    if let Some(k) = keys.iter().find(|k| !fields.contains_key(*k)) {
        return Err(parse_err(line, format!("missing field {k:?}")));
    }
    Ok(fields)
}

fn number<T: std::str::FromStr>(line: usize, what: &str, text: &str) -> Result<T> {
    text.parse().map_err(|_| parse_err(line, format!("bad {what} {text:?}")))
}

fn order_field(line: usize, text: &str) -> Result<usize> {
    let s = number(line, "order", text)?;
    check_order(s).map_err(|e| parse_err(line, e.to_string()))?;
    Ok(s)
}

fn symbol(line: usize, text: &str, order: usize) -> Result<u8> {
    let v: usize = number(line, "symbol", text)?;
    if v >= order {
        return Err(parse_err(line, format!("symbol {v} out of range for order {order}")));
    }
    Ok(v as u8)
}

/// `count` symbols read across consecutive lines.
fn symbols(lines: &mut Lines, count: usize, order: usize) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (line, text) = lines.next("table values")?;
        for w in text.split_whitespace() {
            if out.len() == count {
                return Err(parse_err(line, format!("more than {count} values")));
            }
            out.push(symbol(line, w, order)?);
        }
    }
    Ok(out)
}

fn write_values(out: &mut String, table: &QTable) {
    let row = table.order().min(table.values().len()).max(1);
    for chunk in table.values().chunks(row) {
        let words: Vec<String> = chunk.iter().map(u8::to_string).collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    }
}

pub fn write_qtable(table: &QTable) -> String {
    let mut out = format!("qtable v1 order={} arity={}\n", table.order(), table.arity());
    write_values(&mut out, table);
    out
}

pub fn parse_qtable(text: &str) -> Result<QTable> {
    let mut lines = Lines::new(text);
    let (line, head) = lines.next("header")?;
    let f = header(line, head, &["qtable", "v1"], &["order", "arity"])?;
    let order = order_field(line, f["order"])?;
    let arity: usize = number(line, "arity", f["arity"])?;
    let count = tuple::volume(order, arity).map_err(|e| parse_err(line, e.to_string()))?;
    let values = symbols(&mut lines, count, order)?;
    lines.finish()?;
    QTable::from_values(order, arity, values)
}

/// The graph of `table`, one tuple per line in lexicographic order.
pub fn write_mdscode(table: &QTable) -> String {
    let mut out = format!("mdscode v1 order={} length={}\n", table.order(), table.arity() + 1);
    tuple::for_each_word(table.order(), table.arity(), |w| {
        let words: Vec<String> = w.iter().chain([&table.get(w)]).map(u8::to_string).collect();
        out.push_str(&words.join(" "));
        out.push('\n');
    });
    out
}

/// Reads a code of `s^(length-1)` tuples, in any order, as the graph of a
/// table. A code whose first `length - 1` coordinates do not run through
/// every word exactly once is reported as [`Error::NotPredicate`].
pub fn parse_mdscode(text: &str) -> Result<QTable> {
    let mut lines = Lines::new(text);
    let (line, head) = lines.next("header")?;
    let f = header(line, head, &["mdscode", "v1"], &["order", "length"])?;
    let order = order_field(line, f["order"])?;
    let length: usize = number(line, "length", f["length"])?;
    if length == 0 {
        return Err(parse_err(line, "length must be at least 1"));
    }
    let arity = length - 1;
    let count = tuple::volume(order, arity).map_err(|e| parse_err(line, e.to_string()))?;
    let mut values = vec![0u8; count];
    let mut seen = vec![false; count];
    let rest = lines.rest();
    for &(line, text) in &rest {
        let word = text.split_whitespace().map(|w| symbol(line, w, order)).collect::<Result<Vec<u8>>>()?;
        if word.len() != length {
            return Err(parse_err(line, format!("expected {length} symbols, found {}", word.len())));
        }
        let idx = tuple::index_of(&word[..arity], order);
        if std::mem::replace(&mut seen[idx], true) {
            return Err(Error::NotPredicate(format!(
                "two tuples agree on the first {arity} coordinates (line {line})"
            )));
        }
        values[idx] = word[arity];
    }
    if rest.len() != count {
        return Err(Error::NotPredicate(format!("expected {count} tuples, found {}", rest.len())));
    }
    QTable::from_values(order, arity, values)
}

pub fn write_table(table: &QTable, format: TableFormat) -> String {
    match format {
        TableFormat::QTable => write_qtable(table),
        TableFormat::MdsCode => write_mdscode(table),
    }
}

/// Parses either table format, chosen by the first word of the header.
pub fn parse_table(text: &str) -> Result<(QTable, TableFormat)> {
    let mut lines = Lines::new(text);
    let (line, head) = lines.next("header")?;
    match head.split_whitespace().next() {
        Some("qtable") => Ok((parse_qtable(text)?, TableFormat::QTable)),
        Some("mdscode") => Ok((parse_mdscode(text)?, TableFormat::MdsCode)),
        other => Err(parse_err(line, format!("unknown format {:?}", other.unwrap_or("")))),
    }
}

fn positions_token(positions: &[usize]) -> String {
    positions.iter().map(|p| (p + 1).to_string()).collect::<Vec<_>>().join(",")
}

fn write_node(out: &mut String, node: &TreeNode) {
    let table = node.pred.defining_table();
    let _ = writeln!(out, "outer order={} arity={}", node.pred.order(), node.pred.arity());
    write_values(out, table);
    let tokens: Vec<String> = node
        .args
        .iter()
        .map(|a| match a {
            Arg::Var(p) => positions_token(&[*p]),
            Arg::Sub(n) => positions_token(&n.positions()),
        })
        .collect();
    let _ = writeln!(out, "groups {}", tokens.join(" "));
    for a in &node.args {
        if let Arg::Sub(n) = a {
            write_node(out, n);
        }
    }
}

pub fn write_dtree(tree: &DecompositionTree) -> String {
    let mut out = format!("dtree v1 order={} arity={}\n", tree.order, tree.arity);
    write_node(&mut out, &tree.root);
    out
}

fn parse_positions(line: usize, token: &str, arity: usize) -> Result<Vec<usize>> {
    token
        .split(',')
        .map(|t| {
            let p: usize = number(line, "position", t)?;
            if p == 0 || p > arity {
                return Err(parse_err(line, format!("position {p} out of range 1..={arity}")));
            }
            Ok(p - 1)
        })
        .collect()
}

fn parse_node(lines: &mut Lines, order: usize, arity: usize, root: bool) -> Result<TreeNode> {
    let (line, head) = lines.next("node header")?;
    let f = header(line, head, &["outer"], &["order", "arity"])?;
    let node_order = order_field(line, f["order"])?;
    if node_order != order {
        return Err(parse_err(line, format!("node order {node_order} differs from tree order {order}")));
    }
    let k: usize = number(line, "arity", f["arity"])?;
    if k < 2 {
        return Err(parse_err(line, format!("node arity must be at least 2, got {k}")));
    }
    let count = tuple::volume(order, k - 1).map_err(|e| parse_err(line, e.to_string()))?;
    let values = symbols(lines, count, order)?;
    let table = QTable::new(order, k - 1, values).map_err(|e| parse_err(line, e.to_string()))?;
    let pred = QPredicate::from_table(&table)?;
    let (line, groups) = lines.next("groups line")?;
    let mut words = groups.split_whitespace();
    if words.next() != Some("groups") {
        return Err(parse_err(line, "expected \"groups\""));
    }
    let tokens: Vec<Vec<usize>> = words.map(|t| parse_positions(line, t, arity)).collect::<Result<_>>()?;
    let expected = if root { k } else { k - 1 };
    if tokens.len() != expected {
        return Err(parse_err(line, format!("expected {expected} groups, found {}", tokens.len())));
    }
    let mut args = Vec::with_capacity(expected);
    for token in tokens {
        if let [p] = token[..] {
            args.push(Arg::Var(p));
            continue;
        }
        let child = parse_node(lines, order, arity, false)?;
        let mut sorted = token.clone();
        sorted.sort_unstable();
        if child.positions() != sorted || sorted != token {
            return Err(parse_err(line, format!("group {} does not match its subtree", positions_token(&token))));
        }
        args.push(Arg::Sub(Box::new(child)));
    }
    Ok(TreeNode { pred, args })
}

fn parse_dtree_lines(lines: &mut Lines) -> Result<DecompositionTree> {
    let (line, head) = lines.next("header")?;
    let f = header(line, head, &["dtree", "v1"], &["order", "arity"])?;
    let order = order_field(line, f["order"])?;
    let arity: usize = number(line, "arity", f["arity"])?;
    let root = parse_node(lines, order, arity, true)?;
    if root.positions() != (0..arity).collect::<Vec<_>>() {
        return Err(parse_err(line, format!("tree does not cover positions 1..={arity} exactly once")));
    }
    Ok(DecompositionTree { order, arity, root })
}

pub fn parse_dtree(text: &str) -> Result<DecompositionTree> {
    let mut lines = Lines::new(text);
    let tree = parse_dtree_lines(&mut lines)?;
    lines.finish()?;
    Ok(tree)
}

fn list(items: impl IntoIterator<Item = String>) -> String {
    items.into_iter().collect::<Vec<_>>().join(",")
}

pub fn write_theorem(dec: &TheoremDecomposition) -> Result<String> {
    let mut out = format!(
        "theorem1 v1 k={} kept={} fixed={} groupmap={}\n",
        dec.k(),
        list(dec.spec.kept.iter().map(|p| (p + 1).to_string())),
        list(dec.spec.fixed.iter().map(|(p, v)| format!("{}:{v}", p + 1))),
        list(dec.group_map.j.iter().map(|j| (j + 1).to_string())),
    );
    out.push_str(&write_dtree(&dec.to_tree()?));
    Ok(out)
}

fn split_list(text: &str) -> impl Iterator<Item = &str> {
    text.split(',').filter(|t| !t.is_empty())
}

pub fn parse_theorem(text: &str) -> Result<TheoremDecomposition> {
    let mut lines = Lines::new(text);
    let (line, head) = lines.next("header")?;
    let f = header(line, head, &["theorem1", "v1"], &["k", "kept", "fixed", "groupmap"])?;
    let k: usize = number(line, "k", f["k"])?;
    let kept: Vec<usize> = split_list(f["kept"])
        .map(|t| {
            number::<usize>(line, "position", t)
                .and_then(|p| p.checked_sub(1).ok_or_else(|| parse_err(line, "position 0")))
        })
        .collect::<Result<_>>()?;
    let fixed: Vec<(usize, u8)> = split_list(f["fixed"])
        .map(|t| {
            let (p, v) = t.split_once(':').ok_or_else(|| parse_err(line, format!("expected pos:val, found {t:?}")))?;
            let p: usize = number(line, "position", p)?;
            let p = p.checked_sub(1).ok_or_else(|| parse_err(line, "position 0"))?;
            Ok((p, number(line, "symbol", v)?))
        })
        .collect::<Result<_>>()?;
    let j: Vec<usize> = split_list(f["groupmap"])
        .map(|t| {
            number::<usize>(line, "group", t).and_then(|j| j.checked_sub(1).ok_or_else(|| parse_err(line, "group 0")))
        })
        .collect::<Result<_>>()?;

    let tree = parse_dtree_lines(&mut lines)?;
    lines.finish()?;
    let spec = RetractSpec { kept, fixed };
    spec.check(tree.arity, tree.order).map_err(|e| parse_err(line, e.to_string()))?;
    if tree.root.pred.arity() != k || spec.kept.len() != k || j.len() != tree.arity - k || j.iter().any(|&t| t >= k) {
        return Err(parse_err(line, "header does not match the tree"));
    }
    let mut groups = Vec::with_capacity(k);
    let mut inners = Vec::with_capacity(k);
    for a in &tree.root.args {
        match a {
            Arg::Var(p) => {
                groups.push(vec![*p]);
                inners.push(QTable::identity(tree.order)?);
            }
            Arg::Sub(n) => {
                let g = n
                    .args
                    .iter()
                    .map(|a| match a {
                        Arg::Var(p) => Ok(*p),
                        Arg::Sub(_) => Err(parse_err(line, "inner nodes must have plain coordinates")),
                    })
                    .collect::<Result<Vec<_>>>()?;
                groups.push(g);
                inners.push(n.pred.defining_table().clone());
            }
        }
    }
    Ok(TheoremDecomposition { outer: tree.root.pred, groups, inners, group_map: GroupMap { j, k }, spec })
}
