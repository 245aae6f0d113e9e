use std::collections::{HashMap, HashSet};

use super::{
    Body, Definition, Diagnostic, Document, ErrorKind, FactorStmt, GraphFormat, Kind, Rows, MAX_CHAIN, MAX_LENGTH,
    MAX_MULTIPLICITY, MAX_ROWS, MAX_STATEMENTS,
};
use crate::constructions::Boundary;
use crate::field::{Gf4, Zp};
use crate::symplectic::{Gf4Word, SympVector};

type G2 = Zp<2>;

#[derive(Debug, Clone, Copy)]
struct Tok<'a> {
    text: &'a str,
    col: usize,
}

struct Line<'a> {
    no: usize,
    toks: Vec<Tok<'a>>,
    raw: &'a str,
}

fn tokenize(raw: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    let mut col = 0;
    for (i, ch) in raw.char_indices() {
        col += 1;
        if ch.is_whitespace() {
            if let Some((s, c)) = start.take() {
                out.push(Tok { text: &raw[s..i], col: c });
            }
        } else if start.is_none() {
            start = Some((i, col));
        }
    }
    if let Some((s, c)) = start {
        out.push(Tok { text: &raw[s..], col: c });
    }
    out
}

fn diag(line: usize, column: usize, kind: ErrorKind, message: impl Into<String>) -> Diagnostic {
    Diagnostic { line, column, kind, message: message.into() }
}

fn is_ident(s: &str) -> bool {
    !s.is_empty()
        && s != ":"
        && !s.starts_with('#')
        && s.chars().all(|c| c.is_ascii_alphanumeric() || "_.'~@#:+-".contains(c))
}

struct Parser<'a> {
    lines: Vec<Line<'a>>,
    pos: usize,
}

struct Reference {
    from: String,
    name: String,
    line: usize,
    col: usize,
    kinds: &'static [Kind],
}

impl<'a> Parser<'a> {
    fn ident(&self, line: usize, t: Tok<'_>, what: &str) -> Result<String, Diagnostic> {
        if is_ident(t.text) {
            Ok(t.text.to_string())
        } else {
            Err(diag(line, t.col, ErrorKind::Lexical, format!("invalid {what} {:?}", t.text)))
        }
    }

    fn number(&self, line: usize, t: Tok<'_>, what: &str, min: usize, max: usize) -> Result<usize, Diagnostic> {
        let v: usize = t.text.parse().map_err(|_| {
            diag(line, t.col, ErrorKind::Lexical, format!("expected a number for {what}, got {:?}", t.text))
        })?;
        if v < min || v > max {
            return Err(diag(line, t.col, ErrorKind::Limit, format!("{what} must be in {min}..={max}, got {v}")));
        }
        Ok(v)
    }

    /// Lines of the block opened on `header`, up to the matching `end`.
    /// Blank and comment lines inside are skipped.
    fn block(&mut self, header: usize) -> Result<Vec<usize>, Diagnostic> {
        let mut out = Vec::new();
        while self.pos < self.lines.len() {
            let i = self.pos;
            self.pos += 1;
            let l = &self.lines[i];
            match l.toks.first() {
                None => continue,
                Some(t) if t.text.starts_with('#') => continue,
                Some(t) if t.text == "end" => {
                    if l.toks.len() > 1 {
                        return Err(diag(l.no, l.toks[1].col, ErrorKind::Arity, "unexpected text after end"));
                    }
                    return Ok(out);
                }
                Some(_) => {
                    if out.len() >= MAX_STATEMENTS {
                        return Err(diag(l.no, 1, ErrorKind::Limit, "block has too many lines"));
                    }
                    out.push(i);
                }
            }
        }
        Err(diag(header, 1, ErrorKind::Structure, "block is missing its end line"))
    }

    fn arity(&self, l: &Line<'_>, expected: &[usize], usage: &str) -> Result<(), Diagnostic> {
        if expected.contains(&l.toks.len()) {
            Ok(())
        } else {
            let col = l.toks.get(*expected.iter().max().unwrap_or(&0)).map_or(l.raw.chars().count() + 1, |t| t.col);
            Err(diag(l.no, col, ErrorKind::Arity, format!("expected: {usage}")))
        }
    }

    fn bit_string(&self, l: &Line<'_>, s: &str, n: usize, col: usize) -> Result<Vec<G2>, Diagnostic> {
        if s.chars().count() != n {
            return Err(diag(
                l.no,
                col,
                ErrorKind::Arity,
                format!("row must have {n} entries, found {}", s.chars().count()),
            ));
        }
        s.chars()
            .enumerate()
            .map(|(k, c)| match c {
                '0' => Ok(G2::new(0)),
                '1' => Ok(G2::new(1)),
                _ => Err(diag(l.no, col + k, ErrorKind::Lexical, format!("expected 0 or 1, got {c:?}"))),
            })
            .collect()
    }

    /// Row text with whitespace removed, or an error naming the first token.
    fn joined(l: &Line<'_>) -> (String, usize) {
        (l.toks.iter().map(|t| t.text).collect(), l.toks[0].col)
    }

    fn rows(&self, format: &str, n: usize, body: &[usize], fcol: usize, header: usize) -> Result<Rows, Diagnostic> {
        if body.len() > MAX_ROWS {
            return Err(diag(header, 1, ErrorKind::Limit, format!("more than {MAX_ROWS} rows")));
        }
        match format {
            "pauli" => {
                let mut out = Vec::new();
                for &i in body {
                    let l = &self.lines[i];
                    self.arity(l, &[1], "one Pauli string per row")?;
                    let t = l.toks[0];
                    if t.text.chars().count() != n {
                        return Err(diag(
                            l.no,
                            t.col,
                            ErrorKind::Arity,
                            format!("row must have {n} letters, found {}", t.text.chars().count()),
                        ));
                    }
                    let mut pairs = Vec::with_capacity(n);
                    for (k, c) in t.text.chars().enumerate() {
                        let p = match c {
                            'I' => (0, 0),
                            'X' => (1, 0),
                            'Z' => (0, 1),
                            'Y' => (1, 1),
                            _ => {
                                return Err(diag(
                                    l.no,
                                    t.col + k,
                                    ErrorKind::Lexical,
                                    format!("expected one of IXYZ, got {c:?}"),
                                ))
                            }
                        };
                        pairs.push((G2::new(p.0), G2::new(p.1)));
                    }
                    out.push(SympVector::from_pairs(&pairs));
                }
                Ok(Rows::Pauli(out))
            }
            "xz" => {
                let mut out = Vec::new();
                for &i in body {
                    let l = &self.lines[i];
                    let (s, col) = Self::joined(l);
                    let Some((x, z)) = s.split_once('|') else {
                        return Err(diag(l.no, col, ErrorKind::Lexical, "expected x-bits|z-bits"));
                    };
                    let xs = self.bit_string(l, x, n, col)?;
                    let zs = self.bit_string(l, z, n, col + x.chars().count() + 1)?;
                    out.push(SympVector::new(xs, zs).expect("equal lengths"));
                }
                Ok(Rows::Xz(out))
            }
            "gf4" | "gf4-linear" => {
                let mut out = Vec::new();
                for &i in body {
                    let l = &self.lines[i];
                    if l.toks.len() != n {
                        return Err(diag(
                            l.no,
                            l.toks[0].col,
                            ErrorKind::Arity,
                            format!("row must have {n} entries, found {}", l.toks.len()),
                        ));
                    }
                    let mut w = Vec::with_capacity(n);
                    for t in &l.toks {
                        w.push(Gf4::from_token(t.text).ok_or_else(|| {
                            diag(l.no, t.col, ErrorKind::Lexical, format!("expected 0, 1, w or w2, got {:?}", t.text))
                        })?);
                    }
                    out.push(Gf4Word(w));
                }
                Ok(Rows::Gf4 { rows: out, linear: format == "gf4-linear" })
            }
            other => Err(diag(header, fcol, ErrorKind::UnknownKeyword, format!("unknown row format {other:?}"))),
        }
    }

    fn definition(&mut self, idx: usize, refs: &mut Vec<Reference>) -> Result<(String, Body), Diagnostic> {
        let l = &self.lines[idx];
        let no = l.no;
        let kw = l.toks[0];
        let toks = l.toks.clone();
        let name_tok = toks.get(1).copied();
        let name = match name_tok {
            Some(t) => self.ident(no, t, "name")?,
            None => {
                return Err(diag(no, kw.col + kw.text.len(), ErrorKind::Arity, format!("{} needs a name", kw.text)))
            }
        };
        let mut reference = |r: Tok<'_>, kinds: &'static [Kind]| -> Result<String, Diagnostic> {
            let n = self_ident(no, r)?;
            refs.push(Reference { from: name.clone(), name: n.clone(), line: no, col: r.col, kinds });
            Ok(n)
        };
        let body = match kw.text {
            "code" => {
                self.arity(l, &[4], "code NAME FORMAT N")?;
                let n = self.number(no, toks[3], "length", 1, MAX_LENGTH)?;
                let body = self.block(no)?;
                Body::Code { n, rows: self.rows(toks[2].text, n, &body, toks[2].col, no)? }
            }
            "binary" => {
                self.arity(l, &[3], "binary NAME N")?;
                let n = self.number(no, toks[2], "length", 1, MAX_LENGTH)?;
                let body = self.block(no)?;
                if body.len() > MAX_ROWS {
                    return Err(diag(no, 1, ErrorKind::Limit, format!("more than {MAX_ROWS} rows")));
                }
                let mut rows = Vec::new();
                for &i in &body {
                    let r = &self.lines[i];
                    let (s, col) = Self::joined(r);
                    rows.push(self.bit_string(r, &s, n, col)?);
                }
                Body::Binary { n, rows }
            }
            "section" => {
                self.arity(l, &[5], "section NAME FORMAT MU K")?;
                let mu = self.number(no, toks[3], "state multiplicity", 1, MAX_MULTIPLICITY)?;
                let k = self.number(no, toks[4], "symbol count", 0, MAX_LENGTH)?;
                let body = self.block(no)?;
                Body::Section { mu, k, rows: self.rows(toks[2].text, 2 * mu + k, &body, toks[2].col, no)? }
            }
            "graph" => {
                self.arity(l, &[3, 4], "graph NAME N [adjacency]")?;
                let n = self.number(no, toks[2], "vertex count", 0, MAX_LENGTH)?;
                let format = match toks.get(3) {
                    None => GraphFormat::Edges,
                    Some(t) if t.text == "adjacency" => GraphFormat::Adjacency,
                    Some(t) => {
                        return Err(diag(
                            no,
                            t.col,
                            ErrorKind::UnknownKeyword,
                            format!("unknown graph format {:?}", t.text),
                        ))
                    }
                };
                let body = self.block(no)?;
                let mut edges = HashSet::new();
                match format {
                    GraphFormat::Edges => {
                        for &i in &body {
                            let r = &self.lines[i];
                            self.arity(r, &[2], "two vertex numbers per line")?;
                            let a = self.number(r.no, r.toks[0], "vertex", 1, n.max(1))?;
                            let b = self.number(r.no, r.toks[1], "vertex", 1, n.max(1))?;
                            if a == b {
                                return Err(diag(
                                    r.no,
                                    r.toks[1].col,
                                    ErrorKind::Structure,
                                    format!("self-loop at vertex {a}"),
                                ));
                            }
                            if !edges.insert(((a - 1).min(b - 1), (a - 1).max(b - 1))) {
                                return Err(diag(
                                    r.no,
                                    r.toks[0].col,
                                    ErrorKind::Duplicate,
                                    format!("edge {a} {b} listed twice"),
                                ));
                            }
                        }
                    }
                    GraphFormat::Adjacency => {
                        if body.len() != n {
                            return Err(diag(
                                no,
                                1,
                                ErrorKind::Arity,
                                format!("adjacency matrix needs {n} rows, found {}", body.len()),
                            ));
                        }
                        let mut m = Vec::new();
                        for &i in &body {
                            let r = &self.lines[i];
                            let (s, col) = Self::joined(r);
                            m.push((self.bit_string(r, &s, n, col)?, r.no, col));
                        }
                        for i in 0..n {
                            let (row, line, col) = &m[i];
                            if row[i].get() != 0 {
                                return Err(diag(*line, col + i, ErrorKind::Structure, "nonzero diagonal entry"));
                            }
                            for j in 0..n {
                                if row[j] != m[j].0[i] {
                                    return Err(diag(
                                        *line,
                                        col + j,
                                        ErrorKind::Structure,
                                        "adjacency matrix is not symmetric",
                                    ));
                                }
                                if j > i && row[j].get() == 1 {
                                    edges.insert((i, j));
                                }
                            }
                        }
                    }
                }
                let mut edges: Vec<(usize, usize)> = edges.into_iter().collect();
                edges.sort_unstable();
                Body::Graph { n, edges, format }
            }
            "ffg" => {
                self.arity(l, &[2], "ffg NAME")?;
                let body = self.block(no)?;
                let mut half_edges = Vec::new();
                let mut edges = Vec::new();
                let mut factors: Vec<FactorStmt> = Vec::new();
                let mut vars: HashSet<String> = HashSet::new();
                let mut fnames: HashSet<String> = HashSet::new();
                let mut ports_to_check = Vec::new();
                for &i in &body {
                    let r = &self.lines[i];
                    let t0 = r.toks[0];
                    match t0.text {
                        "half" => {
                            if r.toks.len() < 2 {
                                return Err(diag(r.no, t0.col, ErrorKind::Arity, "expected: half NAME.."));
                            }
                            for t in &r.toks[1..] {
                                let h = self.ident(r.no, *t, "variable name")?;
                                if !vars.insert(h.clone()) {
                                    return Err(diag(
                                        r.no,
                                        t.col,
                                        ErrorKind::Duplicate,
                                        format!("variable {h} declared twice"),
                                    ));
                                }
                                half_edges.push(h);
                            }
                        }
                        "edge" => {
                            self.arity(r, &[2, 3], "edge NAME [MU]")?;
                            let e = self.ident(r.no, r.toks[1], "variable name")?;
                            let mu = match r.toks.get(2) {
                                Some(t) => self.number(r.no, *t, "multiplicity", 1, MAX_MULTIPLICITY)?,
                                None => 1,
                            };
                            if !vars.insert(e.clone()) {
                                return Err(diag(
                                    r.no,
                                    r.toks[1].col,
                                    ErrorKind::Duplicate,
                                    format!("variable {e} declared twice"),
                                ));
                            }
                            edges.push((e, mu));
                        }
                        "factor" => {
                            if r.toks.len() < 5 || r.toks[3].text != ":" {
                                let col = r.toks.get(3).map_or(t0.col, |t| t.col);
                                return Err(diag(r.no, col, ErrorKind::Arity, "expected: factor NAME CODE : PORT.."));
                            }
                            let f = self.ident(r.no, r.toks[1], "factor name")?;
                            if !fnames.insert(f.clone()) {
                                return Err(diag(
                                    r.no,
                                    r.toks[1].col,
                                    ErrorKind::Duplicate,
                                    format!("factor {f} declared twice"),
                                ));
                            }
                            let code = self_ident(r.no, r.toks[2])?;
                            refs.push(Reference {
                                from: name.clone(),
                                name: code.clone(),
                                line: r.no,
                                col: r.toks[2].col,
                                kinds: &[Kind::Code, Kind::Section],
                            });
                            let mut ports = Vec::new();
                            for t in &r.toks[4..] {
                                let p = self.ident(r.no, *t, "port")?;
                                ports_to_check.push((p.clone(), r.no, t.col));
                                ports.push(p);
                            }
                            factors.push(FactorStmt { name: f, code, ports });
                        }
                        other => {
                            return Err(diag(
                                r.no,
                                t0.col,
                                ErrorKind::UnknownKeyword,
                                format!("unknown ffg statement {other:?}"),
                            ))
                        }
                    }
                }
                for (p, line, col) in ports_to_check {
                    if !vars.contains(&p) {
                        return Err(diag(line, col, ErrorKind::DanglingReference, format!("undeclared variable {p}")));
                    }
                }
                Body::Ffg { half_edges, edges, factors }
            }
            "css" => {
                self.arity(l, &[4], "css NAME B1 B2")?;
                Body::Css { b1: reference(toks[2], &[Kind::Binary])?, b2: reference(toks[3], &[Kind::Binary])? }
            }
            "chain" => {
                self.arity(l, &[5], "chain NAME SECTION LENGTH terminated|tailbiting")?;
                let section = reference(toks[2], &[Kind::Section])?;
                let len = self.number(no, toks[3], "chain length", 1, MAX_CHAIN)?;
                let boundary = match toks[4].text {
                    "terminated" => Boundary::Terminated,
                    "tailbiting" => Boundary::TailBiting,
                    other => {
                        return Err(diag(
                            no,
                            toks[4].col,
                            ErrorKind::UnknownKeyword,
                            format!("unknown boundary {other:?}"),
                        ))
                    }
                };
                Body::Chain { section, len, boundary }
            }
            "graphstate" => {
                self.arity(l, &[3], "graphstate NAME GRAPH")?;
                Body::GraphState { graph: reference(toks[2], &[Kind::Graph])? }
            }
            "turbo" => {
                let usage = "turbo NAME OUTER INNER interleaver P.. inputs NAME..";
                if toks.len() < 5 || toks[4].text != "interleaver" {
                    let col = toks.get(4).map_or(kw.col, |t| t.col);
                    return Err(diag(no, col, ErrorKind::Arity, format!("expected: {usage}")));
                }
                let Some(split) = toks.iter().position(|t| t.text == "inputs") else {
                    return Err(diag(no, kw.col, ErrorKind::Arity, format!("expected: {usage}")));
                };
                let outer = reference(toks[2], &[Kind::Ffg])?;
                let inner = reference(toks[3], &[Kind::Ffg])?;
                let mut perm = Vec::new();
                for t in &toks[5..split] {
                    perm.push(self.number(no, *t, "interleaver entry", 1, MAX_STATEMENTS)? - 1);
                }
                let mut inputs = Vec::new();
                for t in &toks[split + 1..] {
                    inputs.push(self.ident(no, *t, "input name")?);
                }
                Body::Turbo { outer, inner, perm, inputs }
            }
            other => return Err(diag(no, kw.col, ErrorKind::UnknownKeyword, format!("unknown keyword {other:?}"))),
        };
        Ok((name, body))
    }
}

fn self_ident(line: usize, t: Tok<'_>) -> Result<String, Diagnostic> {
    if is_ident(t.text) {
        Ok(t.text.to_string())
    } else {
        Err(diag(line, t.col, ErrorKind::Lexical, format!("invalid name {:?}", t.text)))
    }
}

fn comment_text(raw: &str) -> String {
    let t = raw.trim();
    let t = &t[1..];
    t.strip_prefix(' ').unwrap_or(t).trim_end().to_string()
}

/// Parses a document; the first problem found is reported.
pub fn parse(text: &str) -> Result<Document, Diagnostic> {
    let lines: Vec<Line<'_>> = text
        .split('\n')
        .enumerate()
        .map(|(i, raw)| {
            let raw = raw.strip_suffix('\r').unwrap_or(raw);
            Line { no: i + 1, toks: tokenize(raw), raw }
        })
        .collect();
    let mut p = Parser { lines, pos: 0 };
    let mut doc = Document::new();
    let mut refs = Vec::new();
    let mut pending: Vec<String> = Vec::new();
    let mut def_lines: HashMap<String, usize> = HashMap::new();
    while p.pos < p.lines.len() {
        let i = p.pos;
        p.pos += 1;
        let l = &p.lines[i];
        let Some(first) = l.toks.first() else {
            pending.clear();
            continue;
        };
        if first.text.starts_with('#') {
            pending.push(comment_text(l.raw));
            continue;
        }
        let no = l.no;
        let name_col = l.toks.get(1).map_or(1, |t| t.col);
        let (name, body) = p.definition(i, &mut refs)?;
        if doc.get(&name).is_some() {
            return Err(diag(no, name_col, ErrorKind::Duplicate, format!("{name} is defined twice")));
        }
        def_lines.insert(name.clone(), no);
        doc.insert(Definition { name, comments: std::mem::take(&mut pending), body });
    }
    for r in &refs {
        let Some(target) = doc.get(&r.name) else {
            return Err(diag(r.line, r.col, ErrorKind::DanglingReference, format!("undefined name {}", r.name)));
        };
        let kind = target.body.kind();
        if !r.kinds.contains(&kind) {
            let want: Vec<&str> = r.kinds.iter().map(|k| k.name()).collect();
            return Err(diag(
                r.line,
                r.col,
                ErrorKind::Structure,
                format!("{} is a {}, expected {}", r.name, kind.name(), want.join(" or ")),
            ));
        }
    }
    if let Some(c) = find_cycle(&doc) {
        let at = refs.iter().find(|r| r.from == c);
        let (line, col) = at.map_or((def_lines.get(c).copied().unwrap_or(1), 1), |r| (r.line, r.col));
        return Err(diag(line, col, ErrorKind::Structure, format!("{c} refers to itself")));
    }
    Ok(doc)
}

fn find_cycle(doc: &Document) -> Option<&str> {
    // 0 unvisited, 1 on stack, 2 done
    let mut state: HashMap<&str, u8> = HashMap::new();
    fn visit<'a>(doc: &'a Document, n: &'a str, state: &mut HashMap<&'a str, u8>) -> Option<&'a str> {
        match state.get(n) {
            Some(1) => return Some(n),
            Some(2) => return None,
            _ => {}
        }
        state.insert(n, 1);
        if let Some(d) = doc.get(n) {
            for r in d.body.references() {
                if let Some(c) = visit(doc, r, state) {
                    return Some(c);
                }
            }
        }
        state.insert(n, 2);
        None
    }
    doc.names().find_map(|n| visit(doc, n, &mut state))
}
