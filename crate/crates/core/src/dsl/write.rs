use std::fmt::Write;

use super::{Body, Definition, Document, GraphFormat, Rows};
use crate::constructions::Boundary;
use crate::field::{Field, PrimeField};
use crate::symplectic::SympVector;

fn bits<F: Field>(v: &[F]) -> String {
    v.iter().map(|b| char::from(b'0' + b.index() as u8)).collect()
}

fn xz<F: PrimeField>(v: &SympVector<F>) -> String {
    format!("{}|{}", bits(v.x()), bits(v.z()))
}

fn rows(out: &mut String, r: &Rows) {
    match r {
        Rows::Pauli(vs) => {
            for v in vs {
                let _ = writeln!(out, "  {}", v.to_pauli().expect("binary"));
            }
        }
        Rows::Xz(vs) => {
            for v in vs {
                let _ = writeln!(out, "  {}", xz(v));
            }
        }
        Rows::Gf4 { rows, .. } => {
            for w in rows {
                let _ = writeln!(out, "  {w}");
            }
        }
    }
}

fn definition(out: &mut String, d: &Definition) {
    for c in &d.comments {
        if c.is_empty() {
            out.push_str("#\n");
        } else {
            let _ = writeln!(out, "# {c}");
        }
    }
    let name = &d.name;
    match &d.body {
        Body::Code { n, rows: r } => {
            let _ = writeln!(out, "code {name} {} {n}", r.format());
            rows(out, r);
            out.push_str("end\n");
        }
        Body::Binary { n, rows: r } => {
            let _ = writeln!(out, "binary {name} {n}");
            for row in r {
                let _ = writeln!(out, "  {}", bits(row));
            }
            out.push_str("end\n");
        }
        Body::Section { mu, k, rows: r } => {
            let _ = writeln!(out, "section {name} {} {mu} {k}", r.format());
            rows(out, r);
            out.push_str("end\n");
        }
        Body::Graph { n, edges, format } => match format {
            GraphFormat::Edges => {
                let _ = writeln!(out, "graph {name} {n}");
                for (i, j) in edges {
                    let _ = writeln!(out, "  {} {}", i + 1, j + 1);
                }
                out.push_str("end\n");
            }
            GraphFormat::Adjacency => {
                let _ = writeln!(out, "graph {name} {n} adjacency");
                for i in 0..*n {
                    let row: String = (0..*n)
                        .map(|j| if edges.contains(&(i.min(j), i.max(j))) && i != j { '1' } else { '0' })
                        .collect();
                    let _ = writeln!(out, "  {row}");
                }
                out.push_str("end\n");
            }
        },
        Body::Ffg { half_edges, edges, factors } => {
            let _ = writeln!(out, "ffg {name}");
            for h in half_edges {
                let _ = writeln!(out, "  half {h}");
            }
            for (e, mu) in edges {
                let _ = writeln!(out, "  edge {e} {mu}");
            }
            for f in factors {
                let _ = writeln!(out, "  factor {} {} : {}", f.name, f.code, f.ports.join(" "));
            }
            out.push_str("end\n");
        }
        Body::Css { b1, b2 } => {
            let _ = writeln!(out, "css {name} {b1} {b2}");
        }
        Body::Chain { section, len, boundary } => {
            let b = match boundary {
                Boundary::Terminated => "terminated",
                Boundary::TailBiting => "tailbiting",
            };
            let _ = writeln!(out, "chain {name} {section} {len} {b}");
        }
        Body::GraphState { graph } => {
            let _ = writeln!(out, "graphstate {name} {graph}");
        }
        Body::Turbo { outer, inner, perm, inputs } => {
            let p: Vec<String> = perm.iter().map(|x| (x + 1).to_string()).collect();
            let _ =
                writeln!(out, "turbo {name} {outer} {inner} interleaver {} inputs {}", p.join(" "), inputs.join(" "));
        }
    }
}

/// Canonical text: dependencies first, one blank line between definitions.
pub fn serialize(doc: &Document) -> String {
    let mut out = String::new();
    for (i, d) in doc.canonical_order().into_iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        definition(&mut out, d);
    }
    out
}
