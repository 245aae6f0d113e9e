use std::collections::HashMap;

use super::{Ffg, FfgError};
use crate::field::PrimeField;
use crate::linalg::FMatrix;
use crate::symplectic::GroupCode;

/// Global symbol-pair positions: half-edges first, in declaration order,
/// then each edge's `μ` pairs.
pub(crate) fn global_positions<F: PrimeField>(g: &Ffg<F>) -> (HashMap<&str, usize>, usize) {
    let mut pos = HashMap::new();
    let mut next = 0;
    for h in g.half_edges() {
        pos.insert(h.as_str(), next);
        next += 1;
    }
    for e in g.edges() {
        pos.insert(e.name.as_str(), next);
        next += e.multiplicity;
    }
    (pos, next)
}

/// The code `{t : ∃ m, every local constraint holds}` on the half-edges,
/// in declaration order.
///
/// Each local code's annihilator is lifted to the joint `(t, m)`
/// coordinates; the kernel of the stacked checks is the joint behavior,
/// which is then projected onto the half-edge columns.
pub fn extract_global_code<F: PrimeField>(g: &Ffg<F>) -> Result<GroupCode<F>, FfgError> {
    g.ensure_valid()?;
    let (pos, total) = global_positions(g);
    let mut checks: Vec<Vec<F>> = Vec::new();
    for f in g.factors() {
        let ni = f.code.n();
        let mut map = vec![0usize; ni];
        for p in &f.ports {
            let base = pos[p.variable.as_str()];
            for h in 0..p.multiplicity {
                map[p.offset + h] = base + h;
            }
        }
        let annihilator = f.code.basis().kernel();
        for k in annihilator.row_iter() {
            let mut row = vec![F::zero(); 2 * total];
            for j in 0..ni {
                row[map[j]] += k[j];
                row[total + map[j]] += k[ni + j];
            }
            checks.push(row);
        }
    }
    let joint = if checks.is_empty() {
        FMatrix::identity(2 * total)
    } else {
        FMatrix::from_rows(2 * total, &checks).expect("uniform width").kernel()
    };
    let nt = g.half_edges().len();
    let cols: Vec<usize> = (0..nt).chain(total..total + nt).collect();
    Ok(GroupCode::from_generators(nt, joint.select_columns(&cols))?)
}
