//! Kleene stars and diagonal similarity scalings.

use crate::error::{Error, Result};
use crate::graph::{critical_structure, max_cycle_mean, scc_decompose, Digraph};
use crate::matrix::{is_zero, tolerance, TropicalMatrix, ZERO};

/// Max-plus Floyd-Warshall closure `I ⊕ A ⊕ A² ⊕ …` without any check on
/// the cycle means.
pub(crate) fn floyd_warshall_star(a: &TropicalMatrix) -> TropicalMatrix {
    let n = a.dim();
    let mut d = a.clone();
    for k in 0..n {
        let row_k: Vec<f64> = d.row(k).to_vec();
        for i in 0..n {
            let dik = d.get(i, k);
            if is_zero(dik) {
                continue;
            }
            for (j, &dkj) in row_k.iter().enumerate() {
                if !is_zero(dkj) && dik + dkj > d.get(i, j) {
                    d.set(i, j, dik + dkj);
                }
            }
        }
    }
    for i in 0..n {
        if d.get(i, i) < 0.0 || is_zero(d.get(i, i)) {
            d.set(i, i, 0.0);
        }
    }
    d
}

/// `A* = I ⊕ A ⊕ … ⊕ A^{n-1}`; fails when some cycle has positive mean.
pub fn kleene_star(a: &TropicalMatrix) -> Result<TropicalMatrix> {
    let g = Digraph::from_matrix(a);
    let scc = scc_decompose(&g);
    let tol = tolerance(a.max_abs_finite());
    for c in 0..scc.len() {
        if scc.is_trivial(c) {
            continue;
        }
        let lambda = max_cycle_mean(&g, scc.nodes(c));
        if lambda > tol {
            return Err(Error::DivergentStar {
                component: c,
                node: scc.nodes(c)[0],
                lambda,
            });
        }
    }
    let star = floyd_warshall_star(a);
    for i in 0..a.dim() {
        if star.get(i, i) > tol {
            return Err(Error::DivergentStar {
                component: scc.component_of(i),
                node: i,
                lambda: star.get(i, i),
            });
        }
    }
    Ok(star)
}

/// Diagonal similarity `A ↦ D⁻¹ A D` with `D = diag(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Scaling {
    z: Vec<f64>,
}

impl Scaling {
    pub fn new(z: Vec<f64>) -> Result<Self> {
        if let Some((i, &v)) = z.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(Error::InvalidEntry {
                row: i,
                col: 0,
                value: v,
            });
        }
        Ok(Self { z })
    }

    pub fn identity(n: usize) -> Self {
        Self { z: vec![0.0; n] }
    }

    pub fn dim(&self) -> usize {
        self.z.len()
    }

    pub fn z(&self) -> &[f64] {
        &self.z
    }

    pub fn inverse(&self) -> Self {
        Self {
            z: self.z.iter().map(|v| -v).collect(),
        }
    }
}

/// `result_ij = -z_i + a_ij + z_j`.
pub fn apply_scaling(a: &TropicalMatrix, s: &Scaling) -> Result<TropicalMatrix> {
    if a.dim() != s.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: s.dim(),
        });
    }
    let z = s.z();
    Ok(TropicalMatrix::from_fn(a.dim(), |i, j| {
        let v = a.get(i, j);
        if is_zero(v) {
            ZERO
        } else {
            v - z[i] + z[j]
        }
    }))
}

/// Scaling that turns a critical-part matrix `s` into a 0/−∞ matrix.
///
/// `z_i` is the maximum of row `i` of `s*`. The matrix must have cycle mean
/// 0 and every finite entry must be a critical edge.
pub fn visualizing_scaling(s: &TropicalMatrix) -> Result<Scaling> {
    let n = s.dim();
    if !s.has_finite_entry() {
        return Ok(Scaling::identity(n));
    }
    let cs = match critical_structure(s) {
        Ok(cs) => cs,
        Err(Error::NoCycles) => {
            return Err(Error::NotCriticalPart("the matrix has no cycles".into()))
        }
        Err(e) => return Err(e),
    };
    let tol = tolerance(s.max_abs_finite());
    if cs.lambda().abs() > tol {
        return Err(Error::NotCriticalPart(format!(
            "maximum cycle mean is {}, expected 0",
            cs.lambda()
        )));
    }
    let critical = cs.critical_edges();
    for i in 0..n {
        for j in 0..n {
            if !is_zero(s.get(i, j)) && critical.binary_search(&(i, j)).is_err() {
                return Err(Error::NotCriticalPart(format!(
                    "edge ({i}, {j}) is not critical"
                )));
            }
        }
    }
    let star = floyd_warshall_star(s);
    let z = star
        .rows()
        .map(|row| row.iter().copied().fold(ZERO, f64::max))
        .collect();
    Scaling::new(z)
}

/// One scaling that visualizes every `S_μ` at once; the node sets carrying
/// the terms must be pairwise disjoint.
pub fn total_visualizing_scaling(terms: &[TropicalMatrix], n: usize) -> Result<Scaling> {
    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut z = vec![0.0; n];
    for (mu, s) in terms.iter().enumerate() {
        if s.dim() != n {
            return Err(Error::Dimension {
                expected: n,
                found: s.dim(),
            });
        }
        for i in 0..n {
            let carries = (0..n).any(|j| !is_zero(s.get(i, j)) || !is_zero(s.get(j, i)));
            if !carries {
                continue;
            }
            if let Some(first) = owner[i] {
                return Err(Error::OverlappingNodeSets {
                    node: i,
                    first,
                    second: mu,
                });
            }
            owner[i] = Some(mu);
        }
        let part = visualizing_scaling(s)?;
        for (acc, v) in z.iter_mut().zip(part.z()) {
            *acc += v;
        }
    }
    Scaling::new(z)
}
