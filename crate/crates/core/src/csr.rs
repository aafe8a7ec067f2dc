//! CSR products `P^(t) = C ⊗ S^t ⊗ R` built from a definite matrix and a
//! completely reducible critical subdigraph.

use crate::error::{Error, Result};
use crate::graph::{critical_structure, single_critical_cycle, CriticalSubgraph};
use crate::kleene::{floyd_warshall_star, visualizing_scaling, Scaling};
use crate::matrix::{is_zero, tolerance, TropicalMatrix, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CriticalSelection {
    /// The whole critical digraph.
    #[default]
    Full,
    /// The shortest critical cycle through the smallest critical node.
    SingleCycle,
}

#[derive(Debug, Clone)]
pub struct CsrTriple {
    c: TropicalMatrix,
    s: TropicalMatrix,
    r: TropicalMatrix,
    crit: CriticalSubgraph,
    scaling: Scaling,
    transient: u64,
}

impl CsrTriple {
    pub fn dim(&self) -> usize {
        self.c.dim()
    }

    pub fn c(&self) -> &TropicalMatrix {
        &self.c
    }

    pub fn s(&self) -> &TropicalMatrix {
        &self.s
    }

    pub fn r(&self) -> &TropicalMatrix {
        &self.r
    }

    pub fn critical(&self) -> &CriticalSubgraph {
        &self.crit
    }

    pub fn n_c(&self) -> &[usize] {
        self.crit.nodes()
    }

    pub fn gamma(&self) -> usize {
        self.crit.gamma()
    }

    pub fn component_cyclicities(&self) -> Vec<usize> {
        self.crit
            .components()
            .iter()
            .map(|c| c.cyclicity())
            .collect()
    }

    /// Scaling `z` with `-z_i + s_ij + z_j ∈ {0, -inf}`.
    pub fn scaling(&self) -> &Scaling {
        &self.scaling
    }

    /// Exponent from which `S^t` is periodic with period `γ`.
    pub fn transient(&self) -> u64 {
        self.transient
    }

    /// Smallest exponent `e` with `S^e = S^t`, given the Wielandt bound.
    pub fn effective_exponent(&self, t: u64) -> u64 {
        if t < self.transient {
            t
        } else {
            self.transient + (t - self.transient) % self.gamma() as u64
        }
    }

    pub fn s_power(&self, t: u64) -> TropicalMatrix {
        self.s.pow(self.effective_exponent(t))
    }
}

/// Build the triple of a matrix with cycle mean 0.
pub fn csr_build(a: &TropicalMatrix, selection: CriticalSelection) -> Result<CsrTriple> {
    let cs = critical_structure(a)?;
    let tol = tolerance(a.max_abs_finite());
    if cs.lambda().abs() > tol {
        return Err(Error::NotDefinite {
            lambda: cs.lambda(),
        });
    }
    let crit = match selection {
        CriticalSelection::Full => cs.critical().clone(),
        CriticalSelection::SingleCycle => {
            CriticalSubgraph::from_edges(a.dim(), single_critical_cycle(&cs))
        }
    };
    csr_from_subgraph(a, crit)
}

/// Triple for a matrix with cycle mean 0 and a subdigraph of its critical
/// digraph; neither condition is re-checked.
pub fn csr_from_subgraph(a: &TropicalMatrix, crit: CriticalSubgraph) -> Result<CsrTriple> {
    let n = a.dim();
    if crit.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            found: crit.dim(),
        });
    }
    if crit.is_empty() {
        return Err(Error::Precondition("empty critical subdigraph".into()));
    }
    let gamma = crit.gamma();
    let b = floyd_warshall_star(&a.pow(gamma as u64));
    let mask = crit.node_mask();
    let c = TropicalMatrix::from_fn(n, |i, j| if mask[j] { b.get(i, j) } else { ZERO });
    let r = TropicalMatrix::from_fn(n, |i, j| if mask[i] { b.get(i, j) } else { ZERO });
    let mut s = TropicalMatrix::zeros(n);
    for &(i, j) in crit.edges() {
        s.set(i, j, a.get(i, j));
    }
    let scaling = visualizing_scaling(&s)?;
    let k = crit.nodes().len() as u64;
    Ok(CsrTriple {
        c,
        s,
        r,
        crit,
        scaling,
        transient: (k - 1) * (k - 1) + 1,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CsrProduct {
    pub matrix: TropicalMatrix,
    pub t_residue: u64,
}

/// `C ⊗ S^t ⊗ R`, with `S^t` reduced to a representative exponent.
pub fn csr_product(triple: &CsrTriple, t: u64) -> CsrProduct {
    let sr = triple.s_power(t).otimes_unchecked(&triple.r);
    CsrProduct {
        matrix: triple.c.otimes_unchecked(&sr),
        t_residue: t % triple.gamma() as u64,
    }
}

/// `P^(t1+t2) = P^(t1) ⊗ P^(t2)`.
pub fn csr_group_check(triple: &CsrTriple, t1: u64, t2: u64) -> bool {
    let lhs = csr_product(triple, t1 + t2).matrix;
    let rhs = csr_product(triple, t1)
        .matrix
        .otimes_unchecked(&csr_product(triple, t2).matrix);
    let tol = tolerance(lhs.max_abs_finite());
    lhs.approx_eq(&rhs, tol).unwrap_or(false)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Block {
    /// Rows supported on `N_c`, such as `S^r ⊗ R`.
    Rows,
    /// Columns supported on `N_c`, such as `C ⊗ S^r`.
    Columns,
}

/// Turn `S^r ⊗ R` into `S^(r+dt) ⊗ R` (or `C ⊗ S^r` into `C ⊗ S^(r+dt)`) by
/// permuting critical rows (columns) along the cyclic classes.
pub fn csr_rotate(
    triple: &CsrTriple,
    m: &TropicalMatrix,
    block: Block,
    dt: i64,
) -> Result<TropicalMatrix> {
    let n = triple.dim();
    if m.dim() != n {
        return Err(Error::Dimension {
            expected: n,
            found: m.dim(),
        });
    }
    let crit = &triple.crit;
    for i in (0..n).filter(|&i| !crit.contains(i)) {
        let stray = match block {
            Block::Rows => m.row(i).iter().any(|v| !is_zero(*v)),
            Block::Columns => m.column(i).iter().any(|v| !is_zero(*v)),
        };
        if stray {
            return Err(Error::InvalidBlock(format!(
                "{} {i} lies outside the critical nodes but has finite entries",
                match block {
                    Block::Rows => "row",
                    Block::Columns => "column",
                }
            )));
        }
    }

    Ok(rotate_classes(crit, triple.scaling.z(), m, block, dt))
}

pub(crate) fn rotate_classes(
    crit: &CriticalSubgraph,
    z: &[f64],
    m: &TropicalMatrix,
    block: Block,
    dt: i64,
) -> TropicalMatrix {
    let n = m.dim();
    let mut out = TropicalMatrix::zeros(n);
    for comp in crit.components() {
        let classes = comp.class_members();
        let gamma = comp.cyclicity() as i64;
        for (c, members) in classes.iter().enumerate() {
            let source = &classes[(c as i64 + dt).rem_euclid(gamma) as usize];
            let sink = &classes[(c as i64 - dt).rem_euclid(gamma) as usize];
            for &i in members {
                for k in 0..n {
                    let v = match block {
                        Block::Rows => source
                            .iter()
                            .map(|&j| shift(m.get(j, k), z[i] - z[j]))
                            .fold(ZERO, f64::max),
                        Block::Columns => sink
                            .iter()
                            .map(|&j| shift(m.get(k, j), z[j] - z[i]))
                            .fold(ZERO, f64::max),
                    };
                    match block {
                        Block::Rows => out.set(i, k, v),
                        Block::Columns => out.set(k, i, v),
                    }
                }
            }
        }
    }
    out
}

fn shift(v: f64, by: f64) -> f64 {
    if is_zero(v) {
        ZERO
    } else {
        v + by
    }
}
