//! Nachtigall and ultimate expansions `A^t = ⊕ λ_μ^t ⊗ P_μ^(t)`.

use std::collections::HashMap;

use crate::csr::{
    csr_from_subgraph, csr_product, rotate_classes, Block, CriticalSelection, CsrTriple,
};
use crate::error::{Error, Result};
use crate::graph::{critical_structure, lcm, single_critical_cycle, CriticalSubgraph};
use crate::kleene::visualizing_scaling;
use crate::matrix::{tolerance, TropicalMatrix, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExpansionKind {
    NachtigallCanonical,
    NachtigallCycle,
    Ultimate,
}

impl ExpansionKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::NachtigallCanonical => "nachtigall-canonical",
            Self::NachtigallCycle => "nachtigall-cycle",
            Self::Ultimate => "ultimate",
        }
    }
}

#[derive(Debug, Clone)]
pub struct DeflationStep {
    pub mu: usize,
    /// Nodes still present before this step.
    pub k_set: Vec<usize>,
    /// `A` with every row and column outside `k_set` set to `-inf`.
    pub a_mu: TropicalMatrix,
    pub lambda_mu: f64,
    pub crit_mu: CriticalSubgraph,
    /// Ultimate variant only: nodes of the components of `D(A)` that meet
    /// `crit_mu`.
    pub m_set: Option<Vec<usize>>,
}

impl DeflationStep {
    /// `A_μ - λ_μ`.
    pub fn normalized(&self) -> TropicalMatrix {
        self.a_mu.scale(-self.lambda_mu)
    }

    /// Nodes removed after this step.
    pub fn removed(&self) -> &[usize] {
        self.m_set.as_deref().unwrap_or(self.crit_mu.nodes())
    }
}

/// Deflation sequence: select a critical subdigraph of `A_μ`, remove its
/// nodes (or the components containing them), repeat until acyclic.
pub fn deflate(a: &TropicalMatrix, kind: ExpansionKind) -> Result<Vec<DeflationStep>> {
    let n = a.dim();
    let mut keep = vec![true; n];
    let mut steps = Vec::new();
    loop {
        let a_mu = a.restrict(&keep);
        let cs = match critical_structure(&a_mu) {
            Ok(cs) => cs,
            Err(Error::NoCycles) if !steps.is_empty() => break,
            Err(e) => return Err(e),
        };
        let crit_mu = match kind {
            ExpansionKind::NachtigallCycle => {
                CriticalSubgraph::from_edges(n, single_critical_cycle(&cs))
            }
            _ => cs.critical().clone(),
        };
        let m_set = (kind == ExpansionKind::Ultimate).then(|| {
            let scc = cs.scc();
            let mut hit = vec![false; scc.len()];
            for &v in crit_mu.nodes() {
                hit[scc.component_of(v)] = true;
            }
            (0..n)
                .filter(|&v| hit[scc.component_of(v)])
                .collect::<Vec<_>>()
        });
        let step = DeflationStep {
            mu: steps.len(),
            k_set: (0..n).filter(|&v| keep[v]).collect(),
            a_mu,
            lambda_mu: cs.lambda(),
            crit_mu,
            m_set,
        };
        for &v in step.removed() {
            keep[v] = false;
        }
        steps.push(step);
    }
    Ok(steps)
}

#[derive(Debug, Clone)]
pub struct ExpansionTerm {
    pub step: DeflationStep,
    pub triple: CsrTriple,
}

impl ExpansionTerm {
    pub fn lambda(&self) -> f64 {
        self.step.lambda_mu
    }

    /// `P^(t)` without the `λ^t` factor.
    pub fn product(&self, t: u64) -> TropicalMatrix {
        csr_product(&self.triple, t).matrix
    }

    /// `λ^t ⊗ P^(t)`.
    pub fn value(&self, t: u64) -> TropicalMatrix {
        self.product(t).scale(self.lambda() * t as f64)
    }
}

#[derive(Debug, Clone)]
pub struct Expansion {
    kind: ExpansionKind,
    n: usize,
    terms: Vec<ExpansionTerm>,
    sigma: Option<Vec<usize>>,
    gamma: usize,
    validity_threshold: Option<u64>,
}

impl Expansion {
    pub fn kind(&self) -> ExpansionKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn terms(&self) -> &[ExpansionTerm] {
        &self.terms
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.terms.iter().map(ExpansionTerm::lambda).collect()
    }

    pub fn gammas(&self) -> Vec<usize> {
        self.terms.iter().map(|t| t.triple.gamma()).collect()
    }

    /// Ultimate variant: index of the canonical Nachtigall term with the
    /// same cycle mean, for each term.
    pub fn sigma(&self) -> Option<&[usize]> {
        self.sigma.as_deref()
    }

    /// l.c.m. of the term cyclicities.
    pub fn gamma(&self) -> usize {
        self.gamma
    }

    /// `3n²` for Nachtigall expansions; for the ultimate one, set by
    /// [`Expansion::with_threshold`] once measured.
    pub fn validity_threshold(&self) -> Option<u64> {
        self.validity_threshold
    }

    pub fn with_threshold(mut self, t: u64) -> Self {
        self.validity_threshold = Some(t);
        self
    }
}

fn build_terms(steps: Vec<DeflationStep>) -> Result<Vec<ExpansionTerm>> {
    steps
        .into_iter()
        .map(|step| {
            let triple = csr_from_subgraph(&step.normalized(), step.crit_mu.clone())?;
            Ok(ExpansionTerm { step, triple })
        })
        .collect()
}

fn gamma_of(terms: &[ExpansionTerm]) -> usize {
    terms.iter().fold(1, |acc, t| lcm(acc, t.triple.gamma()))
}

pub fn nachtigall_expand(a: &TropicalMatrix, rule: CriticalSelection) -> Result<Expansion> {
    let kind = match rule {
        CriticalSelection::Full => ExpansionKind::NachtigallCanonical,
        CriticalSelection::SingleCycle => ExpansionKind::NachtigallCycle,
    };
    let terms = build_terms(deflate(a, kind)?)?;
    let n = a.dim() as u64;
    Ok(Expansion {
        kind,
        n: a.dim(),
        gamma: gamma_of(&terms),
        terms,
        sigma: None,
        validity_threshold: Some(3 * n * n),
    })
}

pub fn ultimate_expand(a: &TropicalMatrix) -> Result<Expansion> {
    let steps = deflate(a, ExpansionKind::Ultimate)?;
    let canonical: Vec<f64> = deflate(a, ExpansionKind::NachtigallCanonical)?
        .iter()
        .map(|s| s.lambda_mu)
        .collect();
    let tol = tolerance(a.max_abs_finite());
    let sigma = steps
        .iter()
        .map(|s| {
            canonical
                .iter()
                .position(|&l| (l - s.lambda_mu).abs() <= tol)
                .ok_or_else(|| {
                    Error::Precondition(format!(
                        "cycle mean {} has no canonical counterpart",
                        s.lambda_mu
                    ))
                })
        })
        .collect::<Result<Vec<_>>>()?;
    let terms = build_terms(steps)?;
    Ok(Expansion {
        kind: ExpansionKind::Ultimate,
        n: a.dim(),
        gamma: gamma_of(&terms),
        terms,
        sigma: Some(sigma),
        validity_threshold: None,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpansionEvaluation {
    pub t: u64,
    pub matrix: TropicalMatrix,
    pub per_term: Vec<TropicalMatrix>,
}

/// `⊕_ν λ_ν^t ⊗ P_ν^(t)`.
pub fn evaluate(e: &Expansion, t: u64) -> ExpansionEvaluation {
    let per_term: Vec<TropicalMatrix> = e.terms.iter().map(|term| term.value(t)).collect();
    let mut matrix = TropicalMatrix::zeros(e.n);
    for m in &per_term {
        matrix = matrix.oplus(m).expect("terms share the dimension");
    }
    ExpansionEvaluation {
        t,
        matrix,
        per_term,
    }
}

/// Term products `P_μ^(t)` by squaring and class rotation instead of
/// Kleene stars.
///
/// Each normalized `A_μ` is squared up to `r = 2^k ≥ 3n²`; its critical rows
/// are `S^r ⊗ R` and its critical columns `C ⊗ S^r`. Rotating them to
/// `S^t ⊗ R` and `C` costs one permutation each, and one product finishes
/// the term.
pub fn fast_terms(a: &TropicalMatrix, t: u64, kind: ExpansionKind) -> Result<Vec<TropicalMatrix>> {
    let n = a.dim();
    let bound = 3 * (n as u64) * (n as u64);
    let squarings = 64 - (bound.max(1) - 1).leading_zeros();
    let r = 1u64 << squarings;

    deflate(a, kind)?
        .iter()
        .map(|step| {
            let k_set = &step.k_set;
            let k = k_set.len();
            let mut local = vec![usize::MAX; n];
            for (p, &v) in k_set.iter().enumerate() {
                local[v] = p;
            }
            let normalized = step.normalized();
            let mut m = TropicalMatrix::from_fn(k, |p, q| normalized.get(k_set[p], k_set[q]));
            for _ in 0..squarings {
                m = m.otimes_unchecked(&m);
            }

            let crit = CriticalSubgraph::from_edges(
                k,
                step.crit_mu
                    .edges()
                    .iter()
                    .map(|&(i, j)| (local[i], local[j]))
                    .collect(),
            );
            let mut s = TropicalMatrix::zeros(k);
            for &(i, j) in crit.edges() {
                s.set(i, j, normalized.get(k_set[i], k_set[j]));
            }
            let z = visualizing_scaling(&s)?;
            let mask = crit.node_mask();
            let rows = TropicalMatrix::from_fn(k, |p, q| if mask[p] { m.get(p, q) } else { ZERO });
            let cols = TropicalMatrix::from_fn(k, |p, q| if mask[q] { m.get(p, q) } else { ZERO });
            let dt = t as i128 - r as i128;
            let gamma = crit.gamma() as i128;
            let sr = rotate_classes(
                &crit,
                z.z(),
                &rows,
                Block::Rows,
                dt.rem_euclid(gamma) as i64,
            );
            let c = rotate_classes(
                &crit,
                z.z(),
                &cols,
                Block::Columns,
                (-(r as i128)).rem_euclid(gamma) as i64,
            );
            let p = c.otimes_unchecked(&sr);

            let mut out = TropicalMatrix::zeros(n);
            for (pi, &i) in k_set.iter().enumerate() {
                for (qj, &j) in k_set.iter().enumerate() {
                    out.set(i, j, p.get(pi, qj));
                }
            }
            Ok(out)
        })
        .collect()
}

/// Horizon used by [`ultimate_threshold`] when none is given: `10 · 3n²`.
pub fn default_threshold_horizon(n: usize) -> u64 {
    30 * (n as u64) * (n as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Threshold {
    /// Expansion and powers agree for every checked `t ≥` this value.
    Found(u64),
    /// Some disagreement remains beyond the horizon.
    Exceeds(u64),
}

/// Smallest `t'` such that `evaluate(e, t) = A^t` for every
/// `t' ≤ t ≤ t_max + γ`.
pub fn ultimate_threshold(a: &TropicalMatrix, e: &Expansion, t_max: u64) -> Threshold {
    let end = t_max + e.gamma() as u64;
    let mut cache: Vec<HashMap<u64, TropicalMatrix>> = vec![HashMap::new(); e.terms.len()];
    let mut power = TropicalMatrix::identity(a.dim());
    let mut last_bad: Option<u64> = None;
    for t in 0..=end {
        if t > 0 {
            power = power.otimes_unchecked(a);
        }
        let mut sum = TropicalMatrix::zeros(a.dim());
        for (term, memo) in e.terms.iter().zip(cache.iter_mut()) {
            let key = term.triple.effective_exponent(t);
            let p = memo.entry(key).or_insert_with(|| term.product(t));
            sum = sum
                .oplus(&p.scale(term.lambda() * t as f64))
                .expect("terms share the dimension");
        }
        let tol = tolerance(power.max_abs_finite().max(sum.max_abs_finite()));
        if !power.approx_eq(&sum, tol).expect("same dimension") {
            last_bad = Some(t);
        }
    }
    match last_bad {
        None => Threshold::Found(0),
        Some(t) if t < t_max => Threshold::Found(t + 1),
        Some(_) => Threshold::Exceeds(t_max),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::kleene::{apply_scaling, total_visualizing_scaling};
    use crate::matrix::is_zero;

    /// Whether every finite entry of `m` is zero.
    fn is_boolean(m: &TropicalMatrix) -> bool {
        m.rows().flatten().all(|&v| is_zero(v) || v == 0.0)
    }

    #[test]
    fn example1_canonical() {
        let a = fixtures::example1();
        let e = nachtigall_expand(&a, CriticalSelection::Full).unwrap();
        assert_eq!(e.lambdas(), vec![0.0, -1.0, -2.0]);
        assert_eq!(e.gammas(), vec![2, 1, 1]);
        assert_eq!(e.validity_threshold(), Some(48));
        let [n10, n20, n30, n11] = fixtures::example1_nachtigall();
        let terms = e.terms();
        assert_eq!(terms[0].product(0), n10);
        assert_eq!(terms[0].product(1), n11);
        assert_eq!(terms[1].product(0), n20);
        assert_eq!(terms[2].product(0), n30);
        assert_eq!(terms[1].step.k_set, vec![2, 3]);
    }

    #[test]
    fn example1_identities() {
        let a = fixtures::example1();
        let e = nachtigall_expand(&a, CriticalSelection::Full).unwrap();
        for t in [2, 3, 4, 10] {
            let want = fixtures::example1_power(t).unwrap();
            assert_eq!(a.pow(t), want);
            assert_eq!(evaluate(&e, t).matrix, want, "t = {t}");
        }
        let four = evaluate(&e, 4);
        assert!(four.per_term[2].approx_le(&four.matrix, 0.0).unwrap());
        let partial = four.per_term[0].oplus(&four.per_term[1]).unwrap();
        assert_eq!(partial, four.matrix);
    }

    #[test]
    fn example1_threshold() {
        let a = fixtures::example1();
        let e = ultimate_expand(&a).unwrap();
        assert_eq!(e.terms().len(), 1);
        assert_eq!(e.terms()[0].product(0), fixtures::example1_nachtigall()[0]);
        assert_eq!(ultimate_threshold(&a, &e, 480), Threshold::Found(10));
    }

    #[test]
    fn single_entry() {
        let a = TropicalMatrix::from_rows(vec![vec![-3.0]]).unwrap();
        let e = nachtigall_expand(&a, CriticalSelection::Full).unwrap();
        assert_eq!(e.lambdas(), vec![-3.0]);
        assert_eq!(
            e.terms()[0].product(0),
            TropicalMatrix::from_rows(vec![vec![0.0]]).unwrap()
        );
    }

    #[test]
    fn acyclic_is_rejected() {
        let a = TropicalMatrix::zeros(2);
        assert_eq!(
            nachtigall_expand(&a, CriticalSelection::Full).unwrap_err(),
            Error::NoCycles
        );
        assert_eq!(ultimate_expand(&a).unwrap_err(), Error::NoCycles);
    }

    #[test]
    fn example2_ultimate() {
        let a = fixtures::example2();
        let e = ultimate_expand(&a).unwrap();
        assert_eq!(e.lambdas(), vec![0.0, -1.0]);
        assert_eq!(e.sigma(), Some(&[0, 1][..]));
        let t2 = &e.terms()[1].triple;
        assert_eq!(t2.n_c(), &[4]);
        let c: Vec<f64> = t2.c().column(4)[4..].to_vec();
        assert_eq!(c, vec![0.0, -2.0, -4.0]);
        assert_eq!(&t2.r().row(4)[4..], &[0.0, -6.0, -4.0]);
        assert!(t2.r().row(4)[..4].iter().all(|v| is_zero(*v)));
        let m1 = e.terms()[0].step.m_set.clone().unwrap();
        assert_eq!(m1, vec![0, 1, 2, 3]);

        let u1 = &e.terms()[0];
        let u2 = &e.terms()[1];
        for t in 9..=12u64 {
            let want = u1
                .product(t % 2)
                .oplus(&u2.product(0).scale(-(t as f64)))
                .unwrap();
            assert_eq!(a.pow(t), want, "t = {t}");
        }
        assert_eq!(ultimate_threshold(&a, &e, 1470), Threshold::Found(9));
    }

    #[test]
    fn example2_nachtigall_row_differs() {
        let a = fixtures::example2();
        let e = nachtigall_expand(&a, CriticalSelection::Full).unwrap();
        assert_eq!(e.lambdas()[..2], [0.0, -1.0]);
        let t2 = &e.terms()[1].triple;
        assert_eq!(t2.n_c(), &[4]);
        assert_eq!(&t2.r().row(4)[2..], &[-4.0, -3.0, 0.0, -6.0, -4.0]);
        let u = ultimate_expand(&a).unwrap();
        assert_eq!(u.terms()[1].triple.c(), t2.c());
        assert_ne!(u.terms()[1].triple.r(), t2.r());
    }

    #[test]
    fn example3_odd_terms() {
        let a = fixtures::example3_a();
        let e = ultimate_expand(&a).unwrap();
        assert_eq!(e.lambdas(), vec![1.0, 0.0]);
        assert_eq!(e.gammas(), vec![4, 2]);
        assert_eq!(e.terms()[0].product(1), fixtures::example3_a_u1());
        assert_eq!(e.terms()[1].product(1), fixtures::example3_u2());
        let b = ultimate_expand(&fixtures::example3_b()).unwrap();
        assert_eq!(b.terms()[0].product(1), fixtures::example3_b_u1());
        assert_eq!(b.terms()[1].product(1), fixtures::example3_u2());
    }

    #[test]
    fn fast_route_matches_literal() {
        for (a, kind) in [
            (fixtures::example1(), ExpansionKind::NachtigallCanonical),
            (fixtures::example2(), ExpansionKind::Ultimate),
            (fixtures::example2(), ExpansionKind::NachtigallCycle),
            (fixtures::example3_b(), ExpansionKind::Ultimate),
        ] {
            let e = match kind {
                ExpansionKind::Ultimate => ultimate_expand(&a).unwrap(),
                ExpansionKind::NachtigallCanonical => {
                    nachtigall_expand(&a, CriticalSelection::Full).unwrap()
                }
                ExpansionKind::NachtigallCycle => {
                    nachtigall_expand(&a, CriticalSelection::SingleCycle).unwrap()
                }
            };
            for t in [0, 1, 2, 3, 48, 49, 1000] {
                let fast = fast_terms(&a, t, kind).unwrap();
                assert_eq!(fast.len(), e.terms().len());
                for (f, term) in fast.iter().zip(e.terms()) {
                    assert_eq!(f, &term.product(t), "{kind:?} t = {t}");
                }
            }
        }
    }

    #[test]
    fn totally_visualized() {
        let e = nachtigall_expand(&fixtures::example2(), CriticalSelection::Full).unwrap();
        let s: Vec<TropicalMatrix> = e.terms().iter().map(|t| t.triple.s().clone()).collect();
        let z = total_visualizing_scaling(&s, 7).unwrap();
        for m in &s {
            assert!(is_boolean(&apply_scaling(m, &z).unwrap()));
        }
    }
}
