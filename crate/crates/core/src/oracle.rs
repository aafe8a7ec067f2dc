//! Brute-force references for small matrices: path-weight dynamic programs
//! over restricted path classes, Boolean reachability, simple cycles.
//!
//! Nothing here calls into the production algorithms it is meant to check.

use crate::error::{Error, Result};
use crate::expansion::Expansion;
use crate::matrix::{is_zero, TropicalMatrix, ZERO};

pub const DEFAULT_ORACLE_CAP: usize = 8;
pub const MAX_ORACLE_LENGTH: u64 = 60;

const EPS: f64 = 1e-9;

fn weight(a: &TropicalMatrix, i: usize, j: usize) -> f64 {
    a.row(i)[j]
}

/// All simple cycles, each listed once starting from its smallest node.
pub fn simple_cycles(a: &TropicalMatrix) -> Vec<Vec<usize>> {
    let n = a.dim();
    let mut out = Vec::new();
    for s in 0..n {
        let mut path = vec![s];
        let mut used = vec![false; n];
        used[s] = true;
        extend_cycles(a, s, &mut path, &mut used, &mut out);
    }
    out
}

fn extend_cycles(
    a: &TropicalMatrix,
    s: usize,
    path: &mut Vec<usize>,
    used: &mut [bool],
    out: &mut Vec<Vec<usize>>,
) {
    let v = *path.last().unwrap();
    for w in s..a.dim() {
        if is_zero(weight(a, v, w)) {
            continue;
        }
        if w == s {
            out.push(path.clone());
        } else if !used[w] {
            used[w] = true;
            path.push(w);
            extend_cycles(a, s, path, used, out);
            path.pop();
            used[w] = false;
        }
    }
}

pub fn cycle_mean(a: &TropicalMatrix, cycle: &[usize]) -> f64 {
    let k = cycle.len();
    let total: f64 = (0..k)
        .map(|p| weight(a, cycle[p], cycle[(p + 1) % k]))
        .sum();
    total / k as f64
}

/// Equal up to `EPS`; infinities only match themselves.
fn same(x: f64, y: f64) -> bool {
    x == y || (x.is_finite() && y.is_finite() && (x - y).abs() <= EPS * (1.0 + y.abs()))
}

/// Maximum cycle mean by enumerating simple cycles; `-inf` if acyclic.
pub fn brute_force_lambda(a: &TropicalMatrix) -> f64 {
    simple_cycles(a)
        .iter()
        .map(|c| cycle_mean(a, c))
        .fold(ZERO, f64::max)
}

/// Nodes on simple cycles of maximum mean.
fn brute_force_critical_nodes(a: &TropicalMatrix) -> (f64, Vec<bool>) {
    let cycles = simple_cycles(a);
    let lambda = cycles.iter().map(|c| cycle_mean(a, c)).fold(ZERO, f64::max);
    let mut on = vec![false; a.dim()];
    for c in &cycles {
        if (cycle_mean(a, c) - lambda).abs() <= EPS * (1.0 + lambda.abs()) {
            for &v in c {
                on[v] = true;
            }
        }
    }
    (lambda, on)
}

/// Reachability in exactly `t` steps, by Boolean squaring.
pub fn boolean_power_reach(a: &TropicalMatrix, t: u64) -> Vec<Vec<bool>> {
    let n = a.dim();
    let mul = |x: &Vec<Vec<bool>>, y: &Vec<Vec<bool>>| -> Vec<Vec<bool>> {
        (0..n)
            .map(|i| (0..n).map(|j| (0..n).any(|k| x[i][k] && y[k][j])).collect())
            .collect()
    };
    let mut result: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
    let mut base: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| !is_zero(weight(a, i, j))).collect())
        .collect();
    let mut e = t;
    while e > 0 {
        if e & 1 == 1 {
            result = mul(&result, &base);
        }
        base = mul(&base, &base);
        e >>= 1;
    }
    result
}

/// Reflexive-transitive closure of the edge pattern.
fn reach_closure(a: &TropicalMatrix) -> Vec<Vec<bool>> {
    let n = a.dim();
    let mut r: Vec<Vec<bool>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| i == j || !is_zero(weight(a, i, j)))
                .collect()
        })
        .collect();
    for k in 0..n {
        for i in 0..n {
            if r[i][k] {
                for j in 0..n {
                    if r[k][j] {
                        r[i][j] = true;
                    }
                }
            }
        }
    }
    r
}

/// Labels needed to classify paths as `μ`-heavy or `μ`-hard.
#[derive(Debug, Clone, PartialEq)]
pub struct DeflationRecord {
    /// `μ(i)`: deflation step that removed node `i`, if any.
    pub heavy_level: Vec<Option<usize>>,
    pub heavy_count: usize,
    /// Cycle mean of the component of `D(A)` holding each node; `-inf` for
    /// trivial components.
    pub node_lambda: Vec<f64>,
    /// `λ_μ` of the ultimate deflation steps.
    pub hard_lambdas: Vec<f64>,
    /// Critical nodes selected at each ultimate step.
    pub hard_nodes: Vec<Vec<usize>>,
}

impl DeflationRecord {
    /// Canonical Nachtigall labels and ultimate labels from cycle
    /// enumeration.
    pub fn brute_force(a: &TropicalMatrix) -> Self {
        let n = a.dim();
        let reach = reach_closure(a);
        let node_lambda: Vec<f64> = (0..n)
            .map(|i| {
                let keep: Vec<bool> = (0..n).map(|j| reach[i][j] && reach[j][i]).collect();
                brute_force_lambda(&a.restrict(&keep))
            })
            .collect();

        let mut heavy_level = vec![None; n];
        let mut keep = vec![true; n];
        let mut heavy_count = 0;
        loop {
            let (lambda, on) = brute_force_critical_nodes(&a.restrict(&keep));
            if is_zero(lambda) {
                break;
            }
            for v in (0..n).filter(|&v| on[v]) {
                heavy_level[v] = Some(heavy_count);
                keep[v] = false;
            }
            heavy_count += 1;
        }

        let mut hard_lambdas = Vec::new();
        let mut hard_nodes = Vec::new();
        let mut keep = vec![true; n];
        loop {
            let (lambda, on) = brute_force_critical_nodes(&a.restrict(&keep));
            if is_zero(lambda) {
                break;
            }
            let crit: Vec<usize> = (0..n).filter(|&v| on[v]).collect();
            for v in 0..n {
                if crit.iter().any(|&c| reach[v][c] && reach[c][v]) {
                    keep[v] = false;
                }
            }
            hard_lambdas.push(lambda);
            hard_nodes.push(crit);
        }

        Self {
            heavy_level,
            heavy_count,
            node_lambda,
            hard_lambdas,
            hard_nodes,
        }
    }

    /// Labels read off a Nachtigall and an ultimate expansion of `a`.
    pub fn from_expansions(
        a: &TropicalMatrix,
        nachtigall: &Expansion,
        ultimate: &Expansion,
    ) -> Self {
        let n = a.dim();
        let mut heavy_level = vec![None; n];
        for (mu, term) in nachtigall.terms().iter().enumerate() {
            for &v in term.step.crit_mu.nodes() {
                heavy_level[v] = Some(mu);
            }
        }
        let brute = Self::brute_force(a);
        Self {
            heavy_level,
            heavy_count: nachtigall.terms().len(),
            node_lambda: brute.node_lambda,
            hard_lambdas: ultimate.lambdas(),
            hard_nodes: ultimate
                .terms()
                .iter()
                .map(|t| t.step.crit_mu.nodes().to_vec())
                .collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum PathClass {
    All,
    /// Paths visiting at least one of the given nodes.
    CritHeavy(Vec<usize>),
    /// Paths whose smallest visited deflation level is `μ`.
    MuHeavy(usize),
    /// Paths visiting a node selected at ultimate step `μ` and whose largest
    /// visited component cycle mean is `λ_μ`.
    MuHard(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathClassQuery {
    pub i: usize,
    pub j: usize,
    pub t: u64,
    pub class: PathClass,
}

/// Automaton over node labels: a path's label is folded from its nodes and
/// the class accepts some final labels.
struct Automaton {
    labels: usize,
    init: Box<dyn Fn(usize) -> usize>,
    step: Box<dyn Fn(usize, usize) -> usize>,
    accept: Box<dyn Fn(usize) -> bool>,
}

fn automaton(n: usize, class: &PathClass, record: Option<&DeflationRecord>) -> Result<Automaton> {
    let need =
        || record.ok_or_else(|| Error::Precondition("path class needs a deflation record".into()));
    Ok(match class {
        PathClass::All => Automaton {
            labels: 1,
            init: Box::new(|_| 0),
            step: Box::new(|l, _| l),
            accept: Box::new(|_| true),
        },
        PathClass::CritHeavy(nodes) => {
            let mut mark = vec![false; n];
            for &v in nodes {
                if v >= n {
                    return Err(Error::NodeOutOfRange { node: v, n });
                }
                mark[v] = true;
            }
            let m2 = mark.clone();
            Automaton {
                labels: 2,
                init: Box::new(move |v| mark[v] as usize),
                step: Box::new(move |l, v| l | m2[v] as usize),
                accept: Box::new(|l| l == 1),
            }
        }
        PathClass::MuHeavy(mu) => {
            let rec = need()?;
            if *mu >= rec.heavy_count {
                return Err(Error::UnknownComponent(*mu));
            }
            // label = min level so far, heavy_count standing for "none"
            let none = rec.heavy_count;
            let level: Vec<usize> = rec.heavy_level.iter().map(|l| l.unwrap_or(none)).collect();
            let l2 = level.clone();
            let mu = *mu;
            Automaton {
                labels: none + 1,
                init: Box::new(move |v| level[v]),
                step: Box::new(move |l, v| l.min(l2[v])),
                accept: Box::new(move |l| l == mu),
            }
        }
        PathClass::MuHard(mu) => {
            let rec = need()?;
            if *mu >= rec.hard_lambdas.len() {
                return Err(Error::UnknownComponent(*mu));
            }
            let mut levels: Vec<f64> = rec.node_lambda.clone();
            levels.sort_by(|x, y| x.partial_cmp(y).unwrap());
            levels.dedup_by(|x, y| same(*x, *y));
            let rank = |x: f64| -> usize {
                levels
                    .iter()
                    .position(|&l| same(l, x))
                    .expect("every node level is listed")
            };
            let node_rank: Vec<usize> = rec.node_lambda.iter().map(|&x| rank(x)).collect();
            let target = levels.iter().position(|&l| same(l, rec.hard_lambdas[*mu]));
            let mut mark = vec![false; n];
            for &v in &rec.hard_nodes[*mu] {
                mark[v] = true;
            }
            let k = levels.len();
            let (r2, m2) = (node_rank.clone(), mark.clone());
            // label = 2 * (max rank so far) + visited flag
            Automaton {
                labels: 2 * k,
                init: Box::new(move |v| 2 * node_rank[v] + mark[v] as usize),
                step: Box::new(move |l, v| 2 * (l / 2).max(r2[v]) + ((l & 1) | m2[v] as usize)),
                accept: Box::new(move |l| l & 1 == 1 && Some(l / 2) == target),
            }
        }
    })
}

/// `best[t][i]` holds, per (node, label) state, the best weight of a
/// length-`t` path from `i`.
fn run(a: &TropicalMatrix, aut: &Automaton, t_max: u64) -> Vec<Vec<Vec<f64>>> {
    let n = a.dim();
    let l = aut.labels;
    let mut out = vec![vec![vec![ZERO; n * l]; n]; t_max as usize + 1];
    for i in 0..n {
        out[0][i][i * l + (aut.init)(i)] = 0.0;
    }
    for t in 1..=t_max as usize {
        for i in 0..n {
            let (prev, cur) = out.split_at_mut(t);
            let prev = &prev[t - 1][i];
            let cur = &mut cur[0][i];
            for u in 0..n {
                for lab in 0..l {
                    let w0 = prev[u * l + lab];
                    if is_zero(w0) {
                        continue;
                    }
                    for v in 0..n {
                        let w = weight(a, u, v);
                        if is_zero(w) {
                            continue;
                        }
                        let idx = v * l + (aut.step)(lab, v);
                        if w0 + w > cur[idx] {
                            cur[idx] = w0 + w;
                        }
                    }
                }
            }
        }
    }
    out
}

fn collapse(aut: &Automaton, n: usize, layer: &[Vec<f64>]) -> TropicalMatrix {
    let l = aut.labels;
    TropicalMatrix::from_fn(n, |i, j| {
        (0..l)
            .filter(|&lab| (aut.accept)(lab))
            .map(|lab| layer[i][j * l + lab])
            .fold(ZERO, f64::max)
    })
}

/// Best weight of a length-`t` path from `i` to `j` in the class; `-inf`
/// when the class is empty.
pub fn best_path_weight(
    a: &TropicalMatrix,
    q: &PathClassQuery,
    record: Option<&DeflationRecord>,
) -> Result<f64> {
    let n = a.dim();
    for node in [q.i, q.j] {
        if node >= n {
            return Err(Error::NodeOutOfRange { node, n });
        }
    }
    Ok(best_path_weights(a, &q.class, record, q.t)?[q.t as usize].get(q.i, q.j))
}

/// Matrices of best class weights for every length `0..=t_max`.
pub fn best_path_weights(
    a: &TropicalMatrix,
    class: &PathClass,
    record: Option<&DeflationRecord>,
    t_max: u64,
) -> Result<Vec<TropicalMatrix>> {
    let aut = automaton(a.dim(), class, record)?;
    Ok(run(a, &aut, t_max)
        .iter()
        .map(|layer| collapse(&aut, a.dim(), layer))
        .collect())
}

/// Every class weight for all lengths up to `t_max`.
#[derive(Debug, Clone)]
pub struct OracleTable {
    pub record: DeflationRecord,
    /// Critical nodes of `A` from cycle enumeration.
    pub critical_nodes: Vec<usize>,
    pub all: Vec<TropicalMatrix>,
    pub crit_heavy: Vec<TropicalMatrix>,
    /// Indexed by `μ`, then `t`.
    pub mu_heavy: Vec<Vec<TropicalMatrix>>,
    pub mu_hard: Vec<Vec<TropicalMatrix>>,
}

pub fn enumerate_small(a: &TropicalMatrix, t_max: u64) -> Result<OracleTable> {
    enumerate_small_capped(a, t_max, DEFAULT_ORACLE_CAP)
}

pub fn enumerate_small_capped(a: &TropicalMatrix, t_max: u64, cap: usize) -> Result<OracleTable> {
    let n = a.dim();
    if n > cap {
        return Err(Error::TooLargeForOracle { n, cap });
    }
    if t_max > MAX_ORACLE_LENGTH {
        return Err(Error::Precondition(format!(
            "oracle path length {t_max} exceeds {MAX_ORACLE_LENGTH}"
        )));
    }
    let record = DeflationRecord::brute_force(a);
    let (_, on) = brute_force_critical_nodes(a);
    let critical_nodes: Vec<usize> = (0..n).filter(|&v| on[v]).collect();
    let all = best_path_weights(a, &PathClass::All, None, t_max)?;
    let crit_heavy = best_path_weights(
        a,
        &PathClass::CritHeavy(critical_nodes.clone()),
        None,
        t_max,
    )?;
    let mu_heavy = (0..record.heavy_count)
        .map(|mu| best_path_weights(a, &PathClass::MuHeavy(mu), Some(&record), t_max))
        .collect::<Result<_>>()?;
    let mu_hard = (0..record.hard_lambdas.len())
        .map(|mu| best_path_weights(a, &PathClass::MuHard(mu), Some(&record), t_max))
        .collect::<Result<_>>()?;
    Ok(OracleTable {
        record,
        critical_nodes,
        all,
        crit_heavy,
        mu_heavy,
        mu_hard,
    })
}
