//! Associated digraph of a max-plus matrix and its critical structure.
//!
//! Components come out of [`scc_decompose`] in Tarjan order: a component is
//! listed after every component it has access to (sinks first).

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::kleene::floyd_warshall_star;
use crate::matrix::{is_zero, tolerance, TropicalMatrix, ZERO};

/// Weighted digraph with an edge `(i, j)` for every finite `a_ij`.
#[derive(Debug, Clone)]
pub struct Digraph {
    succ: Vec<Vec<(usize, f64)>>,
}

impl Digraph {
    pub fn from_matrix(a: &TropicalMatrix) -> Self {
        let succ = a
            .rows()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .filter(|(_, w)| !is_zero(**w))
                    .map(|(j, &w)| (j, w))
                    .collect()
            })
            .collect();
        Self { succ }
    }

    pub fn node_count(&self) -> usize {
        self.succ.len()
    }

    pub fn successors(&self, i: usize) -> &[(usize, f64)] {
        &self.succ[i]
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.succ
            .iter()
            .enumerate()
            .flat_map(|(i, s)| s.iter().map(move |&(j, w)| (i, j, w)))
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.succ[i].iter().any(|&(k, _)| k == j)
    }
}

#[derive(Debug, Clone)]
pub struct SccDecomposition {
    component_of: Vec<usize>,
    components: Vec<Vec<usize>>,
    trivial: Vec<bool>,
    // access[c][d]: some path (possibly empty) leads from component c to d
    access: Vec<Vec<bool>>,
}

impl SccDecomposition {
    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn component_of(&self, node: usize) -> usize {
        self.component_of[node]
    }

    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    pub fn nodes(&self, component: usize) -> &[usize] {
        &self.components[component]
    }

    /// Single node without a self-loop.
    pub fn is_trivial(&self, component: usize) -> bool {
        self.trivial[component]
    }

    pub fn accesses(&self, from: usize, to: usize) -> bool {
        self.access[from][to]
    }

    pub fn node_accesses(&self, i: usize, j: usize) -> bool {
        self.access[self.component_of[i]][self.component_of[j]]
    }

    /// Nodes lying in nontrivial components.
    pub fn nontrivial_nodes(&self) -> Vec<usize> {
        let mut nodes: Vec<usize> = (0..self.component_of.len())
            .filter(|&i| !self.trivial[self.component_of[i]])
            .collect();
        nodes.sort_unstable();
        nodes
    }
}

/// Iterative Tarjan.
pub fn scc_decompose(g: &Digraph) -> SccDecomposition {
    let n = g.node_count();
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut component_of = vec![UNVISITED; n];
    let mut components: Vec<Vec<usize>> = Vec::new();
    let mut next = 0;

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        // (node, next successor position)
        let mut call: Vec<(usize, usize)> = vec![(root, 0)];
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&(w, _)) = g.successors(v).get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let id = components.len();
                let mut comp = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    component_of[w] = id;
                    comp.push(w);
                    if w == v {
                        break;
                    }
                }
                comp.sort_unstable();
                components.push(comp);
            }
        }
    }

    let trivial = components
        .iter()
        .map(|c| c.len() == 1 && !g.has_edge(c[0], c[0]))
        .collect();

    // Tarjan emits a component only after all components it reaches.
    let m = components.len();
    let mut access = vec![vec![false; m]; m];
    for c in 0..m {
        access[c][c] = true;
        for &v in &components[c] {
            for &(w, _) in g.successors(v) {
                let d = component_of[w];
                if d != c && !access[c][d] {
                    debug_assert!(d < c);
                    let reach = access[d].clone();
                    for (x, r) in access[c].iter_mut().zip(reach) {
                        *x |= r;
                    }
                }
            }
        }
    }

    SccDecomposition {
        component_of,
        components,
        trivial,
        access,
    }
}

/// Maximum cycle mean of the subgraph induced by `component` (Karp).
///
/// Returns `-inf` when the induced subgraph has no cycle, in particular for
/// a trivial component.
pub fn max_cycle_mean(g: &Digraph, component: &[usize]) -> f64 {
    let m = component.len();
    if m == 0 {
        return ZERO;
    }
    let n = g.node_count();
    let mut local = vec![usize::MAX; n];
    for (k, &v) in component.iter().enumerate() {
        local[v] = k;
    }
    let edges: Vec<(usize, usize, f64)> = component
        .iter()
        .flat_map(|&v| {
            g.successors(v)
                .iter()
                .filter(|(w, _)| local[*w] != usize::MAX)
                .map(|&(w, wt)| (local[v], local[w], wt))
                .collect::<Vec<_>>()
        })
        .collect();
    if edges.is_empty() {
        return ZERO;
    }

    // Karp needs every node reachable from the source; run it from every
    // unreached node so that non-strongly-connected inputs also work.
    let mut best = ZERO;
    let mut covered = vec![false; m];
    for source in 0..m {
        if covered[source] {
            continue;
        }
        let mut dist = vec![vec![ZERO; m]; m + 1];
        dist[0][source] = 0.0;
        for k in 1..=m {
            let (prev, cur) = dist.split_at_mut(k);
            let (prev, cur) = (&prev[k - 1], &mut cur[0]);
            for &(u, v, w) in &edges {
                if !is_zero(prev[u]) && prev[u] + w > cur[v] {
                    cur[v] = prev[u] + w;
                }
            }
        }
        for v in 0..m {
            if dist.iter().any(|row| !is_zero(row[v])) {
                covered[v] = true;
            }
            let dm = dist[m][v];
            if is_zero(dm) {
                continue;
            }
            let worst = (0..m)
                .filter(|&k| !is_zero(dist[k][v]))
                .map(|k| (dm - dist[k][v]) / (m - k) as f64)
                .fold(f64::INFINITY, f64::min);
            if worst > best {
                best = worst;
            }
        }
    }
    best
}

/// `λ(A)`: maximum cycle mean over the whole digraph.
pub fn max_cycle_mean_of(a: &TropicalMatrix) -> f64 {
    let g = Digraph::from_matrix(a);
    let scc = scc_decompose(&g);
    (0..scc.len())
        .filter(|&c| !scc.is_trivial(c))
        .map(|c| max_cycle_mean(&g, scc.nodes(c)))
        .fold(ZERO, f64::max)
}

pub(crate) fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

pub(crate) fn lcm(a: usize, b: usize) -> usize {
    if a == 0 || b == 0 {
        a.max(b)
    } else {
        a / gcd(a, b) * b
    }
}

/// One strongly connected piece of a completely reducible subdigraph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CyclicComponent {
    nodes: Vec<usize>,
    classes: Vec<usize>,
    cyclicity: usize,
}

impl CyclicComponent {
    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn cyclicity(&self) -> usize {
        self.cyclicity
    }

    pub fn class_of(&self, node: usize) -> Option<usize> {
        self.nodes
            .binary_search(&node)
            .ok()
            .map(|k| self.classes[k])
    }

    /// Nodes of the component grouped by cyclic class.
    pub fn class_members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.cyclicity];
        for (&v, &c) in self.nodes.iter().zip(&self.classes) {
            out[c].push(v);
        }
        out
    }

    /// Permutation of classes realised by paths of length `t`:
    /// `shift[c]` is the class reached from class `c`.
    pub fn shift(&self, t: i64) -> Vec<usize> {
        let g = self.cyclicity as i64;
        (0..self.cyclicity)
            .map(|c| (c as i64 + t).rem_euclid(g) as usize)
            .collect()
    }
}

/// A completely reducible subdigraph (disjoint union of strongly connected
/// pieces) together with its cyclic classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CriticalSubgraph {
    n: usize,
    nodes: Vec<usize>,
    edges: Vec<(usize, usize)>,
    components: Vec<CyclicComponent>,
    component_of: Vec<Option<usize>>,
    gamma: usize,
}

impl CriticalSubgraph {
    /// Build from an edge list on `n` nodes. Every edge must lie on a cycle
    /// of the edge set.
    pub fn from_edges(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        edges.dedup();
        let mut succ = vec![Vec::new(); n];
        let mut in_graph = vec![false; n];
        for &(i, j) in &edges {
            succ[i].push((j, 0.0));
            in_graph[i] = true;
            in_graph[j] = true;
        }
        let g = Digraph { succ };
        let scc = scc_decompose(&g);

        let mut components = Vec::new();
        let mut component_of = vec![None; n];
        // order pieces by their smallest node
        let mut pieces: Vec<&Vec<usize>> = scc
            .components()
            .iter()
            .filter(|c| in_graph[c[0]] && !(c.len() == 1 && !g.has_edge(c[0], c[0])))
            .collect();
        pieces.sort_by_key(|c| c[0]);
        for nodes in pieces {
            let id = components.len();
            for &v in nodes {
                component_of[v] = Some(id);
            }
            components.push(cyclic_component(&g, nodes));
        }
        debug_assert!(edges
            .iter()
            .all(|&(i, j)| component_of[i].is_some() && component_of[i] == component_of[j]));

        let nodes: Vec<usize> = (0..n).filter(|&v| component_of[v].is_some()).collect();
        let gamma = components
            .iter()
            .fold(1, |acc, c: &CyclicComponent| lcm(acc, c.cyclicity));
        Self {
            n,
            nodes,
            edges,
            components,
            component_of,
            gamma,
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn components(&self) -> &[CyclicComponent] {
        &self.components
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: usize) -> bool {
        self.component_of[node].is_some()
    }

    pub fn node_mask(&self) -> Vec<bool> {
        self.component_of.iter().map(Option::is_some).collect()
    }

    pub fn component_of(&self, node: usize) -> Option<usize> {
        self.component_of[node]
    }

    pub fn class_of(&self, node: usize) -> Option<usize> {
        self.component_of[node].and_then(|c| self.components[c].class_of(node))
    }

    /// l.c.m. of the component cyclicities.
    pub fn gamma(&self) -> usize {
        self.gamma
    }

    /// Largest component cyclicity.
    pub fn max_cyclicity(&self) -> usize {
        self.components
            .iter()
            .map(CyclicComponent::cyclicity)
            .max()
            .unwrap_or(1)
    }

    /// Class permutation for component `component` after `t` steps.
    pub fn cyclic_class_shift(&self, component: usize, t: i64) -> Result<Vec<usize>> {
        self.components
            .get(component)
            .map(|c| c.shift(t))
            .ok_or(Error::UnknownComponent(component))
    }

    /// Some node `j` with `[node] ->_t [j]`, the smallest one.
    pub fn class_successor(&self, node: usize, t: i64) -> Option<usize> {
        let c = &self.components[self.component_of[node]?];
        let target = c.shift(t)[c.class_of(node)?];
        c.nodes
            .iter()
            .zip(&c.classes)
            .find(|(_, &k)| k == target)
            .map(|(&v, _)| v)
    }
}

fn cyclic_component(g: &Digraph, nodes: &[usize]) -> CyclicComponent {
    let n = g.node_count();
    let mut level = vec![usize::MAX; n];
    let mut member = vec![false; n];
    for &v in nodes {
        member[v] = true;
    }
    let root = nodes[0];
    level[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for &(w, _) in g.successors(v) {
            if member[w] && level[w] == usize::MAX {
                level[w] = level[v] + 1;
                queue.push_back(w);
            }
        }
    }
    let mut gamma = 0;
    for &v in nodes {
        for &(w, _) in g.successors(v) {
            if member[w] {
                let d = (level[v] + 1).abs_diff(level[w]);
                gamma = gcd(gamma, d);
            }
        }
    }
    debug_assert!(gamma > 0, "component without internal edges");
    let classes = nodes.iter().map(|&v| level[v] % gamma).collect();
    CyclicComponent {
        nodes: nodes.to_vec(),
        classes,
        cyclicity: gamma,
    }
}

#[derive(Debug, Clone)]
pub struct CriticalStructure {
    scc: SccDecomposition,
    lambda_global: f64,
    lambda_of_component: Vec<f64>,
    critical: CriticalSubgraph,
    component_critical: Vec<Option<CriticalSubgraph>>,
}

impl CriticalStructure {
    pub fn scc(&self) -> &SccDecomposition {
        &self.scc
    }

    /// `λ(A)`.
    pub fn lambda(&self) -> f64 {
        self.lambda_global
    }

    /// Cycle mean of each component of `D(A)`; `-inf` for trivial ones.
    pub fn lambda_of_component(&self) -> &[f64] {
        &self.lambda_of_component
    }

    /// `λ(i)`: cycle mean of the component containing `node`.
    pub fn lambda_of_node(&self, node: usize) -> f64 {
        self.lambda_of_component[self.scc.component_of(node)]
    }

    /// The critical digraph `C(A)`.
    pub fn critical(&self) -> &CriticalSubgraph {
        &self.critical
    }

    pub fn critical_nodes(&self) -> &[usize] {
        self.critical.nodes()
    }

    pub fn critical_edges(&self) -> &[(usize, usize)] {
        self.critical.edges()
    }

    pub fn critical_components(&self) -> &[CyclicComponent] {
        self.critical.components()
    }

    pub fn gamma(&self) -> usize {
        self.critical.gamma()
    }

    pub fn class_of(&self, node: usize) -> Option<usize> {
        self.critical.class_of(node)
    }

    pub fn cyclic_class_shift(&self, component: usize, t: i64) -> Result<Vec<usize>> {
        self.critical.cyclic_class_shift(component, t)
    }

    /// Critical digraph of a component of `D(A)` taken with respect to that
    /// component's own cycle mean; `None` for trivial components.
    pub fn component_critical(&self, component: usize) -> Option<&CriticalSubgraph> {
        self.component_critical[component].as_ref()
    }

    /// l.c.m. of the critical cyclicities of all nontrivial components.
    pub fn ultimate_cyclicity(&self) -> usize {
        self.component_critical
            .iter()
            .flatten()
            .fold(1, |acc, c| lcm(acc, c.gamma()))
    }
}

/// λ per component, the critical digraph, its components and cyclic classes.
pub fn critical_structure(a: &TropicalMatrix) -> Result<CriticalStructure> {
    let n = a.dim();
    let g = Digraph::from_matrix(a);
    let scc = scc_decompose(&g);
    let lambda_of_component: Vec<f64> = (0..scc.len())
        .map(|c| {
            if scc.is_trivial(c) {
                ZERO
            } else {
                max_cycle_mean(&g, scc.nodes(c))
            }
        })
        .collect();
    let lambda_global = lambda_of_component.iter().copied().fold(ZERO, f64::max);
    if is_zero(lambda_global) {
        return Err(Error::NoCycles);
    }
    let tol = tolerance(a.max_abs_finite());

    let mut component_critical = Vec::with_capacity(scc.len());
    let mut global_edges = Vec::new();
    for c in 0..scc.len() {
        if scc.is_trivial(c) {
            component_critical.push(None);
            continue;
        }
        let lambda = lambda_of_component[c];
        let edges = component_critical_edges(a, scc.nodes(c), lambda, tol);
        if (lambda - lambda_global).abs() <= tol {
            global_edges.extend_from_slice(&edges);
        }
        component_critical.push(Some(CriticalSubgraph::from_edges(n, edges)));
    }

    Ok(CriticalStructure {
        scc,
        lambda_global,
        lambda_of_component,
        critical: CriticalSubgraph::from_edges(n, global_edges),
        component_critical,
    })
}

/// Edge `(i, j)` of the component is critical iff `a'_ij ⊗ (A'*)_ji = 0`
/// for the component normalised by its own cycle mean.
fn component_critical_edges(
    a: &TropicalMatrix,
    nodes: &[usize],
    lambda: f64,
    tol: f64,
) -> Vec<(usize, usize)> {
    let k = nodes.len();
    let sub = TropicalMatrix::from_fn(k, |p, q| {
        let v = a.get(nodes[p], nodes[q]);
        if is_zero(v) {
            ZERO
        } else {
            v - lambda
        }
    });
    let star = floyd_warshall_star(&sub);
    let mut edges = Vec::new();
    for p in 0..k {
        for q in 0..k {
            let w = sub.get(p, q);
            let back = star.get(q, p);
            if !is_zero(w) && !is_zero(back) && (w + back).abs() <= tol {
                edges.push((nodes[p], nodes[q]));
            }
        }
    }
    edges
}

/// Shortest critical cycle through the smallest critical node, found by BFS
/// visiting successors in increasing order.
pub fn single_critical_cycle(cs: &CriticalStructure) -> Vec<(usize, usize)> {
    let crit = cs.critical();
    let n = crit.dim();
    let start = crit.nodes()[0];
    let mut succ = vec![Vec::new(); n];
    for &(i, j) in crit.edges() {
        succ[i].push(j);
    }
    for s in &mut succ {
        s.sort_unstable();
    }
    let mut pred = vec![usize::MAX; n];
    let mut seen = vec![false; n];
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(v) = queue.pop_front() {
        for &w in &succ[v] {
            if w == start {
                let mut cycle = vec![(v, start)];
                let mut cur = v;
                while cur != start {
                    let p = pred[cur];
                    cycle.push((p, cur));
                    cur = p;
                }
                cycle.reverse();
                return cycle;
            }
            if !seen[w] {
                seen[w] = true;
                pred[w] = v;
                queue.push_back(w);
            }
        }
    }
    unreachable!("critical node {start} lies on no critical cycle")
}

/// Exactly-`t`-step reachability by Boolean matrix products.
#[derive(Debug, Clone, PartialEq, Eq)]
struct BoolMatrix {
    n: usize,
    bits: Vec<bool>,
}

impl BoolMatrix {
    fn pattern(a: &TropicalMatrix) -> Self {
        let n = a.dim();
        let bits = (0..n * n).map(|k| !is_zero(a.get(k / n, k % n))).collect();
        Self { n, bits }
    }

    fn identity(n: usize) -> Self {
        let bits = (0..n * n).map(|k| k / n == k % n).collect();
        Self { n, bits }
    }

    fn mul(&self, other: &Self) -> Self {
        let n = self.n;
        let mut bits = vec![false; n * n];
        for i in 0..n {
            for k in 0..n {
                if self.bits[i * n + k] {
                    for j in 0..n {
                        bits[i * n + j] |= other.bits[k * n + j];
                    }
                }
            }
        }
        Self { n, bits }
    }

    fn pow(&self, mut t: u64) -> Self {
        let mut result = Self::identity(self.n);
        let mut base = self.clone();
        while t > 0 {
            if t & 1 == 1 {
                result = result.mul(&base);
            }
            base = base.mul(&base);
            t >>= 1;
        }
        result
    }
}

/// `out[i][j]`: `i` reaches `j` by paths of every sufficiently large length.
///
/// Boolean powers `B^t` for `t = 3n², …, 3n² + γ - 1`, with `γ` the l.c.m. of
/// the critical cyclicities of all components, must all have entry `(i, j)`.
/// This is a reference check; its cost grows with `γ`.
pub fn strong_access_matrix(a: &TropicalMatrix) -> Result<Vec<Vec<bool>>> {
    let n = a.dim();
    let gamma = match critical_structure(a) {
        Ok(cs) => cs.ultimate_cyclicity(),
        Err(Error::NoCycles) => return Ok(vec![vec![false; n]; n]),
        Err(e) => return Err(e),
    };
    let b = BoolMatrix::pattern(a);
    let t0 = 3 * (n as u64) * (n as u64);
    let mut cur = b.pow(t0);
    let mut all = cur.bits.clone();
    for _ in 1..gamma {
        cur = cur.mul(&b);
        for (x, y) in all.iter_mut().zip(&cur.bits) {
            *x &= *y;
        }
    }
    Ok(all.chunks(n).map(<[bool]>::to_vec).collect())
}

pub fn strong_access(a: &TropicalMatrix, i: usize, j: usize) -> Result<bool> {
    let n = a.dim();
    for node in [i, j] {
        if node >= n {
            return Err(Error::NodeOutOfRange { node, n });
        }
    }
    Ok(strong_access_matrix(a)?[i][j])
}
