//! Orbit periodicity: when is every orbit `A^t y` ultimately linear periodic.

use crate::error::{Error, Result};
use crate::expansion::ultimate_expand;
use crate::graph::{critical_structure, strong_access_matrix, CriticalStructure};
use crate::matrix::{is_zero, tolerance, TropicalMatrix, TropicalVector, ZERO};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SupportViolation {
    /// Term with the smaller cycle mean.
    pub mu: usize,
    /// Term with the larger cycle mean.
    pub nu: usize,
    /// Column of term `mu` whose support is too large.
    pub i: usize,
    /// Column of term `nu` that misses part of it.
    pub j: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitReport {
    pub verdict: bool,
    /// Component pairs `(c, d)` with `c` accessing `d` but `λ(c) > λ(d)`.
    pub condition1_violations: Vec<(usize, usize)>,
    /// Component pairs without strong access either way and with different
    /// cycle means; filled only by [`orbit_conditions`].
    pub condition2_violations: Vec<(usize, usize)>,
    pub support_violations: Vec<SupportViolation>,
    pub gamma_u: usize,
    /// The digraph has no cycles, so every orbit vanishes.
    pub acyclic: bool,
}

impl OrbitReport {
    fn vacuous() -> Self {
        Self {
            verdict: true,
            condition1_violations: Vec::new(),
            condition2_violations: Vec::new(),
            support_violations: Vec::new(),
            gamma_u: 1,
            acyclic: true,
        }
    }
}

fn structure(a: &TropicalMatrix) -> Result<Option<CriticalStructure>> {
    match critical_structure(a) {
        Ok(cs) => Ok(Some(cs)),
        Err(Error::NoCycles) => Ok(None),
        Err(e) => Err(e),
    }
}

fn condition1(cs: &CriticalStructure, tol: f64) -> Vec<(usize, usize)> {
    let scc = cs.scc();
    let lambda = cs.lambda_of_component();
    let mut out = Vec::new();
    for c in (0..scc.len()).filter(|&c| !scc.is_trivial(c)) {
        for d in (0..scc.len()).filter(|&d| d != c && !scc.is_trivial(d)) {
            if scc.accesses(c, d) && lambda[c] > lambda[d] + tol {
                out.push((c, d));
            }
        }
    }
    out
}

/// Condition 1 on component access plus the support inclusion between the
/// odd-residue columns of the ultimate terms.
pub fn is_orbit_periodic(a: &TropicalMatrix) -> Result<OrbitReport> {
    let Some(cs) = structure(a)? else {
        return Ok(OrbitReport::vacuous());
    };
    let tol = tolerance(a.max_abs_finite());
    let condition1_violations = condition1(&cs, tol);

    let e = ultimate_expand(a)?;
    let n = a.dim();
    let columns: Vec<(f64, &[usize], TropicalMatrix)> = e
        .terms()
        .iter()
        .map(|t| (t.lambda(), t.triple.n_c(), t.product(1)))
        .collect();
    let mut support_violations = Vec::new();
    for (mu, (l_mu, n_mu, u_mu)) in columns.iter().enumerate() {
        let mut union = vec![false; n];
        for &i in n_mu.iter() {
            for (k, x) in union.iter_mut().enumerate() {
                *x |= !is_zero(u_mu.get(k, i));
            }
        }
        for (nu, (l_nu, n_nu, u_nu)) in columns.iter().enumerate() {
            if l_mu + tol >= *l_nu {
                continue;
            }
            for &j in n_nu.iter() {
                let misses = (0..n).any(|k| union[k] && is_zero(u_nu.get(k, j)));
                if !misses {
                    continue;
                }
                // report the first offending column of mu
                let i = n_mu
                    .iter()
                    .copied()
                    .find(|&i| (0..n).any(|k| !is_zero(u_mu.get(k, i)) && is_zero(u_nu.get(k, j))))
                    .expect("union came from these columns");
                support_violations.push(SupportViolation { mu, nu, i, j });
            }
        }
    }

    Ok(OrbitReport {
        verdict: condition1_violations.is_empty() && support_violations.is_empty(),
        condition1_violations,
        condition2_violations: Vec::new(),
        support_violations,
        gamma_u: cs.ultimate_cyclicity(),
        acyclic: false,
    })
}

/// Conditions 1 and 2 stated on components, with strong access decided by
/// Boolean matrix powers. Reference route for [`is_orbit_periodic`].
pub fn orbit_conditions(a: &TropicalMatrix) -> Result<OrbitReport> {
    let Some(cs) = structure(a)? else {
        return Ok(OrbitReport::vacuous());
    };
    let tol = tolerance(a.max_abs_finite());
    let condition1_violations = condition1(&cs, tol);
    let strong = strong_access_matrix(a)?;
    let scc = cs.scc();
    let lambda = cs.lambda_of_component();
    let mut condition2_violations = Vec::new();
    let nontrivial: Vec<usize> = (0..scc.len()).filter(|&c| !scc.is_trivial(c)).collect();
    for (p, &c) in nontrivial.iter().enumerate() {
        for &d in &nontrivial[p + 1..] {
            let (i, j) = (scc.nodes(c)[0], scc.nodes(d)[0]);
            if !strong[i][j] && !strong[j][i] && (lambda[c] - lambda[d]).abs() > tol {
                condition2_violations.push((c, d));
            }
        }
    }
    Ok(OrbitReport {
        verdict: condition1_violations.is_empty() && condition2_violations.is_empty(),
        condition1_violations,
        condition2_violations,
        support_violations: Vec::new(),
        gamma_u: cs.ultimate_cyclicity(),
        acyclic: false,
    })
}

/// Largest cycle mean among the nontrivial components that have access to
/// the support of `y`; `-inf` if there is none.
pub fn orbit_growth_rate(a: &TropicalMatrix, y: &TropicalVector) -> Result<f64> {
    if y.dim() != a.dim() {
        return Err(Error::Dimension {
            expected: a.dim(),
            found: y.dim(),
        });
    }
    if y.is_zero_vector() {
        return Err(Error::ZeroVector);
    }
    if !is_orbit_periodic(a)?.verdict {
        return Err(Error::NotOrbitPeriodic);
    }
    let Some(cs) = structure(a)? else {
        return Ok(ZERO);
    };
    let scc = cs.scc();
    let support = y.support();
    let rate = (0..scc.len())
        .filter(|&c| !scc.is_trivial(c))
        .filter(|&c| {
            support
                .iter()
                .any(|&k| scc.accesses(c, scc.component_of(k)))
        })
        .map(|c| cs.lambda_of_component()[c])
        .fold(ZERO, f64::max);
    Ok(rate)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitTrace {
    pub y0: TropicalVector,
    /// `A^t y` for `t = 0..=t_max`.
    pub samples: Vec<TropicalVector>,
    pub detected_period: Option<usize>,
    pub growth_rate: Option<f64>,
    pub transient: Option<usize>,
}

impl OrbitTrace {
    pub fn is_linear_periodic(&self) -> bool {
        self.detected_period.is_some()
    }
}

fn divisors(n: usize) -> Vec<usize> {
    (1..=n).filter(|&d| n.is_multiple_of(d)).collect()
}

/// Iterate `x ← A ⊗ x` up to `t_max` and look for the first period `p`
/// dividing `γ^u` with `x(t + p) = pρ + x(t)` on a tail of length at least
/// `2γ^u`.
pub fn simulate_orbit(a: &TropicalMatrix, y: &TropicalVector, t_max: usize) -> Result<OrbitTrace> {
    let gamma_u = structure(a)?.map_or(1, |cs| cs.ultimate_cyclicity());
    let mut samples = Vec::with_capacity(t_max + 1);
    samples.push(y.clone());
    for t in 0..t_max {
        let next = a.apply(&samples[t])?;
        samples.push(next);
    }

    let mut trace = OrbitTrace {
        y0: y.clone(),
        samples,
        detected_period: None,
        growth_rate: None,
        transient: None,
    };
    let latest_start = match t_max.checked_sub(2 * gamma_u) {
        Some(v) => v,
        None => return Ok(trace),
    };
    for p in divisors(gamma_u) {
        let s = &trace.samples;
        let (x, y) = (&s[t_max - p], &s[t_max]);
        let rho = x
            .entries()
            .iter()
            .zip(y.entries())
            .find(|(a, b)| !is_zero(**a) && !is_zero(**b))
            .map_or(ZERO, |(a, b)| (b - a) / p as f64);
        let shift = if is_zero(rho) { ZERO } else { rho * p as f64 };
        let mut start = t_max - p;
        while start > 0 && holds(&s[start - 1], &s[start - 1 + p], shift) {
            start -= 1;
        }
        if !holds(&s[start], &s[start + p], shift) {
            continue;
        }
        if start <= latest_start {
            trace.detected_period = Some(p);
            trace.growth_rate = Some(rho);
            trace.transient = Some(start);
            break;
        }
    }
    Ok(trace)
}

/// `y = shift ⊗ x` entrywise; a `-inf` shift means `y` vanished.
fn holds(x: &TropicalVector, y: &TropicalVector, shift: f64) -> bool {
    if is_zero(shift) {
        return y.is_zero_vector();
    }
    x.entries()
        .iter()
        .zip(y.entries())
        .all(|(&u, &v)| match (is_zero(u), is_zero(v)) {
            (true, true) => true,
            (false, false) => (u + shift - v).abs() <= tolerance(u.abs().max(v.abs())),
            _ => false,
        })
}

fn check_column(cs: &CriticalStructure, n: usize, j: usize) -> Result<usize> {
    if j >= n {
        return Err(Error::NodeOutOfRange { node: j, n });
    }
    let c = cs.scc().component_of(j);
    if cs.scc().is_trivial(c) {
        return Err(Error::TrivialColumn(j));
    }
    Ok(c)
}

/// `A^t e_j` is ultimately linear periodic iff no nontrivial component with
/// larger cycle mean has access to `j`.
pub fn column_periodicity(a: &TropicalMatrix, j: usize) -> Result<bool> {
    let Some(cs) = structure(a)? else {
        return Err(Error::TrivialColumn(j));
    };
    let target = check_column(&cs, a.dim(), j)?;
    let tol = tolerance(a.max_abs_finite());
    let scc = cs.scc();
    let lambda = cs.lambda_of_component();
    Ok((0..scc.len())
        .filter(|&c| !scc.is_trivial(c) && scc.accesses(c, target))
        .all(|c| lambda[c] <= lambda[target] + tol))
}

/// For periodic columns `i` and `j`: `A^t (e_i ⊕ e_j)` is ultimately linear
/// periodic iff one strongly accesses the other or the cycle means agree.
pub fn pair_periodicity(a: &TropicalMatrix, i: usize, j: usize) -> Result<bool> {
    for k in [i, j] {
        if !column_periodicity(a, k)? {
            return Err(Error::Precondition(format!(
                "column {k} is not ultimately linear periodic"
            )));
        }
    }
    let cs = critical_structure(a)?;
    let tol = tolerance(a.max_abs_finite());
    if (cs.lambda_of_node(i) - cs.lambda_of_node(j)).abs() <= tol {
        return Ok(true);
    }
    let strong = strong_access_matrix(a)?;
    Ok(strong[i][j] || strong[j][i])
}
