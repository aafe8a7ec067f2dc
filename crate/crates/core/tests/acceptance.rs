//! Acceptance criteria 1-9. Prints one line per criterion and exits nonzero
//! if any of them fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::Rng;
use tropical_core::oracle::{best_path_weights, PathClass};
use tropical_core::{
    csr_build, csr_product, evaluate, fast_terms, fixtures, is_orbit_periodic, max_cycle_mean_of,
    nachtigall_expand, orbit_conditions, simulate_orbit, strong_access, ultimate_expand,
    ultimate_threshold, CriticalSelection, CsrTriple, Expansion, ExpansionKind, Threshold,
    TropicalMatrix, TropicalVector,
};

use common::{below, close, random_matrix, random_vector, rng};

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)+) => {
        if !$cond {
            return Err(format!($($msg)+));
        }
    };
}

fn run(id: usize, budget: Duration, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = catch_unwind(AssertUnwindSafe(f))
        .unwrap_or_else(|p| Err(format!("panicked: {:?}", p.downcast_ref::<String>())));
    let took = start.elapsed();
    let out = match out {
        Ok(note) if took > budget => Err(format!("{note}; over budget {budget:?}")),
        other => other,
    };
    match &out {
        Ok(note) => println!("criterion {id}: PASS ({:.2}s) {note}", took.as_secs_f64()),
        Err(why) => println!("criterion {id}: FAIL ({:.2}s) {why}", took.as_secs_f64()),
    }
    out.is_ok()
}

/// Random matrices of size `lo..=hi` that have at least one cycle.
fn cyclic_corpus(seed: u64, count: usize, lo: usize, hi: usize) -> Vec<TropicalMatrix> {
    let mut r = rng(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let n = r.gen_range(lo..=hi);
        let a = random_matrix(&mut r, n);
        if max_cycle_mean_of(&a).is_finite() {
            out.push(a);
        }
    }
    out
}

fn sq(n: usize) -> u64 {
    3 * (n * n) as u64
}

fn literal(triple: &CsrTriple, t: u64) -> TropicalMatrix {
    triple
        .c()
        .otimes(&triple.s().pow(t))
        .unwrap()
        .otimes(triple.r())
        .unwrap()
}

fn criterion1() -> Outcome {
    let a = fixtures::example1();
    let e = nachtigall_expand(&a, CriticalSelection::Full).map_err(|e| e.to_string())?;
    ensure!(
        e.lambdas() == vec![0.0, -1.0, -2.0],
        "lambdas {:?}",
        e.lambdas()
    );
    ensure!(e.gammas() == vec![2, 1, 1], "gammas {:?}", e.gammas());
    let [n10, n20, n30, n11] = fixtures::example1_nachtigall();
    let terms = e.terms();
    ensure!(terms[0].product(0) == n10, "N1(0)");
    ensure!(terms[0].product(1) == n11, "N1(1)");
    ensure!(terms[1].product(0) == n20, "N2(0)");
    ensure!(terms[2].product(0) == n30, "N3(0)");
    let sum = n10
        .oplus(&n20.scale(-2.0))
        .unwrap()
        .oplus(&n30.scale(-4.0))
        .unwrap();
    ensure!(a.pow(2) == sum, "A^2 decomposition");
    for t in [2, 3, 4, 10] {
        let want = fixtures::example1_power(t).unwrap();
        ensure!(a.pow(t) == want, "A^{t} power");
        ensure!(evaluate(&e, t).matrix == want, "A^{t} expansion");
    }
    let u = ultimate_expand(&a).map_err(|e| e.to_string())?;
    ensure!(u.terms().len() == 1, "ultimate terms {}", u.terms().len());
    ensure!(u.terms()[0].product(0) == n10, "U1(0)");
    ensure!(a.pow(10) == n10, "A^10 = N1(0)");
    let thr = ultimate_threshold(&a, &u, 10 * sq(4));
    ensure!(thr == Threshold::Found(10), "threshold {thr:?}");
    Ok(String::new())
}

fn criterion2() -> Outcome {
    let a = fixtures::example2();
    let star = tropical_core::kleene_star(&a.pow(2)).map_err(|e| e.to_string())?;
    ensure!(star == fixtures::example2_square_star(), "(A^2)*");
    let u = ultimate_expand(&a).map_err(|e| e.to_string())?;
    ensure!(u.lambdas() == vec![0.0, -1.0], "lambdas {:?}", u.lambdas());
    let t2 = &u.terms()[1].triple;
    ensure!(t2.n_c() == [4], "critical nodes {:?}", t2.n_c());
    ensure!(t2.c().column(4)[4..] == [0.0, -2.0, -4.0], "C2 block");
    ensure!(t2.r().row(4)[4..] == [0.0, -6.0, -4.0], "R2 block");
    let (u1, u2) = (&u.terms()[0], &u.terms()[1]);
    for t in 9..=12u64 {
        let want = u1
            .product(t % 2)
            .oplus(&u2.product(0).scale(-(t as f64)))
            .unwrap();
        ensure!(a.pow(t) == want, "ultimate form at t = {t}");
        ensure!(evaluate(&u, t).matrix == want, "evaluate at t = {t}");
    }
    let thr = ultimate_threshold(&a, &u, 10 * sq(7));
    ensure!(thr == Threshold::Found(9), "threshold {thr:?}");
    let n = nachtigall_expand(&a, CriticalSelection::Full).map_err(|e| e.to_string())?;
    let r2 = n.terms()[1].triple.r();
    ensure!(
        r2.row(4)[2..] == [-4.0, -3.0, 0.0, -6.0, -4.0],
        "Nachtigall R2 row"
    );
    ensure!(
        r2.row(4)[2..4] != t2.r().row(4)[2..4],
        "R2 entries should differ"
    );
    Ok(String::new())
}

fn criterion3() -> Outcome {
    let (a, b) = (fixtures::example3_a(), fixtures::example3_b());
    ensure!(is_orbit_periodic(&a).unwrap().verdict, "A verdict");
    ensure!(!is_orbit_periodic(&b).unwrap().verdict, "B verdict");
    ensure!(orbit_conditions(&a).unwrap().verdict, "A oracle verdict");
    ensure!(!orbit_conditions(&b).unwrap().verdict, "B oracle verdict");
    let x = TropicalVector::new(fixtures::example3_x()).unwrap();

    let ta = simulate_orbit(&a, &x, 60).unwrap();
    for t in 4..=60usize {
        let want = (4 * ((t - 4) / 4) + 1) as f64;
        ensure!(ta.samples[t].get(5) == want, "A orbit at t = {t}");
    }
    ensure!(
        ta.detected_period == Some(4),
        "A period {:?}",
        ta.detected_period
    );

    let tb = simulate_orbit(&b, &x, 60).unwrap();
    let listing: Vec<f64> = tb.samples[2..14].iter().map(|v| v.get(5)).collect();
    ensure!(
        listing == [0., 0., 0., 1., 0., 4., 0., 5., 0., 8., 0., 9.],
        "B listing {listing:?}"
    );
    for t in 2..=60usize {
        let v = tb.samples[t].get(5);
        let want = match t % 4 {
            0 | 2 => 0.0,
            3 => (t - 3) as f64,
            _ if t >= 5 => (t - 4) as f64,
            _ => continue,
        };
        ensure!(v == want, "B orbit at t = {t}: {v}");
    }
    ensure!(!tb.is_linear_periodic(), "B orbit reported periodic");
    ensure!(!strong_access(&b, 5, 2).unwrap(), "strong access 6 -> 3");
    Ok(String::new())
}

fn criterion4(corpus: &[TropicalMatrix]) -> Outcome {
    let mut checked = 0;
    for (k, a) in corpus.iter().enumerate() {
        let e = nachtigall_expand(a, CriticalSelection::Full).map_err(|e| e.to_string())?;
        let t0 = sq(a.dim());
        let mut power = a.pow(t0);
        for t in t0..=t0 + 2 * e.gamma() as u64 {
            if t > t0 {
                power = power.otimes(a).unwrap();
            }
            ensure!(
                close(&evaluate(&e, t).matrix, &power),
                "matrix {k}, t = {t}: {a:?}"
            );
            checked += 1;
        }
    }
    Ok(format!("{} matrices, {checked} exponents", corpus.len()))
}

fn criterion5(corpus: &[TropicalMatrix]) -> Outcome {
    let mut worst = 0;
    for (k, a) in corpus.iter().enumerate() {
        let n = a.dim();
        let u = ultimate_expand(a).map_err(|e| e.to_string())?;
        let t1 = match ultimate_threshold(a, &u, 10 * sq(n)) {
            Threshold::Found(t) => t,
            Threshold::Exceeds(t) => return Err(format!("matrix {k}: no threshold up to {t}")),
        };
        worst = worst.max(t1);
        let mut power = a.pow(t1);
        for t in t1..=t1 + 2 * u.gamma() as u64 {
            if t > t1 {
                power = power.otimes(a).unwrap();
            }
            ensure!(
                close(&evaluate(&u, t).matrix, &power),
                "matrix {k}, t = {t}"
            );
        }

        let nach = nachtigall_expand(a, CriticalSelection::Full).map_err(|e| e.to_string())?;
        let sigma = u.sigma().unwrap();
        for (mu, term) in u.terms().iter().enumerate() {
            let matched = &nach.terms()[sigma[mu]];
            let (gu, gn) = (term.triple.gamma(), matched.triple.gamma());
            ensure!(
                gn % gu == 0,
                "matrix {k}: cyclicity {gn} not a multiple of {gu}"
            );
            let t0 = sq(n);
            for t in t0..t0 + gn as u64 {
                ensure!(
                    below(&term.product(t), &matched.product(t)),
                    "matrix {k}: term {mu} exceeds its Nachtigall match at t = {t}"
                );
            }
        }
    }
    Ok(format!(
        "{} matrices, largest threshold {worst}",
        corpus.len()
    ))
}

/// Smallest `T` with `S^(t+γ) = S^t` for all `t ≥ T`.
fn s_transient(triple: &CsrTriple) -> u64 {
    let g = triple.gamma() as u64;
    let bound = triple.transient() + g;
    let powers: Vec<TropicalMatrix> = (0..=bound + g).map(|t| triple.s().pow(t)).collect();
    let mut start = bound;
    while start > 0
        && close(
            &powers[start as usize - 1],
            &powers[(start - 1 + g) as usize],
        )
    {
        start -= 1;
    }
    start
}

fn criterion6(corpus: &[TropicalMatrix]) -> Outcome {
    let mut heavy_equalities = 0;
    for (k, raw) in corpus.iter().enumerate() {
        let lambda = max_cycle_mean_of(raw);
        let a = raw.scale(-lambda);
        let n = a.dim();
        let triple = csr_build(&a, CriticalSelection::Full).map_err(|e| e.to_string())?;
        let g = triple.gamma() as u64;
        let lit: Vec<TropicalMatrix> = (0..=40 + g).map(|t| literal(&triple, t)).collect();

        for t in 0..=30u64 {
            let p = &lit[t as usize];
            ensure!(
                close(p, &lit[(t + g) as usize]),
                "matrix {k}: period fails at t = {t}"
            );
            ensure!(
                close(p, &csr_product(&triple, t).matrix),
                "matrix {k}: product at t = {t}"
            );
        }
        for t1 in 0..=20usize {
            for t2 in 0..=20usize {
                let prod = lit[t1].otimes(&lit[t2]).unwrap();
                ensure!(
                    close(&lit[t1 + t2], &prod),
                    "matrix {k}: group law ({t1}, {t2})"
                );
            }
        }
        let p0 = &lit[0];
        for &i in triple.n_c() {
            ensure!(
                close_rows(p0.row(i), triple.r().row(i)),
                "matrix {k}: projector row {i}"
            );
            ensure!(
                close_rows(&p0.column(i), &triple.c().column(i)),
                "matrix {k}: projector column {i}"
            );
        }

        if n <= 6 {
            let t_max = 60u64;
            let heavy = best_path_weights(
                &a,
                &PathClass::CritHeavy(triple.n_c().to_vec()),
                None,
                t_max,
            )
            .map_err(|e| e.to_string())?;
            let tau = triple.critical().max_cyclicity() as u64;
            let from = s_transient(&triple) + 2 * tau * (n as u64 - 1);
            for t in 0..=t_max {
                let p = literal_at(&lit, &triple, t);
                ensure!(
                    below(&heavy[t as usize], &p),
                    "matrix {k}: heavy path above P at t = {t}"
                );
                if t >= from {
                    ensure!(
                        close(&heavy[t as usize], &p),
                        "matrix {k}: heavy path below P at t = {t}"
                    );
                    heavy_equalities += 1;
                }
            }
        }
    }
    Ok(format!(
        "{} matrices, {heavy_equalities} tight heavy-path checks",
        corpus.len()
    ))
}

fn literal_at(lit: &[TropicalMatrix], triple: &CsrTriple, t: u64) -> TropicalMatrix {
    match lit.get(t as usize) {
        Some(p) => p.clone(),
        None => literal(triple, t),
    }
}

fn close_rows(a: &[f64], b: &[f64]) -> bool {
    let scale = a
        .iter()
        .chain(b)
        .filter(|v| v.is_finite())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    let (a, b) = (
        TropicalVector::new(a.to_vec()),
        TropicalVector::new(b.to_vec()),
    );
    a.unwrap().approx_eq(&b.unwrap(), 1e-9 * (1.0 + scale))
}

fn criterion7() -> Outcome {
    let corpus = cyclic_corpus(7, 50, 2, 7);
    let mut r = rng(77);
    let kinds = [
        ExpansionKind::NachtigallCanonical,
        ExpansionKind::NachtigallCycle,
        ExpansionKind::Ultimate,
    ];
    for (k, a) in corpus.iter().enumerate() {
        let kind = kinds[k % 3];
        let e: Expansion = match kind {
            ExpansionKind::Ultimate => ultimate_expand(a),
            ExpansionKind::NachtigallCycle => nachtigall_expand(a, CriticalSelection::SingleCycle),
            ExpansionKind::NachtigallCanonical => nachtigall_expand(a, CriticalSelection::Full),
        }
        .map_err(|e| e.to_string())?;
        for _ in 0..10 {
            let t = r.gen_range(0..5000u64);
            let fast = fast_terms(a, t, kind).map_err(|e| e.to_string())?;
            ensure!(fast.len() == e.terms().len(), "matrix {k}: term count");
            for (mu, (f, term)) in fast.iter().zip(e.terms()).enumerate() {
                ensure!(
                    close(f, &term.product(t)),
                    "matrix {k} {kind:?}: term {mu} at t = {t}"
                );
            }
        }
    }

    let mut big = rng(100);
    let a = random_matrix(&mut big, 100);
    let start = Instant::now();
    let terms =
        fast_terms(&a, sq(100), ExpansionKind::NachtigallCanonical).map_err(|e| e.to_string())?;
    let took = start.elapsed();
    ensure!(took < Duration::from_secs(30), "n = 100 took {took:?}");
    Ok(format!(
        "n = 100: {} terms in {:.2}s",
        terms.len(),
        took.as_secs_f64()
    ))
}

fn criterion8() -> Outcome {
    let mut r = rng(8);
    let (mut periodic, mut total) = (0, 0);
    while total < 300 {
        let n = r.gen_range(1..=7);
        let a = random_matrix(&mut r, n);
        total += 1;
        let oracle = orbit_conditions(&a).map_err(|e| e.to_string())?;
        let support = is_orbit_periodic(&a).map_err(|e| e.to_string())?;
        let t_max = 6 * n * n + 2 * support.gamma_u;
        let mut starts: Vec<TropicalVector> = (0..n).map(|j| TropicalVector::unit(n, j)).collect();
        starts.push(TropicalVector::new(vec![0.0; n]).unwrap());
        while starts.len() < 50 {
            starts.push(random_vector(&mut r, n));
        }
        let mut simulated = true;
        for y in &starts {
            let trace = simulate_orbit(&a, y, t_max).map_err(|e| e.to_string())?;
            if !trace.is_linear_periodic() {
                simulated = false;
                break;
            }
        }
        ensure!(
            oracle.verdict == support.verdict && support.verdict == simulated,
            "oracle {}, support {}, simulation {simulated} on {a:?}",
            oracle.verdict,
            support.verdict
        );
        periodic += support.verdict as usize;
    }
    Ok(format!("{total} matrices, {periodic} orbit periodic"))
}

fn criterion9() -> Outcome {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../README.md");
    let text = std::fs::read_to_string(&path).map_err(|e| format!("{}: {e}", path.display()))?;
    let section = text
        .split("\n## ")
        .find(|s| s.to_lowercase().starts_with("out of scope"))
        .ok_or("README has no out-of-scope section")?;
    ensure!(
        section.contains("NP-hard"),
        "NP-hardness exclusion not documented"
    );
    ensure!(
        section.contains("Schwartz"),
        "Schwartz bounds exclusion not documented"
    );
    Ok(String::new())
}

fn main() -> ExitCode {
    let corpus = cyclic_corpus(4, 200, 2, 7);
    let definite = cyclic_corpus(6, 200, 2, 7);
    let secs = Duration::from_secs;
    let results = [
        run(1, secs(1), criterion1),
        run(2, secs(1), criterion2),
        run(3, secs(1), criterion3),
        run(4, secs(60), || criterion4(&corpus)),
        run(5, secs(120), || criterion5(&corpus)),
        run(6, secs(600), || criterion6(&definite)),
        run(7, secs(120), criterion7),
        run(8, secs(180), criterion8),
        run(9, secs(1), criterion9),
    ];
    let failed = results.iter().filter(|ok| !**ok).count();
    println!(
        "{} of {} criteria passed",
        results.len() - failed,
        results.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
