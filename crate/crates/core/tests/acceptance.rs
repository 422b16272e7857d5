//! Acceptance suite: one line per criterion, nonzero exit if any fails.
//!
//! Runs as a plain binary so the summary lines show up in `cargo test`.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::Rng as _;

use contrastive::embedding::Host;
use contrastive::euclidean::{learn_euclidean_imperfect, learn_euclidean_perfect, EuclideanConfig};
use contrastive::evaluation::{accuracy, single_point_baseline};
use contrastive::finite::{embed_into_finite_metric, FiniteMetric, SearchOptions};
use contrastive::graph::{Graph, SimilarityMetric};
use contrastive::instance::{generate_planted, Instance};
use contrastive::line::learn_line;
use contrastive::oracle::{brute_force_finite, brute_force_line_feasible};
use contrastive::partition::{extract_core, well_linked_decomposition};
use contrastive::rng;
use contrastive::tree::{annuli_with_shift, learn_tree_imperfect, learn_tree_perfect, TreeConfig};

const EPSILON: f64 = 0.25;
const EPS_PRIME: f64 = 0.5;

struct Outcome {
    pass: bool,
    detail: String,
}

fn ids(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i:02}")).collect()
}

/// Complete instance from a similar-pair predicate.
fn complete(n: usize, u: f64, l: f64, similar: impl Fn(usize, usize) -> bool) -> Instance {
    let o = ids(n);
    let mut s = Vec::new();
    let mut d = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let pair = (o[a].clone(), o[b].clone());
            if similar(a, b) {
                s.push(pair);
            } else {
                d.push(pair);
            }
        }
    }
    Instance::new(o, s, d, u, l).expect("valid instance")
}

/// Same instance with `flips` labels swapped.
fn perturb(inst: &Instance, flips: usize, seed: u64) -> Instance {
    let n = inst.n();
    let mut pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
        .collect();
    pairs.shuffle(&mut rng::stream(seed, 9));
    let flipped: BTreeSet<(usize, usize)> = pairs.into_iter().take(flips).collect();
    complete(n, inst.u(), inst.l(), |a, b| {
        inst.similar().contains(&(a, b)) != flipped.contains(&(a, b))
    })
}

fn line_exactness() -> Outcome {
    let mut agree = 0;
    let mut infeasible = 0;
    let mut perfect = true;
    for i in 0..300u64 {
        let n = 1 + (i as usize % 7);
        let l = [1.2, 1.5, 2.0, 3.0][(i / 7) as usize % 4];
        let (planted, _) =
            generate_planted(Host::Line, n, 1.0, l, 0.0, 1000 + i).expect("planted line");
        let inst = if i < 150 {
            planted
        } else {
            perturb(&planted, 1 + (i as usize % 3), i)
        };
        let ours = learn_line(&inst).expect("learner runs");
        let reference = brute_force_line_feasible(&inst).expect("oracle runs");
        if ours.is_some() == reference.is_some() {
            agree += 1;
        }
        if let Some(emb) = &ours {
            perfect &= accuracy(&inst, emb, 1.0).expect("scored").accuracy == 1.0;
        } else {
            infeasible += 1;
        }
    }
    Outcome {
        pass: agree == 300 && perfect,
        detail: format!(
            "{agree}/300 verdicts agree ({infeasible} infeasible), every witness exact: {perfect}"
        ),
    }
}

/// Random metric on up to three points.
fn random_host(m: usize, rng: &mut impl rand::Rng) -> FiniteMetric {
    loop {
        let mut d = vec![vec![0.0; m]; m];
        for (p, q) in (0..m).flat_map(|p| (p + 1..m).map(move |q| (p, q))) {
            let v = (rng.gen_range(0.3..3.0f64) * 4.0).round() / 4.0;
            d[p][q] = v;
            d[q][p] = v;
        }
        let names = (0..m).map(|p| format!("p{p}")).collect();
        if let Ok(metric) = FiniteMetric::new(names, d) {
            return metric;
        }
    }
}

fn finite_gap() -> Outcome {
    let mut within_eps = 0;
    let mut within_tenth = 0;
    let mut worst: f64 = 0.0;
    let mut rng = rng::stream(2, 0);
    for i in 0..100u64 {
        let n = 2 + (i as usize % 7);
        let m = 1 + (i as usize % 3);
        let host = random_host(m, &mut rng);
        let p = rng.gen_range(0.2..0.7);
        let labels: Vec<bool> = (0..n * n).map(|_| rng.gen_bool(p)).collect();
        let inst = complete(n, 1.0, [1.0, 1.5, 2.0][i as usize % 3], |a, b| {
            labels[a * n + b]
        });
        let (emb, _) =
            embed_into_finite_metric(&inst, &host, EPSILON, 0.0, &SearchOptions::exhaustive())
                .expect("search runs");
        let got = accuracy(&inst, &emb, 1.0).expect("scored").accuracy;
        let best = brute_force_finite(&inst, &host, 1.0)
            .expect("oracle runs")
            .accuracy;
        let gap = best - got;
        worst = worst.max(gap);
        within_eps += usize::from(gap <= EPSILON + 1e-12);
        within_tenth += usize::from(gap <= 0.1 + 1e-12);
    }
    Outcome {
        pass: within_eps == 100 && within_tenth >= 95,
        detail: format!(
            "{within_eps}/100 within ε, {within_tenth}/100 within 0.1, worst gap {worst:.3}"
        ),
    }
}

/// Paths on a line and grids in the plane, labeled by their planted positions.
fn cut_fixtures() -> Vec<Instance> {
    let mut out = Vec::new();
    for k in 0..10 {
        let n = 10 + 4 * k;
        out.push(complete(n, 1.0, 2.0, |a, b| b - a == 1));
    }
    for k in 0..10usize {
        let (w, h) = (3 + k / 2, 3 + k.div_ceil(2));
        let n = w * h;
        out.push(complete(n, 1.0, 2f64.sqrt(), |a, b| {
            let (ax, ay, bx, by) = (a % w, a / w, b % w, b / w);
            ax.abs_diff(bx) + ay.abs_diff(by) == 1
        }));
    }
    out
}

fn annuli_rates() -> Outcome {
    let delta = 8.0 / EPSILON;
    let mut worst: f64 = 0.0;
    let mut all_fit = true;
    for (i, inst) in cut_fixtures().iter().enumerate() {
        let rho = SimilarityMetric::new(inst);
        let members: Vec<usize> = (0..inst.n()).collect();
        let edges = inst.similar().len();
        let mut cut = 0;
        let mut draws = rng::stream(3, i as u64);
        for _ in 0..1000 {
            let p = annuli_with_shift(&rho, &members, delta, draws.gen_range(0.0..1.0))
                .expect("partition");
            cut += p.cut_similar_pairs.len();
            all_fit &= p
                .clusters
                .iter()
                .all(|c| rho.graph().components_within(c).len() == 1);
        }
        worst = worst.max(cut as f64 / (1000.0 * edges as f64));
    }
    Outcome {
        pass: worst <= EPSILON / 2.0 && all_fit,
        detail: format!(
            "worst mean cut fraction {worst:.4} (bound {}), clusters connected: {all_fit}",
            EPSILON / 2.0
        ),
    }
}

fn perfect_pipelines() -> Outcome {
    let mut euclid = 0;
    let mut tree = 0;
    let mut low: Vec<String> = Vec::new();
    for i in 0..20u64 {
        let n = 10 + (i as usize % 16);
        let (inst, _) =
            generate_planted(Host::Euclidean(2), n, 1.0, 1.5, 0.0, 400 + i).expect("planted plane");
        let out =
            learn_euclidean_perfect(&inst, 2, EPSILON, EPS_PRIME, i, &EuclideanConfig::default())
                .expect("learns");
        let a = accuracy(&inst, &out.embedding, 1.0 + EPS_PRIME)
            .expect("scored")
            .accuracy;
        euclid += usize::from(a >= 1.0 - EPSILON);
        low.extend((a < 1.0).then(|| format!("R2#{i}={a:.3}")));

        let (inst, _) =
            generate_planted(Host::Tree, n, 1.0, 1.5, 0.0, 500 + i).expect("planted tree");
        let out = learn_tree_perfect(&inst, EPSILON, EPS_PRIME, i, &TreeConfig::default())
            .expect("learns");
        let a = accuracy(&inst, &out.embedding, 1.0 + EPS_PRIME)
            .expect("scored")
            .accuracy;
        tree += usize::from(a >= 1.0 - EPSILON);
        low.extend((a < 1.0).then(|| format!("tree#{i}={a:.3}")));
    }
    Outcome {
        pass: euclid >= 18 && tree >= 18,
        detail: format!(
            "plane {euclid}/20, trees {tree}/20 at accuracy ≥ {}; below 1: {low:?}",
            1.0 - EPSILON
        ),
    }
}

fn two_cliques_with_bridge() -> Instance {
    complete(10, 1.0, 2.0, |a, b| (a < 5) == (b < 5) || (a, b) == (4, 5))
}

fn well_linked_budget() -> Outcome {
    let mut runs = 0;
    let mut violations = 0;
    for i in 0..120u64 {
        let host = [Host::Line, Host::Euclidean(2), Host::Tree][i as usize % 3];
        let n = 6 + (i as usize % 25);
        let (inst, _) = generate_planted(
            host,
            n,
            1.0,
            1.5,
            [0.0, 0.05, 0.2][(i / 3) as usize % 3],
            600 + i,
        )
        .expect("planted");
        for alpha in [0.05, 0.1, 0.2, 0.4] {
            let dec = well_linked_decomposition(&inst, alpha).expect("decomposes");
            runs += 1;
            if dec.removed_edges.len() as f64 > alpha * inst.num_constraints() as f64 {
                violations += 1;
            }
        }
    }
    let fixture = two_cliques_with_bridge();
    let dec = well_linked_decomposition(&fixture, 0.2).expect("decomposes");
    let bridge = dec.removed_edges == vec![(4, 5)] && dec.components.len() == 2;
    Outcome {
        pass: violations == 0 && bridge,
        detail: format!("{violations} budget violations in {runs} runs, bridge removed: {bridge}"),
    }
}

fn core_extraction() -> Outcome {
    let mut violations = 0;
    let mut sizes = 0;
    let mut rng = rng::stream(6, 0);
    for i in 0..200 {
        let n = 6 + i % 15;
        let p = rng.gen_range(0.2..0.8);
        let edges: Vec<(usize, usize)> = (0..n)
            .flat_map(|a| (a + 1..n).map(move |b| (a, b)))
            .filter(|_| rng.gen_bool(p))
            .collect();
        let f: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(0.2))
            .collect();
        let g = Graph::from_edges(n, edges);
        let component = g
            .components()
            .into_iter()
            .max_by_key(Vec::len)
            .expect("nonempty graph");
        let alpha = [0.05, 0.1, 0.3][i % 3];
        let core = extract_core(&g, &component, &f, alpha);
        let inside: BTreeSet<usize> = core.iter().copied().collect();
        violations += f
            .iter()
            .filter(|(a, b)| inside.contains(a) && inside.contains(b))
            .count();
        sizes += core.len();
    }
    Outcome {
        pass: violations == 0,
        detail: format!(
            "{violations} forbidden edges inside 200 cores (mean core size {:.1})",
            sizes as f64 / 200.0
        ),
    }
}

fn imperfect_pipelines() -> Outcome {
    let mut tallies = Vec::new();
    let mut pass = true;
    for (name, host) in [
        ("line", Host::Line),
        ("plane", Host::Euclidean(2)),
        ("tree", Host::Tree),
    ] {
        let mut ok = 0;
        for i in 0..20u64 {
            let n = 8 + (i as usize % 13);
            let zeta = if i % 2 == 0 { 0.02 } else { 0.05 };
            let (inst, _) = generate_planted(host, n, 1.0, 1.5, zeta, 700 + i).expect("planted");
            let emb = match host {
                Host::Line => {
                    learn_euclidean_imperfect(
                        &inst,
                        1,
                        EPSILON,
                        EPS_PRIME,
                        zeta,
                        i,
                        &EuclideanConfig::default(),
                    )
                    .expect("learns")
                    .embedding
                }
                Host::Euclidean(d) => {
                    learn_euclidean_imperfect(
                        &inst,
                        d,
                        EPSILON,
                        EPS_PRIME,
                        zeta,
                        i,
                        &EuclideanConfig::default(),
                    )
                    .expect("learns")
                    .embedding
                }
                _ => {
                    learn_tree_imperfect(&inst, EPSILON, EPS_PRIME, zeta, i, &TreeConfig::default())
                        .expect("learns")
                        .embedding
                }
            };
            let a = accuracy(&inst, &emb, 1.0 + EPS_PRIME)
                .expect("scored")
                .accuracy;
            let ln = (n as f64).ln();
            let bound = (1.0 - 5.0 * zeta.sqrt() * ln.powf(0.75) - EPSILON)
                .max(single_point_baseline(&inst));
            ok += usize::from(a >= bound - 1e-12);
        }
        pass &= ok >= 18;
        tallies.push(format!("{name} {ok}/20"));
    }
    Outcome {
        pass,
        detail: tallies.join(", "),
    }
}

/// Every artifact of a small suite, concatenated.
fn artifacts() -> String {
    let mut out = String::new();
    for i in 0..3u64 {
        let (inst, _) = generate_planted(Host::Line, 7, 1.0, 1.5, 0.0, i).expect("planted");
        out += &inst.to_json();
        if let Some(e) = learn_line(&inst).expect("learns") {
            out += &e.to_json();
        }
        let (inst, _) =
            generate_planted(Host::Euclidean(2), 14, 1.0, 1.5, 0.05, i).expect("planted");
        out += &inst.to_json();
        let cfg = EuclideanConfig::default();
        out += &learn_euclidean_perfect(&inst, 2, EPSILON, EPS_PRIME, i, &cfg)
            .expect("learns")
            .embedding
            .to_json();
        let r =
            learn_euclidean_imperfect(&inst, 2, EPSILON, EPS_PRIME, 0.05, i, &cfg).expect("learns");
        out += &r.embedding.to_json();
        out += &format!("{:?}", r.stats);
        let (inst, _) = generate_planted(Host::Tree, 14, 1.0, 1.5, 0.05, i).expect("planted");
        out += &inst.to_json();
        let cfg = TreeConfig::default();
        out += &learn_tree_perfect(&inst, EPSILON, EPS_PRIME, i, &cfg)
            .expect("learns")
            .embedding
            .to_json();
        out += &learn_tree_imperfect(&inst, EPSILON, EPS_PRIME, 0.05, i, &cfg)
            .expect("learns")
            .embedding
            .to_json();
    }
    out
}

fn determinism() -> Outcome {
    let pool = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool")
    };
    let first = pool(1).install(artifacts);
    let second = pool(4).install(artifacts);
    let third = artifacts();
    let same = first == second && second == third;
    Outcome {
        pass: same,
        detail: format!(
            "{} bytes identical across 3 runs (1, 4, default threads): {same}",
            first.len()
        ),
    }
}

type Criterion = (&'static str, fn() -> Outcome, Duration);

fn main() {
    let criteria: [Criterion; 8] = [
        (
            "line verdicts match brute force",
            line_exactness,
            Duration::from_secs(60),
        ),
        (
            "finite search within ε of optimum",
            finite_gap,
            Duration::from_secs(300),
        ),
        ("annuli cut rate", annuli_rates, Duration::from_secs(120)),
        (
            "perfect-information pipelines",
            perfect_pipelines,
            Duration::from_secs(600),
        ),
        (
            "well-linked removal budget",
            well_linked_budget,
            Duration::from_secs(600),
        ),
        (
            "cores avoid forbidden edges",
            core_extraction,
            Duration::from_secs(600),
        ),
        (
            "imperfect pipelines beat the baseline",
            imperfect_pipelines,
            Duration::from_secs(600),
        ),
        (
            "byte-identical reruns",
            determinism,
            Duration::from_secs(600),
        ),
    ];
    let mut failed = 0;
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let pass = outcome.pass && elapsed <= *limit;
        failed += usize::from(!pass);
        println!(
            "criterion {}: {} ({name}): {} [{:.1}s of {}s]",
            i + 1,
            if pass { "PASS" } else { "FAIL" },
            outcome.detail,
            elapsed.as_secs_f64(),
            limit.as_secs()
        );
    }
    if failed > 0 {
        eprintln!("{failed} criteria failed");
        std::process::exit(1);
    }
}
