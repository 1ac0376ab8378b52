//! End-to-end acceptance checks. Runs without the libtest harness so each
//! check prints exactly one `PASS`/`FAIL` line; exits non-zero on any failure.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use teleport_core::channels::{build_noise_model, casablanca_calibration, DurationConfig, NoiseModel};
use teleport_core::circuit::{marginal_counts, Bitstring, Circuit, Step};
use teleport_core::experiment::{device_circuit, plus_plus, run_on_device, tomography_fidelities, RECEIVERS};
use teleport_core::protocols::{
    cluster_channel_teleport, count_bell_resources, multi_output_teleport, GeneralizedBellTypeState,
};
use teleport_core::qstate::{CMatrix, DensityMatrix, StateVector};
use teleport_core::tomography::{
    exact_expectations, fidelity, fidelity_stats, pure_fidelity, reconstruct, tomography, CLASSICAL_LIMIT,
};
use teleport_core::transpile::{casablanca_topology, route, CouplingGraph};

fn report(n: usize, name: &str, ok: bool, elapsed: Duration, limit: Duration, detail: &str) -> bool {
    let pass = ok && elapsed < limit;
    println!(
        "{} criterion {n} ({name}): {detail}; {:.3} s of {} s allowed",
        if pass { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        limit.as_secs()
    );
    pass
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<Complex64> {
    loop {
        let v: Vec<Complex64> =
            (0..dim).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        let n = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if n > 1e-3 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

fn random_pure(rng: &mut ChaCha8Rng, n: usize) -> StateVector {
    StateVector::new(random_unit(rng, 1 << n)).unwrap()
}

fn random_input(rng: &mut ChaCha8Rng, n: usize) -> GeneralizedBellTypeState {
    let c = random_unit(rng, 2);
    let x = rng.gen_range(0..1usize << n);
    GeneralizedBellTypeState::new(n, x, c[0], c[1]).unwrap()
}

/// Convex mixture of a few random pure states.
fn random_mixed(rng: &mut ChaCha8Rng, n: usize) -> DensityMatrix {
    let d = 1 << n;
    let k = rng.gen_range(1..=3);
    let weights: Vec<f64> = (0..k).map(|_| rng.gen_range(0.1..1.0)).collect();
    let total: f64 = weights.iter().sum();
    let mut m = CMatrix::zeros(d);
    for w in weights {
        let v = random_unit(rng, d);
        m = &m + &CMatrix::outer(&v, &v).scale_real(w / total);
    }
    DensityMatrix::new(m).unwrap()
}

fn criterion_1_two_bell_pairs_suffice() -> bool {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst: f64 = 1.0;
    let mut pairs_used = Vec::new();
    for trial in 0..200 {
        let m = 1 + trial % 3;
        let (a, b) = (random_input(&mut rng, m), random_input(&mut rng, m + 1));
        let target = a.to_state_vector().tensor(&b.to_state_vector());
        let (branches, res) = multi_output_teleport(&a, &b).unwrap();
        pairs_used.push(res.bell_pairs);
        for br in &branches {
            worst = worst.min(br.output.overlap(&target).unwrap());
        }
    }
    let ok = (1.0 - worst) < 1e-10 && pairs_used.iter().all(|&p| p == 2);
    report(
        1,
        "two Bell pairs suffice",
        ok,
        t.elapsed(),
        Duration::from_secs(10),
        &format!("min branch fidelity {worst:.15}"),
    )
}

fn criterion_2_cluster_equivalence() -> bool {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 1.0;
    let mut ok = true;
    for _ in 0..50 {
        let (a, b) = (random_input(&mut rng, 1), random_input(&mut rng, 2));
        let (two, r2) = multi_output_teleport(&a, &b).unwrap();
        let (cl, r5) = cluster_channel_teleport(&a, &b).unwrap();
        ok &= r5.channel_qubits == 5 && r2.channel_qubits == 4 && two.len() == cl.len();
        for (x, y) in cl.iter().zip(&two) {
            ok &= x.outcome_bits.select(&[0, 1, 2, 3]) == y.outcome_bits;
            ok &= (x.probability - y.probability).abs() < 1e-10;
            worst = worst.min(x.output.overlap(&y.output).unwrap());
        }
    }
    ok &= (1.0 - worst) < 1e-10;
    report(
        2,
        "cluster equivalence",
        ok,
        t.elapsed(),
        Duration::from_secs(5),
        &format!("min paired fidelity {worst:.15}, 5 vs 4 channel qubits"),
    )
}

fn criterion_3_uniform_histogram() -> bool {
    let t = Instant::now();
    let c = device_circuit(&plus_plus(), true).unwrap();
    let graph = casablanca_topology();
    let model = NoiseModel::ideal(7);
    let (shots, mean) = (8192u64, 2048.0);
    let sigma = (shots as f64 * 0.25 * 0.75).sqrt();
    let mut good = 0;
    for seed in 0..10 {
        let run = run_on_device(&c, &graph, &model, shots, seed).unwrap();
        let counts = marginal_counts(&run.run.counts, &[4, 5]);
        let within = (0..4).all(|i| {
            let k = counts.get(&Bitstring::from_index(i, 2)).copied().unwrap_or(0) as f64;
            (k - mean).abs() <= 3.0 * sigma
        });
        good += within as usize;
    }
    report(
        3,
        "uniform histogram",
        good >= 9,
        t.elapsed(),
        Duration::from_secs(5),
        &format!("{good}/10 seeds within 3σ = {:.1}", 3.0 * sigma),
    )
}

fn criterion_4_statistics() -> bool {
    let t = Instant::now();
    let text = include_str!("../../../data/hardware_fidelities.txt");
    let values: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| l.trim().parse().unwrap())
        .collect();
    let s = fidelity_stats(&values).unwrap();
    let ok = values.len() == 10 && (s.sample_std - 3.096).abs() < 1e-3 && (s.mean - 79.636).abs() < 1e-3;
    report(
        4,
        "statistics",
        ok,
        t.elapsed(),
        Duration::from_secs(1),
        &format!("mean {:.4}, sample std {:.4}", s.mean, s.sample_std),
    )
}

fn criterion_5_noise_plausibility() -> bool {
    let t = Instant::now();
    let nm = build_noise_model(&casablanca_calibration(), &DurationConfig::default()).unwrap();
    let target = plus_plus();
    let c = device_circuit(&target, true).unwrap();
    let run = run_on_device(&c, &casablanca_topology(), &nm, 8192, 0).unwrap();
    let rho = run.reduced(&RECEIVERS).unwrap();
    let noise = run.model_for(&RECEIVERS).unwrap();
    let f = tomography_fidelities(&rho, Some(&noise), &target, 8192, 0, 10).unwrap();
    let mean = f.iter().sum::<f64>() / f.len() as f64;
    let mut probs = [0.0; 4];
    for (k, p) in &run.run.probabilities {
        probs[k.select(&[4, 5]).to_index()] += p;
    }
    let spread = probs.iter().cloned().fold(f64::MIN, f64::max) - probs.iter().cloned().fold(f64::MAX, f64::min);
    let ok = mean > CLASSICAL_LIMIT && mean < 0.98 && spread > 0.005;
    report(
        5,
        "noise plausibility",
        ok,
        t.elapsed(),
        Duration::from_secs(30),
        &format!("mean fidelity {mean:.4}, outcome spread {spread:.4}"),
    )
}

fn criterion_6_fidelity_formula() -> bool {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst: f64 = 0.0;
    for i in 0..20 {
        let n = 1 + i % 2;
        let psi = random_pure(&mut rng, n);
        let rho = random_mixed(&mut rng, n);
        let direct = pure_fidelity(&psi, &rho).unwrap();
        worst = worst.max((fidelity(&psi.to_density(), &rho).unwrap() - direct).abs());
    }
    let rho = random_mixed(&mut rng, 2);
    let same = fidelity(&rho, &rho).unwrap();
    let orth = fidelity(&StateVector::basis(2, 1).to_density(), &StateVector::basis(2, 2).to_density()).unwrap();
    let ok = worst < 1e-8 && (same - 1.0).abs() < 1e-10 && orth.abs() < 1e-10;
    report(
        6,
        "fidelity formula",
        ok,
        t.elapsed(),
        Duration::from_secs(2),
        &format!("max deviation {worst:.2e}, F(ρ,ρ) = {same:.12}, orthogonal {orth:.1e}"),
    )
}

fn criterion_7_tomography_round_trip() -> bool {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_exact: f64 = 0.0;
    for _ in 0..20 {
        let rho = random_mixed(&mut rng, 2);
        let r = reconstruct(&exact_expectations(&rho)).unwrap();
        worst_exact = worst_exact.max(r.trace_distance(&rho).unwrap());
    }
    let mut good = 0;
    let mut worst_sampled: f64 = 0.0;
    for seed in 0..10 {
        let rho = random_mixed(&mut rng, 2);
        let d = tomography(&rho, None, 8192, seed).unwrap().trace_distance(&rho).unwrap();
        worst_sampled = worst_sampled.max(d);
        good += (d < 0.05) as usize;
    }
    let ok = worst_exact < 1e-10 && good >= 9;
    report(
        7,
        "tomography round trip",
        ok,
        t.elapsed(),
        Duration::from_secs(30),
        &format!("exact max distance {worst_exact:.2e}, sampled {good}/10 below 0.05 (max {worst_sampled:.4})"),
    )
}

/// Two-qubit interactions in program order.
fn interactions(c: &Circuit) -> Vec<(usize, usize)> {
    c.steps()
        .iter()
        .filter_map(|s| match s {
            Step::Gate(g) | Step::Conditional { gate: g, .. } if g.arity() == 2 => {
                Some((g.targets()[0], g.targets()[1]))
            }
            _ => None,
        })
        .collect()
}

/// Fewest SWAPs over every initial layout and SWAP placement, searching up
/// to `budget` SWAPs. `None` if more are needed.
fn brute_force_min_swaps(c: &Circuit, g: &CouplingGraph, budget: usize) -> Option<usize> {
    let pairs = interactions(c);
    let edges: Vec<(usize, usize)> = g.edges().collect();
    fn solve(
        pairs: &[(usize, usize)],
        place: &[usize],
        g: &CouplingGraph,
        edges: &[(usize, usize)],
        left: usize,
    ) -> bool {
        let Some(&(a, b)) = pairs.first() else { return true };
        if g.has_edge(place[a], place[b]) && solve(&pairs[1..], place, g, edges, left) {
            return true;
        }
        left > 0
            && edges.iter().any(|&(u, v)| {
                let swapped: Vec<usize> = place
                    .iter()
                    .map(|&p| {
                        if p == u {
                            v
                        } else if p == v {
                            u
                        } else {
                            p
                        }
                    })
                    .collect();
                solve(pairs, &swapped, g, edges, left - 1)
            })
    }
    let mut layouts = vec![vec![]];
    for _ in 0..c.num_qubits() {
        layouts = layouts
            .into_iter()
            .flat_map(|l: Vec<usize>| {
                (0..g.num_physical())
                    .filter(|p| !l.contains(p))
                    .map(|p| [l.clone(), vec![p]].concat())
                    .collect::<Vec<_>>()
            })
            .collect();
    }
    (0..=budget).find(|&k| layouts.iter().any(|l| solve(&pairs, l, g, &edges, k)))
}

fn criterion_8_routing_optimality() -> bool {
    let t = Instant::now();
    let g = casablanca_topology();
    let experiment = device_circuit(&plus_plus(), true).unwrap();
    let r = route(&experiment, &g).unwrap();
    let brute = brute_force_min_swaps(&experiment, &g, 0);
    let mut ok = r.cost.swap_count == 0 && brute == Some(0);

    let mut tri = Circuit::new(3);
    tri.cnot(0, 1).cnot(1, 2).cnot(2, 0);
    let rt = route(&tri, &g).unwrap();
    let brute_tri = brute_force_min_swaps(&tri, &g, 2);
    ok &= rt.cost.swap_count >= 1 && brute_tri == Some(rt.cost.swap_count);
    report(
        8,
        "routing optimality",
        ok,
        t.elapsed(),
        Duration::from_secs(10),
        &format!(
            "experiment {} SWAPs (brute force {:?}), triangle {} SWAPs (brute force {:?})",
            r.cost.swap_count, brute, rt.cost.swap_count, brute_tri
        ),
    )
}

fn criterion_9_resource_rule() -> bool {
    let t = Instant::now();
    let mut ok = true;
    for n in 1..=16usize {
        // Smallest k with 2^k ≥ n.
        let expected = (0..).find(|&k| 1usize << k >= n).unwrap();
        ok &= count_bell_resources(n).unwrap().bell_pairs == expected;
    }
    ok &= count_bell_resources(4).unwrap().bell_pairs == 2;
    report(9, "resource rule", ok, t.elapsed(), Duration::from_secs(1), "n = 1..16 match the ceiling of log2 n")
}

fn main() {
    let checks: [fn() -> bool; 9] = [
        criterion_1_two_bell_pairs_suffice,
        criterion_2_cluster_equivalence,
        criterion_3_uniform_histogram,
        criterion_4_statistics,
        criterion_5_noise_plausibility,
        criterion_6_fidelity_formula,
        criterion_7_tomography_round_trip,
        criterion_8_routing_optimality,
        criterion_9_resource_rule,
    ];
    let passed = checks.iter().filter(|check| check()).count();
    println!("acceptance: {passed}/{} passed", checks.len());
    if passed != checks.len() {
        std::process::exit(1);
    }
}
