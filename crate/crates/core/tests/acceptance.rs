//! Acceptance criteria, one line each. Runs without the test harness so the lines always print.

use std::f64::consts::TAU;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use hypquad::dynamics::{
    action, hofer_norm, iterate, Bump, Hamiltonian, HamiltonianSystem, Integrator, TimeProfile,
};
use hypquad::experiment::{frame_stage, orbit_stage, system_stage, ExperimentConfig, OrbitStage};
use hypquad::floercheck::{
    is_slow, make_linear_floer_solution, reparametrize_to_slow, slow_inequality_audit, subharmonicity_check,
    CylinderGrid, HomotopyProfile,
};
use hypquad::indices::{
    check_gap, cz_index, direct_sum_generators, index_report, mean_index, rotation_generator, saddle_generator,
    SymplecticPath,
};
use hypquad::linalg;
use hypquad::orbits::{confined, find_fixed_points, grid_seeds, OrbitOptions, PeriodicOrbit};
use hypquad::planning::{mean_index_window, plan_window, PrimeStream};
use hypquad::quadform::{build_normal_form, rescale_to_small, slow_bound, Block, BlockSpec, NormalFrame};
use hypquad::taming::{build_profile, max_shift_epsilon, shift_bound_check, verify_profile, ShiftOptions, Tamed};
use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: u64) -> Result<(), String> {
    ensure(elapsed.as_secs_f64() < limit as f64, || {
        format!("runtime {:.1}s exceeds {limit}s", elapsed.as_secs_f64())
    })
}

fn random_spec(rng: &mut ChaCha8Rng) -> BlockSpec {
    let n = rng.random_range(1..=6);
    let mut blocks = Vec::new();
    let mut used = 0;
    while used < n {
        let m = rng.random_range(1..=n - used);
        blocks.push(Block {
            sigma: rng.random_range(0.2..5.0),
            m,
        });
        used += m;
    }
    BlockSpec::new(blocks).unwrap()
}

fn unit(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0));
        let r = v.norm();
        if r > 1e-3 && r <= 1.0 {
            return v / r;
        }
    }
}

/// `‖·‖` of a symmetric matrix as its largest absolute eigenvalue.
fn sym_norm(m: &DMatrix<f64>) -> f64 {
    let s = (m + m.transpose()) * 0.5;
    s.symmetric_eigenvalues().amax()
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = f64::INFINITY;
    for _ in 0..50 {
        let frame = rescale_to_small(&build_normal_form(&random_spec(&mut rng)).unwrap());
        let (d, e, l) = (&frame.d, &frame.e, frame.lambda);
        let e2 = sym_norm(&(e * e));
        let de = sym_norm(&(d * e));
        let ed = sym_norm(&(e * d));
        let skew = (e - e.transpose()).singular_values().max();
        let min_a = ((&frame.a + frame.a.transpose()) * 0.5).symmetric_eigenvalues().min();
        let margins = [
            l * l / 10.0 - e2,
            l * l / 20.0 - de,
            l * l / 20.0 - ed,
            l / 8.0 - skew,
            min_a - l / 2.0,
        ];
        let m = margins.into_iter().fold(f64::INFINITY, f64::min);
        worst = worst.min(m);
        ensure(m >= -1e-10, || format!("frame {:?} margin {m:e}", frame.a))?;
    }
    within(start.elapsed(), 5)?;
    Ok(format!("50 frames, worst margin {worst:.3e}, {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let specs = [
        BlockSpec::single(1.0, 1),
        BlockSpec::single(0.5, 1),
        BlockSpec::single(2.0, 2),
        BlockSpec::new(vec![Block { sigma: 1.0, m: 1 }, Block { sigma: 3.0, m: 1 }]),
        BlockSpec::single(1.5, 3),
        BlockSpec::new(vec![Block { sigma: 0.7, m: 2 }, Block { sigma: 1.2, m: 1 }]),
    ];
    let grid = CylinderGrid::square(64);
    let mut count = 0;
    let mut worst = f64::INFINITY;
    for spec in specs {
        let frame = rescale_to_small(&build_normal_form(&spec.unwrap()).unwrap());
        for k in -4..=4 {
            for j in 0..frame.dim() {
                let field = make_linear_floer_solution(&frame, k, j, grid).map_err(|e| e.to_string())?;
                let rep = subharmonicity_check(&field, &frame).map_err(|e| e.to_string())?;
                ensure(rep.pass(), || format!("k = {k}, j = {j}: {rep:?}"))?;
                worst = worst.min(rep.min_margin + rep.tolerance);
                count += 1;
            }
        }
    }
    ensure(count >= 100, || format!("only {count} solutions"))?;
    within(start.elapsed(), 60)?;
    Ok(format!(
        "{count} solutions, worst margin above -10h² {worst:.3e}, all maxima on the boundary, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn saddle_system(r: f64) -> HamiltonianSystem {
    HamiltonianSystem::unperturbed(build_normal_form(&BlockSpec::single(1.0, 1).unwrap()).unwrap(), r).unwrap()
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let h = saddle_system(1.0);
    let mut notes = Vec::new();
    for eps in [1.0, 0.5, 0.1, 0.01] {
        let p = build_profile(&h, eps).map_err(|e| e.to_string())?;
        let rep = verify_profile(&p, 100_000, 7);
        for row in &rep.rows {
            let ok = match row.check.as_str() {
                "eta_shift_le_4c" => row.margin >= -1e-8,
                "equals_q_on_v" | "equals_eps_q_outside_r" => row.value == 0.0,
                _ => row.pass,
            };
            ensure(ok, || format!("ε = {eps}: {row:?}"))?;
        }
        let b = rep.row("lyapunov_q_growth").unwrap().margin;
        let c = rep.row("lyapunov_p_decay").unwrap().margin;
        let sup = rep.row("sup_qtilde_le_c2").unwrap();
        notes.push(format!("ε={eps}: sup {:.3e} ≤ C2 {:.3e}, q growth margin {b:.2e}, p decay margin {c:.2e}", sup.value, sup.bound));
    }
    within(start.elapsed(), 120)?;
    Ok(format!("{}; {:.1}s", notes.join("; "), start.elapsed().as_secs_f64()))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let h = saddle_system(1.0);
    let mut notes = Vec::new();
    for (k, l) in [(2, 1), (3, 2), (5, 2)] {
        let eps = max_shift_epsilon(&h.frame, h.kappa, k + l);
        let tamed = Tamed::new(&h, eps).map_err(|e| e.to_string())?;
        let opts = ShiftOptions {
            periodized: true,
            ..ShiftOptions::default()
        };
        let rep = shift_bound_check(&tamed, k, l, &opts).map_err(|e| e.to_string())?;
        ensure(rep.pass(), || format!("{rep:?}"))?;
        let per = rep.periodized.unwrap_or(f64::NAN);
        ensure(per <= rep.bound, || format!("periodized {per} > {}", rep.bound))?;
        notes.push(format!("({k},{l}) ε={eps:.4}: {:.1} ≤ {:.1}", rep.raw, rep.bound));
    }
    within(start.elapsed(), 300)?;
    Ok(format!("{}; {:.1}s", notes.join("; "), start.elapsed().as_secs_f64()))
}

fn orbit_gap_violations(orbits: &[PeriodicOrbit]) -> Vec<String> {
    orbits
        .iter()
        .filter(|o| !o.degenerate)
        .filter(|o| {
            let cz = o.index.cz;
            cz.is_none() || (o.index.mean - cz.unwrap() as f64).abs() >= o.z0.len() as f64 / 2.0
        })
        .map(|o| format!("period {} at {:?}: {:?}", o.period, o.z0.as_slice(), o.index))
        .collect()
}

fn test_system_orbits() -> Result<Vec<PeriodicOrbit>, String> {
    let frame = build_normal_form(&BlockSpec::single(1.0, 1).unwrap()).unwrap();
    let bumps = vec![
        Bump {
            center: vec![0.0, 0.7],
            radius: 0.6,
            amplitude: 0.35,
            time_profile: TimeProfile::Constant,
        },
        Bump {
            center: vec![-0.3, -0.2],
            radius: 0.4,
            amplitude: 0.2,
            time_profile: TimeProfile::Harmonic {
                mean: 0.5,
                amplitude: 1.0,
                phase: 0.1,
            },
        },
    ];
    let h = HamiltonianSystem::new(frame, 1.0, bumps, 1.3).unwrap();
    let seeds = grid_seeds(&[0.0, 0.0], 1.3, 13);
    find_fixed_points(&h, &seeds, &OrbitOptions::default()).map_err(|e| e.to_string())
}

fn criterion_5(demo: &OrbitStage) -> Outcome {
    let start = Instant::now();
    for n in 1..=3usize {
        let hyp: Vec<_> = (0..n).map(|i| saddle_generator(0.5 + i as f64)).collect();
        let p = SymplecticPath::linear(&direct_sum_generators(&hyp), 1.0, 100).unwrap();
        let cz = cz_index(&p).map_err(|e| e.to_string())?;
        ensure(cz == 0, || format!("hyperbolic n = {n}: cz {cz}"))?;
        let small: Vec<_> = (0..n).map(|i| rotation_generator(0.1 + 0.05 * i as f64)).collect();
        let p = SymplecticPath::linear(&direct_sum_generators(&small), 1.0, 100).unwrap();
        let cz = cz_index(&p).map_err(|e| e.to_string())?;
        ensure(cz == n as i64, || format!("small maximum n = {n}: cz {cz}"))?;
    }
    let mut worst_hom = 0.0_f64;
    let mixed = direct_sum_generators(&[rotation_generator(2.3), saddle_generator(0.7), rotation_generator(-0.9)]);
    let mut paths = vec![
        SymplecticPath::linear(&rotation_generator(1.7), 1.0, 64).unwrap(),
        SymplecticPath::linear(&mixed, 1.0, 64).unwrap(),
    ];
    paths.extend(demo.fixed.iter().map(|o| o.monodromy.clone()));
    for p in &paths {
        let d = mean_index(p).map_err(|e| e.to_string())?;
        for k in 1..=20 {
            let dk = mean_index(&p.iterate(k)).map_err(|e| e.to_string())?;
            worst_hom = worst_hom.max((dk - k as f64 * d).abs());
        }
    }
    ensure(worst_hom < 1e-6, || format!("homogeneity defect {worst_hom:e}"))?;
    let mut orbits = test_system_orbits()?;
    orbits.extend(demo.fixed.iter().cloned());
    orbits.extend(demo.simple.iter().cloned());
    let bad = orbit_gap_violations(&orbits);
    ensure(bad.is_empty(), || bad.join("; "))?;
    for o in &orbits {
        if !o.degenerate {
            let r = index_report(&o.monodromy).map_err(|e| e.to_string())?;
            ensure(check_gap(&r, o.z0.len() / 2), || format!("{r:?}"))?;
        }
    }
    Ok(format!(
        "cz exact for n = 1..3, homogeneity defect {worst_hom:.1e} (k ≤ 20), gap holds on {} orbits, {:.1}s",
        orbits.len(),
        start.elapsed().as_secs_f64()
    ))
}

/// `inf ‖x‖²/|Q(x)|` by sampling followed by coordinate search from the best samples.
fn sampled_inf_ratio(frame: &NormalFrame, rng: &mut ChaCha8Rng) -> f64 {
    let dim = frame.dim();
    let ratio = |x: &DVector<f64>| x.norm_squared() / frame.q_value(x).abs();
    let mut samples: Vec<(f64, DVector<f64>)> = (0..20_000)
        .map(|_| {
            let x = unit(rng, dim);
            (ratio(&x), x)
        })
        .collect();
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best = samples[0].0;
    for (mut r, mut x) in samples.into_iter().take(8) {
        let mut step = 0.1;
        while step > 1e-9 {
            let mut improved = false;
            for i in 0..dim {
                for s in [step, -step] {
                    let mut y = x.clone();
                    y[i] += s;
                    let y = y.normalize();
                    let v = ratio(&y);
                    if v < r {
                        r = v;
                        x = y;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        best = best.min(r);
    }
    best
}

fn criterion_6() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut worst_rel = 0.0_f64;
    let mut worst_audit = f64::INFINITY;
    for trial in 0..12 {
        let spec = if trial == 0 {
            BlockSpec::single(1.0, 1).unwrap()
        } else {
            let mut s = random_spec(&mut rng);
            while s.half_dim() > 3 {
                s = random_spec(&mut rng);
            }
            s
        };
        let frame = rescale_to_small(&build_normal_form(&spec).unwrap());
        let inf = sampled_inf_ratio(&frame, &mut rng);
        let expect = 0.15 * frame.lambda * frame.lambda * inf;
        let rel = (slow_bound(&frame) - expect).abs() / expect;
        worst_rel = worst_rel.max(rel);
        ensure(rel < 1e-3, || format!("{:?}: slow bound {} vs sampled {expect}", frame.a, slow_bound(&frame)))?;

        let k0 = rng.random_range(0.05..3.0);
        let k1 = rng.random_range(0.05..3.0);
        let wiggle = rng.random_range(0.0..0.5);
        let len = rng.random_range(0.05..2.0);
        // sin²(πu) has derivative π sin(2πu)
        let prof = HomotopyProfile::from_fn(
            0.0,
            len,
            401,
            |s| k0 + (k1 - k0) * s / len + wiggle * (0.5 * TAU * s / len).sin().powi(2),
            |s| ((k1 - k0) + wiggle * 0.5 * TAU * (TAU * s / len).sin()) / len,
        )
        .map_err(|e| e.to_string())?;
        let slow = reparametrize_to_slow(&prof, &frame);
        ensure(is_slow(&slow, &frame), || format!("not slow after reparametrization: rate {}", slow.rate()))?;
        let points: Vec<_> = (0..10_000).map(|_| unit(&mut rng, frame.dim()) * rng.random_range(0.01..10.0)).collect();
        let audit = slow_inequality_audit(&frame, &slow, &points);
        ensure(audit.holds(), || format!("{audit:?}"))?;
        worst_audit = worst_audit.min(audit.min_margin);
    }
    Ok(format!(
        "12 frames, worst relative error {worst_rel:.1e}, closing inequality margin ≥ {worst_audit:.3e} on 10⁴ samples each, {:.1}s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_7(demo: &OrbitStage) -> Outcome {
    let start = Instant::now();
    let frame = build_normal_form(&BlockSpec::single(1.0, 1).unwrap()).unwrap();
    let bump = Bump {
        center: vec![0.0, 0.7],
        radius: 0.6,
        amplitude: 0.35,
        time_profile: TimeProfile::Constant,
    };
    let h = HamiltonianSystem::new(frame, 1.0, vec![bump], 1.3).unwrap();
    let integ = Integrator::new(0.01);

    // action homogeneity on every demo fixed point
    let mut worst_action = 0.0_f64;
    for x in &demo.fixed {
        let a1 = action(&h, &x.samples).map_err(|e| e.to_string())?;
        for k in 1..=10 {
            let ak = action(&h, &x.samples.iterate(k)).map_err(|e| e.to_string())?;
            worst_action = worst_action.max((ak - k as f64 * a1).abs());
        }
    }
    ensure(worst_action < 1e-6, || format!("action homogeneity defect {worst_action:e}"))?;

    // ‖H^{♮k}‖ = k‖H‖ for autonomous H
    let base = hofer_norm(&h, 1.0, 41).value;
    let mut worst_hofer = 0.0_f64;
    for k in [2, 3, 4] {
        let it = iterate(&h, k, integ).map_err(|e| e.to_string())?;
        let v = hofer_norm(&it, 1.0, 41).value;
        worst_hofer = worst_hofer.max((v - k as f64 * base).abs());
    }
    ensure(worst_hofer < 1e-6, || format!("Hofer homogeneity defect {worst_hofer:e}"))?;

    // symplecticity of every monodromy, relative to its size
    let mut worst_sym = 0.0_f64;
    for o in demo.fixed.iter().chain(&demo.simple) {
        for (_, m) in &o.monodromy.samples {
            worst_sym = worst_sym.max(linalg::symplectic_defect(m) / m.amax().max(1.0).powi(2));
        }
    }
    ensure(worst_sym < 1e-8, || format!("symplectic defect {worst_sym:e}"))?;

    // energy: exact for the quadratic part over [0, 10], to integrator order with bumps over unit time
    let mut drift = [0.0_f64; 2];
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let quad = h.quadratic();
    // the (1 − u)³ profile is only C² on the support boundary, so crossings lose one order
    let fine = Integrator::new(2.5e-4);
    let long: Vec<f64> = (0..=100).map(|j| j as f64 * 0.1).collect();
    let unit_time: Vec<f64> = (0..=20).map(|j| j as f64 * 0.05).collect();
    for _ in 0..20 {
        let z0 = unit(&mut rng, 2) * rng.random_range(0.0..1.2);
        for (slot, ham, integ, grid) in [
            (0, &quad as &dyn Hamiltonian, &integ, &long),
            (1, &h as &dyn Hamiltonian, &fine, &unit_time),
        ] {
            let e0 = ham.value(0.0, &z0);
            let traj = integ.trajectory(ham, &z0, grid).map_err(|e| e.to_string())?;
            for z in &traj.states {
                drift[slot] = drift[slot].max((ham.value(0.0, z) - e0).abs());
            }
        }
    }
    ensure(drift[0] < 1e-10 && drift[1] < 1e-10, || {
        format!("energy drift {:e} (quadratic), {:e} (with bumps)", drift[0], drift[1])
    })?;
    Ok(format!(
        "action {worst_action:.1e}, Hofer {worst_hofer:.1e}, symplectic {worst_sym:.1e}, energy {:.1e} / {:.1e}, {:.1}s",
        drift[0],
        drift[1],
        start.elapsed().as_secs_f64()
    ))
}

fn is_prime(p: usize) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0)
}

fn criterion_8(demo: &Result<(OrbitStage, HamiltonianSystem, Duration), String>) -> Outcome {
    let (stage, h, elapsed) = demo.as_ref().map_err(|e| e.clone())?;
    let x = stage
        .fixed
        .iter()
        .find(|o| o.index.mean.abs() > 1e-6)
        .ok_or("no fixed point with nonzero mean index")?;
    let mut primes = std::collections::BTreeSet::new();
    for o in &stage.simple {
        let p = o.minimal_period;
        if p > 31 || !is_prime(p) || p != o.period {
            continue;
        }
        let nondeg_gap = !o.degenerate && o.index.gap_ok;
        if o.residual < 1e-9 && nondeg_gap && confined(h, o) {
            primes.insert(p);
        }
    }
    ensure(primes.len() >= 3, || format!("prime periods {primes:?}"))?;
    within(*elapsed, 600)?;
    Ok(format!(
        "Δ = {:.4} at {:?}; simple orbits of prime periods {:?} pass residual, gap and support checks; {:.1}s",
        x.index.mean,
        x.z0.as_slice(),
        primes,
        elapsed.as_secs_f64()
    ))
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..20 {
        let a = rng.random_range(0.05..3.0);
        let c3 = rng.random_range(0.1..20.0);
        let m = rng.random_range(1..=4);
        let floor = rng.random_range(2..2000);
        let plan = plan_window(a, c3, m, floor).map_err(|e| e.to_string())?;
        let (pi, pm) = (plan.primes[0] as f64, plan.primes[m] as f64);
        let delta = c3 * (pm - pi);
        let alpha = plan.alpha;
        ensure((plan.delta - delta).abs() <= 1e-12 * delta.max(1.0), || "delta mismatch".into())?;
        ensure(pi * a > 6.0 * delta, || format!("p_i a = {} ≤ 6δ = {}", pi * a, 6.0 * delta))?;
        let inner = [-pi * a, -alpha, -alpha + 2.0 * delta, 0.0, alpha, alpha + 2.0 * delta, pi * a];
        let outer = [-pm * a, -alpha + delta, 0.0, alpha + delta, pm * a];
        ensure(inner.windows(2).all(|w| w[0] < w[1]), || format!("inner chain {inner:?}"))?;
        ensure(outer.windows(2).all(|w| w[0] < w[1]), || format!("outer chain {outer:?}"))?;
        ensure(pi * a - 4.0 * delta < alpha && alpha < pi * a - 2.0 * delta, || "α outside interval".into())?;
    }
    let mut checked = 0;
    for _ in 0..200 {
        let delta_h: f64 = rng.random_range(0.05..3.0) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let n = rng.random_range(1..=3usize);
        let m = (n as f64 / delta_h.abs()).floor() as usize + 1 + rng.random_range(0..3);
        let mut s = PrimeStream::new(rng.random_range(3..100_000), u64::MAX);
        let primes: Vec<u64> = (0..=m).map(|_| s.next_prime().unwrap()).collect();
        let w0 = mean_index_window(delta_h, primes[0], n);
        let w1 = mean_index_window(delta_h, primes[m], n);
        // real intervals [pΔ − n, pΔ + n] and their integer points, computed directly
        let (c0, c1) = (primes[0] as f64 * delta_h, primes[m] as f64 * delta_h);
        ensure((c1 - c0).abs() > 2.0 * n as f64, || format!("real windows meet: {c0} {c1} n = {n}"))?;
        ensure(w0.disjoint(&w1), || format!("{w0:?} {w1:?}"))?;
        checked += 1;
    }
    Ok(format!(
        "20 random plans verified by substitution, {checked} disjointness cases, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn run_demo() -> Result<(OrbitStage, HamiltonianSystem, Duration), String> {
    let start = Instant::now();
    let cfg = ExperimentConfig::island_example();
    let (_, frame) = frame_stage(&cfg).map_err(|e| e.to_string())?;
    let h = system_stage(&cfg, &frame).map_err(|e| e.to_string())?;
    let stage = orbit_stage(&cfg, &h).map_err(|e| e.to_string())?;
    Ok((stage, h, start.elapsed()))
}

fn report(i: usize, name: &str, outcome: Outcome) -> bool {
    match outcome {
        Ok(msg) => {
            println!("criterion {i} [{name}]: PASS  {msg}");
            true
        }
        Err(msg) => {
            println!("criterion {i} [{name}]: FAIL  {msg}");
            false
        }
    }
}

fn main() -> ExitCode {
    // `cargo test -- --list` and filters are not meaningful here
    if std::env::args().any(|a| a == "--list") {
        println!("acceptance: test");
        return ExitCode::SUCCESS;
    }
    let demo = run_demo();
    let empty = OrbitStage {
        fixed: Vec::new(),
        simple: Vec::new(),
        periods: Vec::new(),
        seeds: 0,
    };
    let stage = demo.as_ref().map(|d| &d.0).unwrap_or(&empty);
    let results = [
        report(1, "smallness", criterion_1()),
        report(2, "subharmonicity", criterion_2()),
        report(3, "taming profile", criterion_3()),
        report(4, "iteration shift", criterion_4()),
        report(5, "index normalization", criterion_5(stage)),
        report(6, "slow homotopy", criterion_6()),
        report(7, "dynamics laws", criterion_7(stage)),
        report(8, "demonstration run", criterion_8(&demo)),
        report(9, "window planning", criterion_9()),
    ];
    let passed = results.iter().filter(|r| **r).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
