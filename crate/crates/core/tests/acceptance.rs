//! End-to-end acceptance checks. Each test prints one PASS/FAIL line.

use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use serde_json::Value;

use squeezing::classification::{build_su2_triple, enumerate_classes_with_examples, VertexSubset};
use squeezing::coherent_dynamics::{
    css_expectation_perp, find_limit, linear_grid, log_grid, min_fluctuation, oat_fluctuation,
    squeezing_parameter, sweep, CoherentSpec, EnsembleSpec,
};
use squeezing::exact_oracle::{build_basis, second_quantize, Discrepancy, OracleSystem};
use squeezing::lie_algebra::{commutator, multipole_basis};
use squeezing::operator::{distance_up_to_phase, CMatrix};
use squeezing::root_system::{compute_roots, CartanChoice};
use squeezing::scan_fit::{
    fit_power_law, log_spaced_n, zeta_scan, ClassRef, PowerLawModel, Remainder, ScanConfig,
};
use squeezing::SpinQuantum;

const J32: SpinQuantum = SpinQuantum::from_twice(3);

fn report(id: u32, name: &str, ok: bool, detail: String) {
    println!(
        "{} {id:>2} {name}: {detail}",
        if ok { "PASS" } else { "FAIL" }
    );
}

fn within(x: f64, target: f64, rel: f64) -> bool {
    ((x - target) / target).abs() <= rel
}

fn spec(subset: &[usize], n: u64, zeta: &[C64]) -> EnsembleSpec {
    let d = squeezing::classification::decompose_subset(
        &VertexSubset::new(J32, subset.iter().copied()).unwrap(),
    );
    EnsembleSpec::new(n, d, CoherentSpec::equatorial(zeta.to_vec()).unwrap()).unwrap()
}

fn re(x: &[f64]) -> Vec<C64> {
    x.iter().map(|&v| C64::new(v, 0.0)).collect()
}

#[test]
fn classification_of_three_halves() {
    let start = Instant::now();
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = squeezing::cli::run(
        ["squeeze", "--no-banner", "classify", "--j", "3/2"],
        &mut out,
        &mut err,
    );
    let elapsed = start.elapsed();
    let doc: Value = serde_json::from_slice(&out).unwrap();
    let classes = doc["classes"].as_array().unwrap();
    let expected: [(&[&str], f64); 4] = [
        (&["3/2"], 1.0),
        (&["0", "1"], (2.5f64).sqrt()),
        (&["1/2", "1/2"], 5f64.sqrt()),
        (&["0", "0", "1/2"], 10f64.sqrt()),
    ];
    let mut ok = code == 0 && classes.len() == 4;
    let mut worst = 0.0f64;
    for ((subspins, f), c) in expected.iter().zip(classes) {
        let got: Vec<&str> = c["subspins"]
            .as_array()
            .unwrap()
            .iter()
            .map(|s| s.as_str().unwrap())
            .collect();
        ok &= got == *subspins;
        worst = worst.max((c["f"].as_f64().unwrap() - f).abs());
    }
    ok &= worst <= 1e-12 && elapsed < Duration::from_secs(1);
    report(
        1,
        "classification",
        ok,
        format!(
            "{} classes, max |df| = {worst:.1e}, {elapsed:.2?}",
            classes.len()
        ),
    );
    assert!(ok);
}

#[test]
fn su4_root_system() {
    let start = Instant::now();
    let basis = multipole_basis(J32);
    let cartan = CartanChoice::standard(&basis).unwrap();
    let roots = compute_roots(&basis, &cartan).unwrap();
    let s5 = 5f64.sqrt();
    let positive = [
        [1.0, s5, 2.0],
        [2.0, s5, -1.0],
        [3.0, 0.0, 1.0],
        [1.0, 0.0, -3.0],
        [2.0, -s5, -1.0],
        [1.0, -s5, 2.0],
    ];
    let mut expected: Vec<[f64; 3]> = positive.to_vec();
    expected.extend(positive.iter().map(|r| r.map(|x| -x)));
    let dist = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let mut worst_root = 0.0f64;
    for e in &expected {
        let best = roots
            .iter()
            .map(|r| dist(&r.root, e))
            .fold(f64::INFINITY, f64::min);
        worst_root = worst_root.max(best);
    }

    // sqrt15/10 J+ + 1/2 Q+ - sqrt15/20 Ta+ - 1/4 Tb-, with X+- = Xx +- i Xy
    let g = |name: &str| {
        basis.generators()[basis.names().iter().position(|n| n == name).unwrap()]
            .matrix()
            .clone()
    };
    let i = C64::new(0.0, 1.0);
    let s15 = 15f64.sqrt();
    let plus = |x: &str, y: &str| g(x) + g(y) * i;
    let minus = |x: &str, y: &str| g(x) - g(y) * i;
    let a1: CMatrix = plus("Jx", "Jy") * C64::from(s15 / 10.0)
        + plus("Qzx", "Qyz") * C64::from(0.5)
        - plus("Tax", "Tay") * C64::from(s15 / 20.0)
        - minus("Tbx", "Tby") * C64::from(0.25);
    let ladder = &roots
        .iter()
        .find(|r| dist(&r.root, &[1.0, s5, 2.0]) < 1e-9)
        .unwrap()
        .ladder;
    let ladder_gap = distance_up_to_phase(ladder, &a1);
    let elapsed = start.elapsed();
    let ok = roots.len() == 12
        && worst_root <= 1e-9
        && ladder_gap <= 1e-9
        && elapsed < Duration::from_secs(1);
    report(
        2,
        "su(4) roots",
        ok,
        format!(
            "{} roots, max root error {worst_root:.1e}, ladder gap {ladder_gap:.1e}, {elapsed:.2?}",
            roots.len()
        ),
    );
    assert!(ok);
}

#[test]
fn spin_three_halves_multipole_matrices() {
    let s3 = 3f64.sqrt();
    let s5 = 5f64.sqrt();
    // (scale is imaginary, scale, rows)
    let table: [(&str, bool, f64, [[f64; 4]; 4]); 15] = [
        (
            "Jx",
            false,
            0.5,
            [
                [0., s3, 0., 0.],
                [s3, 0., 2., 0.],
                [0., 2., 0., s3],
                [0., 0., s3, 0.],
            ],
        ),
        (
            "Jy",
            true,
            0.5,
            [
                [0., -s3, 0., 0.],
                [s3, 0., -2., 0.],
                [0., 2., 0., -s3],
                [0., 0., s3, 0.],
            ],
        ),
        (
            "Jz",
            false,
            0.5,
            [
                [3., 0., 0., 0.],
                [0., 1., 0., 0.],
                [0., 0., -1., 0.],
                [0., 0., 0., -3.],
            ],
        ),
        (
            "Qxy",
            true,
            s5 / 2.,
            [
                [0., 0., -1., 0.],
                [0., 0., 0., -1.],
                [1., 0., 0., 0.],
                [0., 1., 0., 0.],
            ],
        ),
        (
            "Qyz",
            true,
            s5 / 2.,
            [
                [0., -1., 0., 0.],
                [1., 0., 0., 0.],
                [0., 0., 0., 1.],
                [0., 0., -1., 0.],
            ],
        ),
        (
            "Qzx",
            false,
            s5 / 2.,
            [
                [0., 1., 0., 0.],
                [1., 0., 0., 0.],
                [0., 0., 0., -1.],
                [0., 0., -1., 0.],
            ],
        ),
        (
            "Dxy",
            false,
            s5 / 2.,
            [
                [0., 0., 1., 0.],
                [0., 0., 0., 1.],
                [1., 0., 0., 0.],
                [0., 1., 0., 0.],
            ],
        ),
        (
            "Y",
            false,
            s5 / 2.,
            [
                [1., 0., 0., 0.],
                [0., -1., 0., 0.],
                [0., 0., -1., 0.],
                [0., 0., 0., 1.],
            ],
        ),
        (
            "Tax",
            false,
            0.25,
            [
                [0., -s3, 0., 5.],
                [-s3, 0., 3., 0.],
                [0., 3., 0., -s3],
                [5., 0., -s3, 0.],
            ],
        ),
        (
            "Tay",
            true,
            0.25,
            [
                [0., s3, 0., 5.],
                [-s3, 0., -3., 0.],
                [0., 3., 0., s3],
                [-5., 0., -s3, 0.],
            ],
        ),
        (
            "Taz",
            false,
            0.5,
            [
                [1., 0., 0., 0.],
                [0., -3., 0., 0.],
                [0., 0., 3., 0.],
                [0., 0., 0., -1.],
            ],
        ),
        (
            "Tbx",
            false,
            s5 / 4.,
            [
                [0., -1., 0., -s3],
                [-1., 0., s3, 0.],
                [0., s3, 0., -1.],
                [-s3, 0., -1., 0.],
            ],
        ),
        (
            "Tby",
            true,
            s5 / 4.,
            [
                [0., -1., 0., s3],
                [1., 0., s3, 0.],
                [0., -s3, 0., -1.],
                [-s3, 0., 1., 0.],
            ],
        ),
        (
            "Tbz",
            false,
            s5 / 2.,
            [
                [0., 0., 1., 0.],
                [0., 0., 0., -1.],
                [1., 0., 0., 0.],
                [0., -1., 0., 0.],
            ],
        ),
        (
            "Txyz",
            true,
            s5 / 2.,
            [
                [0., 0., -1., 0.],
                [0., 0., 0., 1.],
                [1., 0., 0., 0.],
                [0., -1., 0., 0.],
            ],
        ),
    ];
    let basis = multipole_basis(J32);
    let mut worst = 0.0f64;
    let mut names_ok = basis.len() == 15;
    for (k, (name, imaginary, scale, rows)) in table.iter().enumerate() {
        names_ok &= basis.names()[k] == *name;
        let s = if *imaginary {
            C64::new(0.0, *scale)
        } else {
            C64::new(*scale, 0.0)
        };
        let m = basis.generators()[k].matrix();
        for r in 0..4 {
            for c in 0..4 {
                worst = worst.max((m[(r, c)] - s * rows[r][c]).norm());
            }
        }
    }
    let ok = names_ok && worst <= 1e-12;
    report(
        3,
        "spin-3/2 matrices",
        ok,
        format!("15 matrices, max entry error {worst:.1e}"),
    );
    assert!(ok);
}

/// Five weight settings per class, all with weight on the largest subspin.
fn zeta_settings(r: usize) -> Vec<Vec<C64>> {
    let s = f64::sqrt;
    let i = |x: f64| C64::new(0.0, x);
    match r {
        1 => (0..5)
            .map(|k| vec![C64::from_polar(1.0, 0.7 * k as f64)])
            .collect(),
        2 => vec![
            re(&[1.0, 0.0]),
            re(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
            re(&[s(0.2), s(0.8)]),
            vec![C64::new(s(0.9), 0.0), i(s(0.1))],
            re(&[s(1.0 - PI / 4.0), s(PI / 4.0)]),
        ],
        _ => vec![
            re(&[1.0, 0.0, 0.0]),
            re(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0]),
            re(&[FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]),
            vec![C64::new(s(0.4), 0.0), C64::new(s(0.3), 0.0), i(s(0.3))],
            re(&[s(0.9), s(0.05), s(0.05)]),
        ],
    }
}

#[test]
fn closed_forms_match_exact_evolution() {
    let start = Instant::now();
    let mus = linear_grid(0.0, PI, 50);
    let mut failures = Vec::new();
    let mut worst = 0.0f64;
    let mut excluded = 0usize;
    let mut compared = 0usize;
    let mut blockwise_worst = 0.0f64;
    for (d, subset) in enumerate_classes_with_examples(J32) {
        for n in 2..=12u32 {
            let system = OracleSystem::new(&subset, n).unwrap();
            for zeta in zeta_settings(d.r()) {
                let coherent = CoherentSpec::equatorial(zeta.clone()).unwrap();
                let spec = EnsembleSpec::new(n as u64, d.clone(), coherent).unwrap();
                let perp0 = css_expectation_perp(&spec);
                let mut case_worst = 0.0f64;
                for t in sweep(&spec, &mus).unwrap() {
                    let gap = Discrepancy::new(&t, &system.squeezing(&spec, t.mu).unwrap(), perp0);
                    let block = Discrepancy::new(
                        &t,
                        &system.squeezing_blockwise(&spec, t.mu).unwrap(),
                        perp0,
                    );
                    blockwise_worst = blockwise_worst.max(block.max());
                    compared += 1;
                    excluded += gap.xi2.is_none() as usize;
                    case_worst = case_worst.max(gap.max());
                }
                worst = worst.max(case_worst);
                if case_worst > 1e-9 {
                    failures.push(format!(
                        "{} N={n} zeta={:.3?}: {case_worst:.2e}",
                        d.label(),
                        zeta.iter().map(|z| z.norm_sqr()).collect::<Vec<_>>()
                    ));
                }
            }
        }
    }
    let elapsed = start.elapsed();
    let ok = failures.is_empty() && elapsed < Duration::from_secs(300);
    report(
        4,
        "oracle equivalence",
        ok,
        format!(
            "{compared} points ({excluded} without xi2), max gap {worst:.2e}, {} failing cases; \
             per-block twisting max gap {blockwise_worst:.2e}; {elapsed:.2?}",
            failures.len()
        ),
    );
    for f in failures.iter().take(8) {
        println!("     {f}");
    }
    assert!(ok);
}

#[test]
fn spin_three_halves_limit() {
    let start = Instant::now();
    let n: f64 = 1e5;
    let l = find_limit(&spec(&[1, 2, 3], 100_000, &re(&[1.0]))).unwrap();
    let xi_target = 0.5 * n.powf(-2.0 / 3.0) + 1.0 / (3.0 * n);
    let mu_target = 2.0 / 3f64.sqrt() * n.powf(-2.0 / 3.0);
    let elapsed = start.elapsed();
    let ok = within(l.xi2_min, xi_target, 0.05)
        && within(l.mu_min, mu_target, 0.05)
        && elapsed < Duration::from_secs(10);
    report(
        5,
        "spin-3/2 limit",
        ok,
        format!("xi2_min {:.4e} (target {xi_target:.4e}), mu_min {:.4e} (target {mu_target:.4e}), {elapsed:.2?}", l.xi2_min, l.mu_min),
    );
    assert!(ok);
}

#[test]
fn single_subspace_weight_limits() {
    let two = find_limit(&spec(&[1, 2], 100_000, &re(&[1.0, 0.0]))).unwrap();
    let four = find_limit(&spec(&[1], 100_000, &re(&[1.0, 0.0, 0.0]))).unwrap();
    let ok = within(two.xi2_min, 0.00031, 0.1)
        && within(two.mu_min, 0.0007, 0.1)
        && within(four.xi2_min, 0.00049, 0.1)
        && within(four.mu_min, 0.0011, 0.1);
    report(
        6,
        "single-weight limits",
        ok,
        format!(
            "{{1,0}}: xi2 {:.4e} mu {:.4e}; {{1/2,0,0}}: xi2 {:.4e} mu {:.4e}",
            two.xi2_min, two.mu_min, four.xi2_min, four.mu_min
        ),
    );
    assert!(ok);
}

#[test]
fn equal_superposition_limit() {
    let n: f64 = 1e5;
    let l = find_limit(&spec(
        &[1, 3],
        100_000,
        &re(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]),
    ))
    .unwrap();
    let xi_target = 0.5 * (6.0 / n).powf(2.0 / 3.0);
    let mu_target = 2.0 * 3f64.powf(1.0 / 6.0) * (n / 2.0).powf(-2.0 / 3.0);
    let ok = within(l.xi2_min, xi_target, 0.1) && within(l.mu_min, mu_target, 0.1);
    report(
        7,
        "equal-superposition limit",
        ok,
        format!(
            "xi2_min {:.4e} (target {xi_target:.4e}), mu_min {:.4e} (target {mu_target:.4e})",
            l.xi2_min, l.mu_min
        ),
    );
    assert!(ok);
}

#[test]
fn weight_scan_maxima() {
    let mut grid = linear_grid(0.0, 1.0, 201);
    grid.extend([1.0 - PI / 4.0, PI / 4.0]);
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    let cfg = ScanConfig {
        j: J32,
        class: ClassRef::Subset(vec![1, 3]),
        n: vec![100_000],
        zeta1_sq_grid: grid,
        remainder: Remainder::Second,
    };
    let rows = zeta_scan(&cfg).unwrap();
    let vals: Vec<(f64, f64)> = rows
        .iter()
        .filter_map(|r| r.xi2_min.map(|x| (r.zeta1_sq, x)))
        .collect();
    let maxima: Vec<f64> = vals
        .windows(3)
        .filter(|w| w[1].1 > w[0].1 && w[1].1 > w[2].1)
        .map(|w| w[1].0)
        .collect();
    let near = |t: f64| maxima.iter().any(|m| (m - t).abs() <= 0.03);
    let ok = maxima.len() == 2 && near(1.0 - PI / 4.0) && near(PI / 4.0);
    report(
        8,
        "weight-scan maxima",
        ok,
        format!("local maxima at {maxima:.4?}"),
    );
    assert!(ok);
}

fn equal_pair_limits(ns: &[u64]) -> Vec<(f64, f64, f64)> {
    let w = 1.0 - PI / 4.0;
    ns.iter()
        .map(|&n| {
            let l = find_limit(&spec(&[1, 3], n, &re(&[w.sqrt(), (1.0 - w).sqrt()]))).unwrap();
            (n as f64, l.xi2_min, l.mu_min)
        })
        .collect()
}

#[test]
fn power_law_fits() {
    let data = equal_pair_limits(&log_spaced_n(1e3, 1e6, 12));
    let xi: Vec<(f64, f64)> = data.iter().map(|d| (d.0, d.1)).collect();
    let mu: Vec<(f64, f64)> = data.iter().map(|d| (d.0, d.2)).collect();
    let fx = fit_power_law(&xi, PowerLawModel::OffsetPowerInverse).unwrap();
    let fm = fit_power_law(&mu, PowerLawModel::Power).unwrap();
    let (c, p, q) = (
        fx.value("c").unwrap(),
        fx.value("p").unwrap(),
        fm.value("p").unwrap(),
    );
    let ok = within(c, 0.11, 0.3) && (p - 0.5).abs() <= 0.1 && (q - 0.73).abs() <= 0.05;
    report(
        9,
        "power-law fits",
        ok,
        format!(
            "c = {c:.4} +- {:.1e}, p = {p:.4} +- {:.1e}, mu exponent {q:.4} +- {:.1e}",
            fx.std_err("c").unwrap(),
            fx.std_err("p").unwrap(),
            fm.std_err("p").unwrap()
        ),
    );
    for (lo, hi) in [(1e3, 1e5), (1e4, 1e6), (1e2, 1e6)] {
        let sub = equal_pair_limits(&log_spaced_n(lo, hi, 12));
        let fx = fit_power_law(
            &sub.iter().map(|d| (d.0, d.1)).collect::<Vec<_>>(),
            PowerLawModel::OffsetPowerInverse,
        );
        let fm = fit_power_law(
            &sub.iter().map(|d| (d.0, d.2)).collect::<Vec<_>>(),
            PowerLawModel::Power,
        );
        match (fx, fm) {
            (Ok(fx), Ok(fm)) => println!(
                "     N in [{lo:.0e}, {hi:.0e}]: c = {:.4}, p = {:.4}, mu exponent {:.4}",
                fx.value("c").unwrap(),
                fx.value("p").unwrap(),
                fm.value("p").unwrap()
            ),
            (a, b) => println!(
                "     N in [{lo:.0e}, {hi:.0e}]: fit failed ({:?}, {:?})",
                a.err(),
                b.err()
            ),
        }
    }
    assert!(ok);
}

#[test]
fn spin_three_halves_scaling_slope() {
    let ns: Vec<u64> = (0..7)
        .map(|k| 10f64.powf(2.0 + 0.5 * k as f64).round() as u64)
        .collect();
    let pts: Vec<(f64, f64)> = ns
        .iter()
        .map(|&n| {
            (
                (n as f64).ln(),
                find_limit(&spec(&[1, 2, 3], n, &re(&[1.0])))
                    .unwrap()
                    .xi2_min
                    .ln(),
            )
        })
        .collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    let ok = (slope + 2.0 / 3.0).abs() <= 0.03;
    report(
        10,
        "scaling slope",
        ok,
        format!("slope {slope:.4} over N = {ns:?}"),
    );
    assert!(ok);
}

#[test]
fn invariant_suites() {
    let mut notes = Vec::new();
    let mut ok = true;

    // Gram and closure
    for twice in 1..=6u32 {
        let basis = multipole_basis(SpinQuantum::from_twice(twice));
        let norm = SpinQuantum::from_twice(twice).norm_sq();
        let gram = basis.gram();
        let g = gram
            .iter()
            .enumerate()
            .flat_map(|(a, row)| {
                row.iter()
                    .enumerate()
                    .map(move |(b, v)| (v - if a == b { norm } else { 0.0 }).abs())
            })
            .fold(0.0, f64::max);
        let trace = basis
            .generators()
            .iter()
            .map(|x| x.trace().abs())
            .fold(0.0, f64::max);
        ok &= g < 1e-10 && trace < 1e-10;
    }
    notes.push("gram".to_string());

    // su(2) triples with factor f
    for (d, subset) in enumerate_classes_with_examples(SpinQuantum::from_twice(5)) {
        let t = build_su2_triple(&subset);
        let [a, b, c] = t.operators();
        let lhs = commutator(a, b).unwrap();
        ok &= lhs.max_abs_diff(&c.scale(d.f())) < 1e-9;
    }
    notes.push("su(2) closure".to_string());

    // xi2(0) = 1, minimum uncertainty at mu = 0, nu grid bound
    let nus = linear_grid(0.0, PI, 361);
    for (d, _) in enumerate_classes_with_examples(J32) {
        for zeta in zeta_settings(d.r()) {
            let s = EnsembleSpec::new(1000, d.clone(), CoherentSpec::equatorial(zeta).unwrap())
                .unwrap();
            ok &= (squeezing_parameter(&s, 0.0).unwrap() - 1.0).abs() < 1e-12;
            let fl = min_fluctuation(&s, 0.0).unwrap();
            let bound = 0.5 * d.f() * css_expectation_perp(&s);
            ok &= ((fl.var_min * fl.var_max).sqrt() / bound - 1.0).abs() < 1e-12;
            for mu in log_grid(1e-4, 1.0, 9) {
                let fl = min_fluctuation(&s, mu).unwrap();
                let grid_min = nus
                    .iter()
                    .map(|&nu| oat_fluctuation(&s, mu, nu).unwrap())
                    .fold(f64::INFINITY, f64::min);
                ok &= fl.var_min <= grid_min + 1e-9 * grid_min.abs().max(1.0);
            }
        }
    }
    notes.push("xi2(0), minimum uncertainty, nu bound".to_string());

    // homomorphism in the symmetric subspace
    let basis = multipole_basis(J32);
    let fock = build_basis(4, J32).unwrap();
    let mut hom = 0.0f64;
    for a in 0..basis.len() {
        for b in (a + 1)..basis.len() {
            let (ga, gb) = (&basis.generators()[a], &basis.generators()[b]);
            let la = second_quantize(ga, &fock).unwrap().to_dense();
            let lb = second_quantize(gb, &fock).unwrap().to_dense();
            let lab = second_quantize(&commutator(ga, gb).unwrap(), &fock)
                .unwrap()
                .to_dense();
            let lhs = (&la * &lb - &lb * &la) * C64::new(0.0, -1.0);
            hom = hom.max(squeezing::operator::max_abs(&(lhs - lab)));
        }
    }
    ok &= hom < 1e-9;
    notes.push(format!("homomorphism {hom:.1e}"));

    report(11, "invariant suites", ok, notes.join(", "));
    assert!(ok);
}
