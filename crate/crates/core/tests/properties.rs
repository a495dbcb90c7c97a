use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use proptest::prelude::*;

use squeezing::classification::{
    build_su2_triple, decompose_subset, equivalence_check, Su2Triple, VertexSubset,
};
use squeezing::coherent_dynamics::{
    css_expectation_perp, linear_grid, min_fluctuation, oat_expectation_perp, oat_fluctuation,
    single_subspace_expectation, single_subspace_fluctuation, squeezing_parameter, CoherentSpec,
    EnsembleSpec,
};
use squeezing::exact_oracle::{build_basis, second_quantize};
use squeezing::lie_algebra::{
    commutator, expand_observable, expansion_coefficients, multipole_basis,
};
use squeezing::operator::max_abs;
use squeezing::scan_fit::{
    fit_power_law, zeta_scan, ClassRef, PowerLawModel, Remainder, ScanConfig,
};
use squeezing::SpinQuantum;

fn spin(max_twice: u32) -> impl Strategy<Value = SpinQuantum> {
    (1..=max_twice).prop_map(SpinQuantum::from_twice)
}

/// A nonempty vertex subset for some `J <= max_twice / 2`.
fn subset(max_twice: u32) -> impl Strategy<Value = VertexSubset> {
    spin(max_twice).prop_flat_map(|j| {
        let k = j.twice();
        (1u64..(1u64 << k)).prop_map(move |mask| VertexSubset::from_mask(j, mask).unwrap())
    })
}

/// Spec on the class of `subset` with random weights; the first weight is
/// kept away from zero so the largest subspin is populated.
fn ensemble(max_twice: u32) -> impl Strategy<Value = EnsembleSpec> {
    (subset(max_twice), 1u64..5000).prop_flat_map(|(s, n)| {
        let d = decompose_subset(&s);
        let r = d.r();
        (
            prop::collection::vec(0.0f64..1.0, r),
            prop::collection::vec(0.0..2.0 * PI, r),
        )
            .prop_map(move |(w, ph)| {
                let mut w = w;
                w[0] += 0.2;
                let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
                let zeta = w
                    .iter()
                    .zip(&ph)
                    .map(|(a, p)| C64::from_polar(a / norm, *p))
                    .collect();
                EnsembleSpec::new(n, d.clone(), CoherentSpec::equatorial(zeta).unwrap()).unwrap()
            })
    })
}

fn random_unitary(dim: usize, entries: &[f64]) -> DMatrix<C64> {
    let m = DMatrix::from_fn(dim, dim, |r, c| {
        C64::new(entries[2 * (r * dim + c)], entries[2 * (r * dim + c) + 1])
    });
    m.qr().q()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn generators_orthonormal_and_traceless(j in spin(8)) {
        let basis = multipole_basis(j);
        prop_assert_eq!(basis.len(), j.generator_count());
        let norm = j.norm_sq();
        for (a, row) in basis.gram().iter().enumerate() {
            for (b, v) in row.iter().enumerate() {
                let want = if a == b { norm } else { 0.0 };
                prop_assert!((v - want).abs() < 1e-9 * norm.max(1.0));
            }
        }
        for g in basis.generators() {
            prop_assert!(g.trace().abs() < 1e-10);
        }
    }

    #[test]
    fn basis_closes_under_commutators(j in spin(4), a in 0usize..24, b in 0usize..24) {
        let basis = multipole_basis(j);
        let (a, b) = (a % basis.len(), b % basis.len());
        let c = commutator(&basis.generators()[a], &basis.generators()[b]).unwrap();
        let coeffs = expansion_coefficients(&basis, &c).unwrap();
        let norm = j.norm_sq();
        let mut rebuilt = squeezing::HermitianOperator::zeros(j.dim());
        for (g, v) in basis.generators().iter().zip(&coeffs) {
            rebuilt = &rebuilt + &g.scale(*v);
        }
        prop_assert!(rebuilt.max_abs_diff(&c) < 1e-9 * norm.max(1.0));
    }

    #[test]
    fn expansion_round_trip(j in spin(6), raw in prop::collection::vec(-1.0f64..1.0, 48)) {
        let basis = multipole_basis(j);
        let v: Vec<f64> = raw.iter().cycle().take(basis.len()).copied().collect();
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let v: Vec<f64> = v.iter().map(|x| x / norm).collect();
        let op = expand_observable(&basis, &v).unwrap();
        let back = expansion_coefficients(&basis, &op).unwrap();
        for (x, y) in v.iter().zip(&back) {
            prop_assert!((x - y).abs() < 1e-10);
        }
    }

    #[test]
    fn reflected_subset_same_class(s in subset(12)) {
        prop_assert_eq!(decompose_subset(&s), decompose_subset(&s.reflected()));
    }

    #[test]
    fn triples_close_with_factor_f(s in subset(6)) {
        let t = build_su2_triple(&s);
        let f = t.f();
        let [o1, o2, o3] = t.operators();
        prop_assert!(commutator(o1, o2).unwrap().max_abs_diff(&o3.scale(f)) < 1e-9);
        prop_assert!(commutator(o2, o3).unwrap().max_abs_diff(&o1.scale(f)) < 1e-9);
        prop_assert!(commutator(o3, o1).unwrap().max_abs_diff(&o2.scale(f)) < 1e-9);
        for o in [o1, o2, o3] {
            prop_assert!((o.norm_sq() - s.j().norm_sq()).abs() < 1e-9);
        }
    }

    #[test]
    fn equivalence_is_an_equivalence(
        a in subset(5),
        mask in 1u64..32,
        entries in prop::collection::vec(-1.0f64..1.0, 72),
    ) {
        let j = a.j();
        let b = VertexSubset::from_mask(j, mask & ((1 << j.twice()) - 1)).unwrap_or_else(|_| a.clone());
        let (ta, tb) = (build_su2_triple(&a), build_su2_triple(&b));
        let u = random_unitary(j.dim(), &entries);
        let [o1, o2, o3] = ta.operators();
        let rotated = Su2Triple::from_operators(o1.conjugate_by(&u), o2.conjugate_by(&u), o3.conjugate_by(&u)).unwrap();
        prop_assert!(equivalence_check(&ta, &ta).unwrap());
        prop_assert!(equivalence_check(&ta, &rotated).unwrap());
        let ab = equivalence_check(&ta, &tb).unwrap();
        prop_assert_eq!(ab, equivalence_check(&tb, &ta).unwrap());
        prop_assert_eq!(ab, equivalence_check(&rotated, &tb).unwrap());
        prop_assert_eq!(ab, decompose_subset(&a) == decompose_subset(&b));
    }

    #[test]
    fn coherent_state_is_minimum_uncertainty(spec in ensemble(8)) {
        prop_assert!((squeezing_parameter(&spec, 0.0).unwrap() - 1.0).abs() < 1e-12);
        let fl = min_fluctuation(&spec, 0.0).unwrap();
        let bound = 0.5 * spec.f() * css_expectation_perp(&spec);
        prop_assert!(fl.isotropic);
        prop_assert!((fl.var_min * fl.var_max).sqrt() / bound - 1.0 < 1e-12);
        prop_assert!((oat_expectation_perp(&spec, 0.0).unwrap() / css_expectation_perp(&spec) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn variance_minimum_bounds_grid(spec in ensemble(6), mu in 1e-4f64..PI) {
        let fl = min_fluctuation(&spec, mu).unwrap();
        let grid_min = linear_grid(0.0, PI, 360)
            .into_iter()
            .map(|nu| oat_fluctuation(&spec, mu, nu).unwrap())
            .fold(f64::INFINITY, f64::min);
        prop_assert!(fl.var_min <= grid_min + 1e-10 * grid_min.abs().max(1.0));
        prop_assert!(fl.var_max >= fl.var_min);
        prop_assert!((oat_fluctuation(&spec, mu, fl.nu_min).unwrap() - fl.var_min).abs() < 1e-9 * fl.var_max.abs().max(1.0));
    }

    #[test]
    fn single_subspace_forms_agree(s in subset(6), n in 1u64..2000, mu in 0.0f64..PI, nu in 0.0f64..PI) {
        let d = decompose_subset(&s);
        let mut zeta = vec![C64::new(0.0, 0.0); d.r()];
        zeta[0] = C64::new(1.0, 0.0);
        let spec = EnsembleSpec::new(n, d.clone(), CoherentSpec::equatorial(zeta).unwrap()).unwrap();
        let j1 = d.subspins()[0];
        let scale = d.f() * d.f() * j1.value() * n as f64 * (1.0 + j1.value() * n as f64);
        let gen = oat_fluctuation(&spec, mu, nu).unwrap();
        let one = single_subspace_fluctuation(d.f(), j1, n, mu, nu);
        prop_assert!((gen - one).abs() <= 1e-10 * scale, "{gen} vs {one}");
        let e_gen = oat_expectation_perp(&spec, mu).unwrap();
        let e_one = single_subspace_expectation(d.f(), j1, n, mu);
        prop_assert!((e_gen - e_one).abs() <= 1e-10 * d.f() * j1.value() * n as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn second_quantization_is_a_homomorphism(twice in 1u32..=3, n in 1u32..=6, a in 0usize..15, b in 0usize..15) {
        let j = SpinQuantum::from_twice(twice);
        let basis = multipole_basis(j);
        let (a, b) = (a % basis.len(), b % basis.len());
        let fock = build_basis(n, j).unwrap();
        let (ga, gb) = (&basis.generators()[a], &basis.generators()[b]);
        let la = second_quantize(ga, &fock).unwrap().to_dense();
        let lb = second_quantize(gb, &fock).unwrap().to_dense();
        let lab = second_quantize(&commutator(ga, gb).unwrap(), &fock).unwrap().to_dense();
        let lhs = (&la * &lb - &lb * &la) * C64::new(0.0, -1.0);
        prop_assert!(max_abs(&(lhs - lab)) <= 1e-9);
    }

    #[test]
    fn exact_power_laws_recovered(a in 0.5f64..10.0, p in 0.3f64..0.8, c in 0.01f64..0.5, b in -2.0f64..2.0) {
        let ns: Vec<f64> = (0..12).map(|k| 10f64.powf(3.0 + 3.0 * k as f64 / 11.0)).collect();
        let pts: Vec<(f64, f64)> = ns.iter().map(|&n| (n, a * n.powf(-p))).collect();
        let fit = fit_power_law(&pts, PowerLawModel::Power).unwrap();
        prop_assert!((fit.value("a").unwrap() / a - 1.0).abs() < 1e-6);
        prop_assert!((fit.value("p").unwrap() / p - 1.0).abs() < 1e-6);
        prop_assert!(fit.params.iter().all(|q| q.std_err >= 0.0) && fit.residual_norm.is_finite());

        let truth = [c, a, p, b];
        let pts: Vec<(f64, f64)> =
            ns.iter().map(|&n| (n, PowerLawModel::OffsetPowerInverse.eval(&truth, n))).collect();
        let fit = fit_power_law(&pts, PowerLawModel::OffsetPowerInverse).unwrap();
        for (name, t) in ["c", "a", "p", "b"].iter().zip(truth) {
            let got = fit.value(name).unwrap();
            prop_assert!((got - t).abs() <= 1e-6 * t.abs().max(1e-3), "{name}: {got} vs {t}");
        }
    }

    #[test]
    fn two_equal_blocks_scan_symmetric(n in 10u64..100_000, w in prop::collection::vec(0.01f64..0.49, 1..4)) {
        let mut grid: Vec<f64> = w.iter().flat_map(|&x| [x, 1.0 - x]).collect();
        grid.sort_by(f64::total_cmp);
        grid.dedup();
        let cfg = ScanConfig {
            j: SpinQuantum::from_twice(3),
            class: ClassRef::Subset(vec![1, 3]),
            n: vec![n],
            zeta1_sq_grid: grid,
            remainder: Remainder::Second,
        };
        let rows = zeta_scan(&cfg).unwrap();
        for (lo, hi) in rows.iter().zip(rows.iter().rev()) {
            prop_assert_eq!(lo.status, hi.status);
            if let (Some(x), Some(y)) = (lo.xi2_min, hi.xi2_min) {
                prop_assert!((x / y - 1.0).abs() < 1e-9, "{} {}", x, y);
            }
        }
    }
}
