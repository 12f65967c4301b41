use std::f64::consts::TAU;

use fractal_spectra::analysis::{gram_matrix_over, sigma_gamma};
use fractal_spectra::complement::{
    decompose, dual_spectra_sets, enumerate_complementing_pairs, is_complementing,
};
use fractal_spectra::cycles::extreme_cycles;
use fractal_spectra::hadamard::HadamardTriple;
use fractal_spectra::ifs::AffineIfs;
use fractal_spectra::kernel::{
    gamma_kernel_product, gamma_kernel_series, szego_classical, KernelQuery,
};
use fractal_spectra::spectrum::{direct_sum, SpectrumSpec};
use num_complex::Complex64;
use proptest::prelude::*;

fn digit_set(max_len: usize, span: i64) -> impl Strategy<Value = Vec<i64>> {
    proptest::collection::btree_set(-span..=span, 1..=max_len).prop_map(|s| s.into_iter().collect())
}

fn ifs_strategy() -> impl Strategy<Value = AffineIfs> {
    (2i64..=6, digit_set(4, 6)).prop_map(|(r, b)| AffineIfs::new(r, b).unwrap())
}

fn disk(radius: f64) -> impl Strategy<Value = Complex64> {
    (0.0..=1.0f64, 0.0..1.0f64)
        .prop_map(move |(u, a)| Complex64::from_polar(radius * u.sqrt(), TAU * a))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn transform_is_bounded_and_hermitian(ifs in ifs_strategy(), t in -200.0..200.0f64) {
        let a = ifs.mu_hat(t, 1e-11).unwrap();
        let b = ifs.mu_hat(-t, 1e-11).unwrap();
        prop_assert!(a.bound <= 1e-11);
        prop_assert!(a.value.norm() <= 1.0 + a.bound);
        prop_assert!((a.value - b.value.conj()).norm() <= a.bound + b.bound);
    }

    #[test]
    fn offset_matches_direct_evaluation(ifs in ifs_strategy(), t in -50.0..50.0f64, n in -40i64..40) {
        let a = ifs.mu_hat_offset(t, n, 1e-11).unwrap();
        let b = ifs.mu_hat(t - n as f64, 1e-11).unwrap();
        // t - n is rounded in the direct call; allow for its Lipschitz effect
        let lip = TAU * ifs.digits().iter().map(|d| d.abs()).max().unwrap() as f64;
        prop_assert!((a.value - b.value).norm() <= a.bound + b.bound + lip * 1e-13);
    }

    #[test]
    fn quadrature_refines_consistently(ifs in ifs_strategy(), m in 0u32..6, t in -5.0..5.0f64) {
        let f = |x: f64| Complex64::from_polar(1.0, TAU * t * x);
        let fine = ifs.quadrature(m + 1).unwrap().integrate(f);
        let coarse = ifs.quadrature(m).unwrap();
        let mut avg = Complex64::new(0.0, 0.0);
        for &b in ifs.digits() {
            avg += coarse.integrate(|x| f(ifs.contraction(b, x)));
        }
        avg /= ifs.len() as f64;
        prop_assert!((fine - avg).norm() <= 1e-13);
    }

    #[test]
    fn hadamard_is_symmetric_in_b_and_l(r in 2i64..=12, b in digit_set(4, 12), l in digit_set(4, 12)) {
        let t = HadamardTriple::new(r, b, l).unwrap();
        let v = t.is_hadamard(1e-9).unwrap();
        let w = t.transposed().is_hadamard(1e-9).unwrap();
        prop_assert_eq!(v.hadamard, w.hadamard);
    }

    #[test]
    fn dual_construction_certifies(r in 2i64..=24, pick in any::<prop::sample::Index>()) {
        let pairs: Vec<_> = enumerate_complementing_pairs(r)
            .into_iter()
            .filter(|(a, ap)| a != &[0] && ap != &[0])
            .collect();
        prop_assume!(!pairs.is_empty());
        let (a, ap) = pick.get(&pairs);
        prop_assert!(is_complementing(a, ap, r));
        prop_assert!(decompose(a, ap, r).unwrap().case_number() >= 2);
        let d = dual_spectra_sets(a, ap, r).unwrap();
        prop_assert!(d.certificate.all_passed(), "{:?}", d);
        let cycles = extreme_cycles(r, a, &d.l).unwrap();
        prop_assert!(cycles.iter().all(|c| c.trivial && c.verify(r, a)));
    }

    #[test]
    fn spectra_are_self_affine(r in 2i64..=6, extra in proptest::collection::btree_set(1i64..30, 0..3), n in 0u32..4) {
        let mut l = vec![0];
        let mut residues = vec![0];
        for x in extra {
            if !residues.contains(&(x % r)) {
                residues.push(x % r);
                l.push(x);
            }
        }
        let spec = SpectrumSpec::new(r, l, n).unwrap();
        prop_assert!(spec.check_self_affine().unwrap());
        let g = spec.gamma_set().unwrap();
        prop_assert_eq!(g.len() as u128, spec.cardinality());
        prop_assert_eq!(*g.last().unwrap(), spec.max_element());
    }

    #[test]
    fn direct_sum_is_symmetric(a in digit_set(5, 20), b in digit_set(5, 20)) {
        prop_assert_eq!(direct_sum(&a, &b), direct_sum(&b, &a));
    }

    #[test]
    fn series_and_product_agree(z in disk(0.9), x in -3.0..3.0f64, jp in any::<bool>()) {
        let l = if jp { vec![0, 1] } else { vec![0, 2] };
        let q = KernelQuery::new(z, x, 0.9).unwrap();
        let s = gamma_kernel_series(&SpectrumSpec::new(4, l.clone(), 4).unwrap(), &q).unwrap();
        let p = gamma_kernel_product(4, &l, &q, 5).unwrap();
        prop_assert!((s.value - p.value).norm() <= s.bound + p.bound);
        let rad = z.norm();
        prop_assert!((s.value - 1.0).norm() <= rad / (1.0 - rad) + s.bound);
    }

    #[test]
    fn full_digit_sets_give_the_classical_kernel(z in disk(0.8), x in 0.0..1.0f64, r in 2i64..=5) {
        let degree = (200f64.ln() / (r as f64).ln()).ceil() as u32;
        let spec = SpectrumSpec::new(r, (0..r).collect::<Vec<_>>(), degree).unwrap();
        let q = KernelQuery::new(z, x, 0.8).unwrap();
        let s = gamma_kernel_series(&spec, &q).unwrap();
        prop_assert!(s.contains(szego_classical(&q)));
    }

    #[test]
    fn sigma_respects_bessel_for_orthogonal_systems(t in -3.0..3.0f64, n in 0u32..6) {
        let ifs = AffineIfs::new(4, vec![0, 2]).unwrap();
        let spec = SpectrumSpec::new(4, vec![0, 1], n).unwrap();
        let s = sigma_gamma(&ifs, &spec, t, 1e-12).unwrap();
        prop_assert!(s.sigma_lower >= 0.0 && s.sigma_lower <= 1.0 + s.err);
        let next = sigma_gamma(&ifs, &spec.with_degree(n + 1).unwrap(), t, 1e-12).unwrap();
        prop_assert!(next.sigma_lower >= s.sigma_lower);
    }

    #[test]
    fn gram_eigenvalues_straddle_one(ifs in ifs_strategy(), gamma in proptest::collection::btree_set(-15i64..15, 1..8)) {
        let gamma: Vec<i64> = gamma.into_iter().collect();
        let g = gram_matrix_over(&ifs, &gamma, 1e-11).unwrap();
        prop_assert!(g.lambda_min <= 1.0 + 1e-10 && g.lambda_max >= 1.0 - 1e-10);
        for (i, row) in g.matrix.iter().enumerate() {
            prop_assert_eq!(row[i], Complex64::new(1.0, 0.0));
            for (j, m) in row.iter().enumerate() {
                prop_assert_eq!(*m, g.matrix[j][i].conj());
            }
        }
    }
}
