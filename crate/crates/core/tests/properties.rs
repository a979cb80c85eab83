//! Algebraic and frame-theoretic invariants over random inputs.

mod common;

use common::*;
use cstar_frames::classify;
use cstar_frames::{AlgebraElement, Complex64, ModuleMap, ModuleVector, Tolerance};
use proptest::prelude::*;

fn tol() -> Tolerance {
    Tolerance::default()
}

/// Largest singular value of `M` by power iteration on `M*M`, using only
/// `apply` and `adjoint`.
fn power_norm(m: &ModuleMap, seed: &ModuleVector) -> f64 {
    let adj = m.adjoint();
    let mut v = seed.clone();
    let mut est = 0.0;
    for _ in 0..2000 {
        let w = adj.apply(&m.apply(&v).unwrap()).unwrap();
        let n = w.norm();
        if n == 0.0 {
            return 0.0;
        }
        v = w.scale(Complex64::new(1.0 / n, 0.0));
        est = n.sqrt();
    }
    est
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn c_star_identity(a in element()) {
        let n = a.norm();
        let lhs = a.adjoint().multiply(&a).unwrap().norm();
        prop_assert!((lhs - n * n).abs() <= 1e-9 * (n * n).max(1e-12));
    }

    #[test]
    fn submultiplicative((a, b) in element_pair()) {
        prop_assert!(a.multiply(&b).unwrap().norm() <= (1.0 + 1e-9) * a.norm() * b.norm() + 1e-15);
    }

    #[test]
    fn norm_matches_independent_singular_values(a in element()) {
        let oracle = a.blocks().iter().map(|b| max_singular_value(&dense(b))).fold(0.0, f64::max);
        prop_assert!((a.norm() - oracle).abs() <= 1e-9 * oracle.max(1.0));
    }

    #[test]
    fn squares_are_positive(b in element()) {
        let p = b.adjoint().multiply(&b).unwrap();
        prop_assert!(p.is_positive(tol()));
        let (lo, _) = p.spectrum_bounds(tol()).unwrap();
        prop_assert!(lo >= -tol().threshold(p.norm()));
    }

    #[test]
    fn positive_and_negative_means_small(b in element()) {
        let p = b.adjoint().multiply(&b).unwrap();
        if p.is_positive(tol()) && p.neg().is_positive(tol()) {
            prop_assert!(p.norm() <= tol().threshold(p.norm()));
        }
    }

    #[test]
    fn inverse_is_two_sided(a in element()) {
        if a.is_invertible(tol()) {
            let inv = a.inverse(tol()).unwrap();
            let one = AlgebraElement::identity(a.signature());
            let scale = a.norm() * inv.norm();
            prop_assert!(a.multiply(&inv).unwrap().distance(&one) <= 1e-9 * scale);
            prop_assert!(inv.multiply(&a).unwrap().distance(&one) <= 1e-9 * scale);
        }
    }

    #[test]
    fn inner_product_axioms(
        (x, y, z, a) in (signature(), 1usize..=3).prop_flat_map(|(s, d)| (
            vector_of(s.clone(), d), vector_of(s.clone(), d), vector_of(s.clone(), d), element_of(s),
        ))
    ) {
        let t = 1e-9 * (1.0 + x.norm() + y.norm() + z.norm()).powi(2) * (1.0 + a.norm());
        let xx = x.inner_product(&x).unwrap();
        prop_assert!(xx.is_positive(tol()));
        // <ax + y, z> = a<x,z> + <y,z>
        let lhs = x.left_mul(&a).unwrap().try_add(&y).unwrap().inner_product(&z).unwrap();
        let rhs = a.multiply(&x.inner_product(&z).unwrap()).unwrap().try_add(&y.inner_product(&z).unwrap()).unwrap();
        prop_assert!(lhs.distance(&rhs) <= t);
        // <x,y>* = <y,x>
        prop_assert!(x.inner_product(&y).unwrap().adjoint().distance(&y.inner_product(&x).unwrap()) <= t);
        // Cauchy–Schwarz in norm form
        prop_assert!(x.inner_product(&y).unwrap().norm() <= (1.0 + 1e-9) * x.norm() * y.norm() + 1e-15);
        // ‖x‖ = 0 iff every entry vanishes
        let zero = ModuleVector::zero(x.signature(), x.rank()).unwrap();
        prop_assert_eq!(zero.norm(), 0.0);
        prop_assert_eq!(x.norm() == 0.0, x.entries().iter().all(|e| e.norm() == 0.0));
    }

    #[test]
    fn maps_are_a_linear_and_adjoint(
        (m, x, y, z, a) in (signature(), 1usize..=3, 1usize..=3).prop_flat_map(|(s, p, q)| (
            system_of(s.clone(), q, p).prop_map(|f| f.synthesis_matrix()),
            vector_of(s.clone(), p), vector_of(s.clone(), p), vector_of(s.clone(), q), element_of(s),
        ))
    ) {
        let scale = (1.0 + m.operator_norm()) * (1.0 + x.norm() + y.norm() + z.norm()).powi(2) * (1.0 + a.norm());
        let lhs = m.apply(&x.left_mul(&a).unwrap().try_add(&y).unwrap()).unwrap();
        let rhs = m.apply(&x).unwrap().left_mul(&a).unwrap().try_add(&m.apply(&y).unwrap()).unwrap();
        prop_assert!(lhs.try_sub(&rhs).unwrap().norm() <= 1e-9 * scale);
        // <xM, z> = <x, zM*>
        let l = m.apply(&x).unwrap().inner_product(&z).unwrap();
        let r = x.inner_product(&m.adjoint().apply(&z).unwrap()).unwrap();
        prop_assert!(l.distance(&r) <= 1e-9 * scale);
    }

    #[test]
    fn flatten_round_trips_and_is_isometric(
        (f, seed) in (signature(), 1usize..=3, 1usize..=3).prop_flat_map(|(s, p, q)| (
            system_of(s.clone(), q, p), vector_of(s, p),
        ))
    ) {
        let m = f.synthesis_matrix();
        let back = ModuleMap::from_flat(m.signature(), m.domain_rank(), m.codomain_rank(), &m.flatten()).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assume!(seed.norm() > 1e-6);
        let est = power_norm(&m, &seed);
        let exact = m.operator_norm();
        prop_assert!((est - exact).abs() <= 1e-6 * exact, "power iteration {est} vs flattened {exact}");
    }

    #[test]
    fn invertible_maps_have_two_sided_inverses(f in (signature(), 1usize..=3).prop_flat_map(|(s, d)| system_of(s, d, d))) {
        let m = f.synthesis_matrix();
        if m.is_invertible(tol()) {
            let n = m.inverse(tol()).unwrap();
            let id = ModuleMap::identity(m.signature(), m.domain_rank()).unwrap();
            let scale = m.operator_norm() * n.operator_norm();
            prop_assert!(m.compose(&n).unwrap().try_sub(&id).unwrap().max_entry_norm() <= 1e-9 * scale);
            prop_assert!(n.compose(&m).unwrap().try_sub(&id).unwrap().max_entry_norm() <= 1e-9 * scale);
        }
    }

    #[test]
    fn gram_consistency(
        (f, x) in system().prop_flat_map(|f| { let (s, d) = (f.signature().clone(), f.rank()); (Just(f), vector_of(s, d)) })
    ) {
        let sum = f.frame_sum(&x).unwrap();
        let g = f.gram_operator();
        let xg = g.apply(&x).unwrap();
        let matrix_form = xg.inner_product(&x).unwrap();
        let scale = 1.0 + g.operator_norm() * x.norm().powi(2);
        prop_assert!(sum.distance(&matrix_form) <= 1e-9 * scale);
        let direct = frame_sum_direct(&f, &x);
        for (k, d) in direct.iter().enumerate() {
            for (i, row) in d.iter().enumerate() {
                for (j, z) in row.iter().enumerate() {
                    prop_assert!((sum.block(k)[(i, j)] - z).norm() <= 1e-9 * scale);
                }
            }
        }
    }

    #[test]
    fn bounds_are_ordered_and_frame_iff_positive(f in system()) {
        let b = f.frame_bounds();
        prop_assert!(0.0 <= b.lower && b.lower <= b.upper);
        let verdict = classify::is_frame(&f, tol());
        prop_assert_eq!(verdict.is_frame, b.lower > tol().threshold(b.upper) && b.upper > tol().abs_tol);
        prop_assert!(!verdict.is_parseval || verdict.is_tight);
        prop_assert!(!verdict.is_tight || verdict.is_frame);
        prop_assert!(!verdict.is_frame || verdict.is_bessel);
    }

    #[test]
    fn frame_inequality_in_element_and_norm_form(
        (f, x) in system().prop_flat_map(|f| { let (s, d) = (f.signature().clone(), f.rank()); (Just(f), vector_of(s, d)) })
    ) {
        let b = f.frame_bounds();
        let ip = x.inner_product(&x).unwrap();
        let sum = f.frame_sum(&x).unwrap();
        let t = Tolerance::new(1e-9, 1e-12).unwrap();
        let upper = ip.scale(Complex64::new(b.upper, 0.0)).try_sub(&sum).unwrap();
        let lower = sum.try_sub(&ip.scale(Complex64::new(b.lower, 0.0))).unwrap();
        let slack = t.threshold(b.upper * ip.norm());
        for e in [&upper, &lower] {
            let h = e.try_add(&e.adjoint()).unwrap().scale(Complex64::new(0.5, 0.0));
            let evs = h.blocks().iter().flat_map(|bl| hermitian_eigenvalues(&dense(bl))).fold(f64::INFINITY, f64::min);
            prop_assert!(evs >= -slack, "min eigenvalue {evs:e}, slack {slack:e}");
        }
        let (n2, ns) = (ip.norm(), sum.norm());
        prop_assert!(b.lower * n2 - slack <= ns && ns <= b.upper * n2 + slack);
    }

    #[test]
    fn bounds_are_attained(f in system()) {
        let b = f.frame_bounds();
        let (xc, xd) = f.extremal_vectors();
        for (v, bound) in [(xc, b.lower), (xd, b.upper)] {
            prop_assert!((v.norm() - 1.0).abs() < 1e-9);
            let ip = v.inner_product(&v).unwrap();
            let gap = f.frame_sum(&v).unwrap().try_sub(&ip.scale(Complex64::new(bound, 0.0))).unwrap();
            prop_assert!(gap.norm() <= 1e-9 * b.upper.max(1.0), "gap {:e}", gap.norm());
        }
    }

    #[test]
    fn dual_of_dual_is_the_frame(f in system()) {
        if classify::is_frame(&f, tol()).is_frame {
            let b = f.frame_bounds();
            let dd = f.canonical_dual(tol()).unwrap().canonical_dual(tol()).unwrap();
            let scale = f.synthesis_matrix().max_entry_norm().max(1.0);
            for (x, y) in f.vectors().iter().zip(dd.vectors()) {
                prop_assert!(x.try_sub(y).unwrap().norm() <= 1e-9 * b.condition() * scale);
            }
        }
    }

    #[test]
    fn scalar_bounds_match_classical_frame_operator(
        f in (1usize..=4, 0usize..=3).prop_flat_map(|(d, extra)| system_of(sig(&[1]), d, d + extra))
    ) {
        let d = f.rank();
        // classical S = Σ x_j x_j* on ℂ^d (column convention)
        let mut s = vec![vec![c(0.0, 0.0); d]; d];
        for v in f.vectors() {
            let col: Vec<Complex64> = (0..d).map(|i| v.entry(i).block(0)[(0, 0)]).collect();
            for i in 0..d {
                for j in 0..d {
                    s[i][j] += col[i] * col[j].conj();
                }
            }
        }
        let ev = hermitian_eigenvalues(&s);
        let b = f.frame_bounds();
        let hi = ev[d - 1];
        prop_assert!((b.upper - hi).abs() <= 1e-9 * hi.max(1.0));
        prop_assert!((b.lower - ev[0].max(0.0)).abs() <= 1e-9 * hi.max(1.0));
    }

    #[test]
    fn report_hierarchy_and_equivalences(f in system()) {
        let r = classify::classify_unchecked(&f, tol());
        prop_assert!(r.check_consistency().is_ok(), "{:?}", r.check_consistency());
        if r.is_modular_riesz {
            prop_assert_eq!(f.len(), f.rank());
        }
        if r.is_frame && r.is_omega_independent {
            prop_assert!(f.len() <= f.rank());
        }
    }
}
