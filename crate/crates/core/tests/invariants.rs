use gpisgrasp_core::gp::{GpModel, KernelSpec};
use gpisgrasp_core::gpis::{hausdorff, MassEstimate};
use gpisgrasp_core::grasp::{contact_quality, pfc, Contact, UncertaintyModel};
use gpisgrasp_core::Vec3;
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

fn unit() -> impl Strategy<Value = Vec3> {
    vec3(1.0).prop_filter("non-degenerate", |v| v.norm() > 0.1).prop_map(Vec3::normalize)
}

/// Inputs on a jittered grid so no two are closer than 0.1.
fn spread_inputs(n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec((0.0..0.05f64, 0.0..0.05f64), n).prop_map(|jit| {
        jit.iter()
            .enumerate()
            .map(|(i, (a, b))| vec![(i % 4) as f64 * 0.15 + a, (i / 4) as f64 * 0.15 + b])
            .collect()
    })
}

fn dense_posterior(k: &KernelSpec, xs: &[Vec<f64>], ys: &[f64], noise: f64, q: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let gram = DMatrix::from_fn(n, n, |i, j| k.eval(&xs[i], &xs[j]).unwrap() + if i == j { noise } else { 0.0 });
    let kq = DVector::from_fn(n, |i, _| k.eval(&xs[i], q).unwrap());
    let lu = gram.lu();
    let w = lu.solve(&DVector::from_column_slice(ys)).unwrap();
    let v = lu.solve(&kq).unwrap();
    (kq.dot(&w), k.eval(q, q).unwrap() - kq.dot(&v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gp_posterior_matches_dense_solve(
        xs in spread_inputs(10),
        ys in proptest::collection::vec(-1.0..1.0f64, 10),
        q in proptest::collection::vec(0.0..0.6f64, 2),
    ) {
        let k = KernelSpec::squared_exponential(1.0, 0.3).unwrap();
        let gp = GpModel::fit(&xs, &ys, &[1e-4; 10], k).unwrap();
        let p = gp.predict(&q).unwrap();
        let (mean, var) = dense_posterior(&k, &xs, &ys, 1e-4, &q);
        prop_assert!((p.mean - mean).abs() < 1e-8, "{} vs {}", p.mean, mean);
        prop_assert!((p.variance - var).abs() < 1e-8, "{} vs {}", p.variance, var);
    }

    #[test]
    fn gp_is_independent_of_observation_order(
        xs in spread_inputs(8),
        ys in proptest::collection::vec(-1.0..1.0f64, 8),
        q in proptest::collection::vec(0.0..0.6f64, 2),
        split in 1usize..8,
    ) {
        let k = KernelSpec::squared_exponential(1.0, 0.3).unwrap();
        let forward = GpModel::fit(&xs, &ys, &[1e-3; 8], k).unwrap();
        let mut rev_x = xs.clone();
        let mut rev_y = ys.clone();
        rev_x.reverse();
        rev_y.reverse();
        let mut staged = GpModel::fit(&rev_x[..split], &rev_y[..split], &vec![1e-3; split], k).unwrap();
        for (x, &y) in rev_x[split..].iter().zip(&rev_y[split..]) {
            staged = staged.append(x, y, 1e-3).unwrap();
        }
        let a = forward.predict(&q).unwrap();
        let b = staged.predict(&q).unwrap();
        prop_assert!((a.mean - b.mean).abs() < 1e-9);
        prop_assert!((a.variance - b.variance).abs() < 1e-9);
    }

    #[test]
    fn gp_variance_stays_within_prior(
        xs in spread_inputs(12),
        ys in proptest::collection::vec(-1.0..1.0f64, 12),
        q in proptest::collection::vec(-0.5..1.0f64, 2),
    ) {
        let k = KernelSpec::squared_exponential(0.7, 0.25).unwrap();
        let gp = GpModel::fit(&xs, &ys, &[1e-3; 12], k).unwrap();
        let v = gp.predict(&q).unwrap().variance;
        prop_assert!(v >= -1e-12 && v <= k.diagonal() + 1e-12, "variance {}", v);
    }

    #[test]
    fn quality_ignores_translation_and_scale(
        pos in proptest::collection::vec(vec3(1.0), 3),
        nrm in proptest::collection::vec(unit(), 3),
        com in vec3(0.3),
        shift in vec3(5.0),
        scale in 0.1..10.0f64,
    ) {
        let contacts: Vec<Contact> = pos.iter().zip(&nrm).map(|(&p, &n)| Contact::new(p, n, 0.8).unwrap()).collect();
        let moved: Vec<Contact> = contacts
            .iter()
            .map(|c| Contact::new(c.position * scale + shift, c.normal, c.mu).unwrap())
            .collect();
        let q0 = contact_quality(&contacts, com, 8).unwrap();
        let q1 = contact_quality(&moved, com * scale + shift, 8).unwrap();
        prop_assert!(q0 >= 0.0);
        prop_assert!((q0 - q1).abs() < 1e-7, "{} vs {}", q0, q1);
    }

    #[test]
    fn pfc_is_a_seeded_probability(
        pos in proptest::collection::vec(vec3(1.0), 3),
        nrm in proptest::collection::vec(unit(), 3),
        seed in any::<u64>(),
    ) {
        let contacts: Vec<Contact> = pos.iter().zip(&nrm).map(|(&p, &n)| Contact::new(p, n, 1.0).unwrap()).collect();
        let com = MassEstimate { p_com: Vec3::ZERO, sigma_com: 0.05 };
        let unc = UncertaintyModel::default();
        let a = pfc(&contacts, &unc, &com, seed).unwrap();
        prop_assert!((0.0..=1.0).contains(&a));
        prop_assert_eq!(a * unc.samples as f64, (a * unc.samples as f64).round());
        prop_assert_eq!(a, pfc(&contacts, &unc, &com, seed).unwrap());
    }

    #[test]
    fn hausdorff_is_a_symmetric_distance(
        a in proptest::collection::vec(vec3(2.0), 1..30),
        b in proptest::collection::vec(vec3(2.0), 1..30),
    ) {
        let ab = hausdorff(&a, &b).unwrap();
        prop_assert!(ab >= 0.0);
        prop_assert_eq!(ab, hausdorff(&b, &a).unwrap());
        prop_assert_eq!(hausdorff(&a, &a).unwrap(), 0.0);
        let direct = a
            .iter()
            .map(|p| b.iter().map(|q| p.distance(*q)).fold(f64::INFINITY, f64::min))
            .chain(b.iter().map(|q| a.iter().map(|p| p.distance(*q)).fold(f64::INFINITY, f64::min)))
            .fold(0.0f64, f64::max);
        prop_assert!((ab - direct).abs() < 1e-12);
    }
}
