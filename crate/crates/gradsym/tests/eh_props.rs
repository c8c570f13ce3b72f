use gradsym::gravity::eh::{ad_matrix, frame_residual, invariant_eh, normalize_frame, random_point, FieldPoint};
use gradsym::gravity::so21::Vec3;
use nalgebra::Matrix3;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn point(seed: u64) -> FieldPoint {
    random_point(&mut ChaCha8Rng::seed_from_u64(seed))
}

fn lorentz(angle: f64, b1: f64, b2: f64) -> Matrix3<f64> {
    (ad_matrix(0) * angle).exp() * (ad_matrix(1) * b1).exp() * (ad_matrix(2) * b2).exp()
}

fn apply(m: &Matrix3<f64>, x: &Vec3) -> Vec3 {
    let v = m * nalgebra::Vector3::from(*x);
    [v[0], v[1], v[2]]
}

fn close(x: &Vec3, y: &Vec3, tol: f64) -> bool {
    (0..3).all(|i| (x[i] - y[i]).abs() < tol)
}

fn vec3() -> impl Strategy<Value = Vec3> {
    [-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn torsion_and_curvature_are_covariant(seed in any::<u64>(), a in -3.0..3.0f64, b1 in -0.8..0.8f64, b2 in -0.8..0.8f64, y1 in vec3(), y2 in vec3()) {
        let p = point(seed);
        let lam = lorentz(a, b1, b2);
        let q = p.transform(&lam, &[y1, y2]);
        prop_assert!(close(&q.torsion(), &apply(&lam, &p.torsion()), 1e-10));
        prop_assert!(close(&q.curvature(), &apply(&lam, &p.curvature()), 1e-10));
    }

    #[test]
    fn normalisation_hits_the_gauge_slice(seed in any::<u64>()) {
        let (q, _) = normalize_frame(&point(seed)).unwrap();
        prop_assert!(frame_residual(&q) < 1e-10);
        prop_assert!(q.b[1][2] > 0.0);
    }

    #[test]
    fn eh_data_is_gauge_invariant(seed in any::<u64>(), a in -3.0..3.0f64, b1 in -0.6..0.6f64, b2 in -0.6..0.6f64, y1 in vec3(), y2 in vec3()) {
        let p = point(seed);
        let q = p.transform(&lorentz(a, b1, b2), &[y1, y2]);
        let d = invariant_eh(&p).unwrap().dist(&invariant_eh(&q).unwrap());
        prop_assert!(d < 1e-9, "{}", d);
    }

    #[test]
    fn jet_vector_round_trips(seed in any::<u64>()) {
        let p = point(seed);
        prop_assert_eq!(FieldPoint::from_vec(&p.to_vec()), p);
    }
}
