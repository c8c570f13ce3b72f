//! so(2,1) on R^3 with `eta = diag(-1, 1, 1)`; the bracket is the eta-cross product
//! `[x, y]^k = eta^{kk} eps_{ijk} x^i y^j`, so that `<[x, y], z> = eps(x, y, z)`.
//! Two-form valued quantities `X^{IJ}` are stored as vectors through
//! `X^{IJ} = (ad X)^{IJ}`, i.e. `X^{12} = -X^0`, `X^{01} = X^2`, `X^{02} = -X^1`.

use crate::check::Check;

pub const ETA: [i64; 3] = [-1, 1, 1];

pub fn eps(i: usize, j: usize, k: usize) -> i64 {
    if i == j || j == k || i == k {
        0
    } else if (i, j, k) == (0, 1, 2) || (i, j, k) == (1, 2, 0) || (i, j, k) == (2, 0, 1) {
        1
    } else {
        -1
    }
}

/// Structure constant `c_{ij}^k`.
pub fn structure(i: usize, j: usize, k: usize) -> i64 {
    ETA[k] * eps(i, j, k)
}

pub type Vec3 = [f64; 3];

pub fn bracket(x: &Vec3, y: &Vec3) -> Vec3 {
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                let c = structure(i, j, k);
                if c != 0 {
                    *o += c as f64 * x[i] * y[j];
                }
            }
        }
    }
    out
}

pub fn inner(x: &Vec3, y: &Vec3) -> f64 {
    (0..3).map(|i| ETA[i] as f64 * x[i] * y[i]).sum()
}

/// Antisymmetric two-index components `X^{IJ}` of a vector-stored two-form value.
pub fn wedge_component(x: &Vec3, i: usize, j: usize) -> f64 {
    match (i, j) {
        (1, 2) => -x[0],
        (2, 1) => x[0],
        (0, 1) => x[2],
        (1, 0) => -x[2],
        (0, 2) => -x[1],
        (2, 0) => x[1],
        _ => 0.0,
    }
}

/// Jacobi identity, ad-invariance of the pairing, and orthogonality of the bracket to
/// its arguments, on the basis.
pub fn so21_checks() -> Vec<Check> {
    let mut jac = 0i64;
    let mut inv = 0i64;
    let mut orth = 0i64;
    let br = |x: [i64; 3], y: [i64; 3]| -> [i64; 3] {
        let mut out = [0; 3];
        for (k, o) in out.iter_mut().enumerate() {
            for i in 0..3 {
                for j in 0..3 {
                    *o += structure(i, j, k) * x[i] * y[j];
                }
            }
        }
        out
    };
    let ip = |x: [i64; 3], y: [i64; 3]| (0..3).map(|i| ETA[i] * x[i] * y[i]).sum::<i64>();
    let e = |i: usize| {
        let mut v = [0; 3];
        v[i] = 1;
        v
    };
    for i in 0..3 {
        for j in 0..3 {
            orth += ip(br(e(i), e(j)), e(i)).abs() + ip(br(e(i), e(j)), e(j)).abs();
            for k in 0..3 {
                let (a, b, c) = (e(i), e(j), e(k));
                let s: Vec<i64> = (0..3)
                    .map(|m| br(a, br(b, c))[m] + br(b, br(c, a))[m] + br(c, br(a, b))[m])
                    .collect();
                jac += s.iter().map(|x| x.abs()).sum::<i64>();
                inv += (ip(br(a, b), c) - ip(a, br(b, c))).abs();
            }
        }
    }
    vec![
        Check::new("so(2,1) Jacobi", "so21:jacobi", jac == 0, if jac == 0 { String::new() } else { jac.to_string() }),
        Check::new("<[x,y],z> = <x,[y,z]>", "so21:ad-invariance", inv == 0, if inv == 0 { String::new() } else { inv.to_string() }),
        Check::new("<[x,y],x> = 0", "so21:eta-compatibility", orth == 0, if orth == 0 { String::new() } else { orth.to_string() }),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::check::all_pass;

    #[test]
    fn algebra_checks_pass() {
        assert!(all_pass(&so21_checks()));
    }

    #[test]
    fn rotation_and_boost_generators() {
        // x^0 generates rotations of the (1,2)-plane, x^2 boosts in the (0,1)-plane
        let r = bracket(&[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]);
        assert_eq!(r, [0.0, 0.0, 1.0]);
        let b = bracket(&[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]);
        assert_eq!(b, [0.0, 1.0, 0.0]);
        let b = bracket(&[0.0, 0.0, 1.0], &[0.0, 1.0, 0.0]);
        assert_eq!(b, [1.0, 0.0, 0.0]);
    }

    #[test]
    fn wedge_matches_adjoint() {
        let x = [0.3, -1.2, 2.0];
        let y = [1.5, 0.25, -0.75];
        let ad = bracket(&x, &y);
        for i in 0..3 {
            let s: f64 = (0..3).map(|j| wedge_component(&x, i, j) * ETA[j] as f64 * y[j]).sum();
            assert!((s - ad[i]).abs() < 1e-14);
        }
    }
}
