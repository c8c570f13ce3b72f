//! Pointwise BF to Einstein-Hilbert numerics. A field configuration is represented by its
//! first-order jet at one point of the surface, in coordinates `x^1, x^2`; the gauge group
//! acts on jets through `g(x) = exp(y_sigma x^sigma) g0`.

use super::so21::{bracket, inner, structure, wedge_component, Vec3};
use crate::check::Check;
use nalgebra::{Matrix2, Matrix3, Matrix6, Vector2, Vector6};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EhError {
    #[error("the 2x2 minor B_mu^i is singular")]
    SingularMinor,
    #[error("the torsion system for A is singular")]
    SingularTorsion,
    #[error("det g = {0:.3e} is not positive")]
    DegenerateMetric(f64),
    #[error("frame normalisation hits a degenerate stratum: {0}")]
    Stratum(&'static str),
    #[error("integration left the constraint surface (residual {0:.3e})")]
    OffSurface(f64),
}

fn add(x: &Vec3, y: &Vec3) -> Vec3 {
    [x[0] + y[0], x[1] + y[1], x[2] + y[2]]
}
fn sub(x: &Vec3, y: &Vec3) -> Vec3 {
    [x[0] - y[0], x[1] - y[1], x[2] - y[2]]
}
fn scale(x: &Vec3, c: f64) -> Vec3 {
    [c * x[0], c * x[1], c * x[2]]
}
fn norm(x: &Vec3) -> f64 {
    x.iter().map(|v| v.abs()).fold(0.0, f64::max)
}
fn apply(m: &Matrix3<f64>, x: &Vec3) -> Vec3 {
    let v = m * nalgebra::Vector3::from(*x);
    [v[0], v[1], v[2]]
}
fn unit(k: usize) -> Vec3 {
    let mut e = [0.0; 3];
    e[k] = 1.0;
    e
}

/// `eps_{ij}` on the spatial indices `1, 2`.
fn eps2(i: usize, j: usize) -> f64 {
    match (i, j) {
        (1, 2) => 1.0,
        (2, 1) => -1.0,
        _ => 0.0,
    }
}

/// Matrix of `ad e_k` on vectors.
pub fn ad_matrix(k: usize) -> Matrix3<f64> {
    Matrix3::from_fn(|i, j| structure(k, j, i) as f64)
}

/// First-order jet of `B, A` and the values of `tau` and `Bd = bd dx^1 dx^2` at a point.
/// Indices: `b[mu]` is `B_{mu+1}`, `db[sigma][mu]` is `d_{sigma+1} B_{mu+1}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FieldPoint {
    pub b: [Vec3; 2],
    pub db: [[Vec3; 2]; 2],
    pub a: [Vec3; 2],
    pub da: [[Vec3; 2]; 2],
    pub tau: Vec3,
    pub bd: Vec3,
}

/// Infinitesimal gauge parameter at a point: `r`, `d_sigma r`, `d_sigma d_nu r` (symmetric).
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct GaugeRate {
    pub r: Vec3,
    pub dr: [Vec3; 2],
    pub ddr: [[Vec3; 2]; 2],
}

pub const JET_DIM: usize = 42;

impl FieldPoint {
    pub fn zero() -> Self {
        FieldPoint { b: [[0.0; 3]; 2], db: [[[0.0; 3]; 2]; 2], a: [[0.0; 3]; 2], da: [[[0.0; 3]; 2]; 2], tau: [0.0; 3], bd: [0.0; 3] }
    }

    /// Identity diad `B_1 = e_1`, `B_2 = e_2` with every other entry zero.
    pub fn flat() -> Self {
        let mut p = FieldPoint::zero();
        p.b = [unit(1), unit(2)];
        p
    }

    /// `d_1 B_2 - d_2 B_1 + [A_1, B_2] - [A_2, B_1] + [tau, Bd]`.
    pub fn torsion(&self) -> Vec3 {
        let t = sub(&self.db[0][1], &self.db[1][0]);
        let t = add(&t, &sub(&bracket(&self.a[0], &self.b[1]), &bracket(&self.a[1], &self.b[0])));
        add(&t, &bracket(&self.tau, &self.bd))
    }

    /// `F_{12} = d_1 A_2 - d_2 A_1 + [A_1, A_2]`.
    pub fn curvature(&self) -> Vec3 {
        add(&sub(&self.da[0][1], &self.da[1][0]), &bracket(&self.a[0], &self.a[1]))
    }

    /// `K_{mu nu} = B_(mu^a A_nu)^{0b} eta_ab`, `a, b` spatial.
    pub fn k(&self) -> [[f64; 2]; 2] {
        let raw = |m: usize, n: usize| (1..3).map(|a| self.b[m][a] * wedge_component(&self.a[n], 0, a)).sum::<f64>();
        let mut k = [[0.0; 2]; 2];
        for m in 0..2 {
            for n in 0..2 {
                k[m][n] = 0.5 * (raw(m, n) + raw(n, m));
            }
        }
        k
    }

    /// `B_mu^i` with rows `mu` and columns `i = 1, 2`.
    pub fn minor(&self) -> Matrix2<f64> {
        Matrix2::new(self.b[0][1], self.b[0][2], self.b[1][1], self.b[1][2])
    }

    /// `<tau, F_12>`, the density of `int tau F_A`.
    pub fn residual_action(&self) -> f64 {
        inner(&self.tau, &self.curvature())
    }

    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(JET_DIM);
        let mut push = |x: &Vec3| v.extend_from_slice(x);
        self.b.iter().for_each(&mut push);
        self.db.iter().flatten().for_each(&mut push);
        self.a.iter().for_each(&mut push);
        self.da.iter().flatten().for_each(&mut push);
        push(&self.tau);
        push(&self.bd);
        v
    }

    pub fn from_vec(v: &[f64]) -> Self {
        let mut it = v.chunks(3).map(|c| [c[0], c[1], c[2]]);
        let mut next = || it.next().expect("jet vector of length 42");
        let b = [next(), next()];
        let db = [[next(), next()], [next(), next()]];
        let a = [next(), next()];
        let da = [[next(), next()], [next(), next()]];
        FieldPoint { b, db, a, da, tau: next(), bd: next() }
    }

    /// Image under `g(x) = exp(y_sigma x^sigma) g0` with `g0` acting by `lam`; the
    /// symmetric second-order part of `g` is taken to be zero.
    pub fn transform(&self, lam: &Matrix3<f64>, y: &[Vec3; 2]) -> FieldPoint {
        let mut out = *self;
        for m in 0..2 {
            out.b[m] = apply(lam, &self.b[m]);
            out.a[m] = sub(&apply(lam, &self.a[m]), &y[m]);
        }
        for s in 0..2 {
            for m in 0..2 {
                out.db[s][m] = add(&bracket(&y[s], &apply(lam, &self.b[m])), &apply(lam, &self.db[s][m]));
                let da = add(&bracket(&y[s], &apply(lam, &self.a[m])), &apply(lam, &self.da[s][m]));
                out.da[s][m] = sub(&da, &scale(&bracket(&y[s], &y[m]), 0.5));
            }
        }
        out.tau = apply(lam, &self.tau);
        out.bd = apply(lam, &self.bd);
        out
    }

    /// Velocity of the jet under the gauge flow `B -> [r, B]`, `A -> [r, A] - dr`.
    pub fn gauge_velocity(&self, g: &GaugeRate) -> FieldPoint {
        let mut v = FieldPoint::zero();
        for m in 0..2 {
            v.b[m] = bracket(&g.r, &self.b[m]);
            v.a[m] = sub(&bracket(&g.r, &self.a[m]), &g.dr[m]);
        }
        for s in 0..2 {
            for m in 0..2 {
                v.db[s][m] = add(&bracket(&g.dr[s], &self.b[m]), &bracket(&g.r, &self.db[s][m]));
                let da = add(&bracket(&g.dr[s], &self.a[m]), &bracket(&g.r, &self.da[s][m]));
                v.da[s][m] = sub(&da, &g.ddr[s][m]);
            }
        }
        v.tau = bracket(&g.r, &self.tau);
        v.bd = bracket(&g.r, &self.bd);
        v
    }

    pub fn dist(&self, o: &FieldPoint) -> f64 {
        self.to_vec().iter().zip(o.to_vec()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

/// Builds `x -> M x` for a linear map on `R^6` given as a closure.
fn matrix6(f: impl Fn(&Vector6<f64>) -> Vector6<f64>) -> Matrix6<f64> {
    let mut m = Matrix6::zeros();
    for j in 0..6 {
        let mut e = Vector6::zeros();
        e[j] = 1.0;
        m.set_column(j, &f(&e));
    }
    m
}

fn split6(x: &Vector6<f64>) -> [Vec3; 2] {
    [[x[0], x[1], x[2]], [x[3], x[4], x[5]]]
}

/// Torsion part and `K` part of `A -> (T_A, K_A)`, linear in `A` at fixed `B`.
fn torsion_k_map(p: &FieldPoint, x: &Vector6<f64>) -> Vector6<f64> {
    let mut q = *p;
    q.a = split6(x);
    q.db = [[[0.0; 3]; 2]; 2];
    q.tau = [0.0; 3];
    let t = q.torsion();
    let k = q.k();
    Vector6::new(t[0], t[1], t[2], k[0][0], k[1][1], k[0][1])
}

/// Solves the torsion constraint together with the symmetric data `K` for the connection
/// values `A_1, A_2` (six unknowns, six equations).
pub fn solve_torsion(p: &FieldPoint, k: [[f64; 2]; 2]) -> Result<[Vec3; 2], EhError> {
    if p.minor().determinant().abs() < 1e-12 {
        return Err(EhError::SingularMinor);
    }
    let m = matrix6(|x| torsion_k_map(p, x));
    let mut q = *p;
    q.a = [[0.0; 3]; 2];
    let t0 = q.torsion();
    let rhs = Vector6::new(-t0[0], -t0[1], -t0[2], k[0][0], k[1][1], k[0][1]);
    let x = m.lu().solve(&rhs).ok_or(EhError::SingularTorsion)?;
    Ok(split6(&x))
}

/// `p` with `A` replaced by the solution of the torsion constraint for the given `K`.
pub fn on_surface(p: &FieldPoint, k: [[f64; 2]; 2]) -> Result<FieldPoint, EhError> {
    let mut q = *p;
    q.a = solve_torsion(p, k)?;
    Ok(q)
}

/// Pointwise Einstein-Hilbert data.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EhPoint {
    pub g: [[f64; 2]; 2],
    pub pi: [[f64; 2]; 2],
    pub xi_n: f64,
    pub xi: [f64; 2],
    pub phi_n: f64,
    pub phi: [f64; 2],
}

impl EhPoint {
    pub fn to_vec(&self) -> Vec<f64> {
        let mut v = vec![self.g[0][0], self.g[0][1], self.g[1][0], self.g[1][1]];
        v.extend([self.pi[0][0], self.pi[0][1], self.pi[1][0], self.pi[1][1]]);
        v.extend([self.xi_n, self.xi[0], self.xi[1], self.phi_n, self.phi[0], self.phi[1]]);
        v
    }
    pub fn dist(&self, o: &EhPoint) -> f64 {
        self.to_vec().iter().zip(o.to_vec()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
    pub fn g_dist(&self, o: &EhPoint) -> f64 {
        self.to_vec()[..4].iter().zip(&o.to_vec()[..4]).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }
}

/// The BF to EH map evaluated on the jet, with `K` read off from `A`. The contraction
/// `Bd_{rho sigma} eps^{rho sigma}` equals `2 bd`.
pub fn bf_to_eh(p: &FieldPoint) -> Result<EhPoint, EhError> {
    let bm = |m: usize, i: usize| p.b[m][i];
    let mut g = [[0.0; 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            g[m][n] = (1..3).map(|i| bm(m, i) * bm(n, i)).sum();
        }
    }
    let gm = Matrix2::new(g[0][0], g[0][1], g[1][0], g[1][1]);
    let det = gm.determinant();
    if det <= 0.0 {
        return Err(EhError::DegenerateMetric(det));
    }
    let sqrt_g = det.sqrt();
    let gi = gm.try_inverse().ok_or(EhError::DegenerateMetric(det))?;
    let k = p.k();
    let tr_k: f64 = (0..2).flat_map(|r| (0..2).map(move |s| (r, s))).map(|(r, s)| gi[(r, s)] * k[r][s]).sum();
    let bd_eps = |i: usize, j: usize| 2.0 * wedge_component(&p.bd, i, j);
    let mut pi = [[0.0; 2]; 2];
    for m in 0..2 {
        for n in 0..2 {
            let mut corr = 0.0;
            for i in 1..3 {
                for j in 1..3 {
                    for kk in 1..3 {
                        for l in 1..3 {
                            let eta = |x: usize, y: usize| if x == y { 1.0 } else { 0.0 };
                            let c = eps2(i, kk) * eta(j, l) + eps2(j, kk) * eta(i, l);
                            corr += bm(m, i) * bm(n, j) * c * p.tau[l] * bd_eps(0, kk);
                        }
                    }
                }
            }
            pi[m][n] = 0.5 * sqrt_g * (k[m][n] - g[m][n] * tr_k) - 0.25 * corr;
        }
    }
    let bt = p.minor().transpose();
    let xi = bt.try_inverse().ok_or(EhError::SingularMinor)? * Vector2::new(p.tau[1], p.tau[2]);
    let phi_n: f64 = (1..3).flat_map(|i| (1..3).map(move |j| (i, j))).map(|(i, j)| bd_eps(i, j) * eps2(i, j)).sum();
    let mut phi = [0.0; 2];
    for (m, f) in phi.iter_mut().enumerate() {
        *f = (1..3).flat_map(|i| (1..3).map(move |j| (i, j))).map(|(i, j)| bd_eps(0, i) * bm(m, j) * eps2(i, j)).sum();
    }
    Ok(EhPoint { g, pi, xi_n: p.tau[0], xi: [xi[0], xi[1]], phi_n, phi })
}

/// One gauge step `g(x) = exp(phi(x) e_k)`: the parameter, its first derivatives, and
/// the positive normalised component.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FrameStep {
    pub generator: usize,
    pub param: f64,
    pub dparam: [f64; 2],
    pub alpha: f64,
}

fn frame_step(p: &FieldPoint, s: FrameStep) -> FieldPoint {
    let lam = (ad_matrix(s.generator) * s.param).exp();
    let e = unit(s.generator);
    p.transform(&lam, &[scale(&e, s.dparam[0]), scale(&e, s.dparam[1])])
}

/// Rotation in the (1,2)-plane zeroing `B_2^1` and making `B_2^2` positive.
pub fn rotation_12(p: &FieldPoint) -> Result<FrameStep, EhError> {
    let (v1, v2) = (p.b[1][1], p.b[1][2]);
    let a2 = v1 * v1 + v2 * v2;
    if a2 < 1e-24 {
        return Err(EhError::Stratum("B_2 has no spatial part"));
    }
    let d = |s: usize| (v2 * p.db[s][1][1] - v1 * p.db[s][1][2]) / a2;
    Ok(FrameStep { generator: 0, param: v1.atan2(v2), dparam: [d(0), d(1)], alpha: a2.sqrt() })
}

/// Boost in the (0,2)-plane zeroing `B_2^0`; needs `|B_2^0| < B_2^2`.
pub fn boost_02(p: &FieldPoint) -> Result<FrameStep, EhError> {
    let (v0, v2) = (p.b[1][0], p.b[1][2]);
    let a2 = v2 * v2 - v0 * v0;
    if a2 <= 1e-24 || v2 <= 0.0 {
        return Err(EhError::Stratum("B_2 is not spacelike"));
    }
    let d = |s: usize| (v2 * p.db[s][1][0] - v0 * p.db[s][1][2]) / a2;
    Ok(FrameStep { generator: 1, param: (v0 / v2).atanh(), dparam: [d(0), d(1)], alpha: a2.sqrt() })
}

/// Boost in the (0,1)-plane zeroing `B_1^0`; needs `|B_1^0| < |B_1^1|`.
pub fn boost_01(p: &FieldPoint) -> Result<FrameStep, EhError> {
    let (v0, v1) = (p.b[0][0], p.b[0][1]);
    let a2 = v1 * v1 - v0 * v0;
    if a2 <= 1e-24 {
        return Err(EhError::Stratum("B_1 is not spacelike modulo B_2"));
    }
    let d = |s: usize| -(v1 * p.db[s][0][0] - v0 * p.db[s][0][1]) / a2;
    Ok(FrameStep { generator: 2, param: -(v0 / v1).atanh(), dparam: [d(0), d(1)], alpha: a2.sqrt() })
}

/// The three steps and the intermediate jets `P', P'', P'''`.
#[derive(Clone, Debug, PartialEq)]
pub struct FrameLog {
    pub steps: [FrameStep; 3],
    pub points: [FieldPoint; 3],
}

/// Gauge-fixes `B_2^1 = B_2^0 = B_1^0 = 0` together with their first derivatives, by a
/// rotation and two boosts whose parameters depend on the point.
pub fn normalize_frame(p: &FieldPoint) -> Result<(FieldPoint, FrameLog), EhError> {
    let s1 = rotation_12(p)?;
    let p1 = frame_step(p, s1);
    let s2 = boost_02(&p1)?;
    let p2 = frame_step(&p1, s2);
    let s3 = boost_01(&p2)?;
    let p3 = frame_step(&p2, s3);
    Ok((p3, FrameLog { steps: [s1, s2, s3], points: [p1, p2, p3] }))
}

/// Largest of the six gauge-fixed quantities: the three components and their derivatives.
pub fn frame_residual(p: &FieldPoint) -> f64 {
    let mut r: f64 = p.b[1][1].abs().max(p.b[1][0].abs()).max(p.b[0][0].abs());
    for s in 0..2 {
        r = r.max(p.db[s][1][1].abs()).max(p.db[s][1][0].abs()).max(p.db[s][0][0].abs());
    }
    r
}

/// `bf_to_eh` on the gauge-fixed representative.
pub fn invariant_eh(p: &FieldPoint) -> Result<EhPoint, EhError> {
    bf_to_eh(&normalize_frame(p)?.0)
}

/// Outcome of integrating a gauge path.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowReport {
    pub steps: usize,
    /// Sup-norm drift of the EH data of the gauge-fixed representative.
    pub drift: f64,
    /// Sup-norm drift of `g` computed without gauge fixing.
    pub raw_g_drift: f64,
    /// Largest torsion residual before re-solving.
    pub max_residual: f64,
}

fn rk4(p: &FieldPoint, path: &dyn Fn(f64) -> GaugeRate, t: f64, h: f64) -> FieldPoint {
    let f = |q: &FieldPoint, t: f64| q.gauge_velocity(&path(t)).to_vec();
    let x = p.to_vec();
    let step = |k: &[f64], c: f64| FieldPoint::from_vec(&x.iter().zip(k).map(|(a, b)| a + c * b).collect::<Vec<_>>());
    let k1 = f(p, t);
    let k2 = f(&step(&k1, h / 2.0), t + h / 2.0);
    let k3 = f(&step(&k2, h / 2.0), t + h / 2.0);
    let k4 = f(&step(&k3, h), t + h);
    let y: Vec<f64> = (0..JET_DIM).map(|i| x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])).collect();
    FieldPoint::from_vec(&y)
}

/// Integrates the gauge flow along `path` with RK4, re-solving the dependent part of `A`
/// after every step, and measures the drift of the EH data.
pub fn constraint_flow_invariance(p0: &FieldPoint, path: &dyn Fn(f64) -> GaugeRate, t_end: f64, h: f64) -> Result<FlowReport, EhError> {
    let start = on_surface(p0, p0.k())?;
    let eh0 = invariant_eh(&start)?;
    let raw0 = bf_to_eh(&start)?;
    let n = (t_end / h).round() as usize;
    let mut p = start;
    let mut rep = FlowReport { steps: n, drift: 0.0, raw_g_drift: 0.0, max_residual: 0.0 };
    for k in 0..n {
        p = rk4(&p, path, k as f64 * h, h);
        let res = norm(&p.torsion());
        rep.max_residual = rep.max_residual.max(res);
        if res > 1e-6 {
            return Err(EhError::OffSurface(res));
        }
        p = on_surface(&p, p.k())?;
        rep.drift = rep.drift.max(invariant_eh(&p)?.dist(&eh0));
        rep.raw_g_drift = rep.raw_g_drift.max(bf_to_eh(&p)?.g_dist(&raw0));
    }
    Ok(rep)
}

/// Constant internal rotation in the (1,2)-plane.
pub fn rotation_path(omega: f64) -> impl Fn(f64) -> GaugeRate {
    move |_| GaugeRate { r: [omega, 0.0, 0.0], ..GaugeRate::default() }
}

/// Gauge path with every jet component affine in `t`, seeded.
pub fn random_path(seed: u64, size: f64) -> impl Fn(f64) -> GaugeRate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v = || -> Vec3 { [rng.gen_range(-size..size), rng.gen_range(-size..size), rng.gen_range(-size..size)] };
    let c0 = GaugeRate { r: v(), dr: [v(), v()], ddr: { let x = v(); let y = v(); let z = v(); [[x, y], [y, z]] } };
    let c1 = GaugeRate { r: v(), dr: [v(), v()], ddr: { let x = v(); let y = v(); let z = v(); [[x, y], [y, z]] } };
    move |t| {
        let lin = |a: &Vec3, b: &Vec3| add(a, &scale(b, t));
        GaugeRate {
            r: lin(&c0.r, &c1.r),
            dr: [lin(&c0.dr[0], &c1.dr[0]), lin(&c0.dr[1], &c1.dr[1])],
            ddr: [
                [lin(&c0.ddr[0][0], &c1.ddr[0][0]), lin(&c0.ddr[0][1], &c1.ddr[0][1])],
                [lin(&c0.ddr[1][0], &c1.ddr[1][0]), lin(&c0.ddr[1][1], &c1.ddr[1][1])],
            ],
        }
    }
}

/// Random configuration on the constraint surface: a spacelike diad moved by a random
/// Lorentz transformation, random derivatives, `tau`, `Bd` and `K`.
pub fn random_point(rng: &mut impl Rng) -> FieldPoint {
    let mut u = |s: f64| rng.gen_range(-s..s);
    let mut p = FieldPoint::zero();
    p.b[0] = [0.0, 1.0 + u(0.3), u(0.3)];
    p.b[1] = [0.0, u(0.3), 1.0 + u(0.3)];
    let lam = (ad_matrix(0) * u(3.0)).exp() * (ad_matrix(1) * u(0.6)).exp() * (ad_matrix(2) * u(0.6)).exp();
    for m in 0..2 {
        p.b[m] = apply(&lam, &p.b[m]);
    }
    for s in 0..2 {
        for m in 0..2 {
            p.db[s][m] = [u(0.5), u(0.5), u(0.5)];
            p.da[s][m] = [u(0.5), u(0.5), u(0.5)];
        }
    }
    p.tau = [u(1.0), u(1.0), u(1.0)];
    p.bd = [u(1.0), u(1.0), u(1.0)];
    let k = [[u(1.0), u(1.0)], [0.0, u(1.0)]];
    let k = [[k[0][0], k[0][1]], [k[0][1], k[1][1]]];
    on_surface(&p, k).expect("random diad is nondegenerate")
}

/// Pointwise density of the BF symplectic form on `(B, A)` and `(tau, Bd)`.
pub fn omega_bf(v: &FieldPoint, w: &FieldPoint) -> f64 {
    let ba = |x: &FieldPoint, y: &FieldPoint| inner(&x.b[0], &y.a[1]) - inner(&x.b[1], &y.a[0]);
    ba(v, w) - ba(w, v) + inner(&v.tau, &w.bd) - inner(&w.tau, &v.bd)
}

/// Reduced symplectic density on slice coordinates, in the `B, A` orientation of `omega_bf`.
/// The `A_2^{01} B_1^2` term carries the opposite sign to the other two `A B` terms.
pub fn omega_res(v: &FieldPoint, w: &FieldPoint) -> f64 {
    let a01 = |x: &FieldPoint, n: usize| wedge_component(&x.a[n], 0, 1);
    let a02 = |x: &FieldPoint, n: usize| wedge_component(&x.a[n], 0, 2);
    let pair = |xa: f64, xb: f64, ya: f64, yb: f64| xa * yb - ya * xb;
    pair(a01(v, 0), v.b[1][2], a01(w, 0), w.b[1][2]) - pair(a01(v, 1), v.b[0][2], a01(w, 1), w.b[0][2])
        + pair(a02(v, 1), v.b[0][1], a02(w, 1), w.b[0][1])
        + inner(&v.tau, &w.bd)
        - inner(&w.tau, &v.bd)
}

/// Tangent vector at `p` to the constraint surface with the given variations of `B`, `tau`,
/// `Bd` and of the three `A`-components `A_1^{01}, A_2^{01}, A_2^{02}`; the remaining `A`
/// components follow from the linearised torsion constraint.
pub fn constraint_tangent(p: &FieldPoint, db: [Vec3; 2], dtau: Vec3, dbd: Vec3, free_a: [f64; 3]) -> Result<FieldPoint, EhError> {
    let lin = |x: &Vector6<f64>| {
        let a = split6(x);
        let t = sub(&bracket(&a[0], &p.b[1]), &bracket(&a[1], &p.b[0]));
        Vector6::new(t[0], t[1], t[2], wedge_component(&a[0], 0, 1), wedge_component(&a[1], 0, 1), wedge_component(&a[1], 0, 2))
    };
    let m = matrix6(lin);
    let mut src = sub(&bracket(&p.a[0], &db[1]), &bracket(&p.a[1], &db[0]));
    src = add(&src, &add(&bracket(&dtau, &p.bd), &bracket(&p.tau, &dbd)));
    let rhs = Vector6::new(-src[0], -src[1], -src[2], free_a[0], free_a[1], free_a[2]);
    let x = m.lu().solve(&rhs).ok_or(EhError::SingularTorsion)?;
    let mut v = FieldPoint::zero();
    v.b = db;
    v.a = split6(&x);
    v.tau = dtau;
    v.bd = dbd;
    Ok(v)
}

/// Compares the BF symplectic density with the reduced one on tangent vectors, and the
/// action density `<tau, F>` before and after gauge fixing. With `gauge_fix` off, the
/// samples are used as they are and tangent vectors vary every component of `B`.
pub fn reduced_structure_check(samples: &[FieldPoint], gauge_fix: bool, seed: u64, tol: f64) -> Result<Vec<Check>, EhError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dev_form: f64 = 0.0;
    let mut dev_action: f64 = 0.0;
    for p in samples {
        let q = if gauge_fix { normalize_frame(p)?.0 } else { *p };
        let tangent = |rng: &mut ChaCha8Rng| {
            let mut u = || rng.gen_range(-1.0..1.0);
            let db = if gauge_fix { [[0.0, u(), u()], [0.0, 0.0, u()]] } else { [[u(), u(), u()], [u(), u(), u()]] };
            constraint_tangent(&q, db, [u(), u(), u()], [u(), u(), u()], [u(), u(), u()])
        };
        for _ in 0..4 {
            let v = tangent(&mut rng)?;
            let w = tangent(&mut rng)?;
            dev_form = dev_form.max((omega_bf(&v, &w) - omega_res(&v, &w)).abs());
        }
        dev_action = dev_action.max((q.residual_action() - p.residual_action()).abs());
    }
    let tag = if gauge_fix { "" } else { " (no gauge fixing)" };
    Ok(vec![
        Check::tol(format!("pullback of omega_BF = omega_res{}", tag), "eh:reduced-form", dev_form, tol),
        Check::tol(format!("<tau, F_A> invariant under gauge fixing{}", tag), "eh:reduced-action", dev_action, tol),
    ])
}

/// Sample sizes, integration parameters and tolerances for `numerics_checks`.
#[derive(Clone, Debug, PartialEq)]
pub struct EhConfig {
    pub frame_samples: usize,
    pub structure_samples: usize,
    pub horizon: f64,
    pub step: f64,
    pub frame_tol: f64,
    pub drift_tol: f64,
    pub structure_tol: f64,
}

impl Default for EhConfig {
    fn default() -> Self {
        EhConfig {
            frame_samples: 100,
            structure_samples: 20,
            horizon: 1.0,
            step: 1e-3,
            frame_tol: 1e-10,
            drift_tol: 1e-6,
            structure_tol: 1e-8,
        }
    }
}

/// Frame normalisation on random samples, gauge-flow invariance of the EH data along a
/// rotation and a seeded general path, and the reduced symplectic structure.
pub fn numerics_checks(cfg: &EhConfig, seed: u64) -> Result<Vec<Check>, EhError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..cfg.frame_samples {
        worst = worst.max(frame_residual(&normalize_frame(&random_point(&mut rng))?.0));
    }
    let mut out = vec![Check::tol(
        format!("gauge-fixed components vanish ({} samples)", cfg.frame_samples),
        "eh:frame-normalisation",
        worst,
        cfg.frame_tol,
    )];
    let p0 = random_point(&mut rng);
    let rot = constraint_flow_invariance(&p0, &rotation_path(0.8), cfg.horizon, cfg.step)?;
    out.push(Check::tol("rotation flow keeps g", "eh:flow-rotation", rot.raw_g_drift, cfg.drift_tol));
    let general = constraint_flow_invariance(&p0, &random_path(seed ^ 0x5eed, 0.5), cfg.horizon, cfg.step)?;
    out.push(Check::tol("general gauge flow keeps the EH data", "eh:flow-invariance", general.drift, cfg.drift_tol));
    out.push(Check::tol("torsion stays solved along the flow", "eh:flow-constraint", general.max_residual, cfg.drift_tol));
    let samples: Vec<FieldPoint> = (0..cfg.structure_samples).map(|_| random_point(&mut rng)).collect();
    out.extend(reduced_structure_check(&samples, true, seed, cfg.structure_tol)?);
    Ok(out)
}
