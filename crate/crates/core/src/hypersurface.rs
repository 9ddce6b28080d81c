//! Oriented hypersurfaces M⁶ ⊂ S⁷ given by charts.
//!
//! Tangent vectors of M are carried as ambient vectors in ℝ⁸. The shape
//! operator follows `∇̄_X Y = ∇_X Y + g(AX, Y) N`, so `∇̄_X N = −AX`, and the
//! induced almost complex structure is `ξ(X) = B(N, X)`.

use std::fmt;
use std::ops::{Add, Mul};
use std::str::FromStr;

use nalgebra::{SMatrix, SVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{GeomError, Result};
use crate::fd::{self, Stencil};
use crate::octonion::{cross3, Vec8};
use crate::sphere::{cross_at, phi_ambient, sphere_nabla, tangent_project, SpherePoint, TangentVector, TAU0};

pub type Vec6 = SVector<f64, 6>;
pub type Matrix6 = SMatrix<f64, 6, 6>;
/// Columns are the coordinate vectors `∂_a x`.
pub type Jacobian = SMatrix<f64, 8, 6>;
/// `hessian[a]` has columns `∂_a ∂_b x`.
pub type Hessian = [Jacobian; 6];
/// Christoffel symbols `Γ^l_ij` stored at `(l, 6i + j)`.
pub type Christoffel = SMatrix<f64, 6, 36>;

/// Default distance kept from coordinate singularities.
pub const DEFAULT_MARGIN: f64 = 0.1;

const TANGENT_TOL: f64 = 1e-8;
const MINIMAL_TOL: f64 = 1e-8;
const RANK_TOL: f64 = 1e-10;

/// A smooth immersion of an open box of ℝ⁶ into S⁷.
pub trait HypersurfaceChart {
    /// Open box on which the chart is regular.
    fn domain(&self) -> [(f64, f64); 6];
    fn immerse(&self, u: &Vec6) -> Vec8;
    fn jacobian(&self, u: &Vec6) -> Jacobian;
    fn hessian(&self, u: &Vec6) -> Hessian;

    /// `+1` keeps the normal with `det[p, ∂₁x, …, ∂₆x, N] > 0`, `−1` flips it.
    fn normal_sign(&self) -> f64 {
        1.0
    }
}

impl<C: HypersurfaceChart + ?Sized> HypersurfaceChart for &C {
    fn domain(&self) -> [(f64, f64); 6] {
        (**self).domain()
    }
    fn immerse(&self, u: &Vec6) -> Vec8 {
        (**self).immerse(u)
    }
    fn jacobian(&self, u: &Vec6) -> Jacobian {
        (**self).jacobian(u)
    }
    fn hessian(&self, u: &Vec6) -> Hessian {
        (**self).hessian(u)
    }
    fn normal_sign(&self) -> f64 {
        (**self).normal_sign()
    }
}

/// The same chart with the opposite unit normal.
#[derive(Clone, Debug, PartialEq)]
pub struct Flipped<C>(pub C);

impl<C: HypersurfaceChart> HypersurfaceChart for Flipped<C> {
    fn domain(&self) -> [(f64, f64); 6] {
        self.0.domain()
    }
    fn immerse(&self, u: &Vec6) -> Vec8 {
        self.0.immerse(u)
    }
    fn jacobian(&self, u: &Vec6) -> Jacobian {
        self.0.jacobian(u)
    }
    fn hessian(&self, u: &Vec6) -> Hessian {
        self.0.hessian(u)
    }
    fn normal_sign(&self) -> f64 {
        -self.0.normal_sign()
    }
}

/// Box shrunk by `margin` on every side.
pub fn inner_box<C: HypersurfaceChart + ?Sized>(chart: &C, margin: f64) -> Result<[(f64, f64); 6]> {
    let mut out = chart.domain();
    for (lo, hi) in out.iter_mut() {
        *lo += margin;
        *hi -= margin;
        if !(*lo < *hi) {
            return Err(GeomError::GridOutsideRegion(format!(
                "margin {margin} leaves an empty box"
            )));
        }
    }
    Ok(out)
}

/// Uniform random point of the box shrunk by `margin`.
pub fn random_point<C, R>(chart: &C, rng: &mut R, margin: f64) -> Result<Vec6>
where
    C: HypersurfaceChart + ?Sized,
    R: Rng + ?Sized,
{
    let b = inner_box(chart, margin)?;
    Ok(Vec6::from_fn(|i, _| rng.random_range(b[i].0..b[i].1)))
}

fn in_domain<C: HypersurfaceChart + ?Sized>(chart: &C, u: &Vec6) -> bool {
    chart
        .domain()
        .iter()
        .zip(u.iter())
        .all(|((lo, hi), x)| lo < x && x < hi)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Trig {
    Sin,
    Cos,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Factor {
    angle: usize,
    kind: Trig,
}

impl Factor {
    /// Value and first two derivatives in its angle.
    fn eval(&self, u: &Vec6) -> [f64; 3] {
        let (s, c) = u[self.angle].sin_cos();
        match self.kind {
            Trig::Sin => [s, c, -s],
            Trig::Cos => [c, -s, -c],
        }
    }
}

/// Chart whose components are constants times products of sines and
/// cosines of single angles, with closed-form derivatives.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigChart {
    coeff: [f64; 8],
    factors: [Vec<Factor>; 8],
    domain: [(f64, f64); 6],
}

impl TrigChart {
    fn empty() -> Self {
        Self {
            coeff: [0.0; 8],
            factors: Default::default(),
            domain: [(0.0, 0.0); 6],
        }
    }

    /// Hyperspherical coordinates of the sphere of radius `r` in the
    /// components `comps` (m + 1 of them) using angles `first..first + m`:
    /// `y_i = r (Π_{j<i} sin t_j) cos t_i`, `y_m = r Π sin t_j`.
    fn add_sphere(&mut self, r: f64, comps: &[usize], first: usize) {
        let m = comps.len() - 1;
        for (i, &c) in comps.iter().enumerate() {
            self.coeff[c] = r;
            let mut f: Vec<Factor> = (0..i.min(m))
                .map(|j| Factor {
                    angle: first + j,
                    kind: Trig::Sin,
                })
                .collect();
            if i < m {
                f.push(Factor {
                    angle: first + i,
                    kind: Trig::Cos,
                });
            }
            self.factors[c] = f;
        }
        for j in 0..m {
            self.domain[first + j] = if j + 1 < m {
                (0.0, std::f64::consts::PI)
            } else {
                (-std::f64::consts::PI, std::f64::consts::PI)
            };
        }
    }

    /// Totally geodesic S⁶ = {x₈ = 0}.
    pub fn geodesic_s6() -> Self {
        let mut ch = Self::empty();
        ch.add_sphere(1.0, &[0, 1, 2, 3, 4, 5, 6], 0);
        ch
    }

    /// S^k(a) × S^{6−k}(b) with a² = k/6, b² = (6−k)/6. The S^k factor
    /// lives in components 0, 2, 4, … of the interleaved order
    /// (0, 2, 4, 6, 1, 3, 5, 7), the other factor in the rest.
    pub fn clifford(k: usize) -> Result<Self> {
        if !(1..=5).contains(&k) {
            return Err(GeomError::KOutOfRange(k as i64));
        }
        const INTER: [usize; 8] = [0, 2, 4, 6, 1, 3, 5, 7];
        let a = (k as f64 / 6.0).sqrt();
        let b = ((6 - k) as f64 / 6.0).sqrt();
        let mut ch = Self::empty();
        ch.add_sphere(a, &INTER[..=k], 0);
        ch.add_sphere(b, &INTER[k + 1..], k);
        Ok(ch)
    }

    /// Latitude sphere {x₈ = c} of radius √(1 − c²); totally umbilic and,
    /// for c ≠ 0, not minimal.
    pub fn small_sphere(c: f64) -> Result<Self> {
        if !(c.abs() < 1.0) {
            return Err(GeomError::InvalidArgument(format!("latitude {c} outside (−1, 1)")));
        }
        let mut ch = Self::empty();
        ch.add_sphere((1.0 - c * c).sqrt(), &[0, 1, 2, 3, 4, 5, 6], 0);
        ch.coeff[7] = c;
        Ok(ch)
    }

    fn component(&self, c: usize, u: &Vec6, da: Option<usize>, db: Option<usize>) -> f64 {
        let fs = &self.factors[c];
        let vals: Vec<[f64; 3]> = fs.iter().map(|f| f.eval(u)).collect();
        let product_except = |skip: &[usize]| -> f64 {
            vals.iter()
                .enumerate()
                .filter(|(i, _)| !skip.contains(i))
                .map(|(_, v)| v[0])
                .product()
        };
        let total = match (da, db) {
            (None, _) => product_except(&[]),
            (Some(a), None) => fs
                .iter()
                .enumerate()
                .filter(|(_, f)| f.angle == a)
                .map(|(i, _)| vals[i][1] * product_except(&[i]))
                .sum(),
            (Some(a), Some(b)) => {
                let mut s = 0.0;
                let on = |angle: usize| fs.iter().enumerate().filter(move |(_, f)| f.angle == angle).map(|(i, _)| i);
                for i in on(a) {
                    for j in on(b) {
                        if i == j {
                            s += vals[i][2] * product_except(&[i]);
                        } else {
                            s += vals[i][1] * vals[j][1] * product_except(&[i, j]);
                        }
                    }
                }
                s
            }
        };
        self.coeff[c] * total
    }
}

impl HypersurfaceChart for TrigChart {
    fn domain(&self) -> [(f64, f64); 6] {
        self.domain
    }

    fn immerse(&self, u: &Vec6) -> Vec8 {
        Vec8::from_fn(|c, _| self.component(c, u, None, None))
    }

    fn jacobian(&self, u: &Vec6) -> Jacobian {
        Jacobian::from_fn(|c, a| self.component(c, u, Some(a), None))
    }

    fn hessian(&self, u: &Vec6) -> Hessian {
        std::array::from_fn(|a| Jacobian::from_fn(|c, b| self.component(c, u, Some(a), Some(b))))
    }
}

/// Built-in minimal hypersurfaces.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExampleSurface {
    GeodesicS6,
    Clifford(usize),
}

impl ExampleSurface {
    pub fn chart(&self) -> Result<TrigChart> {
        match *self {
            ExampleSurface::GeodesicS6 => Ok(TrigChart::geodesic_s6()),
            ExampleSurface::Clifford(k) => TrigChart::clifford(k),
        }
    }

    /// `k` for Clifford surfaces.
    pub fn k(&self) -> Option<usize> {
        match *self {
            ExampleSurface::GeodesicS6 => None,
            ExampleSurface::Clifford(k) => Some(k),
        }
    }

    /// Radii (a, b) of the two sphere factors.
    pub fn radii(&self) -> Option<(f64, f64)> {
        self.k()
            .map(|k| ((k as f64 / 6.0).sqrt(), ((6 - k) as f64 / 6.0).sqrt()))
    }

    /// Closed-form |A|².
    pub fn norm_a_squared(&self) -> f64 {
        match self {
            ExampleSurface::GeodesicS6 => 0.0,
            ExampleSurface::Clifford(_) => 6.0,
        }
    }

    pub fn all() -> Vec<ExampleSurface> {
        std::iter::once(ExampleSurface::GeodesicS6)
            .chain((1..=5).map(ExampleSurface::Clifford))
            .collect()
    }
}

impl FromStr for ExampleSurface {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "s6" {
            return Ok(ExampleSurface::GeodesicS6);
        }
        if let Some(rest) = s.strip_prefix("clifford:") {
            let k: i64 = rest.trim().parse().map_err(|_| GeomError::UnknownExample(s.to_string()))?;
            if !(1..=5).contains(&k) {
                return Err(GeomError::KOutOfRange(k));
            }
            return Ok(ExampleSurface::Clifford(k as usize));
        }
        Err(GeomError::UnknownExample(s.to_string()))
    }
}

impl fmt::Display for ExampleSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExampleSurface::GeodesicS6 => write!(f, "s6"),
            ExampleSurface::Clifford(k) => write!(f, "clifford:{k}"),
        }
    }
}

/// First- and second-order data of the hypersurface at a chart point.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeData {
    pub u: Vec6,
    pub p: SpherePoint,
    pub jacobian: Jacobian,
    /// Induced metric `g_ab = ⟨∂_a x, ∂_b x⟩`.
    pub metric: Matrix6,
    /// Second fundamental form `II_ab = ⟨∂_a∂_b x, N⟩ = g(A∂_a, ∂_b)`.
    pub second: Matrix6,
    /// Gram–Schmidt factor: `∂_a x = Σ_i frame_i R_ia`.
    pub r: Matrix6,
    pub frame: [Vec8; 6],
    pub normal: Vec8,
    /// Shape operator in the orthonormal frame.
    pub a: Matrix6,
    /// Mean curvature `tr A`.
    pub mean: f64,
    /// `|A|²`.
    pub a2: f64,
}

fn det8(cols: &[Vec8; 8]) -> f64 {
    SMatrix::<f64, 8, 8>::from_fn(|i, j| cols[j][i]).determinant()
}

pub fn shape_at<C: HypersurfaceChart + ?Sized>(chart: &C, u: &Vec6) -> Result<ShapeData> {
    if !in_domain(chart, u) {
        return Err(GeomError::GridOutsideRegion(format!(
            "point {:?} outside the chart domain",
            u.as_slice()
        )));
    }
    let p = SpherePoint::normalize(chart.immerse(u))?;
    let jac = chart.jacobian(u);
    let cols: [Vec8; 6] = std::array::from_fn(|a| jac.column(a).into_owned());

    let mut cof = Vec8::zeros();
    for i in 0..8 {
        let mut m = [Vec8::zeros(); 8];
        m[0] = *p.vec();
        m[1..7].copy_from_slice(&cols);
        m[7][i] = 1.0;
        cof[i] = det8(&m);
    }
    let scale: f64 = cols.iter().map(|c| c.norm()).product();
    if !(cof.norm() > RANK_TOL * scale) {
        return Err(GeomError::DegenerateImmersion);
    }
    let normal = cof / cof.norm() * chart.normal_sign();

    let mut frame = [Vec8::zeros(); 6];
    let mut r = Matrix6::zeros();
    for a in 0..6 {
        let mut v = cols[a];
        for i in 0..a {
            let c = frame[i].dot(&v);
            r[(i, a)] = c;
            v -= frame[i] * c;
        }
        let n = v.norm();
        if !(n > RANK_TOL * cols[a].norm()) {
            return Err(GeomError::DegenerateImmersion);
        }
        r[(a, a)] = n;
        frame[a] = v / n;
    }

    let hess = chart.hessian(u);
    let second = Matrix6::from_fn(|a, b| hess[a].column(b).dot(&normal));
    let second = (second + second.transpose()) * 0.5;
    let metric = jac.transpose() * jac;
    let r_inv = r.try_inverse().ok_or(GeomError::DegenerateImmersion)?;
    let a_mat = r_inv.transpose() * second * r_inv;
    let a_mat = (a_mat + a_mat.transpose()) * 0.5;
    Ok(ShapeData {
        u: *u,
        p,
        jacobian: jac,
        metric,
        second,
        r,
        frame,
        normal,
        mean: a_mat.trace(),
        a2: a_mat.norm_squared(),
        a: a_mat,
    })
}

impl ShapeData {
    /// Ambient vector with frame components `c`.
    pub fn tangent(&self, c: &Vec6) -> Vec8 {
        self.frame.iter().zip(c.iter()).map(|(e, x)| e * *x).sum()
    }

    /// Frame components of an ambient vector.
    pub fn components(&self, v: &Vec8) -> Vec6 {
        Vec6::from_fn(|i, _| self.frame[i].dot(v))
    }

    /// Orthogonal projection of an ambient vector onto `T_pM`.
    pub fn project(&self, v: &Vec8) -> Vec8 {
        self.tangent(&self.components(v))
    }

    /// Chart-coordinate coefficients `c` with `Σ c_a ∂_a x = v` for tangent `v`.
    pub fn coordinates(&self, v: &Vec8) -> Vec6 {
        let c = self.components(v);
        self.r.solve_upper_triangular(&c).unwrap_or_else(Vec6::zeros)
    }

    pub fn check_tangent(&self, v: &Vec8) -> Result<()> {
        let scale = v.norm().max(1.0);
        let off = v.dot(&self.normal).abs().max(v.dot(self.p.vec()).abs());
        if off > TANGENT_TOL * scale {
            return Err(GeomError::NotTangent(off));
        }
        Ok(())
    }

    /// `AX` for tangent `X`.
    pub fn shape_apply(&self, x: &Vec8) -> Vec8 {
        self.tangent(&(self.a * self.components(x)))
    }

    /// `ξ(X) = B(N, X)` without the tangency check.
    pub fn xi(&self, x: &Vec8) -> Vec8 {
        cross_at(self.p.vec(), &self.normal, x)
    }

    pub fn cross(&self, x: &Vec8, y: &Vec8) -> Vec8 {
        cross_at(self.p.vec(), x, y)
    }

    /// Unit tangent vector with Gaussian frame components.
    pub fn random_unit<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec8 {
        loop {
            let c = Vec6::from_fn(|_, _| rng.sample(StandardNormal));
            if c.norm() > 1e-6 {
                return self.tangent(&(c / c.norm()));
            }
        }
    }

    /// `A∂_b x = Σ_c (g⁻¹ II)_cb ∂_c x` as an ambient vector, for constant
    /// chart coefficients `d`.
    pub fn shape_on_coordinates(&self, d: &Vec6) -> Vec8 {
        let s = self
            .metric
            .cholesky()
            .map(|c| c.solve(&(self.second * d)))
            .unwrap_or_else(Vec6::zeros);
        self.jacobian * s
    }
}

/// `ξ(X) = B(N, X)`; errors if `X` is not tangent to M.
pub fn xi_at(shape: &ShapeData, x: &Vec8) -> Result<Vec8> {
    shape.check_tangent(x)?;
    Ok(shape.xi(x))
}

/// `G(X, Y, Z) = (τ₀/4)(−Π_p cross3(X, Y, Z))` for ambient tangent vectors.
pub fn g_ambient(p: &Vec8, x: &Vec8, y: &Vec8, z: &Vec8) -> Vec8 {
    let c = cross3(x, y, z);
    (c - p * c.dot(p)) * (-TAU0 / 4.0)
}

/// The tensor G with `ḡ(G(X, Y, Z), W) = (τ₀/4) ψ(X, Y, Z, W)`.
pub fn g_at(
    p: &SpherePoint,
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
) -> Result<TangentVector> {
    if x.base() != p || y.base() != p || z.base() != p {
        return Err(GeomError::BaseMismatch);
    }
    TangentVector::new(*p, g_ambient(p.vec(), x.vec(), y.vec(), z.vec()))
}

/// `(∇̄_X B)(Y, Z)` by finite differences, extending `Y` and `Z` by
/// projected-constant fields.
pub fn g_fd(
    x: &TangentVector,
    y: &TangentVector,
    z: &TangentVector,
    step: f64,
    stencil: Stencil,
) -> Result<TangentVector> {
    let p = *x.base();
    if y.base() != &p || z.base() != &p {
        return Err(GeomError::BaseMismatch);
    }
    let ext = |v: &Vec8, q: &SpherePoint| *tangent_project(q, v).vec();
    let whole = sphere_nabla(
        |q| cross_at(q.vec(), &ext(y.vec(), q), &ext(z.vec(), q)),
        x,
        step,
        stencil,
    )?;
    let dy = sphere_nabla(|q| ext(y.vec(), q), x, step, stencil)?;
    let dz = sphere_nabla(|q| ext(z.vec(), q), x, step, stencil)?;
    let v = whole.vec() - cross_at(p.vec(), dy.vec(), z.vec()) - cross_at(p.vec(), y.vec(), dz.vec());
    TangentVector::new(p, v)
}

/// Closed form of `(∇_X ξ)(Y) = G(X, N, Y) − φ(N, Y, AX) N − B(AX, Y)`.
pub fn nabla_xi(shape: &ShapeData, x: &Vec8, y: &Vec8) -> Result<Vec8> {
    shape.check_tangent(x)?;
    shape.check_tangent(y)?;
    let p = shape.p.vec();
    let n = &shape.normal;
    let ax = shape.shape_apply(x);
    Ok(g_ambient(p, x, n, y) - n * phi_ambient(p, n, y, &ax) - cross_at(p, &ax, y))
}

/// Derivative along the chart line `t ↦ u + t·dir` of a quantity built from
/// the shape data at each node. `step` is measured along `dir / |dir|`.
pub fn chart_derivative<C, T, F>(
    chart: &C,
    u: &Vec6,
    dir: &Vec6,
    step: f64,
    stencil: Stencil,
    f: F,
) -> Result<T>
where
    C: HypersurfaceChart + ?Sized,
    T: Copy + Add<Output = T> + Mul<f64, Output = T>,
    F: Fn(&ShapeData) -> T,
{
    fd::check_step(step)?;
    let len = dir.norm();
    if len == 0.0 {
        return Ok(f(&shape_at(chart, u)?) * 0.0);
    }
    let unit = dir / len;
    let w = stencil.half_width() as i64;
    let (d1, _) = fd::weights(stencil);
    let mut acc: Option<T> = None;
    for (o, c) in (-w..=w).zip(d1) {
        if *c == 0.0 {
            continue;
        }
        let s = shape_at(chart, &(u + unit * (o as f64 * step)))?;
        let term = f(&s) * (*c * len / step);
        acc = Some(acc.map_or(term, |a| a + term));
    }
    Ok(acc.expect("stencils have nonzero weights"))
}

/// `(∇_X ξ)(Y)` by finite differences along the chart, extending `Y` by
/// tangential projection onto the moving tangent spaces.
pub fn nabla_xi_fd<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    shape: &ShapeData,
    x: &Vec8,
    y: &Vec8,
    step: f64,
    stencil: Stencil,
) -> Result<Vec8> {
    shape.check_tangent(x)?;
    shape.check_tangent(y)?;
    let dir = shape.coordinates(x);
    let d_xi_y = chart_derivative(chart, &shape.u, &dir, step, stencil, |s| s.xi(&s.project(y)))?;
    let d_y = chart_derivative(chart, &shape.u, &dir, step, stencil, |s| s.project(y))?;
    Ok(shape.project(&d_xi_y) - shape.xi(&shape.project(&d_y)))
}

fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `max |(∇_X ξ)(X)|` over `samples` seeded random unit tangent vectors.
pub fn nk_defect(shape: &ShapeData, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(GeomError::InvalidArgument("samples must be ≥ 1".into()));
    }
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = shape.random_unit(&mut rng);
        worst = worst.max(nabla_xi(shape, &x, &x)?.norm());
    }
    Ok(worst)
}

/// `‖A − (tr A / 6) I‖` (Frobenius).
pub fn umbilic_defect(shape: &ShapeData) -> f64 {
    (shape.a - Matrix6::identity() * (shape.mean / 6.0)).norm()
}

/// `|B(AX, X)^T|`.
pub fn cross_defect(shape: &ShapeData, x: &Vec8) -> Result<f64> {
    shape.check_tangent(x)?;
    let b = shape.cross(&shape.shape_apply(x), x);
    Ok(shape.project(&b).norm())
}

/// `max |B(AX, X)^T|` over seeded random unit tangent vectors.
pub fn sup_cross_defect(shape: &ShapeData, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(GeomError::InvalidArgument("samples must be ≥ 1".into()));
    }
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let x = shape.random_unit(&mut rng);
        worst = worst.max(cross_defect(shape, &x)?);
    }
    Ok(worst)
}

/// `(Div ξ)(v) = Σ_i g((∇_{e_i} ξ)(v), e_i)` from the closed form.
pub fn div_xi_along(shape: &ShapeData, v: &Vec8) -> Result<f64> {
    let mut s = 0.0;
    for e in &shape.frame {
        s += nabla_xi(shape, e, v)?.dot(e);
    }
    Ok(s)
}

/// Same trace with `∇ξ` taken by finite differences along the chart.
pub fn div_xi_fd<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    shape: &ShapeData,
    v: &Vec8,
    step: f64,
    stencil: Stencil,
) -> Result<f64> {
    let mut s = 0.0;
    for e in &shape.frame {
        s += nabla_xi_fd(chart, shape, e, v, step, stencil)?.dot(e);
    }
    Ok(s)
}

/// `max_v |(Div ξ)(v)|` over seeded random unit tangent `v`.
pub fn div_xi(shape: &ShapeData, samples: usize, seed: u64) -> Result<f64> {
    if samples == 0 {
        return Err(GeomError::InvalidArgument("samples must be ≥ 1".into()));
    }
    let mut rng = seeded(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let v = shape.random_unit(&mut rng);
        worst = worst.max(div_xi_along(shape, &v)?.abs());
    }
    Ok(worst)
}

/// Ricci tensor (in the frame) and scalar curvature of a minimal
/// hypersurface: `Ric = 5g − g(A·, A·)`, `S = 30 − |A|²`.
pub fn hyper_curvature(shape: &ShapeData) -> Result<(Matrix6, f64)> {
    if shape.mean.abs() > MINIMAL_TOL {
        return Err(GeomError::NotMinimal(shape.mean));
    }
    Ok((Matrix6::identity() * 5.0 - shape.a * shape.a, 30.0 - shape.a2))
}

/// `|∇_X(AY) − ∇_Y(AX)|` for the constant-coefficient coordinate fields
/// `X = Σ x_a ∂_a`, `Y = Σ y_a ∂_a` (so `[X, Y] = 0`), by finite differences.
pub fn codazzi_residual<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    u: &Vec6,
    x: &Vec6,
    y: &Vec6,
    step: f64,
    stencil: Stencil,
) -> Result<f64> {
    let shape = shape_at(chart, u)?;
    let d_ay = chart_derivative(chart, u, x, step, stencil, |s| s.shape_on_coordinates(y))?;
    let d_ax = chart_derivative(chart, u, y, step, stencil, |s| s.shape_on_coordinates(x))?;
    Ok(shape.project(&(d_ay - d_ax)).norm())
}

fn induced_metric<C: HypersurfaceChart + ?Sized>(chart: &C, u: &Vec6) -> Matrix6 {
    let j = chart.jacobian(u);
    j.transpose() * j
}

fn unit6(i: usize) -> Vec6 {
    Vec6::from_fn(|k, _| if k == i { 1.0 } else { 0.0 })
}

/// Christoffel symbols of the induced metric, with metric derivatives by
/// finite differences.
pub fn christoffel_fd<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    u: &Vec6,
    step: f64,
    stencil: Stencil,
) -> Result<Christoffel> {
    fd::check_step(step)?;
    let dg: [Matrix6; 6] = std::array::from_fn(|k| {
        fd::first(|t| induced_metric(chart, &(u + unit6(k) * t)), step, stencil)
    });
    let g_inv = induced_metric(chart, u)
        .try_inverse()
        .ok_or(GeomError::DegenerateImmersion)?;
    let mut gamma = Christoffel::zeros();
    for i in 0..6 {
        for j in 0..6 {
            let first_kind =
                Vec6::from_fn(|m, _| 0.5 * (dg[i][(m, j)] + dg[j][(m, i)] - dg[m][(i, j)]));
            let raised = g_inv * first_kind;
            for l in 0..6 {
                gamma[(l, 6 * i + j)] = raised[l];
            }
        }
    }
    Ok(gamma)
}

/// Coordinate components of `Rm(X, Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_{[X,Y]}Z`
/// of the induced metric, by nested finite differences of the metric alone.
pub fn intrinsic_curvature_fd<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    u: &Vec6,
    x: &Vec6,
    y: &Vec6,
    z: &Vec6,
    step: f64,
    stencil: Stencil,
) -> Result<Vec6> {
    let gamma = christoffel_fd(chart, u, step, stencil)?;
    let mut dgamma = [Christoffel::zeros(); 6];
    for (k, d) in dgamma.iter_mut().enumerate() {
        let w = stencil.half_width() as i64;
        let (d1, _) = fd::weights(stencil);
        for (o, c) in (-w..=w).zip(d1) {
            if *c != 0.0 {
                *d += christoffel_fd(chart, &(u + unit6(k) * (o as f64 * step)), step, stencil)? * (*c / step);
            }
        }
    }
    let gm = |l: usize, i: usize, j: usize| gamma[(l, 6 * i + j)];
    let mut out = Vec6::zeros();
    for l in 0..6 {
        let mut s = 0.0;
        for i in 0..6 {
            for j in 0..6 {
                for k in 0..6 {
                    let coef = x[i] * y[j] * z[k];
                    if coef == 0.0 {
                        continue;
                    }
                    let mut r = dgamma[i][(l, 6 * j + k)] - dgamma[j][(l, 6 * i + k)];
                    for m in 0..6 {
                        r += gm(l, i, m) * gm(m, j, k) - gm(l, j, m) * gm(m, i, k);
                    }
                    s += coef * r;
                }
            }
        }
        out[l] = s;
    }
    Ok(out)
}

/// Coordinate components of `ḡ(Y,Z)X − ḡ(X,Z)Y + g(AY,Z)AX − g(AX,Z)AY`.
pub fn gauss_curvature(shape: &ShapeData, x: &Vec6, y: &Vec6, z: &Vec6) -> Result<Vec6> {
    let g = &shape.metric;
    let s = g
        .cholesky()
        .ok_or(GeomError::DegenerateImmersion)?
        .solve(&shape.second);
    let ii = &shape.second;
    let gyz = y.dot(&(g * z));
    let gxz = x.dot(&(g * z));
    let ayz = y.dot(&(ii * z));
    let axz = x.dot(&(ii * z));
    Ok(x * gyz - y * gxz + (s * x) * ayz - (s * y) * axz)
}

/// Ambient length of the difference between the intrinsic finite-difference
/// curvature `Rm(X, Y)Z` and the Gauss-equation value.
pub fn gauss_residual<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    u: &Vec6,
    x: &Vec6,
    y: &Vec6,
    z: &Vec6,
    step: f64,
    stencil: Stencil,
) -> Result<f64> {
    let shape = shape_at(chart, u)?;
    let fd_val = intrinsic_curvature_fd(chart, u, x, y, z, step, stencil)?;
    let closed = gauss_curvature(&shape, x, y, z)?;
    Ok((shape.jacobian * (fd_val - closed)).norm())
}

/// Sectional curvature of the plane spanned by coordinate fields `X, Y`,
/// from the intrinsic finite-difference curvature.
pub fn sectional_curvature_fd<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    u: &Vec6,
    x: &Vec6,
    y: &Vec6,
    step: f64,
    stencil: Stencil,
) -> Result<f64> {
    let g = induced_metric(chart, u);
    let r = intrinsic_curvature_fd(chart, u, x, y, y, step, stencil)?;
    let area = x.dot(&(g * x)) * y.dot(&(g * y)) - x.dot(&(g * y)).powi(2);
    if !(area > 0.0) {
        return Err(GeomError::InvalidArgument("degenerate plane".into()));
    }
    Ok(x.dot(&(g * r)) / area)
}

/// `|G(B(W,Z),X,Y) − (τ₀/4)[ḡ(X,Z)B(W,Y) + ḡ(Y,Z)B(X,W) − ḡ(W,X)B(Z,Y)
/// − ḡ(W,Y)B(X,Z) + φ(X,Y,W)Z − φ(X,Y,Z)W]|` for tangent vectors at `p`.
pub fn g_of_b_residual(p: &Vec8, w: &Vec8, z: &Vec8, x: &Vec8, y: &Vec8) -> f64 {
    let b = |a: &Vec8, c: &Vec8| cross_at(p, a, c);
    let lhs = g_ambient(p, &b(w, z), x, y);
    let rhs = (b(w, y) * x.dot(z) + b(x, w) * y.dot(z)
        - b(z, y) * w.dot(x)
        - b(x, z) * w.dot(y)
        + z * phi_ambient(p, x, y, w)
        - w * phi_ambient(p, x, y, z))
        * (TAU0 / 4.0);
    (lhs - rhs).norm()
}

/// `|B(G(X,Y,Z),W) + G(B(X,Y),Z,W)|`, the commutation rule in its printed form.
pub fn b_of_g_printed_residual(p: &Vec8, x: &Vec8, y: &Vec8, z: &Vec8, w: &Vec8) -> f64 {
    let lhs = cross_at(p, &g_ambient(p, x, y, z), w);
    let rhs = -g_ambient(p, &cross_at(p, x, y), z, w);
    (lhs - rhs).norm()
}

/// `|B(G(X,Y,Z),W) − (τ₀/4)[ḡ(W,X)B(Y,Z) + ḡ(W,Y)B(Z,X) + ḡ(W,Z)B(X,Y)
/// − φ(W,Y,Z)X − φ(X,W,Z)Y − φ(X,Y,W)Z]|`, the form that holds on S⁷.
pub fn b_of_g_residual(p: &Vec8, x: &Vec8, y: &Vec8, z: &Vec8, w: &Vec8) -> f64 {
    let b = |a: &Vec8, c: &Vec8| cross_at(p, a, c);
    let lhs = b(&g_ambient(p, x, y, z), w);
    let rhs = (b(y, z) * w.dot(x) + b(z, x) * w.dot(y) + b(x, y) * w.dot(z)
        - x * phi_ambient(p, w, y, z)
        - y * phi_ambient(p, x, w, z)
        - z * phi_ambient(p, x, y, w))
        * (TAU0 / 4.0);
    (lhs - rhs).norm()
}

/// Extremes of the shape invariants over seeded random chart points.
#[derive(Clone, Debug, PartialEq)]
pub struct HypersurfaceSurvey {
    pub points: usize,
    pub max_abs_mean: f64,
    pub min_a2: f64,
    pub max_a2: f64,
    pub max_umbilic_defect: f64,
    pub min_umbilic_defect: f64,
    pub max_nk_defect: f64,
    pub min_nk_defect: f64,
    pub max_cross_defect: f64,
    pub min_cross_defect: f64,
    pub max_div_xi: f64,
    pub max_div_xi_fd: f64,
    /// Range of `S = 30 − |A|²`; `None` unless every point is minimal.
    pub scalar: Option<(f64, f64)>,
}

/// Number of random directions used for each defect supremum.
pub const DEFECT_DIRECTIONS: usize = 64;

pub fn hypersurface_survey<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    samples: usize,
    seed: u64,
) -> Result<HypersurfaceSurvey> {
    let mut rng = seeded(seed);
    let mut out = HypersurfaceSurvey {
        points: samples,
        max_abs_mean: 0.0,
        min_a2: f64::INFINITY,
        max_a2: 0.0,
        max_umbilic_defect: 0.0,
        min_umbilic_defect: f64::INFINITY,
        max_nk_defect: 0.0,
        min_nk_defect: f64::INFINITY,
        max_cross_defect: 0.0,
        min_cross_defect: f64::INFINITY,
        max_div_xi: 0.0,
        max_div_xi_fd: 0.0,
        scalar: None,
    };
    let mut scalar = Some((f64::INFINITY, f64::NEG_INFINITY));
    for i in 0..samples {
        let u = random_point(chart, &mut rng, DEFAULT_MARGIN)?;
        let s = shape_at(chart, &u)?;
        let dir_seed = seed.wrapping_add(i as u64);
        let nk = nk_defect(&s, DEFECT_DIRECTIONS, dir_seed)?;
        let cross = sup_cross_defect(&s, DEFECT_DIRECTIONS, dir_seed)?;
        let umb = umbilic_defect(&s);
        let v = s.random_unit(&mut rng);
        out.max_abs_mean = out.max_abs_mean.max(s.mean.abs());
        out.min_a2 = out.min_a2.min(s.a2);
        out.max_a2 = out.max_a2.max(s.a2);
        out.max_umbilic_defect = out.max_umbilic_defect.max(umb);
        out.min_umbilic_defect = out.min_umbilic_defect.min(umb);
        out.max_nk_defect = out.max_nk_defect.max(nk);
        out.min_nk_defect = out.min_nk_defect.min(nk);
        out.max_cross_defect = out.max_cross_defect.max(cross);
        out.min_cross_defect = out.min_cross_defect.min(cross);
        out.max_div_xi = out.max_div_xi.max(div_xi(&s, DEFECT_DIRECTIONS, dir_seed)?);
        out.max_div_xi_fd = out
            .max_div_xi_fd
            .max(div_xi_fd(chart, &s, &v, 1e-4, Stencil::Second)?.abs());
        scalar = match (scalar, hyper_curvature(&s)) {
            (Some((lo, hi)), Ok((_, sc))) => Some((lo.min(sc), hi.max(sc))),
            _ => None,
        };
    }
    out.scalar = scalar.filter(|_| samples > 0);
    Ok(out)
}
