//! Conformal fields of S⁷ restricted to a hypersurface, the function
//! `h = g(ξW, W̃)`, its divergence identities, and a grid check of
//! `Δh = −(|A|² + 6) h`.

use crate::error::{GeomError, Result};
use crate::fd::{self, Stencil};
use crate::hypersurface::{
    chart_derivative, g_ambient, inner_box, shape_at, ExampleSurface, HypersurfaceChart, Matrix6, ShapeData, Vec6,
    DEFAULT_MARGIN,
};
use crate::octonion::Vec8;
use crate::sphere::{SpherePoint, TAU0};

/// Smallest accepted angle between the two generators.
pub const MIN_GENERATOR_ANGLE: f64 = 1e-3;

const DEGENERATE_H: f64 = 1e-12;

/// Position of the default grid centre within each axis of the domain.
pub const DEFAULT_CENTER_FRACTIONS: [f64; 6] = [0.4, 0.6, 0.35, 0.65, 0.45, 0.3];

/// The conformal field generated by a constant vector `Y` of ℝ⁸.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConformalField {
    pub y: Vec8,
}

impl ConformalField {
    pub fn new(y: Vec8) -> Self {
        Self { y }
    }

    /// `(V, f) = (Y − ⟨Y, p⟩p, ⟨Y, p⟩)`.
    pub fn at(&self, p: &SpherePoint) -> (Vec8, f64) {
        conformal_on_sphere(&self.y, p)
    }
}

pub fn conformal_on_sphere(y: &Vec8, p: &SpherePoint) -> (Vec8, f64) {
    let f = y.dot(p.vec());
    (y - p.vec() * f, f)
}

/// `V = W + sN` split along M, with the potential `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedField {
    pub u: Vec6,
    pub w: Vec8,
    pub s: f64,
    pub f: f64,
}

pub fn restrict_at(shape: &ShapeData, y: &Vec8) -> RestrictedField {
    let (v, f) = conformal_on_sphere(y, &shape.p);
    let s = v.dot(&shape.normal);
    RestrictedField {
        u: shape.u,
        w: v - shape.normal * s,
        s,
        f,
    }
}

pub fn restrict_field<C: HypersurfaceChart + ?Sized>(chart: &C, u: &Vec6, y: &Vec8) -> Result<RestrictedField> {
    Ok(restrict_at(&shape_at(chart, u)?, y))
}

pub fn h_at(shape: &ShapeData, y: &Vec8, y_tilde: &Vec8) -> f64 {
    let w = restrict_at(shape, y).w;
    let wt = restrict_at(shape, y_tilde).w;
    shape.xi(&w).dot(&wt)
}

/// `h = g(ξW, W̃)`.
pub fn h_value<C: HypersurfaceChart + ?Sized>(chart: &C, u: &Vec6, y: &Vec8, y_tilde: &Vec8) -> Result<f64> {
    Ok(h_at(&shape_at(chart, u)?, y, y_tilde))
}

/// `∇h = −G(N, W, W̃) − A B(W, W̃)^T + fξW̃ − sAξW̃ − f̃ξW + s̃AξW`.
pub fn grad_h_at(shape: &ShapeData, y: &Vec8, y_tilde: &Vec8) -> Vec8 {
    let r = restrict_at(shape, y);
    let rt = restrict_at(shape, y_tilde);
    let p = shape.p.vec();
    let (xw, xwt) = (shape.xi(&r.w), shape.xi(&rt.w));
    let b_t = shape.project(&shape.cross(&r.w, &rt.w));
    -g_ambient(p, &shape.normal, &r.w, &rt.w) - shape.shape_apply(&b_t) + xwt * r.f
        - shape.shape_apply(&xwt) * r.s
        - xw * rt.f
        + shape.shape_apply(&xw) * rt.s
}

pub fn grad_h<C: HypersurfaceChart + ?Sized>(chart: &C, u: &Vec6, y: &Vec8, y_tilde: &Vec8) -> Result<Vec8> {
    Ok(grad_h_at(&shape_at(chart, u)?, y, y_tilde))
}

/// Gradient of a function on M from its finite-difference derivatives
/// along the orthonormal frame.
pub fn gradient_fd<C, F>(chart: &C, shape: &ShapeData, step: f64, stencil: Stencil, f: F) -> Result<Vec8>
where
    C: HypersurfaceChart + ?Sized,
    F: Fn(&ShapeData) -> f64,
{
    let mut out = Vec8::zeros();
    for e in &shape.frame {
        let d = chart_derivative(chart, &shape.u, &shape.coordinates(e), step, stencil, &f)?;
        out += e * d;
    }
    Ok(out)
}

pub fn grad_h_fd<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    u: &Vec6,
    y: &Vec8,
    y_tilde: &Vec8,
    step: f64,
    stencil: Stencil,
) -> Result<Vec8> {
    let shape = shape_at(chart, u)?;
    gradient_fd(chart, &shape, step, stencil, |s| h_at(s, y, y_tilde))
}

/// Divergence on M of a tangent field built from the shape data, by finite
/// differences along the orthonormal frame.
pub fn divergence_fd<C, F>(chart: &C, shape: &ShapeData, step: f64, stencil: Stencil, field: F) -> Result<f64>
where
    C: HypersurfaceChart + ?Sized,
    F: Fn(&ShapeData) -> Vec8,
{
    let mut div = 0.0;
    for e in &shape.frame {
        let d = chart_derivative(chart, &shape.u, &shape.coordinates(e), step, stencil, &field)?;
        div += d.dot(e);
    }
    Ok(div)
}

/// One divergence identity: the closed-form right side against the
/// finite-difference divergence of the field on the left.
#[derive(Clone, Debug, PartialEq)]
pub struct DivergenceEntry {
    pub name: &'static str,
    pub closed: f64,
    pub fd: f64,
}

impl DivergenceEntry {
    pub fn residual(&self) -> f64 {
        (self.closed - self.fd).abs()
    }
}

/// Closed-form divergences of the six terms of `∇h`, in the order
/// `Div(fξW̃), Div(f̃ξW), Div(sAξW̃), Div(s̃AξW), Div(AB(W,W̃)^T), Div(G(N,W,W̃))`.
pub fn divergence_closed(shape: &ShapeData, y: &Vec8, y_tilde: &Vec8) -> [f64; 6] {
    let r = restrict_at(shape, y);
    let rt = restrict_at(shape, y_tilde);
    let h = shape.xi(&r.w).dot(&rt.w);
    let (aw, awt) = (shape.shape_apply(&r.w), shape.shape_apply(&rt.w));
    let aw_axwt = aw.dot(&shape.shape_apply(&shape.xi(&rt.w)));
    let awt_axw = awt.dot(&shape.shape_apply(&shape.xi(&r.w)));
    [
        -h,
        h,
        -aw_axwt,
        -awt_axw,
        shape.a2 * h + aw_axwt - awt_axw,
        TAU0 * TAU0 / 4.0 * h,
    ]
}

/// `Δh` assembled from the closed-form divergences of the terms of `∇h`.
pub fn telescoped_laplacian(shape: &ShapeData, y: &Vec8, y_tilde: &Vec8) -> f64 {
    let [d1, d2, d3, d4, d7, d8] = divergence_closed(shape, y, y_tilde);
    -d8 - d7 + d1 - d3 - d2 + d4
}

/// Five divergence identities, each closed form against finite differences.
pub fn divergence_suite<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    u: &Vec6,
    y: &Vec8,
    y_tilde: &Vec8,
    step: f64,
    stencil: Stencil,
) -> Result<[DivergenceEntry; 5]> {
    let shape = shape_at(chart, u)?;
    let [d1, d2, d3, _, d7, d8] = divergence_closed(&shape, y, y_tilde);
    let fields = |s: &ShapeData| (restrict_at(s, y), restrict_at(s, y_tilde));
    let div = |field: &dyn Fn(&ShapeData) -> Vec8| divergence_fd(chart, &shape, step, stencil, field);
    Ok([
        DivergenceEntry {
            name: "Div(f xi W~) = -h",
            closed: d1,
            fd: div(&|s| {
                let (r, rt) = fields(s);
                s.xi(&rt.w) * r.f
            })?,
        },
        DivergenceEntry {
            name: "Div(f~ xi W) = h",
            closed: d2,
            fd: div(&|s| {
                let (r, rt) = fields(s);
                s.xi(&r.w) * rt.f
            })?,
        },
        DivergenceEntry {
            name: "Div(s A xi W~) = -g(AW, A xi W~)",
            closed: d3,
            fd: div(&|s| {
                let (r, rt) = fields(s);
                s.shape_apply(&s.xi(&rt.w)) * r.s
            })?,
        },
        DivergenceEntry {
            name: "Div(A B(W,W~)^T) = |A|^2 h + g(AW, A xi W~) - g(AW~, A xi W)",
            closed: d7,
            fd: div(&|s| {
                let (r, rt) = fields(s);
                s.shape_apply(&s.project(&s.cross(&r.w, &rt.w)))
            })?,
        },
        DivergenceEntry {
            name: "Div(G(N,W,W~)) = tau0^2/4 h",
            closed: d8,
            fd: div(&|s| {
                let (r, rt) = fields(s);
                g_ambient(s.p.vec(), &s.normal, &r.w, &rt.w)
            })?,
        },
    ])
}

/// A cubic lattice of `(2·half + 1)⁶` nodes centred at `center`.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSpec {
    pub center: Vec6,
    pub delta: f64,
    pub half: usize,
    pub stencil: Stencil,
    pub margin: f64,
}

impl GridSpec {
    /// Default grid: centred at a fixed generic point of the chart domain
    /// (away from the zero set of h for the default generators), with one
    /// interior layer beyond the stencil reach on each side.
    pub fn centered<C: HypersurfaceChart + ?Sized>(chart: &C, delta: f64, stencil: Stencil) -> Self {
        let center = Vec6::from_fn(|i, _| {
            let (lo, hi) = chart.domain()[i];
            lo + DEFAULT_CENTER_FRACTIONS[i] * (hi - lo)
        });
        Self {
            center,
            delta,
            half: stencil.half_width() + 1,
            stencil,
            margin: DEFAULT_MARGIN,
        }
    }

    pub fn nodes_per_axis(&self) -> usize {
        2 * self.half + 1
    }

    /// Half-width of the sub-lattice on which the Laplacian is reported.
    pub fn interior_half(&self) -> usize {
        self.half - self.stencil.half_width()
    }

    /// Covered box `[lo_i, hi_i]`.
    pub fn bounds(&self) -> [(f64, f64); 6] {
        let r = self.half as f64 * self.delta;
        std::array::from_fn(|i| (self.center[i] - r, self.center[i] + r))
    }

    pub fn validate<C: HypersurfaceChart + ?Sized>(&self, chart: &C) -> Result<()> {
        fd::check_step(self.delta)?;
        if self.half < self.stencil.half_width() {
            return Err(GeomError::InvalidArgument(format!(
                "grid half-width {} smaller than the stencil reach",
                self.half
            )));
        }
        let allowed = inner_box(chart, self.margin)?;
        for (i, ((lo, hi), (alo, ahi))) in self.bounds().iter().zip(allowed.iter()).enumerate() {
            if lo < alo || hi > ahi {
                return Err(GeomError::GridOutsideRegion(format!(
                    "axis {i}: [{lo}, {hi}] not inside [{alo}, {ahi}]"
                )));
            }
        }
        Ok(())
    }

    fn offsets(&self, flat: usize, n: usize, half: usize) -> [i64; 6] {
        let mut r = flat;
        std::array::from_fn(|_| {
            let o = (r % n) as i64 - half as i64;
            r /= n;
            o
        })
    }

    fn point(&self, off: &[i64; 6]) -> Vec6 {
        Vec6::from_fn(|i, _| self.center[i] + off[i] as f64 * self.delta)
    }

    fn flat(&self, off: &[i64; 6]) -> usize {
        let n = self.nodes_per_axis();
        off.iter()
            .rev()
            .fold(0, |acc, o| acc * n + (o + self.half as i64) as usize)
    }

    /// Chart coordinates of every node, in storage order.
    pub fn nodes(&self) -> Vec<Vec6> {
        let n = self.nodes_per_axis();
        (0..n.pow(6)).map(|k| self.point(&self.offsets(k, n, self.half))).collect()
    }

    /// Chart coordinates of the interior nodes, in storage order.
    pub fn interior_nodes(&self) -> Vec<Vec6> {
        let (ih, m) = (self.interior_half(), 2 * self.interior_half() + 1);
        (0..m.pow(6)).map(|k| self.point(&self.offsets(k, m, ih))).collect()
    }
}

/// Values on the interior nodes of a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridField {
    pub spec: GridSpec,
    pub values: Vec<f64>,
}

/// `g⁻¹` and `g^{ij} Γ^k_ij` from the closed-form chart derivatives.
fn laplace_coefficients<C: HypersurfaceChart + ?Sized>(chart: &C, u: &Vec6) -> Result<(Matrix6, Vec6)> {
    let j = chart.jacobian(u);
    let hess = chart.hessian(u);
    let g_inv = (j.transpose() * j)
        .try_inverse()
        .ok_or(GeomError::DegenerateImmersion)?;
    // Γ_{l,ij} = ⟨∂_i∂_j x, ∂_l x⟩.
    let mut contracted = Vec6::zeros();
    for a in 0..6 {
        for b in 0..6 {
            let first = j.transpose() * hess[a].column(b);
            contracted += first * g_inv[(a, b)];
        }
    }
    Ok((g_inv, g_inv * contracted))
}

/// `Δu = g^{ij}(∂_i∂_j u − Γ^k_ij ∂_k u)` at the interior nodes, from
/// samples of `u` on every node (storage order of [`GridSpec::nodes`]).
pub fn laplacian_of_samples<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    spec: &GridSpec,
    samples: &[f64],
) -> Result<GridField> {
    spec.validate(chart)?;
    let n = spec.nodes_per_axis();
    if samples.len() != n.pow(6) {
        return Err(GeomError::InvalidArgument(format!(
            "expected {} samples, got {}",
            n.pow(6),
            samples.len()
        )));
    }
    let w = spec.stencil.half_width() as i64;
    let (d1, d2) = fd::weights(spec.stencil);
    let h = spec.delta;
    let (ih, m) = (spec.interior_half(), 2 * spec.interior_half() + 1);
    let mut values = Vec::with_capacity(m.pow(6));
    for k in 0..m.pow(6) {
        let base = spec.offsets(k, m, ih);
        let at = |shift: &[(usize, i64)]| {
            let mut o = base;
            for &(axis, d) in shift {
                o[axis] += d;
            }
            samples[spec.flat(&o)]
        };
        let mut first = Vec6::zeros();
        let mut hess = Matrix6::zeros();
        for i in 0..6 {
            for (a, ca) in (-w..=w).zip(d1) {
                if *ca != 0.0 {
                    first[i] += ca * at(&[(i, a)]) / h;
                }
            }
            for (a, ca) in (-w..=w).zip(d2) {
                hess[(i, i)] += ca * at(&[(i, a)]) / (h * h);
            }
            for j in i + 1..6 {
                let mut s = 0.0;
                for (a, ca) in (-w..=w).zip(d1) {
                    for (b, cb) in (-w..=w).zip(d1) {
                        if *ca != 0.0 && *cb != 0.0 {
                            s += ca * cb * at(&[(i, a), (j, b)]);
                        }
                    }
                }
                hess[(i, j)] = s / (h * h);
                hess[(j, i)] = s / (h * h);
            }
        }
        let (g_inv, gamma) = laplace_coefficients(chart, &spec.point(&base))?;
        values.push(g_inv.component_mul(&hess).sum() - gamma.dot(&first));
    }
    Ok(GridField {
        spec: spec.clone(),
        values,
    })
}

/// Laplace–Beltrami operator of `field` on the interior of the grid.
pub fn laplace_beltrami<C, F>(chart: &C, spec: &GridSpec, field: F) -> Result<GridField>
where
    C: HypersurfaceChart + ?Sized,
    F: Fn(&Vec6) -> Result<f64>,
{
    spec.validate(chart)?;
    let samples = spec.nodes().iter().map(field).collect::<Result<Vec<_>>>()?;
    laplacian_of_samples(chart, spec, &samples)
}

/// Rejects a zero generator or two generators closer than
/// [`MIN_GENERATOR_ANGLE`] to being parallel.
pub fn check_generators(y: &Vec8, y_tilde: &Vec8) -> Result<()> {
    let (a, b) = (y.norm(), y_tilde.norm());
    if a == 0.0 || b == 0.0 || !a.is_finite() || !b.is_finite() {
        return Err(GeomError::DegenerateFieldPair);
    }
    let sin = (1.0 - (y.dot(y_tilde) / (a * b)).powi(2)).max(0.0).sqrt();
    if sin.asin() < MIN_GENERATOR_ANGLE {
        return Err(GeomError::DegenerateFieldPair);
    }
    Ok(())
}

/// Outcome of the grid check of `Δh + (|A|² + 6) h = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenReport {
    pub example: String,
    pub k: Option<usize>,
    pub y: Vec8,
    pub y_tilde: Vec8,
    pub grid_box: [(f64, f64); 6],
    pub delta: f64,
    pub order: u32,
    pub lambda_expected: f64,
    pub max_abs_h: f64,
    pub max_residual: f64,
    pub rel_residual: f64,
    pub nonconstancy: f64,
}

/// Grid check on an arbitrary minimal chart.
pub fn eigencheck_chart<C: HypersurfaceChart + ?Sized>(
    chart: &C,
    name: &str,
    k: Option<usize>,
    y: &Vec8,
    y_tilde: &Vec8,
    spec: &GridSpec,
) -> Result<EigenReport> {
    check_generators(y, y_tilde)?;
    spec.validate(chart)?;
    let center = shape_at(chart, &spec.center)?;
    if center.mean.abs() > 1e-8 {
        return Err(GeomError::NotMinimal(center.mean));
    }
    let nodes = spec.nodes();
    let samples = nodes
        .iter()
        .map(|u| h_value(chart, u, y, y_tilde))
        .collect::<Result<Vec<_>>>()?;
    let lap = laplacian_of_samples(chart, spec, &samples)?;
    let interior = spec.interior_nodes();
    let mut max_abs_h = 0.0f64;
    let mut min_abs_h = f64::INFINITY;
    let mut max_residual = 0.0f64;
    for (u, lap_h) in interior.iter().zip(&lap.values) {
        let shape = shape_at(chart, u)?;
        let h = h_at(&shape, y, y_tilde);
        max_abs_h = max_abs_h.max(h.abs());
        min_abs_h = min_abs_h.min(h.abs());
        max_residual = max_residual.max((lap_h + (shape.a2 + 6.0) * h).abs());
    }
    if max_abs_h <= DEGENERATE_H {
        return Err(GeomError::DegenerateFieldPair);
    }
    Ok(EigenReport {
        example: name.to_string(),
        k,
        y: *y,
        y_tilde: *y_tilde,
        grid_box: spec.bounds(),
        delta: spec.delta,
        order: spec.stencil.order(),
        lambda_expected: center.a2 + 6.0,
        max_abs_h,
        max_residual,
        rel_residual: max_residual / max_abs_h,
        nonconstancy: max_abs_h - min_abs_h,
    })
}

pub fn eigencheck_report(
    example: ExampleSurface,
    y: &Vec8,
    y_tilde: &Vec8,
    spec: &GridSpec,
) -> Result<EigenReport> {
    let chart = example.chart()?;
    eigencheck_chart(&chart, &example.to_string(), example.k(), y, y_tilde, spec)
}

/// Least-squares slope of `ln(error)` against `ln(δ)`.
pub fn convergence_rate(samples: &[(f64, f64)]) -> Result<f64> {
    if samples.len() < 2 || samples.iter().any(|(d, e)| !(*d > 0.0 && *e > 0.0)) {
        return Err(GeomError::InvalidArgument(
            "need at least two positive (delta, error) pairs".into(),
        ));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|(d, e)| (d.ln(), e.ln())).collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx).powi(2)).sum();
    Ok(sxy / sxx)
}

/// `e_i` of ℝ⁸ (0-based component).
pub fn generator(i: usize) -> Vec8 {
    Vec8::from_fn(|k, _| if k == i { 1.0 } else { 0.0 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hypersurface::{random_point, TrigChart};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn gaussian8(r: &mut ChaCha8Rng) -> Vec8 {
        Vec8::from_fn(|_, _| r.sample(StandardNormal))
    }

    #[test]
    fn conformal_field_basics() {
        let mut r = rng(1);
        let p = SpherePoint::random(&mut r);
        let (v, f) = conformal_on_sphere(&(p.vec() * 2.0), &p);
        assert!(v.norm() < 1e-15);
        assert_abs_diff_eq!(f, 2.0, epsilon = 1e-15);
        let y = gaussian8(&mut r);
        let (v, f) = conformal_on_sphere(&y, &p);
        assert!(v.dot(p.vec()).abs() < 1e-14);
        assert_abs_diff_eq!(v.norm_squared() + f * f, y.norm_squared(), epsilon = 1e-12);
        let perp = y - p.vec() * y.dot(p.vec());
        let (v, f) = conformal_on_sphere(&perp, &p);
        assert!((v - perp).norm() < 1e-14 && f.abs() < 1e-14);
    }

    #[test]
    fn conformal_field_derivatives_on_the_sphere() {
        use crate::sphere::{sphere_directional, sphere_nabla, TangentVector};
        let mut r = rng(2);
        for _ in 0..5 {
            let p = SpherePoint::random(&mut r);
            let y = gaussian8(&mut r);
            let z = TangentVector::random(&mut r, p);
            let (v, f) = conformal_on_sphere(&y, &p);
            let dv = sphere_nabla(|q| conformal_on_sphere(&y, q).0, &z, 1e-4, Stencil::Second).unwrap();
            assert!((dv.vec() + z.vec() * f).norm() < 1e-6);
            let df = sphere_directional(|q| conformal_on_sphere(&y, q).1, &z, 1e-4, Stencil::Second).unwrap();
            assert_abs_diff_eq!(df, v.dot(z.vec()), epsilon = 1e-6);
        }
    }

    #[test]
    fn restricted_field_reassembles_and_differentiates() {
        let chart = TrigChart::clifford(1).unwrap();
        let mut r = rng(3);
        for _ in 0..5 {
            let u = random_point(&chart, &mut r, DEFAULT_MARGIN).unwrap();
            let shape = shape_at(&chart, &u).unwrap();
            let y = gaussian8(&mut r);
            let rf = restrict_field(&chart, &u, &y).unwrap();
            shape.check_tangent(&rf.w).unwrap();
            let (v, f) = conformal_on_sphere(&y, &shape.p);
            assert!((rf.w + shape.normal * rf.s - v).norm() < 1e-12);
            assert_eq!(rf.f, f);

            let grad_f = gradient_fd(&chart, &shape, 1e-4, Stencil::Second, |s| restrict_at(s, &y).f).unwrap();
            assert!((grad_f - rf.w).norm() < 1e-5);
            let grad_s = gradient_fd(&chart, &shape, 1e-4, Stencil::Second, |s| restrict_at(s, &y).s).unwrap();
            assert!((grad_s + shape.shape_apply(&rf.w)).norm() < 1e-5);
            let x = shape.random_unit(&mut r);
            let dw = chart_derivative(&chart, &u, &shape.coordinates(&x), 1e-4, Stencil::Second, |s| {
                restrict_at(s, &y).w
            })
            .unwrap();
            let expected = -x * rf.f + shape.shape_apply(&x) * rf.s;
            assert!((shape.project(&dw) - expected).norm() < 1e-5);
        }
    }

    #[test]
    fn restriction_on_geodesic_s6() {
        let chart = TrigChart::geodesic_s6();
        let u = random_point(&chart, &mut rng(4), DEFAULT_MARGIN).unwrap();
        let rf = restrict_field(&chart, &u, &generator(0)).unwrap();
        assert_eq!(rf.s, 0.0);
        let zero = restrict_field(&chart, &u, &Vec8::zeros()).unwrap();
        assert_eq!((zero.w.norm(), zero.s, zero.f), (0.0, 0.0, 0.0));
    }

    #[test]
    fn h_fixture_on_geodesic_s6() {
        // At p = e₇ (component 6) with N = ±e₈ (component 7), W = e₁ and
        // W̃ = e₂, so h = ⟨B_p(N, e₁), e₂⟩.
        let chart = TrigChart::geodesic_s6();
        let u = Vec6::from_element(std::f64::consts::FRAC_PI_2);
        let shape = shape_at(&chart, &u).unwrap();
        let (e1, e2) = (generator(0), generator(1));
        let oracle = crate::sphere::cross_at(shape.p.vec(), &shape.normal, &e1).dot(&e2);
        let h = h_value(&chart, &u, &e1, &e2).unwrap();
        assert_eq!(h, oracle);
        assert_abs_diff_eq!(h.abs(), 1.0, epsilon = 1e-15);
        assert_eq!(shape.normal[7], 1.0);
        assert_eq!(h, -1.0);
    }

    #[test]
    fn h_is_skew_and_bilinear() {
        let chart = TrigChart::clifford(2).unwrap();
        let mut r = rng(5);
        for _ in 0..10 {
            let u = random_point(&chart, &mut r, DEFAULT_MARGIN).unwrap();
            let s = shape_at(&chart, &u).unwrap();
            let (y, yt, z) = (gaussian8(&mut r), gaussian8(&mut r), gaussian8(&mut r));
            assert_abs_diff_eq!(h_at(&s, &y, &yt), -h_at(&s, &yt, &y), epsilon = 1e-12);
            assert!(h_at(&s, &y, &y).abs() < 1e-12);
            assert_eq!(h_at(&s, &Vec8::zeros(), &yt), 0.0);
            let lin = h_at(&s, &(y * 2.0 + z), &yt) - 2.0 * h_at(&s, &y, &yt) - h_at(&s, &z, &yt);
            assert!(lin.abs() < 1e-12);
        }
    }

    #[test]
    fn gradient_of_h_matches_finite_differences() {
        for (ex, tol) in [(ExampleSurface::GeodesicS6, 1e-6), (ExampleSurface::Clifford(1), 1e-5)] {
            let chart = ex.chart().unwrap();
            let mut r = rng(6);
            for _ in 0..5 {
                let u = random_point(&chart, &mut r, DEFAULT_MARGIN).unwrap();
                let (y, yt) = (gaussian8(&mut r), gaussian8(&mut r));
                let closed = grad_h(&chart, &u, &y, &yt).unwrap();
                let fd = grad_h_fd(&chart, &u, &y, &yt, 1e-4, Stencil::Second).unwrap();
                assert!((closed - fd).norm() < tol, "{ex}: {}", (closed - fd).norm());
            }
            let u = random_point(&chart, &mut r, DEFAULT_MARGIN).unwrap();
            let y = gaussian8(&mut r);
            assert!(grad_h(&chart, &u, &y, &y).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn divergence_identities() {
        for ex in [ExampleSurface::GeodesicS6, ExampleSurface::Clifford(1), ExampleSurface::Clifford(3)] {
            let chart = ex.chart().unwrap();
            let mut r = rng(7);
            for _ in 0..3 {
                let u = random_point(&chart, &mut r, DEFAULT_MARGIN).unwrap();
                let (y, yt) = (gaussian8(&mut r), gaussian8(&mut r));
                for e in divergence_suite(&chart, &u, &y, &yt, 1e-4, Stencil::Second).unwrap() {
                    assert!(e.residual() < 1e-4, "{ex} {}: {} vs {}", e.name, e.closed, e.fd);
                }
                let s = shape_at(&chart, &u).unwrap();
                let direct = -(s.a2 + 6.0) * h_at(&s, &y, &yt);
                assert_abs_diff_eq!(telescoped_laplacian(&s, &y, &yt), direct, epsilon = 1e-10);
            }
            let u = random_point(&chart, &mut r, DEFAULT_MARGIN).unwrap();
            let z = Vec8::zeros();
            for e in divergence_suite(&chart, &u, &z, &z, 1e-4, Stencil::Second).unwrap() {
                assert_eq!((e.closed, e.fd), (0.0, 0.0));
            }
        }
    }

    #[test]
    fn laplacian_of_constants_and_coordinate_functions() {
        let chart = TrigChart::geodesic_s6();
        let spec = GridSpec::centered(&chart, 1e-2, Stencil::Second);
        let lap = laplace_beltrami(&chart, &spec, |_| Ok(3.5)).unwrap();
        assert!(lap.values.iter().all(|v| v.abs() < 1e-9));
        for comp in [0, 3, 5] {
            let lap = laplace_beltrami(&chart, &spec, |u| Ok(chart.immerse(u)[comp])).unwrap();
            for (u, v) in spec.interior_nodes().iter().zip(&lap.values) {
                let x = chart.immerse(u)[comp];
                assert!((v + 6.0 * x).abs() < 1e-3, "component {comp}: {v} vs {}", -6.0 * x);
            }
        }
    }

    #[test]
    fn fourth_order_grid_is_more_accurate() {
        let chart = TrigChart::geodesic_s6();
        let mut errs = Vec::new();
        for st in [Stencil::Second, Stencil::Fourth] {
            let mut spec = GridSpec::centered(&chart, 2e-2, st);
            spec.center = Vec6::new(1.2, 1.4, 1.9, 1.1, 1.7, 0.6);
            let lap = laplace_beltrami(&chart, &spec, |u| Ok(chart.immerse(u)[3])).unwrap();
            let worst = spec
                .interior_nodes()
                .iter()
                .zip(&lap.values)
                .map(|(u, v)| (v + 6.0 * chart.immerse(u)[3]).abs())
                .fold(0.0f64, f64::max);
            errs.push(worst);
        }
        assert!(errs[1] < errs[0] * 0.1, "{errs:?}");
    }

    #[test]
    fn grid_outside_region_is_rejected() {
        let chart = TrigChart::geodesic_s6();
        let mut spec = GridSpec::centered(&chart, 1e-2, Stencil::Second);
        spec.center[0] = 0.05;
        assert!(matches!(spec.validate(&chart), Err(GeomError::GridOutsideRegion(_))));
        let spec = GridSpec::centered(&chart, -1.0, Stencil::Second);
        assert!(spec.validate(&chart).is_err());
    }

    #[test]
    fn eigen_identity_on_examples() {
        let (y, yt) = (generator(0), generator(1));
        let s6 = eigencheck_report(ExampleSurface::GeodesicS6, &y, &yt, &GridSpec::centered(&TrigChart::geodesic_s6(), 1e-2, Stencil::Second)).unwrap();
        assert_abs_diff_eq!(s6.lambda_expected, 6.0, epsilon = 1e-12);
        assert!(s6.rel_residual < 1e-3, "{s6:?}");
        for k in 1..=5 {
            let ex = ExampleSurface::Clifford(k);
            let spec = GridSpec::centered(&ex.chart().unwrap(), 5e-3, Stencil::Second);
            let rep = eigencheck_report(ex, &y, &yt, &spec).unwrap();
            assert_abs_diff_eq!(rep.lambda_expected, 12.0, epsilon = 1e-9);
            assert!(rep.rel_residual < 1e-2, "{rep:?}");
            assert!(rep.nonconstancy > 0.0);
        }
    }

    #[test]
    fn degenerate_pairs_are_rejected() {
        let chart = TrigChart::clifford(3).unwrap();
        let spec = GridSpec::centered(&chart, 1e-2, Stencil::Second);
        let y = generator(0);
        for bad in [y, y * -2.0, Vec8::zeros(), y + generator(1) * 1e-5] {
            let err = eigencheck_chart(&chart, "clifford:3", Some(3), &y, &bad, &spec).unwrap_err();
            assert!(matches!(err, GeomError::DegenerateFieldPair));
        }
    }

    #[test]
    fn convergence_rate_of_power_law() {
        let pts: Vec<(f64, f64)> = [0.02, 0.01, 0.005].iter().map(|d| (*d, 3.0 * d * d)).collect();
        assert_abs_diff_eq!(convergence_rate(&pts).unwrap(), 2.0, epsilon = 1e-12);
        assert!(convergence_rate(&pts[..1]).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn telescoping_matches_eigen_identity(seed in any::<u64>(), k in 0usize..6) {
            let ex = ExampleSurface::all()[k];
            let chart = ex.chart().unwrap();
            let mut r = rng(seed);
            let u = random_point(&chart, &mut r, DEFAULT_MARGIN).unwrap();
            let s = shape_at(&chart, &u).unwrap();
            let (y, yt) = (gaussian8(&mut r), gaussian8(&mut r));
            let direct = -(s.a2 + 6.0) * h_at(&s, &y, &yt);
            prop_assert!((telescoped_laplacian(&s, &y, &yt) - direct).abs() < 1e-10);
            prop_assert!((h_at(&s, &y, &yt) + h_at(&s, &yt, &y)).abs() < 1e-12);
        }
    }
}
