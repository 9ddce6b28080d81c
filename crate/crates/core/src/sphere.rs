//! The round nearly G₂ structure on S⁷ ⊂ ℝ⁸ ≅ 𝕆.
//!
//! At `p ∈ S⁷` the 2-fold cross product is `B_p(u, v) = σ · cross3(p, u, v)`
//! with `σ = CROSS_SIGN`. Its 3-form `φ_p(u, v, w) = ⟨B_p(u, v), w⟩` agrees
//! with φ₀ at `p = 1` in the frame `(e₁, …, e₇)`, and the full torsion
//! comes out as `T = g`, i.e. τ₀ = +4. The 4-form is `ψ_p = −Φ|_{T_p}`
//! for the Cayley form Φ.

use nalgebra::SMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{GeomError, Result};
use crate::fd::{self, Stencil};
use crate::forms::{AltForm, Matrix7, MetricTensor, Sym2};
use crate::g2::G2Structure;
use crate::octonion::{cayley_form, cross3, Octonion, Vec7, Vec8};

/// Sign σ in `B_p(u, v) = σ · cross3(p, u, v)`.
pub const CROSS_SIGN: f64 = -1.0;

/// Torsion constant τ₀ of the unit round S⁷.
pub const TAU0: f64 = 4.0;

const UNIT_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SpherePoint(Vec8);

impl SpherePoint {
    pub fn new(p: Vec8) -> Result<Self> {
        let dev = p.norm() - 1.0;
        if dev.abs() > UNIT_TOL || !dev.is_finite() {
            return Err(GeomError::NotUnit(dev));
        }
        Ok(Self(p))
    }

    /// Radial projection of a nonzero vector.
    pub fn normalize(v: Vec8) -> Result<Self> {
        let n = v.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(GeomError::NotUnit(-1.0));
        }
        Ok(Self(v / n))
    }

    pub fn real_unit() -> Self {
        Self(Vec8::from_fn(|i, _| if i == 0 { 1.0 } else { 0.0 }))
    }

    pub fn vec(&self) -> &Vec8 {
        &self.0
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        loop {
            let v = Vec8::from_fn(|_, _| rng.sample(StandardNormal));
            if v.norm() > 1e-3 {
                return Self(v / v.norm());
            }
        }
    }

    /// Point on the great circle through `self` with unit initial velocity `dir`.
    pub fn geodesic(&self, dir: &Vec8, t: f64) -> SpherePoint {
        Self(self.0 * t.cos() + dir * t.sin())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TangentVector {
    base: SpherePoint,
    v: Vec8,
}

impl TangentVector {
    pub fn new(base: SpherePoint, v: Vec8) -> Result<Self> {
        let normal = v.dot(base.vec());
        if normal.abs() > UNIT_TOL * v.norm().max(1.0) {
            return Err(GeomError::NotTangent(normal));
        }
        Ok(Self { base, v })
    }

    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn vec(&self) -> &Vec8 {
        &self.v
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, base: SpherePoint) -> Self {
        let v = Vec8::from_fn(|_, _| rng.sample(StandardNormal));
        tangent_project(&base, &v)
    }
}

/// `v − ⟨v, p⟩ p`.
pub fn tangent_project(p: &SpherePoint, v: &Vec8) -> TangentVector {
    TangentVector {
        base: *p,
        v: v - p.vec() * v.dot(p.vec()),
    }
}

/// Raw ambient formula `σ · cross3(p, u, v)`.
pub fn cross_at(p: &Vec8, u: &Vec8, v: &Vec8) -> Vec8 {
    cross3(p, u, v) * CROSS_SIGN
}

/// The cross product `B_p(u, v)` of the nearly G₂ structure.
pub fn cross_s7(p: &SpherePoint, u: &TangentVector, v: &TangentVector) -> Result<TangentVector> {
    if u.base != *p || v.base != *p {
        return Err(GeomError::BaseMismatch);
    }
    Ok(TangentVector {
        base: *p,
        v: cross_at(p.vec(), &u.v, &v.v),
    })
}

/// `φ_p(x, y, z) = σ Φ(p, x, y, z)`.
pub fn phi_ambient(p: &Vec8, x: &Vec8, y: &Vec8, z: &Vec8) -> f64 {
    CROSS_SIGN * cayley_form(p, x, y, z)
}

/// `ψ_p(x, y, z, w) = −Φ(x, y, z, w)` for tangent arguments.
pub fn psi_ambient(x: &Vec8, y: &Vec8, z: &Vec8, w: &Vec8) -> f64 {
    -cayley_form(x, y, z, w)
}

/// Orthonormal frame of `T_pS⁷` with `(p, f₁, …, f₇)` positively oriented.
#[derive(Clone, Debug, PartialEq)]
pub struct TangentFrame {
    base: SpherePoint,
    f: [Vec8; 7],
}

impl TangentFrame {
    /// `f_i = p · e_i`.
    pub fn octonionic(p: &SpherePoint) -> Self {
        let po = Octonion::from(p.vec());
        let f = std::array::from_fn(|i| (po * Octonion::basis(i + 1)).to_vec8());
        Self { base: *p, f }
    }

    pub fn from_vectors(p: &SpherePoint, f: [Vec8; 7]) -> Result<Self> {
        let mut m = SMatrix::<f64, 8, 8>::zeros();
        m.set_column(0, p.vec());
        for (i, v) in f.iter().enumerate() {
            m.set_column(i + 1, v);
        }
        let gram = m.transpose() * m;
        let dev = (gram - SMatrix::<f64, 8, 8>::identity()).amax();
        if dev > 1e-10 {
            return Err(GeomError::DegenerateFrame(format!(
                "not orthonormal (deviation {dev:e})"
            )));
        }
        if m.determinant() < 0.0 {
            return Err(GeomError::DegenerateFrame("negatively oriented".into()));
        }
        Ok(Self { base: *p, f })
    }

    /// Frame `f'_i = Σ_j q_{ji} f_j` for `q ∈ SO(7)`.
    pub fn rotate(&self, q: &Matrix7) -> Result<Self> {
        let f = std::array::from_fn(|i| (0..7).map(|j| self.f[j] * q[(j, i)]).sum());
        Self::from_vectors(&self.base, f)
    }

    pub fn base(&self) -> &SpherePoint {
        &self.base
    }

    pub fn vectors(&self) -> &[Vec8; 7] {
        &self.f
    }

    pub fn components(&self, v: &Vec8) -> Vec7 {
        Vec7::from_fn(|i, _| self.f[i].dot(v))
    }

    pub fn ambient(&self, c: &Vec7) -> Vec8 {
        (0..7).map(|i| self.f[i] * c[i]).sum()
    }
}

/// φ_p, ψ_p and g_p in the components of an orthonormal frame.
pub fn phi_psi_at(frame: &TangentFrame) -> Result<G2Structure> {
    let p = frame.base.vec();
    let f = &frame.f;
    let phi = AltForm::from_fn(3, |ix| phi_ambient(p, &f[ix[0]], &f[ix[1]], &f[ix[2]]))?;
    G2Structure::from_3form(phi)
}

/// Levi-Civita derivative `∇_X V` at `p` of an ambient vector field, by a
/// central difference along the great circle through `p` in direction `X`
/// followed by tangential projection.
pub fn sphere_nabla<F>(
    field: F,
    x: &TangentVector,
    step: f64,
    stencil: Stencil,
) -> Result<TangentVector>
where
    F: Fn(&SpherePoint) -> Vec8,
{
    fd::check_step(step)?;
    let p = x.base;
    let speed = x.v.norm();
    if speed == 0.0 {
        return Ok(TangentVector {
            base: p,
            v: Vec8::zeros(),
        });
    }
    let dir = x.v / speed;
    let d = fd::first(|t| field(&p.geodesic(&dir, t)), step, stencil);
    Ok(tangent_project(&p, &(d * speed)))
}

/// Directional derivative `X(s)` of a scalar function along a great circle.
pub fn sphere_directional<F>(f: F, x: &TangentVector, step: f64, stencil: Stencil) -> Result<f64>
where
    F: Fn(&SpherePoint) -> f64,
{
    fd::check_step(step)?;
    let speed = x.v.norm();
    if speed == 0.0 {
        return Ok(0.0);
    }
    let dir = x.v / speed;
    Ok(fd::first(|t| f(&x.base.geodesic(&dir, t)), step, stencil) * speed)
}

/// `(∇_{f_l} ω)(f_{i₁}, …, f_{i_k})` for a k-form given ambiently, with the
/// frame extended by projected-constant fields `F_a(q) = Π_q f_a`.
fn nabla_form_in_frame<const K: usize>(
    frame: &TangentFrame,
    omega: impl Fn(&Vec8, &[Vec8; K]) -> f64,
    step: f64,
    stencil: Stencil,
) -> Result<Vec<AltForm>> {
    let p = frame.base;
    let ext = |a: usize, q: &SpherePoint| -> Vec8 { *tangent_project(q, &frame.f[a]).vec() };
    let mut out = Vec::with_capacity(7);
    for l in 0..7 {
        let x = TangentVector {
            base: p,
            v: frame.f[l],
        };
        let nabla_f: Vec<Vec8> = (0..7)
            .map(|a| sphere_nabla(|q| ext(a, q), &x, step, stencil).map(|t| t.v))
            .collect::<Result<_>>()?;
        let form = AltForm::from_fn(K, |ix| {
            let along = |q: &SpherePoint| {
                let args: [Vec8; K] = std::array::from_fn(|s| ext(ix[s], q));
                omega(q.vec(), &args)
            };
            let raw = sphere_directional(along, &x, step, stencil).unwrap_or(f64::NAN);
            let mut correction = 0.0;
            for slot in 0..K {
                let args: [Vec8; K] = std::array::from_fn(|s| {
                    if s == slot {
                        nabla_f[ix[s]]
                    } else {
                        frame.f[ix[s]]
                    }
                });
                correction += omega(p.vec(), &args);
            }
            raw - correction
        })?;
        out.push(form);
    }
    Ok(out)
}

/// `∇_l φ` for `l = 1..7`, as 3-forms in frame components.
pub fn nabla_phi_at(frame: &TangentFrame, step: f64, stencil: Stencil) -> Result<Vec<AltForm>> {
    nabla_form_in_frame::<3>(frame, |q, a| phi_ambient(q, &a[0], &a[1], &a[2]), step, stencil)
}

/// `∇_l ψ` for `l = 1..7`, as 4-forms in frame components.
pub fn nabla_psi_at(frame: &TangentFrame, step: f64, stencil: Stencil) -> Result<Vec<AltForm>> {
    nabla_form_in_frame::<4>(frame, |_, a| psi_ambient(&a[0], &a[1], &a[2], &a[3]), step, stencil)
}

/// Full torsion tensor in an orthonormal frame.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionTensor {
    pub t: Matrix7,
    pub frame: TangentFrame,
}

/// `T_lm = (1/24) (∇_l φ_abc) ψ_mabc` from finite-difference `∇φ`.
pub fn torsion_in_frame(frame: &TangentFrame, step: f64, stencil: Stencil) -> Result<TorsionTensor> {
    let s = phi_psi_at(frame)?;
    let nabla = nabla_phi_at(frame, step, stencil)?;
    Ok(TorsionTensor {
        t: torsion_from_nabla_phi(&nabla, &s),
        frame: frame.clone(),
    })
}

pub fn torsion_at(p: &SpherePoint, step: f64, stencil: Stencil) -> Result<TorsionTensor> {
    torsion_in_frame(&TangentFrame::octonionic(p), step, stencil)
}

/// Contraction `T_lm = (1/24) ∇_lφ_abc ψ_mijk g^{ia} g^{jb} g^{kc}`.
pub fn torsion_from_nabla_phi(nabla_phi: &[AltForm], s: &G2Structure) -> Matrix7 {
    let g = s.metric();
    let mut t = Matrix7::zeros();
    for (l, np) in nabla_phi.iter().enumerate() {
        let up = g.raise(np);
        let up = AltForm::from_coeffs(3, up).expect("degree 3");
        for m in 0..7 {
            // Σ over a<b<c counts each of the 6 orderings once.
            t[(l, m)] = up
                .terms()
                .map(|(ix, c)| c * s.psi().component(&[m, ix[0], ix[1], ix[2]]))
                .sum::<f64>()
                / 4.0;
        }
    }
    t
}

/// `max |∇_iφ_jkl − T_im g^{mp} ψ_pjkl|`.
pub fn torsion1_residual(nabla_phi: &[AltForm], t: &Matrix7, s: &G2Structure) -> f64 {
    let tg = t * s.metric().inverse();
    let mut worst: f64 = 0.0;
    for (i, np) in nabla_phi.iter().enumerate() {
        for (ix, c) in np.terms() {
            let rhs: f64 = (0..7)
                .map(|p| tg[(i, p)] * s.psi().component(&[p, ix[0], ix[1], ix[2]]))
                .sum();
            worst = worst.max((c - rhs).abs());
        }
    }
    worst
}

/// `max |∇_mψ_ijkl + T_mi φ_jkl − T_mj φ_ikl + T_mk φ_ijl − T_ml φ_ijk|`.
pub fn torsion3_residual(nabla_psi: &[AltForm], t: &Matrix7, s: &G2Structure) -> f64 {
    let phi = s.phi();
    let mut worst: f64 = 0.0;
    for (m, np) in nabla_psi.iter().enumerate() {
        for (ix, c) in np.terms() {
            let (i, j, k, l) = (ix[0], ix[1], ix[2], ix[3]);
            let r = c + t[(m, i)] * phi.component(&[j, k, l]) - t[(m, j)] * phi.component(&[i, k, l])
                + t[(m, k)] * phi.component(&[i, j, l])
                - t[(m, l)] * phi.component(&[i, j, k]);
            worst = worst.max(r.abs());
        }
    }
    worst
}

/// Torsion forms (τ₀, τ₁, τ₂, τ₃) with
/// `T = (τ₀/4) g − (τ₃) + (τ₁) − ½ (τ₂)`, where `(τ₃)` is the symmetric
/// tensor `h` with `τ₃ = i(h)` and `(τ₁)`, `(τ₂)` are read as matrices.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionForms {
    pub tau0: f64,
    pub tau1: AltForm,
    pub tau2: AltForm,
    pub tau3: AltForm,
}

pub fn two_form_to_matrix(beta: &AltForm) -> Matrix7 {
    let mut m = Matrix7::zeros();
    for (ix, c) in beta.terms() {
        m[(ix[0], ix[1])] = c;
        m[(ix[1], ix[0])] = -c;
    }
    m
}

pub fn matrix_to_two_form(m: &Matrix7) -> AltForm {
    AltForm::from_fn(2, |ix| 0.5 * (m[(ix[0], ix[1])] - m[(ix[1], ix[0])])).expect("degree 2")
}

pub fn torsion_forms(t: &Matrix7, s: &G2Structure) -> Result<TorsionForms> {
    let g = s.metric();
    let sym = (t + t.transpose()) * 0.5;
    let tau0 = 4.0 / 7.0 * (g.inverse() * sym).trace();
    let traceless = sym - g.matrix() * (tau0 / 4.0);
    let tau3 = s.project3(&s.sym2_to_3form(&Sym2::new(-traceless)?))?.twenty_seven;
    let (seven, fourteen) = s.project2(&matrix_to_two_form(t))?;
    Ok(TorsionForms {
        tau0,
        tau1: seven,
        tau2: &fourteen * -2.0,
        tau3,
    })
}

impl TorsionForms {
    pub fn recompose(&self, s: &G2Structure) -> Result<Matrix7> {
        let h3 = s.three_form_to_sym2(&self.tau3)?;
        Ok(s.metric().matrix() * (self.tau0 / 4.0) - h3.matrix()
            + two_form_to_matrix(&self.tau1)
            - two_form_to_matrix(&self.tau2) * 0.5)
    }

    /// `(|τ₁|, |τ₂|, |τ₃|)` in the form norm of the metric.
    pub fn norms(&self, g: &MetricTensor) -> (f64, f64, f64) {
        (g.norm(&self.tau1), g.norm(&self.tau2), g.norm(&self.tau3))
    }
}

/// Ricci and scalar curvature of a nearly G₂ metric: `(3/8) τ₀² g` and `(21/8) τ₀²`.
pub fn nearly_curvature(tau0: f64, g: &MetricTensor) -> (Matrix7, f64) {
    (g.matrix() * (3.0 / 8.0 * tau0 * tau0), 21.0 / 8.0 * tau0 * tau0)
}

/// Ricci tensor from the full torsion:
/// `R_jk = (∇_iT_jm − ∇_jT_im) φ_nkl g^{mn} g^{il} − T_jl g^{li} T_ik + tr(T) T_jk
///        − T_jb T_ia g^{il} g^{ap} ψ_lpqk g^{bq}`,
/// with `nabla_t[i][(j, m)] = ∇_i T_jm`.
pub fn ricci_from_torsion(t: &Matrix7, nabla_t: &[Matrix7; 7], s: &G2Structure) -> Matrix7 {
    let gi = s.metric().inverse();
    let phi = s.phi().to_dense();
    let psi = s.psi().to_dense();
    let tr = (gi * t).trace();
    let mut r = t * gi * t * -1.0 + t * tr;
    // φ^m_k^i = g^{mn} g^{il} φ_nkl
    let mut phi_up = vec![0.0; 343];
    for m in 0..7 {
        for k in 0..7 {
            for i in 0..7 {
                let mut acc = 0.0;
                for n in 0..7 {
                    for l in 0..7 {
                        acc += gi[(m, n)] * gi[(i, l)] * phi[n * 49 + k * 7 + l];
                    }
                }
                phi_up[m * 49 + k * 7 + i] = acc;
            }
        }
    }
    let u = t * gi;
    let v = gi * t * gi;
    for j in 0..7 {
        for k in 0..7 {
            let mut acc = 0.0;
            for i in 0..7 {
                for m in 0..7 {
                    acc += (nabla_t[i][(j, m)] - nabla_t[j][(i, m)]) * phi_up[m * 49 + k * 7 + i];
                }
            }
            for q in 0..7 {
                for l in 0..7 {
                    for p in 0..7 {
                        acc -= u[(j, q)] * v[(l, p)] * psi[((l * 7 + p) * 7 + q) * 7 + k];
                    }
                }
            }
            r[(j, k)] += acc;
        }
    }
    r
}

/// Summary of the torsion extracted at seeded random points of S⁷.
#[derive(Clone, Debug, PartialEq)]
pub struct TorsionSurvey {
    pub points: usize,
    /// Mean and maximum of `‖T − g‖` (Frobenius, orthonormal frame).
    pub mean_t_deviation: f64,
    pub max_t_deviation: f64,
    pub mean_tau0: f64,
    pub max_tau0_deviation: f64,
    pub max_tau1: f64,
    pub max_tau2: f64,
    pub max_tau3: f64,
}

pub fn torsion_survey(samples: usize, seed: u64, step: f64, stencil: Stencil) -> Result<TorsionSurvey> {
    use rand::SeedableRng;
    fd::check_step(step)?;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut out = TorsionSurvey {
        points: samples,
        mean_t_deviation: 0.0,
        max_t_deviation: 0.0,
        mean_tau0: 0.0,
        max_tau0_deviation: 0.0,
        max_tau1: 0.0,
        max_tau2: 0.0,
        max_tau3: 0.0,
    };
    for _ in 0..samples {
        let p = SpherePoint::random(&mut rng);
        let tt = torsion_at(&p, step, stencil)?;
        let s = phi_psi_at(&tt.frame)?;
        let dev = (tt.t - s.metric().matrix()).norm();
        let forms = torsion_forms(&tt.t, &s)?;
        let (n1, n2, n3) = forms.norms(s.metric());
        out.mean_t_deviation += dev / samples as f64;
        out.max_t_deviation = out.max_t_deviation.max(dev);
        out.mean_tau0 += forms.tau0 / samples as f64;
        out.max_tau0_deviation = out.max_tau0_deviation.max((forms.tau0 - TAU0).abs());
        out.max_tau1 = out.max_tau1.max(n1);
        out.max_tau2 = out.max_tau2.max(n2);
        out.max_tau3 = out.max_tau3.max(n3);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::phi0;
    use crate::octonion::cross2;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn e8(i: usize) -> Vec8 {
        Vec8::from_fn(|r, _| if r == i { 1.0 } else { 0.0 })
    }

    #[test]
    fn point_and_tangent_validation() {
        assert!(SpherePoint::new(e8(0) * 1.001).is_err());
        let p = SpherePoint::new(e8(0)).unwrap();
        assert!(TangentVector::new(p, e8(0)).is_err());
        assert!(TangentVector::new(p, e8(3)).is_ok());
        assert_eq!(tangent_project(&p, p.vec()).vec(), &Vec8::zeros());
        let v = Vec8::from([0.3, 1.0, -2.0, 0.0, 0.5, 0.0, 0.1, 0.2]);
        let once = tangent_project(&p, &v);
        let twice = tangent_project(&p, once.vec());
        assert_eq!(once, twice);
    }

    #[test]
    fn restricts_to_flat_cross_product_at_real_unit() {
        let p = SpherePoint::real_unit();
        let u = TangentVector::new(p, e8(1)).unwrap();
        let v = TangentVector::new(p, e8(2)).unwrap();
        assert_eq!(cross_s7(&p, &u, &v).unwrap().vec(), &e8(3));
        let a = Vec7::from([0.2, -1.0, 0.3, 0.7, 0.0, 1.1, -0.4]);
        let b = Vec7::from([1.0, 0.5, -0.5, 0.0, 0.9, 0.3, 0.2]);
        let lift = |x: &Vec7| Vec8::from_fn(|i, _| if i == 0 { 0.0 } else { x[i - 1] });
        let c = cross_at(p.vec(), &lift(&a), &lift(&b));
        assert_abs_diff_eq!(c, lift(&cross2(&a, &b)), epsilon = 1e-14);
    }

    #[test]
    fn base_mismatch_is_an_error() {
        let p = SpherePoint::real_unit();
        let q = SpherePoint::new(e8(1)).unwrap();
        let u = TangentVector::new(p, e8(2)).unwrap();
        let v = TangentVector::new(q, e8(2)).unwrap();
        assert_eq!(cross_s7(&p, &u, &v), Err(GeomError::BaseMismatch));
    }

    #[test]
    fn frame_at_real_unit_reproduces_phi0() {
        let frame = TangentFrame::octonionic(&SpherePoint::real_unit());
        for i in 0..7 {
            assert_eq!(frame.vectors()[i], e8(i + 1));
        }
        let s = phi_psi_at(&frame).unwrap();
        assert!((s.phi() - &phi0()).max_abs() < 1e-14);
        assert_abs_diff_eq!(*s.metric().matrix(), Matrix7::identity(), epsilon = 1e-12);
    }

    #[test]
    fn bad_frames_rejected() {
        let p = SpherePoint::real_unit();
        let mut f = *TangentFrame::octonionic(&p).vectors();
        f.swap(0, 1);
        assert!(matches!(
            TangentFrame::from_vectors(&p, f),
            Err(GeomError::DegenerateFrame(_))
        ));
        f[0] = f[1];
        assert!(TangentFrame::from_vectors(&p, f).is_err());
    }

    #[test]
    fn nabla_of_projected_constant_field() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let p = SpherePoint::random(&mut rng);
            let c = Vec8::from_fn(|_, _| rng.sample(StandardNormal));
            let x = TangentVector::random(&mut rng, p);
            for st in [Stencil::Second, Stencil::Fourth] {
                let d = sphere_nabla(|q| *tangent_project(q, &c).vec(), &x, 1e-4, st).unwrap();
                let expected = x.vec() * -c.dot(p.vec());
                assert!((d.vec() - expected).norm() < 1e-7);
                assert!(d.vec().dot(p.vec()).abs() < 1e-12);
            }
            let z = sphere_nabla(|_| Vec8::zeros(), &x, 1e-4, Stencil::Second).unwrap();
            assert_eq!(z.vec(), &Vec8::zeros());
        }
        let x = TangentVector::new(SpherePoint::real_unit(), e8(1)).unwrap();
        assert_eq!(
            sphere_nabla(|_| Vec8::zeros(), &x, 0.0, Stencil::Second),
            Err(GeomError::NonPositiveStep(0.0))
        );
    }

    #[test]
    fn torsion_of_round_sphere_is_the_metric() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let p = SpherePoint::random(&mut rng);
            let step = 1e-3;
            let t = torsion_at(&p, step, Stencil::Second).unwrap();
            assert!((t.t - Matrix7::identity()).amax() <= 10.0 * step * step);
            assert_abs_diff_eq!(t.t.trace(), 7.0, epsilon = 1e-5);
            assert!((t.t - t.t.transpose()).amax() < 1e-6);
        }
    }

    #[test]
    fn psi_is_the_dual_of_phi_in_each_frame() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = SpherePoint::random(&mut rng);
        let frame = TangentFrame::octonionic(&p);
        let s = phi_psi_at(&frame).unwrap();
        let f = frame.vectors();
        let direct = AltForm::from_fn(4, |ix| psi_ambient(&f[ix[0]], &f[ix[1]], &f[ix[2]], &f[ix[3]]))
            .unwrap();
        assert!((&direct - s.psi()).max_abs() < 1e-12);
        let w = s.psi().wedge(s.phi()).unwrap();
        assert!((&w - &(&s.metric().volume_form() * 7.0)).max_abs() < 1e-12);
    }

    #[test]
    fn torsion_identities_hold() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let p = SpherePoint::random(&mut rng);
        let frame = TangentFrame::octonionic(&p);
        let s = phi_psi_at(&frame).unwrap();
        let np = nabla_phi_at(&frame, 1e-3, Stencil::Fourth).unwrap();
        let nq = nabla_psi_at(&frame, 1e-3, Stencil::Fourth).unwrap();
        let g = Matrix7::identity();
        assert!(torsion1_residual(&np, &g, &s) < 1e-9);
        assert!(torsion3_residual(&nq, &g, &s) < 1e-9);
        assert!(torsion3_residual(&nq, &(g * 1.1), &s) > 0.05);
    }

    #[test]
    fn torsion_forms_examples() {
        let s = G2Structure::standard();
        let f = torsion_forms(&Matrix7::identity(), &s).unwrap();
        assert_abs_diff_eq!(f.tau0, 4.0, epsilon = 1e-14);
        let (a, b, c) = f.norms(s.metric());
        assert!(a < 1e-14 && b < 1e-14 && c < 1e-14);
        let z = torsion_forms(&Matrix7::zeros(), &s).unwrap();
        assert_eq!(z.tau0, 0.0);
        assert_eq!(z.norms(s.metric()), (0.0, 0.0, 0.0));
    }

    #[test]
    fn curvature_of_round_sphere() {
        let g = MetricTensor::identity();
        let (ric, scal) = nearly_curvature(TAU0, &g);
        assert_eq!(ric, Matrix7::identity() * 6.0);
        assert_eq!(scal, 42.0);
        assert_eq!(nearly_curvature(0.0, &g).1, 0.0);
        let s = G2Structure::standard();
        let zero = [Matrix7::zeros(); 7];
        let r = ricci_from_torsion(&Matrix7::identity(), &zero, &s);
        assert_abs_diff_eq!(r, Matrix7::identity() * 6.0, epsilon = 1e-12);
    }

    fn so7() -> impl Strategy<Value = Matrix7> {
        proptest::collection::vec(-1.0f64..1.0, 49).prop_map(|v| {
            let a = Matrix7::from_column_slice(&v);
            (a - a.transpose()).exp()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn cross_product_axioms_pointwise(seed in any::<u64>()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = SpherePoint::random(&mut rng);
            let u = TangentVector::random(&mut rng, p);
            let v = TangentVector::random(&mut rng, p);
            let w = TangentVector::random(&mut rng, p);
            let b = |x: &TangentVector, y: &TangentVector| *cross_s7(&p, x, y).unwrap().vec();
            let (uu, vv, ww) = (u.vec(), v.vec(), w.vec());
            let c = b(&u, &v);
            prop_assert!(c.dot(p.vec()).abs() < 1e-12 && c.dot(uu).abs() < 1e-12 && c.dot(vv).abs() < 1e-12);
            let wedge = uu.norm_squared() * vv.norm_squared() - uu.dot(vv).powi(2);
            prop_assert!((c.norm_squared() - wedge).abs() < 1e-10 * (1.0 + wedge));
            prop_assert!(b(&u, &u).norm() < 1e-14);
            prop_assert!((uu.dot(&b(&v, &w)) - c.dot(ww)).abs() < 1e-11);
            let uc = TangentVector::new(p, c).unwrap();
            let malcev = b(&u, &uc) + vv * uu.norm_squared() - uu * uu.dot(vv);
            prop_assert!(malcev.norm() < 1e-10);
            let vw = TangentVector::new(p, b(&v, &w)).unwrap();
            let uw = TangentVector::new(p, b(&u, &w)).unwrap();
            let cp2 = b(&u, &vw) + b(&v, &uw) - vv * uu.dot(ww) - uu * vv.dot(ww) + ww * (2.0 * uu.dot(vv));
            prop_assert!(cp2.norm() < 1e-10);
        }

        #[test]
        fn torsion_form_recomposition(v in proptest::collection::vec(-2.0f64..2.0, 49), rho in so7()) {
            let t = Matrix7::from_column_slice(&v);
            for s in [G2Structure::standard(), G2Structure::from_3form(phi0().pullback(&(rho * 1.3))).unwrap()] {
                let f = torsion_forms(&t, &s).unwrap();
                prop_assert!((f.recompose(&s).unwrap() - t).amax() < 1e-10);
                let p = s.project2(&f.tau1).unwrap();
                prop_assert!(p.1.max_abs() < 1e-10);
                let q = s.project2(&f.tau2).unwrap();
                prop_assert!(q.0.max_abs() < 1e-10);
                let r = s.project3(&f.tau3).unwrap();
                prop_assert!(r.one.max_abs() < 1e-10 && r.seven.max_abs() < 1e-10);
            }
        }

        #[test]
        fn torsion_norms_are_frame_independent(seed in any::<u64>(), q in so7()) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let p = SpherePoint::random(&mut rng);
            let frame = TangentFrame::octonionic(&p);
            let rotated = frame.rotate(&q).unwrap();
            let t = Matrix7::from_fn(|i, j| ((i * 3 + j * 5) % 7) as f64 * 0.1);
            // The same tensor expressed in the rotated frame.
            let t_rot = q.transpose() * t * q;
            let s1 = phi_psi_at(&frame).unwrap();
            let s2 = phi_psi_at(&rotated).unwrap();
            let a = torsion_forms(&t, &s1).unwrap();
            let b = torsion_forms(&t_rot, &s2).unwrap();
            let (n1, n2) = (a.norms(s1.metric()), b.norms(s2.metric()));
            prop_assert!((a.tau0 - b.tau0).abs() < 1e-9);
            prop_assert!((n1.0 - n2.0).abs() < 1e-9 && (n1.1 - n2.1).abs() < 1e-9 && (n1.2 - n2.2).abs() < 1e-9);
        }
    }
}
