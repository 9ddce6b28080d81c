//! G₂ structures on a 7-dimensional vector space: the metric and orientation
//! induced by a positive 3-form, the dual 4-form, and the irreducible
//! decompositions of Λ², Λ³, Λ⁴ and Λ⁵.
//!
//! Orientation convention: a positive 3-form φ induces the orientation in
//! which `(u⌟φ) ∧ (v⌟φ) ∧ φ = −6 g(u, v) vol`. For the flat form φ₀ that
//! orientation is opposite to `e¹²³⁴⁵⁶⁷`, so `G2Structure::standard().psi()`
//! is `−ψ₀` where `ψ₀ = ⋆φ₀` is taken with the Euclidean star in the
//! coordinate orientation. The structure's own ψ is the one satisfying the
//! contraction identities and the `−2 / +1` eigenvalue split on Λ².

use crate::error::{GeomError, Result};
use crate::forms::{binomial7, AltForm, Matrix7, MetricTensor, Sym2, DIM};
use crate::octonion::{Vec7, PHI0_TERMS};

/// Terms of `ψ₀ = ⋆φ₀` in the coordinate orientation, as (1-based index
/// quadruple, coefficient).
pub const PSI0_TERMS: [([usize; 4], i8); 7] = [
    ([4, 5, 6, 7], 1),
    ([4, 5, 2, 3], -1),
    ([4, 1, 6, 3], -1),
    ([4, 1, 2, 7], -1),
    ([2, 6, 3, 7], 1),
    ([1, 5, 3, 7], 1),
    ([1, 5, 2, 6], 1),
];

fn from_one_based<const K: usize>(terms: &[([usize; K], i8)]) -> AltForm {
    let shifted: Vec<(Vec<usize>, f64)> = terms
        .iter()
        .map(|(ix, s)| (ix.iter().map(|i| i - 1).collect(), f64::from(*s)))
        .collect();
    let refs: Vec<(&[usize], f64)> = shifted.iter().map(|(ix, s)| (&ix[..], *s)).collect();
    AltForm::from_terms(K, &refs).expect("static terms")
}

/// The flat G₂ 3-form φ₀.
pub fn phi0() -> AltForm {
    from_one_based(&PHI0_TERMS)
}

/// `ψ₀ = ⋆φ₀` for the Euclidean metric with the coordinate orientation.
pub fn psi0() -> AltForm {
    from_one_based(&PSI0_TERMS)
}

fn expect_degree(a: &AltForm, k: usize, expected: &'static str) -> Result<()> {
    if a.degree() == k {
        Ok(())
    } else {
        Err(GeomError::WrongDegree {
            expected,
            got: a.degree(),
        })
    }
}

/// The bilinear form `B_ij`, coefficient of `−⅙ (eᵢ⌟φ) ∧ (eⱼ⌟φ) ∧ φ`
/// against `e¹²³⁴⁵⁶⁷`.
pub fn s_phi(phi: &AltForm) -> Result<Matrix7> {
    expect_degree(phi, 3, "3")?;
    let hooks: Vec<AltForm> = (0..DIM)
        .map(|i| phi.interior(&Vec7::from_fn(|r, _| if r == i { 1.0 } else { 0.0 })))
        .collect::<Result<_>>()?;
    let mut b = Matrix7::zeros();
    for i in 0..DIM {
        for j in i..DIM {
            let top = hooks[i].wedge(&hooks[j])?.wedge(phi)?;
            let v = -top.coeffs()[0] / 6.0;
            b[(i, j)] = v;
            b[(j, i)] = v;
        }
    }
    Ok(b)
}

/// Metric and orientation induced by a positive 3-form.
///
/// With `B = s_phi(φ)` one has `det B = vol⁹` for the signed volume factor,
/// so `vol = sign(det B) |det B|^{1/9}` and `g = B / vol`.
pub fn metric_from_3form(phi: &AltForm) -> Result<MetricTensor> {
    let b = s_phi(phi)?;
    let det = b.determinant();
    if !det.is_finite() || det.abs() < 1e-300 {
        return Err(GeomError::NotG2Structure(format!("det S_phi = {det:e}")));
    }
    let vol = det.signum() * det.abs().powf(1.0 / 9.0);
    let g = b / vol;
    MetricTensor::new(g)
        .map(|m| m.with_orientation(vol.signum()))
        .map_err(|_| GeomError::NotG2Structure("induced bilinear form is indefinite".into()))
}

/// A G₂ structure: positive 3-form, its dual 4-form and induced metric.
#[derive(Clone, Debug, PartialEq)]
pub struct G2Structure {
    phi: AltForm,
    psi: AltForm,
    metric: MetricTensor,
}

/// Components of a 3-form in `Λ³₁ ⊕ Λ³₇ ⊕ Λ³₂₇`.
#[derive(Clone, Debug, PartialEq)]
pub struct ThreeFormParts {
    pub one: AltForm,
    pub seven: AltForm,
    pub twenty_seven: AltForm,
    /// `one = f φ`.
    pub f: f64,
    /// `seven = X ⌟ ψ`.
    pub x: Vec7,
}

/// Components of a 4- or 5-form, obtained by Hodge duality.
#[derive(Clone, Debug, PartialEq)]
pub enum HighParts {
    Four {
        one: AltForm,
        seven: AltForm,
        twenty_seven: AltForm,
    },
    Five {
        seven: AltForm,
        fourteen: AltForm,
    },
}

impl HighParts {
    pub fn sum(&self) -> AltForm {
        match self {
            HighParts::Four {
                one,
                seven,
                twenty_seven,
            } => &(one + seven) + twenty_seven,
            HighParts::Five { seven, fourteen } => seven + fourteen,
        }
    }
}

impl G2Structure {
    pub fn from_3form(phi: AltForm) -> Result<Self> {
        let metric = metric_from_3form(&phi)?;
        let psi = metric.hodge_star(&phi);
        Ok(Self { phi, psi, metric })
    }

    pub fn standard() -> Self {
        Self::from_3form(phi0()).expect("φ₀ is positive")
    }

    pub fn phi(&self) -> &AltForm {
        &self.phi
    }

    pub fn psi(&self) -> &AltForm {
        &self.psi
    }

    pub fn metric(&self) -> &MetricTensor {
        &self.metric
    }

    /// `β ↦ ⋆(φ ∧ β)` on 2-forms; eigenvalue −2 on Λ²₇ and +1 on Λ²₁₄.
    pub fn wedge_star(&self, beta: &AltForm) -> Result<AltForm> {
        Ok(self.metric.hodge_star(&self.phi.wedge(beta)?))
    }

    /// Split a 2-form into its `Λ²₇` and `Λ²₁₄` parts.
    pub fn project2(&self, beta: &AltForm) -> Result<(AltForm, AltForm)> {
        expect_degree(beta, 2, "2")?;
        let l = self.wedge_star(beta)?;
        let seven = &(beta - &l) * (1.0 / 3.0);
        let fourteen = &(&(beta * 2.0) + &l) * (1.0 / 3.0);
        Ok((seven, fourteen))
    }

    /// The vector `X` with `π₇ β = X ⌟ φ`, from `X_k = ⅙ β^{ij} φ_{ijk}`.
    pub fn two_form_vector(&self, beta: &AltForm) -> Result<Vec7> {
        expect_degree(beta, 2, "2")?;
        let up = AltForm::from_coeffs(2, self.metric.raise(beta))?;
        let mut lower = Vec7::zeros();
        for (ix, c) in up.terms() {
            for (k, slot) in lower.iter_mut().enumerate() {
                *slot += c * self.phi.component(&[ix[0], ix[1], k]) / 3.0;
            }
        }
        Ok(self.metric.raise_vec(&lower))
    }

    /// Split a 3-form into its `Λ³₁`, `Λ³₇` and `Λ³₂₇` parts.
    pub fn project3(&self, gamma: &AltForm) -> Result<ThreeFormParts> {
        expect_degree(gamma, 3, "3")?;
        let f = self.metric.inner(gamma, &self.phi) / self.metric.inner(&self.phi, &self.phi);
        let one = &self.phi * f;
        let spans: Vec<AltForm> = (0..DIM)
            .map(|m| self.psi.interior(&unit(m)))
            .collect::<Result<_>>()?;
        let mut gram = Matrix7::zeros();
        let mut rhs = Vec7::zeros();
        for m in 0..DIM {
            rhs[m] = self.metric.inner(gamma, &spans[m]);
            for n in 0..DIM {
                gram[(m, n)] = self.metric.inner(&spans[m], &spans[n]);
            }
        }
        let x = gram
            .cholesky()
            .ok_or_else(|| GeomError::NotG2Structure("degenerate Λ³₇ span".into()))?
            .solve(&rhs);
        let seven = self.psi.interior(&x)?;
        let twenty_seven = &(gamma - &one) - &seven;
        Ok(ThreeFormParts {
            one,
            seven,
            twenty_seven,
            f,
            x,
        })
    }

    /// `h ↦ h_ij g^{jl} dxⁱ ∧ (∂_l ⌟ φ)`; sends `g` to `3φ` and traceless
    /// tensors into `Λ³₂₇`.
    pub fn sym2_to_3form(&self, h: &Sym2) -> AltForm {
        let mixed = h.matrix() * self.metric.inverse();
        let mut out = AltForm::zero(3).expect("degree 3");
        for l in 0..DIM {
            let hook = self.phi.interior(&unit(l)).expect("degree 3");
            let mut one = vec![0.0; DIM];
            for (i, slot) in one.iter_mut().enumerate() {
                *slot = mixed[(i, l)];
            }
            let col = AltForm::from_coeffs(1, one).expect("degree 1");
            out += &col.wedge(&hook).expect("degree 3");
        }
        out
    }

    /// Inverse of [`Self::sym2_to_3form`] on traceless tensors:
    /// `γ ↦ ¼ γ_{abc} φ_d^{bc}` (symmetrized). In general
    /// `j(i(h)) = 4h + 2 (tr h) g` for `j` the unnormalized contraction.
    pub fn three_form_to_sym2(&self, gamma: &AltForm) -> Result<Sym2> {
        expect_degree(gamma, 3, "3")?;
        let gd = gamma.to_dense();
        let up = AltForm::from_coeffs(3, self.metric.raise(&self.phi))?.to_dense();
        let mut m = Matrix7::zeros();
        for a in 0..DIM {
            for e in 0..DIM {
                let mut acc = 0.0;
                for bc in 0..DIM * DIM {
                    acc += gd[a * 49 + bc] * up[e * 49 + bc];
                }
                m[(a, e)] = acc;
            }
        }
        let j = m * self.metric.matrix() * 0.25;
        Sym2::new((j + j.transpose()) * 0.5)
    }

    /// Decompose a 4-form or 5-form by starring into degree 3 or 2.
    pub fn decompose_high(&self, a: &AltForm) -> Result<HighParts> {
        let star = |x: &AltForm| self.metric.hodge_star(x);
        match a.degree() {
            4 => {
                let parts = self.project3(&star(a))?;
                Ok(HighParts::Four {
                    one: star(&parts.one),
                    seven: star(&parts.seven),
                    twenty_seven: star(&parts.twenty_seven),
                })
            }
            5 => {
                let (seven, fourteen) = self.project2(&star(a))?;
                Ok(HighParts::Five {
                    seven: star(&seven),
                    fourteen: star(&fourteen),
                })
            }
            d => Err(GeomError::WrongDegree {
                expected: "4 or 5",
                got: d,
            }),
        }
    }
}

fn unit(i: usize) -> Vec7 {
    let mut v = Vec7::zeros();
    v[i] = 1.0;
    v
}

pub fn project2(beta: &AltForm, phi: &AltForm) -> Result<(AltForm, AltForm)> {
    G2Structure::from_3form(phi.clone())?.project2(beta)
}

pub fn project3(gamma: &AltForm, phi: &AltForm) -> Result<ThreeFormParts> {
    G2Structure::from_3form(phi.clone())?.project3(gamma)
}

pub fn sym2_to_3form(h: &Sym2, phi: &AltForm) -> Result<AltForm> {
    Ok(G2Structure::from_3form(phi.clone())?.sym2_to_3form(h))
}

pub fn decompose_high(a: &AltForm, phi: &AltForm) -> Result<HighParts> {
    G2Structure::from_3form(phi.clone())?.decompose_high(a)
}

/// Numerical rank of the linear map given by its images of a basis of Λᵏ.
pub fn numerical_rank(images: &[AltForm], tol: f64) -> usize {
    let n = images.first().map_or(0, |a| binomial7(a.degree()));
    let cols: Vec<f64> = images.iter().flat_map(|a| a.coeffs().to_vec()).collect();
    let m = nalgebra::DMatrix::from_column_slice(n, images.len(), &cols);
    m.svd(false, false)
        .singular_values
        .iter()
        .filter(|&&s| s > tol)
        .count()
}
