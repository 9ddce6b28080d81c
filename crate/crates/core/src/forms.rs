//! Dense alternating forms on a 7-dimensional inner-product space.
//!
//! A k-form is stored by its components on strictly increasing multi-indices
//! `i₁ < … < i_k` (0-based). Multi-indices are encoded as 7-bit masks; the
//! per-degree lists are built once and shared.

use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::sync::OnceLock;

use nalgebra::{Cholesky, SMatrix};

use crate::error::{GeomError, Result};
use crate::octonion::Vec7;

pub const DIM: usize = 7;

pub type Matrix7 = SMatrix<f64, 7, 7>;

struct Tables {
    masks: [Vec<u8>; DIM + 1],
    pos: [usize; 1 << DIM],
}

fn tables() -> &'static Tables {
    static T: OnceLock<Tables> = OnceLock::new();
    T.get_or_init(|| {
        let mut masks: [Vec<u8>; DIM + 1] = Default::default();
        let mut pos = [0usize; 1 << DIM];
        for m in 0u8..(1 << DIM) {
            masks[m.count_ones() as usize].push(m);
        }
        for list in masks.iter_mut() {
            list.sort_by_key(|&m| mask_indices(m));
            for (p, &m) in list.iter().enumerate() {
                pos[m as usize] = p;
            }
        }
        Tables { masks, pos }
    })
}

fn mask_indices(m: u8) -> Vec<usize> {
    (0..DIM).filter(|i| m & (1 << i) != 0).collect()
}

/// Sign of the permutation that sorts the concatenation (a, b) of two
/// disjoint increasing index sets.
fn merge_sign(a: u8, b: u8) -> f64 {
    let mut inversions = 0u32;
    for j in 0..DIM {
        if b & (1 << j) != 0 {
            inversions += (a >> (j + 1)).count_ones();
        }
    }
    if inversions % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

pub fn binomial7(k: usize) -> usize {
    tables().masks.get(k).map_or(0, Vec::len)
}

/// Strictly increasing 0-based multi-indices of the given degree, in storage order.
pub fn multi_indices(degree: usize) -> Vec<Vec<usize>> {
    tables().masks[degree].iter().map(|&m| mask_indices(m)).collect()
}

/// Sort `ix` in place and return the permutation sign, or `None` on a repeat.
fn canonicalize(ix: &[usize]) -> Option<(u8, f64)> {
    let mut v = ix.to_vec();
    let mut sign = 1.0;
    for i in 0..v.len() {
        for j in 0..v.len().saturating_sub(i + 1) {
            if v[j] > v[j + 1] {
                v.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    let mut mask = 0u8;
    for w in v.windows(2) {
        if w[0] == w[1] {
            return None;
        }
    }
    for &i in &v {
        if i >= DIM {
            return None;
        }
        mask |= 1 << i;
    }
    Some((mask, sign))
}

#[derive(Clone, Debug, PartialEq)]
pub struct AltForm {
    degree: usize,
    coeffs: Vec<f64>,
}

impl AltForm {
    pub fn zero(degree: usize) -> Result<Self> {
        if degree > DIM {
            return Err(GeomError::InvalidDegree(degree));
        }
        Ok(Self {
            degree,
            coeffs: vec![0.0; binomial7(degree)],
        })
    }

    pub fn scalar(c: f64) -> Self {
        Self {
            degree: 0,
            coeffs: vec![c],
        }
    }

    /// Build a form from terms `(indices, coefficient)`. Indices are 0-based in
    /// any order; a term is antisymmetrized into canonical position and terms
    /// with a repeated index vanish.
    pub fn from_terms(degree: usize, terms: &[(&[usize], f64)]) -> Result<Self> {
        let mut f = Self::zero(degree)?;
        for (ix, c) in terms {
            if ix.len() != degree {
                return Err(GeomError::WrongDegree {
                    expected: "term length equal to degree",
                    got: ix.len(),
                });
            }
            if let Some((mask, sign)) = canonicalize(ix) {
                f.coeffs[tables().pos[mask as usize]] += sign * c;
            }
        }
        Ok(f)
    }

    pub fn from_coeffs(degree: usize, coeffs: Vec<f64>) -> Result<Self> {
        if degree > DIM {
            return Err(GeomError::InvalidDegree(degree));
        }
        if coeffs.len() != binomial7(degree) {
            return Err(GeomError::InvalidArgument(format!(
                "{} coefficients for a degree-{degree} form",
                coeffs.len()
            )));
        }
        Ok(Self { degree, coeffs })
    }

    /// The basis form e^{i₁…i_k} (0-based indices, any order).
    pub fn basis(indices: &[usize]) -> Result<Self> {
        Self::from_terms(indices.len(), &[(indices, 1.0)])
    }

    /// Build a form from its values on canonical increasing multi-indices.
    pub fn from_fn(degree: usize, mut f: impl FnMut(&[usize]) -> f64) -> Result<Self> {
        if degree > DIM {
            return Err(GeomError::InvalidDegree(degree));
        }
        let coeffs = tables().masks[degree]
            .iter()
            .map(|&m| f(&mask_indices(m)))
            .collect();
        Ok(Self { degree, coeffs })
    }

    /// Fully antisymmetric array of all `7^k` components, row-major.
    pub fn to_dense(&self) -> Vec<f64> {
        let k = self.degree;
        let mut out = vec![0.0; 7usize.pow(k as u32)];
        let perms = signed_permutations(k);
        for (&m, &c) in tables().masks[k].iter().zip(&self.coeffs) {
            if c == 0.0 {
                continue;
            }
            let ix = mask_indices(m);
            for (perm, s) in &perms {
                let flat = perm.iter().fold(0, |acc, &p| acc * 7 + ix[p]);
                out[flat] = s * c;
            }
        }
        out
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Component on an arbitrary (not necessarily increasing) index tuple.
    pub fn component(&self, ix: &[usize]) -> f64 {
        if ix.len() != self.degree {
            return 0.0;
        }
        match canonicalize(ix) {
            Some((mask, sign)) => sign * self.coeffs[tables().pos[mask as usize]],
            None => 0.0,
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        tables().masks[self.degree]
            .iter()
            .zip(&self.coeffs)
            .map(|(&m, &c)| (mask_indices(m), c))
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().fold(0.0, |a, c| a.max(c.abs()))
    }

    /// Euclidean norm of the canonical coefficients (the g₀-norm).
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn wedge(&self, other: &AltForm) -> Result<AltForm> {
        let k = self.degree + other.degree;
        if k > DIM {
            return Err(GeomError::DegreeOverflow {
                left: self.degree,
                right: other.degree,
            });
        }
        let t = tables();
        let mut out = vec![0.0; binomial7(k)];
        for (&ma, &ca) in t.masks[self.degree].iter().zip(&self.coeffs) {
            if ca == 0.0 {
                continue;
            }
            for (&mb, &cb) in t.masks[other.degree].iter().zip(&other.coeffs) {
                if cb == 0.0 || ma & mb != 0 {
                    continue;
                }
                out[t.pos[(ma | mb) as usize]] += merge_sign(ma, mb) * ca * cb;
            }
        }
        Ok(AltForm {
            degree: k,
            coeffs: out,
        })
    }

    /// Interior product `X ⌟ a`, contracting the first slot.
    pub fn interior(&self, x: &Vec7) -> Result<AltForm> {
        if self.degree == 0 {
            return Err(GeomError::InteriorOfScalar);
        }
        let t = tables();
        let mut out = vec![0.0; binomial7(self.degree - 1)];
        for (&m, &c) in t.masks[self.degree].iter().zip(&self.coeffs) {
            if c == 0.0 {
                continue;
            }
            for i in 0..DIM {
                if m & (1 << i) == 0 {
                    continue;
                }
                let below = (m & ((1u8 << i) - 1)).count_ones();
                let sign = if below % 2 == 0 { 1.0 } else { -1.0 };
                out[t.pos[(m & !(1 << i)) as usize]] += sign * x[i] * c;
            }
        }
        Ok(AltForm {
            degree: self.degree - 1,
            coeffs: out,
        })
    }

    /// `a(v₁, …, v_k)`.
    pub fn evaluate(&self, vectors: &[Vec7]) -> f64 {
        assert_eq!(vectors.len(), self.degree, "argument count must match degree");
        let t = tables();
        let mut sum = 0.0;
        for (&m, &c) in t.masks[self.degree].iter().zip(&self.coeffs) {
            if c == 0.0 {
                continue;
            }
            let rows = mask_indices(m);
            sum += c * small_det(self.degree, |r, col| vectors[col][rows[r]]);
        }
        sum
    }

    /// Pullback `ρ*a`, with `(ρ*a)(v, …) = a(ρv, …)`.
    pub fn pullback(&self, rho: &Matrix7) -> AltForm {
        let t = tables();
        let list = &t.masks[self.degree];
        let mut out = vec![0.0; list.len()];
        for (oi, &mi) in list.iter().enumerate() {
            let cols = mask_indices(mi);
            let mut acc = 0.0;
            for (&mk, &c) in list.iter().zip(&self.coeffs) {
                if c == 0.0 {
                    continue;
                }
                let rows = mask_indices(mk);
                acc += c * small_det(self.degree, |r, s| rho[(rows[r], cols[s])]);
            }
            out[oi] = acc;
        }
        AltForm {
            degree: self.degree,
            coeffs: out,
        }
    }

    fn zip_with(&self, other: &AltForm, f: impl Fn(f64, f64) -> f64) -> AltForm {
        assert_eq!(self.degree, other.degree, "degree mismatch");
        AltForm {
            degree: self.degree,
            coeffs: self
                .coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| f(*a, *b))
                .collect(),
        }
    }
}

impl Add for &AltForm {
    type Output = AltForm;
    fn add(self, rhs: &AltForm) -> AltForm {
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl Sub for &AltForm {
    type Output = AltForm;
    fn sub(self, rhs: &AltForm) -> AltForm {
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl AddAssign<&AltForm> for AltForm {
    fn add_assign(&mut self, rhs: &AltForm) {
        assert_eq!(self.degree, rhs.degree, "degree mismatch");
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl Mul<f64> for &AltForm {
    type Output = AltForm;
    fn mul(self, rhs: f64) -> AltForm {
        AltForm {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * rhs).collect(),
        }
    }
}

impl Neg for &AltForm {
    type Output = AltForm;
    fn neg(self) -> AltForm {
        self * -1.0
    }
}

fn signed_permutations(k: usize) -> Vec<(Vec<usize>, f64)> {
    if k == 0 {
        return vec![(vec![], 1.0)];
    }
    let mut out = Vec::new();
    for (p, s) in signed_permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            let sign = if (k - 1 - pos) % 2 == 0 { s } else { -s };
            out.push((q, sign));
        }
    }
    out
}

/// Determinant of a k×k matrix given by an accessor, k ≤ 7, by elimination
/// with partial pivoting.
fn small_det(k: usize, entry: impl Fn(usize, usize) -> f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut a = [[0.0f64; DIM]; DIM];
    for (r, row) in a.iter_mut().enumerate().take(k) {
        for (c, v) in row.iter_mut().enumerate().take(k) {
            *v = entry(r, c);
        }
    }
    let mut det = 1.0;
    for col in 0..k {
        let piv = (col..k)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        if a[piv][col] == 0.0 {
            return 0.0;
        }
        if piv != col {
            a.swap(piv, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..k {
            let f = a[r][col] / a[col][col];
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

/// Riemannian metric on the 7-dimensional space together with an orientation.
///
/// The volume form is `orientation · √det g · e¹²³⁴⁵⁶⁷`.
#[derive(Clone, Debug, PartialEq)]
pub struct MetricTensor {
    g: Matrix7,
    inv: Matrix7,
    volume: f64,
    orientation: f64,
    identity: bool,
}

impl MetricTensor {
    pub fn identity() -> Self {
        Self {
            g: Matrix7::identity(),
            inv: Matrix7::identity(),
            volume: 1.0,
            orientation: 1.0,
            identity: true,
        }
    }

    /// Positively oriented metric; fails unless `g` is symmetric positive definite.
    pub fn new(g: Matrix7) -> Result<Self> {
        let scale = g.amax().max(1.0);
        if (g - g.transpose()).amax() > 1e-12 * scale {
            return Err(GeomError::NotPositiveDefinite);
        }
        let g = (g + g.transpose()) * 0.5;
        let chol = Cholesky::new(g).ok_or(GeomError::NotPositiveDefinite)?;
        let inv = chol.inverse();
        let det = chol.determinant();
        Ok(Self {
            g,
            inv,
            volume: det.sqrt(),
            orientation: 1.0,
            identity: g == Matrix7::identity(),
        })
    }

    /// Same metric with the orientation set to the sign of `orientation`.
    pub fn with_orientation(mut self, orientation: f64) -> Self {
        self.orientation = if orientation < 0.0 { -1.0 } else { 1.0 };
        self
    }

    pub fn matrix(&self) -> &Matrix7 {
        &self.g
    }

    pub fn inverse(&self) -> &Matrix7 {
        &self.inv
    }

    /// `√det g`, always positive.
    pub fn volume(&self) -> f64 {
        self.volume
    }

    /// +1 if the volume form is a positive multiple of e¹²³⁴⁵⁶⁷, else −1.
    pub fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn volume_form(&self) -> AltForm {
        AltForm::scalar(self.orientation * self.volume)
            .wedge(&AltForm::basis(&[0, 1, 2, 3, 4, 5, 6]).unwrap())
            .unwrap()
    }

    /// Components of `a` with all indices raised, on canonical multi-indices.
    pub fn raise(&self, a: &AltForm) -> Vec<f64> {
        if self.identity {
            return a.coeffs.clone();
        }
        let t = tables();
        let list = &t.masks[a.degree];
        let idx: Vec<Vec<usize>> = list.iter().map(|&m| mask_indices(m)).collect();
        let mut out = vec![0.0; list.len()];
        for (oi, ri) in idx.iter().enumerate() {
            out[oi] = idx
                .iter()
                .zip(&a.coeffs)
                .filter(|(_, c)| **c != 0.0)
                .map(|(rk, c)| c * small_det(a.degree, |r, s| self.inv[(ri[r], rk[s])]))
                .sum();
        }
        out
    }

    pub fn inner(&self, a: &AltForm, b: &AltForm) -> f64 {
        assert_eq!(a.degree, b.degree, "degree mismatch");
        self.raise(a).iter().zip(&b.coeffs).map(|(x, y)| x * y).sum()
    }

    pub fn norm(&self, a: &AltForm) -> f64 {
        self.inner(a, a).max(0.0).sqrt()
    }

    pub fn inner_vec(&self, x: &Vec7, y: &Vec7) -> f64 {
        (x.transpose() * self.g * y)[(0, 0)]
    }

    pub fn lower(&self, x: &Vec7) -> Vec7 {
        self.g * x
    }

    pub fn raise_vec(&self, x: &Vec7) -> Vec7 {
        self.inv * x
    }

    /// Hodge star with `β ∧ ⋆α = ⟨β, α⟩ vol`.
    pub fn hodge_star(&self, a: &AltForm) -> AltForm {
        let t = tables();
        let up = self.raise(a);
        let k = a.degree;
        let full: u8 = (1 << DIM) - 1;
        let mut out = vec![0.0; binomial7(DIM - k)];
        for (&m, &c) in t.masks[k].iter().zip(&up) {
            let comp = full & !m;
            out[t.pos[comp as usize]] = self.orientation * self.volume * merge_sign(m, comp) * c;
        }
        AltForm {
            degree: DIM - k,
            coeffs: out,
        }
    }
}

/// Hodge star of `a` with respect to `g`.
pub fn hodge_star(a: &AltForm, g: &MetricTensor) -> AltForm {
    g.hodge_star(a)
}

/// Symmetric bilinear form on the 7-dimensional space.
#[derive(Clone, Debug, PartialEq)]
pub struct Sym2(Matrix7);

impl Sym2 {
    pub fn new(h: Matrix7) -> Result<Self> {
        let scale = h.amax().max(1.0);
        if (h - h.transpose()).amax() > 1e-12 * scale {
            return Err(GeomError::InvalidArgument("Sym2 requires a symmetric matrix".into()));
        }
        Ok(Self((h + h.transpose()) * 0.5))
    }

    pub fn matrix(&self) -> &Matrix7 {
        &self.0
    }

    /// `g^{ij} h_{ij}`.
    pub fn trace(&self, g: &MetricTensor) -> f64 {
        (g.inverse() * self.0).trace()
    }

    pub fn traceless(&self, g: &MetricTensor) -> Sym2 {
        Sym2(self.0 - g.matrix() * (self.trace(g) / DIM as f64))
    }
}
