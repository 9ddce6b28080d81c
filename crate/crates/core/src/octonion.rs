//! Octonion arithmetic and the 2-fold / 3-fold vector cross products.
//!
//! The multiplication table is generated from the fundamental 3-form
//!
//! ```text
//! φ₀ = e¹²³ − e¹⁶⁷ − e⁵²⁷ − e⁵⁶³ + e⁴¹⁵ + e⁴²⁶ + e⁴³⁷
//! ```
//!
//! through `eᵢ eⱼ = −δᵢⱼ + Σₖ φ₀(eᵢ, eⱼ, eₖ) eₖ`, so `Im(uv)` and `φ₀` agree
//! by construction. Structure constants are stored as exact integers.
//!
//! Component index 0 is the real part; indices 1..=7 are the imaginary units.

use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use nalgebra::SVector;

pub type Vec7 = SVector<f64, 7>;
pub type Vec8 = SVector<f64, 8>;

/// Terms of φ₀ as (1-based index triple, coefficient), in the printed order.
pub const PHI0_TERMS: [([usize; 3], i8); 7] = [
    ([1, 2, 3], 1),
    ([1, 6, 7], -1),
    ([5, 2, 7], -1),
    ([5, 6, 3], -1),
    ([4, 1, 5], 1),
    ([4, 2, 6], 1),
    ([4, 3, 7], 1),
];

const PERMS3: [([usize; 3], i8); 6] = [
    ([0, 1, 2], 1),
    ([1, 2, 0], 1),
    ([2, 0, 1], 1),
    ([1, 0, 2], -1),
    ([0, 2, 1], -1),
    ([2, 1, 0], -1),
];

const fn build_phi0() -> [[[i8; 7]; 7]; 7] {
    let mut t = [[[0i8; 7]; 7]; 7];
    let mut n = 0;
    while n < PHI0_TERMS.len() {
        let (idx, c) = PHI0_TERMS[n];
        let mut p = 0;
        while p < 6 {
            let (perm, s) = PERMS3[p];
            t[idx[perm[0]] - 1][idx[perm[1]] - 1][idx[perm[2]] - 1] = c * s;
            p += 1;
        }
        n += 1;
    }
    t
}

/// Dense φ₀ with 0-based indices: `PHI0[i][j][k] = φ₀(e_{i+1}, e_{j+1}, e_{k+1})`.
pub const PHI0: [[[i8; 7]; 7]; 7] = build_phi0();

const fn build_mul_table() -> [[(i8, usize); 8]; 8] {
    let mut t = [[(0i8, 0usize); 8]; 8];
    let mut a = 0;
    while a < 8 {
        let mut b = 0;
        while b < 8 {
            t[a][b] = if a == 0 {
                (1, b)
            } else if b == 0 {
                (1, a)
            } else if a == b {
                (-1, 0)
            } else {
                let mut k = 0;
                let mut out = (0i8, 0usize);
                while k < 7 {
                    let c = PHI0[a - 1][b - 1][k];
                    if c != 0 {
                        out = (c, k + 1);
                    }
                    k += 1;
                }
                out
            };
            b += 1;
        }
        a += 1;
    }
    t
}

/// `MUL_TABLE[a][b] = (s, c)` means `e_a e_b = s · e_c`.
pub const MUL_TABLE: [[(i8, usize); 8]; 8] = build_mul_table();

/// Octonion product on raw component arrays, generic so the same table drives
/// both floating-point and exact integer arithmetic.
pub fn mul_components<T>(a: &[T; 8], b: &[T; 8]) -> [T; 8]
where
    T: Copy + Default + AddAssign + SubAssign + Mul<Output = T>,
{
    let mut out = [T::default(); 8];
    for (i, &ai) in a.iter().enumerate() {
        for (j, &bj) in b.iter().enumerate() {
            let (s, k) = MUL_TABLE[i][j];
            match s {
                1 => out[k] += ai * bj,
                -1 => out[k] -= ai * bj,
                _ => {}
            }
        }
    }
    out
}

/// `B(u, v)` on component arrays: `Σ φ₀ᵢⱼₖ uⁱ vʲ eₖ`, summed over `i < j` so
/// that antisymmetry is exact in floating point.
pub fn cross2_components<T>(u: &[T; 7], v: &[T; 7]) -> [T; 7]
where
    T: Copy + Default + AddAssign + SubAssign + Sub<Output = T> + Mul<Output = T>,
{
    let mut out = [T::default(); 7];
    for i in 0..7 {
        for j in i + 1..7 {
            let m = u[i] * v[j] - u[j] * v[i];
            for (k, o) in out.iter_mut().enumerate() {
                match PHI0[i][j][k] {
                    1 => *o += m,
                    -1 => *o -= m,
                    _ => {}
                }
            }
        }
    }
    out
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Octonion(pub [f64; 8]);

impl Octonion {
    pub fn one() -> Self {
        Self::basis(0)
    }

    pub fn basis(i: usize) -> Self {
        let mut c = [0.0; 8];
        c[i] = 1.0;
        Self(c)
    }

    pub fn from_imaginary(v: &Vec7) -> Self {
        let mut c = [0.0; 8];
        c[1..].copy_from_slice(v.as_slice());
        Self(c)
    }

    pub fn real(&self) -> f64 {
        self.0[0]
    }

    pub fn imaginary(&self) -> Vec7 {
        Vec7::from_column_slice(&self.0[1..])
    }

    pub fn conj(&self) -> Self {
        let mut c = self.0.map(|x| -x);
        c[0] = self.0[0];
        Self(c)
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|x| x * x).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn to_vec8(&self) -> Vec8 {
        Vec8::from(self.0)
    }
}

impl From<Vec8> for Octonion {
    fn from(v: Vec8) -> Self {
        let mut c = [0.0; 8];
        c.copy_from_slice(v.as_slice());
        Self(c)
    }
}

impl From<&Vec8> for Octonion {
    fn from(v: &Vec8) -> Self {
        Self::from(*v)
    }
}

impl Mul for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: Octonion) -> Octonion {
        Octonion(mul_components(&self.0, &rhs.0))
    }
}

impl Mul<f64> for Octonion {
    type Output = Octonion;
    fn mul(self, rhs: f64) -> Octonion {
        Octonion(self.0.map(|x| x * rhs))
    }
}

impl Add for Octonion {
    type Output = Octonion;
    fn add(self, rhs: Octonion) -> Octonion {
        let mut c = self.0;
        for (a, b) in c.iter_mut().zip(rhs.0) {
            *a += b;
        }
        Octonion(c)
    }
}

impl Sub for Octonion {
    type Output = Octonion;
    fn sub(self, rhs: Octonion) -> Octonion {
        self + (-rhs)
    }
}

impl Neg for Octonion {
    type Output = Octonion;
    fn neg(self) -> Octonion {
        Octonion(self.0.map(|x| -x))
    }
}

pub fn oct_mul(a: &Octonion, b: &Octonion) -> Octonion {
    *a * *b
}

/// 2-fold cross product on ℝ⁷ ≅ Im 𝕆: `B(u, v) = Im(u v)`.
pub fn cross2(u: &Vec7, v: &Vec7) -> Vec7 {
    let a: [f64; 7] = (*u).into();
    let b: [f64; 7] = (*v).into();
    Vec7::from(cross2_components(&a, &b))
}

/// 3-fold cross product on ℝ⁸ ≅ 𝕆: `½ (u (v̄ w) − w (v̄ u))`.
pub fn cross3(u: &Vec8, v: &Vec8, w: &Vec8) -> Vec8 {
    let (u, v, w) = (Octonion::from(u), Octonion::from(v), Octonion::from(w));
    let vb = v.conj();
    ((u * (vb * w)) - (w * (vb * u))).to_vec8() * 0.5
}

/// The Cayley 4-form `Φ(a, b, c, d) = ⟨cross3(a, b, c), d⟩`.
pub fn cayley_form(a: &Vec8, b: &Vec8, c: &Vec8, d: &Vec8) -> f64 {
    cross3(a, b, c).dot(d)
}

/// Coordinate reflection relating the Cayley form above to the printed
/// Spin(7) form Ω₀ (ℝ⁸ coordinates x¹..x⁸ ↔ components 0..7).
///
/// Under the plain identification the two forms share all 14 index
/// quadruples but agree in sign on only 7 of them, so no global sign relates
/// them. Reflecting x⁶, x⁷, x⁸ makes them agree with global sign
/// [`OMEGA0_SIGN`].
pub const OMEGA0_REFLECTION: [f64; 8] = [1.0, 1.0, 1.0, 1.0, 1.0, -1.0, -1.0, -1.0];
pub const OMEGA0_SIGN: f64 = 1.0;

/// The printed Ω₀ (with `dx^{21+dx^{34}}` read as `dx²¹ + dx³⁴`) as a list of
/// canonical terms: strictly increasing 0-based index quadruples with their
/// coefficients.
pub fn omega0_terms() -> Vec<([usize; 4], f64)> {
    let pairs: [([usize; 2], [usize; 2], [usize; 2], [usize; 2]); 3] = [
        ([2, 1], [3, 4], [6, 5], [7, 8]),
        ([3, 1], [4, 2], [7, 5], [8, 6]),
        ([4, 1], [2, 3], [8, 5], [6, 7]),
    ];
    let mut raw: Vec<([usize; 4], f64)> = vec![([1, 2, 3, 4], -1.0), ([5, 6, 7, 8], -1.0)];
    for (l1, l2, r1, r2) in pairs {
        for l in [l1, l2] {
            for r in [r1, r2] {
                raw.push(([l[0], l[1], r[0], r[1]], -1.0));
            }
        }
    }
    let mut out: Vec<([usize; 4], f64)> = Vec::new();
    for (idx, c) in raw {
        let mut ix = idx.map(|i| i - 1);
        let sign = sort_with_sign(&mut ix);
        match out.iter_mut().find(|(k, _)| *k == ix) {
            Some((_, v)) => *v += sign * c,
            None => out.push((ix, sign * c)),
        }
    }
    out.retain(|(_, c)| *c != 0.0);
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// Canonical nonzero terms of the Cayley form from [`cross3`].
pub fn cayley_terms() -> Vec<([usize; 4], f64)> {
    let e = |i: usize| Vec8::from_fn(|r, _| if r == i { 1.0 } else { 0.0 });
    let mut out = Vec::new();
    for a in 0..8 {
        for b in a + 1..8 {
            for c in b + 1..8 {
                for d in c + 1..8 {
                    let v = cayley_form(&e(a), &e(b), &e(c), &e(d));
                    if v != 0.0 {
                        out.push(([a, b, c, d], v));
                    }
                }
            }
        }
    }
    out
}

fn sort_with_sign(ix: &mut [usize; 4]) -> f64 {
    let mut sign = 1.0;
    for i in 0..4 {
        for j in 0..3 - i {
            if ix[j] > ix[j + 1] {
                ix.swap(j, j + 1);
                sign = -sign;
            }
        }
    }
    sign
}
