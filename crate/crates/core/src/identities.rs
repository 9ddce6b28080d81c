//! Exact integer checks of the cross-product and φ/ψ contraction identities
//! over every basis index tuple.
//!
//! All checks take the structure constants as an explicit table so a
//! deliberately corrupted table can be fed in.

use crate::octonion::PHI0;

pub type PhiTable = [[[i8; 7]; 7]; 7];
pub type PsiTable = Vec<i8>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub tuples: usize,
    pub failures: usize,
    /// First failing 0-based index tuple, in the loop order of the check.
    pub first_failure: Option<Vec<usize>>,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.failures == 0
    }
}

struct Tally {
    name: &'static str,
    tuples: usize,
    failures: usize,
    first: Option<Vec<usize>>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            tuples: 0,
            failures: 0,
            first: None,
        }
    }

    fn record(&mut self, ok: bool, tuple: &[usize]) {
        self.tuples += 1;
        if !ok {
            self.failures += 1;
            if self.first.is_none() {
                self.first = Some(tuple.to_vec());
            }
        }
    }

    fn finish(self) -> IdentityCheck {
        IdentityCheck {
            name: self.name,
            tuples: self.tuples,
            failures: self.failures,
            first_failure: self.first,
        }
    }
}

fn delta(i: usize, j: usize) -> i64 {
    i64::from(i == j)
}

/// φ₀ with the sign of one triple (and all its permutations) flipped.
pub fn corrupted_phi0(triple: [usize; 3]) -> PhiTable {
    let mut t = PHI0;
    let [a, b, c] = triple;
    for (i, j, k) in [(a, b, c), (b, c, a), (c, a, b), (b, a, c), (a, c, b), (c, b, a)] {
        t[i][j][k] = -t[i][j][k];
    }
    t
}

fn perm_sign(ix: &[usize]) -> i8 {
    let mut s = 1;
    for i in 0..ix.len() {
        for j in i + 1..ix.len() {
            if ix[i] > ix[j] {
                s = -s;
            } else if ix[i] == ix[j] {
                return 0;
            }
        }
    }
    s
}

/// `ψ = ⋆φ` as a dense integer 4-tensor, for the Euclidean metric and the
/// given orientation (φ₀ induces orientation −1).
pub fn psi_from_phi(phi: &PhiTable, orientation: i8) -> PsiTable {
    let mut psi = vec![0i8; 2401];
    for i in 0..7 {
        for j in 0..7 {
            for k in 0..7 {
                for l in 0..7 {
                    let quad = [i, j, k, l];
                    let s = perm_sign(&quad);
                    if s == 0 {
                        continue;
                    }
                    let comp: Vec<usize> = (0..7).filter(|x| !quad.contains(x)).collect();
                    // (⋆φ)_{ijkl} = o · ε_{c₁c₂c₃ijkl} φ_{c₁c₂c₃} for increasing c.
                    let full = [comp[0], comp[1], comp[2], i, j, k, l];
                    let v = orientation * perm_sign(&full) * phi[comp[0]][comp[1]][comp[2]];
                    psi[((i * 7 + j) * 7 + k) * 7 + l] = v;
                }
            }
        }
    }
    psi
}

fn cross(phi: &PhiTable, u: &[i64; 7], v: &[i64; 7]) -> [i64; 7] {
    let mut out = [0i64; 7];
    for i in 0..7 {
        for j in 0..7 {
            let m = u[i] * v[j];
            if m == 0 {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o += i64::from(phi[i][j][k]) * m;
            }
        }
    }
    out
}

fn basis(i: usize) -> [i64; 7] {
    let mut e = [0i64; 7];
    e[i] = 1;
    e
}

/// `⟨u, v × w⟩ = ⟨u × v, w⟩` on all 7³ basis triples.
pub fn check_cp1(phi: &PhiTable) -> IdentityCheck {
    let mut t = Tally::new("cp1");
    for u in 0..7 {
        for v in 0..7 {
            for w in 0..7 {
                let lhs = cross(phi, &basis(v), &basis(w))[u];
                let rhs = cross(phi, &basis(u), &basis(v))[w];
                t.record(lhs == rhs, &[u, v, w]);
            }
        }
    }
    t.finish()
}

/// `u × (u × v) = −|u|² v + ⟨u, v⟩ u` on all basis pairs and on all pairs of
/// sums of two distinct basis vectors.
pub fn check_malcev(phi: &PhiTable) -> IdentityCheck {
    let mut t = Tally::new("malcev");
    let mut vectors: Vec<(Vec<usize>, [i64; 7])> = (0..7).map(|i| (vec![i], basis(i))).collect();
    for i in 0..7 {
        for j in i + 1..7 {
            let mut s = basis(i);
            s[j] = 1;
            vectors.push((vec![i, j], s));
        }
    }
    for (iu, u) in &vectors {
        for (iv, v) in &vectors {
            let lhs = cross(phi, u, &cross(phi, u, v));
            let uu: i64 = u.iter().map(|x| x * x).sum();
            let uv: i64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
            let ok = (0..7).all(|k| lhs[k] == -uu * v[k] + uv * u[k]);
            let tuple: Vec<usize> = iu.iter().chain(iv).copied().collect();
            t.record(ok, &tuple);
        }
    }
    t.finish()
}

/// `u × (v × w) + v × (u × w) = ⟨u,w⟩v + ⟨v,w⟩u − 2⟨u,v⟩w` on all basis triples.
pub fn check_cp2(phi: &PhiTable) -> IdentityCheck {
    let mut t = Tally::new("cp2");
    for u in 0..7 {
        for v in 0..7 {
            for w in 0..7 {
                let (bu, bv, bw) = (basis(u), basis(v), basis(w));
                let a = cross(phi, &bu, &cross(phi, &bv, &bw));
                let b = cross(phi, &bv, &cross(phi, &bu, &bw));
                let ok = (0..7).all(|k| {
                    a[k] + b[k]
                        == delta(u, w) * bv[k] + delta(v, w) * bu[k] - 2 * delta(u, v) * bw[k]
                });
                t.record(ok, &[u, v, w]);
            }
        }
    }
    t.finish()
}

/// `φ_ijk φ_abk = δ_ia δ_jb − δ_ib δ_ja − ψ_ijab` on all 7⁴ tuples.
pub fn check_contractions1(phi: &PhiTable, psi: &PsiTable) -> IdentityCheck {
    let mut t = Tally::new("contractions1");
    for i in 0..7 {
        for j in 0..7 {
            for a in 0..7 {
                for b in 0..7 {
                    let lhs: i64 = (0..7)
                        .map(|k| i64::from(phi[i][j][k]) * i64::from(phi[a][b][k]))
                        .sum();
                    let rhs = delta(i, a) * delta(j, b)
                        - delta(i, b) * delta(j, a)
                        - i64::from(psi[((i * 7 + j) * 7 + a) * 7 + b]);
                    t.record(lhs == rhs, &[i, j, a, b]);
                }
            }
        }
    }
    t.finish()
}

/// `φ_ijk ψ_abck = δ_ia φ_jbc + δ_ib φ_ajc + δ_ic φ_abj − δ_ja φ_ibc − δ_jb φ_aic − δ_jc φ_abi`
/// on all 7⁵ tuples.
pub fn check_contractions2(phi: &PhiTable, psi: &PsiTable) -> IdentityCheck {
    let mut t = Tally::new("contractions2");
    let f = |x: usize, y: usize, z: usize| i64::from(phi[x][y][z]);
    for i in 0..7 {
        for j in 0..7 {
            for a in 0..7 {
                for b in 0..7 {
                    for c in 0..7 {
                        let lhs: i64 = (0..7)
                            .map(|k| f(i, j, k) * i64::from(psi[((a * 7 + b) * 7 + c) * 7 + k]))
                            .sum();
                        let rhs = delta(i, a) * f(j, b, c)
                            + delta(i, b) * f(a, j, c)
                            + delta(i, c) * f(a, b, j)
                            - delta(j, a) * f(i, b, c)
                            - delta(j, b) * f(a, i, c)
                            - delta(j, c) * f(a, b, i);
                        t.record(lhs == rhs, &[i, j, a, b, c]);
                    }
                }
            }
        }
    }
    t.finish()
}

/// `ψ_ijkl ψ_ajkl = 24 δ_ia` on all 7² pairs.
pub fn check_psi_psi(psi: &PsiTable) -> IdentityCheck {
    let mut t = Tally::new("psi_psi");
    for i in 0..7 {
        for a in 0..7 {
            let lhs: i64 = (0..343)
                .map(|jkl| i64::from(psi[i * 343 + jkl]) * i64::from(psi[a * 343 + jkl]))
                .sum();
            t.record(lhs == 24 * delta(i, a), &[i, a]);
        }
    }
    t.finish()
}

/// Every exact check, with ψ derived from the table by the Hodge star in
/// the orientation induced by φ₀.
pub fn verify_all(phi: &PhiTable) -> Vec<IdentityCheck> {
    let psi = psi_from_phi(phi, -1);
    vec![
        check_cp1(phi),
        check_malcev(phi),
        check_cp2(phi),
        check_contractions1(phi, &psi),
        check_contractions2(phi, &psi),
        check_psi_psi(&psi),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::g2::{psi0, G2Structure};

    #[test]
    fn all_identities_hold_exactly() {
        for check in verify_all(&PHI0) {
            assert!(check.passed(), "{check:?}");
        }
    }

    #[test]
    fn tuple_counts() {
        let counts: Vec<(&str, usize)> = verify_all(&PHI0).iter().map(|c| (c.name, c.tuples)).collect();
        assert_eq!(
            counts,
            vec![
                ("cp1", 343),
                ("malcev", 784),
                ("cp2", 343),
                ("contractions1", 2401),
                ("contractions2", 16807),
                ("psi_psi", 49),
            ]
        );
    }

    #[test]
    fn integer_psi_matches_structure_psi() {
        let psi = psi_from_phi(&PHI0, -1);
        let s = G2Structure::standard();
        let dense = s.psi().to_dense();
        for (a, b) in psi.iter().zip(&dense) {
            assert_eq!(f64::from(*a), *b);
        }
    }

    #[test]
    fn printed_sign_of_psi_fails_first_contraction() {
        let dense: Vec<i8> = psi0().to_dense().iter().map(|&x| x as i8).collect();
        assert_eq!(dense, psi_from_phi(&PHI0, 1));
        let check = check_contractions1(&PHI0, &dense);
        assert!(!check.passed());
        assert!(check_psi_psi(&dense).passed());
    }

    #[test]
    fn corrupted_table_is_caught() {
        let bad = corrupted_phi0([0, 1, 2]);
        let checks = verify_all(&bad);
        let cp1 = &checks[0];
        assert!(cp1.passed(), "cp1 only sees antisymmetry");
        let malcev = &checks[1];
        assert!(!malcev.passed());
        assert!(malcev.first_failure.is_some());
        let failed: Vec<&str> = checks.iter().filter(|c| !c.passed()).map(|c| c.name).collect();
        assert_eq!(failed, vec!["malcev", "cp2", "contractions1", "contractions2"]);
    }
}
