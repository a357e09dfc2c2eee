//! Exact signatures: rational symmetric forms, Meyer's cocycle and twist-word signatures.
//!
//! Calibration is frozen as `σ(w) = Σ_{k<n} τ(Π_k, M_{k+1}) − Σ_{separating} ε`, with
//! `Π_k` the product of the first `k` letters in storage order.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::surface::HomologyClass;
use crate::symplectic::{self, letter_matrix, SymplecticMatrix};
use crate::word::{Relator, TwistWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SignatureError {
    #[error("form is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("form rows have inconsistent length")]
    Shape,
    #[error("dimension mismatch: genus {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("word is not homologically trivial")]
    NotTrivial,
    #[error("word contains negative letters; fibration monodromies are all-positive")]
    NotPositive,
}

/// Symmetric matrix over ℚ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalForm {
    dim: usize,
    entries: Vec<BigRational>,
}

impl RationalForm {
    pub fn new(rows: Vec<Vec<BigRational>>) -> Result<Self, SignatureError> {
        let dim = rows.len();
        if rows.iter().any(|r| r.len() != dim) {
            return Err(SignatureError::Shape);
        }
        let entries: Vec<BigRational> = rows.into_iter().flatten().collect();
        for r in 0..dim {
            for c in r + 1..dim {
                if entries[r * dim + c] != entries[c * dim + r] {
                    return Err(SignatureError::NotSymmetric { row: r, col: c });
                }
            }
        }
        Ok(Self { dim, entries })
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, SignatureError> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
                .collect(),
        )
    }

    fn from_integer_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let dim = rows.len();
        Self {
            dim,
            entries: rows.into_iter().flatten().map(BigRational::from_integer).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, r: usize, c: usize) -> &BigRational {
        &self.entries[r * self.dim + c]
    }
}

/// `#positive − #negative` by exact symmetric Gaussian elimination.
pub fn form_signature(f: &RationalForm) -> i64 {
    let n = f.dim;
    let mut a: Vec<Vec<BigRational>> = f.entries.chunks(n.max(1)).map(<[_]>::to_vec).collect();
    let mut live: Vec<usize> = (0..n).collect();
    let mut sig = 0i64;
    while !live.is_empty() {
        let pivot = match live.iter().copied().find(|&i| !a[i][i].is_zero()) {
            Some(p) => p,
            None => {
                // hyperbolic pair: fold row/column j into i so a[i][i] = 2 a[i][j] ≠ 0
                let Some((i, j)) = live
                    .iter()
                    .flat_map(|&i| live.iter().map(move |&j| (i, j)))
                    .find(|&(i, j)| i != j && !a[i][j].is_zero())
                else {
                    break;
                };
                for k in 0..n {
                    let t = a[j][k].clone();
                    a[i][k] += t;
                }
                for k in 0..n {
                    let t = a[k][j].clone();
                    a[k][i] += t;
                }
                i
            }
        };
        let p = a[pivot][pivot].clone();
        sig += if p.is_positive() { 1 } else { -1 };
        live.retain(|&i| i != pivot);
        for &i in &live {
            if a[i][pivot].is_zero() {
                continue;
            }
            let factor = &a[i][pivot] / &p;
            for &k in &live {
                if !a[pivot][k].is_zero() {
                    let t = &factor * &a[pivot][k];
                    a[i][k] -= t;
                }
            }
        }
        for &i in &live {
            a[i][pivot] = BigRational::zero();
            a[pivot][i] = BigRational::zero();
        }
    }
    sig
}

/// Integer basis of `{z : m z = 0}` for an integer matrix with `cols` columns.
fn integer_kernel(m: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigRational>> = m
        .iter()
        .map(|r| r.iter().cloned().map(BigRational::from_integer).collect())
        .collect();
    let rows = a.len();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(r, p);
        let pv = a[r][c].clone();
        for x in a[r].iter_mut() {
            *x /= &pv;
        }
        for i in 0..rows {
            if i != r && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for k in 0..cols {
                    if !a[r][k].is_zero() {
                        let t = &f * &a[r][k];
                        a[i][k] -= t;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut basis = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (i, &pc) in pivots.iter().enumerate() {
            v[pc] = -a[i][free].clone();
        }
        let lcm = v
            .iter()
            .fold(BigInt::one(), |acc, x| num_integer::lcm(acc, x.denom().clone()));
        basis.push(v.iter().map(|x| (x * &lcm).to_integer()).collect());
    }
    basis
}

/// Meyer's cocycle `τ(A, B)`.
///
/// On `V = {(x, y) : (A⁻¹ − I)x + (B − I)y = 0}` takes the form
/// `((x₁,y₁),(x₂,y₂)) ↦ ⟨x₁ + y₁, (I − B)y₂⟩`, symmetrizes it, and returns its signature.
pub fn meyer_cocycle(a: &SymplecticMatrix, b: &SymplecticMatrix) -> Result<i64, SignatureError> {
    if a.genus() != b.genus() {
        return Err(SignatureError::DimensionMismatch {
            left: a.genus(),
            right: b.genus(),
        });
    }
    let n = a.dim();
    let ainv = a.inverse();
    let delta = |i: usize, j: usize| if i == j { BigInt::one() } else { BigInt::zero() };
    let system: Vec<Vec<BigInt>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| ainv.get(i, j) - delta(i, j))
                .chain((0..n).map(|j| b.get(i, j) - delta(i, j)))
                .collect()
        })
        .collect();
    let basis = integer_kernel(&system, 2 * n);
    if basis.is_empty() {
        return Ok(0);
    }
    let class = |v: &[BigInt]| HomologyClass::from_coords(v.to_vec()).expect("even length");
    let sums: Vec<HomologyClass> = basis
        .iter()
        .map(|z| class(&(0..n).map(|i| &z[i] + &z[n + i]).collect::<Vec<_>>()))
        .collect();
    let images: Vec<HomologyClass> = basis
        .iter()
        .map(|z| {
            let y = class(&z[n..]);
            y.sub(&b.apply(&y))
        })
        .collect();
    let k = basis.len();
    let mut gram = vec![vec![BigInt::zero(); k]; k];
    for i in 0..k {
        for j in 0..k {
            gram[i][j] = sums[i].pairing(&images[j]);
        }
    }
    let sym: Vec<Vec<BigInt>> = (0..k)
        .map(|i| (0..k).map(|j| &gram[i][j] + &gram[j][i]).collect())
        .collect();
    Ok(form_signature(&RationalForm::from_integer_rows(sym)))
}

/// `Σ_{k=1}^{n−1} τ(Π_k, M_{k+1})`; terms are evaluated in parallel.
pub fn meyer_sum(w: &TwistWord) -> i64 {
    if w.len() < 2 {
        return 0;
    }
    let partial = symplectic::partial_products(w);
    (0..w.len() - 1)
        .into_par_iter()
        .map(|k| {
            meyer_cocycle(&partial[k], &letter_matrix(&w.letters()[k + 1])).expect("same genus")
        })
        .sum()
}

/// `−Σ ε` over separating letters.
pub fn separating_correction(w: &TwistWord) -> i64 {
    -w.letters()
        .iter()
        .filter(|l| l.is_separating())
        .map(|l| l.exponent())
        .sum::<i64>()
}

/// Cocycle sum plus separating correction for an arbitrary word. Additive up to
/// `τ(M(a), M(b))` under concatenation.
pub fn word_signature_term(w: &TwistWord) -> i64 {
    meyer_sum(w) + separating_correction(w)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignatureReport {
    pub genus: usize,
    pub length: usize,
    pub cocycle_sum: i64,
    pub separating_correction: i64,
    pub sigma: i64,
    pub euler: i64,
}

/// Signature and Euler characteristic of the fibration with monodromy `w`.
pub fn signature_of_word(w: &TwistWord) -> Result<SignatureReport, SignatureError> {
    if !w.is_positive() {
        return Err(SignatureError::NotPositive);
    }
    if !symplectic::is_homologically_trivial(w) {
        return Err(SignatureError::NotTrivial);
    }
    let cocycle_sum = meyer_sum(w);
    let corr = separating_correction(w);
    let g = w.genus() as i64;
    Ok(SignatureReport {
        genus: w.genus(),
        length: w.len(),
        cocycle_sum,
        separating_correction: corr,
        sigma: cocycle_sum + corr,
        euler: 4 - 4 * g + w.len() as i64,
    })
}

/// `(dE, dσ)` for replacing the left side `X` of `r` by its right side `Y`.
///
/// Inside any trivial word `U X V`, swapping `X` for `Y` changes σ by
/// `S(Y) − S(X)` with `S = word_signature_term`.
pub fn relator_signature_delta(r: &Relator) -> Result<(i64, i64), SignatureError> {
    if !symplectic::is_homologically_trivial(r.word()) {
        return Err(SignatureError::NotTrivial);
    }
    let x = r.left();
    let y = r.right();
    let d_e = y.len() as i64 - x.len() as i64;
    let d_sigma = word_signature_term(&y) - word_signature_term(&x);
    Ok((d_e, d_sigma))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::CurveCatalog;
    use crate::word::{build_relator, parse_word, RelatorKind};

    fn form(rows: &[Vec<i64>]) -> RationalForm {
        RationalForm::from_i64_rows(rows).unwrap()
    }

    #[test]
    fn small_form_signatures() {
        assert_eq!(form_signature(&form(&[vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]])), 3);
        assert_eq!(form_signature(&form(&[vec![1, 0], vec![0, -1]])), 0);
        assert_eq!(form_signature(&form(&[vec![0, 1], vec![1, 0]])), 0);
        assert_eq!(form_signature(&form(&[vec![0, 0], vec![0, 0]])), 0);
        assert_eq!(form_signature(&form(&[vec![-2, 1], vec![1, -2]])), -2);
        assert_eq!(form_signature(&form(&[vec![0, 1, 0], vec![1, 0, 0], vec![0, 0, -5]])), -1);
        assert_eq!(form_signature(&form(&[])), 0);
        assert!(matches!(
            RationalForm::from_i64_rows(&[vec![0, 1], vec![2, 0]]),
            Err(SignatureError::NotSymmetric { .. })
        ));
    }

    #[test]
    fn cocycle_trivial_cases() {
        let cat = CurveCatalog::builtin(2);
        let b = symplectic::evaluate(&parse_word("c1 c2 c3^-1", &cat, 2).unwrap());
        assert_eq!(meyer_cocycle(&SymplecticMatrix::identity(2), &b).unwrap(), 0);
        assert_eq!(meyer_cocycle(&b, &b.inverse()).unwrap(), 0);
        assert!(meyer_cocycle(&b, &SymplecticMatrix::identity(3)).is_err());
    }

    #[test]
    fn hyperelliptic_and_matsumoto_anchors() {
        for g in 1..=3 {
            let cat = CurveCatalog::builtin(g);
            let w = build_relator(&cat, RelatorKind::Hyperelliptic, g).unwrap();
            let rep = signature_of_word(w.word()).unwrap();
            assert_eq!(rep.sigma, -4 * (g as i64 + 1));
            assert_eq!(rep.euler, 4 * (g as i64 + 2));
        }
        for (g, s) in [(2, -4), (3, -8)] {
            let cat = CurveCatalog::builtin(g);
            let w = build_relator(&cat, RelatorKind::Matsumoto, g).unwrap();
            assert_eq!(signature_of_word(w.word()).unwrap().sigma, s);
        }
    }

    #[test]
    fn empty_word_signature() {
        let rep = signature_of_word(&TwistWord::empty(3)).unwrap();
        assert_eq!((rep.sigma, rep.euler), (0, -8));
    }

    #[test]
    fn rejects_bad_words() {
        let cat = CurveCatalog::builtin(2);
        assert_eq!(signature_of_word(&parse_word("c1", &cat, 2).unwrap()), Err(SignatureError::NotTrivial));
        assert_eq!(
            signature_of_word(&parse_word("c1 c1^-1", &cat, 2).unwrap()),
            Err(SignatureError::NotPositive)
        );
    }

    #[test]
    fn star_deltas_small() {
        let cat = CurveCatalog::builtin(3);
        let r = build_relator(&cat, RelatorKind::Star { h: 1 }, 3).unwrap();
        assert_eq!(relator_signature_delta(&r).unwrap(), (-9, 5));
        let reversed = relator_signature_delta(&r.reversed()).unwrap();
        assert_eq!(reversed, (9, -5));
    }

    #[test]
    fn even_chain_delta() {
        for (g, k) in [(2, 1), (3, 1), (3, 2)] {
            let cat = CurveCatalog::builtin(g);
            let r = build_relator(&cat, RelatorKind::ChainEven { k }, g).unwrap();
            let kk = k as i64;
            let (de, ds) = relator_signature_delta(&r).unwrap();
            assert_eq!(de, 1 - 2 * kk * (4 * kk + 2));
            assert_eq!(ds, 4 * kk * (kk + 1) - 1);
        }
    }

    #[test]
    fn identity_relator_delta() {
        let r = Relator::custom(TwistWord::empty(2), 0).unwrap();
        assert_eq!(relator_signature_delta(&r).unwrap(), (0, 0));
    }
}
