//! Integer symplectic representation of twist words.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::surface::{Curve, HomologyClass};
use crate::word::{TwistLetter, TwistWord};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SymplecticError {
    #[error("matrix is not square of even size")]
    Shape,
    #[error("matrix does not preserve the symplectic form")]
    NotSymplectic,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransportError {
    #[error("class {0} is not primitive")]
    NotPrimitive(HomologyClass),
    #[error("genus mismatch: {left} vs {right}")]
    GenusMismatch { left: usize, right: usize },
    #[error("no transporter route found from {from} to {to}")]
    NoRoute { from: HomologyClass, to: HomologyClass },
}

/// `2g × 2g` integer matrix with `MᵀJM = J`, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymplecticMatrix {
    genus: usize,
    entries: Vec<BigInt>,
}

impl SymplecticMatrix {
    pub fn identity(genus: usize) -> Self {
        let n = 2 * genus;
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            entries[i * n + i] = BigInt::one();
        }
        Self { genus, entries }
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Result<Self, SymplecticError> {
        let n = rows.len();
        if n == 0 || n % 2 != 0 || rows.iter().any(|r| r.len() != n) {
            return Err(SymplecticError::Shape);
        }
        let m = Self {
            genus: n / 2,
            entries: rows.into_iter().flatten().collect(),
        };
        if !m.is_symplectic() {
            return Err(SymplecticError::NotSymplectic);
        }
        Ok(m)
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Result<Self, SymplecticError> {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn dim(&self) -> usize {
        2 * self.genus
    }

    pub fn get(&self, r: usize, c: usize) -> &BigInt {
        &self.entries[r * self.dim() + c]
    }

    pub fn rows(&self) -> Vec<Vec<BigInt>> {
        self.entries.chunks(self.dim()).map(<[BigInt]>::to_vec).collect()
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.genus, other.genus, "genus mismatch in matrix product");
        let n = self.dim();
        let mut entries = vec![BigInt::zero(); n * n];
        for i in 0..n {
            for t in 0..n {
                let a = &self.entries[i * n + t];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &other.entries[t * n + j];
                    if !b.is_zero() {
                        entries[i * n + j] += a * b;
                    }
                }
            }
        }
        Self {
            genus: self.genus,
            entries,
        }
    }

    /// `M⁻¹ = -J Mᵀ J`, exact over the integers.
    pub fn inverse(&self) -> Self {
        let n = self.dim();
        let mut entries = vec![BigInt::zero(); n * n];
        for r in 0..n {
            for c in 0..n {
                // (-J Mᵀ J)_{rc} = -Σ J_{r,s} M_{t,s} J_{t,c}
                let (s, sign_r) = j_partner(r);
                let (t, sign_c) = j_partner_col(c);
                let v = self.get(t, s);
                entries[r * n + c] = if sign_r * sign_c > 0 { -v } else { v.clone() };
            }
        }
        Self {
            genus: self.genus,
            entries,
        }
    }

    pub fn apply(&self, x: &HomologyClass) -> HomologyClass {
        let n = self.dim();
        assert_eq!(x.coords().len(), n, "genus mismatch in matrix action");
        let mut out = HomologyClass::zero(self.genus);
        let xs = x.coords();
        for (i, o) in out.coords_mut().iter_mut().enumerate() {
            for (j, xj) in xs.iter().enumerate() {
                let a = &self.entries[i * n + j];
                if !a.is_zero() && !xj.is_zero() {
                    *o += a * xj;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim();
        let mut entries = self.entries.clone();
        for r in 0..n {
            for c in 0..n {
                entries[c * n + r] = self.entries[r * n + c].clone();
            }
        }
        Self {
            genus: self.genus,
            entries,
        }
    }

    pub fn is_identity(&self) -> bool {
        let n = self.dim();
        self.entries.iter().enumerate().all(|(k, x)| {
            if k / n == k % n {
                x.is_one()
            } else {
                x.is_zero()
            }
        })
    }

    /// Checks `MᵀJM = J` exactly.
    pub fn is_symplectic(&self) -> bool {
        let n = self.dim();
        // (MᵀJM)_{rc} = ⟨col_r, col_c⟩
        let col = |c: usize| -> HomologyClass {
            HomologyClass::from_coords((0..n).map(|r| self.get(r, c).clone()).collect()).expect("even")
        };
        let cols: Vec<HomologyClass> = (0..n).map(col).collect();
        for r in 0..n {
            for c in 0..n {
                let want = match (r % 2, c) {
                    (0, c) if c == r + 1 => 1,
                    (1, c) if c + 1 == r => -1,
                    _ => 0,
                };
                if cols[r].pairing(&cols[c]) != BigInt::from(want) {
                    return false;
                }
            }
        }
        true
    }

    /// `self ← self · T_v^ε` as a rank-one update.
    pub fn mul_twist_right(&mut self, v: &HomologyClass, exponent: i64) {
        if v.is_zero() {
            return;
        }
        let n = self.dim();
        let pv = self.apply(v);
        let jv = j_times(v);
        let eps = BigInt::from(exponent);
        for i in 0..n {
            let a = &pv.coords()[i] * &eps;
            if a.is_zero() {
                continue;
            }
            for (j, b) in jv.iter().enumerate() {
                if !b.is_zero() {
                    self.entries[i * n + j] += &a * b;
                }
            }
        }
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or_default()
    }
}

/// Row `r` of `J` has its single nonzero at column `s` with the given sign.
fn j_partner(r: usize) -> (usize, i32) {
    if r % 2 == 0 {
        (r + 1, 1)
    } else {
        (r - 1, -1)
    }
}

/// Column `c` of `J` has its single nonzero at row `t` with the given sign.
fn j_partner_col(c: usize) -> (usize, i32) {
    if c % 2 == 1 {
        (c - 1, 1)
    } else {
        (c + 1, -1)
    }
}

/// `(Jv)`: the row vector with `⟨x, v⟩ = (Jv)·x`.
fn j_times(v: &HomologyClass) -> Vec<BigInt> {
    let c = v.coords();
    let mut out = vec![BigInt::zero(); c.len()];
    for i in 0..c.len() / 2 {
        out[2 * i] = c[2 * i + 1].clone();
        out[2 * i + 1] = -&c[2 * i];
    }
    out
}

impl fmt::Debug for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for SymplecticMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.entries.chunks(self.dim()) {
            let parts: Vec<String> = row.iter().map(|x| format!("{x:>3}")).collect();
            writeln!(f, "{}", parts.join(" "))?;
        }
        Ok(())
    }
}

/// `T_v^ε(x) = x + ε⟨x, v⟩ v`.
pub fn twist_apply(v: &HomologyClass, exponent: i64, x: &HomologyClass) -> HomologyClass {
    let p = x.pairing(v) * BigInt::from(exponent);
    if p.is_zero() {
        return x.clone();
    }
    x.add(&v.scale(&p))
}

pub fn transvection_class(v: &HomologyClass, exponent: i64) -> SymplecticMatrix {
    let mut m = SymplecticMatrix::identity(v.genus());
    m.mul_twist_right(v, exponent);
    m
}

/// Homology action of the right-handed twist about `c`.
pub fn transvection(c: &Curve) -> SymplecticMatrix {
    transvection_class(c.class(), 1)
}

pub fn letter_matrix(l: &TwistLetter) -> SymplecticMatrix {
    transvection_class(l.class(), l.exponent())
}

/// `M(A_1) ⋯ M(A_n)`.
pub fn evaluate(w: &TwistWord) -> SymplecticMatrix {
    let mut m = SymplecticMatrix::identity(w.genus());
    for l in w.letters() {
        m.mul_twist_right(l.class(), l.exponent());
    }
    m
}

/// `[Π_1, ..., Π_n]` with `Π_k = M(A_1) ⋯ M(A_k)`.
pub fn partial_products(w: &TwistWord) -> Vec<SymplecticMatrix> {
    let mut out = Vec::with_capacity(w.len());
    let mut m = SymplecticMatrix::identity(w.genus());
    for l in w.letters() {
        m.mul_twist_right(l.class(), l.exponent());
        out.push(m.clone());
    }
    out
}

pub fn is_homologically_trivial(w: &TwistWord) -> bool {
    evaluate(w).is_identity()
}

/// Word `φ` of nonseparating twists with `M(φ)·v = ±w`.
///
/// Empty when `v = ±w`, two letters `v w` when `⟨v,w⟩ = ±1`, four letters `u w v u`
/// through one auxiliary `u` when one exists. Otherwise hops through auxiliaries whose
/// pairing with `w` shrinks like a Euclidean remainder, two letters per hop.
pub fn symplectic_transporter(v: &HomologyClass, w: &HomologyClass) -> Result<TwistWord, TransportError> {
    if v.genus() != w.genus() {
        return Err(TransportError::GenusMismatch {
            left: v.genus(),
            right: w.genus(),
        });
    }
    for x in [v, w] {
        if !x.is_primitive() {
            return Err(TransportError::NotPrimitive(x.clone()));
        }
    }
    let path = route(v, w, 128).ok_or_else(|| TransportError::NoRoute {
        from: v.clone(),
        to: w.clone(),
    })?;
    let g = v.genus();
    let mut nodes = vec![("tv".to_string(), v.clone())];
    let last = path.len();
    for (i, x) in path.into_iter().enumerate() {
        let name = if i + 1 == last { "tw".to_string() } else { format!("tu{}", i + 1) };
        nodes.push((name, x));
    }
    let curves: Vec<Arc<Curve>> = nodes.into_iter().map(|(n, c)| Arc::new(Curve::new(n, c))).collect();
    // hop x → y is the word `x y`; later hops act after earlier ones, so they go first
    let mut letters = Vec::with_capacity(2 * (curves.len() - 1));
    for pair in curves.windows(2).rev() {
        letters.push(TwistLetter::positive(pair[0].clone()));
        letters.push(TwistLetter::positive(pair[1].clone()));
    }
    Ok(TwistWord::new(g, letters).expect("same genus"))
}

/// Classes `x_1, ..., x_k = ±w` with `|⟨x_{i-1}, x_i⟩| = 1`, `x_0 = v`.
fn route(v: &HomologyClass, w: &HomologyClass, depth: usize) -> Option<Vec<HomologyClass>> {
    if v.eq_up_to_sign(w) {
        return Some(Vec::new());
    }
    if v.pairing(w).abs().is_one() {
        return Some(vec![w.clone()]);
    }
    let dual = Dual::new(v, w);
    if let Some(u) = dual.bridge() {
        return Some(vec![u, w.clone()]);
    }
    if depth == 0 || dual.d.is_zero() {
        return None;
    }
    let rem = dual.r.mod_floor(&dual.d);
    let mut targets = vec![rem.clone(), &rem - &dual.d];
    targets.sort_by_key(|t| t.abs());
    for target in targets {
        let u1 = dual.with_pairing(&target)?;
        if let Some(mut rest) = route(&u1, w, depth - 1) {
            rest.insert(0, u1);
            return Some(rest);
        }
    }
    None
}

/// Classes `u` with `⟨v,u⟩ = 1`: `u = u0 + t·kd`, where `⟨u, w⟩ = r + t·d` and `d` is
/// the gcd of all values `⟨k, w⟩` over `k ⊥ v`.
struct Dual {
    u0: HomologyClass,
    kd: HomologyClass,
    d: BigInt,
    r: BigInt,
}

impl Dual {
    fn new(v: &HomologyClass, w: &HomologyClass) -> Self {
        let f = pairing_functional(v);
        let fw = pairing_functional(w);
        let n = f.len();
        let (_, c) = ext_gcd_list(&f);
        let u0 = HomologyClass::from_coords(c).expect("even");
        let mut minors = Vec::new();
        let mut gens = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                // f_j e_i - f_i e_j lies in ker f
                let mut k = vec![BigInt::zero(); n];
                k[i] = f[j].clone();
                k[j] = -&f[i];
                minors.push(dot(&fw, &k));
                gens.push(k);
            }
        }
        let (d, coeffs) = ext_gcd_list(&minors);
        let mut kd = vec![BigInt::zero(); n];
        for (c, k) in coeffs.iter().zip(&gens) {
            if c.is_zero() {
                continue;
            }
            for (x, y) in kd.iter_mut().zip(k) {
                *x += c * y;
            }
        }
        // ⟨u, w⟩ = -⟨w, u⟩ = -(fw · u)
        let r = -dot(&fw, u0.coords());
        let d_signed = -dot(&fw, &kd);
        let kd = HomologyClass::from_coords(kd).expect("even");
        let (d, kd) = if d_signed.is_negative() { (d, kd.neg()) } else { (d, kd) };
        Self { u0, kd, d, r }
    }

    /// `u` with `⟨v,u⟩ = 1` and `⟨u,w⟩ = target`, if `target ≡ r (mod d)`.
    fn with_pairing(&self, target: &BigInt) -> Option<HomologyClass> {
        let diff = target - &self.r;
        if self.d.is_zero() {
            return diff.is_zero().then(|| self.u0.clone());
        }
        if !diff.is_multiple_of(&self.d) {
            return None;
        }
        Some(self.u0.add(&self.kd.scale(&(diff / &self.d))))
    }

    fn bridge(&self) -> Option<HomologyClass> {
        [BigInt::one(), -BigInt::one()]
            .iter()
            .find_map(|t| self.with_pairing(t))
    }
}

/// `f` with `f·u = ⟨v,u⟩`.
fn pairing_functional(v: &HomologyClass) -> Vec<BigInt> {
    let c = v.coords();
    let mut f = vec![BigInt::zero(); c.len()];
    for i in 0..c.len() / 2 {
        f[2 * i] = -&c[2 * i + 1];
        f[2 * i + 1] = c[2 * i].clone();
    }
    f
}

fn dot(a: &[BigInt], b: &[BigInt]) -> BigInt {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// `(d, c)` with `Σ c_i x_i = d = gcd(x) ≥ 0`.
fn ext_gcd_list(xs: &[BigInt]) -> (BigInt, Vec<BigInt>) {
    let mut d = BigInt::zero();
    let mut coeffs = vec![BigInt::zero(); xs.len()];
    for (i, x) in xs.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        let e = d.extended_gcd(x);
        // e.gcd = e.x * d + e.y * x
        for c in coeffs.iter_mut().take(i) {
            *c *= &e.x;
        }
        coeffs[i] = e.y;
        d = e.gcd;
    }
    if d.is_negative() {
        d = -d;
        coeffs.iter_mut().for_each(|c| *c = -&*c);
    }
    (d, coeffs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::CurveCatalog;
    use crate::word::{build_relator, parse_word, RelatorKind};

    #[test]
    fn transvection_of_a1_in_genus_one() {
        let m = transvection(&Curve::new("a", HomologyClass::a(1, 1)));
        assert_eq!(m.apply(&HomologyClass::a(1, 1)), HomologyClass::a(1, 1));
        assert_eq!(m.apply(&HomologyClass::b(1, 1)), HomologyClass::from_i64s(&[-1, 1]));
        assert!(m.is_symplectic());
        assert!(transvection(&Curve::new("s", HomologyClass::zero(2))).is_identity());
    }

    #[test]
    fn inverse_is_exact() {
        let cat = CurveCatalog::builtin(3);
        let w = parse_word("c1 c2^-1 c3 c4 c5^2 c6 c7^-1", &cat, 3).unwrap();
        let m = evaluate(&w);
        assert!(m.is_symplectic());
        assert!(m.mul(&m.inverse()).is_identity());
        assert!(m.inverse().mul(&m).is_identity());
        assert_eq!(evaluate(&w.inverse()), m.inverse());
    }

    #[test]
    fn evaluation_basics() {
        let cat = CurveCatalog::builtin(2);
        assert!(evaluate(&TwistWord::empty(2)).is_identity());
        let w2 = build_relator(&cat, RelatorKind::Matsumoto, 2).unwrap();
        assert!(is_homologically_trivial(w2.word()));
        let one = parse_word("c1", &cat, 2).unwrap();
        assert!(!is_homologically_trivial(&one));
        let x = parse_word("c1 c2 c3^-1 c4", &cat, 2).unwrap();
        assert!(is_homologically_trivial(&x.concat(&x.inverse()).unwrap()));
        let y = parse_word("c5 c2^-1", &cat, 2).unwrap();
        assert_eq!(evaluate(&x.concat(&y).unwrap()), evaluate(&x).mul(&evaluate(&y)));
        assert_eq!(partial_products(&x).last().unwrap(), &evaluate(&x));
    }

    #[test]
    fn from_rows_checks() {
        assert_eq!(SymplecticMatrix::from_i64_rows(&[vec![1, 1], vec![0, 1]]).unwrap().genus(), 1);
        assert_eq!(
            SymplecticMatrix::from_i64_rows(&[vec![2, 0], vec![0, 1]]),
            Err(SymplecticError::NotSymplectic)
        );
        assert_eq!(SymplecticMatrix::from_i64_rows(&[vec![1]]), Err(SymplecticError::Shape));
    }

    fn check_transport(v: &HomologyClass, w: &HomologyClass) -> usize {
        let phi = symplectic_transporter(v, w).unwrap();
        let image = evaluate(&phi).apply(v);
        assert!(image.eq_up_to_sign(w), "{v:?} -> {w:?} gave {image:?}");
        assert!(phi.letters().iter().all(|l| !l.is_separating()));
        phi.len()
    }

    #[test]
    fn transporter_cases() {
        let a1 = HomologyClass::a(2, 1);
        assert_eq!(check_transport(&a1, &a1), 0);
        assert_eq!(check_transport(&a1, &a1.neg()), 0);
        assert_eq!(check_transport(&HomologyClass::a(1, 1), &HomologyClass::b(1, 1)), 2);
        assert_eq!(check_transport(&a1, &HomologyClass::a(2, 2)), 4);
        assert_eq!(check_transport(&HomologyClass::a(1, 1), &HomologyClass::from_i64s(&[2, 5])), 6);
        assert!(check_transport(&HomologyClass::from_i64s(&[3, 2]), &HomologyClass::from_i64s(&[-7, 2])) <= 8);
        assert!(matches!(
            symplectic_transporter(&HomologyClass::from_i64s(&[2, 0]), &HomologyClass::a(1, 1)),
            Err(TransportError::NotPrimitive(_))
        ));
    }

    #[test]
    fn transporter_genus_one_sweep() {
        for p in -7i64..=7 {
            for q in -7i64..=7 {
                if num_integer::gcd(p, q) != 1 {
                    continue;
                }
                let w = HomologyClass::from_i64s(&[p, q]);
                check_transport(&HomologyClass::a(1, 1), &w);
                check_transport(&HomologyClass::from_i64s(&[3, 2]), &w);
            }
        }
    }

    #[test]
    fn ext_gcd_list_identity() {
        let xs: Vec<BigInt> = [12, -18, 0, 27].iter().map(|&x| BigInt::from(x)).collect();
        let (d, c) = ext_gcd_list(&xs);
        assert_eq!(d, BigInt::from(3));
        assert_eq!(dot(&xs, &c), d);
    }
}
