//! Signed Dehn-twist words, the text DSL, Hurwitz moves, conjugation, fiber sums and relators.
//!
//! Storage is left-to-right as printed; the rightmost letter acts first.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::surface::{CatalogError, Curve, CurveCatalog, HomologyClass};
use crate::symplectic::{self, SymplecticMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WordError {
    #[error("unknown curve `{name}` at genus {genus}")]
    UnknownCurve { name: String, genus: usize },
    #[error("malformed exponent in token `{0}`")]
    MalformedExponent(String),
    #[error("zero exponent in token `{0}`")]
    ZeroExponent(String),
    #[error("exponent must be +1 or -1, got {0}")]
    BadExponent(i64),
    #[error("genus mismatch: {left} vs {right}")]
    GenusMismatch { left: usize, right: usize },
    #[error("index {index} out of range for word of length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("word is not homologically trivial")]
    NotTrivial,
    #[error("word contains negative letters")]
    NotPositive,
    #[error("relator left side does not match at position {at}: {detail}")]
    NoMatch { at: usize, detail: String },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
}

/// One Dehn twist `T_c^{±1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistLetter {
    curve: Arc<Curve>,
    exponent: i8,
}

impl TwistLetter {
    pub fn new(curve: Arc<Curve>, exponent: i64) -> Result<Self, WordError> {
        match exponent {
            1 | -1 => Ok(Self {
                curve,
                exponent: exponent as i8,
            }),
            e => Err(WordError::BadExponent(e)),
        }
    }

    pub fn positive(curve: Arc<Curve>) -> Self {
        Self { curve, exponent: 1 }
    }

    pub fn curve(&self) -> &Arc<Curve> {
        &self.curve
    }

    pub fn class(&self) -> &HomologyClass {
        self.curve.class()
    }

    pub fn name(&self) -> &str {
        self.curve.name()
    }

    pub fn exponent(&self) -> i64 {
        i64::from(self.exponent)
    }

    pub fn is_separating(&self) -> bool {
        self.curve.is_separating()
    }

    pub fn inverse(&self) -> Self {
        Self {
            curve: self.curve.clone(),
            exponent: -self.exponent,
        }
    }

    /// Same twist: classes agree up to sign, exponents and flags agree.
    pub fn same_twist(&self, other: &Self) -> bool {
        self.exponent == other.exponent
            && self.is_separating() == other.is_separating()
            && self.class().eq_up_to_sign(other.class())
    }

    /// Letter with class replaced by `class`; keeps the curve when nothing changes.
    fn transported(&self, class: HomologyClass) -> Self {
        if &class == self.class() {
            return self.clone();
        }
        let curve = Curve::with_flag(conjugate_name(self.name()), class, self.is_separating());
        Self {
            curve: Arc::new(curve),
            exponent: self.exponent,
        }
    }
}

/// `base` → `base@1`, `base@k` → `base@{k+1}`.
pub fn conjugate_name(name: &str) -> String {
    if let Some((base, k)) = name.rsplit_once('@') {
        if let Ok(k) = k.parse::<u64>() {
            return format!("{base}@{}", k + 1);
        }
    }
    format!("{name}@1")
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TwistWord {
    genus: usize,
    letters: Vec<TwistLetter>,
}

impl TwistWord {
    pub fn empty(genus: usize) -> Self {
        Self {
            genus,
            letters: Vec::new(),
        }
    }

    pub fn new(genus: usize, letters: Vec<TwistLetter>) -> Result<Self, WordError> {
        if let Some(bad) = letters.iter().find(|l| l.curve.genus() != genus) {
            return Err(WordError::GenusMismatch {
                left: genus,
                right: bad.curve.genus(),
            });
        }
        Ok(Self { genus, letters })
    }

    /// All-positive word through the given curves.
    pub fn positive(genus: usize, curves: &[Arc<Curve>]) -> Result<Self, WordError> {
        Self::new(genus, curves.iter().cloned().map(TwistLetter::positive).collect())
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn letters(&self) -> &[TwistLetter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn positive_count(&self) -> usize {
        self.letters.iter().filter(|l| l.exponent > 0).count()
    }

    pub fn negative_count(&self) -> usize {
        self.len() - self.positive_count()
    }

    pub fn is_positive(&self) -> bool {
        self.letters.iter().all(|l| l.exponent > 0)
    }

    pub fn separating_count(&self) -> usize {
        self.letters.iter().filter(|l| l.is_separating()).count()
    }

    fn check_genus(&self, other: &Self) -> Result<(), WordError> {
        if self.genus != other.genus {
            return Err(WordError::GenusMismatch {
                left: self.genus,
                right: other.genus,
            });
        }
        Ok(())
    }

    pub fn concat(&self, other: &Self) -> Result<Self, WordError> {
        self.check_genus(other)?;
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Ok(Self {
            genus: self.genus,
            letters,
        })
    }

    /// Reversed and inverted: the inverse mapping class.
    pub fn inverse(&self) -> Self {
        Self {
            genus: self.genus,
            letters: self.letters.iter().rev().map(TwistLetter::inverse).collect(),
        }
    }

    pub fn power(&self, k: usize) -> Self {
        let mut letters = Vec::with_capacity(self.len() * k);
        for _ in 0..k {
            letters.extend_from_slice(&self.letters);
        }
        Self {
            genus: self.genus,
            letters,
        }
    }

    pub fn slice(&self, range: std::ops::Range<usize>) -> Self {
        Self {
            genus: self.genus,
            letters: self.letters[range].to_vec(),
        }
    }

    /// Distinct curves in order of first appearance, renamed so names are unique per curve,
    /// together with a catalog that parses the serialized word back.
    pub fn with_catalog(&self) -> (Self, CurveCatalog) {
        let mut seen: HashMap<(String, HomologyClass, bool), Arc<Curve>> = HashMap::new();
        let mut used: HashMap<String, usize> = HashMap::new();
        let mut catalog = CurveCatalog::new();
        let mut letters = Vec::with_capacity(self.len());
        for l in &self.letters {
            let key = (l.name().to_string(), l.class().clone(), l.is_separating());
            let curve = match seen.get(&key) {
                Some(c) => c.clone(),
                None => {
                    let n = used.entry(l.name().to_string()).or_insert(0);
                    let name = if *n == 0 {
                        l.name().to_string()
                    } else {
                        format!("{}.{}", l.name(), n)
                    };
                    *n += 1;
                    let c = Arc::new(l.curve.renamed(name));
                    catalog
                        .insert((*c).clone())
                        .expect("fresh names are unique");
                    seen.insert(key, c.clone());
                    c
                }
            };
            letters.push(TwistLetter {
                curve,
                exponent: l.exponent,
            });
        }
        (
            Self {
                genus: self.genus,
                letters,
            },
            catalog,
        )
    }
}

impl fmt::Display for TwistWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&serialize_word(self))
    }
}

/// Tokens `name`, `name^k`, `name^-k`, whitespace separated; `#` starts a comment.
pub fn parse_word(text: &str, catalog: &CurveCatalog, genus: usize) -> Result<TwistWord, WordError> {
    let mut letters = Vec::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for tok in line.split_whitespace() {
            let (name, exp) = match tok.split_once('^') {
                None => (tok, 1i64),
                Some((name, e)) => {
                    let ok = !e.is_empty()
                        && e.trim_start_matches('-').chars().all(|c| c.is_ascii_digit())
                        && !e.trim_start_matches('-').is_empty()
                        && e.matches('-').count() <= 1;
                    if !ok || name.is_empty() {
                        return Err(WordError::MalformedExponent(tok.to_string()));
                    }
                    let k: i64 = e
                        .parse()
                        .map_err(|_| WordError::MalformedExponent(tok.to_string()))?;
                    if k == 0 {
                        return Err(WordError::ZeroExponent(tok.to_string()));
                    }
                    (name, k)
                }
            };
            let curve = catalog
                .get(genus, name)
                .ok_or_else(|| WordError::UnknownCurve {
                    name: name.to_string(),
                    genus,
                })?;
            let letter = TwistLetter {
                curve: curve.clone(),
                exponent: exp.signum() as i8,
            };
            for _ in 0..exp.unsigned_abs() {
                letters.push(letter.clone());
            }
        }
    }
    Ok(TwistWord { genus, letters })
}

/// Inverse of `parse_word`; runs of identical letters collapse to `name^k`.
pub fn serialize_word(w: &TwistWord) -> String {
    let mut out: Vec<String> = Vec::new();
    let mut i = 0;
    while i < w.letters.len() {
        let l = &w.letters[i];
        let mut j = i + 1;
        while j < w.letters.len() && w.letters[j] == *l {
            j += 1;
        }
        let k = (j - i) as i64 * l.exponent();
        out.push(if k == 1 {
            l.name().to_string()
        } else {
            format!("{}^{}", l.name(), k)
        });
        i = j;
    }
    out.join(" ")
}

fn check_index(w: &TwistWord, i: usize) -> Result<(), WordError> {
    if i + 1 >= w.len() {
        return Err(WordError::IndexOutOfRange {
            index: i,
            len: w.len(),
        });
    }
    Ok(())
}

/// `(A_i, A_{i+1}) → (A_i A_{i+1} A_i⁻¹, A_i)`; `i` is 0-based.
pub fn hurwitz_move(w: &TwistWord, i: usize) -> Result<TwistWord, WordError> {
    check_index(w, i)?;
    let a = &w.letters[i];
    let b = &w.letters[i + 1];
    let moved = b.transported(symplectic::twist_apply(a.class(), a.exponent(), b.class()));
    let mut letters = w.letters.clone();
    letters[i] = moved;
    letters[i + 1] = a.clone();
    Ok(TwistWord {
        genus: w.genus,
        letters,
    })
}

/// `(A_i, A_{i+1}) → (A_{i+1}, A_{i+1}⁻¹ A_i A_{i+1})`; undoes `hurwitz_move` at the same index.
pub fn inverse_hurwitz_move(w: &TwistWord, i: usize) -> Result<TwistWord, WordError> {
    check_index(w, i)?;
    let a = &w.letters[i];
    let b = &w.letters[i + 1];
    let moved = a.transported(symplectic::twist_apply(b.class(), -b.exponent(), a.class()));
    let mut letters = w.letters.clone();
    letters[i] = b.clone();
    letters[i + 1] = moved;
    Ok(TwistWord {
        genus: w.genus,
        letters,
    })
}

/// Moves the letter at `from` to position `to <= from` by forward Hurwitz moves,
/// conjugating it by the block it passes.
pub fn slide_letter_left(w: &TwistWord, from: usize, to: usize) -> Result<TwistWord, WordError> {
    if from >= w.len() || to > from {
        return Err(WordError::IndexOutOfRange {
            index: from,
            len: w.len(),
        });
    }
    let m = symplectic::evaluate(&w.slice(to..from));
    let moved = w.letters[from].transported(m.apply(w.letters[from].class()));
    let mut letters = Vec::with_capacity(w.len());
    letters.extend_from_slice(&w.letters[..to]);
    letters.push(moved);
    letters.extend_from_slice(&w.letters[to..from]);
    letters.extend_from_slice(&w.letters[from + 1..]);
    Ok(TwistWord {
        genus: w.genus,
        letters,
    })
}

/// Moves the block `start..start+len` right past the next `past` letters by inverse
/// Hurwitz moves; each moved letter is conjugated by the inverse of the passed block.
pub fn slide_block_right(
    w: &TwistWord,
    start: usize,
    len: usize,
    past: usize,
) -> Result<TwistWord, WordError> {
    let end = start + len;
    if end + past > w.len() {
        return Err(WordError::IndexOutOfRange {
            index: end + past,
            len: w.len(),
        });
    }
    let passed = w.slice(end..end + past);
    let minv = symplectic::evaluate(&passed).inverse();
    let mut letters = Vec::with_capacity(w.len());
    letters.extend_from_slice(&w.letters[..start]);
    letters.extend_from_slice(&passed.letters);
    letters.extend(w.letters[start..end].iter().map(|l| l.transported(minv.apply(l.class()))));
    letters.extend_from_slice(&w.letters[end + past..]);
    Ok(TwistWord {
        genus: w.genus,
        letters,
    })
}

/// Every letter's class mapped by `M(phi)`; an empty `phi` returns `w` unchanged.
pub fn global_conjugate(w: &TwistWord, phi: &TwistWord) -> Result<TwistWord, WordError> {
    w.check_genus(phi)?;
    if phi.is_empty() {
        return Ok(w.clone());
    }
    let m = symplectic::evaluate(phi);
    Ok(conjugate_by_matrix(w, &m))
}

pub(crate) fn conjugate_by_matrix(w: &TwistWord, m: &SymplecticMatrix) -> TwistWord {
    TwistWord {
        genus: w.genus,
        letters: w.letters.iter().map(|l| l.transported(m.apply(l.class()))).collect(),
    }
}

/// `w1 · w2^phi` for all-positive homologically trivial inputs.
pub fn fiber_sum(w1: &TwistWord, w2: &TwistWord, phi: &TwistWord) -> Result<TwistWord, WordError> {
    w1.check_genus(w2)?;
    w1.check_genus(phi)?;
    for w in [w1, w2] {
        if !w.is_positive() {
            return Err(WordError::NotPositive);
        }
        if !symplectic::is_homologically_trivial(w) {
            return Err(WordError::NotTrivial);
        }
    }
    w1.concat(&global_conjugate(w2, phi)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RelatorKind {
    ChainOdd,
    /// Chain `c_1..c_{2k}` against its separating boundary `s_k`.
    ChainEven { k: usize },
    Hyperelliptic,
    Matsumoto,
    Star { h: usize },
    Custom,
}

impl RelatorKind {
    pub fn tag(&self) -> &'static str {
        match self {
            RelatorKind::ChainOdd => "chain_odd",
            RelatorKind::ChainEven { .. } => "chain_even",
            RelatorKind::Hyperelliptic => "hyperelliptic",
            RelatorKind::Matsumoto => "matsumoto",
            RelatorKind::Star { .. } => "star",
            RelatorKind::Custom => "custom",
        }
    }
}

/// A trivial word `X · Y⁻¹` read as the identity `X = Y`; `left_len = |X|`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relator {
    word: TwistWord,
    left_len: usize,
    kind: RelatorKind,
}

impl Relator {
    pub fn custom(word: TwistWord, left_len: usize) -> Result<Self, WordError> {
        Self::tagged(word, left_len, RelatorKind::Custom)
    }

    fn tagged(word: TwistWord, left_len: usize, kind: RelatorKind) -> Result<Self, WordError> {
        if left_len > word.len() {
            return Err(WordError::IndexOutOfRange {
                index: left_len,
                len: word.len(),
            });
        }
        if !symplectic::is_homologically_trivial(&word) {
            return Err(WordError::NotTrivial);
        }
        Ok(Self {
            word,
            left_len,
            kind,
        })
    }

    /// Relator from its two sides.
    pub fn from_sides(left: &TwistWord, right: &TwistWord, kind: RelatorKind) -> Result<Self, WordError> {
        Self::tagged(left.concat(&right.inverse())?, left.len(), kind)
    }

    pub fn word(&self) -> &TwistWord {
        &self.word
    }

    pub fn left_len(&self) -> usize {
        self.left_len
    }

    pub fn kind(&self) -> RelatorKind {
        self.kind
    }

    pub fn genus(&self) -> usize {
        self.word.genus()
    }

    /// `X`.
    pub fn left(&self) -> TwistWord {
        self.word.slice(0..self.left_len)
    }

    /// `Y`.
    pub fn right(&self) -> TwistWord {
        self.word.slice(self.left_len..self.word.len()).inverse()
    }

    /// `Y = X`.
    pub fn reversed(&self) -> Self {
        let right = self.right();
        let word = right.concat(&self.left().inverse()).expect("same genus");
        Self {
            word,
            left_len: right.len(),
            kind: self.kind,
        }
    }
}

/// Builds a family relator from catalog curves at genus `g`.
pub fn build_relator(catalog: &CurveCatalog, kind: RelatorKind, g: usize) -> Result<Relator, WordError> {
    let c = |name: String| -> Result<Arc<Curve>, WordError> { Ok(catalog.require(g, &name)?) };
    let chain = |n: usize| -> Result<Vec<Arc<Curve>>, WordError> {
        (1..=n).map(|i| c(format!("c{i}"))).collect()
    };
    let positive = |curves: Vec<Arc<Curve>>| TwistWord::positive(g, &curves);
    if g == 0 {
        return Err(WordError::OutOfRange("genus must be positive".into()));
    }
    match kind {
        RelatorKind::ChainOdd => {
            let w = positive(chain(2 * g + 1)?)?.power(2 * g + 2);
            let n = w.len();
            Relator::tagged(w, n, kind)
        }
        RelatorKind::ChainEven { k } => {
            if k == 0 || k >= g {
                return Err(WordError::OutOfRange(format!("even chain needs 1 <= k <= g-1, got k={k}, g={g}")));
            }
            let left = positive(chain(2 * k)?)?.power(4 * k + 2);
            let right = positive(vec![c(format!("s{k}"))?])?;
            Relator::from_sides(&left, &right, kind)
        }
        RelatorKind::Hyperelliptic => {
            let cs = chain(2 * g + 1)?;
            let mut half: Vec<Arc<Curve>> = cs[..2 * g].to_vec();
            half.push(cs[2 * g].clone());
            half.push(cs[2 * g].clone());
            half.extend(cs[..2 * g].iter().rev().cloned());
            let w = positive(half)?.power(2);
            let n = w.len();
            Relator::tagged(w, n, kind)
        }
        RelatorKind::Matsumoto => {
            if g < 2 {
                return Err(WordError::OutOfRange(format!("Matsumoto relator needs g >= 2, got {g}")));
            }
            let mut curves: Vec<Arc<Curve>> = (0..=g).map(|i| c(format!("b{i}"))).collect::<Result<_, _>>()?;
            if g % 2 == 0 {
                curves.push(c("c".into())?);
            } else {
                let (a, b) = (c("a".into())?, c("b".into())?);
                curves.extend([a.clone(), a, b.clone(), b]);
            }
            let w = positive(curves)?.power(2);
            let n = w.len();
            Relator::tagged(w, n, kind)
        }
        RelatorKind::Star { h } => {
            if h == 0 || h + 2 > g {
                return Err(WordError::OutOfRange(format!("star relator needs 1 <= h <= g-2, got h={h}, g={g}")));
            }
            let mut block = vec![c(format!("c{}'", 2 * h + 1))?];
            block.extend(chain(2 * h + 1)?.into_iter().rev());
            let left = positive(block)?.power(2 * h + 1);
            let mut right = vec![c(format!("d{}", h + 1))?];
            let mid = c(format!("c{}", 2 * h + 3))?;
            right.extend(std::iter::repeat(mid).take(h));
            right.push(c(format!("e{}", h + 2))?);
            Relator::from_sides(&left, &positive(right)?, kind)
        }
        RelatorKind::Custom => Err(WordError::OutOfRange(
            "custom relators are built with Relator::custom".into(),
        )),
    }
}

/// Replaces the occurrence of `r`'s left side at `at` by its right side.
pub fn substitute(w: &TwistWord, at: usize, r: &Relator) -> Result<TwistWord, WordError> {
    w.check_genus(r.word())?;
    if !symplectic::is_homologically_trivial(r.word()) {
        return Err(WordError::NotTrivial);
    }
    let left = r.left();
    if at + left.len() > w.len() {
        return Err(WordError::NoMatch {
            at,
            detail: format!("left side of length {} overruns word of length {}", left.len(), w.len()),
        });
    }
    for (j, x) in left.letters.iter().enumerate() {
        let y = &w.letters[at + j];
        if !x.same_twist(y) {
            return Err(WordError::NoMatch {
                at,
                detail: format!(
                    "letter {} is {}^{} [{}], relator expects {}^{} [{}]",
                    at + j,
                    y.name(),
                    y.exponent(),
                    y.class(),
                    x.name(),
                    x.exponent(),
                    x.class()
                ),
            });
        }
    }
    let mut letters = Vec::with_capacity(w.len() + r.word.len() - 2 * left.len());
    letters.extend_from_slice(&w.letters[..at]);
    letters.extend(r.right().letters);
    letters.extend_from_slice(&w.letters[at + left.len()..]);
    Ok(TwistWord {
        genus: w.genus,
        letters,
    })
}
