//! Closed oriented surfaces, their first homology and named curve catalogs.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::symplectic;
use crate::word::{build_relator, RelatorKind};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SurfaceError {
    #[error("genus must be positive")]
    ZeroGenus,
    #[error("genus mismatch: {left} vs {right}")]
    GenusMismatch { left: usize, right: usize },
    #[error("class of length {len} does not fit genus {genus}")]
    BadLength { genus: usize, len: usize },
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CatalogError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("duplicate curve `{name}` at genus {genus}")]
    Duplicate { name: String, genus: usize },
    #[error("curve `{name}` missing at genus {genus}")]
    MissingCurve { name: String, genus: usize },
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}

/// Genus and standard symplectic basis `a_1, b_1, ..., a_g, b_g`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SurfaceContext {
    genus: usize,
}

impl SurfaceContext {
    pub fn new(genus: usize) -> Result<Self, SurfaceError> {
        if genus == 0 {
            return Err(SurfaceError::ZeroGenus);
        }
        Ok(Self { genus })
    }

    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn rank(&self) -> usize {
        2 * self.genus
    }

    pub fn basis(&self) -> Vec<String> {
        (1..=self.genus)
            .flat_map(|i| [format!("a{i}"), format!("b{i}")])
            .collect()
    }

    /// Block-diagonal `J` with blocks `[[0,1],[-1,0]]`.
    pub fn form(&self) -> Vec<Vec<i64>> {
        let n = self.rank();
        let mut j = vec![vec![0i64; n]; n];
        for i in 0..self.genus {
            j[2 * i][2 * i + 1] = 1;
            j[2 * i + 1][2 * i] = -1;
        }
        j
    }
}

/// Integer vector in `H_1(Σ_g)` with respect to `(a_1, b_1, ..., a_g, b_g)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HomologyClass(Vec<BigInt>);

impl HomologyClass {
    pub fn zero(genus: usize) -> Self {
        Self(vec![BigInt::zero(); 2 * genus])
    }

    pub fn from_coords(coords: Vec<BigInt>) -> Result<Self, SurfaceError> {
        if coords.is_empty() || coords.len() % 2 != 0 {
            return Err(SurfaceError::BadLength {
                genus: coords.len() / 2,
                len: coords.len(),
            });
        }
        Ok(Self(coords))
    }

    /// Panics on odd or empty input; meant for literals.
    pub fn from_i64s(coords: &[i64]) -> Self {
        Self::from_coords(coords.iter().map(|&c| BigInt::from(c)).collect())
            .expect("class literal must have even positive length")
    }

    /// `a_i`, 1-based.
    pub fn a(genus: usize, i: usize) -> Self {
        let mut v = Self::zero(genus);
        v.0[2 * (i - 1)] = BigInt::one();
        v
    }

    /// `b_i`, 1-based. `b_0` and `b_{g+1}` are zero.
    pub fn b(genus: usize, i: usize) -> Self {
        let mut v = Self::zero(genus);
        if (1..=genus).contains(&i) {
            v.0[2 * (i - 1) + 1] = BigInt::one();
        }
        v
    }

    pub fn genus(&self) -> usize {
        self.0.len() / 2
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn content(&self) -> BigInt {
        self.0.iter().fold(BigInt::zero(), |acc, x| acc.gcd(x))
    }

    pub fn is_primitive(&self) -> bool {
        self.content().is_one()
    }

    /// `⟨self, other⟩ = selfᵀ J other`.
    pub fn pairing(&self, other: &Self) -> BigInt {
        debug_assert_eq!(self.0.len(), other.0.len());
        let mut s = BigInt::zero();
        for (x, y) in self.0.chunks_exact(2).zip(other.0.chunks_exact(2)) {
            s += &x[0] * &y[1] - &x[1] * &y[0];
        }
        s
    }

    pub fn neg(&self) -> Self {
        Self(self.0.iter().map(|x| -x).collect())
    }

    pub fn add(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(x, y)| x + y).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(x, y)| x - y).collect())
    }

    pub fn scale(&self, k: &BigInt) -> Self {
        Self(self.0.iter().map(|x| x * k).collect())
    }

    pub fn eq_up_to_sign(&self, other: &Self) -> bool {
        self == other || *self == other.neg()
    }

    /// Representative with first nonzero coordinate positive.
    pub fn normalized(&self) -> Self {
        match self.0.iter().find(|x| !x.is_zero()) {
            Some(x) if x.is_negative() => self.neg(),
            _ => self.clone(),
        }
    }

    pub(crate) fn coords_mut(&mut self) -> &mut [BigInt] {
        &mut self.0
    }
}

impl fmt::Debug for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{self}]")
    }
}

impl fmt::Display for HomologyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(ToString::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Curve {
    name: String,
    class: HomologyClass,
    separating: bool,
}

impl Curve {
    /// Separating flag is inferred from the zero class.
    pub fn new(name: impl Into<String>, class: HomologyClass) -> Self {
        let separating = class.is_zero();
        Self {
            name: name.into(),
            class,
            separating,
        }
    }

    /// Keeps the given flag even if it disagrees with the class; `validate_catalog` flags such curves.
    pub fn with_flag(name: impl Into<String>, class: HomologyClass, separating: bool) -> Self {
        Self {
            name: name.into(),
            class,
            separating,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn genus(&self) -> usize {
        self.class.genus()
    }

    pub fn class(&self) -> &HomologyClass {
        &self.class
    }

    pub fn is_separating(&self) -> bool {
        self.separating
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            ..self.clone()
        }
    }
}

pub fn intersection_number(u: &Curve, v: &Curve) -> Result<BigInt, SurfaceError> {
    if u.genus() != v.genus() {
        return Err(SurfaceError::GenusMismatch {
            left: u.genus(),
            right: v.genus(),
        });
    }
    Ok(u.class().pairing(v.class()))
}

/// `c_1..c_{2g+1}` with `[c_{2i}] = a_i`, `[c_{2i-1}] = b_{i-1} + b_i`.
pub fn standard_chain_classes(g: usize) -> Vec<Curve> {
    (1..=2 * g + 1)
        .map(|i| Curve::new(format!("c{i}"), chain_class(g, i)))
        .collect()
}

fn chain_class(g: usize, i: usize) -> HomologyClass {
    if i % 2 == 0 {
        HomologyClass::a(g, i / 2)
    } else {
        let j = (i - 1) / 2;
        HomologyClass::b(g, j).add(&HomologyClass::b(g, j + 1))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FamilyKey {
    Chain { genus: usize },
    Hyperelliptic { genus: usize },
    Matsumoto { genus: usize },
    Star { genus: usize, h: usize },
}

impl FamilyKey {
    pub fn genus(&self) -> usize {
        match *self {
            FamilyKey::Chain { genus }
            | FamilyKey::Hyperelliptic { genus }
            | FamilyKey::Matsumoto { genus }
            | FamilyKey::Star { genus, .. } => genus,
        }
    }

    /// Every family key admissible at genus `g`.
    pub fn all_at(g: usize) -> Vec<FamilyKey> {
        let mut keys = vec![FamilyKey::Chain { genus: g }, FamilyKey::Hyperelliptic { genus: g }];
        if g >= 2 {
            keys.push(FamilyKey::Matsumoto { genus: g });
        }
        for h in 1..=g.saturating_sub(2) {
            keys.push(FamilyKey::Star { genus: g, h });
        }
        keys
    }

    pub fn curve_names(&self) -> Vec<String> {
        let chain = |n: usize| (1..=n).map(|i| format!("c{i}")).collect::<Vec<_>>();
        match *self {
            FamilyKey::Chain { genus } => chain(2 * genus + 1),
            FamilyKey::Hyperelliptic { genus } => {
                let mut v = chain(2 * genus + 1);
                if genus >= 2 {
                    v.push("d2".into());
                }
                v
            }
            FamilyKey::Matsumoto { genus } => {
                let mut v: Vec<String> = (0..=genus).map(|i| format!("b{i}")).collect();
                if genus % 2 == 0 {
                    v.push("c".into());
                } else {
                    v.push("a".into());
                    v.push("b".into());
                }
                v
            }
            FamilyKey::Star { h, .. } => {
                let mut v = chain(2 * h + 1);
                v.push(format!("c{}'", 2 * h + 1));
                v.push(format!("d{}", h + 1));
                v.push(format!("c{}", 2 * h + 3));
                v.push(format!("e{}", h + 2));
                v
            }
        }
    }

    /// Curve whose presence means the catalog claims to carry this family.
    fn anchor(&self) -> String {
        match *self {
            FamilyKey::Chain { .. } | FamilyKey::Hyperelliptic { .. } => "c1".into(),
            FamilyKey::Matsumoto { .. } => "b0".into(),
            FamilyKey::Star { h, .. } => format!("c{}'", 2 * h + 1),
        }
    }
}

impl fmt::Display for FamilyKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKey::Chain { genus } => write!(f, "chain({genus})"),
            FamilyKey::Hyperelliptic { genus } => write!(f, "hyperelliptic({genus})"),
            FamilyKey::Matsumoto { genus } => write!(f, "matsumoto({genus})"),
            FamilyKey::Star { genus, h } => write!(f, "star({genus},{h})"),
        }
    }
}

/// Named curves keyed by `(genus, name)`. Immutable once built; cheap to share.
#[derive(Debug, Clone, Default)]
pub struct CurveCatalog {
    curves: BTreeMap<(usize, String), Arc<Curve>>,
}

impl CurveCatalog {
    pub fn new() -> Self {
        Self::default()
    }

    /// Built-in curve data for one genus.
    pub fn builtin(g: usize) -> Self {
        let mut cat = Self::new();
        cat.extend_builtin(g);
        cat
    }

    /// Built-in curve data for every genus in `gs`.
    pub fn builtin_range(gs: impl IntoIterator<Item = usize>) -> Self {
        let mut cat = Self::new();
        for g in gs {
            cat.extend_builtin(g);
        }
        cat
    }

    fn extend_builtin(&mut self, g: usize) {
        if g == 0 {
            return;
        }
        for c in builtin_curves(g) {
            self.curves.insert((g, c.name().to_string()), Arc::new(c));
        }
    }

    pub fn insert(&mut self, curve: Curve) -> Result<(), CatalogError> {
        let key = (curve.genus(), curve.name().to_string());
        if self.curves.contains_key(&key) {
            return Err(CatalogError::Duplicate {
                name: key.1,
                genus: key.0,
            });
        }
        self.curves.insert(key, Arc::new(curve));
        Ok(())
    }

    pub fn get(&self, g: usize, name: &str) -> Option<&Arc<Curve>> {
        self.curves.get(&(g, name.to_string()))
    }

    pub fn require(&self, g: usize, name: &str) -> Result<Arc<Curve>, CatalogError> {
        self.get(g, name).cloned().ok_or_else(|| CatalogError::MissingCurve {
            name: name.to_string(),
            genus: g,
        })
    }

    pub fn genera(&self) -> Vec<usize> {
        let mut gs: Vec<usize> = self.curves.keys().map(|(g, _)| *g).collect();
        gs.dedup();
        gs
    }

    pub fn curves_of(&self, g: usize) -> impl Iterator<Item = &Arc<Curve>> {
        self.curves
            .range((g, String::new())..(g + 1, String::new()))
            .map(|(_, c)| c)
    }

    pub fn len(&self) -> usize {
        self.curves.len()
    }

    pub fn is_empty(&self) -> bool {
        self.curves.is_empty()
    }

    pub fn family(&self, key: FamilyKey) -> Result<Vec<Arc<Curve>>, CatalogError> {
        key.curve_names()
            .iter()
            .map(|n| self.require(key.genus(), n))
            .collect()
    }

    /// Parses `curve <name> g=<int> class=<i1,...,i2g>` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, CatalogError> {
        let mut cat = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| CatalogError::Parse { line: line_no, msg };
            let toks: Vec<&str> = line.split_whitespace().collect();
            if toks.len() != 4 || toks[0] != "curve" {
                return Err(err(format!("expected `curve <name> g=<int> class=<...>`, got `{line}`")));
            }
            let name = toks[1];
            if !valid_name(name) {
                return Err(err(format!("invalid curve name `{name}`")));
            }
            let g: usize = toks[2]
                .strip_prefix("g=")
                .and_then(|s| s.parse().ok())
                .filter(|&g| g > 0)
                .ok_or_else(|| err(format!("bad genus field `{}`", toks[2])))?;
            let coords = toks[3]
                .strip_prefix("class=")
                .ok_or_else(|| err(format!("bad class field `{}`", toks[3])))?
                .split(',')
                .map(|s| s.trim().parse::<BigInt>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| err(format!("bad class entry: {e}")))?;
            if coords.len() != 2 * g {
                return Err(err(format!("class has {} entries, expected {}", coords.len(), 2 * g)));
            }
            let class = HomologyClass::from_coords(coords)?;
            cat.insert(Curve::new(name, class)).map_err(|e| err(e.to_string()))?;
        }
        Ok(cat)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for ((g, name), c) in &self.curves {
            out.push_str(&format!("curve {name} g={g} class={}\n", c.class()));
        }
        out
    }
}

/// Names usable in the word DSL: no whitespace, no `^`, no `#`.
pub fn valid_name(name: &str) -> bool {
    !name.is_empty()
        && !name
            .chars()
            .any(|ch| ch.is_whitespace() || ch == '^' || ch == '#' || ch == ',')
}

fn builtin_curves(g: usize) -> Vec<Curve> {
    let mut out = standard_chain_classes(g);
    for j in 1..=g {
        out.push(Curve::new(format!("d{j}"), HomologyClass::b(g, j)));
        out.push(Curve::new(format!("e{j}"), HomologyClass::b(g, j)));
    }
    for j in 1..g {
        out.push(Curve::new(format!("s{j}"), HomologyClass::zero(g)));
    }
    if g >= 2 {
        out.extend(matsumoto_curves(g));
    }
    for h in 1..=g.saturating_sub(2) {
        let class = HomologyClass::b(g, h).sub(&HomologyClass::b(g, h + 2));
        out.push(Curve::new(format!("c{}'", 2 * h + 1), class));
    }
    out
}

/// Matsumoto curves `b0..bg` plus `c` (even g) or `a`, `b` (odd g).
fn matsumoto_curves(g: usize) -> Vec<Curve> {
    let k = g / 2;
    let reduced = reduced_family(k);
    let lift = |u: &[i64]| {
        let mut w = vec![0i64; 2 * g];
        for i in 0..k {
            for t in [i, g - 1 - i] {
                w[2 * t] += u[2 * i];
                w[2 * t + 1] += u[2 * i + 1];
            }
        }
        w
    };
    let mut out = Vec::new();
    if g % 2 == 0 {
        for (j, u) in reduced.iter().enumerate() {
            out.push(Curve::new(format!("b{j}"), HomologyClass::from_i64s(&lift(u))));
        }
        out.push(Curve::new("c", HomologyClass::zero(g)));
    } else {
        for (j, u) in reduced.iter().enumerate() {
            let mut w = lift(u);
            w[2 * k] -= 1;
            w[2 * k + 1] += 1;
            out.push(Curve::new(format!("b{j}"), HomologyClass::from_i64s(&w)));
        }
        let mut last = vec![0i64; 2 * g];
        last[2 * k] = -1;
        last[2 * k + 1] = -1;
        out.push(Curve::new(format!("b{g}"), HomologyClass::from_i64s(&last)));
        out.push(Curve::new("a", HomologyClass::b(g, k + 1)));
        out.push(Curve::new("b", HomologyClass::b(g, k + 1)));
    }
    out
}

/// `2k+1` classes in genus `k` pairwise intersecting `+1` in index order.
fn reduced_family(k: usize) -> Vec<Vec<i64>> {
    if k == 0 {
        return vec![Vec::new()];
    }
    let form = |x: &[i64], y: &[i64]| -> i64 {
        (0..k).map(|i| x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i]).sum()
    };
    let mut chain: Vec<Vec<i64>> = Vec::with_capacity(2 * k);
    for c in standard_chain_classes(k).into_iter().take(2 * k) {
        let mut v: Vec<i64> = c
            .class()
            .coords()
            .iter()
            .map(|x| i64::try_from(x).expect("small"))
            .collect();
        if let Some(prev) = chain.last() {
            if form(prev, &v) != 1 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        chain.push(v);
    }
    let mut v0 = vec![0i64; 2 * k];
    for i in 0..k {
        v0[2 * i] = if i % 2 == 0 { 1 } else { -1 };
    }
    if form(&chain[0], &v0) == -1 {
        v0.iter_mut().for_each(|x| *x = -*x);
    }
    debug_assert_eq!(form(&chain[0], &v0), 1);
    debug_assert!(chain[1..].iter().all(|d| form(d, &v0) == 0));
    let mut out = vec![v0];
    for d in &chain {
        let prev = out.last().expect("nonempty");
        out.push(prev.iter().zip(d).map(|(x, y)| x - y).collect());
    }
    out
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FamilyReport {
    pub key: FamilyKey,
    pub violations: Vec<String>,
}

impl FamilyReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    /// Curve-level violations (flag/class disagreement, non-primitive classes).
    pub curve_violations: Vec<String>,
    pub families: Vec<FamilyReport>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.curve_violations.is_empty() && self.families.iter().all(FamilyReport::passed)
    }

    pub fn violations(&self) -> Vec<String> {
        let mut v = self.curve_violations.clone();
        for f in &self.families {
            v.extend(f.violations.iter().map(|m| format!("{}: {m}", f.key)));
        }
        v
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in &self.curve_violations {
            writeln!(f, "curve FAIL {v}")?;
        }
        for fam in &self.families {
            if fam.passed() {
                writeln!(f, "{} PASS", fam.key)?;
            } else {
                for v in &fam.violations {
                    writeln!(f, "{} FAIL {v}", fam.key)?;
                }
            }
        }
        Ok(())
    }
}

/// Checks curve invariants and, for every family the catalog carries, its
/// intersection pattern and the homological triviality of its relator.
pub fn validate_catalog(catalog: &CurveCatalog) -> ValidationReport {
    let mut report = ValidationReport::default();
    for ((g, name), c) in &catalog.curves {
        if c.is_separating() != c.class().is_zero() {
            report.curve_violations.push(format!(
                "{name} (g={g}): separating={} but class is {}",
                c.is_separating(),
                if c.class().is_zero() { "zero" } else { "nonzero" }
            ));
        }
        if !c.class().is_zero() && !c.class().is_primitive() {
            report
                .curve_violations
                .push(format!("{name} (g={g}): class {} is not primitive", c.class()));
        }
    }
    for g in catalog.genera() {
        for key in FamilyKey::all_at(g) {
            if catalog.get(g, &key.anchor()).is_none() {
                continue;
            }
            report.families.push(FamilyReport {
                key,
                violations: check_family(catalog, key),
            });
        }
    }
    report
}

fn check_family(catalog: &CurveCatalog, key: FamilyKey) -> Vec<String> {
    let g = key.genus();
    let mut out = Vec::new();
    let missing: Vec<String> = key
        .curve_names()
        .into_iter()
        .filter(|n| catalog.get(g, n).is_none())
        .collect();
    if !missing.is_empty() {
        out.push(format!("missing curves {}", missing.join(", ")));
        return out;
    }
    let get = |n: &str| catalog.get(g, n).expect("checked above").clone();
    let chain_len = match key {
        FamilyKey::Chain { .. } | FamilyKey::Hyperelliptic { .. } => 2 * g + 1,
        FamilyKey::Star { h, .. } => 2 * h + 1,
        FamilyKey::Matsumoto { .. } => 0,
    };
    let chain: Vec<_> = (1..=chain_len).map(|i| get(&format!("c{i}"))).collect();
    for i in 0..chain.len() {
        if chain[i].is_separating() {
            out.push(format!("c{} must be nonseparating", i + 1));
        }
        for j in i + 1..chain.len() {
            let p = chain[i].class().pairing(chain[j].class());
            let ok = if j == i + 1 { p.abs().is_one() } else { p.is_zero() };
            if !ok {
                out.push(format!("<c{},c{}> = {p} breaks the chain pattern", i + 1, j + 1));
            }
        }
    }
    if let FamilyKey::Star { h, .. } = key {
        let cp = get(&format!("c{}'", 2 * h + 1));
        for (i, c) in chain.iter().enumerate() {
            let p = cp.class().pairing(c.class());
            let ok = if i + 1 == 2 * h { p.abs().is_one() } else { p.is_zero() };
            if !ok {
                out.push(format!("<c{}',c{}> = {p} breaks the star pattern", 2 * h + 1, i + 1));
            }
        }
        if get(&format!("d{}", h + 1)).is_separating() {
            out.push(format!("d{} must be nonseparating", h + 1));
        }
    }
    if let FamilyKey::Hyperelliptic { genus } = key {
        if genus >= 2 && get("d2").is_separating() {
            out.push("d2 must be nonseparating".into());
        }
    }
    let kind = match key {
        FamilyKey::Chain { .. } => RelatorKind::ChainOdd,
        FamilyKey::Hyperelliptic { .. } => RelatorKind::Hyperelliptic,
        FamilyKey::Matsumoto { .. } => RelatorKind::Matsumoto,
        FamilyKey::Star { h, .. } => RelatorKind::Star { h },
    };
    match build_relator(catalog, kind, g) {
        Ok(r) => {
            if !symplectic::is_homologically_trivial(r.word()) {
                out.push(format!("{} relator is not homologically trivial", kind.tag()));
            }
        }
        Err(e) => out.push(format!("relator construction failed: {e}")),
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn form_is_antisymmetric_and_squares_to_minus_identity() {
        for g in 1..=4 {
            let j = SurfaceContext::new(g).unwrap().form();
            let n = 2 * g;
            for r in 0..n {
                for c in 0..n {
                    assert_eq!(j[r][c], -j[c][r]);
                    let sq: i64 = (0..n).map(|t| j[r][t] * j[t][c]).sum();
                    assert_eq!(sq, if r == c { -1 } else { 0 });
                }
            }
        }
        assert!(SurfaceContext::new(0).is_err());
        assert_eq!(SurfaceContext::new(2).unwrap().basis(), ["a1", "b1", "a2", "b2"]);
    }

    #[test]
    fn chain_classes_small_genus() {
        let c1 = standard_chain_classes(1);
        assert_eq!(c1[0].class(), &HomologyClass::from_i64s(&[0, 1]));
        assert_eq!(c1[1].class(), &HomologyClass::from_i64s(&[1, 0]));
        assert_eq!(c1[2].class(), &HomologyClass::from_i64s(&[0, 1]));
        let c2 = standard_chain_classes(2);
        assert_eq!(c2[3].class(), &HomologyClass::a(2, 2));
        assert_eq!(c2[2].class(), &HomologyClass::from_i64s(&[0, 1, 0, 1]));
    }

    #[test]
    fn chain_adjacency_pattern() {
        for g in 1..=6 {
            let cs = standard_chain_classes(g);
            for i in 0..cs.len() {
                assert!(!cs[i].is_separating());
                for j in 0..cs.len() {
                    let p = intersection_number(&cs[i], &cs[j]).unwrap();
                    if i.abs_diff(j) == 1 {
                        assert!(p.abs().is_one(), "g={g} {i} {j}");
                    } else {
                        assert!(p.is_zero());
                    }
                }
            }
        }
    }

    #[test]
    fn basis_pairings() {
        let a1 = Curve::new("a1", HomologyClass::a(2, 1));
        let b1 = Curve::new("b1", HomologyClass::b(2, 1));
        let a2 = Curve::new("a2", HomologyClass::a(2, 2));
        assert_eq!(intersection_number(&a1, &b1).unwrap(), BigInt::one());
        assert_eq!(intersection_number(&a1, &a2).unwrap(), BigInt::zero());
        let c = standard_chain_classes(2);
        assert_eq!(intersection_number(&c[1], &c[2]).unwrap(), BigInt::one());
        let other = Curve::new("x", HomologyClass::a(3, 1));
        assert!(matches!(
            intersection_number(&a1, &other),
            Err(SurfaceError::GenusMismatch { .. })
        ));
    }

    #[test]
    fn reduced_family_pairs_to_one() {
        for k in 1..=5 {
            let vs = reduced_family(k);
            assert_eq!(vs.len(), 2 * k + 1);
            let form = |x: &[i64], y: &[i64]| -> i64 {
                (0..k).map(|i| x[2 * i] * y[2 * i + 1] - x[2 * i + 1] * y[2 * i]).sum()
            };
            for i in 0..vs.len() {
                for j in i + 1..vs.len() {
                    assert_eq!(form(&vs[i], &vs[j]), 1, "k={k} {i} {j}");
                }
            }
        }
    }

    #[test]
    fn builtin_catalog_validates() {
        let cat = CurveCatalog::builtin_range(1..=7);
        let report = validate_catalog(&cat);
        assert!(report.passed(), "{report}");
        assert!(report
            .families
            .iter()
            .any(|f| f.key == FamilyKey::Star { genus: 7, h: 5 }));
    }

    #[test]
    fn zeroed_nonseparating_curve_fails() {
        let mut cat = CurveCatalog::new();
        for c in standard_chain_classes(2) {
            let c = if c.name() == "c1" {
                Curve::with_flag("c1", HomologyClass::zero(2), false)
            } else {
                c
            };
            cat.insert(c).unwrap();
        }
        let report = validate_catalog(&cat);
        assert!(!report.passed());
        assert!(report.curve_violations.iter().any(|v| v.contains("c1")));
    }

    #[test]
    fn perturbed_matsumoto_fails() {
        let base = CurveCatalog::builtin(2);
        let mut cat = CurveCatalog::new();
        for c in base.curves_of(2) {
            let c = if c.name() == "b1" {
                Curve::new("b1", c.class().add(&HomologyClass::a(2, 1)))
            } else {
                (**c).clone()
            };
            cat.insert(c).unwrap();
        }
        let report = validate_catalog(&cat);
        let fam = report
            .families
            .iter()
            .find(|f| f.key == FamilyKey::Matsumoto { genus: 2 })
            .unwrap();
        assert!(!fam.passed());
        assert!(fam.violations.iter().any(|v| v.contains("not homologically trivial")));
    }

    #[test]
    fn catalog_text_round_trip() {
        let cat = CurveCatalog::builtin_range(2..=3);
        let text = cat.to_text();
        let back = CurveCatalog::parse(&text).unwrap();
        assert_eq!(back.to_text(), text);
        assert_eq!(back.len(), cat.len());
    }

    #[test]
    fn catalog_parse_errors() {
        assert!(matches!(
            CurveCatalog::parse("curve x g=1 class=1,0,0"),
            Err(CatalogError::Parse { line: 1, .. })
        ));
        assert!(CurveCatalog::parse("curve x g=0 class=").is_err());
        assert!(CurveCatalog::parse("# only a comment\n\ncurve x g=1 class=1,0 # tail").is_ok());
        assert!(matches!(
            CurveCatalog::parse("curve x g=1 class=1,0\ncurve x g=1 class=0,1"),
            Err(CatalogError::Parse { line: 2, .. })
        ));
        assert!(CurveCatalog::parse("curve x^2 g=1 class=1,0").is_err());
    }

    #[test]
    fn separating_flag_inferred_from_parse() {
        let cat = CurveCatalog::parse("curve s g=2 class=0,0,0,0").unwrap();
        assert!(cat.get(2, "s").unwrap().is_separating());
    }
}
