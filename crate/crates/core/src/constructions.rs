//! Explicit factorizations and ledger pipelines for the slope constructions.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use thiserror::Error;

use crate::ledger::{self, FibrationInvariants, LedgerError};
use crate::signature::{signature_of_word, SignatureError, SignatureReport};
use crate::surface::CurveCatalog;
use crate::symplectic::{symplectic_transporter, TransportError};
use crate::word::{
    build_relator, fiber_sum, global_conjugate, slide_block_right, substitute, RelatorKind, TwistLetter,
    TwistWord, WordError,
};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructionError {
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("transporter failed: {0}")]
    Transport(#[from] TransportError),
    #[error(transparent)]
    Word(#[from] WordError),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error("base word must start with a nonseparating letter")]
    SeparatingBase,
    #[error("engine (e, sigma) = ({engine_e}, {engine_sigma}) disagrees with ledger ({ledger_e}, {ledger_sigma})")]
    Mismatch {
        engine_e: i64,
        engine_sigma: i64,
        ledger_e: BigInt,
        ledger_sigma: BigInt,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProvenanceStep {
    Block { relator: &'static str, genus: usize },
    Conjugate { target: String, transporter_len: usize },
    FiberSum { copies: usize },
    Rearrange { prefix_len: usize },
    Power { exponent: usize },
    Substitute { relator: &'static str, h: usize, at: usize },
    LedgerOnly { reason: String },
}

impl fmt::Display for ProvenanceStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProvenanceStep::Block { relator, genus } => write!(f, "block {relator}({genus})"),
            ProvenanceStep::Conjugate { target, transporter_len } => {
                write!(f, "conjugate first letter onto {target} ({transporter_len}-letter transporter)")
            }
            ProvenanceStep::FiberSum { copies } => write!(f, "fiber_sum x{copies}"),
            ProvenanceStep::Rearrange { prefix_len } => write!(f, "hurwitz rearrangement exposing {prefix_len}-letter prefix"),
            ProvenanceStep::Power { exponent } => write!(f, "power {exponent}"),
            ProvenanceStep::Substitute { relator, h, at } => write!(f, "substitute {relator}(h={h}) at {at}"),
            ProvenanceStep::LedgerOnly { reason } => write!(f, "ledger only: {reason}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionRecord {
    pub label: String,
    pub word: Option<TwistWord>,
    pub ledger: FibrationInvariants,
    pub provenance: Vec<ProvenanceStep>,
}

impl ConstructionRecord {
    /// Runs the signature engine on the word and compares `(e, σ)` with the ledger.
    pub fn verify(&self) -> Result<Option<SignatureReport>, ConstructionError> {
        let Some(w) = &self.word else {
            return Ok(None);
        };
        let rep = signature_of_word(w)?;
        if BigInt::from(rep.euler) != *self.ledger.euler() || BigInt::from(rep.sigma) != *self.ledger.sigma() {
            return Err(ConstructionError::Mismatch {
                engine_e: rep.euler,
                engine_sigma: rep.sigma,
                ledger_e: self.ledger.euler().clone(),
                ledger_sigma: self.ledger.sigma().clone(),
            });
        }
        Ok(Some(rep))
    }
}

fn check_h(g: usize, h: usize) -> Result<(), ConstructionError> {
    if g < 3 || h == 0 || h + 2 > g {
        return Err(ConstructionError::OutOfRange(format!("need g >= 3 and 1 <= h <= g-2, got g={g}, h={h}")));
    }
    Ok(())
}

/// Predicted letter count after one star stage over a base of `base_len` letters.
pub fn stage_length(base_len: usize, h: usize) -> usize {
    (2 * h + 1) * (2 * h + 2) * (base_len - 1) + h + 2
}

/// One star stage over an all-positive trivial `base` whose first letter is nonseparating.
///
/// Conjugates `base` so its first letter lands on `c'_{2h+1}, c_{2h+1}, ..., c_1` in turn,
/// multiplies the copies, slides each residue right through the intact copies (identity
/// blocks, so no class changes) to expose the prefix, raises to the `(2h+1)`-th power,
/// gathers the prefixes the same way, and substitutes the star relator at position 0.
pub fn star_stage(
    catalog: &CurveCatalog,
    base: &TwistWord,
    h: usize,
) -> Result<(TwistWord, Vec<ProvenanceStep>), ConstructionError> {
    let g = base.genus();
    check_h(g, h)?;
    let first = base.letters().first().ok_or(ConstructionError::SeparatingBase)?;
    if first.is_separating() {
        return Err(ConstructionError::SeparatingBase);
    }
    let x = first.class().clone();
    let mut targets = vec![format!("c{}'", 2 * h + 1)];
    targets.extend((1..=2 * h + 1).rev().map(|i| format!("c{i}")));
    let n_blocks = targets.len();
    let l = base.len();
    let mut steps = Vec::new();
    let mut w = TwistWord::empty(g);
    for name in &targets {
        let target = catalog.require(g, name).map_err(WordError::from)?;
        let phi = symplectic_transporter(&x, target.class())?;
        let q = global_conjugate(base, &phi)?;
        debug_assert!(q.letters()[0].class().eq_up_to_sign(target.class()));
        let mut letters = q.letters().to_vec();
        letters[0] = TwistLetter::positive(target.clone());
        w = w.concat(&TwistWord::new(g, letters)?)?;
        steps.push(ProvenanceStep::Conjugate {
            target: name.clone(),
            transporter_len: phi.len(),
        });
    }
    steps.push(ProvenanceStep::FiberSum { copies: n_blocks });
    for t in 0..n_blocks {
        w = slide_block_right(&w, t + 1, l - 1, (n_blocks - t - 1) * l)?;
    }
    steps.push(ProvenanceStep::Rearrange { prefix_len: n_blocks });
    let k = 2 * h + 1;
    let v_len = n_blocks * (l - 1);
    let mut p = w.power(k);
    for c in 0..k - 1 {
        p = slide_block_right(&p, (c + 1) * n_blocks, v_len, (k - c - 1) * (n_blocks + v_len))?;
    }
    steps.push(ProvenanceStep::Power { exponent: k });
    let r = build_relator(catalog, RelatorKind::Star { h }, g)?;
    let out = substitute(&p, 0, &r)?;
    steps.push(ProvenanceStep::Substitute {
        relator: "star",
        h,
        at: 0,
    });
    debug_assert_eq!(out.len(), stage_length(l, h));
    Ok((out, steps))
}

/// High-slope word for `(g, h)` built on the Matsumoto relator.
pub fn build_high_slope_word(catalog: &CurveCatalog, g: usize, h: usize) -> Result<ConstructionRecord, ConstructionError> {
    check_h(g, h)?;
    let base = build_relator(catalog, RelatorKind::Matsumoto, g)?;
    let (word, mut steps) = star_stage(catalog, base.word(), h)?;
    steps.insert(0, ProvenanceStep::Block { relator: "matsumoto", genus: g });
    Ok(ConstructionRecord {
        label: format!("high-slope(g={g},h={h})"),
        word: Some(word),
        ledger: ledger::theorem_ledger(g, h)?,
        provenance: steps,
    })
}

/// `h_g · h_g^{T_{d2}}`.
pub fn build_counterexample(catalog: &CurveCatalog, g: usize) -> Result<ConstructionRecord, ConstructionError> {
    if g < 3 {
        return Err(ConstructionError::OutOfRange(format!("counterexample needs g >= 3, got {g}")));
    }
    let hg = build_relator(catalog, RelatorKind::Hyperelliptic, g)?;
    let d2 = catalog.require(g, "d2").map_err(WordError::from)?;
    let phi = TwistWord::positive(g, &[d2])?;
    let word = fiber_sum(hg.word(), hg.word(), &phi)?;
    let hl = ledger::hyperelliptic_invariants(g)?;
    Ok(ConstructionRecord {
        label: format!("counterexample(g={g})"),
        word: Some(word),
        ledger: ledger::ledger_fiber_sum(&hl, &hl)?,
        provenance: vec![
            ProvenanceStep::Block {
                relator: "hyperelliptic",
                genus: g,
            },
            ProvenanceStep::Conjugate {
                target: "d2".into(),
                transporter_len: 1,
            },
            ProvenanceStep::FiberSum { copies: 2 },
        ],
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequenceOutcome {
    pub records: Vec<ConstructionRecord>,
    /// Some stage is ledger-only: its word would exceed the budget.
    pub budget_exceeded: bool,
}

/// Stages `1..=m`; words are materialized while they fit in `budget` letters.
pub fn high_slope_sequence(
    catalog: &CurveCatalog,
    g: usize,
    h: usize,
    m: usize,
    budget: usize,
) -> Result<SequenceOutcome, ConstructionError> {
    check_h(g, h)?;
    let ledgers = ledger::corollary_iterate(g, h, m)?;
    let mut records: Vec<ConstructionRecord> = Vec::with_capacity(m);
    let mut budget_exceeded = false;
    for (i, led) in ledgers.into_iter().enumerate() {
        let stage = i + 1;
        let predicted = led.letters().and_then(ToPrimitive::to_usize).unwrap_or(usize::MAX);
        let prev_word = records.last().and_then(|r: &ConstructionRecord| r.word.clone());
        let fits = predicted <= budget;
        let (word, provenance) = match (stage, fits, prev_word) {
            (1, true, _) => {
                let rec = build_high_slope_word(catalog, g, h)?;
                (rec.word, rec.provenance)
            }
            (_, true, Some(prev)) => {
                let (w, steps) = star_stage(catalog, &prev, h)?;
                (Some(w), steps)
            }
            _ => {
                budget_exceeded = true;
                (
                    None,
                    vec![ProvenanceStep::LedgerOnly {
                        reason: format!("{predicted} letters exceed budget {budget}"),
                    }],
                )
            }
        };
        records.push(ConstructionRecord {
            label: format!("stage(g={g},h={h},m={stage})"),
            word,
            ledger: led,
            provenance,
        });
    }
    Ok(SequenceOutcome {
        records,
        budget_exceeded,
    })
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ApproxError {
    #[error("r = {r} is not inside the open interval ({lo}, {hi})")]
    OutsideInterval {
        r: BigRational,
        lo: BigRational,
        hi: BigRational,
    },
    #[error("eps must be nonnegative")]
    NegativeEps,
    #[error("genus mismatch between blocks: {0} vs {1}")]
    GenusMismatch(usize, usize),
    #[error("no (k, l) with k + l <= {0} within tolerance")]
    BoundExhausted(u64),
    #[error(transparent)]
    Ledger(#[from] LedgerError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Approximation {
    pub k: u64,
    pub l: u64,
    pub lambda: BigRational,
    pub error: BigRational,
}

/// Smallest `k + l` with `|λ_{k,l} − r| ≤ eps`, where
/// `λ_{k,l} = (k K²_L + l K²_U) / (k χ_L + l χ_U)`.
///
/// For fixed `s = k + l` the slope is monotone in `l`, so only the floor and ceiling of
/// the real root `l* = s (K_L − rχ_L) / ((K_L − rχ_L) − (K_U − rχ_U))` are checked.
pub fn approximate_slope(
    r: &BigRational,
    eps: &BigRational,
    low: &FibrationInvariants,
    high: &FibrationInvariants,
    max_copies: u64,
) -> Result<Approximation, ApproxError> {
    if low.genus() != high.genus() {
        return Err(ApproxError::GenusMismatch(low.genus(), high.genus()));
    }
    if eps.is_negative() {
        return Err(ApproxError::NegativeEps);
    }
    let (lam_l, lam_u) = (low.slope()?, high.slope()?);
    let (lo, hi) = if lam_l <= lam_u { (&lam_l, &lam_u) } else { (&lam_u, &lam_l) };
    if !(lo < r && r < hi) {
        return Err(ApproxError::OutsideInterval {
            r: r.clone(),
            lo: lo.clone(),
            hi: hi.clone(),
        });
    }
    let (kl, cl) = (low.k_squared(), low.chi_f()?);
    let (ku, cu) = (high.k_squared(), high.chi_f()?);
    let (rn, rd) = (r.numer().clone(), r.denom().clone());
    let (en, ed) = (eps.numer().clone(), eps.denom().clone());
    // scaled residuals: a = rd·K_L − rn·χ_L, b = rd·K_U − rn·χ_U
    let a = &rd * &kl - &rn * &cl;
    let b = &rd * &ku - &rn * &cu;
    let span = &a - &b;
    for s in 1..=max_copies {
        let sb = BigInt::from(s);
        let floor = (&sb * &a).div_floor(&span);
        let mut best: Option<(BigInt, BigInt, u64)> = None;
        for cand in [floor.clone(), floor + 1] {
            let Some(l) = cand.to_u64().filter(|&l| l <= s) else {
                continue;
            };
            let k = s - l;
            let (kb, lb) = (BigInt::from(k), BigInt::from(l));
            let dev = (&kb * &a + &lb * &b).abs();
            let den = &rd * (&kb * &cl + &lb * &cu);
            if &dev * &ed <= &en * &den {
                let better = match &best {
                    None => true,
                    Some((bd, bden, _)) => &dev * bden < bd * &den,
                };
                if better {
                    best = Some((dev, den, l));
                }
            }
        }
        if let Some((dev, den, l)) = best {
            let k = s - l;
            let lambda = BigRational::new(
                BigInt::from(k) * &kl + BigInt::from(l) * &ku,
                BigInt::from(k) * &cl + BigInt::from(l) * &cu,
            );
            return Ok(Approximation {
                k,
                l,
                lambda,
                error: if dev.is_zero() { BigRational::zero() } else { BigRational::new(dev, den) },
            });
        }
    }
    Err(ApproxError::BoundExhausted(max_copies))
}
