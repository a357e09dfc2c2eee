use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use slopeforge_core::constructions::{
    approximate_slope, build_counterexample, build_high_slope_word, high_slope_sequence, ConstructionRecord,
};
use slopeforge_core::decimal::{fixed, parse_exact};
use slopeforge_core::ledger::{self, csv_row, FibrationInvariants, CSV_HEADER};
use slopeforge_core::{
    build_relator, parse_word, relator_signature_delta, serialize_word, signature_of_word, validate_catalog,
    CurveCatalog, RelatorKind, TwistWord, DEFAULT_BUDGET,
};

use crate::{ApproxArgs, CliError, Common, ConstructKind, Emit, Format, RelatorArgs, RelatorName};

const PLACES: u32 = 12;

type Out<'a> = &'a mut dyn Write;

fn write_out(out: Out, text: &str) -> Result<(), CliError> {
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::io(Path::new("<stdout>"), e))
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn load_catalog(common: &Common, genera: &[usize]) -> Result<CurveCatalog, CliError> {
    match &common.catalog {
        Some(path) => Ok(CurveCatalog::parse(&read(path)?)?),
        None => Ok(CurveCatalog::builtin_range(genera.iter().copied())),
    }
}

fn check_genus(g: usize) -> Result<(), CliError> {
    if g == 0 {
        return Err(CliError::OutOfRange("genus must be at least 1".into()));
    }
    Ok(())
}

fn budget() -> Result<usize, CliError> {
    match std::env::var("SLOPEFORGE_BUDGET") {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| CliError::Parse(format!("SLOPEFORGE_BUDGET must be a nonnegative integer, got {v:?}"))),
        Err(_) => Ok(DEFAULT_BUDGET),
    }
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s: OsString = path.as_os_str().to_owned();
    s.push(".catalog");
    PathBuf::from(s)
}

/// Writes `w` and the catalog of exactly the curves it uses.
fn emit_word(path: &Path, w: &TwistWord, label: &str) -> Result<(), CliError> {
    let (w, cat) = w.with_catalog();
    let text = format!(
        "# {label}\n# genus {} with {} letters; curves in {}\n{}\n",
        w.genus(),
        w.len(),
        sidecar(path).file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
        serialize_word(&w)
    );
    write_file(path, &text)?;
    write_file(&sidecar(path), &cat.to_text())
}

fn csv_text(rows: &[(Option<usize>, Option<usize>, &FibrationInvariants)]) -> Result<String, CliError> {
    let mut s = format!("{CSV_HEADER}\n");
    for (h, m, x) in rows {
        s.push_str(&csv_row(*h, *m, x)?);
        s.push('\n');
    }
    Ok(s)
}

fn table(rows: &[(&str, String)]) -> String {
    let width = rows.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    rows.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn ledger_rows(x: &FibrationInvariants) -> Result<Vec<(&'static str, String)>, CliError> {
    let lambda = x.slope()?;
    let mut rows = vec![("genus", x.genus().to_string())];
    if let Some(n) = x.letters() {
        rows.push(("n", n.to_string()));
    }
    rows.extend([
        ("e", x.euler().to_string()),
        ("sigma", x.sigma().to_string()),
        ("c1^2", x.c1_squared().to_string()),
        ("chi_h", x.chi_h()?.to_string()),
        ("K^2", x.k_squared().to_string()),
        ("chi_f", x.chi_f()?.to_string()),
        ("lambda", lambda.to_string()),
        ("lambda_decimal", fixed(&lambda, PLACES)),
    ]);
    Ok(rows)
}

pub fn invariants(out: Out, path: &Path, g: usize, common: &Common) -> Result<(), CliError> {
    check_genus(g)?;
    let cat = load_catalog(common, &[g])?;
    let w = parse_word(&read(path)?, &cat, g)?;
    if w.is_empty() {
        return Err(CliError::Parse(format!("{}: word has no letters", path.display())));
    }
    let rep = signature_of_word(&w)?;
    let x = FibrationInvariants::new(g, rep.euler, rep.sigma)?.with_letters(w.len());
    match common.format {
        Format::Csv => write_out(out, &csv_text(&[(None, None, &x)])?),
        Format::Table => write_out(out, &table(&ledger_rows(&x)?)),
    }
}

fn report_record(
    out: Out,
    rec: &ConstructionRecord,
    h: Option<usize>,
    m: Option<usize>,
    emit: &Emit,
    format: Format,
) -> Result<(), CliError> {
    let csv = csv_text(&[(h, m, &rec.ledger)])?;
    if format == Format::Csv {
        write_out(out, &csv)?;
    } else {
        let mut s = format!("{}\n", rec.label);
        for step in &rec.provenance {
            s.push_str(&format!("  {step}\n"));
        }
        s.push_str(&table(&ledger_rows(&rec.ledger)?));
        write_out(out, &s)?;
    }
    if emit.verify {
        verify(out, rec, format)?;
    }
    if let Some(p) = &emit.emit_csv {
        write_file(p, &csv)?;
    }
    if let (Some(p), Some(w)) = (&emit.emit_word, &rec.word) {
        emit_word(p, w, &rec.label)?;
    }
    Ok(())
}

fn verify(out: Out, rec: &ConstructionRecord, format: Format) -> Result<(), CliError> {
    let line = match rec.verify()? {
        Some(rep) => format!(
            "verified {}: engine e={} sigma={} matches ledger",
            rec.label, rep.euler, rep.sigma
        ),
        None => format!("not verified {}: no word (ledger only)", rec.label),
    };
    if format == Format::Csv {
        eprintln!("{line}");
        Ok(())
    } else {
        write_out(out, &format!("{line}\n"))
    }
}

pub fn construct(out: Out, kind: ConstructKind) -> Result<(), CliError> {
    match kind {
        ConstructKind::HighSlope { genus, h, emit, common } => {
            check_genus(genus)?;
            let cat = load_catalog(&common, &[genus])?;
            let rec = build_high_slope_word(&cat, genus, h)?;
            report_record(out, &rec, Some(h), Some(1), &emit, common.format)
        }
        ConstructKind::Counterexample { genus, emit, common } => {
            check_genus(genus)?;
            let cat = load_catalog(&common, &[genus])?;
            let rec = build_counterexample(&cat, genus)?;
            report_record(out, &rec, None, None, &emit, common.format)
        }
        ConstructKind::Sequence { genus, h, m, emit, common } => {
            check_genus(genus)?;
            if m == 0 {
                return Err(CliError::OutOfRange("--m must be at least 1".into()));
            }
            let cat = load_catalog(&common, &[genus])?;
            let budget = budget()?;
            let outcome = high_slope_sequence(&cat, genus, h, m, budget)?;
            let rows: Vec<_> = outcome
                .records
                .iter()
                .enumerate()
                .map(|(i, r)| (Some(h), Some(i + 1), &r.ledger))
                .collect();
            let csv = csv_text(&rows)?;
            if common.format == Format::Csv {
                write_out(out, &csv)?;
            } else {
                let mut lines = vec![[
                    "m".to_string(),
                    "letters".into(),
                    "K^2".into(),
                    "chi_f".into(),
                    "lambda".into(),
                    "lambda_decimal".into(),
                ]];
                for (i, r) in outcome.records.iter().enumerate() {
                    let lambda = r.ledger.slope()?;
                    let n = r.ledger.letters().map(|n| n.to_string()).unwrap_or_default();
                    lines.push([
                        (i + 1).to_string(),
                        if r.word.is_some() { n } else { format!("{n}*") },
                        r.ledger.k_squared().to_string(),
                        r.ledger.chi_f()?.to_string(),
                        lambda.to_string(),
                        fixed(&lambda, PLACES),
                    ]);
                }
                let widths: Vec<usize> = (0..6).map(|c| lines.iter().map(|l| l[c].len()).max().unwrap_or(0)).collect();
                let mut s = format!("sequence(g={genus},h={h}) limit {}\n", ledger::slope_limit(genus, h)?);
                for l in &lines {
                    let cells: Vec<String> = l.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
                    s.push_str(cells.join("  ").trim_end());
                    s.push('\n');
                }
                if outcome.budget_exceeded {
                    s.push_str("* ledger only\n");
                }
                write_out(out, &s)?;
            }
            if outcome.budget_exceeded {
                let first = outcome.records.iter().position(|r| r.word.is_none()).map_or(0, |i| i + 1);
                eprintln!("warning: word-length budget {budget} exceeded from stage m={first}; later stages are ledger-only");
            }
            if emit.verify {
                for r in outcome.records.iter().filter(|r| r.word.is_some()) {
                    verify(out, r, common.format)?;
                }
            }
            if let Some(p) = &emit.emit_csv {
                write_file(p, &csv)?;
            }
            if let Some(p) = &emit.emit_word {
                if let Some(r) = outcome.records.iter().rev().find(|r| r.word.is_some()) {
                    emit_word(p, r.word.as_ref().unwrap(), &r.label)?;
                }
            }
            Ok(())
        }
    }
}

pub fn approx(out: Out, args: &ApproxArgs) -> Result<(), CliError> {
    let r = parse_exact(&args.r)?;
    let (two, eight) = (BigRational::from_integer(2.into()), BigRational::from_integer(8.into()));
    if !(two < r && r < eight) {
        return Err(CliError::Interval(format!("r must lie in the open interval (2, 8), got {r}")));
    }
    let eps = parse_exact(&args.eps)?;
    if eps.is_negative() {
        return Err(CliError::Parse("--eps must be nonnegative".into()));
    }
    let g = args
        .genus
        .ok_or_else(|| CliError::Parse("approx needs --genus".into()))?;
    check_genus(g)?;
    let low = ledger::hyperelliptic_invariants(g)?;
    let h = match args.h {
        Some(h) => h,
        None => ledger::h_max(g)?,
    };
    let high = ledger::theorem_ledger(g, h)?;
    let a = approximate_slope(&r, &eps, &low, &high, args.max_copies)?;
    let err_dec = if a.error.is_zero() { fixed(&a.error, PLACES) } else { format!("{:.6e}", ledger::approx_f64(&a.error)) };
    match args.common.format {
        Format::Csv => write_out(
            out,
            &format!(
                "g,h,k,l,lambda_num,lambda_den,lambda_decimal,error\n{g},{h},{},{},{},{},{},{}\n",
                a.k,
                a.l,
                a.lambda.numer(),
                a.lambda.denom(),
                fixed(&a.lambda, PLACES),
                err_dec
            ),
        ),
        Format::Table => {
            let block = |x: &FibrationInvariants| -> Result<String, CliError> {
                let l = x.slope()?;
                Ok(format!("K^2={} chi_f={} lambda={l}", x.k_squared(), x.chi_f()?))
            };
            write_out(
                out,
                &table(&[
                    ("r", r.to_string()),
                    ("eps", eps.to_string()),
                    ("low", format!("hyperelliptic(g={g}) {}", block(&low)?)),
                    ("high", format!("stage(g={g},h={h},m=1) {}", block(&high)?)),
                    ("k", a.k.to_string()),
                    ("l", a.l.to_string()),
                    ("lambda", a.lambda.to_string()),
                    ("lambda_decimal", fixed(&a.lambda, PLACES)),
                    ("error", a.error.to_string()),
                    ("error_decimal", err_dec),
                ]),
            )
        }
    }
}

pub fn validate(out: Out, genera: &[usize], common: &Common) -> Result<(), CliError> {
    for &g in genera {
        check_genus(g)?;
    }
    let cat = load_catalog(common, genera)?;
    let report = validate_catalog(&cat);
    write_out(out, &report.to_string())?;
    if report.passed() {
        write_out(out, &format!("catalog PASS ({} curves)\n", cat.len()))
    } else {
        Err(CliError::Validation)
    }
}

pub fn relator(out: Out, args: &RelatorArgs) -> Result<(), CliError> {
    check_genus(args.genus)?;
    let kind = match args.kind {
        RelatorName::Hyperelliptic => RelatorKind::Hyperelliptic,
        RelatorName::Matsumoto => RelatorKind::Matsumoto,
        RelatorName::ChainOdd => RelatorKind::ChainOdd,
        RelatorName::ChainEven => RelatorKind::ChainEven { k: args.h },
        RelatorName::Star => RelatorKind::Star { h: args.h },
    };
    let cat = load_catalog(&args.common, &[args.genus])?;
    let r = build_relator(&cat, kind, args.genus)?;
    let (de, ds) = relator_signature_delta(&r)?;
    let rows = [
        ("relator", format!("{}(g={})", kind.tag(), args.genus)),
        ("left", serialize_word(&r.left())),
        ("right", serialize_word(&r.right())),
        ("letters", format!("{} -> {}", r.left_len(), r.word().len() - r.left_len())),
        ("delta_e", de.to_string()),
        ("delta_sigma", ds.to_string()),
    ];
    match args.common.format {
        Format::Csv => write_out(
            out,
            &format!("relator,g,left_len,right_len,delta_e,delta_sigma\n{},{},{},{},{de},{ds}\n", kind.tag(), args.genus, r.left_len(), r.word().len() - r.left_len()),
        )?,
        Format::Table => write_out(out, &table(&rows))?,
    }
    if let Some(p) = &args.emit.emit_word {
        emit_word(p, r.word(), &format!("{} relator, left side then inverse right side", kind.tag()))?;
    }
    Ok(())
}
