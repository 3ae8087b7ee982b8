//! Implementations of the ten sub-commands.
//!
//! Every handler returns `Ok(true)` for a clean run, `Ok(false)` for a
//! negative verdict (exit code 1) and `Err` for input errors (exit code 2).
//! Human-readable output goes to stdout; machine artifacts go to `--out`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use anyhow::{Context, Result};
use serde::Serialize;

use lcdcodes::enumerate::{
    classify_monomial, count_report, enumerate_lcd, variant_h, verify_appendix, Classification,
    CountReport, Variant,
};
use lcdcodes::fixtures::parse_catalog;
use lcdcodes::lcd::{is_lcd_bruteforce, LcdEvidence};
use lcdcodes::lcp::{
    adder_recover, build_scheme_from_matrices, cubing_table, dsm_encode, dsm_recover, fia_detect,
    is_lcp, sca_leakage_check, security_threshold, FaultOutcome, LcpCriterion, LcpVerdict,
    MaskedOp, MaskingScheme, ScaReport, ThresholdReport, ThresholdVariant,
};
use lcdcodes::matrix::RingMatrix;
use lcdcodes::metrics::{code_distances, hamming_weight, WeightProfile};
use lcdcodes::ring::ChainRing;
use lcdcodes::space::{MixedCode, MixedMatrix, MixedShape};
use lcdcodes::Error;

use crate::input::{demo_messages, load_matrix, load_pair, load_source, parse_message};
use crate::output::{opt, OutDir};
use crate::{Command, OutputArgs, ShapeArgs};

/// Dispatches one parsed command line.
pub fn run(cmd: Command) -> Result<bool> {
    match cmd {
        Command::Check {
            input,
            h,
            variant,
            output,
        } => {
            let out = prepare(&output)?;
            check(input.file, input.builtin, h, variant.map(Into::into), &out)
        }
        Command::Dual { input, h, output } => {
            let out = prepare(&output)?;
            dual(input.file, input.builtin, h, &out)
        }
        Command::Distance { input, output } => {
            let out = prepare(&output)?;
            distance(input.file, input.builtin, &out)
        }
        Command::Counts {
            shape,
            variant,
            budget,
            output,
        } => {
            let out = prepare(&output)?;
            counts(&shape, variant.into(), budget, &out)
        }
        Command::Enumerate {
            shape,
            h,
            variant,
            budget,
            output,
        } => {
            let out = prepare(&output)?;
            enumerate(&shape, h, variant.map(Into::into), budget, &out)
        }
        Command::Classify {
            shape,
            h,
            variant,
            budget,
            output,
        } => {
            let out = prepare(&output)?;
            classify(&shape, h, variant.map(Into::into), budget, &out)
        }
        Command::VerifyAppendix {
            file,
            builtin,
            complete,
            budget,
            output,
        } => {
            let out = prepare(&output)?;
            verify(file, builtin, complete, budget, &out)
        }
        Command::Lcp { pair, output } => {
            let out = prepare(&output)?;
            lcp(pair.files, pair.builtin, &out)
        }
        Command::DsmDemo {
            pair,
            x,
            y,
            output,
        } => {
            let out = prepare(&output)?;
            dsm_demo(pair.files, pair.builtin, x.as_deref(), y.as_deref(), &out)
        }
        Command::AdderDemo {
            pair,
            x,
            y,
            output,
        } => {
            let out = prepare(&output)?;
            adder_demo(pair.files, pair.builtin, x.as_deref(), y.as_deref(), &out)
        }
    }
}

/// Applies the shared output flags: worker-pool size and report directory.
fn prepare(output: &OutputArgs) -> Result<OutDir> {
    if let Some(jobs) = output.jobs {
        // A one-shot process configures the global pool exactly once.
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .context("cannot configure the worker pool")?;
    }
    OutDir::new(output.out.clone())
}

fn build_shape(args: &ShapeArgs) -> Result<MixedShape> {
    let ring = ChainRing::parse_spec(&args.ring)?;
    Ok(MixedShape::new(ring, args.s, args.blocks[0], args.blocks[1])?)
}

/// Resolves the Frobenius exponent from `--h` or `--variant`.
fn resolve_h(h: usize, variant: Option<Variant>, ring: &ChainRing) -> Result<usize> {
    match variant {
        Some(v) => Ok(variant_h(ring, v)?),
        None => Ok(h),
    }
}

fn shape_line(shape: &MixedShape, h: usize) -> String {
    format!(
        "ring {}, s {}, blocks ({}, {}), h = {h}",
        shape.ring().name(),
        shape.s(),
        shape.a(),
        shape.b()
    )
}

/// One-line display of a square matrix over the base ring.
fn render_square(m: &RingMatrix) -> String {
    if m.rows() == 0 {
        return "()".to_string();
    }
    let rows: Vec<String> = (0..m.rows())
        .map(|i| {
            (0..m.cols())
                .map(|j| m.ring().render_elem(m.get(i, j)))
                .collect::<Vec<_>>()
                .join(" ")
        })
        .collect();
    format!("({})", rows.join("; "))
}

fn is_identity(m: &RingMatrix) -> bool {
    (0..m.rows()).all(|i| (0..m.cols()).all(|j| m.get(i, j) == u8::from(i == j)))
}

// ---------------------------------------------------------------------------
// check / dual / distance
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CheckReport<'a> {
    schema: u32,
    command: &'a str,
    input: &'a str,
    ring: &'a str,
    s: usize,
    blocks: [usize; 2],
    h: usize,
    lcd: bool,
    evidence: &'a LcdEvidence,
}

fn check(
    file: Option<PathBuf>,
    builtin: Option<String>,
    h: usize,
    variant: Option<Variant>,
    out: &OutDir,
) -> Result<bool> {
    let nm = load_matrix(file.as_deref(), builtin.as_deref())?;
    let shape = nm.matrix.shape().clone();
    let h = resolve_h(h, variant, shape.ring())?;
    let code = MixedCode::from_generator_matrix(&nm.matrix);
    let verdict = is_lcd_bruteforce(&code, h)?;
    println!("LCD: {}", verdict.is_lcd);
    if let LcdEvidence::IntersectionWitness { word } = &verdict.evidence {
        println!("intersection witness: {}", shape.render_word(word));
    }
    out.write_json(
        "check",
        &CheckReport {
            schema: 1,
            command: "check",
            input: &nm.name,
            ring: shape.ring().name(),
            s: shape.s(),
            blocks: [shape.a(), shape.b()],
            h,
            lcd: verdict.is_lcd,
            evidence: &verdict.evidence,
        },
    )?;
    Ok(verdict.is_lcd)
}

#[derive(Serialize)]
struct DualReport<'a> {
    schema: u32,
    command: &'a str,
    input: &'a str,
    ring: &'a str,
    s: usize,
    blocks: [usize; 2],
    h: usize,
    dual_type: String,
    dual_size: u64,
    rows: Vec<String>,
}

fn dual(file: Option<PathBuf>, builtin: Option<String>, h: usize, out: &OutDir) -> Result<bool> {
    let nm = load_matrix(file.as_deref(), builtin.as_deref())?;
    let shape = nm.matrix.shape().clone();
    let code = MixedCode::from_generator_matrix(&nm.matrix);
    let dual = code.dual(h)?;
    let rendered = dual.generator_matrix().render();
    println!(
        "# dual of {} under h = {h}: type {}, {} codewords",
        nm.name,
        dual.code_type(),
        dual.len()
    );
    print!("{rendered}");
    let rows: Vec<String> = dual
        .generator_matrix()
        .row_vecs()
        .iter()
        .map(|r| shape.render_word(r))
        .collect();
    out.write_json(
        "dual",
        &DualReport {
            schema: 1,
            command: "dual",
            input: &nm.name,
            ring: shape.ring().name(),
            s: shape.s(),
            blocks: [shape.a(), shape.b()],
            h,
            dual_type: dual.code_type().to_string(),
            dual_size: dual.len() as u64,
            rows,
        },
    )?;
    out.write_text("dual.code", &rendered)?;
    Ok(true)
}

#[derive(Serialize)]
struct DistanceReport<'a> {
    schema: u32,
    command: &'a str,
    input: &'a str,
    ring: &'a str,
    s: usize,
    blocks: [usize; 2],
    code_type: String,
    codewords: u64,
    profile: &'a WeightProfile,
}

fn distance(file: Option<PathBuf>, builtin: Option<String>, out: &OutDir) -> Result<bool> {
    let nm = load_matrix(file.as_deref(), builtin.as_deref())?;
    let shape = nm.matrix.shape().clone();
    let code = MixedCode::from_generator_matrix(&nm.matrix);
    let profile = code_distances(&code);
    println!("type: {}", code.code_type());
    println!("codewords: {}", code.len());
    println!("hamming distance: {}", opt(profile.min_hamming));
    match profile.min_lee {
        Some(d) => println!("lee distance: {d}"),
        None if code.len() == 1 => println!("lee distance: -"),
        None => println!(
            "lee distance: no Lee table for this alphabet ({})",
            shape.ring().name()
        ),
    }
    out.write_json(
        "distance",
        &DistanceReport {
            schema: 1,
            command: "distance",
            input: &nm.name,
            ring: shape.ring().name(),
            s: shape.s(),
            blocks: [shape.a(), shape.b()],
            code_type: code.code_type().to_string(),
            codewords: code.len() as u64,
            profile: &profile,
        },
    )?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// counts / enumerate / classify
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct CountsEnvelope<'a> {
    schema: u32,
    command: &'a str,
    /// Which of the three values settles a disagreement.
    authoritative: &'a str,
    report: &'a CountReport,
}

fn counts(args: &ShapeArgs, variant: Variant, budget: Option<u64>, out: &OutDir) -> Result<bool> {
    let shape = build_shape(args)?;
    let report = count_report(&shape, variant, budget)?;
    println!(
        "ring {}, s {}, blocks ({}, {}), {variant} inner product (h = {})",
        report.ring, report.s, report.a, report.b, report.h
    );
    println!("submodules visited: {}", report.submodules);
    println!("  k0  l0      formula       census  agree");
    for cell in &report.cells {
        println!(
            "  {:>2}  {:>2}  {:>11}  {:>11}  {}",
            cell.k0,
            cell.l0,
            cell.formula,
            cell.census,
            if cell.agrees { "yes" } else { "NO" }
        );
    }
    let cell_mismatches = report.cells.iter().filter(|c| !c.agrees).count();
    let reference_mismatch = report.reference_matches_census == Some(false);
    let mismatches = cell_mismatches + usize::from(reference_mismatch);
    println!(
        "non-zero LCD codes: census {}, formula {}",
        report.census_nonzero, report.formula_nonzero
    );
    match report.reference_nonzero {
        Some(printed) => println!(
            "printed reference: {printed} — {}",
            if reference_mismatch {
                "DISAGREES with the census (census is authoritative)"
            } else {
                "matches the census"
            }
        ),
        None => println!("printed reference: none for this shape"),
    }
    println!("mismatches: {mismatches}");
    out.write_json(
        "counts",
        &CountsEnvelope {
            schema: 1,
            command: "counts",
            authoritative: "census",
            report: &report,
        },
    )?;
    let rows: Vec<Vec<String>> = report
        .cells
        .iter()
        .map(|c| {
            vec![
                c.k0.to_string(),
                c.l0.to_string(),
                c.formula.clone(),
                c.census.to_string(),
                c.agrees.to_string(),
            ]
        })
        .collect();
    out.write_csv("counts", &["k0", "l0", "formula", "census", "agree"], &rows)?;
    Ok(true)
}

#[derive(Serialize)]
struct EnumeratedCode {
    code_type: String,
    codewords: u64,
    rows: Vec<String>,
}

#[derive(Serialize)]
struct EnumerateReport<'a> {
    schema: u32,
    command: &'a str,
    ring: &'a str,
    s: usize,
    blocks: [usize; 2],
    h: usize,
    total: u64,
    by_type: Vec<(String, u64)>,
    codes: Vec<EnumeratedCode>,
}

fn enumerate(
    args: &ShapeArgs,
    h: usize,
    variant: Option<Variant>,
    budget: Option<u64>,
    out: &OutDir,
) -> Result<bool> {
    let shape = build_shape(args)?;
    let h = resolve_h(h, variant, shape.ring())?;
    let codes = enumerate_lcd(&shape, h, budget)?;
    let mut by_type: BTreeMap<String, u64> = BTreeMap::new();
    for c in &codes {
        *by_type.entry(c.code_type().to_string()).or_insert(0) += 1;
    }
    println!("{}", shape_line(&shape, h));
    println!("non-zero LCD codes: {}", codes.len());
    for (t, n) in &by_type {
        println!("  type {t}: {n}");
    }
    let listed: Vec<EnumeratedCode> = codes
        .iter()
        .map(|c| EnumeratedCode {
            code_type: c.code_type().to_string(),
            codewords: c.len() as u64,
            rows: c
                .generator_matrix()
                .row_vecs()
                .iter()
                .map(|r| shape.render_word(r))
                .collect(),
        })
        .collect();
    out.write_json(
        "enumerate",
        &EnumerateReport {
            schema: 1,
            command: "enumerate",
            ring: shape.ring().name(),
            s: shape.s(),
            blocks: [shape.a(), shape.b()],
            h,
            total: codes.len() as u64,
            by_type: by_type.into_iter().collect(),
            codes: listed,
        },
    )?;
    Ok(true)
}

#[derive(Serialize)]
struct ClassifyReport<'a> {
    schema: u32,
    command: &'a str,
    ring: &'a str,
    s: usize,
    blocks: [usize; 2],
    h: usize,
    classification: &'a Classification,
}

fn classify(
    args: &ShapeArgs,
    h: usize,
    variant: Option<Variant>,
    budget: Option<u64>,
    out: &OutDir,
) -> Result<bool> {
    let shape = build_shape(args)?;
    let h = resolve_h(h, variant, shape.ring())?;
    let codes = enumerate_lcd(&shape, h, budget)?;
    let classification = classify_monomial(&codes)?;
    println!("{}", shape_line(&shape, h));
    println!(
        "non-zero LCD codes: {}; monomial classes: {}; group order: {}",
        classification.total_codes,
        classification.classes.len(),
        classification.group_order
    );
    println!("  class  type         members    orbit  d_H  d_L");
    for (i, class) in classification.classes.iter().enumerate() {
        println!(
            "  {:>5}  {:<11}  {:>7}  {:>7}  {:>3}  {:>3}",
            i + 1,
            class.code_type,
            class.members,
            class.orbit_size,
            opt(class.min_hamming),
            opt(class.min_lee)
        );
    }
    out.write_json(
        "classify",
        &ClassifyReport {
            schema: 1,
            command: "classify",
            ring: shape.ring().name(),
            s: shape.s(),
            blocks: [shape.a(), shape.b()],
            h,
            classification: &classification,
        },
    )?;
    let rows: Vec<Vec<String>> = classification
        .classes
        .iter()
        .enumerate()
        .map(|(i, c)| {
            vec![
                (i + 1).to_string(),
                c.code_type.clone(),
                c.members.to_string(),
                c.orbit_size.to_string(),
                opt(c.min_hamming),
                opt(c.min_lee),
                c.canonical_fingerprint.clone(),
            ]
        })
        .collect();
    out.write_csv(
        "classify",
        &[
            "class",
            "code_type",
            "members",
            "orbit_size",
            "min_hamming",
            "min_lee",
            "canonical_fingerprint",
        ],
        &rows,
    )?;
    Ok(true)
}

// ---------------------------------------------------------------------------
// verify-appendix
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct VerifyEnvelope<'a> {
    schema: u32,
    command: &'a str,
    input: &'a str,
    report: &'a lcdcodes::enumerate::AppendixReport,
}

fn verify(
    file: Option<PathBuf>,
    builtin: Option<String>,
    complete: bool,
    budget: Option<u64>,
    out: &OutDir,
) -> Result<bool> {
    let (name, text) = load_source(file.as_deref(), builtin.as_deref())?;
    let catalog = parse_catalog(&text).with_context(|| name.clone())?;
    if !catalog.failures.is_empty() {
        for failure in &catalog.failures {
            eprintln!("error: {name}: {failure}");
        }
        anyhow::bail!(
            "{name}: {} malformed catalog entries",
            catalog.failures.len()
        );
    }
    let entries: Vec<(String, u32, MixedMatrix)> = catalog
        .entries
        .iter()
        .map(|e| (e.label.clone(), e.claimed_lee, e.matrix.clone()))
        .collect();
    let report = verify_appendix(&catalog.shape, catalog.h, &entries, Vec::new(), complete, budget)?;
    for entry in &report.entries {
        if !entry.is_lcd {
            println!("{}: not complementary dual", entry.label);
        }
        if !entry.lee_ok {
            println!(
                "{}: claimed Lee distance {}, computed {}",
                entry.label,
                entry.claimed_lee,
                opt(entry.computed_lee)
            );
        }
    }
    if let Some((x, y)) = &report.equivalent_pair {
        println!("monomially equivalent entries: {x} and {y}");
    }
    println!(
        "{name}: {} entries — all LCD: {}; Lee distances exact: {}; pairwise inequivalent: {}",
        report.total_entries,
        if report.all_lcd { "yes" } else { "NO" },
        if report.all_lee_ok { "yes" } else { "NO" },
        if report.pairwise_inequivalent {
            "yes"
        } else {
            "NO"
        }
    );
    let mut ok = report.all_lcd && report.all_lee_ok && report.pairwise_inequivalent;
    if let Some(c) = &report.completeness {
        println!(
            "completeness: census {} classes, listed {} — {}",
            c.census_classes,
            c.listed_entries,
            if c.complete { "complete" } else { "INCOMPLETE" }
        );
        ok &= c.complete;
    }
    println!("verdict: {}", if ok { "pass" } else { "fail" });
    out.write_json(
        "verify-appendix",
        &VerifyEnvelope {
            schema: 1,
            command: "verify-appendix",
            input: &name,
            report: &report,
        },
    )?;
    Ok(ok)
}

// ---------------------------------------------------------------------------
// lcp
// ---------------------------------------------------------------------------

#[derive(Serialize)]
struct LcpReport<'a> {
    schema: u32,
    command: &'a str,
    input_c: &'a str,
    input_d: &'a str,
    ring: &'a str,
    s: usize,
    blocks: [usize; 2],
    lcp: bool,
    direct: &'a LcpVerdict,
    gram: Option<&'a LcpVerdict>,
    residue: Option<&'a LcpVerdict>,
}

/// Runs one criterion, treating "not weakly free" as not applicable.
fn try_criterion(
    c: &MixedCode,
    d: &MixedCode,
    criterion: LcpCriterion,
) -> Result<Option<LcpVerdict>> {
    match is_lcp(c, d, criterion) {
        Ok(v) => Ok(Some(v)),
        Err(Error::NotWeaklyFree(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

fn criterion_line(v: Option<&LcpVerdict>) -> String {
    match v {
        Some(v) => v.is_lcp.to_string(),
        None => "n/a (not weakly free)".to_string(),
    }
}

fn lcp(files: Vec<PathBuf>, builtin: Option<String>, out: &OutDir) -> Result<bool> {
    let (nc, nd) = load_pair(&files, builtin.as_deref())?;
    let c = MixedCode::from_generator_matrix(&nc.matrix);
    let d = MixedCode::from_generator_matrix(&nd.matrix);
    let direct = is_lcp(&c, &d, LcpCriterion::Direct)?;
    let gram = try_criterion(&c, &d, LcpCriterion::Gram)?;
    let residue = try_criterion(&c, &d, LcpCriterion::Residue)?;
    let shape = c.shape();
    println!("LCP: {}", direct.is_lcp);
    println!("  direct:  {}", direct.is_lcp);
    println!("  gram:    {}", criterion_line(gram.as_ref()));
    println!("  residue: {}", criterion_line(residue.as_ref()));
    println!(
        "C: type {}, {} codewords; D: type {}, {} codewords; |M| = {}",
        c.code_type(),
        c.len(),
        d.code_type(),
        d.len(),
        shape.module_size()
    );
    out.write_json(
        "lcp",
        &LcpReport {
            schema: 1,
            command: "lcp",
            input_c: &nc.name,
            input_d: &nd.name,
            ring: shape.ring().name(),
            s: shape.s(),
            blocks: [shape.a(), shape.b()],
            lcp: direct.is_lcp,
            direct: &direct,
            gram: gram.as_ref(),
            residue: residue.as_ref(),
        },
    )?;
    Ok(direct.is_lcp)
}

// ---------------------------------------------------------------------------
// dsm-demo / adder-demo
// ---------------------------------------------------------------------------

/// Exhaustive fault sweeps stay affordable up to this ambient size; larger
/// modules fall back to the single-coordinate faults.
const FIA_SWEEP_LIMIT: u128 = 1 << 18;

struct FiaSummary {
    mode: &'static str,
    swept: u64,
    all_detected: bool,
}

/// Sweeps faults below the sensitive code's distance and checks that every
/// one of them is detected.
fn fia_sweep(scheme: &MaskingScheme, z: &[u8], below: u32) -> Result<FiaSummary> {
    let shape = scheme.shape();
    let mut swept = 0;
    let mut all_detected = true;
    if shape.module_size() <= FIA_SWEEP_LIMIT {
        for idx in 1..shape.module_size() as u64 {
            let eps = shape.decode(idx);
            let weight = hamming_weight(&eps);
            if weight == 0 || weight >= below {
                continue;
            }
            swept += 1;
            all_detected &= fia_detect(scheme, z, &eps)? == FaultOutcome::Detected;
        }
        return Ok(FiaSummary {
            mode: "exhaustive below the code distance",
            swept,
            all_detected,
        });
    }
    for pos in 0..shape.len() {
        let size = if pos < shape.a() {
            shape.ring().size()
        } else {
            shape.qring().size()
        };
        for digit in 1..size as u8 {
            let mut eps = shape.zero_word();
            eps[pos] = digit;
            swept += 1;
            all_detected &= fia_detect(scheme, z, &eps)? == FaultOutcome::Detected;
        }
    }
    Ok(FiaSummary {
        mode: "single-coordinate",
        swept,
        all_detected,
    })
}

/// Probe sets for the demo: the largest bound-respecting prefix probes, and
/// a bound-violating probe when one exists on either block.
fn demo_probes(
    scheme: &MaskingScheme,
) -> (Vec<usize>, Vec<usize>, Option<(Vec<usize>, Vec<usize>)>) {
    let shape = scheme.shape();
    let (a, b) = (shape.a(), shape.b());
    let safe_len = |bound: Option<u32>, len: usize| -> usize {
        bound.map_or(len, |d| len.min((d as usize).saturating_sub(1)))
    };
    let t1: Vec<usize> = (0..safe_len(scheme.d_dx_dual(), a)).collect();
    let t2: Vec<usize> = (0..safe_len(scheme.d_dy_dual(), b)).collect();
    let unsafe_probe = match (scheme.d_dx_dual(), scheme.d_dy_dual()) {
        (Some(d), _) if (d as usize) <= a => Some(((0..d as usize).collect(), Vec::new())),
        (_, Some(d)) if (d as usize) <= b => Some((Vec::new(), (0..d as usize).collect())),
        _ => None,
    };
    (t1, t2, unsafe_probe)
}

fn probe_line(report: &ScaReport) -> String {
    format!(
        "T1 = {:?}, T2 = {:?}: {}; probed tuple {} ({} tuples x {})",
        report.t1,
        report.t2,
        if report.safe { "safe" } else { "UNSAFE" },
        if report.leak_uniform {
            "uniform"
        } else {
            "not uniform"
        },
        report.leak_tuples,
        report.leak_multiplicity
    )
}

#[derive(Serialize)]
struct SchemeSummary {
    ring: String,
    s: usize,
    blocks: [usize; 2],
    c_type: String,
    c_size: u64,
    d_type: String,
    d_size: u64,
    p1: Vec<Vec<String>>,
    p2: Vec<Vec<String>>,
    p1_identity: bool,
    p2_identity: bool,
}

fn scheme_summary(scheme: &MaskingScheme) -> SchemeSummary {
    let shape = scheme.shape();
    let grid = |m: &RingMatrix| -> Vec<Vec<String>> {
        (0..m.rows())
            .map(|i| {
                (0..m.cols())
                    .map(|j| m.ring().render_elem(m.get(i, j)))
                    .collect()
            })
            .collect()
    };
    SchemeSummary {
        ring: shape.ring().name().to_string(),
        s: shape.s(),
        blocks: [shape.a(), shape.b()],
        c_type: scheme.code_c().code_type().to_string(),
        c_size: scheme.code_c().len() as u64,
        d_type: scheme.code_d().code_type().to_string(),
        d_size: scheme.code_d().len() as u64,
        p1: grid(scheme.p1()),
        p2: grid(scheme.p2()),
        p1_identity: is_identity(scheme.p1()),
        p2_identity: is_identity(scheme.p2()),
    }
}

#[derive(Serialize)]
struct DsmReport<'a> {
    schema: u32,
    command: &'a str,
    input_c: &'a str,
    input_d: &'a str,
    scheme: SchemeSummary,
    thresholds: &'a ThresholdReport,
    x: String,
    y: String,
    z: String,
    roundtrip_ok: bool,
    masked_op_ok: bool,
    fia_mode: &'a str,
    fia_swept: u64,
    fia_all_detected: bool,
    sca_safe: &'a ScaReport,
    sca_violating: Option<&'a ScaReport>,
}

fn dsm_demo(
    files: Vec<PathBuf>,
    builtin: Option<String>,
    x_flag: Option<&str>,
    y_flag: Option<&str>,
    out: &OutDir,
) -> Result<bool> {
    let (nc, nd) = load_pair(&files, builtin.as_deref())?;
    let scheme = build_scheme_from_matrices(&nc.matrix, &nd.matrix)?;
    let shape = scheme.shape().clone();
    let (x_default, y_default) = demo_messages(builtin.as_deref(), &scheme);
    let x = match x_flag {
        Some(text) => parse_message(scheme.message_space(), text)?,
        None => x_default,
    };
    let y = match y_flag {
        Some(text) => parse_message(scheme.mask_space(), text)?,
        None => y_default,
    };

    let mut t = String::new();
    let mut line = |s: String| {
        t.push_str(&s);
        t.push('\n');
    };
    line(format!(
        "direct-sum masking: ring {}, s {}, blocks ({}, {})",
        shape.ring().name(),
        shape.s(),
        shape.a(),
        shape.b()
    ));
    line(format!(
        "C (sensitive): type {}, {} codewords",
        scheme.code_c().code_type(),
        scheme.code_c().len()
    ));
    line(format!(
        "D (mask):      type {}, {} codewords",
        scheme.code_d().code_type(),
        scheme.code_d().len()
    ));
    line("C (+) D = M: verified during scheme construction".to_string());
    line(format!("P1 = {}", render_square(scheme.p1())));
    line(format!("P2 = {}", render_square(scheme.p2())));

    let thresholds = security_threshold(&scheme, ThresholdVariant::General)?;
    line(format!(
        "distances: d_H(C) = {}, d_H(D(X) dual) = {}, d_H(D(Y) dual) = {}",
        opt(thresholds.d_c),
        opt(thresholds.d_dx_dual),
        opt(thresholds.d_dy_dual)
    ));
    line(format!(
        "thresholds: general {}, separable {}, embedded {}",
        opt(thresholds.general_threshold),
        opt(thresholds.separable_threshold),
        opt(thresholds.embedded_threshold)
    ));

    let x_render = scheme.message_space().render_word(&x);
    let y_render = scheme.mask_space().render_word(&y);
    let z = dsm_encode(&scheme, &x, &y)?;
    let (rx, ry) = dsm_recover(&scheme, &z)?;
    let roundtrip_ok = rx == x && ry == y;
    line(format!("x = {x_render}"));
    line(format!("y = {y_render}"));
    line(format!("z = xG + yH = {}", shape.render_word(&z)));
    line(format!(
        "recover(z): x = {}, y = {} — round-trip {}",
        scheme.message_space().render_word(&rx),
        scheme.mask_space().render_word(&ry),
        if roundtrip_ok { "ok" } else { "FAILED" }
    ));

    let op = MaskedOp::Nonlinear {
        s1: cubing_table(scheme.message_x_space()),
        s2: cubing_table(scheme.message_y_space()),
    };
    let z_op = lcdcodes::lcp::masked_op(&scheme, &z, &op)?;
    let (x_op, y_op) = dsm_recover(&scheme, &z_op)?;
    let expected = lcdcodes::lcp::plain_op(&scheme, &op, &x)?;
    let masked_op_ok = x_op == expected && y_op == y;
    line("masked operation (coordinate-wise cubing of the sensitive word):".to_string());
    line(format!("  z' = {}", shape.render_word(&z_op)));
    line(format!(
        "  recover(z'): x' = {} — matches the plain operation: {}",
        scheme.message_space().render_word(&x_op),
        if masked_op_ok { "ok" } else { "FAILED" }
    ));

    let d_c = thresholds.d_c.unwrap_or(1);
    let fia = fia_sweep(&scheme, &z, d_c)?;
    line("fault injection:".to_string());
    line(format!(
        "  {} sweep: {} faults, all detected: {}",
        fia.mode,
        fia.swept,
        if fia.all_detected { "yes" } else { "NO" }
    ));
    let min_word = scheme
        .code_c()
        .words()
        .iter()
        .filter(|&&idx| idx != 0)
        .map(|&idx| shape.decode(idx))
        .min_by_key(|w| hamming_weight(w));
    if let Some(eps) = min_word {
        let outcome = fia_detect(&scheme, &z, &eps)?;
        line(format!(
            "  minimum-weight word of C as the fault (weight {}): {:?}",
            hamming_weight(&eps),
            outcome
        ));
    }

    let (t1, t2, violating) = demo_probes(&scheme);
    let sca_safe = sca_leakage_check(&scheme, &t1, &t2)?;
    line("side-channel probes:".to_string());
    line(format!("  {}", probe_line(&sca_safe)));
    let sca_violating = match &violating {
        Some((t1, t2)) => {
            let r = sca_leakage_check(&scheme, t1, t2)?;
            line(format!("  {}", probe_line(&r)));
            Some(r)
        }
        None => {
            line("  no bound-violating probe fits inside the blocks".to_string());
            None
        }
    };

    print!("{t}");
    out.write_text("dsm-demo.txt", &t)?;
    out.write_json(
        "dsm-demo",
        &DsmReport {
            schema: 1,
            command: "dsm-demo",
            input_c: &nc.name,
            input_d: &nd.name,
            scheme: scheme_summary(&scheme),
            thresholds: &thresholds,
            x: x_render,
            y: y_render,
            z: shape.render_word(&z),
            roundtrip_ok,
            masked_op_ok,
            fia_mode: fia.mode,
            fia_swept: fia.swept,
            fia_all_detected: fia.all_detected,
            sca_safe: &sca_safe,
            sca_violating: sca_violating.as_ref(),
        },
    )?;
    Ok(roundtrip_ok && masked_op_ok && fia.all_detected)
}

#[derive(Serialize)]
struct AdderReport<'a> {
    schema: u32,
    command: &'a str,
    input_c: &'a str,
    input_d: &'a str,
    scheme: SchemeSummary,
    x: String,
    y: String,
    c: String,
    d: String,
    z: String,
    recovered_c: String,
    recovered_d: String,
    recovered_ok: bool,
}

fn adder_demo(
    files: Vec<PathBuf>,
    builtin: Option<String>,
    x_flag: Option<&str>,
    y_flag: Option<&str>,
    out: &OutDir,
) -> Result<bool> {
    let (nc, nd) = load_pair(&files, builtin.as_deref())?;
    let scheme = build_scheme_from_matrices(&nc.matrix, &nd.matrix)?;
    let shape = scheme.shape().clone();
    let (x_default, y_default) = demo_messages(builtin.as_deref(), &scheme);
    let x = match x_flag {
        Some(text) => parse_message(scheme.message_space(), text)?,
        None => x_default,
    };
    let y = match y_flag {
        Some(text) => parse_message(scheme.mask_space(), text)?,
        None => y_default,
    };

    let c = scheme.encode_sensitive(&x)?;
    let d = scheme.encode_mask(&y)?;
    let z = shape.word_add(&c, &d);
    let (rc, rd) = adder_recover(&scheme, &z)?;
    let recovered_ok = rc == c && rd == d;

    let mut t = String::new();
    let mut line = |s: String| {
        t.push_str(&s);
        t.push('\n');
    };
    line(format!(
        "two-user adder channel: ring {}, s {}, blocks ({}, {})",
        shape.ring().name(),
        shape.s(),
        shape.a(),
        shape.b()
    ));
    line(format!(
        "C: type {}, {} codewords; D: type {}, {} codewords; C (+) D = M",
        scheme.code_c().code_type(),
        scheme.code_c().len(),
        scheme.code_d().code_type(),
        scheme.code_d().len()
    ));
    line(format!(
        "user 1: x = {}, sends c = xG = {}",
        scheme.message_space().render_word(&x),
        shape.render_word(&c)
    ));
    line(format!(
        "user 2: y = {}, sends d = yH = {}",
        scheme.mask_space().render_word(&y),
        shape.render_word(&d)
    ));
    line(format!("channel output z = c + d = {}", shape.render_word(&z)));
    line(format!(
        "decoding splits z back into the transmissions: {}",
        if recovered_ok { "ok" } else { "FAILED" }
    ));
    line(format!("recovered c = {}", shape.render_word(&rc)));
    line(format!("recovered d = {}", shape.render_word(&rd)));

    print!("{t}");
    out.write_text("adder-demo.txt", &t)?;
    out.write_json(
        "adder-demo",
        &AdderReport {
            schema: 1,
            command: "adder-demo",
            input_c: &nc.name,
            input_d: &nd.name,
            scheme: scheme_summary(&scheme),
            x: scheme.message_space().render_word(&x),
            y: scheme.mask_space().render_word(&y),
            c: shape.render_word(&c),
            d: shape.render_word(&d),
            z: shape.render_word(&z),
            recovered_c: shape.render_word(&rc),
            recovered_d: shape.render_word(&rd),
            recovered_ok,
        },
    )?;
    Ok(recovered_ok)
}
