//! The subcommands. Each one returns a report; the caller decides how to
//! print it and maps it to an exit code.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use hapkit_core::cfree::{damp_sequence, freeprod_hap_pipeline};
use hapkit_core::classical::{ball, schoenberg_check, GroupSpec};
use hapkit_core::cocycle::{check_bounded, check_proper_cocycle, factor_from_generator};
use hapkit_core::fourier::{check_hap_sequence, is_state_candidate, MatrixFamily, StrictBound};
use hapkit_core::genfun::{
    build_from_states, check_positive_blocks, check_proper, check_symmetric, semigroup_at, GeneratingFunctional,
    ProperReport, Schedule,
};
use hapkit_core::irreps::{FreeProductTable, IrrepTable, Table};
use hapkit_core::report::{Verdict, Witness};
use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};
use crate::format::{
    base_dir, cocycle_to_value, family_from_value, family_to_value, generator_from_value, generator_to_value,
    load_table, read_json, write_json, LoadedTable, TableSpec,
};
use crate::report::{CertificationReport, DEFAULT_EPS_DECAY, DEFAULT_MAX_WORD_LENGTH};

fn parse<T: for<'de> Deserialize<'de>>(value: &Value, path: &Path) -> CliResult<T> {
    serde_json::from_value(value.clone()).map_err(|e| CliError::schema(format!("{}: {e}", path.display())))
}

/// Prefixes schema and core errors with the offending file.
fn located<T>(r: CliResult<T>, path: &Path) -> CliResult<T> {
    r.map_err(|e| match e {
        CliError::Schema(m) => CliError::Schema(format!("{}: {m}", path.display())),
        CliError::Core(c) => CliError::Schema(format!("{}: {c}", path.display())),
        other => other,
    })
}

fn disclose_table(report: &mut CertificationReport, table: &Table) {
    match table.as_words() {
        Some(wp) => {
            report
                .truncation("max_word_length", wp.max_word_length())
                .truncation(
                    "factor1_radius",
                    Table::Irreps(wp.factor(hapkit_core::irreps::Factor::First).clone()).radius(),
                )
                .truncation(
                    "factor2_radius",
                    Table::Irreps(wp.factor(hapkit_core::irreps::Factor::Second).clone()).radius(),
                );
        }
        None => {
            report.truncation("radius", table.radius());
        }
    }
    report.truncation("labels", table.len());
}

fn proper_verdict(table: &Table, r: &ProperReport, what: &str) -> Verdict {
    let violations = if r.proper_within_truncation && r.boundary_clear {
        Vec::new()
    } else {
        r.exceptional
            .iter()
            .filter(|&&(l, _)| !r.proper_within_truncation || (!l.is_trivial() && table.depth(l) == r.radius))
            .map(|&(l, v)| Witness::new(table.key(l), None, v, r.level))
            .collect()
    };
    Verdict {
        condition: format!("{what} proper at level {} (up to radius {})", r.level, r.radius),
        pass: violations.is_empty(),
        witnesses: violations,
        note: format!("exceptional set ({}): {}", r.exceptional.len(), keys(table, r.exceptional.iter().map(|e| e.0))),
    }
}

fn keys(table: &Table, labels: impl Iterator<Item = hapkit_core::irreps::Label>) -> String {
    let v: Vec<String> = labels.map(|l| table.key(l)).collect();
    format!("{{{}}}", v.join(", "))
}

fn symmetry_verdict(l: &GeneratingFunctional, tol: f64) -> Verdict {
    let s = check_symmetric(l, tol);
    let w = s.worst.map(|label| Witness::new(l.table().key(label), None, s.max_residual, tol));
    let (violations, tightest) = if s.symmetric { (Vec::new(), w) } else { (w.into_iter().collect(), None) };
    Verdict::from_checks("symmetric (‖L − L*‖ ≤ tol at every label)", violations, tightest, "")
}

/// Runs after a passing symmetry check only.
fn positivity_verdict(l: &GeneratingFunctional, tol: f64) -> CliResult<Verdict> {
    let p = check_positive_blocks(l, tol)?;
    let w = p.worst.map(|label| Witness::new(l.table().key(label), None, -p.worst_eigenvalue, tol));
    let (violations, tightest) = if p.positive { (Vec::new(), w) } else { (w.into_iter().collect(), None) };
    Ok(Verdict::from_checks(
        "positive blocks (−λ_min(L^α) ≤ tol)",
        violations,
        tightest,
        format!("smallest eigenvalue {}", crate::report::num(p.worst_eigenvalue)),
    ))
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HapInput {
    table: Value,
    families: Vec<Value>,
    conv_tols: Vec<f64>,
    #[serde(default)]
    eps_decay: Option<f64>,
    #[serde(default)]
    k_values: Option<Vec<u32>>,
    #[serde(default)]
    strict: bool,
}

/// `certify-hap`: checks a finite sequence of families against the
/// blockwise Haagerup criterion.
pub fn certify_hap(input: &Path, tol: f64, eps_override: Option<f64>) -> CliResult<CertificationReport> {
    let value = read_json(input)?;
    let cfg: HapInput = parse(&value, input)?;
    let base = base_dir(input);
    let (table, families) = located(load_families(&cfg.table, &cfg.families, &base), input)?;
    let eps = eps_override.or(cfg.eps_decay).unwrap_or(DEFAULT_EPS_DECAY);
    let strict = match (cfg.strict, cfg.k_values) {
        (false, _) => None,
        (true, Some(k_values)) => Some(StrictBound { k_values, tol }),
        (true, None) => return Err(CliError::schema(format!("{}: strict bound needs k_values", input.display()))),
    };
    let hap = located(check_hap_sequence(&families, eps, &cfg.conv_tols, strict.as_ref()).map_err(Into::into), input)?;

    let mut report = CertificationReport::new("certify-hap", &json!({"input": value, "eps_decay": eps, "tol": tol}));
    disclose_table(&mut report, &table.table);
    report.truncation("families", families.len());
    report.tolerance("eps_decay", eps).tolerance("tol", tol);
    for v in hap.verdicts() {
        report.verdict(v);
    }
    Ok(report)
}

fn load_families(table: &Value, families: &[Value], base: &Path) -> CliResult<(LoadedTable, Vec<MatrixFamily>)> {
    let table = load_table(table, base)?;
    let mut out = Vec::with_capacity(families.len());
    for (i, f) in families.iter().enumerate() {
        let (family, _) = family_from_value(f, base, Some(&table))?;
        if family.table() != &table.table {
            return Err(CliError::schema(format!("family {i}: table does not match the shared table")));
        }
        out.push(family);
    }
    Ok((table, out))
}

/// Deterministic output name for the semigroup member at `t`.
pub fn semigroup_file_name(t: f64) -> String {
    format!("semigroup_t{t}.json")
}

/// `semigroup`: writes `μ_t = e^{-tL}` for each requested `t`.
pub fn semigroup(generator: &Path, ts: &[f64], out: &Path, tol: f64) -> CliResult<CertificationReport> {
    let value = read_json(generator)?;
    let (l, loaded) = located(generator_from_value(&value, &base_dir(generator)), generator)?;
    if ts.is_empty() {
        return Err(CliError::schema("no --t values given"));
    }
    let families = ts.iter().map(|&t| semigroup_at(&l, t).map_err(CliError::from)).collect::<CliResult<Vec<_>>>()?;

    let mut report = CertificationReport::new("semigroup", &json!({"input": value, "t": ts, "tol": tol}));
    disclose_table(&mut report, l.table());
    report.tolerance("tol", tol);
    std::fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    for (&t, f) in ts.iter().zip(&families) {
        let name = semigroup_file_name(t);
        write_json(&out.join(&name), &family_to_value(f, &loaded.spec))?;
        let s = is_state_candidate(f, tol);
        let w = s.max_norm.map(|(label, n)| Witness::new(f.table().key(label), None, n, 1.0 + tol));
        let (violations, tightest) = if s.candidate { (Vec::new(), w) } else { (w.into_iter().collect(), None) };
        report.verdict(&Verdict::from_checks(
            format!("t={t}: state candidate (trivial block [1], ‖μ_t^α‖ ≤ 1 + tol)"),
            violations,
            tightest,
            s.diagnostics.join("; "),
        ));
        report.note(format!("wrote {name}"));
    }
    Ok(report)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FactorConfig {
    #[serde(default)]
    group: Option<String>,
    #[serde(default)]
    radius: Option<u64>,
    #[serde(default)]
    profile: Option<String>,
    #[serde(default)]
    table: Option<Value>,
    #[serde(default)]
    families: Option<Vec<Value>>,
    damp: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FreeprodConfig {
    factor1: FactorConfig,
    factor2: FactorConfig,
    k_values: Vec<u32>,
    conv_tols: Vec<f64>,
    #[serde(default)]
    max_word_length: Option<usize>,
    #[serde(default)]
    eps_decay: Option<f64>,
}

struct Factor {
    table: Arc<IrrepTable>,
    omegas: Vec<MatrixFamily>,
    damp: bool,
}

fn load_factor(f: &FactorConfig, k_values: &[u32], base: &Path, name: &str) -> CliResult<Factor> {
    let (table, omegas) = match (&f.group, &f.table) {
        (Some(group), None) => {
            let radius = f.radius.ok_or_else(|| CliError::schema(format!("{name}: group factor needs a radius")))?;
            let spec = TableSpec::Group { group: group.clone(), radius };
            let table = spec.build()?;
            let omegas = k_values
                .iter()
                .map(|&k| match f.profile.as_deref().unwrap_or("length") {
                    "length" => Ok(MatrixFamily::scalar_profile(table.clone(), |l| {
                        (-(table.depth(l) as f64) / f64::from(k)).exp()
                    })?),
                    "counit" => Ok(hapkit_core::fourier::counit_family(&table)),
                    other => Err(CliError::schema(format!("{name}: unknown profile `{other}`"))),
                })
                .collect::<CliResult<Vec<_>>>()?;
            (table, omegas)
        }
        (None, Some(table)) => {
            if f.profile.is_some() || f.radius.is_some() {
                return Err(CliError::schema(format!("{name}: profile and radius apply to group factors only")));
            }
            let families = f
                .families
                .as_ref()
                .ok_or_else(|| CliError::schema(format!("{name}: explicit factor needs families")))?;
            if families.len() != k_values.len() {
                return Err(CliError::schema(format!(
                    "{name}: {} families for {} values of k",
                    families.len(),
                    k_values.len()
                )));
            }
            let (t, fams) = load_families(table, families, base)?;
            (t.table, fams)
        }
        _ => return Err(CliError::schema(format!("{name}: give exactly one of `group` or `table`"))),
    };
    let table = match table {
        Table::Irreps(t) => t,
        Table::Words(_) => return Err(CliError::schema(format!("{name}: factor must be an irrep table"))),
    };
    Ok(Factor { table, omegas, damp: f.damp })
}

/// `freeprod`: builds `μ_k = φ¹_k ⋄ φ²_k` on the word table and certifies
/// the inherited Haagerup criterion.
pub fn freeprod(config: &Path, tol: f64, eps_override: Option<f64>) -> CliResult<CertificationReport> {
    let value = read_json(config)?;
    let cfg: FreeprodConfig = parse(&value, config)?;
    let base = base_dir(config);
    let f1 = located(load_factor(&cfg.factor1, &cfg.k_values, &base, "factor1"), config)?;
    let f2 = located(load_factor(&cfg.factor2, &cfg.k_values, &base, "factor2"), config)?;
    let mwl = cfg.max_word_length.unwrap_or(DEFAULT_MAX_WORD_LENGTH);
    let eps = eps_override.or(cfg.eps_decay).unwrap_or(DEFAULT_EPS_DECAY);
    let wp = Arc::new(FreeProductTable::new(f1.table.clone(), f2.table.clone(), mwl));

    let prepare = |f: &Factor| -> CliResult<Vec<MatrixFamily>> {
        let omegas: Vec<MatrixFamily> = f.omegas.clone();
        Ok(if f.damp { damp_sequence(&omegas, &cfg.k_values, tol)? } else { omegas })
    };
    let seq1 = located(prepare(&f1), config)?;
    let seq2 = located(prepare(&f2), config)?;
    let out = located(
        freeprod_hap_pipeline(&seq1, &seq2, &cfg.k_values, &wp, eps, &cfg.conv_tols, tol).map_err(Into::into),
        config,
    )?;

    let mut report = CertificationReport::new("freeprod", &json!({"input": value, "eps_decay": eps, "tol": tol}));
    disclose_table(&mut report, &Table::Words(wp.clone()));
    report.truncation("k_values", cfg.k_values.clone());
    report.tolerance("eps_decay", eps).tolerance("tol", tol);
    for v in out.report.verdicts() {
        report.verdict(v);
    }
    report.note(format!(
        "damping: factor1 {}, factor2 {}",
        if f1.damp { "on" } else { "off" },
        if f2.damp { "on" } else { "off" }
    ));
    Ok(report)
}

/// `schoenberg`: positive semidefiniteness of `e^{-t·length}` on a ball.
pub fn schoenberg(group: &str, t: f64, radius: u64, tol: f64) -> CliResult<CertificationReport> {
    let spec = Arc::new(GroupSpec::parse(group)?);
    let r = schoenberg_check(&spec, t, radius, tol)?;
    debug_assert_eq!(r.size, ball(&spec, radius).len());
    let mut report = CertificationReport::new(
        "schoenberg",
        &json!({"group": spec.to_string(), "t": t, "radius": radius, "tol": tol}),
    );
    report.truncation("radius", radius).truncation("gram_size", r.size);
    report.tolerance("tol", tol);
    let w = Witness::new("−λ_min", None, -r.min_eigenvalue, tol);
    let (violations, tightest) = if r.pass { (Vec::new(), Some(w)) } else { (vec![w], None) };
    report.verdict(&Verdict::from_checks(
        format!("Gram matrix e^{{-t·|g⁻¹h|}} on {spec} positive semidefinite (λ_min ≥ −tol)"),
        violations,
        tightest,
        format!("{0}×{0} matrix at t={t}, smallest eigenvalue {1}", r.size, crate::report::num(r.min_eigenvalue)),
    ));
    Ok(report)
}

/// `cocycle`: factors a symmetric positive generator and reports the
/// exceptional set of `c*c ≥ M·I`.
pub fn cocycle(generator: &Path, level: f64, out: Option<&Path>, tol: f64) -> CliResult<CertificationReport> {
    let value = read_json(generator)?;
    let (l, loaded) = located(generator_from_value(&value, &base_dir(generator)), generator)?;
    let mut report = CertificationReport::new("cocycle", &json!({"input": value, "M": level, "tol": tol}));
    disclose_table(&mut report, l.table());
    report.tolerance("tol", tol);

    let sym = symmetry_verdict(&l, tol);
    let symmetric = sym.pass;
    report.verdict(&sym);
    if !symmetric {
        report.note("generator is not symmetric; no cocycle written");
        return Ok(report);
    }
    let pos = positivity_verdict(&l, tol)?;
    let positive = pos.pass;
    report.verdict(&pos);
    if !positive {
        report.note("generator has a negative eigenvalue beyond tol; no cocycle written");
        return Ok(report);
    }
    // L + L* = 2L may dip to −2·tol once positivity holds at tol.
    let (c, clamps) = factor_from_generator(&l, 2.0 * tol)?;
    report.verdict(&proper_verdict(l.table(), &check_proper_cocycle(&c, level), "cocycle"));
    let bounded = check_bounded(&c);
    report.note(format!(
        "sup ‖c^α‖ = {} over the truncation (radius {})",
        crate::report::num(bounded.sup_norm),
        bounded.radius
    ));
    if !clamps.is_empty() {
        report.note(format!("clamped {} slightly negative eigenvalue(s) to 0", clamps.len()));
    }
    if let Some(out) = out {
        write_json(out, &cocycle_to_value(&c, &loaded.spec))?;
        report.note(format!("wrote {}", file_name(out)));
    }
    Ok(report)
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScheduleJson {
    betas: Vec<f64>,
    eps: Vec<f64>,
    tail_bound: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuildInput {
    table: Value,
    states: Vec<Value>,
    #[serde(default)]
    schedule: Option<ScheduleJson>,
}

/// Options of `buildgen` beyond the input file.
#[derive(Debug, Clone, Default)]
pub struct BuildOptions {
    pub out: Option<PathBuf>,
    pub level: Option<f64>,
    pub tail_max: f64,
}

/// `buildgen`: `L = Σ β_n (ε − μ_n)` from a sequence of states.
pub fn buildgen(input: &Path, opts: &BuildOptions, tol: f64) -> CliResult<CertificationReport> {
    let value = read_json(input)?;
    let cfg: BuildInput = parse(&value, input)?;
    let (table, states) = located(load_families(&cfg.table, &cfg.states, &base_dir(input)), input)?;
    let schedule = match cfg.schedule {
        Some(s) => Schedule::Explicit { betas: s.betas, eps: s.eps, tail_bound: s.tail_bound },
        None => Schedule::Default { terms: states.len() },
    };
    let (l, build) = located(build_from_states(&states, &schedule).map_err(Into::into), input)?;

    let mut report = CertificationReport::new(
        "buildgen",
        &json!({"input": value, "M": opts.level, "tail_max": opts.tail_max, "tol": tol}),
    );
    disclose_table(&mut report, l.table());
    report.truncation("terms", states.len());
    report.tolerance("tol", tol).tolerance("tail_max", opts.tail_max);

    let tail = Witness::new("Σ_{n>N} β_n ε_n", None, build.tail_bound, opts.tail_max);
    let (violations, tightest) =
        if build.tail_bound <= opts.tail_max { (Vec::new(), Some(tail)) } else { (vec![tail], None) };
    report.verdict(&Verdict::from_checks("tail bound (Σ_{n>N} β_n ε_n ≤ tail_max)", violations, tightest, ""));

    let sym = symmetry_verdict(&l, tol);
    let symmetric = sym.pass;
    report.verdict(&sym);
    if symmetric {
        report.verdict(&positivity_verdict(&l, tol)?);
        if let Some(level) = opts.level {
            report.verdict(&proper_verdict(l.table(), &check_proper(&l, level)?, "generator"));
        }
    }
    let uncertified: Vec<_> = build.uncertified().collect();
    report.note(format!(
        "labels whose series is not certified by the supplied terms ({}): {}",
        uncertified.len(),
        keys(l.table(), uncertified.into_iter())
    ));
    if let Some(out) = &opts.out {
        write_json(out, &generator_to_value(&l, &table.spec))?;
        report.note(format!("wrote {}", file_name(out)));
    }
    Ok(report)
}

fn file_name(p: &Path) -> String {
    p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default()
}
