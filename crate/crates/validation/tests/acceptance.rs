//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails. Every numeric target is recomputed here from the
//! reference implementations in the core crate's test helpers.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::path::{Path, PathBuf};
use std::process::Command;
use std::sync::Arc;
use std::time::Instant;

use common::*;
use hapkit_core::cfree::{cfree_generator, cfree_state, check_diam3, damp_sequence, freeprod_hap_pipeline};
use hapkit_core::classical::{ball, dual_irrep_table, schoenberg_check, GroupSpec};
use hapkit_core::cocycle::{check_proper_cocycle, factor_from_generator};
use hapkit_core::fourier::{convolve, counit_family, haar_family, MatrixFamily};
use hapkit_core::genfun::{
    build_from_states, check_positive_blocks, check_proper, generator_from_semigroup, semigroup_at, Schedule,
};
use hapkit_core::irreps::{FreeProductTable, IrrepTable, Label, Table};
use hapkit_core::linalg;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn irreps(t: &Table) -> Arc<IrrepTable> {
    match t {
        Table::Irreps(x) => x.clone(),
        Table::Words(_) => unreachable!("factor tables are irrep tables"),
    }
}

fn z_table(radius: u64) -> Table {
    dual_irrep_table(&Arc::new(GroupSpec::parse("Z").unwrap()), radius).into()
}

/// Schoenberg check: min eigenvalue ≥ −1e−8 and under a second per matrix.
fn criterion_1() -> Outcome {
    let mut worst = f64::INFINITY;
    let mut slowest = 0.0f64;
    let mut sizes = Vec::new();
    let cases: Vec<(&str, u64, Vec<f64>)> =
        vec![("F2", 3, vec![0.1, 0.5, 1.0, 2.0]), ("Z2*Z3", 4, vec![0.1, 0.5, 1.0, 2.0])];
    let mut ok = true;
    for (group, radius, ts) in cases {
        let spec = Arc::new(GroupSpec::parse(group).unwrap());
        for t in ts {
            let start = Instant::now();
            let r = schoenberg_check(&spec, t, radius, 1e-8).unwrap();
            slowest = slowest.max(start.elapsed().as_secs_f64());
            // reference eigenvalue from the Jacobi oracle
            let elems = ball(&spec, radius);
            let mut g = Real::zeros(elems.len());
            for (i, a) in elems.iter().enumerate() {
                for (j, b) in elems.iter().enumerate() {
                    g.set(i, j, (-t * a.inverse().multiply(b).unwrap().length() as f64).exp());
                }
            }
            let oracle = real_min_eigenvalue(&g);
            ok &= r.pass && r.min_eigenvalue >= -1e-8 && (r.min_eigenvalue - oracle).abs() < 1e-10;
            worst = worst.min(r.min_eigenvalue);
            sizes.push(r.size);
        }
    }
    ok &= sizes[0] == 53 && slowest < 1.0;
    outcome(ok, format!("F2 r=3 is {0}x{0}; smallest eigenvalue {worst:.3e}; slowest check {slowest:.3}s", sizes[0]))
}

/// Semigroup law on 50 random symmetric PSD generators.
fn criterion_2() -> Outcome {
    let mut r = rng(0x5e_2);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t = random_table(&mut r, 20, 5);
        let l = random_generator(&mut r, &t, 10.0, true);
        for (s, u) in [(0.3, 0.7), (1.0, 1.0)] {
            let lhs = convolve(&semigroup_at(&l, s).unwrap(), &semigroup_at(&l, u).unwrap()).unwrap();
            let rhs = semigroup_at(&l, s + u).unwrap();
            for label in t.labels() {
                let d = linalg::spectral_norm(&(lhs.block(label).unwrap() - rhs.block(label).unwrap()));
                worst = worst.max(d);
            }
        }
    }
    outcome(worst <= 1e-9, format!("max ‖μ_s⋆μ_t − μ_(s+t)‖ = {worst:.3e} (≤ 1e-9)"))
}

/// Generator recovery by extrapolation from t ∈ {1e−3, 5e−4}.
fn criterion_3() -> Outcome {
    let mut r = rng(0x5e_3);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let t = random_table(&mut r, 10, 4);
        let l = random_generator(&mut r, &t, 10.0, false);
        let (est, _) = generator_from_semigroup(&t, |s| semigroup_at(&l, s).unwrap(), &[1e-3, 5e-4]).unwrap();
        for label in t.nontrivial() {
            let truth = l.block(label).unwrap();
            let rel = linalg::spectral_norm(&(est.block(label).unwrap() - truth)) / linalg::spectral_norm(truth);
            worst = worst.max(rel);
        }
    }
    outcome(worst <= 1e-5, format!("max relative block error {worst:.3e} (≤ 1e-5)"))
}

/// Cocycle Gram identity and the factor-2 properness relation.
fn criterion_4() -> Outcome {
    let mut r = rng(0x5e_4);
    let mut gram = 0.0f64;
    let mut mismatches = 0usize;
    let mut excused = 0usize;
    for _ in 0..50 {
        let t = random_table(&mut r, 20, 5);
        let l = random_generator(&mut r, &t, 10.0, true);
        let (c, _) = factor_from_generator(&l, 1e-10).unwrap();
        for label in t.nontrivial() {
            let cb = c.block(label).unwrap();
            let lb = l.block(label).unwrap();
            gram = gram.max(max_diff(&(cb.adjoint() * cb), &(lb + lb.adjoint())));
        }
        for level in [0.1, 0.5, 1.0, 2.0, 5.0] {
            let a: Vec<Label> = check_proper(&l, level).unwrap().exceptional.iter().map(|e| e.0).collect();
            let b: Vec<Label> = check_proper_cocycle(&c, 2.0 * level).exceptional.iter().map(|e| e.0).collect();
            for label in t.labels() {
                if a.contains(&label) != b.contains(&label) {
                    let m = if label.is_trivial() { 0.0 } else { hermitian_min_eigenvalue(l.block(label).unwrap()) };
                    if (m - level).abs() <= 1e-9 {
                        excused += 1;
                    } else {
                        mismatches += 1;
                    }
                }
            }
        }
    }
    outcome(
        gram <= 1e-10 && mismatches == 0,
        format!("max |c*c − (L+L*)| = {gram:.3e} (≤ 1e-10); exceptional-set mismatches {mismatches} ({excused} within 1e-9 of the level)"),
    )
}

fn dims_12_table() -> Table {
    IrrepTable::from_dims(&[("p", 1), ("q", 2)]).unwrap().into()
}

/// Semigroup of the cfree generator equals cfree of the semigroups.
fn criterion_5() -> Outcome {
    let mut r = rng(0x5e_5);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let t1 = dims_12_table();
        let t2 = dims_12_table();
        let wp = Arc::new(FreeProductTable::new(irreps(&t1), irreps(&t2), 3));
        let l1 = random_generator(&mut r, &t1, 10.0, true);
        let l2 = random_generator(&mut r, &t2, 10.0, true);
        let joint = cfree_generator(&l1, &l2, &wp).unwrap();
        for t in [0.5, 1.0] {
            let lhs = semigroup_at(&joint, t).unwrap();
            let rhs = cfree_state(&semigroup_at(&l1, t).unwrap(), &semigroup_at(&l2, t).unwrap(), &wp).unwrap();
            for w in wp.words().iter().enumerate().map(|(i, _)| Label(i)) {
                worst = worst.max(max_diff(lhs.block(w).unwrap(), rhs.block(w).unwrap()));
            }
        }
    }
    outcome(worst <= 1e-9, format!("max blockwise deviation {worst:.3e} (≤ 1e-9)"))
}

/// Mixed-product identity on random normalized families.
fn criterion_6() -> Outcome {
    let mut r = rng(0x5e_6);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let t1 = random_table(&mut r, 2, 2);
        let t2 = random_table(&mut r, 2, 2);
        let wp = Arc::new(FreeProductTable::new(irreps(&t1), irreps(&t2), 3));
        let (p1, o1) = (random_normalized(&mut r, &t1), random_normalized(&mut r, &t1));
        let (p2, o2) = (random_normalized(&mut r, &t2), random_normalized(&mut r, &t2));
        worst = worst.max(check_diam3(&p1, &p2, &o1, &o2, &wp, 1e-12).unwrap().residual);
    }
    outcome(worst <= 1e-12, format!("max residual {worst:.3e} (≤ 1e-12)"))
}

/// Damped Z ⋆ Z: word bound, ‖block − I‖ ≤ 0.25 at k = 16, and a strictly
/// decreasing trend in k.
fn criterion_7() -> Outcome {
    let t = z_table(3);
    let ks = [1u32, 2, 4, 8, 16];
    let omegas: Vec<MatrixFamily> = ks
        .iter()
        .map(|&k| MatrixFamily::scalar_profile(t.clone(), |l| (-(t.depth(l) as f64) / f64::from(k)).exp()).unwrap())
        .collect();
    let damped = damp_sequence(&omegas, &ks, 1e-12).unwrap();
    let wp = Arc::new(FreeProductTable::new(irreps(&t), irreps(&t), 3));
    let out = freeprod_hap_pipeline(&damped, &damped, &ks, &wp, 0.7, &[1.0, 1.0, 1.0, 1.0, 1.0], 1e-9).unwrap();

    // scalar-product oracle: Π_j e^{-(|n_j| + 1)/k}
    let oracle = |w: usize, k: u32| -> f64 {
        wp.words()[w]
            .word
            .letters()
            .iter()
            .map(|l| (-(t.depth(t.find(&l.id).unwrap()) as f64 + 1.0) / f64::from(k)).exp())
            .product()
    };
    let mut oracle_ok = true;
    let mut bound_ok = true;
    for (i, &k) in ks.iter().enumerate() {
        for (w, e) in wp.words().iter().enumerate() {
            let got = out.families[i].block(Label(w)).unwrap();
            oracle_ok &= got.iter().all(|z| z.im == 0.0) && (got[(0, 0)].re - oracle(w, k)).abs() < 1e-15;
            let norm = linalg::spectral_norm(got);
            bound_ok &= norm <= (-(e.word.len() as f64) / f64::from(k)).exp() + 1e-9;
        }
    }
    bound_ok &= out.report.word_bound.pass;

    let dist = |i: usize, w: usize| -> f64 {
        let b = out.families[i].block(Label(w)).unwrap();
        linalg::spectral_norm(&(b - linalg::identity(b.nrows())))
    };
    let nontrivial = 1..wp.len();
    let trend_ok = nontrivial.clone().all(|w| (1..ks.len()).all(|i| dist(i, w) < dist(i - 1, w)));
    let (worst_w, worst) =
        nontrivial.map(|w| (w, dist(ks.len() - 1, w))).fold((0, 0.0f64), |acc, x| if x.1 > acc.1 { x } else { acc });
    let near_ok = worst <= 0.25;
    outcome(
        oracle_ok && bound_ok && near_ok && trend_ok,
        format!(
            "oracle agreement {}; word bound {}; strictly decreasing in k {}; max ‖μ_16^w − I‖ = {worst:.4} at {} (needs ≤ 0.25)",
            yes(oracle_ok),
            yes(bound_ok),
            yes(trend_ok),
            wp.words()[worst_w].word.encode()
        ),
    )
}

fn yes(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "FAILED"
    }
}

/// Σ β_n (ε − μ_n) with the default schedule on the Z-dual states.
fn criterion_8() -> Outcome {
    let t = z_table(10);
    let states: Vec<MatrixFamily> = (1..=6)
        .map(|n| MatrixFamily::scalar_profile(t.clone(), |l| (-(t.depth(l) as f64) / f64::from(n)).exp()).unwrap())
        .collect();
    let (l, report) = build_from_states(&states, &Schedule::Default { terms: 6 }).unwrap();
    let exact_hermitian = l.blocks().values().all(|b| b == &b.adjoint());
    let positive = check_positive_blocks(&l, 1e-12).unwrap().positive;
    let proper = check_proper(&l, 10.0).unwrap();
    let brute = |m: usize| -> f64 {
        let mut s = 0.0;
        for n in 1..=6 {
            s += 2f64.powi(n) * (1.0 - (-(m as f64) / f64::from(n)).exp());
        }
        s
    };
    let expected: Vec<Label> = t.labels().filter(|&x| brute(t.depth(x)) < 10.0).collect();
    let got: Vec<Label> = proper.exceptional.iter().map(|e| e.0).collect();
    let set_ok = got == expected;
    let proper_ok = proper.proper_within_truncation && proper.boundary_clear && proper.radius == 10;
    let tail_oracle: f64 = (7..60).map(|n| 4f64.powi(-n)).sum();
    let tail_ok = report.tail_bound < 1e-3 && (report.tail_bound - tail_oracle).abs() < 1e-18;
    outcome(
        exact_hermitian && positive && set_ok && proper_ok && tail_ok,
        format!(
            "exactly Hermitian {}; positive at 1e-12 {}; proper at M=10 (up to radius 10) {} with exceptional set of size {} matching oracle {}; tail bound {:.3e} (< 1e-3)",
            yes(exact_hermitian),
            yes(positive),
            yes(proper_ok),
            got.len(),
            yes(set_ok),
            report.tail_bound
        ),
    )
}

/// Counit, Haar and word-count identities.
fn criterion_9() -> Outcome {
    let mut r = rng(0x5e_9);
    let mut algebra_ok = true;
    for _ in 0..20 {
        let t = random_table(&mut r, 6, 4);
        let f = random_normalized(&mut r, &t);
        let e = counit_family(&t);
        let h = haar_family(&t);
        algebra_ok &= convolve(&e, &f).unwrap() == f && convolve(&f, &e).unwrap() == f;
        algebra_ok &= convolve(&h, &h).unwrap() == h;
        algebra_ok &= convolve(&f, &h).unwrap() == h && convolve(&h, &f).unwrap() == h;
    }
    let mut counts_ok = true;
    for p in 1..=3 {
        for q in 1..=3 {
            let t1 = random_table(&mut r, p, 1);
            let t2 = random_table(&mut r, q, 1);
            for k in 0..=4 {
                let wp = FreeProductTable::new(irreps(&t1), irreps(&t2), k);
                counts_ok &= wp.len() == brute_force_words(p, q, k).len();
            }
        }
    }
    outcome(
        algebra_ok && counts_ok,
        format!("counit and Haar identities {}; word counts p,q ≤ 3, length ≤ 4 {}", yes(algebra_ok), yes(counts_ok)),
    )
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../hapkit/fixtures").join(name)
}

/// The `hapkit` binary next to this test's build directory, if it has been
/// built (a workspace-wide `cargo test` builds it).
fn cli_binary() -> Option<PathBuf> {
    let exe = std::env::current_exe().ok()?;
    let bin = exe.parent()?.parent()?.join(format!("hapkit{}", std::env::consts::EXE_SUFFIX));
    bin.is_file().then_some(bin)
}

/// Exit code and stdout, from the binary when available and otherwise
/// from the same entry point in-process.
fn invoke(bin: Option<&Path>, args: &[String]) -> (i32, Vec<u8>) {
    match bin {
        Some(bin) => {
            let o = Command::new(bin).args(args).output().unwrap();
            (o.status.code().unwrap_or(-1), o.stdout)
        }
        None => {
            use clap::Parser;
            match hapkit::Cli::try_parse_from(std::iter::once("hapkit".to_string()).chain(args.iter().cloned())) {
                Ok(cli) => {
                    let o = hapkit::run(&cli);
                    (o.code, o.stdout.into_bytes())
                }
                Err(_) => (2, Vec::new()),
            }
        }
    }
}

/// Runs the CLI with a fresh output directory and returns exit code,
/// stdout, JSON report and every file written.
fn run_fixture(bin: Option<&Path>, args: &[String]) -> (i32, Vec<u8>, Vec<u8>, Vec<(String, Vec<u8>)>) {
    let dir = tempfile::tempdir().unwrap();
    let mut full: Vec<String> = args.iter().map(|a| a.replace("{out}", dir.path().to_str().unwrap())).collect();
    let json = dir.path().join("report.json");
    full.push("--json".into());
    full.push(json.to_str().unwrap().into());
    let (code, stdout) = invoke(bin, &full);
    let report = std::fs::read(&json).unwrap_or_default();
    let mut files: Vec<(String, Vec<u8>)> = walk(dir.path())
        .into_iter()
        .filter(|p| p != &json)
        .map(|p| (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap()))
        .collect();
    files.sort();
    (code, stdout, report, files)
}

fn walk(dir: &Path) -> Vec<PathBuf> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).unwrap() {
        let p = e.unwrap().path();
        if p.is_dir() {
            out.extend(walk(&p));
        } else {
            out.push(p);
        }
    }
    out
}

/// Every bundled fixture twice, byte for byte; exit codes 0, 1, 2.
fn criterion_10() -> Outcome {
    let f = |n: &str| fixture(n).to_str().unwrap().to_string();
    let s = |x: &str| x.to_string();
    let runs: Vec<(Vec<String>, i32)> = vec![
        (vec![s("certify-hap"), f("certify_hap_z.json")], 0),
        (vec![s("certify-hap"), f("certify_hap_norm_one.json")], 1),
        (vec![s("certify-hap"), f("malformed.json")], 2),
        (vec![s("freeprod"), f("freeprod_zz.json")], 0),
        (vec![s("freeprod"), f("freeprod_undamped.json")], 1),
        (vec![s("freeprod"), f("freeprod_word_length_zero.json")], 0),
        (vec![s("semigroup"), f("generator_unit_shift.json"), s("--t"), s("0"), s("1"), s("--out"), s("{out}/sg")], 0),
        (vec![s("cocycle"), f("generator_z_length.json"), s("--M"), s("8"), s("--out"), s("{out}/c.json")], 0),
        (vec![s("cocycle"), f("generator_zero.json"), s("--M"), s("1")], 1),
        (vec![s("cocycle"), f("generator_negative.json"), s("--M"), s("1")], 1),
        (vec![s("cocycle"), f("generator_nonsymmetric.json"), s("--M"), s("1")], 1),
        (vec![s("buildgen"), f("buildgen_z.json"), s("--M"), s("10"), s("--out"), s("{out}/g.json")], 0),
        (vec![s("schoenberg"), s("--group"), s("F2"), s("--t"), s("1"), s("--radius"), s("3")], 0),
    ];
    let bin = cli_binary();
    let mut identical = 0;
    let mut codes_ok = 0;
    let mut failures = Vec::new();
    for (args, code) in &runs {
        let a = run_fixture(bin.as_deref(), args);
        let b = run_fixture(bin.as_deref(), args);
        if a == b {
            identical += 1;
        } else {
            failures.push(format!("{} differs between runs", args[..2].join(" ")));
        }
        if a.0 == *code {
            codes_ok += 1;
        } else {
            failures.push(format!("{} exited {} (expected {code})", args[..2].join(" "), a.0));
        }
    }
    let n = runs.len();
    outcome(
        identical == n && codes_ok == n,
        format!(
            "{identical}/{n} runs byte-identical; {codes_ok}/{n} exit codes as expected ({}){}",
            if bin.is_some() { "hapkit binary" } else { "in-process, binary not built" },
            if failures.is_empty() { String::new() } else { format!(" ({})", failures.join("; ")) }
        ),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("classical Schoenberg check", criterion_1),
        ("semigroup law", criterion_2),
        ("generator recovery", criterion_3),
        ("cocycle identities", criterion_4),
        ("conditionally free semigroup compatibility", criterion_5),
        ("mixed-product exactness", criterion_6),
        ("damped free-product word bound", criterion_7),
        ("generator from states", criterion_8),
        ("exact algebraic identities", criterion_9),
        ("CLI determinism and exit codes", criterion_10),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let o = run();
        if !o.pass {
            failed += 1;
        }
        println!("criterion {:>2} [{}] {name}: {}", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
    }
    println!(
        "acceptance: {} of {} criteria pass ({:.1}s)",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
