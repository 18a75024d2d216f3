//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::collections::BTreeSet;
use std::time::Instant;

use common::{close, instance, rng, Instance};
use domscan::bits::{bin, p0, p1, prefix_product, BitString, Role};
use domscan::cli::main_with;
use domscan::oracle::brute_force;
use domscan::pipeline::PLUMBING_INSTRUCTIONS;
use domscan::{
    run, Backend, Count, Engine, FastPath, Max, Min, Monoid, PipelineConfig, QueryResult, Seq, Sum, Variant,
};
use rand::Rng;
use rayon::prelude::*;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

const VARIANTS: [Variant; 2] = [Variant::Basic, Variant::Improved];

fn backends() -> [(Backend, usize); 2] {
    // small chunks so the parallel backend really splits 100-point inputs
    [(Backend::Sequential, 2048), (Backend::Parallel { threads: 4 }, 16)]
}

fn config(m: usize, variant: Variant, backend: (Backend, usize), fast: FastPath) -> PipelineConfig {
    PipelineConfig::new(m)
        .variant(variant)
        .backend(backend.0)
        .min_chunk(backend.1)
        .fast_path(fast)
}

/// Runs every variant and backend on one instance; returns a description of
/// the first disagreement with the oracle.
fn check_against_oracle<M: Monoid>(
    monoid: &M,
    inst: &Instance<M::Value>,
    m: usize,
    fast: FastPath,
    same: impl Fn(&[QueryResult<M::Value>], &[QueryResult<M::Value>]) -> bool,
) -> Option<String> {
    let want = brute_force(&inst.0, &inst.1, monoid);
    for variant in VARIANTS {
        for backend in backends() {
            let cfg = config(m, variant, backend, fast);
            match run(&inst.0, &inst.1, monoid, &cfg) {
                Ok(out) if same(&out.results, &want) => {}
                Ok(_) => return Some(format!("{variant:?} on {}", backend.0.name())),
                Err(e) => return Some(format!("{variant:?} on {}: {e}", backend.0.name())),
            }
        }
    }
    None
}

fn exact<A: PartialEq>(a: &[QueryResult<A>], b: &[QueryResult<A>]) -> bool {
    a == b
}

fn oracle_equivalence() -> Outcome {
    let start = Instant::now();
    let failures: Vec<String> = (0..100u64)
        .into_par_iter()
        .flat_map_iter(|seed| {
            let mut found = Vec::new();
            let gridded = seed % 2 == 1;
            let fast = if seed % 4 < 2 { FastPath::Auto } else { FastPath::Off };
            for m in 1..=4 {
                let mut r = rng(seed * 16 + m as u64);
                let mut note = |what: &str, failure: Option<String>| {
                    if let Some(f) = failure {
                        found.push(format!("seed {seed} m {m} {what}: {f}"));
                    }
                };
                let inst = instance(&mut r, 100, 100, m, gridded, |_| 1u64);
                note("count", check_against_oracle(&Count, &inst, m, fast, exact));
                let inst = instance(&mut r, 100, 100, m, gridded, |r| r.gen_range(-50i64..=50));
                note("integer sum", check_against_oracle(&Sum::<i64>::new(), &inst, m, fast, exact));
                let inst = instance(&mut r, 100, 100, m, gridded, |r| r.gen_range(-1000i64..1000));
                note("max", check_against_oracle(&Max::<i64>::new(), &inst, m, fast, exact));
                let inst = instance(&mut r, 100, 100, m, gridded, |r| r.gen_range(-1000i64..1000));
                note("min", check_against_oracle(&Min::<i64>::new(), &inst, m, fast, exact));
                let inst = instance(&mut r, 100, 100, m, gridded, |r| r.gen::<f64>() * 100.0);
                note("float sum", check_against_oracle(&Sum::<f64>::new(), &inst, m, fast, close));
            }
            found
        })
        .collect();
    let runs = 100 * 4 * 5 * VARIANTS.len() * 2;
    let secs = start.elapsed().as_secs_f64();
    match failures.first() {
        None => Ok(format!("{runs} runs agree with the oracle in {secs:.1}s")),
        Some(f) => Err(format!("{} of {runs} configurations differ, first: {f}", failures.len())),
    }
}

fn worked_examples() -> Outcome {
    let e = Engine::sequential();
    let scanned = e
        .segmented_scan(&Seq::from([1i64, 2, 3, 4, 5, 6]), &Seq::from([0, 0, 1, 1, 1, 2]), &Sum::<i64>::new())
        .map_err(|e| e.to_string())?;
    if scanned != [1, 3, 3, 7, 12, 6] {
        return Err(format!("segmented scan gave {scanned:?}"));
    }
    let x: BitString = "01010".parse().map_err(|_| "parse")?;
    let got: Vec<String> = p0(x).iter().map(|b| b.to_string()).collect();
    let got_set: BTreeSet<&str> = got.iter().map(String::as_str).collect();
    if got_set != BTreeSet::from(["0101", "01", ""]) || got.len() != 3 {
        return Err(format!("p0(01010) gave {got:?}"));
    }
    Ok("segmented scan [1,3,3,7,12,6]; p0(01010) = {0101, 01, ε}".into())
}

/// `{ v : v·bit is a prefix of x }`, computed on the text form.
fn prefixes_by_definition(x: &str, bit: char) -> BTreeSet<String> {
    (0..x.len())
        .filter(|&k| x[k..].starts_with(bit))
        .map(|k| x[..k].to_string())
        .collect()
}

fn prefix_set_suite() -> Outcome {
    let mut r = rng(2024);
    let mut failures = 0usize;
    let mut first = None;
    for _ in 0..10_000 {
        let w = r.gen_range(1..=16u32);
        let (a, b) = (r.gen_range(0..1u64 << w), r.gen_range(0..1u64 << w));
        let (x, y) = (bin(a, w).unwrap(), bin(b, w).unwrap());
        let zeros: BTreeSet<String> = p0(x).iter().map(|v| v.to_string()).collect();
        let ones: BTreeSet<String> = p1(y).iter().map(|v| v.to_string()).collect();
        let by_definition = zeros == prefixes_by_definition(&x.to_string(), '0')
            && ones == prefixes_by_definition(&y.to_string(), '1');
        let common = zeros.intersection(&ones).count();
        if !by_definition || common != usize::from(a < b) {
            failures += 1;
            first.get_or_insert(format!("x={x} y={y} common={common}"));
        }
    }
    for _ in 0..2_000 {
        let m = r.gen_range(1..=4usize);
        let widths: Vec<u32> = (0..m).map(|_| r.gen_range(1..=8)).collect();
        let draw = |r: &mut rand_chacha::ChaCha8Rng| -> (Vec<u64>, Vec<BitString>) {
            let values: Vec<u64> = widths.iter().map(|&w| r.gen_range(0..1u64 << w)).collect();
            let bits = values.iter().zip(&widths).map(|(&v, &w)| bin(v, w).unwrap()).collect();
            (values, bits)
        };
        let (xv, x) = draw(&mut r);
        let (yv, y) = draw(&mut r);
        let zeros: BTreeSet<_> = prefix_product(&x, Role::Data).into_iter().collect();
        let ones: BTreeSet<_> = prefix_product(&y, Role::Query).into_iter().collect();
        let common = zeros.intersection(&ones).count();
        let smaller = xv.iter().zip(&yv).all(|(a, b)| a < b);
        if common != usize::from(smaller) {
            failures += 1;
            first.get_or_insert(format!("x={x:?} y={y:?} common={common}"));
        }
    }
    match first {
        None => Ok("10000 bitstring pairs and 2000 tuple pairs, zero failures".into()),
        Some(f) => Err(format!("{failures} failures, first: {f}")),
    }
}

fn expansion_bound() -> Outcome {
    let mut lines = Vec::new();
    let mut failed = false;
    for m in [2usize, 3] {
        for n in [1usize << 8, 1 << 10, 1 << 12] {
            let inst = instance(&mut rng((n * 10 + m) as u64), n / 2, n / 2, m, false, |_| 1u64);
            let cfg = PipelineConfig::new(m).backend(Backend::Parallel { threads: 0 });
            let basic = run(&inst.0, &inst.1, &Count, &cfg).map_err(|e| e.to_string())?.stats;
            let improved = run(&inst.0, &inst.1, &Count, &cfg.variant(Variant::Improved))
                .map_err(|e| e.to_string())?
                .stats;
            let w_last = *basic.widths.last().unwrap();
            let ratio = improved.expanded as f64 / basic.expanded as f64;
            let limit = 2.0 / f64::from(w_last) + 0.01;
            let ok = basic.expanded as u128 <= basic.expansion_bound()
                && improved.expanded as u128 <= improved.expansion_bound()
                && improved.widths.len() == m - 1
                && ratio <= limit;
            failed |= !ok;
            lines.push(format!(
                "m={m} n={n} basic={} improved={} ratio={ratio:.4} limit={limit:.4}{}",
                basic.expanded,
                improved.expanded,
                if ok { "" } else { " VIOLATED" }
            ));
        }
    }
    let detail = lines.join("; ");
    if failed {
        Err(detail)
    } else {
        Ok(detail)
    }
}

fn operation_count() -> Outcome {
    let mut lines = Vec::new();
    for m in 1..=4usize {
        let limit = 6 * m as u64 + 9 + PLUMBING_INSTRUCTIONS;
        for variant in VARIANTS {
            for fast in [FastPath::Off, FastPath::On] {
                let mut seen = Vec::new();
                for n in [1usize << 8, 1 << 12] {
                    let inst = instance(&mut rng(n as u64 + m as u64), n / 2, n / 2, m, false, |_| 1u64);
                    let cfg = PipelineConfig::new(m)
                        .variant(variant)
                        .fast_path(fast)
                        .backend(Backend::Parallel { threads: 0 });
                    let s = run(&inst.0, &inst.1, &Count, &cfg).map_err(|e| e.to_string())?.stats;
                    seen.push((s.instructions, s.primitive_calls));
                }
                let tag = format!("m={m} {variant:?} fast={fast:?}");
                if seen[0] != seen[1] {
                    return Err(format!("{tag}: counts depend on n: {seen:?}"));
                }
                if seen[0].0 > limit {
                    return Err(format!("{tag}: {} operations exceed {limit}", seen[0].0));
                }
                if variant == Variant::Basic && fast == FastPath::Off {
                    lines.push(format!("m={m}: {} ops (limit {limit}), {} calls", seen[0].0, seen[0].1));
                }
            }
        }
    }
    Ok(lines.join("; "))
}

fn backend_determinism() -> Outcome {
    let seq = (Backend::Sequential, 2048);
    let par = (Backend::Parallel { threads: 4 }, 64);
    for i in 0..50u64 {
        let mut r = rng(7_000 + i);
        for variant in VARIANTS {
            let pair = |monoid_name: &str, same: bool| {
                if same {
                    Ok(())
                } else {
                    Err(format!("instance {i} {variant:?} {monoid_name} differs"))
                }
            };
            let m = 3;
            macro_rules! compare {
                ($monoid:expr, $weight:expr, $eq:expr, $name:expr) => {{
                    let inst = instance(&mut r, 500, 500, m, i % 2 == 1, $weight);
                    let a = run(&inst.0, &inst.1, &$monoid, &config(m, variant, seq, FastPath::Auto))
                        .map_err(|e| e.to_string())?;
                    let b = run(&inst.0, &inst.1, &$monoid, &config(m, variant, par, FastPath::Auto))
                        .map_err(|e| e.to_string())?;
                    pair($name, $eq(&a.results, &b.results))?;
                }};
            }
            match i % 4 {
                0 => compare!(Count, |_| 1u64, exact, "count"),
                1 => compare!(Sum::<i64>::new(), |r| r.gen_range(-50i64..=50), exact, "integer sum"),
                2 => compare!(Min::<i64>::new(), |r| r.gen_range(-1000i64..1000), exact, "min"),
                _ => compare!(Max::<i64>::new(), |r| r.gen_range(-1000i64..1000), exact, "max"),
            }
            compare!(Sum::<f64>::new(), |r| r.gen::<f64>() * 100.0, close, "float sum");
        }
    }
    Ok("50 instances, n=1000, m=3, both variants identical across backends".into())
}

fn degenerate_cases() -> Outcome {
    let mut cases: Vec<(&str, Instance<i64>)> = Vec::new();
    let mut r = rng(99);
    let same = || vec![0.5, 0.5, 0.5];
    cases.push((
        "all-equal coordinates",
        (
            (0..20).map(|i| domscan::Point::data(i, same(), 1)).collect(),
            (20..40).map(|i| domscan::Point::query(i, same())).collect(),
        ),
    ));
    let (d, _) = instance(&mut r, 30, 0, 3, true, |r| r.gen_range(1i64..10));
    let q = d.iter().map(|p| domscan::Point::query(p.id + 100, p.coords.clone())).collect();
    cases.push(("queries equal to data", (d, q)));
    let (d, q) = instance(&mut r, 0, 25, 3, false, |_| 1i64);
    cases.push(("empty data", (d, q)));
    let (d, q) = instance(&mut r, 25, 0, 3, false, |_| 1i64);
    cases.push(("empty queries", (d, q)));
    let (d, q) = instance(&mut r, 1, 1, 3, false, |_| 4i64);
    cases.push(("one of each", (d, q)));
    let (d, q) = instance(&mut r, 1, 0, 3, false, |_| 4i64);
    cases.push(("single data point", (d, q)));
    let (d, q) = instance(&mut r, 0, 1, 3, false, |_| 4i64);
    cases.push(("single query", (d, q)));
    let dominated = (
        vec![domscan::Point::data(0, vec![0.0, 0.0, 0.0], 4i64)],
        vec![domscan::Point::query(1, vec![1.0, 1.0, 1.0])],
    );
    cases.push(("one dominated pair", dominated));

    for (name, inst) in &cases {
        for fast in [FastPath::Auto, FastPath::Off] {
            let failure = check_against_oracle(&Sum::<i64>::new(), inst, 3, fast, exact)
                .or_else(|| check_against_oracle(&Min::<i64>::new(), inst, 3, fast, exact))
                .or_else(|| {
                    let counted = (
                        inst.0.iter().map(|p| domscan::Point::data(p.id, p.coords.clone(), 1u64)).collect(),
                        inst.1.iter().map(|p| domscan::Point::query(p.id, p.coords.clone())).collect(),
                    );
                    check_against_oracle(&Count, &counted, 3, fast, exact)
                });
            if let Some(f) = failure {
                return Err(format!("{name}: {f}"));
            }
        }
    }
    Ok(format!("{} cases match the oracle", cases.len()))
}

fn cli_golden() -> Outcome {
    let fixture = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/fixtures/golden_2d");
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let output = dir.path().join("out.csv");
    let call = |args: &[&str]| {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = main_with(std::iter::once("domscan").chain(args.iter().copied()), &mut out, &mut err);
        (code, String::from_utf8_lossy(&err).into_owned())
    };
    let data = format!("{fixture}/data.csv");
    let queries = format!("{fixture}/queries.csv");
    let (code, err) = call(&["run", &data, &queries, "--output", output.to_str().unwrap()]);
    if code != 0 {
        return Err(format!("run exited {code}: {err}"));
    }
    let got = std::fs::read(&output).map_err(|e| e.to_string())?;
    let want = std::fs::read(format!("{fixture}/expected.csv")).map_err(|e| e.to_string())?;
    if got != want {
        return Err(format!("output differs:\n{}", String::from_utf8_lossy(&got)));
    }
    for variant in ["basic", "improved"] {
        let (code, err) = call(&["verify", &data, &queries, "--variant", variant]);
        if code != 0 {
            return Err(format!("verify --variant {variant} exited {code}: {err}"));
        }
    }
    Ok("output byte-identical; verify exits 0 for both variants".into())
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("oracle equivalence", oracle_equivalence),
        ("worked example reproduction", worked_examples),
        ("prefix-set intersection suite", prefix_set_suite),
        ("expansion bound", expansion_bound),
        ("constant operation count", operation_count),
        ("backend determinism", backend_determinism),
        ("degenerate and tie suites", degenerate_cases),
        ("cli golden test", cli_golden),
    ];
    let mut failed = 0;
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
