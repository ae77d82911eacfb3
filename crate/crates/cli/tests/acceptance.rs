//! Acceptance suite: one PASS/FAIL line per criterion, driven through the
//! `deuber` binary with expected values from oracles written here.

use std::collections::{BTreeMap, BTreeSet};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use deuber_core::ip::fs;
use deuber_core::search::{find_mono, Claim, MonoOutcome, SearchBudget};
use deuber_core::shape::{concordance_witness, from_mpc, generate, join, normalize_for_lift};
use deuber_core::{catalog, Certificate, Coloring, Domain, IntMatrix, LiftPlan, Pattern, PolyMap, SeedVector, Shape};
use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_deuber");

type Outcome = Result<String, String>;

fn deuber(out: &Path, args: &[&str]) -> (i32, String) {
    let o = Command::new(BIN)
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("binary runs");
    let code = o.status.code().unwrap_or(-1);
    let mut text = String::from_utf8_lossy(&o.stdout).into_owned();
    text.push_str(&String::from_utf8_lossy(&o.stderr));
    (code, text)
}

fn ok_run(out: &Path, args: &[&str]) -> Result<String, String> {
    match deuber(out, args) {
        (0, text) => Ok(text),
        (code, text) => Err(format!("`deuber {}` exited {code}: {}", args.join(" "), text.trim())),
    }
}

fn read(path: impl AsRef<Path>) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).expect("artifact exists")).expect("artifact is JSON")
}

fn num(v: &Value) -> i64 {
    v.as_str().expect("numbers are strings").parse().expect("integer")
}

fn ensure(cond: bool, why: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(why())
    }
}

fn within(start: Instant, limit: Duration) -> Result<(), String> {
    let t = start.elapsed();
    ensure(t < limit, || format!("took {:.2}s, limit {}s", t.as_secs_f64(), limit.as_secs()))
}

fn rle_decode(text: &str) -> Vec<u8> {
    text.split(',')
        .flat_map(|run| {
            let (c, n) = run.split_once('*').unwrap_or((run, "1"));
            std::iter::repeat_n(c.parse::<u8>().unwrap(), n.parse().unwrap())
        })
        .collect()
}

fn random_colors(seed: u64, len: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..len).map(|_| rng.gen_range(0..2u8)).collect()
}

/// Write a coloring of `[lo, hi]` for `--coloring FILE`.
fn coloring_file(dir: &Path, name: &str, lo: i64, hi: i64, colors: Vec<u8>) -> PathBuf {
    let col = Coloring::new(Domain::interval(lo, hi).unwrap(), 2, colors).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, col.to_json().to_string()).unwrap();
    path
}

fn seed_ints(cert: &Value) -> Vec<i64> {
    cert["seed"].as_array().unwrap().iter().map(|p| num(&p[0])).collect()
}

/// A nonempty subset of the nonzero entries sums to zero, or the row is zero.
fn subset_sum_zero(row: &[i64]) -> bool {
    let nz: Vec<i64> = row.iter().copied().filter(|&x| x != 0).collect();
    if nz.is_empty() {
        return true;
    }
    (1u32..1 << nz.len()).any(|mask| (0..nz.len()).filter(|i| mask >> i & 1 == 1).map(|i| nz[i]).sum::<i64>() == 0)
}

fn criterion_1() -> Outcome {
    let dir = TempDir::new().unwrap();
    let mut rows = Vec::new();
    for a in -3..=3i64 {
        for b in -3..=3i64 {
            for c in -3..=3i64 {
                rows.push([a, b, c]);
            }
        }
    }
    let start = Instant::now();
    let disagreements: Vec<String> = std::thread::scope(|scope| {
        let handles: Vec<_> = rows
            .chunks(rows.len().div_ceil(8))
            .enumerate()
            .map(|(w, chunk)| {
                let out = dir.path().join(format!("w{w}"));
                scope.spawn(move || {
                    let mut bad = Vec::new();
                    for row in chunk {
                        let text = format!("{} {} {}", row[0], row[1], row[2]);
                        if deuber(&out, &["-q", "rado", "check", "--matrix", &text]).0 != 0 {
                            bad.push(format!("[{text}] failed to run"));
                            continue;
                        }
                        let got = read(out.join("columns.json"))["satisfied"].as_bool().unwrap();
                        if got != subset_sum_zero(row) {
                            bad.push(format!("[{text}]: cli {got}"));
                        }
                    }
                    bad
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().unwrap()).collect()
    });
    let elapsed = start.elapsed();
    ensure(disagreements.is_empty(), || disagreements.join("; "))?;
    let lib = Instant::now();
    for row in &rows {
        let a = IntMatrix::from_i64(1, 3, row).unwrap();
        let cert = deuber_core::rado::check_columns(&a).unwrap();
        ensure(cert.is_some() == subset_sum_zero(row), || format!("library disagrees on {row:?}"))?;
    }
    within(lib, Duration::from_secs(1))?;
    Ok(format!(
        "{} matrices agree with the subset-sum oracle ({:.0} ms in-process, {:.2}s through the CLI)",
        rows.len(),
        lib.elapsed().as_secs_f64() * 1e3,
        elapsed.as_secs_f64()
    ))
}

fn criterion_2() -> Outcome {
    let dir = TempDir::new().unwrap();
    ok_run(dir.path(), &["rado", "reduce", "--matrix", "1 1 -1"])?;
    let doc = read(dir.path().join("reduction.json"));
    let b = &doc["reduction"]["B"];
    let (rows, cols) = (num(&b["rows"]) as usize, num(&b["cols"]) as usize);
    let entries: Vec<i64> = b["entries"].as_array().unwrap().iter().map(num).collect();
    ensure(rows == 3 && cols == 2, || format!("B is {rows}×{cols}"))?;
    let a = [1i64, 1, -1];
    for j in 0..cols {
        let s: i64 = (0..rows).map(|i| a[i] * entries[i * cols + j]).sum();
        ensure(s == 0, || format!("column {j} of A·B is {s}"))?;
    }
    let shape = from_mpc(1, 1, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..100 {
        let s = [rng.gen_range(1..=10i64), rng.gen_range(1..=10i64)];
        let xs: BTreeSet<i64> = (0..rows).map(|i| entries[i * cols] * s[0] + entries[i * cols + 1] * s[1]).collect();
        let generated: BTreeSet<i64> = generate(&shape, &SeedVector::scalars(&s).unwrap())
            .unwrap()
            .points()
            .iter()
            .map(|p| i64::try_from(&p[0]).unwrap())
            .collect();
        ensure(xs.is_subset(&generated), || format!("B·{s:?} = {xs:?} is not inside {generated:?}"))?;
        let schur = BTreeSet::from([s[0], s[1], s[0] + s[1]]);
        ensure(xs == schur, || format!("B·{s:?} = {xs:?}, expected {schur:?}"))?;
    }
    Ok("A·B = 0 and B·s = {s0, s1, s0+s1} inside the (1,1,1)-set for 100 seeds".into())
}

/// Every 2-coloring of [1, n] has a monochromatic member of `configs`.
fn forced(n: usize, configs: &[Vec<usize>]) -> bool {
    (0u32..1 << n).all(|mask| configs.iter().any(|c| c.iter().all(|&x| (mask >> (x - 1) & 1) == (mask >> (c[0] - 1) & 1))))
}

fn schur_configs(n: usize) -> Vec<Vec<usize>> {
    (1..=n).flat_map(|x| (x..=n).filter(move |y| x + y <= n).map(move |y| vec![x, y, x + y])).collect()
}

fn ap3_configs(n: usize) -> Vec<Vec<usize>> {
    (1..=n).flat_map(|a| (1..=n).filter(move |d| a + 2 * d <= n).map(move |d| vec![a, a + d, a + 2 * d])).collect()
}

fn criterion_3() -> Outcome {
    let mut notes = Vec::new();
    for (name, expected, configs) in [
        ("schur", 5usize, schur_configs as fn(usize) -> Vec<Vec<usize>>),
        ("ap3", 9, ap3_configs),
    ] {
        let dir = TempDir::new().unwrap();
        let start = Instant::now();
        ok_run(dir.path(), &["search", "number", "--shape", name, "--colors", "2"])?;
        within(start, Duration::from_secs(60))?;
        let cert = read(dir.path().join("cert.json"));
        let n = num(&cert["N"]) as usize;
        ensure(n == expected, || format!("{name}: N = {n}, expected {expected}"))?;
        ensure(cert["proof-mode"] == "exhaustive", || format!("{name}: proof mode {}", cert["proof-mode"]))?;
        let bad = rle_decode(cert["bad-coloring"]["colors"].as_str().unwrap());
        ensure(bad.len() == n - 1, || format!("{name}: bad coloring has {} points", bad.len()))?;
        let mono = configs(n - 1).into_iter().find(|c| c.iter().all(|&x| bad[x - 1] == bad[c[0] - 1]));
        ensure(mono.is_none(), || format!("{name}: bad coloring has monochromatic {mono:?}"))?;
        ensure(forced(n, &configs(n)), || format!("{name}: oracle finds a good coloring at N = {n}"))?;
        ensure(!forced(n - 1, &configs(n - 1)), || format!("{name}: oracle says N - 1 already forces"))?;
        let check = ok_run(dir.path(), &["cert", "verify", "--file", dir.path().join("cert.json").to_str().unwrap()])?;
        ensure(check.starts_with("PASS"), || format!("{name}: {check}"))?;
        notes.push(format!("{name} N = {n} ({:.2}s)", start.elapsed().as_secs_f64()));
    }
    Ok(notes.join(", "))
}

fn criterion_4() -> Outcome {
    let dir = TempDir::new().unwrap();
    let start = Instant::now();
    let check = |colors: &[u8], cert: &Value| -> Result<(), String> {
        let s = seed_ints(cert);
        let (x, y, z) = (s[0], s[1], s[2]);
        let quad = [x, y + x * x, z, z + y * y];
        ensure(quad.iter().all(|&p| (1..=2000).contains(&p)), || format!("{quad:?} leaves [1,2000]"))?;
        ensure(quad.iter().collect::<BTreeSet<_>>().len() == 4, || format!("{quad:?} is degenerate"))?;
        let c: BTreeSet<u8> = quad.iter().map(|&p| colors[p as usize - 1]).collect();
        ensure(c.len() == 1, || format!("{quad:?} has colors {c:?}"))
    };
    let args = ["search", "mono", "--shape", "quadruple", "--domain", "1:2000", "--strict", "--coloring"];
    let mut a = args.to_vec();
    a.push("parity");
    ok_run(dir.path(), &a)?;
    let parity: Vec<u8> = (1..=2000).map(|p| (p % 2) as u8).collect();
    check(&parity, &read(dir.path().join("cert.json")))?;
    for i in 0..100 {
        let colors = random_colors(1000 + i, 2000);
        let file = coloring_file(dir.path(), "coloring.json", 1, 2000, colors.clone());
        let mut a = args.to_vec();
        a.push(file.to_str().unwrap());
        ok_run(dir.path(), &a)?;
        let cert = read(dir.path().join("cert.json"));
        ensure(cert["kind"] == "mono-witness", || format!("coloring {i}: {}", cert["kind"]))?;
        check(&colors, &cert)?;
    }
    within(start, Duration::from_secs(60))?;
    Ok(format!("parity and 100 random colorings, distinct witnesses ({:.2}s)", start.elapsed().as_secs_f64()))
}

fn criterion_5() -> Outcome {
    let dir = TempDir::new().unwrap();
    let start = Instant::now();
    ok_run(dir.path(), &["hj", "number", "--k", "2", "--colors", "2"])?;
    let doc = read(dir.path().join("hj.json"));
    ensure(num(&doc["n"]) == 2, || format!("n = {}", doc["n"]))?;
    ensure(num(&doc["bad-coloring"]["n"]) == 1, || "bad coloring is not at n = 1".into())?;
    let bad: Vec<char> = doc["bad-coloring"]["colors"].as_str().unwrap().chars().collect();
    ensure(bad.len() == 2 && bad[0] != bad[1], || format!("bad coloring {bad:?} has a line"))?;
    // words 00,01,10,11 as indices 0..4; the five lines of [2]^2
    let lines = [[0, 3], [0, 1], [2, 3], [0, 2], [1, 3]];
    let all = (0u32..16).all(|m| lines.iter().any(|l| (m >> l[0] & 1) == (m >> l[1] & 1)));
    ensure(all, || "oracle finds a line-free coloring of [2]^2".into())?;
    let check = ok_run(dir.path(), &["cert", "verify", "--file", dir.path().join("hj.json").to_str().unwrap()])?;
    ensure(check.starts_with("PASS") && check.contains("all 16 colorings"), || check.clone())?;
    within(start, Duration::from_secs(1))?;
    Ok(format!("HJ(2,2) = 2, bad coloring at n = 1, 16 colorings checked ({:.0} ms)", start.elapsed().as_secs_f64() * 1e3))
}

fn criterion_6() -> Outcome {
    let dir = TempDir::new().unwrap();
    let out = dir.path();
    let start = Instant::now();
    ok_run(out, &["lift", "build", "--shape", "trivial1", "--colors", "2", "--n", "2"])?;
    let plan_path = out.join("lift.json");
    let plan = LiftPlan::from_json(&read(&plan_path)).map_err(|e| e.to_string())?;
    let f = plan.input().families();
    ensure(plan.input().m() == 1 && f[0].len() == 2, || "normalized input is not F_1 = {0, id}".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut cases = BTreeSet::new();
    let mut colorings = 0u64;
    for i in 0..20 {
        let t: Vec<i64> = (0..3).map(|_| rng.gen_range(1..=5)).collect();
        let seed = t.iter().map(i64::to_string).collect::<Vec<_>>().join(",");
        ok_run(out, &["lift", "verify", "--plan", plan_path.to_str().unwrap(), "--seed", &seed, "--exhaustive"])?;
        let rep = read(out.join("lift-verification.json"));
        ensure(rep["ok"] == true && rep["failure"].is_null(), || format!("t = {t:?}: {}", rep["failure"]))?;
        ensure(num(&rep["n-insufficient"]) == 0 && rep["successes"] == rep["colorings"], || format!("t = {t:?}: not every coloring extracted"))?;
        colorings += num(&rep["colorings"]) as u64;
        cases.extend(rep["cases"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()));

        ok_run(out, &["lift", "verify", "--plan", plan_path.to_str().unwrap(), "--seed", &seed, "--coloring", &format!("random:{i}")])?;
        let single = read(out.join("lift-verification.json"));
        let small: Vec<i64> = single["result"]["small-seed"].as_array().unwrap().iter().map(|p| num(&p[0])).collect();
        let big: Vec<i64> = plan
            .big_shape()
            .unwrap()
            .evaluate(&t.iter().map(|&x| vec![BigInt::from(x)]).collect::<Vec<_>>())
            .unwrap()
            .points()
            .iter()
            .map(|p| i64::try_from(&p[0]).unwrap())
            .collect();
        let mut crng = ChaCha8Rng::seed_from_u64(i);
        let color: BTreeMap<i64, u8> = big.iter().map(|&p| (p, crng.gen_range(0..2u8))).collect();
        // line 0 is {s0}, line 1 is {s1, s0 + s1}; with k = 0 only line 1 must be monochromatic
        let config = [small[0], small[1], small[0] + small[1]];
        ensure(config.iter().all(|p| color.contains_key(p)), || format!("t = {t:?}: {config:?} not inside the lifted set"))?;
        let seen: BTreeSet<u8> = config[1..].iter().map(|p| color[p]).collect();
        ensure(seen.len() == 1, || format!("t = {t:?}: extracted line {:?} has colors {seen:?}", &config[1..]))?;
        ensure(single["result"]["line-colors"][0] == u64::from(color[&config[1]]), || format!("t = {t:?}: reported line color differs"))?;
    }
    ok_run(out, &["lift", "build", "--shape", "trivial2", "--colors", "2", "--k", "1", "--n", "2"])?;
    ok_run(out, &["lift", "verify", "--plan", plan_path.to_str().unwrap(), "--seed", "1,2,4,8", "--exhaustive"])?;
    let rep = read(out.join("lift-verification.json"));
    ensure(rep["ok"] == true, || "m = 2, k = 1 plan failed".into())?;
    let above: BTreeSet<String> = rep["cases"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().to_string()).collect();
    within(start, Duration::from_secs(120))?;
    let want = |s: &BTreeSet<String>, names: &[&str]| names.iter().all(|n| s.contains(*n));
    ensure(want(&cases, &["below", "middle"]), || format!("k = 0 cases seen: {cases:?}"))?;
    ensure(want(&above, &["below", "middle", "above"]), || format!("k = 1 cases seen: {above:?}"))?;
    Ok(format!(
        "{colorings} colorings over 20 seeds all extract (cases below, middle); m = 2, k = 1 plan shows below, middle, above ({:.2}s)",
        start.elapsed().as_secs_f64()
    ))
}

fn ints_set(shape: &Shape, s: &[i64]) -> BTreeSet<i64> {
    generate(shape, &SeedVector::scalars(s).unwrap())
        .unwrap()
        .points()
        .iter()
        .map(|p| i64::try_from(&p[0]).unwrap())
        .collect()
}

fn mpc_oracle(m: usize, p: i64, c: i64, s: &[i64]) -> BTreeSet<i64> {
    let mut out = BTreeSet::new();
    for j in 0..=m {
        let mut partial = vec![0i64];
        for &si in &s[..j] {
            partial = partial.iter().flat_map(|acc| (-p..=p).map(move |l| acc + l * si)).collect();
        }
        out.extend(partial.into_iter().map(|x| x + c * s[j]));
    }
    out
}

fn nonzero(rng: &mut ChaCha8Rng, bound: i64) -> i64 {
    let x = rng.gen_range(1..=bound);
    if rng.gen() { x } else { -x }
}

fn random_linear_shape(rng: &mut ChaCha8Rng) -> Shape {
    let m = rng.gen_range(1..=2usize);
    let per = rng.gen_range(1..=2usize);
    let c = rng.gen_range(1..=3i64);
    let families = (1..=m)
        .map(|j| {
            (0..per)
                .map(|_| {
                    let row: Vec<i64> = (0..j).map(|_| rng.gen_range(-3..=3)).collect();
                    PolyMap::from_matrix(&IntMatrix::from_i64(1, j, &row).unwrap())
                })
                .collect()
        })
        .collect();
    Shape::new(1, IntMatrix::scalar(1, BigInt::from(c)), families).unwrap()
}

fn criterion_7() -> Outcome {
    const CASES: usize = 1000;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for i in 0..CASES {
        let (m, p, c) = (rng.gen_range(1..=3usize), rng.gen_range(1..=2i64), rng.gen_range(1..=3i64));
        let s: Vec<i64> = (0..=m).map(|_| nonzero(&mut rng, 30)).collect();
        let got = ints_set(&from_mpc(m, p, c).unwrap(), &s);
        ensure(got == mpc_oracle(m, p, c, &s), || format!("(a) case {i}: ({m},{p},{c}) at {s:?}"))?;
    }
    for i in 0..CASES {
        let (m1, m2) = (rng.gen_range(1..=2usize), rng.gen_range(1..=2usize));
        let (c1, c2) = (rng.gen_range(1..=3i64), rng.gen_range(1..=3i64));
        let a = from_mpc(m1, 1, c1).unwrap();
        let b = from_mpc(m2, 1, c2).unwrap();
        let j = join(&a, &b).unwrap();
        let s: Vec<i64> = (0..=j.m()).map(|_| nonzero(&mut rng, 20)).collect();
        let big = ints_set(&j, &s);
        let scaled = |k: i64, len: usize| s[..len].iter().map(|x| x * k).collect::<Vec<_>>();
        ensure(ints_set(&a, &scaled(c2, m1 + 1)).is_subset(&big), || format!("(b) case {i}: first factor"))?;
        ensure(ints_set(&b, &scaled(c1, m2 + 1)).is_subset(&big), || format!("(b) case {i}: second factor"))?;
    }
    for i in 0..CASES {
        let m = rng.gen_range(1..=4usize);
        let s: Vec<i64> = (0..=m).map(|_| nonzero(&mut rng, 30)).collect();
        let set = ints_set(&from_mpc(m, 1, 1).unwrap(), &s);
        // subset sums computed directly
        let sums = (1u32..1 << s.len()).map(|mask| (0..s.len()).filter(|k| mask >> k & 1 == 1).map(|k| s[k]).sum::<i64>());
        let lib: BTreeSet<i64> = fs(s.iter().map(|&x| vec![BigInt::from(x)]).collect())
            .unwrap()
            .value_set()
            .iter()
            .map(|v| i64::try_from(&v[0]).unwrap())
            .collect();
        let direct: BTreeSet<i64> = sums.collect();
        ensure(lib == direct, || format!("(c) case {i}: FS mismatch"))?;
        ensure(direct.is_subset(&set), || format!("(c) case {i}: FS{s:?} not inside the (m,1,1)-set"))?;
    }
    for i in 0..CASES {
        let shape = normalize_for_lift(&random_linear_shape(&mut rng)).unwrap();
        let w = concordance_witness(&shape).unwrap().ok_or_else(|| format!("(d) case {i}: no witness"))?;
        let c = shape.c();
        for (fam, wits) in shape.family_matrices().unwrap().iter().zip(&w.a) {
            for (f, a) in fam.iter().zip(wits) {
                let lhs = c.mul(a).unwrap();
                let rhs = f.mul(&IntMatrix::block_diag(&w.b, f.cols())).unwrap();
                ensure(lhs == rhs, || format!("(d) case {i}: c·a ≠ f·b"))?;
            }
        }
    }
    let dir = TempDir::new().unwrap();
    let patterns: Vec<Pattern> = ["schur", "ap3", "ap4", "quadruple", "chain2"]
        .iter()
        .map(|n| catalog::by_name(n).unwrap())
        .collect();
    let mut files = Vec::with_capacity(CASES);
    let mut kinds = BTreeMap::<&str, usize>::new();
    for i in 0..CASES {
        let pattern = patterns[i % patterns.len()].clone();
        let hi = rng.gen_range(4..=40i64);
        let domain = Domain::interval(1, hi).unwrap();
        let colors: Vec<u8> = (0..hi).map(|_| rng.gen_range(0..2u8)).collect();
        let coloring = Coloring::new(domain.clone(), 2, colors).unwrap();
        let budget = SearchBudget { seed_range: Some((-hi, hi)), threads: 1, ..SearchBudget::default() };
        let cert = match find_mono(&pattern, &coloring, &budget).unwrap() {
            MonoOutcome::Found(cert) => cert,
            MonoOutcome::NoneWithinBudget => Certificate {
                claim: Claim::BadColoring { coloring },
                pattern,
                domain,
                seed_range: budget.seed_range,
                strict: false,
            },
            MonoOutcome::Exhausted { .. } => return Err(format!("(e) case {i}: search exhausted")),
        };
        *kinds.entry(cert.kind()).or_default() += 1;
        let text = serde_json::to_string(&cert.to_json()).unwrap();
        let back = Certificate::from_json(&serde_json::from_str(&text).unwrap()).map_err(|e| format!("(e) case {i}: {e}"))?;
        ensure(back == cert, || format!("(e) case {i}: reload differs"))?;
        let path = dir.path().join(format!("cert{i:04}.json"));
        std::fs::write(&path, text).unwrap();
        files.push(path);
    }
    let mut args = vec!["-q".to_string(), "cert".into(), "verify".into()];
    for f in &files {
        args.push("--file".into());
        args.push(f.display().to_string());
    }
    let argv: Vec<&str> = args.iter().map(String::as_str).collect();
    let out = dir.path().join("out");
    ok_run(&out, &argv)?;
    let report = read(out.join("verification.json"));
    let passed = report["results"].as_array().unwrap().iter().filter(|r| r["ok"] == true).count();
    ensure(passed == CASES, || format!("(e) {passed} of {CASES} certificates verified"))?;
    Ok(format!(
        "(a)-(d) {CASES} cases each; (e) {CASES} certificates round-tripped and verified ({})",
        kinds.iter().map(|(k, n)| format!("{n} {k}")).collect::<Vec<_>>().join(", ")
    ))
}

fn criterion_8() -> Outcome {
    let dir = TempDir::new().unwrap();
    let start = Instant::now();
    for i in 0..20 {
        let colors = random_colors(8000 + i, 5000);
        let file = coloring_file(dir.path(), "coloring.json", 1, 5000, colors.clone());
        ok_run(
            dir.path(),
            &["search", "mono", "--shape", "chain2", "--domain", "1:5000", "--strict", "--coloring", file.to_str().unwrap()],
        )?;
        let cert = read(dir.path().join("cert.json"));
        ensure(cert["kind"] == "mono-witness", || format!("coloring {i}: {}", cert["kind"]))?;
        let x = seed_ints(&cert);
        let a = [x[1] + x[0] * x[0], x[2] + x[1] * x[1]];
        let all = [x[0], x[1], x[2], a[0], a[1]];
        ensure(all.iter().all(|&p| (1..=5000).contains(&p)), || format!("coloring {i}: {all:?} leaves [1,5000]"))?;
        ensure(a[0] - x[1] == x[0] * x[0] && a[1] - x[2] == x[1] * x[1], || format!("coloring {i}: chain relation fails"))?;
        let seen: BTreeSet<u8> = all.iter().map(|&p| colors[p as usize - 1]).collect();
        ensure(seen.len() == 1, || format!("coloring {i}: {all:?} has colors {seen:?}"))?;
    }
    within(start, Duration::from_secs(120))?;
    Ok(format!("20 random colorings of [1,5000] ({:.2}s)", start.elapsed().as_secs_f64()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("columns condition vs subset-sum oracle", criterion_1),
        ("Schur reduction end to end", criterion_2),
        ("partition numbers", criterion_3),
        ("polynomial quadruple", criterion_4),
        ("Hales-Jewett number", criterion_5),
        ("lift soundness", criterion_6),
        ("structural properties", criterion_7),
        ("chained configuration", criterion_8),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {} {name}: {detail} [{secs:.2}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {} {name}: {why} [{secs:.2}s]", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
