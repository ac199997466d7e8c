//! End-to-end acceptance checks. Runs without the libtest harness so every
//! criterion prints its own PASS/FAIL line.

use std::time::{Duration, Instant};

use bertini_core::bounds::{
    bound_simple, corollary_pipeline, l_fraction, minimal_d, replay_certificate, BoundQuery, Inequality,
    SolveOptions, ZetaSpec,
};
use bertini_core::gf::FieldSpec;
use bertini_core::groebner::{buchberger, Ideal};
use bertini_core::harness::{
    run_fraction, verify_bk, verify_lemma_suite, ExperimentPlan, Mode, Suite, SuiteParams,
};
use bertini_core::polyring::{FormSpace, HomogeneousForm};
use bertini_core::scheme::{section_decide, EmbeddedScheme, PointScanner, SectionEngine, SectionVerdict};
use bertini_core::zeta::WeilModel;
use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::One;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(t: Duration, limit_s: u64) -> Result<(), String> {
    ensure(t.as_secs_f64() < limit_s as f64, format!("took {:.1}s, limit {limit_s}s", t.as_secs_f64()))
}

/// Rank of vectors over `F_q` by Gaussian elimination.
fn rank(f: &FieldSpec, mut rows: Vec<Vec<u32>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows.len()).find(|&i| rows[i][c] != 0) else { continue };
        rows.swap(r, p);
        let inv = f.inv(rows[r][c]).unwrap();
        for i in 0..rows.len() {
            if i != r && rows[i][c] != 0 {
                let m = f.mul(rows[i][c], inv);
                for j in 0..cols {
                    let s = f.mul(m, rows[r][j]);
                    rows[i][j] = f.sub(rows[i][j], s);
                }
            }
        }
        r += 1;
    }
    r
}

fn ac1() -> Outcome {
    let t = Instant::now();
    let mut cases = 0;
    for q in [2u64, 3, 4, 5] {
        let f = FieldSpec::of_order(q).unwrap();
        for n in 1..=3u32 {
            for k in 1..=n {
                let total = q.pow(n * k);
                let mut independent = 0u64;
                for idx in 0..total {
                    let mut x = idx;
                    let rows: Vec<Vec<u32>> = (0..k)
                        .map(|_| {
                            (0..n)
                                .map(|_| {
                                    let c = (x % q) as u32;
                                    x /= q;
                                    c
                                })
                                .collect()
                        })
                        .collect();
                    if rank(&f, rows) == k as usize {
                        independent += 1;
                    }
                }
                let oracle = BigRational::new(BigInt::from(independent), BigInt::from(total));
                let got = l_fraction(&BigInt::from(q), n, k).map_err(|e| e.to_string())?;
                ensure(got == oracle, format!("q={q} n={n} k={k}: {got} != {oracle}"))?;
                cases += 1;
            }
        }
    }
    within(t.elapsed(), 60)?;
    Ok(format!("{cases} (q,n,k) cases exact"))
}

fn ac2() -> Outcome {
    let p = SuiteParams::default();
    let mut notes = Vec::new();
    for s in [Suite::Lemma33, Suite::Lemma34] {
        let r = verify_lemma_suite(s, &p).map_err(|e| e.to_string())?;
        ensure(r.counterexample.is_none(), format!("{s}: counterexample {:?}", r.counterexample))?;
        ensure(r.inconclusive.is_empty(), format!("{s}: {} inconclusive", r.inconclusive.len()))?;
        ensure(r.max_bits_used <= 256, format!("{s}: needed {} bits", r.max_bits_used))?;
        notes.push(format!("{s} {} cases", r.cases));
    }
    Ok(notes.join(", "))
}

fn ac3() -> Outcome {
    let t = Instant::now();
    let p = SuiteParams { e_cutoff: 20, bits: 128, max_bits: 128, ..SuiteParams::default() };
    let r = verify_lemma_suite(Suite::Prop32, &p).map_err(|e| e.to_string())?;
    ensure(r.passed(), format!("report {}", r.to_json()))?;
    ensure(r.cases == 5, format!("expected 5 (fixture, k) cases, got {}", r.cases))?;
    ensure(WeilModel::projective_space(2, 2).unwrap().point_count(1) == BigUint::from(7u32), "#P^2(F_2) != 7")?;
    within(t.elapsed(), 30)?;
    Ok(format!("{} cases at 128 bits", r.cases))
}

fn ac4() -> Outcome {
    let t = Instant::now();
    let f2 = FieldSpec::of_order(2).unwrap();
    let x = EmbeddedScheme::projective_space(&f2, 2).unwrap();
    let mut out = Vec::new();
    for (d, total) in [(1u32, 8u64), (2, 64), (3, 1024)] {
        let plan = ExperimentPlan::new(x.clone(), vec![d], Mode::Exhaustive, SectionEngine::Groebner)
            .unwrap()
            .with_partitions(8);
        let rep = verify_bk(&plan, 20, 64).map_err(|e| e.to_string())?;
        ensure(rep.result.total == total, format!("d={d}: total {}", rep.result.total))?;
        if d == 1 {
            ensure(rep.result.fraction == BigRational::new(7.into(), 8.into()), "d=1 fraction is not 7/8")?;
        }
        ensure(rep.verdict == bertini_core::rigor::Verdict::Holds, format!("d={d}: {:?}", rep.verdict))?;
        out.push(format!("d={d} {}", rep.result.fraction));
    }
    within(t.elapsed(), 120)?;
    Ok(out.join(", "))
}

fn ac5() -> Outcome {
    let f2 = FieldSpec::of_order(2).unwrap();
    let x = EmbeddedScheme::projective_space(&f2, 2).unwrap();
    let scanner = PointScanner::new(&f2, 2);
    let mut compared = 0;
    for d in [2u32, 3] {
        let space = FormSpace::new(&f2, 3, &[d], 1 << 20).unwrap();
        for fs in space.iter_range(0..space.total()) {
            let g = section_decide(&x, &fs, SectionEngine::Groebner).map_err(|e| e.to_string())?;
            let p = scanner.decide(&x, &fs, 8).map_err(|e| e.to_string())?;
            let contradiction = p != SectionVerdict::Inconclusive && p != g;
            ensure(!contradiction, format!("{:?}: groebner {g:?}, pointscan {p:?}", fs.forms()))?;
            compared += 1;
        }
    }
    Ok(format!("{compared} tuples, zero disagreements"))
}

fn ac6() -> Outcome {
    let t = Instant::now();
    let model = WeilModel::projective_space(2, 3).unwrap();
    let q = BoundQuery::new(3, 2, 2, BigUint::one())
        .and_then(|q| q.with_k(1))
        .map_err(|e| e.to_string())?
        .with_zeta(ZetaSpec::Model { model, e_cutoff: 20 });
    let cert = minimal_d(Inequality::Prop41, &q, &SolveOptions::default()).map_err(|e| e.to_string())?;
    let ok = replay_certificate(&q, &cert).map_err(|e| e.to_string())?;
    ensure(ok, "certificate replay failed")?;
    within(t.elapsed(), 5)?;
    Ok(format!("d = {} at {} bits, d-1 {:?}", cert.d, cert.bits, cert.previous.map(|p| p.0)))
}

fn ac7() -> Outcome {
    let opts = SolveOptions::default();
    let a = bound_simple(&BoundQuery::new(2, 2, 2, 18u32.into()).unwrap(), &opts).map_err(|e| e.to_string())?;
    ensure(a.minimal_d() == Some(&BigUint::from(2u32)), "deg 18: minimal d != 2")?;
    ensure(a.curve_degree == Some(36u32.into()), "deg 18: curve degree != 36")?;
    ensure(a.genus_bound == Some(1332.into()), "deg 18: genus bound != 1332")?;
    ensure(a.sharper_genus_bound == Some(1330u32.into()), "deg 18: sharper bound != 1330")?;
    let b = bound_simple(&BoundQuery::new(2, 2, 2, 65u32.into()).unwrap(), &opts).map_err(|e| e.to_string())?;
    ensure(b.minimal_d() == Some(&BigUint::from(3u32)), "deg 65: minimal d != 3")?;
    Ok("d=2, D=36, g<=1332/1330; deg 65 gives d=3".into())
}

fn ac8() -> Outcome {
    let t = Instant::now();
    let opts = SolveOptions::default();
    for q in [2, 3] {
        let r = corollary_pipeline(1, q, &opts).map_err(|e| e.to_string())?;
        ensure(r.genus_bound == Some(BigInt::one()), format!("B_1,{q} != 1"))?;
    }
    let a = corollary_pipeline(2, 3, &opts).map_err(|e| e.to_string())?;
    let b = corollary_pipeline(2, 3, &opts).map_err(|e| e.to_string())?;
    let (ja, jb) = (a.to_json().to_string(), b.to_json().to_string());
    ensure(ja == jb, "two runs differ")?;
    let g = a.genus_bound.clone().ok_or("no genus bound")?;
    within(t.elapsed(), 60)?;
    Ok(format!("B_2,3 = {g} (about 2^{})", g.bits()))
}

fn ac9() -> Outcome {
    let f = FieldSpec::of_order(3).unwrap();
    let gens = ["x0*x2-x1^2", "x1*x3-x2^2", "x0*x3-x1*x2"]
        .iter()
        .map(|s| HomogeneousForm::parse(&f, 4, s).unwrap())
        .collect();
    let gb = buchberger(&Ideal::new(&f, 4, gens).unwrap()).map_err(|e| e.to_string())?;
    for d in 0..=10u32 {
        let hf = gb.hilbert_value(d);
        ensure(hf == 3 * d as u64 + 1 && hf >= d as u64 + 1, format!("HF({d}) = {hf}"))?;
    }
    Ok("HF(d) = 3d+1 for d <= 10".into())
}

fn ac10() -> Outcome {
    let f3 = FieldSpec::of_order(3).unwrap();
    let x = EmbeddedScheme::projective_space(&f3, 2).unwrap();
    let base = ExperimentPlan::new(x, vec![3], Mode::Exhaustive, SectionEngine::Groebner).unwrap();
    let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let t = Instant::now();
    let single = pool.install(|| run_fraction(&base)).map_err(|e| e.to_string())?;
    let elapsed = t.elapsed();
    ensure(single.total == 59049, format!("total {}", single.total))?;
    within(elapsed, 120)?;
    let parallel = run_fraction(&base.clone().with_partitions(16)).map_err(|e| e.to_string())?;
    ensure(parallel == single, "partitioned tallies differ")?;
    Ok(format!("{} smooth of 59049 in {:.2}s single-threaded", single.counts.get(SectionVerdict::SmoothOfExpectedDim), elapsed.as_secs_f64()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("L-fraction equals exhaustive enumeration", ac1),
        ("product and L lower-bound suites", ac2),
        ("zeta inverse below the Euler product", ac3),
        ("exhaustive fractions meet the error term", ac4),
        ("groebner and pointscan agree", ac5),
        ("minimal-d certificate replays", ac6),
        ("simple-case pipeline", ac7),
        ("corollary pipeline", ac8),
        ("twisted cubic Hilbert function", ac9),
        ("ternary cubics over F_3", ac10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({detail}; {secs:.2}s)", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} ({secs:.2}s)", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
