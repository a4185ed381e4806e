//! Acceptance suite. Runs every criterion, prints one line each, and fails
//! if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use chern::cli::{execute, Cli};
use chern::report::{self, CertificateReport, ExtremalJson, VanishingReport};
use clap::Parser;
use chern_core::extremal::{analyze_extremal, find_extremal_sk, verify_uniform_from_rick};
use chern_core::functionals::{
    contract_base, direction_matrix_sum, holo_sectional, rc_form, ricci_k, scalar_k,
};
use chern_core::grassmann::{brute_force_certify, certify, inner_min_over_fibers, inner_max_over_fibers};
use chern_core::linalg::{self, HermitianEigen};
use chern_core::spherical::{
    closed_form_average_quadratic, closed_form_average_quartic, integral_rc_form, integral_ricci_k,
    integral_scalar_k, mc_sphere_average, moment_suite, QuarticCoefficients,
};
use chern_core::tensor::dual_tensor;
use chern_core::vanishing::{
    compute_constants, induced_action_spectrum, random_coefficients, vanishing_region, verify_estimate_bound,
};
use chern_core::{rng, zoo, Complex64, CurvatureTensor, OptimizerOptions, PositivityKind, Sense, Subspace};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn close(a: f64, b: f64, tol: f64, what: &str) -> Result<(), String> {
    ensure((a - b).abs() <= tol, || format!("{what}: {a} vs {b} (tol {tol:e})"))
}

fn fubini_study_golden() -> Outcome {
    let start = Instant::now();
    let opts = OptimizerOptions::default();
    let mut r = rng::seeded(1);
    let mut checks = 0usize;
    for n in 2..=4 {
        let fs = zoo::fubini_study(n, 2.0);
        for _ in 0..1000 {
            let x = rng::unit_sphere_vector(&mut r, n);
            close(holo_sectional(&fs, &x).unwrap(), 2.0, 1e-9, "H")?;
            checks += 1;
        }
        for k in 1..=n {
            for _ in 0..50 {
                let sigma = Subspace::random(n, k, &mut r);
                let x = sigma.random_unit_vector(&mut r);
                close(ricci_k(&fs, &sigma, &x).unwrap(), (k + 1) as f64, 1e-9, "Ric_k")?;
                close(scalar_k(&fs, &sigma).unwrap(), (k * (k + 1)) as f64, 1e-9, "S_k")?;
                checks += 2;
            }
        }
        for k in 1..n {
            let cert = certify(std::slice::from_ref(&fs), PositivityKind::UniformRc, k, 1, &opts).unwrap();
            close(cert.value, k as f64, 1e-9, &format!("uniform-RC n={n} k={k}"))?;
            let c = compute_constants(std::slice::from_ref(&fs), Some(&[zoo::flat(n, 2)]), k, &opts).unwrap();
            close(c.lambda_max, 2.0, 1e-9, "lambda_max")?;
            close(c.c1, 2.0, 1e-9, "C1")?;
            close(c.c2, 1.0, 1e-9, "C2")?;
            checks += 4;
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 30.0, || format!("took {secs:.1} s"))?;
    Ok(format!("{checks} checks in {secs:.2} s"))
}

fn spherical_moments() -> Outcome {
    let checks = moment_suite(4, 100_000, 7, 4.0).unwrap();
    let failed: Vec<_> = checks.iter().filter(|c| !c.passed).collect();
    ensure(failed.is_empty(), || format!("moments failed: {:?}", failed.iter().map(|c| &c.indices).collect::<Vec<_>>()))?;
    let mut r = rng::seeded(8);
    for i in 0..50 {
        let k = 1 + i % 4;
        let sigma = Subspace::full(k);
        let seed = 1000 + i as u64;
        if i % 2 == 0 {
            let g = rng::complex_normal_matrix(&mut r, k, k);
            let exact = closed_form_average_quadratic(&g).unwrap();
            let est = mc_sphere_average(|y| (y.transpose() * &g * y.map(|z| z.conj()))[(0, 0)], &sigma, 100_000, seed).unwrap();
            ensure(est.agrees_with(exact, 4.0, 1e-12), || format!("quadratic array {i}: {exact} vs {est:?}"))?;
        } else {
            let data: Vec<Complex64> = (0..k.pow(4)).map(|_| rng::complex_normal(&mut r)).collect();
            let g = QuarticCoefficients::new(k, data).unwrap();
            let exact = closed_form_average_quartic(&g).unwrap();
            let est = mc_sphere_average(|y| g.eval(y), &sigma, 100_000, seed).unwrap();
            ensure(est.agrees_with(exact, 4.0, 1e-12), || format!("quartic array {i}: {exact} vs {est:?}"))?;
        }
    }
    Ok(format!("{} moments and 50 random arrays within 4 standard errors", checks.len()))
}

fn functional_integral_agreement() -> Outcome {
    let mut r = rng::seeded(9);
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let n = 2 + (i % 3) as usize;
        let k = 1 + (i as usize / 3) % n;
        let ckl = zoo::random_ckl(n, 100 + i);
        let bundle = zoo::random_hermitian(n, 1 + (i % 3) as usize, 200 + i);
        let sigma = Subspace::random(n, k, &mut r);
        let u = rng::complex_normal_vector(&mut r, bundle.r());
        let x = sigma.random_unit_vector(&mut r).scale(1.5);
        let pairs = [
            (rc_form(&bundle, &sigma, &u).unwrap(), integral_rc_form(&bundle, &sigma, &u).unwrap()),
            (ricci_k(&ckl, &sigma, &x).unwrap(), integral_ricci_k(&ckl, &sigma, &x).unwrap()),
            (scalar_k(&ckl, &sigma).unwrap(), integral_scalar_k(&ckl, &sigma).unwrap()),
        ];
        for (a, b) in pairs {
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-10, || format!("worst difference {worst:e}"))?;
    Ok(format!("300 pairs, worst difference {worst:.1e}"))
}

fn oracle_equivalence() -> Outcome {
    let opts = OptimizerOptions::default();
    let mut worst: f64 = 0.0;
    let mut r = rng::seeded(10);
    for i in 0..25u64 {
        let n = 2 + (i % 2) as usize;
        let rk = 2 + ((i / 2) % 2) as usize;
        let k = 1 + (i as usize % 2).min(n - 1);
        let l = 1 + ((i / 4) as usize % 2).min(rk - 1);
        let t = zoo::random_hermitian(n, rk, 300 + i);
        for kind in PositivityKind::ALL {
            let opt = certify(std::slice::from_ref(&t), kind, k, l, &opts).unwrap().value;
            let brute = brute_force_certify(std::slice::from_ref(&t), kind, k, l, 20_000, i).unwrap();
            let gap = match kind.outer_sense() {
                // sampling can only fall short of a maximum or overshoot a minimum
                Sense::Max => opt - brute,
                Sense::Min => brute - opt,
            };
            ensure(gap >= -1e-9, || format!("tensor {i} {kind}: optimizer {opt} lost to sampling {brute}"))?;
            ensure(gap <= 5e-2, || format!("tensor {i} {kind}: optimizer {opt} vs sampling {brute}"))?;
            worst = worst.max(gap);
        }
        // Ky Fan inner values at a random base subspace are never beaten.
        let sigma = Subspace::random(n, k, &mut r);
        let a = direction_matrix_sum(&t, &sigma).unwrap();
        let (lo, _) = inner_min_over_fibers(&a, l).unwrap();
        let (hi, _) = inner_max_over_fibers(&a, l).unwrap();
        for _ in 0..100_000 {
            let f = Subspace::random(rk, l, &mut r);
            let v = a.compressed_trace(&f).unwrap();
            ensure(v >= lo - 1e-12 && v <= hi + 1e-12, || format!("tensor {i}: sampled fiber {v} outside [{lo}, {hi}]"))?;
        }
    }
    Ok(format!("125 certificates, largest optimizer-sampling gap {worst:.2e}"))
}

fn duality() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..100u64 {
        let n = 2 + (i % 2) as usize;
        let rk = 2 + ((i / 2) % 2) as usize;
        let k = 1 + (i as usize / 4) % n;
        let t = zoo::random_hermitian(n, rk, 400 + i);
        let opts = OptimizerOptions::default().with_seed(i);
        let a = certify(std::slice::from_ref(&t), PositivityKind::UniformRc, k, 1, &opts).unwrap().value;
        let b = certify(&[dual_tensor(&t)], PositivityKind::Bc, k, 1, &opts).unwrap().value;
        worst = worst.max((a + b).abs());
    }
    ensure(worst <= 1e-10, || format!("worst mismatch {worst:e}"))?;
    Ok(format!("100 tensors, worst mismatch {worst:.1e}"))
}

fn sampled_min_sk(t: &CurvatureTensor, k: usize, r: &mut rng::Rng, opts: &OptimizerOptions) -> f64 {
    let mut m = find_extremal_sk(t, k, Sense::Min, opts).unwrap().value;
    for _ in 0..200 {
        m = m.min(scalar_k(t, &Subspace::random(t.n(), k, r)).unwrap());
    }
    m
}

fn ckl_monotonicity() -> Outcome {
    let opts = OptimizerOptions::default().with_restarts(4);
    let mut r = rng::seeded(11);
    let (mut accepted, mut drawn) = (0, 0u64);
    while accepted < 200 {
        drawn += 1;
        ensure(drawn < 5000, || format!("only {accepted} instances passed the filter"))?;
        let n = 2 + (drawn % 4) as usize;
        let k = 1 + (drawn as usize / 4) % (n - 1);
        let s = 0.5 + (drawn % 7) as f64;
        let t = zoo::shifted_positive(n, 500 + drawn, s);
        if sampled_min_sk(&t, k, &mut r, &opts) <= 0.1 {
            continue;
        }
        accepted += 1;
        let next = sampled_min_sk(&t, k + 1, &mut r, &opts);
        ensure(next > 0.0, || format!("seed {}: min S_{} = {next}", 500 + drawn, k + 1))?;
    }
    Ok(format!("200 instances ({drawn} drawn), S_k > 0.1 always gave S_(k+1) > 0"))
}

fn extremal_verification() -> Outcome {
    let opts = OptimizerOptions::default();
    let (mut nz1, mut grad): (f64, f64) = (0.0, 0.0);
    for i in 0..50u64 {
        let t = zoo::random_ckl(3, 600 + i);
        let rep = analyze_extremal(&t, 2, Sense::Min, &opts, 100).unwrap();
        nz1 = nz1.max(rep.nz1_residual.unwrap());
        grad = grad.max(rep.gradient_norm);
        ensure(rep.nz1_residual.unwrap() <= 1e-4, || format!("seed {}: NZ1 {}", 600 + i, rep.nz1_residual.unwrap()))?;
        ensure(rep.gradient_norm <= 1e-4, || format!("seed {}: gradient {}", 600 + i, rep.gradient_norm))?;
    }
    let mut margin: f64 = 0.0;
    for n in 2..=4 {
        for k in 1..n {
            let rep = analyze_extremal(&zoo::fubini_study(n, 2.0), k, Sense::Min, &opts, 200).unwrap();
            margin = margin.max(rep.nz2_margin.unwrap().abs());
        }
    }
    ensure(margin <= 1e-10, || format!("Fubini-Study NZ2 margin {margin:e}"))?;
    Ok(format!("max NZ1 {nz1:.1e}, max gradient {grad:.1e}, Fubini-Study |NZ2| {margin:.1e}"))
}

fn rick_chain() -> Outcome {
    let opts = OptimizerOptions::default().with_restarts(8);
    let mut worst = f64::INFINITY;
    for k in 1..=2 {
        let rep = verify_uniform_from_rick(&zoo::fubini_study(3, 2.0), k, Sense::Min, &opts, 1000).unwrap();
        worst = worst.min(rep.chain_margin.unwrap());
    }
    let (mut accepted, mut drawn) = (0, 0u64);
    while accepted < 50 {
        drawn += 1;
        ensure(drawn < 1000, || format!("only {accepted} instances had D > 0"))?;
        let n = 2 + (drawn % 3) as usize;
        let k = 1 + (drawn as usize / 3) % n;
        let t = zoo::shifted_positive(n, 700 + drawn, 3.0 + (drawn % 4) as f64);
        let rep = match verify_uniform_from_rick(&t, k, Sense::Min, &opts.clone().with_seed(drawn), 1000) {
            Ok(rep) => rep,
            Err(e) if e.is_hypothesis_violation() => continue,
            Err(e) => return Err(e.to_string()),
        };
        accepted += 1;
        worst = worst.min(rep.chain_margin.unwrap());
    }
    ensure(worst >= -1e-8, || format!("chain margin {worst:e}"))?;
    Ok(format!("Fubini-Study and 50 shifted tensors, min margin {worst:.2e}"))
}

fn estimate_bound() -> Outcome {
    let opts = OptimizerOptions::default().with_restarts(6);
    let mut r = rng::seeded(12);
    let mut count = 0;
    let mut drawn = 0u64;
    while count < 100 {
        drawn += 1;
        ensure(drawn < 1000, || format!("only {count} positive instances"))?;
        let n = 2 + (drawn % 2) as usize;
        let k = 1 + (drawn as usize / 2) % (n - 1).max(1);
        let e = zoo::shifted_positive(n, 800 + drawn, 2.0 + (drawn % 5) as f64);
        let f = zoo::random_hermitian(n, 1 + (drawn % 2) as usize, 900 + drawn);
        let consts = match compute_constants(std::slice::from_ref(&e), Some(std::slice::from_ref(&f)), k, &opts.clone().with_seed(drawn)) {
            Ok(c) => c,
            Err(err) if err.is_hypothesis_violation() => continue,
            Err(err) => return Err(err.to_string()),
        };
        count += 1;
        let (p, q, m) = ((drawn % 3) as usize, (drawn / 3 % 4) as usize, (drawn / 12 % 2) as usize);
        let sigma = consts.certificate.points[0].base.clone();
        let t = random_coefficients(e.r(), f.r(), p, q, m, &mut r).unwrap();
        let rep = verify_estimate_bound(&e, Some(&f), &sigma, &t, p, q, m, &consts).unwrap();
        ensure(rep.holds, || format!("instance {drawn} ({p},{q},{m}): {} > {}", rep.lhs, rep.rhs))?;
        let x = rng::unit_sphere_vector(&mut r, n);
        let eig = |t: &CurvatureTensor| HermitianEigen::new(&linalg::hermitian_part(&contract_base(t, &linalg::outer(&x)))).values;
        let spectrum = induced_action_spectrum(&eig(&e), &eig(&f), p, q, m).unwrap();
        let top = spectrum.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let bound = p as f64 * consts.lambda_max - q as f64 * consts.lambda_min + m as f64 * consts.mu_max.unwrap();
        ensure(top <= bound + 1e-9 * bound.abs().max(1.0), || format!("instance {drawn}: spectrum max {top} > {bound}"))?;
    }
    Ok("100 positive instances, estimate and spectrum bounds hold".to_string())
}

fn certificate_json(t: &CurvatureTensor, kind: PositivityKind, opts: &OptimizerOptions) -> String {
    report::to_json(&CertificateReport::new(&certify(std::slice::from_ref(t), kind, 2, 1, opts).unwrap(), opts.tol))
}

fn determinism_and_scaling() -> Outcome {
    let opts = OptimizerOptions::default().with_seed(3);
    let t = zoo::random_hermitian(3, 3, 13);
    let ckl = zoo::shifted_positive(3, 14, 5.0);
    // Byte-identical reports.
    for kind in PositivityKind::ALL {
        ensure(certificate_json(&t, kind, &opts) == certificate_json(&t, kind, &opts), || format!("{kind} report differs"))?;
    }
    let vanishing = || report::to_json(&VanishingReport::new(&compute_constants(std::slice::from_ref(&ckl), None, 2, &opts).unwrap(), opts.tol, 3, 2));
    ensure(vanishing() == vanishing(), || "vanishing report differs".into())?;
    let extremal = || report::to_json(&ExtremalJson::from(&verify_uniform_from_rick(&ckl, 2, Sense::Min, &opts, 200).unwrap()));
    ensure(extremal() == extremal(), || "extremal report differs".into())?;
    let cli = |args: &[&str]| {
        let cli = Cli::try_parse_from(std::iter::once("chern").chain(args.iter().copied())).unwrap();
        execute(&cli).unwrap().text
    };
    for args in [
        &["analyze", "--model", "shifted:n=3,seed=14,s=5", "--samples", "2000", "--seed", "5"][..],
        &["verify-identities", "--k-max", "2", "--samples", "2000", "--seed", "5"][..],
        &["gen", "--model", "random-ckl:n=3,seed=4"][..],
    ] {
        ensure(cli(args) == cli(args), || format!("`{}` output differs", args.join(" ")))?;
    }

    // Scale invariance of booleans, linear scaling of values.
    let mut worst: f64 = 0.0;
    let rel = |a: f64, b: f64| (a - b).abs() / b.abs().max(1e-300);
    for (idx, base) in [zoo::random_hermitian(3, 2, 15), zoo::shifted_positive(3, 16, 2.0), zoo::random_ckl(3, 17)].iter().enumerate() {
        for kind in PositivityKind::ALL {
            let v = certify(std::slice::from_ref(base), kind, 2, 1, &opts).unwrap();
            for s in [0.5, 3.0] {
                let w = certify(&[base.scaled(s)], kind, 2, 1, &opts).unwrap();
                ensure(w.positive == v.positive, || format!("tensor {idx} {kind}: positivity flipped at t={s}"))?;
                let e = rel(w.value, s * v.value);
                worst = worst.max(e);
                ensure(e <= 1e-9, || format!("tensor {idx} {kind}: {} vs {s}·{}", w.value, v.value))?;
            }
        }
    }
    let base = compute_constants(std::slice::from_ref(&ckl), Some(&[zoo::random_hermitian(3, 2, 18)]), 2, &opts).unwrap();
    for s in [0.5, 3.0] {
        let f = zoo::random_hermitian(3, 2, 18).scaled(s);
        let c = compute_constants(&[ckl.scaled(s)], Some(&[f]), 2, &opts).unwrap();
        for (a, b, what) in [(c.c, s * base.c, "C"), (c.lambda_max, s * base.lambda_max, "lambda_max"), (c.c1, base.c1, "C1"), (c.c2, base.c2, "C2")] {
            let e = rel(a, b);
            worst = worst.max(e);
            ensure(e <= 1e-9, || format!("{what} at t={s}: {a} vs {b}"))?;
        }
        for p in 0..=3 {
            for q in 0..=8 {
                for m in 0..=2 {
                    ensure(vanishing_region(&c, p, q, m) == vanishing_region(&base, p, q, m), || format!("region ({p},{q},{m}) flipped at t={s}"))?;
                }
            }
        }
        let ext = verify_uniform_from_rick(&ckl.scaled(s), 2, Sense::Min, &opts, 200).unwrap();
        let ext0 = verify_uniform_from_rick(&ckl, 2, Sense::Min, &opts, 200).unwrap();
        for (a, b, what) in [(ext.d.unwrap(), s * ext0.d.unwrap(), "D"), (ext.s_k_value, s * ext0.s_k_value, "S_k")] {
            let e = rel(a, b);
            worst = worst.max(e);
            ensure(e <= 1e-9, || format!("{what} at t={s}: {a} vs {b}"))?;
        }
        ensure(ext.chain_holds() == ext0.chain_holds(), || "chain verdict flipped".into())?;
    }
    Ok(format!("reports byte-identical, worst relative scaling error {worst:.1e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("fubini-study golden values", fubini_study_golden),
        ("spherical moment suite", spherical_moments),
        ("functional/integral agreement", functional_integral_agreement),
        ("oracle equivalence", oracle_equivalence),
        ("dual-bundle duality", duality),
        ("ckl monotonicity of S_k", ckl_monotonicity),
        ("extremal verification", extremal_verification),
        ("Ric_k lower-bound chain", rick_chain),
        ("estimate bound", estimate_bound),
        ("determinism and scale invariance", determinism_and_scaling),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1} s]", i + 1),
            Err(detail) => {
                failures += 1;
                println!("criterion {:>2} FAIL  {name}: {detail} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
