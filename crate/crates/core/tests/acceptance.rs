//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero when any criterion fails.

mod common;

use std::panic::{self, AssertUnwindSafe};
use std::time::{Duration, Instant};

use common::*;
use mlti::matfun::place_single_input;
use mlti::spectral::conjugate_partner;
use mlti::{
    ctrb_check, design_feedback, identity_tensor, simulate, stability, teig, texp, tfun, tprod,
    tubal_rank, zero_input_solution, Assembly, BMode, ControllabilityMode, DenseMatrix,
    InputSignal, System, Tensor, TensorFunction, TimeGrid, Tube, C64,
};
use rand::Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn ac1() -> Outcome {
    let d = spectral_blocks(&reference_a());
    let d1 = M::from_real(2, 2, &[-6.0, 7.0, -2.0, 2.0]);
    let d2 = M::from_real(2, 2, &[-6.0, 3.0, -18.0, -2.0]);
    // the library's own slices, compared exactly
    let lib = mlti::to_spectral(&reference_a());
    let exact = |m: &DenseMatrix<f64>, w: &M| m.as_slice() == w.d.as_slice();
    check(exact(lib.slice(0), &d1) && exact(lib.slice(1), &d2), || {
        format!("spectral slices {:?} {:?}", lib.slice(0), lib.slice(1))
    })?;
    check(d[0].sub(&d1).fro() < 1e-12 && d[1].sub(&d2).fro() < 1e-12, || "oracle blocks differ".into())?;
    let rep = stability(&reference_system()).map_err(|e| e.to_string())?;
    let (s1, s2) = (&rep.per_slice_spectra[0], &rep.per_slice_spectra[1]);
    let r2 = 2f64.sqrt();
    let s50 = 50f64.sqrt();
    let e1 = spectrum_distance(s1, &[c(-2.0 + r2, 0.0), c(-2.0 - r2, 0.0)]);
    let e2 = spectrum_distance(s2, &[c(-4.0, s50), c(-4.0, -s50)]);
    check(e1 < 1e-12 && e2 < 1e-12, || format!("exact spectra off by {e1:e}, {e2:e}"))?;
    let p1 = spectrum_distance(s1, &[c(-0.586, 0.0), c(-3.414, 0.0)]);
    let p2 = spectrum_distance(s2, &[c(-4.0, 7.07), c(-4.0, -7.07)]);
    check(p1 <= 1e-3, || format!("printed real spectrum off by {p1:e}"))?;
    check(p2 <= 5e-3, || format!("printed complex spectrum off by {p2:e}"))?;
    Ok(format!("D1, D2 exact; printed deviations {p1:.1e}, {p2:.1e}"))
}

fn ac2() -> Outcome {
    let ones = DenseMatrix::from_real_rows(&[vec![1.0], vec![1.0]]);
    let d1 = DenseMatrix::from_real_rows(&[vec![-6.0, 7.0], vec![-2.0, 2.0]]);
    let d2 = DenseMatrix::from_real_rows(&[vec![-6.0, 3.0], vec![-18.0, -2.0]]);
    let req1 = [c(-2.0, 5.0), c(-2.0, -5.0)];
    let req2 = [c(-10.0, 10.0), c(-10.0, -10.0)];
    let k1 = place_single_input(&d1, &ones, &req1).map_err(|e| e.to_string())?;
    let k2 = place_single_input(&d2, &ones, &req2).map_err(|e| e.to_string())?;
    let k1v = [k1[(0, 0)].re, k1[(0, 1)].re];
    let k2v = [k2[(0, 0)].re, k2[(0, 1)].re];
    check((k1v[0] - 27.0).abs() <= 1e-9 && (k1v[1] + 27.0).abs() <= 1e-9, || format!("K1 = {k1v:?}"))?;

    // trace/determinant oracle for a 2x2 single-input pair: with b = [1;1],
    // tr(D - b k) = tr D - (k1 + k2), det(D - b k) is affine in k.
    let oracle = |d: [f64; 4], req: [C64; 2]| -> [f64; 2] {
        let tr = (req[0] + req[1]).re;
        let det = (req[0] * req[1]).re;
        // det(D - b k) = det D - k1 (d22 - d12) - k2 (d11 - d21)
        let (a, b, cc, dd) = (d[0], d[1], d[2], d[3]);
        let s = a + dd - tr; // k1 + k2
        let rhs = a * dd - b * cc - det; // k1 (dd - b) + k2 (a - cc)
        let (p, q) = (dd - b, a - cc);
        let k1 = (rhs - q * s) / (p - q);
        [k1, s - k1]
    };
    let o1 = oracle([-6.0, 7.0, -2.0, 2.0], req1);
    let o2 = oracle([-6.0, 3.0, -18.0, -2.0], req2);
    check((o1[0] - 27.0).abs() < 1e-12 && (o1[1] + 27.0).abs() < 1e-12, || format!("oracle K1 {o1:?}"))?;
    check((k2v[0] - o2[0]).abs() <= 1e-9 && (k2v[1] - o2[1]).abs() <= 1e-9, || format!("K2 {k2v:?} vs oracle {o2:?}"))?;
    check((k2v[0] - 16.3529).abs() <= 1e-4 && (k2v[1] + 4.3529).abs() <= 1e-4, || format!("K2 = {k2v:?}"))?;
    // printed two-decimal figures, relative tolerance
    let rel = |x: f64, p: f64| (x - p).abs() / p.abs();
    let r_k2 = rel(k2v[0], 16.35).max(rel(k2v[1], -4.35));
    check(r_k2 <= 2e-3, || format!("K2 vs printed: rel {r_k2:e}"))?;

    let g = design_feedback(
        &reference_system(),
        &[req1.to_vec(), req2.to_vec()],
        BMode::FirstBlock,
        Assembly::PaperCompat,
    )
    .map_err(|e| e.to_string())?;
    let ku = [g.k.get(0, 0, 0).re, g.k.get(0, 1, 0).re];
    let kl = [g.k.get(0, 0, 1).re, g.k.get(0, 1, 1).re];
    check(g.k.is_real(), || "assembled gain is complex".into())?;
    let exact_u = [o1[0] + o2[0], o1[1] + o2[1]];
    let exact_l = [o1[0] - o2[0], o1[1] - o2[1]];
    check(
        (ku[0] - exact_u[0]).abs() < 1e-9
            && (ku[1] - exact_u[1]).abs() < 1e-9
            && (kl[0] - exact_l[0]).abs() < 1e-9
            && (kl[1] - exact_l[1]).abs() < 1e-9,
        || format!("assembly {ku:?} {kl:?} vs oracle {exact_u:?} {exact_l:?}"),
    )?;
    let r_ku = rel(ku[0], 43.35).max(rel(ku[1], -31.35));
    check(r_ku <= 2e-3, || format!("K(1) vs printed: rel {r_ku:e}"))?;
    let a_kl = (kl[0] - 10.64).abs().max((kl[1] + 22.64).abs());
    check(a_kl <= 2e-2, || format!("K(2) vs printed: abs {a_kl:e}"))?;
    let a_ku = (ku[0] - 43.35).abs().max((ku[1] + 31.35).abs());
    let a_k2 = (k2v[0] - 16.35).abs().max((k2v[1] + 4.35).abs());
    Ok(format!(
        "K1 exact; K2 = [{:.6}, {:.6}]; K(1) = [{:.6}, {:.6}], K(2) = [{:.6}, {:.6}]; vs printed: rel {r_k2:.1e}/{r_ku:.1e}, abs {a_k2:.2e}/{a_ku:.2e}/{a_kl:.2e}",
        k2v[0], k2v[1], ku[0], ku[1], kl[0], kl[1]
    ))
}

fn ac3() -> Outcome {
    let mut r = rng(1003);
    let mut worst = 0.0f64;
    for _ in 0..25 {
        let n = r.gen_range(1..=4);
        let l = r.gen_range(1..=5);
        let pin = r.gen_bool(0.3);
        let ks = known_spectrum(&mut r, n, l, -2.0, 0.0, pin);
        let sys = System::autonomous(ks.tensor.clone()).map_err(|e| e.to_string())?;
        let s = r.gen_range(1..=2);
        let x0 = random_tensor(&mut r, n, s, l);
        for t in [0.1, 1.0, 5.0] {
            let got = zero_input_solution(&sys, &x0, t).map_err(|e| e.to_string())?;
            let e = expm_taylor(&common::bcirc(&ks.tensor).scale(c(t, 0.0)));
            let want = fold(&e.mul(&matvec(&x0)), n);
            let err = tensor_rel(&got, &want);
            worst = worst.max(err);
            check(err <= 1e-8, || format!("n={n} l={l} t={t}: rel {err:e}"))?;
        }
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

fn ac4() -> Outcome {
    let mut r = rng(1004);
    let (mut worst_rec, mut worst_lat) = (0.0f64, 0.0f64);
    for _ in 0..25 {
        let n = r.gen_range(1..=5);
        let l = r.gen_range(1..=6);
        let ks = known_spectrum(&mut r, n, l, -5.0, 5.0, false);
        let a = &ks.tensor;
        let e = teig(a).map_err(|e| e.to_string())?;
        let rec = e.reconstruct().map_err(|e| e.to_string())?;
        let err = tensor_rel(&rec, a);
        worst_rec = worst_rec.max(err);
        check(err <= 1e-8, || format!("n={n} l={l}: reconstruction {err:e}"))?;
        let norm = a.frobenius_norm();
        for (j, et) in e.eigentuples().iter().enumerate() {
            let pj = e.p.lateral_slice(j);
            let lhs = common::tprod(a, &pj);
            let dj: Tensor = et.tube.clone().into();
            let rhs = common::tprod(&pj, &dj);
            let res = slices(&lhs).iter().zip(slices(&rhs)).map(|(x, y)| x.sub(&y).fro().powi(2)).sum::<f64>().sqrt();
            worst_lat = worst_lat.max(res / norm);
            check(res <= 1e-8 * norm, || format!("n={n} l={l} j={j}: lateral residual {res:e}"))?;
        }
    }
    Ok(format!("worst reconstruction {worst_rec:.2e}, worst lateral residual {worst_lat:.2e}"))
}

fn ac5() -> Outcome {
    let mut r = rng(1005);
    let mut worst_c = 0.0f64;
    let mut stable_done = 0;
    while stable_done < 20 {
        let n = r.gen_range(1..=4);
        let l = r.gen_range(1..=5);
        let ks = known_spectrum(&mut r, n, l, -3.0, -0.2, false);
        let sys = System::autonomous(ks.tensor.clone()).map_err(|e| e.to_string())?;
        let rep = stability(&sys).map_err(|e| e.to_string())?;
        check(rep.stable, || format!("constructed stable system declared unstable ({})", rep.max_real_part))?;
        let alpha = rep.decay_rate;
        let horizon = 10.0 / alpha;
        let grid = TimeGrid::uniform(horizon, horizon / 400.0).map_err(|e| e.to_string())?;
        let x0 = random_tensor(&mut r, n, 1, l);
        let traj = simulate(&sys, &x0, &InputSignal::Zero, &grid).map_err(|e| e.to_string())?;
        let n0 = x0.frobenius_norm();
        let cfit = traj
            .times
            .iter()
            .zip(traj.norms())
            .map(|(t, x)| x / (n0 * (-0.99 * alpha * t).exp()))
            .fold(0.0, f64::max);
        worst_c = worst_c.max(cfit);
        check(cfit <= 10.0, || format!("n={n} l={l} alpha={alpha}: C = {cfit}"))?;
        stable_done += 1;
    }
    let mut min_ratio = f64::INFINITY;
    for _ in 0..10 {
        let n = r.gen_range(1..=4);
        let l = r.gen_range(1..=5);
        let top = r.gen_range(0.2..1.0);
        let ks = known_spectrum(&mut r, n, l, -3.0, top, true);
        let sys = System::autonomous(ks.tensor.clone()).map_err(|e| e.to_string())?;
        let rep = stability(&sys).map_err(|e| e.to_string())?;
        check(!rep.stable, || "constructed unstable system declared stable".into())?;
        let horizon = 10.0 / rep.max_real_part.abs();
        let grid = TimeGrid::uniform(horizon, horizon / 400.0).map_err(|e| e.to_string())?;
        let x0 = random_tensor(&mut r, n, 1, l);
        let traj = simulate(&sys, &x0, &InputSignal::Zero, &grid).map_err(|e| e.to_string())?;
        let n0 = x0.frobenius_norm();
        let peak = traj.states.iter().flat_map(|x| x.as_slice().iter().map(|z| z.norm())).fold(0.0, f64::max);
        min_ratio = min_ratio.min(peak / n0);
        check(peak > 10.0 * n0, || format!("n={n} l={l}: peak entry {peak} vs 10*|X0| = {}", 10.0 * n0))?;
    }
    Ok(format!("stable: worst C = {worst_c:.3}; unstable: smallest peak/|X0| = {min_ratio:.3e}"))
}

fn ac6() -> Outcome {
    let mut r = rng(1006);
    let mut worst = 0.0f64;
    for _ in 0..10 {
        let n = r.gen_range(1..=3);
        let l = r.gen_range(1..=4);
        let q = r.gen_range(1..=2);
        let ks = known_spectrum(&mut r, n, l, -3.0, -0.2, false);
        let b = random_tensor(&mut r, n, q, l);
        let sys = System::new(ks.tensor.clone(), b.clone()).map_err(|e| e.to_string())?;
        let x0 = random_tensor(&mut r, n, 1, l);
        let u = random_tensor(&mut r, q, 1, l);
        let grid = TimeGrid::uniform(1.0, 0.05).map_err(|e| e.to_string())?;
        let traj = simulate(&sys, &x0, &InputSignal::Constant(u.clone()), &grid).map_err(|e| e.to_string())?;
        let g = common::bcirc(&b).mul(&matvec(&u));
        let want = fold(&rk4(&common::bcirc(&ks.tensor), &g, &matvec(&x0), 1.0, 1e-5), n);
        let err = tensor_rel(traj.final_state(), &want);
        worst = worst.max(err);
        check(err <= 1e-6, || format!("n={n} l={l} q={q}: rel {err:e}"))?;
    }
    Ok(format!("worst relative error {worst:.2e}"))
}

fn ac7() -> Outcome {
    let mut r = rng(1007);
    let mut uncontrollable = 0;
    for trial in 0..50 {
        let n = r.gen_range(1..=4);
        let l = r.gen_range(1..=5);
        let a = random_tensor(&mut r, n, n, l);
        let b = if trial % 3 == 2 {
            // plant an input that vanishes on one conjugate pair of slices
            let mut blocks = spectral_blocks(&random_tensor(&mut r, n, 1, l));
            let kill = r.gen_range(0..l);
            blocks[kill] = M::zeros(n, 1);
            blocks[conjugate_partner(kill, l)] = M::zeros(n, 1);
            let t = from_blocks(&blocks);
            Tensor::from_real(n, 1, l, &t.as_slice().iter().map(|z| z.re).collect::<Vec<_>>()).unwrap()
        } else {
            random_tensor(&mut r, n, 1, l)
        };
        let sys = System::new(a, b).map_err(|e| e.to_string())?;
        let per = ctrb_check(&sys, ControllabilityMode::PerSlice).map_err(|e| e.to_string())?;
        let lifted = ctrb_check(&sys, ControllabilityMode::LiftedKalman).map_err(|e| e.to_string())?;
        check(per.controllable == lifted.controllable, || {
            format!("trial {trial}: per-slice {} vs lifted {}", per.controllable, lifted.controllable)
        })?;
        if !per.controllable {
            uncontrollable += 1;
        }
    }
    let sys = reference_system();
    let per = ctrb_check(&sys, ControllabilityMode::PerSlice).map_err(|e| e.to_string())?;
    let slices = per.per_slice.clone().unwrap_or_default();
    check(slices.len() == 2 && slices[0].controllable && !slices[1].controllable && slices[1].rank == 0, || {
        format!("reference per-slice {slices:?}")
    })?;
    let bhat = spectral_blocks(&reference_b());
    let lib_bhat = mlti::to_spectral(&reference_b());
    check(bhat[1].fro() < 1e-15 && lib_bhat.slice(1).frobenius_norm() == 0.0, || "B-hat_2 is not zero".into())?;
    let lifted = ctrb_check(&sys, ControllabilityMode::LiftedKalman).map_err(|e| e.to_string())?;
    check(lifted.rank == 2 && lifted.required == 4 && !lifted.controllable, || format!("lifted {lifted:?}"))?;
    Ok(format!("50 systems agree ({uncontrollable} uncontrollable); reference slice 2 rank 0, lifted rank 2/4"))
}

fn ac8() -> Outcome {
    let mut r = rng(1008);
    let mut worst = [0.0f64; 5];
    for trial in 0..100 {
        let l = r.gen_range(1..=6);
        let (m, n, p, q) = (r.gen_range(1..=4), r.gen_range(1..=4), r.gen_range(1..=4), r.gen_range(1..=4));
        let a = random_tensor(&mut r, m, n, l);
        let b = random_tensor(&mut r, n, p, l);
        let cc = random_tensor(&mut r, p, q, l);
        let tp = |x: &Tensor, y: &Tensor| tprod(x, y).map_err(|e| e.to_string());
        // associativity
        let lhs = tp(&tp(&a, &b)?, &cc)?;
        let rhs = tp(&a, &tp(&b, &cc)?)?;
        let e = tensor_rel(&lhs, &rhs);
        worst[0] = worst[0].max(e);
        check(e <= 1e-12, || format!("trial {trial}: associativity {e:e}"))?;
        // identity laws
        let left = tp(&identity_tensor(m, l), &a)?;
        let right = tp(&a, &identity_tensor(n, l))?;
        let e = tensor_rel(&left, &a).max(tensor_rel(&right, &a));
        worst[1] = worst[1].max(e);
        check(e <= 1e-14, || format!("trial {trial}: identity {e:e}"))?;
        // bcirc homomorphism
        let e = rel_err(&common::bcirc(&tp(&a, &b)?), &common::bcirc(&a).mul(&common::bcirc(&b)));
        worst[2] = worst[2].max(e);
        check(e <= 1e-12, || format!("trial {trial}: homomorphism {e:e}"))?;
        // f(A) commutes with A, semigroup of texp
        let s_a = random_tensor(&mut r, n, n, l).scale_real(0.5);
        let f = if trial % 2 == 0 { TensorFunction::exp(0.7) } else { TensorFunction::polynomial(&[1.0, -0.5, 0.25, 0.1]) };
        let fa = tfun(&s_a, &f).map_err(|e| e.to_string())?;
        let e = tensor_rel(&tp(&fa, &s_a)?, &tp(&s_a, &fa)?);
        worst[3] = worst[3].max(e);
        check(e <= 1e-10, || format!("trial {trial}: commutation {e:e}"))?;
        let (s, t) = (r.gen_range(0.0..1.5), r.gen_range(0.0..1.5));
        let ts = |x: f64| texp(&s_a, x).map_err(|e| e.to_string());
        let e = tensor_rel(&ts(s + t)?, &tp(&ts(s)?, &ts(t)?)?);
        worst[4] = worst[4].max(e);
        check(e <= 1e-10, || format!("trial {trial}: semigroup {e:e}"))?;
        // tubal rank examples
        let len = r.gen_range(1..=16);
        let mut e1 = vec![0.0; len];
        e1[0] = r.gen_range(0.5..3.0);
        let ones = vec![r.gen_range(0.5..3.0); len];
        let zero = vec![0.0; len];
        let ranks = [e1, ones, zero].map(|v| tubal_rank(&Tube::from_real(&v).unwrap()));
        check(ranks == [len, 1, 0], || format!("trial {trial}: tubal ranks {ranks:?} for length {len}"))?;
    }
    Ok(format!(
        "100 trials; worst assoc {:.1e}, identity {:.1e}, bcirc {:.1e}, commute {:.1e}, semigroup {:.1e}",
        worst[0], worst[1], worst[2], worst[3], worst[4]
    ))
}

fn main() {
    let criteria: [(&str, &str, fn() -> Outcome, Duration); 8] = [
        ("AC1", "golden spectra", ac1, Duration::from_secs(1)),
        ("AC2", "golden gains", ac2, Duration::from_secs(1)),
        ("AC3", "tensor exponential equivalence", ac3, Duration::from_secs(10)),
        ("AC4", "t-eigendecomposition reconstruction", ac4, Duration::from_secs(10)),
        ("AC5", "stability claim", ac5, Duration::from_secs(30)),
        ("AC6", "zero-state integrator", ac6, Duration::from_secs(30)),
        ("AC7", "controllability modes", ac7, Duration::from_secs(5)),
        ("AC8", "algebraic properties", ac8, Duration::from_secs(60)),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (id, name, f, limit) in criteria {
        let start = Instant::now();
        let res = panic::catch_unwind(AssertUnwindSafe(f))
            .unwrap_or_else(|p| {
                let msg = p
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_else(|| "panic".into());
                Err(format!("panicked: {msg}"))
            });
        let took = start.elapsed();
        let res = match res {
            Ok(detail) if took > limit => Err(format!("{detail}; too slow: {took:.2?} > {limit:?}")),
            other => other,
        };
        match res {
            Ok(detail) => println!("PASS {id} {name} ({took:.2?}): {detail}"),
            Err(why) => {
                failed += 1;
                println!("FAIL {id} {name} ({took:.2?}): {why}");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
