//! Acceptance checks. Each criterion prints one PASS/FAIL line; the process
//! exits nonzero if any fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spincost::cost::{
    circuit_cost, intensity_requirement, max_feasible_qubits, qft_cost_closed_form,
};
use spincost::route::{cancel_swaps, route_lnn, RoutingStrategy, SwapReport};
use spincost::simulate::{
    circuit_unitary, dft_matrix, equal_up_to_global_phase, fidelity, gate_unitary,
};
use spincost::synth::{build_aqft, build_qft, lower_cphase, lower_xor, XorMode};
use spincost::{
    route::all_adjacent, ControlMode, Dyadic, DyadicAngle, Gate, HardwareModel, UnitPolicy,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn duration_model(policy: UnitPolicy) -> HardwareModel {
    HardwareModel::new(ControlMode::DurationControl, policy)
}

fn qft_correctness() -> Outcome {
    let start = Instant::now();
    let mut worst = 0.0f64;
    for n in 1..=8 {
        let u = circuit_unitary(&build_qft(n, true).unwrap()).unwrap();
        let m = equal_up_to_global_phase(&u, &dft_matrix(n).unwrap(), 1e-10).unwrap();
        check(m.equal, || format!("n={n} residual {:.3e}", m.residual))?;
        worst = worst.max(m.residual);
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!("n=1..8, worst residual {worst:.2e}, {elapsed:.2?}"))
}

fn xor_from_exchange() -> Outcome {
    let expected = Complex64::from_polar(1.0, -std::f64::consts::FRAC_PI_4);
    let mut notes = Vec::new();
    for (j, k) in [(0, 1), (1, 0)] {
        let lowered = circuit_unitary(&lower_xor(j, k).unwrap()).unwrap();
        let ideal = gate_unitary(&Gate::xor(j, k), 2).unwrap();
        let m = equal_up_to_global_phase(&lowered, &ideal, 1e-11).unwrap();
        check(m.equal, || format!("({j},{k}) residual {:.3e}", m.residual))?;
        let lambda = m.phase.unwrap();
        let soft = if (lambda - expected).norm() < 1e-11 {
            "= e^{-i pi/4}"
        } else {
            "differs from e^{-i pi/4}"
        };
        notes.push(format!(
            "({j},{k}) lambda={:+.6}{:+.6}i {soft}",
            lambda.re, lambda.im
        ));
    }
    Ok(notes.join("; "))
}

fn cphase_from_xor() -> Outcome {
    let mut angles: Vec<DyadicAngle> = (0..=10).map(DyadicAngle::theta).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for _ in 0..50 {
        let den = rng.gen_range(0..=12i64);
        let num = rng.gen_range(-(1i64 << 13)..=(1i64 << 13));
        angles.push(DyadicAngle::new(num, den).unwrap());
    }
    let mut worst = 0.0f64;
    for theta in &angles {
        for (j, k) in [(0, 1), (1, 0)] {
            let lowered =
                circuit_unitary(&lower_cphase(j, k, theta, XorMode::Ideal).unwrap()).unwrap();
            let target = gate_unitary(&Gate::cphase(j, k, theta.clone()), 2).unwrap();
            // no phase allowance
            let d = lowered.frobenius_distance(&target).unwrap();
            check(d <= 1e-11, || {
                format!("theta={theta} ({j},{k}) distance {d:.3e}")
            })?;
            worst = worst.max(d);
        }
    }
    Ok(format!(
        "{} angles, worst distance {worst:.2e}",
        angles.len()
    ))
}

/// Oracle: sum of 2^(e + j - k) over j < k, independent of any closed form.
fn double_sum(n: usize, e: i64) -> Dyadic {
    let mut total = Dyadic::zero();
    for j in 0..n {
        for k in (j + 1)..n {
            total = &total + &Dyadic::pow2(e + j as i64 - k as i64);
        }
    }
    total
}

fn linear_unit_cost() -> Outcome {
    let model = duration_model(UnitPolicy::TauZero);
    for n in 2..=20usize {
        let measured = circuit_cost(&build_qft(n, false).unwrap(), &model)
            .unwrap()
            .breakdown
            .controlled_rotation;
        let formula =
            &(&Dyadic::from_int(n as u64) + &Dyadic::pow2(1 - n as i64)) - &Dyadic::from_int(2);
        check(measured == formula, || {
            format!("n={n}: {measured} vs {formula}")
        })?;
        check(double_sum(n, 0) == formula, || {
            format!("n={n}: double sum differs")
        })?;
    }
    Ok("n=2..20 exact".into())
}

fn exponential_unit_cost() -> Outcome {
    let model = duration_model(UnitPolicy::TauNMinusOne);
    for n in 2..=20usize {
        let measured = circuit_cost(&build_qft(n, false).unwrap(), &model)
            .unwrap()
            .breakdown
            .controlled_rotation;
        let formula = Dyadic::from_int(((n as u64 - 2) << (n - 1)) + 1);
        check(measured == formula, || {
            format!("n={n}: {measured} vs {formula}")
        })?;
        check(double_sum(n, n as i64 - 1) == formula, || {
            format!("n={n}: double sum differs")
        })?;
    }
    let start = Instant::now();
    for n in 2..=4096usize {
        let v = qft_cost_closed_form(n, UnitPolicy::TauNMinusOne).unwrap();
        let expected = (BigInt::from(n - 2) << (n - 1)) + 1;
        check(v.is_integer() && v.floor() == expected, || {
            format!("n={n} big-integer mismatch")
        })?;
    }
    let elapsed = start.elapsed();
    check(elapsed < Duration::from_secs(5), || {
        format!("closed forms took {elapsed:?}")
    })?;
    Ok(format!(
        "n=2..20 exact, closed form to n=4096 in {elapsed:.2?}"
    ))
}

fn scaling_shape() -> Outcome {
    // least squares of y = cost / 2^n against a*n + b over n = 10..30
    let pts: Vec<(f64, f64)> = (10..=30usize)
        .map(|n| {
            let c = qft_cost_closed_form(n, UnitPolicy::TauNMinusOne).unwrap();
            (n as f64, c.mul_pow2(-(n as i64)).to_f64())
        })
        .collect();
    let len = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / len, sy / len);
    let sxy: f64 = pts.iter().map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = pts.iter().map(|(x, _)| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let rel = (slope - 0.5).abs() / 0.5;
    check(rel <= 0.02, || {
        format!(
            "fitted coefficient {slope:.6} is {:.2}% from 1/2",
            rel * 100.0
        )
    })?;
    let raw = qft_cost_closed_form(30, UnitPolicy::TauNMinusOne)
        .unwrap()
        .to_f64()
        / (30.0 * 2f64.powi(30));
    Ok(format!(
        "fitted coefficient {slope:.9} ({:.1e} rel), raw ratio at n=30 {raw:.4}",
        rel
    ))
}

fn routing_soundness() -> Outcome {
    let mut lines = Vec::new();
    for n in 2..=7usize {
        let qft = build_qft(n, false).unwrap();
        let reference = circuit_unitary(&qft).unwrap();
        let routed = route_lnn(&qft, RoutingStrategy::default());
        let reduced = cancel_swaps(&routed);
        for (label, r) in [("routed", &routed), ("reduced", &reduced)] {
            check(all_adjacent(&r.circuit), || {
                format!("n={n} {label} has a distant gate")
            })?;
            let m =
                equal_up_to_global_phase(&circuit_unitary(&r.circuit).unwrap(), &reference, 1e-10)
                    .unwrap();
            check(m.equal, || {
                format!("n={n} {label} residual {:.3e}", m.residual)
            })?;
        }
        check(reduced.swap_count <= routed.swap_count, || {
            format!("n={n} reduction added swaps")
        })?;
        let report = SwapReport::for_circuit(&qft, RoutingStrategy::default(), true);
        check(
            report.quoted_naive == ((n - 1) * n * (2 * n - 1) / 6) as u128
                && report.quoted_reduced == ((n - 1) * (n - 2)) as u128,
            || format!("n={n} quoted formulas missing from report"),
        )?;
        lines.push(format!(
            "n={n} {}/{} (quoted {}/{})",
            report.measured,
            report.reduced_measured.unwrap(),
            report.quoted_naive,
            report.quoted_reduced
        ));
    }
    Ok(format!("routed/reduced swaps: {}", lines.join(", ")))
}

fn resolution_boundary() -> Outcome {
    for t_res in [1e-6, 1e-3, 0.3, 7.0] {
        let model = HardwareModel {
            t_res,
            ..duration_model(UnitPolicy::TauZero)
        };
        for k in 0..=80u32 {
            let tau0 = t_res * 2f64.powi(k as i32);
            let nb = max_feasible_qubits(&model, tau0).unwrap();
            check(nb == k as u64 + 1, || {
                format!("t_R={t_res} k={k}: n_b={nb}")
            })?;
        }
    }
    Ok("k=0..80 at four resolutions".into())
}

fn intensity_estimate() -> Outcome {
    let req = intensity_requirement(100, 1e-3).unwrap();
    check(req.ratio == num_bigint::BigUint::from(1u8) << 99u32, || {
        "ratio is not 2^99".into()
    })?;
    let factor = req.b_max_tesla / 1e27;
    check((0.1..=10.0).contains(&factor), || {
        format!("B_max {:.3e} T", req.b_max_tesla)
    })?;
    Ok(format!("ratio 2^99, B_max {:.4e} T", req.b_max_tesla))
}

fn approximate_qft() -> Outcome {
    for n in 1..=10 {
        check(
            build_aqft(n, n, true).unwrap() == build_qft(n, true).unwrap(),
            || format!("n={n} AQFT(n) differs"),
        )?;
    }
    let mut worst_gap = 0.0f64;
    for n in 2..=8 {
        let dft = dft_matrix(n).unwrap();
        let exact = fidelity(
            &circuit_unitary(&build_qft(n, true).unwrap()).unwrap(),
            &dft,
        )
        .unwrap();
        let full = fidelity(
            &circuit_unitary(&build_aqft(n, n, true).unwrap()).unwrap(),
            &dft,
        )
        .unwrap();
        let crude = fidelity(
            &circuit_unitary(&build_aqft(n, 1, true).unwrap()).unwrap(),
            &dft,
        )
        .unwrap();
        check(full >= exact - 1e-10, || {
            format!("n={n} m=n fidelity {full}")
        })?;
        check(crude < exact, || {
            format!("n={n} m=1 fidelity {crude} not below {exact}")
        })?;
        worst_gap = worst_gap.max(exact - crude);
    }
    for policy in [UnitPolicy::TauZero, UnitPolicy::TauNMinusOne] {
        let model = duration_model(policy);
        for n in 2..=10 {
            let costs: Vec<Dyadic> = (1..=n)
                .rev()
                .map(|m| {
                    circuit_cost(&build_aqft(n, m, false).unwrap(), &model)
                        .unwrap()
                        .total_relative
                })
                .collect();
            check(costs.windows(2).all(|w| w[1] <= w[0]), || {
                format!("n={n} {policy}: cost rises as m falls")
            })?;
        }
    }
    Ok(format!("fidelity drop at m=1 up to {worst_gap:.3}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("QFT equals DFT up to phase", qft_correctness),
        ("Xor from exchange interaction", xor_from_exchange),
        ("controlled phase from Xor, exact", cphase_from_xor),
        ("cost with tau_0 unit", linear_unit_cost),
        ("cost with tau_(n-1) unit", exponential_unit_cost),
        ("n 2^n scaling coefficient", scaling_shape),
        ("LNN routing soundness", routing_soundness),
        ("time-resolution register bound", resolution_boundary),
        ("intensity-control field estimate", intensity_estimate),
        ("approximate QFT", approximate_qft),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {why}", i + 1);
            }
        }
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
