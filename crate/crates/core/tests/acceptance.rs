//! Acceptance suite. Each criterion prints one PASS/FAIL line; the test fails
//! if any criterion fails.
//!
//! Run with `cargo test -p holeburn --test acceptance -- --nocapture`.

use holeburn::moments::{mean_photon_number, moment, moment_closed_form_vfb};
use holeburn::states::{binomial_state, hole_burn, vacuum_filtered_binomial};
use holeburn::sweep::{
    run_sweep_with_threads, write_csv, BasisChoice, Family, OutputFormat, PGrid, SweepConfig,
    WitnessSpec,
};
use holeburn::witnesses::{antibunching, hosps, vogel_det};
use holeburn::{BinomialParams, FockSuperposition, MomentOrder, MonomialBasis};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn params(p: f64, m: usize) -> BinomialParams {
    BinomialParams::new(p, m).unwrap()
}

fn grid(start: usize, stop: usize, denom: f64) -> Vec<f64> {
    (start..=stop).map(|i| i as f64 / denom).collect()
}

fn order(t: usize, r: usize) -> MomentOrder {
    MomentOrder::new(t, r).unwrap()
}

/// Binomial, vacuum-filtered and mid-hole states over a modest grid.
fn state_grid() -> Vec<(String, FockSuperposition)> {
    let mut out = Vec::new();
    for m in 1..=10 {
        for p in grid(1, 9, 10.0) {
            let b = binomial_state(params(p, m));
            out.push((format!("binomial p={p} M={m}"), b.clone()));
            out.push((
                format!("vacuum_filtered p={p} M={m}"),
                vacuum_filtered_binomial(params(p, m)).unwrap(),
            ));
            out.push((
                format!("hole_burned k={} p={p} M={m}", m / 2),
                hole_burn(&b, m / 2).unwrap(),
            ));
        }
    }
    out
}

fn normalization() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 1..=100 {
        for p in grid(1, 99, 100.0) {
            let b = binomial_state(params(p, m));
            let states = [
                vacuum_filtered_binomial(params(p, m)).unwrap(),
                hole_burn(&b, m / 2).unwrap(),
                b,
            ];
            for s in &states {
                let err = (s.norm_squared() - 1.0).abs();
                worst = worst.max(err);
                if err > 1e-12 {
                    return Err(format!("p={p} M={m}: |norm - 1| = {err:e}"));
                }
            }
        }
    }
    Ok(format!("worst |norm - 1| = {worst:.2e}"))
}

fn closed_form_reconciliation() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 1..=10 {
        for p in grid(1, 19, 20.0) {
            let state = vacuum_filtered_binomial(params(p, m)).unwrap();
            for t in 0..=4 {
                for r in 0..=4 {
                    let direct = moment(&state, order(t, r)).re;
                    let closed = moment_closed_form_vfb(params(p, m), order(t, r)).unwrap();
                    let err = (closed - direct).abs() / (1.0 + direct.abs());
                    worst = worst.max(err);
                    if err > 1e-10 {
                        return Err(format!(
                            "p={p} M={m} (t,r)=({t},{r}): closed {closed} vs direct {direct}"
                        ));
                    }
                }
            }
        }
    }
    Ok(format!("worst scaled deviation = {worst:.2e}"))
}

fn binomial_moment_identities() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 1..=10usize {
        for p in grid(1, 9, 10.0) {
            let s = binomial_state(params(p, m));
            let mean = mean_photon_number(&s);
            let err = (mean - m as f64 * p).abs() / (m as f64 * p);
            worst = worst.max(err);
            if err > 1e-10 {
                return Err(format!("<N> at p={p} M={m}: {mean}"));
            }
            for l in 1..=m.min(4) {
                let expected = (0..l).map(|k| (m - k) as f64).product::<f64>() * p.powi(l as i32);
                let got = moment(&s, order(l, l)).re;
                let err = (got - expected).abs() / expected;
                worst = worst.max(err);
                if err > 1e-10 {
                    return Err(format!("l={l} p={p} M={m}: {got} vs {expected}"));
                }
            }
        }
    }
    Ok(format!("worst relative deviation = {worst:.2e}"))
}

fn antibunching_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    for m in 1..=10 {
        for p in grid(1, 9, 10.0) {
            let d = antibunching(&binomial_state(params(p, m)), 2)
                .unwrap()
                .value;
            let expected = -(m as f64) * p * p;
            let err = (d - expected).abs() / expected.abs();
            worst = worst.max(err);
            if err > 1e-11 {
                return Err(format!("binomial p={p} M={m}: {d} vs {expected}"));
            }
        }
    }
    for p in grid(1, 100, 100.0) {
        let d = antibunching(&vacuum_filtered_binomial(params(p, 1)).unwrap(), 2)
            .unwrap()
            .value;
        if (d + 1.0).abs() > 1e-12 {
            return Err(format!("vacuum_filtered M=1 p={p}: d = {d}"));
        }
    }
    Ok(format!(
        "binomial worst relative deviation = {worst:.2e}; M=1 filtered state gives -1"
    ))
}

fn hosps_reduction() -> Outcome {
    let states = state_grid();
    for (label, s) in &states {
        let h = hosps(s, 2).unwrap().value;
        let d = antibunching(s, 2).unwrap().value;
        if (h - d).abs() > 1e-12 {
            return Err(format!("{label}: D_h(1) = {h}, d_f(1) = {d}"));
        }
    }
    Ok(format!("{} states", states.len()))
}

fn vogel_factorization() -> Outcome {
    let basis = MonomialBasis::standard();
    let states = state_grid();
    for (label, s) in &states {
        let n = mean_photon_number(s);
        let m = moment(s, order(0, 2)).re;
        let a = moment(s, order(0, 1)).re;
        let expected = (n - m) * (n + m - 2.0 * a * a);
        let det = vogel_det(s, &basis).unwrap().value;
        if (det - expected).abs() > 1e-11 {
            return Err(format!("{label}: det {det} vs factorized {expected}"));
        }
    }
    let worked = vogel_det(&vacuum_filtered_binomial(params(0.5, 2)).unwrap(), &basis)
        .unwrap()
        .value;
    if (worked - 16.0 / 27.0).abs() > 1e-12 {
        return Err(format!("vacuum_filtered(0.5, 2): {worked} vs 16/27"));
    }
    Ok(format!(
        "{} states; worked value {worked:.12}",
        states.len()
    ))
}

fn min_antibunching(m: usize, l: usize) -> f64 {
    grid(1, 99, 100.0)
        .into_iter()
        .map(|p| {
            antibunching(&vacuum_filtered_binomial(params(p, m)).unwrap(), l)
                .unwrap()
                .value
        })
        .fold(f64::INFINITY, f64::min)
}

fn monotonicity() -> Outcome {
    let by_order: Vec<f64> = (2..=4).map(|l| min_antibunching(10, l)).collect();
    if !by_order.windows(2).all(|w| w[1] < w[0]) {
        return Err(format!("min_p d_f(l-1) at M=10 for l=2,3,4: {by_order:?}"));
    }
    let by_m: Vec<f64> = [5, 10, 15]
        .iter()
        .map(|&m| min_antibunching(m, 2))
        .collect();
    if !by_m.windows(2).all(|w| w[1] < w[0]) {
        return Err(format!("min_p d_f(1) at l=2 for M=5,10,15: {by_m:?}"));
    }
    for m in [5, 10, 15] {
        for l in 2..=4 {
            for p in grid(1, 99, 100.0) {
                let d = antibunching(&vacuum_filtered_binomial(params(p, m)).unwrap(), l)
                    .unwrap()
                    .value;
                if d >= 0.0 {
                    return Err(format!("d_f({}) = {d} at p={p} M={m}", l - 1));
                }
            }
        }
    }
    Ok(format!(
        "by l (M=10): {:.4} > {:.4} > {:.4}; by M (l=2): {:.4} > {:.4} > {:.4}; d_f < 0 on all interior p",
        by_order[0], by_order[1], by_order[2], by_m[0], by_m[1], by_m[2]
    ))
}

fn hole_burning_enhancement() -> Outcome {
    let mut total = 0;
    let mut violations = Vec::new();
    for m in 2..=10 {
        for p in grid(1, 9, 10.0) {
            total += 1;
            let filtered = antibunching(&vacuum_filtered_binomial(params(p, m)).unwrap(), 2)
                .unwrap()
                .value;
            let plain = antibunching(&binomial_state(params(p, m)), 2)
                .unwrap()
                .value;
            if filtered > plain {
                violations.push(format!("p={p} M={m}: {filtered} > {plain}"));
            }
        }
    }
    for v in &violations {
        println!("    enhancement violated at {v}");
    }
    let fraction = 1.0 - violations.len() as f64 / total as f64;
    if fraction < 0.95 {
        return Err(format!(
            "enhancement holds on {:.1}% of {total} points",
            100.0 * fraction
        ));
    }
    Ok(format!(
        "enhancement holds on {:.1}% of {total} points ({} violations)",
        100.0 * fraction,
        violations.len()
    ))
}

fn vogel_negativity() -> Outcome {
    let config = SweepConfig {
        family: Family::Binomial,
        hole_index: None,
        m_values: (1..=10).collect(),
        p_grid: PGrid::new(0.01, 0.99, 0.01),
        witnesses: vec![WitnessSpec::vogel(BasisChoice::Default)],
        output_path: None,
        format: OutputFormat::Csv,
    };
    let mut negative = Vec::new();
    for family in [Family::Binomial, Family::VacuumFiltered] {
        let result = run_sweep_with_threads(
            &SweepConfig {
                family,
                ..config.clone()
            },
            4,
        )
        .unwrap();
        negative.extend(
            result
                .rows
                .iter()
                .filter(|r| r.nonclassical == Some(true))
                .map(|r| (family, r.m, r.p, r.value.unwrap())),
        );
    }
    match negative
        .iter()
        .min_by(|a, b| a.3.total_cmp(&b.3))
    {
        Some(&(family, m, p, v)) => {
            let count = |f: Family| negative.iter().filter(|n| n.0 == f).count();
            Ok(format!(
                "{} binomial and {} vacuum_filtered points with dv < 0; most negative {v:.6} ({family}, M={m}, p={p})",
                count(Family::Binomial),
                count(Family::VacuumFiltered)
            ))
        }
        None => Err(
            "no negative default-basis determinant: printed Vogel matrix is truncated, minor used for the figure is unknown"
                .into(),
        ),
    }
}

fn determinism() -> Outcome {
    let config = SweepConfig {
        family: Family::VacuumFiltered,
        hole_index: None,
        m_values: vec![5, 10, 15],
        p_grid: PGrid::new(0.0, 1.0, 0.01),
        witnesses: vec![
            WitnessSpec::antibunching(2),
            WitnessSpec::antibunching(3),
            WitnessSpec::hosps(2),
            WitnessSpec::hosps(4),
            WitnessSpec::vogel(BasisChoice::Default),
            WitnessSpec::vogel(BasisChoice::Number),
        ],
        output_path: None,
        format: OutputFormat::Csv,
    };
    let dir = std::path::Path::new(env!("CARGO_TARGET_TMPDIR"));
    let threads = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(4)
        .max(4);
    let mut files = Vec::new();
    for (i, workers) in [1, threads, 1, threads].into_iter().enumerate() {
        let path = dir.join(format!("determinism_{i}_{workers}.csv"));
        let result = run_sweep_with_threads(&config, workers).unwrap();
        write_csv(&result, std::fs::File::create(&path).unwrap()).unwrap();
        files.push(std::fs::read(&path).unwrap());
    }
    if files.windows(2).any(|w| w[0] != w[1]) {
        return Err("sweep outputs differ between runs".into());
    }
    Ok(format!(
        "4 runs (1 and {threads} threads) byte-identical, {} bytes each",
        files[0].len()
    ))
}

/// Which HOSPS orders show negativity; recorded, not asserted.
fn hosps_parity_pattern() -> String {
    let counts: Vec<String> = (2..=7)
        .map(|l| {
            let negative = grid(1, 99, 100.0)
                .into_iter()
                .filter(|&p| {
                    hosps(&vacuum_filtered_binomial(params(p, 10)).unwrap(), l)
                        .unwrap()
                        .nonclassical
                })
                .count();
            format!("l={l}: {negative}/99")
        })
        .collect();
    format!(
        "HOSPS negative points, vacuum_filtered M=10: {}",
        counts.join(", ")
    )
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 10] = [
        ("1 normalization", normalization),
        (
            "2 closed-form moment reconciliation",
            closed_form_reconciliation,
        ),
        ("3 binomial moment identities", binomial_moment_identities),
        ("4 antibunching closed form", antibunching_closed_form),
        ("5 HOSPS reduction at l=2", hosps_reduction),
        ("6 Vogel factorization", vogel_factorization),
        ("7 monotonicity in order and M", monotonicity),
        ("8 hole-burning enhancement", hole_burning_enhancement),
        ("9 Vogel negativity", vogel_negativity),
        ("10 sweep determinism", determinism),
    ];
    let mut failed = Vec::new();
    for (name, check) in criteria {
        match check() {
            Ok(detail) => println!("PASS  {name}: {detail}"),
            Err(detail) => {
                println!("FAIL  {name}: {detail}");
                failed.push(name);
            }
        }
    }
    println!("NOTE  {}", hosps_parity_pattern());
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
