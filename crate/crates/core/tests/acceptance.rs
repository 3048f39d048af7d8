//! Acceptance suite. Reference tables are frozen here rather than shared with
//! the library, and the integral checks use their own Gauss-Legendre rule.
//! Prints one PASS/FAIL line per criterion; exits nonzero on any failure.

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pamber::analytic_ber::{
    labeling_ber, labeling_coefficients, pattern_coefficients, pber_general, pber_interval_form,
    DemodKind,
};
use pamber::constellation::{all_patterns, make_pam, named_labeling, BitPattern, LabelingName};
use pamber::demod::{abd_decide, maxlog_llr, sd_decide, ChannelParams};
use pamber::labeling_space::{
    count_distinct_ber_labelings, distinct_alpha1_count, sample_labelings,
};
use pamber::montecarlo::{simulate, Demodulator, SimConfig, SimTarget};
use pamber::pattern_classes::{enumerate_classes, Symmetry};
use pamber::thresholds::{bd_thresholds, midpoint_thresholds};

type Check = Result<String, String>;
type Criterion = (&'static str, fn() -> Check, Option<Duration>);

// representative, members, a
const TABLE1_M4: &[(u64, &[u64], &[i64])] = &[
    (3, &[3, 12], &[2, 2, 0]),
    (6, &[6, 9], &[4, 2, -2]),
    (5, &[5, 10], &[6, -4, 2]),
];

const TABLE1_M8: &[(u64, &[u64], &[i64])] = &[
    (15, &[15, 240], &[2, 2, 2, 2, 0, 0, 0]),
    (30, &[30, 120, 135, 225], &[4, 3, 3, 2, -2, -1, -1]),
    (60, &[60, 195], &[4, 4, 2, 2, -2, -2, 0]),
    (23, &[23, 232], &[6, -2, 2, 0, 2, 0, 0]),
    (29, &[29, 71, 184, 226], &[6, 1, 2, -3, 1, 0, 1]),
    (27, &[27, 39, 216, 228], &[6, 2, -3, 1, 1, 1, 0]),
    (113, &[113, 142], &[6, 4, 4, -4, -2, -2, 2]),
    (57, &[57, 99, 156, 198], &[6, 5, 0, -3, -3, 2, 1]),
    (51, &[51, 204], &[6, 6, -4, -4, 2, 2, 0]),
    (46, &[46, 116, 139, 209], &[8, -1, 2, -1, 3, -2, -1]),
    (58, &[58, 92, 163, 197], &[8, -1, 3, -2, 2, -1, -1]),
    (78, &[78, 114, 141, 177], &[8, 2, -1, -1, -1, 3, -2]),
    (54, &[54, 108, 147, 201], &[8, 3, -6, 3, 3, -2, -1]),
    (102, &[102, 153], &[8, 6, -6, -4, 4, 2, -2]),
    (43, &[43, 212], &[10, -6, 4, -2, 0, 2, 0]),
    (45, &[45, 75, 180, 210], &[10, -3, -3, 6, -4, 1, 1]),
    (53, &[53, 83, 172, 202], &[10, -3, 1, 0, -2, 1, 1]),
    (77, &[77, 178], &[10, 0, -6, 2, 4, -4, 2]),
    (105, &[105, 150], &[10, 0, -4, 6, -4, -2, 2]),
    (89, &[89, 101, 154, 166], &[10, 0, -3, 1, 1, -3, 2]),
    (90, &[90, 165], &[12, -6, 0, 6, -6, 4, -2]),
    (86, &[86, 106, 149, 169], &[12, -6, 3, -1, -1, 3, -2]),
    (85, &[85, 170], &[14, -12, 10, -8, 6, -4, 2]),
];

const TABLE2: &[(usize, &str, &[u64], &[i64])] = &[
    (4, "brgc", &[3, 6], &[6, 4, -2]),
    (4, "nbc", &[3, 5], &[8, -2, 2]),
    (4, "ag", &[5, 6], &[10, -2, 0]),
    (8, "brgc", &[15, 60, 102], &[14, 12, -2, 0, 2, 0, -2]),
    (8, "fbc", &[15, 60, 90], &[18, 0, 4, 10, -8, 2, -2]),
    (8, "nbc", &[15, 51, 85], &[22, -4, 8, -10, 8, -2, 2]),
    (8, "bsgc", &[105, 60, 102], &[22, 10, -8, 4, -2, -2, 0]),
    (8, "ag", &[90, 105, 85], &[36, -18, 6, 4, -4, -2, 2]),
];

fn reflect_index(w: u64, size: usize) -> u64 {
    (0..size).fold(0, |acc, i| acc | (((w >> i) & 1) << (size - 1 - i)))
}

/// Symmetry type read off the member list alone.
fn expected_symmetry(rep: u64, members: &[u64], size: usize) -> Symmetry {
    if members.len() == 4 {
        Symmetry::Asy
    } else if reflect_index(rep, size) == rep {
        Symmetry::Re
    } else {
        Symmetry::Are
    }
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

fn pattern(size: usize, w: u64) -> BitPattern {
    BitPattern::from_index(size, w).unwrap()
}

fn criterion_1() -> Check {
    for (size, table) in [(4, TABLE1_M4), (8, TABLE1_M8)] {
        let classes = enumerate_classes(size).map_err(|e| e.to_string())?;
        ensure(classes.len() == table.len(), || {
            format!("M={size}: {} classes", classes.len())
        })?;
        for (got, &(rep, members, a)) in classes.iter().zip(table) {
            ensure(got.representative.index() == rep, || {
                format!(
                    "M={size}: representative {} where {rep} expected",
                    got.representative.index()
                )
            })?;
            ensure(got.members == members, || {
                format!("M={size} rep {rep}: members {:?}", got.members)
            })?;
            ensure(
                got.symmetry == expected_symmetry(rep, members, size),
                || format!("M={size} rep {rep}: symmetry {}", got.symmetry),
            )?;
            ensure(got.coefficients.entries == a, || {
                format!("M={size} rep {rep}: a = {:?}", got.coefficients.entries)
            })?;
        }
    }
    Ok("3 + 23 classes exact".into())
}

fn criterion_2() -> Check {
    let mut found = Vec::new();
    for size in [4u128, 8, 16] {
        let n = enumerate_classes(size as usize)
            .map_err(|e| e.to_string())?
            .len() as u128;
        let q =
            (binomial(size, size / 2) + binomial(size / 2, size / 4) + (1u128 << (size / 2))) / 4;
        ensure(n == q, || {
            format!("M={size}: enumerated {n}, closed form {q}")
        })?;
        found.push(n);
    }
    ensure(found == [3, 23, 3299], || format!("{found:?}"))?;
    Ok(format!("Q = {found:?}"))
}

fn criterion_3() -> Check {
    for &(size, name, w, alpha) in TABLE2 {
        let l = named_labeling(name.parse::<LabelingName>().unwrap(), size)
            .map_err(|e| e.to_string())?;
        ensure(
            l.pattern_set() == w.iter().copied().collect::<BTreeSet<_>>(),
            || format!("{name} M={size}: W = {:?}", l.pattern_set()),
        )?;
        ensure(labeling_coefficients(&l).entries == alpha, || {
            format!("{name} M={size}: alpha")
        })?;
        let mut sum = vec![0i64; size - 1];
        for &i in w {
            let row = TABLE1_M4
                .iter()
                .chain(TABLE1_M8)
                .find(|(_, members, a)| a.len() == size - 1 && members.contains(&i));
            let a: Vec<i64> = match row {
                Some((_, _, a)) => a.to_vec(),
                None => return Err(format!("pattern {i} not in the class table")),
            };
            sum.iter_mut().zip(&a).for_each(|(s, x)| *s += x);
        }
        ensure(sum == alpha, || {
            format!("{name} M={size}: sum of a = {sum:?}")
        })?;
    }
    Ok(format!("{} labelings exact", TABLE2.len()))
}

fn criterion_4() -> Check {
    let (n4, _) = count_distinct_ber_labelings(4).map_err(|e| e.to_string())?;
    let (n8, classes) = count_distinct_ber_labelings(8).map_err(|e| e.to_string())?;
    let a1 = distinct_alpha1_count(&classes);
    ensure(n4 == 3 && n8 == 460 && a1 == 12, || {
        format!("M=4 {n4}, M=8 {n8}, alpha_1 {a1}")
    })?;
    Ok(format!("M=4: {n4}, M=8: {n8}, distinct alpha_1: {a1}"))
}

fn criterion_5() -> Check {
    let samples = 1_000_000;
    let mut rng = ChaCha8Rng::seed_from_u64(20240905);
    let mut skipped = 0;
    for size in [4, 8] {
        let c = make_pam(size).unwrap();
        let pool = sample_labelings(size, 1000, 7).map_err(|e| e.to_string())?;
        for _ in 0..samples {
            let l = &pool[rng.random_range(0..pool.len())];
            let params = ChannelParams::from_db(rng.random_range(-20.0..40.0)).unwrap();
            // observations spread past the outer points as well
            let y = rng.random_range(-2.5..2.5);
            let mut d: Vec<f64> = c.points().iter().map(|s| (y - s) * (y - s)).collect();
            d.sort_by(f64::total_cmp);
            if d[0] == d[1] {
                skipped += 1;
                continue;
            }
            let sd = sd_decide(y, l, &c);
            let abd = abd_decide(&maxlog_llr(y, l, &c, params));
            ensure(sd == abd, || {
                format!("M={size} y={y}: SD {sd:?}, ABD {abd:?}")
            })?;
        }
    }
    Ok(format!(
        "2 x {samples} samples, 0 discrepancies ({skipped} exact midpoints skipped)"
    ))
}

/// 20-point Gauss-Legendre nodes and weights on [-1, 1], by Newton iteration.
fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    (1..=n)
        .map(|i| {
            let mut x = (std::f64::consts::PI * (i as f64 - 0.25) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for k in 2..=n {
                    let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            (x, 2.0 / ((1.0 - x * x) * dp * dp))
        })
        .collect()
}

/// Gaussian mass of (lo, hi], composite Gauss-Legendre on panels of 0.1 sigma.
fn gaussian_mass(rule: &[(f64, f64)], mean: f64, sd: f64, lo: f64, hi: f64) -> f64 {
    let lo = lo.max(mean - 40.0 * sd);
    let hi = hi.min(mean + 40.0 * sd);
    if lo >= hi {
        return 0.0;
    }
    let panels = ((hi - lo) / (0.1 * sd)).ceil() as usize;
    let h = (hi - lo) / panels as f64;
    let norm = 1.0 / (sd * (2.0 * std::f64::consts::PI).sqrt());
    let mut total = 0.0;
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        for &(x, w) in rule {
            let y = mid + 0.5 * h * x;
            let z = (y - mean) / sd;
            total += 0.5 * h * w * norm * (-0.5 * z * z).exp();
        }
    }
    total
}

fn criterion_6() -> Check {
    let c8 = make_pam(8).unwrap();
    let mid = midpoint_thresholds(&c8);
    let mut worst = 0f64;
    for p in all_patterns(8).unwrap() {
        for g in [0.1, 1.0, 10.0] {
            let params = ChannelParams::new(g).unwrap();
            let a = pber_general(&p, &c8, &mid, params).map_err(|e| e.to_string())?;
            let b = pber_interval_form(&p, &c8, &mid, params).map_err(|e| e.to_string())?;
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("dual-form gap {worst:e}"))?;

    let rule = gauss_legendre(20);
    let mut worst_q = 0f64;
    for (size, w, g) in [
        (4, 3, 1.0),
        (4, 5, 0.3),
        (8, 15, 10.0),
        (8, 102, 2.0),
        (8, 85, 50.0),
    ] {
        let c = make_pam(size).unwrap();
        let p = pattern(size, w);
        let params = ChannelParams::new(g).unwrap();
        let t = midpoint_thresholds(&c);
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend(&t.betas);
        edges.push(f64::INFINITY);
        let sd = params.noise_std();
        let mut total = 0.0;
        for (i, &s) in c.points().iter().enumerate() {
            for k in 0..size {
                if p.bit(k) != p.bit(i) {
                    total += gaussian_mass(&rule, s, sd, edges[k], edges[k + 1]);
                }
            }
        }
        let quad = total / size as f64;
        let closed = pber_general(&p, &c, &t, params).map_err(|e| e.to_string())?;
        worst_q = worst_q.max((quad - closed).abs());
    }
    ensure(worst_q <= 1e-9, || format!("quadrature gap {worst_q:e}"))?;
    Ok(format!(
        "dual-form gap {worst:.1e}, quadrature gap {worst_q:.1e}"
    ))
}

fn criterion_7() -> Check {
    let mut counts = Vec::new();
    for size in [4, 8, 16] {
        let mut a1 = BTreeSet::new();
        for p in all_patterns(size).unwrap() {
            let flips = (0..size - 1).filter(|&k| p.bit(k) != p.bit(k + 1)).count() as i64;
            let a = pattern_coefficients(&p).entries[0];
            ensure(a == 2 * flips, || {
                format!("{p}: a_1 = {a}, flips = {flips}")
            })?;
            a1.insert(a);
        }
        counts.push(a1.len());
    }
    ensure(counts == [3, 7, 15], || format!("{counts:?}"))?;
    Ok(format!("distinct a_1 = {counts:?}"))
}

fn criterion_8() -> Check {
    let c = make_pam(8).unwrap();
    let brgc = named_labeling(LabelingName::Brgc, 8).unwrap();
    let mut worst = (0f64, String::new());
    for step in 0..=40 {
        let db = 0.5 * step as f64;
        let params = ChannelParams::from_db(db).unwrap();
        for w in [15, 60, 102] {
            let p = pattern(8, w);
            let bd_t =
                bd_thresholds(&p, &c, params).map_err(|e| format!("p{w} at {db} dB: {e}"))?;
            let bd = pber_general(&p, &c, &bd_t, params).unwrap();
            let abd = pber_general(&p, &c, &midpoint_thresholds(&c), params).unwrap();
            let r = (bd - abd).abs() / abd;
            if r > worst.0 {
                worst = (r, format!("p{w} at {db} dB"));
            }
        }
        let bd =
            labeling_ber(&brgc, &c, params, DemodKind::BdNumeric).map_err(|e| e.to_string())?;
        let abd = labeling_ber(&brgc, &c, params, DemodKind::AbdMidpoints).unwrap();
        let r = (bd - abd).abs() / abd;
        if r > worst.0 {
            worst = (r, format!("BRGC at {db} dB"));
        }
    }
    ensure(worst.0 <= 0.02, || {
        format!("relative gap {:.4} ({})", worst.0, worst.1)
    })?;

    let mid = midpoint_thresholds(&c);
    let params = ChannelParams::new(1e4).unwrap();
    let mut offset = 0f64;
    for w in [15, 60, 102] {
        let p = pattern(8, w);
        let t = bd_thresholds(&p, &c, params).map_err(|e| e.to_string())?;
        for k in (0..7).filter(|&k| p.bit(k) != p.bit(k + 1)) {
            offset = offset.max((t.betas[k] - mid.betas[k]).abs());
        }
    }
    ensure(offset <= 1e-4, || {
        format!("threshold offset {offset:e} at snr 1e4")
    })?;
    Ok(format!(
        "max relative gap {:.4} ({}), offset at snr 1e4 {offset:.1e}",
        worst.0, worst.1
    ))
}

fn criterion_9() -> Check {
    let grid = [0.0, 5.0, 10.0];
    let mut worst = 0f64;
    for size in [4, 8] {
        let c = make_pam(size).unwrap();
        let l = named_labeling(LabelingName::Brgc, size).unwrap();
        let config = SimConfig {
            trials: 1_000_000,
            seed: 99,
            snr_db_grid: grid.to_vec(),
            demodulator: Demodulator::Abd,
        };
        let est =
            simulate(&SimTarget::Labeling(l.clone()), &c, &config).map_err(|e| e.to_string())?;
        for (e, &db) in est.iter().zip(&grid) {
            let params = ChannelParams::from_db(db).unwrap();
            let want = labeling_ber(&l, &c, params, DemodKind::AbdMidpoints).unwrap();
            let z = (e.point.value - want).abs() / e.stderr;
            worst = worst.max(z);
            ensure(z <= 3.0, || format!("M={size} {db} dB: {z:.2} sigma"))?;
        }
    }
    // Q(sqrt(2)), the BPSK error probability at 0 dB
    let bpsk = 0.07864960352514251;
    let c2 = make_pam(2).unwrap();
    let config = SimConfig {
        trials: 1_000_000,
        seed: 99,
        snr_db_grid: vec![0.0],
        demodulator: Demodulator::Abd,
    };
    let est =
        simulate(&SimTarget::Pattern(pattern(2, 1)), &c2, &config).map_err(|e| e.to_string())?;
    let z = (est[0].point.value - bpsk).abs() / est[0].stderr;
    ensure(z <= 3.0, || format!("BPSK: {z:.2} sigma"))?;
    Ok(format!("worst {:.2} sigma", worst.max(z)))
}

fn criterion_10() -> Check {
    let (n, classes) = count_distinct_ber_labelings(8).map_err(|e| e.to_string())?;
    // high-order terms vanish below double precision at high SNR, so
    // curves are told apart on a low-SNR grid
    let grid: Vec<ChannelParams> = (-20..=0)
        .step_by(5)
        .map(|db| ChannelParams::from_db(db as f64).unwrap())
        .collect();
    let curves: BTreeSet<Vec<u64>> = classes
        .iter()
        .map(|c| grid.iter().map(|&p| c.alpha.ber(p).to_bits()).collect())
        .collect();
    ensure(n == 460 && curves.len() == 460, || {
        format!("{n} classes, {} distinct curves", curves.len())
    })?;
    let min_a1 = classes.iter().map(|c| c.alpha.entries[0]).min().unwrap();
    let at_min: Vec<_> = classes
        .iter()
        .filter(|c| c.alpha.entries[0] == min_a1)
        .collect();
    let brgc = labeling_coefficients(&named_labeling(LabelingName::Brgc, 8).unwrap());
    // several Gray-type classes reach alpha_1 = 14; BRGC leads them on alpha_2
    ensure(
        min_a1 == 14 && at_min[0].alpha == brgc && classes[0].alpha == brgc,
        || {
            format!(
                "min alpha_1 {min_a1}, leading class {:?}",
                at_min[0].alpha.entries
            )
        },
    )?;
    Ok(format!(
        "460 curves, min alpha_1 = 14 over {} classes, BRGC first",
        at_min.len()
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        (
            "1 Table 1 classes",
            criterion_1,
            Some(Duration::from_secs(1)),
        ),
        ("2 class counts", criterion_2, Some(Duration::from_secs(30))),
        ("3 Table 2 labelings", criterion_3, None),
        (
            "4 labeling census",
            criterion_4,
            Some(Duration::from_secs(60)),
        ),
        ("5 SD/ABD equivalence", criterion_5, None),
        ("6 dual form and quadrature", criterion_6, None),
        ("7 a_1 grouping", criterion_7, None),
        ("8 BD vs ABD", criterion_8, None),
        ("9 Monte-Carlo", criterion_9, Some(Duration::from_secs(120))),
        ("10 8-PAM curve population", criterion_10, None),
    ];
    let mut failed = 0;
    for (name, f, limit) in criteria {
        let start = Instant::now();
        let outcome = f();
        let elapsed = start.elapsed();
        let outcome = match (outcome, limit) {
            (Ok(_), Some(l)) if elapsed > l => Err(format!("took {elapsed:.2?}, limit {l:?}")),
            (o, _) => o,
        };
        match outcome {
            Ok(detail) => println!("PASS {name}: {detail} [{elapsed:.2?}]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{elapsed:.2?}]");
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        println!("{failed} criteria failed");
        ExitCode::FAILURE
    }
}
