//! Self-checks behind the `verify` subcommand: table reproduction, class
//! and labeling counts, demodulator equivalence, and cross-checks of the
//! analytic BER against quadrature and simulation.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::analytic_ber::{
    labeling_ber, labeling_coefficients, pattern_coefficients, pber_general, pber_interval_form,
    pber_pam, qfunc, DemodKind,
};
use crate::constellation::{all_patterns, make_pam, named_labeling, BitPattern, LabelingName};
use crate::demod::{abd_decide, maxlog_llr, sd_decide, ChannelParams};
use crate::error::Result;
use crate::labeling_space::{
    count_distinct_ber_labelings, distinct_alpha1_count, sample_labelings,
};
use crate::montecarlo::{simulate, Demodulator, SimConfig, SimTarget};
use crate::pattern_classes::{class_count_formula, distinct_a1_count, enumerate_classes, Symmetry};
use crate::quadrature::gaussian_interval;
use crate::thresholds::{bd_thresholds, midpoint_thresholds};

/// One reference row: representative, members, symmetry, coefficients.
pub type ClassRow = (u64, &'static [u64], Symmetry, &'static [i64]);

use Symmetry::{Are, Asy, Re};

pub const PATTERN_CLASSES_4: [ClassRow; 3] = [
    (3, &[3, 12], Are, &[2, 2, 0]),
    (6, &[6, 9], Re, &[4, 2, -2]),
    (5, &[5, 10], Are, &[6, -4, 2]),
];

pub const PATTERN_CLASSES_8: [ClassRow; 23] = [
    (15, &[15, 240], Are, &[2, 2, 2, 2, 0, 0, 0]),
    (30, &[30, 120, 135, 225], Asy, &[4, 3, 3, 2, -2, -1, -1]),
    (60, &[60, 195], Re, &[4, 4, 2, 2, -2, -2, 0]),
    (23, &[23, 232], Are, &[6, -2, 2, 0, 2, 0, 0]),
    (29, &[29, 71, 184, 226], Asy, &[6, 1, 2, -3, 1, 0, 1]),
    (27, &[27, 39, 216, 228], Asy, &[6, 2, -3, 1, 1, 1, 0]),
    (113, &[113, 142], Are, &[6, 4, 4, -4, -2, -2, 2]),
    (57, &[57, 99, 156, 198], Asy, &[6, 5, 0, -3, -3, 2, 1]),
    (51, &[51, 204], Are, &[6, 6, -4, -4, 2, 2, 0]),
    (46, &[46, 116, 139, 209], Asy, &[8, -1, 2, -1, 3, -2, -1]),
    (58, &[58, 92, 163, 197], Asy, &[8, -1, 3, -2, 2, -1, -1]),
    (78, &[78, 114, 141, 177], Asy, &[8, 2, -1, -1, -1, 3, -2]),
    (54, &[54, 108, 147, 201], Asy, &[8, 3, -6, 3, 3, -2, -1]),
    (102, &[102, 153], Re, &[8, 6, -6, -4, 4, 2, -2]),
    (43, &[43, 212], Are, &[10, -6, 4, -2, 0, 2, 0]),
    (45, &[45, 75, 180, 210], Asy, &[10, -3, -3, 6, -4, 1, 1]),
    (53, &[53, 83, 172, 202], Asy, &[10, -3, 1, 0, -2, 1, 1]),
    (77, &[77, 178], Are, &[10, 0, -6, 2, 4, -4, 2]),
    (105, &[105, 150], Are, &[10, 0, -4, 6, -4, -2, 2]),
    (89, &[89, 101, 154, 166], Asy, &[10, 0, -3, 1, 1, -3, 2]),
    (90, &[90, 165], Re, &[12, -6, 0, 6, -6, 4, -2]),
    (86, &[86, 106, 149, 169], Asy, &[12, -6, 3, -1, -1, 3, -2]),
    (85, &[85, 170], Are, &[14, -12, 10, -8, 6, -4, 2]),
];

/// Named labelings with their pattern sets and `alpha` vectors, best first.
pub const NAMED_LABELINGS: [(usize, LabelingName, &[u64], &[i64]); 8] = [
    (4, LabelingName::Brgc, &[3, 6], &[6, 4, -2]),
    (4, LabelingName::Nbc, &[3, 5], &[8, -2, 2]),
    (4, LabelingName::Ag, &[5, 6], &[10, -2, 0]),
    (
        8,
        LabelingName::Brgc,
        &[15, 60, 102],
        &[14, 12, -2, 0, 2, 0, -2],
    ),
    (
        8,
        LabelingName::Fbc,
        &[15, 60, 90],
        &[18, 0, 4, 10, -8, 2, -2],
    ),
    (
        8,
        LabelingName::Nbc,
        &[15, 51, 85],
        &[22, -4, 8, -10, 8, -2, 2],
    ),
    (
        8,
        LabelingName::Bsgc,
        &[105, 60, 102],
        &[22, 10, -8, 4, -2, -2, 0],
    ),
    (
        8,
        LabelingName::Ag,
        &[90, 105, 85],
        &[36, -18, 6, 4, -4, -2, 2],
    ),
];

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

type Outcome = std::result::Result<String, String>;
type NamedCheck = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn lib<T>(r: Result<T>) -> std::result::Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn check_pattern_tables() -> Outcome {
    for (size, table) in [(4, &PATTERN_CLASSES_4[..]), (8, &PATTERN_CLASSES_8[..])] {
        let classes = lib(enumerate_classes(size))?;
        ensure(classes.len() == table.len(), || {
            format!(
                "M={size}: {} classes, expected {}",
                classes.len(),
                table.len()
            )
        })?;
        for (c, &(rep, members, sym, a)) in classes.iter().zip(table) {
            ensure(
                c.representative.index() == rep
                    && c.members == members
                    && c.symmetry == sym
                    && c.coefficients.entries == a,
                || {
                    format!(
                        "M={size}: class {} does not match row for {rep}",
                        c.representative.index()
                    )
                },
            )?;
        }
    }
    Ok("3 and 23 classes match entry for entry".into())
}

fn check_class_counts() -> Outcome {
    let mut counts = Vec::new();
    for size in [4, 8, 16] {
        let n = lib(enumerate_classes(size))?.len() as u128;
        let q = lib(class_count_formula(size))?;
        ensure(n == q, || {
            format!("M={size}: enumerated {n}, closed form {q}")
        })?;
        counts.push(n);
    }
    ensure(counts == [3, 23, 3299], || format!("counts {counts:?}"))?;
    Ok(format!("Q = {counts:?}"))
}

fn check_named_labelings() -> Outcome {
    for &(size, name, w, alpha) in &NAMED_LABELINGS {
        let l = lib(named_labeling(name, size))?;
        ensure(l.pattern_set() == w.iter().copied().collect(), || {
            format!("{name} M={size}: pattern set {:?}", l.pattern_set())
        })?;
        let got = labeling_coefficients(&l).entries;
        let summed: Vec<i64> = (0..size - 1)
            .map(|n| {
                w.iter()
                    .map(|&i| {
                        pattern_coefficients(&BitPattern::from_index(size, i).unwrap()).entries[n]
                    })
                    .sum()
            })
            .collect();
        ensure(got == alpha && summed == alpha, || {
            format!("{name} M={size}: alpha {got:?}")
        })?;
    }
    Ok("8 named labelings match".into())
}

fn check_labeling_census() -> Outcome {
    let (n4, _) = lib(count_distinct_ber_labelings(4))?;
    let (n8, classes) = lib(count_distinct_ber_labelings(8))?;
    let a1 = distinct_alpha1_count(&classes);
    ensure(n4 == 3 && n8 == 460 && a1 == 12, || {
        format!("M=4: {n4}, M=8: {n8}, distinct alpha_1: {a1}")
    })?;
    let brgc = labeling_coefficients(&lib(named_labeling(LabelingName::Brgc, 8))?);
    ensure(classes[0].alpha == brgc, || {
        "best 8-PAM class is not the BRGC".into()
    })?;
    Ok(format!(
        "M=4: {n4}, M=8: {n8}, distinct alpha_1: {a1}, best class BRGC"
    ))
}

fn check_sd_abd_equivalence() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let samples = 1_000_000;
    let mut total_ties = 0;
    for size in [4, 8] {
        let c = lib(make_pam(size))?;
        let pool = lib(sample_labelings(size, 256, 11))?;
        let mut ties = 0;
        for _ in 0..samples {
            let l = &pool[rng.random_range(0..pool.len())];
            let params = lib(ChannelParams::from_db(rng.random_range(-10.0..30.0)))?;
            let i = rng.random_range(0..size);
            let noise: f64 = rng.sample(StandardNormal);
            let y = c.points()[i] + params.noise_std() * noise;
            let d: Vec<f64> = c.points().iter().map(|s| (y - s) * (y - s)).collect();
            let best = d.iter().copied().fold(f64::INFINITY, f64::min);
            if d.iter().filter(|&&x| x == best).count() > 1 {
                ties += 1;
                continue;
            }
            let sd = sd_decide(y, l, &c);
            let abd = abd_decide(&maxlog_llr(y, l, &c, params));
            ensure(sd == abd, || {
                format!("M={size}: y={y} sd={sd:?} abd={abd:?}")
            })?;
        }
        total_ties += ties;
    }
    Ok(format!(
        "2 x {samples} samples, 0 discrepancies, {total_ties} exact ties skipped"
    ))
}

fn check_dual_form_and_quadrature() -> Outcome {
    let c8 = lib(make_pam(8))?;
    let mid8 = midpoint_thresholds(&c8);
    let mut worst = 0f64;
    for p in lib(all_patterns(8))? {
        for g in [0.1, 1.0, 10.0] {
            let params = lib(ChannelParams::new(g))?;
            let a = lib(pber_general(&p, &c8, &mid8, params))?;
            let b = lib(pber_interval_form(&p, &c8, &mid8, params))?;
            worst = worst.max((a - b).abs());
        }
    }
    ensure(worst <= 1e-12, || format!("dual-form gap {worst:e}"))?;

    let mut worst_q = 0f64;
    for (size, w, g) in [
        (4, 3, 1.0),
        (4, 5, 0.5),
        (8, 15, 10.0),
        (8, 102, 3.0),
        (8, 43, 30.0),
    ] {
        let c = lib(make_pam(size))?;
        let p = lib(BitPattern::from_index(size, w))?;
        let params = lib(ChannelParams::new(g))?;
        let betas = midpoint_thresholds(&c).betas;
        let mut edges = vec![f64::NEG_INFINITY];
        edges.extend(&betas);
        edges.push(f64::INFINITY);
        let mut total = 0.0;
        for (i, &s) in c.points().iter().enumerate() {
            for k in 0..size {
                if p.bit(k) != p.bit(i) {
                    total += gaussian_interval(s, params.noise_variance(), edges[k], edges[k + 1]);
                }
            }
        }
        let quad = total / size as f64;
        let closed = lib(pber_general(&p, &c, &midpoint_thresholds(&c), params))?;
        worst_q = worst_q.max((quad - closed).abs());
    }
    ensure(worst_q <= 1e-9, || format!("quadrature gap {worst_q:e}"))?;
    Ok(format!(
        "dual-form gap {worst:.1e}, quadrature gap {worst_q:.1e}"
    ))
}

fn check_a1_groups() -> Outcome {
    let counts: Vec<usize> = [4, 8, 16]
        .into_iter()
        .map(distinct_a1_count)
        .collect::<Result<_>>()
        .map_err(|e| e.to_string())?;
    ensure(counts == [3, 7, 15], || {
        format!("distinct a_1 counts {counts:?}")
    })?;
    for size in [4, 8, 16] {
        for p in lib(all_patterns(size))? {
            let changes = (0..size - 1).filter(|&k| p.bit(k) != p.bit(k + 1)).count() as i64;
            ensure(pattern_coefficients(&p).entries[0] == 2 * changes, || {
                format!("a_1 mismatch for {p}")
            })?;
        }
    }
    Ok(format!("distinct a_1 counts {counts:?}"))
}

fn check_bd_vs_abd() -> Outcome {
    let c = lib(make_pam(8))?;
    let brgc = lib(named_labeling(LabelingName::Brgc, 8))?;
    let mut worst = 0f64;
    for step in 0..=40 {
        let params = lib(ChannelParams::from_db(step as f64 * 0.5))?;
        for w in [15, 60, 102] {
            let p = lib(BitPattern::from_index(8, w))?;
            let abd = pber_pam(&p, params);
            let bd = lib(pber_general(
                &p,
                &c,
                &lib(bd_thresholds(&p, &c, params))?,
                params,
            ))?;
            worst = worst.max((abd - bd).abs() / abd);
        }
        let abd = lib(labeling_ber(&brgc, &c, params, DemodKind::AbdMidpoints))?;
        let bd = lib(labeling_ber(&brgc, &c, params, DemodKind::BdNumeric))?;
        worst = worst.max((abd - bd).abs() / abd);
    }
    ensure(worst <= 0.02, || format!("relative gap {worst:.4}"))?;
    let mid = midpoint_thresholds(&c);
    let params = lib(ChannelParams::new(1e4))?;
    let mut gap = 0f64;
    for w in [15, 60, 102] {
        let t = lib(bd_thresholds(
            &lib(BitPattern::from_index(8, w))?,
            &c,
            params,
        ))?;
        for k in 0..7 {
            gap = gap.max((t.betas[k] - mid.betas[k]).abs());
        }
    }
    ensure(gap <= 1e-4, || {
        format!("threshold offset {gap:e} at snr 1e4")
    })?;
    Ok(format!(
        "max relative gap {worst:.4}, threshold offset at snr 1e4 {gap:.1e}"
    ))
}

fn check_monte_carlo() -> Outcome {
    let mut worst = 0f64;
    for size in [4, 8] {
        let c = lib(make_pam(size))?;
        let l = lib(named_labeling(LabelingName::Brgc, size))?;
        let grid = vec![0.0, 5.0, 10.0];
        let config = SimConfig {
            trials: 1_000_000,
            seed: 2024,
            snr_db_grid: grid.clone(),
            demodulator: Demodulator::Abd,
        };
        let est = lib(simulate(&SimTarget::Labeling(l.clone()), &c, &config))?;
        for (e, &db) in est.iter().zip(&grid) {
            let want = lib(labeling_ber(
                &l,
                &c,
                lib(ChannelParams::from_db(db))?,
                DemodKind::AbdMidpoints,
            ))?;
            let z = (e.point.value - want).abs() / e.stderr;
            worst = worst.max(z);
            ensure(z <= 3.0, || {
                format!(
                    "M={size} {db} dB: {} vs {want} ({z:.2} sigma)",
                    e.point.value
                )
            })?;
        }
    }
    let c2 = lib(make_pam(2))?;
    let config = SimConfig {
        trials: 1_000_000,
        seed: 2024,
        snr_db_grid: vec![0.0],
        demodulator: Demodulator::Abd,
    };
    let est = lib(simulate(
        &SimTarget::Pattern(lib(BitPattern::from_index(2, 1))?),
        &c2,
        &config,
    ))?;
    let want = qfunc(2f64.sqrt());
    let z = (est[0].point.value - want).abs() / est[0].stderr;
    ensure(z <= 3.0, || {
        format!("BPSK: {} vs {want} ({z:.2} sigma)", est[0].point.value)
    })?;
    Ok(format!("worst deviation {:.2} sigma", worst.max(z)))
}

fn check_labeling_curves() -> Outcome {
    let (n, classes) = lib(count_distinct_ber_labelings(8))?;
    let params = lib(ChannelParams::from_db(10.0))?;
    ensure(
        classes
            .iter()
            .all(|c| (0.0..0.5).contains(&c.alpha.ber(params))),
        || "BER outside (0, 1/2)".into(),
    )?;
    ensure(n == 460 && classes[0].alpha.entries[0] == 14, || {
        format!("{n} curves, best alpha_1 {}", classes[0].alpha.entries[0])
    })?;
    Ok(format!("{n} curves, best alpha_1 = 14 (BRGC)"))
}

/// Runs every check in order.
pub fn run_all() -> Vec<CheckResult> {
    let checks: [NamedCheck; 10] = [
        ("pattern classes table", check_pattern_tables),
        ("class count closed form", check_class_counts),
        ("named labelings table", check_named_labelings),
        ("labeling census", check_labeling_census),
        ("SD/ABD equivalence", check_sd_abd_equivalence),
        ("dual form and quadrature", check_dual_form_and_quadrature),
        ("a_1 groups", check_a1_groups),
        ("BD vs ABD", check_bd_vs_abd),
        ("Monte-Carlo consistency", check_monte_carlo),
        ("8-PAM labeling curves", check_labeling_curves),
    ];
    checks
        .into_iter()
        .map(|(name, f)| {
            let start = Instant::now();
            let (passed, detail) = match f() {
                Ok(d) => (true, d),
                Err(d) => (false, d),
            };
            CheckResult {
                name,
                passed,
                detail: format!("{detail} [{:.2}s]", start.elapsed().as_secs_f64()),
            }
        })
        .collect()
}
