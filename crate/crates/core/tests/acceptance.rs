//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test -- --nocapture` and on failure).

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::time::Instant;
use well_echo::*;

fn verdict(id: &str, pass: bool, detail: &str) {
    println!(
        "[{}] acceptance {id}: {detail}",
        if pass { "PASS" } else { "FAIL" }
    );
    assert!(pass, "acceptance {id} failed: {detail}");
}

fn series_density(lambda: f64, p: u64, q: u64, epsilon: f64, n_grid: usize) -> DensityProfile {
    let model = make_model(lambda).unwrap();
    let set = build_spectral_set(&model, epsilon).unwrap();
    let grid = SpatialGrid::for_model(&model, n_grid);
    let field = evaluate_wavefunction(&set, &grid, reduce_time(p, q).unwrap()).unwrap();
    density(&field)
}

#[test]
fn c01_plateau_quarter_period() {
    let dens = series_density(1.5, 1, 4, 1e-7, 1200);
    // closed five-knot form of a·ρ(ξ, T/4) at λ = 3/2
    let sup = dens
        .grid()
        .points()
        .iter()
        .zip(dens.values())
        .map(|(&xi, &v)| {
            let want = if xi <= 0.5 {
                (PI * xi).sin().powi(2)
            } else if xi <= 1.0 {
                1.0
            } else {
                (PI * xi).cos().powi(2)
            };
            (v - want).abs()
        })
        .fold(0.0, f64::max);

    let report = detect_plateaux(&dens, 10.0 * dens.error_bound(), 0.05).unwrap();
    let plateau = report.covering(0.75).cloned();
    let ok_plateau = plateau.as_ref().is_some_and(|p| {
        (p.interval.0 - 0.5).abs() < 0.01
            && (p.interval.1 - 1.0).abs() < 0.01
            && (p.value - 1.0).abs() <= 1e-6
    });
    verdict(
        "1 (plateau T/4)",
        sup <= 1e-6 && ok_plateau,
        &format!("sup|series − closed| = {sup:.3e} (≤ 1e-6); plateau {plateau:?}"),
    );
}

#[test]
fn c02_plateau_and_cusps_eighth_period() {
    let model = make_model(1.5).unwrap();
    let dens = series_density(1.5, 1, 8, 1e-7, 1200);
    let closed = density_eighth(&model);
    let sup = dens
        .grid()
        .points()
        .iter()
        .zip(dens.values())
        .map(|(&xi, &v)| (v - closed.eval(xi)).abs())
        .fold(0.0, f64::max);

    let report = detect_plateaux(&dens, 10.0 * dens.error_bound(), 0.05).unwrap();
    let plateau = report.covering(0.375).cloned();
    let ok_plateau = plateau.as_ref().is_some_and(|p| {
        (p.interval.0 - 0.25).abs() < 0.01
            && (p.interval.1 - 0.5).abs() < 0.01
            && (p.value - 0.25).abs() <= 1e-6
    });

    // the five cusp abscissae {p/4}: four carry an actual ∂ξψ jump; the
    // branch point λ/2 = 3/4 is a candidate whose one-sided derivatives
    // coincide at this λ, so the density stays C¹ there and the detector
    // reports it through the candidate set instead
    let candidates = cusp_abscissae_eighth(&model).sorted();
    let want: Vec<f64> = (1..=5).map(|p| p as f64 / 4.0).collect();
    let candidates_ok = candidates
        .iter()
        .zip(&want)
        .all(|(a, b)| (a - b).abs() < 1e-12);

    let jumps = psi_eighth(&model).knot_derivative_jumps();
    let detected = detect_cusps(&dens, DEFAULT_CUSP_KAPPA);
    let h = dens.grid().max_step();
    let mut cusps_ok = candidates_ok;
    let mut notes = Vec::new();
    for &c in &want {
        let has_jump = jumps
            .iter()
            .any(|&(x, j)| (x - c).abs() < 1e-9 && j > 1e-9);
        let found = detected.iter().any(|d| (d.xi - c).abs() <= h + 1e-12);
        if has_jump {
            cusps_ok &= found;
        } else {
            notes.push(format!("{c}: candidate only (no derivative jump)"));
        }
    }
    // everything the detector fired on must sit on the candidate lattice
    cusps_ok &= detected
        .iter()
        .all(|d| want.iter().any(|c| (d.xi - c).abs() <= h + 1e-12));

    verdict(
        "2 (plateau + cusps T/8)",
        sup <= 1e-6 && ok_plateau && cusps_ok,
        &format!(
            "sup = {sup:.3e}; plateau {plateau:?}; detected {:?}; {}",
            detected.iter().map(|c| c.xi).collect::<Vec<_>>(),
            notes.join(", ")
        ),
    );
}

#[test]
fn c03_closed_form_oracle() {
    let mut worst: (f64, String) = (0.0, String::new());
    let mut pass = true;
    for lambda in [1.5, 2.5, 3.0, 5.5] {
        let model = make_model(lambda).unwrap();
        let set = build_spectral_set(&model, 1e-5).unwrap();
        let grid = SpatialGrid::for_model(&model, 800);
        for (p, q) in [(1u64, 2u64), (1, 4), (1, 8)] {
            let field = evaluate_wavefunction(&set, &grid, reduce_time(p, q).unwrap()).unwrap();
            let closed = match q {
                2 => psi_half(&model),
                4 => psi_quarter(&model),
                _ => psi_eighth(&model),
            };
            let dev = closed.max_field_deviation(&field);
            if dev > worst.0 {
                worst = (dev, format!("λ={lambda} τ={p}/{q}"));
            }
            pass &= dev <= set.tail_bound();
        }
    }
    verdict(
        "3 (series vs closed forms)",
        pass,
        &format!("worst sup-dev {:.3e} at {} (bound 1e-5)", worst.0, worst.1),
    );
}

#[test]
fn c04_quarter_current() {
    let model = make_model(1.5).unwrap();
    let set = build_spectral_set(&model, 1e-6).unwrap();
    let grid = SpatialGrid::uniform(&model, 2000);
    let j = current(&set, &grid, reduce_time(1, 4).unwrap(), Smoothing::None).unwrap();
    let mid = j.interval_median(0.55, 0.95).unwrap();
    let left = j.interval_median(0.0, 0.45).unwrap();
    let right = j.interval_median(1.05, 1.5).unwrap();
    let want = (1.5 * PI).sin(); // = −1
    let ok_a = (mid - want).abs() <= 1e-3 && left.abs() <= 1e-3 && right.abs() <= 1e-3;

    let model = make_model(2.5).unwrap();
    let set = build_spectral_set(&model, 1e-6).unwrap();
    let grid = SpatialGrid::uniform(&model, 2000);
    let j25 = current(&set, &grid, reduce_time(1, 4).unwrap(), Smoothing::None).unwrap();
    let sup25 = j25.values().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    verdict(
        "4 (current T/4)",
        ok_a && sup25 <= 1e-3,
        &format!(
            "λ=1.5 medians: mid {mid:.6} (want {want}), sides {left:.2e}/{right:.2e}; λ=2.5 sup |ĵ| = {sup25:.3e}"
        ),
    );
}

#[test]
fn c05_fragmentation() {
    // λ = 5.5 at T/4 (closed form): two half-mass clones
    let model = make_model(5.5).unwrap();
    let grid = SpatialGrid::uniform(&model, 32_768);
    let dens = density_quarter(&model)
        .to_density_profile(&grid, TimeSpec::Rational(reduce_time(1, 4).unwrap()));
    let rep = detect_fragments(&dens, 1e-9);
    let ok_55 = rep.components.len() == 2
        && rep
            .components
            .iter()
            .all(|c| (c.mass - 0.5).abs() <= 1e-6 && c.shape_distance <= 1e-5);

    // λ = 8 at T/8 (closed form): four unit peaks at the predicted centers
    let model = make_model(8.0).unwrap();
    let grid = SpatialGrid::uniform(&model, 32_768);
    let dens = density_eighth(&model)
        .to_density_profile(&grid, TimeSpec::Rational(reduce_time(1, 8).unwrap()));
    let rep8 = detect_fragments(&dens, 1e-9);
    let centers = [0.5, 3.5, 4.5, 7.5];
    let h8 = dens.grid().max_step();
    let ok_8 = rep8.components.len() == 4
        && rep8
            .components
            .iter()
            .zip(centers)
            .all(|(c, want)| (c.centroid - want).abs() <= h8 + 1e-6);

    // λ = 20 at T/32 (series, ε = 1e-5): complete fragmentation into 16
    let start = Instant::now();
    let dens20 = series_density(20.0, 1, 32, 1e-5, 4001);
    let rep20 = detect_fragments(&dens20, 1e-4);
    let elapsed = start.elapsed();
    let predicted = fragmented_density(&make_model(20.0).unwrap(), 4).unwrap();
    let sup_conj = dens20
        .grid()
        .points()
        .iter()
        .zip(dens20.values())
        .map(|(&xi, &v)| (v - predicted.profile.eval(xi)).abs())
        .fold(0.0, f64::max);
    let ok_20 =
        rep20.components.len() == 16 && elapsed.as_secs() < 300 && sup_conj <= 1e-3;

    verdict(
        "5 (fragmentation)",
        ok_55 && ok_8 && ok_20,
        &format!(
            "λ=5.5: {} comps, masses {:?}; λ=8 centroids {:?}; λ=20: {} comps in {:.1?}, sup|series − pattern| = {sup_conj:.2e}",
            rep.components.len(),
            rep.components.iter().map(|c| c.mass).collect::<Vec<_>>(),
            rep8.components.iter().map(|c| c.centroid).collect::<Vec<_>>(),
            rep20.components.len(),
            elapsed,
        ),
    );
}

#[test]
fn c06_sum_rules() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0601);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let lambda = loop {
            let l: f64 = rng.gen_range(1.02..9.98);
            if (l - l.round()).abs() > 0.02 {
                break l;
            }
        };
        let (norm, energy) = norm_and_energy_via_g(lambda).unwrap();
        worst = worst.max((norm - 1.0).abs()).max((energy - 1.0).abs());
    }
    let g_ok = worst <= 1e-10;

    let model = make_model(1.5).unwrap();
    let set = SpectralSet::with_n_max(&model, 100_000);
    let direct = set.norm_partial();
    let direct_ok = (direct - 1.0).abs() <= 1e-4;

    let mut energy_worst = 0.0f64;
    for lambda in [1.5, 2.5, 5.5] {
        let model = make_model(lambda).unwrap();
        let set = SpectralSet::with_n_max(&model, 10_000);
        energy_worst = energy_worst.max((mean_energy(&set) - 1.0).abs());
    }
    verdict(
        "6 (sum rules)",
        g_ok && direct_ok && energy_worst <= 1e-6,
        &format!(
            "G-route worst |dev| = {worst:.2e} (≤1e-10); Σc² = {direct:.8}; ⟨H⟩ worst dev {energy_worst:.2e}"
        ),
    );
}

#[test]
fn c07_divergent_energy_variance() {
    let mut pass = true;
    let mut details = Vec::new();
    let model = make_model(1.5).unwrap();
    for n in [1000usize, 10_000] {
        let set = SpectralSet::with_n_max(&model, 2 * n);
        let partials = second_moment_partial(&set);
        let (nh, sh) = partials[1];
        let (nf, sf) = partials[2];
        assert_eq!((nh, nf), (n, 2 * n));
        let ratio = sf / sh;
        pass &= (1.8..=2.2).contains(&ratio);
        details.push(format!("S({nf})/S({nh}) = {ratio:.4}"));
    }
    verdict("7 (divergent ⟨H²⟩)", pass, &details.join(", "));
}

#[test]
fn c08_measurement_distribution() {
    let mut pass = true;
    let mut details = Vec::new();
    for n0 in [2usize, 3, 5] {
        let model = make_model(n0 as f64).unwrap();
        let d = measurement_distribution(&model, 50);
        let dev = (d.probabilities()[n0 - 1] - 1.0 / n0 as f64).abs();
        pass &= dev <= 1e-10;
        details.push(format!("P_{n0} dev {dev:.1e}"));
    }

    let model = make_model(1.5).unwrap();
    let d = measurement_distribution(&model, 100_000);
    let sum_ok = (d.partial_sum() - 1.0).abs() <= 1e-4;
    pass &= sum_ok;
    details.push(format!("ΣP = {:.8}", d.partial_sum()));

    // λ = 20: the criterion pins argmax to {19, 20, 21}; the distribution
    // (4λ³/π²)·sin²(nπ/λ)/(λ²−n²)² actually peaks at the stationary point
    // ν* ≈ 0.848λ, i.e. n = 17 — printed here in full as the diagnostic.
    let model = make_model(20.0).unwrap();
    let d20 = measurement_distribution(&model, 2000);
    let am = d20.argmax();
    let argmax_ok = (19..=21).contains(&am);
    pass &= argmax_ok;
    details.push(format!(
        "argmax = {am} (P_16..P_21 = {:?})",
        (16..=21)
            .map(|n| (d20.probabilities()[n - 1] * 1e4).round() / 1e4)
            .collect::<Vec<_>>()
    ));
    verdict("8 (measurement distribution)", pass, &details.join("; "));
}

#[test]
fn c09_symmetries() {
    let mut rng = StdRng::seed_from_u64(0x5eed_0901);
    let mut pass = true;
    let mut worst = (0.0f64, String::new());
    for _ in 0..10 {
        let lambda: f64 = rng.gen_range(1.1..6.0);
        let q = rng.gen_range(3u64..13);
        let p = rng.gen_range(1..q);
        let model = make_model(lambda).unwrap();
        let set = build_spectral_set(&model, 1e-4).unwrap();
        let grid = SpatialGrid::uniform(&model, 200);
        let rep = check_symmetries(&set, &grid, reduce_time(p, q).unwrap()).unwrap();
        pass &= rep.all_within_tolerance();
        if rep.max_deviation() > worst.0 {
            worst = (
                rep.max_deviation(),
                format!("λ={lambda:.3} τ={p}/{q} tol={:.1e}", rep.tolerance),
            );
        }
    }
    verdict(
        "9 (symmetries)",
        pass,
        &format!("worst deviation {:.2e} at {}", worst.0, worst.1),
    );
}

#[test]
fn c10_momentum_pitfall() {
    let t = well_echo::momentum::norm_true();
    let n = well_echo::momentum::norm_naive();
    verdict(
        "10 (momentum norms)",
        (t - 1.0).abs() <= 1e-5 && (n - 2.0).abs() <= 1e-5,
        &format!("‖Φ‖² = {t:.8} (→1), ‖Φ̃‖² = {n:.8} (→2)"),
    );
}

#[test]
fn c11_conjecture_scan() {
    let model = make_model(6.0).unwrap();
    let expected = [6usize, 3, 2, 3, 6, 1];
    let mut pass = true;
    let mut details = Vec::new();
    for (p, want) in (1u64..=6).zip(expected) {
        let out = conjecture_scan(&model, 12, p).unwrap();
        if out.peak_count != want {
            pass = false;
            details.push(format!(
                "p={p}: {} peaks (conjecture says {want}); components {:?}",
                out.peak_count,
                out.report
                    .components
                    .iter()
                    .map(|c| c.interval)
                    .collect::<Vec<_>>()
            ));
        } else {
            details.push(format!("p={p}: {} peaks", out.peak_count));
        }
    }
    verdict("11 (conjecture scan λ=6, M=12)", pass, &details.join("; "));
}

#[test]
fn c12_expectations() {
    let mut pass = true;
    let mut details = Vec::new();
    for lambda in [1.5, 2.5] {
        let model = make_model(lambda).unwrap();
        let set = SpectralSet::with_n_max(&model, 600);
        let at_zero = expectations(&set, &[0.0]);
        let ok0 = (at_zero.mean_xi[0] - 0.5).abs() <= 1e-6 && at_zero.mean_p[0].abs() <= 1e-6;
        pass &= ok0;

        let taus: Vec<f64> = (0..200).map(|i| i as f64 / 200.0).collect();
        let trace = expectations(&set, &taus);
        let mut min_xi = f64::INFINITY;
        let mut max_xi = f64::NEG_INFINITY;
        let mut min_prod = f64::INFINITY;
        for i in 0..taus.len() {
            min_xi = min_xi.min(trace.mean_xi[i]);
            max_xi = max_xi.max(trace.mean_xi[i]);
            min_prod = min_prod.min(trace.product_hbar[i]);
        }
        let band_ok = min_xi >= 0.5 - 1e-3 && max_xi <= lambda - 0.5 + 1e-3;
        let prod_ok = min_prod >= 0.5 - 1e-6;
        pass &= band_ok && prod_ok;
        details.push(format!(
            "λ={lambda}: ⟨ξ⟩(0)={:.8}, range [{min_xi:.4}, {max_xi:.4}] ⊂ [0.5, λ−0.5], min ΔxΔp = {min_prod:.4}ħ",
            at_zero.mean_xi[0]
        ));
    }
    verdict("12 (expectations)", pass, &details.join("; "));
}
