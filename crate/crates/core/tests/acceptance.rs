//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! non-zero when any fails. An optional argument filters criteria by id,
//! e.g. `cargo test --test acceptance -- c7`.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qlink::analytic::{eigenfrequencies, resonant_splitting, series_solution, SeriesParams};
use qlink::protocols::{
    czkm_bound, czkm_exact_error, make_pulses, run_protocol, ProtocolKind, ProtocolSpec,
};
use qlink::sweep::{
    bound_crossover, crossover, default_grid, fit_loss, fit_power_law, least_squares,
    optimal_stirap, optimal_swap, scan_protocols, Protocol, SweepOptions,
};
use qlink::ww::{equivalent_link, evolve_ww, ModeSet, WwOptions};
use qlink::{
    derivative_kinks, evolve_pair, evolve_single, Complex64 as C64, LinkParams, PulseProfile,
    RoundTrip, TimeGrid,
};

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(pass: bool, detail: String) -> Verdict {
    Verdict { pass, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

/// Geometric grid of `n` points from `a` to `b` inclusive.
fn geomspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64))
        .collect()
}

fn c1_oracle_agreement() -> Verdict {
    let link = LinkParams::from_scaled(0.1, 50.0).unwrap();
    let t_end = 12.0;
    let grid = TimeGrid::new(1.0, 200, t_end).unwrap();
    let pulse = PulseProfile::constant(link.gamma0(), 0.0, t_end).unwrap();
    let start = Instant::now();
    let dde = evolve_single(&pulse, one(), &grid, RoundTrip::two_ended(&link)).unwrap();
    let el = equivalent_link(&link, 401).unwrap();
    let modes = ModeSet::centered(&el, 401).unwrap();
    let ww = evolve_ww(
        &el,
        &modes,
        &[&pulse],
        &[one()],
        &grid,
        WwOptions::default(),
    )
    .unwrap();
    let elapsed = secs(start.elapsed());
    let dev = (0..dde.len())
        .map(|i| (dde.population(0, i) - ww.trajectory.population(0, i)).abs())
        .fold(0.0, f64::max);
    verdict(
        dev <= 2e-2 && elapsed < 30.0,
        format!("max |Δ|c|²| = {dev:.2e} (≤ 2e-2), {elapsed:.2} s (< 30 s)"),
    )
}

fn c2_series_equivalence() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0002);
    let start = Instant::now();
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let g = rng.random_range(0.01..2.0);
        let phi = rng.random_range(0.0..2.0 * PI);
        let t_end = 10.0;
        let grid = TimeGrid::new(1.0, 200, t_end).unwrap();
        let pulse = PulseProfile::constant(g, 0.0, t_end).unwrap();
        let rt = RoundTrip {
            delay: 1.0,
            phase: phi,
        };
        let tr = evolve_single(&pulse, one(), &grid, rt).unwrap();
        let p = SeriesParams::new(g, 1.0, phi, t_end).unwrap();
        for (i, &t) in tr.times().iter().enumerate() {
            let exact = series_solution(&p, t).unwrap();
            worst = worst.max((tr.amplitudes(0)[i] - exact).norm());
        }
    }
    let elapsed = secs(start.elapsed());
    verdict(
        worst <= 1e-6 && elapsed < 10.0,
        format!("20 draws, max |Δc| = {worst:.2e} (≤ 1e-6), {elapsed:.2} s (< 10 s)"),
    )
}

fn c3_kinks() -> Verdict {
    let mut first_rel = 0.0f64;
    let mut kink_ratio = 0.0f64;
    let mut pop_ratio = 0.0f64;
    for &gt in &[0.02, 0.5, 2.0] {
        let link = LinkParams::from_scaled(gt, 50.3).unwrap();
        let t_end = 12.0;
        let grid = TimeGrid::new(1.0, 400, t_end).unwrap();
        let pulse = PulseProfile::constant(gt, 0.0, t_end).unwrap();
        let tr = evolve_single(&pulse, one(), &grid, RoundTrip::two_ended(&link)).unwrap();
        let kinks = derivative_kinks(&tr);
        assert!(kinks.len() >= 5);
        // First echo returns after 2τ with phase 2φ.
        let expect = -gt * C64::from_polar(1.0, 2.0 * link.phi());
        first_rel = first_rel.max((kinks[0].jump - expect).norm() / expect.norm());
        for k in &kinks {
            kink_ratio = kink_ratio.max(k.jump.norm() / gt);
            pop_ratio = pop_ratio.max(k.population_jump.abs() / (2.0 * gt));
        }
    }
    verdict(
        first_rel <= 0.01 && kink_ratio <= 1.01 && pop_ratio <= 1.01,
        format!(
            "first jump rel err {first_rel:.2e} (≤ 1%), max |jump|/γ = {kink_ratio:.4}, \
             max |Δṗ|/2γ = {pop_ratio:.4} (≤ 1 within the same 1%)"
        ),
    )
}

fn c4_eigenvalues() -> Verdict {
    let mut worst_res = 0.0f64;
    for &g in &[0.01, 0.15, 1.5, 50.0] {
        for &d in &[50.0, 50.25, 50.5, 50.8] {
            let link = LinkParams::new(g, 1.0, d * PI).unwrap();
            for l in eigenfrequencies(&link, ((d - 2.0) * PI, (d + 2.0) * PI)).unwrap() {
                let res = (l - d * PI - 0.5 * g / l.tan()).abs() / l.abs().max(g);
                worst_res = worst_res.max(res);
            }
        }
    }
    let mut split_err = 0.0f64;
    for &g in &[0.001, 0.003, 0.01] {
        let s = resonant_splitting(&LinkParams::from_scaled(g, 50.0).unwrap()).unwrap();
        split_err = split_err.max((s / (2.0 * (g / 2.0).sqrt()) - 1.0).abs());
    }
    let gs = geomspace(1e-3, 50.0, 40);
    let splits: Vec<f64> = gs
        .iter()
        .map(|&g| resonant_splitting(&LinkParams::from_scaled(g, 50.0).unwrap()).unwrap())
        .collect();
    let monotone = splits.windows(2).all(|w| w[1] > w[0]);
    let below = splits.iter().all(|&s| s < PI);
    let at50 = splits[splits.len() - 1] / PI;
    verdict(
        worst_res < 1e-10 && split_err <= 0.05 && monotone && below && (at50 - 1.0).abs() <= 0.05,
        format!(
            "max residual/max(|λ|, γ) {worst_res:.2e} (< 1e-10), splitting rel err {split_err:.2e} (≤ 5%), \
             monotone={monotone}, < π/τ: {below}, at γτ=50: {at50:.4}·π/τ"
        ),
    )
}

fn c5_swap() -> Verdict {
    let opts = SweepOptions::default();
    let start = Instant::now();
    let pts: Vec<(f64, f64)> = [0.01, 0.02, 0.05, 0.1, 0.2, 0.5]
        .iter()
        .map(|&g| (g, optimal_swap(g, &opts).unwrap().infidelity))
        .collect();
    let elapsed = secs(start.elapsed());
    let (slope, intercept) = least_squares(&pts);
    let fit = fit_power_law(&pts).unwrap();
    verdict(
        (slope - 1.5).abs() <= 0.3 && (fit.b - 1.0).abs() <= 0.15 && elapsed < 300.0,
        format!(
            "linear slope {slope:.3} (intercept {intercept:.2e}; need 1.5 ± 0.3), \
             exponent {:.3} (need 1.0 ± 0.15), {elapsed:.1} s (< 300 s)",
            fit.b
        ),
    )
}

fn c6_stirap() -> Verdict {
    let opts = SweepOptions::default();
    let start = Instant::now();
    // The optimum jumps between valleys, so sparse grids give an unstable
    // exponent; 40 points is past where it settles.
    let pts: Vec<(f64, f64)> = geomspace(0.05, 1.4, 40)
        .into_iter()
        .map(|g| (g, optimal_stirap(g, &opts).unwrap().infidelity))
        .collect();
    let at144 = optimal_stirap(1.44, &opts).unwrap();
    let elapsed = secs(start.elapsed());
    let fit = fit_power_law(&pts).unwrap();
    verdict(
        (fit.b - 2.0).abs() <= 0.2
            && (1e-5..=4e-5).contains(&fit.a)
            && at144.infidelity < 4e-4
            && elapsed < 900.0,
        format!(
            "exponent {:.3} (need 2.0 ± 0.2), prefactor {:.2e} (need [1e-5, 4e-5]), \
             ε(1.44) = {:.2e} at T = {:.3}τ (need < 4e-4), {elapsed:.1} s (< 900 s)",
            fit.b, fit.a, at144.infidelity, at144.t_opt
        ),
    )
}

fn c7_czkm() -> Verdict {
    let mut worst_diff = 0.0f64;
    let mut violations = Vec::new();
    let mut checked = 0;
    let mut check_bound = |g: f64, t: f64, e: f64| {
        checked += 1;
        let b = czkm_bound(g, 1.0, t).unwrap();
        if e < b {
            violations.push(format!("({g:.3}, {t:.2}): {e:.2e} < {b:.2e}"));
        }
    };
    for &g in &[0.05, 0.2, 0.5, 1.0, 2.0] {
        let link = LinkParams::from_scaled(g, 50.0).unwrap();
        for &t in &[3.0, 6.0, 10.0, 20.0, 40.0] {
            let exact = czkm_exact_error(g, 1.0, t).unwrap();
            let spec = ProtocolSpec::new(ProtocolKind::Czkm, g, t).unwrap();
            let run = run_protocol(&spec, &link, 200, 0.0).unwrap();
            worst_diff = worst_diff.max((exact - run.infidelity).abs());
            // 1 − F from the DDE cannot resolve errors below ~1e-16.
            check_bound(g, t, exact);
        }
    }
    for g in geomspace(0.05, 2.0, 10) {
        for j in 0..10 {
            let t = 2.0 + 48.0 * j as f64 / 9.0;
            check_bound(g, t, czkm_exact_error(g, 1.0, t).unwrap());
        }
    }
    // Error against x = γ₀(T − τ) at γ₀τ = 0.1, reaching T ≈ 200τ.
    let g = 0.1;
    let pts: Vec<(f64, f64)> = (0..81)
        .map(|i| {
            let x = 4.0 + 16.0 * i as f64 / 80.0;
            let t = 1.0 + x / g;
            let e = czkm_exact_error(g, 1.0, t).unwrap();
            check_bound(g, t, e);
            (x, e.ln())
        })
        .collect();
    let (slope, _) = least_squares(&pts);
    let shown: Vec<&str> = violations.iter().take(3).map(String::as_str).collect();
    verdict(
        worst_diff <= 1e-6 && violations.is_empty() && (slope + 0.5).abs() <= 0.05,
        format!(
            "5×5 max |exact − DDE| = {worst_diff:.2e} (≤ 1e-6), bound violated at {}/{checked} \
             (γ₀τ, T/τ) points [{}{}], log-slope {slope:.4} (need −0.5 ± 10%)",
            violations.len(),
            shown.join("; "),
            if violations.len() > 3 { "; ..." } else { "" }
        ),
    )
}

fn c8_crossover() -> Verdict {
    let opts = SweepOptions::default();
    let grid = default_grid();
    let recs = scan_protocols(&grid, &[Protocol::Stirap, Protocol::Czkm], &opts).unwrap();
    let x = crossover(&recs, Protocol::Czkm, Protocol::Stirap);
    let eps = |p: Protocol, g: f64| {
        recs.iter()
            .find(|r| r.protocol == p.name() && r.gamma0_tau == g)
            .unwrap()
            .infidelity
    };
    let consistent = x.is_some_and(|x| {
        grid.iter().all(|&g| {
            let czkm_wins = eps(Protocol::Czkm, g) < eps(Protocol::Stirap, g);
            czkm_wins == (g >= x)
        })
    });
    let located = x.is_some_and(|x| (x - 1.44).abs() <= 0.2);
    let fmt = |v: Option<f64>| v.map_or("none".to_string(), |v| format!("{v:.3}"));
    verdict(
        located && consistent,
        format!(
            "crossover at γ₀τ = {} (need 1.44 ± 0.2), one-sided: {consistent}; \
             STIRAP vs the dark-state bound crosses at {}",
            fmt(x),
            fmt(bound_crossover(&recs))
        ),
    )
}

fn c9_loss() -> Verdict {
    let opts = SweepOptions {
        kappa: 0.01,
        ..SweepOptions::default()
    };
    let grid = geomspace(0.01, 1.44, 13);
    let recs = scan_protocols(&grid, &Protocol::ALL, &opts).unwrap();
    let targets = [
        (Protocol::Swap, 0.0034, 0.9),
        (Protocol::Stirap, 0.0014, 0.9),
        (Protocol::Czkm, 0.0005, 1.3),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (p, a, b) in targets {
        let f = fit_loss(&recs, p).unwrap();
        let ok = (f.b - b).abs() <= 0.15 && f.a / a <= 2.0 && a / f.a <= 2.0;
        pass &= ok;
        parts.push(format!(
            "{} {:.2e}·(T/τ)^{:.3} (target {a:.1e}·(T/τ)^{b}) {}",
            p.name(),
            f.a,
            f.b,
            if ok { "ok" } else { "off" }
        ));
    }
    let n = |p: Protocol, g: f64| {
        recs.iter()
            .find(|r| r.protocol == p.name() && r.gamma0_tau == g)
            .unwrap()
            .photon_integral
    };
    let losers: Vec<String> = grid
        .iter()
        .filter(|&&g| n(Protocol::Stirap, g) >= n(Protocol::Swap, g).min(n(Protocol::Czkm, g)))
        .map(|g| format!("{g:.3}"))
        .collect();
    pass &= losers.is_empty();
    parts.push(format!(
        "STIRAP ∫n dt not smallest at γ₀τ ∈ [{}]",
        losers.join(", ")
    ));
    verdict(pass, parts.join("; "))
}

fn c10_properties() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0010);
    let mut unitarity = 0.0f64;
    let mut norm_excess = f64::NEG_INFINITY;
    let mut mirror_exact = true;
    let mut shift = 0.0f64;
    let mut linear = 0.0f64;
    for _ in 0..6 {
        let g = rng.random_range(0.05..1.5);
        let d = 50.0 + rng.random_range(0.0..1.0);
        let t: f64 = rng.random_range(3.0..12.0);
        let t = (t * 100.0).round() / 100.0;
        let link = LinkParams::from_scaled(g, d).unwrap();
        let kind = match rng.random_range(0..3) {
            0 => ProtocolKind::Swap,
            1 => ProtocolKind::Stirap,
            _ => ProtocolKind::Czkm,
        };
        let spec = ProtocolSpec::new(kind, g, t).unwrap();
        let (p1, p2) = make_pulses(&spec, &link).unwrap();
        let grid = TimeGrid::new(1.0, 100, t).unwrap();
        let c0 = [
            C64::new(rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7)),
            C64::new(rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3)),
        ];
        let norm0 = c0[0].norm_sqr() + c0[1].norm_sqr();

        let el = equivalent_link(&link, 101).unwrap();
        let modes = ModeSet::centered(&el, 101).unwrap();
        let ww = evolve_ww(&el, &modes, &[&p1, &p2], &c0, &grid, WwOptions::default()).unwrap();
        let tr = &ww.trajectory;
        for i in 0..tr.len() {
            unitarity =
                unitarity.max((tr.emitter_population(i) + tr.photon_number(i) - norm0).abs());
        }

        let dde = evolve_pair(&link, [&p1, &p2], c0, &grid).unwrap();
        for i in 0..dde.len() {
            norm_excess = norm_excess.max(dde.emitter_population(i) - norm0);
        }

        let a = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)) * 0.5;
        let scaled = evolve_pair(&link, [&p1, &p2], [a * c0[0], a * c0[1]], &grid).unwrap();
        for l in 0..2 {
            for (x, y) in dde.amplitudes(l).iter().zip(scaled.amplitudes(l)) {
                linear = linear.max((a * x - y).norm());
            }
        }

        if !matches!(spec.kind, ProtocolKind::Swap) {
            for &ti in grid.times().iter() {
                mirror_exact &= p2.eval(ti) == p1.eval(t - ti);
            }
        }

        let lo = (d - 3.0) * PI;
        let hi = (d + 3.0) * PI;
        let base = eigenfrequencies(&link, (lo, hi)).unwrap();
        let moved = eigenfrequencies(
            &link.with_delta(link.delta() + PI).unwrap(),
            (lo + PI, hi + PI),
        )
        .unwrap();
        for (x, y) in base.iter().zip(&moved) {
            shift = shift.max((y - x - PI).abs() / y);
        }
    }
    verdict(
        unitarity <= 1e-6
            && norm_excess <= 1e-9
            && mirror_exact
            && shift <= 1e-12
            && linear <= 1e-12,
        format!(
            "WW unitarity {unitarity:.1e} (≤ 1e-6), DDE norm excess {norm_excess:.1e} (≤ 1e-9), \
             mirrors exact: {mirror_exact}, eigen shift rel {shift:.1e} (≤ 1e-12), \
             linearity {linear:.1e} (≤ 1e-12)"
        ),
    )
}

type Check = fn() -> Verdict;

fn main() {
    let filter: Option<String> = std::env::args()
        .skip(1)
        .find(|a| !a.starts_with('-'))
        .map(|a| a.to_lowercase());
    let checks: [(&str, &str, Check); 10] = [
        ("c1", "oracle agreement", c1_oracle_agreement),
        ("c2", "series equivalence", c2_series_equivalence),
        ("c3", "kink formula", c3_kinks),
        ("c4", "eigenvalues", c4_eigenvalues),
        ("c5", "SWAP scaling", c5_swap),
        ("c6", "STIRAP scaling", c6_stirap),
        ("c7", "CZKM exactness", c7_czkm),
        ("c8", "crossover", c8_crossover),
        ("c9", "loss model", c9_loss),
        ("c10", "property suites", c10_properties),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (id, name, check) in checks {
        if filter.as_ref().is_some_and(|f| f != id) {
            continue;
        }
        ran += 1;
        let start = Instant::now();
        let v = catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            verdict(false, format!("panicked: {msg}"))
        });
        let tag = if v.pass { "PASS" } else { "FAIL" };
        println!(
            "[{tag}] {id:>3} {name}: {} [{:.1} s]",
            v.detail,
            secs(start.elapsed())
        );
        failed += usize::from(!v.pass);
    }
    println!("acceptance: {} passed, {failed} failed", ran - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
