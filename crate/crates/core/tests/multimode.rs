use proptest::prelude::*;
use qlink::protocols::{make_pulses, run_protocol, ProtocolKind, ProtocolSpec};
use qlink::sweep::{optimal_swap, ww_infidelity, SweepOptions};
use qlink::ww::{equivalent_link, evolve_ww, photon_number, ModeSet, WwOptions};
use qlink::{evolve_single, Complex64 as C64, LinkParams, PulseProfile, RoundTrip, TimeGrid};

fn one() -> C64 {
    C64::new(1.0, 0.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn total_excitation_is_conserved(
        gt in 0.05f64..1.5,
        d in 50.0f64..51.0,
        which in 0usize..3,
        re in -0.7f64..0.7,
        im in -0.7f64..0.7,
    ) {
        let t = 6.0;
        let kind = [ProtocolKind::Swap, ProtocolKind::Stirap, ProtocolKind::Czkm][which].clone();
        let link = LinkParams::from_scaled(gt, d).unwrap();
        let spec = ProtocolSpec::new(kind, gt, t).unwrap();
        let (p1, p2) = make_pulses(&spec, &link).unwrap();
        let grid = TimeGrid::new(1.0, 50, t).unwrap();
        let c0 = [C64::new(re, im), C64::new(0.1, -0.2)];
        let norm0 = c0[0].norm_sqr() + c0[1].norm_sqr();
        let el = equivalent_link(&link, 61).unwrap();
        let modes = ModeSet::centered(&el, 61).unwrap();
        let ww = evolve_ww(&el, &modes, &[&p1, &p2], &c0, &grid, WwOptions::default()).unwrap();
        let tr = &ww.trajectory;
        for i in 0..tr.len() {
            let total = tr.emitter_population(i) + tr.photon_number(i);
            prop_assert!((total - norm0).abs() < 1e-6);
        }
    }
}

#[test]
fn multimode_error_shrinks_with_the_ladder() {
    let link = LinkParams::from_scaled(0.1, 50.0).unwrap();
    let grid = TimeGrid::new(1.0, 200, 12.0).unwrap();
    let p = PulseProfile::constant(0.1, 0.0, 12.0).unwrap();
    let dde = evolve_single(&p, one(), &grid, RoundTrip::two_ended(&link)).unwrap();
    let mut prev = f64::INFINITY;
    for n in [21, 51, 201, 401] {
        let el = equivalent_link(&link, n).unwrap();
        let modes = ModeSet::centered(&el, n).unwrap();
        let ww = evolve_ww(&el, &modes, &[&p], &[one()], &grid, WwOptions::default()).unwrap();
        let dev = (0..dde.len())
            .map(|i| (dde.population(0, i) - ww.trajectory.population(0, i)).abs())
            .fold(0.0, f64::max);
        assert!(dev < prev, "{n} modes: {dev} vs {prev}");
        prev = dev;
    }
    assert!(prev < 2e-2);
}

#[test]
fn photons_in_flight_mid_swap() {
    let gt = 0.1;
    let link = LinkParams::from_scaled(gt, 50.0).unwrap();
    let t = std::f64::consts::PI / gt.sqrt();
    let t = (t * 100.0).round() / 100.0;
    let spec = ProtocolSpec::new(ProtocolKind::Swap, gt, t).unwrap();
    let (p1, p2) = make_pulses(&spec, &link).unwrap();
    let grid = TimeGrid::new(1.0, 100, t).unwrap();
    let c0 = [one(), C64::new(0.0, 0.0)];
    let dde = run_protocol(&spec, &link, 100, 0.0).unwrap().trajectory;
    let el = equivalent_link(&link, 201).unwrap();
    let modes = ModeSet::centered(&el, 201).unwrap();
    let ww = evolve_ww(&el, &modes, &[&p1, &p2], &c0, &grid, WwOptions::default()).unwrap();
    let mid = grid.time(grid.full_steps() / 2);
    let n_ww = photon_number(&ww.trajectory, mid).unwrap();
    let n_dde = photon_number(&dde, mid).unwrap();
    assert!(n_ww > 0.1);
    assert!((n_ww - n_dde).abs() < 2e-2, "{n_ww} vs {n_dde}");
}

#[test]
fn swap_optimum_survives_the_multimode_check() {
    let opts = SweepOptions::default();
    let rec = optimal_swap(0.1, &opts).unwrap();
    let ww = ww_infidelity(&rec, 50.0, 201, 200).unwrap();
    assert!(
        (ww - rec.infidelity).abs() < 1e-3,
        "{ww} vs {}",
        rec.infidelity
    );
}

#[test]
fn long_link_emission_fills_the_link() {
    // γτ = 20: the emitter is empty long before the first echo.
    let link = LinkParams::from_scaled(20.0, 50.0).unwrap();
    let grid = TimeGrid::new(1.0, 400, 1.5).unwrap();
    let p = PulseProfile::constant(20.0, 0.0, 1.5).unwrap();
    let tr = evolve_single(&p, one(), &grid, RoundTrip::two_ended(&link)).unwrap();
    assert_eq!(photon_number(&tr, 0.0).unwrap(), 0.0);
    assert!((photon_number(&tr, 1.5).unwrap() - 1.0).abs() < 1e-9);
}
