//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured numbers and runtime (run with `--nocapture` to see them).
//! Tolerances are pinned in the assertions below.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use qps_core::kernel::{self, Complex, GridSpec};
use qps_core::lp::{self, Feasibility, PhaseSpaceLP};
use qps_core::povm::{self, Outcome, PovmModel, Setting};
use qps_core::states::{CountingDetector, QuantumState};
use qps_core::witness::{
    self, bhd, ephd, evaluate_witness, lhs_expectation, onoff_no_violation_check, rhs_bound,
    TabEntry, TestFunction, WitnessError,
};

const PI: f64 = std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex {
    Complex::new(re, im)
}

fn pass(criterion: u32, name: &str, detail: &str, started: Instant, budget_s: f64) {
    let elapsed = started.elapsed().as_secs_f64();
    println!("criterion {criterion} ({name}): PASS — {detail} [{elapsed:.2} s < {budget_s} s]");
    assert!(
        elapsed < budget_s,
        "criterion {criterion} exceeded its {budget_s} s budget: {elapsed:.2} s"
    );
}

fn uhd_paper_setup() -> (QuantumState, PovmModel, TestFunction) {
    let gammas = [c(-0.1, 0.0), c(0.0, 0.0), c(0.1, 0.0)];
    let entries: Vec<TabEntry> = gammas
        .iter()
        .enumerate()
        .flat_map(|(i, g)| {
            let v0 = if i == 1 { -2.0 } else { 1.0 };
            vec![
                TabEntry {
                    outcome: Outcome::Count(0),
                    setting: Setting::Displacement(*g),
                    value: v0,
                },
                TabEntry {
                    outcome: Outcome::Count(1),
                    setting: Setting::Displacement(*g),
                    value: 0.0,
                },
            ]
        })
        .collect();
    (
        QuantumState::AttenuatedFock { n: 1, eta: 0.75 },
        PovmModel::Uhd {
            displacements: gammas.to_vec(),
        },
        TestFunction::Tabulated { entries },
    )
}

#[test]
fn criterion_1_click_detector_witness() {
    let started = Instant::now();
    let grid = GridSpec::default();
    let lambda = TestFunction::PhotocountExp { t: 7.0, g: 0.2 };
    let model = PovmModel::Click { detectors: 10 };

    let svs = QuantumState::SqueezedVacuum { r: 0.7, eta: 0.6 };
    let rep_svs = evaluate_witness(&svs, &model, &lambda, 1.0, &grid).unwrap();
    assert!(
        (rep_svs.lhs - 1.33).abs() <= 0.01,
        "svs lhs {}",
        rep_svs.lhs
    );
    assert!((rep_svs.rhs - 1.00).abs() <= 0.01, "rhs {}", rep_svs.rhs);
    assert!(rep_svs.violated);

    let cat = QuantumState::EvenCat { alpha0: c(1.0, 0.0), eta: 0.6 };
    let rep_cat = evaluate_witness(&cat, &model, &lambda, 1.0, &grid).unwrap();
    assert!(
        (rep_cat.lhs - 1.98).abs() <= 0.01,
        "cat lhs {}",
        rep_cat.lhs
    );
    assert!((rep_cat.rhs - 1.00).abs() <= 0.01);
    assert!(rep_cat.violated);

    pass(
        1,
        "click-detector witness",
        &format!(
            "lhs_svs={:.4} lhs_cat={:.4} rhs={:.4}",
            rep_svs.lhs, rep_cat.lhs, rep_svs.rhs
        ),
        started,
        5.0,
    );
}

#[test]
fn criterion_2_pnr_analytic_threshold() {
    let started = Instant::now();
    let dt = 1e-3;
    for eta in [0.4, 0.6, 0.8, 1.0] {
        let t_star = (2.0 - eta) / eta;
        for state in [
            QuantumState::SqueezedVacuum { r: 0.7, eta },
            QuantumState::EvenCat { alpha0: c(1.0, 0.0), eta },
        ] {
            // scan a Δt grid across the threshold; rhs is the closed-form 1
            let mut first_violation = None;
            let mut t = t_star - 0.2;
            while t <= t_star + 0.2 {
                let lambda = TestFunction::PhotocountExp { t, g: 0.0 };
                let (lhs, _) = lhs_expectation(&state, &PovmModel::Pnr, &lambda).unwrap();
                let violated = lhs > 1.0 + 1e-9;
                if violated && first_violation.is_none() {
                    first_violation = Some(t);
                }
                if !violated && first_violation.is_some() {
                    panic!("violation not monotone in t for {state:?} at t={t}");
                }
                t += dt;
            }
            let first = first_violation.expect("no violation found above the threshold");
            assert!(
                first > t_star && first - t_star <= 2.0 * dt,
                "{state:?}: first violating t = {first}, threshold {t_star}"
            );
        }
        // divergence guard for the squeezed vacuum
        let r: f64 = 0.7;
        let t_crit = (1.0 + 1.0 / r.tanh() - eta) / eta;
        let svs = QuantumState::SqueezedVacuum { r, eta };
        match lhs_expectation(
            &svs,
            &PovmModel::Pnr,
            &TestFunction::PhotocountExp { t: t_crit, g: 0.0 },
        ) {
            Err(WitnessError::Divergent { t_critical, .. }) => {
                assert!((t_critical - t_crit).abs() < 1e-12)
            }
            other => panic!("expected divergence at t = {t_crit}, got {other:?}"),
        }
        assert!(lhs_expectation(
            &svs,
            &PovmModel::Pnr,
            &TestFunction::PhotocountExp {
                t: t_crit - 1e-6,
                g: 0.0
            },
        )
        .is_ok());
    }
    pass(
        2,
        "pnr analytic threshold",
        "violation iff t > (2-eta)/eta within 1e-3 for eta in {0.4,0.6,0.8,1.0}; divergence guard at (1+coth r-eta)/eta",
        started,
        5.0,
    );
}

#[test]
fn criterion_3_uhd_witness() {
    let started = Instant::now();
    let (state, model, lambda) = uhd_paper_setup();
    let grid = GridSpec {
        radius: 5.0,
        ..GridSpec::default()
    };
    let rep = evaluate_witness(&state, &model, &lambda, 1.0, &grid).unwrap();
    assert!((rep.lhs - 0.0099).abs() <= 2e-4, "lhs {}", rep.lhs);
    assert!((rep.rhs - 0.0089).abs() <= 2e-4, "rhs {}", rep.rhs);
    assert!(rep.violated);
    let radius = rep.argmax.last().unwrap().norm();
    assert!((radius - 1.22).abs() <= 0.05, "argmax |α| = {radius}");
    pass(
        3,
        "uhd witness",
        &format!(
            "lhs={:.5} rhs={:.5} argmax |α|={:.3}",
            rep.lhs, rep.rhs, radius
        ),
        started,
        5.0,
    );
}

#[test]
fn criterion_4_on_off_no_go() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(0x0f0f_2026);
    let mut checked = 0usize;
    let mut pairs: Vec<(f64, f64)> = vec![(1.0, 0.0), (-2.0, 5.0), (0.7, 0.7)];
    for _ in 0..100 {
        pairs.push((rng.random_range(-5.0..5.0), rng.random_range(-5.0..5.0)));
    }
    for (l0, l1) in pairs {
        let rec = onoff_no_violation_check(l0, l1, 1e-3);
        assert!(rec.certified, "violation claimed for λ = ({l0}, {l1})");
        assert!(
            (rec.rhs - rec.max_lhs).abs() <= 1e-12 || rec.rhs > rec.max_lhs,
            "λ=({l0},{l1}): search max {} vs analytic {}",
            rec.max_lhs,
            rec.rhs
        );
        // the sweep includes both simplex vertices, so it attains the bound
        assert!((rec.rhs - rec.max_lhs).abs() <= 1e-12);
        checked += 1;
    }
    pass(
        4,
        "on/off no-go",
        &format!("{checked} λ pairs, zero violations on the 1e-3 simplex sweep"),
        started,
        5.0,
    );
}

#[test]
fn criterion_5_bhd_k_threshold_and_fig3_signs() {
    let started = Instant::now();
    let grid = GridSpec::default();
    let fock3 = QuantumState::Fock { n: 3 };
    let own = TestFunction::QuadratureDensity {
        reference: fock3.clone(),
    };
    let mut k_first_violation = None;
    for k in 1..=7u32 {
        let model = PovmModel::bhd_equispaced(k, 0.0);
        let rep = evaluate_witness(&fock3, &model, &own, 0.0, &grid).unwrap();
        if k <= 6 {
            assert!(!rep.violated, "K={k} should not violate: {rep:?}");
        } else {
            assert!(rep.violated, "K=7 should violate: {rep:?}");
        }
        if rep.violated && k_first_violation.is_none() {
            k_first_violation = Some(k);
        }
    }
    assert_eq!(k_first_violation, Some(7));

    // Fig. 3 sign structure at K = 7 (magnitudes are not targets)
    let mut rv_eta1 = Vec::new();
    let mut rv_eta08 = Vec::new();
    let att = QuantumState::AttenuatedFock { n: 3, eta: 0.8 };
    let own08 = TestFunction::QuadratureDensity { reference: att.clone() };
    for i in 0..=8 {
        let s = i as f64 / 8.0;
        let model = PovmModel::bhd_equispaced(7, s);
        rv_eta1.push(
            evaluate_witness(&fock3, &model, &own, s, &grid)
                .unwrap()
                .relative_violation,
        );
        rv_eta08.push(
            evaluate_witness(&att, &model, &own08, s, &grid)
                .unwrap()
                .relative_violation,
        );
    }
    assert!(rv_eta1[0] > 0.0, "η=1 must violate at s=0: {rv_eta1:?}");
    assert!(
        rv_eta08[0] < 0.0 && *rv_eta08.last().unwrap() > 0.0,
        "η=0.8 must cross zero on [0,1]: {rv_eta08:?}"
    );
    let crossing = rv_eta08.windows(2).any(|w| w[0] <= 0.0 && w[1] > 0.0);
    assert!(crossing);
    pass(
        5,
        "bhd K-threshold",
        &format!(
            "first violating K=7; rv(s=0, η=1)={:.4} > 0; η=0.8 crosses zero",
            rv_eta1[0]
        ),
        started,
        60.0,
    );
}

#[test]
fn criterion_6_ephd_closed_forms_vs_oracles() {
    let started = Instant::now();
    let eta = 0.8;
    let state = QuantumState::AttenuatedFock { n: 1, eta };
    let sup_grid = GridSpec {
        radius: 6.0,
        points_per_axis: 201,
        refinement_tolerance: 1e-12,
        ..GridSpec::default()
    };
    let mut max_lhs_err = 0.0f64;
    let mut max_rhs_err = 0.0f64;
    for i in 0..20 {
        let s_prime = -0.9 + 1.8 * i as f64 / 19.0;
        let closed_lhs = ephd::lhs_closed(eta, s_prime).unwrap();
        // independent 2-D quadrature oracle for ∫ d²α₀ Q(α₀) P(α₀; s')
        let st = state.clone();
        let oracle_lhs = kernel::quadrature_2d(
            move |a0| st.quasiprob(a0, -1.0).unwrap() * st.quasiprob(a0, s_prime).unwrap(),
            6.0,
            1e-9,
        )
        .unwrap()
        .value;
        max_lhs_err = max_lhs_err.max((closed_lhs - oracle_lhs).abs());
        for j in 0..20 {
            let s = -0.9 + 1.8 * j as f64 / 19.0;
            let (closed_rhs, _) = ephd::rhs_closed(eta, s, s_prime).unwrap();
            let sigma = s_prime - s - 1.0;
            let st = state.clone();
            let oracle_rhs = kernel::supremum_radial(
                move |r| st.quasiprob(c(r, 0.0), sigma).unwrap(),
                &sup_grid,
            )
            .unwrap()
            .value;
            max_rhs_err = max_rhs_err.max((closed_rhs - oracle_rhs).abs());
        }
    }
    assert!(max_lhs_err <= 1e-6, "lhs closed-form error {max_lhs_err}");
    assert!(max_rhs_err <= 1e-6, "rhs closed-form error {max_rhs_err}");

    // Fig. 4 sign structure: zero crossing with positive violation above it
    let mut rvs = Vec::new();
    for i in 0..=40 {
        let s = -1.0 + 2.0 * i as f64 / 40.0;
        rvs.push(ephd::witness_closed(eta, s, 0.0).unwrap().relative_violation);
    }
    assert!(rvs[0] < 0.0 && *rvs.last().unwrap() > 0.0, "{rvs:?}");
    let crossing_idx = rvs.iter().position(|v| *v > 0.0).unwrap();
    assert!(rvs[crossing_idx..].iter().all(|v| *v > 0.0));
    pass(
        6,
        "ephd closed forms",
        &format!(
            "20x20 sweep: max |lhs err|={max_lhs_err:.2e}, max |rhs err|={max_rhs_err:.2e}; Fig.4 crossing at s≈{:.2}",
            -1.0 + 2.0 * crossing_idx as f64 / 40.0
        ),
        started,
        60.0,
    );
}

#[test]
fn criterion_7_representation_invariance() {
    let started = Instant::now();
    let mut rng = ChaCha12Rng::seed_from_u64(2026_08_10);
    let mut max_dev = 0.0f64;
    for trial in 0..20 {
        let state = match rng.random_range(0..6) {
            0 => QuantumState::Vacuum,
            1 => QuantumState::Coherent {
                alpha0: c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)),
            },
            2 => QuantumState::Fock {
                n: rng.random_range(0..4),
            },
            3 => QuantumState::AttenuatedFock {
                n: rng.random_range(1..4),
                eta: rng.random_range(0.3..0.95),
            },
            4 => QuantumState::SqueezedVacuum {
                r: rng.random_range(0.2..0.9),
                eta: rng.random_range(0.3..0.95),
            },
            _ => QuantumState::EvenCat {
                alpha0: c(rng.random_range(0.5..1.5), 0.0),
                eta: rng.random_range(0.4..1.0),
            },
        };
        let scheme = rng.random_range(0..5);
        let (model, outcome, setting) = match scheme {
            0 => (PovmModel::Pnr, Outcome::Count(rng.random_range(0..4)), Setting::None),
            1 => (
                PovmModel::Click { detectors: 10 },
                Outcome::Count(rng.random_range(0..5)),
                Setting::None,
            ),
            2 => (PovmModel::OnOff, Outcome::Count(rng.random_range(0..2)), Setting::None),
            3 => {
                let g = c(rng.random_range(-0.5..0.5), rng.random_range(-0.5..0.5));
                (
                    PovmModel::Uhd {
                        displacements: vec![g],
                    },
                    Outcome::Count(rng.random_range(0..2)),
                    Setting::Displacement(g),
                )
            }
            _ => (
                PovmModel::Ephd { s: 0.0 },
                Outcome::Amplitude(c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
                Setting::None,
            ),
        };
        let hi = (0.45f64).min(state.max_regular_s() - 0.35);
        let s1 = rng.random_range(-0.8..hi);
        let s2 = rng.random_range(-0.8..hi);
        let p1 =
            povm::born_probability_quadrature(&state, &model, &outcome, &setting, s1, 8.0, 1e-9)
                .unwrap();
        let p2 =
            povm::born_probability_quadrature(&state, &model, &outcome, &setting, s2, 8.0, 1e-9)
                .unwrap();
        max_dev = max_dev.max((p1 - p2).abs());
        assert!(
            (p1 - p2).abs() <= 1e-6,
            "trial {trial}: {state:?} / {model:?} {outcome:?}: P(s={s1}) = {p1} vs P(s={s2}) = {p2}"
        );
    }
    // ordering-convolution smoothing consistency for every catalog state
    let catalog = [
        QuantumState::Vacuum,
        QuantumState::Coherent { alpha0: c(0.8, -0.4) },
        QuantumState::Fock { n: 2 },
        QuantumState::AttenuatedFock { n: 3, eta: 0.7 },
        QuantumState::SqueezedVacuum { r: 0.7, eta: 0.6 },
        QuantumState::EvenCat { alpha0: c(1.0, 0.0), eta: 0.8 },
    ];
    let mut max_conv_dev = 0.0f64;
    for state in catalog {
        let s_from = (state.max_regular_s() - 0.6).min(0.2);
        let s_to = s_from - 0.9;
        for alpha in [c(0.0, 0.0), c(0.7, -0.5)] {
            let st = state.clone();
            let smoothed = kernel::gaussian_convolve(
                move |g| st.quasiprob(g, s_from).unwrap(),
                s_from,
                s_to,
                alpha,
                1e-9,
            )
            .unwrap()
            .value;
            let direct = state.quasiprob(alpha, s_to).unwrap();
            max_conv_dev = max_conv_dev.max((smoothed - direct).abs());
            assert!(
                (smoothed - direct).abs() <= 1e-6,
                "{state:?} at {alpha}: {smoothed} vs {direct}"
            );
        }
    }
    pass(
        7,
        "representation invariance",
        &format!(
            "20 randomized born pairs, max |ΔP| = {max_dev:.2e}; convolution consistency max dev {max_conv_dev:.2e}"
        ),
        started,
        60.0,
    );
}

#[test]
fn criterion_8_lp_suite() {
    let started = Instant::now();
    // CHSH local bound: brute force over the 16 deterministic strategies
    // (independent oracle) vs the incidence-matrix bound
    let mut brute = f64::NEG_INFINITY;
    for fa0 in [1.0f64, -1.0] {
        for fa1 in [1.0f64, -1.0] {
            for fb0 in [1.0f64, -1.0] {
                for fb1 in [1.0f64, -1.0] {
                    brute = brute.max(fa0 * fb0 + fa0 * fb1 + fa1 * fb0 - fa1 * fb1);
                }
            }
        }
    }
    assert!((brute - 2.0).abs() <= 1e-12);
    let scenario = lp::chsh_scenario();
    let bound = scenario.sup_over_strategies(&lp::chsh_functional());
    assert!((bound - 2.0).abs() <= 1e-9, "incidence bound {bound}");

    // Tsirelson-point statistics: infeasible, with a certificate dominating
    // the CHSH gap after identical normalization
    let tsirelson = scenario
        .clone()
        .with_probabilities(lp::chsh_probabilities(lp::tsirelson_correlations()))
        .unwrap();
    match tsirelson.primal_feasible(lp::FEASIBILITY_EPSILON).unwrap() {
        Feasibility::Infeasible { certificate } => assert!(certificate.valid),
        other => panic!("Tsirelson point must be infeasible, got {other:?}"),
    }
    let cert = tsirelson.find_optimal_lambda().unwrap();
    let normalized = cert.lhs / cert.rhs_grid;
    assert!(
        normalized >= std::f64::consts::SQRT_2 - 1e-9,
        "LP optimum {normalized} below the CHSH ratio √2"
    );
    // the recovered local bound: rescale λ* to the quantum value 2√2; its
    // strategy bound is then the CHSH local bound 2
    let recovered = 2.0 * std::f64::consts::SQRT_2 / cert.lhs * cert.rhs_grid;
    assert!(
        (recovered - 2.0).abs() <= 1e-9,
        "recovered local bound {recovered}"
    );

    // UHD phase-space LP: infeasible, optimal λ dominates the hand-picked one
    let (state, model, lambda_hand) = uhd_paper_setup();
    let columns = GridSpec {
        radius: 5.0,
        points_per_axis: 81,
        ..GridSpec::default()
    };
    let ps = PhaseSpaceLP::build(&state, &model, 1.0, &columns).unwrap();
    match ps
        .primal_feasible(lp::FEASIBILITY_EPSILON, &GridSpec::default())
        .unwrap()
    {
        Feasibility::Infeasible { .. } => {}
        other => panic!("UHD instance must be infeasible, got {other:?}"),
    }
    let cert = ps.find_optimal_lambda(&GridSpec::default()).unwrap();
    assert!(cert.valid);
    let (lhs_hand, _) = lhs_expectation(&state, &model, &lambda_hand).unwrap();
    let rhs_hand = rhs_bound(&model, &lambda_hand, 1.0, &GridSpec::default())
        .unwrap()
        .value;
    // hand λ has entries in [-2, 1]; scaled by 1/2 it is box-feasible, so the
    // LP optimum must dominate half its absolute gap
    let gap_hand_box = 0.5 * (lhs_hand - rhs_hand);
    assert!(
        cert.gap >= gap_hand_box - 1e-6,
        "LP gap {} below the hand-picked λ gap {gap_hand_box}",
        cert.gap
    );

    // coherent (and vacuum) inputs are always primal-feasible; amplitudes on
    // the lattice reproduce exactly (their P function is a point mass there)
    for state in [
        QuantumState::Vacuum,
        QuantumState::Coherent { alpha0: c(0.5, 0.0) },
        QuantumState::Coherent { alpha0: c(-0.25, 0.375) },
    ] {
        let ps = PhaseSpaceLP::build(&state, &model, 1.0, &columns).unwrap();
        match ps
            .primal_feasible(lp::FEASIBILITY_EPSILON, &GridSpec::default())
            .unwrap()
        {
            Feasibility::Feasible { max_residual, .. } => {
                assert!(max_residual <= lp::FEASIBILITY_EPSILON)
            }
            other => panic!("{state:?} must be feasible, got {other:?}"),
        }
    }
    // off-lattice coherent amplitudes are a discretization artifact: the
    // grid cannot place their delta exactly, but the continuum guard must
    // refuse to certify them nonclassical
    let off = QuantumState::Coherent { alpha0: c(-0.3, 0.4) };
    let ps = PhaseSpaceLP::build(&off, &model, 1.0, &columns).unwrap();
    match ps
        .primal_feasible(lp::FEASIBILITY_EPSILON, &GridSpec::default())
        .unwrap()
    {
        Feasibility::Infeasible { certificate } => {
            panic!("classical state certified nonclassical: {certificate:?}")
        }
        Feasibility::Inconclusive { t_star, .. } => {
            assert!(t_star < 1e-3, "residual {t_star} too large for a grid artifact")
        }
        Feasibility::Feasible { .. } => {}
    }
    pass(
        8,
        "lp suite",
        &format!(
            "CHSH bound 2 (brute force + incidence); Tsirelson infeasible, recovered bound {recovered:.9}; UHD gap {:.5} ≥ hand {:.5}; coherent feasible",
            cert.gap, gap_hand_box
        ),
        started,
        120.0,
    );
}

#[test]
fn criterion_9_monte_carlo_estimator() {
    let started = Instant::now();
    let lambda = TestFunction::PhotocountExp { t: 7.0, g: 0.2 };
    let det = CountingDetector::Click { detectors: 10 };
    let model = PovmModel::Click { detectors: 10 };
    let m = 100_000;
    let mut detail = String::new();
    for (tag, state) in [
        ("svs", QuantumState::SqueezedVacuum { r: 0.7, eta: 0.6 }),
        ("cat", QuantumState::EvenCat { alpha0: c(1.0, 0.0), eta: 0.6 }),
    ] {
        let (exact, _) = lhs_expectation(&state, &model, &lambda).unwrap();
        let mut hits = 0;
        for rep in 0..100u64 {
            let samples =
                witness::sample_photocounts(&state, &det, m, 0x9e37_79b9 + rep).unwrap();
            let est = witness::mc_lhs(&samples, &lambda).unwrap();
            if (est.estimate - exact).abs() <= 4.0 * est.std_error {
                hits += 1;
            }
        }
        assert!(hits >= 99, "{tag}: only {hits}/100 runs within 4 std errors");
        detail.push_str(&format!("{tag}: {hits}/100 within 4σ of {exact:.4}; "));
    }
    pass(9, "monte carlo estimator", detail.trim_end(), started, 120.0);
}
