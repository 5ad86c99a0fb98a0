mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{random_projective, random_states};
use infocorr::hierarchy::*;
use infocorr::model::{Prior, Scenario, Witness};
use infocorr::quantum::*;
use infocorr::rational::ratio;
use infocorr::Error;

fn biased_prior() -> Prior {
    Prior::new(vec![ratio(2, 5), ratio(2, 5), ratio(1, 5)]).unwrap()
}

struct Ops {
    states: Vec<CMatrix>,
    sigma: CMatrix,
    proj: Vec<Vec<CMatrix>>,
}

impl Ops {
    fn trace(&self, w: &Word) -> f64 {
        let d = self.sigma.nrows();
        let mut m = CMatrix::identity(d, d);
        for sym in &w.0 {
            m = match *sym {
                Sym::Rho(x) => m * &self.states[x],
                Sym::Sigma => m * &self.sigma,
                Sym::M { y, b } => m * &self.proj[y][b],
            };
        }
        m.trace().re
    }
}

fn diagonal(v: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&a| C64::new(a, 0.0))))
}

/// Operators obeying the algebra of `mode`: projective measurements, pure
/// states in pure mode, simultaneously diagonal operators in commuting mode.
fn operators(rng: &mut impl Rng, s: Scenario, mode: Mode, d: usize) -> Ops {
    match mode {
        Mode::Commuting => {
            let states = (0..s.n_x)
                .map(|_| {
                    let w: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
                    let t: f64 = w.iter().sum();
                    diagonal(&w.iter().map(|v| v / t).collect::<Vec<_>>())
                })
                .collect();
            let sigma = diagonal(&(0..d).map(|_| rng.random_range(-1.0..1.0)).collect::<Vec<_>>());
            let proj = (0..s.n_y)
                .map(|_| {
                    let mut p = vec![vec![0.0; d]; s.n_b];
                    for k in 0..d {
                        p[rng.random_range(0..s.n_b)][k] = 1.0;
                    }
                    p.iter().map(|v| diagonal(v)).collect()
                })
                .collect();
            Ops { states, sigma, proj }
        }
        _ => {
            let states = random_states(rng, s.n_x, d, mode == Mode::General);
            let h = random_states(rng, 2, d, true);
            Ops { states, sigma: &h[0] - &h[1] * C64::new(0.5, 0.0), proj: random_projective(rng, d, s.n_y, s.n_b) }
        }
    }
}

fn random_word(rng: &mut impl Rng, s: Scenario, len: usize) -> Word {
    // includes the last outcome, which canonical forms expand away
    Word(
        (0..len)
            .map(|_| match rng.random_range(0..3) {
                0 => Sym::Rho(rng.random_range(0..s.n_x)),
                1 => Sym::Sigma,
                _ => Sym::M { y: rng.random_range(0..s.n_y), b: rng.random_range(0..s.n_b) },
            })
            .collect(),
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn canonical_forms_preserve_the_trace(seed in 0u64..10_000, len in 0usize..7, m in 0usize..3, sc in 0usize..2) {
        let mode = [Mode::General, Mode::Pure, Mode::Commuting][m];
        let s = if sc == 0 { Scenario::new(3, 2, 2) } else { Scenario::new(2, 2, 3) }.unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ops = operators(&mut rng, s, mode, 3);
        let w = random_word(&mut rng, s, len);
        let poly = canonicalize(&w, s, mode);
        let direct = ops.trace(&w);
        let expanded: f64 = poly.iter().map(|(u, c)| c * ops.trace(u)).sum();
        prop_assert!((direct - expanded).abs() < 1e-9, "{w}: {direct} vs {expanded}");
        for u in poly.keys() {
            let again = canonicalize(u, s, mode);
            prop_assert_eq!(again.len(), 1);
            prop_assert_eq!(again.get(u), Some(&1.0));
        }
    }

    #[test]
    fn trace_classes_are_invariant_under_rotation_and_reversal(seed in 0u64..10_000, len in 1usize..7, r in 0usize..7) {
        let s = Scenario::new(3, 2, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = random_word(&mut rng, s, len);
        let mut rotated = w.0.clone();
        rotated.rotate_left(r % len);
        prop_assert_eq!(trace_class(&w, Mode::General), trace_class(&Word(rotated), Mode::General));
        prop_assert_eq!(trace_class(&w, Mode::General), trace_class(&w.adjoint(), Mode::General));
    }
}

#[test]
fn explicit_strategies_are_feasible_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let w = Witness::a322();
    let s = w.scenario();
    for (mode, level) in [(Mode::General, 2), (Mode::Pure, 2), (Mode::General, 3)] {
        for _ in 0..6 {
            let d = rng.random_range(2..4);
            let prior = biased_prior();
            let states = random_states(&mut rng, s.n_x, d, mode == Mode::General);
            let e = Ensemble::new(states.clone(), prior.clone()).unwrap();
            let guess = guessing_probability(&e).unwrap();
            let proj = random_projective(&mut rng, d, s.n_y, s.n_b);
            let mp = build_moment_problem(&w, &prior, guess.value, &HierarchyConfig::new(mode, level)).unwrap();
            let x = mp.trace_moments(&states, &guess.sigma, &proj);
            for m in mp.block_min_eigenvalues(&x) {
                assert!(m > -1e-7, "{mode} level {level}: {m}");
            }
            let p = born_behavior(&e, &MeasurementSet::new(proj).unwrap()).unwrap();
            assert!((mp.witness.eval(&x) - w.evaluate(&p).unwrap()).abs() < 1e-9);
            assert!(mp.sigma_trace.eval(&x) <= guess.value + 1e-9);
            for t in &mp.state_traces {
                assert!((t.eval(&x) - 1.0).abs() < 1e-9);
            }
        }
    }
}

#[test]
fn bounds_tighten_with_level_and_mode() {
    let prior = biased_prior();
    let w = Witness::a322();
    let l1 = upper_bound(&w, &prior, 0.8, &HierarchyConfig::new(Mode::General, 1)).unwrap().value;
    let l2 = upper_bound(&w, &prior, 0.8, &HierarchyConfig::new(Mode::General, 2)).unwrap().value;
    let pure = upper_bound(&w, &prior, 0.8, &HierarchyConfig::new(Mode::Pure, 2)).unwrap().value;
    let comm = upper_bound(&w, &prior, 0.8, &HierarchyConfig::new(Mode::Commuting, 2)).unwrap().value;
    assert!(l2 <= l1 + 1e-6, "{l2} > {l1}");
    assert!(pure <= l2 + 1e-6, "{pure} > {l2}");
    // commuting words identify more moments but keep mixed states
    assert!(comm <= l2 + 1e-5, "{comm} > {l2}");
    // the qutrit fixture is a valid strategy at this G
    assert!(l2 >= 4.0 - 1e-6);

    let rac = Witness::rac();
    let u4 = Prior::uniform(4);
    let r1 = upper_bound(&rac, &u4, 0.5, &HierarchyConfig::new(Mode::General, 1)).unwrap().value;
    let r2 = upper_bound(&rac, &u4, 0.5, &HierarchyConfig::new(Mode::General, 2)).unwrap().value;
    assert!(r2 <= r1 + 1e-6);
    assert!((r2 - 0.5f64.sqrt()).abs() < 5e-4, "{r2}");
}

#[test]
fn bound_is_monotone_in_g() {
    let w = Witness::a322();
    let u3 = Prior::uniform(3);
    let cfg = HierarchyConfig::new(Mode::General, 2);
    let vals: Vec<f64> = [0.4, 0.55, 0.7, 0.85].iter().map(|&g| upper_bound(&w, &u3, g, &cfg).unwrap().value).collect();
    assert!(vals.windows(2).all(|p| p[1] >= p[0] - 1e-6), "{vals:?}");
}

#[test]
fn classical_bound_matches_the_facet_at_level_three() {
    let r = classical_bound(&Witness::a322(), &Prior::uniform(3), 2.0 / 3.0, 3).unwrap();
    // 6G - 1 from the first nontrivial facet
    assert!((r.value - 3.0).abs() < 1e-4, "{}", r.value);
}

#[test]
fn zero_witness_bounds_to_zero() {
    let s = Scenario::new(3, 2, 2).unwrap();
    for mode in [Mode::General, Mode::Pure, Mode::Commuting] {
        let r = upper_bound(&Witness::zero(s), &Prior::uniform(3), 0.5, &HierarchyConfig::new(mode, 1)).unwrap();
        assert!(r.value.abs() < 1e-7, "{mode}: {}", r.value);
    }
}

#[test]
fn randomness_without_pin_is_zero() {
    let cfg = HierarchyConfig::new(Mode::General, 1);
    let r = solve_randomness_bound(&Witness::a322(), None, &Prior::uniform(3), 0.5, (2, 0), &cfg, DEFAULT_PIN_TOL)
        .unwrap();
    assert!((r.p_star - 1.0).abs() < 1e-6);
    assert!(r.h_min < 1e-6);
    let bad = solve_randomness_bound(&Witness::a322(), None, &Prior::uniform(3), 0.5, (3, 0), &cfg, DEFAULT_PIN_TOL);
    assert!(matches!(bad, Err(Error::OutOfRange(_))));
}

#[test]
fn pin_above_the_bound_is_infeasible() {
    // level 2 caps the witness at 5 for every G
    let cfg = HierarchyConfig::new(Mode::General, 2);
    let r = solve_randomness_bound(&Witness::a322(), Some(5.5), &Prior::uniform(3), 0.5, (2, 0), &cfg, DEFAULT_PIN_TOL);
    assert!(matches!(r, Err(Error::Infeasible(_))), "{r:?}");
}

#[test]
fn certification_edge_cases() {
    let w = Witness::a322();
    let u3 = Prior::uniform(3);
    let cfg = HierarchyConfig::new(Mode::General, 2);
    let at_floor = upper_bound(&w, &u3, 1.0 / 3.0, &cfg).unwrap().value;
    let c = certify_info(&w, &u3, at_floor - 1e-6, 0.0, &cfg, &CertifyOptions::default()).unwrap();
    assert_eq!(c.central.alpha, 0.0);
    let too_high = certify_info(&w, &u3, 5.5, 0.1, &cfg, &CertifyOptions::default());
    assert!(matches!(too_high, Err(Error::Infeasible(_))));

    // the bracket ends straddle the target
    let c = certify_info(&w, &u3, 4.0, 0.2, &cfg, &CertifyOptions { with_upper: true, ..Default::default() }).unwrap();
    for b in [Some(c.central), Some(c.lower), c.upper].into_iter().flatten() {
        let below = c.evaluations.iter().find(|e| e.g == b.g_low).unwrap();
        let above = c.evaluations.iter().find(|e| e.g == b.g_high).unwrap();
        assert!(below.value < b.target && above.value >= b.target);
        assert!(b.g_high.log2() - b.g_low.log2() <= 0.01 + 1e-12);
    }
    assert!(c.lower.alpha <= c.central.alpha && c.central.alpha <= c.upper.unwrap().alpha);
}
