//! Fenchel-Young sweeps, analytic/numeric polar agreement and the duality
//! identity `min_p g_bar(s, x, z, p) = -G(s, x, theta) - theta z`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use riskmin_convex::{numeric_polar, polar, search, subdifferential_test, ConstraintSet};
use riskmin_generators::{constant_aversion, effective_generator, GeneratorFamily, GeneratorSpec};
use riskmin_market::MarketModel;

fn spec_for(family: GeneratorFamily, aversion: f64) -> GeneratorSpec {
    match family {
        GeneratorFamily::Case1Sqrt => GeneratorSpec::case1(constant_aversion(aversion)),
        GeneratorFamily::Case2Logistic => GeneratorSpec::case2(constant_aversion(aversion)),
        GeneratorFamily::Case3Huber => GeneratorSpec::case3(constant_aversion(aversion)),
        GeneratorFamily::Avar => GeneratorSpec::avar(aversion).unwrap(),
        GeneratorFamily::EntropicQuadratic => GeneratorSpec::entropic(constant_aversion(aversion)),
    }
}

/// Sample a `mu` inside the finite domain of the family's polar.
fn sample_mu(rng: &mut ChaCha8Rng, family: GeneratorFamily, aversion: f64) -> f64 {
    match family {
        GeneratorFamily::Case1Sqrt => aversion * rng.random_range(-0.999..0.999),
        GeneratorFamily::Case2Logistic => aversion * rng.random_range(0.001..0.999),
        GeneratorFamily::Case3Huber => rng.random_range(-1.0..1.0),
        GeneratorFamily::Avar => {
            let bound = if aversion < 0.5 {
                1.0
            } else {
                (1.0 - aversion) / aversion
            };
            rng.random_range(-bound..0.0)
        }
        GeneratorFamily::EntropicQuadratic => rng.random_range(-10.0..10.0),
    }
}

const FAMILIES: [(GeneratorFamily, f64); 6] = [
    (GeneratorFamily::Case1Sqrt, 0.7),
    (GeneratorFamily::Case2Logistic, 0.6),
    (GeneratorFamily::Case3Huber, 2.0),
    (GeneratorFamily::Avar, 0.3),
    (GeneratorFamily::Avar, 0.8),
    (GeneratorFamily::EntropicQuadratic, 1.5),
];

#[test]
fn fenchel_young_inequality_on_random_samples() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for &(family, aversion) in &FAMILIES {
        let spec = spec_for(family, aversion);
        for _ in 0..10_000 {
            let mu = sample_mu(&mut rng, family, aversion);
            let r = rng.random_range(-20.0..20.0);
            let g = polar(&spec, 0.0, 0.0, 0.0, mu).unwrap();
            assert!(g.finite, "{family:?} should be finite at {mu}");
            let lhs = -mu * r - spec.evaluate(0.0, 0.0, 0.0, r).unwrap();
            assert!(
                lhs <= g.value + 1e-9,
                "{family:?}: Fenchel-Young violated at mu={mu}, r={r}: {lhs} > {}",
                g.value
            );
        }
    }
}

#[test]
fn analytic_and_numeric_polars_agree() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for &(family, aversion) in &FAMILIES {
        let spec = spec_for(family, aversion);
        for _ in 0..60 {
            let mu = sample_mu(&mut rng, family, aversion);
            let analytic = polar(&spec, 0.0, 0.0, 0.0, mu).unwrap();
            let numeric = numeric_polar(&spec, 0.0, 0.0, 0.0, mu).unwrap();
            if analytic.finite && numeric.finite {
                assert!(
                    (analytic.value - numeric.value).abs() < 1e-7,
                    "{family:?} at mu={mu}: {} vs {}",
                    analytic.value,
                    numeric.value,
                );
            }
        }
    }
}

#[test]
fn polar_optimizer_passes_the_subdifferential_test() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    for &(family, aversion) in &FAMILIES {
        let spec = spec_for(family, aversion);
        for _ in 0..200 {
            let mu = sample_mu(&mut rng, family, aversion);
            let g = polar(&spec, 0.0, 0.0, 0.0, mu).unwrap();
            if let Some(r_bar) = g.optimizer {
                assert!(
                    subdifferential_test(&spec, 0.0, 0.0, 0.0, mu, r_bar, 1e-9).unwrap(),
                    "{family:?}: optimizer {r_bar} rejected at mu={mu}"
                );
            }
        }
    }
}

#[test]
fn duality_ties_the_pointwise_minimum_to_the_polar() {
    // min_p g_bar(s, x, z, p) computed by independent bracketing +
    // golden-section over p must equal -G(theta, aversion) - theta z.
    // The avar polar is kept on its stated domain [-L, 0], so avar theta
    // samples are negative (a negative appreciation rate).
    let mut rng = ChaCha8Rng::seed_from_u64(5150);
    for &(family, aversion) in &FAMILIES {
        let spec = spec_for(family, aversion);
        for _ in 0..40 {
            let theta = sample_mu(&mut rng, family, aversion) * 0.9;
            let z = rng.random_range(-2.0..2.0);
            let model = MarketModel::gaussian(0.0, 1.0, theta * 0.2, 0.2);
            let g = polar(&spec, 0.0, 0.0, 0.0, theta).unwrap();
            if !g.finite {
                continue;
            }
            let objective =
                |p: f64| effective_generator(&spec, &model, 0.0, 0.0, 0.0, z, p).unwrap();
            let (lo, hi) = search::bracket_min(objective, z, 1.0, 1e9, 1e-12)
                .unwrap_or_else(|_| panic!("{family:?} unbounded at theta={theta}"));
            let min = search::golden_min_polished(objective, lo, hi, 1e-9 * (1.0 + z.abs()));
            let dual = -g.value - theta * z;
            assert!(
                (min.value - dual).abs() < 1e-7,
                "{family:?}: min {} vs dual {} at theta={theta}, z={z}",
                min.value,
                dual
            );
        }
    }
}

#[test]
fn projection_is_idempotent_and_non_expansive() {
    let sets = [
        ConstraintSet::WholeLine,
        ConstraintSet::NonNegative,
        ConstraintSet::interval(-0.5, 1.25).unwrap(),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for set in &sets {
        for _ in 0..2_000 {
            let a = rng.random_range(-10.0..10.0);
            let b = rng.random_range(-10.0..10.0);
            let (pa, da) = set.project(a);
            let (paa, _) = set.project(pa);
            assert_eq!(pa, paa);
            assert!(da >= 0.0);
            let (pb, _) = set.project(b);
            assert!((pa - pb).abs() <= (a - b).abs() + 1e-15);
        }
    }
}
