mod common;

use std::collections::BTreeSet;

use num_integer::binomial;
use pseudosplit::fan::{
    apply_morphism, barycentric_subdivision, enumerate_points, full_support_points, height,
    height_bound_m, iterated_barycentric, pullback_point, pulls_back_to_single_ray,
    star_subdivision, validate_smooth_fan, Cone, FanMorphism, FanPoint, SmoothKatoFan, Subdivision,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_star(f: &SmoothKatoFan, rng: &mut impl Rng) -> Option<Subdivision> {
    let cones: Vec<Cone> = f.faces().iter().filter(|c| c.dim() >= 2).cloned().collect();
    cones.choose(rng).map(|c| star_subdivision(f, c).unwrap())
}

#[test]
fn subdivisions_stay_smooth_and_keep_vectors() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for f in common::random_fans(40, 1) {
        let mut subs = vec![barycentric_subdivision(&f).unwrap()];
        subs.extend(random_star(&f, &mut rng));
        for s in subs {
            assert!(validate_smooth_fan(&s.refined).is_valid());
            for r in 0..s.refined.rays().len() {
                assert_eq!(s.base.vector(s.structure.ray_image(r)), s.refined.ray(r));
            }
            for q in enumerate_points(&s.refined, 3) {
                assert_eq!(
                    s.base.vector(&s.pushforward(&q).unwrap()),
                    s.refined.vector(&q)
                );
            }
        }
    }
}

#[test]
fn pullback_is_a_section_and_injective() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for f in common::random_fans(25, 2) {
        let mut subs = vec![iterated_barycentric(&f, 2).unwrap()];
        subs.extend(random_star(&f, &mut rng));
        for s in subs {
            let mut seen = BTreeSet::new();
            for p in enumerate_points(&f, 6) {
                let q = pullback_point(&s, &p).unwrap();
                assert_eq!(s.pushforward(&q).unwrap(), p);
                assert!(seen.insert(q));
            }
        }
    }
}

#[test]
fn single_ray_pullback_up_to_three() {
    for f in common::random_fans(20, 3) {
        for m in 1..=3u32 {
            let s = iterated_barycentric(&f, m).unwrap();
            for p in enumerate_points(&f, m as u64) {
                assert!(
                    pulls_back_to_single_ray(&s, &p).unwrap(),
                    "{p:?} at m = {m}"
                );
            }
        }
    }
}

#[test]
fn point_counts_match_binomials() {
    for f in common::random_fans(30, 4) {
        assert_eq!(enumerate_points(&f, 0), vec![FanPoint::zero()]);
        for m in 1..=4u64 {
            let expected: u64 = f.faces().iter().map(|c| binomial(m, c.dim() as u64)).sum();
            let pts = enumerate_points(&f, m);
            assert_eq!(pts.len() as u64, expected);
            assert!(pts.windows(2).all(|w| height(&w[0]) <= height(&w[1])));
        }
    }
}

/// A morphism into `Spec N^k` with every ray sent to a nonzero point.
fn random_morphism(f: &SmoothKatoFan, rng: &mut impl Rng) -> FanMorphism {
    let k = rng.gen_range(1..=3);
    let images = (0..f.rays().len())
        .map(|_| loop {
            let p = FanPoint::normalized((0..k).map(|i| (i, rng.gen_range(0..=2))));
            if !p.is_zero() {
                break p;
            }
        })
        .collect();
    FanMorphism::from_ray_images(f.clone(), SmoothKatoFan::affine(k), images).unwrap()
}

const CAP: u64 = 6;

/// `m_t` by listing every image of height at most `CAP`.
fn brute_m_t(phi: &FanMorphism, t: &Cone) -> u64 {
    let image: BTreeSet<FanPoint> = enumerate_points(phi.source(), CAP)
        .iter()
        .map(|a| apply_morphism(phi, a).unwrap())
        .filter(|r| height(r) <= CAP)
        .collect();
    (t.dim() as u64..=CAP)
        .find(|&h| full_support_points(t, h).iter().any(|r| !image.contains(r)))
        .unwrap_or(0)
}

#[test]
fn height_bound_matches_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    for f in common::random_fans(30, 5) {
        let phi = random_morphism(&f, &mut rng);
        let hb = height_bound_m(&phi, CAP).unwrap();
        for t in &hb.targets {
            assert_eq!(t.m_t, brute_m_t(&phi, &t.cone), "target {}", t.cone);
        }
        for s in &hb.sources {
            let least = (s.source.dim() as u64..=s.m_st + 2)
                .flat_map(|h| full_support_points(&s.source, h))
                .map(|a| height(&apply_morphism(&phi, &a).unwrap()))
                .min()
                .unwrap();
            assert_eq!(s.m_st, least, "source {}", s.source);
        }
    }
}

#[test]
fn refining_the_source_never_raises_m_t() {
    let mut rng = ChaCha8Rng::seed_from_u64(14);
    for f in common::random_fans(30, 6) {
        let phi = random_morphism(&f, &mut rng);
        let Some(s) = random_star(&f, &mut rng) else {
            continue;
        };
        let refined = phi.after(&s.structure).unwrap();
        let before = height_bound_m(&phi, CAP).unwrap();
        let after = height_bound_m(&refined, CAP).unwrap();
        for (a, b) in after.targets.iter().zip(&before.targets) {
            assert_eq!(a.cone, b.cone);
            assert!(a.m_t <= b.m_t, "{}: {} > {}", a.cone, a.m_t, b.m_t);
        }
    }
}
