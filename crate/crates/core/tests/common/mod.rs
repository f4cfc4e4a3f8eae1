#![allow(dead_code)]

use std::path::PathBuf;

use pseudosplit::fan::{star_subdivision, validate_smooth_fan, Cone, SmoothKatoFan};
use pseudosplit::perm::{Permutation, PermutationGroup};
use pseudosplit::problem::{parse_problem_file, Config, Problem};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

pub fn load_fixture(name: &str) -> Problem {
    parse_problem_file(&fixture(name), &Config::default()).expect("fixture loads")
}

/// The fixture groups, all of order at most 24.
pub fn fixture_groups() -> Vec<(String, PermutationGroup)> {
    load_fixture("groups.json").groups.into_iter().collect()
}

pub fn perm(v: &[usize]) -> Permutation {
    Permutation::new(v.to_vec()).unwrap()
}

type Template = (usize, Vec<Vec<i64>>, Vec<Vec<usize>>);

fn templates() -> Vec<Template> {
    vec![
        (1, vec![vec![1]], vec![vec![0]]),
        (1, vec![vec![1], vec![-1]], vec![vec![0], vec![1]]),
        (2, vec![vec![1, 0], vec![0, 1]], vec![vec![0, 1]]),
        (
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 0]],
            vec![vec![0, 1], vec![1, 2]],
        ),
        (
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        ),
        (
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 0], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        ),
        (
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 1], vec![0, -1]],
            vec![vec![0, 1], vec![1, 2], vec![2, 3], vec![0, 3]],
        ),
        (
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![2]],
        ),
        (
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]],
            vec![vec![0, 1, 2]],
        ),
        (
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![-1, 0, 0]],
            vec![vec![0, 1, 2], vec![1, 2, 3]],
        ),
        (
            3,
            vec![
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![-1, -1, -1],
            ],
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        ),
        (
            3,
            vec![
                vec![1, 0, 0],
                vec![0, 1, 0],
                vec![0, 0, 1],
                vec![-1, 0, 0],
                vec![0, -1, 0],
            ],
            vec![vec![0, 1, 2], vec![3, 4]],
        ),
        (
            3,
            vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![0, 0, -1]],
            vec![vec![0, 1, 2], vec![0, 1, 3]],
        ),
    ]
}

/// A random element of GL_d(Z) as a product of elementary matrices.
fn random_unimodular(d: usize, rng: &mut impl Rng) -> Vec<Vec<i64>> {
    let mut a: Vec<Vec<i64>> = (0..d)
        .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
        .collect();
    for _ in 0..rng.gen_range(0..=4) {
        match rng.gen_range(0..3) {
            0 if d > 1 => {
                let i = rng.gen_range(0..d);
                let j = (i + rng.gen_range(1..d)) % d;
                let c = rng.gen_range(-2..=2);
                let row = a[j].clone();
                for (x, y) in a[i].iter_mut().zip(row) {
                    *x += c * y;
                }
            }
            1 if d > 1 => {
                let i = rng.gen_range(0..d);
                let j = (i + rng.gen_range(1..d)) % d;
                a.swap(i, j);
            }
            _ => {
                let i = rng.gen_range(0..d);
                a[i].iter_mut().for_each(|x| *x = -*x);
            }
        }
    }
    a
}

/// A valid smooth fan of rank at most 3 with at most 4 maximal cones:
/// a template moved by a random unimodular map, then possibly star
/// subdivided.
pub fn random_smooth_fan(rng: &mut impl Rng) -> SmoothKatoFan {
    let (d, rays, cones) = templates().choose(rng).unwrap().clone();
    let a = random_unimodular(d, rng);
    let rays = rays
        .iter()
        .map(|v| {
            (0..d)
                .map(|i| (0..d).map(|j| a[i][j] * v[j]).sum())
                .collect()
        })
        .collect();
    let mut f = SmoothKatoFan::new(d, rays, cones).unwrap();
    for _ in 0..rng.gen_range(0..=2) {
        let candidates: Vec<Cone> = f.faces().iter().filter(|c| c.dim() >= 2).cloned().collect();
        let Some(c) = candidates.choose(rng) else {
            break;
        };
        let s = star_subdivision(&f, c).unwrap();
        if s.refined.maximal_cones().len() <= 4 {
            f = s.refined;
        }
    }
    assert!(
        validate_smooth_fan(&f).is_valid(),
        "generator produced an invalid fan"
    );
    f
}

pub fn random_fans(n: usize, seed: u64) -> Vec<SmoothKatoFan> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_smooth_fan(&mut rng)).collect()
}
