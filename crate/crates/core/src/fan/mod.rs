//! Smooth Kato fans embedded in a lattice `Z^d`.
//!
//! A smooth fan is a collection of unimodular simplicial cones meeting
//! along common faces. Its `N`-points are nonnegative integer combinations
//! of the rays of a single cone; the height of a point is the sum of its
//! coordinates.

mod height;
mod lp;
mod morphism;
mod subdivision;

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use height::{height_bound_m, HeightBound, SourceStratum, TargetStratum};
pub use morphism::{apply_morphism, FanMorphism};
pub use subdivision::{
    barycentric_subdivision, iterated_barycentric, pullback_point, pulls_back_to_height_one,
    pulls_back_to_single_ray, star_subdivision, Subdivision,
};

/// Default cap on the height searched when looking for points outside an image.
pub const DEFAULT_HEIGHT_CAP: u64 = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FanError {
    #[error("ray {ray} has {found} coordinates, expected {dim}")]
    RayDimension {
        ray: usize,
        dim: usize,
        found: usize,
    },
    #[error("cone {cone} refers to missing ray {ray}")]
    MissingRay { cone: usize, ray: usize },
    #[error("cone {0} repeats a ray")]
    RepeatedRay(usize),
    #[error("fan is not smooth: {0}")]
    Invalid(String),
    #[error("{0} is not a cone of the fan")]
    NotACone(Cone),
    #[error("star subdivision needs a cone with at least two rays, got {0}")]
    ConeTooSmall(Cone),
    #[error("vector {0:?} is not in the support of the fan")]
    NotInSupport(Vec<i64>),
    #[error("morphism: {0}")]
    Morphism(String),
    #[error("iteration count must be at least 1")]
    ZeroIterations,
    #[error("height cap must be at least 1")]
    ZeroCap,
}

/// A set of ray indices, kept sorted.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize, Default)]
#[serde(from = "Vec<usize>", into = "Vec<usize>")]
pub struct Cone(Vec<usize>);

impl Cone {
    pub fn new(mut rays: Vec<usize>) -> Self {
        rays.sort_unstable();
        rays.dedup();
        Cone(rays)
    }

    pub fn vertex() -> Self {
        Cone(vec![])
    }

    pub fn rays(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn contains_ray(&self, r: usize) -> bool {
        self.0.binary_search(&r).is_ok()
    }

    pub fn is_face_of(&self, other: &Cone) -> bool {
        self.0.iter().all(|r| other.contains_ray(*r))
    }

    pub fn intersection(&self, other: &Cone) -> Cone {
        Cone(
            self.0
                .iter()
                .copied()
                .filter(|r| other.contains_ray(*r))
                .collect(),
        )
    }

    /// All faces, vertex included.
    pub fn faces(&self) -> impl Iterator<Item = Cone> + '_ {
        let k = self.0.len();
        (0u64..(1u64 << k)).map(move |mask| {
            Cone(
                (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.0[i])
                    .collect(),
            )
        })
    }
}

impl From<Vec<usize>> for Cone {
    fn from(v: Vec<usize>) -> Self {
        Cone::new(v)
    }
}

impl From<Cone> for Vec<usize> {
    fn from(c: Cone) -> Self {
        c.0
    }
}

impl fmt::Debug for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for Cone {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, r) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{r}")?;
        }
        write!(f, "}}")
    }
}

/// An `N`-point: positive coordinates on the rays of its (minimal) cone.
/// The zero point lives on the vertex.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FanPoint {
    pub cone: Cone,
    pub coords: Vec<u64>,
}

impl FanPoint {
    pub fn zero() -> Self {
        FanPoint {
            cone: Cone::vertex(),
            coords: vec![],
        }
    }

    /// Drops zero coordinates so that the cone is the support.
    pub fn normalized(pairs: impl IntoIterator<Item = (usize, u64)>) -> Self {
        let mut v: Vec<(usize, u64)> = pairs.into_iter().filter(|(_, c)| *c > 0).collect();
        v.sort_unstable();
        let mut merged: Vec<(usize, u64)> = vec![];
        for (r, c) in v {
            match merged.last_mut() {
                Some((lr, lc)) if *lr == r => *lc += c,
                _ => merged.push((r, c)),
            }
        }
        FanPoint {
            cone: Cone(merged.iter().map(|(r, _)| *r).collect()),
            coords: merged.iter().map(|(_, c)| *c).collect(),
        }
    }

    pub fn ray(r: usize, multiple: u64) -> Self {
        Self::normalized([(r, multiple)])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, u64)> + '_ {
        self.cone
            .rays()
            .iter()
            .copied()
            .zip(self.coords.iter().copied())
    }
}

pub fn height(p: &FanPoint) -> u64 {
    p.coords.iter().sum()
}

/// Solves `U c = v` for the rays `U` of one cone using a precomputed
/// integral left inverse.
#[derive(Clone, Debug)]
struct ConeSolver {
    cone: Cone,
    left_inverse: Vec<Vec<i128>>,
    denominator: i128,
}

impl ConeSolver {
    fn new(cone: &Cone, rays: &[Vec<i64>], dim: usize) -> Option<Self> {
        let k = cone.dim();
        type Q = Ratio<i128>;
        let u = |i: usize, r: usize| rays[cone.rays()[r]][i] as i128;
        // Gram matrix augmented with U^T; Gauss-Jordan gives (U^T U)^-1 U^T.
        let mut m: Vec<Vec<Q>> = (0..k)
            .map(|a| {
                let mut row: Vec<Q> = (0..k)
                    .map(|b| Q::from_integer((0..dim).map(|i| u(i, a) * u(i, b)).sum()))
                    .collect();
                row.extend((0..dim).map(|i| Q::from_integer(u(i, a))));
                row
            })
            .collect();
        for col in 0..k {
            let piv = (col..k).find(|&r| !m[r][col].is_zero())?;
            m.swap(col, piv);
            let p = m[col][col];
            for v in m[col].iter_mut() {
                *v /= p;
            }
            let prow = m[col].clone();
            for (r, row) in m.iter_mut().enumerate() {
                if r != col && !row[col].is_zero() {
                    let f = row[col];
                    for (v, pv) in row.iter_mut().zip(&prow) {
                        *v -= f * pv;
                    }
                }
            }
        }
        let denominator = m
            .iter()
            .flat_map(|row| row[k..].iter().map(|q| *q.denom()))
            .fold(1i128, |acc, d| acc.lcm(&d));
        let left_inverse = m
            .iter()
            .map(|row| {
                row[k..]
                    .iter()
                    .map(|q| (q * Q::from_integer(denominator)).to_integer())
                    .collect()
            })
            .collect();
        Some(ConeSolver {
            cone: cone.clone(),
            left_inverse,
            denominator,
        })
    }

    /// Coordinates of `v` if it is a nonnegative integer combination of the rays.
    fn solve(&self, v: &[i64], rays: &[Vec<i64>]) -> Option<Vec<u64>> {
        let mut coords = Vec::with_capacity(self.cone.dim());
        for row in &self.left_inverse {
            let num: i128 = row.iter().zip(v).map(|(a, &b)| a * b as i128).sum();
            if num < 0 || num % self.denominator != 0 {
                return None;
            }
            coords.push((num / self.denominator) as u64);
        }
        for (i, &vi) in v.iter().enumerate() {
            let s: i128 = self
                .cone
                .rays()
                .iter()
                .zip(&coords)
                .map(|(&r, &c)| rays[r][i] as i128 * c as i128)
                .sum();
            if s != vi as i128 {
                return None;
            }
        }
        Some(coords)
    }
}

#[derive(Clone, Debug)]
pub struct SmoothKatoFan {
    dim: usize,
    rays: Vec<Vec<i64>>,
    cones: Vec<Cone>,
    faces: Vec<Cone>,
    solvers: Vec<ConeSolver>,
}

impl SmoothKatoFan {
    /// Structural checks only; smoothness is reported by [`validate_smooth_fan`].
    pub fn new(dim: usize, rays: Vec<Vec<i64>>, cones: Vec<Vec<usize>>) -> Result<Self, FanError> {
        for (i, r) in rays.iter().enumerate() {
            if r.len() != dim {
                return Err(FanError::RayDimension {
                    ray: i,
                    dim,
                    found: r.len(),
                });
            }
        }
        let mut listed = Vec::with_capacity(cones.len());
        for (ci, c) in cones.into_iter().enumerate() {
            if let Some(&r) = c.iter().find(|&&r| r >= rays.len()) {
                return Err(FanError::MissingRay { cone: ci, ray: r });
            }
            let n = c.len();
            let cone = Cone::new(c);
            if cone.dim() != n {
                return Err(FanError::RepeatedRay(ci));
            }
            listed.push(cone);
        }
        let faces: BTreeSet<Cone> = listed.iter().flat_map(|c| c.faces()).collect();
        let mut faces: Vec<Cone> = faces.into_iter().collect();
        faces.sort_by(|a, b| a.dim().cmp(&b.dim()).then_with(|| a.cmp(b)));
        if faces.is_empty() {
            faces.push(Cone::vertex());
        }
        let solvers = listed
            .iter()
            .filter_map(|c| ConeSolver::new(c, &rays, dim))
            .collect();
        Ok(SmoothKatoFan {
            dim,
            rays,
            cones: listed,
            faces,
            solvers,
        })
    }

    /// Builds the fan and rejects it unless it passes [`validate_smooth_fan`].
    pub fn validated(
        dim: usize,
        rays: Vec<Vec<i64>>,
        cones: Vec<Vec<usize>>,
    ) -> Result<Self, FanError> {
        let f = Self::new(dim, rays, cones)?;
        let report = validate_smooth_fan(&f);
        if report.is_valid() {
            Ok(f)
        } else {
            Err(FanError::Invalid(report.violations.join("; ")))
        }
    }

    /// `Spec N^d`: the standard basis and the single cone on it.
    pub fn affine(d: usize) -> Self {
        let rays = (0..d)
            .map(|i| (0..d).map(|j| i64::from(i == j)).collect())
            .collect();
        Self::new(d, rays, vec![(0..d).collect()]).expect("standard cone")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rays(&self) -> &[Vec<i64>] {
        &self.rays
    }

    pub fn ray(&self, r: usize) -> &[i64] {
        &self.rays[r]
    }

    /// The cones as listed (each sorted).
    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    /// Every cone including faces and the vertex, by dimension then rays.
    pub fn faces(&self) -> &[Cone] {
        &self.faces
    }

    /// Listed cones not contained in another listed cone.
    pub fn maximal_cones(&self) -> Vec<Cone> {
        let mut out: Vec<Cone> = self
            .cones
            .iter()
            .filter(|c| !self.cones.iter().any(|d| d != *c && c.is_face_of(d)))
            .cloned()
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn is_cone(&self, c: &Cone) -> bool {
        self.cones.iter().any(|d| c.is_face_of(d)) || c.dim() == 0
    }

    /// Lattice vector `Σ c_i u_i` of a point.
    pub fn vector(&self, p: &FanPoint) -> Vec<i64> {
        let mut v = vec![0i64; self.dim];
        for (r, c) in p.pairs() {
            for (vi, ui) in v.iter_mut().zip(&self.rays[r]) {
                *vi += c as i64 * ui;
            }
        }
        v
    }

    /// The point of this fan with lattice vector `v`, if `v` is in the support.
    pub fn locate(&self, v: &[i64]) -> Option<FanPoint> {
        if v.iter().all(|&x| x == 0) {
            return Some(FanPoint::zero());
        }
        self.solvers.iter().find_map(|s| {
            s.solve(v, &self.rays)
                .map(|c| FanPoint::normalized(s.cone.rays().iter().copied().zip(c)))
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

fn gcd_of_maximal_minors(cols: &[&[i64]], dim: usize) -> i128 {
    let k = cols.len();
    if k == 0 {
        return 1;
    }
    if k > dim {
        return 0;
    }
    let mut g: i128 = 0;
    let mut rows: Vec<usize> = (0..k).collect();
    loop {
        let m: Vec<Vec<i128>> = rows
            .iter()
            .map(|&i| cols.iter().map(|c| c[i] as i128).collect())
            .collect();
        g = g.gcd(&determinant(m));
        if g == 1 {
            return 1;
        }
        // next k-subset of 0..dim
        let mut i = k;
        loop {
            if i == 0 {
                return g;
            }
            i -= 1;
            if rows[i] < dim - k + i {
                rows[i] += 1;
                for j in i + 1..k {
                    rows[j] = rows[j - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Fraction-free (Bareiss) determinant.
fn determinant(mut m: Vec<Vec<i128>>) -> i128 {
    let n = m.len();
    let mut sign = 1;
    let mut prev = 1i128;
    for k in 0..n {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&r| m[r][k] != 0) {
                Some(r) => {
                    m.swap(k, r);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    sign * m[n - 1][n - 1]
}

/// Checks smoothness (every cone's rays extend to a basis of `Z^d`) and that
/// listed cones meet along common faces.
pub fn validate_smooth_fan(f: &SmoothKatoFan) -> ValidationReport {
    let mut violations = vec![];
    let used: BTreeSet<usize> = f
        .cones
        .iter()
        .flat_map(|c| c.rays().iter().copied())
        .collect();
    for (i, r) in f.rays.iter().enumerate() {
        if r.iter().all(|&x| x == 0) {
            violations.push(format!("ray {i} is zero"));
        }
        if !used.contains(&i) {
            violations.push(format!("ray {i} lies in no cone"));
        }
    }
    for c in &f.cones {
        let cols: Vec<&[i64]> = c.rays().iter().map(|&r| f.rays[r].as_slice()).collect();
        let g = gcd_of_maximal_minors(&cols, f.dim);
        if g != 1 {
            violations.push(format!(
                "cone {c} is not unimodular (gcd of maximal minors {g})"
            ));
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }
    for (i, a) in f.cones.iter().enumerate() {
        for b in &f.cones[i + 1..] {
            if let Some(side) = improper_meeting(f, a, b) {
                violations.push(format!(
                    "cones {a} and {b} do not meet in a common face ({side})"
                ));
            }
        }
    }
    ValidationReport { violations }
}

/// `None` when `a ∩ b` (as cones in `R^d`) is the cone on their common rays.
///
/// For simplicial cones it suffices to rule out a point of `a ∩ b` that
/// uses a ray of `a` not in `b`: feasibility of
/// `Σ x_i u_i = Σ y_j w_j`, `x, y >= 0`, `Σ_{i ∈ a∖b} x_i = 1`.
fn improper_meeting(f: &SmoothKatoFan, a: &Cone, b: &Cone) -> Option<String> {
    let common = a.intersection(b);
    for (s, t) in [(a, b), (b, a)] {
        let only: Vec<usize> = s
            .rays()
            .iter()
            .copied()
            .filter(|r| !common.contains_ray(*r))
            .collect();
        if only.is_empty() {
            continue;
        }
        let nvars = s.dim() + t.dim();
        let mut rows: Vec<Vec<i64>> = (0..f.dim)
            .map(|i| {
                s.rays()
                    .iter()
                    .map(|&r| f.rays[r][i])
                    .chain(t.rays().iter().map(|&r| -f.rays[r][i]))
                    .collect()
            })
            .collect();
        let mut norm = vec![0i64; nvars];
        for (j, r) in s.rays().iter().enumerate() {
            if !common.contains_ray(*r) {
                norm[j] = 1;
            }
        }
        rows.push(norm);
        let mut rhs = vec![0i64; f.dim];
        rhs.push(1);
        if lp::feasible(&rows, &rhs) {
            return Some(format!("ray {} of {s} meets {t}", only[0]));
        }
    }
    None
}

/// Compositions of `total` into `parts` positive integers, lexicographic.
pub(crate) fn compositions(parts: usize, total: u64) -> Vec<Vec<u64>> {
    let mut out = vec![];
    if parts == 0 {
        if total == 0 {
            out.push(vec![]);
        }
        return out;
    }
    if total < parts as u64 {
        return out;
    }
    let mut cur = vec![0u64; parts];
    fn rec(i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        let parts = cur.len();
        if i == parts - 1 {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        let rest = (parts - i - 1) as u64;
        for c in 1..=left - rest {
            cur[i] = c;
            rec(i + 1, left - c, cur, out);
        }
    }
    rec(0, total, &mut cur, &mut out);
    out
}

/// Points of `cone` with full support and the given height.
pub fn full_support_points(cone: &Cone, h: u64) -> Vec<FanPoint> {
    compositions(cone.dim(), h)
        .into_iter()
        .map(|coords| FanPoint {
            cone: cone.clone(),
            coords,
        })
        .collect()
}

/// Every point of height at most `m`, each once, ordered by height, then
/// cone, then coordinates.
pub fn enumerate_points(f: &SmoothKatoFan, m: u64) -> Vec<FanPoint> {
    let mut out: Vec<(u64, FanPoint)> = vec![];
    for c in f.faces() {
        for h in c.dim() as u64..=m {
            out.extend(full_support_points(c, h).into_iter().map(|p| (h, p)));
        }
    }
    out.sort();
    out.into_iter().map(|(_, p)| p).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn standard_plane_cone_is_valid() {
        assert!(validate_smooth_fan(&SmoothKatoFan::affine(2)).is_valid());
    }

    #[test]
    fn determinant_two_is_invalid() {
        let f = SmoothKatoFan::new(2, vec![vec![1, 0], vec![1, 2]], vec![vec![0, 1]]).unwrap();
        let r = validate_smooth_fan(&f);
        assert!(!r.is_valid());
        assert!(r.violations[0].contains("not unimodular"));
    }

    #[test]
    fn two_cones_sharing_a_ray() {
        let f = SmoothKatoFan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![0, -1]],
            vec![vec![0, 1], vec![0, 2]],
        )
        .unwrap();
        assert!(validate_smooth_fan(&f).is_valid());
        assert_eq!(f.maximal_cones().len(), 2);
    }

    #[test]
    fn overlapping_cones_are_invalid() {
        // {e1, e2} and {e1+e2, e2} overlap in their interiors.
        let f = SmoothKatoFan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![1, 1]],
            vec![vec![0, 1], vec![2, 1]],
        )
        .unwrap();
        assert!(!validate_smooth_fan(&f).is_valid());
        // a ray inside a 2-cone
        let g = SmoothKatoFan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![1, 1]],
            vec![vec![0, 1], vec![2]],
        )
        .unwrap();
        assert!(!validate_smooth_fan(&g).is_valid());
        // duplicate ray vectors
        let h = SmoothKatoFan::new(1, vec![vec![1], vec![1]], vec![vec![0], vec![1]]).unwrap();
        assert!(!validate_smooth_fan(&h).is_valid());
    }

    #[test]
    fn complete_fan_of_projective_plane() {
        let f = SmoothKatoFan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, -1]],
            vec![vec![0, 1], vec![1, 2], vec![0, 2]],
        )
        .unwrap();
        assert!(validate_smooth_fan(&f).is_valid());
    }

    #[test]
    fn structural_errors() {
        assert!(matches!(
            SmoothKatoFan::new(2, vec![vec![1]], vec![]),
            Err(FanError::RayDimension { .. })
        ));
        assert!(matches!(
            SmoothKatoFan::new(1, vec![vec![1]], vec![vec![0, 3]]),
            Err(FanError::MissingRay { .. })
        ));
        assert!(matches!(
            SmoothKatoFan::new(1, vec![vec![1]], vec![vec![0, 0]]),
            Err(FanError::RepeatedRay(0))
        ));
    }

    #[test]
    fn heights() {
        assert_eq!(height(&FanPoint::zero()), 0);
        assert_eq!(height(&FanPoint::normalized([(0, 1), (1, 2)])), 3);
        assert_eq!(height(&FanPoint::ray(0, 5)), 5);
    }

    #[test]
    fn points_of_affine_plane_up_to_two() {
        let pts = enumerate_points(&SmoothKatoFan::affine(2), 2);
        assert_eq!(pts.len(), 6);
        assert_eq!(pts[0], FanPoint::zero());
        assert!(pts.contains(&FanPoint::normalized([(0, 1), (1, 1)])));
        assert!(pts.contains(&FanPoint::ray(1, 2)));
    }

    #[test]
    fn height_zero_gives_only_origin() {
        let f = SmoothKatoFan::affine(3);
        assert_eq!(enumerate_points(&f, 0), vec![FanPoint::zero()]);
    }

    #[test]
    fn glued_cones_height_one() {
        let f = SmoothKatoFan::new(
            2,
            vec![vec![1, 0], vec![0, 1], vec![-1, 0]],
            vec![vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        assert_eq!(enumerate_points(&f, 1).len(), 1 + 3);
    }

    #[test]
    fn locate_recovers_points() {
        let f = SmoothKatoFan::new(
            2,
            vec![vec![1, 0], vec![1, 1], vec![0, 1]],
            vec![vec![0, 1], vec![1, 2]],
        )
        .unwrap();
        for p in enumerate_points(&f, 5) {
            assert_eq!(f.locate(&f.vector(&p)), Some(p));
        }
        assert_eq!(f.locate(&[-1, 0]), None);
    }

    #[test]
    fn compositions_count() {
        assert_eq!(compositions(2, 4).len(), 3);
        assert_eq!(compositions(3, 2).len(), 0);
        assert_eq!(compositions(0, 0), vec![Vec::<u64>::new()]);
    }
}
