use serde::{Deserialize, Serialize};

use super::{full_support_points, height, Cone, FanError, FanMorphism, FanPoint};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TargetStratum {
    pub cone: Cone,
    /// Least height of a full-support point of `cone` outside the image, or 0.
    pub m_t: u64,
    /// The point realising `m_t`.
    pub witness: Option<FanPoint>,
    /// False when no point outside the image was found up to the cap and
    /// coverage could not be proved; `m_t = 0` is then verified only up to the cap.
    pub complete: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SourceStratum {
    pub source: Cone,
    pub target: Cone,
    pub m_st: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeightBound {
    pub m: u64,
    pub cap: u64,
    pub complete: bool,
    pub targets: Vec<TargetStratum>,
    pub sources: Vec<SourceStratum>,
}

/// Decides whether the full-support point `r` is the image of a
/// full-support point of some source cone.
pub(crate) fn in_image(phi: &FanMorphism, r: &FanPoint) -> bool {
    phi.source()
        .faces()
        .iter()
        .filter(|s| phi.image_cone(s) == r.cone)
        .any(|s| solvable(phi, s, r))
}

/// Is there `a >= 1` (componentwise) on `s` with `M a = r`?
fn solvable(phi: &FanMorphism, s: &Cone, r: &FanPoint) -> bool {
    // Columns mapping to zero are free; put them at 1.
    let columns: Vec<Vec<u64>> = s
        .rays()
        .iter()
        .map(|&j| {
            let img = phi.ray_image(j);
            r.cone
                .rays()
                .iter()
                .map(|t| img.pairs().find(|(x, _)| x == t).map_or(0, |(_, c)| c))
                .collect::<Vec<u64>>()
        })
        .filter(|col| col.iter().any(|&c| c > 0))
        .collect();
    let mut rest = r.coords.clone();
    fn search(columns: &[Vec<u64>], rest: &mut [u64]) -> bool {
        let Some((col, tail)) = columns.split_first() else {
            return rest.iter().all(|&x| x == 0);
        };
        // every column must be used at least once
        let mut used = 0;
        loop {
            if col.iter().zip(rest.iter()).any(|(&c, &x)| c > x) {
                break;
            }
            for (x, &c) in rest.iter_mut().zip(col) {
                *x -= c;
            }
            used += 1;
            if search(tail, rest) {
                for (x, &c) in rest.iter_mut().zip(col) {
                    *x += c * used;
                }
                return true;
            }
        }
        for (x, &c) in rest.iter_mut().zip(col) {
            *x += c * used;
        }
        false
    }
    search(&columns, &mut rest)
}

/// A source cone whose columns permute the rays of `t` covers every
/// full-support point of `t`.
fn covered_by_permutation(phi: &FanMorphism, t: &Cone) -> bool {
    phi.source().faces().iter().any(|s| {
        s.dim() == t.dim()
            && phi.image_cone(s) == *t
            && s.rays().iter().all(|&j| {
                let img = phi.ray_image(j);
                img.coords == [1]
            })
    })
}

/// The height bound `m = max(m_t, m_{s,t})` over all target cones `t` and
/// source cones `s`.
///
/// `m_t` is searched by increasing height up to `cap`. `m_{s,t}` is exact:
/// the least image height of a full-support point of `s` is attained at the
/// all-ones point, i.e. the sum of the matrix entries over `s`.
pub fn height_bound_m(phi: &FanMorphism, cap: u64) -> Result<HeightBound, FanError> {
    if cap == 0 {
        return Err(FanError::ZeroCap);
    }
    let mut targets = vec![];
    for t in phi.target().faces() {
        let mut found = None;
        for h in t.dim() as u64..=cap {
            if let Some(r) = full_support_points(t, h)
                .into_iter()
                .find(|r| !in_image(phi, r))
            {
                found = Some(r);
                break;
            }
        }
        let complete = found.is_some() || t.dim() == 0 || covered_by_permutation(phi, t);
        targets.push(TargetStratum {
            cone: t.clone(),
            m_t: found.as_ref().map_or(0, height),
            witness: found,
            complete,
        });
    }
    let sources: Vec<SourceStratum> = phi
        .source()
        .faces()
        .iter()
        .map(|s| SourceStratum {
            source: s.clone(),
            target: phi.image_cone(s),
            m_st: phi.column_height(s),
        })
        .collect();
    let m = targets
        .iter()
        .map(|t| t.m_t)
        .chain(sources.iter().map(|s| s.m_st))
        .max()
        .unwrap_or(0);
    Ok(HeightBound {
        m,
        cap,
        complete: targets.iter().all(|t| t.complete),
        targets,
        sources,
    })
}
