use std::collections::BTreeMap;

use super::{Cone, FanError, FanPoint, SmoothKatoFan};

/// A morphism of smooth fans given cone by cone.
///
/// Each listed source cone `σ` is sent to a target cone `τ` by a
/// nonnegative integer matrix whose rows follow the rays of `τ` and whose
/// columns follow the rays of `σ`, both in increasing ray index. A point
/// with coordinates `a` maps to `r_i = Σ_j m_ij a_j`.
#[derive(Clone, Debug)]
pub struct FanMorphism {
    source: SmoothKatoFan,
    target: SmoothKatoFan,
    cone_map: Vec<Cone>,
    matrices: Vec<Vec<Vec<u64>>>,
    /// image of each source ray (the column it contributes)
    ray_images: Vec<FanPoint>,
}

impl FanMorphism {
    pub fn new(
        source: SmoothKatoFan,
        target: SmoothKatoFan,
        cone_map: Vec<Cone>,
        matrices: Vec<Vec<Vec<u64>>>,
    ) -> Result<Self, FanError> {
        let err = |s: String| Err(FanError::Morphism(s));
        if cone_map.len() != source.cones().len() || matrices.len() != source.cones().len() {
            return err(format!(
                "expected one target cone and one matrix per source cone ({}), got {} and {}",
                source.cones().len(),
                cone_map.len(),
                matrices.len()
            ));
        }
        let mut ray_images: Vec<Option<FanPoint>> = vec![None; source.rays().len()];
        for (k, (sigma, tau)) in source.cones().iter().zip(&cone_map).enumerate() {
            if !target.is_cone(tau) {
                return err(format!("target {tau} of source cone {k} is not a cone"));
            }
            let m = &matrices[k];
            if m.len() != tau.dim() || m.iter().any(|row| row.len() != sigma.dim()) {
                return err(format!("matrix {k} must be {}x{}", tau.dim(), sigma.dim()));
            }
            for (j, &r) in sigma.rays().iter().enumerate() {
                let img =
                    FanPoint::normalized(tau.rays().iter().zip(m).map(|(&t, row)| (t, row[j])));
                match &ray_images[r] {
                    Some(prev) if *prev != img => {
                        return err(format!(
                            "source ray {r} has image {img:?} in cone {k} but {prev:?} elsewhere"
                        ))
                    }
                    Some(_) => {}
                    None => ray_images[r] = Some(img),
                }
            }
        }
        let ray_images = ray_images
            .into_iter()
            .enumerate()
            .map(|(r, o)| o.ok_or(FanError::Morphism(format!("source ray {r} is in no cone"))))
            .collect::<Result<_, _>>()?;
        Ok(FanMorphism {
            source,
            target,
            cone_map,
            matrices,
            ray_images,
        })
    }

    /// The morphism determined by where each source ray goes; every listed
    /// source cone is sent to the smallest target cone containing the images.
    pub fn from_ray_images(
        source: SmoothKatoFan,
        target: SmoothKatoFan,
        ray_images: Vec<FanPoint>,
    ) -> Result<Self, FanError> {
        let mut cone_map = vec![];
        let mut matrices = vec![];
        for sigma in source.cones() {
            let tau = Cone::new(
                sigma
                    .rays()
                    .iter()
                    .flat_map(|&r| ray_images[r].cone.rays().to_vec())
                    .collect(),
            );
            let m: Vec<Vec<u64>> = tau
                .rays()
                .iter()
                .map(|&t| {
                    sigma
                        .rays()
                        .iter()
                        .map(|&r| {
                            ray_images[r]
                                .pairs()
                                .find(|(x, _)| *x == t)
                                .map_or(0, |(_, c)| c)
                        })
                        .collect()
                })
                .collect();
            cone_map.push(tau);
            matrices.push(m);
        }
        FanMorphism::new(source, target, cone_map, matrices)
    }

    pub fn identity(f: &SmoothKatoFan) -> Self {
        let imgs = (0..f.rays().len()).map(|r| FanPoint::ray(r, 1)).collect();
        Self::from_ray_images(f.clone(), f.clone(), imgs).expect("identity")
    }

    /// `self ∘ first`, defined when the target of `first` is the source of `self`.
    pub fn after(&self, first: &FanMorphism) -> Result<Self, FanError> {
        if first.target.rays() != self.source.rays() || first.target.cones() != self.source.cones()
        {
            return Err(FanError::Morphism(
                "target of the first map is not the source".into(),
            ));
        }
        let images = first
            .ray_images
            .iter()
            .map(|p| apply_morphism(self, p))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_ray_images(first.source.clone(), self.target.clone(), images)
    }

    pub fn source(&self) -> &SmoothKatoFan {
        &self.source
    }

    pub fn target(&self) -> &SmoothKatoFan {
        &self.target
    }

    pub fn cone_map(&self) -> &[Cone] {
        &self.cone_map
    }

    pub fn matrices(&self) -> &[Vec<Vec<u64>>] {
        &self.matrices
    }

    pub fn ray_image(&self, r: usize) -> &FanPoint {
        &self.ray_images[r]
    }

    /// Smallest target cone containing the image of the source cone `s`.
    pub fn image_cone(&self, s: &Cone) -> Cone {
        Cone::new(
            s.rays()
                .iter()
                .flat_map(|&r| self.ray_images[r].cone.rays().to_vec())
                .collect(),
        )
    }

    /// Sum of the matrix entries over `s`: the height of the image of the
    /// all-ones point of `s`.
    pub fn column_height(&self, s: &Cone) -> u64 {
        s.rays()
            .iter()
            .map(|&r| super::height(&self.ray_images[r]))
            .sum()
    }
}

/// Image of a source point: `r_i = Σ_j m_ij a_j`, normalized to its support.
pub fn apply_morphism(m: &FanMorphism, p: &FanPoint) -> Result<FanPoint, FanError> {
    if !m.source.is_cone(&p.cone) {
        return Err(FanError::NotACone(p.cone.clone()));
    }
    let mut acc: BTreeMap<usize, u64> = BTreeMap::new();
    for (r, a) in p.pairs() {
        for (t, c) in m.ray_images[r].pairs() {
            *acc.entry(t).or_default() += c * a;
        }
    }
    Ok(FanPoint::normalized(acc))
}
