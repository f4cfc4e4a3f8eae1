use super::{apply_morphism, Cone, FanError, FanMorphism, FanPoint, SmoothKatoFan};

/// A refinement of `base` with the same support, in the same lattice.
#[derive(Clone, Debug)]
pub struct Subdivision {
    pub refined: SmoothKatoFan,
    pub base: SmoothKatoFan,
    /// Expresses every refined ray in coordinates of a base cone.
    pub structure: FanMorphism,
}

impl Subdivision {
    pub fn identity(f: &SmoothKatoFan) -> Self {
        Subdivision {
            refined: f.clone(),
            base: f.clone(),
            structure: FanMorphism::identity(f),
        }
    }

    fn from_refinement(refined: SmoothKatoFan, base: &SmoothKatoFan) -> Result<Self, FanError> {
        let images = refined
            .rays()
            .iter()
            .map(|v| {
                base.locate(v)
                    .ok_or_else(|| FanError::NotInSupport(v.clone()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let structure = FanMorphism::from_ray_images(refined.clone(), base.clone(), images)?;
        Ok(Subdivision {
            refined,
            base: base.clone(),
            structure,
        })
    }

    pub fn pushforward(&self, p: &FanPoint) -> Result<FanPoint, FanError> {
        apply_morphism(&self.structure, p)
    }
}

/// Inserts the ray through the sum of the generators of `c` and replaces
/// every cone `σ ⊇ c` by the cones `(σ ∖ {u}) ∪ {barycentre}`, `u ∈ c`.
pub fn star_subdivision(f: &SmoothKatoFan, c: &Cone) -> Result<Subdivision, FanError> {
    let refined = star_refine(f, c)?;
    Subdivision::from_refinement(refined, f)
}

fn star_refine(f: &SmoothKatoFan, c: &Cone) -> Result<SmoothKatoFan, FanError> {
    if c.dim() < 2 {
        return Err(FanError::ConeTooSmall(c.clone()));
    }
    if !f.is_cone(c) {
        return Err(FanError::NotACone(c.clone()));
    }
    let mut rays = f.rays().to_vec();
    let mut cones = f.cones().to_vec();
    star_in_place(&mut rays, &mut cones, c);
    Ok(rebuild(f.dim(), rays, cones))
}

/// The star step on bare ray and cone lists; `c` must be a cone.
fn star_in_place(rays: &mut Vec<Vec<i64>>, cones: &mut Vec<Cone>, c: &Cone) {
    let mut bary = vec![0i64; rays[0].len()];
    for &r in c.rays() {
        for (b, x) in bary.iter_mut().zip(&rays[r]) {
            *b += x;
        }
    }
    rays.push(bary);
    let u = rays.len() - 1;
    let mut out = Vec::with_capacity(cones.len() + c.dim());
    for sigma in cones.drain(..) {
        if c.is_face_of(&sigma) {
            for &drop in c.rays() {
                let mut rs: Vec<usize> = sigma
                    .rays()
                    .iter()
                    .copied()
                    .filter(|&r| r != drop)
                    .collect();
                rs.push(u);
                out.push(Cone::new(rs));
            }
        } else {
            out.push(sigma);
        }
    }
    *cones = out;
}

fn rebuild(dim: usize, rays: Vec<Vec<i64>>, cones: Vec<Cone>) -> SmoothKatoFan {
    let cones = cones.into_iter().map(|c| c.rays().to_vec()).collect();
    SmoothKatoFan::new(dim, rays, cones).expect("indices stay in range")
}

/// Star subdivision along the barycentre of every cone of dimension at
/// least two, in decreasing order of dimension.
pub fn barycentric_subdivision(f: &SmoothKatoFan) -> Result<Subdivision, FanError> {
    let refined = barycentric_refine(f)?;
    Subdivision::from_refinement(refined, f)
}

fn barycentric_refine(f: &SmoothKatoFan) -> Result<SmoothKatoFan, FanError> {
    let mut order: Vec<Cone> = f.faces().iter().filter(|c| c.dim() >= 2).cloned().collect();
    order.sort_by(|a, b| b.dim().cmp(&a.dim()).then_with(|| a.cmp(b)));
    let mut rays = f.rays().to_vec();
    let mut cones = f.cones().to_vec();
    for c in &order {
        // A face of an already subdivided cone survives as a cone, and ray
        // indices are stable, so `c` is still a cone here.
        star_in_place(&mut rays, &mut cones, c);
    }
    Ok(rebuild(f.dim(), rays, cones))
}

/// `m - 1` successive barycentric subdivisions, composed into one
/// subdivision of `f` (the identity for `m = 1`).
pub fn iterated_barycentric(f: &SmoothKatoFan, m: u32) -> Result<Subdivision, FanError> {
    if m == 0 {
        return Err(FanError::ZeroIterations);
    }
    let mut g = f.clone();
    for _ in 1..m {
        g = barycentric_refine(&g)?;
    }
    if m == 1 {
        return Ok(Subdivision::identity(f));
    }
    Subdivision::from_refinement(g, f)
}

/// The unique point of the refined fan pushing forward to `p`.
pub fn pullback_point(s: &Subdivision, p: &FanPoint) -> Result<FanPoint, FanError> {
    let v = s.base.vector(p);
    s.refined.locate(&v).ok_or(FanError::NotInSupport(v))
}

/// Whether `p` pulls back onto a single ray or the vertex.
pub fn pulls_back_to_single_ray(s: &Subdivision, p: &FanPoint) -> Result<bool, FanError> {
    Ok(pullback_point(s, p)?.cone.dim() <= 1)
}

/// Whether the pullback of `p` has height at most one. Stronger than
/// [`pulls_back_to_single_ray`]: multiples of a ray generator fail it.
pub fn pulls_back_to_height_one(s: &Subdivision, p: &FanPoint) -> Result<bool, FanError> {
    Ok(super::height(&pullback_point(s, p)?) <= 1)
}
