//! Star and barycentric subdivisions of the positive quadrant, and how
//! pulling points back lowers their height until every point sits on a ray.

use pseudosplit::fan::{
    barycentric_subdivision, enumerate_points, height, iterated_barycentric, pullback_point,
    star_subdivision, validate_smooth_fan, Cone, SmoothKatoFan,
};

fn main() {
    let plane = SmoothKatoFan::affine(2);
    let star = star_subdivision(&plane, &Cone::new(vec![0, 1])).unwrap();
    println!("star subdivision: rays {:?}", star.refined.rays());
    println!(
        "maximal cones: {:?}",
        star.refined
            .maximal_cones()
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
    );

    let space = SmoothKatoFan::affine(3);
    let b = barycentric_subdivision(&space).unwrap();
    println!(
        "barycentric subdivision of N^3: {} rays, {} maximal cones, smooth: {}",
        b.refined.rays().len(),
        b.refined.maximal_cones().len(),
        validate_smooth_fan(&b.refined).is_valid()
    );

    println!("\npoint          height  pulled back along iterated_barycentric(m)");
    for m in 1..=4 {
        let s = iterated_barycentric(&plane, m).unwrap();
        let all_on_rays = enumerate_points(&plane, m as u64)
            .iter()
            .all(|p| pullback_point(&s, p).unwrap().cone.dim() <= 1);
        println!("m = {m}: every point of height <= {m} pulls back onto a ray: {all_on_rays}");
    }
    let s = iterated_barycentric(&plane, 3).unwrap();
    for p in enumerate_points(&plane, 3) {
        let q = pullback_point(&s, &p).unwrap();
        let rays: Vec<&[i64]> = q.cone.rays().iter().map(|&r| s.refined.ray(r)).collect();
        println!(
            "{:<8}{:?} {:>4} -> {:?} on {:?}",
            p.cone.to_string(),
            p.coords,
            height(&p),
            q.coords,
            rays
        );
    }
}
