//! The height bound m for multiplication by d on Spec N and for the
//! diagonal N -> N^2.

use pseudosplit::fan::{height_bound_m, Cone, FanMorphism, SmoothKatoFan, DEFAULT_HEIGHT_CAP};

fn show(name: &str, phi: &FanMorphism) {
    let hb = height_bound_m(phi, DEFAULT_HEIGHT_CAP).unwrap();
    println!("{name}: m = {}", hb.m);
    for t in &hb.targets {
        let w = t
            .witness
            .as_ref()
            .map(|p| format!("{}{:?}", p.cone, p.coords));
        println!(
            "  m_t    {:<8} {:>2}  {}",
            t.cone.to_string(),
            t.m_t,
            w.unwrap_or_default()
        );
    }
    for s in &hb.sources {
        println!(
            "  m_s,t  {:<8} {:>2}  -> {}",
            s.source.to_string(),
            s.m_st,
            s.target
        );
    }
}

fn main() {
    let line = SmoothKatoFan::affine(1);
    for d in 1..=5 {
        let phi = FanMorphism::new(
            line.clone(),
            line.clone(),
            vec![Cone::new(vec![0])],
            vec![vec![vec![d]]],
        )
        .unwrap();
        show(&format!("multiplication by {d}"), &phi);
    }
    let diagonal = FanMorphism::new(
        line,
        SmoothKatoFan::affine(2),
        vec![Cone::new(vec![0, 1])],
        vec![vec![vec![1], vec![1]]],
    )
    .unwrap();
    show("diagonal", &diagonal);
}
