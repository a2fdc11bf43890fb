fn main() {
    use num_complex::Complex64;
    use packlab::sphere::*;
    let verts: Vec<Complex64> = vec![
        Complex64::new(0.1, 0.1),
        Complex64::new(0.8, 0.2),
        Complex64::new(0.7, 0.9),
        Complex64::new(0.05, 0.6),
    ];
    let a0 = polygon_spherical_area(&verts, 1e-12).unwrap();
    let rot = MobiusTransform::rotation_to_origin(SpherePoint::new(0.4, -0.3));
    for sub in [16usize, 64, 256] {
        let mut img = Vec::new();
        for i in 0..verts.len() {
            let a = verts[i];
            let b = verts[(i + 1) % verts.len()];
            for k in 0..sub {
                let t = k as f64 / sub as f64;
                img.push(rot.apply_chart(a + (b - a) * t));
            }
        }
        let a1 = polygon_spherical_area(&img, 1e-12).unwrap();
        println!("sub={sub} a0={a0} a1={a1} rel={}", (a1 - a0).abs() / a0);
    }
}
