//! Deterministic artifact writers: point-cloud CSV and binary PPM
//! rasters. Both are pure functions of their inputs so repeated runs
//! with the same flags produce byte-identical files.

use hutchfrac_core::{Cloud, DomainBox};

/// CSV with an `x0,x1,...` header and one point per row; `{:.16e}`
/// prints 17 significant digits, enough to reconstruct every f64.
pub fn cloud_csv(cloud: &Cloud) -> String {
    let dim = cloud.points()[0].dim();
    let mut out = String::new();
    for i in 0..dim {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&format!("x{i}"));
    }
    out.push('\n');
    for p in cloud.points() {
        for (i, c) in p.coords().iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            out.push_str(&format!("{c:.16e}"));
        }
        out.push('\n');
    }
    out
}

/// Binary PPM (P6, maxval 255): white background, black bins that
/// contain at least one point. Coordinate 0 maps to the horizontal
/// axis, coordinate 1 (when present) to the vertical axis with larger
/// values at the top; 1-d clouds render on the middle row.
pub fn cloud_ppm(cloud: &Cloud, domain: &DomainBox, width: usize, height: usize) -> Vec<u8> {
    assert!(width >= 1 && height >= 1);
    let mut occupied = vec![false; width * height];
    let axis = |v: f64, lo: f64, hi: f64, n: usize| -> usize {
        let t = if hi > lo { (v - lo) / (hi - lo) } else { 0.5 };
        let k = (t * n as f64) as isize;
        k.clamp(0, n as isize - 1) as usize
    };
    for p in cloud.points() {
        let ix = axis(p.coord(0), domain.lo().coord(0), domain.hi().coord(0), width);
        let iy = if p.dim() >= 2 {
            let row = axis(p.coord(1), domain.lo().coord(1), domain.hi().coord(1), height);
            height - 1 - row
        } else {
            height / 2
        };
        occupied[iy * width + ix] = true;
    }
    let mut out = Vec::with_capacity(32 + 3 * width * height);
    out.extend_from_slice(format!("P6\n{width} {height}\n255\n").as_bytes());
    for bin in occupied {
        let v = if bin { 0u8 } else { 255u8 };
        out.extend_from_slice(&[v, v, v]);
    }
    out
}
