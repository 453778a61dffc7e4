//! Vote a synthetic line into a Hough accumulator and read back its normal.
//!
//!     cargo run --example hough_lines -- [normal-angle-deg]

use plate_deblur::{hough_accumulate, BinaryMap, HoughParams};

fn main() {
    let phi: f64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(63.0);
    let (w, h) = (128, 128);
    let mut edges = BinaryMap::new(w, h);
    let (cx, cy) = edges.center();
    let (s, c) = phi.to_radians().sin_cos();
    // points along the line through the center whose normal is phi
    for t in -60..=60 {
        let x = (cx as f64 - t as f64 * s).round();
        let y = (cy as f64 + t as f64 * c).round();
        if x >= 0.0 && y >= 0.0 && (x as usize) < w && (y as usize) < h {
            edges.set(x as usize, y as usize, true);
        }
    }
    let acc = hough_accumulate(&edges, &HoughParams::new(0.0, 179.0, 1.0, 1.0));
    let peak = acc.peak().expect("line has votes");
    println!("{} edge pixels, {} votes", edges.count(), acc.total());
    println!("peak theta {:.0} rho {:.1} count {}", peak.theta, peak.rho, peak.count);
}
