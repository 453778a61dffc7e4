#![allow(dead_code)]

use plate_deblur::{blur, make_psf, render_plate, Boundary, Image, KernelParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

pub const GRID_ANGLES: [f64; 7] = [40.0, 55.0, 70.0, 85.0, 100.0, 115.0, 130.0];
pub const GRID_LENGTHS: [usize; 7] = [10, 15, 20, 25, 30, 35, 40];
pub const PLATE_TEXT: &str = "KA-01-1234";

pub fn grid() -> Vec<(f64, usize)> {
    GRID_ANGLES
        .iter()
        .flat_map(|&a| GRID_LENGTHS.iter().map(move |&l| (a, l)))
        .collect()
}

pub fn plate() -> Image {
    render_plate(PLATE_TEXT, 256, 256).unwrap()
}

pub fn wrap_blurred(sharp: &Image, angle: f64, length: usize) -> Image {
    blur(sharp, &make_psf(KernelParams::new(angle, length).unwrap()).unwrap(), Boundary::Wrap).unwrap()
}

pub fn random_plane(w: usize, h: usize, seed: u64) -> Image {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    Image::from_fn(w, h, |_, _| rng.random::<f64>())
}
