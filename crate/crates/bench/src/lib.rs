//! Fixed instances shared by the benchmarks.

use disjunct::generators::{random_triangulation, sos2, sosk, GridTriangulation};
use disjunct::Cdc;

/// SOS2 sizes used for the closed-form cover benchmarks.
pub const SOS2_SIZES: [usize; 4] = [16, 64, 256, 1024];

pub fn sos2_instance(n: usize) -> Cdc {
    sos2(n).expect("n >= 1")
}

/// SOS3 on six elements: small enough for the exact search and the
/// projection check.
pub fn sos3_six() -> Cdc {
    sosk(6, 3).expect("valid sizes")
}

/// A seeded 9 x 9 grid triangulation.
pub fn grid_nine() -> GridTriangulation {
    random_triangulation(9, 9, 11).expect("valid grid")
}
