//! Reference matrices used by the demos, the command line tool and the tests.

use crate::matrix::RealMatrix;

/// `diag(-0.2, -0.5)`.
pub fn diagonal_pair() -> RealMatrix {
    RealMatrix::diag(&[-0.2, -0.5]).expect("finite")
}

/// Damped rotation with eigenvalues `-0.1 ± 0.3i`.
pub fn damped_rotation() -> RealMatrix {
    RealMatrix::from_rows(vec![vec![-0.1, -0.3], vec![0.3, -0.1]]).expect("square")
}

/// 4×4 matrix with eigenvalues -0.1, -0.2, -0.5, -0.6.
pub fn four_real() -> RealMatrix {
    RealMatrix::from_rows(vec![
        vec![4.8, 7.5, 16.0, 12.0],
        vec![-3.0, -4.7, -9.6, -7.2],
        vec![-3.2, -4.8, -5.4, -3.6],
        vec![4.0, 6.0, 6.0, 3.9],
    ])
    .expect("square")
}

/// 4×4 matrix with eigenvalues `-0.1 ± 0.7i` and `-0.5 ± 0.3i`.
pub fn two_rotations() -> RealMatrix {
    RealMatrix::from_rows(vec![
        vec![22.8, 15.7, -74.5, -41.9],
        vec![-11.6, -8.6, 35.8, 20.4],
        vec![-1.2, -0.3, 5.8, 3.0],
        vec![10.2, 5.7, -41.4, -21.2],
    ])
    .expect("square")
}

/// 4×4 matrix with a double eigenvalue -0.3 and the pair `-0.8 ± 0.9i`.
pub fn double_root() -> RealMatrix {
    RealMatrix::from_rows(vec![
        vec![-1.24, -0.29, -0.58, -0.69],
        vec![-0.765, -1.515, -1.105, -0.415],
        vec![1.31, 1.66, 0.37, 0.86],
        vec![0.635, -0.315, 0.695, 0.185],
    ])
    .expect("square")
}

/// All reference matrices with short names, in a fixed order.
pub fn all() -> Vec<(&'static str, RealMatrix)> {
    vec![
        ("diagonal-pair", diagonal_pair()),
        ("damped-rotation", damped_rotation()),
        ("four-real", four_real()),
        ("two-rotations", two_rotations()),
        ("double-root", double_root()),
    ]
}

pub fn by_name(name: &str) -> Option<RealMatrix> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, m)| m)
}
