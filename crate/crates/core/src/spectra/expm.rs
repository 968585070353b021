//! Matrix exponential by scaling and squaring with diagonal Padé kernels
//! (Higham 2005 degree selection).

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539398330063230e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA_13: f64 = 5.371920351148152;

fn pade_coefficients(m: usize) -> &'static [f64] {
    match m {
        3 => &[120.0, 60.0, 12.0, 1.0],
        5 => &[30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0],
        7 => &[17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0],
        9 => &[
            17643225600.0,
            8821612800.0,
            2075673600.0,
            302702400.0,
            30270240.0,
            2162160.0,
            110880.0,
            3960.0,
            90.0,
            1.0,
        ],
        13 => &[
            64764752532480000.0,
            32382376266240000.0,
            7771770303897600.0,
            1187353796428800.0,
            129060195264000.0,
            10559470521600.0,
            670442572800.0,
            33522128640.0,
            1323241920.0,
            40840800.0,
            960960.0,
            16380.0,
            182.0,
            1.0,
        ],
        _ => unreachable!("unsupported Padé degree {m}"),
    }
}

fn lincomb(terms: &[(f64, &RealMatrix)], dim: usize) -> RealMatrix {
    let mut out = RealMatrix::zeros(dim);
    for (c, m) in terms {
        out = &out + &m.scaled(*c);
    }
    out
}

/// Returns `(U, V)` with `r_m(A) = (V - U)^{-1} (V + U)`.
fn pade_uv(a: &RealMatrix, m: usize) -> (RealMatrix, RealMatrix) {
    let n = a.dim();
    let b = pade_coefficients(m);
    let id = RealMatrix::identity(n);
    let a2 = a * a;
    if m == 13 {
        let a4 = &a2 * &a2;
        let a6 = &a4 * &a2;
        let inner_u = &a6 * &lincomb(&[(b[13], &a6), (b[11], &a4), (b[9], &a2)], n);
        let u_poly = &inner_u + &lincomb(&[(b[7], &a6), (b[5], &a4), (b[3], &a2), (b[1], &id)], n);
        let u = a * &u_poly;
        let inner_v = &a6 * &lincomb(&[(b[12], &a6), (b[10], &a4), (b[8], &a2)], n);
        let v = &inner_v + &lincomb(&[(b[6], &a6), (b[4], &a4), (b[2], &a2), (b[0], &id)], n);
        return (u, v);
    }
    // even powers A^0, A^2, ..., A^{m-1}
    let mut powers = vec![id];
    for _ in 0..m / 2 {
        let next = powers.last().unwrap() * &a2;
        powers.push(next);
    }
    let mut u_poly = RealMatrix::zeros(n);
    let mut v = RealMatrix::zeros(n);
    for (k, p) in powers.iter().enumerate() {
        u_poly = &u_poly + &p.scaled(b[2 * k + 1]);
        v = &v + &p.scaled(b[2 * k]);
    }
    (a * &u_poly, v)
}

/// `e^{t m}`.
pub fn matrix_exponential(m: &RealMatrix, t: f64) -> Result<RealMatrix> {
    if !t.is_finite() {
        return Err(Error::InvalidInput(format!("time {t} is not finite")));
    }
    let n = m.dim();
    if t == 0.0 {
        return Ok(RealMatrix::identity(n));
    }
    let a = m.scaled(t);
    let norm = a.norm_1();
    if !norm.is_finite() {
        return Err(Error::ExpOverflow { t });
    }

    let mut result = None;
    for (deg, theta) in THETA {
        if norm <= theta {
            result = Some(pade_solve(&a, deg, 0));
            break;
        }
    }
    let result = match result {
        Some(r) => r,
        None => {
            let s = if norm > THETA_13 {
                (norm / THETA_13).log2().ceil().max(0.0) as i32
            } else {
                0
            };
            pade_solve(&a.scaled(0.5f64.powi(s)), 13, s as u32)
        }
    };
    match result {
        Some(r) if r.is_finite() => Ok(r),
        _ => Err(Error::ExpOverflow { t }),
    }
}

fn pade_solve(a: &RealMatrix, deg: usize, squarings: u32) -> Option<RealMatrix> {
    let (u, v) = pade_uv(a, deg);
    let mut r = (&v - &u).solve(&(&v + &u))?;
    for _ in 0..squarings {
        r = &r * &r;
        if !r.is_finite() {
            return None;
        }
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_matrix_gives_identity() {
        let z = RealMatrix::zeros(3);
        for t in [0.0, 1.0, -7.5, 1e6] {
            assert_eq!(matrix_exponential(&z, t).unwrap(), RealMatrix::identity(3));
        }
    }

    #[test]
    fn diagonal_case() {
        let m = RealMatrix::diag(&[-0.2, -0.5]).unwrap();
        let e = matrix_exponential(&m, 1.0).unwrap();
        assert!((e[(0, 0)] - (-0.2f64).exp()).abs() < 1e-15);
        assert!((e[(1, 1)] - (-0.5f64).exp()).abs() < 1e-15);
        assert_eq!(e[(0, 1)], 0.0);
    }

    #[test]
    fn rotation_generator_all_degrees() {
        // exp(t [[0,-1],[1,0]]) = rotation by t; exercises each Padé degree
        let j = RealMatrix::from_rows(vec![vec![0.0, -1.0], vec![1.0, 0.0]]).unwrap();
        for t in [1e-3, 0.1, 0.5, 1.5, 4.0, 25.0] {
            let e = matrix_exponential(&j, t).unwrap();
            let want = RealMatrix::from_rows(vec![vec![t.cos(), -t.sin()], vec![t.sin(), t.cos()]])
                .unwrap();
            assert!((&e - &want).norm_fro() < 1e-12 * (1.0 + t), "t = {t}");
        }
    }

    #[test]
    fn jordan_block() {
        let m = RealMatrix::from_rows(vec![vec![-0.3, 1.0], vec![0.0, -0.3]]).unwrap();
        let t = 2.5;
        let e = matrix_exponential(&m, t).unwrap();
        let et = (-0.3 * t).exp();
        assert!((e[(0, 0)] - et).abs() < 1e-14);
        assert!((e[(0, 1)] - t * et).abs() < 1e-14);
    }

    #[test]
    fn overflow_is_reported() {
        let m = RealMatrix::diag(&[5.0]).unwrap();
        assert!(matches!(matrix_exponential(&m, 1e3), Err(Error::ExpOverflow { .. })));
    }
}
