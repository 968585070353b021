//! Eigenvalues of a real matrix via Hessenberg reduction followed by the
//! Francis double-shift QR iteration to real Schur form.
//!
//! The iteration follows the classical EISPACK `orthes`/`hqr` pair (as in
//! JAMA), keeping only the eigenvalue part.

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;

/// Reduces `h` (row-major, `n×n`) to upper Hessenberg form by Householder
/// similarity transforms.
fn hessenberg(h: &mut [f64], n: usize) {
    if n < 3 {
        return;
    }
    let mut ort = vec![0.0; n];
    let high = n - 1;
    for m in 1..high {
        let scale: f64 = (m..=high).map(|i| h[i * n + m - 1].abs()).sum();
        if scale == 0.0 {
            continue;
        }
        let mut hh = 0.0;
        for i in (m..=high).rev() {
            ort[i] = h[i * n + m - 1] / scale;
            hh += ort[i] * ort[i];
        }
        let mut g = hh.sqrt();
        if ort[m] > 0.0 {
            g = -g;
        }
        hh -= ort[m] * g;
        ort[m] -= g;

        for j in m..n {
            let f: f64 = (m..=high).rev().map(|i| ort[i] * h[i * n + j]).sum::<f64>() / hh;
            for i in m..=high {
                h[i * n + j] -= f * ort[i];
            }
        }
        for i in 0..=high {
            let f: f64 = (m..=high).rev().map(|j| ort[j] * h[i * n + j]).sum::<f64>() / hh;
            for j in m..=high {
                h[i * n + j] -= f * ort[j];
            }
        }
        ort[m] *= scale;
        h[m * n + m - 1] = scale * g;
    }
}

/// All `d` eigenvalues of `m` as `(re, im)` pairs; complex eigenvalues come in
/// adjacent conjugate pairs.
pub fn eigenvalues_raw(m: &RealMatrix) -> Result<Vec<(f64, f64)>> {
    let nn = m.dim();
    let mut h = m.as_slice().to_vec();
    hessenberg(&mut h, nn);
    let at = |h: &[f64], i: usize, j: usize| h[i * nn + j];

    let mut d = vec![0.0; nn];
    let mut e = vec![0.0; nn];
    let eps = f64::EPSILON;
    let cap = 100 * nn * nn;
    let mut total_iter = 0usize;

    let mut norm = 0.0;
    for i in 0..nn {
        for j in i.saturating_sub(1)..nn {
            norm += at(&h, i, j).abs();
        }
    }

    let mut n = nn as isize - 1;
    let low: isize = 0;
    let mut exshift = 0.0;
    let mut iter = 0;
    let (mut p, mut q, mut r, mut s, mut z);
    let (mut w, mut x, mut y);

    while n >= low {
        let nu = n as usize;
        // look for a single small subdiagonal element
        let mut l = n;
        while l > low {
            let lu = l as usize;
            s = at(&h, lu - 1, lu - 1).abs() + at(&h, lu, lu).abs();
            if s == 0.0 {
                s = norm;
            }
            if at(&h, lu, lu - 1).abs() < eps * s {
                break;
            }
            l -= 1;
        }

        if l == n {
            // one root
            h[nu * nn + nu] += exshift;
            d[nu] = h[nu * nn + nu];
            e[nu] = 0.0;
            n -= 1;
            iter = 0;
        } else if l == n - 1 {
            // two roots
            w = at(&h, nu, nu - 1) * at(&h, nu - 1, nu);
            p = (at(&h, nu - 1, nu - 1) - at(&h, nu, nu)) / 2.0;
            q = p * p + w;
            z = q.abs().sqrt();
            h[nu * nn + nu] += exshift;
            h[(nu - 1) * nn + nu - 1] += exshift;
            x = at(&h, nu, nu);
            if q >= 0.0 {
                z = if p >= 0.0 { p + z } else { p - z };
                d[nu - 1] = x + z;
                d[nu] = d[nu - 1];
                if z != 0.0 {
                    d[nu] = x - w / z;
                }
                e[nu - 1] = 0.0;
                e[nu] = 0.0;
            } else {
                d[nu - 1] = x + p;
                d[nu] = x + p;
                e[nu - 1] = z;
                e[nu] = -z;
            }
            n -= 2;
            iter = 0;
        } else {
            x = at(&h, nu, nu);
            y = 0.0;
            w = 0.0;
            if l < n {
                y = at(&h, nu - 1, nu - 1);
                w = at(&h, nu, nu - 1) * at(&h, nu - 1, nu);
            }
            // exceptional shifts
            if iter == 10 {
                exshift += x;
                for i in 0..=nu {
                    h[i * nn + i] -= x;
                }
                s = at(&h, nu, nu - 1).abs() + at(&h, nu - 1, nu - 2).abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            if iter == 30 {
                s = (y - x) / 2.0;
                s = s * s + w;
                if s > 0.0 {
                    s = s.sqrt();
                    if y < x {
                        s = -s;
                    }
                    s = x - w / ((y - x) / 2.0 + s);
                    for i in 0..=nu {
                        h[i * nn + i] -= s;
                    }
                    exshift += s;
                    x = 0.964;
                    y = x;
                    w = x;
                }
            }
            iter += 1;
            total_iter += 1;
            if total_iter > cap {
                return Err(Error::EigenNoConvergence { iterations: cap });
            }

            // look for two consecutive small subdiagonal elements
            let mut mm = n - 2;
            let (mut pp, mut qq, mut rr);
            loop {
                let mu = mm as usize;
                z = at(&h, mu, mu);
                rr = x - z;
                s = y - z;
                pp = (rr * s - w) / at(&h, mu + 1, mu) + at(&h, mu, mu + 1);
                qq = at(&h, mu + 1, mu + 1) - z - rr - s;
                rr = at(&h, mu + 2, mu + 1);
                s = pp.abs() + qq.abs() + rr.abs();
                pp /= s;
                qq /= s;
                rr /= s;
                if mm == l {
                    break;
                }
                if at(&h, mu, mu - 1).abs() * (qq.abs() + rr.abs())
                    < eps
                        * (pp.abs()
                            * (at(&h, mu - 1, mu - 1).abs() + z.abs() + at(&h, mu + 1, mu + 1).abs()))
                {
                    break;
                }
                mm -= 1;
            }
            let mu = mm as usize;
            for i in mu + 2..=nu {
                h[i * nn + i - 2] = 0.0;
                if i > mu + 2 {
                    h[i * nn + i - 3] = 0.0;
                }
            }
            p = pp;
            q = qq;
            r = rr;

            // double QR step on rows l..n and columns mm..n
            for k in mu..nu {
                let notlast = k != nu - 1;
                if k != mu {
                    p = at(&h, k, k - 1);
                    q = at(&h, k + 1, k - 1);
                    r = if notlast { at(&h, k + 2, k - 1) } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x == 0.0 {
                        continue;
                    }
                    p /= x;
                    q /= x;
                    r /= x;
                }
                s = (p * p + q * q + r * r).sqrt();
                if p < 0.0 {
                    s = -s;
                }
                if s != 0.0 {
                    if k != mu {
                        h[k * nn + k - 1] = -s * x;
                    } else if l != mm {
                        h[k * nn + k - 1] = -h[k * nn + k - 1];
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    z = r / s;
                    q /= p;
                    r /= p;

                    for j in k..nn {
                        let mut pj = h[k * nn + j] + q * h[(k + 1) * nn + j];
                        if notlast {
                            pj += r * h[(k + 2) * nn + j];
                            h[(k + 2) * nn + j] -= pj * z;
                        }
                        h[k * nn + j] -= pj * x;
                        h[(k + 1) * nn + j] -= pj * y;
                    }
                    for i in 0..=nu.min(k + 3) {
                        let mut pi = x * h[i * nn + k] + y * h[i * nn + k + 1];
                        if notlast {
                            pi += z * h[i * nn + k + 2];
                            h[i * nn + k + 2] -= pi * r;
                        }
                        h[i * nn + k] -= pi;
                        h[i * nn + k + 1] -= pi * q;
                    }
                }
            }
        }
    }

    Ok(d.into_iter().zip(e).collect())
}
