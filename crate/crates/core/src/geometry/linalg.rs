//! Small dense kernels used in the hull and projection inner loops.

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

#[inline]
pub fn dist2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Determinant of a row-major n×n matrix via partial-pivot elimination.
/// The buffer is overwritten.
pub fn det_in_place(m: &mut [f64], n: usize) -> f64 {
    match n {
        0 => return 1.0,
        1 => return m[0],
        2 => return m[0] * m[3] - m[1] * m[2],
        3 => {
            return m[0] * (m[4] * m[8] - m[5] * m[7]) - m[1] * (m[3] * m[8] - m[5] * m[6])
                + m[2] * (m[3] * m[7] - m[4] * m[6])
        }
        _ => {}
    }
    let mut det = 1.0;
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].abs();
        for r in col + 1..n {
            let v = m[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best == 0.0 {
            return 0.0;
        }
        if piv != col {
            for c in 0..n {
                m.swap(col * n + c, piv * n + c);
            }
            det = -det;
        }
        let p = m[col * n + col];
        det *= p;
        for r in col + 1..n {
            let f = m[r * n + col] / p;
            if f != 0.0 {
                for c in col..n {
                    m[r * n + c] -= f * m[col * n + c];
                }
            }
        }
    }
    det
}

/// Solves `a x = b` (row-major n×n) with partial pivoting. Returns `None`
/// when a pivot falls below `eps` times the largest entry.
pub fn solve(a: &mut [f64], b: &mut [f64], n: usize, eps: f64) -> Option<()> {
    let scale = a.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    for col in 0..n {
        let mut piv = col;
        let mut best = a[col * n + col].abs();
        for r in col + 1..n {
            let v = a[r * n + col].abs();
            if v > best {
                best = v;
                piv = r;
            }
        }
        if best <= eps * scale {
            return None;
        }
        if piv != col {
            for c in 0..n {
                a.swap(col * n + c, piv * n + c);
            }
            b.swap(col, piv);
        }
        let p = a[col * n + col];
        for r in col + 1..n {
            let f = a[r * n + col] / p;
            if f != 0.0 {
                for c in col..n {
                    a[r * n + c] -= f * a[col * n + c];
                }
                b[r] -= f * b[col];
            }
        }
    }
    for col in (0..n).rev() {
        let mut s = b[col];
        for c in col + 1..n {
            s -= a[col * n + c] * b[c];
        }
        b[col] = s / a[col * n + col];
    }
    Some(())
}

/// Unnormalised normal of the hyperplane through `d` points in R^d
/// (generalised cross product of the edge vectors from the first point).
pub fn hyperplane_normal(pts: &[&[f64]], out: &mut [f64]) {
    let d = out.len();
    debug_assert_eq!(pts.len(), d);
    match d {
        2 => {
            let ex = pts[1][0] - pts[0][0];
            let ey = pts[1][1] - pts[0][1];
            out[0] = ey;
            out[1] = -ex;
        }
        3 => {
            let a = [pts[1][0] - pts[0][0], pts[1][1] - pts[0][1], pts[1][2] - pts[0][2]];
            let b = [pts[2][0] - pts[0][0], pts[2][1] - pts[0][1], pts[2][2] - pts[0][2]];
            out[0] = a[1] * b[2] - a[2] * b[1];
            out[1] = a[2] * b[0] - a[0] * b[2];
            out[2] = a[0] * b[1] - a[1] * b[0];
        }
        _ => {
            // cofactor expansion along a virtual first row of unit vectors
            let rows = d - 1;
            let mut edges = vec![0.0; rows * d];
            for r in 0..rows {
                for c in 0..d {
                    edges[r * d + c] = pts[r + 1][c] - pts[0][c];
                }
            }
            let mut minor = vec![0.0; rows * rows];
            for (i, o) in out.iter_mut().enumerate() {
                for r in 0..rows {
                    let mut k = 0;
                    for c in 0..d {
                        if c != i {
                            minor[r * rows + k] = edges[r * d + c];
                            k += 1;
                        }
                    }
                }
                let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                *o = sign * det_in_place(&mut minor, rows);
            }
        }
    }
}

/// `n!` as a float.
pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Volume of the unit ball in R^d.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * std::f64::consts::PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// |det(p_1 - p_0, ..., p_d - p_0)| / d!
pub fn simplex_volume(pts: &[&[f64]]) -> f64 {
    let d = pts.len() - 1;
    let mut m = vec![0.0; d * d];
    for r in 0..d {
        for c in 0..d {
            m[r * d + c] = pts[r + 1][c] - pts[0][c];
        }
    }
    det_in_place(&mut m, d).abs() / factorial(d)
}

/// (k-1)-dimensional volume of the simplex spanned by `k` points in R^d,
/// through the Gram determinant of its edges.
pub fn simplex_measure(pts: &[&[f64]]) -> f64 {
    let k = pts.len() - 1;
    if k == 0 {
        return 1.0;
    }
    let d = pts[0].len();
    let edges: Vec<Vec<f64>> = (1..=k).map(|r| (0..d).map(|c| pts[r][c] - pts[0][c]).collect()).collect();
    let mut gram = vec![0.0; k * k];
    for i in 0..k {
        for j in 0..k {
            gram[i * k + j] = dot(&edges[i], &edges[j]);
        }
    }
    det_in_place(&mut gram, k).max(0.0).sqrt() / factorial(k)
}
