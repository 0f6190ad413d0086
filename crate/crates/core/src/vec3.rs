//! Small fixed-size vector and linear-solve helpers.
//!
//! Everything in this crate lives in ambient dimension ≤ 3, so vectors are
//! plain `[f64; 3]` (unused trailing components stay zero) and the only dense
//! solves are k×k with k ≤ 9.

pub type Vec3 = [f64; 3];

pub fn dot(a: Vec3, b: Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn norm(a: Vec3) -> f64 {
    dot(a, a).sqrt()
}

pub fn scale(a: Vec3, s: f64) -> Vec3 {
    [a[0] * s, a[1] * s, a[2] * s]
}

pub fn add(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

pub fn sub(a: Vec3, b: Vec3) -> Vec3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

pub fn axpy(y: Vec3, s: f64, x: Vec3) -> Vec3 {
    [y[0] + s * x[0], y[1] + s * x[1], y[2] + s * x[2]]
}

pub fn cross(a: Vec3, b: Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn normalize(a: Vec3) -> Vec3 {
    let n = norm(a);
    scale(a, 1.0 / n)
}

/// Geodesic angle between unit vectors, stable near 0 and π.
pub fn angle_between(a: Vec3, b: Vec3) -> f64 {
    2.0 * (norm(sub(a, b)) / 2.0).clamp(-1.0, 1.0).asin()
}

/// Any unit vector orthogonal to `a` (|a| = 1).
pub fn any_orthogonal(a: Vec3) -> Vec3 {
    let pick = if a[0].abs() <= a[1].abs() && a[0].abs() <= a[2].abs() {
        [1.0, 0.0, 0.0]
    } else if a[1].abs() <= a[2].abs() {
        [0.0, 1.0, 0.0]
    } else {
        [0.0, 0.0, 1.0]
    };
    normalize(sub(pick, scale(a, dot(pick, a))))
}

/// Rotation matrix (rows) mapping unit vector `from` to unit vector `to`.
pub fn rotation_between(from: Vec3, to: Vec3) -> [Vec3; 3] {
    let c = dot(from, to);
    if c > 1.0 - 1e-14 {
        return [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    }
    if c < -1.0 + 1e-14 {
        // 180° about any axis orthogonal to `from`.
        let u = any_orthogonal(from);
        let mut m = [[0.0; 3]; 3];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = 2.0 * u[i] * u[j] - if i == j { 1.0 } else { 0.0 };
            }
        }
        return m;
    }
    let v = cross(from, to);
    let k = 1.0 / (1.0 + c);
    let mut m = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let skew = match (i, j) {
                (0, 1) => -v[2],
                (0, 2) => v[1],
                (1, 0) => v[2],
                (1, 2) => -v[0],
                (2, 0) => -v[1],
                (2, 1) => v[0],
                _ => 0.0,
            };
            m[i][j] = if i == j { 1.0 } else { 0.0 } + skew + k * v[i] * v[j]
                - if i == j { k * dot(v, v) } else { 0.0 };
        }
    }
    // Rodrigues with axis v = from×to, built componentwise above:
    // I + [v]_x + [v]_x² / (1+c); the diagonal correction folds v⊗v − |v|²I.
    m
}

pub fn mat_apply(m: &[Vec3; 3], x: Vec3) -> Vec3 {
    [dot(m[0], x), dot(m[1], x), dot(m[2], x)]
}

/// Solve `A x = b` in place for k ≤ MAX, partial pivoting. Returns None when
/// the pivot falls below `tol` (rank-deficient system).
pub fn solve_dense(a: &mut Vec<Vec<f64>>, b: &mut Vec<f64>, tol: f64) -> Option<Vec<f64>> {
    let k = b.len();
    for col in 0..k {
        let (piv, piv_abs) = (col..k)
            .map(|r| (r, a[r][col].abs()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .unwrap();
        if piv_abs <= tol {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for r in col + 1..k {
            let f = a[r][col] / a[col][col];
            if f == 0.0 {
                continue;
            }
            for c in col..k {
                a[r][c] -= f * a[col][c];
            }
            b[r] -= f * b[col];
        }
    }
    let mut x = vec![0.0; k];
    for row in (0..k).rev() {
        let mut s = b[row];
        for c in row + 1..k {
            s -= a[row][c] * x[c];
        }
        x[row] = s / a[row][row];
    }
    Some(x)
}

/// Eigenvalues (ascending) of a symmetric 2×2 matrix [[a, b], [b, c]].
pub fn sym2_eigenvalues(a: f64, b: f64, c: f64) -> (f64, f64) {
    let mean = 0.5 * (a + c);
    let disc = (0.5 * (a - c)).hypot(b);
    (mean - disc, mean + disc)
}
