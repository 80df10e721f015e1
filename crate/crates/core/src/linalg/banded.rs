//! Eigenvalues of banded Hermitian matrices by Givens reduction to real
//! tridiagonal form followed by Sturm-sequence bisection.

use faer::{c64, Mat};

/// Hermitian matrix stored by its diagonal and lower bands:
/// `lower[k - 1][m]` holds H[m + k][m].
#[derive(Debug, Clone, PartialEq)]
pub struct BandedHermitian {
    diag: Vec<f64>,
    lower: Vec<Vec<c64>>,
}

impl BandedHermitian {
    pub fn new(diag: Vec<f64>, bandwidth: usize) -> Self {
        let n = diag.len();
        let lower = (1..=bandwidth)
            .map(|k| vec![c64::new(0.0, 0.0); n.saturating_sub(k)])
            .collect();
        Self { diag, lower }
    }

    pub fn dimension(&self) -> usize {
        self.diag.len()
    }

    pub fn bandwidth(&self) -> usize {
        self.lower.len()
    }

    pub fn diagonal(&self) -> &[f64] {
        &self.diag
    }

    pub fn band(&self, k: usize) -> &[c64] {
        &self.lower[k - 1]
    }

    /// Adds `value` at (m + k, m) and its conjugate at (m, m + k).
    pub fn add_lower(&mut self, k: usize, m: usize, value: c64) {
        self.lower[k - 1][m] += value;
    }

    pub fn to_dense(&self) -> Mat<c64> {
        let n = self.dimension();
        let mut h = Mat::<c64>::zeros(n, n);
        for (m, &d) in self.diag.iter().enumerate() {
            h[(m, m)] = c64::new(d, 0.0);
        }
        for (k, band) in self.lower.iter().enumerate() {
            for (m, &z) in band.iter().enumerate() {
                h[(m + k + 1, m)] = z;
                h[(m, m + k + 1)] = z.conj();
            }
        }
        h
    }

    /// Real symmetric tridiagonal matrix unitarily similar to this one,
    /// as (diagonal, off-diagonal magnitudes).
    pub fn tridiagonalize(&self) -> (Vec<f64>, Vec<f64>) {
        let mut w = Work::from_banded(self);
        let n = w.n;
        let b = w.b;
        if b >= 2 {
            for c in 0..n.saturating_sub(2) {
                for d in (2..=b).rev() {
                    let p = c + d;
                    if p >= n {
                        continue;
                    }
                    if !w.rotate(p, c) {
                        continue;
                    }
                    let mut row = p + b;
                    let mut col = p - 1;
                    while row < n {
                        w.rotate(row, col);
                        col = row - 1;
                        row += b;
                    }
                }
            }
        }
        let diag = (0..n).map(|i| w.get(i, i).re).collect();
        let off = (0..n.saturating_sub(1)).map(|i| w.get(i + 1, i).norm()).collect();
        (diag, off)
    }

    /// Lowest `k` eigenvalues, ascending.
    pub fn lowest_eigenvalues(&self, k: usize) -> Vec<f64> {
        let (d, e) = self.tridiagonalize();
        tridiagonal_lowest(&d, &e, k)
    }
}

struct Work {
    n: usize,
    b: usize,
    // rows[d][j] = A[j + d][j], d = 0..=b + 1 (the extra row holds the bulge)
    rows: Vec<Vec<c64>>,
}

impl Work {
    fn from_banded(h: &BandedHermitian) -> Self {
        let n = h.dimension();
        let b = h.bandwidth();
        let mut rows = vec![vec![c64::new(0.0, 0.0); n]; b + 2];
        for (j, &d) in h.diag.iter().enumerate() {
            rows[0][j] = c64::new(d, 0.0);
        }
        for (k, band) in h.lower.iter().enumerate() {
            rows[k + 1][..band.len()].copy_from_slice(band);
        }
        Self { n, b, rows }
    }

    fn get(&self, i: usize, j: usize) -> c64 {
        if i >= j {
            let d = i - j;
            if d <= self.b + 1 {
                self.rows[d][j]
            } else {
                c64::new(0.0, 0.0)
            }
        } else {
            self.get(j, i).conj()
        }
    }

    fn set(&mut self, i: usize, j: usize, v: c64) {
        debug_assert!(i >= j);
        let d = i - j;
        if d <= self.b + 1 {
            self.rows[d][j] = v;
        }
    }

    /// Zeroes A[p][c] (c < p − 1) with a rotation in the (p − 1, p) plane
    /// applied as a similarity. Returns false when the entry is already zero.
    fn rotate(&mut self, p: usize, c: usize) -> bool {
        let x = self.get(p - 1, c);
        let y = self.get(p, c);
        let ay = y.norm();
        if ay == 0.0 {
            return false;
        }
        let ax = x.norm();
        let rho = ax.hypot(ay);
        let (g, s) = if ax == 0.0 {
            (0.0, y.conj() / ay)
        } else {
            (ax / rho, (x / ax) * y.conj() / rho)
        };
        // G = [[g, s], [-conj(s), g]]; A <- G A Gᴴ
        let lo = p.saturating_sub(self.b + 2);
        for j in lo..p - 1 {
            let a = self.get(p - 1, j);
            let bb = self.get(p, j);
            self.set(p - 1, j, a * g + s * bb);
            self.set(p, j, -s.conj() * a + bb * g);
        }
        self.set(p, c, c64::new(0.0, 0.0));

        let a11 = self.get(p - 1, p - 1);
        let a21 = self.get(p, p - 1);
        let a22 = self.get(p, p);
        let a12 = a21.conj();
        // M = G B
        let m11 = a11 * g + s * a21;
        let m12 = a12 * g + s * a22;
        let m21 = -s.conj() * a11 + a21 * g;
        let m22 = -s.conj() * a12 + a22 * g;
        // B' = M Gᴴ, Gᴴ = [[g, -s], [conj(s), g]]
        let n11 = m11 * g + m12 * s.conj();
        let n21 = m21 * g + m22 * s.conj();
        let n22 = -m21 * s + m22 * g;
        self.set(p - 1, p - 1, c64::new(n11.re, 0.0));
        self.set(p, p - 1, n21);
        self.set(p, p, c64::new(n22.re, 0.0));

        let hi = (p + self.b).min(self.n - 1);
        for i in p + 1..=hi {
            let xa = self.get(i, p - 1);
            let ya = self.get(i, p);
            self.set(i, p - 1, xa * g + ya * s.conj());
            self.set(i, p, -xa * s + ya * g);
        }
        true
    }
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(d: &[f64], e2: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = d[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..d.len() {
        q = d[i] - x - e2[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Lowest `k` eigenvalues of the real symmetric tridiagonal matrix with
/// diagonal `d` and off-diagonal `e`, by bisection.
pub fn tridiagonal_lowest(d: &[f64], e: &[f64], k: usize) -> Vec<f64> {
    let n = d.len();
    let k = k.min(n);
    if n == 0 {
        return Vec::new();
    }
    let e2: Vec<f64> = e.iter().map(|v| v * v).collect();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1].abs() } else { 0.0 } + if i + 1 < n { e[i].abs() } else { 0.0 };
        lo = lo.min(d[i] - r);
        hi = hi.max(d[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    let pivmin = f64::MIN_POSITIVE * e2.iter().copied().fold(1.0, f64::max);
    lo -= 4.0 * f64::EPSILON * scale + pivmin;
    hi += 4.0 * f64::EPSILON * scale + pivmin;

    let mut out = Vec::with_capacity(k);
    let mut floor = lo;
    for m in 0..k {
        let (mut a, mut b) = (floor, hi);
        let mut isolated_below = m == 0;
        let mut isolated_above = false;
        for _ in 0..256 {
            let mid = 0.5 * (a + b);
            if mid <= a || mid >= b {
                break;
            }
            if b - a <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) + pivmin {
                break;
            }
            if isolated_below && isolated_above {
                let (na, nb) = newton_in_bracket(d, &e2, m, a, b, pivmin);
                a = na;
                b = nb;
                break;
            }
            let c = sturm_count(d, &e2, mid, pivmin);
            if c > m {
                b = mid;
                isolated_above = c == m + 1;
            } else {
                a = mid;
                isolated_below = true;
            }
        }
        let value = 0.5 * (a + b);
        out.push(value);
        floor = a;
    }
    out
}

/// Sturm count below `x` and d/dx log|det(T − x)|.
fn sturm_count_and_slope(d: &[f64], e2: &[f64], x: f64, pivmin: f64) -> (usize, f64) {
    let mut count = 0;
    let mut q = d[0] - x;
    let mut dq = -1.0;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    let mut slope = dq / q;
    for i in 1..d.len() {
        let r = e2[i - 1] / q;
        dq = -1.0 + r * dq / q;
        q = d[i] - x - r;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        slope += dq / q;
    }
    (count, slope)
}

/// Safeguarded Newton iteration for eigenvalue `m`, the only one in (a, b).
fn newton_in_bracket(d: &[f64], e2: &[f64], m: usize, mut a: f64, mut b: f64, pivmin: f64) -> (f64, f64) {
    let mut x = 0.5 * (a + b);
    for _ in 0..100 {
        let (c, slope) = sturm_count_and_slope(d, e2, x, pivmin);
        if c > m {
            b = x;
        } else {
            a = x;
        }
        let width = b - a;
        if width <= 2.0 * f64::EPSILON * a.abs().max(b.abs()) + pivmin {
            break;
        }
        let step = -1.0 / slope;
        let mut next = x + step;
        if !(next > a && next < b) || !step.is_finite() {
            next = 0.5 * (a + b);
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs() + pivmin {
            // converged; collapse the bracket around x
            let eps = 4.0 * f64::EPSILON * x.abs() + pivmin;
            return ((x - eps).max(a), (x + eps).min(b));
        }
        x = next;
    }
    (a, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::eigenvalues;

    fn sample(n: usize, b: usize) -> BandedHermitian {
        let diag = (0..n).map(|i| ((i as f64) - (n as f64) / 2.0).powi(2) * 0.3).collect();
        let mut h = BandedHermitian::new(diag, b);
        for k in 1..=b {
            for m in 0..n - k {
                let t = (m * 7 + k * 3) as f64;
                h.add_lower(k, m, c64::new(t.sin() * 2.0, (t * 0.37).cos() / k as f64));
            }
        }
        h
    }

    #[test]
    fn matches_dense_solver() {
        for &(n, b) in &[(1, 1), (2, 1), (5, 2), (13, 1), (41, 2), (60, 3), (37, 5)] {
            let h = sample(n, b);
            let k = n.min(8);
            let fast = h.lowest_eigenvalues(k);
            let dense = eigenvalues(&h.to_dense(), k).unwrap();
            let scale = dense.iter().map(|v| v.abs()).fold(1.0, f64::max);
            for (a, b) in fast.iter().zip(&dense) {
                assert!((a - b).abs() < 1e-11 * scale, "n={n} {a} vs {b}");
            }
        }
    }

    #[test]
    fn tridiagonal_reduction_preserves_trace_and_frobenius() {
        let h = sample(30, 3);
        let (d, e) = h.tridiagonalize();
        let trace: f64 = h.diagonal().iter().sum();
        assert!((d.iter().sum::<f64>() - trace).abs() < 1e-10);
        let dense = h.to_dense();
        let fro: f64 = (0..30)
            .flat_map(|r| (0..30).map(move |c| (r, c)))
            .map(|(r, c)| dense[(r, c)].norm_sqr())
            .sum();
        let fro_t: f64 = d.iter().map(|v| v * v).sum::<f64>() + 2.0 * e.iter().map(|v| v * v).sum::<f64>();
        assert!((fro - fro_t).abs() < 1e-9 * fro);
    }

    #[test]
    fn degenerate_spectrum() {
        let h = BandedHermitian::new(vec![1.0, 1.0, 1.0, 2.0], 1);
        let v = h.lowest_eigenvalues(4);
        assert_eq!(v.len(), 4);
        for x in &v[..3] {
            assert!((x - 1.0).abs() < 1e-14);
        }
        assert!((v[3] - 2.0).abs() < 1e-14);
    }
}
