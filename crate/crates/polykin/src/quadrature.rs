//! Gaussian quadrature rules built by the Golub-Welsch method.
//!
//! Moment integrals of the distribution functions factorize into three
//! Gauss-Hermite directions (weight `e^{-x^2}` on the real line) and one
//! generalized Gauss-Laguerre direction (weight `x^alpha e^{-x}` on
//! `[0, inf)`) for the internal energy. Nodes are the eigenvalues of the
//! symmetric Jacobi matrix of the orthogonal-polynomial recurrence and
//! weights come from the first components of its eigenvectors.
//!
//! An `n`-point rule integrates polynomials up to degree `2n - 1`
//! exactly; the rest of the crate uses `n = 40` per direction.

use crate::special::gamma_fn;

/// Nodes and weights of a Gaussian quadrature rule, nodes ascending.
#[derive(Debug, Clone)]
pub struct GaussRule {
    /// Quadrature nodes in ascending order (dimensionless).
    pub nodes: Vec<f64>,
    /// Positive quadrature weights, same length as `nodes`.
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// `n`-point Gauss-Hermite rule for `int f(x) e^{-x^2} dx` over the
    /// real line.
    pub fn hermite(n: usize) -> Self {
        assert!(n > 0, "quadrature rule needs at least one node");
        let off: Vec<f64> = (1..n).map(|k| (k as f64 / 2.0).sqrt()).collect();
        Self::from_jacobi(&vec![0.0; n], &off, std::f64::consts::PI.sqrt())
    }

    /// `n`-point generalized Gauss-Laguerre rule for
    /// `int f(x) x^alpha e^{-x} dx` over `[0, inf)`, `alpha > -1`.
    pub fn generalized_laguerre(n: usize, alpha: f64) -> Self {
        assert!(n > 0, "quadrature rule needs at least one node");
        assert!(alpha > -1.0, "laguerre weight needs alpha > -1");
        let diag: Vec<f64> = (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect();
        let off: Vec<f64> = (1..n)
            .map(|k| (k as f64 * (k as f64 + alpha)).sqrt())
            .collect();
        let mu0 = gamma_fn(alpha + 1.0).expect("alpha > -1 keeps Gamma finite");
        Self::from_jacobi(&diag, &off, mu0)
    }

    /// Golub-Welsch: eigen-decompose the symmetric tridiagonal Jacobi
    /// matrix; nodes are eigenvalues, weight_i = mu0 * (v_i[0])^2.
    fn from_jacobi(diag: &[f64], off: &[f64], mu0: f64) -> Self {
        let n = diag.len();
        let mut d = diag.to_vec();
        let mut e = off.to_vec();
        e.push(0.0);
        // Only the first component of each eigenvector enters the
        // weights, so a single row of the rotation product is carried.
        let mut first = vec![0.0; n];
        first[0] = 1.0;
        tridiagonal_ql(&mut d, &mut e, &mut first);
        let mut pairs: Vec<(f64, f64)> = d
            .iter()
            .zip(&first)
            .map(|(&node, &v0)| (node, mu0 * v0 * v0))
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        GaussRule {
            nodes: pairs.iter().map(|p| p.0).collect(),
            weights: pairs.iter().map(|p| p.1).collect(),
        }
    }

    /// `sum_i w_i f(x_i)`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// QL iteration with implicit shifts for a symmetric tridiagonal matrix.
///
/// `d` holds the diagonal (overwritten with eigenvalues), `e` the
/// subdiagonal in `e[0..n-1]` with `e[n-1]` scratch, and `row` one row of
/// the accumulated orthogonal transform (overwritten with that row of
/// the eigenvector matrix). Eigenvalues converge to machine precision,
/// which the quadrature accuracy relies on.
fn tridiagonal_ql(d: &mut [f64], e: &mut [f64], row: &mut [f64]) {
    let n = d.len();
    for l in 0..n {
        let mut iter = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() + dd == dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            assert!(iter <= 50, "tridiagonal QL failed to converge");
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let mut s = 1.0;
            let mut c = 1.0;
            let mut p = 0.0;
            let mut underflow = false;
            for i in (l..m).rev() {
                let mut f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = i > l;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                f = row[i + 1];
                row[i + 1] = s * row[i] + c * f;
                row[i] = c * row[i] - s * f;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
}
