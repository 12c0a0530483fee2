//! Small dense complex kernels: linear solves, matrix exponential, Sylvester
//! equations, eigenvalue bounds and Gaussian quadrature rules.
//!
//! Everything here is sized for the ≤16-dimensional systems that appear in
//! the physics modules. Nothing is sparse and nothing allocates per element.

use std::collections::HashMap;
use std::ops::{Add, Index, IndexMut, Mul, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type C64 = Complex64;

/// Condition estimates above this are reported as singular.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Largest dimension accepted by [`matrix_exponential`].
pub const MAX_EXP_DIM: usize = 16;

/// Largest Gauss–Hermite order accepted by [`gauss_hermite_rule`].
pub const MAX_HERMITE_ORDER: usize = 512;

pub const fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense complex matrix with row/column indexing.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<C64>);

impl ComplexMatrix {
    /// Builds a matrix from row-major entries. Rejects empty shapes and
    /// non-finite entries.
    pub fn new(rows: usize, cols: usize, entries: Vec<C64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::Contract("matrix dimensions must be ≥ 1".into()));
        }
        if entries.len() != rows * cols {
            return Err(Error::Contract(format!(
                "expected {} entries for a {rows}×{cols} matrix, got {}",
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Contract("matrix entries must be finite".into()));
        }
        Ok(Self(DMatrix::from_row_slice(rows, cols, &entries)))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self(DMatrix::zeros(rows, cols))
    }

    pub fn identity(n: usize) -> Self {
        Self(DMatrix::identity(n, n))
    }

    pub fn from_diagonal(diag: &[C64]) -> Self {
        Self(DMatrix::from_diagonal(&DVector::from_column_slice(diag)))
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl FnMut(usize, usize) -> C64) -> Self {
        Self(DMatrix::from_fn(rows, cols, f))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn as_inner(&self) -> &DMatrix<C64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<C64> {
        self.0
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn scale(&self, s: C64) -> Self {
        Self(&self.0 * s)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(c64(s, 0.0))
    }

    /// Adds `w · other` in place.
    pub fn add_scaled(&mut self, w: f64, other: &ComplexMatrix) {
        self.0.zip_apply(&other.0, |a, b| *a += b * w);
    }

    /// Adds `w · other` in place for complex `w`.
    pub fn add_scaled_complex(&mut self, w: C64, other: &ComplexMatrix) {
        self.0.zip_apply(&other.0, |a, b| *a += w * b);
    }

    /// Max-row-sum norm.
    pub fn norm_inf(&self) -> f64 {
        self.0
            .row_iter()
            .map(|r| r.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Max-column-sum norm.
    pub fn norm_one(&self) -> f64 {
        self.0
            .column_iter()
            .map(|c| c.iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        (0..self.rows())
            .map(|i| (0..self.cols()).map(|j| self.0[(i, j)] * v[j]).sum())
            .collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;
    fn index(&self, idx: (usize, usize)) -> &C64 {
        &self.0[idx]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, idx: (usize, usize)) -> &mut C64 {
        &mut self.0[idx]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 * &rhs.0)
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 + &rhs.0)
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(&self.0 - &rhs.0)
    }
}

impl From<DMatrix<C64>> for ComplexMatrix {
    fn from(m: DMatrix<C64>) -> Self {
        Self(m)
    }
}

/// Solution of a linear system together with its achieved residual and the
/// condition estimate used for the singularity test.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub x: Vec<C64>,
    /// ‖Ax − b‖∞
    pub residual: f64,
    pub condition: f64,
}

/// LU factorization with partial pivoting and a 1-norm condition estimate.
pub struct LuFactor {
    lu: nalgebra::LU<C64, nalgebra::Dyn, nalgebra::Dyn>,
    condition: f64,
}

impl LuFactor {
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::Contract(format!(
                "LU needs a square matrix, got {}×{}",
                a.rows(),
                a.cols()
            )));
        }
        let n = a.rows();
        let lu = a.0.clone().lu();
        let inv = lu.solve(&DMatrix::identity(n, n)).ok_or(Error::Singular {
            condition: f64::INFINITY,
        })?;
        let condition = a.norm_one() * ComplexMatrix(inv).norm_one();
        if !condition.is_finite() || condition > CONDITION_LIMIT {
            return Err(Error::Singular { condition });
        }
        Ok(Self { lu, condition })
    }

    pub fn condition(&self) -> f64 {
        self.condition
    }

    pub fn solve(&self, b: &[C64]) -> Vec<C64> {
        let rhs = DVector::from_column_slice(b);
        let x = self.lu.solve(&rhs).expect("factor checked non-singular");
        x.iter().copied().collect()
    }

    pub fn solve_matrix(&self, b: &ComplexMatrix) -> ComplexMatrix {
        ComplexMatrix(self.lu.solve(&b.0).expect("factor checked non-singular"))
    }

    pub fn inverse(&self) -> ComplexMatrix {
        let n = self.lu.l().nrows();
        ComplexMatrix(
            self.lu
                .solve(&DMatrix::identity(n, n))
                .expect("factor checked non-singular"),
        )
    }
}

/// Solves `A x = b`, reporting the residual. Systems whose condition estimate
/// exceeds [`CONDITION_LIMIT`] are rejected.
pub fn solve_linear(a: &ComplexMatrix, b: &[C64]) -> Result<LinearSolution> {
    if b.len() != a.rows() {
        return Err(Error::Contract(format!(
            "right-hand side has length {}, matrix has {} rows",
            b.len(),
            a.rows()
        )));
    }
    let lu = LuFactor::new(a)?;
    let x = lu.solve(b);
    let ax = a.mul_vec(&x);
    let residual = ax.iter().zip(b).map(|(l, r)| (l - r).norm()).fold(0.0, f64::max);
    Ok(LinearSolution {
        x,
        residual,
        condition: lu.condition(),
    })
}

/// exp(A) by scaling and squaring with a Padé approximant.
pub fn matrix_exponential(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::Contract("matrix exponential needs a square matrix".into()));
    }
    if a.rows() > MAX_EXP_DIM {
        return Err(Error::Contract(format!(
            "matrix exponential limited to dimension {MAX_EXP_DIM}, got {}",
            a.rows()
        )));
    }
    if !a.is_finite() {
        return Err(Error::Numerical("non-finite entries in exponent".into()));
    }
    let e = ComplexMatrix(a.0.exp());
    if !e.is_finite() {
        return Err(Error::Numerical("matrix exponential overflowed".into()));
    }
    Ok(e)
}

/// Solves the Sylvester equation `A X + X B = C` through its Kronecker form.
pub fn solve_sylvester(a: &ComplexMatrix, b: &ComplexMatrix, c: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (n, m) = (a.rows(), b.rows());
    if !a.is_square() || !b.is_square() || c.rows() != n || c.cols() != m {
        return Err(Error::Contract("Sylvester dimensions do not match".into()));
    }
    // column-major vec: vec(AX + XB) = (I⊗A + Bᵀ⊗I) vec X
    let dim = n * m;
    let k = ComplexMatrix::from_fn(dim, dim, |r, s| {
        let (ri, rj) = (r % n, r / n);
        let (si, sj) = (s % n, s / n);
        let mut v = c64(0.0, 0.0);
        if rj == sj {
            v += a[(ri, si)];
        }
        if ri == si {
            v += b[(sj, rj)];
        }
        v
    });
    let rhs: Vec<C64> = (0..dim).map(|r| c[(r % n, r / n)]).collect();
    let sol = solve_linear(&k, &rhs)?;
    Ok(ComplexMatrix::from_fn(n, m, |i, j| sol.x[j * n + i]))
}

/// Eigenvalues of a general complex square matrix (complex Schur form).
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<C64>> {
    if !a.is_square() {
        return Err(Error::Contract("eigenvalues need a square matrix".into()));
    }
    if !a.is_finite() {
        return Err(Error::Numerical("non-finite entries in eigenvalue problem".into()));
    }
    // Schur iteration without accumulating the unitary factor
    a.0.eigenvalues()
        .map(|v| v.iter().copied().collect())
        .ok_or_else(|| Error::Numerical("Schur iteration did not converge".into()))
}

/// Largest real part over the spectrum of `a`. Negative means dissipative.
pub fn stability_check(a: &ComplexMatrix) -> Result<f64> {
    Ok(eigenvalues(a)?
        .into_iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// [`stability_check`] for a matrix that commutes with the antilinear map
/// `x ↦ P x̄`, where the involution `partner` pairs each slot with its
/// conjugate. Such a matrix is similar to a real one, whose spectrum comes
/// from a real Schur form. Falls back to the complex path when the real
/// form has a non-negligible imaginary part.
pub fn conjugation_symmetric_stability(a: &ComplexMatrix, partner: impl Fn(usize) -> usize) -> Result<f64> {
    let n = a.rows();
    if !a.is_square() || (0..n).any(|m| partner(m) >= n || partner(partner(m)) != m) {
        return Err(Error::Contract(
            "conjugation pairing must be an involution on the slots".into(),
        ));
    }
    if !a.is_finite() {
        return Err(Error::Numerical("non-finite entries in eigenvalue problem".into()));
    }
    // unitary V with real coordinates: e_m for fixed slots, (e_m ± e_m̄)/√2
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut v = DMatrix::<C64>::zeros(n, n);
    for m in 0..n {
        let c = partner(m);
        match m.cmp(&c) {
            std::cmp::Ordering::Equal => v[(m, m)] = c64(1.0, 0.0),
            std::cmp::Ordering::Less => {
                v[(m, m)] = c64(s, 0.0);
                v[(c, m)] = c64(s, 0.0);
                v[(m, c)] = c64(0.0, s);
                v[(c, c)] = c64(0.0, -s);
            }
            std::cmp::Ordering::Greater => {}
        }
    }
    let r = v.adjoint() * &a.0 * &v;
    let scale = r.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if r.iter().any(|z| z.im.abs() > 1e-12 * scale.max(f64::MIN_POSITIVE)) {
        return stability_check(a);
    }
    let real = r.map(|z| z.re);
    Ok(real
        .complex_eigenvalues()
        .iter()
        .map(|z| z.re)
        .fold(f64::NEG_INFINITY, f64::max))
}

/// Eigenvalues of the Hermitian part `(A + A†)/2`, ascending.
pub fn hermitian_eigenvalues(a: &ComplexMatrix) -> Vec<f64> {
    let h = (&a.0 + a.0.adjoint()) * c64(0.5, 0.0);
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

/// Quadrature abscissae and weights against a normalized density.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }

    fn normalize(&mut self) {
        let total: f64 = self.weights.iter().sum();
        self.weights.iter_mut().for_each(|w| *w /= total);
    }
}

/// Gauss–Hermite rule for the density `exp(−v²/μ²)/(√π μ)`, exact for
/// polynomials up to degree `2n − 1`. Built by Golub–Welsch once per order.
pub fn gauss_hermite_rule(n: usize, mu: f64) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Contract("quadrature order must be ≥ 1".into()));
    }
    if n > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder(n));
    }
    static RULES: OnceLock<Mutex<HashMap<usize, Arc<QuadratureRule>>>> = OnceLock::new();
    let unit = {
        let mut cache = RULES
            .get_or_init(Default::default)
            .lock()
            .unwrap_or_else(|e| e.into_inner());
        Arc::clone(cache.entry(n).or_insert_with(|| Arc::new(unit_hermite_rule(n))))
    };
    Ok(QuadratureRule {
        nodes: unit.nodes.iter().map(|x| x * mu).collect(),
        weights: unit.weights.clone(),
    })
}

fn unit_hermite_rule(n: usize) -> QuadratureRule {
    // Jacobi matrix of the physicists' Hermite recurrence.
    let jacobi = DMatrix::<f64>::from_fn(n, n, |i, j| {
        if i.abs_diff(j) == 1 {
            (i.max(j) as f64 / 2.0).sqrt()
        } else {
            0.0
        }
    });
    let eig = jacobi.symmetric_eigen();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| (eig.eigenvalues[k], eig.eigenvectors[(0, k)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize to remove eigensolver asymmetry
    let half = n / 2;
    for k in 0..half {
        let (xl, wl) = pairs[k];
        let (xr, wr) = pairs[n - 1 - k];
        let x = 0.5 * (xr - xl);
        let w = 0.5 * (wl + wr);
        pairs[k] = (-x, w);
        pairs[n - 1 - k] = (x, w);
    }
    if n % 2 == 1 {
        pairs[half].0 = 0.0;
    }
    let mut rule = QuadratureRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    };
    rule.normalize();
    rule
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::Contract("quadrature order must be ≥ 1".into()));
    }
    if n > MAX_HERMITE_ORDER {
        return Err(Error::UnsupportedOrder(n));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 1 { x } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = n as f64 * (x * pn - pm) / (x * x - 1.0);
            let dx = pn / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn diag(v: &[C64]) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(v)
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![c64(1.0, 2.0), c64(-3.0, 0.5), c64(0.0, 0.0), c64(7.0, -1.0)];
        let sol = solve_linear(&ComplexMatrix::identity(4), &b).unwrap();
        assert_eq!(sol.x, b);
        assert!(sol.residual == 0.0);
    }

    #[test]
    fn diagonal_solve() {
        let a = diag(&[c64(2.0, 0.0), c64(4.0, 0.0)]);
        let sol = solve_linear(&a, &[c64(2.0, 0.0), c64(4.0, 0.0)]).unwrap();
        assert_relative_eq!(sol.x[0].re, 1.0);
        assert_relative_eq!(sol.x[1].re, 1.0);
    }

    #[test]
    fn singular_system_is_reported() {
        let a = ComplexMatrix::new(2, 2, vec![c64(1.0, 0.0), c64(2.0, 0.0), c64(2.0, 0.0), c64(4.0, 0.0)]).unwrap();
        assert!(matches!(
            solve_linear(&a, &[c64(1.0, 0.0); 2]),
            Err(Error::Singular { .. })
        ));
        let near =
            ComplexMatrix::new(2, 2, vec![c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0), c64(1e-14, 0.0)]).unwrap();
        assert!(matches!(LuFactor::new(&near), Err(Error::Singular { .. })));
    }

    #[test]
    fn rejects_bad_shapes_and_entries() {
        assert!(ComplexMatrix::new(0, 1, vec![]).is_err());
        assert!(ComplexMatrix::new(1, 1, vec![c64(f64::NAN, 0.0)]).is_err());
        let a = ComplexMatrix::identity(3);
        assert!(matches!(solve_linear(&a, &[c64(1.0, 0.0)]), Err(Error::Contract(_))));
    }

    #[test]
    fn exponential_of_zero_and_diagonal() {
        let e = matrix_exponential(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert!((&e - &ComplexMatrix::identity(3)).max_abs() < 1e-15);

        let (x, y) = (c64(0.3, 1.2), c64(-2.0, 0.0));
        let e = matrix_exponential(&diag(&[x, y])).unwrap();
        assert!((e[(0, 0)] - x.exp()).norm() < 1e-13);
        assert!((e[(1, 1)] - y.exp()).norm() < 1e-13);
        assert!(e[(0, 1)].norm() < 1e-15);
    }

    #[test]
    fn exponential_of_nilpotent_truncates() {
        let a = ComplexMatrix::new(2, 2, vec![c64(0.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(0.0, 0.0)]).unwrap();
        let e = matrix_exponential(&a).unwrap();
        let want = ComplexMatrix::new(2, 2, vec![c64(1.0, 0.0), c64(1.0, 0.0), c64(0.0, 0.0), c64(1.0, 0.0)]).unwrap();
        assert!((&e - &want).max_abs() < 1e-15);
    }

    #[test]
    fn exponential_rejects_large_dimension() {
        assert!(matrix_exponential(&ComplexMatrix::zeros(17, 17)).is_err());
    }

    #[test]
    fn stability_of_simple_spectra() {
        let minus_i = ComplexMatrix::identity(4).scale_real(-1.0);
        assert_relative_eq!(stability_check(&minus_i).unwrap(), -1.0, epsilon = 1e-12);
        let d = diag(&[c64(-1.0, 0.0), c64(-2.0, 3.0)]);
        assert_relative_eq!(stability_check(&d).unwrap(), -1.0, epsilon = 1e-12);
    }

    #[test]
    fn paired_stability_matches_the_complex_spectrum() {
        // slot 0 self-conjugate, slots 1 and 2 a conjugate pair
        let partner = |m: usize| [0, 2, 1][m];
        let a = ComplexMatrix::new(
            3,
            3,
            vec![
                c64(-1.0, 0.0),
                c64(0.5, 0.2),
                c64(0.5, -0.2),
                c64(0.3, 0.1),
                c64(-0.4, 2.0),
                c64(0.1, 0.0),
                c64(0.3, -0.1),
                c64(0.1, 0.0),
                c64(-0.4, -2.0),
            ],
        )
        .unwrap();
        let reference = stability_check(&a).unwrap();
        assert_relative_eq!(
            conjugation_symmetric_stability(&a, partner).unwrap(),
            reference,
            epsilon = 1e-12
        );
        // breaking the symmetry takes the complex path
        let mut b = a.clone();
        b[(0, 0)] = c64(-1.0, 0.5);
        assert_relative_eq!(
            conjugation_symmetric_stability(&b, partner).unwrap(),
            stability_check(&b).unwrap(),
            epsilon = 1e-12
        );
        assert!(conjugation_symmetric_stability(&a, |m| m.min(1)).is_err());
    }

    #[test]
    fn sylvester_matches_direct_check() {
        let a = ComplexMatrix::new(2, 2, vec![c64(-1.0, 0.5), c64(0.2, 0.0), c64(0.0, 0.1), c64(-2.0, 0.0)]).unwrap();
        let b = a.adjoint();
        let c = ComplexMatrix::new(2, 2, vec![c64(1.0, 0.0), c64(0.3, 0.2), c64(0.3, -0.2), c64(2.0, 0.0)]).unwrap();
        let x = solve_sylvester(&a, &b, &c).unwrap();
        let back = &(&a * &x) + &(&x * &b);
        assert!((&back - &c).max_abs() < 1e-13);
    }

    #[test]
    fn hermite_normalization_and_moments() {
        let rule = gauss_hermite_rule(16, 1.0).unwrap();
        assert!((rule.weights.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((rule.integrate(|v| v * v) - 0.5).abs() < 1e-12);
        // exact to degree 2n − 1: ⟨v⁴⟩ = 3μ⁴/4, ⟨v⁶⟩ = 15μ⁶/8 with μ = 2
        let rule = gauss_hermite_rule(8, 2.0).unwrap();
        assert!((rule.integrate(|v| v.powi(4)) - 12.0).abs() < 1e-10);
        assert!((rule.integrate(|v| v.powi(6)) - 120.0).abs() < 1e-9);
        assert!((rule.integrate(|v| v.powi(5))).abs() < 1e-10);
    }

    #[test]
    fn hermite_single_node_is_stationary() {
        let rule = gauss_hermite_rule(1, 5.0).unwrap();
        assert_eq!(rule.nodes, vec![0.0]);
        assert_eq!(rule.weights, vec![1.0]);
    }

    #[test]
    fn hermite_order_limit() {
        assert_eq!(gauss_hermite_rule(513, 1.0), Err(Error::UnsupportedOrder(513)));
        assert!(gauss_hermite_rule(512, 1.0).is_ok());
    }

    #[test]
    fn legendre_integrates_polynomials() {
        let rule = gauss_legendre(5).unwrap();
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        assert!((rule.integrate(|x| x.powi(8)) - 2.0 / 9.0).abs() < 1e-14);
        assert!((rule.integrate(|x| x.powi(9))).abs() < 1e-15);
    }
}
