//! Dense linear-system utilities: Hermitian embedding, power-of-two padding,
//! spectral scaling and a pivoted LU solve used as the classical reference.

use std::fmt::Write as _;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use thiserror::Error;

/// Relative tolerance for the Hermitian flag.
pub const HERMITIAN_TOL: f64 = 1e-12;
/// Relative pivot size below which the LU solve reports singularity.
pub const PIVOT_TOL: f64 = 1e-13;
/// Largest `|λ|` allowed after spectral scaling.
pub const SPECTRAL_BAND: f64 = 0.5;
/// Upper half of an embedded solution must stay below this (relative).
pub const EMBED_UPPER_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinsysError {
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("rhs has length {rhs}, matrix has {rows} rows")]
    DimensionMismatch { rows: usize, rhs: usize },
    #[error("matrix is singular (pivot {pivot} below threshold)")]
    Singular { pivot: usize },
    #[error("matrix is not Hermitian")]
    NotHermitian,
    #[error("matrix is zero")]
    ZeroMatrix,
    #[error("empty system")]
    Empty,
    #[error("matrix dump line {line}: {msg}")]
    Dump { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, LinsysError>;

/// Labels carried along from assembly: what each column and row means.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Provenance {
    pub unknown_labels: Vec<String>,
    pub row_labels: Vec<String>,
}

/// `M x = b` with complex entries.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearSystem {
    matrix: DMatrix<Complex64>,
    rhs: DVector<Complex64>,
    hermitian: bool,
    pub provenance: Option<Provenance>,
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn is_hermitian(m: &DMatrix<Complex64>) -> bool {
    let scale = max_abs(m);
    let dev = (m - m.adjoint()).iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    dev <= HERMITIAN_TOL * scale
}

impl LinearSystem {
    pub fn new(matrix: DMatrix<Complex64>, rhs: DVector<Complex64>) -> Result<Self> {
        let (rows, cols) = matrix.shape();
        if rows != cols {
            return Err(LinsysError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(LinsysError::Empty);
        }
        if rhs.len() != rows {
            return Err(LinsysError::DimensionMismatch { rows, rhs: rhs.len() });
        }
        let hermitian = is_hermitian(&matrix);
        Ok(Self {
            matrix,
            rhs,
            hermitian,
            provenance: None,
        })
    }

    pub fn from_real(matrix: &DMatrix<f64>, rhs: &DVector<f64>) -> Result<Self> {
        Self::new(
            matrix.map(|v| Complex64::new(v, 0.0)),
            rhs.map(|v| Complex64::new(v, 0.0)),
        )
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<Complex64> {
        &self.rhs
    }

    pub fn dim(&self) -> usize {
        self.rhs.len()
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    /// `[[0, M], [M†, 0]] y = [b; 0]`; the solution is `y = [0; x]`.
    pub fn hermitian_embed(&self) -> LinearSystem {
        let m = self.dim();
        let mut big = DMatrix::zeros(2 * m, 2 * m);
        big.view_mut((0, m), (m, m)).copy_from(&self.matrix);
        big.view_mut((m, 0), (m, m)).copy_from(&self.matrix.adjoint());
        let mut rhs = DVector::zeros(2 * m);
        rhs.rows_mut(0, m).copy_from(&self.rhs);
        LinearSystem {
            matrix: big,
            rhs,
            hermitian: true,
            provenance: self.provenance.clone(),
        }
    }

    /// Zero-extends to the next power of two with identity on the new diagonal.
    pub fn pad_to_power_of_two(&self) -> LinearSystem {
        self.pad_to(self.dim().next_power_of_two())
    }

    /// Zero-extends to dimension `target ≥ m` with identity on the new diagonal.
    pub fn pad_to(&self, target: usize) -> LinearSystem {
        let m = self.dim();
        assert!(target >= m, "cannot pad {m} down to {target}");
        if target == m {
            return self.clone();
        }
        let mut big = DMatrix::identity(target, target);
        big.view_mut((0, 0), (m, m)).copy_from(&self.matrix);
        let mut rhs = DVector::zeros(target);
        rhs.rows_mut(0, m).copy_from(&self.rhs);
        LinearSystem {
            matrix: big,
            rhs,
            hermitian: self.hermitian,
            provenance: self.provenance.clone(),
        }
    }

    /// Eigenvalues of a Hermitian system, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        if !self.hermitian {
            return Err(LinsysError::NotHermitian);
        }
        let mut ev: Vec<f64> = SymmetricEigen::new(self.matrix.clone())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        Ok(ev)
    }

    /// Rescales `M` so every eigenvalue lies in `[−0.5, 0.5]`.
    ///
    /// The scaled system `(sM) x_s = b` has `x = s·x_s`.
    pub fn scale_spectrum(&self) -> Result<(LinearSystem, SpectralScaling)> {
        let extent = self.eigenvalues()?.iter().fold(0.0f64, |m, l| m.max(l.abs()));
        if extent == 0.0 {
            return Err(LinsysError::ZeroMatrix);
        }
        let scale = if extent <= SPECTRAL_BAND {
            1.0
        } else {
            SPECTRAL_BAND / extent
        };
        let scaled = LinearSystem {
            matrix: self.matrix.map(|z| z * scale),
            rhs: self.rhs.clone(),
            hermitian: true,
            provenance: self.provenance.clone(),
        };
        Ok((
            scaled,
            SpectralScaling {
                scale,
                original_extent: extent,
            },
        ))
    }

    /// Partial-pivoting LU solve with a 2-norm condition estimate.
    pub fn classical_solve(&self) -> Result<ClassicalSolution> {
        let x = lu_solve(&self.matrix, &self.rhs)?;
        Ok(ClassicalSolution {
            x,
            condition_number: condition_number(&self.matrix),
        })
    }

    /// `‖Mx − b‖₂`.
    pub fn residual_norm(&self, x: &DVector<Complex64>) -> f64 {
        (&self.matrix * x - &self.rhs).norm()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralScaling {
    pub scale: f64,
    pub original_extent: f64,
}

impl SpectralScaling {
    pub fn unscale(&self, x_scaled: &DVector<Complex64>) -> DVector<Complex64> {
        x_scaled * Complex64::new(self.scale, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicalSolution {
    pub x: DVector<Complex64>,
    pub condition_number: f64,
}

/// Lower block of an embedded solution.
#[derive(Debug, Clone, PartialEq)]
pub struct Extracted {
    pub x: DVector<Complex64>,
    /// `‖y_upper‖ / ‖y‖`, zero for an exact solve.
    pub upper_residual: f64,
    pub warning: Option<String>,
}

/// Reads `x` back out of a solution `y` of the embedded system.
pub fn extract_embedded(y: &DVector<Complex64>) -> Extracted {
    let m = y.len() / 2;
    let upper = y.rows(0, m).norm();
    let total = y.norm();
    let upper_residual = if total == 0.0 { 0.0 } else { upper / total };
    let warning = (upper_residual > EMBED_UPPER_TOL)
        .then(|| format!("embedded solution has upper-block weight {upper_residual:.3e}"));
    Extracted {
        x: y.rows(m, m).into_owned(),
        upper_residual,
        warning,
    }
}

/// First `m` entries of a padded solution.
pub fn restrict(y: &DVector<Complex64>, m: usize) -> DVector<Complex64> {
    y.rows(0, m).into_owned()
}

/// `σ_max / σ_min`; infinite for a singular matrix.
pub fn condition_number(m: &DMatrix<Complex64>) -> f64 {
    let sv = m.clone().singular_values();
    let max = sv.iter().fold(0.0f64, |a, &s| a.max(s));
    let min = sv.iter().fold(f64::INFINITY, |a, &s| a.min(s));
    if min == 0.0 {
        f64::INFINITY
    } else {
        max / min
    }
}

pub fn condition_number_real(m: &DMatrix<f64>) -> f64 {
    condition_number(&m.map(|v| Complex64::new(v, 0.0)))
}

fn lu_solve(m: &DMatrix<Complex64>, b: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    let n = b.len();
    let mut a = m.clone();
    let mut x = b.clone();
    let threshold = PIVOT_TOL * max_abs(m);
    for k in 0..n {
        let (offset, best) = a
            .view((k, k), (n - k, 1))
            .iter()
            .enumerate()
            .fold(
                (0, -1.0),
                |(bi, bv), (i, z)| if z.norm() > bv { (i, z.norm()) } else { (bi, bv) },
            );
        if best <= threshold {
            return Err(LinsysError::Singular { pivot: k });
        }
        let p = k + offset;
        if p != k {
            a.swap_rows(k, p);
            x.swap_rows(k, p);
        }
        let pivot = a[(k, k)];
        for i in k + 1..n {
            let factor = a[(i, k)] / pivot;
            if factor == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in k..n {
                let v = a[(k, j)];
                a[(i, j)] -= factor * v;
            }
            let v = x[k];
            x[i] -= factor * v;
        }
    }
    for k in (0..n).rev() {
        let mut s = x[k];
        for j in k + 1..n {
            s -= a[(k, j)] * x[j];
        }
        x[k] = s / a[(k, k)];
    }
    Ok(x)
}

/// Plain-text dump: a header line with `m`, then one line per row holding
/// `re im` pairs separated by spaces.
pub fn dump_matrix(m: &DMatrix<Complex64>) -> String {
    let mut out = format!("{}\n", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols())
            .map(|j| format!("{:e} {:e}", m[(i, j)].re, m[(i, j)].im))
            .collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn parse_matrix_dump(text: &str) -> Result<DMatrix<Complex64>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header) = lines.next().ok_or(LinsysError::Dump {
        line: 1,
        msg: "missing header".into(),
    })?;
    let m: usize = header.trim().parse().map_err(|_| LinsysError::Dump {
        line: 1,
        msg: format!("bad dimension {header:?}"),
    })?;
    let mut out = DMatrix::zeros(m, m);
    let mut rows = 0;
    for (idx, line) in lines {
        let err = |msg: String| LinsysError::Dump { line: idx + 1, msg };
        if rows == m {
            return Err(err("more rows than declared".into()));
        }
        let vals = line
            .split_whitespace()
            .map(|v| v.parse::<f64>().map_err(|_| err(format!("bad number {v:?}"))))
            .collect::<Result<Vec<_>>>()?;
        if vals.len() != 2 * m {
            return Err(err(format!("expected {} numbers, found {}", 2 * m, vals.len())));
        }
        for j in 0..m {
            out[(rows, j)] = Complex64::new(vals[2 * j], vals[2 * j + 1]);
        }
        rows += 1;
    }
    if rows != m {
        return Err(LinsysError::Dump {
            line: text.lines().count(),
            msg: format!("declared {m} rows, found {rows}"),
        });
    }
    Ok(out)
}
