//! Dense real matrices, rectangular permutation matrices, and the greedy
//! decomposition of a row-stochastic matrix into a convex combination of
//! rectangular permutation matrices.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::action::Mapping;
use crate::error::{GeneoError, Result};

/// Default tolerance for stochasticity checks and decomposition.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Row-major dense matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("{} entries", rows * cols),
                found: format!("{} entries", data.len()),
            });
        }
        if data.iter().any(|v| !v.is_finite()) {
            return Err(GeneoError::Parse("matrix entries must be finite".into()));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn filled(rows: usize, cols: usize, value: f64) -> Self {
        Self {
            rows,
            cols,
            data: vec![value; rows * cols],
        }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("rows of length {c}"),
                found: "ragged rows".into(),
            });
        }
        Self::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] = value;
    }

    #[inline]
    pub fn add_to(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.cols + j] += value;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scaled(&self, factor: f64) -> Matrix {
        self.map(|v| v * factor)
    }

    fn zip_with(&self, other: &Matrix, f: impl Fn(f64, f64) -> f64) -> Result<Matrix> {
        self.check_same_shape(other)?;
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&other.data)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn sub(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn add(&self, other: &Matrix) -> Result<Matrix> {
        self.zip_with(other, |a, b| a + b)
    }

    /// Max-norm distance `max |a_ij − b_ij|`.
    pub fn max_abs_diff(&self, other: &Matrix) -> Result<f64> {
        self.check_same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    /// `A x` for a column vector `x`.
    pub fn mul_vec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("vector of length {}", self.cols),
                found: format!("length {}", x.len()),
            });
        }
        Ok((0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect())
    }

    fn check_same_shape(&self, other: &Matrix) -> Result<()> {
        if (self.rows, self.cols) != (other.rows, other.cols) {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("{}x{}", self.rows, self.cols),
                found: format!("{}x{}", other.rows, other.cols),
            });
        }
        Ok(())
    }

    /// Parses comma-separated rows; blank lines and `#` comments are skipped.
    pub fn from_csv(text: &str) -> Result<Matrix> {
        let mut rows = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let row = line
                .split(',')
                .map(|cell| parse_number(cell.trim()))
                .collect::<std::result::Result<Vec<f64>, String>>()
                .map_err(|e| GeneoError::Parse(format!("line {}: {e}", lineno + 1)))?;
            rows.push(row);
        }
        if rows.is_empty() {
            return Err(GeneoError::Parse("empty matrix".into()));
        }
        Matrix::from_rows(rows)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for i in 0..self.rows {
            let cells: Vec<String> = self.row(i).iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Accepts plain decimals and simple fractions such as `1/3`.
fn parse_number(cell: &str) -> std::result::Result<f64, String> {
    if let Some((num, den)) = cell.split_once('/') {
        let num: f64 = num.trim().parse().map_err(|_| format!("bad number {cell:?}"))?;
        let den: f64 = den.trim().parse().map_err(|_| format!("bad number {cell:?}"))?;
        return Ok(num / den);
    }
    cell.parse().map_err(|_| format!("bad number {cell:?}"))
}

/// A rectangular permutation matrix: row `i` has its single 1 in column `row_choice[i]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RectPerm {
    pub row_choice: Vec<u32>,
}

impl RectPerm {
    pub fn to_matrix(&self, cols: usize) -> Matrix {
        let mut m = Matrix::zeros(self.row_choice.len(), cols);
        for (i, &j) in self.row_choice.iter().enumerate() {
            m.set(i, j as usize, 1.0);
        }
        m
    }
}

impl From<Mapping> for RectPerm {
    fn from(h: Mapping) -> Self {
        RectPerm {
            row_choice: h.values,
        }
    }
}

impl From<RectPerm> for Mapping {
    fn from(r: RectPerm) -> Self {
        Mapping::new(r.row_choice)
    }
}

/// A nonnegative combination `Σ λ_k R_k`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConvexCombo {
    pub terms: Vec<(f64, RectPerm)>,
}

#[derive(Serialize)]
struct TermLine<'a> {
    weight: f64,
    rows: &'a [u32],
}

impl ConvexCombo {
    pub fn weight_sum(&self) -> f64 {
        self.terms.iter().map(|(w, _)| w).sum()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// One JSON object per line: `{"weight":λ,"rows":[…]}`.
    pub fn to_json_lines(&self) -> String {
        let mut out = String::new();
        for (weight, r) in &self.terms {
            let line = serde_json::to_string(&TermLine {
                weight: *weight,
                rows: &r.row_choice,
            })
            .expect("plain struct serializes");
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Nonnegative entries (down to `-tol`) and every row sum within `tol` of 1.
pub fn is_row_stochastic(a: &Matrix, tol: f64) -> bool {
    a.data().iter().all(|&v| v >= -tol) && a.row_sums().iter().all(|s| (s - 1.0).abs() <= tol)
}

/// Greedy decomposition: each step selects the largest residual entry of
/// every row (ties to the smallest column), takes the smallest of those as
/// the weight, and subtracts it along the selection. The entry realising
/// the minimum is zeroed exactly, so there are at most `m·n` steps.
pub fn decompose_stochastic(a: &Matrix, tol: f64) -> Result<ConvexCombo> {
    if !is_row_stochastic(a, tol) {
        return Err(GeneoError::NotStochastic { tol });
    }
    let (m, n) = (a.rows(), a.cols());
    let mut residual = a.map(|v| v.max(0.0));
    let mut combo = ConvexCombo::default();
    let mut choice = vec![0u32; m];
    let mut picked = vec![0.0f64; m];
    for _ in 0..=m * n {
        for i in 0..m {
            let (j, v) = residual
                .row(i)
                .iter()
                .enumerate()
                .fold((0usize, f64::NEG_INFINITY), |best, (j, &v)| {
                    if v > best.1 {
                        (j, v)
                    } else {
                        best
                    }
                });
            choice[i] = j as u32;
            picked[i] = v;
        }
        let weight = picked.iter().copied().fold(f64::INFINITY, f64::min);
        if weight <= tol {
            break;
        }
        for i in 0..m {
            let j = choice[i] as usize;
            if picked[i] <= weight {
                residual.set(i, j, 0.0);
            } else {
                residual.add_to(i, j, -weight);
            }
        }
        combo.terms.push((
            weight,
            RectPerm {
                row_choice: choice.clone(),
            },
        ));
    }
    Ok(combo)
}

/// `Σ λ_k · matrix(R_k)`.
pub fn reconstruct(combo: &ConvexCombo, rows: usize, cols: usize) -> Result<Matrix> {
    let mut out = Matrix::zeros(rows, cols);
    for (weight, r) in &combo.terms {
        if r.row_choice.len() != rows || r.row_choice.iter().any(|&j| j as usize >= cols) {
            return Err(GeneoError::ShapeMismatch {
                expected: format!("{rows}x{cols} rectangular permutation"),
                found: format!("{:?}", r.row_choice),
            });
        }
        for (i, &j) in r.row_choice.iter().enumerate() {
            out.add_to(i, j as usize, *weight);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn remark_matrix() -> Matrix {
        Matrix::from_rows(vec![
            vec![0.5, 0.0, 0.5],
            vec![1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
        ])
        .unwrap()
    }

    #[test]
    fn stochasticity_checks() {
        assert!(is_row_stochastic(&Matrix::identity(3), DEFAULT_TOL));
        assert!(is_row_stochastic(&remark_matrix(), DEFAULT_TOL));
        let bad = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.6]]).unwrap();
        assert!(!is_row_stochastic(&bad, DEFAULT_TOL));
        let negative = Matrix::from_rows(vec![vec![1.5, -0.5]]).unwrap();
        assert!(!is_row_stochastic(&negative, DEFAULT_TOL));
    }

    #[test]
    fn identity_is_a_single_term() {
        let combo = decompose_stochastic(&Matrix::identity(3), DEFAULT_TOL).unwrap();
        assert_eq!(
            combo.terms,
            vec![(
                1.0,
                RectPerm {
                    row_choice: vec![0, 1, 2]
                }
            )]
        );
    }

    #[test]
    fn remark_matrix_round_trips() {
        let b = remark_matrix();
        let combo = decompose_stochastic(&b, DEFAULT_TOL).unwrap();
        assert!((combo.weight_sum() - 1.0).abs() <= 1e-12);
        assert!(reconstruct(&combo, 2, 3).unwrap().max_abs_diff(&b).unwrap() <= 1e-12);
        assert!(combo.len() <= 6);
    }

    #[test]
    fn uniform_three_by_three_uses_three_disjoint_terms() {
        let b = Matrix::filled(3, 3, 1.0 / 3.0);
        let combo = decompose_stochastic(&b, DEFAULT_TOL).unwrap();
        // Hand trace of the tie-breaking rule: all rows pick column 0, then 1, then 2.
        let rows: Vec<Vec<u32>> = combo.terms.iter().map(|t| t.1.row_choice.clone()).collect();
        assert_eq!(rows, vec![vec![0, 0, 0], vec![1, 1, 1], vec![2, 2, 2]]);
        for (w, _) in &combo.terms {
            assert!((w - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(reconstruct(&combo, 3, 3).unwrap().max_abs_diff(&b).unwrap() <= 1e-15);
    }

    #[test]
    fn non_stochastic_is_rejected() {
        let bad = Matrix::from_rows(vec![vec![1.0, 0.0], vec![0.5, 0.6]]).unwrap();
        assert_eq!(
            decompose_stochastic(&bad, DEFAULT_TOL).unwrap_err(),
            GeneoError::NotStochastic { tol: DEFAULT_TOL }
        );
    }

    #[test]
    fn tiny_negative_entries_are_clamped() {
        let a = Matrix::from_rows(vec![vec![1.0 + 1e-12, -1e-12]]).unwrap();
        let combo = decompose_stochastic(&a, DEFAULT_TOL).unwrap();
        assert_eq!(combo.len(), 1);
        assert_eq!(combo.terms[0].1.row_choice, vec![0]);
    }

    #[test]
    fn reconstruct_edge_cases() {
        assert_eq!(
            reconstruct(&ConvexCombo::default(), 2, 3).unwrap(),
            Matrix::zeros(2, 3)
        );
        let r = RectPerm {
            row_choice: vec![2, 0],
        };
        let single = ConvexCombo {
            terms: vec![(1.0, r.clone())],
        };
        assert_eq!(reconstruct(&single, 2, 3).unwrap(), r.to_matrix(3));
        assert!(reconstruct(&single, 3, 3).is_err());
        assert!(reconstruct(&single, 2, 2).is_err());
    }

    #[test]
    fn csv_parsing() {
        let m = Matrix::from_csv("# B\n1/2, 0, 1/2\n0.25,0.25,0.5\n").unwrap();
        assert_eq!(m.rows(), 2);
        assert_eq!(m.get(0, 2), 0.5);
        assert_eq!(m.get(1, 0), 0.25);
        assert!(Matrix::from_csv("1,2\n3\n").is_err());
        assert!(Matrix::from_csv("a,b").is_err());
        assert_eq!(Matrix::from_csv(&m.to_csv()).unwrap(), m);
    }

    #[test]
    fn json_lines_shape() {
        let combo = ConvexCombo {
            terms: vec![(
                0.5,
                RectPerm {
                    row_choice: vec![1, 0],
                },
            )],
        };
        assert_eq!(combo.to_json_lines(), "{\"weight\":0.5,\"rows\":[1,0]}\n");
    }
}
