//! Python bindings for the `geneo` library.
//!
//! Matrices and images cross the boundary as lists of row lists; functions
//! `Y → X` as lists of point indices; measures as lists of `(function, value)`.

use std::sync::Arc;

use geneo::action::DEFAULT_DOMAIN_GUARD;
use geneo::polytope::orbit_basis;
use geneo::repr::{check_equivariance, is_geneo, matrix_of_measure, operator_norm_inf, represent, GeoProblem};
use geneo::stochastic::decompose_stochastic;
use geneo::torus::{self, build_geneo, PrimeTorus, TorusImage, UnitVector};
use geneo::{
    FiniteSet, GeneoError, Homomorphism, Mapping, Matrix, Permutation, PermutationGroup,
    SignedMeasure, TwistedAction,
};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

type Rows = Vec<Vec<f64>>;
type Entries = Vec<(Vec<u32>, f64)>;

fn to_py(e: GeneoError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn matrix(rows: Rows) -> PyResult<Matrix> {
    Matrix::from_rows(rows).map_err(to_py)
}

fn image(rows: Rows) -> PyResult<TorusImage> {
    let side = rows.len();
    if rows.iter().any(|r| r.len() != side) {
        return Err(PyValueError::new_err("image must be square"));
    }
    TorusImage::new(side, rows.into_iter().flatten().collect()).map_err(to_py)
}

fn image_rows(img: &TorusImage) -> Rows {
    img.data().chunks(img.side()).map(<[f64]>::to_vec).collect()
}

fn entries(mu: &SignedMeasure) -> Entries {
    mu.iter().map(|(h, v)| (h.values.clone(), v)).collect()
}

fn measure(n: usize, m: usize, items: Entries) -> PyResult<SignedMeasure> {
    SignedMeasure::from_entries(n, m, items.into_iter().map(|(h, v)| (Mapping::new(h), v)))
        .map_err(to_py)
}

/// A permutation group on `0..degree`.
#[pyclass(frozen, name = "Group")]
struct PyGroup {
    inner: Arc<PermutationGroup>,
}

#[pymethods]
impl PyGroup {
    #[staticmethod]
    fn cyclic(n: usize) -> PyResult<Self> {
        Self::wrap(PermutationGroup::cyclic(n))
    }

    #[staticmethod]
    fn symmetric(n: usize) -> PyResult<Self> {
        Self::wrap(PermutationGroup::symmetric(n))
    }

    #[staticmethod]
    fn trivial(n: usize) -> PyResult<Self> {
        Self::wrap(PermutationGroup::trivial(n))
    }

    /// Closure of the given image arrays.
    #[staticmethod]
    fn from_generators(degree: usize, generators: Vec<Vec<u32>>) -> PyResult<Self> {
        let gens = generators
            .into_iter()
            .map(Permutation::from_images)
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py)?;
        let carrier = FiniteSet::new(degree).map_err(to_py)?;
        Self::wrap(PermutationGroup::closure(carrier, gens))
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.inner.degree()
    }

    fn elements(&self) -> Vec<Vec<u32>> {
        self.inner.elements().iter().map(|p| p.images().to_vec()).collect()
    }

    fn is_transitive(&self) -> bool {
        self.inner.is_transitive()
    }

    fn __repr__(&self) -> String {
        format!("Group(degree={}, order={})", self.inner.degree(), self.inner.order())
    }
}

impl PyGroup {
    fn wrap(g: geneo::Result<PermutationGroup>) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(g.map_err(to_py)?) })
    }
}

/// `G` on `X`, `K` on `Y`, and a homomorphism `T: G → K`.
#[pyclass(frozen, name = "Setting")]
struct PySetting {
    hom: Arc<Homomorphism>,
}

#[pymethods]
impl PySetting {
    #[staticmethod]
    fn identity(group: &PyGroup) -> PyResult<Self> {
        Self::wrap(Homomorphism::identity(group.inner.clone()))
    }

    #[staticmethod]
    fn trivial(source: &PyGroup, target: &PyGroup) -> PyResult<Self> {
        Self::wrap(Homomorphism::trivial(source.inner.clone(), target.inner.clone()))
    }

    /// `T` given by the images of the source generators.
    #[staticmethod]
    fn build(source: &PyGroup, target: &PyGroup, images: Vec<Vec<u32>>) -> PyResult<Self> {
        let images = images
            .into_iter()
            .map(Permutation::from_images)
            .collect::<Result<Vec<_>, _>>()
            .map_err(to_py)?;
        Self::wrap(Homomorphism::build(source.inner.clone(), target.inner.clone(), &images))
    }

    /// `rows × cols` on grid cells, projected onto `rows`.
    #[staticmethod]
    fn grid_row_projection(rows: &PyGroup, cols: &PyGroup) -> PyResult<Self> {
        Self::wrap(Homomorphism::grid_row_projection(&rows.inner, &cols.inner))
    }

    /// Translations of `ℤ_p²` onto those of `ℤ_p` via `g_v ↦ k_{v·w}`.
    #[staticmethod]
    fn torus(p: u32, w1: u32, w2: u32) -> PyResult<Self> {
        let w = UnitVector::new(PrimeTorus::new(p).map_err(to_py)?, w1, w2).map_err(to_py)?;
        Self::wrap(build_geneo(p, w).and_then(|g| g.homomorphism()))
    }

    /// `|X|`.
    #[getter]
    fn x_size(&self) -> usize {
        self.hom.source().degree()
    }

    /// `|Y|`.
    #[getter]
    fn y_size(&self) -> usize {
        self.hom.target().degree()
    }

    fn is_target_transitive(&self) -> bool {
        self.hom.is_target_transitive()
    }

    /// `(representative, size)` for each orbit of the twisted action.
    #[pyo3(signature = (guard = DEFAULT_DOMAIN_GUARD as u64))]
    fn orbits(&self, guard: u64) -> PyResult<Vec<(Vec<u32>, usize)>> {
        let action = TwistedAction::new(self.hom.clone());
        Ok(action
            .all_orbits(guard as u128)
            .map_err(to_py)?
            .into_iter()
            .map(|o| (o.representative().values.clone(), o.len()))
            .collect())
    }

    /// `(representative, size, matrix)` for each orbit indicator.
    #[pyo3(signature = (guard = DEFAULT_DOMAIN_GUARD as u64))]
    fn basis(&self, guard: u64) -> PyResult<Vec<(Vec<u32>, usize, Rows)>> {
        let basis = orbit_basis(Arc::new(TwistedAction::new(self.hom.clone())), guard as u128)
            .map_err(to_py)?;
        Ok(basis
            .orbits
            .iter()
            .zip(&basis.basis_matrices)
            .map(|(o, b)| (o.representative().values.clone(), o.len(), b.to_rows()))
            .collect())
    }

    fn is_permutant(&self, mu: Entries) -> PyResult<bool> {
        let mu = measure(self.x_size(), self.y_size(), mu)?;
        Ok(TwistedAction::new(self.hom.clone()).is_permutant(&mu))
    }

    fn check_equivariance(&self, b: Rows) -> PyResult<bool> {
        Ok(check_equivariance(&self.problem(b)?))
    }

    /// Dict with `plus`, `minus` and `mu` measures whose operator is `b`.
    fn represent<'py>(&self, py: Python<'py>, b: Rows) -> PyResult<Bound<'py, PyDict>> {
        let triple = represent(&self.problem(b)?).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("plus", entries(&triple.plus))?;
        d.set_item("minus", entries(&triple.minus))?;
        d.set_item("mu", entries(&triple.mu))?;
        Ok(d)
    }

    /// Dict with `is_geneo`, `total_variation`, `operator_norm`, `residual`.
    fn is_geneo<'py>(&self, py: Python<'py>, b: Rows) -> PyResult<Bound<'py, PyDict>> {
        let report = is_geneo(&self.problem(b)?).map_err(to_py)?;
        let d = PyDict::new(py);
        d.set_item("is_geneo", report.is_geneo)?;
        d.set_item("total_variation", report.total_variation)?;
        d.set_item("operator_norm", report.operator_norm)?;
        d.set_item("residual", report.residual)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!(
            "Setting(|X|={}, |G|={}, |Y|={}, |K|={})",
            self.hom.source().degree(),
            self.hom.source().order(),
            self.hom.target().degree(),
            self.hom.target().order()
        )
    }
}

impl PySetting {
    fn wrap(h: geneo::Result<Homomorphism>) -> PyResult<Self> {
        Ok(Self { hom: Arc::new(h.map_err(to_py)?) })
    }

    fn problem(&self, b: Rows) -> PyResult<GeoProblem> {
        GeoProblem::new(self.hom.clone(), matrix(b)?).map_err(to_py)
    }
}

/// `[(weight, column_per_row), ...]` for a row-stochastic matrix.
#[pyfunction]
#[pyo3(signature = (b, tol = 1e-9))]
fn decompose(b: Rows, tol: f64) -> PyResult<Vec<(f64, Vec<u32>)>> {
    let combo = decompose_stochastic(&matrix(b)?, tol).map_err(to_py)?;
    Ok(combo
        .terms
        .into_iter()
        .map(|(w, r)| (w, Mapping::from(r).values))
        .collect())
}

/// `Σ μ(h) R(h)` for a measure on functions from `m` points into `n` points.
#[pyfunction]
fn matrix_of(n: usize, m: usize, mu: Entries) -> PyResult<Rows> {
    Ok(matrix_of_measure(&measure(n, m, mu)?).to_rows())
}

#[pyfunction]
fn operator_norm(b: Rows) -> PyResult<f64> {
    Ok(operator_norm_inf(&matrix(b)?))
}

#[pyfunction]
fn unit_vectors(p: u32) -> PyResult<Vec<(u32, u32)>> {
    Ok(torus::unit_vectors(p).map_err(to_py)?.iter().map(UnitVector::as_pair).collect())
}

/// Line average along `w⊥` for the unit vector `w`.
#[pyfunction]
fn torus_apply(p: u32, w: (u32, u32), img: Rows) -> PyResult<Vec<f64>> {
    let w = UnitVector::new(PrimeTorus::new(p).map_err(to_py)?, w.0, w.1).map_err(to_py)?;
    let img = image(img)?;
    build_geneo(p, w).and_then(|g| g.apply(&img)).map_err(to_py)
}

/// One row per unit vector, in lexicographic order.
#[pyfunction]
fn stack_features(p: u32, img: Rows) -> PyResult<Rows> {
    Ok(torus::stack_features(p, &image(img)?).map_err(to_py)?.to_rows())
}

#[pyfunction]
fn toroidal_translate(img: Rows, v: (u32, u32)) -> PyResult<Rows> {
    Ok(image_rows(&torus::toroidal_translate(&image(img)?, v)))
}

#[pyfunction]
fn salt_pepper(img: Rows, level: f64, seed: u64) -> PyResult<Rows> {
    Ok(image_rows(&torus::salt_pepper(&image(img)?, level, seed).map_err(to_py)?))
}

/// 784 bytes of a 28×28 digit to a 29×29 image in `[0, 1]`.
#[pyfunction]
fn pad_mnist(raw: Vec<u8>) -> PyResult<Rows> {
    Ok(image_rows(&torus::pad_mnist(&raw).map_err(to_py)?))
}

#[pymodule]
pub fn geneo_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGroup>()?;
    m.add_class::<PySetting>()?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_of, m)?)?;
    m.add_function(wrap_pyfunction!(operator_norm, m)?)?;
    m.add_function(wrap_pyfunction!(unit_vectors, m)?)?;
    m.add_function(wrap_pyfunction!(torus_apply, m)?)?;
    m.add_function(wrap_pyfunction!(stack_features, m)?)?;
    m.add_function(wrap_pyfunction!(toroidal_translate, m)?)?;
    m.add_function(wrap_pyfunction!(salt_pepper, m)?)?;
    m.add_function(wrap_pyfunction!(pad_mnist, m)?)?;
    Ok(())
}
