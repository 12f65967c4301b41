//! Python bindings for `fractal-spectra`.

use fractal_spectra::analysis::{self, Classification};
use fractal_spectra::boundary::{self, GammaPolynomial};
use fractal_spectra::{complement, cycles, hadamard, ifs, kernel, spectrum, Error};
use num_complex::Complex64;
use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::ToleranceUnreachable { .. } | Error::UndecidableZero | Error::Overflow(_) => {
            PyArithmeticError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Equal-weight IFS `x -> (x + b) / R` on the line.
#[pyclass(name = "AffineIfs", frozen)]
struct PyAffineIfs(ifs::AffineIfs);

#[pymethods]
impl PyAffineIfs {
    #[new]
    fn new(r: i64, b: Vec<i64>) -> PyResult<Self> {
        Ok(Self(ifs::AffineIfs::new(r, b).map_err(py_err)?))
    }

    #[getter(R)]
    fn scale(&self) -> i64 {
        self.0.scale()
    }

    #[getter(B)]
    fn digits(&self) -> Vec<i64> {
        self.0.digits().to_vec()
    }

    /// `(value, bound)` of the Fourier transform at `t`.
    #[pyo3(signature = (t, tol = 1e-12))]
    fn mu_hat(&self, t: f64, tol: f64) -> PyResult<(Complex64, f64)> {
        let v = self.0.mu_hat(t, tol).map_err(py_err)?;
        Ok((v.value, v.bound))
    }

    /// Integral of `exp(2 pi i t x)` by the level-`level` quadrature.
    fn quadrature_transform(&self, t: f64, level: u32) -> PyResult<Complex64> {
        let q = self.0.quadrature(level).map_err(py_err)?;
        Ok(q.integrate(|x| Complex64::from_polar(1.0, std::f64::consts::TAU * t * x)))
    }

    fn __repr__(&self) -> String {
        format!("AffineIfs(R={}, B={:?})", self.0.scale(), self.0.digits())
    }
}

/// Truncated spectrum `Gamma_n(L)`.
#[pyclass(name = "SpectrumSpec", frozen)]
struct PySpectrumSpec(spectrum::SpectrumSpec);

#[pymethods]
impl PySpectrumSpec {
    #[new]
    fn new(r: i64, l: Vec<i64>, degree: u32) -> PyResult<Self> {
        Ok(Self(spectrum::SpectrumSpec::new(r, l, degree).map_err(py_err)?))
    }

    #[getter(R)]
    fn scale(&self) -> i64 {
        self.0.scale()
    }

    #[getter(L)]
    fn digits(&self) -> Vec<i64> {
        self.0.digits().to_vec()
    }

    #[getter]
    fn degree(&self) -> u32 {
        self.0.degree()
    }

    /// Sorted elements.
    fn gamma(&self) -> PyResult<Vec<i64>> {
        self.0.gamma_set().map_err(py_err)
    }

    /// Elements with every `Gamma_k` as a prefix.
    fn gamma_nested(&self) -> PyResult<Vec<i64>> {
        self.0.gamma_nested().map_err(py_err)
    }

    fn cardinality(&self) -> u128 {
        self.0.cardinality()
    }

    fn first_omitted(&self) -> Option<f64> {
        self.0.first_omitted()
    }

    fn __repr__(&self) -> String {
        format!(
            "SpectrumSpec(R={}, L={:?}, degree={})",
            self.0.scale(),
            self.0.digits(),
            self.0.degree()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (r, b, l, tol = 1e-9))]
fn is_hadamard(r: i64, b: Vec<i64>, l: Vec<i64>, tol: f64) -> PyResult<bool> {
    let t = hadamard::HadamardTriple::new(r, b, l).map_err(py_err)?;
    Ok(t.is_hadamard(tol).map_err(py_err)?.hadamard)
}

#[pyfunction]
fn is_complementing(a: Vec<i64>, a_prime: Vec<i64>, r: i64) -> bool {
    complement::is_complementing(&a, &a_prime, r)
}

#[pyfunction]
fn complementing_pairs(r: i64) -> Vec<(Vec<i64>, Vec<i64>)> {
    complement::enumerate_complementing_pairs(r)
}

/// `(L, L', certificate_passed)`.
#[pyfunction]
fn dual_spectra_sets(a: Vec<i64>, a_prime: Vec<i64>, r: i64) -> PyResult<(Vec<i64>, Vec<i64>, bool)> {
    let d = complement::dual_spectra_sets(&a, &a_prime, r).map_err(py_err)?;
    let ok = d.certificate.all_passed();
    Ok((d.l, d.l_prime, ok))
}

/// Cycle points as `(num, den)` pairs and the triviality flag.
type CycleRow = (Vec<(i64, i64)>, bool);

#[pyfunction]
fn extreme_cycles(r: i64, b: Vec<i64>, l: Vec<i64>) -> PyResult<Vec<CycleRow>> {
    let found = cycles::extreme_cycles(r, &b, &l).map_err(py_err)?;
    Ok(found
        .into_iter()
        .map(|c| {
            let pts = c.points.iter().map(|p| (*p.numer(), *p.denom())).collect();
            (pts, c.trivial)
        })
        .collect())
}

#[pyfunction]
fn is_spectral_pair(r: i64, b: Vec<i64>, l: Vec<i64>) -> PyResult<bool> {
    Ok(cycles::is_spectral_pair(r, &b, &l).map_err(py_err)?.spectral)
}

fn query(z: Complex64, x: f64, radius_cap: Option<f64>) -> PyResult<kernel::KernelQuery> {
    kernel::KernelQuery::new(z, x, radius_cap.unwrap_or(z.norm())).map_err(py_err)
}

#[pyfunction]
fn szego_classical(z: Complex64, x: f64) -> PyResult<Complex64> {
    Ok(kernel::szego_classical(&query(z, x, None)?))
}

/// `(value, bound)` of the Gamma-Szegő kernel by its series.
#[pyfunction]
#[pyo3(signature = (spec, z, x, radius_cap = None))]
fn gamma_kernel_series(
    spec: PyRef<'_, PySpectrumSpec>,
    z: Complex64,
    x: f64,
    radius_cap: Option<f64>,
) -> PyResult<(Complex64, f64)> {
    let v = kernel::gamma_kernel_series(&spec.0, &query(z, x, radius_cap)?).map_err(py_err)?;
    Ok((v.value, v.bound))
}

/// `(value, bound)` of the Gamma-Szegő kernel by its product.
#[pyfunction]
#[pyo3(signature = (r, l, z, x, depth, radius_cap = None))]
fn gamma_kernel_product(
    r: i64,
    l: Vec<i64>,
    z: Complex64,
    x: f64,
    depth: u32,
    radius_cap: Option<f64>,
) -> PyResult<(Complex64, f64)> {
    let v = kernel::gamma_kernel_product(r, &l, &query(z, x, radius_cap)?, depth).map_err(py_err)?;
    Ok((v.value, v.bound))
}

/// `(residual, bound)` of `G_L G_L' - k` at one point.
#[pyfunction]
fn factorization_residual(
    r: i64,
    a: Vec<i64>,
    a_prime: Vec<i64>,
    z: Complex64,
    x: f64,
    degree: u32,
    depth: u32,
) -> PyResult<(f64, f64)> {
    let f = kernel::factorization_residual(r, &a, &a_prime, &query(z, x, None)?, degree, depth)
        .map_err(py_err)?;
    Ok((f.residual, f.bound))
}

/// `(sigma_lower, err)` over `Gamma_n`.
#[pyfunction]
#[pyo3(signature = (ifs, spec, t, tol = 1e-12))]
fn sigma(
    ifs: PyRef<'_, PyAffineIfs>,
    spec: PyRef<'_, PySpectrumSpec>,
    t: f64,
    tol: f64,
) -> PyResult<(f64, f64)> {
    let v = analysis::sigma_gamma(&ifs.0, &spec.0, t, tol).map_err(py_err)?;
    Ok((v.sigma_lower, v.err))
}

/// `(lambda_min, lambda_max, classification)` of the Gram matrix over `Gamma_n`.
#[pyfunction]
fn gram(ifs: PyRef<'_, PyAffineIfs>, spec: PyRef<'_, PySpectrumSpec>) -> PyResult<(f64, f64, String)> {
    let g = analysis::gram_matrix(&ifs.0, &spec.0).map_err(py_err)?;
    let kind = match g.classification {
        Classification::Orthonormal => "orthonormal",
        Classification::Riesz { .. } => "riesz",
        Classification::Degenerate => "degenerate",
    };
    Ok((g.lambda_min, g.lambda_max, kind.to_string()))
}

/// `(value, direct, quadrature_change)` for `f = sum c_gamma e_gamma` at `z`.
#[pyfunction]
fn boundary_evaluate(
    ifs: PyRef<'_, PyAffineIfs>,
    spec: PyRef<'_, PySpectrumSpec>,
    coefficients: Vec<(i64, Complex64)>,
    z: Complex64,
    level: u32,
) -> PyResult<(Complex64, Complex64, f64)> {
    let f = GammaPolynomial::new(coefficients).map_err(py_err)?;
    let v = boundary::boundary_evaluate(&ifs.0, &spec.0, &f, z, level).map_err(py_err)?;
    Ok((v.value, v.direct, v.quadrature_change))
}

#[pymodule]
fn fractal_spectra_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyAffineIfs>()?;
    m.add_class::<PySpectrumSpec>()?;
    m.add_function(wrap_pyfunction!(is_hadamard, m)?)?;
    m.add_function(wrap_pyfunction!(is_complementing, m)?)?;
    m.add_function(wrap_pyfunction!(complementing_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(dual_spectra_sets, m)?)?;
    m.add_function(wrap_pyfunction!(extreme_cycles, m)?)?;
    m.add_function(wrap_pyfunction!(is_spectral_pair, m)?)?;
    m.add_function(wrap_pyfunction!(szego_classical, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_kernel_series, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_kernel_product, m)?)?;
    m.add_function(wrap_pyfunction!(factorization_residual, m)?)?;
    m.add_function(wrap_pyfunction!(sigma, m)?)?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    m.add_function(wrap_pyfunction!(boundary_evaluate, m)?)?;
    Ok(())
}
