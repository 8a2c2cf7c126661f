//! Python bindings for toric patches.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use toric_core as core;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn weights(values: Option<Vec<f64>>, n: usize) -> PyResult<core::WeightVector> {
    match values {
        Some(v) => core::WeightVector::new(v).map_err(value_error),
        None => Ok(core::WeightVector::ones(n)),
    }
}

/// Finite set of exponent vectors spanning R^d.
#[pyclass(frozen, skip_from_py_object, module = "toric_patch")]
#[derive(Clone)]
pub struct PointConfig {
    inner: core::PointConfig,
}

#[pymethods]
impl PointConfig {
    #[new]
    fn new(dim: usize, points: Vec<Vec<f64>>) -> PyResult<Self> {
        let inner = core::PointConfig::new(dim, points).map_err(value_error)?;
        Ok(Self { inner })
    }

    /// {0, 1, ..., m} on the line.
    #[staticmethod]
    fn interval(m: usize) -> PyResult<Self> {
        let inner = core::PointConfig::interval(m).map_err(value_error)?;
        Ok(Self { inner })
    }

    /// Lattice points of the triangle m△ in the plane.
    #[staticmethod]
    fn scaled_triangle(m: usize) -> PyResult<Self> {
        let inner = core::PointConfig::scaled_triangle(m).map_err(value_error)?;
        Ok(Self { inner })
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn points(&self) -> Vec<Vec<f64>> {
        self.inner.points().to_vec()
    }

    /// Inward facet inequalities (normal, offset) of the convex hull.
    fn facets(&self) -> PyResult<Vec<(Vec<f64>, f64)>> {
        let hull = core::convex_hull(&self.inner).map_err(value_error)?;
        Ok(hull
            .facets
            .into_iter()
            .map(|f| (f.normal, f.offset))
            .collect())
    }

    fn volume(&self) -> PyResult<f64> {
        let hull = core::convex_hull(&self.inner).map_err(value_error)?;
        Ok(hull.volume(&self.inner))
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "PointConfig(dim={}, points={:?})",
            self.inner.dim(),
            self.inner.points()
        )
    }
}

/// Toric blending functions over the convex hull of a configuration.
#[pyclass(frozen, module = "toric_patch")]
pub struct ToricPatch {
    inner: core::ToricPatch,
}

#[pymethods]
impl ToricPatch {
    #[new]
    fn new(config: &PointConfig) -> PyResult<Self> {
        let inner = core::ToricPatch::new(config.inner.clone()).map_err(value_error)?;
        Ok(Self { inner })
    }

    #[getter]
    fn config(&self) -> PointConfig {
        PointConfig {
            inner: self.inner.config().clone(),
        }
    }

    /// Blending vector at x; weights default to all ones.
    #[pyo3(signature = (x, weights=None))]
    fn blend(&self, x: Vec<f64>, weights: Option<Vec<f64>>) -> PyResult<Vec<f64>> {
        let w = self::weights(weights, self.inner.len())?;
        let z = self.inner.blend(&w, &x).map_err(value_error)?;
        Ok(z.into_inner())
    }

    /// Patch point F(x) = Σ blend_a(x) b_a.
    #[pyo3(signature = (controls, x, weights=None))]
    fn evaluate(
        &self,
        controls: Vec<Vec<f64>>,
        x: Vec<f64>,
        weights: Option<Vec<f64>>,
    ) -> PyResult<Vec<f64>> {
        let w = self::weights(weights, self.inner.len())?;
        let b = core::ControlPoints::new(controls).map_err(value_error)?;
        self.inner.patch_eval(&w, &b, &x).map_err(value_error)
    }

    /// Blending vector with linear precision at y, found by iterative proportional fitting.
    #[pyo3(signature = (y, weights=None, tol=1e-9, max_iter=100_000))]
    fn preferred_blending(
        &self,
        y: Vec<f64>,
        weights: Option<Vec<f64>>,
        tol: f64,
        max_iter: usize,
    ) -> PyResult<Vec<f64>> {
        let w = self::weights(weights, self.inner.len())?;
        let p =
            core::preferred_blending(&self.inner, &w, &y, tol, max_iter).map_err(value_error)?;
        Ok(p.into_inner())
    }
}

/// Outcome of the orientation-product certificate.
#[pyclass(frozen, get_all, module = "toric_patch")]
pub struct CompatibilityVerdict {
    /// "compatible", "incompatible" or "all_degenerate".
    status: String,
    global_sign: Option<i32>,
    witness: Option<(Vec<usize>, Vec<usize>)>,
}

#[pymethods]
impl CompatibilityVerdict {
    fn is_compatible(&self) -> bool {
        self.status == "compatible"
    }

    fn __repr__(&self) -> String {
        format!(
            "CompatibilityVerdict(status={:?}, global_sign={:?}, witness={:?})",
            self.status, self.global_sign, self.witness
        )
    }
}

impl From<core::CompatibilityVerdict> for CompatibilityVerdict {
    fn from(v: core::CompatibilityVerdict) -> Self {
        let status = match v.status {
            core::CompatibilityStatus::Compatible => "compatible",
            core::CompatibilityStatus::Incompatible => "incompatible",
            core::CompatibilityStatus::AllDegenerate => "all_degenerate",
        };
        Self {
            status: status.to_owned(),
            global_sign: v.global_sign,
            witness: v.witness,
        }
    }
}

/// Whether the controls certify an injective patch for every choice of positive weights.
#[pyfunction]
fn compatibility(config: &PointConfig, controls: Vec<Vec<f64>>) -> PyResult<CompatibilityVerdict> {
    core::compatibility(&config.inner, &controls)
        .map(Into::into)
        .map_err(value_error)
}

/// Compatibility after a linear projection x ↦ matrix·x + offset of the controls.
#[pyfunction]
#[pyo3(signature = (config, controls, matrix, offset=None))]
fn projected_compatibility(
    config: &PointConfig,
    controls: Vec<Vec<f64>>,
    matrix: Vec<Vec<f64>>,
    offset: Option<Vec<f64>>,
) -> PyResult<CompatibilityVerdict> {
    let b = core::ControlPoints::new(controls).map_err(value_error)?;
    let proj = core::Projection::Affine {
        offset: offset.unwrap_or_else(|| vec![0.0; matrix.len()]),
        matrix,
    };
    core::projected_injectivity(&config.inner, &b, &proj)
        .map(Into::into)
        .map_err(value_error)
}

/// Determinant of the Jacobian of x ↦ Σ k_i x^{y_i} z_i via the Cauchy–Binet expansion.
#[pyfunction]
fn jacobian(y: Vec<Vec<f64>>, z: Vec<Vec<f64>>, k: Vec<f64>, x: Vec<f64>) -> f64 {
    core::jacobian_cb(&y, &z, &k, &x)
}

/// Point of the toric variety X_𝒜 with positive coordinates x.
#[pyfunction]
fn phi_a(config: &PointConfig, x: Vec<f64>) -> PyResult<Vec<f64>> {
    core::phi_a(&config.inner, &x)
        .map(|z| z.into_inner())
        .map_err(value_error)
}

/// Whether a point of the simplex lies on X_𝒜 up to `tol`.
#[pyfunction]
#[pyo3(signature = (config, z, tol=1e-9))]
fn membership_test(config: &PointConfig, z: Vec<f64>, tol: f64) -> PyResult<bool> {
    let z = core::SimplexPoint::new(z).map_err(value_error)?;
    Ok(core::membership_test(&config.inner, &z, tol))
}

/// Bernstein weights for the curve ("curve") or triangle ("triangle") of degree m.
#[pyfunction]
fn bernstein_weights(m: usize, shape: &str) -> PyResult<Vec<f64>> {
    let shape = match shape {
        "curve" => core::BernsteinShape::Curve,
        "triangle" => core::BernsteinShape::Triangle,
        other => return Err(value_error(format!("unknown shape {other:?}"))),
    };
    Ok(core::bernstein_weights(m, shape).values())
}

/// Regular triangulation induced by a lifting, as sorted index lists.
#[pyfunction]
#[pyo3(signature = (config, lifting, perturb=false))]
fn regular_triangulation(
    config: &PointConfig,
    lifting: Vec<f64>,
    perturb: bool,
) -> PyResult<Vec<Vec<usize>>> {
    let lambda = core::LiftingFunction::new(lifting).map_err(value_error)?;
    let t = if perturb {
        core::triangulation::regular_triangulation_generic(&config.inner, &lambda).map(|(t, _)| t)
    } else {
        core::regular_triangulation(&config.inner, &lambda)
    }
    .map_err(value_error)?;
    Ok(t.into())
}

/// (regular, witness lifting or None, optimal slack) for a triangulation.
#[pyfunction]
fn is_regular(
    config: &PointConfig,
    simplices: Vec<Vec<usize>>,
) -> PyResult<(bool, Option<Vec<f64>>, f64)> {
    let t = core::Triangulation::new(simplices);
    let v = core::is_regular(&config.inner, &t).map_err(value_error)?;
    Ok((v.regular, v.witness.map(|w| w.values().to_vec()), v.slack))
}

/// Estimated (patch → complex, complex → patch) distances for weights w·t^λ.
#[pyfunction]
#[pyo3(signature = (config, controls, lifting, t, simplices=None, weights=None, grid=None))]
#[allow(clippy::too_many_arguments)]
fn degeneration_distance(
    config: &PointConfig,
    controls: Vec<Vec<f64>>,
    lifting: Vec<f64>,
    t: f64,
    simplices: Option<Vec<Vec<usize>>>,
    weights: Option<Vec<f64>>,
    grid: Option<usize>,
) -> PyResult<(f64, f64)> {
    let cfg = &config.inner;
    let lambda = core::LiftingFunction::new(lifting).map_err(value_error)?;
    let base = self::weights(weights, cfg.len())?;
    let tri = match simplices {
        Some(s) => core::Triangulation::new(s),
        None => {
            core::triangulation::regular_triangulation_generic(cfg, &lambda)
                .map_err(value_error)?
                .0
        }
    };
    let b = core::ControlPoints::new(controls).map_err(value_error)?;
    let complex = core::control_polytope(&tri, &b);
    let patch = core::ToricPatch::new(cfg.clone()).map_err(value_error)?;
    let w = core::degenerate_weights(&base, &lambda, t).map_err(value_error)?;
    let grid = grid.unwrap_or(if cfg.dim() == 1 {
        core::degeneration::DEFAULT_GRID_CURVE
    } else {
        core::degeneration::DEFAULT_GRID_SURFACE
    });
    let r = core::patch_complex_distance(&patch, &w, &b, &complex, grid).map_err(value_error)?;
    Ok((r.sup_patch_to_complex, r.sup_complex_to_patch))
}

/// (distance, passes, recovered triangulation) comparing X_{𝒜,t^λ} with |T| in the simplex.
#[pyfunction]
#[pyo3(signature = (config, lifting, simplices, t, grid=101))]
fn converse_check(
    config: &PointConfig,
    lifting: Vec<f64>,
    simplices: Vec<Vec<usize>>,
    t: f64,
    grid: usize,
) -> PyResult<(f64, bool, Vec<Vec<usize>>)> {
    let lambda = core::LiftingFunction::new(lifting).map_err(value_error)?;
    let tri = core::Triangulation::new(simplices);
    let r = core::converse_check(&config.inner, &lambda, &tri, t, grid).map_err(value_error)?;
    Ok((r.distance, r.passes, r.recovered.into()))
}

#[pymodule]
fn toric_patch(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PointConfig>()?;
    m.add_class::<ToricPatch>()?;
    m.add_class::<CompatibilityVerdict>()?;
    m.add_function(wrap_pyfunction!(compatibility, m)?)?;
    m.add_function(wrap_pyfunction!(projected_compatibility, m)?)?;
    m.add_function(wrap_pyfunction!(jacobian, m)?)?;
    m.add_function(wrap_pyfunction!(phi_a, m)?)?;
    m.add_function(wrap_pyfunction!(membership_test, m)?)?;
    m.add_function(wrap_pyfunction!(bernstein_weights, m)?)?;
    m.add_function(wrap_pyfunction!(regular_triangulation, m)?)?;
    m.add_function(wrap_pyfunction!(is_regular, m)?)?;
    m.add_function(wrap_pyfunction!(degeneration_distance, m)?)?;
    m.add_function(wrap_pyfunction!(converse_check, m)?)?;
    Ok(())
}
