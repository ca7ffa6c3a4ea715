//! Browser bindings: shape spectra, Fibonacci node geometry and small
//! convergence studies. Everything crosses the boundary as flat `f64` arrays
//! or CSV text; `www/index.html` does the drawing.

use wasm_bindgen::prelude::*;

use spdo_core::assembly::Method;
use spdo_core::harness::{build_shape, emit_report, run_convergence_study, ReportFormat, StudyConfig};
use spdo_core::kernels::shape_decay_fit_range;
use spdo_core::pointsets::fibonacci_points;

const MAX_NODES: usize = 400;
const MAX_DEGREE: usize = 600;

fn js_err(e: impl std::fmt::Display) -> JsValue {
    JsValue::from_str(&e.to_string())
}

/// `[tau_hat, phi_hat(0), phi_hat(1), ..., phi_hat(l_max)]` for a kernel name
/// such as `wendland` or `wendland-c2`.
#[wasm_bindgen]
pub fn shape_spectrum(kernel: &str, l_max: usize) -> Result<Vec<f64>, JsValue> {
    let l_max = l_max.clamp(10, MAX_DEGREE);
    let shape = build_shape(kernel, 3, l_max).map_err(js_err)?;
    let fit = shape_decay_fit_range(&shape, l_max / 8, l_max);
    let mut out = Vec::with_capacity(l_max + 2);
    out.push(fit.tau_hat);
    out.extend((0..=l_max).map(|l| shape.coeff(l)));
    Ok(out)
}

/// `[h_X, q_X, x0, y0, z0, x1, ...]` for `n` Fibonacci nodes.
#[wasm_bindgen]
pub fn fibonacci_nodes(n: usize) -> Result<Vec<f64>, JsValue> {
    let x = fibonacci_points(n.clamp(2, 4 * MAX_NODES)).map_err(js_err)?;
    let mut out = vec![x.h_x().unwrap_or(f64::NAN), x.q_x()];
    for p in x.points() {
        out.extend_from_slice(p);
    }
    Ok(out)
}

/// CSV table `N,h_X,<norm>,EOC` for the Dirichlet benchmark, followed by a
/// `# slope` line.
#[wasm_bindgen]
pub fn convergence_csv(method: &str, operator: &str, ladder: &str, l_max: usize, norm: f64) -> Result<String, JsValue> {
    let mut cfg = StudyConfig {
        method: Method::parse(method).map_err(js_err)?,
        operator: operator.to_string(),
        l_max: l_max.clamp(20, MAX_DEGREE),
        sobolev_s: norm,
        closed_form_identity: operator == "identity",
        ..StudyConfig::default()
    };
    cfg.set("ladder", ladder).map_err(js_err)?;
    if cfg.ladder.iter().any(|&n| n > MAX_NODES) {
        return Err(js_err(format!(
            "ladder entries are capped at {MAX_NODES} in the browser"
        )));
    }
    let report = run_convergence_study(&cfg).map_err(js_err)?;
    let mut text = emit_report(&report.rows, norm, ReportFormat::Csv);
    for o in &report.outcomes {
        if let Err(e) = &o.result {
            text.push_str(&format!("# N={} failed: {e}\n", o.n));
        }
    }
    text.push_str(&format!(
        "# slope {} predicted {}\n",
        report.slope.unwrap_or(f64::NAN),
        report.predicted_rate
    ));
    Ok(text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectrum_layout() {
        let s = shape_spectrum("wendland", 200).unwrap();
        assert_eq!(s.len(), 202);
        assert!((s[1] - std::f64::consts::PI / 6.0).abs() < 1e-12);
        assert!((s[0] - 1.5).abs() < 0.1);
    }

    #[test]
    fn nodes_layout() {
        let v = fibonacci_nodes(30).unwrap();
        assert_eq!(v.len(), 2 + 90);
        assert!(v[0] > v[1]);
    }

    #[test]
    fn small_study() {
        let csv = convergence_csv("galerkin", "weakly-singular", "20,30,40", 200, -0.5).unwrap();
        assert!(csv.starts_with("N,h_X,"));
        assert!(csv.contains("# slope"));
    }
}
