//! Adaptive quadrature on finite and semi-infinite intervals.
//!
//! The worker rule is the 15-point Kronrod extension of 7-point Gauss with
//! the QUADPACK error rescaling. Infinite upper limits are mapped to [0, 1)
//! through x = a + t/(1-t). Callers that integrate absolute-value
//! integrands pass the kink locations as explicit split points; panels are
//! then smooth inside and the error estimate stays honest.

use crate::error::{Error, Result};

/// Positive Kronrod abscissae for the 15-point rule (the center 0 first).
const XGK: [f64; 8] = [
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];

/// Gauss weights for the embedded 7-point rule (nodes XGK[0], XGK[2], ...).
const WG: [f64; 4] = [
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

/// Tolerances and budgets for the adaptive integrator.
#[derive(Debug, Clone)]
pub struct QuadratureConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    /// Probe count used by sign-change isolation (see [`crate::roots`]).
    pub probe_points: usize,
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 1e-9,
            max_subdivisions: 2000,
            probe_points: 256,
        }
    }
}

impl QuadratureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.abs_tol > 0.0) || !(self.rel_tol > 0.0) {
            return Err(Error::InvalidInput("quadrature tolerances must be positive".into()));
        }
        if self.max_subdivisions < 1 {
            return Err(Error::InvalidInput("max_subdivisions must be >= 1".into()));
        }
        Ok(())
    }

    fn tolerance(&self, value: f64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.abs())
    }
}

/// Outcome of an adaptive integration.
#[derive(Debug, Clone)]
pub struct QuadratureResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions_used: usize,
    /// Split points the integration honored (kink locations, in x space).
    pub kinks: Vec<f64>,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// QUADPACK-style error rescaling: do not trust |K15 - G7| more than the
/// variation of the integrand on the panel allows.
fn rescale_error(err: f64, res_abs: f64, res_asc: f64) -> f64 {
    let mut scaled = err.abs();
    if res_asc != 0.0 && scaled != 0.0 {
        let scale = (200.0 * scaled / res_asc).powf(1.5);
        scaled = if scale < 1.0 { res_asc * scale } else { res_asc };
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        scaled = scaled.max(50.0 * f64::EPSILON * res_abs);
    }
    scaled
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);

    let mut fv = [[0.0f64; 8]; 2]; // [below center, above center]
    fv[0][0] = fc;
    fv[1][0] = fc;
    for j in 1..8 {
        let dx = half * XGK[j];
        fv[0][j] = f(center - dx);
        fv[1][j] = f(center + dx);
    }

    let mut kronrod = WGK[0] * fc;
    let mut res_abs = WGK[0] * fc.abs();
    let mut gauss = WG[0] * fc;
    for j in 1..8 {
        let sum = fv[0][j] + fv[1][j];
        kronrod += WGK[j] * sum;
        res_abs += WGK[j] * (fv[0][j].abs() + fv[1][j].abs());
        if j % 2 == 0 {
            gauss += WG[j / 2] * sum;
        }
    }

    let mean = 0.5 * kronrod;
    let mut res_asc = WGK[0] * (fc - mean).abs();
    for j in 1..8 {
        res_asc += WGK[j] * ((fv[0][j] - mean).abs() + (fv[1][j] - mean).abs());
    }

    let value = kronrod * half;
    let err = ((kronrod - gauss) * half).abs();
    Panel {
        a,
        b,
        value,
        error: rescale_error(err, res_abs * half.abs(), res_asc * half.abs()),
    }
}

/// Integrate `f` over (a, b); `b` may be `f64::INFINITY`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, cfg: &QuadratureConfig) -> Result<QuadratureResult> {
    integrate_with_splits(f, a, b, &[], cfg)
}

/// Integrate with mandatory interior split points (kinks of |...|-type
/// integrands). Splits outside (a, b) are ignored.
pub fn integrate_with_splits<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    splits: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    cfg.validate()?;
    if !a.is_finite() {
        return Err(Error::InvalidInput("lower integration limit must be finite".into()));
    }
    if !(a < b) {
        if a == b {
            return Ok(QuadratureResult {
                value: 0.0,
                error_estimate: 0.0,
                subdivisions_used: 0,
                kinks: vec![],
            });
        }
        return Err(Error::InvalidInput(format!("invalid interval ({a}, {b})")));
    }

    if b.is_infinite() {
        // x = a + t/(1-t) maps [0, 1) onto [a, ∞)
        let g = move |t: f64| {
            let om = 1.0 - t;
            f(a + t / om) / (om * om)
        };
        let mapped: Vec<f64> = splits
            .iter()
            .filter(|&&s| s > a && s.is_finite())
            .map(|&s| (s - a) / (1.0 + (s - a)))
            .collect();
        let inner = adaptive(&g, 0.0, 1.0, &mapped, cfg)?;
        return Ok(QuadratureResult {
            kinks: splits.iter().copied().filter(|&s| s > a && s.is_finite()).collect(),
            ..inner
        });
    }

    let kept: Vec<f64> = splits.iter().copied().filter(|&s| s > a && s < b).collect();
    let mut out = adaptive(&f, a, b, &kept, cfg)?;
    out.kinks = kept;
    Ok(out)
}

fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    splits: &[f64],
    cfg: &QuadratureConfig,
) -> Result<QuadratureResult> {
    let mut edges = Vec::with_capacity(splits.len() + 2);
    edges.push(a);
    edges.extend(splits.iter().copied());
    edges.push(b);
    edges.sort_by(f64::total_cmp);
    edges.dedup();

    let mut panels: Vec<Panel> = edges.windows(2).map(|w| gk15(f, w[0], w[1])).collect();
    let mut used = 0usize;

    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if error <= cfg.tolerance(value) {
            break;
        }
        if used >= cfg.max_subdivisions {
            let (value, error) = tally(&mut panels);
            return Err(Error::Accuracy {
                value,
                error_estimate: error,
                subdivisions: used,
            });
        }
        // split the panel with the largest error estimate
        let worst = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.error.total_cmp(&y.1.error))
            .map(|(i, _)| i)
            .expect("at least one panel");
        let p = panels[worst];
        let mid = 0.5 * (p.a + p.b);
        if !(p.a < mid && mid < p.b) {
            // panel no longer splittable in f64; accept its estimate
            let (value, error) = tally(&mut panels);
            return Err(Error::Accuracy {
                value,
                error_estimate: error,
                subdivisions: used,
            });
        }
        panels[worst] = gk15(f, p.a, mid);
        panels.push(gk15(f, mid, p.b));
        used += 1;
    }

    let (value, error) = tally(&mut panels);
    Ok(QuadratureResult {
        value,
        error_estimate: error,
        subdivisions_used: used,
        kinks: vec![],
    })
}

/// Sum panels in left-to-right order so the result does not depend on the
/// order in which they were refined.
fn tally(panels: &mut [Panel]) -> (f64, f64) {
    panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    let value = panels.iter().map(|p| p.value).sum();
    let error = panels.iter().map(|p| p.error).sum();
    (value, error)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn cfg() -> QuadratureConfig {
        QuadratureConfig::default()
    }

    #[test]
    fn exponential_tail_integrates_to_one() {
        let r = integrate(|x: f64| (-x).exp(), 0.0, f64::INFINITY, &cfg()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
        assert!(r.error_estimate <= 1e-9);
    }

    #[test]
    fn frechet_density_integrates_to_one() {
        // alpha = 2 Fréchet density; underflows to exactly 0 near the origin
        let phi2 = |x: f64| {
            if x <= 0.0 {
                0.0
            } else {
                2.0 * x.powi(-3) * (-x.powi(-2)).exp()
            }
        };
        let r = integrate(phi2, 0.0, f64::INFINITY, &cfg()).unwrap();
        assert_abs_diff_eq!(r.value, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn abs_sin_with_kink_split() {
        let pi = std::f64::consts::PI;
        let r = integrate_with_splits(|x: f64| x.sin().abs(), 0.0, 2.0 * pi, &[pi], &cfg()).unwrap();
        assert_abs_diff_eq!(r.value, 4.0, epsilon = 1e-10);
        assert_eq!(r.kinks, vec![pi]);
    }

    #[test]
    fn splitting_at_kinks_does_not_move_the_value() {
        // |1 - r_P/r_Q|-shaped integrand with a kink at 1
        let f = |x: f64| (1.0 - x).abs() * (-x).exp();
        let with = integrate_with_splits(f, 0.0, f64::INFINITY, &[1.0], &cfg()).unwrap();
        let without = integrate(f, 0.0, f64::INFINITY, &cfg()).unwrap();
        assert!(
            (with.value - without.value).abs() <= with.error_estimate + without.error_estimate,
            "kink split moved the value beyond combined error bounds"
        );
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let tight = QuadratureConfig {
            abs_tol: 1e-300,
            rel_tol: 1e-16,
            max_subdivisions: 4,
            ..QuadratureConfig::default()
        };
        let err = integrate(|x: f64| (x * 37.0).sin().abs() + x.sqrt(), 0.0, 10.0, &tight).unwrap_err();
        match err {
            Error::Accuracy { value, .. } => assert!(value.is_finite()),
            other => panic!("expected accuracy error, got {other:?}"),
        }
    }

    #[test]
    fn degenerate_interval_is_zero() {
        let r = integrate(|x: f64| x, 3.0, 3.0, &cfg()).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn linearity_on_smooth_functions() {
        let c = cfg();
        let f = |x: f64| (-x).exp() * (1.0 + x.sin());
        let g = |x: f64| (-0.5 * x).exp() * x.cos();
        let (alpha, beta) = (2.25, -0.75);
        let combined = integrate(|x| alpha * f(x) + beta * g(x), 0.0, f64::INFINITY, &c).unwrap();
        let fa = integrate(f, 0.0, f64::INFINITY, &c).unwrap();
        let gb = integrate(g, 0.0, f64::INFINITY, &c).unwrap();
        assert!(
            (combined.value - alpha * fa.value - beta * gb.value).abs() <= 3.0 * c.abs_tol,
            "integration is not linear within tolerance"
        );
    }
}
