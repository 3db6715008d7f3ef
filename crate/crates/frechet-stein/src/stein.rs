//! The reverse-hazard-rate Stein discrepancies and the distance bounds
//! they certify.
//!
//! For two laws P (atomless reference) and Q (integrating measure) with
//! c_Q >= c_P, the discrepancy is
//!
//! ```text
//! Δ(Q|P)   = ∫_{c_Q}^∞ |1 - r_P(x)/r_Q(x)|   q(x) dx
//! Δ_w(Q|P) = ∫_{c_Q}^∞ |1 - r_P(x)/r_Q(x)| x q(x) dx
//! ```
//!
//! and the certified bounds are Kol <= Δ + q_0, TV <= 2Δ + q_0, and
//! Wass <= 2 μ_P Δ + 3 Δ_w (the weighted bound needs c_P >= 0, q_0 = 0 and
//! finite means).

use crate::dist::{maxima, scaling_sequence, Frechet, Law, Maxima, Spec};
use crate::error::{Error, Result};
use crate::quad::{integrate_with_splits, QuadratureConfig, QuadratureResult};
use crate::roots::find_sign_changes_on_grid;
use crate::special::{gamma, ln_gamma_ratio, ln_gamma_unchecked, upper_incomplete_gamma};

/// Which law played the reference P and which the integrating measure Q.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Roles {
    pub p: String,
    pub q: String,
}

/// A computed discrepancy with its quadrature error and kink locations.
#[derive(Debug, Clone)]
pub struct DiscrepancyResult {
    pub value: f64,
    pub error_estimate: f64,
    /// Sign changes of 1 - r_P/r_Q located inside the integration window.
    pub kinks: Vec<f64>,
    pub roles: Roles,
    pub weighted: bool,
    /// Set when a research override computed a value outside the
    /// hypotheses that certify it as a distance bound.
    pub warning: Option<String>,
}

/// Kolmogorov / total-variation / Wasserstein upper bounds assembled from
/// the discrepancies.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub delta: f64,
    pub delta_err: f64,
    pub delta_w: Option<f64>,
    pub delta_w_err: Option<f64>,
    /// Starting mass of Q.
    pub q_0: f64,
    /// Mean of P, when the Wasserstein bound applies.
    pub mu: Option<f64>,
    pub kol_bound: f64,
    pub tv_bound: f64,
    pub wass_bound: Option<f64>,
}

fn check_roles(p: &dyn Law, q: &dyn Law) -> Result<()> {
    if p.starting_mass() > 0.0 {
        return Err(Error::RoleViolation(format!(
            "P must be atomless (p_0 = 0); {} has starting mass {}",
            p.label(),
            p.starting_mass()
        )));
    }
    if q.left_endpoint() < p.left_endpoint() {
        return Err(Error::RoleViolation(format!(
            "support containment requires c_Q >= c_P; got c_Q = {} < c_P = {} ({} | {})",
            q.left_endpoint(),
            p.left_endpoint(),
            q.label(),
            p.label()
        )));
    }
    Ok(())
}

fn check_weighted(p: &dyn Law, q: &dyn Law) -> Result<()> {
    if p.left_endpoint() < 0.0 {
        return Err(Error::Precondition(format!(
            "weighted discrepancy requires c_P >= 0; {} has c_P = {}",
            p.label(),
            p.left_endpoint()
        )));
    }
    if q.starting_mass() > 0.0 {
        return Err(Error::Precondition(format!(
            "weighted discrepancy requires q_0 = 0; {} has q_0 = {}",
            q.label(),
            q.starting_mass()
        )));
    }
    if p.mean().is_none() {
        return Err(Error::Precondition(format!("{} has no finite mean", p.label())));
    }
    if q.mean().is_none() {
        return Err(Error::Precondition(format!("{} has no finite mean", q.label())));
    }
    Ok(())
}

/// Two-sided log-spaced quantile grid of Q over [eps, 1 - eps].
fn quantile_probe_grid(q: &dyn Law, eps: f64, points: usize) -> Vec<f64> {
    let half = (points / 2).max(8);
    let log_lo = eps.ln();
    let log_hi = 0.5f64.ln();
    let mut grid = Vec::with_capacity(2 * half);
    for i in 0..half {
        let t = i as f64 / (half - 1) as f64;
        let u = (log_lo + (log_hi - log_lo) * t).exp();
        grid.push(q.quantile(u));
        grid.push(q.upper_quantile(u));
    }
    grid.retain(|x| x.is_finite());
    grid.sort_by(f64::total_cmp);
    grid.dedup();
    grid
}

/// Probe the envelope of |1 - R| beyond `from` (geometric probes).
fn tail_ratio_envelope(p: &dyn Law, q: &dyn Law, from: f64) -> f64 {
    let mut sup: f64 = 0.0;
    let mut x = from;
    for _ in 0..12 {
        let rq = q.reverse_hazard(x);
        if rq > 0.0 {
            let s = (1.0 - p.reverse_hazard(x) / rq).abs();
            if s.is_finite() {
                sup = sup.max(s);
            }
        }
        x *= 2.0;
        if !x.is_finite() {
            break;
        }
    }
    sup.max(1.0)
}

fn discrepancy_integral(
    p: &dyn Law,
    q: &dyn Law,
    weighted: bool,
    cfg: &QuadratureConfig,
) -> Result<(QuadratureResult, Vec<f64>)> {
    let c_q = q.left_endpoint();
    let (lo, lo_tail_bound) = if c_q.is_finite() {
        (c_q, 0.0)
    } else {
        // truncate far into the left tail; the neglected mass is 1e-14
        let lo = q.quantile(1e-14);
        (lo, 1e-14 * tail_ratio_envelope(p, q, lo.abs().max(1.0)))
    };
    let hi = q.upper_quantile(1e-13);

    // kinks: sign changes of 1 - r_P/r_Q on the quantile-spaced probe grid
    let ratio_defect = |x: f64| {
        let rq = q.reverse_hazard(x);
        if rq <= 0.0 {
            return f64::NAN;
        }
        1.0 - p.reverse_hazard(x) / rq
    };
    let mut grid = quantile_probe_grid(q, 1e-12, cfg.probe_points);
    grid.retain(|&x| x > lo && x < hi);
    let kinks = find_sign_changes_on_grid(&ratio_defect, &grid);

    let integrand = |x: f64| {
        let qx = q.pdf(x);
        if !(qx > 1e-300) {
            return 0.0;
        }
        let s = ratio_defect(x);
        if !s.is_finite() {
            return 0.0;
        }
        let w = if weighted { x } else { 1.0 };
        s.abs() * w * qx
    };

    // quantile anchors keep the adaptive panels near the mass
    let mut splits = kinks.clone();
    splits.extend(crate::dist::quantile_anchors(q, lo, hi));
    splits.sort_by(f64::total_cmp);
    splits.dedup();

    let mut result = integrate_with_splits(&integrand, lo, hi, &splits, cfg)?;

    // the mass beyond the 1 - 1e-13 quantile is not negligible against
    // the x-weight; u = hi/x maps the tail onto (0, 1) at unit scale
    if hi > 0.0 {
        let tail = integrate_with_splits(
            |u: f64| {
                if u <= 0.0 {
                    return 0.0;
                }
                let x = hi / u;
                integrand(x) * hi / (u * u)
            },
            0.0,
            1.0,
            &[],
            cfg,
        )?;
        result.value += tail.value;
        result.error_estimate += tail.error_estimate;
    } else {
        result.error_estimate += tail_ratio_envelope(p, q, hi.abs().max(1.0)) * q.sf(hi);
    }
    result.error_estimate += lo_tail_bound;
    Ok((result, kinks))
}

fn assemble(
    p: &dyn Law,
    q: &dyn Law,
    weighted: bool,
    cfg: &QuadratureConfig,
) -> Result<DiscrepancyResult> {
    let (quad, kinks) = discrepancy_integral(p, q, weighted, cfg)?;
    Ok(DiscrepancyResult {
        value: quad.value,
        error_estimate: quad.error_estimate,
        kinks,
        roles: Roles {
            p: p.label(),
            q: q.label(),
        },
        weighted,
        warning: None,
    })
}

/// Δ(Q|P): the unweighted discrepancy of Q against the atomless
/// reference P.
pub fn delta(p: &dyn Law, q: &dyn Law, cfg: &QuadratureConfig) -> Result<DiscrepancyResult> {
    check_roles(p, q)?;
    assemble(p, q, false, cfg)
}

/// Δ_w(Q|P): the x-weighted discrepancy, defined under the Wasserstein
/// bound's hypotheses (c_P >= 0, q_0 = 0, finite means).
pub fn delta_w(p: &dyn Law, q: &dyn Law, cfg: &QuadratureConfig) -> Result<DiscrepancyResult> {
    check_roles(p, q)?;
    check_weighted(p, q)?;
    assemble(p, q, true, cfg)
}

/// Δ_w computed without the hypotheses that make it a certified
/// Wasserstein ingredient; the result carries a warning instead.
pub fn delta_w_unchecked(
    p: &dyn Law,
    q: &dyn Law,
    cfg: &QuadratureConfig,
) -> Result<DiscrepancyResult> {
    check_roles(p, q)?;
    let mut r = assemble(p, q, true, cfg)?;
    if check_weighted(p, q).is_err() {
        r.warning = Some(
            "weighted discrepancy computed outside the hypotheses of the Wasserstein bound \
             (c_P >= 0, q_0 = 0, finite means); the value certifies no distance"
                .into(),
        );
    }
    Ok(r)
}

/// How the maxima law and the Fréchet law are assigned to the roles
/// (P reference, Q integrating measure) in [`frechet_delta`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RoleChoice {
    /// From the sign of c_F: c_F <= 0 integrates against the Fréchet law,
    /// c_F > 0 against the maxima law.
    #[default]
    Auto,
    /// Force Q = Φ_α, P = F_n.
    FrechetAsQ,
    /// Force Q = F_n, P = Φ_α.
    MaximaAsQ,
}

/// The Fréchet-specialized discrepancy for the maxima of `base`:
/// Δ(Φ_α|F_n) when c_F <= 0, Δ(F_n|Φ_α) when c_F > 0.
pub fn frechet_delta(
    base: &Spec,
    n: u64,
    alpha: Option<f64>,
    weighted: bool,
    cfg: &QuadratureConfig,
) -> Result<DiscrepancyResult> {
    frechet_delta_full(base, n, None, alpha, weighted, RoleChoice::Auto, false, cfg)
}

/// Full-control variant: explicit scale, role override and the unsafe
/// weighted escape hatch.
#[allow(clippy::too_many_arguments)]
pub fn frechet_delta_full(
    base: &Spec,
    n: u64,
    a_n: Option<f64>,
    alpha: Option<f64>,
    weighted: bool,
    roles: RoleChoice,
    unsafe_weighted: bool,
    cfg: &QuadratureConfig,
) -> Result<DiscrepancyResult> {
    let alpha = match alpha.or_else(|| base.tail_index()) {
        Some(a) => a,
        None => {
            return Err(Error::Precondition(format!(
                "{} carries no tail index; pass the Fréchet shape explicitly",
                base.label()
            )))
        }
    };
    let phi = Frechet::new(alpha)?;
    let law_n: Maxima = maxima(base.clone(), n, a_n)?;
    let c_f = base.left_endpoint();

    let frechet_is_q = match roles {
        RoleChoice::Auto => c_f <= 0.0,
        RoleChoice::FrechetAsQ => true,
        RoleChoice::MaximaAsQ => false,
    };

    let (p, q): (&dyn Law, &dyn Law) = if frechet_is_q {
        (&law_n, &phi)
    } else {
        (&phi, &law_n)
    };

    if weighted && !unsafe_weighted {
        check_roles(p, q)?;
        check_weighted(p, q).map_err(|e| match e {
            Error::Precondition(msg) => Error::Precondition(format!(
                "{msg}; the unweighted discrepancy remains available, or use the unsafe \
                 weighted override to compute an uncertified value"
            )),
            other => other,
        })?;
    }

    let mut result = if weighted {
        if unsafe_weighted {
            delta_w_unchecked(p, q, cfg)?
        } else {
            delta_w(p, q, cfg)?
        }
    } else {
        delta(p, q, cfg)?
    };

    if roles != RoleChoice::Auto && frechet_is_q != (c_f <= 0.0) && result.warning.is_none() {
        result.warning = Some(format!(
            "role override: integrating against {} although the automatic support-based \
             assignment would reverse the roles",
            q.label()
        ));
    }
    Ok(result)
}

/// Distance-bound report for a (P, Q) pair: Kol <= Δ + q_0,
/// TV <= 2Δ + q_0, and Wass <= 2μΔ + 3Δ_w when the weighted
/// hypotheses hold.
pub fn bounds(p: &dyn Law, q: &dyn Law, cfg: &QuadratureConfig) -> Result<BoundReport> {
    let d = delta(p, q, cfg)?;
    let q0 = q.starting_mass();
    let mut report = BoundReport {
        delta: d.value,
        delta_err: d.error_estimate,
        delta_w: None,
        delta_w_err: None,
        q_0: q0,
        mu: None,
        kol_bound: d.value + q0,
        tv_bound: 2.0 * d.value + q0,
        wass_bound: None,
    };
    if check_weighted(p, q).is_ok() {
        let dw = delta_w(p, q, cfg)?;
        let mu = p.mean().expect("mean checked above");
        report.wass_bound = Some(2.0 * mu * d.value + 3.0 * dw.value);
        report.mu = Some(mu);
        report.delta_w = Some(dw.value);
        report.delta_w_err = Some(dw.error_estimate);
    }
    Ok(report)
}

/// Closed form Δ(F_n|Φ_α) = 1/(n+1) for Pareto maxima, any shape.
pub fn pareto_delta_closed(n: u64) -> f64 {
    1.0 / (n as f64 + 1.0)
}

/// Closed form Δ_w(F_n|Φ_α) = n^{-1/α} Γ(n+1) Γ(2-1/α) / Γ(2+n-1/α) for
/// Pareto maxima, α > 1, evaluated in log space.
pub fn pareto_delta_w_closed(alpha: f64, n: u64) -> Result<f64> {
    if !(alpha > 1.0) {
        return Err(Error::Precondition(format!(
            "weighted Pareto closed form requires alpha > 1, got {alpha}"
        )));
    }
    let nf = n as f64;
    let log = -nf.ln() / alpha + ln_gamma_ratio(nf + 1.0, nf + 2.0 - 1.0 / alpha)
        + ln_gamma_unchecked(2.0 - 1.0 / alpha);
    Ok(log.exp())
}

/// Closed forms for the discrepancy between two Fréchet laws,
/// Δ(Φ_α|Φ_β) and (for α > 1) Δ_w(Φ_α|Φ_β), valid for β > α.
pub fn frechet_vs_frechet(alpha: f64, beta: f64, weighted: bool) -> Result<f64> {
    if !(alpha > 0.0) || !(beta > alpha) {
        return Err(Error::Precondition(format!(
            "closed form requires beta > alpha > 0, got alpha={alpha}, beta={beta}"
        )));
    }
    let k = (alpha / beta).powf(alpha / (beta - alpha));
    if !weighted {
        let value = 1.0 - 2.0 * (-k).exp() - gamma((alpha + beta) / alpha)?
            + 2.0 * beta / alpha * upper_incomplete_gamma(beta / alpha, k)?;
        return Ok(value);
    }
    if !(alpha > 1.0) {
        return Err(Error::Precondition(format!(
            "weighted closed form requires alpha > 1, got {alpha}"
        )));
    }
    let value = -(gamma(-1.0 / alpha)?
        + beta * gamma((beta - 1.0) / alpha)?
        + 2.0 * alpha * upper_incomplete_gamma((alpha - 1.0) / alpha, k)?
        - 2.0 * beta * upper_incomplete_gamma((beta - 1.0) / alpha, k)?)
        / alpha;
    Ok(value)
}

/// u_n = n a_n r_F(a_n)/α, the local regular-variation diagnostic; tends
/// to 1 exactly when the scaling sequence normalizes the maxima.
pub fn u_n_diagnostic(base: &Spec, n: u64) -> Result<f64> {
    let alpha = base
        .tail_index()
        .ok_or_else(|| Error::Precondition(format!("{} carries no tail index", base.label())))?;
    let a = scaling_sequence(base, n)?;
    Ok(n as f64 * a * base.reverse_hazard(a) / alpha)
}
