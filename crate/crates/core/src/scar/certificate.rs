use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{Budget, ExactPoly};
use crate::armodel::{ArModel, Provenance, STABILITY_MARGIN};
use crate::error::{Error, Result};
use crate::num::{Real, C};

use super::family::consistency_family;
use super::select::{select_parameters, Candidate};
use super::singular::{singular_points, SearchPath, SingularOptions};
use super::surface::{boundary_surface, surface_vars};

/// Allowed distance of the boundary modulus from one at `δ̂t`.
pub const BOUNDARY_TOL: f64 = 1e-6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub sampled_dts: Vec<f64>,
    pub max_root_moduli: Vec<f64>,
    pub boundary_modulus_at_dt_hat: f64,
}

/// Knobs of the construction, recorded in every certificate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScarOptions {
    pub budget: Budget,
    pub root_width: f64,
    pub scan_points: usize,
    pub oracle_samples: usize,
    pub numeric_only: bool,
}

impl Default for ScarOptions {
    fn default() -> Self {
        ScarOptions { budget: Budget::default(), root_width: 1e-10, scan_points: 20_000, oracle_samples: 99, numeric_only: false }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScarCertificate {
    pub lambda: C<f64>,
    pub s_hat: C<f64>,
    pub dt_hat: f64,
    #[serde(serialize_with = "poly_text", deserialize_with = "parse_poly_text")]
    pub r_surface: ExactPoly,
    pub candidates: Vec<Candidate>,
    pub oracle_report: StabilityReport,
    pub tool_version: String,
    pub budgets: ScarOptions,
    pub search_path: SearchPath,
    #[serde(default)]
    pub search_notes: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub created: Option<String>,
}

fn poly_text<S: Serializer>(p: &ExactPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&p.to_string())
}

fn parse_poly_text<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<ExactPoly, D::Error> {
    let text = String::deserialize(d)?;
    ExactPoly::parse(&text, &surface_vars()).map_err(serde::de::Error::custom)
}

impl ScarCertificate {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Per-unit-step coefficients `a_j/δt` at `ŝ`.
    pub fn coefficients_per_dt(&self) -> Result<[C<f64>; 3]> {
        Ok(consistency_family(self.lambda)?.coefficients(self.s_hat, 1.0))
    }
}

/// Sample `δt = k δ̂t/(n + 1)`, `k = 1..n`, and require every maximum root
/// modulus below one, plus contact with the unit circle at `δ̂t`.
pub fn verify_stability_margin(cert: &ScarCertificate, n_samples: usize) -> Result<StabilityReport> {
    if n_samples < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 oracle samples, got {n_samples}")));
    }
    let fam = consistency_family(cert.lambda)?;
    let sampled_dts: Vec<f64> = (1..=n_samples).map(|k| cert.dt_hat * k as f64 / (n_samples + 1) as f64).collect();
    let max_root_moduli: Vec<f64> = sampled_dts.par_iter().map(|&dt| fam.max_root_modulus(cert.s_hat, dt)).collect();
    for (&dt, &m) in sampled_dts.iter().zip(&max_root_moduli) {
        if !(m < 1.0 - STABILITY_MARGIN) {
            return Err(Error::CertificateRefuted { dt, modulus: m });
        }
    }
    let boundary = fam.max_root_modulus(cert.s_hat, cert.dt_hat);
    if !((boundary - 1.0).abs() <= BOUNDARY_TOL) {
        return Err(Error::CertificateRefuted { dt: cert.dt_hat, modulus: boundary });
    }
    Ok(StabilityReport { sampled_dts, max_root_moduli, boundary_modulus_at_dt_hat: boundary })
}

/// Surface, singular set, maximin selection and oracle for one `λ`.
pub fn scar_certificate(lambda: C<f64>, opts: &ScarOptions) -> Result<ScarCertificate> {
    consistency_family(lambda)?;
    let r = boundary_surface(lambda)?;
    let sopts = SingularOptions {
        budget: opts.budget,
        root_width: opts.root_width,
        family: Some(lambda),
        scan_points: opts.scan_points,
        numeric_only: opts.numeric_only,
        ..SingularOptions::default()
    };
    let w = singular_points(&r, &sopts)?;
    let sel = select_parameters(&r, &w.real_points(), opts.root_width)?;
    let mut cert = ScarCertificate {
        lambda,
        s_hat: sel.s_hat,
        dt_hat: sel.dt_hat,
        r_surface: r,
        candidates: sel.candidates,
        oracle_report: StabilityReport { sampled_dts: vec![], max_root_moduli: vec![], boundary_modulus_at_dt_hat: f64::NAN },
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        budgets: opts.clone(),
        search_path: w.path,
        search_notes: w.notes,
        created: None,
    };
    cert.oracle_report = verify_stability_margin(&cert, opts.oracle_samples)?;
    Ok(cert)
}

/// The SCAR-3 model of a certificate at step `dt ∈ (0, δ̂t)` with
/// `Q = σ² dt` and zero forcing.
pub fn scar3_model<T: Real>(cert: &ScarCertificate, sigma: T, dt: T) -> Result<ArModel<T>> {
    let d = dt.as_f64();
    if !(d > 0.0 && d < cert.dt_hat) {
        return Err(Error::StepOutsideInterval { dt: d, dt_hat: cert.dt_hat });
    }
    let fam = consistency_family(C::new(T::lit(cert.lambda.re), T::lit(cert.lambda.im)))?;
    let s = C::new(T::lit(cert.s_hat.re), T::lit(cert.s_hat.im));
    let coeffs = fam.coefficients(s, dt).to_vec();
    Ok(ArModel::new(coeffs, sigma * sigma * dt, dt)?.with_provenance(Provenance::Scar))
}

/// Certificate plus model; `dt` defaults to `δ̂t/2`.
pub fn construct_scar3(
    lambda: C<f64>,
    sigma: f64,
    dt: Option<f64>,
    opts: &ScarOptions,
) -> Result<(ArModel<f64>, ScarCertificate)> {
    let cert = scar_certificate(lambda, opts)?;
    let model = scar3_model(&cert, sigma, dt.unwrap_or(cert.dt_hat / 2.0))?;
    Ok((model, cert))
}
