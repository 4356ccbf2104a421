//! JSON report documents emitted by the CLI. Matrices use the same
//! `[re, im]` nested-array encoding as plant documents, so every emitted
//! matrix round-trips through the model parser helpers.

use serde::{Deserialize, Serialize};

use crate::certificate::Certificate;
use crate::model::{matrix_to_rows, MatrixRows};
use crate::oracle::{Consistency, OracleReport};
use crate::popov::{MinGamma, PopovAnalysis, Verdict};

fn verdict_str(v: Verdict) -> &'static str {
    match v {
        Verdict::CertifiedStable => "certified-stable",
        Verdict::NotCertified => "not-certified",
    }
}

/// Frequency-analysis report (the `analyze` command).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub verdict: String,
    pub theta: f64,
    pub gamma: f64,
    pub margin: f64,
    /// `null` encodes the analytic infinity marker.
    pub worst_omega: Option<f64>,
    pub hurwitz: bool,
    pub abscissa: f64,
}

impl AnalysisReport {
    pub fn from_analysis(a: &PopovAnalysis) -> Self {
        AnalysisReport {
            verdict: verdict_str(a.verdict).to_string(),
            theta: a.theta,
            gamma: a.gamma,
            margin: a.margin,
            worst_omega: a.worst_omega.is_finite().then_some(a.worst_omega),
            hurwitz: a.hurwitz,
            abscissa: a.abscissa,
        }
    }
}

/// Certificate report (the `certificate` command).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub theta: f64,
    pub gamma: f64,
    #[serde(rename = "P1")]
    pub p1: MatrixRows,
    #[serde(rename = "P2")]
    pub p2: MatrixRows,
    pub lmi_margin: f64,
    pub mtilde_max_eig: f64,
    pub lambda: f64,
    pub c: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
}

impl CertificateReport {
    pub fn from_certificate(cert: &Certificate) -> Self {
        CertificateReport {
            theta: cert.theta,
            gamma: cert.gamma,
            p1: matrix_to_rows(&cert.p.block1()),
            p2: matrix_to_rows(&cert.p.block2()),
            lmi_margin: cert.lmi_margin,
            mtilde_max_eig: cert.mtilde_max_eig,
            lambda: cert.lambda,
            c: cert.c,
            c1: cert.c1,
            c2: cert.c2,
            c3: cert.c3,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleSampleDoc {
    pub delta_eigs: Vec<f64>,
    pub abscissa: f64,
    pub hurwitz: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaBlocks {
    #[serde(rename = "Delta1")]
    pub delta1: MatrixRows,
    #[serde(rename = "Delta2")]
    pub delta2: MatrixRows,
}

/// Oracle report (the `oracle` command).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OracleReportDoc {
    pub consistent: bool,
    pub verdict: String,
    pub theta: f64,
    pub gamma: f64,
    pub samples: Vec<OracleSampleDoc>,
    pub counterexample: Option<DeltaBlocks>,
}

impl OracleReportDoc {
    pub fn from_report(report: &OracleReport) -> Self {
        let samples = report
            .samples
            .iter()
            .map(|s| {
                let h = crate::model::hermitian_part(s.delta.matrix());
                let mut eigs: Vec<f64> = nalgebra::linalg::SymmetricEigen::new(h)
                    .eigenvalues
                    .iter()
                    .cloned()
                    .collect();
                eigs.sort_by(|a, b| a.partial_cmp(b).unwrap());
                OracleSampleDoc {
                    delta_eigs: eigs,
                    abscissa: s.abscissa,
                    hurwitz: s.hurwitz,
                }
            })
            .collect();
        let counterexample = match &report.consistency {
            Consistency::Consistent => None,
            Consistency::Counterexample(d) => Some(DeltaBlocks {
                delta1: matrix_to_rows(&d.value.block1()),
                delta2: matrix_to_rows(&d.value.block2()),
            }),
        };
        OracleReportDoc {
            consistent: report.consistent(),
            verdict: verdict_str(report.analysis.verdict).to_string(),
            theta: report.analysis.theta,
            gamma: report.analysis.gamma,
            samples,
            counterexample,
        }
    }
}

/// Gamma-minimization report (the `min-gamma` command).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinGammaReport {
    pub gamma_star: f64,
    pub theta: f64,
    pub degenerate: bool,
}

impl MinGammaReport {
    pub fn from_result(r: &MinGamma) -> Self {
        MinGammaReport {
            gamma_star: r.gamma_star,
            theta: r.theta,
            degenerate: r.degenerate,
        }
    }
}

/// Trajectory CSV (`t,trace` rows).
pub fn trajectory_csv(times: &[f64], traces: &[f64]) -> String {
    let mut out = String::from("t,trace\n");
    for (t, tr) in times.iter().zip(traces.iter()) {
        out.push_str(&format!("{t},{tr}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{rows_to_matrix, PlantSpec};

    #[test]
    fn certificate_report_roundtrips() {
        let cert = crate::certificate::certify(&PlantSpec::opa(2.1), 0.2, 2.0).unwrap();
        let doc = CertificateReport::from_certificate(&cert);
        let text = serde_json::to_string(&doc).unwrap();
        let back: CertificateReport = serde_json::from_str(&text).unwrap();
        let p1 = rows_to_matrix(&back.p1, "P1").unwrap();
        assert!(crate::model::max_norm(&(&p1 - cert.p.block1())) < 1e-15);
        assert_eq!(back.c2, doc.c2);
    }

    #[test]
    fn oracle_report_roundtrips() {
        let report = crate::oracle::consistency_sweep(&PlantSpec::opa(2.1), 0.2, 2.0, 8, 1).unwrap();
        let doc = OracleReportDoc::from_report(&report);
        assert!(doc.consistent);
        assert!(doc.counterexample.is_none());
        let text = serde_json::to_string_pretty(&doc).unwrap();
        let back: OracleReportDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back.samples.len(), 8);
        assert!(back.samples[0].hurwitz);
    }

    #[test]
    fn trajectory_csv_shape() {
        let csv = trajectory_csv(&[0.0, 0.1], &[2.0, 1.9]);
        assert_eq!(csv, "t,trace\n0,2\n0.1,1.9\n");
    }
}
