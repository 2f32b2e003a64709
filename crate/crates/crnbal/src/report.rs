//! Aggregated analysis reports: one structure holding the network summary,
//! the Kirchhoff vector, all balance verdicts with their certificates or
//! witnesses, and the conductances when they exist. Serializes to a stable
//! versioned JSON schema whose keys follow the domain vocabulary
//! (`deficiency`, `rho`, `complex_balanced`, `formally_balanced`,
//! `detailed_balanced`, `kappa`).

use serde::{Deserialize, Serialize};

use crate::balance::{
    complex_balanced_with, conductance_decomposition, deficiency, is_detailed_balanced,
    is_formally_balanced, BalanceVerdict, BalanceViolation, EquilibriumCertificate,
    KernelContext,
};
use crate::graphkit::{connected_components, is_strongly_connected};
use crate::kirchhoff::rho_by_cofactor;
use crate::model::{build_matrices, ReactionNetwork};
use crate::rational::format_rational;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct NetworkSummary {
    pub species: Vec<String>,
    pub m: usize,
    pub c: usize,
    pub r: usize,
    pub linkage_classes: usize,
    pub deficiency: usize,
    pub reversible: bool,
    pub strongly_connected: Vec<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct CertificateReport {
    pub mu_star: Vec<f64>,
    pub beta: Vec<f64>,
    pub x_star: Vec<f64>,
    pub residual: f64,
}

impl From<&EquilibriumCertificate> for CertificateReport {
    fn from(cert: &EquilibriumCertificate) -> Self {
        CertificateReport {
            mu_star: cert.mu_star.clone(),
            beta: cert.beta.clone(),
            x_star: cert.x_star.clone(),
            residual: cert.residual,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum WitnessReport {
    NotStronglyConnected {
        component: usize,
    },
    KernelViolation {
        context: String,
        sigma: Vec<String>,
        lhs: String,
        rhs: String,
    },
}

fn context_name(context: KernelContext) -> &'static str {
    match context {
        KernelContext::KerZCapImD => "ker_Z_cap_im_D",
        KernelContext::KerDBar => "ker_D_bar",
        KernelContext::KerSBar => "ker_S_bar",
    }
}

impl From<&BalanceViolation> for WitnessReport {
    fn from(violation: &BalanceViolation) -> Self {
        match violation {
            BalanceViolation::NotStronglyConnected { component } => {
                WitnessReport::NotStronglyConnected { component: *component }
            }
            BalanceViolation::Multiplicative { sigma, context, lhs, rhs } => {
                WitnessReport::KernelViolation {
                    context: context_name(*context).to_string(),
                    sigma: sigma.iter().map(|s| s.to_string()).collect(),
                    lhs: format_rational(lhs),
                    rhs: format_rational(rhs),
                }
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct VerdictReport {
    pub holds: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CertificateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessReport>,
}

impl From<&BalanceVerdict> for VerdictReport {
    fn from(verdict: &BalanceVerdict) -> Self {
        VerdictReport {
            holds: verdict.holds,
            certificate: verdict.certificate.as_ref().map(CertificateReport::from),
            witness: verdict.violation.as_ref().map(WitnessReport::from),
        }
    }
}

/// The full analysis of one network. All fields are reproducible by
/// re-running the underlying operations on the same input.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct AnalysisReport {
    pub schema_version: u32,
    pub network: NetworkSummary,
    /// Kirchhoff vector entries as exact `p/q` strings, indexed by complex.
    pub rho: Vec<String>,
    pub complex_balanced: VerdictReport,
    /// Absent on irreversible networks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formally_balanced: Option<VerdictReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detailed_balanced: Option<VerdictReport>,
    /// Conductances, present when the network is reversible and formally
    /// balanced.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kappa: Option<Vec<String>>,
}

impl AnalysisReport {
    pub fn analyze(net: &ReactionNetwork) -> Self {
        let bundle = build_matrices(net);
        let partition = connected_components(&bundle);
        let kirchhoff = rho_by_cofactor(&bundle.l, &partition);

        let complex = complex_balanced_with(net, &bundle, &partition, &kirchhoff);
        let formal = is_formally_balanced(net).ok();
        let detailed = is_detailed_balanced(net).ok();
        let kappa = formal.as_ref().filter(|v| v.holds).map(|_| {
            conductance_decomposition(net)
                .expect("formally balanced reversible network has conductances")
                .kappa
                .iter()
                .map(format_rational)
                .collect()
        });

        AnalysisReport {
            schema_version: SCHEMA_VERSION,
            network: NetworkSummary {
                species: net.species().iter().map(|s| s.name.clone()).collect(),
                m: net.num_species(),
                c: net.num_complexes(),
                r: net.num_reactions(),
                linkage_classes: partition.count(),
                deficiency: deficiency(&bundle.z, &bundle.d),
                reversible: formal.is_some(),
                strongly_connected: partition
                    .components()
                    .iter()
                    .map(is_strongly_connected)
                    .collect(),
            },
            rho: kirchhoff.rho().iter().map(format_rational).collect(),
            complex_balanced: VerdictReport::from(&complex),
            formally_balanced: formal.as_ref().map(VerdictReport::from),
            detailed_balanced: detailed.as_ref().map(VerdictReport::from),
            kappa,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Plain-text rendering for terminals.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let n = &self.network;
        out.push_str(&format!(
            "network: m = {} species, c = {} complexes, r = {} reactions\n",
            n.m, n.c, n.r
        ));
        out.push_str(&format!("species: {}\n", n.species.join(", ")));
        out.push_str(&format!(
            "linkage classes: {}  deficiency: {}  reversible: {}\n",
            n.linkage_classes, n.deficiency, n.reversible
        ));
        let flags: Vec<String> = n
            .strongly_connected
            .iter()
            .enumerate()
            .map(|(i, sc)| format!("{i}:{}", if *sc { "yes" } else { "no" }))
            .collect();
        out.push_str(&format!("strongly connected: {}\n", flags.join(" ")));
        out.push_str(&format!("rho: {}\n", self.rho.join(" ")));
        render_verdict(&mut out, "complex balanced", Some(&self.complex_balanced));
        render_verdict(&mut out, "formally balanced", self.formally_balanced.as_ref());
        render_verdict(&mut out, "detailed balanced", self.detailed_balanced.as_ref());
        if let Some(kappa) = &self.kappa {
            out.push_str(&format!("kappa: {}\n", kappa.join(" ")));
        }
        out
    }
}

fn render_verdict(out: &mut String, label: &str, verdict: Option<&VerdictReport>) {
    match verdict {
        None => out.push_str(&format!("{label}: n/a (not reversible)\n")),
        Some(v) if v.holds => {
            out.push_str(&format!("{label}: yes\n"));
            if let Some(cert) = &v.certificate {
                let xs: Vec<String> = cert.x_star.iter().map(|x| format!("{x:.6e}")).collect();
                out.push_str(&format!("  equilibrium x* = [{}]\n", xs.join(", ")));
            }
        }
        Some(v) => {
            out.push_str(&format!("{label}: no\n"));
            match &v.witness {
                Some(WitnessReport::NotStronglyConnected { component }) => {
                    out.push_str(&format!("  component {component} is not strongly connected\n"));
                }
                Some(WitnessReport::KernelViolation { context, sigma, lhs, rhs }) => {
                    out.push_str(&format!(
                        "  violated on sigma = [{}] in {context}: {lhs} != {rhs}\n",
                        sigma.join(", ")
                    ));
                }
                None => {}
            }
        }
    }
}
