//! JSON file formats for coefficient sets and scheme specifications.
//!
//! Both formats are strict: unknown keys are rejected, complex numbers are
//! `{"re": .., "im": ..}` objects, and numeric payloads round-trip losslessly
//! (shortest-representation serialization). The coefficient format carries an
//! explicit `noise_dim` that must match every noise vector.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CavityError, Result};
use crate::model::{CavityCoefficients, RadiativePort};
use crate::scheme::{
    BeamSplitterParams, CompleteScheme, NoFeedbackScheme, NoMirrorLossScheme, ScatteringNetwork,
    SchemeSpec, TwoSidedScheme,
};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ComplexRepr {
    re: f64,
    im: f64,
}

impl From<Complex64> for ComplexRepr {
    fn from(z: Complex64) -> Self {
        Self { re: z.re, im: z.im }
    }
}

impl From<ComplexRepr> for Complex64 {
    fn from(z: ComplexRepr) -> Self {
        Complex64::new(z.re, z.im)
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PortRepr {
    t_c: ComplexRepr,
    t_o: ComplexRepr,
    r_o: ComplexRepr,
    noise_out: Vec<ComplexRepr>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CoefficientFile {
    gamma: f64,
    omega: f64,
    noise_dim: usize,
    noise_cav: Vec<ComplexRepr>,
    ports: Vec<PortRepr>,
}

/// Serializes a coefficient set to the canonical JSON format.
pub fn coefficients_to_json(c: &CavityCoefficients) -> String {
    let file = CoefficientFile {
        gamma: c.gamma(),
        omega: c.omega(),
        noise_dim: c.noise_dim(),
        noise_cav: c.noise_cav().iter().map(|z| ComplexRepr::from(*z)).collect(),
        ports: c
            .ports()
            .iter()
            .map(|p| PortRepr {
                t_c: p.t_c.into(),
                t_o: p.t_o.into(),
                r_o: p.r_o.into(),
                noise_out: p.noise_out.iter().map(|z| ComplexRepr::from(*z)).collect(),
            })
            .collect(),
    };
    let mut s = serde_json::to_string_pretty(&file).expect("coefficient file serializes");
    s.push('\n');
    s
}

/// Parses and validates the coefficient file format.
pub fn coefficients_from_json(text: &str) -> Result<CavityCoefficients> {
    let file: CoefficientFile =
        serde_json::from_str(text).map_err(|e| CavityError::Parse(e.to_string()))?;
    if file.noise_cav.len() != file.noise_dim {
        return Err(CavityError::Parse(format!(
            "noise_dim is {} but noise_cav has {} entries",
            file.noise_dim,
            file.noise_cav.len()
        )));
    }
    for (i, p) in file.ports.iter().enumerate() {
        if p.noise_out.len() != file.noise_dim {
            return Err(CavityError::Parse(format!(
                "noise_dim is {} but port {} noise_out has {} entries",
                file.noise_dim,
                i,
                p.noise_out.len()
            )));
        }
    }
    let ports = file
        .ports
        .into_iter()
        .map(|p| {
            RadiativePort::new(
                p.t_c.into(),
                p.t_o.into(),
                p.r_o.into(),
                p.noise_out.into_iter().map(Complex64::from).collect(),
            )
        })
        .collect();
    let noise_cav = file.noise_cav.into_iter().map(Complex64::from).collect();
    CavityCoefficients::new(file.gamma, file.omega, ports, noise_cav)
        .map_err(|e| CavityError::Parse(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitterRepr {
    theta: f64,
    mu: f64,
    nu: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    phi: Option<f64>,
}

impl SplitterRepr {
    fn symmetric(&self, name: &str) -> Result<BeamSplitterParams> {
        if self.phi.is_some() {
            return Err(CavityError::Parse(format!(
                "splitter {name} is symmetric and must not carry a phi key"
            )));
        }
        Ok(BeamSplitterParams::symmetric(self.theta, self.mu, self.nu))
    }

    fn asymmetric(&self) -> BeamSplitterParams {
        BeamSplitterParams::asymmetric(self.theta, self.mu, self.nu, self.phi.unwrap_or(0.0))
    }
}

fn splitter_repr(p: &BeamSplitterParams, asymmetric: bool) -> SplitterRepr {
    SplitterRepr {
        theta: p.theta,
        mu: p.mu,
        nu: p.nu,
        phi: if asymmetric { Some(p.phi) } else { None },
    }
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SplitterMap {
    #[serde(skip_serializing_if = "Option::is_none")]
    bs1: Option<SplitterRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bs2: Option<SplitterRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bs3: Option<SplitterRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bs4: Option<SplitterRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bs5: Option<SplitterRepr>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bs6: Option<SplitterRepr>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkRepr {
    s_matrix: Vec<Vec<ComplexRepr>>,
    /// Rail labels in rail order: "external", "cavity", or "noise", grouped
    /// in that order.
    partition: Vec<String>,
    cavity_couplings: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SchemeFile {
    kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_right: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    gamma_left: Option<f64>,
    omega0: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    absorb_rate: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    splitters: Option<SplitterMap>,
    #[serde(skip_serializing_if = "Option::is_none")]
    network: Option<NetworkRepr>,
}

fn require<T>(value: Option<T>, key: &str, kind: &str) -> Result<T> {
    value.ok_or_else(|| CavityError::Parse(format!("kind '{kind}' requires key '{key}'")))
}

fn forbid<T>(value: &Option<T>, key: &str, kind: &str) -> Result<()> {
    if value.is_some() {
        return Err(CavityError::Parse(format!(
            "kind '{kind}' does not accept key '{key}'"
        )));
    }
    Ok(())
}

fn take_splitters(
    map: Option<SplitterMap>,
    kind: &str,
    required: &[&str],
) -> Result<SplitterMap> {
    let map = require(map, "splitters", kind)?;
    let slots: [(&str, bool); 6] = [
        ("bs1", map.bs1.is_some()),
        ("bs2", map.bs2.is_some()),
        ("bs3", map.bs3.is_some()),
        ("bs4", map.bs4.is_some()),
        ("bs5", map.bs5.is_some()),
        ("bs6", map.bs6.is_some()),
    ];
    for (name, present) in slots {
        let needed = required.contains(&name);
        if needed && !present {
            return Err(CavityError::Parse(format!(
                "kind '{kind}' requires splitter '{name}'"
            )));
        }
        if !needed && present {
            return Err(CavityError::Parse(format!(
                "kind '{kind}' does not accept splitter '{name}'"
            )));
        }
    }
    Ok(map)
}

/// Parses and validates the scheme file format.
pub fn scheme_from_json(text: &str) -> Result<SchemeSpec> {
    let file: SchemeFile =
        serde_json::from_str(text).map_err(|e| CavityError::Parse(e.to_string()))?;
    let kind = file.kind.as_str();
    match kind {
        "complete" => {
            forbid(&file.gamma_right, "gamma_right", kind)?;
            forbid(&file.gamma_left, "gamma_left", kind)?;
            forbid(&file.network, "network", kind)?;
            let map = take_splitters(file.splitters, kind, &["bs1", "bs2", "bs3"])?;
            Ok(SchemeSpec::Complete(CompleteScheme {
                gamma: require(file.gamma, "gamma", kind)?,
                omega0: file.omega0,
                absorb_rate: require(file.absorb_rate, "absorb_rate", kind)?,
                bs1: map.bs1.as_ref().unwrap().symmetric("bs1")?,
                bs2: map.bs2.as_ref().unwrap().symmetric("bs2")?,
                bs3: map.bs3.as_ref().unwrap().asymmetric(),
            }))
        }
        "no_mirror_loss" => {
            forbid(&file.gamma_right, "gamma_right", kind)?;
            forbid(&file.gamma_left, "gamma_left", kind)?;
            forbid(&file.network, "network", kind)?;
            let map = take_splitters(file.splitters, kind, &["bs3"])?;
            Ok(SchemeSpec::NoMirrorLoss(NoMirrorLossScheme {
                gamma: require(file.gamma, "gamma", kind)?,
                omega0: file.omega0,
                absorb_rate: require(file.absorb_rate, "absorb_rate", kind)?,
                bs3: map.bs3.as_ref().unwrap().asymmetric(),
            }))
        }
        "no_feedback" => {
            forbid(&file.gamma_right, "gamma_right", kind)?;
            forbid(&file.gamma_left, "gamma_left", kind)?;
            forbid(&file.network, "network", kind)?;
            // The no-feedback scheme deletes the non-radiative channel, so a
            // nonzero absorb_rate would break its defining certificate.
            if let Some(a) = file.absorb_rate {
                if a != 0.0 {
                    return Err(CavityError::Parse(
                        "kind 'no_feedback' has no absorption channel; absorb_rate must be 0"
                            .into(),
                    ));
                }
            }
            let map = take_splitters(file.splitters, kind, &["bs1", "bs2"])?;
            Ok(SchemeSpec::NoFeedback(NoFeedbackScheme {
                gamma: require(file.gamma, "gamma", kind)?,
                omega0: file.omega0,
                bs1: map.bs1.as_ref().unwrap().symmetric("bs1")?,
                bs2: map.bs2.as_ref().unwrap().symmetric("bs2")?,
            }))
        }
        "two_sided" => {
            forbid(&file.gamma, "gamma", kind)?;
            forbid(&file.network, "network", kind)?;
            let map = take_splitters(
                file.splitters,
                kind,
                &["bs1", "bs2", "bs3", "bs4", "bs5", "bs6"],
            )?;
            Ok(SchemeSpec::TwoSided(TwoSidedScheme {
                gamma_right: require(file.gamma_right, "gamma_right", kind)?,
                gamma_left: require(file.gamma_left, "gamma_left", kind)?,
                omega0: file.omega0,
                absorb_rate: require(file.absorb_rate, "absorb_rate", kind)?,
                bs1: map.bs1.as_ref().unwrap().symmetric("bs1")?,
                bs2: map.bs2.as_ref().unwrap().symmetric("bs2")?,
                bs3: map.bs3.as_ref().unwrap().symmetric("bs3")?,
                bs4: map.bs4.as_ref().unwrap().symmetric("bs4")?,
                bs5: map.bs5.as_ref().unwrap().asymmetric(),
                bs6: map.bs6.as_ref().unwrap().asymmetric(),
            }))
        }
        "network" => {
            forbid(&file.gamma, "gamma", kind)?;
            forbid(&file.gamma_right, "gamma_right", kind)?;
            forbid(&file.gamma_left, "gamma_left", kind)?;
            forbid(&file.splitters, "splitters", kind)?;
            let net = require(file.network, "network", kind)?;
            let absorb = require(file.absorb_rate, "absorb_rate", kind)?;
            parse_network(net, file.omega0, absorb).map(SchemeSpec::Network)
        }
        other => Err(CavityError::Parse(format!("unknown scheme kind '{other}'"))),
    }
}

fn parse_network(net: NetworkRepr, omega0: f64, absorb_rate: f64) -> Result<ScatteringNetwork> {
    let dim = net.partition.len();
    let mut counts = [0usize; 3];
    let mut stage = 0usize;
    for label in &net.partition {
        let idx = match label.as_str() {
            "external" => 0,
            "cavity" => 1,
            "noise" => 2,
            other => {
                return Err(CavityError::Parse(format!(
                    "unknown partition label '{other}' (expected external|cavity|noise)"
                )))
            }
        };
        if idx < stage {
            return Err(CavityError::Parse(
                "partition labels must be grouped external, cavity, noise".into(),
            ));
        }
        stage = idx;
        counts[idx] += 1;
    }
    if net.s_matrix.len() != dim || net.s_matrix.iter().any(|row| row.len() != dim) {
        return Err(CavityError::Parse(format!(
            "s_matrix must be {dim}x{dim} to match the partition"
        )));
    }
    let s = DMatrix::<Complex64>::from_fn(dim, dim, |i, j| net.s_matrix[i][j].into());
    ScatteringNetwork::new(
        s,
        counts[0],
        counts[1],
        counts[2],
        net.cavity_couplings,
        omega0,
        absorb_rate,
    )
    .map_err(|e| CavityError::Parse(e.to_string()))
}

/// Serializes a scheme specification to the canonical JSON format.
pub fn scheme_to_json(spec: &SchemeSpec) -> String {
    let file = match spec {
        SchemeSpec::Complete(s) => SchemeFile {
            kind: "complete".into(),
            gamma: Some(s.gamma),
            gamma_right: None,
            gamma_left: None,
            omega0: s.omega0,
            absorb_rate: Some(s.absorb_rate),
            splitters: Some(SplitterMap {
                bs1: Some(splitter_repr(&s.bs1, false)),
                bs2: Some(splitter_repr(&s.bs2, false)),
                bs3: Some(splitter_repr(&s.bs3, true)),
                ..Default::default()
            }),
            network: None,
        },
        SchemeSpec::NoMirrorLoss(s) => SchemeFile {
            kind: "no_mirror_loss".into(),
            gamma: Some(s.gamma),
            gamma_right: None,
            gamma_left: None,
            omega0: s.omega0,
            absorb_rate: Some(s.absorb_rate),
            splitters: Some(SplitterMap {
                bs3: Some(splitter_repr(&s.bs3, true)),
                ..Default::default()
            }),
            network: None,
        },
        SchemeSpec::NoFeedback(s) => SchemeFile {
            kind: "no_feedback".into(),
            gamma: Some(s.gamma),
            gamma_right: None,
            gamma_left: None,
            omega0: s.omega0,
            absorb_rate: None,
            splitters: Some(SplitterMap {
                bs1: Some(splitter_repr(&s.bs1, false)),
                bs2: Some(splitter_repr(&s.bs2, false)),
                ..Default::default()
            }),
            network: None,
        },
        SchemeSpec::TwoSided(s) => SchemeFile {
            kind: "two_sided".into(),
            gamma: None,
            gamma_right: Some(s.gamma_right),
            gamma_left: Some(s.gamma_left),
            omega0: s.omega0,
            absorb_rate: Some(s.absorb_rate),
            splitters: Some(SplitterMap {
                bs1: Some(splitter_repr(&s.bs1, false)),
                bs2: Some(splitter_repr(&s.bs2, false)),
                bs3: Some(splitter_repr(&s.bs3, false)),
                bs4: Some(splitter_repr(&s.bs4, false)),
                bs5: Some(splitter_repr(&s.bs5, true)),
                bs6: Some(splitter_repr(&s.bs6, true)),
            }),
            network: None,
        },
        SchemeSpec::Network(n) => {
            let dim = n.dim();
            let mut partition = Vec::with_capacity(dim);
            partition.extend(std::iter::repeat_n("external".to_string(), n.n_external));
            partition.extend(std::iter::repeat_n("cavity".to_string(), n.n_cavity));
            partition.extend(std::iter::repeat_n("noise".to_string(), n.n_noise));
            SchemeFile {
                kind: "network".into(),
                gamma: None,
                gamma_right: None,
                gamma_left: None,
                omega0: n.omega0,
                absorb_rate: Some(n.absorb_rate),
                splitters: None,
                network: Some(NetworkRepr {
                    s_matrix: (0..dim)
                        .map(|i| (0..dim).map(|j| n.s_matrix[(i, j)].into()).collect())
                        .collect(),
                    partition,
                    cavity_couplings: n.cavity_couplings.clone(),
                }),
            }
        }
    };
    let mut s = serde_json::to_string_pretty(&file).expect("scheme file serializes");
    s.push('\n');
    s
}
