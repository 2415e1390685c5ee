use std::path::PathBuf;

use serde::{Deserialize, Deserializer, Serialize};

use crate::error::{Error, Result};
use crate::operators::{FluxKind, GOperator, GrowthCondition, GrowthFunction, Nonlinearity, PowerTerm, SourceKind};

/// Everything a run depends on. Built from a preset, then a config file,
/// then command-line flags, each layer overriding the previous one.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub command: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(deserialize_with = "flux_descriptor", skip_serializing_if = "Option::is_none")]
    pub g: Option<FluxKind>,
    #[serde(deserialize_with = "source_descriptor", skip_serializing_if = "Option::is_none")]
    pub f: Option<SourceKind>,
    #[serde(deserialize_with = "growth_descriptor", skip_serializing_if = "Option::is_none")]
    pub phi: Option<GrowthFunction>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub s: Option<f64>,
    #[serde(rename = "N", skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub workers: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub condition: Option<GrowthCondition>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub probes: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub state_range: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bracket: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub field: Option<PathBuf>,
}

macro_rules! overlay_fields {
    ($base:expr, $top:expr, $($name:ident),*) => {
        ExperimentConfig { $($name: $top.$name.or($base.$name)),* }
    };
}

impl ExperimentConfig {
    /// Fields set in `top` win.
    pub fn overlay(self, top: ExperimentConfig) -> ExperimentConfig {
        overlay_fields!(
            self,
            top,
            command,
            preset,
            g,
            f,
            phi,
            p,
            s,
            n,
            radius,
            h,
            tol,
            eps_min,
            eps_max,
            eps,
            seed,
            workers,
            out,
            condition,
            steps,
            probes,
            delta,
            state_range,
            bracket,
            field
        )
    }

    pub fn from_file(path: &std::path::Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::InvalidParameter(format!("cannot read config {}: {e}", path.display())))?;
        Ok(serde_json::from_str(&text)?)
    }

    pub fn flux(&self) -> Result<GOperator> {
        match (&self.g, self.p) {
            (Some(kind), _) => GOperator::new(kind.clone()),
            (None, Some(p)) => GOperator::power(p),
            (None, None) => Err(Error::InvalidParameter("no flux law: pass --g or --p".into())),
        }
    }

    pub fn source(&self) -> Result<Nonlinearity> {
        match &self.f {
            Some(kind) => Nonlinearity::new(kind.clone()),
            None => Err(Error::InvalidParameter("no source: pass --f".into())),
        }
    }

    pub fn dimension(&self) -> usize {
        self.n.unwrap_or(2)
    }
}

/// Named starting points.
pub fn preset(name: &str) -> Result<ExperimentConfig> {
    let example = |p: f64, s: f64| ExperimentConfig {
        g: Some(FluxKind::Power { p }),
        f: Some(SourceKind::Example1 { p, s, n: 2 }),
        p: Some(p),
        s: Some(s),
        n: Some(2),
        radius: Some(6.0),
        ..Default::default()
    };
    let mut cfg = match name {
        "torsion" => ExperimentConfig {
            g: Some(FluxKind::Power { p: 2.0 }),
            f: Some(SourceKind::Constant { value: 1.0 }),
            p: Some(2.0),
            n: Some(2),
            radius: Some(1.0),
            ..Default::default()
        },
        "example1-caseI" => example(2.0, 3.0),
        "example1-caseII" => example(3.0, 2.0),
        "example1-caseIII" => example(3.0, 4.0),
        "bump-punctured-ball" => ExperimentConfig {
            g: Some(FluxKind::Power { p: 3.0 }),
            f: Some(SourceKind::Bump {
                p: 3.0,
                s: 4.0,
                n: 2,
                base: 1.0,
            }),
            p: Some(3.0),
            s: Some(4.0),
            n: Some(2),
            radius: Some(1.0),
            ..Default::default()
        },
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset {other}; known: torsion, example1-caseI, example1-caseII, example1-caseIII, bump-punctured-ball"
            )))
        }
    };
    cfg.preset = Some(name.to_string());
    Ok(cfg)
}

fn numbers(spec: &str, what: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|v| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number {v:?} in {what}")))
        })
        .collect()
}

fn split(spec: &str) -> (&str, &str) {
    match spec.split_once(':') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (spec.trim(), ""),
    }
}

fn arity(args: &[f64], n: usize, spec: &str) -> Result<()> {
    if args.len() == n {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{spec}: expected {n} parameters, got {}",
            args.len()
        )))
    }
}

/// `power:p`, `power-sum:c1,p1,c2,p2,…`, `minimal-surface`,
/// `stretched-exp:gamma,alpha`, or a JSON object.
pub fn parse_flux(spec: &str) -> Result<FluxKind> {
    if spec.trim_start().starts_with('{') {
        return Ok(serde_json::from_str(spec)?);
    }
    let (name, rest) = split(spec);
    let args = if rest.is_empty() {
        Vec::new()
    } else {
        numbers(rest, spec)?
    };
    let kind = match name {
        "power" => {
            arity(&args, 1, spec)?;
            FluxKind::Power { p: args[0] }
        }
        "power-sum" => {
            if args.is_empty() || args.len() % 2 != 0 {
                return Err(Error::InvalidParameter(format!("{spec}: expected pairs c,p")));
            }
            FluxKind::PowerSum {
                terms: args.chunks(2).map(|c| PowerTerm { c: c[0], p: c[1] }).collect(),
            }
        }
        "minimal-surface" => FluxKind::MinimalSurface,
        "stretched-exp" => {
            arity(&args, 2, spec)?;
            FluxKind::StretchedExp {
                gamma: args[0],
                alpha: args[1],
            }
        }
        other => return Err(Error::InvalidParameter(format!("unknown flux law {other:?}"))),
    };
    GOperator::new(kind.clone())?;
    Ok(kind)
}

/// `power:c,q`, `zero-on:d`, or a JSON object.
pub fn parse_growth(spec: &str) -> Result<GrowthFunction> {
    if spec.trim_start().starts_with('{') {
        let phi: GrowthFunction = serde_json::from_str(spec)?;
        phi.validate()?;
        return Ok(phi);
    }
    let (name, rest) = split(spec);
    let args = numbers(rest, spec)?;
    let phi = match name {
        "power" => {
            arity(&args, 2, spec)?;
            GrowthFunction::Power { c: args[0], q: args[1] }
        }
        "zero-on" => {
            arity(&args, 1, spec)?;
            GrowthFunction::ZeroOnInterval { d: args[0] }
        }
        other => return Err(Error::InvalidParameter(format!("unknown growth function {other:?}"))),
    };
    phi.validate()?;
    Ok(phi)
}

/// `zero`, `const:v`, `poly:a0,a1,…`, `shifted-power:c,q,tau`,
/// `example1:p,s,N`, `bump:p,s,N,base`, `radial-decay:value,rate`, or a
/// JSON object.
pub fn parse_source(spec: &str) -> Result<SourceKind> {
    if spec.trim_start().starts_with('{') {
        let kind: SourceKind = serde_json::from_str(spec)?;
        Nonlinearity::new(kind.clone())?;
        return Ok(kind);
    }
    let (name, rest) = split(spec);
    let args = if rest.is_empty() {
        Vec::new()
    } else {
        numbers(rest, spec)?
    };
    let whole = |v: f64| -> Result<usize> {
        if v >= 1.0 && v.fract() == 0.0 {
            Ok(v as usize)
        } else {
            Err(Error::InvalidParameter(format!(
                "{spec}: dimension must be a positive integer"
            )))
        }
    };
    let kind = match name {
        "zero" => SourceKind::Zero,
        "const" => {
            arity(&args, 1, spec)?;
            SourceKind::Constant { value: args[0] }
        }
        "poly" => SourceKind::Polynomial { coeffs: args },
        "shifted-power" => {
            arity(&args, 3, spec)?;
            SourceKind::ShiftedPower {
                c: args[0],
                q: args[1],
                tau: args[2],
            }
        }
        "example1" => {
            arity(&args, 3, spec)?;
            SourceKind::Example1 {
                p: args[0],
                s: args[1],
                n: whole(args[2])?,
            }
        }
        "bump" => {
            arity(&args, 4, spec)?;
            SourceKind::Bump {
                p: args[0],
                s: args[1],
                n: whole(args[2])?,
                base: args[3],
            }
        }
        "radial-decay" => {
            arity(&args, 2, spec)?;
            SourceKind::RadialDecay {
                value: args[0],
                rate: args[1],
            }
        }
        other => return Err(Error::InvalidParameter(format!("unknown source {other:?}"))),
    };
    Nonlinearity::new(kind.clone())?;
    Ok(kind)
}

#[derive(Deserialize)]
#[serde(untagged)]
enum Descriptor<T> {
    Text(String),
    Object(T),
}

fn descriptor<'de, D, T>(d: D, parse: fn(&str) -> Result<T>) -> std::result::Result<Option<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    match Option::<Descriptor<T>>::deserialize(d)? {
        None => Ok(None),
        Some(Descriptor::Object(v)) => Ok(Some(v)),
        Some(Descriptor::Text(s)) => parse(&s).map(Some).map_err(serde::de::Error::custom),
    }
}

fn flux_descriptor<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<FluxKind>, D::Error> {
    descriptor(d, parse_flux)
}

fn source_descriptor<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<SourceKind>, D::Error> {
    descriptor(d, parse_source)
}

fn growth_descriptor<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Option<GrowthFunction>, D::Error> {
    descriptor(d, parse_growth)
}
