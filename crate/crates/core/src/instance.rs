//! JSON instance and certificate files.
//!
//! Rationals are always strings `"p/q"`; rational vectors are comma-separated
//! rationals in one string. [`InstanceFile::to_canonical_json`] writes the
//! canonical layout, and parsing then re-serializing a canonical file is
//! byte-identical.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Deserialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::hyperplane::{Branch, HyperplaneCertificate, LevelCase, LevelRecord};
use crate::lattice::{IntMatrix, LatticeHom};
use crate::num::{fmt_rat, parse_rat, IntVector, Rat, RatVector};
use crate::polyhedral::SupportSet;
use crate::toric::{Fan, GPair, GeneralTerm, ToricContraction};

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGeneral {
    b: String,
    #[serde(rename = "A")]
    a: Vec<Vec<i64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInstance {
    comment: Option<String>,
    #[serde(rename = "rank_N")]
    rank_n: usize,
    rays: Vec<Vec<i64>>,
    max_cones: Vec<Vec<usize>>,
    pi: Vec<Vec<i64>>,
    sigma_bar: Option<Vec<Vec<i64>>>,
    #[serde(rename = "B", default)]
    b: BTreeMap<String, String>,
    #[serde(rename = "bdiv_A")]
    bdiv_a: Option<Vec<String>>,
    #[serde(default)]
    general: Vec<RawGeneral>,
}

/// A general term as stored in a file: coefficient and integral points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GeneralEntry {
    pub b: Rat,
    pub a: Vec<IntVector>,
}

/// The data of an instance file, structurally validated.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InstanceFile {
    pub comment: Option<String>,
    pub rank: usize,
    pub rays: Vec<IntVector>,
    pub max_cones: Vec<Vec<usize>>,
    pub pi: Vec<IntVector>,
    pub sigma_bar: Option<Vec<IntVector>>,
    /// Nonzero boundary coefficients by ray index.
    pub b: BTreeMap<usize, Rat>,
    pub bdiv_a: Vec<RatVector>,
    pub general: Vec<GeneralEntry>,
}

fn field_err(field: impl Into<String>, detail: impl Into<String>) -> Error {
    Error::Parse {
        field: field.into(),
        detail: detail.into(),
    }
}

fn parse_rat_field(field: &str, s: &str) -> Result<Rat> {
    parse_rat(s).ok_or_else(|| field_err(field, format!("invalid rational {s:?}")))
}

fn parse_rat_vector(field: &str, s: &str) -> Result<RatVector> {
    if s.trim().is_empty() {
        return Ok(RatVector(vec![]));
    }
    s.split(',')
        .map(|x| parse_rat_field(field, x))
        .collect::<Result<Vec<_>>>()
        .map(RatVector)
}

fn fmt_rat_vector(v: &RatVector) -> String {
    v.iter().map(fmt_rat).collect::<Vec<_>>().join(",")
}

fn check_len(field: &str, v: &[i64], n: usize) -> Result<()> {
    if v.len() != n {
        return Err(field_err(field, format!("expected {n} entries, got {}", v.len())));
    }
    Ok(())
}

impl InstanceFile {
    pub fn parse(text: &str) -> Result<Self> {
        let raw: RawInstance = serde_json::from_str(text).map_err(|e| {
            field_err(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        let n = raw.rank_n;
        if n == 0 {
            return Err(field_err("rank_N", "must be positive"));
        }
        let mut rays = Vec::new();
        for (i, r) in raw.rays.iter().enumerate() {
            check_len(&format!("rays[{i}]"), r, n)?;
            rays.push(IntVector::from_i64(r));
        }
        for (i, c) in raw.max_cones.iter().enumerate() {
            if let Some(&j) = c.iter().find(|&&j| j >= rays.len()) {
                return Err(field_err(format!("max_cones[{i}]"), format!("ray index {j} out of range")));
            }
        }
        let mut pi = Vec::new();
        for (i, r) in raw.pi.iter().enumerate() {
            check_len(&format!("pi[{i}]"), r, n)?;
            pi.push(IntVector::from_i64(r));
        }
        let sigma_bar = match raw.sigma_bar {
            None => None,
            Some(gens) => {
                let mut out = Vec::new();
                for (i, g) in gens.iter().enumerate() {
                    check_len(&format!("sigma_bar[{i}]"), g, pi.len())?;
                    out.push(IntVector::from_i64(g));
                }
                Some(out)
            }
        };
        let mut b = BTreeMap::new();
        for (k, v) in &raw.b {
            let field = format!("B.{k}");
            let idx: usize = k
                .parse()
                .map_err(|_| field_err(&field, "key must be a ray index"))?;
            if idx >= rays.len() {
                return Err(field_err(&field, format!("ray index {idx} out of range")));
            }
            let x = parse_rat_field(&field, v)?;
            if x < Rat::from_integer(0.into()) || x > Rat::from_integer(1.into()) {
                return Err(field_err(&field, format!("coefficient {} is outside [0,1]", fmt_rat(&x))));
            }
            if x != Rat::from_integer(0.into()) {
                b.insert(idx, x);
            }
        }
        let bdiv_a = match raw.bdiv_a {
            None => vec![RatVector::zeros(n)],
            Some(list) => {
                if list.is_empty() {
                    return Err(field_err("bdiv_A", "must be nonempty"));
                }
                let mut out = Vec::new();
                for (i, s) in list.iter().enumerate() {
                    let field = format!("bdiv_A[{i}]");
                    let v = parse_rat_vector(&field, s)?;
                    if v.len() != n {
                        return Err(field_err(&field, format!("expected {n} entries, got {}", v.len())));
                    }
                    out.push(v);
                }
                out
            }
        };
        let mut general = Vec::new();
        for (j, g) in raw.general.iter().enumerate() {
            let field = format!("general[{j}]");
            let coeff = parse_rat_field(&format!("{field}.b"), &g.b)?;
            if g.a.is_empty() {
                return Err(field_err(format!("{field}.A"), "must be nonempty"));
            }
            let mut pts = Vec::new();
            for (i, p) in g.a.iter().enumerate() {
                check_len(&format!("{field}.A[{i}]"), p, n)?;
                pts.push(IntVector::from_i64(p));
            }
            general.push(GeneralEntry { b: coeff, a: pts });
        }
        Ok(InstanceFile {
            comment: raw.comment,
            rank: n,
            rays,
            max_cones: raw.max_cones,
            pi,
            sigma_bar,
            b,
            bdiv_a,
            general,
        })
    }

    /// Builds and validates the contraction and the pair.
    pub fn build(&self) -> Result<(ToricContraction, GPair)> {
        let fan = Fan::new(self.rank, self.rays.clone(), self.max_cones.clone())?;
        let pi = LatticeHom::new(IntMatrix::from_rows(&self.pi, self.rank));
        let tc = ToricContraction::new(fan, pi, self.sigma_bar.as_deref())?;
        let mut b = vec![Rat::from_integer(0.into()); self.rays.len()];
        for (&i, x) in &self.b {
            b[i] = x.clone();
        }
        let a = SupportSet::new(self.bdiv_a.clone())?;
        let general = self
            .general
            .iter()
            .map(|g| {
                Ok(GeneralTerm {
                    coeff: g.b.clone(),
                    set: SupportSet::new(g.a.iter().map(|p| p.to_rat()).collect())?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let pair = GPair::new(&tc, b, a, general)?;
        Ok((tc, pair))
    }

    /// The file describing an already built instance.
    pub fn from_parts(tc: &ToricContraction, pair: &GPair, comment: Option<String>) -> Self {
        InstanceFile {
            comment,
            rank: tc.rank(),
            rays: tc.fan().rays().to_vec(),
            max_cones: tc.fan().max_cones().to_vec(),
            pi: tc.pi().matrix.rows(),
            sigma_bar: Some(tc.sigma_bar().rays().to_vec()),
            b: pair
                .boundary()
                .iter()
                .enumerate()
                .filter(|(_, x)| **x != Rat::from_integer(0.into()))
                .map(|(i, x)| (i, x.clone()))
                .collect(),
            bdiv_a: pair.bdiv().points().to_vec(),
            general: pair
                .general()
                .iter()
                .map(|g| GeneralEntry {
                    b: g.coeff.clone(),
                    a: g.set.points().iter().map(|p| p.to_int().expect("integral")).collect(),
                })
                .collect(),
        }
    }

    pub fn to_canonical_json(&self) -> String {
        fn ints(v: &IntVector) -> String {
            let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
            format!("[{}]", parts.join(", "))
        }
        fn list<T>(items: &[T], f: impl Fn(&T) -> String) -> String {
            let parts: Vec<String> = items.iter().map(f).collect();
            format!("[{}]", parts.join(", "))
        }
        let q = |s: &str| serde_json::to_string(s).expect("string");
        let mut out = String::from("{\n");
        if let Some(c) = &self.comment {
            let _ = writeln!(out, "  \"comment\": {},", q(c));
        }
        let _ = writeln!(out, "  \"rank_N\": {},", self.rank);
        let _ = writeln!(out, "  \"rays\": {},", list(&self.rays, ints));
        let _ = writeln!(
            out,
            "  \"max_cones\": {},",
            list(&self.max_cones, |c| {
                let parts: Vec<String> = c.iter().map(|i| i.to_string()).collect();
                format!("[{}]", parts.join(", "))
            })
        );
        let _ = writeln!(out, "  \"pi\": {},", list(&self.pi, ints));
        if let Some(s) = &self.sigma_bar {
            let _ = writeln!(out, "  \"sigma_bar\": {},", list(s, ints));
        }
        let b: Vec<String> = self
            .b
            .iter()
            .map(|(i, x)| format!("{}: {}", q(&i.to_string()), q(&fmt_rat(x))))
            .collect();
        let _ = writeln!(out, "  \"B\": {{{}}},", b.join(", "));
        let _ = writeln!(out, "  \"bdiv_A\": {},", list(&self.bdiv_a, |v| q(&fmt_rat_vector(v))));
        let _ = writeln!(
            out,
            "  \"general\": {}",
            list(&self.general, |g| format!(
                "{{\"b\": {}, \"A\": {}}}",
                q(&fmt_rat(&g.b)),
                list(&g.a, ints)
            ))
        );
        out.push_str("}\n");
        out
    }
}

/// Parses and builds an instance.
pub fn load_instance(text: &str) -> Result<(InstanceFile, ToricContraction, GPair)> {
    let file = InstanceFile::parse(text)?;
    let (tc, pair) = file.build()?;
    Ok((file, tc, pair))
}

/// A certificate as stored on disk.
#[derive(Clone, Debug, PartialEq)]
pub struct CertificateFile {
    pub phi_bar: IntVector,
    pub gamma: Rat,
    pub mld: Rat,
    pub d: usize,
    pub transcript: Value,
}

fn ints_json(v: &IntVector) -> Value {
    Value::Array(v.iter().map(|x| Value::String(x.to_string())).collect())
}

fn int_json(v: &IntVector) -> Value {
    match v.iter().map(i64::try_from).collect::<std::result::Result<Vec<i64>, _>>() {
        Ok(xs) => json!(xs),
        Err(_) => ints_json(v),
    }
}

fn rat_json(r: &Rat) -> Value {
    Value::String(fmt_rat(r))
}

fn level_json(r: &LevelRecord) -> Value {
    let case = match r.case {
        LevelCase::Line => "line",
        LevelCase::Boundary => "boundary",
        LevelCase::Interior => "interior",
    };
    let mut v = json!({
        "level": r.level,
        "rank": r.rank,
        "l": r.l,
        "t": rat_json(&r.t),
        "case": case,
        "phi": int_json(&r.phi),
        "interval": [rat_json(&r.lo), rat_json(&r.hi)],
        "w": rat_json(&r.w),
        "phi_bar": int_json(&r.phi_bar),
        "gamma": rat_json(&r.gamma),
    });
    if let Some(s) = &r.slice {
        v["slice"] = json!({
            "lambda": rat_json(&s.lambda),
            "rank": s.rank,
            "rays": s.rays,
            "max_cones": s.max_cones,
            "base_rank": s.base_rank,
            "mld": rat_json(&s.mld),
            "max_discrepancy": rat_json(&s.max_discrepancy),
            "new_rays": s.new_rays.iter().map(|nr| json!({
                "ray": int_json(&nr.ray),
                "q": nr.q.to_string(),
            })).collect::<Vec<_>>(),
        });
    }
    if let Some(e) = &r.extension {
        v["extension"] = json!({
            "phi2": int_json(&e.phi2),
            "phi_prime": int_json(&e.phi_prime),
            "q": e.q.to_string(),
            "c": rat_json(&e.c),
            "generator": e.generator,
            "branch": match e.branch {
                Branch::MinusShorter => "minus",
                Branch::PlusShorter => "plus",
            },
            "w_minus": rat_json(&e.w_minus),
            "w_plus": rat_json(&e.w_plus),
            "l0": rat_json(&e.l0),
        });
    }
    v
}

impl CertificateFile {
    pub fn from_certificate(cert: &HyperplaneCertificate) -> Self {
        CertificateFile {
            phi_bar: cert.phi_bar.clone(),
            gamma: cert.gamma.clone(),
            mld: cert.mld.clone(),
            d: cert.d,
            transcript: Value::Array(cert.transcript.iter().map(level_json).collect()),
        }
    }

    pub fn to_json(&self) -> String {
        let v = json!({
            "phi_bar": int_json(&self.phi_bar),
            "gamma": rat_json(&self.gamma),
            "mld": rat_json(&self.mld),
            "d": self.d,
            "transcript": self.transcript,
        });
        let mut s = serde_json::to_string_pretty(&v).expect("serializable");
        s.push('\n');
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(text).map_err(|e| {
            field_err(format!("line {} column {}", e.line(), e.column()), e.to_string())
        })?;
        let phi_bar = match v.get("phi_bar") {
            Some(Value::Array(xs)) => IntVector(
                xs.iter()
                    .map(|x| match x {
                        Value::Number(n) => n.as_i64().map(Into::into),
                        Value::String(s) => s.parse().ok(),
                        _ => None,
                    })
                    .collect::<Option<Vec<_>>>()
                    .ok_or_else(|| field_err("phi_bar", "expected integers"))?,
            ),
            _ => return Err(field_err("phi_bar", "missing or not a list")),
        };
        let rat_field = |name: &str| -> Result<Rat> {
            match v.get(name) {
                Some(Value::String(s)) => parse_rat_field(name, s),
                _ => Err(field_err(name, "missing or not a rational string")),
            }
        };
        let gamma = rat_field("gamma")?;
        let mld = rat_field("mld")?;
        let d = v
            .get("d")
            .and_then(Value::as_u64)
            .ok_or_else(|| field_err("d", "missing or not an integer"))? as usize;
        Ok(CertificateFile {
            phi_bar,
            gamma,
            mld,
            d,
            transcript: v.get("transcript").cloned().unwrap_or(Value::Array(vec![])),
        })
    }
}
