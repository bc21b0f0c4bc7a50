//! Closed-form weighted path (ray) families.
//!
//! Each family lives on the consecutive integers `first, first+1, …` with
//! `n ~ n+1`, a vertex weight `ω_n` and an edge conductance `c_n` on
//! `{n, n+1}`. Weights are evaluated in double-double so that gauge
//! potentials, which cancel heavily, can be formed accurately.
//!
//! | id | ω_n | c_n | first |
//! |----|-----|-----|-------|
//! | `neg-potential` | `1/n` | `(n+1)²` | 1 |
//! | `nlogn` | `1/(n ln n)` | `1` | 2 |
//! | `power:alpha=α,beta=β` | `n^−α` | `n^−β` | 2 |
//! | `ray-power:eps=ε,corrected=b` | `1` | `(n+1)^(2+ε)` if `b`, else `(n+1)^−(2+ε)` | 0 |
//! | `inverse-shift` | `1/(n+1)` | `1` | 0 |
//! | `sqrt-shift` | `1/√(n+1)` | `n²` | 1 |
//! | `constant:omega=w,cond=c` | `w` | `c` | 0 |

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{GraphSource, VertexId, WeightedGraph};
use crate::operators::SchrodingerOperator;
use crate::precise::DoubleDouble as Dd;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum PathFamily {
    /// `ω_n = 1/n`, `c_n = (n+1)²`: positive Laplacian, negative potential `−n(2n+1)`.
    NegPotential,
    /// `ω_n = 1/(n ln n)`, `c ≡ 1`: complete metric, potential `∼ −ln n`.
    NLogN,
    /// `ω_n = n^−α`, `c_n = n^−β`.
    Power { alpha: f64, beta: f64 },
    /// `ω ≡ 1`, `a_n = (n+1)^(2+ε)` when `corrected`, else `(n+1)^−(2+ε)`.
    RayPower { eps: f64, corrected: bool },
    /// `ω_n = 1/(n+1)`, `c ≡ 1`.
    InverseShift,
    /// `ω_n = 1/√(n+1)`, `c_n = n²`.
    SqrtShift,
    Constant { omega: f64, cond: f64 },
}

/// Expected behavior of a series or metric along the ray.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Completeness {
    Complete,
    Incomplete,
}

/// Recorded asymptotic facts about a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Asymptotics {
    pub completeness: Completeness,
    /// Whether `Σ ω_n²` is finite.
    pub omega_square_summable: bool,
    /// Leading behavior of the gauge potential, as text.
    pub potential: String,
    /// Where the expectation comes from: `recorded` for facts recorded with the
    /// family definition, `computed` for facts computed from the formulas.
    pub source: &'static str,
}

fn dd(n: VertexId) -> Dd {
    Dd::from(n)
}

impl PathFamily {
    /// Families with representative parameters.
    pub fn builtin() -> Vec<PathFamily> {
        vec![
            PathFamily::NegPotential,
            PathFamily::NLogN,
            PathFamily::Power { alpha: 1.0, beta: 0.0 },
            PathFamily::Power { alpha: 2.0, beta: 1.0 },
            PathFamily::RayPower { eps: 1.0, corrected: true },
            PathFamily::RayPower { eps: 1.0, corrected: false },
            PathFamily::InverseShift,
            PathFamily::SqrtShift,
            PathFamily::Constant { omega: 1.0, cond: 1.0 },
        ]
    }

    pub fn first_vertex(&self) -> VertexId {
        match self {
            PathFamily::NegPotential | PathFamily::SqrtShift => 1,
            PathFamily::NLogN | PathFamily::Power { .. } => 2,
            PathFamily::RayPower { .. } | PathFamily::InverseShift | PathFamily::Constant { .. } => 0,
        }
    }

    pub fn description(&self) -> String {
        match *self {
            PathFamily::NegPotential => "omega_n = 1/n, c_n = (n+1)^2 on n >= 1".into(),
            PathFamily::NLogN => "omega_n = 1/(n ln n), c_n = 1 on n >= 2".into(),
            PathFamily::Power { alpha, beta } => format!("omega_n = n^-{alpha}, c_n = n^-{beta} on n >= 2"),
            PathFamily::RayPower { eps, corrected } => {
                let s = if corrected { "" } else { "-" };
                format!("omega = 1, a_n = (n+1)^{s}{} on n >= 0", 2.0 + eps)
            }
            PathFamily::InverseShift => "omega_n = 1/(n+1), c_n = 1 on n >= 0".into(),
            PathFamily::SqrtShift => "omega_n = 1/sqrt(n+1), c_n = n^2 on n >= 1".into(),
            PathFamily::Constant { omega, cond } => format!("omega = {omega}, c = {cond} on n >= 0"),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            PathFamily::Power { alpha, beta } => alpha.is_finite() && beta.is_finite(),
            PathFamily::RayPower { eps, .. } => eps.is_finite() && eps > 0.0,
            PathFamily::Constant { omega, cond } => omega.is_finite() && omega > 0.0 && cond.is_finite() && cond > 0.0,
            _ => true,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::Input(format!("parameters out of range for {self}")))
        }
    }

    fn check_vertex(&self, n: VertexId) -> Result<()> {
        if n < self.first_vertex() {
            Err(Error::UnknownVertex(n))
        } else {
            Ok(())
        }
    }

    /// `1/ω_n`.
    pub fn inverse_omega_dd(&self, n: VertexId) -> Dd {
        match *self {
            PathFamily::NegPotential => dd(n),
            PathFamily::NLogN => dd(n) * dd(n).ln(),
            PathFamily::Power { alpha, .. } => dd(n).powf(alpha),
            PathFamily::RayPower { .. } => Dd::ONE,
            PathFamily::InverseShift => dd(n + 1),
            PathFamily::SqrtShift => dd(n + 1).sqrt(),
            PathFamily::Constant { omega, .. } => Dd::from(omega).recip(),
        }
    }

    pub fn omega_dd(&self, n: VertexId) -> Dd {
        match *self {
            PathFamily::Constant { omega, .. } => Dd::from(omega),
            _ => self.inverse_omega_dd(n).recip(),
        }
    }

    /// Conductance of `{n, n+1}`.
    pub fn cond_dd(&self, n: VertexId) -> Dd {
        match *self {
            PathFamily::NegPotential => dd(n + 1) * dd(n + 1),
            PathFamily::NLogN | PathFamily::InverseShift => Dd::ONE,
            PathFamily::Power { beta, .. } => dd(n).powf(-beta),
            PathFamily::RayPower { eps, corrected } => {
                let e = if corrected { 2.0 + eps } else { -(2.0 + eps) };
                dd(n + 1).powf(e)
            }
            PathFamily::SqrtShift => dd(n) * dd(n),
            PathFamily::Constant { cond, .. } => Dd::from(cond),
        }
    }

    pub fn omega(&self, n: VertexId) -> f64 {
        self.omega_dd(n).to_f64()
    }

    pub fn cond(&self, n: VertexId) -> f64 {
        self.cond_dd(n).to_f64()
    }

    /// `a_n = c_n / (ω_n ω_{n+1})` on `{n, n+1}`.
    pub fn edge_a_dd(&self, n: VertexId) -> Dd {
        self.cond_dd(n) * self.inverse_omega_dd(n) * self.inverse_omega_dd(n + 1)
    }

    pub fn edge_a(&self, n: VertexId) -> f64 {
        self.edge_a_dd(n).to_f64()
    }

    /// `1/√a_n` in plain floating point, for long series.
    pub fn edge_length(&self, n: VertexId) -> f64 {
        let x = n as f64;
        match *self {
            PathFamily::NegPotential => 1.0 / ((x + 1.0) * (x * (x + 1.0)).sqrt()),
            PathFamily::NLogN => 1.0 / (x * x.ln() * (x + 1.0) * (x + 1.0).ln()).sqrt(),
            PathFamily::Power { alpha, beta } => (x.powf(beta) / (x * (x + 1.0)).powf(alpha)).sqrt(),
            PathFamily::RayPower { eps, corrected } => {
                let e = if corrected { 2.0 + eps } else { -(2.0 + eps) };
                (x + 1.0).powf(-0.5 * e)
            }
            PathFamily::InverseShift => 1.0 / ((x + 1.0) * (x + 2.0)).sqrt(),
            PathFamily::SqrtShift => 1.0 / (x * ((x + 1.0) * (x + 2.0)).sqrt().sqrt()),
            PathFamily::Constant { omega, cond } => omega / cond.sqrt(),
        }
    }

    /// `ω_n²` in plain floating point.
    pub fn omega_square(&self, n: VertexId) -> f64 {
        let x = n as f64;
        match *self {
            PathFamily::NegPotential => 1.0 / (x * x),
            PathFamily::NLogN => 1.0 / (x * x.ln()).powi(2),
            PathFamily::Power { alpha, .. } => x.powf(-2.0 * alpha),
            PathFamily::RayPower { .. } => 1.0,
            PathFamily::InverseShift => 1.0 / ((x + 1.0) * (x + 1.0)),
            PathFamily::SqrtShift => 1.0 / (x + 1.0),
            PathFamily::Constant { omega, .. } => omega * omega,
        }
    }

    /// Truncation to `first..=n_max`; `n_max` is a frontier vertex.
    pub fn instantiate(&self, n_max: VertexId) -> Result<WeightedGraph> {
        self.validate()?;
        let first = self.first_vertex();
        if n_max < first + 2 {
            return Err(Error::Input(format!("n_max must be at least {}", first + 2)));
        }
        let set: BTreeSet<VertexId> = (first..=n_max).collect();
        self.materialize(&set)
    }

    /// The gauge potential `W(n) = ω_n⁻¹ Σ_{m~n} c_{nm} (ω_n⁻¹ − ω_m⁻¹)` of the
    /// infinite ray, evaluated in double-double from the weight formulas.
    pub fn gauge_potential_dd(&self, n: VertexId) -> Result<Dd> {
        self.validate()?;
        self.check_vertex(n)?;
        let inv = self.inverse_omega_dd(n);
        let mut sum = self.cond_dd(n) * (inv - self.inverse_omega_dd(n + 1));
        if n > self.first_vertex() {
            sum = sum + self.cond_dd(n - 1) * (inv - self.inverse_omega_dd(n - 1));
        }
        Ok(inv * sum)
    }

    pub fn gauge_potential_exact(&self, n: VertexId) -> Result<f64> {
        Ok(self.gauge_potential_dd(n)?.to_f64())
    }

    /// The closed-form potential at an interior vertex (`n > first`).
    pub fn closed_form_potential(&self, n: VertexId) -> Result<f64> {
        self.validate()?;
        if n <= self.first_vertex() {
            return Err(Error::Input(format!(
                "closed form is stated for interior vertices only; {n} is the first vertex or outside"
            )));
        }
        let x = dd(n);
        let one = Dd::ONE;
        let w = match *self {
            PathFamily::NegPotential => -(x * (Dd::from(2.0) * x + one)),
            PathFamily::NLogN => {
                let l = x.ln();
                let lp = (x + one).ln();
                let lm = (x - one).ln();
                Dd::from(2.0) * x * x * l * l - x * l * ((x + one) * lp + (x - one) * lm)
            }
            PathFamily::Power { alpha, beta } => {
                let na = x.powf(alpha);
                let left = (x - one).powf(-beta) * (na - (x - one).powf(alpha));
                let right = x.powf(-beta) * (na - (x + one).powf(alpha));
                na * (left + right)
            }
            PathFamily::RayPower { .. } | PathFamily::Constant { .. } | PathFamily::InverseShift => Dd::ZERO,
            PathFamily::SqrtShift => {
                let s = (x + one).sqrt();
                let left = (x - one) * (x - one) * (s - x.sqrt());
                let right = x * x * (s - (x + Dd::from(2.0)).sqrt());
                s * (left + right)
            }
        };
        Ok(w.to_f64())
    }

    /// Leading term of the potential for large `n`, where one is recorded.
    pub fn potential_leading_term(&self, n: VertexId) -> Option<f64> {
        let x = n as f64;
        match *self {
            PathFamily::NegPotential => Some(-2.0 * x * x),
            PathFamily::NLogN => Some(-x.ln()),
            PathFamily::Power { alpha, beta } => {
                Some(-alpha * (alpha - beta - 1.0) * x.powf(2.0 * alpha - beta - 2.0))
            }
            _ => None,
        }
    }

    pub fn asymptotics(&self) -> Asymptotics {
        use Completeness::*;
        let (completeness, omega_square_summable, potential, source) = match *self {
            PathFamily::NegPotential => (Incomplete, true, "-n(2n+1)".to_string(), "recorded potential, computed metric"),
            PathFamily::NLogN => (Complete, true, "~ -ln n".to_string(), "recorded"),
            PathFamily::Power { alpha, beta } => (
                if alpha - 0.5 * beta <= 1.0 { Complete } else { Incomplete },
                2.0 * alpha > 1.0,
                format!("~ -{alpha}({alpha}-{beta}-1) n^({})", 2.0 * alpha - beta - 2.0),
                "recorded",
            ),
            PathFamily::RayPower { corrected, .. } => (
                if corrected { Incomplete } else { Complete },
                false,
                "0".to_string(),
                "computed",
            ),
            PathFamily::InverseShift => (Complete, true, "0 away from the first vertex".to_string(), "recorded"),
            PathFamily::SqrtShift => (Incomplete, false, "~ -3n/4".to_string(), "recorded metric, computed potential"),
            PathFamily::Constant { .. } => (Complete, false, "0 away from the first vertex".to_string(), "computed"),
        };
        Asymptotics {
            completeness,
            omega_square_summable,
            potential,
            source,
        }
    }

    pub fn expected_completeness(&self) -> Completeness {
        self.asymptotics().completeness
    }

    /// The Schrödinger operator conjugate to the truncation, with `a` and `W`
    /// formed in double-double from the weight formulas. `W` at `n_max` is the
    /// value of the infinite ray.
    pub fn conjugate_operator(&self, n_max: VertexId) -> Result<SchrodingerOperator> {
        let g = self.instantiate(n_max)?;
        let a_graph = g.reweighted(|_| 1.0, |x, _, _| self.edge_a(x))?;
        let mut w = Vec::with_capacity(g.len());
        for x in g.vertices() {
            w.push(self.gauge_potential_exact(x)?);
        }
        let first = self.first_vertex();
        SchrodingerOperator::new(&a_graph, |x| w[(x - first) as usize])
    }
}

impl GraphSource for PathFamily {
    fn contains(&self, x: VertexId) -> bool {
        x >= self.first_vertex()
    }

    fn neighbors_of(&self, x: VertexId) -> Vec<VertexId> {
        if x > self.first_vertex() {
            vec![x - 1, x + 1]
        } else {
            vec![x + 1]
        }
    }

    fn vertex_weight(&self, x: VertexId) -> f64 {
        self.omega(x)
    }

    fn edge_conductance(&self, x: VertexId, y: VertexId) -> f64 {
        self.cond(x.min(y))
    }
}

impl fmt::Display for PathFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PathFamily::NegPotential => write!(f, "neg-potential"),
            PathFamily::NLogN => write!(f, "nlogn"),
            PathFamily::Power { alpha, beta } => write!(f, "power:alpha={alpha},beta={beta}"),
            PathFamily::RayPower { eps, corrected } => write!(f, "ray-power:eps={eps},corrected={corrected}"),
            PathFamily::InverseShift => write!(f, "inverse-shift"),
            PathFamily::SqrtShift => write!(f, "sqrt-shift"),
            PathFamily::Constant { omega, cond } => write!(f, "constant:omega={omega},cond={cond}"),
        }
    }
}

impl FromStr for PathFamily {
    type Err = Error;

    /// `name[:key=value,...]`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut params = std::collections::BTreeMap::new();
        for kv in rest.split(',').filter(|p| !p.is_empty()) {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value, got {kv:?}")))?;
            params.insert(k.trim(), v.trim());
        }
        let num = |params: &std::collections::BTreeMap<&str, &str>, k: &str, default: Option<f64>| -> Result<f64> {
            match params.get(k) {
                Some(v) => v.parse().map_err(|_| Error::Parse(format!("{k}: not a number: {v:?}"))),
                None => default.ok_or_else(|| Error::Parse(format!("{name}: missing parameter {k}"))),
            }
        };
        let allowed: &[&str] = match name {
            "power" => &["alpha", "beta"],
            "ray-power" => &["eps", "corrected"],
            "constant" => &["omega", "cond"],
            _ => &[],
        };
        if let Some(k) = params.keys().find(|k| !allowed.contains(k)) {
            return Err(Error::Parse(format!("{name}: unknown parameter {k}")));
        }
        let fam = match name {
            "neg-potential" => PathFamily::NegPotential,
            "nlogn" => PathFamily::NLogN,
            "power" => PathFamily::Power {
                alpha: num(&params, "alpha", None)?,
                beta: num(&params, "beta", None)?,
            },
            "ray-power" => PathFamily::RayPower {
                eps: num(&params, "eps", Some(1.0))?,
                corrected: match params.get("corrected").copied().unwrap_or("true") {
                    "true" => true,
                    "false" => false,
                    v => return Err(Error::Parse(format!("corrected: expected true or false, got {v:?}"))),
                },
            },
            "inverse-shift" => PathFamily::InverseShift,
            "sqrt-shift" => PathFamily::SqrtShift,
            "constant" => PathFamily::Constant {
                omega: num(&params, "omega", Some(1.0))?,
                cond: num(&params, "cond", Some(1.0))?,
            },
            _ => return Err(Error::Parse(format!("unknown family {name:?}"))),
        };
        fam.validate().map_err(|e| Error::Parse(e.to_string()))?;
        Ok(fam)
    }
}
