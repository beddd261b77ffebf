//! Physical parameters and their JSON configuration form.
//!
//! Config values quoted as `X/2π = v MHz` are stored as `v` and converted to
//! angular frequency `2π·v` rad/µs. The decay rate is given in kHz and read
//! as a plain rate (`v·1e-3` µs⁻¹) unless `gamma_angular` is set.

use std::f64::consts::TAU;
use std::fmt;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use super::basis::{BasisSpec, Branch};
use crate::{Error, Result, C64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Flavor {
    Full,
    Effective,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Full => "full",
            Flavor::Effective => "effective",
        })
    }
}

impl std::str::FromStr for Flavor {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "full" => Ok(Flavor::Full),
            "effective" => Ok(Flavor::Effective),
            _ => Err(Error::config("flavor", format!("unknown flavor `{s}`"))),
        }
    }
}

/// Which set of spontaneous-emission operators to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CollapseVariant {
    /// One operator per (atom, excited level, ground level), rate γ/3 each.
    Independent,
    /// One operator per (atom, ground level) summing over excited levels.
    CoherentSum,
    /// The two-atom effective-subspace operators, written out term by term.
    PaperEffective,
}

impl CollapseVariant {
    pub const ALL: [CollapseVariant; 3] = [
        CollapseVariant::Independent,
        CollapseVariant::CoherentSum,
        CollapseVariant::PaperEffective,
    ];

    /// Variant used when a config leaves `collapse_variant` unset.
    pub fn default_for(flavor: Flavor) -> Self {
        match flavor {
            Flavor::Full => CollapseVariant::Independent,
            Flavor::Effective => CollapseVariant::PaperEffective,
        }
    }
}

impl fmt::Display for CollapseVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollapseVariant::Independent => "independent",
            CollapseVariant::CoherentSum => "coherent-sum",
            CollapseVariant::PaperEffective => "paper-effective",
        })
    }
}

impl std::str::FromStr for CollapseVariant {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(CollapseVariant::Independent),
            "coherent-sum" => Ok(CollapseVariant::CoherentSum),
            "paper-effective" => Ok(CollapseVariant::PaperEffective),
            _ => Err(Error::config(
                "collapse_variant",
                format!("unknown collapse variant `{s}`"),
            )),
        }
    }
}

/// Symmetric 3×3 table of pair interaction strengths 𝒰_ij.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UTable([[f64; 3]; 3]);

impl UTable {
    /// `same` = (LL, 00, RR), `cross` = (L0, 0R, LR).
    pub fn new(same: [f64; 3], cross: [f64; 3]) -> Self {
        let [l0, zr, lr] = cross;
        UTable([
            [same[0], l0, lr],
            [l0, same[1], zr],
            [lr, zr, same[2]],
        ])
    }

    pub fn uniform(same: f64, cross: f64) -> Self {
        Self::new([same; 3], [cross; 3])
    }

    pub fn get(&self, i: Branch, j: Branch) -> f64 {
        self.0[i.index()][j.index()]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.0[i][j] == self.0[j][i]))
    }
}

/// All model parameters in angular units (rad/µs) and µs⁻¹.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    /// (Ω_L, Ω_0, Ω_R)
    pub omega_drive: [C64; 3],
    /// (ω_L0, ω_0R)
    pub microwave: [C64; 2],
    pub delta: f64,
    pub u_table: UTable,
    pub gamma: f64,
    pub atoms: usize,
    pub flavor: Flavor,
    pub collapse_variant: CollapseVariant,
}

impl ModelSpec {
    pub fn basis(&self) -> BasisSpec {
        BasisSpec::new(self.atoms)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.basis().dims()
    }

    pub fn dim(&self) -> usize {
        self.basis().dim()
    }

    pub fn validate(&self) -> Result<()> {
        if !(2..=3).contains(&self.atoms) {
            return Err(Error::InvalidSpec(format!(
                "atoms must be 2 or 3, got {}",
                self.atoms
            )));
        }
        if !self.u_table.is_symmetric() {
            return Err(Error::InvalidSpec("u_table must be symmetric".into()));
        }
        if !(self.gamma >= 0.0) || !self.gamma.is_finite() {
            return Err(Error::InvalidSpec(format!(
                "gamma must be nonnegative, got {}",
                self.gamma
            )));
        }
        if self.flavor == Flavor::Effective && self.atoms != 2 {
            return Err(Error::FlavorMismatch(
                "the effective flavor is derived for two atoms only".into(),
            ));
        }
        Ok(())
    }

    /// Two-atom model with the pumping parameters used for the negativity
    /// and fidelity scans: Ω/2π = 0.02 MHz, 𝒰 = 2Δ (𝒰_ii = 2𝒰) and
    /// ω = 3Ω²/(4Δ).
    pub fn two_atom(delta_mhz: f64, gamma_khz: f64) -> ModelSpec {
        ModelConfig::two_atom(delta_mhz, gamma_khz)
            .resolve()
            .expect("reference parameters are valid")
    }

    /// Three-atom singlet model: 𝒰_ii = 2Δ, 𝒰_{i≠j} = 0.2Δ.
    pub fn three_atom(delta_mhz: f64, gamma_khz: f64) -> ModelSpec {
        ModelConfig::three_atom(delta_mhz, gamma_khz)
            .resolve()
            .expect("reference parameters are valid")
    }

    pub fn with_flavor(mut self, flavor: Flavor) -> Self {
        self.flavor = flavor;
        self
    }

    pub fn with_collapse(mut self, variant: CollapseVariant) -> Self {
        self.collapse_variant = variant;
        self
    }
}

/// Drive strength: one value for all three transitions, or one per level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum DriveConfig {
    Uniform(f64),
    PerLevel([f64; 3]),
}

impl DriveConfig {
    pub fn values(&self) -> [f64; 3] {
        match *self {
            DriveConfig::Uniform(v) => [v; 3],
            DriveConfig::PerLevel(v) => v,
        }
    }
}

/// Real number or `[re, im]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ScalarConfig {
    Real(f64),
    Complex([f64; 2]),
}

impl ScalarConfig {
    pub fn value(&self) -> C64 {
        match *self {
            ScalarConfig::Real(v) => C64::new(v, 0.0),
            ScalarConfig::Complex([re, im]) => C64::new(re, im),
        }
    }
}

/// The six independent entries of the symmetric interaction table, MHz.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct UTableConfig {
    #[serde(rename = "LL")]
    pub ll: f64,
    #[serde(rename = "00")]
    pub zz: f64,
    #[serde(rename = "RR")]
    pub rr: f64,
    #[serde(rename = "L0")]
    pub l0: f64,
    #[serde(rename = "0R")]
    pub zr: f64,
    #[serde(rename = "LR")]
    pub lr: f64,
}

impl UTableConfig {
    pub fn uniform(same: f64, cross: f64) -> Self {
        UTableConfig {
            ll: same,
            zz: same,
            rr: same,
            l0: cross,
            zr: cross,
            lr: cross,
        }
    }
}

/// JSON face of [`ModelSpec`]. Optional fields take the pumping-scheme
/// defaults: ω = 3Ω_0²/(4Δ) for both microwaves, and the interaction table
/// 𝒰_ii = 4Δ, 𝒰_{i≠j} = 2Δ for two atoms or 𝒰_ii = 2Δ, 𝒰_{i≠j} = 0.2Δ for
/// three.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub omega_mhz: DriveConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_mw_mhz: Option<[ScalarConfig; 2]>,
    pub delta_mhz: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_table_mhz: Option<UTableConfig>,
    pub gamma_khz: f64,
    #[serde(default)]
    pub gamma_angular: bool,
    pub atoms: usize,
    #[serde(default = "default_flavor")]
    pub flavor: Flavor,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse_variant: Option<CollapseVariant>,
}

fn default_flavor() -> Flavor {
    Flavor::Full
}

/// ω = 3Ω²/(4Δ); identical in MHz and in angular units.
pub fn pumping_microwave(omega: f64, delta: f64) -> f64 {
    3.0 * omega * omega / (4.0 * delta)
}

impl ModelConfig {
    pub fn two_atom(delta_mhz: f64, gamma_khz: f64) -> Self {
        ModelConfig {
            omega_mhz: DriveConfig::Uniform(0.02),
            omega_mw_mhz: None,
            delta_mhz,
            u_table_mhz: None,
            gamma_khz,
            gamma_angular: false,
            atoms: 2,
            flavor: Flavor::Full,
            collapse_variant: None,
        }
    }

    pub fn three_atom(delta_mhz: f64, gamma_khz: f64) -> Self {
        ModelConfig {
            atoms: 3,
            ..Self::two_atom(delta_mhz, gamma_khz)
        }
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        parse_config(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&read_config(path)?)
    }

    /// Fills every optional field with its resolved value.
    pub fn explicit(&self) -> ModelConfig {
        let omega = self.omega_mhz.values();
        let mw = self.omega_mw_mhz.unwrap_or_else(|| {
            let w = pumping_microwave(omega[1], self.delta_mhz);
            [ScalarConfig::Real(w), ScalarConfig::Real(w)]
        });
        let u = self.u_table_mhz.unwrap_or_else(|| match self.atoms {
            3 => UTableConfig::uniform(2.0 * self.delta_mhz, 0.2 * self.delta_mhz),
            _ => UTableConfig::uniform(4.0 * self.delta_mhz, 2.0 * self.delta_mhz),
        });
        ModelConfig {
            omega_mw_mhz: Some(mw),
            u_table_mhz: Some(u),
            collapse_variant: Some(
                self.collapse_variant
                    .unwrap_or_else(|| CollapseVariant::default_for(self.flavor)),
            ),
            ..self.clone()
        }
    }

    pub fn resolve(&self) -> Result<ModelSpec> {
        let full = self.explicit();
        let ang = |v: f64| TAU * v;
        let omega = full.omega_mhz.values();
        let [mw1, mw2] = full.omega_mw_mhz.expect("explicit");
        let u = full.u_table_mhz.expect("explicit");
        for (key, v) in [("delta_mhz", full.delta_mhz), ("gamma_khz", full.gamma_khz)] {
            if !v.is_finite() {
                return Err(Error::config(key, "must be finite"));
            }
        }
        if full.gamma_khz < 0.0 {
            return Err(Error::config("gamma_khz", "must be nonnegative"));
        }
        if !(2..=3).contains(&full.atoms) {
            return Err(Error::config("atoms", "must be 2 or 3"));
        }
        let gamma_scale = if full.gamma_angular { TAU } else { 1.0 };
        let spec = ModelSpec {
            omega_drive: omega.map(|w| C64::new(ang(w), 0.0)),
            microwave: [mw1.value() * TAU, mw2.value() * TAU],
            delta: ang(full.delta_mhz),
            u_table: UTable::new(
                [ang(u.ll), ang(u.zz), ang(u.rr)],
                [ang(u.l0), ang(u.zr), ang(u.lr)],
            ),
            gamma: full.gamma_khz * 1e-3 * gamma_scale,
            atoms: full.atoms,
            flavor: full.flavor,
            collapse_variant: full.collapse_variant.expect("explicit"),
        };
        spec.validate()?;
        Ok(spec)
    }
}

/// Partial model configuration applied on top of a pipeline's defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelOverrides {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_mhz: Option<DriveConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega_mw_mhz: Option<[ScalarConfig; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta_mhz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub u_table_mhz: Option<UTableConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_khz: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma_angular: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flavor: Option<Flavor>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub collapse_variant: Option<CollapseVariant>,
}

impl ModelOverrides {
    pub fn from_json_str(text: &str) -> Result<Self> {
        parse_config(text)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json_str(&read_config(path)?)
    }

    pub fn apply(&self, base: &ModelConfig) -> ModelConfig {
        let mut out = base.clone();
        if let Some(v) = self.omega_mhz {
            out.omega_mhz = v;
        }
        if let Some(v) = self.omega_mw_mhz {
            out.omega_mw_mhz = Some(v);
        }
        if let Some(v) = self.delta_mhz {
            out.delta_mhz = v;
        }
        if let Some(v) = self.u_table_mhz {
            out.u_table_mhz = Some(v);
        }
        if let Some(v) = self.gamma_khz {
            out.gamma_khz = v;
        }
        if let Some(v) = self.gamma_angular {
            out.gamma_angular = v;
        }
        if let Some(v) = self.flavor {
            out.flavor = v;
        }
        if let Some(v) = self.collapse_variant {
            out.collapse_variant = Some(v);
        }
        out
    }

    pub fn is_empty(&self) -> bool {
        *self == ModelOverrides::default()
    }
}

pub(crate) fn read_config(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a JSON document, naming the offending key on failure.
pub(crate) fn parse_config<T: DeserializeOwned>(text: &str) -> Result<T> {
    let mut de = serde_json::Deserializer::from_str(text);
    let value = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        let msg = inner.to_string();
        // a missing field is reported against its parent
        let missing = msg
            .split_once("missing field `")
            .and_then(|(_, rest)| rest.split('`').next());
        let key = match (path.as_str(), missing) {
            (".", Some(f)) => f.to_string(),
            (p, Some(f)) => format!("{p}.{f}"),
            (".", None) => "<document>".to_string(),
            (p, None) => p.to_string(),
        };
        Error::Config { key, message: msg }
    })?;
    de.end().map_err(|e| Error::config("<document>", e.to_string()))?;
    Ok(value)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_conversion() {
        let spec = ModelSpec::two_atom(5.0, 1.0);
        assert!((spec.delta - TAU * 5.0).abs() < 1e-12);
        assert!((spec.omega_drive[0].re - TAU * 0.02).abs() < 1e-15);
        assert!((spec.gamma - 1e-3).abs() < 1e-18);
        // ω = 3Ω²/(4Δ) in angular units
        let w = spec.microwave[0].re;
        let o = spec.omega_drive[0].re;
        assert!((w * 4.0 * spec.delta - 3.0 * o * o).abs() < 1e-12);
        // 𝒰 = 2Δ, 𝒰_ii = 2𝒰
        assert!((spec.u_table.get(Branch::L, Branch::Zero) - 2.0 * spec.delta).abs() < 1e-12);
        assert!((spec.u_table.get(Branch::R, Branch::R) - 4.0 * spec.delta).abs() < 1e-12);
    }

    #[test]
    fn gamma_angular_flag() {
        let mut cfg = ModelConfig::two_atom(5.0, 1.0);
        cfg.gamma_angular = true;
        let spec = cfg.resolve().unwrap();
        assert!((spec.gamma - TAU * 1e-3).abs() < 1e-15);
    }

    #[test]
    fn json_roundtrip_and_unknown_key() {
        let text = r#"{
            "omega_mhz": 0.02,
            "omega_mw_mhz": [0.001, [0.0, -0.001]],
            "delta_mhz": 0.5,
            "u_table_mhz": {"LL": 2, "00": 2, "RR": 2, "L0": 1, "0R": 1, "LR": 1},
            "gamma_khz": 1,
            "gamma_angular": false,
            "atoms": 2,
            "flavor": "effective",
            "collapse_variant": "paper-effective"
        }"#;
        let cfg = ModelConfig::from_json_str(text).unwrap();
        let spec = cfg.resolve().unwrap();
        assert_eq!(spec.flavor, Flavor::Effective);
        assert!((spec.microwave[1] - C64::new(0.0, -TAU * 0.001)).norm() < 1e-15);
        let again: ModelConfig =
            serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
        assert_eq!(again, cfg);

        let bad = text.replace("\"atoms\"", "\"atomz\"");
        match ModelConfig::from_json_str(&bad) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "atomz"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = text.replace("\"LL\": 2", "\"LL\": \"two\"");
        match ModelConfig::from_json_str(&bad) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "u_table_mhz.LL"),
            other => panic!("unexpected {other:?}"),
        }
        let bad = text.replace("\"gamma_khz\": 1,", "");
        match ModelConfig::from_json_str(&bad) {
            Err(Error::Config { key, .. }) => assert_eq!(key, "gamma_khz"),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn effective_requires_two_atoms() {
        let mut cfg = ModelConfig::three_atom(0.5, 1.0);
        cfg.flavor = Flavor::Effective;
        assert!(matches!(cfg.resolve(), Err(Error::FlavorMismatch(_))));
    }

    #[test]
    fn overrides_apply() {
        let o = ModelOverrides::from_json_str(r#"{"delta_mhz": 2.0, "flavor": "effective"}"#)
            .unwrap();
        let cfg = o.apply(&ModelConfig::two_atom(5.0, 1.0));
        assert_eq!(cfg.delta_mhz, 2.0);
        assert_eq!(cfg.flavor, Flavor::Effective);
        assert!(ModelOverrides::from_json_str(r#"{"detla_mhz": 2.0}"#).is_err());
    }
}
