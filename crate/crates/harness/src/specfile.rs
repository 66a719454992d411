//! Extension spec files (TOML).
//!
//! ```toml
//! kind = "custom"
//! p = 2
//! precision = 32
//! e_k = 1
//! ek = ["-2"]                  # E_K coefficients c_0..c_{e_K-1}
//! el = [["-2"], ["0"]]         # E_L coefficients, each as O_K coordinates
//! sigma_pi = [["0"], ["-1"]]   # σ(π_L), one O_K block per power of π_L
//! ```
//!
//! Built-in kinds need only `kind`, and `p` for `cyclotomic-step`.

use std::path::Path;

use serde::Deserialize;
use wittcheck_core::extension::{CustomData, ExtensionSpec};

use crate::config::{ConfigError, DEFAULT_PRECISION};

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub kind: String,
    pub p: Option<u64>,
    pub precision: Option<u32>,
    pub e_k: Option<usize>,
    pub ek: Option<Vec<String>>,
    pub el: Option<Vec<Vec<String>>>,
    pub sigma_pi: Option<Vec<Vec<String>>>,
}

pub fn parse_spec(text: &str) -> Result<ExtensionSpec, ConfigError> {
    let file: SpecFile = toml::from_str(text).map_err(|e| ConfigError(format!("spec file: {e}")))?;
    let precision = file.precision.unwrap_or(DEFAULT_PRECISION);
    if file.kind != "custom" {
        if file.ek.is_some() || file.el.is_some() || file.sigma_pi.is_some() || file.e_k.is_some() {
            return Err(ConfigError(format!("kind {:?} takes no polynomial data", file.kind)));
        }
        return ExtensionSpec::builtin(&file.kind, file.p, precision).map_err(|e| ConfigError(e.to_string()));
    }
    let missing = |f: &str| ConfigError(format!("custom spec needs `{f}`"));
    let p = file.p.ok_or_else(|| missing("p"))?;
    let ek = file.ek.ok_or_else(|| missing("ek"))?;
    let el = file.el.ok_or_else(|| missing("el"))?;
    let sigma_pi = file.sigma_pi.ok_or_else(|| missing("sigma_pi"))?;
    if let Some(e) = file.e_k {
        if e != ek.len() {
            return Err(ConfigError(format!("e_k = {e} but ek has {} coefficients", ek.len())));
        }
    }
    let data = CustomData::parse(&ek, &el, &sigma_pi).map_err(|e| ConfigError(e.to_string()))?;
    Ok(ExtensionSpec::custom(p, precision, data))
}

pub fn load_spec(path: &Path) -> Result<ExtensionSpec, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    parse_spec(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use wittcheck_core::extension::ExtensionKind;

    #[test]
    fn builtin_kinds() {
        let s = parse_spec("kind = \"cyclotomic-step\"\np = 3\nprecision = 20").unwrap();
        assert_eq!(s, ExtensionSpec::cyclotomic_step(3, 20));
        assert_eq!(parse_spec("kind = \"quadratic-sqrt2\"").unwrap(), ExtensionSpec::quadratic_sqrt2(32));
        assert!(parse_spec("kind = \"quadratic-sqrt2\"\nek = [\"-2\"]").is_err());
        assert!(parse_spec("kind = \"mystery\"").is_err());
        assert!(parse_spec("kind = \"custom\"\nbogus = 1").is_err());
    }

    #[test]
    fn custom_kind() {
        let text = r#"
            kind = "custom"
            p = 2
            e_k = 1
            ek = ["-2"]
            el = [["-2"], ["0"]]
            sigma_pi = [["0"], ["-1"]]
        "#;
        let s = parse_spec(text).unwrap();
        assert!(matches!(s.kind, ExtensionKind::Custom(_)));
        assert_eq!(s.precision, 32);
        assert!(parse_spec(&text.replace("e_k = 1", "e_k = 2")).is_err());
        assert!(parse_spec(&text.replace("\"-2\"]\n", "\"x\"]\n")).is_err());
    }
}
