//! JSON design files.
//!
//! Field names carry their SI unit (`f0_hz`, `cc_f`, ...). Calibration
//! results go into `operating_point` so the synthesized values stay as
//! computed.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::synthesis::{synthesize, FilterSpec, SynthesizedDesign};
use crate::topology::{LossModel, TopologyId};
use crate::varactor::VaractorModel;

pub const FORMAT: &str = "bandstop-design/1";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OperatingPoint {
    pub ca_f: f64,
    pub cb_f: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DesignFile {
    pub format: String,
    pub design: SynthesizedDesign,
    pub topology: TopologyId,
    #[serde(default)]
    pub loss: LossModel,
    /// Path of a varactor profile, relative to the design file.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub varactor_profile: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operating_point: Option<OperatingPoint>,
}

impl DesignFile {
    pub fn new(design: SynthesizedDesign, topology: TopologyId) -> Self {
        Self {
            format: FORMAT.to_owned(),
            design,
            topology,
            loss: LossModel::default(),
            varactor_profile: None,
            operating_point: None,
        }
    }

    pub fn from_spec(spec: &FilterSpec, topology: TopologyId) -> Result<Self> {
        Ok(Self::new(synthesize(spec)?, topology))
    }

    pub fn spec(&self) -> &FilterSpec {
        &self.design.spec
    }

    /// `(C_a, C_b)` of the operating point, falling back to the synthesized values.
    pub fn caps(&self) -> (f64, f64) {
        match self.operating_point {
            Some(op) => (op.ca_f, op.cb_f),
            None => (self.design.practical.ca, self.design.practical.cb),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DesignFile = serde_json::from_str(text)?;
        if file.format != FORMAT {
            return Err(Error::InvalidArgument(format!(
                "unsupported design format `{}` (expected `{FORMAT}`)",
                file.format
            )));
        }
        file.design.spec.validate()?;
        file.loss.validate()?;
        Ok(file)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    /// Loads the referenced varactor profile, if any.
    pub fn varactor(&self, design_path: &Path) -> Result<Option<VaractorModel>> {
        self.varactor_profile
            .as_ref()
            .map(|p| {
                let full = design_path.parent().unwrap_or(Path::new(".")).join(p);
                load_varactor(&full)
            })
            .transpose()
    }
}

pub fn load_varactor(path: &Path) -> Result<VaractorModel> {
    let model: VaractorModel = serde_json::from_str(&std::fs::read_to_string(path)?)?;
    model.validate()?;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let mut f = DesignFile::from_spec(
            &FilterSpec::new(0.83e9, 0.18, 50.0, 2.2e-12),
            TopologyId::PracticalV2,
        )
        .unwrap();
        f.loss.varactor_rs = 0.7;
        f.operating_point = Some(OperatingPoint {
            ca_f: 1.2345678901234567e-12,
            cb_f: 3.9e-13,
        });
        let back = DesignFile::from_json(&f.to_json().unwrap()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn unit_suffixed_keys() {
        let f = DesignFile::from_spec(
            &FilterSpec::new(0.83e9, 0.18, 50.0, 2.2e-12),
            TopologyId::Notch,
        )
        .unwrap();
        let json = f.to_json().unwrap();
        for key in [
            "\"f0_hz\"",
            "\"cc_f\"",
            "\"l_h\"",
            "\"ca_f\"",
            "\"zt_ohm\"",
            "\"notch_fig1a\"",
        ] {
            assert!(json.contains(key), "{key}");
        }
    }

    #[test]
    fn rejects_unknown_format() {
        let f = DesignFile::from_spec(
            &FilterSpec::new(0.83e9, 0.18, 50.0, 2.2e-12),
            TopologyId::Notch,
        )
        .unwrap();
        let json = f.to_json().unwrap().replace(FORMAT, "other/9");
        assert!(matches!(
            DesignFile::from_json(&json),
            Err(Error::InvalidArgument(_))
        ));
    }
}
