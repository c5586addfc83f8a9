//! Run configuration: JSON file values overridden by command-line flags.

use std::fs;
use std::path::{Path, PathBuf};

use nuctrack_core::autothresh::{AutoThresholdParams, KneeParams};
use nuctrack_core::imgproc::{Channel, MorphParams, StructuringElement};
use nuctrack_core::pipeline::{PipelineParams, ThresholdMode};
use nuctrack_core::regions::Connectivity;
use nuctrack_core::signal::MeasureParams;
use serde::{Deserialize, Serialize};

use crate::error::{io_err, PipelineError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelName {
    Red,
    Green,
    Blue,
    Luminance,
}

impl From<ChannelName> for Channel {
    fn from(c: ChannelName) -> Self {
        match c {
            ChannelName::Red => Channel::Red,
            ChannelName::Green => Channel::Green,
            ChannelName::Blue => Channel::Blue,
            ChannelName::Luminance => Channel::Luminance,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConnectivityName {
    Four,
    Eight,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ElementName {
    Square,
    Cross,
}

/// Everything `analyze` needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub red_dir: Option<PathBuf>,
    pub green_dir: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub opening: usize,
    pub closing: usize,
    pub min_area: usize,
    pub dilation: usize,
    pub jump_factor: f64,
    pub min_jump: usize,
    /// Fixed threshold; disables the scan.
    pub threshold: Option<u8>,
    /// Scan frame 0 only and reuse its threshold.
    pub freeze_threshold: bool,
    pub overlay_dir: Option<PathBuf>,
    /// Per-frame threshold-scan CSV dumps.
    pub scan_dir: Option<PathBuf>,
    pub connectivity: ConnectivityName,
    pub element: ElementName,
    pub red_channel: ChannelName,
    pub green_channel: ChannelName,
    /// Worker threads; `None` lets rayon decide.
    pub jobs: Option<usize>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            red_dir: None,
            green_dir: None,
            out: None,
            opening: 2,
            closing: 0,
            min_area: 20,
            dilation: 5,
            jump_factor: 2.0,
            min_jump: 10,
            threshold: None,
            freeze_threshold: false,
            overlay_dir: None,
            scan_dir: None,
            connectivity: ConnectivityName::Eight,
            element: ElementName::Square,
            red_channel: ChannelName::Red,
            green_channel: ChannelName::Green,
            jobs: None,
        }
    }
}

impl RunConfig {
    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        serde_json::from_str(&text).map_err(|source| PipelineError::Config {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn pipeline_params(&self) -> Result<PipelineParams> {
        if self.dilation == 0 {
            return Err(PipelineError::Invalid(
                "--dilation must be at least 1".into(),
            ));
        }
        if self.jump_factor.is_nan() || self.jump_factor <= 1.0 {
            return Err(PipelineError::Invalid("--jump-factor must exceed 1".into()));
        }
        if self.min_jump == 0 {
            return Err(PipelineError::Invalid(
                "--min-jump must be at least 1".into(),
            ));
        }
        let se = match self.element {
            ElementName::Square => StructuringElement::Square3x3,
            ElementName::Cross => StructuringElement::Cross3x3,
        };
        let threshold = match (self.threshold, self.freeze_threshold) {
            (Some(t), _) => ThresholdMode::Fixed(t),
            (None, true) => ThresholdMode::FirstFrame,
            (None, false) => ThresholdMode::Auto,
        };
        Ok(PipelineParams {
            detection: AutoThresholdParams {
                morph: MorphParams {
                    opening: self.opening,
                    closing: self.closing,
                    se,
                },
                connectivity: match self.connectivity {
                    ConnectivityName::Four => Connectivity::Four,
                    ConnectivityName::Eight => Connectivity::Eight,
                },
                min_area: self.min_area,
                knee: KneeParams {
                    jump_factor: self.jump_factor,
                    min_jump: self.min_jump,
                },
            },
            threshold,
            measure: MeasureParams {
                se,
                ..MeasureParams::with_dilation(self.dilation)
            },
        })
    }

    pub fn require_inputs(&self) -> Result<(&Path, &Path)> {
        match (&self.red_dir, &self.green_dir) {
            (Some(r), Some(g)) => Ok((r, g)),
            _ => Err(PipelineError::Invalid(
                "both --red and --green directories are required".into(),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_follow_recommended_settings() {
        let p = RunConfig::default().pipeline_params().unwrap();
        assert_eq!(p.detection.morph, MorphParams::new(2, 0));
        assert_eq!(p.detection.min_area, 20);
        assert_eq!(p.measure.dilation_iters, 5);
        assert_eq!(p.measure.pad, 7);
        assert_eq!(p.threshold, ThresholdMode::Auto);
    }

    #[test]
    fn json_fields_fill_in_over_defaults() {
        let cfg: RunConfig =
            serde_json::from_str(r#"{"opening": 1, "threshold": 90, "element": "cross"}"#).unwrap();
        assert_eq!(cfg.opening, 1);
        assert_eq!(cfg.closing, 0);
        let p = cfg.pipeline_params().unwrap();
        assert_eq!(p.threshold, ThresholdMode::Fixed(90));
        assert_eq!(p.detection.morph.se, StructuringElement::Cross3x3);
        assert!(serde_json::from_str::<RunConfig>(r#"{"opnening": 1}"#).is_err());
    }

    #[test]
    fn invalid_values_are_rejected() {
        let cfg = RunConfig {
            jump_factor: 1.0,
            ..RunConfig::default()
        };
        assert!(cfg.pipeline_params().is_err());
        assert!(RunConfig::default().require_inputs().is_err());
    }
}
