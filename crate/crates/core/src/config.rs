//! Run configuration: a flat `key = value` text format with strict
//! unknown-key rejection, exact serialization round-trip, and validation of
//! every solver invariant at parse time.

use crate::{NlwError, Result};

/// Fully resolved configuration of one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub experiment: String,
    /// data generator: "compact", "gaussian" or "ground_state"
    pub data: String,
    pub data_amplitude: f64,
    /// bump radius for "compact", Gaussian width for "gaussian"
    pub data_width: f64,
    /// "displacement" or "velocity"
    pub data_mode: String,
    pub lambda: f64,
    pub n_dim: u32,
    pub dr: f64,
    pub dt: f64,
    pub r_max: f64,
    pub t_max: f64,
    /// multiplier: "bracket", "smoothed_abs" or "cutoff"
    pub weight: String,
    pub weight_k: u32,
    pub weight_radius: f64,
    pub weight_eps: f64,
    /// localization radii for the R-schedules
    pub schedule_radii: Vec<f64>,
    /// extra horizon beyond R in T(R) = R + t_margin schedules
    pub t_margin: f64,
    pub out_dir: String,
    /// output sampling stride in steps
    pub stride: u32,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            experiment: "energy_conservation".into(),
            data: "compact".into(),
            data_amplitude: 0.5,
            data_width: 1.0,
            data_mode: "displacement".into(),
            lambda: 0.0,
            n_dim: 3,
            dr: 0.02,
            dt: 0.01,
            r_max: 150.0,
            t_max: 20.0,
            weight: "bracket".into(),
            weight_k: 4,
            weight_radius: 10.0,
            weight_eps: 1e-3,
            schedule_radii: vec![5.0, 10.0, 20.0, 40.0],
            t_margin: 20.0,
            out_dir: "out".into(),
            stride: 10,
        }
    }
}

fn parse_num<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .trim()
        .parse()
        .map_err(|_| NlwError::Config(format!("key {key:?}: cannot parse value {value:?}")))
}

impl RunConfig {
    /// Apply one `key=value` assignment (the `--set` form and the file
    /// line format are identical). Unknown keys are rejected.
    pub fn apply_set(&mut self, assignment: &str) -> Result<()> {
        let (key, value) = assignment
            .split_once('=')
            .ok_or_else(|| NlwError::Config(format!("expected key=value, got {assignment:?}")))?;
        let key = key.trim();
        let value = value.trim();
        match key {
            "experiment" => self.experiment = value.into(),
            "data" => self.data = value.into(),
            "data_amplitude" => self.data_amplitude = parse_num(key, value)?,
            "data_width" => self.data_width = parse_num(key, value)?,
            "data_mode" => self.data_mode = value.into(),
            "lambda" => self.lambda = parse_num(key, value)?,
            "n_dim" => self.n_dim = parse_num(key, value)?,
            "dr" => self.dr = parse_num(key, value)?,
            "dt" => self.dt = parse_num(key, value)?,
            "r_max" => self.r_max = parse_num(key, value)?,
            "t_max" => self.t_max = parse_num(key, value)?,
            "weight" => self.weight = value.into(),
            "weight_k" => self.weight_k = parse_num(key, value)?,
            "weight_radius" => self.weight_radius = parse_num(key, value)?,
            "weight_eps" => self.weight_eps = parse_num(key, value)?,
            "schedule_radii" => {
                let radii: Result<Vec<f64>> = value.split(',').map(|p| parse_num(key, p)).collect();
                self.schedule_radii = radii?;
            }
            "t_margin" => self.t_margin = parse_num(key, value)?,
            "out_dir" => self.out_dir = value.into(),
            "stride" => self.stride = parse_num(key, value)?,
            _ => {
                return Err(NlwError::Config(format!(
                    "unknown configuration key {key:?}"
                )))
            }
        }
        Ok(())
    }

    /// Parse a config file body on top of the defaults. Lines are
    /// `key = value`; blank lines and `#` comments are ignored.
    pub fn parse_str(text: &str) -> Result<Self> {
        let mut cfg = RunConfig::default();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            cfg.apply_set(line)
                .map_err(|e| NlwError::Config(format!("line {}: {e}", lineno + 1)))?;
        }
        Ok(cfg)
    }

    /// Canonical serialization; `parse_str(serialize(cfg)) == cfg`.
    pub fn serialize(&self) -> String {
        self.to_pairs()
            .into_iter()
            .map(|(k, v)| format!("{k} = {v}\n"))
            .collect()
    }

    /// Flattened `(key, value)` view in canonical order.
    pub fn to_pairs(&self) -> Vec<(String, String)> {
        let radii = self
            .schedule_radii
            .iter()
            .map(|r| r.to_string())
            .collect::<Vec<_>>()
            .join(",");
        vec![
            ("experiment".into(), self.experiment.clone()),
            ("data".into(), self.data.clone()),
            ("data_amplitude".into(), self.data_amplitude.to_string()),
            ("data_width".into(), self.data_width.to_string()),
            ("data_mode".into(), self.data_mode.clone()),
            ("lambda".into(), self.lambda.to_string()),
            ("n_dim".into(), self.n_dim.to_string()),
            ("dr".into(), self.dr.to_string()),
            ("dt".into(), self.dt.to_string()),
            ("r_max".into(), self.r_max.to_string()),
            ("t_max".into(), self.t_max.to_string()),
            ("weight".into(), self.weight.clone()),
            ("weight_k".into(), self.weight_k.to_string()),
            ("weight_radius".into(), self.weight_radius.to_string()),
            ("weight_eps".into(), self.weight_eps.to_string()),
            ("schedule_radii".into(), radii),
            ("t_margin".into(), self.t_margin.to_string()),
            ("out_dir".into(), self.out_dir.clone()),
            ("stride".into(), self.stride.to_string()),
        ]
    }

    /// Re-validate every structural invariant; diagnostics name the key.
    pub fn validate(&self) -> Result<()> {
        if !crate::experiments::REGISTRY.contains(&self.experiment.as_str()) {
            return Err(NlwError::UnknownExperiment {
                name: self.experiment.clone(),
                valid: crate::experiments::REGISTRY.join(", "),
            });
        }
        if !["compact", "gaussian", "ground_state"].contains(&self.data.as_str()) {
            return Err(NlwError::Config(format!(
                "key \"data\": unknown generator {:?}",
                self.data
            )));
        }
        if !["displacement", "velocity"].contains(&self.data_mode.as_str()) {
            return Err(NlwError::Config(format!(
                "key \"data_mode\": expected displacement or velocity, got {:?}",
                self.data_mode
            )));
        }
        if self.n_dim < 3 {
            return Err(NlwError::Config(format!(
                "key \"n_dim\": dimension must be >= 3, got {}",
                self.n_dim
            )));
        }
        if !(self.dr > 0.0) {
            return Err(NlwError::Config(format!(
                "key \"dr\": spacing must be positive, got {}",
                self.dr
            )));
        }
        let cfl_bound = crate::solver::max_cfl(self.n_dim);
        if !(self.dt > 0.0) || self.dt / self.dr > cfl_bound {
            return Err(NlwError::Config(format!(
                "key \"dt\": step {} violates the Courant bound dt <= {:.4} * dr \
                 (cap 0.9, origin-rule limit sqrt(2/n); dr = {})",
                self.dt, cfl_bound, self.dr
            )));
        }
        if !(self.r_max >= 10.0 * self.dr) {
            return Err(NlwError::Config(format!(
                "key \"r_max\": extent {} too small for spacing {}",
                self.r_max, self.dr
            )));
        }
        if !(self.t_max > 0.0) {
            return Err(NlwError::Config(format!(
                "key \"t_max\": horizon must be positive, got {}",
                self.t_max
            )));
        }
        if !["bracket", "smoothed_abs", "cutoff"].contains(&self.weight.as_str()) {
            return Err(NlwError::Config(format!(
                "key \"weight\": unknown weight {:?}",
                self.weight
            )));
        }
        if self.weight_k == 0 {
            return Err(NlwError::Config(
                "key \"weight_k\": cutoff index must be >= 1".into(),
            ));
        }
        if !(self.weight_radius > 0.0) || !(self.weight_eps > 0.0) {
            return Err(NlwError::Config(
                "keys \"weight_radius\"/\"weight_eps\" must be positive".into(),
            ));
        }
        if self.schedule_radii.is_empty()
            || self.schedule_radii.iter().any(|&r| !(r > 0.0))
            || self.schedule_radii.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(NlwError::Config(
                "key \"schedule_radii\": need a strictly increasing positive list".into(),
            ));
        }
        if !(self.t_margin >= 0.0) {
            return Err(NlwError::Config(format!(
                "key \"t_margin\": must be nonnegative, got {}",
                self.t_margin
            )));
        }
        if self.stride == 0 {
            return Err(NlwError::Config("key \"stride\": must be >= 1".into()));
        }
        Ok(())
    }

    /// Courant ratio implied by the chosen steps.
    pub fn cfl(&self) -> f64 {
        self.dt / self.dr
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
    }

    #[test]
    fn round_trip() {
        let mut cfg = RunConfig::default();
        cfg.apply_set("experiment = morawetz_identity").unwrap();
        cfg.apply_set("lambda=-1").unwrap();
        cfg.apply_set("schedule_radii = 2.5,7,19").unwrap();
        cfg.apply_set("dr=0.013").unwrap();
        cfg.apply_set("dt=0.0071").unwrap();
        let text = cfg.serialize();
        let back = RunConfig::parse_str(&text).unwrap();
        assert_eq!(cfg, back);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        let mut cfg = RunConfig::default();
        assert!(cfg.apply_set("tolerance = 3").is_err());
        assert!(cfg.apply_set("no_equals_sign").is_err());
        assert!(cfg.apply_set("dr = fast").is_err());
        assert!(RunConfig::parse_str("dr = 0.02\nwat = 1\n").is_err());
        // comments and blanks are fine
        let ok = RunConfig::parse_str("# comment\n\nlambda = 1\n").unwrap();
        assert_eq!(ok.lambda, 1.0);
    }

    #[test]
    fn cfl_violation_names_dt() {
        let mut cfg = RunConfig::default();
        cfg.apply_set("dt = 0.05").unwrap();
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("dt"), "diagnostic should name dt: {err}");
        assert!(
            err.contains("0.9"),
            "diagnostic should cite the bound: {err}"
        );
    }

    #[test]
    fn unknown_experiment_lists_registry() {
        let mut cfg = RunConfig::default();
        cfg.apply_set("experiment = warp_drive").unwrap();
        let err = cfg.validate().unwrap_err().to_string();
        assert!(err.contains("warp_drive"));
        assert!(err.contains("energy_conservation"));
        assert!(err.contains("kenig_merle_dichotomy"));
    }

    #[test]
    fn schedule_must_increase() {
        let mut cfg = RunConfig::default();
        cfg.apply_set("schedule_radii = 10,5").unwrap();
        assert!(cfg.validate().is_err());
    }
}
