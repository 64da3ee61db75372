//! Flat key=value parameter files covering the link budget constants, the
//! per-organization network penalties and the spectral parameters.
//!
//! Keys are exactly the snake_case field names; unknown keys are rejected
//! with the offending line number. `#` starts a comment.

use std::path::Path;

use crate::device_models::{OrgPenalties, SpectralParams};
use crate::error::{Error, Result};
use crate::link_budget::PhotonicLinkParams;

/// Everything the scalability analysis reads from a parameter file.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ParamSet {
    pub link: PhotonicLinkParams,
    pub penalties: OrgPenalties,
    pub spectral: SpectralParams,
}

impl ParamSet {
    pub fn from_file(path: &Path) -> Result<ParamSet> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.display().to_string(),
            line: 0,
            msg: e.to_string(),
        })?;
        Self::from_str_named(&text, &path.display().to_string())
    }

    pub fn from_str_named(text: &str, path: &str) -> Result<ParamSet> {
        let mut params = ParamSet::default();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| Error::Parse {
                path: path.to_string(),
                line: line_no,
                msg: format!("expected key=value, got '{raw}'"),
            })?;
            let key = key.trim();
            let value: f64 = value.trim().parse().map_err(|_| Error::Parse {
                path: path.to_string(),
                line: line_no,
                msg: format!("'{}' is not a number", value.trim()),
            })?;
            params.set(key, value).map_err(|msg| Error::Parse {
                path: path.to_string(),
                line: line_no,
                msg,
            })?;
        }
        params.link.validate()?;
        Ok(params)
    }

    fn set(&mut self, key: &str, value: f64) -> std::result::Result<(), String> {
        let l = &mut self.link;
        let p = &mut self.penalties;
        let s = &mut self.spectral;
        let slot: &mut f64 = match key {
            "p_laser_dbm" => &mut l.p_laser_dbm,
            "responsivity_a_per_w" => &mut l.responsivity_a_per_w,
            "load_resistance_ohm" => &mut l.load_resistance_ohm,
            "dark_current_a" => &mut l.dark_current_a,
            "temperature_k" => &mut l.temperature_k,
            "rin_db_per_hz" => &mut l.rin_db_per_hz,
            "p_smf_att_db" => &mut l.p_smf_att_db,
            "p_ec_il_db" => &mut l.p_ec_il_db,
            "p_si_att_db_per_mm" => &mut l.p_si_att_db_per_mm,
            "d_mrr_mm" => &mut l.d_mrr_mm,
            "p_mrm_il_db" => &mut l.p_mrm_il_db,
            "p_mrm_obl_db" => &mut l.p_mrm_obl_db,
            "p_splitter_il_db" => &mut l.p_splitter_il_db,
            "p_mrr_w_il_db" => &mut l.p_mrr_w_il_db,
            "p_mrr_w_obl_db" => &mut l.p_mrr_w_obl_db,
            "network_penalty_asmw_db" => &mut p.asmw_db,
            "network_penalty_masw_db" => &mut p.masw_db,
            "network_penalty_smwa_db" => &mut p.smwa_db,
            "fsr_nm" => &mut s.fsr_nm,
            "fwhm_nm" => &mut s.fwhm_nm,
            "channel_spacing_nm" => &mut s.channel_spacing_nm,
            other => return Err(format!("unknown parameter '{other}'")),
        };
        *slot = value;
        Ok(())
    }

    /// The full default parameter file with unit comments, suitable for
    /// `--seed-params` and for round-tripping through [`ParamSet::from_file`].
    pub fn seed_file() -> String {
        let d = ParamSet::default();
        let l = &d.link;
        let p = &d.penalties;
        let s = &d.spectral;
        format!(
            "# photonic-dse parameter file: key = value, '#' starts a comment\n\
             p_laser_dbm = {}                # laser power per wavelength, dBm\n\
             responsivity_a_per_w = {}      # photodetector responsivity, A/W\n\
             load_resistance_ohm = {}        # TIA load resistance, ohm\n\
             dark_current_a = {:e}         # detector dark current, A\n\
             temperature_k = {}             # absolute temperature, K\n\
             rin_db_per_hz = {}            # laser relative intensity noise, dB/Hz\n\
             p_smf_att_db = {}               # single-mode fiber attenuation, dB\n\
             p_ec_il_db = {}              # fiber-to-chip coupler insertion loss, dB\n\
             p_si_att_db_per_mm = {}        # silicon waveguide attenuation, dB/mm\n\
             d_mrr_mm = {}                # microring pitch along the waveguide, mm\n\
             p_mrm_il_db = {}                # modulator insertion loss, dB\n\
             p_mrm_obl_db = {}            # modulator out-of-band loss, dB\n\
             p_splitter_il_db = {}        # splitter insertion loss per stage, dB\n\
             p_mrr_w_il_db = {}           # weight ring insertion loss, dB\n\
             p_mrr_w_obl_db = {}          # weight ring out-of-band loss, dB\n\
             network_penalty_asmw_db = {}  # aggregate ASMW network penalty, dB\n\
             network_penalty_masw_db = {}  # aggregate MASW network penalty, dB\n\
             network_penalty_smwa_db = {}  # aggregate SMWA network penalty, dB\n\
             fsr_nm = {}                    # free spectral range, nm\n\
             fwhm_nm = {}                  # resonance width, nm\n\
             channel_spacing_nm = {}       # channel spacing, nm\n",
            l.p_laser_dbm,
            l.responsivity_a_per_w,
            l.load_resistance_ohm,
            l.dark_current_a,
            l.temperature_k,
            l.rin_db_per_hz,
            l.p_smf_att_db,
            l.p_ec_il_db,
            l.p_si_att_db_per_mm,
            l.d_mrr_mm,
            l.p_mrm_il_db,
            l.p_mrm_obl_db,
            l.p_splitter_il_db,
            l.p_mrr_w_il_db,
            l.p_mrr_w_obl_db,
            p.asmw_db,
            p.masw_db,
            p.smwa_db,
            s.fsr_nm,
            s.fwhm_nm,
            s.channel_spacing_nm,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seed_round_trips() {
        let text = ParamSet::seed_file();
        let parsed = ParamSet::from_str_named(&text, "<seed>").unwrap();
        assert_eq!(parsed, ParamSet::default());
    }

    #[test]
    fn overrides_apply() {
        let p =
            ParamSet::from_str_named("p_laser_dbm = 12\nnetwork_penalty_smwa_db=2.5\n", "<s>")
                .unwrap();
        assert_eq!(p.link.p_laser_dbm, 12.0);
        assert_eq!(p.penalties.smwa_db, 2.5);
        assert_eq!(p.link.p_ec_il_db, 1.44);
    }

    #[test]
    fn unknown_key_rejected_with_line() {
        let err = ParamSet::from_str_named("p_laser_dbm = 10\nbogus_key = 1\n", "<s>")
            .unwrap_err();
        match err {
            Error::Parse { line, msg, .. } => {
                assert_eq!(line, 2);
                assert!(msg.contains("bogus_key"));
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn malformed_line_rejected() {
        assert!(ParamSet::from_str_named("p_laser_dbm 10", "<s>").is_err());
        assert!(ParamSet::from_str_named("p_laser_dbm = abc", "<s>").is_err());
    }
}
