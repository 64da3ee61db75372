//! Optical link budget and DPE scalability analysis.
//!
//! The detector side sets the minimum optical power `P_PD-opt` needed to
//! resolve a target bit precision at a given symbol rate (ENOB relation over
//! shot, thermal and RIN noise). The waveguide side computes the power
//! actually delivered through the DPU's loss chain for a given fan-in N and
//! fan-out M. The largest N with delivered power >= required power, capped by
//! the free spectral range, is the supported DPE size.

use crate::device_models::{fsr_limited_channels, DpuOrganization, OrgPenalties};
use crate::error::{Error, Result};
use crate::params::ParamSet;

/// Electron charge, C.
pub const ELECTRON_CHARGE_C: f64 = 1.602_176_634e-19;
/// Boltzmann constant, J/K.
pub const BOLTZMANN_J_PER_K: f64 = 1.380_649e-23;

/// Laser, detector and per-device loss constants of the link budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhotonicLinkParams {
    /// Laser power per wavelength, dBm.
    pub p_laser_dbm: f64,
    /// Photodetector responsivity R_s, A/W.
    pub responsivity_a_per_w: f64,
    /// TIA load resistance R_L, ohm.
    pub load_resistance_ohm: f64,
    /// Photodetector dark current I_d, A.
    pub dark_current_a: f64,
    /// Absolute temperature, K.
    pub temperature_k: f64,
    /// Laser relative intensity noise, dB/Hz.
    pub rin_db_per_hz: f64,
    /// Single-mode fiber attenuation, dB (co-packaged laser: 0).
    pub p_smf_att_db: f64,
    /// Fiber-to-chip edge coupler insertion loss, dB.
    pub p_ec_il_db: f64,
    /// Silicon waveguide attenuation, dB/mm.
    pub p_si_att_db_per_mm: f64,
    /// MRR pitch along the waveguide, mm.
    pub d_mrr_mm: f64,
    /// Microring modulator insertion loss, dB.
    pub p_mrm_il_db: f64,
    /// Microring modulator out-of-band loss, dB.
    pub p_mrm_obl_db: f64,
    /// Splitter insertion loss per 1x2 stage, dB.
    pub p_splitter_il_db: f64,
    /// Weighting MRR insertion loss, dB.
    pub p_mrr_w_il_db: f64,
    /// Weighting MRR out-of-band loss, dB.
    pub p_mrr_w_obl_db: f64,
}

impl Default for PhotonicLinkParams {
    /// Values from the parameter table where stated; the remaining knobs
    /// (`p_smf_att_db`, `d_mrr_mm`, `p_mrr_w_il_db`, `p_mrr_w_obl_db`) are
    /// calibrated so the solved DPE sizes land on the published N table.
    fn default() -> Self {
        PhotonicLinkParams {
            p_laser_dbm: 10.0,
            responsivity_a_per_w: 1.2,
            load_resistance_ohm: 50.0,
            dark_current_a: 35e-9,
            temperature_k: 300.0,
            rin_db_per_hz: -140.0,
            p_smf_att_db: 0.0,
            p_ec_il_db: 1.44,
            p_si_att_db_per_mm: 0.3,
            d_mrr_mm: 0.01,
            p_mrm_il_db: 4.0,
            p_mrm_obl_db: 0.01,
            p_splitter_il_db: 0.01,
            p_mrr_w_il_db: 0.01,
            p_mrr_w_obl_db: 0.01,
        }
    }
}

impl PhotonicLinkParams {
    pub fn validate(&self) -> Result<()> {
        if !self.responsivity_a_per_w.is_finite() || self.responsivity_a_per_w <= 0.0 {
            return Err(Error::InvalidArgument("responsivity must be > 0".into()));
        }
        if !self.load_resistance_ohm.is_finite() || self.load_resistance_ohm <= 0.0 {
            return Err(Error::InvalidArgument("load resistance must be > 0".into()));
        }
        if !self.temperature_k.is_finite() || self.temperature_k <= 0.0 {
            return Err(Error::InvalidArgument("temperature must be > 0".into()));
        }
        for (name, v) in [
            ("p_smf_att_db", self.p_smf_att_db),
            ("p_ec_il_db", self.p_ec_il_db),
            ("p_si_att_db_per_mm", self.p_si_att_db_per_mm),
            ("d_mrr_mm", self.d_mrr_mm),
            ("p_mrm_il_db", self.p_mrm_il_db),
            ("p_mrm_obl_db", self.p_mrm_obl_db),
            ("p_splitter_il_db", self.p_splitter_il_db),
            ("p_mrr_w_il_db", self.p_mrr_w_il_db),
            ("p_mrr_w_obl_db", self.p_mrr_w_obl_db),
            ("dark_current_a", self.dark_current_a),
        ] {
            if v < 0.0 {
                return Err(Error::InvalidArgument(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

pub fn dbm_to_watt(dbm: f64) -> f64 {
    10f64.powf((dbm - 30.0) / 10.0)
}

/// Receiver noise current density, A/sqrt(Hz):
/// sqrt(2q(R P + I_d) + 4kT/R_L + R^2 P^2 RIN) + sqrt(2q I_d + 4kT/R_L).
pub fn noise_beta(p_pd_opt_w: f64, params: &PhotonicLinkParams) -> Result<f64> {
    if p_pd_opt_w < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "detector power must be >= 0 W, got {p_pd_opt_w}"
        )));
    }
    let q = ELECTRON_CHARGE_C;
    let r = params.responsivity_a_per_w;
    let thermal = 4.0 * BOLTZMANN_J_PER_K * params.temperature_k / params.load_resistance_ohm;
    let rin_lin = 10f64.powf(params.rin_db_per_hz / 10.0);
    let signal_arm = 2.0 * q * (r * p_pd_opt_w + params.dark_current_a)
        + thermal
        + r * r * p_pd_opt_w * p_pd_opt_w * rin_lin;
    let dark_arm = 2.0 * q * params.dark_current_a + thermal;
    Ok(signal_arm.sqrt() + dark_arm.sqrt())
}

/// Effective number of bits resolvable at detector power `p_pd_opt_w` and
/// symbol rate `datarate_gsps`:
/// B = (20 log10(R P / (beta sqrt(DR / sqrt(2)))) - 1.76) / 6.02.
pub fn enob(p_pd_opt_w: f64, datarate_gsps: f64, params: &PhotonicLinkParams) -> Result<f64> {
    if !p_pd_opt_w.is_finite() || p_pd_opt_w <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "detector power must be > 0 W, got {p_pd_opt_w}"
        )));
    }
    if !datarate_gsps.is_finite() || datarate_gsps <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "datarate must be > 0 GS/s, got {datarate_gsps}"
        )));
    }
    let dr_sps = datarate_gsps * 1e9;
    let beta = noise_beta(p_pd_opt_w, params)?;
    let snr = (params.responsivity_a_per_w * p_pd_opt_w)
        / (beta * (dr_sps / std::f64::consts::SQRT_2).sqrt());
    Ok((20.0 * snr.log10() - 1.76) / 6.02)
}

/// Solver bracket over detector power, dBm.
pub const SOLVER_BRACKET_DBM: (f64, f64) = (-90.0, 30.0);

/// Minimum detector power (dBm) that reaches `bit_precision` effective bits
/// at `datarate_gsps`, by bisection over the dBm bracket. The ENOB is
/// strictly increasing in power until the RIN ceiling, so the root is
/// unique when it exists; if the ceiling sits below the target the query is
/// infeasible.
pub fn solve_p_pd_opt(
    bit_precision: f64,
    datarate_gsps: f64,
    params: &PhotonicLinkParams,
) -> Result<f64> {
    if !bit_precision.is_finite() || bit_precision <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "bit precision must be > 0, got {bit_precision}"
        )));
    }
    params.validate()?;
    let (mut lo, mut hi) = SOLVER_BRACKET_DBM;
    let f = |dbm: f64| -> Result<f64> {
        Ok(enob(dbm_to_watt(dbm), datarate_gsps, params)? - bit_precision)
    };
    let f_lo = f(lo)?;
    let f_hi = f(hi)?;
    if f_lo > 0.0 || f_hi < 0.0 {
        return Err(Error::InfeasiblePrecision {
            bits: bit_precision,
            datarate_gsps,
        });
    }
    // 0.01 dB accuracy needs ~14 halvings of the 120 dB bracket; run well
    // past that so downstream integer-N decisions never sit on the tolerance.
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if f(mid)? < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Power delivered at a DPE's photodetector input, dBm, for fan-in `n` and
/// fan-out `m`:
/// P_laser - SMF - EC - Si_att*n*d - MRM_IL - (n-1)*MRM_OBL
/// - splitter_IL*log2(m) - MRR_W_IL - (n-1)*MRR_W_OBL - penalty(org)
/// - 10*log10(n).
pub fn link_output_power(
    n: u32,
    m: u32,
    org: DpuOrganization,
    link: &PhotonicLinkParams,
    penalties: &OrgPenalties,
) -> Result<f64> {
    if n < 1 || m < 1 {
        return Err(Error::InvalidArgument(format!(
            "n and m must be >= 1, got n={n} m={m}"
        )));
    }
    let nf = f64::from(n);
    let mf = f64::from(m);
    Ok(link.p_laser_dbm
        - link.p_smf_att_db
        - link.p_ec_il_db
        - link.p_si_att_db_per_mm * nf * link.d_mrr_mm
        - link.p_mrm_il_db
        - (nf - 1.0) * link.p_mrm_obl_db
        - link.p_splitter_il_db * mf.log2()
        - link.p_mrr_w_il_db
        - (nf - 1.0) * link.p_mrr_w_obl_db
        - penalties.get(org)
        - 10.0 * nf.log10())
}

/// A scalability question: how large can a DPE get at this precision and
/// symbol rate in this organization?
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalabilityQuery {
    pub bit_precision: u8,
    pub datarate_gsps: f64,
    pub org: DpuOrganization,
}

impl ScalabilityQuery {
    pub fn validate(&self) -> Result<()> {
        if !(1..=16).contains(&self.bit_precision) {
            return Err(Error::InvalidArgument(format!(
                "bit precision must be in 1..=16, got {}",
                self.bit_precision
            )));
        }
        if !self.datarate_gsps.is_finite() || self.datarate_gsps <= 0.0 {
            return Err(Error::InvalidArgument("datarate must be > 0".into()));
        }
        Ok(())
    }
}

/// Solved scalability row. `p_pd_opt_dbm` is None when no detector power in
/// the bracket reaches the precision (RIN ceiling), in which case `n_max` is
/// 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalabilityResult {
    pub org: DpuOrganization,
    pub datarate_gsps: f64,
    pub bit_precision: u8,
    pub p_pd_opt_dbm: Option<f64>,
    pub n_max: u32,
    pub fsr_capped: bool,
}

/// Largest N (with M = N) whose delivered power covers the required detector
/// power, capped at the FSR-limited channel count. Scans linearly so no
/// unimodality assumption is needed; N = 0 means even a single channel is
/// infeasible.
pub fn max_n(query: &ScalabilityQuery, params: &ParamSet) -> Result<ScalabilityResult> {
    query.validate()?;
    let p_req_dbm = solve_p_pd_opt(
        f64::from(query.bit_precision),
        query.datarate_gsps,
        &params.link,
    )?;
    let cap = fsr_limited_channels(&params.spectral)?;
    let feasible = |n: u32| -> Result<bool> {
        Ok(link_output_power(n, n, query.org, &params.link, &params.penalties)? >= p_req_dbm)
    };
    let mut best = 0u32;
    for n in 1..=cap {
        if feasible(n)? {
            best = n;
        }
    }
    let fsr_capped = best == cap && feasible(cap + 1)?;
    Ok(ScalabilityResult {
        org: query.org,
        datarate_gsps: query.datarate_gsps,
        bit_precision: query.bit_precision,
        p_pd_opt_dbm: Some(p_req_dbm),
        n_max: best,
        fsr_capped,
    })
}

/// Cartesian sweep over organizations, data rates and precisions, in
/// (org, DR, B) row order. Cells whose precision is unreachable at any
/// detector power become N = 0 rows with no recorded P_PD-opt; other errors
/// propagate.
pub fn sweep_scalability(
    b_list: &[u8],
    dr_list: &[f64],
    orgs: &[DpuOrganization],
    params: &ParamSet,
) -> Result<Vec<ScalabilityResult>> {
    if b_list.is_empty() || dr_list.is_empty() || orgs.is_empty() {
        return Err(Error::InvalidArgument(
            "sweep lists must be nonempty".into(),
        ));
    }
    let mut rows = Vec::with_capacity(b_list.len() * dr_list.len() * orgs.len());
    for &org in orgs {
        for &dr in dr_list {
            for &b in b_list {
                let query = ScalabilityQuery {
                    bit_precision: b,
                    datarate_gsps: dr,
                    org,
                };
                match max_n(&query, params) {
                    Ok(row) => rows.push(row),
                    Err(Error::InfeasiblePrecision { .. }) => rows.push(ScalabilityResult {
                        org,
                        datarate_gsps: dr,
                        bit_precision: b,
                        p_pd_opt_dbm: None,
                        n_max: 0,
                        fsr_capped: false,
                    }),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(rows)
}
