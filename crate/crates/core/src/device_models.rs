//! DPU organizations and their organization-dependent crosstalk and loss
//! accounting.
//!
//! An incoherent MRR GEMM dot-product unit (DPU) manipulates optical channels
//! with four reorderable blocks: Splitting, Aggregation, Modulation and
//! Weighting (the summation block is always last). The block order determines
//! which crosstalk effects can physically occur and how many out-of-resonance
//! devices a wavelength traverses, which drives the optical power penalty.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// The three DPU organizations, named by block order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DpuOrganization {
    /// Aggregation - Splitting - Modulation - Weighting.
    Asmw,
    /// Modulation - Aggregation - Splitting - Weighting.
    Masw,
    /// Splitting - Modulation - Weighting - Aggregation (spectrally hitless).
    Smwa,
}

impl DpuOrganization {
    pub const ALL: [DpuOrganization; 3] = [
        DpuOrganization::Asmw,
        DpuOrganization::Masw,
        DpuOrganization::Smwa,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            DpuOrganization::Asmw => "ASMW",
            DpuOrganization::Masw => "MASW",
            DpuOrganization::Smwa => "SMWA",
        }
    }
}

impl fmt::Display for DpuOrganization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DpuOrganization {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "asmw" => Ok(DpuOrganization::Asmw),
            "masw" => Ok(DpuOrganization::Masw),
            "smwa" => Ok(DpuOrganization::Smwa),
            other => Err(Error::InvalidArgument(format!(
                "unknown DPU organization '{other}' (expected asmw, masw or smwa)"
            ))),
        }
    }
}

/// Which crosstalk effects are present in a given organization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CrosstalkProfile {
    /// An MRM unintentionally modulating a neighboring channel. Requires the
    /// modulation block to sit after aggregation.
    pub inter_modulation: bool,
    /// A weight MRR unintentionally weighting a neighboring channel. Requires
    /// the weighting block to sit after aggregation.
    pub cross_weight: bool,
    /// Sidelobe clipping when a modulated signal passes a multiplexer filter.
    /// Requires aggregation to sit after modulation.
    pub filter_truncation: bool,
}

/// Crosstalk effects per organization.
pub fn crosstalk_profile(org: DpuOrganization) -> CrosstalkProfile {
    match org {
        DpuOrganization::Asmw => CrosstalkProfile {
            inter_modulation: true,
            cross_weight: true,
            filter_truncation: false,
        },
        DpuOrganization::Masw => CrosstalkProfile {
            inter_modulation: false,
            cross_weight: true,
            filter_truncation: true,
        },
        DpuOrganization::Smwa => CrosstalkProfile {
            inter_modulation: false,
            cross_weight: false,
            filter_truncation: true,
        },
    }
}

/// Number of out-of-resonance MRMs/MRRs a wavelength channel traverses on its
/// way to the photodetector: 2(N-1) for ASMW, N for MASW and 2 for SMWA.
///
/// A single channel (n = 1) has no out-of-resonance neighbors in any
/// organization, so the count is 0.
pub fn out_of_resonance_device_count(org: DpuOrganization, n: u32) -> Result<u32> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "channel count must be at least 1".into(),
        ));
    }
    Ok(match org {
        DpuOrganization::Asmw => 2 * (n - 1),
        DpuOrganization::Masw => {
            if n == 1 {
                0
            } else {
                n
            }
        }
        DpuOrganization::Smwa => {
            if n == 1 {
                0
            } else {
                2
            }
        }
    })
}

/// Total through loss: out-of-resonance device count times the per-device
/// out-of-band loss.
pub fn through_loss_db(org: DpuOrganization, n: u32, per_device_obl_db: f64) -> Result<f64> {
    if per_device_obl_db < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "per-device out-of-band loss must be >= 0 dB, got {per_device_obl_db}"
        )));
    }
    Ok(f64::from(out_of_resonance_device_count(org, n)?) * per_device_obl_db)
}

/// Aggregate per-organization network power penalty (crosstalk compensation
/// plus propagation), in dB.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrgPenalties {
    pub asmw_db: f64,
    pub masw_db: f64,
    pub smwa_db: f64,
}

impl Default for OrgPenalties {
    fn default() -> Self {
        OrgPenalties {
            asmw_db: 5.8,
            masw_db: 4.8,
            smwa_db: 1.8,
        }
    }
}

impl OrgPenalties {
    pub fn get(&self, org: DpuOrganization) -> f64 {
        match org {
            DpuOrganization::Asmw => self.asmw_db,
            DpuOrganization::Masw => self.masw_db,
            DpuOrganization::Smwa => self.smwa_db,
        }
    }
}

/// Default aggregate network penalty for an organization, in dB.
pub fn network_penalty_db(org: DpuOrganization) -> f64 {
    OrgPenalties::default().get(org)
}

/// Optimistic component bounds (documentation and sensitivity sweeps only;
/// the aggregate penalties above are what the link budget uses because the
/// totals do not decompose unambiguously into these parts).
pub const INTER_MODULATION_PENALTY_MAX_DB: f64 = 1.0;
pub const CROSS_WEIGHT_PENALTY_MAX_DB: f64 = 3.0;
pub const FILTER_PENALTY_MAX_DB: f64 = 0.5;

/// MRR spectral parameters bounding the usable channel count.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralParams {
    /// Free spectral range, nm.
    pub fsr_nm: f64,
    /// Resonance full width at half maximum, nm.
    pub fwhm_nm: f64,
    /// Channel spacing, nm.
    pub channel_spacing_nm: f64,
}

impl Default for SpectralParams {
    /// FSR 50 nm, FWHM 0.7 nm and the stated 0.25 nm spacing, giving the
    /// 200-channel cap. The 0.4*FWHM spacing rule is applied only when a
    /// custom FWHM is supplied via [`SpectralParams::from_fwhm`].
    fn default() -> Self {
        SpectralParams {
            fsr_nm: 50.0,
            fwhm_nm: 0.7,
            channel_spacing_nm: 0.25,
        }
    }
}

impl SpectralParams {
    /// Derive channel spacing from a resonance width as 0.4 * FWHM.
    pub fn from_fwhm(fsr_nm: f64, fwhm_nm: f64) -> Self {
        SpectralParams {
            fsr_nm,
            fwhm_nm,
            channel_spacing_nm: 0.4 * fwhm_nm,
        }
    }
}

/// Channels that fit in one free spectral range: floor(FSR / spacing).
pub fn fsr_limited_channels(spectral: &SpectralParams) -> Result<u32> {
    if !spectral.channel_spacing_nm.is_finite() || spectral.channel_spacing_nm <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "channel spacing must be > 0 nm, got {}",
            spectral.channel_spacing_nm
        )));
    }
    if !spectral.fsr_nm.is_finite() || spectral.fsr_nm <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "FSR must be > 0 nm, got {}",
            spectral.fsr_nm
        )));
    }
    let n = (spectral.fsr_nm / spectral.channel_spacing_nm).floor();
    if n < 1.0 {
        return Err(Error::InvalidArgument(
            "FSR admits no channel at this spacing".into(),
        ));
    }
    Ok(n as u32)
}

/// Default routing-overhead factor for SMWA's per-channel waveguides. SMWA
/// routes each channel on a dedicated waveguide to a multiplexer, so its
/// waveguides are more numerous and longer than the shared-bus layouts.
pub const DEFAULT_SMWA_ROUTING_OVERHEAD: f64 = 2.0;

/// Waveguide length (mm) traversed by one channel between laser and
/// photodetector, per DPE path.
///
/// ASMW passes two full device arrays (modulators then weights). MASW shares
/// one input array across the DPU's M DPEs, so its per-path length amortizes
/// that array; the weight array is per-DPE. SMWA's dedicated per-channel
/// waveguide spans the DPE twice scaled by a routing-overhead factor.
pub fn waveguide_length_mm(
    org: DpuOrganization,
    n: u32,
    m: u32,
    d_mrr_mm: f64,
    routing_overhead: f64,
) -> f64 {
    let n = f64::from(n);
    let m = f64::from(m.max(1));
    let array = n * d_mrr_mm;
    match org {
        DpuOrganization::Asmw => 2.0 * array,
        DpuOrganization::Masw => array * (1.0 + 1.0 / m),
        DpuOrganization::Smwa => routing_overhead * 2.0 * array,
    }
}

/// Propagation loss (dB) over the per-channel waveguide path.
pub fn propagation_loss_db(
    org: DpuOrganization,
    n: u32,
    m: u32,
    d_mrr_mm: f64,
    att_db_per_mm: f64,
    routing_overhead: f64,
) -> f64 {
    waveguide_length_mm(org, n, m, d_mrr_mm, routing_overhead) * att_db_per_mm
}

/// Per-organization loss summary at a given DPE size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossProfile {
    pub through_loss_db: f64,
    pub propagation_loss_db: f64,
    pub network_penalty_db: f64,
}

/// Assembles the loss profile used by the `penalty` report.
pub fn loss_profile(
    org: DpuOrganization,
    n: u32,
    m: u32,
    per_device_obl_db: f64,
    d_mrr_mm: f64,
    att_db_per_mm: f64,
    penalties: &OrgPenalties,
) -> Result<LossProfile> {
    Ok(LossProfile {
        through_loss_db: through_loss_db(org, n, per_device_obl_db)?,
        propagation_loss_db: propagation_loss_db(
            org,
            n,
            m,
            d_mrr_mm,
            att_db_per_mm,
            DEFAULT_SMWA_ROUTING_OVERHEAD,
        ),
        network_penalty_db: penalties.get(org),
    })
}
