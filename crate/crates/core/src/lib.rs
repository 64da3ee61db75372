//! Design-space exploration for incoherent microring-resonator (MRR)
//! photonic GEMM accelerators.
//!
//! The crate models the three incoherent dot-product-unit organizations
//! (ASMW, MASW, SMWA) end to end:
//!
//! - [`device_models`] — organization taxonomy, crosstalk presence and
//!   optical loss accounting;
//! - [`link_budget`] — detector-side ENOB noise analysis and the
//!   waveguide-side power delivery, solved for the largest supported
//!   dot-product size N per organization;
//! - [`workload`] — CNN layer descriptors and their im2col GEMM shapes,
//!   including bit-slicing expansion;
//! - [`mapper`] — output-stationary tiling of GEMMs onto DPEs with
//!   psum/weight-load schedules;
//! - [`simulator`] — deterministic event-driven execution producing FPS,
//!   FPS/W and FPS/W/mm^2 with component energy breakdowns;
//! - [`report`] — CSV emission for all of the above;
//! - [`params`] — flat key=value parameter files.

pub mod device_models;
pub mod error;
pub mod link_budget;
pub mod mapper;
pub mod params;
pub mod report;
pub mod simulator;
pub mod workload;

pub use device_models::{
    crosstalk_profile, fsr_limited_channels, network_penalty_db, out_of_resonance_device_count,
    through_loss_db, CrosstalkProfile, DpuOrganization, LossProfile, OrgPenalties, SpectralParams,
};
pub use error::{Error, Result};
pub use link_budget::{
    enob, link_output_power, max_n, noise_beta, solve_p_pd_opt, sweep_scalability,
    PhotonicLinkParams, ScalabilityQuery, ScalabilityResult,
};
pub use mapper::{
    paper_dpu_config, plan_layer, plan_model, AcceleratorConfig, LayerPlan, PlanItem,
};
pub use params::ParamSet;
pub use simulator::{
    area_model, area_proportionate_count, compare_accelerators, run_inference, CompareReport,
    CountsMode, PeripheralParams, SimReport,
};
pub use workload::{
    bit_slices, conv_to_gemm, fc_to_gemm, load_model, CnnModel, GemmShape, LayerDescriptor,
    LayerKind, SliceFactor,
};
