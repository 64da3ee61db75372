//! Deterministic transaction-level event-driven execution of layer plans,
//! with latency, energy, power and area accounting.
//!
//! Time advances in integer femtoseconds through a (time, seq) ordered event
//! queue, so identical inputs replay to bit-identical reports. Work is
//! aggregated at layer granularity: each GEMM layer contributes a weight-load
//! phase, a compute phase (symbol cycles at the configured symbol rate), a
//! psum-reduction phase and buffer staging transactions. Pooling and
//! activation units stream at line rate and contribute energy only.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::device_models::{waveguide_length_mm, DpuOrganization};
use crate::error::{Error, Result};
use crate::link_budget::{max_n, ScalabilityQuery};
use crate::mapper::{plan_model, AcceleratorConfig, LayerPlan, PlanItem};
use crate::params::ParamSet;
use crate::workload::CnnModel;

/// Power/latency/area triple for one peripheral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Component {
    pub power_mw: f64,
    pub latency_ns: f64,
    pub area_mm2: f64,
}

/// Peripheral whose latency is expressed in clock cycles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleComponent {
    pub power_mw: f64,
    pub latency_cycles: u32,
    pub area_mm2: f64,
}

/// Resonance tuning mechanism.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TuningParams {
    pub power_mw: f64,
    pub latency_ns: f64,
}

/// Peripheral and DPU electrical/geometric parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeripheralParams {
    pub reduction_network: Component,
    pub activation_unit: Component,
    pub io_interface: Component,
    pub pooling_unit: Component,
    pub edram: Component,
    pub bus: CycleComponent,
    pub router: CycleComponent,
    pub dac: Component,
    pub adc_1gsps: Component,
    pub adc_5gsps: Component,
    pub adc_10gsps: Component,
    /// Electro-optic tuning: fast, low power; default weight-load mechanism.
    pub eo_tuning: TuningParams,
    /// Thermo-optic tuning: slow, high power; disabled by default.
    pub to_tuning: TuningParams,
    /// Uses TO instead of EO tuning for weight loads when true.
    pub use_to_tuning: bool,
    /// Clock for peripherals specified in cycles.
    pub clock_ghz: f64,
    /// Optical power emitted per laser diode, mW.
    pub laser_mw_per_wavelength: f64,
    /// Electrical-to-optical wall-plug efficiency of the laser.
    pub laser_wall_plug_eff: f64,
    /// Footprint of one microring including drive pads, mm^2.
    pub a_mrr_mm2: f64,
    /// Waveguide width incl. cladding pitch, mm.
    pub waveguide_width_mm: f64,
    /// Microring pitch along the waveguide, mm.
    pub mrr_pitch_mm: f64,
    /// SMWA per-channel waveguide routing overhead factor.
    pub smwa_routing_overhead: f64,
}

impl Default for PeripheralParams {
    fn default() -> Self {
        PeripheralParams {
            reduction_network: Component {
                power_mw: 0.050,
                latency_ns: 3.125,
                area_mm2: 3.0e-5,
            },
            activation_unit: Component {
                power_mw: 0.52,
                latency_ns: 0.78,
                area_mm2: 6.0e-5,
            },
            io_interface: Component {
                power_mw: 140.18,
                latency_ns: 0.78,
                area_mm2: 2.44e-2,
            },
            pooling_unit: Component {
                power_mw: 0.4,
                latency_ns: 3.125,
                area_mm2: 2.4e-4,
            },
            edram: Component {
                power_mw: 41.1,
                latency_ns: 1.56,
                area_mm2: 1.66e-1,
            },
            bus: CycleComponent {
                power_mw: 7.0,
                latency_cycles: 5,
                area_mm2: 9.0e-3,
            },
            router: CycleComponent {
                power_mw: 42.0,
                latency_cycles: 2,
                area_mm2: 1.5e-2,
            },
            dac: Component {
                power_mw: 12.5,
                latency_ns: 0.78,
                area_mm2: 2.5e-3,
            },
            adc_1gsps: Component {
                power_mw: 2.55,
                latency_ns: 0.78,
                area_mm2: 2.0e-3,
            },
            adc_5gsps: Component {
                power_mw: 11.0,
                latency_ns: 0.78,
                area_mm2: 21.0e-3,
            },
            adc_10gsps: Component {
                power_mw: 30.0,
                latency_ns: 0.78,
                area_mm2: 103.0e-3,
            },
            eo_tuning: TuningParams {
                power_mw: 0.08,
                latency_ns: 20.0,
            },
            to_tuning: TuningParams {
                power_mw: 275.0,
                latency_ns: 4000.0,
            },
            use_to_tuning: false,
            clock_ghz: 1.282,
            laser_mw_per_wavelength: 10.0,
            laser_wall_plug_eff: 0.2,
            a_mrr_mm2: 1.0e-4,
            waveguide_width_mm: 0.002,
            mrr_pitch_mm: 0.01,
            smwa_routing_overhead: 2.0,
        }
    }
}

impl PeripheralParams {
    /// ADC matched to the symbol rate. Rates above the fastest tabulated
    /// converter are rejected.
    pub fn adc(&self, datarate_gsps: f64) -> Result<Component> {
        if datarate_gsps <= 1.0 {
            Ok(self.adc_1gsps)
        } else if datarate_gsps <= 5.0 {
            Ok(self.adc_5gsps)
        } else if datarate_gsps <= 10.0 {
            Ok(self.adc_10gsps)
        } else {
            Err(Error::InvalidArgument(format!(
                "no ADC rated for {datarate_gsps} GS/s (max 10)"
            )))
        }
    }

    pub fn bus_latency_ns(&self) -> f64 {
        f64::from(self.bus.latency_cycles) / self.clock_ghz
    }

    pub fn router_latency_ns(&self) -> f64 {
        f64::from(self.router.latency_cycles) / self.clock_ghz
    }

    fn weight_tuning(&self) -> TuningParams {
        if self.use_to_tuning {
            self.to_tuning
        } else {
            self.eo_tuning
        }
    }
}

/// Energy breakdown components, in fixed report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum EnergyComponent {
    Laser,
    Adc,
    Dac,
    ReductionNetwork,
    WeightTuning,
    ActivationUnit,
    PoolingUnit,
    IoInterface,
    Edram,
    Bus,
    Router,
}

impl EnergyComponent {
    pub const ALL: [EnergyComponent; 11] = [
        EnergyComponent::Laser,
        EnergyComponent::Adc,
        EnergyComponent::Dac,
        EnergyComponent::ReductionNetwork,
        EnergyComponent::WeightTuning,
        EnergyComponent::ActivationUnit,
        EnergyComponent::PoolingUnit,
        EnergyComponent::IoInterface,
        EnergyComponent::Edram,
        EnergyComponent::Bus,
        EnergyComponent::Router,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            EnergyComponent::Laser => "laser",
            EnergyComponent::Adc => "adc",
            EnergyComponent::Dac => "dac",
            EnergyComponent::ReductionNetwork => "reduction_network",
            EnergyComponent::WeightTuning => "weight_tuning",
            EnergyComponent::ActivationUnit => "activation_unit",
            EnergyComponent::PoolingUnit => "pooling_unit",
            EnergyComponent::IoInterface => "io_interface",
            EnergyComponent::Edram => "edram",
            EnergyComponent::Bus => "bus",
            EnergyComponent::Router => "router",
        }
    }
}

/// Transaction counters accumulated by the event engine.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct SimCounters {
    pub symbol_cycles: u64,
    pub psum_reductions: u64,
    pub weight_loads: u64,
    pub edram_transactions: u64,
    pub events_processed: u64,
}

/// Simulation outcome for one (model, accelerator) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct SimReport {
    pub model: String,
    pub org: DpuOrganization,
    pub datarate_gsps: f64,
    pub n: u32,
    pub m: u32,
    pub dpu_count: u32,
    pub latency_s: f64,
    pub energy_j: f64,
    pub avg_power_w: f64,
    pub area_mm2: f64,
    pub fps: f64,
    pub fps_per_w: f64,
    pub fps_per_w_per_mm2: f64,
    /// Set when the model carries no GEMM work (zero compute latency).
    pub degenerate: bool,
    /// Per-component energy, joules; sums exactly to `energy_j`.
    pub breakdown: Vec<(EnergyComponent, f64)>,
    pub counters: SimCounters,
}

/// Microrings per DPU: ASMW has per-DPE modulator and weight arrays (2NM),
/// MASW shares one modulator array (N + NM), SMWA adds per-DPE multiplexer
/// rings (2NM + NM).
pub fn device_count(org: DpuOrganization, n: u32, m: u32) -> u64 {
    let n = u64::from(n);
    let m = u64::from(m);
    match org {
        DpuOrganization::Asmw => 2 * n * m,
        DpuOrganization::Masw => n + n * m,
        DpuOrganization::Smwa => 2 * n * m + n * m,
    }
}

/// Accelerator footprint, mm^2.
pub fn area_model(config: &AcceleratorConfig) -> f64 {
    let p = &config.peripherals;
    let photonic = device_count(config.org, config.n, config.m) as f64 * p.a_mrr_mm2
        + f64::from(config.m)
            * waveguide_length_mm(
                config.org,
                config.n,
                config.m,
                p.mrr_pitch_mm,
                p.smwa_routing_overhead,
            )
            * p.waveguide_width_mm;
    let adc = p
        .adc(config.datarate_gsps)
        .map(|a| a.area_mm2)
        .unwrap_or(p.adc_10gsps.area_mm2);
    let per_dpu = photonic + f64::from(config.m) * adc + f64::from(config.n) * p.dac.area_mm2;
    let per_tile = p.bus.area_mm2
        + p.router.area_mm2
        + p.pooling_unit.area_mm2
        + p.activation_unit.area_mm2
        + p.reduction_network.area_mm2;
    f64::from(config.dpu_count) * per_dpu
        + f64::from(config.tile_count()) * per_tile
        + p.io_interface.area_mm2
        + p.edram.area_mm2
}

/// Largest DPU count whose accelerator area stays within the reference
/// accelerator's area; 0 when even one DPU exceeds it.
pub fn area_proportionate_count(
    org: DpuOrganization,
    n: u32,
    datarate_gsps: f64,
    reference: &AcceleratorConfig,
) -> u32 {
    let ref_area = area_model(reference);
    let area_of = |count: u32| {
        let mut c = AcceleratorConfig::new(org, n, count.max(1), datarate_gsps);
        c.peripherals = reference.peripherals;
        area_model(&c)
    };
    if area_of(1) > ref_area {
        return 0;
    }
    let (mut lo, mut hi) = (1u32, 1u32);
    while area_of(hi) <= ref_area && hi < 1 << 24 {
        lo = hi;
        hi *= 2;
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if area_of(mid) <= ref_area {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Default area-matching reference: the SMWA design point (N = 83, 50 DPUs).
pub fn default_area_reference(datarate_gsps: f64) -> AcceleratorConfig {
    AcceleratorConfig::new(DpuOrganization::Smwa, 83, 50, datarate_gsps)
}

/// Area-matched DPU counts for several organizations against one reference.
/// An organization whose single-DPU accelerator already exceeds the
/// reference area is reported as 0 with a warning on stderr.
pub fn area_proportionate_counts(
    orgs_with_n: &[(DpuOrganization, u32)],
    datarate_gsps: f64,
    reference: &AcceleratorConfig,
) -> Vec<(DpuOrganization, u32)> {
    orgs_with_n
        .iter()
        .map(|&(org, n)| {
            let count = area_proportionate_count(org, n, datarate_gsps, reference);
            if count == 0 {
                eprintln!(
                    "warning: {org} N={n} exceeds the reference area even with one DPU"
                );
            }
            (org, count)
        })
        .collect()
}

const FS_PER_NS: f64 = 1e6;
const FS_PER_S: f64 = 1e15;

fn ns_to_fs(ns: f64) -> u64 {
    (ns * FS_PER_NS).round() as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[allow(clippy::enum_variant_names)] // kinds follow the transaction taxonomy
enum EventKind {
    BufferXferDone,
    WeightLoadDone,
    DpuPassDone,
    ReductionDone,
    LayerDone,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Event {
    time_fs: u64,
    seq: u64,
    kind: EventKind,
    layer: usize,
}

impl Ord for Event {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.time_fs, self.seq).cmp(&(other.time_fs, other.seq))
    }
}

impl PartialOrd for Event {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Precomputed phase durations for one planned layer.
struct LayerTiming {
    buf_in_fs: u64,
    weight_fs: u64,
    compute_fs: u64,
    /// Offset of reduction completion relative to compute start.
    reduction_end_fs: u64,
    buf_out_fs: u64,
}

struct Engine<'a> {
    queue: BinaryHeap<Reverse<Event>>,
    next_seq: u64,
    now_fs: u64,
    counters: SimCounters,
    energy_j: [f64; EnergyComponent::ALL.len()],
    items: &'a [PlanItem],
    timings: Vec<Option<LayerTiming>>,
    config: &'a AcceleratorConfig,
    adc: Component,
}

impl<'a> Engine<'a> {
    fn push(&mut self, time_fs: u64, kind: EventKind, layer: usize) {
        let e = Event {
            time_fs,
            seq: self.next_seq,
            kind,
            layer,
        };
        self.next_seq += 1;
        self.queue.push(Reverse(e));
    }

    fn accrue(&mut self, comp: EnergyComponent, joules: f64) {
        self.energy_j[comp as usize] += joules;
    }

    fn busy_energy_j(power_mw: f64, time_fs: u64) -> f64 {
        power_mw * 1e-3 * (time_fs as f64 / FS_PER_S)
    }

    fn start_layer(&mut self, idx: usize) {
        match &self.items[idx] {
            PlanItem::Gemm(_) => {
                let t = self.timings[idx].as_ref().unwrap();
                self.push(self.now_fs + t.buf_in_fs, EventKind::BufferXferDone, idx);
            }
            PlanItem::Pool { ops, .. } => {
                let p = self.config.peripherals.pooling_unit;
                let e = *ops as f64 * p.power_mw * 1e-3 * p.latency_ns * 1e-9;
                self.accrue(EnergyComponent::PoolingUnit, e);
                self.push(self.now_fs, EventKind::LayerDone, idx);
            }
            PlanItem::Activation { ops, .. } => {
                let a = self.config.peripherals.activation_unit;
                let e = *ops as f64 * a.power_mw * 1e-3 * a.latency_ns * 1e-9;
                self.accrue(EnergyComponent::ActivationUnit, e);
                self.push(self.now_fs, EventKind::LayerDone, idx);
            }
        }
    }

    fn handle(&mut self, ev: Event) {
        self.now_fs = ev.time_fs;
        self.counters.events_processed += 1;
        let idx = ev.layer;
        let plan: Option<&LayerPlan> = match &self.items[idx] {
            PlanItem::Gemm(p) => Some(p),
            _ => None,
        };
        match ev.kind {
            EventKind::BufferXferDone => {
                // One eDRAM read staged per tile's unified buffer.
                self.counters.edram_transactions += u64::from(self.config.tile_count());
                let t = self.timings[idx].as_ref().unwrap();
                let at = self.now_fs + t.weight_fs;
                self.push(at, EventKind::WeightLoadDone, idx);
            }
            EventKind::WeightLoadDone => {
                let plan = plan.unwrap();
                self.counters.weight_loads += plan.weight_load_events;
                let p = &self.config.peripherals;
                let tuning = p.weight_tuning();
                // Every DPE reprograms its N weight rings each load round.
                let rings = plan.weight_load_events
                    * self.config.dpe_count()
                    * u64::from(self.config.n);
                self.accrue(
                    EnergyComponent::WeightTuning,
                    rings as f64 * tuning.power_mw * 1e-3 * tuning.latency_ns * 1e-9,
                );
                let t = self.timings[idx].as_ref().unwrap();
                let (compute_fs, reduction_end_fs) = (t.compute_fs, t.reduction_end_fs);
                self.push(self.now_fs + compute_fs, EventKind::DpuPassDone, idx);
                self.push(self.now_fs + reduction_end_fs, EventKind::ReductionDone, idx);
            }
            EventKind::DpuPassDone => {
                let plan = plan.unwrap();
                self.counters.symbol_cycles += plan.symbol_cycles;
                let compute_fs = self.timings[idx].as_ref().unwrap().compute_fs;
                // Converters are busy for the whole compute phase.
                let dpes = self.config.dpe_count() as f64;
                self.accrue(
                    EnergyComponent::Adc,
                    dpes * Self::busy_energy_j(self.adc.power_mw, compute_fs),
                );
                let dacs = f64::from(self.config.n) * f64::from(self.config.dpu_count);
                let dac_mw = self.config.peripherals.dac.power_mw;
                self.accrue(
                    EnergyComponent::Dac,
                    dacs * Self::busy_energy_j(dac_mw, compute_fs),
                );
            }
            EventKind::ReductionDone => {
                let plan = plan.unwrap();
                self.counters.psum_reductions += plan.psum_reductions;
                let r = self.config.peripherals.reduction_network;
                self.accrue(
                    EnergyComponent::ReductionNetwork,
                    plan.psum_reductions as f64 * r.power_mw * 1e-3 * r.latency_ns * 1e-9,
                );
                let t = self.timings[idx].as_ref().unwrap();
                self.push(self.now_fs + t.buf_out_fs, EventKind::LayerDone, idx);
            }
            EventKind::LayerDone => {
                if plan.is_some() {
                    // One eDRAM write-back per tile.
                    self.counters.edram_transactions += u64::from(self.config.tile_count());
                }
                let next = idx + 1;
                if next < self.items.len() {
                    self.start_layer(next);
                }
            }
        }
    }
}

/// Executes the model's layer plans on the configured accelerator.
pub fn run_inference(model: &CnnModel, config: &AcceleratorConfig) -> Result<SimReport> {
    config.validate()?;
    let items = plan_model(model, config)?;
    run_plans(&model.name, &items, config)
}

/// Executes pre-built plans (exposed so reports can be cross-checked against
/// the mapper's numbers).
pub fn run_plans(
    model_name: &str,
    items: &[PlanItem],
    config: &AcceleratorConfig,
) -> Result<SimReport> {
    config.validate()?;
    let p = &config.peripherals;
    let adc = p.adc(config.datarate_gsps)?;
    // Symbol period 1/DR ns, in femtoseconds.
    let cycle_fs = ns_to_fs(1.0 / config.datarate_gsps);
    let red_fs = ns_to_fs(p.reduction_network.latency_ns);
    let buf_fs = ns_to_fs(p.edram.latency_ns + p.bus_latency_ns() + p.router_latency_ns());
    let tuning_fs = ns_to_fs(p.weight_tuning().latency_ns);
    let dpes = config.dpe_count();
    let tiles = u64::from(config.tile_count());

    let timings: Vec<Option<LayerTiming>> = items
        .iter()
        .map(|item| match item {
            PlanItem::Gemm(plan) => {
                let compute_fs = plan.symbol_cycles * cycle_fs;
                let reduction_end_fs = if config.pipelined_reduction {
                    // Per-DPE accumulate lanes drain the psum stream
                    // concurrently with compute.
                    let red = plan.psum_reductions.div_ceil(dpes) * red_fs;
                    compute_fs.max(red)
                } else {
                    // All psums serialize through the tile networks after
                    // the layer's passes complete.
                    compute_fs + plan.psum_reductions.div_ceil(tiles) * red_fs
                };
                Some(LayerTiming {
                    buf_in_fs: buf_fs,
                    weight_fs: plan.weight_load_events * tuning_fs,
                    compute_fs,
                    reduction_end_fs,
                    buf_out_fs: buf_fs,
                })
            }
            _ => None,
        })
        .collect();

    let mut engine = Engine {
        queue: BinaryHeap::new(),
        next_seq: 0,
        now_fs: 0,
        counters: SimCounters::default(),
        energy_j: [0.0; EnergyComponent::ALL.len()],
        items,
        timings,
        config,
        adc,
    };

    let has_gemm = items.iter().any(|i| matches!(i, PlanItem::Gemm(_)));
    if !items.is_empty() {
        engine.start_layer(0);
    }
    while let Some(Reverse(ev)) = engine.queue.pop() {
        engine.handle(ev);
    }

    let latency_s = engine.now_fs as f64 / FS_PER_S;
    // Always-on draws accrue for the full inference.
    let laser_mw = p.laser_mw_per_wavelength / p.laser_wall_plug_eff
        * f64::from(config.n)
        * f64::from(config.dpu_count);
    let static_pairs = [
        (EnergyComponent::Laser, laser_mw),
        (EnergyComponent::IoInterface, p.io_interface.power_mw),
        (EnergyComponent::Edram, p.edram.power_mw),
        (EnergyComponent::Bus, p.bus.power_mw * tiles as f64),
        (EnergyComponent::Router, p.router.power_mw * tiles as f64),
    ];
    for (comp, mw) in static_pairs {
        engine.energy_j[comp as usize] += mw * 1e-3 * latency_s;
    }

    let breakdown: Vec<(EnergyComponent, f64)> = EnergyComponent::ALL
        .iter()
        .map(|&c| (c, engine.energy_j[c as usize]))
        .collect();
    let energy_j: f64 = breakdown.iter().map(|(_, e)| e).sum();
    let degenerate = !has_gemm;
    let avg_power_w = if latency_s > 0.0 {
        energy_j / latency_s
    } else {
        0.0
    };
    let area_mm2 = area_model(config);
    let fps = 1.0 / latency_s;
    let fps_per_w = fps / avg_power_w;
    let fps_per_w_per_mm2 = fps_per_w / area_mm2;

    let report = SimReport {
        model: model_name.to_string(),
        org: config.org,
        datarate_gsps: config.datarate_gsps,
        n: config.n,
        m: config.m,
        dpu_count: config.dpu_count,
        latency_s,
        energy_j,
        avg_power_w,
        area_mm2,
        fps,
        fps_per_w,
        fps_per_w_per_mm2,
        degenerate,
        breakdown,
        counters: engine.counters,
    };
    check_report(&report)?;
    Ok(report)
}

fn check_report(r: &SimReport) -> Result<()> {
    let sum: f64 = r.breakdown.iter().map(|(_, e)| e).sum();
    if r.energy_j > 0.0 && ((sum - r.energy_j) / r.energy_j).abs() > 1e-9 {
        return Err(Error::Internal(format!(
            "energy breakdown {sum} J does not sum to total {} J",
            r.energy_j
        )));
    }
    if r.latency_s < 0.0 || r.energy_j < 0.0 || r.area_mm2 < 0.0 {
        return Err(Error::Internal("negative report quantity".into()));
    }
    Ok(())
}

/// How DPU counts are chosen for a comparison sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountsMode {
    /// Published table values (N and DPU count) verbatim.
    Paper,
    /// N solved from the link budget at 4-bit precision, DPU count matched
    /// to the reference accelerator's area.
    AreaProportionate,
}

/// One comparison cell with metrics normalized to the baseline cell.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub report: SimReport,
    pub norm_fps: f64,
    pub norm_fps_per_w: f64,
    pub norm_fps_per_w_per_mm2: f64,
}

/// Geometric means of the normalized metrics across models.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmeanRow {
    pub org: DpuOrganization,
    pub datarate_gsps: f64,
    pub gmean_fps: f64,
    pub gmean_fps_per_w: f64,
    pub gmean_fps_per_w_per_mm2: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub rows: Vec<CompareRow>,
    pub gmeans: Vec<GmeanRow>,
}

/// Baseline cell for normalization: ASMW running ResNet50 at 10 GS/s.
pub const BASELINE_MODEL: &str = "resnet50";
pub const BASELINE_DR_GSPS: f64 = 10.0;

/// Resolves the accelerator configuration for one comparison cell.
pub fn cell_config(
    org: DpuOrganization,
    datarate_gsps: f64,
    mode: CountsMode,
    params: &ParamSet,
) -> Result<AcceleratorConfig> {
    match mode {
        CountsMode::Paper => AcceleratorConfig::paper(org, datarate_gsps),
        CountsMode::AreaProportionate => {
            let solved = max_n(
                &ScalabilityQuery {
                    bit_precision: 4,
                    datarate_gsps,
                    org,
                },
                params,
            )?;
            if solved.n_max == 0 {
                return Err(Error::Config(format!(
                    "{org} supports no DPE at 4 bits and {datarate_gsps} GS/s"
                )));
            }
            let reference = default_area_reference(datarate_gsps);
            let count = area_proportionate_count(org, solved.n_max, datarate_gsps, &reference);
            if count == 0 {
                return Err(Error::Config(format!(
                    "{org} exceeds the reference area even with one DPU"
                )));
            }
            Ok(AcceleratorConfig::new(
                org,
                solved.n_max,
                count,
                datarate_gsps,
            ))
        }
    }
}

/// Simulates every (model, org, DR) cell and normalizes to the
/// ASMW/ResNet50/10 GS/s cell, adding per-(org, DR) geometric means across
/// models. Cells are independent and evaluated with up to `threads` workers;
/// row order is fixed by the argument order regardless of scheduling.
pub fn compare_accelerators(
    models: &[CnnModel],
    orgs: &[DpuOrganization],
    dr_list: &[f64],
    mode: CountsMode,
    params: &ParamSet,
    threads: usize,
) -> Result<CompareReport> {
    if !models
        .iter()
        .any(|m| m.name.eq_ignore_ascii_case(BASELINE_MODEL))
    {
        return Err(Error::Config(format!(
            "comparison baseline requires a model named '{BASELINE_MODEL}'"
        )));
    }
    if !orgs.contains(&DpuOrganization::Asmw) || !dr_list.contains(&BASELINE_DR_GSPS) {
        return Err(Error::Config(format!(
            "comparison baseline requires org asmw and {BASELINE_DR_GSPS} GS/s in the sweep"
        )));
    }

    let mut cells = Vec::new();
    for model in models {
        for &org in orgs {
            for &dr in dr_list {
                cells.push((model, org, dr));
            }
        }
    }

    let reports = parallel_map(&cells, threads, |&(model, org, dr)| {
        let config = cell_config(org, dr, mode, params)?;
        run_inference(model, &config)
    })?;

    let baseline = reports
        .iter()
        .find(|r| {
            r.model.eq_ignore_ascii_case(BASELINE_MODEL)
                && r.org == DpuOrganization::Asmw
                && r.datarate_gsps == BASELINE_DR_GSPS
        })
        .ok_or_else(|| Error::Config("baseline cell missing from sweep".into()))?
        .clone();

    let rows: Vec<CompareRow> = reports
        .into_iter()
        .map(|report| CompareRow {
            norm_fps: report.fps / baseline.fps,
            norm_fps_per_w: report.fps_per_w / baseline.fps_per_w,
            norm_fps_per_w_per_mm2: report.fps_per_w_per_mm2 / baseline.fps_per_w_per_mm2,
            report,
        })
        .collect();

    let mut gmeans = Vec::new();
    for &org in orgs {
        for &dr in dr_list {
            let cells: Vec<&CompareRow> = rows
                .iter()
                .filter(|r| r.report.org == org && r.report.datarate_gsps == dr)
                .collect();
            let g = |f: &dyn Fn(&CompareRow) -> f64| {
                let log_sum: f64 = cells.iter().map(|c| f(c).ln()).sum();
                (log_sum / cells.len() as f64).exp()
            };
            gmeans.push(GmeanRow {
                org,
                datarate_gsps: dr,
                gmean_fps: g(&|c| c.norm_fps),
                gmean_fps_per_w: g(&|c| c.norm_fps_per_w),
                gmean_fps_per_w_per_mm2: g(&|c| c.norm_fps_per_w_per_mm2),
            });
        }
    }

    Ok(CompareReport { rows, gmeans })
}

/// Thread cap for sweeps from `PHOTONIC_DSE_THREADS`, defaulting to the
/// machine's parallelism.
pub fn sweep_threads() -> usize {
    std::env::var("PHOTONIC_DSE_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&t| t >= 1)
        .unwrap_or_else(|| {
            std::thread::available_parallelism()
                .map(|n| n.get())
                .unwrap_or(1)
        })
}

/// Order-preserving map over independent items with bounded parallelism.
fn parallel_map<T: Sync, R: Send>(
    items: &[T],
    threads: usize,
    f: impl Fn(&T) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    let threads = threads.clamp(1, items.len().max(1));
    if threads == 1 {
        return items.iter().map(&f).collect();
    }
    let mut results: Vec<Option<Result<R>>> = Vec::with_capacity(items.len());
    results.resize_with(items.len(), || None);
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|scope| {
        for (item_chunk, result_chunk) in items.chunks(chunk).zip(results.chunks_mut(chunk)) {
            scope.spawn(|| {
                for (item, slot) in item_chunk.iter().zip(result_chunk.iter_mut()) {
                    *slot = Some(f(item));
                }
            });
        }
    });
    results
        .into_iter()
        .map(|r| r.expect("worker filled every slot"))
        .collect()
}
