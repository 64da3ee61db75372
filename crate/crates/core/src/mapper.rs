//! Tiles GEMMs onto the accelerator's DPEs under output-stationary dataflow
//! and produces the pass/psum/reduction schedule the simulator executes.
//!
//! Each output element is assigned round-robin to a DPE, which computes that
//! output's `ceil(k/N)` chunk dot products over consecutive symbol cycles
//! (times the bit-slice passes); the partial results are merged by the
//! electronic reduction network. Chunks shorter than N are zero padded.

use crate::device_models::DpuOrganization;
use crate::error::{Error, Result};
use crate::simulator::PeripheralParams;
use crate::workload::{
    bit_slices, conv_to_gemm, fc_to_gemm, CnnModel, GemmShape, LayerKind, SliceFactor,
};

/// Published (N, DPU count) operating point for an organization at 4-bit
/// precision and a tabulated data rate.
pub fn paper_dpu_config(
    org: DpuOrganization,
    datarate_gsps: f64,
) -> Option<(u32, u32)> {
    use DpuOrganization::*;
    let pick = |a, m, s| match org {
        Asmw => a,
        Masw => m,
        Smwa => s,
    };
    if datarate_gsps == 1.0 {
        Some(pick((36, 160), (43, 186), (83, 50)))
    } else if datarate_gsps == 5.0 {
        Some(pick((17, 265), (21, 275), (42, 147)))
    } else if datarate_gsps == 10.0 {
        Some(pick((12, 291), (15, 295), (30, 198)))
    } else {
        None
    }
}

/// The accelerator instance a model is mapped onto.
#[derive(Debug, Clone, PartialEq)]
pub struct AcceleratorConfig {
    pub org: DpuOrganization,
    /// DPE size (dot-product fan-in).
    pub n: u32,
    /// DPEs per DPU (fan-out); the published design points use M = N.
    pub m: u32,
    pub dpu_count: u32,
    pub dpus_per_tile: u32,
    pub datarate_gsps: f64,
    /// Analog operand precision the DPEs run at.
    pub hw_bits: u32,
    pub peripherals: PeripheralParams,
    /// Reduction overlaps compute when true (pipelined tree); otherwise
    /// reductions serialize after the layer's passes through the tile
    /// network.
    pub pipelined_reduction: bool,
}

impl AcceleratorConfig {
    pub fn new(
        org: DpuOrganization,
        n: u32,
        dpu_count: u32,
        datarate_gsps: f64,
    ) -> Self {
        AcceleratorConfig {
            org,
            n,
            m: n,
            dpu_count,
            dpus_per_tile: 4,
            datarate_gsps,
            hw_bits: 4,
            peripherals: PeripheralParams::default(),
            pipelined_reduction: true,
        }
    }

    /// Config at the published operating point for `org` at `datarate_gsps`.
    pub fn paper(
        org: DpuOrganization,
        datarate_gsps: f64,
    ) -> Result<Self> {
        let (n, count) = paper_dpu_config(org, datarate_gsps).ok_or_else(|| {
            Error::Config(format!(
                "no published DPU table entry for {org} at {datarate_gsps} GS/s"
            ))
        })?;
        Ok(AcceleratorConfig::new(org, n, count, datarate_gsps))
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 1 || self.m < 1 || self.dpu_count < 1 || self.dpus_per_tile < 1 {
            return Err(Error::InvalidArgument(
                "n, m, dpu_count and dpus_per_tile must be >= 1".into(),
            ));
        }
        if !self.datarate_gsps.is_finite() || self.datarate_gsps <= 0.0 {
            return Err(Error::InvalidArgument("datarate must be > 0".into()));
        }
        if self.hw_bits < 1 {
            return Err(Error::InvalidArgument("hw_bits must be >= 1".into()));
        }
        Ok(())
    }

    pub fn tile_count(&self) -> u32 {
        self.dpu_count.div_ceil(self.dpus_per_tile)
    }

    pub fn dpe_count(&self) -> u64 {
        u64::from(self.m) * u64::from(self.dpu_count)
    }
}

/// Schedule for one GEMM-bearing layer.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerPlan {
    pub name: String,
    pub gemm: GemmShape,
    /// Identical GEMM instances (conv groups).
    pub instances: u64,
    pub chunks_per_output: u64,
    pub slice_passes: u64,
    pub total_dpe_dotproducts: u64,
    pub psum_reductions: u64,
    pub weight_load_events: u64,
    pub symbol_cycles: u64,
}

impl LayerPlan {
    pub fn psum_values_per_output(&self) -> u64 {
        self.chunks_per_output * self.slice_passes
    }
}

/// Plan one GEMM under the given slicing on the given accelerator.
pub fn plan_layer(
    gemm: &GemmShape,
    slices: &SliceFactor,
    config: &AcceleratorConfig,
) -> LayerPlan {
    plan_layer_group("gemm", gemm, 1, slices, config)
}

/// Like [`plan_layer`] but for `instances` identical GEMMs (conv groups)
/// planned as one unit so rounding happens on aggregate totals.
pub fn plan_layer_group(
    name: &str,
    gemm: &GemmShape,
    instances: u64,
    slices: &SliceFactor,
    config: &AcceleratorConfig,
) -> LayerPlan {
    let n = u64::from(config.n);
    let dpes = config.dpe_count();
    let chunks = gemm.k.div_ceil(n);
    let passes = u64::from(slices.passes);
    let outputs = gemm.rows * gemm.cols * instances;
    let total = chunks * outputs * passes;
    let psum_values = chunks * passes;
    let psum_reductions = outputs * (psum_values - 1);
    let weight_blocks = gemm.cols * chunks * u64::from(slices.weight_slices) * instances;
    LayerPlan {
        name: name.to_string(),
        gemm: *gemm,
        instances,
        chunks_per_output: chunks,
        slice_passes: passes,
        total_dpe_dotproducts: total,
        psum_reductions,
        weight_load_events: weight_blocks.div_ceil(dpes),
        symbol_cycles: total.div_ceil(dpes),
    }
}

/// A planned model item: GEMM work or a peripheral record.
#[derive(Debug, Clone, PartialEq)]
pub enum PlanItem {
    Gemm(LayerPlan),
    /// Pooling windows to evaluate.
    Pool { name: String, ops: u64 },
    /// Values passed through the activation unit.
    Activation { name: String, ops: u64 },
}

/// Plan every layer of a model, in model order. Pool/activation layers emit
/// unit-count records for the simulator's energy accounting.
pub fn plan_model(model: &CnnModel, config: &AcceleratorConfig) -> Result<Vec<PlanItem>> {
    config.validate()?;
    let slices = bit_slices(model.model_bits, config.hw_bits);
    let mut items = Vec::with_capacity(model.layers.len());
    for layer in &model.layers {
        match layer.kind {
            LayerKind::Conv => {
                let gemm = conv_to_gemm(layer)?;
                items.push(PlanItem::Gemm(plan_layer_group(
                    &layer.name,
                    &gemm,
                    layer.gemm_instances(),
                    &slices,
                    config,
                )));
            }
            LayerKind::Fc => {
                let gemm = fc_to_gemm(layer)?;
                items.push(PlanItem::Gemm(plan_layer_group(
                    &layer.name,
                    &gemm,
                    1,
                    &slices,
                    config,
                )));
            }
            LayerKind::Pool => {
                let (c, h, w) = layer.out_shape()?;
                items.push(PlanItem::Pool {
                    name: layer.name.clone(),
                    ops: u64::from(c) * u64::from(h) * u64::from(w),
                });
            }
            LayerKind::Activation => {
                let (c, h, w) = layer.out_shape()?;
                items.push(PlanItem::Activation {
                    name: layer.name.clone(),
                    ops: u64::from(c) * u64::from(h) * u64::from(w),
                });
            }
        }
    }
    Ok(items)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::device_models::DpuOrganization::*;

    fn cfg(n: u32, dpus: u32) -> AcceleratorConfig {
        AcceleratorConfig::new(Smwa, n, dpus, 1.0)
    }

    fn unsliced() -> SliceFactor {
        bit_slices(4, 4)
    }

    #[test]
    fn hand_enumerated_plan() {
        let plan = plan_layer(
            &GemmShape {
                rows: 4,
                k: 8,
                cols: 4,
            },
            &unsliced(),
            &cfg(4, 1),
        );
        assert_eq!(plan.chunks_per_output, 2);
        assert_eq!(plan.total_dpe_dotproducts, 32);
        assert_eq!(plan.symbol_cycles, 8);
        assert_eq!(plan.psum_reductions, 16);
    }

    #[test]
    fn single_chunk_has_no_psums() {
        let plan = plan_layer(
            &GemmShape {
                rows: 1,
                k: 4,
                cols: 1,
            },
            &unsliced(),
            &cfg(4, 1),
        );
        assert_eq!(plan.chunks_per_output, 1);
        assert_eq!(plan.psum_reductions, 0);
    }

    #[test]
    fn slicing_multiplies_work() {
        let gemm = GemmShape {
            rows: 6,
            k: 20,
            cols: 3,
        };
        let base = plan_layer(&gemm, &unsliced(), &cfg(8, 2));
        let sliced = plan_layer(&gemm, &bit_slices(8, 4), &cfg(8, 2));
        assert_eq!(
            sliced.total_dpe_dotproducts,
            4 * base.total_dpe_dotproducts
        );
    }

    #[test]
    fn paper_table_lookup() {
        assert_eq!(paper_dpu_config(Asmw, 1.0), Some((36, 160)));
        assert_eq!(paper_dpu_config(Smwa, 10.0), Some((30, 198)));
        assert_eq!(paper_dpu_config(Smwa, 2.0), None);
        let c = AcceleratorConfig::paper(Masw, 5.0).unwrap();
        assert_eq!((c.n, c.m, c.dpu_count), (21, 21, 275));
        assert_eq!(c.tile_count(), 69);
    }

    #[test]
    fn plan_model_composition() {
        let model = CnnModel {
            name: "t".into(),
            layers: vec![],
            model_bits: 8,
        };
        assert!(plan_model(&model, &cfg(4, 1)).unwrap().is_empty());

        let text = "name,kind,in_c,in_h,in_w,out_c,kernel_h,kernel_w,stride,padding,groups\n\
                    c1,conv,16,8,8,32,1,1,1,0,1\n";
        let model = crate::workload::load_model_named(text, "<t>", "t".into()).unwrap();
        let mut cfg4 = cfg(4, 1);
        cfg4.hw_bits = 8;
        let items = plan_model(&model, &cfg4).unwrap();
        assert_eq!(items.len(), 1);
        match &items[0] {
            PlanItem::Gemm(p) => {
                assert_eq!(p.gemm.rows, 64);
                assert_eq!(p.chunks_per_output, 4);
                assert_eq!(p.total_dpe_dotproducts, 64 * 32 * 4);
            }
            other => panic!("unexpected item {other:?}"),
        }
    }

    proptest::proptest! {
        /// Work conservation: padded DPE work covers the sliced MACs with
        /// overshoot bounded by last-chunk padding.
        #[test]
        fn work_conservation(
            rows in 1u64..64, k in 1u64..512, cols in 1u64..64,
            n in 1u32..128, dpus in 1u32..64,
        ) {
            let gemm = GemmShape { rows, k, cols };
            let slices = bit_slices(8, 4);
            let plan = plan_layer(&gemm, &slices, &cfg(n, dpus));
            let sliced_macs = gemm.macs() * u64::from(slices.passes);
            let covered = plan.total_dpe_dotproducts * u64::from(n);
            proptest::prop_assert!(covered >= sliced_macs);
            let bound = rows * cols * u64::from(slices.passes) * u64::from(n);
            proptest::prop_assert!(covered - sliced_macs < bound);
            // No DPE over-subscription.
            proptest::prop_assert!(
                plan.symbol_cycles * plan_cfg_dpes(n, dpus) >= plan.total_dpe_dotproducts
            );
            // psum accounting.
            if k <= u64::from(n) && slices.passes == 1 {
                proptest::prop_assert_eq!(plan.psum_reductions, 0);
            }
        }

        /// Growing the DPE never increases chunking or psum traffic.
        #[test]
        fn monotone_in_n(rows in 1u64..32, k in 1u64..512, cols in 1u64..32, n in 1u32..255) {
            let gemm = GemmShape { rows, k, cols };
            let slices = bit_slices(8, 4);
            let small = plan_layer(&gemm, &slices, &cfg(n, 4));
            let large = plan_layer(&gemm, &slices, &cfg(n + 1, 4));
            proptest::prop_assert!(large.chunks_per_output <= small.chunks_per_output);
            proptest::prop_assert!(large.psum_reductions <= small.psum_reductions);
        }
    }

    fn plan_cfg_dpes(n: u32, dpus: u32) -> u64 {
        u64::from(n) * u64::from(dpus)
    }
}
