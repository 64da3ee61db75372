//! CSV emission for every command output, plus atomic file writing.
//!
//! All floats are emitted with 9 significant digits so reports are
//! reproducible byte-for-byte across runs.

use std::path::Path;

use crate::device_models::{crosstalk_profile, loss_profile, DpuOrganization};
use crate::error::Result;
use crate::link_budget::ScalabilityResult;
use crate::mapper::{LayerPlan, PlanItem};
use crate::params::ParamSet;
use crate::simulator::{CompareReport, SimReport};

/// Formats with 9 significant digits (scientific form keeps it stable across
/// magnitudes).
pub fn fmt_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{x:.8e}")
}

pub const SCALABILITY_HEADER: &str = "org,datarate_gsps,bit_precision,p_pd_opt_dbm,n_max,fsr_capped";

pub fn scalability_csv(rows: &[ScalabilityResult]) -> String {
    let mut out = String::from(SCALABILITY_HEADER);
    out.push('\n');
    for r in rows {
        let p = r.p_pd_opt_dbm.map(fmt_sig9).unwrap_or_default();
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            r.org.name().to_ascii_lowercase(),
            fmt_sig9(r.datarate_gsps),
            r.bit_precision,
            p,
            r.n_max,
            r.fsr_capped,
        ));
    }
    out
}

pub const PENALTY_HEADER: &str = "org,n,m,inter_modulation,cross_weight,filter_truncation,\
through_loss_db,propagation_loss_db,network_penalty_db,total_db";

/// Per-organization crosstalk flags and dB losses at a given DPE size.
pub fn penalty_csv(n: u32, m: u32, params: &ParamSet) -> Result<String> {
    let mut out = String::from(PENALTY_HEADER);
    out.push('\n');
    for org in DpuOrganization::ALL {
        let x = crosstalk_profile(org);
        let l = loss_profile(
            org,
            n,
            m,
            params.link.p_mrm_obl_db,
            params.link.d_mrr_mm,
            params.link.p_si_att_db_per_mm,
            &params.penalties,
        )?;
        let total = l.through_loss_db + l.propagation_loss_db + l.network_penalty_db;
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{}\n",
            org.name().to_ascii_lowercase(),
            n,
            m,
            x.inter_modulation,
            x.cross_weight,
            x.filter_truncation,
            fmt_sig9(l.through_loss_db),
            fmt_sig9(l.propagation_loss_db),
            fmt_sig9(l.network_penalty_db),
            fmt_sig9(total),
        ));
    }
    Ok(out)
}

pub const PLAN_HEADER: &str = "layer,rows,k,cols,chunks_per_output,slice_passes,\
dpe_dotproducts,symbol_cycles,psum_reductions,weight_loads";

pub fn plan_csv(items: &[PlanItem]) -> String {
    let mut out = String::from(PLAN_HEADER);
    out.push('\n');
    for item in items {
        match item {
            PlanItem::Gemm(p) => out.push_str(&plan_row(p)),
            PlanItem::Pool { name, ops } | PlanItem::Activation { name, ops } => {
                out.push_str(&format!("{name},0,0,0,0,0,{ops},0,0,0\n"));
            }
        }
    }
    out
}

fn plan_row(p: &LayerPlan) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{}\n",
        p.name,
        p.gemm.rows,
        p.gemm.k,
        p.gemm.cols * p.instances,
        p.chunks_per_output,
        p.slice_passes,
        p.total_dpe_dotproducts,
        p.symbol_cycles,
        p.psum_reductions,
        p.weight_load_events,
    )
}

pub const REPORT_HEADER: &str = "model,org,datarate_gsps,n,m,dpu_count,latency_s,energy_j,\
avg_power_w,area_mm2,fps,fps_per_w,fps_per_w_per_mm2";

fn report_row(r: &SimReport) -> String {
    format!(
        "{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
        r.model,
        r.org.name().to_ascii_lowercase(),
        fmt_sig9(r.datarate_gsps),
        r.n,
        r.m,
        r.dpu_count,
        fmt_sig9(r.latency_s),
        fmt_sig9(r.energy_j),
        fmt_sig9(r.avg_power_w),
        fmt_sig9(r.area_mm2),
        fmt_sig9(r.fps),
        fmt_sig9(r.fps_per_w),
        fmt_sig9(r.fps_per_w_per_mm2),
    )
}

pub fn simulate_csv(reports: &[SimReport]) -> String {
    let mut out = String::from(REPORT_HEADER);
    out.push('\n');
    for r in reports {
        out.push_str(&report_row(r));
    }
    out
}

pub const BREAKDOWN_HEADER: &str = "model,org,datarate_gsps,component,energy_j";

pub fn breakdown_csv(reports: &[SimReport]) -> String {
    let mut out = String::from(BREAKDOWN_HEADER);
    out.push('\n');
    for r in reports {
        for (comp, e) in &r.breakdown {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                r.model,
                r.org.name().to_ascii_lowercase(),
                fmt_sig9(r.datarate_gsps),
                comp.name(),
                fmt_sig9(*e),
            ));
        }
    }
    out
}

pub const COMPARE_HEADER: &str = "model,org,datarate_gsps,n,m,dpu_count,latency_s,energy_j,\
avg_power_w,area_mm2,fps,fps_per_w,fps_per_w_per_mm2,norm_fps,norm_fps_per_w,norm_fps_per_w_per_mm2";

/// Absolute rows with normalized columns, followed by per-(org, DR) gmean
/// rows labeled `gmean`.
pub fn compare_csv(report: &CompareReport) -> String {
    let mut out = String::from(COMPARE_HEADER);
    out.push('\n');
    for row in &report.rows {
        let mut line = report_row(&row.report);
        line.pop();
        out.push_str(&format!(
            "{line},{},{},{}\n",
            fmt_sig9(row.norm_fps),
            fmt_sig9(row.norm_fps_per_w),
            fmt_sig9(row.norm_fps_per_w_per_mm2),
        ));
    }
    for g in &report.gmeans {
        out.push_str(&format!(
            "gmean,{},{},,,,,,,,,,,{},{},{}\n",
            g.org.name().to_ascii_lowercase(),
            fmt_sig9(g.datarate_gsps),
            fmt_sig9(g.gmean_fps),
            fmt_sig9(g.gmean_fps_per_w),
            fmt_sig9(g.gmean_fps_per_w_per_mm2),
        ));
    }
    out
}

/// Writes via a temp file in the same directory plus rename, so readers
/// never observe a partial file.
pub fn write_atomic(path: &Path, content: &str) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let tmp = match dir {
        Some(d) => d.join(format!(
            ".{}.tmp-{}",
            path.file_name().unwrap_or_default().to_string_lossy(),
            std::process::id()
        )),
        None => std::path::PathBuf::from(format!(".photonic-dse.tmp-{}", std::process::id())),
    };
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sig9_formatting() {
        assert_eq!(fmt_sig9(0.0), "0");
        assert_eq!(fmt_sig9(1.0), "1.00000000e0");
        assert_eq!(fmt_sig9(-17.9808769785), "-1.79808770e1");
        assert_eq!(fmt_sig9(f64::INFINITY), "inf");
    }

    #[test]
    fn atomic_write_round_trip() {
        let dir = std::env::temp_dir().join(format!("pdse-test-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("out.csv");
        write_atomic(&path, "a,b\n1,2\n").unwrap();
        assert_eq!(std::fs::read_to_string(&path).unwrap(), "a,b\n1,2\n");
        std::fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn penalty_rows_cover_all_orgs() {
        let csv = penalty_csv(36, 36, &ParamSet::default()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 4);
        assert!(lines[1].starts_with("asmw,36,36,true,true,false"));
        // ASMW through loss at N=36 with 0.01 dB OBL.
        assert!(lines[1].contains(",7.00000000e-1,"));
        assert!(lines[3].starts_with("smwa,36,36,false,false,true"));
    }
}
