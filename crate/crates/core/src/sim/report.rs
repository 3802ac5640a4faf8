//! Deterministic output rendering: the per-TTI CSV and the summary
//! documents. All reals print with 6 decimal places, round-half-even, so
//! identical runs produce byte-identical files on every platform.

use crate::metrics::TtiRecord;

use super::runner::{ComparisonRow, RunSummary, SweepRow, WarmstartReport};

/// Fixed 6-decimal rendering with round-half-even at the last digit.
pub fn format_real6(x: f64) -> String {
    debug_assert!(x.is_finite(), "CSV reals must be finite");
    let scaled = (x.abs() * 1e6).round_ties_even() as i128;
    let sign = if x < 0.0 && scaled != 0 { "-" } else { "" };
    format!("{sign}{}.{:06}", scaled / 1_000_000, scaled % 1_000_000)
}

fn opt_real6(x: Option<f64>) -> String {
    x.map(format_real6).unwrap_or_default()
}

fn opt_usize(x: Option<usize>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

/// Column order is fixed: tti, scheduler, w1, w2, cluster,
/// generations_used, combined_fitness, then per-UE achieved bits.
pub fn csv_header(ues: usize) -> String {
    let mut cols = vec![
        "tti".to_string(),
        "scheduler".to_string(),
        "w1".to_string(),
        "w2".to_string(),
        "cluster".to_string(),
        "generations_used".to_string(),
        "combined_fitness".to_string(),
    ];
    cols.extend((0..ues).map(|m| format!("ue_{m}")));
    cols.join(",")
}

pub fn csv_row(record: &TtiRecord) -> String {
    let mut cols = vec![
        record.tti.to_string(),
        record.scheduler.name().to_string(),
        format_real6(record.weights.w1()),
        format_real6(record.weights.w2()),
        opt_usize(record.cluster),
        opt_usize(record.generations_used),
        opt_real6(record.combined_fitness),
    ];
    cols.extend(record.per_ue_bits.iter().map(|&b| format_real6(b)));
    cols.join(",")
}

pub fn render_csv(records: &[TtiRecord], ues: usize) -> String {
    let mut out = String::new();
    out.push_str(&csv_header(ues));
    out.push('\n');
    for r in records {
        out.push_str(&csv_row(r));
        out.push('\n');
    }
    out
}

fn summary_row(s: &RunSummary) -> String {
    format!(
        "{}\tpeak={}\taverage={}\tedge={}\tjain={}\tsatisfaction={}\tmean_generations={}",
        s.scheduler.name(),
        format_real6(s.peak),
        format_real6(s.average),
        format_real6(s.edge),
        s.jain.map(format_real6).unwrap_or_else(|| "n/a".into()),
        s.satisfaction
            .map(format_real6)
            .unwrap_or_else(|| "n/a".into()),
        s.mean_generations
            .map(format_real6)
            .unwrap_or_else(|| "n/a".into()),
    )
}

fn config_echo_section(echo: &str, seeds: &[u64]) -> String {
    let seed_list: Vec<String> = seeds.iter().map(|s| s.to_string()).collect();
    format!("# seeds\n{}\n\n# config\n{}", seed_list.join(","), echo)
}

pub fn render_simulate_summary(echo: &str, seeds: &[u64], run: &RunSummary) -> String {
    format!(
        "# simulate summary\nseed={}\n{}\n\n{}",
        run.seed,
        summary_row(run),
        config_echo_section(echo, seeds)
    )
}

pub fn render_compare_summary(echo: &str, seeds: &[u64], rows: &[ComparisonRow]) -> String {
    let mut out = String::from("# scheduler comparison (medians over seeds)\n");
    out.push_str("scheduler\tpeak\taverage\tedge\tjain\tsatisfaction\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\t{}\t{}\n",
            r.scheduler.name(),
            format_real6(r.peak),
            format_real6(r.average),
            format_real6(r.edge),
            r.jain.map(format_real6).unwrap_or_else(|| "n/a".into()),
            r.satisfaction
                .map(format_real6)
                .unwrap_or_else(|| "n/a".into()),
        ));
    }
    out.push('\n');
    out.push_str(&config_echo_section(echo, seeds));
    out
}

pub fn render_sweep_summary(echo: &str, seeds: &[u64], rows: &[SweepRow]) -> String {
    let mut out = String::from("# weight sweep (medians over seeds)\n");
    out.push_str("w1\tjain\tsatisfaction\taverage_throughput\n");
    for r in rows {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            format_real6(r.w1),
            r.jain.map(format_real6).unwrap_or_else(|| "n/a".into()),
            r.satisfaction
                .map(format_real6)
                .unwrap_or_else(|| "n/a".into()),
            format_real6(r.average_throughput),
        ));
    }
    out.push('\n');
    out.push_str(&config_echo_section(echo, seeds));
    out
}

pub fn render_warmstart_summary(echo: &str, seeds: &[u64], report: &WarmstartReport) -> String {
    let mut out = String::from("# warm-start study\n");
    out.push_str(&format!(
        "samples={}\nmedian_warm_generations={}\nmedian_cold_generations={}\n",
        report.samples.len(),
        report
            .median_warm
            .map(format_real6)
            .unwrap_or_else(|| "n/a".into()),
        report
            .median_cold
            .map(format_real6)
            .unwrap_or_else(|| "n/a".into()),
    ));
    out.push_str("\nrepeat\ttti\twarm_generations\tcold_generations\n");
    for s in &report.samples {
        out.push_str(&format!(
            "{}\t{}\t{}\t{}\n",
            s.repeat, s.tti, s.warm_generations, s.cold_generations
        ));
    }
    out.push('\n');
    out.push_str(&config_echo_section(echo, seeds));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::baselines::SchedulerKind;
    use crate::fitness::SchedulerWeights;

    #[test]
    fn real6_formatting() {
        assert_eq!(format_real6(0.0), "0.000000");
        assert_eq!(format_real6(1.0), "1.000000");
        assert_eq!(format_real6(-2.5), "-2.500000");
        assert_eq!(format_real6(1234.5678901), "1234.567890");
        // Round-half-even at the 6th decimal.
        assert_eq!(format_real6(0.0000005), "0.000000");
        assert_eq!(format_real6(0.0000015), "0.000002");
        // Negative zero after rounding loses the sign.
        assert_eq!(format_real6(-1e-9), "0.000000");
    }

    #[test]
    fn csv_row_shape() {
        let rec = TtiRecord {
            tti: 3,
            scheduler: SchedulerKind::GaAdaptive,
            weights: SchedulerWeights::new(0.75, 0.25).unwrap(),
            per_ue_bits: vec![100.0, 0.0],
            cluster: Some(1),
            generations_used: Some(42),
            combined_fitness: Some(0.5),
        };
        assert_eq!(
            csv_row(&rec),
            "3,ga_adaptive,0.750000,0.250000,1,42,0.500000,100.000000,0.000000"
        );
        assert_eq!(
            csv_header(2),
            "tti,scheduler,w1,w2,cluster,generations_used,combined_fitness,ue_0,ue_1"
        );
    }

    #[test]
    fn csv_optionals_render_empty() {
        let rec = TtiRecord {
            tti: 0,
            scheduler: SchedulerKind::Pf,
            weights: SchedulerWeights::new(1.0, 0.0).unwrap(),
            per_ue_bits: vec![7.0],
            cluster: None,
            generations_used: None,
            combined_fitness: None,
        };
        assert_eq!(csv_row(&rec), "0,pf,1.000000,0.000000,,,,7.000000");
    }
}
