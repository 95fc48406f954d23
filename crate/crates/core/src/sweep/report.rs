//! Aggregation over repeats, rank statistics, and report emission
//! (records.csv / records.json / aggregates.csv / SVG plots).

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;

use super::plot::{LinePlot, Series};
use super::record::{
    canonical_order, to_csv_line, BenchmarkRecord, CanonicalRecord, Method, CSV_COLUMNS,
};
use crate::error::Result;

/// Mean and statistical error (sample std / √k) of one metric.
#[derive(Debug, Clone, Copy, Serialize, PartialEq)]
pub struct MetricStats {
    pub mean: f64,
    pub stat_error: f64,
}

fn stats(values: &[f64]) -> MetricStats {
    let k = values.len();
    let mean = values.iter().sum::<f64>() / k as f64;
    let stat_error = if k < 2 {
        0.0
    } else {
        let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (k - 1) as f64;
        (var / k as f64).sqrt()
    };
    MetricStats { mean, stat_error }
}

/// Aggregated metrics of one (method, n, h) group.
#[derive(Debug, Clone, Serialize)]
pub struct AggregateRow {
    pub method: Method,
    pub n: usize,
    pub h: f64,
    /// Records aggregated (failures excluded).
    pub count: usize,
    pub failed: usize,
    pub energy: MetricStats,
    pub m2: MetricStats,
    pub infidelity: MetricStats,
    pub energy_error_abs: MetricStats,
    pub energy_error_rel: MetricStats,
    pub m2_error_abs: MetricStats,
    pub wall_time_s: MetricStats,
}

/// Group records by (method, n, h) and compute means and statistical errors;
/// failed records are excluded and counted.
pub fn aggregate(records: &[BenchmarkRecord]) -> Vec<AggregateRow> {
    let mut groups: BTreeMap<(Method, usize, u64), Vec<&BenchmarkRecord>> = BTreeMap::new();
    for r in records {
        groups.entry((r.method, r.n, r.h.to_bits())).or_default().push(r);
    }
    let mut rows = Vec::with_capacity(groups.len());
    for ((method, n, h_bits), group) in groups {
        let failed = group.iter().filter(|r| r.is_failed()).count();
        let ok: Vec<&&BenchmarkRecord> = group.iter().filter(|r| !r.is_failed()).collect();
        if ok.is_empty() {
            log::warn!(
                "all {} records failed for {} at h = {}; group skipped",
                group.len(),
                method.as_str(),
                f64::from_bits(h_bits)
            );
            continue;
        }
        let collect = |f: fn(&BenchmarkRecord) -> f64| -> MetricStats {
            stats(&ok.iter().map(|r| f(r)).collect::<Vec<_>>())
        };
        rows.push(AggregateRow {
            method,
            n,
            h: f64::from_bits(h_bits),
            count: ok.len(),
            failed,
            energy: collect(|r| r.energy),
            m2: collect(|r| r.m2),
            infidelity: collect(|r| r.infidelity),
            energy_error_abs: collect(|r| r.energy_error_abs),
            energy_error_rel: collect(|r| r.energy_error_rel),
            m2_error_abs: collect(|r| r.m2_error_abs),
            wall_time_s: collect(|r| r.wall_time_s),
        });
    }
    rows.sort_by(|a, b| {
        a.h.total_cmp(&b.h)
            .then(a.method.cmp(&b.method))
            .then(a.n.cmp(&b.n))
    });
    rows
}

/// Spearman rank correlation with tie-averaged ranks.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    let ra = ranks(a);
    let rb = ranks(b);
    pearson(&ra, &rb)
}

fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&i, &j| values[i].total_cmp(&values[j]));
    let mut out = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let avg_rank = (i + j) as f64 / 2.0 + 1.0;
        for &idx in &order[i..=j] {
            out[idx] = avg_rank;
        }
        i = j + 1;
    }
    out
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut va = 0.0;
    let mut vb = 0.0;
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return 0.0;
    }
    cov / (va * vb).sqrt()
}

/// Write records.csv, records.json, aggregates.csv, and the SVG plots.
/// Every file is written to a temp path and renamed, so failures leave no
/// partial outputs; bytes are deterministic given the same inputs.
pub fn emit_report(
    rows: &[AggregateRow],
    records: &[BenchmarkRecord],
    output_dir: &Path,
) -> Result<()> {
    let mut sorted: Vec<&BenchmarkRecord> = records.iter().collect();
    sorted.sort_by(|a, b| canonical_order(a, b));

    // records.csv
    let mut csv = String::from(CSV_COLUMNS);
    csv.push('\n');
    for r in &sorted {
        csv.push_str(&to_csv_line(r));
        csv.push('\n');
    }
    write_atomic(&output_dir.join("records.csv"), csv.as_bytes())?;

    // records.json: canonical, wall-time-free
    let canonical: Vec<CanonicalRecord> = sorted.iter().map(|r| CanonicalRecord::from(*r)).collect();
    let json = serde_json::to_string_pretty(&canonical)?;
    write_atomic(&output_dir.join("records.json"), json.as_bytes())?;

    // aggregates.csv
    let mut agg = String::from(
        "method,n,h,count,failed,energy_mean,energy_stat_err,m2_mean,m2_stat_err,\
         infidelity_mean,infidelity_stat_err,energy_error_abs_mean,energy_error_abs_stat_err,\
         energy_error_rel_mean,energy_error_rel_stat_err,m2_error_abs_mean,m2_error_abs_stat_err,\
         wall_time_s_mean\n",
    );
    for row in rows {
        agg.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            row.method.as_str(),
            row.n,
            row.h,
            row.count,
            row.failed,
            row.energy.mean,
            row.energy.stat_error,
            row.m2.mean,
            row.m2.stat_error,
            row.infidelity.mean,
            row.infidelity.stat_error,
            row.energy_error_abs.mean,
            row.energy_error_abs.stat_error,
            row.energy_error_rel.mean,
            row.energy_error_rel.stat_error,
            row.m2_error_abs.mean,
            row.m2_error_abs.stat_error,
            row.wall_time_s.mean,
        ));
    }
    write_atomic(&output_dir.join("aggregates.csv"), agg.as_bytes())?;

    if rows.is_empty() {
        return Ok(());
    }
    let n = rows[0].n;

    // error curves vs h, one file per metric, log-scale y
    let error_plots: [(&str, fn(&AggregateRow) -> f64); 3] = [
        ("energy_error_abs", |r| r.energy_error_abs.mean),
        ("m2_error_abs", |r| r.m2_error_abs.mean),
        ("infidelity", |r| r.infidelity.mean),
    ];
    for (metric, extract) in error_plots {
        let series = series_per_method(rows, extract, Some(Method::Ed));
        if series.is_empty() {
            continue;
        }
        let plot = LinePlot {
            title: format!("{metric} vs h (n = {n})"),
            x_label: "h".into(),
            y_label: metric.into(),
            log_y: true,
            series,
        };
        write_atomic(
            &output_dir.join(format!("{metric}_n{n}.svg")),
            plot.render().as_bytes(),
        )?;
    }

    // statistical-error curves for the stochastic methods
    let stat_plots: [(&str, fn(&AggregateRow) -> f64); 2] = [
        ("stat_error_energy", |r| r.energy.stat_error),
        ("stat_error_m2", |r| r.m2.stat_error),
    ];
    for (metric, extract) in stat_plots {
        let series: Vec<Series> = series_per_method(rows, extract, None)
            .into_iter()
            .filter(|s| s.name == "rbm" || s.name == "rbm_symmetric" || s.name == "vqe")
            .collect();
        if series.is_empty() {
            continue;
        }
        let plot = LinePlot {
            title: format!("{metric} vs h (n = {n})"),
            x_label: "h".into(),
            y_label: metric.into(),
            log_y: true,
            series,
        };
        write_atomic(
            &output_dir.join(format!("{metric}_n{n}.svg")),
            plot.render().as_bytes(),
        )?;
    }

    // the raw observables for the top panels: energy and magic vs h
    for (metric, extract) in [
        ("energy", (|r| r.energy.mean) as fn(&AggregateRow) -> f64),
        ("m2", |r| r.m2.mean),
    ] {
        let series = series_per_method(rows, extract, None);
        if series.is_empty() {
            continue;
        }
        let plot = LinePlot {
            title: format!("{metric} vs h (n = {n})"),
            x_label: "h".into(),
            y_label: metric.into(),
            log_y: false,
            series,
        };
        write_atomic(
            &output_dir.join(format!("{metric}_n{n}.svg")),
            plot.render().as_bytes(),
        )?;
    }
    Ok(())
}

fn series_per_method(
    rows: &[AggregateRow],
    extract: fn(&AggregateRow) -> f64,
    skip: Option<Method>,
) -> Vec<Series> {
    let mut by_method: BTreeMap<Method, Vec<(f64, f64)>> = BTreeMap::new();
    for row in rows {
        if Some(row.method) == skip {
            continue;
        }
        by_method
            .entry(row.method)
            .or_default()
            .push((row.h, extract(row)));
    }
    by_method
        .into_iter()
        .map(|(method, points)| Series {
            name: method.as_str().into(),
            points,
        })
        .collect()
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let tmp = path.with_extension("tmp");
    {
        let mut f = std::fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}
