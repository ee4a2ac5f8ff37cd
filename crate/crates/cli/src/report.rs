use std::collections::BTreeMap;
use std::fmt::Write as _;

use anyhow::Context;
use catchscope::analysis::hac_cluster_with;
use catchscope::ingest::{hop_snapshot, load_traceroutes};
use catchscope::model::format_number;
use catchscope::quantify::{
    aggregate, load_latency_samples, per_catchment_percentile, transition_matrix,
    weighted_mean_latency,
};
use catchscope::report::{
    export_sankey, render_heatmap, render_stackplot, render_transition_table,
};
use catchscope::CatchmentLabel;

use crate::analyze::Meta;
use crate::config::{Format, Study};
use crate::pipeline::prepare;
use crate::store::{write_atomic, Store};
use crate::InputError;

pub fn run(study: &Study, store: &Store) -> anyhow::Result<()> {
    let meta = Meta::load(store)?;
    let prepared = prepare(study, store)?;
    if prepared.cache_key != meta.cache_key {
        return Err(InputError(
            "analysis is out of date with the store or config; rerun `catchscope analyze`".into(),
        )
        .into());
    }
    let matrix = store
        .cached_matrix(&meta.cache_key)?
        .ok_or_else(|| InputError("similarity cache missing; rerun `catchscope analyze`".into()))?;
    let modes = hac_cluster_with(&matrix, meta.threshold, meta.linkage);

    let mut written = Vec::new();
    let mut emit = |name: String, body: String| -> anyhow::Result<()> {
        write_atomic(&store.path(&name), body.as_bytes())?;
        written.push(name);
        Ok(())
    };

    emit(
        "report/heatmap.svg".into(),
        render_heatmap(&matrix, Some(&modes)),
    )?;

    let aggregates: Vec<_> = prepared
        .snapshots
        .iter()
        .map(|s| aggregate(s, &prepared.weights))
        .collect();
    let order: Vec<CatchmentLabel> = study
        .report
        .site_order
        .iter()
        .map(|s| CatchmentLabel::parse(s).map_err(|e| InputError(format!("site_order `{s}`: {e}"))))
        .collect::<Result<_, _>>()?;
    let order = (!order.is_empty()).then_some(order.as_slice());
    emit(
        "report/stackplot.svg".into(),
        render_stackplot(&aggregates, order),
    )?;

    let by_time: BTreeMap<i64, _> = prepared.snapshots.iter().map(|s| (s.time, s)).collect();
    for &(a, b) in &study.report.pairs {
        let (Some(sa), Some(sb)) = (by_time.get(&a), by_time.get(&b)) else {
            return Err(InputError(format!(
                "report pair ({a}, {b}) names a time with no snapshot"
            ))
            .into());
        };
        let t = transition_matrix(sa, sb, &prepared.weights);
        emit(
            format!("report/transitions-{a}-{b}.txt"),
            render_transition_table(&t, study.report.highlight),
        )?;
        emit(format!("report/transitions-{a}-{b}.csv"), t.to_csv())?;
    }

    if study.inputs.format == Format::Traceroute && !study.report.sankey.is_empty() {
        for file in &study.inputs.files {
            let path = study.resolve(file.path());
            let records = load_traceroutes(&path).with_context(|| path.display().to_string())?;
            let time = file.time().unwrap_or_default();
            let hops = study
                .report
                .sankey
                .iter()
                .map(|&h| Ok((usize::from(h), hop_snapshot(time, &records, h)?)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            emit(
                format!("report/sankey-{time}.csv"),
                export_sankey(&hops, &prepared.weights)?,
            )?;
        }
    }

    if let Some(latency) = &study.report.latency {
        let path = study.resolve(latency);
        let samples = load_latency_samples(&path).with_context(|| path.display().to_string())?;
        let p = study.report.percentile;
        let mut text = String::from("time,label,rtt_ms\n");
        for ((time, label), v) in per_catchment_percentile(&samples, p)? {
            writeln!(text, "{time},{label},{}", format_number(v)).unwrap();
        }
        emit(format!("report/latency-p{}.csv", format_number(p)), text)?;
        let mut grouped: BTreeMap<i64, Vec<_>> = BTreeMap::new();
        for s in samples {
            grouped.entry(s.time).or_default().push(s);
        }
        let mut text = String::from("time,weighted_mean_ms\n");
        for (time, group) in grouped {
            let mean = weighted_mean_latency(&group, &prepared.weights)?;
            writeln!(text, "{time},{}", format_number(mean)).unwrap();
        }
        emit("report/latency-mean.csv".into(), text)?;
    }

    for name in &written {
        println!("wrote {}", store.path(name).display());
    }
    Ok(())
}
