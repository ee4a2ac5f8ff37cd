use std::path::PathBuf;

use catchscope::eval::{
    group_events, load_ground_truth, score_detections, ConfusionReport, ScoreOptions,
};

use crate::analyze::CHANGES;
use crate::config::Study;
use crate::store::{write_atomic, Store};
use crate::InputError;

fn load_detections(store: &Store) -> anyhow::Result<Vec<i64>> {
    let path = store.path(CHANGES);
    let text = std::fs::read_to_string(&path).map_err(|_| {
        InputError(format!(
            "no change list at {}; run `catchscope analyze` first",
            path.display()
        ))
    })?;
    text.lines()
        .enumerate()
        .skip(1)
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            let field = l.split(',').next().unwrap_or_default();
            field.trim().parse::<i64>().map_err(|_| {
                InputError(format!(
                    "{}:{}: invalid time `{field}`",
                    path.display(),
                    i + 1
                ))
                .into()
            })
        })
        .collect()
}

pub fn run(
    study: &Study,
    store: &Store,
    ground_truth: Option<PathBuf>,
    strict: bool,
) -> anyhow::Result<ConfusionReport> {
    let detections = load_detections(store)?;
    let path = match ground_truth {
        Some(p) => p,
        None => study
            .validate
            .ground_truth
            .as_ref()
            .map(|p| study.resolve(p))
            .ok_or_else(|| {
                InputError(
                    "no ground-truth log; pass --ground-truth or set validate.ground_truth".into(),
                )
            })?,
    };
    if !path.exists() {
        return Err(InputError(format!("ground-truth log {} not found", path.display())).into());
    }
    let log =
        load_ground_truth(&path).map_err(|e| InputError(format!("{}: {e}", path.display())))?;
    let v = &study.validate;
    let groups = group_events(&log, v.window_minutes);
    let options = ScoreOptions {
        match_window_minutes: v.match_window_minutes.unwrap_or(v.window_minutes),
        strict: strict || v.strict,
    };
    let report = score_detections(&detections, &groups, &options);
    let mut text = format!("{report}\n");
    text.push_str("start,end,operator,visibility,detected\n");
    let slack = i64::from(options.match_window_minutes) * 60;
    for g in &groups {
        let detected = detections
            .iter()
            .any(|&t| t >= g.start - slack && t <= g.end + slack);
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            g.start, g.end, g.operator, g.visibility, detected
        ));
    }
    write_atomic(&store.path("validate/report.txt"), text.as_bytes())?;
    println!("{report}");
    Ok(report)
}
