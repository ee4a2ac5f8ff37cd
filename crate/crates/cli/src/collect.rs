use std::net::SocketAddr;
use std::path::Path;
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use catchscope::ingest::{collect_edns, load_nsid_rules, EdnsQuery};
use catchscope::report::snapshots_to_csv;
use catchscope::Snapshot;
use ipnet::IpNet;

use crate::store::write_atomic;
use crate::InputError;

pub struct CollectArgs<'a> {
    pub hostname: &'a str,
    pub resolver: SocketAddr,
    pub prefixes: &'a Path,
    pub out: &'a Path,
    pub time: Option<i64>,
    pub timeout: Duration,
    pub concurrency: usize,
    pub rules: Option<&'a Path>,
}

pub fn run(args: &CollectArgs) -> anyhow::Result<()> {
    let text = std::fs::read_to_string(args.prefixes)
        .map_err(|e| InputError(format!("cannot read {}: {e}", args.prefixes.display())))?;
    let prefixes: Vec<IpNet> = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|(i, l)| {
            l.trim().parse().map_err(|_| {
                InputError(format!(
                    "{}:{}: invalid prefix `{}`",
                    args.prefixes.display(),
                    i + 1,
                    l.trim()
                ))
            })
        })
        .collect::<Result<_, _>>()?;
    let mut query = EdnsQuery::new(args.hostname, args.resolver, args.timeout);
    if let Some(rules) = args.rules {
        query = query.with_rules(load_nsid_rules(rules)?);
    }
    let time = match args.time {
        Some(t) => t,
        None => SystemTime::now().duration_since(UNIX_EPOCH)?.as_secs() as i64,
    };
    let answers = collect_edns(&query, &prefixes, args.concurrency)?;
    let snapshot =
        Snapshot::from_entries(time, answers.into_iter().map(|(p, l)| (p.to_string(), l)));
    write_atomic(args.out, snapshots_to_csv(&[snapshot]).as_bytes())?;
    println!(
        "collected {} prefixes at {time} into {}",
        prefixes.len(),
        args.out.display()
    );
    Ok(())
}
