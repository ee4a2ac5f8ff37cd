//! Parsers that turn observation files into [`Snapshot`](crate::Snapshot)s,
//! plus identifier-to-site mapping and EDNS client-subnet lookups.

mod edns;
mod nsid;
mod rows;
mod traceroute;

pub use edns::{
    answer_label, collect_edns, edns_cs_lookup, EdnsQuery, DEFAULT_CONCURRENCY, MAX_V4_PREFIX,
    MAX_V6_PREFIX,
};
pub use nsid::{load_nsid_rules, map_nsid, parse_nsid_rules, NsidRule, NsidRules};
pub(crate) use rows::parse_time;
pub use rows::{
    load_identifier_rows, load_snapshots, parse_identifier_rows, parse_snapshots, InputFormat,
};
pub use traceroute::{
    extract_hop_catchment, hop_snapshot, load_traceroutes, parse_traceroute_line,
    parse_traceroutes, Hop, TracerouteRecord, MAX_HOPS,
};

/// Non-blank lines with their 1-based line numbers.
pub(crate) fn numbered_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i + 1, line.trim_end_matches('\r')))
        .filter(|(_, line)| !line.trim().is_empty())
}

/// Splits a header-led comma-separated text, checking the header matches
/// `expected` exactly (after trimming each field).
pub(crate) fn data_rows<'a>(
    text: &'a str,
    expected: &[&str],
) -> crate::Result<Vec<(usize, Vec<&'a str>)>> {
    let mut lines = numbered_lines(text);
    let Some((line_no, header)) = lines.next() else {
        return Ok(Vec::new());
    };
    let fields: Vec<&str> = header.split(',').map(str::trim).collect();
    if fields != expected {
        return Err(crate::Error::parse(
            line_no,
            format!(
                "expected header `{}`, found `{}`",
                expected.join(","),
                header
            ),
        ));
    }
    lines
        .map(|(line_no, line)| {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != expected.len() {
                return Err(crate::Error::parse(
                    line_no,
                    format!("expected {} fields, found {}", expected.len(), fields.len()),
                ));
            }
            Ok((line_no, fields))
        })
        .collect()
}
