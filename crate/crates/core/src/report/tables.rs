use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::model::{format_number, CatchmentLabel, NetworkId, Snapshot, WeightVector};
use crate::quantify::{transition_matrix, TransitionMatrix};

/// Canonical `time,network,label` text, rows ordered by time then network.
pub fn snapshots_to_csv(series: &[Snapshot]) -> String {
    let mut out = Vec::new();
    write_snapshots_to(series, &mut out).expect("writing to memory");
    String::from_utf8(out).expect("utf-8 labels")
}

pub fn write_snapshots_to(series: &[Snapshot], mut out: impl Write) -> std::io::Result<()> {
    let mut ordered: Vec<&Snapshot> = series.iter().collect();
    ordered.sort_by_key(|s| s.time);
    writeln!(out, "time,network,label")?;
    for s in ordered {
        for (network, label) in s.iter() {
            writeln!(out, "{},{},{}", s.time, network, label)?;
        }
    }
    Ok(())
}

pub fn write_snapshots(series: &[Snapshot], path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_snapshots_to(series, &mut out)?;
    out.flush()?;
    Ok(())
}

/// Fixed-width transition table with totals. Off-diagonal cells at or above
/// `highlight` carry a trailing `*`.
pub fn render_transition_table(matrix: &TransitionMatrix, highlight: f64) -> String {
    let labels = matrix.labels();
    let n = labels.len();
    let rows = matrix.row_totals();
    let cols = matrix.column_totals();

    let mut grid: Vec<Vec<String>> = Vec::with_capacity(n + 2);
    let mut header = vec!["from\\to".to_string()];
    header.extend(labels.iter().map(|l| format!("{l} ")));
    header.push("total ".into());
    grid.push(header);
    let mut flagged = false;
    for (i, from) in labels.iter().enumerate() {
        let mut row = vec![from.to_string()];
        for j in 0..n {
            let v = matrix.cell(i, j);
            let mut text = format_number(v);
            if i != j && v > 0.0 && v >= highlight {
                text.push('*');
                flagged = true;
            } else {
                text.push(' ');
            }
            row.push(text);
        }
        row.push(format!("{} ", format_number(rows[i])));
        grid.push(row);
    }
    let mut totals = vec!["total".to_string()];
    totals.extend(cols.iter().map(|&v| format!("{} ", format_number(v))));
    totals.push(format!("{} ", format_number(matrix.total())));
    grid.push(totals);

    let widths: Vec<usize> = (0..n + 2)
        .map(|c| grid.iter().map(|r| r[c].chars().count()).max().unwrap_or(0))
        .collect();
    let mut out = String::new();
    for row in &grid {
        let mut line = format!("{:<w$}", row[0], w = widths[0]);
        for (c, cell) in row.iter().enumerate().skip(1) {
            write!(line, "  {:>w$}", cell, w = widths[c]).unwrap();
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    if flagged {
        writeln!(out, "* off-diagonal >= {}", format_number(highlight)).unwrap();
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SankeyLink {
    pub source: String,
    pub target: String,
    pub value: f64,
}

fn node(label: &CatchmentLabel, hop: usize) -> String {
    format!("{label}_{hop}")
}

/// Flow links between consecutive hop levels. Every level must cover the
/// same networks.
pub fn sankey_links(hops: &[(usize, Snapshot)], weights: &WeightVector) -> Result<Vec<SankeyLink>> {
    if hops.len() < 2 {
        return Err(Error::config("a flow export needs at least two hop levels"));
    }
    let universe: BTreeSet<&NetworkId> = hops[0].1.entries().keys().collect();
    for (hop, snap) in &hops[1..] {
        if snap.len() != universe.len() || !snap.entries().keys().all(|k| universe.contains(k)) {
            return Err(Error::UniverseMismatch(format!(
                "hop {hop} covers different networks than hop {}",
                hops[0].0
            )));
        }
    }
    let mut links = Vec::new();
    for pair in hops.windows(2) {
        let ((ha, a), (hb, b)) = (&pair[0], &pair[1]);
        let t = transition_matrix(a, b, weights);
        for (i, from) in t.labels().iter().enumerate() {
            for (j, to) in t.labels().iter().enumerate() {
                let value = t.cell(i, j);
                if value > 0.0 {
                    links.push(SankeyLink {
                        source: node(from, *ha),
                        target: node(to, *hb),
                        value,
                    });
                }
            }
        }
    }
    Ok(links)
}

/// `source_node,target_node,value` rows for an external flow renderer.
pub fn export_sankey(hops: &[(usize, Snapshot)], weights: &WeightVector) -> Result<String> {
    let mut out = String::from("source_node,target_node,value\n");
    for l in sankey_links(hops, weights)? {
        writeln!(out, "{},{},{}", l.source, l.target, format_number(l.value)).unwrap();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::{parse_snapshots, InputFormat};

    fn snap(t: i64, entries: &[(&str, &str)]) -> Snapshot {
        Snapshot::from_entries(
            t,
            entries
                .iter()
                .map(|&(n, l)| (n, CatchmentLabel::parse(l).unwrap())),
        )
    }

    #[test]
    fn snapshot_rows_round_trip() {
        let s = vec![
            snap(20, &[("b", "LAX"), ("a", "unknown")]),
            snap(10, &[("z", "error"), ("c", "other")]),
        ];
        let text = snapshots_to_csv(&s);
        assert_eq!(
            text,
            "time,network,label\n10,c,other\n10,z,error\n20,a,unknown\n20,b,LAX\n"
        );
        let back = parse_snapshots(&text, InputFormat::CanonicalRows).unwrap();
        assert_eq!(back, vec![s[1].clone(), s[0].clone()]);
    }

    #[test]
    fn snapshots_write_to_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        let s = vec![snap(1, &[("n", "A")])];
        write_snapshots(&s, &path).unwrap();
        assert_eq!(
            std::fs::read_to_string(&path).unwrap(),
            snapshots_to_csv(&s)
        );
        assert!(write_snapshots(&s, dir.path().join("missing/rows.csv")).is_err());
    }

    #[test]
    fn diagonal_table_has_no_flags() {
        let a = snap(0, &[("n1", "A"), ("n2", "B")]);
        let t = transition_matrix(&a, &a, &WeightVector::uniform());
        let table = render_transition_table(&t, 0.0);
        assert!(!table.contains('*'));
        assert_eq!(
            table,
            "from\\to  A   B   total\nA        1   0       1\nB        0   1       1\ntotal    1   1       2\n"
        );
    }

    #[test]
    fn zero_threshold_flags_nonzero_off_diagonal() {
        let a = snap(0, &[("n1", "A"), ("n2", "B"), ("n3", "C")]);
        let b = snap(1, &[("n1", "B"), ("n2", "B"), ("n3", "C")]);
        let t = transition_matrix(&a, &b, &WeightVector::uniform());
        let table = render_transition_table(&t, 0.0);
        assert_eq!(table.matches('*').count(), 2);
        assert!(table.contains("1*"));
    }

    #[test]
    fn sankey_single_link() {
        let w = WeightVector::from_pairs([("n1", 3.0)]).unwrap();
        let hops = vec![
            (1, snap(0, &[("n1", "A"), ("n2", "A")])),
            (2, snap(0, &[("n1", "B"), ("n2", "B")])),
        ];
        assert_eq!(
            export_sankey(&hops, &w).unwrap(),
            "source_node,target_node,value\nA_1,B_2,4\n"
        );
    }

    #[test]
    fn sankey_links_only_between_neighbours() {
        let hops = vec![
            (1, snap(0, &[("n1", "A"), ("n2", "B")])),
            (2, snap(0, &[("n1", "C"), ("n2", "C")])),
            (3, snap(0, &[("n1", "D"), ("n2", "E")])),
        ];
        let links = sankey_links(&hops, &WeightVector::uniform()).unwrap();
        assert_eq!(links.len(), 4);
        for l in &links {
            let hs: usize = l.source.rsplit('_').next().unwrap().parse().unwrap();
            let ht: usize = l.target.rsplit('_').next().unwrap().parse().unwrap();
            assert_eq!(ht, hs + 1);
        }
        let from_two: f64 = links
            .iter()
            .filter(|l| l.source.ends_with("_2"))
            .map(|l| l.value)
            .sum();
        assert_eq!(from_two, 2.0);
    }

    #[test]
    fn sankey_rejects_mismatch() {
        let hops = vec![(1, snap(0, &[("n1", "A")])), (2, snap(0, &[("n2", "A")]))];
        assert!(matches!(
            sankey_links(&hops, &WeightVector::uniform()),
            Err(Error::UniverseMismatch(_))
        ));
        assert!(sankey_links(&hops[..1], &WeightVector::uniform()).is_err());
    }
}
