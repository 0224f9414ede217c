//! Event logs: the raw, time-ordered record of interactions.

use std::collections::HashMap;
use std::io::BufRead;

use crate::{NodeId, Timestamp};

use super::GraphError;

/// One timed interaction between two distinct nodes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Event {
    pub x: NodeId,
    pub y: NodeId,
    pub t: Timestamp,
    /// Optional interaction weight from the input file; defaults to 1 and is
    /// carried through unused (snapshots are unweighted).
    pub w: f64,
}

/// A time-ordered sequence of events plus the label ↔ dense-index mapping.
///
/// This is the source of truth every other representation (snapshot
/// sequences, aggregated graphs) is derived from. Events are sorted by
/// timestamp with a stable sort, so same-time events keep file order.
#[derive(Debug, Clone)]
pub struct EventLog {
    events: Vec<Event>,
    labels: Vec<String>,
    index_of: HashMap<String, NodeId>,
    self_loops_dropped: usize,
    t_min: Timestamp,
    t_max: Timestamp,
}

/// Line-level parse failures, reported with 1-based line numbers.
#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("line {line}: expected 3 or 4 fields, found {found}")]
    FieldCount { line: usize, found: usize },
    #[error("line {line}: invalid timestamp {value:?}")]
    BadTimestamp { line: usize, value: String },
    #[error("line {line}: invalid weight {value:?}")]
    BadWeight { line: usize, value: String },
    #[error("no events in input")]
    Empty,
    #[error("read failed: {0}")]
    Io(#[from] std::io::Error),
}

/// Parses a temporal edge list: one `source target timestamp [weight]` per
/// line, fields split on spaces, tabs or commas. Lines starting with `#` or
/// `%` are comments; blank lines are skipped. Self-loop events are dropped
/// and tallied on the returned log.
pub fn parse_event_log<R: BufRead>(reader: R) -> Result<EventLog, ParseError> {
    let mut labels: Vec<String> = Vec::new();
    let mut index_of: HashMap<String, NodeId> = HashMap::new();
    let mut events: Vec<Event> = Vec::new();
    let mut self_loops = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed
            .split([' ', '\t', ','])
            .filter(|f| !f.is_empty())
            .collect();
        if fields.len() != 3 && fields.len() != 4 {
            return Err(ParseError::FieldCount {
                line: lineno,
                found: fields.len(),
            });
        }
        let t: Timestamp = fields[2].parse().map_err(|_| ParseError::BadTimestamp {
            line: lineno,
            value: fields[2].to_string(),
        })?;
        let w: f64 = if fields.len() == 4 {
            let w: f64 = fields[3].parse().map_err(|_| ParseError::BadWeight {
                line: lineno,
                value: fields[3].to_string(),
            })?;
            if w <= 0.0 || !w.is_finite() {
                return Err(ParseError::BadWeight {
                    line: lineno,
                    value: fields[3].to_string(),
                });
            }
            w
        } else {
            1.0
        };
        if fields[0] == fields[1] {
            self_loops += 1;
            continue;
        }
        let mut id_for = |label: &str| -> NodeId {
            if let Some(&id) = index_of.get(label) {
                id
            } else {
                let id = labels.len() as NodeId;
                labels.push(label.to_string());
                index_of.insert(label.to_string(), id);
                id
            }
        };
        let x = id_for(fields[0]);
        let y = id_for(fields[1]);
        events.push(Event { x, y, t, w });
    }

    if events.is_empty() {
        return Err(ParseError::Empty);
    }
    if self_loops > 0 {
        log::warn!("dropped {self_loops} self-loop event(s)");
    }

    events.sort_by_key(|e| e.t);
    let t_min = events.first().map(|e| e.t).unwrap();
    let t_max = events.last().map(|e| e.t).unwrap();
    Ok(EventLog {
        events,
        labels,
        index_of,
        self_loops_dropped: self_loops,
        t_min,
        t_max,
    })
}

impl EventLog {
    /// Builds a log directly from `(x, y, t)` triplets over dense indices.
    /// Self-loops are dropped and tallied, mirroring the parser.
    pub fn from_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (NodeId, NodeId, Timestamp)>,
    ) -> Result<Self, GraphError> {
        let mut events: Vec<Event> = Vec::new();
        let mut self_loops = 0usize;
        for (x, y, t) in triplets {
            assert!(
                (x as usize) < n && (y as usize) < n,
                "node index out of range"
            );
            if x == y {
                self_loops += 1;
                continue;
            }
            events.push(Event { x, y, t, w: 1.0 });
        }
        if events.is_empty() {
            return Err(GraphError::EmptyLog);
        }
        events.sort_by_key(|e| e.t);
        let t_min = events.first().unwrap().t;
        let t_max = events.last().unwrap().t;
        let labels: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        let index_of = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i as NodeId))
            .collect();
        Ok(EventLog {
            events,
            labels,
            index_of,
            self_loops_dropped: self_loops,
            t_min,
            t_max,
        })
    }

    /// Number of distinct labels, i.e. the dense index space size.
    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    /// Events sorted by timestamp.
    pub fn events(&self) -> &[Event] {
        &self.events
    }

    pub fn t_min(&self) -> Timestamp {
        self.t_min
    }

    pub fn t_max(&self) -> Timestamp {
        self.t_max
    }

    /// How many self-loop events the parser discarded.
    pub fn self_loops_dropped(&self) -> usize {
        self.self_loops_dropped
    }

    /// Original label of a dense index.
    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id as usize]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Dense index of a label, if the label occurs in the log.
    pub fn index_of(&self, label: &str) -> Option<NodeId> {
        self.index_of.get(label).copied()
    }

    /// Distinct event timestamps, ascending.
    pub fn distinct_timestamps(&self) -> Vec<Timestamp> {
        let mut ts: Vec<Timestamp> = self.events.iter().map(|e| e.t).collect();
        ts.dedup(); // events are sorted by t
        ts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Cursor;

    fn parse(s: &str) -> Result<EventLog, ParseError> {
        parse_event_log(Cursor::new(s))
    }

    #[test]
    fn minimal_well_formed_input() {
        let log = parse("a b 1\nb c 2").unwrap();
        assert_eq!(log.node_count(), 3);
        assert_eq!(log.events().len(), 2);
        assert_eq!(log.t_min(), 1);
        assert_eq!(log.t_max(), 2);
        assert_eq!(log.label(0), "a");
        assert_eq!(log.index_of("c"), Some(2));
    }

    #[test]
    fn self_loops_are_dropped_and_counted() {
        let log = parse("a a 1\na b 2").unwrap();
        assert_eq!(log.events().len(), 1);
        assert_eq!(log.self_loops_dropped(), 1);
        // `a` first appears in a retained event, so it is still index 0,
        // but the map must cover only labels from retained events.
        assert_eq!(log.node_count(), 2);
    }

    #[test]
    fn label_map_covers_only_retained_events() {
        // `z` appears solely in a self-loop; it must not get an index.
        let log = parse("z z 5\na b 1").unwrap();
        assert_eq!(log.node_count(), 2);
        assert_eq!(log.index_of("z"), None);
    }

    #[test]
    fn separators_and_comments() {
        let log = parse("# header\n% more\na,b,3\nc\td\t1\ne f 2 0.5\n\n").unwrap();
        assert_eq!(log.node_count(), 6);
        assert_eq!(log.events().len(), 3);
        // stable sort by timestamp
        let ts: Vec<_> = log.events().iter().map(|e| e.t).collect();
        assert_eq!(ts, vec![1, 2, 3]);
        assert_eq!(log.events()[1].w, 0.5);
    }

    #[test]
    fn malformed_lines_report_position() {
        match parse("a b 1\na b") {
            Err(ParseError::FieldCount { line: 2, found: 2 }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        match parse("a b xyz") {
            Err(ParseError::BadTimestamp { line: 1, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
        match parse("a b 1 -2") {
            Err(ParseError::BadWeight { line: 1, .. }) => {}
            other => panic!("unexpected: {other:?}"),
        }
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(parse(""), Err(ParseError::Empty)));
        assert!(matches!(parse("# only comments\n"), Err(ParseError::Empty)));
        assert!(matches!(parse("a a 1"), Err(ParseError::Empty)));
    }

    #[test]
    fn stable_order_for_equal_timestamps() {
        let log = parse("a b 5\nc d 5\ne f 5").unwrap();
        let pairs: Vec<_> = log.events().iter().map(|e| (e.x, e.y)).collect();
        assert_eq!(pairs, vec![(0, 1), (2, 3), (4, 5)]);
    }
}
