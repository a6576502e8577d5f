//! Record-file parsing and timeline assembly.
//!
//! Tracking vendors deliver one delimited file per player holding
//! `label,ms,value` rows. Players are sampled at a non-constant rate and at
//! different instants, so a unified timeline has one frame per detected
//! millisecond across the whole squad, with every absent player carried
//! forward from their most recent reading (LOCF).

use std::collections::BTreeMap;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("missing column '{0}' in header")]
    MissingColumn(&'static str),
    #[error("malformed row at line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },
    #[error("unknown label {label} at line {line}")]
    UnknownLabel { line: u64, label: String },
    #[error("no players")]
    NoPlayers,
    #[error("bad manifest: {0}")]
    BadManifest(String),
    #[error("bad wide matrix at line {line}: {reason}")]
    BadWide { line: u64, reason: String },
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        #[source]
        source: Box<IngestError>,
    },
}

impl IngestError {
    fn for_file(self, path: &Path) -> IngestError {
        IngestError::File {
            path: path.to_path_buf(),
            source: Box::new(self),
        }
    }
}

/// The eight labels a sensor row may carry. Vertical and acceleration
/// channels are accepted on input and dropped before frame assembly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordLabel {
    PosX,
    PosY,
    VelX,
    VelY,
    PosZ,
    AccX,
    AccY,
    AccZ,
}

impl RecordLabel {
    /// Labels that survive into the wide matrix.
    pub fn is_retained(self) -> bool {
        matches!(
            self,
            RecordLabel::PosX | RecordLabel::PosY | RecordLabel::VelX | RecordLabel::VelY
        )
    }
}

impl FromStr for RecordLabel {
    type Err = ();

    fn from_str(s: &str) -> Result<Self, ()> {
        Ok(match s {
            "pos_x" => RecordLabel::PosX,
            "pos_y" => RecordLabel::PosY,
            "vel_x" => RecordLabel::VelX,
            "vel_y" => RecordLabel::VelY,
            "pos_z" => RecordLabel::PosZ,
            "acc_x" => RecordLabel::AccX,
            "acc_y" => RecordLabel::AccY,
            "acc_z" => RecordLabel::AccZ,
            _ => return Err(()),
        })
    }
}

/// One sensor reading. The player it belongs to is carried by context (the
/// source file, or the map key in [`merge_timeline`]).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RawRecord {
    pub label: RecordLabel,
    pub ms: u64,
    pub value: f64,
}

/// A player's carried-forward state at some frame.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlayerState {
    /// Position in meters, x measured from the half-court line.
    pub pos: [f64; 2],
    /// Velocity in meters per second.
    pub vel: [f64; 2],
    /// Timestamp of the most recent record applied to this player.
    pub last_update_ms: u64,
    /// False until the first retained record arrives; unobserved players are
    /// treated as off-court rather than parked at the origin.
    pub observed: bool,
}

impl Default for PlayerState {
    fn default() -> Self {
        PlayerState {
            pos: [0.0, 0.0],
            vel: [0.0, 0.0],
            last_update_ms: 0,
            observed: false,
        }
    }
}

/// One row of the wide matrix: a timestamp plus every player's state.
#[derive(Debug, Clone, PartialEq)]
pub struct GameFrame {
    pub ms: u64,
    /// One entry per roster slot, in roster order.
    pub players: Vec<PlayerState>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameMetadata {
    pub team: String,
    pub date: String,
}

/// The unified wide matrix: frames strictly sorted by ms, one per detected
/// instant, with roster order fixed to the lexicographic order of player ids.
#[derive(Debug, Clone, PartialEq)]
pub struct GameTimeline {
    pub frames: Vec<GameFrame>,
    pub roster: Vec<String>,
    pub metadata: GameMetadata,
}

impl GameTimeline {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

/// Parse one player's record file.
///
/// The stream must open with a header row naming at least the `label`, `ms`
/// and `value` columns (any order, extra columns ignored). Rows come back in
/// file order. Unknown labels and unparsable fields are rejected with the
/// offending line number.
pub fn parse_record_file<R: Read>(source: R, delimiter: u8) -> Result<Vec<RawRecord>, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(delimiter)
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(source);

    let headers = reader.headers().map_err(csv_error)?.clone();
    let col = |name: &'static str| -> Result<usize, IngestError> {
        headers
            .iter()
            .position(|h| h.eq_ignore_ascii_case(name))
            .ok_or(IngestError::MissingColumn(name))
    };
    let label_col = col("label")?;
    let ms_col = col("ms")?;
    let value_col = col("value")?;

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);

        let label_str = &row[label_col];
        let label = RecordLabel::from_str(label_str).map_err(|()| IngestError::UnknownLabel {
            line,
            label: label_str.to_string(),
        })?;
        let ms: u64 = row[ms_col].parse().map_err(|_| IngestError::MalformedRow {
            line,
            reason: format!("ms '{}' is not a non-negative integer", &row[ms_col]),
        })?;
        let value: f64 = row[value_col]
            .parse()
            .map_err(|_| IngestError::MalformedRow {
                line,
                reason: format!("value '{}' is not a number", &row[value_col]),
            })?;
        if !value.is_finite() {
            return Err(IngestError::MalformedRow {
                line,
                reason: format!("value '{value}' is not finite"),
            });
        }
        records.push(RawRecord { label, ms, value });
    }
    Ok(records)
}

fn csv_error(e: csv::Error) -> IngestError {
    let line = match e.position() {
        Some(p) => p.line(),
        None => 0,
    };
    IngestError::MalformedRow {
        line,
        reason: e.to_string(),
    }
}

/// Merge per-player record sequences into the wide timeline.
///
/// Emits one frame per distinct ms across all inputs; each frame carries, for
/// every player, the most recent value of each retained channel at or before
/// that ms. Duplicate (label, ms) readings keep the last occurrence in file
/// order. Vertical and acceleration records are discarded here.
pub fn merge_timeline(
    per_player: &BTreeMap<String, Vec<RawRecord>>,
    metadata: GameMetadata,
) -> Result<GameTimeline, IngestError> {
    if per_player.is_empty() {
        return Err(IngestError::NoPlayers);
    }
    let roster: Vec<String> = per_player.keys().cloned().collect();

    // Stable sort by ms keeps file order within a timestamp, so applying
    // records in sequence leaves the last duplicate in effect.
    let mut streams: Vec<Vec<RawRecord>> = per_player
        .values()
        .map(|records| {
            let mut s: Vec<RawRecord> = records
                .iter()
                .copied()
                .filter(|r| r.label.is_retained())
                .collect();
            s.sort_by_key(|r| r.ms);
            s
        })
        .collect();

    let mut instants: Vec<u64> = streams.iter().flatten().map(|r| r.ms).collect();
    instants.sort_unstable();
    instants.dedup();

    let mut cursors = vec![0usize; streams.len()];
    let mut states = vec![PlayerState::default(); streams.len()];
    let mut frames = Vec::with_capacity(instants.len());

    for &ms in &instants {
        for (p, stream) in streams.iter().enumerate() {
            let cur = &mut cursors[p];
            while *cur < stream.len() && stream[*cur].ms <= ms {
                apply_record(&mut states[p], stream[*cur]);
                *cur += 1;
            }
        }
        frames.push(GameFrame {
            ms,
            players: states.clone(),
        });
    }

    // Streams are fully consumed once the last instant passes.
    for (stream, cur) in streams.iter_mut().zip(&cursors) {
        debug_assert_eq!(stream.len(), *cur);
    }

    Ok(GameTimeline {
        frames,
        roster,
        metadata,
    })
}

fn apply_record(state: &mut PlayerState, record: RawRecord) {
    match record.label {
        RecordLabel::PosX => state.pos[0] = record.value,
        RecordLabel::PosY => state.pos[1] = record.value,
        RecordLabel::VelX => state.vel[0] = record.value,
        RecordLabel::VelY => state.vel[1] = record.value,
        _ => return,
    }
    state.last_update_ms = record.ms;
    state.observed = true;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

/// Maps record files to player identities for one game.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Manifest {
    pub team: String,
    pub date: String,
    /// Field delimiter for the record files; defaults to a comma.
    #[serde(default)]
    pub delimiter: Option<char>,
    pub players: Vec<ManifestEntry>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub player_id: String,
    /// Path to the record file, relative to the manifest's directory.
    pub file: String,
}

impl Manifest {
    pub fn from_json_str(s: &str) -> Result<Self, IngestError> {
        serde_json::from_str(s).map_err(|e| IngestError::BadManifest(e.to_string()))
    }

    pub fn delimiter_byte(&self) -> u8 {
        self.delimiter.map(|c| c as u8).unwrap_or(b',')
    }
}

/// Load a manifest and all referenced record files into a merged timeline.
/// Files are parsed in parallel; the merge itself is a deterministic fold.
pub fn load_game(manifest_path: &Path) -> Result<GameTimeline, IngestError> {
    let text = std::fs::read_to_string(manifest_path)
        .map_err(|e| IngestError::from(e).for_file(manifest_path))?;
    let manifest = Manifest::from_json_str(&text)?;
    if manifest.players.is_empty() {
        return Err(IngestError::NoPlayers);
    }
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let delimiter = manifest.delimiter_byte();

    use rayon::prelude::*;
    let parsed: Vec<(String, Result<Vec<RawRecord>, IngestError>)> = manifest
        .players
        .par_iter()
        .map(|entry| {
            let path = base.join(&entry.file);
            let result = std::fs::File::open(&path)
                .map_err(IngestError::from)
                .and_then(|f| parse_record_file(std::io::BufReader::new(f), delimiter))
                .map_err(|e| e.for_file(&path));
            (entry.player_id.clone(), result)
        })
        .collect();

    let mut per_player = BTreeMap::new();
    for (player_id, result) in parsed {
        per_player.insert(player_id, result?);
    }
    merge_timeline(
        &per_player,
        GameMetadata {
            team: manifest.team,
            date: manifest.date,
        },
    )
}

// ---------------------------------------------------------------------------
// Wide-matrix export
// ---------------------------------------------------------------------------

/// Write the wide matrix: `ms`, then `pos_<id>_x, pos_<id>_y, vel_<id>_x,
/// vel_<id>_y` per roster slot. Unobserved players render as `NA`.
pub fn write_wide<W: std::io::Write>(
    timeline: &GameTimeline,
    out: &mut W,
) -> Result<(), IngestError> {
    let mut header = String::from("ms");
    for id in &timeline.roster {
        for channel in ["pos", "pos", "vel", "vel"]
            .iter()
            .zip(["x", "y", "x", "y"])
            .map(|(kind, axis)| format!("{kind}_{id}_{axis}"))
        {
            header.push(',');
            header.push_str(&channel);
        }
    }
    writeln!(out, "{header}")?;

    let mut row = String::new();
    for frame in &timeline.frames {
        row.clear();
        row.push_str(&frame.ms.to_string());
        for p in &frame.players {
            if p.observed {
                for v in [p.pos[0], p.pos[1], p.vel[0], p.vel[1]] {
                    row.push(',');
                    row.push_str(&format!("{v}"));
                }
            } else {
                row.push_str(",NA,NA,NA,NA");
            }
        }
        writeln!(out, "{row}")?;
    }
    Ok(())
}

/// Read a wide matrix produced by [`write_wide`]. Roster ids are recovered
/// from the header; metadata is not stored in this format and comes back
/// empty.
pub fn read_wide<R: Read>(source: R) -> Result<GameTimeline, IngestError> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(source);
    let headers = reader.headers().map_err(csv_error)?.clone();
    if headers.is_empty() || &headers[0] != "ms" {
        return Err(IngestError::BadWide {
            line: 1,
            reason: "first column must be 'ms'".into(),
        });
    }
    if (headers.len() - 1) % 4 != 0 {
        return Err(IngestError::BadWide {
            line: 1,
            reason: "expected four columns per player after 'ms'".into(),
        });
    }
    let n_players = (headers.len() - 1) / 4;
    let mut roster = Vec::with_capacity(n_players);
    for p in 0..n_players {
        let h = &headers[1 + 4 * p];
        let id = h
            .strip_prefix("pos_")
            .and_then(|s| s.strip_suffix("_x"))
            .ok_or_else(|| IngestError::BadWide {
                line: 1,
                reason: format!("unexpected column header '{h}'"),
            })?;
        roster.push(id.to_string());
    }

    let mut frames = Vec::new();
    let mut prev_ms: Option<u64> = None;
    for row in reader.records() {
        let row = row.map_err(csv_error)?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let ms: u64 = row[0].parse().map_err(|_| IngestError::BadWide {
            line,
            reason: format!("bad ms '{}'", &row[0]),
        })?;
        if let Some(prev) = prev_ms {
            if ms <= prev {
                return Err(IngestError::BadWide {
                    line,
                    reason: format!("ms {ms} not strictly increasing after {prev}"),
                });
            }
        }
        prev_ms = Some(ms);

        let mut players = Vec::with_capacity(n_players);
        for p in 0..n_players {
            let cells = [
                &row[1 + 4 * p],
                &row[2 + 4 * p],
                &row[3 + 4 * p],
                &row[4 + 4 * p],
            ];
            if cells.contains(&"NA") {
                players.push(PlayerState::default());
                continue;
            }
            let mut vals = [0.0f64; 4];
            for (v, cell) in vals.iter_mut().zip(cells) {
                *v = cell.parse().map_err(|_| IngestError::BadWide {
                    line,
                    reason: format!("bad value '{cell}'"),
                })?;
            }
            players.push(PlayerState {
                pos: [vals[0], vals[1]],
                vel: [vals[2], vals[3]],
                last_update_ms: ms,
                observed: true,
            });
        }
        frames.push(GameFrame { ms, players });
    }

    Ok(GameTimeline {
        frames,
        roster,
        metadata: GameMetadata::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn rec(label: RecordLabel, ms: u64, value: f64) -> RawRecord {
        RawRecord { label, ms, value }
    }

    #[test]
    fn parse_table_shaped_rows() {
        let input = "label, ms, value\npos_x, 5564, 4.28\nvel_y, 5579, 0.36\n";
        let records = parse_record_file(input.as_bytes(), b',').unwrap();
        assert_eq!(
            records,
            vec![
                rec(RecordLabel::PosX, 5564, 4.28),
                rec(RecordLabel::VelY, 5579, 0.36),
            ]
        );
    }

    #[test]
    fn parse_empty_after_header() {
        let records = parse_record_file("label,ms,value\n".as_bytes(), b',').unwrap();
        assert!(records.is_empty());
    }

    #[test]
    fn parse_rejects_unknown_label() {
        let err =
            parse_record_file("label,ms,value\npos_q, 10, 1.0\n".as_bytes(), b',').unwrap_err();
        match err {
            IngestError::UnknownLabel { line, label } => {
                assert_eq!(line, 2);
                assert_eq!(label, "pos_q");
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn parse_rejects_bad_rows() {
        let err =
            parse_record_file("label,ms,value\npos_x, abc, 1.0\n".as_bytes(), b',').unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { line: 2, .. }));

        let err = parse_record_file("label,ms,value\npos_x, 10\n".as_bytes(), b',').unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { .. }));

        let err =
            parse_record_file("label,ms,value\npos_x, -5, 1.0\n".as_bytes(), b',').unwrap_err();
        assert!(matches!(err, IngestError::MalformedRow { line: 2, .. }));
    }

    #[test]
    fn parse_header_columns_any_order() {
        let input = "ms;value;label\n5564;4.28;pos_x\n";
        let records = parse_record_file(input.as_bytes(), b';').unwrap();
        assert_eq!(records, vec![rec(RecordLabel::PosX, 5564, 4.28)]);

        let err = parse_record_file("ms,value\n1,2\n".as_bytes(), b',').unwrap_err();
        assert!(matches!(err, IngestError::MissingColumn("label")));
    }

    fn full_reading(ms: u64, pos: [f64; 2], vel: [f64; 2]) -> Vec<RawRecord> {
        vec![
            rec(RecordLabel::PosX, ms, pos[0]),
            rec(RecordLabel::PosY, ms, pos[1]),
            rec(RecordLabel::VelX, ms, vel[0]),
            rec(RecordLabel::VelY, ms, vel[1]),
        ]
    }

    #[test]
    fn merge_carries_forward_table_pair() {
        let mut input = BTreeMap::new();
        let mut p1 = full_reading(5564, [4.28, 7.40], [1.26, 1.26]);
        p1.extend(full_reading(5579, [0.32, 1.03], [0.36, 0.36]));
        input.insert("p1".to_string(), p1);
        input.insert(
            "p2".to_string(),
            full_reading(5564, [15.25, 8.98], [0.0, 0.0]),
        );

        let tl = merge_timeline(&input, GameMetadata::default()).unwrap();
        assert_eq!(tl.len(), 2);
        assert_eq!(tl.roster, vec!["p1", "p2"]);
        assert_eq!(tl.frames[0].ms, 5564);
        assert_eq!(tl.frames[1].ms, 5579);
        // Player 2 repeats its ms-5564 values at 5579.
        let p2 = &tl.frames[1].players[1];
        assert_eq!(p2.pos, [15.25, 8.98]);
        assert_eq!(p2.vel, [0.0, 0.0]);
        assert_eq!(p2.last_update_ms, 5564);
        assert!(p2.observed);
    }

    #[test]
    fn merge_single_full_record_is_identity() {
        let mut input = BTreeMap::new();
        input.insert("a".to_string(), full_reading(100, [1.0, 2.0], [3.0, 4.0]));
        let tl = merge_timeline(&input, GameMetadata::default()).unwrap();
        assert_eq!(tl.len(), 1);
        let p = &tl.frames[0].players[0];
        assert_eq!((p.pos, p.vel), ([1.0, 2.0], [3.0, 4.0]));
    }

    #[test]
    fn merge_interleaved_instants() {
        let mut input = BTreeMap::new();
        let mut a = full_reading(10, [1.0, 1.0], [0.1, 0.1]);
        a.extend(full_reading(30, [3.0, 3.0], [0.3, 0.3]));
        input.insert("a".to_string(), a);
        input.insert("b".to_string(), full_reading(20, [2.0, 2.0], [0.2, 0.2]));

        let tl = merge_timeline(&input, GameMetadata::default()).unwrap();
        assert_eq!(tl.len(), 3);
        assert_eq!(
            tl.frames.iter().map(|f| f.ms).collect::<Vec<_>>(),
            vec![10, 20, 30]
        );
        // At 10, b has not been seen yet.
        assert!(!tl.frames[0].players[1].observed);
        // At 20, a carries its ms-10 values.
        assert_eq!(tl.frames[1].players[0].pos, [1.0, 1.0]);
        assert_eq!(tl.frames[1].players[0].last_update_ms, 10);
        // At 30, b carries its ms-20 values.
        assert_eq!(tl.frames[2].players[1].pos, [2.0, 2.0]);
        assert_eq!(tl.frames[2].players[1].last_update_ms, 20);
    }

    #[test]
    fn merge_rejects_empty_input() {
        let input = BTreeMap::new();
        assert!(matches!(
            merge_timeline(&input, GameMetadata::default()),
            Err(IngestError::NoPlayers)
        ));
    }

    #[test]
    fn merge_duplicate_keeps_last_in_file_order() {
        let mut input = BTreeMap::new();
        input.insert(
            "a".to_string(),
            vec![
                rec(RecordLabel::PosX, 10, 1.0),
                rec(RecordLabel::PosX, 10, 2.0),
            ],
        );
        let tl = merge_timeline(&input, GameMetadata::default()).unwrap();
        assert_eq!(tl.frames[0].players[0].pos[0], 2.0);
    }

    #[test]
    fn merge_collapses_ties_across_players() {
        let mut input = BTreeMap::new();
        input.insert("a".to_string(), vec![rec(RecordLabel::PosX, 10, 1.0)]);
        input.insert("b".to_string(), vec![rec(RecordLabel::PosX, 10, 5.0)]);
        let tl = merge_timeline(&input, GameMetadata::default()).unwrap();
        assert_eq!(tl.len(), 1);
    }

    #[test]
    fn merge_discards_vertical_and_acceleration() {
        let mut with_extras = BTreeMap::new();
        with_extras.insert(
            "a".to_string(),
            vec![
                rec(RecordLabel::PosZ, 5, 9.0),
                rec(RecordLabel::PosX, 10, 1.0),
                rec(RecordLabel::AccX, 10, 7.0),
                rec(RecordLabel::AccZ, 15, -2.0),
            ],
        );
        let mut plain = BTreeMap::new();
        plain.insert("a".to_string(), vec![rec(RecordLabel::PosX, 10, 1.0)]);

        let a = merge_timeline(&with_extras, GameMetadata::default()).unwrap();
        let b = merge_timeline(&plain, GameMetadata::default()).unwrap();
        assert_eq!(a, b);
    }

    /// Brute-force LOCF oracle: a player's value at frame t is their latest
    /// record at or before t, scanned from scratch per frame.
    fn locf_oracle(records: &[RawRecord], label: RecordLabel, at_ms: u64) -> Option<f64> {
        let mut sorted: Vec<(usize, &RawRecord)> = records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.label == label && r.ms <= at_ms)
            .collect();
        sorted.sort_by_key(|(i, r)| (r.ms, *i));
        sorted.last().map(|(_, r)| r.value)
    }

    #[test]
    fn merge_matches_brute_force_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..20 {
            let mut input: BTreeMap<String, Vec<RawRecord>> = BTreeMap::new();
            for p in 0..3 {
                let labels = [
                    RecordLabel::PosX,
                    RecordLabel::PosY,
                    RecordLabel::VelX,
                    RecordLabel::VelY,
                ];
                let n = rng.gen_range(1..25);
                let records: Vec<RawRecord> = (0..n)
                    .map(|_| {
                        rec(
                            labels[rng.gen_range(0..4)],
                            rng.gen_range(0..200),
                            rng.gen_range(-10.0..10.0),
                        )
                    })
                    .collect();
                input.insert(format!("p{p}"), records);
            }
            let tl = merge_timeline(&input, GameMetadata::default()).unwrap();

            let mut distinct: Vec<u64> = input.values().flatten().map(|r| r.ms).collect();
            distinct.sort_unstable();
            distinct.dedup();
            assert_eq!(tl.len(), distinct.len());

            for frame in &tl.frames {
                for (slot, id) in tl.roster.iter().enumerate() {
                    let records = &input[id];
                    let state = &frame.players[slot];
                    let expect = |label| locf_oracle(records, label, frame.ms);
                    if let Some(v) = expect(RecordLabel::PosX) {
                        assert_eq!(state.pos[0], v);
                    }
                    if let Some(v) = expect(RecordLabel::PosY) {
                        assert_eq!(state.pos[1], v);
                    }
                    if let Some(v) = expect(RecordLabel::VelX) {
                        assert_eq!(state.vel[0], v);
                    }
                    if let Some(v) = expect(RecordLabel::VelY) {
                        assert_eq!(state.vel[1], v);
                    }
                    let seen = [
                        RecordLabel::PosX,
                        RecordLabel::PosY,
                        RecordLabel::VelX,
                        RecordLabel::VelY,
                    ]
                    .iter()
                    .any(|&l| expect(l).is_some());
                    assert_eq!(state.observed, seen);
                }
            }
        }
    }

    /// Re-expressing a merged timeline as one full reading per frame and
    /// merging again reproduces the timeline.
    #[test]
    fn merge_locf_idempotent() {
        let mut input = BTreeMap::new();
        let mut a = full_reading(10, [1.0, 2.0], [0.5, 0.5]);
        a.extend(full_reading(40, [3.0, 1.0], [0.2, 0.1]));
        input.insert("a".to_string(), a);
        input.insert("b".to_string(), full_reading(25, [7.0, 7.0], [0.0, 0.0]));
        let tl = merge_timeline(&input, GameMetadata::default()).unwrap();

        let mut rewidened: BTreeMap<String, Vec<RawRecord>> = BTreeMap::new();
        for frame in &tl.frames {
            for (slot, id) in tl.roster.iter().enumerate() {
                let p = &frame.players[slot];
                if p.observed {
                    rewidened
                        .entry(id.clone())
                        .or_default()
                        .extend(full_reading(frame.ms, p.pos, p.vel));
                }
            }
        }
        let again = merge_timeline(&rewidened, GameMetadata::default()).unwrap();
        assert_eq!(again.frames.len(), tl.frames.len());
        for (fa, fb) in again.frames.iter().zip(&tl.frames) {
            assert_eq!(fa.ms, fb.ms);
            for (pa, pb) in fa.players.iter().zip(&fb.players) {
                assert_eq!(pa.observed, pb.observed);
                if pa.observed {
                    assert_eq!((pa.pos, pa.vel), (pb.pos, pb.vel));
                }
            }
        }
    }

    #[test]
    fn wide_round_trip() {
        let mut input = BTreeMap::new();
        let mut p1 = full_reading(5564, [4.28, 7.40], [1.26, 1.26]);
        p1.extend(full_reading(5579, [0.32, 1.03], [0.36, 0.36]));
        input.insert("p1".to_string(), p1);
        input.insert(
            "p2".to_string(),
            full_reading(5579, [15.25, 8.98], [0.0, 0.0]),
        );
        let tl = merge_timeline(&input, GameMetadata::default()).unwrap();

        let mut buf = Vec::new();
        write_wide(&tl, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("ms,pos_p1_x,pos_p1_y,vel_p1_x,vel_p1_y,pos_p2_x"));
        // p2 unobserved at 5564.
        assert!(text.lines().nth(1).unwrap().ends_with("NA,NA,NA,NA"));

        let back = read_wide(&buf[..]).unwrap();
        assert_eq!(back.roster, tl.roster);
        assert_eq!(back.len(), tl.len());
        for (fa, fb) in back.frames.iter().zip(&tl.frames) {
            assert_eq!(fa.ms, fb.ms);
            for (pa, pb) in fa.players.iter().zip(&fb.players) {
                assert_eq!(pa.observed, pb.observed);
                if pa.observed {
                    assert_eq!((pa.pos, pa.vel), (pb.pos, pb.vel));
                }
            }
        }
    }

    #[test]
    fn read_wide_rejects_garbage() {
        assert!(read_wide("nope,x\n1,2\n".as_bytes()).is_err());
        assert!(read_wide("ms,pos_a_x\n1,2\n".as_bytes()).is_err());
        let err =
            read_wide("ms,pos_a_x,pos_a_y,vel_a_x,vel_a_y\n10,1,1,0,0\n5,1,1,0,0\n".as_bytes())
                .unwrap_err();
        assert!(matches!(err, IngestError::BadWide { .. }));
    }

    #[test]
    fn load_game_reads_manifest_tree() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(
            dir.path().join("p1.csv"),
            "label,ms,value\npos_x,10,1.0\npos_y,10,2.0\n",
        )
        .unwrap();
        std::fs::write(
            dir.path().join("manifest.json"),
            r#"{"team":"T","date":"2017-02-17","players":[{"player_id":"p1","file":"p1.csv"}]}"#,
        )
        .unwrap();
        let tl = load_game(&dir.path().join("manifest.json")).unwrap();
        assert_eq!(tl.metadata.team, "T");
        assert_eq!(tl.len(), 1);

        std::fs::write(
            dir.path().join("manifest.json"),
            r#"{"team":"T","date":"d","players":[{"player_id":"p1","file":"missing.csv"}]}"#,
        )
        .unwrap();
        let err = load_game(&dir.path().join("manifest.json")).unwrap_err();
        assert!(err.to_string().contains("missing.csv"));
    }
}
