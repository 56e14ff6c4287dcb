use thiserror::Error;

/// Errors produced while building or querying problem instances.
#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed map header: {0}")]
    MapHeader(String),
    #[error("map row {row} has width {got}, expected {want}")]
    MapRowWidth { row: usize, got: usize, want: usize },
    #[error("map has {got} rows, expected {want}")]
    MapRowCount { got: usize, want: usize },
    #[error("unknown map cell character {0:?}")]
    MapCell(char),
    #[error("malformed scenario header: {0}")]
    ScenHeader(String),
    #[error("malformed scenario record on line {line}: {reason}")]
    ScenRecord { line: usize, reason: String },
    #[error("scenario has {got} records, {want} requested")]
    ScenTooFew { got: usize, want: usize },
    #[error("cell ({x}, {y}) is blocked or out of range")]
    CellUnusable { x: u32, y: u32 },
    #[error("vertex {0} is not in the graph")]
    BadVertex(u32),
    #[error("({0}, {1}) is not an edge of the graph")]
    NotAnEdge(u32, u32),
    #[error("self-loop on vertex {0}")]
    SelfLoop(u32),
    #[error("duration for agent {agent} on edge ({u}, {v}) is undefined")]
    MissingDuration { agent: usize, u: u32, v: u32 },
    #[error("duration for agent {agent} on edge ({u}, {v}) must be positive")]
    NonPositiveDuration { agent: usize, u: u32, v: u32 },
    #[error("max duration K must be at least 1")]
    BadMaxDuration,
    #[error("instance needs at least one agent")]
    NoAgents,
    #[error("at most 64 agents are supported, got {0}")]
    TooManyAgents(usize),
    #[error("agent starts are not pairwise distinct")]
    DuplicateStarts,
    #[error("agent goals are not pairwise distinct")]
    DuplicateGoals,
    #[error("instance JSON: {0}")]
    InstanceJson(String),
    #[error("solution JSON: {0}")]
    SolutionJson(String),
    #[error("time value {0} does not fit the fixed-point range")]
    TimeRange(f64),
    #[error("no durations to derive a common time unit from")]
    NoDurations,
    #[error("the oracle state-space cap of {0} states was exceeded")]
    OracleCap(usize),
    #[error("experiment config: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
