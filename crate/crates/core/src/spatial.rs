//! Direction-sense paths: movement vectors, self-canceling detours, and
//! surface rewrites that leave the net displacement untouched.
//!
//! Paths are lists of axis-aligned moves with exact rational magnitudes, so
//! invariance checks are zero-tolerance comparisons rather than float
//! approximations. Floating point enters only at the final distance report,
//! which rounds half-up to two decimals.

use std::fmt;
use std::ops::RangeInclusive;

use num_rational::Rational64;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// One of the four cardinal directions; paths never move diagonally.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Direction {
    North,
    South,
    East,
    West,
}

/// All four cardinals, in clockwise compass order starting from north.
pub const DIRECTIONS: [Direction; 4] = [
    Direction::North,
    Direction::East,
    Direction::South,
    Direction::West,
];

impl Direction {
    /// The opposite cardinal, i.e. the direction that cancels this one.
    pub fn inverse(self) -> Direction {
        match self {
            Direction::North => Direction::South,
            Direction::South => Direction::North,
            Direction::East => Direction::West,
            Direction::West => Direction::East,
        }
    }

    /// The heading after a quarter-turn clockwise.
    pub fn right(self) -> Direction {
        match self {
            Direction::North => Direction::East,
            Direction::East => Direction::South,
            Direction::South => Direction::West,
            Direction::West => Direction::North,
        }
    }

    /// The heading after a quarter-turn counterclockwise.
    pub fn left(self) -> Direction {
        self.right().right().right()
    }

    /// Lowercase English word, as used in plain narrative text.
    pub fn word(self) -> &'static str {
        match self {
            Direction::North => "north",
            Direction::South => "south",
            Direction::East => "east",
            Direction::West => "west",
        }
    }

    /// Clock-face phrase substituted for the cardinal in obfuscated text.
    pub fn clock(self) -> &'static str {
        match self {
            Direction::North => "12 o'clock",
            Direction::South => "6 o'clock",
            Direction::East => "3 o'clock",
            Direction::West => "9 o'clock",
        }
    }

    /// Single-letter code used in serialized paths.
    pub fn letter(self) -> &'static str {
        match self {
            Direction::North => "N",
            Direction::South => "S",
            Direction::East => "E",
            Direction::West => "W",
        }
    }

    /// Parses the single-letter code; returns `None` for anything else.
    pub fn from_letter(s: &str) -> Option<Direction> {
        match s {
            "N" => Some(Direction::North),
            "S" => Some(Direction::South),
            "E" => Some(Direction::East),
            "W" => Some(Direction::West),
            _ => None,
        }
    }
}

/// A single straight-line movement: a cardinal direction and a non-negative
/// rational magnitude in kilometers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Move {
    pub direction: Direction,
    pub magnitude: Rational64,
}

impl Move {
    /// Builds a move with a whole-kilometer magnitude.
    pub fn km(direction: Direction, magnitude: i64) -> Move {
        Move {
            direction,
            magnitude: Rational64::from_integer(magnitude),
        }
    }
}

// Paths serialize as flat (letter, numerator, denominator) triples so records
// stay exact and readable without depending on a rational-number encoding.
impl Serialize for Move {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        (
            self.direction.letter(),
            *self.magnitude.numer(),
            *self.magnitude.denom(),
        )
            .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Move {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let (letter, numer, denom): (String, i64, i64) = Deserialize::deserialize(deserializer)?;
        let direction = Direction::from_letter(&letter)
            .ok_or_else(|| D::Error::custom(format!("unknown direction code {letter:?}")))?;
        if denom == 0 {
            return Err(D::Error::custom("magnitude denominator is zero"));
        }
        Ok(Move {
            direction,
            magnitude: Rational64::new(numer, denom),
        })
    }
}

/// A quarter- or half-turn relative to the current heading.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Turn {
    Right,
    Left,
    Back,
}

/// Narrative content attached to a path without contributing displacement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum AnnotationKind {
    /// A turn mentioned in the narration (the moves already encode its effect).
    Turn(Turn),
    /// A zero-distance distractor sentence (a stop, an onlooker, weather).
    Stop(String),
}

/// An annotation anchored before the move at `before_move`; an index equal to
/// the number of moves anchors it after the final move.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PathAnnotation {
    pub before_move: usize,
    pub kind: AnnotationKind,
}

/// An ordered walking route plus optional narrative annotations.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct MovementPath {
    pub moves: Vec<Move>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<PathAnnotation>,
}

impl MovementPath {
    /// Builds an annotation-free path from moves.
    pub fn from_moves(moves: Vec<Move>) -> MovementPath {
        MovementPath {
            moves,
            annotations: Vec::new(),
        }
    }

    /// Builds an annotation-free path from whole-kilometer legs.
    pub fn from_km(legs: &[(Direction, i64)]) -> MovementPath {
        MovementPath::from_moves(legs.iter().map(|&(d, m)| Move::km(d, m)).collect())
    }

    /// Checks the structural invariants: non-negative magnitudes and
    /// annotation anchors within range.
    pub fn validate(&self) -> Result<(), SpatialError> {
        for (index, m) in self.moves.iter().enumerate() {
            if m.magnitude < Rational64::zero() {
                return Err(SpatialError::NegativeMagnitude {
                    index,
                    magnitude: m.magnitude,
                });
            }
        }
        for ann in &self.annotations {
            if ann.before_move > self.moves.len() {
                return Err(SpatialError::DanglingAnnotation {
                    before_move: ann.before_move,
                    moves: self.moves.len(),
                });
            }
        }
        Ok(())
    }
}

/// Net east/north offset of a path from its starting point, in exact
/// rational kilometers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Displacement {
    pub east: Rational64,
    pub north: Rational64,
}

/// Compass label for a displacement's sign pattern.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bearing {
    North,
    South,
    East,
    West,
    NorthEast,
    NorthWest,
    SouthEast,
    SouthWest,
    Origin,
}

impl Bearing {
    /// Hyphenated English label, e.g. `"North-East"`.
    pub fn label(self) -> &'static str {
        match self {
            Bearing::North => "North",
            Bearing::South => "South",
            Bearing::East => "East",
            Bearing::West => "West",
            Bearing::NorthEast => "North-East",
            Bearing::NorthWest => "North-West",
            Bearing::SouthEast => "South-East",
            Bearing::SouthWest => "South-West",
            Bearing::Origin => "Origin",
        }
    }
}

impl fmt::Display for Bearing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl Displacement {
    /// The zero displacement.
    pub fn zero() -> Displacement {
        Displacement {
            east: Rational64::zero(),
            north: Rational64::zero(),
        }
    }

    /// Straight-line distance from the origin in kilometers. The squared
    /// distance is computed exactly; only the square root is floating point.
    pub fn distance_km(&self) -> f64 {
        let squared = self.east * self.east + self.north * self.north;
        (*squared.numer() as f64 / *squared.denom() as f64).sqrt()
    }

    /// Distance rounded half-up to two decimals, e.g. `"5.83"` for √34.
    pub fn distance_report(&self) -> String {
        let hundredths = (self.distance_km() * 100.0 + 0.5).floor() as i64;
        format!("{}.{:02}", hundredths / 100, hundredths % 100)
    }

    /// Compass label derived from the sign pattern of the two components.
    pub fn bearing(&self) -> Bearing {
        use std::cmp::Ordering::{Equal, Greater, Less};
        let zero = Rational64::zero();
        match (self.east.cmp(&zero), self.north.cmp(&zero)) {
            (Equal, Equal) => Bearing::Origin,
            (Equal, Greater) => Bearing::North,
            (Equal, Less) => Bearing::South,
            (Greater, Equal) => Bearing::East,
            (Less, Equal) => Bearing::West,
            (Greater, Greater) => Bearing::NorthEast,
            (Less, Greater) => Bearing::NorthWest,
            (Greater, Less) => Bearing::SouthEast,
            (Less, Less) => Bearing::SouthWest,
        }
    }

    /// Canonical answer string, e.g. `"5.83 km away, North-East"`.
    pub fn answer_string(&self) -> String {
        format!("{} km away, {}", self.distance_report(), self.bearing())
    }
}

/// Outcome of comparing two paths' net displacements exactly.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InvarianceVerdict {
    /// Identical net displacement.
    Invariant,
    /// The candidate drifts from the base by this exact offset.
    Drift { east: Rational64, north: Rational64 },
}

/// Errors from path construction and detour insertion.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpatialError {
    #[error("detour magnitude range {0}..={1} is empty or below 1 km")]
    InvalidMagnitudeRange(i64, i64),
    #[error("move {index} has negative magnitude {magnitude}")]
    NegativeMagnitude { index: usize, magnitude: Rational64 },
    #[error("annotation anchored before move {before_move} but the path has {moves} moves")]
    DanglingAnnotation { before_move: usize, moves: usize },
}

/// Sums a path's moves componentwise into an exact displacement.
pub fn net_displacement(path: &MovementPath) -> Displacement {
    let mut total = Displacement::zero();
    for m in &path.moves {
        match m.direction {
            Direction::North => total.north += m.magnitude,
            Direction::South => total.north -= m.magnitude,
            Direction::East => total.east += m.magnitude,
            Direction::West => total.east -= m.magnitude,
        }
    }
    total
}

/// Compares net displacements exactly; any nonzero difference is `Drift`.
pub fn verify_invariance(base: &MovementPath, candidate: &MovementPath) -> InvarianceVerdict {
    let b = net_displacement(base);
    let c = net_displacement(candidate);
    if b == c {
        InvarianceVerdict::Invariant
    } else {
        InvarianceVerdict::Drift {
            east: c.east - b.east,
            north: c.north - b.north,
        }
    }
}

// Keeps annotation anchors pointing at the same original move after an
// insertion at `at`.
fn shift_annotations(annotations: &mut [PathAnnotation], at: usize) {
    for ann in annotations {
        if ann.before_move >= at {
            ann.before_move += 1;
        }
    }
}

/// Inserts `pairs` self-canceling (w, w⁻¹) detour pairs at seeded positions.
///
/// Directions and whole-kilometer magnitudes are drawn uniformly from the
/// given range. The inverse member always follows its partner but may be
/// separated from it by other moves, so cancellation is by vector sum rather
/// than adjacency. Base moves keep their relative order, and the output's
/// net displacement equals the input's exactly.
pub fn insert_detours(
    path: &MovementPath,
    pairs: usize,
    seed: u64,
    magnitudes: RangeInclusive<i64>,
) -> Result<MovementPath, SpatialError> {
    let (lo, hi) = (*magnitudes.start(), *magnitudes.end());
    if lo < 1 || hi < lo {
        return Err(SpatialError::InvalidMagnitudeRange(lo, hi));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut moves = path.moves.clone();
    let mut annotations = path.annotations.clone();
    for _ in 0..pairs {
        let direction = DIRECTIONS[rng.gen_range(0..DIRECTIONS.len())];
        let magnitude = Rational64::from_integer(rng.gen_range(lo..=hi));
        let out_at = rng.gen_range(0..=moves.len());
        moves.insert(
            out_at,
            Move {
                direction,
                magnitude,
            },
        );
        shift_annotations(&mut annotations, out_at);
        let back_at = rng.gen_range(out_at + 1..=moves.len());
        moves.insert(
            back_at,
            Move {
                direction: direction.inverse(),
                magnitude,
            },
        );
        shift_annotations(&mut annotations, back_at);
    }
    Ok(MovementPath { moves, annotations })
}

/// Zero-distance narrative distractors; each sentence marks explicitly that
/// no ground is covered.
pub const DISTRACTOR_TEMPLATES: &[&str] = &[
    "A dog barks nearby; they stop to shoo it away (no walking during the stop)",
    "A milkman slows them to ask directions (no extra distance)",
    "They pass a vendor selling sugarcane (no extra distance)",
    "A child waves from a bicycle as they pass (no extra distance)",
    "They pause at a pond to watch the ripples (no walking during the stop)",
];

/// Attaches `count` seeded zero-distance distractor sentences to the path.
/// The moves are untouched, so the net displacement cannot change.
pub fn insert_distractors(path: &MovementPath, count: usize, seed: u64) -> MovementPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = path.clone();
    for _ in 0..count {
        let text = DISTRACTOR_TEMPLATES[rng.gen_range(0..DISTRACTOR_TEMPLATES.len())];
        let before_move = rng.gen_range(0..=out.moves.len());
        out.annotations.push(PathAnnotation {
            before_move,
            kind: AnnotationKind::Stop(text.to_string()),
        });
    }
    out.annotations.sort_by_key(|a| a.before_move);
    out
}

/// How moves and turns are worded when a path is rendered as text.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SurfaceStyle {
    /// Ordinary narration: "walk 5 km north", "turn right".
    Plain,
    /// Obfuscated narration: clock-face headings and quarter-turn rotations.
    ClockFace,
}

fn fmt_magnitude(m: Rational64) -> String {
    if m.is_integer() {
        m.numer().to_string()
    } else {
        format!("{}/{}", m.numer(), m.denom())
    }
}

/// Phrase for a single move, e.g. `"facing 12 o'clock, walk 5 km"`.
pub fn move_phrase(m: &Move, style: SurfaceStyle) -> String {
    match style {
        SurfaceStyle::Plain => format!(
            "walk {} km {}",
            fmt_magnitude(m.magnitude),
            m.direction.word()
        ),
        SurfaceStyle::ClockFace => format!(
            "facing {}, walk {} km",
            m.direction.clock(),
            fmt_magnitude(m.magnitude)
        ),
    }
}

/// Phrase for a relative turn, e.g. `"rotate 1 quarter-turn clockwise"`.
pub fn turn_phrase(turn: Turn, style: SurfaceStyle) -> &'static str {
    match (style, turn) {
        (SurfaceStyle::Plain, Turn::Right) => "turn right",
        (SurfaceStyle::Plain, Turn::Left) => "turn left",
        (SurfaceStyle::Plain, Turn::Back) => "turn back",
        (SurfaceStyle::ClockFace, Turn::Right) => "rotate 1 quarter-turn clockwise",
        (SurfaceStyle::ClockFace, Turn::Left) => "rotate 1 quarter-turn counterclockwise",
        (SurfaceStyle::ClockFace, Turn::Back) => "rotate 2 quarter-turns",
    }
}

fn annotation_phrase(kind: &AnnotationKind, style: SurfaceStyle) -> String {
    match kind {
        AnnotationKind::Turn(t) => turn_phrase(*t, style).to_string(),
        AnnotationKind::Stop(text) => text.clone(),
    }
}

/// Renders the whole path as narrative sentences in the given style.
/// Annotations appear before the move they are anchored to.
pub fn substitute_surface(path: &MovementPath, style: SurfaceStyle) -> String {
    let mut fragments = Vec::new();
    for (i, m) in path.moves.iter().enumerate() {
        for ann in path.annotations.iter().filter(|a| a.before_move == i) {
            fragments.push(annotation_phrase(&ann.kind, style));
        }
        fragments.push(move_phrase(m, style));
    }
    for ann in path
        .annotations
        .iter()
        .filter(|a| a.before_move >= path.moves.len())
    {
        fragments.push(annotation_phrase(&ann.kind, style));
    }
    let mut sentences = Vec::with_capacity(fragments.len());
    for fragment in fragments {
        let mut chars = fragment.chars();
        let sentence = match chars.next() {
            Some(first) => format!("{}{}.", first.to_uppercase(), chars.as_str()),
            None => continue,
        };
        sentences.push(sentence);
    }
    sentences.join(" ")
}

/// One instruction in a heading-relative route description.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    /// Walk this many kilometers along the current heading.
    Walk(Rational64),
    /// Rotate the heading without moving.
    Turn(Turn),
}

impl Step {
    /// Walk a whole number of kilometers along the current heading.
    pub fn walk_km(km: i64) -> Step {
        Step::Walk(Rational64::from_integer(km))
    }
}

/// Compiles turn-then-walk instructions into absolute moves, starting from an
/// explicitly declared heading (left unstated, such routes are ambiguous).
pub fn compile_heading_relative(initial: Direction, steps: &[Step]) -> MovementPath {
    let mut heading = initial;
    let mut moves = Vec::new();
    for step in steps {
        match step {
            Step::Walk(magnitude) => moves.push(Move {
                direction: heading,
                magnitude: *magnitude,
            }),
            Step::Turn(Turn::Right) => heading = heading.right(),
            Step::Turn(Turn::Left) => heading = heading.left(),
            Step::Turn(Turn::Back) => heading = heading.inverse(),
        }
    }
    MovementPath::from_moves(moves)
}

/// Generates a small random axis-aligned path; handy for property tests and
/// demo data. Lengths range over `0..=max_moves`, magnitudes over
/// `0..=max_km` whole kilometers.
pub fn random_path(seed: u64, max_moves: usize, max_km: i64) -> MovementPath {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let len = rng.gen_range(0..=max_moves);
    let moves = (0..len)
        .map(|_| {
            Move::km(
                DIRECTIONS[rng.gen_range(0..DIRECTIONS.len())],
                rng.gen_range(0..=max_km),
            )
        })
        .collect();
    MovementPath::from_moves(moves)
}
