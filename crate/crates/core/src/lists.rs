//! Colours, colour lists and list assignments.
//!
//! Lists are subsets of a small universe `{1, ..., u}` with `u <= 8`. The
//! four-colour recursion works over `L0 = {1, 2, 3, 4}`; the five-choosability
//! baseline uses `{1, ..., 5}`.

use std::collections::BTreeMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{NearTriangulation, Vertex};

pub const MAX_COLOURS: u8 = 8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Color(pub u8);

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Set of colours stored as a bitmask; bit `c - 1` holds colour `c`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ColorList(u8);

impl ColorList {
    pub const EMPTY: ColorList = ColorList(0);
    /// The common list `{1, 2, 3, 4}`.
    pub const L0: ColorList = ColorList(0b1111);

    /// `{1, ..., universe}`.
    pub fn full(universe: u8) -> Self {
        assert!(universe <= MAX_COLOURS);
        ColorList(((1u16 << universe) - 1) as u8)
    }

    pub fn singleton(c: Color) -> Self {
        ColorList::EMPTY.with(c)
    }

    pub fn from_colors<I: IntoIterator<Item = Color>>(it: I) -> Self {
        it.into_iter().fold(ColorList::EMPTY, |l, c| l.with(c))
    }

    pub fn from_bits(bits: u8) -> Self {
        ColorList(bits)
    }

    /// Bitmask code, also the list's position in enumeration order.
    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn contains(self, c: Color) -> bool {
        (1..=MAX_COLOURS).contains(&c.0) && self.0 & (1 << (c.0 - 1)) != 0
    }

    pub fn with(self, c: Color) -> Self {
        assert!((1..=MAX_COLOURS).contains(&c.0), "colour {c} out of range");
        ColorList(self.0 | 1 << (c.0 - 1))
    }

    pub fn without(self, c: Color) -> Self {
        if (1..=MAX_COLOURS).contains(&c.0) {
            ColorList(self.0 & !(1 << (c.0 - 1)))
        } else {
            self
        }
    }

    pub fn union(self, o: Self) -> Self {
        ColorList(self.0 | o.0)
    }

    pub fn intersection(self, o: Self) -> Self {
        ColorList(self.0 & o.0)
    }

    pub fn difference(self, o: Self) -> Self {
        ColorList(self.0 & !o.0)
    }

    pub fn is_subset(self, o: Self) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    /// Smallest colour in the list.
    pub fn min(self) -> Option<Color> {
        (self.0 != 0).then(|| Color(self.0.trailing_zeros() as u8 + 1))
    }

    pub fn iter(self) -> impl Iterator<Item = Color> {
        (1..=MAX_COLOURS).map(Color).filter(move |&c| self.contains(c))
    }

    /// For a 3-sublist of `L0`, the one colour of `L0` it lacks.
    pub fn missing_from_l0(self) -> Option<Color> {
        let gap = ColorList::L0.difference(self);
        (self.is_subset(ColorList::L0) && gap.len() == 1).then(|| gap.min().expect("one colour"))
    }

    /// All sublists of `{1..universe}` with exactly `size` colours, ascending by code.
    pub fn sublists(universe: u8, size: usize) -> impl Iterator<Item = ColorList> {
        let top = 1u16 << universe;
        (0..top).map(|b| ColorList(b as u8)).filter(move |l| l.len() == size)
    }
}

impl fmt::Debug for ColorList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ColorList {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for ColorList {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(self.iter())
    }
}

impl<'de> Deserialize<'de> for ColorList {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let colors = Vec::<u8>::deserialize(d)?;
        if let Some(bad) = colors.iter().find(|&&c| !(1..=MAX_COLOURS).contains(&c)) {
            return Err(serde::de::Error::custom(format!("colour {bad} outside 1..={MAX_COLOURS}")));
        }
        Ok(ColorList::from_colors(colors.into_iter().map(Color)))
    }
}

/// Vertex to list map. `v3_exclusion` records whether the list `L0 \ {alpha}`
/// is disallowed at `v3` (the default; only the wheel experiments lift it).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ListAssignment {
    lists: BTreeMap<Vertex, ColorList>,
    pub v3_exclusion: bool,
}

impl ListAssignment {
    pub fn new(lists: BTreeMap<Vertex, ColorList>) -> Self {
        ListAssignment { lists, v3_exclusion: true }
    }

    pub fn without_exclusion(mut self) -> Self {
        self.v3_exclusion = false;
        self
    }

    pub fn lists(&self) -> &BTreeMap<Vertex, ColorList> {
        &self.lists
    }

    pub fn get(&self, v: Vertex) -> Option<ColorList> {
        self.lists.get(&v).copied()
    }

    pub fn set(&mut self, v: Vertex, l: ColorList) {
        self.lists.insert(v, l);
    }

    /// Compact code: list bitmasks in vertex order.
    pub fn code(&self) -> Vec<u8> {
        self.lists.values().map(|l| l.bits()).collect()
    }

    /// `v1`, `v2` colours when both carry 1-lists.
    pub fn alpha_beta(&self, nt: &NearTriangulation) -> Option<(Color, Color)> {
        let a = self.get(nt.outer().v(1))?;
        let b = self.get(nt.outer().v(2))?;
        (a.len() == 1 && b.len() == 1).then(|| (a.min().unwrap(), b.min().unwrap()))
    }
}

impl Serialize for ListAssignment {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.lists.serialize(s)
    }
}

impl<'de> Deserialize<'de> for ListAssignment {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        Ok(ListAssignment::new(BTreeMap::deserialize(d)?))
    }
}

/// Vertex to colour map.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Colouring {
    pub colors: BTreeMap<Vertex, Color>,
}

impl Colouring {
    pub fn get(&self, v: Vertex) -> Option<Color> {
        self.colors.get(&v).copied()
    }

    pub fn set(&mut self, v: Vertex, c: Color) {
        self.colors.insert(v, c);
    }

    pub fn len(&self) -> usize {
        self.colors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.colors.is_empty()
    }

    /// Distinct colours used.
    pub fn palette(&self) -> ColorList {
        ColorList::from_colors(self.colors.values().copied())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ListError {
    #[error("vertex {0} has no list")]
    MissingVertexList(Vertex),
    #[error("list at vertex {vertex} leaves L0 = {{1,2,3,4}}")]
    OutsideL0 { vertex: Vertex },
    #[error("interior vertex {vertex} must carry L0, has {list}")]
    InteriorListNotFull { vertex: Vertex, list: ColorList },
    #[error("v{position} = {vertex} must carry a 1-list, has {list}")]
    RootListNotSingleton { vertex: Vertex, position: usize, list: ColorList },
    #[error("v1 and v2 share the colour {0}")]
    RootColoursEqual(Color),
    #[error("outer vertex {vertex} needs at least 3 colours, has {list}")]
    OuterListTooSmall { vertex: Vertex, list: ColorList },
    #[error("v3 = {vertex} carries the excluded list L0 \\ {{{alpha}}}")]
    ExcludedListAtV3 { vertex: Vertex, alpha: Color },
}

/// Checks the list conditions for the four-colour recursion: interior lists
/// are `L0`, `v1` and `v2` carry distinct 1-lists, every other outer vertex at
/// least three colours, and for `k > 3` (with the exclusion on) `alpha` lies in
/// `L(v3)`.
pub fn check_admissible(nt: &NearTriangulation, a: &ListAssignment) -> Result<(), ListError> {
    for v in nt.graph().vertices() {
        let l = a.get(v).ok_or(ListError::MissingVertexList(v))?;
        if !l.is_subset(ColorList::L0) {
            return Err(ListError::OutsideL0 { vertex: v });
        }
    }
    let outer = nt.outer();
    let mut root = [Color(0); 2];
    for (i, &v) in outer.vertices().iter().enumerate() {
        let list = a.lists[&v];
        if i < 2 {
            if list.len() != 1 {
                return Err(ListError::RootListNotSingleton { vertex: v, position: i + 1, list });
            }
            root[i] = list.min().expect("1-list");
            if i == 1 && root[0] == root[1] {
                return Err(ListError::RootColoursEqual(root[0]));
            }
        } else {
            if list.len() < 3 {
                return Err(ListError::OuterListTooSmall { vertex: v, list });
            }
            if i == 2 && a.v3_exclusion && nt.k() > 3 && !list.contains(root[0]) {
                return Err(ListError::ExcludedListAtV3 { vertex: v, alpha: root[0] });
            }
        }
    }
    for v in nt.interior() {
        let list = a.lists[&v];
        if list != ColorList::L0 {
            return Err(ListError::InteriorListNotFull { vertex: v, list });
        }
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnumerationMode {
    Exhaustive,
    Sample { seed: u64, count: usize },
}

/// Choices for each outer position of an admissible assignment.
#[derive(Clone, Debug)]
pub struct AssignmentSpace {
    outer: Vec<Vertex>,
    interior: Vec<Vertex>,
    exclusion: bool,
}

const BIG_LISTS: [ColorList; 5] =
    [ColorList(0b0111), ColorList(0b1011), ColorList(0b1101), ColorList(0b1110), ColorList(0b1111)];

impl AssignmentSpace {
    pub fn new(nt: &NearTriangulation, exclusion: bool) -> Self {
        AssignmentSpace { outer: nt.outer().vertices().to_vec(), interior: nt.interior().collect(), exclusion }
    }

    pub fn k(&self) -> usize {
        self.outer.len()
    }

    /// Options at outer position `i` (0-based) given `alpha`.
    pub fn options(&self, i: usize, alpha: Color) -> Vec<ColorList> {
        match i {
            0 => (1..=4).map(|c| ColorList::singleton(Color(c))).collect(),
            1 => (1..=4).filter(|&c| c != alpha.0).map(|c| ColorList::singleton(Color(c))).collect(),
            2 if self.exclusion && self.k() > 3 => BIG_LISTS.iter().copied().filter(|l| l.contains(alpha)).collect(),
            _ => BIG_LISTS.to_vec(),
        }
    }

    /// Number of admissible assignments.
    pub fn count(&self) -> u64 {
        let v3 = if self.exclusion && self.k() > 3 { 4 } else { 5 };
        12 * v3 * 5u64.pow(self.k() as u32 - 3)
    }

    /// Outer lists to an assignment; interior vertices get `L0`.
    pub fn assemble(&self, outer_lists: &[ColorList]) -> ListAssignment {
        let mut lists: BTreeMap<Vertex, ColorList> =
            self.outer.iter().copied().zip(outer_lists.iter().copied()).collect();
        for &v in &self.interior {
            lists.insert(v, ColorList::L0);
        }
        ListAssignment { lists, v3_exclusion: self.exclusion }
    }

    /// Every admissible outer list vector, in lexicographic order of
    /// `(position, list code)`.
    pub fn exhaustive(&self) -> ExhaustiveOuter<'_> {
        ExhaustiveOuter { space: self, idx: vec![0; self.k()], done: false }
    }

    /// `count` independent uniform draws.
    pub fn sample(&self, seed: u64, count: usize) -> Vec<Vec<ColorList>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let mut out = Vec::with_capacity(self.k());
                let mut alpha = Color(1);
                for i in 0..self.k() {
                    let opts = self.options(i, alpha);
                    let l = opts[rng.gen_range(0..opts.len())];
                    if i == 0 {
                        alpha = l.min().unwrap();
                    }
                    out.push(l);
                }
                out
            })
            .collect()
    }
}

pub struct ExhaustiveOuter<'a> {
    space: &'a AssignmentSpace,
    idx: Vec<usize>,
    done: bool,
}

impl Iterator for ExhaustiveOuter<'_> {
    type Item = Vec<ColorList>;

    fn next(&mut self) -> Option<Vec<ColorList>> {
        if self.done {
            return None;
        }
        let alpha = Color(self.idx[0] as u8 + 1);
        let out: Vec<ColorList> = (0..self.space.k()).map(|i| self.space.options(i, alpha)[self.idx[i]]).collect();
        // odometer, last position fastest
        let mut i = self.space.k();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            let alpha = Color(self.idx[0] as u8 + 1);
            self.idx[i] += 1;
            if self.idx[i] < self.space.options(i, alpha).len() {
                break;
            }
            self.idx[i] = 0;
        }
        Some(out)
    }
}

/// Admissible assignments of `nt` (with the `v3` exclusion in force).
pub fn enumerate_admissible(nt: &NearTriangulation, mode: EnumerationMode) -> Vec<ListAssignment> {
    let space = AssignmentSpace::new(nt, true);
    match mode {
        EnumerationMode::Exhaustive => space.exhaustive().map(|o| space.assemble(&o)).collect(),
        EnumerationMode::Sample { seed, count } => {
            space.sample(seed, count).iter().map(|o| space.assemble(o)).collect()
        }
    }
}
