use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub const DIGIT_COUNT: usize = 10;

/// The two colors a digit can wear in a round. `Yellow < Grey`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Color {
    Yellow,
    Grey,
}

impl Color {
    pub const ALL: [Color; 2] = [Color::Yellow, Color::Grey];

    pub fn letter(self) -> char {
        match self {
            Color::Yellow => 'Y',
            Color::Grey => 'G',
        }
    }

    pub fn from_letter(c: char) -> Option<Color> {
        match c {
            'Y' => Some(Color::Yellow),
            'G' => Some(Color::Grey),
            _ => None,
        }
    }

    pub fn other(self) -> Color {
        match self {
            Color::Yellow => Color::Grey,
            Color::Grey => Color::Yellow,
        }
    }

    pub(crate) fn bit(self) -> u8 {
        match self {
            Color::Yellow => 0b01,
            Color::Grey => 0b10,
        }
    }
}

impl fmt::Display for Color {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Color::Yellow => "yellow",
            Color::Grey => "grey",
        })
    }
}

/// A PIN digit, 0 through 9.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(transparent)]
pub struct Digit(u8);

impl Digit {
    pub fn new(value: u8) -> Result<Digit> {
        if usize::from(value) < DIGIT_COUNT {
            Ok(Digit(value))
        } else {
            Err(Error::DigitOutOfRange(value))
        }
    }

    pub fn value(self) -> u8 {
        self.0
    }

    pub fn index(self) -> usize {
        usize::from(self.0)
    }

    pub fn all() -> impl Iterator<Item = Digit> {
        (0..DIGIT_COUNT as u8).map(Digit)
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl<'de> Deserialize<'de> for Digit {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = u8::deserialize(deserializer)?;
        Digit::new(value).map_err(serde::de::Error::custom)
    }
}

/// Index of a physical button on the pad. Range checks happen against the
/// session's button count, which this type does not know.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ButtonId(pub usize);

impl ButtonId {
    pub fn index(self) -> usize {
        self.0
    }

    pub fn check(self, n_buttons: usize) -> Result<ButtonId> {
        if self.0 < n_buttons {
            Ok(self)
        } else {
            Err(Error::ButtonOutOfRange {
                button: self.0,
                n_buttons,
            })
        }
    }
}

impl fmt::Display for ButtonId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The color of every digit for one round, indexed by digit.
///
/// Always contains both colors; a monochrome round carries no information
/// and is rejected on construction. Text form is ten letters over `{Y, G}`,
/// e.g. `YGGYYGYGGY`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Coloring([Color; DIGIT_COUNT]);

impl Coloring {
    pub fn new(colors: [Color; DIGIT_COUNT]) -> Result<Coloring> {
        let yellow = colors.iter().filter(|&&c| c == Color::Yellow).count();
        if yellow == 0 || yellow == DIGIT_COUNT {
            return Err(Error::InvalidColoring(format!(
                "monochrome coloring {}",
                colors.iter().map(|c| c.letter()).collect::<String>()
            )));
        }
        Ok(Coloring(colors))
    }

    /// Builds a coloring where exactly the digits in `yellow` are Yellow.
    pub fn from_yellow(yellow: DigitSet) -> Result<Coloring> {
        let mut colors = [Color::Grey; DIGIT_COUNT];
        for d in yellow.iter() {
            colors[d.index()] = Color::Yellow;
        }
        Coloring::new(colors)
    }

    pub fn color_of(&self, digit: Digit) -> Color {
        self.0[digit.index()]
    }

    pub fn colors(&self) -> &[Color; DIGIT_COUNT] {
        &self.0
    }

    pub fn digits_with(&self, color: Color) -> DigitSet {
        Digit::all()
            .filter(|&d| self.color_of(d) == color)
            .collect()
    }

    pub fn yellow_count(&self) -> usize {
        self.0.iter().filter(|&&c| c == Color::Yellow).count()
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.0 {
            write!(f, "{}", c.letter())?;
        }
        Ok(())
    }
}

impl FromStr for Coloring {
    type Err = Error;

    fn from_str(s: &str) -> Result<Coloring> {
        let letters: Vec<char> = s.chars().collect();
        if letters.len() != DIGIT_COUNT {
            return Err(Error::InvalidColoring(format!(
                "expected {DIGIT_COUNT} letters over {{Y,G}}, got {:?}",
                s
            )));
        }
        let mut colors = [Color::Yellow; DIGIT_COUNT];
        for (slot, &ch) in colors.iter_mut().zip(&letters) {
            *slot = Color::from_letter(ch).ok_or_else(|| {
                Error::InvalidColoring(format!("unexpected letter {ch:?} in {s:?}"))
            })?;
        }
        Coloring::new(colors)
    }
}

impl Serialize for Coloring {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Coloring {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A set of digits as a 10-bit mask.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct DigitSet(u16);

impl DigitSet {
    const MASK: u16 = (1 << DIGIT_COUNT) - 1;

    pub const fn empty() -> DigitSet {
        DigitSet(0)
    }

    pub const fn all() -> DigitSet {
        DigitSet(Self::MASK)
    }

    pub fn from_bits(bits: u16) -> DigitSet {
        DigitSet(bits & Self::MASK)
    }

    pub fn bits(self) -> u16 {
        self.0
    }

    pub fn insert(&mut self, digit: Digit) {
        self.0 |= 1 << digit.value();
    }

    pub fn remove(&mut self, digit: Digit) {
        self.0 &= !(1 << digit.value());
    }

    pub fn contains(self, digit: Digit) -> bool {
        self.0 & (1 << digit.value()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn intersection(self, other: DigitSet) -> DigitSet {
        DigitSet(self.0 & other.0)
    }

    pub fn is_subset(self, other: DigitSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Digit> {
        Digit::all().filter(move |&d| self.contains(d))
    }

    /// The only member, if there is exactly one.
    pub fn single(self) -> Option<Digit> {
        if self.len() == 1 {
            self.iter().next()
        } else {
            None
        }
    }
}

impl FromIterator<Digit> for DigitSet {
    fn from_iter<I: IntoIterator<Item = Digit>>(iter: I) -> Self {
        let mut set = DigitSet::empty();
        for d in iter {
            set.insert(d);
        }
        set
    }
}

impl fmt::Debug for DigitSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set()
            .entries(self.iter().map(|d| d.value()))
            .finish()
    }
}
