use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{ButtonId, Color};
use crate::error::{Error, Result};

/// Largest button count the engine accepts. Keeps total mappings
/// representable as a `u64` bit mask.
pub const MAX_BUTTONS: usize = 63;

pub(crate) fn check_button_count(n_buttons: usize) -> Result<()> {
    if n_buttons < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 buttons (one per color), got {n_buttons}"
        )));
    }
    if n_buttons > MAX_BUTTONS {
        return Err(Error::InvalidConfig(format!(
            "at most {MAX_BUTTONS} buttons supported, got {n_buttons}"
        )));
    }
    Ok(())
}

/// Number of total button-to-color mappings that use both colors: `2^n - 2`.
pub fn count_valid_mappings(n_buttons: usize) -> Result<u64> {
    check_button_count(n_buttons)?;
    Ok((1u64 << n_buttons) - 2)
}

/// A per-button color assignment, possibly partial.
///
/// Text form uses one character per button: `Y`, `G`, or `?` for an
/// unassigned button.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ButtonMapping {
    colors: Vec<Option<Color>>,
}

impl ButtonMapping {
    pub fn unassigned(n_buttons: usize) -> ButtonMapping {
        ButtonMapping {
            colors: vec![None; n_buttons],
        }
    }

    /// A total mapping. Fails unless both colors are used.
    pub fn total(colors: Vec<Color>) -> Result<ButtonMapping> {
        let mapping = ButtonMapping {
            colors: colors.into_iter().map(Some).collect(),
        };
        if !mapping.is_valid_total() {
            return Err(Error::InvalidConfig(format!(
                "total mapping {mapping} must assign at least one yellow and one grey button"
            )));
        }
        Ok(mapping)
    }

    /// Total mapping from a bit mask: bit `b` set means button `b` is Grey.
    pub fn from_grey_mask(n_buttons: usize, mask: u64) -> Result<ButtonMapping> {
        check_button_count(n_buttons)?;
        ButtonMapping::total(
            (0..n_buttons)
                .map(|b| {
                    if mask >> b & 1 == 1 {
                        Color::Grey
                    } else {
                        Color::Yellow
                    }
                })
                .collect(),
        )
    }

    /// The fixed two-button pad: left yellow, right grey.
    pub fn classic() -> ButtonMapping {
        ButtonMapping {
            colors: vec![Some(Color::Yellow), Some(Color::Grey)],
        }
    }

    pub fn n_buttons(&self) -> usize {
        self.colors.len()
    }

    pub fn get(&self, button: ButtonId) -> Option<Color> {
        self.colors.get(button.index()).copied().flatten()
    }

    pub fn set(&mut self, button: ButtonId, color: Option<Color>) -> Result<()> {
        button.check(self.colors.len())?;
        self.colors[button.index()] = color;
        Ok(())
    }

    pub fn iter(&self) -> impl Iterator<Item = (ButtonId, Option<Color>)> + '_ {
        self.colors
            .iter()
            .enumerate()
            .map(|(b, &c)| (ButtonId(b), c))
    }

    pub fn assigned(&self) -> impl Iterator<Item = (ButtonId, Color)> + '_ {
        self.iter().filter_map(|(b, c)| c.map(|c| (b, c)))
    }

    pub fn buttons_with(&self, color: Color) -> Vec<ButtonId> {
        self.assigned()
            .filter(|&(_, c)| c == color)
            .map(|(b, _)| b)
            .collect()
    }

    pub fn is_total(&self) -> bool {
        self.colors.iter().all(Option::is_some)
    }

    pub fn is_empty(&self) -> bool {
        self.colors.iter().all(Option::is_none)
    }

    pub fn is_valid_total(&self) -> bool {
        self.is_total()
            && self.colors.contains(&Some(Color::Yellow))
            && self.colors.contains(&Some(Color::Grey))
    }

    /// True when the assigned buttons can still be completed into a total
    /// mapping that uses both colors.
    pub fn is_extendable(&self) -> bool {
        !self.is_total() || self.is_valid_total()
    }

    /// Every assignment in `self` also appears in `other`.
    pub fn is_restriction_of(&self, other: &ButtonMapping) -> bool {
        self.colors.len() == other.colors.len()
            && self
                .colors
                .iter()
                .zip(&other.colors)
                .all(|(mine, theirs)| mine.is_none() || mine == theirs)
    }

    /// Union of two mappings over the same buttons. Returns `None` when a
    /// button is assigned different colors.
    pub fn union(&self, other: &ButtonMapping) -> Option<ButtonMapping> {
        if self.colors.len() != other.colors.len() {
            return None;
        }
        let mut colors = Vec::with_capacity(self.colors.len());
        for (&a, &b) in self.colors.iter().zip(&other.colors) {
            colors.push(match (a, b) {
                (Some(x), Some(y)) if x != y => return None,
                (Some(x), _) | (None, Some(x)) => Some(x),
                (None, None) => None,
            });
        }
        Some(ButtonMapping { colors })
    }
}

impl fmt::Display for ButtonMapping {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.colors {
            write!(f, "{}", c.map_or('?', Color::letter))?;
        }
        Ok(())
    }
}

impl FromStr for ButtonMapping {
    type Err = Error;

    fn from_str(s: &str) -> Result<ButtonMapping> {
        let colors = s
            .chars()
            .map(|ch| match ch {
                '?' => Ok(None),
                _ => Color::from_letter(ch).map(Some).ok_or_else(|| {
                    Error::InvalidArgument(format!("unexpected mapping letter {ch:?} in {s:?}"))
                }),
            })
            .collect::<Result<Vec<_>>>()?;
        check_button_count(colors.len())?;
        Ok(ButtonMapping { colors })
    }
}

impl Serialize for ButtonMapping {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ButtonMapping {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts total mappings with both colors by listing every assignment.
    fn brute_force_count(n: usize) -> u64 {
        let mut count = 0;
        for mask in 0..(1u64 << n) {
            let colors: Vec<Color> = (0..n)
                .map(|b| {
                    if mask >> b & 1 == 1 {
                        Color::Grey
                    } else {
                        Color::Yellow
                    }
                })
                .collect();
            if colors.contains(&Color::Yellow) && colors.contains(&Color::Grey) {
                count += 1;
            }
        }
        count
    }

    #[test]
    fn valid_mapping_counts() {
        assert_eq!(count_valid_mappings(9), Ok(510));
        assert_eq!(count_valid_mappings(2), Ok(2));
        assert_eq!(count_valid_mappings(4), Ok(brute_force_count(4)));
        assert_eq!(brute_force_count(4), 14);
        for n in 2..=10 {
            assert_eq!(count_valid_mappings(n), Ok(brute_force_count(n)), "n = {n}");
        }
    }

    #[test]
    fn too_few_buttons() {
        assert!(matches!(
            count_valid_mappings(1),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            count_valid_mappings(0),
            Err(Error::InvalidConfig(_))
        ));
        assert!(matches!(
            count_valid_mappings(64),
            Err(Error::InvalidConfig(_))
        ));
    }

    #[test]
    fn total_mapping_needs_both_colors() {
        assert!(ButtonMapping::total(vec![Color::Yellow, Color::Yellow]).is_err());
        assert!(ButtonMapping::total(vec![Color::Yellow, Color::Grey]).is_ok());
        assert!(ButtonMapping::from_grey_mask(3, 0).is_err());
        assert!(ButtonMapping::from_grey_mask(3, 0b111).is_err());
        assert_eq!(
            ButtonMapping::from_grey_mask(3, 0b010).unwrap().to_string(),
            "YGY"
        );
    }

    #[test]
    fn restriction_and_union() {
        let full: ButtonMapping = "YGGY".parse().unwrap();
        let part: ButtonMapping = "Y??Y".parse().unwrap();
        let clash: ButtonMapping = "G???".parse().unwrap();
        assert!(part.is_restriction_of(&full));
        assert!(!clash.is_restriction_of(&full));
        assert_eq!(
            part.union(&"?G??".parse().unwrap()).unwrap().to_string(),
            "YG?Y"
        );
        assert!(part.union(&clash).is_none());
    }

    #[test]
    fn extendable() {
        assert!("Y??".parse::<ButtonMapping>().unwrap().is_extendable());
        assert!(!"YYY".parse::<ButtonMapping>().unwrap().is_extendable());
        assert!("YGY".parse::<ButtonMapping>().unwrap().is_extendable());
    }
}
