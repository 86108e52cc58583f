use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use crate::{Error, Result};

/// Scene significance label.
///
/// `Suspect` never appears in the source scene corpus; it is only added by
/// [`augment_aspects`](super::augment_aspects).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Aspect {
    CrimeScene,
    Victim,
    DeathCause,
    Evidence,
    Perpetrator,
    Motive,
    Suspect,
    None,
}

impl Aspect {
    pub const ALL: [Aspect; 8] = [
        Aspect::CrimeScene,
        Aspect::Victim,
        Aspect::DeathCause,
        Aspect::Evidence,
        Aspect::Perpetrator,
        Aspect::Motive,
        Aspect::Suspect,
        Aspect::None,
    ];

    pub fn label(self) -> &'static str {
        match self {
            Aspect::CrimeScene => "Crime scene",
            Aspect::Victim => "Victim",
            Aspect::DeathCause => "Death cause",
            Aspect::Evidence => "Evidence",
            Aspect::Perpetrator => "Perpetrator",
            Aspect::Motive => "Motive",
            Aspect::Suspect => "Suspect",
            Aspect::None => "None",
        }
    }

    /// Parses a label from the source scene corpus, where `Suspect` is not a
    /// valid value.
    pub fn from_source_label(s: &str) -> Result<Aspect> {
        match s.parse()? {
            Aspect::Suspect => Err(Error::UnknownAspect(s.to_string())),
            a => Ok(a),
        }
    }
}

impl fmt::Display for Aspect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for Aspect {
    type Err = Error;

    fn from_str(s: &str) -> Result<Aspect> {
        let key: String = s
            .chars()
            .filter(|c| c.is_ascii_alphabetic())
            .map(|c| c.to_ascii_lowercase())
            .collect();
        Ok(match key.as_str() {
            "crimescene" => Aspect::CrimeScene,
            "victim" => Aspect::Victim,
            "deathcause" => Aspect::DeathCause,
            "evidence" => Aspect::Evidence,
            "perpetrator" => Aspect::Perpetrator,
            "motive" => Aspect::Motive,
            "suspect" => Aspect::Suspect,
            "none" => Aspect::None,
            _ => return Err(Error::UnknownAspect(s.to_string())),
        })
    }
}

/// A set of aspects in which `None` excludes every other value.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct AspectSet(BTreeSet<Aspect>);

impl AspectSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn none() -> Self {
        Self(BTreeSet::from([Aspect::None]))
    }

    /// Adds an aspect. Adding a real aspect drops `None`; adding `None` to a
    /// set that already carries a real aspect is a no-op.
    pub fn insert(&mut self, aspect: Aspect) {
        if aspect == Aspect::None {
            if self.0.is_empty() {
                self.0.insert(Aspect::None);
            }
        } else {
            self.0.remove(&Aspect::None);
            self.0.insert(aspect);
        }
    }

    pub fn extend(&mut self, other: &AspectSet) {
        for &a in &other.0 {
            self.insert(a);
        }
    }

    pub fn contains(&self, aspect: Aspect) -> bool {
        self.0.contains(&aspect)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = Aspect> + '_ {
        self.0.iter().copied()
    }

    /// Parses a `;`-separated list. With `source` set, `Suspect` is rejected.
    pub fn parse_list(field: &str, source: bool) -> Result<AspectSet> {
        let mut set = BTreeSet::new();
        for part in crate::tsv::split_set(field) {
            let a = if source {
                Aspect::from_source_label(part)?
            } else {
                part.parse()?
            };
            set.insert(a);
        }
        if set.contains(&Aspect::None) && set.len() > 1 {
            return Err(Error::InvalidAspectSet(field.to_string()));
        }
        Ok(AspectSet(set))
    }
}

impl fmt::Display for AspectSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, a) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            f.write_str(a.label())?;
        }
        Ok(())
    }
}

impl FromIterator<Aspect> for AspectSet {
    fn from_iter<I: IntoIterator<Item = Aspect>>(iter: I) -> Self {
        let mut s = AspectSet::new();
        for a in iter {
            s.insert(a);
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_parse_back() {
        for a in Aspect::ALL {
            assert_eq!(a.label().parse::<Aspect>().unwrap(), a);
        }
        assert_eq!("Crime Scene".parse::<Aspect>().unwrap(), Aspect::CrimeScene);
        assert_eq!("death_cause".parse::<Aspect>().unwrap(), Aspect::DeathCause);
    }

    #[test]
    fn source_labels_exclude_suspect() {
        assert!(matches!(Aspect::from_source_label("Suspect"), Err(Error::UnknownAspect(_))));
        assert!(matches!(AspectSet::parse_list("Victim;Witness", true), Err(Error::UnknownAspect(s)) if s == "Witness"));
    }

    #[test]
    fn none_is_exclusive() {
        let mut s = AspectSet::none();
        s.insert(Aspect::Victim);
        assert_eq!(s.to_string(), "Victim");
        s.insert(Aspect::None);
        assert_eq!(s.to_string(), "Victim");
        assert!(AspectSet::parse_list("None;Victim", true).is_err());
    }

    #[test]
    fn multi_valued_split() {
        let s = AspectSet::parse_list("Victim;Evidence", true).unwrap();
        let expected: AspectSet = [Aspect::Victim, Aspect::Evidence].into_iter().collect();
        assert_eq!(s, expected);
        assert_eq!(AspectSet::parse_list("Crime scene", true).unwrap().to_string(), "Crime scene");
        assert_eq!(AspectSet::parse_list("None", true).unwrap(), AspectSet::none());
    }
}
