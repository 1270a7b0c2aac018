//! The six NASA-TLX workload dimensions and a fixed-size container keyed by them.

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// One workload dimension. Variant order is the canonical order used
/// everywhere (pair enumeration, CSV columns, JSON maps).
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Dimension {
    MentalDemand,
    PhysicalDemand,
    TemporalDemand,
    Performance,
    Effort,
    Frustration,
}

impl Dimension {
    pub const COUNT: usize = 6;

    pub const ALL: [Dimension; Dimension::COUNT] = [
        Dimension::MentalDemand,
        Dimension::PhysicalDemand,
        Dimension::TemporalDemand,
        Dimension::Performance,
        Dimension::Effort,
        Dimension::Frustration,
    ];

    /// Position in canonical order.
    pub const fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(index: usize) -> Option<Dimension> {
        Dimension::ALL.get(index).copied()
    }

    /// Wire identifier, e.g. `mental_demand`.
    pub const fn id(self) -> &'static str {
        match self {
            Dimension::MentalDemand => "mental_demand",
            Dimension::PhysicalDemand => "physical_demand",
            Dimension::TemporalDemand => "temporal_demand",
            Dimension::Performance => "performance",
            Dimension::Effort => "effort",
            Dimension::Frustration => "frustration",
        }
    }

    /// Column suffix used by the CSV export (`rating_mental`, ...).
    pub const fn short_name(self) -> &'static str {
        match self {
            Dimension::MentalDemand => "mental",
            Dimension::PhysicalDemand => "physical",
            Dimension::TemporalDemand => "temporal",
            Dimension::Performance => "performance",
            Dimension::Effort => "effort",
            Dimension::Frustration => "frustration",
        }
    }

    pub const fn title(self) -> &'static str {
        match self {
            Dimension::MentalDemand => "Mental Demand",
            Dimension::PhysicalDemand => "Physical Demand",
            Dimension::TemporalDemand => "Temporal Demand",
            Dimension::Performance => "Performance",
            Dimension::Effort => "Effort",
            Dimension::Frustration => "Frustration",
        }
    }

    pub const fn description(self) -> &'static str {
        match self {
            Dimension::MentalDemand => {
                "How much mental and perceptual activity was required (e.g. thinking, deciding, \
                 calculating, remembering, looking, searching)? Was the task easy or demanding, \
                 simple or complex?"
            }
            Dimension::PhysicalDemand => {
                "How much physical activity was required (e.g. pushing, pulling, turning, \
                 controlling, activating)? Was the task easy or demanding, slow or brisk, slack \
                 or strenuous?"
            }
            Dimension::TemporalDemand => {
                "How much time pressure did you feel due to the rate or pace at which the task \
                 elements occurred? Was the pace slow and leisurely or rapid and frantic?"
            }
            Dimension::Performance => {
                "How successful do you think you were in accomplishing the goals of the task? \
                 How satisfied were you with your performance in accomplishing these goals?"
            }
            Dimension::Effort => {
                "How hard did you have to work (mentally and physically) to accomplish your \
                 level of performance?"
            }
            Dimension::Frustration => {
                "How insecure, discouraged, irritated, stressed and annoyed versus secure, \
                 gratified, content, relaxed and complacent did you feel during the task?"
            }
        }
    }

    /// Label at the 0 end of the slider.
    pub const fn low_anchor(self) -> &'static str {
        match self {
            Dimension::Performance => "Good",
            _ => "Low",
        }
    }

    /// Label at the 100 end of the slider. Performance is inverted on screen
    /// only; the stored value is always the raw slider position.
    pub const fn high_anchor(self) -> &'static str {
        match self {
            Dimension::Performance => "Poor",
            _ => "High",
        }
    }

    pub fn descriptor(self) -> DimensionDescriptor {
        DimensionDescriptor {
            id: self,
            title: self.title(),
            description: self.description(),
            low_anchor: self.low_anchor(),
            high_anchor: self.high_anchor(),
        }
    }
}

impl fmt::Display for Dimension {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Presentation data handed to participants when they join.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionDescriptor {
    pub id: Dimension,
    pub title: &'static str,
    pub description: &'static str,
    pub low_anchor: &'static str,
    pub high_anchor: &'static str,
}

pub fn descriptors() -> Vec<DimensionDescriptor> {
    Dimension::ALL.iter().map(|d| d.descriptor()).collect()
}

/// A value for every dimension, stored in canonical order.
///
/// Serializes as a JSON object keyed by dimension id in canonical order.
/// Deserialization is strict: all six keys, each exactly once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct PerDimension<T>(pub [T; Dimension::COUNT]);

impl<T> PerDimension<T> {
    pub fn from_fn(mut f: impl FnMut(Dimension) -> T) -> Self {
        PerDimension(Dimension::ALL.map(&mut f))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Dimension, &T)> {
        Dimension::ALL.iter().copied().zip(self.0.iter())
    }

    pub fn values(&self) -> &[T; Dimension::COUNT] {
        &self.0
    }

    pub fn map<U>(&self, mut f: impl FnMut(Dimension, &T) -> U) -> PerDimension<U> {
        PerDimension::from_fn(|d| f(d, &self.0[d.index()]))
    }
}

impl<T> Index<Dimension> for PerDimension<T> {
    type Output = T;

    fn index(&self, d: Dimension) -> &T {
        &self.0[d.index()]
    }
}

impl<T> IndexMut<Dimension> for PerDimension<T> {
    fn index_mut(&mut self, d: Dimension) -> &mut T {
        &mut self.0[d.index()]
    }
}

impl<T: Serialize> Serialize for PerDimension<T> {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(Dimension::COUNT))?;
        for (d, v) in self.iter() {
            map.serialize_entry(d.id(), v)?;
        }
        map.end()
    }
}

impl<'de, T: Deserialize<'de>> Deserialize<'de> for PerDimension<T> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PerDimensionVisitor<T>(std::marker::PhantomData<T>);

        impl<'de, T: Deserialize<'de>> Visitor<'de> for PerDimensionVisitor<T> {
            type Value = PerDimension<T>;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("an object with one entry per workload dimension")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> Result<Self::Value, A::Error> {
                let mut slots: [Option<T>; Dimension::COUNT] = Default::default();
                while let Some(d) = map.next_key::<Dimension>()? {
                    if slots[d.index()].is_some() {
                        return Err(de::Error::custom(format_args!("duplicate dimension {d}")));
                    }
                    slots[d.index()] = Some(map.next_value()?);
                }
                if let Some(i) = slots.iter().position(Option::is_none) {
                    return Err(de::Error::custom(format_args!(
                        "missing dimension {}",
                        Dimension::ALL[i]
                    )));
                }
                Ok(PerDimension(slots.map(|s| s.expect("checked above"))))
            }
        }

        deserializer.deserialize_map(PerDimensionVisitor(std::marker::PhantomData))
    }
}
