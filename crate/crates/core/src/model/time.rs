use std::fmt;
use std::str::FromStr;

use chrono::{DateTime, FixedOffset, NaiveDate, SecondsFormat, TimeZone, Utc};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ModelError;

/// An instant with an explicit UTC offset.
///
/// Equality and ordering compare the instant; the offset is kept so the
/// original rendering survives a round trip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Timestamp(DateTime<FixedOffset>);

impl Timestamp {
    pub fn new(instant: DateTime<FixedOffset>) -> Self {
        Self(instant)
    }

    /// Parses an RFC 3339 date-time with offset, or a bare `YYYY-MM-DD` date,
    /// which is taken as midnight UTC.
    pub fn parse(s: &str) -> Result<Self, ModelError> {
        if let Ok(dt) = DateTime::parse_from_rfc3339(s) {
            return Ok(Self(dt));
        }
        if let Ok(date) = NaiveDate::parse_from_str(s, "%Y-%m-%d") {
            if s.len() == 10 {
                let midnight = date.and_hms_opt(0, 0, 0).expect("midnight is valid");
                return Ok(Self(Utc.from_utc_datetime(&midnight).fixed_offset()));
            }
        }
        Err(ModelError::InvalidTimestamp(s.to_string()))
    }

    pub fn as_datetime(&self) -> DateTime<FixedOffset> {
        self.0
    }
}

impl fmt::Display for Timestamp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_rfc3339_opts(SecondsFormat::AutoSi, true))
    }
}

impl FromStr for Timestamp {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::parse(s)
    }
}

impl From<DateTime<FixedOffset>> for Timestamp {
    fn from(dt: DateTime<FixedOffset>) -> Self {
        Self(dt)
    }
}

impl Serialize for Timestamp {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Timestamp {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Self::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn date_only_is_midnight_utc() {
        let t = Timestamp::parse("2023-03-03").unwrap();
        assert_eq!(t.to_string(), "2023-03-03T00:00:00Z");
    }

    #[test]
    fn keeps_offset_and_fraction() {
        let t = Timestamp::parse("2020-02-25T08:30:00.250-03:00").unwrap();
        assert_eq!(t.to_string(), "2020-02-25T08:30:00.250-03:00");
    }

    #[test]
    fn offset_is_mandatory() {
        assert!(Timestamp::parse("2023-03-03T10:00:00").is_err());
        assert!(Timestamp::parse("03/03/2023").is_err());
        assert!(Timestamp::parse("2023-3-3").is_err());
    }

    #[test]
    fn orders_by_instant() {
        let a = Timestamp::parse("2023-03-03T12:00:00+02:00").unwrap();
        let b = Timestamp::parse("2023-03-03T11:00:00Z").unwrap();
        assert!(a < b);
    }
}
