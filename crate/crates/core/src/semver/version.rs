//! Semantic versions with SemVer 2.0 precedence.

use std::cmp::Ordering;
use std::fmt;
use std::hash::{Hash, Hasher};

use serde::{Deserialize, Serialize};

use crate::error::Error;

/// One dot-separated prerelease identifier. Numeric identifiers compare as
/// integers and precede every alphanumeric identifier.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Identifier {
    Numeric(u64),
    Alpha(String),
}

impl fmt::Display for Identifier {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Identifier::Numeric(n) => write!(f, "{n}"),
            Identifier::Alpha(s) => f.write_str(s),
        }
    }
}

/// A full version. Build metadata is carried for display but excluded from
/// comparison, equality, and hashing, per SemVer precedence rules.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Version {
    pub major: u64,
    pub minor: u64,
    pub patch: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prerelease: Vec<Identifier>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub build: Option<String>,
}

impl Version {
    pub fn new(major: u64, minor: u64, patch: u64) -> Self {
        Version {
            major,
            minor,
            patch,
            prerelease: Vec::new(),
            build: None,
        }
    }

    pub fn with_pre(major: u64, minor: u64, patch: u64, pre: Vec<Identifier>) -> Self {
        Version {
            major,
            minor,
            patch,
            prerelease: pre,
            build: None,
        }
    }

    pub fn is_prerelease(&self) -> bool {
        !self.prerelease.is_empty()
    }

    pub fn triple(&self) -> (u64, u64, u64) {
        (self.major, self.minor, self.patch)
    }

    /// The release with this version's numeric triple (prerelease stripped).
    pub fn release_of_triple(&self) -> Version {
        Version::new(self.major, self.minor, self.patch)
    }

    /// Smallest release strictly above this version's triple.
    pub fn next_patch(&self) -> Version {
        Version::new(self.major, self.minor, self.patch + 1)
    }

    /// The absolute floor of the version order: 0.0.0-0 precedes every
    /// other version, so it serves as the "no lower bound" marker.
    pub fn floor() -> Version {
        Version::with_pre(0, 0, 0, vec![Identifier::Numeric(0)])
    }
}

impl PartialEq for Version {
    fn eq(&self, other: &Self) -> bool {
        self.triple() == other.triple() && self.prerelease == other.prerelease
    }
}

impl Eq for Version {}

impl Hash for Version {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.triple().hash(state);
        self.prerelease.hash(state);
    }
}

impl Ord for Version {
    fn cmp(&self, other: &Self) -> Ordering {
        self.triple()
            .cmp(&other.triple())
            .then_with(|| match (self.prerelease.is_empty(), other.prerelease.is_empty()) {
                (true, true) => Ordering::Equal,
                (true, false) => Ordering::Greater, // release follows its prereleases
                (false, true) => Ordering::Less,
                (false, false) => self.prerelease.cmp(&other.prerelease),
            })
    }
}

impl PartialOrd for Version {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Version {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{}.{}", self.major, self.minor, self.patch)?;
        if !self.prerelease.is_empty() {
            write!(f, "-")?;
            for (i, id) in self.prerelease.iter().enumerate() {
                if i > 0 {
                    write!(f, ".")?;
                }
                write!(f, "{id}")?;
            }
        }
        if let Some(build) = &self.build {
            write!(f, "+{build}")?;
        }
        Ok(())
    }
}

fn parse_numeric(text: &str, part: &str) -> Result<u64, Error> {
    if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(Error::MalformedVersion(
            text.to_string(),
            format!("non-numeric component {part:?}"),
        ));
    }
    part.parse()
        .map_err(|_| Error::MalformedVersion(text.to_string(), format!("component {part:?} overflows")))
}

pub(crate) fn parse_identifier(text: &str, part: &str) -> Result<Identifier, Error> {
    if part.is_empty() {
        return Err(Error::MalformedVersion(
            text.to_string(),
            "empty prerelease identifier".to_string(),
        ));
    }
    if part.bytes().all(|b| b.is_ascii_digit()) {
        return Ok(Identifier::Numeric(part.parse().map_err(|_| {
            Error::MalformedVersion(text.to_string(), format!("identifier {part:?} overflows"))
        })?));
    }
    if !part
        .bytes()
        .all(|b| b.is_ascii_alphanumeric() || b == b'-')
    {
        return Err(Error::MalformedVersion(
            text.to_string(),
            format!("invalid identifier {part:?}"),
        ));
    }
    Ok(Identifier::Alpha(part.to_string()))
}

/// Parse a full `major.minor.patch[-pre][+build]` version. A single leading
/// `v` is tolerated; partial versions like "1.2" are rejected — ranges, not
/// versions, give those meaning.
pub fn parse_version(text: &str) -> Result<Version, Error> {
    let trimmed = text.trim();
    if trimmed.is_empty() {
        return Err(Error::MalformedVersion(text.to_string(), "empty".to_string()));
    }
    let body = trimmed
        .strip_prefix('v')
        .or_else(|| trimmed.strip_prefix('V'))
        .unwrap_or(trimmed);

    let (core, build) = match body.split_once('+') {
        Some((core, build)) => {
            if build.is_empty() {
                return Err(Error::MalformedVersion(
                    text.to_string(),
                    "empty build metadata".to_string(),
                ));
            }
            (core, Some(build.to_string()))
        }
        None => (body, None),
    };

    let (triple, pre) = match core.split_once('-') {
        Some((triple, pre)) => (triple, Some(pre)),
        None => (core, None),
    };

    let parts: Vec<&str> = triple.split('.').collect();
    if parts.len() != 3 {
        return Err(Error::MalformedVersion(
            text.to_string(),
            format!("expected 3 numeric components, found {}", parts.len()),
        ));
    }
    let major = parse_numeric(text, parts[0])?;
    let minor = parse_numeric(text, parts[1])?;
    let patch = parse_numeric(text, parts[2])?;

    let prerelease = match pre {
        Some(pre) => pre
            .split('.')
            .map(|p| parse_identifier(text, p))
            .collect::<Result<Vec<_>, _>>()?,
        None => Vec::new(),
    };

    Ok(Version {
        major,
        minor,
        patch,
        prerelease,
        build,
    })
}
