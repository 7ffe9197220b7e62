//! npm-style dependency constraints parsed into normalized interval sets.
//!
//! The grammar covers what registry manifests actually contain: exact
//! versions, x-ranges (`1.x`, `*`), tilde and caret shorthands, comparator
//! primitives, hyphen ranges, space-separated intersections, `||` unions,
//! and the `latest` dist-tag. Every form desugars to intervals over the
//! version order; the result is sorted, disjoint, and merged, so set-level
//! questions (membership, emptiness, window intersection) are exact
//! interval geometry rather than sampling.
//!
//! Prerelease versions follow registry semantics: a range only admits a
//! prerelease whose numeric triple was explicitly named with a prerelease
//! tag somewhere in the source text. Those triples are the set's
//! `prerelease_anchors`.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::version::{parse_identifier, Identifier, Version};
use crate::error::Error;

/// One contiguous span of the version order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: Version,
    pub lower_inclusive: bool,
    /// `None` means unbounded above.
    pub upper: Option<Version>,
    pub upper_inclusive: bool,
}

impl Interval {
    /// The whole version order.
    pub fn full() -> Interval {
        Interval {
            lower: Version::floor(),
            lower_inclusive: true,
            upper: None,
            upper_inclusive: false,
        }
    }

    pub fn point(v: Version) -> Interval {
        Interval {
            lower: v.clone(),
            lower_inclusive: true,
            upper: Some(v),
            upper_inclusive: true,
        }
    }

    /// Half-open `[lower, upper)`.
    pub fn half_open(lower: Version, upper: Version) -> Interval {
        Interval {
            lower,
            lower_inclusive: true,
            upper: Some(upper),
            upper_inclusive: false,
        }
    }

    pub fn unbounded_above(lower: Version, lower_inclusive: bool) -> Interval {
        Interval {
            lower,
            lower_inclusive,
            upper: None,
            upper_inclusive: false,
        }
    }

    pub fn below(upper: Version, upper_inclusive: bool) -> Interval {
        Interval {
            lower: Version::floor(),
            lower_inclusive: true,
            upper: Some(upper),
            upper_inclusive,
        }
    }

    pub fn is_empty(&self) -> bool {
        match &self.upper {
            None => false,
            Some(u) => match self.lower.cmp(u) {
                Ordering::Greater => true,
                Ordering::Equal => !(self.lower_inclusive && self.upper_inclusive),
                Ordering::Less => false,
            },
        }
    }

    pub fn is_point(&self) -> bool {
        self.lower_inclusive && self.upper_inclusive && self.upper.as_ref() == Some(&self.lower)
    }

    fn is_full(&self) -> bool {
        self.upper.is_none() && self.lower_inclusive && self.lower == Version::floor()
    }

    /// Geometric membership; prerelease gating lives on the set.
    pub fn contains(&self, v: &Version) -> bool {
        let above = v > &self.lower || (v == &self.lower && self.lower_inclusive);
        let below = match &self.upper {
            None => true,
            Some(u) => v < u || (v == u && self.upper_inclusive),
        };
        above && below
    }

    /// Intersection, or `None` when the overlap is empty.
    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let (lower, lower_inclusive) = match self.lower.cmp(&other.lower) {
            Ordering::Greater => (self.lower.clone(), self.lower_inclusive),
            Ordering::Less => (other.lower.clone(), other.lower_inclusive),
            Ordering::Equal => (
                self.lower.clone(),
                self.lower_inclusive && other.lower_inclusive,
            ),
        };
        let (upper, upper_inclusive) = match (&self.upper, &other.upper) {
            (None, None) => (None, false),
            (Some(u), None) => (Some(u.clone()), self.upper_inclusive),
            (None, Some(u)) => (Some(u.clone()), other.upper_inclusive),
            (Some(a), Some(b)) => match a.cmp(b) {
                Ordering::Less => (Some(a.clone()), self.upper_inclusive),
                Ordering::Greater => (Some(b.clone()), other.upper_inclusive),
                Ordering::Equal => (Some(a.clone()), self.upper_inclusive && other.upper_inclusive),
            },
        };
        let joined = Interval {
            lower,
            lower_inclusive,
            upper,
            upper_inclusive,
        };
        if joined.is_empty() {
            None
        } else {
            Some(joined)
        }
    }

    /// Overlapping or sharing a closed bound, assuming `self.lower ≤ other.lower`.
    fn mergeable_with(&self, other: &Interval) -> bool {
        match &self.upper {
            None => true,
            Some(u) => match u.cmp(&other.lower) {
                Ordering::Greater => true,
                Ordering::Equal => self.upper_inclusive || other.lower_inclusive,
                Ordering::Less => false,
            },
        }
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_full() {
            return f.write_str("*");
        }
        if self.is_point() {
            return write!(f, "{}", self.lower);
        }
        let mut parts: Vec<String> = Vec::new();
        if !(self.lower == Version::floor() && self.lower_inclusive) {
            let op = if self.lower_inclusive { ">=" } else { ">" };
            parts.push(format!("{op}{}", self.lower));
        }
        if let Some(u) = &self.upper {
            let op = if self.upper_inclusive { "<=" } else { "<" };
            parts.push(format!("{op}{u}"));
        }
        if parts.is_empty() {
            f.write_str("*")
        } else {
            f.write_str(&parts.join(" "))
        }
    }
}

/// A parsed constraint: sorted disjoint intervals plus the prerelease
/// triples the source text named.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintIntervalSet {
    pub intervals: Vec<Interval>,
    pub prerelease_anchors: BTreeSet<(u64, u64, u64)>,
    pub source_text: String,
    min_admitted: Version,
}

impl ConstraintIntervalSet {
    /// The smallest version the constraint admits.
    pub fn min_version(&self) -> &Version {
        &self.min_admitted
    }

    /// Raw lower bound of the first interval — the written bound, before
    /// any successor adjustment for exclusive bounds.
    pub fn first_lower_bound(&self) -> &Version {
        &self.intervals[0].lower
    }

    /// Full membership: interval geometry plus the prerelease anchor rule.
    pub fn contains(&self, v: &Version) -> bool {
        if v.is_prerelease() && !self.prerelease_anchors.contains(&v.triple()) {
            return false;
        }
        self.intervals.iter().any(|iv| iv.contains(v))
    }

    /// Whether any admitted span intersects `window` (pure geometry).
    pub fn intersects(&self, window: &Interval) -> bool {
        self.intervals.iter().any(|iv| iv.intersect(window).is_some())
    }

    /// Canonical text form; reparsing yields the identical interval list.
    pub fn render(&self) -> String {
        self.intervals
            .iter()
            .map(|iv| iv.to_string())
            .collect::<Vec<_>>()
            .join(" || ")
    }
}

/// Smallest version in `interval` that the anchor rule admits, if any.
fn min_admitted_in(
    interval: &Interval,
    anchors: &BTreeSet<(u64, u64, u64)>,
) -> Option<Version> {
    let admitted = |v: &Version| !v.is_prerelease() || anchors.contains(&v.triple());
    let mut candidates: Vec<Version> = Vec::new();
    if interval.lower_inclusive {
        candidates.push(interval.lower.clone());
    } else if interval.lower.is_prerelease() {
        // ">1.2.3-beta" → next in the prerelease order is "1.2.3-beta.0"
        let mut succ = interval.lower.clone();
        succ.prerelease.push(Identifier::Numeric(0));
        candidates.push(succ);
    }
    candidates.push(interval.lower.release_of_triple());
    candidates.push(interval.lower.next_patch());
    for &(maj, min, pat) in anchors {
        candidates.push(Version::with_pre(maj, min, pat, vec![Identifier::Numeric(0)]));
    }
    candidates
        .into_iter()
        .filter(|c| interval.contains(c) && admitted(c))
        .min()
}

/// An x-range component pattern: wildcards and missing components are `None`.
#[derive(Debug, Clone)]
struct Partial {
    major: Option<u64>,
    minor: Option<u64>,
    patch: Option<u64>,
    pre: Vec<Identifier>,
}

impl Partial {
    fn exact(&self) -> Option<Version> {
        match (self.major, self.minor, self.patch) {
            (Some(maj), Some(min), Some(pat)) => Some(Version {
                major: maj,
                minor: min,
                patch: pat,
                prerelease: self.pre.clone(),
                build: None,
            }),
            _ => None,
        }
    }

    fn zero_filled(&self) -> Version {
        Version::new(
            self.major.unwrap_or(0),
            self.minor.unwrap_or(0),
            self.patch.unwrap_or(0),
        )
    }
}

fn malformed(text: &str, why: &str) -> Error {
    Error::MalformedRange(text.to_string(), why.to_string())
}

fn parse_component(text: &str, part: &str) -> Result<Option<u64>, Error> {
    if matches!(part, "x" | "X" | "*") {
        return Ok(None);
    }
    if part.is_empty() || !part.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed(text, &format!("bad version component {part:?}")));
    }
    part.parse()
        .map(Some)
        .map_err(|_| malformed(text, &format!("component {part:?} overflows")))
}

fn parse_partial(full_text: &str, token: &str) -> Result<Partial, Error> {
    let token = token
        .strip_prefix('v')
        .or_else(|| token.strip_prefix('V'))
        .unwrap_or(token);
    // build metadata never affects precedence; drop it before desugaring
    let token = token.split('+').next().unwrap_or(token);
    if token.is_empty() {
        return Ok(Partial {
            major: None,
            minor: None,
            patch: None,
            pre: Vec::new(),
        });
    }
    let (head, pre_text) = match token.split_once('-') {
        Some((head, pre)) => (head, Some(pre)),
        None => (token, None),
    };
    let comps: Vec<&str> = head.split('.').collect();
    if comps.len() > 3 {
        return Err(malformed(full_text, "more than 3 version components"));
    }
    let major = parse_component(full_text, comps[0])?;
    let mut minor = match comps.get(1) {
        Some(c) => parse_component(full_text, c)?,
        None => None,
    };
    let mut patch = match comps.get(2) {
        Some(c) => parse_component(full_text, c)?,
        None => None,
    };
    // components after a wildcard carry no information
    if major.is_none() {
        minor = None;
    }
    if minor.is_none() {
        patch = None;
    }
    let pre = match pre_text {
        Some(pre) => {
            if major.is_none() || minor.is_none() || patch.is_none() {
                return Err(malformed(full_text, "prerelease tag on a partial version"));
            }
            if pre.is_empty() {
                return Err(malformed(full_text, "empty prerelease tag"));
            }
            pre.split('.')
                .map(|p| parse_identifier(full_text, p))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|_| malformed(full_text, &format!("bad prerelease tag {pre:?}")))?
        }
        None => Vec::new(),
    };
    Ok(Partial {
        major,
        minor,
        patch,
        pre,
    })
}

fn note_anchor(p: &Partial, anchors: &mut BTreeSet<(u64, u64, u64)>) {
    if !p.pre.is_empty() {
        anchors.insert((p.major.unwrap(), p.minor.unwrap(), p.patch.unwrap()));
    }
}

/// `1.2.3`, `1.2`, `1.x`, `*` — exact or block range.
fn desugar_plain(p: &Partial, anchors: &mut BTreeSet<(u64, u64, u64)>) -> Option<Interval> {
    note_anchor(p, anchors);
    match (p.major, p.minor, p.patch) {
        (None, _, _) => Some(Interval::full()),
        (Some(maj), None, _) => Some(Interval::half_open(
            Version::new(maj, 0, 0),
            Version::new(maj + 1, 0, 0),
        )),
        (Some(maj), Some(min), None) => Some(Interval::half_open(
            Version::new(maj, min, 0),
            Version::new(maj, min + 1, 0),
        )),
        (Some(_), Some(_), Some(_)) => Some(Interval::point(p.exact().unwrap())),
    }
}

/// `~1.2.3` — patch freedom within the stated minor.
fn desugar_tilde(p: &Partial, anchors: &mut BTreeSet<(u64, u64, u64)>) -> Option<Interval> {
    note_anchor(p, anchors);
    match (p.major, p.minor, p.patch) {
        (None, _, _) => Some(Interval::full()),
        (Some(maj), None, _) => Some(Interval::half_open(
            Version::new(maj, 0, 0),
            Version::new(maj + 1, 0, 0),
        )),
        (Some(maj), Some(min), None) => Some(Interval::half_open(
            Version::new(maj, min, 0),
            Version::new(maj, min + 1, 0),
        )),
        (Some(maj), Some(min), Some(_)) => Some(Interval::half_open(
            p.exact().unwrap(),
            Version::new(maj, min + 1, 0),
        )),
    }
}

/// `^1.2.3` — freedom up to the next change of the leftmost nonzero component.
fn desugar_caret(p: &Partial, anchors: &mut BTreeSet<(u64, u64, u64)>) -> Option<Interval> {
    note_anchor(p, anchors);
    match (p.major, p.minor, p.patch) {
        (None, _, _) => Some(Interval::full()),
        (Some(0), None, _) => Some(Interval::half_open(
            Version::new(0, 0, 0),
            Version::new(1, 0, 0),
        )),
        (Some(maj), None, _) => Some(Interval::half_open(
            Version::new(maj, 0, 0),
            Version::new(maj + 1, 0, 0),
        )),
        (Some(0), Some(min), None) => Some(Interval::half_open(
            Version::new(0, min, 0),
            Version::new(0, min + 1, 0),
        )),
        (Some(maj), Some(min), None) => Some(Interval::half_open(
            Version::new(maj, min, 0),
            Version::new(maj + 1, 0, 0),
        )),
        (Some(maj), Some(min), Some(pat)) => {
            let upper = if maj > 0 {
                Version::new(maj + 1, 0, 0)
            } else if min > 0 {
                Version::new(0, min + 1, 0)
            } else {
                Version::new(0, 0, pat + 1)
            };
            Some(Interval::half_open(p.exact().unwrap(), upper))
        }
    }
}

/// `>`, `>=`, `<`, `<=` applied to a possibly-partial version.
fn desugar_comparator(
    op: &str,
    p: &Partial,
    anchors: &mut BTreeSet<(u64, u64, u64)>,
) -> Option<Interval> {
    note_anchor(p, anchors);
    if let Some(v) = p.exact() {
        return Some(match op {
            ">=" => Interval::unbounded_above(v, true),
            ">" => Interval::unbounded_above(v, false),
            "<" => Interval::below(v, false),
            "<=" => Interval::below(v, true),
            _ => unreachable!("comparator op"),
        });
    }
    // partial operand: the comparator applies to the whole block it names
    let low = p.zero_filled();
    let next_block = match (p.major, p.minor) {
        (None, _) => None, // bare wildcard
        (Some(maj), None) => Some(Version::new(maj + 1, 0, 0)),
        (Some(maj), Some(min)) => Some(Version::new(maj, min + 1, 0)),
    };
    match op {
        ">=" => Some(Interval::unbounded_above(low, true)),
        "<=" => match next_block {
            // "<=1.2" means anything below the 1.2 block's end
            Some(end) => Some(Interval::below(end, false)),
            None => Some(Interval::full()),
        },
        ">" => match next_block {
            // ">1.2" means the blocks after 1.2
            Some(end) => Some(Interval::unbounded_above(end, true)),
            None => None, // ">*" admits nothing
        },
        "<" => {
            if p.major.is_none() {
                None // "<*" admits nothing
            } else {
                Some(Interval::below(low, false))
            }
        }
        _ => unreachable!("comparator op"),
    }
}

/// `1.2.3 - 2.3` — inclusive span with partial-aware end handling.
fn desugar_hyphen(
    full_text: &str,
    a: &str,
    b: &str,
    anchors: &mut BTreeSet<(u64, u64, u64)>,
) -> Result<Option<Interval>, Error> {
    let pa = parse_partial(full_text, a)?;
    let pb = parse_partial(full_text, b)?;
    note_anchor(&pa, anchors);
    note_anchor(&pb, anchors);
    let lower = match pa.exact() {
        Some(v) => v,
        None => {
            if pa.major.is_none() {
                Version::floor()
            } else {
                pa.zero_filled()
            }
        }
    };
    let (upper, upper_inclusive) = match (pb.major, pb.minor, pb.patch) {
        (None, _, _) => (None, false),
        (Some(maj), None, _) => (Some(Version::new(maj + 1, 0, 0)), false),
        (Some(maj), Some(min), None) => (Some(Version::new(maj, min + 1, 0)), false),
        (Some(_), Some(_), Some(_)) => (Some(pb.exact().unwrap()), true),
    };
    let iv = Interval {
        lower,
        lower_inclusive: true,
        upper,
        upper_inclusive,
    };
    Ok(if iv.is_empty() { None } else { Some(iv) })
}

fn desugar_simple(
    full_text: &str,
    token: &str,
    anchors: &mut BTreeSet<(u64, u64, u64)>,
) -> Result<Option<Interval>, Error> {
    if let Some(rest) = token.strip_prefix('^') {
        return Ok(desugar_caret(&parse_partial(full_text, rest)?, anchors));
    }
    if let Some(rest) = token.strip_prefix('~') {
        // "~>" is a legacy spelling of tilde
        let rest = rest.strip_prefix('>').unwrap_or(rest);
        return Ok(desugar_tilde(&parse_partial(full_text, rest)?, anchors));
    }
    for op in [">=", "<=", ">", "<"] {
        if let Some(rest) = token.strip_prefix(op) {
            return Ok(desugar_comparator(
                op,
                &parse_partial(full_text, rest)?,
                anchors,
            ));
        }
    }
    if let Some(rest) = token.strip_prefix('=') {
        return Ok(desugar_plain(&parse_partial(full_text, rest)?, anchors));
    }
    Ok(desugar_plain(&parse_partial(full_text, token)?, anchors))
}

const OPERATOR_TOKENS: [&str; 7] = [">=", "<=", ">", "<", "=", "~", "^"];

/// Re-join tokens like `>= 1.2.3` that whitespace tokenization split apart.
fn join_operator_tokens(tokens: Vec<&str>) -> Vec<String> {
    let mut out: Vec<String> = Vec::new();
    let mut pending_op: Option<&str> = None;
    for tok in tokens {
        if let Some(op) = pending_op.take() {
            out.push(format!("{op}{tok}"));
            continue;
        }
        if OPERATOR_TOKENS.contains(&tok) {
            pending_op = Some(tok);
        } else {
            out.push(tok.to_string());
        }
    }
    if let Some(op) = pending_op {
        out.push(op.to_string()); // dangling operator; fails downstream
    }
    out
}

/// One `||` alternative → at most one interval (intersection of its simples).
fn parse_alternative(
    full_text: &str,
    alt: &str,
    anchors: &mut BTreeSet<(u64, u64, u64)>,
) -> Result<Option<Interval>, Error> {
    let raw: Vec<&str> = alt.split_whitespace().collect();
    if raw.is_empty() {
        return Ok(Some(Interval::full()));
    }
    if raw.contains(&"-") {
        let tokens = raw;
        if tokens.len() == 3 && tokens[1] == "-" {
            return desugar_hyphen(full_text, tokens[0], tokens[2], anchors);
        }
        return Err(malformed(full_text, "misplaced hyphen range"));
    }
    let tokens = join_operator_tokens(raw);
    let mut acc: Option<Interval> = Some(Interval::full());
    for tok in &tokens {
        let simple = desugar_simple(full_text, tok, anchors)?;
        acc = match (acc, simple) {
            (Some(a), Some(b)) => a.intersect(&b),
            _ => None,
        };
    }
    Ok(acc)
}

fn looks_like_dist_tag(text: &str) -> bool {
    let mut chars = text.chars();
    match chars.next() {
        Some(c) if c.is_ascii_alphabetic() => {}
        _ => return false,
    }
    chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'))
}

fn unsupported_source(text: &str) -> bool {
    let t = text.trim();
    t.contains("://")
        || [
            "git+", "git:", "github:", "file:", "http:", "https:", "link:", "workspace:", "npm:",
        ]
        .iter()
        .any(|p| t.starts_with(p))
        || t.starts_with("./")
        || t.starts_with("../")
        || t.starts_with('/')
}

/// Parse a constraint into a normalized, non-empty interval set.
pub fn parse_range(text: &str) -> Result<ConstraintIntervalSet, Error> {
    let trimmed = text.trim();
    if unsupported_source(trimmed) {
        return Err(Error::UnsupportedConstraint(
            text.to_string(),
            "non-registry source".to_string(),
        ));
    }
    if trimmed == "latest" {
        return build_set(text, vec![Interval::full()], BTreeSet::new());
    }

    let mut anchors: BTreeSet<(u64, u64, u64)> = BTreeSet::new();
    let mut intervals: Vec<Interval> = Vec::new();
    let mut failure: Option<Error> = None;
    for alt in trimmed.split("||") {
        match parse_alternative(trimmed, alt, &mut anchors) {
            Ok(Some(iv)) => intervals.push(iv),
            Ok(None) => {}
            Err(e) => {
                failure = Some(e);
                break;
            }
        }
    }
    if let Some(e) = failure {
        // a bare word that is not a range is a dist-tag we don't resolve
        if looks_like_dist_tag(trimmed) {
            return Err(Error::UnsupportedConstraint(
                text.to_string(),
                "unresolvable dist-tag".to_string(),
            ));
        }
        return Err(e);
    }
    build_set(text, intervals, anchors)
}

fn build_set(
    source: &str,
    intervals: Vec<Interval>,
    anchors: BTreeSet<(u64, u64, u64)>,
) -> Result<ConstraintIntervalSet, Error> {
    // sort (inclusive lower first at equal versions), then merge touching spans
    let mut sorted: Vec<Interval> = intervals.into_iter().filter(|iv| !iv.is_empty()).collect();
    sorted.sort_by(|a, b| {
        a.lower
            .cmp(&b.lower)
            .then_with(|| b.lower_inclusive.cmp(&a.lower_inclusive))
    });
    let mut merged: Vec<Interval> = Vec::new();
    for iv in sorted {
        if let Some(last) = merged.last_mut() {
            if last.mergeable_with(&iv) {
                let extend = match (&last.upper, &iv.upper) {
                    (None, _) => false,
                    (_, None) => true,
                    (Some(a), Some(b)) => match b.cmp(a) {
                        Ordering::Greater => true,
                        Ordering::Less => false,
                        Ordering::Equal => iv.upper_inclusive && !last.upper_inclusive,
                    },
                };
                if extend {
                    last.upper = iv.upper;
                    last.upper_inclusive = iv.upper_inclusive;
                }
                continue;
            }
        }
        merged.push(iv);
    }

    // drop spans that admit no version at all (e.g. ">2.0.0 <2.0.1")
    let mut kept: Vec<Interval> = Vec::new();
    let mut min_admitted: Option<Version> = None;
    for iv in merged {
        if let Some(m) = min_admitted_in(&iv, &anchors) {
            if min_admitted.is_none() {
                min_admitted = Some(m);
            }
            kept.push(iv);
        }
    }
    let min_admitted = match min_admitted {
        Some(m) => m,
        None => return Err(Error::EmptyRange(source.to_string())),
    };

    // an anchor only matters if its prerelease band touches a kept span
    let anchors: BTreeSet<(u64, u64, u64)> = anchors
        .into_iter()
        .filter(|&(maj, min, pat)| {
            let band = Interval {
                lower: Version::with_pre(maj, min, pat, vec![Identifier::Numeric(0)]),
                lower_inclusive: true,
                upper: Some(Version::new(maj, min, pat)),
                upper_inclusive: false,
            };
            kept.iter().any(|iv| iv.intersect(&band).is_some())
        })
        .collect();

    Ok(ConstraintIntervalSet {
        intervals: kept,
        prerelease_anchors: anchors,
        source_text: source.trim().to_string(),
        min_admitted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semver::version::parse_version;

    fn set(s: &str) -> ConstraintIntervalSet {
        parse_range(s).unwrap_or_else(|e| panic!("parse {s:?}: {e}"))
    }

    fn v(s: &str) -> Version {
        parse_version(s).unwrap()
    }

    fn spans(s: &str) -> Vec<String> {
        set(s).intervals.iter().map(|iv| iv.to_string()).collect()
    }

    #[test]
    fn caret_and_tilde_bounds() {
        assert_eq!(spans("^1.2.3"), [">=1.2.3 <2.0.0"]);
        assert_eq!(spans("^2.3.4"), [">=2.3.4 <3.0.0"]);
        assert_eq!(spans("~2.3.4"), [">=2.3.4 <2.4.0"]);
        assert_eq!(spans("^0.2.3"), [">=0.2.3 <0.3.0"]);
        assert_eq!(spans("^0.0.3"), [">=0.0.3 <0.0.4"]);
        assert_eq!(spans("~1"), [">=1.0.0 <2.0.0"]);
        assert_eq!(spans("~>1.2.3"), [">=1.2.3 <1.3.0"]);
    }

    #[test]
    fn x_ranges_and_exact() {
        assert_eq!(spans("*"), ["*"]);
        assert_eq!(spans(""), ["*"]);
        assert_eq!(spans("latest"), ["*"]);
        assert_eq!(spans("1.x"), [">=1.0.0 <2.0.0"]);
        assert_eq!(spans("1.x.x"), [">=1.0.0 <2.0.0"]);
        assert_eq!(spans("1.2.x"), [">=1.2.0 <1.3.0"]);
        assert_eq!(spans("1.2"), [">=1.2.0 <1.3.0"]);
        assert_eq!(spans("1.2.3"), ["1.2.3"]);
        assert_eq!(spans("=1.2.3"), ["1.2.3"]);
        assert_eq!(spans("v1.2.3"), ["1.2.3"]);
    }

    #[test]
    fn comparators_and_partial_operands() {
        assert_eq!(spans(">=1.2.3"), [">=1.2.3"]);
        assert_eq!(spans(">1.2.3"), [">1.2.3"]);
        assert_eq!(spans("<2.0.0"), ["<2.0.0"]);
        assert_eq!(spans("<=2.3.4"), ["<=2.3.4"]);
        assert_eq!(spans(">1.2"), [">=1.3.0"]);
        assert_eq!(spans(">1"), [">=2.0.0"]);
        assert_eq!(spans("<=1.2"), ["<1.3.0"]);
        assert_eq!(spans(">= 1.2.3"), [">=1.2.3"]);
    }

    #[test]
    fn unions_intersections_hyphens() {
        assert_eq!(spans("1.2.3 || 3.0.0"), ["1.2.3", "3.0.0"]);
        assert_eq!(spans(">=2.0.0 <4.0.0"), [">=2.0.0 <4.0.0"]);
        assert_eq!(spans("1.2.3 - 2.3.4"), [">=1.2.3 <=2.3.4"]);
        assert_eq!(spans("1.2 - 2.3"), [">=1.2.0 <2.4.0"]);
        assert_eq!(spans("^1.2.3 || ^2.0.0"), [">=1.2.3 <3.0.0"]); // touching spans merge
        assert_eq!(spans("1.2.3 || 1.2.3"), ["1.2.3"]);
    }

    #[test]
    fn empty_and_unsupported() {
        assert!(matches!(
            parse_range(">2.0.0 <1.0.0"),
            Err(Error::EmptyRange(_))
        ));
        assert!(matches!(
            parse_range(">1.2.3 <1.2.4"),
            Err(Error::EmptyRange(_))
        ));
        assert!(matches!(
            parse_range("git+https://github.com/a/b.git"),
            Err(Error::UnsupportedConstraint(..))
        ));
        assert!(matches!(
            parse_range("next"),
            Err(Error::UnsupportedConstraint(..))
        ));
        assert!(matches!(
            parse_range("1.2.3.4"),
            Err(Error::MalformedRange(..))
        ));
    }

    #[test]
    fn min_version_uses_successors_for_exclusive_bounds() {
        assert_eq!(set("^1.2.3").min_version(), &v("1.2.3"));
        assert_eq!(set(">1.2.3").min_version(), &v("1.2.3").next_patch());
        assert_eq!(set("*").min_version(), &v("0.0.0"));
        assert_eq!(set("<2.0.0").min_version(), &v("0.0.0"));
        assert_eq!(set(">1.2.3-beta").min_version(), &v("1.2.3-beta.0"));
        assert_eq!(set(">=1.2.3-beta").min_version(), &v("1.2.3-beta"));
    }

    #[test]
    fn prerelease_admission_is_anchored() {
        let s = set("^1.2.3-beta.2");
        assert!(s.contains(&v("1.2.3-beta.2")));
        assert!(s.contains(&v("1.2.3-rc.1")));
        assert!(s.contains(&v("1.2.3")));
        assert!(s.contains(&v("1.9.0")));
        // prerelease of a different triple is never admitted
        assert!(!s.contains(&v("1.5.0-alpha")));
        // plain ranges admit no prereleases at all
        assert!(!set("^1.2.3").contains(&v("1.5.0-alpha")));
        assert!(!set("*").contains(&v("1.0.0-rc.1")));
    }

    #[test]
    fn membership_matches_bounds() {
        let s = set("^1.2.3");
        assert!(s.contains(&v("1.2.3")));
        assert!(s.contains(&v("1.99.99")));
        assert!(!s.contains(&v("2.0.0")));
        assert!(!s.contains(&v("1.2.2")));
        let u = set("1.2.3 || 3.0.0");
        assert!(u.contains(&v("1.2.3")));
        assert!(u.contains(&v("3.0.0")));
        assert!(!u.contains(&v("2.0.0")));
    }

    #[test]
    fn render_reparses_to_identical_intervals() {
        for s in [
            "^1.2.3",
            "~2.3.4",
            "1.2.3 || 3.0.0",
            ">=2.0.0 <4.0.0",
            "1.2.3 - 2.3.4",
            "*",
            "<=2.3.4",
            "^0.0.3",
            "1.2.3-beta.1",
            ">=1.2.3-beta <2.0.0",
        ] {
            let first = set(s);
            let second = parse_range(&first.render()).unwrap();
            assert_eq!(first.intervals, second.intervals, "round trip of {s:?}");
            assert_eq!(
                first.prerelease_anchors, second.prerelease_anchors,
                "anchors of {s:?}"
            );
        }
    }
}
