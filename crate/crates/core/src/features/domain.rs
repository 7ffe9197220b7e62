//! Keyword-domain clustering.
//!
//! Packages are grouped into 10 domains from their keyword lists: score
//! keyword pairs and triples by pointwise mutual information over package
//! co-occurrence, keep the strongest, union overlapping n-grams into
//! keyword groups, build term-frequency vectors over the 15 most common
//! group representatives, and run Lloyd's k-means. Every step is
//! deterministic given the seed, and package iteration is always in name
//! order, so assignments do not depend on input order.

use std::collections::{BTreeMap, BTreeSet};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::ecosystem::EcosystemSnapshot;
use crate::rng::stream;
use crate::scalar::Scalar;
use crate::{Real, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainParams {
    pub k: usize,
    /// N-grams seen in fewer packages than this are discarded.
    pub min_ngram_count: usize,
    /// How many top-PMI n-grams survive scoring.
    pub top_ngrams: usize,
    pub vocab_size: usize,
    pub max_iterations: usize,
    pub tolerance: Real,
}

impl Default for DomainParams {
    fn default() -> Self {
        DomainParams {
            k: 10,
            min_ngram_count: 10,
            top_ngrams: 2000,
            vocab_size: 15,
            max_iterations: 300,
            tolerance: 1e-4,
        }
    }
}

/// Keywords that co-occurred strongly, with the group's display name.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct KeywordGroup {
    pub representative: String,
    pub members: BTreeSet<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DomainModel {
    pub ngram_groups: Vec<KeywordGroup>,
    pub vocabulary: Vec<String>,
    pub centroids: Vec<Vec<Real>>,
    pub seed: u64,
    /// Set when the corpus had too few distinct keywords to cluster; every
    /// package then lands in domain 1.
    pub degenerate: bool,
    #[serde(skip)]
    member_to_group: BTreeMap<String, usize>,
}

impl DomainModel {
    /// Model that places every package in domain 1; the fallback when a
    /// corpus is too thin to cluster.
    pub fn single_domain(seed: u64) -> DomainModel {
        DomainModel {
            ngram_groups: Vec::new(),
            vocabulary: Vec::new(),
            centroids: Vec::new(),
            seed,
            degenerate: true,
            member_to_group: BTreeMap::new(),
        }
    }

    fn rebuild_index(&mut self) {
        self.member_to_group = self
            .ngram_groups
            .iter()
            .enumerate()
            .flat_map(|(i, g)| g.members.iter().map(move |m| (m.clone(), i)))
            .collect();
    }

    /// Rebuild the transient member index after deserialization.
    pub fn after_load(mut self) -> DomainModel {
        self.rebuild_index();
        self
    }

    /// Term frequencies of group representatives in a keyword list.
    pub fn tf_vector(&self, keywords: &[String]) -> Vec<Real> {
        let mut v = vec![0.0; self.vocabulary.len()];
        for kw in keywords {
            let kw = normalize_keyword(kw);
            if let Some(&g) = self.member_to_group.get(&kw) {
                let rep = &self.ngram_groups[g].representative;
                if let Some(j) = self.vocabulary.iter().position(|w| w == rep) {
                    v[j] += 1.0;
                }
            }
        }
        v
    }

    /// Domain id in 1..=k: nearest centroid to the package's TF vector,
    /// lowest centroid index on ties.
    pub fn assign(&self, keywords: &[String]) -> u32 {
        if self.degenerate || self.centroids.is_empty() {
            return 1;
        }
        let v = self.tf_vector(keywords);
        nearest_centroid(&self.centroids, &v) as u32 + 1
    }
}

fn normalize_keyword(kw: &str) -> String {
    kw.trim().to_ascii_lowercase()
}

/// Base-2 pointwise mutual information over package probabilities:
/// log2( p(all words together) / Π p(word) ).
pub fn pmi(joint_count: usize, word_counts: &[usize], n_packages: usize) -> Real {
    let n = n_packages as Real;
    let joint = joint_count as Real / n;
    let independent: Real = word_counts.iter().map(|&c| c as Real / n).product();
    (joint / independent).log2()
}

fn keyword_sets(s: &EcosystemSnapshot) -> Vec<BTreeSet<String>> {
    s.packages
        .values()
        .map(|p| {
            p.keywords
                .iter()
                .map(|k| normalize_keyword(k))
                .filter(|k| !k.is_empty())
                .collect()
        })
        .collect()
}

/// All 2- and 3-element subsets of one package's keyword set, as sorted
/// tuples, so an n-gram is counted once per package that contains it.
fn subsets_of(set: &BTreeSet<String>) -> Vec<Vec<&str>> {
    let words: Vec<&str> = set.iter().map(String::as_str).collect();
    let mut out = Vec::new();
    for i in 0..words.len() {
        for j in (i + 1)..words.len() {
            out.push(vec![words[i], words[j]]);
            for l in (j + 1)..words.len() {
                out.push(vec![words[i], words[j], words[l]]);
            }
        }
    }
    out
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> UnionFind {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, x: usize) -> usize {
        if self.parent[x] != x {
            let root = self.find(self.parent[x]);
            self.parent[x] = root;
        }
        self.parent[x]
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // lower root wins, keeping grouping order-independent
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

fn squared_distance<F: Scalar>(a: &[F], b: &[F]) -> F {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .fold(F::zero(), |acc, d| acc + d)
}

fn nearest_centroid<F: Scalar>(centroids: &[Vec<F>], point: &[F]) -> usize {
    let mut best = 0;
    let mut best_d = squared_distance(&centroids[0], point);
    for (i, c) in centroids.iter().enumerate().skip(1) {
        let d = squared_distance(c, point);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Lloyd's algorithm with greedy farthest-point seeding. Returns centroids
/// and per-point assignments; deterministic for a fixed seed.
pub fn kmeans<F: Scalar>(
    points: &[Vec<F>],
    k: usize,
    seed: u64,
    max_iterations: usize,
    tolerance: F,
) -> (Vec<Vec<F>>, Vec<usize>) {
    assert!(!points.is_empty() && k >= 1);
    let dim = points[0].len();

    // seeding: random first center, then repeatedly the point farthest
    // from every chosen center (lowest index on ties)
    let mut rng = stream(seed, &["domain", "kmeans", "init"]);
    let first = rng.gen_range(0..points.len());
    let mut centroids: Vec<Vec<F>> = vec![points[first].clone()];
    while centroids.len() < k {
        let mut far_idx = 0;
        let mut far_d = F::neg_infinity();
        for (i, p) in points.iter().enumerate() {
            let d = centroids
                .iter()
                .map(|c| squared_distance(c, p))
                .fold(F::infinity(), F::min);
            if d > far_d {
                far_d = d;
                far_idx = i;
            }
        }
        centroids.push(points[far_idx].clone());
    }

    let mut assignment = vec![0usize; points.len()];
    for _ in 0..max_iterations {
        for (i, p) in points.iter().enumerate() {
            assignment[i] = nearest_centroid(&centroids, p);
        }
        let mut sums: Vec<Vec<F>> = vec![vec![F::zero(); dim]; k];
        let mut counts = vec![0usize; k];
        for (p, &a) in points.iter().zip(&assignment) {
            counts[a] += 1;
            for (s, &x) in sums[a].iter_mut().zip(p) {
                *s += x;
            }
        }
        let mut shift = F::zero();
        for c in 0..k {
            if counts[c] == 0 {
                continue; // empty cluster keeps its centroid
            }
            let inv = F::one() / F::from_count(counts[c]);
            let new: Vec<F> = sums[c].iter().map(|&s| s * inv).collect();
            shift = shift.max(squared_distance(&centroids[c], &new).sqrt());
            centroids[c] = new;
        }
        if shift < tolerance {
            break;
        }
    }
    for (i, p) in points.iter().enumerate() {
        assignment[i] = nearest_centroid(&centroids, p);
    }
    (centroids, assignment)
}

/// Fit the full domain pipeline on a snapshot's keyword corpus.
pub fn fit_domain_model(s: &EcosystemSnapshot, seed: u64) -> Result<DomainModel> {
    fit_domain_model_with(s, seed, &DomainParams::default())
}

pub fn fit_domain_model_with(
    s: &EcosystemSnapshot,
    seed: u64,
    params: &DomainParams,
) -> Result<DomainModel> {
    let sets = keyword_sets(s);
    let n_packages = sets.len().max(1);

    let mut word_df: BTreeMap<&str, usize> = BTreeMap::new();
    for set in &sets {
        for w in set {
            *word_df.entry(w.as_str()).or_default() += 1;
        }
    }

    // a corpus this thin cannot support co-occurrence clustering
    if word_df.len() < 10 {
        return Ok(DomainModel::single_domain(seed));
    }

    // count pair/triple co-occurrence document frequencies
    let mut ngram_df: BTreeMap<Vec<&str>, usize> = BTreeMap::new();
    for set in &sets {
        for gram in subsets_of(set) {
            *ngram_df.entry(gram).or_default() += 1;
        }
    }

    // frequency floor, then PMI scoring; top-N with deterministic ties
    let mut scored: Vec<(Vec<&str>, Real)> = ngram_df
        .iter()
        .filter(|&(_, &c)| c >= params.min_ngram_count)
        .map(|(gram, &c)| {
            let dfs: Vec<usize> = gram.iter().map(|w| word_df[w]).collect();
            (gram.clone(), pmi(c, &dfs, n_packages))
        })
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .expect("finite PMI")
            .then_with(|| a.0.cmp(&b.0))
    });
    scored.truncate(params.top_ngrams);

    // union n-grams sharing a keyword into groups
    let mut uf = UnionFind::new(scored.len());
    let mut by_word: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, (gram, _)) in scored.iter().enumerate() {
        for w in gram {
            by_word.entry(w).or_default().push(i);
        }
    }
    for indices in by_word.values() {
        for w in indices.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    let mut groups_map: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for (i, (gram, _)) in scored.iter().enumerate() {
        let root = uf.find(i);
        let entry = groups_map.entry(root).or_default();
        for w in gram {
            entry.insert((*w).to_string());
        }
    }

    // representative = most common member keyword, lexicographic on ties
    let mut groups: Vec<KeywordGroup> = groups_map
        .into_values()
        .map(|members| {
            let representative = members
                .iter()
                .max_by(|a, b| {
                    word_df[a.as_str()]
                        .cmp(&word_df[b.as_str()])
                        .then_with(|| b.as_str().cmp(a.as_str()))
                })
                .expect("non-empty group")
                .clone();
            KeywordGroup {
                representative,
                members,
            }
        })
        .collect();
    groups.sort_by(|a, b| a.representative.cmp(&b.representative));

    // vocabulary: top representatives by group document frequency
    let group_df = |g: &KeywordGroup| {
        sets.iter()
            .filter(|set| g.members.iter().any(|m| set.contains(m)))
            .count()
    };
    let mut rep_df: Vec<(String, usize)> = groups
        .iter()
        .map(|g| (g.representative.clone(), group_df(g)))
        .collect();
    rep_df.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    let vocabulary: Vec<String> = rep_df
        .into_iter()
        .take(params.vocab_size)
        .map(|(w, _)| w)
        .collect();

    let mut model = DomainModel {
        ngram_groups: groups,
        vocabulary,
        centroids: Vec::new(),
        seed,
        degenerate: false,
        member_to_group: BTreeMap::new(),
    };
    model.rebuild_index();

    if model.vocabulary.is_empty() {
        model.degenerate = true;
        return Ok(model);
    }

    let points: Vec<Vec<Real>> = s
        .packages
        .values()
        .map(|p| model.tf_vector(&p.keywords))
        .collect();
    let (centroids, _) = kmeans(
        &points,
        params.k,
        seed,
        params.max_iterations,
        params.tolerance,
    );
    model.centroids = centroids;
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ecosystem::test_support::*;

    #[test]
    fn pmi_matches_hand_arithmetic() {
        // pair in 1/4 of packages, each word never apart: joint 0.25 over
        // 0.25 * 0.25 → log2(4) = 2
        assert_eq!(pmi(25, &[25, 25], 100), 2.0);
        // independent words co-occurring at chance: PMI 0
        assert_eq!(pmi(25, &[50, 50], 100), 0.0);
        // each word in half the packages, always together: log2(2) = 1
        assert_eq!(pmi(50, &[50, 50], 100), 1.0);
    }

    fn corpus(groups: &[(&[&str], usize)]) -> EcosystemSnapshot {
        let mut packages = Vec::new();
        let mut n = 0;
        for (kws, count) in groups {
            for _ in 0..*count {
                let mut p = package(&format!("p{n:04}"), "2015-01-01", &[("1.0.0", "2015-01-01")]);
                p.keywords = kws.iter().map(|s| s.to_string()).collect();
                packages.push(p);
                n += 1;
            }
        }
        snapshot(packages, vec![])
    }

    #[test]
    fn separable_keyword_populations_split_exactly() {
        // two disjoint keyword families; k=2 must separate them
        let s = corpus(&[
            (&["react", "component", "ui", "web", "frontend"], 30),
            (&["server", "http", "api", "rest", "backend"], 30),
        ]);
        let params = DomainParams {
            k: 2,
            ..DomainParams::default()
        };
        let model = fit_domain_model_with(&s, 7, &params).unwrap();
        assert!(!model.degenerate);
        let a = model.assign(&["react".into(), "component".into(), "ui".into()]);
        let b = model.assign(&["server".into(), "http".into(), "api".into()]);
        assert_ne!(a, b);
        assert!(a >= 1 && a <= 2 && b >= 1 && b <= 2);
    }

    #[test]
    fn no_keywords_is_a_deterministic_cluster() {
        let s = corpus(&[
            (&["react", "component", "ui", "web", "frontend"], 20),
            (&["server", "http", "api", "rest", "backend"], 20),
            (&[], 5),
        ]);
        let params = DomainParams {
            k: 3,
            ..DomainParams::default()
        };
        let model = fit_domain_model_with(&s, 7, &params).unwrap();
        let zero_a = model.assign(&[]);
        let zero_b = model.assign(&["unknownword".into()]);
        assert_eq!(zero_a, zero_b); // both map to the zero vector's cluster
    }

    #[test]
    fn thin_corpus_falls_back_to_single_domain() {
        let s = corpus(&[(&["a", "b"], 30)]);
        let model = fit_domain_model(&s, 7).unwrap();
        assert!(model.degenerate);
        assert_eq!(model.assign(&["a".into()]), 1);
        assert_eq!(model.assign(&[]), 1);
    }

    #[test]
    fn fitting_is_seed_deterministic() {
        let s = corpus(&[
            (&["react", "component", "ui", "web"], 25),
            (&["server", "http", "api", "rest"], 25),
            (&["test", "mock", "assert", "spec"], 25),
        ]);
        let m1 = fit_domain_model(&s, 42).unwrap();
        let m2 = fit_domain_model(&s, 42).unwrap();
        assert_eq!(m1, m2);
    }

    #[test]
    fn kmeans_handles_duplicate_points() {
        let points: Vec<Vec<Real>> = vec![vec![0.0, 0.0]; 50]
            .into_iter()
            .chain(vec![vec![10.0, 10.0]; 50])
            .collect();
        let (centroids, assignment) = kmeans(&points, 2, 1, 100, 1e-6);
        assert_eq!(centroids.len(), 2);
        assert_ne!(assignment[0], assignment[99]);
        assert!(assignment[..50].iter().all(|&a| a == assignment[0]));
    }
}
