//! Reference implementations shared by the integration and acceptance
//! tests. Nothing here calls into the library's own algorithms beyond its
//! read-only views.
#![allow(dead_code)]

use std::collections::HashMap;
use std::f64::consts::PI;

use huffguard::eval::LabeledScore;
use huffguard::{Codebook, HuffTree, NodeId, NodeKind};

const EPS: f64 = 1e-9;

/// Every structural property a valid adaptive tree must have, checked from
/// the public node views only. Returns a description of the first problem.
pub fn check_tree(tree: &HuffTree) -> Result<(), String> {
    let views: Vec<_> = tree.nodes().collect();
    let n = views.len();
    let by_id: HashMap<usize, usize> = views.iter().enumerate().map(|(i, v)| (v.id.0, i)).collect();
    if by_id.len() != n || (1..=n).any(|id| !by_id.contains_key(&id)) {
        return Err("ids are not exactly 1..=n".into());
    }
    let data = views.iter().filter(|v| v.kind == NodeKind::Data).count();
    if n != 2 * data + 1 {
        return Err(format!("{n} nodes for {data} data nodes"));
    }
    let nyts: Vec<_> = views
        .iter()
        .filter(|v| v.mean.is_none() && v.children.is_none())
        .collect();
    if nyts.len() != 1 || nyts[0].weight != 0.0 {
        return Err("expected one zero-weight NYT leaf".into());
    }
    let nyt = nyts[0];
    let view = |id: NodeId| &views[by_id[&id.0]];

    let mut sorted: Vec<_> = views.iter().collect();
    sorted.sort_by_key(|v| v.id);
    for pair in sorted.windows(2) {
        if pair[1].weight > pair[0].weight + EPS {
            return Err(format!(
                "sibling property: node {} ({}) heavier than node {} ({})",
                pair[1].id, pair[1].weight, pair[0].id, pair[0].weight
            ));
        }
    }
    let mut max_leaf = 0;
    for v in &views {
        match (v.parent, v.id.0) {
            (None, 1) => {
                if v.depth != 0 {
                    return Err("root depth".into());
                }
            }
            (None, id) => return Err(format!("node {id} has no parent")),
            (Some(p), _) => {
                let pv = view(p);
                if v.depth != pv.depth + 1 {
                    return Err(format!("depth of node {}", v.id));
                }
                let (r, l) = pv.children.ok_or("parent without children")?;
                if r != v.id && l != v.id {
                    return Err(format!("node {} not a child of its parent", v.id));
                }
            }
        }
        match v.children {
            Some((r, l)) => {
                if l.0 != r.0 + 1 {
                    return Err(format!("children of node {} are not adjacent", v.id));
                }
                let sum = view(r).weight + view(l).weight;
                if (sum - v.weight).abs() > EPS {
                    return Err(format!(
                        "node {} weight {} != children {}",
                        v.id, v.weight, sum
                    ));
                }
                if v.mean.is_some() {
                    return Err("internal node with a mean".into());
                }
            }
            None => max_leaf = max_leaf.max(v.depth),
        }
    }
    if n > 1 && nyt.depth != max_leaf {
        return Err(format!(
            "NYT depth {} but deepest leaf at {max_leaf}",
            nyt.depth
        ));
    }
    Ok(())
}

/// The codebook lists exactly the data nodes with their current depths.
pub fn check_codebook(tree: &HuffTree, codebook: &Codebook) -> Result<(), String> {
    let mut want: Vec<(usize, usize)> = tree.data_nodes().map(|v| (v.id.0, v.depth)).collect();
    want.sort_unstable();
    let got: Vec<(usize, usize)> = codebook
        .entries()
        .iter()
        .map(|e| (e.id.0, e.depth))
        .collect();
    if got != want {
        return Err(format!("codebook {got:?} vs tree {want:?}"));
    }
    if codebook.nyt_depth() != tree.nyt_depth() {
        return Err("codebook NYT depth".into());
    }
    Ok(())
}

/// Σ weight × depth over all leaves, from the views.
pub fn leaf_path_length(tree: &HuffTree) -> f64 {
    tree.nodes()
        .filter(|v| v.children.is_none())
        .map(|v| v.weight * v.depth as f64)
        .sum()
}

pub fn leaf_weights(tree: &HuffTree) -> Vec<f64> {
    tree.nodes()
        .filter(|v| v.children.is_none())
        .map(|v| v.weight)
        .collect()
}

/// Minimum weighted external path length over every full binary tree with
/// these leaves, by dynamic programming over leaf subsets.
pub fn brute_force_min_cost(weights: &[f64]) -> f64 {
    let n = weights.len();
    assert!(n <= 12, "exhaustive search is exponential");
    if n <= 1 {
        return 0.0;
    }
    let full = (1usize << n) - 1;
    let mut total = vec![0.0; full + 1];
    for s in 1..=full {
        let low = s.trailing_zeros() as usize;
        total[s] = total[s & (s - 1)] + weights[low];
    }
    let mut cost = vec![f64::INFINITY; full + 1];
    for s in 1..=full {
        if s.count_ones() == 1 {
            cost[s] = 0.0;
            continue;
        }
        // Split into two non-empty halves; fixing the lowest element in `a`
        // visits each unordered split once.
        let low = s & s.wrapping_neg();
        let rest = s ^ low;
        let mut sub = rest;
        loop {
            let a = sub | low;
            let b = s ^ a;
            if b != 0 {
                let c = cost[a] + cost[b];
                if c < cost[s] {
                    cost[s] = c;
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        cost[s] += total[s];
    }
    cost[full]
}

/// Textbook Huffman cost: repeatedly join the two lightest weights.
pub fn reference_huffman_cost(weights: &[f64]) -> f64 {
    let mut pool = weights.to_vec();
    let mut cost = 0.0;
    while pool.len() > 1 {
        pool.sort_by(|a, b| b.total_cmp(a));
        let a = pool.pop().unwrap();
        let b = pool.pop().unwrap();
        cost += a + b;
        pool.push(a + b);
    }
    cost
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half.
pub fn pairwise_auc(scores: &[LabeledScore]) -> f64 {
    let pos: Vec<f64> = scores
        .iter()
        .filter(|s| s.positive)
        .map(|s| s.omega)
        .collect();
    let neg: Vec<f64> = scores
        .iter()
        .filter(|s| !s.positive)
        .map(|s| s.omega)
        .collect();
    let mut wins = 0.0;
    for p in &pos {
        for q in &neg {
            if p > q {
                wins += 1.0;
            } else if p == q {
                wins += 0.5;
            }
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

/// ROC points by evaluating every distinct threshold from the top down.
pub fn brute_force_roc(scores: &[LabeledScore]) -> Vec<(f64, f64)> {
    let mut thresholds: Vec<f64> = scores.iter().map(|s| s.omega).collect();
    thresholds.sort_by(|a, b| b.total_cmp(a));
    thresholds.dedup();
    let p = scores.iter().filter(|s| s.positive).count() as f64;
    let n = scores.len() as f64 - p;
    let mut points = vec![(0.0, 0.0)];
    for t in thresholds {
        let tp = scores.iter().filter(|s| s.positive && s.omega >= t).count() as f64;
        let fp = scores
            .iter()
            .filter(|s| !s.positive && s.omega >= t)
            .count() as f64;
        points.push((fp / n, tp / p));
    }
    points
}

/// Straightforward MFCC: naive DFT, explicit mel triangles, direct DCT.
pub struct ReferenceMfcc {
    pub sample_rate: f64,
    pub window_len: usize,
    pub nfft: usize,
    pub n_filters: usize,
    pub n_mfcc: usize,
    cos_table: Vec<f64>,
    sin_table: Vec<f64>,
}

impl ReferenceMfcc {
    pub fn new(sample_rate: u32, window_len: usize) -> Self {
        let mut nfft = 1;
        while nfft < window_len {
            nfft *= 2;
        }
        let cos_table = (0..nfft)
            .map(|i| (2.0 * PI * i as f64 / nfft as f64).cos())
            .collect();
        let sin_table = (0..nfft)
            .map(|i| (2.0 * PI * i as f64 / nfft as f64).sin())
            .collect();
        Self {
            sample_rate: f64::from(sample_rate),
            window_len,
            nfft,
            n_filters: 26,
            n_mfcc: 13,
            cos_table,
            sin_table,
        }
    }

    pub fn features(&self, frame: &[f64]) -> Vec<f64> {
        let n = self.window_len;
        let windowed: Vec<f64> = (0..n)
            .map(|i| frame[i] * (0.54 - 0.46 * (2.0 * PI * i as f64 / (n as f64 - 1.0)).cos()))
            .collect();
        let bins = self.nfft / 2 + 1;
        let mut power = vec![0.0; bins];
        for (k, p) in power.iter_mut().enumerate() {
            let (mut re, mut im) = (0.0, 0.0);
            for (i, x) in windowed.iter().enumerate() {
                let idx = (k * i) % self.nfft;
                re += x * self.cos_table[idx];
                im -= x * self.sin_table[idx];
            }
            *p = re * re + im * im;
        }
        let mel = |hz: f64| 2595.0 * (1.0 + hz / 700.0).log10();
        let inv = |m: f64| 700.0 * (10f64.powf(m / 2595.0) - 1.0);
        let top = mel(self.sample_rate / 2.0);
        let edge = |i: usize| inv(top * i as f64 / (self.n_filters + 1) as f64);
        let mut log_bands = Vec::with_capacity(self.n_filters);
        for m in 0..self.n_filters {
            let (a, b, c) = (edge(m), edge(m + 1), edge(m + 2));
            let mut e = 0.0;
            for (k, p) in power.iter().enumerate() {
                let f = k as f64 * self.sample_rate / self.nfft as f64;
                let w = if f > a && f <= b {
                    (f - a) / (b - a)
                } else if f > b && f < c {
                    (c - f) / (c - b)
                } else {
                    0.0
                };
                e += w * p;
            }
            log_bands.push(if e < 1e-10 { 1e-10f64.ln() } else { e.ln() });
        }
        let m = self.n_filters as f64;
        let mut out: Vec<f64> = (1..=self.n_mfcc)
            .map(|q| {
                (0..self.n_filters)
                    .map(|j| {
                        (2.0 / m).sqrt()
                            * log_bands[j]
                            * (PI * q as f64 * (j as f64 + 0.5) / m).cos()
                    })
                    .sum()
            })
            .collect();
        let energy: f64 = frame.iter().map(|s| s * s).sum();
        out.push((energy + 1e-10).ln());
        let mut crossings = 0;
        for i in 1..frame.len() {
            let a = frame[i - 1] < 0.0;
            let b = frame[i] < 0.0;
            if a != b {
                crossings += 1;
            }
        }
        out.push(if frame.len() > 1 {
            crossings as f64 / (frame.len() - 1) as f64
        } else {
            0.0
        });
        out
    }
}
