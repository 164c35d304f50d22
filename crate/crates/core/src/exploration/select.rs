use alloc::vec::Vec;

use super::candidates::{first_crossing, frontiers, CandidateSet, Frontier};
use super::LocalVertexSet;
use crate::geometry::PathFunction;

/// Winning candidate and the chord it passes through.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Selection {
    pub index: usize,
    pub path: PathFunction,
    pub frontier: Frontier,
}

/// Picks the middle of the largest contiguous run of top-scoring entries.
///
/// Entries are `None` when infeasible. A run of length `n` yields its
/// `ceil(n / 2)`-th member. Equal-length runs prefer the one whose middle is
/// nearest the centre of the list, then the lower index.
pub fn select_middle(scores: &[Option<f64>]) -> Option<usize> {
    let best = scores.iter().flatten().copied().reduce(f64::max)?;
    let centre2 = scores.len() as i64 - 1;
    let mut pick: Option<(usize, i64, usize)> = None; // (len, -offset, index)
    let mut i = 0;
    while i < scores.len() {
        if scores[i] != Some(best) {
            i += 1;
            continue;
        }
        let start = i;
        while i < scores.len() && scores[i] == Some(best) {
            i += 1;
        }
        let len = i - start;
        let mid = start + len.div_ceil(2) - 1;
        let off = (2 * mid as i64 - centre2).abs();
        let better = match pick {
            None => true,
            Some((pl, po, _)) => len > pl || (len == pl && -off > po),
        };
        if better {
            pick = Some((len, -off, mid));
        }
    }
    pick.map(|(_, _, m)| m)
}

/// Chord width each feasible candidate passes through first; `None` for
/// infeasible candidates.
pub fn chord_scores(cands: &CandidateSet, fronts: &[Frontier], epsilon: f64) -> Vec<Option<f64>> {
    cands
        .candidates
        .iter()
        .zip(&cands.feasible_mask)
        .map(|(c, &ok)| {
            if !ok {
                return None;
            }
            first_crossing(&c.polyline, fronts, epsilon).map(|(fi, _, _)| fronts[fi].width)
        })
        .collect()
}

/// Largest-frontier selection; `None` means the robot is stuck.
pub fn score_and_select(cands: &CandidateSet, local: &LocalVertexSet, epsilon: f64) -> Option<Selection> {
    let fronts = frontiers(local);
    let scores = chord_scores(cands, &fronts, epsilon);
    let index = select_middle(&scores)?;
    let c = &cands.candidates[index];
    let (fi, _, _) = first_crossing(&c.polyline, &fronts, epsilon)?;
    Some(Selection { index, path: c.path, frontier: fronts[fi] })
}
