//! Two-sided one-to-one matching of strong and weak UAVs.
//!
//! Strong UAVs rank weak UAVs by the energy the pair would spend at its
//! minimum feasible powers; weak UAVs accept only partners that also clear
//! the power-gap threshold. The procedure runs in two rounds:
//!
//! 1. Strong UAVs propose down their lists. An unmatched weak UAV accepts any
//!    proposal; a matched one switches only to a partner in its own list
//!    whose pair energy is strictly lower.
//! 2. Weak UAVs propose down their lists. A proposal succeeds when both sides
//!    strictly lower their pair energy (an unmatched side counts as infinite
//!    energy). Passes repeat, interleaved with re-proposals by unmatched
//!    strong UAVs, until nothing changes.
//!
//! Round 2 only ever replaces pairs by a pair of strictly lower energy, so the
//! sorted vector of pair energies decreases lexicographically and the loop
//! terminates with no blocking pair left.
//!
//! The two baselines ignore energies entirely and pair purely by rank.

use std::collections::VecDeque;

use crate::channel::ChannelSnapshot;
use crate::error::{Error, Result};
use crate::power_opt::{meets_power_gap, PowerMatrix};

/// Pair energy for every (strong, weak) combination in local indices;
/// `None` marks a combination that cannot be paired.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyTable {
    strong: usize,
    weak: usize,
    values: Vec<Option<f64>>,
}

impl EnergyTable {
    pub fn new(strong: usize, weak: usize, values: Vec<Option<f64>>) -> Result<Self> {
        if values.len() != strong * weak {
            return Err(Error::Contract(format!(
                "energy table needs {} entries, got {}",
                strong * weak,
                values.len()
            )));
        }
        Ok(EnergyTable {
            strong,
            weak,
            values,
        })
    }

    /// Pair energy `(p_i + p_j + 2 e_fly) dt` at the matrix's minimum powers.
    pub fn from_power_matrix(matrix: &PowerMatrix, e_fly: f64, dt: f64) -> Self {
        let (weak, strong) = (matrix.weak_ids().len(), matrix.strong_ids().len());
        let values = (0..strong)
            .flat_map(|s| (0..weak).map(move |w| (s, w)))
            .map(|(s, w)| {
                matrix
                    .powers(w, s)
                    .map(|p| (p.strong + p.weak + 2.0 * e_fly) * dt)
            })
            .collect();
        EnergyTable {
            strong,
            weak,
            values,
        }
    }

    pub fn get(&self, strong: usize, weak: usize) -> Option<f64> {
        self.values[strong * self.weak + weak]
    }

    pub fn strong_len(&self) -> usize {
        self.strong
    }

    pub fn weak_len(&self) -> usize {
        self.weak
    }
}

/// Preference lists in local indices. `strong[s]` lists weak indices by
/// ascending pair energy; `weak[w]` lists strong indices likewise.
#[derive(Debug, Clone, PartialEq)]
pub struct PreferenceLists {
    pub strong_ids: Vec<usize>,
    pub weak_ids: Vec<usize>,
    pub strong: Vec<Vec<usize>>,
    pub weak: Vec<Vec<usize>>,
    /// Local strong indices in the order they propose in round 1.
    pub strong_order: Vec<usize>,
}

impl PreferenceLists {
    /// Builds both sides' lists from a power matrix.
    ///
    /// A strong UAV lists every weak UAV it clears `ch_th` against and has a
    /// feasible power entry with. A weak UAV lists the subset that also
    /// satisfies `p_i - p_j >= p_th`. Strong UAVs propose strongest first.
    pub fn build(
        snapshot: &ChannelSnapshot,
        matrix: &PowerMatrix,
        energies: &EnergyTable,
        ch_th: f64,
        p_th: f64,
    ) -> Self {
        let strong_ids = matrix.strong_ids().to_vec();
        let weak_ids = matrix.weak_ids().to_vec();
        let gap_ok =
            |s: usize, w: usize| snapshot.gain(strong_ids[s]) - snapshot.gain(weak_ids[w]) >= ch_th;
        let by_energy = |list: &mut Vec<usize>, energy: &dyn Fn(usize) -> f64| {
            list.sort_by(|&a, &b| energy(a).total_cmp(&energy(b)).then(a.cmp(&b)));
        };

        let strong = (0..strong_ids.len())
            .map(|s| {
                let mut list: Vec<usize> = (0..weak_ids.len())
                    .filter(|&w| gap_ok(s, w) && energies.get(s, w).is_some())
                    .collect();
                by_energy(&mut list, &|w| energies.get(s, w).unwrap());
                list
            })
            .collect();
        let weak = (0..weak_ids.len())
            .map(|w| {
                let mut list: Vec<usize> = (0..strong_ids.len())
                    .filter(|&s| {
                        gap_ok(s, w)
                            && matrix
                                .powers(w, s)
                                .is_some_and(|p| meets_power_gap(p.strong, p.weak, p_th))
                    })
                    .collect();
                by_energy(&mut list, &|s| energies.get(s, w).unwrap());
                list
            })
            .collect();
        let mut strong_order: Vec<usize> = (0..strong_ids.len()).collect();
        strong_order.sort_by(|&a, &b| {
            snapshot
                .gain(strong_ids[b])
                .total_cmp(&snapshot.gain(strong_ids[a]))
                .then(a.cmp(&b))
        });
        PreferenceLists {
            strong_ids,
            weak_ids,
            strong,
            weak,
            strong_order,
        }
    }

    /// Lists derived directly from an energy table: every finite entry is
    /// acceptable to both sides and strong UAVs propose in index order.
    pub fn from_energies(
        strong_ids: Vec<usize>,
        weak_ids: Vec<usize>,
        energies: &EnergyTable,
    ) -> Self {
        let sort = |mut v: Vec<usize>, key: &dyn Fn(usize) -> f64| {
            v.sort_by(|&a, &b| key(a).total_cmp(&key(b)).then(a.cmp(&b)));
            v
        };
        let strong = (0..energies.strong_len())
            .map(|s| {
                let v = (0..energies.weak_len())
                    .filter(|&w| energies.get(s, w).is_some())
                    .collect();
                sort(v, &|w| energies.get(s, w).unwrap())
            })
            .collect();
        let weak = (0..energies.weak_len())
            .map(|w| {
                let v = (0..energies.strong_len())
                    .filter(|&s| energies.get(s, w).is_some())
                    .collect();
                sort(v, &|s| energies.get(s, w).unwrap())
            })
            .collect();
        let strong_order = (0..strong_ids.len()).collect();
        PreferenceLists {
            strong_ids,
            weak_ids,
            strong,
            weak,
            strong_order,
        }
    }

    fn strong_accepts(&self, s: usize, w: usize) -> bool {
        self.strong[s].contains(&w)
    }

    fn weak_accepts(&self, w: usize, s: usize) -> bool {
        self.weak[w].contains(&s)
    }
}

/// One-to-one assignment between a strong set and a weak set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairingAssignment {
    strong_ids: Vec<usize>,
    weak_ids: Vec<usize>,
    strong_partner: Vec<Option<usize>>,
    weak_partner: Vec<Option<usize>>,
}

impl PairingAssignment {
    pub fn empty(strong_ids: Vec<usize>, weak_ids: Vec<usize>) -> Self {
        let (s, w) = (strong_ids.len(), weak_ids.len());
        PairingAssignment {
            strong_ids,
            weak_ids,
            strong_partner: vec![None; s],
            weak_partner: vec![None; w],
        }
    }

    /// Builds an assignment from local (strong, weak) index pairs.
    pub fn from_local_pairs(
        strong_ids: Vec<usize>,
        weak_ids: Vec<usize>,
        pairs: &[(usize, usize)],
    ) -> Result<Self> {
        let mut a = Self::empty(strong_ids, weak_ids);
        for &(s, w) in pairs {
            if s >= a.strong_ids.len() || w >= a.weak_ids.len() {
                return Err(Error::Contract(format!("pair ({s}, {w}) out of range")));
            }
            if a.strong_partner[s].is_some() || a.weak_partner[w].is_some() {
                return Err(Error::Contract(format!("pair ({s}, {w}) reuses a UAV")));
            }
            a.link(s, w);
        }
        Ok(a)
    }

    fn link(&mut self, s: usize, w: usize) {
        debug_assert!(
            self.strong_partner[s].is_none() && self.weak_partner[w].is_none(),
            "linking ({s}, {w}) would give a UAV two partners"
        );
        self.strong_partner[s] = Some(w);
        self.weak_partner[w] = Some(s);
    }

    fn unlink_strong(&mut self, s: usize) {
        if let Some(w) = self.strong_partner[s].take() {
            self.weak_partner[w] = None;
        }
    }

    fn unlink_weak(&mut self, w: usize) {
        if let Some(s) = self.weak_partner[w].take() {
            self.strong_partner[s] = None;
        }
    }

    pub fn strong_ids(&self) -> &[usize] {
        &self.strong_ids
    }

    pub fn weak_ids(&self) -> &[usize] {
        &self.weak_ids
    }

    pub fn strong_partner(&self, s: usize) -> Option<usize> {
        self.strong_partner[s]
    }

    pub fn weak_partner(&self, w: usize) -> Option<usize> {
        self.weak_partner[w]
    }

    pub fn pair_count(&self) -> usize {
        self.strong_partner.iter().flatten().count()
    }

    /// Every UAV on both sides has a partner.
    pub fn is_complete(&self) -> bool {
        self.strong_ids.len() == self.weak_ids.len() && self.pair_count() == self.strong_ids.len()
    }

    /// The `I x J` 0/1 matching matrix.
    pub fn omega(&self) -> Vec<Vec<u8>> {
        (0..self.strong_ids.len())
            .map(|s| {
                (0..self.weak_ids.len())
                    .map(|w| u8::from(self.strong_partner[s] == Some(w)))
                    .collect()
            })
            .collect()
    }

    /// Local (strong, weak) index pairs in strong order.
    pub fn local_pairs(&self) -> Vec<(usize, usize)> {
        self.strong_partner
            .iter()
            .enumerate()
            .filter_map(|(s, w)| w.map(|w| (s, w)))
            .collect()
    }

    /// Matched (strong UAV id, weak UAV id) pairs.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        self.local_pairs()
            .into_iter()
            .map(|(s, w)| (self.strong_ids[s], self.weak_ids[w]))
            .collect()
    }

    pub fn unmatched_strong(&self) -> Vec<usize> {
        (0..self.strong_ids.len())
            .filter(|&s| self.strong_partner[s].is_none())
            .collect()
    }

    pub fn unmatched_weak(&self) -> Vec<usize> {
        (0..self.weak_ids.len())
            .filter(|&w| self.weak_partner[w].is_none())
            .collect()
    }

    /// Sum of pair energies, or `None` if some matched pair has no entry.
    pub fn total_energy(&self, energies: &EnergyTable) -> Option<f64> {
        self.local_pairs()
            .into_iter()
            .map(|(s, w)| energies.get(s, w))
            .sum()
    }

    fn strong_energy(&self, s: usize, energies: &EnergyTable) -> f64 {
        self.strong_partner[s]
            .and_then(|w| energies.get(s, w))
            .unwrap_or(f64::INFINITY)
    }

    fn weak_energy(&self, w: usize, energies: &EnergyTable) -> f64 {
        self.weak_partner[w]
            .and_then(|s| energies.get(s, w))
            .unwrap_or(f64::INFINITY)
    }
}

/// Outcome of [`match_pairs`] with a count of proposals made.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatchOutcome {
    pub assignment: PairingAssignment,
    pub proposals: usize,
}

/// Runs the two-round matching. Strong UAVs propose in `prefs.strong_order`,
/// weak UAVs in local index order.
pub fn match_pairs(prefs: &PreferenceLists, energies: &EnergyTable) -> Result<MatchOutcome> {
    let (n_s, n_w) = (prefs.strong_ids.len(), prefs.weak_ids.len());
    if n_s != n_w {
        return Err(Error::Contract(format!(
            "matching needs equal sides, got {n_s} strong and {n_w} weak"
        )));
    }
    if energies.strong_len() != n_s || energies.weak_len() != n_w {
        return Err(Error::Contract(
            "energy table does not match the lists".into(),
        ));
    }
    let energy = |s: usize, w: usize| energies.get(s, w).unwrap_or(f64::INFINITY);
    let mut a = PairingAssignment::empty(prefs.strong_ids.clone(), prefs.weak_ids.clone());
    let mut proposals = 0;

    // Round 1: strong proposers.
    let mut next = vec![0usize; n_s];
    let mut queue: VecDeque<usize> = prefs.strong_order.iter().copied().collect();
    while let Some(s) = queue.pop_front() {
        while let Some(&w) = prefs.strong[s].get(next[s]) {
            next[s] += 1;
            proposals += 1;
            match a.weak_partner[w] {
                None => {
                    a.link(s, w);
                    break;
                }
                Some(cur) if prefs.weak_accepts(w, s) && energy(s, w) < energy(cur, w) => {
                    a.unlink_weak(w);
                    a.link(s, w);
                    queue.push_back(cur);
                    break;
                }
                Some(_) => {}
            }
        }
    }

    // Round 2: weak proposers, plus re-proposals by strong UAVs left free.
    loop {
        let mut changed = false;
        for w in 0..n_w {
            let current = a.weak_energy(w, energies);
            for &s in &prefs.weak[w] {
                let e = energy(s, w);
                if e >= current {
                    break;
                }
                proposals += 1;
                if prefs.strong_accepts(s, w) && e < a.strong_energy(s, energies) {
                    a.unlink_strong(s);
                    a.unlink_weak(w);
                    a.link(s, w);
                    changed = true;
                    break;
                }
            }
        }
        for s in 0..n_s {
            if a.strong_partner[s].is_some() {
                continue;
            }
            if let Some(&w) = prefs.strong[s]
                .iter()
                .find(|&&w| a.weak_partner[w].is_none())
            {
                proposals += 1;
                a.link(s, w);
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    Ok(MatchOutcome {
        assignment: a,
        proposals,
    })
}

/// Returns the first blocking pair `(s, w)` in local indices, if any: a
/// mutually acceptable pair whose energy is strictly below both members'
/// current pair energies.
pub fn blocking_pair(
    assignment: &PairingAssignment,
    prefs: &PreferenceLists,
    energies: &EnergyTable,
) -> Option<(usize, usize)> {
    (0..prefs.strong.len()).find_map(|s| {
        prefs.strong[s].iter().find_map(|&w| {
            let e = energies.get(s, w)?;
            let blocks = prefs.weak_accepts(w, s)
                && e < assignment.strong_energy(s, energies)
                && e < assignment.weak_energy(w, energies);
            blocks.then_some((s, w))
        })
    })
}

pub fn is_stable(
    assignment: &PairingAssignment,
    prefs: &PreferenceLists,
    energies: &EnergyTable,
) -> bool {
    blocking_pair(assignment, prefs, energies).is_none()
}

fn halves(snapshot: &ChannelSnapshot) -> Result<(Vec<usize>, Vec<usize>)> {
    let ranking = snapshot.ranking();
    if !ranking.len().is_multiple_of(2) {
        return Err(Error::Contract(format!(
            "baseline pairing needs an even population, got {}",
            ranking.len()
        )));
    }
    let m = ranking.len() / 2;
    // strongest first on both sides
    let strong: Vec<usize> = ranking[m..].iter().rev().copied().collect();
    let weak: Vec<usize> = ranking[..m].iter().rev().copied().collect();
    Ok((strong, weak))
}

/// k-th strongest of the strong half with the k-th strongest of the weak half.
pub fn greedy_pairing(snapshot: &ChannelSnapshot) -> Result<PairingAssignment> {
    let (strong, weak) = halves(snapshot)?;
    let pairs: Vec<(usize, usize)> = (0..strong.len()).map(|k| (k, k)).collect();
    PairingAssignment::from_local_pairs(strong, weak, &pairs)
}

/// k-th strongest of the strong half with the k-th weakest of the weak half.
pub fn nongreedy_pairing(snapshot: &ChannelSnapshot) -> Result<PairingAssignment> {
    let (strong, weak) = halves(snapshot)?;
    let m = strong.len();
    let pairs: Vec<(usize, usize)> = (0..m).map(|k| (k, m - 1 - k)).collect();
    PairingAssignment::from_local_pairs(strong, weak, &pairs)
}
