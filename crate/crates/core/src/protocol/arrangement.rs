use super::config::{factorial, EntanglementMode};

/// The ancilla basis of Alice's entanglement: label `k` names one arrangement,
/// `slots[k][p]` being the original position of the qubit sitting at slot `p`.
/// Slot 0 is the committed qubit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Arrangements {
    n: usize,
    slots: Vec<Vec<usize>>,
}

impl Arrangements {
    pub fn for_mode(mode: EntanglementMode, n: usize) -> Self {
        match mode {
            EntanglementMode::Cyclic | EntanglementMode::PreMeasured => Self::cyclic(n),
            EntanglementMode::Permutation => Self::permutations(n),
        }
    }

    /// Shift `k` moves original `l` to slot `(l + k) mod n`; `k = 0` is the identity.
    pub fn cyclic(n: usize) -> Self {
        let slots = (0..n)
            .map(|k| (0..n).map(|p| (p + n - k) % n).collect())
            .collect();
        Self { n, slots }
    }

    /// All `n!` arrangements in lexicographic order of the slot→original map.
    pub fn permutations(n: usize) -> Self {
        let mut slots = Vec::with_capacity(factorial(n));
        let mut perm: Vec<usize> = (0..n).collect();
        loop {
            slots.push(perm.clone());
            if !next_permutation(&mut perm) {
                break;
            }
        }
        Self { n, slots }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the ancilla register.
    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    /// Slot → original map of label `k`.
    pub fn slots(&self, k: usize) -> &[usize] {
        &self.slots[k]
    }

    /// Original position of the committed qubit under label `k`.
    pub fn committed_original(&self, k: usize) -> usize {
        self.slots[k][0]
    }

    /// Slot holding original `l` under label `k`.
    pub fn slot_of(&self, k: usize, l: usize) -> usize {
        self.slots[k]
            .iter()
            .position(|&o| o == l)
            .expect("arrangement is a permutation")
    }

    /// Label of a given slot → original map, if present.
    pub fn label_of(&self, slots: &[usize]) -> Option<usize> {
        self.slots.iter().position(|s| s == slots)
    }
}

fn next_permutation(v: &mut [usize]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
