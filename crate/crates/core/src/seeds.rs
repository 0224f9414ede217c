//! Deterministic seed derivation.
//!
//! Every stochastic stage derives its RNG seed from a master seed plus the
//! coordinates that identify the unit of work (stage name, snapshot index,
//! start node, walk index, run index, ...). The derivation is a fixed,
//! documented function — not a platform hasher — so identical configurations
//! reproduce bit-identical streams across runs, builds and machines.
//!
//! The mixer is splitmix64 (Steele et al., the finalizer used by
//! `SplittableRandom`), applied over the master seed and each component in
//! sequence.

/// splitmix64 finalizer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives a child seed from `master` and an ordered list of components.
pub fn derive(master: u64, components: &[u64]) -> u64 {
    let mut state = splitmix64(master);
    for &c in components {
        state = splitmix64(state ^ c);
    }
    state
}

/// Derives a child seed from `master`, a stage label and a run index.
///
/// The label is folded bytewise so that distinct stage names ("embed",
/// "tune", ...) cannot collide by accident.
pub fn derive_labeled(master: u64, label: &str, index: u64) -> u64 {
    let mut folded = 0xcbf2_9ce4_8422_2325u64; // FNV-1a offset basis
    for &b in label.as_bytes() {
        folded = (folded ^ u64::from(b)).wrapping_mul(0x0000_0100_0000_01b3);
    }
    derive(master, &[folded, index])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivation_is_stable() {
        // Frozen values: changing the mixer silently would break every
        // recorded manifest, so pin them.
        assert_eq!(derive(0, &[]), 16294208416658607535);
        assert_eq!(derive(42, &[1, 2]), 17592914093553962002);
        assert_eq!(derive_labeled(42, "embed", 0), 1308529337470431682);
    }

    #[test]
    fn components_matter() {
        assert_ne!(derive(1, &[0]), derive(1, &[1]));
        assert_ne!(derive(1, &[0, 1]), derive(1, &[1, 0]));
        assert_ne!(derive_labeled(7, "embed", 3), derive_labeled(7, "tune", 3));
    }
}
