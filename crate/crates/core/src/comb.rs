//! Cavity modes, pump fields and the coupling matrices they produce.
//!
//! A pump couples every mode pair `(m, n)` whose frequency indices satisfy
//! `m + n = freq_sum`, subject to its polarization rule. Frequency indices
//! count free spectral ranges, so `freq_sum` is a mode-index sum rather than
//! an optical frequency (pumps are conventionally drawn at half their true
//! frequency).

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::linalg::{AsMatrix, ensure_square, Matrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Polarization {
    H,
    V,
    None,
}

/// A cavity mode: frequency index (in free spectral ranges) and polarization.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ModeLabel {
    pub freq_index: u32,
    pub polarization: Polarization,
}

impl ModeLabel {
    pub const fn new(freq_index: u32, polarization: Polarization) -> Self {
        Self {
            freq_index,
            polarization,
        }
    }

    pub const fn unpolarized(freq_index: u32) -> Self {
        Self::new(freq_index, Polarization::None)
    }
}

impl fmt::Display for ModeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.polarization {
            Polarization::None => write!(f, "{}", self.freq_index),
            Polarization::H => write!(f, "{}H", self.freq_index),
            Polarization::V => write!(f, "{}V", self.freq_index),
        }
    }
}

/// The modes inside the phase-matching window.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombSpec {
    mode_count: usize,
    polarized: bool,
    window: (u32, u32),
}

impl CombSpec {
    pub fn new(mode_count: usize, polarized: bool, window: (u32, u32)) -> Result<Self> {
        let (lo, hi) = window;
        if mode_count == 0 {
            return Err(Error::InvalidComb("mode count must be at least 1".into()));
        }
        if lo < 1 || hi < lo {
            return Err(Error::InvalidComb(format!("bad window [{lo}, {hi}]")));
        }
        let span = (hi - lo + 1) as usize;
        let expected = if polarized {
            if !mode_count.is_multiple_of(2) {
                return Err(Error::InvalidComb("polarized comb needs an even mode count".into()));
            }
            mode_count / 2
        } else {
            mode_count
        };
        if span != expected {
            return Err(Error::InvalidComb(format!(
                "window [{lo}, {hi}] holds {span} frequencies, expected {expected}"
            )));
        }
        Ok(Self {
            mode_count,
            polarized,
            window,
        })
    }

    /// Unpolarized comb on frequencies `1..=m`.
    pub fn unpolarized(m: usize) -> Self {
        Self::new(m, false, (1, m as u32)).expect("valid unpolarized comb")
    }

    /// Polarized comb with H and V modes at every frequency in `window`.
    pub fn polarized(window: (u32, u32)) -> Result<Self> {
        let span = window.1.saturating_sub(window.0) as usize + 1;
        Self::new(2 * span, true, window)
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    pub fn is_polarized(&self) -> bool {
        self.polarized
    }

    pub fn window(&self) -> (u32, u32) {
        self.window
    }

    /// Modes in matrix order: ascending frequency, H before V.
    pub fn modes(&self) -> Vec<ModeLabel> {
        let (lo, hi) = self.window;
        let mut out = Vec::with_capacity(self.mode_count);
        for f in lo..=hi {
            if self.polarized {
                out.push(ModeLabel::new(f, Polarization::H));
                out.push(ModeLabel::new(f, Polarization::V));
            } else {
                out.push(ModeLabel::unpolarized(f));
            }
        }
        out
    }

    pub fn contains(&self, mode: &ModeLabel) -> bool {
        let (lo, hi) = self.window;
        let pol_ok = if self.polarized {
            mode.polarization != Polarization::None
        } else {
            mode.polarization == Polarization::None
        };
        pol_ok && (lo..=hi).contains(&mode.freq_index)
    }
}

/// Pump polarization and the two signal polarizations it couples, written
/// pump-first. For the mixed rules the second letter is the polarization of
/// the lower-frequency signal and the third that of the higher one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Interaction {
    Unpolarized,
    Vhv,
    Vvh,
    Vvv,
    Hhh,
}

impl Interaction {
    /// Whether a pair `(lower, higher)`, ordered by frequency then H before
    /// V, is coupled by this rule.
    pub fn matches(self, lower: Polarization, higher: Polarization) -> bool {
        use Polarization::{H, V};
        match self {
            Interaction::Unpolarized => {
                lower == Polarization::None && higher == Polarization::None
            }
            Interaction::Vhv => lower == H && higher == V,
            Interaction::Vvh => lower == V && higher == H,
            Interaction::Vvv => lower == V && higher == V,
            Interaction::Hhh => lower == H && higher == H,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Interaction::Unpolarized => "unpolarized",
            Interaction::Vhv => "VHV",
            Interaction::Vvh => "VVH",
            Interaction::Vvv => "VVV",
            Interaction::Hhh => "HHH",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "unpolarized" | "none" => Interaction::Unpolarized,
            "VHV" => Interaction::Vhv,
            "VVH" => Interaction::Vvh,
            "VVV" => Interaction::Vvv,
            "HHH" => Interaction::Hhh,
            _ => return None,
        })
    }
}

/// One pump field. A negative weight is a π-phase-shifted pump, i.e. the
/// opposite (up- vs down-converting) interaction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PumpSpec {
    pub freq_sum: u32,
    pub interaction: Interaction,
    pub weight: f64,
}

impl PumpSpec {
    pub fn new(freq_sum: u32, interaction: Interaction, weight: f64) -> Result<Self> {
        if weight == 0.0 || !weight.is_finite() {
            return Err(Error::InvalidPump(format!("weight must be finite and nonzero, got {weight}")));
        }
        Ok(Self {
            freq_sum,
            interaction,
            weight,
        })
    }

    pub fn unpolarized(freq_sum: u32, weight: f64) -> Result<Self> {
        Self::new(freq_sum, Interaction::Unpolarized, weight)
    }

    /// Whether this pump couples the ordered pair `a < b`.
    fn couples(&self, a: &ModeLabel, b: &ModeLabel) -> bool {
        a.freq_index + b.freq_index == self.freq_sum
            && self.interaction.matches(a.polarization, b.polarization)
    }
}

/// The real symmetric H-graph adjacency `G`, with the mode behind each index.
#[derive(Debug, Clone, PartialEq)]
pub struct CouplingMatrix {
    entries: Matrix,
    mode_order: Vec<ModeLabel>,
}

impl CouplingMatrix {
    /// Requires an exactly symmetric square matrix and one label per row.
    pub fn new(entries: Matrix, mode_order: Vec<ModeLabel>) -> Result<Self> {
        let n = ensure_square(&entries)?;
        if mode_order.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: mode_order.len(),
            });
        }
        let (row, col, deviation) = crate::linalg::symmetry_defect(&entries);
        if deviation != 0.0 {
            return Err(Error::NotSymmetric {
                what: "coupling matrix",
                row,
                col,
                deviation,
            });
        }
        Ok(Self {
            entries,
            mode_order,
        })
    }

    /// Labels the rows as unpolarized modes `1..=n`.
    pub fn unlabeled(entries: Matrix) -> Result<Self> {
        let n = entries.nrows();
        Self::new(entries, (1..=n as u32).map(ModeLabel::unpolarized).collect())
    }

    pub fn entries(&self) -> &Matrix {
        &self.entries
    }

    pub fn mode_order(&self) -> &[ModeLabel] {
        &self.mode_order
    }

    pub fn size(&self) -> usize {
        self.mode_order.len()
    }

    pub fn into_entries(self) -> Matrix {
        self.entries
    }
}

impl AsMatrix for CouplingMatrix {
    fn as_matrix(&self) -> &Matrix {
        &self.entries
    }
}

/// Sums every pump's weight onto the mode pairs it couples.
///
/// Degenerate pairs (`2m = freq_sum` on a single mode) are left at zero with
/// a logged warning: the Hamiltonian couples distinct mode pairs only.
pub fn build_coupling_from_pumps(comb: &CombSpec, pumps: &[PumpSpec]) -> Result<CouplingMatrix> {
    let modes = comb.modes();
    let n = modes.len();
    let mut g = Matrix::zeros(n, n);
    for pump in pumps {
        check_pump(comb, pump)?;
        let mut coupled = false;
        for i in 0..n {
            let m = &modes[i];
            if 2 * m.freq_index == pump.freq_sum && pump.interaction.matches(m.polarization, m.polarization) {
                log::warn!(
                    "pump with sum {} would squeeze mode {} on its own; diagonal left at zero",
                    pump.freq_sum,
                    m
                );
            }
            for j in (i + 1)..n {
                if pump.couples(m, &modes[j]) {
                    g[(i, j)] += pump.weight;
                    g[(j, i)] += pump.weight;
                    coupled = true;
                }
            }
        }
        if !coupled {
            return Err(Error::PumpOutOfWindow {
                freq_sum: pump.freq_sum,
            });
        }
    }
    CouplingMatrix::new(g, modes)
}

fn check_pump(comb: &CombSpec, pump: &PumpSpec) -> Result<()> {
    let unpolarized_rule = pump.interaction == Interaction::Unpolarized;
    if unpolarized_rule == comb.is_polarized() {
        return Err(Error::InvalidPump(format!(
            "{} interaction on a {} comb",
            pump.interaction.name(),
            if comb.is_polarized() { "polarized" } else { "unpolarized" }
        )));
    }
    if pump.weight == 0.0 || !pump.weight.is_finite() {
        return Err(Error::InvalidPump(format!("weight {}", pump.weight)));
    }
    Ok(())
}

/// A pump-induced edge leaving the target set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpuriousCoupling {
    /// Lower mode of the pair in matrix order.
    pub lower: ModeLabel,
    pub higher: ModeLabel,
    pub pump: PumpSpec,
}

/// Every in-window pair coupled by some pump with exactly one endpoint in
/// `target`, sorted by the pair's modes (then by pump order).
pub fn spurious_couplings(
    comb: &CombSpec,
    pumps: &[PumpSpec],
    target: &BTreeSet<ModeLabel>,
) -> Vec<SpuriousCoupling> {
    let modes = comb.modes();
    let mut out = Vec::new();
    for (i, a) in modes.iter().enumerate() {
        for b in &modes[i + 1..] {
            if target.contains(a) == target.contains(b) {
                continue;
            }
            for pump in pumps.iter().filter(|p| p.couples(a, b)) {
                out.push(SpuriousCoupling {
                    lower: *a,
                    higher: *b,
                    pump: *pump,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hankel::{matrix_to_hankel, parse_hankel_shorthand, DEFAULT_HANKEL_TOL};
    use alloc::vec;

    fn pumps(sums: &[u32]) -> Vec<PumpSpec> {
        sums.iter().map(|&s| PumpSpec::unpolarized(s, 1.0).unwrap()).collect()
    }

    fn shorthand(s: &str) -> Matrix {
        parse_hankel_shorthand(s).unwrap().to_matrix()
    }

    #[test]
    fn single_pump_gives_g1() {
        let g = build_coupling_from_pumps(&CombSpec::unpolarized(4), &pumps(&[5])).unwrap();
        assert_eq!(g.entries(), &shorthand("[0,0,0/1/0,0,0]"));
    }

    #[test]
    fn two_pumps_give_g2() {
        let g = build_coupling_from_pumps(&CombSpec::unpolarized(4), &pumps(&[5, 7])).unwrap();
        assert_eq!(g.entries(), &shorthand("[0,0,0/1/0,1,0]"));
    }

    #[test]
    fn twelve_modes_give_g3() {
        let g = build_coupling_from_pumps(&CombSpec::unpolarized(12), &pumps(&[13, 19])).unwrap();
        assert_eq!(g.entries(), &shorthand("[0_11/1/0_5,1,0_5]"));
    }

    #[test]
    fn balanced_square_from_polarized_pumps() {
        let comb = CombSpec::polarized((1, 2)).unwrap();
        let ps = [
            PumpSpec::new(3, Interaction::Vhv, 1.0).unwrap(),
            PumpSpec::new(3, Interaction::Vvh, 1.0).unwrap(),
            PumpSpec::new(3, Interaction::Vvv, 1.0).unwrap(),
            PumpSpec::new(3, Interaction::Hhh, -1.0).unwrap(),
        ];
        let g = build_coupling_from_pumps(&comb, &ps).unwrap();
        let expected = Matrix::from_row_slice(
            4,
            4,
            &[
                0.0, 0.0, -1.0, 1.0, //
                0.0, 0.0, 1.0, 1.0, //
                -1.0, 1.0, 0.0, 0.0, //
                1.0, 1.0, 0.0, 0.0,
            ],
        );
        assert_eq!(g.entries(), &expected);
        assert_eq!(g.mode_order()[1], ModeLabel::new(1, Polarization::V));
        assert!(matches!(
            matrix_to_hankel(&g, DEFAULT_HANKEL_TOL),
            Err(Error::NotHankel { diagonal: 2, .. })
        ));
    }

    #[test]
    fn out_of_window_pump_is_rejected() {
        let err = build_coupling_from_pumps(&CombSpec::unpolarized(4), &pumps(&[40])).unwrap_err();
        assert_eq!(err, Error::PumpOutOfWindow { freq_sum: 40 });
        // only the degenerate pair (2,2) is reachable
        let err = build_coupling_from_pumps(&CombSpec::new(1, false, (2, 2)).unwrap(), &pumps(&[4]));
        assert!(matches!(err, Err(Error::PumpOutOfWindow { freq_sum: 4 })));
    }

    #[test]
    fn degenerate_pair_stays_off_diagonal() {
        let g = build_coupling_from_pumps(&CombSpec::unpolarized(3), &pumps(&[4])).unwrap();
        assert_eq!(g.entries()[(1, 1)], 0.0);
        assert_eq!(g.entries()[(0, 2)], 1.0);
    }

    #[test]
    fn interaction_must_match_comb() {
        let comb = CombSpec::polarized((1, 2)).unwrap();
        assert!(matches!(
            build_coupling_from_pumps(&comb, &pumps(&[3])),
            Err(Error::InvalidPump(_))
        ));
        let vvv = PumpSpec::new(5, Interaction::Vvv, 1.0).unwrap();
        assert!(build_coupling_from_pumps(&CombSpec::unpolarized(4), &[vvv]).is_err());
        assert!(PumpSpec::unpolarized(5, 0.0).is_err());
    }

    #[test]
    fn comb_window_invariants() {
        assert!(CombSpec::new(4, false, (1, 4)).is_ok());
        assert!(CombSpec::new(4, false, (1, 3)).is_err());
        assert!(CombSpec::new(4, true, (3, 4)).is_ok());
        assert!(CombSpec::new(3, true, (3, 4)).is_err());
        assert!(CombSpec::new(1, false, (0, 0)).is_err());
    }

    #[test]
    fn fifth_mode_picks_up_spurious_edge() {
        let comb = CombSpec::unpolarized(5);
        let target: BTreeSet<_> = (1..=4).map(ModeLabel::unpolarized).collect();
        let found = spurious_couplings(&comb, &pumps(&[5, 7]), &target);
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].lower, ModeLabel::unpolarized(2));
        assert_eq!(found[0].higher, ModeLabel::unpolarized(5));
        assert_eq!(found[0].pump.freq_sum, 7);
    }

    #[test]
    fn green_pump_is_clean_red_pump_is_not() {
        let comb = CombSpec::unpolarized(20);
        let target: BTreeSet<_> = (1..=12).map(ModeLabel::unpolarized).collect();
        assert!(spurious_couplings(&comb, &pumps(&[13]), &target).is_empty());
        let red = spurious_couplings(&comb, &pumps(&[19]), &target);
        let pairs: Vec<(u32, u32)> = red
            .iter()
            .map(|s| (s.lower.freq_index, s.higher.freq_index))
            .collect();
        assert_eq!(pairs, vec![(1, 18), (2, 17), (3, 16), (4, 15), (5, 14), (6, 13)]);
        assert!(spurious_couplings(&comb, &[], &target).is_empty());
    }
}
