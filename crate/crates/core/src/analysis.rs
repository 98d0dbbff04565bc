//! Protocol-level probabilities: per-pass closed forms cross-checked against
//! the engine, verdicts, soundness sweeps over every fixed prover, expected
//! running time and sequential amplification.

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;
use rayon::prelude::*;

use crate::error::Error;
use crate::exact::ExactScalar;
use crate::machine::{run_protocol_exact, ExpectedPasses, PassAnalysis, Verdict};
use crate::protocol::{encode_instance, run_pass, Instance, WitnessSubset};
use crate::report::Report;

/// Largest `n` for which `2^n` selections or subsets are enumerated.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 24;

/// Per-pass acceptance and rejection from the closed forms
/// `(1/3)^(2|w|+2)` and `(1/3)^(2|w|+2) * (3S - 3T)^2`.
pub fn closed_form_probs(
    inst: &Instance,
    selection: &WitnessSubset,
) -> Result<(ExactScalar, ExactScalar), Error> {
    let w_len = encode_instance(inst).len() as u32;
    let t = inst.selected_sum(selection)?;
    let p_accept = ExactScalar::third_pow(2 * w_len + 2);
    let gap = (BigInt::from(inst.target.clone()) - BigInt::from(t)) * 3;
    let p_reject = &p_accept * &ExactScalar::from(&gap * &gap);
    Ok((p_accept, p_reject))
}

/// Exact per-pass probabilities, computed both by enumerating the branch tree
/// and from the closed form. Any disagreement is an error.
pub fn pass_probs(inst: &Instance, selection: &WitnessSubset) -> Result<PassAnalysis, Error> {
    selection.check_len(inst.len())?;
    let enumerated = run_pass(&encode_instance(inst), selection)?;
    let (p_accept, p_reject) = closed_form_probs(inst, selection)?;
    if enumerated.p_accept != p_accept || enumerated.p_reject != p_reject {
        return Err(Error::Inconsistent(format!(
            "instance {inst}, selection {selection}: enumeration gave accept={} reject={}, \
             closed form gives accept={p_accept} reject={p_reject}",
            enumerated.p_accept, enumerated.p_reject
        )));
    }
    if !enumerated.residual.is_zero() {
        return Err(Error::Inconsistent(format!("nonzero residual {}", enumerated.residual)));
    }
    Ok(enumerated)
}

pub fn overall_verdict(inst: &Instance, selection: &WitnessSubset) -> Result<Verdict, Error> {
    run_protocol_exact(&pass_probs(inst, selection)?)
}

/// One row of a soundness sweep.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectionRow {
    pub selection: WitnessSubset,
    pub p_accept: ExactScalar,
    pub p_reject: ExactScalar,
    pub overall_reject: ExactScalar,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SoundnessReport {
    /// Every fixed selection, in mask order.
    pub rows: Vec<SelectionRow>,
    /// Minimum overall rejection over all fixed selections.
    pub worst_fixed_rejection: ExactScalar,
    /// Whether `p_reject >= 9 p_accept` holds in every row. When it does, any
    /// prover that changes its selection between passes still rejects with
    /// probability at least 9/10, since each pass it rejects at least nine
    /// times as often as it accepts.
    pub adaptive_bound_holds: bool,
    pub oracle_membership: bool,
    pub oracle_witness: Option<WitnessSubset>,
}

impl SoundnessReport {
    pub fn worst_row(&self) -> &SelectionRow {
        self.rows
            .iter()
            .find(|r| r.overall_reject == self.worst_fixed_rejection)
            .expect("nonempty table")
    }

    pub fn to_report(&self) -> Report {
        let mut r = Report::new();
        r.push("oracle_membership", self.oracle_membership);
        if let Some(w) = &self.oracle_witness {
            r.push("oracle_witness", w);
        }
        r.push("selections", self.rows.len());
        r.push_exact("worst_fixed_rejection", &self.worst_fixed_rejection);
        r.push("worst_selection", &self.worst_row().selection);
        r.push("adaptive_bound_holds", self.adaptive_bound_holds);
        r
    }
}

fn nine_tenths() -> ExactScalar {
    ExactScalar::new(9, 10)
}

/// Enumerates all `2^n` fixed selections.
///
/// For a nonmember the sweep must show rejection of at least 9/10 under every
/// selection and `p_reject >= 9 p_accept` in every row; if it does not, the
/// result is an [`Error::Inconsistent`].
pub fn worst_case_soundness(inst: &Instance, limit: usize) -> Result<SoundnessReport, Error> {
    let n = inst.len();
    if n > limit || n >= 64 {
        return Err(Error::LimitExceeded { what: "number of values", size: n, limit });
    }
    let oracle_witness = subset_sum_oracle(inst, limit)?;
    let rows: Vec<SelectionRow> = (0..1u64 << n)
        .into_par_iter()
        .map(|mask| {
            let selection = WitnessSubset::from_mask(n, mask);
            let p = pass_probs(inst, &selection)?;
            let v = run_protocol_exact(&p)?;
            Ok(SelectionRow {
                selection,
                p_accept: p.p_accept,
                p_reject: p.p_reject,
                overall_reject: v.overall_reject,
            })
        })
        .collect::<Result<_, Error>>()?;
    let worst_fixed_rejection = rows
        .iter()
        .map(|r| &r.overall_reject)
        .min()
        .cloned()
        .expect("at least one selection");
    let nine = ExactScalar::from_integer(9);
    let adaptive_bound_holds = rows.iter().all(|r| r.p_reject >= &nine * &r.p_accept);
    let oracle_membership = oracle_witness.is_some();
    if !oracle_membership && (worst_fixed_rejection < nine_tenths() || !adaptive_bound_holds) {
        return Err(Error::Inconsistent(format!(
            "nonmember {inst} rejected with only {worst_fixed_rejection}"
        )));
    }
    Ok(SoundnessReport {
        rows,
        worst_fixed_rejection,
        adaptive_bound_holds,
        oracle_membership,
        oracle_witness,
    })
}

/// Brute-force classical decision, returning a witness when one exists.
pub fn subset_sum_oracle(inst: &Instance, limit: usize) -> Result<Option<WitnessSubset>, Error> {
    let n = inst.len();
    if n > limit || n >= 64 {
        return Err(Error::LimitExceeded { what: "number of values", size: n, limit });
    }
    let small: Option<Vec<u128>> = inst.values.iter().map(|v| v.to_u128()).collect();
    match (small, inst.target.to_u128()) {
        // Values fit with room for n additions.
        (Some(values), Some(target)) if values.iter().all(|&v| v < 1 << 120) => {
            // Gray-code order changes one element per step.
            let mut sum: u128 = 0;
            if target == 0 {
                return Ok(Some(WitnessSubset(vec![false; n])));
            }
            let mut gray = 0u64;
            for k in 1..1u64 << n {
                let bit = k.trailing_zeros() as usize;
                gray ^= 1 << bit;
                if gray >> bit & 1 == 1 {
                    sum += values[bit];
                } else {
                    sum -= values[bit];
                }
                if sum == target {
                    return Ok(Some(WitnessSubset::from_mask(n, gray)));
                }
            }
            Ok(None)
        }
        _ => {
            for mask in 0..1u64 << n {
                let s: BigUint = (0..n)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| &inst.values[i])
                    .sum();
                if s == inst.target {
                    return Ok(Some(WitnessSubset::from_mask(n, mask)));
                }
            }
            Ok(None)
        }
    }
}

/// Error of `rounds` independent sequential runs that reject if any run
/// rejects. Members are never rejected by the honest prover, so only the
/// false-accept probability shrinks: `base_error^rounds`.
pub fn amplify(base_error: &ExactScalar, rounds: u32) -> Result<ExactScalar, Error> {
    if base_error.is_negative() || *base_error >= ExactScalar::new(1, 2) {
        return Err(Error::Precondition(format!(
            "base error {base_error} must lie in [0, 1/2)"
        )));
    }
    if rounds == 0 {
        return Err(Error::Precondition("at least one round is required".into()));
    }
    base_error.pow(rounds as i32)
}

/// Smallest `k` with `amplify(base_error, k) <= target`.
pub fn rounds_needed(base_error: &ExactScalar, target: &ExactScalar) -> Result<u32, Error> {
    if target.is_negative() || target.is_zero() {
        return Err(Error::Precondition("target error must be positive".into()));
    }
    let mut err = amplify(base_error, 1)?;
    let mut k = 1;
    while err > *target {
        err = &err * base_error;
        k += 1;
    }
    Ok(k)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuntimeEstimate {
    pub expected_passes: ExactScalar,
    /// Upper bound: every pass reads at most `|w| + 2` symbols.
    pub max_expected_symbol_reads: ExactScalar,
}

pub fn expected_runtime(inst: &Instance, selection: &WitnessSubset) -> Result<RuntimeEstimate, Error> {
    let verdict = overall_verdict(inst, selection)?;
    let passes = match verdict.expected_passes {
        ExpectedPasses::Finite(p) => p,
        ExpectedPasses::Infinite => {
            return Err(Error::Precondition("the protocol never halts for this selection".into()))
        }
    };
    let per_pass = ExactScalar::from_integer(encode_instance(inst).len() as i64 + 2);
    Ok(RuntimeEstimate { max_expected_symbol_reads: &per_pass * &passes, expected_passes: passes })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(s: u64, v: &[u64]) -> Instance {
        Instance::from_u64(s, v).unwrap()
    }

    fn sel(bits: &[bool]) -> WitnessSubset {
        WitnessSubset(bits.to_vec())
    }

    fn q(n: i64, d: i64) -> ExactScalar {
        ExactScalar::new(n, d)
    }

    #[test]
    fn pass_probs_examples() {
        let p = pass_probs(&inst(1, &[1]), &sel(&[true])).unwrap();
        assert_eq!(p.p_accept, q(1, 59049));
        assert_eq!(p.p_reject, q(0, 1));
        assert_eq!(p.p_restart, q(59048, 59049));

        let p = pass_probs(&inst(2, &[1]), &sel(&[true])).unwrap();
        assert_eq!(p.p_accept, q(1, 531441));
        assert_eq!(p.p_reject, q(1, 59049));

        let p = pass_probs(&inst(2, &[1]), &sel(&[false])).unwrap();
        assert_eq!(p.p_accept, q(1, 531441));
        assert_eq!(p.p_reject, q(4, 59049));
    }

    #[test]
    fn verdict_examples() {
        let v = overall_verdict(&inst(1, &[1]), &sel(&[true])).unwrap();
        assert!(v.overall_accept.is_one());
        assert_eq!(v.expected_passes, ExpectedPasses::Finite(59049.into()));
        let v = overall_verdict(&inst(2, &[1]), &sel(&[true])).unwrap();
        assert_eq!(v.overall_reject, q(9, 10));
        let v = overall_verdict(&inst(2, &[1]), &sel(&[false])).unwrap();
        assert_eq!(v.overall_reject, q(36, 37));
    }

    #[test]
    fn soundness_examples() {
        let r = worst_case_soundness(&inst(2, &[1]), DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(r.worst_fixed_rejection, q(9, 10));
        assert!(r.adaptive_bound_holds);
        assert!(!r.oracle_membership);

        let r = worst_case_soundness(&inst(1, &[1]), DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert!(r.oracle_membership);
        let w = r.oracle_witness.clone().unwrap();
        assert!(overall_verdict(&inst(1, &[1]), &w).unwrap().overall_accept.is_one());

        let r = worst_case_soundness(&inst(5, &[1, 2]), DEFAULT_ENUMERATION_LIMIT).unwrap();
        assert_eq!(r.worst_fixed_rejection, q(36, 37));
        assert_eq!(r.rows.len(), 4);
    }

    #[test]
    fn soundness_guard() {
        let big = Instance::from_u64(1, &[1; 5]).unwrap();
        assert!(matches!(
            worst_case_soundness(&big, 4),
            Err(Error::LimitExceeded { size: 5, limit: 4, .. })
        ));
    }

    #[test]
    fn overall_reject_grows_with_gap() {
        // overall_reject = 9d^2 / (9d^2 + 1) for d = |S - T|.
        let r = worst_case_soundness(&inst(20, &[1, 2, 4, 8]), DEFAULT_ENUMERATION_LIMIT).unwrap();
        let mut rows = r.rows.clone();
        let gap = |row: &SelectionRow| {
            let t: u64 = [1u64, 2, 4, 8]
                .iter()
                .zip(&row.selection.0)
                .filter(|(_, &s)| s)
                .map(|(v, _)| v)
                .sum();
            (20i64 - t as i64).abs()
        };
        rows.sort_by_key(gap);
        for pair in rows.windows(2) {
            let (a, b) = (gap(&pair[0]), gap(&pair[1]));
            if a < b {
                assert!(pair[0].overall_reject < pair[1].overall_reject);
            }
        }
        for row in &rows {
            let d2 = gap(row) * gap(row);
            assert_eq!(row.overall_reject, q(9 * d2, 9 * d2 + 1));
        }
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(subset_sum_oracle(&inst(1, &[1]), 24).unwrap(), Some(sel(&[true])));
        assert_eq!(subset_sum_oracle(&inst(2, &[1]), 24).unwrap(), None);
        let w = subset_sum_oracle(&inst(6, &[1, 2, 3]), 24).unwrap().unwrap();
        assert!(inst(6, &[1, 2, 3]).is_witness(&w));
        assert_eq!(subset_sum_oracle(&inst(0, &[5]), 24).unwrap(), Some(sel(&[false])));
        // Values too large for the machine-word path.
        let huge = BigUint::from(1u8) << 200usize;
        let i = Instance::new(huge.clone() + 1u8, vec![huge, BigUint::from(1u8)]).unwrap();
        assert_eq!(subset_sum_oracle(&i, 24).unwrap(), Some(sel(&[true, true])));
    }

    #[test]
    fn amplification() {
        assert_eq!(amplify(&q(1, 10), 2).unwrap(), q(1, 100));
        assert_eq!(amplify(&q(1, 10), 1).unwrap(), q(1, 10));
        assert_eq!(rounds_needed(&q(1, 10), &q(1, 1_000_000)).unwrap(), 6);
        assert!(amplify(&q(1, 2), 3).is_err());
        assert!(amplify(&q(1, 10), 0).is_err());
        assert_eq!(
            amplify(&q(1, 10), 5).unwrap(),
            &amplify(&q(1, 10), 2).unwrap() * &amplify(&q(1, 10), 3).unwrap()
        );
    }

    #[test]
    fn runtime_examples() {
        let r = expected_runtime(&inst(1, &[1]), &sel(&[true])).unwrap();
        assert_eq!(r.expected_passes, 59049.into());
        assert_eq!(r.max_expected_symbol_reads, (59049 * 6).into());
        let r = expected_runtime(&inst(3, &[1, 2]), &sel(&[true, true])).unwrap();
        assert_eq!(r.expected_passes, 387420489.into());
        let r = expected_runtime(&inst(2, &[1]), &sel(&[true])).unwrap();
        assert_eq!(r.expected_passes, q(531441, 10));
    }
}
