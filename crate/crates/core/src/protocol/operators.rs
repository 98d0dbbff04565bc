//! The protocol's superoperators, transcribed entry for entry. Every matrix is
//! `(1/3)` times an integer matrix.

use crate::exact::{Mat3, OperationElement, OutcomeLabel, Superoperator};

use OutcomeLabel::{Accept, MoveRight, Reject, Restart};

fn third(rows: [[i64; 3]; 3], label: OutcomeLabel) -> OperationElement {
    OperationElement::new(Mat3::scaled_ints(1, 3, rows), label)
}

/// Constructor of one protocol operator.
pub type Op = fn() -> Superoperator;

pub const E0: &str = "E0";
pub const E1: &str = "E1";
pub const E_SHARP: &str = "E_sharp";
pub const E0_PRIME: &str = "E0_prime";
pub const E1_PRIME: &str = "E1_prime";
pub const E_SHARP_SELECTED: &str = "E_sharp_selected";
pub const E_SHARP_SKIP: &str = "E_sharp_skip";
pub const E_DOLLAR: &str = "E_dollar";
pub const SYMBOL_CHECK: &str = "symbol_check";

/// Target digit 0: doubles the `|q2>` amplitude on the surviving branch.
pub fn e0() -> Superoperator {
    Superoperator::new(
        E0,
        vec![
            third([[1, 0, 0], [0, 2, 0], [0, 0, 1]], MoveRight),
            third([[2, 0, -2], [2, 0, 2], [0, 2, 0]], Restart),
            third([[0, 1, 0], [0, 0, 0], [0, 0, 0]], Restart),
        ],
    )
}

/// Target digit 1: doubles the `|q2>` amplitude and adds one.
pub fn e1() -> Superoperator {
    Superoperator::new(
        E1,
        vec![
            third([[1, 0, 0], [1, 2, 0], [0, 0, 1]], MoveRight),
            third([[2, -1, 0], [1, 0, 2], [1, 0, -2]], Restart),
            third([[1, 0, 0], [0, 2, 0], [0, 0, 0]], Restart),
        ],
    )
}

/// Separator after the target: `{(1/3)I, (2/3)I, (2/3)I}`.
pub fn e_sharp() -> Superoperator {
    let id = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    Superoperator::new(
        E_SHARP,
        vec![
            OperationElement::new(Mat3::scaled_ints(1, 3, id), MoveRight),
            OperationElement::new(Mat3::scaled_ints(2, 3, id), Restart),
            OperationElement::new(Mat3::scaled_ints(2, 3, id), Restart),
        ],
    )
}

/// Value digit 0: doubles the `|q3>` amplitude.
pub fn e0_prime() -> Superoperator {
    Superoperator::new(
        E0_PRIME,
        vec![
            third([[1, 0, 0], [0, 1, 0], [0, 0, 2]], MoveRight),
            third([[2, 2, 0], [2, -2, 0], [0, 0, 2]], Restart),
            third([[0, 0, 1], [0, 0, 0], [0, 0, 0]], Restart),
        ],
    )
}

/// Value digit 1: doubles the `|q3>` amplitude and adds one.
pub fn e1_prime() -> Superoperator {
    Superoperator::new(
        E1_PRIME,
        vec![
            third([[1, 0, 0], [0, 1, 0], [1, 0, 2]], MoveRight),
            third([[2, 0, -1], [1, 2, 0], [1, -2, 0]], Restart),
            third([[1, 0, 0], [0, 0, 2], [0, 0, 0]], Restart),
        ],
    )
}

/// Separator after a selected value: subtracts `|q3>` from `|q2>` and clears `|q3>`.
pub fn e_sharp_selected() -> Superoperator {
    Superoperator::new(
        E_SHARP_SELECTED,
        vec![
            third([[1, 0, 0], [0, 1, -1], [0, 0, 0]], MoveRight),
            third([[0, -1, 1], [2, 1, -1], [2, -1, 1]], Restart),
            third([[0, 2, 2], [0, 0, 0], [0, 0, 0]], Restart),
            third([[0, 1, 0], [0, 0, 1], [0, 0, 0]], Restart),
        ],
    )
}

/// Separator after a skipped value: clears `|q3>` only.
pub fn e_sharp_skip() -> Superoperator {
    Superoperator::new(
        E_SHARP_SKIP,
        vec![
            third([[1, 0, 0], [0, 1, 0], [0, 0, 0]], MoveRight),
            third([[2, -2, 0], [2, 2, 0], [0, 0, 3]], Restart),
        ],
    )
}

/// Decision on the right endmarker.
pub fn e_dollar() -> Superoperator {
    Superoperator::new(
        E_DOLLAR,
        vec![
            third([[1, 0, 0], [0, 0, 0], [0, 0, 0]], Accept),
            third([[0, 0, 0], [0, 3, 0], [0, 0, 0]], Reject),
            third([[2, 0, 0], [2, 0, 0], [0, 0, 3]], Restart),
        ],
    )
}

/// Identity step used to recognize a separator before asking the prover.
pub fn symbol_check() -> Superoperator {
    Superoperator::new(SYMBOL_CHECK, vec![OperationElement::new(Mat3::identity(), MoveRight)])
}

/// The eight operators of the protocol, in tape order.
pub fn protocol_operators() -> Vec<Superoperator> {
    vec![
        e0(),
        e1(),
        e_sharp(),
        e0_prime(),
        e1_prime(),
        e_sharp_selected(),
        e_sharp_skip(),
        e_dollar(),
    ]
}
