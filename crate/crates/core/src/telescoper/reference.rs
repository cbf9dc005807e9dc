//! Hand-entered reference certificates, used to cross-check solver output.

use crate::exactmath::Poly;

use super::{GEntry, ShiftWindow, TelescoperCertificate};

fn entry(i: i64, j: i64, poly: &str) -> GEntry {
    GEntry {
        i,
        j,
        poly: Poly::parse(poly).expect("valid polynomial literal"),
    }
}

fn square(seq: &str, w: ShiftWindow, target: [i64; 2], p: &str, g: Vec<GEntry>) -> TelescoperCertificate {
    let mut c = TelescoperCertificate {
        seq_a: seq.to_string(),
        seq_b: Some(seq.to_string()),
        windows: vec![w, w],
        target_shifts: target.to_vec(),
        p: Poly::parse(p).expect("valid polynomial literal"),
        g,
    };
    c.canonicalize();
    c
}

/// `(8k+9) W_k^2 = Δ_k S_k` with
/// `S_k = 9/2 k(k-1) W_{k-1}W_{k-2} - 3/2 k(k-1) W_{k-2}W_k
///        + 1/2 k(k-1) W_{k-1}W_k - 3/2 k(k-7) W_{k-1}^2`.
pub fn w_square() -> TelescoperCertificate {
    square(
        "W",
        ShiftWindow::new(-2, 0),
        [0, 0],
        "8k+9",
        vec![
            entry(-2, -1, "9/2 k(k-1)"),
            entry(-2, 0, "-3/2 k(k-1)"),
            entry(-1, 0, "1/2 k(k-1)"),
            entry(-1, -1, "-3/2 k(k-7)"),
        ],
    )
}

/// `k(k+1)(8k+9) T_k T_{k+1} = Δ_k S_k` over the window `[-1, 0]`.
pub fn t_cross_lower() -> TelescoperCertificate {
    square(
        "T",
        ShiftWindow::new(-1, 0),
        [0, 1],
        "k(k+1)(8k+9)",
        vec![
            entry(0, 0, "-1/24 k^2 (2k-5)^2"),
            entry(-1, 0, "1/4 k^2 (4k^2+20k-21)"),
            entry(-1, -1, "-3/8 k^2 (2k-3)^2"),
        ],
    )
}

/// The same summand over the window `[0, 1]`.
pub fn t_cross_upper() -> TelescoperCertificate {
    square(
        "T",
        ShiftWindow::new(0, 1),
        [0, 1],
        "k(k+1)(8k+9)",
        vec![
            entry(1, 1, "-1/24 (k+1)^2 (2k-3)^2"),
            entry(0, 1, "1/4 (k+1)(4k^3-5k+3)"),
            entry(0, 0, "-3/8 (k+1)^2 (2k-1)^2"),
        ],
    )
}

/// `(k+1)(16k+21) T_k T_{k+1} = Δ_k S_k` over the window `[-1, 0]`.
pub fn t_weighted() -> TelescoperCertificate {
    square(
        "T",
        ShiftWindow::new(-1, 0),
        [0, 1],
        "(k+1)(16k+21)",
        vec![
            entry(0, 0, "-1/8 k^2 (4k-7)"),
            entry(-1, 0, "3/4 k (4k^2+19k+6)"),
            entry(-1, -1, "-9/8 k^2 (4k-3)"),
        ],
    )
}
