//! Analytic reference curves.

use statrs::function::erf::erfc;

use crate::mimo::db_to_linear;

/// Gaussian tail probability Q(x).
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// BPSK over an unfaded SISO AWGN channel, Q(sqrt(2 gamma)).
pub fn siso_awgn_bpsk_ber(gamma_db: f64) -> f64 {
    q_function((2.0 * db_to_linear(gamma_db)).sqrt())
}

/// SNR in dB at which the SISO AWGN BPSK curve equals `ber` (0 < ber < 0.5).
pub fn siso_awgn_bpsk_snr_at(ber: f64) -> Option<f64> {
    if !(ber > 0.0 && ber < 0.5) {
        return None;
    }
    let (mut lo, mut hi) = (-60.0, 40.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if siso_awgn_bpsk_ber(mid) > ber {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
