//! FFT-BP against a direct-summation BP on the (3, 1) code, whose two checks
//! both touch all three symbols.

use nbmimo::detect::{likelihoods_to_symbol_priors, soft_output, SoftEstimate};
use nbmimo::gf256::{Field, FieldElement};
use nbmimo::mimo::{snr_to_noise_variance, Constellation};
use nbmimo::nbldpc::{build_regular_code, decode_fft_bp, Codec, SymbolPrior};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

type Msg = [f64; 256];

fn normalize(m: &mut Msg) {
    let s: f64 = m.iter().sum();
    m.iter_mut().for_each(|x| *x = (*x / s).max(1e-30));
}

/// Flooding BP with check messages summed over all valid configurations.
fn direct_bp(h: &[[u8; 3]; 2], f: &Field, priors: &[SymbolPrior], iters: usize) -> (Vec<u8>, usize) {
    let mul = |a: u8, b: usize| f.mul(FieldElement(a), FieldElement(b as u8)).0;
    let mut v2c = [[[0.0; 256]; 3]; 2];
    let mut c2v = [[[0.0; 256]; 3]; 2];
    for row in v2c.iter_mut() {
        for (j, m) in row.iter_mut().enumerate() {
            *m = *priors[j].probs();
        }
    }
    let mut dec = vec![0u8; 3];
    for it in 1..=iters {
        for r in 0..2 {
            for j in 0..3 {
                let (a, b) = match j {
                    0 => (1, 2),
                    1 => (0, 2),
                    _ => (0, 1),
                };
                let mut m = [0.0; 256];
                for (xj, slot) in m.iter_mut().enumerate() {
                    for xa in 0..256 {
                        let t = mul(h[r][j], xj) ^ mul(h[r][a], xa);
                        let xb = f.div(FieldElement(t), FieldElement(h[r][b])).unwrap().0 as usize;
                        *slot += v2c[r][a][xa] * v2c[r][b][xb];
                    }
                }
                normalize(&mut m);
                c2v[r][j] = m;
            }
        }
        let mut unique = true;
        for j in 0..3 {
            let mut post = *priors[j].probs();
            for r in 0..2 {
                for x in 0..256 {
                    post[x] *= c2v[r][j][x];
                }
                let mut m = *priors[j].probs();
                for x in 0..256 {
                    m[x] *= c2v[1 - r][j][x];
                }
                normalize(&mut m);
                v2c[r][j] = m;
            }
            let mut best = 0;
            let mut uniq = true;
            for x in 1..256 {
                if post[x] > post[best] {
                    best = x;
                    uniq = true;
                } else if post[x] == post[best] {
                    uniq = false;
                }
            }
            dec[j] = best as u8;
            unique &= uniq;
        }
        let zero = (0..2).all(|r| (0..3).fold(0, |acc, j| acc ^ mul(h[r][j], dec[j] as usize)) == 0);
        if unique && zero {
            return (dec, it);
        }
    }
    (dec, iters)
}

#[test]
fn fft_bp_equals_direct_bp() {
    let code = build_regular_code(3, 1, 2, 1).unwrap();
    let field = code.field().clone();
    let mut h = [[0u8; 3]; 2];
    for e in code.entries() {
        h[e.row][e.col] = e.coeff.0;
    }
    let codec = Codec::new(code, 1, 0).unwrap();
    let bpsk = Constellation::bpsk();
    let nv = snr_to_noise_variance(-2.0, 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut compared = 0;
    while compared < 25 {
        let info = [FieldElement(rng.random())];
        let word = codec.encode(&info).unwrap();
        let mut lik = Vec::new();
        for s in &word {
            for j in 0..8 {
                let x = if (s.0 >> (7 - j)) & 1 == 0 { 1.0 } else { -1.0 };
                let n: f64 = rng.sample(StandardNormal);
                let est = SoftEstimate { stream: 0, s_hat: Complex64::new(x + n * nv.sqrt(), 0.0), sigma_sq: nv, scale: 1.0 };
                lik.push(soft_output(&est, &bpsk, 1.0).unwrap());
            }
        }
        let priors = likelihoods_to_symbol_priors(&lik, 1).unwrap();
        let fft = decode_fft_bp(codec.code(), &priors, 20).unwrap();
        if fft.iterations_used == 0 {
            continue;
        }
        let (direct, iters) = direct_bp(&h, &field, &priors, 20);
        let mine: Vec<u8> = fft.decided.iter().map(|x| x.0).collect();
        assert_eq!(mine, direct);
        assert_eq!(fft.iterations_used, iters);
        compared += 1;
    }
}
