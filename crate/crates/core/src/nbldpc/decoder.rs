//! Probability-domain belief propagation for GF(256) codes, with check-node
//! convolutions carried out in the Walsh-Hadamard domain.
//!
//! Per check node, every incoming message is first permuted by its edge
//! coefficient (value x moves to h*x), transformed, and the outgoing message
//! on each edge is the inverse transform of the product of the other edges'
//! transforms, permuted back by h. Variable nodes multiply their prior with
//! the incoming check messages. All messages are renormalized and floored at
//! [`MESSAGE_FLOOR`].

use crate::error::{Error, Result};
use crate::gf256::{Field, FieldElement, ORDER};

use super::code::SparseParityCheck;
use super::wht::fwht_in_place;
use super::{argmax, SymbolPrior};

pub const DEFAULT_MAX_ITERATIONS: usize = 200;

/// Lower bound applied to every message entry after normalization.
pub const MESSAGE_FLOOR: f64 = 1e-30;

type Message = [f64; ORDER];

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecodeResult {
    pub decided: Vec<FieldElement>,
    pub iterations_used: usize,
    /// Syndrome of `decided` is zero and every decision was a strict maximum.
    pub converged: bool,
}

#[inline]
fn normalize_with_floor(m: &mut Message) {
    let sum: f64 = m.iter().sum();
    if sum > 0.0 && sum.is_finite() {
        let inv = 1.0 / sum;
        m.iter_mut().for_each(|v| *v = (*v * inv).max(MESSAGE_FLOOR));
    } else {
        m.fill(1.0 / ORDER as f64);
    }
}

/// Outgoing check-to-variable messages for one check node.
///
/// `incoming[j]` is the variable-to-check message on edge j (a distribution
/// over that variable's value), `coeffs[j]` the edge coefficient. Each
/// `out[j]` is the distribution of x_j implied by `sum_i coeffs[i] x_i = 0`
/// and the other edges' messages.
pub fn check_node_update(field: &Field, coeffs: &[FieldElement], incoming: &[&Message], out: &mut [Message]) {
    let d = coeffs.len();
    debug_assert_eq!(incoming.len(), d);
    debug_assert_eq!(out.len(), d);
    let mut transforms: Vec<Message> = vec![[0.0; ORDER]; d];
    for j in 0..d {
        let row = field.mul_row(coeffs[j]);
        let t = &mut transforms[j];
        for x in 0..ORDER {
            t[row[x] as usize] = incoming[j][x];
        }
        fwht_in_place(t);
    }
    let mut prod: Message = [0.0; ORDER];
    for j in 0..d {
        prod.fill(1.0);
        for (i, t) in transforms.iter().enumerate() {
            if i != j {
                prod.iter_mut().zip(t).for_each(|(p, v)| *p *= v);
            }
        }
        fwht_in_place(&mut prod);
        // prod now holds 256 * distribution of coeffs[j] * x_j.
        let row = field.mul_row(coeffs[j]);
        let o = &mut out[j];
        for x in 0..ORDER {
            o[x] = prod[row[x] as usize].max(0.0);
        }
        normalize_with_floor(o);
    }
}

/// FFT-BP decoder bound to one code.
pub struct FftBpDecoder<'a> {
    code: &'a SparseParityCheck,
    max_iterations: usize,
    v2c: Vec<Message>,
    c2v: Vec<Message>,
}

impl<'a> FftBpDecoder<'a> {
    pub fn new(code: &'a SparseParityCheck, max_iterations: usize) -> Self {
        let e = code.entries().len();
        FftBpDecoder {
            code,
            max_iterations,
            v2c: vec![[0.0; ORDER]; e],
            c2v: vec![[1.0 / ORDER as f64; ORDER]; e],
        }
    }

    pub fn decode(&mut self, priors: &[SymbolPrior]) -> Result<DecodeResult> {
        let code = self.code;
        if priors.len() != code.n() {
            return Err(Error::Dimension(format!(
                "decoder needs {} priors, got {}",
                code.n(),
                priors.len()
            )));
        }
        for c in 0..code.n() {
            for &e in code.col_edges(c) {
                self.v2c[e] = *priors[c].probs();
                normalize_with_floor(&mut self.v2c[e]);
            }
        }
        self.c2v.iter_mut().for_each(|m| m.fill(1.0 / ORDER as f64));

        let mut decided = vec![FieldElement::ZERO; code.n()];
        let mut posterior: Message = [0.0; ORDER];
        let decide = |decided: &mut [FieldElement], c: usize, post: &Message| -> bool {
            let (v, unique) = argmax(post);
            decided[c] = FieldElement(v as u8);
            unique
        };

        let mut all_unique = true;
        for c in 0..code.n() {
            all_unique &= decide(&mut decided, c, priors[c].probs());
        }
        if all_unique && code.is_codeword(&decided) {
            return Ok(DecodeResult {
                decided,
                iterations_used: 0,
                converged: true,
            });
        }

        for iter in 1..=self.max_iterations {
            self.check_half_iteration();
            all_unique = true;
            for c in 0..code.n() {
                self.variable_update(c, priors[c].probs(), &mut posterior);
                all_unique &= decide(&mut decided, c, &posterior);
            }
            if all_unique && code.is_codeword(&decided) {
                return Ok(DecodeResult {
                    decided,
                    iterations_used: iter,
                    converged: true,
                });
            }
        }
        Ok(DecodeResult {
            decided,
            iterations_used: self.max_iterations,
            converged: false,
        })
    }

    fn check_half_iteration(&mut self) {
        let code = self.code;
        let field = code.field();
        let entries = code.entries();
        let mut coeffs = Vec::with_capacity(code.row_weight());
        for r in 0..code.m() {
            let range = code.row_edges(r);
            coeffs.clear();
            coeffs.extend(entries[range.clone()].iter().map(|e| e.coeff));
            let incoming: Vec<&Message> = self.v2c[range.clone()].iter().collect();
            check_node_update(field, &coeffs, &incoming, &mut self.c2v[range]);
        }
    }

    /// Writes new variable-to-check messages for column `c` and its posterior.
    fn variable_update(&mut self, c: usize, prior: &Message, posterior: &mut Message) {
        let edges = self.code.col_edges(c);
        *posterior = *prior;
        for &e in edges {
            posterior.iter_mut().zip(&self.c2v[e]).for_each(|(p, m)| *p *= m);
        }
        for &e in edges {
            let out = &mut self.v2c[e];
            *out = *prior;
            for &other in edges {
                if other != e {
                    out.iter_mut().zip(&self.c2v[other]).for_each(|(p, m)| *p *= m);
                }
            }
            normalize_with_floor(out);
        }
        let s: f64 = posterior.iter().sum();
        if s > 0.0 {
            posterior.iter_mut().for_each(|p| *p /= s);
        }
    }

    #[cfg(test)]
    fn messages(&self) -> (&[Message], &[Message]) {
        (&self.v2c, &self.c2v)
    }
}

/// Decodes one frame with a fresh decoder.
pub fn decode_fft_bp(code: &SparseParityCheck, priors: &[SymbolPrior], max_iterations: usize) -> Result<DecodeResult> {
    FftBpDecoder::new(code, max_iterations).decode(priors)
}
