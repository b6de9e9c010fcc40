//! Cache-blocked layer kernels.
//!
//! Qubits below `LOW_BITS` are rotated inside contiguous blocks together with
//! the diagonal phase. Higher qubits are handled in groups of `GROUP` by
//! gathering `2^GROUP` strided rows of `TILE` amplitudes into a scratch tile.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::dropout::EnergyTable;

const LOW_BITS: usize = 10;
const GROUP: usize = 4;
const TILE: usize = 64;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

enum Phase<'a> {
    Identity,
    Levels { index: &'a [u16], factors: Vec<Complex64> },
    Energies { energies: &'a [f64], gamma: f64 },
}

impl<'a> Phase<'a> {
    fn new(table: &'a EnergyTable, gamma: f64) -> Self {
        if gamma == 0.0 {
            return Phase::Identity;
        }
        match table.levels() {
            Some(l) => Phase::Levels {
                index: &l.index,
                factors: l.values.iter().map(|&e| Complex64::cis(-gamma * e)).collect(),
            },
            None => Phase::Energies { energies: table.energies(), gamma },
        }
    }

    fn apply(&self, offset: usize, block: &mut [Complex64]) {
        match self {
            Phase::Identity => {}
            Phase::Levels { index, factors } => {
                for (a, &l) in block.iter_mut().zip(&index[offset..]) {
                    *a *= factors[l as usize];
                }
            }
            Phase::Energies { energies, gamma } => {
                for (a, &e) in block.iter_mut().zip(&energies[offset..]) {
                    *a *= Complex64::cis(-gamma * e);
                }
            }
        }
    }
}

#[inline(always)]
fn rot(a: &mut Complex64, b: &mut Complex64, s: f64, c: f64) {
    let (ar, ai, br, bi) = (a.re, a.im, b.re, b.im);
    *a = Complex64::new(c * ar - s * bi, c * ai + s * br);
    *b = Complex64::new(c * br - s * ai, c * bi + s * ar);
}

/// `e^{iβX}` on the bit with stride `st` of `buf`.
fn rotate(buf: &mut [Complex64], st: usize, s: f64, c: f64) {
    for block in buf.chunks_exact_mut(2 * st) {
        let (lo, hi) = block.split_at_mut(st);
        for (a, b) in lo.iter_mut().zip(hi.iter_mut()) {
            rot(a, b, s, c);
        }
    }
}

/// Rotates both buffers and returns `⟨λ|X|ψ⟩` for that bit.
fn rotate_pair(psi: &mut [Complex64], lam: &mut [Complex64], st: usize, s: f64, c: f64) -> Complex64 {
    let mut acc = ZERO;
    for (pb, lb) in psi.chunks_exact_mut(2 * st).zip(lam.chunks_exact_mut(2 * st)) {
        let (p0, p1) = pb.split_at_mut(st);
        let (l0, l1) = lb.split_at_mut(st);
        for i in 0..st {
            acc += l0[i].conj() * p1[i] + l1[i].conj() * p0[i];
            rot(&mut p0[i], &mut p1[i], s, c);
            rot(&mut l0[i], &mut l1[i], s, c);
        }
    }
    acc
}

/// Visits every tile of qubits `q0..q1` (all `>= LOW_BITS`).
fn for_each_tile(n: usize, q0: usize, q1: usize, mut f: impl FnMut(&[usize])) {
    let rows = 1usize << (q1 - q0);
    let mut starts = vec![0usize; rows];
    for high in (0..1usize << n).step_by(1 << q1) {
        for t in (0..1usize << q0).step_by(TILE) {
            for (r, s) in starts.iter_mut().enumerate() {
                *s = high + (r << q0) + t;
            }
            f(&starts);
        }
    }
}

fn gather(src: &[Complex64], starts: &[usize], buf: &mut [Complex64]) {
    for (row, &s) in buf.chunks_exact_mut(TILE).zip(starts) {
        row.copy_from_slice(&src[s..s + TILE]);
    }
}

fn scatter(dst: &mut [Complex64], starts: &[usize], buf: &[Complex64]) {
    for (row, &s) in buf.chunks_exact(TILE).zip(starts) {
        dst[s..s + TILE].copy_from_slice(row);
    }
}

fn high_groups(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (LOW_BITS.min(n)..n).step_by(GROUP).map(move |q0| (q0, (q0 + GROUP).min(n)))
}

/// One driving layer followed by one mixing layer.
pub(crate) fn forward_layer(amps: &mut [Complex64], n: usize, table: &EnergyTable, gamma: f64, beta: f64) {
    let phase = Phase::new(table, gamma);
    let (s, c) = libm::sincos(beta);
    let low = n.min(LOW_BITS);
    for (k, block) in amps.chunks_exact_mut(1 << low).enumerate() {
        phase.apply(k << low, block);
        if beta != 0.0 {
            for q in 0..low {
                rotate(block, 1 << q, s, c);
            }
        }
    }
    if beta == 0.0 {
        return;
    }
    let mut buf = vec![ZERO; TILE << GROUP];
    for (q0, q1) in high_groups(n) {
        let buf = &mut buf[..TILE << (q1 - q0)];
        for_each_tile(n, q0, q1, |starts| {
            gather(amps, starts, buf);
            for j in 0..q1 - q0 {
                rotate(buf, TILE << j, s, c);
            }
            scatter(amps, starts, buf);
        });
    }
}

/// Mixing layer alone.
pub(crate) fn mix(amps: &mut [Complex64], n: usize, beta: f64) {
    let (s, c) = libm::sincos(beta);
    if beta == 0.0 {
        return;
    }
    let low = n.min(LOW_BITS);
    for block in amps.chunks_exact_mut(1 << low) {
        for q in 0..low {
            rotate(block, 1 << q, s, c);
        }
    }
    let mut buf = vec![ZERO; TILE << GROUP];
    for (q0, q1) in high_groups(n) {
        let buf = &mut buf[..TILE << (q1 - q0)];
        for_each_tile(n, q0, q1, |starts| {
            gather(amps, starts, buf);
            for j in 0..q1 - q0 {
                rotate(buf, TILE << j, s, c);
            }
            scatter(amps, starts, buf);
        });
    }
}

/// Diagonal phase alone.
pub(crate) fn drive(amps: &mut [Complex64], table: &EnergyTable, gamma: f64) {
    Phase::new(table, gamma).apply(0, amps);
}

/// `e^{iβX}` on the top qubit of a flip-symmetric state stored as its lower
/// half: the partner of `b` is `b ^ mask`, i.e. the reversed index.
pub(crate) fn mix_mirror(half: &mut [Complex64], beta: f64) {
    let (s, c) = libm::sincos(beta);
    let len = half.len();
    let (lo, hi) = half.split_at_mut(len / 2);
    for (a, b) in lo.iter_mut().zip(hi.iter_mut().rev()) {
        rot(a, b, s, c);
    }
}

/// Inverse of [`mix_mirror`] on both halves, returning `⟨λ|X|ψ⟩` over the
/// stored half.
pub(crate) fn unmix_mirror(psi: &mut [Complex64], lam: &mut [Complex64], beta: f64) -> Complex64 {
    let (s, c) = libm::sincos(-beta);
    let len = psi.len();
    let (p0, p1) = psi.split_at_mut(len / 2);
    let (l0, l1) = lam.split_at_mut(len / 2);
    let mut acc = ZERO;
    for (((a, b), la), lb) in p0.iter_mut().zip(p1.iter_mut().rev()).zip(l0.iter_mut()).zip(l1.iter_mut().rev()) {
        acc += la.conj() * *b + lb.conj() * *a;
        rot(a, b, s, c);
        rot(la, lb, s, c);
    }
    acc
}

pub(crate) struct Overlaps {
    /// `Σ_q ⟨λ|X_q|ψ⟩` at the mixing gate.
    pub(crate) x: Complex64,
    /// `⟨λ|E|ψ⟩` at the driving gate.
    pub(crate) e: Complex64,
}

/// Undoes one layer on both `psi` and `lam`, collecting the overlaps the
/// gradient needs. The phase is left in place when `undo_phase` is false.
pub(crate) fn backward_layer(
    psi: &mut [Complex64],
    lam: &mut [Complex64],
    n: usize,
    table: &EnergyTable,
    gamma: f64,
    beta: f64,
    undo_phase: bool,
) -> Overlaps {
    let (s, c) = libm::sincos(-beta);
    let mut x = ZERO;
    let mut pbuf = vec![ZERO; TILE << GROUP];
    let mut lbuf = vec![ZERO; TILE << GROUP];
    for (q0, q1) in high_groups(n) {
        let len = TILE << (q1 - q0);
        let (pb, lb) = (&mut pbuf[..len], &mut lbuf[..len]);
        for_each_tile(n, q0, q1, |starts| {
            gather(psi, starts, pb);
            gather(lam, starts, lb);
            for j in 0..q1 - q0 {
                x += rotate_pair(pb, lb, TILE << j, s, c);
            }
            scatter(psi, starts, pb);
            scatter(lam, starts, lb);
        });
    }
    let phase = if undo_phase { Phase::new(table, -gamma) } else { Phase::Identity };
    let energies = table.energies();
    let low = n.min(LOW_BITS);
    let mut e = ZERO;
    for (k, (pb, lb)) in psi.chunks_exact_mut(1 << low).zip(lam.chunks_exact_mut(1 << low)).enumerate() {
        for q in 0..low {
            x += rotate_pair(pb, lb, 1 << q, s, c);
        }
        let off = k << low;
        for ((p, l), &en) in pb.iter().zip(lb.iter()).zip(&energies[off..]) {
            e += l.conj() * p * en;
        }
        phase.apply(off, pb);
        phase.apply(off, lb);
    }
    Overlaps { x, e }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{Clause, Instance};

    fn naive_mix(amps: &mut [Complex64], n: usize, beta: f64) {
        let (s, c) = libm::sincos(beta);
        for q in 0..n {
            for b in 0..amps.len() {
                if b >> q & 1 == 0 {
                    let (mut x, mut y) = (amps[b], amps[b | 1 << q]);
                    rot(&mut x, &mut y, s, c);
                    amps[b] = x;
                    amps[b | 1 << q] = y;
                }
            }
        }
    }

    fn state(n: usize) -> Vec<Complex64> {
        (0..1usize << n).map(|i| Complex64::new(libm::sin(i as f64), libm::cos(0.3 * i as f64))).collect()
    }

    #[test]
    fn blocked_mixer_matches_naive_across_group_boundaries() {
        for n in [1, 3, LOW_BITS, LOW_BITS + 1, LOW_BITS + GROUP, LOW_BITS + GROUP + 2] {
            let mut a = state(n);
            let mut b = a.clone();
            mix(&mut a, n, 0.37);
            naive_mix(&mut b, n, 0.37);
            let dev = a.iter().zip(&b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(dev < 1e-12, "n={n}: {dev}");
        }
    }

    #[test]
    fn backward_inverts_forward() {
        let n = LOW_BITS + GROUP + 1;
        let clauses = (0..n - 2).map(|i| Clause::new(i, i + 1, i + 2).unwrap()).collect();
        let inst = Instance::new(n, clauses, None).unwrap();
        let table = EnergyTable::full(&inst).unwrap();
        let orig = state(n);
        let mut psi = orig.clone();
        forward_layer(&mut psi, n, &table, 0.21, -0.8);
        let mut lam = psi.clone();
        backward_layer(&mut psi, &mut lam, n, &table, 0.21, -0.8, true);
        let dev = psi.iter().zip(&orig).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(dev < 1e-12, "{dev}");
    }
    #[test]
    fn mirror_mixing_matches_full_on_symmetric_states() {
        for n in [2, 5, LOW_BITS + 2] {
            let full_len = 1usize << n;
            let mut full: Vec<Complex64> = state(n - 1);
            let rev: Vec<Complex64> = full.iter().rev().copied().collect();
            full.extend(rev);
            assert_eq!(full.len(), full_len);
            let mut half = full[..full_len / 2].to_vec();
            mix(&mut full, n, 0.61);
            mix(&mut half, n - 1, 0.61);
            mix_mirror(&mut half, 0.61);
            let dev = half.iter().zip(&full).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            assert!(dev < 1e-12, "n={n}: {dev}");
        }
    }
}
