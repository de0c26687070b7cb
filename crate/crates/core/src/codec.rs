//! Encoding, the parallel prefix-erasure channel, and the two decoders.
//!
//! Encoding sends x_l = A_l u over channel l; channel l delivers an unerased
//! prefix of length v_l. Any pattern with sum v_l >= K admits unique
//! decoding over a valid family. The generic decoder stacks the surviving
//! rows and solves by Gaussian elimination (cubic in K). For the Pascal
//! construction the received symbols are Hasse derivative values of the
//! information polynomial at the construction's evaluation points, so a
//! Newton-style interpolation recovers u in O(K^2) field multiplications:
//! it maintains a partial interpolant h and a product polynomial g of the
//! consumed linear factors, absorbing one received symbol per step via the
//! discrepancy delta = y - h^(n)(beta) and the update
//! h += (delta / g^(n)(beta)) g.
//!
//! The infinity channel (index 1) delivers top coefficients directly. Its
//! contribution t(X) = sum y_1[n] X^{K-1-n} is subtracted from every finite
//! channel's symbols before interpolation and added back afterwards, which
//! reduces to the plain loop whenever v_1 = 0.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use num_bigint::BigUint;
use thiserror::Error;

use crate::gf::{self, FieldElement, FieldSpec, GfError};
use crate::linalg::LinalgError;
use crate::poly::{EvalPoint, Poly, PolyError};
use crate::udm::{
    completion_counts, BetaSequence, ErasurePattern, PatternMode, UdmError, UdmFamily,
};

#[derive(Debug, Error)]
pub enum CodecError {
    #[error("information vector has {len} entries, expected K = {k}")]
    InfoLength { len: usize, k: usize },
    #[error("codeword list has {len} channels, expected L = {l}")]
    ChannelCount { len: usize, l: usize },
    #[error("codeword for channel {l} has {len} symbols, expected N = {n}")]
    CodewordLength { l: usize, len: usize, n: usize },
    #[error("insufficient symbols: received {received}, need at least K = {required}")]
    InsufficientSymbols { received: usize, required: usize },
    #[error("stacked matrix for pattern {pattern} is singular; the family is not universally decodable")]
    NotUdm { pattern: String },
    #[error("received word is inconsistent with the family at pattern {pattern}")]
    Inconsistent { pattern: String },
    #[error("decoder invariant violated: {context}")]
    InternalInvariant { context: String },
    #[error(transparent)]
    Udm(#[from] UdmError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Field(#[from] GfError),
}

/// Channel outputs: per channel, the unerased prefix of the codeword. The
/// prefix structure is the invariant of the channel model, so only the
/// prefixes are stored; everything past them is erased.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct ChannelOutput {
    n: usize,
    prefixes: Vec<Vec<FieldElement>>,
}

impl ChannelOutput {
    pub fn new(n: usize, prefixes: Vec<Vec<FieldElement>>) -> Result<Self, CodecError> {
        for (l, p) in prefixes.iter().enumerate() {
            if p.len() > n {
                return Err(CodecError::CodewordLength {
                    l,
                    len: p.len(),
                    n,
                });
            }
        }
        Ok(ChannelOutput { n, prefixes })
    }

    pub fn channels(&self) -> usize {
        self.prefixes.len()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// The received prefix of channel l.
    pub fn prefix(&self, l: usize) -> &[FieldElement] {
        &self.prefixes[l]
    }

    /// Symbol n of channel l, or None when erased.
    pub fn symbol(&self, l: usize, n: usize) -> Option<FieldElement> {
        self.prefixes[l].get(n).copied()
    }

    /// The erasure pattern (prefix lengths).
    pub fn pattern(&self) -> ErasurePattern {
        ErasurePattern::new(self.prefixes.iter().map(|p| p.len()).collect(), self.n)
            .expect("prefixes are bounded by n")
    }
}

/// x_l = A_l u for every channel.
pub fn encode_matrix(
    family: &UdmFamily,
    u: &[FieldElement],
) -> Result<Vec<Vec<FieldElement>>, CodecError> {
    if u.len() != family.k() {
        return Err(CodecError::InfoLength {
            len: u.len(),
            k: family.k(),
        });
    }
    let spec = family.spec();
    Ok(family
        .matrices()
        .iter()
        .map(|a| a.mat_vec(u, spec))
        .collect())
}

/// Taylor-form encoding: symbol n of channel l is the n-th Hasse derivative
/// of the information polynomial at beta_l (top coefficients for the
/// infinity channel). Coincides with the matrix encoding of the Pascal
/// family built from the same alpha.
pub fn encode_taylor(
    u: &[FieldElement],
    betas: &BetaSequence,
    n: usize,
    spec: &FieldSpec,
) -> Result<Vec<Vec<FieldElement>>, CodecError> {
    let k = u.len();
    let u_poly = Poly::from_coeffs(u.to_vec());
    let mut out = Vec::with_capacity(betas.len());
    for l in 0..betas.len() {
        let point = betas.point(l);
        let mut x = Vec::with_capacity(n);
        for deriv in 0..n {
            x.push(u_poly.hasse_eval(deriv, point, k, spec)?);
        }
        out.push(x);
    }
    Ok(out)
}

/// Keeps the first v_l symbols of each codeword, erasing the rest.
pub fn channel_erase(
    x: &[Vec<FieldElement>],
    v: &ErasurePattern,
) -> Result<ChannelOutput, CodecError> {
    if v.v().len() != x.len() {
        return Err(CodecError::ChannelCount {
            len: x.len(),
            l: v.v().len(),
        });
    }
    let n = x.first().map_or(0, |c| c.len());
    for (l, c) in x.iter().enumerate() {
        if c.len() != n {
            return Err(CodecError::CodewordLength {
                l,
                len: c.len(),
                n,
            });
        }
    }
    let prefixes = x
        .iter()
        .zip(v.v())
        .map(|(c, &take)| c[..take].to_vec())
        .collect();
    ChannelOutput::new(n, prefixes)
}

/// Uniform sampler over the erasure-pattern sets, by unranking against the
/// exact completion counts. Deterministic for a given seeded generator.
pub struct PatternSampler {
    l: usize,
    n: usize,
    k: usize,
    mode: PatternMode,
    counts: Vec<Vec<BigUint>>,
    total: BigUint,
}

impl PatternSampler {
    pub fn new(l: usize, n: usize, k: usize, mode: PatternMode) -> Self {
        let counts = completion_counts(l, n);
        let total = match mode {
            PatternMode::Exact => counts[0].get(k).cloned().unwrap_or_default(),
            PatternMode::AtLeast => {
                let mut acc = BigUint::default();
                for sum in k..=l * n {
                    acc += counts[0].get(sum).cloned().unwrap_or_default();
                }
                acc
            }
        };
        PatternSampler {
            l,
            n,
            k,
            mode,
            counts,
            total,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.total == BigUint::default()
    }

    pub fn sample(&self, rng: &mut impl RngCore) -> Option<ErasurePattern> {
        if self.is_empty() {
            return None;
        }
        let mut r = uniform_below(&self.total, rng);
        // pick the target sum (for AtLeast, sums are blocked in order)
        let mut target = self.k;
        if self.mode == PatternMode::AtLeast {
            loop {
                let block = self.counts[0]
                    .get(target)
                    .cloned()
                    .unwrap_or_default();
                if r < block {
                    break;
                }
                r -= block;
                target += 1;
            }
        }
        // unrank lexicographically within the fixed-sum set
        let mut v = Vec::with_capacity(self.l);
        let mut rem = target;
        for pos in 0..self.l {
            for value in 0..=self.n.min(rem) {
                let completions = &self.counts[pos + 1][rem - value];
                if r < *completions {
                    v.push(value);
                    rem -= value;
                    break;
                }
                r -= completions;
            }
        }
        debug_assert_eq!(rem, 0);
        Some(ErasurePattern::new(v, self.n).expect("values bounded by n"))
    }
}

/// Uniform BigUint below `bound` by rejection on the bit length.
fn uniform_below(bound: &BigUint, rng: &mut impl RngCore) -> BigUint {
    let bits = bound.bits();
    let bytes = bits.div_ceil(8) as usize;
    let mask_shift = bytes as u64 * 8 - bits;
    loop {
        let mut buf = vec![0u8; bytes];
        rng.fill_bytes(&mut buf);
        buf[bytes - 1] >>= mask_shift;
        let candidate = BigUint::from_bytes_le(&buf);
        if candidate < *bound {
            return candidate;
        }
    }
}

/// Draws one pattern uniformly from the chosen set.
pub fn sample_pattern(
    l: usize,
    n: usize,
    k: usize,
    mode: PatternMode,
    seed: u64,
) -> Option<ErasurePattern> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PatternSampler::new(l, n, k, mode).sample(&mut rng)
}

/// Drops over-received symbols until the pattern sums to exactly K,
/// decrementing from the last channel backwards.
fn reduce_pattern(v: &[usize], k: usize) -> Vec<usize> {
    let mut out = v.to_vec();
    let mut excess: usize = out.iter().sum::<usize>() - k;
    for slot in out.iter_mut().rev() {
        if excess == 0 {
            break;
        }
        let take = (*slot).min(excess);
        *slot -= take;
        excess -= take;
    }
    out
}

/// Generic decoder: stack the surviving rows (reduced to exactly K of them)
/// and solve the linear system.
pub fn decode_gaussian(
    family: &UdmFamily,
    out: &ChannelOutput,
) -> Result<Vec<FieldElement>, CodecError> {
    let k = family.k();
    if out.channels() != family.l() {
        return Err(CodecError::ChannelCount {
            len: out.channels(),
            l: family.l(),
        });
    }
    let pattern = out.pattern();
    let received = pattern.sum();
    if received < k {
        return Err(CodecError::InsufficientSymbols {
            received,
            required: k,
        });
    }
    let v = reduce_pattern(pattern.v(), k);
    let reduced = ErasurePattern::new(v.clone(), family.n())?;
    let stacked = family.stack(&reduced)?;
    let mut y = Vec::with_capacity(k);
    for (l, &take) in v.iter().enumerate() {
        y.extend_from_slice(&out.prefix(l)[..take]);
    }
    stacked.solve(&y, family.spec()).map_err(|e| match e {
        LinalgError::SingularSystem { .. } => CodecError::NotUdm {
            pattern: reduced.to_string(),
        },
        LinalgError::InconsistentSystem { .. } => CodecError::Inconsistent {
            pattern: reduced.to_string(),
        },
        other => CodecError::Linalg(other),
    })
}

/// Per-invocation decoder instrumentation: counted field operations and,
/// when requested, the (delta, h, g) snapshot after every update step.
#[derive(Clone, Debug, Default)]
pub struct DecoderTrace {
    pub field_ops: u64,
    pub steps: Vec<NewtonStep>,
}

#[derive(Clone, Debug)]
pub struct NewtonStep {
    pub delta: FieldElement,
    pub h: Poly,
    pub g: Poly,
}

/// Options for the instrumented Newton decoder.
#[derive(Clone, Copy, Default)]
pub struct NewtonOptions {
    /// Assert the interpolation invariants after every step (quadratic
    /// overhead per step; for tests).
    pub check_invariants: bool,
    /// Retain per-step snapshots in the trace.
    pub record_steps: bool,
}

/// Newton-interpolation decoder for Pascal-encoded words; O(K^2) counted
/// multiplications.
pub fn decode_newton(
    out: &ChannelOutput,
    betas: &BetaSequence,
    k: usize,
    spec: &FieldSpec,
) -> Result<Vec<FieldElement>, CodecError> {
    decode_newton_with(out, betas, k, spec, NewtonOptions::default()).map(|(u, _)| u)
}

/// As [`decode_newton`], returning the trace and honoring the options.
pub fn decode_newton_with(
    out: &ChannelOutput,
    betas: &BetaSequence,
    k: usize,
    spec: &FieldSpec,
    opts: NewtonOptions,
) -> Result<(Vec<FieldElement>, DecoderTrace), CodecError> {
    let l = betas.len();
    if out.channels() != l {
        return Err(CodecError::ChannelCount {
            len: out.channels(),
            l,
        });
    }
    let pattern = out.pattern();
    let received = pattern.sum();
    if received < k {
        return Err(CodecError::InsufficientSymbols {
            received,
            required: k,
        });
    }
    let ops_before = gf::op_count();
    let v = reduce_pattern(pattern.v(), k);
    let v1 = if l >= 2 { v[1] } else { 0 };

    // the infinity channel hands over the top coefficients directly:
    // t(X) = sum_{n in [v1]} y_1[n] X^{K-1-n}
    let t = if v1 > 0 {
        let mut coeffs = vec![FieldElement::ZERO; k];
        for n in 0..v1 {
            coeffs[k - 1 - n] = out.prefix(1)[n];
        }
        Poly::from_coeffs(coeffs)
    } else {
        Poly::zero()
    };

    // subtract t's contribution from every finite channel, then interpolate
    // the remainder, which has degree < K - v1
    let mut h = Poly::zero();
    let mut g = Poly::one();
    let mut steps_done = 0usize;
    let mut trace = DecoderTrace::default();
    let mut consumed: Vec<(FieldElement, usize, FieldElement)> = Vec::new();

    for channel in 0..l {
        if channel == 1 && l >= 2 {
            continue;
        }
        let EvalPoint::Finite(beta) = betas.point(channel) else {
            return Err(CodecError::InternalInvariant {
                context: format!("channel {channel} has a non-finite evaluation point"),
            });
        };
        for n in 0..v[channel] {
            let adjusted = spec.sub(out.prefix(channel)[n], t.hasse_point_eval(n, beta, spec));
            let delta = spec.sub(adjusted, h.hasse_point_eval(n, beta, spec));
            let g_val = g.hasse_point_eval(n, beta, spec);
            if g_val.is_zero() {
                return Err(CodecError::InternalInvariant {
                    context: format!(
                        "g^({n})(beta_{channel}) = 0 at interpolation step {steps_done}"
                    ),
                });
            }
            let coeff = spec.mul(delta, spec.inv(g_val).expect("nonzero"));
            h = h.add(&g.scale(coeff, spec), spec);
            g = g.mul_linear(beta, spec);
            steps_done += 1;
            consumed.push((beta, n, adjusted));

            if opts.check_invariants {
                debug_check_invariants(&h, &g, &consumed, spec)?;
                if g.degree() != steps_done as isize {
                    return Err(CodecError::InternalInvariant {
                        context: format!("deg g = {} after {steps_done} updates", g.degree()),
                    });
                }
            }
            if opts.record_steps {
                trace.steps.push(NewtonStep {
                    delta,
                    h: h.clone(),
                    g: g.clone(),
                });
            }
        }
    }

    if h.degree() >= (k - v1) as isize {
        return Err(CodecError::InternalInvariant {
            context: format!("deg h = {} reached K - v1 = {}", h.degree(), k - v1),
        });
    }

    let u_poly = h.add(&t, spec);
    let mut u = vec![FieldElement::ZERO; k];
    for (i, slot) in u.iter_mut().enumerate() {
        *slot = u_poly.coeff(i);
    }
    trace.field_ops = gf::op_count() - ops_before;
    Ok((u, trace))
}

/// The interpolation invariant: every consumed symbol (beta, n, value) is
/// matched by h and annihilated by g.
fn debug_check_invariants(
    h: &Poly,
    g: &Poly,
    consumed: &[(FieldElement, usize, FieldElement)],
    spec: &FieldSpec,
) -> Result<(), CodecError> {
    for &(beta, n, val) in consumed {
        let h_val = h.hasse_point_eval(n, beta, spec);
        if h_val != val {
            return Err(CodecError::InternalInvariant {
                context: format!("h^({n})({beta}) = {h_val}, expected {val}"),
            });
        }
        let g_val = g.hasse_point_eval(n, beta, spec);
        if !g_val.is_zero() {
            return Err(CodecError::InternalInvariant {
                context: format!("g^({n})({beta}) = {g_val}, expected 0"),
            });
        }
    }
    Ok(())
}

/// Which decoder(s) a simulation run exercises.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum DecoderChoice {
    Gaussian,
    Newton,
    Both,
}

impl DecoderChoice {
    fn runs_gaussian(self) -> bool {
        matches!(self, DecoderChoice::Gaussian | DecoderChoice::Both)
    }

    fn runs_newton(self) -> bool {
        matches!(self, DecoderChoice::Newton | DecoderChoice::Both)
    }
}

/// Tallies from a batch of encode -> erase -> decode trials.
#[derive(Clone, Debug, Default)]
pub struct SimulationStats {
    pub trials: usize,
    /// Trials where every requested decoder returned the sent word.
    pub successes: usize,
    /// Decoder returned a word different from the sent one.
    pub mismatches: usize,
    /// Decoder hit a singular stacked system.
    pub singular_failures: usize,
    /// The two decoders returned different words on the same trial.
    pub cross_decoder_mismatches: usize,
    pub gaussian_decodes: usize,
    pub gaussian_ops_total: u64,
    pub newton_decodes: usize,
    pub newton_ops_total: u64,
}

impl SimulationStats {
    pub fn success_rate(&self) -> f64 {
        if self.trials == 0 {
            return 1.0;
        }
        self.successes as f64 / self.trials as f64
    }

    pub fn mean_gaussian_ops(&self) -> Option<f64> {
        (self.gaussian_decodes > 0)
            .then(|| self.gaussian_ops_total as f64 / self.gaussian_decodes as f64)
    }

    pub fn mean_newton_ops(&self) -> Option<f64> {
        (self.newton_decodes > 0)
            .then(|| self.newton_ops_total as f64 / self.newton_decodes as f64)
    }
}

/// Batch driver: encodes random words, pushes them through random erasure
/// patterns, decodes with the chosen decoder(s), and tallies the outcomes.
/// Deterministic for a given seed. The Newton decoder needs the family's
/// evaluation points.
pub fn simulate(
    family: &UdmFamily,
    betas: Option<&BetaSequence>,
    trials: usize,
    seed: u64,
    mode: PatternMode,
    decoder: DecoderChoice,
) -> Result<SimulationStats, CodecError> {
    let spec = family.spec();
    let (l, n, k) = (family.l(), family.n(), family.k());
    if decoder.runs_newton() && betas.is_none() {
        return Err(CodecError::InternalInvariant {
            context: "the newton decoder needs the construction's evaluation points \
                      (pascal provenance)"
                .into(),
        });
    }
    let sampler = PatternSampler::new(l, n, k, mode);
    if sampler.is_empty() {
        return Err(CodecError::InsufficientSymbols {
            received: l * n,
            required: k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut stats = SimulationStats {
        trials,
        ..Default::default()
    };
    for _ in 0..trials {
        let u: Vec<FieldElement> = (0..k)
            .map(|_| spec.element(rng.random_range(0..spec.q())).unwrap())
            .collect();
        let pattern = sampler.sample(&mut rng).expect("non-empty set");
        let x = encode_matrix(family, &u)?;
        let received = channel_erase(&x, &pattern)?;

        let mut ok = true;
        let mut gaussian_word = None;
        if decoder.runs_gaussian() {
            let (res, ops) = gf::with_op_count(|| decode_gaussian(family, &received));
            stats.gaussian_decodes += 1;
            stats.gaussian_ops_total += ops;
            match res {
                Ok(word) => {
                    if word != u {
                        stats.mismatches += 1;
                        ok = false;
                    }
                    gaussian_word = Some(word);
                }
                Err(CodecError::NotUdm { .. }) => {
                    stats.singular_failures += 1;
                    ok = false;
                }
                Err(other) => return Err(other),
            }
        }
        if decoder.runs_newton() {
            let betas = betas.expect("checked above");
            let (res, ops) = gf::with_op_count(|| decode_newton(&received, betas, k, spec));
            stats.newton_decodes += 1;
            stats.newton_ops_total += ops;
            match res {
                Ok(word) => {
                    if word != u {
                        stats.mismatches += 1;
                        ok = false;
                    }
                    if let Some(g) = &gaussian_word {
                        if *g != word {
                            stats.cross_decoder_mismatches += 1;
                        }
                    }
                }
                Err(CodecError::NotUdm { .. }) | Err(CodecError::InternalInvariant { .. }) => {
                    stats.singular_failures += 1;
                    ok = false;
                }
                Err(other) => return Err(other),
            }
        }
        if ok {
            stats.successes += 1;
        }
    }
    Ok(stats)
}

/// One row of the complexity profile.
#[derive(Clone, Debug)]
pub struct ProfileRow {
    pub k: usize,
    pub trials: usize,
    pub mean_gaussian_ops: f64,
    pub mean_newton_ops: f64,
}

/// Measures mean counted field operations (multiplications and inversions)
/// of both decoders over random information words and exact-sum patterns on
/// Pascal families; deterministic for a given seed.
///
/// The family shape scales with K (N = ceil(2K/L), so capacity LN = 2K):
/// proportional shapes keep the stacked systems self-similar across K, which
/// is what makes the growth ratios reflect the decoders' complexity.
pub fn op_count_profile(
    spec: &FieldSpec,
    l: usize,
    ks: &[usize],
    trials: usize,
    seed: u64,
) -> Result<Vec<ProfileRow>, CodecError> {
    let mut rows = Vec::with_capacity(ks.len());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for &k in ks {
        let n = (2 * k).div_ceil(l).clamp(1, k);
        let family = crate::udm::construct_pascal(l, n, k, spec, None)?;
        let betas = BetaSequence::new(spec, spec.alpha(), l)?;
        let sampler = PatternSampler::new(l, n, k, PatternMode::Exact);
        let mut gaussian_total = 0u64;
        let mut newton_total = 0u64;
        for _ in 0..trials {
            let u: Vec<FieldElement> = (0..k)
                .map(|_| spec.element(rng.random_range(0..spec.q())).unwrap())
                .collect();
            let pattern = sampler.sample(&mut rng).ok_or_else(|| {
                CodecError::InternalInvariant {
                    context: "empty pattern set in the profile".into(),
                }
            })?;
            let x = encode_matrix(&family, &u)?;
            let received = channel_erase(&x, &pattern)?;

            let (decoded, ops) = gf::with_op_count(|| decode_gaussian(&family, &received));
            let decoded = decoded?;
            if decoded != u {
                return Err(CodecError::InternalInvariant {
                    context: format!("gaussian profile decode mismatch at K = {k}"),
                });
            }
            gaussian_total += ops;

            let (decoded, ops) = gf::with_op_count(|| decode_newton(&received, &betas, k, spec));
            let decoded = decoded?;
            if decoded != u {
                return Err(CodecError::InternalInvariant {
                    context: format!("newton profile decode mismatch at K = {k}"),
                });
            }
            newton_total += ops;
        }
        rows.push(ProfileRow {
            k,
            trials,
            mean_gaussian_ops: gaussian_total as f64 / trials as f64,
            mean_newton_ops: newton_total as f64 / trials as f64,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf::field_new;
    use crate::udm::{construct_pascal, enumerate_patterns, verify};

    fn gf(q: u64) -> FieldSpec {
        field_new(q).unwrap()
    }

    fn example_2_2_family() -> UdmFamily {
        let f3 = gf(3);
        let alpha = f3.element(2).unwrap();
        construct_pascal(4, 3, 3, &f3, Some(alpha)).unwrap()
    }

    fn elems(vals: &[u64], spec: &FieldSpec) -> Vec<FieldElement> {
        vals.iter().map(|&v| spec.element(v).unwrap()).collect()
    }

    #[test]
    fn encode_matrix_examples() {
        let f3 = gf(3);
        let fam = example_2_2_family();
        let x = encode_matrix(&fam, &elems(&[1, 0, 0], &f3)).unwrap();
        assert_eq!(x[0], elems(&[1, 0, 0], &f3));
        assert_eq!(x[1], elems(&[0, 0, 1], &f3));
        assert_eq!(x[2], elems(&[1, 0, 0], &f3));
        assert_eq!(x[3], elems(&[1, 0, 0], &f3));

        let zero = encode_matrix(&fam, &elems(&[0, 0, 0], &f3)).unwrap();
        assert!(zero.iter().all(|c| c.iter().all(|e| e.is_zero())));

        assert!(encode_matrix(&fam, &elems(&[1, 2], &f3)).is_err());

        // (I_5, J_5): channel 0 carries u, channel 1 carries u reversed
        let f7 = gf(7);
        let fam = construct_pascal(2, 5, 5, &f7, None).unwrap();
        let u = elems(&[3, 1, 4, 1, 5], &f7);
        let x = encode_matrix(&fam, &u).unwrap();
        assert_eq!(x[0], u);
        let mut rev = u.clone();
        rev.reverse();
        assert_eq!(x[1], rev);
    }

    #[test]
    fn taylor_encoding_matches_matrix_encoding() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            let f = gf(q);
            for l in 1..=(q + 1) as usize {
                for n in 1..=3usize {
                    for k in n..=(l * n).min(6) {
                        let fam = construct_pascal(l, n, k, &f, None).unwrap();
                        let betas = BetaSequence::new(&f, f.alpha(), l).unwrap();
                        for _ in 0..3 {
                            let u: Vec<FieldElement> = (0..k)
                                .map(|_| f.element(rng.random_range(0..q)).unwrap())
                                .collect();
                            let xm = encode_matrix(&fam, &u).unwrap();
                            let xt = encode_taylor(&u, &betas, n, &f).unwrap();
                            assert_eq!(xm, xt, "q={q} L={l} N={n} K={k}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn taylor_encoding_of_constants() {
        let f5 = gf(5);
        let betas = BetaSequence::new(&f5, f5.alpha(), 6).unwrap();
        let u = elems(&[3, 0, 0], &f5);
        let x = encode_taylor(&u, &betas, 3, &f5).unwrap();
        for (l, chan) in x.iter().enumerate() {
            if l == 1 {
                continue; // infinity channel reads top coefficients instead
            }
            assert_eq!(chan[0].value(), 3);
            assert!(chan[1..].iter().all(|e| e.is_zero()), "channel {l}");
        }
    }

    #[test]
    fn channel_erase_examples() {
        let f3 = gf(3);
        let fam = example_2_2_family();
        let u = elems(&[1, 2, 0], &f3);
        let x = encode_matrix(&fam, &u).unwrap();

        let full = ErasurePattern::new(vec![3, 3, 3, 3], 3).unwrap();
        let out = channel_erase(&x, &full).unwrap();
        assert_eq!(out.pattern().v(), &[3, 3, 3, 3]);
        assert_eq!(out.prefix(2), &x[2][..]);

        let nothing = ErasurePattern::new(vec![0, 0, 0, 0], 3).unwrap();
        let out = channel_erase(&x, &nothing).unwrap();
        assert!(out.pattern().v().iter().all(|&v| v == 0));
        assert_eq!(out.symbol(0, 0), None);
    }

    #[test]
    fn sampler_is_deterministic_and_uniformish() {
        let a = sample_pattern(4, 3, 3, PatternMode::Exact, 99).unwrap();
        let b = sample_pattern(4, 3, 3, PatternMode::Exact, 99).unwrap();
        assert_eq!(a, b);

        // every sampled pattern lands in the set, and across many draws all
        // 20 patterns of the (4,3,3) set appear
        use std::collections::HashSet;
        let sampler = PatternSampler::new(4, 3, 3, PatternMode::Exact);
        let mut rng = ChaCha8Rng::seed_from_u64(123);
        let mut seen = HashSet::new();
        for _ in 0..600 {
            let p = sampler.sample(&mut rng).unwrap();
            assert_eq!(p.sum(), 3);
            seen.insert(p.v().to_vec());
        }
        assert_eq!(seen.len(), 20);

        let at_least = PatternSampler::new(3, 2, 4, PatternMode::AtLeast);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let p = at_least.sample(&mut rng).unwrap();
            assert!(p.sum() >= 4);
        }

        assert!(sample_pattern(3, 1, 4, PatternMode::Exact, 1).is_none());
    }

    #[test]
    fn gaussian_round_trip() {
        let f3 = gf(3);
        let fam = example_2_2_family();
        let u = elems(&[1, 2, 0], &f3);
        let x = encode_matrix(&fam, &u).unwrap();
        let v = ErasurePattern::new(vec![1, 1, 0, 1], 3).unwrap();
        let out = channel_erase(&x, &v).unwrap();
        assert_eq!(decode_gaussian(&fam, &out).unwrap(), u);

        // direct read when only channel 0 survives
        let v = ErasurePattern::new(vec![3, 0, 0, 0], 3).unwrap();
        let out = channel_erase(&x, &v).unwrap();
        assert_eq!(decode_gaussian(&fam, &out).unwrap(), u);

        // nothing received
        let v = ErasurePattern::new(vec![0, 0, 0, 0], 3).unwrap();
        let out = channel_erase(&x, &v).unwrap();
        assert!(matches!(
            decode_gaussian(&fam, &out),
            Err(CodecError::InsufficientSymbols {
                received: 0,
                required: 3
            })
        ));
    }

    #[test]
    fn gaussian_round_trip_over_all_patterns() {
        let f3 = gf(3);
        let fam = example_2_2_family();
        let u = elems(&[2, 0, 1], &f3);
        let x = encode_matrix(&fam, &u).unwrap();
        for pattern in enumerate_patterns(4, 3, 3, PatternMode::AtLeast) {
            let out = channel_erase(&x, &pattern).unwrap();
            assert_eq!(decode_gaussian(&fam, &out).unwrap(), u, "{pattern}");
        }
    }

    #[test]
    fn gaussian_diagnoses_non_families() {
        let f3 = gf(3);
        let m = crate::linalg::MatrixGF::from_rows(vec![
            elems(&[1, 0, 0], &f3),
            elems(&[1, 0, 0], &f3),
            elems(&[0, 0, 1], &f3),
        ]);
        let fam = UdmFamily::new(
            f3.clone(),
            vec![m.clone(), m.clone()],
            crate::udm::Provenance::Loaded,
        )
        .unwrap();
        let u = elems(&[1, 1, 1], &f3);
        let x = encode_matrix(&fam, &u).unwrap();
        let v = ErasurePattern::new(vec![2, 1], 3).unwrap();
        let out = channel_erase(&x, &v).unwrap();
        assert!(matches!(
            decode_gaussian(&fam, &out),
            Err(CodecError::NotUdm { .. })
        ));
    }

    #[test]
    fn newton_exhaustive_cross_oracle_on_reference_family() {
        let f3 = gf(3);
        let fam = example_2_2_family();
        let betas = BetaSequence::new(&f3, f3.element(2).unwrap(), 4).unwrap();
        let opts = NewtonOptions {
            check_invariants: true,
            record_steps: true,
        };
        let mut cases = 0;
        for a in 0..3u64 {
            for b in 0..3u64 {
                for c in 0..3u64 {
                    let u = elems(&[a, b, c], &f3);
                    let x = encode_matrix(&fam, &u).unwrap();
                    for pattern in enumerate_patterns(4, 3, 3, PatternMode::Exact) {
                        let out = channel_erase(&x, &pattern).unwrap();
                        let gauss = decode_gaussian(&fam, &out).unwrap();
                        let (newt, trace) =
                            decode_newton_with(&out, &betas, 3, &f3, opts).unwrap();
                        assert_eq!(gauss, u, "{pattern}");
                        assert_eq!(newt, u, "{pattern}");
                        // degree invariant: deg(g) = number of updates
                        if let Some(last) = trace.steps.last() {
                            assert_eq!(last.g.degree() as usize, trace.steps.len());
                        }
                        cases += 1;
                    }
                }
            }
        }
        assert_eq!(cases, 27 * 20);
    }

    #[test]
    fn newton_special_patterns() {
        let f5 = gf(5);
        let k = 4;
        let fam = construct_pascal(3, k, k, &f5, None).unwrap();
        let betas = BetaSequence::new(&f5, f5.alpha(), 3).unwrap();
        let u = elems(&[2, 4, 0, 3], &f5);
        let x = encode_matrix(&fam, &u).unwrap();

        // all information from the infinity channel: u read in reverse
        let v = ErasurePattern::new(vec![0, k, 0], k).unwrap();
        let out = channel_erase(&x, &v).unwrap();
        assert_eq!(decode_newton(&out, &betas, k, &f5).unwrap(), u);
        let mut rev = out.prefix(1).to_vec();
        rev.reverse();
        assert_eq!(rev, u);

        // all information from channel 0: plain coefficients
        let v = ErasurePattern::new(vec![k, 0, 0], k).unwrap();
        let out = channel_erase(&x, &v).unwrap();
        assert_eq!(decode_newton(&out, &betas, k, &f5).unwrap(), u);
        assert_eq!(out.prefix(0), &u[..]);

        // insufficient symbols
        let v = ErasurePattern::new(vec![1, 1, 1], k).unwrap();
        let out = channel_erase(&x, &v).unwrap();
        assert!(matches!(
            decode_newton(&out, &betas, k, &f5),
            Err(CodecError::InsufficientSymbols { .. })
        ));
    }

    #[test]
    fn newton_handles_over_received_patterns() {
        let f7 = gf(7);
        let fam = construct_pascal(4, 3, 5, &f7, None).unwrap();
        let betas = BetaSequence::new(&f7, f7.alpha(), 4).unwrap();
        let u = elems(&[1, 2, 3, 4, 5], &f7);
        let x = encode_matrix(&fam, &u).unwrap();
        for pattern in enumerate_patterns(4, 3, 5, PatternMode::AtLeast) {
            let out = channel_erase(&x, &pattern).unwrap();
            let gauss = decode_gaussian(&fam, &out).unwrap();
            let newt = decode_newton(&out, &betas, 5, &f7).unwrap();
            assert_eq!(gauss, u, "{pattern}");
            assert_eq!(newt, u, "{pattern}");
        }
    }

    #[test]
    fn newton_randomized_grid_against_gaussian() {
        use rand::{Rng, SeedableRng};
        let mut rng = ChaCha8Rng::seed_from_u64(777);
        for q in [4u64, 5, 7] {
            let f = gf(q);
            let l = (q + 1) as usize;
            for _ in 0..120 {
                let n = rng.random_range(1..=3usize);
                let k_max = (l * n).min(6);
                let k = rng.random_range(n..=k_max);
                let fam = construct_pascal(l, n, k, &f, None).unwrap();
                let betas = BetaSequence::new(&f, f.alpha(), l).unwrap();
                let u: Vec<FieldElement> = (0..k)
                    .map(|_| f.element(rng.random_range(0..q)).unwrap())
                    .collect();
                let x = encode_matrix(&fam, &u).unwrap();
                let sampler = PatternSampler::new(l, n, k, PatternMode::Exact);
                let pattern = sampler.sample(&mut rng).unwrap();
                let out = channel_erase(&x, &pattern).unwrap();
                let gauss = decode_gaussian(&fam, &out).unwrap();
                let newt = decode_newton(&out, &betas, k, &f).unwrap();
                assert_eq!(gauss, u);
                assert_eq!(newt, u);
            }
        }
    }

    #[test]
    fn simulate_reference_family_always_succeeds() {
        let f3 = gf(3);
        let fam = example_2_2_family();
        let betas = BetaSequence::new(&f3, f3.element(2).unwrap(), 4).unwrap();
        let stats = simulate(
            &fam,
            Some(&betas),
            300,
            9,
            PatternMode::Exact,
            DecoderChoice::Both,
        )
        .unwrap();
        assert_eq!(stats.successes, 300);
        assert_eq!(stats.success_rate(), 1.0);
        assert_eq!(stats.cross_decoder_mismatches, 0);
        assert_eq!(stats.mismatches + stats.singular_failures, 0);
        assert!(stats.mean_gaussian_ops().unwrap() > 0.0);
        assert!(stats.mean_newton_ops().unwrap() > 0.0);

        // deterministic under the seed
        let again = simulate(
            &fam,
            Some(&betas),
            300,
            9,
            PatternMode::Exact,
            DecoderChoice::Both,
        )
        .unwrap();
        assert_eq!(stats.gaussian_ops_total, again.gaussian_ops_total);
        assert_eq!(stats.newton_ops_total, again.newton_ops_total);
    }

    #[test]
    fn simulate_flags_non_families() {
        let f3 = gf(3);
        let m = crate::linalg::MatrixGF::from_rows(vec![
            elems(&[1, 0, 0], &f3),
            elems(&[0, 1, 0], &f3),
            elems(&[0, 0, 1], &f3),
        ]);
        // two identical matrices cannot be universally decodable
        let fam = UdmFamily::new(
            f3,
            vec![m.clone(), m.clone()],
            crate::udm::Provenance::Loaded,
        )
        .unwrap();
        let stats = simulate(&fam, None, 200, 3, PatternMode::Exact, DecoderChoice::Gaussian)
            .unwrap();
        assert!(stats.successes < stats.trials);
        assert!(stats.singular_failures > 0);
    }

    #[test]
    fn simulate_newton_needs_betas() {
        let fam = example_2_2_family();
        assert!(simulate(&fam, None, 5, 1, PatternMode::Exact, DecoderChoice::Newton).is_err());
    }

    #[test]
    fn profile_is_deterministic_and_quadratic_ish() {
        let f = gf(127);
        let rows = op_count_profile(&f, 4, &[8, 16], 4, 7).unwrap();
        let again = op_count_profile(&f, 4, &[8, 16], 4, 7).unwrap();
        assert_eq!(rows.len(), 2);
        for (a, b) in rows.iter().zip(&again) {
            assert_eq!(a.mean_gaussian_ops, b.mean_gaussian_ops);
            assert_eq!(a.mean_newton_ops, b.mean_newton_ops);
        }
        // growth direction sanity; the acceptance suite pins the ratios
        assert!(rows[1].mean_newton_ops > rows[0].mean_newton_ops);
        assert!(rows[1].mean_gaussian_ops > rows[0].mean_gaussian_ops);
    }
}
