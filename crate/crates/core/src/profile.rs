//! Piecewise polynomial-times-exponential functions of time.
//!
//! Rates and cost rates of time-varying models are represented as
//! contiguous pieces, each of the form `e^{-decay·(t-start)} · p(t-start)`
//! on `[start, until)`, with the final piece extending to `+∞`. The
//! representation is closed under everything the solvers and the simulator
//! need: evaluation, exact integration over intervals and to `+∞`,
//! first-passage inversion of the cumulative integral (sojourn sampling),
//! discount damping by `e^{-αt}`, and tail replacement at a horizon.

use crate::error::{Error, Result};
use crate::ext_real::ExtReal;

/// One piece: `value(t) = e^{-decay·(t-start)} · p(t-start)` on `[start, until)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilePiece {
    start: f64,
    until: f64,
    /// Polynomial coefficients in the local variable `t - start`,
    /// lowest order first. Empty means identically zero.
    coeffs: Vec<f64>,
    decay: f64,
}

impl ProfilePiece {
    fn eval_local(&self, u: f64) -> f64 {
        let p = poly_eval(&self.coeffs, u);
        if self.decay == 0.0 {
            p
        } else {
            (-self.decay * u).exp() * p
        }
    }

    /// Exact integral over `[a, b] ⊆ [start, until)`, in absolute time.
    fn integral(&self, a: f64, b: f64) -> f64 {
        debug_assert!(a >= self.start - 1e-9 && b <= self.until + 1e-9 && a <= b);
        let u0 = (a - self.start).max(0.0);
        let u1 = (b - self.start).max(u0);
        if self.decay == 0.0 {
            let anti = poly_antiderivative(&self.coeffs);
            poly_eval(&anti, u1) - poly_eval(&anti, u0)
        } else {
            poly_exp_integral(&self.coeffs, self.decay, u0, u1)
        }
    }

    /// Exact integral over `[a, ∞)` for the final piece.
    #[allow(clippy::needless_range_loop)] // index arithmetic mirrors the recurrences
    fn integral_to_inf(&self, a: f64) -> ExtReal {
        let u0 = (a - self.start).max(0.0);
        if self.coeffs.iter().all(|&c| c == 0.0) {
            return ExtReal::ZERO;
        }
        if self.decay == 0.0 {
            // Nonzero polynomial with nonnegative leading behavior.
            return ExtReal::INFINITY;
        }
        // ∫_{u0}^∞ u^k e^{-λu} du = e^{-λu0} Σ_j C(k,j) u0^{k-j} · j!/λ^{j+1}
        let lambda = self.decay;
        let deg = self.coeffs.len() - 1;
        let mut g_inf = Vec::with_capacity(deg + 1);
        let mut fact = 1.0;
        for j in 0..=deg {
            if j > 0 {
                fact *= j as f64;
            }
            g_inf.push(fact / lambda.powi(j as i32 + 1));
        }
        let mut total = 0.0;
        for (k, &c) in self.coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let mut jk = 0.0;
            let mut binom = 1.0;
            for j in 0..=k {
                if j > 0 {
                    binom = binom * (k - j + 1) as f64 / j as f64;
                }
                jk += binom * u0.powi((k - j) as i32) * g_inf[j];
            }
            total += c * jk;
        }
        let damped = (-lambda * u0).exp() * total;
        ExtReal::from_f64(damped.max(0.0)).unwrap_or(ExtReal::INFINITY)
    }
}

/// A nonnegative function of time on `[0, ∞)`, stored as contiguous pieces.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeProfile {
    pieces: Vec<ProfilePiece>,
}

impl TimeProfile {
    /// Constant profile `t ↦ c`.
    pub fn constant(c: f64) -> Result<TimeProfile> {
        if !c.is_finite() || c < 0.0 {
            return Err(Error::InvalidProfile(format!(
                "constant value must be finite and nonnegative, got {c}"
            )));
        }
        let coeffs = if c == 0.0 { vec![] } else { vec![c] };
        Ok(TimeProfile {
            pieces: vec![ProfilePiece {
                start: 0.0,
                until: f64::INFINITY,
                coeffs,
                decay: 0.0,
            }],
        })
    }

    pub fn zero() -> TimeProfile {
        TimeProfile::constant(0.0).unwrap()
    }

    /// `t ↦ scale · e^{-decay·t}` on `[0, ∞)`.
    pub fn exp_decay(scale: f64, decay: f64) -> Result<TimeProfile> {
        if !scale.is_finite() || scale < 0.0 || !decay.is_finite() || decay < 0.0 {
            return Err(Error::InvalidProfile(format!(
                "exp_decay requires finite nonnegative scale/decay, got {scale}, {decay}"
            )));
        }
        Ok(TimeProfile {
            pieces: vec![ProfilePiece {
                start: 0.0,
                until: f64::INFINITY,
                coeffs: if scale == 0.0 { vec![] } else { vec![scale] },
                decay,
            }],
        })
    }

    /// Builds a piecewise polynomial from `(until, coeffs)` segments.
    ///
    /// Segments are consecutive starting at `t = 0`; `until = None` marks the
    /// final segment, which extends to `+∞`. Coefficients are in the local
    /// variable `t - segment_start`.
    pub fn piecewise(segments: Vec<(Option<f64>, Vec<f64>)>) -> Result<TimeProfile> {
        if segments.is_empty() {
            return Err(Error::InvalidProfile("no segments given".into()));
        }
        let mut pieces = Vec::with_capacity(segments.len());
        let mut cursor = 0.0;
        let last = segments.len() - 1;
        for (i, (until, coeffs)) in segments.into_iter().enumerate() {
            if coeffs.iter().any(|c| !c.is_finite()) {
                return Err(Error::InvalidProfile(format!(
                    "segment {i} has a non-finite coefficient"
                )));
            }
            let until = match until {
                Some(u) => {
                    if i == last {
                        return Err(Error::InvalidProfile(
                            "final segment must extend to infinity (omit `until`)".into(),
                        ));
                    }
                    if !u.is_finite() || u <= cursor {
                        return Err(Error::InvalidProfile(format!(
                            "segment {i} boundary {u} must be finite and exceed {cursor}"
                        )));
                    }
                    u
                }
                None => {
                    if i != last {
                        return Err(Error::InvalidProfile(format!(
                            "segment {i} lacks `until` but is not the final segment"
                        )));
                    }
                    f64::INFINITY
                }
            };
            pieces.push(ProfilePiece {
                start: cursor,
                until,
                coeffs,
                decay: 0.0,
            });
            cursor = until;
        }
        let profile = TimeProfile { pieces };
        profile.check_final_piece()?;
        Ok(profile)
    }

    fn check_final_piece(&self) -> Result<()> {
        let last = self.pieces.last().expect("profiles are never empty");
        match last.coeffs.iter().rposition(|&c| c != 0.0) {
            Some(k) if last.coeffs[k] < 0.0 => Err(Error::InvalidProfile(format!(
                "final segment has negative leading coefficient {}",
                last.coeffs[k]
            ))),
            _ => Ok(()),
        }
    }

    pub fn pieces(&self) -> &[ProfilePiece] {
        &self.pieces
    }

    /// Breakpoints of the piece mesh (finite `start`s after 0).
    pub fn breakpoints(&self) -> impl Iterator<Item = f64> + '_ {
        self.pieces.iter().skip(1).map(|p| p.start)
    }

    pub fn is_zero(&self) -> bool {
        self.pieces
            .iter()
            .all(|p| p.coeffs.iter().all(|&c| c == 0.0))
    }

    fn piece_at(&self, t: f64) -> &ProfilePiece {
        // Pieces are few; a linear scan beats a binary search in practice.
        self.pieces
            .iter()
            .find(|p| t < p.until)
            .unwrap_or_else(|| self.pieces.last().unwrap())
    }

    pub fn eval(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        let piece = self.piece_at(t);
        piece.eval_local(t - piece.start)
    }

    /// Exact integral over `[a, b]`.
    pub fn integral(&self, a: f64, b: f64) -> f64 {
        let a = a.max(0.0);
        let b = b.max(a);
        let mut total = 0.0;
        for piece in &self.pieces {
            let lo = a.max(piece.start);
            let hi = b.min(piece.until);
            if lo < hi {
                total += piece.integral(lo, hi);
            }
        }
        total
    }

    /// Exact integral over `[t, ∞)`; `∞` when a non-vanishing undamped tail
    /// remains.
    pub fn mass_from(&self, t: f64) -> ExtReal {
        let t = t.max(0.0);
        let mut total = ExtReal::ZERO;
        for (i, piece) in self.pieces.iter().enumerate() {
            let lo = t.max(piece.start);
            if i + 1 == self.pieces.len() {
                total = total + piece.integral_to_inf(lo);
            } else if lo < piece.until {
                total = total + ExtReal::finite(piece.integral(lo, piece.until).max(0.0));
            }
        }
        total
    }

    /// Smallest `t ≥ t0` with `∫_{t0}^{t} ≥ target`, or `None` when the
    /// remaining mass never reaches `target`.
    ///
    /// Constant and purely exponential pieces invert in closed form; other
    /// pieces fall back to bisection at width tolerance `1e-12`.
    pub fn first_passage(&self, t0: f64, target: f64) -> Option<f64> {
        debug_assert!(target >= 0.0);
        let t0 = t0.max(0.0);
        if target == 0.0 {
            return Some(t0);
        }
        let mut acc = 0.0;
        for (i, piece) in self.pieces.iter().enumerate() {
            let lo = t0.max(piece.start);
            let last = i + 1 == self.pieces.len();
            if !last {
                if lo >= piece.until {
                    continue;
                }
                let mass = piece.integral(lo, piece.until).max(0.0);
                if acc + mass < target {
                    acc += mass;
                    continue;
                }
                return Some(invert_in_piece(piece, lo, piece.until, target - acc));
            }
            // Final piece: check the total remaining mass first.
            match piece.integral_to_inf(lo).finite_value() {
                Some(mass) if mass < target - acc => return None,
                _ => {}
            }
            // Bracket the passage time, growing geometrically.
            let mut hi = if lo > 0.0 { lo * 2.0 } else { 1.0 };
            loop {
                if piece.integral(lo, hi) >= target - acc {
                    break;
                }
                hi *= 2.0;
                if !hi.is_finite() {
                    return None;
                }
            }
            return Some(invert_in_piece(piece, lo, hi, target - acc));
        }
        None
    }

    /// Multiplies the profile by `e^{-alpha·t}` (absolute time).
    pub fn damped(&self, alpha: f64) -> Result<TimeProfile> {
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidProfile(format!(
                "damping exponent must be finite and nonnegative, got {alpha}"
            )));
        }
        if alpha == 0.0 {
            return Ok(self.clone());
        }
        let pieces = self
            .pieces
            .iter()
            .map(|p| {
                // e^{-αt} = e^{-α·start} · e^{-α(t-start)}
                let amp = (-alpha * p.start).exp();
                ProfilePiece {
                    start: p.start,
                    until: p.until,
                    coeffs: p.coeffs.iter().map(|c| c * amp).collect(),
                    decay: p.decay + alpha,
                }
            })
            .collect();
        Ok(TimeProfile { pieces })
    }

    /// Replaces everything from `cut` onward with
    /// `e^{-tail_decay·(t-cut)} · tail_scale`.
    pub fn with_tail(&self, cut: f64, tail_scale: f64, tail_decay: f64) -> Result<TimeProfile> {
        if !cut.is_finite() || cut <= 0.0 {
            return Err(Error::InvalidProfile(format!(
                "tail cut must be positive and finite, got {cut}"
            )));
        }
        if tail_scale < 0.0 || !tail_scale.is_finite() || tail_decay < 0.0 {
            return Err(Error::InvalidProfile(
                "tail scale/decay must be finite and nonnegative".into(),
            ));
        }
        let mut pieces = Vec::new();
        for p in &self.pieces {
            if p.start >= cut {
                break;
            }
            let mut clipped = p.clone();
            clipped.until = p.until.min(cut);
            pieces.push(clipped);
        }
        pieces.push(ProfilePiece {
            start: cut,
            until: f64::INFINITY,
            coeffs: if tail_scale == 0.0 {
                vec![]
            } else {
                vec![tail_scale]
            },
            decay: tail_decay,
        });
        Ok(TimeProfile { pieces })
    }

    /// Pointwise sum. Overlapping pieces must share the same decay.
    pub fn add(&self, other: &TimeProfile) -> Result<TimeProfile> {
        let mut cuts: Vec<f64> = self
            .pieces
            .iter()
            .chain(&other.pieces)
            .map(|p| p.start)
            .collect();
        cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        cuts.dedup();
        let mut pieces = Vec::new();
        for (i, &start) in cuts.iter().enumerate() {
            let until = cuts.get(i + 1).copied().unwrap_or(f64::INFINITY);
            let a = self.piece_at(start);
            let b = other.piece_at(start);
            if a.decay != b.decay {
                return Err(Error::InvalidProfile(format!(
                    "cannot add profiles with differing decay ({} vs {}) on [{start}, {until})",
                    a.decay, b.decay
                )));
            }
            let decay = a.decay;
            // Re-anchor both pieces at `start`; for decayed pieces the shift
            // also scales the amplitude: e^{-λ(t-old)} = e^{-λ(start-old)} e^{-λ(t-start)}.
            let reanchor = |p: &ProfilePiece| -> Vec<f64> {
                let shift = start - p.start;
                let mut coeffs = poly_shift(&p.coeffs, shift);
                if decay != 0.0 {
                    let amp = (-decay * shift).exp();
                    for c in &mut coeffs {
                        *c *= amp;
                    }
                }
                coeffs
            };
            let mut coeffs = reanchor(a);
            let other_coeffs = reanchor(b);
            if coeffs.len() < other_coeffs.len() {
                coeffs.resize(other_coeffs.len(), 0.0);
            }
            for (c, s) in coeffs.iter_mut().zip(&other_coeffs) {
                *c += s;
            }
            pieces.push(ProfilePiece {
                start,
                until,
                coeffs,
                decay,
            });
        }
        Ok(TimeProfile { pieces })
    }

    /// Stitches profiles over consecutive time cells: cell `k` spans
    /// `[starts[k], starts[k+1])` (the last extends to `∞`) and takes its
    /// values from `profiles[k]`.
    ///
    /// Consecutive cells selecting the same underlying piece extend it
    /// instead of splitting it, so a fine policy grid that keeps choosing the
    /// same action does not blow up the piece count.
    pub fn stitch(starts: &[f64], profiles: &[&TimeProfile]) -> Result<TimeProfile> {
        if starts.is_empty() || starts.len() != profiles.len() || starts[0] != 0.0 {
            return Err(Error::InvalidProfile(
                "stitch requires matching cell starts (beginning at 0) and profiles".into(),
            ));
        }
        let mut pieces: Vec<ProfilePiece> = Vec::new();
        // Identity of the source piece the last appended piece was cut from.
        let mut last_source: Option<(*const TimeProfile, f64)> = None;
        for (k, (&cell_start, profile)) in starts.iter().zip(profiles).enumerate() {
            let cell_end = starts.get(k + 1).copied().unwrap_or(f64::INFINITY);
            if cell_end <= cell_start {
                return Err(Error::InvalidProfile(
                    "stitch cell starts must be strictly increasing".into(),
                ));
            }
            for p in &profile.pieces {
                let lo = cell_start.max(p.start);
                let hi = cell_end.min(p.until);
                if lo >= hi {
                    continue;
                }
                let source = (*profile as *const TimeProfile, p.start);
                if last_source == Some(source) {
                    if let Some(prev) = pieces.last_mut() {
                        if prev.until == lo {
                            prev.until = hi;
                            continue;
                        }
                    }
                }
                // Re-anchor at lo: shift the polynomial and absorb the decay
                // amplitude accumulated since the original piece start.
                let shift = lo - p.start;
                let mut coeffs = poly_shift(&p.coeffs, shift);
                if p.decay != 0.0 {
                    let amp = (-p.decay * shift).exp();
                    for c in &mut coeffs {
                        *c *= amp;
                    }
                }
                pieces.push(ProfilePiece {
                    start: lo,
                    until: hi,
                    coeffs,
                    decay: p.decay,
                });
                last_source = Some(source);
            }
        }
        Ok(TimeProfile { pieces })
    }
}

fn poly_eval(coeffs: &[f64], u: f64) -> f64 {
    let mut acc = 0.0;
    for &c in coeffs.iter().rev() {
        acc = acc * u + c;
    }
    acc
}

fn poly_antiderivative(coeffs: &[f64]) -> Vec<f64> {
    let mut anti = Vec::with_capacity(coeffs.len() + 1);
    anti.push(0.0);
    for (k, &c) in coeffs.iter().enumerate() {
        anti.push(c / (k as f64 + 1.0));
    }
    anti
}

/// Taylor shift: coefficients of `p(u + d)` given those of `p(u)`.
fn poly_shift(coeffs: &[f64], d: f64) -> Vec<f64> {
    if d == 0.0 || coeffs.is_empty() {
        return coeffs.to_vec();
    }
    let n = coeffs.len();
    let mut out = vec![0.0; n];
    for (k, &c) in coeffs.iter().enumerate() {
        let mut binom = 1.0;
        let mut power = 1.0;
        for j in (0..=k).rev() {
            // binom = C(k, j), power = d^{k-j}
            out[j] += c * binom * power;
            if j > 0 {
                binom = binom * j as f64 / (k - j + 1) as f64;
                power *= d;
            }
        }
    }
    out
}

/// `G_j(Δ) = ∫_0^Δ v^j e^{-λv} dv` for `j = 0..=deg`.
///
/// Uses an alternating series for small `λΔ` (where the closed form cancels
/// catastrophically) and the stable `expm1`-seeded recurrence otherwise.
#[allow(clippy::needless_range_loop)]
fn exp_moments(deg: usize, lambda: f64, delta: f64) -> Vec<f64> {
    debug_assert!(lambda > 0.0 && delta >= 0.0);
    let x = lambda * delta;
    let mut g = vec![0.0; deg + 1];
    if x <= 1.0 {
        for (j, slot) in g.iter_mut().enumerate() {
            // Σ_m (-λ)^m Δ^{j+m+1} / (m! (j+m+1))
            let mut term = delta.powi(j as i32 + 1);
            let mut sum = term / (j as f64 + 1.0);
            for m in 1..60 {
                term *= -lambda * delta / m as f64;
                let contrib = term / (j + m + 1) as f64;
                sum += contrib;
                if contrib.abs() <= sum.abs() * 1e-17 {
                    break;
                }
            }
            *slot = sum;
        }
    } else {
        let e = (-x).exp();
        g[0] = -(-x).exp_m1() / lambda;
        let mut dpow = delta; // tracks Δ^j
        for j in 1..=deg {
            g[j] = (j as f64 * g[j - 1] - dpow * e) / lambda;
            dpow *= delta;
        }
    }
    g
}

/// `∫_{u0}^{u1} e^{-λu} p(u) du` for a local polynomial `p`.
#[allow(clippy::needless_range_loop)]
fn poly_exp_integral(coeffs: &[f64], lambda: f64, u0: f64, u1: f64) -> f64 {
    if coeffs.is_empty() || u1 <= u0 {
        return 0.0;
    }
    let deg = coeffs.len() - 1;
    let delta = u1 - u0;
    // Shift to the piece-local offset u0: ∫ = e^{-λu0} Σ_k c_k Σ_j C(k,j) u0^{k-j} G_j(Δ)
    let g = exp_moments(deg, lambda, delta);
    let mut total = 0.0;
    for (k, &c) in coeffs.iter().enumerate() {
        if c == 0.0 {
            continue;
        }
        let mut jk = 0.0;
        let mut binom = 1.0;
        for j in 0..=k {
            if j > 0 {
                binom = binom * (k - j + 1) as f64 / j as f64;
            }
            jk += binom * u0.powi((k - j) as i32) * g[j];
        }
        total += c * jk;
    }
    (-lambda * u0).exp() * total
}

/// Finds the smallest `t ∈ [lo, hi]` with `∫_{lo}^{t} piece ≥ need`.
fn invert_in_piece(piece: &ProfilePiece, lo: f64, hi: f64, need: f64) -> f64 {
    debug_assert!(need >= 0.0);
    if need == 0.0 {
        return lo;
    }
    // Closed forms for the two shapes that dominate in practice.
    if piece.coeffs.len() == 1 {
        let c = piece.coeffs[0];
        if piece.decay == 0.0 && c > 0.0 {
            return (lo + need / c).min(hi);
        }
        if piece.decay > 0.0 && c > 0.0 {
            // ∫_{lo}^{t} c e^{-λ(s-start)} ds = (c/λ) e^{-λ(lo-start)} (1 - e^{-λ(t-lo)})
            let lambda = piece.decay;
            let amp = c / lambda * (-lambda * (lo - piece.start)).exp();
            let ratio = need / amp;
            if ratio < 1.0 {
                return (lo - (-ratio).ln_1p() / lambda).min(hi);
            }
            return hi;
        }
    }
    // Monotone bisection on the cumulative integral.
    let (mut a, mut b) = (lo, hi.min(piece.until));
    if !b.is_finite() {
        b = hi;
    }
    while b - a > 1e-12 * b.abs().max(1.0) {
        let mid = 0.5 * (a + b);
        if piece.integral(lo, mid) >= need {
            b = mid;
        } else {
            a = mid;
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Adaptive Simpson quadrature, used as the independent oracle for the
    /// closed-form integrals.
    fn simpson<F: Fn(f64) -> f64 + Copy>(f: F, a: f64, b: f64, tol: f64) -> f64 {
        #[allow(clippy::too_many_arguments)]
        fn rec<F: Fn(f64) -> f64 + Copy>(
            f: F,
            a: f64,
            b: f64,
            fa: f64,
            fm: f64,
            fb: f64,
            whole: f64,
            tol: f64,
            depth: u32,
        ) -> f64 {
            let m = 0.5 * (a + b);
            let lm = 0.5 * (a + m);
            let rm = 0.5 * (m + b);
            let flm = f(lm);
            let frm = f(rm);
            let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
            let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
            if depth == 0 || (left + right - whole).abs() <= 15.0 * tol {
                left + right + (left + right - whole) / 15.0
            } else {
                rec(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
                    + rec(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
            }
        }
        let m = 0.5 * (a + b);
        let (fa, fm, fb) = (f(a), f(m), f(b));
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        rec(f, a, b, fa, fm, fb, whole, tol, 40)
    }

    #[test]
    fn constant_profile_basics() {
        let p = TimeProfile::constant(2.0).unwrap();
        assert_eq!(p.eval(0.0), 2.0);
        assert_eq!(p.eval(17.3), 2.0);
        assert_eq!(p.integral(1.0, 4.0), 6.0);
        assert_eq!(p.mass_from(0.0), ExtReal::INFINITY);
        assert_eq!(p.first_passage(0.0, 3.0), Some(1.5));
    }

    #[test]
    fn zero_profile_never_passes() {
        let p = TimeProfile::zero();
        assert_eq!(p.mass_from(0.0), ExtReal::ZERO);
        assert_eq!(p.first_passage(0.0, 0.5), None);
        assert_eq!(p.first_passage(2.0, 0.0), Some(2.0));
    }

    #[test]
    fn exp_tail_mass_is_finite() {
        // e^{-t} has total mass 1.
        let p = TimeProfile::exp_decay(1.0, 1.0).unwrap();
        let m = p.mass_from(0.0).finite_value().unwrap();
        assert!((m - 1.0).abs() < 1e-14);
        // Survival floor: targets above the total mass never pass.
        assert_eq!(p.first_passage(0.0, 1.0 + 1e-12), None);
        let t = p.first_passage(0.0, 0.5).unwrap();
        assert!((p.integral(0.0, t) - 0.5).abs() < 1e-12);
    }

    #[test]
    fn damped_matches_pointwise_product() {
        let base = TimeProfile::piecewise(vec![
            (Some(1.0), vec![1.0, 0.5]),
            (Some(3.0), vec![2.0]),
            (None, vec![0.25, 0.0, 0.1]),
        ])
        .unwrap();
        let damped = base.damped(0.7).unwrap();
        for &t in &[0.0f64, 0.3, 0.99, 1.0, 2.5, 3.0, 7.0] {
            let expect = (-0.7 * t).exp() * base.eval(t);
            assert!((damped.eval(t) - expect).abs() < 1e-12 * expect.max(1.0));
        }
        assert!(damped.mass_from(0.0).is_finite());
    }

    #[test]
    fn with_tail_replaces_after_cut() {
        let base = TimeProfile::constant(3.0).unwrap();
        let cut = base.with_tail(2.0, 4.0, 1.0).unwrap();
        assert_eq!(cut.eval(1.9), 3.0);
        let expect = 4.0 * (-(2.5f64 - 2.0)).exp();
        assert!((cut.eval(2.5) - expect).abs() < 1e-14);
        // ∫_2^∞ 4 e^{-(t-2)} dt = 4
        let m = cut.mass_from(2.0).finite_value().unwrap();
        assert!((m - 4.0).abs() < 1e-12);
    }

    #[test]
    fn add_merges_meshes() {
        let a = TimeProfile::piecewise(vec![(Some(2.0), vec![1.0]), (None, vec![3.0])]).unwrap();
        let b = TimeProfile::piecewise(vec![(Some(1.0), vec![0.0, 1.0]), (None, vec![2.0])])
            .unwrap();
        let sum = a.add(&b).unwrap();
        for &t in &[0.0, 0.5, 1.0, 1.5, 2.0, 5.0] {
            let expect = a.eval(t) + b.eval(t);
            assert!(
                (sum.eval(t) - expect).abs() < 1e-12,
                "sum mismatch at t={t}: {} vs {expect}",
                sum.eval(t)
            );
        }
    }

    #[test]
    fn stitch_switches_profiles_at_cell_starts() {
        let a = TimeProfile::constant(1.0).unwrap();
        let b = TimeProfile::constant(5.0).unwrap();
        let s = TimeProfile::stitch(&[0.0, 2.0, 3.0], &[&a, &b, &a]).unwrap();
        assert_eq!(s.eval(1.0), 1.0);
        assert_eq!(s.eval(2.5), 5.0);
        assert_eq!(s.eval(10.0), 1.0);
        assert!((s.integral(0.0, 4.0) - (2.0 + 5.0 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn stitch_merges_repeated_selections() {
        // A fine grid that keeps selecting the same profile must not split
        // it into one piece per cell.
        let a = TimeProfile::exp_decay(2.0, 0.5).unwrap();
        let starts: Vec<f64> = (0..1000).map(|k| k as f64 * 1e-3).collect();
        let profiles: Vec<&TimeProfile> = starts.iter().map(|_| &a).collect();
        let s = TimeProfile::stitch(&starts, &profiles).unwrap();
        assert_eq!(s.pieces().len(), 1);
        for &t in &[0.0, 0.37, 5.0] {
            assert_eq!(s.eval(t), a.eval(t));
        }
    }

    #[test]
    fn rejects_bad_segments() {
        assert!(TimeProfile::piecewise(vec![]).is_err());
        assert!(TimeProfile::piecewise(vec![(Some(1.0), vec![1.0])]).is_err());
        assert!(TimeProfile::piecewise(vec![(None, vec![1.0, -2.0])]).is_err());
        assert!(TimeProfile::constant(-1.0).is_err());
        assert!(TimeProfile::constant(f64::NAN).is_err());
    }

    proptest! {
        #[test]
        fn integral_matches_quadrature(
            c0 in 0.0..3.0f64,
            c1 in 0.0..2.0f64,
            c2 in 0.0..1.0f64,
            decay in prop_oneof![Just(0.0), 0.05..4.0f64],
            a in 0.0..5.0f64,
            len in 0.001..5.0f64,
        ) {
            let profile = TimeProfile {
                pieces: vec![ProfilePiece {
                    start: 0.0,
                    until: f64::INFINITY,
                    coeffs: vec![c0, c1, c2],
                    decay,
                }],
            };
            let b = a + len;
            let exact = profile.integral(a, b);
            // Absolute quadrature tolerance sized to the integral, so the
            // oracle certifies a relative error.
            let scale = exact.abs().max(1e-30);
            let quad = simpson(|t| profile.eval(t), a, b, 1e-12 * scale);
            prop_assert!((exact - quad).abs() / scale < 1e-8,
                "closed form {exact} vs quadrature {quad}");
        }

        #[test]
        fn first_passage_inverts_integral(
            c0 in 0.1..4.0f64,
            c1 in 0.0..2.0f64,
            target in 0.01..10.0f64,
            t0 in 0.0..3.0f64,
        ) {
            let profile = TimeProfile::piecewise(vec![
                (Some(1.5), vec![c0, c1]),
                (None, vec![c0]),
            ]).unwrap();
            let t = profile.first_passage(t0, target).unwrap();
            let got = profile.integral(t0, t);
            prop_assert!((got - target).abs() < 1e-8 * target.max(1.0),
                "cumulative at passage {got} vs target {target}");
        }
    }
}
