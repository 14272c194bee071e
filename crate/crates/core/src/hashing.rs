//! Two-universal hash families over GF(2).
//!
//! Two constructions:
//!
//! - **Toeplitz**: `h(x) = M x + r` with `M` a random `D x n` Toeplitz matrix
//!   (constant along diagonals, built from `n + D - 1` uniform bits) and `r` a
//!   uniform `D`-bit offset. For any fixed `x != x'` the collision probability
//!   over the family is exactly `2^-D`.
//! - **Parity check**: check rows extracted from a uniformly random invertible
//!   `L` over GF(2) — the first column of `L` and the second column of
//!   `(L^-1)^T` — stacked as a `2 x n` map, again with a random offset. The
//!   full invertible `L` itself serves as the injective square member.

use rand::Rng;

use crate::error::{Error, Result};
use crate::gf2::{Bits, Gf2Matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HashKind {
    Toeplitz,
    ParityCheck,
}

/// One sampled member of a two-universal family `{0,1}^n -> {0,1}^D`.
#[derive(Clone, Debug, PartialEq)]
pub struct HashInstance {
    kind: HashKind,
    input_bits: usize,
    output_bits: usize,
    matrix: Gf2Matrix,
    offset: Bits,
    /// Toeplitz diagonal bits (length `n + D - 1`), kept for canonical serialization.
    diagonal: Option<Bits>,
}

/// A `D`-bit authentication tag.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tag {
    bits: Bits,
}

impl Tag {
    pub fn new(bits: Bits) -> Self {
        Tag { bits }
    }

    pub fn bits(&self) -> &Bits {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }
}

impl HashInstance {
    pub fn kind(&self) -> HashKind {
        self.kind
    }

    pub fn input_bits(&self) -> usize {
        self.input_bits
    }

    pub fn output_bits(&self) -> usize {
        self.output_bits
    }

    pub fn matrix(&self) -> &Gf2Matrix {
        &self.matrix
    }

    pub fn offset(&self) -> &Bits {
        &self.offset
    }

    /// Builds a Toeplitz instance from its diagonal bits and offset.
    ///
    /// Matrix entry `(i, j)` is `diagonal[i + (n - 1) - j]`, so entries are
    /// constant along diagonals.
    pub fn toeplitz_from_parts(n: usize, d: usize, diagonal: Bits, offset: Bits) -> Result<Self> {
        if d == 0 || d > n {
            return Err(Error::InvalidArgument(format!(
                "toeplitz needs 1 <= d <= n, got d={d}, n={n}"
            )));
        }
        if diagonal.len() != n + d - 1 {
            return Err(Error::LengthMismatch { expected: n + d - 1, got: diagonal.len() });
        }
        if offset.len() != d {
            return Err(Error::LengthMismatch { expected: d, got: offset.len() });
        }
        // Row i reads the diagonal at indices i + (n-1) - j for j = 0..n, which
        // is a contiguous slice of the reversed diagonal starting at d-1-i.
        let reversed = diagonal.reversed();
        let rows: Vec<Bits> = (0..d).map(|i| reversed.slice(d - 1 - i, n)).collect();
        let matrix = Gf2Matrix::from_rows(&rows);
        Ok(HashInstance {
            kind: HashKind::Toeplitz,
            input_bits: n,
            output_bits: d,
            matrix,
            offset,
            diagonal: Some(diagonal),
        })
    }

    /// A parity-check-kind instance from an explicit linear map and offset.
    pub fn linear_with_offset(matrix: Gf2Matrix, offset: Bits) -> Result<Self> {
        let (d, n) = (matrix.rows(), matrix.cols());
        if d > n {
            return Err(Error::InvalidArgument(format!("output bits {d} exceed input bits {n}")));
        }
        if offset.len() != d {
            return Err(Error::LengthMismatch { expected: d, got: offset.len() });
        }
        Ok(HashInstance {
            kind: HashKind::ParityCheck,
            input_bits: n,
            output_bits: d,
            matrix,
            offset,
            diagonal: None,
        })
    }

    /// The two-row instance built from the parity-check pair of an invertible
    /// matrix sample.
    pub fn parity_check_pair(l: &Gf2Matrix, linv_t: &Gf2Matrix, offset: Bits) -> Result<Self> {
        let (p1, p2) = parity_checks(l, linv_t)?;
        let matrix = Gf2Matrix::from_rows(&[p1.row(0), p2.row(0)]);
        Self::linear_with_offset(matrix, offset)
    }

    /// Evaluates the instance: `matrix * x + offset` over GF(2).
    pub fn evaluate(&self, x: &Bits) -> Result<Tag> {
        if x.len() != self.input_bits {
            return Err(Error::LengthMismatch { expected: self.input_bits, got: x.len() });
        }
        Ok(Tag { bits: self.matrix.mul_vec(x).xor(&self.offset) })
    }

    /// Tags `key || message` (key in the low-index positions).
    pub fn tag_message(&self, key: &Bits, message: &Bits) -> Result<Tag> {
        if key.len() + message.len() != self.input_bits {
            return Err(Error::LengthMismatch {
                expected: self.input_bits,
                got: key.len() + message.len(),
            });
        }
        self.evaluate(&key.concat(message))
    }

    /// The public description a transcript carries when the instance is
    /// broadcast: diagonal plus offset for Toeplitz, matrix rows plus offset
    /// otherwise.
    pub fn descriptor_bits(&self) -> Bits {
        let mut acc = match &self.diagonal {
            Some(diag) => diag.clone(),
            None => {
                let mut rows = Bits::zeros(0);
                for r in 0..self.output_bits {
                    rows = rows.concat(&self.matrix.row(r));
                }
                rows
            }
        };
        acc = acc.concat(&self.offset);
        acc
    }

    /// Canonical text form (see module docs of the crate README for the schema).
    pub fn serialize(&self) -> String {
        let mut out = String::new();
        match self.kind {
            HashKind::Toeplitz => {
                out.push_str(&format!(
                    "toeplitz n={} d={}\n",
                    self.input_bits, self.output_bits
                ));
                out.push_str(&self.diagonal.as_ref().expect("toeplitz keeps its diagonal").to_hex());
                out.push('\n');
            }
            HashKind::ParityCheck => {
                out.push_str(&format!("paritycheck n={}\n", self.input_bits));
                for r in 0..self.output_bits {
                    out.push_str(&self.matrix.row(r).to_hex());
                    out.push('\n');
                }
            }
        }
        out.push_str(&self.offset.to_hex());
        out.push('\n');
        out
    }

    /// Parses the canonical text form; round-trips bit-exactly with
    /// [`HashInstance::serialize`].
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'));
        let header = lines.next().ok_or_else(|| Error::InvalidArgument("empty input".into()))?;
        let rest: Vec<&str> = lines.collect();
        let fields: Vec<&str> = header.split_whitespace().collect();
        let parse_kv = |kv: &str, key: &str| -> Result<usize> {
            kv.strip_prefix(&format!("{key}="))
                .ok_or_else(|| Error::InvalidArgument(format!("expected {key}=<int> in header")))?
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad {key} value in header")))
        };
        match fields.first() {
            Some(&"toeplitz") => {
                if fields.len() != 3 || rest.len() != 2 {
                    return Err(Error::InvalidArgument("malformed toeplitz serialization".into()));
                }
                let n = parse_kv(fields[1], "n")?;
                let d = parse_kv(fields[2], "d")?;
                let diagonal = Bits::from_hex(n + d - 1, rest[0])?;
                let offset = Bits::from_hex(d, rest[1])?;
                Self::toeplitz_from_parts(n, d, diagonal, offset)
            }
            Some(&"paritycheck") => {
                if fields.len() != 2 || rest.len() < 2 {
                    return Err(Error::InvalidArgument("malformed paritycheck serialization".into()));
                }
                let n = parse_kv(fields[1], "n")?;
                let d = rest.len() - 1;
                let rows: Vec<Bits> = rest[..d]
                    .iter()
                    .map(|line| Bits::from_hex(n, line))
                    .collect::<Result<_>>()?;
                let offset = Bits::from_hex(d, rest[d])?;
                Self::linear_with_offset(Gf2Matrix::from_rows(&rows), offset)
            }
            _ => Err(Error::InvalidArgument(format!("unknown hash kind in header: {header}"))),
        }
    }
}

/// Samples a Toeplitz instance: `n + d - 1` uniform diagonal bits plus a
/// uniform `d`-bit offset.
pub fn sample_toeplitz<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<HashInstance> {
    if d == 0 || d > n {
        return Err(Error::InvalidArgument(format!("sample_toeplitz needs 1 <= d <= n, got d={d}, n={n}")));
    }
    let diagonal = Bits::random(n + d - 1, rng);
    let offset = Bits::random(d, rng);
    HashInstance::toeplitz_from_parts(n, d, diagonal, offset)
}

/// Uniformly random invertible `n x n` matrix over GF(2), with its inverse
/// transpose, by rejection sampling. The invertible fraction exceeds 0.288,
/// so the expected number of attempts is below 4.
pub fn sample_invertible_gf2<R: Rng + ?Sized>(n: usize, rng: &mut R) -> (Gf2Matrix, Gf2Matrix) {
    sample_invertible_gf2_counted(n, rng).0
}

/// As [`sample_invertible_gf2`], also reporting the number of raw samples drawn.
pub fn sample_invertible_gf2_counted<R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> ((Gf2Matrix, Gf2Matrix), u64) {
    let mut attempts = 0;
    loop {
        attempts += 1;
        let l = Gf2Matrix::random(n, n, rng);
        if let Some(inv) = l.inverse() {
            return ((l, inv.transpose()), attempts);
        }
    }
}

/// Extracts the parity-check rows: the first column of `L` and the second
/// column of `(L^-1)^T`, each reshaped as a `1 x n` check row.
pub fn parity_checks(l: &Gf2Matrix, linv_t: &Gf2Matrix) -> Result<(Gf2Matrix, Gf2Matrix)> {
    let n = l.rows();
    if n < 2 {
        return Err(Error::InvalidArgument("parity checks need n >= 2 (no second column)".into()));
    }
    let p1 = Gf2Matrix::from_rows(&[l.col(0)]);
    let p2 = Gf2Matrix::from_rows(&[linv_t.col(1)]);
    Ok((p1, p2))
}

/// Family to draw fresh instances from in [`collision_estimate`].
#[derive(Clone, Copy, Debug)]
pub enum FamilySpec {
    Toeplitz { n: usize, d: usize },
    /// Two parity-check rows of a random invertible matrix (`D = 2`).
    ParityCheck { n: usize },
    /// The full random invertible matrix as an injective square map (`D = n`).
    InvertibleSquare { n: usize },
}

impl FamilySpec {
    pub fn input_bits(&self) -> usize {
        match *self {
            FamilySpec::Toeplitz { n, .. }
            | FamilySpec::ParityCheck { n }
            | FamilySpec::InvertibleSquare { n } => n,
        }
    }

    pub fn output_bits(&self) -> usize {
        match *self {
            FamilySpec::Toeplitz { d, .. } => d,
            FamilySpec::ParityCheck { .. } => 2,
            FamilySpec::InvertibleSquare { n } => n,
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<HashInstance> {
        match *self {
            FamilySpec::Toeplitz { n, d } => sample_toeplitz(n, d, rng),
            FamilySpec::ParityCheck { n } => {
                let (l, linv_t) = sample_invertible_gf2(n, rng);
                let offset = Bits::random(2, rng);
                HashInstance::parity_check_pair(&l, &linv_t, offset)
            }
            FamilySpec::InvertibleSquare { n } => {
                let (l, _) = sample_invertible_gf2(n, rng);
                let offset = Bits::random(n, rng);
                HashInstance::linear_with_offset(l, offset)
            }
        }
    }
}

/// Monte Carlo collision-rate estimate: samples a fresh instance and a fresh
/// pair `x != x'` per trial. Returns `(rate, binomial standard error)`.
pub fn collision_estimate<R: Rng + ?Sized>(
    family: &FamilySpec,
    trials: u64,
    rng: &mut R,
) -> Result<(f64, f64)> {
    if trials == 0 {
        return Err(Error::InvalidArgument("collision_estimate needs trials >= 1".into()));
    }
    let n = family.input_bits();
    let mut collisions = 0u64;
    for _ in 0..trials {
        let h = family.sample(rng)?;
        let x = Bits::random(n, rng);
        let xp = loop {
            let cand = Bits::random(n, rng);
            if cand != x {
                break cand;
            }
        };
        if h.evaluate(&x)? == h.evaluate(&xp)? {
            collisions += 1;
        }
    }
    let rate = collisions as f64 / trials as f64;
    let stderr = (rate * (1.0 - rate) / trials as f64).sqrt();
    Ok((rate, stderr))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn toeplitz_matrix_is_constant_along_diagonals() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let h = sample_toeplitz(8, 4, &mut rng).unwrap();
        let m = h.matrix();
        for i in 1..4 {
            for j in 1..8 {
                assert_eq!(m.get(i, j), m.get(i - 1, j - 1));
            }
        }
    }

    #[test]
    fn toeplitz_slice_build_matches_per_bit_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for (n, d) in [(1usize, 1usize), (5, 3), (24, 16), (70, 33), (130, 64)] {
            let diagonal = Bits::random(n + d - 1, &mut rng);
            let offset = Bits::random(d, &mut rng);
            let h = HashInstance::toeplitz_from_parts(n, d, diagonal.clone(), offset).unwrap();
            for i in 0..d {
                for j in 0..n {
                    assert_eq!(
                        h.matrix().get(i, j),
                        diagonal.get(i + (n - 1) - j),
                        "(n={n}, d={d}) entry ({i},{j})"
                    );
                }
            }
        }
    }

    #[test]
    fn toeplitz_rejects_bad_dims() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(sample_toeplitz(4, 0, &mut rng).is_err());
        assert!(sample_toeplitz(4, 5, &mut rng).is_err());
    }

    #[test]
    fn two_point_family_is_exhaustively_uniform() {
        // n = 1, d = 1: the four (slope, offset) instances are equiprobable and
        // x = 0 vs x' = 1 collides for exactly the two slope-0 instances.
        let mut collisions = 0;
        for slope in 0..2u8 {
            for offset in 0..2u8 {
                let h = HashInstance::toeplitz_from_parts(
                    1,
                    1,
                    Bits::from_bools(&[slope == 1]),
                    Bits::from_bools(&[offset == 1]),
                )
                .unwrap();
                let t0 = h.evaluate(&Bits::from_bools(&[false])).unwrap();
                let t1 = h.evaluate(&Bits::from_bools(&[true])).unwrap();
                if t0 == t1 {
                    collisions += 1;
                }
            }
        }
        assert_eq!(collisions, 2);
    }

    #[test]
    fn toeplitz_collision_probability_is_exact_by_enumeration() {
        // n = 3, d = 2: enumerate all 2^(n+d-1) = 16 diagonals; for every fixed
        // difference z != 0 exactly 16 / 2^d = 4 matrices annihilate z.
        let n = 3;
        let d = 2;
        for z_idx in 1u64..8 {
            let z = Bits::from_index(n, z_idx);
            let mut hits = 0;
            for diag_idx in 0..16u64 {
                let diag = Bits::from_index(n + d - 1, diag_idx);
                let h = HashInstance::toeplitz_from_parts(n, d, diag, Bits::zeros(d)).unwrap();
                if h.evaluate(&z).unwrap().bits().is_zero() {
                    hits += 1;
                }
            }
            assert_eq!(hits, 4, "difference {}", z.to_binary_string());
        }
    }

    #[test]
    fn fixed_seed_reproduces_instances() {
        let h1 = sample_toeplitz(16, 4, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        let h2 = sample_toeplitz(16, 4, &mut ChaCha8Rng::seed_from_u64(99)).unwrap();
        assert_eq!(h1, h2);
        assert_eq!(h1.serialize(), h2.serialize());
    }

    #[test]
    fn evaluate_edge_cases() {
        // zero matrix, zero offset -> zero tag
        let h = HashInstance::linear_with_offset(Gf2Matrix::zeros(3, 5), Bits::zeros(3)).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let x = Bits::random(5, &mut rng);
            assert!(h.evaluate(&x).unwrap().bits().is_zero());
        }
        // identity matrix (D = n), zero offset -> tag equals input
        let h = HashInstance::linear_with_offset(Gf2Matrix::identity(6), Bits::zeros(6)).unwrap();
        let x = Bits::random(6, &mut rng);
        assert_eq!(h.evaluate(&x).unwrap().bits(), &x);
        // length mismatch
        assert!(matches!(
            h.evaluate(&Bits::zeros(5)),
            Err(Error::LengthMismatch { expected: 6, got: 5 })
        ));
    }

    #[test]
    fn evaluate_is_affine() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let h = sample_toeplitz(12, 5, &mut rng).unwrap();
        for _ in 0..20 {
            let x = Bits::random(12, &mut rng);
            let y = Bits::random(12, &mut rng);
            // h(x + y) + h(0) = (Mx) + (My)
            let lhs = h
                .evaluate(&x.xor(&y))
                .unwrap()
                .bits()
                .xor(h.evaluate(&Bits::zeros(12)).unwrap().bits());
            let rhs = h.matrix().mul_vec(&x).xor(&h.matrix().mul_vec(&y));
            assert_eq!(lhs, rhs);
            // offsets cancel in tag differences
            let diff = h.evaluate(&x).unwrap().bits().xor(h.evaluate(&y).unwrap().bits());
            assert_eq!(diff, h.matrix().mul_vec(&x.xor(&y)));
        }
    }

    #[test]
    fn tag_message_layout_and_determinism() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let h = sample_toeplitz(10, 4, &mut rng).unwrap();
        let key = Bits::random(6, &mut rng);
        let msg = Bits::random(4, &mut rng);
        let t = h.tag_message(&key, &msg).unwrap();
        assert_eq!(t, h.evaluate(&key.concat(&msg)).unwrap());
        for _ in 0..100 {
            assert_eq!(h.tag_message(&key, &msg).unwrap(), t);
        }
        // empty message: evaluate on key alone
        let h2 = sample_toeplitz(6, 3, &mut rng).unwrap();
        let t2 = h2.tag_message(&key, &Bits::zeros(0)).unwrap();
        assert_eq!(t2, h2.evaluate(&key).unwrap());
        // wrong sizes
        assert!(h.tag_message(&key, &Bits::zeros(5)).is_err());
    }

    #[test]
    fn invertible_sampling_self_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        // n = 1: only invertible matrix is [1]
        let (l, linv_t) = sample_invertible_gf2(1, &mut rng);
        assert!(l.get(0, 0));
        assert!(linv_t.get(0, 0));
        for n in [2usize, 3, 5, 8] {
            let (l, linv_t) = sample_invertible_gf2(n, &mut rng);
            // L * (LinvT)^T = I
            assert_eq!(l.mul_mat(&linv_t.transpose()), Gf2Matrix::identity(n));
        }
    }

    #[test]
    fn invertible_acceptance_rate_matches_brute_force_count() {
        // exact fraction for n = 3 is 168/512 = 0.328125
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mut raw = 0u64;
        let mut accepted = 0u64;
        while raw < 100_000 {
            let (_, attempts) = sample_invertible_gf2_counted(3, &mut rng);
            raw += attempts;
            accepted += 1;
        }
        let rate = accepted as f64 / raw as f64;
        assert!((rate - 0.328125).abs() < 0.01, "acceptance rate {rate}");
    }

    #[test]
    fn parity_check_extraction() {
        // identity: P1 = (1, 0), P2 = (0, 1)
        let l = Gf2Matrix::identity(2);
        let linv_t = Gf2Matrix::identity(2);
        let (p1, p2) = parity_checks(&l, &linv_t).unwrap();
        assert_eq!(p1.row(0).to_binary_string(), "10");
        assert_eq!(p2.row(0).to_binary_string(), "01");

        // L = [[1,1],[0,1]] is self-inverse; LinvT = [[1,0],[1,1]]
        let l = Gf2Matrix::from_rows(&[
            Bits::from_bools(&[true, true]),
            Bits::from_bools(&[false, true]),
        ]);
        let linv_t = l.inverse().unwrap().transpose();
        assert_eq!(linv_t.row(0).to_binary_string(), "10");
        assert_eq!(linv_t.row(1).to_binary_string(), "11");
        let (p1, p2) = parity_checks(&l, &linv_t).unwrap();
        assert_eq!(p1.row(0).to_binary_string(), "10");
        assert_eq!(p2.row(0).to_binary_string(), "01");

        // applying P1 equals the inner product with L's first column
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let (l, linv_t) = sample_invertible_gf2(6, &mut rng);
        let (p1, _) = parity_checks(&l, &linv_t).unwrap();
        for _ in 0..10 {
            let x = Bits::random(6, &mut rng);
            assert_eq!(p1.mul_vec(&x).get(0), l.col(0).dot(&x));
        }

        // n < 2 has no second column
        let one = Gf2Matrix::identity(1);
        assert!(parity_checks(&one, &one).is_err());
    }

    #[test]
    fn serialization_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let t = sample_toeplitz(16, 4, &mut rng).unwrap();
        assert_eq!(HashInstance::parse(&t.serialize()).unwrap(), t);

        let p = FamilySpec::ParityCheck { n: 8 }.sample(&mut rng).unwrap();
        assert_eq!(HashInstance::parse(&p.serialize()).unwrap(), p);

        let s = FamilySpec::InvertibleSquare { n: 5 }.sample(&mut rng).unwrap();
        assert_eq!(HashInstance::parse(&s.serialize()).unwrap(), s);

        assert!(HashInstance::parse("garbage n=4\nff\nf\n").is_err());
    }

    #[test]
    fn collision_rates_match_family_properties() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        // injective square construction never collides
        let (rate, _) =
            collision_estimate(&FamilySpec::InvertibleSquare { n: 8 }, 2_000, &mut rng).unwrap();
        assert_eq!(rate, 0.0);

        // n = 8, d = 1: rate ~ 1/2 within 3 sigma over 1e5 trials
        let trials = 100_000;
        let (rate, _) =
            collision_estimate(&FamilySpec::Toeplitz { n: 8, d: 1 }, trials, &mut rng).unwrap();
        let sigma = (0.5 * 0.5 / trials as f64).sqrt();
        assert!((rate - 0.5).abs() < 3.0 * sigma, "rate {rate}");

        // parity-check family: two-universal bound 2^-2 (actual rate slightly below)
        let (rate, stderr) =
            collision_estimate(&FamilySpec::ParityCheck { n: 6 }, 50_000, &mut rng).unwrap();
        assert!(rate <= 0.25 + 4.0 * stderr, "rate {rate}");
        assert!(rate > 0.15, "rate {rate} suspiciously low");
    }

    #[test]
    fn distinct_messages_collide_at_the_family_rate() {
        // two fixed messages under the same key collide with probability 2^-D
        // over the sampled family
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let key_bits = 8;
        let msg_bits = 4;
        let d = 5;
        let key = Bits::random(key_bits, &mut rng);
        let m1 = Bits::from_index(msg_bits, 3);
        let m2 = Bits::from_index(msg_bits, 11);
        let trials = 200_000u64;
        let mut hits = 0u64;
        for _ in 0..trials {
            let h = sample_toeplitz(key_bits + msg_bits, d, &mut rng).unwrap();
            if h.tag_message(&key, &m1).unwrap() == h.tag_message(&key, &m2).unwrap() {
                hits += 1;
            }
        }
        let rate = hits as f64 / trials as f64;
        let p = 2.0f64.powi(-(d as i32));
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((rate - p).abs() <= 4.0 * sigma, "rate {rate} expected {p}");
    }

    #[test]
    fn collision_rate_n12_d6() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let trials = 1_000_000;
        let p = 2.0f64.powi(-6);
        let (rate, _) =
            collision_estimate(&FamilySpec::Toeplitz { n: 12, d: 6 }, trials, &mut rng).unwrap();
        let sigma = (p * (1.0 - p) / trials as f64).sqrt();
        assert!((rate - p).abs() < 3.0 * sigma, "rate {rate} expected {p}");
    }
}
