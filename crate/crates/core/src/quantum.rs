//! Density matrices, quantum channels, and entropic functionals.
//!
//! Quantities are in bits. Eigenvalues in `[-VALIDITY_TOL, 0)` are clamped to
//! zero before entropy computation; anything more negative rejects the state.
//! Everything here targets desk-scale dimensions (d <= 8); relative entropy
//! uses full eigendecompositions of both arguments, never series
//! approximations.

use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matrix::ComplexMatrix;
use crate::{SUPPORT_TOL, VALIDITY_TOL};

/// A Hermitian, positive-semidefinite, unit-trace complex matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, and positivity (each to `VALIDITY_TOL`).
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        if matrix.rows() != matrix.cols() {
            return Err(Error::InvalidState("density matrix must be square".into()));
        }
        let defect = matrix.hermiticity_defect();
        if defect > VALIDITY_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {defect:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > VALIDITY_TOL || tr.im.abs() > VALIDITY_TOL {
            return Err(Error::InvalidState(format!("trace is {tr} rather than 1")));
        }
        let eigs = matrix.hermitian_eigenvalues()?;
        if let Some(&min) = eigs.first() {
            if min < -VALIDITY_TOL {
                return Err(Error::InvalidState(format!("negative eigenvalue {min:.3e}")));
            }
        }
        Ok(DensityMatrix { matrix })
    }

    /// Pure state |psi><psi|.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        DensityMatrix::new(ComplexMatrix::projector(psi))
    }

    /// Classical state diag(probs).
    pub fn diagonal(probs: &[f64]) -> Result<Self> {
        DensityMatrix::new(ComplexMatrix::diagonal(probs))
    }

    pub fn maximally_mixed(dim: usize) -> Self {
        DensityMatrix { matrix: ComplexMatrix::identity(dim).scale(1.0 / dim as f64) }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Spectrum with the small-negative clamp applied, ascending.
    pub fn spectrum(&self) -> Result<Vec<f64>> {
        let eigs = self.matrix.hermitian_eigenvalues()?;
        Ok(eigs.into_iter().map(|l| if l < 0.0 { 0.0 } else { l }).collect())
    }

    /// Tensor product `self (x) other`.
    pub fn tensor(&self, other: &DensityMatrix) -> DensityMatrix {
        let (da, db) = (self.dim(), other.dim());
        let d = da * db;
        let mut m = ComplexMatrix::zeros(d, d);
        for i in 0..da {
            for j in 0..da {
                let a = self.matrix.get(i, j);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for k in 0..db {
                    for l in 0..db {
                        m.set(i * db + k, j * db + l, a * other.matrix.get(k, l));
                    }
                }
            }
        }
        DensityMatrix { matrix: m }
    }
}

/// A probability-weighted list of equal-dimension density matrices.
#[derive(Clone, Debug)]
pub struct Ensemble {
    components: Vec<(f64, DensityMatrix)>,
}

impl Ensemble {
    pub fn new(components: Vec<(f64, DensityMatrix)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::InvalidState("ensemble must have at least one component".into()));
        }
        let dim = components[0].1.dim();
        for (_, rho) in &components {
            if rho.dim() != dim {
                return Err(Error::DimensionMismatch(dim, rho.dim()));
            }
        }
        let total: f64 = components.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > VALIDITY_TOL {
            return Err(Error::InvalidPrior(total));
        }
        if components.iter().any(|(p, _)| *p < -VALIDITY_TOL) {
            return Err(Error::InvalidState("negative ensemble probability".into()));
        }
        Ok(Ensemble { components })
    }

    pub fn components(&self) -> &[(f64, DensityMatrix)] {
        &self.components
    }

    pub fn dim(&self) -> usize {
        self.components[0].1.dim()
    }

    /// The average state `sum_i p_i rho_i`.
    pub fn average_state(&self) -> DensityMatrix {
        let dim = self.dim();
        let mut acc = ComplexMatrix::zeros(dim, dim);
        for (p, rho) in &self.components {
            acc = acc.add(&rho.matrix().scale(*p));
        }
        DensityMatrix { matrix: acc }
    }
}

/// A CPTP map given by Kraus operators with `sum K^dagger K = I`.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    pub fn new(operators: Vec<ComplexMatrix>) -> Result<Self> {
        if operators.is_empty() {
            return Err(Error::InvalidState("channel needs at least one Kraus operator".into()));
        }
        let (d_out, d_in) = (operators[0].rows(), operators[0].cols());
        for k in &operators {
            if k.rows() != d_out || k.cols() != d_in {
                return Err(Error::DimensionMismatch(k.cols(), d_in));
            }
        }
        let mut acc = ComplexMatrix::zeros(d_in, d_in);
        for k in &operators {
            acc = acc.add(&k.dagger().mul(k));
        }
        let defect = acc.sub(&ComplexMatrix::identity(d_in));
        let worst = defect.entries().iter().map(|z| z.norm()).fold(0.0, f64::max);
        if worst > VALIDITY_TOL {
            return Err(Error::InvalidState(format!(
                "Kraus completeness defect {worst:.3e}"
            )));
        }
        Ok(KrausChannel { operators })
    }

    pub fn identity(dim: usize) -> Self {
        KrausChannel { operators: vec![ComplexMatrix::identity(dim)] }
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    pub fn input_dim(&self) -> usize {
        self.operators[0].cols()
    }

    pub fn output_dim(&self) -> usize {
        self.operators[0].rows()
    }
}

/// Shannon entropy of a clamped spectrum, in bits. `l log l := 0` below `SUPPORT_TOL`.
fn spectrum_entropy(spectrum: &[f64]) -> f64 {
    -spectrum
        .iter()
        .filter(|&&l| l > SUPPORT_TOL)
        .map(|&l| l * l.log2())
        .sum::<f64>()
}

/// Von Neumann entropy `S(rho) = -tr(rho log2 rho)` in bits, clamped to `[0, log2 d]`.
pub fn von_neumann_entropy(rho: &DensityMatrix) -> Result<f64> {
    let s = spectrum_entropy(&rho.spectrum()?);
    Ok(s.clamp(0.0, (rho.dim() as f64).log2()))
}

/// Holevo information `chi = S(avg) - sum_i p_i S(rho_i)` in bits, clamped to `[0, log2 d]`.
pub fn holevo_information(ensemble: &Ensemble) -> Result<f64> {
    let avg_entropy = von_neumann_entropy(&ensemble.average_state())?;
    let mut cond = 0.0;
    for (p, rho) in ensemble.components() {
        if *p > SUPPORT_TOL {
            cond += p * von_neumann_entropy(rho)?;
        }
    }
    Ok((avg_entropy - cond).clamp(0.0, (ensemble.dim() as f64).log2()))
}

/// Trace norm `||m||_1 = sum |eigenvalues|` of a Hermitian matrix.
fn trace_norm_hermitian(m: &ComplexMatrix) -> Result<f64> {
    Ok(m.hermitian_eigenvalues()?.iter().map(|l| l.abs()).sum())
}

/// Trace distance `(1/2) ||rho - sigma||_1` in `[0, 1]`.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let diff = rho.matrix().sub(sigma.matrix());
    Ok(0.5 * trace_norm_hermitian(&diff)?)
}

/// Optimal success probability for discriminating `rho0` (prior `p0`) from
/// `rho1` (prior `p1`): `(1 + ||p0 rho0 - p1 rho1||_1) / 2`.
pub fn helstrom_success(
    p0: f64,
    rho0: &DensityMatrix,
    p1: f64,
    rho1: &DensityMatrix,
) -> Result<f64> {
    if (p0 + p1 - 1.0).abs() > VALIDITY_TOL || p0 < 0.0 || p1 < 0.0 {
        return Err(Error::InvalidPrior(p0 + p1));
    }
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch(rho0.dim(), rho1.dim()));
    }
    let gap = rho0.matrix().scale(p0).sub(&rho1.matrix().scale(p1));
    Ok(0.5 * (1.0 + trace_norm_hermitian(&gap)?))
}

/// Applies a channel: `sum_k K rho K^dagger`. The output is re-validated.
pub fn apply_channel(channel: &KrausChannel, rho: &DensityMatrix) -> Result<DensityMatrix> {
    if channel.input_dim() != rho.dim() {
        return Err(Error::DimensionMismatch(channel.input_dim(), rho.dim()));
    }
    let d_out = channel.output_dim();
    let mut acc = ComplexMatrix::zeros(d_out, d_out);
    for k in channel.operators() {
        acc = acc.add(&k.mul(rho.matrix()).mul(&k.dagger()));
    }
    // Symmetrize away float dust before validation.
    let herm = acc.add(&acc.dagger()).scale(0.5);
    DensityMatrix::new(herm)
}

/// Quantum relative entropy `D(rho || sigma) = tr rho (log2 rho - log2 sigma)` in bits.
///
/// Computed from the eigendecompositions of both arguments:
/// `tr(rho log2 sigma) = sum_j <v_j| rho |v_j> log2 mu_j` over sigma's eigenpairs.
/// Returns `+inf` when rho has mass above `VALIDITY_TOL` outside sigma's support.
pub fn relative_entropy(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch(rho.dim(), sigma.dim()));
    }
    let rho_term: f64 = rho
        .spectrum()?
        .iter()
        .filter(|&&l| l > SUPPORT_TOL)
        .map(|&l| l * l.log2())
        .sum();
    let (mu, v) = sigma.matrix().hermitian_eigen()?;
    let mut sigma_term = 0.0;
    for (j, &mu_j) in mu.iter().enumerate() {
        let vj = v.column(j);
        // <v_j| rho |v_j>
        let mut mass = 0.0;
        for r in 0..rho.dim() {
            for c in 0..rho.dim() {
                mass += (vj[r].conj() * rho.matrix().get(r, c) * vj[c]).re;
            }
        }
        if mu_j <= SUPPORT_TOL {
            if mass > VALIDITY_TOL {
                return Ok(f64::INFINITY);
            }
            continue;
        }
        sigma_term += mass * mu_j.log2();
    }
    Ok((rho_term - sigma_term).max(0.0))
}

// ---------------------------------------------------------------------------
// Random states and channels (Ginibre / Haar constructions)
// ---------------------------------------------------------------------------

/// Standard complex Gaussian via Box-Muller.
fn gaussian_pair<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let u1: f64 = rng.gen_range(f64::MIN_POSITIVE..1.0);
    let u2: f64 = rng.gen();
    let r = (-2.0 * u1.ln()).sqrt();
    let theta = 2.0 * std::f64::consts::PI * u2;
    Complex64::new(r * theta.cos(), r * theta.sin())
}

fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for r in 0..rows {
        for c in 0..cols {
            m.set(r, c, gaussian_pair(rng));
        }
    }
    m
}

/// Full-support random density matrix `G G^dagger / tr`.
pub fn random_density_matrix<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DensityMatrix {
    let g = ginibre(dim, dim, rng);
    let gg = g.mul(&g.dagger());
    let tr = gg.trace().re;
    let m = gg.scale(1.0 / tr);
    let herm = m.add(&m.dagger()).scale(0.5);
    DensityMatrix::new(herm).expect("Ginibre construction yields a valid state")
}

/// Haar-ish random unitary via Gram-Schmidt on a Ginibre matrix.
pub fn random_unitary<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> ComplexMatrix {
    let g = ginibre(dim, dim, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|c| g.column(c)).collect();
    for k in 0..dim {
        for j in 0..k {
            let proj: Complex64 =
                (0..dim).map(|r| cols[j][r].conj() * cols[k][r]).sum();
            for r in 0..dim {
                let adj = proj * cols[j][r];
                cols[k][r] -= adj;
            }
        }
        let norm: f64 = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[k].iter_mut() {
            *z /= norm;
        }
    }
    let mut u = ComplexMatrix::zeros(dim, dim);
    for (c, col) in cols.iter().enumerate() {
        for r in 0..dim {
            u.set(r, c, col[r]);
        }
    }
    u
}

/// Random channel with `n_kraus` operators, obtained by slicing a random
/// isometry `V : C^d -> C^d (x) C^k` into Kraus blocks.
pub fn random_channel<R: Rng + ?Sized>(dim: usize, n_kraus: usize, rng: &mut R) -> KrausChannel {
    // Columns of a (dim * n_kraus) x dim isometry via Gram-Schmidt.
    let big = dim * n_kraus;
    let g = ginibre(big, dim, rng);
    let mut cols: Vec<Vec<Complex64>> = (0..dim).map(|c| g.column(c)).collect();
    for k in 0..dim {
        for j in 0..k {
            let proj: Complex64 = (0..big).map(|r| cols[j][r].conj() * cols[k][r]).sum();
            for r in 0..big {
                let adj = proj * cols[j][r];
                cols[k][r] -= adj;
            }
        }
        let norm: f64 = cols[k].iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in cols[k].iter_mut() {
            *z /= norm;
        }
    }
    let operators = (0..n_kraus)
        .map(|b| {
            let mut k = ComplexMatrix::zeros(dim, dim);
            for r in 0..dim {
                for c in 0..dim {
                    k.set(r, c, cols[c][b * dim + r]);
                }
            }
            k
        })
        .collect();
    KrausChannel::new(operators).expect("isometry slicing yields a complete Kraus set")
}

/// Conjugates a state by a unitary: `U rho U^dagger`.
pub fn conjugate(rho: &DensityMatrix, u: &ComplexMatrix) -> Result<DensityMatrix> {
    let m = u.mul(rho.matrix()).mul(&u.dagger());
    DensityMatrix::new(m.add(&m.dagger()).scale(0.5))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket0() -> DensityMatrix {
        DensityMatrix::diagonal(&[1.0, 0.0]).unwrap()
    }

    fn ket1() -> DensityMatrix {
        DensityMatrix::diagonal(&[0.0, 1.0]).unwrap()
    }

    fn ket_plus() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::pure(&[c(h, 0.0), c(h, 0.0)]).unwrap()
    }

    #[test]
    fn entropy_of_maximally_mixed_qubit_is_one_bit() {
        let rho = DensityMatrix::maximally_mixed(2);
        assert_relative_eq!(von_neumann_entropy(&rho).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_of_pure_state_is_zero() {
        assert_relative_eq!(von_neumann_entropy(&ket_plus()).unwrap(), 0.0, epsilon = 1e-9);
        assert_relative_eq!(von_neumann_entropy(&ket0()).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn entropy_of_three_quarter_state() {
        // oracle: -(3/4 log2 3/4 + 1/4 log2 1/4)
        let expect = -(0.75f64 * 0.75f64.log2() + 0.25 * 0.25f64.log2());
        assert_relative_eq!(expect, 0.8112781244591328, epsilon = 1e-12);
        let rho = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        assert_relative_eq!(von_neumann_entropy(&rho).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn holevo_of_orthogonal_uniform_pair_is_one_bit() {
        let e = Ensemble::new(vec![(0.5, ket0()), (0.5, ket1())]).unwrap();
        assert_relative_eq!(holevo_information(&e).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn holevo_of_single_component_is_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let rho = random_density_matrix(3, &mut rng);
        let e = Ensemble::new(vec![(1.0, rho)]).unwrap();
        assert_relative_eq!(holevo_information(&e).unwrap(), 0.0, epsilon = 1e-9);
    }

    #[test]
    fn holevo_of_zero_plus_pair() {
        // oracle: average state [[3/4, 1/4], [1/4, 1/4]] has eigenvalues (1 +- 1/sqrt2)/2
        let lp = (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0;
        let lm = (1.0 - std::f64::consts::FRAC_1_SQRT_2) / 2.0;
        let expect = -(lp * lp.log2() + lm * lm.log2());
        assert_relative_eq!(expect, 0.600876036692856, epsilon = 1e-12);
        let e = Ensemble::new(vec![(0.5, ket0()), (0.5, ket_plus())]).unwrap();
        assert_relative_eq!(holevo_information(&e).unwrap(), expect, epsilon = 1e-10);
    }

    #[test]
    fn ensemble_rejects_mixed_dimensions() {
        let res = Ensemble::new(vec![(0.5, ket0()), (0.5, DensityMatrix::maximally_mixed(3))]);
        assert!(matches!(res, Err(Error::DimensionMismatch(2, 3))));
    }

    #[test]
    fn trace_distance_cases() {
        assert_relative_eq!(trace_distance(&ket0(), &ket0()).unwrap(), 0.0, epsilon = 1e-12);
        assert_relative_eq!(trace_distance(&ket0(), &ket1()).unwrap(), 1.0, epsilon = 1e-12);
        assert_relative_eq!(
            trace_distance(&ket0(), &ket_plus()).unwrap(),
            std::f64::consts::FRAC_1_SQRT_2,
            epsilon = 1e-12
        );
    }

    #[test]
    fn helstrom_cases() {
        let rho = ket_plus();
        assert_relative_eq!(helstrom_success(0.5, &rho, 0.5, &rho).unwrap(), 0.5, epsilon = 1e-12);
        assert_relative_eq!(
            helstrom_success(0.5, &ket0(), 0.5, &ket1()).unwrap(),
            1.0,
            epsilon = 1e-12
        );
        assert_relative_eq!(
            helstrom_success(0.5, &ket0(), 0.5, &ket_plus()).unwrap(),
            (1.0 + std::f64::consts::FRAC_1_SQRT_2) / 2.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn helstrom_rejects_bad_priors() {
        assert!(matches!(
            helstrom_success(0.6, &ket0(), 0.6, &ket1()),
            Err(Error::InvalidPrior(_))
        ));
    }

    #[test]
    fn identity_channel_preserves_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = random_density_matrix(2, &mut rng);
        let out = apply_channel(&KrausChannel::identity(2), &rho).unwrap();
        assert!(trace_distance(&rho, &out).unwrap() < 1e-12);
    }

    #[test]
    fn full_depolarization_maps_to_maximally_mixed() {
        // Kraus set {|i><j| / sqrt(d)} sends every qubit to I/2
        let mut ops = Vec::new();
        for i in 0..2 {
            for j in 0..2 {
                let mut k = ComplexMatrix::zeros(2, 2);
                k.set(i, j, c(std::f64::consts::FRAC_1_SQRT_2, 0.0));
                ops.push(k);
            }
        }
        let ch = KrausChannel::new(ops).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let rho = random_density_matrix(2, &mut rng);
        let out = apply_channel(&ch, &rho).unwrap();
        assert!(trace_distance(&out, &DensityMatrix::maximally_mixed(2)).unwrap() < 1e-9);
    }

    #[test]
    fn bit_flip_channel_on_ket0() {
        let x01 = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0]).unwrap();
        let ch = KrausChannel::new(vec![
            ComplexMatrix::identity(2).scale(0.7f64.sqrt()),
            x01.scale(0.3f64.sqrt()),
        ])
        .unwrap();
        let out = apply_channel(&ch, &ket0()).unwrap();
        let expect = DensityMatrix::diagonal(&[0.7, 0.3]).unwrap();
        assert!(trace_distance(&out, &expect).unwrap() < 1e-12);
    }

    #[test]
    fn kraus_completeness_is_enforced() {
        let bad = KrausChannel::new(vec![ComplexMatrix::identity(2).scale(0.9)]);
        assert!(bad.is_err());
    }

    #[test]
    fn relative_entropy_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let rho = random_density_matrix(2, &mut rng);
        assert_relative_eq!(relative_entropy(&rho, &rho).unwrap(), 0.0, epsilon = 1e-9);
        assert!(relative_entropy(&ket0(), &ket1()).unwrap().is_infinite());
        // commuting oracle: (1/2) log2((1/2)/(3/4)) + (1/2) log2((1/2)/(1/4))
        let expect = 0.5 * (0.5f64 / 0.75).log2() + 0.5 * (0.5f64 / 0.25).log2();
        assert_relative_eq!(expect, 0.20751874963942185, epsilon = 1e-12);
        let a = DensityMatrix::diagonal(&[0.5, 0.5]).unwrap();
        let b = DensityMatrix::diagonal(&[0.75, 0.25]).unwrap();
        assert_relative_eq!(relative_entropy(&a, &b).unwrap(), expect, epsilon = 1e-12);
    }

    #[test]
    fn random_channel_is_trace_preserving() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for dim in [2, 3, 4] {
            let ch = random_channel(dim, 2, &mut rng);
            let rho = random_density_matrix(dim, &mut rng);
            let out = apply_channel(&ch, &rho).unwrap();
            assert_relative_eq!(out.matrix().trace().re, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn density_matrix_rejects_invalid_inputs() {
        // non-unit trace
        assert!(DensityMatrix::new(ComplexMatrix::identity(2)).is_err());
        // non-Hermitian
        let m = ComplexMatrix::new(2, 2, vec![c(0.5, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.5, 0.0)])
            .unwrap();
        assert!(DensityMatrix::new(m).is_err());
        // negative eigenvalue beyond tolerance
        let m = ComplexMatrix::diagonal(&[1.1, -0.1]);
        assert!(DensityMatrix::new(m).is_err());
    }
}
