//! Random instance families.

use super::rng::CoefficientStream;
use crate::functions::{Denominator, SubdifferentiableFunction};
use crate::operators::FixedPointOperator;
use crate::program::{FeasibilityMeasure, FractionalProgram, RatioComponent, SumOfRatiosProgram};
use crate::{Error, Matrix, Result, Vector};

/// Box bounds `[10⁻⁸, 10⁸]` shared by the quadratic-linear and
/// Cobb–Douglas families.
pub const WIDE_BOX: (f64, f64) = (1e-8, 1e8);
/// Box bounds `[0, 100]` of the sum-of-linear-ratios family.
pub const SUM_RATIOS_BOX: (f64, f64) = (0.0, 100.0);

// Stream ids per coefficient block.
const QL_P: u64 = 0;
const QL_S: u64 = 1;
const QL_B: u64 = 2;
const QL_A: u64 = 3;
const CD_C: u64 = 10;
const CD_A: u64 = 11;
const CD_C0: u64 = 12;
const CD_A0: u64 = 13;
const CD_B: u64 = 14;
const CD_QLO: u64 = 15;
const CD_QHI: u64 = 16;
const SR_C: u64 = 20;
const SR_D: u64 = 21;
const SR_R: u64 = 22;
const SR_S: u64 = 23;
const SR_A: u64 = 24;
const SR_B: u64 = 25;

/// Attempts at drawing a full-row-rank `A` before giving up.
const MAX_REGENERATIONS: u64 = 16;

/// Coefficients of `min ½⟨x,Qx⟩/⟨s,x⟩ s.t. Ax = b, x ∈ [10⁻⁸, 10⁸]ᵏ` with
/// `Q = PᵀP + kI`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadraticLinear {
    pub k: usize,
    pub m: usize,
    /// Seed that produced the coefficients (after any regeneration).
    pub seed: u64,
    pub p: Matrix,
    pub s: Vector,
    pub a: Matrix,
    pub b: Vector,
}

impl QuadraticLinear {
    pub fn generate(k: usize, m: usize, seed: u64) -> Result<Self> {
        if k == 0 || m == 0 {
            return Err(Error::InvalidSpec("k and m must be positive".into()));
        }
        if m >= k {
            return Err(Error::InvalidSpec(format!(
                "quadratic_linear needs an underdetermined system, got m = {m} >= k = {k}"
            )));
        }
        for attempt in 0..MAX_REGENERATIONS {
            let seed = seed.wrapping_add(attempt);
            let inst = Self {
                k,
                m,
                seed,
                p: CoefficientStream::new(seed, QL_P).matrix(k, k, 0.0, 1.0),
                s: CoefficientStream::new(seed, QL_S).vector(k, 0.0, 1.0),
                b: CoefficientStream::new(seed, QL_B).vector(m, 0.0, 1.0),
                a: CoefficientStream::new(seed, QL_A).matrix(m, k, 0.0, 1.0),
            };
            match FixedPointOperator::affine(inst.a.clone(), inst.b.clone()) {
                Ok(_) => return Ok(inst),
                Err(Error::RankDeficient { .. }) => {
                    log::warn!(
                        "seed {seed}: AA^T singular, regenerating with seed {}",
                        seed.wrapping_add(1)
                    );
                }
                Err(e) => return Err(e),
            }
        }
        Err(Error::InvalidSpec(format!(
            "no full-rank constraint matrix after {MAX_REGENERATIONS} seeds"
        )))
    }

    /// `Q = PᵀP + kI`.
    pub fn q(&self) -> Matrix {
        let mut q = self.p.tr_mul(&self.p);
        for j in 0..self.k {
            q[(j, j)] += self.k as f64;
        }
        q
    }

    /// Numerator `½⟨x,Qx⟩` (k-strongly convex), denominator `⟨s,x⟩`, and
    /// `T = P_box ∘ P_{Ax=b}`.
    pub fn program(&self) -> Result<FractionalProgram> {
        let numerator = SubdifferentiableFunction::quadratic_form(self.q())?
            .with_strong_convexity(self.k as f64);
        let affine = FixedPointOperator::affine(self.a.clone(), self.b.clone())?;
        let bounds = FixedPointOperator::uniform_box(self.k, WIDE_BOX.0, WIDE_BOX.1)?;
        let operator = FixedPointOperator::compose(vec![affine, bounds])?;
        let upper = WIDE_BOX.1 * self.s.sum();
        Ok(
            FractionalProgram::new(numerator, Denominator::linear(self.s.clone()), operator)?
                .with_upper_bound(upper)
                .with_feasibility(FeasibilityMeasure::LinearSystem {
                    matrix: self.a.clone(),
                    rhs: self.b.clone(),
                }),
        )
    }

    pub fn default_start(&self) -> Vector {
        Vector::from_element(self.k, 0.1)
    }
}

/// Which operator realizes the funding-level constraints.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum OperatorVariant {
    /// `P_box P_{C_2p} ⋯ P_{C_1}`.
    #[default]
    Cyclic,
    /// `P_box ((1/2p) Σ P_{C_l})`.
    Simultaneous,
}

impl std::str::FromStr for OperatorVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "cyclic" => Ok(Self::Cyclic),
            "simultaneous" => Ok(Self::Simultaneous),
            _ => Err(Error::Config(format!("unknown operator variant '{s}'"))),
        }
    }
}

/// Coefficients of the cost-to-profit problem
/// `min (⟨c,x⟩ + c₀) / (a₀ Π xⱼ^{aⱼ})` under funding-level constraints
/// `q̲ₗ ≤ ⟨bₗ,x⟩ ≤ q̄ₗ` and `x ∈ [10⁻⁸, 10⁸]ᵏ`.
#[derive(Debug, Clone, PartialEq)]
pub struct CobbDouglas {
    pub k: usize,
    pub p: usize,
    pub seed: u64,
    pub c: Vector,
    pub c0: f64,
    pub a0: f64,
    /// Normalized to sum to one.
    pub a: Vector,
    /// Rows `bₗ`.
    pub b: Matrix,
    pub q_lo: Vector,
    pub q_hi: Vector,
}

impl CobbDouglas {
    pub fn generate(k: usize, p: usize, seed: u64) -> Result<Self> {
        if k == 0 || p == 0 {
            return Err(Error::InvalidSpec("k and p must be positive".into()));
        }
        let kf = k as f64;
        let raw = CoefficientStream::new(seed, CD_A).vector(k, 0.0, kf);
        let a = &raw / raw.sum();
        let b = CoefficientStream::new(seed, CD_B).matrix(p, k, 0.0, 1.0);
        let norms: Vec<f64> = (0..p).map(|l| b.row(l).norm()).collect();
        let mut lo_stream = CoefficientStream::new(seed, CD_QLO);
        let mut hi_stream = CoefficientStream::new(seed, CD_QHI);
        let q_lo = Vector::from_iterator(p, norms.iter().map(|n| lo_stream.open(0.0, 25.0 * n)));
        let q_hi =
            Vector::from_iterator(p, norms.iter().map(|n| hi_stream.open(75.0 * n, 100.0 * n)));
        Ok(Self {
            k,
            p,
            seed,
            c: CoefficientStream::new(seed, CD_C).vector(k, 0.0, kf),
            c0: CoefficientStream::new(seed, CD_C0).open(1.0, 10.0),
            a0: CoefficientStream::new(seed, CD_A0).open(1.0, 10.0),
            a,
            b,
            q_lo,
            q_hi,
        })
    }

    /// The `2p` halfspaces `⟨−bₗ,x⟩ ≤ −q̲ₗ` then `⟨bₗ,x⟩ ≤ q̄ₗ`.
    pub fn halfspaces(&self) -> Result<Vec<FixedPointOperator>> {
        let mut ops = Vec::with_capacity(2 * self.p);
        for l in 0..self.p {
            let row = self.b.row(l).transpose();
            ops.push(FixedPointOperator::halfspace(-row, -self.q_lo[l])?);
        }
        for l in 0..self.p {
            let row = self.b.row(l).transpose();
            ops.push(FixedPointOperator::halfspace(row, self.q_hi[l])?);
        }
        Ok(ops)
    }

    pub fn operator(&self, variant: OperatorVariant) -> Result<FixedPointOperator> {
        let bounds = FixedPointOperator::uniform_box(self.k, WIDE_BOX.0, WIDE_BOX.1)?;
        let mut halfspaces = self.halfspaces()?;
        match variant {
            OperatorVariant::Cyclic => {
                halfspaces.push(bounds);
                FixedPointOperator::compose(halfspaces)
            }
            OperatorVariant::Simultaneous => {
                let avg = FixedPointOperator::uniform_average(halfspaces)?;
                FixedPointOperator::compose(vec![avg, bounds])
            }
        }
    }

    pub fn program(&self, variant: OperatorVariant) -> Result<FractionalProgram> {
        let numerator = SubdifferentiableFunction::affine(self.c.clone(), self.c0);
        let denominator = Denominator::cobb_douglas(self.a0, self.a.clone())?;
        let upper = self.a0 * WIDE_BOX.1;
        Ok(
            FractionalProgram::new(numerator, denominator, self.operator(variant)?)?
                .with_upper_bound(upper)
                .with_feasibility(FeasibilityMeasure::FundingLevels {
                    rows: self.b.clone(),
                    lower: self.q_lo.clone(),
                    upper: self.q_hi.clone(),
                }),
        )
    }

    pub fn default_start(&self) -> Vector {
        Vector::from_element(self.k, 1.0)
    }
}

/// Coefficients of `min Σᵢ (⟨cᵢ,x⟩ + rᵢ)/(⟨dᵢ,x⟩ + sᵢ)` subject to
/// `⟨aₗ,x⟩ ≤ bₗ` and `x ∈ [0, 100]ᵏ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SumLinearRatios {
    pub k: usize,
    pub m: usize,
    pub p: usize,
    pub seed: u64,
    pub c: Matrix,
    pub d: Matrix,
    pub r: Vector,
    pub s: Vector,
    pub a: Matrix,
    pub b: Vector,
}

impl SumLinearRatios {
    pub fn generate(k: usize, m: usize, p: usize, seed: u64) -> Result<Self> {
        if k == 0 || m == 0 || p == 0 {
            return Err(Error::InvalidSpec("k, m and p must be positive".into()));
        }
        Ok(Self {
            k,
            m,
            p,
            seed,
            c: CoefficientStream::new(seed, SR_C).matrix(m, k, 0.1, 10.0),
            d: CoefficientStream::new(seed, SR_D).matrix(m, k, 0.1, 10.0),
            r: CoefficientStream::new(seed, SR_R).vector(m, 0.0, 1.0),
            s: CoefficientStream::new(seed, SR_S).vector(m, 0.0, 1.0),
            a: CoefficientStream::new(seed, SR_A).matrix(p, k, -10.0, 10.0),
            b: CoefficientStream::new(seed, SR_B).vector(p, 0.0, 10.0),
        })
    }

    /// Number of components after padding: `max(m, p + 1)`.
    pub fn components(&self) -> usize {
        self.m.max(self.p + 1)
    }

    /// Builds `max(m, p+1)` components. Ratios beyond `m` get `fᵢ = 0` over
    /// `gᵢ ≡ 1`; operators beyond `p + 1` are the identity.
    pub fn program(&self) -> Result<SumOfRatiosProgram> {
        let n = self.components();
        let mut components = Vec::with_capacity(n);
        for i in 0..n {
            let (numerator, denominator) = if i < self.m {
                (
                    SubdifferentiableFunction::affine(self.c.row(i).transpose(), self.r[i]),
                    Denominator::affine(self.d.row(i).transpose(), self.s[i]),
                )
            } else {
                (
                    SubdifferentiableFunction::linear(Vector::zeros(self.k)),
                    Denominator::constant(self.k, 1.0),
                )
            };
            let operator = if i < self.p {
                FixedPointOperator::halfspace(self.a.row(i).transpose(), self.b[i])?
            } else if i == self.p {
                FixedPointOperator::uniform_box(self.k, SUM_RATIOS_BOX.0, SUM_RATIOS_BOX.1)?
            } else {
                FixedPointOperator::identity(self.k)
            };
            components.push(RatioComponent {
                numerator,
                denominator,
                operator,
            });
        }
        let (lower, upper) = self.denominator_bounds();
        Ok(SumOfRatiosProgram::new(components)?
            .with_denom_bounds(lower, upper)
            .with_feasibility(FeasibilityMeasure::Inequalities {
                matrix: self.a.clone(),
                rhs: self.b.clone(),
            }))
    }

    /// Exact bounds of the `gᵢ` over the box: `N = min sᵢ`,
    /// `M = max (100 Σⱼ dᵢⱼ + sᵢ)`, including padded `gᵢ ≡ 1`.
    pub fn denominator_bounds(&self) -> (f64, f64) {
        let mut lower = f64::INFINITY;
        let mut upper: f64 = 0.0;
        for i in 0..self.m {
            lower = lower.min(self.s[i]);
            upper = upper.max(SUM_RATIOS_BOX.1 * self.d.row(i).sum() + self.s[i]);
        }
        if self.components() > self.m {
            lower = lower.min(1.0);
            upper = upper.max(1.0);
        }
        (lower, upper)
    }

    pub fn default_start(&self) -> Vector {
        Vector::from_element(self.k, 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::FunctionKind;
    use crate::operators::OperatorKind;

    #[test]
    fn quadratic_linear_validation() {
        assert!(matches!(
            QuadraticLinear::generate(5, 5, 1),
            Err(Error::InvalidSpec(_))
        ));
        assert!(QuadraticLinear::generate(0, 0, 1).is_err());
    }

    #[test]
    fn quadratic_linear_q_is_symmetric_and_coercive() {
        let inst = QuadraticLinear::generate(12, 3, 4).unwrap();
        let q = inst.q();
        assert_eq!(q, q.transpose());
        let mut probe = CoefficientStream::new(99, 0);
        for _ in 0..100 {
            let x = probe.vector(12, -1.0, 1.0);
            assert!(x.dot(&(&q * &x)) >= 12.0 * x.norm_squared() * (1.0 - 1e-12));
        }
    }

    #[test]
    fn cobb_douglas_exponents_normalized() {
        let inst = CobbDouglas::generate(30, 4, 9).unwrap();
        assert!((inst.a.sum() - 1.0).abs() <= 1e-12);
        assert!(inst.a.iter().all(|&a| a > 0.0));
        for l in 0..4 {
            let n = inst.b.row(l).norm();
            assert!(inst.q_lo[l] > 0.0 && inst.q_lo[l] < 25.0 * n);
            assert!(inst.q_hi[l] > 75.0 * n && inst.q_hi[l] < 100.0 * n);
        }
    }

    #[test]
    fn cobb_douglas_variants() {
        let inst = CobbDouglas::generate(6, 3, 2).unwrap();
        let cyc = inst.operator(OperatorVariant::Cyclic).unwrap();
        match cyc.kind() {
            OperatorKind::Composition(ops) => assert_eq!(ops.len(), 7),
            other => panic!("{other:?}"),
        }
        let sim = inst.operator(OperatorVariant::Simultaneous).unwrap();
        match sim.kind() {
            OperatorKind::Composition(ops) => {
                assert_eq!(ops.len(), 2);
                assert!(matches!(
                    ops[0].kind(),
                    OperatorKind::ConvexCombination { .. }
                ));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn sum_ratios_pads_numerators() {
        let inst = SumLinearRatios::generate(4, 5, 10, 3).unwrap();
        let prog = inst.program().unwrap();
        assert_eq!(prog.len(), 11);
        for c in &prog.components[5..] {
            match c.numerator.kind() {
                FunctionKind::Linear { coeffs } => assert!(coeffs.iter().all(|&v| v == 0.0)),
                other => panic!("{other:?}"),
            }
        }
        assert!(matches!(
            prog.components[10].operator.kind(),
            OperatorKind::BoxProjection { .. }
        ));
    }

    #[test]
    fn sum_ratios_pads_operators() {
        let inst = SumLinearRatios::generate(4, 10, 5, 3).unwrap();
        let prog = inst.program().unwrap();
        assert_eq!(prog.len(), 10);
        assert!(matches!(
            prog.components[5].operator.kind(),
            OperatorKind::BoxProjection { .. }
        ));
        for c in &prog.components[6..] {
            assert!(matches!(c.operator.kind(), OperatorKind::Identity));
        }
    }

    #[test]
    fn operator_variant_parse() {
        assert_eq!(
            "cyclic".parse::<OperatorVariant>().unwrap(),
            OperatorVariant::Cyclic
        );
        assert!("other".parse::<OperatorVariant>().is_err());
    }
}
