//! Haar-random sampling and the closed-form second-moment integrals, each
//! paired with a Monte-Carlo estimator.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_distr::{Distribution, StandardNormal};

use crate::complex::{CMatrix, PureState, C64, MAX_DIM};
use crate::error::{invalid, Error, Result};
use crate::par;
use crate::rng::SimRng;
use crate::stats::Estimate;

fn check_dim(name: &'static str, d: usize) -> Result<()> {
    if d == 0 {
        return Err(invalid(name, "dimension must be at least 1"));
    }
    if d > MAX_DIM {
        return Err(invalid(name, format!("dimension {d} exceeds the cap {MAX_DIM}")));
    }
    Ok(())
}

/// Standard complex Gaussian, E|z|² = 1.
pub fn complex_gaussian(rng: &mut SimRng) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn ginibre(rows: usize, cols: usize, rng: &mut SimRng) -> CMatrix {
    let data = (0..rows * cols).map(|_| complex_gaussian(rng)).collect();
    CMatrix::from_vec(rows, cols, data).expect("length matches shape")
}

/// Q factor of a Ginibre matrix with the phases of diag(R) pushed into Q,
/// which makes the result exactly Haar distributed.
fn haar_isometry(d: usize, cols: usize, rng: &mut SimRng) -> CMatrix {
    let z = ginibre(d, cols, rng);
    let (mut q, r) = z.qr_thin().expect("rows >= cols");
    for j in 0..cols {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 {
            rjj / rjj.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        for i in 0..d {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// Haar-random `d x d` unitary.
pub fn haar_unitary(d: usize, rng: &mut SimRng) -> Result<CMatrix> {
    check_dim("d", d)?;
    Ok(haar_isometry(d, d, rng))
}

/// Haar-random pure state in dimension `d` (normalized complex Gaussian).
pub fn haar_state(d: usize, rng: &mut SimRng) -> Result<PureState> {
    check_dim("d", d)?;
    loop {
        let amps: Vec<C64> = (0..d).map(|_| complex_gaussian(rng)).collect();
        if let Ok(s) = PureState::normalized(amps) {
            return Ok(s);
        }
    }
}

/// First `r` columns of one Haar unitary.
pub fn orthonormal_haar_family(d: usize, r: usize, rng: &mut SimRng) -> Result<Vec<PureState>> {
    check_dim("d", d)?;
    if r == 0 || r > d {
        return Err(invalid("r", format!("need 1 <= r <= d = {d}, got {r}")));
    }
    let q = haar_isometry(d, r, rng);
    Ok((0..r)
        .map(|j| PureState::normalized(q.column(j)).expect("isometry columns are unit vectors"))
        .collect())
}

/// Squared moduli of a Haar state in dimension `r`: a uniform point on the
/// probability simplex.
pub fn haar_probability_vector(r: usize, rng: &mut SimRng) -> Result<Vec<f64>> {
    if r == 0 {
        return Err(invalid("r", "need r >= 1"));
    }
    let c = haar_state(r, rng)?;
    let p: Vec<f64> = c.amplitudes().iter().map(|z| z.norm_sqr()).collect();
    let total: f64 = p.iter().sum();
    Ok(p.into_iter().map(|x| x / total).collect())
}

/// First `r` entries of a uniform random permutation of `0..d`.
pub fn random_permutation_prefix(d: usize, r: usize, rng: &mut SimRng) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..d).collect();
    let (head, _) = idx.partial_shuffle(rng, r);
    head.to_vec()
}

/// Which Haar integral to evaluate.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MomentKind {
    /// ∫ Tr(W A W† B) dW, operands `[A, B]`.
    Conj1,
    /// ∫ Tr(W A W† B) Tr(W C W† D) dW, operands `[A, B, C, D]`.
    Conj2,
    /// ∫ |φ⟩⟨φ| dφ (no operands) or ∫ Tr(|φ⟩⟨φ| A) dφ, operands `[A]`.
    State1,
    /// ∫ Tr(|φ⟩⟨φ| A) Tr(|φ⟩⟨φ| B) dφ, operands `[A, B]`.
    State2,
    /// ∫ Tr(A|μ⟩⟨μ|) Tr(A|ν⟩⟨ν|) over orthogonal Haar pairs, operands `[A]`.
    OrthPair,
}

impl MomentKind {
    pub const ALL: [MomentKind; 5] = [
        MomentKind::Conj1,
        MomentKind::Conj2,
        MomentKind::State1,
        MomentKind::State2,
        MomentKind::OrthPair,
    ];

    fn operand_count(self) -> &'static [usize] {
        match self {
            MomentKind::Conj1 | MomentKind::State2 => &[2],
            MomentKind::Conj2 => &[4],
            MomentKind::State1 => &[0, 1],
            MomentKind::OrthPair => &[1],
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            MomentKind::Conj1 => "conj1",
            MomentKind::Conj2 => "conj2",
            MomentKind::State1 => "state1",
            MomentKind::State2 => "state2",
            MomentKind::OrthPair => "orth_pair",
        }
    }
}

impl fmt::Display for MomentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MomentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MomentKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::UnknownMomentKind(s.to_string()))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum MomentValue {
    Scalar(C64),
    Matrix(CMatrix),
}

impl MomentValue {
    pub fn scalar(&self) -> Option<C64> {
        match self {
            MomentValue::Scalar(z) => Some(*z),
            MomentValue::Matrix(_) => None,
        }
    }
}

fn check_operands(kind: MomentKind, operands: &[CMatrix], d: usize) -> Result<()> {
    check_dim("d", d)?;
    if !kind.operand_count().contains(&operands.len()) {
        return Err(invalid(
            "operands",
            format!(
                "{kind} takes {:?} operands, got {}",
                kind.operand_count(),
                operands.len()
            ),
        ));
    }
    for op in operands {
        if op.rows() != d || op.cols() != d {
            return Err(Error::DimensionMismatch {
                context: "moment operand",
                expected: d,
                found: if op.rows() != d { op.rows() } else { op.cols() },
            });
        }
    }
    if matches!(kind, MomentKind::Conj2 | MomentKind::OrthPair) && d < 2 {
        return Err(invalid("d", format!("{kind} needs d >= 2")));
    }
    Ok(())
}

fn tr_prod(a: &CMatrix, b: &CMatrix) -> C64 {
    a.matmul(b).expect("operands share a shape").trace()
}

/// Closed-form value of the chosen Haar integral.
///
/// `OrthPair` evaluates the general orthogonal-pair expression
/// `(Tr A)²/(d²−1) − Tr(A²)/(d(d²−1))`, which reduces to
/// `−Tr(A²)/(d(d²−1))` for traceless `A`.
pub fn analytic_moment(kind: MomentKind, operands: &[CMatrix], d: usize) -> Result<MomentValue> {
    check_operands(kind, operands, d)?;
    let df = d as f64;
    let value = match kind {
        MomentKind::Conj1 => {
            let (a, b) = (&operands[0], &operands[1]);
            a.trace() * b.trace() / df
        }
        MomentKind::Conj2 => {
            let (a, b, c, dd) = (&operands[0], &operands[1], &operands[2], &operands[3]);
            let (ta, tb, tc, td) = (a.trace(), b.trace(), c.trace(), dd.trace());
            let tac = tr_prod(a, c);
            let tbd = tr_prod(b, dd);
            let denom = df * df - 1.0;
            (ta * tb * tc * td + tac * tbd) / denom - (tac * tb * td + ta * tc * tbd) / (df * denom)
        }
        MomentKind::State1 => {
            if operands.is_empty() {
                return Ok(MomentValue::Matrix(
                    CMatrix::identity(d).scale(C64::new(1.0 / df, 0.0)),
                ));
            }
            operands[0].trace() / df
        }
        MomentKind::State2 => {
            let (a, b) = (&operands[0], &operands[1]);
            (a.trace() * b.trace() + tr_prod(a, b)) / (df * (df + 1.0))
        }
        MomentKind::OrthPair => {
            let a = &operands[0];
            let ta = a.trace();
            let denom = df * df - 1.0;
            ta * ta / denom - tr_prod(a, a) / (df * denom)
        }
    };
    Ok(MomentValue::Scalar(value))
}

/// Real and imaginary Monte-Carlo estimates of a complex-valued mean.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ComplexEstimate {
    pub re: Estimate,
    pub im: Estimate,
}

impl ComplexEstimate {
    pub fn within(&self, target: C64, k: f64) -> bool {
        self.re.within(target.re, k) && self.im.within(target.im, k)
    }

    pub fn max_z_score(&self, target: C64) -> f64 {
        self.re.z_score(target.re).max(self.im.z_score(target.im))
    }
}

fn conj_trace(w: &CMatrix, a: &CMatrix, b: &CMatrix) -> C64 {
    let wa = w.matmul(a).expect("square");
    let waw = wa.matmul(&w.adjoint()).expect("square");
    tr_prod(&waw, b)
}

/// Monte-Carlo estimate of the integral [`analytic_moment`] evaluates.
///
/// `State1` without operands is a matrix-valued integral; use
/// [`estimate_state_frame`] for it.
pub fn estimate_moment(
    kind: MomentKind,
    operands: &[CMatrix],
    d: usize,
    samples: u64,
    rng: &mut SimRng,
) -> Result<ComplexEstimate> {
    check_operands(kind, operands, d)?;
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    if kind == MomentKind::State1 && operands.is_empty() {
        return Err(invalid("operands", "matrix-valued moment; use estimate_state_frame"));
    }
    let draw = |r: &mut SimRng| -> C64 {
        match kind {
            MomentKind::Conj1 => {
                let w = haar_isometry(d, d, r);
                conj_trace(&w, &operands[0], &operands[1])
            }
            MomentKind::Conj2 => {
                let w = haar_isometry(d, d, r);
                conj_trace(&w, &operands[0], &operands[1]) * conj_trace(&w, &operands[2], &operands[3])
            }
            MomentKind::State1 => {
                let phi = haar_state(d, r).expect("checked dimension");
                phi.expectation(&operands[0]).expect("checked shape")
            }
            MomentKind::State2 => {
                let phi = haar_state(d, r).expect("checked dimension");
                phi.expectation(&operands[0]).expect("checked shape")
                    * phi.expectation(&operands[1]).expect("checked shape")
            }
            MomentKind::OrthPair => {
                let pair = orthonormal_haar_family(d, 2, r).expect("d >= 2");
                pair[0].expectation(&operands[0]).expect("checked shape")
                    * pair[1].expectation(&operands[0]).expect("checked shape")
            }
        }
    };
    let parts = par::monte_carlo_multi(samples, 2, rng, |r, out| {
        let z = draw(r);
        out[0] = z.re;
        out[1] = z.im;
    });
    Ok(ComplexEstimate {
        re: parts[0],
        im: parts[1],
    })
}

/// Entrywise Monte-Carlo estimate of ∫ |φ⟩⟨φ| dφ, row-major.
pub fn estimate_state_frame(d: usize, samples: u64, rng: &mut SimRng) -> Result<Vec<ComplexEstimate>> {
    check_dim("d", d)?;
    if samples == 0 {
        return Err(invalid("samples", "need at least one sample"));
    }
    let parts = par::monte_carlo_multi(samples, 2 * d * d, rng, |r, out| {
        let phi = haar_state(d, r).expect("checked dimension");
        let a = phi.amplitudes();
        for i in 0..d {
            for j in 0..d {
                let z = a[i] * a[j].conj();
                out[2 * (i * d + j)] = z.re;
                out[2 * (i * d + j) + 1] = z.im;
            }
        }
    });
    Ok(parts
        .chunks(2)
        .map(|p| ComplexEstimate { re: p[0], im: p[1] })
        .collect())
}
