//! Weak separation of a measured coordinate vector from the projected
//! separable set, via the polar reduction and an ellipsoid feasibility search.
//!
//! Let `K` be the projection of the separable states onto the traceless basis
//! elements indexed by `T`. `K` contains the ball of radius `r` about the
//! origin, so its polar `K⋆ = {c : c·x ≤ 1 ∀x ∈ K}` sits inside the ball of
//! radius `1/r`. A point `p` lies outside `K` exactly when
//! `Q_p = {c ∈ K⋆ : c·p ≥ 1}` has interior; any such `c` is a separating
//! direction, i.e. a witness `W = Σ c_i X_i`.

use std::time::{Duration, Instant};

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::basis::{dot, CoeffVector, ObservableBasis};
use crate::error::{Error, Result};
use crate::optimizer::{weak_opt_exceeding, weak_opt_oracle, OptConfig};
use crate::states::random_separable;
use crate::witness::{classify, Witness};

/// Emission re-check: separable samples may exceed the threshold by at most this.
pub const SAMPLE_SLACK: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TargetPoint {
    pub coords: CoeffVector,
    /// Weak tolerance `δ`.
    pub delta: f64,
    /// Radius `Δ` of a ball containing the true point given the error bars.
    pub error_radius: f64,
}

impl TargetPoint {
    pub fn new(coords: CoeffVector, delta: f64, error_radius: f64) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidTarget("index set T must be nonempty".into()));
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidTarget(format!("delta must be positive, got {delta}")));
        }
        if !(error_radius >= 0.0) || !error_radius.is_finite() {
            return Err(Error::InvalidTarget(format!(
                "error radius must be nonnegative, got {error_radius}"
            )));
        }
        if coords.values().iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidTarget("coordinates must be finite".into()));
        }
        Ok(Self {
            coords,
            delta,
            error_radius,
        })
    }

    pub fn indices(&self) -> &[usize] {
        self.coords.indices()
    }
}

/// Radius of the ball of separable states about `I/d`, `d = MN`, in
/// Hilbert-Schmidt distance.
pub fn separable_ball_radius(dim_a: usize, dim_b: usize) -> f64 {
    let d = (dim_a * dim_b) as f64;
    1.0 / (d * (d - 1.0)).sqrt()
}

/// `δ′ = δ·r/(1 + ‖p‖)`: the radius of the smallest ball the search must
/// still be able to find inside `Q_p`.
pub fn polar_tolerance(delta: f64, r: f64, p_norm: f64) -> f64 {
    delta * r / (1.0 + p_norm)
}

/// Answer of the polar separation oracle at `y`.
#[derive(Clone, Debug, PartialEq)]
pub enum PolarAnswer {
    /// `max_K y·x = value ≤ 1`.
    InPolar { value: f64 },
    /// `k ∈ K` with `k·y = value > 1`, so `{c : k·c ≤ 1}` separates `y` from `K⋆`.
    Cut { k: Vec<f64>, value: f64 },
    /// The maximizer did not converge and the value found does not exceed 1.
    Unverified { value: f64 },
}

/// How hard the polar oracle searches before answering.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolarSearch {
    /// Run every start and report the best value.
    Full,
    /// Stop at the first batch of starts that finds `k·y > 1`. Any such `k`
    /// gives a valid cut, and the answer is unchanged when none exists.
    #[default]
    FirstViolation,
}

pub fn ssep_polar(
    y: &CoeffVector,
    basis: &ObservableBasis,
    cfg: &OptConfig,
    search: PolarSearch,
) -> Result<PolarAnswer> {
    let r = match search {
        PolarSearch::Full => weak_opt_oracle(y, basis, cfg)?,
        PolarSearch::FirstViolation => weak_opt_exceeding(y, basis, cfg, 1.0)?,
    };
    Ok(if r.max_value > 1.0 {
        PolarAnswer::Cut {
            k: r.y.values().to_vec(),
            value: r.max_value,
        }
    } else if r.converged {
        PolarAnswer::InPolar { value: r.max_value }
    } else {
        PolarAnswer::Unverified { value: r.max_value }
    })
}

/// Answer of the `Q_p` separation oracle at `y`.
#[derive(Clone, Debug, PartialEq)]
pub enum QpAnswer {
    /// `y ∈ K⋆` and `p·y ≥ 1`; `polar_value` is `max_K y·x`.
    InQp {
        polar_value: f64,
    },
    /// Every point of `Q_p` satisfies `normal·c ≤ offset < normal·y`.
    Cut {
        normal: Vec<f64>,
        offset: f64,
        /// `max_K y·x` when the polar oracle was consulted.
        polar_value: Option<f64>,
    },
    Unverified {
        polar_value: f64,
    },
}

pub fn ssep_qp(
    y: &CoeffVector,
    p: &TargetPoint,
    basis: &ObservableBasis,
    cfg: &OptConfig,
    search: PolarSearch,
) -> Result<QpAnswer> {
    if y.indices() != p.indices() {
        return Err(Error::IndexSetMismatch);
    }
    let py = dot(p.coords.values(), y.values());
    if py < 1.0 {
        return Ok(QpAnswer::Cut {
            normal: p.coords.values().iter().map(|v| -v).collect(),
            offset: -1.0,
            polar_value: None,
        });
    }
    Ok(match ssep_polar(y, basis, cfg, search)? {
        PolarAnswer::InPolar { value } => QpAnswer::InQp { polar_value: value },
        PolarAnswer::Cut { k, value } => QpAnswer::Cut {
            normal: k,
            offset: 1.0,
            polar_value: Some(value),
        },
        PolarAnswer::Unverified { value } => QpAnswer::Unverified { polar_value: value },
    })
}

/// What a strong separation oracle reports for a query point.
#[derive(Clone, Debug, PartialEq)]
pub enum OracleAnswer {
    Inside,
    /// The feasible set lies in `{z : normal·z ≤ offset}` with `offset ≤ normal·x`.
    Cut {
        normal: Vec<f64>,
        offset: f64,
    },
    Abort(String),
}

pub trait SeparationOracle {
    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer>;
}

impl<F> SeparationOracle for F
where
    F: FnMut(&[f64]) -> Result<OracleAnswer>,
{
    fn query(&mut self, x: &[f64]) -> Result<OracleAnswer> {
        self(x)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Feasibility {
    Point(Vec<f64>),
    Empty,
    Aborted(String),
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EllipsoidStats {
    pub dimension: usize,
    pub iterations: usize,
    pub oracle_calls: usize,
    pub iteration_cap: usize,
    /// Largest observed `vol(E_{k+1}) / vol(E_k)`, computed from Cholesky log-determinants.
    pub max_volume_ratio: f64,
    /// Stopped because a cut's halfspace missed the whole ellipsoid.
    pub excluded: bool,
}

/// `⌈2n(n+1)·ln(R/δ′)⌉ + 1`.
pub fn iteration_cap(n: usize, radius: f64, floor_radius: f64) -> usize {
    let nf = n as f64;
    let bound = 2.0 * nf * (nf + 1.0) * (radius / floor_radius).ln().max(0.0);
    bound.ceil() as usize + 1
}

/// Theoretical central-cut volume ratio `n/(n+1) · (n²/(n²−1))^((n−1)/2)`.
pub fn central_cut_volume_ratio(n: usize) -> f64 {
    if n == 1 {
        return 0.5;
    }
    let nf = n as f64;
    nf / (nf + 1.0) * (nf * nf / (nf * nf - 1.0)).powf((nf - 1.0) / 2.0)
}

fn half_log_det(p: &DMatrix<f64>) -> Option<f64> {
    let chol = Cholesky::new(p.clone())?;
    let l = chol.l();
    Some((0..p.nrows()).map(|i| l[(i, i)].ln()).sum())
}

fn symmetrize(p: &mut DMatrix<f64>) {
    let t = p.transpose();
    *p += t;
    *p *= 0.5;
}

/// Central-cut ellipsoid method. Starts from the ball of radius `radius`
/// about the origin and stops with a feasible point, or with `Empty` once the
/// ellipsoid volume drops below that of a ball of radius `floor_radius`.
///
/// A cut whose halfspace does not meet the current ellipsoid also proves the
/// feasible set empty; stopping there avoids the repeated parallel cuts that
/// would otherwise flatten the shape matrix to numerical singularity.
pub fn feas_cutting_plane(
    oracle: &mut impl SeparationOracle,
    n: usize,
    radius: f64,
    floor_radius: f64,
) -> Result<(Feasibility, EllipsoidStats)> {
    if n == 0 || !(radius > 0.0) || !(floor_radius > 0.0) {
        return Err(Error::InvalidConfig("ellipsoid needs n ≥ 1 and positive radii".into()));
    }
    let nf = n as f64;
    let cap = iteration_cap(n, radius, floor_radius);
    let floor = nf * floor_radius.ln();
    let mut stats = EllipsoidStats {
        dimension: n,
        iteration_cap: cap,
        ..Default::default()
    };
    let mut omega = DVector::<f64>::zeros(n);
    let mut p = DMatrix::<f64>::identity(n, n) * (radius * radius);
    let mut hld = nf * radius.ln();

    loop {
        if hld < floor || stats.iterations >= cap {
            return Ok((Feasibility::Empty, stats));
        }
        stats.oracle_calls += 1;
        let (g, offset) = match oracle.query(omega.as_slice())? {
            OracleAnswer::Inside => return Ok((Feasibility::Point(omega.as_slice().to_vec()), stats)),
            OracleAnswer::Abort(why) => return Ok((Feasibility::Aborted(why), stats)),
            OracleAnswer::Cut { normal, offset } => (DVector::from_vec(normal), offset),
        };
        if g.len() != n {
            return Err(Error::DimensionMismatch {
                expected: (n, 1),
                found: (g.len(), 1),
            });
        }
        let pg = &p * &g;
        let gpg = g.dot(&pg);
        let width = gpg.max(0.0).sqrt();
        // min over the ellipsoid of g·z is g·ω − √(gᵀPg)
        if offset < g.dot(&omega) - width * (1.0 + 1e-9) {
            stats.excluded = true;
            return Ok((Feasibility::Empty, stats));
        }
        if !(gpg > 0.0) || !gpg.is_finite() {
            return Ok((Feasibility::Aborted("degenerate cut: gᵀPg ≤ 0".into()), stats));
        }
        let gt = pg / width;
        if n == 1 {
            omega -= &gt * 0.5;
            p *= 0.25;
        } else {
            omega -= &gt / (nf + 1.0);
            p = (&p - (&gt * gt.transpose()) * (2.0 / (nf + 1.0))) * (nf * nf / (nf * nf - 1.0));
        }
        symmetrize(&mut p);
        let next = match half_log_det(&p) {
            Some(v) => v,
            None => {
                return Ok((
                    Feasibility::Aborted("shape matrix lost positive definiteness".into()),
                    stats,
                ))
            }
        };
        stats.max_volume_ratio = stats.max_volume_ratio.max((next - hld).exp());
        hld = next;
        stats.iterations += 1;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    #[default]
    Ellipsoid,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub opt: OptConfig,
    pub engine: Engine,
    pub polar_search: PolarSearch,
    /// Random separable states used to re-check a witness before emission.
    pub verification_samples: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            opt: OptConfig::default(),
            engine: Engine::Ellipsoid,
            polar_search: PolarSearch::default(),
            verification_samples: 1000,
        }
    }
}

#[derive(Clone, Debug)]
pub enum SeparationVerdict {
    /// `c·x ≤ threshold` on every separable `x` while `c·p > threshold`.
    Witness {
        c: CoeffVector,
        threshold: f64,
        tightened: Witness,
        /// `(c·p − threshold)/‖c‖`.
        margin: f64,
    },
    /// `p` lies within `delta_effective` of the projected separable set.
    Member {
        delta_effective: f64,
    },
    Unverified {
        reason: String,
    },
}

impl SeparationVerdict {
    pub fn outcome(&self) -> &'static str {
        match self {
            SeparationVerdict::Witness { .. } => "witness",
            SeparationVerdict::Member { .. } => "member",
            SeparationVerdict::Unverified { .. } => "unverified",
        }
    }

    pub fn is_witness(&self) -> bool {
        matches!(self, SeparationVerdict::Witness { .. })
    }

    pub fn is_member(&self) -> bool {
        matches!(self, SeparationVerdict::Member { .. })
    }
}

/// Outcome of the emission re-check on a candidate witness.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Reverification {
    pub passed: bool,
    pub margin_at_p: f64,
    /// `min threshold − c·x` over the separable samples.
    pub worst_sample_slack: f64,
    pub samples: usize,
}

#[derive(Clone, Debug)]
pub struct WsepReport {
    pub verdict: SeparationVerdict,
    pub stats: EllipsoidStats,
    /// The verdict would plausibly flip within `2δ`.
    pub boundary: bool,
    pub reverification: Option<Reverification>,
    pub floor_radius: f64,
    pub initial_radius: f64,
    pub wall_time: Duration,
}

/// Check `c·p > threshold` and `threshold − c·x ≥ −SAMPLE_SLACK` on random
/// separable mixtures `x`.
pub fn reverify(
    c: &CoeffVector,
    threshold: f64,
    p: &TargetPoint,
    basis: &ObservableBasis,
    samples: usize,
    seed: u64,
) -> Result<Reverification> {
    let (m, n) = basis.dims();
    let margin_at_p = c.dot(&p.coords)? - threshold;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5a5a_5a5a);
    let w = basis.devectorize(c, 0.0)?;
    let mut worst = f64::INFINITY;
    for _ in 0..samples {
        let terms = rng.random_range(1..=4);
        let sigma = random_separable(&mut rng, m, n, terms)?;
        let cx = w.hs_inner(sigma.op())?;
        worst = worst.min(threshold - cx);
    }
    Ok(Reverification {
        passed: margin_at_p > 0.0 && worst >= -SAMPLE_SLACK,
        margin_at_p,
        worst_sample_slack: worst,
        samples,
    })
}

/// Weak separation of `p` from the projection of the separable set onto the
/// basis elements indexed by `p`.
pub fn wsep(p: &TargetPoint, basis: &ObservableBasis, cfg: &SolverConfig) -> Result<WsepReport> {
    let start = Instant::now();
    cfg.opt.validate()?;
    let len = basis.len();
    if let Some(&i) = p.indices().iter().find(|&&i| i >= len) {
        return Err(Error::IndexOutOfRange { index: i, len });
    }
    let (m, n) = basis.dims();
    let dim = p.coords.len();
    let r = separable_ball_radius(m, n);
    let radius = 1.0 / r;
    let p_norm = p.coords.norm();
    let floor_radius = polar_tolerance(p.delta, r, p_norm);

    let indices = p.indices().to_vec();
    let mut support_estimate = f64::NEG_INFINITY;
    let mut found_value = f64::NEG_INFINITY;
    let mut oracle = |x: &[f64]| -> Result<OracleAnswer> {
        let y = CoeffVector::new(indices.clone(), x.to_vec())?;
        let ans = ssep_qp(&y, p, basis, &cfg.opt, cfg.polar_search)?;
        let polar_value = match &ans {
            QpAnswer::InQp { polar_value } | QpAnswer::Unverified { polar_value } => Some(*polar_value),
            QpAnswer::Cut { polar_value, .. } => *polar_value,
        };
        if let Some(b) = polar_value {
            let yn = y.norm();
            if yn > 0.0 {
                let py = dot(p.coords.values(), x);
                support_estimate = support_estimate.max((py - b) / yn);
            }
        }
        Ok(match ans {
            QpAnswer::InQp { polar_value } => {
                found_value = polar_value;
                OracleAnswer::Inside
            }
            QpAnswer::Cut { normal, offset, .. } => OracleAnswer::Cut { normal, offset },
            QpAnswer::Unverified { polar_value } => OracleAnswer::Abort(format!(
                "product-state optimizer did not converge at a query point (value {polar_value:.6})"
            )),
        })
    };
    let (feas, stats) = match cfg.engine {
        Engine::Ellipsoid => feas_cutting_plane(&mut oracle, dim, radius, floor_radius)?,
    };

    let mut reverification = None;
    let (verdict, boundary) = match feas {
        Feasibility::Empty => (
            SeparationVerdict::Member {
                delta_effective: p.delta + p.error_radius,
            },
            support_estimate > -2.0 * p.delta,
        ),
        Feasibility::Aborted(reason) => (SeparationVerdict::Unverified { reason }, false),
        Feasibility::Point(x) => {
            let c = CoeffVector::new(indices.clone(), x)?;
            let w = basis.devectorize(&c, 0.0)?;
            let tightened = classify(&w, &cfg.opt.escalated())?;
            let threshold = tightened.b_star.unwrap_or(found_value).max(found_value);
            let check = reverify(&c, threshold, p, basis, cfg.verification_samples, cfg.opt.seed)?;
            let margin = check.margin_at_p / c.norm();
            let passed = check.passed && tightened.verified;
            let reason = if !tightened.verified {
                "escalated optimizer did not converge on the tightened witness".to_string()
            } else {
                format!(
                    "witness failed re-verification (margin at p {:.3e}, worst sample slack {:.3e})",
                    check.margin_at_p, check.worst_sample_slack
                )
            };
            reverification = Some(check);
            if passed {
                (
                    SeparationVerdict::Witness {
                        c,
                        threshold,
                        tightened,
                        margin,
                    },
                    margin < 2.0 * p.delta,
                )
            } else {
                (SeparationVerdict::Unverified { reason }, false)
            }
        }
    };

    Ok(WsepReport {
        verdict,
        stats,
        boundary,
        reverification,
        floor_radius,
        initial_radius: radius,
        wall_time: start.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{expectation, werner, BellState};

    fn basis22() -> ObservableBasis {
        ObservableBasis::build(2, 2).unwrap()
    }

    fn cfg() -> OptConfig {
        OptConfig::default()
    }

    #[test]
    fn polar_examples() {
        let b = basis22();
        let zero = CoeffVector::zeros(vec![5]).unwrap();
        assert!(matches!(
            ssep_polar(&zero, &b, &cfg(), PolarSearch::Full).unwrap(),
            PolarAnswer::InPolar { .. }
        ));
        let three = CoeffVector::new(vec![5], vec![3.0]).unwrap();
        match ssep_polar(&three, &b, &cfg(), PolarSearch::Full).unwrap() {
            PolarAnswer::Cut { k, value } => {
                assert!((value - 1.5).abs() < 1e-9);
                assert!((k[0] - 0.5).abs() < 1e-9);
            }
            other => panic!("{other:?}"),
        }
        let one = CoeffVector::unit(vec![5], 5).unwrap();
        match ssep_polar(&one, &b, &cfg(), PolarSearch::Full).unwrap() {
            PolarAnswer::InPolar { value } => assert!((value - 0.5).abs() < 1e-9),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn first_violation_search() {
        let b = basis22();
        let three = CoeffVector::new(vec![5], vec![3.0]).unwrap();
        match ssep_polar(&three, &b, &cfg(), PolarSearch::FirstViolation).unwrap() {
            PolarAnswer::Cut { value, .. } => assert!(value > 1.0 && value <= 1.5 + 1e-12),
            other => panic!("{other:?}"),
        }
        let one = CoeffVector::unit(vec![5], 5).unwrap();
        assert_eq!(
            ssep_polar(&one, &b, &cfg(), PolarSearch::FirstViolation).unwrap(),
            ssep_polar(&one, &b, &cfg(), PolarSearch::Full).unwrap()
        );
    }

    #[test]
    fn polar_cuts_hold_on_separable_samples() {
        let b = basis22();
        let t = vec![5, 10, 15];
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for trial in 0..5 {
            let vals: Vec<f64> = (0..3).map(|_| rng.random_range(-4.0..4.0)).collect();
            let y = CoeffVector::new(t.clone(), vals).unwrap();
            if let PolarAnswer::Cut { k, value } = ssep_polar(&y, &b, &cfg(), PolarSearch::Full).unwrap() {
                assert!(value > 1.0, "trial {trial}");
                let kc = CoeffVector::new(t.clone(), k).unwrap();
                assert!((kc.dot(&y).unwrap() - value).abs() < 1e-12);
                for _ in 0..100 {
                    let s = random_separable(&mut rng, 2, 2, 3).unwrap();
                    let x = b.vectorize_on(s.op(), &t).unwrap();
                    assert!(y.dot(&x).unwrap() <= value + 1e-9);
                }
            }
        }
    }

    #[test]
    fn qp_examples() {
        let b = basis22();
        let p = TargetPoint::new(CoeffVector::new(vec![5], vec![2.0]).unwrap(), 0.01, 0.0).unwrap();
        let zero = CoeffVector::zeros(vec![5]).unwrap();
        match ssep_qp(&zero, &p, &b, &cfg(), PolarSearch::Full).unwrap() {
            QpAnswer::Cut { normal, offset, .. } => {
                assert_eq!(normal, vec![-2.0]);
                assert_eq!(offset, -1.0);
            }
            other => panic!("{other:?}"),
        }
        // p·y = 2 ≥ 1 and b(y) = 1/2 ≤ 1
        let y = CoeffVector::unit(vec![5], 5).unwrap();
        assert!(matches!(
            ssep_qp(&y, &p, &b, &cfg(), PolarSearch::Full).unwrap(),
            QpAnswer::InQp { .. }
        ));
        // y = 3e: p·y ≥ 1 but b = 3/2 > 1
        let y = CoeffVector::new(vec![5], vec![3.0]).unwrap();
        assert!(
            matches!(ssep_qp(&y, &p, &b, &cfg(), PolarSearch::Full).unwrap(), QpAnswer::Cut { offset, .. } if offset == 1.0)
        );
        let wrong = CoeffVector::zeros(vec![10]).unwrap();
        assert!(ssep_qp(&wrong, &p, &b, &cfg(), PolarSearch::Full).is_err());
    }

    #[test]
    fn ellipsoid_finds_ball() {
        let mut oracle = |x: &[f64]| -> Result<OracleAnswer> {
            let nrm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            Ok(if nrm <= 0.3 {
                OracleAnswer::Inside
            } else {
                OracleAnswer::Cut {
                    normal: x.to_vec(),
                    offset: 0.3 * nrm,
                }
            })
        };
        let (res, stats) = feas_cutting_plane(&mut oracle, 3, 1.0, 1e-3).unwrap();
        assert!(matches!(res, Feasibility::Point(_)));
        assert_eq!(stats.oracle_calls, 1);
        assert!(stats.iterations <= stats.iteration_cap);
    }

    #[test]
    fn ellipsoid_finds_offset_ball() {
        let centre = [0.5, -0.4, 0.2];
        let mut oracle = |x: &[f64]| -> Result<OracleAnswer> {
            let d: Vec<f64> = x.iter().zip(centre).map(|(a, b)| a - b).collect();
            let nrm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
            // central cuts only
            Ok(if nrm <= 0.05 {
                OracleAnswer::Inside
            } else {
                let offset = d.iter().zip(x).map(|(a, b)| a * b).sum();
                OracleAnswer::Cut { normal: d, offset }
            })
        };
        let (res, stats) = feas_cutting_plane(&mut oracle, 3, 1.0, 1e-3).unwrap();
        let Feasibility::Point(x) = res else { panic!("{res:?}") };
        let d: f64 = x.iter().zip(centre).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        assert!(d <= 0.05);
        assert!(stats.max_volume_ratio <= central_cut_volume_ratio(3) + 1e-9);
    }

    #[test]
    fn ellipsoid_reports_empty() {
        for n in [1, 2, 5] {
            // central cuts toward +x_0 carry no exclusion information
            let mut oracle = |x: &[f64]| -> Result<OracleAnswer> {
                let mut g = vec![0.0; n];
                g[0] = 1.0;
                Ok(OracleAnswer::Cut {
                    normal: g,
                    offset: x[0],
                })
            };
            let (res, stats) = feas_cutting_plane(&mut oracle, n, 1.0, 1e-2).unwrap();
            assert_eq!(res, Feasibility::Empty);
            assert!(!stats.excluded);
            assert!(stats.iterations <= stats.iteration_cap);
            let bound = (-1.0 / (2.0 * (n as f64 + 1.0))).exp();
            assert!(
                stats.max_volume_ratio <= bound + 1e-6,
                "n={n}: {}",
                stats.max_volume_ratio
            );
            assert!((stats.max_volume_ratio - central_cut_volume_ratio(n)).abs() < 1e-9);
        }
    }

    #[test]
    fn ellipsoid_rejects_thin_slab() {
        // |x_0 − c| ≤ w/2 has area ≤ 2w inside the unit disc, below a 0.01-disc
        let (c, w) = (0.2 + 1e-3 * std::f64::consts::E, 1e-9);
        let mut oracle = |x: &[f64]| -> Result<OracleAnswer> {
            Ok(if x[0] > c + w / 2.0 {
                OracleAnswer::Cut {
                    normal: vec![1.0, 0.0],
                    offset: c + w / 2.0,
                }
            } else if x[0] < c - w / 2.0 {
                OracleAnswer::Cut {
                    normal: vec![-1.0, 0.0],
                    offset: -(c - w / 2.0),
                }
            } else {
                OracleAnswer::Inside
            })
        };
        let (res, stats) = feas_cutting_plane(&mut oracle, 2, 1.0, 1e-2).unwrap();
        assert_eq!(res, Feasibility::Empty);
        assert!(stats.iterations <= stats.iteration_cap);
    }

    #[test]
    fn cap_formula() {
        assert_eq!(iteration_cap(1, 1.0, 1.0), 1);
        let cap = iteration_cap(2, 1.0, 0.01);
        assert_eq!(cap, (12.0 * 100f64.ln()).ceil() as usize + 1);
        assert!(central_cut_volume_ratio(15) < (-1.0f64 / 32.0).exp());
    }

    #[test]
    fn target_validation() {
        let c = CoeffVector::new(vec![5], vec![0.1]).unwrap();
        assert!(TargetPoint::new(c.clone(), 0.0, 0.0).is_err());
        assert!(TargetPoint::new(c.clone(), 0.01, -1.0).is_err());
        assert!(TargetPoint::new(CoeffVector::zeros(vec![]).unwrap(), 0.01, 0.0).is_err());
        assert!(TargetPoint::new(c, 0.01, 0.0).is_ok());
    }

    fn werner_point(pw: f64, t: &[usize]) -> TargetPoint {
        let b = basis22();
        let rho = werner(pw, BellState::PsiPlus).unwrap();
        TargetPoint::new(b.vectorize_on(rho.op(), t).unwrap(), 0.01, 0.0).unwrap()
    }

    #[test]
    fn werner_partial_information() {
        let b = basis22();
        let t = [5, 10];
        let p = werner_point(0.9, &t);
        assert!((p.coords.values()[0] - 0.45).abs() < 1e-12);
        let rep = wsep(&p, &b, &SolverConfig::default()).unwrap();
        let SeparationVerdict::Witness { c, threshold, .. } = &rep.verdict else {
            panic!("{:?}", rep.verdict)
        };
        // the detected direction is σ1σ1 − σ2σ2 up to scale
        let v = c.values();
        assert!(v[0] > 0.0 && v[1] < 0.0);
        assert!(c.dot(&p.coords).unwrap() > *threshold);
        assert!(rep.reverification.as_ref().unwrap().passed);

        let rep = wsep(&werner_point(0.4, &t), &b, &SolverConfig::default()).unwrap();
        assert!(rep.verdict.is_member(), "{:?}", rep.verdict);
        assert!(rep.stats.iterations <= rep.stats.iteration_cap);
    }

    #[test]
    fn werner_full_information() {
        let b = basis22();
        let p = werner_point(0.6, &b.full_indices());
        let rep = wsep(&p, &b, &SolverConfig::default()).unwrap();
        assert!(rep.verdict.is_witness(), "{:?}", rep.verdict);
        let rho = werner(0.6, BellState::PsiPlus).unwrap();
        assert!(!crate::states::ppt_check(&rho).unwrap().is_ppt);
        if let SeparationVerdict::Witness { tightened, .. } = &rep.verdict {
            let val = expectation(&tightened.op, &rho).unwrap();
            assert!(val > tightened.b_star.unwrap());
        }
    }

    #[test]
    fn origin_is_a_member() {
        let b = basis22();
        let p = TargetPoint::new(CoeffVector::zeros(vec![5, 10]).unwrap(), 0.01, 0.0).unwrap();
        let rep = wsep(&p, &b, &SolverConfig::default()).unwrap();
        assert!(rep.verdict.is_member(), "{:?}", rep.verdict);
        assert!(rep.stats.excluded);
        assert_eq!(rep.stats.oracle_calls, 1);
    }

    #[test]
    fn member_reports_effective_delta() {
        let b = basis22();
        let mut p = werner_point(0.2, &[5, 10]);
        p.error_radius = 0.03;
        let rep = wsep(&p, &b, &SolverConfig::default()).unwrap();
        match rep.verdict {
            SeparationVerdict::Member { delta_effective } => assert!((delta_effective - 0.04).abs() < 1e-15),
            other => panic!("{other:?}"),
        }
    }
}
