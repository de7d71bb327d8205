//! Correlation integrals over `Y` and their intermediate-measure limits.

use serde::{Deserialize, Serialize};

use super::{accumulate, check_samples, sample_torus, stream_id, Estimate, Observable};
use crate::error::{Error, Result};
use crate::lattice::{apply_flow, lattice_from_matrix, AdmissibleSet, FlowParam, UnimodularLattice};

const TAG_JOINT: u64 = 1;
const TAG_GAP: u64 = 0x100;
const TAG_SWEEP: u64 = 0x1_0000;
const TAG_MU_I: u64 = 0x20_0000;
const TAG_HAAR: u64 = 0x40_0000;

/// Mean of `Π_s φ_s(a(t_s)Λ_B)` over uniform `B`, one shared `B` per sample.
fn product_estimate(obs: &[Observable], ts: &[FlowParam], n: u64, seed: u64, tag: u64) -> Result<Estimate> {
    check_samples(n)?;
    if obs.is_empty() || obs.len() != ts.len() {
        return Err(Error::domain(format!(
            "need matching nonempty observable and flow lists, got {} and {}",
            obs.len(),
            ts.len()
        )));
    }
    let (m, dim_n) = (ts[0].m(), ts[0].n());
    if let Some(t) = ts.iter().find(|t| (t.m(), t.n()) != (m, dim_n)) {
        return Err(Error::Dimension { expected: m + dim_n, got: t.dim() });
    }
    for o in obs {
        o.check_shape(m, dim_n)?;
    }
    let [w] = accumulate(n, |i| {
        let b = sample_torus(m, dim_n, seed, stream_id(tag, i));
        let mut prod = 1.0;
        for (o, t) in obs.iter().zip(ts) {
            prod *= o.eval(&b, t)?;
        }
        Ok([prod])
    })?;
    Ok(Estimate::from_welford(&w, seed))
}

/// `∫_Y φ∘a(t) dν`.
pub fn estimate_nu_integral(obs: &Observable, t: &FlowParam, n: u64, seed: u64) -> Result<Estimate> {
    product_estimate(std::slice::from_ref(obs), std::slice::from_ref(t), n, seed, TAG_JOINT)
}

/// `∫_Y Π_s φ_s∘a(t_s) dν`.
pub fn estimate_joint_correlation(obs: &[Observable], ts: &[FlowParam], n: u64, seed: u64) -> Result<Estimate> {
    product_estimate(obs, ts, n, seed, TAG_JOINT)
}

/// The joint integral minus the product of the single integrals.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Gap {
    pub gap: f64,
    pub stderr: f64,
    pub joint: Estimate,
    pub singles: Vec<Estimate>,
}

impl Gap {
    /// `|gap| ≤ 3·stderr`.
    pub fn noise_limited(&self) -> bool {
        self.gap.abs() <= 3.0 * self.stderr
    }

    pub fn product(&self) -> f64 {
        self.singles.iter().map(|e| e.mean).product()
    }

    pub fn max_sample(&self) -> f64 {
        self.singles.iter().map(|e| e.max_sample).fold(self.joint.max_sample, f64::max)
    }
}

fn gap_with_tag(obs: &[Observable], ts: &[FlowParam], n: u64, seed: u64, tag: u64) -> Result<Gap> {
    if obs.len() < 2 {
        return Err(Error::domain("a decorrelation gap needs at least two factors"));
    }
    let joint = product_estimate(obs, ts, n, seed, tag)?;
    let singles = obs
        .iter()
        .zip(ts)
        .enumerate()
        .map(|(s, (o, t))| {
            product_estimate(std::slice::from_ref(o), std::slice::from_ref(t), n, seed, tag + 1 + s as u64)
        })
        .collect::<Result<Vec<_>>>()?;
    let product: f64 = singles.iter().map(|e| e.mean).product();
    // delta method over independent estimates
    let mut var = joint.stderr * joint.stderr;
    for s in 0..singles.len() {
        let others: f64 = singles.iter().enumerate().filter(|&(q, _)| q != s).map(|(_, e)| e.mean).product();
        var += (others * singles[s].stderr).powi(2);
    }
    Ok(Gap { gap: joint.mean - product, stderr: var.sqrt(), joint, singles })
}

pub fn decorrelation_gap(obs: &[Observable], ts: &[FlowParam], n: u64, seed: u64) -> Result<Gap> {
    gap_with_tag(obs, ts, n, seed, TAG_GAP)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub delta: f64,
    pub gap: f64,
    pub stderr: f64,
    pub joint: f64,
    pub product: f64,
    pub max_sample: f64,
    pub n: u64,
    pub seed: u64,
    pub t_vectors: Vec<Vec<f64>>,
    pub noise_limited: bool,
}

/// Least-squares fit of `ln|gap| ≈ c − η·Δ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    pub fitted_eta: f64,
    /// `None` when only two rows were usable.
    pub fit_stderr: Option<f64>,
    pub intercept: f64,
    pub rows_used: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// `None` when fewer than two rows rise above noise.
    pub fit: Option<DecayFit>,
}

/// Fits over the rows with `|gap| > 3·stderr`.
pub fn fit_decay(rows: &[SweepRow]) -> Option<DecayFit> {
    let pts: Vec<(f64, f64)> = rows
        .iter()
        .filter(|r| r.gap.abs() > 3.0 * r.stderr && r.gap != 0.0)
        .map(|r| (r.delta, r.gap.abs().ln()))
        .collect();
    let k = pts.len();
    if k < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k as f64;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let fit_stderr = (k >= 3).then(|| {
        let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
        (ssr / (k - 2) as f64 / sxx).sqrt()
    });
    Some(DecayFit { fitted_eta: -slope, fit_stderr, intercept, rows_used: k })
}

/// One gap per `Δ` in `grid` with `t_s = base_s + s·Δ·direction`
/// (`s = 0, 1, …`), so consecutive factors sit `Δ` apart once `direction`
/// is scaled to sup-norm 1.
pub fn decay_sweep(
    obs: &[Observable],
    base: &[FlowParam],
    direction: &FlowParam,
    grid: &[f64],
    n: u64,
    seed: u64,
) -> Result<SweepResult> {
    if grid.is_empty() {
        return Err(Error::domain("the Δ grid is empty"));
    }
    if let Some(d) = grid.iter().find(|d| !(d.is_finite() && **d >= 0.0)) {
        return Err(Error::domain(format!("Δ values must be finite and nonnegative, got {d}")));
    }
    if base.len() != obs.len() {
        return Err(Error::domain(format!("{} observables but {} base parameters", obs.len(), base.len())));
    }
    let scale = direction.ceil();
    if scale <= 0.0 {
        return Err(Error::domain("sweep direction must be nonzero"));
    }
    let mut grid = grid.to_vec();
    grid.sort_by(f64::total_cmp);
    let mut rows = Vec::with_capacity(grid.len());
    for (k, &delta) in grid.iter().enumerate() {
        let ts = base
            .iter()
            .enumerate()
            .map(|(s, b)| b.add_scaled(direction, s as f64 * delta / scale))
            .collect::<Result<Vec<_>>>()?;
        let g = gap_with_tag(obs, &ts, n, seed, TAG_SWEEP + 64 * k as u64)?;
        rows.push(SweepRow {
            delta,
            gap: g.gap,
            stderr: g.stderr,
            joint: g.joint.mean,
            product: g.product(),
            max_sample: g.max_sample(),
            n,
            seed,
            t_vectors: ts.iter().map(|t| t.coords().to_vec()).collect(),
            noise_limited: g.noise_limited(),
        });
    }
    let fit = fit_decay(&rows);
    Ok(SweepResult { rows, fit })
}

/// Estimate of `∫_{X_I} φ dμ_I`, read off at the translate
/// `a(t)` with `t = FlowParam::uniform_on(I, horizon)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MuIEstimate {
    pub estimate: Estimate,
    pub horizon: f64,
    pub flow: FlowParam,
}

#[allow(non_snake_case)]
pub fn estimate_muI_integral(
    obs: &Observable,
    set: &AdmissibleSet,
    horizon: f64,
    n: u64,
    seed: u64,
) -> Result<MuIEstimate> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain(format!("horizon must be positive, got {horizon}")));
    }
    let flow = FlowParam::uniform_on(set, horizon)?;
    let tag = TAG_MU_I | set.as_set().mask() as u64;
    let estimate = product_estimate(std::slice::from_ref(obs), std::slice::from_ref(&flow), n, seed, tag)?;
    Ok(MuIEstimate { estimate, horizon, flow })
}

/// `a(t)Λ_B` with `t` equal to `horizon` on the full index set and `B`
/// uniform. Approximates Haar measure with a bias that decays in `horizon`
/// at an unspecified exponential rate.
pub fn approx_haar_sample(m: usize, n: usize, horizon: f64, seed: u64, index: u64) -> Result<UnimodularLattice> {
    let t = haar_flow(m, n, horizon)?;
    let b = sample_torus(m, n, seed, stream_id(TAG_HAAR, index));
    apply_flow(&t, &lattice_from_matrix(&b))
}

fn haar_flow(m: usize, n: usize, horizon: f64) -> Result<FlowParam> {
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::domain(format!("horizon must be positive, got {horizon}")));
    }
    FlowParam::uniform_on(&AdmissibleSet::full(m, n), horizon)
}

/// Mean of `φ` over `approx_haar_sample(m, n, horizon, seed, i)`, `i < n_samples`.
pub fn estimate_haar_integral(
    obs: &Observable,
    m: usize,
    n: usize,
    horizon: f64,
    n_samples: u64,
    seed: u64,
) -> Result<Estimate> {
    let t = haar_flow(m, n, horizon)?;
    product_estimate(std::slice::from_ref(obs), std::slice::from_ref(&t), n_samples, seed, TAG_HAAR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::shortest_vector_length;
    use crate::montecarlo::Part;
    use crate::testfns::{siegel_transform, BumpSpec};

    fn siegel2() -> Observable {
        Observable::Siegel(BumpSpec::standard(2))
    }

    fn diag(a: f64) -> FlowParam {
        FlowParam::new(1, 1, vec![a, a]).unwrap()
    }

    #[test]
    fn constant_observable_is_exact() {
        let one = Observable::Siegel(BumpSpec::new(2, 2.0, 2, 0.0).unwrap());
        let wrapped = Observable::Product { factors: vec![one, Observable::constant(1.0)] };
        let shifted = Observable::Product { factors: vec![wrapped.clone(), Observable::constant(1.0)] };
        let e = estimate_nu_integral(&Observable::constant(1.0), &diag(1.0), 100, 3).unwrap();
        assert_eq!((e.mean, e.stderr), (1.0, 0.0));
        let e = estimate_nu_integral(&shifted, &diag(1.0), 100, 3).unwrap();
        assert_eq!((e.mean, e.stderr), (0.0, 0.0));
        let j = estimate_joint_correlation(&[Observable::constant(1.0), Observable::constant(1.0)], &[diag(0.0), diag(3.0)], 50, 3).unwrap();
        assert_eq!(j.mean, 1.0);
    }

    #[test]
    fn character_integrates_to_zero() {
        let obs = Observable::Character { freq: vec![3], part: Part::Re };
        let e = estimate_nu_integral(&obs, &diag(0.0), 20_000, 11).unwrap();
        assert!(e.within(0.0, 3.0), "{e:?}");
    }

    #[test]
    fn single_factor_joint_is_nu_integral() {
        let a = estimate_nu_integral(&siegel2(), &diag(1.5), 2_000, 5).unwrap();
        let b = estimate_joint_correlation(&[siegel2()], &[diag(1.5)], 2_000, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn identical_translates_multiply_pointwise() {
        let t = diag(0.5);
        let joint = estimate_joint_correlation(&[siegel2(), siegel2()], &[t.clone(), t.clone()], 1_000, 8).unwrap();
        let square = Observable::Product { factors: vec![siegel2(), siegel2()] };
        let direct = estimate_nu_integral(&square, &t, 1_000, 8).unwrap();
        assert_eq!(joint, direct);
    }

    #[test]
    fn constant_gap_is_zero() {
        let g = decorrelation_gap(&[Observable::constant(2.0), Observable::constant(3.0)], &[diag(0.0), diag(1.0)], 100, 1).unwrap();
        assert_eq!(g.gap, 0.0);
        assert_eq!(g.stderr, 0.0);
        assert!(decorrelation_gap(&[Observable::constant(2.0)], &[diag(0.0)], 100, 1).is_err());
    }

    #[test]
    fn coincident_translates_are_correlated() {
        let g = decorrelation_gap(&[siegel2(), siegel2()], &[diag(2.0), diag(2.0)], 20_000, 17).unwrap();
        assert!(g.gap > 3.0 * g.stderr, "{g:?}");
    }

    #[test]
    fn haar_samples_are_unimodular() {
        for i in 0..50 {
            let l = approx_haar_sample(1, 1, 8.0, 2, i).unwrap();
            assert!((l.basis().determinant().abs() - 1.0).abs() < 1e-9);
            assert!(shortest_vector_length(&l).unwrap() > 0.0);
        }
    }

    #[test]
    fn haar_integral_evaluates_the_same_lattices() {
        let obs = siegel2();
        let e = estimate_haar_integral(&obs, 1, 1, 4.0, 300, 12).unwrap();
        let mut sum = 0.0;
        for i in 0..300 {
            sum += siegel_transform(&BumpSpec::standard(2), &approx_haar_sample(1, 1, 4.0, 12, i).unwrap()).unwrap();
        }
        assert!((e.mean - sum / 300.0).abs() < 1e-9);
    }

    #[test]
    fn mu_i_of_constant() {
        let set = AdmissibleSet::new(2, 1, &[1, 3]).unwrap();
        let e = estimate_muI_integral(&Observable::constant(1.0), &set, 6.0, 10, 0).unwrap();
        assert_eq!(e.estimate.mean, 1.0);
        assert_eq!(e.flow.coords(), &[6.0, 0.0, 6.0]);
        assert!(estimate_muI_integral(&Observable::constant(1.0), &set, 0.0, 10, 0).is_err());
    }

    #[test]
    fn fit_recovers_exact_exponential() {
        let rows: Vec<SweepRow> = (0..6)
            .map(|k| SweepRow {
                delta: k as f64,
                gap: 2.0 * (-0.7 * k as f64).exp(),
                stderr: 1e-6,
                joint: 0.0,
                product: 0.0,
                max_sample: 0.0,
                n: 2,
                seed: 0,
                t_vectors: vec![],
                noise_limited: false,
            })
            .collect();
        let fit = fit_decay(&rows).unwrap();
        assert!((fit.fitted_eta - 0.7).abs() < 1e-12);
        assert!(fit.fit_stderr.unwrap() < 1e-12);
        assert!(fit_decay(&rows[..2]).unwrap().fit_stderr.is_none());
        assert!(fit_decay(&rows[..1]).is_none());
    }

    #[test]
    fn tiny_sweep_is_noise_limited() {
        let r = decay_sweep(&[siegel2(), siegel2()], &[diag(0.0), diag(0.0)], &diag(1.0), &[4.0, 6.0, 8.0], 10, 1).unwrap();
        assert_eq!(r.rows.len(), 3);
        assert!(r.rows.windows(2).all(|w| w[0].delta < w[1].delta));
        assert_eq!(r.rows[2].t_vectors, vec![vec![0.0, 0.0], vec![8.0, 8.0]]);
    }

    #[test]
    fn shapes_are_checked() {
        let t21 = FlowParam::new(2, 1, vec![1.0, 0.0, 1.0]).unwrap();
        assert!(estimate_nu_integral(&siegel2(), &t21, 10, 0).is_err());
        assert!(estimate_nu_integral(&siegel2(), &diag(0.0), 1, 0).is_err());
    }
}
