use crate::dyadic::{block_norm_groups, chemin_lerner_from_blocks, BesovSpec, BlockNorms, DyadicPartition};
use crate::spectral::{SpectralField, VectorField};
use crate::weight::weight_table;
use crate::{Error, Result, Scalar};

use super::snapshot::Snapshot;

/// Regularity indices of the monitored norms for given `(n, p, s)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Indices<T> {
    /// `(n−1)/p + 1 − s`: the `L̃^∞` index of `Ψ`.
    pub main: T,
    /// `(n−1)/p`: the index of `θ̇` and of the `L¹` parts of `X`, `Y`.
    pub critical: T,
    /// `(n−1)/p − s`: the `L̃^∞` index of `X`, `Y`.
    pub low: T,
    /// `(n−1)/p + 1`: the `L¹` index of `Ψ`.
    pub high: T,
}

impl<T: Scalar> Indices<T> {
    pub fn new(n: usize, p: T, s: T) -> Self {
        let critical = T::c((n - 1) as f64) / p;
        Self {
            main: critical + T::one() - s,
            critical,
            low: critical - s,
            high: critical + T::one(),
        }
    }
}

/// Block tables of one state at one radius.
#[derive(Clone, Debug)]
pub struct Sample<T> {
    /// `v_Φ` (all components)
    pub all: BlockNorms<T>,
    /// `v^h_Φ`
    pub horizontal: BlockNorms<T>,
    /// `v^n_Φ`
    pub vertical: BlockNorms<T>,
    /// `∂_n v^h_Φ`
    pub dn_horizontal: BlockNorms<T>,
}

fn norm<T: Scalar>(b: &BlockNorms<T>, sigma: T) -> T {
    b.weighted_sum(sigma, T::c(0.5), T::one())
}

impl<T: Scalar> Sample<T> {
    pub fn measure(v: &VectorField<T>, radius: T, p: T, part: &DyadicPartition<T>) -> Result<Self> {
        let grid = part.grid();
        let n = grid.dim();
        let w = weight_table(grid, radius)?;
        let fields: Vec<&SpectralField<T>> = v.components().iter().collect();
        let all: Vec<usize> = (0..n).collect();
        let hor: Vec<usize> = (0..n - 1).collect();
        let mut tables = block_norm_groups(&fields, &[all, hor.clone(), vec![n - 1]], part, p, Some(&w))?;
        let dn: Vec<T> = (0..grid.vertical_len()).map(|z| w[z] * grid.vertical_radius(z)).collect();
        let dn_horizontal = block_norm_groups(&fields[..n - 1], &[hor], part, p, Some(&dn))?.remove(0);
        let vertical = tables.pop().expect("three groups");
        let horizontal = tables.pop().expect("three groups");
        let all = tables.pop().expect("three groups");
        Ok(Self {
            all,
            horizontal,
            vertical,
            dn_horizontal,
        })
    }

    /// `‖v^n_Φ‖_{Ḃ^{(n−1)/p,1/2}_{p,1}}`, the integrand of `θ`.
    pub fn theta_rate(&self, idx: &Indices<T>) -> T {
        norm(&self.vertical, idx.critical)
    }

    /// Integrand of the cross term of `Ψ`:
    /// `‖v^n_Φ‖_{Ḃ^{(n−1)/p,1/2}} · ‖∂_n v^h_Φ‖_{Ḃ^{(n−1)/p+1−s,1/2}}`.
    pub fn cross_rate(&self, idx: &Indices<T>) -> T {
        norm(&self.vertical, idx.critical) * norm(&self.dn_horizontal, idx.main)
    }
}

/// Running accumulators behind `Ψ`, `X` and `Y`.
///
/// At sample `i` the `L̃^∞` parts cover samples `0..=i`; the time integrals
/// use the left rectangle rule and cover `[0, t_i)`, i.e. samples `0..i`.
#[derive(Clone, Debug)]
pub struct Accumulators<T> {
    idx: Indices<T>,
    eps: T,
    sup_all: Option<BlockNorms<T>>,
    sup_h: Option<BlockNorms<T>>,
    sup_n: Option<BlockNorms<T>>,
    pub l1_all: T,
    pub l1_h: T,
    pub l1_n: T,
    pub cross: T,
}

/// Values of the monitored functionals at one time.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Functionals<T> {
    pub psi: T,
    pub x: T,
    pub y: T,
    pub bh_main: T,
    pub bn_main: T,
    pub l1_accum: T,
    pub cross_accum: T,
    pub theta_rate: T,
}

impl<T: Scalar> Accumulators<T> {
    pub fn new(idx: Indices<T>, eps: T) -> Self {
        Self {
            idx,
            eps,
            sup_all: None,
            sup_h: None,
            sup_n: None,
            l1_all: T::zero(),
            l1_h: T::zero(),
            l1_n: T::zero(),
            cross: T::zero(),
        }
    }

    fn fold_max(slot: &mut Option<BlockNorms<T>>, b: &BlockNorms<T>) {
        match slot {
            Some(acc) => acc.combine(b, T::max),
            None => *slot = Some(b.clone()),
        }
    }

    /// Folds the sample into the `L̃^∞` parts and returns the functionals at its time.
    pub fn observe(&mut self, sample: &Sample<T>) -> Functionals<T> {
        Self::fold_max(&mut self.sup_all, &sample.all);
        Self::fold_max(&mut self.sup_h, &sample.horizontal);
        Self::fold_max(&mut self.sup_n, &sample.vertical);
        let idx = &self.idx;
        let sup = |b: &Option<BlockNorms<T>>, sigma| norm(b.as_ref().expect("folded"), sigma);
        let psi = sup(&self.sup_all, idx.main) + self.l1_all + self.cross;
        let x = self.eps * (sup(&self.sup_h, idx.low) + self.l1_h);
        let y = sup(&self.sup_n, idx.low) + self.l1_n;
        Functionals {
            psi,
            x,
            y,
            bh_main: norm(&sample.horizontal, idx.main),
            bn_main: norm(&sample.vertical, idx.main),
            l1_accum: self.l1_all,
            cross_accum: self.cross,
            theta_rate: sample.theta_rate(idx),
        }
    }

    /// Adds `dt` times the sample to the time integrals.
    pub fn integrate(&mut self, sample: &Sample<T>, dt: T) {
        let idx = self.idx;
        self.l1_all = self.l1_all + dt * norm(&sample.all, idx.high);
        self.l1_h = self.l1_h + dt * norm(&sample.horizontal, idx.critical);
        self.l1_n = self.l1_n + dt * norm(&sample.vertical, idx.critical);
        self.cross = self.cross + dt * sample.cross_rate(&idx);
    }
}

/// One row of the diagnostic trace.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceRow<T> {
    pub t: T,
    pub radius: T,
    pub theta: T,
    pub energy: T,
    pub div_residual: T,
    pub bh_main: T,
    pub bn_main: T,
    pub l1_accum: T,
    pub cross_accum: T,
    pub x: T,
    pub y: T,
    pub psi: T,
    /// `‖v^n_Φ‖_{Ḃ^{(n−1)/p,1/2}_{p,1}}` at this time (`θ̇`).
    pub theta_rate: T,
}

impl<T: Scalar> TraceRow<T> {
    pub const COLUMNS: [&'static str; 12] = [
        "t",
        "radius",
        "theta",
        "energy",
        "div_residual",
        "Bh_main",
        "Bn_main",
        "L1_accum",
        "cross_accum",
        "X",
        "Y",
        "Psi",
    ];

    /// Values in [`Self::COLUMNS`] order.
    pub fn values(&self) -> [T; 12] {
        [
            self.t,
            self.radius,
            self.theta,
            self.energy,
            self.div_residual,
            self.bh_main,
            self.bn_main,
            self.l1_accum,
            self.cross_accum,
            self.x,
            self.y,
            self.psi,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite()) && self.theta_rate.is_finite()
    }
}

/// Time-ordered diagnostic rows, one per step (including `t = 0`).
#[derive(Clone, Debug, Default, PartialEq)]
pub struct DiagnosticTrace<T> {
    pub rows: Vec<TraceRow<T>>,
}

impl<T: Scalar> DiagnosticTrace<T> {
    pub fn psi0(&self) -> Option<T> {
        self.rows.first().map(|r| r.psi)
    }

    pub fn sup_psi(&self) -> T {
        self.rows.iter().fold(T::zero(), |a, r| a.max(r.psi))
    }

    pub fn sup_xy(&self) -> T {
        self.rows.iter().fold(T::zero(), |a, r| a.max(r.x + r.y))
    }

    pub fn last(&self) -> Option<&TraceRow<T>> {
        self.rows.last()
    }

    /// `θ` rebuilt from the logged rates with the left rectangle rule.
    pub fn theta_from_rates(&self) -> Vec<T> {
        let mut theta = T::zero();
        let mut out = Vec::with_capacity(self.rows.len());
        for (i, r) in self.rows.iter().enumerate() {
            out.push(theta);
            if let Some(next) = self.rows.get(i + 1) {
                theta = theta + (next.t - r.t) * r.theta_rate;
            }
        }
        out
    }
}

/// Trace energy: `½(‖v^h‖² + ε^{−2}‖v^n‖²)` for `ε > 0`, `½‖v‖²` at `ε = 0`.
///
/// For `ε > 0` this is the energy of the unscaled velocity (up to the
/// volume factor) and is nonincreasing along exact solutions.
pub fn energy<T: Scalar>(v: &VectorField<T>, eps: T) -> T {
    let h = v.horizontal().iter().fold(T::zero(), |a, c| a + c.l2_norm().powi(2));
    let n = v.vertical().l2_norm().powi(2);
    let weight = if eps > T::zero() { (eps * eps).recip() } else { T::one() };
    T::c(0.5) * (h + weight * n)
}

fn uniform_spacing<T: Scalar>(snaps: &[Snapshot<T>]) -> Result<T> {
    if snaps.len() < 2 {
        return Ok(T::zero());
    }
    let dt = snaps[1].t - snaps[0].t;
    if !(dt > T::zero()) {
        return Err(Error::InvalidArgument("snapshot times must increase".into()));
    }
    for w in snaps.windows(2) {
        if ((w[1].t - w[0].t) - dt).abs() > T::c(1e-9) * dt.max(T::one()) {
            return Err(Error::InvalidArgument("snapshots must be equally spaced".into()));
        }
    }
    Ok(dt)
}

fn measure_all<T: Scalar>(snaps: &[Snapshot<T>], p: T, part: &DyadicPartition<T>) -> Result<Vec<Sample<T>>> {
    if snaps.is_empty() {
        return Err(Error::InvalidArgument("no snapshots".into()));
    }
    snaps.iter().map(|s| Sample::measure(&s.v, s.radius, p, part)).collect()
}

fn l1<T: Scalar>(tables: Vec<BlockNorms<T>>, dt: T, sigma: T) -> Result<T> {
    if tables.len() < 2 {
        return Ok(T::zero());
    }
    let spec = BesovSpec::new(sigma, T::c(0.5), T::one(), T::one()).with_rho(T::one());
    chemin_lerner_from_blocks(&tables, dt, &spec)
}

fn sup<T: Scalar>(tables: Vec<BlockNorms<T>>, sigma: T) -> Result<T> {
    let spec = BesovSpec::new(sigma, T::c(0.5), T::one(), T::one()).with_rho(T::infinity());
    chemin_lerner_from_blocks(&tables, T::one(), &spec)
}

/// `Ψ` at the last snapshot, recomputed from equally spaced snapshots:
///
/// ```text
/// Ψ = ‖v_Φ‖_{L̃^∞(Ḃ^{(n−1)/p+1−s,1/2}_{p,1})} + ‖v_Φ‖_{L¹(Ḃ^{(n−1)/p+1,1/2}_{p,1})}
///   + ∫ ‖v^n_Φ‖_{Ḃ^{(n−1)/p,1/2}_{p,1}} ‖∂_n v^h_Φ‖_{Ḃ^{(n−1)/p+1−s,1/2}_{p,1}} dτ
/// ```
///
/// Each snapshot is weighted at its own recorded radius; `s` comes from the
/// snapshot headers.
pub fn compute_psi<T: Scalar>(snaps: &[Snapshot<T>], p: T, part: &DyadicPartition<T>) -> Result<T> {
    let samples = measure_all(snaps, p, part)?;
    let dt = uniform_spacing(snaps)?;
    let idx = Indices::new(part.grid().dim(), p, snaps[0].s);
    let main = sup(samples.iter().map(|s| s.all.clone()).collect(), idx.main)?;
    let high = l1(samples.iter().map(|s| s.all.clone()).collect(), dt, idx.high)?;
    let cross = samples[..samples.len() - 1]
        .iter()
        .fold(T::zero(), |a, s| a + dt * s.cross_rate(&idx));
    Ok(main + high + cross)
}

/// `(X, Y)` at the last snapshot:
/// `X = ε(‖v^h_Φ‖_{L̃^∞(Ḃ^{(n−1)/p−s,1/2}_{p,1})} + ‖v^h_Φ‖_{L¹(Ḃ^{(n−1)/p,1/2}_{p,1})})`,
/// `Y` the same for `v^n` without the factor `ε`.
pub fn compute_xy<T: Scalar>(snaps: &[Snapshot<T>], p: T, part: &DyadicPartition<T>) -> Result<(T, T)> {
    let samples = measure_all(snaps, p, part)?;
    let dt = uniform_spacing(snaps)?;
    let idx = Indices::new(part.grid().dim(), p, snaps[0].s);
    let eps = snaps[0].eps;
    let h = |s: &Sample<T>| s.horizontal.clone();
    let v = |s: &Sample<T>| s.vertical.clone();
    let x = eps
        * (sup(samples.iter().map(h).collect(), idx.low)? + l1(samples.iter().map(h).collect(), dt, idx.critical)?);
    let y = sup(samples.iter().map(v).collect(), idx.low)? + l1(samples.iter().map(v).collect(), dt, idx.critical)?;
    Ok((x, y))
}
