use crate::{Error, Result, Scalar};

/// Which right-hand side is integrated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum System {
    /// The ε-rescaled system with pressure gradient `(∇_h q, ε²∂_n q)` and
    /// dissipation `D_ε^s`.
    Rescaled,
    /// The `ε = 0` limit: `−Δ_h q = Σ∂_i∂_j(v^iv^j)`, no pressure in the
    /// vertical equation, dissipation `D_h^s`. The configured `ε` is ignored.
    Limiting,
}

impl System {
    pub fn name(self) -> &'static str {
        match self {
            System::Rescaled => "rescaled",
            System::Limiting => "limiting",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "rescaled" => Some(System::Rescaled),
            "limiting" => Some(System::Limiting),
            _ => None,
        }
    }
}

/// Initial-data profile `v₀`, rescaled to the configured smallness `η`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// A two-scale cellular flow in the `(x₁, x_n)` plane plus a weak
    /// horizontal swirl; see [`super::standard_profile`].
    Standard,
    /// Seeded random divergence-free data with a Gaussian spectrum.
    Random { seed: u64 },
}

impl Profile {
    pub fn name(&self) -> String {
        match self {
            Profile::Standard => "standard".into(),
            Profile::Random { seed } => format!("random:{seed}"),
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        if s == "standard" {
            return Some(Profile::Standard);
        }
        let seed = s.strip_prefix("random:")?.parse().ok()?;
        Some(Profile::Random { seed })
    }
}

/// Run parameters. Defaults: `n = 3`, grid `32²×64`, `s = 1.5`, `p = 1`,
/// `ε = 1/4`, `dt = 10⁻³`, `T = 1`, `α = 1`, `λ = 20`, snapshots every 10 steps.
#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub sizes: Vec<usize>,
    pub s: T,
    pub p: T,
    pub eps: T,
    pub dt: T,
    pub t_end: T,
    pub alpha: T,
    pub lambda: T,
    pub profile: Profile,
    /// Smallness of the data: `max` of `‖e^{αD_n}v₀‖` in
    /// `Ḃ^{(n−1)/p−s,1/2}_{p,1}` and `Ḃ^{(n−1)/p+1−s,1/2}_{p,1}`.
    pub eta: T,
    /// Bootstrap guard: the run stops once `Ψ > η₁` or `X + Y > η₁`.
    pub eta1: Option<T>,
    pub snapshot_every: usize,
    pub system: System,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            sizes: vec![32, 32, 64],
            s: T::c(1.5),
            p: T::one(),
            eps: T::c(0.25),
            dt: T::c(1e-3),
            t_end: T::one(),
            alpha: T::one(),
            lambda: T::c(20.0),
            profile: Profile::Standard,
            eta: T::c(super::CALIBRATED_ETA),
            eta1: Some(T::c(super::CALIBRATED_ETA1)),
            snapshot_every: 10,
            system: System::Rescaled,
        }
    }
}

/// Checks `1 ≤ p < n−1` and `1 ≤ s < min(n−1, 2(n−1)/p)`.
pub fn check_admissible<T: Scalar>(n: usize, p: T, s: T) -> Result<()> {
    if n < 3 {
        return Err(Error::Inadmissible(format!("dimension n = {n}: need n ≥ 3")));
    }
    let d = T::c((n - 1) as f64);
    if !(p >= T::one() && p < d) {
        return Err(Error::Inadmissible(format!(
            "p = {p} violates 1 ≤ p < n−1 = {d}"
        )));
    }
    let bound = d.min(T::c(2.0) * d / p);
    if !(s >= T::one() && s < bound) {
        return Err(Error::Inadmissible(format!(
            "s = {s} violates 1 ≤ s < min(n−1, 2(n−1)/p) = {bound} for n = {n}, p = {p}"
        )));
    }
    Ok(())
}

impl<T: Scalar> SolverConfig<T> {
    pub fn dim(&self) -> usize {
        self.sizes.len()
    }

    /// Number of steps to reach `t_end`.
    pub fn steps(&self) -> usize {
        (self.t_end / self.dt).round().to_f64_lossy().max(0.0) as usize
    }

    /// `ε` as seen by the right-hand side (0 for the limiting system).
    pub fn effective_eps(&self) -> T {
        match self.system {
            System::Rescaled => self.eps,
            System::Limiting => T::zero(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_admissible(self.dim(), self.p, self.s)?;
        let bad = |what: &str| Err(Error::InvalidArgument(what.to_string()));
        if !(self.eps >= T::zero() && self.eps <= T::one()) {
            return bad("ε must lie in [0, 1]");
        }
        if !(self.dt > T::zero()) || !(self.t_end >= T::zero()) {
            return bad("need dt > 0 and t_end ≥ 0");
        }
        let steps = self.t_end / self.dt;
        if (steps - steps.round()).abs() > T::c(1e-9) * steps.max(T::one()) {
            return bad("t_end must be an integer multiple of dt");
        }
        if !(self.alpha > T::zero()) || !(self.lambda > T::zero()) {
            return bad("need α > 0 and λ > 0");
        }
        if !(self.eta >= T::zero()) || !self.eta.is_finite() {
            return bad("η must be finite and nonnegative");
        }
        if let Some(e1) = self.eta1 {
            if !(e1 > T::zero()) {
                return bad("η₁ must be positive");
            }
        }
        if self.snapshot_every == 0 {
            return bad("snapshot_every must be at least 1");
        }
        // the weight e^{α|ξ_n|} must stay representable on the dealiased lattice
        let n_v = self.sizes[self.dim() - 1];
        let max_xi = T::c((n_v / 3) as f64);
        if self.alpha * max_xi > T::c(crate::weight::WEIGHT_EXPONENT_LIMIT) {
            return bad("α·max|ξ_n| exceeds the weight overflow guard");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn admissibility_examples() {
        assert!(check_admissible(3, 1.0, 1.5).is_ok());
        let err = check_admissible(3, 1.0, 2.0).unwrap_err().to_string();
        assert!(err.contains("s < min(n−1, 2(n−1)/p)"), "{err}");
        assert!(check_admissible(4, 2.0, 2.0).is_ok());
        assert!(check_admissible(3, 2.0, 1.5).is_err());
        assert!(check_admissible(3, 1.0, 0.5).is_err());
    }

    #[test]
    fn defaults_validate() {
        let cfg = SolverConfig::<f64>::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.steps(), 1000);
    }

    #[test]
    fn profile_names_round_trip() {
        for p in [Profile::Standard, Profile::Random { seed: 42 }] {
            assert_eq!(Profile::parse(&p.name()), Some(p));
        }
    }
}
