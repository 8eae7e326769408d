use super::instance::{KernelMap, ProblemInstance};
use super::transform::{MonotoneTransform, TransformError};
use super::{BoundsError, Theorem};
use crate::expr::ScalarMap;
use crate::timescale::{GridFunction, TimeScale};

/// `p(t) = 1 + ∫_a^t f(s) e_f(t, σ(s)) Δs`, evaluated as the defining sum.
pub fn compute_p(f: &GridFunction) -> GridFunction {
    let scale = f.scale();
    let n = scale.len();
    let mut values = Vec::with_capacity(n);
    for i in 0..n {
        // walk s downward from ρ(t) so e_f(t, σ(s)) accumulates one factor per step
        let mut e = 1.0;
        let mut sum = 0.0;
        for j in (0..i).rev() {
            let mf = scale.mu_at(j) * f.at(j);
            sum += mf * e;
            e *= 1.0 + mf;
        }
        values.push(1.0 + sum);
    }
    GridFunction::new(scale.clone(), values).expect("p is finite for finite nonnegative f")
}

/// `q(t) = G⁻¹(G(1) + ∫_a^t f Δτ)` with `G(x) = ∫_δ^x ds / g(s)`.
///
/// `None` marks points where the argument leaves the range of `G`.
pub fn compute_q(f: &GridFunction, g: &ScalarMap, delta0: f64) -> Result<Vec<Option<f64>>, BoundsError> {
    let transform = MonotoneTransform::g(g, delta0)?;
    let g1 = transform.value(1.0)?;
    let integral = f.antiderivative();
    integral
        .values()
        .iter()
        .map(|&fi| match transform.inverse_from(1.0, g1, g1 + fi) {
            Ok(q) => Ok(Some(q)),
            Err(TransformError::DomainExceeded { .. }) => Ok(None),
            Err(e) => Err(e.into()),
        })
        .collect()
}

enum Inner<'a> {
    Kernel(&'a KernelMap),
    Separable(&'a GridFunction),
}

impl Inner<'_> {
    /// Inner weight at `(t_i, τ_j)`: `k(t_i, τ_j)` or `b(τ_j)`.
    fn at(&self, i: usize, j: usize) -> f64 {
        match self {
            Inner::Kernel(k) => k.at(i, j),
            Inner::Separable(b) => b.at(j),
        }
    }
}

fn phi_of(phi: &ScalarMap, x: f64, what: &str) -> Result<f64, BoundsError> {
    phi.eval(x).map_err(|fault| BoundsError::Eval { context: format!("Phi({what} = {x})"), fault })
}

/// `∫_a^{ρ(b)} inner(ρ(b), s) Φ(multiplier(s) · base(s)) Δs`.
fn constant_term(
    scale: &TimeScale,
    inner: &Inner<'_>,
    phi: &ScalarMap,
    multiplier: &[Option<f64>],
    base: &[f64],
    name: &'static str,
) -> Result<f64, BoundsError> {
    let rb = scale.len() - 2;
    let mut sum = 0.0;
    for j in 0..rb {
        let m = multiplier[j].ok_or_else(|| {
            BoundsError::Hypothesis(format!("multiplier undefined at t = {} while computing {name}", scale.point(j)))
        })?;
        sum += scale.mu_at(j) * inner.at(rb, j) * phi_of(phi, m * base[j], "p*a")?;
    }
    if !(sum > 0.0) {
        return Err(BoundsError::NonpositiveZeta { name, value: sum });
    }
    Ok(sum)
}

fn max_a_one(a: &GridFunction) -> Vec<f64> {
    a.values().iter().map(|&v| v.max(1.0)).collect()
}

fn multiplier_for(inst: &ProblemInstance, with_g: bool) -> Result<Vec<Option<f64>>, BoundsError> {
    if with_g {
        let g = inst.g().ok_or(BoundsError::MissingField("g"))?;
        compute_q(inst.f(), g, inst.delta0())
    } else {
        Ok(compute_p(inst.f()).values().iter().map(|&v| Some(v)).collect())
    }
}

fn constant_for(inst: &ProblemInstance, separable: bool, with_g: bool, name: &'static str) -> Result<f64, BoundsError> {
    let inner = if separable {
        Inner::Separable(inst.b().ok_or(BoundsError::MissingField("b"))?)
    } else {
        Inner::Kernel(inst.kernel().ok_or(BoundsError::MissingField("k"))?)
    };
    let multiplier = multiplier_for(inst, with_g)?;
    let base = if with_g { max_a_one(inst.a()) } else { inst.a().values().to_vec() };
    constant_term(inst.scale(), &inner, inst.phi(), &multiplier, &base, name)
}

/// `ζ = ∫_a^{ρ(b)} k(ρ(b), s) Φ(p(s) a(s)) Δs`.
pub fn zeta(inst: &ProblemInstance) -> Result<f64, BoundsError> {
    constant_for(inst, false, false, "zeta")
}

/// `ξ = ∫_a^{ρ(b)} b(s) Φ(p(s) a(s)) Δs`.
pub fn xi(inst: &ProblemInstance) -> Result<f64, BoundsError> {
    constant_for(inst, true, false, "xi")
}

/// `ζ̄ = ∫_a^{ρ(b)} k(ρ(b), s) Φ(q(s) max{a(s), 1}) Δs`.
pub fn zeta_bar(inst: &ProblemInstance) -> Result<f64, BoundsError> {
    constant_for(inst, false, true, "zeta_bar")
}

/// `ξ̄ = ∫_a^{ρ(b)} b(s) Φ(q(s) max{a(s), 1}) Δs`.
pub fn xi_bar(inst: &ProblemInstance) -> Result<f64, BoundsError> {
    constant_for(inst, true, true, "xi_bar")
}

/// Per-point outcome of a bound evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundPoint {
    pub t: f64,
    /// The bound, present exactly when `in_domain` holds.
    pub bound: Option<f64>,
    /// Every `Ψ⁻¹` (and `G⁻¹`) evaluation this point needs succeeded.
    pub in_domain: bool,
    /// The stated side condition: the `Ψ⁻¹` argument with the inner
    /// integral taken up to `ρ(t)` lies in the range of `Ψ`.
    pub psi_condition: bool,
    /// `G(1) + ∫_a^t f Δτ` lies in the range of `G` (always true for the `p` families).
    pub g_condition: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundReport {
    pub theorem: Theorem,
    pub constant_name: &'static str,
    pub constant: f64,
    /// `p` or `q` at every point.
    pub multiplier: Vec<Option<f64>>,
    /// Smallest `Ψ` value at which the range probe gave up, if any.
    pub psi_limit: Option<f64>,
    pub points: Vec<BoundPoint>,
}

impl BoundReport {
    pub fn bounds(&self) -> Vec<Option<f64>> {
        self.points.iter().map(|p| p.bound).collect()
    }

    pub fn in_domain_count(&self) -> usize {
        self.points.iter().filter(|p| p.in_domain).count()
    }

    pub fn all_in_domain(&self) -> bool {
        self.points.iter().all(|p| p.in_domain)
    }
}

/// Everything the bound formula needs, in the common form
/// `bound(t) = m(t) [base(t) + ∫_a^t w(s) W(Ψ⁻¹(Ψ(C) + M(s))) Δs]`,
/// `M(s) = ∫_a^s inner(s, τ) Φ(m(τ)) Φ(∫_a^τ w Δθ) Δτ`.
struct Ingredients<'a> {
    theorem: Theorem,
    scale: &'a TimeScale,
    multiplier: Vec<Option<f64>>,
    base: Vec<f64>,
    weight: GridFunction,
    inner: Inner<'a>,
    phi: &'a ScalarMap,
    w: &'a ScalarMap,
    x0: f64,
}

fn evaluate(ing: Ingredients<'_>) -> Result<BoundReport, BoundsError> {
    let scale = ing.scale;
    let n = scale.len();
    let name = ing.theorem.constant_name();
    let constant = constant_term(scale, &ing.inner, ing.phi, &ing.multiplier, &ing.base, name)?;

    let psi = MonotoneTransform::psi(ing.phi, ing.w, ing.x0)?;
    let psi_c = psi.value(constant)?;

    // Φ(m(τ)) Φ(∫_a^τ w)
    let weight_integral = ing.weight.antiderivative();
    let mut inner_term = Vec::with_capacity(n);
    for j in 0..n {
        inner_term.push(match ing.multiplier[j] {
            Some(m) => Some(phi_of(ing.phi, m, "multiplier")? * phi_of(ing.phi, weight_integral.at(j), "integral")?),
            None => None,
        });
    }

    // M(s_j) for s_j in [a, ρ(b)]; None once an undefined multiplier is needed
    let mut middle: Vec<Option<f64>> = Vec::with_capacity(n);
    for j in 0..n {
        let mut sum = 0.0;
        let mut ok = true;
        for tau in 0..j {
            match inner_term[tau] {
                Some(v) => sum += scale.mu_at(tau) * ing.inner.at(j, tau) * v,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        middle.push(ok.then_some(sum));
    }

    // R(s) = Ψ⁻¹(Ψ(C) + M(s)); targets are nondecreasing, so one failure bounds the rest
    let mut psi_limit: Option<f64> = None;
    let mut failed_target: Option<f64> = None;
    let mut w_of_r: Vec<Option<f64>> = Vec::with_capacity(n);
    // the outer integral runs over [a, t), so R is never needed at b itself
    for (j, m) in middle.iter().enumerate() {
        let Some(m) = m.filter(|_| j + 1 < n) else {
            w_of_r.push(None);
            continue;
        };
        let target = psi_c + m;
        if failed_target.is_some_and(|f| target >= f) {
            w_of_r.push(None);
            continue;
        }
        match psi.inverse_from(constant, psi_c, target) {
            Ok(r) => w_of_r.push(ing.w.eval(r).ok()),
            Err(TransformError::DomainExceeded { bound, .. }) => {
                failed_target = Some(failed_target.map_or(target, |f: f64| f.min(target)));
                psi_limit = Some(psi_limit.map_or(bound, |l: f64| l.min(bound)));
                w_of_r.push(None);
            }
            Err(e) => return Err(e.into()),
        }
    }

    let mut points = Vec::with_capacity(n);
    let mut acc = 0.0;
    let mut prefix_ok = true;
    for i in 0..n {
        let t = scale.point(i);
        let g_condition = ing.multiplier[i].is_some();
        let psi_condition = w_of_r[scale.rho_index(i)].is_some();
        let bound = match (g_condition && prefix_ok, ing.multiplier[i]) {
            (true, Some(m)) => Some(m * (ing.base[i] + acc)).filter(|b| b.is_finite()),
            _ => None,
        };
        points.push(BoundPoint { t, bound, in_domain: bound.is_some(), psi_condition, g_condition });
        match w_of_r[i] {
            Some(wr) if prefix_ok => acc += scale.mu_at(i) * ing.weight.at(i) * wr,
            _ => prefix_ok = false,
        }
    }

    Ok(BoundReport {
        theorem: ing.theorem,
        constant_name: name,
        constant,
        multiplier: ing.multiplier,
        psi_limit,
        points,
    })
}

fn ingredients(inst: &ProblemInstance) -> Result<Ingredients<'_>, BoundsError> {
    let theorem = inst.theorem();
    let with_g = theorem.uses_g();
    let separable = theorem.separable();
    let (inner, weight) = if separable {
        let h = inst.h().ok_or(BoundsError::MissingField("h"))?;
        let b = inst.b().ok_or(BoundsError::MissingField("b"))?;
        let fh = GridFunction::new(
            inst.scale().clone(),
            inst.f().values().iter().zip(h.values()).map(|(f, h)| f * h).collect(),
        )?;
        (Inner::Separable(b), fh)
    } else {
        (Inner::Kernel(inst.kernel().ok_or(BoundsError::MissingField("k"))?), inst.f().clone())
    };
    Ok(Ingredients {
        theorem,
        scale: inst.scale(),
        multiplier: multiplier_for(inst, with_g)?,
        base: if with_g { max_a_one(inst.a()) } else { inst.a().values().to_vec() },
        weight,
        inner,
        phi: inst.phi(),
        w: inst.w(),
        x0: inst.x0(),
    })
}

fn expect_theorem(inst: &ProblemInstance, want: Theorem) -> Result<(), BoundsError> {
    if inst.theorem() == want {
        Ok(())
    } else {
        Err(BoundsError::Unsupported(format!("{} instance passed to the {want} bound", inst.theorem())))
    }
}

/// Bound for the general-kernel Gronwall family with multiplier `p`.
pub fn bound_thm1(inst: &ProblemInstance) -> Result<BoundReport, BoundsError> {
    expect_theorem(inst, Theorem::Thm1)?;
    evaluate(ingredients(inst)?)
}

/// Bound for the separable-kernel Gronwall family.
pub fn bound_thm2(inst: &ProblemInstance) -> Result<BoundReport, BoundsError> {
    expect_theorem(inst, Theorem::Thm2)?;
    evaluate(ingredients(inst)?)
}

/// Bound for the general-kernel Bihari family (`g` in class S) with multiplier `q`.
pub fn bound_thm3(inst: &ProblemInstance) -> Result<BoundReport, BoundsError> {
    expect_theorem(inst, Theorem::Thm3)?;
    evaluate(ingredients(inst)?)
}

/// Bound for the separable-kernel Bihari family.
pub fn bound_thm4(inst: &ProblemInstance) -> Result<BoundReport, BoundsError> {
    expect_theorem(inst, Theorem::Thm4)?;
    evaluate(ingredients(inst)?)
}

/// Dispatch on the instance's theorem selector.
pub fn bound(inst: &ProblemInstance) -> Result<BoundReport, BoundsError> {
    evaluate(ingredients(inst)?)
}
