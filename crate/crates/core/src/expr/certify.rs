use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use super::{Env, EvalFault, Expr, ParseError, Signature};

/// Absolute tolerance for all property comparisons.
pub const PROPERTY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Property {
    Nondecreasing,
    PositiveOnPositive,
    Subadditive,
    Submultiplicative,
    ClassS,
}

impl Property {
    pub const ALL: [Property; 5] = [
        Property::Nondecreasing,
        Property::PositiveOnPositive,
        Property::Subadditive,
        Property::Submultiplicative,
        Property::ClassS,
    ];

    pub fn short_name(self) -> &'static str {
        match self {
            Property::Nondecreasing => "nondec",
            Property::PositiveOnPositive => "positive",
            Property::Subadditive => "sub",
            Property::Submultiplicative => "submul",
            Property::ClassS => "classS",
        }
    }
}

impl fmt::Display for Property {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short_name())
    }
}

impl FromStr for Property {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "nondec" | "nondecreasing" => Ok(Property::Nondecreasing),
            "positive" | "pos" => Ok(Property::PositiveOnPositive),
            "sub" | "subadditive" => Ok(Property::Subadditive),
            "submul" | "submultiplicative" => Ok(Property::Submultiplicative),
            "classS" | "classs" | "S" => Ok(Property::ClassS),
            other => Err(format!("unknown property `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
        })
    }
}

/// Outcome of one sampled property check.
///
/// `worst_violation` is the largest `lhs - rhs` seen over the sample set;
/// the check passes when it stays within [`PROPERTY_TOL`]. `witness` holds
/// the inputs that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub property: Property,
    pub status: Status,
    pub samples: usize,
    pub worst_violation: f64,
    pub witness: Vec<f64>,
}

impl fmt::Display for Certificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {} samples={} worst_violation={:e}",
            self.property, self.status, self.samples, self.worst_violation
        )?;
        if self.status == Status::Fail {
            let w: Vec<String> = self.witness.iter().map(|v| format!("{v}")).collect();
            write!(f, " witness=({})", w.join(","))?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificates {
    pub domain_hi: f64,
    pub seed: u64,
    /// Whether the map evaluates at 0; maps such as `log(x)` do not.
    pub defined_at_zero: bool,
    pub items: Vec<Certificate>,
}

impl Certificates {
    pub fn get(&self, p: Property) -> Option<&Certificate> {
        self.items.iter().find(|c| c.property == p)
    }

    /// First failing certificate among `props`, if any.
    pub fn first_failure(&self, props: &[Property]) -> Option<&Certificate> {
        props
            .iter()
            .filter_map(|&p| self.get(p))
            .find(|c| c.status == Status::Fail)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertifyError {
    #[error("evaluation fault at input {input:?}: {fault}")]
    EvalFault { input: Vec<f64>, fault: EvalFault },
    #[error("property check needs at least 100 samples and domain_hi > 0")]
    BadParameters,
}

/// A one-variable nonlinearity (Φ, W or g) with optional certificates.
#[derive(Debug, Clone)]
pub struct ScalarMap {
    source: String,
    expr: Arc<Expr>,
    certificates: Option<Certificates>,
}

impl PartialEq for ScalarMap {
    fn eq(&self, other: &Self) -> bool {
        self.expr == other.expr
    }
}

impl ScalarMap {
    pub fn parse(text: &str) -> Result<ScalarMap, ParseError> {
        let expr = Expr::parse_for(text, Signature::Unary)?;
        Ok(ScalarMap { source: text.to_string(), expr: Arc::new(expr), certificates: None })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn expr(&self) -> &Expr {
        &self.expr
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalFault> {
        self.expr.eval(&Env::x(x))
    }

    pub fn certificates(&self) -> Option<&Certificates> {
        self.certificates.as_ref()
    }

    /// Run [`check_properties`] and attach the result.
    pub fn certified(mut self, domain_hi: f64, samples: usize, seed: u64) -> Result<ScalarMap, CertifyError> {
        self.certificates = Some(check_properties(&self, domain_hi, samples, seed)?);
        Ok(self)
    }

    pub fn check(&self, domain_hi: f64, samples: usize, seed: u64) -> Result<Certificates, CertifyError> {
        check_properties(self, domain_hi, samples, seed)
    }
}

struct Worst {
    value: f64,
    witness: Vec<f64>,
}

impl Worst {
    fn new() -> Worst {
        Worst { value: f64::NEG_INFINITY, witness: Vec::new() }
    }

    fn offer(&mut self, violation: f64, witness: &[f64]) {
        if violation > self.value {
            self.value = violation;
            self.witness = witness.to_vec();
        }
    }

    fn finish(self, property: Property, samples: usize) -> Certificate {
        let status = if self.value <= PROPERTY_TOL { Status::Pass } else { Status::Fail };
        Certificate { property, status, samples, worst_violation: self.value, witness: self.witness }
    }
}

fn stream(seed: u64, p: Property) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (0x9E37_79B9_7F4A_7C15u64.wrapping_mul(p as u64 + 1)))
}

/// A point of `(0, hi]`.
fn draw(rng: &mut ChaCha8Rng, hi: f64) -> f64 {
    hi * (1.0 - rng.gen::<f64>())
}

/// Check the structural hypotheses of a nonlinearity on deterministic
/// pseudo-random samples of `(0, domain_hi]`.
pub fn check_properties(m: &ScalarMap, domain_hi: f64, samples: usize, seed: u64) -> Result<Certificates, CertifyError> {
    if samples < 100 || !(domain_hi > 0.0 && domain_hi.is_finite()) {
        return Err(CertifyError::BadParameters);
    }
    let eval = |x: f64, input: &[f64]| {
        m.eval(x).map_err(|fault| CertifyError::EvalFault { input: input.to_vec(), fault })
    };
    let mut items = Vec::with_capacity(Property::ALL.len());

    // nondecreasing: m(x1) <= m(x2) for x1 <= x2
    let mut rng = stream(seed, Property::Nondecreasing);
    let mut worst = Worst::new();
    for _ in 0..samples {
        let (a, b) = (draw(&mut rng, domain_hi), draw(&mut rng, domain_hi));
        let (x1, x2) = if a <= b { (a, b) } else { (b, a) };
        let w = [x1, x2];
        worst.offer(eval(x1, &w)? - eval(x2, &w)?, &w);
    }
    items.push(worst.finish(Property::Nondecreasing, samples));

    let mut rng = stream(seed, Property::PositiveOnPositive);
    let mut worst = Worst::new();
    for _ in 0..samples {
        let x = draw(&mut rng, domain_hi);
        let v = eval(x, &[x])?;
        // strict positivity: a zero value is a violation of size tol
        let violation = if v > 0.0 { -v } else { PROPERTY_TOL * 2.0 - v };
        worst.offer(violation, &[x]);
    }
    items.push(worst.finish(Property::PositiveOnPositive, samples));

    let mut rng = stream(seed, Property::Subadditive);
    let mut worst = Worst::new();
    for _ in 0..samples {
        let (x, y) = (draw(&mut rng, domain_hi), draw(&mut rng, domain_hi));
        let w = [x, y];
        worst.offer(eval(x + y, &w)? - eval(x, &w)? - eval(y, &w)?, &w);
    }
    items.push(worst.finish(Property::Subadditive, samples));

    let mut rng = stream(seed, Property::Submultiplicative);
    let mut worst = Worst::new();
    for _ in 0..samples {
        let (x, y) = (draw(&mut rng, domain_hi), draw(&mut rng, domain_hi));
        let w = [x, y];
        worst.offer(eval(x * y, &w)? - eval(x, &w)? * eval(y, &w)?, &w);
    }
    items.push(worst.finish(Property::Submultiplicative, samples));

    // class S: g(x)/z <= g(x/z) for z >= 1
    let mut rng = stream(seed, Property::ClassS);
    let mut worst = Worst::new();
    let z_hi = domain_hi.max(2.0);
    for _ in 0..samples {
        let x = draw(&mut rng, domain_hi);
        let z = 1.0 + (z_hi - 1.0) * rng.gen::<f64>();
        let w = [x, z];
        worst.offer(eval(x, &w)? / z - eval(x / z, &w)?, &w);
    }
    let mut class_s = worst.finish(Property::ClassS, samples);
    // class S also requires nondecreasing and positive on (0, ∞)
    for p in [Property::Nondecreasing, Property::PositiveOnPositive] {
        if items.iter().any(|c| c.property == p && c.status == Status::Fail) {
            class_s.status = Status::Fail;
        }
    }
    items.push(class_s);

    Ok(Certificates { domain_hi, seed, defined_at_zero: m.eval(0.0).is_ok(), items })
}
