//! Small string parsers for function and event specs on the command line.

use anyhow::{bail, Context};
use maxmart::piecewise::{ExpDensity, Indicator, MaxFn, Monomial, PiecewiseFn};

/// Parse a function spec:
/// `const:c`, `linear:a:b` (a + b x), `indicator:z` (1 at or above z),
/// `indicator-open:z` (1 strictly above z), `monomial:c:p` (c x^p),
/// `expdens` (e^{-x}), `boxcar:u` (density 1/u on [0, u)).
pub fn parse_fn(spec: &str) -> anyhow::Result<Box<dyn MaxFn>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> anyhow::Result<f64> {
        s.parse::<f64>().with_context(|| format!("bad number {s:?} in {spec:?}"))
    };
    Ok(match parts.as_slice() {
        ["const", c] => Box::new(Monomial::new(num(c)?, 0.0)),
        ["linear", a, b] => Box::new(PiecewiseFn::linear(num(a)?, num(b)?)),
        ["indicator", z] => Box::new(Indicator::at_or_above(num(z)?)),
        ["indicator-open", z] => Box::new(Indicator::above(num(z)?)),
        ["monomial", c, p] => Box::new(Monomial::new(num(c)?, num(p)?)),
        ["expdens"] | ["exp"] => Box::new(ExpDensity),
        ["boxcar", u] => {
            let u = num(u)?;
            Box::new(PiecewiseFn::boxcar(u, 1.0 / u))
        }
        _ => bail!("unrecognized function spec {spec:?}"),
    })
}

/// Parse a phi profile for the supremum law: `const:c` or `linear:a:b`.
pub fn parse_phi(spec: &str) -> anyhow::Result<PiecewiseFn> {
    let parts: Vec<&str> = spec.split(':').collect();
    let num = |s: &str| -> anyhow::Result<f64> {
        s.parse::<f64>().with_context(|| format!("bad number {s:?} in {spec:?}"))
    };
    Ok(match parts.as_slice() {
        ["const", c] => PiecewiseFn::constant(num(c)?),
        ["linear", a, b] => PiecewiseFn::linear(num(a)?, num(b)?),
        _ => bail!("unrecognized phi spec {spec:?} (const:c or linear:a:b)"),
    })
}

/// Parse an event spec: `endpoint:a` for {X_s <= a}, `sup:a` for
/// {max_s <= a}.
pub fn parse_event(spec: &str) -> anyhow::Result<maxmart::penalization::Event> {
    let parts: Vec<&str> = spec.split(':').collect();
    Ok(match parts.as_slice() {
        ["endpoint", a] => maxmart::penalization::Event::EndpointBelow {
            a: a.parse().context("bad endpoint level")?,
        },
        ["sup", a] => maxmart::penalization::Event::SupBelow {
            a: a.parse().context("bad sup level")?,
        },
        _ => bail!("unrecognized event spec {spec:?} (endpoint:a or sup:a)"),
    })
}

/// Parse a comma-separated list of numbers.
pub fn parse_list(spec: &str) -> anyhow::Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .with_context(|| format!("bad number {s:?}"))
        })
        .collect()
}
