//! Rule-spec parsing for the CLI and scenario files.
//!
//! A rule list is comma-separated; each rule is `name[:key=value]` with
//! further `key=value` tokens attaching to the preceding rule, so
//! `gukf:kappa=1,ckf3,guf:n=2,design=cum:2` is three rules.

use crate::error::{BenchError, Result};
use crate::monte_carlo::NamedRule;
use guf_core::filters::{GusConfig, SamplingRule};
use guf_core::gus_sampler::{AllocationPolicy, LevelMode};
use guf_core::sphere_designs::ReferenceSampling;

const RULE_NAMES: [&str; 6] = ["ukf", "gukf", "ckf3", "ckf5", "ghqf", "guf"];

fn is_rule_head(token: &str) -> bool {
    let head = token.split(':').next().unwrap_or(token);
    RULE_NAMES.contains(&head)
}

fn spec_error(spec: &str, message: impl Into<String>) -> BenchError {
    BenchError::RuleSpec {
        spec: spec.to_string(),
        message: message.into(),
    }
}

/// Parses a design spec: `axes`, `ones:<k>` or `cum:<grade>`.
pub fn parse_design(spec: &str, dim: usize) -> Result<ReferenceSampling> {
    let mut parts = spec.splitn(2, ':');
    let kind = parts.next().unwrap_or("");
    let arg = parts.next();
    match (kind, arg) {
        ("axes", None) => Ok(ReferenceSampling::axes(dim)),
        ("ones", Some(k)) => {
            let k: usize = k
                .parse()
                .map_err(|_| spec_error(spec, "ones:<k> needs an integer"))?;
            ReferenceSampling::ones_orbit(dim, k).map_err(BenchError::from)
        }
        ("cum", Some(grade)) => {
            let grade: usize = grade
                .parse()
                .map_err(|_| spec_error(spec, "cum:<grade> needs an integer"))?;
            ReferenceSampling::cumulative_ones(dim, grade).map_err(BenchError::from)
        }
        _ => Err(spec_error(spec, "expected axes, ones:<k> or cum:<grade>")),
    }
}

struct Args<'a> {
    spec: &'a str,
    pairs: Vec<(&'a str, &'a str)>,
}

impl<'a> Args<'a> {
    fn take(&mut self, key: &str) -> Option<&'a str> {
        let pos = self.pairs.iter().position(|(k, _)| *k == key)?;
        Some(self.pairs.remove(pos).1)
    }

    fn parse<T: std::str::FromStr>(&mut self, key: &str, default: T) -> Result<T> {
        match self.take(key) {
            None => Ok(default),
            Some(v) => v
                .parse()
                .map_err(|_| spec_error(self.spec, format!("bad value for {key}: '{v}'"))),
        }
    }

    fn finish(self) -> Result<()> {
        if let Some((k, _)) = self.pairs.first() {
            return Err(spec_error(self.spec, format!("unknown option '{k}'")));
        }
        Ok(())
    }
}

fn build_rule(group: &[&str], dim: usize) -> Result<NamedRule> {
    let spec = group.join(",");
    let mut parts = group[0].splitn(2, ':');
    let name = parts.next().unwrap();
    let mut pairs = Vec::new();
    let mut raw_args: Vec<&str> = Vec::new();
    if let Some(first) = parts.next() {
        raw_args.push(first);
    }
    raw_args.extend(group.iter().skip(1).copied());
    for raw in raw_args {
        let mut kv = raw.splitn(2, '=');
        let key = kv.next().unwrap_or("");
        let value = kv
            .next()
            .ok_or_else(|| spec_error(&spec, format!("expected key=value, got '{raw}'")))?;
        pairs.push((key, value));
    }
    let mut args = Args { spec: &spec, pairs };

    let rule = match name {
        "ukf" => {
            let kappa = args.parse("kappa", 1.0)?;
            args.finish()?;
            SamplingRule::ukf(kappa)
        }
        "gukf" => {
            let kappa = args.parse("kappa", 1.0)?;
            args.finish()?;
            SamplingRule::gukf(kappa)
        }
        "ckf3" => {
            args.finish()?;
            SamplingRule::ckf3()
        }
        "ckf5" => {
            args.finish()?;
            SamplingRule::ckf5()
        }
        "ghqf" => {
            let m = args.parse("m", 3usize)?;
            args.finish()?;
            SamplingRule::gauss_hermite(m)
        }
        "guf" => {
            let count: usize = args.parse("n", 2usize)?;
            let mode = match args.take("mode").unwrap_or("grid") {
                "grid" => LevelMode::Grid,
                "grid-closed" => LevelMode::GridClosed,
                other => {
                    return Err(spec_error(
                        &spec,
                        format!("mode must be grid or grid-closed, got '{other}'"),
                    ))
                }
            };
            let design_spec = args.take("design").unwrap_or("cum:1").to_string();
            let alloc = match args.take("alloc").unwrap_or("equal") {
                "equal" => AllocationPolicy::Equal,
                "density" => AllocationPolicy::DensityProportional,
                other => {
                    return Err(spec_error(
                        &spec,
                        format!("alloc must be equal or density, got '{other}'"),
                    ))
                }
            };
            args.finish()?;

            let config = match alloc {
                AllocationPolicy::Equal => {
                    let design = parse_design(&design_spec, dim)?;
                    let ds = guf_core::gus_sampler::importance_levels(count, mode, None)?;
                    GusConfig::new(&ds, vec![design; count])?
                }
                AllocationPolicy::DensityProportional => {
                    // The catalogue spans the graded family up to the named
                    // design so the policy has sizes to choose from.
                    let catalogue: Vec<ReferenceSampling> = match design_spec.strip_prefix("cum:") {
                        Some(grade) => {
                            let grade: usize = grade
                                .parse()
                                .map_err(|_| spec_error(&spec, "cum:<grade> needs an integer"))?;
                            (1..=grade)
                                .map(|g| ReferenceSampling::cumulative_ones(dim, g))
                                .collect::<guf_core::Result<_>>()?
                        }
                        None => vec![parse_design(&design_spec, dim)?],
                    };
                    GusConfig::allocated(count, mode, &catalogue, alloc, None)?
                }
            };
            SamplingRule::gus(config)
        }
        other => return Err(spec_error(&spec, format!("unknown rule '{other}'"))),
    };

    Ok(NamedRule { name: spec, rule })
}

/// Parses a flat token list into named rules, regrouping `key=value`
/// continuation tokens.
pub fn parse_rules(tokens: &[String], dim: usize) -> Result<Vec<NamedRule>> {
    // Scenario files may carry specs with embedded commas; flatten first.
    let flat: Vec<&str> = tokens
        .iter()
        .flat_map(|t| t.split(','))
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .collect();
    if flat.is_empty() {
        return Err(BenchError::Config("no rules given".into()));
    }

    let mut groups: Vec<Vec<&str>> = Vec::new();
    for token in flat {
        if is_rule_head(token) {
            groups.push(vec![token]);
        } else if let Some(group) = groups.last_mut() {
            group.push(token);
        } else {
            return Err(spec_error(token, "rule list must start with a rule name"));
        }
    }
    groups.iter().map(|g| build_rule(g, dim)).collect()
}
