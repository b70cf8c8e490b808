use std::cmp::Ordering;
use std::collections::BTreeMap;

use clap::Subcommand;
use nacap_core::capacity::{
    capacity_sequence, classify_generic, classify_spherical, nash_williams, real_sweep, CapacityVerdict,
};
use nacap_core::dirichlet::{green_matrix, solve_dp, solve_renormalized, VertexFn};
use nacap_core::field::{format_rational, parse_rational, LcElement, OrderedField, RfElement};
use nacap_core::graph::spec_file::{parse_rational_list, FieldKind, GraphSpec};
use nacap_core::graph::{Vertex, WeightedGraph};
use nacap_core::potential::{
    certified_lower_bounds, construct_superharmonic, hardy_construct, hardy_verify, harnack_constant, is_superharmonic,
    HardyProvenance, SuperharmonicCheck,
};
use nacap_core::transition::{
    contraction_certificate, neumann_partial, no_decay_certificate, pi_element, pn_element, pn_restricted,
    TransitionContext,
};
use nacap_core::{CoreError, Result};
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::Audit;

#[derive(Debug, Clone, Subcommand, Serialize)]
#[serde(tag = "command", rename_all = "kebab-case")]
pub enum Command {
    /// Solve the Dirichlet problem on the ball B_radius(root).
    SolveDp {
        #[arg(long, default_value_t = 0)]
        root: Vertex,
        #[arg(long)]
        radius: usize,
        /// Normalize by Δv(root) = 1 instead of v(root) = 1.
        #[arg(long)]
        charge: bool,
    },
    /// Capacity sequence cap_n(root), n = 1..=horizon, and a verdict.
    Capacity {
        #[arg(long, default_value_t = 0)]
        root: Vertex,
        #[arg(long)]
        horizon: usize,
        /// Valuation a Nash-Williams record must reach.
        #[arg(long, default_value = "4")]
        threshold: String,
    },
    /// Verdict for a spherically symmetric graph from its profile.
    Classify {
        #[arg(long, default_value_t = 10)]
        horizon: usize,
    },
    /// Search for a Nash-Williams certificate of null capacity.
    NashWilliams {
        #[arg(long, default_value_t = 0)]
        root: Vertex,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value = "4")]
        threshold: String,
    },
    /// Green function G_K(x, y) with K = B_radius(root).
    Green {
        #[arg(long)]
        x: Vertex,
        #[arg(long)]
        y: Vertex,
        #[arg(long, default_value_t = 0)]
        root: Vertex,
        #[arg(long)]
        radius: usize,
    },
    /// Transition probabilities Pⁿ(x, y) and related series.
    Transition {
        #[arg(long)]
        x: Vertex,
        #[arg(long)]
        y: Vertex,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        root: Vertex,
        /// Also restrict the walk to B_l(root).
        #[arg(long)]
        restrict: Option<usize>,
        /// Partial Neumann sum up to this power.
        #[arg(long)]
        series: Option<usize>,
    },
    /// Construct a Hardy weight and test it on sample functions.
    Hardy {
        #[arg(long, default_value_t = 0)]
        root: Vertex,
        #[arg(long)]
        horizon: usize,
        #[arg(long, default_value_t = 8)]
        samples: usize,
        #[arg(long, default_value = "4")]
        threshold: String,
        #[arg(long)]
        squared: bool,
    },
    /// Harnack constant on B_radius(root).
    Harnack {
        #[arg(long, default_value_t = 0)]
        root: Vertex,
        #[arg(long)]
        radius: usize,
    },
    /// Check the spec's test function, or build one, on B_radius(root).
    Superharmonic {
        #[arg(long, default_value_t = 0)]
        root: Vertex,
        #[arg(long)]
        radius: usize,
        #[arg(long)]
        construct: bool,
        #[arg(long, default_value = "1")]
        c: String,
        #[arg(long, default_value = "1*e^(1)")]
        tau: String,
    },
    /// Real capacities on B_horizon(root) with every weight evaluated at r.
    RealSweep {
        #[arg(long, default_value_t = 0)]
        root: Vertex,
        #[arg(long)]
        power: i32,
        /// Comma-separated positive rationals.
        #[arg(long)]
        r: String,
        #[arg(long)]
        horizon: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::SolveDp { .. } => "solve-dp",
            Self::Capacity { .. } => "capacity",
            Self::Classify { .. } => "classify",
            Self::NashWilliams { .. } => "nash-williams",
            Self::Green { .. } => "green",
            Self::Transition { .. } => "transition",
            Self::Hardy { .. } => "hardy",
            Self::Harnack { .. } => "harnack",
            Self::Superharmonic { .. } => "superharmonic",
            Self::RealSweep { .. } => "real-sweep",
        }
    }
}

fn ordering(o: Ordering) -> &'static str {
    match o {
        Ordering::Less => "less",
        Ordering::Equal => "equal",
        Ordering::Greater => "greater",
    }
}

fn threshold(text: &str) -> Result<nacap_core::field::Rational> {
    parse_rational(text).map_err(|e| CoreError::Spec(format!("--threshold: {e}")))
}

fn verdict(v: &CapacityVerdict, audit: &mut Audit) -> Value {
    let mut out = serde_json::to_value(v).expect("verdict serializes");
    if let Some(limit) = v.limit() {
        out["limit"] = audit.num(limit);
    }
    out
}

fn vertex_table<F: OrderedField>(f: &VertexFn<F>, key: &'static str, audit: &mut Audit) -> Value {
    f.iter().map(|(x, v)| json!({ "vertex": x, key: audit.num(v) })).collect()
}

pub fn execute(spec: &GraphSpec, cmd: &Command, audit: &mut Audit) -> Result<Value> {
    match (spec.field, cmd) {
        (FieldKind::RationalFunction, Command::RealSweep { root, power, r, horizon }) => {
            let g = spec.build::<RfElement>()?;
            let rs = parse_rational_list(r).map_err(|e| CoreError::Spec(format!("--r: {e}")))?;
            let rows = real_sweep(&g, *root, *power, &rs, *horizon)?;
            let decreasing = rows.windows(2).all(|w| w[1].scaled < w[0].scaled);
            Ok(json!({
                "rows": serde_json::to_value(&rows).expect("rows serialize"),
                "scaled_strictly_decreasing": decreasing,
            }))
        }
        (_, Command::RealSweep { .. }) => {
            Err(CoreError::precondition("real-sweep needs a spec over the rational-function field"))
        }
        (FieldKind::LeviCivita, _) => run(&spec.build::<LcElement>()?, spec, cmd, audit),
        (FieldKind::RationalFunction, _) => run(&spec.build::<RfElement>()?, spec, cmd, audit),
    }
}

fn run<F: OrderedField>(g: &WeightedGraph<F>, spec: &GraphSpec, cmd: &Command, audit: &mut Audit) -> Result<Value> {
    match cmd {
        Command::SolveDp { root, radius, charge } => {
            let g = g.covering(*root, *radius)?;
            let ball = g.ball(*root, *radius)?;
            let sol = if *charge { solve_renormalized(&g, &ball, *root)? } else { solve_dp(&g, &ball, *root)? };
            let values: Value = sol
                .domain
                .iter()
                .zip(&sol.values)
                .map(|(x, v)| json!({ "vertex": x, "value": audit.num(v) }))
                .collect();
            Ok(json!({
                "normalization": if *charge { "charge" } else { "potential" },
                "values": values,
                "energy": audit.num(&sol.energy),
                "capacity": audit.num(&sol.capacity),
                "bounds_violation": sol.check_bounds()?,
            }))
        }
        Command::Capacity { root, horizon, threshold: t } => {
            let seq = capacity_sequence(g, *root, *horizon)?;
            let rows: Value = seq
                .values
                .iter()
                .enumerate()
                .map(|(i, c)| {
                    let diff = seq.valuations.get(i).map(|v| v.as_ref().map_or("inf".to_string(), format_rational));
                    json!({ "n": i + 1, "cap": audit.num(c), "next_difference_valuation": diff })
                })
                .collect();
            let v = classify_generic(g, *root, *horizon, &threshold(t)?)?;
            Ok(json!({ "sequence": rows, "verdict": verdict(&v, audit) }))
        }
        Command::Classify { horizon } => {
            let p = g.profile().ok_or_else(|| CoreError::precondition("classify needs a path or spherical spec"))?;
            let v = classify_spherical::<F>(p, *horizon)?;
            Ok(json!({ "verdict": verdict(&v, audit) }))
        }
        Command::NashWilliams { root, horizon, threshold: t } => {
            let cert = nash_williams(g, *root, *horizon, &threshold(t)?)?;
            if let Some(c) = &cert {
                c.weights.iter().for_each(|w| audit.see(w));
            }
            Ok(json!({ "found": cert.is_some(), "certificate": serde_json::to_value(&cert).expect("serializes") }))
        }
        Command::Green { x, y, root, radius } => {
            let g = g.covering(*root, *radius)?;
            let ball = g.ball(*root, *radius)?;
            for v in [x, y] {
                if !ball.contains(v) {
                    return Err(CoreError::NotInDomain { vertex: *v });
                }
            }
            let column = green_matrix(&g, &ball, *y)?;
            Ok(json!({
                "value": audit.num(&column[x]),
                "column": vertex_table(&column, "green", audit),
            }))
        }
        Command::Transition { x, y, n, root, restrict, series } => {
            let ctx = TransitionContext::new(g);
            let mut out = BTreeMap::new();
            out.insert("pn", audit.num(&pn_element(&ctx, *x, *y, *n)?));
            out.insert("pi_n", audit.num(&pi_element(&ctx, *x, *y, *n)?));
            let set = match restrict {
                Some(l) => Some(ctx.graph().covering(*root, *l)?.ball(*root, *l)?),
                None => None,
            };
            if let Some(set) = &set {
                out.insert("restricted_to", json!(set));
                out.insert("pn_restricted", audit.num(&pn_restricted(&ctx, set, *x, *y, *n)?));
                let cert = contraction_certificate(&ctx, set, (*n).max(set.len() + 1))?;
                out.insert("contraction", serde_json::to_value(&cert).expect("serializes"));
            }
            if let Some(horizon) = series {
                let partial = neumann_partial(&ctx, set.as_deref(), *x, *y, *horizon)?;
                out.insert(
                    "series",
                    json!({
                        "sum": audit.num(&partial.sum),
                        "valuations": partial.valuations,
                        "trend": partial.trend,
                        "decay": partial.decay,
                    }),
                );
            }
            if x == y {
                let cert = no_decay_certificate(&ctx, *x, (*n).max(2))?;
                if let Some(c) = &cert {
                    audit.see(&c.value);
                }
                out.insert("no_decay", serde_json::to_value(&cert).expect("serializes"));
            }
            Ok(serde_json::to_value(out).expect("serializes"))
        }
        Command::Hardy { root, horizon, samples, threshold: t, squared } => {
            let v = classify_generic(g, *root, *horizon, &threshold(t)?)?;
            let g = g.covering(*root, *horizon + 1)?;
            let ball = g.ball(*root, *horizon)?;
            let bounds = certified_lower_bounds::<F>(&v, &ball).ok();
            let weight =
                hardy_construct(&v, *root, bounds.as_ref().map(|b| (b, HardyProvenance::SphericalLowerBounds)))?;
            // φ_i(x) = max(0, i + 1 − d(root, x)): tents of growing width.
            let dist = g.bfs(*root, *horizon)?;
            let phis: Vec<VertexFn<F>> = (0..(*samples).min(*horizon))
                .map(|i| {
                    dist.iter().filter(|(_, d)| *d <= i).map(|&(x, d)| (x, F::from_int((i + 1 - d) as i64))).collect()
                })
                .collect();
            let check = hardy_verify(&g, &weight.weight, &phis, *squared)?;
            let rows: Value = check
                .samples
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    json!({
                        "sample": i,
                        "energy": audit.num(&s.energy),
                        "weighted": audit.num(&s.weighted),
                        "ordering": ordering(s.ordering),
                    })
                })
                .collect();
            Ok(json!({
                "verdict": verdict(&v, audit),
                "weight": vertex_table(&weight.weight, "omega", audit),
                "provenance": weight.provenance,
                "squared": squared,
                "samples": rows,
                "holds": check.holds,
            }))
        }
        Command::Harnack { root, radius } => {
            let g = g.covering(*root, *radius)?;
            let ball = g.ball(*root, *radius)?;
            let c = harnack_constant(&g, &ball)?;
            Ok(json!({ "set": ball, "constant": audit.num(&c) }))
        }
        Command::Superharmonic { root, radius, construct, c, tau } => {
            if *construct {
                let (c, tau) = (F::parse_literal(c)?, F::parse_literal(tau)?);
                let u = construct_superharmonic(g, *root, &c, &tau, *radius)?;
                let values: Value =
                    u.values.iter().map(|(x, k, v)| json!({ "vertex": x, "distance": k, "u": audit.num(v) })).collect();
                return Ok(json!({
                    "form": u.form,
                    "values": values,
                    "check": check_json(&u.check, audit),
                }));
            }
            let f = spec
                .test_function
                .as_ref()
                .ok_or_else(|| CoreError::Spec("superharmonic needs \"test_function\" or --construct".into()))?;
            let g = g.covering(*root, *radius + 1)?;
            let around = g.ball(*root, *radius + 1)?;
            let u: VertexFn<F> = around.iter().copied().zip(f.on_vertices(&g, &around)?).collect();
            let ball = g.ball(*root, *radius)?;
            let check = is_superharmonic(&g, |x| u.get(&x).cloned().unwrap_or_else(F::zero), &ball)?;
            Ok(json!({
                "u": vertex_table(&u, "u", audit),
                "check": check_json(&check, audit),
            }))
        }
        Command::RealSweep { .. } => unreachable!("dispatched in execute"),
    }
}

fn check_json<F: OrderedField>(check: &SuperharmonicCheck<F>, audit: &mut Audit) -> Value {
    let laplacians: Value =
        check.laplacians.iter().map(|(x, d)| json!({ "vertex": x, "laplacian": audit.num(d) })).collect();
    json!({ "holds": check.holds, "witness": check.witness, "laplacians": laplacians })
}
