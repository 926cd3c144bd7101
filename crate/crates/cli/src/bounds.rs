use anyhow::Result;
use hil_core::analytics::{bound_constants, regret_lower_bound, regret_upper_bound, Theorem};
use hil_core::InstanceSpec;
use serde_json::{json, Map, Value};

use crate::report::instance_hash;

fn num(x: f64) -> Value {
    // JSON has no infinity; infinite bounds become null with a diagnostic.
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// All applicable upper bounds, the constants, and for a singleton
/// instance with `γ > 1 − f₁` the lower bound.
pub fn bounds_json(instance: &InstanceSpec, alpha: f64, horizon: u64) -> Result<Value> {
    let k = bound_constants(instance, alpha)?;
    let mut out = Map::new();
    let mut diagnostics = Vec::new();
    out.insert("alpha".into(), num(alpha));
    out.insert("horizon".into(), json!(horizon));
    out.insert("instance_sha256".into(), json!(instance_hash(instance)));
    out.insert(
        "constants".into(),
        json!({"c1": num(k.c1), "c2": num(k.c2), "c3": k.c3.map(num), "c4": k.c4.map(num)}),
    );
    for th in Theorem::ALL {
        let needs_weights = matches!(th, Theorem::T2a | Theorem::T2c);
        if needs_weights && instance.weights().is_none() {
            diagnostics.push(format!("bound_{} needs arrival weights", th.as_str()));
            continue;
        }
        let b = regret_upper_bound(instance, alpha, horizon, th)?;
        if b.is_infinite() {
            diagnostics.push(format!("bound_{} is infinite: zero gap in the accept set", th.as_str()));
        }
        out.insert(format!("bound_{}", th.as_str()), num(b));
    }
    if instance.bins() == 1 {
        let f1 = instance.profile().get(0);
        let gamma = instance.gamma();
        if gamma > 1.0 - f1 {
            out.insert("lower_bound".into(), num(regret_lower_bound(f1, gamma, horizon)?));
        } else {
            diagnostics.push("lower_bound needs gamma > 1 - f1".into());
        }
    }
    out.insert("diagnostics".into(), json!(diagnostics));
    Ok(Value::Object(out))
}
