//! JSON-lines rendering of an orbit log: a header, one object per step,
//! checkpoint objects interleaved at their step index, and a final stop
//! object carrying the win counts. Runs are deterministic, so re-rendering
//! the same run yields byte-identical output.

use rauzy_core::iet::Direction;
use rauzy_core::induction::{Checkpoint, OrbitLog, StopReason};
use rauzy_core::numeric::Sign;
use serde_json::{json, Map, Value};

fn sign_str(s: Sign) -> &'static str {
    match s {
        Sign::Negative => "negative",
        Sign::Zero => "zero",
        Sign::Positive => "positive",
    }
}

fn checkpoint_value(c: &Checkpoint) -> Value {
    let n = c.matrix.n();
    let rows: Vec<Vec<String>> = (0..n)
        .map(|i| (0..n).map(|j| c.matrix.entry(i, j).to_string()).collect())
        .collect();
    json!({
        "checkpoint": c.step,
        "identity_holds": c.identity_holds,
        "min_entry": c.min_entry.to_string(),
        "matrix": rows,
    })
}

pub fn render_orbit_log(log: &OrbitLog) -> String {
    let alphabet = &log.initial.alphabet;
    let mut out = String::new();
    let mut push = |v: Value| {
        out.push_str(&v.to_string());
        out.push('\n');
    };

    let names = |syms: &[rauzy_core::iet::Symbol]| -> Vec<&str> {
        syms.iter().map(|&s| alphabet.name(s)).collect()
    };
    push(json!({
        "direction": log.direction.as_str(),
        "d": log.initial.d(),
        "top": names(log.initial.perm.top()),
        "bottom": names(log.initial.perm.bottom()),
    }));

    let mut checkpoints = log.checkpoints.iter().peekable();
    for (i, step) in log.steps.iter().enumerate() {
        let n = i + 1;
        let mut obj = Map::new();
        obj.insert("step".into(), json!(n));
        obj.insert("kind".into(), json!(step.kind.as_str()));
        obj.insert("winner".into(), json!(alphabet.name(step.winner)));
        obj.insert("loser".into(), json!(alphabet.name(step.loser)));
        obj.insert(
            "sigma_tau_before".into(),
            json!(sign_str(log.sigma_signs[i])),
        );
        if log.direction == Direction::Backward {
            obj.insert("donor".into(), json!(alphabet.name(log.donors[i])));
        }
        push(Value::Object(obj));
        while checkpoints.peek().is_some_and(|c| c.step == n) {
            push(checkpoint_value(checkpoints.next().unwrap()));
        }
    }

    let win_counts: Map<String, Value> = alphabet
        .symbols()
        .map(|s| (alphabet.name(s).to_string(), json!(log.win_counts[s.0])))
        .collect();
    let mut stop = Map::new();
    match log.stop {
        StopReason::Completed => {
            stop.insert("stop".into(), json!("completed"));
        }
        StopReason::SigmaTauZero { step } => {
            stop.insert("stop".into(), json!("sigma_tau_zero"));
            stop.insert("at_step".into(), json!(step));
        }
        StopReason::ForwardTie { step } => {
            stop.insert("stop".into(), json!("forward_tie"));
            stop.insert("at_step".into(), json!(step));
        }
    }
    stop.insert("executed".into(), json!(log.executed_steps()));
    stop.insert("win_counts".into(), Value::Object(win_counts));
    push(Value::Object(stop));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rauzy_core::induction::backward_orbit;
    use rauzy_core::samples;

    #[test]
    fn rendering_is_deterministic_and_line_structured() {
        let s = samples::reversed4_sqrt2_last();
        let log = backward_orbit(&s, 40, 10).unwrap();
        let a = render_orbit_log(&log);
        let b = render_orbit_log(&backward_orbit(&s, 40, 10).unwrap());
        assert_eq!(a, b);

        let lines: Vec<&str> = a.lines().collect();
        // header + 40 steps + 4 checkpoints + stop
        assert_eq!(lines.len(), 1 + 40 + 4 + 1);
        for line in &lines {
            let v: Value = serde_json::from_str(line).unwrap();
            assert!(v.is_object());
        }
        assert!(lines[0].contains("\"direction\":\"backward\""));
        assert!(lines.last().unwrap().contains("\"stop\":\"completed\""));
    }

    #[test]
    fn stopping_orbits_report_the_exact_step() {
        let s = samples::reversed4_rational();
        let log = backward_orbit(&s, 10, 0).unwrap();
        let text = render_orbit_log(&log);
        let last = text.lines().last().unwrap();
        assert!(last.contains("\"stop\":\"sigma_tau_zero\""), "{last}");
        assert!(last.contains("\"at_step\":4"), "{last}");
        assert!(last.contains("\"executed\":3"), "{last}");
    }

    #[test]
    fn checkpoint_lines_carry_the_matrix() {
        let s = samples::reversed4_sqrt2_first();
        let log = backward_orbit(&s, 6, 3).unwrap();
        let text = render_orbit_log(&log);
        let cp_line = text
            .lines()
            .find(|l| l.contains("\"checkpoint\":3"))
            .expect("checkpoint at step 3");
        let v: Value = serde_json::from_str(cp_line).unwrap();
        assert_eq!(v["identity_holds"], json!(true));
        let rows = v["matrix"].as_array().unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].as_array().unwrap()[0].is_string());
    }
}
