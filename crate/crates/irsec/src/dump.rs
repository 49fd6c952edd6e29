//! Channel dump files: one realization in plain text.
//!
//! ```text
//! # irsec channel dump
//! seed = 42
//! param L = 4
//! param N = 2
//! ...
//! direct 0 1 <re> <im>        # a < b, symmetric
//! user_irs 0 3 <re> <im>      # user, element
//! eve_direct 2 <re> <im>
//! eve_irs 3 <re> <im>
//! ```
//!
//! Numbers are written in shortest round-trip form, so reading a dump gives
//! back bit-identical coefficients.

use std::fmt::Write as _;

use irsec_core::channel::ChannelSet;
use irsec_core::params::SystemParams;
use irsec_core::Complex64;

use crate::scenario::param_entries;

#[derive(Debug, thiserror::Error)]
pub enum DumpError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error(transparent)]
    Core(#[from] irsec_core::Error),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelDump {
    pub seed: u64,
    pub params: SystemParams,
    pub channels: ChannelSet,
}

pub fn write_dump(seed: u64, params: &SystemParams, chs: &ChannelSet) -> String {
    let mut out = String::from("# irsec channel dump\n");
    let _ = writeln!(out, "seed = {seed}");
    for (k, v) in param_entries(params) {
        let _ = writeln!(out, "param {k} = {v}");
    }
    let n = chs.users();
    for a in 0..n {
        for b in a + 1..n {
            let h = chs.direct(a, b);
            let _ = writeln!(out, "direct {a} {b} {:?} {:?}", h.re, h.im);
        }
    }
    for u in 0..n {
        for (i, h) in chs.user_irs(u).iter().enumerate() {
            let _ = writeln!(out, "user_irs {u} {i} {:?} {:?}", h.re, h.im);
        }
    }
    for u in 0..n {
        let h = chs.eve_direct(u);
        let _ = writeln!(out, "eve_direct {u} {:?} {:?}", h.re, h.im);
    }
    for (i, h) in chs.eve_irs().iter().enumerate() {
        let _ = writeln!(out, "eve_irs {i} {:?} {:?}", h.re, h.im);
    }
    out
}

pub fn read_dump(text: &str) -> Result<ChannelDump, DumpError> {
    let mut seed = None;
    let mut param_text = String::new();
    let mut direct = Vec::new();
    let mut user_irs = Vec::new();
    let mut eve_direct = Vec::new();
    let mut eve_irs = Vec::new();

    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |msg: String| DumpError::Syntax { line: line_no, msg };
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("seed") {
            let v = rest.trim().trim_start_matches('=').trim();
            seed = Some(
                v.parse::<u64>()
                    .map_err(|_| err(format!("bad seed `{v}`")))?,
            );
            continue;
        }
        if let Some(rest) = line.strip_prefix("param ") {
            param_text.push_str(rest);
            param_text.push('\n');
            continue;
        }
        let f: Vec<&str> = line.split_whitespace().collect();
        let idx = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| err(format!("bad index `{s}`")))
        };
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| err(format!("bad number `{s}`")))
        };
        let z = |re: &str, im: &str| -> Result<Complex64, DumpError> {
            Ok(Complex64::new(num(re)?, num(im)?))
        };
        match f.as_slice() {
            ["direct", a, b, re, im] => direct.push((idx(a)?, idx(b)?, z(re, im)?)),
            ["user_irs", u, e, re, im] => user_irs.push((idx(u)?, idx(e)?, z(re, im)?)),
            ["eve_direct", u, re, im] => eve_direct.push((idx(u)?, z(re, im)?)),
            ["eve_irs", e, re, im] => eve_irs.push((idx(e)?, z(re, im)?)),
            _ => return Err(err(format!("unrecognized line `{line}`"))),
        }
    }

    let seed = seed.ok_or(DumpError::Syntax {
        line: 0,
        msg: "missing `seed`".into(),
    })?;
    let params = params_from(&param_text)?;
    let users = params.users();
    let l = params.irs_elements;
    let missing = |what: &str| DumpError::Syntax {
        line: 0,
        msg: format!("{what} entries do not cover {users} users and {l} elements"),
    };

    let mut d = vec![Complex64::new(0.0, 0.0); users * users];
    let mut seen = vec![false; users * users];
    for (a, b, h) in direct {
        if a >= b || b >= users {
            return Err(missing("direct"));
        }
        d[a * users + b] = h;
        d[b * users + a] = h;
        seen[a * users + b] = true;
    }
    if (0..users).any(|a| (a + 1..users).any(|b| !seen[a * users + b])) {
        return Err(missing("direct"));
    }
    let mut ui = vec![vec![None; l]; users];
    for (u, e, h) in user_irs {
        *ui.get_mut(u)
            .and_then(|v| v.get_mut(e))
            .ok_or_else(|| missing("user_irs"))? = Some(h);
    }
    let ui = ui
        .into_iter()
        .map(|v| v.into_iter().collect::<Option<Vec<_>>>())
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| missing("user_irs"))?;
    let mut ed = vec![None; users];
    for (u, h) in eve_direct {
        *ed.get_mut(u).ok_or_else(|| missing("eve_direct"))? = Some(h);
    }
    let ed = ed
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| missing("eve_direct"))?;
    let mut ei = vec![None; l];
    for (e, h) in eve_irs {
        *ei.get_mut(e).ok_or_else(|| missing("eve_irs"))? = Some(h);
    }
    let ei = ei
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| missing("eve_irs"))?;

    Ok(ChannelDump {
        seed,
        params,
        channels: ChannelSet::from_parts(users, d, ui, ed, ei)?,
    })
}

fn params_from(text: &str) -> Result<SystemParams, DumpError> {
    crate::scenario::parse_params(text).map_err(|msg| DumpError::Syntax { line: 0, msg })
}
