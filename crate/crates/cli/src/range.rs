//! Dimension-flag syntax: `k`, `a,b,c`, `lo:hi:*k` (geometric) and
//! `lo:hi:+k` (arithmetic).

pub fn parse_dims(text: &str) -> Result<Vec<usize>, String> {
    let text = text.trim();
    if text.contains(':') {
        return parse_range(text);
    }
    let mut out = Vec::new();
    for part in text.split(',') {
        out.push(parse_positive(part)?);
    }
    Ok(out)
}

fn parse_positive(part: &str) -> Result<usize, String> {
    let v: usize = part
        .trim()
        .parse()
        .map_err(|_| format!("not a positive integer: {part:?}"))?;
    if v == 0 {
        return Err(format!("not a positive integer: {part:?}"));
    }
    Ok(v)
}

fn parse_range(text: &str) -> Result<Vec<usize>, String> {
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected lo:hi:*k or lo:hi:+k, got {text:?}"));
    }
    let lo = parse_positive(parts[0])?;
    let hi = parse_positive(parts[1])?;
    if lo > hi {
        return Err(format!("empty range {text:?}"));
    }
    let step = parts[2].trim();
    let (geometric, k) = if let Some(k) = step.strip_prefix('*') {
        (true, parse_positive(k)?)
    } else if let Some(k) = step.strip_prefix('+') {
        (false, parse_positive(k)?)
    } else {
        return Err(format!("step must start with '*' or '+', got {step:?}"));
    };
    if geometric && k < 2 {
        return Err(format!("geometric factor must be at least 2, got {k}"));
    }
    let mut out = Vec::new();
    let mut v = lo;
    while v <= hi {
        out.push(v);
        v = if geometric { v.saturating_mul(k) } else { v.saturating_add(k) };
        if v == usize::MAX {
            break;
        }
    }
    Ok(out)
}

/// Comma-separated reals.
pub fn parse_reals(text: &str) -> Result<Vec<f64>, String> {
    text.split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("not a number: {p:?}"))
        })
        .collect()
}
