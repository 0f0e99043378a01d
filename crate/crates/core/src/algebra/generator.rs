use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use super::AlgebraError;

/// Opaque name of an argument point (`p1`, `q`, `x`, ...).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PointLabel(Arc<str>);

impl PointLabel {
    pub fn new(name: &str) -> Self {
        PointLabel(Arc::from(name))
    }

    /// Label of the `n`-th external leg, `p1`, `p2`, ...
    pub fn leg(n: usize) -> Self {
        PointLabel::new(&format!("p{n}"))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Debug for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for PointLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for PointLabel {
    fn from(s: &str) -> Self {
        PointLabel::new(s)
    }
}

/// A symbol of the expression algebra.
///
/// * `Moment { f, i }` is `y_{f,i}` (or `y_f` when `i` is `None`).
/// * `LogMoment { i }` is `log y_{1,i}`.
/// * `ExtProp { i, f, p }` is the external propagator `B_i^f(p)`.
/// * `IntProp { i, j, f, g }` is the internal propagator `B_{i,j}^{f,g}`.
///
/// Internal propagators are symmetric under `(i,f) <-> (j,g)`; build them
/// through [`Generator::int_prop`] so the stored orientation is canonical.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Generator {
    Moment { f: u32, i: Option<u32> },
    LogMoment { i: Option<u32> },
    ExtProp { i: u32, f: u32, p: PointLabel },
    IntProp { i: u32, j: u32, f: u32, g: u32 },
}

impl Generator {
    pub fn moment(f: u32) -> Self {
        Generator::Moment { f, i: None }
    }

    pub fn moment_at(f: u32, i: u32) -> Self {
        Generator::Moment { f, i: Some(i) }
    }

    pub fn log_y1() -> Self {
        Generator::LogMoment { i: None }
    }

    pub fn ext_prop(i: u32, f: u32, p: impl Into<PointLabel>) -> Self {
        Generator::ExtProp { i, f, p: p.into() }
    }

    pub fn int_prop(i: u32, j: u32, f: u32, g: u32) -> Self {
        if (i, f) <= (j, g) {
            Generator::IntProp { i, j, f, g }
        } else {
            Generator::IntProp { i: j, j: i, f: g, g: f }
        }
    }

    /// Re-orients an internal propagator; every other generator is returned as is.
    pub fn canonical(self) -> Self {
        match self {
            Generator::IntProp { i, j, f, g } => Generator::int_prop(i, j, f, g),
            other => other,
        }
    }

    pub fn is_moment(&self) -> bool {
        matches!(self, Generator::Moment { .. })
    }

    /// Cut index carried by the generator, if any.
    pub fn cut_index(&self) -> Option<u32> {
        match self {
            Generator::Moment { i, .. } | Generator::LogMoment { i } => *i,
            Generator::ExtProp { i, .. } | Generator::IntProp { i, .. } => Some(*i),
        }
    }

    // (kind, i, j, f, g) followed by the point label.
    fn key(&self) -> (u8, Option<u32>, u32, u32, u32) {
        match self {
            Generator::Moment { f, i } => (0, *i, 0, *f, 0),
            Generator::LogMoment { i } => (1, *i, 0, 0, 0),
            Generator::ExtProp { i, f, .. } => (2, Some(*i), 0, *f, 0),
            Generator::IntProp { i, j, f, g } => (3, Some(*i), *j, *f, *g),
        }
    }

    fn label(&self) -> Option<&PointLabel> {
        match self {
            Generator::ExtProp { p, .. } => Some(p),
            _ => None,
        }
    }
}

impl Ord for Generator {
    fn cmp(&self, other: &Self) -> Ordering {
        self.key().cmp(&other.key()).then_with(|| self.label().cmp(&other.label()))
    }
}

impl PartialOrd for Generator {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Generator {
    fn fmt(&self, fmt: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Generator::Moment { f, i: None } => write!(fmt, "y{f}"),
            Generator::Moment { f, i: Some(i) } => write!(fmt, "y{f}_{i}"),
            Generator::LogMoment { i: None } => write!(fmt, "log(y1)"),
            Generator::LogMoment { i: Some(i) } => write!(fmt, "log(y1_{i})"),
            Generator::ExtProp { i, f, p } => write!(fmt, "B[{i};{f}]({p})"),
            Generator::IntProp { i, j, f, g } => write!(fmt, "B[{i},{j};{f},{g}]"),
        }
    }
}

fn parse_u32(s: &str, whole: &str) -> Result<u32, AlgebraError> {
    s.trim().parse().map_err(|_| AlgebraError::Parse(format!("bad integer `{s}` in `{whole}`")))
}

fn parse_moment(body: &str, whole: &str) -> Result<(u32, Option<u32>), AlgebraError> {
    match body.split_once('_') {
        Some((f, i)) => Ok((parse_u32(f, whole)?, Some(parse_u32(i, whole)?))),
        None => Ok((parse_u32(body, whole)?, None)),
    }
}

impl FromStr for Generator {
    type Err = AlgebraError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let bad = || AlgebraError::Parse(format!("unrecognized generator `{s}`"));
        if let Some(inner) = s.strip_prefix("log(").and_then(|r| r.strip_suffix(')')) {
            let body = inner.strip_prefix('y').ok_or_else(bad)?;
            let (f, i) = parse_moment(body, s)?;
            if f != 1 {
                return Err(AlgebraError::Parse(format!("only log(y1) is supported, got `{s}`")));
            }
            return Ok(Generator::LogMoment { i });
        }
        if let Some(body) = s.strip_prefix('y') {
            let (f, i) = parse_moment(body, s)?;
            if f == 0 {
                return Err(bad());
            }
            return Ok(Generator::Moment { f, i });
        }
        if let Some(rest) = s.strip_prefix("B[") {
            let (inside, tail) = rest.split_once(']').ok_or_else(bad)?;
            let (cuts, orders) = inside.split_once(';').ok_or_else(bad)?;
            if tail.is_empty() {
                let (i, j) = cuts.split_once(',').ok_or_else(bad)?;
                let (f, g) = orders.split_once(',').ok_or_else(bad)?;
                return Ok(Generator::int_prop(parse_u32(i, s)?, parse_u32(j, s)?, parse_u32(f, s)?, parse_u32(g, s)?));
            }
            let label =
                tail.strip_prefix('(').and_then(|t| t.strip_suffix(')')).filter(|t| !t.is_empty()).ok_or_else(bad)?;
            return Ok(Generator::ext_prop(parse_u32(cuts, s)?, parse_u32(orders, s)?, PointLabel::new(label)));
        }
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn int_prop_orientation_is_normalized() {
        assert_eq!(Generator::int_prop(2, 1, 0, 3), Generator::int_prop(1, 2, 3, 0));
        assert_eq!(Generator::int_prop(1, 1, 2, 0), Generator::IntProp { i: 1, j: 1, f: 0, g: 2 });
    }

    #[test]
    fn ordering_follows_kind_then_indices() {
        let mut gens = [
            Generator::int_prop(1, 1, 0, 0),
            Generator::ext_prop(1, 0, "p"),
            Generator::moment(2),
            Generator::log_y1(),
            Generator::moment(1),
            Generator::moment_at(1, 2),
        ];
        gens.sort();
        let shown: Vec<String> = gens.iter().map(|g| g.to_string()).collect();
        assert_eq!(shown, ["y1", "y2", "y1_2", "log(y1)", "B[1;0](p)", "B[1,1;0,0]"]);
    }

    #[test]
    fn display_parse_roundtrip() {
        for g in [
            Generator::moment(7),
            Generator::moment_at(3, 2),
            Generator::LogMoment { i: Some(4) },
            Generator::ext_prop(2, 5, "p12"),
            Generator::int_prop(3, 1, 0, 2),
        ] {
            assert_eq!(g.to_string().parse::<Generator>().unwrap(), g);
        }
        assert!("z3".parse::<Generator>().is_err());
        assert!("log(y2)".parse::<Generator>().is_err());
        assert!("B[1;0]()".parse::<Generator>().is_err());
    }
}
