//! Utility profiles `e0(x)` (honest play in a network of `x` agents) and
//! `em(x, m)` (a successful cheater with `m` fake identities), together with
//! claims about which search shortcuts apply to each profile.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::ExactRational;
use crate::MIN_NETWORK;

type HonestFn = dyn Fn(u64) -> ExactRational + Send + Sync;
type DuplicatedFn = dyn Fn(u64, u64) -> ExactRational + Send + Sync;
type Factory = dyn Fn(Option<&str>) -> Result<UtilityModel> + Send + Sync;

/// Claims a model makes about its own structure. They select faster search
/// paths; the engine can audit them with `verify_linear_threshold` and
/// `verify_limited_dup`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct EnhancementHints {
    /// Equilibrium holds exactly from some pivot threshold upward.
    pub linear_threshold: bool,
    /// A single duplication count whose profitability decides whether any
    /// duplication count is profitable.
    pub limited_dup: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case", tag = "type")]
pub enum ModelKind {
    LeaderElection,
    KnowledgeSharing { k: u64 },
    Custom,
}

/// An algorithm's expected-utility profile. Immutable and cheap to clone.
#[derive(Clone)]
pub struct UtilityModel {
    name: String,
    kind: ModelKind,
    e0: Arc<HonestFn>,
    em: Arc<DuplicatedFn>,
    hints: EnhancementHints,
}

impl fmt::Debug for UtilityModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("UtilityModel")
            .field("name", &self.name)
            .field("kind", &self.kind)
            .field("hints", &self.hints)
            .finish_non_exhaustive()
    }
}

impl UtilityModel {
    /// A third-party model. `em` is only consulted for `m >= 1`; zero
    /// duplications always evaluate through `e0`.
    pub fn custom<E0, EM>(name: impl Into<String>, e0: E0, em: EM, hints: EnhancementHints) -> Self
    where
        E0: Fn(u64) -> ExactRational + Send + Sync + 'static,
        EM: Fn(u64, u64) -> ExactRational + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            kind: ModelKind::Custom,
            e0: Arc::new(e0),
            em: Arc::new(em),
            hints,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    pub fn hints(&self) -> EnhancementHints {
        self.hints
    }

    pub fn with_hints(mut self, hints: EnhancementHints) -> Self {
        self.hints = hints;
        self
    }

    pub fn e0(&self, x: u64) -> Result<ExactRational> {
        if x < MIN_NETWORK {
            return Err(Error::NetworkTooSmall(x));
        }
        Ok((self.e0)(x))
    }

    pub fn em(&self, x: u64, m: u64) -> Result<ExactRational> {
        if x < MIN_NETWORK {
            return Err(Error::NetworkTooSmall(x));
        }
        Ok(self.em_unchecked(x, m))
    }

    pub(crate) fn e0_unchecked(&self, x: u64) -> ExactRational {
        (self.e0)(x)
    }

    pub(crate) fn em_unchecked(&self, x: u64, m: u64) -> ExactRational {
        if m == 0 {
            (self.e0)(x)
        } else {
            (self.em)(x, m)
        }
    }

    /// Checks that every utility in the `[3, L]` domain lies in `[0, 1]`.
    pub fn audit(&self, l: u64) -> Result<()> {
        let zero = ExactRational::zero();
        let one = ExactRational::one();
        let check = |value: ExactRational, at: String| -> Result<()> {
            if value < zero || value > one {
                return Err(Error::UtilityOutOfRange {
                    name: self.name.clone(),
                    at,
                    value: value.to_string(),
                });
            }
            Ok(())
        };
        for x in MIN_NETWORK..=l {
            check(self.e0_unchecked(x), format!("e0({x})"))?;
            for m in 1..=l - x {
                check(self.em_unchecked(x, m), format!("em({x}, {m})"))?;
            }
        }
        Ok(())
    }
}

/// Fair leader election: every agent wins with probability `1/x`; a cheater
/// controlling `1 + m` of `x + m` agents wins with `(1 + m)/(x + m)`.
pub fn leader_election_model() -> UtilityModel {
    UtilityModel {
        name: "le".to_string(),
        kind: ModelKind::LeaderElection,
        e0: Arc::new(ExactRational::reciprocal),
        em: Arc::new(|x, m| ExactRational::new(1 + m, x + m)),
        hints: EnhancementHints {
            linear_threshold: true,
            limited_dup: Some(1),
        },
    }
}

/// Knowledge sharing on a ring with `k` equally likely outputs. Honest play
/// yields `1/k`; a cheater posing as at least as many agents as the honest
/// network dictates the output, otherwise it gains nothing.
///
/// The id-exhaustion case (`m > L - x`) is left to the engine, where the
/// collision-survival factor is zero.
pub fn knowledge_sharing_model(k: u64) -> Result<UtilityModel> {
    if k < 2 {
        return Err(Error::TooFewOutputs(k));
    }
    let honest = ExactRational::reciprocal(k);
    let cheat = honest.clone();
    Ok(UtilityModel {
        name: format!("ks:{k}"),
        kind: ModelKind::KnowledgeSharing { k },
        e0: Arc::new(move |_| honest.clone()),
        em: Arc::new(move |x, m| {
            if x <= m {
                ExactRational::one()
            } else {
                cheat.clone()
            }
        }),
        hints: EnhancementHints {
            linear_threshold: true,
            limited_dup: None,
        },
    })
}

/// Name-keyed model factories. Selection strings are `name` or `name:arg`,
/// e.g. `le` and `ks:4`.
#[derive(Clone)]
pub struct ModelRegistry {
    factories: BTreeMap<String, Arc<Factory>>,
}

impl fmt::Debug for ModelRegistry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.factories.keys()).finish()
    }
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::with_builtins()
    }
}

impl ModelRegistry {
    pub fn empty() -> Self {
        Self {
            factories: BTreeMap::new(),
        }
    }

    pub fn with_builtins() -> Self {
        let mut registry = Self::empty();
        registry.register("le", |arg| match arg {
            None => Ok(leader_election_model()),
            Some(a) => Err(Error::UnknownModel(format!("le:{a}"))),
        });
        registry.register("ks", |arg| {
            let raw = arg.ok_or_else(|| Error::UnknownModel("ks (expected ks:<k>)".into()))?;
            let k = raw
                .parse::<u64>()
                .map_err(|_| Error::UnknownModel(format!("ks:{raw}")))?;
            knowledge_sharing_model(k)
        });
        registry
    }

    /// Adds or replaces a factory. The factory receives the text after the
    /// first `:` of the selection string, if any.
    pub fn register<F>(&mut self, name: impl Into<String>, factory: F)
    where
        F: Fn(Option<&str>) -> Result<UtilityModel> + Send + Sync + 'static,
    {
        self.factories.insert(name.into(), Arc::new(factory));
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factories.keys().map(String::as_str)
    }

    pub fn resolve(&self, selection: &str) -> Result<UtilityModel> {
        let (name, arg) = match selection.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (selection, None),
        };
        let factory = self
            .factories
            .get(name)
            .ok_or_else(|| Error::UnknownModel(selection.to_string()))?;
        factory(arg)
    }
}
