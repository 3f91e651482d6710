//! The configuration grid: block selection × destination score × relocation
//! rule × filling policy, 48 combinations in all.

use std::fmt;

use crate::reloc::{FillPolicy, RelocRule, UnknownName};
use crate::scores::DestScore;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BlockSelect {
    /// Highest-priority misplaced block first.
    MaxPriority,
    /// Block minimizing `ĥ`.
    Lookahead,
}

impl BlockSelect {
    pub const ALL: [BlockSelect; 2] = [BlockSelect::MaxPriority, BlockSelect::Lookahead];

    pub fn label(self) -> &'static str {
        match self {
            BlockSelect::MaxPriority => "max",
            BlockSelect::Lookahead => "lookahead",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HeuristicConfig {
    pub block_select: BlockSelect,
    pub dest_score: DestScore,
    pub reloc_rule: RelocRule,
    pub fill: FillPolicy,
}

impl HeuristicConfig {
    pub fn new(
        block_select: BlockSelect,
        dest_score: DestScore,
        reloc_rule: RelocRule,
        fill: FillPolicy,
    ) -> Self {
        HeuristicConfig {
            block_select,
            dest_score,
            reloc_rule,
            fill,
        }
    }

    /// All 48 configurations, ordered by label.
    pub fn all(safe_slack: usize) -> Vec<HeuristicConfig> {
        let mut out = Vec::with_capacity(48);
        for block_select in BlockSelect::ALL {
            for dest_score in DestScore::ALL {
                for reloc_rule in RelocRule::ALL {
                    for fill in FillPolicy::all(safe_slack) {
                        out.push(HeuristicConfig::new(
                            block_select,
                            dest_score,
                            reloc_rule,
                            fill,
                        ));
                    }
                }
            }
        }
        out.sort_by_key(|c| c.label());
        out
    }

    /// `<blockSelect>-<destScore>-<relocRule>-<fillPolicy>`, e.g. `lookahead-what-minmax-stop`.
    pub fn label(&self) -> String {
        format!(
            "{}-{}-{}-{}",
            self.block_select.label(),
            self.dest_score.label(),
            self.reloc_rule.label(),
            self.fill.label()
        )
    }

    pub fn parse(label: &str, safe_slack: usize) -> Result<Self, UnknownName> {
        let bad = || UnknownName {
            kind: "configuration",
            value: label.to_owned(),
        };
        let parts: Vec<&str> = label.split('-').collect();
        let [sel, score, rule, fill] = parts[..] else {
            return Err(bad());
        };
        let block_select = BlockSelect::ALL
            .into_iter()
            .find(|b| b.label() == sel)
            .ok_or_else(bad)?;
        let dest_score = DestScore::ALL
            .into_iter()
            .find(|d| d.label() == score)
            .ok_or_else(bad)?;
        let reloc_rule = rule.parse().map_err(|_| bad())?;
        let fill = FillPolicy::parse(fill, safe_slack).map_err(|_| bad())?;
        Ok(HeuristicConfig::new(
            block_select,
            dest_score,
            reloc_rule,
            fill,
        ))
    }
}

impl fmt::Display for HeuristicConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}
