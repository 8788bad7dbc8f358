//! From a system and a sentence to the block game and its solution.

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::automata::{ltl_to_nba, product_with_ts, winning_outcome_dpa, Nba, OutcomeDpa};
use crate::equivalence::{analyze, EquivalenceDump};
use crate::error::Result;
use crate::game::{Game, GameSchedule};
use crate::solver::{solve_hierarchical, SolveOptions, StrategyProfile};
use crate::syntax::{normalize_prefix, AlternationForm, HyperFormula};
use crate::transducer::SkolemWitness;
use crate::ts::TransitionSystem;

/// Everything derived from `(T, φ)` before the game is solved.
#[derive(Debug, Clone)]
pub struct Instance {
    pub system: TransitionSystem,
    pub formula: HyperFormula,
    pub form: AlternationForm,
    pub automaton: Nba,
    pub equivalence: EquivalenceDump,
    pub outcome: OutcomeDpa,
    pub schedule: GameSchedule,
}

pub fn formula_digest(f: &HyperFormula) -> String {
    hex::encode(Sha256::digest(f.to_string().as_bytes()))
}

/// Components bound by universal blocks, dummies included.
pub fn universal_components(form: &AlternationForm) -> Vec<usize> {
    (0..form.k()).step_by(2).flat_map(|i| form.offset(i)..form.offset(i) + form.blocks[i].vars.len()).collect()
}

/// The winning-outcome automaton alone, without the block-length analysis.
pub fn outcome_automaton(system: &TransitionSystem, formula: &HyperFormula, budget: usize) -> Result<OutcomeDpa> {
    let form = normalize_prefix(formula);
    let automaton = product_with_ts(&ltl_to_nba(&formula.matrix, &form.variables(), &system.aps)?, system)?;
    winning_outcome_dpa(&automaton, system, &universal_components(&form), budget)
}

impl Instance {
    pub fn prepare(system: &TransitionSystem, formula: &HyperFormula, budget: usize) -> Result<Instance> {
        let form = normalize_prefix(formula);
        let vars = form.variables();
        let automaton = product_with_ts(&ltl_to_nba(&formula.matrix, &vars, &system.aps)?, system)?;
        let (equivalence, _) = analyze(&automaton, system, &form.arities(), budget)?;
        let outcome = winning_outcome_dpa(&automaton, system, &universal_components(&form), budget)?;
        let schedule = GameSchedule::new(form.k(), equivalence.ell, &form.arities(), system.num_props())?;
        Ok(Instance { system: system.clone(), formula: formula.clone(), form, automaton, equivalence, outcome, schedule })
    }

    pub fn game(&self) -> Result<Game<'_>> {
        Game::new(self.schedule.clone(), &self.outcome.dpa)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Summary {
    pub k: usize,
    pub ell: usize,
    pub delta: Vec<usize>,
    pub automaton_states: usize,
    pub outcome_states: usize,
    pub outcome_colors: usize,
}

impl Instance {
    pub fn summary(&self) -> Summary {
        Summary {
            k: self.schedule.k,
            ell: self.schedule.ell,
            delta: self.schedule.delta.clone(),
            automaton_states: self.automaton.len(),
            outcome_states: self.outcome.stats.states,
            outcome_colors: self.outcome.stats.colors,
        }
    }
}

pub enum Decision {
    Yes { profile: StrategyProfile, witness: SkolemWitness },
    No,
}

/// Decides whether satisfaction is witnessed by computable Skolem functions
/// and, if so, extracts them.
pub fn decide(inst: &Instance, opts: SolveOptions) -> Result<Decision> {
    let game = inst.game()?;
    match solve_hierarchical(&game, opts)? {
        None => Ok(Decision::No),
        Some(profile) => {
            let witness = SkolemWitness::extract(inst, &profile)?;
            Ok(Decision::Yes { profile, witness })
        }
    }
}
