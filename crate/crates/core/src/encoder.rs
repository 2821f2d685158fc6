//! Compiles a forest into hard clauses and an instance into soft unit
//! clauses.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::data::Instance;
use crate::formula::{
    encode_card_geq, read_wcnf, tseitin, write_wcnf, Clause, Cnf, Formula, FormulaError, Lit, Var,
    VarPool,
};
use crate::sat::{solve, SatError};
use crate::surrogate::{DecisionTree, RandomForest, SurrogateError, TreeNode};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EncodeError {
    #[error("expected {expected} features, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("instance is empty")]
    EmptyInstance,
    #[error("the classifier never predicts class {0}; explanations are undefined")]
    HardUnsat(u8),
    #[error("soft clause {0} is not a unit clause")]
    NonUnitSoft(usize),
    #[error(transparent)]
    Forest(#[from] SurrogateError),
    #[error(transparent)]
    Formula(#[from] FormulaError),
    #[error(transparent)]
    Sat(#[from] SatError),
}

/// Which prediction is being explained. Explaining a negative prediction
/// asserts the forest output, so that instances predicted 0 contradict the
/// hard clauses; explaining a positive one asserts its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Polarity {
    Negative,
    Positive,
}

impl Polarity {
    /// The prediction whose explanations this polarity yields.
    pub fn explained_class(self) -> bool {
        matches!(self, Polarity::Positive)
    }

    /// The class asserted by the hard clauses.
    pub fn asserted_class(self) -> bool {
        !self.explained_class()
    }

    pub fn for_prediction(pred: bool) -> Polarity {
        if pred {
            Polarity::Positive
        } else {
            Polarity::Negative
        }
    }
}

impl fmt::Display for Polarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Polarity::Negative => "neg",
            Polarity::Positive => "pos",
        })
    }
}

impl FromStr for Polarity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "neg" | "negative" => Ok(Polarity::Negative),
            "pos" | "positive" => Ok(Polarity::Positive),
            other => Err(format!("unknown polarity `{other}` (expected neg or pos)")),
        }
    }
}

/// The feature and value a soft unit clause fixes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SoftOrigin {
    pub feature: usize,
    #[serde(with = "crate::data::bit")]
    pub value: bool,
}

/// Hard clauses plus one soft unit clause per feature.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialMaxSatInstance {
    hard: Cnf,
    soft: Vec<Lit>,
    origins: Vec<SoftOrigin>,
}

impl PartialMaxSatInstance {
    /// Soft literal `i` is read as fixing feature `var - 1` to the literal's
    /// sign, matching the layout where features take the lowest variables.
    pub fn new(mut hard: Cnf, soft: Vec<Lit>) -> PartialMaxSatInstance {
        let origins = soft
            .iter()
            .map(|l| SoftOrigin {
                feature: l.var().index() as usize - 1,
                value: l.is_positive(),
            })
            .collect();
        if let Some(max) = soft.iter().map(|l| l.var().index()).max() {
            hard.reserve_vars(max);
        }
        PartialMaxSatInstance {
            hard,
            soft,
            origins,
        }
    }

    pub fn hard(&self) -> &Cnf {
        &self.hard
    }

    pub fn soft(&self) -> &[Lit] {
        &self.soft
    }

    pub fn origins(&self) -> &[SoftOrigin] {
        &self.origins
    }

    pub fn soft_clauses(&self) -> Vec<Clause> {
        self.soft.iter().map(|&l| Clause::unit(l)).collect()
    }

    pub fn to_wcnf(&self) -> String {
        write_wcnf(&self.hard, &self.soft_clauses())
    }

    pub fn from_wcnf(text: &str) -> Result<PartialMaxSatInstance, EncodeError> {
        let w = read_wcnf(text)?;
        let soft = w
            .soft
            .iter()
            .enumerate()
            .map(|(i, c)| match c.lits() {
                [l] => Ok(*l),
                _ => Err(EncodeError::NonUnitSoft(i)),
            })
            .collect::<Result<Vec<Lit>, _>>()?;
        Ok(PartialMaxSatInstance::new(w.hard, soft))
    }
}

/// Hard clauses for a forest with the output asserted per `polarity`.
#[derive(Debug, Clone)]
pub struct CnfModel {
    pub cnf: Cnf,
    /// `var_map[i]` is the variable of feature `i`.
    pub var_map: Vec<Var>,
    pub tree_outputs: Vec<Var>,
    pub forest_output: Var,
    pub threshold: usize,
    pub polarity: Polarity,
    pub pool: VarPool,
}

impl CnfModel {
    pub fn feature_names(&self) -> &[String] {
        self.pool.input_names()
    }

    pub fn var_map_file(&self) -> VarMapFile {
        VarMapFile {
            feature_names: self.feature_names().to_vec(),
            feature_vars: self.var_map.iter().map(|v| v.index()).collect(),
            tree_outputs: self.tree_outputs.iter().map(|v| v.index()).collect(),
            forest_output: self.forest_output.index(),
            threshold: self.threshold,
            polarity: self.polarity,
            num_vars: self.cnf.num_vars(),
        }
    }
}

/// Sidecar describing the variable layout of an exported CNF.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VarMapFile {
    pub feature_names: Vec<String>,
    pub feature_vars: Vec<u32>,
    pub tree_outputs: Vec<u32>,
    pub forest_output: u32,
    pub threshold: usize,
    pub polarity: Polarity,
    pub num_vars: u32,
}

/// The tree as the conjunction, over its 0-leaves, of the negated path
/// conditions. Leaves are visited depth first with the 0 branch first.
pub fn tree_to_formula(dt: &DecisionTree, var_map: &[Var]) -> Formula {
    fn walk(node: &TreeNode, var_map: &[Var], path: &mut Vec<Lit>, out: &mut Vec<Formula>) {
        match node {
            TreeNode::Leaf { leaf: true } => {}
            TreeNode::Leaf { leaf: false } => {
                if path.is_empty() {
                    out.push(Formula::Const(false));
                } else {
                    out.push(Formula::clause(path.iter().map(|&l| !l)));
                }
            }
            TreeNode::Split { feature, zero, one } => {
                let v = var_map[*feature];
                path.push(v.negative());
                walk(zero, var_map, path, out);
                path.pop();
                path.push(v.positive());
                walk(one, var_map, path, out);
                path.pop();
            }
        }
    }
    let mut clauses = Vec::new();
    walk(&dt.root, var_map, &mut Vec::new(), &mut clauses);
    Formula::and(clauses)
}

/// `X1..Xn`.
pub fn default_feature_names(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("X{i}")).collect()
}

/// Encodes `rf` as CNF over features `1..=n`, tree outputs `y_1..y_m`, the
/// forest output `y`, then auxiliaries. Each `y_i` is tied to its tree's
/// Tseitin output by a biconditional, `y` to the vote count through a
/// sequential counter, and `y` (or its negation) is asserted.
pub fn encode_forest<S: AsRef<str>>(
    rf: &RandomForest,
    polarity: Polarity,
    feature_names: &[S],
) -> Result<CnfModel, EncodeError> {
    rf.validate()?;
    if feature_names.len() != rf.n_features {
        return Err(EncodeError::ArityMismatch {
            expected: rf.n_features,
            got: feature_names.len(),
        });
    }
    let mut pool = VarPool::with_inputs(feature_names)?;
    let var_map: Vec<Var> = (0..rf.n_features).map(|i| pool.input(i).unwrap()).collect();
    let tree_outputs: Vec<Var> = rf.trees.iter().map(|_| pool.fresh()).collect();
    let y = pool.fresh();
    let mut cnf = Cnf::new();
    for (dt, &yi) in rf.trees.iter().zip(&tree_outputs) {
        match tree_to_formula(dt, &var_map) {
            Formula::Const(b) => {
                cnf.add([Lit::new(yi, b)]);
            }
            f => {
                let (def, out) = tseitin(&f, &mut pool);
                cnf.extend(&def);
                cnf.add([yi.negative(), out]);
                cnf.add([yi.positive(), !out]);
            }
        }
    }
    let ys: Vec<Lit> = tree_outputs.iter().map(|v| v.positive()).collect();
    let card = encode_card_geq(&ys, rf.threshold, y.positive(), &mut pool)?;
    cnf.extend(&card);
    cnf.add([Lit::new(y, polarity.asserted_class())]);
    cnf.reserve_vars(pool.num_vars());
    Ok(CnfModel {
        cnf,
        var_map,
        tree_outputs,
        forest_output: y,
        threshold: rf.threshold,
        polarity,
        pool,
    })
}

/// One unit literal per feature fixing it to its value in `x`.
pub fn encode_instance(x: &Instance, var_map: &[Var]) -> Result<Vec<Lit>, EncodeError> {
    if x.is_empty() {
        return Err(EncodeError::EmptyInstance);
    }
    if x.len() != var_map.len() {
        return Err(EncodeError::ArityMismatch {
            expected: var_map.len(),
            got: x.len(),
        });
    }
    Ok(x.values
        .iter()
        .zip(var_map)
        .map(|(&b, &v)| Lit::new(v, b))
        .collect())
}

/// Assembles the instance after checking that the hard clauses alone are
/// satisfiable.
pub fn build_pmaxsat(cm: &CnfModel, soft: Vec<Lit>) -> Result<PartialMaxSatInstance, EncodeError> {
    if !solve(&cm.cnf, &[])?.is_sat() {
        return Err(EncodeError::HardUnsat(u8::from(
            cm.polarity.asserted_class(),
        )));
    }
    Ok(PartialMaxSatInstance::new(cm.cnf.clone(), soft))
}
