use super::lexer::Pos;
use crate::expr::Expr;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstType {
    Int,
    Double,
    Bool,
}

#[derive(Clone, Debug)]
pub struct ConstDecl {
    pub name: String,
    pub ty: ConstType,
    /// `None` for constants that must be supplied at build time.
    pub value: Option<Expr>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct PlayerDecl {
    pub name: String,
    pub modules: Vec<String>,
    pub actions: Vec<String>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub enum VarKind {
    Int { low: Expr, high: Expr },
    Bool,
}

#[derive(Clone, Debug)]
pub struct VarDecl {
    pub name: String,
    pub kind: VarKind,
    pub init: Option<Expr>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct Update {
    /// `None` means probability one.
    pub prob: Option<Expr>,
    pub assigns: Vec<(String, Expr)>,
}

#[derive(Clone, Debug)]
pub struct Command {
    /// One label, or an action list `[a1,...,ak]`.
    pub actions: Vec<String>,
    pub guard: Expr,
    pub updates: Vec<Update>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct ModuleDecl {
    pub name: String,
    pub vars: Vec<VarDecl>,
    pub commands: Vec<Command>,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct LabelDecl {
    pub name: String,
    pub expr: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct RewardItem {
    /// `None` for a state reward.
    pub actions: Option<Vec<String>>,
    pub guard: Expr,
    pub value: Expr,
    pub pos: Pos,
}

#[derive(Clone, Debug)]
pub struct RewardDecl {
    pub name: String,
    pub items: Vec<RewardItem>,
    pub pos: Pos,
}

#[derive(Clone, Debug, Default)]
pub struct ModelAst {
    pub constants: Vec<ConstDecl>,
    pub players: Vec<PlayerDecl>,
    pub modules: Vec<ModuleDecl>,
    pub labels: Vec<LabelDecl>,
    pub rewards: Vec<RewardDecl>,
}

impl ModelAst {
    pub fn module(&self, name: &str) -> Option<&ModuleDecl> {
        self.modules.iter().find(|m| m.name == name)
    }

    /// Player index owning each module, by module position.
    pub fn module_owner(&self) -> Vec<Option<usize>> {
        self.modules.iter().map(|m| self.players.iter().position(|p| p.modules.contains(&m.name))).collect()
    }
}
