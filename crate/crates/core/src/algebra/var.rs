use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;

/// A variable of the shared namespace.
///
/// Parameters and inputs are 1-based, matching circuit leaf indices. `Aux`
/// variables are introduced by elimination (`Aux(0)` is the eliminated
/// variable `Y`). The derived order (parameters, then inputs, then auxiliary)
/// is the variable order used by the monomial order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    Param(u32),
    Input(u32),
    Aux(u32),
}

impl Var {
    pub const Y: Var = Var::Aux(0);

    pub fn is_input(self) -> bool {
        matches!(self, Var::Input(_))
    }

    pub fn is_param(self) -> bool {
        matches!(self, Var::Param(_))
    }

    fn default_name(self) -> String {
        match self {
            Var::Param(k) => format!("U{k}"),
            Var::Input(i) => format!("X{i}"),
            Var::Aux(0) => String::from("Y"),
            Var::Aux(k) => format!("Y{k}"),
        }
    }
}

/// Display names for variables. Unnamed variables fall back to `U<k>`,
/// `X<i>` and `Y`/`Y<k>`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct VarNames {
    names: BTreeMap<Var, String>,
}

impl VarNames {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, var: Var, name: impl Into<String>) -> Self {
        self.names.insert(var, name.into());
        self
    }

    pub fn insert(&mut self, var: Var, name: impl Into<String>) {
        self.names.insert(var, name.into());
    }

    pub fn name(&self, var: Var) -> String {
        match self.names.get(&var) {
            Some(n) => n.clone(),
            None => var.default_name(),
        }
    }

    /// Inverse lookup; explicit names shadow the default scheme.
    pub fn resolve(&self, name: &str) -> Option<Var> {
        if let Some((v, _)) = self.names.iter().find(|(_, n)| n.as_str() == name) {
            return Some(*v);
        }
        let parsed = if name == "Y" {
            Some(Var::Y)
        } else {
            let (head, tail) = name.split_at(1.min(name.len()));
            let idx: Option<u32> = tail.parse().ok();
            match (head, idx) {
                ("U", Some(k)) if k >= 1 => Some(Var::Param(k)),
                ("X", Some(i)) if i >= 1 => Some(Var::Input(i)),
                ("Y", Some(k)) if k >= 1 => Some(Var::Aux(k)),
                _ => None,
            }
        };
        // A default name that was reassigned to another variable is not
        // available for its default owner.
        match parsed {
            Some(v) if self.names.contains_key(&v) => None,
            other => other,
        }
    }
}
