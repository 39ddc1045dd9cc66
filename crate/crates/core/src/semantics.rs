//! Untyped lambda terms for semantic composition.
//!
//! Application is variadic: `(\v.body)(a1, .., ak)` binds `v := a1` and
//! applies the rest to the result, and applying a predicate or constant to
//! arguments appends them to its argument list. Under this convention
//! `(\w.shirt(w))(y, has(q))` normalizes to `shirt(y,has(q))`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(String),
    Const(String),
    /// Constant head applied to a non-empty argument list.
    Pred {
        head: String,
        args: Vec<Term>,
    },
    Abs {
        param: String,
        body: Box<Term>,
    },
    /// Term head applied to a non-empty argument list.
    App {
        func: Box<Term>,
        args: Vec<Term>,
    },
}

impl Term {
    pub fn var(name: impl Into<String>) -> Term {
        Term::Var(name.into())
    }

    pub fn constant(name: impl Into<String>) -> Term {
        Term::Const(name.into())
    }

    pub fn pred(head: impl Into<String>, args: Vec<Term>) -> Term {
        assert!(!args.is_empty(), "predicate needs at least one argument");
        Term::Pred {
            head: head.into(),
            args,
        }
    }

    pub fn abs(param: impl Into<String>, body: Term) -> Term {
        Term::Abs {
            param: param.into(),
            body: Box::new(body),
        }
    }

    pub fn app(func: Term, args: Vec<Term>) -> Term {
        assert!(!args.is_empty(), "application needs at least one argument");
        Term::App {
            func: Box::new(func),
            args,
        }
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut Vec::new(), &mut out);
        out
    }

    fn collect_free(&self, bound: &mut Vec<String>, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) => {
                if !bound.contains(v) {
                    out.insert(v.clone());
                }
            }
            Term::Const(_) => {}
            Term::Pred { args, .. } => args.iter().for_each(|a| a.collect_free(bound, out)),
            Term::Abs { param, body } => {
                bound.push(param.clone());
                body.collect_free(bound, out);
                bound.pop();
            }
            Term::App { func, args } => {
                func.collect_free(bound, out);
                args.iter().for_each(|a| a.collect_free(bound, out));
            }
        }
    }

    /// Every name used anywhere (variables, binders, constants, heads).
    fn all_names(&self, out: &mut BTreeSet<String>) {
        match self {
            Term::Var(v) | Term::Const(v) => {
                out.insert(v.clone());
            }
            Term::Pred { head, args } => {
                out.insert(head.clone());
                args.iter().for_each(|a| a.all_names(out));
            }
            Term::Abs { param, body } => {
                out.insert(param.clone());
                body.all_names(out);
            }
            Term::App { func, args } => {
                func.all_names(out);
                args.iter().for_each(|a| a.all_names(out));
            }
        }
    }

    /// True when no beta redex or unflattened application remains.
    pub fn is_normal(&self) -> bool {
        match self {
            Term::Var(_) | Term::Const(_) => true,
            Term::Pred { args, .. } => args.iter().all(Term::is_normal),
            Term::Abs { body, .. } => body.is_normal(),
            Term::App { func, args } => {
                matches!(**func, Term::Var(_)) && args.iter().all(Term::is_normal)
            }
        }
    }

    /// Renames bound variables to `x1..xn` in binder order, skipping names
    /// already used by free variables or constants.
    pub fn alpha_normalized(&self) -> Term {
        let mut taken = BTreeSet::new();
        self.all_names(&mut taken);
        let bound_names = self.binders();
        taken.retain(|n| !bound_names.contains(n));
        let mut counter = 0;
        rename_binders(self, &mut HashMap::new(), &mut counter, &taken, &|i| {
            format!("x{i}")
        })
    }

    /// Renames every binder with `fresh`, which is called with a running
    /// index. Used to keep variables of separate lexical uses apart.
    pub fn alpha_renamed(&self, fresh: &dyn Fn(usize) -> String) -> Term {
        let mut counter = 0;
        rename_binders(
            self,
            &mut HashMap::new(),
            &mut counter,
            &BTreeSet::new(),
            fresh,
        )
    }

    fn binders(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        fn go(t: &Term, out: &mut BTreeSet<String>) {
            match t {
                Term::Var(_) | Term::Const(_) => {}
                Term::Pred { args, .. } => args.iter().for_each(|a| go(a, out)),
                Term::Abs { param, body } => {
                    out.insert(param.clone());
                    go(body, out);
                }
                Term::App { func, args } => {
                    go(func, out);
                    args.iter().for_each(|a| go(a, out));
                }
            }
        }
        go(self, &mut out);
        out
    }
}

fn rename_binders(
    t: &Term,
    env: &mut HashMap<String, Vec<String>>,
    counter: &mut usize,
    taken: &BTreeSet<String>,
    fresh: &dyn Fn(usize) -> String,
) -> Term {
    match t {
        Term::Var(v) => Term::Var(
            env.get(v)
                .and_then(|stack| stack.last().cloned())
                .unwrap_or_else(|| v.clone()),
        ),
        Term::Const(_) => t.clone(),
        Term::Pred { head, args } => Term::Pred {
            head: head.clone(),
            args: args
                .iter()
                .map(|a| rename_binders(a, env, counter, taken, fresh))
                .collect(),
        },
        Term::Abs { param, body } => {
            let name = loop {
                *counter += 1;
                let candidate = fresh(*counter);
                if !taken.contains(&candidate) {
                    break candidate;
                }
            };
            env.entry(param.clone()).or_default().push(name.clone());
            let body = rename_binders(body, env, counter, taken, fresh);
            env.get_mut(param).map(Vec::pop);
            Term::abs(name, body)
        }
        Term::App { func, args } => Term::App {
            func: Box::new(rename_binders(func, env, counter, taken, fresh)),
            args: args
                .iter()
                .map(|a| rename_binders(a, env, counter, taken, fresh))
                .collect(),
        },
    }
}

/// Renders `\v.body`, `name(a,b)` and bare names.
impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) | Term::Const(v) => f.write_str(v),
            Term::Pred { head, args } => {
                f.write_str(head)?;
                write_args(f, args)
            }
            Term::Abs { param, body } => write!(f, "\\{param}.{body}"),
            Term::App { func, args } => {
                match **func {
                    Term::Var(_) | Term::Const(_) | Term::Pred { .. } | Term::App { .. } => {
                        write!(f, "{func}")?
                    }
                    Term::Abs { .. } => write!(f, "({func})")?,
                }
                write_args(f, args)
            }
        }
    }
}

fn write_args(f: &mut fmt::Formatter<'_>, args: &[Term]) -> fmt::Result {
    f.write_str("(")?;
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            f.write_str(",")?;
        }
        write!(f, "{a}")?;
    }
    f.write_str(")")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReductionBudget {
    pub max_steps: usize,
}

impl Default for ReductionBudget {
    fn default() -> Self {
        ReductionBudget { max_steps: 10_000 }
    }
}

#[derive(Clone, Debug, Error, PartialEq, Eq)]
pub enum SemError {
    #[error("beta reduction did not terminate within {0} steps")]
    BudgetExhausted(usize),
}

/// Capture-avoiding substitution of `s` for free occurrences of `v` in `t`.
pub fn substitute(t: &Term, v: &str, s: &Term) -> Term {
    let fv_s = s.free_vars();
    subst(t, v, s, &fv_s)
}

fn subst(t: &Term, v: &str, s: &Term, fv_s: &BTreeSet<String>) -> Term {
    match t {
        Term::Var(x) if x == v => s.clone(),
        Term::Var(_) | Term::Const(_) => t.clone(),
        Term::Pred { head, args } => Term::Pred {
            head: head.clone(),
            args: args.iter().map(|a| subst(a, v, s, fv_s)).collect(),
        },
        Term::Abs { param, body } => {
            if param == v {
                return t.clone();
            }
            let body_fv = body.free_vars();
            if !body_fv.contains(v) {
                return t.clone();
            }
            if fv_s.contains(param) {
                let mut fresh = format!("{param}'");
                while fv_s.contains(&fresh) || body_fv.contains(&fresh) || fresh == v {
                    fresh.push('\'');
                }
                let renamed = subst(
                    body,
                    param,
                    &Term::Var(fresh.clone()),
                    &BTreeSet::from([fresh.clone()]),
                );
                Term::abs(fresh, subst(&renamed, v, s, fv_s))
            } else {
                Term::abs(param.clone(), subst(body, v, s, fv_s))
            }
        }
        Term::App { func, args } => Term::App {
            func: Box::new(subst(func, v, s, fv_s)),
            args: args.iter().map(|a| subst(a, v, s, fv_s)).collect(),
        },
    }
}

struct Reducer {
    steps: usize,
    budget: usize,
}

impl Reducer {
    fn tick(&mut self) -> Result<(), SemError> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(SemError::BudgetExhausted(self.budget))
        } else {
            Ok(())
        }
    }

    /// Reduces to weak head normal form: the head is a lambda, a constant,
    /// a predicate, a variable, or a variable applied to arguments.
    fn whnf(&mut self, t: Term) -> Result<Term, SemError> {
        let mut cur = t;
        loop {
            let Term::App { func, args } = cur else {
                return Ok(cur);
            };
            let head = self.whnf(*func)?;
            cur = match head {
                Term::Abs { param, body } => {
                    self.tick()?;
                    let mut args = args.into_iter();
                    let first = args.next().expect("non-empty application");
                    let reduced = substitute(&body, &param, &first);
                    let rest: Vec<Term> = args.collect();
                    if rest.is_empty() {
                        reduced
                    } else {
                        Term::App {
                            func: Box::new(reduced),
                            args: rest,
                        }
                    }
                }
                Term::Pred {
                    head,
                    args: mut existing,
                } => {
                    existing.extend(args);
                    return Ok(Term::Pred {
                        head,
                        args: existing,
                    });
                }
                Term::Const(c) => return Ok(Term::Pred { head: c, args }),
                Term::App {
                    func: inner,
                    args: mut existing,
                } => {
                    existing.extend(args);
                    return Ok(Term::App {
                        func: inner,
                        args: existing,
                    });
                }
                var @ Term::Var(_) => {
                    return Ok(Term::App {
                        func: Box::new(var),
                        args,
                    })
                }
            };
        }
    }

    fn normalize(&mut self, t: Term) -> Result<Term, SemError> {
        Ok(match self.whnf(t)? {
            Term::Abs { param, body } => Term::abs(param, self.normalize(*body)?),
            Term::Pred { head, args } => Term::Pred {
                head,
                args: self.normalize_all(args)?,
            },
            Term::App { func, args } => Term::App {
                func,
                args: self.normalize_all(args)?,
            },
            atom => atom,
        })
    }

    fn normalize_all(&mut self, args: Vec<Term>) -> Result<Vec<Term>, SemError> {
        args.into_iter().map(|a| self.normalize(a)).collect()
    }
}

/// Leftmost-outermost reduction to beta-normal form.
pub fn beta_reduce(t: &Term, budget: ReductionBudget) -> Result<Term, SemError> {
    beta_reduce_counted(t, budget).map(|(t, _)| t)
}

/// As [`beta_reduce`], also returning the number of beta steps taken.
pub fn beta_reduce_counted(t: &Term, budget: ReductionBudget) -> Result<(Term, usize), SemError> {
    let mut r = Reducer {
        steps: 0,
        budget: budget.max_steps,
    };
    let out = r.normalize(t.clone())?;
    Ok((out, r.steps))
}

pub fn apply_sem(f: &Term, a: &Term) -> Result<Term, SemError> {
    beta_reduce(
        &Term::app(f.clone(), vec![a.clone()]),
        ReductionBudget::default(),
    )
}

/// `\x.f(g(x))` in normal form.
pub fn compose_sem(f: &Term, g: &Term) -> Result<Term, SemError> {
    let mut avoid = f.free_vars();
    avoid.extend(g.free_vars());
    let mut x = "x".to_string();
    while avoid.contains(&x) {
        x.push('\'');
    }
    let inner = Term::app(g.clone(), vec![Term::var(x.clone())]);
    let body = Term::app(f.clone(), vec![inner]);
    beta_reduce(&Term::abs(x, body), ReductionBudget::default())
}

/// Identity up to consistent renaming of bound variables.
pub fn alpha_equivalent(a: &Term, b: &Term) -> bool {
    fn go(a: &Term, b: &Term, env_a: &mut Vec<String>, env_b: &mut Vec<String>) -> bool {
        match (a, b) {
            (Term::Var(x), Term::Var(y)) => {
                let ix = env_a.iter().rposition(|n| n == x);
                let iy = env_b.iter().rposition(|n| n == y);
                match (ix, iy) {
                    (Some(i), Some(j)) => i == j,
                    (None, None) => x == y,
                    _ => false,
                }
            }
            (Term::Const(x), Term::Const(y)) => x == y,
            (Term::Pred { head: h, args: xs }, Term::Pred { head: g, args: ys }) => {
                h == g
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| go(x, y, env_a, env_b))
            }
            (Term::Abs { param: p, body: x }, Term::Abs { param: q, body: y }) => {
                env_a.push(p.clone());
                env_b.push(q.clone());
                let ok = go(x, y, env_a, env_b);
                env_a.pop();
                env_b.pop();
                ok
            }
            (Term::App { func: f, args: xs }, Term::App { func: g, args: ys }) => {
                go(f, g, env_a, env_b)
                    && xs.len() == ys.len()
                    && xs.iter().zip(ys).all(|(x, y)| go(x, y, env_a, env_b))
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}
