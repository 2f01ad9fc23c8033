//! Tree-walking interpreter with per-line coverage recording, plus the test
//! runner that produces the failing-count signal and the coverage matrix
//! consumed by fault localization.
//!
//! Variables use function-level scope (a `let` is visible from its statement
//! to the end of the function), matching the static checker.

use crate::lang::{Ast, BinOp, Expr, SourceProgram, Stmt, Type, UnOp};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeSet, HashMap};

pub const DEFAULT_STEP_BUDGET: u64 = 100_000;
const MAX_CALL_DEPTH: u32 = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Bool(bool),
    Int(i64),
}

impl Value {
    pub fn ty(self) -> Type {
        match self {
            Value::Int(_) => Type::Int,
            Value::Bool(_) => Type::Bool,
        }
    }
}

impl std::fmt::Display for Value {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Value::Int(n) => write!(f, "{n}"),
            Value::Bool(b) => write!(f, "{b}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Expectation {
    /// `{"runtime_error": true}` in suite files.
    RuntimeError {
        runtime_error: bool,
    },
    Value(Value),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub name: String,
    pub entry: String,
    pub args: Vec<Value>,
    pub expect: Expectation,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestSuite {
    pub tests: Vec<TestCase>,
}

impl TestSuite {
    pub fn from_json(text: &str) -> Result<TestSuite, serde_json::Error> {
        serde_json::from_str(text)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TestStatus {
    Pass,
    Fail,
    RuntimeError,
    Timeout,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub status: TestStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub name: String,
    pub outcome: TestOutcome,
    pub coverage: BTreeSet<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestReport {
    /// Results in declared suite order.
    pub tests: Vec<TestResult>,
    pub failing: u32,
}

impl TestReport {
    pub fn passing(&self) -> u32 {
        self.tests.len() as u32 - self.failing
    }

    pub fn failing_names(&self) -> Vec<&str> {
        self.tests
            .iter()
            .filter(|t| t.outcome.status != TestStatus::Pass)
            .map(|t| t.name.as_str())
            .collect()
    }

    pub fn first_failure(&self) -> Option<&TestResult> {
        self.tests.iter().find(|t| t.outcome.status != TestStatus::Pass)
    }
}

/// One-line functional-error diagnostic for a report with ≥1 failing test.
/// The verb encodes the failure mode (failed / runtime error / timed out) so
/// callers can classify without re-running.
pub fn render_fe_diagnostic(report: &TestReport) -> String {
    let first = report
        .first_failure()
        .expect("render_fe_diagnostic requires a failing report");
    let total = report.tests.len();
    let head = format!("[FE] {}/{} failing; test {}", report.failing, total, first.name);
    match first.outcome.status {
        TestStatus::Fail => format!("{head} failed: {}", first.outcome.detail),
        TestStatus::RuntimeError => format!("{head} runtime error: {}", first.outcome.detail),
        TestStatus::Timeout => format!("{head} timed out"),
        TestStatus::Pass => unreachable!(),
    }
}

enum RunError {
    Runtime { line: u32, message: String },
    Timeout,
}

/// Runs a single test. Caller guarantees `check(program)` is empty; runtime
/// errors and budget exhaustion are outcomes, not errors.
pub fn run_test(program: &SourceProgram, test: &TestCase, step_budget: u64) -> (TestOutcome, BTreeSet<u32>) {
    let ast = program.ast().expect("run_test requires a check-clean program");
    let mut interp = Interp {
        ast,
        steps: 0,
        budget: step_budget,
        coverage: BTreeSet::new(),
    };
    let result = interp.call(&test.entry, &test.args, 0);
    let outcome = match result {
        Ok(value) => match &test.expect {
            Expectation::Value(want) => {
                if value == *want {
                    TestOutcome { status: TestStatus::Pass, detail: String::new() }
                } else {
                    TestOutcome {
                        status: TestStatus::Fail,
                        detail: format!("expected {want} got {value}"),
                    }
                }
            }
            Expectation::RuntimeError { .. } => TestOutcome {
                status: TestStatus::Fail,
                detail: format!("expected runtime error, got {value}"),
            },
        },
        Err(RunError::Runtime { line, message }) => match &test.expect {
            Expectation::RuntimeError { runtime_error: true } => {
                TestOutcome { status: TestStatus::Pass, detail: String::new() }
            }
            _ => TestOutcome {
                status: TestStatus::RuntimeError,
                detail: format!("runtime error at line {line}: {message}"),
            },
        },
        Err(RunError::Timeout) => TestOutcome {
            status: TestStatus::Timeout,
            detail: format!("step budget of {step_budget} exhausted"),
        },
    };
    (outcome, interp.coverage)
}

/// Runs the whole suite in declared order. `failing` counts every non-pass
/// outcome: fail, runtime-error and timeout all contribute to N.
pub fn run_suite(program: &SourceProgram, suite: &TestSuite, step_budget: u64) -> TestReport {
    let mut tests = Vec::with_capacity(suite.tests.len());
    let mut failing = 0;
    for t in &suite.tests {
        let (outcome, coverage) = run_test(program, t, step_budget);
        if outcome.status != TestStatus::Pass {
            failing += 1;
        }
        tests.push(TestResult { name: t.name.clone(), outcome, coverage });
    }
    TestReport { tests, failing }
}

struct Interp<'a> {
    ast: &'a Ast,
    steps: u64,
    budget: u64,
    coverage: BTreeSet<u32>,
}

enum Flow {
    Normal,
    Return(Value),
}

impl<'a> Interp<'a> {
    fn tick(&mut self) -> Result<(), RunError> {
        self.steps += 1;
        if self.steps > self.budget {
            Err(RunError::Timeout)
        } else {
            Ok(())
        }
    }

    fn call(&mut self, name: &str, args: &[Value], depth: u32) -> Result<Value, RunError> {
        if depth > MAX_CALL_DEPTH {
            return Err(RunError::Runtime {
                line: 1,
                message: format!("call depth exceeded {MAX_CALL_DEPTH}"),
            });
        }
        let f = self.ast.function(name).ok_or_else(|| RunError::Runtime {
            line: 1,
            message: format!("no function named `{name}`"),
        })?;
        if f.params.len() != args.len() {
            return Err(RunError::Runtime {
                line: f.span.start_line,
                message: format!(
                    "`{name}` expects {} argument(s), got {}",
                    f.params.len(),
                    args.len()
                ),
            });
        }
        let mut env: HashMap<String, Value> = HashMap::new();
        for (p, v) in f.params.iter().zip(args) {
            if p.ty != v.ty() {
                return Err(RunError::Runtime {
                    line: f.span.start_line,
                    message: format!("argument `{}` expects {}, got {}", p.name, p.ty, v.ty()),
                });
            }
            env.insert(p.name.clone(), *v);
        }
        match self.exec_body(&f.body, &mut env, depth)? {
            Flow::Return(v) => Ok(v),
            Flow::Normal => Err(RunError::Runtime {
                line: f.span.end_line,
                message: format!("`{name}` ended without returning"),
            }),
        }
    }

    fn exec_body(
        &mut self,
        body: &'a [Stmt],
        env: &mut HashMap<String, Value>,
        depth: u32,
    ) -> Result<Flow, RunError> {
        for s in body {
            self.tick()?;
            self.coverage.insert(s.span().start_line);
            match s {
                Stmt::Let { name, expr, .. } | Stmt::Assign { name, expr, .. } => {
                    let v = self.eval(expr, env, depth)?;
                    env.insert(name.clone(), v);
                }
                Stmt::Return { expr, .. } => {
                    let v = self.eval(expr, env, depth)?;
                    return Ok(Flow::Return(v));
                }
                Stmt::If { cond, then_body, else_body, .. } => {
                    let c = self.eval_bool(cond, env, depth)?;
                    if c {
                        if let Flow::Return(v) = self.exec_body(then_body, env, depth)? {
                            return Ok(Flow::Return(v));
                        }
                    } else if let Some(eb) = else_body {
                        if let Flow::Return(v) = self.exec_body(eb, env, depth)? {
                            return Ok(Flow::Return(v));
                        }
                    }
                }
                Stmt::While { cond, body, .. } => loop {
                    self.tick()?;
                    self.coverage.insert(s.span().start_line);
                    if !self.eval_bool(cond, env, depth)? {
                        break;
                    }
                    if let Flow::Return(v) = self.exec_body(body, env, depth)? {
                        return Ok(Flow::Return(v));
                    }
                },
            }
        }
        Ok(Flow::Normal)
    }

    fn eval_bool(
        &mut self,
        e: &'a Expr,
        env: &mut HashMap<String, Value>,
        depth: u32,
    ) -> Result<bool, RunError> {
        match self.eval(e, env, depth)? {
            Value::Bool(b) => Ok(b),
            Value::Int(_) => Err(RunError::Runtime {
                line: e.span().start_line,
                message: "condition must be bool".into(),
            }),
        }
    }

    fn eval(
        &mut self,
        e: &'a Expr,
        env: &mut HashMap<String, Value>,
        depth: u32,
    ) -> Result<Value, RunError> {
        match e {
            Expr::Int(n, _) => Ok(Value::Int(*n)),
            Expr::Bool(b, _) => Ok(Value::Bool(*b)),
            Expr::Var(name, span) => env.get(name).copied().ok_or_else(|| RunError::Runtime {
                line: span.start_line,
                message: format!("`{name}` used before assignment"),
            }),
            Expr::Call { name, args, .. } => {
                let mut vals = Vec::with_capacity(args.len());
                for a in args {
                    vals.push(self.eval(a, env, depth)?);
                }
                self.tick()?;
                self.call(name, &vals, depth + 1)
            }
            Expr::Unary { op, operand, span } => {
                let v = self.eval(operand, env, depth)?;
                match (op, v) {
                    (UnOp::Neg, Value::Int(n)) => Ok(Value::Int(n.wrapping_neg())),
                    (UnOp::Not, Value::Bool(b)) => Ok(Value::Bool(!b)),
                    _ => Err(RunError::Runtime {
                        line: span.start_line,
                        message: "unary operator applied to wrong type".into(),
                    }),
                }
            }
            Expr::Binary { op, lhs, rhs, span } => {
                // && and || short-circuit.
                if matches!(op, BinOp::And | BinOp::Or) {
                    let l = self.eval_bool(lhs, env, depth)?;
                    return match (op, l) {
                        (BinOp::And, false) => Ok(Value::Bool(false)),
                        (BinOp::Or, true) => Ok(Value::Bool(true)),
                        _ => Ok(Value::Bool(self.eval_bool(rhs, env, depth)?)),
                    };
                }
                let l = self.eval(lhs, env, depth)?;
                let r = self.eval(rhs, env, depth)?;
                let type_err = || RunError::Runtime {
                    line: span.start_line,
                    message: format!("`{}` applied to wrong operand types", op.symbol()),
                };
                match op {
                    BinOp::Eq => Ok(Value::Bool(l == r)),
                    BinOp::Ne => Ok(Value::Bool(l != r)),
                    _ => {
                        let (Value::Int(a), Value::Int(b)) = (l, r) else {
                            return Err(type_err());
                        };
                        match op {
                            BinOp::Add => Ok(Value::Int(a.wrapping_add(b))),
                            BinOp::Sub => Ok(Value::Int(a.wrapping_sub(b))),
                            BinOp::Mul => Ok(Value::Int(a.wrapping_mul(b))),
                            BinOp::Div => {
                                if b == 0 {
                                    Err(RunError::Runtime {
                                        line: span.start_line,
                                        message: "division by zero".into(),
                                    })
                                } else {
                                    Ok(Value::Int(a.wrapping_div(b)))
                                }
                            }
                            BinOp::Rem => {
                                if b == 0 {
                                    Err(RunError::Runtime {
                                        line: span.start_line,
                                        message: "modulo by zero".into(),
                                    })
                                } else {
                                    Ok(Value::Int(a.wrapping_rem(b)))
                                }
                            }
                            BinOp::Lt => Ok(Value::Bool(a < b)),
                            BinOp::Le => Ok(Value::Bool(a <= b)),
                            BinOp::Gt => Ok(Value::Bool(a > b)),
                            BinOp::Ge => Ok(Value::Bool(a >= b)),
                            _ => unreachable!(),
                        }
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn prog(text: &str) -> SourceProgram {
        let p = SourceProgram::new(text);
        assert!(crate::check::check(&p).is_empty(), "test program must be clean");
        p
    }

    fn tc(name: &str, entry: &str, args: Vec<Value>, expect: Expectation) -> TestCase {
        TestCase { name: name.into(), entry: entry.into(), args, expect }
    }

    #[test]
    fn add_passes_and_covers_return_line() {
        let p = prog("fn main(a: int, b: int) -> int {\n  return a + b;\n}");
        let t = tc("t", "main", vec![Value::Int(2), Value::Int(3)], Expectation::Value(Value::Int(5)));
        let (out, cov) = run_test(&p, &t, DEFAULT_STEP_BUDGET);
        assert_eq!(out.status, TestStatus::Pass);
        assert_eq!(cov.into_iter().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn mismatch_gives_expected_got_detail() {
        let p = prog("fn main(a: int, b: int) -> int {\n  return a + b;\n}");
        let t = tc("t", "main", vec![Value::Int(2), Value::Int(3)], Expectation::Value(Value::Int(6)));
        let (out, _) = run_test(&p, &t, DEFAULT_STEP_BUDGET);
        assert_eq!(out.status, TestStatus::Fail);
        assert_eq!(out.detail, "expected 6 got 5");
    }

    #[test]
    fn infinite_loop_times_out() {
        let p = prog("fn main() -> int {\n  while (true) {\n    let x = 0;\n  }\n  return 0;\n}");
        // Distinct loop variable per iteration is not a thing here; the
        // shadowing rule is irrelevant at runtime.
        let t = tc("t", "main", vec![], Expectation::Value(Value::Int(0)));
        let (out, cov) = run_test(&p, &t, 10_000);
        assert_eq!(out.status, TestStatus::Timeout);
        assert!(cov.contains(&2));
    }

    #[test]
    fn division_by_zero_is_runtime_error_and_matchable() {
        let p = prog("fn main(a: int) -> int {\n  return 10 / a;\n}");
        let t = tc("t", "main", vec![Value::Int(0)], Expectation::RuntimeError { runtime_error: true });
        let (out, _) = run_test(&p, &t, DEFAULT_STEP_BUDGET);
        assert_eq!(out.status, TestStatus::Pass);
        let t2 = tc("t2", "main", vec![Value::Int(0)], Expectation::Value(Value::Int(1)));
        let (out2, _) = run_test(&p, &t2, DEFAULT_STEP_BUDGET);
        assert_eq!(out2.status, TestStatus::RuntimeError);
    }

    #[test]
    fn suite_aggregates_in_declared_order() {
        let p = prog("fn main(a: int, b: int) -> int {\n  return a + b;\n}");
        let suite = TestSuite {
            tests: vec![
                tc("a", "main", vec![Value::Int(1), Value::Int(1)], Expectation::Value(Value::Int(2))),
                tc("b", "main", vec![Value::Int(1), Value::Int(1)], Expectation::Value(Value::Int(3))),
            ],
        };
        let report = run_suite(&p, &suite, DEFAULT_STEP_BUDGET);
        assert_eq!(report.failing, 1);
        assert_eq!(report.tests[0].name, "a");
        assert_eq!(report.failing_names(), vec!["b"]);
    }

    #[test]
    fn determinism_including_coverage() {
        let p = prog(concat!(
            "fn main(n: int) -> int {\n  let s = 0;\n  let i = 0;\n  while (i < n) {\n",
            "    s = s + i;\n    i = i + 1;\n  }\n  return s;\n}"
        ));
        let t = tc("t", "main", vec![Value::Int(5)], Expectation::Value(Value::Int(10)));
        let r1 = run_test(&p, &t, DEFAULT_STEP_BUDGET);
        let r2 = run_test(&p, &t, DEFAULT_STEP_BUDGET);
        assert_eq!(r1, r2);
        assert_eq!(r1.0.status, TestStatus::Pass);
    }

    #[test]
    fn suite_json_format() {
        let json = r#"{"tests":[{"name":"t1","entry":"main","args":[2,3],"expect":5},
            {"name":"t2","entry":"main","args":[0],"expect":{"runtime_error":true}},
            {"name":"t3","entry":"flag","args":[true],"expect":false}]}"#;
        let suite = TestSuite::from_json(json).unwrap();
        assert_eq!(suite.tests.len(), 3);
        assert_eq!(suite.tests[0].args, vec![Value::Int(2), Value::Int(3)]);
        assert_eq!(suite.tests[0].expect, Expectation::Value(Value::Int(5)));
        assert_eq!(suite.tests[1].expect, Expectation::RuntimeError { runtime_error: true });
        assert_eq!(suite.tests[2].args, vec![Value::Bool(true)]);
    }
}
