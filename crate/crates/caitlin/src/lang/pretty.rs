//! Canonical source renderer. Reparsing the output yields a structurally
//! identical tree with identical construct and expression ids, which is
//! what the mutation harness relies on.

use super::ast::*;

pub fn pretty_print(program: &Program) -> String {
    let mut out = String::new();
    out.push_str(&format!("PROGRAM {} ;\n", program.name));
    if !program.declarations.is_empty() {
        out.push_str("VAR\n");
        for decl in &program.declarations {
            out.push_str(&format!("  {} : {} ;\n", decl.name, decl.ty));
        }
    }
    out.push_str("BEGIN\n");
    write_seq(&mut out, &program.body, 1);
    out.push_str("END .\n");
    out
}

fn indent(out: &mut String, level: usize) {
    for _ in 0..level {
        out.push_str("  ");
    }
}

fn write_seq(out: &mut String, body: &[Statement], level: usize) {
    for (i, stmt) in body.iter().enumerate() {
        write_statement(out, stmt, level);
        if i + 1 < body.len() {
            out.push_str(" ;");
        }
        out.push('\n');
    }
}

fn write_statement(out: &mut String, stmt: &Statement, level: usize) {
    indent(out, level);
    match stmt {
        Statement::Assign { target, value, .. } => {
            out.push_str(&format!("{} := {}", target, expr_text(value)));
        }
        Statement::Writeln { args, .. } => {
            out.push_str("Writeln");
            if !args.is_empty() {
                out.push_str(" (");
                for (i, arg) in args.iter().enumerate() {
                    if i > 0 {
                        out.push_str(", ");
                    }
                    match arg {
                        WriteArg::Str(text) => {
                            out.push_str(&format!("'{}'", text.replace('\'', "''")));
                        }
                        WriteArg::Expr(expr) => out.push_str(&expr_text(expr)),
                    }
                }
                out.push(')');
            }
        }
        Statement::Readln { target, .. } => {
            out.push_str(&format!("Readln ({target})"));
        }
        Statement::Compound { body, .. } => {
            out.push_str("BEGIN\n");
            write_seq(out, body, level + 1);
            indent(out, level);
            out.push_str("END");
        }
        Statement::While { cond, body, .. } => {
            out.push_str(&format!("WHILE {} DO\n", expr_text(cond)));
            write_statement_no_trailing(out, body, level + 1);
        }
        Statement::Repeat { body, cond, .. } => {
            out.push_str("REPEAT\n");
            write_seq(out, body, level + 1);
            indent(out, level);
            out.push_str(&format!("UNTIL {}", expr_text(cond)));
        }
        Statement::For { downto, var, from, to, body, .. } => {
            let dir = if *downto { "DOWNTO" } else { "TO" };
            out.push_str(&format!(
                "FOR {} := {} {} {} DO\n",
                var,
                expr_text(from),
                dir,
                expr_text(to)
            ));
            write_statement_no_trailing(out, body, level + 1);
        }
        Statement::If { cond, then_branch, else_branch, .. } => {
            out.push_str(&format!("IF {} THEN\n", expr_text(cond)));
            // An else-less IF ending the THEN branch would capture our
            // ELSE on reparse; close it off with a block.
            if else_branch.is_some() && ends_with_dangling_if(then_branch) {
                indent(out, level + 1);
                out.push_str("BEGIN\n");
                write_statement_no_trailing(out, then_branch, level + 2);
                out.push('\n');
                indent(out, level + 1);
                out.push_str("END");
            } else {
                write_statement_no_trailing(out, then_branch, level + 1);
            }
            if let Some(else_branch) = else_branch {
                out.push('\n');
                indent(out, level);
                out.push_str("ELSE\n");
                write_statement_no_trailing(out, else_branch, level + 1);
            }
        }
        Statement::Case { selector, arms, else_body, .. } => {
            out.push_str(&format!("CASE {} OF\n", expr_text(selector)));
            for (i, arm) in arms.iter().enumerate() {
                indent(out, level + 1);
                let labels: Vec<String> = arm.labels.iter().map(|l| l.to_string()).collect();
                out.push_str(&format!("{} : ", labels.join(", ")));
                write_arm_body(out, &arm.body, level + 1);
                // The separator before ELSE keeps a trailing IF in the
                // last arm from capturing it.
                if i + 1 < arms.len() || else_body.is_some() {
                    out.push_str(" ;");
                }
                out.push('\n');
            }
            if let Some(else_body) = else_body {
                indent(out, level);
                out.push_str("ELSE\n");
                write_seq(out, else_body, level + 1);
            }
            indent(out, level);
            out.push_str("END");
        }
        Statement::Empty { .. } => {}
    }
}

/// Statement in a context where the caller handles the separator.
fn write_statement_no_trailing(out: &mut String, stmt: &Statement, level: usize) {
    write_statement(out, stmt, level);
}

/// True when the rightmost open position of `stmt` is an IF without an
/// ELSE, i.e. a following ELSE token would bind into `stmt`.
fn ends_with_dangling_if(stmt: &Statement) -> bool {
    match stmt {
        Statement::If { else_branch: None, .. } => true,
        Statement::If { else_branch: Some(e), .. } => ends_with_dangling_if(e),
        Statement::While { body, .. } | Statement::For { body, .. } => ends_with_dangling_if(body),
        _ => false,
    }
}

/// Case arm bodies print inline after the label; compound bodies fall
/// back to the ordinary block form.
fn write_arm_body(out: &mut String, stmt: &Statement, level: usize) {
    let mut tmp = String::new();
    write_statement(&mut tmp, stmt, level);
    out.push_str(tmp.trim_start());
}

fn expr_text(expr: &Expr) -> String {
    expr_with_context(expr, 0)
}

/// Renders with minimal parentheses: a binary child is parenthesized
/// when its operator binds no tighter than the context requires.
fn expr_with_context(expr: &Expr, min_prec: u8) -> String {
    match expr {
        Expr::IntLit { value, .. } => value.to_string(),
        Expr::BoolLit { value, .. } => if *value { "TRUE" } else { "FALSE" }.to_string(),
        Expr::CharLit { value, .. } => format!("'{}'", if *value == '\'' { "''".to_string() } else { value.to_string() }),
        Expr::Var { name, .. } => name.clone(),
        Expr::Unary { op, operand, .. } => {
            let inner = expr_with_context(operand, 6);
            match op {
                UnaryOp::Not => format!("NOT {inner}"),
                UnaryOp::Neg => format!("-{inner}"),
            }
        }
        Expr::Binary { op, lhs, rhs, .. } => {
            let prec = op.precedence();
            let left = expr_with_context(lhs, prec);
            // Left-associative: the right operand needs one level more.
            let right = expr_with_context(rhs, prec + 1);
            let text = format!("{} {} {}", left, op.symbol(), right);
            if prec < min_prec {
                format!("({text})")
            } else {
                text
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lang::{compile, parse, tokenize};

    /// Reparse the pretty output and compare everything except source
    /// positions and digests, which necessarily change.
    fn assert_round_trips(source: &str) {
        let program = compile(source).unwrap();
        let printed = pretty_print(&program);
        let reparsed = parse(&tokenize(&printed).unwrap_or_else(|e| {
            panic!("pretty output failed to lex: {e}\n{printed}")
        }))
        .unwrap_or_else(|e| panic!("pretty output failed to parse: {e}\n{printed}"));
        assert_eq!(
            crate::lang::normalized(&program),
            crate::lang::normalized(&reparsed),
            "reparsed tree differs\n{printed}"
        );
        let reprinted = pretty_print(&reparsed);
        assert_eq!(printed, reprinted, "pretty printing is not stable");
    }

    #[test]
    fn loops_and_selections_round_trip() {
        assert_round_trips(
            "PROGRAM demo ;
             VAR i, x, total : INTEGER ; c : CHAR ; flag : BOOLEAN ;
             BEGIN
               total := 0 ;
               FOR i := 1 TO 6 DO total := total + i ;
               FOR i := 6 DOWNTO 1 DO Writeln(i) ;
               x := 0 ;
               WHILE x < 3 DO BEGIN x := x + 1 ; Writeln('tick', x) END ;
               REPEAT x := x - 1 UNTIL x <= 0 ;
               flag := x = 0 AND total > 3 OR FALSE ;
               IF flag THEN Writeln('yes') ELSE Writeln('no') ;
               IF NOT flag THEN Writeln ;
               c := 'q' ;
               CASE c OF
                 'a', 'b' : Writeln('ab') ;
                 'q' : Writeln('quit')
               ELSE Writeln('other')
               END ;
               CASE x OF 0 : Writeln('zero') ; 1 : Writeln('one') END
             END .",
        );
    }

    #[test]
    fn parenthesized_expressions_round_trip() {
        assert_round_trips(
            "PROGRAM p ; VAR a, b : INTEGER ;
             BEGIN a := (1 + 2) * 3 ; b := -(a + 1) ; a := 1 - (2 - 3) END .",
        );
    }

    #[test]
    fn minimal_parens_reproduce_parse_shape() {
        let program = compile(
            "PROGRAM p ; VAR a, b, c : BOOLEAN ;
             BEGIN a := (a OR b) AND c ; b := NOT (a AND b) END .",
        )
        .unwrap();
        let printed = pretty_print(&program);
        assert!(printed.contains("(a OR b) AND c"));
        assert!(printed.contains("NOT (a AND b)"));
    }

    #[test]
    fn empty_statements_round_trip() {
        assert_round_trips("PROGRAM p ; BEGIN ; ; END .");
    }

    #[test]
    fn dangling_else_positions_round_trip() {
        assert_round_trips(
            "PROGRAM p ; VAR a, b : BOOLEAN ; x : INTEGER ;
             BEGIN
               IF a THEN BEGIN IF b THEN x := 1 END ELSE x := 2 ;
               IF a THEN IF b THEN x := 3 ELSE x := 4 ;
               IF a THEN WHILE b DO IF a THEN x := 5 ELSE x := 6 ;
               CASE x OF 1 : IF a THEN x := 7 ELSE x := 8 END ;
               CASE x OF 2 : IF a THEN x := 9 ; 3 : x := 0 ELSE x := 1 END
             END .",
        );
    }

    #[test]
    fn if_with_dangling_then_branch_gets_a_block() {
        let program = compile(
            "PROGRAM p ; VAR a, b : BOOLEAN ; x : INTEGER ;
             BEGIN IF a THEN BEGIN IF b THEN x := 1 END ELSE x := 2 END .",
        )
        .unwrap();
        let printed = pretty_print(&program);
        assert!(printed.contains("BEGIN"), "needs a disambiguating block:\n{printed}");
        assert_round_trips(&printed);
    }
}
