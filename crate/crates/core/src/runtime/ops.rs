//! Operator semantics: strict typing with Integer to Real promotion only.

use std::cmp::Ordering;

use super::{ErrorKind, RuntimeError};
use crate::oal::{BinaryOp, UnaryOp};
use crate::value::Value;

fn mismatch(op: &str, l: &Value, r: &Value) -> RuntimeError {
    RuntimeError::new(
        ErrorKind::TypeMismatch,
        format!("cannot apply `{op}` to {} and {}", l.type_name(), r.type_name()),
    )
}

fn overflow(op: &str) -> RuntimeError {
    RuntimeError::new(ErrorKind::ArithmeticOverflow, format!("`{op}` overflowed"))
}

fn as_real(v: &Value) -> Option<f64> {
    match v {
        Value::Integer(i) => Some(*i as f64),
        Value::Real(r) => Some(*r),
        _ => None,
    }
}

fn real_result(op: &str, v: f64) -> Result<Value, RuntimeError> {
    if v.is_finite() {
        Ok(Value::Real(v))
    } else {
        Err(overflow(op))
    }
}

/// Every binary operator except the short-circuit `and`/`or`.
pub(crate) fn binary(op: BinaryOp, l: Value, r: Value) -> Result<Value, RuntimeError> {
    let sym = op.as_str();
    match op {
        BinaryOp::Add | BinaryOp::Sub | BinaryOp::Mul => {
            if let (Value::Integer(a), Value::Integer(b)) = (&l, &r) {
                let v = match op {
                    BinaryOp::Add => a.checked_add(*b),
                    BinaryOp::Sub => a.checked_sub(*b),
                    _ => a.checked_mul(*b),
                };
                return v.map(Value::Integer).ok_or_else(|| overflow(sym));
            }
            if let (BinaryOp::Add, Value::String(a), Value::String(b)) = (op, &l, &r) {
                return Ok(Value::String(format!("{a}{b}")));
            }
            match (as_real(&l), as_real(&r)) {
                (Some(a), Some(b)) => real_result(
                    sym,
                    match op {
                        BinaryOp::Add => a + b,
                        BinaryOp::Sub => a - b,
                        _ => a * b,
                    },
                ),
                _ => Err(mismatch(sym, &l, &r)),
            }
        }
        BinaryOp::Div => match (as_real(&l), as_real(&r)) {
            (Some(_), Some(0.0)) => Err(RuntimeError::new(ErrorKind::DivisionByZero, "division by zero")),
            (Some(a), Some(b)) => real_result(sym, a / b),
            _ => Err(mismatch(sym, &l, &r)),
        },
        BinaryOp::Eq | BinaryOp::Ne => {
            let equal = equals(&l, &r).ok_or_else(|| mismatch(sym, &l, &r))?;
            Ok(Value::Boolean(equal == (op == BinaryOp::Eq)))
        }
        BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
            let ord = compare(&l, &r).ok_or_else(|| mismatch(sym, &l, &r))?;
            Ok(Value::Boolean(match op {
                BinaryOp::Lt => ord == Ordering::Less,
                BinaryOp::Le => ord != Ordering::Greater,
                BinaryOp::Gt => ord == Ordering::Greater,
                _ => ord != Ordering::Less,
            }))
        }
        BinaryOp::And | BinaryOp::Or => unreachable!("short-circuit operators are lowered to jumps"),
    }
}

fn equals(l: &Value, r: &Value) -> Option<bool> {
    Some(match (l, r) {
        (Value::Integer(a), Value::Integer(b)) => a == b,
        (Value::Boolean(a), Value::Boolean(b)) => a == b,
        (Value::String(a), Value::String(b)) => a == b,
        (Value::Handle(a), Value::Handle(b)) => a == b,
        (Value::Set(a), Value::Set(b)) => a == b,
        _ => as_real(l)? == as_real(r)?,
    })
}

fn compare(l: &Value, r: &Value) -> Option<Ordering> {
    match (l, r) {
        (Value::Integer(a), Value::Integer(b)) => Some(a.cmp(b)),
        (Value::String(a), Value::String(b)) => Some(a.cmp(b)),
        _ => as_real(l)?.partial_cmp(&as_real(r)?),
    }
}

pub(crate) fn unary(op: UnaryOp, v: Value) -> Result<Value, RuntimeError> {
    let bad = |v: &Value| {
        RuntimeError::new(ErrorKind::TypeMismatch, format!("cannot apply `{}` to {}", op.as_str(), v.type_name()))
    };
    match (op, &v) {
        (UnaryOp::Neg, Value::Integer(i)) => i.checked_neg().map(Value::Integer).ok_or_else(|| overflow("-")),
        (UnaryOp::Neg, Value::Real(r)) => Ok(Value::Real(-r)),
        (UnaryOp::Not, Value::Boolean(b)) => Ok(Value::Boolean(!b)),
        (UnaryOp::Cardinality, Value::Set(ids)) => Ok(Value::Integer(ids.len() as i64)),
        (UnaryOp::Cardinality, Value::Handle(h)) => Ok(Value::Integer(h.is_some() as i64)),
        (UnaryOp::Empty, Value::Set(ids)) => Ok(Value::Boolean(ids.is_empty())),
        (UnaryOp::Empty, Value::Handle(h)) => Ok(Value::Boolean(h.is_none())),
        (UnaryOp::NotEmpty, Value::Set(ids)) => Ok(Value::Boolean(!ids.is_empty())),
        (UnaryOp::NotEmpty, Value::Handle(h)) => Ok(Value::Boolean(h.is_some())),
        _ => Err(bad(&v)),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::InstanceId;

    #[test]
    fn arithmetic() {
        assert_eq!(binary(BinaryOp::Add, Value::Integer(1), Value::Integer(2)), Ok(Value::Integer(3)));
        assert_eq!(binary(BinaryOp::Div, Value::Integer(3), Value::Integer(2)), Ok(Value::Real(1.5)));
        assert_eq!(binary(BinaryOp::Mul, Value::Integer(2), Value::Real(0.5)), Ok(Value::Real(1.0)));
        assert_eq!(
            binary(BinaryOp::Add, Value::String("a".into()), Value::String("b".into())),
            Ok(Value::String("ab".into()))
        );
        let err = binary(BinaryOp::Div, Value::Integer(1), Value::Integer(0)).unwrap_err();
        assert_eq!(err.kind, ErrorKind::DivisionByZero);
        let err = binary(BinaryOp::Add, Value::Integer(1), Value::String("x".into())).unwrap_err();
        assert_eq!(err.kind, ErrorKind::TypeMismatch);
        let err = binary(BinaryOp::Add, Value::Integer(i64::MAX), Value::Integer(1)).unwrap_err();
        assert_eq!(err.kind, ErrorKind::ArithmeticOverflow);
        let err = binary(BinaryOp::Mul, Value::Real(1e308), Value::Real(10.0)).unwrap_err();
        assert_eq!(err.kind, ErrorKind::ArithmeticOverflow);
    }

    #[test]
    fn comparisons() {
        assert_eq!(binary(BinaryOp::Eq, Value::Integer(1), Value::Real(1.0)), Ok(Value::Boolean(true)));
        assert_eq!(
            binary(BinaryOp::Lt, Value::String("a".into()), Value::String("b".into())),
            Ok(Value::Boolean(true))
        );
        assert_eq!(binary(BinaryOp::Ne, Value::Handle(Some(InstanceId(1))), Value::NONE), Ok(Value::Boolean(true)));
        assert!(binary(BinaryOp::Lt, Value::Boolean(true), Value::Boolean(false)).is_err());
        assert!(binary(BinaryOp::Eq, Value::Integer(1), Value::String("1".into())).is_err());
    }

    #[test]
    fn unary_ops() {
        let set = Value::set(vec![InstanceId(2), InstanceId(1)]);
        assert_eq!(unary(UnaryOp::Cardinality, set.clone()), Ok(Value::Integer(2)));
        assert_eq!(unary(UnaryOp::NotEmpty, set), Ok(Value::Boolean(true)));
        assert_eq!(unary(UnaryOp::Empty, Value::NONE), Ok(Value::Boolean(true)));
        assert_eq!(unary(UnaryOp::Neg, Value::Integer(3)), Ok(Value::Integer(-3)));
        assert!(unary(UnaryOp::Not, Value::Integer(1)).is_err());
        assert!(unary(UnaryOp::Neg, Value::Integer(i64::MIN)).is_err());
    }
}
