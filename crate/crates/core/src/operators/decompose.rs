use super::operator::{OaOperator, OperatorKind};
use crate::error::{Error, Result};

/// Splits `T = S1 − S2` with `S1`, `S2` positive by taking the pointwise
/// positive and negative parts of the kernel (Urysohn) or of the
/// superposition function (Nemytskii).
pub fn positive_part_decomposition(op: &OaOperator) -> Result<(OaOperator, OaOperator)> {
    match &op.spec().kind {
        OperatorKind::Urysohn {
            kernel,
            output_cells,
            restrict,
        } => {
            let part = |k| OperatorKind::Urysohn {
                kernel: k,
                output_cells: *output_cells,
                restrict: *restrict,
            };
            Ok((
                op.with_kind(part(kernel.positive_part()))?,
                op.with_kind(part(kernel.negative_part()))?,
            ))
        }
        OperatorKind::Nemytskii { function } => Ok((
            op.with_kind(OperatorKind::Nemytskii {
                function: function.positive_part(),
            })?,
            op.with_kind(OperatorKind::Nemytskii {
                function: function.negative_part(),
            })?,
        )),
        _ => Err(Error::Unsupported(format!(
            "no kernel decomposition for {} operators",
            op.spec().kind_name()
        ))),
    }
}
