"""First-order kernel: syntax, parsing, prenex forms, hierarchy, evaluation."""
from .parser import (
    ArityError,
    FormulaError,
    ParseError,
    UnknownSymbolError,
    parse_formula,
    parse_sentence,
    parse_tree,
)
from .prenex import PI, SIGMA, QuantClass, QuantClassSet, classify_formula, to_prenex
from .semantics import EvaluationError, FuncTable, Structure, element_key, eval_formula
from .syntax import (
    And,
    Const,
    Eq,
    Formula,
    Func,
    Implies,
    Not,
    Or,
    Quant,
    Rel,
    Signature,
    SignatureError,
    SymbolDecl,
    Truth,
    Var,
    pretty,
)

__all__ = [
    "And", "ArityError", "Const", "Eq", "EvaluationError", "Formula", "FormulaError",
    "Func", "FuncTable", "Implies", "Not", "Or", "PI", "ParseError", "Quant", "QuantClass",
    "QuantClassSet", "Rel", "SIGMA", "Signature", "SignatureError", "Structure", "SymbolDecl",
    "Truth", "UnknownSymbolError", "Var", "classify_formula", "element_key", "eval_formula",
    "parse_formula", "parse_sentence", "parse_tree", "pretty", "to_prenex",
]
