#pragma once

#include "normsym/errors.hpp"
#include "normsym/taylor.hpp"
#include "normsym/util.hpp"

#include <memory>
#include <string>

namespace normsym {

// Closed-form scalar expressions over variables x1..xd (position) and
// zeta1..zetad (fiber), real constants and pi, operators + - * / ^ and the
// functions exp, sin, cos, sqrt, log. Grammar (EBNF):
//
//   expr    := term { ("+" | "-") term }
//   term    := factor { ("*" | "/") factor }
//   factor  := unary [ "^" factor ]
//   unary   := "-" unary | primary
//   primary := number | ident | ident "(" expr ")" | "(" expr ")"
//   ident   := "x"<1-based index> | "zeta"<index> | "pi"
//              | "exp" | "sin" | "cos" | "sqrt" | "log"
//
// Expressions are immutable and cheap to copy.
class ExprNode;

class Expr {
  public:
    Expr() = default;

    double eval_real(const Vec& x, const Vec& zeta) const;
    // evaluate in Taylor arithmetic; xs/zetas supply series per variable
    Taylor eval_taylor(const std::vector<Taylor>& xs, const std::vector<Taylor>& zetas) const;

    Expr diff_x(int i) const;
    Expr diff_zeta(int i) const;

    bool valid() const { return node_ != nullptr; }
    std::string to_string() const;

    // constructors
    static Expr constant(double c);
    static Expr var_x(int i);
    static Expr var_zeta(int i);
    static Expr add(const Expr& a, const Expr& b);
    static Expr sub(const Expr& a, const Expr& b);
    static Expr mul(const Expr& a, const Expr& b);
    static Expr div(const Expr& a, const Expr& b);
    static Expr pow(const Expr& a, const Expr& b);
    static Expr fun(const std::string& name, const Expr& a);

    explicit Expr(std::shared_ptr<const ExprNode> n) : node_(std::move(n)) {}
    const ExprNode* node() const { return node_.get(); }

  private:
    std::shared_ptr<const ExprNode> node_;
};

// Throws ParseError on malformed input or out-of-range variable indices.
Expr parse_expression(const std::string& text, int dim_x, int dim_zeta);

} // namespace normsym
