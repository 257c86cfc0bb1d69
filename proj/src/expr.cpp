#include "normsym/expr.hpp"

#include <cctype>
#include <cmath>
#include <sstream>

namespace normsym {

enum class Op { Const, VarX, VarZeta, Add, Sub, Mul, Div, Pow, Neg, Exp, Sin, Cos, Sqrt, Log };

class ExprNode {
  public:
    Op op;
    double cval = 0.0;
    int var = 0;
    std::shared_ptr<const ExprNode> a, b;

    ExprNode(Op o) : op(o) {}
};

namespace {
using NodePtr = std::shared_ptr<const ExprNode>;

NodePtr mk(Op o) { return std::make_shared<ExprNode>(o); }

NodePtr mk_const(double c) {
    auto n = std::make_shared<ExprNode>(Op::Const);
    n->cval = c;
    return n;
}

NodePtr mk_var(Op o, int i) {
    auto n = std::make_shared<ExprNode>(o);
    n->var = i;
    return n;
}

NodePtr mk2(Op o, NodePtr a, NodePtr b) {
    auto n = std::make_shared<ExprNode>(o);
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr mk1(Op o, NodePtr a) {
    auto n = std::make_shared<ExprNode>(o);
    n->a = std::move(a);
    return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::Const && n->cval == v; }

double eval_node(const ExprNode* n, const Vec& x, const Vec& zeta) {
    switch (n->op) {
        case Op::Const: return n->cval;
        case Op::VarX: return x[n->var];
        case Op::VarZeta: return zeta[n->var];
        case Op::Add: return eval_node(n->a.get(), x, zeta) + eval_node(n->b.get(), x, zeta);
        case Op::Sub: return eval_node(n->a.get(), x, zeta) - eval_node(n->b.get(), x, zeta);
        case Op::Mul: return eval_node(n->a.get(), x, zeta) * eval_node(n->b.get(), x, zeta);
        case Op::Div: return eval_node(n->a.get(), x, zeta) / eval_node(n->b.get(), x, zeta);
        case Op::Pow: {
            double base = eval_node(n->a.get(), x, zeta);
            double e = eval_node(n->b.get(), x, zeta);
            if (n->b->op == Op::Const && e == std::floor(e) && std::abs(e) < 64) {
                double r = 1.0;
                int k = (int)std::abs(e);
                for (int i = 0; i < k; ++i) r *= base;
                return e < 0 ? 1.0 / r : r;
            }
            return std::pow(base, e);
        }
        case Op::Neg: return -eval_node(n->a.get(), x, zeta);
        case Op::Exp: return std::exp(eval_node(n->a.get(), x, zeta));
        case Op::Sin: return std::sin(eval_node(n->a.get(), x, zeta));
        case Op::Cos: return std::cos(eval_node(n->a.get(), x, zeta));
        case Op::Sqrt: return std::sqrt(eval_node(n->a.get(), x, zeta));
        case Op::Log: return std::log(eval_node(n->a.get(), x, zeta));
    }
    return 0.0;
}

Taylor teval_node(const ExprNode* n, const std::vector<Taylor>& x, const std::vector<Taylor>& z) {
    switch (n->op) {
        case Op::Const: return Taylor::constant(x.empty() ? z[0].shape() : x[0].shape(), n->cval);
        case Op::VarX: return x[n->var];
        case Op::VarZeta: return z[n->var];
        case Op::Add: return teval_node(n->a.get(), x, z) + teval_node(n->b.get(), x, z);
        case Op::Sub: return teval_node(n->a.get(), x, z) - teval_node(n->b.get(), x, z);
        case Op::Mul: return teval_node(n->a.get(), x, z) * teval_node(n->b.get(), x, z);
        case Op::Div: return teval_node(n->a.get(), x, z) * teval_node(n->b.get(), x, z).inv();
        case Op::Pow: {
            Taylor base = teval_node(n->a.get(), x, z);
            if (n->b->op == Op::Const) {
                double e = n->b->cval;
                if (e == std::floor(e) && std::abs(e) < 64) {
                    int k = (int)std::abs(e);
                    Taylor r = base.ipow(k);
                    return e < 0 ? r.inv() : r;
                }
                return base.pow_(e);
            }
            Taylor ex = teval_node(n->b.get(), x, z);
            return (ex * base.log_()).exp_();
        }
        case Op::Neg: return teval_node(n->a.get(), x, z) * (-1.0);
        case Op::Exp: return teval_node(n->a.get(), x, z).exp_();
        case Op::Sin: return teval_node(n->a.get(), x, z).sin_();
        case Op::Cos: return teval_node(n->a.get(), x, z).cos_();
        case Op::Sqrt: return teval_node(n->a.get(), x, z).sqrt_();
        case Op::Log: return teval_node(n->a.get(), x, z).log_();
    }
    throw Error("expr: bad node");
}

NodePtr diff_node(const NodePtr& n, Op varop, int i);

NodePtr simplify_add(NodePtr a, NodePtr b) {
    if (is_const(a, 0)) return b;
    if (is_const(b, 0)) return a;
    return mk2(Op::Add, a, b);
}
NodePtr simplify_mul(NodePtr a, NodePtr b) {
    if (is_const(a, 0) || is_const(b, 0)) return mk_const(0);
    if (is_const(a, 1)) return b;
    if (is_const(b, 1)) return a;
    return mk2(Op::Mul, a, b);
}

NodePtr diff_node(const NodePtr& n, Op varop, int i) {
    switch (n->op) {
        case Op::Const: return mk_const(0);
        case Op::VarX: return mk_const(n->op == varop && n->var == i ? 1 : 0);
        case Op::VarZeta: return mk_const(n->op == varop && n->var == i ? 1 : 0);
        case Op::Add: return simplify_add(diff_node(n->a, varop, i), diff_node(n->b, varop, i));
        case Op::Sub: {
            auto db = diff_node(n->b, varop, i);
            if (is_const(db, 0)) return diff_node(n->a, varop, i);
            return mk2(Op::Sub, diff_node(n->a, varop, i), db);
        }
        case Op::Mul:
            return simplify_add(simplify_mul(diff_node(n->a, varop, i), n->b),
                                simplify_mul(n->a, diff_node(n->b, varop, i)));
        case Op::Div: {
            // (a/b)' = a'/b - a b'/b^2
            auto t1 = mk2(Op::Div, diff_node(n->a, varop, i), n->b);
            auto t2 = mk2(Op::Div, simplify_mul(n->a, diff_node(n->b, varop, i)),
                          mk2(Op::Mul, n->b, n->b));
            return mk2(Op::Sub, t1, t2);
        }
        case Op::Pow: {
            if (n->b->op == Op::Const) {
                double e = n->b->cval;
                // e * a^(e-1) * a'
                auto p = mk2(Op::Pow, n->a, mk_const(e - 1));
                return simplify_mul(mk_const(e), simplify_mul(p, diff_node(n->a, varop, i)));
            }
            // general: a^b (b' log a + b a'/a)
            auto da = diff_node(n->a, varop, i);
            auto db = diff_node(n->b, varop, i);
            auto term1 = simplify_mul(db, mk1(Op::Log, n->a));
            auto term2 = mk2(Op::Div, simplify_mul(n->b, da), n->a);
            auto self = mk2(Op::Pow, n->a, n->b);
            return simplify_mul(self, simplify_add(term1, term2));
        }
        case Op::Neg: return mk1(Op::Neg, diff_node(n->a, varop, i));
        case Op::Exp: return simplify_mul(mk1(Op::Exp, n->a), diff_node(n->a, varop, i));
        case Op::Sin: return simplify_mul(mk1(Op::Cos, n->a), diff_node(n->a, varop, i));
        case Op::Cos:
            return mk1(Op::Neg, simplify_mul(mk1(Op::Sin, n->a), diff_node(n->a, varop, i)));
        case Op::Sqrt: {
            auto half = mk_const(0.5);
            auto inv = mk2(Op::Div, half, mk1(Op::Sqrt, n->a));
            return simplify_mul(inv, diff_node(n->a, varop, i));
        }
        case Op::Log: return mk2(Op::Div, diff_node(n->a, varop, i), n->a);
    }
    throw Error("expr: bad node in diff");
}

std::string str_node(const ExprNode* n) {
    std::ostringstream os;
    switch (n->op) {
        case Op::Const: os << n->cval; break;
        case Op::VarX: os << "x" << (n->var + 1); break;
        case Op::VarZeta: os << "zeta" << (n->var + 1); break;
        case Op::Add: os << "(" << str_node(n->a.get()) << "+" << str_node(n->b.get()) << ")"; break;
        case Op::Sub: os << "(" << str_node(n->a.get()) << "-" << str_node(n->b.get()) << ")"; break;
        case Op::Mul: os << "(" << str_node(n->a.get()) << "*" << str_node(n->b.get()) << ")"; break;
        case Op::Div: os << "(" << str_node(n->a.get()) << "/" << str_node(n->b.get()) << ")"; break;
        case Op::Pow: os << "(" << str_node(n->a.get()) << "^" << str_node(n->b.get()) << ")"; break;
        case Op::Neg: os << "(-" << str_node(n->a.get()) << ")"; break;
        case Op::Exp: os << "exp(" << str_node(n->a.get()) << ")"; break;
        case Op::Sin: os << "sin(" << str_node(n->a.get()) << ")"; break;
        case Op::Cos: os << "cos(" << str_node(n->a.get()) << ")"; break;
        case Op::Sqrt: os << "sqrt(" << str_node(n->a.get()) << ")"; break;
        case Op::Log: os << "log(" << str_node(n->a.get()) << ")"; break;
    }
    return os.str();
}

// ------------------------------------------------------------------ parser

struct Parser {
    const std::string& s;
    size_t pos = 0;
    int dx, dz;

    Parser(const std::string& text, int dim_x, int dim_zeta) : s(text), dx(dim_x), dz(dim_zeta) {}

    void skip() {
        while (pos < s.size() && std::isspace((unsigned char)s[pos])) ++pos;
    }
    bool peek(char c) {
        skip();
        return pos < s.size() && s[pos] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos;
            return true;
        }
        return false;
    }
    [[noreturn]] void fail(const std::string& what) {
        throw ParseError("expression parse error at position " + std::to_string(pos) + ": " + what);
    }

    NodePtr expr() {
        NodePtr t = term();
        for (;;) {
            if (accept('+'))
                t = mk2(Op::Add, t, term());
            else if (accept('-'))
                t = mk2(Op::Sub, t, term());
            else
                return t;
        }
    }
    NodePtr term() {
        NodePtr t = factor();
        for (;;) {
            if (accept('*'))
                t = mk2(Op::Mul, t, factor());
            else if (accept('/'))
                t = mk2(Op::Div, t, factor());
            else
                return t;
        }
    }
    NodePtr factor() {
        NodePtr u = unary();
        if (accept('^')) return mk2(Op::Pow, u, factor());
        return u;
    }
    NodePtr unary() {
        if (accept('-')) return mk1(Op::Neg, unary());
        return primary();
    }
    NodePtr primary() {
        skip();
        if (pos >= s.size()) fail("unexpected end of input");
        char c = s[pos];
        if (std::isdigit((unsigned char)c) || c == '.') {
            size_t end;
            double v = std::stod(s.substr(pos), &end);
            pos += end;
            return mk_const(v);
        }
        if (c == '(') {
            ++pos;
            NodePtr e = expr();
            if (!accept(')')) fail("expected )");
            return e;
        }
        if (std::isalpha((unsigned char)c)) {
            size_t start = pos;
            while (pos < s.size() && (std::isalnum((unsigned char)s[pos]) || s[pos] == '_')) ++pos;
            std::string id = s.substr(start, pos - start);
            if (id == "pi") return mk_const(pi);
            if (id == "exp" || id == "sin" || id == "cos" || id == "sqrt" || id == "log") {
                if (!accept('(')) fail("expected ( after " + id);
                NodePtr arg = expr();
                if (!accept(')')) fail("expected )");
                Op o = id == "exp"   ? Op::Exp
                       : id == "sin" ? Op::Sin
                       : id == "cos" ? Op::Cos
                       : id == "log" ? Op::Log
                                     : Op::Sqrt;
                return mk1(o, arg);
            }
            if (id.size() > 1 && id[0] == 'x') {
                int i = std::atoi(id.c_str() + 1);
                if (i < 1 || i > dx) fail("variable " + id + " out of range");
                return mk_var(Op::VarX, i - 1);
            }
            if (id.size() > 4 && id.rfind("zeta", 0) == 0) {
                int i = std::atoi(id.c_str() + 4);
                if (i < 1 || i > dz) fail("variable " + id + " out of range");
                return mk_var(Op::VarZeta, i - 1);
            }
            fail("unknown identifier " + id);
        }
        fail(std::string("unexpected character '") + c + "'");
    }
};

} // namespace

double Expr::eval_real(const Vec& x, const Vec& zeta) const {
    if (!node_) throw Error("empty expression");
    return eval_node(node_.get(), x, zeta);
}

Taylor Expr::eval_taylor(const std::vector<Taylor>& xs, const std::vector<Taylor>& zetas) const {
    if (!node_) throw Error("empty expression");
    return teval_node(node_.get(), xs, zetas);
}

Expr Expr::diff_x(int i) const { return Expr(diff_node(node_, Op::VarX, i)); }
Expr Expr::diff_zeta(int i) const { return Expr(diff_node(node_, Op::VarZeta, i)); }

std::string Expr::to_string() const { return node_ ? str_node(node_.get()) : "<null>"; }

Expr Expr::constant(double c) { return Expr(mk_const(c)); }
Expr Expr::var_x(int i) { return Expr(mk_var(Op::VarX, i)); }
Expr Expr::var_zeta(int i) { return Expr(mk_var(Op::VarZeta, i)); }
Expr Expr::add(const Expr& a, const Expr& b) { return Expr(mk2(Op::Add, a.node_, b.node_)); }
Expr Expr::sub(const Expr& a, const Expr& b) { return Expr(mk2(Op::Sub, a.node_, b.node_)); }
Expr Expr::mul(const Expr& a, const Expr& b) { return Expr(mk2(Op::Mul, a.node_, b.node_)); }
Expr Expr::div(const Expr& a, const Expr& b) { return Expr(mk2(Op::Div, a.node_, b.node_)); }
Expr Expr::pow(const Expr& a, const Expr& b) { return Expr(mk2(Op::Pow, a.node_, b.node_)); }
Expr Expr::fun(const std::string& name, const Expr& a) {
    Op o = name == "exp"    ? Op::Exp
           : name == "sin"  ? Op::Sin
           : name == "cos"  ? Op::Cos
           : name == "log"  ? Op::Log
           : name == "sqrt" ? Op::Sqrt
                            : Op::Neg;
    if (name == "neg") o = Op::Neg;
    return Expr(mk1(o, a.node_));
}

Expr parse_expression(const std::string& text, int dim_x, int dim_zeta) {
    Parser p(text, dim_x, dim_zeta);
    NodePtr n = p.expr();
    p.skip();
    if (p.pos != text.size()) p.fail("trailing input");
    return Expr(n);
}

} // namespace normsym
