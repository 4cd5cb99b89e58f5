#include "cfwp/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <cstdio>

namespace cfwp {

namespace {

ExprPtr make_const(double v) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Constant;
    n->value = v;
    return n;
}

ExprPtr make_var() {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Var;
    return n;
}

ExprPtr make_param(std::string name) {
    auto n = std::make_shared<ExprNode>();
    n->kind = ExprKind::Param;
    n->name = std::move(name);
    return n;
}

ExprPtr make_unary(ExprKind k, ExprPtr operand) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(operand);
    return n;
}

ExprPtr make_binary(ExprKind k, ExprPtr l, ExprPtr r) {
    auto n = std::make_shared<ExprNode>();
    n->kind = k;
    n->lhs = std::move(l);
    n->rhs = std::move(r);
    return n;
}

bool is_const(const ExprPtr& n, double v) {
    return n->kind == ExprKind::Constant && n->value == v;
}

// Negation of a literal collapses to a signed literal, so that the
// canonical form "(-3.5)" re-parses to the very same node.
ExprPtr make_neg(ExprPtr operand) {
    if (operand->kind == ExprKind::Constant) return make_const(-operand->value);
    return make_unary(ExprKind::Neg, std::move(operand));
}

// ---------------------------------------------------------------------------
// Lexer / parser
// ---------------------------------------------------------------------------

enum class Tok { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };

struct Token {
    Tok type;
    double number = 0.0;
    std::string text;
    std::size_t pos = 0;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) { advance(); }

    const Token& peek() const { return current_; }

    Token take() {
        Token t = current_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        current_.pos = pos_;
        if (pos_ >= src_.size()) {
            current_.type = Tok::End;
            return;
        }
        char c = src_[pos_];
        switch (c) {
            case '+': current_.type = Tok::Plus; ++pos_; return;
            case '-': current_.type = Tok::Minus; ++pos_; return;
            case '*': current_.type = Tok::Star; ++pos_; return;
            case '/': current_.type = Tok::Slash; ++pos_; return;
            case '^': current_.type = Tok::Caret; ++pos_; return;
            case '(': current_.type = Tok::LParen; ++pos_; return;
            case ')': current_.type = Tok::RParen; ++pos_; return;
            default: break;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            lex_number();
            return;
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t start = pos_;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                ++pos_;
            current_.type = Tok::Ident;
            current_.text.assign(src_.substr(start, pos_ - start));
            return;
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    void lex_number() {
        std::size_t start = pos_;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        if (pos_ < src_.size() && src_[pos_] == '.') {
            ++pos_;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        }
        if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
            std::size_t mark = pos_;
            ++pos_;
            if (pos_ < src_.size() && (src_[pos_] == '+' || src_[pos_] == '-')) ++pos_;
            if (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
            } else {
                pos_ = mark;  // bare 'e' is not an exponent
            }
        }
        std::string_view span = src_.substr(start, pos_ - start);
        double value = 0.0;
        auto res = std::from_chars(span.data(), span.data() + span.size(), value);
        if (res.ec != std::errc{} || res.ptr != span.data() + span.size())
            throw SyntaxError("malformed number literal '" + std::string(span) + "'", start);
        current_.type = Tok::Number;
        current_.number = value;
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    Token current_;
};

class Parser {
public:
    Parser(std::string_view src, const std::vector<std::string>& params)
        : lex_(src), params_(params) {}

    ExprPtr parse() {
        ExprPtr e = expression();
        if (lex_.peek().type != Tok::End)
            throw SyntaxError("expected end of input or operator", lex_.peek().pos);
        return e;
    }

private:
    ExprPtr expression() {
        ExprPtr left = term();
        while (true) {
            Tok t = lex_.peek().type;
            if (t == Tok::Plus) {
                lex_.take();
                left = make_binary(ExprKind::Add, left, term());
            } else if (t == Tok::Minus) {
                lex_.take();
                left = make_binary(ExprKind::Sub, left, term());
            } else {
                return left;
            }
        }
    }

    ExprPtr term() {
        ExprPtr left = unary();
        while (true) {
            Tok t = lex_.peek().type;
            if (t == Tok::Star) {
                lex_.take();
                left = make_binary(ExprKind::Mul, left, unary());
            } else if (t == Tok::Slash) {
                lex_.take();
                left = make_binary(ExprKind::Div, left, unary());
            } else {
                return left;
            }
        }
    }

    // '^' binds tighter than unary minus: -t^2 is -(t^2).
    ExprPtr unary() {
        if (lex_.peek().type == Tok::Minus) {
            lex_.take();
            return make_neg(unary());
        }
        return power();
    }

    // Right-associative: a^b^c is a^(b^c); the exponent may carry a sign.
    ExprPtr power() {
        ExprPtr base = atom();
        if (lex_.peek().type == Tok::Caret) {
            lex_.take();
            return make_binary(ExprKind::Pow, base, unary());
        }
        return base;
    }

    ExprPtr atom() {
        Token tok = lex_.take();
        switch (tok.type) {
            case Tok::Number:
                return make_const(tok.number);
            case Tok::LParen: {
                ExprPtr e = expression();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident:
                return identifier(tok);
            default:
                throw SyntaxError("expected number, identifier or '('", tok.pos);
        }
    }

    ExprPtr identifier(const Token& tok) {
        if (tok.text == "sqrt" || tok.text == "exp" || tok.text == "log") {
            expect(Tok::LParen, "'(' after function name");
            ExprPtr arg = expression();
            expect(Tok::RParen, "')'");
            ExprKind k = tok.text == "sqrt" ? ExprKind::Sqrt
                       : tok.text == "exp"  ? ExprKind::Exp
                                            : ExprKind::Log;
            return make_unary(k, arg);
        }
        if (tok.text == "t") return make_var();
        if (std::find(params_.begin(), params_.end(), tok.text) != params_.end())
            return make_param(tok.text);
        throw UnknownIdentifier(tok.text, tok.pos);
    }

    void expect(Tok type, const char* what) {
        if (lex_.peek().type != type)
            throw SyntaxError(std::string("expected ") + what, lex_.peek().pos);
        lex_.take();
    }

    Lexer lex_;
    const std::vector<std::string>& params_;
};

// ---------------------------------------------------------------------------
// Evaluation
// ---------------------------------------------------------------------------

double eval_node(const ExprNode& n, double t, const ParamBinding& binding) {
    switch (n.kind) {
        case ExprKind::Constant: return n.value;
        case ExprKind::Var: return t;
        case ExprKind::Param: return binding.get(n.name);
        case ExprKind::Neg: return -eval_node(*n.lhs, t, binding);
        case ExprKind::Add: return eval_node(*n.lhs, t, binding) + eval_node(*n.rhs, t, binding);
        case ExprKind::Sub: return eval_node(*n.lhs, t, binding) - eval_node(*n.rhs, t, binding);
        case ExprKind::Mul: return eval_node(*n.lhs, t, binding) * eval_node(*n.rhs, t, binding);
        case ExprKind::Div: {
            double num = eval_node(*n.lhs, t, binding);
            double den = eval_node(*n.rhs, t, binding);
            if (den == 0.0) throw DomainError("division by zero", exprdetail::serialize_node(n));
            return num / den;
        }
        case ExprKind::Pow: {
            double base = eval_node(*n.lhs, t, binding);
            double expo = eval_node(*n.rhs, t, binding);
            double r = std::pow(base, expo);
            if (std::isnan(r))
                throw DomainError("non-real power", exprdetail::serialize_node(n));
            if (base == 0.0 && expo < 0.0)
                throw DomainError("zero raised to negative power", exprdetail::serialize_node(n));
            return r;
        }
        case ExprKind::Sqrt: {
            double a = eval_node(*n.lhs, t, binding);
            if (a < 0.0) throw DomainError("sqrt of negative argument", exprdetail::serialize_node(n));
            return std::sqrt(a);
        }
        case ExprKind::Exp: return std::exp(eval_node(*n.lhs, t, binding));
        case ExprKind::Log: {
            double a = eval_node(*n.lhs, t, binding);
            if (a <= 0.0)
                throw DomainError("log of non-positive argument", exprdetail::serialize_node(n));
            return std::log(a);
        }
    }
    throw Error("corrupt expression node");
}

// ---------------------------------------------------------------------------
// Differentiation. Smart constructors fold constants and elide the obvious
// neutral elements so derivative trees stay readable; no further
// simplification is attempted.
// ---------------------------------------------------------------------------

ExprPtr d_add(ExprPtr a, ExprPtr b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
        return make_const(a->value + b->value);
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    return make_binary(ExprKind::Add, std::move(a), std::move(b));
}

ExprPtr d_sub(ExprPtr a, ExprPtr b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
        return make_const(a->value - b->value);
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return make_neg(std::move(b));
    return make_binary(ExprKind::Sub, std::move(a), std::move(b));
}

ExprPtr d_mul(ExprPtr a, ExprPtr b) {
    if (a->kind == ExprKind::Constant && b->kind == ExprKind::Constant)
        return make_const(a->value * b->value);
    if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    return make_binary(ExprKind::Mul, std::move(a), std::move(b));
}

ExprPtr d_div(ExprPtr a, ExprPtr b) {
    if (is_const(a, 0.0)) return make_const(0.0);
    if (is_const(b, 1.0)) return a;
    return make_binary(ExprKind::Div, std::move(a), std::move(b));
}

ExprPtr d_pow(ExprPtr a, ExprPtr b) {
    if (is_const(b, 1.0)) return a;
    return make_binary(ExprKind::Pow, std::move(a), std::move(b));
}

ExprPtr diff_node(const ExprPtr& n) {
    switch (n->kind) {
        case ExprKind::Constant:
        case ExprKind::Param:
            return make_const(0.0);
        case ExprKind::Var:
            return make_const(1.0);
        case ExprKind::Neg:
            return make_neg(diff_node(n->lhs));
        case ExprKind::Add:
            return d_add(diff_node(n->lhs), diff_node(n->rhs));
        case ExprKind::Sub:
            return d_sub(diff_node(n->lhs), diff_node(n->rhs));
        case ExprKind::Mul:
            return d_add(d_mul(diff_node(n->lhs), n->rhs),
                         d_mul(n->lhs, diff_node(n->rhs)));
        case ExprKind::Div:
            // (u/v)' = (u'v - uv') / v^2
            return d_div(d_sub(d_mul(diff_node(n->lhs), n->rhs),
                               d_mul(n->lhs, diff_node(n->rhs))),
                         d_pow(n->rhs, make_const(2.0)));
        case ExprKind::Pow: {
            const ExprPtr& u = n->lhs;
            const ExprPtr& v = n->rhs;
            if (v->kind == ExprKind::Constant) {
                // (u^c)' = c * u^(c-1) * u'
                return d_mul(d_mul(make_const(v->value),
                                   d_pow(u, make_const(v->value - 1.0))),
                             diff_node(u));
            }
            // (u^v)' = u^v * (v' log u + v u'/u)
            ExprPtr term1 = d_mul(diff_node(v), make_unary(ExprKind::Log, u));
            ExprPtr term2 = d_div(d_mul(v, diff_node(u)), u);
            return d_mul(make_binary(ExprKind::Pow, u, v), d_add(term1, term2));
        }
        case ExprKind::Sqrt:
            // u' / (2 sqrt(u))
            return d_div(diff_node(n->lhs),
                         d_mul(make_const(2.0), make_unary(ExprKind::Sqrt, n->lhs)));
        case ExprKind::Exp:
            return d_mul(make_unary(ExprKind::Exp, n->lhs), diff_node(n->lhs));
        case ExprKind::Log:
            return d_div(diff_node(n->lhs), n->lhs);
    }
    throw Error("corrupt expression node");
}

void collect_params(const ExprNode& n, std::vector<std::string>& out) {
    if (n.kind == ExprKind::Param) {
        if (std::find(out.begin(), out.end(), n.name) == out.end()) out.push_back(n.name);
    }
    if (n.lhs) collect_params(*n.lhs, out);
    if (n.rhs) collect_params(*n.rhs, out);
}

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

}  // namespace

namespace exprdetail {

std::string serialize_node(const ExprNode& n) {
    switch (n.kind) {
        case ExprKind::Constant:
            if (n.value < 0.0 || (n.value == 0.0 && std::signbit(n.value)))
                return "(" + format_double(n.value) + ")";
            return format_double(n.value);
        case ExprKind::Var: return "t";
        case ExprKind::Param: return n.name;
        case ExprKind::Neg: return "(-" + serialize_node(*n.lhs) + ")";
        case ExprKind::Add: return "(" + serialize_node(*n.lhs) + "+" + serialize_node(*n.rhs) + ")";
        case ExprKind::Sub: return "(" + serialize_node(*n.lhs) + "-" + serialize_node(*n.rhs) + ")";
        case ExprKind::Mul: return "(" + serialize_node(*n.lhs) + "*" + serialize_node(*n.rhs) + ")";
        case ExprKind::Div: return "(" + serialize_node(*n.lhs) + "/" + serialize_node(*n.rhs) + ")";
        case ExprKind::Pow: return "(" + serialize_node(*n.lhs) + "^" + serialize_node(*n.rhs) + ")";
        case ExprKind::Sqrt: return "sqrt(" + serialize_node(*n.lhs) + ")";
        case ExprKind::Exp: return "exp(" + serialize_node(*n.lhs) + ")";
        case ExprKind::Log: return "log(" + serialize_node(*n.lhs) + ")";
    }
    throw Error("corrupt expression node");
}

bool nodes_equal(const ExprNode& a, const ExprNode& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case ExprKind::Constant:
            return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
        case ExprKind::Var: return true;
        case ExprKind::Param: return a.name == b.name;
        default: break;
    }
    if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
    if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
    if (a.lhs && !nodes_equal(*a.lhs, *b.lhs)) return false;
    if (a.rhs && !nodes_equal(*a.rhs, *b.rhs)) return false;
    return true;
}

}  // namespace exprdetail

// ---------------------------------------------------------------------------
// ParamBinding
// ---------------------------------------------------------------------------

ParamBinding::ParamBinding(std::initializer_list<std::pair<const std::string, double>> init) {
    for (const auto& [k, v] : init) set(k, v);
}

void ParamBinding::set(const std::string& name, double value) {
    if (!std::isfinite(value))
        throw InvalidParams("binding for '" + name + "' is not finite");
    values_[name] = value;
}

double ParamBinding::get(const std::string& name) const {
    auto it = values_.find(name);
    if (it == values_.end()) throw Error("unbound parameter '" + name + "'");
    return it->second;
}

bool ParamBinding::has(const std::string& name) const { return values_.count(name) != 0; }

// ---------------------------------------------------------------------------
// WarpExpr
// ---------------------------------------------------------------------------

WarpExpr::WarpExpr(ExprPtr root, std::vector<std::string> params)
    : root_(std::move(root)), params_(std::move(params)) {}

WarpExpr WarpExpr::parse(std::string_view text, std::vector<std::string> param_names) {
    if (text.empty()) throw SyntaxError("empty expression", 0);
    for (const auto& p : param_names) {
        if (p == "t" || p == "sqrt" || p == "exp" || p == "log")
            throw InvalidParams("parameter name '" + p + "' shadows a builtin");
    }
    Parser parser(text, param_names);
    ExprPtr root = parser.parse();
    return WarpExpr(std::move(root), std::move(param_names));
}

double WarpExpr::eval(double t, const ParamBinding& binding) const {
    return eval_node(*root_, t, binding);
}

WarpExpr WarpExpr::differentiate() const {
    ExprPtr d = diff_node(root_);
    // Parameters may drop out of the derivative; keep the declared list so
    // the same binding remains valid.
    return WarpExpr(std::move(d), params_);
}

std::string WarpExpr::serialize() const { return exprdetail::serialize_node(*root_); }

bool WarpExpr::structurally_equal(const WarpExpr& other) const {
    return exprdetail::nodes_equal(*root_, *other.root_);
}

}  // namespace cfwp
