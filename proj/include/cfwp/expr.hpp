#ifndef CFWP_EXPR_HPP
#define CFWP_EXPR_HPP

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "cfwp/errors.hpp"

namespace cfwp {

/// Node kinds of the warping-profile expression language.
/// The grammar is deliberately small: it covers every radial profile the
/// library works with while keeping symbolic differentiation total.
enum class ExprKind {
    Constant,
    Var,    // the radial variable `t`
    Param,  // named parameter, e.g. a, b, c, d
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Sqrt,
    Exp,
    Log,
};

struct ExprNode;
using ExprPtr = std::shared_ptr<const ExprNode>;

struct ExprNode {
    ExprKind kind;
    double value = 0.0;  // Constant only
    std::string name;    // Param only
    ExprPtr lhs;         // first child (unary operand)
    ExprPtr rhs;         // second child (binary only)
};

/// Parameter name -> value map. All values must be finite.
class ParamBinding {
public:
    ParamBinding() = default;
    ParamBinding(std::initializer_list<std::pair<const std::string, double>> init);

    void set(const std::string& name, double value);
    double get(const std::string& name) const;
    bool has(const std::string& name) const;
    const std::map<std::string, double>& values() const { return values_; }

private:
    std::map<std::string, double> values_;
};

/// Immutable symbolic expression in the radial variable `t` with named
/// parameters. Supports exact evaluation, symbolic differentiation and a
/// canonical (fully parenthesized) serialization that round-trips.
class WarpExpr {
public:
    /// Parse `text` against the declared parameter list.
    /// Throws SyntaxError / UnknownIdentifier / InvalidParams.
    static WarpExpr parse(std::string_view text, std::vector<std::string> param_names);

    /// Evaluate at radius t. Throws DomainError when the tree leaves the
    /// real domain; the error carries the offending subexpression.
    double eval(double t, const ParamBinding& binding) const;

    /// Exact symbolic derivative with respect to t.
    WarpExpr differentiate() const;

    /// Canonical serialization: fully parenthesized infix, '.'-decimal
    /// literals. Re-parsing yields a structurally identical tree.
    std::string serialize() const;

    const std::vector<std::string>& param_names() const { return params_; }
    const ExprPtr& root() const { return root_; }

    bool structurally_equal(const WarpExpr& other) const;

private:
    WarpExpr(ExprPtr root, std::vector<std::string> params);

    ExprPtr root_;
    std::vector<std::string> params_;
};

namespace exprdetail {
std::string serialize_node(const ExprNode& node);
bool nodes_equal(const ExprNode& a, const ExprNode& b);
}  // namespace exprdetail

}  // namespace cfwp

#endif
