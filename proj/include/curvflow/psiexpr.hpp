#pragma once

#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "curvflow/manifold.hpp"

namespace curvflow::psi {

// Grammar (whitespace insensitive, no implicit multiplication):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right associative
//   primary := number | 'pi' | 'x' digits | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | exp | abs
struct Node;

class PsiSpec {
public:
    PsiSpec() = default;
    explicit PsiSpec(std::shared_ptr<const Node> root);

    // Value at a point; x[k] is coordinate x_{k+1}.
    double evaluate_at(std::span<const double> x) const;
    // Largest variable index referenced (0 when the expression is constant).
    int max_variable() const;
    bool is_constant() const { return max_variable() == 0; }
    // Fully parenthesised form that parses back to the same tree.
    std::string to_string() const;

private:
    std::shared_ptr<const Node> root_;
};

PsiSpec parse(std::string_view text);

// Pointwise evaluation at node coordinates.
NodeField evaluate(const PsiSpec& spec, const DiscreteManifold& man);

}  // namespace curvflow::psi
