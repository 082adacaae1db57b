#include "curvflow/psiexpr.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <variant>
#include <vector>

#include "curvflow/errors.hpp"

namespace curvflow::psi {

enum class Func { Sin, Cos, Exp, Abs };
enum class BinOp { Add, Sub, Mul, Div, Pow };

struct Number { double value; };
struct Variable { int index; };  // 1-based
struct Negate { std::shared_ptr<const Node> arg; };
struct Call { Func func; std::shared_ptr<const Node> arg; };
struct Binary { BinOp op; std::shared_ptr<const Node> lhs, rhs; };

struct Node {
    std::variant<Number, Variable, Negate, Call, Binary> v;
};

namespace {

using NodePtr = std::shared_ptr<const Node>;

template <class T>
NodePtr make(T value) { return std::make_shared<const Node>(Node{std::move(value)}); }

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    NodePtr parse_all()
    {
        skip_ws();
        if (pos_ == text_.size())
            fail("empty expression");
        auto node = expr();
        skip_ws();
        if (pos_ != text_.size())
            fail("unexpected trailing input '" + std::string(text_.substr(pos_, 1)) + "'");
        return node;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const { throw ParseError(pos_, msg); }

    void skip_ws()
    {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
    }

    bool accept(char c)
    {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    NodePtr expr()
    {
        auto lhs = term();
        for (;;) {
            if (accept('+'))
                lhs = make(Binary{BinOp::Add, lhs, term()});
            else if (accept('-'))
                lhs = make(Binary{BinOp::Sub, lhs, term()});
            else
                return lhs;
        }
    }

    NodePtr term()
    {
        auto lhs = unary();
        for (;;) {
            if (accept('*'))
                lhs = make(Binary{BinOp::Mul, lhs, unary()});
            else if (accept('/'))
                lhs = make(Binary{BinOp::Div, lhs, unary()});
            else
                return lhs;
        }
    }

    NodePtr unary()
    {
        if (accept('-'))
            return make(Negate{unary()});
        return power();
    }

    NodePtr power()
    {
        auto base = primary();
        if (accept('^'))
            return make(Binary{BinOp::Pow, base, unary()});
        return base;
    }

    NodePtr primary()
    {
        skip_ws();
        if (pos_ == text_.size())
            fail("unexpected end of expression");
        const char ch = text_[pos_];
        if (ch == '(') {
            ++pos_;
            auto inner = expr();
            if (!accept(')'))
                fail("expected ')'");
            return inner;
        }
        if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.')
            return number();
        if (std::isalpha(static_cast<unsigned char>(ch)))
            return identifier();
        if (ch == ')')
            fail("unbalanced ')'");
        fail(std::string("unexpected character '") + ch + "'");
    }

    NodePtr number()
    {
        const std::size_t start = pos_;
        auto digits = [&] {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                ++pos_;
        };
        digits();
        if (pos_ < text_.size() && text_[pos_] == '.') {
            ++pos_;
            digits();
        }
        if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
            std::size_t save = pos_++;
            if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-'))
                ++pos_;
            if (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                digits();
            else
                pos_ = save;  // 'e' belongs to something else; let the caller reject it
        }
        double value = 0.0;
        const auto* first = text_.data() + start;
        const auto* last = text_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr != last) {
            pos_ = start;
            fail("malformed number");
        }
        return make(Number{value});
    }

    NodePtr identifier()
    {
        const std::size_t start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_])))
            ++pos_;
        const std::string_view name = text_.substr(start, pos_ - start);

        if (name == "pi")
            return make(Number{std::numbers::pi});
        if (name.size() >= 2 && name[0] == 'x') {
            int index = 0;
            const auto [ptr, ec] = std::from_chars(name.data() + 1, name.data() + name.size(), index);
            if (ec == std::errc() && ptr == name.data() + name.size() && index >= 1 &&
                name[1] != '0')
                return make(Variable{index});
        }

        Func func;
        if (name == "sin")
            func = Func::Sin;
        else if (name == "cos")
            func = Func::Cos;
        else if (name == "exp")
            func = Func::Exp;
        else if (name == "abs")
            func = Func::Abs;
        else {
            pos_ = start;
            fail("unknown identifier '" + std::string(name) + "'");
        }
        if (!accept('('))
            fail("expected '(' after function name");
        auto arg = expr();
        if (!accept(')'))
            fail("expected ')'");
        return make(Call{func, arg});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

double eval(const Node& node, std::span<const double> x)
{
    return std::visit(
        [&](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number>) {
                return n.value;
            } else if constexpr (std::is_same_v<T, Variable>) {
                if (static_cast<std::size_t>(n.index) > x.size())
                    throw DimensionMismatch("variable x" + std::to_string(n.index) +
                                            " exceeds coordinate dimension " +
                                            std::to_string(x.size()));
                return x[static_cast<std::size_t>(n.index - 1)];
            } else if constexpr (std::is_same_v<T, Negate>) {
                return -eval(*n.arg, x);
            } else if constexpr (std::is_same_v<T, Call>) {
                const double a = eval(*n.arg, x);
                switch (n.func) {
                case Func::Sin: return std::sin(a);
                case Func::Cos: return std::cos(a);
                case Func::Exp: return std::exp(a);
                case Func::Abs: return std::abs(a);
                }
                return 0.0;
            } else {
                const double a = eval(*n.lhs, x);
                const double b = eval(*n.rhs, x);
                switch (n.op) {
                case BinOp::Add: return a + b;
                case BinOp::Sub: return a - b;
                case BinOp::Mul: return a * b;
                case BinOp::Div:
                    if (b == 0.0)
                        throw EvalDomainError("division by zero");
                    return a / b;
                case BinOp::Pow:
                    if (a == 0.0 && b < 0.0)
                        throw EvalDomainError("zero raised to a negative power");
                    if (a < 0.0 && std::trunc(b) != b)
                        throw EvalDomainError("negative base with non-integer exponent");
                    return std::pow(a, b);
                }
                return 0.0;
            }
        },
        node.v);
}

int max_var(const Node& node)
{
    return std::visit(
        [](const auto& n) -> int {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number>)
                return 0;
            else if constexpr (std::is_same_v<T, Variable>)
                return n.index;
            else if constexpr (std::is_same_v<T, Negate> || std::is_same_v<T, Call>)
                return max_var(*n.arg);
            else
                return std::max(max_var(*n.lhs), max_var(*n.rhs));
        },
        node.v);
}

std::string print(const Node& node)
{
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Number>) {
                char buf[32];
                std::snprintf(buf, sizeof buf, "%.17g", n.value);
                return buf;
            } else if constexpr (std::is_same_v<T, Variable>) {
                return "x" + std::to_string(n.index);
            } else if constexpr (std::is_same_v<T, Negate>) {
                return "(-" + print(*n.arg) + ")";
            } else if constexpr (std::is_same_v<T, Call>) {
                static constexpr const char* names[] = {"sin", "cos", "exp", "abs"};
                return std::string(names[static_cast<int>(n.func)]) + "(" + print(*n.arg) + ")";
            } else {
                static constexpr char ops[] = {'+', '-', '*', '/', '^'};
                return "(" + print(*n.lhs) + " " + ops[static_cast<int>(n.op)] + " " +
                       print(*n.rhs) + ")";
            }
        },
        node.v);
}

}  // namespace

PsiSpec::PsiSpec(std::shared_ptr<const Node> root) : root_(std::move(root)) {}

double PsiSpec::evaluate_at(std::span<const double> x) const
{
    const double v = eval(*root_, x);
    if (!std::isfinite(v))
        throw EvalDomainError("expression evaluates to a non-finite value");
    return v;
}

int PsiSpec::max_variable() const { return max_var(*root_); }

std::string PsiSpec::to_string() const { return print(*root_); }

PsiSpec parse(std::string_view text)
{
    return PsiSpec(Parser(text).parse_all());
}

NodeField evaluate(const PsiSpec& spec, const DiscreteManifold& man)
{
    const int needed = spec.max_variable();
    if (needed > static_cast<int>(man.coord_dim()))
        throw DimensionMismatch("expression uses x" + std::to_string(needed) + " but the manifold has " +
                                std::to_string(man.coord_dim()) + " coordinate(s)");
    NodeField out(man.node_count());
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = spec.evaluate_at(man.coordinates(i));
    return out;
}

}  // namespace curvflow::psi
