#pragma once

// VCPLang abstract syntax tree.
//
// Every node owns its children through unique_ptr and carries the source
// span it was parsed from. Spans are byte offsets into SourceUnit::text.

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

namespace vcp::codemetrics {

struct SourceSpan {
    std::size_t begin = 0;  ///< byte offset, inclusive
    std::size_t end = 0;    ///< byte offset, exclusive
    int line = 1;           ///< 1-based line of begin
    int column = 1;         ///< 1-based column of begin

    std::size_t length() const { return end - begin; }
    friend bool operator==(const SourceSpan&, const SourceSpan&) = default;
};

enum class BinaryOp { Or, And, Eq, Ne, Lt, Le, Gt, Ge, Add, Sub, Mul, Div, Mod };
enum class UnaryOp { Not, Neg };

const char* to_string(BinaryOp op);
const char* to_string(UnaryOp op);
int precedence(BinaryOp op);
bool is_comparison(BinaryOp op);

struct Expr;
using ExprPtr = std::unique_ptr<Expr>;

struct Expr {
    enum class Kind { Identifier, IntLiteral, StringLiteral, Unary, Binary, Call, Index };

    Kind kind;
    SourceSpan span;
    std::string text;  ///< identifier name, literal lexeme, or callee/array name
    BinaryOp binary_op = BinaryOp::Add;
    UnaryOp unary_op = UnaryOp::Not;
    SourceSpan op_span;          ///< operator token span for Unary/Binary
    std::vector<ExprPtr> args;   ///< operands (Unary: 1, Binary: 2, Index: 1, Call: n)

    explicit Expr(Kind k) : kind(k) {}
};

struct Stmt;
using StmtPtr = std::unique_ptr<Stmt>;

struct Assign {
    std::string target;
    SourceSpan target_span;
    ExprPtr value;
};

struct Stmt {
    enum class Kind { Assign, If, While, For, Return, Call, Block };

    Kind kind;
    SourceSpan span;

    Assign assign;                 ///< Assign
    ExprPtr expr;                  ///< If/While/For condition, Return value (may be null), Call
    std::vector<StmtPtr> body;     ///< Block contents; If then-block; While/For body
    std::vector<StmtPtr> orelse;   ///< If else part (a block's statements or a single nested if)
    bool has_else = false;
    bool else_is_if = false;       ///< `else if` chain: orelse holds exactly one If
    Assign init;                   ///< For
    Assign update;                 ///< For
    SourceSpan body_span;          ///< braces of the then/loop body, inclusive
    SourceSpan update_span;        ///< For update clause

    explicit Stmt(Kind k) : kind(k) {}
};

struct SourceUnit {
    std::string name;
    std::string text;
    std::vector<StmtPtr> statements;
};

}  // namespace vcp::codemetrics
