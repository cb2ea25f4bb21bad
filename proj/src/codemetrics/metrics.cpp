#include "vcp/codemetrics/metrics.hpp"

#include <cmath>

namespace vcp::codemetrics {

const char* halstead_classifier_table() {
    return "operators: binary ops (|| && == != < <= > >= + - * / %), unary ! and unary minus "
           "(token 'u-'), assignment '=' (including for init/update), call site (token "
           "'<callee>()'), index site ('[]'), keywords if while for return; "
           "operands: identifiers (including assignment targets and indexed array names), "
           "integer and string literals by lexeme; each syntactic use counts once";
}

long cyclomatic_complexity(const ControlFlowGraph& cfg) {
    return static_cast<long>(cfg.edges.size()) - static_cast<long>(cfg.nodes.size()) + 2;
}

namespace {

// Returns true when control cannot fall through the statement list.
bool count_decisions(const std::vector<StmtPtr>& stmts, long& count);

bool count_decisions(const Stmt& s, long& count) {
    switch (s.kind) {
        case Stmt::Kind::Return: return true;
        case Stmt::Kind::Block: return count_decisions(s.body, count);
        case Stmt::Kind::If: {
            ++count;
            const bool then_exits = count_decisions(s.body, count);
            const bool else_exits = s.has_else && count_decisions(s.orelse, count);
            return then_exits && else_exits;
        }
        case Stmt::Kind::While:
        case Stmt::Kind::For:
            ++count;
            count_decisions(s.body, count);
            return false;
        default: return false;
    }
}

bool count_decisions(const std::vector<StmtPtr>& stmts, long& count) {
    for (const auto& s : stmts)
        if (count_decisions(*s, count)) return true;
    return false;
}

class HalsteadCounter {
public:
    HalsteadTally tally;

    void stmts(const std::vector<StmtPtr>& list) {
        for (const auto& s : list) stmt(*s);
    }

private:
    void op(const std::string& token) { ++tally.operators[token]; }
    void operand(const std::string& token) { ++tally.operands[token]; }

    void assign(const Assign& a) {
        op("=");
        operand(a.target);
        expr(*a.value);
    }

    void stmt(const Stmt& s) {
        switch (s.kind) {
            case Stmt::Kind::Assign: assign(s.assign); break;
            case Stmt::Kind::Call: expr(*s.expr); break;
            case Stmt::Kind::Return:
                op("return");
                if (s.expr) expr(*s.expr);
                break;
            case Stmt::Kind::Block: stmts(s.body); break;
            case Stmt::Kind::If:
                op("if");
                expr(*s.expr);
                stmts(s.body);
                stmts(s.orelse);
                break;
            case Stmt::Kind::While:
                op("while");
                expr(*s.expr);
                stmts(s.body);
                break;
            case Stmt::Kind::For:
                op("for");
                assign(s.init);
                expr(*s.expr);
                assign(s.update);
                stmts(s.body);
                break;
        }
    }

    void expr(const Expr& e) {
        switch (e.kind) {
            case Expr::Kind::Identifier:
            case Expr::Kind::IntLiteral:
            case Expr::Kind::StringLiteral: operand(e.text); break;
            case Expr::Kind::Unary:
                op(e.unary_op == UnaryOp::Neg ? "u-" : "!");
                expr(*e.args[0]);
                break;
            case Expr::Kind::Binary:
                op(to_string(e.binary_op));
                expr(*e.args[0]);
                expr(*e.args[1]);
                break;
            case Expr::Kind::Call:
                op(e.text + "()");
                for (const auto& a : e.args) expr(*a);
                break;
            case Expr::Kind::Index:
                op("[]");
                operand(e.text);
                expr(*e.args[0]);
                break;
        }
    }
};

}  // namespace

long decision_points(const SourceUnit& unit) {
    long count = 0;
    count_decisions(unit.statements, count);
    return count;
}

HalsteadTally halstead_tally(const SourceUnit& unit) {
    HalsteadCounter counter;
    counter.stmts(unit.statements);
    return std::move(counter.tally);
}

HalsteadCounts halstead(const SourceUnit& unit) {
    const auto tally = halstead_tally(unit);
    HalsteadCounts h;
    h.n1 = tally.operators.size();
    h.n2 = tally.operands.size();
    for (const auto& [_, c] : tally.operators) h.N1 += c;
    for (const auto& [_, c] : tally.operands) h.N2 += c;
    const auto vocabulary = h.n1 + h.n2;
    h.volume_v = vocabulary == 0 ? 0.0
                                 : static_cast<double>(h.N1 + h.N2) *
                                       std::log2(static_cast<double>(vocabulary));
    return h;
}

double cfg_entropy(const ControlFlowGraph& cfg) {
    double bits = 0.0;
    for (int id : cfg.branch_nodes()) bits += std::log2(static_cast<double>(cfg.out_degree(id)));
    return bits;
}

CodeMetrics metrics(const SourceUnit& unit) {
    const auto cfg = build_cfg(unit);
    CodeMetrics m = metrics(cfg);
    m.halstead = halstead(unit);
    return m;
}

CodeMetrics metrics(const ControlFlowGraph& cfg) {
    CodeMetrics m;
    m.cc = cyclomatic_complexity(cfg);
    m.h_c = cfg_entropy(cfg);
    return m;
}

}  // namespace vcp::codemetrics
