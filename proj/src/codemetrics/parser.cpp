#include "vcp/codemetrics/parser.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>
#include <utility>

namespace vcp::codemetrics {

namespace {

enum class Tok {
    Ident, Int, String,
    KwIf, KwElse, KwWhile, KwFor, KwReturn,
    LParen, RParen, LBrace, RBrace, LBracket, RBracket, Semi, Comma,
    Assign, Eq, Ne, Lt, Le, Gt, Ge, Plus, Minus, Star, Slash, Percent, Bang, AndAnd, OrOr,
    End
};

const char* describe(Tok t) {
    switch (t) {
        case Tok::Ident: return "identifier";
        case Tok::Int: return "integer";
        case Tok::String: return "string";
        case Tok::KwIf: return "'if'";
        case Tok::KwElse: return "'else'";
        case Tok::KwWhile: return "'while'";
        case Tok::KwFor: return "'for'";
        case Tok::KwReturn: return "'return'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBrace: return "'{'";
        case Tok::RBrace: return "'}'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Semi: return "';'";
        case Tok::Comma: return "','";
        case Tok::Assign: return "'='";
        case Tok::Eq: return "'=='";
        case Tok::Ne: return "'!='";
        case Tok::Lt: return "'<'";
        case Tok::Le: return "'<='";
        case Tok::Gt: return "'>'";
        case Tok::Ge: return "'>='";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Percent: return "'%'";
        case Tok::Bang: return "'!'";
        case Tok::AndAnd: return "'&&'";
        case Tok::OrOr: return "'||'";
        case Tok::End: return "end of input";
    }
    return "?";
}

struct Token {
    Tok kind;
    SourceSpan span;
    std::string_view lexeme;
};

class Lexer {
public:
    explicit Lexer(std::string_view text) : text_(text) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        for (;;) {
            skip_trivia();
            if (pos_ >= text_.size()) {
                out.push_back({Tok::End, span_from(pos_), {}});
                return out;
            }
            out.push_back(next());
        }
    }

private:
    SourceSpan span_from(std::size_t begin) const {
        return {begin, pos_, start_line_, start_col_};
    }

    void advance() {
        if (text_[pos_] == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        ++pos_;
    }

    void skip_trivia() {
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && pos_ + 1 < text_.size() && text_[pos_ + 1] == '/') {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
            } else {
                break;
            }
        }
        start_line_ = line_;
        start_col_ = col_;
    }

    Token make(Tok kind, std::size_t begin) {
        return {kind, span_from(begin), text_.substr(begin, pos_ - begin)};
    }

    Token next() {
        const std::size_t begin = pos_;
        const char c = text_[pos_];
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (pos_ < text_.size() &&
                   (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
                advance();
            const auto word = text_.substr(begin, pos_ - begin);
            Tok kind = Tok::Ident;
            if (word == "if") kind = Tok::KwIf;
            else if (word == "else") kind = Tok::KwElse;
            else if (word == "while") kind = Tok::KwWhile;
            else if (word == "for") kind = Tok::KwFor;
            else if (word == "return") kind = Tok::KwReturn;
            return make(kind, begin);
        }
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_])))
                advance();
            return make(Tok::Int, begin);
        }
        if (c == '"') {
            advance();
            while (pos_ < text_.size() && text_[pos_] != '"' && text_[pos_] != '\n') {
                if (text_[pos_] == '\\' && pos_ + 1 < text_.size()) advance();
                advance();
            }
            if (pos_ >= text_.size() || text_[pos_] != '"')
                throw ParseError(start_line_, start_col_, "unterminated string", {"'\"'"});
            advance();
            return make(Tok::String, begin);
        }
        auto two = [&](char second) {
            return pos_ + 1 < text_.size() && text_[pos_ + 1] == second;
        };
        auto one_or_two = [&](char second, Tok single, Tok pair) {
            if (two(second)) {
                advance();
                advance();
                return make(pair, begin);
            }
            advance();
            return make(single, begin);
        };
        switch (c) {
            case '(': advance(); return make(Tok::LParen, begin);
            case ')': advance(); return make(Tok::RParen, begin);
            case '{': advance(); return make(Tok::LBrace, begin);
            case '}': advance(); return make(Tok::RBrace, begin);
            case '[': advance(); return make(Tok::LBracket, begin);
            case ']': advance(); return make(Tok::RBracket, begin);
            case ';': advance(); return make(Tok::Semi, begin);
            case ',': advance(); return make(Tok::Comma, begin);
            case '+': advance(); return make(Tok::Plus, begin);
            case '-': advance(); return make(Tok::Minus, begin);
            case '*': advance(); return make(Tok::Star, begin);
            case '/': advance(); return make(Tok::Slash, begin);
            case '%': advance(); return make(Tok::Percent, begin);
            case '=': return one_or_two('=', Tok::Assign, Tok::Eq);
            case '<': return one_or_two('=', Tok::Lt, Tok::Le);
            case '>': return one_or_two('=', Tok::Gt, Tok::Ge);
            case '!': return one_or_two('=', Tok::Bang, Tok::Ne);
            case '&':
                if (two('&')) {
                    advance();
                    advance();
                    return make(Tok::AndAnd, begin);
                }
                break;
            case '|':
                if (two('|')) {
                    advance();
                    advance();
                    return make(Tok::OrOr, begin);
                }
                break;
            default: break;
        }
        throw ParseError(start_line_, start_col_, std::string("character '") + c + "'", {"token"});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
    int line_ = 1;
    int col_ = 1;
    int start_line_ = 1;
    int start_col_ = 1;
};

bool binary_op_for(Tok t, BinaryOp& op) {
    switch (t) {
        case Tok::OrOr: op = BinaryOp::Or; return true;
        case Tok::AndAnd: op = BinaryOp::And; return true;
        case Tok::Eq: op = BinaryOp::Eq; return true;
        case Tok::Ne: op = BinaryOp::Ne; return true;
        case Tok::Lt: op = BinaryOp::Lt; return true;
        case Tok::Le: op = BinaryOp::Le; return true;
        case Tok::Gt: op = BinaryOp::Gt; return true;
        case Tok::Ge: op = BinaryOp::Ge; return true;
        case Tok::Plus: op = BinaryOp::Add; return true;
        case Tok::Minus: op = BinaryOp::Sub; return true;
        case Tok::Star: op = BinaryOp::Mul; return true;
        case Tok::Slash: op = BinaryOp::Div; return true;
        case Tok::Percent: op = BinaryOp::Mod; return true;
        default: return false;
    }
}

class Parser {
public:
    explicit Parser(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    std::vector<StmtPtr> program() {
        std::vector<StmtPtr> out;
        while (peek().kind != Tok::End) out.push_back(statement());
        return out;
    }

private:
    const Token& peek(std::size_t ahead = 0) const {
        return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
    }

    const Token& take() {
        const Token& t = toks_[pos_];
        if (pos_ + 1 < toks_.size()) ++pos_;
        return t;
    }

    [[noreturn]] void fail(std::vector<std::string> expected) const {
        const Token& t = peek();
        std::string found = t.kind == Tok::End ? "end of input" : "'" + std::string(t.lexeme) + "'";
        std::sort(expected.begin(), expected.end());
        expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
        throw ParseError(t.span.line, t.span.column, std::move(found), std::move(expected));
    }

    const Token& expect(Tok kind) {
        if (peek().kind != kind) fail({describe(kind)});
        return take();
    }

    static SourceSpan join(const SourceSpan& a, const SourceSpan& b) {
        return {a.begin, b.end, a.line, a.column};
    }

    SourceSpan last_span() const { return toks_[pos_ == 0 ? 0 : pos_ - 1].span; }

    static std::vector<std::string> statement_starts() {
        return {"identifier", "'if'", "'while'", "'for'", "'return'", "'{'"};
    }

    static std::vector<std::string> expression_starts() {
        return {"identifier", "integer", "string", "'('", "'!'", "'-'"};
    }

    StmtPtr statement() {
        switch (peek().kind) {
            case Tok::Ident:
                if (peek(1).kind == Tok::LParen) return call_statement();
                return assign_statement();
            case Tok::KwIf: return if_statement();
            case Tok::KwWhile: return while_statement();
            case Tok::KwFor: return for_statement();
            case Tok::KwReturn: return return_statement();
            case Tok::LBrace: return block_statement();
            default: fail(statement_starts());
        }
    }

    Assign assignment(SourceSpan& span) {
        const Token& name = expect(Tok::Ident);
        Assign a;
        a.target = std::string(name.lexeme);
        a.target_span = name.span;
        if (peek().kind != Tok::Assign) fail({"'='", "'('"});
        take();
        a.value = expression();
        span = join(name.span, last_span());
        return a;
    }

    StmtPtr assign_statement() {
        auto s = std::make_unique<Stmt>(Stmt::Kind::Assign);
        s->assign = assignment(s->span);
        return s;
    }

    StmtPtr call_statement() {
        auto s = std::make_unique<Stmt>(Stmt::Kind::Call);
        s->expr = primary();
        s->span = s->expr->span;
        return s;
    }

    std::vector<StmtPtr> braced(SourceSpan& span) {
        const Token& open = expect(Tok::LBrace);
        std::vector<StmtPtr> out;
        while (peek().kind != Tok::RBrace) {
            if (peek().kind == Tok::End) {
                auto expected = statement_starts();
                expected.push_back("'}'");
                fail(expected);
            }
            out.push_back(statement());
        }
        const Token& close = take();
        span = join(open.span, close.span);
        return out;
    }

    StmtPtr block_statement() {
        auto s = std::make_unique<Stmt>(Stmt::Kind::Block);
        s->body = braced(s->span);
        s->body_span = s->span;
        return s;
    }

    ExprPtr condition() {
        expect(Tok::LParen);
        auto e = expression();
        if (peek().kind != Tok::RParen) {
            auto expected = binary_continuations();
            expected.push_back("')'");
            fail(expected);
        }
        take();
        return e;
    }

    static std::vector<std::string> binary_continuations() {
        return {"'||'", "'&&'", "'=='", "'!='", "'<'", "'<='", "'>'", "'>='",
                "'+'",  "'-'",  "'*'",  "'/'",  "'%'"};
    }

    StmtPtr if_statement() {
        auto s = std::make_unique<Stmt>(Stmt::Kind::If);
        const Token& kw = take();
        s->expr = condition();
        s->body = braced(s->body_span);
        if (peek().kind == Tok::KwElse) {
            take();
            s->has_else = true;
            if (peek().kind == Tok::KwIf) {
                s->else_is_if = true;
                s->orelse.push_back(if_statement());
            } else if (peek().kind == Tok::LBrace) {
                SourceSpan else_span;
                s->orelse = braced(else_span);
            } else {
                fail({"'{'", "'if'"});
            }
        }
        s->span = join(kw.span, last_span());
        return s;
    }

    StmtPtr while_statement() {
        auto s = std::make_unique<Stmt>(Stmt::Kind::While);
        const Token& kw = take();
        s->expr = condition();
        s->body = braced(s->body_span);
        s->span = join(kw.span, last_span());
        return s;
    }

    StmtPtr for_statement() {
        auto s = std::make_unique<Stmt>(Stmt::Kind::For);
        const Token& kw = take();
        expect(Tok::LParen);
        SourceSpan init_span;
        s->init = assignment(init_span);
        expect(Tok::Semi);
        s->expr = expression();
        expect(Tok::Semi);
        s->update = assignment(s->update_span);
        expect(Tok::RParen);
        s->body = braced(s->body_span);
        s->span = join(kw.span, last_span());
        return s;
    }

    bool starts_expression(std::size_t ahead) const {
        switch (peek(ahead).kind) {
            case Tok::Ident:
                // `return` followed by `x = ...` begins a new statement.
                return peek(ahead + 1).kind != Tok::Assign;
            case Tok::Int:
            case Tok::String:
            case Tok::LParen:
            case Tok::Bang:
            case Tok::Minus: return true;
            default: return false;
        }
    }

    StmtPtr return_statement() {
        auto s = std::make_unique<Stmt>(Stmt::Kind::Return);
        const Token& kw = take();
        if (starts_expression(0)) s->expr = expression();
        s->span = join(kw.span, last_span());
        return s;
    }

    ExprPtr expression(int min_prec = 1) {
        auto lhs = unary();
        for (;;) {
            BinaryOp op;
            if (!binary_op_for(peek().kind, op) || precedence(op) < min_prec) break;
            const Token& op_tok = take();
            auto rhs = expression(precedence(op) + 1);
            auto e = std::make_unique<Expr>(Expr::Kind::Binary);
            e->binary_op = op;
            e->op_span = op_tok.span;
            e->span = join(lhs->span, rhs->span);
            e->args.push_back(std::move(lhs));
            e->args.push_back(std::move(rhs));
            lhs = std::move(e);
        }
        return lhs;
    }

    ExprPtr unary() {
        const Tok k = peek().kind;
        if (k == Tok::Bang || k == Tok::Minus) {
            const Token& op_tok = take();
            auto operand = unary();
            auto e = std::make_unique<Expr>(Expr::Kind::Unary);
            e->unary_op = k == Tok::Bang ? UnaryOp::Not : UnaryOp::Neg;
            e->op_span = op_tok.span;
            e->span = join(op_tok.span, operand->span);
            e->args.push_back(std::move(operand));
            return e;
        }
        return primary();
    }

    ExprPtr primary() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Int:
            case Tok::String: {
                take();
                auto e = std::make_unique<Expr>(t.kind == Tok::Int ? Expr::Kind::IntLiteral
                                                                   : Expr::Kind::StringLiteral);
                e->text = std::string(t.lexeme);
                e->span = t.span;
                return e;
            }
            case Tok::LParen: {
                const Token& open = take();
                auto inner = expression();
                if (peek().kind != Tok::RParen) {
                    auto expected = binary_continuations();
                    expected.push_back("')'");
                    fail(expected);
                }
                const Token& close = take();
                // Parentheses are not part of the tree; widen the span so
                // source splicing covers them.
                inner->span = join(open.span, close.span);
                return inner;
            }
            case Tok::Ident: {
                const Token& name = take();
                if (peek().kind == Tok::LParen) {
                    take();
                    auto e = std::make_unique<Expr>(Expr::Kind::Call);
                    e->text = std::string(name.lexeme);
                    if (peek().kind != Tok::RParen) {
                        e->args.push_back(expression());
                        while (peek().kind == Tok::Comma) {
                            take();
                            e->args.push_back(expression());
                        }
                    }
                    if (peek().kind != Tok::RParen) {
                        auto expected = binary_continuations();
                        expected.push_back("')'");
                        expected.push_back("','");
                        fail(expected);
                    }
                    e->span = join(name.span, take().span);
                    return e;
                }
                if (peek().kind == Tok::LBracket) {
                    take();
                    auto e = std::make_unique<Expr>(Expr::Kind::Index);
                    e->text = std::string(name.lexeme);
                    e->args.push_back(expression());
                    if (peek().kind != Tok::RBracket) {
                        auto expected = binary_continuations();
                        expected.push_back("']'");
                        fail(expected);
                    }
                    e->span = join(name.span, take().span);
                    return e;
                }
                auto e = std::make_unique<Expr>(Expr::Kind::Identifier);
                e->text = std::string(name.lexeme);
                e->span = name.span;
                return e;
            }
            default: fail(expression_starts());
        }
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---- printing ---------------------------------------------------------------

void print_expr(const Expr& e, std::ostream& os);

void print_operand(const Expr& e, std::ostream& os, bool wrap) {
    if (wrap) os << '(';
    print_expr(e, os);
    if (wrap) os << ')';
}

void print_expr(const Expr& e, std::ostream& os) {
    switch (e.kind) {
        case Expr::Kind::Identifier:
        case Expr::Kind::IntLiteral:
        case Expr::Kind::StringLiteral: os << e.text; break;
        case Expr::Kind::Unary:
            os << to_string(e.unary_op);
            print_operand(*e.args[0], os, e.args[0]->kind == Expr::Kind::Binary);
            break;
        case Expr::Kind::Binary: {
            const int p = precedence(e.binary_op);
            const Expr& l = *e.args[0];
            const Expr& r = *e.args[1];
            print_operand(l, os, l.kind == Expr::Kind::Binary && precedence(l.binary_op) < p);
            os << ' ' << to_string(e.binary_op) << ' ';
            print_operand(r, os, r.kind == Expr::Kind::Binary && precedence(r.binary_op) <= p);
            break;
        }
        case Expr::Kind::Call:
            os << e.text << '(';
            for (std::size_t i = 0; i < e.args.size(); ++i) {
                if (i) os << ", ";
                print_expr(*e.args[i], os);
            }
            os << ')';
            break;
        case Expr::Kind::Index:
            os << e.text << '[';
            print_expr(*e.args[0], os);
            os << ']';
            break;
    }
}

void print_assign(const Assign& a, std::ostream& os) {
    os << a.target << " = ";
    print_expr(*a.value, os);
}

void print_stmts(const std::vector<StmtPtr>& stmts, std::ostream& os, int depth);

void print_braced(const std::vector<StmtPtr>& stmts, std::ostream& os, int depth) {
    os << "{\n";
    print_stmts(stmts, os, depth + 1);
    os << std::string(static_cast<std::size_t>(depth) * 4, ' ') << '}';
}

void print_stmt(const Stmt& s, std::ostream& os, int depth) {
    switch (s.kind) {
        case Stmt::Kind::Assign: print_assign(s.assign, os); break;
        case Stmt::Kind::Call: print_expr(*s.expr, os); break;
        case Stmt::Kind::Return:
            os << "return";
            if (s.expr) {
                os << ' ';
                print_expr(*s.expr, os);
            }
            break;
        case Stmt::Kind::Block: print_braced(s.body, os, depth); break;
        case Stmt::Kind::If:
            os << "if (";
            print_expr(*s.expr, os);
            os << ") ";
            print_braced(s.body, os, depth);
            if (s.has_else) {
                os << " else ";
                if (s.else_is_if) print_stmt(*s.orelse.front(), os, depth);
                else print_braced(s.orelse, os, depth);
            }
            break;
        case Stmt::Kind::While:
            os << "while (";
            print_expr(*s.expr, os);
            os << ") ";
            print_braced(s.body, os, depth);
            break;
        case Stmt::Kind::For:
            os << "for (";
            print_assign(s.init, os);
            os << "; ";
            print_expr(*s.expr, os);
            os << "; ";
            print_assign(s.update, os);
            os << ") ";
            print_braced(s.body, os, depth);
            break;
    }
}

void print_stmts(const std::vector<StmtPtr>& stmts, std::ostream& os, int depth) {
    for (const auto& s : stmts) {
        os << std::string(static_cast<std::size_t>(depth) * 4, ' ');
        print_stmt(*s, os, depth);
        os << '\n';
    }
}

// ---- structural equality ----------------------------------------------------

bool equal_expr(const Expr* a, const Expr* b) {
    if (!a || !b) return a == b;
    if (a->kind != b->kind || a->text != b->text || a->args.size() != b->args.size()) return false;
    if (a->kind == Expr::Kind::Binary && a->binary_op != b->binary_op) return false;
    if (a->kind == Expr::Kind::Unary && a->unary_op != b->unary_op) return false;
    for (std::size_t i = 0; i < a->args.size(); ++i)
        if (!equal_expr(a->args[i].get(), b->args[i].get())) return false;
    return true;
}

bool equal_assign(const Assign& a, const Assign& b) {
    return a.target == b.target && equal_expr(a.value.get(), b.value.get());
}

bool equal_stmts(const std::vector<StmtPtr>& a, const std::vector<StmtPtr>& b);

bool equal_stmt(const Stmt& a, const Stmt& b) {
    if (a.kind != b.kind) return false;
    switch (a.kind) {
        case Stmt::Kind::Assign: return equal_assign(a.assign, b.assign);
        case Stmt::Kind::Call:
        case Stmt::Kind::Return: return equal_expr(a.expr.get(), b.expr.get());
        case Stmt::Kind::Block: return equal_stmts(a.body, b.body);
        case Stmt::Kind::If:
            return equal_expr(a.expr.get(), b.expr.get()) && equal_stmts(a.body, b.body) &&
                   a.has_else == b.has_else && a.else_is_if == b.else_is_if &&
                   equal_stmts(a.orelse, b.orelse);
        case Stmt::Kind::While:
            return equal_expr(a.expr.get(), b.expr.get()) && equal_stmts(a.body, b.body);
        case Stmt::Kind::For:
            return equal_assign(a.init, b.init) && equal_expr(a.expr.get(), b.expr.get()) &&
                   equal_assign(a.update, b.update) && equal_stmts(a.body, b.body);
    }
    return false;
}

bool equal_stmts(const std::vector<StmtPtr>& a, const std::vector<StmtPtr>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!equal_stmt(*a[i], *b[i])) return false;
    return true;
}

}  // namespace

ParseError::ParseError(int line, int column, std::string found, std::vector<std::string> expected)
    : ValidationError([&] {
          std::ostringstream os;
          os << "syntax error at " << line << ':' << column << ": unexpected " << found;
          if (!expected.empty()) {
              os << "; expected ";
              for (std::size_t i = 0; i < expected.size(); ++i) os << (i ? ", " : "") << expected[i];
          }
          return os.str();
      }()),
      line_(line),
      column_(column),
      found_(std::move(found)),
      expected_(std::move(expected)) {}

const char* to_string(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return "||";
        case BinaryOp::And: return "&&";
        case BinaryOp::Eq: return "==";
        case BinaryOp::Ne: return "!=";
        case BinaryOp::Lt: return "<";
        case BinaryOp::Le: return "<=";
        case BinaryOp::Gt: return ">";
        case BinaryOp::Ge: return ">=";
        case BinaryOp::Add: return "+";
        case BinaryOp::Sub: return "-";
        case BinaryOp::Mul: return "*";
        case BinaryOp::Div: return "/";
        case BinaryOp::Mod: return "%";
    }
    return "?";
}

const char* to_string(UnaryOp op) { return op == UnaryOp::Not ? "!" : "-"; }

int precedence(BinaryOp op) {
    switch (op) {
        case BinaryOp::Or: return 1;
        case BinaryOp::And: return 2;
        case BinaryOp::Eq:
        case BinaryOp::Ne: return 3;
        case BinaryOp::Lt:
        case BinaryOp::Le:
        case BinaryOp::Gt:
        case BinaryOp::Ge: return 4;
        case BinaryOp::Add:
        case BinaryOp::Sub: return 5;
        case BinaryOp::Mul:
        case BinaryOp::Div:
        case BinaryOp::Mod: return 6;
    }
    return 0;
}

bool is_comparison(BinaryOp op) { return precedence(op) == 3 || precedence(op) == 4; }

SourceUnit parse(std::string text, std::string name) {
    SourceUnit unit;
    unit.name = std::move(name);
    unit.text = std::move(text);
    Parser parser(Lexer(unit.text).run());
    unit.statements = parser.program();
    return unit;
}

std::string pretty_print(const SourceUnit& unit) {
    std::ostringstream os;
    print_stmts(unit.statements, os, 0);
    return os.str();
}

std::string pretty_print(const Expr& expr) {
    std::ostringstream os;
    print_expr(expr, os);
    return os.str();
}

bool structurally_equal(const SourceUnit& a, const SourceUnit& b) {
    return equal_stmts(a.statements, b.statements);
}

}  // namespace vcp::codemetrics
