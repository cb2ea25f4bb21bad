#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "vcp/codemetrics/ast.hpp"
#include "vcp/error.hpp"

namespace vcp::codemetrics {

/// Syntax error with 1-based position and the set of tokens that would
/// have been accepted there.
class ParseError : public ValidationError {
public:
    ParseError(int line, int column, std::string found, std::vector<std::string> expected);

    int line() const { return line_; }
    int column() const { return column_; }
    const std::string& found() const { return found_; }
    const std::vector<std::string>& expected() const { return expected_; }

private:
    int line_;
    int column_;
    std::string found_;
    std::vector<std::string> expected_;
};

/// Parses VCPLang source. Deterministic; throws ParseError.
SourceUnit parse(std::string text, std::string name = "<input>");

/// Canonical pretty-printed form: one statement per line, four-space
/// indentation, minimal parentheses.
std::string pretty_print(const SourceUnit& unit);
std::string pretty_print(const Expr& expr);

/// Compares two trees ignoring spans.
bool structurally_equal(const SourceUnit& a, const SourceUnit& b);

}  // namespace vcp::codemetrics
