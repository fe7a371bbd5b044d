#pragma once

#include <stdexcept>
#include <string>

namespace vizpref {

/// Contract and configuration failures. Data-level outcomes (completion
/// verdicts, unparseable judge answers) are modeled as values, not thrown.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Positioned failure from one of the text codecs (dictionary, constraint
/// DSL). Lines and columns are 1-based.
class ParseError : public Error {
public:
    ParseError(const std::string& message, int line, int col)
        : Error(message + " (line " + std::to_string(line) + ", col " +
                std::to_string(col) + ")"),
          line_(line), col_(col) {}

    int line() const { return line_; }
    int col() const { return col_; }

private:
    int line_;
    int col_;
};

} // namespace vizpref
