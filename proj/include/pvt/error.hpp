#pragma once

#include <stdexcept>
#include <string>

namespace pvt {

// Exit-code families used by the command line front end:
// 1 validation/usage, 2 I/O or schema, 3 numerical failure.
enum class ErrorKind { Validation = 1, Io = 2, Numerical = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

struct ValidationError : Error {
    explicit ValidationError(const std::string& what) : Error(ErrorKind::Validation, what) {}
};

struct IoError : Error {
    explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

struct SchemaError : Error {
    explicit SchemaError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

struct ParseError : Error {
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(ErrorKind::Io, what), row_(row), column_(column) {}
    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

struct NumericalError : Error {
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

struct SingularMatrixError : NumericalError {
    SingularMatrixError(const std::string& what, double rcond)
        : NumericalError(what), rcond_(rcond) {}
    /// Reciprocal condition estimate of the offending matrix (0 when unknown).
    double rcond() const noexcept { return rcond_; }

private:
    double rcond_;
};

struct RankDeficientError : NumericalError {
    RankDeficientError(const std::string& what, long rank, long cols)
        : NumericalError(what), rank_(rank), cols_(cols) {}
    long rank() const noexcept { return rank_; }
    long cols() const noexcept { return cols_; }

private:
    long rank_;
    long cols_;
};

} // namespace pvt
