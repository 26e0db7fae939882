#pragma once

#include <stdexcept>
#include <string>

namespace spinshot {

// Base of every error raised by the library. The CLI maps the concrete
// subclass onto its exit code.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidConfig : public Error {
public:
    using Error::Error;
};

class InvalidInput : public Error {
public:
    using Error::Error;
};

// Text that failed to parse (config files, sequence programs, CSV series).
class ParseError : public Error {
public:
    ParseError(std::string source, int line, int column, const std::string& message)
        : Error(format(source, line, column, message)),
          source_(std::move(source)), line_(line), column_(column) {}

    const std::string& source() const { return source_; }
    int line() const { return line_; }
    int column() const { return column_; }

private:
    static std::string format(const std::string& source, int line, int column,
                              const std::string& message) {
        std::string out = source.empty() ? std::string("<input>") : source;
        out += ":" + std::to_string(line);
        if (column > 0) out += ":" + std::to_string(column);
        return out + ": " + message;
    }

    std::string source_;
    int line_;
    int column_;
};

class CapacityError : public Error {
public:
    using Error::Error;
};

// Ratio whose denominator vanished, e.g. infinite cyclicity.
class DivergenceError : public Error {
public:
    using Error::Error;
};

// Numerical failures: non-converged fits, unreachable calibration targets,
// undefined normalizations.
class NumericalError : public Error {
public:
    using Error::Error;
};

class FitError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class CalibrationError : public NumericalError {
public:
    CalibrationError(const std::string& message, double attainable_min, double attainable_max)
        : NumericalError(message), min_(attainable_min), max_(attainable_max) {}
    double attainable_min() const { return min_; }
    double attainable_max() const { return max_; }

private:
    double min_;
    double max_;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace spinshot
